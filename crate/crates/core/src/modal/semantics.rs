//! Denotations `⟦·⟧` of simple modal formulas.

use super::{Formula, LogicSignature, ModelSet, TMode};
use crate::error::{Error, Result};
use crate::frame::Proposition;

fn check_atoms(sig: &LogicSignature, e: Proposition) -> Result<()> {
    sig.frame().check(e).map(|_| ())
}

/// `⟦⋁E⟧`: points whose true atom lies in `E`.
pub fn classical_model(sig: &LogicSignature, mode: TMode, e: Proposition) -> Result<ModelSet> {
    check_atoms(sig, e)?;
    Ok(ModelSet::filter(sig, mode, |x| e.contains_atom(x.truth)))
}

/// `⟦[J]⋁E⟧`: points where the pooled knowledge `∩_{j∈J} E_j` lies inside `E`.
pub fn box_model(sig: &LogicSignature, mode: TMode, group: &[usize], e: Proposition) -> Result<ModelSet> {
    sig.check_group(group)?;
    check_atoms(sig, e)?;
    Ok(ModelSet::filter(sig, mode, |x| {
        x.joint_knowledge(group).is_subset_of(e)
    }))
}

/// `⟦(J)⋁E⟧ = ⟦[J]⋁E⟧ ∖ ⋃_{F⊊E} ⟦[J]⋁F⟧`.
pub fn bla_model(sig: &LogicSignature, mode: TMode, group: &[usize], e: Proposition) -> Result<ModelSet> {
    let mut out = box_model(sig, mode, group, e)?;
    for f in e.subsets().filter(|f| *f != e) {
        out = out.difference(&box_model(sig, mode, group, f)?);
    }
    Ok(out)
}

/// Denotation of a formula of the simple fragment.
pub fn model_of(formula: &Formula, sig: &LogicSignature, mode: TMode) -> Result<ModelSet> {
    if !formula.is_simple() {
        return Err(Error::InvalidInput(
            "nested modality: modalities apply to classical propositions only".into(),
        ));
    }
    eval(formula, sig, mode)
}

fn eval(formula: &Formula, sig: &LogicSignature, mode: TMode) -> Result<ModelSet> {
    let frame = sig.frame();
    Ok(match formula {
        Formula::Bottom => ModelSet::empty(sig, mode),
        Formula::Top => ModelSet::universe(sig, mode),
        Formula::Atom(i) => {
            if *i >= frame.len() {
                return Err(Error::InvalidInput(format!("atom index {i} outside the signature")));
            }
            classical_model(sig, mode, Proposition::atom(*i))?
        }
        Formula::Not(x) => eval(x, sig, mode)?.complement(),
        Formula::And(x, y) => eval(x, sig, mode)?.intersection(&eval(y, sig, mode)?),
        Formula::Or(x, y) => eval(x, sig, mode)?.union(&eval(y, sig, mode)?),
        Formula::Implies(x, y) => eval(x, sig, mode)?.complement().union(&eval(y, sig, mode)?),
        Formula::Necessity(group, x) => box_model(sig, mode, group, classical_atoms(x, sig)?)?,
        Formula::Bla(group, x) => bla_model(sig, mode, group, classical_atoms(x, sig)?)?,
    })
}

fn classical_atoms(x: &Formula, sig: &LogicSignature) -> Result<Proposition> {
    let e = x
        .atoms_of(sig.frame())
        .ok_or_else(|| Error::InvalidInput("modal operand must be classical".into()))?;
    check_atoms(sig, e)?;
    Ok(e)
}

fn check_disjoint(sig: &LogicSignature, groups: &[Vec<usize>]) -> Result<()> {
    for (k, g) in groups.iter().enumerate() {
        sig.check_group(g)?;
        for h in &groups[..k] {
            if g.iter().any(|s| h.contains(s)) {
                return Err(Error::InvalidSources("source groups must be pairwise disjoint".into()));
            }
        }
    }
    Ok(())
}

/// `⋁_{F∩G=E} ((J)⋁F ∧ (K)⋁G)` for disjoint groups `J`, `K`.
pub fn logical_combine(
    sig: &LogicSignature,
    mode: TMode,
    j: &[usize],
    k: &[usize],
    e: Proposition,
) -> Result<ModelSet> {
    logical_combine_many(sig, mode, &[j.to_vec(), k.to_vec()], e)
}

/// `⋁_{∩Yᵢ=E} ⋀ᵢ (Jᵢ)⋁Yᵢ` for pairwise disjoint groups.
pub fn logical_combine_many(
    sig: &LogicSignature,
    mode: TMode,
    groups: &[Vec<usize>],
    e: Proposition,
) -> Result<ModelSet> {
    if groups.is_empty() {
        return Err(Error::InvalidSources("at least one source group is required".into()));
    }
    check_disjoint(sig, groups)?;
    check_atoms(sig, e)?;
    let subsets: Vec<Proposition> = sig.frame().power_set().collect();
    let blas: Vec<Vec<ModelSet>> = groups
        .iter()
        .map(|g| subsets.iter().map(|y| bla_model(sig, mode, g, *y)).collect())
        .collect::<Result<_>>()?;
    let mut out = ModelSet::empty(sig, mode);
    let mut index = vec![0usize; groups.len()];
    'outer: loop {
        let meet = index
            .iter()
            .fold(sig.frame().full(), |acc, k| acc.intersection(subsets[*k]));
        if meet == e {
            let cell = index
                .iter()
                .enumerate()
                .skip(1)
                .fold(blas[0][index[0]].clone(), |acc, (i, k)| acc.intersection(&blas[i][*k]));
            out = out.union(&cell);
        }
        for i in (0..index.len()).rev() {
            index[i] += 1;
            if index[i] < subsets.len() {
                continue 'outer;
            }
            index[i] = 0;
        }
        break;
    }
    Ok(out)
}
