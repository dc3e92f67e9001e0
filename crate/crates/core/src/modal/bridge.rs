//! From the logical combination back to belief combination.
//!
//! Each input `mᵢ` is read as the probability of the blas `(i)Y`. The joint
//! cells `⋀ᵢ(i)Yᵢ` partition the model; a maximum entropy probability on the
//! nonempty cells with those marginals, pushed to the bla `(1…s)X` containing
//! each cell, is the fused bba. Without T every cell is nonempty and the
//! result is the conjunctive rule; with T the cells with `∩Yᵢ = ∅` vanish
//! and the result is the entropy maximizing rule.

use std::collections::BTreeMap;

use super::{bla_model, LogicSignature, ModelSet, TMode};
use crate::emr::{FusionOutcome, FusionStatus, JointMass, SolverConfig, SupportPolicy, OUTPUT_CLAMP};
use crate::error::{Error, Result};
use crate::frame::Proposition;
use crate::mass::{MassFunction, World};
use crate::maxent::MaxEntProblem;

pub fn logic_bridge_fuse(ms: &[MassFunction], world: World, cfg: &SolverConfig) -> Result<FusionOutcome> {
    let first = ms
        .first()
        .ok_or_else(|| Error::InvalidInput("at least one mass function is required".into()))?;
    for m in ms {
        first.check_same_frame(m)?;
        let report = m.validate();
        if !report.is_valid() {
            return Err(Error::InvalidMass(report));
        }
        if world == World::Closed && m.world() != World::Closed {
            return Err(Error::InvalidInput(
                "closed-world fusion takes closed-world inputs".into(),
            ));
        }
    }
    let frame = first.frame().clone();
    let sig = LogicSignature::new(frame.clone(), ms.len())?;
    let mode = match world {
        World::Closed => TMode::WithT,
        World::Open => TMode::WithoutT,
    };

    let supports: Vec<Vec<Proposition>> = ms
        .iter()
        .map(|m| m.entries().filter(|(_, v)| *v > 0.0).map(|(p, _)| p).collect())
        .collect();
    let blas: Vec<Vec<ModelSet>> = supports
        .iter()
        .enumerate()
        .map(|(i, s)| s.iter().map(|y| bla_model(&sig, mode, &[i], *y)).collect())
        .collect::<Result<_>>()?;
    let everyone: Vec<usize> = (0..ms.len()).collect();
    let fused_blas: Vec<(Proposition, ModelSet)> = frame
        .power_set()
        .map(|x| bla_model(&sig, mode, &everyone, x).map(|b| (x, b)))
        .collect::<Result<_>>()?;

    // Nonempty joint cells, with their constraint memberships and the fused
    // proposition read off the model.
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut targets_of: Vec<Proposition> = Vec::new();
    let mut index = vec![0usize; ms.len()];
    'outer: loop {
        let cell = index
            .iter()
            .enumerate()
            .skip(1)
            .fold(blas[0][index[0]].clone(), |acc, (i, k)| acc.intersection(&blas[i][*k]));
        if !cell.is_empty() {
            let membership: Vec<usize> = blas
                .iter()
                .map(|bs| bs.iter().position(|b| cell.is_subset(b)))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::InvalidInput("joint cell straddles a bla".into()))?;
            let x = fused_blas
                .iter()
                .find(|(_, b)| cell.is_subset(b))
                .map(|(x, _)| *x)
                .ok_or_else(|| Error::InvalidInput("joint cell straddles a fused bla".into()))?;
            cells.push(membership);
            targets_of.push(x);
        }
        for i in (0..index.len()).rev() {
            index[i] += 1;
            if index[i] < supports[i].len() {
                continue 'outer;
            }
            index[i] = 0;
        }
        break;
    }

    let targets: Vec<Vec<f64>> = ms
        .iter()
        .zip(&supports)
        .map(|(m, s)| s.iter().map(|y| m.mass(*y)).collect())
        .collect();
    let problem = MaxEntProblem::new(targets, cells);
    let Some(solution) = problem.solve(cfg)? else {
        return Ok(FusionOutcome {
            status: FusionStatus::Rejected,
            fused: None,
            joint: None,
            iterations: 0,
            entropy: 0.0,
        });
    };

    let mut fused: BTreeMap<Proposition, f64> = BTreeMap::new();
    for (x, v) in targets_of.iter().zip(&solution.values) {
        *fused.entry(*x).or_insert(0.0) += v;
    }
    let policy = match world {
        World::Closed => SupportPolicy::ConflictFree,
        World::Open => SupportPolicy::Unconstrained,
    };
    let joint = JointMass::new(
        frame.clone(),
        ms.len(),
        policy,
        problem
            .cells
            .iter()
            .zip(&solution.values)
            .map(|(c, v)| (c.iter().zip(&supports).map(|(k, s)| s[*k]).collect(), *v)),
    );
    let fused = MassFunction::from_entries(frame, world, fused).clamped(OUTPUT_CLAMP);
    Ok(FusionOutcome {
        status: FusionStatus::Fused,
        fused: Some(fused),
        joint: Some(joint),
        iterations: solution.iterations,
        entropy: solution.entropy,
    })
}
