//! Conjunctive combination, Dempster-Shafer, the generic conflict
//! redistribution scheme and PCR5.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::frame::Proposition;
use crate::mass::{MassFunction, World, MASS_TOLERANCE};

/// `1 − Z` below this is treated as total conflict.
pub const TOTAL_CONFLICT_GUARD: f64 = 1e-12;

fn check_inputs(m1: &MassFunction, m2: &MassFunction) -> Result<()> {
    m1.check_same_frame(m2)?;
    for m in [m1, m2] {
        let report = m.validate();
        if !report.is_valid() {
            return Err(Error::InvalidMass(report));
        }
    }
    Ok(())
}

/// Unnormalized conjunctive combination. The mass left on ∅ is the conflict.
pub fn conjunctive(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    check_inputs(m1, m2)?;
    let mut out: BTreeMap<Proposition, f64> = BTreeMap::new();
    for (y1, a) in m1.entries() {
        for (y2, b) in m2.entries() {
            *out.entry(y1.intersection(y2)).or_insert(0.0) += a * b;
        }
    }
    Ok(MassFunction::from_entries(m1.frame().clone(), World::Open, out))
}

/// Degree of conflict: the conjunctive mass on ∅.
pub fn conflict_degree(m1: &MassFunction, m2: &MassFunction) -> Result<f64> {
    Ok(conjunctive(m1, m2)?.mass(Proposition::EMPTY))
}

pub fn dempster_shafer(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    let conj = conjunctive(m1, m2)?;
    let z = conj.mass(Proposition::EMPTY);
    if 1.0 - z < TOTAL_CONFLICT_GUARD {
        return Err(Error::TotalConflict(z));
    }
    // Dividing by the retained mass rather than 1 − Z keeps the sum at one
    // when Z is close to one.
    let kept: f64 = conj.entries().filter(|(p, _)| !p.is_empty()).map(|(_, m)| m).sum();
    let scale = 1.0 / kept;
    Ok(MassFunction::from_entries(
        m1.frame().clone(),
        World::Closed,
        conj.entries()
            .filter(|(p, _)| !p.is_empty())
            .map(|(p, m)| (p, m * scale)),
    ))
}

/// A conflict redistribution function r(X | m₁, m₂).
///
/// It must satisfy r(∅)=−1 and Σ_Y r(Y)=0; it is typically, but not
/// necessarily, nonnegative off ∅.
pub trait Redistribution {
    fn redistribution(&self, x: Proposition, m1: &MassFunction, m2: &MassFunction) -> f64;
}

/// Wraps a closure as a redistribution function.
pub struct FnRedistribution<F>(pub F);

impl<F> Redistribution for FnRedistribution<F>
where
    F: Fn(Proposition, &MassFunction, &MassFunction) -> f64,
{
    fn redistribution(&self, x: Proposition, m1: &MassFunction, m2: &MassFunction) -> f64 {
        (self.0)(x, m1, m2)
    }
}

/// Proportional to the conjunctive output; yields Dempster-Shafer.
pub struct DsRedistribution;

impl Redistribution for DsRedistribution {
    fn redistribution(&self, x: Proposition, m1: &MassFunction, m2: &MassFunction) -> f64 {
        if x.is_empty() {
            return -1.0;
        }
        let conj = conjunctive(m1, m2).expect("inputs checked by caller");
        let z = conj.mass(Proposition::EMPTY);
        conj.mass(x) / (1.0 - z)
    }
}

/// Sends the whole conflict to the tautology.
pub struct TautologyRedistribution;

impl Redistribution for TautologyRedistribution {
    fn redistribution(&self, x: Proposition, m1: &MassFunction, _m2: &MassFunction) -> f64 {
        if x.is_empty() {
            -1.0
        } else if x == m1.frame().full() {
            1.0
        } else {
            0.0
        }
    }
}

/// PCR5 written as a redistribution function.
pub struct Pcr5Redistribution;

impl Redistribution for Pcr5Redistribution {
    fn redistribution(&self, x: Proposition, m1: &MassFunction, m2: &MassFunction) -> f64 {
        if x.is_empty() {
            return -1.0;
        }
        let z = conflict_degree(m1, m2).expect("inputs checked by caller");
        if z == 0.0 {
            return 0.0;
        }
        pcr5_share(x, m1, m2) / z
    }
}

fn proportional(own: f64, other: f64) -> f64 {
    let denom = own + other;
    if denom == 0.0 {
        0.0
    } else {
        own * own * other / denom
    }
}

/// Conflict mass that PCR5 hands back to `x`.
fn pcr5_share(x: Proposition, m1: &MassFunction, m2: &MassFunction) -> f64 {
    let a1 = m1.mass(x);
    let a2 = m2.mass(x);
    let mut share = 0.0;
    if a1 > 0.0 {
        for (y, b) in m2.entries() {
            if x.is_disjoint(y) {
                share += proportional(a1, b);
            }
        }
    }
    if a2 > 0.0 {
        for (y, b) in m1.entries() {
            if x.is_disjoint(y) {
                share += proportional(a2, b);
            }
        }
    }
    share
}

/// Outcome of checking a redistribution function on a pair of inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct RedistributionCheck {
    pub value_at_empty: f64,
    pub total: f64,
    /// False when r is negative somewhere off ∅ (allowed, but flagged).
    pub nonnegative: bool,
}

impl RedistributionCheck {
    pub fn is_admissible(&self) -> bool {
        (self.value_at_empty + 1.0).abs() <= MASS_TOLERANCE && self.total.abs() <= MASS_TOLERANCE
    }
}

pub fn check_redistribution<R: Redistribution + ?Sized>(
    r: &R,
    m1: &MassFunction,
    m2: &MassFunction,
) -> RedistributionCheck {
    let mut total = 0.0;
    let mut nonnegative = true;
    let mut at_empty = 0.0;
    for x in m1.frame().power_set() {
        let v = r.redistribution(x, m1, m2);
        total += v;
        if x.is_empty() {
            at_empty = v;
        } else if v < -MASS_TOLERANCE {
            nonnegative = false;
        }
    }
    RedistributionCheck {
        value_at_empty: at_empty,
        total,
        nonnegative,
    }
}

/// m₁ ⊕[r] m₂ (X) = conj(X) + r(X | m₁, m₂)·Z.
pub fn redistribute<R: Redistribution + ?Sized>(m1: &MassFunction, m2: &MassFunction, r: &R) -> Result<MassFunction> {
    let conj = conjunctive(m1, m2)?;
    let z = conj.mass(Proposition::EMPTY);
    if z == 0.0 {
        return Ok(conj.with_world(World::Closed));
    }
    let check = check_redistribution(r, m1, m2);
    if !check.is_admissible() {
        return Err(Error::InvalidRedistribution(format!(
            "r(∅)={} and Σr={}",
            check.value_at_empty, check.total
        )));
    }
    let entries = m1.frame().power_set().filter_map(|x| {
        if x.is_empty() {
            return None;
        }
        let v = conj.mass(x) + r.redistribution(x, m1, m2) * z;
        (v != 0.0).then_some((x, v))
    });
    Ok(MassFunction::from_entries(m1.frame().clone(), World::Closed, entries))
}

/// Proportional Conflict Redistribution no. 5.
///
/// Each conflicting product m₁(X)m₂(Y) with X∩Y=∅ is split between X and Y
/// in proportion to m₁(X) and m₂(Y).
pub fn pcr5(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    let conj = conjunctive(m1, m2)?;
    let mut out: BTreeMap<Proposition, f64> = conj.entries().filter(|(p, _)| !p.is_empty()).collect();
    for (x, a) in m1.entries() {
        for (y, b) in m2.entries() {
            if !x.is_disjoint(y) {
                continue;
            }
            let denom = a + b;
            if denom == 0.0 {
                continue;
            }
            let product = a * b;
            *out.entry(x).or_insert(0.0) += product * a / denom;
            *out.entry(y).or_insert(0.0) += product * b / denom;
        }
    }
    Ok(MassFunction::from_entries(m1.frame().clone(), World::Closed, out))
}
