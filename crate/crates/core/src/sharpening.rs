//! The sharpening order on belief functions.
//!
//! A sharpening from m₁ to m₂ transports the mass of each proposition X of
//! m₁ onto subpropositions Y ⊆ X so that the result is m₂. When one exists,
//! m₂ is at least as committed as m₁ and we write m₁ ⊴ m₂.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::frame::Proposition;
use crate::lp::{self, LpOutcome};
use crate::mass::{MassFunction, MASS_TOLERANCE};

#[derive(Clone, Debug, PartialEq)]
pub struct Sharpening {
    from: MassFunction,
    to: MassFunction,
    entries: BTreeMap<(Proposition, Proposition), f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SharpeningViolation {
    FrameMismatch,
    Negative {
        from: Proposition,
        to: Proposition,
        mass: f64,
    },
    NotSubset {
        from: Proposition,
        to: Proposition,
    },
    RowSum {
        from: Proposition,
        sum: f64,
        expected: f64,
    },
    ColumnSum {
        to: Proposition,
        sum: f64,
        expected: f64,
    },
}

impl fmt::Display for SharpeningViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SharpeningViolation::FrameMismatch => write!(f, "source and target frames differ"),
            SharpeningViolation::Negative { from, to, mass } => {
                write!(f, "negative entry {mass} at ({from:?}, {to:?})")
            }
            SharpeningViolation::NotSubset { from, to } => {
                write!(f, "mass moved from {from:?} to {to:?}, which is not a subset")
            }
            SharpeningViolation::RowSum { from, sum, expected } => {
                write!(f, "row {from:?} sums to {sum}, expected {expected}")
            }
            SharpeningViolation::ColumnSum { to, sum, expected } => {
                write!(f, "column {to:?} sums to {sum}, expected {expected}")
            }
        }
    }
}

impl Sharpening {
    /// Builds a sharpening without checking it; see [`Sharpening::verify`].
    pub fn new(
        from: MassFunction,
        to: MassFunction,
        entries: impl IntoIterator<Item = ((Proposition, Proposition), f64)>,
    ) -> Self {
        let mut map = BTreeMap::new();
        for (k, v) in entries {
            *map.entry(k).or_insert(0.0) += v;
        }
        map.retain(|_, v| *v != 0.0);
        Sharpening { from, to, entries: map }
    }

    /// The only sharpening from a bba to itself: r(X,X) = m(X).
    pub fn identity(m: &MassFunction) -> Self {
        Self::new(m.clone(), m.clone(), m.entries().map(|(p, v)| ((p, p), v)))
    }

    pub fn from_mass(&self) -> &MassFunction {
        &self.from
    }

    pub fn to_mass(&self) -> &MassFunction {
        &self.to
    }

    pub fn entry(&self, from: Proposition, to: Proposition) -> f64 {
        self.entries.get(&(from, to)).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Proposition, Proposition, f64)> + '_ {
        self.entries.iter().map(|((x, y), v)| (*x, *y, *v))
    }

    pub fn verify(&self) -> Vec<SharpeningViolation> {
        self.verify_with(MASS_TOLERANCE)
    }

    pub fn verify_with(&self, tol: f64) -> Vec<SharpeningViolation> {
        let mut out = Vec::new();
        if self.from.frame() != self.to.frame() {
            out.push(SharpeningViolation::FrameMismatch);
            return out;
        }
        let mut rows: BTreeMap<Proposition, f64> = self.from.entries().map(|(p, _)| (p, 0.0)).collect();
        let mut cols: BTreeMap<Proposition, f64> = self.to.entries().map(|(p, _)| (p, 0.0)).collect();
        for (&(x, y), &v) in &self.entries {
            if v < -tol {
                out.push(SharpeningViolation::Negative {
                    from: x,
                    to: y,
                    mass: v,
                });
            }
            if !y.is_subset_of(x) {
                out.push(SharpeningViolation::NotSubset { from: x, to: y });
            }
            *rows.entry(x).or_insert(0.0) += v;
            *cols.entry(y).or_insert(0.0) += v;
        }
        for (x, sum) in rows {
            let expected = self.from.mass(x);
            if (sum - expected).abs() > tol {
                out.push(SharpeningViolation::RowSum { from: x, sum, expected });
            }
        }
        for (y, sum) in cols {
            let expected = self.to.mass(y);
            if (sum - expected).abs() > tol {
                out.push(SharpeningViolation::ColumnSum { to: y, sum, expected });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.verify().is_empty()
    }
}

/// Decides m₁ ⊴ m₂ by LP feasibility over the transport variables
/// r(X,Y), Y ⊆ X, and returns a witness vertex when it holds.
pub fn exists_sharpening(m1: &MassFunction, m2: &MassFunction) -> Result<Option<Sharpening>> {
    m1.check_same_frame(m2)?;
    let rows: Vec<(Proposition, f64)> = m1.entries().filter(|(_, v)| *v > 0.0).collect();
    let cols: Vec<(Proposition, f64)> = m2.entries().filter(|(_, v)| *v > 0.0).collect();
    let vars: Vec<(usize, usize)> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, (x, _))| {
            cols.iter()
                .enumerate()
                .filter(move |(_, (y, _))| y.is_subset_of(*x))
                .map(move |(j, _)| (i, j))
        })
        .collect();

    let mut a = Vec::with_capacity(rows.len() + cols.len());
    let mut b = Vec::with_capacity(rows.len() + cols.len());
    for (i, (_, v)) in rows.iter().enumerate() {
        a.push(
            vars.iter()
                .map(|&(r, _)| if r == i { 1.0 } else { 0.0 })
                .collect::<Vec<_>>(),
        );
        b.push(*v);
    }
    for (j, (_, v)) in cols.iter().enumerate() {
        a.push(
            vars.iter()
                .map(|&(_, c)| if c == j { 1.0 } else { 0.0 })
                .collect::<Vec<_>>(),
        );
        b.push(*v);
    }
    if vars.is_empty() {
        return Ok(None);
    }
    match lp::solve(&a, &b, None) {
        LpOutcome::Optimal { x, .. } => {
            let entries = vars
                .iter()
                .zip(&x)
                .filter(|(_, v)| **v > 0.0)
                .map(|(&(i, j), v)| ((rows[i].0, cols[j].0), *v));
            Ok(Some(Sharpening::new(m1.clone(), m2.clone(), entries)))
        }
        _ => Ok(None),
    }
}

/// Chains r₁₂ and r₂₃ into a sharpening from m₁ to m₃:
/// r₁₃(X₁,X₃) = Σ_{X₂} r₁₂(X₁,X₂) r₂₃(X₂,X₃) / m₂(X₂), with 0/0 = 0.
pub fn compose(r12: &Sharpening, r23: &Sharpening) -> Result<Sharpening> {
    if r12.to.frame() != r23.from.frame() || r12.to.max_abs_diff(&r23.from) > MASS_TOLERANCE {
        return Err(Error::InvalidSharpening(
            "the first witness does not end where the second one starts".into(),
        ));
    }
    let mut out: BTreeMap<(Proposition, Proposition), f64> = BTreeMap::new();
    for (x1, x2, a) in r12.entries() {
        let mid = r12.to.mass(x2);
        if mid == 0.0 {
            continue;
        }
        for (y2, x3, b) in r23.entries() {
            if y2 == x2 {
                *out.entry((x1, x3)).or_insert(0.0) += a * b / mid;
            }
        }
    }
    Ok(Sharpening::new(r12.from.clone(), r23.to.clone(), out))
}

/// bel₁(X) ≤ bel₂(X) for every X, checked over the whole power set.
pub fn dominates_pointwise(m1: &MassFunction, m2: &MassFunction) -> Result<bool> {
    m1.check_same_frame(m2)?;
    for x in m1.frame().power_set() {
        if m1.credibility(x)? > m2.credibility(x)? + MASS_TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Probability densities are the minimal elements of the sharpening order.
pub fn is_minimal_probability(m: &MassFunction) -> bool {
    m.is_probability_density()
}
