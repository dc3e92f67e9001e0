//! The two-source reference family on `{a, b, c}`:
//! `m₁(a)=α₁, m₁(c)=γ₁, m₁(Ω)=1−α₁−γ₁` and `m₂(b)=β₂, m₂(c)=γ₂, m₂(Ω)=1−β₂−γ₂`.

use crate::emr::{emr_fuse, FusionStatus, SolverConfig};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::mass::{MassFunction, World};

/// Per-cell tolerance when comparing against the reference values.
pub const TABLE_TOLERANCE: f64 = 1e-4;

pub fn frame() -> Frame {
    Frame::new(["a", "b", "c"]).expect("static frame")
}

/// Builds the two sources of the family.
pub fn family(alpha1: f64, gamma1: f64, beta2: f64, gamma2: f64) -> Result<(MassFunction, MassFunction)> {
    let f = frame();
    let a = f.prop(["a"])?;
    let b = f.prop(["b"])?;
    let c = f.prop(["c"])?;
    let build = |x, px: f64, g: f64| {
        // 1 − 0.99 − 0.01 is not exactly zero in floating point.
        let rest = 1.0 - px - g;
        let rest = if rest.abs() <= 1e-12 { 0.0 } else { rest };
        MassFunction::new(f.clone(), World::Closed, [(x, px), (c, g), (f.full(), rest)])
    };
    let m1 = build(a, alpha1, gamma1).map_err(|e| Error::InvalidInput(format!("first source: {e}")))?;
    let m2 = build(b, beta2, gamma2).map_err(|e| Error::InvalidInput(format!("second source: {e}")))?;
    Ok((m1, m2))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expected {
    Rejection,
    /// m(a), m(b), m(c), m(Ω).
    Masses([f64; 4]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub params: [f64; 4],
    pub expected: Expected,
    pub note: &'static str,
}

pub fn rows() -> Vec<Row> {
    vec![
        Row {
            params: [0.99, 0.01, 0.99, 0.01],
            expected: Expected::Rejection,
            note: "Zadeh",
        },
        Row {
            params: [0.501, 0.0, 0.501, 0.0],
            expected: Expected::Rejection,
            note: "",
        },
        Row {
            params: [0.499, 0.0, 0.499, 0.0],
            expected: Expected::Masses([0.499, 0.499, 0.0, 0.002]),
            note: "",
        },
        Row {
            params: [0.3, 0.1, 0.3, 0.1],
            expected: Expected::Masses([0.3, 0.3, 0.175, 0.225]),
            note: "",
        },
        Row {
            params: [0.3, 0.05, 0.3, 0.05],
            expected: Expected::Masses([0.3, 0.3, 0.09375, 0.30625]),
            note: "",
        },
        Row {
            params: [0.3, 0.01, 0.3, 0.01],
            expected: Expected::Masses([0.3, 0.3, 0.01975, 0.38025]),
            note: "",
        },
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowResult {
    pub row: Row,
    /// `None` when the fusion was rejected.
    pub computed: Option<[f64; 4]>,
    pub max_error: f64,
    pub iterations: usize,
}

impl RowResult {
    pub fn passes(&self, tolerance: f64) -> bool {
        match (&self.row.expected, &self.computed) {
            (Expected::Rejection, None) => true,
            (Expected::Masses(_), Some(_)) => self.max_error <= tolerance,
            _ => false,
        }
    }
}

/// Recomputes one row. The fused mass must live on `a`, `b`, `c` and `Ω`;
/// anything elsewhere counts as error.
pub fn evaluate(row: &Row, cfg: &SolverConfig) -> Result<RowResult> {
    let [a1, g1, b2, g2] = row.params;
    let (m1, m2) = family(a1, g1, b2, g2)?;
    let out = emr_fuse(&[m1, m2], cfg)?;
    let f = frame();
    let keys = [f.prop(["a"])?, f.prop(["b"])?, f.prop(["c"])?, f.full()];
    let (computed, max_error) = match (out.status, out.fused) {
        (FusionStatus::Fused, Some(m)) => {
            let values = keys.map(|k| m.mass(k));
            let stray: f64 = m
                .entries()
                .filter(|(p, _)| !keys.contains(p))
                .map(|(_, v)| v.abs())
                .fold(0.0, f64::max);
            let err = match &row.expected {
                Expected::Masses(e) => values.iter().zip(e).map(|(v, x)| (v - x).abs()).fold(stray, f64::max),
                Expected::Rejection => f64::INFINITY,
            };
            (Some(values), err)
        }
        _ => (
            None,
            if row.expected == Expected::Rejection {
                0.0
            } else {
                f64::INFINITY
            },
        ),
    };
    Ok(RowResult {
        row: row.clone(),
        computed,
        max_error,
        iterations: out.iterations,
    })
}

pub fn evaluate_all(cfg: &SolverConfig) -> Result<Vec<RowResult>> {
    rows().iter().map(|r| evaluate(r, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_validates() {
        assert!(family(0.6, 0.5, 0.1, 0.1).is_err());
        let (m1, m2) = family(0.3, 0.1, 0.3, 0.1).unwrap();
        assert!((m1.mass(frame().full()) - 0.6).abs() < 1e-15);
        assert!((m2.mass(frame().full()) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn all_rows_reproduce() {
        for r in evaluate_all(&SolverConfig::default()).unwrap() {
            assert!(r.passes(TABLE_TOLERANCE), "{r:?}");
        }
    }
}
