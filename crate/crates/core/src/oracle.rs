//! Iterative proportional fitting: an independent route to the maximum
//! entropy joint. Starting from the uniform mass on the allowed tuples, each
//! sweep rescales the joint so that one marginal matches its target.

use std::collections::BTreeMap;

use crate::emr::{JointMass, SupportPolicy};
use crate::error::{Error, Result};
use crate::frame::Proposition;
use crate::mass::{MassFunction, World};

#[derive(Clone, Debug, PartialEq)]
pub struct IpfConfig {
    /// Largest marginal deviation accepted at convergence.
    pub tolerance: f64,
    pub max_cycles: usize,
    /// A residual that shrinks by less than this factor while the cycle
    /// count doubles is taken as proof of infeasibility.
    pub stall_ratio: f64,
}

impl Default for IpfConfig {
    fn default() -> Self {
        IpfConfig {
            tolerance: 1e-12,
            max_cycles: 1_000_000,
            stall_ratio: 0.99,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IpfResult {
    pub joint: JointMass,
    pub cycles: usize,
    pub residual: f64,
}

/// `Ok(None)` when the marginals cannot be met on the allowed tuples.
pub fn ipf_oracle(ms: &[MassFunction], policy: SupportPolicy, cfg: &IpfConfig) -> Result<Option<IpfResult>> {
    let first = ms
        .first()
        .ok_or_else(|| Error::InvalidInput("at least one mass function is required".into()))?;
    for m in ms {
        first.check_same_frame(m)?;
        let report = m.validate();
        if !report.is_valid() {
            return Err(Error::InvalidMass(report));
        }
        if policy == SupportPolicy::ConflictFree && m.world() != World::Closed {
            return Err(Error::InvalidInput(
                "conflict-free fitting takes closed-world inputs".into(),
            ));
        }
    }

    let supports: Vec<Vec<(Proposition, f64)>> = ms
        .iter()
        .map(|m| m.entries().filter(|(_, v)| *v > 0.0).collect())
        .collect();
    let mut tuples: Vec<Vec<Proposition>> = vec![Vec::new()];
    for s in &supports {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                s.iter().map(move |(p, _)| {
                    let mut u = t.clone();
                    u.push(*p);
                    u
                })
            })
            .collect();
    }
    if policy == SupportPolicy::ConflictFree {
        tuples.retain(|t| {
            !t.iter()
                .fold(Proposition::from_bits(u32::MAX), |acc, p| acc.intersection(*p))
                .is_empty()
        });
    }
    if tuples.is_empty() {
        return Ok(None);
    }
    let targets: Vec<BTreeMap<Proposition, f64>> = supports.iter().map(|s| s.iter().copied().collect()).collect();

    let mut f = vec![1.0 / tuples.len() as f64; tuples.len()];
    let marginal = |f: &[f64], i: usize| {
        let mut out: BTreeMap<Proposition, f64> = BTreeMap::new();
        for (t, v) in tuples.iter().zip(f) {
            *out.entry(t[i]).or_insert(0.0) += v;
        }
        out
    };
    let residual = |f: &[f64]| {
        (0..ms.len())
            .map(|i| {
                let got = marginal(f, i);
                targets[i]
                    .iter()
                    .map(|(p, t)| (got.get(p).copied().unwrap_or(0.0) - t).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    };

    let mut checkpoint = (1usize, f64::INFINITY);
    for cycle in 1..=cfg.max_cycles {
        for i in 0..ms.len() {
            let got = marginal(&f, i);
            for (t, v) in tuples.iter().zip(f.iter_mut()) {
                let g = got[&t[i]];
                *v = if g > 0.0 { *v * targets[i][&t[i]] / g } else { 0.0 };
            }
        }
        let r = residual(&f);
        if r <= cfg.tolerance {
            let joint = JointMass::new(first.frame().clone(), ms.len(), policy, tuples.into_iter().zip(f));
            return Ok(Some(IpfResult {
                joint,
                cycles: cycle,
                residual: r,
            }));
        }
        if cycle == 2 * checkpoint.0 {
            if r > cfg.stall_ratio * checkpoint.1 {
                return Ok(None);
            }
            checkpoint = (cycle, r);
        } else if cycle == checkpoint.0 {
            checkpoint.1 = r;
        }
    }
    Err(Error::NotConverged {
        iterations: cfg.max_cycles,
    })
}
