//! Basic belief assignments and the credibility/plausibility functions.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::frame::{Frame, Proposition};

/// Tolerance used when checking that masses sum to one.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Whether the contradiction may carry mass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum World {
    Open,
    Closed,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NegativeMass { set: String, mass: f64 },
    NonFinite { set: String },
    SumNotOne { sum: f64 },
    ClosedWorldConflict { mass: f64 },
    OutsideFrame { set: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeMass { set, mass } => write!(f, "negative mass {mass} on {set}"),
            Violation::NonFinite { set } => write!(f, "non-finite mass on {set}"),
            Violation::SumNotOne { sum } => write!(f, "sum ≠ 1 (masses sum to {sum})"),
            Violation::ClosedWorldConflict { mass } => {
                write!(f, "closed world requires m(∅)=0 (found {mass})")
            }
            Violation::OutsideFrame { set } => write!(f, "set {set} is not part of the frame"),
        }
    }
}

/// Every invariant a mass function breaks. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A basic belief assignment over the power set of a frame.
///
/// Only focal candidates are stored; an absent proposition has mass zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction {
    frame: Frame,
    world: World,
    masses: BTreeMap<Proposition, f64>,
}

impl MassFunction {
    /// Builds a mass function without validating it. Repeated propositions
    /// accumulate and exact zeros are dropped.
    pub fn from_entries(frame: Frame, world: World, entries: impl IntoIterator<Item = (Proposition, f64)>) -> Self {
        let mut masses = BTreeMap::new();
        for (p, m) in entries {
            *masses.entry(p).or_insert(0.0) += m;
        }
        masses.retain(|_, m| *m != 0.0);
        MassFunction { frame, world, masses }
    }

    /// Builds and validates a mass function.
    pub fn new(frame: Frame, world: World, entries: impl IntoIterator<Item = (Proposition, f64)>) -> Result<Self> {
        let m = Self::from_entries(frame, world, entries);
        let report = m.validate();
        if report.is_valid() {
            Ok(m)
        } else {
            Err(Error::InvalidMass(report))
        }
    }

    /// Convenience constructor from atom labels, closed world.
    pub fn closed<S: AsRef<str>>(frame: &Frame, entries: &[(&[S], f64)]) -> Result<Self> {
        let mut props = Vec::with_capacity(entries.len());
        for (labels, m) in entries {
            props.push((frame.prop(labels.iter())?, *m));
        }
        Self::new(frame.clone(), World::Closed, props)
    }

    /// The bba of total ignorance: all mass on the tautology.
    pub fn total_ignorance(frame: &Frame) -> Self {
        Self::from_entries(frame.clone(), World::Closed, [(frame.full(), 1.0)])
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn world(&self) -> World {
        self.world
    }

    pub fn with_world(mut self, world: World) -> Self {
        self.world = world;
        self
    }

    pub fn mass(&self, p: Proposition) -> f64 {
        self.masses.get(&p).copied().unwrap_or(0.0)
    }

    /// Stored entries, including any that are numerically zero.
    pub fn entries(&self) -> impl Iterator<Item = (Proposition, f64)> + '_ {
        self.masses.iter().map(|(p, m)| (*p, *m))
    }

    /// Propositions with strictly positive mass.
    pub fn focal_elements(&self) -> Vec<Proposition> {
        self.masses.iter().filter(|(_, m)| **m > 0.0).map(|(p, _)| *p).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with(MASS_TOLERANCE)
    }

    pub fn validate_with(&self, tol: f64) -> ValidationReport {
        let mut violations = Vec::new();
        let mut sum = 0.0;
        for (&p, &m) in &self.masses {
            let set = self.frame.display(p);
            if !self.frame.contains(p) {
                violations.push(Violation::OutsideFrame { set: format!("{p:?}") });
                continue;
            }
            if !m.is_finite() {
                violations.push(Violation::NonFinite { set });
                continue;
            }
            if m < 0.0 {
                violations.push(Violation::NegativeMass { set, mass: m });
            }
            sum += m;
        }
        if (sum - 1.0).abs() > tol {
            violations.push(Violation::SumNotOne { sum });
        }
        let conflict = self.mass(Proposition::EMPTY);
        if self.world == World::Closed && conflict != 0.0 {
            violations.push(Violation::ClosedWorldConflict { mass: conflict });
        }
        ValidationReport { violations }
    }

    fn same_frame(&self, p: Proposition) -> Result<()> {
        self.frame.check(p).map(|_| ())
    }

    pub fn check_same_frame(&self, other: &MassFunction) -> Result<()> {
        if self.frame == other.frame {
            Ok(())
        } else {
            Err(Error::FrameMismatch(format!(
                "{:?} vs {:?}",
                self.frame.atoms(),
                other.frame.atoms()
            )))
        }
    }

    /// bel(X): total mass of the nonempty subsets of `x`.
    pub fn credibility(&self, x: Proposition) -> Result<f64> {
        self.same_frame(x)?;
        Ok(self
            .masses
            .iter()
            .filter(|(p, _)| !p.is_empty() && p.is_subset_of(x))
            .map(|(_, m)| m)
            .sum())
    }

    /// Pl(X) = 1 − bel(∼X).
    pub fn plausibility(&self, x: Proposition) -> Result<f64> {
        let complement = self.frame.not(x)?;
        Ok(1.0 - self.credibility(complement)?)
    }

    /// Focal elements are pairwise disjoint, nonempty and cover the frame.
    pub fn is_probabilistic(&self) -> bool {
        let focal = self.focal_elements();
        if focal.iter().any(|p| p.is_empty()) {
            return false;
        }
        let mut cover = Proposition::EMPTY;
        for p in &focal {
            if !cover.is_disjoint(*p) {
                return false;
            }
            cover = cover.union(*p);
        }
        cover == self.frame.full()
    }

    /// Probabilistic with atomic focal elements.
    pub fn is_probability_density(&self) -> bool {
        self.is_probabilistic() && self.focal_elements().iter().all(|p| p.is_atom())
    }

    /// Largest absolute mass difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &MassFunction) -> f64 {
        self.masses
            .keys()
            .chain(other.masses.keys())
            .map(|p| (self.mass(*p) - other.mass(*p)).abs())
            .fold(0.0, f64::max)
    }

    /// Total variation distance, half the L1 distance.
    pub fn total_variation(&self, other: &MassFunction) -> f64 {
        let mut keys: Vec<Proposition> = self.masses.keys().chain(other.masses.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        0.5 * keys.iter().map(|p| (self.mass(*p) - other.mass(*p)).abs()).sum::<f64>()
    }

    /// Drops masses below `floor` and renormalizes the remainder.
    pub fn clamped(&self, floor: f64) -> MassFunction {
        let kept: Vec<(Proposition, f64)> = self
            .masses
            .iter()
            .filter(|(_, m)| **m >= floor)
            .map(|(p, m)| (*p, *m))
            .collect();
        let total: f64 = kept.iter().map(|(_, m)| m).sum();
        let scale = if total > 0.0 { 1.0 / total } else { 1.0 };
        Self::from_entries(
            self.frame.clone(),
            self.world,
            kept.into_iter().map(|(p, m)| (p, m * scale)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn abc() -> Frame {
        Frame::new(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn validation_reports() {
        let f = abc();
        let nu = MassFunction::total_ignorance(&f);
        assert!(nu.validate().is_valid());

        let conflict =
            MassFunction::from_entries(f.clone(), World::Closed, [(Proposition::EMPTY, 0.2), (f.full(), 0.8)]);
        let report = conflict.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(report.to_string().contains("closed world requires m(∅)=0"));

        let over = MassFunction::from_entries(
            f.clone(),
            World::Closed,
            [(f.prop(["a"]).unwrap(), 0.6), (f.prop(["b"]).unwrap(), 0.6)],
        );
        let report = over.validate();
        assert!(matches!(report.violations[..], [Violation::SumNotOne { .. }]));
        assert!(report.to_string().contains("sum ≠ 1"));
    }

    #[test]
    fn credibility_and_plausibility() {
        let f = abc();
        let m = MassFunction::closed(&f, &[(&["a"][..], 0.3), (&["c"], 0.1), (&["a", "b", "c"], 0.6)]).unwrap();
        assert_abs_diff_eq!(
            m.credibility(f.prop(["a", "c"]).unwrap()).unwrap(),
            0.4,
            epsilon = 1e-15
        );
        assert_eq!(m.credibility(Proposition::EMPTY).unwrap(), 0.0);
        assert_abs_diff_eq!(m.credibility(f.full()).unwrap(), 1.0, epsilon = 1e-15);

        let nu = MassFunction::total_ignorance(&f);
        for x in f.power_set().filter(|x| !x.is_empty()) {
            assert_eq!(nu.plausibility(x).unwrap(), 1.0);
        }
        assert_eq!(nu.credibility(f.prop(["a"]).unwrap()).unwrap(), 0.0);

        let certain = MassFunction::closed(&f, &[(&["a"][..], 1.0)]).unwrap();
        assert_eq!(certain.plausibility(f.prop(["b"]).unwrap()).unwrap(), 0.0);

        let m = MassFunction::closed(&f, &[(&["a"][..], 0.3), (&["a", "b", "c"], 0.7)]).unwrap();
        assert_abs_diff_eq!(m.plausibility(f.prop(["a"]).unwrap()).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn open_world_bel_top() {
        let f = abc();
        let m = MassFunction::new(f.clone(), World::Open, [(Proposition::EMPTY, 0.25), (f.full(), 0.75)]).unwrap();
        assert_abs_diff_eq!(m.credibility(f.full()).unwrap(), 0.75);
    }

    #[test]
    fn probabilistic_classification() {
        let f = abc();
        let m = MassFunction::closed(&f, &[(&["a"][..], 0.5), (&["b", "c"], 0.5)]).unwrap();
        assert!(m.is_probabilistic());
        assert!(!m.is_probability_density());

        let third = 1.0 / 3.0;
        let u = MassFunction::closed(&f, &[(&["a"][..], third), (&["b"], third), (&["c"], third)]).unwrap();
        assert!(u.is_probability_density());

        let overlap = MassFunction::closed(&f, &[(&["a", "b"][..], 0.5), (&["b", "c"], 0.5)]).unwrap();
        assert!(!overlap.is_probabilistic());
    }

    #[test]
    fn frame_mismatch() {
        let f = abc();
        let nu = MassFunction::total_ignorance(&f);
        assert!(nu.credibility(Proposition::atom(5)).is_err());
        let other = MassFunction::total_ignorance(&Frame::new(["a", "b"]).unwrap());
        assert!(nu.check_same_frame(&other).is_err());
    }
}
