//! The entropy maximizing rule.
//!
//! The fused bba of `m₁ … m_s` is the image under `(Y₁,…,Y_s) ↦ ∩Yᵢ` of the
//! maximum-entropy joint mass whose marginals are the inputs and which puts
//! no mass on tuples with an empty intersection. When no such joint exists
//! the sources are rejected as incompatible.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::frame::{Frame, Proposition};
use crate::mass::{MassFunction, World, MASS_TOLERANCE};
use crate::maxent::{self, MaxEntProblem, MaxEntSolution};
use crate::sharpening::Sharpening;

pub use crate::maxent::{Convergence, SolverConfig};

/// Fused masses below this are dropped before renormalizing.
pub const OUTPUT_CLAMP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportPolicy {
    /// Tuples with an empty intersection carry no mass.
    ConflictFree,
    Unconstrained,
}

/// A sparse joint mass over s-tuples of propositions.
#[derive(Clone, Debug, PartialEq)]
pub struct JointMass {
    frame: Frame,
    arity: usize,
    entries: BTreeMap<Vec<Proposition>, f64>,
    policy: SupportPolicy,
}

#[derive(Clone, Debug, PartialEq)]
pub enum JointViolation {
    WrongArity { tuple: Vec<Proposition> },
    Negative { tuple: Vec<Proposition>, mass: f64 },
    SumNotOne { sum: f64 },
    ConflictingTuple { tuple: Vec<Proposition>, mass: f64 },
}

impl JointMass {
    pub fn new(
        frame: Frame,
        arity: usize,
        policy: SupportPolicy,
        entries: impl IntoIterator<Item = (Vec<Proposition>, f64)>,
    ) -> Self {
        let mut map = BTreeMap::new();
        for (k, v) in entries {
            *map.entry(k).or_insert(0.0) += v;
        }
        map.retain(|_, v| *v != 0.0);
        JointMass {
            frame,
            arity,
            entries: map,
            policy,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn policy(&self) -> SupportPolicy {
        self.policy
    }

    pub fn get(&self, tuple: &[Proposition]) -> f64 {
        self.entries.get(tuple).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[Proposition], f64)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn validate(&self) -> Vec<JointViolation> {
        let mut out = Vec::new();
        let mut sum = 0.0;
        for (t, &v) in &self.entries {
            if t.len() != self.arity {
                out.push(JointViolation::WrongArity { tuple: t.clone() });
            }
            if v < 0.0 {
                out.push(JointViolation::Negative {
                    tuple: t.clone(),
                    mass: v,
                });
            }
            if self.policy == SupportPolicy::ConflictFree && v != 0.0 && intersect(t).is_empty() {
                out.push(JointViolation::ConflictingTuple {
                    tuple: t.clone(),
                    mass: v,
                });
            }
            sum += v;
        }
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            out.push(JointViolation::SumNotOne { sum });
        }
        out
    }

    /// −Σ f ln f.
    pub fn entropy(&self) -> f64 {
        let values: Vec<f64> = self.entries.values().copied().collect();
        maxent::entropy(&values)
    }

    /// Marginal on coordinate `i`.
    pub fn marginal(&self, i: usize) -> MassFunction {
        MassFunction::from_entries(
            self.frame.clone(),
            World::Closed,
            self.entries.iter().map(|(t, v)| (t[i], *v)),
        )
    }

    /// Pushes the joint forward through the intersection map.
    pub fn fuse(&self) -> MassFunction {
        let world = match self.policy {
            SupportPolicy::ConflictFree => World::Closed,
            SupportPolicy::Unconstrained => World::Open,
        };
        MassFunction::from_entries(
            self.frame.clone(),
            world,
            self.entries.iter().map(|(t, v)| (intersect(t), *v)),
        )
    }
}

fn intersect(tuple: &[Proposition]) -> Proposition {
    tuple
        .iter()
        .fold(Proposition::from_bits(u32::MAX), |acc, p| acc.intersection(*p))
}

/// Additive change to a joint mass, as returned by [`gradient_step`].
pub type JointDelta = BTreeMap<Vec<Proposition>, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FusionStatus {
    Fused,
    Rejected,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FusionOutcome {
    pub status: FusionStatus,
    pub fused: Option<MassFunction>,
    pub joint: Option<JointMass>,
    pub iterations: usize,
    pub entropy: f64,
}

impl FusionOutcome {
    fn rejected() -> Self {
        FusionOutcome {
            status: FusionStatus::Rejected,
            fused: None,
            joint: None,
            iterations: 0,
            entropy: 0.0,
        }
    }

    pub fn is_fused(&self) -> bool {
        self.status == FusionStatus::Fused
    }
}

fn check_closed_inputs(ms: &[MassFunction]) -> Result<&Frame> {
    let first = ms
        .first()
        .ok_or_else(|| Error::InvalidInput("at least one mass function is required".into()))?;
    for m in ms {
        first.check_same_frame(m)?;
        let report = m.validate();
        if !report.is_valid() {
            return Err(Error::InvalidMass(report));
        }
        if m.world() != World::Closed {
            return Err(Error::InvalidInput(
                "the entropy maximizing rule takes closed-world inputs".into(),
            ));
        }
    }
    Ok(first.frame())
}

/// The optimization behind one EMR fusion: the joint index space is the
/// product of the input supports, minus conflicting tuples.
#[derive(Clone, Debug)]
pub struct FusionProblem {
    frame: Frame,
    supports: Vec<Vec<Proposition>>,
    policy: SupportPolicy,
    problem: MaxEntProblem,
}

impl FusionProblem {
    pub fn new(ms: &[MassFunction]) -> Result<Self> {
        let frame = check_closed_inputs(ms)?.clone();
        Ok(Self::build(frame, ms, SupportPolicy::ConflictFree))
    }

    /// Same marginal constraints, every tuple allowed.
    pub fn unconstrained(ms: &[MassFunction]) -> Result<Self> {
        let first = ms
            .first()
            .ok_or_else(|| Error::InvalidInput("at least one mass function is required".into()))?;
        for m in ms {
            first.check_same_frame(m)?;
        }
        Ok(Self::build(first.frame().clone(), ms, SupportPolicy::Unconstrained))
    }

    fn build(frame: Frame, ms: &[MassFunction], policy: SupportPolicy) -> Self {
        let supports: Vec<Vec<Proposition>> = ms.iter().map(|m| m.focal_elements()).collect();
        let targets: Vec<Vec<f64>> = ms
            .iter()
            .zip(&supports)
            .map(|(m, s)| s.iter().map(|p| m.mass(*p)).collect())
            .collect();
        let mut cells = Vec::new();
        let mut index = vec![0usize; supports.len()];
        'outer: loop {
            let tuple: Vec<Proposition> = index.iter().zip(&supports).map(|(k, s)| s[*k]).collect();
            if policy == SupportPolicy::Unconstrained || !intersect(&tuple).is_empty() {
                cells.push(index.clone());
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
        FusionProblem {
            frame,
            supports,
            policy,
            problem: MaxEntProblem::new(targets, cells),
        }
    }

    pub fn maxent(&self) -> &MaxEntProblem {
        &self.problem
    }

    pub fn tuple(&self, cell: usize) -> Vec<Proposition> {
        self.problem.cells[cell]
            .iter()
            .zip(&self.supports)
            .map(|(k, s)| s[*k])
            .collect()
    }

    pub fn joint(&self, values: &[f64]) -> JointMass {
        JointMass::new(
            self.frame.clone(),
            self.supports.len(),
            self.policy,
            values.iter().enumerate().map(|(c, v)| (self.tuple(c), *v)),
        )
    }

    /// Cell values of a joint mass in this problem's indexing. Fails when the
    /// joint has mass outside the index space.
    pub fn values(&self, joint: &JointMass) -> Result<Vec<f64>> {
        let values: Vec<f64> = (0..self.problem.len()).map(|c| joint.get(&self.tuple(c))).collect();
        let covered: f64 = values.iter().sum();
        let total: f64 = joint.entries().map(|(_, v)| v).sum();
        if (covered - total).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidInput("joint mass lies outside the index space".into()));
        }
        Ok(values)
    }

    pub fn feasible_point(&self) -> Option<JointMass> {
        self.problem.feasible_point().map(|v| self.joint(&v))
    }

    /// Feasible vertices that together reach every cell that can be positive.
    pub fn spanning_vertices(&self) -> Vec<JointMass> {
        self.problem.spanning_vertices().iter().map(|v| self.joint(v)).collect()
    }

    pub fn solve(&self, cfg: &SolverConfig) -> Result<FusionOutcome> {
        match self.problem.solve(cfg)? {
            None => Ok(FusionOutcome::rejected()),
            Some(sol) => Ok(self.outcome(sol)),
        }
    }

    /// Runs the optimizer from a caller-chosen feasible start. Cells that
    /// vanish on the whole feasible set are frozen at zero.
    pub fn solve_from(&self, start: &JointMass, cfg: &SolverConfig) -> Result<FusionOutcome> {
        let Some((interior, frozen)) = self.problem.interior_start() else {
            return Ok(FusionOutcome::rejected());
        };
        let mut values = self.values(start)?;
        for (v, (z, i)) in values.iter_mut().zip(frozen.iter().zip(&interior)) {
            if *z && *i == 0.0 {
                *v = 0.0;
            }
        }
        let sol = self.problem.maximize(&values, &frozen, cfg)?;
        Ok(self.outcome(sol))
    }

    fn outcome(&self, sol: MaxEntSolution) -> FusionOutcome {
        let joint = self.joint(&sol.values);
        let fused = joint.fuse().clamped(OUTPUT_CLAMP);
        FusionOutcome {
            status: FusionStatus::Fused,
            fused: Some(fused),
            joint: Some(joint),
            iterations: sol.iterations,
            entropy: sol.entropy,
        }
    }
}

/// −Σ f ln f of a joint mass.
pub fn entropy(f: &JointMass) -> f64 {
    f.entropy()
}

/// A joint mass meeting the marginal and conflict constraints, or `None`
/// when the sources cannot be combined.
pub fn feasible_point(ms: &[MassFunction]) -> Result<Option<JointMass>> {
    Ok(FusionProblem::new(ms)?.feasible_point())
}

/// Simultaneous s-way fusion by the entropy maximizing rule.
pub fn emr_fuse(ms: &[MassFunction], cfg: &SolverConfig) -> Result<FusionOutcome> {
    FusionProblem::new(ms)?.solve(cfg)
}

/// One projected-gradient proposal for a feasible conflict-free joint.
///
/// The constraint set is rebuilt from the joint itself: its marginals are the
/// input bbas and the index space is the conflict-free product of their
/// supports.
pub fn gradient_step(f: &JointMass, theta: f64) -> Result<JointDelta> {
    if !(theta > 0.0) {
        return Err(Error::InvalidInput("step must be positive".into()));
    }
    let violations = f.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidInput(format!("invalid joint mass: {violations:?}")));
    }
    let marginals: Vec<MassFunction> = (0..f.arity()).map(|i| f.marginal(i)).collect();
    let problem = FusionProblem::new(&marginals)?;
    let values = problem.values(f)?;
    let delta = problem
        .problem
        .gradient_step(&values, theta, &vec![false; values.len()])?;
    Ok(delta
        .iter()
        .enumerate()
        .filter(|(_, d)| **d != 0.0)
        .map(|(c, d)| (problem.tuple(c), *d))
        .collect())
}

/// Builds a feasible joint from sharpenings rᵢ of each mᵢ to a common m:
/// f(X₁..X_s) = Σ_X m(X)^{1−s} Π rᵢ(Xᵢ, X), with terms at m(X)=0 set to 0.
pub fn dominated_feasible_point(ms: &[MassFunction], m: &MassFunction, rs: &[Sharpening]) -> Result<JointMass> {
    let frame = check_closed_inputs(ms)?.clone();
    if ms.len() != rs.len() {
        return Err(Error::InvalidSharpening(format!(
            "{} inputs but {} sharpenings",
            ms.len(),
            rs.len()
        )));
    }
    if m.world() != World::Closed || !m.validate().is_valid() {
        return Err(Error::InvalidSharpening(
            "target must be a valid closed-world bba".into(),
        ));
    }
    for (i, (mi, r)) in ms.iter().zip(rs).enumerate() {
        let violations = r.verify();
        if !violations.is_empty() {
            return Err(Error::InvalidSharpening(format!("sharpening {i}: {violations:?}")));
        }
        if r.from_mass().max_abs_diff(mi) > MASS_TOLERANCE || r.to_mass().max_abs_diff(m) > MASS_TOLERANCE {
            return Err(Error::InvalidSharpening(format!(
                "sharpening {i} does not run from input {i} to the target"
            )));
        }
    }
    let s = ms.len() as i32;
    let mut entries: BTreeMap<Vec<Proposition>, f64> = BTreeMap::new();
    for (x, mx) in m.entries() {
        if mx <= 0.0 {
            continue;
        }
        let columns: Vec<Vec<(Proposition, f64)>> = rs
            .iter()
            .map(|r| {
                r.entries()
                    .filter(|(_, y, v)| *y == x && *v > 0.0)
                    .map(|(xi, _, v)| (xi, v))
                    .collect()
            })
            .collect();
        if columns.iter().any(|c| c.is_empty()) {
            continue;
        }
        let weight = mx.powi(1 - s);
        let mut index = vec![0usize; columns.len()];
        'outer: loop {
            let mut tuple = Vec::with_capacity(columns.len());
            let mut product = weight;
            for (k, col) in index.iter().zip(&columns) {
                tuple.push(col[*k].0);
                product *= col[*k].1;
            }
            *entries.entry(tuple).or_insert(0.0) += product;
            for i in (0..index.len()).rev() {
                index[i] += 1;
                if index[i] < columns[i].len() {
                    continue 'outer;
                }
                index[i] = 0;
            }
            break;
        }
    }
    Ok(JointMass::new(frame, ms.len(), SupportPolicy::ConflictFree, entries))
}

/// Necessary condition for the fusion to exist: for pairwise disjoint
/// nonempty X₁..X_n, Σⱼ maxᵢ belᵢ(Xⱼ) ≤ 1.
pub fn disjoint_family_bound(ms: &[MassFunction], family: &[Proposition]) -> Result<bool> {
    let frame = check_closed_inputs(ms)?;
    for (j, x) in family.iter().enumerate() {
        frame.check(*x)?;
        if x.is_empty() {
            return Err(Error::InvalidFamily("family members must be nonempty".into()));
        }
        if family[..j].iter().any(|y| !y.is_disjoint(*x)) {
            return Err(Error::InvalidFamily("family members must be pairwise disjoint".into()));
        }
    }
    let mut total = 0.0;
    for x in family {
        let mut best = 0.0f64;
        for m in ms {
            best = best.max(m.credibility(*x)?);
        }
        total += best;
    }
    Ok(total <= 1.0 + MASS_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sharpening::exists_sharpening;
    use crate::table1;
    use approx::assert_abs_diff_eq;

    fn abc() -> Frame {
        Frame::new(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn joint_entropy_values() {
        let f = abc();
        let a = f.prop(["a"]).unwrap();
        let point = JointMass::new(f.clone(), 1, SupportPolicy::ConflictFree, [(vec![a], 1.0)]);
        assert_eq!(point.entropy(), 0.0);
        let uniform = JointMass::new(
            f.clone(),
            1,
            SupportPolicy::ConflictFree,
            f.power_set().skip(1).take(4).map(|p| (vec![p], 0.25)),
        );
        assert_abs_diff_eq!(entropy(&uniform), 1.386294, epsilon = 1e-6);
    }

    #[test]
    fn single_input_is_its_own_joint() {
        let f = abc();
        let m = MassFunction::closed(&f, &[(&["a"][..], 0.3), (&["a", "b", "c"], 0.7)]).unwrap();
        let joint = feasible_point(std::slice::from_ref(&m)).unwrap().unwrap();
        assert!(joint.marginal(0).max_abs_diff(&m) < 1e-12);
        let out = emr_fuse(std::slice::from_ref(&m), &SolverConfig::default()).unwrap();
        assert!(out.fused.unwrap().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn table1_rejections_are_infeasible() {
        for (a, g) in [(0.99, 0.01), (0.501, 0.0)] {
            let (m1, m2) = table1::family(a, g, a, g).unwrap();
            assert!(feasible_point(&[m1.clone(), m2.clone()]).unwrap().is_none());
            let out = emr_fuse(&[m1, m2], &SolverConfig::default()).unwrap();
            assert_eq!(out.status, FusionStatus::Rejected);
        }
    }

    #[test]
    fn table1_row4() {
        let f = abc();
        let (m1, m2) = table1::family(0.3, 0.1, 0.3, 0.1).unwrap();
        let out = emr_fuse(&[m1, m2], &SolverConfig::default()).unwrap();
        let fused = out.fused.unwrap();
        assert_abs_diff_eq!(fused.mass(f.prop(["a"]).unwrap()), 0.3, epsilon = 1e-9);
        assert_abs_diff_eq!(fused.mass(f.prop(["b"]).unwrap()), 0.3, epsilon = 1e-9);
        assert_abs_diff_eq!(fused.mass(f.prop(["c"]).unwrap()), 0.175, epsilon = 1e-9);
        assert_abs_diff_eq!(fused.mass(f.full()), 0.225, epsilon = 1e-9);
    }

    #[test]
    fn gradient_step_from_corner_converges() {
        // Row 4 of the reference family started at f(c,c) = 0.1, driven by
        // the plain halving loop around gradient_step.
        let f = abc();
        let c = f.prop(["c"]).unwrap();
        let a = f.prop(["a"]).unwrap();
        let b = f.prop(["b"]).unwrap();
        let top = f.full();
        let mut joint = JointMass::new(
            f.clone(),
            2,
            SupportPolicy::ConflictFree,
            [
                (vec![a, top], 0.3),
                (vec![top, b], 0.3),
                (vec![c, c], 0.1),
                (vec![top, top], 0.3),
            ],
        );
        let mut theta = 1.0;
        for _ in 0..20_000 {
            let delta = gradient_step(&joint, theta).unwrap();
            let next = JointMass::new(
                f.clone(),
                2,
                SupportPolicy::ConflictFree,
                joint
                    .entries()
                    .map(|(t, v)| (t.to_vec(), v))
                    .chain(delta.iter().map(|(t, d)| (t.clone(), *d)))
                    .collect::<Vec<_>>(),
            );
            let next = JointMass::new(
                f.clone(),
                2,
                SupportPolicy::ConflictFree,
                next.entries()
                    .map(|(t, v)| (t.to_vec(), v.max(0.0)))
                    .collect::<Vec<_>>(),
            );
            if next.entropy() < joint.entropy() {
                theta /= 2.0;
                if theta < 1e-14 {
                    break;
                }
            } else {
                joint = next;
            }
        }
        assert_abs_diff_eq!(joint.get(&[c, c]), 0.025, epsilon = 1e-7);
        assert_abs_diff_eq!(joint.get(&[c, top]), 0.075, epsilon = 1e-7);
        assert_abs_diff_eq!(joint.get(&[top, c]), 0.075, epsilon = 1e-7);
        assert_abs_diff_eq!(joint.get(&[top, top]), 0.225, epsilon = 1e-7);
    }

    #[test]
    fn gradient_step_pinned_joint_is_fixed() {
        // Row 3: every cell is pinned by the marginals.
        let (m1, m2) = table1::family(0.499, 0.0, 0.499, 0.0).unwrap();
        let joint = feasible_point(&[m1, m2]).unwrap().unwrap();
        let delta = gradient_step(&joint, 1.0).unwrap();
        assert!(delta.values().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn dominated_point_constructions() {
        let f = abc();
        let m = MassFunction::closed(&f, &[(&["a", "b"][..], 0.5), (&["b", "c"], 0.5)]).unwrap();
        let id = Sharpening::identity(&m);
        let single = dominated_feasible_point(std::slice::from_ref(&m), &m, std::slice::from_ref(&id)).unwrap();
        assert!(single.marginal(0).max_abs_diff(&m) < 1e-15);

        let diag = dominated_feasible_point(&[m.clone(), m.clone()], &m, &[id.clone(), id]).unwrap();
        for (t, v) in diag.entries() {
            assert_eq!(t[0], t[1]);
            assert_abs_diff_eq!(v, m.mass(t[0]), epsilon = 1e-15);
        }

        let rho = MassFunction::closed(&f, &[(&["a"][..], 0.5), (&["c"], 0.5)]).unwrap();
        let r = exists_sharpening(&m, &rho).unwrap().unwrap();
        let joint = dominated_feasible_point(&[m.clone(), m.clone()], &rho, &[r.clone(), r]).unwrap();
        assert!(joint.validate().is_empty());
        assert!(joint.marginal(0).max_abs_diff(&m) < 1e-12);
        assert!(joint.marginal(1).max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn dominated_point_rejects_bad_witness() {
        let f = abc();
        let m = MassFunction::closed(&f, &[(&["a", "b"][..], 0.5), (&["b", "c"], 0.5)]).unwrap();
        let nu = MassFunction::total_ignorance(&f);
        let wrong = Sharpening::identity(&nu);
        assert!(matches!(
            dominated_feasible_point(std::slice::from_ref(&m), &m, &[wrong]),
            Err(Error::InvalidSharpening(_))
        ));
    }

    #[test]
    fn disjoint_family_bound_cases() {
        let f = abc();
        let a = f.prop(["a"]).unwrap();
        let b = f.prop(["b"]).unwrap();
        let (z1, z2) = table1::family(0.99, 0.01, 0.99, 0.01).unwrap();
        assert!(!disjoint_family_bound(&[z1.clone(), z2.clone()], &[a, b]).unwrap());
        let (r1, r2) = table1::family(0.499, 0.0, 0.499, 0.0).unwrap();
        assert!(disjoint_family_bound(&[r1, r2], &[a, b]).unwrap());
        assert!(disjoint_family_bound(&[z1.clone(), z2.clone()], &[f.full()]).unwrap());
        assert!(disjoint_family_bound(&[z1, z2], &[a, f.full()]).is_err());
    }
}
