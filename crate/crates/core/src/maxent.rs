//! Entropy maximization over a finite joint support under marginal
//! constraints.
//!
//! A [`MaxEntProblem`] has `s` coordinates; coordinate `i` takes values
//! `0..targets[i].len()` and must have marginal `targets[i]`. The allowed
//! joint outcomes are listed in `cells`. The optimizer is a projected
//! gradient ascent: each step projects `−θ(1 + ln f)` onto the feasible
//! directions with a small quadratic program, and halves `θ` whenever the
//! step would lose entropy.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::qp::{self, NullSpaceProjector};

/// Values at or below this are treated as zero when reading LP vertices.
const VERTEX_ZERO: f64 = 1e-12;

/// Floor used inside `ln` so that the gradient stays finite at the boundary.
const LOG_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Initial step θ₀.
    pub theta0: f64,
    pub max_iterations: usize,
    /// Stop once an accepted step gains less entropy than this...
    pub entropy_tolerance: f64,
    /// ...and moves no coordinate by more than this.
    pub step_tolerance: f64,
    /// Stop once θ falls below this.
    pub step_floor: f64,
    /// Marginal residual accepted for a feasible joint.
    pub feasibility_tolerance: f64,
    /// Stop once the projected entropy gradient is this small (sup norm).
    pub stationarity_tolerance: f64,
    /// Finish with Newton steps on the positive cells once the gradient
    /// loop stops short of stationarity.
    pub polish: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            theta0: 1.0,
            max_iterations: 2_000_000,
            entropy_tolerance: 1e-12,
            step_tolerance: 1e-12,
            step_floor: 1e-14,
            feasibility_tolerance: 1e-9,
            stationarity_tolerance: 1e-11,
            polish: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("theta0", self.theta0),
            ("entropy_tolerance", self.entropy_tolerance),
            ("step_tolerance", self.step_tolerance),
            ("step_floor", self.step_floor),
            ("feasibility_tolerance", self.feasibility_tolerance),
            ("stationarity_tolerance", self.stationarity_tolerance),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Why the optimizer stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convergence {
    Stationary,
    SmallStep,
    StepFloor,
    /// The gradient loop stopped early and Newton steps reached stationarity.
    Polished,
}

const NEWTON_STEPS: usize = 100;
/// While the gradient loop runs, try a Newton finish this often.
const POLISH_EVERY: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct MaxEntSolution {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub entropy: f64,
    pub convergence: Convergence,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxEntProblem {
    pub targets: Vec<Vec<f64>>,
    pub cells: Vec<Vec<usize>>,
}

/// −Σ f ln f with 0 ln 0 = 0.
pub fn entropy(values: &[f64]) -> f64 {
    values.iter().filter(|v| **v > 0.0).map(|v| -v * v.ln()).sum()
}

/// H(f + Δ) − H(f), summed term by term so that small gains keep their
/// relative precision.
pub fn entropy_gain(f: &[f64], delta: &[f64]) -> f64 {
    f.iter()
        .zip(delta)
        .map(|(&x, &d)| {
            if d == 0.0 {
                0.0
            } else if x > 0.0 {
                let y = (x + d).max(0.0);
                if y == 0.0 {
                    x * x.ln()
                } else {
                    -d * x.ln() - y * (d / x).ln_1p()
                }
            } else if d > 0.0 {
                -d * d.ln()
            } else {
                0.0
            }
        })
        .sum()
}

/// Gradient of the entropy, −(1 + ln f).
pub fn entropy_gradient(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| -(1.0 + v.max(LOG_FLOOR).ln())).collect()
}

impl MaxEntProblem {
    pub fn new(targets: Vec<Vec<f64>>, cells: Vec<Vec<usize>>) -> Self {
        MaxEntProblem { targets, cells }
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn rows(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.targets
            .iter()
            .enumerate()
            .flat_map(|(i, t)| (0..t.len()).map(move |k| (i, k)))
    }

    /// Dense marginal constraint matrix restricted to the given cells.
    fn matrix_for(&self, cells: &[usize]) -> DMatrix<f64> {
        let rows: Vec<(usize, usize)> = self.rows().collect();
        DMatrix::from_fn(rows.len(), cells.len(), |r, c| {
            let (i, k) = rows[r];
            if self.cells[cells[c]][i] == k {
                1.0
            } else {
                0.0
            }
        })
    }

    fn lp_system(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, k) in self.rows() {
            a.push(self.cells.iter().map(|c| if c[i] == k { 1.0 } else { 0.0 }).collect());
            b.push(self.targets[i][k]);
        }
        (a, b)
    }

    /// Marginals of `values` for every coordinate.
    pub fn marginals(&self, values: &[f64]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = self.targets.iter().map(|t| vec![0.0; t.len()]).collect();
        for (cell, v) in self.cells.iter().zip(values) {
            for (i, &k) in cell.iter().enumerate() {
                out[i][k] += v;
            }
        }
        out
    }

    /// Largest absolute deviation from the marginal targets.
    pub fn marginal_residual(&self, values: &[f64]) -> f64 {
        self.marginals(values)
            .iter()
            .zip(&self.targets)
            .flat_map(|(m, t)| m.iter().zip(t).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }

    /// Any vertex of the feasible polytope, found by phase-one simplex.
    pub fn feasible_point(&self) -> Option<Vec<f64>> {
        if self.cells.is_empty() {
            return None;
        }
        let (a, b) = self.lp_system();
        match lp::solve(&a, &b, None) {
            LpOutcome::Optimal { x, .. } => Some(clean_vertex(x)),
            _ => None,
        }
    }

    /// Feasible vertices whose union of supports is the largest support any
    /// feasible point can have. Empty when infeasible.
    pub fn spanning_vertices(&self) -> Vec<Vec<f64>> {
        let Some(first) = self.feasible_point() else {
            return Vec::new();
        };
        let n = self.cells.len();
        let mut reached: Vec<bool> = first.iter().map(|v| *v > VERTEX_ZERO).collect();
        let mut vertices = vec![first];
        let (a, b) = self.lp_system();
        for j in 0..n {
            if reached[j] {
                continue;
            }
            let mut objective = vec![0.0; n];
            objective[j] = -1.0;
            if let LpOutcome::Optimal { x, .. } = lp::solve(&a, &b, Some(&objective)) {
                let x = clean_vertex(x);
                if x[j] > VERTEX_ZERO {
                    for (r, v) in reached.iter_mut().zip(&x) {
                        *r |= *v > VERTEX_ZERO;
                    }
                    vertices.push(x);
                }
            }
        }
        vertices
    }

    /// A point in the relative interior of the feasible polytope: every cell
    /// that can be positive is positive, every other cell is exactly zero.
    pub fn interior_point(&self) -> Option<Vec<f64>> {
        let vertices = self.spanning_vertices();
        let weights = vec![1.0 / vertices.len().max(1) as f64; vertices.len()];
        mix(&vertices, &weights)
    }

    /// One projected-gradient proposal Δf at step θ. Cells listed in `frozen`
    /// are held at their current value.
    pub fn gradient_step(&self, f: &[f64], theta: f64, frozen: &[bool]) -> Result<Vec<f64>> {
        let live: Vec<usize> = (0..self.cells.len()).filter(|&c| !frozen[c]).collect();
        let a = self.matrix_for(&live);
        let fl: Vec<f64> = live.iter().map(|&c| f[c]).collect();
        let target: Vec<f64> = entropy_gradient(&fl).iter().map(|g| theta * g).collect();
        let lower: Vec<f64> = fl.iter().map(|v| -v).collect();
        let step = qp::project(&a, &target, &lower)?;
        let mut delta = vec![0.0; f.len()];
        for (k, &c) in live.iter().enumerate() {
            delta[c] = step[k];
        }
        Ok(delta)
    }

    /// Relative-interior start plus the mask of cells forced to zero.
    /// `None` when the constraints are infeasible.
    pub fn interior_start(&self) -> Option<(Vec<f64>, Vec<bool>)> {
        let start = self.interior_point()?;
        let frozen = start.iter().map(|v| *v == 0.0).collect();
        Some((start, frozen))
    }

    /// Maximizes entropy from the relative interior of the feasible set.
    /// `Ok(None)` means the constraints are infeasible.
    pub fn solve(&self, cfg: &SolverConfig) -> Result<Option<MaxEntSolution>> {
        match self.interior_start() {
            None => Ok(None),
            Some((start, frozen)) => self.maximize(&start, &frozen, cfg).map(Some),
        }
    }

    /// Maximizes entropy from a feasible start. Cells flagged in `frozen`
    /// are held at zero; they should be exactly the cells that vanish on the
    /// whole feasible set.
    pub fn maximize(&self, start: &[f64], frozen: &[bool], cfg: &SolverConfig) -> Result<MaxEntSolution> {
        cfg.validate()?;
        if self.marginal_residual(start) > cfg.feasibility_tolerance || start.iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidInput("start point is not feasible".into()));
        }
        if start.iter().zip(frozen).any(|(v, z)| *z && *v != 0.0) {
            return Err(Error::InvalidInput("frozen cells must start at zero".into()));
        }
        let live: Vec<usize> = (0..start.len()).filter(|&c| !frozen[c]).collect();
        let a = self.matrix_for(&live);
        let projector = NullSpaceProjector::new(&a);
        let mut f: Vec<f64> = live.iter().map(|&c| start[c]).collect();
        let mut theta = cfg.theta0;
        let mut iterations = 0;

        let stationarity_of = |f: &[f64]| {
            let g = entropy_gradient(f);
            projector
                .apply(&projector.apply(&g))
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
        };
        let mut convergence = loop {
            if iterations >= cfg.max_iterations {
                return Err(Error::NotConverged { iterations });
            }
            iterations += 1;

            let gradient = entropy_gradient(&f);
            // A second pass removes the round-off the first leaves outside the
            // null space, which otherwise swamps the entropy gain near the optimum.
            let ascent = projector.apply(&projector.apply(&gradient));
            let stationarity = ascent.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            if stationarity <= cfg.stationarity_tolerance {
                break Convergence::Stationary;
            }

            let mut delta: Vec<f64> = ascent.iter().map(|g| theta * g).collect();
            if f.iter().zip(&delta).any(|(x, d)| x + d < 0.0) {
                let target: Vec<f64> = gradient.iter().map(|g| theta * g).collect();
                let lower: Vec<f64> = f.iter().map(|v| -v).collect();
                delta = qp::project(&a, &target, &lower)?;
            }

            let gain = entropy_gain(&f, &delta);
            if gain < 0.0 {
                theta /= 2.0;
                if theta < cfg.step_floor {
                    break Convergence::StepFloor;
                }
                continue;
            }
            let mut moved = 0.0f64;
            for (x, d) in f.iter_mut().zip(&delta) {
                *x = (*x + d).max(0.0);
                moved = moved.max(d.abs());
            }
            if gain < cfg.entropy_tolerance && moved < cfg.step_tolerance {
                break Convergence::SmallStep;
            }
            // Halving never lets θ recover, so a slow crawl is handed to
            // Newton once every cell is positive. A failed attempt is dropped.
            if cfg.polish && iterations % POLISH_EVERY == 0 && f.iter().all(|v| *v > 0.0) {
                let mut trial = f.clone();
                let steps = newton_polish(&a, &mut trial, &stationarity_of, cfg.stationarity_tolerance);
                if stationarity_of(&trial) <= cfg.stationarity_tolerance {
                    f = trial;
                    iterations += steps;
                    break Convergence::Polished;
                }
            }
        };

        if cfg.polish && convergence != Convergence::Stationary && f.iter().all(|v| *v > 0.0) {
            iterations += newton_polish(&a, &mut f, &stationarity_of, cfg.stationarity_tolerance);
            if stationarity_of(&f) <= cfg.stationarity_tolerance {
                convergence = Convergence::Polished;
            }
        }

        let mut values = vec![0.0; start.len()];
        for (k, &c) in live.iter().enumerate() {
            values[c] = f[k];
        }
        Ok(MaxEntSolution {
            entropy: entropy(&values),
            values,
            iterations,
            convergence,
        })
    }
}

/// Damped Newton ascent on `−Σ f ln f` over `{A Δ = 0}`, keeping every cell
/// positive. Returns the number of steps taken.
fn newton_polish(a: &DMatrix<f64>, f: &mut Vec<f64>, stationarity: &dyn Fn(&[f64]) -> f64, tol: f64) -> usize {
    for step in 0..NEWTON_STEPS {
        if stationarity(f) <= tol {
            return step;
        }
        let g = DVector::from_vec(entropy_gradient(f));
        let fv = DVector::from_column_slice(f);
        let weighted = DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] * f[c].sqrt());
        let lambda = qp::gram_pinv(&weighted) * (a * fv.component_mul(&g));
        let d = fv.component_mul(&(g - a.transpose() * lambda));
        let d: Vec<f64> = d.iter().copied().collect();
        let current = stationarity(f);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = d.iter().map(|x| t * x).collect();
            let next: Vec<f64> = f.iter().zip(&trial).map(|(x, s)| x + s).collect();
            // Close to the optimum the entropy gain drowns in round-off, so a
            // smaller projected gradient is accepted as progress too.
            if next.iter().all(|x| *x > 0.0) && (entropy_gain(f, &trial) > 0.0 || stationarity(&next) < current) {
                *f = next;
                break;
            }
            t /= 2.0;
            if t < 1e-12 {
                return step;
            }
        }
    }
    NEWTON_STEPS
}

fn clean_vertex(mut x: Vec<f64>) -> Vec<f64> {
    for v in x.iter_mut() {
        if *v <= VERTEX_ZERO {
            *v = 0.0;
        }
    }
    x
}

/// Convex combination of points. `None` when there are no points.
pub fn mix(points: &[Vec<f64>], weights: &[f64]) -> Option<Vec<f64>> {
    let first = points.first()?;
    let mut out = vec![0.0; first.len()];
    for (p, w) in points.iter().zip(weights) {
        for (o, v) in out.iter_mut().zip(p) {
            *o += w * v;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Two coordinates with full product support.
    fn product_problem() -> MaxEntProblem {
        let cells = (0..2).flat_map(|i| (0..3).map(move |j| vec![i, j])).collect();
        MaxEntProblem::new(vec![vec![0.4, 0.6], vec![0.2, 0.3, 0.5]], cells)
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
        assert_abs_diff_eq!(entropy(&[0.25; 4]), 4f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn gain_matches_direct_difference() {
        let f = [0.2, 0.3, 0.5, 0.0];
        let d = [0.01, -0.02, -0.03, 0.04];
        let g: Vec<f64> = f.iter().zip(&d).map(|(a, b)| a + b).collect();
        assert_abs_diff_eq!(entropy_gain(&f, &d), entropy(&g) - entropy(&f), epsilon = 1e-15);
    }

    #[test]
    fn product_is_the_unconstrained_optimum() {
        let p = product_problem();
        let start = p.interior_point().unwrap();
        assert!(start.iter().all(|v| *v > 0.0));
        let sol = p.solve(&SolverConfig::default()).unwrap().unwrap();
        for (cell, v) in p.cells.iter().zip(&sol.values) {
            assert_abs_diff_eq!(*v, p.targets[0][cell[0]] * p.targets[1][cell[1]], epsilon = 1e-10);
        }
    }

    #[test]
    fn forced_zero_cells_are_frozen() {
        // x(0,0) + x(0,1) = 0.5, x(1,1) alone must hold 0.5 of column 1 - the
        // only feasible point is a diagonal.
        let cells = vec![vec![0, 0], vec![0, 1], vec![1, 1]];
        let p = MaxEntProblem::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]], cells);
        let start = p.interior_point().unwrap();
        assert_eq!(start, vec![0.5, 0.0, 0.5]);
        let sol = p.solve(&SolverConfig::default()).unwrap().unwrap();
        assert_eq!(sol.values, vec![0.5, 0.0, 0.5]);
    }

    #[test]
    fn infeasible_problem_has_no_vertex() {
        let p = MaxEntProblem::new(vec![vec![0.6, 0.4], vec![0.6, 0.4]], vec![vec![0, 1], vec![1, 0]]);
        assert!(p.feasible_point().is_none());
        assert!(p.interior_point().is_none());
        assert!(p.solve(&SolverConfig::default()).unwrap().is_none());
    }

    #[test]
    fn gradient_step_vanishes_at_optimum() {
        let p = product_problem();
        let opt: Vec<f64> = p
            .cells
            .iter()
            .map(|c| p.targets[0][c[0]] * p.targets[1][c[1]])
            .collect();
        let delta = p.gradient_step(&opt, 1.0, &vec![false; opt.len()]).unwrap();
        assert!(delta.iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn config_validation() {
        let cfg = SolverConfig {
            theta0: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
