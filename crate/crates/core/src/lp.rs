//! Dense two-phase simplex for small standard-form linear programs
//! `A x = b, x ≥ 0`, with Bland's anti-cycling rule.

const PIVOT_EPS: f64 = 1e-11;

/// Phase-one objective above this value means the constraints are infeasible.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible { residual: f64 },
    Unbounded,
}

impl LpOutcome {
    pub fn solution(&self) -> Option<&[f64]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs for each column, and the negated objective value.
    cost: Vec<f64>,
    cost_value: f64,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c];
            if factor == 0.0 {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            self.rows[i][c] = 0.0;
            self.rhs[i] -= factor * pivot_rhs;
        }
        let factor = self.cost[c];
        if factor != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            self.cost[c] = 0.0;
            self.cost_value -= factor * pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Runs Bland-rule simplex on the current cost row over the allowed columns.
    /// Returns false when the program is unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| self.cost[j] < -PIVOT_EPS);
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_EPS {
                    let ratio = self.rhs[i] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - PIVOT_EPS || (ratio <= lr + PIVOT_EPS && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Minimizes `objective · x` subject to `A x = b`, `x ≥ 0`. With no
/// objective only feasibility is decided.
pub fn solve(a: &[Vec<f64>], b: &[f64], objective: Option<&[f64]>) -> LpOutcome {
    let m = a.len();
    let n = objective
        .map(|c| c.len())
        .or_else(|| a.first().map(|r| r.len()))
        .unwrap_or(0);
    debug_assert_eq!(b.len(), m);

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut r = vec![0.0; n + m];
        for (j, v) in row.iter().enumerate() {
            r[j] = sign * v;
        }
        r[n + i] = 1.0;
        rows.push(r);
        rhs.push(sign * b[i]);
    }
    let mut cost = vec![0.0; n + m];
    for j in 0..n {
        cost[j] = -rows.iter().map(|r| r[j]).sum::<f64>();
    }
    let mut t = Tableau {
        rows,
        rhs: rhs.clone(),
        basis: (n..n + m).collect(),
        cost,
        cost_value: -rhs.iter().sum::<f64>(),
    };
    t.optimize(n + m);
    let residual = -t.cost_value;
    if residual > FEASIBILITY_TOLERANCE {
        return LpOutcome::Infeasible { residual };
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and are dropped.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| t.rows[i][j].abs() > 1e-9) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let objective_value;
    if let Some(c) = objective {
        let mut cost = vec![0.0; n + m];
        cost[..n].copy_from_slice(c);
        let mut value = 0.0;
        for (r, &bj) in t.basis.iter().enumerate() {
            let cb = if bj < n { c[bj] } else { 0.0 };
            if cb != 0.0 {
                for (v, a) in cost.iter_mut().zip(&t.rows[r]) {
                    *v -= cb * a;
                }
                value += cb * t.rhs[r];
            }
        }
        t.cost = cost;
        t.cost_value = -value;
        if !t.optimize(n) {
            return LpOutcome::Unbounded;
        }
        objective_value = -t.cost_value;
    } else {
        objective_value = 0.0;
    }

    let mut x = vec![0.0; n];
    for (r, &bj) in t.basis.iter().enumerate() {
        if bj < n {
            x[bj] = t.rhs[r].max(0.0);
        }
    }
    LpOutcome::Optimal {
        x,
        objective: objective_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn transport_feasibility() {
        // x00 + x01 = 0.5, x10 + x11 = 0.5, x00 + x10 = 0.7, x01 + x11 = 0.3
        let a = vec![
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 1.0],
        ];
        let b = [0.5, 0.5, 0.7, 0.3];
        let out = solve(&a, &b, None);
        let x = out.solution().unwrap();
        for (row, bi) in a.iter().zip(b) {
            let lhs: f64 = row.iter().zip(x).map(|(p, q)| p * q).sum();
            assert_abs_diff_eq!(lhs, bi, epsilon = 1e-12);
        }
    }

    #[test]
    fn infeasible_detected() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let out = solve(&a, &[0.5, 0.6], None);
        assert!(matches!(out, LpOutcome::Infeasible { .. }));
    }

    #[test]
    fn optimizes_objective() {
        // maximize x0 subject to x0 + x1 + x2 = 1, x0 - x2 = 0  ->  x0 = 0.5
        let a = vec![vec![1.0, 1.0, 1.0], vec![1.0, 0.0, -1.0]];
        let out = solve(&a, &[1.0, 0.0], Some(&[-1.0, 0.0, 0.0]));
        match out {
            LpOutcome::Optimal { x, objective } => {
                assert_abs_diff_eq!(x[0], 0.5, epsilon = 1e-12);
                assert_abs_diff_eq!(objective, -0.5, epsilon = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let a = vec![vec![1.0, -1.0]];
        assert_eq!(solve(&a, &[0.0], Some(&[-1.0, 0.0])), LpOutcome::Unbounded);
    }
}
