//! Dense two-phase revised simplex for tiny-row LPs.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0` where `A` has very few rows
//! (here at most 5) and possibly very many columns. The basis inverse is
//! recomputed from scratch every iteration; at these row counts that is
//! cheaper than worrying about update drift.

use crate::{Error, Result};

pub struct LpSolution {
    pub objective: f64,
    /// (column index, value) for basic variables with value above tolerance.
    pub support: Vec<(usize, f64)>,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-9;

/// `columns` is column-major: column j occupies `columns[j*m .. (j+1)*m]`.
pub fn solve_min(m: usize, columns: &[f64], costs: &[f64], b: &[f64]) -> Result<LpSolution> {
    let n = costs.len();
    assert_eq!(columns.len(), m * n);
    assert_eq!(b.len(), m);

    // Sign-flip rows so that b >= 0 (artificial basis must be feasible).
    let mut row_sign = vec![1.0; m];
    let mut bb = b.to_vec();
    for i in 0..m {
        if bb[i] < 0.0 {
            row_sign[i] = -1.0;
            bb[i] = -bb[i];
        }
    }
    let col = |j: usize, i: usize| -> f64 {
        if j < n {
            row_sign[i] * columns[j * m + i]
        } else {
            // artificial j-n has the unit column e_{j-n}
            if j - n == i {
                1.0
            } else {
                0.0
            }
        }
    };

    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1 minimizes the artificial mass, phase 2 the real costs.
    for phase in 0..2 {
        let cost_of = |j: usize| -> f64 {
            if phase == 0 {
                if j >= n {
                    1.0
                } else {
                    0.0
                }
            } else {
                if j >= n {
                    0.0
                } else {
                    costs[j]
                }
            }
        };
        let mut bland = false;
        for iter in 0..6000 {
            if iter == 3000 {
                bland = true; // anti-cycling fallback
            }
            let binv = basis_inverse(m, &basis, &col)?;
            let xb = mat_vec(m, &binv, &bb);
            let mut y = vec![0.0; m];
            for i in 0..m {
                let cb = cost_of(basis[i]);
                if cb != 0.0 {
                    for k in 0..m {
                        y[k] += cb * binv[i * m + k];
                    }
                }
            }
            // Pricing.
            let mut entering: Option<(usize, f64)> = None;
            let upper = if phase == 0 { n + m } else { n };
            for j in 0..upper {
                if basis.contains(&j) {
                    continue;
                }
                let mut r = cost_of(j);
                for i in 0..m {
                    r -= y[i] * col(j, i);
                }
                if r < -COST_TOL {
                    if bland {
                        entering = Some((j, r));
                        break;
                    }
                    if entering.map_or(true, |(_, rb)| r < rb) {
                        entering = Some((j, r));
                    }
                }
            }
            let Some((e, _)) = entering else {
                break; // optimal for this phase
            };
            // Ratio test.
            let d: Vec<f64> = {
                let a_e: Vec<f64> = (0..m).map(|i| col(e, i)).collect();
                mat_vec(m, &binv, &a_e)
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if d[i] > PIVOT_TOL {
                    let ratio = (xb[i].max(0.0)) / d[i];
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-12 || (ratio < lr + 1e-12 && basis[i] < basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((li, _)) = leave else {
                return Err(Error::Internal("unbounded LP in simplex".into()));
            };
            basis[li] = e;
        }
        if phase == 0 {
            let binv = basis_inverse(m, &basis, &col)?;
            let xb = mat_vec(m, &binv, &bb);
            let art: f64 = (0..m)
                .filter(|&i| basis[i] >= n)
                .map(|i| xb[i].max(0.0))
                .sum();
            if art > 1e-8 {
                return Err(Error::Infeasible(format!(
                    "LP infeasible (phase-1 residual {art:.3e})"
                )));
            }
        }
    }

    let binv = basis_inverse(m, &basis, &col)?;
    let xb = mat_vec(m, &binv, &bb);
    let mut objective = 0.0;
    let mut support = vec![];
    for i in 0..m {
        if basis[i] < n && xb[i] > 1e-12 {
            objective += costs[basis[i]] * xb[i];
            support.push((basis[i], xb[i]));
        }
    }
    support.sort_by_key(|&(j, _)| j);
    Ok(LpSolution { objective, support })
}

fn basis_inverse(m: usize, basis: &[usize], col: &impl Fn(usize, usize) -> f64) -> Result<Vec<f64>> {
    // Gauss-Jordan with partial pivoting on [B | I].
    let mut a = vec![0.0; m * m];
    let mut inv = vec![0.0; m * m];
    for (k, &j) in basis.iter().enumerate() {
        for i in 0..m {
            a[i * m + k] = col(j, i);
        }
        inv[k * m + k] = 1.0;
    }
    for c in 0..m {
        let mut piv = c;
        for r in (c + 1)..m {
            if a[r * m + c].abs() > a[piv * m + c].abs() {
                piv = r;
            }
        }
        if a[piv * m + c].abs() < 1e-13 {
            return Err(Error::Internal("singular basis in simplex".into()));
        }
        if piv != c {
            for k in 0..m {
                a.swap(c * m + k, piv * m + k);
                inv.swap(c * m + k, piv * m + k);
            }
        }
        let scale = a[c * m + c];
        for k in 0..m {
            a[c * m + k] /= scale;
            inv[c * m + k] /= scale;
        }
        for r in 0..m {
            if r != c {
                let factor = a[r * m + c];
                if factor != 0.0 {
                    for k in 0..m {
                        a[r * m + k] -= factor * a[c * m + k];
                        inv[r * m + k] -= factor * inv[c * m + k];
                    }
                }
            }
        }
    }
    Ok(inv)
}

fn mat_vec(m: usize, a: &[f64], v: &[f64]) -> Vec<f64> {
    (0..m)
        .map(|i| (0..m).map(|k| a[i * m + k] * v[k]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tiny_transport() {
        // min x0 + 2 x1 + 3 x2  s.t. x0 + x1 + x2 = 1, x1 + 2 x2 = 0.5
        let columns = vec![1.0, 0.0, 1.0, 1.0, 1.0, 2.0];
        let costs = vec![1.0, 2.0, 3.0];
        let sol = solve_min(2, &columns, &costs, &[1.0, 0.5]).unwrap();
        // optimum: x2 = 0.25, x0 = 0.75 -> 0.75 + 0.75 = 1.5
        assert_abs_diff_eq!(sol.objective, 1.5, epsilon = 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        // x0 = 1 and x0 = 2 simultaneously.
        let columns = vec![1.0, 1.0];
        let costs = vec![0.0];
        assert!(solve_min(2, &columns, &costs, &[1.0, 2.0]).is_err());
    }
}
