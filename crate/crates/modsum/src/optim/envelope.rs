//! Lower convex envelope of a function on a probability simplex, evaluated at
//! one target point.
//!
//! The primary method discretizes the simplex and solves the exact finite LP
//!   min sum_j lambda_j f(q_j)  s.t.  sum_j lambda_j q_j = q*, lambda >= 0.
//! The target itself is always included as a candidate atom, so the envelope
//! value never exceeds f(q*). A parametric search over explicit channels with
//! a bounded output alphabet serves as an independent cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::simplex_lp;
use crate::{Error, Result};

pub struct EnvelopeProblem<'a> {
    /// Objective on the simplex; must be finite on every grid point.
    pub f: &'a dyn Fn(&[f64]) -> f64,
    /// Target point q*, a distribution over the simplex atoms.
    pub target: Vec<f64>,
    /// Grid denominator per axis (points have coordinates i / resolution).
    pub resolution: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EnvelopeSolution {
    pub value: f64,
    /// Convex decomposition of the target: (weight, posterior) pairs.
    pub witness: Vec<(f64, Vec<f64>)>,
}

fn check_simplex(q: &[f64]) -> Result<()> {
    if q.is_empty() || q.iter().any(|&v| !(v.is_finite() && v >= -1e-9)) {
        return Err(Error::Domain("target has a negative or non-finite entry".into()));
    }
    let s: f64 = q.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("target mass {s} is not 1")));
    }
    Ok(())
}

fn grid_points(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    let mut out = vec![];
    let mut point = vec![0usize; dim];
    fn rec(point: &mut Vec<usize>, i: usize, left: usize, res: usize, out: &mut Vec<Vec<f64>>) {
        if i + 1 == point.len() {
            point[i] = left;
            out.push(point.iter().map(|&c| c as f64 / res as f64).collect());
            return;
        }
        for c in 0..=left {
            point[i] = c;
            rec(point, i + 1, left - c, res, out);
        }
    }
    rec(&mut point, 0, resolution, resolution, &mut out);
    out
}

/// Evaluates the lower convex envelope of `problem.f` at `problem.target`.
pub fn lower_convex_envelope(problem: &EnvelopeProblem) -> Result<EnvelopeSolution> {
    check_simplex(&problem.target)?;
    if problem.resolution < 32 {
        return Err(Error::Domain(format!(
            "grid resolution {} below the minimum of 32",
            problem.resolution
        )));
    }
    let dim = problem.target.len();
    if dim == 1 {
        return Ok(EnvelopeSolution {
            value: (problem.f)(&problem.target),
            witness: vec![(1.0, problem.target.clone())],
        });
    }
    let mut points = grid_points(dim, problem.resolution);
    points.push(problem.target.clone());

    let mut columns = Vec::with_capacity(points.len() * dim);
    let mut costs = Vec::with_capacity(points.len());
    for q in &points {
        columns.extend_from_slice(q);
        let v = (problem.f)(q);
        if !v.is_finite() {
            return Err(Error::Domain("objective not finite on a grid point".into()));
        }
        costs.push(v);
    }
    let sol = simplex_lp::solve_min(dim, &columns, &costs, &problem.target)
        .map_err(|e| Error::Internal(format!("envelope LP failed: {e}")))?;
    let witness = sol
        .support
        .iter()
        .filter(|&&(_, w)| w > 1e-9)
        .map(|&(j, w)| (w, points[j].clone()))
        .collect();
    Ok(EnvelopeSolution { value: sol.objective, witness })
}

fn project_to_simplex(v: &mut [f64]) {
    // Euclidean projection onto { x >= 0, sum x = 1 }.
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cum += s;
        let t = (cum - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Independent cross-check: minimizes `E[f(posterior)]` over explicit channels
/// from the simplex atoms into an auxiliary alphabet of `num_outputs` symbols,
/// by multi-start projected gradient descent. Returns the best value found.
pub fn envelope_channel_ascent(
    f: &dyn Fn(&[f64]) -> f64,
    target: &[f64],
    num_outputs: usize,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<f64> {
    check_simplex(target)?;
    let dim = target.len();
    let nu = num_outputs.max(1);
    let objective = |channel: &[f64]| -> f64 {
        let mut total = 0.0;
        let mut posterior = vec![0.0; dim];
        for u in 0..nu {
            let mut pu = 0.0;
            for a in 0..dim {
                pu += target[a] * channel[a * nu + u];
            }
            if pu > 1e-12 {
                for a in 0..dim {
                    posterior[a] = target[a] * channel[a * nu + u] / pu;
                }
                total += pu * f(&posterior);
            }
        }
        total
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for start in 0..restarts.max(2) {
        let mut channel = vec![0.0; dim * nu];
        match start {
            0 => {
                // constant channel: U carries nothing
                for a in 0..dim {
                    channel[a * nu] = 1.0;
                }
            }
            1 => {
                // identity-like channel: U reveals the atom
                for a in 0..dim {
                    channel[a * nu + a.min(nu - 1)] = 1.0;
                }
            }
            _ => {
                for a in 0..dim {
                    let row = &mut channel[a * nu..(a + 1) * nu];
                    let mut s = 0.0;
                    for x in row.iter_mut() {
                        *x = -(rng.gen_range(1e-12..1.0f64)).ln();
                        s += *x;
                    }
                    for x in row.iter_mut() {
                        *x /= s;
                    }
                }
            }
        }
        let mut value = objective(&channel);
        let mut step = 0.25;
        let h = 1e-6;
        for _ in 0..iters {
            // forward-difference gradient
            let mut grad = vec![0.0; dim * nu];
            for i in 0..dim * nu {
                let old = channel[i];
                let lo = (old - h).max(0.0);
                channel[i] = old + h;
                let plus = objective(&channel);
                channel[i] = lo;
                let minus = objective(&channel);
                channel[i] = old;
                grad[i] = (plus - minus) / (old + h - lo);
            }
            let mut improved = false;
            while step > 1e-7 {
                let mut cand = channel.clone();
                for i in 0..dim * nu {
                    cand[i] -= step * grad[i];
                }
                for a in 0..dim {
                    project_to_simplex(&mut cand[a * nu..(a + 1) * nu]);
                }
                let cv = objective(&cand);
                if cv < value - 1e-12 {
                    channel = cand;
                    value = cv;
                    improved = true;
                    step *= 1.5;
                    break;
                }
                step *= 0.5;
            }
            if !improved && step <= 1e-7 {
                break;
            }
        }
        if value < best {
            best = value;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn envelope(f: &dyn Fn(&[f64]) -> f64, target: Vec<f64>, res: usize) -> EnvelopeSolution {
        lower_convex_envelope(&EnvelopeProblem { f, target, resolution: res }).unwrap()
    }

    #[test]
    fn affine_is_its_own_envelope() {
        let f = |q: &[f64]| 1.0 + 2.0 * q[0] - 0.5 * q[1] + 0.25 * q[2];
        let target = vec![0.2, 0.3, 0.5];
        let sol = envelope(&f, target.clone(), 64);
        assert_abs_diff_eq!(sol.value, f(&target), epsilon = 1e-9);
    }

    #[test]
    fn concave_envelope_is_vertex_interpolation() {
        // Lower hull of a concave function is the affine interpolation of the
        // vertex values: value = sum_i q*_i f(e_i).
        let f = |q: &[f64]| -> f64 {
            q.iter()
                .map(|&v| if v > 0.0 { -v * v.log2() } else { 0.0 })
                .sum::<f64>()
                + 0.7 * q[0]
                - 0.2 * q[1]
        };
        let target = vec![0.25, 0.5, 0.25];
        let expected: f64 = target
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let mut vertex = vec![0.0; 3];
                vertex[i] = 1.0;
                w * f(&vertex)
            })
            .sum();
        let sol = envelope(&f, target, 128);
        assert_abs_diff_eq!(sol.value, expected, epsilon = 1e-6);
        // witness atoms should be (near) vertices
        for (w, q) in &sol.witness {
            assert!(*w > 1e-9);
            assert!(q.iter().any(|&v| v > 1.0 - 1e-6));
        }
    }

    #[test]
    fn convex_is_its_own_envelope() {
        let f = |q: &[f64]| q.iter().map(|&v| v * v).sum::<f64>();
        let target = vec![0.1, 0.45, 0.45];
        let sol = envelope(&f, target.clone(), 64);
        assert_abs_diff_eq!(sol.value, f(&target), epsilon = 1e-9);
        assert_eq!(sol.witness.len(), 1);
    }

    #[test]
    fn envelope_never_exceeds_f_at_target() {
        let f = |q: &[f64]| (q[0] * 6.0).sin() + q[1];
        let target = vec![0.337, 0.413, 0.25];
        let sol = envelope(&f, target.clone(), 64);
        assert!(sol.value <= f(&target) + 1e-12);
    }

    #[test]
    fn finer_grid_never_increases_value() {
        let f = |q: &[f64]| (q[0] - 0.3).abs() + (q[1] * 4.0).cos() * 0.2;
        let target = vec![0.3, 0.3, 0.4];
        let coarse = envelope(&f, target.clone(), 32).value;
        let fine = envelope(&f, target, 64).value;
        assert!(fine <= coarse + 1e-9);
    }

    #[test]
    fn channel_ascent_matches_lp_on_smooth_concave() {
        let f = |q: &[f64]| -> f64 {
            q.iter()
                .map(|&v| if v > 0.0 { -v * v.log2() } else { 0.0 })
                .sum()
        };
        let target = vec![0.25, 0.5, 0.25];
        let lp = envelope(&f, target.clone(), 128).value;
        let ascent = envelope_channel_ascent(&f, &target, 4, 12, 120, 7).unwrap();
        assert_abs_diff_eq!(lp, ascent, epsilon = 1e-3);
    }
}
