//! The four sum-rate lower bounds for a binary Markov source X - Z - Y:
//! cut-set, the convex-envelope extension of the Nair-Wang bound, and the
//! two coupling-based bounds (the closed form for the running-example
//! distribution, and its generalization to arbitrary binary sources).

use serde::Serialize;

use crate::model::{
    binary_entropy, joint_pmf, probdist_source, xor_entropy, BinaryMarkovSource, SUPPORT_TOL,
};
use crate::optim::{
    envelope_channel_ascent, lower_convex_envelope, maximize_concave_2d, minimize_1d_with_grid,
    EnvelopeProblem, EnvelopeSolution, HalfPlane, Interval, Polytope2D,
};
use crate::{Error, Result};

/// Solver resolutions and tolerances. The defaults are sized so that the full
/// evaluation workloads run in minutes on a single core.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolverSettings {
    /// Dense-scan cells for the closed-form 1-D minimization over d.
    pub grid_1d: usize,
    /// Dense-scan cells for the general bound's outer minimization over d.
    pub theorem2_d_grid: usize,
    /// Dense-scan cells for the inner maximization over w.
    pub w_grid: usize,
    /// Grid per axis for the inner concave 2-D maximization.
    pub inner_grid: usize,
    /// Alternating line-maximization passes in the 2-D solver.
    pub ascent_iters: usize,
    /// Envelope grid denominator per simplex axis.
    pub envelope_resolution: usize,
    /// Value tolerance for reported bounds.
    pub tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            grid_1d: 512,
            theorem2_d_grid: 48,
            w_grid: 17,
            inner_grid: 40,
            ascent_iters: 20,
            envelope_resolution: 128,
            tol: 1e-5,
        }
    }
}

impl SolverSettings {
    /// Coarse settings for quick property checks.
    pub fn coarse() -> Self {
        Self {
            grid_1d: 128,
            theorem2_d_grid: 32,
            w_grid: 9,
            inner_grid: 24,
            ascent_iters: 12,
            envelope_resolution: 64,
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    CutSet,
    NwExtension,
    Theorem1,
    Theorem2,
}

/// Which argument of the cut-set max is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutSetBranch {
    ConditionalSum,
    XorEntropy,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Witness {
    CutSet {
        active: CutSetBranch,
    },
    Theorem1 {
        d_star: f64,
    },
    Theorem2 {
        d_star: f64,
        w_star: f64,
        u_star: [f64; 4],
        v_star: [f64; 4],
    },
    NwExtension {
        branch_u: f64,
        branch_v: f64,
        active: char,
        branch_u_witness: Vec<(f64, Vec<f64>)>,
        branch_v_witness: Vec<(f64, Vec<f64>)>,
    },
}

/// A bound in bits/symbol plus its optimizer witness.
#[derive(Debug, Clone, Serialize)]
pub struct BoundValue {
    pub kind: BoundKind,
    pub value: f64,
    pub witness: Witness,
}

/// One row of the bound-comparison sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub cut_set: f64,
    pub nw_extension: f64,
    pub theorem1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem2: Option<f64>,
}

// Infallible fast paths for the hot loops; inputs are clamped to the domain.
#[inline]
fn hb(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    let term = |s: f64| if s <= 0.0 { 0.0 } else { -s * s.log2() };
    term(t) + term(1.0 - t)
}

#[inline]
fn persp(c: f64, x: f64) -> f64 {
    if c <= 1e-12 {
        0.0
    } else {
        c * hb(x / c)
    }
}

/// max(H(X|Z) + H(Y|Z), H(X xor Y)).
pub fn cut_set(source: &BinaryMarkovSource) -> Result<BoundValue> {
    let pmf = joint_pmf(source, 1)?;
    let cond = pmf.entropy(&["X"], &["Z"])? + pmf.entropy(&["Y"], &["Z"])?;
    let xor = xor_entropy(source)?;
    let (value, active) = if cond >= xor {
        (cond, CutSetBranch::ConditionalSum)
    } else {
        (xor, CutSetBranch::XorEntropy)
    };
    Ok(BoundValue { kind: BoundKind::CutSet, value, witness: Witness::CutSet { active } })
}

fn check_d(p: f64, d: f64) -> Result<f64> {
    let cap = 2.0 * p * (1.0 - p);
    if !(d.is_finite() && (-1e-9..=cap + 1e-9).contains(&d)) {
        return Err(Error::Domain(format!("d = {d} outside [0, 2 p (1-p)] = [0, {cap}]")));
    }
    Ok(d.clamp(0.0, cap))
}

/// The closed-form penalty term for the running-example distribution:
/// `h_b(p) + d - p h_b(d / 2p) - (1-p) h_b(d / 2(1-p))`.
pub fn theorem1_l(p: f64, d: f64) -> Result<f64> {
    let hp = binary_entropy(p)?;
    let d = check_d(p, d)?;
    let dp = d / 2.0;
    Ok(hp + d - persp(p, dp) - persp(1.0 - p, dp))
}

/// The closed-form sum-rate bound `1 + min_d L(p, d)` for the
/// running-example distribution.
pub fn theorem1(p: f64, settings: &SolverSettings) -> Result<BoundValue> {
    binary_entropy(p)?; // validates p
    let cap = 2.0 * p * (1.0 - p);
    let (d_star, l_star) = minimize_1d_with_grid(
        |d| theorem1_l(p, d).unwrap_or(f64::INFINITY),
        Interval::new(0.0, cap)?,
        1e-9,
        settings.grid_1d,
    )?;
    Ok(BoundValue {
        kind: BoundKind::Theorem1,
        value: (1.0 + l_star).max(0.0),
        witness: Witness::Theorem1 { d_star },
    })
}

/// Positive-probability atoms of (A, Z) where A's conditional law given Z is
/// `a_given_z`. Returns ((a, z) labels, masses).
fn pair_support(p: f64, a_given_z: (f64, f64)) -> (Vec<(usize, usize)>, Vec<f64>) {
    let mut atoms = vec![];
    let mut mass = vec![];
    for z in 0..2usize {
        let pz = if z == 0 { p } else { 1.0 - p };
        for a in 0..2usize {
            let pa = if z == 0 { a_given_z.0 } else { a_given_z.1 };
            let q = pz * if a == 0 { pa } else { 1.0 - pa };
            if q > SUPPORT_TOL {
                atoms.push((a, z));
                mass.push(q);
            }
        }
    }
    (atoms, mass)
}

/// Per-posterior objective of one envelope branch: given a distribution `q`
/// on the (A, Z) atoms and the fixed conditional of the other source given Z,
/// computes H(A xor B) - H(B, Z) under q(a, z) * P(b | z).
fn branch_objective(atoms: &[(usize, usize)], b_given_z: (f64, f64), q: &[f64]) -> f64 {
    let mut xor = [0.0f64; 2];
    let mut bz = [0.0f64; 4];
    for (i, &(a, z)) in atoms.iter().enumerate() {
        let pb0 = if z == 0 { b_given_z.0 } else { b_given_z.1 };
        for b in 0..2usize {
            let m = q[i] * if b == 0 { pb0 } else { 1.0 - pb0 };
            xor[a ^ b] += m;
            bz[b * 2 + z] += m;
        }
    }
    let h = |v: &[f64]| -> f64 {
        v.iter().map(|&m| if m > SUPPORT_TOL { -m * m.log2() } else { 0.0 }).sum()
    };
    h(&xor) - h(&bz)
}

fn nw_branch(
    p: f64,
    a_given_z: (f64, f64),
    b_given_z: (f64, f64),
    resolution: usize,
) -> Result<EnvelopeSolution> {
    let (atoms, mass) = pair_support(p, a_given_z);
    let f = move |q: &[f64]| branch_objective(&atoms, b_given_z, q);
    lower_convex_envelope(&EnvelopeProblem { f: &f, target: mass, resolution })
}

/// The envelope extension of the Nair-Wang bound:
/// `H(X|Z) + H(Y|Z) + H(Z) + max(branch_U, branch_V)` where each branch is a
/// minimization over auxiliary channels, solved as a lower convex envelope.
pub fn nw_extension(source: &BinaryMarkovSource, settings: &SolverSettings) -> Result<BoundValue> {
    let pmf = joint_pmf(source, 1)?;
    let base = pmf.entropy(&["X"], &["Z"])? + pmf.entropy(&["Y"], &["Z"])? + pmf.entropy(&["Z"], &[])?;
    let bu = nw_branch(source.p, source.x_given_z, source.y_given_z, settings.envelope_resolution)?;
    let bv = nw_branch(source.p, source.y_given_z, source.x_given_z, settings.envelope_resolution)?;
    let (value, active) = if bu.value >= bv.value {
        (base + bu.value, 'U')
    } else {
        (base + bv.value, 'V')
    };
    Ok(BoundValue {
        kind: BoundKind::NwExtension,
        value: value.max(0.0),
        witness: Witness::NwExtension {
            branch_u: bu.value,
            branch_v: bv.value,
            active,
            branch_u_witness: bu.witness,
            branch_v_witness: bv.witness,
        },
    })
}

/// Same bound evaluated with the independent parametric-channel solver
/// (multi-start projected gradient over channels with a bounded auxiliary
/// alphabet). Used to cross-validate the envelope LP.
pub fn nw_extension_via_channels(source: &BinaryMarkovSource, seed: u64) -> Result<f64> {
    let pmf = joint_pmf(source, 1)?;
    let base = pmf.entropy(&["X"], &["Z"])? + pmf.entropy(&["Y"], &["Z"])? + pmf.entropy(&["Z"], &[])?;
    let mut branches = [0.0f64; 2];
    for (slot, (a_given_z, b_given_z)) in [
        (source.x_given_z, source.y_given_z),
        (source.y_given_z, source.x_given_z),
    ]
    .into_iter()
    .enumerate()
    {
        let (atoms, mass) = pair_support(source.p, a_given_z);
        let f = move |q: &[f64]| branch_objective(&atoms, b_given_z, q);
        // Auxiliary cardinality: support size + 1 suffices by Caratheodory.
        branches[slot] =
            envelope_channel_ascent(&f, &mass, mass.len() + 1, 24, 200, seed + slot as u64)?;
    }
    Ok((base + branches[0].max(branches[1])).max(0.0))
}

/// Witness of the general bound's inner maximization at one (d, w).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Theorem2Inner {
    pub l: f64,
    pub w: f64,
    pub u: [f64; 4],
    pub v: [f64; 4],
}

/// One block of the inner maximization: free variables (u2, u3) after the
/// two equality constraints pin u1 and u4.
struct Block {
    /// u1 + u2 + u3 = a_total
    a_total: f64,
    /// u2 - u3 + u4 = b_total
    b_total: f64,
    /// p - d'
    c1: f64,
    /// 1 - p - d'
    c4: f64,
    w: f64,
    /// d' - w
    dw: f64,
}

impl Block {
    fn polytope(&self) -> Polytope2D {
        Polytope2D::new(vec![
            HalfPlane { a: -1.0, b: 0.0, c: 0.0 },
            HalfPlane { a: 1.0, b: 0.0, c: self.w },
            HalfPlane { a: 0.0, b: -1.0, c: 0.0 },
            HalfPlane { a: 0.0, b: 1.0, c: self.dw },
            // 0 <= u1 = a_total - u2 - u3 <= c1
            HalfPlane { a: 1.0, b: 1.0, c: self.a_total },
            HalfPlane { a: -1.0, b: -1.0, c: self.c1 - self.a_total },
            // 0 <= u4 = b_total - u2 + u3 <= c4
            HalfPlane { a: 1.0, b: -1.0, c: self.b_total },
            HalfPlane { a: -1.0, b: 1.0, c: self.c4 - self.b_total },
        ])
    }

    fn objective(&self, u2: f64, u3: f64) -> f64 {
        let u1 = (self.a_total - u2 - u3).clamp(0.0, self.c1);
        let u4 = (self.b_total - u2 + u3).clamp(0.0, self.c4);
        persp(self.c1, u1)
            + persp(self.c4, u4)
            + 2.0 * persp(self.w, u2.clamp(0.0, self.w))
            + 2.0 * persp(self.dw, u3.clamp(0.0, self.dw))
    }

    fn maximize(&self, settings: &SolverSettings) -> Option<(f64, [f64; 4])> {
        let poly = self.polytope();
        let ((u2, u3), value) = maximize_concave_2d(
            |x, y| self.objective(x, y),
            &poly,
            settings.tol,
            settings.inner_grid,
            settings.ascent_iters,
        )
        .ok()?;
        let u1 = (self.a_total - u2 - u3).clamp(0.0, self.c1);
        let u4 = (self.b_total - u2 + u3).clamp(0.0, self.c4);
        Some((value, [u1, u2.clamp(0.0, self.w), u3.clamp(0.0, self.dw), u4]))
    }
}

fn theorem2_inner_at_w(
    source: &BinaryMarkovSource,
    dp: f64,
    w: f64,
    settings: &SolverSettings,
) -> Option<(f64, [f64; 4], [f64; 4])> {
    let p = source.p;
    let pb = 1.0 - p;
    let u_block = Block {
        a_total: p * source.x_given_z.0,
        b_total: pb * source.x_given_z.1 + w - dp,
        c1: p - dp,
        c4: pb - dp,
        w,
        dw: dp - w,
    };
    let v_block = Block {
        a_total: p * source.y_given_z.0,
        b_total: pb * source.y_given_z.1 + w - dp,
        c1: p - dp,
        c4: pb - dp,
        w,
        dw: dp - w,
    };
    let (uv, u) = u_block.maximize(settings)?;
    let (vv, v) = v_block.maximize(settings)?;
    Some((uv + vv, u, v))
}

/// The general penalty term L(p, d): joint entropy minus the two distance
/// perspectives minus the inner maximum over (u, v, w). Returns the witness
/// of the inner maximizer, or `Infeasible` if no w admits feasible (u, v).
pub fn theorem2_l(
    source: &BinaryMarkovSource,
    d: f64,
    settings: &SolverSettings,
) -> Result<Theorem2Inner> {
    let d = check_d(source.p, d)?;
    let dp = d / 2.0;
    let pmf = joint_pmf(source, 1)?;
    let h_xyz = pmf.entropy(&["X", "Y", "Z"], &[])?;

    let (w_star, neg_inner) = minimize_1d_with_grid(
        |w| {
            theorem2_inner_at_w(source, dp, w, settings)
                .map(|(v, _, _)| -v)
                .unwrap_or(f64::INFINITY)
        },
        Interval::new(0.0, dp)?,
        1e-6,
        settings.w_grid,
    )
    .map_err(|_| Error::Infeasible(format!("no feasible w in [0, {dp}] for d = {d}")))?;
    let (inner, u, v) = theorem2_inner_at_w(source, dp, w_star, settings)
        .ok_or_else(|| Error::Internal("refined w became infeasible".into()))?;
    debug_assert!((inner + neg_inner).abs() < 1e-9);

    let l = h_xyz - persp(source.p, dp) - persp(1.0 - source.p, dp) - inner;
    Ok(Theorem2Inner { l, w: w_star, u, v })
}

/// The general sum-rate bound `H(X|Z) + H(Y|Z) + min_d L(p, d)`.
pub fn theorem2(source: &BinaryMarkovSource, settings: &SolverSettings) -> Result<BoundValue> {
    let pmf = joint_pmf(source, 1)?;
    let base = pmf.entropy(&["X"], &["Z"])? + pmf.entropy(&["Y"], &["Z"])?;
    let cap = 2.0 * source.p * (1.0 - source.p);
    let (d_star, l_star) = minimize_1d_with_grid(
        |d| theorem2_l(source, d, settings).map(|r| r.l).unwrap_or(f64::INFINITY),
        Interval::new(0.0, cap)?,
        1e-7,
        settings.theorem2_d_grid,
    )
    .map_err(|_| Error::Internal("every d infeasible; d = 0 must always be feasible".into()))?;
    let inner = theorem2_l(source, d_star, settings)?;
    Ok(BoundValue {
        kind: BoundKind::Theorem2,
        value: (base + l_star).max(0.0),
        witness: Witness::Theorem2 {
            d_star,
            w_star: inner.w,
            u_star: inner.u,
            v_star: inner.v,
        },
    })
}

/// Evaluates the bound family over a grid of p values for the
/// running-example distribution.
pub fn sweep(
    p_grid: &[f64],
    include_theorem2: bool,
    settings: &SolverSettings,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("sweep p = {p} must lie in (0, 1)")));
        }
        let source = probdist_source(p)?;
        let row = SweepRow {
            p,
            cut_set: cut_set(&source)?.value,
            nw_extension: nw_extension(&source, settings)?.value,
            theorem1: theorem1(p, settings)?.value,
            theorem2: if include_theorem2 {
                Some(theorem2(&source, settings)?.value)
            } else {
                None
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

/// The default 99-point grid 0.01, 0.02, ..., 0.99.
pub fn default_p_grid() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

/// Re-checks a witness against its constraints, independently of the
/// optimizer that produced it. Returns the largest constraint violation.
pub fn witness_violation(source: &BinaryMarkovSource, bound: &BoundValue) -> f64 {
    let p = source.p;
    let pb = 1.0 - p;
    let cap = 2.0 * p * pb;
    match &bound.witness {
        Witness::CutSet { .. } | Witness::NwExtension { .. } => 0.0,
        Witness::Theorem1 { d_star } => (-d_star).max(d_star - cap).max(0.0),
        Witness::Theorem2 { d_star, w_star, u_star, v_star } => {
            let dp = d_star / 2.0;
            let mut worst = (-d_star).max(d_star - cap);
            worst = worst.max(-w_star).max(w_star - dp);
            let boxes = [p - dp, *w_star, dp - w_star, pb - dp];
            for (vals, a_total, b_total) in [
                (u_star, p * source.x_given_z.0, pb * source.x_given_z.1 + w_star - dp),
                (v_star, p * source.y_given_z.0, pb * source.y_given_z.1 + w_star - dp),
            ] {
                for (i, &x) in vals.iter().enumerate() {
                    worst = worst.max(-x).max(x - boxes[i]);
                }
                worst = worst.max((vals[0] + vals[1] + vals[2] - a_total).abs());
                worst = worst.max((vals[1] - vals[2] + vals[3] - b_total).abs());
            }
            worst.max(0.0)
        }
    }
}
