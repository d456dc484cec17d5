//! Binary Markov sources, finite joint distributions, and entropy primitives.

use serde::Serialize;

use crate::{Error, Result};

/// Tolerance on total probability mass.
pub const MASS_TOL: f64 = 1e-12;

/// Atoms with mass at most this are treated as outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

fn check_prob(name: &str, v: f64) -> Result<f64> {
    if !(v.is_finite() && (-MASS_TOL..=1.0 + MASS_TOL).contains(&v)) {
        return Err(Error::Domain(format!("{name} = {v} is not a probability in [0, 1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Binary entropy h_b(t) = -t log2 t - (1-t) log2 (1-t), with 0 log 0 = 0.
pub fn binary_entropy(t: f64) -> Result<f64> {
    let t = check_prob("t", t)?;
    let term = |s: f64| if s <= 0.0 { 0.0 } else { -s * s.log2() };
    Ok(term(t) + term(1.0 - t))
}

/// Perspective of the binary entropy: `c * h_b(x / c)`, with the convention
/// that the value is 0 when `c = 0` (then `x` must also vanish).
pub fn scaled_entropy(c: f64, x: f64) -> Result<f64> {
    if !c.is_finite() || c < -MASS_TOL {
        return Err(Error::Domain(format!("weight c = {c} must be nonnegative")));
    }
    if !x.is_finite() || x < -MASS_TOL || x > c + MASS_TOL {
        return Err(Error::Domain(format!("mass x = {x} must lie in [0, c] with c = {c}")));
    }
    if c <= MASS_TOL {
        return Ok(0.0);
    }
    Ok(c * binary_entropy((x / c).clamp(0.0, 1.0))?)
}

/// A binary source triple with X - Z - Y Markov structure: `p = P(Z=0)` and
/// the conditionals `P(X=0|Z=z)`, `P(Y=0|Z=z)` for z in {0, 1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryMarkovSource {
    pub p: f64,
    /// (P(X=0|Z=0), P(X=0|Z=1))
    pub x_given_z: (f64, f64),
    /// (P(Y=0|Z=0), P(Y=0|Z=1))
    pub y_given_z: (f64, f64),
}

impl BinaryMarkovSource {
    pub fn new(p: f64, x_given_z: (f64, f64), y_given_z: (f64, f64)) -> Result<Self> {
        Ok(Self {
            p: check_prob("p", p)?,
            x_given_z: (check_prob("x0", x_given_z.0)?, check_prob("x1", x_given_z.1)?),
            y_given_z: (check_prob("y0", y_given_z.0)?, check_prob("y1", y_given_z.1)?),
        })
    }

    /// P(Z = z).
    pub fn p_z(&self, z: usize) -> f64 {
        if z == 0 {
            self.p
        } else {
            1.0 - self.p
        }
    }

    /// P(X = x | Z = z).
    pub fn p_x_given_z(&self, x: usize, z: usize) -> f64 {
        let p0 = if z == 0 { self.x_given_z.0 } else { self.x_given_z.1 };
        if x == 0 {
            p0
        } else {
            1.0 - p0
        }
    }

    /// P(Y = y | Z = z).
    pub fn p_y_given_z(&self, y: usize, z: usize) -> f64 {
        let p0 = if z == 0 { self.y_given_z.0 } else { self.y_given_z.1 };
        if y == 0 {
            p0
        } else {
            1.0 - p0
        }
    }

    /// Single-letter joint mass p(x, z, y) = p(z) p(x|z) p(y|z).
    pub fn mass(&self, x: usize, z: usize, y: usize) -> f64 {
        self.p_z(z) * self.p_x_given_z(x, z) * self.p_y_given_z(y, z)
    }
}

/// The running-example source family: P(X=0|Z=0) = P(Y=0|Z=1) = 1/2 and
/// P(X=0|Z=1) = P(Y=0|Z=0) = 0.
pub fn probdist_source(p: f64) -> Result<BinaryMarkovSource> {
    BinaryMarkovSource::new(p, (0.5, 0.0), (0.0, 0.5))
}

/// A finite joint probability table over named discrete coordinates.
#[derive(Debug, Clone)]
pub struct JointPMF {
    names: Vec<String>,
    sizes: Vec<usize>,
    /// Row-major over the coordinate order in `names`.
    probs: Vec<f64>,
}

impl JointPMF {
    pub fn new(names: Vec<String>, sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if names.len() != sizes.len() {
            return Err(Error::Domain("coordinate names and sizes disagree".into()));
        }
        let total: usize = sizes.iter().product();
        if probs.len() != total {
            return Err(Error::Domain(format!(
                "probability table has {} entries, expected {total}",
                probs.len()
            )));
        }
        if probs.iter().any(|&q| !(q.is_finite() && q >= -MASS_TOL)) {
            return Err(Error::Domain("negative probability entry".into()));
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("total mass {mass} is not 1")));
        }
        Ok(Self { names, sizes, probs })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn coord_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Domain(format!("unknown coordinate {name:?}")))
    }

    /// Decodes a flat table index into per-coordinate outcomes.
    pub fn outcome(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.sizes.len()];
        for i in (0..self.sizes.len()).rev() {
            out[i] = flat % self.sizes[i];
            flat /= self.sizes[i];
        }
        out
    }

    /// Marginal distribution over the named coordinates, in the given order.
    pub fn marginal(&self, coords: &[&str]) -> Result<JointPMF> {
        let idx: Vec<usize> = coords
            .iter()
            .map(|c| self.coord_index(c))
            .collect::<Result<_>>()?;
        let sizes: Vec<usize> = idx.iter().map(|&i| self.sizes[i]).collect();
        let total: usize = sizes.iter().product();
        let mut probs = vec![0.0; total];
        for (flat, &q) in self.probs.iter().enumerate() {
            let full = self.outcome(flat);
            let mut sub = 0usize;
            for (k, &i) in idx.iter().enumerate() {
                sub = sub * sizes[k] + full[i];
            }
            probs[sub] += q;
        }
        JointPMF::new(coords.iter().map(|c| c.to_string()).collect(), sizes, probs)
    }

    fn plain_entropy(&self) -> f64 {
        self.probs
            .iter()
            .map(|&q| if q > SUPPORT_TOL { -q * q.log2() } else { 0.0 })
            .sum()
    }

    /// Shannon conditional entropy H(targets | given) in bits, computed as
    /// H(targets, given) - H(given). Overlapping coordinate sets are allowed
    /// (self-conditioning contributes nothing).
    pub fn entropy(&self, targets: &[&str], given: &[&str]) -> Result<f64> {
        if targets.is_empty() {
            return Err(Error::Domain("target coordinate set is empty".into()));
        }
        let mut joint: Vec<&str> = targets.to_vec();
        for g in given {
            if !joint.contains(g) {
                joint.push(g);
            }
        }
        let h_joint = self.marginal(&joint)?.plain_entropy();
        if given.is_empty() {
            return Ok(h_joint);
        }
        let h_given = self.marginal(given)?.plain_entropy();
        Ok((h_joint - h_given).max(0.0))
    }

    /// Entropy of a pushforward: `map` sends each joint outcome to a bucket.
    pub fn pushforward_entropy(&self, buckets: usize, map: impl Fn(&[usize]) -> usize) -> f64 {
        let mut mass = vec![0.0; buckets];
        for (flat, &q) in self.probs.iter().enumerate() {
            if q > 0.0 {
                mass[map(&self.outcome(flat))] += q;
            }
        }
        mass.iter()
            .map(|&q| if q > SUPPORT_TOL { -q * q.log2() } else { 0.0 })
            .sum()
    }
}

/// Largest blocklength for which the i.i.d. joint table is materialized.
pub const MAX_BLOCKLENGTH: usize = 3;

/// The i.i.d. blocklength-`n` joint distribution over (x-seq, z-seq, y-seq),
/// with each sequence encoded as an integer whose bit `i` is symbol `i`.
pub fn joint_pmf(source: &BinaryMarkovSource, n: usize) -> Result<JointPMF> {
    if n < 1 || n > MAX_BLOCKLENGTH {
        return Err(Error::Domain(format!(
            "blocklength n = {n} outside supported range 1..={MAX_BLOCKLENGTH}"
        )));
    }
    let m = 1usize << n;
    let mut probs = vec![0.0; m * m * m];
    for xs in 0..m {
        for zs in 0..m {
            for ys in 0..m {
                let mut q = 1.0;
                for i in 0..n {
                    let (x, z, y) = ((xs >> i) & 1, (zs >> i) & 1, (ys >> i) & 1);
                    q *= source.mass(x, z, y);
                }
                probs[(xs * m + zs) * m + ys] = q;
            }
        }
    }
    JointPMF::new(vec!["X".into(), "Z".into(), "Y".into()], vec![m, m, m], probs)
}

/// Entropy of X xor Y for the single-letter joint.
pub fn xor_entropy(source: &BinaryMarkovSource) -> Result<f64> {
    let pmf = joint_pmf(source, 1)?;
    Ok(pmf.pushforward_entropy(2, |o| o[0] ^ o[2]))
}
