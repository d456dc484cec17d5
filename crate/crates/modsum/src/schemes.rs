//! Exhaustive enumeration and verification of zero-error variable-length
//! schemes at small blocklengths.
//!
//! A scheme is a pair of index assignments on the positive-probability
//! supports of (x-seq, z-seq) and (y-seq, z-seq). Rates depend only on the
//! induced partitions, so schemes are represented as canonical partitions
//! (block labels in first-occurrence order). Validity is the pairwise
//! condition: no two positive-probability triples sharing both indices may
//! have different modulo-two sums.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::model::{joint_pmf, BinaryMarkovSource, JointPMF, SUPPORT_TOL};
use crate::{Error, Result};

/// Positive-probability supports of one blocklength-n source triple, with the
/// joint support triples and their masses.
#[derive(Debug, Clone)]
pub struct Support {
    pub n: usize,
    /// (x-seq, z-seq) pairs with positive mass, sorted by (z, x).
    pub s1: Vec<(u16, u16)>,
    pub s1_mass: Vec<f64>,
    /// (y-seq, z-seq) pairs with positive mass, sorted by (z, y).
    pub s2: Vec<(u16, u16)>,
    pub s2_mass: Vec<f64>,
    /// (s1 index, s2 index, z-seq, xor pattern, mass) per support triple.
    pub triples: Vec<Triple>,
}

#[derive(Debug, Clone, Copy)]
pub struct Triple {
    pub s1: usize,
    pub s2: usize,
    pub x: u16,
    pub z: u16,
    pub y: u16,
    pub xor: u16,
    pub mass: f64,
}

impl Support {
    pub fn build(source: &BinaryMarkovSource, n: usize) -> Result<Self> {
        let pmf = joint_pmf(source, n)?;
        Self::from_pmf(&pmf, n)
    }

    /// Reads the support off an (X, Z, Y) sequence table.
    pub fn from_pmf(pmf: &JointPMF, n: usize) -> Result<Self> {
        let m = 1usize << n;
        if pmf.sizes() != [m, m, m] {
            return Err(Error::Domain("pmf shape does not match blocklength".into()));
        }
        let mut s1 = vec![];
        let mut s2 = vec![];
        for z in 0..m as u16 {
            for a in 0..m as u16 {
                let mass1: f64 = (0..m)
                    .map(|y| pmf.probs()[(a as usize * m + z as usize) * m + y])
                    .sum();
                if mass1 > SUPPORT_TOL {
                    s1.push(((a, z), mass1));
                }
                let mass2: f64 = (0..m)
                    .map(|x| pmf.probs()[(x * m + z as usize) * m + a as usize])
                    .sum();
                if mass2 > SUPPORT_TOL {
                    s2.push(((a, z), mass2));
                }
            }
        }
        let idx1: HashMap<(u16, u16), usize> =
            s1.iter().enumerate().map(|(i, &(pt, _))| (pt, i)).collect();
        let idx2: HashMap<(u16, u16), usize> =
            s2.iter().enumerate().map(|(i, &(pt, _))| (pt, i)).collect();
        let mut triples = vec![];
        for x in 0..m as u16 {
            for z in 0..m as u16 {
                for y in 0..m as u16 {
                    let mass = pmf.probs()[(x as usize * m + z as usize) * m + y as usize];
                    if mass > SUPPORT_TOL {
                        triples.push(Triple {
                            s1: idx1[&(x, z)],
                            s2: idx2[&(y, z)],
                            x,
                            z,
                            y,
                            xor: x ^ y,
                            mass,
                        });
                    }
                }
            }
        }
        Ok(Self {
            n,
            s1: s1.iter().map(|&(pt, _)| pt).collect(),
            s1_mass: s1.iter().map(|&(_, q)| q).collect(),
            s2: s2.iter().map(|&(pt, _)| pt).collect(),
            s2_mass: s2.iter().map(|&(_, q)| q).collect(),
            triples,
        })
    }
}

/// A blocklength-n encoder pair, as canonical partitions of the supports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scheme {
    pub n: usize,
    /// Block label per `Support::s1` point, labels in first-occurrence order.
    pub enc1: Vec<usize>,
    /// Block label per `Support::s2` point.
    pub enc2: Vec<usize>,
}

impl Scheme {
    /// One index per support point (full resolution).
    pub fn identity(support: &Support) -> Self {
        Self {
            n: support.n,
            enc1: (0..support.s1.len()).collect(),
            enc2: (0..support.s2.len()).collect(),
        }
    }

    /// A single index per transmitter (everything merged).
    pub fn constant(support: &Support) -> Self {
        Self { n: support.n, enc1: vec![0; support.s1.len()], enc2: vec![0; support.s2.len()] }
    }
}

/// True iff a zero-error decoder exists: no two positive-probability triples
/// sharing both indices have different modulo-two sums.
pub fn check_zero_error(scheme: &Scheme, support: &Support) -> Result<bool> {
    if scheme.enc1.len() != support.s1.len() || scheme.enc2.len() != support.s2.len() {
        return Err(Error::Domain("scheme is not defined on the whole support".into()));
    }
    let mut seen: HashMap<(usize, usize), u16> = HashMap::new();
    for t in &support.triples {
        let key = (scheme.enc1[t.s1], scheme.enc2[t.s2]);
        match seen.get(&key) {
            Some(&pat) if pat != t.xor => return Ok(false),
            Some(_) => {}
            None => {
                seen.insert(key, t.xor);
            }
        }
    }
    Ok(true)
}

/// Node and wall-clock limits for the enumeration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_millis: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_nodes: 10_000_000, max_millis: 300_000 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub schemes: u64,
    pub exhaustive: bool,
}

struct Enumerator<'a, F: FnMut(&Scheme)> {
    support: &'a Support,
    budget: Budget,
    start: Instant,
    nodes: u64,
    schemes: u64,
    exhausted: bool,
    /// triples grouped by s2 point
    triples_by_s2: Vec<Vec<usize>>,
    enc1: Vec<usize>,
    enc2: Vec<usize>,
    /// z-seqs already used per block (injectivity), as bitmasks
    zmask1: Vec<u32>,
    zmask2: Vec<u32>,
    /// xor pattern per (b1, b2) message pair, dense over b1 * max_b2 + b2
    patterns: Vec<Option<u16>>,
    max_b2: usize,
    visit: F,
}

impl<'a, F: FnMut(&Scheme)> Enumerator<'a, F> {
    fn out_of_budget(&mut self) -> bool {
        if self.nodes >= self.budget.max_nodes
            || (self.nodes % 4096 == 0
                && self.start.elapsed() >= Duration::from_millis(self.budget.max_millis))
        {
            self.exhausted = true;
            return true;
        }
        false
    }

    fn assign_s1(&mut self, i: usize, used1: usize) {
        if self.exhausted {
            return;
        }
        if i == self.support.s1.len() {
            self.assign_s2(0, 0, used1);
            return;
        }
        let z = self.support.s1[i].1 as u32;
        for b in 0..=used1.min(i) {
            self.nodes += 1;
            if self.out_of_budget() {
                return;
            }
            if b < used1 && self.zmask1[b] & (1 << z) != 0 {
                continue; // conditional injectivity
            }
            self.enc1[i] = b;
            let new_used = used1.max(b + 1);
            if b == used1 {
                self.zmask1.push(1 << z);
            } else {
                self.zmask1[b] |= 1 << z;
            }
            self.assign_s1(i + 1, new_used);
            if b == used1 {
                self.zmask1.pop();
            } else {
                self.zmask1[b] &= !(1 << z);
            }
            if self.exhausted {
                return;
            }
        }
    }

    fn assign_s2(&mut self, j: usize, used2: usize, used1: usize) {
        if self.exhausted {
            return;
        }
        if j == self.support.s2.len() {
            self.emit(used1);
            return;
        }
        let z = self.support.s2[j].1 as u32;
        for b in 0..=used2.min(j) {
            self.nodes += 1;
            if self.out_of_budget() {
                return;
            }
            if b < used2 && self.zmask2[b] & (1 << z) != 0 {
                continue;
            }
            // zero-error consistency of every triple through this point
            let mut trail: Vec<usize> = vec![];
            let mut ok = true;
            for &ti in &self.triples_by_s2[j] {
                let t = &self.support.triples[ti];
                let key = self.enc1[t.s1] * self.max_b2 + b;
                match self.patterns[key] {
                    Some(pat) if pat != t.xor => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        self.patterns[key] = Some(t.xor);
                        trail.push(key);
                    }
                }
            }
            if ok {
                self.enc2[j] = b;
                let new_used = used2.max(b + 1);
                if b == used2 {
                    self.zmask2.push(1 << z);
                } else {
                    self.zmask2[b] |= 1 << z;
                }
                self.assign_s2(j + 1, new_used, used1);
                if b == used2 {
                    self.zmask2.pop();
                } else {
                    self.zmask2[b] &= !(1 << z);
                }
            }
            for key in trail {
                self.patterns[key] = None;
            }
            if self.exhausted {
                return;
            }
        }
    }

    fn emit(&mut self, _used1: usize) {
        let scheme = Scheme {
            n: self.support.n,
            enc1: self.enc1.clone(),
            enc2: self.enc2.clone(),
        };
        if self.support.n == 2 && !is_swap_canonical(&scheme, self.support) {
            return;
        }
        self.schemes += 1;
        (self.visit)(&scheme);
    }
}

/// Swaps the two coordinates of a length-2 sequence.
fn swap2(s: u16) -> u16 {
    ((s & 1) << 1) | ((s >> 1) & 1)
}

fn relabel(enc: &[usize]) -> Vec<usize> {
    let mut map: HashMap<usize, usize> = HashMap::new();
    enc.iter()
        .map(|&b| {
            let next = map.len();
            *map.entry(b).or_insert(next)
        })
        .collect()
}

/// Under the i.i.d. coordinate-swap symmetry, keeps the lexicographically
/// smaller of a scheme and its mirror image.
fn is_swap_canonical(scheme: &Scheme, support: &Support) -> bool {
    let idx1: HashMap<(u16, u16), usize> =
        support.s1.iter().enumerate().map(|(i, &pt)| (pt, i)).collect();
    let idx2: HashMap<(u16, u16), usize> =
        support.s2.iter().enumerate().map(|(i, &pt)| (pt, i)).collect();
    let mut m1 = vec![0usize; scheme.enc1.len()];
    for (i, &(a, z)) in support.s1.iter().enumerate() {
        m1[idx1[&(swap2(a), swap2(z))]] = scheme.enc1[i];
    }
    let mut m2 = vec![0usize; scheme.enc2.len()];
    for (j, &(a, z)) in support.s2.iter().enumerate() {
        m2[idx2[&(swap2(a), swap2(z))]] = scheme.enc2[j];
    }
    let mirrored = (relabel(&m1), relabel(&m2));
    (scheme.enc1.clone(), scheme.enc2.clone()) <= mirrored
}

/// Depth-first enumeration of all zero-error schemes (as canonical partition
/// pairs) for the given support. The visitor is called once per scheme; at
/// n = 2 one representative per coordinate-swap orbit is yielded.
pub fn enumerate_schemes(
    source: &BinaryMarkovSource,
    n: usize,
    budget: Budget,
    visit: impl FnMut(&Scheme),
) -> Result<SearchStats> {
    if !(1..=2).contains(&n) {
        return Err(Error::Domain(format!("enumeration supports n in {{1, 2}}, got {n}")));
    }
    let support = Support::build(source, n)?;
    let mut triples_by_s2 = vec![vec![]; support.s2.len()];
    for (ti, t) in support.triples.iter().enumerate() {
        triples_by_s2[t.s2].push(ti);
    }
    let max_b2 = support.s2.len().max(1);
    let mut e = Enumerator {
        support: &support,
        budget,
        start: Instant::now(),
        nodes: 0,
        schemes: 0,
        exhausted: false,
        triples_by_s2,
        enc1: vec![0; support.s1.len()],
        enc2: vec![0; support.s2.len()],
        zmask1: vec![],
        zmask2: vec![],
        patterns: vec![None; support.s1.len().max(1) * max_b2],
        max_b2,
        visit,
    };
    if support.s1.is_empty() || support.s2.is_empty() {
        return Err(Error::Domain("empty support".into()));
    }
    e.assign_s1(0, 0);
    Ok(SearchStats { nodes: e.nodes, schemes: e.schemes, exhaustive: !e.exhausted })
}

fn entropy_of_masses(masses: impl Iterator<Item = f64>) -> f64 {
    masses.map(|q| if q > SUPPORT_TOL { -q * q.log2() } else { 0.0 }).sum()
}

/// Per-scheme exact coupling quantities and the three lemma verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    /// Expected normalized Hamming distance between Z and its coupled copy.
    pub d_avg: f64,
    /// (z, z-tilde) -> xor pattern, over coupled pairs with positive mass.
    pub g_table: Vec<((u16, u16), u16)>,
    pub lemma1_lhs: f64,
    pub lemma1_rhs: f64,
    pub lemma2_holds: bool,
    pub lemma3_holds: bool,
    /// H(M1) + H(M2) in bits.
    pub message_entropy_sum: f64,
}

fn hamming(a: u16, b: u16) -> u32 {
    (a ^ b).count_ones()
}

/// Computes the coupling quantities of a zero-error scheme exactly, by
/// summation over the message-conditional posteriors.
pub fn coupling_report(
    scheme: &Scheme,
    source: &BinaryMarkovSource,
) -> Result<CouplingReport> {
    let support = Support::build(source, scheme.n)?;
    if !check_zero_error(scheme, &support)? {
        return Err(Error::Domain("scheme is not zero-error".into()));
    }
    coupling_quantities(scheme, &support, source)
}

/// Diagnostic variant that skips the zero-error gate, so that the lemma
/// verdicts of an invalid scheme can be inspected (they will fail).
pub fn coupling_report_unchecked(
    scheme: &Scheme,
    source: &BinaryMarkovSource,
) -> Result<CouplingReport> {
    let support = Support::build(source, scheme.n)?;
    if scheme.enc1.len() != support.s1.len() || scheme.enc2.len() != support.s2.len() {
        return Err(Error::Domain("scheme is not defined on the whole support".into()));
    }
    coupling_quantities(scheme, &support, source)
}

fn coupling_quantities(
    scheme: &Scheme,
    support: &Support,
    source: &BinaryMarkovSource,
) -> Result<CouplingReport> {
    let n = scheme.n;

    // Group triples by message pair.
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (ti, t) in support.triples.iter().enumerate() {
        by_pair.entry((scheme.enc1[t.s1], scheme.enc2[t.s2])).or_default().push(ti);
    }
    let mut pairs: Vec<(&(usize, usize), &Vec<usize>)> = by_pair.iter().collect();
    pairs.sort_by_key(|&(k, _)| *k);

    let mut d_avg = 0.0;
    let mut g_table: HashMap<(u16, u16), u16> = HashMap::new();
    let mut lemma2_holds = true;
    for (_, tis) in &pairs {
        let pair_mass: f64 = tis.iter().map(|&ti| support.triples[ti].mass).sum();
        if pair_mass <= SUPPORT_TOL {
            continue;
        }
        // z-posterior within this message pair
        let mut z_mass: HashMap<u16, f64> = HashMap::new();
        for &ti in tis.iter() {
            let t = &support.triples[ti];
            *z_mass.entry(t.z).or_insert(0.0) += t.mass;
        }
        for (&za, &ma) in &z_mass {
            for (&zb, &mb) in &z_mass {
                d_avg += hamming(za, zb) as f64 / n as f64 * ma * mb / pair_mass;
            }
        }
        // coupled triple pairs: both triples drawn independently given (m1, m2)
        for &ta in tis.iter() {
            for &tb in tis.iter() {
                let (a, b) = (&support.triples[ta], &support.triples[tb]);
                let x_pat = a.x ^ b.x;
                if x_pat != a.y ^ b.y {
                    lemma2_holds = false;
                }
                match g_table.get(&(a.z, b.z)) {
                    Some(&pat) if pat != x_pat => lemma2_holds = false,
                    Some(_) => {}
                    None => {
                        g_table.insert((a.z, b.z), x_pat);
                    }
                }
            }
        }
    }

    // Lemma 1: H(M1, M2 | Z-seq) vs n (H(X|Z) + H(Y|Z)).
    let mut z_prior: HashMap<u16, f64> = HashMap::new();
    let mut pair_z: HashMap<(usize, usize, u16), f64> = HashMap::new();
    for t in &support.triples {
        *z_prior.entry(t.z).or_insert(0.0) += t.mass;
        *pair_z
            .entry((scheme.enc1[t.s1], scheme.enc2[t.s2], t.z))
            .or_insert(0.0) += t.mass;
    }
    let h_mz = entropy_of_masses(pair_z.values().copied());
    let h_z = entropy_of_masses(z_prior.values().copied());
    let lemma1_lhs = h_mz - h_z;
    let single = joint_pmf(source, 1)?;
    let lemma1_rhs =
        n as f64 * (single.entropy(&["X"], &["Z"])? + single.entropy(&["Y"], &["Z"])?);

    // Message entropies.
    let mut m1_mass: HashMap<usize, f64> = HashMap::new();
    for (i, &q) in support.s1_mass.iter().enumerate() {
        *m1_mass.entry(scheme.enc1[i]).or_insert(0.0) += q;
    }
    let mut m2_mass: HashMap<usize, f64> = HashMap::new();
    for (j, &q) in support.s2_mass.iter().enumerate() {
        *m2_mass.entry(scheme.enc2[j]).or_insert(0.0) += q;
    }
    let message_entropy_sum =
        entropy_of_masses(m1_mass.values().copied()) + entropy_of_masses(m2_mass.values().copied());

    let p = source.p;
    let lemma3_holds = d_avg <= 2.0 * p * (1.0 - p) + 1e-12;
    let mut g_sorted: Vec<((u16, u16), u16)> = g_table.into_iter().collect();
    g_sorted.sort();
    Ok(CouplingReport {
        d_avg,
        g_table: g_sorted,
        lemma1_lhs,
        lemma1_rhs,
        lemma2_holds,
        lemma3_holds,
        message_entropy_sum,
    })
}

/// Result of minimizing H(M1) + H(M2) over all enumerated zero-error schemes.
#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub min_entropy_sum: f64,
    pub argmin: Option<Scheme>,
    pub schemes_enumerated: u64,
    pub nodes: u64,
    pub exhaustive: bool,
}

pub fn min_sum_message_entropy(
    source: &BinaryMarkovSource,
    n: usize,
    budget: Budget,
) -> Result<SearchResult> {
    let support = Support::build(source, n)?;
    let mut best = f64::INFINITY;
    let mut argmin: Option<Scheme> = None;
    let stats = enumerate_schemes(source, n, budget, |scheme| {
        let mut m1: HashMap<usize, f64> = HashMap::new();
        for (i, &q) in support.s1_mass.iter().enumerate() {
            *m1.entry(scheme.enc1[i]).or_insert(0.0) += q;
        }
        let mut m2: HashMap<usize, f64> = HashMap::new();
        for (j, &q) in support.s2_mass.iter().enumerate() {
            *m2.entry(scheme.enc2[j]).or_insert(0.0) += q;
        }
        let sum = entropy_of_masses(m1.values().copied()) + entropy_of_masses(m2.values().copied());
        if sum < best {
            best = sum;
            argmin = Some(scheme.clone());
        }
    })?;
    Ok(SearchResult {
        n,
        min_entropy_sum: best,
        argmin,
        schemes_enumerated: stats.schemes,
        nodes: stats.nodes,
        exhaustive: stats.exhaustive,
    })
}

/// Expected codeword length of an optimal binary prefix code for the given
/// index distribution (sum of merge weights in the Huffman construction).
pub fn huffman_expected_length(masses: &[f64]) -> Result<f64> {
    if masses.is_empty() {
        return Err(Error::Domain("empty index distribution".into()));
    }
    if masses.iter().any(|&q| !(q.is_finite() && q > 0.0)) {
        return Err(Error::Domain("index masses must be positive".into()));
    }
    let total: f64 = masses.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("index masses sum to {total}, not 1")));
    }
    let mut heap: Vec<f64> = masses.to_vec();
    let mut expected = 0.0;
    while heap.len() > 1 {
        heap.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let a = heap.pop().unwrap();
        let b = heap.pop().unwrap();
        expected += a + b;
        heap.push(a + b);
    }
    Ok(expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::probdist_source;
    use approx::assert_abs_diff_eq;

    fn collect(source: &BinaryMarkovSource, n: usize) -> (Vec<Scheme>, SearchStats) {
        let mut out = vec![];
        let stats =
            enumerate_schemes(source, n, Budget::default(), |s| out.push(s.clone())).unwrap();
        (out, stats)
    }

    /// Brute-force oracle: generate every partition pair (no pruning) and
    /// filter by the full zero-error predicate.
    fn oracle_schemes(source: &BinaryMarkovSource, n: usize) -> Vec<Scheme> {
        fn partitions(k: usize) -> Vec<Vec<usize>> {
            let mut out = vec![];
            fn rec(enc: &mut Vec<usize>, used: usize, k: usize, out: &mut Vec<Vec<usize>>) {
                if enc.len() == k {
                    out.push(enc.clone());
                    return;
                }
                for b in 0..=used {
                    enc.push(b);
                    rec(enc, used.max(b + 1), k, out);
                    enc.pop();
                }
            }
            rec(&mut vec![], 0, k, &mut out);
            out
        }
        let support = Support::build(source, n).unwrap();
        let mut out = vec![];
        for e1 in partitions(support.s1.len()) {
            for e2 in partitions(support.s2.len()) {
                let s = Scheme { n, enc1: e1.clone(), enc2: e2.clone() };
                if check_zero_error(&s, &support).unwrap() {
                    out.push(s);
                }
            }
        }
        out
    }

    #[test]
    fn zero_error_examples() {
        let src = probdist_source(0.5).unwrap();
        let support = Support::build(&src, 1).unwrap();
        // s1 sorted by (z, x): [(0,0),(1,0),(1,1)]; s2: [(1,0),(0,1),(1,1)]
        assert_eq!(support.s1, vec![(0, 0), (1, 0), (1, 1)]);
        assert_eq!(support.s2, vec![(1, 0), (0, 1), (1, 1)]);

        assert!(check_zero_error(&Scheme::identity(&support), &support).unwrap());

        // enc1 merges (1,0),(1,1); enc2 merges (1,z=0),(1,z=1): valid
        let good = Scheme { n: 1, enc1: vec![0, 1, 1], enc2: vec![0, 1, 0] };
        assert!(check_zero_error(&good, &support).unwrap());

        // enc2 merges (1,z=0),(0,z=1) instead: triples (1,0,1) and (1,1,0)
        // collide with sums 0 and 1
        let bad = Scheme { n: 1, enc1: vec![0, 1, 1], enc2: vec![0, 0, 1] };
        assert!(!check_zero_error(&bad, &support).unwrap());

        let short = Scheme { n: 1, enc1: vec![0], enc2: vec![0, 0, 0] };
        assert!(check_zero_error(&short, &support).is_err());
    }

    #[test]
    fn enumeration_matches_oracle_n1() {
        for p in [0.25, 0.5, 0.6] {
            let src = probdist_source(p).unwrap();
            let (mine, stats) = collect(&src, 1);
            let oracle = oracle_schemes(&src, 1);
            assert!(stats.exhaustive);
            assert_eq!(mine.len(), oracle.len());
            for s in &oracle {
                assert!(mine.contains(s));
            }
        }
        // Hand-checkable count for the running example: 3 injectivity-valid
        // partitions per side, 9 pairs, 2 conflicting combinations excluded.
        let src = probdist_source(0.5).unwrap();
        let (mine, _) = collect(&src, 1);
        assert_eq!(mine.len(), 7);
    }

    #[test]
    fn enumeration_identical_and_independent() {
        // X = Y = Z: the all-merged scheme is valid.
        let identical = BinaryMarkovSource::new(0.5, (1.0, 0.0), (1.0, 0.0)).unwrap();
        let support = Support::build(&identical, 1).unwrap();
        let (mine, _) = collect(&identical, 1);
        assert!(mine.contains(&Scheme::constant(&support)));

        // Z constant, X and Y independent uniform: injectivity forces full
        // resolution on both sides.
        let indep = BinaryMarkovSource::new(1.0, (0.5, 0.5), (0.5, 0.5)).unwrap();
        let support = Support::build(&indep, 1).unwrap();
        let (mine, _) = collect(&indep, 1);
        assert_eq!(mine, vec![Scheme::identity(&support)]);
    }

    #[test]
    fn enumeration_matches_oracle_n2_identical() {
        // Small enough support for the unpruned oracle.
        let identical = BinaryMarkovSource::new(0.5, (1.0, 0.0), (1.0, 0.0)).unwrap();
        let (mine, stats) = collect(&identical, 2);
        assert!(stats.exhaustive);
        let support = Support::build(&identical, 2).unwrap();
        let oracle: Vec<Scheme> = oracle_schemes(&identical, 2)
            .into_iter()
            .filter(|s| is_swap_canonical(s, &support))
            .collect();
        assert_eq!(mine.len(), oracle.len());
        for s in &oracle {
            assert!(mine.contains(s));
        }
    }

    #[test]
    fn coupling_report_examples() {
        let src = probdist_source(0.5).unwrap();
        let support = Support::build(&src, 1).unwrap();

        let id = Scheme::identity(&support);
        let r = coupling_report(&id, &src).unwrap();
        assert_abs_diff_eq!(r.d_avg, 0.0, epsilon = 1e-15);
        assert!(r.lemma2_holds && r.lemma3_holds);
        assert_abs_diff_eq!(r.lemma1_lhs, r.lemma1_rhs, epsilon = 1e-12);

        // the merged scheme: d_avg = 1/4, lemma1 both sides 1
        let merged = Scheme { n: 1, enc1: vec![0, 1, 1], enc2: vec![0, 1, 0] };
        let r = coupling_report(&merged, &src).unwrap();
        assert_abs_diff_eq!(r.d_avg, 0.25, epsilon = 1e-12);
        assert!(r.d_avg <= 0.5 + 1e-12);
        assert_abs_diff_eq!(r.lemma1_lhs, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.lemma1_rhs, 1.0, epsilon = 1e-12);
        assert!(r.lemma2_holds);
        // the only mixed-z message pair couples z = 0 with z = 1 at pattern 0
        assert!(r.g_table.contains(&((0, 1), 0)));

        // X = Y = Z with constant indices attains the coupling cap exactly.
        for p in [0.2, 0.5, 0.8] {
            let identical = BinaryMarkovSource::new(p, (1.0, 0.0), (1.0, 0.0)).unwrap();
            let support = Support::build(&identical, 1).unwrap();
            let r = coupling_report(&Scheme::constant(&support), &identical).unwrap();
            assert_abs_diff_eq!(r.d_avg, 2.0 * p * (1.0 - p), epsilon = 1e-15);
            assert!(r.lemma3_holds);
        }

        // non-zero-error scheme is rejected
        let bad = Scheme { n: 1, enc1: vec![0, 1, 1], enc2: vec![0, 0, 1] };
        assert!(coupling_report(&bad, &src).is_err());
    }

    #[test]
    fn lemmas_hold_on_all_enumerated_schemes() {
        for p in [0.25, 0.5, 0.75] {
            let src = probdist_source(p).unwrap();
            let (schemes, _) = collect(&src, 1);
            for s in &schemes {
                let r = coupling_report(s, &src).unwrap();
                assert!((r.lemma1_lhs - r.lemma1_rhs).abs() < 1e-9);
                assert!(r.lemma2_holds);
                assert!(r.lemma3_holds);
            }
        }
    }

    #[test]
    fn coarsening_monotonicity() {
        // Refining a valid partition pair stays valid and cannot decrease
        // the entropy sum.
        let src = probdist_source(0.5).unwrap();
        let support = Support::build(&src, 1).unwrap();
        let coarse = Scheme { n: 1, enc1: vec![0, 1, 1], enc2: vec![0, 1, 0] };
        let fine = Scheme::identity(&support);
        assert!(check_zero_error(&coarse, &support).unwrap());
        assert!(check_zero_error(&fine, &support).unwrap());
        let rc = coupling_report(&coarse, &src).unwrap();
        let rf = coupling_report(&fine, &src).unwrap();
        assert!(rf.message_entropy_sum >= rc.message_entropy_sum - 1e-12);
    }

    #[test]
    fn min_entropy_search_examples() {
        let src = probdist_source(0.5).unwrap();
        let r = min_sum_message_entropy(&src, 1, Budget::default()).unwrap();
        let expect = 2.0 * crate::model::binary_entropy(0.25).unwrap();
        assert_abs_diff_eq!(r.min_entropy_sum, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(r.min_entropy_sum, 1.622556, epsilon = 1e-6);
        assert!(r.exhaustive);

        let identical = BinaryMarkovSource::new(0.5, (1.0, 0.0), (1.0, 0.0)).unwrap();
        let r = min_sum_message_entropy(&identical, 1, Budget::default()).unwrap();
        assert_abs_diff_eq!(r.min_entropy_sum, 0.0, epsilon = 1e-12);

        let indep = BinaryMarkovSource::new(1.0, (0.5, 0.5), (0.5, 0.5)).unwrap();
        let r = min_sum_message_entropy(&indep, 1, Budget::default()).unwrap();
        assert_abs_diff_eq!(r.min_entropy_sum, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let src = probdist_source(0.5).unwrap();
        let stats =
            enumerate_schemes(&src, 2, Budget { max_nodes: 50, max_millis: 60_000 }, |_| {})
                .unwrap();
        assert!(!stats.exhaustive);
    }

    #[test]
    fn huffman_examples() {
        assert_abs_diff_eq!(huffman_expected_length(&[0.5, 0.5]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(huffman_expected_length(&[0.75, 0.25]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            huffman_expected_length(&[0.25; 4]).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        assert!(huffman_expected_length(&[]).is_err());
        // H(M) <= E[length] < H(M) + 1
        let masses = [0.05f64, 0.1, 0.15, 0.3, 0.4];
        let h: f64 = masses.iter().map(|&q| -q * q.log2()).sum();
        let l = huffman_expected_length(&masses).unwrap();
        assert!(l >= h - 1e-12 && l < h + 1.0);
    }
}
