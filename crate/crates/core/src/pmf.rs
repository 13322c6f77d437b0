//! Finite joint distributions over small alphabets: entropies in bits,
//! i.i.d. block extensions, and robust typical sets.
//!
//! Typicality is letter-frequency ("robust") typicality: a sequence is
//! epsilon-typical when every symbol's empirical frequency is within
//! eps * p(a) of p(a). Symbols of probability zero therefore may not
//! appear at all.

use crate::{tuple_label, Caps, Error, Result};

/// Conditioning side for conditional entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Joint distribution of a pair (X, Y) on {0..x_size} x {0..y_size}.
///
/// Entries are validated non-negative and renormalized exactly when the
/// total is within 1e-9 of 1; anything further off is rejected. Cells
/// with probability exactly 0 are excluded from the support.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    x_size: usize,
    y_size: usize,
    p: Vec<f64>,
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    support: Vec<(usize, usize)>,
}

const NORMALIZATION_TOL: f64 = 1e-9;

pub(crate) fn validate_dist(p: &mut [f64], what: &str) -> Result<()> {
    for &v in p.iter() {
        if !v.is_finite() {
            return Err(Error::InvalidPmf(format!("{what}: non-finite entry")));
        }
        if v < 0.0 {
            return Err(Error::InvalidPmf(format!("{what}: negative entry {v}")));
        }
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidPmf(format!(
            "{what}: entries sum to {total}, not 1"
        )));
    }
    if total != 1.0 {
        for v in p.iter_mut() {
            *v /= total;
        }
    }
    Ok(())
}

impl JointPmf {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let x_size = rows.len();
        let y_size = rows.first().map_or(0, |r| r.len());
        let x_labels = (0..x_size).map(|i| i.to_string()).collect();
        let y_labels = (0..y_size).map(|i| i.to_string()).collect();
        Self::with_labels(rows, x_labels, y_labels)
    }

    pub fn with_labels(
        rows: Vec<Vec<f64>>,
        x_labels: Vec<String>,
        y_labels: Vec<String>,
    ) -> Result<Self> {
        let x_size = rows.len();
        let y_size = rows.first().map_or(0, |r| r.len());
        if x_size == 0 || y_size == 0 {
            return Err(Error::InvalidPmf("empty pmf".into()));
        }
        if rows.iter().any(|r| r.len() != y_size) {
            return Err(Error::InvalidPmf("ragged pmf rows".into()));
        }
        if x_labels.len() != x_size || y_labels.len() != y_size {
            return Err(Error::InvalidPmf("label count does not match alphabet".into()));
        }
        let mut p: Vec<f64> = rows.into_iter().flatten().collect();
        validate_dist(&mut p, "joint pmf")?;
        let support: Vec<(usize, usize)> = (0..x_size)
            .flat_map(|x| (0..y_size).map(move |y| (x, y)))
            .filter(|&(x, y)| p[x * y_size + y] > 0.0)
            .collect();
        if support.is_empty() {
            return Err(Error::InvalidPmf("empty support".into()));
        }
        Ok(JointPmf {
            x_size,
            y_size,
            p,
            x_labels,
            y_labels,
            support,
        })
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn p(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.y_size + y]
    }

    pub fn x_label(&self, x: usize) -> &str {
        &self.x_labels[x]
    }

    pub fn y_label(&self, y: usize) -> &str {
        &self.y_labels[y]
    }

    /// Support cells (x, y) with p(x, y) > 0, in row-major order.
    pub fn support(&self) -> &[(usize, usize)] {
        &self.support
    }

    /// Probabilities of the support cells, aligned with `support()`.
    pub fn support_dist(&self) -> Vec<f64> {
        self.support.iter().map(|&(x, y)| self.p(x, y)).collect()
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.x_size];
        for &(x, y) in &self.support {
            m[x] += self.p(x, y);
        }
        m
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.y_size];
        for &(x, y) in &self.support {
            m[y] += self.p(x, y);
        }
        m
    }

    /// Joint cell probabilities flattened row-major (x major), including
    /// zero cells.
    pub fn flat(&self) -> &[f64] {
        &self.p
    }
}

fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of a distribution, in bits. Clamped at zero so that
/// float residue on near-point masses cannot surface as a negative.
pub fn entropy_of_dist(dist: &[f64]) -> f64 {
    (-dist.iter().map(|&p| xlog2x(p)).sum::<f64>()).max(0.0)
}

/// H(X, Y) in bits.
pub fn entropy(pmf: &JointPmf) -> f64 {
    entropy_of_dist(pmf.flat())
}

/// H(Y|X) (given X) or H(X|Y) (given Y), in bits.
pub fn conditional_entropy(pmf: &JointPmf, given: Axis) -> f64 {
    let marginal = match given {
        Axis::X => pmf.x_marginal(),
        Axis::Y => pmf.y_marginal(),
    };
    entropy(pmf) - entropy_of_dist(&marginal)
}

/// H(Z|X) or H(Z|Y) for Z = table(X, Y), in bits.
///
/// The table must be defined on every support cell; `None` entries are
/// only allowed off-support.
pub fn function_conditional_entropy(
    pmf: &JointPmf,
    table: &[Vec<Option<usize>>],
    given: Axis,
) -> Result<f64> {
    if table.len() != pmf.x_size() || table.iter().any(|r| r.len() != pmf.y_size()) {
        return Err(Error::InvalidArgument(
            "function table shape does not match the pmf".into(),
        ));
    }
    for &(x, y) in pmf.support() {
        if table[x][y].is_none() {
            return Err(Error::TableGap { x, y });
        }
    }
    // H(Z|S) = sum_s p(s) H(Z | S = s), accumulated per conditioning symbol.
    let side_size = match given {
        Axis::X => pmf.x_size(),
        Axis::Y => pmf.y_size(),
    };
    let z_max = pmf
        .support()
        .iter()
        .map(|&(x, y)| table[x][y].unwrap())
        .max()
        .unwrap();
    let mut h = 0.0;
    for s in 0..side_size {
        let mut z_mass = vec![0.0; z_max + 1];
        let mut total = 0.0;
        for &(x, y) in pmf.support() {
            let here = match given {
                Axis::X => x == s,
                Axis::Y => y == s,
            };
            if here {
                z_mass[table[x][y].unwrap()] += pmf.p(x, y);
                total += pmf.p(x, y);
            }
        }
        if total > 0.0 {
            h += total * entropy_of_dist(&z_mass.iter().map(|&m| m / total).collect::<Vec<_>>());
        }
    }
    Ok(h)
}

/// Block pmf of n i.i.d. copies. Block symbols are tuples of the base
/// symbols in row-major order (first coordinate most significant), and
/// block labels are "(a,b,...)" tuples of the base labels.
pub fn iid_extension(pmf: &JointPmf, n: usize, caps: &Caps) -> Result<JointPmf> {
    if n == 0 {
        return Err(Error::InvalidArgument("block length must be >= 1".into()));
    }
    let cells = (pmf.x_size() * pmf.y_size()) as u128;
    let total = cells.checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > caps.power_vertices as u128 {
        return Err(Error::CapExceeded {
            what: "iid extension cells",
            requested: total.min(usize::MAX as u128) as usize,
            limit: caps.power_vertices,
        });
    }
    if n == 1 {
        return Ok(pmf.clone());
    }
    let mut bx = pmf.x_size();
    let mut by = pmf.y_size();
    let mut bp: Vec<f64> = pmf.flat().to_vec();
    for _ in 1..n {
        let nbx = bx * pmf.x_size();
        let nby = by * pmf.y_size();
        let mut np = vec![0.0; nbx * nby];
        for x1 in 0..bx {
            for y1 in 0..by {
                let head = bp[x1 * by + y1];
                if head == 0.0 {
                    continue;
                }
                for x2 in 0..pmf.x_size() {
                    for y2 in 0..pmf.y_size() {
                        np[(x1 * pmf.x_size() + x2) * nby + (y1 * pmf.y_size() + y2)] =
                            head * pmf.p(x2, y2);
                    }
                }
            }
        }
        bx = nbx;
        by = nby;
        bp = np;
    }
    let x_labels = block_labels(&pmf.x_labels, n);
    let y_labels = block_labels(&pmf.y_labels, n);
    let rows: Vec<Vec<f64>> = (0..bx).map(|x| bp[x * by..(x + 1) * by].to_vec()).collect();
    JointPmf::with_labels(rows, x_labels, y_labels)
}

fn block_labels(base: &[String], n: usize) -> Vec<String> {
    let mut labels = Vec::with_capacity(base.len().pow(n as u32));
    let mut idx = vec![0usize; n];
    loop {
        let parts: Vec<&str> = idx.iter().map(|&i| base[i].as_str()).collect();
        labels.push(tuple_label(&parts));
        // Row-major increment: last coordinate fastest.
        let mut k = n;
        loop {
            if k == 0 {
                return labels;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < base.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Joint distribution of K sources, flattened row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPmf {
    shape: Vec<usize>,
    p: Vec<f64>,
    labels: Vec<Vec<String>>,
    support: Vec<usize>,
}

impl MultiPmf {
    pub fn new(shape: Vec<usize>, mut probs: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.iter().any(|&s| s == 0) {
            return Err(Error::InvalidPmf("empty source alphabet".into()));
        }
        let total: usize = shape.iter().product();
        if probs.len() != total {
            return Err(Error::InvalidPmf(format!(
                "expected {total} probabilities for shape {shape:?}, got {}",
                probs.len()
            )));
        }
        validate_dist(&mut probs, "multi-source pmf")?;
        let support: Vec<usize> = (0..total).filter(|&i| probs[i] > 0.0).collect();
        if support.is_empty() {
            return Err(Error::InvalidPmf("empty support".into()));
        }
        let labels = shape
            .iter()
            .map(|&s| (0..s).map(|i| i.to_string()).collect())
            .collect();
        Ok(MultiPmf {
            shape,
            p: probs,
            labels,
            support,
        })
    }

    pub fn num_sources(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn flat(&self) -> &[f64] {
        &self.p
    }

    /// Support cells as flattened indices, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn support_dist(&self) -> Vec<f64> {
        self.support.iter().map(|&i| self.p[i]).collect()
    }

    pub fn label(&self, source: usize, symbol: usize) -> &str {
        &self.labels[source][symbol]
    }

    /// Flattened index -> per-source symbols.
    pub fn unravel(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.shape.len()];
        for k in (0..self.shape.len()).rev() {
            out[k] = idx % self.shape[k];
            idx /= self.shape[k];
        }
        out
    }

    pub fn ravel(&self, symbols: &[usize]) -> usize {
        symbols
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&s, &size)| acc * size + s)
    }

    pub fn entropy(&self) -> f64 {
        entropy_of_dist(&self.p)
    }

    /// Entropy of the marginal on a subset of sources (bits). The
    /// subset may be empty (entropy 0) and is deduplicated.
    pub fn subset_entropy(&self, sources: &[usize]) -> Result<f64> {
        let mut subset: Vec<usize> = sources.to_vec();
        subset.sort_unstable();
        subset.dedup();
        if subset.iter().any(|&s| s >= self.shape.len()) {
            return Err(Error::InvalidArgument("source index out of range".into()));
        }
        if subset.is_empty() {
            return Ok(0.0);
        }
        let sizes: Vec<usize> = subset.iter().map(|&s| self.shape[s]).collect();
        let total: usize = sizes.iter().product();
        let mut marginal = vec![0.0; total];
        for &cell in &self.support {
            let symbols = self.unravel(cell);
            let idx = subset
                .iter()
                .zip(&sizes)
                .fold(0, |acc, (&s, &size)| acc * size + symbols[s]);
            marginal[idx] += self.p[cell];
        }
        Ok(entropy_of_dist(&marginal))
    }

    /// H(X_target | X_given) in bits.
    pub fn conditional_entropy(&self, target: &[usize], given: &[usize]) -> Result<f64> {
        let mut both: Vec<usize> = target.iter().chain(given).copied().collect();
        both.sort_unstable();
        both.dedup();
        Ok(self.subset_entropy(&both)? - self.subset_entropy(given)?)
    }
}

/// Robust typical set of i.i.d. blocks from a one-dimensional source.
///
/// Membership: every symbol a satisfies |freq(a) - p(a)| <= eps * p(a)
/// (with a 1e-12 absolute guard against float dust on the boundary).
#[derive(Debug, Clone)]
pub struct TypicalSet {
    dist: Vec<f64>,
    n: usize,
    epsilon: f64,
}

/// Builds the epsilon-typical set descriptor for `dist` at block length
/// `n`. The distribution is validated like a pmf.
pub fn typical_set(dist: &[f64], n: usize, epsilon: f64) -> Result<TypicalSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("block length must be >= 1".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be > 0".into()));
    }
    let mut d = dist.to_vec();
    validate_dist(&mut d, "typicality source")?;
    Ok(TypicalSet {
        dist: d,
        n,
        epsilon,
    })
}

impl TypicalSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alphabet_size(&self) -> usize {
        self.dist.len()
    }

    /// Per-symbol admissible count window [lo, hi] implied by the rule.
    /// Slightly wider than the membership test so it never excludes a
    /// count the test would accept; the test stays authoritative.
    fn window(&self, a: usize) -> (usize, usize) {
        let n = self.n as f64;
        let p = self.dist[a];
        let slack = 1e-9 + n * 1e-12;
        let lo = n * p * (1.0 - self.epsilon) - slack;
        let hi = n * p * (1.0 + self.epsilon) + slack;
        let lo = lo.ceil().max(0.0) as usize;
        let hi = (hi.floor() as usize).min(self.n);
        (lo, hi)
    }

    pub fn contains(&self, seq: &[usize]) -> bool {
        assert_eq!(seq.len(), self.n, "sequence length must equal n");
        let mut counts = vec![0usize; self.dist.len()];
        for &s in seq {
            assert!(s < self.dist.len(), "symbol out of alphabet");
            counts[s] += 1;
        }
        self.contains_counts(&counts)
    }

    /// Membership test on a precomputed symbol-count vector.
    pub fn contains_counts(&self, counts: &[usize]) -> bool {
        assert_eq!(counts.len(), self.dist.len());
        debug_assert_eq!(counts.iter().sum::<usize>(), self.n);
        let n = self.n as f64;
        counts.iter().zip(&self.dist).all(|(&c, &p)| {
            (c as f64 / n - p).abs() <= self.epsilon * p + 1e-12
        })
    }

    /// Exact total probability of the set, summed over admissible count
    /// vectors. Returns None when that enumeration would exceed ~5e6
    /// count vectors.
    pub fn probability(&self) -> Option<f64> {
        let k = self.dist.len();
        let windows: Vec<(usize, usize)> = (0..k).map(|a| self.window(a)).collect();
        if windows.iter().any(|&(lo, hi)| lo > hi) {
            return Some(0.0);
        }
        let mut cost = 1u128;
        for &(lo, hi) in windows.iter().take(k.saturating_sub(1)) {
            cost = cost.saturating_mul((hi - lo + 1) as u128);
            if cost > 5_000_000 {
                return None;
            }
        }
        let lnfact = ln_factorials(self.n);
        let mut total = 0.0;
        let mut counts = vec![0usize; k];
        self.prob_rec(0, self.n, &windows, &lnfact, &mut counts, &mut total);
        Some(total.min(1.0))
    }

    fn prob_rec(
        &self,
        a: usize,
        remaining: usize,
        windows: &[(usize, usize)],
        lnfact: &[f64],
        counts: &mut Vec<usize>,
        total: &mut f64,
    ) {
        let k = self.dist.len();
        if a == k - 1 {
            let (lo, hi) = windows[a];
            if remaining < lo || remaining > hi {
                return;
            }
            counts[a] = remaining;
            if self.contains_counts(counts) {
                let mut ln = lnfact[self.n];
                for (i, &c) in counts.iter().enumerate() {
                    ln -= lnfact[c];
                    if c > 0 {
                        ln += c as f64 * self.dist[i].ln();
                    }
                }
                *total += ln.exp();
            }
            return;
        }
        let (lo, hi) = windows[a];
        for c in lo..=hi.min(remaining) {
            counts[a] = c;
            self.prob_rec(a + 1, remaining - c, windows, lnfact, counts, total);
        }
        counts[a] = 0;
    }

    /// Every typical sequence, enumerated over the full |A|^n block
    /// space. Errors when |A|^n exceeds `limit`.
    pub fn sequences(&self, limit: usize) -> Result<Vec<Vec<usize>>> {
        let total = (self.dist.len() as u128)
            .checked_pow(self.n as u32)
            .unwrap_or(u128::MAX);
        if total > limit as u128 {
            return Err(Error::CapExceeded {
                what: "typical set enumeration",
                requested: total.min(usize::MAX as u128) as usize,
                limit,
            });
        }
        let mut out = Vec::new();
        let mut seq = vec![0usize; self.n];
        loop {
            if self.contains(&seq) {
                out.push(seq.clone());
            }
            let mut k = self.n;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                seq[k] += 1;
                if seq[k] < self.dist.len() {
                    break;
                }
                seq[k] = 0;
            }
        }
    }
}

/// ln(i!) for i in 0..=n.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + (i as f64).ln();
    }
    t
}
