//! Concrete codes over confusion graphs: zero-error variable-length
//! codes built from block colorings and a canonical Huffman stage,
//! index codes, exhaustive decodability verification, and a seeded
//! random-binning Monte Carlo simulator for the vanishing-error
//! regime.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::confusion::{
    index_confusion_graph, is_compatible, n_instance_graph, FunctionPair, IndexCodingInstance,
};
use crate::gentropy::dist_power;
use crate::graphs::{min_entropy_coloring, Coloring, Graph};
use crate::pmf::JointPmf;
use crate::{Caps, Error, Exactness, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeKind {
    ZeroError,
    Binning,
}

/// One n-block of the instance: the defining source sequences, what
/// each receiver observes, and what it must output.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Block {
    label: String,
    mass: f64,
    /// Defining sequences: [x-block, y-block] for a function pair, one
    /// sequence per source for index coding.
    sources: Vec<Vec<usize>>,
    /// Side information per receiver (demanded-complement coordinates
    /// concatenated in ascending order for index codes).
    side: Vec<Vec<usize>>,
    /// Required output per receiver.
    want: Vec<Vec<usize>>,
}

/// A prefix-free block code: a proper coloring of the block confusion
/// graph plus one canonical codeword per color.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Codebook {
    n: usize,
    code_kind: CodeKind,
    /// True when the coloring came from the exact minimum-entropy
    /// search rather than a heuristic or a product construction.
    coloring_exact: bool,
    blocks: Vec<Block>,
    color_of: Coloring,
    /// Codeword per color as a 0/1 string; a single color gets the
    /// empty word.
    codewords: Vec<String>,
}

impl Codebook {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn code_kind(&self) -> CodeKind {
        self.code_kind
    }

    pub fn coloring_exact(&self) -> bool {
        self.coloring_exact
    }

    pub fn color_of(&self) -> &Coloring {
        &self.color_of
    }

    pub fn codewords(&self) -> &[String] {
        &self.codewords
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_label(&self, v: usize) -> &str {
        &self.blocks[v].label
    }

    /// Codeword for the block at vertex index `v`.
    pub fn encode_block(&self, v: usize) -> &str {
        &self.codewords[self.color_of.color(v)]
    }

    /// Codeword for the block with the given x- and y-sequences.
    pub fn encode_pair(&self, xs: &[usize], ys: &[usize]) -> Result<&str> {
        self.encode_tuple(&[xs.to_vec(), ys.to_vec()])
    }

    /// Codeword for the block with the given per-source sequences.
    pub fn encode_tuple(&self, sources: &[Vec<usize>]) -> Result<&str> {
        match self
            .blocks
            .iter()
            .position(|b| b.sources.as_slice() == sources)
        {
            Some(v) => Ok(self.encode_block(v)),
            None => Err(Error::OffSupport(format!("{sources:?}"))),
        }
    }

    /// Expected codeword length per source symbol.
    pub fn rate(&self) -> f64 {
        let total: f64 = self
            .blocks
            .iter()
            .enumerate()
            .map(|(v, b)| b.mass * self.codewords[self.color_of.color(v)].len() as f64)
            .sum();
        total / self.n as f64
    }

    /// Sum of 2^-len over the codewords; 1 for every full prefix code.
    pub fn kraft_sum(&self) -> f64 {
        self.codewords
            .iter()
            .map(|w| (-(w.len() as f64)).exp2())
            .sum()
    }
}

/// A decodability failure found by exhaustive verification.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub block: String,
    /// 0-based receiver index.
    pub receiver: usize,
    pub expected: Vec<usize>,
    /// `None` when decoding itself failed.
    pub decoded: Option<Vec<usize>>,
}

/// Outcome of a Monte Carlo simulation run.
#[derive(Debug, Clone, Serialize)]
pub struct SimOutcome {
    pub trials: usize,
    pub errors: usize,
    pub empirical_error: f64,
    pub rate_used: f64,
    pub seed: u64,
    /// Which encoding regime ran: "uncoded", "slepian-wolf-binning",
    /// or "covering-packing-illustrative".
    pub scheme: String,
}

/// Codeword lengths of a Huffman code over the class masses, with
/// deterministic (mass, id) tie-breaking. A single class gets length 0.
fn huffman_lengths(masses: &[f64]) -> Vec<usize> {
    let k = masses.len();
    if k == 1 {
        return vec![0];
    }
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = masses
        .iter()
        .enumerate()
        .map(|(i, &m)| Reverse((m.to_bits(), i)))
        .collect();
    let mut merges: Vec<(usize, usize)> = Vec::with_capacity(k - 1);
    while heap.len() > 1 {
        let Reverse((ma, a)) = heap.pop().unwrap();
        let Reverse((mb, b)) = heap.pop().unwrap();
        let merged = f64::from_bits(ma) + f64::from_bits(mb);
        let id = k + merges.len();
        merges.push((a, b));
        heap.push(Reverse((merged.to_bits(), id)));
    }
    let mut depth = vec![0usize; k + merges.len()];
    for (i, &(a, b)) in merges.iter().enumerate().rev() {
        let node = k + i;
        depth[a] = depth[node] + 1;
        depth[b] = depth[node] + 1;
    }
    depth.truncate(k);
    depth
}

/// Canonical codewords for the given lengths: colors sorted by
/// (length, id), words assigned in binary counting order.
fn canonical_codewords(lengths: &[usize]) -> Vec<String> {
    let k = lengths.len();
    if k == 1 {
        return vec![String::new()];
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| (lengths[i], i));
    let mut words = vec![String::new(); k];
    let mut code: Vec<u8> = Vec::new();
    let mut prev_len = 0usize;
    for (rank, &i) in order.iter().enumerate() {
        if rank == 0 {
            code = vec![0; lengths[i]];
        } else {
            let mut pos = code.len();
            loop {
                assert!(pos > 0, "canonical code ran out of words");
                pos -= 1;
                if code[pos] == 0 {
                    code[pos] = 1;
                    break;
                }
                code[pos] = 0;
            }
            code.extend(std::iter::repeat(0).take(lengths[i] - prev_len));
        }
        prev_len = lengths[i];
        words[i] = code.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
    }
    words
}

/// Coloring of a split block from colorings of its halves: color ids
/// combine positionally, then compact. Proper because an edge of the
/// longer block restricts to an edge of at least one half.
fn product_coloring(a: &Coloring, b: &Coloring) -> Coloring {
    let bk = b.color_count();
    let mut raw = Vec::with_capacity(a.assignment().len() * b.assignment().len());
    for &ca in a.assignment() {
        for &cb in b.assignment() {
            raw.push(ca * bk + cb);
        }
    }
    Coloring::new(raw)
}

/// Best block coloring among the direct minimum-entropy search and
/// products of shorter-block winners, judged by actual expected
/// Huffman length (the quantity the code pays for).
fn pick_block_coloring<F>(
    graph_for: F,
    single_dist: &[f64],
    n: usize,
    caps: &Caps,
) -> Result<(Coloring, bool, Graph)>
where
    F: Fn(usize) -> Result<Graph>,
{
    let mut chosen: Vec<Coloring> = Vec::new();
    let mut exact = false;
    let mut last_graph = None;
    for k in 1..=n {
        let g = graph_for(k)?;
        let dist_k = dist_power(single_dist, k);
        let (direct, _, tag) = min_entropy_coloring(&g, &dist_k, caps)?;
        let mut cands: Vec<Coloring> = vec![direct];
        for j in 1..k {
            cands.push(product_coloring(&chosen[j - 1], &chosen[k - j - 1]));
        }
        let mut best = 0usize;
        let mut best_key = (f64::INFINITY, usize::MAX);
        for (i, c) in cands.iter().enumerate() {
            debug_assert!(c.is_proper(&g));
            let masses = c.class_masses(&dist_k);
            let lengths = huffman_lengths(&masses);
            let expected: f64 = masses
                .iter()
                .zip(&lengths)
                .map(|(m, &l)| m * l as f64)
                .sum();
            if expected < best_key.0 - 1e-12
                || ((expected - best_key.0).abs() <= 1e-12 && c.color_count() < best_key.1)
            {
                best_key = (expected, c.color_count());
                best = i;
            }
        }
        exact = best == 0 && matches!(tag, Exactness::Exact);
        chosen.push(cands.swap_remove(best));
        last_graph = Some(g);
    }
    Ok((
        chosen.pop().expect("n >= 1"),
        exact,
        last_graph.expect("n >= 1"),
    ))
}

/// Big-endian digits of `v` in base `s`, length `n`.
fn block_digits(mut v: usize, s: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0usize; n];
    for k in (0..n).rev() {
        d[k] = v % s;
        v /= s;
    }
    d
}

/// Zero-error variable-length code for n instances: a proper coloring
/// of the block confusion graph (blocks sharing a color never collide
/// at either receiver), Huffman-coded over the color masses.
pub fn build_zero_error_code(
    pmf: &JointPmf,
    fp: &FunctionPair,
    n: usize,
    caps: &Caps,
) -> Result<Codebook> {
    fp.validate(pmf)?;
    if n == 0 {
        return Err(Error::InvalidArgument("block length must be >= 1".into()));
    }
    let single = pmf.support_dist();
    let (coloring, coloring_exact, graph) =
        pick_block_coloring(|k| n_instance_graph(pmf, fp, k, caps), &single, n, caps)?;
    let dist = dist_power(&single, n);
    let codewords = canonical_codewords(&huffman_lengths(&coloring.class_masses(&dist)));

    let cells = pmf.support();
    let blocks = (0..dist.len())
        .map(|v| {
            let digits = block_digits(v, cells.len(), n);
            let xs: Vec<usize> = digits.iter().map(|&d| cells[d].0).collect();
            let ys: Vec<usize> = digits.iter().map(|&d| cells[d].1).collect();
            let z1: Vec<usize> = digits
                .iter()
                .map(|&d| fp.f_at(cells[d].0, cells[d].1).expect("total on support"))
                .collect();
            let z2: Vec<usize> = digits
                .iter()
                .map(|&d| fp.g_at(cells[d].0, cells[d].1).expect("total on support"))
                .collect();
            Block {
                label: graph.labels()[v].clone(),
                mass: dist[v],
                sources: vec![xs.clone(), ys.clone()],
                side: vec![xs, ys],
                want: vec![z1, z2],
            }
        })
        .collect();

    Ok(Codebook {
        n,
        code_kind: CodeKind::ZeroError,
        coloring_exact,
        blocks,
        color_of: coloring,
        codewords,
    })
}

/// Zero-error index code: a coloring of the union confusion graph over
/// all receivers, Huffman-coded. Receiver i's side information is its
/// held sources; its demand is the complement.
pub fn build_index_code(inst: &IndexCodingInstance, n: usize, caps: &Caps) -> Result<Codebook> {
    if n == 0 {
        return Err(Error::InvalidArgument("block length must be >= 1".into()));
    }
    let single = inst.sources().support_dist();
    let (coloring, coloring_exact, graph) =
        pick_block_coloring(|k| index_confusion_graph(inst, k, caps), &single, n, caps)?;
    let dist = dist_power(&single, n);
    let codewords = canonical_codewords(&huffman_lengths(&coloring.class_masses(&dist)));

    let cells = inst.sources().support();
    let symbols: Vec<Vec<usize>> = cells.iter().map(|&c| inst.sources().unravel(c)).collect();
    let k_sources = inst.sources().num_sources();
    let blocks = (0..dist.len())
        .map(|v| {
            let digits = block_digits(v, cells.len(), n);
            let sources: Vec<Vec<usize>> = (0..k_sources)
                .map(|s| digits.iter().map(|&d| symbols[d][s]).collect())
                .collect();
            let mut side = Vec::with_capacity(inst.receivers().len());
            let mut want = Vec::with_capacity(inst.receivers().len());
            for (i, held) in inst.receivers().iter().enumerate() {
                side.push(held.iter().flat_map(|&s| sources[s].clone()).collect());
                want.push(
                    inst.demand(i)
                        .iter()
                        .flat_map(|&s| sources[s].clone())
                        .collect(),
                );
            }
            Block {
                label: graph.labels()[v].clone(),
                mass: dist[v],
                sources,
                side,
                want,
            }
        })
        .collect();

    Ok(Codebook {
        n,
        code_kind: CodeKind::ZeroError,
        coloring_exact,
        blocks,
        color_of: coloring,
        codewords,
    })
}

/// Decodes for one receiver: the received word names a color; the
/// output is what the unique matching block in that color class wants.
/// `side` carries the receiver's observations — the x-block for
/// receiver 0 of a function pair, the y-block for receiver 1, held
/// source sequences concatenated in ascending source order for index
/// codes.
pub fn decode_receiver(
    cb: &Codebook,
    receiver: usize,
    word: &str,
    side: &[usize],
) -> Result<Vec<usize>> {
    if cb.blocks.first().map_or(0, |b| b.side.len()) <= receiver {
        return Err(Error::InvalidArgument(format!(
            "receiver {receiver} out of range"
        )));
    }
    let color = cb
        .codewords
        .iter()
        .position(|w| w == word)
        .ok_or(Error::UnknownCodeword)?;
    for (v, b) in cb.blocks.iter().enumerate() {
        if cb.color_of.color(v) == color && b.side[receiver] == side {
            return Ok(b.want[receiver].clone());
        }
    }
    Err(Error::OffSupport(format!(
        "receiver {receiver} sees {side:?}"
    )))
}

/// Receiver observing the x-block and wanting the first function.
pub fn decode1(cb: &Codebook, word: &str, xs: &[usize]) -> Result<Vec<usize>> {
    decode_receiver(cb, 0, word, xs)
}

/// Receiver observing the y-block and wanting the second function.
pub fn decode2(cb: &Codebook, word: &str, ys: &[usize]) -> Result<Vec<usize>> {
    decode_receiver(cb, 1, word, ys)
}

/// Exhaustively re-derives every support block from the instance and
/// pushes it through both decoders; true iff every output matches the
/// true function values.
pub fn verify_zero_error(
    cb: &Codebook,
    pmf: &JointPmf,
    fp: &FunctionPair,
) -> Result<(bool, Option<Counterexample>)> {
    fp.validate(pmf)?;
    let cells = pmf.support();
    let total = cells.len().pow(cb.n as u32);
    if cb.blocks.len() != total {
        return Err(Error::InvalidArgument(
            "codebook does not cover this instance's support".into(),
        ));
    }
    for v in 0..total {
        let digits = block_digits(v, cells.len(), cb.n);
        let xs: Vec<usize> = digits.iter().map(|&d| cells[d].0).collect();
        let ys: Vec<usize> = digits.iter().map(|&d| cells[d].1).collect();
        let truth: [Vec<usize>; 2] = [
            digits
                .iter()
                .map(|&d| fp.f_at(cells[d].0, cells[d].1).expect("total on support"))
                .collect(),
            digits
                .iter()
                .map(|&d| fp.g_at(cells[d].0, cells[d].1).expect("total on support"))
                .collect(),
        ];
        let word = cb.encode_pair(&xs, &ys)?.to_string();
        for (receiver, side) in [(0usize, &xs), (1usize, &ys)] {
            let decoded = decode_receiver(cb, receiver, &word, side);
            let ok = matches!(&decoded, Ok(z) if *z == truth[receiver]);
            if !ok {
                return Ok((
                    false,
                    Some(Counterexample {
                        block: cb.blocks[v].label.clone(),
                        receiver,
                        expected: truth[receiver].clone(),
                        decoded: decoded.ok(),
                    }),
                ));
            }
        }
    }
    Ok((true, None))
}

/// Exhaustive decodability check for an index code: every receiver
/// recovers its full demanded complement on every support block.
pub fn verify_index_code(
    cb: &Codebook,
    inst: &IndexCodingInstance,
) -> Result<(bool, Option<Counterexample>)> {
    let cells = inst.sources().support();
    let total = cells.len().pow(cb.n as u32);
    if cb.blocks.len() != total {
        return Err(Error::InvalidArgument(
            "codebook does not cover this instance's support".into(),
        ));
    }
    let symbols: Vec<Vec<usize>> = cells.iter().map(|&c| inst.sources().unravel(c)).collect();
    for v in 0..total {
        let digits = block_digits(v, cells.len(), cb.n);
        let seq = |s: usize| -> Vec<usize> { digits.iter().map(|&d| symbols[d][s]).collect() };
        let word = cb.encode_block(v).to_string();
        for (i, held) in inst.receivers().iter().enumerate() {
            let side: Vec<usize> = held.iter().flat_map(|&s| seq(s)).collect();
            let truth: Vec<usize> = inst.demand(i).iter().flat_map(|&s| seq(s)).collect();
            let decoded = decode_receiver(cb, i, &word, &side);
            let ok = matches!(&decoded, Ok(z) if *z == truth);
            if !ok {
                return Ok((
                    false,
                    Some(Counterexample {
                        block: cb.blocks[v].label.clone(),
                        receiver: i,
                        expected: truth,
                        decoded: decoded.ok(),
                    }),
                ));
            }
        }
    }
    Ok((true, None))
}

/// Expected codeword length per symbol, recomputed from the given
/// joint distribution: (1/n) sum over blocks of p(block) * |word|.
pub fn measured_rate(cb: &Codebook, pmf: &JointPmf) -> Result<f64> {
    if cb.blocks.iter().any(|b| b.sources.len() != 2) {
        return Err(Error::InvalidArgument(
            "expected a function-pair codebook".into(),
        ));
    }
    let mut total_p = 0.0;
    let mut bits = 0.0;
    for (v, b) in cb.blocks.iter().enumerate() {
        let mut prob = 1.0;
        for t in 0..cb.n {
            let (x, y) = (b.sources[0][t], b.sources[1][t]);
            if x >= pmf.x_size() || y >= pmf.y_size() {
                return Err(Error::InvalidArgument(
                    "codebook symbols exceed the pmf alphabets".into(),
                ));
            }
            prob *= pmf.flat()[x * pmf.y_size() + y];
        }
        total_p += prob;
        bits += prob * cb.codewords[cb.color_of.color(v)].len() as f64;
    }
    if (total_p - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(
            "pmf does not match the codebook's support".into(),
        ));
    }
    Ok(bits / cb.n as f64)
}

/// Relative slack used by all typicality checks in the simulators.
const TYP_EPS: f64 = 0.35;

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut lf = vec![0.0; n + 1];
    for i in 1..=n {
        lf[i] = lf[i - 1] + (i as f64).ln();
    }
    lf
}

fn logsumexp(vals: &[f64]) -> f64 {
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return f64::NEG_INFINITY;
    }
    m + vals.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// ln of the number of ways to fill `c` positions with symbols whose
/// per-symbol counts stay inside `bounds` (inclusive).
fn ln_row_arrangements(c: usize, bounds: &[(usize, usize)], lf: &[f64]) -> f64 {
    fn rec(
        i: usize,
        remaining: usize,
        bounds: &[(usize, usize)],
        lf: &[f64],
        acc: f64,
        out: &mut Vec<f64>,
    ) {
        if i == bounds.len() {
            if remaining == 0 {
                out.push(acc);
            }
            return;
        }
        let rest_min: usize = bounds[i..].iter().map(|b| b.0).sum();
        let rest_max: usize = bounds[i..].iter().map(|b| b.1).sum();
        if remaining < rest_min || remaining > rest_max {
            return;
        }
        let (lo, hi) = bounds[i];
        for m in lo..=hi.min(remaining) {
            rec(i + 1, remaining - m, bounds, lf, acc - lf[m], out);
        }
    }
    let mut terms = Vec::new();
    rec(0, c, bounds, lf, lf[c], &mut terms);
    logsumexp(&terms)
}

/// ln(-ln(1 - 1/B)) for B = 2^(rate * n), the per-competitor factor in
/// the bin-collision probability, stable for astronomically large B.
fn ln_bin_factor(rate: f64, n: usize) -> f64 {
    let ln_b = rate * n as f64 * std::f64::consts::LN_2;
    if ln_b > 40.0 {
        -ln_b
    } else {
        let b = ln_b.exp();
        (-(-1.0 / b).ln_1p()).ln()
    }
}

/// 1 - (1 - 1/B)^N given ln N and ln(-ln(1 - 1/B)).
fn collision_prob(ln_competitors: f64, ln_factor: f64) -> f64 {
    if ln_competitors == f64::NEG_INFINITY {
        return 0.0;
    }
    let t = ln_competitors + ln_factor;
    -(-t.exp()).exp_m1()
}

fn sample_index(cum: &[f64], u: f64) -> usize {
    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
}

/// Random binning of the witness sequence h^n, realized exactly at the
/// ensemble level: a trial errs when its own sequence falls outside
/// the conditionally typical set, or when at least one of the N
/// competing typical sequences lands in the same of B bins — an event
/// of probability 1 - (1 - 1/B)^N, with N counted exactly from the
/// sampled type. Collisions at the two receivers are drawn
/// independently, matching the ensemble marginals.
fn simulate_binning_compatible(
    pmf: &JointPmf,
    z_of: &[usize],
    z_count: usize,
    rate: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> SimOutcome {
    let cells = pmf.support();
    let p = pmf.support_dist();
    let cum: Vec<f64> = p
        .iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect();

    // Per-axis joint tables p(axis value, class).
    let table = |pick: &dyn Fn(usize) -> usize, size: usize| -> Vec<Vec<f64>> {
        let mut t = vec![vec![0.0; z_count]; size];
        for (s, &mass) in p.iter().enumerate() {
            t[pick(s)][z_of[s]] += mass;
        }
        t
    };
    let pxz = table(&|s| cells[s].0, pmf.x_size());
    let pyz = table(&|s| cells[s].1, pmf.y_size());

    let lf = ln_factorials(n);
    let ln_factor = ln_bin_factor(rate, n);
    let nf = n as f64;

    // Typicality check plus exact competitor count for one receiver.
    let side_error = |joint: &[Vec<f64>], m: &[Vec<usize>], rng: &mut dyn FnMut() -> f64| -> bool {
        for (row_p, row_m) in joint.iter().zip(m) {
            for (&target, &got) in row_p.iter().zip(row_m) {
                if target > 0.0 && (got as f64 / nf - target).abs() > TYP_EPS * target + 1e-12 {
                    return true;
                }
            }
        }
        let mut ln_all = 0.0;
        for (row_p, row_m) in joint.iter().zip(m) {
            let c: usize = row_m.iter().sum();
            let bounds: Vec<(usize, usize)> = row_p
                .iter()
                .filter(|&&v| v > 0.0)
                .map(|&v| {
                    let lo = (nf * v * (1.0 - TYP_EPS) - 1e-9).ceil().max(0.0) as usize;
                    let hi = ((nf * v * (1.0 + TYP_EPS) + 1e-9).floor() as usize).min(c);
                    (lo.min(hi), hi)
                })
                .collect();
            if bounds.is_empty() {
                continue;
            }
            ln_all += ln_row_arrangements(c, &bounds, &lf);
        }
        // Exclude the transmitted sequence itself.
        let ln_competitors = if ln_all <= 1e-9 {
            f64::NEG_INFINITY
        } else {
            ln_all + (-(-ln_all).exp()).ln_1p()
        };
        rng() < collision_prob(ln_competitors, ln_factor)
    };

    let mut errors = 0usize;
    for trial in 0..trials {
        let mut rng = crate::seeded_rng(seed, 1000 + trial as u64);
        let mut mx = vec![vec![0usize; z_count]; pmf.x_size()];
        let mut my = vec![vec![0usize; z_count]; pmf.y_size()];
        for _ in 0..n {
            let s = sample_index(&cum, rng.gen::<f64>());
            mx[cells[s].0][z_of[s]] += 1;
            my[cells[s].1][z_of[s]] += 1;
        }
        let err_x = side_error(&pxz, &mx, &mut || rng.gen::<f64>());
        let err_y = side_error(&pyz, &my, &mut || rng.gen::<f64>());
        if err_x || err_y {
            errors += 1;
        }
    }
    SimOutcome {
        trials,
        errors,
        empirical_error: errors as f64 / trials as f64,
        rate_used: rate,
        seed,
        scheme: "slepian-wolf-binning".into(),
    }
}

/// Literal covering-and-packing simulation with an explicit auxiliary
/// codebook. Desk-scale only (binary alphabets, short blocks); the
/// outcome illustrates the mechanism and carries no asymptotic weight.
fn simulate_covering_packing(
    pmf: &JointPmf,
    fp: &FunctionPair,
    rate: f64,
    n: usize,
    trials: usize,
    seed: u64,
    caps: &Caps,
) -> Result<SimOutcome> {
    if pmf.x_size() != 2 || pmf.y_size() != 2 {
        return Err(Error::Unsupported(
            "general binning simulation needs binary alphabets".into(),
        ));
    }
    if n > 12 {
        return Err(Error::Unsupported(
            "general binning simulation is desk-scale: n <= 12".into(),
        ));
    }
    let (_, channel) = crate::rates::inner_bound_ri(pmf, fp, caps)?;
    let cells = pmf.support().to_vec();
    let p = pmf.support_dist();
    let cum: Vec<f64> = p
        .iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    let sets = channel.sets().to_vec();
    let cond = channel.cond().to_vec();
    let k = sets.len();
    let w = channel.output_marginal(&p);
    let w_cum: Vec<f64> = w
        .iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect();

    // Joint targets for typicality: (cell, u), (x, u), (y, u).
    let mut psu = vec![vec![0.0; k]; cells.len()];
    let mut pxu = vec![vec![0.0; k]; 2];
    let mut pyu = vec![vec![0.0; k]; 2];
    for (s, row) in cond.iter().enumerate() {
        for (u, &q) in row.iter().enumerate() {
            psu[s][u] += p[s] * q;
            pxu[cells[s].0][u] += p[s] * q;
            pyu[cells[s].1][u] += p[s] * q;
        }
    }

    let mi = channel.mutual_information(&p);
    let m = ((2f64).powf((mi + 0.1) * n as f64).ceil() as usize).clamp(4, caps.codebook_sequences);
    let mut code_rng = crate::seeded_rng(seed, 0);
    let codebook: Vec<Vec<usize>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| sample_index(&w_cum, code_rng.gen::<f64>()))
                .collect()
        })
        .collect();
    let bins_f = (2f64).powf(rate * n as f64);
    let bin_count = if bins_f >= m as f64 {
        m
    } else {
        (bins_f.floor() as usize).max(1)
    };
    let mut bin_rng = crate::seeded_rng(seed, 1);
    let bin_of: Vec<usize> = (0..m).map(|_| bin_rng.gen_range(0..bin_count)).collect();

    let nf = n as f64;
    let typical = |a_seq: &[usize], u_seq: &[usize], target: &[Vec<f64>]| -> bool {
        let mut counts = vec![vec![0usize; k]; target.len()];
        for (&a, &u) in a_seq.iter().zip(u_seq) {
            counts[a][u] += 1;
        }
        for (row_t, row_c) in target.iter().zip(&counts) {
            for (&t, &c) in row_t.iter().zip(row_c) {
                if t == 0.0 {
                    if c > 0 {
                        return false;
                    }
                } else if (c as f64 / nf - t).abs() > TYP_EPS * t + 1e-12 {
                    return false;
                }
            }
        }
        true
    };
    // z value implied by (u, side) for each receiver, if any.
    let implied = |u: usize, axis: usize, value: usize| -> Option<usize> {
        sets[u].iter().find_map(|&s| {
            let (x, y) = cells[s];
            let here = if axis == 0 { x } else { y };
            if here != value {
                return None;
            }
            if axis == 0 {
                fp.f_at(x, y)
            } else {
                fp.g_at(x, y)
            }
        })
    };

    let mut errors = 0usize;
    for trial in 0..trials {
        let mut rng = crate::seeded_rng(seed, 1000 + trial as u64);
        let s_seq: Vec<usize> = (0..n)
            .map(|_| sample_index(&cum, rng.gen::<f64>()))
            .collect();
        let Some(chosen) = codebook.iter().position(|u| typical(&s_seq, u, &psu)) else {
            errors += 1;
            continue;
        };
        let bin = bin_of[chosen];
        let mut trial_err = false;
        for axis in 0..2 {
            let side: Vec<usize> = s_seq
                .iter()
                .map(|&s| if axis == 0 { cells[s].0 } else { cells[s].1 })
                .collect();
            let target = if axis == 0 { &pxu } else { &pyu };
            let cands: Vec<usize> = (0..m)
                .filter(|&i| bin_of[i] == bin && typical(&side, &codebook[i], target))
                .collect();
            if cands.len() != 1 {
                trial_err = true;
                break;
            }
            let picked = &codebook[cands[0]];
            for t in 0..n {
                let truth = {
                    let (x, y) = cells[s_seq[t]];
                    if axis == 0 {
                        fp.f_at(x, y).expect("total on support")
                    } else {
                        fp.g_at(x, y).expect("total on support")
                    }
                };
                match implied(picked[t], axis, side[t]) {
                    Some(z) if z == truth => {}
                    _ => {
                        trial_err = true;
                        break;
                    }
                }
            }
            if trial_err {
                break;
            }
        }
        if trial_err {
            errors += 1;
        }
    }
    Ok(SimOutcome {
        trials,
        errors,
        empirical_error: errors as f64 / trials as f64,
        rate_used: rate,
        seed,
        scheme: "covering-packing-illustrative".into(),
    })
}

/// Seeded Monte Carlo of the vanishing-error scheme at a given rate.
/// Compatible instances bin the witness sequence (or send it uncoded
/// when the rate affords log2 of its alphabet); everything else falls
/// back to the desk-scale covering-and-packing illustration.
pub fn binning_simulate(
    pmf: &JointPmf,
    fp: &FunctionPair,
    rate: f64,
    n: usize,
    trials: usize,
    seed: u64,
    caps: &Caps,
) -> Result<SimOutcome> {
    fp.validate(pmf)?;
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::InvalidArgument("rate must be positive".into()));
    }
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "block length and trial count must be >= 1".into(),
        ));
    }
    if let Some(witness) = is_compatible(pmf, fp)? {
        let raw = witness.values_on_support(pmf);
        let mut ids: Vec<usize> = raw.clone();
        ids.sort_unstable();
        ids.dedup();
        let z_of: Vec<usize> = raw
            .iter()
            .map(|v| ids.binary_search(v).expect("id present"))
            .collect();
        if rate >= (ids.len() as f64).log2() - 1e-12 {
            // Enough bits to label every witness symbol outright.
            return Ok(SimOutcome {
                trials,
                errors: 0,
                empirical_error: 0.0,
                rate_used: rate,
                seed,
                scheme: "uncoded".into(),
            });
        }
        Ok(simulate_binning_compatible(
            pmf,
            &z_of,
            ids.len(),
            rate,
            n,
            trials,
            seed,
        ))
    } else {
        simulate_covering_packing(pmf, fp, rate, n, trials, seed, caps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::{entropy_of_dist, MultiPmf};
    use crate::rates::cutset_bound;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn dsbs(p: f64) -> JointPmf {
        let q = 1.0 - p;
        JointPmf::new(vec![vec![q / 2.0, p / 2.0], vec![p / 2.0, q / 2.0]]).unwrap()
    }

    fn table(vals: &[&[usize]]) -> Vec<Vec<Option<usize>>> {
        vals.iter()
            .map(|row| row.iter().map(|&v| Some(v)).collect())
            .collect()
    }

    fn prefix_free(words: &[String]) -> bool {
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                if i != j && b.starts_with(a.as_str()) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn huffman_canonical_examples() {
        assert_eq!(huffman_lengths(&[1.0]), vec![0]);
        assert_eq!(canonical_codewords(&[0]), vec![String::new()]);
        let lengths = huffman_lengths(&[0.5, 0.25, 0.25]);
        assert_eq!(lengths, vec![1, 2, 2]);
        assert_eq!(canonical_codewords(&lengths), vec!["0", "10", "11"]);
        let uniform = huffman_lengths(&[0.25; 4]);
        assert_eq!(uniform, vec![2, 2, 2, 2]);
        assert_eq!(canonical_codewords(&uniform), vec!["00", "01", "10", "11"]);

        let mut rng = crate::seeded_rng(301, 0);
        for _ in 0..20 {
            let k = rng.gen_range(2..=12);
            let mut masses: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 0.01).collect();
            let total: f64 = masses.iter().sum();
            masses.iter_mut().for_each(|m| *m /= total);
            let lengths = huffman_lengths(&masses);
            let words = canonical_codewords(&lengths);
            assert!(prefix_free(&words));
            let kraft: f64 = lengths.iter().map(|&l| (-(l as f64)).exp2()).sum();
            assert_relative_eq!(kraft, 1.0, epsilon = 1e-12);
            let expected: f64 = masses
                .iter()
                .zip(&lengths)
                .map(|(m, &l)| m * l as f64)
                .sum();
            assert!(expected <= entropy_of_dist(&masses) + 1.0 + 1e-9);
        }
    }

    #[test]
    fn dsbs_complementary_code_rates() {
        let caps = Caps::default();
        let pmf = dsbs(0.25);
        let fp = FunctionPair::complementary(2, 2);

        let cb1 = build_zero_error_code(&pmf, &fp, 1, &caps).unwrap();
        assert_eq!(cb1.color_of().color_count(), 2);
        assert!(cb1.coloring_exact());
        assert!(cb1.codewords().iter().all(|w| w.len() == 1));
        assert_relative_eq!(cb1.rate(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(cb1.kraft_sum(), 1.0, epsilon = 1e-12);
        assert!(verify_zero_error(&cb1, &pmf, &fp).unwrap().0);

        let cb2 = build_zero_error_code(&pmf, &fp, 2, &caps).unwrap();
        assert_relative_eq!(cb2.rate(), 0.84375, epsilon = 1e-12);
        assert!(verify_zero_error(&cb2, &pmf, &fp).unwrap().0);
        assert_relative_eq!(
            measured_rate(&cb2, &pmf).unwrap(),
            cb2.rate(),
            epsilon = 1e-12
        );

        let cb3 = build_zero_error_code(&pmf, &fp, 3, &caps).unwrap();
        let converse = entropy_of_dist(&[0.25, 0.75]);
        assert!(cb3.rate() <= 0.8229166666666666 + 1e-9);
        assert!(cb3.rate() >= converse - 1e-9);
        assert!(verify_zero_error(&cb3, &pmf, &fp).unwrap().0);

        assert!(cb1.rate() >= cb2.rate() && cb2.rate() >= cb3.rate());
    }

    #[test]
    fn diagonal_support_collapses_to_silence() {
        let caps = Caps::default();
        let pmf = JointPmf::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let fp = FunctionPair::complementary(2, 2);
        for n in 1..=3 {
            let cb = build_zero_error_code(&pmf, &fp, n, &caps).unwrap();
            assert_eq!(cb.color_of().color_count(), 1);
            assert_eq!(cb.codewords(), &[String::new()]);
            assert_relative_eq!(cb.rate(), 0.0, epsilon = 1e-12);
            assert_relative_eq!(cb.kraft_sum(), 1.0, epsilon = 1e-12);
            assert!(verify_zero_error(&cb, &pmf, &fp).unwrap().0);
        }
        let cb = build_zero_error_code(&pmf, &fp, 2, &caps).unwrap();
        // Side information alone pins down the other source.
        assert_eq!(decode1(&cb, "", &[0, 1]).unwrap(), vec![0, 1]);
        assert_eq!(decode2(&cb, "", &[1, 0]).unwrap(), vec![1, 0]);
    }

    #[test]
    fn decoders_roundtrip_and_reject() {
        let caps = Caps::default();
        let pmf = dsbs(0.25);
        let fp = FunctionPair::complementary(2, 2);
        let cb = build_zero_error_code(&pmf, &fp, 1, &caps).unwrap();

        let word = cb.encode_pair(&[0], &[1]).unwrap().to_string();
        assert_eq!(decode1(&cb, &word, &[0]).unwrap(), vec![1]);
        assert_eq!(decode2(&cb, &word, &[1]).unwrap(), vec![0]);

        assert!(matches!(
            decode1(&cb, "01101", &[0]),
            Err(Error::UnknownCodeword)
        ));
        assert!(matches!(
            decode1(&cb, &word, &[9]),
            Err(Error::OffSupport(_))
        ));
        assert!(matches!(
            decode_receiver(&cb, 5, &word, &[0]),
            Err(Error::InvalidArgument(_))
        ));

        // Constant first function: receiver 1 learns nothing new and
        // always outputs the constant.
        let fp = FunctionPair::new(table(&[&[7, 7], &[7, 7]]), table(&[&[0, 1], &[0, 1]]));
        let cb = build_zero_error_code(&pmf, &fp, 1, &caps).unwrap();
        for (xs, ys) in [([0], [0]), ([0], [1]), ([1], [0]), ([1], [1])] {
            let word = cb.encode_pair(&xs, &ys).unwrap().to_string();
            assert_eq!(decode1(&cb, &word, &xs).unwrap(), vec![7]);
        }
    }

    #[test]
    fn verify_catches_merged_colors() {
        let caps = Caps::default();
        let pmf = dsbs(0.25);
        let fp = FunctionPair::complementary(2, 2);
        let good = build_zero_error_code(&pmf, &fp, 1, &caps).unwrap();
        assert!(verify_zero_error(&good, &pmf, &fp).unwrap().0);

        // Merge the color of (0,0) into the class of its neighbor
        // (0,1): receiver 1 can no longer split them from x alone.
        let merged_assignment: Vec<usize> = good
            .color_of()
            .assignment()
            .iter()
            .enumerate()
            .map(|(v, &c)| if v == 0 { good.color_of().color(1) } else { c })
            .collect();
        let color_of = Coloring::new(merged_assignment);
        let dist = pmf.support_dist();
        let codewords = canonical_codewords(&huffman_lengths(&color_of.class_masses(&dist)));
        let broken = Codebook {
            n: 1,
            code_kind: CodeKind::ZeroError,
            coloring_exact: false,
            blocks: good.blocks.clone(),
            color_of,
            codewords,
        };
        let (ok, cex) = verify_zero_error(&broken, &pmf, &fp).unwrap();
        assert!(!ok);
        let cex = cex.unwrap();
        assert!(cex.decoded.as_ref() != Some(&cex.expected));
    }

    #[test]
    fn random_instances_build_verified_codes() {
        let caps = Caps::default();
        let mut rng = crate::seeded_rng(307, 0);
        for round in 0..15 {
            let nx = rng.gen_range(2..=3);
            let ny = rng.gen_range(2..=3);
            let mut rows = vec![vec![0.0; ny]; nx];
            for row in rows.iter_mut() {
                for v in row.iter_mut() {
                    if rng.gen_bool(0.85) {
                        *v = rng.gen::<f64>() + 0.05;
                    }
                }
            }
            let total: f64 = rows.iter().flatten().sum();
            if total == 0.0 {
                continue;
            }
            rows.iter_mut()
                .for_each(|r| r.iter_mut().for_each(|v| *v /= total));
            let Ok(pmf) = JointPmf::new(rows) else {
                continue;
            };
            let f = (0..nx)
                .map(|_| (0..ny).map(|_| Some(rng.gen_range(0..3))).collect())
                .collect();
            let g = (0..nx)
                .map(|_| (0..ny).map(|_| Some(rng.gen_range(0..3))).collect())
                .collect();
            let fp = FunctionPair::new(f, g);
            let n = 1 + (round % 2);
            let cb = build_zero_error_code(&pmf, &fp, n, &caps).unwrap();

            let (ok, cex) = verify_zero_error(&cb, &pmf, &fp).unwrap();
            assert!(ok, "round {round}: {cex:?}");
            assert_relative_eq!(cb.kraft_sum(), 1.0, epsilon = 1e-12);
            assert!(prefix_free(cb.codewords()));
            assert!(cb.rate() >= cutset_bound(&pmf, &fp).unwrap() - 1e-9);

            // Expected length within one bit of the color entropy.
            let dist = dist_power(&pmf.support_dist(), n);
            let entropy = cb.color_of().entropy(&dist);
            assert!(cb.rate() * n as f64 <= entropy + 1.0 + 1e-9);

            // Proper on the block graph: adjacent blocks never share
            // a codeword.
            let g = n_instance_graph(&pmf, &fp, n, &caps).unwrap();
            assert!(cb.color_of().is_proper(&g));
        }
    }

    #[test]
    fn index_code_of_two_sources_matches_complementary_delivery() {
        let caps = Caps::default();
        let pmf = dsbs(0.25);
        let sources = MultiPmf::new(vec![2, 2], pmf.flat().to_vec()).unwrap();
        let inst = IndexCodingInstance::new(sources, vec![vec![0], vec![1]]).unwrap();
        let fp = FunctionPair::complementary(2, 2);
        for n in 1..=2 {
            let via_pair = build_zero_error_code(&pmf, &fp, n, &caps).unwrap();
            let via_index = build_index_code(&inst, n, &caps).unwrap();
            assert_relative_eq!(via_pair.rate(), via_index.rate(), epsilon = 1e-12);
            assert!(verify_index_code(&via_index, &inst).unwrap().0);
        }
    }

    #[test]
    fn index_code_three_bits() {
        let caps = Caps::default();
        let sources = MultiPmf::new(vec![2, 2, 2], vec![0.125; 8]).unwrap();
        let inst = IndexCodingInstance::new(sources, vec![vec![0], vec![1, 2]]).unwrap();

        let cb = build_index_code(&inst, 1, &caps).unwrap();
        assert_eq!(cb.color_of().color_count(), 4);
        assert_relative_eq!(cb.rate(), 2.0, epsilon = 1e-12);
        assert!(verify_index_code(&cb, &inst).unwrap().0);

        // Receiver 0 holds source 0 and demands sources 1 and 2.
        let word = cb.encode_tuple(&[vec![1], vec![0], vec![1]]).unwrap();
        assert_eq!(
            decode_receiver(&cb, 0, word, &[1]).unwrap(),
            vec![0, 1]
        );
        // Receiver 1 holds sources 1 and 2 and demands source 0.
        assert_eq!(decode_receiver(&cb, 1, word, &[0, 1]).unwrap(), vec![1]);

        let cb2 = build_index_code(&inst, 2, &caps).unwrap();
        assert!(cb2.rate() >= 2.0 - 1e-9);
        assert!(cb2.rate() <= 2.5 + 1e-9);
        assert!(verify_index_code(&cb2, &inst).unwrap().0);
    }

    #[test]
    fn index_code_equal_sources_is_silent() {
        let caps = Caps::default();
        let sources = MultiPmf::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let inst = IndexCodingInstance::new(sources, vec![vec![0], vec![1]]).unwrap();
        let cb = build_index_code(&inst, 1, &caps).unwrap();
        assert_eq!(cb.color_of().color_count(), 1);
        assert_relative_eq!(cb.rate(), 0.0, epsilon = 1e-12);
        assert!(verify_index_code(&cb, &inst).unwrap().0);
    }

    #[test]
    fn binning_thresholds_on_parity() {
        let caps = Caps::default();
        let pmf = dsbs(0.25);
        let xor = FunctionPair::new(table(&[&[0, 1], &[1, 0]]), table(&[&[0, 1], &[1, 0]]));

        // Four witness classes: 2.1 bits per symbol labels them raw.
        let out = binning_simulate(&pmf, &xor, 2.1, 100, 50, 5, &caps).unwrap();
        assert_eq!(out.scheme, "uncoded");
        assert_eq!(out.errors, 0);

        // Above the conditional entropy threshold (~0.811): reliable.
        let good = binning_simulate(&pmf, &xor, 1.0, 500, 100, 11, &caps).unwrap();
        assert_eq!(good.scheme, "slepian-wolf-binning");
        assert!(
            good.empirical_error < 0.05,
            "error {} too high",
            good.empirical_error
        );

        // Below it: binning collapses.
        let bad = binning_simulate(&pmf, &xor, 0.5, 500, 100, 11, &caps).unwrap();
        assert!(
            bad.empirical_error > 0.2,
            "error {} too low",
            bad.empirical_error
        );

        // Bit-reproducible.
        let again = binning_simulate(&pmf, &xor, 1.0, 500, 100, 11, &caps).unwrap();
        assert_eq!(again.errors, good.errors);
    }

    #[test]
    fn binning_on_two_class_witness() {
        let caps = Caps::default();
        let pmf = dsbs(0.25);
        // Both receivers want X AND Y; the witness has two classes.
        let and_pair = FunctionPair::new(table(&[&[0, 0], &[0, 1]]), table(&[&[0, 0], &[0, 1]]));

        let out = binning_simulate(&pmf, &and_pair, 1.2, 100, 40, 5, &caps).unwrap();
        assert_eq!(out.scheme, "uncoded");

        // Threshold here is 0.5 h(0.25) ~ 0.406.
        let good = binning_simulate(&pmf, &and_pair, 0.9, 600, 100, 13, &caps).unwrap();
        assert_eq!(good.scheme, "slepian-wolf-binning");
        assert!(
            good.empirical_error < 0.05,
            "error {} too high",
            good.empirical_error
        );
        let bad = binning_simulate(&pmf, &and_pair, 0.2, 600, 100, 13, &caps).unwrap();
        assert!(
            bad.empirical_error > 0.2,
            "error {} too low",
            bad.empirical_error
        );
    }

    #[test]
    fn binning_rejects_bad_arguments() {
        let caps = Caps::default();
        let pmf = dsbs(0.25);
        let xor = FunctionPair::new(table(&[&[0, 1], &[1, 0]]), table(&[&[0, 1], &[1, 0]]));
        assert!(matches!(
            binning_simulate(&pmf, &xor, 0.0, 100, 10, 1, &caps),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            binning_simulate(&pmf, &xor, 1.0, 0, 10, 1, &caps),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            binning_simulate(&pmf, &xor, 1.0, 100, 0, 1, &caps),
            Err(Error::InvalidArgument(_))
        ));

        // Incompatible ternary instance: no simulator covers it.
        let uniform = JointPmf::new(vec![vec![1.0 / 9.0; 3]; 3]).unwrap();
        let fp = FunctionPair::new(
            table(&[&[0, 1, 1], &[1, 1, 1], &[1, 1, 1]]),
            table(&[&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]]),
        );
        assert!(matches!(
            binning_simulate(&uniform, &fp, 1.0, 100, 10, 1, &caps),
            Err(Error::Unsupported(_))
        ));

        // Incompatible binary instance beyond desk scale.
        let switch = FunctionPair::new(table(&[&[0, 1], &[1, 1]]), table(&[&[0, 1], &[0, 1]]));
        assert!(matches!(
            binning_simulate(&pmf, &switch, 1.0, 20, 10, 1, &caps),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn covering_packing_illustration_runs() {
        let mut caps = Caps::default();
        caps.codebook_sequences = 4096;
        let pmf = dsbs(0.25);
        let switch = FunctionPair::new(table(&[&[0, 1], &[1, 1]]), table(&[&[0, 1], &[0, 1]]));
        assert!(is_compatible(&pmf, &switch).unwrap().is_none());

        let out = binning_simulate(&pmf, &switch, 1.5, 6, 12, 3, &caps).unwrap();
        assert_eq!(out.scheme, "covering-packing-illustrative");
        assert!(out.errors <= out.trials);
        assert_relative_eq!(
            out.empirical_error,
            out.errors as f64 / out.trials as f64,
            epsilon = 1e-15
        );
        let again = binning_simulate(&pmf, &switch, 1.5, 6, 12, 3, &caps).unwrap();
        assert_eq!(again.errors, out.errors);
    }

    #[test]
    fn serialization_exposes_code_table() {
        let caps = Caps::default();
        let pmf = dsbs(0.25);
        let fp = FunctionPair::complementary(2, 2);
        let cb = build_zero_error_code(&pmf, &fp, 1, &caps).unwrap();
        let json = serde_json::to_string(&cb).unwrap();
        assert!(json.contains("codewords"));
        assert!(json.contains("color_of"));
        assert!(json.contains("zero_error"));

        let out = binning_simulate(
            &pmf,
            &FunctionPair::new(table(&[&[0, 1], &[1, 0]]), table(&[&[0, 1], &[1, 0]])),
            1.0,
            200,
            20,
            42,
            &caps,
        )
        .unwrap();
        let json = serde_json::to_string(&out).unwrap();
        assert!(json.contains("\"seed\":42"));
    }
}
