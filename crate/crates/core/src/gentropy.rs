//! Entropy functionals on graphs: chromatic entropy, graph entropy via
//! alternating minimization over independent-set channels, the
//! component-wise union formula, and two-sided brackets for the
//! complementary graph entropy and for coloring rates of graph unions.

use serde::Serialize;

use crate::graphs::{
    and_power, chromatic_number, greedy_coloring, is_perfect, maximal_independent_sets,
    min_entropy_coloring, union, Coloring, Graph,
};
use crate::pmf::{self, typical_set};
use crate::{Caps, Error, Exactness, Result};

/// Distribution of an auxiliary variable ranging over independent sets
/// of a graph, conditioned on the vertex: `cond[v][k]` is the
/// probability of emitting `sets[k]` at vertex v. Feasibility means a
/// set can only be emitted at its own members.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryChannel {
    sets: Vec<Vec<usize>>,
    cond: Vec<Vec<f64>>,
}

impl AuxiliaryChannel {
    /// Validates row stochasticity (within 1e-9, then renormalized),
    /// membership feasibility, and that every set is independent in `g`.
    pub fn new(g: &Graph, sets: Vec<Vec<usize>>, mut cond: Vec<Vec<f64>>) -> Result<Self> {
        if cond.len() != g.n_vertices() {
            return Err(Error::InvalidChannel(
                "one conditional row per vertex required".into(),
            ));
        }
        for set in &sets {
            for (i, &u) in set.iter().enumerate() {
                if u >= g.n_vertices() {
                    return Err(Error::InvalidChannel("set member out of range".into()));
                }
                for &v in &set[i + 1..] {
                    if g.has_edge(u, v) {
                        return Err(Error::InvalidChannel(format!(
                            "set {set:?} is not independent"
                        )));
                    }
                }
            }
        }
        for (v, row) in cond.iter_mut().enumerate() {
            if row.len() != sets.len() {
                return Err(Error::InvalidChannel(
                    "conditional row length must match set count".into(),
                ));
            }
            let mut total = 0.0;
            for (k, &p) in row.iter().enumerate() {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::InvalidChannel("negative or non-finite entry".into()));
                }
                if p > 0.0 && !sets[k].contains(&v) {
                    return Err(Error::InvalidChannel(format!(
                        "vertex {v} emits a set it does not belong to"
                    )));
                }
                total += p;
            }
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidChannel(format!(
                    "row {v} sums to {total}"
                )));
            }
            for p in row.iter_mut() {
                *p /= total;
            }
        }
        Ok(AuxiliaryChannel { sets, cond })
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn cond(&self) -> &[Vec<f64>] {
        &self.cond
    }

    /// I(W; X) in bits for a vertex distribution.
    pub fn mutual_information(&self, dist: &[f64]) -> f64 {
        let marginal = self.output_marginal(dist);
        let mut i = 0.0;
        for (v, row) in self.cond.iter().enumerate() {
            if dist[v] == 0.0 {
                continue;
            }
            for (k, &q) in row.iter().enumerate() {
                if q > 0.0 && marginal[k] > 0.0 {
                    i += dist[v] * q * (q / marginal[k]).log2();
                }
            }
        }
        i.max(0.0)
    }

    /// Marginal distribution of the emitted set.
    pub fn output_marginal(&self, dist: &[f64]) -> Vec<f64> {
        let mut m = vec![0.0; self.sets.len()];
        for (v, row) in self.cond.iter().enumerate() {
            for (k, &q) in row.iter().enumerate() {
                m[k] += dist[v] * q;
            }
        }
        m
    }
}

/// Minimum entropy of a proper coloring's color, plus the witness.
/// Exactness is inherited from the coloring search.
pub fn chromatic_entropy(
    g: &Graph,
    dist: &[f64],
    caps: &Caps,
) -> Result<(f64, Coloring, Exactness)> {
    let (coloring, bits, tag) = min_entropy_coloring(g, dist, caps)?;
    Ok((bits, coloring, tag))
}

/// Graph entropy: the minimum of I(W; X) over channels from vertices to
/// independent sets containing them. Restricting W to maximal
/// independent sets loses nothing: replacing a set by a fixed maximal
/// superset is a function of W, and data processing can only lower
/// I(W; X) while preserving feasibility.
///
/// Solved by alternating minimization (channel update and output
/// marginal update are both closed-form), run to relative tolerance
/// 1e-10 or 10000 iterations from a uniform-over-feasible start.
pub fn graph_entropy(g: &Graph, dist: &[f64], caps: &Caps) -> Result<(f64, AuxiliaryChannel)> {
    let (bits, channel, _) = graph_entropy_detailed(g, dist, caps, None)?;
    Ok((bits, channel))
}

/// As `graph_entropy`, but optionally initialized from a seeded random
/// channel, and returning the per-iteration objective trace.
pub fn graph_entropy_detailed(
    g: &Graph,
    dist: &[f64],
    caps: &Caps,
    init_seed: Option<u64>,
) -> Result<(f64, AuxiliaryChannel, Vec<f64>)> {
    let mut d = dist.to_vec();
    pmf::validate_dist(&mut d, "vertex distribution")?;
    if d.len() != g.n_vertices() {
        return Err(Error::InvalidArgument(
            "distribution length does not match vertex count".into(),
        ));
    }
    let sets = maximal_independent_sets(g, caps)?;
    let n = g.n_vertices();
    let feasible: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            (0..sets.len())
                .filter(|&k| sets[k].binary_search(&v).is_ok())
                .collect()
        })
        .collect();
    // Every vertex extends to some maximal independent set.
    debug_assert!(feasible.iter().all(|f| !f.is_empty()));
    let mut q = vec![vec![0.0; sets.len()]; n];
    match init_seed {
        None => {
            for v in 0..n {
                let w = 1.0 / feasible[v].len() as f64;
                for &k in &feasible[v] {
                    q[v][k] = w;
                }
            }
        }
        Some(seed) => {
            use rand::Rng;
            let mut rng = crate::seeded_rng(seed, 7);
            for v in 0..n {
                let mut total = 0.0;
                for &k in &feasible[v] {
                    let w = rng.gen::<f64>() + 1e-3;
                    q[v][k] = w;
                    total += w;
                }
                for &k in &feasible[v] {
                    q[v][k] /= total;
                }
            }
        }
    }
    let objective = |q: &[Vec<f64>], r: &[f64]| -> f64 {
        let mut i = 0.0;
        for v in 0..n {
            if d[v] == 0.0 {
                continue;
            }
            for (k, &p) in q[v].iter().enumerate() {
                if p > 0.0 && r[k] > 0.0 {
                    i += d[v] * p * (p / r[k]).log2();
                }
            }
        }
        i
    };
    let mut trace = Vec::new();
    let mut prev = f64::INFINITY;
    for _ in 0..10_000 {
        let mut r = vec![0.0; sets.len()];
        for v in 0..n {
            for (k, &p) in q[v].iter().enumerate() {
                r[k] += d[v] * p;
            }
        }
        let value = objective(&q, &r);
        trace.push(value);
        if prev.is_finite() && (prev - value).abs() <= 1e-10 * prev.abs().max(1.0) {
            prev = value;
            break;
        }
        prev = value;
        for v in 0..n {
            if d[v] == 0.0 {
                continue;
            }
            let denom: f64 = feasible[v].iter().map(|&k| r[k]).sum();
            if denom <= 0.0 {
                continue;
            }
            for p in q[v].iter_mut() {
                *p = 0.0;
            }
            for &k in &feasible[v] {
                q[v][k] = r[k] / denom;
            }
        }
    }
    let channel = AuxiliaryChannel::new(g, sets, q)?;
    let bits = prev.max(0.0);
    Ok((bits, channel, trace))
}

/// Component-wise graph entropy: for a graph whose connected components
/// are `components[i].0` carrying total probability `components[i].1`
/// and renormalized vertex distribution `components[i].2`, the graph
/// entropy of the whole is the probability-weighted sum.
pub fn koerner_union(components: &[(Graph, f64, Vec<f64>)], caps: &Caps) -> Result<f64> {
    if components.is_empty() {
        return Err(Error::InvalidArgument("no components".into()));
    }
    let total: f64 = components.iter().map(|(_, p, _)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "component probabilities sum to {total}, not 1"
        )));
    }
    let mut bits = 0.0;
    for (g, p, dist) in components {
        if *p < 0.0 {
            return Err(Error::InvalidArgument("negative component probability".into()));
        }
        if *p == 0.0 {
            continue;
        }
        bits += p * graph_entropy(g, dist, caps)?.0;
    }
    Ok(bits)
}

/// Two-sided estimate of an asymptotic per-letter rate.
///
/// `lower` and `upper` always bracket the target; `exact` is set when a
/// closed form applies (perfect graphs) and then equals both ends.
/// `chi_estimates` carry (n, (1/n) log2 of the chromatic number of the
/// n-th AND power restricted to epsilon-typical tuples), with `None`
/// bits when the typical set at that n is empty; `hchi_estimates` carry
/// (n, (1/n) of the block chromatic entropy), each a one-shot upper
/// bound by subadditivity.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyBracket {
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
    pub chi_estimates: Vec<(usize, Option<f64>)>,
    pub hchi_estimates: Vec<(usize, f64)>,
    pub notes: Vec<String>,
}

pub(crate) fn dist_power(dist: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * dist.len());
        for &a in &out {
            for &b in dist {
                next.push(a * b);
            }
        }
        out = next;
    }
    out
}

fn chi_typical_estimate(
    g: &Graph,
    dist: &[f64],
    n: usize,
    epsilon: f64,
    caps: &Caps,
) -> Result<Option<f64>> {
    let power = and_power(g, n, caps)?;
    let base = g.n_vertices();
    let set = typical_set(dist, n, epsilon)?;
    let typical: Vec<usize> = (0..power.n_vertices())
        .filter(|&i| {
            let mut idx = i;
            let mut tuple = vec![0usize; n];
            for k in (0..n).rev() {
                tuple[k] = idx % base;
                idx /= base;
            }
            set.contains(&tuple)
        })
        .collect();
    if typical.is_empty() {
        return Ok(None);
    }
    let restricted = power.induced(&typical);
    let chi = if restricted.n_vertices() <= caps.exact_search_vertices.min(64) {
        chromatic_number(&restricted, caps)?
    } else {
        greedy_coloring(&restricted).color_count()
    };
    Ok(Some((chi as f64).log2() / n as f64))
}

/// Brackets the asymptotic typical-restricted coloring rate of AND
/// powers of `g` under `dist`.
///
/// Upper bounds come from per-block chromatic entropies (valid at every
/// finite n); the typical-restricted chromatic numbers are reported as
/// estimates at a fixed epsilon rather than the vanishing-epsilon
/// limit. When the graph is perfect the rate equals the graph entropy,
/// which is attached as `exact`.
pub fn complementary_entropy_bracket(
    g: &Graph,
    dist: &[f64],
    n_max: usize,
    epsilon: f64,
    caps: &Caps,
) -> Result<EntropyBracket> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let mut d = dist.to_vec();
    pmf::validate_dist(&mut d, "vertex distribution")?;
    let mut notes = Vec::new();
    let mut chi_estimates = Vec::new();
    let mut hchi_estimates = Vec::new();
    for n in 1..=n_max {
        let power = and_power(g, n, caps)?;
        let block_dist = dist_power(&d, n);
        let (_, bits, tag) = min_entropy_coloring(&power, &block_dist, caps)?;
        if tag == Exactness::UpperBound {
            notes.push(format!("block chromatic entropy at n = {n} is heuristic"));
        }
        hchi_estimates.push((n, bits / n as f64));
        chi_estimates.push((n, chi_typical_estimate(g, &d, n, epsilon, caps)?));
    }
    let exact = if g.n_vertices() <= caps.perfection_vertices && is_perfect(g, caps)? {
        let (bits, _) = graph_entropy(g, &d, caps)?;
        notes.push("perfect graph: rate equals the graph entropy".into());
        Some(bits)
    } else {
        if g.n_vertices() > caps.perfection_vertices {
            notes.push("perfection not checked (vertex cap)".into());
        }
        None
    };
    let finite_upper = hchi_estimates
        .iter()
        .map(|&(_, b)| b)
        .fold(f64::INFINITY, f64::min);
    let (lower, upper) = match exact {
        Some(bits) => (bits, bits),
        None => {
            notes.push("lower bound is the trivial 0".into());
            (0.0, finite_upper)
        }
    };
    Ok(EntropyBracket {
        lower,
        upper,
        exact,
        chi_estimates,
        hchi_estimates,
        notes,
    })
}

/// Brackets the asymptotic per-letter coloring rate of the union
/// family: blocks must be colored properly for every graph in `gs` at
/// once. The rate equals the largest member rate; members that are
/// perfect contribute their graph entropy exactly.
pub fn union_rate_min(
    gs: &[Graph],
    dist: &[f64],
    n_max: usize,
    caps: &Caps,
) -> Result<EntropyBracket> {
    let Some(first) = gs.first() else {
        return Err(Error::InvalidArgument("no graphs".into()));
    };
    if gs.iter().any(|g| g.labels() != first.labels()) {
        return Err(Error::VertexMismatch);
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let mut d = dist.to_vec();
    pmf::validate_dist(&mut d, "vertex distribution")?;
    let mut notes = Vec::new();
    let mut lower = 0.0f64;
    let mut all_exact = true;
    for (i, g) in gs.iter().enumerate() {
        if g.n_vertices() <= caps.perfection_vertices && is_perfect(g, caps)? {
            let (bits, _) = graph_entropy(g, &d, caps)?;
            lower = lower.max(bits);
            notes.push(format!("member {i}: perfect, rate {bits:.6}"));
        } else {
            all_exact = false;
            notes.push(format!("member {i}: no closed form, lower contribution 0"));
        }
    }
    let mut hchi_estimates = Vec::new();
    for n in 1..=n_max {
        let mut combined = and_power(first, n, caps)?;
        for g in &gs[1..] {
            combined = union(&combined, &and_power(g, n, caps)?)?;
        }
        let block_dist = dist_power(&d, n);
        let (_, bits, tag) = min_entropy_coloring(&combined, &block_dist, caps)?;
        if tag == Exactness::UpperBound {
            notes.push(format!("block chromatic entropy at n = {n} is heuristic"));
        }
        hchi_estimates.push((n, bits / n as f64));
    }
    let finite_upper = hchi_estimates
        .iter()
        .map(|&(_, b)| b)
        .fold(f64::INFINITY, f64::min);
    let (exact, upper) = if all_exact {
        (Some(lower), lower)
    } else {
        (None, finite_upper)
    };
    Ok(EntropyBracket {
        lower,
        upper,
        exact,
        chi_estimates: Vec::new(),
        hchi_estimates,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confusion::one_receiver_graph;
    use crate::pmf::{entropy_of_dist, JointPmf};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn h2(p: f64) -> f64 {
        entropy_of_dist(&[p, 1.0 - p])
    }

    fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::new((0..n).map(|i| i.to_string()).collect(), &edges).unwrap()
    }

    fn random_dist(rng: &mut impl Rng, n: usize) -> Vec<f64> {
        let mut d: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.02).collect();
        let total: f64 = d.iter().sum();
        d.iter_mut().for_each(|v| *v /= total);
        d
    }

    #[test]
    fn chromatic_entropy_examples() {
        let caps = Caps::default();
        let dist = [0.4, 0.3, 0.2, 0.1];
        let (bits, _, _) = chromatic_entropy(&Graph::complete(4), &dist, &caps).unwrap();
        assert_relative_eq!(bits, entropy_of_dist(&dist), epsilon = 1e-12);
        let (bits, coloring, _) = chromatic_entropy(&Graph::edgeless(4), &dist, &caps).unwrap();
        assert_eq!((bits, coloring.color_count()), (0.0, 1));
        let path = Graph::new(
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 1), (1, 2)],
        )
        .unwrap();
        let (bits, _, _) = chromatic_entropy(&path, &[0.5, 0.25, 0.25], &caps).unwrap();
        assert_relative_eq!(bits, 0.811278, epsilon = 1e-6);
    }

    #[test]
    fn graph_entropy_complete_and_edgeless() {
        let caps = Caps::default();
        for m in 2..=5 {
            let dist = vec![1.0 / m as f64; m];
            let (bits, channel) = graph_entropy(&Graph::complete(m), &dist, &caps).unwrap();
            assert_relative_eq!(bits, (m as f64).log2(), epsilon = 1e-9);
            assert_eq!(channel.sets().len(), m);
        }
        let (bits, channel) = graph_entropy(&Graph::edgeless(4), &[0.1, 0.2, 0.3, 0.4], &caps).unwrap();
        assert_relative_eq!(bits, 0.0, epsilon = 1e-12);
        assert_eq!(channel.sets(), &[vec![0, 1, 2, 3]]);
    }

    #[test]
    fn graph_entropy_five_cycle() {
        // Known value for the uniform 5-cycle: log2(5/2).
        let caps = Caps::default();
        let (bits, _) = graph_entropy(&Graph::cycle(5), &[0.2; 5], &caps).unwrap();
        assert_relative_eq!(bits, 2.5f64.log2(), epsilon = 1e-6);
    }

    #[test]
    fn graph_entropy_matches_component_arithmetic() {
        // Disjoint unions of cliques: the optimizer must land on the
        // weighted per-component entropy sum, computed here directly.
        let caps = Caps::default();
        let mut rng = crate::seeded_rng(101, 0);
        for _ in 0..30 {
            let k = rng.gen_range(1..=3);
            let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=4)).collect();
            let n: usize = sizes.iter().sum();
            if n > 10 {
                continue;
            }
            let mut edges = Vec::new();
            let mut offset = 0;
            for &s in &sizes {
                for u in 0..s {
                    for v in u + 1..s {
                        edges.push((offset + u, offset + v));
                    }
                }
                offset += s;
            }
            let g = Graph::new((0..n).map(|i| i.to_string()).collect(), &edges).unwrap();
            let dist = random_dist(&mut rng, n);
            let mut oracle = 0.0;
            let mut offset = 0;
            for &s in &sizes {
                let mass: f64 = dist[offset..offset + s].iter().sum();
                let local: Vec<f64> = dist[offset..offset + s].iter().map(|p| p / mass).collect();
                oracle += mass * entropy_of_dist(&local);
                offset += s;
            }
            let (bits, _) = graph_entropy(&g, &dist, &caps).unwrap();
            assert_relative_eq!(bits, oracle, epsilon = 1e-6);
        }
    }

    #[test]
    fn objective_monotone_and_restart_independent() {
        let caps = Caps::default();
        let mut rng = crate::seeded_rng(103, 0);
        for _ in 0..5 {
            let n = rng.gen_range(3..=6);
            let g = random_graph(&mut rng, n, 0.5);
            let dist = random_dist(&mut rng, n);
            let (base, _, trace) = graph_entropy_detailed(&g, &dist, &caps, None).unwrap();
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "objective increased: {w:?}");
            }
            for seed in 0..10 {
                let (bits, _, _) =
                    graph_entropy_detailed(&g, &dist, &caps, Some(seed)).unwrap();
                assert!((bits - base).abs() < 1e-6, "restart {seed}: {bits} vs {base}");
            }
        }
    }

    #[test]
    fn graph_entropy_below_chromatic_entropy() {
        let caps = Caps::default();
        let mut rng = crate::seeded_rng(107, 0);
        for _ in 0..30 {
            let n = rng.gen_range(2..=8);
            let g = random_graph(&mut rng, n, 0.4);
            let dist = random_dist(&mut rng, n);
            let (hg, _) = graph_entropy(&g, &dist, &caps).unwrap();
            let (hchi, _, _) = chromatic_entropy(&g, &dist, &caps).unwrap();
            assert!(hg <= hchi + 1e-9, "H_G = {hg} > H_chi = {hchi}");
        }
    }

    /// Independent-set channels on a 0.05 grid (exhaustive when small,
    /// seeded samples otherwise), over ALL independent sets, not just
    /// maximal ones. The optimizer must not sit above any grid point.
    fn grid_check(g: &Graph, dist: &[f64], opt: f64, rng: &mut impl Rng) {
        let n = g.n_vertices();
        let mut sets: Vec<Vec<usize>> = Vec::new();
        for mask in 1u64..(1 << n) {
            let verts: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            let independent = verts
                .iter()
                .enumerate()
                .all(|(i, &u)| verts[i + 1..].iter().all(|&v| !g.has_edge(u, v)));
            if independent {
                sets.push(verts);
            }
        }
        let feasible: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                (0..sets.len())
                    .filter(|&k| sets[k].contains(&v))
                    .collect()
            })
            .collect();
        // Grid rows: per vertex, a composition of 20 ticks over its
        // feasible sets.
        fn compositions(ticks: usize, parts: usize) -> Vec<Vec<usize>> {
            if parts == 1 {
                return vec![vec![ticks]];
            }
            let mut out = Vec::new();
            for first in 0..=ticks {
                for mut rest in compositions(ticks - first, parts - 1) {
                    let mut row = vec![first];
                    row.append(&mut rest);
                    out.push(row);
                }
            }
            out
        }
        let row_choices: Vec<Vec<Vec<usize>>> = feasible
            .iter()
            .map(|f| compositions(20, f.len()))
            .collect();
        let total: u128 = row_choices.iter().map(|c| c.len() as u128).product();
        let evaluate = |choice: &[usize]| -> f64 {
            let mut q = vec![vec![0.0; sets.len()]; n];
            for v in 0..n {
                let ticks = &row_choices[v][choice[v]];
                for (j, &k) in feasible[v].iter().enumerate() {
                    q[v][k] = ticks[j] as f64 / 20.0;
                }
            }
            let channel = AuxiliaryChannel::new(g, sets.clone(), q).unwrap();
            channel.mutual_information(dist)
        };
        let mut grid_min = f64::INFINITY;
        if total <= 20_000 {
            let mut choice = vec![0usize; n];
            loop {
                grid_min = grid_min.min(evaluate(&choice));
                let mut v = n;
                let mut done = true;
                while v > 0 {
                    v -= 1;
                    choice[v] += 1;
                    if choice[v] < row_choices[v].len() {
                        done = false;
                        break;
                    }
                    choice[v] = 0;
                }
                if done {
                    break;
                }
            }
        } else {
            for _ in 0..2_000 {
                let choice: Vec<usize> = (0..n)
                    .map(|v| rng.gen_range(0..row_choices[v].len()))
                    .collect();
                grid_min = grid_min.min(evaluate(&choice));
            }
        }
        assert!(
            grid_min >= opt - 1e-3,
            "grid found {grid_min}, optimizer claims {opt}"
        );
    }

    #[test]
    fn grid_oracle_on_small_graphs() {
        let caps = Caps::default();
        let mut rng = crate::seeded_rng(109, 0);
        // All 64 labeled graphs on 4 vertices, uniform distribution.
        for mask in 0u32..64 {
            let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::new((0..4).map(|i| i.to_string()).collect(), &edges).unwrap();
            let dist = [0.25; 4];
            let (bits, _) = graph_entropy(&g, &dist, &caps).unwrap();
            grid_check(&g, &dist, bits, &mut rng);
        }
    }

    #[test]
    fn koerner_union_examples() {
        let caps = Caps::default();
        // Single component: its own graph entropy.
        let c5 = Graph::cycle(5);
        let bits = koerner_union(&[(c5.clone(), 1.0, vec![0.2; 5])], &caps).unwrap();
        assert_relative_eq!(bits, 2.5f64.log2(), epsilon = 1e-6);

        // Row cliques of DSBS(0.25): each row conditions to (0.75, 0.25).
        let bits = koerner_union(
            &[
                (Graph::complete(2), 0.5, vec![0.75, 0.25]),
                (Graph::complete(2), 0.5, vec![0.25, 0.75]),
            ],
            &caps,
        )
        .unwrap();
        assert_relative_eq!(bits, h2(0.25), epsilon = 1e-9);
        assert_relative_eq!(bits, 0.811278, epsilon = 1e-6);

        // Edgeless components contribute nothing.
        let bits = koerner_union(
            &[
                (Graph::edgeless(3), 0.6, vec![1.0 / 3.0; 3]),
                (Graph::edgeless(2), 0.4, vec![0.5, 0.5]),
            ],
            &caps,
        )
        .unwrap();
        assert_relative_eq!(bits, 0.0, epsilon = 1e-12);

        assert!(koerner_union(
            &[(Graph::complete(2), 0.7, vec![0.5, 0.5])],
            &caps
        )
        .is_err());
    }

    #[test]
    fn chromatic_entropy_subadditive_over_and_powers() {
        let caps = Caps::default();
        let mut rng = crate::seeded_rng(113, 0);
        let mut graphs_under_test = vec![Graph::complete(2), Graph::cycle(3)];
        for _ in 0..6 {
            let n = rng.gen_range(2..=4);
            graphs_under_test.push(random_graph(&mut rng, n, 0.5));
        }
        for g in &graphs_under_test {
            let dist = random_dist(&mut rng, g.n_vertices());
            let splits: &[(usize, usize)] = if g.n_vertices() == 2 {
                &[(1, 1), (1, 2)]
            } else {
                &[(1, 1)]
            };
            for &(m, n) in splits {
                let h = |k: usize| -> f64 {
                    let power = and_power(g, k, &caps).unwrap();
                    let block = dist_power(&dist, k);
                    min_entropy_coloring(&power, &block, &caps).unwrap().1
                };
                assert!(
                    h(m + n) <= h(m) + h(n) + 1e-9,
                    "split ({m},{n}) on {} vertices",
                    g.n_vertices()
                );
            }
        }
    }

    #[test]
    fn bracket_collapses_on_perfect_graphs() {
        let caps = Caps::default();
        for m in 2..=4 {
            let bracket = complementary_entropy_bracket(
                &Graph::complete(m),
                &vec![1.0 / m as f64; m],
                2,
                0.5,
                &caps,
            )
            .unwrap();
            let expected = (m as f64).log2();
            assert_relative_eq!(bracket.lower, expected, epsilon = 1e-9);
            assert_relative_eq!(bracket.upper, expected, epsilon = 1e-9);
            assert_relative_eq!(bracket.exact.unwrap(), expected, epsilon = 1e-9);
            assert!(bracket.lower <= bracket.upper + 1e-9);
        }
    }

    #[test]
    fn bracket_one_receiver_dsbs() {
        let caps = Caps::default();
        let pmf = JointPmf::new(vec![vec![0.375, 0.125], vec![0.125, 0.375]]).unwrap();
        let g = one_receiver_graph(&pmf);
        let bracket =
            complementary_entropy_bracket(&g, &pmf.support_dist(), 2, 0.5, &caps).unwrap();
        assert_relative_eq!(bracket.exact.unwrap(), h2(0.25), epsilon = 1e-6);
        assert_relative_eq!(bracket.exact.unwrap(), 0.811278, epsilon = 1e-6);
    }

    #[test]
    fn bracket_five_cycle_estimates_decrease() {
        let caps = Caps::default();
        // A wide-open epsilon keeps every tuple typical, so the
        // restricted chromatic numbers are the plain ones.
        let bracket =
            complementary_entropy_bracket(&Graph::cycle(5), &[0.2; 5], 2, 4.0, &caps).unwrap();
        assert!(bracket.exact.is_none());
        let chi: Vec<f64> = bracket
            .chi_estimates
            .iter()
            .map(|&(_, b)| b.expect("typical set nonempty"))
            .collect();
        assert_relative_eq!(chi[0], 3f64.log2(), epsilon = 1e-12);
        assert_relative_eq!(chi[1], 5f64.log2() / 2.0, epsilon = 1e-12);
        assert!(chi[1] < chi[0]);
        assert!(bracket.lower <= bracket.upper + 1e-9);
    }

    #[test]
    fn union_rate_examples() {
        let caps = Caps::default();
        // Single graph: same exact value as its own bracket.
        let single = union_rate_min(&[Graph::complete(3)], &[1.0 / 3.0; 3], 2, &caps).unwrap();
        assert_relative_eq!(single.exact.unwrap(), 3f64.log2(), epsilon = 1e-9);

        // Row and column cliques of DSBS(0.25) on the 4-cell support:
        // both perfect, both with rate h(0.25).
        let pmf = JointPmf::new(vec![vec![0.375, 0.125], vec![0.125, 0.375]]).unwrap();
        let labels: Vec<String> = ["(0,0)", "(0,1)", "(1,0)", "(1,1)"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let rows = Graph::new(labels.clone(), &[(0, 1), (2, 3)]).unwrap();
        let cols = Graph::new(labels, &[(0, 2), (1, 3)]).unwrap();
        let bracket =
            union_rate_min(&[rows.clone(), cols.clone()], &pmf.support_dist(), 2, &caps).unwrap();
        assert_relative_eq!(bracket.exact.unwrap(), h2(0.25), epsilon = 1e-6);

        // Asymmetric pmf: the row/column rates come out via the
        // component arithmetic, max = 0.6 h(1/3) + 0.4 h(1/2).
        let pmf = JointPmf::new(vec![vec![0.4, 0.2], vec![0.2, 0.2]]).unwrap();
        let labels: Vec<String> = ["(0,0)", "(0,1)", "(1,0)", "(1,1)"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let rows = Graph::new(labels.clone(), &[(0, 1), (2, 3)]).unwrap();
        let cols = Graph::new(labels, &[(0, 2), (1, 3)]).unwrap();
        let bracket =
            union_rate_min(&[rows, cols], &pmf.support_dist(), 2, &caps).unwrap();
        let oracle = 0.6 * entropy_of_dist(&[2.0 / 3.0, 1.0 / 3.0]) + 0.4;
        assert_relative_eq!(bracket.exact.unwrap(), oracle, epsilon = 1e-6);
        assert_relative_eq!(bracket.exact.unwrap(), 0.9509775004326937, epsilon = 1e-6);
        assert!(bracket.lower <= bracket.upper + 1e-9);

        assert!(matches!(
            union_rate_min(&[Graph::complete(2), Graph::complete(3)], &[0.5, 0.5], 1, &caps),
            Err(Error::VertexMismatch)
        ));
    }

    #[test]
    fn channel_validation() {
        let g = Graph::cycle(4);
        // Vertex 0 emitting a set not containing it.
        let sets = vec![vec![0, 2], vec![1, 3]];
        let bad = vec![
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ];
        assert!(AuxiliaryChannel::new(&g, sets.clone(), bad).is_err());
        // Non-independent set.
        assert!(AuxiliaryChannel::new(
            &g,
            vec![vec![0, 1]],
            vec![vec![1.0], vec![1.0], vec![0.0], vec![0.0]],
        )
        .is_err());
        let good = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ];
        let channel = AuxiliaryChannel::new(&g, sets, good).unwrap();
        // Deterministic diagonal channel on C4: W carries one bit.
        assert_relative_eq!(
            channel.mutual_information(&[0.25; 4]),
            1.0,
            epsilon = 1e-12
        );
    }
}
