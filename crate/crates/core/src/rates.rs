//! Broadcast-rate computations: the cut-set converse, closed forms for
//! complementary delivery and index coding, the vanishing-error rate
//! when it is known exactly, an achievable single-letter bound via
//! optimization over independent-set channels, and two-sided zero-error
//! bounds, assembled into a serializable report.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::confusion::{
    is_compatible, n_instance_graph, rooks_graph, FunctionPair, IndexCodingInstance,
};
use crate::gentropy::{graph_entropy, AuxiliaryChannel};
use crate::graphs::{maximal_independent_sets, min_entropy_coloring};
use crate::pmf::{
    conditional_entropy, entropy_of_dist, function_conditional_entropy, Axis, JointPmf,
};
use crate::{Caps, Error, Result};

/// max(H(Z1|X), H(Z2|Y)): what each receiver still needs about its own
/// function after seeing its side information. A converse for every
/// error regime.
pub fn cutset_bound(pmf: &JointPmf, fp: &FunctionPair) -> Result<f64> {
    fp.validate(pmf)?;
    let a = function_conditional_entropy(pmf, fp.f_table(), Axis::X)?;
    let b = function_conditional_entropy(pmf, fp.g_table(), Axis::Y)?;
    Ok(a.max(b))
}

/// Optimal zero-error rate when each receiver wants the other's
/// source: max(H(Y|X), H(X|Y)).
pub fn complementary_delivery_rate(pmf: &JointPmf) -> f64 {
    conditional_entropy(pmf, Axis::X).max(conditional_entropy(pmf, Axis::Y))
}

/// Optimal zero-error broadcast rate for an index-coding instance:
/// the largest conditional entropy of a receiver's missing sources
/// given its held ones.
pub fn index_coding_rate(inst: &IndexCodingInstance) -> Result<f64> {
    let mut rate = 0.0f64;
    for (i, held) in inst.receivers().iter().enumerate() {
        rate = rate.max(inst.sources().conditional_entropy(&inst.demand(i), held)?);
    }
    Ok(rate)
}

/// The vanishing-error rate in the two regimes where it is known in
/// closed form: compatible functions, or binary source alphabets. In
/// both it equals the cut-set bound; `None` otherwise.
pub fn eps_error_exact(pmf: &JointPmf, fp: &FunctionPair) -> Result<Option<f64>> {
    fp.validate(pmf)?;
    let binary = pmf.x_size() == 2 && pmf.y_size() == 2;
    if binary || is_compatible(pmf, fp)?.is_some() {
        Ok(Some(cutset_bound(pmf, fp)?))
    } else {
        Ok(None)
    }
}

/// (I(X;V|Y), I(Y;V|X)) for a channel given as one stochastic row per
/// support cell (row-major support order).
fn conditional_mi_pair(pmf: &JointPmf, rows: &[Vec<f64>]) -> (f64, f64) {
    let cells = pmf.support();
    let p = pmf.support_dist();
    let width = rows[0].len();
    let mut h_v_xy = 0.0;
    for (i, row) in rows.iter().enumerate() {
        h_v_xy += p[i] * entropy_of_dist(row);
    }
    let grouped = |pick: &dyn Fn(usize) -> usize, size: usize| -> f64 {
        let mut h = 0.0;
        for v in 0..size {
            let idx: Vec<usize> = (0..cells.len())
                .filter(|&i| pick(i) == v)
                .collect();
            let mass: f64 = idx.iter().map(|&i| p[i]).sum();
            if mass == 0.0 {
                continue;
            }
            let mut mix = vec![0.0; width];
            for &i in &idx {
                for (k, &q) in rows[i].iter().enumerate() {
                    mix[k] += p[i] * q / mass;
                }
            }
            h += mass * entropy_of_dist(&mix);
        }
        h
    };
    let h_v_y = grouped(&|i| cells[i].1, pmf.y_size());
    let h_v_x = grouped(&|i| cells[i].0, pmf.x_size());
    ((h_v_y - h_v_xy).max(0.0), (h_v_x - h_v_xy).max(0.0))
}

/// Evaluates max(I(X;V|Y), I(Y;V|X)) for a caller-supplied channel
/// p(v | x, y), one row per support cell in row-major support order.
///
/// This is an evaluation tool, not a bound: the value is a valid
/// converse only when the channel is induced by an actual code, so the
/// assembled report never uses it and keeps the cut-set bound as its
/// safe lower end.
pub fn converse_ro(pmf: &JointPmf, fp: &FunctionPair, channel: &[Vec<f64>]) -> Result<f64> {
    fp.validate(pmf)?;
    if channel.len() != pmf.support().len() {
        return Err(Error::InvalidChannel(
            "one row per support cell required".into(),
        ));
    }
    let width = channel[0].len();
    if width == 0 {
        return Err(Error::InvalidChannel("empty output alphabet".into()));
    }
    let mut rows = Vec::with_capacity(channel.len());
    for (i, row) in channel.iter().enumerate() {
        if row.len() != width {
            return Err(Error::InvalidChannel("ragged channel rows".into()));
        }
        let mut r = row.clone();
        crate::pmf::validate_dist(&mut r, &format!("channel row {i}"))
            .map_err(|_| Error::InvalidChannel(format!("row {i} is not a distribution")))?;
        rows.push(r);
    }
    let (a, b) = conditional_mi_pair(pmf, &rows);
    Ok(a.max(b))
}

/// Euclidean projection onto the probability simplex over the `active`
/// coordinates; everything else is zeroed.
fn project_row(row: &mut [f64], active: &[usize]) {
    let mut v: Vec<f64> = active.iter().map(|&k| row[k]).collect();
    let mut sorted = v.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (j, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if s - candidate > 0.0 {
            tau = candidate;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - tau).max(0.0);
    }
    for x in row.iter_mut() {
        *x = 0.0;
    }
    for (j, &k) in active.iter().enumerate() {
        row[k] = v[j];
    }
}

/// Ternary search for the best mixture of two channels; the objective
/// is convex along the segment.
fn best_mixture(
    pmf: &JointPmf,
    qa: &[Vec<f64>],
    qb: &[Vec<f64>],
) -> (f64, Vec<Vec<f64>>) {
    let mix = |lambda: f64| -> Vec<Vec<f64>> {
        qa.iter()
            .zip(qb)
            .map(|(ra, rb)| {
                ra.iter()
                    .zip(rb)
                    .map(|(&a, &b)| lambda * a + (1.0 - lambda) * b)
                    .collect()
            })
            .collect()
    };
    let value = |q: &[Vec<f64>]| -> f64 {
        let (a, b) = conditional_mi_pair(pmf, q);
        a.max(b)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..70 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if value(&mix(m1)) < value(&mix(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mut best = (value(qa), 1.0);
    for lambda in [0.0, 0.5 * (lo + hi)] {
        let v = value(&mix(lambda));
        if v < best.0 {
            best = (v, lambda);
        }
    }
    (best.0, mix(best.1))
}

/// Achievable single-letter rate: minimize max(I(X;U|Y), I(Y;U|X))
/// over channels sending each support cell into an independent set of
/// the confusion graph that contains it. Restriction to maximal sets
/// loses nothing (mapping a set to a fixed maximal superset is data
/// processing).
///
/// Three candidate searches, best value wins: the level sets of a
/// compatibility witness when one exists (these achieve the cut-set
/// bound exactly); exhaustive deterministic channels plus pairwise
/// time-sharing when the enumeration fits the cap; and projected
/// subgradient descent (step 0.5/sqrt(t), 5000 iterations, best
/// iterate, uniform start plus four seeded restarts). The cut-set
/// bound is a floor for every feasible channel, so the search stops as
/// soon as a candidate sits on it.
pub fn inner_bound_ri(
    pmf: &JointPmf,
    fp: &FunctionPair,
    caps: &Caps,
) -> Result<(f64, AuxiliaryChannel)> {
    let g = rooks_graph(pmf, fp)?;
    let n = g.n_vertices();
    let sets = maximal_independent_sets(&g, caps)?;
    let feasible: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            (0..sets.len())
                .filter(|&k| sets[k].binary_search(&v).is_ok())
                .collect()
        })
        .collect();
    let value = |q: &[Vec<f64>]| -> f64 {
        let (a, b) = conditional_mi_pair(pmf, q);
        a.max(b)
    };
    let floor = cutset_bound(pmf, fp)?;
    let on_floor = |v: f64| v <= floor + 1e-9;

    // Candidate: compatibility-witness level sets (deterministic, and
    // provably on the cut-set floor).
    let mut best: Option<(f64, Vec<Vec<usize>>, Vec<Vec<f64>>)> = None;
    if let Some(witness) = is_compatible(pmf, fp)? {
        let classes = witness.values_on_support(pmf);
        let mut ids: Vec<usize> = classes.clone();
        ids.sort_unstable();
        ids.dedup();
        let level_sets: Vec<Vec<usize>> = ids
            .iter()
            .map(|&c| (0..n).filter(|&v| classes[v] == c).collect())
            .collect();
        let cond: Vec<Vec<f64>> = (0..n)
            .map(|v| {
                let k = ids.iter().position(|&c| c == classes[v]).unwrap();
                let mut row = vec![0.0; ids.len()];
                row[k] = 1.0;
                row
            })
            .collect();
        let v = value(&cond);
        best = Some((v, level_sets, cond));
    }

    // Candidate: all deterministic assignments, then pairwise mixtures.
    let combos: f64 = feasible.iter().map(|f| f.len() as f64).product();
    if !best.as_ref().is_some_and(|b| on_floor(b.0))
        && combos <= caps.deterministic_channels as f64
    {
        let mut champions: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
        let mut choice = vec![0usize; n];
        loop {
            let q: Vec<Vec<f64>> = (0..n)
                .map(|v| {
                    let mut row = vec![0.0; sets.len()];
                    row[feasible[v][choice[v]]] = 1.0;
                    row
                })
                .collect();
            let v = value(&q);
            champions.push((v, q));
            champions.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            champions.truncate(6);
            let mut pos = n;
            let mut done = true;
            while pos > 0 {
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < feasible[pos].len() {
                    done = false;
                    break;
                }
                choice[pos] = 0;
            }
            if done {
                break;
            }
        }
        let mut local = champions[0].clone();
        for i in 0..champions.len() {
            for j in i + 1..champions.len() {
                let (v, q) = best_mixture(pmf, &champions[i].1, &champions[j].1);
                if v < local.0 {
                    local = (v, q);
                }
            }
        }
        if best.as_ref().is_none_or(|b| local.0 < b.0) {
            best = Some((local.0, sets.clone(), local.1));
        }
    }

    // Candidate: projected subgradient on the product of simplices.
    if !best.as_ref().is_some_and(|b| on_floor(b.0)) {
        let p = pmf.support_dist();
        let cells = pmf.support();
        let mut champion: Option<(f64, Vec<Vec<f64>>)> = None;
        for restart in 0..5u64 {
            let mut q: Vec<Vec<f64>> = (0..n)
                .map(|v| {
                    let mut row = vec![0.0; sets.len()];
                    let w = 1.0 / feasible[v].len() as f64;
                    for &k in &feasible[v] {
                        row[k] = w;
                    }
                    row
                })
                .collect();
            if restart > 0 {
                let mut rng = crate::seeded_rng(restart, 11);
                for (v, row) in q.iter_mut().enumerate() {
                    let mut total = 0.0;
                    for &k in &feasible[v] {
                        row[k] = rng.gen::<f64>() + 1e-3;
                        total += row[k];
                    }
                    for &k in &feasible[v] {
                        row[k] /= total;
                    }
                }
            }
            let mut since_improvement = 0usize;
            for t in 1..=5000usize {
                let (i_xy, i_yx) = conditional_mi_pair(pmf, &q);
                let v = i_xy.max(i_yx);
                if champion.as_ref().is_none_or(|c| v < c.0 - 1e-9) {
                    champion = Some((v, q.clone()));
                    since_improvement = 0;
                } else {
                    since_improvement += 1;
                    if since_improvement > 800 {
                        break;
                    }
                }
                if on_floor(v) {
                    break;
                }
                // Conditional output marginal of the active branch:
                // m(u | conditioning value), per cell.
                let conditioning: Vec<usize> = if i_xy >= i_yx {
                    cells.iter().map(|&(_, y)| y).collect()
                } else {
                    cells.iter().map(|&(x, _)| x).collect()
                };
                let groups = conditioning.iter().max().unwrap() + 1;
                let mut mass = vec![0.0; groups];
                let mut mix = vec![vec![0.0; sets.len()]; groups];
                for i in 0..n {
                    mass[conditioning[i]] += p[i];
                    for (k, &x) in q[i].iter().enumerate() {
                        mix[conditioning[i]][k] += p[i] * x;
                    }
                }
                let step = 0.5 / (t as f64).sqrt();
                for i in 0..n {
                    let m = &mix[conditioning[i]];
                    let total = mass[conditioning[i]];
                    for &k in &feasible[i] {
                        let marg = (m[k] / total).max(1e-12);
                        let grad = p[i] * (q[i][k].max(1e-12) / marg).log2();
                        q[i][k] -= step * grad;
                    }
                    project_row(&mut q[i], &feasible[i]);
                }
            }
            if champion.as_ref().is_some_and(|c| on_floor(c.0)) {
                break;
            }
        }
        let (v, q) = champion.expect("at least one iterate evaluated");
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, sets.clone(), q));
        }
    }

    let (bits, used_sets, cond) = best.expect("subgradient always produces a candidate");
    let channel = AuxiliaryChannel::new(&g, used_sets, cond)?;
    Ok((bits, channel))
}

/// (lower, upper) bounds on the zero-error broadcast rate: the cut-set
/// bound below, the confusion-graph entropy above.
pub fn zero_error_bounds(pmf: &JointPmf, fp: &FunctionPair, caps: &Caps) -> Result<(f64, f64)> {
    let lower = cutset_bound(pmf, fp)?;
    let g = rooks_graph(pmf, fp)?;
    let (upper, _) = graph_entropy(&g, &pmf.support_dist(), caps)?;
    Ok((lower, upper))
}

/// Everything this crate can say about one instance's rates.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    /// Zero-error rate when a closed form applies.
    pub zero_error_exact: Option<f64>,
    pub zero_error_lower: f64,
    pub zero_error_upper: f64,
    /// Vanishing-error rate when known exactly.
    pub eps_error_exact: Option<f64>,
    pub cutset: f64,
    /// Achievable single-letter bound; absent when enumeration caps
    /// prevent the optimization.
    pub inner_ri: Option<f64>,
    /// (n, per-letter chromatic entropy of the n-instance confusion
    /// graph): empirical upper estimates of the zero-error rate.
    pub block_upper_estimates: Vec<(usize, f64)>,
    /// How each number was obtained.
    pub methods: BTreeMap<String, String>,
}

/// True when the value depends only on the given coordinate and is
/// injective in it across the support.
fn relabels_axis(
    pmf: &JointPmf,
    value_at: &dyn Fn(usize, usize) -> Option<usize>,
    axis: Axis,
) -> bool {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    for &(x, y) in pmf.support() {
        let key = match axis {
            Axis::X => x,
            Axis::Y => y,
        };
        let Some(v) = value_at(x, y) else {
            return false;
        };
        match map.get(&key) {
            Some(&old) if old != v => return false,
            Some(_) => {}
            None => {
                map.insert(key, v);
            }
        }
    }
    let mut vals: Vec<usize> = map.values().copied().collect();
    vals.sort_unstable();
    vals.dedup();
    vals.len() == map.len()
}

fn constant_on_support(pmf: &JointPmf, value_at: &dyn Fn(usize, usize) -> Option<usize>) -> bool {
    let mut seen = None;
    for &(x, y) in pmf.support() {
        let Some(v) = value_at(x, y) else {
            return false;
        };
        match seen {
            Some(old) if old != v => return false,
            Some(_) => {}
            None => seen = Some(v),
        }
    }
    true
}

/// Assembles the full rate picture for one instance.
pub fn rate_report(pmf: &JointPmf, fp: &FunctionPair, caps: &Caps) -> Result<RateReport> {
    fp.validate(pmf)?;
    let mut methods = BTreeMap::new();
    let cutset = cutset_bound(pmf, fp)?;
    methods.insert(
        "cutset".into(),
        "max of the two function-conditional entropies".into(),
    );
    let (zero_error_lower, zero_error_upper) = zero_error_bounds(pmf, fp, caps)?;
    methods.insert("zero_error_lower".into(), "cut-set bound".into());
    methods.insert(
        "zero_error_upper".into(),
        "graph entropy of the confusion graph".into(),
    );

    let f_is_y = relabels_axis(pmf, &|x, y| fp.f_at(x, y), Axis::Y);
    let g_is_x = relabels_axis(pmf, &|x, y| fp.g_at(x, y), Axis::X);
    let f_const = constant_on_support(pmf, &|x, y| fp.f_at(x, y));
    let g_const = constant_on_support(pmf, &|x, y| fp.g_at(x, y));
    let zero_error_exact = if f_const && g_const {
        methods.insert("zero_error_exact".into(), "nothing demanded".into());
        Some(0.0)
    } else if f_is_y && g_is_x {
        methods.insert(
            "zero_error_exact".into(),
            "complementary delivery closed form".into(),
        );
        Some(complementary_delivery_rate(pmf))
    } else if f_is_y && g_const {
        methods.insert(
            "zero_error_exact".into(),
            "single-receiver closed form".into(),
        );
        Some(conditional_entropy(pmf, Axis::X))
    } else if g_is_x && f_const {
        methods.insert(
            "zero_error_exact".into(),
            "single-receiver closed form".into(),
        );
        Some(conditional_entropy(pmf, Axis::Y))
    } else {
        methods.insert("zero_error_exact".into(), "no closed form applies".into());
        None
    };

    let eps = eps_error_exact(pmf, fp)?;
    methods.insert(
        "eps_error_exact".into(),
        match eps {
            Some(_) if pmf.x_size() == 2 && pmf.y_size() == 2 => {
                "binary alphabets: equals the cut-set bound".into()
            }
            Some(_) => "compatible functions: equals the cut-set bound".into(),
            None => "conditions not met".into(),
        },
    );

    let inner_ri = match inner_bound_ri(pmf, fp, caps) {
        Ok((bits, _)) => {
            methods.insert(
                "inner_ri".into(),
                "min over witness/deterministic/subgradient channel candidates".into(),
            );
            Some(bits)
        }
        Err(Error::CapExceeded { what, .. }) => {
            methods.insert("inner_ri".into(), format!("skipped: {what} cap exceeded"));
            None
        }
        Err(e) => return Err(e),
    };

    let mut block_upper_estimates = Vec::new();
    let support = pmf.support().len();
    for blocklen in 1..=3usize {
        if support.pow(blocklen as u32) > 1000 {
            break;
        }
        match n_instance_graph(pmf, fp, blocklen, caps) {
            Ok(graph) => {
                let mut dist = vec![1.0];
                for _ in 0..blocklen {
                    let mut next = Vec::with_capacity(dist.len() * support);
                    for &a in &dist {
                        for &b in pmf.support_dist().iter() {
                            next.push(a * b);
                        }
                    }
                    dist = next;
                }
                let (_, bits, _) = min_entropy_coloring(&graph, &dist, caps)?;
                block_upper_estimates.push((blocklen, bits / blocklen as f64));
            }
            Err(Error::CapExceeded { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    methods.insert(
        "block_upper_estimates".into(),
        "per-letter chromatic entropy of the n-instance confusion graph".into(),
    );

    Ok(RateReport {
        zero_error_exact,
        zero_error_lower,
        zero_error_upper,
        eps_error_exact: eps,
        cutset,
        inner_ri,
        block_upper_estimates,
        methods,
    })
}
