//! Undirected graphs with bitset adjacency rows, plus the exact and
//! heuristic searches the rate computations rely on: AND/OR powers,
//! unions, maximal independent sets, cliques, chromatic number,
//! perfection, and minimum-entropy colorings.
//!
//! Exact searches use single-machine-word vertex masks and are capped
//! (see [`crate::Caps`]); heuristic paths are flagged
//! [`Exactness::UpperBound`]. All tie-breaking is lexicographic in
//! vertex order so results are reproducible.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use crate::{tuple_label, Caps, Error, Exactness, Result};

const WORD: usize = 64;

/// Simple undirected graph: ordered vertex labels and a symmetric,
/// irreflexive adjacency relation stored as bitset rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    adj: Vec<Vec<u64>>,
}

impl Graph {
    /// Builds a graph from labels and an edge list. Self-loops and
    /// out-of-range endpoints are rejected; duplicate edges collapse.
    pub fn new(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != n {
            return Err(Error::InvalidArgument("duplicate vertex label".into()));
        }
        let words = n.div_ceil(WORD);
        let mut adj = vec![vec![0u64; words]; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u},{v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            adj[u][v / WORD] |= 1 << (v % WORD);
            adj[v][u / WORD] |= 1 << (u % WORD);
        }
        Ok(Graph { labels, adj })
    }

    pub fn complete(m: usize) -> Self {
        let labels = (0..m).map(|i| i.to_string()).collect();
        let edges: Vec<(usize, usize)> = (0..m)
            .flat_map(|u| (u + 1..m).map(move |v| (u, v)))
            .collect();
        Graph::new(labels, &edges).unwrap()
    }

    pub fn edgeless(m: usize) -> Self {
        Graph::new((0..m).map(|i| i.to_string()).collect(), &[]).unwrap()
    }

    pub fn cycle(m: usize) -> Self {
        assert!(m >= 3, "cycle needs at least 3 vertices");
        let labels = (0..m).map(|i| i.to_string()).collect();
        let edges: Vec<(usize, usize)> = (0..m).map(|u| (u, (u + 1) % m)).collect();
        Graph::new(labels, &edges).unwrap()
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u][v / WORD] & (1 << (v % WORD)) != 0
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n_vertices()).filter(|&u| self.has_edge(v, u)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Edges as (u, v) pairs with u < v, lexicographically ordered.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_vertices();
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.has_edge(u, v))
            .collect()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(|row| row.iter().map(|w| w.count_ones() as usize).sum::<usize>()).sum::<usize>() / 2
    }

    /// Subgraph induced by `vertices` (ascending, deduplicated), keeping
    /// the original labels.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut verts: Vec<usize> = vertices.to_vec();
        verts.sort_unstable();
        verts.dedup();
        let labels = verts.iter().map(|&v| self.labels[v].clone()).collect();
        let mut edges = Vec::new();
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    edges.push((i, j));
                }
            }
        }
        Graph::new(labels, &edges).unwrap()
    }

    /// Adjacency rows as single words, available when |V| <= 64.
    fn word_rows(&self) -> Option<Vec<u64>> {
        if self.n_vertices() <= WORD {
            Some(self.adj.iter().map(|row| row.first().copied().unwrap_or(0)).collect())
        } else {
            None
        }
    }
}

/// Proper coloring of a graph: vertex -> color id, ids contiguous from
/// 0 in order of first appearance along the vertex order.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Coloring {
    assignment: Vec<usize>,
    color_count: usize,
}

impl Coloring {
    /// Normalizes an arbitrary color assignment to canonical contiguous
    /// ids (first appearance order).
    pub fn new(raw: Vec<usize>) -> Self {
        let mut remap: Vec<(usize, usize)> = Vec::new();
        let mut assignment = Vec::with_capacity(raw.len());
        for &c in &raw {
            let id = match remap.iter().find(|&&(old, _)| old == c) {
                Some(&(_, id)) => id,
                None => {
                    let id = remap.len();
                    remap.push((c, id));
                    id
                }
            };
            assignment.push(id);
        }
        Coloring {
            assignment,
            color_count: remap.len(),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn color(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn color_count(&self) -> usize {
        self.color_count
    }

    /// True when no edge of `g` is monochromatic.
    pub fn is_proper(&self, g: &Graph) -> bool {
        self.assignment.len() == g.n_vertices()
            && g.edges()
                .iter()
                .all(|&(u, v)| self.assignment[u] != self.assignment[v])
    }

    /// Total probability mass per color class.
    pub fn class_masses(&self, dist: &[f64]) -> Vec<f64> {
        let mut masses = vec![0.0; self.color_count];
        for (v, &c) in self.assignment.iter().enumerate() {
            masses[c] += dist[v];
        }
        masses
    }

    /// Entropy (bits) of the color of a vertex drawn from `dist`.
    pub fn entropy(&self, dist: &[f64]) -> f64 {
        crate::pmf::entropy_of_dist(&self.class_masses(dist))
    }
}

fn power_size(base: usize, n: usize, caps: &Caps) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidArgument("power exponent must be >= 1".into()));
    }
    let total = (base as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > caps.power_vertices as u128 {
        return Err(Error::CapExceeded {
            what: "graph power vertices",
            requested: total.min(usize::MAX as u128) as usize,
            limit: caps.power_vertices,
        });
    }
    Ok(total as usize)
}

fn tuple_of(index: usize, base: usize, n: usize) -> Vec<usize> {
    let mut idx = index;
    let mut out = vec![0usize; n];
    for k in (0..n).rev() {
        out[k] = idx % base;
        idx /= base;
    }
    out
}

fn power_graph(g: &Graph, n: usize, caps: &Caps, and_rule: bool) -> Result<Graph> {
    let base = g.n_vertices();
    let total = power_size(base, n, caps)?;
    if n == 1 {
        return Ok(g.clone());
    }
    let labels: Vec<String> = (0..total)
        .map(|i| {
            let t = tuple_of(i, base, n);
            let parts: Vec<&str> = t.iter().map(|&v| g.label(v)).collect();
            tuple_label(&parts)
        })
        .collect();
    let mut edges = Vec::new();
    for a in 0..total {
        let ta = tuple_of(a, base, n);
        for b in a + 1..total {
            let tb = tuple_of(b, base, n);
            let joined = if and_rule {
                ta.iter()
                    .zip(&tb)
                    .all(|(&u, &v)| u == v || g.has_edge(u, v))
            } else {
                ta.iter().zip(&tb).any(|(&u, &v)| g.has_edge(u, v))
            };
            if joined {
                edges.push((a, b));
            }
        }
    }
    Graph::new(labels, &edges)
}

/// n-fold AND power: distinct tuples joined when every coordinate pair
/// is equal or adjacent in the base graph.
pub fn and_power(g: &Graph, n: usize, caps: &Caps) -> Result<Graph> {
    power_graph(g, n, caps, true)
}

/// n-fold OR power: tuples joined when some coordinate pair is adjacent
/// in the base graph.
pub fn or_power(g: &Graph, n: usize, caps: &Caps) -> Result<Graph> {
    power_graph(g, n, caps, false)
}

/// Edge-set union of two graphs on the identical vertex list.
pub fn union(g1: &Graph, g2: &Graph) -> Result<Graph> {
    if g1.labels != g2.labels {
        return Err(Error::VertexMismatch);
    }
    let adj = g1
        .adj
        .iter()
        .zip(&g2.adj)
        .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| a | b).collect())
        .collect();
    Ok(Graph {
        labels: g1.labels.clone(),
        adj,
    })
}

fn mask_to_set(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::new();
    while mask != 0 {
        let v = mask.trailing_zeros() as usize;
        out.push(v);
        mask &= mask - 1;
    }
    out
}

/// All maximal independent sets, each ascending, the list
/// lexicographically sorted. Runs Bron–Kerbosch with pivoting on the
/// complement graph; capped at `caps.mis_vertices`.
pub fn maximal_independent_sets(g: &Graph, caps: &Caps) -> Result<Vec<Vec<usize>>> {
    let n = g.n_vertices();
    let limit = caps.mis_vertices.min(WORD);
    if n > limit {
        return Err(Error::CapExceeded {
            what: "maximal independent set enumeration",
            requested: n,
            limit,
        });
    }
    let full: u64 = if n == WORD { u64::MAX } else { (1 << n) - 1 };
    let rows = g.word_rows().unwrap();
    // Maximal independent sets of g are maximal cliques of its complement.
    let co: Vec<u64> = (0..n)
        .map(|v| full & !rows[v] & !(1u64 << v))
        .collect();
    let mut found = Vec::new();
    bron_kerbosch(&co, 0, full, 0, &mut found);
    let mut sets: Vec<Vec<usize>> = found.into_iter().map(mask_to_set).collect();
    sets.sort();
    Ok(sets)
}

fn bron_kerbosch(adj: &[u64], r: u64, p: u64, x: u64, out: &mut Vec<u64>) {
    if p == 0 && x == 0 {
        out.push(r);
        return;
    }
    let pivot = mask_to_set(p | x)
        .into_iter()
        .max_by_key(|&u| (p & adj[u]).count_ones())
        .unwrap();
    let mut cand = p & !adj[pivot];
    let mut p = p;
    let mut x = x;
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        let vb = 1u64 << v;
        bron_kerbosch(adj, r | vb, p & adj[v], x & adj[v], out);
        p &= !vb;
        x |= vb;
        cand &= !vb;
    }
}

fn exact_search_rows(g: &Graph, caps: &Caps, what: &'static str) -> Result<Vec<u64>> {
    let limit = caps.exact_search_vertices.min(WORD);
    if g.n_vertices() > limit {
        return Err(Error::CapExceeded {
            what,
            requested: g.n_vertices(),
            limit,
        });
    }
    Ok(g.word_rows().unwrap())
}

/// Exact clique number via branch-and-bound.
pub fn clique_number(g: &Graph, caps: &Caps) -> Result<usize> {
    let rows = exact_search_rows(g, caps, "exact clique search")?;
    let n = g.n_vertices();
    let full: u64 = if n == 0 {
        return Ok(0);
    } else if n == WORD {
        u64::MAX
    } else {
        (1 << n) - 1
    };
    let mut best = 0usize;
    clique_expand(&rows, full, 0, &mut best);
    Ok(best)
}

fn clique_expand(adj: &[u64], mut p: u64, r: usize, best: &mut usize) {
    if p == 0 {
        *best = (*best).max(r);
        return;
    }
    while p != 0 {
        if r + p.count_ones() as usize <= *best {
            return;
        }
        let v = p.trailing_zeros() as usize;
        clique_expand(adj, p & adj[v], r + 1, best);
        p &= p - 1;
    }
}

/// Exact chromatic number: branch-and-bound k-colorability between the
/// clique lower bound and the greedy upper bound.
pub fn chromatic_number(g: &Graph, caps: &Caps) -> Result<usize> {
    let rows = exact_search_rows(g, caps, "exact chromatic search")?;
    let n = g.n_vertices();
    if n == 0 {
        return Ok(0);
    }
    let lower = clique_number(g, caps)?;
    let greedy = greedy_coloring(g);
    let upper = greedy.color_count();
    // Order vertices by degree descending for faster contradiction.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (Reverse(rows[v].count_ones()), v));
    for k in lower..upper {
        if k_colorable(&rows, &order, k).is_some() {
            return Ok(k);
        }
    }
    Ok(upper)
}

fn k_colorable(rows: &[u64], order: &[usize], k: usize) -> Option<Vec<usize>> {
    if k == 0 {
        return if order.is_empty() { Some(Vec::new()) } else { None };
    }
    let mut colors = vec![usize::MAX; rows.len()];
    if color_rec(rows, order, k, 0, 0, &mut colors) {
        Some(colors)
    } else {
        None
    }
}

fn color_rec(
    rows: &[u64],
    order: &[usize],
    k: usize,
    pos: usize,
    used: usize,
    colors: &mut Vec<usize>,
) -> bool {
    if pos == order.len() {
        return true;
    }
    let v = order[pos];
    let mut forbidden = 0u64;
    for u in mask_to_set(rows[v]) {
        if colors[u] != usize::MAX {
            forbidden |= 1 << colors[u];
        }
    }
    // Symmetry break: a fresh color id only as the next unused one.
    let limit = k.min(used + 1);
    for c in 0..limit {
        if forbidden & (1 << c) != 0 {
            continue;
        }
        colors[v] = c;
        if color_rec(rows, order, k, pos + 1, used.max(c + 1), colors) {
            return true;
        }
    }
    colors[v] = usize::MAX;
    false
}

/// DSATUR greedy coloring: highest saturation first, ties by degree
/// then lowest index. Proper for any graph; color count is an upper
/// bound on the chromatic number.
pub fn greedy_coloring(g: &Graph) -> Coloring {
    let n = g.n_vertices();
    let mut colors = vec![usize::MAX; n];
    let mut neighbor_colors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| colors[v] == usize::MAX)
            .max_by_key(|&v| (neighbor_colors[v].len(), g.degree(v), Reverse(v)))
            .unwrap();
        let mut c = 0;
        while neighbor_colors[v].contains(&c) {
            c += 1;
        }
        colors[v] = c;
        for u in g.neighbors(v) {
            neighbor_colors[u].insert(c);
        }
    }
    Coloring::new(colors)
}

/// True iff every induced subgraph has equal clique and chromatic
/// numbers. Exhaustive over the 2^|V| induced subgraphs; capped at
/// `caps.perfection_vertices`.
pub fn is_perfect(g: &Graph, caps: &Caps) -> Result<bool> {
    let n = g.n_vertices();
    let limit = caps.perfection_vertices.min(WORD);
    if n > limit {
        return Err(Error::CapExceeded {
            what: "perfection check",
            requested: n,
            limit,
        });
    }
    let relaxed = Caps {
        exact_search_vertices: WORD,
        ..caps.clone()
    };
    for mask in 1u64..(1 << n) {
        let verts = mask_to_set(mask);
        let sub = g.induced(&verts);
        if clique_number(&sub, &relaxed)? != chromatic_number(&sub, &relaxed)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A proper coloring minimizing the entropy of the color of a random
/// vertex, together with that entropy in bits.
///
/// Exact branch-and-bound when |V| is within
/// `caps.exact_coloring_vertices`; otherwise DSATUR followed by
/// steepest-descent color merges, flagged as an upper bound.
pub fn min_entropy_coloring(
    g: &Graph,
    dist: &[f64],
    caps: &Caps,
) -> Result<(Coloring, f64, Exactness)> {
    if dist.len() != g.n_vertices() {
        return Err(Error::InvalidArgument(
            "distribution length does not match vertex count".into(),
        ));
    }
    let mut d = dist.to_vec();
    crate::pmf::validate_dist(&mut d, "vertex distribution")?;
    let heuristic = merge_colors(g, &greedy_coloring(g), &d);
    let heur_h = heuristic.entropy(&d);
    if g.n_vertices() > caps.exact_coloring_vertices {
        return Ok((heuristic, heur_h, Exactness::UpperBound));
    }
    let (coloring, h) = exact_min_entropy(g, &d, heuristic, heur_h);
    Ok((coloring, h, Exactness::Exact))
}

/// Steepest-descent improvement: repeatedly merge the pair of color
/// classes with no crossing edge whose merge removes the most entropy.
fn merge_colors(g: &Graph, coloring: &Coloring, dist: &[f64]) -> Coloring {
    let mut assign = coloring.assignment().to_vec();
    let mut count = coloring.color_count();
    loop {
        let masses = Coloring::new(assign.clone()).class_masses(dist);
        let mergeable = |a: usize, b: usize| -> bool {
            !g.edges()
                .iter()
                .any(|&(u, v)| (assign[u] == a && assign[v] == b) || (assign[u] == b && assign[v] == a))
        };
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..count {
            for b in a + 1..count {
                if !mergeable(a, b) {
                    continue;
                }
                let (ma, mb) = (masses[a], masses[b]);
                let total = ma + mb;
                let drop = if total > 0.0 && ma > 0.0 && mb > 0.0 {
                    total * binary_entropy(ma / total)
                } else {
                    0.0
                };
                let better = match best {
                    None => true,
                    Some((d, _, _)) => drop > d + 1e-15,
                };
                if better {
                    best = Some((drop, a, b));
                }
            }
        }
        match best {
            Some((_, a, b)) => {
                for c in assign.iter_mut() {
                    if *c == b {
                        *c = a;
                    }
                }
                count -= 1;
                assign = Coloring::new(assign).assignment().to_vec();
            }
            None => return Coloring::new(assign),
        }
    }
}

fn binary_entropy(p: f64) -> f64 {
    let term = |v: f64| if v > 0.0 { -v * v.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

fn exact_min_entropy(
    g: &Graph,
    dist: &[f64],
    incumbent: Coloring,
    incumbent_h: f64,
) -> (Coloring, f64) {
    let n = g.n_vertices();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        dist[b]
            .partial_cmp(&dist[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut state = MecState {
        g,
        dist,
        order,
        best_assign: incumbent.assignment().to_vec(),
        best_h: incumbent_h,
        assign: vec![usize::MAX; n],
        masses: Vec::new(),
    };
    let total: f64 = dist.iter().sum();
    mec_rec(&mut state, 0, total);
    (Coloring::new(state.best_assign), state.best_h)
}

struct MecState<'a> {
    g: &'a Graph,
    dist: &'a [f64],
    order: Vec<usize>,
    best_assign: Vec<usize>,
    best_h: f64,
    assign: Vec<usize>,
    masses: Vec<f64>,
}

fn mec_rec(s: &mut MecState, pos: usize, remaining: f64) {
    // Any completion's class masses are majorized by piling the rest of
    // the mass onto the currently largest class, so that vector's
    // entropy lower-bounds every completion reachable from here.
    let mut lb_masses = s.masses.clone();
    if remaining > 0.0 {
        if let Some(m) = lb_masses
            .iter_mut()
            .max_by(|a, b| a.partial_cmp(b).unwrap())
        {
            *m += remaining;
        } else {
            lb_masses.push(remaining);
        }
    }
    if crate::pmf::entropy_of_dist(&lb_masses) >= s.best_h - 1e-12 {
        return;
    }
    if pos == s.order.len() {
        let h = crate::pmf::entropy_of_dist(&s.masses);
        if h < s.best_h - 1e-12 {
            s.best_h = h;
            s.best_assign = s.assign.clone();
        }
        return;
    }
    let v = s.order[pos];
    let open = s.masses.len();
    for c in 0..=open {
        if c < open {
            let conflict = s
                .g
                .neighbors(v)
                .into_iter()
                .any(|u| s.assign[u] == c);
            if conflict {
                continue;
            }
            s.masses[c] += s.dist[v];
        } else {
            s.masses.push(s.dist[v]);
        }
        s.assign[v] = c;
        mec_rec(s, pos + 1, remaining - s.dist[v]);
        s.assign[v] = usize::MAX;
        if c < open {
            s.masses[c] -= s.dist[v];
        } else {
            s.masses.pop();
        }
    }
}

/// DOT rendering of a graph, one edge per line, vertices listed first.
pub fn to_dot(g: &Graph) -> String {
    let escape = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
    let mut out = String::from("graph {\n");
    for v in 0..g.n_vertices() {
        out.push_str(&format!("  \"{}\";\n", escape(g.label(v))));
    }
    for (u, v) in g.edges() {
        out.push_str(&format!(
            "  \"{}\" -- \"{}\";\n",
            escape(g.label(u)),
            escape(g.label(v))
        ));
    }
    out.push_str("}\n");
    out
}
