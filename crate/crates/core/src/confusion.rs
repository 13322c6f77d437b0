//! Confusion graphs for two-function broadcast instances: the modified
//! rook's graph on the joint support, its n-instance extension, the
//! complementary-delivery and single-receiver specializations, the
//! compatibility test between the two requested functions, and the
//! receiver-indexed confusion graph for index coding.

use crate::graphs::Graph;
use crate::pmf::{JointPmf, MultiPmf};
use crate::{tuple_label, Caps, Error, Result};

/// Value per (x, y) cell; `None` allowed (and ignored) off-support.
pub type FunctionTable = Vec<Vec<Option<usize>>>;

/// The two functions the receivers want, tabulated over the joint
/// alphabet. Tables must be total on the support of the pmf they are
/// used with; off-support cells may be `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionPair {
    f: FunctionTable,
    g: FunctionTable,
    z1_labels: Option<Vec<String>>,
    z2_labels: Option<Vec<String>>,
}

impl FunctionPair {
    pub fn new(f: FunctionTable, g: FunctionTable) -> Self {
        FunctionPair {
            f,
            g,
            z1_labels: None,
            z2_labels: None,
        }
    }

    pub fn with_z_labels(mut self, z1: Vec<String>, z2: Vec<String>) -> Self {
        self.z1_labels = Some(z1);
        self.z2_labels = Some(z2);
        self
    }

    /// First function = the other source (Z1 = Y, Z2 = X).
    pub fn complementary(x_size: usize, y_size: usize) -> Self {
        let f = (0..x_size)
            .map(|_| (0..y_size).map(Some).collect())
            .collect();
        let g = (0..x_size)
            .map(|x| vec![Some(x); y_size])
            .collect();
        FunctionPair::new(f, g)
    }

    /// Single active receiver: Z1 = Y, Z2 constant (nothing demanded).
    pub fn one_receiver(x_size: usize, y_size: usize) -> Self {
        let f = (0..x_size)
            .map(|_| (0..y_size).map(Some).collect())
            .collect();
        let g = vec![vec![Some(0); y_size]; x_size];
        FunctionPair::new(f, g)
    }

    pub fn f_table(&self) -> &FunctionTable {
        &self.f
    }

    pub fn g_table(&self) -> &FunctionTable {
        &self.g
    }

    pub fn f_at(&self, x: usize, y: usize) -> Option<usize> {
        self.f.get(x).and_then(|row| row.get(y)).copied().flatten()
    }

    pub fn g_at(&self, x: usize, y: usize) -> Option<usize> {
        self.g.get(x).and_then(|row| row.get(y)).copied().flatten()
    }

    pub fn z1_label(&self, v: usize) -> String {
        match &self.z1_labels {
            Some(l) if v < l.len() => l[v].clone(),
            _ => v.to_string(),
        }
    }

    pub fn z2_label(&self, v: usize) -> String {
        match &self.z2_labels {
            Some(l) if v < l.len() => l[v].clone(),
            _ => v.to_string(),
        }
    }

    /// Checks both tables cover the pmf's shape and support.
    pub fn validate(&self, pmf: &JointPmf) -> Result<()> {
        for (name, table) in [("first", &self.f), ("second", &self.g)] {
            if table.len() != pmf.x_size() || table.iter().any(|r| r.len() != pmf.y_size()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} function table shape does not match the pmf"
                )));
            }
            for &(x, y) in pmf.support() {
                if table[x][y].is_none() {
                    return Err(Error::TableGap { x, y });
                }
            }
        }
        Ok(())
    }
}

fn support_labels(pmf: &JointPmf) -> Vec<String> {
    pmf.support()
        .iter()
        .map(|&(x, y)| tuple_label(&[pmf.x_label(x), pmf.y_label(y)]))
        .collect()
}

/// Confusion graph on the support cells: two cells are adjacent when
/// they share a row and the first function differs, or share a column
/// and the second function differs. A subgraph of the rook's graph of
/// the support grid.
pub fn rooks_graph(pmf: &JointPmf, fp: &FunctionPair) -> Result<Graph> {
    fp.validate(pmf)?;
    let cells = pmf.support();
    let mut edges = Vec::new();
    for (i, &(x1, y1)) in cells.iter().enumerate() {
        for (j, &(x2, y2)) in cells.iter().enumerate().skip(i + 1) {
            let f_split = x1 == x2 && fp.f_at(x1, y1) != fp.f_at(x2, y2);
            let g_split = y1 == y2 && fp.g_at(x1, y1) != fp.g_at(x2, y2);
            if f_split || g_split {
                edges.push((i, j));
            }
        }
    }
    Graph::new(support_labels(pmf), &edges)
}

/// Confusion graph over n-instance blocks: vertices are length-n
/// tuples of support cells; two blocks are adjacent when the x-blocks
/// coincide and some coordinate's first-function value differs, or the
/// y-blocks coincide and some second-function value differs.
pub fn n_instance_graph(
    pmf: &JointPmf,
    fp: &FunctionPair,
    n: usize,
    caps: &Caps,
) -> Result<Graph> {
    fp.validate(pmf)?;
    if n == 0 {
        return Err(Error::InvalidArgument("block length must be >= 1".into()));
    }
    if n == 1 {
        return rooks_graph(pmf, fp);
    }
    let cells = pmf.support();
    let total = (cells.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > caps.power_vertices as u128 {
        return Err(Error::CapExceeded {
            what: "n-instance confusion graph vertices",
            requested: total.min(usize::MAX as u128) as usize,
            limit: caps.power_vertices,
        });
    }
    let total = total as usize;
    let cell_labels = support_labels(pmf);
    let tuple_at = |mut idx: usize| -> Vec<usize> {
        let mut t = vec![0usize; n];
        for k in (0..n).rev() {
            t[k] = idx % cells.len();
            idx /= cells.len();
        }
        t
    };
    let labels: Vec<String> = (0..total)
        .map(|i| {
            let t = tuple_at(i);
            let parts: Vec<&str> = t.iter().map(|&c| cell_labels[c].as_str()).collect();
            tuple_label(&parts)
        })
        .collect();
    let tuples: Vec<Vec<usize>> = (0..total).map(tuple_at).collect();
    let mut edges = Vec::new();
    for a in 0..total {
        for b in a + 1..total {
            let (ta, tb) = (&tuples[a], &tuples[b]);
            let same_x = ta.iter().zip(tb).all(|(&ca, &cb)| cells[ca].0 == cells[cb].0);
            let f_split = same_x
                && ta.iter().zip(tb).any(|(&ca, &cb)| {
                    fp.f_at(cells[ca].0, cells[ca].1) != fp.f_at(cells[cb].0, cells[cb].1)
                });
            if f_split {
                edges.push((a, b));
                continue;
            }
            let same_y = ta.iter().zip(tb).all(|(&ca, &cb)| cells[ca].1 == cells[cb].1);
            let g_split = same_y
                && ta.iter().zip(tb).any(|(&ca, &cb)| {
                    fp.g_at(cells[ca].0, cells[ca].1) != fp.g_at(cells[cb].0, cells[cb].1)
                });
            if g_split {
                edges.push((a, b));
            }
        }
    }
    Graph::new(labels, &edges)
}

/// Confusion graph when each receiver wants the other's source: cells
/// adjacent iff they share exactly one coordinate.
pub fn complementary_delivery_graph(pmf: &JointPmf) -> Graph {
    rooks_graph(pmf, &FunctionPair::complementary(pmf.x_size(), pmf.y_size()))
        .expect("total tables cannot fail validation")
}

/// Confusion graph with a single receiver holding X and wanting Y:
/// disjoint union of row cliques.
pub fn one_receiver_graph(pmf: &JointPmf) -> Graph {
    rooks_graph(pmf, &FunctionPair::one_receiver(pmf.x_size(), pmf.y_size()))
        .expect("total tables cannot fail validation")
}

/// A single function whose confusion graph reproduces the pair's.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityWitness {
    h_table: FunctionTable,
    class_count: usize,
}

impl CompatibilityWitness {
    pub fn h_table(&self) -> &FunctionTable {
        &self.h_table
    }

    pub fn h_at(&self, x: usize, y: usize) -> Option<usize> {
        self.h_table.get(x).and_then(|r| r.get(y)).copied().flatten()
    }

    /// Number of distinct values the witness takes on the support.
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Witness values per support cell, aligned with `pmf.support()`.
    pub fn values_on_support(&self, pmf: &JointPmf) -> Vec<usize> {
        pmf.support()
            .iter()
            .map(|&(x, y)| self.h_at(x, y).expect("witness total on support"))
            .collect()
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.0[v] != v {
            self.0[v] = self.0[self.0[v]];
            v = self.0[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Smaller root wins, keeping class ids stable in support order.
        if ra < rb {
            self.0[rb] = ra;
        } else {
            self.0[ra] = rb;
        }
    }
}

/// Decides whether a single function h can replace the pair: merges
/// support cells forced to share an h-value (same row with equal first
/// function, same column with equal second function), closes
/// transitively, and accepts iff the resulting single-function graph
/// matches the pair's graph edge for edge.
pub fn is_compatible(pmf: &JointPmf, fp: &FunctionPair) -> Result<Option<CompatibilityWitness>> {
    let target = rooks_graph(pmf, fp)?;
    let cells = pmf.support();
    let mut dsu = Dsu::new(cells.len());
    for (i, &(x1, y1)) in cells.iter().enumerate() {
        for (j, &(x2, y2)) in cells.iter().enumerate().skip(i + 1) {
            if (x1 == x2 && fp.f_at(x1, y1) == fp.f_at(x2, y2))
                || (y1 == y2 && fp.g_at(x1, y1) == fp.g_at(x2, y2))
            {
                dsu.union(i, j);
            }
        }
    }
    // Canonical class ids in first-occurrence (row-major) order.
    let mut ids: Vec<Option<usize>> = vec![None; cells.len()];
    let mut next = 0usize;
    let mut h_values = vec![0usize; cells.len()];
    for i in 0..cells.len() {
        let root = dsu.find(i);
        let id = match ids[root] {
            Some(id) => id,
            None => {
                let id = next;
                ids[root] = Some(id);
                next += 1;
                id
            }
        };
        h_values[i] = id;
    }
    let mut h_table: FunctionTable = vec![vec![None; pmf.y_size()]; pmf.x_size()];
    for (i, &(x, y)) in cells.iter().enumerate() {
        h_table[x][y] = Some(h_values[i]);
    }
    let candidate = FunctionPair::new(h_table.clone(), h_table.clone());
    let achieved = rooks_graph(pmf, &candidate)?;
    if achieved == target {
        Ok(Some(CompatibilityWitness {
            h_table,
            class_count: next,
        }))
    } else {
        Ok(None)
    }
}

/// Index-coding instance: K jointly distributed sources and, per
/// receiver, the set of sources it already holds; each receiver wants
/// every source it does not hold.
#[derive(Debug, Clone)]
pub struct IndexCodingInstance {
    sources: MultiPmf,
    receivers: Vec<Vec<usize>>,
}

impl IndexCodingInstance {
    pub fn new(sources: MultiPmf, receivers: Vec<Vec<usize>>) -> Result<Self> {
        if receivers.is_empty() {
            return Err(Error::InvalidInstance("no receivers".into()));
        }
        let k = sources.num_sources();
        let receivers: Vec<Vec<usize>> = receivers
            .into_iter()
            .map(|mut h| {
                h.sort_unstable();
                h.dedup();
                h
            })
            .collect();
        for h in &receivers {
            if h.iter().any(|&s| s >= k) {
                return Err(Error::InvalidInstance(format!(
                    "receiver holds source index out of range (K = {k})"
                )));
            }
        }
        Ok(IndexCodingInstance { sources, receivers })
    }

    pub fn sources(&self) -> &MultiPmf {
        &self.sources
    }

    /// Side-information sets H(i), sorted and deduplicated.
    pub fn receivers(&self) -> &[Vec<usize>] {
        &self.receivers
    }

    /// Sources receiver i demands: the complement of H(i).
    pub fn demand(&self, i: usize) -> Vec<usize> {
        (0..self.sources.num_sources())
            .filter(|s| !self.receivers[i].contains(s))
            .collect()
    }
}

/// Union over receivers of the block-confusion graphs: two n-blocks of
/// joint source symbols are adjacent when some receiver sees the same
/// side information in every instance yet the blocks differ (hence
/// differ in that receiver's demand).
pub fn index_confusion_graph(
    inst: &IndexCodingInstance,
    n: usize,
    caps: &Caps,
) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument("block length must be >= 1".into()));
    }
    let cells = inst.sources().support();
    let total = (cells.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > caps.power_vertices as u128 {
        return Err(Error::CapExceeded {
            what: "index confusion graph vertices",
            requested: total.min(usize::MAX as u128) as usize,
            limit: caps.power_vertices,
        });
    }
    let total = total as usize;
    let symbols: Vec<Vec<usize>> = cells.iter().map(|&c| inst.sources().unravel(c)).collect();
    let cell_labels: Vec<String> = symbols
        .iter()
        .map(|syms| {
            let parts: Vec<String> = syms
                .iter()
                .enumerate()
                .map(|(s, &v)| inst.sources().label(s, v).to_string())
                .collect();
            let refs: Vec<&str> = parts.iter().map(|p| p.as_str()).collect();
            tuple_label(&refs)
        })
        .collect();
    let tuple_at = |mut idx: usize| -> Vec<usize> {
        let mut t = vec![0usize; n];
        for k in (0..n).rev() {
            t[k] = idx % cells.len();
            idx /= cells.len();
        }
        t
    };
    let labels: Vec<String> = (0..total)
        .map(|i| {
            let t = tuple_at(i);
            if n == 1 {
                cell_labels[t[0]].clone()
            } else {
                let parts: Vec<&str> = t.iter().map(|&c| cell_labels[c].as_str()).collect();
                tuple_label(&parts)
            }
        })
        .collect();
    let tuples: Vec<Vec<usize>> = (0..total).map(tuple_at).collect();
    let mut edges = Vec::new();
    for a in 0..total {
        for b in a + 1..total {
            let confusable = inst.receivers().iter().any(|held| {
                tuples[a].iter().zip(&tuples[b]).all(|(&ca, &cb)| {
                    held.iter().all(|&s| symbols[ca][s] == symbols[cb][s])
                })
            });
            if confusable {
                edges.push((a, b));
            }
        }
    }
    Graph::new(labels, &edges)
}
