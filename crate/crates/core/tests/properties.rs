//! Structural invariants checked over randomly generated instances.

use proptest::prelude::*;

use zecast::codec::{build_zero_error_code, measured_rate, verify_zero_error};
use zecast::confusion::{
    complementary_delivery_graph, one_receiver_graph, rooks_graph, FunctionPair, FunctionTable,
};
use zecast::graphs::{and_power, maximal_independent_sets, min_entropy_coloring, union, Graph};
use zecast::pmf::{conditional_entropy, entropy_of_dist, Axis, JointPmf};
use zecast::rates::zero_error_bounds;
use zecast::Caps;

fn build_graph(m: usize, mask: u32) -> Graph {
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
        .collect();
    let edges: Vec<(usize, usize)> = pairs
        .iter()
        .enumerate()
        .filter(|&(i, _)| mask >> i & 1 == 1)
        .map(|(_, &e)| e)
        .collect();
    Graph::new((0..m).map(|v| v.to_string()).collect(), &edges).unwrap()
}

/// Joint pmf over an `xs` by `ys` rectangle, masking cells out of the
/// support (cell (0,0) is forced back in if the mask kills everything).
fn pmf_from(xs: usize, ys: usize, weights: &[f64], support: &[bool]) -> JointPmf {
    let mut rows = vec![vec![0.0; ys]; xs];
    let mut any = false;
    for x in 0..xs {
        for y in 0..ys {
            if support[x * ys + y] {
                rows[x][y] = weights[x * ys + y];
                any = true;
            }
        }
    }
    if !any {
        rows[0][0] = weights[0];
    }
    let total: f64 = rows.iter().flatten().sum();
    for row in rows.iter_mut() {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    JointPmf::new(rows).unwrap()
}

fn table_from(xs: usize, ys: usize, vals: &[usize], z: usize) -> FunctionTable {
    (0..xs)
        .map(|x| (0..ys).map(|y| Some(vals[x * ys + y] % z)).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn and_power_block_counts(m in 1usize..=4, mask in any::<u32>(), n in 1usize..=3) {
        let caps = Caps::default();
        let g = build_graph(m, mask);
        let p = and_power(&g, n, &caps).unwrap();
        prop_assert_eq!(p.n_vertices(), g.n_vertices().pow(n as u32));
        let full = m * (m - 1) / 2;
        if g.n_edges() == full {
            let bn = p.n_vertices();
            prop_assert_eq!(p.n_edges(), bn * (bn - 1) / 2);
        }
        if g.n_edges() == 0 {
            prop_assert_eq!(p.n_edges(), 0);
        }
    }

    #[test]
    fn union_is_edgewise_or(m in 1usize..=5, a in any::<u16>(), b in any::<u16>()) {
        let g1 = build_graph(m, a as u32);
        let g2 = build_graph(m, b as u32);
        let u = union(&g1, &g2).unwrap();
        for x in 0..m {
            for y in x + 1..m {
                prop_assert_eq!(u.has_edge(x, y), g1.has_edge(x, y) || g2.has_edge(x, y));
            }
        }
    }

    #[test]
    fn rook_edges_stay_axis_aligned(
        xs in 1usize..=3, ys in 1usize..=3,
        weights in prop::collection::vec(0.05f64..1.0, 9),
        support in prop::collection::vec(any::<bool>(), 9),
        f_vals in prop::collection::vec(0usize..3, 9),
        g_vals in prop::collection::vec(0usize..3, 9),
        z in 1usize..=3,
    ) {
        let pmf = pmf_from(xs, ys, &weights, &support);
        let fp = FunctionPair::new(
            table_from(xs, ys, &f_vals, z),
            table_from(xs, ys, &g_vals, z),
        );
        let g = rooks_graph(&pmf, &fp).unwrap();
        let cells = pmf.support();
        for a in 0..cells.len() {
            for b in a + 1..cells.len() {
                let (xa, ya) = cells[a];
                let (xb, yb) = cells[b];
                let row_conflict = xa == xb && fp.f_at(xa, ya) != fp.f_at(xb, yb);
                let col_conflict = ya == yb && fp.g_at(xa, ya) != fp.g_at(xb, yb);
                prop_assert_eq!(g.has_edge(a, b), row_conflict || col_conflict);
            }
        }
    }

    #[test]
    fn complementary_graph_is_receiver_union(
        xs in 1usize..=3, ys in 1usize..=3,
        weights in prop::collection::vec(0.05f64..1.0, 9),
        support in prop::collection::vec(any::<bool>(), 9),
    ) {
        let pmf = pmf_from(xs, ys, &weights, &support);
        let rows = one_receiver_graph(&pmf);
        let cols_fp = FunctionPair::new(
            vec![vec![Some(0); ys]; xs],
            (0..xs).map(|x| vec![Some(x); ys]).collect(),
        );
        let cols = rooks_graph(&pmf, &cols_fp).unwrap();
        prop_assert_eq!(complementary_delivery_graph(&pmf), union(&rows, &cols).unwrap());
    }

    #[test]
    fn entropy_chain_rule_holds(
        xs in 1usize..=4, ys in 1usize..=4,
        weights in prop::collection::vec(0.05f64..1.0, 16),
        support in prop::collection::vec(any::<bool>(), 16),
    ) {
        let pmf = pmf_from(xs, ys, &weights, &support);
        let mut px = vec![0.0; xs];
        let mut py = vec![0.0; ys];
        for &(x, y) in pmf.support() {
            px[x] += pmf.p(x, y);
            py[y] += pmf.p(x, y);
        }
        let h_joint = entropy_of_dist(&pmf.support_dist());
        let h_y_given_x = conditional_entropy(&pmf, Axis::X);
        let h_x_given_y = conditional_entropy(&pmf, Axis::Y);
        prop_assert!(h_y_given_x >= -1e-12 && h_x_given_y >= -1e-12);
        prop_assert!(h_y_given_x <= entropy_of_dist(&py) + 1e-9);
        prop_assert!(h_x_given_y <= entropy_of_dist(&px) + 1e-9);
        prop_assert!((entropy_of_dist(&px) + h_y_given_x - h_joint).abs() <= 1e-9);
        prop_assert!((entropy_of_dist(&py) + h_x_given_y - h_joint).abs() <= 1e-9);
    }

    #[test]
    fn maximal_independent_sets_are_sound(m in 1usize..=5, mask in any::<u16>()) {
        let caps = Caps::default();
        let g = build_graph(m, mask as u32);
        let sets = maximal_independent_sets(&g, &caps).unwrap();
        prop_assert!(!sets.is_empty());
        let mut covered = vec![false; m];
        for set in &sets {
            prop_assert!(set.windows(2).all(|w| w[0] < w[1]));
            for (i, &a) in set.iter().enumerate() {
                covered[a] = true;
                for &b in set.iter().skip(i + 1) {
                    prop_assert!(!g.has_edge(a, b), "set {:?} not independent", set);
                }
            }
            for v in 0..m {
                if !set.contains(&v) {
                    prop_assert!(
                        set.iter().any(|&a| g.has_edge(a, v)),
                        "set {:?} not maximal (can take {v})",
                        set
                    );
                }
            }
        }
        prop_assert!(covered.into_iter().all(|c| c));
        let mut dedup = sets.clone();
        dedup.sort();
        dedup.dedup();
        prop_assert_eq!(dedup.len(), sets.len());
    }

    #[test]
    fn min_entropy_coloring_is_proper(
        m in 1usize..=5,
        mask in any::<u16>(),
        weights in prop::collection::vec(0.05f64..1.0, 5),
    ) {
        let caps = Caps::default();
        let g = build_graph(m, mask as u32);
        let mut dist: Vec<f64> = weights[..m].to_vec();
        let total: f64 = dist.iter().sum();
        for v in dist.iter_mut() {
            *v /= total;
        }
        let (coloring, bits, _) = min_entropy_coloring(&g, &dist, &caps).unwrap();
        prop_assert!(coloring.is_proper(&g));
        prop_assert!((coloring.entropy(&dist) - bits).abs() <= 1e-9);
        // A coloring is a function of the vertex, so its entropy can
        // never exceed the vertex entropy.
        prop_assert!(bits >= -1e-12 && bits <= entropy_of_dist(&dist) + 1e-9);
    }

    #[test]
    fn one_shot_codes_verify(
        xs in 1usize..=3, ys in 1usize..=3,
        weights in prop::collection::vec(0.05f64..1.0, 9),
        support in prop::collection::vec(any::<bool>(), 9),
        f_vals in prop::collection::vec(0usize..3, 9),
        g_vals in prop::collection::vec(0usize..3, 9),
    ) {
        let caps = Caps::default();
        let pmf = pmf_from(xs, ys, &weights, &support);
        let fp = FunctionPair::new(
            table_from(xs, ys, &f_vals, 3),
            table_from(xs, ys, &g_vals, 3),
        );
        let cb = build_zero_error_code(&pmf, &fp, 1, &caps).unwrap();
        let (ok, cex) = verify_zero_error(&cb, &pmf, &fp).unwrap();
        prop_assert!(ok, "decoding counterexample {:?}", cex);
        prop_assert!(cb.kraft_sum() <= 1.0 + 1e-9);
        prop_assert!(measured_rate(&cb, &pmf).unwrap() >= -1e-12);
    }

    #[test]
    fn zero_error_bracket_is_ordered(
        xs in 1usize..=3, ys in 1usize..=3,
        weights in prop::collection::vec(0.05f64..1.0, 9),
        support in prop::collection::vec(any::<bool>(), 9),
        f_vals in prop::collection::vec(0usize..3, 9),
        g_vals in prop::collection::vec(0usize..3, 9),
    ) {
        let caps = Caps::default();
        let pmf = pmf_from(xs, ys, &weights, &support);
        let fp = FunctionPair::new(
            table_from(xs, ys, &f_vals, 3),
            table_from(xs, ys, &g_vals, 3),
        );
        let (lower, upper) = zero_error_bounds(&pmf, &fp, &caps).unwrap();
        prop_assert!(lower >= -1e-12);
        prop_assert!(lower <= upper + 1e-9, "bracket inverted: {lower} > {upper}");
    }
}
