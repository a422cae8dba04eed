mod common;

use common::{naive_cliques, random_graph};
use k4tiling::constructions::{build_detailed, ConstructionSpec};
use k4tiling::io::{from_edge_list, from_graph6, parse_graph, to_edge_list, to_graph6};
use k4tiling::{Error, Graph, VertexSet};
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.0f64..1.0, any::<u64>()).prop_map(|(n, p, seed)| random_graph(n, p, seed))
}

#[test]
fn spec_examples() {
    let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    assert_eq!(k4, Graph::complete(4).unwrap());
    assert_eq!(k4.edge_count(), 6);
    assert_eq!(Graph::from_edges(3, &[]).unwrap().edge_count(), 0);
    assert_eq!(
        Graph::from_edges(5, &[(0, 1), (1, 2)])
            .unwrap()
            .edge_count(),
        2
    );
    assert_eq!(Graph::complete(8).unwrap().edge_count(), 28);

    let mut k23 = Graph::empty(5).unwrap();
    let (x, y) = (VertexSet::range(0, 2), VertexSet::range(2, 5));
    k23.join(x, y);
    assert_eq!(k23.edge_count(), 6);
    assert_eq!(k23.e_between(x, y).unwrap(), 6);
    assert_eq!(k23.e_between(x, VertexSet::EMPTY).unwrap(), 0);
    assert!(matches!(k23.e_between(x, x), Err(Error::Input(_))));

    assert!(matches!(
        Graph::from_edges(3, &[(0, 3)]),
        Err(Error::Input(_))
    ));
    assert!(matches!(
        Graph::from_edges(3, &[(1, 1)]),
        Err(Error::Input(_))
    ));
    assert!(Graph::empty(65).is_err());

    let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
    assert!(c5.enumerate_cliques(3).is_empty());
    assert_eq!(Graph::complete(5).unwrap().enumerate_cliques(4).len(), 5);
}

#[test]
fn e2_cliques_meet_x_twice() {
    let e2 = build_detailed(&ConstructionSpec::e(2, 14, 2)).unwrap();
    let x = e2.layout.part_by_name("X").unwrap();
    let k4s = e2.graph.enumerate_cliques(4);
    assert!(!k4s.is_empty());
    assert!(k4s.iter().all(|q| q.intersection(x).len() >= 2));
}

#[test]
fn graph6_known_values() {
    assert_eq!(to_graph6(&Graph::complete(4).unwrap()), "C~");
    assert_eq!(to_graph6(&Graph::empty(1).unwrap()), "@");
    let p = from_graph6("Bw").unwrap();
    assert_eq!(p.n(), 3);
    assert_eq!(p.edge_count(), 3);
    assert!(parse_graph("4 1\n0 3\n").unwrap().has_edge(0, 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn degree_sum_is_twice_edges(g in arb_graph(40)) {
        let sum: usize = (0..g.n()).map(|v| g.degree(v)).sum();
        prop_assert_eq!(sum, 2 * g.edge_count());
    }

    #[test]
    fn e_within_splits_over_disjoint_union(g in arb_graph(40), bits in any::<u64>()) {
        let all = g.vertices();
        let s = VertexSet(bits).intersection(all);
        let t = all.difference(s);
        prop_assert_eq!(g.e_within(s) + g.e_within(t) + g.e_between(s, t).unwrap(), g.edge_count());
    }

    #[test]
    fn complement_partitions_pairs(g in arb_graph(40)) {
        let n = g.n();
        let h = g.complement();
        prop_assert_eq!(g.edge_count() + h.edge_count(), n * (n - 1) / 2);
        prop_assert_eq!(h.complement(), g);
    }

    #[test]
    fn cliques_match_subset_enumeration(g in arb_graph(12), r in 1usize..6) {
        let fast: Vec<u64> = g.enumerate_cliques(r).iter().map(|s| s.bits()).collect();
        let slow = naive_cliques(&g, r, g.vertices().bits());
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn graph6_roundtrip(g in arb_graph(64)) {
        prop_assert_eq!(from_graph6(&to_graph6(&g)).unwrap(), g.clone());
        prop_assert_eq!(from_edge_list(&to_edge_list(&g)).unwrap(), g);
    }
}
