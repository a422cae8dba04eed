mod common;

use common::{matches_row, naive_lex_ab, naive_nu, random_graph, table_row};
use k4tiling::constructions::{build, ConstructionSpec};
use k4tiling::packing::*;
use k4tiling::tiling::nu;
use k4tiling::{Graph, VertexSet};
use proptest::prelude::*;

fn profile_of(g: &Graph) -> (RankPacking, Classification, Profile) {
    let p = lex_max_rank_packing(g).unwrap();
    let cl = classify(g, &p).unwrap();
    let prof = Profile::new(g, &p, &cl);
    (p, cl, prof)
}

#[test]
fn table_rows_for_the_four_constructions() {
    for (i, n, k) in [(1, 13, 1), (2, 14, 2), (3, 11, 1), (4, 12, 2)] {
        let g = build(&ConstructionSpec::e(i, n, k)).unwrap();
        let (p, cl, prof) = profile_of(&g);
        assert!(!p.truncated);
        let row = table_row(i, n as f64, k as f64);
        assert!(
            matches_row(prof.a, prof.b, prof.c, prof.d, row),
            "E{i}({n},{k}): {prof:?}"
        );
        assert!(
            audit_bounds(&g, &p, &cl).unwrap().all_pass(),
            "E{i}({n},{k})"
        );
    }
}

#[test]
fn larger_constructions_keep_their_rows() {
    for (i, n, k) in [(1, 19, 2), (2, 20, 3), (3, 15, 2), (4, 14, 2)] {
        let g = build(&ConstructionSpec::e(i, n, k)).unwrap();
        let (_, _, prof) = profile_of(&g);
        assert!(
            matches_row(
                prof.a,
                prof.b,
                prof.c,
                prof.d,
                table_row(i, n as f64, k as f64)
            ),
            "E{i}({n},{k}): {prof:?}"
        );
    }
}

#[test]
fn aggregate_bound_reported() {
    let g = build(&ConstructionSpec::e(1, 13, 1)).unwrap();
    let (p, cl, _) = profile_of(&g);
    let rep = audit_bounds(&g, &p, &cl).unwrap();
    let agg = rep.get("|G| <= Phi1 + 20n").unwrap();
    assert_eq!(agg.lhs, 60.0);
    assert!(agg.pass);
    assert!(rep.failures().is_empty());
}

#[test]
fn oversized_graphs_are_refused() {
    let big = Graph::complete(40).unwrap();
    assert!(lex_max_rank_packing(&big).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn packing_is_lexicographically_maximal(n in 4usize..=12, p in 0.3f64..0.9, seed: u64) {
        let g = random_graph(n, p, seed);
        let pk = lex_max_rank_packing(&g).unwrap();
        prop_assert!(pk.validate(&g).is_ok());
        let (a, b, c, d) = pk.sizes();
        prop_assert_eq!(4 * a + 3 * b + 2 * c + d, n);
        prop_assert_eq!(a, nu(&g, 4));
        prop_assert_eq!((a, b), naive_lex_ab(&g));
        let rest = VertexSet::full(n).difference(pk.a_set()).difference(pk.b_set());
        prop_assert_eq!(c, naive_nu(&g, 2, rest.bits()));
        prop_assert_eq!(g.e_within(pk.d_set()), 0);
    }

    #[test]
    fn classification_partitions_a(n in 8usize..=14, p in 0.4f64..0.9, seed: u64) {
        let g = random_graph(n, p, seed);
        let (pk, cl, prof) = profile_of(&g);
        prop_assert_eq!(cl.assignment.len(), pk.a.len());
        prop_assert_eq!(prof.a.iter().sum::<usize>(), pk.a.len());
        prop_assert_eq!(cl.counts(), prof.a);
        prop_assert_eq!(prof.n, n);
    }

    #[test]
    fn audits_hold_on_random_graphs(p in prop::sample::select(vec![0.3, 0.5, 0.7]), seed: u64) {
        let g = random_graph(14, p, seed);
        let (pk, cl, _) = profile_of(&g);
        let rep = audit_bounds(&g, &pk, &cl).unwrap();
        let names: Vec<_> = rep.failures().iter().map(|c| c.name.clone()).collect();
        prop_assert!(names.is_empty(), "{:?}", names);
    }
}
