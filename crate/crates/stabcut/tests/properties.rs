//! Property tests for the structural invariants that hold on *every* valid
//! input, not just the benchmarks.

use proptest::prelude::*;
use stabcut::hypergraph::WeightedHypergraph;

/// Arbitrary small hypergraph: 2–6 vertices, 1–6 edges of size ≥ 2,
/// weights 1–4, a nonempty terminal set.
fn hypergraph() -> impl Strategy<Value = WeightedHypergraph> {
    (2usize..=6)
        .prop_flat_map(|nv| {
            let edge = proptest::sample::subsequence((0..nv).collect::<Vec<_>>(), 2..=nv)
                .prop_flat_map(|vs| (Just(vs), 1u64..=4));
            let edges = proptest::collection::vec(edge, 1..=6);
            let terminals = proptest::sample::subsequence((0..nv).collect::<Vec<_>>(), 1..=nv);
            (Just(nv), edges, terminals)
        })
        .prop_map(|(nv, edges, terminals)| {
            let name = |i: usize| format!("v{i}");
            WeightedHypergraph::new(
                (0..nv).map(name).collect(),
                edges
                    .into_iter()
                    .map(|(vs, w)| (vs.into_iter().map(name).collect(), w))
                    .collect(),
                terminals.into_iter().map(name).collect(),
            )
            .expect("generated hypergraph is valid")
        })
}

proptest! {
    #[test]
    fn cut_function_is_symmetric_and_submodular(h in hypergraph()) {
        let full = (1u64 << h.vertex_count()) - 1;
        for s in 0..=full {
            prop_assert_eq!(h.cut_value(s).unwrap(), h.cut_value(full ^ s).unwrap());
        }
        for s in 0..=full {
            for t in 0..=full {
                let lhs = h.cut_value(s).unwrap() + h.cut_value(t).unwrap();
                let rhs = h.cut_value(s | t).unwrap() + h.cut_value(s & t).unwrap();
                prop_assert!(lhs >= rhs, "c({s:b}) + c({t:b}) < c(∪) + c(∩)");
            }
        }
    }

    #[test]
    fn json_roundtrip_is_identity(h in hypergraph()) {
        let back = WeightedHypergraph::from_json(&h.to_json()).unwrap();
        prop_assert_eq!(h, back);
    }

    #[test]
    fn pruning_preserves_the_mincut_table(h in hypergraph()) {
        let pruned = h.prune_floating_components();
        prop_assert!(pruned.is_pruned());
        if h.is_pruned() {
            prop_assert_eq!(h.mincut_table().unwrap(), pruned.mincut_table().unwrap());
        }
    }
}
