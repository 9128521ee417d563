//! Property tests for the text formats: serialization composed with
//! parsing is the identity.

use proptest::prelude::*;

use boxkit_core::geometry::{
    parse_representation, serialize_representation, AxisBox, BoxRepresentation, Interval,
};
use boxkit_core::graph::{parse_graph, serialize_graph, Graph};

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1u32..=30).prop_flat_map(|n| {
        let pairs: Vec<(u32, u32)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let label_count = (n as usize).min(4);
        (
            proptest::collection::vec(any::<bool>(), pairs.len()),
            proptest::collection::vec("[a-z][a-z0-9_]{0,6}", label_count),
        )
            .prop_map(move |(mask, labels)| {
                let mut g = Graph::new(n);
                for (keep, &(u, v)) in mask.iter().zip(&pairs) {
                    if *keep {
                        g.add_edge(u, v).unwrap();
                    }
                }
                for (i, name) in labels.iter().enumerate() {
                    // Labels must be unique per name and per vertex; skip
                    // collisions instead of failing the generator.
                    let _ = g.set_label(name, i as u32);
                }
                g
            })
    })
}

fn arb_representation() -> impl Strategy<Value = BoxRepresentation> {
    (1usize..=12, 1u32..=3).prop_flat_map(|(n, d)| {
        proptest::collection::vec(
            proptest::collection::vec((-50i64..50, 0i64..20), d as usize),
            n,
        )
        .prop_map(move |rows| {
            let boxes: Vec<AxisBox> = rows
                .into_iter()
                .map(|row| {
                    AxisBox::new(
                        row.into_iter()
                            .map(|(lo, len)| Interval::new(lo, lo + len).unwrap())
                            .collect(),
                    )
                    .unwrap()
                })
                .collect();
            BoxRepresentation::new(boxes).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn graph_round_trips_through_text(g in arb_graph()) {
        let parsed = parse_graph(&serialize_graph(&g)).unwrap();
        prop_assert_eq!(parsed.n(), g.n());
        prop_assert_eq!(
            parsed.edges().collect::<Vec<_>>(),
            g.edges().collect::<Vec<_>>()
        );
        prop_assert_eq!(
            parsed.labels().collect::<Vec<_>>(),
            g.labels().collect::<Vec<_>>()
        );
    }

    #[test]
    fn representation_round_trips_through_text(rep in arb_representation()) {
        let parsed = parse_representation(&serialize_representation(&rep)).unwrap();
        prop_assert_eq!(parsed.d(), rep.d());
        prop_assert_eq!(parsed.boxes(), rep.boxes());
    }
}
