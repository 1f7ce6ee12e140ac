//! Serialization and metric invariants under randomized inputs.

use proptest::prelude::*;

use cusped::graph::{from_text, to_text, Graph, PathRecord, VertexId, VertexTag};

fn arbitrary_graph() -> impl Strategy<Value = Graph> {
    // 2..24 vertices with a random tag mix, random edge set
    (2usize..24, prop::collection::vec((0u32..24, 0u32..24), 0..60)).prop_map(
        |(n, edge_specs)| {
            let mut g = Graph::new();
            for i in 0..n {
                let tag = match i % 3 {
                    0 => VertexTag::GroupElement(if i == 0 {
                        "-".into()
                    } else {
                        "ab".repeat(i).chars().take(i).collect()
                    }),
                    1 => VertexTag::HoroballPoint {
                        coset: (i / 3) as u32,
                        base: format!("g:{}", "a".repeat(i % 5)),
                        level: (i % 4) as u32,
                    },
                    _ => VertexTag::SpacePoint(format!("s{}:{},{}", i % 4, i as i64 - 3, i)),
                };
                g.add_vertex(tag);
            }
            for (u, v) in edge_specs {
                let (u, v) = (u as usize % n, v as usize % n);
                if u != v {
                    g.add_edge(VertexId(u as u32), VertexId(v as u32));
                }
            }
            g
        },
    )
}

proptest! {
    #[test]
    fn text_round_trip(g in arbitrary_graph()) {
        let text = to_text(&g);
        let parsed = from_text(&text).unwrap();
        prop_assert_eq!(&parsed, &g);
        prop_assert_eq!(to_text(&parsed), text);
    }

    #[test]
    fn balls_nest_and_distances_are_symmetric(g in arbitrary_graph()) {
        let n = g.vertex_count() as u32;
        let u = VertexId(0);
        let v = VertexId(n / 2);
        let du = g.distances_from(u);
        let dv = g.distances_from(v);
        prop_assert_eq!(du[v.idx()], dv[u.idx()]);
        for r in 0..4 {
            let inner = g.ball(u, r);
            let outer = g.ball(u, r + 1);
            prop_assert!(inner.iter().all(|x| outer.contains(x)));
        }
    }

    #[test]
    fn geodesics_satisfy_the_certificate(g in arbitrary_graph()) {
        let n = g.vertex_count() as u32;
        let u = VertexId(1 % n);
        let v = VertexId(n - 1);
        if let Ok((paths, _)) = g.all_geodesics(u, v, 8) {
            let d = g.shortest_distance(u, v).unwrap();
            for p in paths {
                prop_assert_eq!(p.len() as u32, d);
                prop_assert!(PathRecord::certify(&g, p.vertices, 1.into(), 0.into()).is_ok());
            }
        }
    }

    #[test]
    fn projections_live_in_target_at_minimal_distance(g in arbitrary_graph()) {
        let n = g.vertex_count() as u32;
        let z: Vec<VertexId> = (0..n).step_by(3).map(VertexId).collect();
        let x = VertexId(n - 1);
        if let Ok(proj) = g.closest_point_projection(x, &z) {
            let dist = g.distances_from(x);
            let best = z.iter().filter_map(|v| dist[v.idx()]).min().unwrap();
            prop_assert!(!proj.is_empty());
            for p in proj {
                prop_assert!(z.contains(&p));
                prop_assert_eq!(dist[p.idx()], Some(best));
            }
        }
    }
}
