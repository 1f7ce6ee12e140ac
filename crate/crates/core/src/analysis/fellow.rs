//! Fellow-travelling membership: does a certified quasi-geodesic come
//! kappa-close to the far part of a reference ray?

use num_rational::Rational64;

use crate::analysis::contraction::{kappa, Rho};
use crate::error::AnalysisError;
use crate::graph::{Graph, PathRecord, VertexId};

/// True when some vertex of `beta` lies within kappa(rho, L, A) of a vertex
/// of `alpha` at distance >= r from the basepoint `o`, where (L, A) are
/// beta's certified parameters. Monotone in r: membership at r implies
/// membership at every smaller radius.
pub fn fellow_traveling_membership(
    g: &Graph,
    beta: &PathRecord,
    alpha: &PathRecord,
    r: u32,
    rho: &Rho,
    o: VertexId,
) -> Result<bool, AnalysisError> {
    assert_eq!(alpha.start(), o, "reference path must start at the basepoint");
    let k = kappa(rho, beta.l, beta.a)?;
    let dist_o = g.distances_from(o);
    let far: Vec<VertexId> = alpha
        .vertices
        .iter()
        .copied()
        .filter(|v| matches!(dist_o[v.idx()], Some(d) if d >= r))
        .collect();
    if far.is_empty() {
        return Err(AnalysisError::RadiusExceedsPath(r));
    }
    let dist_far = g.distances_multi(&far);
    let closest = beta
        .vertices
        .iter()
        .filter_map(|v| dist_far[v.idx()])
        .min();
    Ok(match closest {
        Some(d) => Rational64::from_integer(d as i64) <= k,
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexTag;

    fn path_graph(n: u32) -> Graph {
        let mut g = Graph::new();
        for i in 0..n {
            g.add_vertex(VertexTag::SpacePoint(format!("r:{i}")));
        }
        for i in 0..n - 1 {
            g.add_edge(VertexId(i), VertexId(i + 1));
        }
        g
    }

    #[test]
    fn path_travels_with_itself() {
        let g = path_graph(12);
        let alpha = g.first_geodesic(VertexId(0), VertexId(11)).unwrap();
        for r in [1, 5, 11] {
            assert!(fellow_traveling_membership(&g, &alpha, &alpha, r, &Rho::Zero, VertexId(0))
                .unwrap());
        }
    }

    #[test]
    fn radius_beyond_path_errors() {
        let g = path_graph(6);
        let alpha = g.first_geodesic(VertexId(0), VertexId(5)).unwrap();
        assert!(matches!(
            fellow_traveling_membership(&g, &alpha, &alpha, 6, &Rho::Zero, VertexId(0)),
            Err(AnalysisError::RadiusExceedsPath(6))
        ));
    }

    #[test]
    fn far_constant_path_is_rejected() {
        // beta pinned near the start never meets the far tail within kappa
        let g = path_graph(20);
        let alpha = g.first_geodesic(VertexId(0), VertexId(19)).unwrap();
        let beta = g.first_geodesic(VertexId(0), VertexId(1)).unwrap();
        assert!(
            !fellow_traveling_membership(&g, &beta, &alpha, 12, &Rho::Zero, VertexId(0)).unwrap()
        );
    }

    #[test]
    fn membership_is_monotone_in_radius() {
        let g = path_graph(20);
        let alpha = g.first_geodesic(VertexId(0), VertexId(19)).unwrap();
        let beta = g.first_geodesic(VertexId(0), VertexId(8)).unwrap();
        let mut last = true;
        for r in 1..=19 {
            let now =
                fellow_traveling_membership(&g, &beta, &alpha, r, &Rho::Zero, VertexId(0)).unwrap();
            assert!(now || !last || !now, "membership can only switch true -> false");
            if !last {
                assert!(!now);
            }
            last = now;
        }
    }
}
