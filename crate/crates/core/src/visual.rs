//! Visual sets and visual sizes of combinatorial horoballs.
//!
//! From a basepoint outside a horoball, the visual set collects the coset
//! vertices reachable by a certified (3, 0)-quasi-geodesic whose only
//! contact with the horoball (all levels, including the coset itself) is
//! its terminal vertex. Witness search runs the restricted quasi-geodesic
//! generator per candidate, so the computed set is a lower bound; its
//! diameter in the ambient cusped-space metric is the visual size.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::quasi_geodesic_family;
use crate::cusped::CuspedSpace;
use crate::error::AnalysisError;
use crate::graph::{PathRecord, VertexId};
use crate::group::CosetId;

/// Visual set of one horoball from one basepoint.
#[derive(Debug, Clone)]
pub struct VisualSet {
    pub basepoint: VertexId,
    pub coset: CosetId,
    /// Coset level-0 vertices with a certified witness, ascending.
    pub members: Vec<VertexId>,
    /// First certified witness per member, parallel to `members`.
    pub witnesses: Vec<PathRecord>,
    pub search_exhausted: bool,
}

/// Compute the visual set of horoball `hb` from basepoint `p`.
///
/// Per candidate coset vertex x, paths are searched in the subgraph
/// avoiding the horoball except at x and certified as (3, 0) against the
/// ambient metric. Larger budgets only extend the member set.
pub fn visual_set(
    cs: &CuspedSpace,
    p: VertexId,
    hb: CosetId,
    budget: usize,
    seed: u64,
) -> Result<VisualSet, AnalysisError> {
    let horoball = cs.horoball_vertices(hb);
    if horoball.binary_search(&p).is_ok() {
        return Err(AnalysisError::BasepointInsideHoroball(p.0));
    }
    let level0: Vec<VertexId> = cs.cosets[hb.0 as usize]
        .level0
        .iter()
        .map(|&v| VertexId(v))
        .collect();

    let mut blocked = vec![false; cs.graph.vertex_count()];
    for v in &horoball {
        blocked[v.idx()] = true;
    }

    let three = Rational64::from_integer(3);
    let zero = Rational64::from_integer(0);
    let mut members = Vec::new();
    let mut witnesses = Vec::new();
    let mut search_exhausted = true;
    for &x in &level0 {
        blocked[x.idx()] = false;
        let family = quasi_geodesic_family(&cs.graph, p, x, three, zero, budget, seed, Some(&blocked));
        blocked[x.idx()] = true;
        match family {
            Ok(f) => {
                // terminal-contact condition: the path meets the horoball
                // only at x, which the blocked search guarantees
                members.push(x);
                witnesses.push(f.paths[0].clone());
                search_exhausted &= f.exhausted;
            }
            Err(AnalysisError::NoPathsGenerated) => {
                // no certified witness found within budget
                search_exhausted = false;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(VisualSet {
        basepoint: p,
        coset: hb,
        members,
        witnesses,
        search_exhausted,
    })
}

/// Diameter of the visual set in the ambient cusped-space metric; empty and
/// singleton sets have size 0 by convention.
pub fn visual_size(cs: &CuspedSpace, vs: &VisualSet) -> u32 {
    if vs.members.len() <= 1 {
        return 0;
    }
    cs.graph
        .set_diameter(&vs.members)
        .expect("members live in one component")
}

/// One basepoint's row in a visual-size profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VisualProfileRow {
    pub basepoint: u32,
    pub basepoint_tag: String,
    pub distance_to_horoball: u32,
    pub members: Vec<u32>,
    pub member_tags: Vec<String>,
    pub size: u32,
    pub exhausted: bool,
}

/// Visual sizes of one horoball from several basepoints, with summary
/// statistics. Basepoint rows are computed independently in parallel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VisualProfile {
    pub coset: u32,
    pub rows: Vec<VisualProfileRow>,
    pub max_size: u32,
    /// max/min over rows with nonzero size (None when all are zero).
    pub spread: Option<f64>,
}

pub fn visual_size_profile(
    cs: &CuspedSpace,
    hb: CosetId,
    basepoints: &[VertexId],
    budget: usize,
    seed: u64,
) -> Result<VisualProfile, AnalysisError> {
    let horoball = cs.horoball_vertices(hb);
    for &p in basepoints {
        if horoball.binary_search(&p).is_ok() {
            return Err(AnalysisError::BasepointInsideHoroball(p.0));
        }
    }
    let dist_h = cs.graph.distances_multi(&horoball);
    let rows: Result<Vec<VisualProfileRow>, AnalysisError> = basepoints
        .par_iter()
        .map(|&p| {
            let vs = visual_set(cs, p, hb, budget, seed)?;
            Ok(VisualProfileRow {
                basepoint: p.0,
                basepoint_tag: cs.graph.tag(p).token(),
                distance_to_horoball: dist_h[p.idx()].unwrap_or(0),
                members: vs.members.iter().map(|v| v.0).collect(),
                member_tags: vs.members.iter().map(|v| cs.graph.tag(*v).token()).collect(),
                size: visual_size(cs, &vs),
                exhausted: vs.search_exhausted,
            })
        })
        .collect();
    let rows = rows?;
    let max_size = rows.iter().map(|r| r.size).max().unwrap_or(0);
    let nonzero: Vec<u32> = rows.iter().map(|r| r.size).filter(|&s| s > 0).collect();
    let spread = if nonzero.is_empty() {
        None
    } else {
        let max = *nonzero.iter().max().unwrap() as f64;
        let min = *nonzero.iter().min().unwrap() as f64;
        Some(max / min)
    };
    Ok(VisualProfile {
        coset: hb.0,
        rows,
        max_size,
        spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cusped::build_by_name;

    #[test]
    fn basepoint_inside_horoball_rejected() {
        let cs = build_by_name("free", 2, "a", 3, 2).unwrap();
        let e = VertexId(0); // identity sits on the <a> coset
        assert!(matches!(
            visual_set(&cs, e, CosetId(0), 50, 1),
            Err(AnalysisError::BasepointInsideHoroball(0))
        ));
    }

    #[test]
    fn tree_visual_set_is_the_gate() {
        // in the free group every route from b^k into the <a> axis passes
        // through the identity, so the visual set is exactly {e}
        let cs = build_by_name("free", 2, "a", 4, 2).unwrap();
        let b = cs.graph.find_token("g:b").unwrap();
        let vs = visual_set(&cs, b, CosetId(0), 200, 1).unwrap();
        let member_tags: Vec<String> = vs
            .members
            .iter()
            .map(|&v| cs.graph.tag(v).token())
            .collect();
        assert_eq!(member_tags, vec!["g:-"]);
        assert_eq!(visual_size(&cs, &vs), 0);
        // the witness re-certifies and touches the horoball only at its end
        let horoball = cs.horoball_vertices(CosetId(0));
        let w = &vs.witnesses[0];
        PathRecord::certify(&cs.graph, w.vertices.clone(), 3.into(), 0.into()).unwrap();
        for v in &w.vertices[..w.vertices.len() - 1] {
            assert!(horoball.binary_search(v).is_err());
        }
        assert!(horoball.binary_search(&w.end()).is_ok());
    }

    #[test]
    fn abelian_visual_set_widens_with_room() {
        // in the cusped plane the axis is approachable from above along
        // many columns, so several axis vertices admit witnesses
        let cs = build_by_name("abelian", 2, "a", 5, 2).unwrap();
        let p = cs.graph.find_token("g:bb").unwrap();
        let vs = visual_set(&cs, p, CosetId(0), 300, 1).unwrap();
        assert!(vs.members.len() > 1, "expected more than the gate vertex");
        assert!(visual_size(&cs, &vs) > 0);
        for (m, w) in vs.members.iter().zip(&vs.witnesses) {
            assert_eq!(w.end(), *m);
            PathRecord::certify(&cs.graph, w.vertices.clone(), 3.into(), 0.into()).unwrap();
        }
    }

    #[test]
    fn members_monotone_in_budget() {
        let cs = build_by_name("abelian", 2, "a", 5, 2).unwrap();
        let p = cs.graph.find_token("g:bb").unwrap();
        let small = visual_set(&cs, p, CosetId(0), 40, 9).unwrap();
        let large = visual_set(&cs, p, CosetId(0), 400, 9).unwrap();
        assert!(small.members.iter().all(|m| large.members.contains(m)));
    }

    #[test]
    fn profile_has_one_row_per_basepoint() {
        let cs = build_by_name("free", 2, "a", 3, 1).unwrap();
        let b = cs.graph.find_token("g:b").unwrap();
        let profile = visual_size_profile(&cs, CosetId(0), &[b], 100, 1).unwrap();
        assert_eq!(profile.rows.len(), 1);
        assert_eq!(profile.rows[0].distance_to_horoball, 1);
    }
}
