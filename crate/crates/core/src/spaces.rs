//! Hand-built wedge spaces used as non-group test beds.
//!
//! The strip wedge is a unit-grid discretization of a ray with flat strips
//! attached at even coordinates: strip m sits at x = 2m, spans s in [-m, m]
//! and t in [-extent, extent], and meets the ray only at (2m, 0, 0). Its
//! boundary behaves like a compact set of directions even though the strips
//! grow, which makes it the standard counterexample space for barycenter
//! and fellow-travelling experiments.
//!
//! The cusped-plane variant additionally wedges a flat plane grid at each
//! odd coordinate 2m + 1 and attaches a depth-D combinatorial horoball over
//! every plane, leaving the strips untouched.

use num_rational::Rational64;

use crate::cusped::attach_horoball_levels;
use crate::error::BuildError;
use crate::graph::{Graph, PathRecord, VertexId, VertexTag};

/// A built wedge space with coordinate lookups.
#[derive(Debug, Clone)]
pub struct WedgeSpace {
    pub graph: Graph,
    pub extent: u32,
    /// Number of strips (one per m in 1..=extent).
    pub strips: usize,
    /// Number of wedged plane grids (0 for the plain strip wedge).
    pub planes: usize,
    pub depth: u32,
}

impl WedgeSpace {
    pub fn ray_vertex(&self, x: u32) -> Option<VertexId> {
        self.graph.find_token(&format!("p:r:{x}"))
    }

    pub fn strip_vertex(&self, m: u32, s: i64, t: i64) -> Option<VertexId> {
        if s == 0 && t == 0 {
            return self.ray_vertex(2 * m);
        }
        self.graph.find_token(&format!("p:s{m}:{s},{t}"))
    }

    pub fn plane_vertex(&self, m: u32, i: i64, j: i64) -> Option<VertexId> {
        if i == 0 && j == 0 {
            return self.ray_vertex(2 * m + 1);
        }
        self.graph.find_token(&format!("p:e{m}:{i},{j}"))
    }

    /// Vertices of strip m including the junction, ascending.
    pub fn strip_vertices(&self, m: u32) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .graph
            .vertices()
            .filter(|&v| match self.graph.tag(v) {
                VertexTag::SpacePoint(p) => p.starts_with(&format!("s{m}:")),
                _ => false,
            })
            .collect();
        if let Some(j) = self.ray_vertex(2 * m) {
            out.push(j);
        }
        out.sort();
        out
    }

    /// The ray geodesic from the origin out to x = `upto`.
    pub fn ray_path(&self, upto: u32) -> PathRecord {
        let vertices: Vec<VertexId> = (0..=upto).map(|x| self.ray_vertex(x).unwrap()).collect();
        PathRecord::certify(&self.graph, vertices, Rational64::from_integer(1), 0.into())
            .expect("the ray is a geodesic")
    }

    /// The ray followed down (sign < 0) or up (sign > 0) the central column
    /// of strip n, truncated at |t| = extent: the standard diverging
    /// geodesic pair based at the origin.
    pub fn branch_path(&self, n: u32, sign: i64) -> PathRecord {
        let mut vertices: Vec<VertexId> =
            (0..=2 * n).map(|x| self.ray_vertex(x).unwrap()).collect();
        for u in 1..=self.extent as i64 {
            vertices.push(self.strip_vertex(n, 0, sign * u).unwrap());
        }
        PathRecord::certify(&self.graph, vertices, Rational64::from_integer(1), 0.into())
            .expect("ray plus strip column is a geodesic")
    }
}

/// Build the plain strip wedge at the given extent.
pub fn strip_wedge(extent: u32) -> Result<WedgeSpace, BuildError> {
    build(extent, false, 0)
}

/// Build the strip wedge with cusped planes wedged at odd coordinates.
pub fn cusped_plane_wedge(extent: u32, depth: u32) -> Result<WedgeSpace, BuildError> {
    build(extent, true, depth)
}

fn build(extent: u32, with_planes: bool, depth: u32) -> Result<WedgeSpace, BuildError> {
    assert!(extent >= 1, "extent must be at least 1");
    let mut g = Graph::new();
    let ray_len = 2 * extent + 1;
    let mut ray_ids = Vec::new();
    for x in 0..=ray_len {
        ray_ids.push(g.add_vertex(VertexTag::SpacePoint(format!("r:{x}"))));
    }
    for w in ray_ids.windows(2) {
        g.add_edge(w[0], w[1]);
    }

    let e = extent as i64;
    for m in 1..=extent {
        // strip m at x = 2m: s in [-m, m], t in [-extent, extent];
        // (0, 0) is identified with the ray vertex
        let mi = m as i64;
        let junction = ray_ids[(2 * m) as usize];
        let id_of = |g: &Graph, s: i64, t: i64| -> Option<VertexId> {
            if s == 0 && t == 0 {
                Some(junction)
            } else {
                g.find_token(&format!("p:s{m}:{s},{t}"))
            }
        };
        for s in -mi..=mi {
            for t in -e..=e {
                if s == 0 && t == 0 {
                    continue;
                }
                g.add_vertex(VertexTag::SpacePoint(format!("s{m}:{s},{t}")));
            }
        }
        for s in -mi..=mi {
            for t in -e..=e {
                let v = id_of(&g, s, t).unwrap();
                if s < mi {
                    let w = id_of(&g, s + 1, t).unwrap();
                    g.add_edge(v, w);
                }
                if t < e {
                    let w = id_of(&g, s, t + 1).unwrap();
                    g.add_edge(v, w);
                }
            }
        }
    }

    let mut planes = 0;
    if with_planes {
        for m in 1..=extent {
            let junction = ray_ids[(2 * m + 1) as usize];
            let id_of = |g: &Graph, i: i64, j: i64| -> Option<VertexId> {
                if i == 0 && j == 0 {
                    Some(junction)
                } else {
                    g.find_token(&format!("p:e{m}:{i},{j}"))
                }
            };
            let mut plane_vertices = Vec::new();
            for i in -e..=e {
                for j in -e..=e {
                    if i == 0 && j == 0 {
                        plane_vertices.push(junction);
                        continue;
                    }
                    plane_vertices
                        .push(g.add_vertex(VertexTag::SpacePoint(format!("e{m}:{i},{j}"))));
                }
            }
            for i in -e..=e {
                for j in -e..=e {
                    let v = id_of(&g, i, j).unwrap();
                    if i < e {
                        g.add_edge(v, id_of(&g, i + 1, j).unwrap());
                    }
                    if j < e {
                        g.add_edge(v, id_of(&g, i, j + 1).unwrap());
                    }
                }
            }
            plane_vertices.sort();
            // the whole plane grid is the horoball base
            attach_horoball_levels(&mut g, &plane_vertices, m, depth);
            planes += 1;
        }
    }

    Ok(WedgeSpace {
        graph: g,
        extent,
        strips: extent as usize,
        planes,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_instance_has_one_strip() {
        let y = strip_wedge(1).unwrap();
        assert_eq!(y.strips, 1);
        assert_eq!(y.planes, 0);
        // ray 0..=3 plus a 3x3 strip sharing its junction
        assert_eq!(y.graph.vertex_count(), 4 + 9 - 1);
    }

    #[test]
    fn strip_meets_ray_only_at_junction() {
        let y = strip_wedge(3).unwrap();
        let strip = y.strip_vertices(2);
        let ray: Vec<VertexId> = (0..=7).map(|x| y.ray_vertex(x).unwrap()).collect();
        let shared: Vec<_> = strip.iter().filter(|v| ray.contains(v)).collect();
        assert_eq!(shared, vec![&y.ray_vertex(4).unwrap()]);
    }

    #[test]
    fn branch_paths_are_geodesics() {
        let y = strip_wedge(4).unwrap();
        for n in 1..=4 {
            let down = y.branch_path(n, -1);
            let up = y.branch_path(n, 1);
            assert!(down.certified && up.certified);
            assert_eq!(down.len() as u32, 2 * n + y.extent);
            let d = y
                .graph
                .shortest_distance(up.start(), up.end())
                .unwrap();
            assert_eq!(d as usize, up.len());
        }
    }

    #[test]
    fn column_distance_through_junction() {
        let y = strip_wedge(3).unwrap();
        let top = y.strip_vertex(2, 0, 3).unwrap();
        let bottom = y.strip_vertex(2, 0, -3).unwrap();
        assert_eq!(y.graph.shortest_distance(top, bottom).unwrap(), 6);
    }

    #[test]
    fn plane_count_matches_extent() {
        let x = cusped_plane_wedge(2, 1).unwrap();
        assert_eq!(x.planes, 2);
        let y = strip_wedge(2).unwrap();
        // depth 0 with planes adds plane grids but no horoball levels
        let x0 = cusped_plane_wedge(2, 0).unwrap();
        let plane_cells = 2 * ((2 * 2 + 1) * (2 * 2 + 1) - 1);
        assert_eq!(
            x0.graph.vertex_count(),
            y.graph.vertex_count() + plane_cells as usize
        );
        assert!(x.graph.vertex_count() > x0.graph.vertex_count());
    }

    #[test]
    fn space_is_connected() {
        let x = cusped_plane_wedge(2, 2).unwrap();
        let dist = x.graph.distances_from(VertexId(0));
        assert!(dist.iter().all(|d| d.is_some()));
    }
}
