//! Combinatorial horoballs over a base graph, truncated to finite depth.
//!
//! The horoball over a base graph has vertex set base x {0..D} and three
//! edge families: base edges copied at level 0, a horizontal edge between
//! (v, k) and (w, k) for k > 0 whenever 0 < d_base(v, w) <= 2^k, and a
//! vertical edge between (v, k) and (v, k+1). Base distances are measured
//! intrinsically in the base graph. Depth truncation replaces the infinite
//! construction; asymptotic behavior degrades near level D, so reports that
//! depend on a horoball always carry its depth.

use num_rational::Rational64;

use crate::error::BuildError;
use crate::graph::{Graph, PathRecord, VertexId, VertexTag};

/// Construction request: a base graph and a truncation depth.
#[derive(Debug, Clone)]
pub struct HoroballSpec {
    pub base: Graph,
    pub depth: u32,
    /// Coset id recorded in the horoball point tags.
    pub coset: u32,
}

/// A truncated combinatorial horoball with its (base, level) coordinate map.
#[derive(Debug, Clone)]
pub struct Horoball {
    pub graph: Graph,
    pub depth: u32,
    base_count: usize,
}

impl Horoball {
    /// Vertex at (base index, level); levels are blocks of base_count ids.
    pub fn vertex(&self, base: usize, level: u32) -> VertexId {
        VertexId((level as usize * self.base_count + base) as u32)
    }

    pub fn base_count(&self) -> usize {
        self.base_count
    }

    /// The vertical geodesic above a level-0 vertex.
    pub fn vertical_ray(&self, base_vertex: VertexId) -> Result<VerticalRay, BuildError> {
        if base_vertex.idx() >= self.base_count {
            return Err(BuildError::NotLevelZero(base_vertex.0));
        }
        let vertices: Vec<VertexId> = (0..=self.depth)
            .map(|k| self.vertex(base_vertex.idx(), k))
            .collect();
        let path = PathRecord::certify(
            &self.graph,
            vertices,
            Rational64::from_integer(1),
            Rational64::from_integer(0),
        )
        .map_err(BuildError::Graph)?;
        Ok(VerticalRay {
            base_vertex,
            path,
        })
    }
}

/// The geodesic climbing levels 0..D above a fixed base vertex.
#[derive(Debug, Clone)]
pub struct VerticalRay {
    pub base_vertex: VertexId,
    pub path: PathRecord,
}

/// Build the truncated combinatorial horoball described by `spec`.
///
/// Vertex (v, k) gets id k * |base| + v, so level 0 reproduces the base
/// vertex numbering. Level >= 1 vertices are tagged as horoball points over
/// the base vertex's tag token.
pub fn build_horoball(spec: &HoroballSpec) -> Result<Horoball, BuildError> {
    let base = &spec.base;
    let n = base.vertex_count();
    if n == 0 {
        return Err(BuildError::EmptyBase);
    }

    let mut graph = Graph::new();
    for k in 0..=spec.depth {
        for v in base.vertices() {
            let tag = if k == 0 {
                base.tag(v).clone()
            } else {
                VertexTag::HoroballPoint {
                    coset: spec.coset,
                    base: base.tag(v).token(),
                    level: k,
                }
            };
            graph.add_vertex(tag);
        }
    }
    let vid = |v: usize, k: u32| VertexId((k as usize * n + v) as u32);

    // rule 1: base edges at level 0
    for v in base.vertices() {
        for &w in base.neighbors(v) {
            if v.0 < w {
                graph.add_edge(vid(v.idx(), 0), vid(w as usize, 0));
            }
        }
    }

    // rule 2: level-k horizontal edges for pairs at base distance <= 2^k,
    // using the intrinsic base metric
    if spec.depth > 0 {
        for v in base.vertices() {
            let dist = base.distances_from(v);
            for w in (v.0 + 1)..n as u32 {
                let Some(d) = dist[w as usize] else { continue };
                if d == 0 {
                    continue;
                }
                for k in 1..=spec.depth {
                    if (d as u64) <= (1u64 << k.min(63)) {
                        graph.add_edge(vid(v.idx(), k), vid(w as usize, k));
                    }
                }
            }
        }
    }

    // rule 3: vertical edges
    for k in 0..spec.depth {
        for v in 0..n {
            graph.add_edge(vid(v, k), vid(v, k + 1));
        }
    }

    Ok(Horoball {
        graph,
        depth: spec.depth,
        base_count: n,
    })
}
