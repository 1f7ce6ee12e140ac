//! Assembly of cusped spaces: a Cayley ball with a truncated combinatorial
//! horoball glued along every left coset of the peripheral subgroup.
//!
//! Horoball level-0 vertices are identified with their coset vertices in the
//! Cayley part rather than duplicated, so the induced path metric is
//! literal: horoball shortcuts can only shrink Cayley distances. When the
//! truncation disconnects a coset subgraph, each component gets its own
//! horoball and the artifact is flagged.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::BuildError;
use crate::graph::{Graph, PathRecord, VertexId, VertexTag};
use crate::group::{coset_decompose, CosetClass, CosetId, GroupFamily, GroupModel, SubgroupSpec};
use crate::horoball::VerticalRay;
use crate::rng::SeedStream;

/// Construction parameters echoed into every report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CuspedConfig {
    pub family: String,
    pub rank: usize,
    pub subgroup: String,
    pub radius: u32,
    pub depth: u32,
}

/// Bookkeeping for one glued horoball.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CosetInfo {
    pub id: u32,
    pub representative: String,
    /// Cayley vertices of the coset (= horoball level 0), ascending.
    pub level0: Vec<u32>,
    /// Half-open id range of the level >= 1 vertices.
    pub upper_range: (u32, u32),
    /// Connected components of the coset subgraph inside the ball; more
    /// than one means truncation split the coset.
    pub components: usize,
}

/// A cusped space: Cayley ball plus horoballs over each coset class.
#[derive(Debug, Clone)]
pub struct CuspedSpace {
    pub graph: Graph,
    pub cayley_count: usize,
    pub cosets: Vec<CosetInfo>,
    pub config: CuspedConfig,
}

impl CuspedSpace {
    /// Vertices of one horoball: coset level 0 plus its upper levels.
    pub fn horoball_vertices(&self, coset: CosetId) -> Vec<VertexId> {
        let info = &self.cosets[coset.0 as usize];
        let mut out: Vec<VertexId> = info.level0.iter().map(|&v| VertexId(v)).collect();
        out.extend((info.upper_range.0..info.upper_range.1).map(VertexId));
        out.sort();
        out
    }

    /// All vertices of the Cayley part, ascending.
    pub fn cayley_vertices(&self) -> Vec<VertexId> {
        (0..self.cayley_count as u32).map(VertexId).collect()
    }

    pub fn is_cayley(&self, v: VertexId) -> bool {
        v.idx() < self.cayley_count
    }

    /// Vertex at `level` above the given level-0 vertex, resolved through
    /// the horoball point tags.
    pub fn lift(&self, base: VertexId, level: u32) -> Option<VertexId> {
        if level == 0 {
            return Some(base);
        }
        let token = self.graph.tag(base).token();
        for info in &self.cosets {
            if info.level0.contains(&base.0) {
                for id in info.upper_range.0..info.upper_range.1 {
                    if let VertexTag::HoroballPoint {
                        base: b, level: k, ..
                    } = self.graph.tag(VertexId(id))
                    {
                        if *k == level && *b == token {
                            return Some(VertexId(id));
                        }
                    }
                }
            }
        }
        None
    }

    /// The vertical geodesic above a coset vertex, certified in the full
    /// cusped space.
    pub fn vertical_ray(&self, base: VertexId) -> Result<VerticalRay, BuildError> {
        if !self.is_cayley(base) {
            return Err(BuildError::NotLevelZero(base.0));
        }
        let mut vertices = vec![base];
        for k in 1..=self.config.depth {
            match self.lift(base, k) {
                Some(v) => vertices.push(v),
                None => break,
            }
        }
        let path = PathRecord::certify(&self.graph, vertices, 1.into(), 0.into())
            .map_err(BuildError::Graph)?;
        Ok(VerticalRay {
            base_vertex: base,
            path,
        })
    }

    /// Vertical ray above the coset's canonical representative.
    pub fn coset_ray(&self, coset: CosetId) -> Result<VerticalRay, BuildError> {
        let info = &self.cosets[coset.0 as usize];
        let rep = self
            .graph
            .find_token(&format!("g:{}", info.representative))
            .ok_or(BuildError::NotLevelZero(u32::MAX))?;
        self.vertical_ray(rep)
    }
}

fn component_split(graph: &Graph, vertices: &[VertexId]) -> Vec<Vec<VertexId>> {
    // components of the induced subgraph, each sorted, ordered by minimum id
    let inset: std::collections::BTreeSet<u32> = vertices.iter().map(|v| v.0).collect();
    let mut seen: BTreeMap<u32, bool> = vertices.iter().map(|v| (v.0, false)).collect();
    let mut comps = Vec::new();
    for &start in vertices {
        if seen[&start.0] {
            continue;
        }
        let mut comp = vec![start];
        seen.insert(start.0, true);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in graph.neighbors(v) {
                if inset.contains(&w) && !seen[&w] {
                    seen.insert(w, true);
                    comp.push(VertexId(w));
                    stack.push(VertexId(w));
                }
            }
        }
        comp.sort();
        comps.push(comp);
    }
    comps
}

/// Build the cusped space for (model, subgroup) at Cayley radius R and
/// horoball depth D. Vertex numbering is deterministic: Cayley vertices
/// first in breadth-first order, then horoball levels coset by coset.
pub fn build_cusped_space(
    model: &GroupModel,
    subgroup: &SubgroupSpec,
    radius: u32,
    depth: u32,
) -> Result<CuspedSpace, BuildError> {
    let ball = model.cayley_ball(radius);
    let classes: Vec<CosetClass> = coset_decompose(model, subgroup, &ball);
    let mut graph = ball.graph.clone();
    let cayley_count = graph.vertex_count();
    let mut cosets = Vec::new();

    for class in &classes {
        let comps = component_split(&graph, &class.vertices);
        let upper_start = graph.vertex_count() as u32;
        for comp in &comps {
            attach_horoball_levels(&mut graph, comp, class.id.0, depth);
        }
        let upper_end = graph.vertex_count() as u32;
        cosets.push(CosetInfo {
            id: class.id.0,
            representative: class.representative.to_string(),
            level0: class.vertices.iter().map(|v| v.0).collect(),
            upper_range: (upper_start, upper_end),
            components: comps.len(),
        });
    }

    Ok(CuspedSpace {
        graph,
        cayley_count,
        cosets,
        config: CuspedConfig {
            family: model.family.name().to_string(),
            rank: model.rank,
            subgroup: subgroup
                .generators
                .iter()
                .map(|&g| ((b'a' + g) as char).to_string())
                .collect::<Vec<_>>()
                .join(","),
            radius,
            depth,
        },
    })
}

/// Glue levels 1..=depth of a combinatorial horoball over the vertices of
/// `base` (one connected component of a coset subgraph), identifying level
/// 0 with the existing vertices. Rule-2 distances are intrinsic to the
/// component's induced subgraph.
pub fn attach_horoball_levels(graph: &mut Graph, base: &[VertexId], coset: u32, depth: u32) {
    if depth == 0 || base.is_empty() {
        return;
    }
    let n = base.len();
    // intrinsic distances: BFS restricted to the component
    let inset: std::collections::BTreeMap<u32, usize> =
        base.iter().enumerate().map(|(i, v)| (v.0, i)).collect();
    let mut intrinsic = vec![vec![u32::MAX; n]; n];
    for (i, &v) in base.iter().enumerate() {
        intrinsic[i][i] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            let du = intrinsic[i][inset[&u.0]];
            for &w in graph.neighbors(u) {
                if let Some(&j) = inset.get(&w) {
                    if intrinsic[i][j] == u32::MAX {
                        intrinsic[i][j] = du + 1;
                        queue.push_back(VertexId(w));
                    }
                }
            }
        }
    }

    let mut level_ids: Vec<Vec<VertexId>> = Vec::with_capacity(depth as usize + 1);
    level_ids.push(base.to_vec());
    for k in 1..=depth {
        let mut ids = Vec::with_capacity(n);
        for &v in base {
            let id = graph.add_vertex(VertexTag::HoroballPoint {
                coset,
                base: graph.tag(v).token(),
                level: k,
            });
            ids.push(id);
        }
        level_ids.push(ids);
    }
    // rule 2
    for k in 1..=depth as usize {
        let reach = 1u64 << (k.min(63));
        for i in 0..n {
            for j in (i + 1)..n {
                let d = intrinsic[i][j];
                if d != u32::MAX && d > 0 && (d as u64) <= reach {
                    graph.add_edge(level_ids[k][i], level_ids[k][j]);
                }
            }
        }
    }
    // rule 3
    for k in 0..depth as usize {
        for i in 0..n {
            graph.add_edge(level_ids[k][i], level_ids[k + 1][i]);
        }
    }
}

/// One fitted row of the proper-embedding table: pairs at ambient distance
/// <= m sit at intrinsic horoball distance <= n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingFit {
    /// Monotone table m -> max intrinsic distance over sampled pairs with
    /// ambient distance exactly m.
    pub proper_table: BTreeMap<u32, u32>,
    /// Minimal integer C with d_horoball <= C * d + C over all sampled
    /// pairs (d <= d_horoball always holds; also reported as a ratio).
    pub c_fit: u32,
    pub worst_ratio: f64,
    pub pairs_sampled: usize,
    pub exhausted: bool,
}

/// Sample intra-horoball pairs and compare ambient cusped-space distance
/// with the intrinsic distance of the horoball subgraph. `budget` bounds
/// the number of sampled pairs; enumeration is exhaustive when the pair
/// pool is smaller.
pub fn embedding_fit(cs: &CuspedSpace, budget: usize, seed: u64) -> EmbeddingFit {
    let mut pool: Vec<(CosetId, VertexId, VertexId)> = Vec::new();
    for info in &cs.cosets {
        let verts = cs.horoball_vertices(CosetId(info.id));
        for (i, &u) in verts.iter().enumerate() {
            for &v in verts.iter().skip(i + 1) {
                pool.push((CosetId(info.id), u, v));
            }
        }
    }
    let exhausted = pool.len() <= budget;
    let chosen: Vec<(CosetId, VertexId, VertexId)> = if exhausted {
        pool
    } else {
        // deterministic nested sample: rank by a keyed hash, take a prefix
        let mut keyed: Vec<(u64, (CosetId, VertexId, VertexId))> = pool
            .into_iter()
            .map(|t| (SeedStream::pair_key(seed, t.1 .0, t.2 .0 ^ (t.0 .0 << 20)), t))
            .collect();
        keyed.sort();
        keyed.into_iter().take(budget).map(|(_, t)| t).collect()
    };

    // intrinsic distances per horoball subgraph, computed lazily per coset
    let mut proper_table: BTreeMap<u32, u32> = BTreeMap::new();
    let mut c_fit = 0u32;
    let mut worst_ratio = 0f64;
    let mut by_coset: BTreeMap<u32, Vec<(VertexId, VertexId)>> = BTreeMap::new();
    for (c, u, v) in &chosen {
        by_coset.entry(c.0).or_default().push((*u, *v));
    }
    let pairs_sampled = chosen.len();

    for (coset, pairs) in by_coset {
        let verts = cs.horoball_vertices(CosetId(coset));
        let blocked = {
            let mut b = vec![true; cs.graph.vertex_count()];
            for v in &verts {
                b[v.idx()] = false;
            }
            b
        };
        let mut intrinsic_cache: BTreeMap<u32, Vec<Option<u32>>> = BTreeMap::new();
        for (u, v) in pairs {
            let ambient = cs
                .graph
                .shortest_distance(u, v)
                .expect("cusped space is connected");
            let intrinsic = intrinsic_cache
                .entry(u.0)
                .or_insert_with(|| cs.graph.distances_multi_blocked(&[u], &blocked))[v.idx()];
            let Some(intrinsic) = intrinsic else { continue };
            let row = proper_table.entry(ambient).or_insert(0);
            *row = (*row).max(intrinsic);
            // minimal integer C with intrinsic <= C * (ambient + 1)
            let need = intrinsic.div_ceil(ambient + 1);
            c_fit = c_fit.max(need);
            worst_ratio = worst_ratio.max(intrinsic as f64 / (ambient + 1) as f64);
        }
    }
    // cumulative max so the table is monotone in m
    let mut running = 0;
    for v in proper_table.values_mut() {
        running = running.max(*v);
        *v = running;
    }

    EmbeddingFit {
        proper_table,
        c_fit,
        worst_ratio,
        pairs_sampled,
        exhausted,
    }
}

/// Reconstruct the coset bookkeeping of a cusped space from a stored
/// graph's horoball tags (levels >= 1 name their coset and base vertex).
/// Returns `None` when the graph has no horoball structure at all.
pub fn cusped_from_graph(graph: &Graph) -> Option<CuspedSpace> {
    // per coset: id range of the upper-level vertices and the base tokens
    let mut cayley_count = 0usize;
    let mut max_level = 0u32;
    let mut per_coset: BTreeMap<u32, ((u32, u32), BTreeMap<String, ()>)> = BTreeMap::new();
    for v in graph.vertices() {
        match graph.tag(v) {
            VertexTag::GroupElement(_) | VertexTag::SpacePoint(_) => cayley_count += 1,
            VertexTag::HoroballPoint { coset, base, level } => {
                max_level = max_level.max(*level);
                let entry = per_coset
                    .entry(*coset)
                    .or_insert_with(|| ((v.0, v.0 + 1), BTreeMap::new()));
                entry.0 .0 = entry.0 .0.min(v.0);
                entry.0 .1 = entry.0 .1.max(v.0 + 1);
                entry.1.entry(base.clone()).or_insert(());
            }
        }
    }
    if per_coset.is_empty() {
        return None;
    }
    let mut cosets = Vec::new();
    for (id, (upper_range, bases)) in per_coset {
        let mut level0: Vec<u32> = bases
            .keys()
            .filter_map(|b| graph.find_token(b))
            .map(|v| v.0)
            .collect();
        level0.sort_unstable();
        level0.dedup();
        let rep = level0
            .first()
            .map(|&v| match graph.tag(VertexId(v)) {
                VertexTag::GroupElement(w) => w.clone(),
                other => other.token(),
            })
            .unwrap_or_default();
        cosets.push(CosetInfo {
            id,
            representative: rep,
            level0,
            upper_range,
            components: 1,
        });
    }
    Some(CuspedSpace {
        graph: graph.clone(),
        cayley_count,
        cosets,
        config: CuspedConfig {
            family: "stored".to_string(),
            rank: 0,
            subgroup: String::new(),
            radius: 0,
            depth: max_level,
        },
    })
}

/// Convenience constructor from names, for the CLI and the bindings.
pub fn build_by_name(
    family: &str,
    rank: usize,
    subgroup: &str,
    radius: u32,
    depth: u32,
) -> Result<CuspedSpace, BuildError> {
    let family = GroupFamily::parse(family)?;
    let model = GroupModel::new(family, rank)?;
    let sub = SubgroupSpec::parse(&model, subgroup)?;
    build_cusped_space(&model, &sub, radius, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupFamily, GroupModel, SubgroupSpec};

    fn f2_rel_a(radius: u32, depth: u32) -> CuspedSpace {
        let m = GroupModel::new(GroupFamily::FreeGroup, 2).unwrap();
        let h = SubgroupSpec::parse(&m, "a").unwrap();
        build_cusped_space(&m, &h, radius, depth).unwrap()
    }

    #[test]
    fn depth_zero_is_the_cayley_ball() {
        let m = GroupModel::new(GroupFamily::FreeGroup, 2).unwrap();
        let h = SubgroupSpec::parse(&m, "a").unwrap();
        let cs = build_cusped_space(&m, &h, 2, 0).unwrap();
        let ball = m.cayley_ball(2);
        assert_eq!(cs.graph, ball.graph);
    }

    #[test]
    fn abelian_r1_d1_has_ten_vertices() {
        let m = GroupModel::new(GroupFamily::FreeAbelian, 2).unwrap();
        let h = SubgroupSpec::parse(&m, "a").unwrap();
        let cs = build_cusped_space(&m, &h, 1, 1).unwrap();
        assert_eq!(cs.cayley_count, 5);
        assert_eq!(cs.graph.vertex_count(), 10);
        assert_eq!(cs.cosets.len(), 3);
    }

    #[test]
    fn vertical_ray_realizes_depth() {
        let cs = f2_rel_a(3, 4);
        let e = VertexId(0);
        let ray = cs.vertical_ray(e).unwrap();
        assert_eq!(ray.path.len(), 4);
        let d = cs
            .graph
            .shortest_distance(ray.path.start(), ray.path.end())
            .unwrap();
        assert_eq!(d, 4);
    }

    #[test]
    fn gluing_preserves_cayley_tags_and_neighbors() {
        let cs = f2_rel_a(2, 2);
        let ball = GroupModel::new(GroupFamily::FreeGroup, 2)
            .unwrap()
            .cayley_ball(2);
        for v in ball.graph.vertices() {
            assert_eq!(cs.graph.tag(v), ball.graph.tag(v));
            // Cayley neighbors survive gluing
            for &w in ball.graph.neighbors(v) {
                assert!(cs.graph.neighbors(v).contains(&w));
            }
        }
    }

    #[test]
    fn horoballs_only_shrink_cayley_distances() {
        let cs = f2_rel_a(3, 3);
        let ball = GroupModel::new(GroupFamily::FreeGroup, 2)
            .unwrap()
            .cayley_ball(3);
        for u in (0..cs.cayley_count as u32).step_by(7) {
            let du_cusp = cs.graph.distances_from(VertexId(u));
            let du_ball = ball.graph.distances_from(VertexId(u));
            for v in 0..cs.cayley_count {
                assert!(du_cusp[v].unwrap() <= du_ball[v].unwrap());
            }
        }
    }

    #[test]
    fn cusped_space_is_connected_and_partitioned() {
        let cs = f2_rel_a(3, 2);
        let dist = cs.graph.distances_from(VertexId(0));
        assert!(dist.iter().all(|d| d.is_some()));
        // cayley part + upper levels cover everything exactly once
        let mut covered = vec![0u8; cs.graph.vertex_count()];
        for v in 0..cs.cayley_count {
            covered[v] += 1;
        }
        for info in &cs.cosets {
            for id in info.upper_range.0..info.upper_range.1 {
                covered[id as usize] += 1;
            }
        }
        assert!(covered.iter().all(|&c| c == 1));
    }

    #[test]
    fn embedding_fit_is_tame_on_tree_case() {
        let cs = f2_rel_a(3, 2);
        let fit = embedding_fit(&cs, 100_000, 7);
        assert!(fit.exhausted);
        assert!(fit.c_fit <= 1, "tree horoballs are isometrically embedded");
        for (m, n) in &fit.proper_table {
            assert!(n >= m);
        }
    }
}
