//! Slow, independent reference computations used to cross-check the fast
//! implementations. Nothing here shares code with the BFS-based query path:
//! distances come from min-plus relaxation or bounded path enumeration, and
//! barycenters from explicit per-vertex minimization.

use crate::graph::{Graph, VertexId};

/// All-pairs distances by iterated min-plus relaxation (Bellman-Ford run to
/// fixpoint). Exact on unweighted graphs; `None` marks unreachable pairs.
pub fn minplus_all_pairs(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let n = g.vertex_count();
    let inf = u32::MAX;
    let mut dist = vec![vec![inf; n]; n];
    for v in 0..n {
        dist[v][v] = 0;
    }
    loop {
        let mut changed = false;
        for v in 0..n {
            for &w in g.neighbors(VertexId(v as u32)) {
                for t in 0..n {
                    let dw = dist[w as usize][t];
                    if dw != inf && dw + 1 < dist[v][t] {
                        dist[v][t] = dw + 1;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|d| if d == inf { None } else { Some(d) })
                .collect()
        })
        .collect()
}

/// Distance by exhaustive enumeration of simple paths with an iterative
/// deepening cap. Returns `None` when no path of length <= `max_len` exists.
pub fn dfs_enum_distance(g: &Graph, u: VertexId, v: VertexId, max_len: u32) -> Option<u32> {
    for cap in 0..=max_len {
        let mut on_path = vec![false; g.vertex_count()];
        on_path[u.idx()] = true;
        if dfs_reach(g, u, v, cap, &mut on_path) {
            return Some(cap);
        }
    }
    None
}

fn dfs_reach(g: &Graph, cur: VertexId, target: VertexId, budget: u32, on_path: &mut [bool]) -> bool {
    if cur == target {
        return true;
    }
    if budget == 0 {
        return false;
    }
    for &w in g.neighbors(cur) {
        if !on_path[w as usize] {
            on_path[w as usize] = true;
            let hit = dfs_reach(g, VertexId(w), target, budget - 1, on_path);
            on_path[w as usize] = false;
            if hit {
                return true;
            }
        }
    }
    false
}

/// Brute-force delta-barycenter: for every vertex of the graph, compute its
/// distance to each side by explicit minimization over side vertices, with
/// per-vertex BFS distances; return the minimal max-distance and the
/// smallest witness attaining it.
pub fn brute_force_barycenter(
    g: &Graph,
    sides: [&[VertexId]; 3],
) -> Option<(u32, VertexId)> {
    let mut best: Option<(u32, VertexId)> = None;
    for q in g.vertices() {
        let dist = g.distances_from(q);
        let mut worst = 0u32;
        let mut ok = true;
        for side in sides.iter() {
            let mut nearest = None;
            for v in side.iter() {
                if let Some(d) = dist[v.idx()] {
                    nearest = Some(nearest.map_or(d, |n: u32| n.min(d)));
                }
            }
            match nearest {
                Some(d) => worst = worst.max(d),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            match best {
                Some((b, _)) if b <= worst => {}
                _ => best = Some((worst, q)),
            }
        }
    }
    best
}

/// Count reduced words of length <= r in the free group of the given rank
/// (used to pin Cayley ball sizes).
pub fn reduced_word_count(rank: u64, radius: u32) -> u64 {
    let mut total = 1u64;
    let mut sphere = 2 * rank;
    for _ in 1..=radius {
        total += sphere;
        sphere *= 2 * rank - 1;
    }
    if radius == 0 {
        1
    } else {
        total
    }
}

/// Count lattice points of l1 norm <= r in Z^2.
pub fn l1_ball_count(radius: u64) -> u64 {
    2 * radius * radius + 2 * radius + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexTag;

    #[test]
    fn minplus_agrees_with_bfs_on_a_cycle() {
        let mut g = Graph::new();
        for i in 0..8 {
            g.add_vertex(VertexTag::SpacePoint(format!("r:{i}")));
        }
        for i in 0..8 {
            g.add_edge(VertexId(i), VertexId((i + 1) % 8));
        }
        let oracle = minplus_all_pairs(&g);
        for u in g.vertices() {
            let bfs = g.distances_from(u);
            for v in g.vertices() {
                assert_eq!(oracle[u.idx()][v.idx()], bfs[v.idx()]);
            }
        }
    }

    #[test]
    fn word_counts() {
        assert_eq!(reduced_word_count(2, 0), 1);
        assert_eq!(reduced_word_count(2, 1), 5);
        assert_eq!(reduced_word_count(2, 2), 17);
        assert_eq!(l1_ball_count(2), 13);
    }
}
