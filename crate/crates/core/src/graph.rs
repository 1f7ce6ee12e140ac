//! Finite unweighted graphs with BFS metric structure.
//!
//! Every space in this crate (Cayley balls, horoballs, cusped spaces, wedge
//! spaces) is a [`Graph`]: symmetric adjacency lists over densely numbered
//! vertices, each carrying a [`VertexTag`] that records what the vertex is.
//! All distances are edge counts; vertex numbering and neighbor order are
//! deterministic so that geodesic enumeration is reproducible bit for bit.

use std::collections::VecDeque;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::GraphError;

/// Dense vertex index, stable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// What a vertex is: a group element, a horoball point above some base
/// vertex, or a point of one of the hand-built wedge spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VertexTag {
    /// Group element in normal form ("-" denotes the identity).
    GroupElement(String),
    /// Horoball point: which horoball (coset id), the token of the base
    /// vertex underneath, and the level >= 1. Level-0 points coincide with
    /// base-graph vertices and keep their own tags.
    HoroballPoint { coset: u32, base: String, level: u32 },
    /// Point of a wedge space, encoded as a token like `r:5`, `s2:1,-3`
    /// or `e3:4,5`.
    SpacePoint(String),
}

impl VertexTag {
    /// Single-token text form used by the serialization format.
    pub fn token(&self) -> String {
        match self {
            VertexTag::GroupElement(w) => format!("g:{w}"),
            VertexTag::HoroballPoint { coset, base, level } => {
                format!("h:{coset}:{base}:{level}")
            }
            VertexTag::SpacePoint(p) => format!("p:{p}"),
        }
    }

    /// Parse the text form back. The horoball base may itself contain
    /// colons, so coset and level are split off the outer ends.
    pub fn parse(token: &str) -> Result<VertexTag, String> {
        if let Some(w) = token.strip_prefix("g:") {
            return Ok(VertexTag::GroupElement(w.to_string()));
        }
        if let Some(p) = token.strip_prefix("p:") {
            return Ok(VertexTag::SpacePoint(p.to_string()));
        }
        if let Some(rest) = token.strip_prefix("h:") {
            let (coset_s, rest) = rest
                .split_once(':')
                .ok_or_else(|| format!("bad horoball tag {token:?}"))?;
            let (base, level_s) = rest
                .rsplit_once(':')
                .ok_or_else(|| format!("bad horoball tag {token:?}"))?;
            let coset = coset_s
                .parse()
                .map_err(|_| format!("bad coset id in {token:?}"))?;
            let level = level_s
                .parse()
                .map_err(|_| format!("bad level in {token:?}"))?;
            return Ok(VertexTag::HoroballPoint {
                coset,
                base: base.to_string(),
                level,
            });
        }
        Err(format!("unknown tag {token:?}"))
    }
}

/// Finite unweighted graph with tagged vertices.
///
/// Adjacency is symmetric, self-loop free, and each neighbor list is kept
/// sorted so traversals expand neighbors in ascending `VertexId` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    tags: Vec<VertexTag>,
}

impl Graph {
    pub fn new() -> Self {
        Graph {
            adj: Vec::new(),
            tags: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self, tag: VertexTag) -> VertexId {
        let id = self.adj.len() as u32;
        self.adj.push(Vec::new());
        self.tags.push(tag);
        VertexId(id)
    }

    /// Insert an undirected edge; self-loops and duplicates are ignored.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) {
        if u == v {
            return;
        }
        let (a, b) = (u.idx(), v.idx());
        if let Err(pos) = self.adj[a].binary_search(&v.0) {
            self.adj[a].insert(pos, v.0);
        }
        if let Err(pos) = self.adj[b].binary_search(&u.0) {
            self.adj[b].insert(pos, u.0);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|n| n.len()).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: VertexId) -> &[u32] {
        &self.adj[v.idx()]
    }

    pub fn tag(&self, v: VertexId) -> &VertexTag {
        &self.tags[v.idx()]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.adj.len() as u32).map(VertexId)
    }

    /// First vertex whose tag token equals `token`.
    pub fn find_token(&self, token: &str) -> Option<VertexId> {
        self.tags
            .iter()
            .position(|t| t.token() == token)
            .map(|i| VertexId(i as u32))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.idx() < self.adj.len()
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::BadVertex(v.0, self.adj.len() as u32))
        }
    }

    /// BFS distances from `source` to every vertex (`None` = unreachable).
    pub fn distances_from(&self, source: VertexId) -> Vec<Option<u32>> {
        self.distances_multi(std::slice::from_ref(&source))
    }

    /// Multi-source BFS: distance to the nearest source.
    pub fn distances_multi(&self, sources: &[VertexId]) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.adj.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s.idx()].is_none() {
                dist[s.idx()] = Some(0);
                queue.push_back(s.0);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize].unwrap();
            for &w in &self.adj[u as usize] {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Multi-source BFS that never enters blocked vertices (sources may be
    /// blocked-free by construction; blocked sources are skipped).
    pub fn distances_multi_blocked(
        &self,
        sources: &[VertexId],
        blocked: &[bool],
    ) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.adj.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if !blocked[s.idx()] && dist[s.idx()].is_none() {
                dist[s.idx()] = Some(0);
                queue.push_back(s.0);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize].unwrap();
            for &w in &self.adj[u as usize] {
                if !blocked[w as usize] && dist[w as usize].is_none() {
                    dist[w as usize] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// BFS edge-count distance between two vertices.
    pub fn shortest_distance(&self, u: VertexId, v: VertexId) -> Result<u32, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(0);
        }
        self.distances_from(u)[v.idx()].ok_or(GraphError::DisconnectedPair(u.0, v.0))
    }

    /// All vertices at distance <= r from `center`, ascending by id.
    pub fn ball(&self, center: VertexId, r: u32) -> Vec<VertexId> {
        let dist = self.distances_from(center);
        let mut out: Vec<VertexId> = dist
            .iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Some(x) if *x <= r))
            .map(|(i, _)| VertexId(i as u32))
            .collect();
        out.sort();
        out
    }

    /// Closest-point projection of `x` onto the nonempty set `Z`:
    /// all members of `Z` realizing `d(x, Z)`.
    pub fn closest_point_projection(
        &self,
        x: VertexId,
        z: &[VertexId],
    ) -> Result<Vec<VertexId>, GraphError> {
        if z.is_empty() {
            return Err(GraphError::EmptyTarget);
        }
        self.check_vertex(x)?;
        let dist = self.distances_from(x);
        let best = z
            .iter()
            .filter_map(|v| dist[v.idx()])
            .min()
            .ok_or(GraphError::DisconnectedPair(x.0, z[0].0))?;
        let mut out: Vec<VertexId> = z
            .iter()
            .copied()
            .filter(|v| dist[v.idx()] == Some(best))
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Maximal pairwise distance within `S`, measured in the ambient graph.
    pub fn set_diameter(&self, s: &[VertexId]) -> Result<u32, GraphError> {
        if s.is_empty() {
            return Err(GraphError::EmptyTarget);
        }
        let mut best = 0;
        for &v in s {
            self.check_vertex(v)?;
        }
        for &v in s {
            let dist = self.distances_from(v);
            for &w in s {
                let d = dist[w.idx()].ok_or(GraphError::DisconnectedPair(v.0, w.0))?;
                best = best.max(d);
            }
        }
        Ok(best)
    }

    /// Enumerate geodesics from `u` to `v` in deterministic lexicographic
    /// neighbor order, up to `cap` of them. The flag reports truncation.
    pub fn all_geodesics(
        &self,
        u: VertexId,
        v: VertexId,
        cap: usize,
    ) -> Result<(Vec<PathRecord>, bool), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let cap = cap.max(1);
        if u == v {
            return Ok((vec![PathRecord::trivial(u)], false));
        }
        let dist_v = self.distances_from(v);
        let total = dist_v[u.idx()].ok_or(GraphError::DisconnectedPair(u.0, v.0))?;
        let mut out = Vec::new();
        let mut stack = vec![u];
        let mut truncated = false;
        // DFS over the geodesic DAG; neighbor lists are sorted, so paths
        // appear in lexicographic order of their vertex sequences.
        fn walk(
            g: &Graph,
            dist_v: &[Option<u32>],
            stack: &mut Vec<VertexId>,
            out: &mut Vec<PathRecord>,
            truncated: &mut bool,
            cap: usize,
        ) {
            if out.len() >= cap {
                *truncated = true;
                return;
            }
            let cur = *stack.last().unwrap();
            let remaining = dist_v[cur.idx()].unwrap();
            if remaining == 0 {
                out.push(PathRecord::geodesic_unchecked(stack.clone()));
                return;
            }
            for &w in g.neighbors(cur) {
                if dist_v[w as usize] == Some(remaining - 1) {
                    stack.push(VertexId(w));
                    walk(g, dist_v, stack, out, truncated, cap);
                    stack.pop();
                    if *truncated && out.len() >= cap {
                        return;
                    }
                }
            }
        }
        let _ = total;
        walk(self, &dist_v, &mut stack, &mut out, &mut truncated, cap);
        Ok((out, truncated))
    }

    /// First geodesic in the deterministic enumeration order.
    pub fn first_geodesic(&self, u: VertexId, v: VertexId) -> Result<PathRecord, GraphError> {
        let (paths, _) = self.all_geodesics(u, v, 1)?;
        Ok(paths.into_iter().next().unwrap())
    }

    /// Lexicographically-last geodesic: the greedy walk taking the largest
    /// admissible neighbor at every step. In radially numbered graphs this
    /// is the outermost geodesic, which keeps concatenated detour legs from
    /// collapsing onto each other.
    pub fn last_geodesic(&self, u: VertexId, v: VertexId) -> Result<PathRecord, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let dist_v = self.distances_from(v);
        let mut remaining = dist_v[u.idx()].ok_or(GraphError::DisconnectedPair(u.0, v.0))?;
        let mut vertices = vec![u];
        let mut cur = u;
        while remaining > 0 {
            let next = self
                .neighbors(cur)
                .iter()
                .rev()
                .find(|&&w| dist_v[w as usize] == Some(remaining - 1))
                .copied()
                .expect("geodesic DAG step exists");
            cur = VertexId(next);
            vertices.push(cur);
            remaining -= 1;
        }
        Ok(PathRecord::geodesic_unchecked(vertices))
    }
}

impl Default for Graph {
    fn default() -> Self {
        Self::new()
    }
}

/// A vertex path with certified quasi-geodesic parameters.
///
/// When `certified` is set, every index pair `i < j` satisfies
/// `(j - i)/L - A <= d(v_i, v_j) <= L (j - i) + A` in the ambient graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathRecord {
    pub vertices: Vec<VertexId>,
    pub l: Rational64,
    pub a: Rational64,
    pub certified: bool,
}

impl PathRecord {
    /// Single-vertex path (the degenerate u = v case).
    pub fn trivial(v: VertexId) -> Self {
        PathRecord {
            vertices: vec![v],
            l: Rational64::one(),
            a: Rational64::zero(),
            certified: true,
        }
    }

    /// A path already known to be geodesic (e.g. produced by BFS).
    pub fn geodesic_unchecked(vertices: Vec<VertexId>) -> Self {
        PathRecord {
            vertices,
            l: Rational64::one(),
            a: Rational64::zero(),
            certified: true,
        }
    }

    /// Certify `vertices` as an (L, A)-quasi-geodesic in `g`, checking
    /// adjacency of consecutive vertices and both distortion bounds on
    /// every index pair.
    pub fn certify(
        g: &Graph,
        vertices: Vec<VertexId>,
        l: Rational64,
        a: Rational64,
    ) -> Result<Self, GraphError> {
        let fail = |reason: String| GraphError::NotCertified {
            l: l.to_string(),
            a: a.to_string(),
            reason,
        };
        if vertices.is_empty() {
            return Err(fail("empty path".into()));
        }
        for w in vertices.windows(2) {
            if g.neighbors(w[0]).binary_search(&w[1].0).is_err() {
                return Err(fail(format!("{} and {} not adjacent", w[0], w[1])));
            }
        }
        for (i, &vi) in vertices.iter().enumerate() {
            let dist = g.distances_from(vi);
            for (j, &vj) in vertices.iter().enumerate().skip(i + 1) {
                let span = Rational64::from_integer((j - i) as i64);
                let d = dist[vj.idx()]
                    .map(|d| Rational64::from_integer(d as i64))
                    .ok_or_else(|| fail(format!("{vi} and {vj} disconnected")))?;
                if span / l - a > d {
                    return Err(fail(format!(
                        "lower bound fails at pair ({i},{j}): span {span}, distance {d}"
                    )));
                }
                if d > l * span + a {
                    return Err(fail(format!(
                        "upper bound fails at pair ({i},{j}): span {span}, distance {d}"
                    )));
                }
            }
        }
        Ok(PathRecord {
            vertices,
            l,
            a,
            certified: true,
        })
    }

    pub fn start(&self) -> VertexId {
        *self.vertices.first().unwrap()
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Plain-text serialization: `vertices N edges M` header, one `id TAG`
/// line per vertex, one `u v` line (u < v) per edge.
pub fn to_text(g: &Graph) -> String {
    let mut s = String::new();
    s.push_str(&format!("vertices {} edges {}\n", g.vertex_count(), g.edge_count()));
    for v in g.vertices() {
        s.push_str(&format!("{} {}\n", v.0, g.tag(v).token()));
    }
    for v in g.vertices() {
        for &w in g.neighbors(v) {
            if v.0 < w {
                s.push_str(&format!("{} {}\n", v.0, w));
            }
        }
    }
    s
}

/// Parse the plain-text format emitted by [`to_text`].
pub fn from_text(text: &str) -> Result<Graph, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty graph file")?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 4 || head[0] != "vertices" || head[2] != "edges" {
        return Err(format!("bad header {header:?}"));
    }
    let n: usize = head[1].parse().map_err(|_| "bad vertex count")?;
    let m: usize = head[3].parse().map_err(|_| "bad edge count")?;
    let mut g = Graph::new();
    for i in 0..n {
        let line = lines.next().ok_or("truncated vertex section")?;
        let (id_s, tag_s) = line
            .split_once(' ')
            .ok_or_else(|| format!("bad vertex line {line:?}"))?;
        let id: u32 = id_s.parse().map_err(|_| format!("bad vertex id {id_s:?}"))?;
        if id as usize != i {
            return Err(format!("vertex ids must be dense, got {id} at position {i}"));
        }
        g.add_vertex(VertexTag::parse(tag_s)?);
    }
    for _ in 0..m {
        let line = lines.next().ok_or("truncated edge section")?;
        let mut it = line.split_whitespace();
        let u: u32 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad edge line {line:?}"))?;
        let v: u32 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad edge line {line:?}"))?;
        if u >= v {
            return Err(format!("edge lines must have u < v, got {line:?}"));
        }
        if v as usize >= n {
            return Err(format!("edge endpoint {v} out of range"));
        }
        g.add_edge(VertexId(u), VertexId(v));
    }
    if let Some(extra) = lines.next() {
        if !extra.trim().is_empty() {
            return Err(format!("trailing content {extra:?}"));
        }
    }
    if g.edge_count() != m {
        return Err(format!("edge count mismatch: header {m}, parsed {}", g.edge_count()));
    }
    Ok(g)
}
