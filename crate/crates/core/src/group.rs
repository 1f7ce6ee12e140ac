//! Group-element oracles and Cayley-ball generation.
//!
//! Supported families are hard-coded: free groups, free abelian groups, and
//! the free product Z * Z (same normal forms as the free group of rank 2 but
//! kept as its own family because its peripheral structure differs). These
//! all have solvable normal forms; the oracle interface leaves room for
//! more families. Infinite index of peripheral subgroups is assumed per
//! family, not verified.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::GroupError;
use crate::graph::{Graph, VertexId, VertexTag};

/// One generator or its inverse. `gen` indexes into `a..=z`; uppercase in
/// word notation means the inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: u8,
    pub inv: bool,
}

impl Letter {
    pub fn symbol(self) -> char {
        let base = if self.inv { b'A' } else { b'a' };
        (base + self.gen) as char
    }

    pub fn from_symbol(c: char) -> Result<Letter, GroupError> {
        match c {
            'a'..='z' => Ok(Letter {
                gen: c as u8 - b'a',
                inv: false,
            }),
            'A'..='Z' => Ok(Letter {
                gen: c as u8 - b'A',
                inv: true,
            }),
            _ => Err(GroupError::UnknownGenerator(c)),
        }
    }

    pub fn inverse(self) -> Letter {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }

    /// Order used for lexicographic comparisons: a < A < b < B < ...
    fn rank(self) -> u16 {
        (self.gen as u16) * 2 + self.inv as u16
    }
}

/// Group element as a normal-form word. The empty word is the identity;
/// its text form is "-".
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            f.write_str("-")
        } else {
            for l in &self.0 {
                write!(f, "{}", l.symbol())?;
            }
            Ok(())
        }
    }
}

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parse(s: &str) -> Result<Word, GroupError> {
        if s == "-" || s.is_empty() {
            return Ok(Word::identity());
        }
        let letters = s
            .chars()
            .map(Letter::from_symbol)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| GroupError::BadWord(s.to_string()))?;
        Ok(Word(letters))
    }

    /// (length, lexicographic) order; ties broken by the a < A < b < B
    /// symbol ranking. Used wherever a canonical representative is needed.
    pub fn canonical_cmp(&self, other: &Word) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| {
                let lhs: Vec<u16> = self.0.iter().map(|l| l.rank()).collect();
                let rhs: Vec<u16> = other.0.iter().map(|l| l.rank()).collect();
                lhs.cmp(&rhs)
            })
    }
}

/// The concrete group families with solvable word problems used here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupFamily {
    FreeGroup,
    FreeAbelian,
    FreeProductZZ,
}

impl GroupFamily {
    pub fn name(self) -> &'static str {
        match self {
            GroupFamily::FreeGroup => "free",
            GroupFamily::FreeAbelian => "abelian",
            GroupFamily::FreeProductZZ => "zxz",
        }
    }

    pub fn parse(s: &str) -> Result<GroupFamily, GroupError> {
        match s {
            "free" | "freegroup" => Ok(GroupFamily::FreeGroup),
            "abelian" | "freeabelian" => Ok(GroupFamily::FreeAbelian),
            "zxz" | "zz" | "freeproduct" => Ok(GroupFamily::FreeProductZZ),
            other => Err(GroupError::UnsupportedFamily(other.to_string())),
        }
    }
}

/// Oracle for one group: normal forms, multiplication, word length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupModel {
    pub family: GroupFamily,
    pub rank: usize,
}

impl GroupModel {
    pub fn new(family: GroupFamily, rank: usize) -> Result<GroupModel, GroupError> {
        let rank_ok = match family {
            GroupFamily::FreeProductZZ => rank == 2,
            _ => (1..=26).contains(&rank),
        };
        if !rank_ok {
            return Err(GroupError::BadRank(rank));
        }
        Ok(GroupModel { family, rank })
    }

    pub fn generators(&self) -> Vec<Letter> {
        (0..self.rank as u8)
            .map(|gen| Letter { gen, inv: false })
            .collect()
    }

    /// Normalize a letter sequence into the family's canonical form.
    pub fn normalize(&self, letters: &[Letter]) -> Word {
        match self.family {
            GroupFamily::FreeGroup | GroupFamily::FreeProductZZ => {
                // free reduction
                let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
                for &l in letters {
                    if stack.last() == Some(&l.inverse()) {
                        stack.pop();
                    } else {
                        stack.push(l);
                    }
                }
                Word(stack)
            }
            GroupFamily::FreeAbelian => {
                let mut exps = vec![0i64; self.rank];
                for &l in letters {
                    exps[l.gen as usize] += if l.inv { -1 } else { 1 };
                }
                let mut word = Vec::new();
                for (gen, &e) in exps.iter().enumerate() {
                    let letter = Letter {
                        gen: gen as u8,
                        inv: e < 0,
                    };
                    for _ in 0..e.unsigned_abs() {
                        word.push(letter);
                    }
                }
                Word(word)
            }
        }
    }

    pub fn multiply(&self, u: &Word, v: &Word) -> Word {
        let mut letters = u.0.clone();
        letters.extend_from_slice(&v.0);
        self.normalize(&letters)
    }

    pub fn apply(&self, u: &Word, l: Letter) -> Word {
        let mut letters = u.0.clone();
        letters.push(l);
        self.normalize(&letters)
    }

    pub fn inverse(&self, u: &Word) -> Word {
        let letters: Vec<Letter> = u.0.iter().rev().map(|l| l.inverse()).collect();
        self.normalize(&letters)
    }

    /// Word length of the normal form = distance to the identity in the
    /// full Cayley graph.
    pub fn length(&self, u: &Word) -> usize {
        self.normalize(&u.0).len()
    }

    /// Cayley ball of radius R: vertices are elements of length <= R in
    /// breadth-first insertion order, edges are generator multiplications
    /// staying inside the ball.
    pub fn cayley_ball(&self, radius: u32) -> CayleyBall {
        let mut graph = Graph::new();
        let mut index: BTreeMap<String, VertexId> = BTreeMap::new();
        let mut elements: Vec<Word> = Vec::new();

        let root = Word::identity();
        graph.add_vertex(VertexTag::GroupElement(root.to_string()));
        index.insert(root.to_string(), VertexId(0));
        elements.push(root);

        // generator application order: a, A, b, B, ... so insertion order
        // follows the canonical word ranking within each sphere
        let mut step_letters = Vec::new();
        for gen in 0..self.rank as u8 {
            step_letters.push(Letter { gen, inv: false });
            step_letters.push(Letter { gen, inv: true });
        }

        let mut head = 0;
        while head < elements.len() {
            let w = elements[head].clone();
            let wid = VertexId(head as u32);
            head += 1;
            for &l in &step_letters {
                let next = self.apply(&w, l);
                if next.len() as u32 > radius {
                    continue;
                }
                let key = next.to_string();
                let nid = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = graph.add_vertex(VertexTag::GroupElement(key.clone()));
                        index.insert(key, id);
                        elements.push(next);
                        id
                    }
                };
                graph.add_edge(wid, nid);
            }
        }

        CayleyBall {
            model: self.clone(),
            radius,
            graph,
            elements,
            index,
        }
    }
}

/// A truncated Cayley graph together with its element table.
#[derive(Debug, Clone)]
pub struct CayleyBall {
    pub model: GroupModel,
    pub radius: u32,
    pub graph: Graph,
    pub elements: Vec<Word>,
    index: BTreeMap<String, VertexId>,
}

impl CayleyBall {
    pub fn vertex_of(&self, w: &Word) -> Option<VertexId> {
        self.index.get(&w.to_string()).copied()
    }

    pub fn element(&self, v: VertexId) -> &Word {
        &self.elements[v.idx()]
    }
}

/// A subgroup generated by a subset of the model's generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupSpec {
    pub generators: Vec<u8>,
}

impl SubgroupSpec {
    pub fn new(model: &GroupModel, generators: &[u8]) -> Result<SubgroupSpec, GroupError> {
        let mut gens: Vec<u8> = generators.to_vec();
        gens.sort_unstable();
        gens.dedup();
        for &g in &gens {
            if g as usize >= model.rank {
                return Err(GroupError::UnknownGenerator(
                    Letter { gen: g, inv: false }.symbol(),
                ));
            }
        }
        Ok(SubgroupSpec { generators: gens })
    }

    pub fn parse(model: &GroupModel, s: &str) -> Result<SubgroupSpec, GroupError> {
        let mut gens = Vec::new();
        for part in s.split(',').filter(|p| !p.is_empty()) {
            let c = part.chars().next().unwrap();
            if part.len() != 1 {
                return Err(GroupError::BadWord(part.to_string()));
            }
            let l = Letter::from_symbol(c)?;
            gens.push(l.gen);
        }
        SubgroupSpec::new(model, &gens)
    }

    fn contains_gen(&self, gen: u8) -> bool {
        self.generators.binary_search(&gen).is_ok()
    }

    /// Membership in the subgroup generated by this generator subset.
    /// For free and free-product families the subgroup is a free factor,
    /// so membership reads off the normal form; for free abelian groups
    /// it is a coordinate-support condition.
    pub fn contains(&self, model: &GroupModel, w: &Word) -> bool {
        let nf = model.normalize(&w.0);
        nf.0.iter().all(|l| self.contains_gen(l.gen))
    }

    /// Canonical representative of the left coset wH: the unique
    /// minimal-length, lexicographically-least member.
    pub fn coset_representative(&self, model: &GroupModel, w: &Word) -> Word {
        let mut nf = model.normalize(&w.0);
        match model.family {
            GroupFamily::FreeGroup | GroupFamily::FreeProductZZ => {
                // strip subgroup letters off the right end
                while let Some(last) = nf.0.last() {
                    if self.contains_gen(last.gen) {
                        nf.0.pop();
                    } else {
                        break;
                    }
                }
                nf
            }
            GroupFamily::FreeAbelian => {
                let kept: Vec<Letter> =
                    nf.0.into_iter().filter(|l| !self.contains_gen(l.gen)).collect();
                model.normalize(&kept)
            }
        }
    }
}

/// Deterministic coset identifier: index into the representative list
/// sorted by (length, lexicographic) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CosetId(pub u32);

/// A left coset class inside a Cayley ball.
#[derive(Debug, Clone)]
pub struct CosetClass {
    pub id: CosetId,
    pub representative: Word,
    /// Ball vertices belonging to the coset, ascending.
    pub vertices: Vec<VertexId>,
}

/// Partition the ball's vertices into left cosets of the subgroup.
/// Classes truncated by the ball boundary are kept.
pub fn coset_decompose(
    model: &GroupModel,
    subgroup: &SubgroupSpec,
    ball: &CayleyBall,
) -> Vec<CosetClass> {
    let mut classes: BTreeMap<String, (Word, Vec<VertexId>)> = BTreeMap::new();
    for v in ball.graph.vertices() {
        let rep = subgroup.coset_representative(model, ball.element(v));
        classes
            .entry(rep.to_string())
            .or_insert_with(|| (rep, Vec::new()))
            .1
            .push(v);
    }
    let mut reps: Vec<(Word, Vec<VertexId>)> = classes.into_values().collect();
    reps.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    reps.into_iter()
        .enumerate()
        .map(|(i, (representative, mut vertices))| {
            vertices.sort();
            CosetClass {
                id: CosetId(i as u32),
                representative,
                vertices,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupModel {
        GroupModel::new(GroupFamily::FreeGroup, 2).unwrap()
    }

    fn z2() -> GroupModel {
        GroupModel::new(GroupFamily::FreeAbelian, 2).unwrap()
    }

    #[test]
    fn normal_form_is_idempotent_and_identity_empty() {
        let m = f2();
        let w = Word::parse("abBA").unwrap();
        let nf = m.normalize(&w.0);
        assert!(nf.is_empty());
        let nf2 = m.normalize(&nf.0);
        assert_eq!(nf, nf2);
        assert_eq!(nf.to_string(), "-");
    }

    #[test]
    fn abelian_normal_form_sorts_generators() {
        let m = z2();
        let w = Word::parse("baB").unwrap();
        assert_eq!(m.normalize(&w.0).to_string(), "a");
        let w = Word::parse("bab").unwrap();
        assert_eq!(m.normalize(&w.0).to_string(), "abb");
    }

    #[test]
    fn multiplication_associative_on_sampled_triples() {
        for m in [f2(), z2()] {
            let words: Vec<Word> = ["a", "bA", "aB", "bb", "-"]
                .iter()
                .map(|s| Word::parse(s).unwrap())
                .collect();
            for u in &words {
                for v in &words {
                    for w in &words {
                        let lhs = m.multiply(&m.multiply(u, v), w);
                        let rhs = m.multiply(u, &m.multiply(v, w));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn free_group_ball_counts() {
        let m = f2();
        let b1 = m.cayley_ball(1);
        assert_eq!(b1.graph.vertex_count(), 5);
        assert_eq!(b1.graph.edge_count(), 4);
        let b2 = m.cayley_ball(2);
        assert_eq!(b2.graph.vertex_count(), 17);
    }

    #[test]
    fn abelian_ball_counts() {
        let m = z2();
        let b1 = m.cayley_ball(1);
        assert_eq!(b1.graph.vertex_count(), 5);
        let b2 = m.cayley_ball(2);
        assert_eq!(b2.graph.vertex_count(), 13);
    }

    #[test]
    fn ball_embeds_in_larger_ball() {
        let m = f2();
        let small = m.cayley_ball(2);
        let big = m.cayley_ball(3);
        for v in small.graph.vertices() {
            let w = small.element(v);
            let vb = big.vertex_of(w).expect("element missing from bigger ball");
            // every small-ball edge is present in the big ball
            for &n in small.graph.neighbors(v) {
                let wn = small.element(VertexId(n));
                let nb = big.vertex_of(wn).unwrap();
                assert!(big.graph.neighbors(vb).contains(&nb.0));
            }
        }
    }

    #[test]
    fn word_metric_matches_graph_metric() {
        for m in [f2(), z2()] {
            let ball = m.cayley_ball(4);
            let e = VertexId(0);
            let dist = ball.graph.distances_from(e);
            for v in ball.graph.vertices() {
                let w = ball.element(v);
                if w.len() <= 4 {
                    assert_eq!(dist[v.idx()], Some(w.len() as u32), "element {w}");
                }
            }
        }
    }

    #[test]
    fn subgroup_membership_free_factor() {
        let m = f2();
        let h = SubgroupSpec::parse(&m, "a").unwrap();
        assert!(h.contains(&m, &Word::identity()));
        assert!(h.contains(&m, &Word::parse("aaa").unwrap()));
        assert!(!h.contains(&m, &Word::parse("ab").unwrap()));
    }

    #[test]
    fn whole_group_single_coset() {
        let m = f2();
        let h = SubgroupSpec::parse(&m, "a,b").unwrap();
        let ball = m.cayley_ball(2);
        let classes = coset_decompose(&m, &h, &ball);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].vertices.len(), 17);
    }

    #[test]
    fn abelian_cosets_are_horizontal_lines() {
        let m = z2();
        let h = SubgroupSpec::parse(&m, "a").unwrap();
        let ball = m.cayley_ball(1);
        let classes = coset_decompose(&m, &h, &ball);
        assert_eq!(classes.len(), 3);
        let reps: Vec<String> = classes
            .iter()
            .map(|c| c.representative.to_string())
            .collect();
        assert_eq!(reps, vec!["-", "b", "B"]);
    }

    #[test]
    fn free_group_coset_count_radius_two() {
        // representatives among words of length <= 2 are exactly the reduced
        // words not ending in a or A: -, b, B, ab, Ab, bb, aB, AB, BB
        let m = f2();
        let h = SubgroupSpec::parse(&m, "a").unwrap();
        let ball = m.cayley_ball(2);
        let classes = coset_decompose(&m, &h, &ball);
        assert_eq!(classes.len(), 9);
    }

    #[test]
    fn cosets_partition_the_ball() {
        let m = f2();
        let h = SubgroupSpec::parse(&m, "a").unwrap();
        let ball = m.cayley_ball(3);
        let classes = coset_decompose(&m, &h, &ball);
        let mut seen = vec![false; ball.graph.vertex_count()];
        for c in &classes {
            for v in &c.vertices {
                assert!(!seen[v.idx()], "vertex in two classes");
                seen[v.idx()] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn representative_is_canonical_member() {
        let m = f2();
        let h = SubgroupSpec::parse(&m, "a").unwrap();
        for s in ["ba", "bA", "abaa", "Aba"] {
            let w = Word::parse(s).unwrap();
            let rep = h.coset_representative(&m, &w);
            // same coset: rep^{-1} w in H
            let diff = m.multiply(&m.inverse(&rep), &w);
            assert!(h.contains(&m, &diff));
            // rep has no shorter coset member: stripping is length-minimal
            assert!(rep.len() <= w.len());
        }
    }

    #[test]
    fn zxz_behaves_like_rank_two_free_group() {
        let m = GroupModel::new(GroupFamily::FreeProductZZ, 2).unwrap();
        let ball = m.cayley_ball(2);
        assert_eq!(ball.graph.vertex_count(), 17);
    }
}
