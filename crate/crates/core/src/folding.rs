//! Stallings folding of labeled graphs, used to decide whether an
//! endomorphism of a free group is onto (and so, the free group being
//! Hopfian, an automorphism).
//!
//! Edges are stored once, `src --label--> dst`; traversing an edge backwards
//! reads the inverse label.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::freegroup::{compose_hom, GroupError, GroupHom, GroupWord, Letter, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoldError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("graph is not folded")]
    NotFolded,
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("label {label} out of range for rank {rank}")]
    BadLabel { label: usize, rank: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: usize,
}

/// A connected graph with edges labeled by free generators and a
/// distinguished basepoint. Vertices are `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    rank: usize,
    vertex_count: usize,
    edges: Vec<Edge>,
    basepoint: usize,
}

impl LabeledGraph {
    pub fn new(rank: usize, vertex_count: usize, edges: Vec<Edge>, basepoint: usize) -> Result<Self, FoldError> {
        if basepoint >= vertex_count {
            return Err(FoldError::BadVertex(basepoint));
        }
        for e in &edges {
            if e.src >= vertex_count || e.dst >= vertex_count {
                return Err(FoldError::BadVertex(e.src.max(e.dst)));
            }
            if e.label >= rank {
                return Err(FoldError::BadLabel { label: e.label, rank });
            }
        }
        let g = LabeledGraph { rank, vertex_count, edges, basepoint };
        if !g.is_connected() {
            return Err(FoldError::Disconnected);
        }
        Ok(g)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.src].push(e.dst);
            adj[e.dst].push(e.src);
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![self.basepoint];
        seen[self.basepoint] = true;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// No vertex has two outgoing, or two incoming, edges with one label.
    pub fn is_folded(&self) -> bool {
        let mut seen = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            for key in [(e.src, e.label, true), (e.dst, e.label, false)] {
                if seen.insert(key, i).is_some() {
                    return false;
                }
            }
        }
        true
    }

    /// Single vertex carrying one loop per generator.
    pub fn is_rose(&self) -> bool {
        if self.vertex_count != 1 || self.edges.len() != self.rank {
            return false;
        }
        let mut labels: Vec<usize> = self.edges.iter().map(|e| e.label).collect();
        labels.sort_unstable();
        labels.iter().copied().eq(0..self.rank)
    }
}

/// Wedge of subdivided loops at the basepoint, one loop spelling each word.
pub fn bouquet(words: &[GroupWord], rank: usize) -> Result<LabeledGraph, FoldError> {
    Ok(Work::bouquet(words, rank, None)?.into_graph())
}

/// Folds to the unique reduced core graph: equally labeled edges sharing an
/// endpoint are identified until none remain, then hanging trees away from
/// the basepoint are trimmed.
pub fn fold(g: &LabeledGraph) -> LabeledGraph {
    fold_in_order(g, |_| 0)
}

/// [`fold`] with the order of vertex processing chosen by `pick`, which
/// receives the number of pending vertices and returns the index of the
/// one to process next. The result does not depend on the choices.
pub fn fold_in_order(g: &LabeledGraph, mut pick: impl FnMut(usize) -> usize) -> LabeledGraph {
    let mut work = Work::from_graph(g);
    work.fold(&mut pick);
    work.trim();
    work.into_graph()
}

/// `E − V + 1` of the trimmed core.
pub fn subgroup_rank(g: &LabeledGraph) -> Result<usize, FoldError> {
    if !g.is_folded() {
        return Err(FoldError::NotFolded);
    }
    let mut work = Work::from_graph(g);
    work.trim();
    let core = work.into_graph();
    Ok(core.edges.len() + 1 - core.vertex_count)
}

fn check_square(h: &GroupHom) -> Result<(), FoldError> {
    if h.domain_rank() != h.codomain_rank() {
        return Err(GroupError::RankMismatch {
            expected: h.codomain_rank(),
            found: h.domain_rank(),
        }
        .into());
    }
    Ok(())
}

/// Folded image graph of an endomorphism.
pub fn image_graph(h: &GroupHom) -> Result<LabeledGraph, FoldError> {
    Ok(fold(&bouquet(h.images(), h.codomain_rank())?))
}

/// True iff the images generate the whole free group, i.e. the folded
/// bouquet of images is the rose on all generators.
pub fn is_invertible(h: &GroupHom) -> Result<bool, FoldError> {
    check_square(h)?;
    Ok(image_graph(h)?.is_rose())
}

/// Inverse automorphism of an invertible endomorphism, read off the loops of
/// the folded rose. Verified in both composition orders before returning.
pub fn inverse(h: &GroupHom) -> Result<Option<GroupHom>, FoldError> {
    check_square(h)?;
    let n = h.codomain_rank();
    let mut work = Work::bouquet(h.images(), n, Some(h.domain_rank()))?;
    work.fold(&mut |_| 0);
    work.trim();
    let costs = work.costs.as_ref().expect("tracked");
    let live: Vec<usize> = (0..work.edges.len()).filter(|&e| work.alive[e]).collect();
    if live.len() != n || live.iter().any(|&e| work.edges[e].src != work.edges[e].dst) {
        return Ok(None);
    }
    let mut images = vec![None; n];
    for &e in &live {
        let slot = &mut images[work.edges[e].label];
        if slot.is_some() {
            return Ok(None);
        }
        *slot = Some(costs[e].clone());
    }
    let Some(images) = images.into_iter().collect::<Option<Vec<_>>>() else {
        return Ok(None);
    };
    let inv = GroupHom::new(h.domain_rank(), images)?;
    let id = GroupHom::identity(n);
    if compose_hom(h, &inv)? != id || compose_hom(&inv, h)? != id {
        return Ok(None);
    }
    Ok(Some(inv))
}

/// Mutable working copy used while folding. Optionally each edge carries a
/// word in the domain generators ("cost") such that for every closed path at
/// the basepoint, the hom applied to the product of costs equals the label
/// read along the path.
struct Work {
    rank: usize,
    base: usize,
    edges: Vec<Edge>,
    alive: Vec<bool>,
    vertex_alive: Vec<bool>,
    adj: Vec<Vec<usize>>,
    costs: Option<Vec<GroupWord>>,
}

impl Work {
    fn empty(rank: usize) -> Self {
        Work {
            rank,
            base: 0,
            edges: Vec::new(),
            alive: Vec::new(),
            vertex_alive: vec![true],
            adj: vec![Vec::new()],
            costs: None,
        }
    }

    fn add_vertex(&mut self) -> usize {
        self.vertex_alive.push(true);
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    fn add_edge(&mut self, src: usize, dst: usize, label: usize) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { src, dst, label });
        self.alive.push(true);
        self.adj[src].push(id);
        if dst != src {
            self.adj[dst].push(id);
        }
        id
    }

    fn from_graph(g: &LabeledGraph) -> Self {
        let mut w = Work::empty(g.rank);
        for _ in 1..g.vertex_count {
            w.add_vertex();
        }
        w.base = g.basepoint;
        for e in &g.edges {
            w.add_edge(e.src, e.dst, e.label);
        }
        w
    }

    /// `domain_rank` switches on cost tracking; loop `j` then costs `x_j`.
    fn bouquet(words: &[GroupWord], rank: usize, domain_rank: Option<usize>) -> Result<Self, FoldError> {
        let mut w = Work::empty(rank);
        let mut costs = Vec::new();
        for (j, word) in words.iter().enumerate() {
            if word.rank() != rank {
                return Err(GroupError::RankMismatch { expected: rank, found: word.rank() }.into());
            }
            let len = word.len();
            let mut at = w.base;
            for (i, l) in word.letters().iter().enumerate() {
                let next = if i + 1 == len { w.base } else { w.add_vertex() };
                let id = match l.sign {
                    Sign::Pos => w.add_edge(at, next, l.gen),
                    Sign::Neg => w.add_edge(next, at, l.gen),
                };
                if let Some(m) = domain_rank {
                    let cost = if i + 1 == len {
                        let x = Letter { gen: j, sign: l.sign };
                        crate::freegroup::reduce(m, [x])?
                    } else {
                        GroupWord::identity(m)
                    };
                    debug_assert_eq!(costs.len(), id);
                    costs.push(cost);
                }
                at = next;
            }
        }
        if domain_rank.is_some() {
            w.costs = Some(costs);
        }
        Ok(w)
    }

    fn other_end(&self, e: usize, v: usize, outgoing: bool) -> usize {
        let edge = self.edges[e];
        debug_assert!(if outgoing { edge.src == v } else { edge.dst == v });
        if outgoing {
            edge.dst
        } else {
            edge.src
        }
    }

    /// First pair of live edges at `v` with the same label and direction.
    fn find_clash(&self, v: usize) -> Option<(usize, usize, bool)> {
        let mut seen: HashMap<(usize, bool), usize> = HashMap::new();
        for &e in &self.adj[v] {
            if !self.alive[e] {
                continue;
            }
            let edge = self.edges[e];
            for (end, outgoing) in [(edge.src, true), (edge.dst, false)] {
                if end != v {
                    continue;
                }
                if let Some(&prev) = seen.get(&(edge.label, outgoing)) {
                    if prev != e {
                        return Some((prev, e, outgoing));
                    }
                } else {
                    seen.insert((edge.label, outgoing), e);
                }
            }
        }
        None
    }

    fn fold(&mut self, pick: &mut dyn FnMut(usize) -> usize) {
        let mut pending: VecDeque<usize> = (0..self.adj.len()).collect();
        let mut queued = vec![true; self.adj.len()];
        while !pending.is_empty() {
            let idx = pick(pending.len()).min(pending.len() - 1);
            let v = pending.remove(idx).expect("index in range");
            queued[v] = false;
            if !self.vertex_alive[v] {
                continue;
            }
            let Some((e1, e2, outgoing)) = self.find_clash(v) else {
                continue;
            };
            let survivor = self.identify(v, e1, e2, outgoing);
            for u in [v, survivor] {
                if !queued[u] {
                    queued[u] = true;
                    pending.push_back(u);
                }
            }
        }
    }

    /// Identifies `e2` with `e1` (same label, same direction at `v`) and
    /// merges their far endpoints. Returns the surviving far endpoint.
    fn identify(&mut self, v: usize, mut e1: usize, mut e2: usize, outgoing: bool) -> usize {
        let mut x1 = self.other_end(e1, v, outgoing);
        let mut x2 = self.other_end(e2, v, outgoing);
        if x2 == self.base && x1 != self.base {
            std::mem::swap(&mut e1, &mut e2);
            std::mem::swap(&mut x1, &mut x2);
        }
        // Moving x2 onto x1 shifts the cost potential at x2 by `t`: edges
        // leaving x2 get t⁻¹ prepended, edges entering get t appended.
        let shift = self.costs.as_ref().map(|c| {
            let (c1, c2) = (&c[e1], &c[e2]);
            let t = if outgoing {
                c2.inverse().mul(c1)
            } else {
                c2.mul(&c1.inverse())
            };
            t.expect("costs share the domain rank")
        });
        self.alive[e2] = false;
        if x1 != x2 {
            let moved = std::mem::take(&mut self.adj[x2]);
            for &e in &moved {
                if !self.alive[e] {
                    continue;
                }
                let edge = &mut self.edges[e];
                let (leaves, enters) = (edge.src == x2, edge.dst == x2);
                if leaves {
                    edge.src = x1;
                }
                if enters {
                    edge.dst = x1;
                }
                if let (Some(t), Some(costs)) = (&shift, self.costs.as_mut()) {
                    let mut c = costs[e].clone();
                    if leaves {
                        c = t.inverse().mul(&c).expect("same rank");
                    }
                    if enters {
                        c = c.mul(t).expect("same rank");
                    }
                    costs[e] = c;
                }
                let was_loop_here = self.adj[x1].contains(&e);
                if !was_loop_here {
                    self.adj[x1].push(e);
                }
            }
            self.vertex_alive[x2] = false;
        }
        x1
    }

    /// Removes non-basepoint vertices of degree one, repeatedly.
    fn trim(&mut self) {
        loop {
            let mut changed = false;
            for v in 0..self.adj.len() {
                if v == self.base || !self.vertex_alive[v] {
                    continue;
                }
                let live: Vec<usize> = self.adj[v].iter().copied().filter(|&e| self.alive[e]).collect();
                let degree: usize = live
                    .iter()
                    .map(|&e| if self.edges[e].src == self.edges[e].dst { 2 } else { 1 })
                    .sum();
                if degree <= 1 {
                    for e in live {
                        self.alive[e] = false;
                    }
                    self.vertex_alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Live part renumbered in breadth-first order from the basepoint,
    /// scanning edges by (label, outgoing first). For folded graphs this is
    /// a canonical form of the based labeled graph.
    fn into_graph(self) -> LabeledGraph {
        let mut out: Vec<Vec<(usize, bool, usize)>> = vec![Vec::new(); self.adj.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            if !self.alive[e] {
                continue;
            }
            out[edge.src].push((edge.label, false, edge.dst));
            out[edge.dst].push((edge.label, true, edge.src));
        }
        for list in &mut out {
            list.sort_unstable();
        }
        let mut order = vec![usize::MAX; self.adj.len()];
        let mut queue = VecDeque::from([self.base]);
        order[self.base] = 0;
        let mut next = 1;
        while let Some(v) = queue.pop_front() {
            for &(_, _, u) in &out[v] {
                if order[u] == usize::MAX {
                    order[u] = next;
                    next += 1;
                    queue.push_back(u);
                }
            }
        }
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(e, _)| self.alive[e])
            .map(|(_, e)| Edge { src: order[e.src], dst: order[e.dst], label: e.label })
            .collect();
        edges.sort_unstable();
        LabeledGraph { rank: self.rank, vertex_count: next, edges, basepoint: 0 }
    }
}

/// Reads the subgroup element spelled by a closed path given as a sequence
/// of `(edge index, forwards)` steps.
pub fn read_path(g: &LabeledGraph, path: &[(usize, bool)]) -> Result<GroupWord, FoldError> {
    let letters = path.iter().map(|&(e, fwd)| {
        let label = g.edges[e].label;
        if fwd {
            Letter::pos(label)
        } else {
            Letter::neg(label)
        }
    });
    Ok(crate::freegroup::reduce(g.rank, letters)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::{hom_from_substitution, reduce};
    use crate::symbolic::Substitution;

    fn word(rank: usize, s: &str) -> GroupWord {
        reduce(
            rank,
            s.split_whitespace().map(|t| {
                let gen = (t.as_bytes()[0] - b'a') as usize;
                if t.ends_with('\'') {
                    Letter::neg(gen)
                } else {
                    Letter::pos(gen)
                }
            }),
        )
        .unwrap()
    }

    fn hom_of(images: &[&str]) -> GroupHom {
        hom_from_substitution(&Substitution::from_spelled(images).unwrap())
    }

    #[test]
    fn bouquet_shapes() {
        let g = bouquet(&[word(1, "a")], 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 1));
        let g = bouquet(&[word(2, "a b")], 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 2));
        let tau = hom_of(&["aabaabab", "abaab"]);
        assert_eq!(bouquet(tau.images(), 2).unwrap().edge_count(), 13);
        assert!(bouquet(&[word(3, "c")], 2).is_err());
    }

    #[test]
    fn folding_small_graphs() {
        let g = fold(&bouquet(&[word(2, "a"), word(2, "b")], 2).unwrap());
        assert!(g.is_rose());
        // a a⁻¹ as an unreduced closed path collapses to the basepoint
        let raw = LabeledGraph::new(
            1,
            2,
            vec![Edge { src: 0, dst: 1, label: 0 }, Edge { src: 0, dst: 1, label: 0 }],
            0,
        )
        .unwrap();
        let f = fold(&raw);
        assert_eq!((f.vertex_count(), f.edge_count()), (1, 0));
    }

    #[test]
    fn ranks_of_subgroups() {
        let rose3 = fold(&bouquet(&[word(3, "a"), word(3, "b"), word(3, "c")], 3).unwrap());
        assert_eq!(subgroup_rank(&rose3).unwrap(), 3);
        let tau = hom_of(&["aabaabab", "abaab"]);
        let g = image_graph(&tau).unwrap();
        assert_eq!(subgroup_rank(&g).unwrap(), 2);
        assert!(!g.is_rose());
        let aa = fold(&bouquet(&[word(2, "a"), word(2, "a")], 2).unwrap());
        assert_eq!(subgroup_rank(&aa).unwrap(), 1);
        let unfolded = bouquet(&[word(2, "a"), word(2, "a")], 2).unwrap();
        assert_eq!(subgroup_rank(&unfolded), Err(FoldError::NotFolded));
    }

    #[test]
    fn conjugate_generator_leaves_hair_at_base() {
        let g = fold(&bouquet(&[word(2, "a b a'")], 2).unwrap());
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 2));
        assert_eq!(subgroup_rank(&g).unwrap(), 1);
    }

    #[test]
    fn invertibility_examples() {
        assert!(is_invertible(&hom_of(&["aabaabab", "aabab"])).unwrap());
        assert!(!is_invertible(&hom_of(&["aabaabab", "abaab"])).unwrap());
        assert!(is_invertible(&hom_of(&["ba", "bba"])).unwrap());
        assert!(is_invertible(&hom_of(&["aab", "ab"])).unwrap());
        assert!(!is_invertible(&hom_of(&["abba", "baab"])).unwrap());
        let wide = GroupHom::new(2, vec![word(2, "a")]).unwrap();
        assert!(is_invertible(&wide).is_err());
    }

    #[test]
    fn inverse_of_aab_ab() {
        let inv = inverse(&hom_of(&["aab", "ab"])).unwrap().unwrap();
        let expected = GroupHom::new(2, vec![word(2, "a b'"), word(2, "b a' b")]).unwrap();
        assert_eq!(inv, expected);
        assert!(inverse(&hom_of(&["aabaabab", "abaab"])).unwrap().is_none());
    }

    #[test]
    fn read_path_on_rose() {
        let g = fold(&bouquet(&[word(2, "a"), word(2, "b")], 2).unwrap());
        let a = g.edges().iter().position(|e| e.label == 0).unwrap();
        let b = g.edges().iter().position(|e| e.label == 1).unwrap();
        assert_eq!(read_path(&g, &[(a, true), (b, false)]).unwrap(), word(2, "a b'"));
    }
}
