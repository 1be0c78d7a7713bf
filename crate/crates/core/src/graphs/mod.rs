//! Folded basepoint-rooted graphs labeled by free-group generators: the
//! automaton form of a finitely generated subgroup. Membership is a label
//! traversal, intersection is a fiber product, and finite completions extend
//! the partial generator actions to permutations.

mod ball;
mod perm;

pub use ball::{balls_isomorphic, Ball};
pub use perm::{Perm, PermRep};

use crate::words::{Alphabet, FreeWord};
use crate::Error;
use std::collections::HashMap;
use std::fmt;

/// Default vertex budget for graph constructions.
pub const DEFAULT_MAX_VERTICES: u64 = 1 << 20;

/// A folded rooted labeled graph: for each vertex and generator at most one
/// outgoing and one incoming edge. Vertex ids are dense and assigned in
/// breadth-first order from the basepoint, so structural equality is
/// rooted labeled-graph isomorphism.
#[derive(Clone, PartialEq, Eq)]
pub struct CoreGraph {
    alphabet: Alphabet,
    basepoint: u32,
    fwd: Vec<Option<u32>>,
    bwd: Vec<Option<u32>>,
}

impl CoreGraph {
    /// Single-vertex graph of the trivial subgroup.
    pub fn trivial(alphabet: &Alphabet) -> CoreGraph {
        CoreGraph {
            alphabet: alphabet.clone(),
            basepoint: 0,
            fwd: vec![None; alphabet.rank()],
            bwd: vec![None; alphabet.rank()],
        }
    }

    /// Folds the wedge of loops spelling `generators` into the subgroup graph,
    /// then trims to the core.
    pub fn from_generators(
        alphabet: &Alphabet,
        generators: &[FreeWord],
        max_vertices: u64,
    ) -> Result<CoreGraph, Error> {
        let mut needed: u64 = 1;
        for w in generators {
            if w.alphabet() != alphabet {
                return Err(Error::AlphabetMismatch);
            }
            needed += w.len();
        }
        if needed > max_vertices {
            return Err(Error::ResourceLimit {
                needed,
                limit: max_vertices,
            });
        }
        let mut folder = Folder::new(alphabet.rank());
        for w in generators {
            if w.is_identity() {
                continue;
            }
            let letters: Vec<(usize, i64)> = w.letters().collect();
            let mut cur = 0u32;
            for (i, &(g, sign)) in letters.iter().enumerate() {
                let target = if i + 1 == letters.len() {
                    0
                } else {
                    folder.add_vertex()
                };
                if sign > 0 {
                    folder.add_edge(cur, g, target);
                } else {
                    folder.add_edge(target, g, cur);
                }
                cur = target;
            }
        }
        Ok(folder.into_graph(0, alphabet))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn basepoint(&self) -> u32 {
        self.basepoint
    }

    pub fn vertex_count(&self) -> usize {
        self.fwd.len() / self.alphabet.rank()
    }

    pub fn edge_count(&self) -> usize {
        self.fwd.iter().filter(|e| e.is_some()).count()
    }

    /// One traversal step: forward along `gen` or backward against it.
    pub fn step(&self, v: u32, gen: usize, forward: bool) -> Option<u32> {
        let i = v as usize * self.alphabet.rank() + gen;
        if forward {
            self.fwd[i]
        } else {
            self.bwd[i]
        }
    }

    /// Endpoint of the lift of `w` starting at `start`, or None if the lift
    /// leaves the graph. A run `gen^e` is walked with cycle detection, so the
    /// step count is bounded by the cycle length rather than `|e|`.
    pub fn trace(&self, start: u32, w: &FreeWord) -> Option<u32> {
        debug_assert_eq!(w.alphabet(), &self.alphabet);
        let mut v = start;
        for b in w.blocks() {
            let forward = b.exp > 0;
            let steps = b.exp.unsigned_abs();
            let mut seen: HashMap<u32, u64> = HashMap::new();
            seen.insert(v, 0);
            let mut i: u64 = 0;
            while i < steps {
                v = self.step(v, b.gen, forward)?;
                i += 1;
                if let Some(&first) = seen.get(&v) {
                    let cycle = i - first;
                    let mut rem = (steps - i) % cycle;
                    while rem > 0 {
                        v = self.step(v, b.gen, forward)?;
                        rem -= 1;
                    }
                    break;
                }
                seen.insert(v, i);
            }
        }
        Some(v)
    }

    /// Whether `w` spells a closed loop at the basepoint, i.e. lies in the
    /// subgroup this graph recognizes.
    pub fn contains(&self, w: &FreeWord) -> bool {
        self.trace(self.basepoint, w) == Some(self.basepoint)
    }

    /// Fiber product over the basepoints: recognizes exactly the intersection
    /// of the two subgroups.
    pub fn intersect(&self, other: &CoreGraph) -> Result<CoreGraph, Error> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let rank = self.alphabet.rank();
        let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs: Vec<(u32, u32)> = vec![(self.basepoint, other.basepoint)];
        ids.insert(pairs[0], 0);
        let mut fwd: Vec<Option<u32>> = vec![None; rank];
        let mut bwd: Vec<Option<u32>> = vec![None; rank];
        let mut head = 0usize;
        while head < pairs.len() {
            let (u, v) = pairs[head];
            let id = head as u32;
            head += 1;
            for g in 0..rank {
                for forward in [true, false] {
                    let (Some(x), Some(y)) = (self.step(u, g, forward), other.step(v, g, forward))
                    else {
                        continue;
                    };
                    let target = *ids.entry((x, y)).or_insert_with(|| {
                        pairs.push((x, y));
                        fwd.extend(std::iter::repeat_n(None, rank));
                        bwd.extend(std::iter::repeat_n(None, rank));
                        (pairs.len() - 1) as u32
                    });
                    let (src, dst) = if forward { (id, target) } else { (target, id) };
                    fwd[src as usize * rank + g] = Some(dst);
                    bwd[dst as usize * rank + g] = Some(src);
                }
            }
        }
        trim(0, rank, &mut fwd, &mut bwd);
        Ok(canonicalize(&self.alphabet, 0, &fwd, &bwd))
    }

    /// Whether every generator acts totally in both directions.
    pub fn is_complete(&self) -> bool {
        self.fwd.iter().all(|e| e.is_some()) && self.bwd.iter().all(|e| e.is_some())
    }

    /// M. Hall completion: embeds this graph in a finite cover whose subgroup
    /// contains this one and excludes every word in `avoid`. Partial lifts of
    /// the avoided words are grafted first, then each partial generator
    /// injection is extended to a permutation by matching free sources to free
    /// targets in ascending vertex order.
    pub fn hall_complete(
        &self,
        avoid: &[FreeWord],
        max_vertices: u64,
    ) -> Result<FiniteCover, Error> {
        let mut needed = self.vertex_count() as u64;
        for w in avoid {
            if w.alphabet() != &self.alphabet {
                return Err(Error::AlphabetMismatch);
            }
            if self.contains(w) {
                return Err(Error::Infeasible {
                    word: w.to_string(),
                });
            }
            needed += w.len();
        }
        if needed > max_vertices {
            return Err(Error::ResourceLimit {
                needed,
                limit: max_vertices,
            });
        }
        let rank = self.alphabet.rank();
        let mut fwd = self.fwd.clone();
        let mut bwd = self.bwd.clone();
        for w in avoid {
            let mut cur = self.basepoint;
            for (g, sign) in w.letters() {
                let slot = cur as usize * rank + g;
                let next = if sign > 0 { fwd[slot] } else { bwd[slot] };
                cur = match next {
                    Some(x) => x,
                    None => {
                        let nv = (fwd.len() / rank) as u32;
                        fwd.extend(std::iter::repeat_n(None, rank));
                        bwd.extend(std::iter::repeat_n(None, rank));
                        if sign > 0 {
                            fwd[slot] = Some(nv);
                            bwd[nv as usize * rank + g] = Some(cur);
                        } else {
                            bwd[slot] = Some(nv);
                            fwd[nv as usize * rank + g] = Some(cur);
                        }
                        nv
                    }
                };
            }
            debug_assert_ne!(cur, self.basepoint, "grafted lift must stay open");
        }
        let n = fwd.len() / rank;
        for g in 0..rank {
            let sources: Vec<u32> = (0..n as u32)
                .filter(|&v| fwd[v as usize * rank + g].is_none())
                .collect();
            let targets: Vec<u32> = (0..n as u32)
                .filter(|&v| bwd[v as usize * rank + g].is_none())
                .collect();
            debug_assert_eq!(sources.len(), targets.len());
            for (&s, &t) in sources.iter().zip(&targets) {
                fwd[s as usize * rank + g] = Some(t);
                bwd[t as usize * rank + g] = Some(s);
            }
        }
        FiniteCover::try_new(canonicalize(&self.alphabet, self.basepoint, &fwd, &bwd))
    }

    /// Radius-`radius` ball of the lazy tree completion around the basepoint.
    pub fn ball(&self, radius: u32) -> Ball {
        ball::build(self, radius)
    }

    /// Rooted labeled-graph isomorphism, decided by a parallel traversal.
    pub fn rooted_isomorphic(&self, other: &CoreGraph) -> bool {
        self.alphabet == other.alphabet
            && parallel_bfs_equal(
                self.alphabet.rank(),
                (&self.fwd, &self.bwd, self.basepoint),
                (&other.fwd, &other.bwd, other.basepoint),
            )
    }

    /// Edges as `(source, generator, target)` sorted by source then generator.
    pub fn edges(&self) -> impl Iterator<Item = (u32, usize, u32)> + '_ {
        let rank = self.alphabet.rank();
        self.fwd
            .iter()
            .enumerate()
            .filter_map(move |(i, e)| e.map(|dst| ((i / rank) as u32, i % rank, dst)))
    }

    /// Deterministic Graphviz text: vertices ascending, edges by
    /// (source, generator), basepoint drawn as a double circle.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph core {\n  rankdir=LR;\n");
        for v in 0..self.vertex_count() as u32 {
            let shape = if v == self.basepoint {
                "doublecircle"
            } else {
                "circle"
            };
            out.push_str(&format!("  v{v} [shape={shape}];\n"));
        }
        for (src, gen, dst) in self.edges() {
            let label = self.alphabet.symbol(gen);
            out.push_str(&format!("  v{src} -> v{dst} [label=\"{label}\"];\n"));
        }
        out.push_str("}\n");
        out
    }

    /// Canonicalizes explicitly built transition tables (already folded by
    /// construction) into a graph with breadth-first vertex numbering.
    pub(crate) fn from_tables_canonical(
        alphabet: &Alphabet,
        root: u32,
        fwd: &[Option<u32>],
        bwd: &[Option<u32>],
    ) -> CoreGraph {
        canonicalize(alphabet, root, fwd, bwd)
    }

    /// Builds a graph from an explicit edge list; used when re-validating
    /// serialized covers. Fails on duplicate generator actions.
    pub(crate) fn from_edges(
        alphabet: &Alphabet,
        vertices: u32,
        basepoint: u32,
        edges: &[(u32, usize, u32)],
    ) -> Result<CoreGraph, Error> {
        let rank = alphabet.rank();
        if basepoint >= vertices {
            return Err(Error::InvalidInput("basepoint out of range".into()));
        }
        let mut fwd: Vec<Option<u32>> = vec![None; vertices as usize * rank];
        let mut bwd: Vec<Option<u32>> = vec![None; vertices as usize * rank];
        for &(src, gen, dst) in edges {
            if src >= vertices || dst >= vertices || gen >= rank {
                return Err(Error::InvalidInput(format!(
                    "edge ({src}, {gen}, {dst}) out of range"
                )));
            }
            let si = src as usize * rank + gen;
            let di = dst as usize * rank + gen;
            if fwd[si].is_some() || bwd[di].is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate generator action at edge ({src}, {gen}, {dst})"
                )));
            }
            fwd[si] = Some(dst);
            bwd[di] = Some(src);
        }
        Ok(CoreGraph {
            alphabet: alphabet.clone(),
            basepoint,
            fwd,
            bwd,
        })
    }

    /// Whether every vertex is reachable from the basepoint.
    pub fn is_connected(&self) -> bool {
        let rank = self.alphabet.rank();
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![self.basepoint];
        seen[self.basepoint as usize] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for g in 0..rank {
                for forward in [true, false] {
                    if let Some(x) = self.step(v, g, forward) {
                        if !seen[x as usize] {
                            seen[x as usize] = true;
                            count += 1;
                            stack.push(x);
                        }
                    }
                }
            }
        }
        count == self.vertex_count()
    }
}

impl fmt::Debug for CoreGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CoreGraph({} vertices, {} edges, basepoint {})",
            self.vertex_count(),
            self.edge_count(),
            self.basepoint
        )
    }
}

/// A complete folded cover: every generator acts by a permutation. The
/// recognized subgroup has finite index equal to the vertex count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCover {
    graph: CoreGraph,
}

impl FiniteCover {
    pub fn try_new(graph: CoreGraph) -> Result<FiniteCover, Error> {
        if !graph.is_complete() {
            return Err(Error::IncompleteCover);
        }
        Ok(FiniteCover { graph })
    }

    pub fn graph(&self) -> &CoreGraph {
        &self.graph
    }

    pub fn index(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn contains(&self, w: &FreeWord) -> bool {
        self.graph.contains(w)
    }

    pub fn intersect(&self, other: &FiniteCover) -> Result<FiniteCover, Error> {
        FiniteCover::try_new(self.graph.intersect(&other.graph)?)
    }

    /// The coset action: one permutation per generator plus the basepoint.
    pub fn perm_rep(&self) -> PermRep {
        perm::from_cover(self)
    }

    pub fn ball(&self, radius: u32) -> Ball {
        self.graph.ball(radius)
    }
}

/// Incremental Stallings folding over a union-find of vertices. Adding an
/// edge that collides with an existing generator action merges the targets,
/// and merges cascade through a worklist until the graph is folded again.
struct Folder {
    rank: usize,
    parent: Vec<u32>,
    size: Vec<u32>,
    fwd: Vec<Option<u32>>,
    bwd: Vec<Option<u32>>,
}

impl Folder {
    fn new(rank: usize) -> Folder {
        Folder {
            rank,
            parent: vec![0],
            size: vec![1],
            fwd: vec![None; rank],
            bwd: vec![None; rank],
        }
    }

    fn add_vertex(&mut self) -> u32 {
        let v = self.parent.len() as u32;
        self.parent.push(v);
        self.size.push(1);
        self.fwd.extend(std::iter::repeat_n(None, self.rank));
        self.bwd.extend(std::iter::repeat_n(None, self.rank));
        v
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            self.parent[v as usize] = self.parent[self.parent[v as usize] as usize];
            v = self.parent[v as usize];
        }
        v
    }

    fn add_edge(&mut self, u: u32, g: usize, v: u32) {
        let u = self.find(u);
        let v = self.find(v);
        if let Some(x) = self.fwd[u as usize * self.rank + g] {
            let x = self.find(x);
            if x != v {
                self.merge(x, v);
            }
            return;
        }
        if let Some(y) = self.bwd[v as usize * self.rank + g] {
            let y = self.find(y);
            if y != u {
                self.merge(y, u);
            }
            return;
        }
        self.fwd[u as usize * self.rank + g] = Some(v);
        self.bwd[v as usize * self.rank + g] = Some(u);
    }

    fn merge(&mut self, a: u32, b: u32) {
        let mut stack = vec![(a, b)];
        while let Some((a, b)) = stack.pop() {
            let a = self.find(a);
            let b = self.find(b);
            if a == b {
                continue;
            }
            let (w, l) = if self.size[a as usize] >= self.size[b as usize] {
                (a, b)
            } else {
                (b, a)
            };
            self.parent[l as usize] = w;
            self.size[w as usize] += self.size[l as usize];
            for g in 0..self.rank {
                let wi = w as usize * self.rank + g;
                let li = l as usize * self.rank + g;
                match (self.fwd[wi], self.fwd[li]) {
                    (Some(x), Some(y)) => stack.push((x, y)),
                    (None, Some(y)) => self.fwd[wi] = Some(y),
                    _ => {}
                }
                match (self.bwd[wi], self.bwd[li]) {
                    (Some(x), Some(y)) => stack.push((x, y)),
                    (None, Some(y)) => self.bwd[wi] = Some(y),
                    _ => {}
                }
            }
        }
    }

    fn into_graph(mut self, root: u32, alphabet: &Alphabet) -> CoreGraph {
        let n = self.parent.len();
        let mut rep_index: Vec<u32> = vec![u32::MAX; n];
        let mut reps: Vec<u32> = Vec::new();
        for v in 0..n as u32 {
            let r = self.find(v);
            if rep_index[r as usize] == u32::MAX {
                rep_index[r as usize] = reps.len() as u32;
                reps.push(r);
            }
        }
        let rank = self.rank;
        let mut fwd: Vec<Option<u32>> = vec![None; reps.len() * rank];
        let mut bwd: Vec<Option<u32>> = vec![None; reps.len() * rank];
        for (i, &r) in reps.iter().enumerate() {
            for g in 0..rank {
                if let Some(x) = self.fwd[r as usize * rank + g] {
                    let x = self.find(x);
                    fwd[i * rank + g] = Some(rep_index[x as usize]);
                }
                if let Some(x) = self.bwd[r as usize * rank + g] {
                    let x = self.find(x);
                    bwd[i * rank + g] = Some(rep_index[x as usize]);
                }
            }
        }
        let root = rep_index[self.find(root) as usize];
        trim(root, rank, &mut fwd, &mut bwd);
        canonicalize(alphabet, root, &fwd, &bwd)
    }
}

/// Iteratively deletes non-root vertices with at most one incident half-edge.
fn trim(root: u32, rank: usize, fwd: &mut [Option<u32>], bwd: &mut [Option<u32>]) {
    let n = fwd.len() / rank;
    let mut degree: Vec<u32> = vec![0; n];
    for v in 0..n {
        for g in 0..rank {
            degree[v] += fwd[v * rank + g].is_some() as u32;
            degree[v] += bwd[v * rank + g].is_some() as u32;
        }
    }
    let mut stack: Vec<u32> = (0..n as u32)
        .filter(|&v| v != root && degree[v as usize] <= 1)
        .collect();
    while let Some(v) = stack.pop() {
        let vi = v as usize;
        if degree[vi] == 0 {
            continue;
        }
        for g in 0..rank {
            let (cleared, u) = if let Some(u) = fwd[vi * rank + g] {
                fwd[vi * rank + g] = None;
                bwd[u as usize * rank + g] = None;
                (true, u)
            } else if let Some(u) = bwd[vi * rank + g] {
                bwd[vi * rank + g] = None;
                fwd[u as usize * rank + g] = None;
                (true, u)
            } else {
                continue;
            };
            if cleared {
                degree[vi] -= 1;
                degree[u as usize] -= 1;
                if u != root && degree[u as usize] <= 1 {
                    stack.push(u);
                }
            }
        }
    }
}

/// Renumbers vertices in breadth-first discovery order from the root
/// (forward directions before backward, generators ascending), dropping
/// unreachable vertices.
fn canonicalize(
    alphabet: &Alphabet,
    root: u32,
    fwd: &[Option<u32>],
    bwd: &[Option<u32>],
) -> CoreGraph {
    let rank = alphabet.rank();
    let n = fwd.len() / rank;
    let mut order: Vec<u32> = vec![u32::MAX; n];
    let mut bfs: Vec<u32> = vec![root];
    order[root as usize] = 0;
    let mut head = 0usize;
    while head < bfs.len() {
        let v = bfs[head] as usize;
        head += 1;
        for table in [fwd, bwd] {
            for g in 0..rank {
                if let Some(x) = table[v * rank + g] {
                    if order[x as usize] == u32::MAX {
                        order[x as usize] = bfs.len() as u32;
                        bfs.push(x);
                    }
                }
            }
        }
    }
    let mut new_fwd: Vec<Option<u32>> = vec![None; bfs.len() * rank];
    let mut new_bwd: Vec<Option<u32>> = vec![None; bfs.len() * rank];
    for (new_id, &old) in bfs.iter().enumerate() {
        for g in 0..rank {
            new_fwd[new_id * rank + g] = fwd[old as usize * rank + g].map(|x| order[x as usize]);
            new_bwd[new_id * rank + g] = bwd[old as usize * rank + g].map(|x| order[x as usize]);
        }
    }
    CoreGraph {
        alphabet: alphabet.clone(),
        basepoint: 0,
        fwd: new_fwd,
        bwd: new_bwd,
    }
}

/// Parallel breadth-first comparison of two rooted deterministic graphs.
pub(crate) fn parallel_bfs_equal(
    rank: usize,
    (fwd1, bwd1, root1): (&[Option<u32>], &[Option<u32>], u32),
    (fwd2, bwd2, root2): (&[Option<u32>], &[Option<u32>], u32),
) -> bool {
    let (n1, n2) = (fwd1.len() / rank, fwd2.len() / rank);
    if n1 != n2 {
        return false;
    }
    let mut map1: Vec<u32> = vec![u32::MAX; n1];
    let mut map2: Vec<u32> = vec![u32::MAX; n2];
    map1[root1 as usize] = root2;
    map2[root2 as usize] = root1;
    let mut queue: Vec<(u32, u32)> = vec![(root1, root2)];
    let mut head = 0usize;
    while head < queue.len() {
        let (u, v) = queue[head];
        head += 1;
        for (t1, t2) in [(fwd1, fwd2), (bwd1, bwd2)] {
            for g in 0..rank {
                let x = t1[u as usize * rank + g];
                let y = t2[v as usize * rank + g];
                match (x, y) {
                    (None, None) => {}
                    (Some(x), Some(y)) => {
                        let (mx, my) = (map1[x as usize], map2[y as usize]);
                        if mx == u32::MAX && my == u32::MAX {
                            map1[x as usize] = y;
                            map2[y as usize] = x;
                            queue.push((x, y));
                        } else if mx != y || my != x {
                            return false;
                        }
                    }
                    _ => return false,
                }
            }
        }
    }
    true
}
