//! Reusable breadth-first search workspace with deterministic tie-breaking.

use crate::graph::Graph;

/// Set over `0..n` that can be cleared in O(1).
#[derive(Clone, Debug)]
pub(crate) struct Marks {
    stamp: Vec<u32>,
    gen: u32,
}

impl Marks {
    pub(crate) fn new(n: usize) -> Self {
        Marks { stamp: vec![0; n], gen: 1 }
    }

    pub(crate) fn clear(&mut self) {
        self.gen = self.gen.wrapping_add(1);
        if self.gen == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.gen = 1;
        }
    }

    pub(crate) fn insert(&mut self, v: usize) {
        self.stamp[v] = self.gen;
    }

    pub(crate) fn contains(&self, v: usize) -> bool {
        self.stamp[v] == self.gen
    }
}

/// Level-synchronous BFS: every level is scanned in increasing id order and
/// neighbours are visited in increasing id order, so each vertex's parent is
/// the smallest-id vertex of the previous level adjacent to it.
pub(crate) struct Bfs {
    visited: Marks,
    parent: Vec<usize>,
    frontier: Vec<usize>,
    next: Vec<usize>,
}

impl Bfs {
    pub(crate) fn new(n: usize) -> Self {
        Bfs { visited: Marks::new(n), parent: vec![usize::MAX; n], frontier: Vec::new(), next: Vec::new() }
    }

    fn trace(&self, mut v: usize) -> Vec<usize> {
        let mut path = vec![v];
        while self.parent[v] != usize::MAX {
            v = self.parent[v];
            path.push(v);
        }
        path.reverse();
        path
    }

    /// Shortest path from some source to some target avoiding `blocked`
    /// vertices. Sources are assumed unblocked. Returns the first target
    /// discovered in scan order (a source that is itself a target wins,
    /// smallest id first). `max_len` bounds the number of edges.
    pub(crate) fn path(
        &mut self,
        g: &Graph,
        sources: &[usize],
        is_target: impl Fn(usize) -> bool,
        blocked: impl Fn(usize) -> bool,
        max_len: usize,
    ) -> Option<Vec<usize>> {
        self.visited.clear();
        self.frontier.clear();
        let mut srcs: Vec<usize> = sources.to_vec();
        srcs.sort_unstable();
        srcs.dedup();
        for &s in &srcs {
            if is_target(s) {
                return Some(vec![s]);
            }
        }
        for &s in &srcs {
            self.visited.insert(s);
            self.parent[s] = usize::MAX;
            self.frontier.push(s);
        }
        let mut depth = 0;
        while !self.frontier.is_empty() && depth < max_len {
            depth += 1;
            self.next.clear();
            for i in 0..self.frontier.len() {
                let u = self.frontier[i];
                for &w in g.neighbors(u) {
                    if self.visited.contains(w) || blocked(w) {
                        continue;
                    }
                    self.visited.insert(w);
                    self.parent[w] = u;
                    if is_target(w) {
                        return Some(self.trace(w));
                    }
                    self.next.push(w);
                }
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
            self.frontier.sort_unstable();
        }
        None
    }

    /// Path between two distinct vertices avoiding `blocked`; identical to
    /// [`Bfs::path`] with singleton source and target, with a fast route for
    /// distances one and two.
    pub(crate) fn pair_path(
        &mut self,
        g: &Graph,
        a: usize,
        b: usize,
        blocked: impl Fn(usize) -> bool,
        max_len: usize,
    ) -> Option<Vec<usize>> {
        if max_len == 0 {
            return None;
        }
        if g.has_edge(a, b) {
            return Some(vec![a, b]);
        }
        if max_len == 1 {
            return None;
        }
        let (na, nb) = (g.neighbors(a), g.neighbors(b));
        let (mut i, mut j) = (0, 0);
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if !blocked(na[i]) {
                        return Some(vec![a, na[i], b]);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        if max_len == 2 {
            return None;
        }
        self.path(g, &[a], |v| v == b, blocked, max_len)
    }

    /// Vertices within distance `r` of `sources` avoiding `blocked`, in
    /// discovery order.
    pub(crate) fn ball(
        &mut self,
        g: &Graph,
        sources: &[usize],
        r: usize,
        blocked: impl Fn(usize) -> bool,
    ) -> Vec<usize> {
        self.visited.clear();
        let mut out: Vec<usize> = Vec::new();
        for &s in sources {
            if !self.visited.contains(s) {
                self.visited.insert(s);
                out.push(s);
            }
        }
        let mut start = 0;
        for _ in 0..r {
            let end = out.len();
            if start == end {
                break;
            }
            for i in start..end {
                let u = out[i];
                for &w in g.neighbors(u) {
                    if !self.visited.contains(w) && !blocked(w) {
                        self.visited.insert(w);
                        out.push(w);
                    }
                }
            }
            start = end;
        }
        out
    }
}
