//! Cliques in small undirected graphs.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn empty(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn and(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |i| w >> i & 1 == 1).map(move |i| k * 64 + i)
        })
    }
}

/// Simple undirected graph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<BitSet>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            adj: vec![BitSet::empty(n); n],
        }
    }

    pub fn from_fn(n: usize, edge: impl Fn(usize, usize) -> bool) -> Self {
        let mut g = Self::new(n);
        for a in 0..n {
            for b in a + 1..n {
                if edge(a, b) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adj[a].len()
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &a)| vertices[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    /// All maximal cliques (Bron–Kerbosch with pivoting), each sorted.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut r = Vec::new();
        self.bron_kerbosch(&mut r, BitSet::full(self.n), BitSet::empty(self.n), &mut out);
        out.sort();
        out
    }

    fn bron_kerbosch(&self, r: &mut Vec<usize>, mut p: BitSet, mut x: BitSet, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() {
            if x.is_empty() {
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .max_by_key(|&u| self.adj[u].and(&p).len())
            .expect("p is nonempty");
        let candidates: Vec<usize> = p.iter().filter(|&v| !self.adj[pivot].contains(v)).collect();
        for v in candidates {
            r.push(v);
            self.bron_kerbosch(r, p.and(&self.adj[v]), x.and(&self.adj[v]), out);
            r.pop();
            p.remove(v);
            x.insert(v);
        }
    }

    /// A maximum clique by branch and bound, or the best found when more
    /// than `budget` search nodes are needed. The flag reports exactness.
    pub fn maximum_clique(&self, budget: u64) -> (Vec<usize>, bool) {
        let mut best = self.greedy_clique();
        let mut nodes = 0u64;
        let mut r = Vec::new();
        let complete = self.branch(&mut r, BitSet::full(self.n), &mut best, &mut nodes, budget);
        best.sort_unstable();
        (best, complete)
    }

    fn branch(&self, r: &mut Vec<usize>, mut p: BitSet, best: &mut Vec<usize>, nodes: &mut u64, budget: u64) -> bool {
        *nodes += 1;
        if *nodes > budget {
            return false;
        }
        if p.is_empty() {
            if r.len() > best.len() {
                *best = r.clone();
            }
            return true;
        }
        while !p.is_empty() {
            if r.len() + p.len() <= best.len() {
                return true;
            }
            let v = p.iter().max_by_key(|&u| self.adj[u].and(&p).len()).expect("nonempty");
            r.push(v);
            let ok = self.branch(r, p.and(&self.adj[v]), best, nodes, budget);
            r.pop();
            if !ok {
                return false;
            }
            p.remove(v);
        }
        true
    }

    /// Greedy clique: repeatedly add the candidate with most neighbours
    /// among the remaining candidates.
    pub fn greedy_clique(&self) -> Vec<usize> {
        let mut clique = Vec::new();
        let mut p = BitSet::full(self.n);
        while let Some(v) = p.iter().max_by_key(|&u| (self.adj[u].and(&p).len(), usize::MAX - u)) {
            clique.push(v);
            p = p.and(&self.adj[v]);
        }
        clique.sort_unstable();
        clique
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_plus_pendant() {
        let mut g = Graph::new(4);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(0, 2);
        g.add_edge(2, 3);
        assert_eq!(g.maximal_cliques(), vec![vec![0, 1, 2], vec![2, 3]]);
        assert_eq!(g.maximum_clique(1000), (vec![0, 1, 2], true));
        assert_eq!(g.greedy_clique(), vec![0, 1, 2]);
    }

    #[test]
    fn empty_graph_cliques_are_singletons() {
        let g = Graph::new(3);
        assert_eq!(g.maximal_cliques(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(g.maximum_clique(10).0.len(), 1);
    }

    #[test]
    fn large_complete_graph() {
        let g = Graph::from_fn(70, |_, _| true);
        let (c, exact) = g.maximum_clique(1_000_000);
        assert!(exact);
        assert_eq!(c.len(), 70);
        assert!(g.is_clique(&c));
    }
}
