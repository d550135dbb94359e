//! Hop-count distances on adjacency lists.

use std::collections::VecDeque;

/// Compressed adjacency lists over vertices `0..n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    /// Builds symmetric adjacency from undirected edges. Neighbor lists are sorted.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut degree = vec![0usize; n + 1];
        for &(a, b) in edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        for &(a, b) in edges {
            targets[fill[a as usize]] = b;
            fill[a as usize] += 1;
            targets[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Self { offsets, targets }
    }

    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }
}

/// Reusable BFS scratch space. Distances are valid only for vertices touched
/// by the most recent search.
#[derive(Debug, Default)]
pub struct Bfs {
    dist: Vec<u32>,
    touched: Vec<u32>,
    queue: VecDeque<u32>,
}

const UNSEEN: u32 = u32::MAX;

impl Bfs {
    pub fn new(n: usize) -> Self {
        Self {
            dist: vec![UNSEEN; n],
            touched: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v as usize] = UNSEEN;
        }
        self.touched.clear();
        self.queue.clear();
    }

    /// Runs BFS from `source`; returns (farthest vertex, its distance).
    pub fn run(&mut self, graph: &Csr, source: usize) -> (usize, u32) {
        self.reset();
        self.dist[source] = 0;
        self.touched.push(source as u32);
        self.queue.push_back(source as u32);
        let mut far = (source, 0);
        while let Some(v) = self.queue.pop_front() {
            let d = self.dist[v as usize];
            if d > far.1 {
                far = (v as usize, d);
            }
            for &w in graph.neighbors(v as usize) {
                if self.dist[w as usize] == UNSEEN {
                    self.dist[w as usize] = d + 1;
                    self.touched.push(w);
                    self.queue.push_back(w);
                }
            }
        }
        far
    }

    /// Distance to `v` from the last source, if reached.
    pub fn distance(&self, v: usize) -> Option<u32> {
        match self.dist[v] {
            UNSEEN => None,
            d => Some(d),
        }
    }

    pub fn reached(&self) -> &[u32] {
        &self.touched
    }

    /// Stops early once `target` is dequeued.
    pub fn distance_between(&mut self, graph: &Csr, source: usize, target: usize) -> Option<u32> {
        self.reset();
        self.dist[source] = 0;
        self.touched.push(source as u32);
        self.queue.push_back(source as u32);
        while let Some(v) = self.queue.pop_front() {
            if v as usize == target {
                return Some(self.dist[target]);
            }
            let d = self.dist[v as usize];
            for &w in graph.neighbors(v as usize) {
                if self.dist[w as usize] == UNSEEN {
                    self.dist[w as usize] = d + 1;
                    self.touched.push(w);
                    self.queue.push_back(w);
                }
            }
        }
        None
    }
}

/// Double sweep from `start`: exact on trees, a lower bound otherwise.
pub fn double_sweep(graph: &Csr, bfs: &mut Bfs, start: usize) -> u32 {
    let (far, _) = bfs.run(graph, start);
    bfs.run(graph, far).1
}

/// Exact diameter of the connected component listed in `vertices` by BFS from each member.
pub fn all_sources_diameter(graph: &Csr, bfs: &mut Bfs, vertices: &[u32]) -> u32 {
    vertices
        .iter()
        .map(|&v| bfs.run(graph, v as usize).1)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(k: u32) -> Csr {
        let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
        Csr::from_edges(k as usize, &edges)
    }

    #[test]
    fn path_diameter() {
        let g = path(6);
        let mut bfs = Bfs::new(6);
        assert_eq!(double_sweep(&g, &mut bfs, 3), 5);
        let all: Vec<u32> = (0..6).collect();
        assert_eq!(all_sources_diameter(&g, &mut bfs, &all), 5);
        assert_eq!(bfs.distance_between(&g, 1, 4), Some(3));
    }

    #[test]
    fn cycle_defeats_nothing_for_all_sources() {
        // 5-cycle with a pendant vertex 5 attached to 0
        let g = Csr::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5)]);
        let mut bfs = Bfs::new(6);
        let all: Vec<u32> = (0..6).collect();
        assert_eq!(all_sources_diameter(&g, &mut bfs, &all), 3);
    }

    #[test]
    fn unreachable_is_none() {
        let g = Csr::from_edges(3, &[(0, 1)]);
        let mut bfs = Bfs::new(3);
        assert_eq!(bfs.distance_between(&g, 0, 2), None);
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(1, 2));
    }
}
