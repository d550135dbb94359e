use crate::error::{invalid, Result};
use crate::metrics::{double_sweep, Bfs, Csr};
use crate::union_find::UnionFind;

/// A spanning tree of `[n]` with hop-count distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTree {
    n: usize,
    edges: Vec<(u32, u32)>,
    adjacency: Csr,
}

impl WeightedTree {
    /// Validates edge count, range, acyclicity and hence connectivity.
    pub fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("a tree needs at least one vertex"));
        }
        if edges.len() != n - 1 {
            return Err(invalid(format!(
                "a spanning tree of {n} vertices has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut uf = UnionFind::new(n);
        for &(a, b) in &edges {
            if a as usize >= n || b as usize >= n {
                return Err(invalid(format!("edge ({a}, {b}) out of range")));
            }
            if !uf.union(a as usize, b as usize) {
                return Err(invalid(format!("edge ({a}, {b}) closes a cycle")));
            }
        }
        let edges: Vec<(u32, u32)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        let adjacency = Csr::from_edges(n, &edges);
        Ok(Self { n, edges, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn adjacency(&self) -> &Csr {
        &self.adjacency
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        self.adjacency.neighbors(v)
    }

    /// Sorted edge list, usable as a map key when counting tree frequencies.
    pub fn canonical_edges(&self) -> Vec<(u32, u32)> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    /// Re-checks the tree invariants; trees are validated on construction, so
    /// this is for tests and assertions.
    pub fn is_valid(&self) -> bool {
        if self.edges.len() + 1 != self.n {
            return false;
        }
        let mut uf = UnionFind::new(self.n);
        self.edges.iter().all(|&(a, b)| uf.union(a as usize, b as usize))
    }
}

pub fn tree_diameter(t: &WeightedTree) -> u32 {
    let mut bfs = Bfs::new(t.n());
    double_sweep(t.adjacency(), &mut bfs, 0)
}

pub fn tree_distance(t: &WeightedTree, u: usize, v: usize) -> Result<u32> {
    if u >= t.n() || v >= t.n() {
        return Err(invalid(format!("vertex out of range [0, {})", t.n())));
    }
    let mut bfs = Bfs::new(t.n());
    Ok(bfs
        .distance_between(t.adjacency(), u, v)
        .expect("trees are connected"))
}
