use num_rational::BigRational;

use crate::error::{invalid, Error, Result};
use crate::oracles::linalg::{Matrix, Scalar};

/// Largest vertex count for subset and tree enumeration.
pub const MAX_SMALL_VERTICES: usize = 16;

/// Dense symmetric weight matrix on a few vertices; weight 0 means no edge.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallWeightedGraph {
    m: usize,
    weights: Vec<f64>,
}

impl SmallWeightedGraph {
    pub fn empty(m: usize) -> Result<Self> {
        if m == 0 || m > MAX_SMALL_VERTICES {
            return Err(Error::SizeLimit {
                size: m,
                limit: MAX_SMALL_VERTICES,
            });
        }
        Ok(Self {
            m,
            weights: vec![0.0; m * m],
        })
    }

    pub fn complete(m: usize) -> Result<Self> {
        let mut g = Self::empty(m)?;
        for a in 0..m {
            for b in a + 1..m {
                g.set_weight(a, b, 1.0)?;
            }
        }
        Ok(g)
    }

    pub fn from_edges(m: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = Self::empty(m)?;
        for &(a, b, w) in edges {
            g.set_weight(a, b, w)?;
        }
        Ok(g)
    }

    pub fn set_weight(&mut self, a: usize, b: usize, w: f64) -> Result<()> {
        if a >= self.m || b >= self.m {
            return Err(invalid(format!("edge ({a}, {b}) outside [0, {})", self.m)));
        }
        if a == b {
            return Err(invalid("self-loops are not allowed"));
        }
        if !(w >= 0.0 && w.is_finite()) {
            return Err(invalid(format!("weight {w} must be finite and non-negative")));
        }
        self.weights[a * self.m + b] = w;
        self.weights[b * self.m + a] = w;
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.weights[a * self.m + b]
    }

    /// Present edges `(a, b, w)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for a in 0..self.m {
            for b in a + 1..self.m {
                let w = self.weight(a, b);
                if w > 0.0 {
                    out.push((a, b, w));
                }
            }
        }
        out
    }

    pub fn degree(&self, v: usize) -> f64 {
        (0..self.m).map(|x| self.weight(v, x)).sum()
    }

    /// Neighbor bitmasks, one per vertex.
    pub fn adjacency_masks(&self) -> Vec<u32> {
        (0..self.m)
            .map(|a| {
                (0..self.m)
                    .filter(|&b| self.weight(a, b) > 0.0)
                    .fold(0u32, |acc, b| acc | (1 << b))
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency_masks();
        reach_mask(&adj, 0) == full_mask(self.m)
    }

    fn laplacian_minor<T: Scalar>(&self, drop: usize, conv: impl Fn(f64) -> T) -> Matrix<T> {
        let keep: Vec<usize> = (0..self.m).filter(|&v| v != drop).collect();
        let mut l = Matrix::zeros(keep.len());
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                let v = if a == b {
                    conv(self.degree(a))
                } else {
                    -conv(self.weight(a, b))
                };
                l.set(i, j, v);
            }
        }
        l
    }

    /// Weighted Laplacian with row and column `drop` removed, in floats.
    pub fn reduced_laplacian(&self, drop: usize) -> Matrix<f64> {
        self.laplacian_minor(drop, |x| x)
    }

    /// The same minor with every weight converted exactly to a rational.
    pub fn reduced_laplacian_exact(&self, drop: usize) -> Matrix<BigRational> {
        let keep: Vec<usize> = (0..self.m).filter(|&v| v != drop).collect();
        let mut l = Matrix::zeros(keep.len());
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                let v = if a == b {
                    (0..self.m).map(|x| exact(self.weight(a, x))).sum()
                } else {
                    -exact(self.weight(a, b))
                };
                l.set(i, j, v);
            }
        }
        l
    }
}

pub fn exact(w: f64) -> BigRational {
    BigRational::from_float(w).expect("weights are finite")
}

pub(crate) fn full_mask(m: usize) -> u32 {
    if m >= 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

/// Vertices reachable from `src` in the graph given by neighbor masks.
pub(crate) fn reach_mask(adj: &[u32], src: usize) -> u32 {
    let mut seen = 1u32 << src;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u32;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen
}

/// Eccentricity-based diameter of a connected mask graph; `None` if disconnected.
pub(crate) fn mask_diameter(adj: &[u32]) -> Option<u32> {
    let m = adj.len();
    let full = full_mask(m);
    let mut diam = 0;
    for src in 0..m {
        let mut seen = 1u32 << src;
        let mut frontier = seen;
        let mut depth = 0;
        while seen != full {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[v];
            }
            frontier = next & !seen;
            if frontier == 0 {
                return None;
            }
            seen |= frontier;
            depth += 1;
        }
        diam = diam.max(depth);
    }
    Some(diam)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        assert!(SmallWeightedGraph::empty(0).is_err());
        assert!(SmallWeightedGraph::empty(17).is_err());
        let mut g = SmallWeightedGraph::empty(3).unwrap();
        assert!(g.set_weight(0, 0, 1.0).is_err());
        assert!(g.set_weight(0, 3, 1.0).is_err());
        assert!(g.set_weight(0, 1, -1.0).is_err());
        assert!(!g.is_connected());
        g.set_weight(0, 1, 2.0).unwrap();
        g.set_weight(1, 2, 1.0).unwrap();
        assert!(g.is_connected());
        assert_eq!(g.weight(1, 0), 2.0);
        assert_eq!(g.degree(1), 3.0);
        assert_eq!(g.edges(), vec![(0, 1, 2.0), (1, 2, 1.0)]);
    }

    #[test]
    fn mask_diameters() {
        let g = SmallWeightedGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(mask_diameter(&g.adjacency_masks()), Some(3));
        assert_eq!(mask_diameter(&SmallWeightedGraph::complete(5).unwrap().adjacency_masks()), Some(1));
        assert_eq!(mask_diameter(&SmallWeightedGraph::empty(1).unwrap().adjacency_masks()), Some(0));
        assert_eq!(mask_diameter(&SmallWeightedGraph::empty(2).unwrap().adjacency_masks()), None);
    }
}
