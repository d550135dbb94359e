//! Effective resistance and edge-inclusion probabilities.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{invalid, Error, Result};
use crate::oracles::enumerate::for_each_spanning_tree;
use crate::oracles::graph::{exact, SmallWeightedGraph};

fn check_pair(g: &SmallWeightedGraph, u: usize, v: usize) -> Result<()> {
    if u >= g.m() || v >= g.m() {
        return Err(invalid(format!("vertex outside [0, {})", g.m())));
    }
    if u == v {
        return Err(invalid("effective resistance needs two distinct vertices"));
    }
    if !g.is_connected() {
        return Err(Error::NoSpanningTree);
    }
    Ok(())
}

/// Ground `v`, inject a unit current at `u`; the potential at `u` is the resistance.
pub fn effective_resistance(g: &SmallWeightedGraph, u: usize, v: usize) -> Result<f64> {
    check_pair(g, u, v)?;
    let l = g.reduced_laplacian(v);
    let row = if u < v { u } else { u - 1 };
    let mut rhs = vec![0.0; g.m() - 1];
    rhs[row] = 1.0;
    let x = l.solve(rhs).ok_or(Error::NoSpanningTree)?;
    Ok(x[row])
}

pub fn effective_resistance_exact(g: &SmallWeightedGraph, u: usize, v: usize) -> Result<BigRational> {
    check_pair(g, u, v)?;
    let l = g.reduced_laplacian_exact(v);
    let row = if u < v { u } else { u - 1 };
    let mut rhs = vec![BigRational::zero(); g.m() - 1];
    rhs[row] = BigRational::from_integer(1.into());
    let x = l.solve(rhs).ok_or(Error::NoSpanningTree)?;
    Ok(x[row].clone())
}

/// Inclusion probability of one edge, by both routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeProbability {
    /// Weight of trees containing the edge over the total weight.
    pub enumeration: f64,
    /// Edge weight times effective resistance between its endpoints.
    pub kirchhoff: f64,
}

impl EdgeProbability {
    pub fn discrepancy(&self) -> f64 {
        (self.enumeration - self.kirchhoff).abs()
    }
}

pub fn ust_edge_probability(g: &SmallWeightedGraph, u: usize, v: usize) -> Result<EdgeProbability> {
    if u >= g.m() || v >= g.m() || u == v || g.weight(u, v) <= 0.0 {
        return Err(invalid(format!("({u}, {v}) is not an edge")));
    }
    let edges = g.edges();
    let key = (u.min(v), u.max(v));
    let target = edges
        .iter()
        .position(|&(a, b, _)| (a, b) == key)
        .expect("edge is present");
    let (mut with, mut total) = (0.0, 0.0);
    for_each_spanning_tree(g, |idx| {
        let w: f64 = idx.iter().map(|&i| edges[i].2).product();
        total += w;
        if idx.contains(&target) {
            with += w;
        }
    })?;
    Ok(EdgeProbability {
        enumeration: with / total,
        kirchhoff: g.weight(u, v) * effective_resistance(g, u, v)?,
    })
}

/// Exact enumeration and exact Kirchhoff values; they must be equal.
pub fn ust_edge_probability_exact(g: &SmallWeightedGraph, u: usize, v: usize) -> Result<(BigRational, BigRational)> {
    if u >= g.m() || v >= g.m() || u == v || g.weight(u, v) <= 0.0 {
        return Err(invalid(format!("({u}, {v}) is not an edge")));
    }
    let edges = g.edges();
    let weights: Vec<BigRational> = edges.iter().map(|e| exact(e.2)).collect();
    let key = (u.min(v), u.max(v));
    let target = edges.iter().position(|&(a, b, _)| (a, b) == key).expect("edge is present");
    let (mut with, mut total) = (BigRational::zero(), BigRational::zero());
    for_each_spanning_tree(g, |idx| {
        let w = idx
            .iter()
            .fold(BigRational::from_integer(1.into()), |acc, &i| acc * &weights[i]);
        if idx.contains(&target) {
            with += &w;
        }
        total += w;
    })?;
    let kirchhoff = exact(g.weight(u, v)) * effective_resistance_exact(g, u, v)?;
    Ok((with / total, kirchhoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn resistances() {
        let g = SmallWeightedGraph::from_edges(2, &[(0, 1, 4.0)]).unwrap();
        assert!((effective_resistance(&g, 0, 1).unwrap() - 0.25).abs() < 1e-15);
        let k3 = SmallWeightedGraph::complete(3).unwrap();
        assert_eq!(effective_resistance_exact(&k3, 0, 1).unwrap(), q(2, 3));
        let path = SmallWeightedGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert!((effective_resistance(&path, 2, 0).unwrap() - 2.0).abs() < 1e-12);
        assert!(effective_resistance(&path, 1, 1).is_err());
    }

    #[test]
    fn edge_probabilities() {
        let k3 = SmallWeightedGraph::complete(3).unwrap();
        let p = ust_edge_probability(&k3, 1, 2).unwrap();
        assert!((p.enumeration - 2.0 / 3.0).abs() < 1e-12);
        assert!(p.discrepancy() < 1e-12);
        let g = SmallWeightedGraph::from_edges(3, &[(0, 1, 2.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let (e, k) = ust_edge_probability_exact(&g, 0, 1).unwrap();
        assert_eq!(e, q(4, 5));
        assert_eq!(k, q(4, 5));
        let tree = SmallWeightedGraph::from_edges(3, &[(0, 1, 5.0), (1, 2, 1.0)]).unwrap();
        assert!((ust_edge_probability(&tree, 0, 1).unwrap().kirchhoff - 1.0).abs() < 1e-12);
        assert!(ust_edge_probability(&tree, 0, 2).is_err());
    }
}
