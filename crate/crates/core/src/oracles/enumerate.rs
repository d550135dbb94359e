//! Spanning-tree enumeration and the matrix-tree cross-check.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::oracles::graph::{full_mask, reach_mask, SmallWeightedGraph};

/// Vertex limit for listing spanning trees.
pub const MAX_ENUMERATION_VERTICES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeEnumeration {
    /// Each tree as edges `(a, b)` with `a < b`, with its weight product.
    pub trees: Vec<(Vec<(usize, usize)>, f64)>,
    /// Sum of the weight products.
    pub partition: f64,
}

fn check(g: &SmallWeightedGraph) -> Result<()> {
    if g.m() > MAX_ENUMERATION_VERTICES {
        return Err(Error::SizeLimit {
            size: g.m(),
            limit: MAX_ENUMERATION_VERTICES,
        });
    }
    if !g.is_connected() {
        return Err(Error::NoSpanningTree);
    }
    Ok(())
}

/// Calls `visit` with the edge indices (into `g.edges()`) of every spanning tree.
///
/// Branches on each edge in order: it is skipped when it would close a
/// cycle, and left out only if the chosen edges plus the remaining ones
/// still connect the graph, so every branch ends in a tree.
pub fn for_each_spanning_tree<F: FnMut(&[usize])>(g: &SmallWeightedGraph, mut visit: F) -> Result<()> {
    check(g)?;
    let edges = g.edges();
    let m = g.m();
    if m == 1 {
        visit(&[]);
        return Ok(());
    }
    let mut chosen = Vec::with_capacity(m - 1);
    let mut comp: Vec<usize> = (0..m).collect();
    recurse(&edges, m, 0, &mut chosen, &mut comp, &mut visit);
    Ok(())
}

fn connected_with(edges: &[(usize, usize, f64)], m: usize, chosen: &[usize], from: usize) -> bool {
    let mut adj = vec![0u32; m];
    for &i in chosen.iter() {
        let (a, b, _) = edges[i];
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    for &(a, b, _) in &edges[from..] {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    reach_mask(&adj, 0) == full_mask(m)
}

fn recurse<F: FnMut(&[usize])>(
    edges: &[(usize, usize, f64)],
    m: usize,
    i: usize,
    chosen: &mut Vec<usize>,
    comp: &mut Vec<usize>,
    visit: &mut F,
) {
    if chosen.len() == m - 1 {
        visit(chosen);
        return;
    }
    if i == edges.len() {
        return;
    }
    let (a, b, _) = edges[i];
    let (ca, cb) = (comp[a], comp[b]);
    if ca != cb {
        let saved = comp.clone();
        for c in comp.iter_mut() {
            if *c == cb {
                *c = ca;
            }
        }
        chosen.push(i);
        recurse(edges, m, i + 1, chosen, comp, visit);
        chosen.pop();
        *comp = saved;
        if connected_with(edges, m, chosen, i + 1) {
            recurse(edges, m, i + 1, chosen, comp, visit);
        }
    } else {
        recurse(edges, m, i + 1, chosen, comp, visit);
    }
}

pub fn enumerate_spanning_trees(g: &SmallWeightedGraph) -> Result<TreeEnumeration> {
    let edges = g.edges();
    let mut trees = Vec::new();
    let mut partition = 0.0;
    for_each_spanning_tree(g, |idx| {
        let w: f64 = idx.iter().map(|&i| edges[i].2).product();
        partition += w;
        trees.push((idx.iter().map(|&i| (edges[i].0, edges[i].1)).collect(), w));
    })?;
    Ok(TreeEnumeration { trees, partition })
}

/// Exact sum of weight products, each weight read as the rational equal to its float.
pub fn partition_function_exact(g: &SmallWeightedGraph) -> Result<BigRational> {
    let edges = g.edges();
    let weights: Vec<BigRational> = edges.iter().map(|e| super::graph::exact(e.2)).collect();
    let mut total = BigRational::from_integer(0.into());
    for_each_spanning_tree(g, |idx| {
        let w = idx
            .iter()
            .fold(BigRational::from_integer(1.into()), |acc, &i| acc * &weights[i]);
        total += w;
    })?;
    Ok(total)
}

/// Any cofactor of the weighted Laplacian (vertex 0 removed).
pub fn matrix_tree_determinant(g: &SmallWeightedGraph) -> f64 {
    if g.m() == 1 {
        return 1.0;
    }
    g.reduced_laplacian(0).determinant()
}

pub fn matrix_tree_determinant_exact(g: &SmallWeightedGraph) -> BigRational {
    if g.m() == 1 {
        return BigRational::from_integer(1.into());
    }
    g.reduced_laplacian_exact(0).determinant()
}
