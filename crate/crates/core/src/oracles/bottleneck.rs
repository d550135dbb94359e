//! Bottleneck ratio by subset enumeration, and the degree balance ratio.

use crate::error::{invalid, Error, Result};
use crate::oracles::graph::{SmallWeightedGraph, MAX_SMALL_VERTICES};

/// Boundary weight, internal weight and volume of the set `mask`.
fn set_weights(g: &SmallWeightedGraph, edges: &[(usize, usize, f64)], deg: &[f64], mask: u32) -> (f64, f64, f64) {
    let (mut boundary, mut inside) = (0.0, 0.0);
    for &(a, b, w) in edges {
        match (mask >> a & 1, mask >> b & 1) {
            (1, 1) => inside += w,
            (0, 0) => {}
            _ => boundary += w,
        }
    }
    let vol = (0..g.m()).filter(|&v| mask >> v & 1 == 1).map(|v| deg[v]).sum();
    (boundary, inside, vol)
}

/// `min_S w(E(S, S^c)) / (2 w(E(S, V)))` over non-empty `S` whose stationary
/// mass `vol(S) / vol(V)` is at most 1/2. `E(S, V)` counts each edge meeting
/// `S` once.
pub fn bottleneck_ratio_exact(g: &SmallWeightedGraph) -> Result<f64> {
    let m = g.m();
    if m > MAX_SMALL_VERTICES {
        return Err(Error::SizeLimit {
            size: m,
            limit: MAX_SMALL_VERTICES,
        });
    }
    if m < 2 || !g.is_connected() {
        return Err(Error::NoSpanningTree);
    }
    let edges = g.edges();
    let deg: Vec<f64> = (0..m).map(|v| g.degree(v)).collect();
    let total: f64 = deg.iter().sum();
    let full = (1u32 << m) - 1;
    let mut best = f64::INFINITY;
    // vertex 0 stays outside `mask`; its complement covers the other side
    for half in 1..(1u32 << (m - 1)) {
        let mask = half << 1;
        for s in [mask, full & !mask] {
            let (boundary, inside, vol) = set_weights(g, &edges, &deg, s);
            if vol <= total / 2.0 {
                best = best.min(boundary / (2.0 * (boundary + inside)));
            }
        }
    }
    Ok(best)
}

/// Largest over smallest weighted degree.
pub fn balanced_ratio(g: &SmallWeightedGraph) -> Result<f64> {
    if g.m() < 2 {
        return Err(invalid("need at least two vertices"));
    }
    let deg: Vec<f64> = (0..g.m()).map(|v| g.degree(v)).collect();
    let max = deg.iter().cloned().fold(f64::MIN, f64::max);
    let min = deg.iter().cloned().fold(f64::MAX, f64::min);
    Ok(max / min)
}
