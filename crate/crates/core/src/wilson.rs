//! Wilson's algorithm: loop-erased random walks into a growing tree.

use rand::Rng;

use crate::disorder::DisorderSample;
use crate::error::{Error, Result};
use crate::metrics::Csr;
use crate::seeds::rng_from_seed;
use crate::tree::WeightedTree;

const NONE: u32 = u32::MAX;

/// One weighted random-walk step from `u` on the two-valued complete graph.
///
/// The heavy block (total weight `h * W`) is chosen against the light block
/// (total weight `n - 1 - h`); inside the light block a uniform vertex is drawn
/// and redrawn while it is `u` or a heavy neighbor.
#[inline]
pub fn disorder_step<R: Rng + ?Sized>(sample: &DisorderSample, heavy_weight: f64, u: usize, rng: &mut R) -> usize {
    let n = sample.n();
    let heavy = sample.adjacency().neighbors(u);
    let h = heavy.len();
    let light = n - 1 - h;
    if h > 0 {
        let heavy_mass = h as f64 * heavy_weight;
        let pick_heavy = light == 0 || {
            let total = heavy_mass + light as f64;
            !heavy_mass.is_finite() || rng.random::<f64>() * total < heavy_mass
        };
        if pick_heavy {
            return heavy[rng.random_range(0..h)] as usize;
        }
    }
    loop {
        let v = rng.random_range(0..n);
        if v != u && heavy.binary_search(&(v as u32)).is_err() {
            return v;
        }
    }
}

/// Exact weighted UST of the disorder's complete graph, rooted at vertex 0.
pub fn wilson_ust(sample: &DisorderSample, seed: u64) -> WeightedTree {
    let mut rng = rng_from_seed(seed);
    wilson_ust_with_rng(sample, &mut rng, None).expect("no budget given")
}

/// Wilson's algorithm with an optional cap on the total number of walk steps.
pub fn wilson_ust_with_rng<R: Rng + ?Sized>(
    sample: &DisorderSample,
    rng: &mut R,
    step_budget: Option<u64>,
) -> Result<WeightedTree> {
    let n = sample.n();
    let w = sample.heavy_weight();
    let mut in_tree = vec![false; n];
    let mut next = vec![NONE; n];
    in_tree[0] = true;
    let mut steps = 0u64;
    for start in 1..n {
        let mut u = start;
        while !in_tree[u] {
            let v = disorder_step(sample, w, u, rng);
            next[u] = v as u32;
            u = v;
            steps += 1;
            if let Some(budget) = step_budget {
                if steps > budget {
                    return Err(Error::StepBudgetExceeded { budget });
                }
            }
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = next[u] as usize;
        }
    }
    let edges = (1..n).map(|v| (v as u32, next[v])).collect();
    Ok(WeightedTree::from_edges(n, edges).expect("Wilson output is a spanning tree"))
}

/// Uniform spanning tree of the connected subgraph of `graph` induced on
/// `members`, rooted at `members[0]`. Returns parent pointers as edges in
/// global labels. `scratch_next` and `scratch_in` must have length `graph.len()`
/// and are left dirty only on `members`.
pub fn wilson_on_component<R: Rng + ?Sized>(
    graph: &Csr,
    members: &[u32],
    rng: &mut R,
    scratch_next: &mut [u32],
    scratch_in: &mut [bool],
    out: &mut Vec<(u32, u32)>,
) {
    let root = members[0] as usize;
    scratch_in[root] = true;
    for &start in &members[1..] {
        let mut u = start as usize;
        while !scratch_in[u] {
            let nb = graph.neighbors(u);
            let v = nb[rng.random_range(0..nb.len())];
            scratch_next[u] = v;
            u = v as usize;
        }
        let mut u = start as usize;
        while !scratch_in[u] {
            scratch_in[u] = true;
            u = scratch_next[u] as usize;
        }
    }
    for &v in &members[1..] {
        out.push((v, scratch_next[v as usize]));
    }
    for &v in members {
        scratch_in[v as usize] = false;
        scratch_next[v as usize] = NONE;
    }
}
