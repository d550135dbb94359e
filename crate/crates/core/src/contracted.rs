//! Aldous–Broder on the contracted component graph, and the full tree
//! assembled from it.
//!
//! On the contracted graph the walk moves to component `B` with probability
//! `|B|/n` from anywhere, and each move leaves through a uniform vertex of the
//! current component and lands on a uniform vertex of the next. First-entry
//! moves are the tree edges; a uniform spanning tree inside every component
//! completes the spanning tree of `[n]`.

use rand::Rng;

use crate::disorder::{ComponentDecomposition, ContractedGraph, DisorderSample};
use crate::error::{Error, Result};
use crate::metrics::Bfs;
use crate::seeds::rng_from_seed;
use crate::tree::WeightedTree;
use crate::wilson::wilson_on_component;

/// Default step cap for a walk over `n` original vertices: `50 n ceil(ln(n+1))`.
pub fn default_max_steps(n: usize) -> usize {
    50 * n * ((n as f64 + 1.0).ln().ceil() as usize).max(1)
}

/// The visited component sequence `X_1, X_2, ...` with the original vertices
/// used to enter and leave each visit.
///
/// `entry_vertex[i]` lies in `visited[i]`; `entry_vertex[0]` is the uniform
/// start vertex. `exit_vertex[i]` is where the walk left `visited[i]` for
/// `visited[i + 1]`, so it is one shorter than `visited`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContractedWalkTrace {
    pub visited: Vec<u32>,
    pub entry_vertex: Vec<u32>,
    pub exit_vertex: Vec<u32>,
    /// One-based index of the first revisit (`t_1 >= 2`), if any.
    pub first_repeat_index: Option<usize>,
}

impl ContractedWalkTrace {
    pub fn steps(&self) -> usize {
        self.exit_vertex.len()
    }
}

/// A first-entry edge of the contracted walk, with the original vertices it joins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContractedEdge {
    pub from: u32,
    pub to: u32,
    pub exit_vertex: u32,
    pub entry_vertex: u32,
}

#[derive(Debug, Clone)]
pub struct ContractedWalk {
    /// Spanning tree on the component indices.
    pub tree: WeightedTree,
    /// The same edges with their original endpoints, in first-entry order.
    pub links: Vec<ContractedEdge>,
    pub trace: ContractedWalkTrace,
}

pub fn aldous_broder_contracted(
    g: &ContractedGraph,
    start: usize,
    seed: u64,
    max_steps: usize,
) -> Result<ContractedWalk> {
    let mut rng = rng_from_seed(seed);
    aldous_broder_contracted_with_rng(g, start, &mut rng, max_steps)
}

pub fn aldous_broder_contracted_with_rng<R: Rng + ?Sized>(
    g: &ContractedGraph,
    start: usize,
    rng: &mut R,
    max_steps: usize,
) -> Result<ContractedWalk> {
    let m = g.len();
    if start >= m {
        return Err(Error::InvalidArgument(format!(
            "start component {start} outside [0, {m})"
        )));
    }
    let mut seen = vec![false; m];
    seen[start] = true;
    let mut visited_count = 1usize;
    let mut trace = ContractedWalkTrace {
        visited: vec![start as u32],
        entry_vertex: vec![g.uniform_member(start, rng)],
        exit_vertex: Vec::new(),
        first_repeat_index: None,
    };
    let mut links = Vec::with_capacity(m.saturating_sub(1));
    let mut current = start;
    let mut steps = 0usize;
    while visited_count < m {
        if steps >= max_steps {
            return Err(Error::PartialCover {
                steps,
                visited: visited_count,
                total: m,
                trace: Box::new(trace),
            });
        }
        let exit = g.uniform_member(current, rng);
        let (next, entry) = g.step(rng);
        steps += 1;
        trace.exit_vertex.push(exit);
        trace.visited.push(next as u32);
        trace.entry_vertex.push(entry);
        if seen[next] {
            if trace.first_repeat_index.is_none() {
                trace.first_repeat_index = Some(trace.visited.len());
            }
        } else {
            seen[next] = true;
            visited_count += 1;
            links.push(ContractedEdge {
                from: current as u32,
                to: next as u32,
                exit_vertex: exit,
                entry_vertex: entry,
            });
        }
        current = next;
    }
    let tree_edges = links.iter().map(|l| (l.from, l.to)).collect();
    let tree = WeightedTree::from_edges(m, tree_edges).expect("first-entry edges form a tree");
    Ok(ContractedWalk { tree, links, trace })
}

/// A spanning tree of `[n]` built by contraction, with the walk that joined
/// the components.
#[derive(Debug, Clone)]
pub struct AssembledTree {
    pub tree: WeightedTree,
    pub walk: ContractedWalk,
}

/// Uniform spanning trees inside each component joined by the contracted
/// Aldous–Broder tree. The walk starts in the component of a uniform vertex.
pub fn assemble_contracted_tree<R: Rng + ?Sized>(
    sample: &DisorderSample,
    decomp: &ComponentDecomposition,
    rng: &mut R,
    max_steps: usize,
) -> Result<AssembledTree> {
    let n = sample.n();
    let g = crate::disorder::contract(decomp);
    let start_vertex = rng.random_range(0..n);
    let start = decomp.label(start_vertex);
    let mut walk = aldous_broder_contracted_with_rng(&g, start, rng, max_steps)?;
    // the start entry is the uniform vertex that selected the start component
    walk.trace.entry_vertex[0] = start_vertex as u32;

    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut next = vec![u32::MAX; n];
    let mut inside = vec![false; n];
    for members in decomp.components() {
        if members.len() > 1 {
            wilson_on_component(sample.adjacency(), members, rng, &mut next, &mut inside, &mut edges);
        }
    }
    edges.extend(walk.links.iter().map(|l| (l.exit_vertex, l.entry_vertex)));
    let tree = WeightedTree::from_edges(n, edges).expect("assembly yields a spanning tree");
    Ok(AssembledTree { tree, walk })
}

/// `sum_{i < t_1} d_{S_i}(u_i, v_i)`: heavy-graph distances between the entry
/// and exit vertex of each component visited before the first repeat.
pub fn assemble_lower_bound_path(
    trace: &ContractedWalkTrace,
    sample: &DisorderSample,
    decomp: &ComponentDecomposition,
) -> Result<u64> {
    let t1 = trace
        .first_repeat_index
        .ok_or_else(|| Error::NotApplicable("the walk never revisited a component".into()))?;
    let graph = sample.adjacency();
    let mut bfs = Bfs::new(sample.n());
    let mut total = 0u64;
    for i in 0..t1 - 1 {
        let (u, v) = (trace.entry_vertex[i] as usize, trace.exit_vertex[i] as usize);
        debug_assert_eq!(decomp.label(u), trace.visited[i] as usize);
        debug_assert_eq!(decomp.label(v), trace.visited[i] as usize);
        if u != v {
            total += bfs
                .distance_between(graph, u, v)
                .expect("entry and exit share a component") as u64;
        }
    }
    Ok(total)
}

/// True iff some tree path between two vertices of one component uses a
/// weight-1 edge.
///
/// Heavy tree edges always join vertices of one component. A component's
/// tree paths all stay heavy exactly when the tree holds `|C| - 1` heavy
/// edges inside it, so the event is `#heavy tree edges < n - #components`.
pub fn path_containment_violation(
    sample: &DisorderSample,
    t: &WeightedTree,
    decomp: &ComponentDecomposition,
) -> bool {
    let heavy_in_tree = t
        .edges()
        .iter()
        .filter(|&&(a, b)| sample.is_heavy(a as usize, b as usize))
        .count();
    heavy_in_tree < sample.n() - decomp.len()
}
