//! Every connected graph on a few vertices, one per isomorphism class, and
//! the excess/diameter bound for their spanning trees.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::oracles::enumerate::for_each_spanning_tree;
use crate::oracles::graph::{full_mask, mask_diameter, reach_mask, SmallWeightedGraph};

pub const MAX_ATLAS_VERTICES: usize = 8;

/// Upper-triangle bit code of `adj` read in the vertex order `order`.
fn code(adj: &[u32], order: &[usize]) -> u64 {
    let m = order.len();
    let mut c = 0u64;
    for i in 0..m {
        for j in i + 1..m {
            c = (c << 1) | ((adj[order[i]] >> order[j]) & 1) as u64;
        }
    }
    c
}

/// Largest code over orderings that list vertices by non-increasing degree.
/// That set of orderings is preserved by isomorphisms, so the result is a
/// complete invariant.
fn canonical(adj: &[u32]) -> u64 {
    let m = adj.len();
    let mut by_degree: Vec<usize> = (0..m).collect();
    by_degree.sort_by_key(|&v| std::cmp::Reverse(adj[v].count_ones()));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &v in &by_degree {
        match groups.last_mut() {
            Some(g) if adj[g[0]].count_ones() == adj[v].count_ones() => g.push(v),
            _ => groups.push(vec![v]),
        }
    }
    let mut best = 0u64;
    let mut order = Vec::with_capacity(m);
    permute_groups(adj, &mut groups, 0, &mut order, &mut best);
    best
}

fn permute_groups(adj: &[u32], groups: &mut [Vec<usize>], gi: usize, order: &mut Vec<usize>, best: &mut u64) {
    if gi == groups.len() {
        *best = (*best).max(code(adj, order));
        return;
    }
    let len = groups[gi].len();
    heap_permutations(len, &mut groups[gi].clone(), &mut |perm| {
        let base = order.len();
        order.extend_from_slice(perm);
        permute_groups(adj, groups, gi + 1, order, best);
        order.truncate(base);
    });
}

fn heap_permutations<F: FnMut(&[usize])>(k: usize, items: &mut Vec<usize>, f: &mut F) {
    if k <= 1 {
        f(items);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(k - 1, items, f);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    heap_permutations(k - 1, items, f);
}

fn decode(m: usize, c: u64) -> Vec<u32> {
    let mut adj = vec![0u32; m];
    let mut bit = (m * (m - 1) / 2) as u32;
    for i in 0..m {
        for j in i + 1..m {
            bit -= 1;
            if (c >> bit) & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    adj
}

/// All graphs on `m` vertices up to isomorphism, as neighbor masks. Each is
/// grown from a smaller class by adding a vertex with every neighborhood.
pub fn all_graphs(m: usize) -> Result<Vec<Vec<u32>>> {
    if m == 0 || m > MAX_ATLAS_VERTICES {
        return Err(Error::SizeLimit {
            size: m,
            limit: MAX_ATLAS_VERTICES,
        });
    }
    let mut classes: Vec<u64> = vec![0];
    for size in 2..=m {
        let mut next = HashSet::new();
        for &c in &classes {
            let base = decode(size - 1, c);
            for nb in 0u32..(1 << (size - 1)) {
                let mut adj = base.clone();
                adj.push(nb);
                for (v, row) in adj.iter_mut().enumerate().take(size - 1) {
                    if nb >> v & 1 == 1 {
                        *row |= 1 << (size - 1);
                    }
                }
                next.insert(canonical(&adj));
            }
        }
        classes = next.into_iter().collect();
        classes.sort_unstable();
    }
    Ok(classes.into_iter().map(|c| decode(m, c)).collect())
}

pub fn connected_graphs(m: usize) -> Result<Vec<Vec<u32>>> {
    Ok(all_graphs(m)?
        .into_iter()
        .filter(|adj| reach_mask(adj, 0) == full_mask(m))
        .collect())
}

/// `2 (k + 2) d + k + 1` for excess `k` and graph diameter `d`.
pub fn excess_diameter_bound(excess: i64, diameter: u32) -> i64 {
    2 * (excess + 2) * diameter as i64 + excess + 1
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExcessDiameterReport {
    pub graphs: usize,
    pub trees: usize,
    pub violations: usize,
    /// Smallest `bound - diam(T)` seen.
    pub min_slack: i64,
}

/// Checks `diam(T) <= 2 (k + 2) diam(H) + k + 1` for every spanning tree `T`
/// of every connected graph `H` on `m_min..=m_max` vertices.
pub fn check_excess_diameter_bound(m_min: usize, m_max: usize) -> Result<ExcessDiameterReport> {
    let mut report = ExcessDiameterReport {
        min_slack: i64::MAX,
        ..Default::default()
    };
    for m in m_min.max(1)..=m_max {
        for adj in connected_graphs(m)? {
            let edges: Vec<(usize, usize, f64)> = (0..m)
                .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
                .filter(|&(a, b)| adj[a] >> b & 1 == 1)
                .map(|(a, b)| (a, b, 1.0))
                .collect();
            let excess = edges.len() as i64 - m as i64;
            let diameter = mask_diameter(&adj).expect("connected");
            let bound = excess_diameter_bound(excess, diameter);
            let g = SmallWeightedGraph::from_edges(m, &edges)?;
            let list = g.edges();
            report.graphs += 1;
            for_each_spanning_tree(&g, |idx| {
                let mut tree = vec![0u32; m];
                for &i in idx {
                    let (a, b, _) = list[i];
                    tree[a] |= 1 << b;
                    tree[b] |= 1 << a;
                }
                let d = mask_diameter(&tree).expect("trees are connected") as i64;
                report.trees += 1;
                report.min_slack = report.min_slack.min(bound - d);
                if d > bound {
                    report.violations += 1;
                }
            })?;
        }
    }
    Ok(report)
}
