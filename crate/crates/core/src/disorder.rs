//! Two-point edge disorder on the complete graph and its coupled
//! Erdős–Rényi graph.
//!
//! Each pair of `[n]` independently carries weight `n^(1+gamma)` with
//! probability `1/n` and weight 1 otherwise. Only the heavy pairs are stored;
//! they form a `G(n, 1/n)` graph whose components drive everything else.
//! Vertices are numbered `0..n`, so "smallest label" means smallest index.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{invalid, Result};
use crate::metrics::{all_sources_diameter, double_sweep, Bfs, Csr};
use crate::seeds::{rng_from_seed, SimRng};
use crate::union_find::UnionFind;

/// Components larger than this with a cycle get a double-sweep lower bound
/// instead of an exact all-sources diameter.
pub const DEFAULT_DIAMETER_SIZE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct DisorderSample {
    n: usize,
    gamma: f64,
    heavy_edges: Vec<(u32, u32)>,
    adjacency: Csr,
    master_seed: u64,
}

impl DisorderSample {
    /// Builds a sample from an explicit heavy-edge set. Pairs are normalised to
    /// `(min, max)` and must be distinct, in range and loop-free.
    pub fn from_heavy_edges(n: usize, gamma: f64, edges: &[(u32, u32)]) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if n > u32::MAX as usize {
            return Err(invalid("n does not fit in 32-bit vertex labels"));
        }
        let mut normalised = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(invalid(format!("edge ({a}, {b}) has an endpoint outside [0, {n})")));
            }
            if a == b {
                return Err(invalid(format!("self-loop at vertex {a}")));
            }
            normalised.push((a.min(b), a.max(b)));
        }
        normalised.sort_unstable();
        if normalised.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("duplicate heavy edge"));
        }
        Ok(Self::from_sorted(n, gamma, normalised, 0))
    }

    fn from_sorted(n: usize, gamma: f64, heavy_edges: Vec<(u32, u32)>, master_seed: u64) -> Self {
        let adjacency = Csr::from_edges(n, &heavy_edges);
        Self {
            n,
            gamma,
            heavy_edges,
            adjacency,
            master_seed,
        }
    }

    /// Disjoint path components with the given sizes on consecutive labels.
    pub fn with_path_components(sizes: &[usize], gamma: f64) -> Result<Self> {
        let n: usize = sizes.iter().sum();
        let mut edges = Vec::new();
        let mut start = 0u32;
        for &s in sizes {
            if s == 0 {
                return Err(invalid("component sizes must be positive"));
            }
            for i in 1..s as u32 {
                edges.push((start + i - 1, start + i));
            }
            start += s as u32;
        }
        Self::from_heavy_edges(n, gamma, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn heavy_edges(&self) -> &[(u32, u32)] {
        &self.heavy_edges
    }

    /// Heavy-edge adjacency (the coupled Erdős–Rényi graph).
    pub fn adjacency(&self) -> &Csr {
        &self.adjacency
    }

    /// `n^(1+gamma)`.
    pub fn heavy_weight(&self) -> f64 {
        (self.n as f64).powf(1.0 + self.gamma)
    }

    pub fn is_heavy(&self, a: usize, b: usize) -> bool {
        a != b && self.adjacency.has_edge(a, b)
    }

    /// Implied weight of the pair `{a, b}`; `a != b`.
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        if self.is_heavy(a, b) {
            self.heavy_weight()
        } else {
            1.0
        }
    }

    pub fn heavy_degree(&self, v: usize) -> usize {
        self.adjacency.degree(v)
    }
}

/// Draws the disorder with heavy probability `1/n`.
pub fn sample_disorder(n: usize, gamma: f64, seed: u64) -> Result<DisorderSample> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    sample_disorder_with_probability(n, gamma, 1.0 / n as f64, seed)
}

/// Same as [`sample_disorder`] with an explicit heavy-edge probability `p`.
pub fn sample_disorder_with_probability(
    n: usize,
    gamma: f64,
    p: f64,
    seed: u64,
) -> Result<DisorderSample> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if n > u32::MAX as usize {
        return Err(invalid("n does not fit in 32-bit vertex labels"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    let edges = sample_pairs(n, pairs, p, &mut rng);
    let mut sample = DisorderSample::from_sorted(n, gamma, edges, seed);
    sample.master_seed = seed;
    Ok(sample)
}

fn sample_pairs(n: usize, pairs: u64, p: f64, rng: &mut SimRng) -> Vec<(u32, u32)> {
    if pairs == 0 || p == 0.0 {
        return Vec::new();
    }
    if p >= 1.0 {
        let mut all = Vec::with_capacity(pairs as usize);
        for a in 0..n as u32 {
            for b in a + 1..n as u32 {
                all.push((a, b));
            }
        }
        return all;
    }
    let count = Binomial::new(pairs, p).expect("valid binomial").sample(rng);
    // A dense draw would spin on rejection; enumerate and thin instead.
    if count.saturating_mul(2) > pairs {
        let mut all = Vec::with_capacity(count as usize);
        let mut chosen = rand::seq::index::sample(rng, pairs as usize, count as usize).into_vec();
        chosen.sort_unstable();
        let mut next = chosen.into_iter().peekable();
        let mut idx = 0usize;
        'outer: for a in 0..n as u32 {
            for b in a + 1..n as u32 {
                match next.peek() {
                    Some(&c) if c == idx => {
                        all.push((a, b));
                        next.next();
                    }
                    None => break 'outer,
                    _ => {}
                }
                idx += 1;
            }
        }
        return all;
    }
    let mut set = HashSet::with_capacity(count as usize);
    let mut edges = Vec::with_capacity(count as usize);
    while (edges.len() as u64) < count {
        let a = rng.random_range(0..n as u32);
        let b = rng.random_range(0..n as u32);
        if a == b {
            continue;
        }
        let e = (a.min(b), a.max(b));
        if set.insert(e) {
            edges.push(e);
        }
    }
    edges.sort_unstable();
    edges
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentDecomposition {
    n: usize,
    label: Vec<u32>,
    components: Vec<Vec<u32>>,
    sizes: Vec<usize>,
    excess: Vec<i64>,
    diameter: Vec<u32>,
    diameter_exact: Vec<bool>,
}

impl ComponentDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Component index of every vertex.
    pub fn labels(&self) -> &[u32] {
        &self.label
    }

    pub fn label(&self, v: usize) -> usize {
        self.label[v] as usize
    }

    /// Vertex lists, largest first, ties by smallest member. Members are sorted.
    pub fn components(&self) -> &[Vec<u32>] {
        &self.components
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn excess(&self) -> &[i64] {
        &self.excess
    }

    pub fn diameters(&self) -> &[u32] {
        &self.diameter
    }

    /// False where a component hit the size cap and its diameter is a lower bound.
    pub fn diameter_exact(&self) -> &[bool] {
        &self.diameter_exact
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn largest_size(&self) -> usize {
        self.sizes.first().copied().unwrap_or(0)
    }

    pub fn max_excess(&self) -> i64 {
        self.excess.iter().copied().max().unwrap_or(-1)
    }

    pub fn max_diameter(&self) -> u32 {
        self.diameter.iter().copied().max().unwrap_or(0)
    }

    pub fn all_diameters_exact(&self) -> bool {
        self.diameter_exact.iter().all(|&x| x)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    pub diameter_size_cap: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            diameter_size_cap: DEFAULT_DIAMETER_SIZE_CAP,
        }
    }
}

pub fn decompose(sample: &DisorderSample) -> ComponentDecomposition {
    decompose_with(sample, DecomposeOptions::default())
}

pub fn decompose_with(sample: &DisorderSample, options: DecomposeOptions) -> ComponentDecomposition {
    let n = sample.n();
    let mut uf = UnionFind::new(n);
    for &(a, b) in sample.heavy_edges() {
        uf.union(a as usize, b as usize);
    }
    // Vertices are scanned in increasing order, so each list is sorted and its
    // first entry is the smallest member.
    let mut root_slot = vec![u32::MAX; n];
    let mut groups: Vec<Vec<u32>> = Vec::new();
    for v in 0..n {
        let r = uf.find(v);
        if root_slot[r] == u32::MAX {
            root_slot[r] = groups.len() as u32;
            groups.push(Vec::new());
        }
        groups[root_slot[r] as usize].push(v as u32);
    }
    groups.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));

    let mut label = vec![0u32; n];
    for (i, members) in groups.iter().enumerate() {
        for &v in members {
            label[v as usize] = i as u32;
        }
    }
    let mut edge_count = vec![0i64; groups.len()];
    for &(a, _) in sample.heavy_edges() {
        edge_count[label[a as usize] as usize] += 1;
    }
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let excess: Vec<i64> = edge_count
        .iter()
        .zip(&sizes)
        .map(|(&e, &s)| e - s as i64)
        .collect();

    let graph = sample.adjacency();
    let mut bfs = Bfs::new(n);
    let mut diameter = Vec::with_capacity(groups.len());
    let mut diameter_exact = Vec::with_capacity(groups.len());
    for (members, &exc) in groups.iter().zip(&excess) {
        if members.len() == 1 {
            diameter.push(0);
            diameter_exact.push(true);
        } else if exc == -1 {
            diameter.push(double_sweep(graph, &mut bfs, members[0] as usize));
            diameter_exact.push(true);
        } else if members.len() <= options.diameter_size_cap {
            diameter.push(all_sources_diameter(graph, &mut bfs, members));
            diameter_exact.push(true);
        } else {
            diameter.push(double_sweep(graph, &mut bfs, members[0] as usize));
            diameter_exact.push(false);
        }
    }

    ComponentDecomposition {
        n,
        label,
        components: groups,
        sizes,
        excess,
        diameter,
        diameter_exact,
    }
}

/// The union of the `k` largest components, as a sorted vertex list.
pub fn union_top_k(decomp: &ComponentDecomposition, k: usize) -> Result<Vec<u32>> {
    if k == 0 || k > decomp.len() {
        return Err(invalid(format!(
            "k = {k} outside [1, {}] components",
            decomp.len()
        )));
    }
    let mut vertices: Vec<u32> = decomp.components()[..k].iter().flatten().copied().collect();
    vertices.sort_unstable();
    Ok(vertices)
}

/// Component-level multigraph: one vertex per component, weight `|A||B|`
/// between distinct components and a single self-loop of weight `|A|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractedGraph {
    n: usize,
    sizes: Vec<usize>,
    members: Vec<Vec<u32>>,
    label: Vec<u32>,
}

pub fn contract(decomp: &ComponentDecomposition) -> ContractedGraph {
    ContractedGraph {
        n: decomp.n(),
        sizes: decomp.sizes().to_vec(),
        members: decomp.components().to_vec(),
        label: decomp.labels().to_vec(),
    }
}

impl ContractedGraph {
    /// Components on consecutive vertex blocks, in the order given.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(invalid("sizes must be non-empty and positive"));
        }
        let n: usize = sizes.iter().sum();
        let mut members = Vec::with_capacity(sizes.len());
        let mut label = Vec::with_capacity(n);
        let mut next = 0u32;
        for (i, &s) in sizes.iter().enumerate() {
            members.push((next..next + s as u32).collect());
            label.extend(std::iter::repeat_n(i as u32, s));
            next += s as u32;
        }
        Ok(Self {
            n,
            sizes: sizes.to_vec(),
            members,
            label,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn members(&self, a: usize) -> &[u32] {
        &self.members[a]
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.label[v] as usize
    }

    /// `|A||B|`; for `a == b` this is the merged self-loop `|A|^2`.
    pub fn weight(&self, a: usize, b: usize) -> u128 {
        self.sizes[a] as u128 * self.sizes[b] as u128
    }

    pub fn self_loop(&self, a: usize) -> u128 {
        self.weight(a, a)
    }

    /// Total weight at `a`, self-loop included: `|A| n`.
    pub fn incident_weight(&self, a: usize) -> u128 {
        (0..self.len()).map(|b| self.weight(a, b)).sum()
    }

    /// One-step walk probability `A -> B`, which does not depend on `A`.
    pub fn step_probability(&self, b: usize) -> f64 {
        self.sizes[b] as f64 / self.n as f64
    }

    /// Next component: the component of a uniform vertex, returned together
    /// with that vertex (a uniform entry point of the chosen component).
    pub fn step<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, u32) {
        let v = rng.random_range(0..self.n as u32);
        (self.label[v as usize] as usize, v)
    }

    pub fn uniform_member<R: Rng + ?Sized>(&self, a: usize, rng: &mut R) -> u32 {
        let m = &self.members[a];
        m[rng.random_range(0..m.len())]
    }
}
