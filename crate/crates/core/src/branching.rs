//! Critical branching processes, the one-vertex-at-a-time exploration of
//! `G(n, p)` with lazily revealed edges, and its domination by a branching
//! process with `Bin(n, p)` offspring.

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metrics::{all_sources_diameter, Bfs, Csr};
use crate::seeds::{rng_from_seed, SeedStream};

/// Populations beyond this are clamped; they cannot die out in any run we
/// can afford, and the sampler needs `trials * p` to fit in an `i64`.
const MAX_TRIALS: u64 = 1 << 50;

pub(crate) fn binomial<R: Rng + ?Sized>(rng: &mut R, trials: u64, p: f64) -> u64 {
    let trials = trials.min(MAX_TRIALS);
    if trials == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        trials
    } else {
        Binomial::new(trials, p).expect("p in (0, 1)").sample(rng)
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("edge probability {p} outside [0, 1]")))
    }
}

/// `ceil(10 sqrt(n))`.
pub fn default_height_cap(n: usize) -> usize {
    (10.0 * (n as f64).sqrt()).ceil() as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BPRun {
    /// `Z_0 = 1, Z_1, ...` up to extinction or the cap.
    pub generation_sizes: Vec<u64>,
    /// Last generation index with `Z_k > 0`.
    pub height: usize,
    pub total_progeny: u64,
    /// Generation `height_cap` was still alive.
    pub capped: bool,
}

pub fn simulate_bp(n: usize, height_cap: usize, seed: u64) -> Result<BPRun> {
    let mut rng = rng_from_seed(seed);
    simulate_bp_with_rng(n, 1.0 / n.max(1) as f64, height_cap, &mut rng)
}

/// Offspring `Bin(n, p)`; a generation of size `z` is drawn as one `Bin(n z, p)`.
pub fn simulate_bp_with_rng<R: Rng + ?Sized>(n: usize, p: f64, height_cap: usize, rng: &mut R) -> Result<BPRun> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if height_cap == 0 {
        return Err(invalid("height_cap must be at least 1"));
    }
    check_p(p)?;
    let mut sizes = vec![1u64];
    let mut z = 1u64;
    while z > 0 && sizes.len() <= height_cap {
        // supercritical runs can outgrow u64; sizes saturate
        z = binomial(rng, (n as u64).saturating_mul(z), p);
        sizes.push(z);
    }
    if z == 0 {
        sizes.pop();
    }
    Ok(BPRun {
        height: sizes.len() - 1,
        total_progeny: sizes.iter().fold(0u64, |a, &b| a.saturating_add(b)),
        capped: z > 0,
        generation_sizes: sizes,
    })
}

/// Empirical `P(height > k)`. Capped runs certainly exceed any `k` below the
/// cap, so they count as exceeding; `k` must be below every run's cap.
pub fn bp_height_tail(runs: &[BPRun], k: usize, height_cap: usize) -> Result<f64> {
    if k >= height_cap {
        return Err(invalid(format!("k = {k} is not below the height cap {height_cap}")));
    }
    if runs.is_empty() {
        return Err(invalid("no runs"));
    }
    let over = runs.iter().filter(|r| r.capped || r.height > k).count();
    Ok(over as f64 / runs.len() as f64)
}

/// `[n]` minus removed vertices; draws are uniform without replacement.
/// Only displaced slots of the implicit identity permutation are stored.
#[derive(Debug, Default)]
struct VertexPool {
    remaining: usize,
    moved: HashMap<u32, u32>,
}

impl VertexPool {
    fn new(n: usize) -> Self {
        Self {
            remaining: n,
            moved: HashMap::new(),
        }
    }

    fn slot(&self, i: u32) -> u32 {
        *self.moved.get(&i).unwrap_or(&i)
    }

    fn take_slot(&mut self, i: u32) -> u32 {
        let v = self.slot(i);
        let last = (self.remaining - 1) as u32;
        let tail = self.slot(last);
        self.moved.insert(i, tail);
        self.moved.remove(&last);
        self.remaining -= 1;
        v
    }

    /// Removes `v` before any draw has happened.
    fn remove_initial(&mut self, v: u32) {
        debug_assert!(self.moved.is_empty());
        self.take_slot(v);
    }

    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> u32 {
        let i = rng.random_range(0..self.remaining as u32);
        self.take_slot(i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationLog {
    /// `|A_0| = 1, |A_1|, ..., |A_steps|`.
    pub active_sizes: Vec<u64>,
    /// Newly discovered unseen neighbors at each step.
    pub eta: Vec<u64>,
    pub component_of_start: Vec<u32>,
    /// Edges found from the explored vertex to other active vertices while
    /// exploring the start's component.
    pub cycle_edges_found: u64,
    /// The same count over every step run.
    pub cycle_edges_total: u64,
    pub steps: usize,
}

impl ExplorationLog {
    pub fn component_size(&self) -> usize {
        self.component_of_start.len()
    }

    /// Checks `|A_t| = |A_{t-1}| + eta_t - 1` (or `eta_t` after an empty
    /// active set) at every step.
    pub fn recursion_holds(&self) -> bool {
        (1..=self.steps).all(|t| {
            let prev = self.active_sizes[t - 1];
            let expect = if prev > 0 { prev + self.eta[t - 1] - 1 } else { self.eta[t - 1] };
            self.active_sizes[t] == expect
        })
    }
}

pub fn explore_component(n: usize, p: f64, start: usize, seed: u64, full_run: bool) -> Result<ExplorationLog> {
    let mut rng = rng_from_seed(seed);
    explore_component_with_rng(n, p, start, &mut rng, full_run)
}

/// Step `t` explores the oldest active vertex and discovers
/// `Bin(n - (t-1) - |A_{t-1}|, p)` unseen vertices, drawn uniformly from the
/// unseen pool; with no active vertex a uniform unseen vertex starts the next
/// component and finds `Bin(n - t, p)`. Edges to the other active vertices
/// are counted as `Bin(|A_{t-1}| - 1, p)`.
pub fn explore_component_with_rng<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    start: usize,
    rng: &mut R,
    full_run: bool,
) -> Result<ExplorationLog> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if start >= n {
        return Err(invalid(format!("start {start} outside [0, {n})")));
    }
    check_p(p)?;
    let mut pool = VertexPool::new(n);
    pool.remove_initial(start as u32);
    let mut active: VecDeque<u32> = VecDeque::from([start as u32]);
    let mut log = ExplorationLog {
        active_sizes: vec![1],
        eta: Vec::new(),
        component_of_start: Vec::new(),
        cycle_edges_found: 0,
        cycle_edges_total: 0,
        steps: 0,
    };
    let mut in_first = true;
    for t in 1..=n {
        let (u, eta, back) = if let Some(u) = active.pop_front() {
            let prev = active.len() as u64 + 1;
            debug_assert_eq!(pool.remaining as u64, (n - (t - 1)) as u64 - prev);
            let back = binomial(rng, prev - 1, p);
            (u, binomial(rng, pool.remaining as u64, p), back)
        } else {
            if !full_run {
                break;
            }
            in_first = false;
            let u = pool.draw(rng);
            (u, binomial(rng, pool.remaining as u64, p), 0)
        };
        for _ in 0..eta {
            active.push_back(pool.draw(rng));
        }
        if in_first {
            log.component_of_start.push(u);
            log.cycle_edges_found += back;
        }
        log.cycle_edges_total += back;
        log.eta.push(eta);
        log.active_sizes.push(active.len() as u64);
        log.steps = t;
        if active.is_empty() && !full_run {
            break;
        }
    }
    Ok(log)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominationTrial {
    pub component_size: usize,
    pub component_diameter: u32,
    /// Height of the dominating branching process.
    pub bp_height: usize,
    pub bp_capped: bool,
    /// Sphere sizes `|dB(x, j)|` of the explored component.
    pub sphere_sizes: Vec<u64>,
    /// Generation sizes `|L_j|` of the dominating process.
    pub bp_generation_sizes: Vec<u64>,
    /// Every sphere fits in its generation and `diam <= 2 height`.
    pub dominated: bool,
}

impl DominationTrial {
    pub fn twice_height(&self) -> usize {
        2 * self.bp_height
    }
}

pub fn coupled_domination_trial(n: usize, seed: u64) -> Result<DominationTrial> {
    coupled_domination_trial_with_p(n, 1.0 / n.max(1) as f64, seed)
}

/// Breadth-first exploration of the component of vertex 0 in `G(n, p)`,
/// revealing every edge inside it, run alongside a branching process whose
/// generation `j` contains the real sphere `dB(0, j)` plus ghost individuals.
/// Each real vertex has its real children plus `Bin(n - |U|, p)` ghost
/// children, so `Bin(n, p)` in total; ghosts have `Bin(n, p)` ghost children.
pub fn coupled_domination_trial_with_p(n: usize, p: f64, seed: u64) -> Result<DominationTrial> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    check_p(p)?;
    let mut rng = rng_from_seed(seed);
    let height_cap = n;
    let mut pool = VertexPool::new(n);
    pool.remove_initial(0);
    let mut local: HashMap<u32, u32> = HashMap::from([(0, 0)]);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut layer: Vec<u32> = vec![0];
    let mut ghosts = 0u64;
    let mut spheres = vec![1u64];
    let mut generations = vec![1u64];

    while generations.last() != Some(&0) && generations.len() <= height_cap {
        let mut next: Vec<u32> = Vec::new();
        let mut next_ghosts = binomial(&mut rng, (n as u64).saturating_mul(ghosts), p);
        for i in 0..layer.len() {
            let u = layer[i];
            let lu = local[&u];
            for &w in layer[i + 1..].iter().chain(next.iter()) {
                if rng.random_bool(p) {
                    edges.push((lu, local[&w]));
                }
            }
            let unseen = pool.remaining as u64;
            let found = binomial(&mut rng, unseen, p);
            next_ghosts = next_ghosts.saturating_add(binomial(&mut rng, n as u64 - unseen, p));
            for _ in 0..found {
                let w = pool.draw(&mut rng);
                let lw = local.len() as u32;
                local.insert(w, lw);
                edges.push((lu, lw));
                next.push(w);
            }
        }
        let real = next.len() as u64;
        if real > 0 {
            spheres.push(real);
        }
        generations.push(real.saturating_add(next_ghosts));
        layer = next;
        ghosts = next_ghosts;
    }
    let capped = generations.last() != Some(&0);
    if !capped {
        generations.pop();
    }
    let height = generations.len() - 1;

    let size = local.len();
    let graph = Csr::from_edges(size, &edges);
    let mut bfs = Bfs::new(size);
    let members: Vec<u32> = (0..size as u32).collect();
    let diameter = all_sources_diameter(&graph, &mut bfs, &members);

    let spheres_fit = spheres
        .iter()
        .enumerate()
        .all(|(j, &s)| generations.get(j).is_some_and(|&g| s <= g));
    Ok(DominationTrial {
        component_size: size,
        component_diameter: diameter,
        bp_height: height,
        bp_capped: capped,
        dominated: spheres_fit && (capped || diameter as usize <= 2 * height),
        sphere_sizes: spheres,
        bp_generation_sizes: generations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRow {
    pub j: usize,
    /// Trials with `|C(start)| = j`.
    pub count: u64,
    pub probability: f64,
    pub stderr: f64,
    /// Fraction of those trials whose component had no cycle; 1 when `count = 0`.
    pub cycle_free_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentStatsTable {
    pub n: usize,
    pub trials: u64,
    pub rows: Vec<SizeRow>,
    /// Fraction of trials in which vertex 1 lies in the component of vertex 0.
    pub same_component: f64,
    pub same_component_stderr: f64,
}

/// Largest `j` with `j^5 <= n`.
pub fn max_valid_j(n: usize) -> usize {
    let mut j = 0usize;
    while ((j + 1) as u128).pow(5) <= n as u128 {
        j += 1;
    }
    j
}

/// Explores the component of vertex 0 in `G(n, 1/n)` once per trial.
pub fn component_statistics(n: usize, trials: u64, j_max: usize, seed: u64) -> Result<ComponentStatsTable> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    if j_max == 0 || j_max > max_valid_j(n) {
        return Err(invalid(format!(
            "j_max = {j_max} outside [1, {}] (need j_max^5 <= n)",
            max_valid_j(n)
        )));
    }
    let stream = SeedStream::new(seed);
    let p = 1.0 / n as f64;
    let zero = || (vec![0u64; j_max + 1], vec![0u64; j_max + 1], 0u64);
    let (sizes, cycle_free, same) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(stream.child("component-stats", t));
            let log = explore_component_with_rng(n, p, 0, &mut rng, false).expect("validated");
            let size = log.component_size();
            let mut acc = zero();
            if size <= j_max {
                acc.0[size] += 1;
                if log.cycle_edges_found == 0 {
                    acc.1[size] += 1;
                }
            }
            if log.component_of_start.contains(&1) {
                acc.2 += 1;
            }
            acc
        })
        .reduce(zero, |mut a, b| {
            for j in 0..=j_max {
                a.0[j] += b.0[j];
                a.1[j] += b.1[j];
            }
            a.2 += b.2;
            a
        });
    let tf = trials as f64;
    let rows = (1..=j_max)
        .map(|j| {
            let p = sizes[j] as f64 / tf;
            SizeRow {
                j,
                count: sizes[j],
                probability: p,
                stderr: (p * (1.0 - p) / tf).sqrt(),
                cycle_free_fraction: if sizes[j] == 0 {
                    1.0
                } else {
                    cycle_free[j] as f64 / sizes[j] as f64
                },
            }
        })
        .collect();
    let q = same as f64 / tf;
    Ok(ComponentStatsTable {
        n,
        trials,
        rows,
        same_component: q,
        same_component_stderr: (q * (1.0 - q) / tf).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bp_basics() {
        let r = simulate_bp(10, 50, 1).unwrap();
        assert_eq!(r.generation_sizes[0], 1);
        assert!(simulate_bp(0, 5, 1).is_err());
        assert!(simulate_bp(5, 0, 1).is_err());
        let mut rng = rng_from_seed(3);
        let dead = simulate_bp_with_rng(10, 0.0, 5, &mut rng).unwrap();
        assert_eq!(dead.generation_sizes, vec![1]);
        assert_eq!(dead.height, 0);
        let forever = simulate_bp_with_rng(3, 1.0, 4, &mut rng).unwrap();
        assert!(forever.capped);
        assert_eq!(forever.height, 4);
        assert_eq!(forever.generation_sizes, vec![1, 3, 9, 27, 81]);
    }

    #[test]
    fn bp_survival_at_two() {
        // P(Z_1 > 0) = 1 - (1/2)^2
        let trials = 40_000;
        let alive = (0..trials)
            .filter(|&s| simulate_bp(2, 10, s).unwrap().height >= 1)
            .count();
        let se = (0.75 * 0.25 / trials as f64).sqrt();
        assert!((alive as f64 / trials as f64 - 0.75).abs() < 3.0 * se);
    }

    #[test]
    fn tail_requires_k_below_cap() {
        let runs: Vec<BPRun> = (0..100).map(|s| simulate_bp(50, 20, s).unwrap()).collect();
        assert!(bp_height_tail(&runs, 20, 20).is_err());
        let t = bp_height_tail(&runs, 0, 20).unwrap();
        assert!(t > 0.0 && t < 1.0);
    }

    #[test]
    fn pool_draws_distinct_vertices() {
        let mut rng = rng_from_seed(5);
        let mut pool = VertexPool::new(50);
        pool.remove_initial(7);
        let mut seen: Vec<u32> = (0..49).map(|_| pool.draw(&mut rng)).collect();
        seen.sort_unstable();
        let expect: Vec<u32> = (0..50).filter(|&v| v != 7).collect();
        assert_eq!(seen, expect);
    }

    #[test]
    fn exploration_edge_cases() {
        let log = explore_component(1, 0.5, 0, 1, true).unwrap();
        assert_eq!(log.component_of_start, vec![0]);
        assert_eq!(log.steps, 1);
        let log = explore_component(20, 0.0, 3, 1, true).unwrap();
        assert_eq!(log.component_size(), 1);
        assert!(log.eta.iter().all(|&e| e == 0));
        assert_eq!(log.steps, 20);
        let log = explore_component(20, 1.0, 3, 1, false).unwrap();
        assert_eq!(log.component_size(), 20);
        assert_eq!(log.eta[0], 19);
        assert!(log.eta[1..].iter().all(|&e| e == 0));
        assert!(explore_component(5, 1.5, 0, 1, false).is_err());
        assert!(explore_component(5, 0.5, 5, 1, false).is_err());
    }

    #[test]
    fn exploration_recursion_and_length() {
        for seed in 0..50 {
            let log = explore_component(300, 1.0 / 300.0, 0, seed, true).unwrap();
            assert!(log.recursion_holds());
            assert_eq!(log.steps, 300);
            assert_eq!(log.eta.iter().sum::<u64>() + 1 + (log.active_sizes[..300].iter().filter(|&&a| a == 0).count() as u64), 300);
            let first_zero = log.active_sizes.iter().position(|&a| a == 0).unwrap();
            assert_eq!(first_zero, log.component_size());
        }
    }

    #[test]
    fn domination_edge_cases() {
        let t = coupled_domination_trial_with_p(10, 0.0, 1).unwrap();
        assert_eq!((t.component_diameter, t.bp_height, t.dominated), (0, 0, true));
        for seed in 0..300 {
            let t = coupled_domination_trial(500, seed).unwrap();
            assert!(t.dominated);
            assert!(t.component_diameter as usize <= t.component_size.saturating_sub(1));
        }
        assert!(coupled_domination_trial(1, 0).is_err());
    }

    #[test]
    fn isolated_vertex_probability() {
        // P(|C| = 1) = (1 - 1/n)^(n-1); at n = 2 this is 1/2
        let t = component_statistics(32, 20_000, 2, 9).unwrap();
        let p1 = (1.0 - 1.0 / 32.0f64).powi(31);
        assert!((t.rows[0].probability - p1).abs() < 4.0 * t.rows[0].stderr);
        assert_eq!(t.rows[0].cycle_free_fraction, 1.0);
        assert!(component_statistics(32, 10, 3, 1).is_err());
        assert_eq!(max_valid_j(100_000), 10);
        assert_eq!(max_valid_j(2), 1);
        let t = component_statistics(2, 20_000, 1, 4).unwrap();
        assert!((t.rows[0].probability - 0.5).abs() < 4.0 * t.rows[0].stderr);
    }
}
