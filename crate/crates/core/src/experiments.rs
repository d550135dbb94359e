//! Monte Carlo sweeps over `n` and the disorder exponent, and log-log fits.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::component_sampling::{no_repeat_prob_exact, s_statistic, size_biased_stream_on};
use crate::contracted::assemble_lower_bound_path;
use crate::disorder::{
    contract, decompose_with, sample_disorder, ComponentDecomposition, DecomposeOptions, DEFAULT_DIAMETER_SIZE_CAP,
};
use crate::error::{invalid, Error, Result};
use crate::samplers::{default_sampler_name, SamplerLimits, SamplerRegistry};
use crate::seeds::{rng_from_seed, SeedStream};
use crate::tree::tree_diameter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Diameter,
    Repeat,
    ComponentStats,
    OracleVerify,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Diameter => "diameter",
            Mode::Repeat => "repeat",
            Mode::ComponentStats => "component-stats",
            Mode::OracleVerify => "oracle-verify",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "diameter" => Ok(Mode::Diameter),
            "repeat" => Ok(Mode::Repeat),
            "component-stats" => Ok(Mode::ComponentStats),
            "oracle-verify" => Ok(Mode::OracleVerify),
            other => Err(invalid(format!(
                "unknown mode '{other}' (expected diameter, repeat, component-stats or oracle-verify)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n_grid: Vec<usize>,
    pub gamma: f64,
    pub trials_per_n: u64,
    pub master_seed: u64,
    pub sampler: String,
    /// Contracted walk step cap; `None` means `50 n ceil(ln(n+1))`.
    pub max_steps: Option<usize>,
    /// Total step cap for Wilson's algorithm.
    pub wilson_budget: Option<u64>,
    /// Cyclic components above this size get a lower-bound diameter.
    pub diameter_size_cap: usize,
    /// `k` values at which repeat sweeps record `P(t_1 > k)`.
    pub probes_k: Vec<i64>,
    /// `r` values at which repeat sweeps record `P(t_1 > ceil(r / s_n))`.
    pub probes_r: Vec<f64>,
    /// Largest `j` tabulated by component-stats runs.
    pub j_max: usize,
    /// Record wall-clock time per trial; off by default so outputs stay reproducible.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, n_grid: Vec<usize>, gamma: f64, trials_per_n: u64, master_seed: u64) -> Self {
        Self {
            mode,
            n_grid,
            gamma,
            trials_per_n,
            master_seed,
            sampler: default_sampler_name(gamma).to_string(),
            max_steps: None,
            wilson_budget: None,
            diameter_size_cap: DEFAULT_DIAMETER_SIZE_CAP,
            probes_k: vec![1, 2, 5, 10],
            probes_r: vec![0.5, 1.0],
            j_max: 10,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(invalid("n_grid must not be empty"));
        }
        if self.n_grid[0] == 0 {
            return Err(invalid("n_grid entries must be at least 1"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n_grid must be strictly increasing"));
        }
        if self.trials_per_n == 0 {
            return Err(invalid("trials_per_n must be at least 1"));
        }
        if !self.gamma.is_finite() {
            return Err(invalid("gamma must be finite"));
        }
        SamplerRegistry::with_builtin().get(&self.sampler)?;
        if self.probes_k.iter().any(|&k| k < 0) {
            return Err(invalid("probes_k must be non-negative"));
        }
        if self.probes_r.iter().any(|&r| r.is_nan() || r < 0.0) {
            return Err(invalid("probes_r must be non-negative"));
        }
        Ok(())
    }

    fn limits(&self) -> SamplerLimits {
        SamplerLimits {
            max_steps: self.max_steps,
            wilson_budget: self.wilson_budget,
        }
    }
}

/// One trial. Fields a mode does not measure stay `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub n: usize,
    pub gamma: f64,
    pub trial: u64,
    /// Seed that replays this trial alone.
    pub seed: u64,
    pub diameter: Option<u64>,
    pub c1_size: Option<u64>,
    pub max_excess: Option<i64>,
    pub max_comp_diam: Option<u64>,
    /// Entry-to-exit distance sum before the first repeat of the contracted walk.
    pub lower_bound: Option<u64>,
    pub t_1: Option<u64>,
    pub s_n: Option<f64>,
    pub elapsed_ms: Option<f64>,
    pub partial_cover: bool,
    pub capped: bool,
    /// `P(t_1 > k)` per configured `k`.
    pub tail_k: Vec<f64>,
    /// `P(t_1 > ceil(r / s_n))` per configured `r`.
    pub tail_r: Vec<f64>,
}

impl ResultRecord {
    fn empty(n: usize, gamma: f64, trial: u64, seed: u64) -> Self {
        Self {
            n,
            gamma,
            trial,
            seed,
            diameter: None,
            c1_size: None,
            max_excess: None,
            max_comp_diam: None,
            lower_bound: None,
            t_1: None,
            s_n: None,
            elapsed_ms: None,
            partial_cover: false,
            capped: false,
            tail_k: Vec::new(),
            tail_r: Vec::new(),
        }
    }

    pub fn flagged(&self) -> bool {
        self.partial_cover || self.capped
    }

    /// Numeric field by name, for fits and summaries.
    pub fn field(&self, name: &str) -> Result<Option<f64>> {
        Ok(match name {
            "n" => Some(self.n as f64),
            "gamma" => Some(self.gamma),
            "trial" => Some(self.trial as f64),
            "diameter" => self.diameter.map(|v| v as f64),
            "c1_size" => self.c1_size.map(|v| v as f64),
            "max_excess" => self.max_excess.map(|v| v as f64),
            "max_comp_diam" => self.max_comp_diam.map(|v| v as f64),
            "lower_bound" => self.lower_bound.map(|v| v as f64),
            "t_1" => self.t_1.map(|v| v as f64),
            "s_n" => self.s_n,
            "elapsed_ms" => self.elapsed_ms,
            other => return Err(invalid(format!("unknown numeric field '{other}'"))),
        })
    }
}

fn trial_seeds(cfg: &ExperimentConfig, label: &str) -> Vec<(usize, u64, u64)> {
    let stream = SeedStream::new(cfg.master_seed);
    cfg.n_grid
        .iter()
        .flat_map(|&n| {
            let sub = stream.substream(label, n as u64);
            (0..cfg.trials_per_n).map(move |t| (n, t, sub.child("trial", t)))
        })
        .collect()
}

fn fill_components(rec: &mut ResultRecord, decomp: &ComponentDecomposition) {
    rec.c1_size = Some(decomp.largest_size() as u64);
    rec.max_excess = Some(decomp.max_excess());
    rec.max_comp_diam = Some(decomp.max_diameter() as u64);
}

/// One diameter trial from its own seed.
pub fn run_diameter_trial(cfg: &ExperimentConfig, n: usize, trial: u64, seed: u64) -> Result<ResultRecord> {
    let registry = SamplerRegistry::with_builtin();
    let sampler = registry.get(&cfg.sampler)?;
    let started = Instant::now();
    let stream = SeedStream::new(seed);
    let disorder = sample_disorder(n, cfg.gamma, stream.child("disorder", 0))?;
    let decomp = decompose_with(
        &disorder,
        DecomposeOptions {
            diameter_size_cap: cfg.diameter_size_cap,
        },
    );
    let mut rec = ResultRecord::empty(n, cfg.gamma, trial, seed);
    fill_components(&mut rec, &decomp);
    let mut rng = rng_from_seed(stream.child("tree", 0));
    match sampler.sample(&disorder, &decomp, &mut rng, cfg.limits()) {
        Ok(out) => {
            rec.diameter = Some(tree_diameter(&out.tree) as u64);
            if let Some(walk) = &out.walk {
                rec.lower_bound = assemble_lower_bound_path(&walk.trace, &disorder, &decomp).ok();
            }
        }
        Err(Error::PartialCover { .. }) => rec.partial_cover = true,
        Err(Error::StepBudgetExceeded { .. }) => rec.capped = true,
        Err(e) => return Err(e),
    }
    if cfg.timing {
        rec.elapsed_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(rec)
}

pub fn run_diameter_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    trial_seeds(cfg, "diameter")
        .into_par_iter()
        .map(|(n, t, seed)| run_diameter_trial(cfg, n, t, seed))
        .collect()
}

/// Builds the decomposition a repeat trial works on, from `(n, seed)`.
pub type DecompositionSource<'a> = dyn Fn(usize, u64) -> Result<ComponentDecomposition> + Sync + 'a;

pub fn run_repeat_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    let gamma = cfg.gamma;
    let cap = cfg.diameter_size_cap;
    run_repeat_sweep_with(cfg, &move |n, seed| {
        let d = sample_disorder(n, gamma, seed)?;
        Ok(decompose_with(&d, DecomposeOptions { diameter_size_cap: cap }))
    })
}

/// Repeat sweep over decompositions produced by `source`, so fixed
/// decompositions can stand in for sampled ones.
pub fn run_repeat_sweep_with(cfg: &ExperimentConfig, source: &DecompositionSource<'_>) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    trial_seeds(cfg, "repeat")
        .into_par_iter()
        .map(|(n, t, seed)| {
            let started = Instant::now();
            let stream = SeedStream::new(seed);
            let decomp = source(n, stream.child("disorder", 0))?;
            let mut rec = ResultRecord::empty(n, cfg.gamma, t, seed);
            fill_components(&mut rec, &decomp);
            let g = contract(&decomp);
            let mut rng = rng_from_seed(stream.child("stream", 0));
            let trace = size_biased_stream_on(&g, g.len() + 1, &mut rng)?;
            rec.t_1 = trace.t_1.map(|v| v as u64);
            let s_n = s_statistic(&decomp);
            rec.s_n = Some(s_n);
            let sizes = decomp.sizes();
            rec.tail_k = cfg
                .probes_k
                .iter()
                .map(|&k| no_repeat_prob_exact(sizes, k))
                .collect::<Result<_>>()?;
            rec.tail_r = cfg
                .probes_r
                .iter()
                .map(|&r| no_repeat_prob_exact(sizes, (r / s_n).ceil() as i64))
                .collect::<Result<_>>()?;
            if cfg.timing {
                rec.elapsed_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            }
            Ok(rec)
        })
        .collect()
}

/// Diameter sweeps at several exponents; descriptive only.
pub fn gamma_sweep(base: &ExperimentConfig, gammas: &[f64]) -> Result<Vec<ResultRecord>> {
    let mut out = Vec::new();
    for &gamma in gammas {
        let mut cfg = base.clone();
        cfg.gamma = gamma;
        out.extend(run_diameter_sweep(&cfg)?);
    }
    Ok(out)
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    })
}

/// Empirical quantile by linear interpolation between order statistics.
pub fn quantile(values: &mut [f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let pos = q * (values.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    Some(values[lo] + (values[hi] - values[lo]) * (pos - lo as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub n: usize,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
}

/// Per-`n` mean and median of `field` over unflagged records that carry it.
pub fn summarize_by_n(records: &[ResultRecord], field: &str) -> Result<Vec<GroupSummary>> {
    let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut out = Vec::new();
    for n in ns {
        let mut vals = Vec::new();
        for r in records.iter().filter(|r| r.n == n && !r.flagged()) {
            if let Some(v) = r.field(field)? {
                vals.push(v);
            }
        }
        if vals.is_empty() {
            continue;
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        out.push(GroupSummary {
            n,
            count: vals.len(),
            mean,
            median: median(&mut vals).expect("non-empty"),
        });
    }
    Ok(out)
}

/// Largest over smallest of `median(field) / scale(n)` across the grid.
pub fn median_ratio_spread(records: &[ResultRecord], field: &str, scale: impl Fn(f64) -> f64) -> Result<(f64, Vec<f64>)> {
    let ratios: Vec<f64> = summarize_by_n(records, field)?
        .iter()
        .map(|g| g.median / scale(g.n as f64))
        .collect();
    if ratios.is_empty() {
        return Err(invalid(format!("no usable '{field}' values")));
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    Ok((max / min, ratios))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; NaN with fewer than three points.
    pub stderr: f64,
    pub points: usize,
}

/// Least squares of `ln y` on `ln x`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<ExponentFit> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 2 {
        return Err(invalid("need at least two distinct x values"));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(invalid("log-log fit needs positive values"));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = points.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if points.len() > 2 {
        let rss: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (k - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(ExponentFit {
        slope,
        intercept,
        stderr,
        points: points.len(),
    })
}

/// Fits `ln mean(y)` against `ln x`, one point per distinct `x`, skipping
/// flagged records.
pub fn estimate_exponent(records: &[ResultRecord], x_field: &str, y_field: &str) -> Result<ExponentFit> {
    let mut groups: Vec<(f64, f64, usize)> = Vec::new();
    for r in records.iter().filter(|r| !r.flagged()) {
        let (Some(x), Some(y)) = (r.field(x_field)?, r.field(y_field)?) else {
            continue;
        };
        match groups.iter_mut().find(|g| g.0 == x) {
            Some(g) => {
                g.1 += y;
                g.2 += 1;
            }
            None => groups.push((x, y, 1)),
        }
    }
    let points: Vec<(f64, f64)> = groups.iter().map(|g| (g.0, g.1 / g.2 as f64)).collect();
    fit_loglog(&points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerComparison {
    pub n: usize,
    pub gamma: f64,
    /// Diameters from each sampler on the same disorders; `None` when a run hit its cap.
    pub wilson: Vec<Option<u64>>,
    pub assembled: Vec<Option<u64>>,
}

impl SamplerComparison {
    fn completed(v: &[Option<u64>]) -> Vec<f64> {
        v.iter().flatten().map(|&d| d as f64).collect()
    }

    pub fn wilson_completed(&self) -> usize {
        self.wilson.iter().flatten().count()
    }

    /// `|median_wilson - median_assembled| / median_assembled` over completed runs.
    pub fn median_gap(&self) -> Option<f64> {
        let a = median(&mut Self::completed(&self.assembled))?;
        let w = median(&mut Self::completed(&self.wilson))?;
        Some((w - a).abs() / a)
    }
}

/// Runs both samplers on the same disorder each trial. Wilson gets
/// `wilson_budget` walk steps per tree.
pub fn compare_samplers(n: usize, gamma: f64, trials: u64, seed: u64, wilson_budget: Option<u64>) -> Result<SamplerComparison> {
    let registry = SamplerRegistry::with_builtin();
    let stream = SeedStream::new(seed);
    let rows: Vec<(Option<u64>, Option<u64>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sub = stream.substream("compare", t);
            let disorder = sample_disorder(n, gamma, sub.child("disorder", 0))?;
            let decomp = decompose_with(&disorder, DecomposeOptions::default());
            let run = |name: &str, label: &str| -> Result<Option<u64>> {
                let mut rng = rng_from_seed(sub.child(label, 0));
                let limits = SamplerLimits {
                    max_steps: None,
                    wilson_budget,
                };
                match registry.get(name)?.sample(&disorder, &decomp, &mut rng, limits) {
                    Ok(out) => Ok(Some(tree_diameter(&out.tree) as u64)),
                    Err(Error::StepBudgetExceeded { .. }) | Err(Error::PartialCover { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            };
            Ok((run("wilson", "wilson")?, run("contracted-assembly", "assembly")?))
        })
        .collect::<Result<_>>()?;
    Ok(SamplerComparison {
        n,
        gamma,
        wilson: rows.iter().map(|r| r.0).collect(),
        assembled: rows.iter().map(|r| r.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::{decompose, DisorderSample};

    #[test]
    fn config_validation() {
        let cfg = ExperimentConfig::new(Mode::Diameter, vec![64, 128], 5.0, 3, 1);
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.sampler, "contracted-assembly");
        let mut bad = cfg.clone();
        bad.n_grid = vec![128, 64];
        assert!(bad.validate().unwrap_err().to_string().contains("n_grid"));
        let mut bad = cfg.clone();
        bad.trials_per_n = 0;
        assert!(bad.validate().is_err());
        let mut bad = cfg;
        bad.sampler = "prim".into();
        assert!(bad.validate().is_err());
        assert_eq!(Mode::parse("component-stats").unwrap(), Mode::ComponentStats);
        assert!(Mode::parse("x").is_err());
    }

    #[test]
    fn diameter_sweep_shape_and_determinism() {
        let cfg = ExperimentConfig::new(Mode::Diameter, vec![50, 100, 200], 5.0, 4, 9);
        let a = run_diameter_sweep(&cfg).unwrap();
        assert_eq!(a.len(), 12);
        for (i, r) in a.iter().enumerate() {
            assert_eq!(r.n, cfg.n_grid[i / 4]);
            assert_eq!(r.trial, (i % 4) as u64);
            assert!(r.diameter.unwrap() < r.n as u64);
            assert!(r.diameter.unwrap() >= r.lower_bound.unwrap());
            assert!(r.elapsed_ms.is_none());
        }
        assert_eq!(a, run_diameter_sweep(&cfg).unwrap());
        let replay = run_diameter_trial(&cfg, a[5].n, a[5].trial, a[5].seed).unwrap();
        assert_eq!(replay, a[5]);
    }

    #[test]
    fn budget_flags_records() {
        let mut cfg = ExperimentConfig::new(Mode::Diameter, vec![40], 5.0, 3, 2);
        cfg.sampler = "wilson".into();
        cfg.wilson_budget = Some(1000);
        let recs = run_diameter_sweep(&cfg).unwrap();
        assert!(recs.iter().all(|r| r.capped && r.diameter.is_none()));
        assert!(estimate_exponent(&recs, "n", "diameter").is_err());
    }

    #[test]
    fn repeat_fixtures() {
        let mut cfg = ExperimentConfig::new(Mode::Repeat, vec![30], 5.0, 20, 3);
        cfg.probes_k = vec![23];
        let one = |n: usize, _| {
            let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (v - 1, v)).collect();
            Ok(decompose(&DisorderSample::from_heavy_edges(n, 5.0, &edges)?))
        };
        let recs = run_repeat_sweep_with(&cfg, &one).unwrap();
        assert!(recs.iter().all(|r| r.t_1 == Some(2)));

        cfg.n_grid = vec![365];
        let singles = |n: usize, _| Ok(decompose(&DisorderSample::from_heavy_edges(n, 5.0, &[])?));
        let recs = run_repeat_sweep_with(&cfg, &singles).unwrap();
        let mean = recs.iter().map(|r| r.tail_k[0]).sum::<f64>() / recs.len() as f64;
        assert!((mean - 0.4927).abs() < 1e-4);
    }

    #[test]
    fn repeat_sweep_fills_fields() {
        let cfg = ExperimentConfig::new(Mode::Repeat, vec![500, 1000], 5.0, 5, 4);
        let recs = run_repeat_sweep(&cfg).unwrap();
        for r in &recs {
            assert!(r.t_1.unwrap() >= 2);
            assert_eq!(r.tail_k.len(), 4);
            assert_eq!(r.tail_r.len(), 2);
            assert!(r.diameter.is_none());
        }
    }

    #[test]
    fn exponent_examples() {
        let sqrt: Vec<(f64, f64)> = (10..16).map(|k| (2f64.powi(k), 2f64.powi(k).sqrt())).collect();
        assert!((fit_loglog(&sqrt).unwrap().slope - 0.5).abs() < 1e-9);
        let cube: Vec<(f64, f64)> = (1..9).map(|k| (k as f64 * 100.0, 7.0 * (k as f64 * 100.0).cbrt())).collect();
        assert!((fit_loglog(&cube).unwrap().slope - 1.0 / 3.0).abs() < 1e-9);
        let logged: Vec<(f64, f64)> = (12..=18)
            .map(|k| {
                let x = 2f64.powi(k);
                (x, x.cbrt() * x.ln())
            })
            .collect();
        let s = fit_loglog(&logged).unwrap().slope;
        assert!(s > 0.33 && s < 0.45, "{s}");
        assert!(fit_loglog(&[(4.0, 2.0), (4.0, 3.0)]).is_err());
        assert!(fit_loglog(&[(4.0, 2.0), (8.0, 3.0)]).unwrap().stderr.is_nan());
    }

    #[test]
    fn quantiles() {
        let mut v = vec![3.0, 1.0, 2.0, 4.0];
        assert_eq!(median(&mut v), Some(2.5));
        assert_eq!(quantile(&mut v, 0.0), Some(1.0));
        assert_eq!(quantile(&mut v, 1.0), Some(4.0));
        assert_eq!(median(&mut []), None);
    }

    #[test]
    fn sampler_comparison_tiny() {
        let c = compare_samplers(8, 5.0, 10, 1, Some(50_000_000)).unwrap();
        assert_eq!(c.wilson.len(), 10);
        assert!(c.assembled.iter().all(|d| d.is_some()));
    }
}
