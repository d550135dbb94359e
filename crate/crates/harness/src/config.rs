//! Flat `key = value` experiment files plus command-line overrides.

use std::path::Path;

use rstre_core::disorder::DEFAULT_DIAMETER_SIZE_CAP;
use rstre_core::experiments::{ExperimentConfig, Mode};
use rstre_core::samplers::default_sampler_name;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::HarnessError;

/// Every key a config file may set. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFields {
    pub mode: Option<String>,
    pub n: Option<usize>,
    pub n_grid: Option<Vec<usize>>,
    pub gamma: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub sampler: Option<String>,
    pub max_steps: Option<usize>,
    pub wilson_budget: Option<u64>,
    pub diameter_size_cap: Option<usize>,
    pub probes_k: Option<Vec<i64>>,
    pub probes_r: Option<Vec<f64>>,
    pub j_max: Option<usize>,
    pub timing: Option<bool>,
}

impl ConfigFields {
    /// Values set in `over` replace those in `self`.
    pub fn overlay(mut self, over: ConfigFields) -> ConfigFields {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            mode,
            gamma,
            trials,
            seed,
            sampler,
            max_steps,
            wilson_budget,
            diameter_size_cap,
            probes_k,
            probes_r,
            j_max,
            timing
        );
        // a grid on one side replaces a single n on the other
        if over.n.is_some() || over.n_grid.is_some() {
            self.n = over.n;
            self.n_grid = over.n_grid;
        }
        self
    }
}

pub fn parse_config_str(text: &str, origin: &str) -> Result<ConfigFields, HarnessError> {
    toml::from_str(text).map_err(|e| HarnessError::Config(format!("{origin}: {}", e.to_string().trim_end())))
}

pub fn read_config_file(path: &Path) -> Result<ConfigFields, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_config_str(&text, &path.display().to_string())
}

fn missing(field: &str) -> HarnessError {
    HarnessError::Config(format!("missing required field '{field}'"))
}

/// Fills documented defaults and validates. `mode_hint` comes from the subcommand.
pub fn build_config(fields: &ConfigFields, mode_hint: Option<Mode>) -> Result<ExperimentConfig, HarnessError> {
    let mode = match (&fields.mode, mode_hint) {
        (Some(m), hint) => {
            let m = Mode::parse(m).map_err(|e| HarnessError::Config(format!("field 'mode': {e}")))?;
            if let Some(h) = hint {
                if h != m {
                    return Err(HarnessError::Config(format!(
                        "field 'mode' is '{}' but the subcommand runs '{}'",
                        m.as_str(),
                        h.as_str()
                    )));
                }
            }
            m
        }
        (None, Some(h)) => h,
        (None, None) => return Err(missing("mode")),
    };
    let n_grid = match (fields.n, &fields.n_grid) {
        (Some(_), Some(_)) => return Err(HarnessError::Config("set either 'n' or 'n_grid', not both".into())),
        (Some(n), None) => vec![n],
        (None, Some(g)) => g.clone(),
        (None, None) => return Err(missing("n_grid")),
    };
    let gamma = fields.gamma.ok_or_else(|| missing("gamma"))?;
    let trials = fields.trials.ok_or_else(|| missing("trials"))?;
    let seed = fields.seed.ok_or_else(|| missing("seed"))?;
    let mut cfg = ExperimentConfig::new(mode, n_grid, gamma, trials, seed);
    cfg.sampler = fields
        .sampler
        .clone()
        .unwrap_or_else(|| default_sampler_name(gamma).to_string());
    cfg.max_steps = fields.max_steps;
    cfg.wilson_budget = fields.wilson_budget;
    cfg.diameter_size_cap = fields.diameter_size_cap.unwrap_or(DEFAULT_DIAMETER_SIZE_CAP);
    if let Some(k) = &fields.probes_k {
        cfg.probes_k = k.clone();
    }
    if let Some(r) = &fields.probes_r {
        cfg.probes_r = r.clone();
    }
    if let Some(j) = fields.j_max {
        cfg.j_max = j;
    }
    cfg.timing = fields.timing.unwrap_or(false);
    cfg.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok(cfg)
}

/// The complete config as fields, with every default written out.
pub fn to_fields(cfg: &ExperimentConfig) -> ConfigFields {
    ConfigFields {
        mode: Some(cfg.mode.as_str().to_string()),
        n: None,
        n_grid: Some(cfg.n_grid.clone()),
        gamma: Some(cfg.gamma),
        trials: Some(cfg.trials_per_n),
        seed: Some(cfg.master_seed),
        sampler: Some(cfg.sampler.clone()),
        max_steps: cfg.max_steps,
        wilson_budget: cfg.wilson_budget,
        diameter_size_cap: Some(cfg.diameter_size_cap),
        probes_k: Some(cfg.probes_k.clone()),
        probes_r: Some(cfg.probes_r.clone()),
        j_max: Some(cfg.j_max),
        timing: Some(cfg.timing),
    }
}

pub fn to_toml(cfg: &ExperimentConfig) -> String {
    toml::to_string(&to_fields(cfg)).expect("flat config serializes")
}

/// Hex SHA-256 of the canonical TOML form.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    Sha256::digest(to_toml(cfg).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> ConfigFields {
        ConfigFields {
            mode: Some("diameter".into()),
            n: Some(4096),
            gamma: Some(5.0),
            trials: Some(10),
            seed: Some(1),
            ..Default::default()
        }
    }

    #[test]
    fn minimal_flags_fill_defaults() {
        let cfg = build_config(&minimal(), None).unwrap();
        assert_eq!(cfg.n_grid, vec![4096]);
        assert_eq!(cfg.sampler, "contracted-assembly");
        assert_eq!(cfg.diameter_size_cap, DEFAULT_DIAMETER_SIZE_CAP);
        assert_eq!(cfg.probes_r, vec![0.5, 1.0]);
        assert!(!cfg.timing);
    }

    #[test]
    fn rejects_bad_grids_and_keys() {
        let mut f = minimal();
        f.n = None;
        f.n_grid = Some(vec![100, 50]);
        let e = build_config(&f, None).unwrap_err().to_string();
        assert!(e.contains("n_grid"), "{e}");
        let e = parse_config_str("gamma = 5\nwidth = 3\n", "test.toml").unwrap_err().to_string();
        assert!(e.contains("width") && e.contains("line 2"), "{e}");
        let e = parse_config_str("gamma = \"five\"\n", "test.toml").unwrap_err().to_string();
        assert!(e.contains("gamma"), "{e}");
        let mut f = minimal();
        f.seed = None;
        assert!(build_config(&f, None).unwrap_err().to_string().contains("'seed'"));
        assert!(build_config(&minimal(), Some(Mode::Repeat)).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config_str("mode = \"repeat\"\nn_grid = [10, 20]\ngamma = 1.0\ntrials = 3\nseed = 9\n", "f").unwrap();
        let flags = ConfigFields {
            n: Some(50),
            seed: Some(4),
            ..Default::default()
        };
        let cfg = build_config(&file.overlay(flags), None).unwrap();
        assert_eq!(cfg.n_grid, vec![50]);
        assert_eq!(cfg.master_seed, 4);
        assert_eq!(cfg.trials_per_n, 3);
    }

    #[test]
    fn round_trip() {
        let mut cfg = build_config(&minimal(), None).unwrap();
        cfg.probes_r = vec![0.25, 1.5];
        cfg.wilson_budget = Some(77);
        let text = to_toml(&cfg);
        let back = build_config(&parse_config_str(&text, "rt").unwrap(), None).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(config_hash(&back), config_hash(&cfg));
    }
}
