use std::collections::BTreeMap;

use crate::contracted::{assemble_contracted_tree, default_max_steps, ContractedWalk};
use crate::disorder::{ComponentDecomposition, DisorderSample};
use crate::error::{invalid, Result};
use crate::seeds::SimRng;
use crate::tree::WeightedTree;
use crate::wilson::wilson_ust_with_rng;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SamplerLimits {
    /// Step cap for the contracted walk; `None` uses [`default_max_steps`].
    pub max_steps: Option<usize>,
    /// Total walk-step cap for Wilson's algorithm.
    pub wilson_budget: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct SampledTree {
    pub tree: WeightedTree,
    /// The contracted walk, for samplers that use one.
    pub walk: Option<ContractedWalk>,
}

pub trait TreeSampler: Send + Sync {
    fn name(&self) -> &'static str;

    fn sample(
        &self,
        disorder: &DisorderSample,
        decomp: &ComponentDecomposition,
        rng: &mut SimRng,
        limits: SamplerLimits,
    ) -> Result<SampledTree>;
}

/// Exact weighted UST of the whole complete graph.
pub struct WilsonSampler;

impl TreeSampler for WilsonSampler {
    fn name(&self) -> &'static str {
        "wilson"
    }

    fn sample(
        &self,
        disorder: &DisorderSample,
        _decomp: &ComponentDecomposition,
        rng: &mut SimRng,
        limits: SamplerLimits,
    ) -> Result<SampledTree> {
        let tree = wilson_ust_with_rng(disorder, rng, limits.wilson_budget)?;
        Ok(SampledTree { tree, walk: None })
    }
}

/// Uniform trees inside components joined along a contracted Aldous–Broder walk.
pub struct ContractedAssemblySampler;

impl TreeSampler for ContractedAssemblySampler {
    fn name(&self) -> &'static str {
        "contracted-assembly"
    }

    fn sample(
        &self,
        disorder: &DisorderSample,
        decomp: &ComponentDecomposition,
        rng: &mut SimRng,
        limits: SamplerLimits,
    ) -> Result<SampledTree> {
        let max_steps = limits.max_steps.unwrap_or_else(|| default_max_steps(disorder.n()));
        let assembled = assemble_contracted_tree(disorder, decomp, rng, max_steps)?;
        Ok(SampledTree {
            tree: assembled.tree,
            walk: Some(assembled.walk),
        })
    }
}

#[derive(Default)]
pub struct SamplerRegistry {
    samplers: BTreeMap<&'static str, Box<dyn TreeSampler>>,
}

impl SamplerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_builtin() -> Self {
        let mut r = Self::new();
        r.register(Box::new(WilsonSampler));
        r.register(Box::new(ContractedAssemblySampler));
        r
    }

    /// Adds a sampler, replacing any earlier one with the same name.
    pub fn register(&mut self, sampler: Box<dyn TreeSampler>) {
        self.samplers.insert(sampler.name(), sampler);
    }

    pub fn get(&self, name: &str) -> Result<&dyn TreeSampler> {
        self.samplers.get(name).map(|s| s.as_ref()).ok_or_else(|| {
            invalid(format!(
                "unknown sampler '{name}' (known: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.samplers.keys().copied().collect()
    }
}

/// Contraction for `gamma >= 5`, where heavy components are effectively
/// glued; Wilson's algorithm otherwise.
pub fn default_sampler_name(gamma: f64) -> &'static str {
    if gamma >= 5.0 {
        "contracted-assembly"
    } else {
        "wilson"
    }
}
