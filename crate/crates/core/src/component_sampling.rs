//! Size-biased sampling of components with replacement and the first repeat time.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::disorder::{contract, ComponentDecomposition, ContractedGraph};
use crate::error::{invalid, Error, Result};
use crate::seeds::rng_from_seed;

/// Largest `k` the floating-point oracle accepts.
pub const MAX_ORACLE_K: usize = 10_000;
/// Component limit for the exact rational oracle.
pub const MAX_RATIONAL_COMPONENTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatTrace {
    pub component_ids: Vec<u32>,
    /// One-based index of the first draw that repeats an earlier one.
    pub t_1: Option<usize>,
    pub s_n: f64,
}

pub fn size_biased_stream(decomp: &ComponentDecomposition, max_len: usize, seed: u64) -> Result<RepeatTrace> {
    let g = contract(decomp);
    let mut rng = rng_from_seed(seed);
    size_biased_stream_on(&g, max_len, &mut rng)
}

/// Draws the component of a uniform vertex until a component repeats or
/// `max_len` draws have been made.
pub fn size_biased_stream_on<R: Rng + ?Sized>(
    g: &ContractedGraph,
    max_len: usize,
    rng: &mut R,
) -> Result<RepeatTrace> {
    if max_len == 0 {
        return Err(invalid("max_len must be at least 1"));
    }
    let mut seen = HashSet::new();
    let mut ids = Vec::new();
    let mut t_1 = None;
    while ids.len() < max_len {
        let (c, _) = g.step(rng);
        ids.push(c as u32);
        if !seen.insert(c) {
            t_1 = Some(ids.len());
            break;
        }
    }
    Ok(RepeatTrace {
        component_ids: ids,
        t_1,
        s_n: s_from_sizes(g.sizes()),
    })
}

pub fn s_statistic(decomp: &ComponentDecomposition) -> f64 {
    s_from_sizes(decomp.sizes())
}

/// `sqrt(sum sizes^2) / sum sizes`.
pub fn s_from_sizes(sizes: &[usize]) -> f64 {
    let n: usize = sizes.iter().sum();
    let sq: f64 = sizes.iter().map(|&s| (s as f64) * (s as f64)).sum();
    sq.sqrt() / n as f64
}

fn check_sizes(sizes: &[usize]) -> Result<usize> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(invalid("sizes must be non-empty and positive"));
    }
    Ok(sizes.iter().sum())
}

/// `P(t_1 > k)` for i.i.d. draws with probabilities proportional to `sizes`:
/// `k! e_k(p)`, with `g_j = j! e_j` updated as `g_j += j p g_{j-1}` under
/// compensated summation.
pub fn no_repeat_prob_exact(sizes: &[usize], k: i64) -> Result<f64> {
    let n = check_sizes(sizes)?;
    if k < 0 {
        return Err(invalid(format!("k must be non-negative, got {k}")));
    }
    let k = k as usize;
    if k <= 1 {
        return Ok(1.0);
    }
    if k > sizes.len() {
        return Ok(0.0);
    }
    if k > MAX_ORACLE_K {
        return Err(Error::SizeLimit {
            size: k,
            limit: MAX_ORACLE_K,
        });
    }
    let mut g = vec![0.0f64; k + 1];
    let mut comp = vec![0.0f64; k + 1];
    g[0] = 1.0;
    for (i, &s) in sizes.iter().enumerate() {
        let p = s as f64 / n as f64;
        for j in (1..=k.min(i + 1)).rev() {
            // Kahan step for g[j] += j p g[j-1]
            let y = j as f64 * p * g[j - 1] - comp[j];
            let t = g[j] + y;
            comp[j] = (t - g[j]) - y;
            g[j] = t;
        }
    }
    Ok(g[k].clamp(0.0, 1.0))
}

/// The same probability as an exact fraction, for at most
/// [`MAX_RATIONAL_COMPONENTS`] components.
pub fn no_repeat_prob_rational(sizes: &[usize], k: i64) -> Result<BigRational> {
    let n = check_sizes(sizes)?;
    if k < 0 {
        return Err(invalid(format!("k must be non-negative, got {k}")));
    }
    if sizes.len() > MAX_RATIONAL_COMPONENTS {
        return Err(Error::SizeLimit {
            size: sizes.len(),
            limit: MAX_RATIONAL_COMPONENTS,
        });
    }
    let k = k as usize;
    if k > sizes.len() {
        return Ok(BigRational::zero());
    }
    let mut g = vec![BigRational::zero(); k + 1];
    g[0] = BigRational::one();
    let n = BigInt::from(n);
    for (i, &s) in sizes.iter().enumerate() {
        let p = BigRational::new(BigInt::from(s), n.clone());
        for j in (1..=k.min(i + 1)).rev() {
            let add = &g[j - 1] * &p * BigRational::from_integer(BigInt::from(j));
            g[j] += add;
        }
    }
    Ok(g[k].clone())
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// `exp(-r^2 / 2)`.
pub fn repeat_envelope(r: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return Err(invalid(format!("r must be non-negative, got {r}")));
    }
    Ok((-r * r / 2.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::{decompose, DisorderSample};
    use crate::seeds::rng_from_seed;

    fn birthday(days: usize, k: usize) -> f64 {
        (0..k).map(|j| 1.0 - j as f64 / days as f64).product()
    }

    #[test]
    fn s_statistic_values() {
        let s = DisorderSample::from_heavy_edges(9, 1.0, &[]).unwrap();
        assert!((s_statistic(&decompose(&s)) - 1.0 / 3.0).abs() < 1e-15);
        let s = DisorderSample::from_heavy_edges(4, 1.0, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(s_statistic(&decompose(&s)), 1.0);
        assert!((s_from_sizes(&[2, 1, 1]) - 6f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_small_cases() {
        let sizes = [2, 1, 1];
        assert!((no_repeat_prob_exact(&sizes, 2).unwrap() - 0.625).abs() < 1e-15);
        assert_eq!(
            no_repeat_prob_rational(&sizes, 2).unwrap(),
            BigRational::new(5.into(), 8.into())
        );
        assert_eq!(no_repeat_prob_exact(&sizes, 0).unwrap(), 1.0);
        assert_eq!(no_repeat_prob_exact(&sizes, 1).unwrap(), 1.0);
        assert_eq!(no_repeat_prob_exact(&sizes, 4).unwrap(), 0.0);
        assert!(no_repeat_prob_exact(&sizes, -1).is_err());
        assert!(no_repeat_prob_exact(&[], 1).is_err());
        assert!(no_repeat_prob_rational(&[1; 21], 2).is_err());
    }

    #[test]
    fn birthday_fixture() {
        let p = no_repeat_prob_exact(&[1; 365], 23).unwrap();
        assert!((p - birthday(365, 23)).abs() < 1e-13);
        assert!((p - 0.4927).abs() < 1e-4);
    }

    #[test]
    fn float_matches_rational() {
        let sizes = [7, 5, 5, 3, 2, 2, 1, 1, 1, 1, 1, 1];
        for k in 0..=13 {
            let exact = rational_to_f64(&no_repeat_prob_rational(&sizes, k).unwrap());
            let float = no_repeat_prob_exact(&sizes, k).unwrap();
            assert!((exact - float).abs() < 1e-14, "k={k}: {exact} vs {float}");
        }
    }

    #[test]
    fn envelope_values() {
        assert_eq!(repeat_envelope(0.0).unwrap(), 1.0);
        assert!((repeat_envelope(1.0).unwrap() - 0.6065).abs() < 1e-4);
        assert!((repeat_envelope(2.0).unwrap() - 0.1353).abs() < 1e-4);
        assert!(repeat_envelope(-0.1).is_err());
    }

    #[test]
    fn stream_shapes() {
        let g = ContractedGraph::from_sizes(&[6]).unwrap();
        let mut rng = rng_from_seed(2);
        for _ in 0..20 {
            let t = size_biased_stream_on(&g, 100, &mut rng).unwrap();
            assert_eq!(t.t_1, Some(2));
            assert_eq!(t.s_n, 1.0);
        }
        let g = ContractedGraph::from_sizes(&[1; 50]).unwrap();
        let t = size_biased_stream_on(&g, 3, &mut rng).unwrap();
        assert!(t.component_ids.len() <= 3);
        assert!(size_biased_stream_on(&g, 0, &mut rng).is_err());
    }

    #[test]
    fn first_draw_is_size_biased() {
        let g = ContractedGraph::from_sizes(&[2, 1, 1]).unwrap();
        let mut rng = rng_from_seed(3);
        let trials = 40_000;
        let hits = (0..trials)
            .filter(|_| size_biased_stream_on(&g, 1, &mut rng).unwrap().component_ids[0] == 0)
            .count();
        let se = (0.25 / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64 - 0.5).abs() < 3.0 * se);
    }
}
