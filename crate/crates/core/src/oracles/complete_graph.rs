//! Distance law between two fixed vertices in a uniform spanning tree of `K_m`.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::seeds::rng_from_seed;

/// `P(d(u, v) >= len) = prod_{k=1}^{len-1} (m - k - 1) / m`.
pub fn km_distance_tail(m: usize, len: usize) -> Result<f64> {
    if m < 2 {
        return Err(invalid(format!("need m >= 2, got {m}")));
    }
    if len > m - 1 {
        return Ok(0.0);
    }
    Ok((1..len).map(|k| (m - k - 1) as f64 / m as f64).product())
}

/// `E[d(u, v)] = sum_{len >= 1} P(d >= len)`.
pub fn km_expected_distance(m: usize) -> Result<f64> {
    let mut total = 0.0;
    for len in 1..m {
        total += km_distance_tail(m, len)?;
    }
    Ok(total)
}

pub fn laplacian_walk_sample(m: usize, seed: u64) -> Result<usize> {
    let mut rng = rng_from_seed(seed);
    laplacian_walk_sample_with_rng(m, &mut rng)
}

/// Path length of the walk from `u` that, after `k` steps, continues away
/// from `v` with probability `(m - k - 1) / m` and otherwise steps onto `v`.
pub fn laplacian_walk_sample_with_rng<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<usize> {
    if m < 2 {
        return Err(invalid(format!("need m >= 2, got {m}")));
    }
    let mut len = 1;
    while len < m - 1 && rng.random_range(0..m) < m - len - 1 {
        len += 1;
    }
    Ok(len)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_values() {
        assert!((km_distance_tail(3, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(km_distance_tail(4, 3).unwrap(), 0.125);
        assert_eq!(km_distance_tail(9, 1).unwrap(), 1.0);
        assert_eq!(km_distance_tail(5, 5).unwrap(), 0.0);
        assert!(km_distance_tail(1, 1).is_err());
    }

    #[test]
    fn tail_is_a_distribution() {
        for m in 2..30 {
            let mut mass = 0.0;
            for len in 1..m {
                let (a, b) = (km_distance_tail(m, len).unwrap(), km_distance_tail(m, len + 1).unwrap());
                assert!(b <= a);
                mass += a - b;
            }
            assert!((mass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn walk_samples() {
        let mut rng = rng_from_seed(4);
        for _ in 0..100 {
            assert_eq!(laplacian_walk_sample_with_rng(2, &mut rng).unwrap(), 1);
            let l = laplacian_walk_sample_with_rng(6, &mut rng).unwrap();
            assert!((1..=5).contains(&l));
        }
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| laplacian_walk_sample_with_rng(3, &mut rng).unwrap() >= 2)
            .count();
        let se = (1.0 / 3.0 * 2.0 / 3.0 / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64 - 1.0 / 3.0).abs() < 3.0 * se);
    }
}
