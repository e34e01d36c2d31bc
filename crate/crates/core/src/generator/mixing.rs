//! Per-node mixing coefficients and the internal degrees they imply.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// How per-node mixing targets are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MixingMode {
    /// Every node gets the same `mu` (classic LFR).
    Constant { mu: f64 },
    /// A uniformly chosen half of the nodes get `mu = 0`; the others draw
    /// from a normal distribution truncated to `[0, 1]` by resampling.
    Bimodal { mean: f64, sd: f64 },
}

impl MixingMode {
    pub const DEFAULT_BIMODAL_MEAN: f64 = 0.5;
    pub const DEFAULT_BIMODAL_SD: f64 = 0.2;

    pub fn bimodal() -> Self {
        MixingMode::Bimodal {
            mean: Self::DEFAULT_BIMODAL_MEAN,
            sd: Self::DEFAULT_BIMODAL_SD,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        match *self {
            MixingMode::Constant { mu } if !(0.0..=1.0).contains(&mu) => {
                Err(format!("constant mixing {mu} outside [0, 1]"))
            }
            MixingMode::Bimodal { mean, sd } if !(0.0..=1.0).contains(&mean) || !(sd > 0.0) => Err(
                format!("bimodal mixing needs mean in [0, 1] and sd > 0, got {mean}, {sd}"),
            ),
            _ => Ok(()),
        }
    }
}

pub fn sample_mixing_coefficients<R: Rng + ?Sized>(
    n: usize,
    mode: MixingMode,
    rng: &mut R,
) -> Vec<f64> {
    match mode {
        MixingMode::Constant { mu } => vec![mu; n],
        MixingMode::Bimodal { mean, sd } => {
            let normal = Normal::new(mean, sd).expect("validated parameters");
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut mu = vec![0.0; n];
            let mut drawn: Vec<usize> = order[n / 2..].to_vec();
            drawn.sort_unstable();
            for v in drawn {
                mu[v] = loop {
                    let x = normal.sample(rng);
                    if (0.0..=1.0).contains(&x) {
                        break x;
                    }
                };
            }
            mu
        }
    }
}

/// `round((1 - mu) k)` clamped to `[0, k]`.
pub fn internal_degree_targets(degrees: &[usize], mixing: &[f64]) -> Vec<usize> {
    degrees
        .iter()
        .zip(mixing)
        .map(|(&k, &mu)| (((1.0 - mu) * k as f64).round().max(0.0) as usize).min(k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            sample_mixing_coefficients(4, MixingMode::Constant { mu: 0.2 }, &mut rng),
            vec![0.2; 4]
        );
    }

    #[test]
    fn bimodal_has_exactly_half_zeros() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mu = sample_mixing_coefficients(1000, MixingMode::bimodal(), &mut rng);
        assert_eq!(mu.iter().filter(|&&m| m == 0.0).count(), 500);
        assert!(mu.iter().all(|m| (0.0..=1.0).contains(m)));
        let drawn: Vec<f64> = mu.into_iter().filter(|&m| m > 0.0).collect();
        let mean = drawn.iter().sum::<f64>() / drawn.len() as f64;
        assert!((mean - 0.5).abs() < 0.03, "{mean}");
    }

    #[test]
    fn quantisation() {
        assert_eq!(
            internal_degree_targets(&[2, 2, 1, 10], &[0.5, 0.0, 0.6, 0.25]),
            vec![1, 2, 0, 8]
        );
        assert_eq!(internal_degree_targets(&[1], &[0.4]), vec![1]);
    }

    #[test]
    fn invalid_modes() {
        assert!(MixingMode::Constant { mu: 1.5 }.validate().is_err());
        assert!(MixingMode::Bimodal { mean: 0.5, sd: 0.0 }
            .validate()
            .is_err());
        assert!(MixingMode::bimodal().validate().is_ok());
    }
}
