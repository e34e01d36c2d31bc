//! Discrete power-law fitting with a bootstrap goodness-of-fit test.
//!
//! The exponent is the discrete maximum-likelihood estimate for a given
//! lower cutoff, the cutoff is the one minimising the Kolmogorov–Smirnov
//! distance between data and fit, and the p-value comes from a
//! semi-parametric bootstrap: synthetic samples draw the body from the
//! empirical data below the cutoff and the tail from the fitted law, and
//! each one is refitted from scratch.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// p-values below this mark a distribution significantly different from a
/// power law.
pub const REJECTION_THRESHOLD: f64 = 0.001;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PowerLawError {
    #[error("need at least {needed} samples above the cutoff, got {count}")]
    TooFewSamples { count: usize, needed: usize },
    #[error("samples take a single value; no power law can be fitted")]
    Degenerate,
    #[error("power-law samples must be positive integers")]
    ZeroSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub xmin: u64,
    pub ks_distance: f64,
    pub p_value: f64,
    pub tail_count: usize,
    pub sample_count: usize,
    pub replicates: usize,
}

impl PowerLawFit {
    /// True when the goodness-of-fit test rejects the power-law hypothesis.
    pub fn rejected(&self) -> bool {
        self.p_value < REJECTION_THRESHOLD
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFitter {
    pub replicates: usize,
    /// Smallest tail a cutoff may leave.
    pub min_tail: usize,
    pub seed: u64,
}

impl Default for PowerLawFitter {
    fn default() -> Self {
        Self {
            replicates: 100,
            min_tail: 20,
            seed: 0,
        }
    }
}

/// Fit with default settings (100 bootstrap replicates, seed 0).
pub fn fit_power_law(samples: &[usize]) -> Result<PowerLawFit, PowerLawError> {
    let data: Vec<u64> = samples.iter().map(|&s| s as u64).collect();
    PowerLawFitter::default().fit(&data)
}

impl PowerLawFitter {
    pub fn fit(&self, samples: &[u64]) -> Result<PowerLawFit, PowerLawError> {
        if samples.contains(&0) {
            return Err(PowerLawError::ZeroSample);
        }
        let mut sorted = samples.to_vec();
        sorted.sort_unstable();
        let best = scan_cutoffs(&sorted, self.min_tail)?;

        let tail_start = sorted.partition_point(|&x| x < best.xmin);
        let body = &sorted[..tail_start];
        let tail_fraction = (sorted.len() - tail_start) as f64 / sorted.len() as f64;
        let sampler = DiscretePowerLaw::new(best.exponent, best.xmin);

        let replicate = |r: usize| -> Option<bool> {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(r as u64 + 1);
            let mut synthetic: Vec<u64> = (0..sorted.len())
                .map(|_| {
                    if body.is_empty() || rng.random::<f64>() < tail_fraction {
                        sampler.sample(&mut rng)
                    } else {
                        body[rng.random_range(0..body.len())]
                    }
                })
                .collect();
            synthetic.sort_unstable();
            scan_cutoffs(&synthetic, self.min_tail)
                .ok()
                .map(|fit| fit.ks_distance >= best.ks_distance)
        };
        #[cfg(feature = "parallel")]
        let outcomes: Vec<Option<bool>> = {
            use rayon::prelude::*;
            (0..self.replicates)
                .into_par_iter()
                .map(replicate)
                .collect()
        };
        #[cfg(not(feature = "parallel"))]
        let outcomes: Vec<Option<bool>> = (0..self.replicates).map(replicate).collect();

        let valid = outcomes.iter().flatten().count();
        let exceed = outcomes.iter().flatten().filter(|&&b| b).count();
        Ok(PowerLawFit {
            exponent: best.exponent,
            xmin: best.xmin,
            ks_distance: best.ks_distance,
            p_value: if valid == 0 {
                1.0
            } else {
                exceed as f64 / valid as f64
            },
            tail_count: sorted.len() - tail_start,
            sample_count: sorted.len(),
            replicates: valid,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct CutoffFit {
    xmin: u64,
    exponent: f64,
    ks_distance: f64,
}

/// Fits every admissible cutoff and keeps the one with the smallest KS
/// distance. `sorted` must be ascending.
fn scan_cutoffs(sorted: &[u64], min_tail: usize) -> Result<CutoffFit, PowerLawError> {
    let min_tail = min_tail.max(2);
    if sorted.len() < min_tail {
        return Err(PowerLawError::TooFewSamples {
            count: sorted.len(),
            needed: min_tail,
        });
    }
    if sorted.first() == sorted.last() {
        return Err(PowerLawError::Degenerate);
    }
    // Suffix sums of ln x so each candidate's likelihood is O(1) to set up.
    let mut suffix_log = vec![0.0; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        suffix_log[i] = suffix_log[i + 1] + (sorted[i] as f64).ln();
    }
    let mut best: Option<CutoffFit> = None;
    let mut start = 0;
    while start < sorted.len() {
        let xmin = sorted[start];
        let tail = &sorted[start..];
        if tail.len() < min_tail {
            break;
        }
        // A tail holding a single value has no finite exponent.
        if tail.last() != Some(&xmin) {
            let exponent = mle_exponent(xmin, tail.len(), suffix_log[start]);
            let ks_distance = ks_distance(tail, exponent);
            if best.is_none_or(|b| ks_distance < b.ks_distance) {
                best = Some(CutoffFit {
                    xmin,
                    exponent,
                    ks_distance,
                });
            }
        }
        start += tail.partition_point(|&x| x == xmin);
    }
    best.ok_or(PowerLawError::Degenerate)
}

const ALPHA_MIN: f64 = 1.0 + 1e-6;
const ALPHA_MAX: f64 = 12.0;

/// Maximises `-n ln zeta(a, xmin) - a * sum(ln x)` by golden-section search.
fn mle_exponent(xmin: u64, n: usize, sum_log: f64) -> f64 {
    let q = xmin as f64;
    let n = n as f64;
    let neg_ll = |a: f64| n * hurwitz_zeta(a, q).ln() + a * sum_log;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (ALPHA_MIN, ALPHA_MAX);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (neg_ll(x1), neg_ll(x2));
    while hi - lo > 1e-9 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = neg_ll(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = neg_ll(x2);
        }
    }
    (lo + hi) / 2.0
}

/// Largest gap between the empirical CDF of `tail` and the fitted discrete
/// power law, over every integer at or above the cutoff.
fn ks_distance(tail: &[u64], exponent: f64) -> f64 {
    let xmin = tail[0];
    let norm = hurwitz_zeta(exponent, xmin as f64);
    let n = tail.len() as f64;
    let mut cursor = ZetaCursor::new(exponent, xmin, norm);
    let mut distance: f64 = 0.0;
    let mut seen = 0usize;
    let mut i = 0;
    while i < tail.len() {
        let v = tail[i];
        // Model CDF just below v, compared with the empirical CDF that has
        // been flat since the previous value.
        let below = 1.0 - cursor.advance_to(v) / norm;
        distance = distance.max((seen as f64 / n - below).abs());
        let run = tail[i..].partition_point(|&x| x == v);
        seen += run;
        i += run;
        let at = 1.0 - cursor.advance_to(v + 1) / norm;
        distance = distance.max((seen as f64 / n - at).abs());
    }
    distance
}

/// Walks `zeta(a, x)` upward in `x`, subtracting terms for short steps and
/// re-evaluating for long ones.
struct ZetaCursor {
    exponent: f64,
    x: u64,
    value: f64,
}

impl ZetaCursor {
    fn new(exponent: f64, x: u64, value: f64) -> Self {
        Self { exponent, x, value }
    }

    fn advance_to(&mut self, target: u64) -> f64 {
        if target > self.x + 64 {
            self.value = hurwitz_zeta(self.exponent, target as f64);
            self.x = target;
        }
        while self.x < target {
            self.value -= (self.x as f64).powf(-self.exponent);
            self.x += 1;
        }
        self.value
    }
}

/// Hurwitz zeta `sum_{k>=0} (q + k)^-s` for `s > 1`, `q > 0`, by
/// Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    const DIRECT_TERMS: usize = 12;
    // B_2j / (2j)! for j = 1..=6.
    const COEFFS: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut sum = 0.0;
    for k in 0..DIRECT_TERMS {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + DIRECT_TERMS as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    let mut term = s * a.powf(-s - 1.0);
    for (j, c) in COEFFS.iter().enumerate() {
        sum += c * term;
        let m = 2.0 * (j as f64 + 1.0);
        term *= (s + m - 1.0) * (s + m) / (a * a);
    }
    sum
}

/// Sampler for `P(x) = x^-a / zeta(a, xmin)`, `x >= xmin`.
///
/// Exact inverse-CDF over a table of the first values, continuous
/// approximation beyond it where the discreteness no longer matters.
#[derive(Debug, Clone)]
pub struct DiscretePowerLaw {
    exponent: f64,
    xmin: u64,
    cumulative: Vec<f64>,
}

const TABLE_LEN: usize = 10_000;

impl DiscretePowerLaw {
    pub fn new(exponent: f64, xmin: u64) -> Self {
        let norm = hurwitz_zeta(exponent, xmin as f64);
        let mut acc = 0.0;
        let cumulative = (0..TABLE_LEN)
            .map(|k| {
                acc += ((xmin + k as u64) as f64).powf(-exponent) / norm;
                acc
            })
            .collect();
        Self {
            exponent,
            xmin,
            cumulative,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let covered = *self.cumulative.last().unwrap();
        if u < covered {
            let k = self.cumulative.partition_point(|&c| c <= u);
            return self.xmin + k as u64;
        }
        let start = (self.xmin + TABLE_LEN as u64) as f64;
        let v: f64 = rng.random();
        let x = (start - 0.5) * (1.0 - v).powf(-1.0 / (self.exponent - 1.0)) + 0.5;
        (x.floor() as u64).max(start as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_zeta(s: f64, q: f64) -> f64 {
        // Direct partial sum plus the integral of the remainder.
        let n = 2_000_000;
        let partial: f64 = (0..n).map(|k| (q + k as f64).powf(-s)).sum();
        partial + (q + n as f64 - 0.5).powf(1.0 - s) / (s - 1.0)
    }

    #[test]
    fn hurwitz_matches_direct_summation() {
        assert!((hurwitz_zeta(2.0, 1.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13);
        assert!((hurwitz_zeta(3.0, 1.0) - 1.202_056_903_159_594_3).abs() < 1e-13);
        for &(s, q) in &[(1.5, 3.0), (2.5, 7.0), (1.1, 1.0), (4.0, 40.0)] {
            let expected = brute_zeta(s, q);
            let got = hurwitz_zeta(s, q);
            assert!(((got - expected) / expected).abs() < 1e-8, "s={s} q={q}");
        }
    }

    #[test]
    fn sampler_matches_pmf() {
        let law = DiscretePowerLaw::new(2.5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let hits = (0..n).filter(|_| law.sample(&mut rng) == 3).count();
        let expected = 3f64.powf(-2.5) / hurwitz_zeta(2.5, 3.0);
        assert!((hits as f64 / n as f64 - expected).abs() < 0.005);
    }

    #[test]
    fn recovers_known_exponent() {
        let law = DiscretePowerLaw::new(2.0, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let data: Vec<u64> = (0..10_000).map(|_| law.sample(&mut rng)).collect();
        let fit = PowerLawFitter::default().fit(&data).unwrap();
        assert!((1.9..=2.1).contains(&fit.exponent), "{fit:?}");
        assert!(fit.p_value > 0.05, "{fit:?}");
        assert!(!fit.rejected());
    }

    #[test]
    fn uniform_sizes_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<u64> = (0..2_000).map(|_| rng.random_range(10..=200)).collect();
        let fit = PowerLawFitter::default().fit(&data).unwrap();
        assert!(fit.p_value < REJECTION_THRESHOLD, "{fit:?}");
        assert!(fit.rejected());
    }

    #[test]
    fn constant_and_small_samples_error() {
        assert_eq!(fit_power_law(&[5; 50]), Err(PowerLawError::Degenerate));
        assert!(matches!(
            fit_power_law(&[1, 2, 3]),
            Err(PowerLawError::TooFewSamples { count: 3, .. })
        ));
        assert_eq!(fit_power_law(&[0; 30]), Err(PowerLawError::ZeroSample));
    }

    #[test]
    fn fit_is_deterministic() {
        let law = DiscretePowerLaw::new(2.2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data: Vec<u64> = (0..500).map(|_| law.sample(&mut rng)).collect();
        let f = PowerLawFitter::default();
        assert_eq!(f.fit(&data).unwrap(), f.fit(&data).unwrap());
    }
}
