//! Truncated discrete power-law degree sequences.

use rand::Rng;

use super::GeneratorError;

/// Discrete power law `P(k) ∝ k^-γ` on `[k_min, k_max]` with a fractional
/// weight on `k_min`.
///
/// The lower end is a real-valued cutoff `c`: degree `floor(c)` keeps a
/// `1 - frac(c)` share of its weight. The expectation is then continuous
/// and increasing in `c`, so a bisection can hit any target average degree
/// between the `c = 1` mean and `k_max`.
#[derive(Debug, Clone)]
pub struct DegreeLaw {
    pub gamma: f64,
    pub min_degree: usize,
    pub max_degree: usize,
    pub min_weight: f64,
}

impl DegreeLaw {
    fn with_cutoff(gamma: f64, max_degree: usize, cutoff: f64) -> Self {
        let floor = cutoff.floor().max(1.0) as usize;
        let floor = floor.min(max_degree);
        Self {
            gamma,
            min_degree: floor,
            max_degree,
            min_weight: if floor == max_degree {
                1.0
            } else {
                1.0 - (cutoff - floor as f64)
            },
        }
    }

    fn weight(&self, k: usize) -> f64 {
        let w = (k as f64).powf(-self.gamma);
        if k == self.min_degree {
            w * self.min_weight
        } else {
            w
        }
    }

    pub fn expectation(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for k in self.min_degree..=self.max_degree {
            let w = self.weight(k);
            num += k as f64 * w;
            den += w;
        }
        num / den
    }

    /// Finds the cutoff whose expectation equals `avg_degree`.
    pub fn fit(gamma: f64, avg_degree: f64, max_degree: usize) -> Result<Self, GeneratorError> {
        let lowest = Self::with_cutoff(gamma, max_degree, 1.0);
        if avg_degree > max_degree as f64 || avg_degree < lowest.expectation() {
            return Err(GeneratorError::NoFeasibleMinDegree {
                avg_degree,
                max_degree,
            });
        }
        let (mut lo, mut hi) = (1.0, max_degree as f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if Self::with_cutoff(gamma, max_degree, mid).expectation() < avg_degree {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Self::with_cutoff(gamma, max_degree, hi))
    }

    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<usize> {
        let mut cumulative = Vec::with_capacity(self.max_degree - self.min_degree + 1);
        let mut acc = 0.0;
        for k in self.min_degree..=self.max_degree {
            acc += self.weight(k);
            cumulative.push(acc);
        }
        (0..count)
            .map(|_| {
                let u = rng.random::<f64>() * acc;
                let idx = cumulative.partition_point(|&c| c <= u);
                self.min_degree + idx.min(cumulative.len() - 1)
            })
            .collect()
    }
}

/// Draws `n` degrees whose law has mean `avg_degree`, then bumps one degree
/// by one if needed so the sum is even.
pub fn sample_powerlaw_degrees<R: Rng + ?Sized>(
    n: usize,
    avg_degree: f64,
    max_degree: usize,
    gamma: f64,
    rng: &mut R,
) -> Result<Vec<usize>, GeneratorError> {
    let law = DegreeLaw::fit(gamma, avg_degree, max_degree)?;
    let mut degrees = law.sample(n, rng);
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let start = rng.random_range(0..n);
        let below_max = (0..n)
            .map(|i| (start + i) % n)
            .find(|&i| degrees[i] < max_degree);
        match below_max {
            Some(i) => degrees[i] += 1,
            None => degrees[start] -= 1,
        }
    }
    Ok(degrees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn expectation_is_continuous_in_the_cutoff() {
        let a = DegreeLaw::with_cutoff(3.0, 100, 4.999_999).expectation();
        let b = DegreeLaw::with_cutoff(3.0, 100, 5.0).expectation();
        assert!((a - b).abs() < 1e-4);
    }

    #[test]
    fn fitted_law_hits_target_mean() {
        let law = DegreeLaw::fit(3.0, 11.0, 2850).unwrap();
        assert!((law.expectation() - 11.0).abs() < 1e-9);
    }

    #[test]
    fn table_one_degree_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = sample_powerlaw_degrees(25_000, 11.0, 2850, 3.0, &mut rng).unwrap();
        let mean = d.iter().sum::<usize>() as f64 / d.len() as f64;
        assert!((10.45..=11.55).contains(&mean), "{mean}");
        assert!(d.iter().all(|&k| k <= 2850));
        assert_eq!(d.iter().sum::<usize>() % 2, 0);

        let d = sample_powerlaw_degrees(7_500, 10.0, 180, 3.0, &mut rng).unwrap();
        let mean = d.iter().sum::<usize>() as f64 / d.len() as f64;
        assert!((9.5..=10.5).contains(&mean), "{mean}");
    }

    #[test]
    fn degenerate_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = sample_powerlaw_degrees(20, 6.0, 6, 3.0, &mut rng).unwrap();
        assert!(d.iter().all(|&k| k == 6));
    }

    #[test]
    fn infeasible_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(matches!(
            sample_powerlaw_degrees(20, 12.0, 10, 3.0, &mut rng),
            Err(GeneratorError::NoFeasibleMinDegree { .. })
        ));
        assert!(matches!(
            sample_powerlaw_degrees(20, 1.01, 10, 3.0, &mut rng),
            Err(GeneratorError::NoFeasibleMinDegree { .. })
        ));
    }
}
