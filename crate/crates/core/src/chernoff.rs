//! Empirical operator Chernoff bench: how often the average of `N` i.i.d. operators
//! with values in `[0, 1]` leaves `[(1 - eps) M, (1 + eps) M]`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::weyl_operator;
use crate::error::{CorrError, Result};
use crate::operator::{
    eigenvalues_hermitian, local_conjugate, operator_in_interval, partial_trace, ComplexMatrix, DimList,
};
use crate::random::{stream, StreamRng};

pub const INTERVAL_TOL: f64 = 1e-9;
pub const PILOT_SAMPLES: usize = 1000;
const SUPPORT_TOL: f64 = 1e-12;

pub trait OperatorSampler: Sync {
    fn dim(&self) -> usize;

    fn sample(&self, rng: &mut StreamRng) -> ComplexMatrix;

    /// Exact mean when it is known in closed form.
    fn mean(&self) -> Option<ComplexMatrix> {
        None
    }

    fn sample_mean(&self, rng: &mut StreamRng, n: usize) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for _ in 0..n {
            acc = &acc + &self.sample(rng);
        }
        acc.scale(1.0 / n as f64)
    }
}

/// `X = M` always.
#[derive(Debug, Clone)]
pub struct ConstantSampler {
    pub value: ComplexMatrix,
}

impl OperatorSampler for ConstantSampler {
    fn dim(&self) -> usize {
        self.value.rows()
    }

    fn sample(&self, _rng: &mut StreamRng) -> ComplexMatrix {
        self.value.clone()
    }

    fn mean(&self) -> Option<ComplexMatrix> {
        Some(self.value.clone())
    }
}

/// Scalar `X ~ Bernoulli(p)` as a 1x1 operator.
#[derive(Debug, Clone, Copy)]
pub struct BernoulliSampler {
    pub p: f64,
}

impl OperatorSampler for BernoulliSampler {
    fn dim(&self) -> usize {
        1
    }

    fn sample(&self, rng: &mut StreamRng) -> ComplexMatrix {
        let x = if rng.random::<f64>() < self.p { 1.0 } else { 0.0 };
        ComplexMatrix::from_real_diagonal(&[x])
    }

    fn mean(&self) -> Option<ComplexMatrix> {
        Some(ComplexMatrix::from_real_diagonal(&[self.p]))
    }

    fn sample_mean(&self, rng: &mut StreamRng, n: usize) -> ComplexMatrix {
        let hits = (0..n).filter(|_| rng.random::<f64>() < self.p).count();
        ComplexMatrix::from_real_diagonal(&[hits as f64 / n as f64])
    }
}

/// `X = s (W_{ab} ⊗ 1) tau (W_{ab} ⊗ 1)^dagger` with `(a, b)` uniform over the
/// `D_A^2` Weyl operators on `A` and `s = 1 / lambda_max(tau)`, so `0 <= X <= 1`.
/// The mean is `s (1_A / D_A) ⊗ tr_A tau`.
#[derive(Debug, Clone)]
pub struct WeylSampler {
    d_a: usize,
    d_b: usize,
    scale: f64,
    outcomes: Vec<ComplexMatrix>,
    mean: ComplexMatrix,
}

impl WeylSampler {
    pub fn new(tau: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        if tau.rows() != d_a * d_b || !tau.is_square() {
            return Err(CorrError::DimensionMismatch { expected: d_a * d_b, found: tau.rows() });
        }
        let top = eigenvalues_hermitian(tau)?[0];
        if top.is_nan() || top <= SUPPORT_TOL {
            return Err(CorrError::Domain("operator must have a positive eigenvalue".into()));
        }
        let scale = 1.0 / top;
        let scaled = tau.scale(scale);
        let outcomes: Vec<ComplexMatrix> = (0..d_a)
            .flat_map(|a| (0..d_a).map(move |b| (a, b)))
            .map(|(a, b)| local_conjugate(&scaled, d_a, d_b, Some(&weyl_operator(d_a, a, b)), None))
            .collect();
        let dims = DimList::new(vec![d_a, d_b])?;
        let tau_b = partial_trace(&scaled, &dims, &[1])?;
        let mean = crate::operator::tensor(&ComplexMatrix::identity(d_a).scale(1.0 / d_a as f64), &tau_b)?;
        Ok(Self { d_a, d_b, scale, outcomes, mean })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    fn draw(&self, rng: &mut StreamRng) -> usize {
        rng.random_range(0..self.outcomes.len())
    }
}

impl OperatorSampler for WeylSampler {
    fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    fn sample(&self, rng: &mut StreamRng) -> ComplexMatrix {
        self.outcomes[self.draw(rng)].clone()
    }

    fn mean(&self) -> Option<ComplexMatrix> {
        Some(self.mean.clone())
    }

    fn sample_mean(&self, rng: &mut StreamRng, n: usize) -> ComplexMatrix {
        let mut counts = vec![0usize; self.outcomes.len()];
        for _ in 0..n {
            counts[self.draw(rng)] += 1;
        }
        let d = self.dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for (k, &count) in counts.iter().enumerate() {
            if count > 0 {
                acc = &acc + &self.outcomes[k].scale(count as f64);
            }
        }
        acc.scale(1.0 / n as f64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChernoffReport {
    pub dim: usize,
    pub n_samples: usize,
    pub eps: f64,
    pub trials: usize,
    pub violations: usize,
    pub violation_rate: f64,
    /// Smallest eigenvalue of the mean on its support.
    pub mu: f64,
    /// `mu` came from a pilot run rather than the exact mean.
    pub mu_estimated: bool,
    /// `2 d exp(-N mu eps^2 / 2)`
    pub bound: f64,
    pub standard_error: f64,
    /// `violation_rate <= bound + 3 standard_error`
    pub ok: bool,
}

fn in_unit_interval(x: &ComplexMatrix) -> Result<bool> {
    let d = x.rows();
    operator_in_interval(x, &ComplexMatrix::zeros(d, d), &ComplexMatrix::identity(d), INTERVAL_TOL)
}

fn min_on_support(m: &ComplexMatrix) -> Result<f64> {
    let values = eigenvalues_hermitian(m)?;
    values
        .into_iter()
        .filter(|&v| v > SUPPORT_TOL)
        .reduce(f64::min)
        .ok_or_else(|| CorrError::Domain("mean operator is zero".into()))
}

/// Runs `trials` independent averages of `n_samples` draws, trial `t` using stream `(seed, t)`.
pub fn chernoff_trial(
    sampler: &dyn OperatorSampler,
    n_samples: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<ChernoffReport> {
    if n_samples == 0 || trials == 0 {
        return Err(CorrError::Domain("need at least one sample and one trial".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CorrError::Domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    let (mean, mu_estimated) = match sampler.mean() {
        Some(m) => (m, false),
        None => (sampler.sample_mean(&mut stream(seed, u64::MAX), PILOT_SAMPLES), true),
    };
    let mu = min_on_support(&mean)?;
    let lo = mean.scale(1.0 - eps);
    let hi = mean.scale(1.0 + eps);

    let outcomes: Vec<Result<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t as u64);
            let probe = sampler.sample(&mut rng);
            if !in_unit_interval(&probe)? {
                return Err(CorrError::Precondition(format!("sampler output outside [0, 1] in trial {t}")));
            }
            let avg = sampler.sample_mean(&mut rng, n_samples);
            Ok(!operator_in_interval(&avg, &lo, &hi, INTERVAL_TOL)?)
        })
        .collect();
    let mut violations = 0;
    for o in outcomes {
        if o? {
            violations += 1;
        }
    }
    let d = sampler.dim();
    let rate = violations as f64 / trials as f64;
    let bound = 2.0 * d as f64 * (-(n_samples as f64) * mu * eps * eps / 2.0).exp();
    let standard_error = (rate * (1.0 - rate) / trials as f64).sqrt();
    Ok(ChernoffReport {
        dim: d,
        n_samples,
        eps,
        trials,
        violations,
        violation_rate: rate,
        mu,
        mu_estimated,
        bound,
        standard_error,
        ok: rate <= bound + 3.0 * standard_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn constant_sampler_never_violates() {
        let s = ConstantSampler { value: ComplexMatrix::from_real_diagonal(&[0.3, 0.6]) };
        let r = chernoff_trial(&s, 16, 0.1, 50, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert!((r.mu - 0.3).abs() < 1e-12);
        assert!(r.ok);
    }

    #[test]
    fn bernoulli_rate_below_bound() {
        for n in [32, 128, 512] {
            let r = chernoff_trial(&BernoulliSampler { p: 0.4 }, n, 0.2, 400, 7).unwrap();
            assert!(r.ok, "{r:?}");
        }
    }

    #[test]
    fn weyl_sampler_mean_and_range() {
        let tau = fixtures::bell_dephased();
        let s = WeylSampler::new(tau.matrix(), 2, 2).unwrap();
        assert!((s.scale() - 2.0).abs() < 1e-12);
        let expected = ComplexMatrix::identity(4).scale(0.5);
        assert!(s.mean().unwrap().max_abs_diff(&expected) < 1e-12);
        let mut rng = stream(3, 0);
        for _ in 0..8 {
            assert!(in_unit_interval(&s.sample(&mut rng)).unwrap());
        }
        let full: ComplexMatrix = s.outcomes.iter().fold(ComplexMatrix::zeros(4, 4), |acc, x| &acc + x).scale(0.25);
        assert!(full.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn out_of_range_sampler_is_rejected() {
        let s = ConstantSampler { value: ComplexMatrix::from_real_diagonal(&[1.5]) };
        assert!(matches!(chernoff_trial(&s, 4, 0.2, 3, 0), Err(CorrError::Precondition(_))));
    }

    #[test]
    fn pilot_estimate_is_used_without_a_mean() {
        struct Opaque(BernoulliSampler);
        impl OperatorSampler for Opaque {
            fn dim(&self) -> usize {
                1
            }
            fn sample(&self, rng: &mut StreamRng) -> ComplexMatrix {
                self.0.sample(rng)
            }
        }
        let r = chernoff_trial(&Opaque(BernoulliSampler { p: 0.5 }), 64, 0.5, 50, 2).unwrap();
        assert!(r.mu_estimated);
        assert!((r.mu - 0.5).abs() < 0.1);
    }

    #[test]
    fn trials_are_reproducible() {
        let tau = fixtures::werner(0.7).unwrap();
        let s = WeylSampler::new(tau.matrix(), 2, 2).unwrap();
        let a = chernoff_trial(&s, 32, 0.2, 40, 9).unwrap();
        let b = chernoff_trial(&s, 32, 0.2, 40, 9).unwrap();
        assert_eq!(a.violations, b.violations);
    }
}
