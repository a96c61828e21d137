//! Unitary ensembles acting as private quantum channels on a subspace:
//! discrete Weyl operators, Haar samples, and the diagonal phase family.

use rand::Rng;

use crate::error::{CorrError, Result};
use crate::operator::{c, range_projector, ComplexMatrix};
use crate::random::{haar_unitary, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    DiscreteWeyl,
    Haar,
    PhaseFamily,
}

/// Ensemble description. `support` is an isometry (ambient x D) whose columns span
/// the subspace the unitaries act on; without it the unitaries act on `C^D`.
#[derive(Debug, Clone)]
pub struct UnitaryEnsembleSpec {
    pub kind: EnsembleKind,
    pub dimension: usize,
    pub support: Option<ComplexMatrix>,
    pub seed: u64,
}

impl UnitaryEnsembleSpec {
    pub fn new(kind: EnsembleKind, dimension: usize, seed: u64) -> Self {
        Self { kind, dimension, support: None, seed }
    }

    pub fn on_support(mut self, isometry: ComplexMatrix) -> Self {
        self.support = Some(isometry);
        self
    }
}

/// Shift `X|j> = |j+1 mod D>`.
pub fn weyl_shift(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// Clock `Z|j> = e^{2 pi i j / D}|j>`.
pub fn weyl_clock(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / d as f64;
            c(theta.cos(), theta.sin())
        } else {
            c(0.0, 0.0)
        }
    })
}

/// `X^a Z^b`, built directly: `|j> -> e^{2 pi i b j / D} |j + a>`.
pub fn weyl_operator(d: usize, a: usize, b: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == (j + a) % d {
            let theta = 2.0 * std::f64::consts::PI * ((b * j) % d) as f64 / d as f64;
            c(theta.cos(), theta.sin())
        } else {
            c(0.0, 0.0)
        }
    })
}

/// `U_k = sum_j e^{2 pi i j k / D} |j><j|`.
pub fn phase_unitary(d: usize, k: usize) -> ComplexMatrix {
    weyl_operator(d, 0, k % d)
}

/// `V W V^dagger + (1 - V V^dagger)`: acts as `w` on the range of `v`, identity elsewhere.
pub fn embed_on_support(w: &ComplexMatrix, v: &ComplexMatrix) -> ComplexMatrix {
    let ambient = v.rows();
    let inside = &(v * w) * &v.adjoint();
    let outside = &ComplexMatrix::identity(ambient) - &range_projector(v);
    &inside + &outside
}

/// Uniform `(a, b)` Weyl index.
pub fn sample_weyl_index<R: Rng + ?Sized>(rng: &mut R, d: usize) -> (usize, usize) {
    (rng.random_range(0..d), rng.random_range(0..d))
}

/// Generates `count` unitaries.
///
/// * `DiscreteWeyl`: all `D^2` operators `X^a Z^b` in `(a, b)` order when
///   `count == D^2`; otherwise `count` draws uniform with replacement.
/// * `Haar`: `count` Haar samples.
/// * `PhaseFamily`: exactly `U_1, ..., U_D` (independent of `count`).
pub fn generate_ensemble(spec: &UnitaryEnsembleSpec, count: usize) -> Result<Vec<ComplexMatrix>> {
    let d = spec.dimension;
    if d == 0 {
        return Err(CorrError::Domain("ensemble dimension must be at least 1".into()));
    }
    if let Some(v) = &spec.support {
        if v.cols() != d {
            return Err(CorrError::DimensionMismatch { expected: d, found: v.cols() });
        }
    }
    let mut rng = stream(spec.seed, 0);
    let raw: Vec<ComplexMatrix> = match spec.kind {
        EnsembleKind::DiscreteWeyl => {
            if count == d * d {
                (0..d).flat_map(|a| (0..d).map(move |b| weyl_operator(d, a, b))).collect()
            } else {
                (0..count)
                    .map(|_| {
                        let (a, b) = sample_weyl_index(&mut rng, d);
                        weyl_operator(d, a, b)
                    })
                    .collect()
            }
        }
        EnsembleKind::Haar => (0..count).map(|_| haar_unitary(&mut rng, d)).collect(),
        EnsembleKind::PhaseFamily => (1..=d).map(|k| phase_unitary(d, k)).collect(),
    };
    Ok(match &spec.support {
        Some(v) => raw.iter().map(|w| embed_on_support(w, v)).collect(),
        None => raw,
    })
}

/// `(1/N) sum_i U_i rho U_i^dagger`
pub fn twirl(unitaries: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(rho.rows(), rho.cols());
    for u in unitaries {
        acc = &acc + &u.conjugate(rho);
    }
    acc.scale(1.0 / unitaries.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{isometry_from_columns, trace_norm};
    use crate::random::{gaussian_vector, haar_unitary};

    #[test]
    fn weyl_commutation_and_unitarity() {
        for d in [2, 3, 5] {
            let x = weyl_shift(d);
            let z = weyl_clock(d);
            let theta = 2.0 * std::f64::consts::PI / d as f64;
            let omega = c(theta.cos(), theta.sin());
            assert!((&z * &x).max_abs_diff(&(&x * &z).scale_complex(omega)) < 1e-12);
            for a in 0..d {
                for b in 0..d {
                    let w = weyl_operator(d, a, b);
                    assert!(w.is_unitary(1e-12));
                    let mut expected = ComplexMatrix::identity(d);
                    for _ in 0..a {
                        expected = &expected * &x;
                    }
                    for _ in 0..b {
                        expected = &expected * &z;
                    }
                    assert!(w.max_abs_diff(&expected) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn full_weyl_twirl_is_private_on_support() {
        let mut rng = stream(4, 0);
        // 2-dim support inside C^3
        let u = haar_unitary(&mut rng, 3);
        let v = isometry_from_columns(3, &[u.column_vec(0), u.column_vec(1)]);
        let spec = UnitaryEnsembleSpec::new(EnsembleKind::DiscreteWeyl, 2, 1).on_support(v.clone());
        let ens = generate_ensemble(&spec, 4).unwrap();
        assert!(ens.iter().all(|u| u.is_unitary(1e-12)));
        let g = gaussian_vector(&mut rng, 2);
        let inner = ComplexMatrix::projector(&g);
        let phi = &(&v * &inner) * &v.adjoint();
        let out = twirl(&ens, &phi);
        let expected = range_projector(&v).scale(phi.trace().re / 2.0);
        assert!(out.max_abs_diff(&expected) < 1e-12);
        // idempotent on the support
        assert!(twirl(&ens, &out).max_abs_diff(&out) < 1e-12);
        // identity on the complement
        let w = u.column_vec(2);
        for op in &ens {
            let moved: Vec<_> = (0..3).map(|i| (0..3).map(|j| op.get(i, j) * w[j]).sum::<num_complex::Complex64>()).collect();
            assert!(moved.iter().zip(&w).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }

    #[test]
    fn phase_family_for_qubit_is_identity_and_z() {
        let fam = generate_ensemble(&UnitaryEnsembleSpec::new(EnsembleKind::PhaseFamily, 2, 0), 2).unwrap();
        assert_eq!(fam.len(), 2);
        assert!(fam[0].max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])) < 1e-15);
        assert!(fam[1].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn haar_average_of_a_projector_is_maximally_mixed() {
        let d = 4;
        let ens = generate_ensemble(&UnitaryEnsembleSpec::new(EnsembleKind::Haar, d, 17), 10_000).unwrap();
        let mut p0 = vec![c(0.0, 0.0); d];
        p0[0] = c(1.0, 0.0);
        let avg = twirl(&ens, &ComplexMatrix::projector(&p0));
        let dist = trace_norm(&(&avg - &ComplexMatrix::identity(d).scale(0.25)));
        assert!(dist < 5e-2, "distance {dist}");
    }

    #[test]
    fn sampled_weyl_is_reproducible() {
        let spec = UnitaryEnsembleSpec::new(EnsembleKind::DiscreteWeyl, 3, 21);
        let a = generate_ensemble(&spec, 5).unwrap();
        let b = generate_ensemble(&spec, 5).unwrap();
        assert_eq!(a, b);
    }
}
