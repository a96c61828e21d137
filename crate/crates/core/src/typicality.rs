//! Typical subspaces of `rho^{⊗n}` and the gentle-measurement check.
//!
//! A product eigenstring `|I> = |i_1> ⊗ ... ⊗ |i_n>` of `rho^{⊗n}` with weight
//! `p_I = p_{i_1} ... p_{i_n}` is typical when `| -log2 p_I - n S(rho) | < eps n`
//! (strict). Strings containing a zero eigenvalue are never typical.

use serde::Serialize;

use crate::entropy::{shannon_entropy, ZERO_EIGENVALUE};
use crate::error::{CorrError, Result};
use crate::operator::{
    check_dim_cap, hermitian_eigensystem, kron_vec, min_eigenvalue, operator_in_interval, psd_sqrt, range_projector,
    tensor_power, trace_norm, ComplexMatrix, Eigensystem,
};
use crate::states::DensityMatrix;

/// Eigenvalue gaps below this mark the eigenbasis as a tie-broken choice.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Strings whose typicality margin is this close to zero are flagged.
pub const BOUNDARY_TOL: f64 = 1e-9;
pub const SANDWICH_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct TypicalProjector {
    pub projector: ComplexMatrix,
    pub n: usize,
    pub eps: f64,
    /// Eigenvectors of the single-copy state, as columns.
    pub basis: ComplexMatrix,
    pub eigenvalues: Vec<f64>,
    pub typical_indices: Vec<Vec<usize>>,
    /// Some eigenvalues coincide, so the eigenbasis (and typical set) is one of several.
    pub degenerate_spectrum: bool,
    /// Some string sits within `1e-9` of the typicality boundary.
    pub near_boundary: bool,
    isometry: ComplexMatrix,
}

impl TypicalProjector {
    pub fn rank(&self) -> usize {
        self.typical_indices.len()
    }

    /// Columns are the typical eigenstrings, in the order of `typical_indices`.
    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    pub fn single_copy_entropy(&self) -> f64 {
        shannon_entropy(&self.eigenvalues)
    }
}

/// Margin `eps n - | -log2 p_I - n S |`; positive means typical.
fn typicality_margin(surprisal: f64, n: usize, entropy: f64, eps: f64) -> f64 {
    eps * n as f64 - (surprisal - n as f64 * entropy).abs()
}

fn surprisals(eigenvalues: &[f64]) -> Vec<f64> {
    eigenvalues.iter().map(|&p| if p > ZERO_EIGENVALUE { -p.log2() } else { f64::INFINITY }).collect()
}

/// Typical projector built in the deterministic eigenbasis of `rho`.
pub fn typical_projector(rho: &DensityMatrix, n: usize, eps: f64) -> Result<TypicalProjector> {
    if n == 0 {
        return Err(CorrError::Domain("need at least one copy".into()));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(CorrError::Domain(format!("typicality parameter must be positive, got {eps}")));
    }
    let d = rho.dim();
    let total = d.checked_pow(n as u32).ok_or(CorrError::DimensionCap { dim: usize::MAX, cap: crate::operator::dim_cap() })?;
    check_dim_cap(total)?;
    let eig = hermitian_eigensystem(rho.matrix())?;
    build_from_eigensystem(&eig, n, eps, total)
}

fn build_from_eigensystem(eig: &Eigensystem, n: usize, eps: f64, total: usize) -> Result<TypicalProjector> {
    let d = eig.values.len();
    let eigenvalues: Vec<f64> = eig.values.iter().map(|&x| x.max(0.0)).collect();
    let entropy = shannon_entropy(&eigenvalues);
    let surprisal = surprisals(&eigenvalues);

    let mut typical_indices = Vec::new();
    let mut near_boundary = false;
    let mut digits = vec![0usize; n];
    for flat in 0..total {
        let mut rest = flat;
        for k in (0..n).rev() {
            digits[k] = rest % d;
            rest /= d;
        }
        let s: f64 = digits.iter().map(|&i| surprisal[i]).sum();
        if !s.is_finite() {
            continue;
        }
        let margin = typicality_margin(s, n, entropy, eps);
        if margin.abs() < BOUNDARY_TOL {
            near_boundary = true;
        }
        if margin > 0.0 {
            typical_indices.push(digits.clone());
        }
    }

    let columns: Vec<Vec<num_complex::Complex64>> = (0..d).map(|k| eig.vector(k)).collect();
    let vectors: Vec<Vec<num_complex::Complex64>> = typical_indices
        .iter()
        .map(|idx| {
            idx.iter().skip(1).fold(columns[idx[0]].clone(), |acc, &i| kron_vec(&acc, &columns[i]))
        })
        .collect();
    let isometry = if vectors.is_empty() {
        ComplexMatrix::zeros(total, 1)
    } else {
        ComplexMatrix::from_fn(total, vectors.len(), |i, j| vectors[j][i])
    };
    let projector = if vectors.is_empty() { ComplexMatrix::zeros(total, total) } else { range_projector(&isometry) };
    let degenerate_spectrum = d > 1 && eig.min_gap() < DEGENERACY_TOL;
    Ok(TypicalProjector {
        projector,
        n,
        eps,
        basis: eig.vectors.clone(),
        eigenvalues,
        typical_indices,
        degenerate_spectrum,
        near_boundary,
        isometry,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TypicalityReport {
    pub n: usize,
    pub eps: f64,
    pub entropy: f64,
    /// `tr(rho^{⊗n} Pi)`
    pub mass: f64,
    /// `tr Pi`
    pub dim: f64,
    /// `2^{-n(S+eps)} Pi <= Pi rho^{⊗n} Pi <= 2^{-n(S-eps)} Pi`
    pub sandwich_ok: bool,
    /// `tr Pi <= 2^{n(S+eps)}`
    pub dim_upper_ok: bool,
    /// `tr Pi >= (1-eps) 2^{n(S-eps)}`, checked only once `mass >= 1 - eps`.
    pub dim_lower_ok: Option<bool>,
    /// `mass >= 1 - eps`; below that `n` is short of the large-`n` regime.
    pub converged: bool,
    pub degenerate_spectrum: bool,
    pub near_boundary: bool,
}

/// Checks the typical subspace properties on an explicitly built projector.
pub fn typicality_report(tp: &TypicalProjector, rho: &DensityMatrix) -> Result<TypicalityReport> {
    let n = tp.n;
    let eps = tp.eps;
    let entropy = tp.single_copy_entropy();
    let power = tensor_power(rho.matrix(), n)?;
    if power.rows() != tp.projector.rows() {
        return Err(CorrError::DimensionMismatch { expected: tp.projector.rows(), found: power.rows() });
    }
    // Pi X Pi - c Pi = V (V^dagger X V - c 1) V^dagger, so the sandwich is checked on the compression
    let (mass, dim, sandwich_ok) = if tp.rank() == 0 {
        (0.0, 0.0, true)
    } else {
        let v = tp.isometry();
        let compressed = &(&v.adjoint() * &power) * v;
        let r = tp.rank();
        let lo = ComplexMatrix::identity(r).scale((-(n as f64) * (entropy + eps)).exp2());
        let hi = ComplexMatrix::identity(r).scale((-(n as f64) * (entropy - eps)).exp2());
        (compressed.trace().re, tp.projector.trace().re, operator_in_interval(&compressed, &lo, &hi, SANDWICH_TOL)?)
    };
    Ok(finish_report(n, eps, entropy, mass, dim, sandwich_ok, tp.degenerate_spectrum, tp.near_boundary))
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    n: usize,
    eps: f64,
    entropy: f64,
    mass: f64,
    dim: f64,
    sandwich_ok: bool,
    degenerate_spectrum: bool,
    near_boundary: bool,
) -> TypicalityReport {
    let nf = n as f64;
    let converged = mass >= 1.0 - eps;
    let dim_upper_ok = dim <= (nf * (entropy + eps)).exp2() * (1.0 + 1e-12);
    let dim_lower_ok = converged.then(|| dim >= (1.0 - eps) * (nf * (entropy - eps)).exp2() * (1.0 - 1e-12));
    TypicalityReport {
        n,
        eps,
        entropy,
        mass,
        dim,
        sandwich_ok,
        dim_upper_ok,
        dim_lower_ok,
        converged,
        degenerate_spectrum,
        near_boundary,
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

fn for_each_composition(n: usize, parts: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(remaining: usize, slot: usize, buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if slot + 1 == buf.len() {
            buf[slot] = remaining;
            f(buf);
            return;
        }
        for k in 0..=remaining {
            buf[slot] = k;
            rec(remaining - k, slot + 1, buf, f);
        }
    }
    let mut buf = vec![0; parts];
    rec(n, 0, &mut buf, f);
}

/// Counting version of [`typicality_report`] for a state diagonal in a known basis with
/// spectrum `p`: strings are grouped by type, so no `d^n` matrix is formed.
pub fn typicality_report_diagonal(p: &[f64], n: usize, eps: f64) -> Result<TypicalityReport> {
    if n == 0 || eps.is_nan() || eps <= 0.0 {
        return Err(CorrError::Domain("need n >= 1 and eps > 0".into()));
    }
    let total: f64 = p.iter().sum();
    if p.iter().any(|&x| x < 0.0) || (total - 1.0).abs() > 1e-10 {
        return Err(CorrError::Domain("spectrum must be a probability vector".into()));
    }
    let mut sorted = p.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let degenerate_spectrum = sorted.windows(2).any(|w| (w[0] - w[1]).abs() < DEGENERACY_TOL);
    let entropy = shannon_entropy(p);
    let surprisal = surprisals(p);
    let lnf = ln_factorials(n);
    let nf = n as f64;
    let lo = -nf * (entropy + eps);
    let hi = -nf * (entropy - eps);

    let mut mass = 0.0;
    let mut dim = 0.0;
    let mut sandwich_ok = true;
    let mut near_boundary = false;
    for_each_composition(n, p.len(), &mut |counts: &[usize]| {
        let s: f64 = counts.iter().zip(&surprisal).map(|(&k, &sv)| if k == 0 { 0.0 } else { k as f64 * sv }).sum();
        if !s.is_finite() {
            return;
        }
        let margin = typicality_margin(s, n, entropy, eps);
        if margin.abs() < BOUNDARY_TOL {
            near_boundary = true;
        }
        if margin <= 0.0 {
            return;
        }
        let ln_mult = lnf[n] - counts.iter().map(|&k| lnf[k]).sum::<f64>();
        let log2_p = -s;
        // every string of this type is an eigenvector of Pi rho Pi with eigenvalue p_I
        if log2_p < lo - 1e-9 || log2_p > hi + 1e-9 {
            sandwich_ok = false;
        }
        dim += ln_mult.exp();
        mass += (ln_mult + log2_p * std::f64::consts::LN_2).exp();
    });
    Ok(finish_report(n, eps, entropy, mass, dim, sandwich_ok, degenerate_spectrum, near_boundary))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GentleCheck {
    /// `tr rho - tr(rho X)`
    pub delta: f64,
    /// `||rho - sqrt(X) rho sqrt(X)||_1`
    pub lhs: f64,
    /// `sqrt(8 delta)`
    pub bound: f64,
    pub ok: bool,
}

/// Disturbance of a subnormalized state by a two-outcome measurement effect `0 <= X <= 1`.
pub fn gentle_measurement_check(rho: &ComplexMatrix, x: &ComplexMatrix) -> Result<GentleCheck> {
    if rho.rows() != x.rows() || !rho.is_square() || !x.is_square() {
        return Err(CorrError::DimensionMismatch { expected: rho.rows(), found: x.rows() });
    }
    let d = x.rows();
    if !operator_in_interval(x, &ComplexMatrix::zeros(d, d), &ComplexMatrix::identity(d), 1e-9)? {
        return Err(CorrError::Precondition("measurement effect is not in [0, 1]".into()));
    }
    let tr = rho.trace().re;
    if min_eigenvalue(rho)? < -1e-10 || tr > 1.0 + 1e-10 {
        return Err(CorrError::Precondition("state must be positive with trace at most 1".into()));
    }
    let delta = (tr - rho.trace_product(x).re).max(0.0);
    let root = psd_sqrt(x)?;
    let disturbed = root.conjugate(rho);
    let lhs = trace_norm(&(rho - &disturbed).hermitian_part());
    let bound = (8.0 * delta).sqrt();
    Ok(GentleCheck { delta, lhs, bound, ok: lhs <= bound + 1e-9 })
}
