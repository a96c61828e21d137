//! Entropy functionals. All logarithms are base 2, so every value is in bits.

use crate::error::{CorrError, Result};
use crate::operator::{eigenvalues_hermitian, ComplexMatrix};
use crate::states::{schmidt, Bipartition, DensityMatrix, PureState, Tripartition};

/// Eigenvalues below this are treated as exact zeros.
pub const ZERO_EIGENVALUE: f64 = 1e-12;

/// `-sum p log2 p` with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > ZERO_EIGENVALUE)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

/// Entropy of the spectrum of a Hermitian PSD operator (not necessarily a validated state).
pub fn spectral_entropy(m: &ComplexMatrix) -> Result<f64> {
    Ok(shannon_entropy(&eigenvalues_hermitian(m)?))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    spectral_entropy(rho.matrix()).expect("density matrices are Hermitian")
}

fn marginal_entropy(rho: &DensityMatrix, keep: &[usize]) -> Result<f64> {
    Ok(von_neumann_entropy(&rho.marginal(keep)?))
}

/// `S(A) + S(B) - S(AB)`, clamped at zero when it lies within `-1e-9`.
pub fn mutual_information(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    let cut = Bipartition::new(cut.a().to_vec(), cut.b().to_vec(), rho.dims().len())?;
    let s_a = marginal_entropy(rho, cut.a())?;
    let s_b = marginal_entropy(rho, cut.b())?;
    let s_ab = von_neumann_entropy(rho);
    let value = s_a + s_b - s_ab;
    Ok(if (-1e-9..0.0).contains(&value) { 0.0 } else { value })
}

/// Mutual information between the first `k` subsystems and the rest.
pub fn mutual_information_split(rho: &DensityMatrix, k: usize) -> Result<f64> {
    mutual_information(rho, &Bipartition::split_at(k, rho.dims().len())?)
}

/// `I(A:C|B) = S(AB) + S(BC) - S(ABC) - S(B)`. Not clamped.
pub fn conditional_mutual_information(rho: &DensityMatrix, parts: &Tripartition) -> Result<f64> {
    let parts = Tripartition::new(parts.a.clone(), parts.b.clone(), parts.c.clone(), rho.dims().len())?;
    let ab: Vec<usize> = parts.a.iter().chain(&parts.b).copied().collect();
    let bc: Vec<usize> = parts.b.iter().chain(&parts.c).copied().collect();
    Ok(marginal_entropy(rho, &ab)? + marginal_entropy(rho, &bc)? - von_neumann_entropy(rho) - marginal_entropy(rho, &parts.b)?)
}

/// `S(tr_B psi)`, computed from the Schmidt coefficients.
pub fn entanglement_entropy(psi: &PureState, cut: &Bipartition) -> Result<f64> {
    Ok(shannon_entropy(&schmidt(psi, cut)?.coefficients))
}

/// `eta(x) = -x log2 x` for `x <= 1/e`, and `(1/e) log2 e` beyond.
pub fn eta(x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(CorrError::Domain(format!("eta is defined for x >= 0, got {x}")));
    }
    let inv_e = (-1.0f64).exp();
    Ok(if x == 0.0 {
        0.0
    } else if x <= inv_e {
        -x * x.log2()
    } else {
        inv_e * std::f64::consts::LOG2_E
    })
}

/// `eps * log_dim + eta(eps)`: bound on `|S(rho) - S(sigma)|` when `||rho - sigma||_1 = eps <= 1/e`.
pub fn fannes_bound(eps: f64, log_dim: f64) -> Result<f64> {
    Ok(eps * log_dim + eta(eps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::operator::DimList;

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&fixtures::bell().density()) < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(DimList::new(vec![2]).unwrap());
        assert!((von_neumann_entropy(&mixed) - 1.0).abs() < 1e-12);
        // -1/2 log 1/2 - 2 * 1/4 log 1/4 = 1/2 + 1
        let rho = DensityMatrix::diagonal(&[0.5, 0.25, 0.25]).unwrap();
        assert!((von_neumann_entropy(&rho) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_examples() {
        let cut = Bipartition::split_at(1, 2).unwrap();
        assert!((mutual_information(&fixtures::bell().density(), &cut).unwrap() - 2.0).abs() < 1e-9);
        assert!((mutual_information(&fixtures::bell_dephased(), &cut).unwrap() - 1.0).abs() < 1e-9);
        // spectrum (5/8, 1/8, 1/8, 1/8), marginals maximally mixed
        let s = -(0.625f64 * 0.625f64.log2()) - 3.0 * 0.125 * 0.125f64.log2();
        let w = mutual_information(&fixtures::werner(0.5).unwrap(), &cut).unwrap();
        assert!((w - (2.0 - s)).abs() < 1e-12);
        assert!((w - 0.4512).abs() < 1e-4);
        let bad = Bipartition::split_at(1, 3).unwrap();
        assert!(matches!(mutual_information(&fixtures::bell().density(), &bad), Err(CorrError::Index(_))));
    }

    #[test]
    fn ghz_conditional_mutual_information() {
        let parts = Tripartition::new(vec![0], vec![1], vec![2], 3).unwrap();
        let v = conditional_mutual_information(&fixtures::ghz3().density(), &parts).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn entanglement_entropy_examples() {
        let cut = Bipartition::split_at(1, 2).unwrap();
        assert!((entanglement_entropy(&fixtures::bell(), &cut).unwrap() - 1.0).abs() < 1e-12);
        let psi = fixtures::schmidt_state(&[0.8, 0.2]).unwrap();
        let h = -(0.8f64 * 0.8f64.log2()) - 0.2 * 0.2f64.log2();
        assert!((entanglement_entropy(&psi, &cut).unwrap() - h).abs() < 1e-12);
        assert!((h - 0.7219).abs() < 1e-4);
        let product = fixtures::schmidt_state(&[1.0, 0.0]).unwrap();
        assert!(entanglement_entropy(&product, &cut).unwrap() < 1e-12);
    }

    #[test]
    fn eta_branches() {
        assert_eq!(eta(0.0).unwrap(), 0.0);
        let inv_e = (-1.0f64).exp();
        assert!((eta(inv_e).unwrap() - inv_e * std::f64::consts::LOG2_E).abs() < 1e-15);
        assert!((eta(inv_e).unwrap() - 0.5307).abs() < 1e-4);
        assert!((eta(0.25).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(eta(0.9).unwrap(), eta(inv_e).unwrap());
        assert!(matches!(eta(-0.1), Err(CorrError::Domain(_))));
        assert!((fannes_bound(0.25, 2.0).unwrap() - 1.0).abs() < 1e-15);
    }
}
