//! Named states used by tests, protocols and the CLI.
//!
//! String ids: `bell`, `bell_dephased`, `ghz3`, `werner:p`, `haar:dA,dB:seed`,
//! plus `diag:p1,p2,...` and `schmidt:l1,l2,...` for single-party diagonal
//! states and two-party Schmidt-form pure states.

use num_complex::Complex64;

use crate::error::{CorrError, Result};
use crate::operator::{c, ComplexMatrix, DimList};
use crate::random::stream;
use crate::states::{random_pure, DensityMatrix, PureState};

pub const KNOWN_IDS: &[&str] = &["bell", "bell_dephased", "ghz3", "werner:p", "haar:dA,dB:seed", "diag:p1,p2,...", "schmidt:l1,l2,..."];

fn qubits(n: usize) -> DimList {
    DimList::uniform(2, n).expect("small qubit register")
}

/// `(|00> + |11>)/sqrt(2)`
pub fn bell() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)], qubits(2)).expect("normalized")
}

/// `(|00> - |11>)/sqrt(2)`
pub fn bell_minus() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-s, 0.0)], qubits(2)).expect("normalized")
}

/// `(|00><00| + |11><11|)/2`
pub fn bell_dephased() -> DensityMatrix {
    DensityMatrix::diagonal_with_dims(&[0.5, 0.0, 0.0, 0.5], qubits(2)).expect("valid diagonal state")
}

pub fn ghz3() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![c(0.0, 0.0); 8];
    v[0] = c(s, 0.0);
    v[7] = c(s, 0.0);
    PureState::new(v, qubits(3)).expect("normalized")
}

/// `p |Φ+><Φ+| + (1 - p) 1/4`
pub fn werner(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CorrError::Domain(format!("werner parameter {p} outside [0, 1]")));
    }
    let phi = bell().density();
    let noise = ComplexMatrix::identity(4).scale((1.0 - p) / 4.0);
    DensityMatrix::new(&phi.matrix().scale(p) + &noise, qubits(2))
}

/// `sum_i sqrt(l_i) |ii>` on `d x d` with `d = l.len()`.
pub fn schmidt_state(coefficients: &[f64]) -> Result<PureState> {
    let d = coefficients.len();
    if d < 1 || coefficients.iter().any(|&x| x < 0.0) {
        return Err(CorrError::Domain("Schmidt coefficients must be non-negative".into()));
    }
    let mut v = vec![c(0.0, 0.0); d * d];
    for (i, &l) in coefficients.iter().enumerate() {
        v[i * d + i] = c(l.sqrt(), 0.0);
    }
    PureState::normalized(v, DimList::new(vec![d, d])?)
}

pub fn haar(d_a: usize, d_b: usize, seed: u64) -> Result<PureState> {
    let dims = DimList::new(vec![d_a, d_b])?;
    Ok(random_pure(&mut stream(seed, 0), &dims))
}

/// A state parsed from a string id.
#[derive(Debug, Clone)]
pub enum NamedState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl NamedState {
    pub fn density(&self) -> DensityMatrix {
        match self {
            NamedState::Pure(p) => p.density(),
            NamedState::Mixed(m) => m.clone(),
        }
    }

    pub fn pure(&self) -> Option<&PureState> {
        match self {
            NamedState::Pure(p) => Some(p),
            NamedState::Mixed(_) => None,
        }
    }

    pub fn dims(&self) -> &DimList {
        match self {
            NamedState::Pure(p) => p.dims(),
            NamedState::Mixed(m) => m.dims(),
        }
    }
}

fn unknown(id: &str) -> CorrError {
    CorrError::UnknownState { id: id.to_string(), known: KNOWN_IDS.join(", ") }
}

fn parse_floats(id: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| unknown(id))).collect()
}

/// Resolves a state id such as `werner:0.5` or `haar:2,3:7`.
pub fn parse_state_id(id: &str) -> Result<NamedState> {
    let mut parts = id.splitn(2, ':');
    let head = parts.next().unwrap_or_default();
    let rest = parts.next();
    match (head, rest) {
        ("bell", None) => Ok(NamedState::Pure(bell())),
        ("bell_dephased", None) => Ok(NamedState::Mixed(bell_dephased())),
        ("ghz3", None) => Ok(NamedState::Pure(ghz3())),
        ("werner", Some(p)) => {
            let p: f64 = p.trim().parse().map_err(|_| unknown(id))?;
            Ok(NamedState::Mixed(werner(p)?))
        }
        ("haar", Some(spec)) => {
            let (dims, seed) = spec.split_once(':').ok_or_else(|| unknown(id))?;
            let (da, db) = dims.split_once(',').ok_or_else(|| unknown(id))?;
            let da: usize = da.trim().parse().map_err(|_| unknown(id))?;
            let db: usize = db.trim().parse().map_err(|_| unknown(id))?;
            let seed: u64 = seed.trim().parse().map_err(|_| unknown(id))?;
            Ok(NamedState::Pure(haar(da, db, seed)?))
        }
        ("diag", Some(p)) => {
            let p = parse_floats(id, p)?;
            Ok(NamedState::Mixed(DensityMatrix::diagonal(&p)?))
        }
        ("schmidt", Some(l)) => Ok(NamedState::Pure(schmidt_state(&parse_floats(id, l)?)?)),
        _ => Err(unknown(id)),
    }
}

/// Computational basis vector `|index>` in dimension `dim`.
pub fn basis_vector(dim: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); dim];
    v[index] = c(1.0, 0.0);
    v
}
