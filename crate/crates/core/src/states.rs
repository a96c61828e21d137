//! Density matrices, pure states, Schmidt forms, purifications and random states.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{CorrError, Result};
use crate::operator::{
    c, hermitian_eigensystem, partial_trace, permute_vector, ComplexMatrix, DimList, HERMITIAN_TOL,
};
use crate::random::{gaussian_vector, simplex_point, stream};

/// Eigenvalues in `[-CLAMP_TOL, 0)` are treated as float noise and clamped to zero.
pub const CLAMP_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-10;

/// Two disjoint, non-empty groups of subsystem indices covering every subsystem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl Bipartition {
    pub fn new(a: Vec<usize>, b: Vec<usize>, n_subsystems: usize) -> Result<Self> {
        check_groups(&[&a, &b], n_subsystems)?;
        Ok(Self { a, b })
    }

    /// First `k` subsystems against the rest.
    pub fn split_at(k: usize, n_subsystems: usize) -> Result<Self> {
        Self::new((0..k).collect(), (k..n_subsystems).collect(), n_subsystems)
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    /// Subsystem order putting `a` first, then `b`.
    pub fn order(&self) -> Vec<usize> {
        self.a.iter().chain(self.b.iter()).copied().collect()
    }
}

/// `(A, B, C)` grouping of all subsystems, each group non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tripartition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
}

impl Tripartition {
    pub fn new(a: Vec<usize>, b: Vec<usize>, c: Vec<usize>, n_subsystems: usize) -> Result<Self> {
        check_groups(&[&a, &b, &c], n_subsystems)?;
        Ok(Self { a, b, c })
    }
}

fn check_groups(groups: &[&Vec<usize>], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for g in groups {
        if g.is_empty() {
            return Err(CorrError::Index("partition groups must be non-empty".into()));
        }
        for &i in g.iter() {
            if i >= n {
                return Err(CorrError::Index(format!("subsystem {i} out of range for {n} subsystems")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(CorrError::Index(format!("subsystem {i} appears twice")));
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(CorrError::Index("partition does not cover every subsystem".into()));
    }
    Ok(())
}

/// Hermitian, positive semidefinite, unit-trace operator with subsystem structure.
#[derive(Debug, Clone, Serialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: DimList,
}

impl DensityMatrix {
    /// Validates and, if needed, repairs float noise in the spectrum.
    ///
    /// Eigenvalues in `[-1e-10, 0)` are set to zero and the trace is renormalized;
    /// anything more negative is an invariant violation.
    pub fn new(matrix: ComplexMatrix, dims: DimList) -> Result<Self> {
        dims.check_matches(&matrix)?;
        let herm = matrix.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(CorrError::InvariantViolation(format!("state is not Hermitian (error {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(CorrError::InvariantViolation(format!("state trace is {tr}, expected 1")));
        }
        let eig = hermitian_eigensystem(&matrix)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -CLAMP_TOL {
            return Err(CorrError::InvariantViolation(format!("state has negative eigenvalue {min:e}")));
        }
        let matrix = if min < 0.0 {
            let total: f64 = eig.values.iter().map(|&x| x.max(0.0)).sum();
            eig.reconstruct_with(|x| x.max(0.0) / total)
        } else {
            matrix.hermitian_part()
        };
        Ok(Self { matrix, dims })
    }

    /// Wraps the output of a trace-preserving completely positive map without re-diagonalizing.
    pub(crate) fn from_trusted(matrix: ComplexMatrix, dims: DimList) -> Self {
        debug_assert_eq!(matrix.rows(), dims.total());
        Self { matrix: matrix.hermitian_part(), dims }
    }

    pub fn maximally_mixed(dims: DimList) -> Self {
        let d = dims.total();
        Self { matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64), dims }
    }

    /// `diag(p)` on a single subsystem of dimension `p.len()`.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        Self::diagonal_with_dims(p, DimList::new(vec![p.len()])?)
    }

    pub fn diagonal_with_dims(p: &[f64], dims: DimList) -> Result<Self> {
        if p.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(CorrError::Domain("diagonal entries must be non-negative".into()));
        }
        Self::new(ComplexMatrix::from_real_diagonal(p), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &DimList {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Reduced state on `keep`.
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        Ok(Self::from_trusted(m, self.dims.select(&kept)?))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let m = crate::operator::tensor(&self.matrix, &other.matrix)?;
        Ok(Self::from_trusted(m, self.dims.concat(&other.dims)?))
    }

    /// `rho^{⊗n}` with subsystem order `(dims) x n`.
    pub fn tensor_power(&self, n: usize) -> Result<DensityMatrix> {
        let dims = self.dims.repeat(n)?;
        let m = crate::operator::tensor_power(&self.matrix, n)?;
        Ok(Self::from_trusted(m, dims))
    }

    /// `rho^{⊗n}` of a bipartite state (first `split` subsystems are `A`), reordered as `A^n B^n`.
    pub fn bipartite_power(&self, split: usize, n: usize) -> Result<DensityMatrix> {
        let m = self.dims.len();
        if split > m {
            return Err(CorrError::Index(format!("split {split} beyond {m} subsystems")));
        }
        let power = self.tensor_power(n)?;
        let a = (0..n).flat_map(|copy| (0..split).map(move |i| copy * m + i));
        let b = (0..n).flat_map(|copy| (split..m).map(move |i| copy * m + i));
        let order: Vec<usize> = a.chain(b).collect();
        power.permute(&order)
    }

    pub fn permute(&self, order: &[usize]) -> Result<DensityMatrix> {
        let (m, dims) = crate::operator::permute_subsystems(&self.matrix, &self.dims, order)?;
        Ok(Self::from_trusted(m, dims))
    }

    /// Same operator, new subsystem annotation with identical total dimension.
    pub fn with_dims(&self, dims: DimList) -> Result<DensityMatrix> {
        dims.check_matches(&self.matrix)?;
        Ok(Self { matrix: self.matrix.clone(), dims })
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// Mixture `sum_i w_i rho_i` of states with identical dims.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let first = parts.first().ok_or_else(|| CorrError::ContractViolation("empty mixture".into()))?;
        let mut acc = ComplexMatrix::zeros(first.1.dim(), first.1.dim());
        for (w, rho) in parts {
            if rho.dims != first.1.dims {
                return Err(CorrError::DimensionMismatch { expected: first.1.dim(), found: rho.dim() });
            }
            acc = &acc + &rho.matrix.scale(*w);
        }
        DensityMatrix::new(acc, first.1.dims.clone())
    }
}

/// Normalized state vector with subsystem structure.
#[derive(Debug, Clone, Serialize)]
pub struct PureState {
    vector: Vec<Complex64>,
    dims: DimList,
}

impl PureState {
    pub fn new(vector: Vec<Complex64>, dims: DimList) -> Result<Self> {
        if vector.len() != dims.total() {
            return Err(CorrError::DimensionMismatch { expected: dims.total(), found: vector.len() });
        }
        let norm: f64 = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(CorrError::InvariantViolation(format!("state vector has norm {norm}")));
        }
        Ok(Self { vector, dims })
    }

    /// Normalizes `vector` first; a zero vector is rejected.
    pub fn normalized(vector: Vec<Complex64>, dims: DimList) -> Result<Self> {
        let norm: f64 = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(CorrError::InvariantViolation("cannot normalize a zero vector".into()));
        }
        Self::new(vector.into_iter().map(|z| z / norm).collect(), dims)
    }

    pub fn from_real(amplitudes: &[f64], dims: DimList) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| c(x, 0.0)).collect(), dims)
    }

    pub fn vector(&self) -> &[Complex64] {
        &self.vector
    }

    pub fn dims(&self) -> &DimList {
        &self.dims
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(ComplexMatrix::projector(&self.vector), self.dims.clone())
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let dims = self.dims.concat(&other.dims)?;
        Ok(PureState { vector: crate::operator::kron_vec(&self.vector, &other.vector), dims })
    }

    pub fn tensor_power(&self, n: usize) -> Result<PureState> {
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor(self)?;
        }
        Ok(out)
    }
}

/// `|psi> = sum_i sqrt(lambda_i) |l_i> |r_i>` with `lambda` descending.
#[derive(Debug, Clone, Serialize)]
pub struct SchmidtForm {
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<Vec<Complex64>>,
    pub right_basis: Vec<Vec<Complex64>>,
    pub left_dims: DimList,
    pub right_dims: DimList,
}

/// Coefficients above this count toward the Schmidt rank.
pub const SCHMIDT_RANK_TOL: f64 = 1e-10;

impl SchmidtForm {
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&x| x > SCHMIDT_RANK_TOL).count()
    }

    /// The state vector in `left ⊗ right` order.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let dl = self.left_dims.total();
        let dr = self.right_dims.total();
        let mut out = vec![c(0.0, 0.0); dl * dr];
        for (k, &lam) in self.coefficients.iter().enumerate() {
            let s = lam.sqrt();
            for i in 0..dl {
                for j in 0..dr {
                    out[i * dr + j] += self.left_basis[k][i] * self.right_basis[k][j] * s;
                }
            }
        }
        out
    }
}

/// Schmidt decomposition across `cut`, via the SVD of the reshaped amplitude matrix.
pub fn schmidt(psi: &PureState, cut: &Bipartition) -> Result<SchmidtForm> {
    let n = psi.dims.len();
    Bipartition::new(cut.a.clone(), cut.b.clone(), n)?;
    let v = permute_vector(&psi.vector, &psi.dims, &cut.order());
    let left_dims = psi.dims.select(&cut.a)?;
    let right_dims = psi.dims.select(&cut.b)?;
    let (dl, dr) = (left_dims.total(), right_dims.total());
    let m = nalgebra::DMatrix::from_fn(dl, dr, |i, j| v[i * dr + j]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let mut coefficients = Vec::with_capacity(order.len());
    let mut left_basis = Vec::with_capacity(order.len());
    let mut right_basis = Vec::with_capacity(order.len());
    for &k in &order {
        let s = svd.singular_values[k];
        let mut l: Vec<Complex64> = u.column(k).iter().copied().collect();
        let mut r: Vec<Complex64> = vt.row(k).iter().copied().collect();
        let phase = l.iter().find(|z| z.norm() > 1e-8).map(|z| z.conj() / z.norm()).unwrap_or(c(1.0, 0.0));
        for z in &mut l {
            *z *= phase;
        }
        for z in &mut r {
            *z *= phase.conj();
        }
        coefficients.push(s * s);
        left_basis.push(l);
        right_basis.push(r);
    }
    Ok(SchmidtForm { coefficients, left_basis, right_basis, left_dims, right_dims })
}

/// Canonical purification `sum_i sqrt(lambda_i) |i>_Z ⊗ |v_i>_P` with the reference first.
///
/// `dim(Z) = dim(P)`; unused reference levels carry zero amplitude.
pub fn purify(rho: &DensityMatrix) -> Result<PureState> {
    let d = rho.dim();
    let eig = hermitian_eigensystem(rho.matrix())?;
    let mut vector = vec![c(0.0, 0.0); d * d];
    for (i, &lam) in eig.values.iter().enumerate() {
        let w = lam.max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for p in 0..d {
            vector[i * d + p] = eig.vectors.get(p, i) * w;
        }
    }
    let dims = DimList::new(vec![d])?.concat(rho.dims())?;
    PureState::normalized(vector, dims)
}

/// Kinds of random states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomStateKind {
    HaarPure,
    /// Partial trace of a Haar pure state over an ancilla; `None` uses the system dimension.
    InducedMixed { ancilla_dim: Option<usize> },
    /// Diagonal state with spectrum uniform on the simplex.
    Diagonal,
}

/// Haar-random pure state, deterministic in `(seed, index)`.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dims: &DimList) -> PureState {
    let v = gaussian_vector(rng, dims.total());
    PureState::normalized(v, dims.clone()).expect("gaussian vector is non-zero with probability one")
}

pub fn random_induced<R: Rng + ?Sized>(rng: &mut R, dims: &DimList, ancilla_dim: Option<usize>) -> Result<DensityMatrix> {
    let k = ancilla_dim.unwrap_or_else(|| dims.total());
    let joint_dims = dims.concat(&DimList::new(vec![k])?)?;
    let psi = random_pure(rng, &joint_dims);
    let keep: Vec<usize> = (0..dims.len()).collect();
    let m = partial_trace(&ComplexMatrix::projector(psi.vector()), &joint_dims, &keep)?;
    Ok(DensityMatrix::from_trusted(m, dims.clone()))
}

pub fn random_diagonal<R: Rng + ?Sized>(rng: &mut R, dims: &DimList) -> DensityMatrix {
    let p = simplex_point(rng, dims.total());
    DensityMatrix::from_trusted(ComplexMatrix::from_real_diagonal(&p), dims.clone())
}

/// Output of [`random_state`].
#[derive(Debug, Clone)]
pub enum RandomState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl RandomState {
    pub fn density(&self) -> DensityMatrix {
        match self {
            RandomState::Pure(p) => p.density(),
            RandomState::Mixed(m) => m.clone(),
        }
    }
}

/// Random state for sample `index` of the stream seeded by `seed`.
pub fn random_state(kind: RandomStateKind, dims: &DimList, seed: u64, index: u64) -> Result<RandomState> {
    let mut rng = stream(seed, index);
    Ok(match kind {
        RandomStateKind::HaarPure => RandomState::Pure(random_pure(&mut rng, dims)),
        RandomStateKind::InducedMixed { ancilla_dim } => RandomState::Mixed(random_induced(&mut rng, dims, ancilla_dim)?),
        RandomStateKind::Diagonal => RandomState::Mixed(random_diagonal(&mut rng, dims)),
    })
}
