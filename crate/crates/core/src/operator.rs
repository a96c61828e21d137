//! Dense complex-matrix substrate.
//!
//! Every operator in the toolkit (states, unitaries, projectors, sampled
//! Chernoff variables) is a [`ComplexMatrix`]. Subsystem structure is carried
//! separately as a [`DimList`]; the left factor of a Kronecker product is the
//! first subsystem, so basis index `|i_0 i_1 ... i_{k-1}>` is the usual
//! row-major mixed-radix number.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CorrError, Result};

/// Default cap on the ambient dimension of any operator we build.
pub const DEFAULT_DIM_CAP: usize = 1 << 14;

/// Environment variable that overrides [`DEFAULT_DIM_CAP`].
pub const DIM_CAP_ENV: &str = "CORRSIM_DIM_CAP";

/// Tolerance on `max |m - m^dagger|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Current dimension cap: `CORRSIM_DIM_CAP` if set and parseable, else the default.
pub fn dim_cap() -> usize {
    std::env::var(DIM_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_DIM_CAP)
}

/// Fails with [`CorrError::DimensionCap`] if `dim` is above the current cap.
pub fn check_dim_cap(dim: usize) -> Result<()> {
    let cap = dim_cap();
    if dim > cap {
        Err(CorrError::DimensionCap { dim, cap })
    } else {
        Ok(())
    }
}

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}x{} ", self.rows(), self.cols())?;
        fmt::Debug::fmt(&self.0, f)
    }
}

impl ComplexMatrix {
    /// Builds from row-major entries; rejects wrong lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(CorrError::InvariantViolation("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(CorrError::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CorrError::InvariantViolation("non-finite matrix entry".into()));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let cols = rows.first().map_or(0, |row| row.len());
        let entries: Vec<Complex64> = rows.iter().flat_map(|row| row.iter().map(|&x| c(x, 0.0))).collect();
        Self::from_row_major(r, cols, &entries)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { c(diag[i], 0.0) } else { c(0.0, 0.0) })
    }

    /// `|v><v|` for a column vector `v`.
    pub fn projector(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    /// Single column matrix holding `v`.
    pub fn column(v: &[Complex64]) -> Self {
        Self(DMatrix::from_column_slice(v.len(), 1, v))
    }

    pub fn from_nalgebra(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.0[(i, j)] = value;
    }

    /// Row-major copy of the entries.
    pub fn row_major_entries(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn column_vec(&self, j: usize) -> Vec<Complex64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// `max |self - other|` entrywise.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `(m + m^dagger) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = self.0.adjoint() * &self.0;
        Self(prod).max_abs_diff(&Self::identity(self.rows()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// `self * rho * self^dagger`
    pub fn conjugate(&self, rho: &Self) -> Self {
        Self(&self.0 * &rho.0 * self.0.adjoint())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Real diagonal, dropping imaginary parts.
    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.rows().min(self.cols())).map(|i| self.0[(i, i)].re).collect()
    }

    /// Largest `|off-diagonal|` entry.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                if i != j {
                    worst = worst.max(self.0[(i, j)].norm());
                }
            }
        }
        worst
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// JSON literal `{ "rows": n, "cols": m, "entries": [[re, im], ...] }`, row-major.
///
/// An optional `dims` list annotates subsystem structure for state files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixLiteral {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
}

impl MatrixLiteral {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let entries: Vec<Complex64> = self.entries.iter().map(|&[re, im]| c(re, im)).collect();
        ComplexMatrix::from_row_major(self.rows, self.cols, &entries)
    }
}

impl From<&ComplexMatrix> for MatrixLiteral {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixLiteral {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.row_major_entries().into_iter().map(|z| [z.re, z.im]).collect(),
            dims: None,
        }
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixLiteral::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let lit = MatrixLiteral::deserialize(deserializer)?;
        lit.to_matrix().map_err(serde::de::Error::custom)
    }
}

/// Ordered subsystem dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimList(Vec<usize>);

impl DimList {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(CorrError::InvariantViolation("empty dimension list".into()));
        }
        if dims.contains(&0) {
            return Err(CorrError::InvariantViolation("subsystem dimension must be positive".into()));
        }
        let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        match total {
            Some(t) => check_dim_cap(t)?,
            None => return Err(CorrError::DimensionCap { dim: usize::MAX, cap: dim_cap() }),
        }
        Ok(Self(dims))
    }

    /// `k` copies of a `d`-level system.
    pub fn uniform(d: usize, k: usize) -> Result<Self> {
        Self::new(vec![d; k])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Product of the dimensions at `indices`.
    pub fn product_of(&self, indices: &[usize]) -> usize {
        indices.iter().map(|&i| self.0[i]).product()
    }

    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        Self::new(indices.iter().map(|&i| self.0[i]).collect())
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self::new(v)
    }

    /// Repeats the list `n` times: `[a, b] -> [a, b, a, b, ...]`.
    pub fn repeat(&self, n: usize) -> Result<Self> {
        Self::new(self.0.iter().copied().cycle().take(self.0.len() * n).collect())
    }

    pub fn check_matches(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() {
            return Err(CorrError::ContractViolation("operator must be square".into()));
        }
        if self.total() != m.rows() {
            return Err(CorrError::DimensionMismatch { expected: self.total(), found: m.rows() });
        }
        Ok(())
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.0.len()];
        for (k, &d) in self.0.iter().enumerate().rev() {
            out[k] = index % d;
            index /= d;
        }
        out
    }
}

impl fmt::Display for DimList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Kronecker product; left factor is the first subsystem.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    match (rows, cols) {
        (Some(r), Some(cl)) => {
            check_dim_cap(r.max(cl))?;
        }
        _ => return Err(CorrError::DimensionCap { dim: usize::MAX, cap: dim_cap() }),
    }
    Ok(ComplexMatrix(a.0.kronecker(&b.0)))
}

/// Left-folded Kronecker product of a non-empty list.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> Result<ComplexMatrix> {
    let mut iter = factors.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| CorrError::ContractViolation("tensor of an empty list".into()))?
        .clone();
    iter.try_fold(first, |acc, m| tensor(&acc, m))
}

/// `m^{⊗n}`
pub fn tensor_power(m: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Ok(ComplexMatrix::identity(1));
    }
    tensor_all(std::iter::repeat_n(m, n))
}

pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn normalize_indices(indices: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&i| i >= n) {
        return Err(CorrError::Index(format!("subsystem index {bad} out of range for {n} subsystems")));
    }
    Ok(sorted)
}

/// Partial trace keeping the subsystems in `keep` (in ascending order).
pub fn partial_trace(m: &ComplexMatrix, dims: &DimList, keep: &[usize]) -> Result<ComplexMatrix> {
    dims.check_matches(m)?;
    let keep = normalize_indices(keep, dims.len())?;
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_dim = dims.product_of(&keep);
    let traced_dim = dims.product_of(&traced);

    // groups[t] lists (full index, kept index) for every full index whose traced digits encode t
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(kept_dim); traced_dim];
    for full in 0..dims.total() {
        let digits = dims.digits(full);
        let k = keep.iter().fold(0, |acc, &i| acc * dims.0[i] + digits[i]);
        let t = traced.iter().fold(0, |acc, &i| acc * dims.0[i] + digits[i]);
        groups[t].push((full, k));
    }
    let mut out = DMatrix::<Complex64>::zeros(kept_dim, kept_dim);
    for group in &groups {
        for &(fj, kj) in group {
            for &(fi, ki) in group {
                out[(ki, kj)] += m.0[(fi, fj)];
            }
        }
    }
    Ok(ComplexMatrix(out))
}

/// Reorders subsystems: new subsystem `k` is old subsystem `order[k]`.
pub fn permute_subsystems(m: &ComplexMatrix, dims: &DimList, order: &[usize]) -> Result<(ComplexMatrix, DimList)> {
    dims.check_matches(m)?;
    let n = dims.len();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&o| o >= n || std::mem::replace(&mut seen[o], true)) {
        return Err(CorrError::Index(format!("{order:?} is not a permutation of {n} subsystems")));
    }
    let new_dims = DimList::new(order.iter().map(|&o| dims.0[o]).collect())?;
    let map = permutation_map(dims, order);
    let total = dims.total();
    let mut out = DMatrix::<Complex64>::zeros(total, total);
    for (old_j, &new_j) in map.iter().enumerate() {
        for (old_i, &new_i) in map.iter().enumerate() {
            out[(new_i, new_j)] = m.0[(old_i, old_j)];
        }
    }
    Ok((ComplexMatrix(out), new_dims))
}

/// Same reordering as [`permute_subsystems`] applied to a state vector.
pub fn permute_vector(v: &[Complex64], dims: &DimList, order: &[usize]) -> Vec<Complex64> {
    let map = permutation_map(dims, order);
    let mut out = vec![c(0.0, 0.0); v.len()];
    for (old, &new) in map.iter().enumerate() {
        out[new] = v[old];
    }
    out
}

// old flat index -> new flat index
fn permutation_map(dims: &DimList, order: &[usize]) -> Vec<usize> {
    (0..dims.total())
        .map(|full| {
            let digits = dims.digits(full);
            order.iter().fold(0, |acc, &o| acc * dims.0[o] + digits[o])
        })
        .collect()
}

/// Partial transpose of the second factor of a `d_a x d_b` operator.
pub fn partial_transpose_b(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != d_a * d_b {
        return Err(CorrError::DimensionMismatch { expected: d_a * d_b, found: m.rows() });
    }
    Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |r, col| {
        let (i, j) = (r / d_b, r % d_b);
        let (k, l) = (col / d_b, col % d_b);
        m.0[(i * d_b + l, k * d_b + j)]
    }))
}

/// `(A ⊗ B) m` on a `d_a x d_b` space, where a missing factor is the identity.
pub fn local_left_multiply(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    a: Option<&ComplexMatrix>,
    b: Option<&ComplexMatrix>,
) -> ComplexMatrix {
    let cols = m.cols();
    let mut cur = m.0.clone();
    if let Some(a) = a {
        let mut next = DMatrix::<Complex64>::zeros(d_a * d_b, cols);
        for col in 0..cols {
            for i in 0..d_a {
                for k in 0..d_a {
                    let coeff = a.0[(i, k)];
                    if coeff.re == 0.0 && coeff.im == 0.0 {
                        continue;
                    }
                    for j in 0..d_b {
                        next[(i * d_b + j, col)] += coeff * cur[(k * d_b + j, col)];
                    }
                }
            }
        }
        cur = next;
    }
    if let Some(b) = b {
        let mut next = DMatrix::<Complex64>::zeros(d_a * d_b, cols);
        for col in 0..cols {
            for i in 0..d_a {
                for j in 0..d_b {
                    let mut acc = c(0.0, 0.0);
                    for l in 0..d_b {
                        acc += b.0[(j, l)] * cur[(i * d_b + l, col)];
                    }
                    next[(i * d_b + j, col)] = acc;
                }
            }
        }
        cur = next;
    }
    ComplexMatrix(cur)
}

/// `(A ⊗ B) m (A ⊗ B)^dagger` without forming the Kronecker product.
pub fn local_conjugate(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    a: Option<&ComplexMatrix>,
    b: Option<&ComplexMatrix>,
) -> ComplexMatrix {
    let left = local_left_multiply(m, d_a, d_b, a, b);
    local_left_multiply(&left.adjoint(), d_a, d_b, a, b).adjoint()
}

/// Eigenvalues (descending) and the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column_vec(k)
    }

    /// `V diag(f(λ)) V^dagger`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors.0;
        let mut scaled = v.clone();
        for k in 0..n {
            let s = f(self.values[k]);
            scaled.column_mut(k).scale_mut(s);
        }
        ComplexMatrix(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// Smallest gap between consecutive eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.values.windows(2).map(|w| (w[0] - w[1]).abs()).fold(f64::INFINITY, f64::min)
    }
}

/// Hermitian eigendecomposition with descending eigenvalues and a fixed phase convention.
///
/// The input is symmetrized as `(m + m^dagger)/2` after the Hermiticity check.
/// Each eigenvector's first component with modulus above `1e-8` is made real positive.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(CorrError::ContractViolation("eigensystem of a non-square matrix".into()));
    }
    let err = m.hermiticity_error();
    if err > HERMITIAN_TOL {
        return Err(CorrError::ContractViolation(format!("matrix is not Hermitian (max |m - m†| = {err:e})")));
    }
    let sym = m.hermitian_part();
    let eig = sym.0.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let phase = col
            .iter()
            .find(|z| z.norm() > 1e-8)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(c(1.0, 0.0));
        for r in 0..n {
            vectors[(r, dst)] = col[r] * phase;
        }
    }
    Ok(Eigensystem { values, vectors: ComplexMatrix(vectors) })
}

pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(CorrError::ContractViolation("eigenvalues of a non-square matrix".into()));
    }
    let err = m.hermiticity_error();
    if err > HERMITIAN_TOL {
        return Err(CorrError::ContractViolation(format!("matrix is not Hermitian (max |m - m†| = {err:e})")));
    }
    let mut values: Vec<f64> = if m.max_off_diagonal() == 0.0 {
        m.real_diagonal()
    } else {
        m.hermitian_part().0.symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues_hermitian(m)?.last().copied().unwrap_or(0.0))
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    m.0.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Sum of singular values. Hermitian inputs take the eigenvalue path.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_square() && m.is_hermitian(HERMITIAN_TOL) {
        if let Ok(values) = eigenvalues_hermitian(m) {
            return values.iter().map(|x| x.abs()).sum();
        }
    }
    singular_values(m).iter().sum()
}

/// Whether `lo <= x <= hi` in the Loewner order, up to `tol` on the smallest eigenvalues.
pub fn operator_in_interval(x: &ComplexMatrix, lo: &ComplexMatrix, hi: &ComplexMatrix, tol: f64) -> Result<bool> {
    if x.rows() != lo.rows() || x.rows() != hi.rows() || !x.is_square() || !lo.is_square() || !hi.is_square() {
        return Err(CorrError::DimensionMismatch { expected: x.rows(), found: lo.rows().max(hi.rows()) });
    }
    Ok(min_eigenvalue(&(x - lo))? >= -tol && min_eigenvalue(&(hi - x))? >= -tol)
}

/// Principal square root of a PSD operator; eigenvalues below zero are clamped.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eigensystem(m)?.reconstruct_with(|x| x.max(0.0).sqrt()))
}

/// Orthogonal projector onto the columns of an isometry `v` (`v v^dagger`).
pub fn range_projector(v: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(&v.0 * v.0.adjoint())
}

/// Builds an isometry whose columns are the given orthonormal vectors.
pub fn isometry_from_columns(dim: usize, columns: &[Vec<Complex64>]) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, columns.len(), |i, j| columns[j][i])
}
