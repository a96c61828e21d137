//! Mixed-unitary and Kraus channels, noise costs, decorrelation and
//! disentanglement predicates, and local-instrument monotonicity.
//!
//! A bipartite channel acts on `A ⊗ B` with `dim A = d_a`, `dim B = d_b`. States
//! handed to a channel must have a subsystem prefix whose dimensions multiply
//! to `d_a`; the remaining subsystems form `B`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entropy::{mutual_information, shannon_entropy, spectral_entropy, von_neumann_entropy};
use crate::error::{CorrError, Result};
use crate::operator::{
    c, eigenvalues_hermitian, local_conjugate, partial_transpose_b, tensor, trace_norm, ComplexMatrix, DimList,
    MatrixLiteral,
};
use crate::states::{purify, Bipartition, DensityMatrix};

pub const PROBABILITY_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-9;
pub const KRAUS_TOL: f64 = 1e-9;
pub const PPT_TOL: f64 = 1e-9;

/// How the unitaries of an ensemble factor across the `A|B` cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Locality {
    #[serde(rename = "A_LUR")]
    ALur,
    #[serde(rename = "B_LUR")]
    BLur,
    #[serde(rename = "LUR")]
    Lur,
    #[serde(rename = "COLUR")]
    Colur,
    #[serde(rename = "GENERAL_UNITARY")]
    GeneralUnitary,
}

impl Locality {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "A_LUR" | "a_lur" => Ok(Locality::ALur),
            "B_LUR" | "b_lur" => Ok(Locality::BLur),
            "LUR" | "lur" => Ok(Locality::Lur),
            "COLUR" | "colur" => Ok(Locality::Colur),
            "GENERAL_UNITARY" | "general" | "GENERAL" => Ok(Locality::GeneralUnitary),
            other => Err(CorrError::Parse(format!("unknown locality `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
enum ElementOp {
    /// `a ⊗ b`, a missing factor is the identity
    Local { a: Option<ComplexMatrix>, b: Option<ComplexMatrix> },
    Global(ComplexMatrix),
}

/// `tau -> sum_i p_i U_i tau U_i^dagger` over a declared `A|B` cut.
#[derive(Debug, Clone)]
pub struct MixedUnitaryChannel {
    probabilities: Vec<f64>,
    ops: Vec<ElementOp>,
    d_a: usize,
    d_b: usize,
    locality: Locality,
    n_label: usize,
    label: String,
}

/// Short description of a channel for reports.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ChannelSummary {
    pub label: String,
    pub locality: Locality,
    pub elements: usize,
    pub d_a: usize,
    pub d_b: usize,
    pub n_label: usize,
}

fn check_probabilities(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(CorrError::InvariantViolation("empty ensemble".into()));
    }
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(CorrError::InvariantViolation("ensemble probabilities must be non-negative".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(CorrError::InvariantViolation(format!("ensemble probabilities sum to {total}")));
    }
    Ok(())
}

fn check_unitary(u: &ComplexMatrix, dim: usize, what: &str) -> Result<()> {
    if u.rows() != dim || !u.is_square() {
        return Err(CorrError::DimensionMismatch { expected: dim, found: u.rows() });
    }
    let err = u.unitarity_error();
    if err > UNITARY_TOL {
        return Err(CorrError::InvariantViolation(format!("{what} is not unitary (error {err:e})")));
    }
    Ok(())
}

/// Index `k` such that the first `k` subsystems multiply to `d_a`.
pub fn split_index(dims: &DimList, d_a: usize) -> Result<usize> {
    let mut acc = 1;
    for (k, &d) in dims.as_slice().iter().enumerate() {
        if acc == d_a {
            return Ok(k);
        }
        acc *= d;
    }
    if acc == d_a {
        return Ok(dims.len());
    }
    Err(CorrError::DimensionMismatch { expected: d_a, found: acc })
}

impl MixedUnitaryChannel {
    fn build(
        probabilities: Vec<f64>,
        ops: Vec<ElementOp>,
        d_a: usize,
        d_b: usize,
        locality: Locality,
    ) -> Result<Self> {
        check_probabilities(&probabilities)?;
        for op in &ops {
            match op {
                ElementOp::Local { a, b } => {
                    if let Some(a) = a {
                        check_unitary(a, d_a, "A-side unitary")?;
                    }
                    if let Some(b) = b {
                        check_unitary(b, d_b, "B-side unitary")?;
                    }
                }
                ElementOp::Global(u) => check_unitary(u, d_a * d_b, "unitary")?,
            }
        }
        Ok(Self { probabilities, ops, d_a, d_b, locality, n_label: 1, label: String::new() })
    }

    /// Noise on `A` only: `U_i ⊗ 1_B`.
    pub fn a_lur(d_b: usize, ensemble: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let d_a = ensemble.first().map_or(1, |(_, u)| u.rows());
        let (p, ops) = ensemble.into_iter().map(|(p, u)| (p, ElementOp::Local { a: Some(u), b: None })).unzip();
        Self::build(p, ops, d_a, d_b, Locality::ALur)
    }

    /// Noise on `B` only: `1_A ⊗ V_i`.
    pub fn b_lur(d_a: usize, ensemble: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let d_b = ensemble.first().map_or(1, |(_, u)| u.rows());
        let (p, ops) = ensemble.into_iter().map(|(p, v)| (p, ElementOp::Local { a: None, b: Some(v) })).unzip();
        Self::build(p, ops, d_a, d_b, Locality::BLur)
    }

    /// Coordinated product unitaries `U_i ⊗ V_i` sharing the random index.
    pub fn colur(ensemble: Vec<(f64, ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        let (d_a, d_b) = ensemble.first().map_or((1, 1), |(_, u, v)| (u.rows(), v.rows()));
        let mut p = Vec::with_capacity(ensemble.len());
        let mut ops = Vec::with_capacity(ensemble.len());
        for (pi, u, v) in ensemble {
            p.push(pi);
            ops.push(ElementOp::Local { a: Some(u), b: Some(v) });
        }
        Self::build(p, ops, d_a, d_b, Locality::Colur)
    }

    /// Independent local noise: an `A`-LUR stage followed by a `B`-LUR stage.
    pub fn lur(a_stage: &MixedUnitaryChannel, b_stage: &MixedUnitaryChannel) -> Result<Self> {
        if a_stage.locality != Locality::ALur || b_stage.locality != Locality::BLur {
            return Err(CorrError::ContractViolation("LUR needs an A_LUR stage and a B_LUR stage".into()));
        }
        if a_stage.d_a != b_stage.d_a || a_stage.d_b != b_stage.d_b {
            return Err(CorrError::DimensionMismatch { expected: a_stage.dim(), found: b_stage.dim() });
        }
        let mut p = Vec::new();
        let mut ops = Vec::new();
        for (pa, oa) in a_stage.probabilities.iter().zip(&a_stage.ops) {
            for (pb, ob) in b_stage.probabilities.iter().zip(&b_stage.ops) {
                let (ElementOp::Local { a, .. }, ElementOp::Local { b, .. }) = (oa, ob) else {
                    unreachable!("LUR stages are local");
                };
                p.push(pa * pb);
                ops.push(ElementOp::Local { a: a.clone(), b: b.clone() });
            }
        }
        Self::build(p, ops, a_stage.d_a, a_stage.d_b, Locality::Lur)
    }

    /// Arbitrary unitaries on `A ⊗ B`.
    pub fn general(d_a: usize, d_b: usize, ensemble: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let (p, ops) = ensemble.into_iter().map(|(p, u)| (p, ElementOp::Global(u))).unzip();
        Self::build(p, ops, d_a, d_b, Locality::GeneralUnitary)
    }

    pub fn identity(d_a: usize, d_b: usize) -> Self {
        Self::build(vec![1.0], vec![ElementOp::Local { a: None, b: None }], d_a, d_b, Locality::Colur)
            .expect("identity channel is valid")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_n_label(mut self, n: usize) -> Self {
        self.n_label = n;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn locality(&self) -> Locality {
        self.locality
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn summary(&self) -> ChannelSummary {
        ChannelSummary {
            label: self.label.clone(),
            locality: self.locality,
            elements: self.len(),
            d_a: self.d_a,
            d_b: self.d_b,
            n_label: self.n_label,
        }
    }

    /// `U_i` as a full `d_a d_b` matrix.
    pub fn unitary(&self, i: usize) -> ComplexMatrix {
        match &self.ops[i] {
            ElementOp::Global(u) => u.clone(),
            ElementOp::Local { a, b } => {
                let a = a.clone().unwrap_or_else(|| ComplexMatrix::identity(self.d_a));
                let b = b.clone().unwrap_or_else(|| ComplexMatrix::identity(self.d_b));
                tensor(&a, &b).expect("factors fit the cap")
            }
        }
    }

    /// A-side factor of element `i`, if the element is local.
    pub fn a_factor(&self, i: usize) -> Option<ComplexMatrix> {
        match &self.ops[i] {
            ElementOp::Local { a, .. } => Some(a.clone().unwrap_or_else(|| ComplexMatrix::identity(self.d_a))),
            ElementOp::Global(_) => None,
        }
    }

    pub fn b_factor(&self, i: usize) -> Option<ComplexMatrix> {
        match &self.ops[i] {
            ElementOp::Local { b, .. } => Some(b.clone().unwrap_or_else(|| ComplexMatrix::identity(self.d_b))),
            ElementOp::Global(_) => None,
        }
    }

    /// Same channel with the ensemble reordered: element `k` becomes old element `order[k]`.
    pub fn relabeled(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() || order.iter().any(|&o| o >= self.len() || std::mem::replace(&mut seen[o], true)) {
            return Err(CorrError::Index("relabeling is not a permutation".into()));
        }
        let mut out = self.clone();
        out.probabilities = order.iter().map(|&o| self.probabilities[o]).collect();
        out.ops = order.iter().map(|&o| self.ops[o].clone()).collect();
        Ok(out)
    }

    fn check_input(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(CorrError::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        split_index(rho.dims(), self.d_a).map(|_| ())
    }

    fn conjugate_element(&self, i: usize, m: &ComplexMatrix) -> ComplexMatrix {
        match &self.ops[i] {
            ElementOp::Local { a, b } => local_conjugate(m, self.d_a, self.d_b, a.as_ref(), b.as_ref()),
            ElementOp::Global(u) => u.conjugate(m),
        }
    }

    /// `S[(i,k),(i',k')] = sum_n p_n U_n[i,i'] conj(U_n[k,k'])` when every element acts on `A` alone.
    fn a_superoperator(&self) -> Option<nalgebra::DMatrix<Complex64>> {
        let d = self.d_a;
        let mut s = nalgebra::DMatrix::<Complex64>::zeros(d * d, d * d);
        for (op, &p) in self.ops.iter().zip(&self.probabilities) {
            let ElementOp::Local { a: Some(u), b: None } = op else {
                return None;
            };
            let u = u.as_nalgebra();
            for i in 0..d {
                for ip in 0..d {
                    let x = u[(i, ip)] * p;
                    if x.re == 0.0 && x.im == 0.0 {
                        continue;
                    }
                    for k in 0..d {
                        for kp in 0..d {
                            s[(i * d + k, ip * d + kp)] += x * u[(k, kp)].conj();
                        }
                    }
                }
            }
        }
        Some(s)
    }

    fn apply_a_superoperator(&self, s: &nalgebra::DMatrix<Complex64>, m: &ComplexMatrix) -> ComplexMatrix {
        let (da, db) = (self.d_a, self.d_b);
        let mm = m.as_nalgebra();
        let blocks = nalgebra::DMatrix::from_fn(da * da, db * db, |r, col| {
            let (i, k) = (r / da, r % da);
            let (j, l) = (col / db, col % db);
            mm[(i * db + j, k * db + l)]
        });
        let mapped = s * blocks;
        ComplexMatrix::from_fn(da * db, da * db, |r, col| {
            let (i, j) = (r / db, r % db);
            let (k, l) = (col / db, col % db);
            mapped[(i * da + k, j * db + l)]
        })
    }

    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        // large A-only ensembles are cheaper as one superoperator on A
        let (da, n, dim) = (self.d_a as f64, self.len() as f64, self.dim() as f64);
        let elementwise = 2.0 * n * da * dim * dim;
        let superop = da.powi(4) * (n + (self.d_b * self.d_b) as f64);
        if n > 1.0 && superop < elementwise && m.rows() == self.dim() && m.cols() == self.dim() {
            if let Some(s) = self.a_superoperator() {
                return self.apply_a_superoperator(&s, m);
            }
        }
        let mut acc = ComplexMatrix::zeros(m.rows(), m.cols());
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            acc = &acc + &self.conjugate_element(i, m).scale(p);
        }
        acc
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_input(rho)?;
        Ok(DensityMatrix::from_trusted(self.apply_matrix(rho.matrix()), rho.dims().clone()))
    }

    pub fn kraus_operators(&self) -> Vec<ComplexMatrix> {
        (0..self.len()).map(|i| self.unitary(i).scale(self.probabilities[i].sqrt())).collect()
    }

    /// Environment state `W_ij = sqrt(p_i p_j) tr(U_j^dagger U_i rho)`.
    pub fn environment_gram(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.check_input(rho)?;
        let n = self.len();
        let k = split_index(rho.dims(), self.d_a)?;
        let all_local = self.ops.iter().all(|op| matches!(op, ElementOp::Local { .. }));
        let only_a = all_local && self.ops.iter().all(|op| matches!(op, ElementOp::Local { b: None, .. }));
        let only_b = all_local && self.ops.iter().all(|op| matches!(op, ElementOp::Local { a: None, .. }));

        let rho_a = if only_a { Some(rho.marginal(&(0..k).collect::<Vec<_>>())?) } else { None };
        let rho_b = if only_b { Some(rho.marginal(&(k..rho.dims().len()).collect::<Vec<_>>())?) } else { None };

        let mut w = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let value = match (&self.ops[i], &self.ops[j]) {
                    (ElementOp::Local { a: ai, b: bi }, ElementOp::Local { a: aj, b: bj }) => {
                        let x = product_adjoint(aj.as_ref(), ai.as_ref(), self.d_a);
                        let y = product_adjoint(bj.as_ref(), bi.as_ref(), self.d_b);
                        if let Some(rho_a) = &rho_a {
                            x.trace_product(rho_a.matrix())
                        } else if let Some(rho_b) = &rho_b {
                            y.trace_product(rho_b.matrix())
                        } else {
                            trace_local_product(&x, &y, rho.matrix(), self.d_a, self.d_b)
                        }
                    }
                    _ => (&self.unitary(j).adjoint() * &self.unitary(i)).trace_product(rho.matrix()),
                };
                let v = value * (self.probabilities[i] * self.probabilities[j]).sqrt();
                w.set(i, j, v);
                w.set(j, i, v.conj());
            }
        }
        Ok(w)
    }

    /// Entropy exchange, via the `N x N` environment Gram matrix when `N < d^2`,
    /// otherwise through an explicit purification.
    pub fn entropy_exchange(&self, rho: &DensityMatrix) -> Result<f64> {
        if self.len() < self.dim() * self.dim() {
            spectral_entropy(&self.environment_gram(rho)?)
        } else {
            entropy_exchange_purified(&self.kraus_operators(), rho)
        }
    }

    pub fn noise_costs(&self, rho: &DensityMatrix) -> Result<NoiseCost> {
        let cost = NoiseCost {
            log_n: (self.len() as f64).log2(),
            shannon: shannon_entropy(&self.probabilities),
            entropy_exchange: self.entropy_exchange(rho)?,
        };
        cost.check_chain()?;
        Ok(cost)
    }

    /// `||R(rho) - omega_A ⊗ omega_B||_1`, with the output's own marginals as default reference.
    pub fn epsilon_decorrelates(&self, rho: &DensityMatrix, reference: Option<&DensityMatrix>) -> Result<Decorrelation> {
        let out = self.apply(rho)?;
        decorrelation_of(&out, self.d_a, reference)
    }

    pub fn epsilon_disentangles(&self, rho: &DensityMatrix) -> Result<PptReport> {
        let out = self.apply(rho)?;
        ppt_check(out.matrix(), self.d_a, self.d_b)
    }
}

fn product_adjoint(left: Option<&ComplexMatrix>, right: Option<&ComplexMatrix>, d: usize) -> ComplexMatrix {
    match (left, right) {
        (None, None) => ComplexMatrix::identity(d),
        (Some(l), None) => l.adjoint(),
        (None, Some(r)) => r.clone(),
        (Some(l), Some(r)) => &l.adjoint() * r,
    }
}

/// `tr((x ⊗ y) m)` on a `d_a x d_b` space.
fn trace_local_product(x: &ComplexMatrix, y: &ComplexMatrix, m: &ComplexMatrix, d_a: usize, d_b: usize) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for i in 0..d_a {
        for k in 0..d_a {
            let xik = x.get(i, k);
            if xik.re == 0.0 && xik.im == 0.0 {
                continue;
            }
            for j in 0..d_b {
                for l in 0..d_b {
                    acc += xik * y.get(j, l) * m.get(k * d_b + l, i * d_b + j);
                }
            }
        }
    }
    acc
}

/// Decorrelation distance together with the product state it was measured against.
#[derive(Debug, Clone, Serialize)]
pub struct Decorrelation {
    pub achieved_eps: f64,
    pub product_used: DensityMatrix,
}

/// `||rho - omega_A ⊗ omega_B||_1` for a bipartite state whose `A` part has dimension `d_a`.
pub fn decorrelation_of(rho: &DensityMatrix, d_a: usize, reference: Option<&DensityMatrix>) -> Result<Decorrelation> {
    let product = match reference {
        Some(r) => {
            if r.dim() != rho.dim() {
                return Err(CorrError::DimensionMismatch { expected: rho.dim(), found: r.dim() });
            }
            r.clone()
        }
        None => {
            let k = split_index(rho.dims(), d_a)?;
            let n = rho.dims().len();
            let a = rho.marginal(&(0..k).collect::<Vec<_>>())?;
            let b = rho.marginal(&(k..n).collect::<Vec<_>>())?;
            a.tensor(&b)?
        }
    };
    Ok(Decorrelation { achieved_eps: trace_norm(&(rho.matrix() - product.matrix())), product_used: product })
}

/// Whether a PPT verdict is a separability certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PptCertification {
    /// `2 x 2`, `2 x 3` or `3 x 2`: PPT is equivalent to separability.
    Exact,
    /// Larger dimensions: PPT is only necessary.
    NecessaryOnly,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct PptReport {
    pub is_ppt: bool,
    pub min_eigenvalue: f64,
    pub certification: PptCertification,
}

impl PptReport {
    pub fn certifies_separable(&self) -> bool {
        self.is_ppt && self.certification == PptCertification::Exact
    }
}

pub fn ppt_certifying_dims(d_a: usize, d_b: usize) -> bool {
    matches!((d_a, d_b), (2, 2) | (2, 3) | (3, 2))
}

/// Partial-transpose test on `B`; `is_ppt` when the smallest eigenvalue is at least `-1e-9`.
pub fn ppt_check(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<PptReport> {
    let pt = partial_transpose_b(m, d_a, d_b)?;
    let min = eigenvalues_hermitian(&pt)?.last().copied().unwrap_or(0.0);
    Ok(PptReport {
        is_ppt: min >= -PPT_TOL,
        min_eigenvalue: min,
        certification: if ppt_certifying_dims(d_a, d_b) {
            PptCertification::Exact
        } else {
            PptCertification::NecessaryOnly
        },
    })
}

/// `(log N, H(p), S_e)` for a channel–state pair, in bits.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Default)]
pub struct NoiseCost {
    pub log_n: f64,
    pub shannon: f64,
    pub entropy_exchange: f64,
}

impl NoiseCost {
    /// `log N >= H(p) >= S_e` with tolerances `1e-9` and `2e-9`.
    pub fn check_chain(&self) -> Result<()> {
        if self.log_n < self.shannon - 1e-9 || self.shannon < self.entropy_exchange - 2e-9 {
            return Err(CorrError::InternalConsistency(format!(
                "noise cost chain violated: log N = {}, H(p) = {}, S_e = {}",
                self.log_n, self.shannon, self.entropy_exchange
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &NoiseCost) -> NoiseCost {
        NoiseCost {
            log_n: self.log_n + other.log_n,
            shannon: self.shannon + other.shannon,
            entropy_exchange: self.entropy_exchange + other.entropy_exchange,
        }
    }
}

/// General CPTP map given by Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    unital: bool,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| CorrError::InvariantViolation("no Kraus operators".into()))?;
        let d_in = first.cols();
        let d_out = first.rows();
        let mut completeness = ComplexMatrix::zeros(d_in, d_in);
        let mut unitality = ComplexMatrix::zeros(d_out, d_out);
        for k in &kraus {
            if k.cols() != d_in || k.rows() != d_out {
                return Err(CorrError::DimensionMismatch { expected: d_in, found: k.cols() });
            }
            completeness = &completeness + &(&k.adjoint() * k);
            unitality = &unitality + &(k * &k.adjoint());
        }
        let err = completeness.max_abs_diff(&ComplexMatrix::identity(d_in));
        if err > KRAUS_TOL {
            return Err(CorrError::InvariantViolation(format!("Kraus operators are not trace preserving (error {err:e})")));
        }
        let unital = d_in == d_out && unitality.max_abs_diff(&ComplexMatrix::identity(d_out)) <= KRAUS_TOL;
        Ok(Self { kraus, unital })
    }

    /// `T_A ⊗ T_B`
    pub fn product(a: &KrausChannel, b: &KrausChannel) -> Result<Self> {
        let mut ops = Vec::with_capacity(a.kraus.len() * b.kraus.len());
        for ka in &a.kraus {
            for kb in &b.kraus {
                ops.push(tensor(ka, kb)?);
            }
        }
        Self::new(ops)
    }

    pub fn identity(d: usize) -> Self {
        Self::new(vec![ComplexMatrix::identity(d)]).expect("identity is a channel")
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.kraus[0].cols()
    }

    pub fn output_dim(&self) -> usize {
        self.kraus[0].rows()
    }

    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.output_dim(), self.output_dim());
        for k in &self.kraus {
            acc = &acc + &k.conjugate(m);
        }
        acc
    }

    /// Output keeps the input's subsystem structure, which requires `d_out == d_in`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.input_dim() {
            return Err(CorrError::DimensionMismatch { expected: self.input_dim(), found: rho.dim() });
        }
        if self.output_dim() != self.input_dim() {
            return Err(CorrError::ContractViolation("dimension-changing channel needs explicit output dims".into()));
        }
        Ok(DensityMatrix::from_trusted(self.apply_matrix(rho.matrix()), rho.dims().clone()))
    }

    /// `W_ij = tr(K_i rho K_j^dagger)`
    pub fn environment_gram(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        if rho.dim() != self.input_dim() {
            return Err(CorrError::DimensionMismatch { expected: self.input_dim(), found: rho.dim() });
        }
        let n = self.kraus.len();
        let mut w = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            let ki_rho = &self.kraus[i] * rho.matrix();
            for j in 0..=i {
                let v = ki_rho.trace_product(&self.kraus[j].adjoint());
                w.set(i, j, v);
                w.set(j, i, v.conj());
            }
        }
        Ok(w)
    }

    pub fn entropy_exchange(&self, rho: &DensityMatrix) -> Result<f64> {
        spectral_entropy(&self.environment_gram(rho)?)
    }
}

/// Entropy exchange computed literally: purify `rho` to `Z ⊗ P`, apply `id_Z ⊗ T`,
/// and take the entropy of the joint output.
pub fn entropy_exchange_purified(kraus: &[ComplexMatrix], rho: &DensityMatrix) -> Result<f64> {
    let psi = purify(rho)?;
    let d_z = rho.dim();
    let joint = ComplexMatrix::projector(psi.vector());
    let id_z = ComplexMatrix::identity(d_z);
    let mut out: Option<ComplexMatrix> = None;
    for k in kraus {
        if k.cols() != rho.dim() {
            return Err(CorrError::DimensionMismatch { expected: rho.dim(), found: k.cols() });
        }
        let term = tensor(&id_z, k)?.conjugate(&joint);
        out = Some(match out {
            Some(acc) => &acc + &term,
            None => term,
        });
    }
    let out = out.ok_or_else(|| CorrError::InvariantViolation("no Kraus operators".into()))?;
    spectral_entropy(&out)
}

/// `I(A:B)` before and after an `A`-side instrument, averaged over outcomes.
#[derive(Debug, Clone, Serialize)]
pub struct LopcCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub outcome_probabilities: Vec<f64>,
}

impl LopcCheck {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs - 1e-9
    }
}

/// Local instrument on `A` (`instrument[i]` are the Kraus operators of outcome `i`)
/// applied to a bipartite `rho` whose `A` part has dimension `d_a`.
pub fn local_instrument_check(rho: &DensityMatrix, d_a: usize, instrument: &[Vec<ComplexMatrix>]) -> Result<LopcCheck> {
    let k = split_index(rho.dims(), d_a)?;
    let n = rho.dims().len();
    let d_b = rho.dim() / d_a;
    let cut = Bipartition::split_at(k, n)?;
    let mut completeness = ComplexMatrix::zeros(d_a, d_a);
    for op in instrument.iter().flatten() {
        if op.rows() != d_a || op.cols() != d_a {
            return Err(CorrError::DimensionMismatch { expected: d_a, found: op.rows() });
        }
        completeness = &completeness + &(&op.adjoint() * op);
    }
    let err = completeness.max_abs_diff(&ComplexMatrix::identity(d_a));
    if err > KRAUS_TOL {
        return Err(CorrError::ContractViolation(format!("instrument is not trace preserving (error {err:e})")));
    }
    let lhs = mutual_information(rho, &cut)?;
    let mut rhs = 0.0;
    let mut probs = Vec::with_capacity(instrument.len());
    for branch in instrument {
        let mut out = ComplexMatrix::zeros(rho.dim(), rho.dim());
        for op in branch {
            out = &out + &local_conjugate(rho.matrix(), d_a, d_b, Some(op), None);
        }
        let p = out.trace().re;
        probs.push(p);
        if p > 1e-14 {
            let branch_state = DensityMatrix::from_trusted(out.scale(1.0 / p), rho.dims().clone());
            rhs += p * mutual_information(&branch_state, &cut)?;
        }
    }
    Ok(LopcCheck { lhs, rhs, outcome_probabilities: probs })
}

/// Per-copy entropic gap of a disentangling map on `rho^{⊗k}`.
#[derive(Debug, Clone, Serialize)]
pub struct ErasureBounds {
    pub lower_hint: f64,
    pub upper_hint: f64,
    pub entropy_exchange: f64,
    pub output_entropy: f64,
    pub ppt: PptReport,
}

/// `(S(T(rho^{⊗k})) - k S(rho)) / k` for a channel whose output is separability-certified.
///
/// `rho` is bipartite with `A` part of dimension `channel.d_a()^(1/k)`; the
/// copies are arranged as `A^k B^k` before the channel acts.
pub fn entanglement_erasure_bounds(channel: &MixedUnitaryChannel, rho: &DensityMatrix, k: usize) -> Result<ErasureBounds> {
    if k == 0 {
        return Err(CorrError::Precondition("need at least one copy".into()));
    }
    let d_a1 = (channel.d_a() as f64).powf(1.0 / k as f64).round() as usize;
    let split = split_index(rho.dims(), d_a1)?;
    let input = rho.bipartite_power(split, k)?;
    let out = channel.apply(&input)?;
    let ppt = ppt_check(out.matrix(), channel.d_a(), channel.d_b())?;
    if !ppt.certifies_separable() {
        return Err(CorrError::Precondition(format!(
            "output is not certified separable (min PT eigenvalue {:e}, {:?})",
            ppt.min_eigenvalue, ppt.certification
        )));
    }
    let s_out = von_neumann_entropy(&out);
    let s_in = k as f64 * von_neumann_entropy(rho);
    let s_e = channel.entropy_exchange(&input)?;
    if s_e < s_out - s_in - 1e-8 {
        return Err(CorrError::InternalConsistency(format!(
            "entropy exchange {s_e} below output entropy gain {}",
            s_out - s_in
        )));
    }
    let gap = (s_out - s_in) / k as f64;
    Ok(ErasureBounds { lower_hint: gap, upper_hint: gap, entropy_exchange: s_e, output_entropy: s_out, ppt })
}

/// JSON channel description:
/// `{ "locality": "...", "ensemble": [{"p": x, "uA": matrix, "uB": matrix}, ...] }`.
///
/// `GENERAL_UNITARY` entries carry the full unitary as `"u"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub locality: String,
    pub ensemble: Vec<ChannelFileEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFileEntry {
    pub p: f64,
    #[serde(rename = "uA", default, skip_serializing_if = "Option::is_none")]
    pub u_a: Option<MatrixLiteral>,
    #[serde(rename = "uB", default, skip_serializing_if = "Option::is_none")]
    pub u_b: Option<MatrixLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<MatrixLiteral>,
}

impl ChannelFile {
    /// Builds the channel for a state split as `d_a x d_b`.
    pub fn to_channel(&self, d_a: usize, d_b: usize) -> Result<MixedUnitaryChannel> {
        let locality = Locality::parse(&self.locality)?;
        let need = |m: &Option<MatrixLiteral>, what: &str| -> Result<ComplexMatrix> {
            m.as_ref()
                .ok_or_else(|| CorrError::Parse(format!("{} entry is missing `{what}`", self.locality)))?
                .to_matrix()
        };
        let mut probabilities = Vec::new();
        let mut ops = Vec::new();
        for e in &self.ensemble {
            probabilities.push(e.p);
            ops.push(match locality {
                Locality::ALur => ElementOp::Local { a: Some(need(&e.u_a, "uA")?), b: None },
                Locality::BLur => ElementOp::Local { a: None, b: Some(need(&e.u_b, "uB")?) },
                Locality::Lur | Locality::Colur => {
                    ElementOp::Local { a: Some(need(&e.u_a, "uA")?), b: Some(need(&e.u_b, "uB")?) }
                }
                Locality::GeneralUnitary => ElementOp::Global(need(&e.u, "u")?),
            });
        }
        if locality == Locality::Lur && !is_independent_product(&probabilities, &ops) {
            return Err(CorrError::InvariantViolation("LUR ensemble is not an independent product of local stages".into()));
        }
        MixedUnitaryChannel::build(probabilities, ops, d_a, d_b, locality)
    }

    pub fn from_channel(channel: &MixedUnitaryChannel) -> Self {
        let ensemble = (0..channel.len())
            .map(|i| {
                let p = channel.probabilities[i];
                match &channel.ops[i] {
                    ElementOp::Local { a, b } => ChannelFileEntry {
                        p,
                        u_a: a.as_ref().map(MatrixLiteral::from),
                        u_b: b.as_ref().map(MatrixLiteral::from),
                        u: None,
                    },
                    ElementOp::Global(u) => ChannelFileEntry { p, u_a: None, u_b: None, u: Some(MatrixLiteral::from(u)) },
                }
            })
            .collect();
        let locality = serde_json::to_value(channel.locality)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        ChannelFile { locality, ensemble }
    }
}

// An LUR file lists the full product ensemble; accept it when p_ij = p_i q_j on a rectangular grid.
fn is_independent_product(p: &[f64], ops: &[ElementOp]) -> bool {
    let mut a_keys: Vec<&ComplexMatrix> = Vec::new();
    let mut b_keys: Vec<&ComplexMatrix> = Vec::new();
    let mut cells = Vec::with_capacity(p.len());
    for op in ops {
        let ElementOp::Local { a: Some(a), b: Some(b) } = op else { return false };
        let ia = a_keys.iter().position(|k| k.max_abs_diff(a) < 1e-12).unwrap_or_else(|| {
            a_keys.push(a);
            a_keys.len() - 1
        });
        let ib = b_keys.iter().position(|k| k.max_abs_diff(b) < 1e-12).unwrap_or_else(|| {
            b_keys.push(b);
            b_keys.len() - 1
        });
        cells.push((ia, ib));
    }
    if a_keys.len() * b_keys.len() != p.len() {
        return false;
    }
    let mut grid = vec![vec![f64::NAN; b_keys.len()]; a_keys.len()];
    for (&(i, j), &pij) in cells.iter().zip(p) {
        if !grid[i][j].is_nan() {
            return false;
        }
        grid[i][j] = pij;
    }
    let pa: Vec<f64> = grid.iter().map(|row| row.iter().sum()).collect();
    let pb: Vec<f64> = (0..b_keys.len()).map(|j| grid.iter().map(|row| row[j]).sum()).collect();
    grid.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, &v)| (v - pa[i] * pb[j]).abs() < 1e-9))
}

/// Pauli matrices `1, X, Y, Z`.
pub fn pauli(index: usize) -> ComplexMatrix {
    let z0 = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let entries = match index {
        0 => [one, z0, z0, one],
        1 => [z0, one, one, z0],
        2 => [z0, -i, i, z0],
        3 => [one, z0, z0, -one],
        _ => panic!("pauli index {index} out of range"),
    };
    ComplexMatrix::from_row_major(2, 2, &entries).expect("2x2 literal")
}

/// Uniform two-element `A`-side twirl `{1, P}` on a qubit pair.
pub fn qubit_twirl(p_index: usize) -> MixedUnitaryChannel {
    MixedUnitaryChannel::a_lur(2, vec![(0.5, pauli(0)), (0.5, pauli(p_index))]).expect("valid twirl")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::random::{haar_unitary, stream};

    #[test]
    fn z_twirl_dephases_bell() {
        let out = qubit_twirl(3).apply(&fixtures::bell().density()).unwrap();
        assert!(out.matrix().max_abs_diff(fixtures::bell_dephased().matrix()) < 1e-15);
        let mix = DensityMatrix::mixture(&[(0.5, &fixtures::bell().density()), (0.5, &fixtures::bell_minus().density())]).unwrap();
        assert!(out.matrix().max_abs_diff(mix.matrix()) < 1e-15);
    }

    #[test]
    fn x_after_z_twirl_is_maximally_mixed() {
        let z = qubit_twirl(3).apply(&fixtures::bell().density()).unwrap();
        let x = qubit_twirl(1).apply(&z).unwrap();
        assert!(x.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 1e-15);
    }

    #[test]
    fn identity_channel_is_free() {
        let rho = fixtures::werner(0.3).unwrap();
        let id = MixedUnitaryChannel::identity(2, 2);
        assert!(id.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        assert_eq!(id.noise_costs(&rho).unwrap(), NoiseCost { log_n: 0.0, shannon: 0.0, entropy_exchange: 0.0 });
    }

    #[test]
    fn bell_noise_costs() {
        let cost = qubit_twirl(3).noise_costs(&fixtures::bell().density()).unwrap();
        assert!((cost.log_n - 1.0).abs() < 1e-12);
        assert!((cost.shannon - 1.0).abs() < 1e-12);
        assert!((cost.entropy_exchange - 1.0).abs() < 1e-12);

        let biased = MixedUnitaryChannel::a_lur(2, vec![(0.9, pauli(0)), (0.1, pauli(3))]).unwrap();
        let cost = biased.noise_costs(&fixtures::bell().density()).unwrap();
        let h = -(0.9f64 * 0.9f64.log2()) - 0.1 * 0.1f64.log2();
        assert!((cost.log_n - 1.0).abs() < 1e-12);
        assert!((cost.shannon - h).abs() < 1e-12);
        assert!((cost.entropy_exchange - h).abs() < 1e-12);
        assert!((h - 0.469).abs() < 1e-3);
    }

    #[test]
    fn pauli_twirl_on_mixed_qubit_exchanges_two_bits() {
        let rho = DensityMatrix::maximally_mixed(DimList::new(vec![2]).unwrap());
        let twirl = MixedUnitaryChannel::a_lur(1, (0..4).map(|k| (0.25, pauli(k))).collect()).unwrap();
        let gram = twirl.entropy_exchange(&rho).unwrap();
        let purified = entropy_exchange_purified(&twirl.kraus_operators(), &rho).unwrap();
        assert!((gram - 2.0).abs() < 1e-12);
        assert!((purified - 2.0).abs() < 1e-12);
    }

    #[test]
    fn decorrelation_examples() {
        let bell = fixtures::bell().density();
        let xz = MixedUnitaryChannel::a_lur(2, (0..4).map(|k| (0.25, pauli(k))).collect()).unwrap();
        let d = xz.epsilon_decorrelates(&bell, None).unwrap();
        assert!(d.achieved_eps < 1e-12);
        assert!(d.product_used.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 1e-15);

        let id = MixedUnitaryChannel::identity(2, 2);
        let mixed = DensityMatrix::maximally_mixed(DimList::new(vec![2, 2]).unwrap());
        assert!(id.epsilon_decorrelates(&mixed, None).unwrap().achieved_eps < 1e-12);
        let d = id.epsilon_decorrelates(&bell, Some(&mixed)).unwrap();
        assert!((d.achieved_eps - 1.5).abs() < 1e-12);
    }

    #[test]
    fn ppt_examples() {
        let r = ppt_check(fixtures::bell_dephased().matrix(), 2, 2).unwrap();
        assert!(r.certifies_separable());
        let r = ppt_check(fixtures::bell().density().matrix(), 2, 2).unwrap();
        assert!(!r.is_ppt);
        assert!((r.min_eigenvalue + 0.5).abs() < 1e-12);
        for p in [0.0, 0.2, 0.3, 1.0 / 3.0, 0.4, 0.8] {
            let r = ppt_check(fixtures::werner(p).unwrap().matrix(), 2, 2).unwrap();
            assert!((r.min_eigenvalue - (1.0 - 3.0 * p) / 4.0).abs() < 1e-12, "p = {p}");
            assert_eq!(r.is_ppt, p <= 1.0 / 3.0 + 1e-12);
        }
        let big = ppt_check(&ComplexMatrix::identity(9).scale(1.0 / 9.0), 3, 3).unwrap();
        assert_eq!(big.certification, PptCertification::NecessaryOnly);
    }

    #[test]
    fn lopc_examples() {
        let bell = fixtures::bell().density();
        let check = local_instrument_check(&bell, 2, &[vec![ComplexMatrix::identity(2)]]).unwrap();
        assert!((check.lhs - check.rhs).abs() < 1e-12);

        let measure = vec![
            vec![ComplexMatrix::from_real_diagonal(&[1.0, 0.0])],
            vec![ComplexMatrix::from_real_diagonal(&[0.0, 1.0])],
        ];
        let check = local_instrument_check(&bell, 2, &measure).unwrap();
        assert!((check.lhs - 2.0).abs() < 1e-9);
        // post-measurement states |00>, |11> are product
        assert!(check.rhs.abs() < 1e-9);
        assert!(check.holds());

        let bad = vec![vec![ComplexMatrix::identity(2).scale(0.5)]];
        assert!(matches!(local_instrument_check(&bell, 2, &bad), Err(CorrError::ContractViolation(_))));
    }

    #[test]
    fn erasure_bounds_examples() {
        let bounds = entanglement_erasure_bounds(&qubit_twirl(3), &fixtures::bell().density(), 1).unwrap();
        assert!((bounds.lower_hint - 1.0).abs() < 1e-9);

        let id = MixedUnitaryChannel::identity(2, 2);
        let bounds = entanglement_erasure_bounds(&id, &fixtures::bell_dephased(), 1).unwrap();
        assert!(bounds.lower_hint.abs() < 1e-12);

        let err = entanglement_erasure_bounds(&id, &fixtures::bell().density(), 1).unwrap_err();
        assert!(matches!(err, CorrError::Precondition(_)));
    }

    #[test]
    fn relabeling_does_not_change_output() {
        let mut rng = stream(9, 0);
        let ens: Vec<_> = (0..4).map(|_| (0.25, haar_unitary(&mut rng, 2), haar_unitary(&mut rng, 2))).collect();
        let ch = MixedUnitaryChannel::colur(ens).unwrap();
        let rho = fixtures::werner(0.7).unwrap();
        let a = ch.apply(&rho).unwrap();
        let b = ch.relabeled(&[2, 0, 3, 1]).unwrap().apply(&rho).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-14);
    }

    #[test]
    fn rejects_invalid_ensembles() {
        assert!(MixedUnitaryChannel::a_lur(2, vec![(0.6, pauli(0)), (0.6, pauli(3))]).is_err());
        let not_unitary = ComplexMatrix::from_real_diagonal(&[1.0, 0.5]);
        assert!(MixedUnitaryChannel::a_lur(2, vec![(1.0, not_unitary)]).is_err());
        let ch = qubit_twirl(3);
        let three = DensityMatrix::maximally_mixed(DimList::new(vec![3]).unwrap());
        assert!(matches!(ch.apply(&three), Err(CorrError::DimensionMismatch { .. })));
    }

    #[test]
    fn lur_is_product_of_stages() {
        let a = qubit_twirl(3);
        let b = MixedUnitaryChannel::b_lur(2, vec![(0.5, pauli(0)), (0.5, pauli(1))]).unwrap();
        let lur = MixedUnitaryChannel::lur(&a, &b).unwrap();
        assert_eq!(lur.len(), 4);
        let rho = fixtures::bell().density();
        let sequential = b.apply(&a.apply(&rho).unwrap()).unwrap();
        assert!(lur.apply(&rho).unwrap().matrix().max_abs_diff(sequential.matrix()) < 1e-15);
    }

    #[test]
    fn channel_file_round_trip() {
        let a = qubit_twirl(3);
        let b = MixedUnitaryChannel::b_lur(2, vec![(0.5, pauli(0)), (0.5, pauli(1))]).unwrap();
        let lur = MixedUnitaryChannel::lur(&a, &b).unwrap();
        let json = serde_json::to_string(&ChannelFile::from_channel(&lur)).unwrap();
        let back: ChannelFile = serde_json::from_str(&json).unwrap();
        let ch = back.to_channel(2, 2).unwrap();
        assert_eq!(ch.locality(), Locality::Lur);
        let rho = fixtures::bell().density();
        assert!(ch.apply(&rho).unwrap().matrix().max_abs_diff(lur.apply(&rho).unwrap().matrix()) < 1e-15);

        let file: ChannelFile = serde_json::from_str(
            r#"{"locality":"A_LUR","ensemble":[
                {"p":0.5,"uA":{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0],[1,0]]}},
                {"p":0.5,"uA":{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0],[-1,0]]}}]}"#,
        )
        .unwrap();
        let ch = file.to_channel(2, 2).unwrap();
        assert!(ch.apply(&rho).unwrap().matrix().max_abs_diff(fixtures::bell_dephased().matrix()) < 1e-15);
    }

    #[test]
    fn kraus_channel_flags_and_entropy_exchange() {
        // amplitude damping is not unital
        let g: f64 = 0.3;
        let k0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - g).sqrt()]]).unwrap();
        let k1 = ComplexMatrix::from_real_rows(&[&[0.0, g.sqrt()], &[0.0, 0.0]]).unwrap();
        let damp = KrausChannel::new(vec![k0, k1]).unwrap();
        assert!(!damp.is_unital());
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let direct = entropy_exchange_purified(damp.kraus(), &rho).unwrap();
        assert!((damp.entropy_exchange(&rho).unwrap() - direct).abs() < 1e-10);

        let deph = KrausChannel::new(vec![
            ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
            ComplexMatrix::from_real_diagonal(&[0.0, 1.0]),
        ])
        .unwrap();
        assert!(deph.is_unital());
        assert!(KrausChannel::new(vec![ComplexMatrix::identity(2).scale(0.9)]).is_err());
    }

    #[test]
    fn a_superoperator_matches_elementwise() {
        let mut rng = stream(31, 0);
        let ens: Vec<(f64, ComplexMatrix)> = (0..6).map(|_| (1.0 / 6.0, haar_unitary(&mut rng, 2))).collect();
        let ch = MixedUnitaryChannel::a_lur(3, ens).unwrap();
        let rho = crate::states::random_induced(&mut rng, &DimList::new(vec![2, 3]).unwrap(), None).unwrap();
        let s = ch.a_superoperator().unwrap();
        let fast = ch.apply_a_superoperator(&s, rho.matrix());
        let mut slow = ComplexMatrix::zeros(6, 6);
        for i in 0..ch.len() {
            slow = &slow + &ch.unitary(i).conjugate(rho.matrix()).scale(ch.probabilities()[i]);
        }
        assert!(fast.max_abs_diff(&slow) < 1e-14);
        assert!(ch.apply_matrix(rho.matrix()).max_abs_diff(&slow) < 1e-14);
    }
}
