//! End-to-end erasure protocols and scans built from the lower-level modules.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{
    decorrelation_of, pauli, ppt_check, split_index, KrausChannel, MixedUnitaryChannel, NoiseCost, PptReport,
};
use crate::ensembles::{generate_ensemble, EnsembleKind, UnitaryEnsembleSpec};
use crate::entropy::{
    conditional_mutual_information, entanglement_entropy, eta, mutual_information, shannon_entropy, von_neumann_entropy,
};
use crate::error::{CorrError, Result};
use crate::fixtures;
use crate::operator::{
    c, hermitian_eigensystem, isometry_from_columns, local_conjugate, operator_in_interval, partial_trace,
    permute_subsystems, permute_vector, range_projector, tensor, trace_norm, ComplexMatrix, DimList,
};
use crate::random::{haar_unitary, stream};
use crate::states::{
    random_induced, random_pure, random_state, schmidt, Bipartition, DensityMatrix, PureState, RandomStateKind,
    Tripartition,
};
use crate::typicality::typical_projector;

/// Entropies of a bipartite state at one point of a pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct StateSnapshot {
    pub label: String,
    pub entropy: f64,
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub mutual_information: f64,
}

impl StateSnapshot {
    pub fn of(label: impl Into<String>, rho: &DensityMatrix, split: usize) -> Result<Self> {
        let n = rho.dims().len();
        let a: Vec<usize> = (0..split).collect();
        let b: Vec<usize> = (split..n).collect();
        Ok(Self {
            label: label.into(),
            entropy: von_neumann_entropy(rho),
            entropy_a: von_neumann_entropy(&rho.marginal(&a)?),
            entropy_b: von_neumann_entropy(&rho.marginal(&b)?),
            mutual_information: mutual_information(rho, &Bipartition::new(a, b, n)?)?,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErasureStep {
    pub channel: crate::channels::ChannelSummary,
    pub cost: NoiseCost,
    /// Distance of the step output from the product of its marginals.
    pub achieved_eps: f64,
    pub separability: PptReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErasureReport {
    pub steps: Vec<ErasureStep>,
    pub totals: NoiseCost,
    /// Before the first step, then after each step.
    pub snapshots: Vec<StateSnapshot>,
    pub final_state: DensityMatrix,
}

/// Applies `channels` in order, recording costs against the state each one receives.
pub fn run_pipeline(rho: &DensityMatrix, channels: &[MixedUnitaryChannel]) -> Result<ErasureReport> {
    let first = channels.first().ok_or_else(|| CorrError::Precondition("empty pipeline".into()))?;
    let d_a = first.d_a();
    let d_b = first.d_b();
    let split = split_index(rho.dims(), d_a)?;
    let mut current = rho.clone();
    let mut snapshots = vec![StateSnapshot::of("input", &current, split)?];
    let mut steps = Vec::with_capacity(channels.len());
    let mut totals = NoiseCost::default();
    for (k, ch) in channels.iter().enumerate() {
        if ch.d_a() != d_a || ch.d_b() != d_b {
            return Err(CorrError::DimensionMismatch { expected: d_a * d_b, found: ch.dim() });
        }
        let cost = ch.noise_costs(&current)?;
        current = ch.apply(&current)?;
        let achieved_eps = decorrelation_of(&current, d_a, None)?.achieved_eps;
        let separability = ppt_check(current.matrix(), d_a, d_b)?;
        totals = totals.add(&cost);
        let label = if ch.label().is_empty() { format!("step {}", k + 1) } else { ch.label().to_string() };
        snapshots.push(StateSnapshot::of(label, &current, split)?);
        steps.push(ErasureStep { channel: ch.summary(), cost, achieved_eps, separability });
    }
    Ok(ErasureReport { steps, totals, snapshots, final_state: current })
}

fn pauli_name(index: usize) -> &'static str {
    ["identity", "X", "Y", "Z"][index]
}

/// Bell pair erased by `A`-side twirls `{1, P}` for each Pauli index in `order` (1 = X, 2 = Y, 3 = Z).
pub fn bell_erasure(order: &[usize]) -> Result<ErasureReport> {
    if order.iter().any(|&p| p == 0 || p > 3) {
        return Err(CorrError::Domain("Pauli twirl index must be 1, 2 or 3".into()));
    }
    let channels: Vec<MixedUnitaryChannel> = order
        .iter()
        .map(|&p| {
            MixedUnitaryChannel::a_lur(2, vec![(0.5, pauli(0)), (0.5, pauli(p))])
                .map(|ch| ch.with_label(format!("{}-twirl", pauli_name(p))))
        })
        .collect::<Result<_>>()?;
    run_pipeline(&fixtures::bell().density(), &channels)
}

/// Z-twirl then X-twirl on `|Φ+>`.
pub fn bell_erasure_demo() -> Result<ErasureReport> {
    bell_erasure(&[3, 1])
}

/// Decorrelation construction parameters; the three roles of `eps` can be set independently.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Prop2Params {
    /// Typical projectors `Pi`, `Pi_A`, `Pi_B`.
    pub eps_typical: f64,
    /// Threshold `eps / D_B` defining `Pi_B'`.
    pub eps_cut: f64,
    /// Operator interval `[(1 - eps) E X, (1 + eps) E X]` for the sampled average.
    pub eps_chernoff: f64,
}

impl Prop2Params {
    pub fn uniform(eps: f64) -> Self {
        Self { eps_typical: eps, eps_cut: eps, eps_chernoff: eps }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("eps_typical", self.eps_typical), ("eps_cut", self.eps_cut), ("eps_chernoff", self.eps_chernoff)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(CorrError::Domain(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop2Diagnostics {
    pub n: usize,
    pub n_unitaries: usize,
    pub params: Prop2Params,
    /// Rank of the global typical projector.
    pub typical_rank: usize,
    /// `D_A`, `D_B`: ranks of the local typical projectors.
    pub typical_rank_a: usize,
    pub typical_rank_b: usize,
    /// Rank of `Pi_B'`.
    pub cut_rank: usize,
    pub trace_hat: f64,
    pub trace_tilde: f64,
    /// `||rho_tilde - rho^{⊗n}||_1`
    pub tilde_distance: f64,
    /// Sampled average of `(U ⊗ 1) rho_tilde (U ⊗ 1)^dagger` within `[(1-eps) M, (1+eps) M]`.
    pub chernoff_in_interval: bool,
    pub degenerate_spectrum: bool,
}

#[derive(Debug, Clone)]
pub struct Prop2Result {
    pub channel: MixedUnitaryChannel,
    /// `rho^{⊗n}` in `A^n B^n` order, as fed to the channel.
    pub input: DensityMatrix,
    pub achieved_eps: f64,
    /// `log2(N) / n`
    pub rate: f64,
    pub diagnostics: Prop2Diagnostics,
}

/// Builds the `A`-LUR decorrelating channel for `rho^{⊗n}` from `N` sampled Weyl
/// unitaries on the typical subspace of `rho_A^{⊗n}`.
///
/// `split` is the number of leading subsystems of `rho` that form `A`.
pub fn decorrelate_prop2(
    rho: &DensityMatrix,
    split: usize,
    n: usize,
    params: Prop2Params,
    n_unitaries: usize,
    seed: u64,
) -> Result<Prop2Result> {
    params.validate()?;
    if n_unitaries == 0 {
        return Err(CorrError::Domain("need at least one unitary".into()));
    }
    let parties = rho.dims().len();
    if split == 0 || split >= parties {
        return Err(CorrError::Index(format!("split {split} does not give two non-empty parts")));
    }
    let a_idx: Vec<usize> = (0..split).collect();
    let b_idx: Vec<usize> = (split..parties).collect();
    let d_a1 = rho.dims().product_of(&a_idx);
    let d_b1 = rho.dims().product_of(&b_idx);
    let rho_a = rho.marginal(&a_idx)?;
    let rho_b = rho.marginal(&b_idx)?;

    let input = rho.bipartite_power(split, n)?;
    let big_a = d_a1.pow(n as u32);
    let big_b = d_b1.pow(n as u32);

    let tp = typical_projector(rho, n, params.eps_typical)?;
    let tp_a = typical_projector(&rho_a, n, params.eps_typical)?;
    let tp_b = typical_projector(&rho_b, n, params.eps_typical)?;
    if tp_a.rank() == 0 {
        return Err(CorrError::Protocol(format!(
            "typical subspace of rho_A^(x{n}) is empty at eps = {} (S(rho_A) = {:.3e})",
            params.eps_typical,
            tp_a.single_copy_entropy()
        )));
    }

    // global projector from (AB)^n to A^n B^n order
    let copy_dims = DimList::new([d_a1, d_b1].repeat(n))?;
    let order: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
    let (pi, _) = permute_subsystems(&tp.projector, &copy_dims, &order)?;
    let local = tensor(&tp_a.projector, &tp_b.projector)?;
    let sandwich = &(&pi * input.matrix()) * &pi;
    let hat = &(&local * &sandwich) * &local;
    let trace_hat = hat.trace().re;

    let ab_dims = DimList::new(vec![big_a, big_b])?;
    let hat_b = partial_trace(&hat, &ab_dims, &[1])?;
    let threshold = params.eps_cut / tp_b.rank().max(1) as f64;
    let eig = hermitian_eigensystem(&hat_b)?;
    let kept: Vec<_> = (0..eig.values.len()).filter(|&k| eig.values[k] >= threshold).map(|k| eig.vector(k)).collect();
    let cut = if kept.is_empty() { ComplexMatrix::zeros(big_b, big_b) } else { range_projector(&isometry_from_columns(big_b, &kept)) };
    let tilde = local_conjugate(&hat, big_a, big_b, None, Some(&cut));
    let trace_tilde = tilde.trace().re;
    if trace_tilde.is_nan() || trace_tilde <= 1e-12 {
        return Err(CorrError::Protocol(format!(
            "cut-down state vanishes (trace of hat state {trace_hat:.3e}, {} of {} B eigenvalues above {threshold:.3e})",
            kept.len(),
            big_b
        )));
    }
    let tilde_distance = trace_norm(&(&tilde - input.matrix()));

    let spec = UnitaryEnsembleSpec::new(EnsembleKind::DiscreteWeyl, tp_a.rank(), seed).on_support(tp_a.isometry().clone());
    let unitaries = generate_ensemble(&spec, n_unitaries)?;
    let p = 1.0 / n_unitaries as f64;
    let channel = MixedUnitaryChannel::a_lur(big_b, unitaries.into_iter().map(|u| (p, u)).collect())?
        .with_label("typical-subspace Weyl decorrelation")
        .with_n_label(n);

    let averaged = channel.apply_matrix(&tilde);
    let omega_a = tp_a.projector.scale(1.0 / tp_a.rank() as f64);
    let omega_b = partial_trace(&tilde, &ab_dims, &[1])?;
    let mean = tensor(&omega_a, &omega_b)?;
    let chernoff_in_interval = operator_in_interval(
        &averaged,
        &mean.scale(1.0 - params.eps_chernoff),
        &mean.scale(1.0 + params.eps_chernoff),
        1e-9,
    )?;

    let output = channel.apply(&input)?;
    let achieved_eps = decorrelation_of(&output, big_a, None)?.achieved_eps;
    let diagnostics = Prop2Diagnostics {
        n,
        n_unitaries,
        params,
        typical_rank: tp.rank(),
        typical_rank_a: tp_a.rank(),
        typical_rank_b: tp_b.rank(),
        cut_rank: kept.len(),
        trace_hat,
        trace_tilde,
        tilde_distance,
        chernoff_in_interval,
        degenerate_spectrum: tp.degenerate_spectrum || tp_a.degenerate_spectrum || tp_b.degenerate_spectrum,
    };
    Ok(Prop2Result { channel, input, achieved_eps, rate: (n_unitaries as f64).log2() / n as f64, diagnostics })
}

/// Entropy-exchange lower bound for a channel that `eps`-decorrelates `rho^{⊗n}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Prop1Check {
    pub entropy_exchange: f64,
    /// `n (I - 3 eps log_d) - eta(3 eps)`
    pub bound: f64,
    pub holds: bool,
}

pub fn prop1_bound(n: usize, mutual_info: f64, eps: f64, log_d: f64) -> Result<f64> {
    Ok(n as f64 * (mutual_info - 3.0 * eps * log_d) - eta(3.0 * eps)?)
}

/// Compares `S_e(R, rho^{⊗n})` with [`prop1_bound`] (slack `1e-6`).
pub fn prop1_check(result: &Prop2Result, mutual_info: f64, log_d: f64) -> Result<Prop1Check> {
    let entropy_exchange = result.channel.entropy_exchange(&result.input)?;
    let bound = prop1_bound(result.diagnostics.n, mutual_info, result.achieved_eps, log_d)?;
    Ok(Prop1Check { entropy_exchange, bound, holds: entropy_exchange >= bound - 1e-6 })
}

/// Separability evidence for a bipartite output.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Separability {
    pub ppt: PptReport,
    /// The output was verified equal to an explicit mixture of product states.
    pub product_decomposition: bool,
}

impl Separability {
    pub fn certified(&self) -> bool {
        self.product_decomposition || self.ppt.certifies_separable()
    }
}

#[derive(Debug, Clone)]
pub struct DisentangleResult {
    pub channel: MixedUnitaryChannel,
    /// Output state, subsystems ordered as `cut.a` then `cut.b`.
    pub output: DensityMatrix,
    pub schmidt_rank: usize,
    pub schmidt_coefficients: Vec<f64>,
    pub cost: NoiseCost,
    /// `max |output - sum_j lambda_j |l_j r_j><l_j r_j||`
    pub schmidt_diagonal_error: f64,
    pub separability: Separability,
}

fn reorder_pure(psi: &PureState, cut: &Bipartition) -> Result<(PureState, usize)> {
    let cut = Bipartition::new(cut.a().to_vec(), cut.b().to_vec(), psi.dims().len())?;
    let order = cut.order();
    let v = permute_vector(psi.vector(), psi.dims(), &order);
    let dims = DimList::new(order.iter().map(|&k| psi.dims().as_slice()[k]).collect())?;
    Ok((PureState::normalized(v, dims)?, cut.a().len()))
}

/// Phase randomization with the `D` unitaries `U_k = sum_j e^{2 pi i jk/D} |l_j><l_j|`
/// on the span of the `A` Schmidt vectors, `D` the Schmidt rank.
pub fn disentangle_pure(psi: &PureState, cut: &Bipartition) -> Result<DisentangleResult> {
    let (psi, split) = reorder_pure(psi, cut)?;
    let n = psi.dims().len();
    let cut = Bipartition::split_at(split, n)?;
    let form = schmidt(&psi, &cut)?;
    let rank = form.rank();
    let d_a = form.left_dims.total();
    let d_b = form.right_dims.total();
    let support = isometry_from_columns(d_a, &form.left_basis[..rank]);
    let spec = UnitaryEnsembleSpec::new(EnsembleKind::PhaseFamily, rank, 0).on_support(support);
    let unitaries = generate_ensemble(&spec, rank)?;
    let p = 1.0 / rank as f64;
    let channel = MixedUnitaryChannel::a_lur(d_b, unitaries.into_iter().map(|u| (p, u)).collect())?
        .with_label("Schmidt-basis phase randomization");
    let rho = psi.density();
    let cost = channel.noise_costs(&rho)?;
    let output = channel.apply(&rho)?;

    let mut expected = ComplexMatrix::zeros(d_a * d_b, d_a * d_b);
    for j in 0..rank {
        let v = crate::operator::kron_vec(&form.left_basis[j], &form.right_basis[j]);
        expected = &expected + &ComplexMatrix::projector(&v).scale(form.coefficients[j]);
    }
    let schmidt_diagonal_error = output.matrix().max_abs_diff(&expected);
    let separability = Separability {
        ppt: ppt_check(output.matrix(), d_a, d_b)?,
        product_decomposition: schmidt_diagonal_error <= 1e-10,
    };
    Ok(DisentangleResult {
        channel,
        output,
        schmidt_rank: rank,
        schmidt_coefficients: form.coefficients[..rank].to_vec(),
        cost,
        schmidt_diagonal_error,
        separability,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalCorrelation {
    pub sigma: DensityMatrix,
    /// `I(A:B)` of the dephased state.
    pub i_classical: f64,
    pub entanglement: f64,
}

/// Local dephasing in the Schmidt basis; the output carries `E(psi)` bits of classical correlation.
pub fn classical_correlation_dephasing(psi: &PureState, cut: &Bipartition) -> Result<ClassicalCorrelation> {
    let d = disentangle_pure(psi, cut)?;
    let split = cut.a().len();
    let i_classical = mutual_information(&d.output, &Bipartition::split_at(split, d.output.dims().len())?)?;
    Ok(ClassicalCorrelation { sigma: d.output, i_classical, entanglement: shannon_entropy(&d.schmidt_coefficients) })
}

/// A local disentangling map `T`.
#[derive(Debug, Clone)]
pub enum LocalMap {
    MixedUnitary(MixedUnitaryChannel),
    Product { a: KrausChannel, b: KrausChannel },
}

impl LocalMap {
    fn d_a(&self) -> usize {
        match self {
            LocalMap::MixedUnitary(ch) => ch.d_a(),
            LocalMap::Product { a, .. } => a.input_dim(),
        }
    }

    fn d_b(&self) -> usize {
        match self {
            LocalMap::MixedUnitary(ch) => ch.d_b(),
            LocalMap::Product { b, .. } => b.input_dim(),
        }
    }

    /// Unital on each side separately.
    pub fn locally_unital(&self) -> bool {
        match self {
            LocalMap::MixedUnitary(ch) => ch.locality() != crate::channels::Locality::GeneralUnitary,
            LocalMap::Product { a, b } => a.is_unital() && b.is_unital(),
        }
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match self {
            LocalMap::MixedUnitary(ch) => ch.apply(rho),
            LocalMap::Product { a, b } => KrausChannel::product(a, b)?.apply(rho),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoStepComparison {
    /// `S(sigma_A) + S(sigma_B) - S(rho)`
    pub two_step: f64,
    /// `I(A:B)_rho`
    pub one_shot: f64,
    pub gap: f64,
    pub locally_unital: bool,
    /// `gap >= -1e-9`; only expected when `locally_unital`.
    pub gap_nonnegative: bool,
    pub separability: PptReport,
}

/// Cost of disentangling with `t` and then erasing the remaining correlation, against erasing at once.
pub fn two_step_cost_comparison(rho: &DensityMatrix, t: &LocalMap) -> Result<TwoStepComparison> {
    let (d_a, d_b) = (t.d_a(), t.d_b());
    let split = split_index(rho.dims(), d_a)?;
    let sigma = t.apply(rho)?;
    let separability = ppt_check(sigma.matrix(), d_a, d_b)?;
    if !separability.certifies_separable() {
        return Err(CorrError::Precondition(format!(
            "disentangled state is not certified separable (min PT eigenvalue {:e}, {:?})",
            separability.min_eigenvalue, separability.certification
        )));
    }
    let before = StateSnapshot::of("rho", rho, split)?;
    let after = StateSnapshot::of("sigma", &sigma, split)?;
    let two_step = after.entropy_a + after.entropy_b - before.entropy;
    let one_shot = before.mutual_information;
    let gap = (after.entropy_a - before.entropy_a) + (after.entropy_b - before.entropy_b);
    Ok(TwoStepComparison {
        two_step,
        one_shot,
        gap,
        locally_unital: t.locally_unital(),
        gap_nonnegative: gap >= -1e-9,
        separability,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MultipartyErasure {
    /// `sum_i S(A_i) - S(A_1 ... A_p)`
    pub c_er: f64,
    /// `I(A_k : A_{k+1} ... A_p)` on the marginal `A_k ... A_p`, for `k = 1 .. p-1`.
    pub sequential: Vec<f64>,
    pub local_entropies: Vec<f64>,
    pub joint_entropy: f64,
    pub telescoping_residual: f64,
}

/// Total correlation of a `p`-party state, one party per subsystem.
pub fn multipartite_erasure(rho: &DensityMatrix) -> Result<MultipartyErasure> {
    let p = rho.dims().len();
    if p < 2 {
        return Err(CorrError::Precondition(format!("need at least two parties, got {p}")));
    }
    let local_entropies: Vec<f64> = (0..p).map(|i| Ok(von_neumann_entropy(&rho.marginal(&[i])?))).collect::<Result<_>>()?;
    let joint_entropy = von_neumann_entropy(rho);
    let c_er = local_entropies.iter().sum::<f64>() - joint_entropy;
    let mut sequential = Vec::with_capacity(p - 1);
    for (k, s_k) in local_entropies.iter().enumerate().take(p - 1) {
        let tail: Vec<usize> = (k..p).collect();
        let marginal = rho.marginal(&tail)?;
        // unclamped, so the telescoping sum is an exact identity
        let rest: Vec<usize> = (1..tail.len()).collect();
        let s_rest = von_neumann_entropy(&marginal.marginal(&rest)?);
        sequential.push(s_k + s_rest - von_neumann_entropy(&marginal));
    }
    let telescoping_residual = (sequential.iter().sum::<f64>() - c_er).abs();
    if telescoping_residual > 1e-9 {
        return Err(CorrError::InternalConsistency(format!("telescoping identity off by {telescoping_residual:e}")));
    }
    Ok(MultipartyErasure { c_er, sequential, local_entropies, joint_entropy, telescoping_residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct SsaScan {
    pub count: usize,
    pub seed: u64,
    pub min_value: f64,
    pub argmin: usize,
    /// Values below `-1e-9`.
    pub violations: usize,
    /// `I(A:C|B)` of the GHZ fixture, when included.
    pub ghz_value: Option<f64>,
}

/// `I(A:C|B)` over `count` induced-random states on three parties with `dims`.
pub fn ssa_scan(count: usize, dims: &DimList, seed: u64, include_ghz: bool) -> Result<SsaScan> {
    if dims.len() != 3 {
        return Err(CorrError::Precondition(format!("need three parties, got {}", dims.len())));
    }
    if count == 0 {
        return Err(CorrError::Domain("need at least one state".into()));
    }
    let parts = Tripartition::new(vec![0], vec![1], vec![2], 3)?;
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let rho = random_state(RandomStateKind::InducedMixed { ancilla_dim: None }, dims, seed, i as u64)?.density();
            conditional_mutual_information(&rho, &parts)
        })
        .collect::<Result<_>>()?;
    let (argmin, min_value) = values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("count > 0");
    let ghz_value = if include_ghz {
        if dims.as_slice() != [2, 2, 2] {
            return Err(CorrError::Precondition("GHZ fixture needs dims 2,2,2".into()));
        }
        Some(conditional_mutual_information(&fixtures::ghz3().density(), &parts)?)
    } else {
        None
    };
    Ok(SsaScan {
        count,
        seed,
        min_value,
        argmin,
        violations: values.iter().filter(|&&v| v < -1e-9).count(),
        ghz_value,
    })
}

/// Families of product channels `T_A ⊗ T_B` for the conjecture scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelFamily {
    /// Dephasing in the Schmidt bases of the input.
    SchmidtDephasing,
    /// `T(X) = tr(X) alpha` with random fixed states on each side.
    TraceReplace,
    /// `V (p X + (1-p) dephase_W(X)) V^dagger` with random `V`, `W`, `p` on each side.
    RandomDephasingUnitary,
}

impl ChannelFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "schmidt_dephasing" | "schmidt" => Ok(Self::SchmidtDephasing),
            "trace_replace" => Ok(Self::TraceReplace),
            "random_dephasing_unitary" | "random" => Ok(Self::RandomDephasingUnitary),
            _ => Err(CorrError::Parse(format!(
                "unknown channel family `{s}` (known: schmidt_dephasing, trace_replace, random_dephasing_unitary)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureWitness {
    pub trial: usize,
    pub excess: f64,
    pub mutual_information: f64,
    pub entanglement: f64,
    /// Input pure state, `[re, im]` amplitudes.
    pub state: Vec<[f64; 2]>,
    pub output: DensityMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureScan {
    pub family: ChannelFamily,
    pub count: usize,
    pub seed: u64,
    pub evaluated: usize,
    /// Trials whose output was not certified separable.
    pub skipped: usize,
    /// `max I(A:B)_sigma - E(psi)` over evaluated trials.
    pub max_excess: f64,
    pub witnesses: Vec<ConjectureWitness>,
}

pub const WITNESS_THRESHOLD: f64 = 1e-7;

/// Kraus operators `{|v_k><v_k|}` plus the projector onto their orthocomplement.
fn dephasing_kraus(basis: &[Vec<num_complex::Complex64>], d: usize) -> Vec<ComplexMatrix> {
    let mut ops: Vec<ComplexMatrix> = basis.iter().map(|v| ComplexMatrix::projector(v)).collect();
    let span = ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, p| &acc + p);
    let rest = &ComplexMatrix::identity(d) - &span;
    if rest.max_abs() > 1e-12 {
        ops.push(rest);
    }
    ops
}

fn trace_replace_kraus(alpha: &DensityMatrix) -> Result<Vec<ComplexMatrix>> {
    let d = alpha.dim();
    let eig = hermitian_eigensystem(alpha.matrix())?;
    let mut ops = Vec::new();
    for (i, &a) in eig.values.iter().enumerate() {
        if a <= 0.0 {
            continue;
        }
        let e = eig.vector(i);
        for j in 0..d {
            ops.push(ComplexMatrix::from_fn(d, d, |r, col| if col == j { e[r] * a.sqrt() } else { c(0.0, 0.0) }));
        }
    }
    Ok(ops)
}

fn random_dephasing_unitary_kraus<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<ComplexMatrix> {
    let v = haar_unitary(rng, d);
    let w = haar_unitary(rng, d);
    let p: f64 = rng.random();
    let mut ops = vec![v.scale(p.sqrt())];
    for k in 0..d {
        let proj = ComplexMatrix::projector(&w.column_vec(k));
        ops.push((&v * &proj).scale((1.0 - p).sqrt()));
    }
    ops
}

fn conjecture_trial(d_a: usize, d_b: usize, seed: u64, trial: usize, family: ChannelFamily) -> Result<Option<(f64, ConjectureWitness)>> {
    let dims = DimList::new(vec![d_a, d_b])?;
    let mut rng = stream(seed, trial as u64);
    let psi = random_pure(&mut rng, &dims);
    let cut = Bipartition::split_at(1, 2)?;
    let e = entanglement_entropy(&psi, &cut)?;
    let (ka, kb) = match family {
        ChannelFamily::SchmidtDephasing => {
            let form = schmidt(&psi, &cut)?;
            let r = form.rank();
            (dephasing_kraus(&form.left_basis[..r], d_a), dephasing_kraus(&form.right_basis[..r], d_b))
        }
        ChannelFamily::TraceReplace => {
            let alpha = random_induced(&mut rng, &DimList::new(vec![d_a])?, None)?;
            let beta = random_induced(&mut rng, &DimList::new(vec![d_b])?, None)?;
            (trace_replace_kraus(&alpha)?, trace_replace_kraus(&beta)?)
        }
        ChannelFamily::RandomDephasingUnitary => {
            (random_dephasing_unitary_kraus(&mut rng, d_a), random_dephasing_unitary_kraus(&mut rng, d_b))
        }
    };
    let t = KrausChannel::product(&KrausChannel::new(ka)?, &KrausChannel::new(kb)?)?;
    let sigma = t.apply(&psi.density())?;
    if !ppt_check(sigma.matrix(), d_a, d_b)?.certifies_separable() {
        return Ok(None);
    }
    let i = mutual_information(&sigma, &cut)?;
    let excess = i - e;
    let witness = ConjectureWitness {
        trial,
        excess,
        mutual_information: i,
        entanglement: e,
        state: psi.vector().iter().map(|z| [z.re, z.im]).collect(),
        output: sigma,
    };
    Ok(Some((excess, witness)))
}

/// Searches for `I(A:B)_sigma > E(psi)` with `sigma = (T_A ⊗ T_B)(psi)` separable,
/// over `count` random pure states on `d_a x d_b` (a PPT-certifying size).
pub fn conjecture_scan(count: usize, d_a: usize, d_b: usize, seed: u64, family: ChannelFamily) -> Result<ConjectureScan> {
    if !crate::channels::ppt_certifying_dims(d_a, d_b) {
        return Err(CorrError::Precondition(format!("{d_a}x{d_b} is not a size where PPT certifies separability")));
    }
    let outcomes: Vec<Option<(f64, ConjectureWitness)>> =
        (0..count).into_par_iter().map(|t| conjecture_trial(d_a, d_b, seed, t, family)).collect::<Result<_>>()?;
    let mut evaluated = 0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut witnesses = Vec::new();
    for (excess, witness) in outcomes.into_iter().flatten() {
        evaluated += 1;
        max_excess = max_excess.max(excess);
        if excess > WITNESS_THRESHOLD {
            witnesses.push(witness);
        }
    }
    Ok(ConjectureScan { family, count, seed, evaluated, skipped: count - evaluated, max_excess, witnesses })
}
