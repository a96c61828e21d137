use corrsim::chernoff::{chernoff_trial, WeylSampler};
use corrsim::entropy::{entanglement_entropy, mutual_information};
use corrsim::fixtures::NamedState;
use corrsim::operator::tensor_power;
use corrsim::protocols::{
    bell_erasure, classical_correlation_dephasing, conjecture_scan, decorrelate_prop2, disentangle_pure,
    multipartite_erasure, prop1_check, ssa_scan, two_step_cost_comparison, ChannelFamily, LocalMap, Prop2Params,
    StateSnapshot,
};
use corrsim::random::stream;
use corrsim::states::random_induced;
use corrsim::typicality::{gentle_measurement_check, typical_projector, typicality_report, typicality_report_diagonal};
use corrsim::{Bipartition, CorrError, DensityMatrix, DimList, Report, Result, SweepRow};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, EpsRoles, Format, RunConfig, StateArgs};
use crate::input::{as_pure, load_state, parse_cut, read_channel_file, read_matrix};

/// Rendered output of a run.
pub enum Output {
    Json(String),
    Csv(String),
}

struct Outcome {
    claim: &'static str,
    result: Value,
    rows: Option<Vec<SweepRow>>,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| CorrError::Parse(e.to_string()))
}

fn state_and_cut(cmd: &Command, args: &StateArgs) -> Result<(NamedState, Bipartition)> {
    let state = load_state(args, cmd.default_state())?;
    let cut = parse_cut(args.cut.as_deref(), state.dims().len())?;
    Ok((state, cut))
}

fn side_dims(rho: &DensityMatrix, cut: &Bipartition) -> (usize, usize) {
    (rho.dims().product_of(cut.a()), rho.dims().product_of(cut.b()))
}

fn params(eps: f64, roles: &EpsRoles) -> Prop2Params {
    let base = Prop2Params::uniform(eps);
    Prop2Params {
        eps_typical: roles.eps_typical.unwrap_or(base.eps_typical),
        eps_cut: roles.eps_cut.unwrap_or(base.eps_cut),
        eps_chernoff: roles.eps_chernoff.unwrap_or(base.eps_chernoff),
    }
}

fn pauli_index(axis: &str) -> Result<usize> {
    match axis.trim().to_ascii_lowercase().as_str() {
        "x" => Ok(1),
        "y" => Ok(2),
        "z" => Ok(3),
        other => Err(CorrError::Parse(format!("unknown twirl axis `{other}` (known: x, y, z)"))),
    }
}

fn execute(cmd: &Command) -> Result<Outcome> {
    let mut rows = None;
    let (claim, result) = match cmd {
        Command::Entropy { state } => {
            let (state, cut) = state_and_cut(cmd, state)?;
            let rho = state.density();
            let snap = StateSnapshot::of("input", &rho, cut.a().len())?;
            let entanglement = state.pure().map(|p| entanglement_entropy(p, &cut)).transpose()?;
            (
                "I(A:B) = S(A) + S(B) - S(AB); for pure states I = 2 E",
                json!({
                    "dims": rho.dims(),
                    "entropy": snap.entropy,
                    "entropy_a": snap.entropy_a,
                    "entropy_b": snap.entropy_b,
                    "mutual_information": snap.mutual_information,
                    "entanglement": entanglement,
                }),
            )
        }
        Command::EraseBell { order } => {
            let order: Vec<usize> = order.split(',').map(pauli_index).collect::<Result<_>>()?;
            let report = bell_erasure(&order)?;
            ("erasing a Bell pair costs two bits of noise, one per twirl", to_value(&report)?)
        }
        Command::Decorrelate { state, n, eps, n_unitaries, trials, seed, roles } => {
            let (state, cut) = state_and_cut(cmd, state)?;
            let rho = state.density();
            let split = cut.a().len();
            let info = mutual_information(&rho, &cut)?;
            let log_d = (rho.dim() as f64).log2();
            let params = params(*eps, roles);
            if *trials == 0 {
                return Err(CorrError::Domain("need at least one trial".into()));
            }
            let mut runs = Vec::new();
            let mut sweep = Vec::new();
            for &big_n in n_unitaries {
                for t in 0..*trials {
                    let s = seed.wrapping_add(t as u64);
                    let r = decorrelate_prop2(&rho, split, *n, params, big_n, s)?;
                    let cost = r.channel.noise_costs(&r.input)?;
                    let check = prop1_check(&r, info, log_d)?;
                    sweep.push(SweepRow {
                        seed: s,
                        param: big_n as f64,
                        achieved_eps: r.achieved_eps,
                        log_n: cost.log_n,
                        shannon: cost.shannon,
                        entropy_exchange: cost.entropy_exchange,
                    });
                    runs.push(json!({
                        "seed": s,
                        "n_unitaries": big_n,
                        "achieved_eps": r.achieved_eps,
                        "rate": r.rate,
                        "cost": cost,
                        "entropy_exchange_bound": check,
                        "diagnostics": r.diagnostics,
                    }));
                }
            }
            rows = Some(sweep);
            (
                "N random local unitaries with log N / n close to I(A:B) decorrelate n copies",
                json!({ "mutual_information": info, "n": n, "params": params, "runs": runs }),
            )
        }
        Command::Disentangle { state } => {
            let (state, cut) = state_and_cut(cmd, state)?;
            let psi = as_pure(&state)?;
            let r = disentangle_pure(&psi, &cut)?;
            (
                "Schmidt-basis phase randomization disentangles a pure state at cost H(lambda) = E",
                json!({
                    "channel": r.channel.summary(),
                    "schmidt_rank": r.schmidt_rank,
                    "schmidt_coefficients": r.schmidt_coefficients,
                    "cost": r.cost,
                    "schmidt_diagonal_error": r.schmidt_diagonal_error,
                    "separability": r.separability,
                    "certified_separable": r.separability.certified(),
                    "output": r.output,
                }),
            )
        }
        Command::Classical { state } => {
            let (state, cut) = state_and_cut(cmd, state)?;
            let psi = as_pure(&state)?;
            let r = classical_correlation_dephasing(&psi, &cut)?;
            ("local dephasing of a pure state leaves E bits of classical correlation", to_value(&r)?)
        }
        Command::TwoStep { state, channel_file } => {
            let (state, cut) = state_and_cut(cmd, state)?;
            let rho = state.density();
            let (d_a, d_b) = side_dims(&rho, &cut);
            let map = match channel_file {
                Some(path) => LocalMap::MixedUnitary(read_channel_file(path)?.to_channel(d_a, d_b)?),
                None => LocalMap::MixedUnitary(disentangle_pure(&as_pure(&state)?, &cut)?.channel),
            };
            let r = two_step_cost_comparison(&rho, &map)?;
            ("disentangling with a locally unital map and then erasing costs at least I(A:B)", to_value(&r)?)
        }
        Command::Multiparty { state } => {
            let rho = load_state(state, cmd.default_state())?.density();
            let r = multipartite_erasure(&rho)?;
            ("erasing all correlations of p parties costs sum_i S(A_i) - S(A_1 ... A_p)", to_value(&r)?)
        }
        Command::SsaScan { count, dims, seed, include_ghz } => {
            let dims = DimList::new(dims.clone())?;
            let r = ssa_scan(*count, &dims, *seed, *include_ghz)?;
            ("I(A:C|B) >= 0 for every tripartite state", to_value(&r)?)
        }
        Command::ConjectureScan { count, dims, seed, family } => {
            let [d_a, d_b] = dims[..] else {
                return Err(CorrError::Precondition(format!("need two local dimensions, got {}", dims.len())));
            };
            let family = ChannelFamily::parse(family)?;
            let r = conjecture_scan(*count, d_a, d_b, *seed, family)?;
            ("no local disentangling map leaves more than E(psi) of correlation in a pure state", to_value(&r)?)
        }
        Command::Chernoff { dim, n_samples, eps, trials, seed, state } => {
            let (tau, d_a, d_b) = if state.state.is_some() || state.state_file.is_some() {
                let (state, cut) = state_and_cut(cmd, state)?;
                let rho = state.density();
                let (d_a, d_b) = side_dims(&rho, &cut);
                (rho, d_a, d_b)
            } else {
                let dims = DimList::new(vec![*dim, *dim])?;
                (random_induced(&mut stream(*seed, u64::MAX - 1), &dims, None)?, *dim, *dim)
            };
            let sampler = WeylSampler::new(tau.matrix(), d_a, d_b)?;
            let r = chernoff_trial(&sampler, *n_samples, *eps, *trials, *seed)?;
            (
                "P(mean of N samples outside [(1-eps) M, (1+eps) M]) <= 2 d exp(-N mu eps^2 / 2)",
                json!({ "scale": sampler.scale(), "d_a": d_a, "d_b": d_b, "trials": r }),
            )
        }
        Command::Typicality { state, n, eps } => {
            let rho = load_state(state, cmd.default_state())?.density();
            let diagonal = rho.matrix().max_off_diagonal() == 0.0;
            let fits = (rho.dim() as u128).checked_pow(*n as u32).is_some_and(|d| d <= corrsim::operator::dim_cap() as u128);
            let r = if diagonal && !fits {
                typicality_report_diagonal(&rho.matrix().real_diagonal(), *n, *eps)?
            } else {
                typicality_report(&typical_projector(&rho, *n, *eps)?, &rho)?
            };
            ("the typical subspace carries mass near one with dimension about 2^{n S}", to_value(&r)?)
        }
        Command::Gentle { state, n, eps, operator_file } => {
            let rho = load_state(state, cmd.default_state())?.density();
            let power = tensor_power(rho.matrix(), *n)?;
            let (effect, rank) = match operator_file {
                Some(path) => (read_matrix(path)?, None),
                None => {
                    let tp = typical_projector(&rho, *n, *eps)?;
                    let rank = tp.rank();
                    (tp.projector, Some(rank))
                }
            };
            let r = gentle_measurement_check(&power, &effect)?;
            (
                "a measurement that succeeds with probability 1 - delta disturbs the state by at most sqrt(8 delta)",
                json!({ "typical_rank": rank, "check": r }),
            )
        }
    };
    Ok(Outcome { claim, result, rows })
}

fn csv_rows(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CorrError::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CorrError::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CorrError::Parse(e.to_string()))
}

/// Runs a configuration and renders its report.
pub fn run(config: &RunConfig) -> Result<(Output, Report<Value>)> {
    let cmd = &config.command;
    if config.format == Format::Csv && !matches!(cmd, Command::Decorrelate { .. }) {
        return Err(CorrError::Precondition(format!("csv output is only available for decorrelate, not {}", cmd.name())));
    }
    let outcome = execute(cmd)?;
    let report = Report::new(cmd.name(), outcome.claim, Some(cmd.seed()), to_value(config)?, outcome.result);
    let output = match (config.format, &outcome.rows) {
        (Format::Csv, Some(rows)) => Output::Csv(csv_rows(rows)?),
        _ => Output::Json(report.to_json()?),
    };
    Ok((output, report))
}
