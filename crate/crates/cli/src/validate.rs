use std::path::Path;

use corrsim::fixtures::{NamedState, KNOWN_IDS};
use corrsim::operator::{dim_cap, DIM_CAP_ENV};
use corrsim::protocols::ChannelFamily;
use corrsim::CorrError;
use serde::Serialize;

use crate::args::{Command, Format, RunConfig};
use crate::input::{load_state, parse_cut};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

fn diag(field: &str, message: impl Into<String>) -> Diagnostic {
    Diagnostic { field: field.into(), message: message.into() }
}

fn cap_message(dim: Option<u128>) -> String {
    let cap = dim_cap();
    match dim {
        Some(d) => format!("dimension {d} exceeds the dimension cap {cap} (set {DIM_CAP_ENV} to change it)"),
        None => format!("dimension overflows the dimension cap {cap} (set {DIM_CAP_ENV} to change it)"),
    }
}

fn over_cap(dim: Option<u128>) -> bool {
    dim.is_none_or(|d| d > dim_cap() as u128)
}

fn power(d: usize, n: usize) -> Option<u128> {
    (d as u128).checked_pow(u32::try_from(n).ok()?)
}

fn product(dims: &[usize]) -> Option<u128> {
    dims.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
}

fn eps_open_unit(out: &mut Vec<Diagnostic>, field: &str, eps: f64) {
    if !(eps > 0.0 && eps < 1.0) {
        out.push(diag(field, format!("must lie in (0, 1), got {eps}")));
    }
}

fn positive(out: &mut Vec<Diagnostic>, field: &str, v: usize) {
    if v == 0 {
        out.push(diag(field, "must be at least 1"));
    }
}

fn file_exists(out: &mut Vec<Diagnostic>, field: &str, path: Option<&Path>) {
    if let Some(p) = path {
        if !p.is_file() {
            out.push(diag(field, format!("file {} does not exist", p.display())));
        }
    }
}

fn check_state(out: &mut Vec<Diagnostic>, cmd: &Command) -> Option<NamedState> {
    let args = cmd.state_args()?;
    if let Some(p) = &args.state_file {
        if !p.is_file() {
            out.push(diag("state_file", format!("file {} does not exist", p.display())));
            return None;
        }
    }
    if matches!(cmd, Command::Chernoff { .. }) && args.state.is_none() && args.state_file.is_none() {
        return None;
    }
    match load_state(args, cmd.default_state()) {
        Ok(s) => Some(s),
        Err(CorrError::UnknownState { id, .. }) => {
            out.push(diag("state", format!("unknown state id `{id}`; known ids: {}", KNOWN_IDS.join(", "))));
            None
        }
        Err(CorrError::DimensionCap { dim, .. }) => {
            out.push(diag("state", cap_message(Some(dim as u128))));
            None
        }
        Err(e) => {
            out.push(diag("state", e.to_string()));
            None
        }
    }
}

/// Dry-run checks of dimensions, files and parameter ranges; an empty list means the run can start.
pub fn validate(config: &RunConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let cmd = &config.command;
    if config.format == Format::Csv && !matches!(cmd, Command::Decorrelate { .. }) {
        out.push(diag("format", format!("csv output is only available for decorrelate, not {}", cmd.name())));
    }
    let state = check_state(&mut out, cmd);
    if let (Some(s), Some(args)) = (&state, cmd.state_args()) {
        let needs_cut = !matches!(cmd, Command::Multiparty { .. } | Command::Typicality { .. } | Command::Gentle { .. });
        if needs_cut {
            if let Err(e) = parse_cut(args.cut.as_deref(), s.dims().len()) {
                out.push(diag("cut", e.to_string()));
            }
        }
    }
    let dim = state.as_ref().map(|s| s.dims().total());

    match cmd {
        Command::EraseBell { order } => {
            for axis in order.split(',') {
                if !matches!(axis.trim().to_ascii_lowercase().as_str(), "x" | "y" | "z") {
                    out.push(diag("order", format!("unknown twirl axis `{}` (known: x, y, z)", axis.trim())));
                }
            }
        }
        Command::Decorrelate { n, eps, n_unitaries, trials, roles, .. } => {
            positive(&mut out, "n", *n);
            positive(&mut out, "trials", *trials);
            eps_open_unit(&mut out, "eps", *eps);
            for (field, v) in [("eps_typical", roles.eps_typical), ("eps_cut", roles.eps_cut), ("eps_chernoff", roles.eps_chernoff)] {
                if let Some(v) = v {
                    eps_open_unit(&mut out, field, v);
                }
            }
            if n_unitaries.contains(&0) {
                out.push(diag("n_unitaries", "every ensemble size must be at least 1"));
            }
            if let Some(d) = dim {
                if *n > 0 && over_cap(power(d, *n)) {
                    out.push(diag("n", cap_message(power(d, *n))));
                }
            }
        }
        Command::TwoStep { channel_file, .. } => {
            file_exists(&mut out, "channel_file", channel_file.as_deref());
        }
        Command::SsaScan { count, dims, .. } => {
            positive(&mut out, "count", *count);
            if dims.len() != 3 {
                out.push(diag("dims", format!("need three local dimensions, got {}", dims.len())));
            } else if dims.contains(&0) {
                out.push(diag("dims", "local dimensions must be at least 1"));
            } else if over_cap(product(dims)) {
                out.push(diag("dims", cap_message(product(dims))));
            }
        }
        Command::ConjectureScan { count, dims, family, .. } => {
            positive(&mut out, "count", *count);
            if dims.len() != 2 {
                out.push(diag("dims", format!("need two local dimensions, got {}", dims.len())));
            } else if over_cap(product(dims)) {
                out.push(diag("dims", cap_message(product(dims))));
            }
            if let Err(e) = ChannelFamily::parse(family) {
                out.push(diag("family", e.to_string()));
            }
        }
        Command::Chernoff { dim: d, n_samples, eps, trials, state: args, .. } => {
            positive(&mut out, "n_samples", *n_samples);
            positive(&mut out, "trials", *trials);
            eps_open_unit(&mut out, "eps", *eps);
            if args.state.is_none() && args.state_file.is_none() {
                positive(&mut out, "dim", *d);
                if over_cap(product(&[*d, *d])) {
                    out.push(diag("dim", cap_message(product(&[*d, *d]))));
                }
            }
        }
        Command::Typicality { n, eps, .. } | Command::Gentle { n, eps, .. } => {
            positive(&mut out, "n", *n);
            eps_open_unit(&mut out, "eps", *eps);
            let diagonal_fast_path = matches!(cmd, Command::Typicality { .. })
                && state.as_ref().is_some_and(|s| s.density().matrix().max_off_diagonal() == 0.0);
            if let (Some(d), false) = (dim, diagonal_fast_path) {
                if *n > 0 && over_cap(power(d, *n)) {
                    out.push(diag("n", cap_message(power(d, *n))));
                }
            }
            if let Command::Gentle { operator_file, .. } = cmd {
                file_exists(&mut out, "operator_file", operator_file.as_deref());
            }
        }
        Command::Entropy { .. } | Command::Disentangle { .. } | Command::Classical { .. } | Command::Multiparty { .. } => {}
    }
    out
}
