use std::path::Path;

use corrsim::channels::ChannelFile;
use corrsim::fixtures::{parse_state_id, NamedState};
use corrsim::operator::{check_dim_cap, hermitian_eigensystem, ComplexMatrix, MatrixLiteral};
use corrsim::{Bipartition, CorrError, DensityMatrix, DimList, PureState, Result};

use crate::args::StateArgs;

const PURITY_TOL: f64 = 1e-10;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CorrError::Precondition(format!("cannot read {}: {e}", path.display())))
}

pub fn read_literal(path: &Path) -> Result<MatrixLiteral> {
    serde_json::from_str(&read(path)?).map_err(|e| CorrError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let lit = read_literal(path)?;
    check_dim_cap(lit.rows.max(lit.cols))?;
    lit.to_matrix()
}

pub fn read_channel_file(path: &Path) -> Result<ChannelFile> {
    serde_json::from_str(&read(path)?).map_err(|e| CorrError::Parse(format!("{}: {e}", path.display())))
}

/// A density-matrix file; `dims` defaults to a single subsystem.
pub fn read_state_file(path: &Path) -> Result<DensityMatrix> {
    let lit = read_literal(path)?;
    check_dim_cap(lit.rows.max(lit.cols))?;
    let dims = DimList::new(lit.dims.clone().unwrap_or_else(|| vec![lit.rows]))?;
    DensityMatrix::new(lit.to_matrix()?, dims)
}

pub fn load_state(args: &StateArgs, default_id: &str) -> Result<NamedState> {
    match (&args.state, &args.state_file) {
        (_, Some(path)) => Ok(NamedState::Mixed(read_state_file(path)?)),
        (Some(id), None) => parse_state_id(id),
        (None, None) => parse_state_id(default_id),
    }
}

/// The state vector of a pure density matrix (purity within `1e-10` of one).
pub fn as_pure(state: &NamedState) -> Result<PureState> {
    if let Some(p) = state.pure() {
        return Ok(p.clone());
    }
    let rho = state.density();
    if (rho.purity() - 1.0).abs() > PURITY_TOL {
        return Err(CorrError::Precondition(format!("state is not pure (purity {})", rho.purity())));
    }
    let eig = hermitian_eigensystem(rho.matrix())?;
    PureState::normalized(eig.vectors.column_vec(0), rho.dims().clone())
}

/// Parses `a|b` subsystem counts; the default puts the first subsystem on `A`.
pub fn parse_cut(cut: Option<&str>, parties: usize) -> Result<Bipartition> {
    let Some(spec) = cut else {
        if parties < 2 {
            return Err(CorrError::Precondition(format!("state has {parties} subsystem; a cut needs at least two")));
        }
        return Bipartition::split_at(1, parties);
    };
    let (a, b) = spec
        .split_once('|')
        .ok_or_else(|| CorrError::Parse(format!("cut `{spec}` is not of the form a|b")))?;
    let count = |s: &str| s.trim().parse::<usize>().map_err(|_| CorrError::Parse(format!("cut `{spec}` is not of the form a|b")));
    let (a, b) = (count(a)?, count(b)?);
    if a == 0 || b == 0 || a + b != parties {
        return Err(CorrError::Precondition(format!("cut `{spec}` does not split {parties} subsystems into two non-empty parts")));
    }
    Bipartition::split_at(a, parties)
}
