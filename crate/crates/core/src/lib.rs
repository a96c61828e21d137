//! Finite-dimensional toolkit for measuring correlations by the local noise needed to erase them.
//!
//! Everything is dense linear algebra over `C`; entropies are in bits.

pub mod channels;
pub mod chernoff;
pub mod ensembles;
pub mod entropy;
pub mod error;
pub mod fixtures;
pub mod operator;
pub mod protocols;
pub mod random;
pub mod report;
pub mod states;
pub mod typicality;

pub use channels::{KrausChannel, Locality, MixedUnitaryChannel, NoiseCost, PptReport};
pub use error::{CorrError, Result};
pub use operator::{ComplexMatrix, DimList};
pub use report::{Report, SweepRow};
pub use states::{Bipartition, DensityMatrix, PureState, SchmidtForm, Tripartition};
pub use typicality::TypicalProjector;
