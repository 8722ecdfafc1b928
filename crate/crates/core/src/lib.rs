//! Density-matrix simulation of cat-state preparation, decoherence and
//! information-conditioned recovery in small clusters of spin-½ nuclei.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod operator;
pub mod presets;
pub mod protocol;
pub mod spectra;
pub mod states;

pub use error::{Error, Result};
pub use operator::{ComplexMatrix, OperatorKind, SpinIndex, SpinRole, C64};
pub use states::{CatWeights, DensityMatrix, Ferro};
