//! Truncated power-series construction of Calabi-Yau structures on a
//! neighbourhood of the zero section of a tangent bundle.

pub mod adapted;
pub mod archive;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod masolver;
pub mod pipeline;
pub mod scenario;
pub mod verify;

pub use error::{ArchiveError, ConfigError, JetError, ParseError, SolveError};
pub use jet::{Coeff, ExactComplex, Jet, JetMatrix, Mode, Space};
