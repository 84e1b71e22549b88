//! Symmetric tensor field tomography: compressed tensor algebra, grid
//! tensor fields, momentum ray transforms and their separation, the
//! trace-free Helmholtz decomposition, exact polynomial differential
//! operators for CGO amplitudes, and the linearized Calderón identity
//! harness.

pub mod algebra;
pub mod decomposition;
pub mod error;
pub mod field;
pub mod harness;
pub mod mrt;
pub mod symbolic;
pub mod tensor;

pub use error::{Error, Result};
pub use field::{GridDomain, TensorField};
pub use tensor::{MixedTensor, SymIndex, SymTensor};
