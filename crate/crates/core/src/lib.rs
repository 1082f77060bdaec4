//! Exact lattice algorithms for double plane involutions on supersingular
//! K3 surfaces and Salem-number entropy of their compositions.

pub mod chamber;
pub mod enumerate;
pub mod error;
pub mod involution;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod pipeline;
pub mod poly;
pub mod reference;
pub mod rs;
pub mod salem;

pub use error::{Error, Result};
pub use lattice::{Lattice, LatticeVector};
pub use linalg::IntMatrix;
pub use poly::IntPolynomial;
