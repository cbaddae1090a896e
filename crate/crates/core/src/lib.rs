//! Linear network analysis on admittance matrices.
//!
//! Networks are read from a small text format ([`netlist`]), turned into
//! admittance matrices over any [`Scalar`] and analysed through cofactors:
//! node voltages, transfer and driving-point impedances, the Kirchhoff
//! characteristic, incremental modifications, AC power-flow properties,
//! positive-real impedance functions and source equivalents.

pub mod admittance;
pub mod error;
pub mod graph;
pub mod kirchhoff;
pub mod laplace;
pub mod linalg;
pub mod modify;
pub mod netlist;
pub mod netprops;
pub mod network;
pub mod scalar;
pub mod solve;
pub mod sources;

pub use error::{Error, Result};
pub use graph::MultiGraph;
pub use linalg::{CofactorIndex, Matrix};
pub use netlist::{parse, Netlist};
pub use network::Network;
pub use num_complex::{Complex32, Complex64};
pub use num_rational::BigRational;
pub use scalar::{ExactComplex, RealScalar, Scalar, Tolerance};

pub type RealMatrix = Matrix<f64>;
pub type ComplexMatrix = Matrix<Complex64>;
pub type ExactMatrix = Matrix<BigRational>;
pub type ExactComplexMatrix = Matrix<ExactComplex>;
