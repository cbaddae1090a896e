//! Polynomials and rational functions in the Laplace variable `s`, root
//! location, and the positive-real and reactance checks applied to network
//! impedance functions.

mod network;
mod poly;
mod positive_real;
mod rational;
mod roots;

pub use network::{
    branch_polys, c_polynomial, capacitor_impedance, direct_branch_q, divides, is_strictly_positive_real,
    network_impedance_cofactor, network_impedance_s, network_impedance_trees, network_over_s, BranchPolys, ExactRf,
    SprVerdict,
};
pub use poly::{Poly, GCD_TOL};
pub use positive_real::{
    is_positive_real, is_reactance_function, on_axis, poles_zeros, real_part_numerator, PoleZeroReport, PrVerdict,
    ReactanceReport, AXIS_TOL,
};
pub use rational::RationalFunction;
pub use roots::{roots, roots_f64, Root, CLUSTER_TOL};
