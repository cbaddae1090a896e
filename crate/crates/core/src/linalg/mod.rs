//! Dense matrices, determinants and the cofactor calculus.

mod cofactor;
mod det;
mod matrix;

pub use cofactor::{
    check_sylvester, cofactor1, cofactor2, cofactor_gen, laplace2_expand, laplace2_expand_unordered,
    reindex_after_removal, sigma, CofactorIndex,
};
pub use det::{det, det_leibniz, inverse, rank, solve, solve_many, LEIBNIZ_LIMIT};
pub use matrix::Matrix;
