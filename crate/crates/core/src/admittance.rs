//! Admittance matrices and their structural checks.

use crate::linalg::{rank, Matrix};
use crate::network::Network;
use crate::scalar::{Scalar, Tolerance};

/// Stamps every branch: `y` on both diagonals, `-y` off the diagonal.
pub fn build<T: Scalar>(net: &Network<T>) -> Matrix<T> {
    let n = net.n();
    let mut y: Matrix<T> = Matrix::zeros(n, n);
    for b in &net.branches {
        if b.head == b.tail {
            continue;
        }
        let (a, c) = (b.head - 1, b.tail - 1);
        y[(a, a)] = y[(a, a)].clone() + b.y.clone();
        y[(c, c)] = y[(c, c)].clone() + b.y.clone();
        y[(a, c)] = y[(a, c)].clone() - b.y.clone();
        y[(c, a)] = y[(c, a)].clone() - b.y.clone();
    }
    y
}

/// `G diag(y) G^T` from the incidence matrix.
pub fn build_via_incidence<T: Scalar>(net: &Network<T>) -> Matrix<T> {
    let g = net.graph();
    let inc: Matrix<T> = g.incidence();
    let m = g.edges().len();
    let weights =
        Matrix::from_fn(m, m, |r, c| if r == c { net.branches[g.edges()[r].id].y.clone() } else { T::zero() });
    inc.mul(&weights).and_then(|gy| gy.mul(&inc.transpose())).expect("conforming shapes")
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureReport {
    pub symmetric: bool,
    pub zero_row_sums: bool,
    pub zero_col_sums: bool,
    /// `|Y_jj| >= sum of |Y_jk|` over `k != j`, for every row.
    pub diag_dominant: bool,
    pub rank: usize,
}

pub fn check_structure<T: Scalar>(y: &Matrix<T>, tol: &Tolerance) -> StructureReport {
    let n = y.rows().min(y.cols());
    let scale = y.max_magnitude();
    let zero = |v: &T| v.is_zero_within(tol, scale);
    let mut symmetric = y.is_square();
    let mut rows_ok = true;
    let mut cols_ok = true;
    let mut dominant = true;
    for r in 0..n {
        let mut row = T::zero();
        let mut col = T::zero();
        let mut off = 0.0;
        for c in 0..n {
            row = row + y[(r, c)].clone();
            col = col + y[(c, r)].clone();
            if c != r {
                off += y[(r, c)].magnitude();
                if !zero(&(y[(r, c)].clone() - y[(c, r)].clone())) {
                    symmetric = false;
                }
            }
        }
        rows_ok &= zero(&row);
        cols_ok &= zero(&col);
        dominant &= y[(r, r)].magnitude() >= off - tol.threshold(scale);
    }
    StructureReport {
        symmetric,
        zero_row_sums: rows_ok,
        zero_col_sums: cols_ok,
        diag_dominant: dominant,
        rank: rank(y, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    #[test]
    fn two_node_stamp() {
        let mut net = Network::<BigRational>::new(2);
        net.add_branch("a", 1, 2, rational(3, 1));
        let y = build(&net);
        assert_eq!(
            y,
            Matrix::from_rows(vec![vec![rational(3, 1), rational(-3, 1)], vec![rational(-3, 1), rational(3, 1)]])
                .unwrap()
        );
        assert_eq!(build_via_incidence(&net), y);
    }

    #[test]
    fn parallel_branches_add() {
        let mut two = Network::<BigRational>::new(2);
        two.add_branch("a", 1, 2, rational(1, 2)).add_branch("b", 2, 1, rational(1, 3));
        let mut one = Network::<BigRational>::new(2);
        one.add_branch("c", 1, 2, rational(5, 6));
        assert_eq!(build(&two), build(&one));
    }

    #[test]
    fn disconnected_rank_drops() {
        let mut net = Network::<f64>::new(4);
        net.add_branch("a", 1, 2, 1.0).add_branch("b", 3, 4, 2.0);
        let r = check_structure(&build(&net), &Tolerance::default());
        assert!(r.symmetric && r.zero_row_sums && r.zero_col_sums && r.diag_dominant);
        assert_eq!(r.rank, 2);
    }
}
