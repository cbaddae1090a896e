//! Signed minors with 1-based row and column indices.
//!
//! A cofactor removes an ordered list of rows and an ordered list of columns.
//! Its sign is the parity of moving the removed rows (and columns), in the
//! order listed, to the front of the matrix. Repeated indices give zero;
//! removing every row and column gives one.

use crate::error::{Error, Result};
use crate::linalg::{det, Matrix};
use crate::scalar::Scalar;

/// Sign exponent of a second cofactor: `a + b - 1` when `a < b`, else `a + b`.
pub fn sigma(a: usize, b: usize) -> Result<usize> {
    if a == b {
        return Err(Error::EqualIndices(a));
    }
    Ok(if a < b { a + b - 1 } else { a + b })
}

/// Position of original index `p` once index `removed` has been deleted:
/// `p - 1` above the removed index, `p` below it.
pub fn reindex_after_removal(removed: usize, p: usize) -> Result<usize> {
    Ok(sigma(removed, p)? - removed)
}

fn check_range(n: usize, idx: &[usize]) -> Result<()> {
    for &i in idx {
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, size: n });
        }
    }
    Ok(())
}

fn square_size<T>(a: &Matrix<T>) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    Ok(a.rows())
}

fn has_repeat(idx: &[usize]) -> bool {
    idx.iter().enumerate().any(|(i, x)| idx[..i].contains(x))
}

/// Parity of the permutation `[idx..., remaining indices ascending]`.
fn removal_parity(idx: &[usize]) -> bool {
    let mut odd = false;
    for (i, &x) in idx.iter().enumerate() {
        // Indices smaller than x that x jumps over: those not already listed before it.
        let smaller_before = idx[..i].iter().filter(|&&y| y < x).count();
        if (x - 1 - smaller_before) % 2 == 1 {
            odd = !odd;
        }
    }
    odd
}

fn signed_minor<T: Scalar>(a: &Matrix<T>, rows: &[usize], cols: &[usize]) -> Result<T> {
    let r0: Vec<usize> = rows.iter().map(|r| r - 1).collect();
    let c0: Vec<usize> = cols.iter().map(|c| c - 1).collect();
    let d = det(&a.without(&r0, &c0))?;
    Ok(if removal_parity(rows) != removal_parity(cols) { -d } else { d })
}

pub fn cofactor1<T: Scalar>(a: &Matrix<T>, j: usize, k: usize) -> Result<T> {
    let n = square_size(a)?;
    check_range(n, &[j, k])?;
    signed_minor(a, &[j], &[k])
}

/// `C_{jp,kq}`: rows `j, p` and columns `k, q` removed.
pub fn cofactor2<T: Scalar>(a: &Matrix<T>, j: usize, p: usize, k: usize, q: usize) -> Result<T> {
    let n = square_size(a)?;
    check_range(n, &[j, p, k, q])?;
    if j == p || k == q {
        return Ok(T::zero());
    }
    signed_minor(a, &[j, p], &[k, q])
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CofactorIndex {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl CofactorIndex {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::LengthMismatch { rows: rows.len(), cols: cols.len() });
        }
        Ok(CofactorIndex { rows, cols })
    }

    pub fn empty() -> Self {
        CofactorIndex { rows: vec![], cols: vec![] }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The index with `row` and `col` placed in front.
    pub fn prepend(&self, row: usize, col: usize) -> Self {
        let mut rows = vec![row];
        rows.extend_from_slice(&self.rows);
        let mut cols = vec![col];
        cols.extend_from_slice(&self.cols);
        CofactorIndex { rows, cols }
    }
}

/// Cofactor of any order. Empty index gives `det A`.
pub fn cofactor_gen<T: Scalar>(a: &Matrix<T>, idx: &CofactorIndex) -> Result<T> {
    let n = square_size(a)?;
    if idx.rows.len() != idx.cols.len() {
        return Err(Error::LengthMismatch { rows: idx.rows.len(), cols: idx.cols.len() });
    }
    check_range(n, &idx.rows)?;
    check_range(n, &idx.cols)?;
    if has_repeat(&idx.rows) || has_repeat(&idx.cols) {
        return Ok(T::zero());
    }
    signed_minor(a, &idx.rows, &idx.cols)
}

/// `det A` by second-order expansion along rows `j` and `p`, summing over
/// ordered column pairs.
pub fn laplace2_expand<T: Scalar>(a: &Matrix<T>, j: usize, p: usize) -> Result<T> {
    let n = square_size(a)?;
    check_range(n, &[j, p])?;
    if j == p {
        return Err(Error::EqualIndices(j));
    }
    let mut total = T::zero();
    for k in 1..=n {
        for q in 1..=n {
            if q == k {
                continue;
            }
            let w = a[(j - 1, k - 1)].clone() * a[(p - 1, q - 1)].clone();
            if w.is_zero() {
                continue;
            }
            total = total + w * cofactor2(a, j, p, k, q)?;
        }
    }
    Ok(total)
}

/// Same expansion over unordered column pairs weighted by 2x2 minors.
pub fn laplace2_expand_unordered<T: Scalar>(a: &Matrix<T>, j: usize, p: usize) -> Result<T> {
    let n = square_size(a)?;
    check_range(n, &[j, p])?;
    if j == p {
        return Err(Error::EqualIndices(j));
    }
    let e = |r: usize, c: usize| a[(r - 1, c - 1)].clone();
    let mut total = T::zero();
    for k in 1..n {
        for q in k + 1..=n {
            let minor = e(j, k) * e(p, q) - e(j, q) * e(p, k);
            if minor.is_zero() {
                continue;
            }
            total = total + minor * cofactor2(a, j, p, k, q)?;
        }
    }
    Ok(total)
}

/// Residual of Sylvester's cofactor identity
/// `C[pα,rβ]·C[qα,sβ] − C[pα,sβ]·C[qα,rβ] − C[pqα,rsβ]·C[α,β]`.
#[allow(clippy::too_many_arguments)]
pub fn check_sylvester<T: Scalar>(
    a: &Matrix<T>,
    p: usize,
    q: usize,
    r: usize,
    s: usize,
    alpha: &[usize],
    beta: &[usize],
) -> Result<T> {
    let n = square_size(a)?;
    if alpha.len() != beta.len() {
        return Err(Error::LengthMismatch { rows: alpha.len(), cols: beta.len() });
    }
    if n < 2 || alpha.len() > n - 2 {
        return Err(Error::IndexConflict(format!(
            "{} fixed indices leave no 2x2 block in a {n}x{n} matrix",
            alpha.len()
        )));
    }
    check_range(n, &[p, q, r, s])?;
    check_range(n, alpha)?;
    check_range(n, beta)?;
    if alpha.contains(&p) || alpha.contains(&q) {
        return Err(Error::IndexConflict("row indices p, q must not appear in alpha".into()));
    }
    if beta.contains(&r) || beta.contains(&s) {
        return Err(Error::IndexConflict("column indices r, s must not appear in beta".into()));
    }
    let base = CofactorIndex::new(alpha.to_vec(), beta.to_vec())?;
    let c = |row: usize, col: usize| cofactor_gen(a, &base.prepend(row, col));
    let mut rows2 = vec![p, q];
    rows2.extend_from_slice(alpha);
    let mut cols2 = vec![r, s];
    cols2.extend_from_slice(beta);
    let lhs = c(p, r)? * c(q, s)? - c(p, s)? * c(q, r)?;
    let rhs = cofactor_gen(a, &CofactorIndex::new(rows2, cols2)?)? * cofactor_gen(a, &base)?;
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn q(rows: Vec<Vec<i64>>) -> Matrix<BigRational> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(|x| rational(x, 1)).collect()).collect()).unwrap()
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1, 2).unwrap(), 2);
        assert_eq!(sigma(2, 1).unwrap(), 3);
        assert_eq!(sigma(3, 5).unwrap(), 7);
        assert_eq!(sigma(4, 4), Err(Error::EqualIndices(4)));
    }

    #[test]
    fn reindex_shifts_only_above() {
        assert_eq!(reindex_after_removal(3, 1).unwrap(), 1);
        assert_eq!(reindex_after_removal(3, 2).unwrap(), 2);
        assert_eq!(reindex_after_removal(3, 4).unwrap(), 3);
        assert_eq!(reindex_after_removal(1, 7).unwrap(), 6);
        assert!(reindex_after_removal(2, 2).is_err());
    }

    #[test]
    fn first_cofactors_of_two_node_matrix() {
        let y = q(vec![vec![3, -3], vec![-3, 3]]);
        assert_eq!(cofactor1(&y, 1, 1).unwrap(), rational(3, 1));
        assert_eq!(cofactor1(&y, 1, 2).unwrap(), rational(3, 1));
        assert_eq!(cofactor1(&Matrix::<BigRational>::identity(3), 1, 2).unwrap(), rational(0, 1));
    }

    #[test]
    fn second_cofactor_conventions() {
        let i3 = Matrix::<BigRational>::identity(3);
        assert_eq!(cofactor2(&i3, 1, 2, 1, 2).unwrap(), rational(1, 1));
        let a = q(vec![vec![5, 7], vec![11, 13]]);
        assert_eq!(cofactor2(&a, 1, 2, 1, 2).unwrap(), rational(1, 1));
        assert_eq!(cofactor2(&a, 2, 1, 1, 2).unwrap(), rational(-1, 1));
        assert_eq!(cofactor2(&a, 1, 1, 1, 2).unwrap(), rational(0, 1));
    }

    #[test]
    fn generalized_index_edges() {
        let a = q(vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        assert_eq!(cofactor_gen(&a, &CofactorIndex::empty()).unwrap(), det(&a).unwrap());
        let full = CofactorIndex::new(vec![1, 2, 3], vec![1, 2, 3]).unwrap();
        assert_eq!(cofactor_gen(&a, &full).unwrap(), rational(1, 1));
        let swapped = CofactorIndex::new(vec![2, 1, 3], vec![1, 2, 3]).unwrap();
        assert_eq!(cofactor_gen(&a, &swapped).unwrap(), rational(-1, 1));
        assert!(matches!(CofactorIndex::new(vec![1], vec![]), Err(Error::LengthMismatch { .. })));
        let out = CofactorIndex::new(vec![4], vec![1]).unwrap();
        assert!(matches!(cofactor_gen(&a, &out), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn laplace2_equal_columns_vanish() {
        let a = q(vec![vec![1, 1, 2], vec![3, 3, 5], vec![4, 4, 9]]);
        assert_eq!(laplace2_expand(&a, 1, 2).unwrap(), rational(0, 1));
        assert_eq!(laplace2_expand_unordered(&a, 2, 3).unwrap(), rational(0, 1));
    }

    #[test]
    fn sylvester_rejects_overlap() {
        let a = Matrix::<BigRational>::identity(4);
        assert!(matches!(check_sylvester(&a, 1, 2, 3, 4, &[1], &[2]), Err(Error::IndexConflict(_))));
        assert_eq!(check_sylvester(&a, 2, 2, 3, 4, &[1], &[1]).unwrap(), rational(0, 1));
    }
}
