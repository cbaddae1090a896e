use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, Tolerance};

pub const LEIBNIZ_LIMIT: usize = 9;

fn require_square<T>(a: &Matrix<T>) -> Result<usize> {
    if a.rows() != a.cols() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    Ok(a.rows())
}

/// Picks the pivot row for column `k` among rows `k..`. Exact scalars take the
/// first nonzero entry, floats the largest magnitude.
fn pivot_row<T: Scalar>(m: &Matrix<T>, k: usize) -> Option<usize> {
    let n = m.rows();
    if T::EXACT {
        (k..n).find(|&i| !m[(i, k)].is_zero())
    } else {
        let mut best = k;
        let mut best_mag = m[(k, k)].magnitude();
        for i in k + 1..n {
            let mag = m[(i, k)].magnitude();
            if mag > best_mag {
                best = i;
                best_mag = mag;
            }
        }
        if best_mag == 0.0 {
            None
        } else {
            Some(best)
        }
    }
}

/// Determinant. Exact scalars use fraction-free Bareiss elimination, floats
/// use LU with partial pivoting.
pub fn det<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    let n = require_square(a)?;
    if n == 0 {
        return Ok(T::one());
    }
    if T::EXACT {
        Ok(det_bareiss(a.clone()))
    } else {
        Ok(det_lu(a.clone()))
    }
}

fn det_bareiss<T: Scalar>(mut m: Matrix<T>) -> T {
    let n = m.rows();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        let Some(p) = pivot_row(&m, k) else {
            return T::zero();
        };
        if p != k {
            m.swap_rows(p, k);
            negate = !negate;
        }
        let pivot = m[(k, k)].clone();
        for i in k + 1..n {
            let lead = m[(i, k)].clone();
            for j in k + 1..n {
                let v = (pivot.clone() * m[(i, j)].clone() - lead.clone() * m[(k, j)].clone()) / prev.clone();
                m[(i, j)] = v;
            }
            m[(i, k)] = T::zero();
        }
        prev = pivot;
    }
    let d = m[(n - 1, n - 1)].clone();
    if negate {
        -d
    } else {
        d
    }
}

fn det_lu<T: Scalar>(mut m: Matrix<T>) -> T {
    let n = m.rows();
    let mut acc = T::one();
    for k in 0..n {
        let Some(p) = pivot_row(&m, k) else {
            return T::zero();
        };
        if p != k {
            m.swap_rows(p, k);
            acc = -acc;
        }
        let pivot = m[(k, k)].clone();
        for i in k + 1..n {
            let f = m[(i, k)].clone() / pivot.clone();
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = m[(i, j)].clone() - f.clone() * m[(k, j)].clone();
                m[(i, j)] = v;
            }
        }
        acc = acc * pivot;
    }
    acc
}

/// Determinant as the signed sum over all permutations. Reference oracle only.
pub fn det_leibniz<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    let n = require_square(a)?;
    if n > LEIBNIZ_LIMIT {
        return Err(Error::TooLarge { what: "Leibniz expansion", size: n, limit: LEIBNIZ_LIMIT });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = T::zero();
    // Heap's algorithm: every step is one transposition, so the sign alternates.
    let mut c = vec![0usize; n];
    let mut odd = false;
    let term = |perm: &[usize]| {
        let mut t = T::one();
        for (r, &col) in perm.iter().enumerate() {
            t = t * a[(r, col)].clone();
        }
        t
    };
    total = total + term(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            odd = !odd;
            let t = term(&perm);
            total = if odd { total - t } else { total + t };
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(total)
}

/// Solves `A X = B` for square nonsingular `A`.
pub fn solve_many<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    let n = require_square(a)?;
    if b.rows() != n {
        return Err(Error::DimensionMismatch(format!("{}x{} system with {} right-hand rows", n, n, b.rows())));
    }
    let m = b.cols();
    let mut w = Matrix::from_fn(n, n + m, |r, c| if c < n { a[(r, c)].clone() } else { b[(r, c - n)].clone() });
    let singular_below = if T::EXACT { 0.0 } else { f64::EPSILON * 64.0 * (n as f64) * a.max_magnitude() };
    for k in 0..n {
        let p = pivot_row(&w, k).ok_or(Error::Singular)?;
        if !T::EXACT && w[(p, k)].magnitude() <= singular_below {
            return Err(Error::Singular);
        }
        w.swap_rows(p, k);
        let pivot = w[(k, k)].clone();
        for c in k..n + m {
            let v = w[(k, c)].clone() / pivot.clone();
            w[(k, c)] = v;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = w[(i, k)].clone();
            if f.is_zero() {
                continue;
            }
            for c in k..n + m {
                let v = w[(i, c)].clone() - f.clone() * w[(k, c)].clone();
                w[(i, c)] = v;
            }
        }
    }
    Ok(Matrix::from_fn(n, m, |r, c| w[(r, n + c)].clone()))
}

pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let rhs = Matrix::from_fn(b.len(), 1, |r, _| b[r].clone());
    Ok(solve_many(a, &rhs)?.column(0))
}

pub fn inverse<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = require_square(a)?;
    solve_many(a, &Matrix::identity(n))
}

/// Rank by row reduction; float pivots below the tolerance count as zero.
pub fn rank<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> usize {
    let mut m = a.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let scale = a.max_magnitude();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best = None;
        let mut best_mag = 0.0;
        for i in r..rows {
            let x = &m[(i, c)];
            if x.is_zero_within(tol, scale) {
                continue;
            }
            if T::EXACT {
                best = Some(i);
                break;
            }
            if x.magnitude() > best_mag {
                best_mag = x.magnitude();
                best = Some(i);
            }
        }
        let Some(p) = best else { continue };
        m.swap_rows(p, r);
        let pivot = m[(r, c)].clone();
        for i in r + 1..rows {
            let f = m[(i, c)].clone() / pivot.clone();
            for j in c..cols {
                let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                m[(i, j)] = v;
            }
        }
        r += 1;
    }
    r
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
    fn small_determinants() {
        assert_eq!(det(&q(vec![vec![1, 2], vec![3, 4]])).unwrap(), rational(-2, 1));
        assert_eq!(det(&Matrix::<BigRational>::identity(3)).unwrap(), rational(1, 1));
        assert_eq!(det_leibniz(&q(vec![vec![0, 1], vec![1, 0]])).unwrap(), rational(-1, 1));
        assert_eq!(det_leibniz(&q(vec![vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 5]])).unwrap(), rational(30, 1));
        let f = Matrix::from_rows(vec![vec![1.0f64, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!((det(&f).unwrap() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_pivot_needs_row_swap() {
        let m = q(vec![vec![0, 2, 1], vec![1, 0, 0], vec![0, 1, 3]]);
        assert_eq!(det(&m).unwrap(), det_leibniz(&m).unwrap());
    }

    #[test]
    fn leibniz_guard() {
        let m = Matrix::<f64>::identity(10);
        assert!(matches!(det_leibniz(&m), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn solve_and_inverse() {
        let a = q(vec![vec![2, 1], vec![1, 3]]);
        let x = solve(&a, &[rational(3, 1), rational(5, 1)]).unwrap();
        assert_eq!(x, vec![rational(4, 5), rational(7, 5)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(2));
        assert_eq!(solve(&q(vec![vec![1, 1], vec![1, 1]]), &[rational(1, 1), rational(1, 1)]), Err(Error::Singular));
    }

    #[test]
    fn rank_of_laplacian() {
        let l = q(vec![vec![1, -1, 0], vec![-1, 2, -1], vec![0, -1, 1]]);
        assert_eq!(rank(&l, &Tolerance::ZERO), 2);
        let f = l.map(crate::scalar::rational_to_f64);
        assert_eq!(rank(&f, &Tolerance::default()), 2);
    }
}
