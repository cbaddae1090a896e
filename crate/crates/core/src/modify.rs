//! Expansion, contraction and augmentation of admittance matrices, with the
//! cofactor update formulas that predict the modified matrix's cofactors from
//! those of the original.
//!
//! Every function here takes the original matrix by reference and returns a
//! new value, so the direct recomputation is always available for checking.

use crate::error::{Error, Result};
use crate::linalg::{cofactor2, cofactor_gen, reindex_after_removal, CofactorIndex, Matrix};
use crate::scalar::Scalar;
use crate::solve::common_cofactor;

#[derive(Clone, Debug, PartialEq)]
pub enum ModKind<T> {
    /// New node `n + 1` attached to `k` through admittance `y`.
    Expand { k: usize, y: T },
    /// Nodes `j` and `k` identified; `k` disappears.
    Contract { j: usize, k: usize },
    /// Branch of admittance `y` added between `j` and `k`.
    Augment { j: usize, k: usize, y: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModRecord<T> {
    pub kind: ModKind<T>,
    pub nodes_before: usize,
    pub nodes_after: usize,
    /// `node_map[p - 1]` is the index of original node `p` afterwards.
    pub node_map: Vec<usize>,
}

impl<T> ModRecord<T> {
    pub fn map(&self, p: usize) -> Option<usize> {
        p.checked_sub(1).and_then(|i| self.node_map.get(i)).copied()
    }
}

fn square<T>(y: &Matrix<T>) -> Result<usize> {
    if !y.is_square() {
        return Err(Error::NotSquare { rows: y.rows(), cols: y.cols() });
    }
    Ok(y.rows())
}

fn check_nodes(n: usize, idx: &[usize]) -> Result<()> {
    for &x in idx {
        if x == 0 || x > n {
            return Err(Error::IndexOutOfRange { index: x, size: n });
        }
    }
    Ok(())
}

fn nonsingular<T: Scalar>(y: &Matrix<T>) -> Result<T> {
    let c = common_cofactor(y)?;
    if c.is_zero() {
        return Err(Error::SingularNetwork);
    }
    Ok(c)
}

/// Attaches a new node `n + 1` to node `k` through `y_new`.
pub fn expand<T: Scalar>(y: &Matrix<T>, k: usize, y_new: T) -> Result<(Matrix<T>, ModRecord<T>)> {
    let n = square(y)?;
    check_nodes(n, &[k])?;
    let nu = n + 1;
    let mut out = Matrix::from_fn(nu, nu, |r, c| if r < n && c < n { y[(r, c)].clone() } else { T::zero() });
    let kk = k - 1;
    out[(kk, kk)] = out[(kk, kk)].clone() + y_new.clone();
    out[(n, n)] = y_new.clone();
    out[(kk, n)] = -y_new.clone();
    out[(n, kk)] = -y_new.clone();
    let rec = ModRecord {
        kind: ModKind::Expand { k, y: y_new },
        nodes_before: n,
        nodes_after: nu,
        node_map: (1..=n).collect(),
    };
    Ok((out, rec))
}

/// First or second cofactor of the expanded matrix, from cofactors of the
/// original. Indices refer to the expanded matrix; `n + 1` is the new node.
pub fn expand_cofactor<T: Scalar>(y: &Matrix<T>, rec: &ModRecord<T>, idx: &CofactorIndex) -> Result<T> {
    let ModKind::Expand { k, y: y_new } = &rec.kind else {
        return Err(Error::UnknownCase("record is not an expansion".into()));
    };
    let (k, y_new) = (*k, y_new.clone());
    let n = square(y)?;
    let nu = n + 1;
    check_nodes(nu, &idx.rows)?;
    check_nodes(nu, &idx.cols)?;
    let c = common_cofactor(y)?;
    match idx.len() {
        1 => Ok(y_new * c),
        2 => {
            let (mut a, mut b, mut p, mut q) = (idx.rows[0], idx.rows[1], idx.cols[0], idx.cols[1]);
            if a == b || p == q {
                return Ok(T::zero());
            }
            let mut negate = false;
            if a == nu {
                std::mem::swap(&mut a, &mut b);
                negate = !negate;
            }
            if p == nu {
                std::mem::swap(&mut p, &mut q);
                negate = !negate;
            }
            let v = match (b == nu, q == nu) {
                (false, false) => y_new * cofactor2(y, a, b, p, q)?,
                (true, false) => y_new * cofactor2(y, a, k, p, q)?,
                (false, true) => y_new * cofactor2(y, a, b, p, k)?,
                (true, true) => c + y_new * cofactor2(y, a, k, p, k)?,
            };
            Ok(if negate { -v } else { v })
        }
        other => Err(Error::UnknownCase(format!("cofactor of order {other}"))),
    }
}

/// Identifies nodes `j` and `k`: row and column `k` are added into `j`, then
/// removed.
pub fn contract<T: Scalar>(y: &Matrix<T>, j: usize, k: usize) -> Result<(Matrix<T>, ModRecord<T>)> {
    let n = square(y)?;
    check_nodes(n, &[j, k])?;
    if j == k {
        return Err(Error::EqualIndices(j));
    }
    let (j0, k0) = (j - 1, k - 1);
    let mut b = y.clone();
    for c in 0..n {
        b[(j0, c)] = b[(j0, c)].clone() + y[(k0, c)].clone();
    }
    for r in 0..n {
        b[(r, j0)] = b[(r, j0)].clone() + b[(r, k0)].clone();
    }
    let out = b.without(&[k0], &[k0]);
    let node_map =
        (1..=n).map(|p| reindex_after_removal(k, if p == k { j } else { p }).expect("p differs from k")).collect();
    Ok((out, ModRecord { kind: ModKind::Contract { j, k }, nodes_before: n, nodes_after: n - 1, node_map }))
}

/// Every first cofactor of the contracted matrix: `C_{jk,jk}(Y)`.
pub fn contract_cofactor1<T: Scalar>(y: &Matrix<T>, j: usize, k: usize) -> Result<T> {
    cofactor2(y, j, k, j, k)
}

/// The bracketed expression `[C_{pq,rs} C_{jk,jk} - C_{pq,jk} C_{rs,jk}] / c(Y)`,
/// defined for any indices.
pub fn contraction_term<T: Scalar>(
    y: &Matrix<T>,
    j: usize,
    k: usize,
    p: usize,
    q: usize,
    r: usize,
    s: usize,
) -> Result<T> {
    let c = nonsingular(y)?;
    let lhs = cofactor2(y, p, q, r, s)? * cofactor2(y, j, k, j, k)?;
    let rhs = cofactor2(y, p, q, j, k)? * cofactor2(y, r, s, j, k)?;
    Ok((lhs - rhs) / c)
}

/// `C_{p'q',r's'}` of the matrix contracted on `j, k`, where primes denote
/// the renumbered indices. None of `p, q, r, s` may be `k`.
pub fn contract_cofactor2<T: Scalar>(
    y: &Matrix<T>,
    j: usize,
    k: usize,
    p: usize,
    q: usize,
    r: usize,
    s: usize,
) -> Result<T> {
    let n = square(y)?;
    check_nodes(n, &[j, k, p, q, r, s])?;
    if j == k {
        return Err(Error::EqualIndices(j));
    }
    if [p, q, r, s].contains(&k) {
        return Err(Error::IndexConflict(format!("index {k} is removed by the contraction")));
    }
    contraction_term(y, j, k, p, q, r, s)
}

/// `C_{jp',jq'}` of the contracted matrix as the third cofactor `C_{kjp,kjq}(Y)`.
pub fn contract_cofactor2_through_j<T: Scalar>(y: &Matrix<T>, j: usize, k: usize, p: usize, q: usize) -> Result<T> {
    if [p, q].iter().any(|x| *x == j || *x == k) {
        return Err(Error::IndexConflict("p and q must differ from j and k".into()));
    }
    cofactor_gen(y, &CofactorIndex::new(vec![k, j, p], vec![k, j, q])?)
}

/// `Z_{p'q'}` after contracting `j, k`: `Z_pq - tz(pq;jk)^2 / Z_jk`.
pub fn contracted_impedance<T: Scalar>(y: &Matrix<T>, j: usize, k: usize, p: usize, q: usize) -> Result<T> {
    let c = nonsingular(y)?;
    let z_pq = cofactor2(y, p, q, p, q)? / c.clone();
    let tz = cofactor2(y, p, q, j, k)? / c.clone();
    let z_jk = cofactor2(y, j, k, j, k)? / c;
    if z_jk.is_zero() {
        return Err(Error::SingularNetwork);
    }
    Ok(z_pq - tz.square() / z_jk)
}

/// Adds a branch of admittance `y_new` between `j` and `k`.
pub fn augment<T: Scalar>(y: &Matrix<T>, j: usize, k: usize, y_new: T) -> Result<(Matrix<T>, ModRecord<T>)> {
    let n = square(y)?;
    check_nodes(n, &[j, k])?;
    if j == k {
        return Err(Error::EqualIndices(j));
    }
    let (j0, k0) = (j - 1, k - 1);
    let mut out = y.clone();
    out[(j0, j0)] = out[(j0, j0)].clone() + y_new.clone();
    out[(k0, k0)] = out[(k0, k0)].clone() + y_new.clone();
    out[(j0, k0)] = out[(j0, k0)].clone() - y_new.clone();
    out[(k0, j0)] = out[(k0, j0)].clone() - y_new.clone();
    Ok((
        out,
        ModRecord {
            kind: ModKind::Augment { j, k, y: y_new },
            nodes_before: n,
            nodes_after: n,
            node_map: (1..=n).collect(),
        },
    ))
}

/// The same augmentation built as an expansion from `k` followed by a
/// contraction of `j` with the new node.
pub fn augment_by_expansion<T: Scalar>(y: &Matrix<T>, j: usize, k: usize, y_new: T) -> Result<Matrix<T>> {
    let (plus, _) = expand(y, k, y_new)?;
    let nu = plus.rows();
    Ok(contract(&plus, j, nu)?.0)
}

/// `c(Y) + y_new C_{jk,jk}(Y)`.
pub fn augment_cofactor1<T: Scalar>(y: &Matrix<T>, j: usize, k: usize, y_new: &T) -> Result<T> {
    Ok(common_cofactor(y)? + y_new.clone() * cofactor2(y, j, k, j, k)?)
}

/// `C_{pq,rs}` of the augmented matrix.
#[allow(clippy::too_many_arguments)]
pub fn augment_cofactor2<T: Scalar>(
    y: &Matrix<T>,
    j: usize,
    k: usize,
    y_new: &T,
    p: usize,
    q: usize,
    r: usize,
    s: usize,
) -> Result<T> {
    let n = square(y)?;
    check_nodes(n, &[j, k, p, q, r, s])?;
    Ok(cofactor2(y, p, q, r, s)? + y_new.clone() * contraction_term(y, j, k, p, q, r, s)?)
}
