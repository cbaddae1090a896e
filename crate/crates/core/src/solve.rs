//! Grounded node-voltage solutions, transfer impedances and the identities
//! that tie them together.

use crate::admittance::build;
use crate::error::{Error, Result};
use crate::linalg::{cofactor1, cofactor2, inverse, solve, Matrix};
use crate::network::Network;
use crate::scalar::{Scalar, Tolerance};

/// Node voltages with `v[ground - 1] = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundedSolution<T> {
    pub ground: usize,
    pub v: Vec<T>,
}

impl<T: Scalar> GroundedSolution<T> {
    /// Voltage at 1-based node `k`.
    pub fn at(&self, k: usize) -> &T {
        &self.v[k - 1]
    }

    /// The same solution shifted so that every voltage gains `e`.
    pub fn shifted(&self, e: &T) -> Vec<T> {
        self.v.iter().map(|x| x.clone() + e.clone()).collect()
    }
}

/// Inverse of `Y` with row and column `ground` removed.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix<T> {
    pub ground: usize,
    pub t: Matrix<T>,
}

impl<T: Scalar> TransferMatrix<T> {
    fn slot(&self, p: usize) -> Option<usize> {
        if p == self.ground {
            None
        } else if p < self.ground {
            Some(p - 1)
        } else {
            Some(p - 2)
        }
    }

    /// Entry for 1-based nodes `p`, `j`; zero when either is the ground.
    pub fn get(&self, p: usize, j: usize) -> T {
        match (self.slot(p), self.slot(j)) {
            (Some(a), Some(b)) => self.t[(a, b)].clone(),
            _ => T::zero(),
        }
    }

    /// `Z_pj = T_pp + T_jj - 2 T_pj` (both off-diagonal entries are used, so
    /// this also holds for unsymmetric matrices).
    pub fn impedance(&self, p: usize, j: usize) -> T {
        if p == j {
            return T::zero();
        }
        self.get(p, p) + self.get(j, j) - self.get(p, j) - self.get(j, p)
    }

    /// Voltage between `j` and `k` per unit current from `q` to `p`.
    pub fn transfer(&self, p: usize, q: usize, j: usize, k: usize) -> T {
        self.get(j, p) - self.get(j, q) - self.get(k, p) + self.get(k, q)
    }
}

fn check_node(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, size: n });
    }
    Ok(())
}

fn square(y: &Matrix<impl Scalar>) -> Result<usize> {
    if !y.is_square() {
        return Err(Error::NotSquare { rows: y.rows(), cols: y.cols() });
    }
    Ok(y.rows())
}

/// The common value of all first cofactors of a zero-sum matrix.
pub fn common_cofactor<T: Scalar>(y: &Matrix<T>) -> Result<T> {
    let n = square(y)?;
    if n == 0 {
        return Ok(T::one());
    }
    cofactor1(y, 1, 1)
}

fn nonsingular_c<T: Scalar>(y: &Matrix<T>) -> Result<T> {
    let c = common_cofactor(y)?;
    if c.is_zero() {
        return Err(Error::SingularNetwork);
    }
    Ok(c)
}

pub fn solve_grounded<T: Scalar>(
    y: &Matrix<T>,
    i: &[T],
    ground: usize,
    tol: &Tolerance,
) -> Result<GroundedSolution<T>> {
    let n = square(y)?;
    check_node(n, ground)?;
    if i.len() != n {
        return Err(Error::DimensionMismatch(format!("{} injections for {} nodes", i.len(), n)));
    }
    let total = i.iter().cloned().fold(T::zero(), |a, b| a + b);
    let scale = i.iter().map(|x| x.magnitude()).fold(0.0, f64::max);
    if !total.is_zero_within(tol, scale) {
        return Err(Error::UnbalancedInjection);
    }
    let g = ground - 1;
    let minor = y.without(&[g], &[g]);
    let rhs: Vec<T> = i.iter().enumerate().filter(|(k, _)| *k != g).map(|(_, x)| x.clone()).collect();
    let v_hat = solve(&minor, &rhs).map_err(|e| if e == Error::Singular { Error::SingularNetwork } else { e })?;
    let mut v = v_hat;
    v.insert(g, T::zero());
    Ok(GroundedSolution { ground, v })
}

/// Solves a network's branches under its independent current sources.
pub fn solve_network<T: Scalar>(net: &Network<T>, ground: usize, tol: &Tolerance) -> Result<GroundedSolution<T>> {
    solve_grounded(&build(net), &net.injections(), ground, tol)
}

/// Oracle: replaces row `ground` of `Y` by the unit row and its injection by 0.
pub fn solve_row_replacement<T: Scalar>(y: &Matrix<T>, i: &[T], ground: usize) -> Result<Vec<T>> {
    let n = square(y)?;
    check_node(n, ground)?;
    let g = ground - 1;
    let a = Matrix::from_fn(n, n, |r, c| {
        if r == g {
            if c == g {
                T::one()
            } else {
                T::zero()
            }
        } else {
            y[(r, c)].clone()
        }
    });
    let mut rhs = i.to_vec();
    rhs[g] = T::zero();
    solve(&a, &rhs).map_err(|e| if e == Error::Singular { Error::SingularNetwork } else { e })
}

pub fn transfer_matrix<T: Scalar>(y: &Matrix<T>, ground: usize) -> Result<TransferMatrix<T>> {
    let n = square(y)?;
    check_node(n, ground)?;
    let g = ground - 1;
    let t =
        inverse(&y.without(&[g], &[g])).map_err(|e| if e == Error::Singular { Error::SingularNetwork } else { e })?;
    Ok(TransferMatrix { ground, t })
}

/// `C_{pq,jk}(Y) / c(Y)`.
pub fn transfer_impedance_cofactor<T: Scalar>(y: &Matrix<T>, p: usize, q: usize, j: usize, k: usize) -> Result<T> {
    let n = square(y)?;
    for x in [p, q, j, k] {
        check_node(n, x)?;
    }
    if p == q || j == k {
        return Ok(T::zero());
    }
    let c = nonsingular_c(y)?;
    Ok(cofactor2(y, p, q, j, k)? / c)
}

/// The same quantity from the transfer matrix grounded at `k`.
pub fn transfer_impedance_tmatrix<T: Scalar>(y: &Matrix<T>, p: usize, q: usize, j: usize, k: usize) -> Result<T> {
    let n = square(y)?;
    for x in [p, q, j, k] {
        check_node(n, x)?;
    }
    if p == q || j == k {
        return Ok(T::zero());
    }
    Ok(transfer_matrix(y, k)?.transfer(p, q, j, k))
}

/// Voltage `v_j - v_k` per unit current entering at `p` and leaving at `q`.
/// Exact scalars go through cofactors, floats through the transfer matrix.
pub fn transfer_impedance<T: Scalar>(y: &Matrix<T>, p: usize, q: usize, j: usize, k: usize) -> Result<T> {
    if T::EXACT {
        transfer_impedance_cofactor(y, p, q, j, k)
    } else {
        transfer_impedance_tmatrix(y, p, q, j, k)
    }
}

pub fn driving_point_impedance<T: Scalar>(y: &Matrix<T>, j: usize, k: usize) -> Result<T> {
    transfer_impedance(y, j, k, j, k)
}

/// All driving-point impedances, `Z[(j-1, k-1)] = Z_jk`.
pub fn impedance_table<T: Scalar>(y: &Matrix<T>) -> Result<Matrix<T>> {
    let n = square(y)?;
    let mut z: Matrix<T> = Matrix::zeros(n, n);
    if n < 2 {
        return Ok(z);
    }
    if T::EXACT {
        let c = nonsingular_c(y)?;
        for j in 1..=n {
            for k in j + 1..=n {
                let v = cofactor2(y, j, k, j, k)? / c.clone();
                z[(j - 1, k - 1)] = v.clone();
                z[(k - 1, j - 1)] = v;
            }
        }
    } else {
        let t = transfer_matrix(y, n)?;
        for j in 1..=n {
            for k in j + 1..=n {
                let v = t.impedance(j, k);
                z[(j - 1, k - 1)] = v.clone();
                z[(k - 1, j - 1)] = v;
            }
        }
    }
    Ok(z)
}

/// `(Z_pk + Z_qj - Z_pj - Z_qk) / 2`.
pub fn transfer_from_dp<T: Scalar>(z_pk: &T, z_qj: &T, z_pj: &T, z_qk: &T) -> T {
    (z_pk.clone() + z_qj.clone() - z_pj.clone() - z_qk.clone()) / T::from_i64(2)
}

/// `tz(pq;jk) + tz(jp;qk) + tz(qj;pk)`, zero for every network.
pub fn jacobi_residual<T: Scalar>(y: &Matrix<T>, p: usize, q: usize, j: usize, k: usize) -> Result<T> {
    Ok(transfer_impedance(y, p, q, j, k)? + transfer_impedance(y, j, p, q, k)? + transfer_impedance(y, q, j, p, k)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FosterReport<T> {
    /// Sum over node pairs of branch admittance times driving-point impedance.
    pub sum: T,
    /// `sum - (n - 1)`.
    pub residual: T,
    /// Per-node current-law residuals `sum_k y_jk tz(jp;jk) - 1`, keyed by `(j, p)`.
    pub node_residuals: Vec<((usize, usize), T)>,
}

pub fn check_foster<T: Scalar>(y: &Matrix<T>) -> Result<FosterReport<T>> {
    let n = square(y)?;
    nonsingular_c(y)?;
    let z = impedance_table(y)?;
    let mut sum = T::zero();
    for j in 1..=n {
        for k in j + 1..=n {
            let y_jk = -y[(j - 1, k - 1)].clone();
            sum = sum + y_jk * z[(j - 1, k - 1)].clone();
        }
    }
    let residual = sum.clone() - T::from_i64(n as i64 - 1);
    let mut node_residuals = Vec::new();
    for j in 1..=n {
        for p in 1..=n {
            if p == j {
                continue;
            }
            let mut acc = T::zero();
            for k in 1..=n {
                if k == j {
                    continue;
                }
                let y_jk = -y[(j - 1, k - 1)].clone();
                if y_jk.is_zero() {
                    continue;
                }
                acc = acc + y_jk * transfer_impedance(y, j, p, j, k)?;
            }
            node_residuals.push(((j, p), acc - T::one()));
        }
    }
    Ok(FosterReport { sum, residual, node_residuals })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TellegenReport<T> {
    /// Sum of `v_a i_a` over branches and sources.
    pub residual: T,
    /// Sum of `conj(v_a) i_a`.
    pub residual_conj_v: T,
    /// Sum of `v_a conj(i_a)`.
    pub residual_conj_i: T,
    /// `v^T i`.
    pub total_power: T,
    /// `v^T Y v` restricted to the non-ground nodes.
    pub power_quadratic: T,
    /// `i^T T i` restricted to the non-ground nodes.
    pub power_transfer: T,
}

/// Branch and source sums for a solved network with current sources only.
pub fn check_tellegen<T: Scalar>(
    net: &Network<T>,
    sol: &GroundedSolution<T>,
    tol: &Tolerance,
) -> Result<TellegenReport<T>> {
    let n = net.n();
    if sol.v.len() != n {
        return Err(Error::DimensionMismatch(format!("{} voltages for {} nodes", sol.v.len(), n)));
    }
    if !net.voltage_sources.is_empty() || !net.dependent_sources.is_empty() {
        return Err(Error::PreconditionViolated("only current sources are supported here".into()));
    }
    let y = build(net);
    let i = net.injections();
    let yv = y.mul_vec(&sol.v)?;
    let scale = i.iter().chain(yv.iter()).map(|x| x.magnitude()).fold(0.0, f64::max);
    for (k, (a, b)) in yv.iter().zip(&i).enumerate() {
        if !(a.clone() - b.clone()).is_zero_within(tol, scale) {
            return Err(Error::InconsistentSolution(format!("node {} residual {:?}", k + 1, a.clone() - b.clone())));
        }
    }
    let v = |k: usize| sol.v[k - 1].clone();
    let mut terms: Vec<(T, T)> = Vec::new();
    for b in &net.branches {
        let drop = v(b.head) - v(b.tail);
        terms.push((drop.clone(), b.y.clone() * drop));
    }
    for s in &net.current_sources {
        // Inside the source the current runs from `from` to `to`.
        terms.push((v(s.from) - v(s.to), s.value.clone()));
    }
    let mut r = T::zero();
    let mut rcv = T::zero();
    let mut rci = T::zero();
    for (dv, di) in &terms {
        r = r + dv.clone() * di.clone();
        rcv = rcv + dv.conj() * di.clone();
        rci = rci + dv.clone() * di.conj();
    }
    let total_power = sol.v.iter().zip(&i).fold(T::zero(), |a, (x, c)| a + x.clone() * c.clone());
    let g = sol.ground - 1;
    let v_hat: Vec<T> = sol.v.iter().enumerate().filter(|(k, _)| *k != g).map(|(_, x)| x.clone()).collect();
    let i_hat: Vec<T> = i.iter().enumerate().filter(|(k, _)| *k != g).map(|(_, x)| x.clone()).collect();
    let minor = y.without(&[g], &[g]);
    let yv_hat = minor.mul_vec(&v_hat)?;
    let power_quadratic = v_hat.iter().zip(&yv_hat).fold(T::zero(), |a, (x, w)| a + x.clone() * w.clone());
    let t = transfer_matrix(&y, sol.ground)?;
    let ti = t.t.mul_vec(&i_hat)?;
    let power_transfer = i_hat.iter().zip(&ti).fold(T::zero(), |a, (x, w)| a + x.clone() * w.clone());
    Ok(TellegenReport {
        residual: r,
        residual_conj_v: rcv,
        residual_conj_i: rci,
        total_power,
        power_quadratic,
        power_transfer,
    })
}
