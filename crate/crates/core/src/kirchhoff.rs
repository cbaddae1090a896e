//! The Kirchhoff characteristic: the sum over spanning trees of the product
//! of branch admittances, equal to every first cofactor of the admittance
//! matrix.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::admittance::build;
use crate::error::{Error, Result};
use crate::graph::{MultiGraph, ENUMERATION_LIMIT};
use crate::linalg::{cofactor2, Matrix};
use crate::network::Network;
use crate::scalar::Scalar;
use crate::solve::{common_cofactor, driving_point_impedance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaMethod {
    TreeSum,
    Cofactor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KirchhoffValue<T> {
    pub value: T,
    pub method: KappaMethod,
}

fn tree_product<T: Scalar>(net: &Network<T>, tree: &[usize]) -> T {
    tree.iter().fold(T::one(), |acc, &id| acc * net.branches[id].y.clone())
}

/// Sum of admittance products over all spanning trees.
pub fn kappa_trees<T: Scalar>(net: &Network<T>) -> Result<KirchhoffValue<T>> {
    let value = if net.n() <= 1 {
        T::one()
    } else {
        net.graph().spanning_trees()?.iter().fold(T::zero(), |acc, t| acc + tree_product(net, t))
    };
    Ok(KirchhoffValue { value, method: KappaMethod::TreeSum })
}

/// `C_{1,1}(Y)`.
pub fn kappa_cofactor<T: Scalar>(y: &Matrix<T>) -> Result<KirchhoffValue<T>> {
    Ok(KirchhoffValue { value: common_cofactor(y)?, method: KappaMethod::Cofactor })
}

/// κ of a network through its admittance matrix.
pub fn kappa<T: Scalar>(net: &Network<T>) -> Result<T> {
    common_cofactor(&build(net))
}

/// Number of spanning trees, from the unit-weight Laplacian.
pub fn count_trees(g: &MultiGraph) -> Result<BigInt> {
    let mut lap: Matrix<BigRational> = Matrix::zeros(g.n(), g.n());
    for e in g.edges() {
        let (a, b) = (e.from - 1, e.to - 1);
        lap[(a, a)] = lap[(a, a)].clone() + BigRational::one();
        lap[(b, b)] = lap[(b, b)].clone() + BigRational::one();
        lap[(a, b)] = lap[(a, b)].clone() - BigRational::one();
        lap[(b, a)] = lap[(b, a)].clone() - BigRational::one();
    }
    let c = common_cofactor(&lap)?;
    debug_assert!(c.is_integer());
    Ok(c.to_integer())
}

fn check_node(net_n: usize, x: usize) -> Result<()> {
    if x == 0 || x > net_n {
        return Err(Error::IndexOutOfRange { index: x, size: net_n });
    }
    Ok(())
}

/// `κ(N^{[jk]}) / κ(N)` with the numerator summed over pairs of disjoint
/// trees separating `j` from `k`.
pub fn resistance_distance_trees<T: Scalar>(net: &Network<T>, j: usize, k: usize) -> Result<T> {
    check_node(net.n(), j)?;
    check_node(net.n(), k)?;
    if j == k {
        return Ok(T::zero());
    }
    let g = net.graph();
    if !g.is_connected(&[]) {
        return Err(Error::Disconnected);
    }
    let denom = kappa_trees(net)?.value;
    if denom.is_zero() {
        return Err(Error::SingularNetwork);
    }
    let num =
        g.tree_pairs(j, k)?.iter().fold(T::zero(), |acc, (a, b)| acc + tree_product(net, a) * tree_product(net, b));
    Ok(num / denom)
}

/// Driving-point impedance between `j` and `k`. Small networks go through
/// tree pairs, larger ones through cofactors.
pub fn resistance_distance<T: Scalar>(net: &Network<T>, j: usize, k: usize) -> Result<T> {
    check_node(net.n(), j)?;
    check_node(net.n(), k)?;
    if !net.graph().is_connected(&[]) {
        return Err(Error::Disconnected);
    }
    if net.n() <= 10 && net.branches.len() <= ENUMERATION_LIMIT {
        resistance_distance_trees(net, j, k)
    } else {
        driving_point_impedance(&build(net), j, k)
    }
}

fn branch<T>(net: &Network<T>, alpha: usize) -> Result<(usize, usize)> {
    net.branches.get(alpha).map(|b| (b.head, b.tail)).ok_or_else(|| Error::UnknownBranch(format!("#{alpha}")))
}

/// Network with branch `alpha` contracted: its endpoints are identified and
/// every branch between them disappears.
pub fn contract_branch<T: Scalar>(net: &Network<T>, alpha: usize) -> Result<Network<T>> {
    let (h, t) = branch(net, alpha)?;
    net.contract(h.min(t), h.max(t))
}

/// `κ(N) - κ(N - α) - y_α κ(N ∘ α)`.
pub fn check_deletion_contraction<T: Scalar>(net: &Network<T>, alpha: usize) -> Result<T> {
    branch(net, alpha)?;
    let y = net.branches[alpha].y.clone();
    let whole = kappa(net)?;
    let deleted = kappa(&net.delete_branch(alpha)?)?;
    let contracted = kappa(&contract_branch(net, alpha)?)?;
    Ok(whole - deleted - y * contracted)
}

/// `∂κ/∂y_α = κ(N ∘ α)`.
pub fn kappa_derivative<T: Scalar>(net: &Network<T>, alpha: usize) -> Result<T> {
    kappa(&contract_branch(net, alpha)?)
}

/// κ with branch `alpha` set to `value`.
pub fn kappa_with_branch<T: Scalar>(net: &Network<T>, alpha: usize, value: T) -> Result<T> {
    branch(net, alpha)?;
    let mut m = net.clone();
    m.branches[alpha].y = value;
    kappa(&m)
}

/// Central difference `(κ(y + h) - κ(y - h)) / 2h`.
pub fn kappa_derivative_fd<T: Scalar>(net: &Network<T>, alpha: usize, h: T) -> Result<T> {
    let y = branch(net, alpha).map(|_| net.branches[alpha].y.clone())?;
    let up = kappa_with_branch(net, alpha, y.clone() + h.clone())?;
    let down = kappa_with_branch(net, alpha, y - h.clone())?;
    Ok((up - down) / (h.clone() + h))
}

/// Coefficient of `y_α` in the multilinear form: `κ(y_α = 1) - κ(y_α = 0)`.
pub fn kappa_coefficient<T: Scalar>(net: &Network<T>, alpha: usize) -> Result<T> {
    Ok(kappa_with_branch(net, alpha, T::one())? - kappa_with_branch(net, alpha, T::zero())?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kcon2Report<T> {
    /// `κ^{[jk]} κ^{[pq]} - κ κ^{[jk][pq]}`.
    pub lhs: T,
    /// `C_{pq,jk}(Y)^2`.
    pub cofactor_squared: T,
    pub residual: T,
    /// Left side of the same identity built by deleting and contracting one
    /// branch on each pair, when both pairs carry a branch. Equals
    /// `cofactor_squared`.
    pub branch_variant: Option<T>,
}

fn pair_branch<T>(net: &Network<T>, a: usize, b: usize) -> Option<usize> {
    net.branches.iter().position(|br| (br.head == a && br.tail == b) || (br.head == b && br.tail == a))
}

pub fn check_kcon2<T: Scalar>(net: &Network<T>, j: usize, k: usize, p: usize, q: usize) -> Result<Kcon2Report<T>> {
    let n = net.n();
    for x in [j, k, p, q] {
        check_node(n, x)?;
    }
    if j == k || p == q {
        return Err(Error::IndexConflict("each pair needs two distinct nodes".into()));
    }
    if (j.min(k), j.max(k)) == (p.min(q), p.max(q)) {
        return Err(Error::IndexConflict("the two pairs coincide".into()));
    }
    let y = build(net);
    let c = cofactor2(&y, p, q, j, k)?;
    let cofactor_squared = c.square();
    let whole = kappa(net)?;
    let con_jk = net.contract(j, k)?;
    let k_jk = kappa(&con_jk)?;
    let k_pq = kappa(&net.contract(p, q)?)?;
    let (p2, q2) = (Network::<T>::contracted_index(j, k, p), Network::<T>::contracted_index(j, k, q));
    let k_both = kappa(&con_jk.contract(p2.min(q2), p2.max(q2))?)?;
    let lhs = k_jk * k_pq - whole * k_both.clone();
    let residual = lhs.clone() - cofactor_squared.clone();

    let branch_variant = match (pair_branch(net, j, k), pair_branch(net, p, q)) {
        (Some(a), Some(b)) => {
            let del_b = net.delete_branch(b)?;
            let del_a = net.delete_branch(a)?;
            let con_a_del_b = kappa(&del_b.contract(j, k)?)?;
            let con_b_del_a = kappa(&del_a.contract(p, q)?)?;
            let del_both = kappa(&del_b.delete_branch(if a > b { a - 1 } else { a })?)?;
            Some(con_a_del_b * con_b_del_a - del_both * k_both)
        }
        _ => None,
    };
    Ok(Kcon2Report { lhs, cofactor_squared, residual, branch_variant })
}
