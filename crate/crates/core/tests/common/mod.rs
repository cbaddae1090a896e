//! Fixtures and random generators shared by the integration tests.
#![allow(dead_code)]

use netkit::scalar::{exact_complex, rational};
use netkit::{BigRational, Complex64, ExactComplex, Network, Scalar};
use num_traits::Zero;
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    rational(n, d)
}

pub fn cx(re: (i64, i64), im: (i64, i64)) -> ExactComplex {
    exact_complex(q(re.0, re.1), q(im.0, im.1))
}

pub fn re(n: i64, d: i64) -> ExactComplex {
    cx((n, d), (0, 1))
}

pub fn to_c64(v: &ExactComplex) -> Complex64 {
    v.to_complex64().expect("finite")
}

pub fn to_float(net: &Network<ExactComplex>) -> Network<Complex64> {
    net.map_admittances(to_c64)
}

/// Four-node bridge: alpha 1-3, beta 2-3, gamma 1-4, delta 2-4, sigma 1-2, tau 3-4.
pub fn bridge(ys: [ExactComplex; 6]) -> Network<ExactComplex> {
    let [a, b, g, d, s, t] = ys;
    let mut net = Network::new(4);
    net.add_branch("alpha", 1, 3, a)
        .add_branch("beta", 2, 3, b)
        .add_branch("gamma", 1, 4, g)
        .add_branch("delta", 2, 4, d)
        .add_branch("sigma", 1, 2, s)
        .add_branch("tau", 3, 4, t);
    net
}

/// Inductively loaded bridge with b = 10 and epsilon = 1/10.
pub fn bridge_inductive() -> Network<ExactComplex> {
    bridge([
        cx((0, 1), (-10, 1)),
        cx((0, 1), (-1, 1)),
        cx((1, 1), (-1, 10)),
        cx((0, 1), (-1, 1)),
        re(0, 1),
        cx((0, 1), (-19, 2)),
    ])
}

/// The same bridge with conductances and susceptances exchanged.
pub fn bridge_reflected() -> Network<ExactComplex> {
    bridge([
        cx((10, 1), (-1, 10)),
        cx((1, 1), (-1, 10)),
        cx((0, 1), (-1, 1)),
        cx((1, 1), (-1, 10)),
        re(0, 1),
        cx((19, 2), (-1, 10)),
    ])
}

/// Small nonzero exact complex value with both parts in [-4, 4] over 1..=3.
pub fn small_complex<R: Rng>(rng: &mut R) -> ExactComplex {
    loop {
        let v = exact_complex(
            q(rng.gen_range(-4..=4), rng.gen_range(1..=3)),
            q(rng.gen_range(-4..=4), rng.gen_range(1..=3)),
        );
        if !v.is_zero() {
            return v;
        }
    }
}

/// Admittance with positive real part and arbitrary reactive part.
pub fn passive<R: Rng>(rng: &mut R) -> ExactComplex {
    exact_complex(q(rng.gen_range(1..=6), rng.gen_range(1..=3)), q(rng.gen_range(-4..=4), rng.gen_range(1..=3)))
}

/// Connected network on `n` nodes with `m >= n - 1` branches: a random
/// spanning tree plus random extra branches, parallel branches allowed.
pub fn random_connected<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    mut value: impl FnMut(&mut R) -> ExactComplex,
) -> Network<ExactComplex> {
    let mut net = Network::new(n);
    let mut k = 0;
    for v in 2..=n {
        let u = rng.gen_range(1..v);
        let y = value(rng);
        net.add_branch(format!("b{k}"), v, u, y);
        k += 1;
    }
    while k < m && n >= 2 {
        let a = rng.gen_range(1..=n);
        let mut b = rng.gen_range(1..=n);
        while b == a {
            b = rng.gen_range(1..=n);
        }
        let y = value(rng);
        net.add_branch(format!("b{k}"), a, b, y);
        k += 1;
    }
    net
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Two groups of private nodes, each joined to a shared port `p = 1`,
/// `q = 2` and never to each other. Every branch has positive conductance so
/// all solves are nonsingular.
pub fn two_sided<R: Rng>(rng: &mut R, na: usize, nb: usize) -> Network<ExactComplex> {
    let n = 2 + na + nb;
    let mut net = Network::new(n);
    let mut k = 0;
    let mut side = |net: &mut Network<ExactComplex>, nodes: Vec<usize>, tag: &str, rng: &mut R| {
        let mut pool = vec![1, 2];
        for &v in &nodes {
            let u = pool[rng.gen_range(0..pool.len())];
            net.add_branch(format!("{tag}{k}"), v, u, passive(rng));
            k += 1;
            pool.push(v);
        }
        // Tie the group to both port nodes and add a few chords.
        if let Some(&last) = nodes.last() {
            let other = if rng.gen_bool(0.5) { 1 } else { 2 };
            net.add_branch(format!("{tag}{k}"), last, other, passive(rng));
            k += 1;
        }
        for _ in 0..rng.gen_range(0..=2) {
            let a = pool[rng.gen_range(0..pool.len())];
            let b = pool[rng.gen_range(0..pool.len())];
            if a != b && !(a <= 2 && b <= 2) {
                net.add_branch(format!("{tag}{k}"), a, b, passive(rng));
                k += 1;
            }
        }
        // At least one source per side, from a private node to anywhere else.
        for s in 0..rng.gen_range(1..=2) {
            let a = nodes[rng.gen_range(0..nodes.len())];
            let mut b = pool[rng.gen_range(0..pool.len())];
            while b == a {
                b = pool[rng.gen_range(0..pool.len())];
            }
            net.add_current_source(format!("I{tag}{s}"), a, b, small_complex(rng));
        }
    };
    side(&mut net, (3..3 + na).collect(), "a", rng);
    side(&mut net, (3 + na..=n).collect(), "b", rng);
    net.add_branch("port", 1, 2, passive(rng));
    net
}
