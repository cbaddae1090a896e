mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use common::*;
use netkit::admittance::build;
use netkit::netprops::{
    assign_phase_angles, branch_power, bridge_separates, check_cone, check_dc_orientability, check_dendromorphic,
    check_metric, gbrx, gbrx_from_impedance, impedance_from_branch_voltages, metric_table, propagate_voltage,
    rayleigh_fd, rayleigh_sensitivity, triangle_equalities, Direction, FlowEnd, Gcrl, PhaseInterval, Phasor,
};
use netkit::solve::{driving_point_impedance, impedance_table, solve_network};
use netkit::{BigRational, Complex64, Error, Network, Tolerance};
use num_complex::Complex;
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn dc_network(seed: u64, n: usize, extra: usize) -> Network<BigRational> {
    let mut g = rng(seed);
    let net = random_connected(&mut g, n, n - 1 + extra, |r| re(r.gen_range(1..=6), r.gen_range(1..=3)));
    net.map_admittances(|y| y.re.clone())
}

/// Lossless lines from a generator at node 2 (grounded at 1) with a
/// resistive load at every other node.
fn loaded_chain(x: f64, load: f64, current: f64) -> Network<Complex64> {
    let mut net = Network::new(6);
    for (k, (a, b)) in [(2, 3), (3, 4), (4, 5), (3, 6)].into_iter().enumerate() {
        net.add_branch(format!("line{k}"), a, b, c(0.0, -1.0 / x));
    }
    for k in 3..=6 {
        net.add_branch(format!("load{k}"), k, 1, c(load, 0.0));
    }
    net.add_current_source("G", 1, 2, c(current, 0.0));
    net
}

/// Branches connecting nodes 2..=n among themselves, plus one tie to the
/// ground node 1, so the network stays connected with ground removed.
fn grounded_lines<R: Rng>(
    g: &mut R,
    n: usize,
    extra: usize,
    mut value: impl FnMut(&mut R) -> netkit::ExactComplex,
) -> Network<Complex64> {
    let inner = random_connected(g, n - 1, n - 2 + extra, &mut value);
    let mut net = Network::new(n);
    for b in &inner.branches {
        net.add_branch(b.name.clone(), b.head + 1, b.tail + 1, to_c64(&b.y));
    }
    let tie = g.gen_range(2..=n);
    let y = to_c64(&value(g));
    net.add_branch("tie", tie, 1, y);
    net
}

#[test]
fn phasor_parts() {
    let p = Phasor::from_polar(2.0, FRAC_PI_4 + 0.1);
    assert!((p.re() - 2.0 * (FRAC_PI_4 + 0.1).cos()).abs() < 1e-15);
    assert!((p.im() - 2.0 * (FRAC_PI_4 + 0.1).sin()).abs() < 1e-15);
    assert!((p.phase().unwrap() - (FRAC_PI_4 + 0.1)).abs() < 1e-15);
    assert_eq!(Phasor(c(0.0, 0.0)).phase(), None);
}

#[test]
fn immittance_examples() {
    let (w, cap) = (3.0, 0.25);
    let k = gbrx(&c(0.0, w * cap)).unwrap();
    assert_eq!(k.b, w * cap);
    assert!((k.x + 1.0 / (w * cap)).abs() < 1e-15);
    let k = gbrx(&Complex::new(q(4, 1), q(0, 1))).unwrap();
    assert_eq!((k.r, k.x, k.b), (q(1, 4), q(0, 1), q(0, 1)));
    assert_eq!(gbrx(&c(0.0, 0.0)), Err(Error::ZeroImmittance));
    for b in [-5.0, -0.1, 0.0, 2.0, 40.0] {
        assert!(gbrx(&c(0.3, b)).unwrap().r > 0.0);
    }
}

#[test]
fn dc_orientation_examples() {
    // Series chain, current from 4 into 1.
    let mut chain = Network::new(4);
    chain.add_branch("a", 1, 2, q(1, 1)).add_branch("b", 2, 3, q(2, 1)).add_branch("c", 3, 4, q(3, 1));
    chain.add_current_source("I", 4, 1, q(1, 1));
    let sol = solve_network(&chain, 4, &tol()).unwrap();
    assert!(sol.v.windows(2).all(|w| w[0] > w[1]));
    assert!(check_dc_orientability(&chain, &sol, 1, 4, &tol()).unwrap().holds());

    let mut wheat =
        bridge([re(2, 1), re(3, 1), re(5, 1), re(7, 1), re(0, 1), re(1, 1)]).map_admittances(|y| y.re.clone());
    wheat.add_current_source("I", 2, 1, q(1, 1));
    let sol = solve_network(&wheat, 2, &tol()).unwrap();
    let r = check_dc_orientability(&wheat, &sol, 1, 2, &tol()).unwrap();
    assert!(r.holds() && r.equal_to_p.is_empty() && r.equal_to_q.is_empty());
    assert!((1..=4).all(|k| sol.at(k) <= sol.at(1) && sol.at(k) >= sol.at(2)));

    // Node 4 hangs off node 1, so it sits at v_1.
    let mut hang = Network::new(4);
    hang.add_branch("a", 1, 2, q(1, 1)).add_branch("b", 2, 3, q(1, 1)).add_branch("c", 1, 4, q(5, 1));
    hang.add_current_source("I", 3, 1, q(2, 1));
    let sol = solve_network(&hang, 3, &tol()).unwrap();
    let r = check_dc_orientability(&hang, &sol, 1, 3, &tol()).unwrap();
    assert!(r.holds());
    assert_eq!(r.equal_to_p, vec![4]);
    assert!(bridge_separates(&hang, 1, 4, 3));
}

#[test]
fn metric_examples() {
    let wheat =
        bridge([re(2, 1), re(3, 1), re(5, 1), re(7, 1), re(11, 1), re(13, 1)]).map_admittances(|y| y.re.clone());
    assert!(check_metric(&impedance_table(&build(&wheat)).unwrap(), 0.0, &tol()).unwrap().is_metric());

    let z = impedance_table(&build(&bridge_inductive())).unwrap();
    assert!(check_metric(&z, FRAC_PI_2, &tol()).unwrap().violations.is_empty());
    for theta in [0.0, FRAC_PI_4] {
        assert!(check_metric(&z, theta, &tol()).unwrap().violations.contains(&(1, 3, 4)), "theta {theta}");
    }
    let z = impedance_table(&build(&bridge_reflected())).unwrap();
    assert!(check_metric(&z, 0.0, &tol()).unwrap().violations.is_empty());
    for theta in [FRAC_PI_2, FRAC_PI_4] {
        assert!(!check_metric(&z, theta, &tol()).unwrap().violations.is_empty(), "theta {theta}");
    }
}

#[test]
fn rayleigh_examples() {
    let balanced = bridge([re(2, 1), re(4, 1), re(3, 1), re(6, 1), re(1, 1), re(5, 1)]);
    let y = build(&balanced);
    // Branch tau joins 3 and 4, conjugate to the pair (1, 2).
    assert!(rayleigh_sensitivity(&y, 1, 2, 3, 4).unwrap().is_zero());
    let z12 = driving_point_impedance(&y, 1, 2).unwrap();
    assert_eq!(rayleigh_sensitivity(&y, 1, 2, 1, 2).unwrap(), -(z12.clone() * z12));

    let net = to_float(&bridge_reflected());
    let yf = build(&net);
    for (a, br) in net.branches.iter().enumerate() {
        let exact = rayleigh_sensitivity(&yf, 1, 2, br.head, br.tail).unwrap();
        let fd = rayleigh_fd(&net, 1, 2, a, c(1e-7, 0.0)).unwrap();
        assert!((exact - fd).norm() <= 1e-5 * exact.norm().max(1e-12), "{}: {exact} vs {fd}", br.name);
    }
}

#[test]
fn power_flow_examples() {
    let mut net = Network::new(3);
    net.add_branch("R", 1, 2, c(2.0, 0.0)).add_branch("L", 2, 3, c(0.0, -0.5)).add_branch("load", 3, 1, c(1.0, -1.0));
    net.add_current_source("I", 1, 2, c(1.0, 0.2));
    let sol = solve_network(&net, 1, &tol()).unwrap();
    let r = branch_power(&net, &sol, &tol()).unwrap();
    let (res, ind) = (&r.branches[0], &r.branches[1]);
    assert!((res.s_plus.im - res.s_minus.im).abs() < 1e-12);
    assert!(ind.s_plus.im - ind.s_minus.im > 0.0);
    assert!(r.branches.iter().all(|b| (b.mu - b.mu_tail).abs() < 1e-12));
    assert!(r.max_node_residual() < 1e-12 && r.max_identity_residual() < 1e-12);
}

#[test]
fn cone_examples() {
    let mut g = rng(21);
    for _ in 0..20 {
        let ind = random_connected(&mut g, 6, 9, |r| cx((r.gen_range(0..=3), 1), (-r.gen_range(1..=4), 1)));
        let r = check_cone(&to_float(&ind), &PhaseInterval::closed(-FRAC_PI_2, 0.0), 1e-12).unwrap();
        assert!(r.holds());
        let z = impedance_table(&build(&to_float(&ind))).unwrap();
        assert!(z.data().iter().all(|v| v.norm() == 0.0 || (v.arg() > 0.0 && v.arg() <= PI)));
        let res = random_connected(&mut g, 6, 9, |r| re(r.gen_range(1..=5), 1));
        assert!(check_cone(&to_float(&res), &PhaseInterval::trivial(), 1e-12).unwrap().holds());
    }
    let bad = bridge_inductive();
    assert!(matches!(
        check_cone(&to_float(&bad), &PhaseInterval::closed(0.0, FRAC_PI_4), 1e-12),
        Err(Error::PhaseOutsideInterval(_))
    ));
}

#[test]
fn voltage_propagation_examples() {
    let z = c(0.0, 1.0);
    assert_eq!(propagate_voltage(1.3, c(0.0, 0.0), z, FlowEnd::AtJ, Direction::JToK).unwrap(), vec![1.3]);
    // Forward solve with v_j = 1: i = conj(s) / conj(v_j), v_k = v_j - z i.
    let s = c(0.1, 0.1);
    let i = s.conj();
    let vk = c(1.0, 0.0) - z * i;
    let far = propagate_voltage(1.0, s, z, FlowEnd::AtJ, Direction::JToK).unwrap();
    assert_eq!(far.len(), 1);
    assert!((far[0] - vk.norm()).abs() < 1e-15 && (far[0] - 0.82f64.sqrt()).abs() < 1e-15);
    let sk = vk * i.conj();
    let back = propagate_voltage(vk.norm(), sk, z, FlowEnd::AtK, Direction::KToJ).unwrap();
    assert!(back.iter().any(|v| (v - 1.0).abs() < 1e-12), "{back:?}");
    let ahead = propagate_voltage(1.0, sk, z, FlowEnd::AtK, Direction::JToK).unwrap();
    assert!(ahead.iter().any(|v| (v - vk.norm()).abs() < 1e-12), "{ahead:?}");
    assert_eq!(propagate_voltage(0.1, c(5.0, 5.0), z, FlowEnd::AtK, Direction::JToK), Err(Error::NoRealRoot));
}

#[test]
fn phase_angles_fall_away_from_the_generator() {
    let net = loaded_chain(0.05, 0.25, 1.0);
    let sol = solve_network(&net, 1, &tol()).unwrap();
    let a = assign_phase_angles(&net, &sol, &tol()).unwrap();
    assert!(a.holds(), "{a:?}");
    let d = |k: usize| a.delta[k - 1].unwrap();
    assert!(d(2) > d(3) && d(3) > d(4) && d(4) > d(5) && d(3) > d(6));
    assert_eq!(a.max_nodes, vec![2]);
    assert!(a.congruence_residual < 1e-9);

    // Small angles: active power over each line is close to the angle drop over x.
    let flow = branch_power(&net, &sol, &tol()).unwrap();
    for (k, b) in net.branches.iter().enumerate().take(4) {
        let approx = (d(b.head) - d(b.tail)) / 0.05;
        let p = flow.branches[k].s_plus.re;
        assert!((approx - p).abs() <= 0.05 * p.abs(), "{}: {approx} vs {p}", b.name);
    }
}

#[test]
fn lossless_network_has_no_active_power() {
    let mut g = rng(4);
    for _ in 0..10 {
        let mut net = grounded_lines(&mut g, 6, 3, |r| cx((0, 1), (-r.gen_range(1..=5), 1)));
        net.add_current_source("G", 1, 2, c(1.0, 0.0));
        let sol = solve_network(&net, 1, &tol()).unwrap();
        let flow = branch_power(&net, &sol, &tol()).unwrap();
        assert!(flow.branches.iter().all(|b| b.s_plus.re.abs() < 1e-12));
        let a = assign_phase_angles(&net, &sol, &tol()).unwrap();
        let set: Vec<f64> = a.delta.iter().flatten().copied().collect();
        assert!(set.iter().all(|d| (d - set[0]).abs() < 1e-9), "{set:?}");
    }
}

#[test]
fn spread_of_current_phases() {
    let mut tree = Network::new(5);
    tree.add_branch("a", 1, 2, c(1.0, -3.0)).add_branch("b", 2, 3, c(0.0, 2.0)).add_branch("c", 2, 4, c(5.0, 0.0));
    tree.add_branch("d", 4, 5, c(-1.0, 1.0));
    assert!(check_dendromorphic(&tree, &PhaseInterval::trivial(), &tol()).unwrap().dendromorphic());

    // Every admittance has phase -pi/3, so all currents align.
    let mut g = rng(9);
    let ratio = Complex64::from_polar(1.0, -PI / 3.0);
    let common =
        to_float(&random_connected(&mut g, 6, 10, |r| re(r.gen_range(1..=5), 1))).map_admittances(|y| y * ratio);
    assert!(check_dendromorphic(&common, &PhaseInterval::trivial(), &tol()).unwrap().dendromorphic());

    let wheat = to_float(&bridge_inductive());
    let r = check_dendromorphic(&wheat, &PhaseInterval::closed(-FRAC_PI_4, FRAC_PI_4), &tol()).unwrap();
    assert!(!r.dendromorphic());
    assert!(r.required_spread > FRAC_PI_2, "{}", r.required_spread);
}

proptest! {
    #[test]
    fn immittance_round_trip(g in -20i64..=20, b in -20i64..=20, d in 1i64..=7) {
        prop_assume!(g != 0 || b != 0);
        let y = Complex::new(q(g, d), q(b, 1));
        let k = gbrx(&y).unwrap();
        let back = gbrx_from_impedance(&Complex::new(k.r.clone(), k.x.clone())).unwrap();
        prop_assert_eq!(&back, &k);
        let yf = c(g as f64 / d as f64, b as f64);
        let kf = gbrx(&yf).unwrap();
        let bf = gbrx_from_impedance(&c(kf.r, kf.x)).unwrap();
        prop_assert!((bf.g - kf.g).abs() <= 1e-12 * yf.norm() && (bf.b - kf.b).abs() <= 1e-12 * yf.norm());
    }

    #[test]
    fn magnitude_slope_sign(g in 0u8..5, cc in 0u8..5, r in 0u8..5, l in 0u8..5, w in 0.1f64..10.0) {
        let e = Gcrl { g: g as f64, c: cc as f64, r: r as f64, l: l as f64 };
        prop_assume!(g + cc > 0 && r + l > 0);
        let h = 1e-6 * w;
        let fd = (e.admittance(w + h).norm() - e.admittance(w - h).norm()) / (2.0 * h);
        let exact = e.magnitude_derivative(w);
        let sign = (e.r * e.c).powi(2) - (e.g * e.l).powi(2);
        // Rounding in the central difference is about eps |y| / h.
        let noise = 1e-8 * e.admittance(w).norm() / w;
        prop_assert!((fd - exact).abs() <= 1e-5 * exact.abs() + noise, "{} vs {}", fd, exact);
        prop_assert_eq!(exact.signum() == sign.signum() || sign == 0.0, true);
        if sign == 0.0 {
            prop_assert!(exact.abs() < 1e-12);
        }
        let k = e.components(w).unwrap();
        let y = e.admittance(w);
        prop_assert!((k.g - y.re).abs() < 1e-12 * y.norm().max(1.0) && (k.b - y.im).abs() < 1e-12 * y.norm().max(1.0));
    }

    #[test]
    fn triangle_equalities_are_bridge_nodes(seed in any::<u64>(), n in 3usize..=7, extra in 0usize..=3) {
        let net = dc_network(seed, n, extra);
        let z = impedance_table(&build(&net)).unwrap();
        let report = check_metric(&z, 0.0, &tol()).unwrap();
        prop_assert!(report.is_metric());
        let d = metric_table(&z, 0.0).unwrap();
        let eq = triangle_equalities(&d, &Tolerance::new(1e-12, 0.0));
        for p in 1..=n {
            for r in p + 1..=n {
                for qq in (1..=n).filter(|&x| x != p && x != r) {
                    prop_assert_eq!(eq.contains(&(p, qq, r)), bridge_separates(&net, qq, p, r), "({}, {}, {})", p, qq, r);
                }
            }
        }
    }

    #[test]
    fn branch_identities_hold(seed in any::<u64>(), n in 2usize..=7) {
        let mut g = rng(seed);
        let mut net = to_float(&random_connected(&mut g, n, n + 2, passive));
        net.add_current_source("I", 1, n, to_c64(&small_complex(&mut g)));
        let sol = solve_network(&net, 1, &tol()).unwrap();
        let r = branch_power(&net, &sol, &tol()).unwrap();
        let scale = r.scale.max(1e-300);
        prop_assert!(r.max_node_residual() <= 1e-9 * scale);
        prop_assert!(r.max_identity_residual() <= 1e-9 * scale.max(1.0));
        for b in &r.branches {
            prop_assert!((b.mu - b.mu_tail).abs() <= 1e-9 * scale);
        }
        for j in 1..=n {
            for k in j + 1..=n {
                let direct = driving_point_impedance(&build(&net), j, k).unwrap();
                let by_voltages = impedance_from_branch_voltages(&net, j, k).unwrap();
                prop_assert!((direct - by_voltages).norm() <= 1e-9 * direct.norm().max(1.0));
            }
        }
    }

    #[test]
    fn inductive_flows_have_aligned_mu(seed in any::<u64>(), n in 3usize..=8) {
        let mut g = rng(seed);
        let mut net = grounded_lines(&mut g, n, 2, |r| cx((0, 1), (-r.gen_range(1..=6), r.gen_range(1..=3))));
        for k in 2..=n {
            if g.gen_bool(0.5) {
                net.add_branch(format!("load{k}"), k, 1, c(g.gen_range(1..=4) as f64, 0.0));
            }
        }
        net.add_current_source("G", 1, 2, c(1.0, 0.0));
        let sol = solve_network(&net, 1, &tol()).unwrap();
        let a = assign_phase_angles(&net, &sol, &tol()).unwrap();
        prop_assert!(a.holds(), "{:?}", a);
        let r = branch_power(&net, &sol, &tol()).unwrap();
        let thr = 1e-9 * r.scale.max(1e-300).powi(2);
        for b in &r.branches {
            prop_assert!(b.mu * b.s_plus.re >= -thr && b.mu * b.s_minus.re >= -thr, "{:?}", b);
        }
    }
}
