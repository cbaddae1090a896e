mod common;

use common::*;
use netkit::admittance::build;
use netkit::linalg::{cofactor2, cofactor_gen, rank, CofactorIndex};
use netkit::modify::{
    augment, augment_by_expansion, augment_cofactor1, augment_cofactor2, contract, contract_cofactor1,
    contract_cofactor2, contract_cofactor2_through_j, contracted_impedance, expand, expand_cofactor,
};
use netkit::solve::{common_cofactor, driving_point_impedance};
use netkit::{ExactComplex, Matrix, Network, Tolerance};
use num_traits::Zero;
use proptest::prelude::*;

fn two_node(y: ExactComplex) -> Matrix<ExactComplex> {
    let mut net = Network::new(2);
    net.add_branch("y", 1, 2, y);
    build(&net)
}

fn nonsingular() -> impl Strategy<Value = Network<ExactComplex>> {
    (2usize..=6, 0usize..=3, any::<u64>()).prop_map(|(n, extra, seed)| {
        let mut g = rng(seed);
        loop {
            let net = random_connected(&mut g, n, n - 1 + extra, small_complex);
            if !netkit::kirchhoff::kappa(&net).unwrap().is_zero() {
                return net;
            }
        }
    })
}

fn pair(n: usize, a: usize, d: usize) -> (usize, usize) {
    let j = a % n + 1;
    let k = (j - 1 + 1 + d % (n - 1)) % n + 1;
    (j, k)
}

#[test]
fn expansion_examples() {
    let (y1, y2) = (cx((2, 1), (1, 1)), cx((0, 1), (-3, 1)));
    let (plus, rec) = expand(&two_node(y1.clone()), 2, y2.clone()).unwrap();
    assert_eq!(common_cofactor(&plus).unwrap(), y1.clone() * y2.clone());
    assert_eq!(
        expand_cofactor(&two_node(y1.clone()), &rec, &CofactorIndex::new(vec![1], vec![3]).unwrap()).unwrap(),
        y1 * y2
    );

    let y = build(&bridge_inductive());
    let yp = cx((1, 1), (1, 2));
    for k in 1..=4 {
        let (plus, rec) = expand(&y, k, yp.clone()).unwrap();
        let c = common_cofactor(&y).unwrap();
        for j in 1..=4 {
            assert_eq!(
                cofactor2(&plus, k, 5, j, 5).unwrap(),
                if j == k { c.clone() + yp.clone() * ExactComplex::zero() } else { c.clone() }
            );
            let z = driving_point_impedance(&plus, j, 5).unwrap();
            assert_eq!(z, re(1, 1) / yp.clone() + driving_point_impedance(&y, j, k).unwrap());
        }
        let at = |r: [usize; 2], c: [usize; 2]| {
            expand_cofactor(&y, &rec, &CofactorIndex::new(r.to_vec(), c.to_vec()).unwrap()).unwrap()
        };
        let other: Vec<usize> = (1..=4).filter(|&x| x != k).collect();
        let (i, j, p) = (other[0], other[1], other[2]);
        assert_eq!(at([i, j], [p, k]), yp.clone() * cofactor2(&y, i, j, p, k).unwrap());
        assert!(at([k, 5], [i, j]).is_zero());
        assert_eq!(at([i, 5], [j, p]), yp.clone() * cofactor2(&y, i, k, j, p).unwrap());
    }
}

#[test]
fn contraction_examples() {
    let (minus, _) = contract(&two_node(re(3, 1)), 1, 2).unwrap();
    assert_eq!(minus, Matrix::from_rows(vec![vec![re(0, 1)]]).unwrap());
    assert_eq!(common_cofactor(&minus).unwrap(), re(1, 1));

    let [a, b, g, d, t] = [2, 3, 5, 7, 13];
    let net = bridge([re(a, 1), re(b, 1), re(g, 1), re(d, 1), re(0, 1), re(t, 1)]);
    let y = build(&net);
    let (minus, rec) = contract(&y, 1, 2).unwrap();
    let expect = re((a + b) * (g + d) + t * (a + b + g + d), 1);
    assert_eq!(common_cofactor(&minus).unwrap(), expect);
    assert_eq!(contract_cofactor1(&y, 1, 2).unwrap(), expect);
    assert_eq!(rec.map(2), Some(1));
    assert_eq!(rec.map(4), Some(3));
    assert_eq!(cofactor2(&minus, 1, 2, 1, 3).unwrap(), contract_cofactor2_through_j(&y, 1, 2, 3, 4).unwrap());

    // Balanced bridge: (1,2) and (3,4) are conjugate, so the second term vanishes.
    let y = build(&bridge([re(2, 1), re(4, 1), re(3, 1), re(6, 1), re(1, 1), re(5, 1)]));
    assert!(cofactor2(&y, 1, 2, 3, 4).unwrap().is_zero());
    let c = common_cofactor(&y).unwrap();
    assert_eq!(
        contract_cofactor2(&y, 3, 4, 1, 2, 1, 2).unwrap(),
        cofactor2(&y, 1, 2, 1, 2).unwrap() * cofactor2(&y, 3, 4, 3, 4).unwrap() / c
    );
}

#[test]
fn augmentation_examples() {
    let (y1, y2) = (re(3, 1), cx((1, 1), (2, 1)));
    let (bar, _) = augment(&two_node(y1.clone()), 1, 2, y2.clone()).unwrap();
    assert_eq!(common_cofactor(&bar).unwrap(), y1 + y2);

    let mut path = Network::new(3);
    path.add_branch("a", 1, 2, re(1, 1)).add_branch("b", 2, 3, re(1, 1));
    let y = build(&path);
    assert_eq!(common_cofactor(&y).unwrap(), re(1, 1));
    assert_eq!(augment_cofactor1(&y, 1, 3, &re(1, 1)).unwrap(), re(3, 1));
    assert_eq!(common_cofactor(&augment(&y, 1, 3, re(1, 1)).unwrap().0).unwrap(), re(3, 1));
}

proptest! {
    // The all-index sweeps are quartic in n; the acceptance suite covers more networks.
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expansion_keeps_full_rank(net in nonsingular(), k in 0usize..6, yp in (-4i64..=4, -4i64..=4)) {
        prop_assume!(yp != (0, 0));
        let y = build(&net);
        let k = k % net.n() + 1;
        let (plus, _) = expand(&y, k, cx((yp.0, 1), (yp.1, 1))).unwrap();
        prop_assert_eq!(rank(&plus, &Tolerance::default()), net.n());
        prop_assert_eq!(common_cofactor(&plus).unwrap(), cx((yp.0, 1), (yp.1, 1)) * common_cofactor(&y).unwrap());
    }

    #[test]
    fn contraction_cofactors_and_impedances(net in nonsingular(), a in 0usize..6, d in 0usize..6) {
        let n = net.n();
        prop_assume!(n >= 3);
        let (j, k) = pair(n, a, d);
        let y = build(&net);
        let (minus, rec) = contract(&y, j, k).unwrap();
        prop_assert_eq!(common_cofactor(&minus).unwrap(), contract_cofactor1(&y, j, k).unwrap());
        prop_assert_eq!(&minus, &build(&net.contract(j, k).unwrap()));
        prop_assume!(!common_cofactor(&minus).unwrap().is_zero());
        let keep: Vec<usize> = (1..=n).filter(|&x| x != k).collect();
        for &p in &keep {
            for &q in &keep {
                let mp = |x: usize| rec.map(x).unwrap();
                if p != q {
                    prop_assert_eq!(
                        driving_point_impedance(&minus, mp(p), mp(q)).unwrap(),
                        contracted_impedance(&y, j, k, p, q).unwrap()
                    );
                }
                for &r in &keep {
                    for &s in &keep {
                        prop_assert_eq!(
                            cofactor2(&minus, mp(p), mp(q), mp(r), mp(s)).unwrap(),
                            contract_cofactor2(&y, j, k, p, q, r, s).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn augmentation_two_ways(net in nonsingular(), a in 0usize..6, d in 0usize..6, yp in (-4i64..=4, -4i64..=4)) {
        let n = net.n();
        let (j, k) = pair(n, a, d);
        let y = build(&net);
        let yp = cx((yp.0, 1), (yp.1, 1));
        let (bar, _) = augment(&y, j, k, yp.clone()).unwrap();
        prop_assert_eq!(&bar, &augment_by_expansion(&y, j, k, yp.clone()).unwrap());
        prop_assert_eq!(common_cofactor(&bar).unwrap(), augment_cofactor1(&y, j, k, &yp).unwrap());
        for p in 1..=n {
            for q in 1..=n {
                prop_assert_eq!(cofactor2(&bar, p, q, j, k).unwrap(), cofactor2(&y, p, q, j, k).unwrap());
                for r in 1..=n {
                    for s in 1..=n {
                        prop_assert_eq!(cofactor2(&bar, p, q, r, s).unwrap(), augment_cofactor2(&y, j, k, &yp, p, q, r, s).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn augmentation_rank_condition(net in nonsingular(), a in 0usize..6, d in 0usize..6, cancel in any::<bool>()) {
        let n = net.n();
        let (j, k) = pair(n, a, d);
        let y = build(&net);
        let c = common_cofactor(&y).unwrap();
        let cjk = cofactor2(&y, j, k, j, k).unwrap();
        prop_assume!(!cjk.is_zero());
        let yp = if cancel { -c.clone() / cjk.clone() } else { re(1, 1) };
        let (bar, _) = augment(&y, j, k, yp.clone()).unwrap();
        let full = rank(&bar, &Tolerance::default()) == n - 1;
        let accidental = !cancel && (c.clone() + cjk.clone()).is_zero();
        prop_assert_eq!(full, !(c + yp * cjk).is_zero());
        // A unit admittance can cancel by accident; the line above covers that draw.
        if !accidental {
            prop_assert_eq!(full, !cancel);
        }
    }

    #[test]
    fn third_cofactor_route(net in nonsingular(), a in 0usize..6, d in 0usize..6) {
        let n = net.n();
        prop_assume!(n >= 4);
        let (j, k) = pair(n, a, d);
        let y = build(&net);
        let (minus, rec) = contract(&y, j, k).unwrap();
        let others: Vec<usize> = (1..=n).filter(|&x| x != j && x != k).collect();
        for &p in &others {
            for &q in &others {
                let direct = cofactor2(&minus, rec.map(j).unwrap(), rec.map(p).unwrap(), rec.map(j).unwrap(), rec.map(q).unwrap()).unwrap();
                prop_assert_eq!(&direct, &contract_cofactor2_through_j(&y, j, k, p, q).unwrap());
                prop_assert_eq!(direct, cofactor_gen(&y, &CofactorIndex::new(vec![k, j, p], vec![k, j, q]).unwrap()).unwrap());
            }
        }
    }
}
