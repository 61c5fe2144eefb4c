mod common;

use common::oracle::{Oracle, G};
use common::*;
use proptest::prelude::*;
use std::sync::Arc;

use virloop::{Algebra, BasisGen, Lie, Scalar, Vir};

fn vir(alg: Algebra) -> Vir {
    Vir::new(Arc::new(alg))
}

#[test]
fn bracket_examples() {
    let v = vir(Algebra::trivial());
    // [d_2, d_-2] = -4 d_0 + (1/2) C
    let x = v.bracket_basis(&BasisGen::d(2, 0), &BasisGen::d(-2, 0));
    assert_eq!(x.coeff(&BasisGen::d(0, 0)), Scalar::from(-4));
    assert_eq!(x.coeff(&BasisGen::c(0)), q(1, 2));
    // [d_1, d_-1] has no central part
    let y = v.bracket_basis(&BasisGen::d(1, 0), &BasisGen::d(-1, 0));
    assert_eq!(y, Lie::term(BasisGen::d(0, 0), Scalar::from(-2)));
    // [d_3, d_5] = 2 d_8
    assert_eq!(
        v.bracket_basis(&BasisGen::d(3, 0), &BasisGen::d(5, 0)),
        Lie::term(BasisGen::d(8, 0), Scalar::from(2))
    );
    // central elements bracket to zero
    assert!(v.bracket_basis(&BasisGen::c(0), &BasisGen::d(4, 0)).is_zero());
}

#[test]
fn bracket_multiplies_in_b() {
    // t · t² = 0 in C[t]/(t³); t · t = t².
    let v = vir(Algebra::truncated_poly(3).unwrap());
    assert!(v.bracket_basis(&BasisGen::d(1, 1), &BasisGen::d(2, 2)).is_zero());
    assert_eq!(
        v.bracket_basis(&BasisGen::d(1, 1), &BasisGen::d(2, 1)),
        Lie::term(BasisGen::d(3, 2), Scalar::from(1))
    );
}

#[test]
fn bracket_matches_oracle_on_basis() {
    for alg in test_algebras() {
        let o = Oracle { alg: &alg, h: vec![], c: vec![] };
        let v = vir(alg.clone());
        for m in -5..=5 {
            for n in -5..=5 {
                for a in 0..alg.dim() {
                    for b in 0..alg.dim() {
                        let got = v.bracket_basis(&BasisGen::d(m, a), &BasisGen::d(n, b));
                        let mut want = Lie::zero();
                        for (g, c) in o.bracket(G::D(m, a), G::D(n, b)) {
                            let g = match g {
                                G::D(k, j) => BasisGen::d(k, j),
                                G::C(j) => BasisGen::c(j),
                            };
                            want.add_term(g, c);
                        }
                        assert_eq!(got, want, "[d{m}e{a}, d{n}e{b}] in {}", alg.name());
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn antisymmetry_and_jacobi(seed in any::<u64>(), which in 0usize..3) {
        let alg = test_algebras().swap_remove(which);
        let dim = alg.dim();
        let v = vir(alg);
        let mut r = rng(seed);
        let (x, y, z) = (element(&mut r, dim, -6, 6), element(&mut r, dim, -6, 6), element(&mut r, dim, -6, 6));
        let xy = v.bracket(&x, &y).unwrap();
        prop_assert!(xy.add(&v.bracket(&y, &x).unwrap()).is_zero());
        let j = v.bracket(&x, &v.bracket(&y, &z).unwrap()).unwrap()
            .add(&v.bracket(&y, &v.bracket(&z, &x).unwrap()).unwrap())
            .add(&v.bracket(&z, &xy).unwrap());
        prop_assert!(j.is_zero());
    }

    #[test]
    fn bracket_is_bilinear(seed in any::<u64>()) {
        let alg = Algebra::split(2).unwrap();
        let v = vir(alg);
        let mut r = rng(seed);
        let (x, y, z) = (element(&mut r, 2, -4, 4), element(&mut r, 2, -4, 4), element(&mut r, 2, -4, 4));
        let c = scalar(&mut r);
        let lhs = v.bracket(&x.scale(&c).add(&y), &z).unwrap();
        let rhs = v.bracket(&x, &z).unwrap().scale(&c).add(&v.bracket(&y, &z).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}
