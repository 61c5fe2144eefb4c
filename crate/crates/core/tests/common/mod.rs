#![allow(dead_code)]

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use virloop::{Algebra, BasisGen, Lie, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::from_ratio(n, d)
}

pub fn s(text: &str) -> Scalar {
    text.parse().unwrap()
}

/// Small Gaussian rationals, occasionally non-real.
pub fn scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let re = q(rng.gen_range(-7..=7), rng.gen_range(1..=5));
    if rng.gen_bool(0.2) {
        re + q(rng.gen_range(-3..=3), rng.gen_range(1..=3)) * Scalar::i()
    } else {
        re
    }
}

pub fn nonzero_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let x = scalar(rng);
        if !num_traits::Zero::is_zero(&x) {
            return x;
        }
    }
}

pub fn generator(rng: &mut ChaCha8Rng, dim: usize, lo: i64, hi: i64) -> BasisGen {
    if rng.gen_bool(0.15) {
        BasisGen::c(rng.gen_range(0..dim))
    } else {
        BasisGen::d(rng.gen_range(lo..=hi), rng.gen_range(0..dim))
    }
}

/// One to three terms with degrees in `[lo, hi]`.
pub fn element(rng: &mut ChaCha8Rng, dim: usize, lo: i64, hi: i64) -> Lie {
    let mut x = Lie::zero();
    for _ in 0..rng.gen_range(1..=3) {
        x.add_term(generator(rng, dim, lo, hi), nonzero_scalar(rng));
    }
    x
}

/// C, C[t]/(t³), C².
pub fn test_algebras() -> Vec<Algebra> {
    vec![
        Algebra::trivial(),
        Algebra::truncated_poly(3).unwrap(),
        Algebra::split(2).unwrap(),
    ]
}

/// A character of each of [`test_algebras`]: evaluation at t = 0 for the
/// truncated polynomials, first projection for C².
pub fn character_values(alg: &Algebra) -> Vec<Scalar> {
    let mut v = vec![Scalar::from(0); alg.dim()];
    v[0] = Scalar::from(1);
    v
}
