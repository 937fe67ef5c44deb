#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rigid_shintani::polyact::{GMat, HomPoly};
use rigid_shintani::qforms::QForm;

pub const SEED: u64 = 0x5eed_2024;

pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(SEED), failure_persistence: None, ..Config::default() }
}

fn generator(i: u8) -> GMat {
    match i {
        0 => GMat::s(),
        1 => GMat::t(),
        2 => GMat::t().inv(),
        _ => GMat::s().inv(),
    }
}

/// Words of length <= len in S, T and their inverses.
pub fn sl2_word(len: usize) -> impl Strategy<Value = GMat> {
    prop::collection::vec(0u8..4, 0..=len).prop_map(|w| w.into_iter().fold(GMat::identity(), |g, i| g.mul(&generator(i))))
}

/// Words of length <= len in T^{±1} and L^{±1}, L = (1 0; p 1), mixed with a
/// generic element built from a random bottom row.
pub fn gamma0(p: u64, len: usize) -> impl Strategy<Value = GMat> {
    let pi = p as i64;
    (prop::collection::vec(0u8..4, 0..=len), -6i64..6, -30i64..30).prop_map(move |(w, c0, d0)| {
        let l = GMat::new(1, 0, pi, 1);
        let word = w.into_iter().fold(GMat::identity(), |g, i| {
            g.mul(&match i {
                0 => GMat::t(),
                1 => GMat::t().inv(),
                2 => l.clone(),
                _ => l.inv(),
            })
        });
        let c = BigInt::from(c0 * pi);
        let d = BigInt::from(if d0 == 0 { 1 } else { d0 });
        let e = d.extended_gcd(&c);
        let g = if e.gcd == BigInt::from(1) || e.gcd == BigInt::from(-1) {
            let s = &e.gcd;
            GMat { a: &e.x * s, b: -(&e.y * s), c: c.clone(), d: d.clone() }
        } else {
            GMat::identity()
        };
        word.mul(&g)
    })
}

pub fn hompoly(k: u32) -> impl Strategy<Value = HomPoly> {
    prop::collection::vec(-20i64..20, (2 * k - 1) as usize).prop_map(move |c| HomPoly::from_ints(k, &c))
}

/// Members of F_p with positive discriminant.
pub fn fp_form(p: u64) -> impl Strategy<Value = QForm> {
    let pi = p as i64;
    (-12i64..12, -8i64..8, -8i64..8)
        .prop_filter("p | a", move |(a, _, _)| a % pi != 0)
        .prop_map(move |(a, b, c)| QForm::new(a, b * pi, c * pi))
        .prop_filter("D > 0", |q| q.disc() > BigInt::from(0))
}
