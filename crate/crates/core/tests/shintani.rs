mod common;

use common::{config, gamma0};
use num_bigint::BigInt;
use proptest::prelude::*;
use rigid_shintani::arith::{rat, Rat};
use rigid_shintani::cocycle::{from_pnew, CocycleRes};
use rigid_shintani::error::Error;
use rigid_shintani::linalg::intersect;
use rigid_shintani::modsym::{sign_part, MSSpace};
use rigid_shintani::qforms::{ProjRat, QForm};
use rigid_shintani::shintani::*;
use std::sync::OnceLock;

struct Setup {
    s: MSSpace,
    odd: CocycleRes,
    even: CocycleRes,
    cl: ClassList,
}

fn setup(p: u64, k: u32) -> Setup {
    let s = MSSpace::build(p, k).unwrap();
    let cp = intersect(&s.pnew_subspace(), &s.cuspidal_subspace(), s.dim());
    let odd = from_pnew(&s, &s.from_coords(sign_part(&s, &cp, -1)[0].clone())).unwrap();
    let even = from_pnew(&s, &s.from_coords(sign_part(&s, &cp, 1)[0].clone())).unwrap();
    let cl = classes(p, 200);
    Setup { s, odd, even, cl }
}

fn s52() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| setup(5, 2))
}

fn s53() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| setup(5, 3))
}

fn forms(cl: &ClassList) -> Vec<QForm> {
    cl.iter().flat_map(|(_, r)| r.iter().cloned()).collect()
}

fn expansion(p: u64, k: u32, dmax: u64, v: &[(u64, i64)]) -> QExpansion {
    let mut f = QExpansion::zero(p, k, dmax);
    for (n, c) in v {
        f.coeffs.insert(*n, rat(*c, 1));
    }
    f
}

#[test]
fn character_values() {
    let ch = CharChi { p: 5, k: 2 };
    assert_eq!(chi(&BigInt::from(1), &ch).unwrap(), 1);
    assert_eq!(chi(&BigInt::from(3), &ch).unwrap(), -1);
    assert_eq!(chi(&BigInt::from(11), &ch).unwrap(), 1);
    assert!(matches!(chi(&BigInt::from(10), &ch), Err(Error::NotCoprime(..))));
    assert!(chi(&BigInt::from(6), &ch).is_err());
    // (-5 / 3) = 1 for odd k
    assert_eq!(chi(&BigInt::from(3), &CharChi { p: 5, k: 3 }).unwrap(), 1);
}

#[test]
fn frozen_lift_5_2() {
    let st = s52();
    let f = lift(&st.s, &st.odd, &st.cl, 200).unwrap();
    let expect = [
        (1, 10), (4, -20), (5, 10), (8, -40), (9, 50), (12, 80), (13, 20), (17, -140), (20, -60),
        (21, -20), (24, -120), (25, -50), (28, 80), (29, 80), (32, 160), (33, 120), (36, -100), (37, -100),
    ];
    assert_eq!(f, expansion(5, 2, 200, &expect));
    assert!(f.support_ok());
    assert_eq!(f.nmax(), 40);
}

#[test]
fn frozen_lift_7_2() {
    let st = setup(7, 2);
    let f = lift(&st.s, &st.odd, &classes(7, 140), 140).unwrap();
    let expect = [(3, 28), (4, -14), (7, 14), (8, -70), (11, 28), (12, 28), (15, 84), (16, 14), (19, -84), (20, 112)];
    assert_eq!(f, expansion(7, 2, 140, &expect));
}

#[test]
fn plus_lift_vanishes() {
    let st = s52();
    let (plus, minus) = lift_pm(&st.s, &st.odd, &st.cl, 200).unwrap();
    assert!(plus.is_zero());
    assert_eq!(minus, lift(&st.s, &st.odd, &st.cl, 200).unwrap());
    assert!(lift(&st.s, &st.even, &st.cl, 200).unwrap().is_zero());
    let z = CocycleRes::zero(&st.s);
    let (a, b) = lift_pm(&st.s, &z, &st.cl, 200).unwrap();
    assert!(a.is_zero() && b.is_zero());
}

#[test]
fn linearity() {
    let st = s52();
    let (a, b) = (rat(3, 2), rat(-7, 1));
    let j = st.odd.scale(&a).add(&st.even.scale(&b));
    let lhs = lift(&st.s, &j, &st.cl, 200).unwrap();
    let rhs = lift(&st.s, &st.odd, &st.cl, 200).unwrap().scale(&a).add(&lift(&st.s, &st.even, &st.cl, 200).unwrap().scale(&b));
    assert_eq!(lhs, rhs);
}

#[test]
fn refusals() {
    let st = s52();
    let mut j = st.odd.clone();
    j.cuspidal = false;
    assert!(matches!(lift(&st.s, &j, &st.cl, 200), Err(Error::NotCuspidal)));
    let s1 = MSSpace::build(5, 1).unwrap();
    assert!(lift_ms(&s1, &s1.zero(), &st.cl, 200).is_err());
    let q = QForm::new(5, 5, 1);
    assert!(coefficient(&st.s, &st.odd, &q, &ProjRat::Inf).is_err());
    let f = QExpansion::zero(5, 2, 200);
    assert!(halfint_hecke(&f, 5).is_err());
    assert!(halfint_hecke(&f, 4).is_err());
}

#[test]
fn coefficient_examples() {
    let st = s52();
    let q = QForm::new(1, 5, 5);
    let z = CocycleRes::zero(&st.s);
    assert_eq!(coefficient(&st.s, &z, &q, &ProjRat::Inf).unwrap(), rat(0, 1));
    let vals: Vec<Rat> = [ProjRat::int(0), ProjRat::Inf, ProjRat::int(1)]
        .iter()
        .map(|w| coefficient(&st.s, &st.odd, &q, w).unwrap())
        .collect();
    assert_eq!(vals[0], vals[1]);
    assert_eq!(vals[1], vals[2]);
    assert_eq!(&vals[0] * rat(2, 1), rat(10, 1));
}

#[test]
fn halfint_hecke_basics() {
    let f = QExpansion::zero(5, 2, 900);
    assert!(halfint_hecke(&f, 3).unwrap().is_zero());
    // a single coefficient at n = 3 * 4: only the a(l^2 n) and a(n / l^2) terms can see it
    let g = expansion(5, 2, 900, &[(12, 1)]);
    let h = halfint_hecke(&g, 3).unwrap();
    assert_eq!(h.dmax, 100);
    assert_eq!(h.get(12), rat(0, 1));
    let one = expansion(5, 2, 900, &[(1, 1)]);
    assert_eq!(halfint_hecke(&one, 3).unwrap().get(1), rat(-3, 1));
    let z = CocycleRes::zero(&s52().s);
    assert!(equivariance_report(&s52().s, &z, 3, &s52().cl, 200).unwrap().pass);
}

#[test]
fn odd_weight_vanishing() {
    // I(-Q) = (-1)^k I(Q) and (-Q) runs over the same classes, so odd k lifts vanish
    let st = s53();
    for v in st.s.pnew_subspace() {
        let j = from_pnew(&st.s, &st.s.from_coords(v)).unwrap();
        assert!(lift(&st.s, &j, &st.cl, 200).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn omega_independence(i in 0usize..1000) {
        let st = s52();
        let fs = forms(&st.cl);
        let q = &fs[i % fs.len()];
        let omegas = [ProjRat::int(0), ProjRat::int(1), ProjRat::Inf, ProjRat::int(-1), ProjRat::frac(1, 2)];
        let v0 = coefficient(&st.s, &st.odd, q, &omegas[0]).unwrap();
        for w in &omegas[1..] {
            prop_assert_eq!(coefficient(&st.s, &st.odd, q, w).unwrap(), v0.clone());
        }
    }

    #[test]
    fn sign_under_negation(i in 0usize..1000, k in 2u32..4) {
        let st = if k == 2 { s52() } else { s53() };
        let fs = forms(&st.cl);
        let q = &fs[i % fs.len()];
        let nq = QForm::new(-q.a.clone(), -q.b.clone(), -q.c.clone());
        let sign = if k % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
        for j in [&st.odd, &st.even] {
            let a = coefficient(&st.s, j, q, &ProjRat::Inf).unwrap();
            prop_assert_eq!(coefficient(&st.s, j, &nq, &ProjRat::Inf).unwrap(), a * &sign);
        }
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn orbit_invariance(i in 0usize..1000, g in gamma0(5, 10)) {
        let st = s52();
        let fs = forms(&st.cl);
        let q = &fs[i % fs.len()];
        let q2 = q.star(&g).unwrap();
        prop_assert_eq!(coefficient(&st.s, &st.odd, &q2, &ProjRat::Inf).unwrap(), coefficient(&st.s, &st.odd, q, &ProjRat::Inf).unwrap());
    }

    #[test]
    fn chi_multiplicative(a in 1i64..400, b in 1i64..400) {
        let ch = CharChi { p: 7, k: 2 };
        let (x, y) = (BigInt::from(2 * a + 1), BigInt::from(2 * b + 1));
        prop_assume!(chi(&x, &ch).is_ok() && chi(&y, &ch).is_ok());
        prop_assert_eq!(chi(&(&x * &y), &ch).unwrap(), chi(&x, &ch).unwrap() * chi(&y, &ch).unwrap());
    }
}
