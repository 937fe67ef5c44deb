//! Integral binary quadratic forms [a, b, c] = a x^2 + b xy + c y^2,
//! automorphs, Shintani cycles and Gamma_0(p)-class enumeration.

use crate::arith::{is_square, isqrt, Rat};
use crate::error::{Error, Result};
use crate::polyact::GMat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Point of P^1(Q).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProjRat {
    Inf,
    Fin(Rat),
}

impl ProjRat {
    pub fn int(n: i64) -> Self {
        ProjRat::Fin(Rat::from_integer(n.into()))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        if d == 0 {
            ProjRat::Inf
        } else {
            ProjRat::Fin(Rat::new(n.into(), d.into()))
        }
    }

    /// From homogeneous coordinates (x : y), meaning x/y.
    pub fn from_pair(x: &BigInt, y: &BigInt) -> Self {
        if y.is_zero() {
            ProjRat::Inf
        } else {
            ProjRat::Fin(Rat::new(x.clone(), y.clone()))
        }
    }

    /// Reduced homogeneous coordinates (n, d) with d >= 0; infinity is (1, 0).
    pub fn pair(&self) -> (BigInt, BigInt) {
        match self {
            ProjRat::Inf => (BigInt::one(), BigInt::zero()),
            ProjRat::Fin(r) => (r.numer().clone(), r.denom().clone()),
        }
    }

    /// Moebius action z -> (az + b)/(cz + d).
    pub fn apply(&self, g: &GMat) -> ProjRat {
        let (x, y) = self.pair();
        ProjRat::from_pair(&(&g.a * &x + &g.b * &y), &(&g.c * &x + &g.d * &y))
    }

    pub fn neg(&self) -> ProjRat {
        match self {
            ProjRat::Inf => ProjRat::Inf,
            ProjRat::Fin(r) => ProjRat::Fin(-r.clone()),
        }
    }
}

impl fmt::Display for ProjRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjRat::Inf => write!(f, "oo"),
            ProjRat::Fin(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl fmt::Display for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

impl QForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        QForm { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn in_fp(&self, p: u64) -> bool {
        let p = BigInt::from(p);
        self.disc().is_positive()
            && !self.a.is_multiple_of(&p)
            && self.b.is_multiple_of(&p)
            && self.c.is_multiple_of(&p)
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        Rat::from_integer(self.a.clone()) * x * x
            + Rat::from_integer(self.b.clone()) * x * y
            + Rat::from_integer(self.c.clone()) * y * y
    }

    /// Q*g (x, y) = Q(dx - cy, -bx + ay), without unimodularity check.
    pub fn star_unchecked(&self, g: &GMat) -> QForm {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        // substitute x -> d x - c' y, y -> -b' x + a' y
        let (p, q) = (&g.d, -g.c.clone());
        let (r, s) = (-g.b.clone(), &g.a);
        QForm {
            a: a * p * p + b * p * &r + c * &r * &r,
            b: BigInt::from(2) * a * p * &q + b * (p * s + &q * &r) + BigInt::from(2) * c * &r * s,
            c: a * &q * &q + b * &q * s + c * s * s,
        }
    }

    pub fn star(&self, g: &GMat) -> Result<QForm> {
        if !g.in_sl2z() {
            return Err(Error::BadDeterminant(g.det().to_string(), "1".into()));
        }
        Ok(self.star_unchecked(g))
    }

    /// [a, -b, c].
    pub fn conj(&self) -> QForm {
        QForm { a: self.a.clone(), b: -self.b.clone(), c: self.c.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellSolution {
    pub t: BigInt,
    pub u: BigInt,
}

fn floor_quadratic(p: &BigInt, q: &BigInt, r: &BigInt) -> BigInt {
    // floor((p + sqrt(D)) / q) where r = floor(sqrt(D)) and D is not a square
    if q.is_positive() {
        (p + r).div_floor(q)
    } else {
        (p + r + BigInt::one()).div_floor(q)
    }
}

/// Minimal positive solution of t^2 - D u^2 = 4.
pub fn pell_fundamental(d: &BigInt) -> Result<PellSolution> {
    if !d.is_positive() || is_square(d) || !(d.mod_floor(&4.into()).is_zero() || d.mod_floor(&4.into()).is_one()) {
        return Err(Error::BadDiscriminant(d.to_string()));
    }
    let r = isqrt(d);
    let b0 = d.mod_floor(&BigInt::from(2));
    // continued fraction of omega = (b0 + sqrt D)/2; convergents p/q
    let (mut pp, mut qq) = (b0.clone(), BigInt::from(2));
    let (mut p0, mut p1) = (BigInt::zero(), BigInt::one());
    let (mut q0, mut q1) = (BigInt::one(), BigInt::zero());
    loop {
        let a = floor_quadratic(&pp, &qq, &r);
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let x = BigInt::from(2) * &p1 - &b0 * &q1;
        if &x * &x - d * &q1 * &q1 == BigInt::from(4) {
            return Ok(PellSolution { t: x.abs(), u: q1 });
        }
        pp = &a * &qq - &pp;
        qq = (d - &pp * &pp) / &qq;
    }
}

/// Generator (mod +-I) of the stabilizer of Q in SL_2(Z), for non-square
/// discriminant, built from the primitive part of Q.
pub fn automorph_sl2(q: &QForm) -> Result<GMat> {
    let d = q.disc();
    if !d.is_positive() || is_square(&d) {
        return Err(Error::BadDiscriminant(d.to_string()));
    }
    let f = q.content();
    let (a, b, c) = (&q.a / &f, &q.b / &f, &q.c / &f);
    let sol = pell_fundamental(&(&d / (&f * &f)))?;
    let two = BigInt::from(2);
    Ok(GMat {
        a: (&sol.t + &b * &sol.u) / &two,
        b: -(&a * &sol.u),
        c: &c * &sol.u,
        d: (&sol.t - &b * &sol.u) / &two,
    })
}

/// The automorph gamma_Q of Q in F_p.
pub fn automorph(q: &QForm, p: u64) -> Result<GMat> {
    if !q.in_fp(p) {
        return Err(Error::NotInFp(q.to_string(), p));
    }
    automorph_sl2(q)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShintaniCycle {
    pub r: ProjRat,
    pub s: ProjRat,
    pub form: QForm,
    pub omega: Option<ProjRat>,
}

/// The cycle C_Q = (r_Q, s_Q); `omega` is only used for non-square discriminant.
pub fn shintani_cycle(q: &QForm, omega: &ProjRat, p: u64) -> Result<ShintaniCycle> {
    if !q.in_fp(p) {
        return Err(Error::NotInFp(q.to_string(), p));
    }
    let d = q.disc();
    if is_square(&d) {
        let m = isqrt(&d);
        let (r, s) = if !q.c.is_zero() {
            let two_c = BigInt::from(2) * &q.c;
            (
                ProjRat::Fin(Rat::new(&q.b + &m, two_c.clone())),
                ProjRat::Fin(Rat::new(&q.b - &m, two_c)),
            )
        } else if q.b.is_positive() {
            (ProjRat::Inf, ProjRat::Fin(Rat::new(q.a.clone(), q.b.clone())))
        } else {
            (ProjRat::Fin(Rat::new(q.a.clone(), q.b.clone())), ProjRat::Inf)
        };
        return Ok(ShintaniCycle { r, s, form: q.clone(), omega: None });
    }
    let g = automorph(q, p)?;
    Ok(ShintaniCycle { r: omega.clone(), s: omega.apply(&g), form: q.clone(), omega: Some(omega.clone()) })
}

/// Sort key used to pick canonical representatives.
pub fn form_key(q: &QForm) -> (BigInt, BigInt, BigInt, BigInt) {
    let m = q.a.abs().max(q.b.abs()).max(q.c.abs());
    (m, q.a.clone(), q.b.clone(), q.c.clone())
}

/// Reduced indefinite forms of non-square discriminant D:
/// 0 < b < sqrt(D) and |sqrt(D) - 2|a|| < b.
pub fn reduced_forms(d: &BigInt) -> Vec<QForm> {
    let r = isqrt(d);
    let mut out = Vec::new();
    let mut b = BigInt::one();
    while b <= r {
        if (&b * &b - d).mod_floor(&4.into()).is_zero() {
            let ac = (&b * &b - d) / BigInt::from(4); // negative
            let m = ac.abs();
            let mut a = BigInt::one();
            while &a * &a <= m {
                if m.is_multiple_of(&a) {
                    for aa in [a.clone(), &m / &a] {
                        for sa in [aa.clone(), -aa.clone()] {
                            let c = &ac / &sa;
                            let q = QForm::new(sa.clone(), b.clone(), c);
                            if is_reduced(&q, d) && !out.contains(&q) {
                                out.push(q);
                            }
                        }
                    }
                }
                a += 1;
            }
        }
        b += 1;
    }
    out.sort();
    out
}

fn is_reduced(q: &QForm, d: &BigInt) -> bool {
    let b = &q.b;
    if !b.is_positive() || b * b >= *d {
        return false;
    }
    let two_a = BigInt::from(2) * q.a.abs();
    let lo = &two_a - b;
    let hi = &two_a + b;
    (lo.is_negative() || &lo * &lo < *d) && *d < &hi * &hi
}

/// Right neighbour rho(Q) = Q*(s -1; 1 0) and the step matrix.
pub fn rho(q: &QForm, d: &BigInt) -> (QForm, GMat) {
    let r = isqrt(d);
    let two_c = BigInt::from(2) * q.c.abs();
    let bp = &r - (&r + &q.b).mod_floor(&two_c);
    let s = (&bp + &q.b) / (BigInt::from(2) * &q.c);
    let g = GMat { a: s, b: BigInt::from(-1), c: BigInt::one(), d: BigInt::zero() };
    (q.star_unchecked(&g), g)
}

/// SL_2(Z)-classes of forms of non-square discriminant D, each given as a
/// reduced cycle with transport matrices h_i (cycle[i] = cycle[0] * h_i).
pub fn sl2_cycles(d: &BigInt) -> Vec<Vec<(QForm, GMat)>> {
    let mut seen: Vec<QForm> = Vec::new();
    let mut out = Vec::new();
    for q in reduced_forms(d) {
        if seen.contains(&q) {
            continue;
        }
        let mut cyc = vec![(q.clone(), GMat::identity())];
        seen.push(q.clone());
        let mut cur = q.clone();
        let mut h = GMat::identity();
        loop {
            let (nq, g) = rho(&cur, d);
            h = h.mul(&g);
            if nq == q {
                break;
            }
            seen.push(nq.clone());
            cyc.push((nq.clone(), h.clone()));
            cur = nq;
        }
        out.push(cyc);
    }
    out
}

/// Canonical lifts of P^1(F_p): index j < p is (1:j) lifted to (1 0; j 1),
/// index p is (0:1) lifted to (0 -1; 1 0).  These are left coset
/// representatives for SL_2(Z)/Gamma_0(p), keyed by the first column.
pub fn p1_lift(p: u64, x: u64) -> GMat {
    if x < p {
        GMat::new(1, 0, x as i64, 1)
    } else {
        GMat::new(0, -1, 1, 0)
    }
}

/// Index in P^1(F_p) of the column (u : v) = (first entry : second entry).
pub fn p1_index_col(u: &BigInt, v: &BigInt, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let u = u.mod_floor(&pb);
    let v = v.mod_floor(&pb);
    if u.is_zero() {
        p
    } else {
        let inv = crate::arith::inv_mod(&u, &pb).expect("p prime");
        (v * inv).mod_floor(&pb).to_u64().unwrap()
    }
}

fn reduce_translate(q: &QForm) -> QForm {
    // Q*T^n = [a - bn + cn^2, b - 2cn, c]; bring b into [-|c|, |c|)
    if q.c.is_zero() {
        return q.clone();
    }
    let abs_c = q.c.abs();
    let bp = (&q.b + &abs_c).mod_floor(&(BigInt::from(2) * &abs_c)) - &abs_c;
    let n = (&q.b - &bp) / (BigInt::from(2) * &q.c);
    let g = GMat { a: BigInt::one(), b: n, c: BigInt::zero(), d: BigInt::one() };
    q.star_unchecked(&g)
}

fn best(cands: impl Iterator<Item = QForm>) -> QForm {
    cands.min_by_key(form_key).expect("nonempty orbit")
}

/// Complete duplicate-free Gamma_0(p)-orbit representatives of
/// {Q in F_p : disc Q = D}, sorted by [`form_key`].
pub fn classes_for_disc(p: u64, d: &BigInt) -> Vec<QForm> {
    let pb = BigInt::from(p);
    let four = BigInt::from(4);
    let dm4 = d.mod_floor(&four);
    if !d.is_positive() || !d.is_multiple_of(&pb) || !(dm4.is_zero() || dm4.is_one()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let lifts: Vec<GMat> = (0..=p).map(|x| p1_lift(p, x)).collect();
    if is_square(d) {
        let m = isqrt(d);
        let mut a = BigInt::zero();
        while a < m {
            let q0 = QForm::new(a.clone(), m.clone(), 0);
            for g in &lifts {
                let q = q0.star_unchecked(g);
                if q.in_fp(p) {
                    out.push(best([q.clone(), reduce_translate(&q)].into_iter()));
                }
            }
            a += 1;
        }
    } else {
        for cyc in sl2_cycles(d) {
            let q0 = &cyc[0].0;
            let gam = automorph_sl2(q0).expect("non-square");
            // orbits of <gamma> on P^1(F_p) acting on first columns
            let act = |x: u64| -> u64 {
                let g = gam.mul(&lifts[x as usize]);
                p1_index_col(&g.a, &g.c, p)
            };
            let mut orbit_of = vec![usize::MAX; (p + 1) as usize];
            let mut orbits: Vec<Vec<u64>> = Vec::new();
            for x in 0..=p {
                if orbit_of[x as usize] != usize::MAX {
                    continue;
                }
                let id = orbits.len();
                let mut o = vec![x];
                orbit_of[x as usize] = id;
                let mut y = act(x);
                while y != x {
                    orbit_of[y as usize] = id;
                    o.push(y);
                    y = act(y);
                }
                orbits.push(o);
            }
            let mut cands: Vec<Vec<QForm>> = vec![Vec::new(); orbits.len()];
            for (qi, hi) in &cyc {
                for g in &lifts {
                    let hg = hi.mul(g);
                    let x = p1_index_col(&hg.a, &hg.c, p);
                    let q = qi.star_unchecked(g);
                    cands[orbit_of[x as usize]].push(q.clone());
                    cands[orbit_of[x as usize]].push(reduce_translate(&q));
                }
            }
            for (o, c) in orbits.iter().zip(cands) {
                let rep = q0.star_unchecked(&lifts[o[0] as usize]);
                if rep.in_fp(p) {
                    out.push(best(c.into_iter()));
                }
            }
        }
    }
    out.sort_by_key(form_key);
    out
}

/// All D <= dmax with p | D and D = 0, 1 mod 4, with their classes.
pub fn enumerate_classes(p: u64, dmax: u64) -> Vec<(u64, Vec<QForm>)> {
    let mut out = BTreeMap::new();
    let mut d = p;
    while d <= dmax {
        if d % 4 == 0 || d % 4 == 1 {
            out.insert(d, classes_for_disc(p, &BigInt::from(d)));
        }
        d += p;
    }
    out.into_iter().collect()
}
