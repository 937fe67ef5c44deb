//! The rigid Shintani lift: coefficients, q-expansions and the
//! half-integral weight Hecke operators T_{l^2}.

use crate::arith::{factorial, kronecker, rat_pow, Rat};
use crate::cocycle::CocycleRes;
use crate::error::{Error, Result};
use crate::modsym::{MSSpace, ModSym};
use crate::polyact::{alpha, pair, HomPoly};
use crate::qforms::{enumerate_classes, shintani_cycle, ProjRat, QForm};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Sparse q-expansion of weight k + 1/2 on Gamma_0(4p); complete for n <= dmax / p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    pub p: u64,
    pub k: u32,
    pub dmax: u64,
    pub coeffs: BTreeMap<u64, Rat>,
}

impl QExpansion {
    pub fn zero(p: u64, k: u32, dmax: u64) -> Self {
        QExpansion { p, k, dmax, coeffs: BTreeMap::new() }
    }

    /// Largest index with a complete coefficient.
    pub fn nmax(&self) -> u64 {
        self.dmax / self.p
    }

    pub fn get(&self, n: u64) -> Rat {
        self.coeffs.get(&n).cloned().unwrap_or_else(Rat::zero)
    }

    fn set(&mut self, n: u64, v: Rat) {
        if v.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Rat) -> QExpansion {
        let mut out = QExpansion::zero(self.p, self.k, self.dmax);
        for (n, v) in &self.coeffs {
            out.set(*n, v * c);
        }
        out
    }

    /// Sum, truncated to the common complete range.
    pub fn add(&self, o: &QExpansion) -> QExpansion {
        let mut out = QExpansion::zero(self.p, self.k, self.dmax.min(o.dmax));
        let nmax = out.nmax();
        for n in self.coeffs.keys().chain(o.coeffs.keys()) {
            if *n <= nmax {
                out.set(*n, self.get(*n) + o.get(*n));
            }
        }
        out
    }

    /// First index (within the common complete range) where the two differ.
    pub fn first_mismatch(&self, o: &QExpansion) -> Option<u64> {
        let nmax = self.nmax().min(o.nmax());
        (1..=nmax).find(|&n| self.get(n) != o.get(n))
    }

    /// Whether every nonzero coefficient sits at n with np = 0, 1 mod 4.
    pub fn support_ok(&self) -> bool {
        self.coeffs.keys().all(|n| (n * self.p) % 4 <= 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharChi {
    pub p: u64,
    pub k: u32,
}

/// chi(d) = ((-1)^k p / d) for gcd(d, 4p) = 1.
pub fn chi(d: &BigInt, ch: &CharChi) -> Result<i32> {
    let m = BigInt::from(4 * ch.p);
    if !d.gcd(&m).is_one() {
        return Err(Error::NotCoprime(d.to_string(), 4 * ch.p));
    }
    let sgn = if ch.k % 2 == 0 { 1 } else { -1 };
    Ok(kronecker(&BigInt::from(sgn * ch.p as i64), d))
}

/// <alpha(mu{r, s}), Q^{k-1}> for the cycle (r, s) of Q.
pub fn coefficient_ms(space: &MSSpace, mu: &ModSym, q: &QForm, omega: &ProjRat) -> Result<Rat> {
    if space.k < 2 {
        return Err(Error::BadWeight(space.k, 2));
    }
    let cyc = shintani_cycle(q, omega, space.p)?;
    let v = space.eval(mu, &cyc.r, &cyc.s);
    pair(&alpha(&v), &HomPoly::quadratic_power(&q.a, &q.b, &q.c, space.k))
}

pub fn coefficient(space: &MSSpace, j: &CocycleRes, q: &QForm, omega: &ProjRat) -> Result<Rat> {
    coefficient_ms(space, &j.mu, q, omega)
}

/// Class list for a lift up to dmax: (D, reps) for all discriminants.
pub type ClassList = Vec<(u64, Vec<QForm>)>;

pub fn classes(p: u64, dmax: u64) -> ClassList {
    enumerate_classes(p, dmax)
}

/// Lift of an arbitrary symbol (no cuspidality check).
pub fn lift_ms(space: &MSSpace, mu: &ModSym, cl: &ClassList, dmax: u64) -> Result<QExpansion> {
    if space.k < 2 {
        return Err(Error::BadWeight(space.k, 2));
    }
    let v = space.phi_vector(mu);
    let fact = Rat::from_integer(factorial(2 * space.k - 2));
    let mut out = QExpansion::zero(space.p, space.k, dmax);
    for (d, reps) in cl {
        if *d > dmax {
            continue;
        }
        let mut s = Rat::zero();
        for q in reps {
            let cyc = shintani_cycle(q, &ProjRat::Inf, space.p)?;
            let val = space.eval_phi(&v, &cyc.r, &cyc.s);
            s += pair(&alpha(&val), &HomPoly::quadratic_power(&q.a, &q.b, &q.c, space.k))?;
        }
        out.set(d / space.p, s * &fact);
    }
    Ok(out)
}

pub fn lift(space: &MSSpace, j: &CocycleRes, cl: &ClassList, dmax: u64) -> Result<QExpansion> {
    if !j.cuspidal {
        return Err(Error::NotCuspidal);
    }
    lift_ms(space, &j.mu, cl, dmax)
}

/// Lifts of the even and odd parts of mu under w_oo.
pub fn lift_pm(space: &MSSpace, j: &CocycleRes, cl: &ClassList, dmax: u64) -> Result<(QExpansion, QExpansion)> {
    if !j.cuspidal {
        return Err(Error::NotCuspidal);
    }
    let (plus, minus) = space.even_odd_split(&j.mu);
    Ok((lift_ms(space, &plus, cl, dmax)?, lift_ms(space, &minus, cl, dmax)?))
}

/// T_{l^2} on weight k + 1/2:
/// b(n) = a(l^2 n) + (pn / l) l^{k-1} a(n) + l^{2k-1} a(n / l^2),
/// where chi(l) ((-1)^k n / l) is written as the Kronecker symbol (pn / l).
/// The result is kept on the support np = 0, 1 mod 4; for odd l this is
/// automatic, for l = 2 it is the projection that makes T_4 act on that
/// subspace.
pub fn halfint_hecke(f: &QExpansion, l: u64) -> Result<QExpansion> {
    if l == f.p || !crate::arith::is_prime(l) {
        return Err(Error::BadHeckePrime(l, f.p));
    }
    let l2 = l * l;
    let mut out = QExpansion::zero(f.p, f.k, f.dmax / l2);
    let lr = Rat::from_integer(l.into());
    let mid = rat_pow(&lr, f.k as i64 - 1);
    let last = rat_pow(&lr, 2 * f.k as i64 - 1);
    for n in 1..=out.nmax() {
        if (n * f.p) % 4 > 1 {
            continue;
        }
        let mut b = f.get(l2 * n);
        let sym = kronecker(&BigInt::from(f.p * n), &BigInt::from(l));
        if sym != 0 {
            b += f.get(n) * &mid * Rat::from_integer(sym.into());
        }
        if n % l2 == 0 {
            b += f.get(n / l2) * &last;
        }
        out.set(n, b);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivarianceReport {
    pub l: u64,
    pub nmax: u64,
    pub pass: bool,
    pub first_mismatch: Option<u64>,
    pub lhs: QExpansion,
    pub rhs: QExpansion,
}

/// Compares lift(T_l J) with T_{l^2} lift(J) on n <= dmax / (p l^2).
pub fn equivariance_report(space: &MSSpace, j: &CocycleRes, l: u64, cl: &ClassList, dmax: u64) -> Result<EquivarianceReport> {
    let tj = crate::cocycle::hecke_t(space, j, l)?;
    let lhs = lift(space, &tj, cl, dmax)?;
    let rhs = halfint_hecke(&lift(space, j, cl, dmax)?, l)?;
    let nmax = rhs.nmax();
    let first = (1..=nmax).find(|&n| lhs.get(n) != rhs.get(n));
    Ok(EquivarianceReport { l, nmax, pass: first.is_none(), first_mismatch: first, lhs, rhs })
}
