//! Homogeneous binary polynomials of degree 2k-2 with the two right actions
//! of GL_2, the map alpha and the invariant pairing.

use crate::arith::{binomial, rat_pow, rat_to_string, Rat};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Integral 2x2 matrix with nonzero determinant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GMat {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl GMat {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        let m = GMat { a: a.into(), b: b.into(), c: c.into(), d: d.into() };
        assert!(!m.det().is_zero(), "singular matrix");
        m
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }
    pub fn s() -> Self {
        Self::new(0, 1, -1, 0)
    }
    pub fn t() -> Self {
        Self::new(1, 1, 0, 1)
    }
    pub fn w_inf() -> Self {
        Self::new(-1, 0, 0, 1)
    }
    pub fn w_p(p: u64) -> Self {
        Self::new(0, -1, p, 0)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn in_sl2z(&self) -> bool {
        self.det().is_one()
    }

    pub fn in_gamma0(&self, p: u64) -> bool {
        self.in_sl2z() && self.c.is_multiple_of(&BigInt::from(p))
    }

    pub fn mul(&self, o: &GMat) -> GMat {
        GMat {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    /// Adjugate; equals the inverse when det = 1.
    pub fn adj(&self) -> GMat {
        GMat { a: self.d.clone(), b: -self.b.clone(), c: -self.c.clone(), d: self.a.clone() }
    }

    /// Inverse of a unimodular matrix.
    pub fn inv(&self) -> GMat {
        let det = self.det();
        assert!(det.abs().is_one(), "inverse of non-unimodular matrix");
        let m = self.adj();
        if det.is_one() {
            m
        } else {
            m.neg()
        }
    }

    pub fn neg(&self) -> GMat {
        GMat { a: -self.a.clone(), b: -self.b.clone(), c: -self.c.clone(), d: -self.d.clone() }
    }

    pub fn transpose(&self) -> GMat {
        GMat { a: self.a.clone(), b: self.c.clone(), c: self.b.clone(), d: self.d.clone() }
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn to_rmat(&self) -> RMat {
        RMat {
            a: Rat::from_integer(self.a.clone()),
            b: Rat::from_integer(self.b.clone()),
            c: Rat::from_integer(self.c.clone()),
            d: Rat::from_integer(self.d.clone()),
        }
    }

    pub fn pow(&self, n: u32) -> GMat {
        (0..n).fold(GMat::identity(), |acc, _| acc.mul(self))
    }
}

impl fmt::Display for GMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// 2x2 matrix with rational entries (used for edges of the tree, where
/// entries live in Z[1/p]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RMat {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
}

impl RMat {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Self {
        RMat { a, b, c, d }
    }

    pub fn det(&self) -> Rat {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &RMat) -> RMat {
        RMat {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inv(&self) -> RMat {
        let det = self.det();
        assert!(!det.is_zero(), "singular matrix");
        RMat {
            a: &self.d / &det,
            b: -&self.b / &det,
            c: -&self.c / &det,
            d: &self.a / &det,
        }
    }

    pub fn is_integral(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.d].iter().all(|x| x.is_integer())
    }

    pub fn to_gmat(&self) -> Option<GMat> {
        if !self.is_integral() {
            return None;
        }
        Some(GMat {
            a: self.a.to_integer(),
            b: self.b.to_integer(),
            c: self.c.to_integer(),
            d: self.d.to_integer(),
        })
    }
}

impl From<&GMat> for RMat {
    fn from(g: &GMat) -> Self {
        g.to_rmat()
    }
}

/// Homogeneous polynomial of degree n = 2k-2; `coeffs[i]` multiplies X^i Y^{n-i}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomPoly {
    pub k: u32,
    pub coeffs: Vec<Rat>,
}

impl HomPoly {
    pub fn new(k: u32, coeffs: Vec<Rat>) -> Self {
        assert!(k >= 1);
        assert_eq!(coeffs.len(), (2 * k - 1) as usize, "HomPoly needs 2k-1 coefficients");
        HomPoly { k, coeffs }
    }

    pub fn from_ints(k: u32, coeffs: &[i64]) -> Self {
        Self::new(k, coeffs.iter().map(|&c| Rat::from_integer(c.into())).collect())
    }

    pub fn zero(k: u32) -> Self {
        Self::new(k, vec![Rat::zero(); (2 * k - 1) as usize])
    }

    /// X^i Y^{n-i}.
    pub fn monomial(k: u32, i: usize) -> Self {
        let mut h = Self::zero(k);
        h.coeffs[i] = Rat::one();
        h
    }

    pub fn degree(&self) -> usize {
        (2 * self.k - 2) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &HomPoly) -> HomPoly {
        assert_eq!(self.k, o.k);
        HomPoly { k: self.k, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &HomPoly) -> HomPoly {
        assert_eq!(self.k, o.k);
        HomPoly { k: self.k, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Rat) -> HomPoly {
        HomPoly { k: self.k, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn neg(&self) -> HomPoly {
        HomPoly { k: self.k, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn add_assign(&mut self, o: &HomPoly) {
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
    }

    /// Value at (x, y).
    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        let n = self.degree();
        let mut s = Rat::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                s += c * rat_pow(x, i as i64) * rat_pow(y, (n - i) as i64);
            }
        }
        s
    }

    /// Power of a quadratic form a X^2 + b XY + c Y^2, as an element of degree 2k-2.
    pub fn quadratic_power(qa: &BigInt, qb: &BigInt, qc: &BigInt, k: u32) -> HomPoly {
        let q = [Rat::from_integer(qc.clone()), Rat::from_integer(qb.clone()), Rat::from_integer(qa.clone())];
        let mut acc = vec![Rat::one()];
        for _ in 0..k - 1 {
            acc = convolve(&acc, &q);
        }
        HomPoly::new(k, acc)
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", rat_to_string(c))?;
            if i > 0 {
                write!(f, "*X^{i}")?;
            }
            if n - i > 0 {
                write!(f, "*Y^{}", n - i)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn convolve(u: &[Rat], v: &[Rat]) -> Vec<Rat> {
    let mut w = vec![Rat::zero(); u.len() + v.len() - 1];
    for (i, a) in u.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in v.iter().enumerate() {
            w[i + j] += a * b;
        }
    }
    w
}

/// h(aX + bY, cX + dY) without normalization.
pub fn substitute(h: &HomPoly, a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> HomPoly {
    let n = h.degree();
    // powers of the linear forms, as coefficient vectors in X-degree
    let first = [b.clone(), a.clone()];
    let second = [d.clone(), c.clone()];
    let mut lp = vec![vec![Rat::one()]];
    let mut rp = vec![vec![Rat::one()]];
    for i in 1..=n {
        lp.push(convolve(&lp[i - 1], &first));
        rp.push(convolve(&rp[i - 1], &second));
    }
    let mut out = vec![Rat::zero(); n + 1];
    for (i, hi) in h.coeffs.iter().enumerate() {
        if hi.is_zero() {
            continue;
        }
        let term = convolve(&lp[i], &rp[n - i]);
        for (o, t) in out.iter_mut().zip(term) {
            *o += hi * t;
        }
    }
    HomPoly { k: h.k, coeffs: out }
}

fn det_factor(det: &Rat, k: u32) -> Rat {
    rat_pow(&det.abs(), 1 - k as i64)
}

/// h|g = |det g|^{1-k} h(aX + bY, cX + dY).
pub fn act_bar_r(h: &HomPoly, g: &RMat) -> HomPoly {
    let out = substitute(h, &g.a, &g.b, &g.c, &g.d);
    let f = det_factor(&g.det(), h.k);
    if f.is_one() {
        out
    } else {
        out.scale(&f)
    }
}

/// h*g = |det g|^{1-k} h(dX - cY, -bX + aY).
pub fn act_star_r(h: &HomPoly, g: &RMat) -> HomPoly {
    let out = substitute(h, &g.d, &-g.c.clone(), &-g.b.clone(), &g.a);
    let f = det_factor(&g.det(), h.k);
    if f.is_one() {
        out
    } else {
        out.scale(&f)
    }
}

pub fn act_bar(h: &HomPoly, g: &GMat) -> HomPoly {
    act_bar_r(h, &g.to_rmat())
}

pub fn act_star(h: &HomPoly, g: &GMat) -> HomPoly {
    act_star_r(h, &g.to_rmat())
}

/// alpha(h) = h|S with S = (0 1; -1 0).
pub fn alpha(h: &HomPoly) -> HomPoly {
    act_bar(h, &GMat::s())
}

/// <X^i Y^{n-i}, X^j Y^{n-j}> = binom(n,i)^{-1} (-1)^i [i + j = n].
pub fn pair(h1: &HomPoly, h2: &HomPoly) -> Result<Rat> {
    if h1.k != h2.k {
        return Err(Error::WeightMismatch(h1.k, h2.k));
    }
    let n = h1.degree();
    let mut s = Rat::zero();
    for i in 0..=n {
        let (u, v) = (&h1.coeffs[i], &h2.coeffs[n - i]);
        if u.is_zero() || v.is_zero() {
            continue;
        }
        let t = u * v / Rat::from_integer(binomial(n as u32, i as u32));
        if i % 2 == 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    Ok(s)
}
