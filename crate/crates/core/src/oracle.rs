//! Independent checks: dimension formula, the Eichler-Selberg trace
//! formula, brute-force Gamma_0(p)-orbit partitions, characteristic
//! polynomials of Hecke operators, and a floating-point period integral.

use crate::arith::{is_prime, kronecker_i64, rat_pow, Rat};
use crate::error::{Error, Result};
use crate::linalg::{charpoly, poly, Matrix};
use crate::modsym::{restrict, sign_part, MSSpace, ModSym};
use crate::polyact::GMat;
use crate::qforms::QForm;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;

/// (dim S_{2k}(Gamma_0(p)), number of cusps).
pub fn dim_formula(p: u64, k: u32) -> Result<(u64, u64)> {
    if k < 2 {
        return Err(Error::BadWeight(k, 2));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok((dim_cusp_forms(p, 2 * k), 2))
}

/// dim S_kappa(Gamma_0(N)) for N = 1 or prime, kappa even >= 2.
pub fn dim_cusp_forms(n: u64, kappa: u32) -> u64 {
    let (mu, nu2, nu3, cusps) = if n == 1 {
        (Rat::one(), Rat::one(), Rat::one(), Rat::one())
    } else {
        let r = |x: i64| Rat::from_integer(x.into());
        (
            r(n as i64 + 1),
            r(1 + kronecker_i64(-4, n as i64) as i64),
            r(1 + kronecker_i64(-3, n as i64) as i64),
            r(2),
        )
    };
    let r = |a: i64, b: i64| Rat::new(a.into(), b.into());
    let g = Rat::one() + &mu / r(12, 1) - &nu2 / r(4, 1) - &nu3 / r(3, 1) - &cusps / r(2, 1);
    if kappa == 2 {
        return g.to_integer().to_u64().unwrap();
    }
    let kk = kappa as i64;
    let d = r(kk - 1, 1) * (&g - Rat::one())
        + r(kk / 2 - 1, 1) * &cusps
        + &nu2 * r(kk / 4, 1)
        + &nu3 * r(kk / 3, 1);
    d.to_integer().to_u64().unwrap()
}

/// Weighted class number of primitive positive definite forms of
/// discriminant `disc` < 0.
pub fn hurwitz_weight_class(disc: i64) -> Rat {
    let mut h = Rat::zero();
    let d = -disc;
    let mut a = 1i64;
    while 3 * a * a <= d {
        for b in -a + 1..=a {
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            h += Rat::one();
        }
        a += 1;
    }
    match disc {
        -3 => h / Rat::from_integer(3.into()),
        -4 => h / Rat::from_integer(2.into()),
        _ => h,
    }
}

/// Trace of T_n on S_kappa(Gamma_0(N)), N = 1 or prime with gcd(n, N) = 1.
pub fn eichler_selberg_trace(level: u64, kappa: u32, n: u64) -> Rat {
    assert!(kappa >= 2 && kappa % 2 == 0);
    assert!(level == 1 || (is_prime(level) && n % level != 0));
    let r = |x: i64| Rat::from_integer(x.into());
    let ni = n as i64;
    let psi = if level == 1 { r(1) } else { r(level as i64 + 1) };
    let mut total = Rat::zero();
    // identity term
    let sq = (n as f64).sqrt().round() as i64;
    if sq * sq == ni {
        total += rat_pow(&r(ni), kappa as i64 / 2 - 1) * r(kappa as i64 - 1) * &psi / r(12);
    }
    // elliptic terms
    let mut a2 = Rat::zero();
    let mut t = 0i64;
    while t * t < 4 * ni {
        for tt in if t == 0 { vec![0] } else { vec![t, -t] } {
            // P_kappa(t, n) via u_{m+1} = t u_m - n u_{m-1}
            let (mut u0, mut u1) = (BigInt::zero(), BigInt::one());
            for _ in 1..kappa - 1 {
                let u2 = BigInt::from(tt) * &u1 - BigInt::from(ni) * &u0;
                u0 = std::mem::replace(&mut u1, u2);
            }
            let pk = Rat::from_integer(u1);
            let disc = tt * tt - 4 * ni;
            let mut inner = Rat::zero();
            let mut f = 1i64;
            while f * f <= -disc {
                if disc % (f * f) == 0 {
                    let d0 = disc / (f * f);
                    if d0.rem_euclid(4) == 0 || d0.rem_euclid(4) == 1 {
                        let mu = if level == 1 {
                            r(1)
                        } else {
                            let lp = level as i64;
                            if f % lp != 0 {
                                r((0..lp).filter(|x| (x * x - tt * x + ni).rem_euclid(lp) == 0).count() as i64)
                            } else {
                                let m2 = lp * lp;
                                r((lp + 1) * (0..lp).filter(|x| (x * x - tt * x + ni).rem_euclid(m2) == 0).count() as i64)
                            }
                        };
                        inner += hurwitz_weight_class(d0) * mu;
                    }
                }
                f += 1;
            }
            a2 += pk * inner;
        }
        t += 1;
    }
    total -= a2 / r(2);
    // hyperbolic terms
    let ntau = if level == 1 { 1 } else { 2 };
    let mut a3 = Rat::zero();
    for d in 1..=n {
        if n % d == 0 {
            a3 += rat_pow(&r(d.min(n / d) as i64), kappa as i64 - 1);
        }
    }
    total -= a3 * r(ntau) / r(2);
    if kappa == 2 {
        total += r((1..=n).filter(|t| n % t == 0).sum::<u64>() as i64);
    }
    total
}

/// A certified Gamma_0(p)-equivalence Q1 * gamma = Q2.
#[derive(Clone, Debug)]
pub struct TransporterCertificate {
    pub q1: QForm,
    pub q2: QForm,
    pub gamma: GMat,
}

impl TransporterCertificate {
    pub fn verify(&self, p: u64) -> bool {
        self.gamma.in_gamma0(p) && self.q1.star_unchecked(&self.gamma) == self.q2
    }
}

#[derive(Clone, Debug)]
pub struct OrbitPartition {
    pub p: u64,
    pub d: i64,
    pub h: i64,
    /// Each class: root form and certificates root -> member.
    pub classes: Vec<(QForm, Vec<TransporterCertificate>)>,
}

type F3 = (i64, i64, i64);

fn star_i(q: F3, g: [i64; 4]) -> F3 {
    let (a, b, c) = q;
    let [ga, gb, gc, gd] = g;
    let (p, qq, r, s) = (gd, -gc, -gb, ga);
    (
        a * p * p + b * p * r + c * r * r,
        2 * a * p * qq + b * (p * s + qq * r) + 2 * c * r * s,
        a * qq * qq + b * qq * s + c * s * s,
    )
}

/// Forms in F_p of discriminant D with all coefficients bounded by H,
/// partitioned by Gamma_0(p)-equivalence found through chains of small
/// transporters inside the box.  Only classes meeting the core box
/// max|coef| <= H/4 are reported.
pub fn orbit_oracle(p: u64, d: i64, h: i64) -> OrbitPartition {
    let pi = p as i64;
    let mut part = OrbitPartition { p, d, h, classes: Vec::new() };
    if d <= 0 || d % pi != 0 {
        return part;
    }
    let mut forms: Vec<F3> = Vec::new();
    for b in -h..=h {
        if b % pi != 0 || (b * b - d) % 4 != 0 {
            continue;
        }
        let ac = (b * b - d) / 4;
        for a in -h..=h {
            if a == 0 || a % pi == 0 {
                continue;
            }
            if ac % a != 0 {
                continue;
            }
            let c = ac / a;
            if c.abs() <= h && c % pi == 0 {
                forms.push((a, b, c));
            }
        }
    }
    let index: HashMap<F3, usize> = forms.iter().enumerate().map(|(i, q)| (*q, i)).collect();
    // small elements of Gamma_0(p)
    let m = (2 * pi).max(6);
    let mut moves = Vec::new();
    for ga in -m..=m {
        for gc in (-m..=m).filter(|c| c % pi == 0) {
            for gb in -m..=m {
                for gd in -m..=m {
                    if ga * gd - gb * gc == 1 {
                        moves.push([ga, gb, gc, gd]);
                    }
                }
            }
        }
    }
    // BFS forest with transporters from each root
    let mut comp = vec![usize::MAX; forms.len()];
    let mut cert: Vec<Option<GMat>> = vec![None; forms.len()];
    let mut roots = Vec::new();
    let mut order: Vec<usize> = (0..forms.len()).collect();
    order.sort_by_key(|&i| {
        let (a, b, c) = forms[i];
        (a.abs().max(b.abs()).max(c.abs()), a, b, c)
    });
    for &start in &order {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = roots.len();
        roots.push(start);
        comp[start] = id;
        cert[start] = Some(GMat::identity());
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let gi = cert[i].clone().unwrap();
            for mv in &moves {
                let q2 = star_i(forms[i], *mv);
                if let Some(&j) = index.get(&q2) {
                    if comp[j] == usize::MAX {
                        comp[j] = id;
                        cert[j] = Some(gi.mul(&GMat::new(mv[0], mv[1], mv[2], mv[3])));
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    let core = h / 4;
    let to_q = |q: F3| QForm::new(q.0, q.1, q.2);
    for (id, &root) in roots.iter().enumerate() {
        let members: Vec<usize> = (0..forms.len()).filter(|&i| comp[i] == id).collect();
        let in_core = members.iter().any(|&i| {
            let (a, b, c) = forms[i];
            a.abs().max(b.abs()).max(c.abs()) <= core
        });
        if !in_core {
            continue;
        }
        let certs = members
            .iter()
            .map(|&i| TransporterCertificate { q1: to_q(forms[root]), q2: to_q(forms[i]), gamma: cert[i].clone().unwrap() })
            .collect();
        part.classes.push((to_q(forms[root]), certs));
    }
    part
}

impl OrbitPartition {
    pub fn class_of(&self, q: &QForm) -> Option<usize> {
        self.classes.iter().position(|(_, c)| c.iter().any(|t| &t.q2 == q))
    }

    pub fn certificates_ok(&self) -> bool {
        self.classes.iter().all(|(_, c)| c.iter().all(|t| t.verify(self.p)))
    }
}

/// Result of comparing a list of representatives against the oracle partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitComparison {
    pub d: i64,
    pub h: i64,
    pub oracle_classes: usize,
    pub reps: usize,
    pub bijective: bool,
}

/// Checks that `reps` meet every core class of the oracle exactly once,
/// doubling H on mismatch up to `max_doublings` times.
pub fn compare_with_oracle(p: u64, d: i64, reps: &[QForm], max_doublings: u32) -> OrbitComparison {
    let mut h = ((4.0 * (d as f64).sqrt() * p as f64).ceil() as i64).max(8);
    let mut last = None;
    for _ in 0..=max_doublings {
        let part = orbit_oracle(p, d, h);
        let mut hit = vec![0usize; part.classes.len()];
        let mut all_found = part.certificates_ok();
        for q in reps {
            match part.class_of(q) {
                Some(i) => hit[i] += 1,
                None => all_found = false,
            }
        }
        let bij = all_found && hit.iter().all(|&x| x == 1);
        let cmp = OrbitComparison { d, h, oracle_classes: part.classes.len(), reps: reps.len(), bijective: bij };
        if bij {
            return cmp;
        }
        last = Some(cmp);
        h *= 2;
    }
    last.unwrap()
}

#[derive(Clone, Debug)]
pub struct HeckeTraceReport {
    pub l: u64,
    pub charpoly_even: Vec<Rat>,
    pub charpoly_odd: Vec<Rat>,
    pub integral: bool,
    pub equal: bool,
    pub ramanujan: bool,
}

impl HeckeTraceReport {
    pub fn pass(&self) -> bool {
        self.integral && self.equal && self.ramanujan
    }
}

/// Characteristic polynomials of T_l on the even and odd cuspidal p-new parts.
pub fn hecke_trace_check(space: &MSSpace, l: u64) -> Result<HeckeTraceReport> {
    let t = space.hecke_matrix(l)?;
    let pnew = space.pnew_subspace();
    let cusp = space.cuspidal_subspace();
    let sub = crate::linalg::intersect(&pnew, &cusp, space.dim());
    let even = sign_part(space, &sub, 1);
    let odd = sign_part(space, &sub, -1);
    let ce = charpoly(&restrict(&t, &even)?);
    let co = charpoly(&restrict(&t, &odd)?);
    let integral = ce.iter().chain(&co).all(|c| c.is_integer());
    // bound B with B^2 >= 4 l^{2k-1}
    let b2 = BigInt::from(4) * BigInt::from(l).pow(2 * space.k - 1);
    let b = Rat::from_integer(b2.sqrt() + BigInt::one());
    let ramanujan = [&ce, &co].iter().all(|c| {
        let n = poly::distinct_roots(c);
        poly::distinct_real_roots(c) == n && poly::sturm_count(c, &-b.clone(), &b) == n
    });
    Ok(HeckeTraceReport { l, equal: ce == co, charpoly_even: ce, charpoly_odd: co, integral, ramanujan })
}

/// Hecke eigenvalue of a symbol, if it is an eigenvector.
pub fn eigenvalue_of(space: &MSSpace, m: &ModSym, img: &ModSym) -> Option<Rat> {
    let i = m.coords.iter().position(|x| !x.is_zero())?;
    let lam = &img.coords[i] / &m.coords[i];
    m.coords.iter().zip(&img.coords).all(|(a, b)| a * &lam == *b).then_some(lam).filter(|_| space.dim() > 0)
}

/// Coefficients of a newform reconstructed from an eigensymbol.
#[derive(Clone, Debug)]
pub struct EigenData {
    pub p: u64,
    pub k: u32,
    /// a_0 = 0, a_1 = 1, ...
    pub coeffs: Vec<f64>,
    /// Fricke eigenvalue: f(-1/(pz)) = lambda p^k z^{2k} f(z).
    pub lambda: f64,
}

pub fn eigen_data(space: &MSSpace, m: &ModSym, nterms: usize) -> Result<EigenData> {
    let (p, k) = (space.p, space.k);
    let not_eigen = || Error::Invalid("symbol is not a Hecke eigenvector".into());
    let up = eigenvalue_of(space, m, &space.up_ms(m)).ok_or_else(not_eigen)?;
    let mut a = vec![Rat::zero(); nterms + 1];
    a[1] = Rat::one();
    for l in crate::arith::primes_up_to(nterms as u64) {
        let al = if l == p { up.clone() } else { eigenvalue_of(space, m, &space.hecke_tl(m, l)?).ok_or_else(not_eigen)? };
        let lw = rat_pow(&Rat::from_integer(l.into()), 2 * k as i64 - 1);
        // prime powers
        let mut pw: Vec<Rat> = vec![Rat::one(), al.clone()];
        let mut q = l * l;
        while q as usize <= nterms {
            let n = pw.len();
            let next = if l == p { &pw[n - 1] * &al } else { &pw[n - 1] * &al - &lw * &pw[n - 2] };
            pw.push(next);
            q *= l;
        }
        // multiplicativity
        for n in (1..=nterms).rev() {
            if a[n].is_zero() && n != 1 {
                continue;
            }
            if n % (l as usize) == 0 {
                continue;
            }
            let mut q = l as usize;
            let mut e = 1;
            while n * q <= nterms {
                a[n * q] = &a[n] * &pw[e];
                q *= l as usize;
                e += 1;
            }
        }
    }
    let lambda = -(up / rat_pow(&Rat::from_integer(p.into()), k as i64 - 1));
    Ok(EigenData {
        p,
        k,
        coeffs: a.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
        lambda: lambda.to_f64().unwrap(),
    })
}

impl EigenData {
    fn series(&self, z: Complex64) -> Complex64 {
        let q = (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c;
        }
        acc
    }

    /// f(z) for z in the upper half plane.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        // reduce to the SL_2(Z) fundamental domain: w = g z; z = h w
        let mut w = z;
        let mut g = [1i128, 0, 0, 1];
        for _ in 0..10_000 {
            let n = w.re.round();
            w.re -= n;
            let ni = n as i128;
            g = [g[0] - ni * g[2], g[1] - ni * g[3], g[2], g[3]];
            if w.norm_sqr() < 1.0 - 1e-14 {
                w = -w.inv();
                g = [-g[2], -g[3], g[0], g[1]];
            } else {
                break;
            }
        }
        // h = g^{-1}
        let (c, d) = (-g[2], g[0]);
        let kap = 2 * self.k as i32;
        let j = Complex64::new(c as f64, 0.0) * w + d as f64;
        let p = self.p as i128;
        if c.rem_euclid(p) == 0 {
            j.powi(kap) * self.series(w)
        } else {
            let cinv = (1..p).find(|x| (x * c).rem_euclid(p) == 1).unwrap();
            let m = (d * cinv).rem_euclid(p);
            let u = (w + m as f64) / p as f64;
            j.powi(kap) * self.lambda * (p as f64).powi(-(self.k as i32)) * self.series(u)
        }
    }
}

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for j in 2..=n {
            let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// I(Q) = integral of f(tau) Q(1, -tau)^{k-1} from z0 to gamma_Q z0 along the
/// geodesic of Q, for Q of non-square discriminant.
pub fn period_integral(f: &EigenData, q: &QForm, precision: u32) -> Result<Complex64> {
    if precision < 8 {
        return Err(Error::Invalid("precision must be at least 8 digits".into()));
    }
    let g = crate::qforms::automorph(q, f.p)?;
    let (a, b, c) = (q.a.to_f64().unwrap(), q.b.to_f64().unwrap(), q.c.to_f64().unwrap());
    let sd = q.disc().to_f64().unwrap().sqrt();
    if c == 0.0 {
        return Err(Error::Invalid("c = 0 has square discriminant".into()));
    }
    let (x, y) = ((b + sd) / (2.0 * c), (b - sd) / (2.0 * c));
    // phi(z) = (z - x)/(z - y) maps the geodesic to a ray i*sigma*R_+
    let top = Complex64::new((x + y) / 2.0, (x - y).abs() / 2.0);
    let phi = |z: Complex64| (z - x) / (z - y);
    let sigma = phi(top).im.signum();
    let zs = |s: f64| {
        let ph = Complex64::new(0.0, sigma * s.exp());
        ((x - y * ph) / (1.0 - ph), (x - y) * ph / ((1.0 - ph) * (1.0 - ph)))
    };
    let mob = |z: Complex64| {
        let (ga, gb, gc, gd) = (g.a.to_f64().unwrap(), g.b.to_f64().unwrap(), g.c.to_f64().unwrap(), g.d.to_f64().unwrap());
        (z * ga + gb) / (z * gc + gd)
    };
    let s1 = phi(mob(top)).norm().ln();
    let integrand = |s: f64| {
        let (z, dz) = zs(s);
        let qv = Complex64::new(a, 0.0) - z * b + z * z * c;
        f.eval(z) * qv.powi(f.k as i32 - 1) * dz
    };
    let nodes = gauss_legendre(24);
    let segs = ((s1.abs() / 0.1).ceil() as usize).max(4) * (1 + (precision as usize).saturating_sub(10) / 4);
    let (lo, hi) = (-s1 / 2.0, s1 / 2.0);
    let hseg = (hi - lo) / segs as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for sgi in 0..segs {
        let s0 = lo + hseg * sgi as f64;
        for (xi, wi) in &nodes {
            let s = s0 + hseg * (xi + 1.0) / 2.0;
            total += integrand(s) * (wi * hseg / 2.0);
        }
    }
    Ok(total)
}

/// Odd part (I(Q) + I(Q'))/2 with Q' = [a, -b, c], the quantity matched by the
/// pairing of the w_oo-odd symbol.
pub fn period_oracle(f: &EigenData, q: &QForm, precision: u32) -> Result<Complex64> {
    Ok((period_integral(f, q, precision)? + period_integral(f, &q.conj(), precision)?) / 2.0)
}

/// Odd cuspidal p-new eigensymbol, when that part is one-dimensional.
pub fn odd_newform_symbol(space: &MSSpace) -> Option<ModSym> {
    let pnew = space.pnew_subspace();
    let cusp = space.cuspidal_subspace();
    let sub = crate::linalg::intersect(&pnew, &cusp, space.dim());
    let odd = sign_part(space, &sub, -1);
    (odd.len() == 1).then(|| space.from_coords(odd[0].clone()))
}

/// Restriction of T_l to a subspace as an exact matrix (helper for reports).
pub fn restricted_hecke(space: &MSSpace, sub: &[Vec<Rat>], l: u64) -> Result<Matrix> {
    restrict(&space.hecke_matrix(l)?, sub)
}
