//! Gamma_0(p)-invariant modular symbols with values in the polynomials of
//! degree 2k-2.
//!
//! A symbol m is stored through phi(g) = m{g0, g oo}|g, a function on the
//! cosets Gamma_0(p)\SL_2(Z), i.e. on P^1(F_p) via the bottom row (c : d).
//! Index j < p is (j : 1), index p is (1 : 0).

use crate::arith::{cf_expansion, rat_pow, Rat};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::polyact::{act_bar, act_bar_r, GMat, HomPoly, RMat};
use crate::qforms::ProjRat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Index in P^1(F_p) of the bottom row (c : d).
pub fn p1_index_row(c: &BigInt, d: &BigInt, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let c = c.mod_floor(&pb);
    let d = d.mod_floor(&pb);
    if d.is_zero() {
        p
    } else {
        let inv = crate::arith::inv_mod(&d, &pb).expect("p prime");
        (c * inv).mod_floor(&pb).to_u64().unwrap()
    }
}

/// Coset representative with bottom row of index x: (1 0; x 1) or (0 -1; 1 0).
pub fn coset_rep(p: u64, x: u64) -> GMat {
    if x < p {
        GMat::new(1, 0, x as i64, 1)
    } else {
        GMat::new(0, -1, 1, 0)
    }
}

/// The space MS^{Gamma_0(p)}(P_{2k-2}).
#[derive(Clone, Debug)]
pub struct MSSpace {
    pub p: u64,
    pub k: u32,
    /// Relation matrix on the (p+1)(2k-1) unknowns phi(x)_i.
    pub relations: Matrix,
    /// Basis of the solution space (row-reduced).
    pub basis: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
    cache: Arc<SpaceCache>,
}

#[derive(Debug, Default)]
struct SpaceCache {
    hecke: Mutex<BTreeMap<u64, Matrix>>,
    cuspidal: OnceLock<Vec<Vec<Rat>>>,
    boundary: OnceLock<Vec<Vec<Rat>>>,
    pnew: OnceLock<Vec<Vec<Rat>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModSym {
    pub p: u64,
    pub k: u32,
    /// Coordinates relative to `MSSpace::basis`.
    pub coords: Vec<Rat>,
}

impl ModSym {
    pub fn scaled(&self, c: &Rat) -> ModSym {
        ModSym { coords: self.coords.iter().map(|x| x * c).collect(), ..self.clone() }
    }

    pub fn plus(&self, o: &ModSym) -> ModSym {
        ModSym { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }
}

impl MSSpace {
    pub fn build(p: u64, k: u32) -> Result<MSSpace> {
        if !crate::arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k < 1 {
            return Err(Error::BadWeight(k, 1));
        }
        let w = (2 * k - 1) as usize;
        let nvar = (p as usize + 1) * w;
        let sigma = GMat::new(0, -1, 1, 0);
        let tau = GMat::new(0, -1, 1, -1);
        let sigma_inv = sigma.inv();
        let tau_inv = tau.inv();
        let tau2_inv = tau.mul(&tau).inv();
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        // contribution of phi(y)|h to the equations, as a (w x w) block
        let block = |h: &GMat| -> Vec<Vec<Rat>> {
            // column i = image of monomial i
            (0..w).map(|i| act_bar(&HomPoly::monomial(k, i), h).coeffs).collect()
        };
        let bs = block(&sigma_inv);
        let bt = block(&tau_inv);
        let bt2 = block(&tau2_inv);
        for x in 0..=p {
            let g = coset_rep(p, x);
            let xs = p1_index_row(&g.d, &-g.c.clone(), p);
            let xt = p1_index_row(&g.d, &(-&g.c - &g.d), p);
            let xt2 = {
                let gt = g.mul(&tau);
                p1_index_row(&gt.d, &(-&gt.c - &gt.d), p)
            };
            let mut add_eq = |terms: &[(u64, Option<&Vec<Vec<Rat>>>)]| {
                for out in 0..w {
                    let mut row = vec![Rat::zero(); nvar];
                    for (y, blk) in terms {
                        let base = *y as usize * w;
                        match blk {
                            None => row[base + out] += Rat::one(),
                            Some(b) => {
                                for i in 0..w {
                                    row[base + i] += &b[i][out];
                                }
                            }
                        }
                    }
                    rows.push(row);
                }
            };
            add_eq(&[(x, None), (xs, Some(&bs))]);
            add_eq(&[(x, None), (xt, Some(&bt)), (xt2, Some(&bt2))]);
        }
        let relations = Matrix::from_rows(rows, nvar);
        let ker = linalg::kernel(&relations);
        let (basis, pivots) = if ker.is_empty() { (Vec::new(), Vec::new()) } else { linalg::rref(&Matrix::from_rows(ker, nvar)) };
        Ok(MSSpace { p, k, relations, basis, pivots, cache: Arc::default() })
    }

    /// Seeds the operator cache with stored Hecke matrices of the right shape.
    pub fn preload_hecke(&self, l: u64, m: Matrix) -> Result<()> {
        if m.rows != self.dim() || m.cols != self.dim() {
            return Err(Error::Invalid(format!("T_{l} matrix has wrong shape")));
        }
        self.cache.hecke.lock().unwrap().insert(l, m);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn nvar(&self) -> usize {
        (self.p as usize + 1) * (2 * self.k - 1) as usize
    }

    pub fn zero(&self) -> ModSym {
        ModSym { p: self.p, k: self.k, coords: vec![Rat::zero(); self.dim()] }
    }

    pub fn basis_symbol(&self, i: usize) -> ModSym {
        let mut m = self.zero();
        m.coords[i] = Rat::one();
        m
    }

    pub fn from_coords(&self, coords: Vec<Rat>) -> ModSym {
        assert_eq!(coords.len(), self.dim());
        ModSym { p: self.p, k: self.k, coords }
    }

    /// Raw phi-vector of a symbol.
    pub fn phi_vector(&self, m: &ModSym) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.nvar()];
        for (c, b) in m.coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (vi, bi) in v.iter_mut().zip(b) {
                if !bi.is_zero() {
                    *vi += c * bi;
                }
            }
        }
        v
    }

    /// Symbol from a phi-vector (which must satisfy the relations).
    pub fn from_phi(&self, v: &[Rat]) -> Result<ModSym> {
        let c = linalg::coords_in(&self.basis, &self.pivots, v).ok_or(Error::NotInSpan)?;
        Ok(self.from_coords(c))
    }

    fn phi(&self, v: &[Rat], x: u64) -> HomPoly {
        let w = (2 * self.k - 1) as usize;
        HomPoly::new(self.k, v[x as usize * w..(x as usize + 1) * w].to_vec())
    }

    /// m{g0, g oo} for g in SL_2(Z), from a phi-vector.
    fn eval_unimodular(&self, v: &[Rat], g: &GMat) -> HomPoly {
        let x = p1_index_row(&g.c, &g.d, self.p);
        act_bar(&self.phi(v, x), &g.inv())
    }

    /// m{oo, r}.
    fn eval_from_inf(&self, v: &[Rat], r: &ProjRat) -> HomPoly {
        let mut acc = HomPoly::zero(self.k);
        let ProjRat::Fin(r) = r else { return acc };
        let cf = cf_expansion(r);
        let (mut pm1, mut pj) = (BigInt::zero(), BigInt::one());
        let (mut qm1, mut qj) = (BigInt::one(), BigInt::zero());
        for a in &cf {
            let pn = a * &pj + &pm1;
            let qn = a * &qj + &qm1;
            pm1 = std::mem::replace(&mut pj, pn);
            qm1 = std::mem::replace(&mut qj, qn);
            // path {p_{j-1}/q_{j-1}, p_j/q_j} = {g0, g oo}
            let mut g = GMat { a: pj.clone(), b: pm1.clone(), c: qj.clone(), d: qm1.clone() };
            if !g.det().is_one() {
                g.a = -g.a;
                g.c = -g.c;
            }
            debug_assert!(g.det().is_one());
            acc.add_assign(&self.eval_unimodular(v, &g));
        }
        acc
    }

    /// m{r, s} for the symbol with the given phi-vector.
    pub fn eval_phi(&self, v: &[Rat], r: &ProjRat, s: &ProjRat) -> HomPoly {
        if r == s {
            return HomPoly::zero(self.k);
        }
        self.eval_from_inf(v, s).sub(&self.eval_from_inf(v, r))
    }

    /// m{r, s}.
    pub fn eval(&self, m: &ModSym, r: &ProjRat, s: &ProjRat) -> HomPoly {
        self.eval_phi(&self.phi_vector(m), r, s)
    }

    /// Evaluates a finite formal sum sum_i c_i (m|delta_i) at {r, s}, where
    /// (m|delta){r, s} = m{delta r, delta s}|delta.
    pub fn eval_twisted(&self, v: &[Rat], ops: &[(Rat, GMat)], r: &ProjRat, s: &ProjRat) -> HomPoly {
        let mut acc = HomPoly::zero(self.k);
        for (c, d) in ops {
            let val = act_bar(&self.eval_phi(v, &r.apply(d), &s.apply(d)), d);
            acc.add_assign(&val.scale(c));
        }
        acc
    }

    /// Applies sum_i c_i |delta_i to every basis symbol and returns the
    /// matrix (columns = images) when the result lies in the space again.
    pub fn operator_matrix(&self, ops: &[(Rat, GMat)]) -> Result<Matrix> {
        let mut cols = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let m = self.basis_symbol(i);
            cols.push(self.apply_ops(&m, ops)?.coords);
        }
        Ok(Matrix::from_cols(&cols, self.dim()))
    }

    pub fn apply_ops(&self, m: &ModSym, ops: &[(Rat, GMat)]) -> Result<ModSym> {
        let v = self.phi_vector(m);
        let w = (2 * self.k - 1) as usize;
        let mut out = vec![Rat::zero(); self.nvar()];
        let zero = ProjRat::int(0);
        for x in 0..=self.p {
            let g = coset_rep(self.p, x);
            let val = act_bar(&self.eval_twisted(&v, ops, &zero.apply(&g), &ProjRat::Inf.apply(&g)), &g);
            out[x as usize * w..(x as usize + 1) * w].clone_from_slice(&val.coeffs);
        }
        self.from_phi(&out)
    }

    pub fn hecke_ops(&self, l: u64) -> Result<Vec<(Rat, GMat)>> {
        if l == self.p || !crate::arith::is_prime(l) {
            return Err(Error::BadHeckePrime(l, self.p));
        }
        // l^{k-1} sum over Gamma_l with the |det|^{1-k} normalized action
        let c = rat_pow(&Rat::from_integer(l.into()), self.k as i64 - 1);
        let mut ops: Vec<(Rat, GMat)> = (0..l).map(|a| (c.clone(), GMat::new(1, a as i64, 0, l as i64))).collect();
        ops.push((c, GMat::new(l as i64, 0, 0, 1)));
        Ok(ops)
    }

    pub fn up_ops(&self) -> Vec<(Rat, GMat)> {
        let c = rat_pow(&Rat::from_integer(self.p.into()), self.k as i64 - 1);
        (1..=self.p).map(|j| (c.clone(), GMat::new(1, j as i64 - 1, 0, self.p as i64))).collect()
    }

    pub fn hecke_tl(&self, m: &ModSym, l: u64) -> Result<ModSym> {
        self.apply_ops(m, &self.hecke_ops(l)?)
    }

    pub fn hecke_matrix(&self, l: u64) -> Result<Matrix> {
        if let Some(m) = self.cache.hecke.lock().unwrap().get(&l) {
            return Ok(m.clone());
        }
        let m = self.operator_matrix(&self.hecke_ops(l)?)?;
        self.cache.hecke.lock().unwrap().insert(l, m.clone());
        Ok(m)
    }

    /// Hecke matrices computed so far, by prime.
    pub fn cached_hecke(&self) -> BTreeMap<u64, Matrix> {
        self.cache.hecke.lock().unwrap().clone()
    }

    pub fn up_ms(&self, m: &ModSym) -> ModSym {
        self.apply_ops(m, &self.up_ops()).expect("U_p preserves the space")
    }

    pub fn up_matrix(&self) -> Matrix {
        self.operator_matrix(&self.up_ops()).expect("U_p preserves the space")
    }

    /// m|gamma for gamma normalizing Gamma_0(p).
    pub fn act_outer(&self, m: &ModSym, g: &GMat) -> Result<ModSym> {
        self.apply_ops(m, &[(Rat::one(), g.clone())])
    }

    /// (m|gamma){r, s} for arbitrary gamma.
    pub fn act_outer_eval(&self, m: &ModSym, g: &GMat, r: &ProjRat, s: &ProjRat) -> HomPoly {
        act_bar(&self.eval(m, &r.apply(g), &s.apply(g)), g)
    }

    pub fn w_inf(&self, m: &ModSym) -> ModSym {
        self.act_outer(m, &GMat::w_inf()).expect("w_oo normalizes Gamma_0(p)")
    }

    pub fn w_p(&self, m: &ModSym) -> ModSym {
        self.act_outer(m, &GMat::w_p(self.p)).expect("w_p normalizes Gamma_0(p)")
    }

    pub fn w_inf_matrix(&self) -> Matrix {
        self.operator_matrix(&[(Rat::one(), GMat::w_inf())]).unwrap()
    }

    pub fn w_p_matrix(&self) -> Matrix {
        self.operator_matrix(&[(Rat::one(), GMat::w_p(self.p))]).unwrap()
    }

    /// (m+, m-) with m± | w_oo = ± m±.
    pub fn even_odd_split(&self, m: &ModSym) -> (ModSym, ModSym) {
        let w = self.w_inf(m);
        let half = Rat::new(1.into(), 2.into());
        let plus = m.coords.iter().zip(&w.coords).map(|(a, b)| (a + b) * &half).collect();
        let minus = m.coords.iter().zip(&w.coords).map(|(a, b)| (a - b) * &half).collect();
        (self.from_coords(plus), self.from_coords(minus))
    }

    pub fn even_subspace(&self) -> Vec<Vec<Rat>> {
        self.w_inf_matrix().sub_scalar(&Rat::one()).kernel()
    }

    pub fn odd_subspace(&self) -> Vec<Vec<Rat>> {
        self.w_inf_matrix().sub_scalar(&-Rat::one()).kernel()
    }

    /// Values of the two level-lowering traces at {0, oo}:
    /// sum_j m|gamma_j and sum_j m|(w_p gamma_j^{-1}), gamma_j the coset reps.
    pub fn pnew_residuals(&self, m: &ModSym) -> (HomPoly, HomPoly) {
        let v = self.phi_vector(m);
        let wp = GMat::w_p(self.p);
        let reps: Vec<GMat> = (0..=self.p).map(|j| coset_rep(self.p, j)).collect();
        let ops1: Vec<(Rat, GMat)> = reps.iter().map(|g| (Rat::one(), g.clone())).collect();
        let ops2: Vec<(Rat, GMat)> = reps.iter().map(|g| (Rat::one(), wp.mul(&g.inv()))).collect();
        let (z, inf) = (ProjRat::int(0), ProjRat::Inf);
        (self.eval_twisted(&v, &ops1, &z, &inf), self.eval_twisted(&v, &ops2, &z, &inf))
    }

    pub fn is_pnew(&self, m: &ModSym) -> bool {
        let (a, b) = self.pnew_residuals(m);
        a.is_zero() && b.is_zero()
    }

    /// Kernel of both trace conditions.
    pub fn pnew_subspace(&self) -> Vec<Vec<Rat>> {
        self.cache.pnew.get_or_init(|| self.compute_pnew()).clone()
    }

    fn compute_pnew(&self) -> Vec<Vec<Rat>> {
        let w = (2 * self.k - 1) as usize;
        let mut rows = vec![vec![Rat::zero(); self.dim()]; 2 * w];
        for i in 0..self.dim() {
            let (a, b) = self.pnew_residuals(&self.basis_symbol(i));
            for t in 0..w {
                rows[t][i] = a.coeffs[t].clone();
                rows[w + t][i] = b.coeffs[t].clone();
            }
        }
        let ker = Matrix::from_rows(rows, self.dim()).kernel();
        linalg::span_basis(&ker, self.dim())
    }

    /// Smallest prime different from p.
    pub fn aux_prime(&self) -> u64 {
        if self.p == 2 {
            3
        } else {
            2
        }
    }

    /// Eisenstein eigenvalue 1 + l^{2k-1} of T_l on boundary symbols.
    pub fn eisenstein_eigenvalue(&self, l: u64) -> Rat {
        Rat::one() + rat_pow(&Rat::from_integer(l.into()), 2 * self.k as i64 - 1)
    }

    /// Cuspidal subspace: image of T_l - (1 + l^{2k-1}) for the auxiliary prime l.
    pub fn cuspidal_subspace(&self) -> Vec<Vec<Rat>> {
        self.cache.cuspidal.get_or_init(|| self.compute_cuspidal()).clone()
    }

    fn compute_cuspidal(&self) -> Vec<Vec<Rat>> {
        let l = self.aux_prime();
        let a = self.hecke_matrix(l).unwrap().sub_scalar(&self.eisenstein_eigenvalue(l));
        let cols: Vec<Vec<Rat>> = (0..a.cols).map(|j| a.col(j)).collect();
        linalg::span_basis(&cols, self.dim())
    }

    /// Boundary (Eisenstein) subspace: kernel of T_l - (1 + l^{2k-1}).
    pub fn boundary_subspace(&self) -> Vec<Vec<Rat>> {
        self.cache.boundary.get_or_init(|| self.compute_boundary()).clone()
    }

    fn compute_boundary(&self) -> Vec<Vec<Rat>> {
        let l = self.aux_prime();
        let a = self.hecke_matrix(l).unwrap().sub_scalar(&self.eisenstein_eigenvalue(l));
        linalg::span_basis(&a.kernel(), self.dim())
    }

    /// Boundary symbols m_F{r, s} = F(s) - F(r) built directly from the cusp
    /// data F(oo) = c_inf Y^n, F(0) = c_0 X^n extended by equivariance.
    pub fn boundary_symbol(&self, c_inf: &Rat, c_0: &Rat) -> Result<ModSym> {
        let n = (2 * self.k - 2) as usize;
        let mut f_inf = HomPoly::zero(self.k);
        f_inf.coeffs[0] = c_inf.clone();
        let mut f_0 = HomPoly::zero(self.k);
        f_0.coeffs[n] = c_0.clone();
        let f = |r: &ProjRat| -> HomPoly {
            let (a, c) = r.pair();
            let pb = BigInt::from(self.p);
            if c.is_multiple_of(&pb) {
                // gamma oo = a/c with gamma in Gamma_0(p)
                let e = a.extended_gcd(&c);
                let gam = GMat { a: a.clone(), b: -e.y, c: c.clone(), d: e.x };
                debug_assert!(gam.in_gamma0(self.p));
                act_bar(&f_inf, &gam.inv())
            } else {
                // gamma 0 = a/c, gamma = (x a; y c) with p | y and xc - ay = 1
                let e = c.extended_gcd(&(&a * &pb));
                let (x, y) = (e.x.clone(), -(e.y.clone() * &pb));
                let gam = GMat { a: x, b: a.clone(), c: y, d: c.clone() };
                debug_assert!(gam.in_gamma0(self.p));
                act_bar(&f_0, &gam.inv())
            }
        };
        let w = (2 * self.k - 1) as usize;
        let mut v = vec![Rat::zero(); self.nvar()];
        for x in 0..=self.p {
            let g = coset_rep(self.p, x);
            let val = act_bar(&f(&ProjRat::Inf.apply(&g)).sub(&f(&ProjRat::int(0).apply(&g))), &g);
            v[x as usize * w..(x as usize + 1) * w].clone_from_slice(&val.coeffs);
        }
        self.from_phi(&v)
    }

    /// Boundary map: the value at {oo, 0} of the boundary component of m
    /// (projection along the cuspidal subspace).  Zero exactly on the
    /// cuspidal subspace.
    pub fn boundary_map(&self, m: &ModSym) -> HomPoly {
        let cusp = self.cuspidal_subspace();
        let bnd = self.boundary_subspace();
        let mut basis = bnd.clone();
        basis.extend(cusp);
        let c = linalg::solve_in_basis(&basis, &m.coords).expect("boundary + cuspidal spans the space");
        let mut coords = vec![Rat::zero(); self.dim()];
        for (ci, b) in c.iter().zip(&bnd) {
            for (x, y) in coords.iter_mut().zip(b) {
                *x += ci * y;
            }
        }
        self.eval(&self.from_coords(coords), &ProjRat::Inf, &ProjRat::int(0))
    }
}

/// m|g evaluated at {r, s} for a rational-entry g (used on tree edges).
pub fn eval_twisted_rational(space: &MSSpace, m: &ModSym, g: &RMat, r: &ProjRat, s: &ProjRat) -> HomPoly {
    let apply = |z: &ProjRat| -> ProjRat {
        let (x, y) = z.pair();
        let (x, y) = (Rat::from_integer(x), Rat::from_integer(y));
        let nx = &g.a * &x + &g.b * &y;
        let ny = &g.c * &x + &g.d * &y;
        if ny.is_zero() {
            ProjRat::Inf
        } else {
            ProjRat::Fin(nx / ny)
        }
    };
    act_bar_r(&space.eval(m, &apply(r), &apply(s)), g)
}

/// Even (+1) / odd (-1) part of a subspace.
pub fn sign_part(space: &MSSpace, sub: &[Vec<Rat>], sign: i64) -> Vec<Vec<Rat>> {
    let ev = if sign > 0 { space.even_subspace() } else { space.odd_subspace() };
    linalg::intersect(sub, &ev, space.dim())
}

/// Restriction of an operator (matrix on the full space) to an invariant
/// subspace with the given basis.
pub fn restrict(op: &Matrix, sub: &[Vec<Rat>]) -> Result<Matrix> {
    let mut cols = Vec::with_capacity(sub.len());
    for b in sub {
        let img = op.mul_vec(b);
        cols.push(linalg::solve_in_basis(sub, &img).ok_or(Error::NotInSpan)?);
    }
    Ok(Matrix::from_cols(&cols, sub.len()))
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn max_abs(v: &[Rat]) -> Rat {
    v.iter().map(|x| x.abs()).fold(Rat::zero(), |a, b| if b > a { b } else { a })
}
