//! Rigid cocycles represented by their residue symbol, Hecke operators on
//! them, and the attached harmonic cocycle on the Bruhat-Tits tree of PGL_2(Q_p).
//!
//! Edge convention: for e = gamma e0 the value on the path {r, s} is
//! mu{gamma^{-1} r, gamma^{-1} s} | gamma^{-1}, which depends on gamma only
//! modulo the stabilizer Gamma_0(p) of e0.

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::modsym::{coset_rep, eval_twisted_rational, MSSpace, ModSym};
use crate::polyact::{GMat, HomPoly, RMat};
use crate::qforms::ProjRat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleRes {
    pub p: u64,
    pub k: u32,
    pub mu: ModSym,
    pub cuspidal: bool,
}

impl CocycleRes {
    pub fn zero(space: &MSSpace) -> Self {
        CocycleRes { p: space.p, k: space.k, mu: space.zero(), cuspidal: true }
    }

    pub fn scale(&self, c: &Rat) -> CocycleRes {
        CocycleRes { mu: self.mu.scaled(c), ..self.clone() }
    }

    pub fn add(&self, o: &CocycleRes) -> CocycleRes {
        CocycleRes {
            mu: self.mu.plus(&o.mu),
            cuspidal: self.cuspidal && o.cuspidal,
            ..self.clone()
        }
    }
}

/// Accepts mu iff both p-new trace conditions vanish.
pub fn from_pnew(space: &MSSpace, mu: &ModSym) -> Result<CocycleRes> {
    let (a, b) = space.pnew_residuals(mu);
    if !a.is_zero() || !b.is_zero() {
        return Err(Error::NotPNew(format!("{a} ; {b}")));
    }
    let cuspidal = space.boundary_map(mu).is_zero();
    Ok(CocycleRes { p: space.p, k: space.k, mu: mu.clone(), cuspidal })
}

pub fn hecke_t(space: &MSSpace, j: &CocycleRes, l: u64) -> Result<CocycleRes> {
    let mu = space.hecke_tl(&j.mu, l)?;
    from_pnew(space, &mu)
}

/// U_p(J) = -J|w_p.
pub fn up(space: &MSSpace, j: &CocycleRes) -> CocycleRes {
    let w = space.w_p(&j.mu);
    CocycleRes { mu: w.scaled(&-Rat::from_integer(1.into())), ..j.clone() }
}

/// Oriented edge gamma e0 (or gamma applied to the reversed edge when
/// `flipped`), with gamma in SL_2(Z[1/p]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub rep: RMat,
    pub flipped: bool,
}

impl TreeEdge {
    pub fn e0() -> Self {
        TreeEdge { rep: GMat::identity().to_rmat(), flipped: false }
    }

    pub fn new(rep: RMat, flipped: bool) -> Self {
        TreeEdge { rep, flipped }
    }

    pub fn translate(&self, g: &RMat) -> TreeEdge {
        TreeEdge { rep: g.mul(&self.rep), flipped: self.flipped }
    }

    pub fn reverse(&self) -> TreeEdge {
        TreeEdge { rep: self.rep.clone(), flipped: !self.flipped }
    }
}

/// Whether delta lies in the stabilizer Gamma_0(p) of e0.
pub fn stabilizes_e0(delta: &RMat, p: u64) -> bool {
    if delta.det() != Rat::from_integer(1.into()) {
        return false;
    }
    let wp = GMat::w_p(p).to_rmat();
    let conj = wp.mul(delta).mul(&wp.inv());
    match (delta.to_gmat(), conj.is_integral()) {
        (Some(g), true) => g.in_gamma0(p),
        _ => false,
    }
}

pub fn same_edge(e1: &TreeEdge, e2: &TreeEdge, p: u64) -> bool {
    e1.flipped == e2.flipped && stabilizes_e0(&e1.rep.inv().mul(&e2.rep), p)
}

/// Value of the harmonic cocycle attached to mu on edge e along {r, s}.
pub fn eval_at_edge_ms(space: &MSSpace, mu: &ModSym, e: &TreeEdge, r: &ProjRat, s: &ProjRat) -> HomPoly {
    let v = eval_twisted_rational(space, mu, &e.rep.inv(), r, s);
    if e.flipped {
        v.neg()
    } else {
        v
    }
}

pub fn eval_at_edge(space: &MSSpace, j: &CocycleRes, e: &TreeEdge, r: &ProjRat, s: &ProjRat) -> HomPoly {
    eval_at_edge_ms(space, &j.mu, e, r, s)
}

/// Edges leaving the standard vertex v0: gamma_j e0.
pub fn edges_from_v0(p: u64) -> Vec<TreeEdge> {
    (0..=p).map(|j| TreeEdge::new(coset_rep(p, j).to_rmat(), false)).collect()
}

/// Edges leaving v1, the target of e0: g_j applied to the reversed e0 with
/// g_j = w_p gamma_j w_p^{-1}.
pub fn edges_from_v1(p: u64) -> Vec<TreeEdge> {
    let wp = GMat::w_p(p).to_rmat();
    let wpi = wp.inv();
    (0..=p)
        .map(|j| TreeEdge::new(wp.mul(&coset_rep(p, j).to_rmat()).mul(&wpi), true))
        .collect()
}

/// The two vertex sums at the endpoints of e0, along {r, s}.
pub fn vertex_sums(space: &MSSpace, mu: &ModSym, r: &ProjRat, s: &ProjRat) -> (HomPoly, HomPoly) {
    let sum = |edges: Vec<TreeEdge>| {
        edges.iter().fold(HomPoly::zero(space.k), |acc, e| acc.add(&eval_at_edge_ms(space, mu, e, r, s)))
    };
    (sum(edges_from_v0(space.p)), sum(edges_from_v1(space.p)))
}

/// Vertex-sum harmonicity at both endpoints of e0.
pub fn harmonicity_check_ms(space: &MSSpace, mu: &ModSym, r: &ProjRat, s: &ProjRat) -> bool {
    let (a, b) = vertex_sums(space, mu, r, s);
    a.is_zero() && b.is_zero()
}

pub fn harmonicity_check(space: &MSSpace, j: &CocycleRes, r: &ProjRat, s: &ProjRat) -> bool {
    harmonicity_check_ms(space, &j.mu, r, s)
}
