mod common;

use common::{config, gamma0};
use proptest::prelude::*;
use rigid_shintani::arith::{rat, rat_pow, Rat};
use rigid_shintani::linalg::{charpoly, intersect, solve_in_basis, Matrix};
use rigid_shintani::modsym::{coset_rep, restrict, sign_part, MSSpace};
use rigid_shintani::polyact::{act_bar, GMat, HomPoly};
use rigid_shintani::qforms::ProjRat;
use std::sync::OnceLock;

fn space(p: u64, k: u32) -> &'static MSSpace {
    static CACHE: OnceLock<std::sync::Mutex<Vec<(u64, u32, &'static MSSpace)>>> = OnceLock::new();
    let c = CACHE.get_or_init(Default::default);
    let mut g = c.lock().unwrap();
    if let Some((_, _, s)) = g.iter().find(|(a, b, _)| *a == p && *b == k) {
        return s;
    }
    let s: &'static MSSpace = Box::leak(Box::new(MSSpace::build(p, k).unwrap()));
    g.push((p, k, s));
    s
}

fn ints(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|x| rat(*x, 1)).collect()
}

fn cusp_pnew(s: &MSSpace) -> Vec<Vec<Rat>> {
    intersect(&s.pnew_subspace(), &s.cuspidal_subspace(), s.dim())
}

fn stable(op: &Matrix, sub: &[Vec<Rat>]) -> bool {
    sub.iter().all(|v| solve_in_basis(sub, &op.mul_vec(v)).is_some())
}

#[test]
fn dimensions() {
    // (p, k, dim, cuspidal, p-new cuspidal)
    for (p, k, d, c, n) in [
        (2u64, 2u32, 2usize, 0usize, 0usize),
        (2, 4, 4, 2, 2),
        (3, 2, 2, 0, 0),
        (5, 2, 4, 2, 2),
        (5, 3, 4, 2, 2),
        (7, 2, 4, 2, 2),
        (11, 2, 6, 4, 4),
        (5, 4, 8, 6, 6),
    ] {
        let s = space(p, k);
        assert_eq!(s.dim(), d, "dim p={p} k={k}");
        assert_eq!(s.cuspidal_subspace().len(), c, "cusp p={p} k={k}");
        assert_eq!(cusp_pnew(s).len(), n, "pnew p={p} k={k}");
        assert_eq!(s.even_subspace().len() + s.odd_subspace().len(), d);
    }
    assert!(space(2, 1).dim() >= 1);
    assert!(MSSpace::build(4, 2).is_err());
    assert!(MSSpace::build(5, 0).is_err());
}

#[test]
fn eval_basics() {
    let s = space(5, 2);
    let (z, one, inf) = (ProjRat::int(0), ProjRat::int(1), ProjRat::Inf);
    for i in 0..s.dim() {
        let m = s.basis_symbol(i);
        assert!(s.eval(&m, &one, &one).is_zero());
        assert!(s.eval(&m, &z, &inf).add(&s.eval(&m, &inf, &z)).is_zero());
        assert_eq!(s.eval(&m, &z, &one), s.eval(&m, &z, &inf).add(&s.eval(&m, &inf, &one)));
    }
    assert!(s.eval(&s.zero(), &z, &inf).is_zero());
}

#[test]
fn hecke_charpolys() {
    // full space of (5,2): cuspidal (x+4)^2 and Eisenstein (x-9)^2
    let t2 = space(5, 2).hecke_matrix(2).unwrap();
    assert_eq!(charpoly(&t2), ints(&[1296, 360, -47, -10, 1]));
    let cases: [(u64, u32, u64, [i64; 3]); 4] =
        [(5, 2, 2, [16, 8, 1]), (5, 3, 2, [4, -4, 1]), (7, 2, 2, [1, 2, 1]), (2, 4, 3, [144, -24, 1])];
    for (p, k, l, cp) in cases {
        let s = space(p, k);
        let t = restrict(&s.hecke_matrix(l).unwrap(), &s.cuspidal_subspace()).unwrap();
        assert_eq!(charpoly(&t), ints(&cp), "p={p} k={k} l={l}");
    }
    assert!(space(5, 2).hecke_matrix(5).is_err());
    assert!(space(5, 2).hecke_matrix(4).is_err());
}

#[test]
fn hecke_commutes() {
    for (p, k) in [(5u64, 2u32), (11, 2), (5, 4)] {
        let s = space(p, k);
        let (t2, t3) = (s.hecke_matrix(2).unwrap(), s.hecke_matrix(3).unwrap());
        let w = s.w_inf_matrix();
        let wp = s.w_p_matrix();
        assert_eq!(t2.mul(&t3), t3.mul(&t2));
        assert_eq!(t2.mul(&w), w.mul(&t2));
        assert_eq!(t3.mul(&wp), wp.mul(&t3));
        assert_eq!(s.up_matrix().mul(&t2), t2.mul(&s.up_matrix()));
    }
}

#[test]
fn involutions() {
    for (p, k) in [(5u64, 2u32), (7, 3), (2, 4)] {
        let s = space(p, k);
        let id = Matrix::identity(s.dim());
        assert_eq!(s.w_inf_matrix().mul(&s.w_inf_matrix()), id);
        assert_eq!(s.w_p_matrix().mul(&s.w_p_matrix()), id);
        let m = s.basis_symbol(0);
        assert_eq!(s.act_outer(&m, &GMat::identity()).unwrap(), m);
    }
}

#[test]
fn pnew_stability_and_up() {
    for (p, k) in [(5u64, 2u32), (5, 3), (7, 2), (2, 4), (11, 2)] {
        let s = space(p, k);
        let pnew = s.pnew_subspace();
        let l = s.aux_prime();
        for op in [s.hecke_matrix(l).unwrap(), s.up_matrix(), s.w_inf_matrix(), s.w_p_matrix()] {
            assert!(stable(&op, &pnew), "p={p} k={k}");
        }
        let cp = cusp_pnew(s);
        let up = restrict(&s.up_matrix(), &cp).unwrap();
        let pk = rat_pow(&rat(p as i64, 1), k as i64 - 1);
        assert_eq!(up.mul(&up), Matrix::identity(cp.len()).scale(&(&pk * &pk)));
        // U_p = -p^{k-1} w_p on the p-new part
        let wp = restrict(&s.w_p_matrix(), &pnew).unwrap();
        assert_eq!(restrict(&s.up_matrix(), &pnew).unwrap(), wp.scale(&-pk));
        for v in &pnew {
            assert!(s.is_pnew(&s.from_coords(v.clone())));
        }
    }
}

#[test]
fn pnew_is_transversal_independent() {
    let s = space(5, 2);
    let p = s.p;
    let (z, inf) = (ProjRat::int(0), ProjRat::Inf);
    let deltas = [GMat::new(1, 1, 0, 1), GMat::new(1, 0, 5, 1), GMat::new(2, 1, 5, 3), GMat::new(1, -1, -5, 6)];
    for i in 0..s.dim() {
        let m = s.basis_symbol(i);
        let v = s.phi_vector(&m);
        let moved: Vec<(Rat, GMat)> = (0..=p).map(|j| (rat(1, 1), deltas[j as usize % 4].mul(&coset_rep(p, j)))).collect();
        assert_eq!(s.eval_twisted(&v, &moved, &z, &inf), s.pnew_residuals(&m).0);
    }
}

#[test]
fn even_odd() {
    let s = space(5, 2);
    let cp = cusp_pnew(s);
    let t2 = s.hecke_matrix(2).unwrap();
    for sign in [1, -1] {
        let part = sign_part(s, &cp, sign);
        assert_eq!(part.len(), 1);
        assert_eq!(charpoly(&restrict(&t2, &part).unwrap()), ints(&[4, 1]));
    }
    for i in 0..s.dim() {
        let m = s.basis_symbol(i);
        let (plus, minus) = s.even_odd_split(&m);
        let (pp, pm) = s.even_odd_split(&plus);
        assert_eq!(pp, plus);
        assert!(pm.coords.iter().all(|c| *c == rat(0, 1)));
        let (wp, wm) = s.even_odd_split(&s.w_inf(&m));
        assert_eq!(wp, plus);
        assert_eq!(wm.coords, minus.coords.iter().map(|c| -c).collect::<Vec<_>>());
    }
}

#[test]
fn boundary() {
    for (p, k) in [(5u64, 2u32), (2, 4), (7, 3)] {
        let s = space(p, k);
        let n = (2 * k - 2) as usize;
        let bnd = s.boundary_subspace();
        assert_eq!(bnd.len(), 2);
        for v in s.cuspidal_subspace() {
            assert!(s.boundary_map(&s.from_coords(v)).is_zero());
        }
        let e = s.boundary_symbol(&rat(1, 1), &rat(0, 1)).unwrap();
        assert!(solve_in_basis(&bnd, &e.coords).is_some());
        assert_eq!(s.boundary_map(&e), HomPoly::monomial(k, 0).scale(&rat(-1, 1)));
        let e0 = s.boundary_symbol(&rat(0, 1), &rat(1, 1)).unwrap();
        assert_eq!(s.boundary_map(&e0), HomPoly::monomial(k, n));
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn modular_symbol_axioms(i in 0usize..4, r in (-40i64..40, 1i64..30), s in (-40i64..40, 1i64..30), t in (-40i64..40, 1i64..30)) {
        let sp = space(5, 2);
        let m = sp.basis_symbol(i);
        let (r, s, t) = (ProjRat::frac(r.0, r.1), ProjRat::frac(s.0, s.1), ProjRat::frac(t.0, t.1));
        prop_assert_eq!(sp.eval(&m, &r, &s), sp.eval(&m, &s, &r).neg());
        prop_assert_eq!(sp.eval(&m, &r, &t), sp.eval(&m, &r, &s).add(&sp.eval(&m, &s, &t)));
    }

    #[test]
    fn gamma0_invariance(g in gamma0(5, 12), i in 0usize..4, r in (-40i64..40, 1i64..30), s in (-40i64..40, 1i64..30)) {
        let sp = space(5, 2);
        let m = sp.basis_symbol(i);
        let (r, s) = (ProjRat::frac(r.0, r.1), ProjRat::frac(s.0, s.1));
        prop_assert!(g.in_gamma0(5));
        prop_assert_eq!(act_bar(&sp.eval(&m, &r.apply(&g), &s.apply(&g)), &g), sp.eval(&m, &r, &s));
    }

    #[test]
    fn gamma0_invariance_higher_weight(g in gamma0(7, 12), i in 0usize..6, r in (-40i64..40, 1i64..30)) {
        let sp = space(7, 3);
        let m = sp.basis_symbol(i % sp.dim());
        let r = ProjRat::frac(r.0, r.1);
        let inf = ProjRat::Inf;
        prop_assert_eq!(act_bar(&sp.eval(&m, &r.apply(&g), &inf.apply(&g)), &g), sp.eval(&m, &r, &inf));
    }
}
