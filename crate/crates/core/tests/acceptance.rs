//! End-to-end acceptance run.  Prints one line per criterion and exits
//! nonzero if any criterion fails.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigid_shintani::arith::{is_square, rat, Rat};
use rigid_shintani::cocycle::{from_pnew, harmonicity_check_ms, hecke_t, CocycleRes};
use rigid_shintani::linalg::intersect;
use rigid_shintani::modsym::{sign_part, MSSpace};
use rigid_shintani::oracle::{compare_with_oracle, dim_formula, eigen_data, odd_newform_symbol, period_oracle};
use rigid_shintani::polyact::{act_bar, act_star, alpha, pair, GMat, HomPoly};
use rigid_shintani::qforms::{classes_for_disc, enumerate_classes, ProjRat, QForm};
use rigid_shintani::shintani::{classes, coefficient, equivariance_report, halfint_hecke, lift, lift_pm};
use std::time::{Duration, Instant};

const SEED: u64 = 20240917;
const PERIOD_TOL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn cusp_pnew(s: &MSSpace) -> Vec<Vec<Rat>> {
    intersect(&s.pnew_subspace(), &s.cuspidal_subspace(), s.dim())
}

fn odd_cocycle(s: &MSSpace) -> CocycleRes {
    let odd = sign_part(s, &cusp_pnew(s), -1);
    from_pnew(s, &s.from_coords(odd[0].clone())).unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> GMat {
    let n = rng.gen_range(0..=len);
    (0..n).fold(GMat::identity(), |g, _| {
        g.mul(&match rng.gen_range(0..4) {
            0 => GMat::s(),
            1 => GMat::t(),
            2 => GMat::t().inv(),
            _ => GMat::s().inv(),
        })
    })
}

fn random_gamma0(rng: &mut ChaCha8Rng, p: u64) -> GMat {
    loop {
        let c = BigInt::from(rng.gen_range(-8i64..=8) * p as i64);
        let d = BigInt::from(rng.gen_range(-40i64..=40));
        let e = d.extended_gcd(&c);
        if e.gcd == BigInt::from(1) {
            let shift = GMat::t().pow(rng.gen_range(0..6));
            return GMat { a: e.x, b: -e.y, c, d }.mul(&shift);
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, k: u32) -> HomPoly {
    HomPoly::from_ints(k, &(0..2 * k - 1).map(|_| rng.gen_range(-30i64..=30)).collect::<Vec<_>>())
}

fn c1_dimensions() -> Outcome {
    let mut bad = Vec::new();
    for (p, k) in [(2u64, 2u32), (2, 4), (3, 2), (5, 2), (5, 3), (7, 2)] {
        let s = MSSpace::build(p, k).unwrap();
        let (d, cusps) = dim_formula(p, k).unwrap();
        if s.dim() as u64 != 2 * d + cusps || s.cuspidal_subspace().len() as u64 != 2 * d {
            bad.push(format!("({p},{k})"));
        }
    }
    ok(bad.is_empty(), if bad.is_empty() { "6 spaces match".into() } else { format!("mismatch at {}", bad.join(" ")) })
}

fn c2_harmonicity() -> Outcome {
    let s = MSSpace::build(5, 2).unwrap();
    let paths = [
        (ProjRat::int(0), ProjRat::Inf),
        (ProjRat::Inf, ProjRat::frac(1, 3)),
        (ProjRat::frac(2, 7), ProjRat::frac(-1, 2)),
    ];
    let mut set: Vec<_> = (0..s.dim()).map(|i| s.basis_symbol(i)).collect();
    set.extend(s.pnew_subspace().into_iter().map(|v| s.from_coords(v)));
    set.extend(s.boundary_subspace().into_iter().map(|v| s.from_coords(v)));
    let agree = set
        .iter()
        .filter(|m| paths.iter().all(|(r, t)| harmonicity_check_ms(&s, m, r, t)) == s.is_pnew(m))
        .count();
    ok(agree == set.len(), format!("{agree}/{} symbols agree", set.len()))
}

fn c3_well_defined(rng: &mut ChaCha8Rng) -> Outcome {
    let s = MSSpace::build(5, 2).unwrap();
    let j = odd_cocycle(&s);
    let forms: Vec<QForm> = classes(5, 300).into_iter().flat_map(|(_, r)| r).collect();
    let omegas = [ProjRat::int(0), ProjRat::int(1), ProjRat::Inf, ProjRat::int(-1), ProjRat::frac(1, 2)];
    let mut omega_ok = 0;
    for q in forms.iter().take(60) {
        let v: Vec<Rat> = omegas.iter().map(|w| coefficient(&s, &j, q, w).unwrap()).collect();
        if v.iter().all(|x| *x == v[0]) {
            omega_ok += 1;
        }
    }
    let n = forms.len().min(60);
    let mut orbit_ok = 0;
    for _ in 0..200 {
        let q = &forms[rng.gen_range(0..forms.len())];
        let g = random_gamma0(rng, 5);
        if coefficient(&s, &j, &q.star(&g).unwrap(), &ProjRat::Inf).unwrap() == coefficient(&s, &j, q, &ProjRat::Inf).unwrap() {
            orbit_ok += 1;
        }
    }
    ok(omega_ok == n && n >= 50 && orbit_ok == 200, format!("omega {omega_ok}/{n} forms, translates {orbit_ok}/200"))
}

fn c4_plus_vanishing() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (p, k) in [(5u64, 2u32), (7, 2), (5, 3)] {
        let s = MSSpace::build(p, k).unwrap();
        let dmax = 80 * p;
        let cl = classes(p, dmax);
        for v in cusp_pnew(&s) {
            let j = from_pnew(&s, &s.from_coords(v)).unwrap();
            let (plus, minus) = lift_pm(&s, &j, &cl, dmax).unwrap();
            checked += 1;
            if !plus.is_zero() || minus != lift(&s, &j, &cl, dmax).unwrap() {
                bad.push(format!("({p},{k})"));
            }
        }
    }
    ok(bad.is_empty() && checked > 0, format!("{checked} basis cocycles, plus-lift zero up to q^80{}", if bad.is_empty() { String::new() } else { format!(", failures {}", bad.join(" ")) }))
}

fn c5_equivariance(s: &MSSpace, cl: &[(u64, Vec<QForm>)]) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (b, v) in cusp_pnew(s).into_iter().enumerate() {
        let j = from_pnew(s, &s.from_coords(v)).unwrap();
        for l in [2u64, 3] {
            let r = equivariance_report(s, &j, l, &cl.to_vec(), 900).unwrap();
            pass &= r.pass;
            parts.push(format!("v{b} l={l} n<={} {}", r.nmax, if r.pass { "ok" } else { "FAIL" }));
        }
    }
    ok(pass, parts.join(", "))
}

fn c6_eigen_transport(s: &MSSpace, cl: &[(u64, Vec<QForm>)]) -> Outcome {
    let j = odd_cocycle(s);
    let tj = hecke_t(s, &j, 2).unwrap();
    let i = j.mu.coords.iter().position(|c| *c != rat(0, 1)).unwrap();
    let a2 = &tj.mu.coords[i] / &j.mu.coords[i];
    let eigen = tj == j.scale(&a2);
    let f = lift(s, &j, &cl.to_vec(), 900).unwrap();
    let lhs = halfint_hecke(&f, 2).unwrap();
    let rhs = f.scale(&a2);
    let n = lhs.nmax();
    let first = (1..=n).find(|&m| lhs.get(m) != rhs.get(m));
    ok(eigen && first.is_none() && !f.is_zero(), format!("a2 = {a2}, n<={n}{}", first.map(|m| format!(", first mismatch {m}")).unwrap_or_default()))
}

fn c7_nonvanishing() -> Outcome {
    let mut hits = Vec::new();
    for (p, k) in [(5u64, 2u32), (7, 2), (5, 3)] {
        let s = MSSpace::build(p, k).unwrap();
        let cl = classes(p, 200);
        if cusp_pnew(&s).into_iter().any(|v| !lift(&s, &from_pnew(&s, &s.from_coords(v)).unwrap(), &cl, 200).unwrap().is_zero()) {
            hits.push(format!("({p},{k})"));
        }
    }
    ok(!hits.is_empty(), format!("nonzero lift at {}", if hits.is_empty() { "none".into() } else { hits.join(" ") }))
}

fn c8_orbits() -> Outcome {
    let mut total = 0;
    let mut bad = Vec::new();
    for p in [3u64, 5] {
        for d in (1..=100i64).filter(|d| d % p as i64 == 0 && (d % 4 == 0 || d % 4 == 1)) {
            let reps = classes_for_disc(p, &BigInt::from(d));
            total += 1;
            if !compare_with_oracle(p, d, &reps, 2).bijective {
                bad.push(format!("p={p} D={d}"));
            }
        }
    }
    ok(bad.is_empty(), format!("{}/{total} discriminants agree{}", total - bad.len(), if bad.is_empty() { String::new() } else { format!(", {}", bad.join(" ")) }))
}

fn c9_algebra(rng: &mut ChaCha8Rng) -> Outcome {
    let mut fails = [0usize; 5];
    let spaces: Vec<MSSpace> = [(5u64, 2u32), (3, 3), (2, 4)].iter().map(|(p, k)| MSSpace::build(*p, *k).unwrap()).collect();
    for i in 0..1000 {
        let k = 1 + (i % 4) as u32;
        let (g1, g2) = (random_word(rng, 10), random_word(rng, 10));
        let (h1, h2) = (random_poly(rng, k), random_poly(rng, k));
        if pair(&act_star(&h1, &g1), &act_star(&h2, &g1)).unwrap() != pair(&h1, &h2).unwrap() {
            fails[0] += 1;
        }
        if pair(&act_star(&h1, &g1.inv()), &h2).unwrap() != pair(&h1, &act_star(&h2, &g1)).unwrap() {
            fails[1] += 1;
        }
        let m = GMat::new(1, rng.gen_range(0..5), 0, rng.gen_range(1..5));
        if act_bar(&act_bar(&act_bar(&h1, &g1), &m), &g2) != act_bar(&h1, &g1.mul(&m).mul(&g2))
            || act_star(&act_star(&h1, &g1), &g2) != act_star(&h1, &g1.mul(&g2))
        {
            fails[2] += 1;
        }
        if alpha(&act_bar(&h1, &g1)) != act_star(&alpha(&h1), &g1) {
            fails[3] += 1;
        }
        let p = [2u64, 3, 5, 7, 11][i % 5];
        let w = GMat::w_p(p);
        let sp = &spaces[i % spaces.len()];
        let sym = sp.from_coords((0..sp.dim()).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect());
        if act_bar(&act_bar(&h1, &w), &w) != h1
            || act_bar(&act_bar(&h1, &GMat::w_inf()), &GMat::w_inf()) != h1
            || sp.w_p(&sp.w_p(&sym)) != sym
            || sp.w_inf(&sp.w_inf(&sym)) != sym
        {
            fails[4] += 1;
        }
    }
    let names = ["invariance", "adjunction", "composition", "alpha", "involutions"];
    let detail = names.iter().zip(&fails).map(|(n, f)| format!("{n} {}/1000", 1000 - f)).collect::<Vec<_>>().join(", ");
    ok(fails.iter().all(|f| *f == 0), detail)
}

fn c10_periods() -> Outcome {
    let s = MSSpace::build(5, 2).unwrap();
    let Some(mu) = odd_newform_symbol(&s) else { return ok(false, "no odd newform line") };
    let f = match eigen_data(&s, &mu, 200) {
        Ok(f) => f,
        Err(e) => return ok(false, format!("eigen data: {e}")),
    };
    let j = from_pnew(&s, &mu).unwrap();
    let mut ratios = Vec::new();
    for (d, reps) in enumerate_classes(5, 120) {
        if is_square(&BigInt::from(d)) {
            continue;
        }
        for q in reps {
            let exact = coefficient(&s, &j, &q, &ProjRat::Inf).unwrap();
            if exact != rat(0, 1) {
                ratios.push(period_oracle(&f, &q, 12).unwrap() / exact.to_f64().unwrap());
            }
        }
    }
    let r0 = ratios[0];
    let spread = ratios.iter().map(|r| (r - r0).norm() / r0.norm()).fold(0.0, f64::max);
    ok(ratios.len() >= 5 && spread <= PERIOD_TOL, format!("{} classes, ratio {:.12e}, max relative spread {spread:.2e} (tol {PERIOD_TOL:e})", ratios.len(), r0.re))
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    println!("acceptance run, seed {SEED}");
    let s52 = MSSpace::build(5, 2).unwrap();
    let cl900 = classes(5, 900);
    type Criterion<'a> = (u32, &'a str, u64, Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        (1, "space dimensions", 60, Box::new(|_| c1_dimensions())),
        (2, "p-new iff harmonic", 10, Box::new(|_| c2_harmonicity())),
        (3, "well-definedness", 120, Box::new(c3_well_defined)),
        (4, "even-part vanishing", 600, Box::new(|_| c4_plus_vanishing())),
        (5, "Hecke equivariance", 900, Box::new(|_| c5_equivariance(&s52, &cl900))),
        (6, "eigen-transport", 900, Box::new(|_| c6_eigen_transport(&s52, &cl900))),
        (7, "nonvanishing", 600, Box::new(|_| c7_nonvanishing())),
        (8, "orbit enumeration", 300, Box::new(|_| c8_orbits())),
        (9, "pairing and action algebra", 60, Box::new(c9_algebra)),
        (10, "period consistency", 600, Box::new(|_| c10_periods())),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let t = Instant::now();
        let out = run(&mut rng);
        let el = t.elapsed();
        let in_time = el <= Duration::from_secs(budget);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} [{}] {name}: {} ({:.2}s of {budget}s)",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            el.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
