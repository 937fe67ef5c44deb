mod json;
mod workspace;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use rigid_shintani::arith::{is_prime, is_square, rat_to_string, Rat};
use rigid_shintani::cocycle::{from_pnew, CocycleRes};
use rigid_shintani::linalg::{charpoly, intersect};
use rigid_shintani::modsym::{sign_part, MSSpace};
use rigid_shintani::oracle;
use rigid_shintani::qforms::{classes_for_disc, ProjRat};
use rigid_shintani::shintani::{self, QExpansion};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use workspace::{sha256_hex, write_atomic, Config, Workspace, CONFIG_FILE};

#[derive(Parser)]
#[command(name = "rshintani", version, about = "Exact modular symbols and the rigid Shintani lift")]
struct Cli {
    /// Configuration file (default: ./rshintani.conf).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cache directory (overrides the environment and the config file).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quadratic forms.
    #[command(subcommand)]
    Qf(QfCmd),
    /// Modular symbol spaces.
    #[command(subcommand)]
    Ms(MsCmd),
    /// Rigid cocycles (stored by residue).
    #[command(subcommand)]
    Cocycle(CocycleCmd),
    /// The lift and its checks.
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Independent verifiers.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Subcommand)]
enum QfCmd {
    /// Gamma_0(p)-classes of F_p for all discriminants up to dmax.
    Enum {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        dmax: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct SpaceArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
}

#[derive(Subcommand)]
enum MsCmd {
    /// Dimensions of the space and its subspaces.
    Basis {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A selected symbol as {"p","k","coords"} with its value on {0, oo}.
    Symbol {
        #[command(flatten)]
        space: SpaceArgs,
        /// odd:i, even:i or pnew:i within the cuspidal p-new subspace, or basis:i.
        #[arg(long)]
        select: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact matrix of T_l.
    Hecke {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Selection {
    /// odd:i, even:i or pnew:i within the cuspidal p-new subspace.
    #[arg(long, conflicts_with = "cocycle")]
    select: Option<String>,
    /// CocycleRes JSON file.
    #[arg(long)]
    cocycle: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CocycleCmd {
    /// Builds a CocycleRes from a modular symbol file or a selection.
    New {
        #[command(flatten)]
        space: SpaceArgs,
        /// Modular symbol JSON {"p","k","coords"}.
        #[arg(long, conflicts_with = "select")]
        from_ms: Option<PathBuf>,
        #[arg(long)]
        select: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct LiftArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long)]
    dmax: Option<u64>,
    #[command(flatten)]
    sel: Selection,
}

#[derive(Subcommand)]
enum LiftCmd {
    /// Computes the lift, its even and odd parts and their flags.
    Compute {
        #[command(flatten)]
        args: LiftArgs,
        /// QExpansion JSON output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full JSON report output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// lift(T_l J) against T_{l^2} lift(J).
    CheckHecke {
        #[command(flatten)]
        args: LiftArgs,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vanishing of the lift of the even part.
    CheckEven {
        #[command(flatten)]
        args: LiftArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Brute-force Gamma_0(p)-orbits with certificates.
    Orbits {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long = "D")]
        d: i64,
        /// Coefficient bound (default 4 sqrt(D) p).
        #[arg(long = "H")]
        h: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dimension formula against the computed space.
    Dims {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numeric periods against exact coefficients at one discriminant.
    Periods {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "D")]
        d: u64,
        #[arg(long)]
        prec: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Ctx {
    ws: Workspace,
}

impl Ctx {
    fn p(&self, p: Option<u64>) -> Result<u64> {
        let p = match p {
            Some(p) => p,
            None => self.ws.config.get_u64("p")?.ok_or_else(|| anyhow!("missing --p (or p in {CONFIG_FILE})"))?,
        };
        if !is_prime(p) {
            bail!("p must be prime (got {p})");
        }
        Ok(p)
    }

    fn k(&self, k: Option<u32>, min: u32) -> Result<u32> {
        let k = match k {
            Some(k) => k,
            None => self.ws.config.get_u64("k")?.ok_or_else(|| anyhow!("missing --k (or k in {CONFIG_FILE})"))? as u32,
        };
        if k < min {
            bail!("k must be at least {min} (got {k})");
        }
        Ok(k)
    }

    fn dmax(&self, d: Option<u64>) -> Result<u64> {
        match d {
            Some(d) => Ok(d),
            None => self.ws.config.get_u64("dmax")?.ok_or_else(|| anyhow!("missing --dmax (or dmax in {CONFIG_FILE})")),
        }
    }

    fn space_key(p: u64, k: u32, s: &MSSpace) -> String {
        let primes: Vec<String> = s.cached_hecke().keys().map(|l| l.to_string()).collect();
        format!("space:p={p}:k={k}:hecke={}", primes.join(","))
    }

    /// Builds the space, seeding Hecke matrices from the cache.
    fn space(&self, p: u64, k: u32) -> Result<MSSpace> {
        let s = MSSpace::build(p, k)?;
        let prefix = format!("space:p={p}:k={k}:");
        if let Some(key) = self.ws.keys_with_prefix(&prefix).into_iter().max_by_key(|k| k.len()) {
            if let Some(bytes) = self.ws.get(&key)? {
                json::preload_space(&s, &serde_json::from_slice(&bytes)?)?;
            }
        }
        Ok(s)
    }

    fn store_space(&mut self, s: &MSSpace) -> Result<()> {
        let key = Ctx::space_key(s.p, s.k, s);
        if self.ws.get(&key)?.is_none() {
            self.ws.put(&key, &json::to_bytes(&json::space(s)))?;
        }
        Ok(())
    }
}

fn conventions() -> Value {
    json!({
        "polynomial_action": "h|g = |det g|^(1-k) h(aX+bY, cX+dY)",
        "hecke": "T_l = l^(k-1) sum over (1 a; 0 l), a < l, and (l 0; 0 1)",
        "u_p": "U_p = p^(k-1) sum over (1 j-1; 0 p), j = 1..p; equals -p^(k-1) w_p on p-new symbols",
        "w_p": "w_p = (0 -1; p 0) acting with the |det| normalization",
        "automorph": "gamma_Q = ((t+bu)/2, -au; cu, (t-bu)/2) for primitive [a,b,c], (t,u) minimal positive with t^2 - D u^2 = 4",
        "edge": "value on gamma e0 along {r,s} is mu{gamma^-1 r, gamma^-1 s}|gamma^-1",
        "halfint_hecke": "b(n) = a(l^2 n) + (pn/l) l^(k-1) a(n) + l^(2k-1) a(n/l^2), kept on np = 0,1 mod 4",
    })
}

fn cusp_pnew(s: &MSSpace) -> Vec<Vec<Rat>> {
    intersect(&s.pnew_subspace(), &s.cuspidal_subspace(), s.dim())
}

fn select(s: &MSSpace, sel: &str) -> Result<CocycleRes> {
    let (kind, idx) = sel.split_once(':').ok_or_else(|| anyhow!("selection must look like odd:0"))?;
    let i: usize = idx.parse().map_err(|_| anyhow!("bad selection index {idx:?}"))?;
    let cp = cusp_pnew(s);
    let pool = match kind {
        "odd" => sign_part(s, &cp, -1),
        "even" => sign_part(s, &cp, 1),
        "pnew" => cp,
        "eisenstein" => bail!(
            "refusing {sel}: the lift is defined only for cuspidal cocycles, and an Eisenstein selection violates that hypothesis"
        ),
        _ => bail!("unknown selection kind {kind:?} (use odd, even or pnew)"),
    };
    let v = pool.get(i).ok_or_else(|| anyhow!("{sel}: only {} vectors of that kind", pool.len()))?;
    Ok(from_pnew(s, &s.from_coords(v.clone()))?)
}

fn load_cocycle(s: &MSSpace, sel: &Selection) -> Result<CocycleRes> {
    match (&sel.select, &sel.cocycle) {
        (Some(x), _) => select(s, x),
        (None, Some(path)) => {
            let v: Value = read_json(path)?;
            json::cocycle_from(&v, s)
        }
        (None, None) => bail!("give --select or --cocycle"),
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))
}

/// Writes bytes to `out` (report lines on stdout) or prints them (report lines on stderr).
fn emit(bytes: &[u8], out: Option<&Path>, report: &[String]) -> Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, bytes)?;
            for line in report {
                println!("{line}");
            }
        }
        None => {
            print!("{}", String::from_utf8_lossy(bytes));
            for line in report {
                eprintln!("{line}");
            }
        }
    }
    Ok(())
}

fn qexp_zero_flag(f: &QExpansion) -> bool {
    f.is_zero()
}

fn run(cli: Cli) -> Result<()> {
    let config = Config::load(cli.config.as_deref().unwrap_or(Path::new(CONFIG_FILE)))?;
    let mut ctx = Ctx { ws: Workspace::open(config, cli.cache_dir)? };
    match cli.cmd {
        Cmd::Qf(QfCmd::Enum { p, dmax, out }) => {
            let p = ctx.p(p)?;
            let dmax = ctx.dmax(dmax)?;
            let (bytes, hit) = ctx.ws.cached(&format!("qf:p={p}:dmax={dmax}"), || {
                let cl = shintani::classes(p, dmax);
                Ok(json!({"p": p, "Dmax": dmax, "classes": json::class_list(p, &cl)}))
            })?;
            let v: Value = serde_json::from_slice(&bytes)?;
            let n = v["classes"].as_array().map_or(0, |a| a.len());
            emit(&bytes, out.as_deref(), &[format!("{n} discriminants{}", if hit { " (cached)" } else { "" })])
        }
        Cmd::Ms(MsCmd::Basis { space, out }) => {
            let (p, k) = (ctx.p(space.p)?, ctx.k(space.k, 1)?);
            let s = ctx.space(p, k)?;
            let (bytes, _) = ctx.ws.cached(&format!("ms-basis:p={p}:k={k}"), || {
                Ok(json!({
                    "p": p,
                    "k": k,
                    "dim": s.dim(),
                    "cuspidal": s.cuspidal_subspace().len(),
                    "pnew": s.pnew_subspace().len(),
                    "pnew_cuspidal": cusp_pnew(&s).len(),
                    "even": s.even_subspace().len(),
                    "odd": s.odd_subspace().len(),
                    "conventions": conventions(),
                }))
            })?;
            ctx.store_space(&s)?;
            emit(&bytes, out.as_deref(), &[])
        }
        Cmd::Ms(MsCmd::Symbol { space, select: sel, out }) => {
            let (p, k) = (ctx.p(space.p)?, ctx.k(space.k, 1)?);
            let s = ctx.space(p, k)?;
            let mu = match sel.strip_prefix("basis:") {
                Some(i) => {
                    let i: usize = i.parse().map_err(|_| anyhow!("bad basis index {i:?}"))?;
                    if i >= s.dim() {
                        bail!("basis index {i} out of range (dim {})", s.dim());
                    }
                    s.basis_symbol(i)
                }
                None => select(&s, &sel)?.mu,
            };
            let mut v = json::modsym(&mu);
            v["value_0_inf"] = json::poly(&s.eval(&mu, &ProjRat::int(0), &ProjRat::Inf));
            emit(&json::to_bytes(&v), out.as_deref(), &[format!("p-new: {}", s.is_pnew(&mu))])
        }
        Cmd::Ms(MsCmd::Hecke { space, l, out }) => {
            let (p, k) = (ctx.p(space.p)?, ctx.k(space.k, 1)?);
            let s = ctx.space(p, k)?;
            let (bytes, _) = ctx.ws.cached(&format!("ms-hecke:p={p}:k={k}:l={l}"), || {
                let t = s.hecke_matrix(l)?;
                let w = s.w_inf_matrix();
                Ok(json!({
                    "p": p,
                    "k": k,
                    "l": l,
                    "matrix": json::matrix(&t),
                    "charpoly": json::rats(&charpoly(&t)),
                    "commutes_with_w_inf": t.mul(&w) == w.mul(&t),
                    "conventions": conventions(),
                }))
            })?;
            ctx.store_space(&s)?;
            emit(&bytes, out.as_deref(), &[])
        }
        Cmd::Cocycle(CocycleCmd::New { space, from_ms, select: sel, out }) => {
            let (p, k, mu_json) = match &from_ms {
                Some(path) => {
                    let v = read_json(path)?;
                    let (p, k) = json::read_pk(&v)?;
                    (ctx.p(Some(p))?, k, Some(v))
                }
                None => (ctx.p(space.p)?, ctx.k(space.k, 1)?, None),
            };
            let s = ctx.space(p, k)?;
            let j = match (mu_json, sel) {
                (Some(v), _) => from_pnew(&s, &json::modsym_from(&v, &s)?)?,
                (None, Some(x)) => select(&s, &x)?,
                (None, None) => bail!("give --from-ms or --select"),
            };
            emit(&json::to_bytes(&json::cocycle(&j)), out.as_deref(), &[format!("cuspidal: {}", j.cuspidal)])
        }
        Cmd::Lift(cmd) => lift_cmd(&mut ctx, cmd),
        Cmd::Oracle(cmd) => oracle_cmd(&mut ctx, cmd),
    }
}

struct Prepared {
    s: MSSpace,
    j: CocycleRes,
    dmax: u64,
    key: String,
}

fn prepare(ctx: &Ctx, a: &LiftArgs) -> Result<Prepared> {
    let p = ctx.p(a.space.p)?;
    let k = ctx.k(a.space.k, 2)?;
    let dmax = ctx.dmax(a.dmax)?;
    let s = ctx.space(p, k)?;
    let j = load_cocycle(&s, &a.sel)?;
    if !j.cuspidal {
        bail!("the lift is defined only for cuspidal cocycles; this cocycle has nonzero boundary");
    }
    let digest = sha256_hex(&json::to_bytes(&json::cocycle(&j)));
    Ok(Prepared { key: format!("p={p}:k={k}:dmax={dmax}:cocycle={digest}"), s, j, dmax })
}

fn lift_cmd(ctx: &mut Ctx, cmd: LiftCmd) -> Result<()> {
    match cmd {
        LiftCmd::Compute { args, out, report } => {
            let pr = prepare(ctx, &args)?;
            let (bytes, _) = ctx.ws.cached(&format!("lift:{}", pr.key), || {
                let cl = shintani::classes(pr.s.p, pr.dmax);
                let f = shintani::lift(&pr.s, &pr.j, &cl, pr.dmax)?;
                let (plus, minus) = shintani::lift_pm(&pr.s, &pr.j, &cl, pr.dmax)?;
                Ok(json!({
                    "lift": json::qexpansion(&f),
                    "plus": json::qexpansion(&plus),
                    "minus": json::qexpansion(&minus),
                    "lift_zero": qexp_zero_flag(&f),
                    "plus_zero": plus.is_zero(),
                    "minus_equals_lift": minus == f,
                    "support_ok": f.support_ok(),
                    "cocycle": json::cocycle(&pr.j),
                    "conventions": conventions(),
                }))
            })?;
            let v: Value = serde_json::from_slice(&bytes)?;
            let lines = vec![
                format!("lift zero up to Dmax: {}", v["lift_zero"]),
                format!("plus-lift zero: {}", v["plus_zero"]),
                format!("minus-lift equals lift: {}", v["minus_equals_lift"]),
                format!("support ok: {}", v["support_ok"]),
            ];
            if let Some(r) = report {
                write_atomic(&r, &bytes)?;
            }
            ctx.store_space(&pr.s)?;
            emit(&json::to_bytes(&v["lift"]), out.as_deref(), &lines)
        }
        LiftCmd::CheckHecke { args, l, out } => {
            let pr = prepare(ctx, &args)?;
            let (bytes, _) = ctx.ws.cached(&format!("check-hecke:{}:l={l}", pr.key), || {
                let cl = shintani::classes(pr.s.p, pr.dmax);
                let r = shintani::equivariance_report(&pr.s, &pr.j, l, &cl, pr.dmax)?;
                Ok(json!({
                    "l": l,
                    "nmax": r.nmax,
                    "pass": r.pass,
                    "first_mismatch": r.first_mismatch,
                    "lift_of_hecke": json::qexpansion(&r.lhs),
                    "hecke_of_lift": json::qexpansion(&r.rhs),
                    "conventions": conventions(),
                }))
            })?;
            ctx.store_space(&pr.s)?;
            let v: Value = serde_json::from_slice(&bytes)?;
            let line = format!(
                "T_{{{l}^2}} equivariance: {} (n <= {}){}",
                if v["pass"] == true { "pass" } else { "FAIL" },
                v["nmax"],
                v["first_mismatch"].as_u64().map(|n| format!(", first mismatch at n = {n}")).unwrap_or_default()
            );
            emit(&bytes, out.as_deref(), &[line])
        }
        LiftCmd::CheckEven { args, out } => {
            let pr = prepare(ctx, &args)?;
            let (bytes, _) = ctx.ws.cached(&format!("check-even:{}", pr.key), || {
                let cl = shintani::classes(pr.s.p, pr.dmax);
                let f = shintani::lift(&pr.s, &pr.j, &cl, pr.dmax)?;
                let (plus, minus) = shintani::lift_pm(&pr.s, &pr.j, &cl, pr.dmax)?;
                Ok(json!({"Dmax": pr.dmax, "plus_zero": plus.is_zero(), "minus_equals_lift": minus == f, "plus": json::qexpansion(&plus)}))
            })?;
            let v: Value = serde_json::from_slice(&bytes)?;
            emit(&bytes, out.as_deref(), &[format!("plus-lift zero: {}", v["plus_zero"])])
        }
    }
}

fn oracle_cmd(ctx: &mut Ctx, cmd: OracleCmd) -> Result<()> {
    match cmd {
        OracleCmd::Orbits { p, d, h, out } => {
            let p = ctx.p(p)?;
            let h = h.unwrap_or(((4.0 * (d.max(0) as f64).sqrt() * p as f64).ceil() as i64).max(8));
            let (bytes, _) = ctx.ws.cached(&format!("orbits:p={p}:D={d}:H={h}"), || {
                let part = oracle::orbit_oracle(p, d, h);
                let reps = if d > 0 { classes_for_disc(p, &BigInt::from(d)) } else { Vec::new() };
                let cmp = oracle::compare_with_oracle(p, d, &reps, 0);
                let classes: Vec<Value> = part
                    .classes
                    .iter()
                    .map(|(root, certs)| {
                        json!({
                            "root": json::qform(root),
                            "members": certs.iter().map(|c| json!({"form": json::qform(&c.q2), "gamma": json::gmat(&c.gamma)})).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                Ok(json!({
                    "p": p,
                    "D": d,
                    "H": h,
                    "classes": classes,
                    "certificates_verified": part.certificates_ok(),
                    "enumerated_reps": reps.iter().map(json::qform).collect::<Vec<_>>(),
                    "matches_enumeration": cmp.bijective,
                }))
            })?;
            let v: Value = serde_json::from_slice(&bytes)?;
            let n = v["classes"].as_array().map_or(0, |a| a.len());
            emit(&bytes, out.as_deref(), &[format!("{n} classes, matches enumeration: {}", v["matches_enumeration"])])
        }
        OracleCmd::Dims { space, out } => {
            let (p, k) = (ctx.p(space.p)?, ctx.k(space.k, 2)?);
            let (dim, cusps) = oracle::dim_formula(p, k)?;
            let s = ctx.space(p, k)?;
            let v = json!({
                "p": p,
                "k": k,
                "dim_cusp_forms": dim,
                "cusps": cusps,
                "modsym_dim": s.dim(),
                "modsym_cuspidal": s.cuspidal_subspace().len(),
                "consistent": s.dim() as u64 == 2 * dim + cusps && s.cuspidal_subspace().len() as u64 == 2 * dim,
            });
            emit(&json::to_bytes(&v), out.as_deref(), &[])
        }
        OracleCmd::Periods { space, d, prec, out } => {
            let (p, k) = (ctx.p(space.p)?, ctx.k(space.k, 2)?);
            let prec = match prec {
                Some(x) => x,
                None => ctx.ws.config.get_u64("precision")?.unwrap_or(12) as u32,
            };
            if is_square(&BigInt::from(d)) {
                bail!("D = {d} is a square; periods are computed for non-square discriminants");
            }
            let s = ctx.space(p, k)?;
            let mu = oracle::odd_newform_symbol(&s)
                .ok_or_else(|| anyhow!("the odd cuspidal p-new part is not one-dimensional for (p={p}, k={k})"))?;
            let f = oracle::eigen_data(&s, &mu, 40 * p as usize)?;
            let mut rows = Vec::new();
            for q in classes_for_disc(p, &BigInt::from(d)) {
                let exact = shintani::coefficient_ms(&s, &mu, &q, &ProjRat::Inf)?;
                let z = oracle::period_oracle(&f, &q, prec)?;
                rows.push(json!({"form": json::qform(&q), "exact": rat_to_string(&exact), "period_re": z.re, "period_im": z.im}));
            }
            let v = json!({"p": p, "k": k, "D": d, "precision": prec, "lambda": f.lambda, "classes": rows});
            emit(&json::to_bytes(&v), out.as_deref(), &[])
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
