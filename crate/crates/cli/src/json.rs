//! JSON encodings.  Rationals are "p/q" strings and integers inside
//! matrices and forms are decimal strings.

use anyhow::{anyhow, bail, Context, Result};
use rigid_shintani::arith::{parse_rat, rat_to_string, Rat};
use rigid_shintani::cocycle::CocycleRes;
use rigid_shintani::linalg::Matrix;
use rigid_shintani::modsym::{MSSpace, ModSym};
use rigid_shintani::polyact::{GMat, HomPoly};
use rigid_shintani::qforms::QForm;
use rigid_shintani::shintani::QExpansion;
use serde_json::{json, Map, Value};

pub fn rat(x: &Rat) -> Value {
    Value::String(rat_to_string(x))
}

pub fn rats(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn matrix(m: &Matrix) -> Value {
    Value::Array(m.data.iter().map(|r| rats(r)).collect())
}

pub fn matrix_from(v: &Value) -> Result<Matrix> {
    let rows = v.as_array().ok_or_else(|| anyhow!("matrix must be an array of rows"))?;
    let data = rows.iter().map(rats_from).collect::<Result<Vec<_>>>()?;
    let cols = data.first().map_or(0, |r| r.len());
    if data.iter().any(|r| r.len() != cols) {
        bail!("ragged matrix");
    }
    Ok(Matrix::from_rows(data, cols))
}

pub fn rat_from(v: &Value) -> Result<Rat> {
    let s = v.as_str().ok_or_else(|| anyhow!("rational must be a \"p/q\" string"))?;
    parse_rat(s).ok_or_else(|| anyhow!("bad rational {s:?}"))
}

pub fn rats_from(v: &Value) -> Result<Vec<Rat>> {
    v.as_array().ok_or_else(|| anyhow!("expected an array of rationals"))?.iter().map(rat_from).collect()
}

pub fn poly(h: &HomPoly) -> Value {
    json!({"k": h.k, "coeffs": rats(&h.coeffs)})
}

pub fn gmat(g: &GMat) -> Value {
    json!({"a": g.a.to_string(), "b": g.b.to_string(), "c": g.c.to_string(), "d": g.d.to_string()})
}

pub fn qform(q: &QForm) -> Value {
    json!({"a": q.a.to_string(), "b": q.b.to_string(), "c": q.c.to_string()})
}

pub fn class_list(p: u64, cl: &[(u64, Vec<QForm>)]) -> Value {
    Value::Array(cl.iter().map(|(d, reps)| json!({"p": p, "D": d, "reps": reps.iter().map(qform).collect::<Vec<_>>()})).collect())
}

fn uint(v: &Value, key: &str) -> Result<u64> {
    v.get(key).and_then(Value::as_u64).ok_or_else(|| anyhow!("missing integer field {key:?}"))
}

pub fn modsym(m: &ModSym) -> Value {
    json!({"p": m.p, "k": m.k, "coords": rats(&m.coords)})
}

/// Reads {"p","k","coords"} against a space of matching (p, k).
pub fn modsym_from(v: &Value, space: &MSSpace) -> Result<ModSym> {
    let (p, k) = (uint(v, "p")?, uint(v, "k")?);
    if p != space.p || k != space.k as u64 {
        bail!("symbol is for (p={p}, k={k}) but the space is (p={}, k={})", space.p, space.k);
    }
    let coords = rats_from(v.get("coords").ok_or_else(|| anyhow!("missing \"coords\""))?)?;
    if coords.len() != space.dim() {
        bail!("expected {} coordinates, got {}", space.dim(), coords.len());
    }
    Ok(space.from_coords(coords))
}

pub fn read_pk(v: &Value) -> Result<(u64, u32)> {
    Ok((uint(v, "p")?, uint(v, "k")? as u32))
}

pub fn cocycle(j: &CocycleRes) -> Value {
    json!({"p": j.p, "k": j.k, "coords": rats(&j.mu.coords), "cuspidal": j.cuspidal})
}

pub fn cocycle_from(v: &Value, space: &MSSpace) -> Result<CocycleRes> {
    let mu = modsym_from(v, space)?;
    let stated = v.get("cuspidal").and_then(Value::as_bool);
    let j = rigid_shintani::cocycle::from_pnew(space, &mu).context("cocycle file")?;
    if let Some(c) = stated {
        if c != j.cuspidal {
            bail!("cocycle file claims cuspidal = {c}, recomputed {}", j.cuspidal);
        }
    }
    Ok(j)
}

pub fn qexpansion(f: &QExpansion) -> Value {
    let mut coeffs = Map::new();
    for (n, c) in &f.coeffs {
        coeffs.insert(n.to_string(), rat(c));
    }
    json!({
        "p": f.p,
        "k": f.k,
        "weight_num": 2 * f.k + 1,
        "weight_den": 2,
        "level": 4 * f.p,
        "chi": {"p": f.p, "k": f.k},
        "Dmax": f.dmax,
        "coeffs": coeffs,
    })
}

pub fn space(s: &MSSpace) -> Value {
    let hecke: Map<String, Value> = s.cached_hecke().iter().map(|(l, m)| (l.to_string(), matrix(m))).collect();
    let gens: Vec<Value> = (0..=s.p).flat_map(|x| (0..2 * s.k - 1).map(move |i| json!([x, i]))).collect();
    json!({
        "p": s.p,
        "k": s.k,
        "generators": gens,
        "relations": matrix(&s.relations),
        "basis": s.basis.iter().map(|b| rats(b)).collect::<Vec<_>>(),
        "cuspidal": s.cuspidal_subspace().iter().map(|b| rats(b)).collect::<Vec<_>>(),
        "pnew": s.pnew_subspace().iter().map(|b| rats(b)).collect::<Vec<_>>(),
        "even": s.even_subspace().iter().map(|b| rats(b)).collect::<Vec<_>>(),
        "odd": s.odd_subspace().iter().map(|b| rats(b)).collect::<Vec<_>>(),
        "hecke": hecke,
    })
}

/// Seeds a freshly built space with the Hecke matrices of a cached copy.
pub fn preload_space(s: &MSSpace, v: &Value) -> Result<()> {
    let basis: Vec<Vec<Rat>> = v["basis"].as_array().ok_or_else(|| anyhow!("cached space lacks basis"))?.iter().map(rats_from).collect::<Result<_>>()?;
    if basis != s.basis {
        bail!("cached space basis differs from the rebuilt one");
    }
    if let Some(h) = v["hecke"].as_object() {
        for (l, m) in h {
            s.preload_hecke(l.parse()?, matrix_from(m)?)?;
        }
    }
    Ok(())
}

/// Deterministic pretty encoding with a trailing newline.
pub fn to_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}
