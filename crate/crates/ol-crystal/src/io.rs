//! JSON encoding of field data, polygons, crystals with filtrations, and truncated data.
//!
//! Integers above `2^53 - 1` are written as decimal strings; readers accept either form.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::arith::{BaseFieldDatum, Elem, Fq, FqElem, LocalFieldDatum, Ring};
use crate::bt1::{AMat, ArtinAlgebra, Bt1Crystal, RElem, Vector};
use crate::crystal::{OLCrystal, PRDatum, PRFiltration};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::polygon::Polygon;

const SAFE_MAX: u128 = (1u128 << 53) - 1;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// An unsigned integer, as a number when exactly representable in a double.
pub fn uint_json(v: u128) -> Value {
    if v <= SAFE_MAX {
        json!(v as u64)
    } else {
        Value::String(v.to_string())
    }
}

/// A signed integer, as a number when exactly representable in a double.
pub fn int_json(v: i128) -> Value {
    if v.unsigned_abs() <= SAFE_MAX {
        json!(v as i64)
    } else {
        Value::String(v.to_string())
    }
}

pub fn parse_uint(v: &Value, what: &str) -> Result<u128> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(|x| x as u128)
            .ok_or_else(|| perr(format!("{what}: expected a non-negative integer, got {n}"))),
        Value::String(s) => s
            .parse::<u128>()
            .map_err(|_| perr(format!("{what}: expected a non-negative integer, got \"{s}\""))),
        other => Err(perr(format!("{what}: expected an integer, got {other}"))),
    }
}

pub fn parse_int(v: &Value, what: &str) -> Result<i128> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|x| x as i128)
            .ok_or_else(|| perr(format!("{what}: expected an integer, got {n}"))),
        Value::String(s) => s
            .parse::<i128>()
            .map_err(|_| perr(format!("{what}: expected an integer, got \"{s}\""))),
        other => Err(perr(format!("{what}: expected an integer, got {other}"))),
    }
}

fn parse_usize(v: &Value, what: &str) -> Result<usize> {
    let x = parse_uint(v, what)?;
    usize::try_from(x).map_err(|_| perr(format!("{what}: value {x} is too large")))
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(format!("{what}: expected an array")))
}

/// Reads an object keyed `tau_0, tau_1, ...` into a list of length `f`.
fn per_tau<'a>(v: &'a Value, f: usize, what: &str) -> Result<Vec<&'a Value>> {
    let obj = v.as_object().ok_or_else(|| perr(format!("{what}: expected an object keyed by tau_k")))?;
    if obj.len() != f {
        return Err(perr(format!("{what}: expected {f} embeddings, got {}", obj.len())));
    }
    (0..f)
        .map(|t| obj.get(&format!("tau_{t}")).ok_or_else(|| perr(format!("{what}: missing \"tau_{t}\""))))
        .collect()
}

fn tau_object(items: impl IntoIterator<Item = Value>) -> Value {
    let mut m = Map::new();
    for (t, v) in items.into_iter().enumerate() {
        m.insert(format!("tau_{t}"), v);
    }
    Value::Object(m)
}

// ---- field data -------------------------------------------------------------------

pub fn local_field_to_json(l: &LocalFieldDatum) -> Value {
    json!({
        "p": l.p,
        "f": l.f,
        "e": l.e,
        "eisenstein": l.eisenstein.iter().map(|c| c.iter().map(|x| int_json(*x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn base_field_to_json(p: u64, b: &BaseFieldDatum) -> Value {
    json!({
        "p": p,
        "n": b.n,
        "field_modulus": b.field_modulus,
        "precision": b.precision,
    })
}

/// The combined object `{p, f, e, eisenstein, n, field_modulus, precision}`.
pub fn field_data_to_json(l: &LocalFieldDatum, b: &BaseFieldDatum) -> Value {
    let mut v = local_field_to_json(l);
    let extra = base_field_to_json(l.p, b);
    for (k, x) in extra.as_object().expect("object") {
        v[k] = x.clone();
    }
    v
}

pub fn parse_local_field(v: &Value) -> Result<LocalFieldDatum> {
    let p = parse_uint(field(v, "p")?, "p")? as u64;
    let f = parse_usize(field(v, "f")?, "f")?;
    let e = parse_usize(field(v, "e")?, "e")?;
    match v.get("eisenstein") {
        None => Ok(LocalFieldDatum::new(p, f, e)),
        Some(es) => {
            let coeffs = array(es, "eisenstein")?
                .iter()
                .map(|c| {
                    array(c, "eisenstein coefficient")?
                        .iter()
                        .map(|x| parse_int(x, "eisenstein coefficient"))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(LocalFieldDatum::with_eisenstein(p, f, e, coeffs))
        }
    }
}

/// Reads `{n, field_modulus?, precision?}`; missing entries take their defaults.
pub fn parse_base_field(v: &Value, p: u64, h: usize, e: usize) -> Result<BaseFieldDatum> {
    let n = parse_usize(field(v, "n")?, "n")?;
    let field_modulus = match v.get("field_modulus") {
        None => Fq::default_modulus(p, n),
        Some(m) => array(m, "field_modulus")?
            .iter()
            .map(|x| parse_uint(x, "field_modulus").map(|y| y as u64))
            .collect::<Result<Vec<_>>>()?,
    };
    let precision = match v.get("precision") {
        None => crate::crystal::default_precision(p, n, h, e),
        Some(x) => parse_uint(x, "precision")? as u32,
    };
    Ok(BaseFieldDatum {
        n,
        field_modulus,
        precision,
    })
}

// ---- polygons ---------------------------------------------------------------------

fn rational_pair(q: &BigRational) -> Value {
    json!([q.numer().to_string(), q.denom().to_string()])
}

pub fn polygon_to_json(p: &Polygon) -> Value {
    json!({
        "width": p.width(),
        "slopes": p.slopes().iter().map(rational_pair).collect::<Vec<_>>(),
    })
}

fn parse_bigint(v: &Value, what: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| perr(format!("{what}: expected an integer"))),
        Value::String(s) => s.parse::<BigInt>().map_err(|_| perr(format!("{what}: bad integer \"{s}\""))),
        _ => Err(perr(format!("{what}: expected an integer"))),
    }
}

pub fn parse_polygon(v: &Value) -> Result<Polygon> {
    let width = parse_usize(field(v, "width")?, "width")?;
    let slopes = array(field(v, "slopes")?, "slopes")?
        .iter()
        .map(|pair| {
            let pair = array(pair, "slope")?;
            if pair.len() != 2 {
                return Err(perr("slope: expected [num, den]"));
            }
            let den = parse_bigint(&pair[1], "slope denominator")?;
            if den == BigInt::from(0) {
                return Err(perr("slope: zero denominator"));
            }
            Ok(BigRational::new(parse_bigint(&pair[0], "slope numerator")?, den))
        })
        .collect::<Result<Vec<_>>>()?;
    if slopes.len() != width {
        return Err(perr(format!("polygon of width {width} has {} slopes", slopes.len())));
    }
    Ok(Polygon::from_slopes(slopes))
}

// ---- crystals ---------------------------------------------------------------------

/// An element as its `e x n` coordinate table, wrapped with its precision when that is
/// below the working cap.
pub fn elem_to_json(r: &Ring, x: &Elem) -> Value {
    let table: Vec<Vec<Value>> = r
        .to_coords(x)
        .iter()
        .map(|row| row.iter().map(|v| uint_json(*v)).collect())
        .collect();
    if x.precision() >= r.cap() {
        json!(table)
    } else {
        json!({ "prec": x.precision(), "c": table })
    }
}

/// Accepts the coordinate table, the `{"prec", "c"}` form, or a plain (possibly negative)
/// integer standing for its image in the ring.
pub fn parse_elem(r: &Ring, v: &Value, tau: usize) -> Result<Elem> {
    if v.is_number() || v.is_string() {
        return Ok(r.from_int(parse_int(v, "element")?, tau));
    }
    let (table, prec) = match v {
        Value::Object(_) => (field(v, "c")?, Some(parse_uint(field(v, "prec")?, "prec")? as u32)),
        _ => (v, None),
    };
    let rows = array(table, "element")?;
    if rows.len() != r.e() {
        return Err(perr(format!("element: expected {} rows (powers of pi), got {}", r.e(), rows.len())));
    }
    let mut c = Vec::with_capacity(r.e() * r.n());
    for row in rows {
        let row = array(row, "element row")?;
        if row.len() != r.n() {
            return Err(perr(format!("element: expected {} columns, got {}", r.n(), row.len())));
        }
        for x in row {
            let x = parse_uint(x, "element coordinate")?;
            if x >= r.modulus() {
                return Err(perr(format!("element coordinate {x} is not reduced modulo p^N")));
            }
            c.push(x);
        }
    }
    let z = r.from_raw(c, tau);
    Ok(match prec {
        Some(k) => r.truncate(&z, k),
        None => z,
    })
}

pub fn mat_to_json(r: &Ring, m: &Mat) -> Value {
    json!((0..m.rows)
        .map(|i| (0..m.cols).map(|j| elem_to_json(r, m.get(i, j))).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

/// A matrix given as a list of `rows` rows.
pub fn parse_mat(r: &Ring, v: &Value, rows: usize, tau: usize) -> Result<Mat> {
    let rs = array(v, "matrix")?;
    if rs.len() != rows {
        return Err(perr(format!("matrix: expected {rows} rows, got {}", rs.len())));
    }
    let cols = match rs.first() {
        Some(row) => array(row, "matrix row")?.len(),
        None => 0,
    };
    let mut data = Vec::with_capacity(rows * cols);
    for row in rs {
        let row = array(row, "matrix row")?;
        if row.len() != cols {
            return Err(perr("matrix: rows of different lengths"));
        }
        for x in row {
            data.push(parse_elem(r, x, tau)?);
        }
    }
    Ok(Mat {
        rows,
        cols,
        tau: tau % r.f(),
        data,
    })
}

pub fn datum_to_json(mu: &PRDatum) -> Value {
    tau_object(mu.levels().iter().map(|l| json!(l)))
}

pub fn parse_datum(v: &Value, h: usize, f: usize) -> Result<PRDatum> {
    let levels = per_tau(v, f, "mu")?
        .into_iter()
        .map(|l| {
            array(l, "mu")?
                .iter()
                .map(|x| parse_usize(x, "mu entry"))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PRDatum::new(h, levels)
}

/// A crystal file: the crystal, and optionally a filtration and a datum.
#[derive(Debug, Clone)]
pub struct CrystalFile {
    pub crystal: OLCrystal,
    pub fil: Option<PRFiltration>,
    pub mu: Option<PRDatum>,
}

pub fn crystal_to_json(c: &OLCrystal, fil: Option<&PRFiltration>, mu: Option<&PRDatum>) -> Value {
    let r = &c.ring;
    let mut v = json!({
        "datum": local_field_to_json(r.local()),
        "base": base_field_to_json(r.p(), r.base()),
        "h": c.h,
        "Y": tau_object(c.y.iter().map(|m| mat_to_json(r, m))),
    });
    if let Some(fil) = fil {
        v["fil"] = tau_object(
            fil.levels
                .iter()
                .map(|levels| json!(levels.iter().map(|m| mat_to_json(r, m)).collect::<Vec<_>>())),
        );
    }
    if let Some(mu) = mu {
        v["mu"] = datum_to_json(mu);
    }
    v
}

/// Builds the ring of a crystal file, optionally overriding the precision.
pub fn parse_ring(v: &Value, precision: Option<u32>) -> Result<Arc<Ring>> {
    let local = parse_local_field(field(v, "datum")?)?;
    let h = parse_usize(field(v, "h")?, "h")?;
    let mut base = parse_base_field(field(v, "base")?, local.p, h, local.e)?;
    if let Some(p) = v["base"].get("p") {
        if parse_uint(p, "base.p")? as u64 != local.p {
            return Err(perr("base.p differs from datum.p"));
        }
    }
    if let Some(prec) = precision {
        base.precision = prec;
    }
    Ring::new(&local, &base)
}

pub fn parse_crystal(v: &Value, precision: Option<u32>) -> Result<CrystalFile> {
    let h = parse_usize(field(v, "h")?, "h")?;
    let stored = parse_ring(v, None)?;
    let f = stored.f();
    let y = per_tau(field(v, "Y")?, f, "Y")?
        .into_iter()
        .enumerate()
        .map(|(t, m)| parse_mat(&stored, m, h, t))
        .collect::<Result<Vec<_>>>()?;
    let fil = match v.get("fil") {
        None => None,
        Some(fv) => Some(PRFiltration {
            levels: per_tau(fv, f, "fil")?
                .into_iter()
                .enumerate()
                .map(|(t, ls)| {
                    array(ls, "fil levels")?
                        .iter()
                        .map(|m| parse_mat(&stored, m, h, t))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        }),
    };
    let mu = match v.get("mu") {
        None => None,
        Some(m) => Some(parse_datum(m, h, f)?),
    };
    let crystal = OLCrystal::new(stored.clone(), h, y)?;
    match precision {
        Some(p) if p != stored.cap() => {
            let c = crystal.with_precision(p)?;
            let fil = fil.map(|fl| fl.embed(&c.ring, &stored));
            Ok(CrystalFile { crystal: c, fil, mu })
        }
        _ => Ok(CrystalFile { crystal, fil, mu }),
    }
}

pub fn parse_crystal_str(s: &str, precision: Option<u32>) -> Result<CrystalFile> {
    let v: Value = serde_json::from_str(s).map_err(|e| perr(e.to_string()))?;
    parse_crystal(&v, precision)
}

// ---- truncated data ---------------------------------------------------------------

fn fq_to_json(fq: &Fq, x: FqElem) -> Value {
    json!(fq.digits(x))
}

fn parse_fq(fq: &Fq, v: &Value) -> Result<FqElem> {
    let digits = array(v, "field element")?
        .iter()
        .map(|x| parse_uint(x, "field digit").map(|d| d as u64))
        .collect::<Result<Vec<_>>>()?;
    if digits.len() != fq.degree() || digits.iter().any(|d| *d >= fq.characteristic()) {
        return Err(perr(format!("field element {digits:?} is not a list of {} digits mod p", fq.degree())));
    }
    Ok(fq.from_digits(&digits))
}

fn relem_to_json(alg: &ArtinAlgebra, x: &RElem) -> Value {
    json!(x.iter().map(|c| fq_to_json(alg.fq(), *c)).collect::<Vec<_>>())
}

fn parse_relem(alg: &ArtinAlgebra, v: &Value) -> Result<RElem> {
    let xs = array(v, "algebra element")?;
    if xs.len() != alg.dim() {
        return Err(perr(format!("algebra element: expected {} coordinates", alg.dim())));
    }
    xs.iter().map(|x| parse_fq(alg.fq(), x)).collect()
}

pub fn algebra_to_json(alg: &ArtinAlgebra) -> Value {
    json!({
        "p": alg.fq().characteristic(),
        "field_modulus": alg.fq().modulus(),
        "basis": alg.names(),
        "mul_table": alg
            .mul_table()
            .iter()
            .map(|row| row.iter().map(|x| relem_to_json(alg, x)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub fn parse_algebra(v: &Value) -> Result<ArtinAlgebra> {
    let p = parse_uint(field(v, "p")?, "ring.p")? as u64;
    let modulus = array(field(v, "field_modulus")?, "ring.field_modulus")?
        .iter()
        .map(|x| parse_uint(x, "ring.field_modulus").map(|y| y as u64))
        .collect::<Result<Vec<_>>>()?;
    let fq = Fq::new(p, &modulus)?;
    let names = array(field(v, "basis")?, "ring.basis")?
        .iter()
        .map(|x| x.as_str().map(String::from).ok_or_else(|| perr("ring.basis: expected names")))
        .collect::<Result<Vec<_>>>()?;
    let m = names.len();
    let shell = ArtinAlgebra::field(fq.clone());
    let table = array(field(v, "mul_table")?, "ring.mul_table")?
        .iter()
        .map(|row| {
            array(row, "ring.mul_table row")?
                .iter()
                .map(|x| {
                    let xs = array(x, "ring.mul_table entry")?;
                    if xs.len() != m {
                        return Err(perr("ring.mul_table entry has the wrong length"));
                    }
                    xs.iter().map(|c| parse_fq(shell.fq(), c)).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ArtinAlgebra::new(fq, names, table)
}

fn aelem_to_json(b: &Bt1Crystal, x: &[FqElem]) -> Value {
    let m = b.m();
    json!((0..b.e).map(|a| relem_to_json(&b.algebra, &x[a * m..(a + 1) * m].to_vec())).collect::<Vec<_>>())
}

fn parse_aelem(alg: &ArtinAlgebra, e: usize, v: &Value) -> Result<Vec<FqElem>> {
    let xs = array(v, "truncated element")?;
    if xs.len() != e {
        return Err(perr(format!("truncated element: expected {e} coefficients")));
    }
    let mut out = Vec::new();
    for x in xs {
        out.extend(parse_relem(alg, x)?);
    }
    Ok(out)
}

fn amat_to_json(b: &Bt1Crystal, m: &AMat) -> Value {
    json!((0..m.rows)
        .map(|i| (0..m.cols).map(|j| aelem_to_json(b, m.get(i, j))).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn parse_amat(alg: &ArtinAlgebra, e: usize, h: usize, v: &Value) -> Result<AMat> {
    let rows = array(v, "matrix")?;
    if rows.len() != h {
        return Err(perr(format!("matrix: expected {h} rows")));
    }
    let mut data = Vec::with_capacity(h * h);
    for row in rows {
        let row = array(row, "matrix row")?;
        if row.len() != h {
            return Err(perr(format!("matrix: expected {h} columns")));
        }
        for x in row {
            data.push(parse_aelem(alg, e, x)?);
        }
    }
    Ok(AMat { rows: h, cols: h, data })
}

fn vector_to_json(b: &Bt1Crystal, v: &Vector) -> Value {
    let step = b.e * b.m();
    json!((0..b.h).map(|row| aelem_to_json(b, &v[row * step..(row + 1) * step])).collect::<Vec<_>>())
}

fn parse_vector(alg: &ArtinAlgebra, e: usize, h: usize, v: &Value) -> Result<Vector> {
    let rows = array(v, "vector")?;
    if rows.len() != h {
        return Err(perr(format!("vector: expected {h} coordinates")));
    }
    let mut out = Vec::new();
    for x in rows {
        out.extend(parse_aelem(alg, e, x)?);
    }
    Ok(out)
}

/// Explicit encoding: ring, units, `F`, `V` and generators of every filtration level.
pub fn bt1_to_json(b: &Bt1Crystal, mu: Option<&PRDatum>) -> Value {
    let fq = b.algebra.fq();
    let mut v = json!({
        "ring": algebra_to_json(&b.algebra),
        "e": b.e,
        "h": b.h,
        "units": b.units.iter().map(|u| fq_to_json(fq, *u)).collect::<Vec<_>>(),
        "F": tau_object(b.frob.iter().map(|m| amat_to_json(b, m))),
        "V": tau_object(b.ver.iter().map(|m| amat_to_json(b, m))),
        "omega": tau_object(b.omega.iter().map(|levels| {
            json!(levels
                .iter()
                .map(|gens| gens.iter().map(|g| vector_to_json(b, g)).collect::<Vec<_>>())
                .collect::<Vec<_>>())
        })),
    });
    if let Some(mu) = mu {
        v["mu"] = datum_to_json(mu);
    }
    v
}

/// Reads truncated data, either in the explicit encoding or as a crystal file with a
/// `ring` entry (reduced modulo `p` and base changed to the ring).
pub fn parse_bt1(v: &Value) -> Result<(Bt1Crystal, Option<PRDatum>)> {
    let algebra = parse_algebra(field(v, "ring")?)?;
    if v.get("Y").is_some() {
        let file = parse_crystal(v, None)?;
        let fil = file
            .fil
            .ok_or_else(|| perr("a crystal file used as truncated data needs \"fil\""))?;
        let base = Bt1Crystal::from_crystal(&file.crystal, &fil)?;
        if base.algebra.fq() != algebra.fq() {
            return Err(perr("ring residue field differs from the crystal's residue field"));
        }
        return Ok((base.base_change(&algebra)?, file.mu));
    }
    let e = parse_usize(field(v, "e")?, "e")?;
    let h = parse_usize(field(v, "h")?, "h")?;
    let units = array(field(v, "units")?, "units")?
        .iter()
        .map(|u| parse_fq(algebra.fq(), u))
        .collect::<Result<Vec<_>>>()?;
    let f = units.len();
    if f == 0 || e == 0 {
        return Err(perr("truncated data needs e >= 1 and at least one unit"));
    }
    let frob = per_tau(field(v, "F")?, f, "F")?
        .into_iter()
        .map(|m| parse_amat(&algebra, e, h, m))
        .collect::<Result<Vec<_>>>()?;
    let ver = per_tau(field(v, "V")?, f, "V")?
        .into_iter()
        .map(|m| parse_amat(&algebra, e, h, m))
        .collect::<Result<Vec<_>>>()?;
    let omega = per_tau(field(v, "omega")?, f, "omega")?
        .into_iter()
        .map(|levels| {
            let levels = array(levels, "omega levels")?;
            if levels.len() != e + 1 {
                return Err(perr(format!("omega: expected {} levels", e + 1)));
            }
            levels
                .iter()
                .map(|gens| {
                    array(gens, "omega generators")?
                        .iter()
                        .map(|g| parse_vector(&algebra, e, h, g))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mu = match v.get("mu") {
        None => None,
        Some(m) => Some(parse_datum(m, h, f)?),
    };
    Ok((
        Bt1Crystal {
            algebra,
            e,
            h,
            units,
            frob,
            ver,
            omega,
        },
        mu,
    ))
}

const INLINE_WIDTH: usize = 72;

fn inline(v: &Value) -> String {
    match v {
        Value::Array(xs) => format!("[{}]", xs.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Value::Object(m) => format!(
            "{{{}}}",
            m.iter()
                .map(|(k, x)| format!("{}: {}", serde_json::to_string(k).expect("serializable"), inline(x)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        _ => serde_json::to_string(v).expect("serializable"),
    }
}

fn write_pretty(v: &Value, indent: usize, out: &mut String) {
    let compact = inline(v);
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Array(xs) if compact.len() + 2 * indent > INLINE_WIDTH && !xs.is_empty() => {
            out.push_str("[\n");
            for (k, x) in xs.iter().enumerate() {
                out.push_str(&pad);
                write_pretty(x, indent + 1, out);
                out.push_str(if k + 1 < xs.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(m) if !m.is_empty() => {
            out.push_str("{\n");
            for (k, (key, x)) in m.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&serde_json::to_string(key).expect("serializable"));
                out.push_str(": ");
                write_pretty(x, indent + 1, out);
                out.push_str(if k + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
        _ => out.push_str(&compact),
    }
}

/// Indented JSON in which short arrays stay on one line, with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = String::new();
    write_pretty(v, 0, &mut s);
    s.push('\n');
    s
}
