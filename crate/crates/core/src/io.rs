//! File formats: coefficient JSON, grid CSV, and deterministic report output.
//!
//! Every floating-point number is written with 17 significant digits so that
//! it parses back to the same `f64`.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::clifford::{Blade, CliffordElement};
use crate::error::{Error, Result};
use crate::spectral::{generators_for_dim, FrequencyIndex, GridField, SpectralField};

/// Version tag written into every report and table.
pub const SCHEMA_VERSION: u32 = 1;

/// `x` with 17 significant digits in scientific notation; `-0` prints as `0`.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        format!("{:.16e}", 0.0)
    } else if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// JSON number with 17 significant digits; non-finite values become `null`.
pub fn json17(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt17(x).parse::<Number>().expect("formatted float is valid JSON"))
    } else {
        Value::Null
    }
}

/// Rewrites every floating-point number in `v` with 17 significant digits.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => json17(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

/// Pretty JSON of `value` with canonical floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = canonicalize(serde_json::to_value(value)?);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// Wraps a serializable payload as `{ "schema_version": 1, "kind": …, … }`.
pub fn report_json<T: Serialize>(kind: &str, value: &T) -> Result<String> {
    let mut obj = Map::new();
    obj.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    obj.insert("kind".into(), Value::from(kind));
    match serde_json::to_value(value)? {
        Value::Object(o) => obj.extend(o),
        other => {
            obj.insert("data".into(), other);
        }
    }
    to_json_string(&Value::Object(obj))
}

/// Coefficient-file value: `{ dim, band, entries: [{ m, alpha, re, im }] }`.
pub fn spectral_to_json(f: &SpectralField) -> Value {
    let mut entries = Vec::new();
    for (m, c) in f.iter() {
        for (blade, z) in c.terms() {
            let mut e = Map::new();
            e.insert("m".into(), Value::from(m.as_slice().to_vec()));
            e.insert("alpha".into(), Value::from(blade.indices()));
            e.insert("re".into(), json17(z.re));
            e.insert("im".into(), json17(z.im));
            entries.push(Value::Object(e));
        }
    }
    let mut obj = Map::new();
    obj.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    obj.insert("dim".into(), Value::from(f.dim()));
    obj.insert("band".into(), Value::from(f.band()));
    obj.insert("entries".into(), Value::Array(entries));
    Value::Object(obj)
}

pub fn write_spectral_json(f: &SpectralField, mut out: impl Write) -> Result<()> {
    out.write_all((serde_json::to_string_pretty(&spectral_to_json(f))? + "\n").as_bytes())?;
    Ok(())
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| parse_err(format!("`{what}` must be a nonnegative integer")))
}

fn as_f64(v: Option<&Value>, what: &str) -> Result<f64> {
    match v {
        None => Ok(0.0),
        Some(x) => x
            .as_f64()
            .ok_or_else(|| parse_err(format!("`{what}` must be a number"))),
    }
}

/// Parses a coefficient-file value. Repeated `(m, alpha)` pairs are summed.
pub fn spectral_from_json(v: &Value) -> Result<SpectralField> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err("coefficient file must be an object"))?;
    let dim = as_usize(obj.get("dim").ok_or_else(|| parse_err("missing `dim`"))?, "dim")?;
    let band = as_usize(
        obj.get("band").ok_or_else(|| parse_err("missing `band`"))?,
        "band",
    )?;
    let mut f = SpectralField::zeros(dim, band)?;
    let gens = generators_for_dim(dim);
    let entries = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("missing `entries` array"))?;
    for e in entries {
        let m: Vec<i64> = e
            .get("m")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("entry without `m`"))?
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| parse_err("`m` must hold integers")))
            .collect::<Result<_>>()?;
        let alpha: Vec<usize> = match e.get("alpha") {
            None => Vec::new(),
            Some(a) => a
                .as_array()
                .ok_or_else(|| parse_err("`alpha` must be an array"))?
                .iter()
                .map(|x| as_usize(x, "alpha"))
                .collect::<Result<_>>()?,
        };
        let z = Complex64::new(as_f64(e.get("re"), "re")?, as_f64(e.get("im"), "im")?);
        let blade = Blade::from_indices(&alpha, gens)?;
        let m = FrequencyIndex::new(m);
        let add = CliffordElement::basis(gens, blade, z)?;
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: m.dim(),
            });
        }
        let current = f.coefficient(&m);
        f.insert(m, &current + &add)?;
    }
    Ok(f)
}

pub fn read_spectral_json(mut input: impl Read) -> Result<SpectralField> {
    let mut s = String::new();
    input.read_to_string(&mut s)?;
    let v: Value = serde_json::from_str(&s)?;
    spectral_from_json(&v)
}

/// Writes a grid as CSV: a `# schema_version` comment, a header
/// `k1,…,kn,re_e,im_e,re_e1,…`, and one row per grid point in row-major order.
pub fn write_grid_csv(g: &GridField, out: impl Write) -> Result<()> {
    let mut out = out;
    writeln!(
        out,
        "# fracbb grid schema_version={SCHEMA_VERSION} dim={} points={}",
        g.dim(),
        g.points()
    )?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=g.dim()).map(|a| format!("k{a}")).collect();
    for b in 0..g.planes().len() {
        let label = Blade(b as u16).label();
        header.push(format!("re_{label}"));
        header.push(format!("im_{label}"));
    }
    w.write_record(&header)?;
    for k in 0..g.len() {
        let mut row: Vec<String> = g.coords(k).iter().map(|c| c.to_string()).collect();
        for p in g.planes() {
            row.push(fmt17(p[k].re));
            row.push(fmt17(p[k].im));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a grid written by [`write_grid_csv`]. Rows may appear in any order;
/// omitted Clifford components are zero.
pub fn read_grid_csv(input: impl Read) -> Result<GridField> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = r.headers()?.clone();
    let dim = header.iter().take_while(|h| h.starts_with('k')).count();
    if dim == 0 {
        return Err(parse_err("grid header must start with index columns k1..kn"));
    }
    let gens = generators_for_dim(dim);
    let mut columns = Vec::new();
    for name in header.iter().skip(dim) {
        let (part, label) = name
            .split_once('_')
            .ok_or_else(|| parse_err(format!("bad column `{name}`")))?;
        let digits = label
            .strip_prefix('e')
            .ok_or_else(|| parse_err(format!("bad component label `{label}`")))?;
        let idx: Vec<usize> = digits
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| parse_err(format!("bad label `{label}`")))
            })
            .collect::<Result<_>>()?;
        let blade = Blade::from_indices(&idx, gens)?;
        columns.push((part == "im", blade));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let k: Vec<usize> = rec
            .iter()
            .take(dim)
            .map(|x| {
                x.parse::<usize>()
                    .map_err(|_| parse_err(format!("bad index `{x}`")))
            })
            .collect::<Result<_>>()?;
        let vals: Vec<f64> = rec
            .iter()
            .skip(dim)
            .map(|x| {
                x.parse::<f64>()
                    .map_err(|_| parse_err(format!("bad value `{x}`")))
            })
            .collect::<Result<_>>()?;
        rows.push((k, vals));
    }
    let points = (rows.len() as f64).powf(1.0 / dim as f64).round() as usize;
    if points == 0 || points.pow(dim as u32) != rows.len() {
        return Err(parse_err(format!(
            "{} rows do not form a {dim}-dimensional grid",
            rows.len()
        )));
    }
    let mut g = GridField::zeros(dim, points)?;
    for (k, vals) in rows {
        if k.iter().any(|&c| c >= points) {
            return Err(parse_err(format!("grid index {k:?} out of range")));
        }
        let flat = k.iter().fold(0, |acc, &c| acc * points + c);
        for (&(imag, blade), v) in columns.iter().zip(vals) {
            let z = &mut g.planes_mut()[blade.0 as usize][flat];
            if imag {
                z.im = v;
            } else {
                z.re = v;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
        assert_eq!(json17(f64::NAN), Value::Null);
    }

    #[test]
    fn spectral_json_round_trip() {
        let mut f = SpectralField::zeros(2, 3).unwrap();
        let mut x = CliffordElement::zero(2).unwrap();
        x.set(Blade(0), Complex64::new(0.1, -1.0 / 3.0));
        x.set(Blade(3), Complex64::new(2.0, 0.0));
        f.insert(FrequencyIndex::new(vec![-1, 3]), x).unwrap();
        let mut buf = Vec::new();
        write_spectral_json(&f, &mut buf).unwrap();
        let back = read_spectral_json(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn spectral_json_errors() {
        let bad = r#"{"dim": 1, "band": 2, "entries": [{"m": [3], "alpha": [], "re": 1}]}"#;
        assert!(matches!(
            read_spectral_json(bad.as_bytes()),
            Err(Error::OutOfBand { .. })
        ));
        let bad = r#"{"dim": 2, "band": 2, "entries": [{"m": [1, 0], "alpha": [2, 1], "re": 1}]}"#;
        assert!(matches!(
            read_spectral_json(bad.as_bytes()),
            Err(Error::InvalidBlade(_))
        ));
        assert!(read_spectral_json("[1,2]".as_bytes()).is_err());
    }

    #[test]
    fn grid_csv_round_trip() {
        let g = GridField::from_fn(2, 3, |x| {
            let mut c = CliffordElement::zero(2).unwrap();
            c.set(Blade(0), Complex64::new(x[0].sin(), x[1]));
            c.set(Blade(2), Complex64::new(0.25, -x[0]));
            c
        })
        .unwrap();
        let mut buf = Vec::new();
        write_grid_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# fracbb grid schema_version=1"));
        assert!(text.lines().nth(1).unwrap().starts_with("k1,k2,re_e,im_e,re_e1"));
        assert_eq!(read_grid_csv(buf.as_slice()).unwrap(), g);
    }
}
