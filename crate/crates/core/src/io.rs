//! JSON system-definition files.
//!
//! ```json
//! {
//!   "n": 1,
//!   "interval": [0, 1],
//!   "field": "real",
//!   "P1": [[1]],
//!   "P0": {"kind": "constant", "value": [[0]]},
//!   "H": {"kind": "grid", "xs": [0, 1], "values": [[[1]], [[2]]]},
//!   "WB": [[1, 0]],
//!   "WC": [[0, 1]]
//! }
//! ```
//!
//! Matrices are row-major nested arrays; a complex entry is written `[re, im]`.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::system::{Field, HyperbolicSystem, SpatialMatrixFunction};

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

type RawMatrix = Vec<Vec<Entry>>;

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawSpatial {
    Constant { value: RawMatrix },
    Grid { xs: Vec<f64>, values: Vec<RawMatrix> },
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawField {
    Real,
    Complex,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    n: usize,
    interval: [f64; 2],
    #[serde(default = "default_field")]
    field: RawField,
    #[serde(rename = "P1")]
    p1: RawMatrix,
    #[serde(rename = "P0")]
    p0: Option<RawSpatial>,
    #[serde(rename = "H")]
    h: RawSpatial,
    #[serde(rename = "WB")]
    wb: RawMatrix,
    #[serde(rename = "WC")]
    wc: RawMatrix,
}

fn default_field() -> RawField {
    RawField::Real
}

fn matrix(key: &str, raw: &RawMatrix, rows: usize, cols: usize) -> Result<CMat> {
    if raw.len() != rows || raw.iter().any(|r| r.len() != cols) {
        return Err(Error::format(key, format!("expected a {rows}x{cols} matrix")));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| match raw[i][j] {
        Entry::Real(x) => C64::new(x, 0.0),
        Entry::Complex([re, im]) => C64::new(re, im),
    }))
}

fn spatial(key: &str, raw: &RawSpatial, n: usize) -> Result<SpatialMatrixFunction> {
    match raw {
        RawSpatial::Constant { value } => Ok(SpatialMatrixFunction::Constant(matrix(key, value, n, n)?)),
        RawSpatial::Grid { xs, values } => {
            let vals = values
                .iter()
                .enumerate()
                .map(|(i, v)| matrix(&format!("{key}.values[{i}]"), v, n, n))
                .collect::<Result<Vec<_>>>()?;
            SpatialMatrixFunction::grid(xs.clone(), vals).map_err(|e| match e {
                Error::Format { msg, .. } => Error::format(key, msg),
                other => Error::format(key, other.to_string()),
            })
        }
    }
}

/// Parse a system from JSON text.
pub fn parse_system(text: &str) -> Result<HyperbolicSystem> {
    let raw: RawSystem = serde_json::from_str(text)?;
    let n = raw.n;
    if n == 0 {
        return Err(Error::format("n", "must be positive"));
    }
    let p0 = match &raw.p0 {
        Some(p) => spatial("P0", p, n)?,
        None => SpatialMatrixFunction::Constant(CMat::zeros(n, n)),
    };
    let field = match raw.field {
        RawField::Real => Field::Real,
        RawField::Complex => Field::Complex,
    };
    HyperbolicSystem::new(
        n,
        (raw.interval[0], raw.interval[1]),
        matrix("P1", &raw.p1, n, n)?,
        p0,
        spatial("H", &raw.h, n)?,
        matrix("WB", &raw.wb, n, 2 * n)?,
        matrix("WC", &raw.wc, n, 2 * n)?,
        field,
    )
}

pub fn load_system(path: impl AsRef<Path>) -> Result<HyperbolicSystem> {
    let text = std::fs::read_to_string(path)?;
    parse_system(&text)
}

fn number(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

fn entry(z: C64, field: Field) -> String {
    match field {
        Field::Real => number(z.re),
        Field::Complex => format!("[{}, {}]", number(z.re), number(z.im)),
    }
}

fn matrix_text(a: &CMat, field: Field) -> String {
    let rows: Vec<String> = (0..a.nrows())
        .map(|i| {
            let cells: Vec<String> = (0..a.ncols()).map(|j| entry(a[(i, j)], field)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn spatial_text(f: &SpatialMatrixFunction, field: Field, indent: &str) -> String {
    match f {
        SpatialMatrixFunction::Constant(v) => {
            format!("{{\"kind\": \"constant\", \"value\": {}}}", matrix_text(v, field))
        }
        SpatialMatrixFunction::Grid { xs, values } => {
            let xs_text: Vec<String> = xs.iter().map(|&x| number(x)).collect();
            let vals: Vec<String> =
                values.iter().map(|v| format!("{indent}    {}", matrix_text(v, field))).collect();
            format!(
                "{{\n{indent}  \"kind\": \"grid\",\n{indent}  \"xs\": [{}],\n{indent}  \"values\": [\n{}\n{indent}  ]\n{indent}}}",
                xs_text.join(", "),
                vals.join(",\n")
            )
        }
    }
}

/// Serialize a system to the JSON file format.
pub fn serialize_system(sys: &HyperbolicSystem) -> String {
    let field = sys.field;
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"n\": {},", sys.n);
    let _ = writeln!(out, "  \"interval\": [{}, {}],", number(sys.a), number(sys.b));
    let field_name = match field {
        Field::Real => "real",
        Field::Complex => "complex",
    };
    let _ = writeln!(out, "  \"field\": \"{field_name}\",");
    let _ = writeln!(out, "  \"P1\": {},", matrix_text(&sys.p1, field));
    let _ = writeln!(out, "  \"P0\": {},", spatial_text(&sys.p0, field, "  "));
    let _ = writeln!(out, "  \"H\": {},", spatial_text(&sys.h, field, "  "));
    let _ = writeln!(out, "  \"WB\": {},", matrix_text(&sys.wb, field));
    let _ = writeln!(out, "  \"WC\": {}", matrix_text(&sys.wc, field));
    out.push_str("}\n");
    out
}

/// Render a complex number as `re±im·i` for reports.
pub fn complex_text(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:.16e}", z.re)
    } else {
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        format!("{:.16e}{}{:.16e}i", z.re, sign, z.im.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real};

    const SCALAR: &str = r#"{
        "n": 1, "interval": [0, 1], "field": "real",
        "P1": [[1]], "P0": {"kind": "constant", "value": [[0]]},
        "H": {"kind": "constant", "value": [[1]]},
        "WB": [[1, 0]], "WC": [[0, 1]]
    }"#;

    #[test]
    fn parses_minimal_system() {
        let sys = parse_system(SCALAR).unwrap();
        assert_eq!(sys.n, 1);
        assert_eq!(sys.wb[(0, 0)], real(1.0));
    }

    #[test]
    fn unknown_key_is_named() {
        let text = SCALAR.replace("\"field\"", "\"colour\": 1, \"field\"");
        let err = parse_system(&text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn wrong_shape_names_key() {
        let text = SCALAR.replace("\"WB\": [[1, 0]]", "\"WB\": [[1, 0, 0]]");
        let err = parse_system(&text).unwrap_err().to_string();
        assert!(err.starts_with("WB"), "{err}");
    }

    #[test]
    fn complex_entries_round_trip() {
        let mut sys = parse_system(SCALAR).unwrap();
        sys.field = Field::Complex;
        sys.wc[(0, 1)] = c(0.5, -0.25);
        let back = parse_system(&serialize_system(&sys)).unwrap();
        assert_eq!(back, sys);
    }

    #[test]
    fn grid_round_trip() {
        let text = SCALAR.replace(
            r#""H": {"kind": "constant", "value": [[1]]}"#,
            r#""H": {"kind": "grid", "xs": [0, 0.3, 1], "values": [[[1]], [[1.5]], [[2]]]}"#,
        );
        let sys = parse_system(&text).unwrap();
        assert_eq!(parse_system(&serialize_system(&sys)).unwrap(), sys);
    }

    #[test]
    fn complex_text_format() {
        assert_eq!(complex_text(c(1.0, -2.0)), "1.0000000000000000e0-2.0000000000000000e0i");
    }
}
