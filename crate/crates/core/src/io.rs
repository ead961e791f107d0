//! JSON literals for matrices, eigentriples and paths, and the CSV table of a
//! tracker run.

use std::io::Write;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, Field, C64};
use crate::projective::EigenTriple;
use crate::tracker::{MatrixPath, TrackerRun};

pub fn ser_scalar<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn ser_vector<S: Serializer>(v: &CVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    vector_entries(v).serialize(s)
}

fn vector_entries(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn scalar_of(e: &[f64; 2]) -> Result<C64> {
    if !e[0].is_finite() || !e[1].is_finite() {
        return Err(Error::Input("non-finite entry".into()));
    }
    Ok(c(e[0], e[1]))
}

/// `{ "n": int, "field": "real"|"complex", "entries": [[re, im], ...] }`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixLiteral {
    pub n: usize,
    pub field: Field,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixLiteral {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect();
        Self {
            n,
            field: Field::of_matrix(m),
            entries,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.n == 0 || self.entries.len() != self.n * self.n {
            return Err(Error::Input(format!(
                "matrix of order {} needs {} entries, found {}",
                self.n,
                self.n * self.n,
                self.entries.len()
            )));
        }
        if self.field == Field::Real && self.entries.iter().any(|e| e[1] != 0.0) {
            return Err(Error::Input(
                "real matrix with nonzero imaginary part".into(),
            ));
        }
        let vals = self
            .entries
            .iter()
            .map(scalar_of)
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_row_slice(self.n, self.n, &vals))
    }
}

/// `{ "A": Matrix, "lambda": [re, im], "v": [[re, im], ...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleLiteral {
    #[serde(rename = "A")]
    pub a: MatrixLiteral,
    pub lambda: [f64; 2],
    pub v: Vec<[f64; 2]>,
}

impl TripleLiteral {
    pub fn from_triple(t: &EigenTriple) -> Self {
        Self {
            a: MatrixLiteral::from_matrix(&t.a),
            lambda: [t.lambda.re, t.lambda.im],
            v: vector_entries(&t.v),
        }
    }

    /// Validated and normalized triple.
    pub fn to_triple(&self) -> Result<EigenTriple> {
        let a = self.a.to_matrix()?;
        let v = CVector::from_vec(self.v.iter().map(scalar_of).collect::<Result<Vec<_>>>()?);
        EigenTriple::new(a, scalar_of(&self.lambda)?, v)?.normalize()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PathLiteral {
    Linear {
        #[serde(rename = "A0")]
        a0: MatrixLiteral,
        #[serde(rename = "A1")]
        a1: MatrixLiteral,
    },
    Sampled {
        ts: Vec<f64>,
        #[serde(rename = "As")]
        mats: Vec<MatrixLiteral>,
    },
    UnitaryOrbit {
        #[serde(rename = "A")]
        a: MatrixLiteral,
        generator: MatrixLiteral,
    },
}

impl PathLiteral {
    pub fn to_path(&self) -> Result<MatrixPath> {
        match self {
            Self::Linear { a0, a1 } => MatrixPath::linear(a0.to_matrix()?, a1.to_matrix()?),
            Self::Sampled { ts, mats } => MatrixPath::sampled(
                ts.clone(),
                mats.iter()
                    .map(MatrixLiteral::to_matrix)
                    .collect::<Result<_>>()?,
            ),
            Self::UnitaryOrbit { a, generator } => {
                MatrixPath::unitary_orbit(a.to_matrix()?, generator.to_matrix()?)
            }
        }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
}

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    parse::<MatrixLiteral>(text)?.to_matrix()
}

pub fn parse_triple(text: &str) -> Result<EigenTriple> {
    parse::<TripleLiteral>(text)?.to_triple()
}

pub fn parse_path(text: &str) -> Result<MatrixPath> {
    parse::<PathLiteral>(text)?.to_path()
}

/// Decimal with 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub const TRACKER_CSV_HEADER: &str = "t,lambda_re,lambda_im,mu,certified";

/// One row per mesh point: t, λ re, λ im, μ, certified.
pub fn write_tracker_csv<W: Write>(run: &TrackerRun, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TRACKER_CSV_HEADER}")?;
    for p in &run.triples {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_real(p.t),
            format_real(p.lambda.re),
            format_real(p.lambda.im),
            format_real(p.mu),
            p.certified
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;

    #[test]
    fn matrix_literal_is_row_major() {
        let m =
            parse_matrix(r#"{"n":2,"field":"real","entries":[[1,0],[2,0],[3,0],[4,0]]}"#).unwrap();
        assert_eq!(m[(0, 1)], real(2.0));
        assert_eq!(m[(1, 0)], real(3.0));
        assert_eq!(MatrixLiteral::from_matrix(&m).entries[1], [2.0, 0.0]);
    }

    #[test]
    fn malformed_literals_are_input_errors() {
        for bad in [
            r#"{"n":2,"field":"real","entries":[[1,0]]}"#,
            r#"{"n":1,"field":"real","entries":[[1,1]]}"#,
            r#"{"n":1,"field":"quaternion","entries":[[1,0]]}"#,
            r#"not json"#,
        ] {
            assert!(matches!(parse_matrix(bad), Err(Error::Input(_))), "{bad}");
        }
    }

    #[test]
    fn triple_loader_normalizes_and_validates() {
        let ok = r#"{"A":{"n":2,"field":"real","entries":[[1,0],[0,0],[0,0],[-1,0]]},"lambda":[1,0],"v":[[2,0],[0,0]]}"#;
        let t = parse_triple(ok).unwrap();
        assert!(t.is_normalized());
        let off = r#"{"A":{"n":2,"field":"real","entries":[[1,0],[0,0],[0,0],[-1,0]]},"lambda":[0.5,0],"v":[[1,0],[0,0]]}"#;
        assert!(matches!(parse_triple(off), Err(Error::NotOnVariety { .. })));
    }

    #[test]
    fn path_kinds_parse() {
        let m = r#"{"n":2,"field":"complex","entries":[[1,0],[0,0],[0,0],[-1,0]]}"#;
        let g = r#"{"n":2,"field":"complex","entries":[[0,1],[1,0],[-1,0],[0,0]]}"#;
        let lin = format!(r#"{{"kind":"linear","A0":{m},"A1":{m}}}"#);
        assert!(matches!(
            parse_path(&lin).unwrap(),
            MatrixPath::Linear { .. }
        ));
        let orb = format!(r#"{{"kind":"unitary-orbit","A":{m},"generator":{g}}}"#);
        assert!(matches!(
            parse_path(&orb).unwrap(),
            MatrixPath::UnitaryOrbit { .. }
        ));
        let smp = format!(r#"{{"kind":"sampled","ts":[0,0.5,1],"As":[{m},{m},{m}]}}"#);
        assert!(matches!(
            parse_path(&smp).unwrap(),
            MatrixPath::Sampled { .. }
        ));
        let bad = format!(r#"{{"kind":"sampled","ts":[0,0.5],"As":[{m},{m}]}}"#);
        assert!(parse_path(&bad).is_err());
    }

    #[test]
    fn reals_have_seventeen_significant_digits() {
        assert_eq!(format_real(0.1), "1.0000000000000001e-1");
        assert_eq!(format_real(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }
}
