//! Reading inputs and mapping failures to exit codes.

use std::fmt;
use std::fs;
use std::path::Path;

use curvemoduli::exactalg::{scalar, Form, Scalar};
use curvemoduli::fibration::{MatrixA, MatrixData};
use curvemoduli::plane::{Curve, Point};
use curvemoduli::singularlocus::TangentVector;
use curvemoduli::Error;
use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Debug)]
pub enum CliError {
    Malformed(String),
    Precondition(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Malformed(_) => 2,
            CliError::Precondition(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Malformed(m) => write!(f, "malformed input: {m}"),
            CliError::Precondition(e) => write!(f, "precondition violated: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Malformed(m) => CliError::Malformed(m),
            other => CliError::Precondition(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

/// Structure is checked first, so that only a violated invariant of an
/// otherwise well-formed matrix is reported as a precondition failure.
pub fn read_matrix(path: &Path) -> CliResult<MatrixA> {
    let data: MatrixData = read_json(path)?;
    Ok(MatrixA::try_from(data)?)
}

pub fn read_vector(path: &Path) -> CliResult<TangentVector> {
    let data: MatrixData = read_json(path)?;
    Ok(TangentVector::try_from(data)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CurveFile {
    Wrapped { f: Form },
    Bare(Form),
}

/// Accepts either `{"f": FORM}` or a bare form.
pub fn read_curve(path: &Path) -> CliResult<Curve> {
    let f = match read_json::<CurveFile>(path)? {
        CurveFile::Wrapped { f } | CurveFile::Bare(f) => f,
    };
    Ok(Curve::new(f)?)
}

/// `a,b,c` with rational entries, optionally in brackets or with a colon as
/// separator.
pub fn parse_point(text: &str) -> CliResult<Point> {
    let inner = text
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    let parts: Vec<&str> = inner.split([',', ':']).map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Malformed(format!(
            "point `{text}` needs three coordinates"
        )));
    }
    let coords = parts
        .iter()
        .map(|p| scalar::parse(p.trim_matches('"')))
        .collect::<curvemoduli::Result<Vec<Scalar>>>()?;
    let [a, b, c]: [Scalar; 3] = coords.try_into().expect("three parts");
    Ok(Point::new([a, b, c])?)
}

pub fn parse_seed(text: &str) -> CliResult<u64> {
    text.trim()
        .parse()
        .map_err(|_| CliError::Malformed(format!("seed `{text}` is not a nonnegative integer")))
}
