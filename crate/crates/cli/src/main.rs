//! `curvemoduli`: JSON front end to the curvemoduli library.

mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use curvemoduli::blowup::{
    d1_common_zero, is_r_bundle, normal_direction, phi, r_bundle_equivalent,
};
use curvemoduli::error::Error;
use curvemoduli::exactalg::scalar;
use curvemoduli::fibration::{
    det_of, dimension_report, hilbert_from_resolution, local_section, nu, same_fiber,
};
use curvemoduli::instances::{random_instances, InstanceKind};
use curvemoduli::plane::CurvePointPair;
use curvemoduli::singularlocus::{
    is_normalized, is_singular_sheaf, normalize, residue, singular_equations, tangent_contains,
};
use curvemoduli::suite::{run_suite, SUITES};
use serde::Serialize;
use serde_json::{json, Value};

use input::{parse_point, parse_seed, read_curve, read_matrix, read_vector, CliError, CliResult};

const SEED_ENV: &str = "CURVEMODULI_SEED";

#[derive(Parser)]
#[command(
    name = "curvemoduli",
    version,
    about = "Determinantal curves, singular sheaves and R-bundles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hilbert polynomial `a m + b` of the sheaves of degree d.
    Hilbert {
        #[arg(long)]
        degree: i64,
    },
    /// Dimensions of the parameter spaces for degree d.
    Dims {
        #[arg(long)]
        degree: i64,
    },
    /// Determinant of a matrix.
    Det {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// The curve and point of a matrix.
    Nu {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Whether a matrix presents a singular sheaf.
    Singular {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// A matrix whose determinant and point are the given curve and point.
    Section {
        #[arg(long)]
        curve: PathBuf,
        /// Coordinates such as `1,0,0` or `1/2:1:0`.
        #[arg(long)]
        point: String,
    },
    /// Whether two matrices lie in one fiber, with a group element if so.
    FiberEq {
        #[arg(long)]
        m1: PathBuf,
        #[arg(long)]
        m2: PathBuf,
    },
    /// Move a matrix to the standard chart.
    Normalize {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Whether a vector is tangent to the singular locus.
    Tangent {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        vector: PathBuf,
    },
    /// The presentation matrix of the sheaf on D(p).
    Phi {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        vector: PathBuf,
    },
    /// Whether the sheaf on D(p) is an R-bundle.
    Rbundle {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        vector: PathBuf,
    },
    /// Whether two vectors give equivalent R-bundles.
    RbundleEq {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        v1: PathBuf,
        #[arg(long)]
        v2: PathBuf,
    },
    /// Seeded random instances.
    Instances {
        /// One of X, Xprime, tangent, normal.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Run a property suite, or `all` of them.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("domain values serialize")
}

fn seed_or_env(seed: u64) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => parse_seed(&s),
        Err(_) => Ok(seed),
    }
}

fn run(command: Command) -> CliResult<Value> {
    Ok(match command {
        Command::Hilbert { degree } => to_value(&hilbert_from_resolution(degree)?),
        Command::Dims { degree } => to_value(&dimension_report(degree)?),
        Command::Det { matrix } => to_value(&det_of(&read_matrix(&matrix)?)),
        Command::Nu { matrix } => to_value(&nu(&read_matrix(&matrix)?)),
        Command::Singular { matrix } => {
            let a = read_matrix(&matrix)?;
            json!({
                "singular": is_singular_sheaf(&a),
                "equations": to_value(&singular_equations(&a)),
            })
        }
        Command::Section { curve, point } => {
            let pair = CurvePointPair::new(read_curve(&curve)?, parse_point(&point)?)?;
            to_value(&local_section(&pair)?)
        }
        Command::FiberEq { m1, m2 } => {
            let (a1, a2) = (read_matrix(&m1)?, read_matrix(&m2)?);
            if a1.d() != a2.d() {
                return Err(Error::DegreeMismatch("matrices of different degrees".into()).into());
            }
            let w = same_fiber(&a1, &a2);
            json!({"same_fiber": w.is_some(), "witness": to_value(&w)})
        }
        Command::Normalize { matrix } => to_value(&normalize(&read_matrix(&matrix)?)),
        Command::Tangent { matrix, vector } => {
            let (a, b) = (read_matrix(&matrix)?, read_vector(&vector)?);
            let tangent = tangent_contains(&a, &b)?;
            let res = if is_normalized(&a) {
                let (r1, r2) = residue(&a, &b)?;
                json!([scalar::to_string(&r1), scalar::to_string(&r2)])
            } else {
                Value::Null
            };
            json!({"tangent": tangent, "residue": res})
        }
        Command::Phi { matrix, vector } => {
            to_value(&phi(&read_matrix(&matrix)?, &read_vector(&vector)?)?)
        }
        Command::Rbundle { matrix, vector } => {
            let (a, b) = (read_matrix(&matrix)?, read_vector(&vector)?);
            let r = is_r_bundle(&a, &b)?;
            let direction = if r {
                to_value(&normal_direction(&a, &b)?)
            } else {
                Value::Null
            };
            let zero = d1_common_zero(&phi(&a, &b)?);
            json!({"r_bundle": r, "normal_direction": direction, "d1_common_zero": to_value(&zero)})
        }
        Command::RbundleEq { matrix, v1, v2 } => {
            let (a, b1, b2) = (read_matrix(&matrix)?, read_vector(&v1)?, read_vector(&v2)?);
            let aut = r_bundle_equivalent(&a, &b1, &b2)?;
            json!({"equivalent": aut.is_some(), "automorphism": to_value(&aut)})
        }
        Command::Instances {
            kind,
            degree,
            seed,
            count,
        } => {
            let kind: InstanceKind = kind.parse()?;
            to_value(&random_instances(kind, degree, seed_or_env(seed)?, count)?)
        }
        Command::Check {
            suite,
            degree,
            seed,
            trials,
        } => {
            let seed = seed_or_env(seed)?;
            if suite == "all" {
                let reports = SUITES
                    .iter()
                    .map(|s| run_suite(s, degree, seed, trials))
                    .collect::<curvemoduli::Result<Vec<_>>>()?;
                to_value(&reports)
            } else if SUITES.contains(&suite.as_str()) {
                to_value(&run_suite(&suite, degree, seed, trials)?)
            } else {
                return Err(CliError::Malformed(format!(
                    "unknown suite `{suite}`; expected one of {} or all",
                    SUITES.join(", ")
                )));
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(v) => {
            let mut out = std::io::stdout().lock();
            let text = serde_json::to_string(&v).expect("JSON values serialize");
            if writeln!(out, "{text}").is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("curvemoduli: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
