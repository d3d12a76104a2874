//! Acceptance checks, one line per criterion. Runs without the libtest harness
//! so that the lines are printed even when everything passes.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use curvemoduli::blowup::{
    apply_automorphism, d1_coefficients, phi, restrict_to_d0, support_curve, Automorphism,
};
use curvemoduli::exactalg::{scalar, Form};
use curvemoduli::fibration::{act, coordinate_count, stability_inequality, GroupElement, MatrixA};
use curvemoduli::plane::{common_zero, is_singular_point, Curve, Point};
use curvemoduli::singularlocus::{jacobian, residue, TangentVector};
use num_traits::Zero;
use serde::Serialize;
use serde_json::Value;

const SEED: &str = "20240601";

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_curvemoduli")
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/running_example")
}

fn run(args: &[&str], dir: Option<&Path>) -> Result<Value, String> {
    let mut cmd = Command::new(binary());
    cmd.args(args).env_remove("CURVEMODULI_SEED");
    if let Some(d) = dir {
        cmd.current_dir(d);
    }
    let out = cmd.output().map_err(|e| format!("failed to start: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "`{}` exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    serde_json::from_slice(&out.stdout)
        .map_err(|e| format!("`{}` printed invalid JSON: {e}", args.join(" ")))
}

fn int_field(v: &Value, key: &str) -> Result<i64, String> {
    v[key]
        .as_i64()
        .ok_or_else(|| format!("missing integer field `{key}` in {v}"))
}

fn hilbert() -> Result<String, String> {
    for d in 3..=12i64 {
        let v = run(&["hilbert", "--degree", &d.to_string()], None)?;
        let (a, b) = (int_field(&v, "a")?, int_field(&v, "b")?);
        if (a, b) != (d, d * (3 - d) / 2 + 1) {
            return Err(format!("d = {d}: got {a} m + {b}"));
        }
        if d == 3 && (a, b) != (3, 1) {
            return Err("d = 3 is not 3m+1".into());
        }
    }
    Ok("d = 3..12, 3m+1 at d = 3".into())
}

fn dims() -> Result<String, String> {
    for d in 3..=12i64 {
        let v = run(&["dims", "--degree", &d.to_string()], None)?;
        let got = (
            int_field(&v, "dim_X")?,
            int_field(&v, "N")?,
            int_field(&v, "codim_simpson")?,
        );
        let want = (d * d + d + 6, (d + 2) * (d + 1) / 2 - 1, d * (d - 3) / 2);
        if got != want {
            return Err(format!("d = {d}: got {got:?}, want {want:?}"));
        }
    }
    Ok("d = 3..12".into())
}

fn suite(name: &str, degrees: &[u32], trials: usize) -> Result<String, String> {
    let mut total = 0;
    for d in degrees {
        let v = run(
            &[
                "check",
                "--suite",
                name,
                "--degree",
                &d.to_string(),
                "--seed",
                SEED,
                "--trials",
                &trials.to_string(),
            ],
            None,
        )?;
        let failures = v["failures"].as_array().ok_or("report without failures")?;
        if !failures.is_empty() {
            let first = serde_json::to_string(&failures[0]).unwrap_or_default();
            return Err(format!(
                "d = {d}: {} failures, first {first}",
                failures.len()
            ));
        }
        total += v["trials"].as_u64().unwrap_or(0);
    }
    Ok(format!(
        "{total} trials over d = {degrees:?}, zero failures"
    ))
}

fn stability() -> Result<String, String> {
    let mut cases = 0;
    for d in 3..=12 {
        let v = run(
            &["check", "--suite", "stability", "--degree", &d.to_string()],
            None,
        )?;
        if !v["failures"].as_array().is_some_and(Vec::is_empty) {
            return Err(format!("d = {d}: {}", v["failures"]));
        }
        cases += v["trials"].as_u64().unwrap_or(0);
    }
    if cases != (3..=12).map(|d| (d - 1) * 21).sum::<u64>() {
        return Err(format!("sweep covered {cases} cases"));
    }
    Ok(format!("{cases} cases, all true"))
}

fn json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn x(i: usize) -> Form {
    Form::var(i)
}

fn read<T: serde::de::DeserializeOwned>(name: &str) -> T {
    let text = std::fs::read_to_string(fixture_dir().join(name)).expect("fixture file");
    serde_json::from_str(&text).expect("fixture parses")
}

/// Library-level values of the running example, keyed like the golden file.
fn library_values() -> Vec<(&'static str, Value)> {
    let int = scalar::int;
    let a: MatrixA = read("matrix.json");
    let diagonal: MatrixA = read("diagonal.json");
    let xi0: TangentVector = read("b_xi0.json");
    let b_zero: TangentVector = read("b_zero.json");
    let cusp = &x(0) * &x(2).pow(2) - x(1).pow(3);
    let nodal = Curve::new(&x(1) * &x(2).pow(2) - &(&x(0) * &x(1)) * &x(2)).expect("cubic");
    let p100 = Point::from_ints([1, 0, 0]).expect("point");
    let p111 = Point::from_ints([1, 1, 1]).expect("point");
    let f = x(0) * x(2).pow(2);
    let euler = (0..3).fold(Form::zero(3), |acc, i| acc + &x(i) * &f.partial(i));

    let upper = GroupElement::left(3, [[int(1), int(1)], [int(0), int(1)]]).expect("invertible");
    let jac = jacobian(&a).expect("running example lies in X'");
    let image = jac.mul_vec(&xi0.coordinates());

    // kernel of the Jacobian versus the zero set of the residue
    let n = coordinate_count(3);
    let kernel = jac.nullspace();
    let kernel_ok = kernel.len() == n - 2
        && kernel.iter().all(|v| {
            let (r1, r2) = residue(&a, &TangentVector::from_coordinates(3, v)).expect("normalized");
            r1.is_zero() && r2.is_zero()
        });

    let phi_xi0 = phi(&a, &xi0).expect("valid");
    let sign_flip = Automorphism::new(int(-1), int(1), int(0)).expect("alpha nonzero");

    vec![
        (
            "form_mul_sub",
            json(&(&x(1) * &x(2).pow(2) - &x(2) * &(&x(0) * &x(1)))),
        ),
        (
            "eval_cusp_at_111",
            json(&scalar::to_string(&cusp.eval(p111.coords()))),
        ),
        ("euler_x0x2sq", json(&euler)),
        (
            "common_zero_shifted",
            json(&common_zero(&(&x(0) - &x(1)), &(&x(0) - &x(2))).expect("independent")),
        ),
        (
            "common_zero_non_orthogonal",
            json(&common_zero(&x(1), &(&x(1) + &x(2))).expect("independent")),
        ),
        (
            "singular_point_nodal_100",
            json(&is_singular_point(&nodal, &p100).expect("on curve")),
        ),
        (
            "singular_point_cusp_111",
            json(
                &is_singular_point(&Curve::new(cusp.clone()).expect("cubic"), &p111)
                    .expect("on curve"),
            ),
        ),
        (
            "singular_point_cusp_100",
            json(&is_singular_point(&Curve::new(cusp).expect("cubic"), &p100).expect("on curve")),
        ),
        (
            "stability_3_2_0",
            json(&stability_inequality(3, 2, 0).expect("in range")),
        ),
        (
            "stability_12_1_0",
            json(&stability_inequality(12, 1, 0).expect("in range")),
        ),
        (
            "act_upper_triangular_on_diagonal",
            json(&act(&upper, &diagonal)),
        ),
        (
            "jacobian_times_xi0",
            json(&image.iter().map(scalar::to_string).collect::<Vec<_>>()),
        ),
        ("jacobian_kernel_equals_tangent_equations", json(&kernel_ok)),
        ("d0_restriction_xi0", json(&restrict_to_d0(&phi_xi0))),
        ("d1_coefficients_xi0", json(&d1_coefficients(&phi_xi0))),
        ("support_curve_xi0", json(&support_curve(&phi_xi0))),
        (
            "support_curve_zero",
            json(&support_curve(&phi(&a, &b_zero).expect("valid"))),
        ),
        (
            "pullback_sign_flip_of_xi0",
            json(&apply_automorphism(&sign_flip, &phi_xi0)),
        ),
        (
            "pullback_identity_of_xi0",
            json(&apply_automorphism(&Automorphism::identity(), &phi_xi0)),
        ),
    ]
}

fn fixture() -> Result<String, String> {
    let golden: Value = read("golden.json");
    let dir = fixture_dir();
    let mut count = 0;
    for case in golden["cli"]
        .as_array()
        .ok_or("golden file without cli cases")?
    {
        let args: Vec<&str> = case["args"]
            .as_array()
            .ok_or("case without args")?
            .iter()
            .filter_map(Value::as_str)
            .collect();
        let got = run(&args, Some(&dir))?;
        if got != case["expected"] {
            return Err(format!("{}: got {got}", case["name"]));
        }
        count += 1;
    }
    let library = &golden["library"];
    for (name, got) in library_values() {
        if library[name] != got {
            return Err(format!("{name}: got {got}, golden {}", library[name]));
        }
        count += 1;
    }
    if library.as_object().map_or(0, |m| m.len()) != library_values().len() {
        return Err("golden library values and checks differ in number".into());
    }
    Ok(format!("{count} golden values reproduced"))
}

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    check: fn() -> Result<String, String>,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            title: "Hilbert polynomial",
            limit: Duration::from_secs(1),
            check: hilbert,
        },
        Criterion {
            id: 2,
            title: "dimension table",
            limit: Duration::from_secs(1),
            check: dims,
        },
        Criterion {
            id: 3,
            title: "section/quotient suite",
            limit: Duration::from_secs(120),
            check: || suite("quotient", &[3, 4, 5, 6], 500),
        },
        Criterion {
            id: 4,
            title: "singular-locus suite",
            limit: Duration::from_secs(120),
            check: || suite("singular-locus", &[3, 4, 5], 500),
        },
        Criterion {
            id: 5,
            title: "blow-up suite",
            limit: Duration::from_secs(180),
            check: || suite("blowup", &[3, 4, 5], 500),
        },
        Criterion {
            id: 6,
            title: "equivalence suite",
            limit: Duration::from_secs(180),
            check: || suite("rbundle-equiv", &[3, 4, 5], 300),
        },
        Criterion {
            id: 7,
            title: "stability inequality",
            limit: Duration::from_secs(1),
            check: stability,
        },
        Criterion {
            id: 8,
            title: "worked fixture",
            limit: Duration::from_secs(60),
            check: fixture,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.check)();
        let elapsed = start.elapsed();
        let line = match result {
            Ok(detail) if elapsed <= c.limit => format!("PASS  {detail}"),
            Ok(detail) => format!("FAIL  too slow ({detail})"),
            Err(e) => format!("FAIL  {e}"),
        };
        if line.starts_with("FAIL") {
            failed += 1;
        }
        println!(
            "criterion {} ({}): {line} [{:.2} s, limit {} s]",
            c.id,
            c.title,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
