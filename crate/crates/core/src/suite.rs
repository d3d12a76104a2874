//! Randomized property suites. Each trial draws from its own seeded stream, so
//! reports do not depend on how trials are scheduled.

use std::time::Instant;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::blowup::{
    apply_automorphism, apply_to_entries, d1_common_zero, is_r_bundle, normal_direction, phi,
    r_bundle_equivalent, restrict_to_d0, support_curve, PhiMatrix,
};
use crate::error::{Error, Result};
use crate::exactalg::scalar::{self, Scalar};
use crate::exactalg::{applicable_rewrites, dring_reduce, rewrite_once, Form, Matrix};
use crate::fibration::{
    act, coordinate_count, det_of, local_section, nu, same_fiber, scalar_stabilizer_vector,
    stability_inequality, stabilizer_kernel, MatrixA,
};
use crate::instances::{self as gen, det_curve, rng_for};
use crate::plane::{common_zero, is_singular_point, make_pair, Curve};
use crate::singularlocus::{
    is_normalized, is_singular_sheaf, jacobian, normalize, residue, tangent_contains, TangentVector,
};

pub const SUITES: [&str; 7] = [
    "exactalg",
    "plane",
    "quotient",
    "singular-locus",
    "blowup",
    "rbundle-equiv",
    "stability",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub degree: u32,
    pub seed: u64,
    pub trials: usize,
    pub failures: Vec<Value>,
    pub elapsed_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Failure records for one trial.
#[derive(Default)]
struct Trial {
    index: usize,
    failures: Vec<Value>,
}

impl Trial {
    fn check(&mut self, property: &str, ok: bool, instance: impl FnOnce() -> Value) {
        if !ok {
            self.failures.push(json!({
                "trial": self.index,
                "property": property,
                "instance": instance(),
            }));
        }
    }

    fn error(&mut self, property: &str, e: &Error) {
        self.failures.push(json!({
            "trial": self.index,
            "property": property,
            "error": e.to_string(),
        }));
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("domain values serialize")
}

type TrialFn = fn(u32, &mut ChaCha8Rng, &mut Trial);

pub fn run_suite(name: &str, d: u32, seed: u64, trials: usize) -> Result<SuiteReport> {
    crate::plane::check_degree(i64::from(d))?;
    let start = Instant::now();
    if name == "stability" {
        let failures = stability_sweep(d);
        return Ok(report(
            name,
            d,
            seed,
            (d as usize - 1) * 21,
            failures,
            start,
        ));
    }
    let f: TrialFn = match name {
        "exactalg" => exactalg_trial,
        "plane" => plane_trial,
        "quotient" => quotient_trial,
        "singular-locus" => singular_locus_trial,
        "blowup" => blowup_trial,
        "rbundle-equiv" => rbundle_equiv_trial,
        other => return Err(Error::Domain(format!("unknown suite `{other}`"))),
    };
    let failures: Vec<Value> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let mut t = Trial {
                index: i,
                failures: Vec::new(),
            };
            f(d, &mut rng, &mut t);
            t.failures
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(report(name, d, seed, trials, failures, start))
}

fn report(
    name: &str,
    d: u32,
    seed: u64,
    trials: usize,
    failures: Vec<Value>,
    start: Instant,
) -> SuiteReport {
    SuiteReport {
        suite: name.to_string(),
        degree: d,
        seed,
        trials,
        failures,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

fn stability_sweep(d: u32) -> Vec<Value> {
    let mut out = Vec::new();
    for s in 1..i64::from(d) {
        for h in 0..=20 {
            match stability_inequality(i64::from(d), s, h) {
                Ok(true) => {}
                Ok(false) => out.push(json!({"d": d, "s": s, "h0q": h})),
                Err(e) => out.push(json!({"d": d, "s": s, "h0q": h, "error": e.to_string()})),
            }
        }
    }
    out
}

fn exactalg_trial(d: u32, rng: &mut ChaCha8Rng, t: &mut Trial) {
    let (f, g, h) = (gen::form(rng, d), gen::form(rng, d), gen::form(rng, d));
    t.check(
        "distributivity",
        &(&f + &g) * &h == &(&f * &h) + &(&g * &h),
        || json!({"f": to_json(&f), "g": to_json(&g), "h": to_json(&h)}),
    );
    t.check(
        "commutativity",
        &f * &g == &g * &f,
        || json!({"f": to_json(&f), "g": to_json(&g)}),
    );

    let p = [gen::coeff(rng), gen::coeff(rng), gen::coeff(rng)];
    t.check("eval_homomorphism", (&f * &g).eval(&p) == f.eval(&p) * g.eval(&p), || {
        json!({"f": to_json(&f), "g": to_json(&g), "p": p.iter().map(scalar::to_string).collect::<Vec<_>>()})
    });

    let euler = (0..3).fold(Form::zero(d), |acc, i| acc + &Form::var(i) * &f.partial(i));
    t.check(
        "euler",
        euler == f.scale(&scalar::int(i64::from(d))),
        || json!({"f": to_json(&f)}),
    );

    let b = gen::biform(rng, (d, 2), 10);
    let canonical = dring_reduce(&b);
    for _ in 0..2 {
        let mut cur = b.clone();
        loop {
            let moves = applicable_rewrites(&cur);
            let Some((m, rule)) = moves.choose(rng) else {
                break;
            };
            cur = rewrite_once(&cur, m, *rule);
        }
        t.check(
            "confluence",
            &cur == canonical.as_biform(),
            || json!({"biform": to_json(&b)}),
        );
    }
}

fn plane_trial(d: u32, rng: &mut ChaCha8Rng, t: &mut Trial) {
    let pair = gen::pair(rng, d);
    let f = pair.curve().equation().clone();
    let p = pair.point().coords().clone();
    let lambda = gen::nonzero_coeff(rng);
    let same = make_pair(f.scale(&lambda), p.clone()) == make_pair(f.clone(), p);
    t.check(
        "scalar_invariance",
        same,
        || json!({"pair": to_json(&pair), "lambda": scalar::to_string(&lambda)}),
    );

    let (z1, z2) = gen::independent_linear_pair(rng);
    match common_zero(&z1, &z2) {
        Ok(q) => {
            let ok = z1.eval(q.coords()).is_zero() && z2.eval(q.coords()).is_zero();
            t.check(
                "common_zero",
                ok,
                || json!({"z1": to_json(&z1), "z2": to_json(&z2)}),
            );
        }
        Err(e) => t.error("common_zero", &e),
    }

    let singular = nu(&gen::matrix_xprime(rng, d));
    for candidate in [&pair, &singular] {
        let c = candidate.curve();
        let scaled = Curve::new(c.equation().scale(&lambda)).expect("nonzero multiple");
        let a = is_singular_point(c, candidate.point());
        let b = is_singular_point(&scaled, candidate.point());
        t.check(
            "singular_scalar_invariance",
            a == b,
            || json!({"pair": to_json(candidate)}),
        );
    }
    t.check(
        "singular_sample",
        is_singular_point(singular.curve(), singular.point()) == Ok(true),
        || json!({"pair": to_json(&singular)}),
    );
}

fn spans_scalar_line(kernel: &[Vec<Scalar>], d: u32) -> bool {
    if kernel.len() != 1 {
        return false;
    }
    let rows = vec![kernel[0].clone(), scalar_stabilizer_vector(d)];
    Matrix::from_rows(rows).rank() == 1
}

fn quotient_trial(d: u32, rng: &mut ChaCha8Rng, t: &mut Trial) {
    let pair = gen::pair(rng, d);
    match local_section(&pair) {
        Ok(a) => t.check(
            "section",
            nu(&a) == pair,
            || json!({"pair": to_json(&pair)}),
        ),
        Err(e) => t.error("section", &e),
    }

    let a = gen::matrix_x(rng, d);
    let e = gen::group_element(rng, d);
    let moved = act(&e, &a);
    t.check(
        "nu_invariance",
        nu(&moved) == nu(&a),
        || json!({"matrix": to_json(&a), "element": to_json(&e)}),
    );

    match same_fiber(&a, &moved) {
        Some(w) => t.check(
            "fiber_completeness",
            act(&w, &a) == moved,
            || json!({"matrix": to_json(&a), "element": to_json(&e), "witness": to_json(&w)}),
        ),
        None => t.check(
            "fiber_completeness",
            false,
            || json!({"matrix": to_json(&a), "element": to_json(&e)}),
        ),
    }

    let other = if rng.gen_bool(0.5) {
        gen::matrix_x(rng, d)
    } else {
        local_section(&nu(&a)).expect("nu lands on the curve")
    };
    match same_fiber(&a, &other) {
        Some(w) => t.check(
            "fiber_soundness",
            act(&w, &a) == other,
            || json!({"m1": to_json(&a), "m2": to_json(&other), "witness": to_json(&w)}),
        ),
        None => t.check(
            "fiber_soundness",
            nu(&a) != nu(&other),
            || json!({"m1": to_json(&a), "m2": to_json(&other)}),
        ),
    }

    if t.index < 200 {
        let kernel = stabilizer_kernel(&a);
        t.check(
            "stabilizer",
            spans_scalar_line(&kernel, d),
            || json!({"matrix": to_json(&a)}),
        );
    }
}

/// The `2 x N` matrix of the residue map at a normalized matrix.
fn residue_matrix(a: &MatrixA) -> Result<Matrix> {
    let n = coordinate_count(a.d());
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let mut v = vec![Scalar::zero(); n];
        v[k] = Scalar::one();
        let (r1, r2) = residue(a, &TangentVector::from_coordinates(a.d(), &v))?;
        cols.push(vec![r1, r2]);
    }
    Ok(Matrix::from_columns(&cols))
}

fn same_row_space(m1: &Matrix, m2: &Matrix) -> bool {
    let (r1, p1) = m1.rref();
    let (r2, p2) = m2.rref();
    p1 == p2 && (0..p1.len()).all(|i| r1.row(i) == r2.row(i))
}

fn singular_locus_trial(d: u32, rng: &mut ChaCha8Rng, t: &mut Trial) {
    let a = if t.index.is_multiple_of(2) {
        gen::matrix_x(rng, d)
    } else {
        gen::matrix_xprime(rng, d)
    };
    let p = common_zero(a.z1(), a.z2()).expect("independent forms");
    let agree = is_singular_point(&det_curve(&a), &p).map(|s| s == is_singular_sheaf(&a));
    t.check(
        "agreement",
        agree == Ok(true),
        || json!({"matrix": to_json(&a)}),
    );

    let e = gen::group_element(rng, d);
    t.check(
        "orbit_invariance",
        is_singular_sheaf(&act(&e, &a)) == is_singular_sheaf(&a),
        || json!({"matrix": to_json(&a), "element": to_json(&e)}),
    );

    let ap = gen::matrix_xprime(rng, d);
    match jacobian(&ap) {
        Ok(j) => t.check(
            "jacobian_rank",
            j.rank() == 2,
            || json!({"matrix": to_json(&ap)}),
        ),
        Err(e) => t.error("jacobian_rank", &e),
    }

    let norm = normalize(&ap);
    let idem = normalize(&norm.result);
    t.check(
        "normalize",
        is_normalized(&norm.result)
            && nu(&norm.result).point() == &norm.transform_point(nu(&ap).point())
            && idem.coord_change.is_identity()
            && idem.result == norm.result,
        || json!({"matrix": to_json(&ap)}),
    );

    // A tangent vector found in the original chart has zero residue once
    // carried to the standard chart, and a vector outside the kernel does not.
    match (gen::jacobian_tangent(rng, &ap), jacobian(&ap)) {
        (Ok(b), Ok(j)) => {
            let moved = norm.transform_tangent(&b);
            let r = residue(&norm.result, &moved);
            t.check(
                "kernel_transport",
                r == Ok((Scalar::zero(), Scalar::zero())),
                || json!({"matrix": to_json(&ap), "vector": to_json(&b)}),
            );
            let w = gen::vector(rng, d);
            let inside = j.mul_vec(&w.coordinates()).iter().all(Zero::is_zero);
            let r = residue(&norm.result, &norm.transform_tangent(&w));
            let zero = r.as_ref().map(|(r1, r2)| r1.is_zero() && r2.is_zero());
            t.check(
                "kernel_transport",
                zero == Ok(inside),
                || json!({"matrix": to_json(&ap), "vector": to_json(&w)}),
            );
        }
        (Err(e), _) | (_, Err(e)) => t.error("kernel_transport", &e),
    }

    let an = gen::normalized_xprime(rng, d);
    let (Ok(j), Ok(r)) = (jacobian(&an), residue_matrix(&an)) else {
        t.check(
            "kernel_agreement",
            false,
            || json!({"matrix": to_json(&an)}),
        );
        return;
    };
    t.check(
        "kernel_agreement",
        same_row_space(&j, &r),
        || json!({"matrix": to_json(&an)}),
    );
    let b = gen::vector(rng, d);
    let tangent = tangent_contains(&an, &b);
    let res = residue(&an, &b).map(|(r1, r2)| r1.is_zero() && r2.is_zero());
    t.check(
        "kernel_agreement",
        tangent.is_ok() && tangent == res,
        || json!({"matrix": to_json(&an), "vector": to_json(&b)}),
    );
}

fn check_phi(t: &mut Trial, a: &MatrixA, b: &TangentVector, p: &PhiMatrix) {
    let ctx = || json!({"matrix": to_json(a), "vector": to_json(b)});
    let entries = [
        [a.z1().clone(), a.q1().clone()],
        [a.z2().clone(), a.q2().clone()],
    ];
    t.check("d0_restriction", restrict_to_d0(p) == entries, ctx);
    t.check("bidegrees", p.has_expected_bidegrees(), ctx);
    let det = support_curve(p);
    t.check("support_bidegree", det.bidegree() == (a.d() - 2, 2), ctx);
    t.check(
        "support_restriction",
        det.restrict_to_d0() == det_of(a),
        ctx,
    );
}

fn blowup_trial(d: u32, rng: &mut ChaCha8Rng, t: &mut Trial) {
    let a = gen::normalized_xprime(rng, d);
    let b = if t.index.is_multiple_of(2) {
        gen::jacobian_tangent(rng, &a).expect("a lies in X'")
    } else {
        gen::vector(rng, d)
    };
    let ctx = || json!({"matrix": to_json(&a), "vector": to_json(&b)});
    let p = match phi(&a, &b) {
        Ok(p) => p,
        Err(e) => return t.error("phi", &e),
    };
    check_phi(t, &a, &b, &p);
    match (is_r_bundle(&a, &b), tangent_contains(&a, &b)) {
        (Ok(r), Ok(tc)) => {
            t.check("r_bundle_criterion", r != tc, ctx);
            let zero = d1_common_zero(&p);
            t.check("d1_common_zero", zero.is_some() == tc, ctx);
            if let Some(u) = zero {
                let vanish = p.entries.iter().flatten().all(|e| {
                    e.eval_x(&[Scalar::one(), Scalar::zero(), Scalar::zero()])
                        .eval(u.coords())
                        .is_zero()
                });
                t.check("d1_common_zero", vanish, ctx);
            }
        }
        (Err(e), _) | (_, Err(e)) => t.error("r_bundle_criterion", &e),
    }
}

fn alpha_of(
    t: &mut Trial,
    property: &str,
    a: &MatrixA,
    b1: &TangentVector,
    b2: &TangentVector,
) -> Option<Scalar> {
    match r_bundle_equivalent(a, b1, b2) {
        Ok(Some(aut)) => Some(aut.alpha().clone()),
        Ok(None) => {
            t.check(
                property,
                false,
                || json!({"matrix": to_json(a), "v1": to_json(b1), "v2": to_json(b2)}),
            );
            None
        }
        Err(e) => {
            t.error(property, &e);
            None
        }
    }
}

fn perturb(rng: &mut ChaCha8Rng, a: &MatrixA, b: &TangentVector) -> (Scalar, TangentVector) {
    let alpha = if rng.gen_bool(0.5) {
        gen::nonzero_coeff(rng)
    } else {
        scalar::ratio(rng.gen_range(1..=9), rng.gen_range(1..=9)) * gen::nonzero_coeff(rng)
    };
    let tangent = gen::jacobian_tangent(rng, a).expect("a lies in X'");
    (alpha.clone(), &b.scale(&alpha) + &tangent)
}

fn rbundle_equiv_trial(d: u32, rng: &mut ChaCha8Rng, t: &mut Trial) {
    let a = gen::normalized_xprime(rng, d);
    let b1 = gen::normal_vector(rng, &a).expect("a is normalized");
    let (alpha, b2) = perturb(rng, &a, &b1);
    let ctx =
        |v: &TangentVector| json!({"matrix": to_json(&a), "v1": to_json(&b1), "v2": to_json(v)});

    match r_bundle_equivalent(&a, &b1, &b2) {
        Ok(Some(aut)) => {
            t.check("alpha", aut.alpha() == &alpha, || ctx(&b2));
            let pulled = apply_automorphism(&aut, &phi(&a, &b1).expect("valid input"));
            t.check(
                "pullback",
                pulled == phi(&a, &b2).expect("valid input").entries,
                || ctx(&b2),
            );
        }
        Ok(None) => t.check("equivalence", false, || ctx(&b2)),
        Err(e) => t.error("equivalence", &e),
    }

    let dir = normal_direction(&a, &b1).expect("normal vector");
    let b3 = loop {
        let v = gen::normal_vector(rng, &a).expect("a is normalized");
        if normal_direction(&a, &v).expect("normal vector") != dir {
            break v;
        }
    };
    t.check(
        "non_proportional",
        r_bundle_equivalent(&a, &b1, &b3) == Ok(None),
        || ctx(&b3),
    );

    // reflexivity, symmetry and transitivity along B1 ~ B2 ~ B3'
    let (_, b3p) = perturb(rng, &a, &b2);
    let refl = r_bundle_equivalent(&a, &b1, &b1);
    t.check(
        "reflexivity",
        matches!(&refl, Ok(Some(aut)) if aut.alpha().is_one() && aut.beta().is_zero() && aut.gamma().is_zero()),
        || ctx(&b1),
    );
    let (Some(a12), Some(a21), Some(a23), Some(a13)) = (
        alpha_of(t, "chain", &a, &b1, &b2),
        alpha_of(t, "chain", &a, &b2, &b1),
        alpha_of(t, "chain", &a, &b2, &b3p),
        alpha_of(t, "chain", &a, &b1, &b3p),
    ) else {
        return;
    };
    t.check("symmetry", &a12 * &a21 == Scalar::one(), || ctx(&b2));
    t.check("transitivity", &a12 * &a23 == a13, || ctx(&b3p));
    let aut12 = r_bundle_equivalent(&a, &b1, &b2).ok().flatten();
    let aut23 = r_bundle_equivalent(&a, &b2, &b3p).ok().flatten();
    if let (Some(x), Some(y)) = (aut12, aut23) {
        let p1 = phi(&a, &b1).expect("valid input");
        let composed = apply_to_entries(&y, &apply_automorphism(&x, &p1));
        t.check(
            "composed_pullback",
            composed == phi(&a, &b3p).expect("valid input").entries,
            || ctx(&b3p),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_small_runs() {
        for name in SUITES {
            let r = run_suite(name, 3, 1, 12).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.failures);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite("quotient", 4, 9, 8).unwrap();
        let b = run_suite("quotient", 4, 9, 8).unwrap();
        assert_eq!(a.failures, b.failures);
        assert_eq!(a.trials, 8);
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", 3, 0, 1), Err(Error::Domain(_))));
    }
}
