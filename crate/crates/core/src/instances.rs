//! Seeded random instances with small integer coefficients.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::scalar::{self, Scalar};
use crate::exactalg::{monomials, BiForm, BiMonomial, Form};
use crate::fibration::{coordinate_count, det_of, GroupElement, MatrixA};
use crate::plane::{linearly_independent, pivot_power, Curve, CurvePointPair, Point};
use crate::singularlocus::{chart_coefficients, jacobian, residue, TangentVector};

pub const COEFF_BOUND: i64 = 9;

/// The generator for trial `stream` of a run seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn coeff<R: Rng>(rng: &mut R) -> Scalar {
    scalar::int(rng.gen_range(-COEFF_BOUND..=COEFF_BOUND))
}

pub fn nonzero_coeff<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let c = coeff(rng);
        if !c.is_zero() {
            return c;
        }
    }
}

/// A homogeneous form with every coefficient drawn uniformly.
pub fn form<R: Rng>(rng: &mut R, degree: u32) -> Form {
    let coeffs: Vec<Scalar> = (0..monomials(degree).len()).map(|_| coeff(rng)).collect();
    Form::from_coefficients(degree, &coeffs)
}

pub fn bimonomials(a: u32, b: u32) -> Vec<BiMonomial> {
    let us = monomials(b);
    monomials(a)
        .into_iter()
        .flat_map(|x| us.iter().map(move |&u| BiMonomial::new(x, u)))
        .collect()
}

/// An unreduced bihomogeneous form with up to `max_terms` terms.
pub fn biform<R: Rng>(rng: &mut R, bidegree: (u32, u32), max_terms: usize) -> BiForm {
    let monos = bimonomials(bidegree.0, bidegree.1);
    let k = rng.gen_range(1..=max_terms.min(monos.len()));
    let terms = monos.choose_multiple(rng, k).map(|m| (*m, coeff(rng)));
    BiForm::from_terms(bidegree, terms).expect("bimonomials of the right bidegree")
}

pub fn point<R: Rng>(rng: &mut R) -> Point {
    loop {
        if let Ok(p) = Point::new([coeff(rng), coeff(rng), coeff(rng)]) {
            return p;
        }
    }
}

pub fn independent_linear_pair<R: Rng>(rng: &mut R) -> (Form, Form) {
    loop {
        let z1 = form(rng, 1);
        let z2 = form(rng, 1);
        if linearly_independent(&z1, &z2) {
            return (z1, z2);
        }
    }
}

/// Subtracts `f(p) w^deg` where `w` is the pivot coordinate of `p`, so that the
/// result vanishes at `p`.
fn project_through(f: &Form, p: &Point) -> Form {
    let v = f.eval(p.coords());
    f - &pivot_power(p, f.degree()).scale(&v)
}

/// A pair `(C, p)` with `p` on `C`.
pub fn pair<R: Rng>(rng: &mut R, d: u32) -> CurvePointPair {
    loop {
        let p = point(rng);
        let f = project_through(&form(rng, d), &p);
        if let Ok(c) = Curve::new(f) {
            return CurvePointPair::new(c, p).expect("projected form vanishes at p");
        }
    }
}

fn matrix_from<R: Rng>(
    rng: &mut R,
    d: u32,
    mut linear: impl FnMut(&mut R) -> (Form, Form),
    project: bool,
) -> MatrixA {
    loop {
        let (z1, z2) = linear(rng);
        let mut q1 = form(rng, d - 1);
        let mut q2 = form(rng, d - 1);
        if project {
            let p = crate::plane::common_zero(&z1, &z2).expect("independent forms");
            q1 = project_through(&q1, &p);
            q2 = project_through(&q2, &p);
        }
        if let Ok(a) = MatrixA::new(d, z1, z2, q1, q2) {
            return a;
        }
    }
}

/// A random element of `X`.
pub fn matrix_x<R: Rng>(rng: &mut R, d: u32) -> MatrixA {
    matrix_from(rng, d, independent_linear_pair, false)
}

/// A random element of `X'`: both `q_k` are pushed through the common zero of
/// `z1, z2`.
pub fn matrix_xprime<R: Rng>(rng: &mut R, d: u32) -> MatrixA {
    matrix_from(rng, d, independent_linear_pair, true)
}

/// A random element of `X'` with `z1 = x1`, `z2 = x2`.
pub fn normalized_xprime<R: Rng>(rng: &mut R, d: u32) -> MatrixA {
    matrix_from(rng, d, |_| (Form::var(1), Form::var(2)), true)
}

pub fn group_element<R: Rng>(rng: &mut R, d: u32) -> GroupElement {
    loop {
        let g = [[coeff(rng), coeff(rng)], [coeff(rng), coeff(rng)]];
        let h_q = form(rng, d - 2);
        if let Ok(e) = GroupElement::new(g, nonzero_coeff(rng), nonzero_coeff(rng), h_q) {
            return e;
        }
    }
}

/// An arbitrary vector of `T_A X`.
pub fn vector<R: Rng>(rng: &mut R, d: u32) -> TangentVector {
    let v: Vec<Scalar> = (0..coordinate_count(d)).map(|_| coeff(rng)).collect();
    TangentVector::from_coordinates(d, &v)
}

/// A random combination of a kernel basis of the Jacobian, so a vector of
/// `T_A X'` obtained without the tangent equations.
pub fn jacobian_tangent<R: Rng>(rng: &mut R, a: &MatrixA) -> Result<TangentVector> {
    let basis = jacobian(a)?.nullspace();
    let mut v = vec![Scalar::zero(); coordinate_count(a.d())];
    for b in &basis {
        let c = coeff(rng);
        if c.is_zero() {
            continue;
        }
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi += &c * bi;
        }
    }
    Ok(TangentVector::from_coordinates(a.d(), &v))
}

/// A vector of `T_A X'` at a normalized `a`, made by solving the tangent
/// equations for `xi00`, `eta00`.
pub fn chart_tangent<R: Rng>(rng: &mut R, a: &MatrixA) -> TangentVector {
    let d = a.d();
    let mut v: Vec<Scalar> = (0..coordinate_count(d)).map(|_| coeff(rng)).collect();
    let [a10, a01, b10, b01] = chart_coefficients(a);
    let n = monomials(d - 1).len();
    let (xi0, eta0) = (v[0].clone(), v[3].clone());
    v[6] = &a10 * &xi0 + &a01 * &eta0;
    v[6 + n] = &b10 * &xi0 + &b01 * &eta0;
    TangentVector::from_coordinates(d, &v)
}

/// A vector at a normalized `a` with nonzero residue.
pub fn normal_vector<R: Rng>(rng: &mut R, a: &MatrixA) -> Result<TangentVector> {
    loop {
        let b = vector(rng, a.d());
        let (r1, r2) = residue(a, &b)?;
        if !(r1.is_zero() && r2.is_zero()) {
            return Ok(b);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InstanceKind {
    X,
    Xprime,
    #[serde(rename = "tangent")]
    Tangent,
    #[serde(rename = "normal")]
    Normal,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 4] = [
        InstanceKind::X,
        InstanceKind::Xprime,
        InstanceKind::Tangent,
        InstanceKind::Normal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::X => "X",
            InstanceKind::Xprime => "Xprime",
            InstanceKind::Tangent => "tangent",
            InstanceKind::Normal => "normal",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        InstanceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown instance kind `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Instance {
    Matrix(MatrixA),
    WithVector {
        matrix: MatrixA,
        vector: TangentVector,
    },
}

/// `n` instances of the given kind. Tangent and normal instances sit at a
/// normalized matrix of `X'`; tangent vectors come from the Jacobian kernel.
pub fn random_instances(kind: InstanceKind, d: u32, seed: u64, n: usize) -> Result<Vec<Instance>> {
    crate::plane::check_degree(i64::from(d))?;
    (0..n as u64)
        .map(|i| {
            let mut rng = rng_for(seed, i);
            Ok(match kind {
                InstanceKind::X => Instance::Matrix(matrix_x(&mut rng, d)),
                InstanceKind::Xprime => Instance::Matrix(matrix_xprime(&mut rng, d)),
                InstanceKind::Tangent => {
                    let matrix = normalized_xprime(&mut rng, d);
                    let vector = jacobian_tangent(&mut rng, &matrix)?;
                    Instance::WithVector { matrix, vector }
                }
                InstanceKind::Normal => {
                    let matrix = normalized_xprime(&mut rng, d);
                    let vector = normal_vector(&mut rng, &matrix)?;
                    Instance::WithVector { matrix, vector }
                }
            })
        })
        .collect()
}

/// `det A` as a curve, for matrices whose determinant is nonzero.
pub fn det_curve(a: &MatrixA) -> Curve {
    Curve::new(det_of(a)).expect("matrices of X have nonzero determinant")
}
