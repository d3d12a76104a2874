//! The parameter space `X` of matrices
//!
//! ```text
//!     A = ( z1  q1 )      2 O(-d+1) --A--> O(-d+2) + O
//!         ( z2  q2 )
//! ```
//!
//! with independent linear forms `z1, z2` and nonzero determinant, the
//! quotient map `nu: X -> M`, the action of `G = GL2 x Aut(O(-d+2) + O)`
//! by two-sided multiplication, a section of `nu`, the decision procedure for
//! "same fibre", and the numerical invariants of the sheaves these matrices
//! resolve.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::scalar::{self, Scalar};
use crate::exactalg::{monomial_count, monomials, Form, Matrix};
use crate::plane::{check_degree, common_zero, linearly_independent, Curve, CurvePointPair};

/// An element of `X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatrixData", into = "MatrixData")]
pub struct MatrixA {
    d: u32,
    z1: Form,
    z2: Form,
    q1: Form,
    q2: Form,
}

/// The raw four-entry shape shared by matrices and tangent vectors, before
/// any invariant is checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixData {
    pub d: u32,
    pub z1: Form,
    pub z2: Form,
    pub q1: Form,
    pub q2: Form,
}

impl MatrixData {
    pub(crate) fn check_degrees(&self) -> Result<()> {
        check_degree(i64::from(self.d))?;
        if self.z1.degree() != 1 || self.z2.degree() != 1 {
            return Err(Error::DegreeMismatch("z1 and z2 must be linear".into()));
        }
        if self.q1.degree() != self.d - 1 || self.q2.degree() != self.d - 1 {
            return Err(Error::DegreeMismatch(format!(
                "q1 and q2 must have degree {}",
                self.d - 1
            )));
        }
        Ok(())
    }
}

impl MatrixA {
    pub fn new(d: u32, z1: Form, z2: Form, q1: Form, q2: Form) -> Result<Self> {
        MatrixA::try_from(MatrixData { d, z1, z2, q1, q2 })
    }

    /// `d` is read off the degree of the right column.
    pub fn from_entries(z1: Form, z2: Form, q1: Form, q2: Form) -> Result<Self> {
        let d = q1.degree().max(q2.degree()) + 1;
        MatrixA::new(d, z1, z2, q1, q2)
    }

    pub(crate) fn new_unchecked(d: u32, z1: Form, z2: Form, q1: Form, q2: Form) -> Self {
        let a = MatrixA { d, z1, z2, q1, q2 };
        debug_assert!(MatrixA::try_from(MatrixData::from(a.clone())).is_ok());
        a
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn z1(&self) -> &Form {
        &self.z1
    }

    pub fn z2(&self) -> &Form {
        &self.z2
    }

    pub fn q1(&self) -> &Form {
        &self.q1
    }

    pub fn q2(&self) -> &Form {
        &self.q2
    }

    pub fn z_column(&self) -> [&Form; 2] {
        [&self.z1, &self.z2]
    }

    pub fn q_column(&self) -> [&Form; 2] {
        [&self.q1, &self.q2]
    }

    /// Coordinates `(a0, a1, a2, b0, b1, b2, A_ij..., B_ij...)` with the
    /// `A_ij`, `B_ij` in graded-lex monomial order.
    pub fn coordinates(&self) -> Vec<Scalar> {
        entry_coordinates(&self.z1, &self.z2, &self.q1, &self.q2)
    }
}

pub(crate) fn entry_coordinates(z1: &Form, z2: &Form, q1: &Form, q2: &Form) -> Vec<Scalar> {
    let mut v = Vec::new();
    v.extend(z1.linear_coefficients());
    v.extend(z2.linear_coefficients());
    v.extend(q1.coefficients());
    v.extend(q2.coefficients());
    v
}

pub(crate) fn entries_from_coordinates(d: u32, coords: &[Scalar]) -> [Form; 4] {
    let n = monomial_count(d - 1);
    assert_eq!(coords.len(), 6 + 2 * n, "wrong number of coordinates");
    [
        Form::linear(&[coords[0].clone(), coords[1].clone(), coords[2].clone()]),
        Form::linear(&[coords[3].clone(), coords[4].clone(), coords[5].clone()]),
        Form::from_coefficients(d - 1, &coords[6..6 + n]),
        Form::from_coefficients(d - 1, &coords[6 + n..]),
    ]
}

/// Number of coordinates of the affine space containing `X`.
pub fn coordinate_count(d: u32) -> usize {
    6 + 2 * monomial_count(d - 1)
}

impl From<MatrixA> for MatrixData {
    fn from(a: MatrixA) -> Self {
        MatrixData {
            d: a.d,
            z1: a.z1,
            z2: a.z2,
            q1: a.q1,
            q2: a.q2,
        }
    }
}

impl TryFrom<MatrixData> for MatrixA {
    type Error = Error;
    fn try_from(m: MatrixData) -> Result<MatrixA> {
        m.check_degrees()?;
        if !linearly_independent(&m.z1, &m.z2) {
            return Err(Error::DependentLinearForms);
        }
        let det = &m.z1 * &m.q2 - &m.z2 * &m.q1;
        if det.is_zero() {
            return Err(Error::InvalidMatrix("determinant is zero".into()));
        }
        Ok(MatrixA {
            d: m.d,
            z1: m.z1,
            z2: m.z2,
            q1: m.q1,
            q2: m.q2,
        })
    }
}

/// `(g, h)` with `g` in `GL2` and `h = (lambda q; 0 mu)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupElementJson", into = "GroupElementJson")]
pub struct GroupElement {
    g: [[Scalar; 2]; 2],
    h_lambda: Scalar,
    h_mu: Scalar,
    h_q: Form,
}

impl GroupElement {
    pub fn new(g: [[Scalar; 2]; 2], h_lambda: Scalar, h_mu: Scalar, h_q: Form) -> Result<Self> {
        let det = &g[0][0] * &g[1][1] - &g[0][1] * &g[1][0];
        if det.is_zero() {
            return Err(Error::InvalidGroupElement("g is not invertible".into()));
        }
        if h_lambda.is_zero() || h_mu.is_zero() {
            return Err(Error::InvalidGroupElement("h is not invertible".into()));
        }
        Ok(GroupElement {
            g,
            h_lambda,
            h_mu,
            h_q,
        })
    }

    pub fn identity(d: u32) -> Self {
        GroupElement::scalar(d, Scalar::one())
    }

    /// `(lambda I, lambda I)`, the stabilizer of every matrix.
    pub fn scalar(d: u32, lambda: Scalar) -> Self {
        let z = Scalar::zero();
        GroupElement {
            g: [[lambda.clone(), z.clone()], [z, lambda.clone()]],
            h_lambda: lambda.clone(),
            h_mu: lambda,
            h_q: Form::zero(d - 2),
        }
    }

    /// `(g, identity)`.
    pub fn left(d: u32, g: [[Scalar; 2]; 2]) -> Result<Self> {
        GroupElement::new(g, Scalar::one(), Scalar::one(), Form::zero(d - 2))
    }

    pub fn g(&self) -> &[[Scalar; 2]; 2] {
        &self.g
    }

    pub fn h_lambda(&self) -> &Scalar {
        &self.h_lambda
    }

    pub fn h_mu(&self) -> &Scalar {
        &self.h_mu
    }

    pub fn h_q(&self) -> &Form {
        &self.h_q
    }

    pub fn is_identity(&self) -> bool {
        self.g
            == [
                [Scalar::one(), Scalar::zero()],
                [Scalar::zero(), Scalar::one()],
            ]
            && self.h_lambda.is_one()
            && self.h_mu.is_one()
            && self.h_q.is_zero()
    }
}

#[derive(Serialize, Deserialize)]
struct GroupElementJson {
    g: [[String; 2]; 2],
    lambda: String,
    mu: String,
    q: Form,
}

impl From<GroupElement> for GroupElementJson {
    fn from(e: GroupElement) -> Self {
        GroupElementJson {
            g: e.g.each_ref().map(|r| r.each_ref().map(scalar::to_string)),
            lambda: scalar::to_string(&e.h_lambda),
            mu: scalar::to_string(&e.h_mu),
            q: e.h_q,
        }
    }
}

impl TryFrom<GroupElementJson> for GroupElement {
    type Error = Error;
    fn try_from(j: GroupElementJson) -> Result<GroupElement> {
        let parse_row = |r: &[String; 2]| -> Result<[Scalar; 2]> {
            Ok([scalar::parse(&r[0])?, scalar::parse(&r[1])?])
        };
        let g = [parse_row(&j.g[0])?, parse_row(&j.g[1])?];
        GroupElement::new(g, scalar::parse(&j.lambda)?, scalar::parse(&j.mu)?, j.q)
    }
}

pub fn det_of(a: &MatrixA) -> Form {
    &a.z1 * &a.q2 - &a.z2 * &a.q1
}

/// `A -> (<det A>, z1 ^ z2)`.
pub fn nu(a: &MatrixA) -> CurvePointPair {
    let curve = Curve::new(det_of(a)).expect("det of a matrix in X is a nonzero form of degree d");
    let point = common_zero(&a.z1, &a.z2).expect("z1 and z2 are independent in X");
    CurvePointPair::new(curve, point).expect("the common zero of z1 and z2 lies on det A")
}

/// Right multiplication `A -> A h` by `h = (lambda q; 0 mu)`.
fn times_h(a: &MatrixA, lambda: &Scalar, mu: &Scalar, q: &Form) -> [Form; 4] {
    [
        a.z1.scale(lambda),
        a.z2.scale(lambda),
        &a.z1 * q + a.q1.scale(mu),
        &a.z2 * q + a.q2.scale(mu),
    ]
}

/// The action `(g, h) . A = g A h^-1`, under which `(lambda I, lambda I)`
/// fixes every matrix.
pub fn act(e: &GroupElement, a: &MatrixA) -> MatrixA {
    assert!(
        e.h_q.degree() == a.d - 2,
        "group element of degree {} acting on degree {}",
        e.h_q.degree() + 2,
        a.d
    );
    // (lambda q; 0 mu)^-1 = (1/lambda, -q/(lambda mu); 0, 1/mu)
    let lambda_inv = e.h_lambda.recip();
    let mu_inv = e.h_mu.recip();
    let q_inv = e.h_q.scale(&-(&lambda_inv * &mu_inv));
    let [z1, z2, q1, q2] = times_h(a, &lambda_inv, &mu_inv, &q_inv);
    let combine = |f: &Form, g: &Form, k: usize| f.scale(&e.g[k][0]) + g.scale(&e.g[k][1]);
    MatrixA::new_unchecked(
        a.d,
        combine(&z1, &z2, 0),
        combine(&z1, &z2, 1),
        combine(&q1, &q2, 0),
        combine(&q1, &q2, 1),
    )
}

/// Two-sided multiplication `A -> g A h`.
pub fn multiply(
    g: &[[Scalar; 2]; 2],
    a: &MatrixA,
    lambda: &Scalar,
    mu: &Scalar,
    q: &Form,
) -> Result<MatrixA> {
    let [z1, z2, q1, q2] = times_h(a, lambda, mu, q);
    let combine = |f: &Form, h: &Form, k: usize| f.scale(&g[k][0]) + h.scale(&g[k][1]);
    MatrixA::new(
        a.d,
        combine(&z1, &z2, 0),
        combine(&z1, &z2, 1),
        combine(&q1, &q2, 0),
        combine(&q1, &q2, 1),
    )
}

/// A preimage of `(C, p)` under `nu`.
///
/// Works in the chart of the first nonzero coordinate `x_c` of `p`, with the
/// other two coordinates `x_a, x_b` (in index order). After the shift
/// `y1 = x_a - p_a x_c`, `y2 = x_b - p_b x_c`, the monomials of `f` divisible
/// by `y1` make up `y1 G` and the rest make up `y2 H`, giving
/// `A = (y1 -H; y2 G)` with `det A = f`.
pub fn local_section(pair: &CurvePointPair) -> Result<MatrixA> {
    let f = pair.curve().equation();
    let p = pair.point();
    let d = f.degree();
    let c = p.pivot();
    let (ia, ib) = match c {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let xi = p.coords()[ia].clone();
    let eta = p.coords()[ib].clone();

    let shift = |sign: i64| {
        let mut images = [Form::var(0), Form::var(1), Form::var(2)];
        images[ia] = &Form::var(ia) + &Form::var(c).scale(&(&xi * scalar::int(sign)));
        images[ib] = &Form::var(ib) + &Form::var(c).scale(&(&eta * scalar::int(sign)));
        images
    };

    let shifted = f.substitute(&shift(1));
    let mut g_terms = Vec::new();
    let mut h_terms = Vec::new();
    for (e, coeff) in shifted.terms() {
        let mut e = *e;
        if e[ia] > 0 {
            e[ia] -= 1;
            g_terms.push((e, coeff.clone()));
        } else if e[ib] > 0 {
            e[ib] -= 1;
            h_terms.push((e, coeff.clone()));
        } else {
            return Err(Error::PointNotOnCurve);
        }
    }
    let back = shift(-1);
    let g = Form::from_terms(d - 1, g_terms)?.substitute(&back);
    let h = Form::from_terms(d - 1, h_terms)?.substitute(&back);
    MatrixA::new(d, back[ia].clone(), back[ib].clone(), -h, g)
}

/// A group element carrying `a1` to `a2`, when the two lie in one fibre of `nu`.
///
/// First `g` sends the `z`-column of `a1` to that of `a2`; then the
/// determinants agree up to `xi`, and the second column is multiplied by
/// `1/xi`; finally `q` is the unique form with `q' - g q / xi = q z`. The
/// resulting `g a1 (1 q; 0 1/xi) = a2` is returned as the group element
/// `(g, (1 q; 0 1/xi)^-1)`.
pub fn same_fiber(a1: &MatrixA, a2: &MatrixA) -> Option<GroupElement> {
    if a1.d != a2.d || nu(a1) != nu(a2) {
        return None;
    }
    let d = a1.d;
    let basis = Matrix::from_columns(&[
        a1.z1.linear_coefficients().to_vec(),
        a1.z2.linear_coefficients().to_vec(),
    ]);
    let row1 = basis.solve(&a2.z1.linear_coefficients())?;
    let row2 = basis.solve(&a2.z2.linear_coefficients())?;
    let g = [
        [row1[0].clone(), row1[1].clone()],
        [row2[0].clone(), row2[1].clone()],
    ];
    let moved = act(&GroupElement::left(d, g.clone()).ok()?, a1);

    let det_moved = det_of(&moved);
    let det_target = det_of(a2);
    let (_, lc_moved) = det_moved.leading_term()?;
    let (_, lc_target) = det_target.leading_term()?;
    let xi = lc_moved / lc_target;
    if det_moved != det_target.scale(&xi) {
        return None;
    }
    let mu = xi.recip();

    let rhs1 = &a2.q1 - &moved.q1.scale(&mu);
    let rhs2 = &a2.q2 - &moved.q2.scale(&mu);
    let q = solve_linear_multiple(d - 2, [&moved.z1, &moved.z2], [&rhs1, &rhs2])?;

    // g a1 (1 q; 0 mu) = a2, and act uses the inverse of h
    let e = GroupElement::new(g, Scalar::one(), xi.clone(), q.scale(&-&xi)).ok()?;
    if act(&e, a1) == *a2 {
        Some(e)
    } else {
        None
    }
}

/// The form `q` of the given degree with `z_k q = rhs_k` for both `k`, found by
/// solving the linear system on coefficients.
fn solve_linear_multiple(degree: u32, z: [&Form; 2], rhs: [&Form; 2]) -> Option<Form> {
    let columns: Vec<Vec<Scalar>> = monomials(degree)
        .into_iter()
        .map(|m| {
            let mono = Form::monomial(m, Scalar::one());
            let mut col = (z[0] * &mono).coefficients();
            col.extend((z[1] * &mono).coefficients());
            col
        })
        .collect();
    let system = Matrix::from_columns(&columns);
    let mut target = rhs[0].coefficients();
    target.extend(rhs[1].coefficients());
    let sol = system.solve(&target)?;
    Some(Form::from_coefficients(degree, &sol))
}

/// The linear system `g A = A h` for `(g, h)` with `h = (lambda q; 0 mu)`,
/// with unknowns ordered `(g00, g01, g10, g11, lambda, mu, q...)`.
pub fn stabilizer_equations(a: &MatrixA) -> Matrix {
    let d = a.d;
    let nq = monomial_count(d - 2);
    let unknowns = 6 + nq;
    let columns: Vec<Vec<Scalar>> = (0..unknowns)
        .map(|k| {
            let mut v = vec![Scalar::zero(); unknowns];
            v[k] = Scalar::one();
            stabilizer_residual(a, &v)
        })
        .collect();
    Matrix::from_columns(&columns)
}

fn stabilizer_residual(a: &MatrixA, v: &[Scalar]) -> Vec<Scalar> {
    let d = a.d;
    let g = [[&v[0], &v[1]], [&v[2], &v[3]]];
    let (lambda, mu) = (&v[4], &v[5]);
    let q = Form::from_coefficients(d - 2, &v[6..]);
    let z = [&a.z1, &a.z2];
    let qs = [&a.q1, &a.q2];
    let mut out = Vec::new();
    for k in 0..2 {
        let gz = z[0].scale(g[k][0]) + z[1].scale(g[k][1]);
        let left = &gz - &z[k].scale(lambda);
        out.extend(left.coefficients());
        let gq = qs[0].scale(g[k][0]) + qs[1].scale(g[k][1]);
        let right = &gq - &(z[k] * &q + qs[k].scale(mu));
        out.extend(right.coefficients());
    }
    out
}

/// A basis for the solutions of `g A = A h`.
pub fn stabilizer_kernel(a: &MatrixA) -> Vec<Vec<Scalar>> {
    stabilizer_equations(a).nullspace()
}

/// The unknown vector of `(I, I)` in the order of [`stabilizer_equations`].
pub fn scalar_stabilizer_vector(d: u32) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); 6 + monomial_count(d - 2)];
    for k in [0, 3, 4, 5] {
        v[k] = Scalar::one();
    }
    v
}

/// `a m + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertPoly {
    pub a: i64,
    pub b: i64,
}

/// `m -> chi(O(k)(m))` as coefficients `[m^0, m^1, m^2]`.
fn euler_characteristic_line_bundle(k: i64) -> [Scalar; 3] {
    // (m + k + 2)(m + k + 1) / 2
    let half = scalar::ratio(1, 2);
    [
        scalar::int((k + 2) * (k + 1)) * &half,
        scalar::int(2 * k + 3) * &half,
        half,
    ]
}

/// Hilbert polynomial of the cokernel of `2 O(-d+1) -> O(-d+2) + O`, computed
/// as `chi(O(-d+2)) + chi(O) - 2 chi(O(-d+1))`.
pub fn hilbert_from_resolution(d: i64) -> Result<HilbertPoly> {
    check_degree(d)?;
    let plus_a = euler_characteristic_line_bundle(-d + 2);
    let plus_b = euler_characteristic_line_bundle(0);
    let minus = euler_characteristic_line_bundle(-d + 1);
    let coeff = |i: usize| &plus_a[i] + &plus_b[i] - &minus[i] * scalar::int(2);
    let (c0, c1, c2) = (coeff(0), coeff(1), coeff(2));
    if !c2.is_zero() || !scalar::is_integer_valued(&c0) || !scalar::is_integer_valued(&c1) {
        return Err(Error::VerificationFailed(format!(
            "Hilbert polynomial {c2} m^2 + {c1} m + {c0} is not of the form a m + b"
        )));
    }
    let to_i64 = |s: &Scalar| -> i64 { s.numer().try_into().expect("small integers") };
    Ok(HilbertPoly {
        a: to_i64(&c1),
        b: to_i64(&c0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    #[serde(rename = "dim_X")]
    pub dim_x: u64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "dim_M")]
    pub dim_m: u64,
    pub codim_simpson: u64,
    #[serde(rename = "codim_Xprime")]
    pub codim_x_prime: u64,
    #[serde(rename = "codim_Mprime")]
    pub codim_m_prime: u64,
}

pub fn dimension_report(d: i64) -> Result<DimensionReport> {
    check_degree(d)?;
    let du = d as u32;
    let dim_x = coordinate_count(du) as u64;
    let n = monomial_count(du) as u64 - 1;
    let d = d as u64;
    Ok(DimensionReport {
        dim_x,
        n,
        dim_m: n + 1,
        codim_simpson: d * (d - 3) / 2,
        codim_x_prime: 2,
        codim_m_prime: 2,
    })
}

/// `1 < s d / 2 + d h0Q / (d - s)`, compared exactly.
pub fn stability_inequality(d: i64, s: i64, h0q: i64) -> Result<bool> {
    check_degree(d)?;
    if !(1 <= s && s < d) {
        return Err(Error::Domain(format!(
            "need 1 <= s < d, got s = {s}, d = {d}"
        )));
    }
    if h0q < 0 {
        return Err(Error::Domain(format!(
            "h0(Q) must be nonnegative, got {h0q}"
        )));
    }
    let rhs = scalar::ratio(s * d, 2) + scalar::ratio(d * h0q, d - s);
    Ok(scalar::one() < rhs)
}
