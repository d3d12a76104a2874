//! Projective points, plane curves and the universal curve `M = {(C, p) | p in C}`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::scalar::{self, Scalar};
use crate::exactalg::Form;

/// A point of `P2`, scaled so its first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[String; 3]", into = "[String; 3]")]
pub struct Point {
    coords: [Scalar; 3],
}

impl Point {
    pub fn new(coords: [Scalar; 3]) -> Result<Self> {
        let Some(lead) = coords.iter().find(|c| !c.is_zero()).cloned() else {
            return Err(Error::ZeroPoint);
        };
        let inv = lead.recip();
        Ok(Point {
            coords: coords.map(|c| c * &inv),
        })
    }

    pub fn from_ints(coords: [i64; 3]) -> Result<Self> {
        Point::new(coords.map(scalar::int))
    }

    pub fn coords(&self) -> &[Scalar; 3] {
        &self.coords
    }

    /// Index of the first nonzero coordinate, which equals 1.
    pub fn pivot(&self) -> usize {
        self.coords
            .iter()
            .position(|c| !c.is_zero())
            .expect("points are nonzero")
    }
}

impl From<Point> for [String; 3] {
    fn from(p: Point) -> Self {
        p.coords.each_ref().map(scalar::to_string)
    }
}

impl TryFrom<[String; 3]> for Point {
    type Error = Error;
    fn try_from(v: [String; 3]) -> Result<Point> {
        Point::new([
            scalar::parse(&v[0])?,
            scalar::parse(&v[1])?,
            scalar::parse(&v[2])?,
        ])
    }
}

/// A plane curve of degree at least 3, identified with its equation up to a
/// nonzero scalar. Stored with graded-lex leading coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CurveJson", into = "CurveJson")]
pub struct Curve {
    f: Form,
}

impl Curve {
    pub fn new(f: Form) -> Result<Self> {
        check_degree(i64::from(f.degree()))?;
        if f.is_zero() {
            return Err(Error::Domain(
                "the zero form does not define a curve".into(),
            ));
        }
        Ok(Curve { f: f.monic() })
    }

    pub fn equation(&self) -> &Form {
        &self.f
    }

    pub fn degree(&self) -> u32 {
        self.f.degree()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.f.eval(p.coords()).is_zero()
    }
}

pub(crate) fn check_degree(d: i64) -> Result<()> {
    if d < 3 {
        Err(Error::DegreeTooSmall(d))
    } else {
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    f: Form,
}

impl From<Curve> for CurveJson {
    fn from(c: Curve) -> Self {
        CurveJson { f: c.f }
    }
}

impl TryFrom<CurveJson> for Curve {
    type Error = Error;
    fn try_from(j: CurveJson) -> Result<Curve> {
        Curve::new(j.f)
    }
}

/// A point of the universal curve: a curve together with a point on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PairJson", into = "PairJson")]
pub struct CurvePointPair {
    curve: Curve,
    point: Point,
}

impl CurvePointPair {
    pub fn new(curve: Curve, point: Point) -> Result<Self> {
        if !curve.contains(&point) {
            return Err(Error::PointNotOnCurve);
        }
        Ok(CurvePointPair { curve, point })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn degree(&self) -> u32 {
        self.curve.degree()
    }
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    curve: Form,
    point: Point,
}

impl From<CurvePointPair> for PairJson {
    fn from(p: CurvePointPair) -> Self {
        PairJson {
            curve: p.curve.f,
            point: p.point,
        }
    }
}

impl TryFrom<PairJson> for CurvePointPair {
    type Error = Error;
    fn try_from(j: PairJson) -> Result<CurvePointPair> {
        CurvePointPair::new(Curve::new(j.curve)?, j.point)
    }
}

/// The signed 2x2 minors `(d0, d1, d2)` of the coefficient matrix of two
/// linear forms, i.e. their cross product. Not normalized.
pub fn minors(z1: &Form, z2: &Form) -> [Scalar; 3] {
    let a = z1.linear_coefficients();
    let b = z2.linear_coefficients();
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn linearly_independent(z1: &Form, z2: &Form) -> bool {
    minors(z1, z2).iter().any(|m| !m.is_zero())
}

/// The common zero of two independent linear forms.
pub fn common_zero(z1: &Form, z2: &Form) -> Result<Point> {
    if z1.degree() != 1 || z2.degree() != 1 {
        return Err(Error::DegreeMismatch(
            "common_zero needs linear forms".into(),
        ));
    }
    Point::new(minors(z1, z2)).map_err(|_| Error::DependentLinearForms)
}

/// Whether every partial derivative of the equation vanishes at `p`.
pub fn is_singular_point(curve: &Curve, p: &Point) -> Result<bool> {
    if !curve.contains(p) {
        return Err(Error::PointNotOnCurve);
    }
    Ok(curve
        .equation()
        .gradient()
        .iter()
        .all(|g| g.eval(p.coords()).is_zero()))
}

pub fn make_pair(f: Form, p: [Scalar; 3]) -> Result<CurvePointPair> {
    let curve = Curve::new(f)?;
    let point = Point::new(p)?;
    CurvePointPair::new(curve, point)
}

/// `x_pivot^d`, the monomial used to push a form onto a point.
pub(crate) fn pivot_power(p: &Point, degree: u32) -> Form {
    let mut e = [0; 3];
    e[p.pivot()] = degree;
    Form::monomial(e, Scalar::one())
}
