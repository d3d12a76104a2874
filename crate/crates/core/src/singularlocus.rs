//! The closed subvariety `X'` of matrices whose cokernel is not locally free
//! on its support.
//!
//! With `(d0, d1, d2)` the signed minors of the coefficient matrix of
//! `z1, z2`, membership is `f1 = q1(d0, d1, d2) = 0` and `f2 = q2(d0, d1, d2) = 0`.
//! In the standard chart `z1 = x1`, `z2 = x2` the tangent space of `X'` is
//! cut out by
//!
//! ```text
//!     xi00  = A10 xi0 + A01 eta0
//!     eta00 = B10 xi0 + B01 eta0
//! ```
//!
//! where `A10`, `A01` (`B10`, `B01`) are the `x0^(d-2) x1`, `x0^(d-2) x2`
//! coefficients of `q1` (`q2`).

use std::ops::{Add, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::scalar::Scalar;
use crate::exactalg::{monomials, Form, Matrix};
use crate::fibration::{
    act, entries_from_coordinates, entry_coordinates, GroupElement, MatrixA, MatrixData,
};
use crate::plane::{common_zero, minors, Point};

/// A vector in `T_A X`: four forms of the same shape as a matrix in `X`, with
/// no invertibility constraint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatrixData", into = "MatrixData")]
pub struct TangentVector {
    d: u32,
    bz1: Form,
    bz2: Form,
    bq1: Form,
    bq2: Form,
}

impl TangentVector {
    pub fn new(d: u32, bz1: Form, bz2: Form, bq1: Form, bq2: Form) -> Result<Self> {
        TangentVector::try_from(MatrixData {
            d,
            z1: bz1,
            z2: bz2,
            q1: bq1,
            q2: bq2,
        })
    }

    pub fn zero(d: u32) -> Self {
        TangentVector {
            d,
            bz1: Form::zero(1),
            bz2: Form::zero(1),
            bq1: Form::zero(d - 1),
            bq2: Form::zero(d - 1),
        }
    }

    /// Inverse of [`TangentVector::coordinates`].
    pub fn from_coordinates(d: u32, coords: &[Scalar]) -> Self {
        let [bz1, bz2, bq1, bq2] = entries_from_coordinates(d, coords);
        TangentVector {
            d,
            bz1,
            bz2,
            bq1,
            bq2,
        }
    }

    /// Same ordering as [`MatrixA::coordinates`].
    pub fn coordinates(&self) -> Vec<Scalar> {
        entry_coordinates(&self.bz1, &self.bz2, &self.bq1, &self.bq2)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn bz1(&self) -> &Form {
        &self.bz1
    }

    pub fn bz2(&self) -> &Form {
        &self.bz2
    }

    pub fn bq1(&self) -> &Form {
        &self.bq1
    }

    pub fn bq2(&self) -> &Form {
        &self.bq2
    }

    /// `x0`-coefficient of the first linear entry.
    pub fn xi0(&self) -> Scalar {
        self.bz1.coeff(&[1, 0, 0])
    }

    /// `x0`-coefficient of the second linear entry.
    pub fn eta0(&self) -> Scalar {
        self.bz2.coeff(&[1, 0, 0])
    }

    /// `x0^(d-1)`-coefficient of the first right entry.
    pub fn xi00(&self) -> Scalar {
        self.bq1.coeff(&[self.d - 1, 0, 0])
    }

    /// `x0^(d-1)`-coefficient of the second right entry.
    pub fn eta00(&self) -> Scalar {
        self.bq2.coeff(&[self.d - 1, 0, 0])
    }

    pub fn scale(&self, c: &Scalar) -> TangentVector {
        TangentVector {
            d: self.d,
            bz1: self.bz1.scale(c),
            bz2: self.bz2.scale(c),
            bq1: self.bq1.scale(c),
            bq2: self.bq2.scale(c),
        }
    }

    pub fn is_zero(&self) -> bool {
        [&self.bz1, &self.bz2, &self.bq1, &self.bq2]
            .iter()
            .all(|f| f.is_zero())
    }
}

impl Add for &TangentVector {
    type Output = TangentVector;
    fn add(self, rhs: &TangentVector) -> TangentVector {
        TangentVector {
            d: self.d,
            bz1: &self.bz1 + &rhs.bz1,
            bz2: &self.bz2 + &rhs.bz2,
            bq1: &self.bq1 + &rhs.bq1,
            bq2: &self.bq2 + &rhs.bq2,
        }
    }
}

impl Sub for &TangentVector {
    type Output = TangentVector;
    fn sub(self, rhs: &TangentVector) -> TangentVector {
        self + &rhs.scale(&-Scalar::one())
    }
}

impl From<TangentVector> for MatrixData {
    fn from(t: TangentVector) -> Self {
        MatrixData {
            d: t.d,
            z1: t.bz1,
            z2: t.bz2,
            q1: t.bq1,
            q2: t.bq2,
        }
    }
}

impl TryFrom<MatrixData> for TangentVector {
    type Error = Error;
    fn try_from(m: MatrixData) -> Result<TangentVector> {
        m.check_degrees()?;
        Ok(TangentVector {
            d: m.d,
            bz1: m.z1,
            bz2: m.z2,
            bq1: m.q1,
            bq2: m.q2,
        })
    }
}

/// The values of the two defining equations of `X'` at a matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularEquations {
    #[serde(with = "crate::exactalg::scalar::serde_scalar")]
    pub f1: Scalar,
    #[serde(with = "crate::exactalg::scalar::serde_scalar")]
    pub f2: Scalar,
}

impl SingularEquations {
    pub fn vanish(&self) -> bool {
        self.f1.is_zero() && self.f2.is_zero()
    }
}

pub fn singular_equations(a: &MatrixA) -> SingularEquations {
    let m = minors(a.z1(), a.z2());
    SingularEquations {
        f1: a.q1().eval(&m),
        f2: a.q2().eval(&m),
    }
}

/// Whether `q1` and `q2` both vanish at the common zero of `z1` and `z2`.
pub fn is_singular_sheaf(a: &MatrixA) -> bool {
    let p = common_zero(a.z1(), a.z2()).expect("z1 and z2 are independent in X");
    a.q1().eval(p.coords()).is_zero() && a.q2().eval(p.coords()).is_zero()
}

/// Partials of the minors `(d0, d1, d2)` with respect to `(a0, a1, a2, b0, b1, b2)`.
fn minor_partials(a: &[Scalar; 3], b: &[Scalar; 3]) -> [[Scalar; 3]; 6] {
    let z = Scalar::zero;
    // d0 = a1 b2 - a2 b1, d1 = a2 b0 - a0 b2, d2 = a0 b1 - a1 b0
    [
        [z(), -b[2].clone(), b[1].clone()],
        [b[2].clone(), z(), -b[0].clone()],
        [-b[1].clone(), b[0].clone(), z()],
        [z(), a[2].clone(), -a[1].clone()],
        [-a[2].clone(), z(), a[0].clone()],
        [a[1].clone(), -a[0].clone(), z()],
    ]
}

/// The `2 x (d^2 + d + 6)` matrix of partials of `(f1, f2)` at `a`, columns in
/// the order of [`MatrixA::coordinates`].
pub fn jacobian(a: &MatrixA) -> Result<Matrix> {
    if !is_singular_sheaf(a) {
        return Err(Error::NotInSingularLocus);
    }
    Ok(equation_differentials(a))
}

/// The differentials of `f1`, `f2`, defined at every matrix of `X`.
pub fn equation_differentials(a: &MatrixA) -> Matrix {
    let d = a.d();
    let za = a.z1().linear_coefficients();
    let zb = a.z2().linear_coefficients();
    let m = minors(a.z1(), a.z2());
    let dm = minor_partials(&za, &zb);
    let monos = monomials(d - 1);
    let n = monos.len();
    let mut jac = Matrix::zeros(2, 6 + 2 * n);
    for (row, q) in a.q_column().into_iter().enumerate() {
        let grad: Vec<Scalar> = q.gradient().iter().map(|g| g.eval(&m)).collect();
        for (col, partials) in dm.iter().enumerate() {
            jac[(row, col)] = (0..3).map(|l| &grad[l] * &partials[l]).sum();
        }
        let offset = 6 + row * n;
        for (k, e) in monos.iter().enumerate() {
            jac[(row, offset + k)] = Form::monomial(*e, Scalar::one()).eval(&m);
        }
    }
    jac
}

/// Whether `b` lies in `T_A X'`.
pub fn tangent_contains(a: &MatrixA, b: &TangentVector) -> Result<bool> {
    check_same_degree(a, b)?;
    let jac = jacobian(a)?;
    Ok(jac.mul_vec(&b.coordinates()).iter().all(Zero::is_zero))
}

pub fn is_normalized(a: &MatrixA) -> bool {
    a.z1() == &Form::var(1) && a.z2() == &Form::var(2)
}

/// `(A10, A01, B10, B01)` of a matrix in standard form.
pub fn chart_coefficients(a: &MatrixA) -> [Scalar; 4] {
    let d = a.d();
    let e10 = [d - 2, 1, 0];
    let e01 = [d - 2, 0, 1];
    [
        a.q1().coeff(&e10),
        a.q1().coeff(&e01),
        a.q2().coeff(&e10),
        a.q2().coeff(&e01),
    ]
}

fn check_same_degree(a: &MatrixA, b: &TangentVector) -> Result<()> {
    if a.d() != b.d() {
        return Err(Error::DegreeMismatch(format!(
            "matrix of degree {} with tangent vector of degree {}",
            a.d(),
            b.d()
        )));
    }
    Ok(())
}

pub(crate) fn check_standard_singular(a: &MatrixA) -> Result<()> {
    if !is_normalized(a) {
        return Err(Error::NotNormalized);
    }
    if !is_singular_sheaf(a) {
        return Err(Error::NotInSingularLocus);
    }
    Ok(())
}

/// Defects of the two tangent equations:
/// `(xi00 - A10 xi0 - A01 eta0, eta00 - B10 xi0 - B01 eta0)`.
pub fn residue(a: &MatrixA, b: &TangentVector) -> Result<(Scalar, Scalar)> {
    check_same_degree(a, b)?;
    check_standard_singular(a)?;
    let [a10, a01, b10, b01] = chart_coefficients(a);
    let (xi0, eta0) = (b.xi0(), b.eta0());
    let r1 = b.xi00() - &a10 * &xi0 - &a01 * &eta0;
    let r2 = b.eta00() - &b10 * &xi0 - &b01 * &eta0;
    Ok((r1, r2))
}

/// A coordinate change and group element moving a matrix to standard form
/// `z1 = x1`, `z2 = x2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    /// Rows are the new coordinates `x0', x1', x2'` as functionals in `x`.
    pub coord_change: Matrix,
    pub group_part: GroupElement,
    pub result: MatrixA,
}

impl Normalization {
    fn substitution(&self) -> [[Scalar; 3]; 3] {
        let inv = self
            .coord_change
            .inverse()
            .expect("coordinate changes are invertible");
        std::array::from_fn(|i| std::array::from_fn(|j| inv[(i, j)].clone()))
    }

    /// Rewrites a form in the new coordinates.
    pub fn transform_form(&self, f: &Form) -> Form {
        if self.coord_change.is_identity() {
            f.clone()
        } else {
            f.linear_substitute(&self.substitution())
        }
    }

    pub fn transform_point(&self, p: &Point) -> Point {
        let v = self.coord_change.mul_vec(p.coords());
        Point::new([v[0].clone(), v[1].clone(), v[2].clone()]).expect("invertible image of a point")
    }

    /// Pushes a tangent vector at the input matrix to one at `result`, by the
    /// same linear map that carries the matrix.
    pub fn transform_tangent(&self, b: &TangentVector) -> TangentVector {
        let g = self.group_part.g();
        let entries = [
            self.transform_form(b.bz1()),
            self.transform_form(b.bz2()),
            self.transform_form(b.bq1()),
            self.transform_form(b.bq2()),
        ];
        let combine =
            |i: usize, j: usize, k: usize| entries[i].scale(&g[k][0]) + entries[j].scale(&g[k][1]);
        TangentVector {
            d: b.d(),
            bz1: combine(0, 1, 0),
            bz2: combine(0, 1, 1),
            bq1: combine(2, 3, 0),
            bq2: combine(2, 3, 1),
        }
    }
}

/// Moves `a` to the chart `p = (1:0:0)`, `z1 = x1`, `z2 = x2`.
///
/// When `z1, z2` already span `<x1, x2>` only `g` in `GL2` is used. Otherwise
/// the new coordinates are `x0' = x_c` (the first coordinate not vanishing at
/// `p`), `x1' = z1`, `x2' = z2`.
pub fn normalize(a: &MatrixA) -> Normalization {
    let d = a.d();
    let za = a.z1().linear_coefficients();
    let zb = a.z2().linear_coefficients();
    if za[0].is_zero() && zb[0].is_zero() {
        let c = Matrix::from_rows(vec![
            vec![za[1].clone(), za[2].clone()],
            vec![zb[1].clone(), zb[2].clone()],
        ]);
        let inv = c.inverse().expect("independent forms in <x1, x2>");
        let g = [
            [inv[(0, 0)].clone(), inv[(0, 1)].clone()],
            [inv[(1, 0)].clone(), inv[(1, 1)].clone()],
        ];
        let group_part = GroupElement::left(d, g).expect("inverse is invertible");
        let result = act(&group_part, a);
        return Normalization {
            coord_change: Matrix::identity(3),
            group_part,
            result,
        };
    }
    let p = common_zero(a.z1(), a.z2()).expect("independent forms");
    let mut pivot_row = vec![Scalar::zero(); 3];
    pivot_row[p.pivot()] = Scalar::one();
    let coord_change = Matrix::from_rows(vec![pivot_row, za.to_vec(), zb.to_vec()]);
    let mut n = Normalization {
        coord_change,
        group_part: GroupElement::identity(d),
        result: a.clone(),
    };
    let entries = [a.z1(), a.z2(), a.q1(), a.q2()].map(|f| n.transform_form(f));
    let [z1, z2, q1, q2] = entries;
    n.result = MatrixA::new(d, z1, z2, q1, q2).expect("coordinate change preserves X");
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::int;
    use crate::fibration::{det_of, nu};
    use crate::plane::{is_singular_point, Curve};

    fn x(i: usize) -> Form {
        Form::var(i)
    }

    fn running_example() -> MatrixA {
        MatrixA::from_entries(x(1), x(2), &x(0) * &x(1), x(2).pow(2)).unwrap()
    }

    fn vector(d: u32, f: impl FnOnce(&mut [Scalar])) -> TangentVector {
        let mut v = vec![Scalar::zero(); crate::fibration::coordinate_count(d)];
        f(&mut v);
        TangentVector::from_coordinates(d, &v)
    }

    /// `xi0 = 1`, others zero.
    fn b_xi0() -> TangentVector {
        vector(3, |v| v[0] = int(1))
    }

    /// `xi00 = 1`, others zero; index 6 is the `x0^2` coefficient of `bq1`.
    fn b_xi00() -> TangentVector {
        vector(3, |v| v[6] = int(1))
    }

    /// `eta00 = 1`; index 12 is the `x0^2` coefficient of `bq2`.
    fn b_eta00() -> TangentVector {
        vector(3, |v| v[12] = int(1))
    }

    #[test]
    fn named_coordinates() {
        assert_eq!(b_xi0().xi0(), int(1));
        assert_eq!(b_xi00().xi00(), int(1));
        assert_eq!(b_eta00().eta00(), int(1));
    }

    #[test]
    fn membership_examples() {
        assert!(is_singular_sheaf(&running_example()));
        let off = MatrixA::from_entries(x(1), x(2), x(0).pow(2), x(2).pow(2)).unwrap();
        assert!(!is_singular_sheaf(&off));
        let product = MatrixA::from_entries(x(1), x(2), Form::zero(2), &x(0) * &x(2)).unwrap();
        assert!(is_singular_sheaf(&product));
        assert!(singular_equations(&product).vanish());
        assert_eq!(singular_equations(&off).f1, int(1));
    }

    #[test]
    fn agreement_with_singular_points() {
        let a = running_example();
        let pair = nu(&a);
        assert!(is_singular_point(pair.curve(), pair.point()).unwrap());
        let off = MatrixA::from_entries(x(1), x(2), x(0).pow(2), x(2).pow(2)).unwrap();
        let c = Curve::new(det_of(&off)).unwrap();
        assert!(!is_singular_point(&c, nu(&off).point()).unwrap());
    }

    #[test]
    fn jacobian_rank_and_value() {
        let a = running_example();
        let j = jacobian(&a).unwrap();
        assert_eq!((j.rows(), j.cols()), (2, 18));
        assert_eq!(j.rank(), 2);
        // at the standard chart the differential is exactly the residue
        assert_eq!(j.mul_vec(&b_xi0().coordinates()), vec![int(-1), int(0)]);
    }

    #[test]
    fn jacobian_requires_singular_locus() {
        let off = MatrixA::from_entries(x(1), x(2), x(0).pow(2), x(2).pow(2)).unwrap();
        assert_eq!(jacobian(&off).unwrap_err(), Error::NotInSingularLocus);
    }

    #[test]
    fn tangent_examples() {
        let a = running_example();
        let both = &b_xi0() + &b_xi00();
        assert!(tangent_contains(&a, &both).unwrap());
        assert!(!tangent_contains(&a, &b_xi0()).unwrap());
        assert!(tangent_contains(&a, &TangentVector::zero(3)).unwrap());
    }

    #[test]
    fn residue_examples() {
        let a = running_example();
        assert_eq!(residue(&a, &b_xi0()).unwrap(), (int(-1), int(0)));
        assert_eq!(residue(&a, &b_xi00()).unwrap(), (int(1), int(0)));
        assert_eq!(residue(&a, &b_eta00()).unwrap(), (int(0), int(1)));
    }

    #[test]
    fn residue_requires_standard_form() {
        let a = MatrixA::from_entries(x(2), x(1), x(2).pow(2), &x(0) * &x(1)).unwrap();
        assert_eq!(residue(&a, &b_xi0()).unwrap_err(), Error::NotNormalized);
    }

    #[test]
    fn normalize_fixpoint() {
        let n = normalize(&running_example());
        assert!(n.coord_change.is_identity());
        assert!(n.group_part.is_identity());
        assert_eq!(n.result, running_example());
    }

    #[test]
    fn normalize_shifted_point() {
        let a =
            MatrixA::from_entries(&x(0) - &x(1), &x(0) - &x(2), x(2).pow(2), x(1).pow(2)).unwrap();
        let n = normalize(&a);
        let expected = Matrix::from_rows(vec![
            vec![int(1), int(0), int(0)],
            vec![int(1), int(-1), int(0)],
            vec![int(1), int(0), int(-1)],
        ]);
        assert_eq!(n.coord_change, expected);
        assert!(is_normalized(&n.result));
        let p = nu(&a).point().clone();
        assert_eq!(n.transform_point(&p), Point::from_ints([1, 0, 0]).unwrap());
        assert_eq!(nu(&n.result).point(), &Point::from_ints([1, 0, 0]).unwrap());
    }

    #[test]
    fn normalize_swaps_with_group() {
        let a = MatrixA::from_entries(x(2), x(1), x(2).pow(2), &x(0) * &x(1)).unwrap();
        let n = normalize(&a);
        assert!(n.coord_change.is_identity());
        assert_eq!(n.group_part.g(), &[[int(0), int(1)], [int(1), int(0)]]);
        assert_eq!(n.result, running_example());
    }

    #[test]
    fn normalize_is_idempotent() {
        let a = MatrixA::from_entries(
            &x(0) + &x(1).scale(&int(2)),
            &x(2) - &x(0),
            x(1).pow(2),
            &x(0) * &x(2),
        )
        .unwrap();
        let n = normalize(&a);
        assert!(normalize(&n.result).coord_change.is_identity());
    }
}
