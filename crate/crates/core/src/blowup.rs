//! R-bundles on the surface `D(p) = D0(p) u D1(p)` and their equivalence.
//!
//! For `A = (x1 q1; x2 q2)` in `X'` and a vector `B` in `T_A X`, write
//! `q_k = x1 P_k + x2 Q_k` (monomials containing `x1` go to `P_k`, the rest to
//! `Q_k`). Then
//!
//! ```text
//!  Phi(A, B) = ( u1 + xi0 u0    u1 P1 + u2 Q1 + xi00  x0^(d-2) u0 )
//!              ( u2 + eta0 u0   u1 P2 + u2 Q2 + eta00 x0^(d-2) u0 )
//! ```
//!
//! presents a sheaf on `D(p)`. Its cokernel is locally free on its support
//! exactly when the entries have no common zero, which can only fail on
//! `D1(p) = {x = (1:0:0)}`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::scalar::{self, Scalar};
use crate::exactalg::{dring_reduce, BiForm, BiMonomial, DElement, Form, Matrix};
use crate::fibration::MatrixA;
use crate::plane::Point;
use crate::singularlocus::{check_standard_singular, residue, TangentVector};

pub type PhiEntries = [[DElement; 2]; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub matrix: MatrixA,
    pub vector: TangentVector,
}

/// The matrix `Phi(A, B)` with entries in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiMatrix {
    pub entries: PhiEntries,
    pub provenance: Provenance,
}

impl PhiMatrix {
    pub fn d(&self) -> u32 {
        self.provenance.matrix.d()
    }

    /// `[[(0,1), (d-2,1)], [(0,1), (d-2,1)]]`.
    pub fn expected_bidegrees(d: u32) -> [[(u32, u32); 2]; 2] {
        [[(0, 1), (d - 2, 1)], [(0, 1), (d - 2, 1)]]
    }

    pub fn has_expected_bidegrees(&self) -> bool {
        let exp = PhiMatrix::expected_bidegrees(self.d());
        (0..2).all(|i| (0..2).all(|j| self.entries[i][j].bidegree() == exp[i][j]))
    }
}

/// Splits `q = x1 P + x2 Q` with every `x1`-divisible monomial in `x1 P`.
/// Fails if `q` has an `x0^(d-1)` term, i.e. does not vanish at `(1:0:0)`.
fn split_at_point(q: &Form) -> Result<(Form, Form)> {
    let deg = q.degree() - 1;
    let mut p_terms = Vec::new();
    let mut q_terms = Vec::new();
    for (e, c) in q.terms() {
        let mut e = *e;
        if e[1] > 0 {
            e[1] -= 1;
            p_terms.push((e, c.clone()));
        } else if e[2] > 0 {
            e[2] -= 1;
            q_terms.push((e, c.clone()));
        } else {
            return Err(Error::NotInSingularLocus);
        }
    }
    Ok((
        Form::from_terms(deg, p_terms)?,
        Form::from_terms(deg, q_terms)?,
    ))
}

fn u_linear(c0: &Scalar, c1: &Scalar, c2: &Scalar) -> BiForm {
    BiForm::u_var(0).scale(c0) + BiForm::u_var(1).scale(c1) + BiForm::u_var(2).scale(c2)
}

pub fn phi(a: &MatrixA, b: &TangentVector) -> Result<PhiMatrix> {
    check_standard_singular(a)?;
    if a.d() != b.d() {
        return Err(Error::DegreeMismatch(
            "matrix and tangent vector degrees differ".into(),
        ));
    }
    let d = a.d();
    let (one, zero) = (Scalar::one(), Scalar::zero());
    let x0_power = BiForm::monomial(BiMonomial::new([d - 2, 0, 0], [1, 0, 0]), Scalar::one());

    let right = |q: &Form, top: Scalar| -> Result<DElement> {
        let (p_part, q_part) = split_at_point(q)?;
        let sum = &BiForm::u_var(1) * &BiForm::from_form(&p_part)
            + &BiForm::u_var(2) * &BiForm::from_form(&q_part)
            + x0_power.scale(&top);
        Ok(dring_reduce(&sum))
    };

    let entries = [
        [
            dring_reduce(&u_linear(&b.xi0(), &one, &zero)),
            right(a.q1(), b.xi00())?,
        ],
        [
            dring_reduce(&u_linear(&b.eta0(), &zero, &one)),
            right(a.q2(), b.eta00())?,
        ],
    ];
    Ok(PhiMatrix {
        entries,
        provenance: Provenance {
            matrix: a.clone(),
            vector: b.clone(),
        },
    })
}

/// Pulls every entry back to `D0(p)` away from the exceptional line via
/// `u = (0 : x1 : x2)`.
pub fn restrict_to_d0(phi: &PhiMatrix) -> [[Form; 2]; 2] {
    restrict_entries_to_d0(&phi.entries)
}

pub fn restrict_entries_to_d0(entries: &PhiEntries) -> [[Form; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| entries[i][j].restrict_to_d0()))
}

/// The four entries on `D1(p)` are linear forms in `u`; their coefficient rows
/// are returned in the order `(1,1), (2,1), (1,2), (2,2)`.
pub fn d1_coefficients(phi: &PhiMatrix) -> Matrix {
    let p = [Scalar::one(), Scalar::zero(), Scalar::zero()];
    let order = [(0, 0), (1, 0), (0, 1), (1, 1)];
    let rows = order
        .iter()
        .map(|&(i, j)| phi.entries[i][j].eval_x(&p).linear_coefficients().to_vec())
        .collect();
    Matrix::from_rows(rows)
}

/// A common zero of all entries on `D1(p)`, if one exists.
pub fn d1_common_zero(phi: &PhiMatrix) -> Option<Point> {
    let kernel = d1_coefficients(phi).nullspace();
    let v = kernel.into_iter().next()?;
    Point::new([v[0].clone(), v[1].clone(), v[2].clone()]).ok()
}

/// Whether `coker Phi(A, B)` is locally free on its support: the four linear
/// forms on `D1(p)` have no common zero, i.e. their coefficients have rank 3.
pub fn is_r_bundle(a: &MatrixA, b: &TangentVector) -> Result<bool> {
    let phi = phi(a, b)?;
    Ok(d1_coefficients(&phi).rank() == 3)
}

/// `det Phi`, of bidegree `(d-2, 2)`.
pub fn support_curve(phi: &PhiMatrix) -> DElement {
    let e = &phi.entries;
    &e[0][0] * &e[1][1] - &e[0][1] * &e[1][0]
}

/// A point of `P N_A`, the projectivized normal space `T_A X / T_A X'`,
/// recorded by the residue pair scaled to have first nonzero entry 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[String; 2]", into = "[String; 2]")]
pub struct NormalDirection {
    r1: Scalar,
    r2: Scalar,
}

impl NormalDirection {
    pub fn new(r1: Scalar, r2: Scalar) -> Result<Self> {
        let lead = if !r1.is_zero() {
            r1.clone()
        } else if !r2.is_zero() {
            r2.clone()
        } else {
            return Err(Error::TangentVectorNotNormal);
        };
        Ok(NormalDirection {
            r1: r1 / &lead,
            r2: r2 / &lead,
        })
    }

    pub fn components(&self) -> (&Scalar, &Scalar) {
        (&self.r1, &self.r2)
    }
}

impl From<NormalDirection> for [String; 2] {
    fn from(n: NormalDirection) -> Self {
        [scalar::to_string(&n.r1), scalar::to_string(&n.r2)]
    }
}

impl TryFrom<[String; 2]> for NormalDirection {
    type Error = Error;
    fn try_from(v: [String; 2]) -> Result<Self> {
        NormalDirection::new(scalar::parse(&v[0])?, scalar::parse(&v[1])?)
    }
}

pub fn normal_direction(a: &MatrixA, b: &TangentVector) -> Result<NormalDirection> {
    let (r1, r2) = residue(a, b)?;
    NormalDirection::new(r1, r2)
}

/// The automorphism `(u0, u1, u2) -> (alpha u0, u1 + beta u0, u2 + gamma u0)`
/// of `D1(p)`, extended by the identity on `D0(p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AutomorphismJson", into = "AutomorphismJson")]
pub struct Automorphism {
    alpha: Scalar,
    beta: Scalar,
    gamma: Scalar,
}

impl Automorphism {
    pub fn new(alpha: Scalar, beta: Scalar, gamma: Scalar) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::Domain("alpha must be nonzero".into()));
        }
        Ok(Automorphism { alpha, beta, gamma })
    }

    pub fn identity() -> Self {
        Automorphism {
            alpha: Scalar::one(),
            beta: Scalar::zero(),
            gamma: Scalar::zero(),
        }
    }

    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }

    pub fn beta(&self) -> &Scalar {
        &self.beta
    }

    pub fn gamma(&self) -> &Scalar {
        &self.gamma
    }

    fn u_images(&self) -> [BiForm; 3] {
        let z = Scalar::zero();
        let one = Scalar::one();
        [
            u_linear(&self.alpha, &z, &z),
            u_linear(&self.beta, &one, &z),
            u_linear(&self.gamma, &z, &one),
        ]
    }
}

#[derive(Serialize, Deserialize)]
struct AutomorphismJson {
    alpha: String,
    beta: String,
    gamma: String,
}

impl From<Automorphism> for AutomorphismJson {
    fn from(a: Automorphism) -> Self {
        AutomorphismJson {
            alpha: scalar::to_string(&a.alpha),
            beta: scalar::to_string(&a.beta),
            gamma: scalar::to_string(&a.gamma),
        }
    }
}

impl TryFrom<AutomorphismJson> for Automorphism {
    type Error = Error;
    fn try_from(j: AutomorphismJson) -> Result<Self> {
        Automorphism::new(
            scalar::parse(&j.alpha)?,
            scalar::parse(&j.beta)?,
            scalar::parse(&j.gamma)?,
        )
    }
}

/// The pullback `phi^* Phi`: substitute `u0 -> alpha u0`, `u1 -> u1 + beta u0`,
/// `u2 -> u2 + gamma u0` and reduce.
pub fn apply_automorphism(aut: &Automorphism, phi: &PhiMatrix) -> PhiEntries {
    apply_to_entries(aut, &phi.entries)
}

pub fn apply_to_entries(aut: &Automorphism, entries: &PhiEntries) -> PhiEntries {
    let images = aut.u_images();
    std::array::from_fn(|i| std::array::from_fn(|j| entries[i][j].substitute_u(&images)))
}

/// Decides whether `E(A, B1)` and `E(A, B2)` are equivalent R-bundles and, if
/// so, returns an automorphism `phi` with `phi^* Phi(A, B1) = Phi(A, B2)`.
///
/// The bundles are equivalent iff the residues are proportional,
/// `res(B2) = alpha res(B1)`; then `beta = mu0 - xi0 alpha` and
/// `gamma = nu0 - eta0 alpha`, where `xi0, eta0` (`mu0, nu0`) are the `x0`
/// coefficients of the linear entries of `B1` (`B2`).
pub fn r_bundle_equivalent(
    a: &MatrixA,
    b1: &TangentVector,
    b2: &TangentVector,
) -> Result<Option<Automorphism>> {
    let (r1, r2) = residue(a, b1)?;
    let (s1, s2) = residue(a, b2)?;
    if (r1.is_zero() && r2.is_zero()) || (s1.is_zero() && s2.is_zero()) {
        return Err(Error::TangentVectorNotNormal);
    }
    let alpha = if !r1.is_zero() { &s1 / &r1 } else { &s2 / &r2 };
    if s1 != &alpha * &r1 || s2 != &alpha * &r2 {
        return Ok(None);
    }
    let beta = b2.xi0() - b1.xi0() * &alpha;
    let gamma = b2.eta0() - b1.eta0() * &alpha;
    let aut = Automorphism::new(alpha, beta, gamma)?;

    let pulled = apply_automorphism(&aut, &phi(a, b1)?);
    if pulled != phi(a, b2)?.entries {
        return Err(Error::VerificationFailed(
            "pullback of Phi(A, B1) differs from Phi(A, B2)".into(),
        ));
    }
    Ok(Some(aut))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::int;
    use crate::fibration::{coordinate_count, det_of};

    fn x(i: usize) -> BiForm {
        BiForm::x_var(i)
    }
    fn u(i: usize) -> BiForm {
        BiForm::u_var(i)
    }
    fn red(b: BiForm) -> DElement {
        dring_reduce(&b)
    }

    fn running_example() -> MatrixA {
        let xf = Form::var;
        MatrixA::from_entries(xf(1), xf(2), &xf(0) * &xf(1), xf(2).pow(2)).unwrap()
    }

    fn vector(set: &[(usize, i64)]) -> TangentVector {
        let mut v = vec![Scalar::zero(); coordinate_count(3)];
        for &(k, c) in set {
            v[k] = int(c);
        }
        TangentVector::from_coordinates(3, &v)
    }

    const XI0: usize = 0;
    const XI00: usize = 6;
    const ETA00: usize = 12;

    fn phi_zero_perturbation() -> PhiEntries {
        [
            [red(u(1)), red(&u(1) * &x(0))],
            [red(u(2)), red(&u(2) * &x(2))],
        ]
    }

    #[test]
    fn phi_examples() {
        let a = running_example();
        let p = phi(&a, &vector(&[(XI0, 1)])).unwrap();
        let expected = [
            [red(&u(1) + &u(0)), red(&u(1) * &x(0))],
            [red(u(2)), red(&u(2) * &x(2))],
        ];
        assert_eq!(p.entries, expected);
        assert!(p.has_expected_bidegrees());

        let p = phi(&a, &vector(&[(XI00, 1)])).unwrap();
        let expected = [
            [red(u(1)), red(&u(1) * &x(0) + &x(0) * &u(0))],
            [red(u(2)), red(&u(2) * &x(2))],
        ];
        assert_eq!(p.entries, expected);

        let p = phi(&a, &TangentVector::zero(3)).unwrap();
        assert_eq!(p.entries, phi_zero_perturbation());
    }

    #[test]
    fn phi_requires_standard_singular_matrix() {
        let xf = Form::var;
        let off = MatrixA::from_entries(xf(1), xf(2), xf(0).pow(2), xf(2).pow(2)).unwrap();
        assert_eq!(
            phi(&off, &TangentVector::zero(3)).unwrap_err(),
            Error::NotInSingularLocus
        );
        let swapped = MatrixA::from_entries(xf(2), xf(1), xf(2).pow(2), &xf(0) * &xf(1)).unwrap();
        assert_eq!(
            phi(&swapped, &TangentVector::zero(3)).unwrap_err(),
            Error::NotNormalized
        );
    }

    #[test]
    fn d0_restriction_recovers_matrix() {
        let a = running_example();
        let p = phi(&a, &vector(&[(XI0, 1)])).unwrap();
        let r = restrict_to_d0(&p);
        assert_eq!(
            r,
            [
                [a.z1().clone(), a.q1().clone()],
                [a.z2().clone(), a.q2().clone()]
            ]
        );
    }

    #[test]
    fn r_bundle_examples() {
        let a = running_example();
        let p = phi(&a, &vector(&[(XI0, 1)])).unwrap();
        let rows: Vec<Vec<Scalar>> = [[1, 1, 0], [0, 0, 1], [0, 1, 0], [0, 0, 0]]
            .iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect();
        assert_eq!(d1_coefficients(&p), Matrix::from_rows(rows));
        assert!(is_r_bundle(&a, &vector(&[(XI0, 1)])).unwrap());

        let tangent = vector(&[(XI0, 1), (XI00, 1)]);
        assert!(!is_r_bundle(&a, &tangent).unwrap());
        let zero = d1_common_zero(&phi(&a, &tangent).unwrap()).unwrap();
        assert_eq!(zero, Point::from_ints([1, -1, 0]).unwrap());

        assert!(!is_r_bundle(&a, &TangentVector::zero(3)).unwrap());
    }

    #[test]
    fn support_curve_examples() {
        let a = running_example();
        let expected = red(&(&u(1) * &u(2)) * &(&x(2) - &x(0)));
        let p = phi(&a, &vector(&[(XI0, 1)])).unwrap();
        assert_eq!(support_curve(&p), expected);
        assert_eq!(support_curve(&p).bidegree(), (1, 2));
        let p0 = phi(&a, &TangentVector::zero(3)).unwrap();
        assert_eq!(support_curve(&p0), expected);
        assert_eq!(support_curve(&p0).restrict_to_d0(), det_of(&a));
    }

    #[test]
    fn normal_direction_examples() {
        let a = running_example();
        let ten = NormalDirection::new(int(1), int(0)).unwrap();
        assert_eq!(normal_direction(&a, &vector(&[(XI0, 1)])).unwrap(), ten);
        assert_eq!(normal_direction(&a, &vector(&[(XI00, 1)])).unwrap(), ten);
        assert_eq!(
            normal_direction(&a, &vector(&[(ETA00, 1)])).unwrap(),
            NormalDirection::new(int(0), int(1)).unwrap()
        );
        assert_eq!(
            normal_direction(&a, &vector(&[(XI0, 1), (XI00, 1)])).unwrap_err(),
            Error::TangentVectorNotNormal
        );
    }

    #[test]
    fn equivalence_by_scaling() {
        let a = running_example();
        let b1 = vector(&[(XI0, 1)]);
        let b2 = b1.scale(&int(2));
        let aut = r_bundle_equivalent(&a, &b1, &b2).unwrap().unwrap();
        assert_eq!(aut, Automorphism::new(int(2), int(0), int(0)).unwrap());
    }

    #[test]
    fn equivalence_with_sign_flip() {
        let a = running_example();
        let b1 = vector(&[(XI0, 1)]);
        let b2 = vector(&[(XI00, 1)]);
        let aut = r_bundle_equivalent(&a, &b1, &b2).unwrap().unwrap();
        assert_eq!(aut, Automorphism::new(int(-1), int(1), int(0)).unwrap());
    }

    #[test]
    fn inequivalent_directions() {
        let a = running_example();
        let b1 = vector(&[(XI0, 1)]);
        let b2 = vector(&[(ETA00, 1)]);
        assert_eq!(r_bundle_equivalent(&a, &b1, &b2).unwrap(), None);
    }

    #[test]
    fn pullback_examples() {
        let a = running_example();
        let p1 = phi(&a, &vector(&[(XI0, 1)])).unwrap();
        assert_eq!(
            apply_automorphism(&Automorphism::identity(), &p1),
            p1.entries
        );

        let aut = Automorphism::new(int(-1), int(1), int(0)).unwrap();
        let p2 = phi(&a, &vector(&[(XI00, 1)])).unwrap();
        assert_eq!(apply_automorphism(&aut, &p1), p2.entries);

        // an entry without u0 is untouched by a pure rescaling of u0
        let scale = Automorphism::new(int(5), int(0), int(0)).unwrap();
        let pulled = apply_automorphism(&scale, &p1);
        assert_eq!(pulled[1], p1.entries[1]);
    }

    #[test]
    fn phi_json_round_trip() {
        let a = running_example();
        let p = phi(&a, &vector(&[(XI0, 1)])).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<PhiMatrix>(&text).unwrap(), p);
        let aut = Automorphism::new(int(-1), int(1), int(0)).unwrap();
        let text = serde_json::to_string(&aut).unwrap();
        assert_eq!(text, r#"{"alpha":"-1/1","beta":"1/1","gamma":"0/1"}"#);
    }
}
