//! Homogeneous forms in `x0, x1, x2` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::{self, Scalar};
use super::{accumulate, parse_exponents};
use crate::error::{Error, Result};

/// Exponent triple `(i0, i1, i2)` of the monomial `x0^i0 x1^i1 x2^i2`.
pub type Exponents = [u32; 3];

/// A homogeneous polynomial of fixed degree.
///
/// Terms are kept in a `BTreeMap`, so iteration is ascending lexicographic
/// on exponent triples and the last entry is the graded-lex leading term
/// (order `x0 > x1 > x2`). A zero form still carries its degree.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FormJson", into = "FormJson")]
pub struct Form {
    degree: u32,
    terms: BTreeMap<Exponents, Scalar>,
}

impl Form {
    pub fn zero(degree: u32) -> Self {
        Form {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar) -> Self {
        Form::monomial([0, 0, 0], c)
    }

    pub fn monomial(exps: Exponents, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Form {
            degree: exps.iter().sum(),
            terms,
        }
    }

    /// The coordinate function `x_i`.
    pub fn var(i: usize) -> Self {
        let mut exps = [0; 3];
        exps[i] = 1;
        Form::monomial(exps, Scalar::one())
    }

    pub fn linear(coeffs: &[Scalar; 3]) -> Self {
        let mut f = Form::zero(1);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = [0; 3];
            e[i] = 1;
            accumulate(&mut f.terms, e, c.clone());
        }
        f
    }

    /// Builds a form from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, Scalar)>,
    {
        let mut f = Form::zero(degree);
        for (e, c) in terms {
            if e.iter().sum::<u32>() != degree {
                return Err(Error::Malformed(format!(
                    "monomial {e:?} does not have degree {degree}"
                )));
            }
            accumulate(&mut f.terms, e, c);
        }
        Ok(f)
    }

    pub(crate) fn from_map_unchecked(degree: u32, terms: BTreeMap<Exponents, Scalar>) -> Self {
        debug_assert!(terms.keys().all(|e| e.iter().sum::<u32>() == degree));
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        Form { degree, terms }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &Exponents) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn leading_term(&self) -> Option<(&Exponents, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        if c.is_zero() {
            return Form::zero(self.degree);
        }
        let terms = self.terms.iter().map(|(e, v)| (*e, v * c)).collect();
        Form {
            degree: self.degree,
            terms,
        }
    }

    /// Multiplies out the monomials pairwise.
    pub fn mul_form(&self, other: &Form) -> Form {
        let mut out = Form::zero(self.degree + other.degree);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                accumulate(&mut out.terms, e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Form {
        let mut acc = Form::constant(Scalar::one());
        for _ in 0..n {
            acc = acc.mul_form(self);
        }
        acc
    }

    pub fn eval(&self, p: &[Scalar; 3]) -> Scalar {
        let mut total = Scalar::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for i in 0..3 {
                for _ in 0..e[i] {
                    v *= &p[i];
                }
            }
            total += v;
        }
        total
    }

    /// Formal partial derivative with respect to `x_axis`.
    pub fn partial(&self, axis: usize) -> Form {
        let mut out = Form::zero(self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[axis] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[axis] -= 1;
            accumulate(&mut out.terms, e2, c * scalar::int(i64::from(e[axis])));
        }
        out
    }

    pub fn gradient(&self) -> [Form; 3] {
        [self.partial(0), self.partial(1), self.partial(2)]
    }

    /// Substitutes `x_i -> images[i]`. All images must share one degree `e`;
    /// the result has degree `degree * e`.
    pub fn substitute(&self, images: &[Form; 3]) -> Form {
        let e = images[0].degree;
        assert!(
            images.iter().all(|f| f.degree == e),
            "substitution images must share a degree"
        );
        let max_exp = self
            .terms
            .keys()
            .flat_map(|k| k.iter().copied())
            .max()
            .unwrap_or(0);
        let powers: Vec<Vec<Form>> = images
            .iter()
            .map(|img| {
                let mut ps = vec![Form::constant(Scalar::one())];
                for k in 1..=max_exp as usize {
                    let next = ps[k - 1].mul_form(img);
                    ps.push(next);
                }
                ps
            })
            .collect();
        let mut out = Form::zero(self.degree * e);
        for (ex, c) in &self.terms {
            let prod = powers[0][ex[0] as usize]
                .mul_form(&powers[1][ex[1] as usize])
                .mul_form(&powers[2][ex[2] as usize]);
            for (k, v) in prod.terms {
                accumulate(&mut out.terms, k, v * c);
            }
        }
        out
    }

    /// Substitution by the linear change `x_i -> sum_j m[i][j] x_j`.
    pub fn linear_substitute(&self, m: &[[Scalar; 3]; 3]) -> Form {
        let images = [
            Form::linear(&m[0]),
            Form::linear(&m[1]),
            Form::linear(&m[2]),
        ];
        if self.degree == 0 {
            return self.clone();
        }
        self.substitute(&images)
    }

    /// Coefficients `(c0, c1, c2)` of a linear form `c0 x0 + c1 x1 + c2 x2`.
    pub fn linear_coefficients(&self) -> [Scalar; 3] {
        assert_eq!(self.degree, 1, "not a linear form");
        [
            self.coeff(&[1, 0, 0]),
            self.coeff(&[0, 1, 0]),
            self.coeff(&[0, 0, 1]),
        ]
    }

    /// Coefficient vector in the order of [`monomials`].
    pub fn coefficients(&self) -> Vec<Scalar> {
        monomials(self.degree)
            .iter()
            .map(|e| self.coeff(e))
            .collect()
    }

    pub fn from_coefficients(degree: u32, coeffs: &[Scalar]) -> Form {
        let monos = monomials(degree);
        assert_eq!(monos.len(), coeffs.len(), "coefficient count mismatch");
        let mut f = Form::zero(degree);
        for (e, c) in monos.into_iter().zip(coeffs) {
            accumulate(&mut f.terms, e, c.clone());
        }
        f
    }

    /// Divides out the leading coefficient, so the leading term is monic.
    pub fn monic(&self) -> Form {
        match self.leading_term() {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    fn common_degree(&self, other: &Form) -> u32 {
        if self.degree == other.degree || other.is_zero() {
            self.degree
        } else if self.is_zero() {
            other.degree
        } else {
            panic!(
                "cannot add forms of degrees {} and {}",
                self.degree, other.degree
            )
        }
    }
}

/// All exponent triples of total degree `degree`, graded-lex descending:
/// `x0^d, x0^(d-1) x1, x0^(d-1) x2, x0^(d-2) x1^2, ...`.
pub fn monomials(degree: u32) -> Vec<Exponents> {
    let mut out = Vec::with_capacity(((degree + 1) * (degree + 2) / 2) as usize);
    for i0 in (0..=degree).rev() {
        for i1 in (0..=degree - i0).rev() {
            out.push([i0, i1, degree - i0 - i1]);
        }
    }
    out
}

pub fn monomial_count(degree: u32) -> usize {
    ((degree + 1) * (degree + 2) / 2) as usize
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        let degree = self.common_degree(rhs);
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            accumulate(&mut terms, *e, c.clone());
        }
        Form { degree, terms }
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        let degree = self.common_degree(rhs);
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            accumulate(&mut terms, *e, -c);
        }
        Form { degree, terms }
    }
}

impl Mul for &Form {
    type Output = Form;
    fn mul(self, rhs: &Form) -> Form {
        self.mul_form(rhs)
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        let terms = self.terms.iter().map(|(e, c)| (*e, -c)).collect();
        Form {
            degree: self.degree,
            terms,
        }
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { (&self).$m(&rhs) }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty { (&self).$m(rhs) }
        }
        impl $tr<$ty> for &$ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { self.$m(&rhs) }
        }
    )*};
}
pub(crate) use forward_owned;

forward_owned!(Form, Add add, Sub sub, Mul mul);

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

pub(crate) fn write_coefficient(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    c: &Scalar,
    has_monomial: bool,
) -> fmt::Result {
    let negative = c < &Scalar::zero();
    let mag = if negative { -c } else { c.clone() };
    match (first, negative) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    if !has_monomial || !mag.is_one() {
        write!(f, "{mag}")?;
        if has_monomial {
            write!(f, "*")?;
        }
    }
    Ok(())
}

pub(crate) fn write_monomial(f: &mut fmt::Formatter<'_>, name: &str, exps: &[u32]) -> fmt::Result {
    let mut sep = "";
    for (i, e) in exps.iter().enumerate() {
        match e {
            0 => continue,
            1 => write!(f, "{sep}{name}{i}")?,
            _ => write!(f, "{sep}{name}{i}^{e}")?,
        }
        sep = "*";
    }
    Ok(())
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let has_monomial = e.iter().any(|&x| x > 0);
            write_coefficient(f, k == 0, c, has_monomial)?;
            write_monomial(f, "x", e)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}]({})", self.degree, self)
    }
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    degree: u32,
    terms: BTreeMap<String, String>,
}

impl From<Form> for FormJson {
    fn from(f: Form) -> Self {
        let terms = f
            .terms
            .iter()
            .map(|(e, c)| (format!("{},{},{}", e[0], e[1], e[2]), scalar::to_string(c)))
            .collect();
        FormJson {
            degree: f.degree,
            terms,
        }
    }
}

impl TryFrom<FormJson> for Form {
    type Error = Error;
    fn try_from(j: FormJson) -> Result<Form> {
        let terms = j
            .terms
            .iter()
            .map(|(k, v)| {
                let e = parse_exponents::<3>(k)?;
                Ok((e, scalar::parse(v)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Form::from_terms(j.degree, terms)
    }
}
