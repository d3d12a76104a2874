//! Bihomogeneous forms in `(x0, x1, x2; u0, u1, u2)` and their normal form
//! in the coordinate ring of the surface `D(p)` cut out by
//! `u0 x1`, `u0 x2`, `u1 x2 - u2 x1` inside `P2 x P2`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::form::{forward_owned, write_coefficient, write_monomial, Exponents, Form};
use super::scalar::{self, Scalar};
use super::{accumulate, parse_exponents};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BiMonomial {
    pub x: Exponents,
    pub u: Exponents,
}

impl BiMonomial {
    pub fn new(x: Exponents, u: Exponents) -> Self {
        BiMonomial { x, u }
    }

    fn times(&self, other: &BiMonomial) -> BiMonomial {
        BiMonomial {
            x: [
                self.x[0] + other.x[0],
                self.x[1] + other.x[1],
                self.x[2] + other.x[2],
            ],
            u: [
                self.u[0] + other.u[0],
                self.u[1] + other.u[1],
                self.u[2] + other.u[2],
            ],
        }
    }

    /// The normal form of a single monomial, `None` when it lies in the ideal.
    pub fn normal_form(mut self) -> Option<BiMonomial> {
        if self.u[0] > 0 && (self.x[1] > 0 || self.x[2] > 0) {
            return None;
        }
        let k = self.u[2].min(self.x[1]);
        self.u[2] -= k;
        self.x[1] -= k;
        self.u[1] += k;
        self.x[2] += k;
        Some(self)
    }
}

/// A bihomogeneous polynomial of bidegree `(a, b)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BiFormJson", into = "BiFormJson")]
pub struct BiForm {
    bidegree: (u32, u32),
    terms: BTreeMap<BiMonomial, Scalar>,
}

impl BiForm {
    pub fn zero(bidegree: (u32, u32)) -> Self {
        BiForm {
            bidegree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(m: BiMonomial, c: Scalar) -> Self {
        let bidegree = (m.x.iter().sum(), m.u.iter().sum());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        BiForm { bidegree, terms }
    }

    pub fn x_var(i: usize) -> Self {
        let mut x = [0; 3];
        x[i] = 1;
        BiForm::monomial(BiMonomial::new(x, [0; 3]), Scalar::one())
    }

    pub fn u_var(i: usize) -> Self {
        let mut u = [0; 3];
        u[i] = 1;
        BiForm::monomial(BiMonomial::new([0; 3], u), Scalar::one())
    }

    /// Lifts a form in `x` to bidegree `(deg f, 0)`.
    pub fn from_form(f: &Form) -> Self {
        let terms = f
            .terms()
            .iter()
            .map(|(e, c)| (BiMonomial::new(*e, [0; 3]), c.clone()))
            .collect();
        BiForm {
            bidegree: (f.degree(), 0),
            terms,
        }
    }

    pub fn from_terms<I>(bidegree: (u32, u32), terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BiMonomial, Scalar)>,
    {
        let mut out = BiForm::zero(bidegree);
        for (m, c) in terms {
            if (m.x.iter().sum::<u32>(), m.u.iter().sum::<u32>()) != bidegree {
                return Err(Error::Malformed(format!(
                    "monomial {m:?} does not have bidegree {bidegree:?}"
                )));
            }
            accumulate(&mut out.terms, m, c);
        }
        Ok(out)
    }

    pub fn bidegree(&self) -> (u32, u32) {
        self.bidegree
    }

    pub fn terms(&self) -> &BTreeMap<BiMonomial, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &BiMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn scale(&self, c: &Scalar) -> BiForm {
        if c.is_zero() {
            return BiForm::zero(self.bidegree);
        }
        let terms = self.terms.iter().map(|(m, v)| (*m, v * c)).collect();
        BiForm {
            bidegree: self.bidegree,
            terms,
        }
    }

    pub fn mul_biform(&self, other: &BiForm) -> BiForm {
        let bidegree = (
            self.bidegree.0 + other.bidegree.0,
            self.bidegree.1 + other.bidegree.1,
        );
        let mut out = BiForm::zero(bidegree);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                accumulate(&mut out.terms, m1.times(m2), c1 * c2);
            }
        }
        out
    }

    /// Substitutes `u_i -> images[i]`; images must be of bidegree `(0, 1)`.
    pub fn substitute_u(&self, images: &[BiForm; 3]) -> BiForm {
        assert!(images.iter().all(|g| g.bidegree == (0, 1)));
        let mut out = BiForm::zero(self.bidegree);
        for (m, c) in &self.terms {
            let mut prod = BiForm::monomial(BiMonomial::new(m.x, [0; 3]), c.clone());
            for (i, img) in images.iter().enumerate() {
                for _ in 0..m.u[i] {
                    prod = prod.mul_biform(img);
                }
            }
            for (k, v) in prod.terms {
                accumulate(&mut out.terms, k, v);
            }
        }
        out
    }

    /// Fixes the `x` coordinates at `p`, leaving a form in `u` alone.
    pub fn eval_x(&self, p: &[Scalar; 3]) -> Form {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (pi, &e) in p.iter().zip(&m.x) {
                for _ in 0..e {
                    v *= pi;
                }
            }
            accumulate(&mut out, m.u, v);
        }
        Form::from_map_unchecked(self.bidegree.1, out)
    }

    /// Pulls back along `x -> (x, (0 : x1 : x2))`, the chart of `D0(p)` away from
    /// the exceptional line.
    pub fn restrict_to_d0(&self) -> Form {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.u[0] > 0 {
                continue;
            }
            let e = [m.x[0], m.x[1] + m.u[1], m.x[2] + m.u[2]];
            accumulate(&mut out, e, c.clone());
        }
        Form::from_map_unchecked(self.bidegree.0 + self.bidegree.1, out)
    }

    fn common_bidegree(&self, other: &BiForm) -> (u32, u32) {
        if self.bidegree == other.bidegree || other.is_zero() {
            self.bidegree
        } else if self.is_zero() {
            other.bidegree
        } else {
            panic!(
                "cannot add biforms of bidegrees {:?} and {:?}",
                self.bidegree, other.bidegree
            )
        }
    }
}

impl Add for &BiForm {
    type Output = BiForm;
    fn add(self, rhs: &BiForm) -> BiForm {
        let bidegree = self.common_bidegree(rhs);
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            accumulate(&mut terms, *m, c.clone());
        }
        BiForm { bidegree, terms }
    }
}

impl Sub for &BiForm {
    type Output = BiForm;
    fn sub(self, rhs: &BiForm) -> BiForm {
        let bidegree = self.common_bidegree(rhs);
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            accumulate(&mut terms, *m, -c);
        }
        BiForm { bidegree, terms }
    }
}

impl Mul for &BiForm {
    type Output = BiForm;
    fn mul(self, rhs: &BiForm) -> BiForm {
        self.mul_biform(rhs)
    }
}

impl Neg for &BiForm {
    type Output = BiForm;
    fn neg(self) -> BiForm {
        self.scale(&-Scalar::one())
    }
}

forward_owned!(BiForm, Add add, Sub sub, Mul mul);

/// The three generators of the ideal of `D(p)`, read as rewrite rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rewrite {
    /// `u0 x1 -> 0`
    KillU0X1,
    /// `u0 x2 -> 0`
    KillU0X2,
    /// `u2 x1 -> u1 x2`
    SwapU2X1,
}

impl Rewrite {
    pub fn applies_to(self, m: &BiMonomial) -> bool {
        match self {
            Rewrite::KillU0X1 => m.u[0] > 0 && m.x[1] > 0,
            Rewrite::KillU0X2 => m.u[0] > 0 && m.x[2] > 0,
            Rewrite::SwapU2X1 => m.u[2] > 0 && m.x[1] > 0,
        }
    }
}

/// Every `(monomial, rule)` pair for which a single rewrite step applies.
pub fn applicable_rewrites(b: &BiForm) -> Vec<(BiMonomial, Rewrite)> {
    let rules = [Rewrite::KillU0X1, Rewrite::KillU0X2, Rewrite::SwapU2X1];
    b.terms
        .keys()
        .flat_map(|m| {
            rules
                .iter()
                .filter(move |r| r.applies_to(m))
                .map(move |r| (*m, *r))
        })
        .collect()
}

/// Applies one rewrite step to one term. Returns the input unchanged when the
/// rule does not apply.
pub fn rewrite_once(b: &BiForm, m: &BiMonomial, rule: Rewrite) -> BiForm {
    let Some(c) = b.terms.get(m) else {
        return b.clone();
    };
    if !rule.applies_to(m) {
        return b.clone();
    }
    let mut out = b.clone();
    let c = c.clone();
    out.terms.remove(m);
    if rule == Rewrite::SwapU2X1 {
        let mut m2 = *m;
        m2.u[2] -= 1;
        m2.x[1] -= 1;
        m2.u[1] += 1;
        m2.x[2] += 1;
        accumulate(&mut out.terms, m2, c);
    }
    out
}

/// Canonical normal form modulo `(u0 x1, u0 x2, u1 x2 - u2 x1)`.
pub fn dring_reduce(b: &BiForm) -> DElement {
    let mut terms = BTreeMap::new();
    for (m, c) in &b.terms {
        if let Some(n) = m.normal_form() {
            accumulate(&mut terms, n, c.clone());
        }
    }
    DElement(BiForm {
        bidegree: b.bidegree,
        terms,
    })
}

/// A section of `O_{D(p)}(a, b)` stored in normal form.
///
/// No term contains `u0 x1`, `u0 x2` or `u2 x1`. Equality of `DElement`s is
/// equality in the coordinate ring of `D(p)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BiFormJson", into = "BiFormJson")]
pub struct DElement(BiForm);

impl DElement {
    pub fn zero(bidegree: (u32, u32)) -> Self {
        DElement(BiForm::zero(bidegree))
    }

    pub fn as_biform(&self) -> &BiForm {
        &self.0
    }

    pub fn into_biform(self) -> BiForm {
        self.0
    }

    pub fn bidegree(&self) -> (u32, u32) {
        self.0.bidegree
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_reduced(b: &BiForm) -> bool {
        b.terms.keys().all(|m| m.normal_form() == Some(*m))
    }

    pub fn scale(&self, c: &Scalar) -> DElement {
        DElement(self.0.scale(c))
    }

    pub fn substitute_u(&self, images: &[BiForm; 3]) -> DElement {
        dring_reduce(&self.0.substitute_u(images))
    }

    pub fn eval_x(&self, p: &[Scalar; 3]) -> Form {
        self.0.eval_x(p)
    }

    pub fn restrict_to_d0(&self) -> Form {
        self.0.restrict_to_d0()
    }
}

impl From<BiForm> for DElement {
    fn from(b: BiForm) -> Self {
        dring_reduce(&b)
    }
}

impl Add for &DElement {
    type Output = DElement;
    fn add(self, rhs: &DElement) -> DElement {
        DElement(&self.0 + &rhs.0)
    }
}

impl Sub for &DElement {
    type Output = DElement;
    fn sub(self, rhs: &DElement) -> DElement {
        DElement(&self.0 - &rhs.0)
    }
}

impl Mul for &DElement {
    type Output = DElement;
    fn mul(self, rhs: &DElement) -> DElement {
        dring_reduce(&(&self.0 * &rhs.0))
    }
}

impl Neg for &DElement {
    type Output = DElement;
    fn neg(self) -> DElement {
        DElement(-&self.0)
    }
}

forward_owned!(DElement, Add add, Sub sub, Mul mul);

impl fmt::Display for BiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let has_x = m.x.iter().any(|&e| e > 0);
            let has_u = m.u.iter().any(|&e| e > 0);
            write_coefficient(f, k == 0, c, has_x || has_u)?;
            write_monomial(f, "x", &m.x)?;
            if has_x && has_u {
                write!(f, "*")?;
            }
            write_monomial(f, "u", &m.u)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiForm{:?}({})", self.bidegree, self)
    }
}

impl fmt::Display for DElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for DElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DElement{:?}({})", self.0.bidegree, self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct BiFormJson {
    bidegree: [u32; 2],
    terms: BTreeMap<String, String>,
}

impl From<BiForm> for BiFormJson {
    fn from(b: BiForm) -> Self {
        let terms = b
            .terms
            .iter()
            .map(|(m, c)| {
                let key = format!(
                    "{},{},{}|{},{},{}",
                    m.x[0], m.x[1], m.x[2], m.u[0], m.u[1], m.u[2]
                );
                (key, scalar::to_string(c))
            })
            .collect();
        BiFormJson {
            bidegree: [b.bidegree.0, b.bidegree.1],
            terms,
        }
    }
}

impl TryFrom<BiFormJson> for BiForm {
    type Error = Error;
    fn try_from(j: BiFormJson) -> Result<BiForm> {
        let terms = j
            .terms
            .iter()
            .map(|(k, v)| {
                let (xs, us) = k
                    .split_once('|')
                    .ok_or_else(|| Error::Malformed(format!("bad biform key {k:?}")))?;
                let m = BiMonomial::new(parse_exponents::<3>(xs)?, parse_exponents::<3>(us)?);
                Ok((m, scalar::parse(v)?))
            })
            .collect::<Result<Vec<_>>>()?;
        BiForm::from_terms((j.bidegree[0], j.bidegree[1]), terms)
    }
}

impl From<DElement> for BiFormJson {
    fn from(d: DElement) -> Self {
        d.0.into()
    }
}

impl TryFrom<BiFormJson> for DElement {
    type Error = Error;
    fn try_from(j: BiFormJson) -> Result<DElement> {
        Ok(dring_reduce(&BiForm::try_from(j)?))
    }
}
