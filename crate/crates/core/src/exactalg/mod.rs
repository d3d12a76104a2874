//! Exact scalar and sparse polynomial arithmetic.

pub mod biform;
pub mod form;
pub mod linalg;
pub mod scalar;

use std::collections::BTreeMap;

use num_traits::Zero;

pub use biform::{
    applicable_rewrites, dring_reduce, rewrite_once, BiForm, BiMonomial, DElement, Rewrite,
};
pub use form::{monomial_count, monomials, Exponents, Form};
pub use linalg::Matrix;
pub use scalar::Scalar;

use crate::error::{Error, Result};

/// Adds `c` to the coefficient at `key`, dropping the entry if it cancels.
pub(crate) fn accumulate<K: Ord>(terms: &mut BTreeMap<K, Scalar>, key: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match terms.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

pub(crate) fn parse_exponents<const N: usize>(text: &str) -> Result<[u32; N]> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != N {
        return Err(Error::Malformed(format!(
            "expected {N} exponents in {text:?}"
        )));
    }
    let mut out = [0u32; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad exponent in {text:?}")))?;
    }
    Ok(out)
}
