//! Functions `F_{p^n} -> F_{p^n}` as sparse univariate polynomials.

use std::fmt;

use thiserror::Error;

use crate::field::{Field, FieldElem, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("exponent {exp} exceeds q - 1 = {max}")]
    ExponentRange { exp: u64, max: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Sum of the base-`p` digits of `u`.
pub fn digit_sum(p: u64, mut u: u64) -> u64 {
    let mut s = 0;
    while u > 0 {
        s += u % p;
        u /= p;
    }
    s
}

/// A polynomial `sum c_e X^e` with `0 <= e <= q - 1`.
///
/// Exponents are strictly increasing and every coefficient is nonzero.
/// Exponents are not reduced mod `q - 1`: `X^{q-1}` and `X^0` differ at zero.
#[derive(Clone, PartialEq, Eq)]
pub struct SparsePoly {
    field: Field,
    terms: Vec<(u64, FieldElem)>,
}

impl SparsePoly {
    /// Builds a polynomial, merging repeated exponents and dropping zero terms.
    pub fn new(
        field: &Field,
        terms: impl IntoIterator<Item = (u64, FieldElem)>,
    ) -> Result<Self, PolyError> {
        let max = field.order() as u64 - 1;
        let mut v: Vec<(u64, FieldElem)> = Vec::new();
        for (exp, c) in terms {
            field.ensure(c)?;
            if exp > max {
                return Err(PolyError::ExponentRange { exp, max });
            }
            v.push((exp, c));
        }
        v.sort_by_key(|t| t.0);
        let mut merged: Vec<(u64, FieldElem)> = Vec::with_capacity(v.len());
        for (exp, c) in v {
            match merged.last_mut() {
                Some(last) if last.0 == exp => last.1 = field.add(last.1, c),
                _ => merged.push((exp, c)),
            }
        }
        merged.retain(|t| !t.1.is_zero());
        Ok(SparsePoly {
            field: field.clone(),
            terms: merged,
        })
    }

    pub fn zero(field: &Field) -> Self {
        SparsePoly {
            field: field.clone(),
            terms: Vec::new(),
        }
    }

    /// The monomial `X^d`.
    pub fn monomial(field: &Field, d: u64) -> Result<Self, PolyError> {
        Self::new(field, [(d, field.one())])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> &[(u64, FieldElem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn exponents(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().map(|t| t.0)
    }

    /// Maximum digit sum over the exponents; `None` for the zero function.
    pub fn algebraic_degree(&self) -> Option<u64> {
        let p = self.field.p() as u64;
        self.exponents().map(|e| digit_sum(p, e)).max()
    }

    pub fn evaluate(&self, x: FieldElem) -> Result<FieldElem, FieldError> {
        self.field.ensure(x)?;
        Ok(self.eval_raw(x.raw()))
    }

    pub(crate) fn eval_raw(&self, x: u32) -> FieldElem {
        let k = &self.field;
        let raw = self.terms.iter().fold(crate::field::ZERO, |acc, &(e, c)| {
            k.raw_add(acc, k.raw_mul(c.raw(), k.raw_pow(x, e as i128)))
        });
        k.elem(raw)
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        if *self.field != *other.field {
            return Err(FieldError::FieldMismatch.into());
        }
        Self::new(
            &self.field,
            self.terms.iter().chain(other.terms.iter()).copied(),
        )
    }

    /// `c * self`.
    pub fn scale(&self, c: FieldElem) -> Result<SparsePoly, PolyError> {
        self.field.ensure(c)?;
        Self::new(
            &self.field,
            self.terms.iter().map(|&(e, a)| (e, self.field.mul(a, c))),
        )
    }

    /// Keeps only the terms whose exponent satisfies `keep`.
    pub fn filter_terms(&self, keep: impl Fn(u64) -> bool) -> SparsePoly {
        SparsePoly {
            field: self.field.clone(),
            terms: self.terms.iter().copied().filter(|t| keep(t.0)).collect(),
        }
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *c == self.field.one() {
                write!(f, "X^{e}")?;
            } else {
                write!(f, "{c:?}*X^{e}")?;
            }
        }
        Ok(())
    }
}
