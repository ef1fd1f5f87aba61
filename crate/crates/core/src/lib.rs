//! Construction and exhaustive verification of generalized almost perfect
//! nonlinear (GAPN) functions over `F_{p^n}`.
//!
//! A function `F` is GAPN when, for every nonzero `a`, the `(p-1)`-th order
//! derivative `D_a F(X) = sum_{i in F_p} F(X + i a)` takes every value at
//! most `p` times.

pub mod constructions;
pub mod derivative;
pub mod field;
pub mod json;
pub mod poly;
pub mod reproduce;
pub mod search;

pub use derivative::{derivative, is_gapn, is_p_to_one, DerivativeMap, GapnVerdict};
pub use field::{make_field, Field, FieldCtx, FieldElem, FieldError};
pub use poly::{digit_sum, SparsePoly};
