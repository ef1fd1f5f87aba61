//! `(p-1)`-th order discrete derivatives and the GAPN verdict.
//!
//! `D_a F(X) = sum_{i in F_p} F(X + i a)` is constant on every coset
//! `X + F_p a`, so only one representative per coset is evaluated.
//!
//! The exhaustive check additionally uses two facts:
//! * `D_{λa} = D_a` for `λ ∈ F_p^*`, since `i -> λ i` permutes `F_p`;
//!   only one direction per line through the origin is examined.
//! * `D_a X^d (X) = a^d D_1 X^d (a^{-1} X)`, so for `F = sum c_j X^{d_j}`
//!   the derivative in direction `a` is, up to the bijection `X -> a^{-1} X`,
//!   `Y -> sum c_j a^{d_j} T_j(Y)` with `T_j = D_1 X^{d_j}` tabulated once.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{Field, FieldElem, FieldError, ZERO};
use crate::poly::{PolyError, SparsePoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivativeError {
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("operation requires a quadratic extension, got n = {0}")]
    NotQuadratic(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Exact table of `D_a F` over every input.
#[derive(Clone, Debug)]
pub struct DerivativeMap {
    field: Field,
    direction: FieldElem,
    /// Indexed by the vector code of `X`.
    values: Vec<FieldElem>,
    /// Image value (by vector code) to preimage count.
    fibers: BTreeMap<u32, usize>,
}

impl DerivativeMap {
    pub fn direction(&self) -> FieldElem {
        self.direction
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self, x: FieldElem) -> FieldElem {
        self.values[self.field.code(x) as usize]
    }

    /// Values in vector-code order of the input.
    pub fn values(&self) -> &[FieldElem] {
        &self.values
    }

    /// `(image value, preimage count)` in increasing code order of the value.
    pub fn fiber_histogram(&self) -> impl Iterator<Item = (FieldElem, usize)> + '_ {
        self.fibers
            .iter()
            .map(|(&code, &count)| (self.field.from_code(code), count))
    }

    pub fn max_fiber(&self) -> usize {
        self.fibers.values().copied().max().unwrap_or(0)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }
}

/// Computes `D_a F` on all `q` inputs.
pub fn derivative(f: &SparsePoly, a: FieldElem) -> Result<DerivativeMap, DerivativeError> {
    let k = f.field();
    k.ensure(a)?;
    if a.is_zero() {
        return Err(DerivativeError::ZeroDirection);
    }
    let p = k.p();
    let q = k.order();
    let mut values = vec![k.zero(); q as usize];
    // cosets X + F_p a are a (Y + F_p) with Y running over codes divisible by p
    for base in (0..q).step_by(p as usize) {
        let xs: Vec<u32> = (0..p)
            .map(|i| k.raw_mul(a.raw(), k.from_code(base + i).raw()))
            .collect();
        let d = xs
            .iter()
            .fold(ZERO, |acc, &x| k.raw_add(acc, f.eval_raw(x).raw()));
        debug_assert_eq!(
            d,
            (0..p).fold(ZERO, |acc, i| {
                let shifted = k.raw_add(xs[1], k.raw_mul(a.raw(), k.from_int(i as i64).raw()));
                k.raw_add(acc, f.eval_raw(shifted).raw())
            }),
            "derivative not constant on a coset"
        );
        for &x in &xs {
            values[k.raw_code(x) as usize] = k.elem(d);
        }
    }
    let mut fibers = BTreeMap::new();
    for v in &values {
        *fibers.entry(k.code(*v)).or_insert(0) += 1;
    }
    Ok(DerivativeMap {
        field: k.clone(),
        direction: a,
        values,
        fibers,
    })
}

/// Whether every fiber has size `0` or `p`, together with the largest fiber.
pub fn is_p_to_one(m: &DerivativeMap) -> (bool, usize) {
    let p = m.field.p() as usize;
    let max = m.max_fiber();
    (m.fibers.values().all(|&c| c == p), max)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub a: FieldElem,
    pub b: FieldElem,
}

/// Result of the exhaustive GAPN check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapnVerdict {
    pub is_gapn: bool,
    pub worst_fiber: u64,
    /// Smallest direction (by vector code) with a fiber above `p`, and the
    /// smallest such image value in that direction.
    pub witness: Option<Witness>,
    /// `(a, max fiber)` for every nonzero `a` in log order. Directions that
    /// were aborted early report the partial maximum; the witness direction
    /// is always counted in full.
    pub per_direction: Vec<(FieldElem, u64)>,
}

/// Per-term tables `T_j(Y) = D_1 X^{d_j}(Y)` on coset representatives.
struct Tables {
    field: Field,
    coeffs: Vec<u32>,
    exps: Vec<u64>,
    tables: Vec<Vec<u32>>,
}

impl Tables {
    fn new(f: &SparsePoly) -> Self {
        let k = f.field().clone();
        let p = k.p();
        let reps = k.order() / p;
        let mut coeffs = Vec::new();
        let mut exps = Vec::new();
        let mut tables = Vec::new();
        for &(e, c) in f.terms() {
            let t: Vec<u32> = (0..reps)
                .map(|r| {
                    (0..p).fold(ZERO, |acc, i| {
                        let y = k.from_code(r * p + i).raw();
                        k.raw_add(acc, k.raw_pow(y, e as i128))
                    })
                })
                .collect();
            if t.iter().all(|&v| v == ZERO) {
                continue;
            }
            coeffs.push(c.raw());
            exps.push(e);
            tables.push(t);
        }
        Tables {
            field: k,
            coeffs,
            exps,
            tables,
        }
    }

    fn scaled_coeffs(&self, a: u32) -> Vec<u32> {
        let k = &self.field;
        self.coeffs
            .iter()
            .zip(&self.exps)
            .map(|(&c, &e)| k.raw_mul(c, k.raw_pow(a, e as i128)))
            .collect()
    }

    #[inline]
    fn value(&self, coeffs: &[u32], r: usize) -> u32 {
        let k = &self.field;
        let mut v = ZERO;
        for (c, t) in coeffs.iter().zip(&self.tables) {
            v = k.raw_add(v, k.raw_mul(*c, t[r]));
        }
        v
    }

    fn reps(&self) -> usize {
        (self.field.order() / self.field.p()) as usize
    }

    /// Largest number of coset representatives sharing one value, stopping
    /// as soon as two collide when `early_abort` is set.
    fn max_rep_count(&self, a: u32, scratch: &mut Scratch, early_abort: bool) -> u32 {
        let coeffs = self.scaled_coeffs(a);
        scratch.generation += 1;
        let gen = scratch.generation;
        let zero_slot = self.field.order() as usize - 1;
        let mut max = 0;
        for r in 0..self.reps() {
            let v = self.value(&coeffs, r);
            let slot = if v == ZERO { zero_slot } else { v as usize };
            let c = if scratch.stamp[slot] == gen {
                scratch.count[slot] + 1
            } else {
                scratch.stamp[slot] = gen;
                1
            };
            scratch.count[slot] = c;
            if c > max {
                max = c;
                if early_abort && max > 1 {
                    break;
                }
            }
        }
        max
    }

    /// Smallest image value (by code) hit by more than one representative,
    /// with the largest representative count in that direction.
    fn smallest_collision(&self, a: u32) -> (Option<u32>, u32) {
        let k = &self.field;
        let coeffs = self.scaled_coeffs(a);
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for r in 0..self.reps() {
            *counts.entry(k.raw_code(self.value(&coeffs, r))).or_insert(0) += 1;
        }
        let max = counts.values().copied().max().unwrap_or(0);
        (counts.into_iter().find(|&(_, c)| c > 1).map(|(code, _)| code), max)
    }
}

struct Scratch {
    generation: u32,
    stamp: Vec<u32>,
    count: Vec<u32>,
}

impl Scratch {
    fn new(q: usize) -> Self {
        Scratch {
            generation: 0,
            stamp: vec![0; q],
            count: vec![0; q],
        }
    }
}

/// Work above which directions are checked in parallel.
const PARALLEL_THRESHOLD: u64 = 1 << 16;

/// Exhaustive GAPN check over all nonzero directions.
pub fn is_gapn(f: &SparsePoly) -> GapnVerdict {
    check_gapn(f, true)
}

/// Same as [`is_gapn`], never spawning parallel work.
pub fn is_gapn_serial(f: &SparsePoly) -> GapnVerdict {
    check_gapn(f, false)
}

fn check_gapn(f: &SparsePoly, allow_parallel: bool) -> GapnVerdict {
    let k = f.field();
    let p = k.p() as u64;
    let q = k.order() as u64;
    let group = q - 1;
    let classes = group / (p - 1);

    if f.is_zero() {
        // constant derivative: one fiber of size q
        let is_gapn = q <= p;
        let a = k.one();
        return GapnVerdict {
            is_gapn,
            worst_fiber: q,
            witness: (!is_gapn).then(|| Witness { a, b: k.zero() }),
            per_direction: k.nonzero_elements().map(|a| (a, q)).collect(),
        };
    }

    let tables = Tables::new(f);
    if tables.tables.is_empty() {
        // every derivative vanishes identically
        let is_gapn = q <= p;
        let a = k.from_code(1);
        return GapnVerdict {
            is_gapn,
            worst_fiber: q,
            witness: (!is_gapn).then(|| Witness { a, b: k.zero() }),
            per_direction: k.nonzero_elements().map(|a| (a, q)).collect(),
        };
    }

    let work = classes * (q / p) * tables.tables.len() as u64;
    let counts: Vec<u32> = if allow_parallel && work >= PARALLEL_THRESHOLD {
        (0..classes as u32)
            .into_par_iter()
            .map_init(
                || Scratch::new(q as usize),
                |s, a| tables.max_rep_count(a, s, true),
            )
            .collect()
    } else {
        let mut s = Scratch::new(q as usize);
        (0..classes as u32)
            .map(|a| tables.max_rep_count(a, &mut s, true))
            .collect()
    };

    let mut counts = counts;
    let witness = if counts.iter().all(|&c| c <= 1) {
        None
    } else {
        // all members of a failing class fail with identical fibers
        let a = counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 1)
            .flat_map(|(s, _)| (0..p - 1).map(move |j| s as u64 + j * classes))
            .map(|t| k.elem(t as u32))
            .min_by_key(|&a| k.code(a))
            .unwrap();
        let (b, full) = tables.smallest_collision(a.raw());
        counts[(a.raw() as u64 % classes) as usize] = full;
        Some(Witness {
            a,
            b: k.from_code(b.expect("failing direction has a collision")),
        })
    };
    let worst_rep = counts.iter().copied().max().unwrap_or(0) as u64;
    let per_direction = (0..group)
        .map(|t| (k.elem(t as u32), counts[(t % classes) as usize] as u64 * p))
        .collect();
    GapnVerdict {
        is_gapn: witness.is_none(),
        worst_fiber: worst_rep * p,
        witness,
        per_direction,
    }
}

/// Checks `(D_1 X^d (x))^p = (-1)^d D_1 X^d (x)` for every `x` of `F_{p^2}`.
pub fn verify_power_identity(k: &Field, d: u64) -> Result<bool, DerivativeError> {
    if k.n() != 2 {
        return Err(DerivativeError::NotQuadratic(k.n()));
    }
    let m = SparsePoly::monomial(k, d)?;
    let dm = derivative(&m, k.one())?;
    let sign = if d.is_multiple_of(2) { k.one() } else { k.from_int(-1) };
    Ok(dm
        .values()
        .iter()
        .all(|&v| k.powu(v, k.p() as u64) == k.mul(sign, v)))
}
