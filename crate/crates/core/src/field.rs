//! Exact arithmetic in `F_{p^n}` for odd primes `p`.
//!
//! Nonzero elements are stored as discrete-log indices with respect to the
//! canonical primitive element `g = x`, where `x` is a root of the field's
//! modulus. Addition goes through a Zech-logarithm table, so every operation
//! is a handful of table lookups.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the field order `q = p^n`.
pub const DEFAULT_TABLE_CAP: u64 = 1 << 22;

/// Raw representation of zero. Nonzero elements use their log index.
pub(crate) const ZERO: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{n} exceeds the table cap {cap}")]
    TooLarge { p: u64, n: u32, cap: u64 },
    #[error("modulus must be monic of degree {expected} with coefficients below p")]
    BadModulus { expected: u32 },
    #[error("modulus {0:?} is reducible over the prime field")]
    Reducible(Vec<u32>),
    #[error("modulus {0:?} is irreducible but not primitive")]
    NotPrimitive(Vec<u32>),
    #[error("no primitive polynomial of degree {n} over F_{p}")]
    NoPrimitive { p: u32, n: u32 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("zero has no inverse")]
    DivisionByZero,
    #[error("0 raised to a negative power")]
    ZeroNegativePower,
    #[error("element is zero")]
    ZeroElement,
    #[error("exponent N must be positive")]
    ZeroExponent,
    #[error("Frobenius index {r} out of range for extension degree {n}")]
    FrobeniusIndex { r: u32, n: u32 },
    #[error("coefficient vector has length {got}, expected at most {n}")]
    BadCoefficients { got: usize, n: u32 },
}

/// Shared handle to an immutable field context.
pub type Field = Arc<FieldCtx>;

/// One element of a specific field.
///
/// The `owner` tag identifies the field (derived from `p`, `n` and the
/// modulus), so elements of two separately constructed but identical
/// fields are interchangeable.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    owner: u64,
    raw: u32,
}

impl FieldElem {
    pub fn is_zero(self) -> bool {
        self.raw == ZERO
    }

    /// Discrete logarithm to base `g`, or `None` for zero.
    pub fn log(self) -> Option<u32> {
        (self.raw != ZERO).then_some(self.raw)
    }

    pub fn owner(self) -> u64 {
        self.owner
    }

    pub(crate) fn raw(self) -> u32 {
        self.raw
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.log() {
            None => write!(f, "0"),
            Some(0) => write!(f, "1"),
            Some(i) => write!(f, "g^{i}"),
        }
    }
}

/// Serializable field description: `{"p": .., "n": .., "modulus": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

/// An immutable description of `F_{p^n}` with its log/antilog tables.
pub struct FieldCtx {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    tag: u64,
    /// `antilog[i]` is the vector code of `g^i`.
    antilog: Vec<u32>,
    /// `log[v]` is the log of the element with vector code `v`; `log[0] = ZERO`.
    log: Vec<u32>,
    /// `zech[i]` is the raw form of `1 + g^i`.
    zech: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m.is_multiple_of(2) {
        return m == 2;
    }
    let mut d = 3;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Builds `F_{p^n}` with the default table cap.
pub fn make_field(p: u64, n: u32, modulus: Option<&[u32]>) -> Result<Field, FieldError> {
    FieldCtx::new(p, n, modulus, DEFAULT_TABLE_CAP).map(Arc::new)
}

/// Builds the field described by a [`FieldSpec`].
pub fn field_from_spec(spec: &FieldSpec, cap: u64) -> Result<Field, FieldError> {
    FieldCtx::new(spec.p, spec.n, spec.modulus.as_deref(), cap).map(Arc::new)
}

/// Multiplication by `x` modulo a monic `f`, on a coefficient vector.
fn times_x(v: &mut [u32], f: &[u32], p: u32) {
    let n = v.len();
    let top = v[n - 1];
    for i in (1..n).rev() {
        v[i] = v[i - 1];
    }
    v[0] = 0;
    if top != 0 {
        for i in 0..n {
            v[i] = (v[i] + (p - f[i]) * top % p) % p;
        }
    }
}

fn encode(v: &[u32], p: u32) -> u32 {
    v.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn decode(mut code: u32, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let c = code % p;
            code /= p;
            c
        })
        .collect()
}

/// Powers of `x` modulo `f` (monic, constant term first, length `n + 1`),
/// returned as vector codes, provided `x` has multiplicative order `q - 1`.
fn primitive_powers(f: &[u32], p: u32, q: u32) -> Option<Vec<u32>> {
    let n = f.len() - 1;
    if f[0] == 0 {
        return None;
    }
    let mut cur = vec![0u32; n];
    cur[0] = 1;
    let mut out = Vec::with_capacity(q as usize - 1);
    for i in 0..q - 1 {
        let code = encode(&cur, p);
        if i > 0 && code == 1 {
            return None;
        }
        out.push(code);
        times_x(&mut cur, &f[..n], p);
    }
    (encode(&cur, p) == 1).then_some(out)
}

/// Remainder of `a` modulo monic `b` over `F_p` (constant term first).
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - db;
            for i in 0..db {
                r[shift + i] = (r[shift + i] + (p - b[i]) * lead % p) % p;
            }
        }
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    for deg in 1..=n / 2 {
        let count = (p as u64).pow(deg as u32);
        for code in 0..count {
            let mut g = decode(code as u32, p, deg as u32);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn field_tag(p: u32, n: u32, modulus: &[u32]) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in [p, n].iter().chain(modulus) {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
    }
    h
}

impl FieldCtx {
    /// Constructs `F_{p^n}`. Without an explicit modulus the lexicographically
    /// smallest monic primitive polynomial (constant term compared first) is
    /// selected, so `x` itself is the primitive element.
    pub fn new(p: u64, n: u32, modulus: Option<&[u32]>, cap: u64) -> Result<Self, FieldError> {
        if p == 2 || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u128).checked_pow(n).unwrap_or(u128::MAX);
        if q > cap as u128 || q > u32::MAX as u128 / 2 {
            return Err(FieldError::TooLarge { p, n, cap });
        }
        let p = p as u32;
        let q = q as u32;

        let (modulus, antilog) = match modulus {
            Some(m) => {
                if m.len() != n as usize + 1 || m[n as usize] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(FieldError::BadModulus { expected: n });
                }
                match primitive_powers(m, p, q) {
                    Some(t) => (m.to_vec(), t),
                    None if is_irreducible(m, p) => return Err(FieldError::NotPrimitive(m.to_vec())),
                    None => return Err(FieldError::Reducible(m.to_vec())),
                }
            }
            None => Self::smallest_primitive(p, n, q)?,
        };

        let mut log = vec![ZERO; q as usize];
        for (i, &code) in antilog.iter().enumerate() {
            log[code as usize] = i as u32;
        }
        let zech = antilog
            .iter()
            .map(|&code| {
                // adding 1 only touches the constant coefficient
                let c0 = code % p;
                log[(code - c0 + (c0 + 1) % p) as usize]
            })
            .collect();
        let tag = field_tag(p, n, &modulus);
        Ok(FieldCtx {
            p,
            n,
            q,
            modulus,
            tag,
            antilog,
            log,
            zech,
        })
    }

    fn smallest_primitive(p: u32, n: u32, q: u32) -> Result<(Vec<u32>, Vec<u32>), FieldError> {
        // Codes enumerate the low coefficients with the constant term as the
        // most significant digit, which is the constant-term-first order.
        for code in 0..q {
            let mut f: Vec<u32> = decode(code, p, n).into_iter().rev().collect();
            f.push(1);
            if let Some(t) = primitive_powers(&f, p, q) {
                return Ok((f, t));
            }
        }
        Err(FieldError::NoPrimitive { p, n })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Field order `q = p^n`.
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, constant term first, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn tag(&self) -> u64 {
        self.tag
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p as u64,
            n: self.n,
            modulus: Some(self.modulus.clone()),
        }
    }

    pub(crate) fn group_order(&self) -> u32 {
        self.q - 1
    }

    pub(crate) fn elem(&self, raw: u32) -> FieldElem {
        FieldElem {
            owner: self.tag,
            raw,
        }
    }

    pub fn zero(&self) -> FieldElem {
        self.elem(ZERO)
    }

    pub fn one(&self) -> FieldElem {
        self.elem(0)
    }

    /// The canonical primitive element `g` (the class of `x`).
    pub fn generator(&self) -> FieldElem {
        self.elem(1 % self.group_order())
    }

    /// `g^i` for any integer `i`.
    pub fn gen_pow(&self, i: i64) -> FieldElem {
        self.elem(i.rem_euclid(self.group_order() as i64) as u32)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, c: i64) -> FieldElem {
        self.from_code(c.rem_euclid(self.p as i64) as u32)
    }

    /// Element whose coefficient vector has the base-`p` digits of `code`.
    pub fn from_code(&self, code: u32) -> FieldElem {
        assert!(code < self.q, "vector code {code} out of range");
        self.elem(self.log[code as usize])
    }

    /// Canonical integer encoding `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`.
    pub fn code(&self, y: FieldElem) -> u32 {
        self.check(y);
        self.raw_code(y.raw)
    }

    pub(crate) fn raw_code(&self, raw: u32) -> u32 {
        if raw == ZERO {
            0
        } else {
            self.antilog[raw as usize]
        }
    }

    /// Element from its coefficient vector (constant term first). Missing
    /// trailing coefficients are zero; entries are reduced mod `p`.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FieldElem, FieldError> {
        if coeffs.len() > self.n as usize {
            return Err(FieldError::BadCoefficients {
                got: coeffs.len(),
                n: self.n,
            });
        }
        let digits: Vec<u32> = coeffs
            .iter()
            .map(|&c| c.rem_euclid(self.p as i64) as u32)
            .collect();
        Ok(self.from_code(encode(&digits, self.p)))
    }

    pub fn coeffs(&self, y: FieldElem) -> Vec<u32> {
        decode(self.code(y), self.p, self.n)
    }

    /// All elements in vector-code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q).map(|c| self.from_code(c))
    }

    /// Nonzero elements in log order `g^0, g^1, ...`.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.group_order()).map(|i| self.elem(i))
    }

    pub fn owns(&self, y: FieldElem) -> bool {
        y.owner == self.tag
    }

    fn check(&self, y: FieldElem) {
        assert!(self.owns(y), "element from a different field");
    }

    pub fn ensure(&self, y: FieldElem) -> Result<FieldElem, FieldError> {
        if self.owns(y) {
            Ok(y)
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    #[inline]
    pub(crate) fn raw_mul(&self, a: u32, b: u32) -> u32 {
        if a == ZERO || b == ZERO {
            return ZERO;
        }
        let m = self.q - 1;
        let s = a + b;
        if s >= m {
            s - m
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn raw_add(&self, a: u32, b: u32) -> u32 {
        if a == ZERO {
            return b;
        }
        if b == ZERO {
            return a;
        }
        let m = self.q - 1;
        let d = if b >= a { b - a } else { b + m - a };
        let z = self.zech[d as usize];
        if z == ZERO {
            return ZERO;
        }
        let s = a + z;
        if s >= m {
            s - m
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn raw_neg(&self, a: u32) -> u32 {
        if a == ZERO {
            return ZERO;
        }
        let m = self.q - 1;
        let s = a + m / 2;
        if s >= m {
            s - m
        } else {
            s
        }
    }

    pub(crate) fn raw_pow(&self, a: u32, e: i128) -> u32 {
        if a == ZERO {
            return if e == 0 { 0 } else { ZERO };
        }
        let m = (self.q - 1) as i128;
        (a as i128 * e.rem_euclid(m)).rem_euclid(m) as u32
    }

    pub fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.check(x);
        self.check(y);
        self.elem(self.raw_add(x.raw, y.raw))
    }

    pub fn neg(&self, x: FieldElem) -> FieldElem {
        self.check(x);
        self.elem(self.raw_neg(x.raw))
    }

    pub fn sub(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.check(x);
        self.check(y);
        self.elem(self.raw_mul(x.raw, y.raw))
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem, FieldError> {
        self.ensure(x)?;
        if x.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.elem(self.raw_pow(x.raw, -1)))
    }

    pub fn div(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x^e` with `0^0 = 1`; a negative power of zero is an error.
    pub fn pow(&self, x: FieldElem, e: i128) -> Result<FieldElem, FieldError> {
        self.ensure(x)?;
        if x.is_zero() && e < 0 {
            return Err(FieldError::ZeroNegativePower);
        }
        Ok(self.elem(self.raw_pow(x.raw, e)))
    }

    /// `x^e` for a non-negative exponent.
    pub fn powu(&self, x: FieldElem, e: u64) -> FieldElem {
        self.check(x);
        self.elem(self.raw_pow(x.raw, e as i128))
    }

    pub fn checked_add(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem, FieldError> {
        self.ensure(x)?;
        self.ensure(y)?;
        Ok(self.add(x, y))
    }

    pub fn checked_sub(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem, FieldError> {
        self.ensure(x)?;
        self.ensure(y)?;
        Ok(self.sub(x, y))
    }

    pub fn checked_mul(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem, FieldError> {
        self.ensure(x)?;
        self.ensure(y)?;
        Ok(self.mul(x, y))
    }

    /// `y^{p^r}` for `0 <= r < n`.
    pub fn frobenius(&self, y: FieldElem, r: u32) -> Result<FieldElem, FieldError> {
        self.ensure(y)?;
        if r >= self.n {
            return Err(FieldError::FrobeniusIndex { r, n: self.n });
        }
        Ok(self.powu(y, (self.p as u64).pow(r)))
    }

    /// Absolute trace `sum_r y^{p^r}`.
    pub fn trace(&self, y: FieldElem) -> FieldElem {
        (0..self.n).fold(self.zero(), |acc, r| {
            self.add(acc, self.powu(y, (self.p as u64).pow(r)))
        })
    }

    pub fn element_order(&self, y: FieldElem) -> Result<u64, FieldError> {
        self.ensure(y)?;
        let i = y.log().ok_or(FieldError::ZeroElement)? as u64;
        let m = self.group_order() as u64;
        Ok(m / gcd(i, m))
    }

    /// Whether `y = z^N` for some `z`, tested as `y^{(q-1)/gcd(N, q-1)} = 1`.
    pub fn is_nth_power(&self, y: FieldElem, big_n: u64) -> Result<bool, FieldError> {
        self.ensure(y)?;
        if y.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        if big_n == 0 {
            return Err(FieldError::ZeroExponent);
        }
        let m = self.group_order() as u64;
        Ok(self.powu(y, m / gcd(big_n, m)) == self.one())
    }

    /// The subgroup `{g^{im}}` generated by `g^m`, in order of increasing `i`.
    pub fn subgroup(&self, m: u64) -> Vec<FieldElem> {
        let order = self.group_order() as u64;
        let size = order / gcd(m, order);
        (0..size)
            .map(|i| self.elem(((i as u128 * m as u128) % order as u128) as u32))
            .collect()
    }

    /// Element of the prime field as an integer in `0..p`, if `y` lies there.
    pub fn as_prime_field(&self, y: FieldElem) -> Option<u32> {
        let code = self.code(y);
        (code < self.p).then_some(code)
    }
}
