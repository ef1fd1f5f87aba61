//! Monomial predicates, binomial sufficiency, and the explicit binomial and
//! trinomial families over `F_{p^2}`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::derivative::{derivative, DerivativeError};
use crate::field::{gcd, Field, FieldElem, FieldError};
use crate::poly::{PolyError, SparsePoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("construction requires F_{{p^2}}, got n = {0}")]
    NotQuadratic(u32),
    #[error("element must be nonzero")]
    ZeroElement,
    #[error("{0} is a Mersenne prime")]
    Mersenne(u32),
    #[error("p = {0} is not congruent to 2 mod 3")]
    NotTwoModThree(u32),
    #[error("k + l = {0} is even")]
    EvenDigitSum(u32),
    #[error("gcd(s, p^2 - 1) = {0} is not 1")]
    SNotCoprime(u64),
    #[error("2vX^5 + uX^4 + u^pX + 2v^p has a root in the subgroup of (p-1)-th powers")]
    TrinomialCondition,
    #[error("no suitable u exists over F_{{{0}^2}}")]
    NoTrinomialU(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Derivative(#[from] DerivativeError),
}

type Result<T> = std::result::Result<T, ConstructionError>;

fn range(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::Range(msg.into())
}

fn require_quadratic(k: &Field) -> Result<()> {
    if k.n() == 2 {
        Ok(())
    } else {
        Err(ConstructionError::NotQuadratic(k.n()))
    }
}

fn nonzero(k: &Field, y: FieldElem) -> Result<FieldElem> {
    k.ensure(y)?;
    if y.is_zero() {
        Err(ConstructionError::ZeroElement)
    } else {
        Ok(y)
    }
}

fn check_monomial_params(p: u32, n: u32, k: u32, l: u32, r1: u32, r2: u32) -> Result<()> {
    if k >= p || l >= p {
        return Err(range(format!("digits k = {k}, l = {l} must be below p = {p}")));
    }
    if r1 >= n || r2 >= n || r1 == r2 {
        return Err(range(format!("need distinct r1, r2 below n = {n}, got {r1}, {r2}")));
    }
    if k + l < p || k + l >= 2 * (p - 1) {
        return Err(range(format!("k + l = {} outside [p, 2(p-1))", k + l)));
    }
    Ok(())
}

/// Exponent `k p^{r1} + l p^{r2}`.
pub fn two_digit_exponent(p: u32, k: u32, l: u32, r1: u32, r2: u32) -> u64 {
    k as u64 * (p as u64).pow(r1) + l as u64 * (p as u64).pow(r2)
}

/// Sufficient condition for `X^{k p^{r1} + l p^{r2}}` to be GAPN over
/// `F_{p^n}`: `gcd(r1 - r2, n) = 1` and `gcd(k + l - (p - 1), p^n - 1) = 1`.
pub fn monomial_sufficient(p: u32, n: u32, k: u32, l: u32, r1: u32, r2: u32) -> Result<bool> {
    check_monomial_params(p, n, k, l, r1, r2)?;
    let excess = (k + l - (p - 1)) as u64;
    Ok(gcd(r1.abs_diff(r2) as u64, n as u64) == 1
        && gcd(excess, (p as u64).pow(n) - 1) == 1)
}

/// Necessary condition: `gcd(r1 - r2, n) = 1` and
/// `gcd(k + l - (p - 1), p^{n1} - 1) = 1` for every proper divisor `n1` of
/// `n`. A `false` return proves the monomial is not GAPN.
pub fn monomial_necessary(p: u32, n: u32, k: u32, l: u32, r1: u32, r2: u32) -> Result<bool> {
    check_monomial_params(p, n, k, l, r1, r2)?;
    let excess = (k + l - (p - 1)) as u64;
    Ok(gcd(r1.abs_diff(r2) as u64, n as u64) == 1
        && (1..n)
            .filter(|n1| n.is_multiple_of(*n1))
            .all(|n1| gcd(excess, (p as u64).pow(n1) - 1) == 1))
}

/// Whether `H = 0` in direction `a` for `X^{d1} + u X^{d2}`, i.e.
/// `(-1)^{d2+1} (u a^{d2-d1})^{p-1} = 1`.
pub fn binomial_h_vanishes(
    k: &Field,
    d1: u64,
    d2: u64,
    u: FieldElem,
    a: FieldElem,
) -> Result<bool> {
    require_quadratic(k)?;
    let u = nonzero(k, u)?;
    let a = nonzero(k, a)?;
    let t = k.mul(u, k.pow(a, d2 as i128 - d1 as i128)?);
    let lhs = k.powu(t, k.p() as u64 - 1);
    let lhs = if (d2 + 1).is_multiple_of(2) { lhs } else { k.neg(lhs) };
    Ok(lhs == k.one())
}

/// Which case of the binomial sufficiency argument applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinomialCase {
    /// `d2` odd and `u` a non-square.
    NonSquare,
    /// `d2` even, and `N` odd with `N | p + 1`, `N | d2 - d1`, `u` not an `N`-th power.
    NotNthPower(u64),
}

/// Decides the sufficient condition for `X^{d1} + u X^{d2}` to be GAPN,
/// given that `X^{d1}` is GAPN (not checked here).
pub fn binomial_sufficient_case(
    k: &Field,
    d1: u64,
    d2: u64,
    u: FieldElem,
) -> Result<Option<BinomialCase>> {
    require_quadratic(k)?;
    let u = nonzero(k, u)?;
    let q = k.order() as u64;
    for d in [d1, d2] {
        if d == 0 || d >= q {
            return Err(range(format!("exponent {d} outside 1..=q-1")));
        }
    }
    if d2 % 2 == 1 {
        return Ok((!k.is_nth_power(u, 2)?).then_some(BinomialCase::NonSquare));
    }
    let p1 = k.p() as u64 + 1;
    let diff = d2.abs_diff(d1);
    for big_n in (3..=p1).step_by(2) {
        if p1.is_multiple_of(big_n) && diff.is_multiple_of(big_n) && !k.is_nth_power(u, big_n)? {
            return Ok(Some(BinomialCase::NotNthPower(big_n)));
        }
    }
    Ok(None)
}

pub fn binomial_sufficient(k: &Field, d1: u64, d2: u64, u: FieldElem) -> Result<bool> {
    Ok(binomial_sufficient_case(k, d1, d2, u)?.is_some())
}

/// Largest odd divisor of `m`, by repeated halving.
pub fn odd_part(mut m: u64) -> u64 {
    assert!(m > 0, "odd_part of zero");
    while m.is_multiple_of(2) {
        m /= 2;
    }
    m
}

/// `p + 1` is a power of two.
pub fn is_mersenne(p: u64) -> bool {
    odd_part(p + 1) == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    OddBinomial,
    Mod3Binomial,
    EvenBinomial,
    Trinomial,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::OddBinomial => "odd-binomial",
            Family::Mod3Binomial => "mod3-binomial",
            Family::EvenBinomial => "even-binomial",
            Family::Trinomial => "trinomial",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "odd-binomial" => Ok(Family::OddBinomial),
            "mod3-binomial" => Ok(Family::Mod3Binomial),
            "even-binomial" => Ok(Family::EvenBinomial),
            "trinomial" => Ok(Family::Trinomial),
            _ => Err(format!("unknown family {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecipeParams {
    pub k: Option<u32>,
    pub l: Option<u32>,
    pub h: Option<u32>,
    /// Odd divisor of `p + 1` used by the even-degree binomials.
    pub big_n: Option<u64>,
    pub u: Option<FieldElem>,
    pub v: Option<FieldElem>,
}

#[derive(Debug, Clone)]
pub struct ConstructionRecipe {
    pub family: Family,
    pub p: u32,
    pub params: RecipeParams,
    pub result: SparsePoly,
    pub claimed_degree: u64,
}

fn check_h(p: u32, h: u32, min: u32) -> Result<()> {
    if h < min || h >= p {
        return Err(range(format!("h = {h} outside {min}..=p-1")));
    }
    Ok(())
}

/// `X^{2p-1} + g X^{kp+l}` with `k + l` odd; GAPN of degree `max(p, k + l)`.
pub fn build_odd_binomial(k: &Field, dk: u32, dl: u32) -> Result<ConstructionRecipe> {
    require_quadratic(k)?;
    let p = k.p();
    if dk >= p || dl >= p {
        return Err(range(format!("digits k = {dk}, l = {dl} must be below p = {p}")));
    }
    if (dk + dl).is_multiple_of(2) {
        return Err(ConstructionError::EvenDigitSum(dk + dl));
    }
    let g = k.generator();
    let d1 = 2 * p as u64 - 1;
    let d2 = dk as u64 * p as u64 + dl as u64;
    let result = SparsePoly::new(k, [(d1, k.one()), (d2, g)])?;
    Ok(ConstructionRecipe {
        family: Family::OddBinomial,
        p,
        params: RecipeParams {
            k: Some(dk),
            l: Some(dl),
            u: Some(g),
            ..Default::default()
        },
        result,
        claimed_degree: (p as u64).max((dk + dl) as u64),
    })
}

/// `X^{2p-1} + g X^{h(p+1)}` for `p = 2 mod 3`; GAPN of degree `max(p, 2h)`.
pub fn build_mod3_binomial(k: &Field, h: u32) -> Result<ConstructionRecipe> {
    require_quadratic(k)?;
    let p = k.p();
    if p % 3 != 2 {
        return Err(ConstructionError::NotTwoModThree(p));
    }
    check_h(p, h, 1)?;
    let g = k.generator();
    let d1 = 2 * p as u64 - 1;
    let d2 = h as u64 * (p as u64 + 1);
    let result = SparsePoly::new(k, [(d1, k.one()), (d2, g)])?;
    Ok(ConstructionRecipe {
        family: Family::Mod3Binomial,
        p,
        params: RecipeParams {
            h: Some(h),
            big_n: Some(3),
            u: Some(g),
            ..Default::default()
        },
        result,
        claimed_degree: (p as u64).max(2 * h as u64),
    })
}

/// `X^{((p-N)/2) p + (p+N)/2} + g X^{h(p+1)}` with `N` the odd part of
/// `p + 1`; GAPN of degree `max(p, 2h)` whenever `p` is not Mersenne.
pub fn build_even_binomial(k: &Field, h: u32) -> Result<ConstructionRecipe> {
    require_quadratic(k)?;
    let p = k.p();
    let big_n = odd_part(p as u64 + 1);
    if big_n == 1 {
        return Err(ConstructionError::Mersenne(p));
    }
    check_h(p, h, 1)?;
    let pp = p as u64;
    let k1 = (pp - big_n) / 2;
    let l1 = (pp + big_n) / 2;
    assert_eq!(k1 + l1 - (pp - 1), 1);
    let d1 = k1 * pp + l1;
    debug_assert_eq!(2 * d1, pp * pp + pp - big_n * (pp - 1));
    let d2 = h as u64 * (pp + 1);
    assert_eq!((d2 as i64 - d1 as i64).rem_euclid(big_n as i64), 0);
    let g = k.generator();
    let result = SparsePoly::new(k, [(d1, k.one()), (d2, g)])?;
    Ok(ConstructionRecipe {
        family: Family::EvenBinomial,
        p,
        params: RecipeParams {
            h: Some(h),
            big_n: Some(big_n),
            u: Some(g),
            ..Default::default()
        },
        result,
        claimed_degree: pp.max(2 * h as u64),
    })
}

/// Binomial coefficients `C(m, i) mod p` for `i = 0..=m`.
fn binomial_row_mod(m: u32, p: u32) -> Vec<u32> {
    let mut row = vec![1u32];
    for _ in 0..m {
        let mut next = vec![1u32; row.len() + 1];
        for i in 1..row.len() {
            next[i] = (row[i - 1] + row[i]) % p;
        }
        row = next;
    }
    row
}

fn check_s(k: &Field, s: u32) -> Result<()> {
    let p = k.p();
    if s < 1 || s + 2 > p {
        return Err(range(format!("s = {s} outside 1..=p-2")));
    }
    let g = gcd(s as u64, k.order() as u64 - 1);
    if g != 1 {
        return Err(ConstructionError::SNotCoprime(g));
    }
    Ok(())
}

/// `sum_{i=s}^{p-1} c_i X^{i p + (p - 1 + s - i)}`, with `coeffs = [c_s, ..., c_{p-1}]`
/// (a shorter slice leaves the remaining coefficients zero).
pub fn os_polynomial(k: &Field, s: u32, coeffs: &[FieldElem]) -> Result<SparsePoly> {
    require_quadratic(k)?;
    check_s(k, s)?;
    let p = k.p() as u64;
    if coeffs.len() > (p - s as u64) as usize {
        return Err(range("too many coefficients"));
    }
    let terms = coeffs.iter().enumerate().map(|(j, &c)| {
        let i = s as u64 + j as u64;
        (i * p + (p - 1 + s as u64 - i), c)
    });
    Ok(SparsePoly::new(k, terms)?)
}

/// Closed-form test that `D_a` of [`os_polynomial`] is `p`-to-1:
/// `sum_{i=0}^{p-1-s} c_{i+s} C(p-1-s, i) (-a^{p-1})^i != 0`.
pub fn os_derivative_condition(
    k: &Field,
    s: u32,
    coeffs: &[FieldElem],
    a: FieldElem,
) -> Result<bool> {
    require_quadratic(k)?;
    check_s(k, s)?;
    let a = nonzero(k, a)?;
    let p = k.p();
    let m = p - 1 - s;
    if coeffs.len() > m as usize + 1 {
        return Err(range("too many coefficients"));
    }
    let binom = binomial_row_mod(m, p);
    let minus_big_a = k.neg(k.powu(a, p as u64 - 1));
    let mut sum = k.zero();
    let mut power = k.one();
    for (i, &c) in coeffs.iter().enumerate() {
        k.ensure(c)?;
        let term = k.mul(k.mul(c, k.from_int(binom[i] as i64)), power);
        sum = k.add(sum, term);
        power = k.mul(power, minus_big_a);
    }
    Ok(!sum.is_zero())
}

/// `2v A^5 + u A^4 + u^p A + 2v^p != 0` for every `A` in `<g^{p-1}>`.
pub fn trinomial_condition(k: &Field, u: FieldElem, v: FieldElem) -> Result<bool> {
    require_quadratic(k)?;
    let u = nonzero(k, u)?;
    let v = nonzero(k, v)?;
    let p = k.p() as u64;
    let two_v = k.mul(k.from_int(2), v);
    let two_vp = k.powu(two_v, p);
    let up = k.powu(u, p);
    Ok(k.subgroup(p - 1).into_iter().all(|a| {
        let val = [
            k.mul(two_v, k.powu(a, 5)),
            k.mul(u, k.powu(a, 4)),
            k.mul(up, a),
            two_vp,
        ]
        .into_iter()
        .fold(k.zero(), |acc, t| k.add(acc, t));
        !val.is_zero()
    }))
}

/// First `u` (by increasing log index) satisfying [`trinomial_condition`]
/// with the given `v`.
pub fn find_trinomial_u_with(k: &Field, v: FieldElem) -> Result<Option<FieldElem>> {
    require_quadratic(k)?;
    for u in k.nonzero_elements() {
        if trinomial_condition(k, u, v)? {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// First `u` with `X^5 + u X^4 + u^p X + 1` root-free on `<g^{p-1}>`, i.e.
/// the trinomial condition with `v = 2^{-1}`. Requires `p > 3`.
pub fn find_trinomial_u(k: &Field) -> Result<FieldElem> {
    require_quadratic(k)?;
    let p = k.p();
    if p <= 3 {
        return Err(range(format!("p = {p} must exceed 3")));
    }
    let v = k.inv(k.from_int(2))?;
    find_trinomial_u_with(k, v)?.ok_or(ConstructionError::NoTrinomialU(p))
}

/// `u X^{2p-1} + v X^{3p-2} + X^{h(p+1)}`; GAPN of degree `max(p, 2h)`
/// whenever the trinomial condition holds.
pub fn build_trinomial(
    k: &Field,
    h: u32,
    u: FieldElem,
    v: FieldElem,
) -> Result<ConstructionRecipe> {
    require_quadratic(k)?;
    let p = k.p();
    check_h(p, h, 0)?;
    if !trinomial_condition(k, u, v)? {
        return Err(ConstructionError::TrinomialCondition);
    }
    let pp = p as u64;
    let result = SparsePoly::new(
        k,
        [
            (2 * pp - 1, u),
            (3 * pp - 2, v),
            (h as u64 * (pp + 1), k.one()),
        ],
    )?;
    Ok(ConstructionRecipe {
        family: Family::Trinomial,
        p,
        params: RecipeParams {
            h: Some(h),
            u: Some(u),
            v: Some(v),
            ..Default::default()
        },
        result,
        claimed_degree: pp.max(2 * h as u64),
    })
}

/// Constant `c` with `(D_1 F(X))^{p^r} = c D_1 F(X)` for all `X`, if any.
/// An identically zero derivative yields `c = 0`.
pub fn derivative_conjugate_premise(f: &SparsePoly, r: u32) -> Result<Option<FieldElem>> {
    let k = f.field();
    if r < 1 || r >= k.n() {
        return Err(range(format!("r = {r} outside 1..=n-1")));
    }
    let dm = derivative(f, k.one())?;
    let e = (k.p() as u64).pow(r);
    let Some(&y0) = dm.values().iter().find(|y| !y.is_zero()) else {
        return Ok(Some(k.zero()));
    };
    let c = k.div(k.powu(y0, e), y0)?;
    Ok(dm
        .values()
        .iter()
        .all(|&y| k.powu(y, e) == k.mul(c, y))
        .then_some(c))
}

/// Algebraic degree of a recipe's function, for cross-checking `claimed_degree`.
pub fn recipe_degree(r: &ConstructionRecipe) -> Option<u64> {
    r.result.algebraic_degree()
}

/// All `(k, l, r1, r2)` accepted by the monomial predicates' preconditions.
pub fn monomial_parameter_space(p: u32, n: u32) -> Vec<(u32, u32, u32, u32)> {
    let mut out = Vec::new();
    for r1 in 0..n {
        for r2 in 0..n {
            if r1 == r2 {
                continue;
            }
            for k in 0..p {
                for l in 0..p {
                    if k + l >= p && k + l < 2 * (p - 1) {
                        out.push((k, l, r1, r2));
                    }
                }
            }
        }
    }
    out
}
