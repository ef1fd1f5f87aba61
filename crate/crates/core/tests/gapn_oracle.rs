//! Cross-checks of the coset/scaling GAPN engine against direct per-point
//! summation, and the algebraic laws of the derivative.

use std::collections::HashMap;

use gapn_core::field::{make_field, Field, FieldElem};
use gapn_core::{derivative, is_gapn, SparsePoly};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `sum_{i in F_p} F(x + i a)` straight from the definition.
fn direct(f: &SparsePoly, a: FieldElem, x: FieldElem) -> FieldElem {
    let k = f.field();
    (0..k.p()).fold(k.zero(), |acc, i| {
        let xi = k.add(x, k.mul(k.from_int(i as i64), a));
        k.add(acc, f.evaluate(xi).unwrap())
    })
}

/// Largest fiber over all nonzero directions, by brute force.
fn oracle_worst_fiber(f: &SparsePoly) -> usize {
    let k = f.field();
    k.nonzero_elements()
        .map(|a| {
            let mut fibers: HashMap<FieldElem, usize> = HashMap::new();
            for x in k.elements() {
                *fibers.entry(direct(f, a, x)).or_default() += 1;
            }
            fibers.into_values().max().unwrap()
        })
        .max()
        .unwrap()
}

fn random_poly(k: &Field, rng: &mut ChaCha8Rng, terms: usize) -> SparsePoly {
    let q = k.order();
    let t: Vec<_> = (0..terms)
        .map(|_| (rng.gen_range(0..q as u64), k.from_code(rng.gen_range(1..q))))
        .collect();
    SparsePoly::new(k, t).unwrap()
}

#[test]
fn engine_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, n, trials) in [(3, 2, 300), (5, 2, 150), (3, 3, 100), (7, 2, 60), (5, 3, 8)] {
        let k = make_field(p, n, None).unwrap();
        for t in 0..trials {
            let f = random_poly(&k, &mut rng, 1 + t % 4);
            let v = is_gapn(&f);
            let worst = oracle_worst_fiber(&f);
            assert_eq!(v.is_gapn, worst <= p as usize, "{f:?} over F_{p}^{n}");
            if v.is_gapn {
                assert_eq!(v.worst_fiber as usize, worst);
                assert!(v.witness.is_none());
            } else {
                let w = v.witness.as_ref().unwrap();
                let m = derivative(&f, w.a).unwrap();
                let fiber = m.fiber_histogram().find(|(b, _)| *b == w.b).unwrap().1;
                assert!(fiber > p as usize);
            }
        }
    }
}

#[test]
fn witness_is_smallest_failing_direction() {
    let k = make_field(5, 2, None).unwrap();
    let f = SparsePoly::monomial(&k, 22).unwrap();
    let v = is_gapn(&f);
    let w = v.witness.unwrap();
    let first = k
        .elements()
        .skip(1)
        .find(|&a| derivative(&f, a).unwrap().max_fiber() > 5)
        .unwrap();
    assert_eq!(w.a, first);
    let m = derivative(&f, first).unwrap();
    let b = m.fiber_histogram().find(|&(_, c)| c > 5).unwrap().0;
    assert_eq!(w.b, b);
}

#[test]
fn serial_and_parallel_verdicts_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let k = make_field(13, 2, None).unwrap();
    for _ in 0..20 {
        let f = random_poly(&k, &mut rng, 3);
        assert_eq!(is_gapn(&f), gapn_core::derivative::is_gapn_serial(&f));
    }
}

#[test]
fn derivative_is_coset_invariant_and_p_divisible() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [3, 5, 7] {
        let k = make_field(p, 2, None).unwrap();
        for _ in 0..10 {
            let f = random_poly(&k, &mut rng, 3);
            let a = k.gen_pow(rng.gen_range(0..k.order() as i64 - 1));
            let m = derivative(&f, a).unwrap();
            for x in k.elements() {
                assert_eq!(m.value(x), direct(&f, a, x));
                for i in 0..p {
                    let xi = k.add(x, k.mul(k.from_int(i as i64), a));
                    assert_eq!(m.value(xi), m.value(x));
                }
            }
            assert!(m.fiber_histogram().all(|(_, c)| c % p as usize == 0));
            assert_eq!(m.max_fiber() % p as usize, 0);
        }
    }
}

#[test]
fn scaling_law_for_monomials() {
    let k = make_field(5, 2, None).unwrap();
    for d in 0..25 {
        let m = SparsePoly::monomial(&k, d).unwrap();
        let d1 = derivative(&m, k.one()).unwrap();
        for a in k.nonzero_elements() {
            let da = derivative(&m, a).unwrap();
            let ainv = k.inv(a).unwrap();
            for x in k.elements() {
                let rhs = k.mul(k.powu(a, d), d1.value(k.mul(ainv, x)));
                assert_eq!(da.value(x), rhs);
            }
        }
    }
}

#[test]
fn conjugation_law() {
    let k = make_field(5, 2, None).unwrap();
    for d in 0..25 {
        let m = SparsePoly::monomial(&k, d).unwrap();
        for a in k.nonzero_elements() {
            let da = derivative(&m, a).unwrap();
            let big_a = k.powu(a, 4);
            let sign = if d % 2 == 0 { k.one() } else { k.from_int(-1) };
            let factor = k.mul(sign, k.powu(big_a, d));
            for x in k.elements() {
                let v = da.value(x);
                assert_eq!(k.powu(v, 5), k.mul(factor, v));
            }
        }
    }
}

#[test]
fn power_identity_every_exponent() {
    for p in [3u64, 5, 7] {
        let k = make_field(p, 2, None).unwrap();
        for d in 0..p * p {
            assert!(gapn_core::derivative::verify_power_identity(&k, d).unwrap());
        }
    }
}

#[test]
fn gold_and_inverse_monomials() {
    for p in [3u64, 5, 7, 11, 13] {
        let k = make_field(p, 2, None).unwrap();
        assert!(is_gapn(&SparsePoly::monomial(&k, 2 * p - 1).unwrap()).is_gapn);
        let inv = SparsePoly::monomial(&k, p * p - 2).unwrap();
        assert!(is_gapn(&inv).is_gapn);
        assert_eq!(inv.algebraic_degree(), Some(2 * p - 3));
    }
}

#[test]
fn low_degree_shift_keeps_verdict() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for p in [3u64, 5] {
        let k = make_field(p, 2, None).unwrap();
        let low: Vec<u64> = (0..p * p)
            .filter(|&e| gapn_core::digit_sum(p, e) < p)
            .collect();
        for _ in 0..100 {
            let f = random_poly(&k, &mut rng, 2);
            let c = SparsePoly::new(
                &k,
                low.iter().map(|&e| (e, k.from_code(rng.gen_range(0..k.order())))),
            )
            .unwrap();
            let (a, b) = (is_gapn(&f), is_gapn(&f.add(&c).unwrap()));
            assert_eq!(a.is_gapn, b.is_gapn);
            assert_eq!(a.worst_fiber, b.worst_fiber);
        }
    }
}

#[test]
fn scaling_by_a_constant_keeps_verdict() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let k = make_field(5, 2, None).unwrap();
    for _ in 0..100 {
        let f = random_poly(&k, &mut rng, 2);
        let c = k.gen_pow(rng.gen_range(0..24));
        assert_eq!(is_gapn(&f).is_gapn, is_gapn(&f.scale(c).unwrap()).is_gapn);
    }
}

fn f25() -> Field {
    make_field(5, 2, None).unwrap()
}

proptest! {
    #[test]
    fn derivative_is_linear(
        e1 in 0u64..25, e2 in 0u64..25, c1 in 1u32..25, c2 in 1u32..25, a in 0i64..24
    ) {
        let k = f25();
        let f = SparsePoly::new(&k, [(e1, k.from_code(c1))]).unwrap();
        let g = SparsePoly::new(&k, [(e2, k.from_code(c2))]).unwrap();
        let a = k.gen_pow(a);
        let sum = derivative(&f.add(&g).unwrap(), a).unwrap();
        let (df, dg) = (derivative(&f, a).unwrap(), derivative(&g, a).unwrap());
        for x in k.elements() {
            prop_assert_eq!(sum.value(x), k.add(df.value(x), dg.value(x)));
        }
    }

    #[test]
    fn field_axioms(x in 0u32..49, y in 0u32..49, z in 0u32..49) {
        let k = make_field(7, 2, None).unwrap();
        let (x, y, z) = (k.from_code(x), k.from_code(y), k.from_code(z));
        prop_assert_eq!(k.mul(x, k.add(y, z)), k.add(k.mul(x, y), k.mul(x, z)));
        prop_assert_eq!(k.add(k.add(x, y), z), k.add(x, k.add(y, z)));
        prop_assert_eq!(k.mul(k.mul(x, y), z), k.mul(x, k.mul(y, z)));
        prop_assert_eq!(k.sub(k.add(x, y), y), x);
    }
}
