//! Every sufficient condition is checked against the exhaustive engine, and
//! every family builder against its claimed degree.

use gapn_core::constructions::*;
use gapn_core::field::{make_field, Field, FieldElem};
use gapn_core::{derivative, is_gapn, SparsePoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn field(p: u32) -> Field {
    make_field(p as u64, 2, None).unwrap()
}

#[test]
fn monomial_predicates_are_sound() {
    for (p, n) in [(3u32, 2u32), (5, 2), (7, 2), (11, 2), (3, 3), (5, 3), (3, 4)] {
        let k = make_field(p as u64, n, None).unwrap();
        for (dk, dl, r1, r2) in monomial_parameter_space(p, n) {
            let d = two_digit_exponent(p, dk, dl, r1, r2);
            let gapn = is_gapn(&SparsePoly::monomial(&k, d).unwrap()).is_gapn;
            if monomial_sufficient(p, n, dk, dl, r1, r2).unwrap() {
                assert!(gapn, "X^{d} over F_{p}^{n}");
            }
            if !monomial_necessary(p, n, dk, dl, r1, r2).unwrap() {
                assert!(!gapn, "X^{d} over F_{p}^{n}");
            }
        }
    }
}

#[test]
fn binomial_sufficiency_is_sound() {
    for p in [3u32, 5, 7] {
        let k = field(p);
        let q = k.order() as u64;
        let d1 = 2 * p as u64 - 1;
        for d2 in 1..q {
            if d2 == d1 {
                continue;
            }
            for u in k.nonzero_elements() {
                if binomial_sufficient(&k, d1, d2, u).unwrap() {
                    let f = SparsePoly::new(&k, [(d1, k.one()), (d2, u)]).unwrap();
                    assert!(is_gapn(&f).is_gapn, "X^{d1} + u X^{d2} over F_{p}^2");
                }
            }
        }
    }
}

#[test]
fn h_vanishing_matches_formula() {
    let k = field(5);
    for a in k.nonzero_elements() {
        for u in k.nonzero_elements() {
            for (d1, d2) in [(9u64, 12u64), (9, 7), (13, 20)] {
                let t = k.mul(u, k.pow(a, d2 as i128 - d1 as i128).unwrap());
                let mut lhs = k.powu(t, 4);
                if d2 % 2 == 0 {
                    lhs = k.neg(lhs);
                }
                assert_eq!(binomial_h_vanishes(&k, d1, d2, u, a).unwrap(), lhs == k.one());
            }
        }
    }
    assert!(binomial_h_vanishes(&k, 9, 12, k.zero(), k.one()).is_err());
}

fn assert_recipe(r: &ConstructionRecipe) {
    let v = is_gapn(&r.result);
    assert!(v.is_gapn, "{} {:?}", r.family, r.params);
    assert_eq!(recipe_degree(r), Some(r.claimed_degree), "{} {:?}", r.family, r.params);
}

#[test]
fn odd_binomials_all_digits() {
    for p in [5u32, 7, 11] {
        let k = field(p);
        for dk in 0..p {
            for dl in 0..p {
                match build_odd_binomial(&k, dk, dl) {
                    Ok(r) => assert_recipe(&r),
                    Err(ConstructionError::EvenDigitSum(_)) => assert_eq!((dk + dl) % 2, 0),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}

#[test]
fn mod3_binomials_all_h() {
    for p in [5u32, 11, 17] {
        let k = field(p);
        for h in 1..p {
            assert_recipe(&build_mod3_binomial(&k, h).unwrap());
        }
    }
    assert!(matches!(
        build_mod3_binomial(&field(7), 2),
        Err(ConstructionError::NotTwoModThree(7))
    ));
}

#[test]
fn even_binomials_all_h() {
    for p in [5u32, 11, 13] {
        let k = field(p);
        for h in 1..p {
            assert_recipe(&build_even_binomial(&k, h).unwrap());
        }
    }
    for p in [3u32, 7, 31] {
        assert!(matches!(
            build_even_binomial(&field(p), 1),
            Err(ConstructionError::Mersenne(_))
        ));
    }
}

#[test]
fn trinomials_all_h_and_sound_condition() {
    for p in [5u32, 7] {
        let k = field(p);
        let u = find_trinomial_u(&k).unwrap();
        let v = k.inv(k.from_int(2)).unwrap();
        for h in 0..p {
            assert_recipe(&build_trinomial(&k, h, u, v).unwrap());
        }
        // Soundness over every admissible (u, v) for one h.
        for u in k.nonzero_elements() {
            for v in k.nonzero_elements() {
                if let Ok(r) = build_trinomial(&k, 3, u, v) {
                    assert!(is_gapn(&r.result).is_gapn);
                }
            }
        }
    }
}

#[test]
fn trinomial_condition_matches_root_enumeration() {
    let k = field(5);
    let p = 5u64;
    // norm-one elements, found without the library's subgroup helper
    let circle: Vec<FieldElem> = k
        .nonzero_elements()
        .filter(|&y| k.powu(y, p + 1) == k.one())
        .collect();
    assert_eq!(circle.len(), 6);
    let mut pairs = 0;
    for u in k.nonzero_elements() {
        for v in k.nonzero_elements() {
            let two_v = k.add(v, v);
            let has_root = circle.iter().any(|&a| {
                let mut s = k.mul(two_v, k.powu(a, 5));
                s = k.add(s, k.mul(u, k.powu(a, 4)));
                s = k.add(s, k.mul(k.frobenius(u, 1).unwrap(), a));
                s = k.add(s, k.frobenius(two_v, 1).unwrap());
                s.is_zero()
            });
            assert_eq!(trinomial_condition(&k, u, v).unwrap(), !has_root);
            pairs += 1;
        }
    }
    assert_eq!(pairs, 576);
}

#[test]
fn concrete_examples() {
    let r = build_odd_binomial(&field(7), 6, 5).unwrap();
    assert_eq!(r.result.exponents().collect::<Vec<_>>(), vec![13, 47]);
    assert_eq!(r.claimed_degree, 11);
    assert_recipe(&r);

    let r = build_mod3_binomial(&field(11), 8).unwrap();
    assert_eq!(r.result.exponents().collect::<Vec<_>>(), vec![21, 96]);
    assert_eq!(r.claimed_degree, 16);
    assert_recipe(&r);

    let k = field(7);
    let u = find_trinomial_u(&k).unwrap();
    let r = build_trinomial(&k, 5, u, k.inv(k.from_int(2)).unwrap()).unwrap();
    assert_eq!(r.result.exponents().collect::<Vec<_>>(), vec![13, 19, 40]);
    assert_eq!(r.claimed_degree, 10);
    assert_recipe(&r);

    let r = build_even_binomial(&field(13), 12).unwrap();
    assert_eq!(r.params.big_n, Some(7));
    assert_eq!(r.claimed_degree, 24);
    assert_recipe(&r);
}

#[test]
fn os_condition_matches_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for p in [5u32, 7, 11] {
        let k = field(p);
        let q = k.order();
        for s in 1..p - 1 {
            if gapn_core::field::gcd(s as u64, q as u64 - 1) != 1 {
                continue;
            }
            for _ in 0..20 {
                let len = rng.gen_range(1..=(p - s) as usize);
                let coeffs: Vec<_> = (0..len).map(|_| k.from_code(rng.gen_range(0..q))).collect();
                let f = os_polynomial(&k, s, &coeffs).unwrap();
                for a in k.nonzero_elements().step_by(3) {
                    let m = derivative(&f, a).unwrap();
                    let (p_to_one, _) = gapn_core::is_p_to_one(&m);
                    assert_eq!(os_derivative_condition(&k, s, &coeffs, a).unwrap(), p_to_one);
                }
            }
        }
    }
}

#[test]
fn builders_reject_bad_input() {
    let k3 = make_field(5, 3, None).unwrap();
    assert!(matches!(build_odd_binomial(&k3, 1, 2), Err(ConstructionError::NotQuadratic(3))));
    let k = field(5);
    assert!(build_odd_binomial(&k, 5, 0).is_err());
    assert!(build_mod3_binomial(&k, 0).is_err());
    assert!(build_mod3_binomial(&k, 5).is_err());
    assert!(find_trinomial_u(&field(3)).is_err());
}
