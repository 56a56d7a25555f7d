mod common;

use std::cmp::Ordering;

use common::*;
use fermat_core::oracle::PolyOracle;
use fermat_core::slice::SolveOptions;
use fermat_core::{
    classify_slice, fermat_extend, ivp_solve, refine_to_fundamental, slice_image_contains, solution_family,
    solve_slice, solve_slice_traced, Rational, SliceClass, UniPoly,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

/// `c0 + sign·(u - a)^m + Σ c_k (u - a)^k` for `k > m`.
fn slice_poly(a: &Rational, c0: i64, sign: i64, m: usize, higher: &[i64]) -> UniPoly {
    let mut cs = vec![BigRational::from_integer(BigInt::from(c0))];
    cs.resize(m, BigRational::from_integer(BigInt::from(0)));
    cs.push(BigRational::from_integer(BigInt::from(sign)));
    cs.extend(higher.iter().map(|&c| BigRational::from_integer(BigInt::from(c))));
    let shift = UniPoly::new(vec![-a.inner().clone(), BigRational::from_integer(BigInt::from(1))]);
    UniPoly::new(cs).compose(&shift)
}

fn instance() -> impl Strategy<Value = (Rational, UniPoly, usize, i64)> {
    (coef(), -5i64..=5, prop::sample::select(vec![-1i64, 1]), 1usize..=5, prop::collection::vec(-3i64..=3, 0..=2))
        .prop_map(|(a, c0, sign, m, higher)| {
            let p = slice_poly(&a, c0, sign, m, &higher);
            (a, p, m, sign)
        })
}

proptest! {
    #[test]
    fn solver_inverts_extension((a, p, _m, _s) in instance(), h in infinitesimal()) {
        let f = PolyOracle::new(p);
        let w = fermat_extend(&f, &(F::real(a.clone()) + h)).unwrap();
        let trace = solve_slice_traced(&f, &a, &w, &SolveOptions::default()).unwrap();
        prop_assert_eq!(fermat_extend(&f, &trace.solution).unwrap(), w);
        prop_assert!(trace.steps.len() <= 10_000);
        for pair in trace.steps.windows(2) {
            prop_assert!(pair[0].exponent < pair[1].exponent);
        }
    }

    #[test]
    fn family_soundness((a, p, _m, _s) in instance(), h in infinitesimal(), z in infinitesimal()) {
        let f = PolyOracle::new(p);
        let w = fermat_extend(&f, &(F::real(a.clone()) + h)).unwrap();
        let fam = solution_family(&f, &a, &w, &SolveOptions::default()).unwrap();
        let kept: Vec<_> = z.terms().iter().filter(|(e, _)| e.value() > &fam.threshold).cloned().collect();
        let z = F::from_parts(q(0, 1), kept);
        let y = &fam.fundamental + &z;
        prop_assert_eq!(fermat_extend(&f, &y).unwrap(), w);
        prop_assert_eq!(refine_to_fundamental(&f, &y).unwrap(), fam.fundamental);
    }

    #[test]
    fn slice_monotonicity((a, p, m, sign) in instance(), h1 in infinitesimal(), h2 in infinitesimal()) {
        let f = PolyOracle::new(p);
        let (x1, x2) = match h1.compare(&h2) {
            Ordering::Less => (h1, h2),
            Ordering::Greater => (h2, h1),
            Ordering::Equal => return Ok(()),
        };
        let base = F::real(a.clone());
        let (y1, y2) = (fermat_extend(&f, &(&base + &x1)).unwrap(), fermat_extend(&f, &(&base + &x2)).unwrap());
        let ord = y1.compare(&y2);
        let zero = F::zero();
        let want_up = if m % 2 == 1 {
            Some(sign > 0)
        } else if x1.compare(&zero) != Ordering::Less {
            Some(sign > 0)
        } else if x2.compare(&zero) != Ordering::Greater {
            Some(sign < 0)
        } else {
            None
        };
        match want_up {
            Some(true) => prop_assert!(ord != Ordering::Greater),
            Some(false) => prop_assert!(ord != Ordering::Less),
            None => {}
        }
    }

    #[test]
    fn even_case_both_sides(a in coef(), c0 in -3i64..=3, h in infinitesimal()) {
        let f = PolyOracle::new(slice_poly(&a, c0, 1, 2, &[]));
        let base = F::real(a.clone());
        let w = fermat_extend(&f, &(&base + &h)).unwrap();
        let up = solve_slice(&f, &a, &w).unwrap();
        let opts = SolveOptions { negative_root: true, ..SolveOptions::default() };
        let down = solve_slice_traced(&f, &a, &w, &opts).unwrap().solution;
        prop_assert_eq!(fermat_extend(&f, &up).unwrap(), w.clone());
        prop_assert_eq!(fermat_extend(&f, &down).unwrap(), w);
        prop_assert!(up.compare(&base) != Ordering::Less);
        prop_assert!(down.compare(&base) != Ordering::Greater);
    }

    #[test]
    fn nothing_below_the_minimum(a in coef(), w in infinitesimal()) {
        // (u - a)^2 + 1 has minimum 1 at a
        let f = PolyOracle::new(slice_poly(&a, 1, 1, 2, &[]));
        let target = &F::one() + &w;
        if target.compare(&F::one()) == Ordering::Less {
            prop_assert!(!slice_image_contains(&f, &a, &target).unwrap());
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn ivp_lands_strictly_inside(h in infinitesimal(), r in -7i64..=7) {
        // real part with a rational preimage r/4 in (-2, 2)
        let p = UniPoly::from_ints(&[0, -1, 0, 1]);
        let f = PolyOracle::new(p.clone());
        let (a, b) = (F::from(-2), F::from(2));
        let y = &F::real(Rational::from(p.eval(&big(r, 4)))) + &h;
        let c = ivp_solve(&f, &a, &b, &y).unwrap();
        prop_assert_eq!(fermat_extend(&f, &c).unwrap(), y);
        prop_assert!(a.compare(&c) == Ordering::Less && c.compare(&b) == Ordering::Less);
    }
}

#[test]
fn classification_matches_construction() {
    for m in 1..=5 {
        for sign in [-1, 1] {
            let p = slice_poly(&q(1, 2), 3, sign, m, &[2]);
            let class = classify_slice(&PolyOracle::new(p), &q(1, 2)).unwrap();
            let expected = if m % 2 == 1 {
                SliceClass::Odd { m, sign: sign as i8 }
            } else {
                SliceClass::Even { m, sign: sign as i8 }
            };
            assert_eq!(class, expected);
        }
    }
}
