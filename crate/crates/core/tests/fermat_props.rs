mod common;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use common::*;
use fermat_core::{Float, Rational, Scalar};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// All pairwise products including exponents above 1.
fn convolution(x: &F, y: &F) -> BTreeMap<BigRational, Rational> {
    let parts = |v: &F| {
        let mut out = vec![(BigRational::zero(), v.standard_part().clone())];
        out.extend(v.terms().iter().map(|(e, c)| (e.value().clone(), c.clone())));
        out
    };
    let mut acc: BTreeMap<BigRational, Rational> = BTreeMap::new();
    for (a, c) in parts(x) {
        for (b, d) in parts(y) {
            let e = &a + &b;
            let v = acc.remove(&e).unwrap_or_else(Rational::zero) + c.clone() * d.clone();
            acc.insert(e, v);
        }
    }
    acc
}

proptest! {
    #[test]
    fn ring_axioms(x in fermat(), y in fermat(), z in fermat()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x + &F::zero(), x.clone());
        prop_assert_eq!(&x * &F::one(), x.clone());
        prop_assert!((&x + &(-&x)).is_zero());
    }

    #[test]
    fn total_order(x in fermat(), y in fermat(), z in fermat()) {
        prop_assert_eq!(x.compare(&y), y.compare(&x).reverse());
        prop_assert_eq!(x.compare(&y) == Ordering::Equal, x == y);
        if x.compare(&y) != Ordering::Greater && y.compare(&z) != Ordering::Greater {
            prop_assert!(x.compare(&z) != Ordering::Greater);
        }
    }

    #[test]
    fn order_ring_compatibility(x in fermat(), y in fermat(), z in fermat(), r in 1i64..=20) {
        if x.compare(&y) == Ordering::Less {
            prop_assert_eq!((&x + &z).compare(&(&y + &z)), Ordering::Less);
            let r = q(r, 7);
            prop_assert_eq!(x.scale(&r).compare(&y.scale(&r)), Ordering::Less);
            let zp = z.abs();
            prop_assert!((&x * &zp).compare(&(&y * &zp)) != Ordering::Greater);
        }
    }

    #[test]
    fn truncation_matches_convolution(x in fermat(), y in fermat()) {
        let p = &x * &y;
        let conv = convolution(&x, &y);
        let one = BigRational::one();
        for (e, c) in &conv {
            if e <= &one {
                prop_assert_eq!(p.coefficient(e), c.clone());
            }
        }
        for (e, _) in p.terms() {
            prop_assert!(conv.contains_key(e.value()));
        }
    }

    #[test]
    fn representative_bound(x in fermat(), y in fermat(), k in 1i32..=3) {
        let t0 = Float::from_rational(&big(1, 100).pow(k));
        let (xf, yf) = (F::to_float(&x), F::to_float(&y));
        let lhs = ((&xf * &yf).eval_representative(&t0).unwrap()
            - xf.eval_representative(&t0).unwrap() * yf.eval_representative(&t0).unwrap())
            .abs()
            / t0.clone();
        let one = BigRational::one();
        let mut bound = Float::zero();
        for (e, c) in convolution(&x, &y) {
            if e > one {
                bound = bound + Float::from_rational(c.abs().inner()) * t0.pow_ratio(&(e - &one)).unwrap();
            }
        }
        let two = Float::from_int(2);
        prop_assert!(lhs <= two * bound + Float::from_rational(&Float::tolerance()));
    }

    #[test]
    fn nilpotency_by_powering(x in fermat()) {
        let d = x.infinitesimal_part();
        let m = d.nilpotency_index() as u32;
        prop_assert!(d.pow_nat(m).is_zero());
        if m > 1 {
            prop_assert!(!d.pow_nat(m - 1).is_zero());
        }
    }

    #[test]
    fn infinitesimals_below_every_positive_real(x in fermat(), n in 1i64..=1_000_000) {
        let r = F::real(q(1, n));
        let below = x.abs().compare(&r) == Ordering::Less;
        if x.standard_part().is_zero() {
            prop_assert!(below);
        } else if x.standard_part().abs() > q(1, n) {
            prop_assert!(!below);
        }
    }

    #[test]
    fn canonical_text_is_stable(x in fermat()) {
        let s = x.to_string();
        let y = fermat_core::FermatRecord::from(&x);
        prop_assert_eq!(y.terms.len(), x.terms().len());
        prop_assert!(!s.is_empty());
    }
}

trait ToFloat {
    fn to_float(x: &F) -> fermat_core::FermatReal<Float>;
}

impl ToFloat for F {
    fn to_float(x: &F) -> fermat_core::FermatReal<Float> {
        x.map_coefficients(|c| Float::from_rational(c.inner()))
    }
}
