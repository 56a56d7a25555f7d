#![allow(dead_code)]

use fermat_core::{Exponent, FermatReal, Rational};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

pub type F = FermatReal<Rational>;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn big(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn coef() -> impl Strategy<Value = Rational> {
    (-10i64..=10, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

pub fn exponent() -> impl Strategy<Value = Exponent> {
    (1i64..=12).prop_flat_map(|d| (1..=d).prop_map(move |p| Exponent::ratio(p, d).unwrap()))
}

pub fn fermat() -> impl Strategy<Value = F> {
    (coef(), prop::collection::vec((exponent(), coef()), 0..=4))
        .prop_map(|(s, ts)| F::from_parts(s, ts))
}

pub fn infinitesimal() -> impl Strategy<Value = F> {
    fermat().prop_map(|x| x.infinitesimal_part())
}
