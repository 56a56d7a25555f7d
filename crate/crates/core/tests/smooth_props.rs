mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::*;
use fermat_core::oracle::{MultiPolyOracle, PolyOracle};
use fermat_core::smooth::{DeclaredIntegrals, PolynomialIntegrals};
use fermat_core::{
    eval_qs, expand_parametric, extract_derivative, fermat_extend, fermat_extend_multi, integrate_qs,
    separating_exponents, MultiOracle, MultiPoly, Oracle, QSFunction, Rational, UniPoly,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn uni() -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(-5i64..=5, 1..=5).prop_map(|cs| UniPoly::from_ints(&cs))
}

fn multi(arity: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..=3, arity), -4i64..=4), 1..=5).prop_map(move |ts| {
        MultiPoly::from_terms(arity, ts.into_iter().map(|(e, c)| (e, BigRational::from_integer(BigInt::from(c)))))
    })
}

/// Term-by-term differentiation on a plain exponent map.
fn symbolic_partial(p: &MultiPoly, j: &[u32]) -> BTreeMap<Vec<u32>, BigRational> {
    let mut out = BTreeMap::new();
    'terms: for (e, c) in p.terms() {
        let mut c = c.clone();
        let mut e = e.clone();
        for (l, &k) in j.iter().enumerate() {
            for _ in 0..k {
                if e[l] == 0 {
                    continue 'terms;
                }
                c *= BigRational::from_integer(BigInt::from(e[l]));
                e[l] -= 1;
            }
        }
        *out.entry(e).or_insert_with(BigRational::zero) += c;
    }
    out
}

fn eval_map(m: &BTreeMap<Vec<u32>, BigRational>, x: &[BigRational]) -> BigRational {
    m.iter()
        .map(|(e, c)| e.iter().zip(x).fold(c.clone(), |acc, (&k, v)| acc * v.pow(k as i32)))
        .sum()
}

proptest! {
    #[test]
    fn agrees_on_reals(p in uni(), r in coef()) {
        let f = PolyOracle::new(p.clone());
        let v = fermat_extend(&f, &F::real(r.clone())).unwrap();
        prop_assert_eq!(v, F::real(Rational::from(p.eval(r.inner()))));
    }

    #[test]
    fn functoriality(p in uni(), g in uni(), x in fermat()) {
        let comp = PolyOracle::new(p.compose(&g));
        let lhs = fermat_extend(&comp, &x).unwrap();
        let inner = fermat_extend(&PolyOracle::new(g), &x).unwrap();
        let rhs = fermat_extend(&PolyOracle::new(p), &inner).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn expansion_matches_multivariate_extension(h in multi(2), v in fermat(), x in fermat()) {
        let ho: MultiOracle<Rational> = Arc::new(MultiPolyOracle::new(h));
        let qs = expand_parametric(&ho, std::slice::from_ref(&v)).unwrap();
        prop_assert_eq!(eval_qs(&qs, &x).unwrap(), fermat_extend_multi(ho.as_ref(), &[v, x]).unwrap());
    }

    #[test]
    fn integration_is_linear(p in uni(), g in uni(), a in -3i64..=3, e in exponent()) {
        let qs = |u: &UniPoly| {
            let o: Oracle<Rational> = Arc::new(PolyOracle::new(u.clone()));
            QSFunction::new(vec![(BigRational::zero(), o.clone()), (e.value().clone(), o)]).unwrap()
        };
        let sum = p.add(&g.scale(&BigRational::from_integer(BigInt::from(a))));
        let (lo, hi) = (q(-1, 2), q(2, 1));
        let i = |u: &UniPoly| integrate_qs(&qs(u), &lo, &hi, &PolynomialIntegrals).unwrap();
        prop_assert_eq!(i(&sum), &i(&p) + &i(&g).scale(&q(a, 1)));
    }

    #[test]
    fn derivative_extraction(h in multi(2), x0 in prop::collection::vec(coef(), 2), j in prop::collection::vec(0u32..=4, 2)) {
        prop_assume!(j.iter().sum::<u32>() > 0 && j.iter().sum::<u32>() <= 4);
        let oracle = MultiPolyOracle::new(h.clone());
        let got = extract_derivative(&oracle, &x0, &j).unwrap();
        let point: Vec<BigRational> = x0.iter().map(|c| c.inner().clone()).collect();
        prop_assert_eq!(got.into_inner(), eval_map(&symbolic_partial(&h, &j), &point));
    }

    #[test]
    fn separating_exponents_are_separating(j in prop::collection::vec(0u32..=4, 1..=3)) {
        prop_assume!(j.iter().any(|&k| k > 0));
        let a = separating_exponents(&j).unwrap();
        let dot = |s: &[u32]| -> BigRational {
            s.iter().zip(&a).map(|(&k, w)| w * BigRational::from_integer(BigInt::from(k))).sum()
        };
        prop_assert_eq!(dot(&j), BigRational::one());
        // every s with sum of weights at most 1 has each s_l bounded by 1/a_l
        let bounds: Vec<u32> = a.iter().map(|w| (w.recip().floor().to_integer()).try_into().unwrap()).collect();
        let mut s = vec![0u32; j.len()];
        loop {
            if s != j && dot(&s) <= BigRational::one() {
                prop_assert!(dot(&s) != BigRational::one());
            }
            let mut l = 0;
            while l < s.len() && s[l] == bounds[l] {
                s[l] = 0;
                l += 1;
            }
            if l == s.len() {
                break;
            }
            s[l] += 1;
        }
    }
}

#[test]
fn declared_integrals_sum_deltas() {
    let mut integrals = DeclaredIntegrals::<Rational>::new();
    let mut terms = Vec::new();
    for i in (1..=5i64).rev() {
        let name = format!("sigma{}", i + 1);
        integrals = integrals.declare(name.clone(), q(1, 1));
        let o: Oracle<Rational> = Arc::new(fermat_core::oracle::Declared::new(name));
        terms.push((big(1, i), o));
    }
    let f = QSFunction::new(terms).unwrap();
    let got = integrate_qs(&f, &q(0, 1), &q(1, 1), &integrals).unwrap();
    let want: F = (1..=5).map(|i| F::monomial(q(1, 1), fermat_core::Exponent::ratio(1, i).unwrap())).sum();
    assert_eq!(got, want);
}
