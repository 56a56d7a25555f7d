//! Extension of smooth functions to Fermat reals and quasi-standard functions.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermat::{Exponent, FermatReal};
use crate::oracle::{DerivativeOracle, LinearCombination, MultiOracle, Oracle, PartialOracle, PartialSlice, PolyOracle};
use crate::poly::UniPoly;
use crate::scalar::{factorial, Scalar};

/// `•f(x) = Σ f^(i)(°x)/i! (δx)^i`, summed while `(δx)^i ≠ 0`.
pub fn fermat_extend<S: Scalar>(f: &dyn DerivativeOracle<S>, x: &FermatReal<S>) -> Result<FermatReal<S>> {
    let a = x.standard_part();
    let dx = x.infinitesimal_part();
    let mut k = x.nilpotency_index() - 1;
    if let Some(d) = f.degree() {
        k = k.min(d);
    }
    let mut acc = FermatReal::real(f.derivative(0, a)?);
    let mut power = FermatReal::one();
    for i in 1..=k {
        power = &power * &dx;
        if power.is_zero() {
            break;
        }
        let c = f.derivative(i, a)? / factorial::<S>(i);
        if !c.is_zero() {
            acc = acc + power.scale(&c);
        }
    }
    Ok(acc)
}

/// Multi-indices `i` (componentwise at most `caps`) with the product
/// `Π (δx_l)^(i_l)` nonzero, paired with that product.
pub(crate) fn nonzero_monomials<S: Scalar>(dxs: &[FermatReal<S>], caps: &[usize]) -> Vec<(Vec<u32>, FermatReal<S>)> {
    let powers: Vec<Vec<FermatReal<S>>> = dxs
        .iter()
        .zip(caps)
        .map(|(d, &cap)| {
            let mut ps = vec![FermatReal::one()];
            for _ in 0..cap {
                let next = ps.last().unwrap() * d;
                if next.is_zero() {
                    break;
                }
                ps.push(next);
            }
            ps
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = Vec::with_capacity(dxs.len());
    walk(&powers, 0, FermatReal::one(), &mut idx, &mut out);
    out
}

fn walk<S: Scalar>(
    powers: &[Vec<FermatReal<S>>],
    l: usize,
    partial: FermatReal<S>,
    idx: &mut Vec<u32>,
    out: &mut Vec<(Vec<u32>, FermatReal<S>)>,
) {
    if l == powers.len() {
        out.push((idx.clone(), partial));
        return;
    }
    for (k, p) in powers[l].iter().enumerate() {
        let next = &partial * p;
        if next.is_zero() {
            // higher powers of this coordinate vanish as well
            break;
        }
        idx.push(k as u32);
        walk(powers, l + 1, next, idx, out);
        idx.pop();
    }
}

fn multi_factorial<S: Scalar>(i: &[u32]) -> S {
    i.iter().fold(S::one(), |acc, &k| acc * factorial::<S>(k as usize))
}

fn taylor_caps<S: Scalar>(h: &dyn PartialOracle<S>, xs: &[FermatReal<S>]) -> Vec<usize> {
    xs.iter()
        .enumerate()
        .map(|(l, x)| {
            let k = x.nilpotency_index() - 1;
            match h.degree_in(l) {
                Some(d) => k.min(d as usize),
                None => k,
            }
        })
        .collect()
}

/// Multivariate Taylor extension of `h` at the point `xs`.
pub fn fermat_extend_multi<S: Scalar>(h: &dyn PartialOracle<S>, xs: &[FermatReal<S>]) -> Result<FermatReal<S>> {
    if xs.len() != h.arity() {
        return Err(Error::InvalidArgument(format!("expected {} coordinates, got {}", h.arity(), xs.len())));
    }
    let base: Vec<S> = xs.iter().map(|x| x.standard_part().clone()).collect();
    let dxs: Vec<FermatReal<S>> = xs.iter().map(|x| x.infinitesimal_part()).collect();
    let caps = taylor_caps(h, xs);
    let mut acc = FermatReal::zero();
    for (i, prod) in nonzero_monomials(&dxs, &caps) {
        let c = h.partial(&i, &base)? / multi_factorial::<S>(&i);
        if !c.is_zero() {
            acc = acc + prod.scale(&c);
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------

/// `Σ •α_i(x) t^(a_i)`: exponents in `[0, 1]`, strictly increasing.
#[derive(Clone)]
pub struct QSFunction<S: Scalar> {
    terms: Vec<(BigRational, Oracle<S>)>,
}

/// Serialized term of a [`QSFunction`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSTermRecord {
    pub exponent: String,
    pub oracle: String,
}

impl<S: Scalar> QSFunction<S> {
    pub fn new(terms: Vec<(BigRational, Oracle<S>)>) -> Result<Self> {
        for w in terms.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidArgument("exponents must strictly increase".into()));
            }
        }
        if let (Some(f), Some(l)) = (terms.first(), terms.last()) {
            if f.0.is_negative() || l.0 > BigRational::one() {
                return Err(Error::InvalidArgument("exponents must lie in [0, 1]".into()));
            }
        }
        Ok(QSFunction { terms })
    }

    pub fn empty() -> Self {
        QSFunction { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[(BigRational, Oracle<S>)] {
        &self.terms
    }

    pub fn exponents(&self) -> Vec<BigRational> {
        self.terms.iter().map(|(e, _)| e.clone()).collect()
    }

    pub fn records(&self) -> Vec<QSTermRecord> {
        self.terms
            .iter()
            .map(|(e, f)| QSTermRecord { exponent: e.to_string(), oracle: f.name() })
            .collect()
    }
}

impl<S: Scalar> std::fmt::Debug for QSFunction<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.records()).finish()
    }
}

/// Canonical form of `x ↦ •h(v, x)` for fixed Fermat parameters `v`.
///
/// Expands in `v` around `°v` and groups `(δv)^i / i!` by the exponents of its
/// decomposition. For a polynomial `h` every group is an exact polynomial
/// oracle and vanishing groups are dropped.
pub fn expand_parametric<S: Scalar>(h: &MultiOracle<S>, v: &[FermatReal<S>]) -> Result<QSFunction<S>> {
    let k = v.len();
    if k + 1 != h.arity() {
        return Err(Error::InvalidArgument(format!("expected {} parameters, got {k}", h.arity() - 1)));
    }
    let base: Vec<S> = v.iter().map(|x| x.standard_part().clone()).collect();
    let dvs: Vec<FermatReal<S>> = v.iter().map(|x| x.infinitesimal_part()).collect();
    let caps = taylor_caps(h.as_ref(), v);
    let mut groups: BTreeMap<BigRational, Vec<(BigRational, Vec<u32>)>> = BTreeMap::new();
    for (i, prod) in nonzero_monomials(&dvs, &caps) {
        let inv = multi_factorial::<S>(&i).to_rational().recip();
        if !prod.standard_part().is_zero() {
            let c = prod.standard_part().to_rational() * &inv;
            groups.entry(BigRational::zero()).or_default().push((c, i.clone()));
        }
        for (e, c) in prod.terms() {
            groups.entry(e.value().clone()).or_default().push((c.to_rational() * &inv, i.clone()));
        }
    }
    let poly = h.as_polynomial();
    let mut terms: Vec<(BigRational, Oracle<S>)> = Vec::new();
    for (e, parts) in groups {
        match poly {
            Some(p) => {
                let prefix: Vec<BigRational> = base.iter().map(|b| b.to_rational()).collect();
                let mut acc = UniPoly::zero();
                for (c, i) in &parts {
                    let mut alpha = i.clone();
                    alpha.push(0);
                    acc = acc.add(&p.partial(&alpha).restrict_last(&prefix).scale(c));
                }
                if !acc.is_zero() {
                    terms.push((e, Arc::new(PolyOracle::new(acc))));
                }
            }
            None => {
                let lc: Vec<(BigRational, Oracle<S>)> = parts
                    .into_iter()
                    .map(|(c, i)| {
                        let s: Oracle<S> = Arc::new(PartialSlice::new(h.clone(), i, base.clone()));
                        (c, s)
                    })
                    .collect();
                terms.push((e, Arc::new(LinearCombination::new(lc))));
            }
        }
    }
    QSFunction::new(terms)
}

/// `Σ •α_i(x) t^(a_i)`.
pub fn eval_qs<S: Scalar>(f: &QSFunction<S>, x: &FermatReal<S>) -> Result<FermatReal<S>> {
    let mut acc = FermatReal::zero();
    for (e, alpha) in f.terms() {
        acc = acc + fermat_extend(alpha.as_ref(), x)?.shift(e);
    }
    Ok(acc)
}

/// Definite integrals of coefficient functions.
pub trait IntegralOracle<S: Scalar> {
    fn integral(&self, f: &dyn DerivativeOracle<S>, u0: &S, u1: &S) -> Result<S>;
}

/// Exact integrals of polynomial oracles.
#[derive(Clone, Copy, Debug, Default)]
pub struct PolynomialIntegrals;

impl<S: Scalar> IntegralOracle<S> for PolynomialIntegrals {
    fn integral(&self, f: &dyn DerivativeOracle<S>, u0: &S, u1: &S) -> Result<S> {
        let p = f.as_polynomial().ok_or_else(|| Error::NotPolynomial(f.name()))?;
        let a = p.antiderivative();
        Ok(a.eval_scalar(u1) - a.eval_scalar(u0))
    }
}

/// Integrals declared by oracle name, falling back to polynomial integration.
#[derive(Clone, Debug)]
pub struct DeclaredIntegrals<S: Scalar> {
    values: HashMap<String, S>,
}

impl<S: Scalar> DeclaredIntegrals<S> {
    pub fn new() -> Self {
        DeclaredIntegrals { values: HashMap::new() }
    }

    pub fn declare(mut self, name: impl Into<String>, value: S) -> Self {
        self.values.insert(name.into(), value);
        self
    }
}

impl<S: Scalar> Default for DeclaredIntegrals<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> IntegralOracle<S> for DeclaredIntegrals<S> {
    fn integral(&self, f: &dyn DerivativeOracle<S>, u0: &S, u1: &S) -> Result<S> {
        if let Some(v) = self.values.get(&f.name()) {
            return Ok(v.clone());
        }
        if f.as_polynomial().is_none() {
            if let Some(parts) = f.linear_parts() {
                let mut acc = S::zero();
                for (c, g) in parts {
                    acc = acc + S::from_rational(&c) * self.integral(g.as_ref(), u0, u1)?;
                }
                return Ok(acc);
            }
        }
        PolynomialIntegrals.integral(f, u0, u1)
    }
}

/// `∫_{u0}^{u1} f = Σ (∫ α_i) t^(a_i)`.
pub fn integrate_qs<S: Scalar>(
    f: &QSFunction<S>,
    u0: &S,
    u1: &S,
    integrals: &dyn IntegralOracle<S>,
) -> Result<FermatReal<S>> {
    if u0 >= u1 {
        return Err(Error::InvalidArgument(format!("integration bounds {u0} >= {u1}")));
    }
    let mut raw = Vec::with_capacity(f.terms().len());
    for (e, alpha) in f.terms() {
        raw.push((e.clone(), integrals.integral(alpha.as_ref(), u0, u1)?));
    }
    Ok(FermatReal::normalize(raw))
}

// ---------------------------------------------------------------------------

fn dot(s: &[u64], w: &[u64]) -> u64 {
    s.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// True when `j` is the only `s` with `s·w = total`.
fn separates(j: &[u64], w: &[u64], total: u64) -> bool {
    fn rec(l: usize, w: &[u64], j: &[u64], s: &mut Vec<u64>, rem: u64) -> bool {
        if l == w.len() {
            return rem != 0 || s.as_slice() == j;
        }
        let mut k = 0;
        while k * w[l] <= rem {
            s.push(k);
            let ok = rec(l + 1, w, j, s, rem - k * w[l]);
            s.pop();
            if !ok {
                return false;
            }
            k += 1;
        }
        true
    }
    rec(0, w, j, &mut Vec::new(), total)
}

/// Exponents `a` with `Σ j_l a_l = 1` such that no other `s ∈ ℕ^m` reaches
/// `Σ s_l a_l = 1`.
///
/// Perturbs the all-ones vector, `a ∝ 1 + c/N` with the least `N` that
/// separates: first with `c` the unit vector at the last coordinate where `j`
/// is nonzero, then with `c_l = B^l`, `B = |j| + 1`, which separates for
/// large `N` because the base-`B` digits of `s·c` are the `s_l`.
pub fn separating_exponents(j: &[u32]) -> Result<Vec<BigRational>> {
    let last = j
        .iter()
        .rposition(|&x| x > 0)
        .ok_or_else(|| Error::InvalidArgument("multi-index must be nonzero".into()))?;
    let j64: Vec<u64> = j.iter().map(|&x| x as u64).collect();
    let order: u64 = j64.iter().sum();
    let unit: Vec<u64> = (0..j.len()).map(|l| u64::from(l == last)).collect();
    let digits: Vec<u64> = (0..j.len() as u32).map(|l| (order + 1).pow(l)).collect();
    let bound = digits.last().copied().unwrap_or(1) * (order + 1) * (order + 1);
    for (c, cap) in [(unit, 64), (digits, bound)] {
        for n in 1..=cap {
            let w: Vec<u64> = c.iter().map(|x| n + x).collect();
            let total = dot(&j64, &w);
            if separates(&j64, &w, total) {
                return Ok(w
                    .iter()
                    .map(|&x| BigRational::new(BigInt::from(x), BigInt::from(total)))
                    .collect());
            }
        }
    }
    Err(Error::InvalidArgument(format!("no separating exponents found for {j:?}")))
}

/// `D^j h(x0)`, read off the coefficient of `t` in `•h(x0 + Σ t^(a_l) e_l)`.
pub fn extract_derivative<S: Scalar>(h: &dyn PartialOracle<S>, x0: &[S], j: &[u32]) -> Result<S> {
    if j.len() != h.arity() || x0.len() != h.arity() {
        return Err(Error::InvalidArgument("arity mismatch".into()));
    }
    let a = separating_exponents(j)?;
    let xs: Vec<FermatReal<S>> = x0
        .iter()
        .zip(&a)
        .map(|(x, e)| FermatReal::real(x.clone()) + FermatReal::monomial(S::one(), Exponent::new(e.clone()).unwrap()))
        .collect();
    let v = fermat_extend_multi(h, &xs)?;
    Ok(v.coefficient(&BigRational::one()) * multi_factorial::<S>(j))
}

/// Univariate form of [`extract_derivative`]: `f^(n)(x0)` for `n >= 1`.
pub fn extract_derivative_uni<S: Scalar>(f: &dyn DerivativeOracle<S>, x0: &S, n: u32) -> Result<S> {
    if n == 0 {
        return Err(Error::InvalidArgument("order must be positive".into()));
    }
    let e = Exponent::new(BigRational::new(BigInt::one(), BigInt::from(n)))?;
    let x = FermatReal::real(x0.clone()) + FermatReal::monomial(S::one(), e);
    let v = fermat_extend(f, &x)?;
    Ok(v.coefficient(&BigRational::one()) * factorial::<S>(n as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{parse_oracle, Declared, MultiPolyOracle};
    use crate::poly::MultiPoly;
    use crate::scalar::{rat, Rational};

    type F = FermatReal<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }
    fn mono(c: i64, p: i64, d: i64) -> F {
        F::monomial(q(c, 1), Exponent::ratio(p, d).unwrap())
    }
    fn real(n: i64) -> F {
        F::from(n)
    }
    fn h_example() -> MultiOracle<Rational> {
        Arc::new(MultiPolyOracle::new(MultiPoly::from_terms(
            2,
            [(vec![0, 3], rat(1, 1)), (vec![1, 2], rat(1, 1))],
        )))
    }

    #[test]
    fn univariate_extension() {
        let cube = parse_oracle::<Rational>("powint:3").unwrap();
        assert_eq!(fermat_extend(cube.as_ref(), &(real(1) + F::t())).unwrap(), real(1) + mono(3, 1, 1));
        assert_eq!(fermat_extend(cube.as_ref(), &mono(1, 1, 3)).unwrap(), F::t());
        let p7 = parse_oracle::<Rational>("powint:7").unwrap();
        assert_eq!(fermat_extend(p7.as_ref(), &(real(1) + F::t())).unwrap(), real(1) + mono(7, 1, 1));
        assert_eq!(fermat_extend(cube.as_ref(), &real(2)).unwrap(), real(8));
    }

    #[test]
    fn multivariate_extension() {
        let h = h_example();
        let v = mono(1, 1, 100);
        let c = q(3, 2);
        let got = fermat_extend_multi(h.as_ref(), &[v.clone(), F::real(c.clone())]).unwrap();
        let c2 = c.clone() * c.clone();
        assert_eq!(got, F::real(c2.clone() * c) + F::monomial(c2, Exponent::ratio(1, 100).unwrap()));
        let g = fermat_extend_multi(h.as_ref(), &[v, real(-1)]).unwrap();
        assert_eq!(g, real(-1) + mono(1, 1, 100));
    }

    #[test]
    fn parametric_expansion_examples() {
        let h = h_example();
        let qs = expand_parametric(&h, &[mono(1, 1, 100)]).unwrap();
        let recs = qs.records();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0], QSTermRecord { exponent: "0".into(), oracle: "poly:[0,0,0,1]".into() });
        assert_eq!(recs[1], QSTermRecord { exponent: "1/100".into(), oracle: "poly:[0,0,1]".into() });
        assert_eq!(eval_qs(&qs, &real(-1)).unwrap(), real(-1) + mono(1, 1, 100));

        let flat = expand_parametric(&h, &[real(2)]).unwrap();
        assert_eq!(flat.terms().len(), 1);
        assert_eq!(flat.records()[0].oracle, "poly:[0,0,2,1]");

        // x^2 y with x = t^(1/2)
        let h2: MultiOracle<Rational> =
            Arc::new(MultiPolyOracle::new(MultiPoly::from_terms(2, [(vec![2, 1], rat(1, 1))])));
        let qs2 = expand_parametric(&h2, &[mono(1, 1, 2)]).unwrap();
        assert_eq!(
            qs2.records(),
            vec![QSTermRecord { exponent: "1".into(), oracle: "poly:[0,1]".into() }]
        );
    }

    #[test]
    fn qs_evaluation() {
        let half: Oracle<Rational> = parse_oracle("poly:[0,1]").unwrap();
        let f = QSFunction::new(vec![(rat(1, 2), half)]).unwrap();
        assert_eq!(eval_qs(&f, &(real(1) + mono(1, 2, 3))).unwrap(), mono(1, 1, 2));
        assert!(eval_qs(&QSFunction::<Rational>::empty(), &F::t()).unwrap().is_zero());
    }

    #[test]
    fn integration() {
        let n = 4;
        let mut terms: Vec<(BigRational, Oracle<Rational>)> = Vec::new();
        let mut ints = DeclaredIntegrals::new();
        for i in (1..=n).rev() {
            let name = format!("bump{}", i + 1);
            terms.push((rat(1, i), Arc::new(Declared::new(name.clone()))));
            ints = ints.declare(name, q(1, 1));
        }
        let f = QSFunction::new(terms).unwrap();
        let got = integrate_qs(&f, &q(0, 1), &q(1, 1), &ints).unwrap();
        let expect: F = (1..=n).map(|i| mono(1, 1, i)).sum();
        assert_eq!(got, expect);

        let p: Oracle<Rational> = parse_oracle("poly:[0,0,3]").unwrap();
        let g = QSFunction::new(vec![(rat(1, 2), p)]).unwrap();
        assert_eq!(integrate_qs(&g, &q(0, 1), &q(2, 1), &PolynomialIntegrals).unwrap(), mono(8, 1, 2));
        assert!(integrate_qs(&g, &q(1, 1), &q(1, 1), &PolynomialIntegrals).is_err());
    }

    #[test]
    fn separating_examples() {
        assert_eq!(separating_exponents(&[3]).unwrap(), vec![rat(1, 3)]);
        assert_eq!(separating_exponents(&[1, 1]).unwrap(), vec![rat(2, 5), rat(3, 5)]);
        assert_eq!(separating_exponents(&[2, 0]).unwrap(), vec![rat(1, 2), rat(3, 8)]);
        assert!(separating_exponents(&[0, 0]).is_err());
    }

    #[test]
    fn derivative_extraction_examples() {
        let sq = parse_oracle::<Rational>("powint:2").unwrap();
        assert_eq!(extract_derivative_uni(sq.as_ref(), &q(3, 1), 1).unwrap(), q(6, 1));
        let h = h_example();
        assert_eq!(extract_derivative(h.as_ref(), &[q(0, 1), q(1, 1)], &[1, 1]).unwrap(), q(2, 1));
        assert_eq!(extract_derivative(h.as_ref(), &[q(0, 1), q(1, 1)], &[0, 3]).unwrap(), q(6, 1));
    }
}
