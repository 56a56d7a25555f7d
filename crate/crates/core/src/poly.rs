//! Dense univariate and sparse multivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// Univariate polynomial, coefficients by ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_scalar<S: Scalar>(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + S::from_rational(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(k.into()))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..n {
            if p.is_zero() {
                break;
            }
            p = p.derivative();
        }
        p
    }

    pub fn antiderivative(&self) -> Self {
        let mut cs = vec![BigRational::zero()];
        for (k, c) in self.coeffs.iter().enumerate() {
            cs.push(c / BigRational::from_integer((k + 1).into()));
        }
        Self::new(cs)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * r).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut cs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                cs[i + j] += a * b;
            }
        }
        Self::new(cs)
    }

    /// `p(q(x))`.
    pub fn compose(&self, q: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(q).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Euclidean division.
    ///
    /// # Panics
    /// When `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() / &lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.primitive_rational();
        }
        a.monic()
    }

    /// Scaled copy with coprime integer coefficients and positive leading term.
    fn primitive_rational(&self) -> Self {
        match self.integer_primitive() {
            Some(cs) => Self::new(cs.into_iter().map(BigRational::from_integer).collect()),
            None => Self::zero(),
        }
    }

    /// Coprime integer coefficients of a positive multiple, leading term positive.
    pub fn integer_primitive(&self) -> Option<Vec<BigInt>> {
        if self.is_zero() {
            return None;
        }
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &l).to_integer()).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        Some(ints.into_iter().map(|c| c / &g * &sign).collect())
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn squarefree(&self) -> Self {
        if self.degree().unwrap_or(0) < 1 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Enclosure of the range over `[lo, hi]` by naive interval Horner.
    pub fn eval_interval(&self, lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
        let mut a = BigRational::zero();
        let mut b = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            let ps = [&a * lo, &a * hi, &b * lo, &b * hi];
            let mn = ps.iter().min().unwrap().clone();
            let mx = ps.iter().max().unwrap().clone();
            a = mn + c;
            b = mx + c;
        }
        (a, b)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    f.write_str("u")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

/// Sparse polynomial in `arity` variables: exponent vector to coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MultiPoly {
    pub fn zero(arity: usize) -> Self {
        MultiPoly { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: BigRational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(vec![0; arity], c);
        p
    }

    /// The `i`-th coordinate function.
    pub fn var(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        let mut p = Self::zero(arity);
        p.add_term(e, BigRational::one());
        p
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Self {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            assert_eq!(e.len(), arity, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        let slot = self.terms.entry(e.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::from_terms(self.arity, self.terms.iter().map(|(e, c)| (e.clone(), c * r)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca * cb);
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.arity, BigRational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Mixed partial derivative `D^alpha`.
    pub fn partial(&self, alpha: &[u32]) -> Self {
        let mut p = Self::zero(self.arity);
        'terms: for (e, c) in &self.terms {
            let mut coef = c.clone();
            let mut ne = e.clone();
            for (k, &a) in alpha.iter().enumerate() {
                if e[k] < a {
                    continue 'terms;
                }
                for j in 0..a {
                    coef *= BigRational::from_integer((e[k] - j).into());
                }
                ne[k] = e[k] - a;
            }
            p.add_term(ne, coef);
        }
        p
    }

    pub fn eval_scalar<S: Scalar>(&self, point: &[S]) -> S {
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut m = S::from_rational(c);
            for (x, &k) in point.iter().zip(e) {
                m = m * x.powi(k);
            }
            acc = acc + m;
        }
        acc
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &k) in point.iter().zip(e) {
                m *= num_traits::pow(x.clone(), k as usize);
            }
            acc += m;
        }
        acc
    }

    /// Fixes all variables but the last, giving a polynomial in the last one.
    pub fn restrict_last(&self, prefix: &[BigRational]) -> UniPoly {
        let n = self.arity;
        assert_eq!(prefix.len() + 1, n, "prefix length");
        let mut cs: Vec<BigRational> = Vec::new();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &k) in prefix.iter().zip(e) {
                m *= num_traits::pow(x.clone(), k as usize);
            }
            let d = e[n - 1] as usize;
            if cs.len() <= d {
                cs.resize(d + 1, BigRational::zero());
            }
            cs[d] += m;
        }
        UniPoly::new(cs)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn from_uni(p: &UniPoly) -> Self {
        Self::from_terms(1, p.coeffs().iter().enumerate().map(|(k, c)| (vec![k as u32], c.clone())))
    }
}
