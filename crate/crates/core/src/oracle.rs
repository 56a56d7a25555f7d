//! Smooth functions presented by their derivative values.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{MultiPoly, UniPoly};
use crate::scalar::{factorial, Scalar};
use crate::text::parse_rational;

/// Default number of derivative orders searched when classifying a point.
pub const DEFAULT_SEARCH_CAP: usize = 64;

/// A univariate smooth function `f`, known through `f^(n)(a)`.
pub trait DerivativeOracle<S: Scalar>: Send + Sync {
    /// Descriptor; for built-ins this is the CLI name, e.g. `poly:[0,0,1]`.
    fn name(&self) -> String;

    /// `f^(n)(at)`.
    fn derivative(&self, n: usize, at: &S) -> Result<S>;

    /// `Some(true)` when every derivative of positive order vanishes at `at`,
    /// `Some(false)` when one is known not to, `None` when unknown.
    fn flat_at(&self, _at: &S) -> Option<bool> {
        None
    }

    fn search_cap(&self) -> usize {
        DEFAULT_SEARCH_CAP
    }

    /// Degree when `f` is a polynomial: derivatives above it vanish.
    fn degree(&self) -> Option<usize> {
        None
    }

    fn as_polynomial(&self) -> Option<UniPoly> {
        None
    }

    /// Weighted summands when `f` is a linear combination of other oracles.
    fn linear_parts(&self) -> Option<Vec<(BigRational, Oracle<S>)>> {
        None
    }
}

pub type Oracle<S> = Arc<dyn DerivativeOracle<S>>;

impl<S: Scalar> fmt::Debug for dyn DerivativeOracle<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A smooth function of several variables, known through its partials.
pub trait PartialOracle<S: Scalar>: Send + Sync {
    fn name(&self) -> String;
    fn arity(&self) -> usize;
    /// `D^alpha h(point)`.
    fn partial(&self, alpha: &[u32], point: &[S]) -> Result<S>;
    /// Degree in variable `i` when polynomial in it.
    fn degree_in(&self, _i: usize) -> Option<u32> {
        None
    }
    fn as_polynomial(&self) -> Option<&MultiPoly> {
        None
    }
}

pub type MultiOracle<S> = Arc<dyn PartialOracle<S>>;

fn oracle_err(name: &str, reason: impl Into<String>) -> Error {
    Error::Oracle { name: name.to_string(), reason: reason.into() }
}

// ---------------------------------------------------------------------------

/// Exact polynomial with all its derivatives precomputed.
#[derive(Clone, Debug)]
pub struct PolyOracle {
    name: String,
    derivs: Vec<UniPoly>,
}

impl PolyOracle {
    pub fn new(p: UniPoly) -> Self {
        let name = format!(
            "poly:[{}]",
            p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        );
        Self::named(name, p)
    }

    pub fn named(name: impl Into<String>, p: UniPoly) -> Self {
        let mut derivs = vec![p.clone()];
        let mut q = p;
        while !q.is_zero() {
            q = q.derivative();
            derivs.push(q.clone());
        }
        PolyOracle { name: name.into(), derivs }
    }

    /// `u^n`.
    pub fn powint(n: usize) -> Self {
        let mut cs = vec![BigRational::zero(); n + 1];
        cs[n] = BigRational::one();
        Self::named(format!("powint:{n}"), UniPoly::new(cs))
    }

    pub fn poly(&self) -> &UniPoly {
        &self.derivs[0]
    }
}

impl<S: Scalar> DerivativeOracle<S> for PolyOracle {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn derivative(&self, n: usize, at: &S) -> Result<S> {
        Ok(self.derivs.get(n).map(|p| p.eval_scalar(at)).unwrap_or_else(S::zero))
    }
    fn flat_at(&self, _at: &S) -> Option<bool> {
        Some(self.derivs[0].degree().unwrap_or(0) == 0)
    }
    fn degree(&self) -> Option<usize> {
        Some(self.derivs[0].degree().unwrap_or(0))
    }
    fn as_polynomial(&self) -> Option<UniPoly> {
        Some(self.derivs[0].clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Log,
}

impl<S: Scalar> DerivativeOracle<S> for Elementary {
    fn name(&self) -> String {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Exp => "exp",
            Elementary::Log => "log",
        }
        .to_string()
    }

    fn derivative(&self, n: usize, at: &S) -> Result<S> {
        match self {
            Elementary::Sin | Elementary::Cos => {
                let shift = if *self == Elementary::Sin { n } else { n + 1 };
                Ok(match shift % 4 {
                    0 => at.sin()?,
                    1 => at.cos()?,
                    2 => -at.sin()?,
                    _ => -at.cos()?,
                })
            }
            Elementary::Exp => at.exp(),
            Elementary::Log => {
                if at.signum() <= 0 {
                    return Err(oracle_err("log", format!("{at} outside (0, inf)")));
                }
                if n == 0 {
                    return at.ln();
                }
                let mut v = factorial::<S>(n - 1) / at.powi(n as u32);
                if n % 2 == 0 {
                    v = -v;
                }
                Ok(v)
            }
        }
    }

    fn flat_at(&self, _at: &S) -> Option<bool> {
        Some(false)
    }
}

/// `e^(-1/u)` for `u > 0`, zero for `u <= 0`: smooth, flat on `u <= 0`.
#[derive(Clone, Debug)]
pub struct FlatExp {
    // P_n with f^(n)(u) = P_n(1/u) e^(-1/u)
    polys: Vec<UniPoly>,
}

impl FlatExp {
    pub fn new() -> Self {
        FlatExp { polys: vec![UniPoly::from_ints(&[1])] }
    }

    fn poly(&self, n: usize) -> UniPoly {
        let mut ps = self.polys.clone();
        let u2 = UniPoly::from_ints(&[0, 0, 1]);
        while ps.len() <= n {
            let p = ps.last().unwrap();
            ps.push(u2.mul(&p.sub(&p.derivative())));
        }
        ps[n].clone()
    }
}

impl Default for FlatExp {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> DerivativeOracle<S> for FlatExp {
    fn name(&self) -> String {
        "flatexp".into()
    }
    fn derivative(&self, n: usize, at: &S) -> Result<S> {
        if at.signum() <= 0 {
            return Ok(S::zero());
        }
        let u = S::one() / at.clone();
        let e = (-u.clone()).exp()?;
        Ok(self.poly(n).eval_scalar(&u) * e)
    }
    fn flat_at(&self, at: &S) -> Option<bool> {
        Some(at.signum() <= 0)
    }
}

/// `u ↦ sin(n u) / n`.
#[derive(Clone, Copy, Debug)]
pub struct SinOverN(pub u64);

impl<S: Scalar> DerivativeOracle<S> for SinOverN {
    fn name(&self) -> String {
        format!("sin_over_n:{}", self.0)
    }
    fn derivative(&self, k: usize, at: &S) -> Result<S> {
        let n = S::from_int(self.0 as i64);
        let arg = n.clone() * at.clone();
        let base = match k % 4 {
            0 => arg.sin()?,
            1 => arg.cos()?,
            2 => -arg.sin()?,
            _ => -arg.cos()?,
        };
        if k == 0 {
            Ok(base / n)
        } else {
            Ok(base * n.powi(k as u32 - 1))
        }
    }
    fn flat_at(&self, _at: &S) -> Option<bool> {
        Some(false)
    }
}

type DerivFn<S> = dyn Fn(usize, &S) -> Result<S> + Send + Sync;
type FlatFn<S> = dyn Fn(&S) -> Option<bool> + Send + Sync;

/// Oracle backed by a closure.
pub struct FnOracle<S: Scalar> {
    name: String,
    f: Box<DerivFn<S>>,
    flat: Option<Box<FlatFn<S>>>,
    cap: usize,
}

impl<S: Scalar> FnOracle<S> {
    pub fn new(name: impl Into<String>, f: impl Fn(usize, &S) -> Result<S> + Send + Sync + 'static) -> Self {
        FnOracle { name: name.into(), f: Box::new(f), flat: None, cap: DEFAULT_SEARCH_CAP }
    }

    pub fn with_flatness(mut self, flat: impl Fn(&S) -> Option<bool> + Send + Sync + 'static) -> Self {
        self.flat = Some(Box::new(flat));
        self
    }

    pub fn with_search_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

impl<S: Scalar> DerivativeOracle<S> for FnOracle<S> {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn derivative(&self, n: usize, at: &S) -> Result<S> {
        (self.f)(n, at)
    }
    fn flat_at(&self, at: &S) -> Option<bool> {
        self.flat.as_ref().and_then(|f| f(at))
    }
    fn search_cap(&self) -> usize {
        self.cap
    }
}

/// A function known only by declared properties (e.g. a bump with unit
/// integral); it has no pointwise values.
#[derive(Clone, Debug)]
pub struct Declared {
    pub name: String,
}

impl Declared {
    pub fn new(name: impl Into<String>) -> Self {
        Declared { name: name.into() }
    }
}

impl<S: Scalar> DerivativeOracle<S> for Declared {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn derivative(&self, _n: usize, _at: &S) -> Result<S> {
        Err(oracle_err(&self.name, "declared function has no pointwise values"))
    }
}

/// `Σ c_i f_i` with rational weights.
pub struct LinearCombination<S: Scalar> {
    parts: Vec<(BigRational, Oracle<S>)>,
}

impl<S: Scalar> LinearCombination<S> {
    pub fn new(parts: Vec<(BigRational, Oracle<S>)>) -> Self {
        LinearCombination { parts }
    }

    pub fn parts(&self) -> &[(BigRational, Oracle<S>)] {
        &self.parts
    }
}

impl<S: Scalar> DerivativeOracle<S> for LinearCombination<S> {
    fn name(&self) -> String {
        let body: Vec<String> = self.parts.iter().map(|(c, f)| format!("{c}*{}", f.name())).collect();
        format!("lincomb:[{}]", body.join(","))
    }
    fn derivative(&self, n: usize, at: &S) -> Result<S> {
        let mut acc = S::zero();
        for (c, f) in &self.parts {
            acc = acc + S::from_rational(c) * f.derivative(n, at)?;
        }
        Ok(acc)
    }
    fn degree(&self) -> Option<usize> {
        self.parts.iter().map(|(_, f)| f.degree()).try_fold(0, |m, d| d.map(|d| m.max(d)))
    }
    fn as_polynomial(&self) -> Option<UniPoly> {
        let mut acc = UniPoly::zero();
        for (c, f) in &self.parts {
            acc = acc.add(&f.as_polynomial()?.scale(c));
        }
        Some(acc)
    }
    fn linear_parts(&self) -> Option<Vec<(BigRational, Oracle<S>)>> {
        Some(self.parts.clone())
    }
}

/// `x ↦ D^(alpha, 0) h(base, x)`: a slice of a partial derivative in the last
/// variable.
pub struct PartialSlice<S: Scalar> {
    h: MultiOracle<S>,
    alpha: Vec<u32>,
    base: Vec<S>,
}

impl<S: Scalar> PartialSlice<S> {
    pub fn new(h: MultiOracle<S>, alpha: Vec<u32>, base: Vec<S>) -> Self {
        assert_eq!(alpha.len() + 1, h.arity(), "multi-index length");
        assert_eq!(base.len() + 1, h.arity(), "base point length");
        PartialSlice { h, alpha, base }
    }
}

impl<S: Scalar> DerivativeOracle<S> for PartialSlice<S> {
    fn name(&self) -> String {
        format!("slice:{}@{:?}", self.h.name(), self.alpha)
    }
    fn derivative(&self, n: usize, at: &S) -> Result<S> {
        let mut alpha = self.alpha.clone();
        alpha.push(n as u32);
        let mut point = self.base.clone();
        point.push(at.clone());
        self.h.partial(&alpha, &point)
    }
    fn degree(&self) -> Option<usize> {
        self.h.degree_in(self.alpha.len()).map(|d| d as usize)
    }
}

// ---------------------------------------------------------------------------

/// Polynomial in several variables.
#[derive(Clone, Debug)]
pub struct MultiPolyOracle {
    name: String,
    p: MultiPoly,
}

impl MultiPolyOracle {
    pub fn new(p: MultiPoly) -> Self {
        MultiPolyOracle { name: "multipoly".into(), p }
    }

    pub fn named(name: impl Into<String>, p: MultiPoly) -> Self {
        MultiPolyOracle { name: name.into(), p }
    }
}

impl<S: Scalar> PartialOracle<S> for MultiPolyOracle {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn arity(&self) -> usize {
        self.p.arity()
    }
    fn partial(&self, alpha: &[u32], point: &[S]) -> Result<S> {
        if alpha.len() != self.p.arity() || point.len() != self.p.arity() {
            return Err(oracle_err(&self.name, "arity mismatch"));
        }
        Ok(self.p.partial(alpha).eval_scalar(point))
    }
    fn degree_in(&self, i: usize) -> Option<u32> {
        Some(self.p.degree_in(i))
    }
    fn as_polynomial(&self) -> Option<&MultiPoly> {
        Some(&self.p)
    }
}

/// A univariate oracle seen as a one-variable partial oracle.
pub struct Univariate<S: Scalar>(pub Oracle<S>);

impl<S: Scalar> PartialOracle<S> for Univariate<S> {
    fn name(&self) -> String {
        self.0.name()
    }
    fn arity(&self) -> usize {
        1
    }
    fn partial(&self, alpha: &[u32], point: &[S]) -> Result<S> {
        if alpha.len() != 1 || point.len() != 1 {
            return Err(oracle_err(&self.0.name(), "arity mismatch"));
        }
        self.0.derivative(alpha[0] as usize, &point[0])
    }
    fn degree_in(&self, _i: usize) -> Option<u32> {
        self.0.degree().map(|d| d as u32)
    }
}

/// Builds a built-in oracle from its descriptor: `poly:[c0,c1,...]`,
/// `powint:n`, `sin`, `cos`, `exp`, `log` or `flatexp`.
pub fn parse_oracle<S: Scalar>(desc: &str) -> Result<Oracle<S>> {
    let d = desc.trim();
    match d {
        "sin" => return Ok(Arc::new(Elementary::Sin)),
        "cos" => return Ok(Arc::new(Elementary::Cos)),
        "exp" => return Ok(Arc::new(Elementary::Exp)),
        "log" => return Ok(Arc::new(Elementary::Log)),
        "flatexp" => return Ok(Arc::new(FlatExp::new())),
        _ => {}
    }
    if let Some(n) = d.strip_prefix("powint:") {
        let n: usize = n.trim().parse().map_err(|_| Error::UnknownName(desc.to_string()))?;
        if n > 4096 {
            return Err(Error::InvalidArgument(format!("power {n} too large")));
        }
        return Ok(Arc::new(PolyOracle::powint(n)));
    }
    if let Some(body) = d.strip_prefix("poly:") {
        let inner = body
            .trim()
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| Error::InvalidArgument(format!("expected poly:[c0,...], got {desc}")))?;
        let mut cs = Vec::new();
        if !inner.trim().is_empty() {
            for part in inner.split(',') {
                cs.push(
                    parse_rational(part)
                        .ok_or_else(|| Error::InvalidArgument(format!("bad coefficient `{}`", part.trim())))?,
                );
            }
        }
        return Ok(Arc::new(PolyOracle::named(d.to_string(), UniPoly::new(cs))));
    }
    Err(Error::UnknownName(desc.to_string()))
}

/// Integer helper for tests and generators.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Float, Rational};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn polynomial_derivatives_are_symbolic() {
        let f: Oracle<Rational> = parse_oracle("poly:[1,-2,0,3]").unwrap();
        assert_eq!(f.derivative(0, &q(2, 1)).unwrap(), q(21, 1));
        assert_eq!(f.derivative(1, &q(2, 1)).unwrap(), q(34, 1));
        assert_eq!(f.derivative(3, &q(5, 1)).unwrap(), q(18, 1));
        assert_eq!(f.derivative(4, &q(5, 1)).unwrap(), q(0, 1));
        assert_eq!(f.degree(), Some(3));
        let g: Oracle<Rational> = parse_oracle("powint:3").unwrap();
        assert_eq!(g.derivative(2, &q(1, 2)).unwrap(), q(3, 1));
    }

    #[test]
    fn elementary_exact_points() {
        let s: Oracle<Rational> = parse_oracle("sin").unwrap();
        assert_eq!(s.derivative(1, &q(0, 1)).unwrap(), q(1, 1));
        assert!(matches!(s.derivative(0, &q(1, 1)), Err(Error::TranscendentalNotExact(_))));
        let l: Oracle<Rational> = parse_oracle("log").unwrap();
        assert_eq!(l.derivative(2, &q(1, 1)).unwrap(), q(-1, 1));
        assert_eq!(l.derivative(3, &q(2, 1)).unwrap(), q(1, 4));
    }

    #[test]
    fn float_elementary() {
        let c: Oracle<Float> = parse_oracle("cos").unwrap();
        let x = Float::from_rational(&rat(1, 3));
        let v = c.derivative(1, &x).unwrap() + x.sin().unwrap();
        assert!(v.is_negligible());
    }

    #[test]
    fn flat_exponential() {
        let f = FlatExp::new();
        assert_eq!(DerivativeOracle::<Rational>::flat_at(&f, &q(0, 1)), Some(true));
        assert_eq!(DerivativeOracle::<Rational>::derivative(&f, 5, &q(0, 1)).unwrap(), q(0, 1));
        // f'(u) = u^-2 e^(-1/u)
        let x = Float::from_rational(&rat(1, 2));
        let d = DerivativeOracle::<Float>::derivative(&f, 1, &x).unwrap();
        let expect = Float::from_int(4) * Float::from_int(-2).exp().unwrap();
        assert!((d - expect).is_negligible());
    }

    #[test]
    fn unknown_descriptors() {
        assert!(matches!(parse_oracle::<Rational>("tan"), Err(Error::UnknownName(_))));
        assert!(parse_oracle::<Rational>("poly:[1,x]").is_err());
    }

    #[test]
    fn partial_slices() {
        let h = MultiPoly::from_terms(2, [(vec![0, 3], int(1)), (vec![1, 2], int(1))]);
        let h: MultiOracle<Rational> = Arc::new(MultiPolyOracle::new(h));
        let s = PartialSlice::new(h, vec![1], vec![q(0, 1)]);
        // x ↦ ∂_v h(0, x) = x^2
        assert_eq!(s.derivative(0, &q(3, 1)).unwrap(), q(9, 1));
        assert_eq!(s.derivative(2, &q(3, 1)).unwrap(), q(2, 1));
    }
}
