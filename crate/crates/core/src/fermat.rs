//! The ring of Fermat reals.
//!
//! A value is stored in decomposition form: a standard part plus finitely many
//! terms `c * t^a` with `0 < a <= 1`, exponents strictly increasing and every
//! coefficient nonzero. Powers of `t` above 1 are identified with zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Exponent of `t`, an exact rational in `(0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(BigRational);

impl Exponent {
    pub fn new(r: BigRational) -> Result<Self> {
        if r.is_positive() && r <= BigRational::one() {
            Ok(Exponent(r))
        } else {
            Err(Error::InvalidArgument(format!("exponent {r} outside (0, 1]")))
        }
    }

    pub fn ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Self::new(BigRational::new(p.into(), q.into()))
    }

    pub fn one() -> Self {
        Exponent(BigRational::one())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// A Fermat real over the scalar backend `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct FermatReal<S: Scalar = Rational> {
    standard: S,
    terms: Vec<(Exponent, S)>,
}

impl<S: Scalar> FermatReal<S> {
    pub fn real(r: S) -> Self {
        FermatReal { standard: r, terms: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::real(S::zero())
    }

    pub fn one() -> Self {
        Self::real(S::one())
    }

    /// The generator `t`.
    pub fn t() -> Self {
        Self::monomial(S::one(), Exponent::one())
    }

    /// `c * t^e`.
    pub fn monomial(c: S, e: Exponent) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        FermatReal { standard: S::zero(), terms: vec![(e, c)] }
    }

    /// Builds the decomposition of a quasi-decomposition.
    ///
    /// Exponent 0 contributes to the standard part, exponents above 1 are
    /// dropped, duplicates are summed and zero coefficients removed.
    ///
    /// # Panics
    /// On a negative exponent.
    pub fn normalize<I>(raw: I) -> Self
    where
        I: IntoIterator<Item = (BigRational, S)>,
    {
        let mut standard = S::zero();
        let mut acc: BTreeMap<BigRational, S> = BTreeMap::new();
        let one = BigRational::one();
        for (e, c) in raw {
            assert!(!e.is_negative(), "negative exponent {e}");
            if e.is_zero() {
                standard = standard + c;
            } else if e <= one {
                accumulate(&mut acc, e, c);
            }
        }
        Self::from_map(standard, acc)
    }

    /// Standard part plus terms; the terms need not be sorted or distinct.
    pub fn from_parts(standard: S, terms: Vec<(Exponent, S)>) -> Self {
        let raw = std::iter::once((BigRational::zero(), standard))
            .chain(terms.into_iter().map(|(e, c)| (e.0, c)));
        Self::normalize(raw)
    }

    fn from_map(standard: S, acc: BTreeMap<BigRational, S>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (Exponent(e), c))
            .collect();
        FermatReal { standard, terms }
    }

    pub fn standard_part(&self) -> &S {
        &self.standard
    }

    pub fn terms(&self) -> &[(Exponent, S)] {
        &self.terms
    }

    /// `x - °x`.
    pub fn infinitesimal_part(&self) -> Self {
        FermatReal { standard: S::zero(), terms: self.terms.clone() }
    }

    pub fn leading_term(&self) -> Option<&(Exponent, S)> {
        self.terms.first()
    }

    /// Coefficient of `t^e`, zero if absent.
    pub fn coefficient(&self, e: &BigRational) -> S {
        if e.is_zero() {
            return self.standard.clone();
        }
        self.terms
            .iter()
            .find(|(x, _)| x.value() == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.standard.is_zero() && self.terms.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_infinitesimal(&self) -> bool {
        self.standard.is_zero()
    }

    pub fn scale(&self, r: &S) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.clone() * r.clone()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        FermatReal { standard: self.standard.clone() * r.clone(), terms }
    }

    /// `c * t^e` for every term, shifted: multiplies by `t^e`.
    pub fn shift(&self, e: &BigRational) -> Self {
        let raw = std::iter::once((e.clone(), self.standard.clone()))
            .chain(self.terms.iter().map(|(a, c)| (a.0.clone() + e, c.clone())));
        Self::normalize(raw)
    }

    pub fn pow_nat(&self, n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Dictionary order on (standard part, coefficients by ascending exponent).
    pub fn compare(&self, other: &Self) -> Ordering {
        match cmp_scalar(&self.standard, &other.standard) {
            Ordering::Equal => {}
            o => return o,
        }
        let zero = S::zero();
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let (a, b) = match (self.terms.get(i), other.terms.get(j)) {
                (Some((ea, ca)), Some((eb, cb))) => match ea.cmp(eb) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (ca, cb)
                    }
                    Ordering::Less => {
                        i += 1;
                        (ca, &zero)
                    }
                    Ordering::Greater => {
                        j += 1;
                        (&zero, cb)
                    }
                },
                (Some((_, ca)), None) => {
                    i += 1;
                    (ca, &zero)
                }
                (None, Some((_, cb))) => {
                    j += 1;
                    (&zero, cb)
                }
                (None, None) => unreachable!(),
            };
            match cmp_scalar(a, b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }

    pub fn abs(&self) -> Self {
        if self.compare(&Self::zero()) == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    /// `1/b₁` for the least exponent `b₁` of the infinitesimal part, 0 on reals.
    pub fn order_omega(&self) -> BigRational {
        match self.terms.first() {
            Some((e, _)) => e.0.recip(),
            None => BigRational::zero(),
        }
    }

    /// Least `m >= 1` with `(δx)^m = 0`.
    pub fn nilpotency_index(&self) -> usize {
        let w = self.order_omega().floor().to_integer();
        w.to_usize().expect("omega fits in usize") + 1
    }

    /// Value of the representing polynomial `°x + Σ c·t0^a` at `t0 > 0`.
    pub fn eval_representative(&self, t0: &S) -> Result<S> {
        if t0.signum() <= 0 {
            return Err(Error::Domain(format!("t0 = {t0} must be positive")));
        }
        let mut acc = self.standard.clone();
        for (e, c) in &self.terms {
            acc = acc + c.clone() * t0.pow_ratio(&e.0)?;
        }
        Ok(acc)
    }

    /// Applies `f` to every coefficient and renormalizes.
    pub fn map_coefficients<T: Scalar>(&self, f: impl Fn(&S) -> T) -> FermatReal<T> {
        let raw = std::iter::once((BigRational::zero(), f(&self.standard)))
            .chain(self.terms.iter().map(|(e, c)| (e.0.clone(), f(c))));
        FermatReal::normalize(raw)
    }

    /// Drops coefficients that are negligible for the backend.
    pub fn prune_negligible(&self) -> Self {
        let standard = if self.standard.is_negligible() { S::zero() } else { self.standard.clone() };
        let terms = self.terms.iter().filter(|(_, c)| !c.is_negligible()).cloned().collect();
        FermatReal { standard, terms }
    }

    pub fn to_rational(&self) -> FermatReal<Rational> {
        self.map_coefficients(|c| Rational(c.to_rational()))
    }

    pub fn from_rational(x: &FermatReal<Rational>) -> Self {
        x.map_coefficients(|c| S::from_rational(c.inner()))
    }
}

fn accumulate<S: Scalar>(acc: &mut BTreeMap<BigRational, S>, e: BigRational, c: S) {
    match acc.get_mut(&e) {
        Some(v) => *v = v.clone() + c,
        None => {
            acc.insert(e, c);
        }
    }
}

pub(crate) fn cmp_scalar<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

impl<S: Scalar> PartialOrd for FermatReal<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.compare(other))
    }
}

impl<S: Scalar> From<S> for FermatReal<S> {
    fn from(r: S) -> Self {
        Self::real(r)
    }
}

impl From<i64> for FermatReal<Rational> {
    fn from(n: i64) -> Self {
        Self::real(Rational::from(n))
    }
}

impl<S: Scalar> Add for &FermatReal<S> {
    type Output = FermatReal<S>;
    fn add(self, rhs: &FermatReal<S>) -> FermatReal<S> {
        let mut acc: BTreeMap<BigRational, S> = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(rhs.terms.iter()) {
            accumulate(&mut acc, e.0.clone(), c.clone());
        }
        FermatReal::from_map(self.standard.clone() + rhs.standard.clone(), acc)
    }
}

impl<S: Scalar> Neg for &FermatReal<S> {
    type Output = FermatReal<S>;
    fn neg(self) -> FermatReal<S> {
        FermatReal {
            standard: -self.standard.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl<S: Scalar> Sub for &FermatReal<S> {
    type Output = FermatReal<S>;
    fn sub(self, rhs: &FermatReal<S>) -> FermatReal<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Mul for &FermatReal<S> {
    type Output = FermatReal<S>;
    fn mul(self, rhs: &FermatReal<S>) -> FermatReal<S> {
        let one = BigRational::one();
        let zero = BigRational::zero();
        let lhs_all: Vec<(&BigRational, &S)> = std::iter::once((&zero, &self.standard))
            .chain(self.terms.iter().map(|(e, c)| (&e.0, c)))
            .collect();
        let rhs_all: Vec<(&BigRational, &S)> = std::iter::once((&zero, &rhs.standard))
            .chain(rhs.terms.iter().map(|(e, c)| (&e.0, c)))
            .collect();
        let mut standard = S::zero();
        let mut acc: BTreeMap<BigRational, S> = BTreeMap::new();
        for (ea, ca) in &lhs_all {
            if ca.is_zero() {
                continue;
            }
            for (eb, cb) in &rhs_all {
                if cb.is_zero() {
                    continue;
                }
                let e = *ea + *eb;
                if e > one {
                    // rhs exponents ascend, so the rest overflow too
                    break;
                }
                let c = (*ca).clone() * (*cb).clone();
                if e.is_zero() {
                    standard = standard + c;
                } else {
                    accumulate(&mut acc, e, c);
                }
            }
        }
        FermatReal::from_map(standard, acc)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr for FermatReal<S> {
            type Output = FermatReal<S>;
            fn $m(self, rhs: FermatReal<S>) -> FermatReal<S> {
                (&self).$m(&rhs)
            }
        }
        impl<S: Scalar> $tr<&FermatReal<S>> for FermatReal<S> {
            type Output = FermatReal<S>;
            fn $m(self, rhs: &FermatReal<S>) -> FermatReal<S> {
                (&self).$m(rhs)
            }
        }
        impl<S: Scalar> $tr<FermatReal<S>> for &FermatReal<S> {
            type Output = FermatReal<S>;
            fn $m(self, rhs: FermatReal<S>) -> FermatReal<S> {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<S: Scalar> Neg for FermatReal<S> {
    type Output = FermatReal<S>;
    fn neg(self) -> FermatReal<S> {
        -&self
    }
}

impl<S: Scalar> std::iter::Sum for FermatReal<S> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}
