//! Ordered-field coefficient backends.
//!
//! Two backends implement [`Scalar`]: [`Rational`] (arbitrary-size exact
//! fractions) and [`Float`] (binary big floats at a configurable decimal
//! precision). A computation picks one backend through the type parameter of
//! [`FermatReal`](crate::FermatReal), so values of different backends can never
//! meet in one expression.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(n: i64, d: i64) -> Self {
        Rational(rat(n, d))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

macro_rules! rational_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

/// An ordered field element usable as a Fermat-real coefficient.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// Exact rational value of `self` (binary floats are dyadic rationals).
    fn to_rational(&self) -> BigRational;
    fn is_zero(&self) -> bool;
    /// Zero up to the backend's working tolerance. Identical to
    /// [`Scalar::is_zero`] for the exact backend.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn abs(&self) -> Self;
    /// Real `n`-th root. Odd roots accept any sign; even roots need `self >= 0`.
    fn root(&self, n: u32) -> Result<Self>;
    /// `self^e` for `self > 0` and rational `e`.
    fn pow_ratio(&self, e: &BigRational) -> Result<Self>;
    fn sin(&self) -> Result<Self>;
    fn cos(&self) -> Result<Self>;
    fn exp(&self) -> Result<Self>;
    fn ln(&self) -> Result<Self>;
    fn pi() -> Result<Self>;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if *self > Self::zero() {
            1
        } else {
            -1
        }
    }

    fn sqrt(&self) -> Result<Self> {
        self.root(2)
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }

    fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }
}

/// `n!` as a scalar.
pub fn factorial<S: Scalar>(n: usize) -> S {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    S::from_rational(&BigRational::from_integer(acc))
}

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn exact_int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    if r.pow(k) == *n {
        Some(r)
    } else {
        None
    }
}

fn exact_root(x: &BigRational, n: u32) -> Option<BigRational> {
    let num = exact_int_root(x.numer(), n)?;
    let den = exact_int_root(x.denom(), n)?;
    Some(BigRational::new(num, den))
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn from_rational(r: &BigRational) -> Self {
        Rational(r.clone())
    }
    fn to_rational(&self) -> BigRational {
        self.0.clone()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    fn root(&self, n: u32) -> Result<Self> {
        let x = &self.0;
        if n == 0 {
            return Err(Error::Domain("0-th root".into()));
        }
        if x.is_negative() {
            if n % 2 == 0 {
                return Err(Error::Domain(format!("even root of negative {x}")));
            }
            return exact_root(&-x, n)
                .map(|r| Rational(-r))
                .ok_or_else(|| Error::RootNotExact(format!("{n}-th root of {x}")));
        }
        exact_root(x, n)
            .map(Rational)
            .ok_or_else(|| Error::RootNotExact(format!("{n}-th root of {x}")))
    }

    fn pow_ratio(&self, e: &BigRational) -> Result<Self> {
        let x = &self.0;
        if !x.is_positive() {
            return Err(Error::Domain(format!("fractional power of non-positive {x}")));
        }
        let q = e
            .denom()
            .to_u32()
            .ok_or_else(|| Error::ExactBackendRootNeeded(format!("{x}^({e})")))?;
        let p = e
            .numer()
            .abs()
            .to_i32()
            .ok_or_else(|| Error::Domain(format!("exponent {e} too large")))?;
        let base = exact_root(x, q).ok_or_else(|| Error::ExactBackendRootNeeded(format!("{x}^({e})")))?;
        let mut v = num_traits::pow::Pow::pow(&base, p);
        if e.is_negative() {
            v = v.recip();
        }
        Ok(Rational(v))
    }

    fn sin(&self) -> Result<Self> {
        if self.0.is_zero() {
            Ok(Self::zero())
        } else {
            Err(Error::TranscendentalNotExact(format!("sin({self})")))
        }
    }
    fn cos(&self) -> Result<Self> {
        if self.0.is_zero() {
            Ok(Self::one())
        } else {
            Err(Error::TranscendentalNotExact(format!("cos({self})")))
        }
    }
    fn exp(&self) -> Result<Self> {
        if self.0.is_zero() {
            Ok(Self::one())
        } else {
            Err(Error::TranscendentalNotExact(format!("exp({self})")))
        }
    }
    fn ln(&self) -> Result<Self> {
        if !self.0.is_positive() {
            return Err(Error::Domain(format!("log of non-positive {self}")));
        }
        if self.0.is_one() {
            Ok(Self::zero())
        } else {
            Err(Error::TranscendentalNotExact(format!("log({self})")))
        }
    }
    fn pi() -> Result<Self> {
        Err(Error::TranscendentalNotExact("pi".into()))
    }
}

// ---------------------------------------------------------------------------
// Big float backend

/// Default working precision of the float backend, in decimal digits.
pub const DEFAULT_FLOAT_DIGITS: usize = 50;

thread_local! {
    static FLOAT_DIGITS: Cell<usize> = const { Cell::new(DEFAULT_FLOAT_DIGITS) };
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

const RM: RoundingMode = RoundingMode::ToEven;
const WORD_BITS: usize = Word::BITS as usize;

/// Decimal digits used by float operations on the current thread.
pub fn float_digits() -> usize {
    FLOAT_DIGITS.with(|d| d.get())
}

/// Sets the float precision for the current thread.
pub fn set_float_digits(digits: usize) {
    FLOAT_DIGITS.with(|d| d.set(digits.max(4)));
}

/// Runs `f` with a temporary float precision on the current thread.
pub fn with_float_digits<T>(digits: usize, f: impl FnOnce() -> T) -> T {
    let old = float_digits();
    set_float_digits(digits);
    struct Restore(usize);
    impl Drop for Restore {
        fn drop(&mut self) {
            set_float_digits(self.0);
        }
    }
    let _restore = Restore(old);
    f()
}

fn precision_bits() -> usize {
    // log2(10) < 3.33; one guard word on top.
    let bits = (float_digits() * 333).div_ceil(100) + WORD_BITS;
    bits.div_ceil(WORD_BITS) * WORD_BITS
}

/// Big binary float at the thread's configured decimal precision.
#[derive(Clone, Debug)]
pub struct Float(BigFloat);

impl Float {
    fn wrap(v: BigFloat) -> Self {
        Float(v)
    }

    fn bits(&self, other: &Float) -> usize {
        let own = self.0.precision().unwrap_or(0).max(other.0.precision().unwrap_or(0));
        own.max(precision_bits())
    }

    fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
        CONSTS.with(|c| f(&mut c.borrow_mut()))
    }

    fn checked(self, what: &str) -> Result<Self> {
        if self.0.is_nan() || self.0.is_inf() {
            Err(Error::Domain(format!("{what} is not finite")))
        } else {
            Ok(self)
        }
    }

    fn from_bigint(n: &BigInt) -> BigFloat {
        let (sign, digits) = n.to_u64_digits();
        if digits.is_empty() {
            return BigFloat::new(precision_bits());
        }
        let words: Vec<Word> = digits.iter().map(|&d| d as Word).collect();
        let e = (words.len() * WORD_BITS) as astro_float::Exponent;
        let s = if sign == BigSign::Minus { Sign::Neg } else { Sign::Pos };
        BigFloat::from_words(&words, s, e)
    }

    /// Absolute threshold below which a value counts as zero:
    /// `10^-(digits/2)`.
    pub fn tolerance() -> BigRational {
        let d = (float_digits() / 2) as u32;
        BigRational::new(BigInt::one(), BigInt::from(10u32).pow(d))
    }
}

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl Add for Float {
    type Output = Float;
    fn add(self, rhs: Float) -> Float {
        let p = self.bits(&rhs);
        Float::wrap(self.0.add(&rhs.0, p, RM))
    }
}

impl Sub for Float {
    type Output = Float;
    fn sub(self, rhs: Float) -> Float {
        let p = self.bits(&rhs);
        Float::wrap(self.0.sub(&rhs.0, p, RM))
    }
}

impl Mul for Float {
    type Output = Float;
    fn mul(self, rhs: Float) -> Float {
        let p = self.bits(&rhs);
        Float::wrap(self.0.mul(&rhs.0, p, RM))
    }
}

impl Div for Float {
    type Output = Float;
    fn div(self, rhs: Float) -> Float {
        let p = self.bits(&rhs);
        Float::wrap(self.0.div(&rhs.0, p, RM))
    }
}

impl Neg for Float {
    type Output = Float;
    fn neg(self) -> Float {
        Float::wrap(self.0.neg())
    }
}

impl fmt::Display for Float {
    /// Plain decimal with the configured number of significant digits,
    /// trailing zeros removed. The output is a valid CLI literal.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_nan() {
            return f.write_str("nan");
        }
        if self.0.is_inf() {
            return f.write_str(if self.0.is_positive() { "inf" } else { "-inf" });
        }
        f.write_str(&decimal_string(&self.to_rational(), float_digits()))
    }
}

/// Renders `r` with `digits` significant decimal digits.
pub fn decimal_string(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let a = r.abs();
    let ten = BigInt::from(10);
    // 10^e <= a < 10^(e+1)
    let mut e: i64 = {
        let approx = a.to_f64().map(|v| v.log10().floor()).unwrap_or(0.0);
        if approx.is_finite() {
            approx as i64
        } else {
            0
        }
    };
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(ten.pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), ten.pow((-k) as u32))
        }
    };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let scale = digits as i64 - 1 - e;
    let scaled = &a * pow10(scale);
    let mut n = scaled.round().to_integer();
    let mut scale = scale;
    // drop trailing zeros of the integer while digits remain after the point
    while scale > 0 && n.is_multiple_of(&ten) && !Zero::is_zero(&n) {
        n /= &ten;
        scale -= 1;
    }
    let mut s = n.to_string();
    if scale <= 0 {
        s.push_str(&"0".repeat((-scale) as usize));
    } else {
        let scale = scale as usize;
        if s.len() <= scale {
            s = format!("0.{}{}", "0".repeat(scale - s.len()), s);
        } else {
            s.insert(s.len() - scale, '.');
        }
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

impl Scalar for Float {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        Float(BigFloat::new(precision_bits()))
    }
    fn one() -> Self {
        Float(BigFloat::from_word(1, precision_bits()))
    }

    fn from_rational(r: &BigRational) -> Self {
        let p = precision_bits();
        let n = Float::from_bigint(r.numer());
        if One::is_one(r.denom()) {
            let mut v = n;
            let _ = v.set_precision(p.max(v.precision().unwrap_or(p)), RM);
            return Float(v);
        }
        let d = Float::from_bigint(r.denom());
        Float(n.div(&d, p, RM))
    }

    fn to_rational(&self) -> BigRational {
        let Some((words, _bits, sign, exp, _)) = self.0.as_raw_parts() else {
            return Zero::zero();
        };
        if words.iter().all(|w| *w == 0) {
            return Zero::zero();
        }
        let mut mantissa = BigInt::zero();
        for w in words.iter().rev() {
            mantissa = (mantissa << WORD_BITS) + BigInt::from(*w as u64);
        }
        let shift = exp as i64 - (words.len() * WORD_BITS) as i64;
        let two = BigInt::from(2);
        let mut v = if shift >= 0 {
            BigRational::from_integer(mantissa * two.pow(shift as u32))
        } else {
            BigRational::new(mantissa, two.pow((-shift) as u32))
        };
        if sign == Sign::Neg {
            v = -v;
        }
        v
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_negligible(&self) -> bool {
        if self.0.is_zero() {
            return true;
        }
        Signed::abs(&self.to_rational()) < Float::tolerance()
    }

    fn abs(&self) -> Self {
        Float(self.0.abs())
    }

    fn root(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("0-th root".into()));
        }
        if self.0.is_zero() {
            return Ok(self.clone());
        }
        let neg = self.0.is_negative();
        if neg && n % 2 == 0 {
            return Err(Error::Domain(format!("even root of negative {self}")));
        }
        let p = self.bits(self);
        let a = self.0.abs();
        let r = match n {
            1 => a,
            2 => a.sqrt(p, RM),
            3 => a.cbrt(p, RM),
            _ => Float::with_consts(|cc| {
                let l = a.ln(p, RM, cc);
                let k = BigFloat::from_word(n as Word, p);
                l.div(&k, p, RM).exp(p, RM, cc)
            }),
        };
        let r = Float(r).checked("root")?;
        Ok(if neg { -r } else { r })
    }

    fn pow_ratio(&self, e: &BigRational) -> Result<Self> {
        if !self.0.is_positive() || self.0.is_zero() {
            return Err(Error::Domain(format!("fractional power of non-positive {self}")));
        }
        let p = self.bits(self);
        let ef = Float::from_rational(e);
        Float::with_consts(|cc| Float(self.0.pow(&ef.0, p, RM, cc))).checked("power")
    }

    fn sin(&self) -> Result<Self> {
        let p = self.bits(self);
        Float::with_consts(|cc| Float(self.0.sin(p, RM, cc))).checked("sin")
    }
    fn cos(&self) -> Result<Self> {
        let p = self.bits(self);
        Float::with_consts(|cc| Float(self.0.cos(p, RM, cc))).checked("cos")
    }
    fn exp(&self) -> Result<Self> {
        let p = self.bits(self);
        Float::with_consts(|cc| Float(self.0.exp(p, RM, cc))).checked("exp")
    }
    fn ln(&self) -> Result<Self> {
        if !self.0.is_positive() || self.0.is_zero() {
            return Err(Error::Domain(format!("log of non-positive {self}")));
        }
        let p = self.bits(self);
        Float::with_consts(|cc| Float(self.0.ln(p, RM, cc))).checked("log")
    }
    fn pi() -> Result<Self> {
        let p = precision_bits();
        Ok(Float::with_consts(|cc| Float(cc.pi(p, RM))))
    }
}
