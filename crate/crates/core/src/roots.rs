//! Real root isolation by Sturm sequences.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::UniPoly;

/// Default isolating-interval width, `2^-20`.
pub fn default_width() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << 20)
}

/// A real algebraic number: exact when rational, otherwise an open isolating
/// interval of a squarefree polynomial with exactly one root inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealRoot {
    Exact(BigRational),
    Isolated { poly: UniPoly, lo: BigRational, hi: BigRational },
}

/// Endpoint of an open interval of the real line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    NegInf,
    PosInf,
    At(RealRoot),
}

impl Endpoint {
    pub fn rational(r: BigRational) -> Self {
        Endpoint::At(RealRoot::Exact(r))
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => f.write_str("-inf"),
            Endpoint::PosInf => f.write_str("inf"),
            Endpoint::At(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Display for RealRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealRoot::Exact(r) => write!(f, "{r}"),
            RealRoot::Isolated { poly, lo, hi } => write!(f, "root of {poly} in ({lo}, {hi})"),
        }
    }
}

impl RealRoot {
    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            RealRoot::Exact(r) => Some(r),
            RealRoot::Isolated { .. } => None,
        }
    }

    /// Closed enclosure `[lo, hi]`.
    pub fn bounds(&self) -> (BigRational, BigRational) {
        match self {
            RealRoot::Exact(r) => (r.clone(), r.clone()),
            RealRoot::Isolated { lo, hi, .. } => (lo.clone(), hi.clone()),
        }
    }

    /// Halves the isolating interval.
    pub fn refine(&mut self) {
        if let RealRoot::Isolated { poly, lo, hi } = self {
            let mid = (&*lo + &*hi) / BigRational::from_integer(2.into());
            let vm = poly.eval(&mid);
            if vm.is_zero() {
                *self = RealRoot::Exact(mid);
                return;
            }
            let vl = poly.eval(lo);
            if vl.signum() == vm.signum() {
                *lo = mid;
            } else {
                *hi = mid;
            }
        }
    }

    /// Refines until the enclosure is no wider than `width`; returns its midpoint.
    pub fn approx(&self, width: &BigRational) -> BigRational {
        let mut r = self.clone();
        loop {
            match &r {
                RealRoot::Exact(v) => return v.clone(),
                RealRoot::Isolated { lo, hi, .. } => {
                    if &(hi - lo) <= width {
                        return (lo + hi) / BigRational::from_integer(2.into());
                    }
                }
            }
            r.refine();
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.approx(&BigRational::new(BigInt::one(), BigInt::one() << 60))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// Order relative to a rational.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        let mut x = self.clone();
        loop {
            match &x {
                RealRoot::Exact(v) => return v.cmp(r),
                RealRoot::Isolated { poly, lo, hi } => {
                    if r <= lo {
                        return Ordering::Greater;
                    }
                    if r >= hi {
                        return Ordering::Less;
                    }
                    if poly.eval(r).is_zero() {
                        return Ordering::Equal;
                    }
                }
            }
            x.refine();
        }
    }

    /// Total order between algebraic numbers.
    pub fn cmp_root(&self, other: &RealRoot) -> Ordering {
        match (self, other) {
            (_, RealRoot::Exact(r)) => self.cmp_rational(r),
            (RealRoot::Exact(r), _) => other.cmp_rational(r).reverse(),
            _ => {
                let (mut a, mut b) = (self.clone(), other.clone());
                for _ in 0..2000 {
                    let (al, ah) = a.bounds();
                    let (bl, bh) = b.bounds();
                    if ah <= bl {
                        return Ordering::Less;
                    }
                    if bh <= al {
                        return Ordering::Greater;
                    }
                    if a.same_number(&b) {
                        return Ordering::Equal;
                    }
                    a.refine();
                    b.refine();
                }
                Ordering::Equal
            }
        }
    }

    fn same_number(&self, other: &RealRoot) -> bool {
        let (RealRoot::Isolated { poly: p, lo: l1, hi: h1 }, RealRoot::Isolated { poly: q, lo: l2, hi: h2 }) =
            (self, other)
        else {
            return false;
        };
        let lo = l1.max(l2).clone();
        let hi = h1.min(h2).clone();
        if lo >= hi {
            return false;
        }
        let g = p.gcd(q);
        g.degree().unwrap_or(0) > 0 && count_roots_open(&g, &lo, &hi) == 1 && {
            // both isolate a root of g inside the overlap
            count_roots_open(&g, l1, h1) >= 1 && count_roots_open(&g, l2, h2) >= 1
        }
    }

    /// Sign of `q` at this number, exact.
    pub fn sign_of(&self, q: &UniPoly) -> i32 {
        match self {
            RealRoot::Exact(r) => signum(&q.eval(r)),
            RealRoot::Isolated { poly, lo, hi } => {
                let g = poly.gcd(q);
                if g.degree().unwrap_or(0) > 0 && count_roots_open(&g, lo, hi) > 0 {
                    return 0;
                }
                let mut x = self.clone();
                loop {
                    let (l, h) = x.bounds();
                    let (a, b) = q.eval_interval(&l, &h);
                    if a.is_positive() {
                        return 1;
                    }
                    if b.is_negative() {
                        return -1;
                    }
                    if let RealRoot::Exact(r) = &x {
                        return signum(&q.eval(r));
                    }
                    x.refine();
                }
            }
        }
    }

    /// Enclosure of `q` at this number no wider than `width`.
    pub fn eval_enclosure(&self, q: &UniPoly, width: &BigRational) -> (BigRational, BigRational) {
        let mut x = self.clone();
        loop {
            let (l, h) = x.bounds();
            let (a, b) = q.eval_interval(&l, &h);
            if &(&b - &a) <= width || x.exact().is_some() {
                return (a, b);
            }
            x.refine();
        }
    }
}

fn signum(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Sturm sequence of a squarefree polynomial.
pub fn sturm_sequence(p: &UniPoly) -> Vec<UniPoly> {
    let mut seq = vec![p.clone(), p.derivative()];
    while !seq.last().unwrap().is_zero() {
        let n = seq.len();
        let r = seq[n - 2].div_rem(&seq[n - 1]).1;
        seq.push(r.scale(&-BigRational::one()));
    }
    seq.pop();
    seq
}

fn variations(seq: &[UniPoly], x: &BigRational) -> usize {
    let mut last = 0;
    let mut v = 0;
    for p in seq {
        let s = signum(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

/// Number of distinct roots of `p` in the open interval `(lo, hi)`.
pub fn count_roots_open(p: &UniPoly, lo: &BigRational, hi: &BigRational) -> usize {
    if lo >= hi || p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let s = p.squarefree();
    let seq = sturm_sequence(&s);
    count_with(&seq, lo, hi)
}

fn count_with(seq: &[UniPoly], lo: &BigRational, hi: &BigRational) -> usize {
    let a = variations(seq, lo);
    let b = variations(seq, hi);
    let at_hi = usize::from(seq[0].eval(hi).is_zero());
    (a - b).saturating_sub(at_hi)
}

/// Strict bound: every root has absolute value below it.
pub fn cauchy_bound(p: &UniPoly) -> BigRational {
    let lead = p.leading().abs();
    let n = p.degree().unwrap_or(0);
    let m = p.coeffs()[..n].iter().map(|c| c.abs() / &lead).max().unwrap_or_else(BigRational::zero);
    m + BigRational::one()
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    let limit = BigInt::from(1_000_000_000_000u64);
    if n > limit {
        return None;
    }
    let v = n.to_u64()?;
    let mut ds = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            ds.push(BigInt::from(d));
            if d * d != v {
                ds.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    Some(ds)
}

/// Rational roots of `p`, when the coefficients are small enough to search.
fn rational_roots(p: &UniPoly) -> Vec<BigRational> {
    let Some(mut ints) = p.integer_primitive() else {
        return Vec::new();
    };
    let mut roots = Vec::new();
    if ints[0].is_zero() {
        roots.push(BigRational::zero());
        while ints.first().is_some_and(|c| c.is_zero()) {
            ints.remove(0);
        }
    }
    if ints.len() < 2 {
        return roots;
    }
    let (Some(ps), Some(qs)) = (divisors(&ints[0]), divisors(ints.last().unwrap())) else {
        return roots;
    };
    let q = UniPoly::new(ints.iter().cloned().map(BigRational::from_integer).collect());
    for a in &ps {
        for b in &qs {
            if !a.gcd(b).is_one() {
                continue;
            }
            for s in [BigInt::one(), -BigInt::one()] {
                let r = BigRational::new(a * &s, b.clone());
                if q.eval(&r).is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

/// Real roots of `p` in the open interval `(lo, hi)` (`None` for an infinite
/// end), ascending. Rational roots are exact; others come with an isolating
/// interval no wider than `width`.
///
/// # Panics
/// When `p` is the zero polynomial.
pub fn isolate_real_roots(
    p: &UniPoly,
    lo: Option<&BigRational>,
    hi: Option<&BigRational>,
    width: &BigRational,
) -> Vec<RealRoot> {
    assert!(!p.is_zero(), "root isolation of the zero polynomial");
    let s = p.squarefree();
    if s.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let b = cauchy_bound(&s);
    let lo = lo.cloned().unwrap_or_else(|| -b.clone());
    let hi = hi.cloned().unwrap_or(b);
    if lo >= hi {
        return Vec::new();
    }
    let rationals = rational_roots(&s);
    let seq = sturm_sequence(&s);
    let two = BigRational::from_integer(2.into());
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let n = count_with(&seq, &a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            if let Some(r) = rationals.iter().find(|r| **r > a && **r < b) {
                out.push(RealRoot::Exact(r.clone()));
                continue;
            }
            if &b - &a <= *width {
                out.push(RealRoot::Isolated { poly: s.clone(), lo: a, hi: b });
                continue;
            }
        }
        let m = (&a + &b) / &two;
        if s.eval(&m).is_zero() {
            out.push(RealRoot::Exact(m.clone()));
        }
        stack.push((a, m.clone()));
        stack.push((m, b));
    }
    out.sort_by(|x, y| x.cmp_root(y));
    out
}
