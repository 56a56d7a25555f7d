//! Images of extended functions on slices `a + D_∞`, the leading-term solver,
//! intermediate values and extrema.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermat::{Exponent, FermatReal};
use crate::oracle::{DerivativeOracle, PartialOracle};
use crate::poly::{MultiPoly, UniPoly};
use crate::roots::{default_width, isolate_real_roots, Endpoint, RealRoot};
use crate::scalar::{factorial, float_digits, Backend, Scalar};
use crate::smooth::{fermat_extend, nonzero_monomials, QSFunction};

/// Default cap on solver steps.
pub const DEFAULT_STEP_CAP: usize = 10_000;

/// Behaviour of `f` near a real point `a`: the least order `m` with
/// `f^(m)(a) ≠ 0` and its sign, or flatness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SliceClass {
    Flat,
    Odd { m: usize, sign: i8 },
    Even { m: usize, sign: i8 },
}

impl SliceClass {
    fn from_order(m: usize, sign: i32) -> Self {
        let sign = if sign > 0 { 1 } else { -1 };
        if m % 2 == 1 {
            SliceClass::Odd { m, sign }
        } else {
            SliceClass::Even { m, sign }
        }
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            SliceClass::Flat => None,
            SliceClass::Odd { m, .. } | SliceClass::Even { m, .. } => Some(*m),
        }
    }

    pub fn sign(&self) -> i8 {
        match self {
            SliceClass::Flat => 0,
            SliceClass::Odd { sign, .. } | SliceClass::Even { sign, .. } => *sign,
        }
    }
}

impl fmt::Display for SliceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |x: &i8| if *x > 0 { '+' } else { '-' };
        match self {
            SliceClass::Flat => f.write_str("flat"),
            SliceClass::Odd { m, sign } => write!(f, "odd(m={m}, {})", s(sign)),
            SliceClass::Even { m, sign } => write!(f, "even(m={m}, {})", s(sign)),
        }
    }
}

fn negligible<S: Scalar>(x: &S) -> bool {
    x.is_negligible()
}

fn fermat_negligible<S: Scalar>(x: &FermatReal<S>) -> bool {
    x.prune_negligible().is_zero()
}

/// Least nonvanishing derivative order at `a`.
pub fn classify_slice<S: Scalar>(f: &dyn DerivativeOracle<S>, a: &S) -> Result<SliceClass> {
    if f.flat_at(a) == Some(true) {
        return Ok(SliceClass::Flat);
    }
    let cap = f.degree().unwrap_or_else(|| f.search_cap());
    for n in 1..=cap {
        let d = f.derivative(n, a)?;
        if !negligible(&d) {
            return Ok(SliceClass::from_order(n, d.signum()));
        }
    }
    if f.degree().is_some() {
        return Ok(SliceClass::Flat);
    }
    Err(Error::UnresolvedClassification { cap, at: a.to_string() })
}

/// Whether `w ∈ •f(a + D_∞)`.
pub fn slice_image_contains<S: Scalar>(f: &dyn DerivativeOracle<S>, a: &S, w: &FermatReal<S>) -> Result<bool> {
    let class = classify_slice(f, a)?;
    let fa = f.derivative(0, a)?;
    let diff = (w - &FermatReal::real(fa)).prune_negligible();
    Ok(match class {
        SliceClass::Flat => diff.is_zero(),
        SliceClass::Odd { .. } => diff.standard_part().is_zero(),
        SliceClass::Even { sign, .. } => {
            diff.standard_part().is_zero()
                && match diff.leading_term() {
                    None => true,
                    Some((_, c)) => c.signum() == i32::from(sign),
                }
        }
    })
}

/// Solver options.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// In the even case, return the fundamental solution with negative leading
    /// coefficient.
    pub negative_root: bool,
    pub step_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { negative_root: false, step_cap: DEFAULT_STEP_CAP }
    }
}

/// One solver step: the term `coefficient * t^exponent` added to the solution.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveStep<S: Scalar> {
    pub exponent: BigRational,
    pub coefficient: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveTrace<S: Scalar> {
    pub solution: FermatReal<S>,
    pub class: SliceClass,
    pub steps: Vec<SolveStep<S>>,
}

/// Fundamental solution of `•f(x) = w` with `°x = a`.
pub fn solve_slice<S: Scalar>(f: &dyn DerivativeOracle<S>, a: &S, w: &FermatReal<S>) -> Result<FermatReal<S>> {
    solve_slice_traced(f, a, w, &SolveOptions::default()).map(|t| t.solution)
}

/// [`solve_slice`] with options, reporting every step.
pub fn solve_slice_traced<S: Scalar>(
    f: &dyn DerivativeOracle<S>,
    a: &S,
    w: &FermatReal<S>,
    opts: &SolveOptions,
) -> Result<SolveTrace<S>> {
    let class = classify_slice(f, a)?;
    if !slice_image_contains(f, a, w)? {
        return Err(Error::NotInImage(format!("{w} for {} at {a}", f.name())));
    }
    let base = FermatReal::real(a.clone());
    let fa = FermatReal::real(f.derivative(0, a)?);
    let residual = (w - &fa).prune_negligible();
    let Some((e1, w1)) = residual.leading_term().cloned() else {
        return Ok(SolveTrace { solution: base, class, steps: Vec::new() });
    };
    let m = class
        .order()
        .ok_or_else(|| Error::FlatSlice(format!("{} at {a}", f.name())))?;
    let fm = f.derivative(m, a)?;
    let mf = factorial::<S>(m);

    // Step 1: f^(m)(a) c1^m = m! w1, b1 = a1/m
    let b1 = e1.value() / BigRational::from_integer(BigInt::from(m));
    let mut c1 = (mf * w1 / fm.clone()).root(m as u32)?;
    if opts.negative_root && m % 2 == 0 {
        c1 = -c1;
    }
    let mut steps = vec![SolveStep { exponent: b1.clone(), coefficient: c1.clone() }];
    let mut c = &base + &FermatReal::monomial(c1.clone(), Exponent::new(b1.clone())?);
    let denom = fm * c1.powi(m as u32 - 1);
    let m1f = factorial::<S>(m - 1);
    let shift = BigRational::from_integer(BigInt::from(m - 1)) * &b1;
    let mut last = b1;
    for _ in 1..opts.step_cap {
        let g = (w - &fermat_extend(f, &c)?).prune_negligible();
        let Some((e, gr)) = g.leading_term().cloned() else {
            if !g.is_zero() {
                return Err(Error::SolverInvariant(format!("residual {g} has a standard part")));
            }
            return Ok(SolveTrace { solution: c, class, steps });
        };
        if !g.standard_part().is_zero() {
            return Err(Error::SolverInvariant(format!("residual {g} has a standard part")));
        }
        let br = e.value() - &shift;
        if br <= last {
            return Err(Error::SolverInvariant(format!("exponent {br} does not exceed {last}")));
        }
        let cr = m1f.clone() * gr / denom.clone();
        steps.push(SolveStep { exponent: br.clone(), coefficient: cr.clone() });
        c = c + FermatReal::monomial(cr, Exponent::new(br.clone())?);
        last = br;
    }
    Err(Error::StepCapExceeded(opts.step_cap))
}

/// Keeps the terms of `y` with `(m-1)a₁ + a_i <= 1`.
pub fn refine_to_fundamental<S: Scalar>(f: &dyn DerivativeOracle<S>, y: &FermatReal<S>) -> Result<FermatReal<S>> {
    let class = classify_slice(f, y.standard_part())?;
    let m = class
        .order()
        .ok_or_else(|| Error::FlatSlice(format!("{} at {}", f.name(), y.standard_part())))?;
    let Some((a1, _)) = y.leading_term() else {
        return Ok(y.clone());
    };
    let lift = BigRational::from_integer(BigInt::from(m - 1)) * a1.value();
    let one = BigRational::one();
    let kept: Vec<(Exponent, S)> =
        y.terms().iter().filter(|(e, _)| &lift + e.value() <= one).cloned().collect();
    Ok(FermatReal::from_parts(y.standard_part().clone(), kept))
}

/// All solutions with a given real part: `fundamental + z`, every exponent of
/// `z` strictly above `threshold`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionFamily<S: Scalar> {
    pub fundamental: FermatReal<S>,
    pub threshold: BigRational,
}

pub fn solution_family<S: Scalar>(
    f: &dyn DerivativeOracle<S>,
    a: &S,
    w: &FermatReal<S>,
    opts: &SolveOptions,
) -> Result<SolutionFamily<S>> {
    let trace = solve_slice_traced(f, a, w, opts)?;
    let threshold = match trace.class.order() {
        None => BigRational::zero(),
        Some(m) => {
            let mq = BigRational::from_integer(BigInt::from(m));
            match trace.solution.leading_term() {
                None => mq.recip(),
                Some((a1, _)) => {
                    if &mq * a1.value() <= BigRational::one() {
                        BigRational::one() - (&mq - BigRational::one()) * a1.value()
                    } else {
                        mq.recip()
                    }
                }
            }
        }
    };
    Ok(SolutionFamily { fundamental: trace.solution, threshold })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    StrictlyIncreasing,
    Increasing,
    StrictlyDecreasing,
    Decreasing,
    Unknown,
}

/// Checks the sufficient conditions for global monotonicity of `•f` at the
/// grid points: a derivative of constant sign, or odd classes of one sign.
pub fn classify_monotone_global<S: Scalar>(f: &dyn DerivativeOracle<S>, grid: &[S]) -> Result<Monotonicity> {
    if grid.is_empty() {
        return Ok(Monotonicity::Unknown);
    }
    let mut signs = Vec::with_capacity(grid.len());
    for x in grid {
        let d = f.derivative(1, x)?;
        signs.push(if negligible(&d) { 0 } else { d.signum() });
    }
    if signs.iter().all(|&s| s > 0) {
        return Ok(Monotonicity::StrictlyIncreasing);
    }
    if signs.iter().all(|&s| s < 0) {
        return Ok(Monotonicity::StrictlyDecreasing);
    }
    let mut dir = 0;
    for x in grid {
        match classify_slice(f, x)? {
            SliceClass::Odd { sign, .. } => {
                if dir == 0 {
                    dir = sign;
                } else if dir != sign {
                    return Ok(Monotonicity::Unknown);
                }
            }
            _ => return Ok(Monotonicity::Unknown),
        }
    }
    Ok(if dir > 0 { Monotonicity::Increasing } else { Monotonicity::Decreasing })
}

// ---------------------------------------------------------------------------
// Several variables: h(v, x) with parameters v and main variable x (last)

const PARTIAL_SEARCH_CAP: u32 = 64;

fn base_point<S: Scalar>(v: &[FermatReal<S>], x0: &S) -> Vec<S> {
    let mut p: Vec<S> = v.iter().map(|x| x.standard_part().clone()).collect();
    p.push(x0.clone());
    p
}

/// Parameter multi-indices `a_v` with `(δv)^(a_v) ≠ 0`, bounded by the degree
/// of `h` in each parameter when known.
fn parameter_indices<S: Scalar>(h: &dyn PartialOracle<S>, v: &[FermatReal<S>]) -> Vec<Vec<u32>> {
    let dvs: Vec<FermatReal<S>> = v.iter().map(|x| x.infinitesimal_part()).collect();
    let caps: Vec<usize> = v
        .iter()
        .enumerate()
        .map(|(l, x)| {
            let k = x.nilpotency_index() - 1;
            h.degree_in(l).map_or(k, |d| k.min(d as usize))
        })
        .collect();
    nonzero_monomials(&dvs, &caps).into_iter().map(|(i, _)| i).collect()
}

/// Sufficient condition for the intermediate value property of
/// `x ↦ •h(v, x)` near `x0`: with `m` the least order such that
/// `∂_x^m h(°v, x0) ≠ 0`, every mixed partial `D^(a_v, a_x) h(°v, x0)` with
/// `0 < a_x < m` vanishes.
pub fn ivp_criterion_at<S: Scalar>(h: &dyn PartialOracle<S>, v: &[FermatReal<S>], x0: &S) -> Result<bool> {
    let k = v.len();
    if k + 1 != h.arity() {
        return Err(Error::InvalidArgument("parameter count does not match arity".into()));
    }
    let point = base_point(v, x0);
    let cap = h.degree_in(k).unwrap_or(PARTIAL_SEARCH_CAP);
    let mut m = None;
    for n in 1..=cap {
        let mut alpha = vec![0; k];
        alpha.push(n);
        if !negligible(&h.partial(&alpha, &point)?) {
            m = Some(n);
            break;
        }
    }
    let m = m.ok_or_else(|| Error::NoFiniteM(format!("{} at {x0}", h.name())))?;
    for av in parameter_indices(h, v) {
        for ax in 1..m {
            let mut alpha = av.clone();
            alpha.push(ax);
            if !negligible(&h.partial(&alpha, &point)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Split points and the open intervals between them.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitResult {
    pub split_points: Vec<RealRoot>,
    pub intervals: Vec<(Endpoint, Endpoint)>,
}

impl fmt::Display for SplitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.intervals.iter().map(|(a, b)| format!("({a}, {b})")).collect();
        f.write_str(&parts.join(", "))
    }
}

fn criterion_at_root(p: &MultiPoly, prefix: &[BigRational], av_set: &[Vec<u32>], r: &RealRoot) -> Result<bool> {
    let k = prefix.len();
    let slice = |alpha: &[u32]| p.partial(alpha).restrict_last(prefix);
    let mut m = None;
    for n in 1..=p.degree_in(k) {
        let mut alpha = vec![0; k];
        alpha.push(n);
        if r.sign_of(&slice(&alpha)) != 0 {
            m = Some(n);
            break;
        }
    }
    let m = m.ok_or_else(|| Error::NoFiniteM(format!("at {r}")))?;
    for av in av_set {
        for ax in 1..m {
            let mut alpha = av.clone();
            alpha.push(ax);
            if r.sign_of(&slice(&alpha)) != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Splits an open interval (`None` for an infinite end) at the points where
/// the intermediate value criterion fails for `x ↦ •h(v, x)`.
pub fn split_domain<S: Scalar>(
    h: &dyn PartialOracle<S>,
    v: &[FermatReal<S>],
    lo: Option<&BigRational>,
    hi: Option<&BigRational>,
) -> Result<SplitResult> {
    let p = h.as_polynomial().ok_or_else(|| Error::NotPolynomial(h.name()))?;
    let k = v.len();
    if k + 1 != p.arity() {
        return Err(Error::InvalidArgument("parameter count does not match arity".into()));
    }
    let prefix: Vec<BigRational> = v.iter().map(|x| x.standard_part().to_rational()).collect();
    let mut alpha = vec![0; k];
    alpha.push(1);
    let dy = p.partial(&alpha).restrict_last(&prefix);
    let av_set = parameter_indices(h, v);
    let mut split_points = Vec::new();
    if dy.is_zero() {
        return Err(Error::NoFiniteM(format!("{} has no first-order dependence on the main variable", h.name())));
    }
    for r in isolate_real_roots(&dy, lo, hi, &default_width()) {
        if !criterion_at_root(p, &prefix, &av_set, &r)? {
            split_points.push(r);
        }
    }
    let mut ends = vec![lo.map_or(Endpoint::NegInf, |x| Endpoint::rational(x.clone()))];
    ends.extend(split_points.iter().cloned().map(Endpoint::At));
    ends.push(hi.map_or(Endpoint::PosInf, |x| Endpoint::rational(x.clone())));
    let intervals = ends.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    Ok(SplitResult { split_points, intervals })
}

// ---------------------------------------------------------------------------

fn root_to_scalar<S: Scalar>(r: &RealRoot) -> Result<S> {
    match r {
        RealRoot::Exact(q) => Ok(S::from_rational(q)),
        RealRoot::Isolated { .. } => match S::BACKEND {
            Backend::Exact => Err(Error::RootNotExact(r.to_string())),
            Backend::Float => {
                let digits = float_digits() as u32 + 10;
                let w = BigRational::new(BigInt::one(), BigInt::from(10).pow(digits));
                Ok(S::from_rational(&r.approx(&w)))
            }
        },
    }
}

/// Real solutions of `p(x) = 0` with `lo <= x <= hi`. Irrational roots are
/// only isolated; callers refine on demand.
fn roots_closed(p: &UniPoly, lo: &BigRational, hi: &BigRational) -> Vec<RealRoot> {
    if p.is_zero() {
        return Vec::new();
    }
    let mut out = Vec::new();
    if p.eval(lo).is_zero() {
        out.push(RealRoot::Exact(lo.clone()));
    }
    if lo < hi {
        out.extend(isolate_real_roots(p, Some(lo), Some(hi), &(hi - lo)));
        if p.eval(hi).is_zero() {
            out.push(RealRoot::Exact(hi.clone()));
        }
    }
    out
}

/// `c` with `a < c < b` and `•f(c) = y`, for `y` between `•f(a)` and `•f(b)`.
///
/// The real part of `c` is searched among the real solutions of
/// `f(x) = °y` in `[°a, °b]`, so `f` must be a polynomial; see
/// [`ivp_solve_with_candidates`] otherwise.
pub fn ivp_solve<S: Scalar>(
    f: &dyn DerivativeOracle<S>,
    a: &FermatReal<S>,
    b: &FermatReal<S>,
    y: &FermatReal<S>,
) -> Result<FermatReal<S>> {
    let p = f.as_polynomial().ok_or_else(|| Error::NotPolynomial(f.name()))?;
    let lo = a.standard_part().to_rational();
    let hi = b.standard_part().to_rational();
    let target = p.sub(&UniPoly::constant(y.standard_part().to_rational()));
    let roots = if target.is_zero() {
        vec![RealRoot::Exact(lo.clone()), RealRoot::Exact(hi.clone())]
    } else {
        roots_closed(&target, &lo, &hi)
    };
    let mut candidates = Vec::new();
    let mut irrational = None;
    for r in &roots {
        match root_to_scalar::<S>(r) {
            Ok(s) => candidates.push(s),
            Err(e) => irrational = Some(e),
        }
    }
    match ivp_solve_with_candidates(f, a, b, y, &candidates) {
        Err(Error::NoRealPreimage(_)) if irrational.is_some() => Err(irrational.unwrap()),
        other => other,
    }
}

/// [`ivp_solve`] with caller-supplied real parts to try.
pub fn ivp_solve_with_candidates<S: Scalar>(
    f: &dyn DerivativeOracle<S>,
    a: &FermatReal<S>,
    b: &FermatReal<S>,
    y: &FermatReal<S>,
    candidates: &[S],
) -> Result<FermatReal<S>> {
    if a.compare(b) != Ordering::Less {
        return Err(Error::InvalidArgument(format!("{a} is not below {b}")));
    }
    let fa = fermat_extend(f, a)?;
    let fb = fermat_extend(f, b)?;
    if fermat_negligible(&(y - &fa)) {
        return Ok(a.clone());
    }
    if fermat_negligible(&(y - &fb)) {
        return Ok(b.clone());
    }
    let between = |lo: &FermatReal<S>, hi: &FermatReal<S>| lo.compare(y) == Ordering::Less && y.compare(hi) == Ordering::Less;
    if !(between(&fa, &fb) || between(&fb, &fa)) {
        return Err(Error::NoRealPreimage(format!("{y} is not between {fa} and {fb}")));
    }
    let mut classified = Vec::new();
    for r in candidates {
        let class = classify_slice(f, r)?;
        classified.push((r.clone(), class));
    }
    // odd classes first
    classified.sort_by_key(|(_, c)| !matches!(c, SliceClass::Odd { .. }));
    let mut last_err = None;
    for (r, class) in classified {
        if !slice_image_contains(f, &r, y)? {
            continue;
        }
        let signs: &[bool] = if matches!(class, SliceClass::Even { .. }) { &[false, true] } else { &[false] };
        for &negative_root in signs {
            let opts = SolveOptions { negative_root, ..SolveOptions::default() };
            match solve_slice_traced(f, &r, y, &opts) {
                Ok(t) => {
                    let c = t.solution;
                    if a.compare(&c) == Ordering::Less && c.compare(b) == Ordering::Less {
                        return Ok(c);
                    }
                }
                Err(e) => last_err = Some(e),
            }
        }
    }
    Err(last_err.unwrap_or_else(|| Error::NoRealPreimage(format!("no admissible real part for {y}"))))
}

/// Minimum and maximum of `•f` on `[a, b]` with witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct Extrema<S: Scalar> {
    pub min: FermatReal<S>,
    pub argmin: FermatReal<S>,
    pub max: FermatReal<S>,
    pub argmax: FermatReal<S>,
}

#[derive(Clone, Debug)]
enum Candidate<S: Scalar> {
    Value { value: FermatReal<S>, arg: FermatReal<S> },
    Critical { root: RealRoot },
}

fn cmp_candidates<S: Scalar>(p: &UniPoly, x: &Candidate<S>, y: &Candidate<S>) -> Ordering {
    match (x, y) {
        (Candidate::Value { value: u, .. }, Candidate::Value { value: v, .. }) => u.compare(v),
        (Candidate::Critical { root }, Candidate::Value { value, .. }) => cmp_critical_value(p, root, value),
        (Candidate::Value { value, .. }, Candidate::Critical { root }) => cmp_critical_value(p, root, value).reverse(),
        (Candidate::Critical { root: r1 }, Candidate::Critical { root: r2 }) => {
            // compare p(r1) with p(r2) through enclosures
            let mut w = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20));
            for _ in 0..8 {
                let (a1, b1) = r1.eval_enclosure(p, &w);
                let (a2, b2) = r2.eval_enclosure(p, &w);
                if b1 < a2 {
                    return Ordering::Less;
                }
                if b2 < a1 {
                    return Ordering::Greater;
                }
                w = &w * &w;
            }
            Ordering::Equal
        }
    }
}

/// `p(r)` against a Fermat real.
fn cmp_critical_value<S: Scalar>(p: &UniPoly, r: &RealRoot, x: &FermatReal<S>) -> Ordering {
    let shifted = p.sub(&UniPoly::constant(x.standard_part().to_rational()));
    match r.sign_of(&shifted) {
        1 => Ordering::Greater,
        -1 => Ordering::Less,
        _ => FermatReal::<S>::zero().compare(&x.infinitesimal_part()),
    }
}

fn materialize<S: Scalar>(p: &UniPoly, c: &Candidate<S>) -> Result<(FermatReal<S>, FermatReal<S>)> {
    match c {
        Candidate::Value { value, arg } => Ok((value.clone(), arg.clone())),
        Candidate::Critical { root } => {
            let x = root_to_scalar::<S>(root)?;
            let v = match root {
                RealRoot::Exact(q) => S::from_rational(&p.eval(q)),
                RealRoot::Isolated { .. } => p.eval_scalar(&x),
            };
            Ok((FermatReal::real(v), FermatReal::real(x)))
        }
    }
}

/// Extrema of `•f` on the Fermat interval `[a, b]` for a polynomial `f`.
///
/// Candidates are the two endpoints and the interior real critical points
/// that are local minima (for the minimum) or local maxima (for the maximum).
pub fn extrema_on_interval<S: Scalar>(
    f: &dyn DerivativeOracle<S>,
    a: &FermatReal<S>,
    b: &FermatReal<S>,
) -> Result<Extrema<S>> {
    let p = f.as_polynomial().ok_or_else(|| Error::NotPolynomial(f.name()))?;
    if a.compare(b) != Ordering::Less {
        return Err(Error::InvalidArgument(format!("{a} is not below {b}")));
    }
    let ends = [
        Candidate::Value { value: fermat_extend(f, a)?, arg: a.clone() },
        Candidate::Value { value: fermat_extend(f, b)?, arg: b.clone() },
    ];
    let mut mins: Vec<Candidate<S>> = ends.to_vec();
    let mut maxs: Vec<Candidate<S>> = ends.to_vec();
    let dp = p.derivative();
    if !dp.is_zero() {
        let lo = a.standard_part().to_rational();
        let hi = b.standard_part().to_rational();
        for r in roots_closed(&dp, &lo, &hi) {
            // the real point must lie in [a, b] in the Fermat order
            if let Some(q) = r.exact() {
                let x = FermatReal::real(S::from_rational(q));
                if x.compare(a) == Ordering::Less || x.compare(b) == Ordering::Greater {
                    continue;
                }
            }
            let mut k = 2;
            let sign = loop {
                let d = p.nth_derivative(k);
                if d.is_zero() {
                    break 0;
                }
                let s = r.sign_of(&d);
                if s != 0 {
                    break if k % 2 == 0 { s } else { 0 };
                }
                k += 1;
            };
            match sign {
                1 => mins.push(Candidate::Critical { root: r }),
                -1 => maxs.push(Candidate::Critical { root: r }),
                _ => {}
            }
        }
    }
    let pick = |cs: &[Candidate<S>], want: Ordering| -> Candidate<S> {
        let mut best = cs[0].clone();
        for c in &cs[1..] {
            if cmp_candidates(&p, c, &best) == want {
                best = c.clone();
            }
        }
        best
    };
    let (min, argmin) = materialize(&p, &pick(&mins, Ordering::Less))?;
    let (max, argmax) = materialize(&p, &pick(&maxs, Ordering::Greater))?;
    Ok(Extrema { min, argmin, max, argmax })
}

// ---------------------------------------------------------------------------

/// Cap on search nodes for [`solve_parametric_slice`].
pub const PARAMETRIC_NODE_CAP: usize = 10_000;

/// `β_k` with `g(a + δ) = Σ β_k δ^k` for a quasi-standard `g` whose
/// coefficient functions are polynomials.
pub fn parametric_taylor<S: Scalar>(g: &QSFunction<S>, a: &S) -> Result<Vec<FermatReal<S>>> {
    let mut degree = 0;
    for (_, alpha) in g.terms() {
        degree = degree.max(alpha.degree().ok_or_else(|| Error::NotPolynomial(alpha.name()))?);
    }
    let mut beta = Vec::with_capacity(degree + 1);
    for k in 0..=degree {
        let kf = factorial::<S>(k);
        let mut raw = Vec::new();
        for (e, alpha) in g.terms() {
            raw.push((e.clone(), alpha.derivative(k, a)? / kf.clone()));
        }
        beta.push(FermatReal::normalize(raw));
    }
    Ok(beta)
}

/// Lowest exponent present, 0 for a nonzero standard part.
fn order_of<S: Scalar>(x: &FermatReal<S>) -> Option<(BigRational, S)> {
    if !x.standard_part().is_zero() {
        return Some((BigRational::zero(), x.standard_part().clone()));
    }
    x.leading_term().map(|(e, c)| (e.value().clone(), c.clone()))
}

/// Nonzero real roots of `Σ c_k x^k`, plus the error for any root the
/// backend cannot represent.
fn nonzero_real_roots<S: Scalar>(coeffs: &[S]) -> (Vec<S>, Option<Error>) {
    let p = UniPoly::new(coeffs.iter().map(|c| c.to_rational()).collect());
    let mut out = Vec::new();
    let mut missing = None;
    if p.is_zero() || p.degree() == Some(0) {
        return (out, missing);
    }
    for r in isolate_real_roots(&p, None, None, &default_width()) {
        if r.exact().is_some_and(|q| q.is_zero()) {
            continue;
        }
        match root_to_scalar::<S>(&r) {
            Ok(x) if !x.is_negligible() => out.push(x),
            Ok(_) => {}
            Err(e) => missing = Some(e),
        }
    }
    (out, missing)
}

struct Search {
    nodes: usize,
    incomplete: Option<Error>,
}

/// `δ` with `Σ_{k>=1} β_k δ^k = r`, every exponent of `δ` above `floor`.
fn newton_search<S: Scalar>(
    beta: &[FermatReal<S>],
    r: &FermatReal<S>,
    floor: &BigRational,
    st: &mut Search,
) -> Result<Option<FermatReal<S>>> {
    let r = r.prune_negligible();
    if r.is_zero() {
        return Ok(Some(FermatReal::zero()));
    }
    st.nodes += 1;
    if st.nodes > PARAMETRIC_NODE_CAP {
        return Err(Error::StepCapExceeded(PARAMETRIC_NODE_CAP));
    }
    let Some((er, cr)) = order_of(&r) else { return Ok(Some(FermatReal::zero())) };
    if er.is_zero() {
        return Ok(None);
    }
    let orders: Vec<(usize, BigRational, S)> = beta
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(k, b)| order_of(&b.prune_negligible()).map(|(o, c)| (k, o, c)))
        .collect();
    // leading exponents b where the lowest terms meet the target or cancel
    let mut cands: Vec<BigRational> = Vec::new();
    let kq = |k: usize| BigRational::from_integer(BigInt::from(k));
    for (k, o, _) in &orders {
        cands.push((&er - o) / kq(*k));
    }
    for (i, (j, oj, _)) in orders.iter().enumerate() {
        for (k, ok, _) in &orders[i + 1..] {
            cands.push((oj - ok) / (kq(*k) - kq(*j)));
        }
    }
    let one = BigRational::one();
    cands.retain(|b| b > floor && b > &BigRational::zero() && b <= &one);
    cands.sort();
    cands.dedup();
    for b in cands {
        let level = |(k, o, _): &(usize, BigRational, S)| o + kq(*k) * &b;
        let e_min = orders.iter().map(level).min().expect("candidates come from terms");
        if e_min > one || e_min > er {
            continue;
        }
        let mut tie = vec![S::zero(); beta.len()];
        for t in &orders {
            if level(t) == e_min {
                tie[t.0] = t.2.clone();
            }
        }
        if e_min == er {
            tie[0] = -cr.clone();
        }
        let (roots, missing) = nonzero_real_roots(&tie);
        if missing.is_some() {
            st.incomplete = missing;
        }
        for c in roots {
            let d0 = FermatReal::monomial(c, Exponent::new(b.clone())?);
            let shifted = shift_polynomial(beta, &d0);
            let value: FermatReal<S> =
                (1..beta.len()).map(|k| &beta[k] * &d0.pow_nat(k as u32)).sum();
            if let Some(rest) = newton_search(&shifted, &(&r - &value), &b, st)? {
                return Ok(Some(d0 + rest));
            }
        }
    }
    Ok(None)
}

/// `γ_j = Σ_{k>=j} C(k, j) β_k d^(k-j)`, the coefficients of `P(d + x)`.
fn shift_polynomial<S: Scalar>(beta: &[FermatReal<S>], d: &FermatReal<S>) -> Vec<FermatReal<S>> {
    let n = beta.len();
    let powers: Vec<FermatReal<S>> = (0..n).map(|i| d.pow_nat(i as u32)).collect();
    (0..n)
        .map(|j| {
            let mut acc = FermatReal::zero();
            let mut binom = BigInt::one();
            for k in j..n {
                if k > j {
                    binom = binom * BigInt::from(k) / BigInt::from(k - j);
                }
                let c = S::from_rational(&BigRational::from_integer(binom.clone()));
                acc = acc + (&beta[k] * &powers[k - j]).scale(&c);
            }
            acc
        })
        .collect()
}

/// A solution of `g(x) = w` with `°x = a` for a quasi-standard `g` with
/// polynomial coefficients, or `None` when there is none.
///
/// Newton polygon search over leading terms: a solution's leading term
/// `c t^b` either matches the leading term of the residual or cancels among
/// the lowest terms of `Σ β_k δ^k`, so `b` ranges over finitely many values
/// per step and `c` over the real roots of a polynomial.
pub fn solve_parametric_slice<S: Scalar>(g: &QSFunction<S>, a: &S, w: &FermatReal<S>) -> Result<Option<FermatReal<S>>> {
    let beta = parametric_taylor(g, a)?;
    let r = w - &beta[0];
    let mut st = Search { nodes: 0, incomplete: None };
    match newton_search(&beta, &r, &BigRational::zero(), &mut st)? {
        Some(d) => Ok(Some(FermatReal::real(a.clone()) + d)),
        None => match st.incomplete {
            Some(e) => Err(e),
            None => Ok(None),
        },
    }
}

/// Whether `w ∈ g(a + D_∞)`; see [`solve_parametric_slice`].
pub fn parametric_slice_contains<S: Scalar>(g: &QSFunction<S>, a: &S, w: &FermatReal<S>) -> Result<bool> {
    Ok(solve_parametric_slice(g, a, w)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{parse_oracle, FlatExp, MultiPolyOracle, Oracle};
    use crate::scalar::{rat, Rational};
    use crate::smooth::fermat_extend;

    type F = FermatReal<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }
    fn mono(c: Rational, p: i64, d: i64) -> F {
        F::monomial(c, Exponent::ratio(p, d).unwrap())
    }
    fn real(n: i64) -> F {
        F::from(n)
    }
    fn oracle(d: &str) -> Oracle<Rational> {
        parse_oracle(d).unwrap()
    }

    #[test]
    fn classification() {
        assert_eq!(classify_slice(oracle("powint:3").as_ref(), &q(0, 1)).unwrap(), SliceClass::Odd { m: 3, sign: 1 });
        assert_eq!(classify_slice(oracle("powint:2").as_ref(), &q(0, 1)).unwrap(), SliceClass::Even { m: 2, sign: 1 });
        assert_eq!(classify_slice::<Rational>(&FlatExp::new(), &q(0, 1)).unwrap(), SliceClass::Flat);
        assert_eq!(classify_slice(oracle("poly:[5]").as_ref(), &q(1, 1)).unwrap(), SliceClass::Flat);
    }

    #[test]
    fn membership() {
        let sq = oracle("powint:2");
        assert!(!slice_image_contains(sq.as_ref(), &q(0, 1), &-F::t()).unwrap());
        let cube = oracle("powint:3");
        let w = mono(q(-5, 1), 1, 2) + F::t();
        assert!(slice_image_contains(cube.as_ref(), &q(0, 1), &w).unwrap());
        assert!(slice_image_contains::<Rational>(&FlatExp::new(), &q(0, 1), &real(0)).unwrap());
    }

    #[test]
    fn solver_examples() {
        let cube = oracle("powint:3");
        assert_eq!(solve_slice(cube.as_ref(), &q(0, 1), &F::t()).unwrap(), mono(q(1, 1), 1, 3));
        let w = mono(q(1, 1), 1, 2) + F::t();
        let c = solve_slice(cube.as_ref(), &q(0, 1), &w).unwrap();
        assert_eq!(c, mono(q(1, 1), 1, 6) + mono(q(1, 3), 2, 3));
        assert_eq!(fermat_extend(cube.as_ref(), &c).unwrap(), w);
        let g = oracle("poly:[0,1,1]");
        assert_eq!(solve_slice(g.as_ref(), &q(0, 1), &F::t()).unwrap(), F::t());
        assert!(matches!(
            solve_slice(oracle("powint:2").as_ref(), &q(0, 1), &mono(q(2, 1), 1, 1)),
            Err(Error::RootNotExact(_))
        ));
    }

    #[test]
    fn even_case_both_roots() {
        let sq = oracle("powint:2");
        let opts = SolveOptions { negative_root: true, ..SolveOptions::default() };
        let neg = solve_slice_traced(sq.as_ref(), &q(0, 1), &F::t(), &opts).unwrap().solution;
        assert_eq!(neg, mono(q(-1, 1), 1, 2));
    }

    #[test]
    fn refinement_and_family() {
        let cube = oracle("powint:3");
        let y = mono(q(1, 1), 1, 3) + mono(q(1, 1), 1, 2);
        assert_eq!(refine_to_fundamental(cube.as_ref(), &y).unwrap(), mono(q(1, 1), 1, 3));
        let id = oracle("poly:[0,1]");
        let y2 = mono(q(2, 1), 1, 3) + F::t();
        assert_eq!(refine_to_fundamental(id.as_ref(), &y2).unwrap(), y2);

        let opts = SolveOptions::default();
        let fam = solution_family(cube.as_ref(), &q(0, 1), &F::t(), &opts).unwrap();
        assert_eq!((fam.fundamental, fam.threshold), (mono(q(1, 1), 1, 3), rat(1, 3)));
        let fam = solution_family(id.as_ref(), &q(0, 1), &mono(q(1, 1), 1, 2), &opts).unwrap();
        assert_eq!(fam.threshold, rat(1, 1));
        let fam = solution_family(oracle("powint:2").as_ref(), &q(0, 1), &F::t(), &opts).unwrap();
        assert_eq!((fam.fundamental, fam.threshold), (mono(q(1, 1), 1, 2), rat(1, 2)));
        let fam = solution_family(cube.as_ref(), &q(0, 1), &real(0), &opts).unwrap();
        assert_eq!(fam.threshold, rat(1, 3));
    }

    #[test]
    fn monotone_verdicts() {
        let grid = [q(-1, 1), q(0, 1), q(1, 1)];
        assert_eq!(classify_monotone_global(oracle("powint:3").as_ref(), &grid).unwrap(), Monotonicity::Increasing);
        assert_eq!(classify_monotone_global(oracle("powint:2").as_ref(), &grid).unwrap(), Monotonicity::Unknown);
        // f' = 1 + u^2
        let f = oracle("poly:[0,1,0,1/3]");
        assert_eq!(classify_monotone_global(f.as_ref(), &grid).unwrap(), Monotonicity::StrictlyIncreasing);
        let g = oracle("poly:[0,-1,0,-1/3]");
        assert_eq!(classify_monotone_global(g.as_ref(), &grid).unwrap(), Monotonicity::StrictlyDecreasing);
    }

    fn h_example() -> MultiPolyOracle {
        MultiPolyOracle::new(MultiPoly::from_terms(2, [(vec![0, 3], rat(1, 1)), (vec![1, 2], rat(1, 1))]))
    }

    #[test]
    fn ivp_criteria() {
        let h = h_example();
        let v = [mono(q(1, 1), 1, 100)];
        assert!(ivp_criterion_at::<Rational>(&h, &v, &q(1, 1)).unwrap());
        assert!(!ivp_criterion_at::<Rational>(&h, &v, &q(0, 1)).unwrap());
        assert!(ivp_criterion_at::<Rational>(&h, &[real(0)], &q(0, 1)).unwrap());
    }

    #[test]
    fn domain_splitting() {
        let h = h_example();
        let v = [mono(q(1, 1), 1, 100)];
        let s = split_domain::<Rational>(&h, &v, None, None).unwrap();
        assert_eq!(s.split_points, vec![RealRoot::Exact(rat(0, 1))]);
        assert_eq!(s.to_string(), "(-inf, 0), (0, inf)");

        let h2 = MultiPolyOracle::new(MultiPoly::from_terms(2, [(vec![0, 1], rat(1, 1)), (vec![1, 2], rat(1, 1))]));
        let s2 = split_domain::<Rational>(&h2, &v, None, None).unwrap();
        assert!(s2.split_points.is_empty());
        assert_eq!(s2.to_string(), "(-inf, inf)");

        let h3 = MultiPolyOracle::new(MultiPoly::from_terms(2, [(vec![0, 2], rat(1, 1))]));
        let s3 = split_domain::<Rational>(&h3, &v, None, None).unwrap();
        assert!(s3.split_points.is_empty());
    }

    #[test]
    fn intermediate_values() {
        let f = oracle("poly:[0,-1,0,1]");
        let c = ivp_solve(f.as_ref(), &real(-2), &real(2), &F::t()).unwrap();
        assert_eq!(c, real(-1) + mono(q(1, 2), 1, 1));
        assert_eq!(fermat_extend(f.as_ref(), &c).unwrap(), F::t());
        let cube = oracle("powint:3");
        assert_eq!(ivp_solve(cube.as_ref(), &real(-1), &real(1), &F::t()).unwrap(), mono(q(1, 1), 1, 3));
        assert_eq!(ivp_solve(cube.as_ref(), &real(-1), &real(1), &real(-1)).unwrap(), real(-1));
        assert!(matches!(
            ivp_solve(cube.as_ref(), &real(-1), &real(1), &real(3)),
            Err(Error::NoRealPreimage(_))
        ));
    }

    #[test]
    fn extrema() {
        let sq = oracle("powint:2");
        let e = extrema_on_interval(sq.as_ref(), &(real(-1) + F::t()), &real(1)).unwrap();
        assert_eq!((e.min, e.argmin, e.max, e.argmax), (real(0), real(0), real(1), real(1)));
        let id = oracle("poly:[0,1]");
        let e = extrema_on_interval(id.as_ref(), &F::t(), &(real(1) + F::t())).unwrap();
        assert_eq!((e.min, e.max), (F::t(), real(1) + F::t()));
        let f = oracle("poly:[0,-1,0,1]");
        let e = extrema_on_interval(f.as_ref(), &real(-2), &real(2)).unwrap();
        assert_eq!((e.min, e.argmin, e.max, e.argmax), (real(-6), real(-2), real(6), real(2)));
        // interior maximum at an irrational point needs the float backend
        let g = oracle("poly:[0,2,0,-1]");
        assert!(matches!(
            extrema_on_interval(g.as_ref(), &real(0), &real(3)),
            Err(Error::RootNotExact(_))
        ));
    }

    fn parametric(h: MultiPolyOracle) -> QSFunction<Rational> {
        let h: crate::oracle::MultiOracle<Rational> = std::sync::Arc::new(h);
        crate::smooth::expand_parametric(&h, &[mono(q(1, 1), 1, 100)]).unwrap()
    }

    #[test]
    fn parametric_slice_cancellation() {
        let g = parametric(h_example());
        let w = -mono(q(1, 1), 51, 100);
        let x = solve_parametric_slice(&g, &q(0, 1), &w).unwrap().expect("solution");
        assert_eq!(crate::smooth::eval_qs(&g, &x).unwrap(), w);
        assert!(x.standard_part().is_zero());
        let known = -mono(q(1, 1), 1, 100) - mono(q(1, 1), 49, 100) + mono(q(2, 1), 97, 100);
        assert_eq!(crate::smooth::eval_qs(&g, &known).unwrap(), w);
    }

    #[test]
    fn parametric_slice_targets() {
        let g = parametric(h_example());
        for w in [mono(q(2, 1), 3, 100), mono(q(-1, 1), 1, 2), mono(q(5, 1), 1, 1), F::zero()] {
            let x = solve_parametric_slice(&g, &q(0, 1), &w).unwrap().expect("solution");
            assert_eq!(crate::smooth::eval_qs(&g, &x).unwrap(), w);
        }
        assert!(solve_parametric_slice(&g, &q(0, 1), &mono(q(1, 1), 3, 100)).is_err());
        // a real offset is never reached from a real point
        assert!(!parametric_slice_contains(&g, &q(0, 1), &real(1)).unwrap());
        // y^2 with no parameter: negative targets are out of reach near 0
        let h = MultiPolyOracle::new(MultiPoly::from_terms(2, [(vec![0, 2], rat(1, 1))]));
        let g2 = parametric(h);
        assert!(!parametric_slice_contains(&g2, &q(0, 1), &-mono(q(1, 1), 1, 2)).unwrap());
        let x = solve_parametric_slice(&g2, &q(0, 1), &mono(q(4, 1), 1, 2)).unwrap().unwrap();
        assert_eq!(crate::smooth::eval_qs(&g2, &x).unwrap(), mono(q(4, 1), 1, 2));
    }
}
