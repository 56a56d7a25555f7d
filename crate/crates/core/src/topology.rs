//! The ω metric, the order topology and the Euclidean inner product, with
//! finite-prefix convergence predicates and a catalog of witness sequences.

use std::cmp::Ordering;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermat::{Exponent, FermatReal};
use crate::oracle::{Declared, LinearCombination, Oracle, PolyOracle, SinOverN};
use crate::scalar::Scalar;
use crate::smooth::{fermat_extend, integrate_qs, DeclaredIntegrals, QSFunction};

/// `‖°x − °y‖ + Σ ω(x_i − y_i)`.
///
/// Under the exact backend the norm must be rational; [`d_omega_parts`] gives
/// the exact ingredients otherwise.
pub fn d_omega<S: Scalar>(x: &[FermatReal<S>], y: &[FermatReal<S>]) -> Result<S> {
    let (sq, omega) = d_omega_parts(x, y)?;
    let norm = if x.len() == 1 {
        (&x[0] - &y[0]).standard_part().abs()
    } else {
        sq.sqrt()?
    };
    Ok(norm + S::from_rational(&omega))
}

/// `(‖°x − °y‖², Σ ω(x_i − y_i))`.
pub fn d_omega_parts<S: Scalar>(x: &[FermatReal<S>], y: &[FermatReal<S>]) -> Result<(S, BigRational)> {
    check_dims(x, y)?;
    let mut sq = S::zero();
    let mut omega = BigRational::zero();
    for (a, b) in x.iter().zip(y) {
        let d = a - b;
        let s = d.standard_part().clone();
        sq = sq + s.clone() * s;
        omega += d.order_omega();
    }
    Ok((sq, omega))
}

fn check_dims<S: Scalar>(x: &[FermatReal<S>], y: &[FermatReal<S>]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!("dimension {} vs {}", x.len(), y.len())));
    }
    Ok(())
}

fn inner1<S: Scalar>(x: &FermatReal<S>, y: &FermatReal<S>) -> S {
    let mut acc = x.standard_part().clone() * y.standard_part().clone();
    let (xs, ys) = (x.terms(), y.terms());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].0.cmp(&ys[j].0) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                acc = acc + xs[i].1.clone() * ys[j].1.clone();
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// `⟨°x, °y⟩ + Σ_a ⟨α_a, β_a⟩` over matching exponents.
pub fn euclid_inner<S: Scalar>(x: &[FermatReal<S>], y: &[FermatReal<S>]) -> Result<S> {
    check_dims(x, y)?;
    Ok(x.iter().zip(y).fold(S::zero(), |acc, (a, b)| acc + inner1(a, b)))
}

pub fn norm_sq<S: Scalar>(x: &FermatReal<S>) -> S {
    inner1(x, x)
}

pub fn norm<S: Scalar>(x: &FermatReal<S>) -> Result<S> {
    norm_sq(x).sqrt()
}

/// `lo < x < hi` in the dictionary order.
pub fn in_order_interval<S: Scalar>(x: &FermatReal<S>, lo: &FermatReal<S>, hi: &FermatReal<S>) -> bool {
    lo.compare(x) == Ordering::Less && x.compare(hi) == Ordering::Less
}

/// `°x ∈ U` for `U` a union of open intervals (`None` for an infinite end).
pub fn in_fermat_open<S: Scalar>(x: &FermatReal<S>, u: &[(Option<S>, Option<S>)]) -> bool {
    let s = x.standard_part();
    u.iter().any(|(lo, hi)| lo.as_ref().is_none_or(|l| l < s) && hi.as_ref().is_none_or(|h| s < h))
}

// ---------------------------------------------------------------------------

/// A finite prefix `a_1, ..., a_N` of a sequence with its generator.
#[derive(Clone, Debug, PartialEq)]
pub struct SequencePrefix<S: Scalar> {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub values: Vec<FermatReal<S>>,
}

impl<S: Scalar> SequencePrefix<S> {
    pub fn new(name: impl Into<String>, values: Vec<FermatReal<S>>) -> Self {
        SequencePrefix { name: name.into(), params: Vec::new(), values }
    }

    pub fn truncated(&self, n: usize) -> Self {
        SequencePrefix { name: self.name.clone(), params: self.params.clone(), values: self.values[..n].to_vec() }
    }
}

/// Outcome of a limit characterization on a prefix. `n` is 1-based and `tail`
/// holds the real coefficients `b_n` for the later entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConvergenceVerdict<S> {
    CharacterizedWith { n: usize, tail: Vec<S> },
    NotCharacterizedInPrefix,
}

fn decompose<S: Scalar>(
    s: &SequencePrefix<S>,
    coefficient: impl Fn(&FermatReal<S>) -> Option<S>,
) -> ConvergenceVerdict<S> {
    let v = &s.values;
    'outer: for n in 0..v.len().saturating_sub(1) {
        let mut tail = Vec::new();
        for later in &v[n + 1..] {
            match coefficient(&(later - &v[n])) {
                Some(b) => tail.push(b),
                None => continue 'outer,
            }
        }
        return ConvergenceVerdict::CharacterizedWith { n: n + 1, tail };
    }
    ConvergenceVerdict::NotCharacterizedInPrefix
}

/// Least `N` with `a_n − a_N` real for every later prefix entry.
pub fn omega_limit_decompose<S: Scalar>(s: &SequencePrefix<S>) -> ConvergenceVerdict<S> {
    decompose(s, |d| d.is_real().then(|| d.standard_part().clone()))
}

/// Least `N` with `a_n − a_N = b_n t` for every later prefix entry.
pub fn order_limit_decompose<S: Scalar>(s: &SequencePrefix<S>) -> ConvergenceVerdict<S> {
    decompose(s, |d| {
        if !d.standard_part().is_zero() {
            return None;
        }
        match d.terms() {
            [] => Some(S::zero()),
            [(e, c)] if e.value().is_one() => Some(c.clone()),
            _ => None,
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Omega,
    Euclid,
}

/// For each `(N, bound)`: every pair of prefix entries with indices beyond `N`
/// (1-based) lies closer than `bound`.
pub fn cauchy_check_prefix<S: Scalar>(s: &SequencePrefix<S>, metric: Metric, schedule: &[(usize, S)]) -> Result<bool> {
    let v = &s.values;
    for (n, bound) in schedule {
        if *n > v.len() {
            return Err(Error::InvalidArgument(format!("schedule index {n} beyond prefix of length {}", v.len())));
        }
        for i in *n..v.len() {
            for j in i + 1..v.len() {
                let close = match metric {
                    Metric::Euclid => norm_sq(&(&v[j] - &v[i])) < bound.clone() * bound.clone(),
                    Metric::Omega => d_omega(&v[j..=j], &v[i..=i])? < *bound,
                };
                if !close {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Parameters of the witness generators.
#[derive(Clone, Debug)]
pub struct CounterexampleParams<S: Scalar> {
    /// Prefix length.
    pub n: usize,
    /// Real scale `δ` of the multiplication witnesses.
    pub delta: S,
    /// Infinitesimals `δ_i` of the partial integrals, default `t^(1/i)`.
    pub deltas: Option<Vec<FermatReal<S>>>,
    /// Point `x` with `x² = 0` of the sine slice, default `t`.
    pub x: Option<FermatReal<S>>,
}

impl<S: Scalar> CounterexampleParams<S> {
    pub fn new(n: usize) -> Self {
        CounterexampleParams { n, delta: S::one(), deltas: None, x: None }
    }
}

/// Names accepted by [`make_counterexample`].
pub const CATALOG: &[&str] = &[
    "euclid_cauchy_divergent",
    "mult_norm_blowup",
    "mult_norm_progression",
    "power_at_one_plus_t",
    "sin_over_n_slice",
    "lebesgue_partial_integrals",
];

fn t_pow<S: Scalar>(c: S, p: i64, q: i64) -> FermatReal<S> {
    FermatReal::monomial(c, Exponent::ratio(p, q).expect("exponent in (0, 1]"))
}

/// Generates a named witness sequence.
pub fn make_counterexample<S: Scalar>(name: &str, p: &CounterexampleParams<S>) -> Result<SequencePrefix<S>> {
    let n = p.n;
    let mut params = vec![("n".to_string(), n.to_string())];
    let values: Vec<FermatReal<S>> = match name {
        "euclid_cauchy_divergent" => {
            // a_m = Σ_{i<=m} t^(1/i) / i!
            let mut acc = FermatReal::zero();
            let mut fact = S::one();
            let mut out = Vec::with_capacity(n);
            for i in 1..=n {
                fact = fact * S::from_int(i as i64);
                acc = acc + t_pow(S::one() / fact.clone(), 1, i as i64);
                out.push(acc.clone());
            }
            out
        }
        "mult_norm_blowup" => {
            // x_k = δ/√(k+1) Σ_{i<=k} t^(1/2^i)
            params.push(("delta".into(), p.delta.to_string()));
            let mut out = Vec::with_capacity(n);
            let mut sum = FermatReal::zero();
            for k in 1..=n {
                sum = sum + t_pow(S::one(), 1, 1i64 << k.min(62));
                let scale = p.delta.clone() / S::from_int(k as i64 + 1).sqrt()?;
                out.push(sum.scale(&scale));
            }
            out
        }
        "mult_norm_progression" => {
            // x_k = δ/√k Σ_{i<=k} t^(i/2k)
            params.push(("delta".into(), p.delta.to_string()));
            let mut out = Vec::with_capacity(n);
            for k in 1..=n {
                let sum: FermatReal<S> = (1..=k).map(|i| t_pow(S::one(), i as i64, 2 * k as i64)).sum();
                let scale = p.delta.clone() / S::from_int(k as i64).sqrt()?;
                out.push(sum.scale(&scale));
            }
            out
        }
        "power_at_one_plus_t" => {
            let x = FermatReal::one() + FermatReal::t();
            (1..=n).map(|k| fermat_extend(&PolyOracle::powint(k), &x)).collect::<Result<_>>()?
        }
        "sin_over_n_slice" => {
            let x = p.x.clone().unwrap_or_else(FermatReal::t);
            if !x.pow_nat(2).is_zero() {
                return Err(Error::InvalidArgument(format!("{x} does not square to zero")));
            }
            params.push(("x".into(), x.to_string()));
            let half_pi = FermatReal::real(S::pi()? / S::from_int(2));
            let at = half_pi + x;
            (1..=n as u64)
                .map(|k| fermat_extend(&SinOverN(k), &at).map(|v| v.prune_negligible()))
                .collect::<Result<_>>()?
        }
        "lebesgue_partial_integrals" => {
            let deltas = match &p.deltas {
                Some(d) => {
                    if d.len() < n {
                        return Err(Error::InvalidArgument(format!("need {n} infinitesimals, got {}", d.len())));
                    }
                    d[..n].to_vec()
                }
                None => (1..=n as i64).map(|i| t_pow(S::one(), 1, i)).collect(),
            };
            partial_integrals(&deltas)?
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(SequencePrefix { name: name.to_string(), params, values })
}

/// `b_k = ∫_0^1 Σ_{i<=k} •σ_{i+1}(x) δ_i dx` for bumps `σ` with unit integral.
fn partial_integrals<S: Scalar>(deltas: &[FermatReal<S>]) -> Result<Vec<FermatReal<S>>> {
    let mut integrals = DeclaredIntegrals::new();
    let bumps: Vec<Oracle<S>> = (1..=deltas.len())
        .map(|i| {
            let name = format!("bump{}", i + 1);
            integrals = std::mem::take(&mut integrals).declare(name.clone(), S::one());
            Arc::new(Declared::new(name)) as Oracle<S>
        })
        .collect();
    let mut out = Vec::with_capacity(deltas.len());
    for k in 1..=deltas.len() {
        let mut groups: std::collections::BTreeMap<BigRational, Vec<(BigRational, Oracle<S>)>> = Default::default();
        for (d, bump) in deltas[..k].iter().zip(&bumps) {
            if !d.standard_part().is_zero() {
                groups.entry(BigRational::zero()).or_default().push((d.standard_part().to_rational(), bump.clone()));
            }
            for (e, c) in d.terms() {
                groups.entry(e.value().clone()).or_default().push((c.to_rational(), bump.clone()));
            }
        }
        let terms = groups
            .into_iter()
            .map(|(e, parts)| (e, Arc::new(LinearCombination::new(parts)) as Oracle<S>))
            .collect();
        let f = QSFunction::new(terms)?;
        out.push(integrate_qs(&f, &S::zero(), &S::one(), &integrals)?);
    }
    Ok(out)
}
