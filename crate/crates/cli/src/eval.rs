//! Evaluation of parsed expressions.

use std::sync::Arc;

use fermat_core::oracle::{MultiPolyOracle, PolyOracle};
use fermat_core::{fermat_extend, parse_oracle, Error, Exponent, FermatReal, MultiPoly, Oracle, Result, Scalar, UniPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::parse::{parse, variables, Expr};
use crate::CliError;

/// Value of a closed expression.
pub fn eval<S: Scalar>(e: &Expr) -> Result<FermatReal<S>> {
    Ok(match e {
        Expr::Num(q) => FermatReal::real(S::from_rational(q)),
        Expr::T(q) => {
            if q > &BigRational::one() {
                FermatReal::zero()
            } else {
                FermatReal::monomial(S::one(), Exponent::new(q.clone())?)
            }
        }
        Expr::Var(v) => return Err(Error::UnknownName(format!("free variable `{v}`"))),
        Expr::Neg(a) => -eval::<S>(a)?,
        Expr::Add(a, b) => eval::<S>(a)? + eval::<S>(b)?,
        Expr::Sub(a, b) => eval::<S>(a)? - eval::<S>(b)?,
        Expr::Mul(a, b) => eval::<S>(a)? * eval::<S>(b)?,
        Expr::Pow(a, n) => pow(&eval::<S>(a)?, *n)?,
        Expr::Call(name, a) => {
            let f = parse_oracle::<S>(name)?;
            fermat_extend(f.as_ref(), &eval::<S>(a)?)?
        }
    })
}

/// Powers of reals with large standard parts blow up; infinitesimal parts
/// vanish past the nilpotency index anyway.
fn pow<S: Scalar>(x: &FermatReal<S>, n: u32) -> Result<FermatReal<S>> {
    let r = x.standard_part();
    if n > 64 && !r.is_zero() && r.abs() != S::one() {
        let bits = r.to_rational().numer().bits().max(r.to_rational().denom().bits());
        if bits.saturating_mul(u64::from(n)) > 1 << 20 {
            return Err(Error::InvalidArgument(format!("power {n} of {x} is too large")));
        }
    }
    Ok(x.pow_nat(n))
}

pub fn parse_value<S: Scalar>(text: &str) -> std::result::Result<FermatReal<S>, CliError> {
    Ok(eval::<S>(&parse(text)?)?)
}

/// A polynomial in the given variables; `t` and calls are rejected.
pub fn to_multipoly(e: &Expr, vars: &[String]) -> Result<MultiPoly> {
    let n = vars.len();
    Ok(match e {
        Expr::Num(q) => MultiPoly::constant(n, q.clone()),
        Expr::Var(v) => {
            let i = vars
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| Error::UnknownName(format!("variable `{v}` not in {}", vars.join(","))))?;
            MultiPoly::var(n, i)
        }
        Expr::T(_) => return Err(Error::InvalidArgument("`t` cannot appear in a function".into())),
        Expr::Call(name, _) => return Err(Error::NotPolynomial(name.clone())),
        Expr::Neg(a) => to_multipoly(a, vars)?.scale(&-BigRational::one()),
        Expr::Add(a, b) => to_multipoly(a, vars)?.add(&to_multipoly(b, vars)?),
        Expr::Sub(a, b) => to_multipoly(a, vars)?.add(&to_multipoly(b, vars)?.scale(&-BigRational::one())),
        Expr::Mul(a, b) => to_multipoly(a, vars)?.mul(&to_multipoly(b, vars)?),
        Expr::Pow(a, k) => {
            if *k > 256 {
                return Err(Error::InvalidArgument(format!("polynomial degree {k} too large")));
            }
            to_multipoly(a, vars)?.pow(*k)
        }
    })
}

/// Variable order for a function expression: alphabetical, last one main,
/// unless given explicitly.
pub fn variable_order(e: &Expr, explicit: Option<&str>) -> std::result::Result<Vec<String>, CliError> {
    match explicit {
        Some(list) => Ok(list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()),
        None => Ok(variables(e)),
    }
}

/// A univariate function: a built-in descriptor or a polynomial expression in
/// one variable.
pub fn parse_function<S: Scalar>(desc: &str) -> std::result::Result<Oracle<S>, CliError> {
    match parse_oracle::<S>(desc) {
        Err(Error::UnknownName(_)) => {}
        other => return Ok(other?),
    }
    let e = parse(desc)?;
    let vars = variables(&e);
    if vars.len() > 1 {
        return Err(Error::InvalidArgument(format!("expected one variable, found {}", vars.join(","))).into());
    }
    let p = to_multipoly(&e, &vars)?;
    let uni = if vars.is_empty() {
        UniPoly::constant(p.terms().values().next().cloned().unwrap_or_else(BigRational::zero))
    } else {
        let mut cs = Vec::new();
        for (exp, c) in p.terms() {
            let k = exp[0] as usize;
            if cs.len() <= k {
                cs.resize(k + 1, BigRational::zero());
            }
            cs[k] += c;
        }
        UniPoly::new(cs)
    };
    Ok(Arc::new(PolyOracle::named(desc.trim().to_string(), uni)))
}

/// A polynomial `h(v_1, ..., v_k, x)` and its variable names.
pub fn parse_multi(desc: &str, vars: Option<&str>) -> std::result::Result<(MultiPolyOracle, Vec<String>), CliError> {
    let e = parse(desc)?;
    let order = variable_order(&e, vars)?;
    if order.is_empty() {
        return Err(Error::InvalidArgument("function has no variables".into()).into());
    }
    let p = to_multipoly(&e, &order)?;
    Ok((MultiPolyOracle::named(desc.trim().to_string(), p), order))
}

/// A scalar literal `p`, `p/q` or decimal, with optional sign.
pub fn parse_real(text: &str) -> std::result::Result<BigRational, CliError> {
    let x = parse_value::<fermat_core::Rational>(text)?;
    if !x.is_real() {
        return Err(Error::InvalidArgument(format!("expected a real number, got {x}")).into());
    }
    Ok(x.standard_part().inner().clone())
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fermat_core::Rational;

    #[test]
    fn closed_values() {
        let x = parse_value::<Rational>("(1+t^(1/2))^(2)").unwrap();
        assert_eq!(x.to_string(), "1 + 2*t^(1/2) + t^(1/1)");
        assert_eq!(parse_value::<Rational>("t^(3/2)").unwrap(), FermatReal::zero());
        assert_eq!(parse_value::<Rational>("-t").unwrap().to_string(), "-t^(1/1)");
        assert!(parse_value::<Rational>("sin(1)").is_err());
        assert!(parse_value::<Rational>("2^4096^1").is_err());
    }

    #[test]
    fn functions() {
        let f = parse_function::<Rational>("u^3 - u").unwrap();
        assert_eq!(f.as_polynomial().unwrap(), UniPoly::from_ints(&[0, -1, 0, 1]));
        let (h, vars) = parse_multi("y^3 + x*y^2", None).unwrap();
        assert_eq!(vars, vec!["x", "y"]);
        assert_eq!(fermat_core::PartialOracle::<Rational>::arity(&h), 2);
    }
}
