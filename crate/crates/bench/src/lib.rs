//! Fixed inputs shared by the benchmarks.

use fermat_core::oracle::PolyOracle;
use fermat_core::{Exponent, FermatReal, Rational, UniPoly};

pub type F = FermatReal<Rational>;

/// `Σ_{i=1}^{n} (i/7) t^(1/i)` plus a standard part.
pub fn dense(n: i64) -> F {
    let terms = (1..=n).map(|i| (Exponent::ratio(1, i).unwrap(), Rational::new(i, 7))).collect();
    F::from_parts(Rational::new(3, 2), terms)
}

/// `1 + t^(1/d) + t^(2/d) + ... + t`.
pub fn uniform(d: i64) -> F {
    let terms = (1..=d).map(|p| (Exponent::ratio(p, d).unwrap(), Rational::from(1))).collect();
    F::from_parts(Rational::from(1), terms)
}

/// `u^5 - 3u^3 + u`.
pub fn quintic() -> PolyOracle {
    PolyOracle::new(UniPoly::from_ints(&[0, 1, 0, -3, 0, 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures() {
        assert_eq!(dense(4).terms().len(), 4);
        assert_eq!(uniform(6).terms().len(), 6);
        assert_eq!(uniform(6).infinitesimal_part().nilpotency_index(), 7);
    }
}
