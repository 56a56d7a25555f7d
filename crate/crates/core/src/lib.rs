//! Fermat reals: a ring of nilpotent infinitesimals built from truncated
//! fractional powers of a generator `t`, with smooth-function extension,
//! a slice equation solver and three topologies.

pub mod error;
pub mod fermat;
pub mod oracle;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod slice;
pub mod smooth;
pub mod text;
pub mod topology;

pub use error::{Error, Result};
pub use fermat::{Exponent, FermatReal};
pub use oracle::{parse_oracle, DerivativeOracle, MultiOracle, Oracle, PartialOracle};
pub use poly::{MultiPoly, UniPoly};
pub use roots::{isolate_real_roots, Endpoint, RealRoot};
pub use scalar::{Backend, Float, Rational, Scalar};
pub use slice::{
    classify_monotone_global, classify_slice, extrema_on_interval, ivp_criterion_at, ivp_solve,
    parametric_slice_contains, parametric_taylor, refine_to_fundamental, slice_image_contains, solution_family,
    solve_parametric_slice, solve_slice, solve_slice_traced, split_domain, Extrema, Monotonicity, SliceClass,
    SolutionFamily, SolveOptions, SplitResult,
};
pub use smooth::{
    eval_qs, expand_parametric, extract_derivative, extract_derivative_uni, fermat_extend, fermat_extend_multi,
    integrate_qs, separating_exponents, IntegralOracle, QSFunction,
};
pub use text::{parse_rational, FermatRecord, TermRecord};
pub use topology::{
    cauchy_check_prefix, d_omega, d_omega_parts, euclid_inner, in_fermat_open, in_order_interval, make_counterexample,
    norm, norm_sq, omega_limit_decompose, order_limit_decompose, ConvergenceVerdict, CounterexampleParams, Metric,
    SequencePrefix,
};
