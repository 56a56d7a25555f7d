//! Command definitions and dispatch.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fermat_core::scalar::with_float_digits;
use fermat_core::slice::SolveOptions;
use fermat_core::topology::{CounterexampleParams, CATALOG};
use fermat_core::{
    classify_slice, d_omega, extrema_on_interval, fermat_extend, ivp_solve, make_counterexample, norm_sq,
    omega_limit_decompose, order_limit_decompose, slice_image_contains, solution_family, solve_slice_traced,
    split_domain, ConvergenceVerdict, Error, FermatReal, FermatRecord, Float, Rational, Scalar,
};
use serde_json::{json, Value};

use crate::config::Config;
use crate::eval::{parse_function, parse_multi, parse_real, parse_value};
use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "fermat", version, about = "Arithmetic and equation solving over the Fermat reals")]
pub struct Cli {
    /// Emit the structured serialization.
    #[arg(long, global = true)]
    pub json: bool,

    #[arg(long, global = true, env = "FERMAT_BACKEND", value_enum)]
    pub backend: Option<BackendArg>,

    /// Decimal digits for the float backend.
    #[arg(long, global = true)]
    pub precision: Option<usize>,

    /// `key = value` file with defaults for backend, precision and json.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Float,
}

#[derive(Args, Debug, Clone)]
pub struct SliceArgs {
    /// Function: `poly:[c0,...]`, `powint:n`, `sin`, `cos`, `exp`, `log` or a
    /// polynomial such as `u^3 - u`.
    #[arg(long)]
    pub f: String,
    /// Real part of the solution.
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
    #[arg(long, allow_hyphen_values = true)]
    pub rhs: String,
    /// In the even case, take the fundamental solution with negative leading
    /// coefficient.
    #[arg(long)]
    pub negative_root: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Normalize an expression.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Standard part and terms.
    Decompose {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Print `<`, `=` or `>`.
    Compare {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Order ω and nilpotency index.
    Omega {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Fermat extension of a function at a point.
    Extend {
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Fundamental solution of f(x) = rhs with real part `at`.
    Solve {
        #[command(flatten)]
        args: SliceArgs,
        /// Print every step.
        #[arg(long)]
        trace: bool,
    },
    /// Whether rhs lies in the image of the slice at `at`.
    Member {
        #[command(flatten)]
        args: SliceArgs,
    },
    /// Fundamental solution and the threshold above which terms are free.
    Family {
        #[command(flatten)]
        args: SliceArgs,
    },
    /// Split a domain where x -> h(v, x) may lose the intermediate value property.
    IvpSplit {
        /// Polynomial in the parameters and the main variable.
        #[arg(long)]
        h: String,
        /// Comma-separated parameter values.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        /// Variable order, main variable last; default alphabetical.
        #[arg(long)]
        vars: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<String>,
    },
    /// c with a < c < b and f(c) = y.
    IvpSolve {
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Minimum and maximum of a polynomial on [a, b].
    Extrema {
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Print a witness sequence with its metrics and verdicts.
    Demo {
        name: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
    },
}

/// Resolved global settings.
#[derive(Clone, Debug)]
pub struct Settings {
    pub json: bool,
    pub backend: BackendArg,
    pub precision: usize,
}

impl Settings {
    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let cfg = match &cli.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        Ok(Settings {
            json: cli.json || cfg.json.unwrap_or(false),
            backend: cli.backend.or(cfg.backend).unwrap_or(BackendArg::Exact),
            precision: cli.precision.or(cfg.precision).unwrap_or(fermat_core::scalar::DEFAULT_FLOAT_DIGITS),
        })
    }
}

pub fn dispatch(cmd: &Command, s: &Settings) -> Result<String, CliError> {
    if s.precision > 10_000 {
        return Err(Error::InvalidArgument(format!("precision {} too large", s.precision)).into());
    }
    let needs_float = matches!(cmd, Command::Demo { name, .. } if name != "euclid_cauchy_divergent"
        && name != "power_at_one_plus_t" && name != "lebesgue_partial_integrals");
    match (s.backend, needs_float) {
        (BackendArg::Exact, false) => run::<Rational>(cmd, s),
        _ => with_float_digits(s.precision, || run::<Float>(cmd, s)),
    }
}

fn record<S: Scalar>(x: &FermatReal<S>) -> Value {
    json!({ "text": x.to_string(), "value": FermatRecord::from(x) })
}

fn render(s: &Settings, text: String, value: Value) -> String {
    if s.json {
        value.to_string()
    } else {
        text
    }
}

fn run<S: Scalar>(cmd: &Command, s: &Settings) -> Result<String, CliError> {
    Ok(match cmd {
        Command::Eval { expr } => {
            let x = parse_value::<S>(expr)?;
            render(s, x.to_string(), record(&x))
        }
        Command::Decompose { expr } => {
            let x = parse_value::<S>(expr)?;
            let mut text = format!("standard: {}", x.standard_part());
            for (e, c) in x.terms() {
                write!(text, "\nt^({e}): {c}").unwrap();
            }
            render(s, text, json!(FermatRecord::from(&x)))
        }
        Command::Compare { a, b } => {
            let (x, y) = (parse_value::<S>(a)?, parse_value::<S>(b)?);
            let sym = match x.compare(&y) {
                std::cmp::Ordering::Less => "<",
                std::cmp::Ordering::Equal => "=",
                std::cmp::Ordering::Greater => ">",
            };
            render(s, sym.to_string(), json!({ "ordering": sym }))
        }
        Command::Omega { expr } => {
            let x = parse_value::<S>(expr)?;
            let (w, k) = (x.order_omega(), x.nilpotency_index());
            render(s, format!("omega: {w}\nnilpotency: {k}"), json!({ "omega": w.to_string(), "nilpotency": k }))
        }
        Command::Extend { f, x } => {
            let f = parse_function::<S>(f)?;
            let y = fermat_extend(f.as_ref(), &parse_value::<S>(x)?)?;
            render(s, y.to_string(), record(&y))
        }
        Command::Solve { args, trace } => {
            let (f, a, w) = slice_inputs::<S>(args)?;
            let opts = SolveOptions { negative_root: args.negative_root, ..SolveOptions::default() };
            let tr = solve_slice_traced(f.as_ref(), &a, &w, &opts)?;
            let mut text = tr.solution.to_string();
            if *trace {
                write!(text, "\nclass: {}", tr.class).unwrap();
                for (i, st) in tr.steps.iter().enumerate() {
                    write!(text, "\nstep {}: {}*t^({})", i + 1, st.coefficient, st.exponent).unwrap();
                }
            }
            let steps: Vec<Value> = tr
                .steps
                .iter()
                .map(|st| json!({ "exponent": st.exponent.to_string(), "coefficient": st.coefficient.to_string() }))
                .collect();
            render(s, text, json!({ "solution": record(&tr.solution), "class": tr.class.to_string(), "steps": steps }))
        }
        Command::Member { args } => {
            let (f, a, w) = slice_inputs::<S>(args)?;
            let inside = slice_image_contains(f.as_ref(), &a, &w)?;
            let class = classify_slice(f.as_ref(), &a)?;
            render(s, inside.to_string(), json!({ "member": inside, "class": class.to_string() }))
        }
        Command::Family { args } => {
            let (f, a, w) = slice_inputs::<S>(args)?;
            let opts = SolveOptions { negative_root: args.negative_root, ..SolveOptions::default() };
            let fam = solution_family(f.as_ref(), &a, &w, &opts)?;
            render(
                s,
                format!("fundamental: {}\nthreshold: {}", fam.fundamental, fam.threshold),
                json!({ "fundamental": record(&fam.fundamental), "threshold": fam.threshold.to_string() }),
            )
        }
        Command::IvpSplit { h, v, vars, lo, hi } => {
            let (h, names) = parse_multi(h, vars.as_deref())?;
            let v: Vec<FermatReal<S>> = v.split(',').map(parse_value::<S>).collect::<Result<_, _>>()?;
            if v.len() + 1 != names.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} parameter values for variables {}",
                    v.len(),
                    names.join(",")
                ))
                .into());
            }
            let lo = lo.as_deref().map(parse_real).transpose()?;
            let hi = hi.as_deref().map(parse_real).transpose()?;
            let split = split_domain(&h, &v, lo.as_ref(), hi.as_ref())?;
            let points: Vec<String> = split.split_points.iter().map(|r| r.to_string()).collect();
            let intervals: Vec<Value> =
                split.intervals.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect();
            render(s, split.to_string(), json!({ "split_points": points, "intervals": intervals }))
        }
        Command::IvpSolve { f, a, b, y } => {
            let f = parse_function::<S>(f)?;
            let (a, b, y) = (parse_value::<S>(a)?, parse_value::<S>(b)?, parse_value::<S>(y)?);
            let c = ivp_solve(f.as_ref(), &a, &b, &y)?;
            render(s, c.to_string(), record(&c))
        }
        Command::Extrema { f, a, b } => {
            let f = parse_function::<S>(f)?;
            let ex = extrema_on_interval(f.as_ref(), &parse_value::<S>(a)?, &parse_value::<S>(b)?)?;
            render(
                s,
                format!("min: {} at {}\nmax: {} at {}", ex.min, ex.argmin, ex.max, ex.argmax),
                json!({
                    "min": record(&ex.min), "argmin": record(&ex.argmin),
                    "max": record(&ex.max), "argmax": record(&ex.argmax),
                }),
            )
        }
        Command::Demo { name, n, delta } => demo::<S>(name, *n, delta.as_deref(), s)?,
    })
}

fn slice_inputs<S: Scalar>(
    args: &SliceArgs,
) -> Result<(fermat_core::Oracle<S>, S, FermatReal<S>), CliError> {
    let f = parse_function::<S>(&args.f)?;
    let a = S::from_rational(&parse_real(&args.at)?);
    let w = parse_value::<S>(&args.rhs)?;
    Ok((f, a, w))
}

fn verdict_text<S: Scalar>(v: &ConvergenceVerdict<S>) -> (String, Value) {
    match v {
        ConvergenceVerdict::CharacterizedWith { n, tail } => {
            let tail: Vec<String> = tail.iter().map(|b| b.to_string()).collect();
            (format!("characterized with N = {n}, b = [{}]", tail.join(", ")), json!({ "n": n, "tail": tail }))
        }
        ConvergenceVerdict::NotCharacterizedInPrefix => ("not characterized in prefix".into(), Value::Null),
    }
}

fn clean<S: Scalar>(x: S) -> S {
    if x.is_negligible() {
        S::zero()
    } else {
        x
    }
}

fn demo<S: Scalar>(name: &str, n: usize, delta: Option<&str>, s: &Settings) -> Result<String, CliError> {
    if !CATALOG.contains(&name) {
        return Err(Error::UnknownName(format!("{name}; known: {}", CATALOG.join(", "))).into());
    }
    if n == 0 || n > 200 {
        return Err(Error::InvalidArgument(format!("prefix length {n} outside 1..=200")).into());
    }
    let mut p = CounterexampleParams::<S>::new(n);
    if let Some(d) = delta {
        p.delta = S::from_rational(&parse_real(d)?);
    }
    let seq = make_counterexample(name, &p)?;
    let mut text = format!("{name} (n = {n})");
    let mut rows = Vec::new();
    for (i, a) in seq.values.iter().enumerate() {
        write!(text, "\na_{} = {a}", i + 1).unwrap();
    }
    text.push_str("\nk  d_omega(a_k, a_k+1)  norm_sq(a_k+1 - a_k)  norm_sq(a_k^2)");
    for (i, w) in seq.values.windows(2).enumerate() {
        let d = clean(d_omega(&w[0..1], &w[1..2])?);
        let e = clean(norm_sq(&(&w[1] - &w[0])));
        let m = clean(norm_sq(&(&w[0] * &w[0])));
        write!(text, "\n{}  {d}  {e}  {m}", i + 1).unwrap();
        rows.push(json!({ "k": i + 1, "d_omega": d.to_string(), "norm_sq_diff": e.to_string(), "norm_sq_square": m.to_string() }));
    }
    let (ot, oj) = verdict_text(&omega_limit_decompose(&seq));
    let (rt, rj) = verdict_text(&order_limit_decompose(&seq));
    write!(text, "\nomega: {ot}\norder: {rt}").unwrap();
    let values: Vec<Value> = seq.values.iter().map(record).collect();
    let params: Vec<Value> = seq.params.iter().map(|(k, v)| json!([k, v])).collect();
    Ok(render(
        s,
        text,
        json!({ "name": seq.name, "params": params, "values": values, "metrics": rows, "omega": oj, "order": rj }),
    ))
}
