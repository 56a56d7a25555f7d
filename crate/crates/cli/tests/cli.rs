use fermat_cli::run_args;
use fermat_cli::eval::parse_value;
use fermat_core::{Exponent, FermatReal, Rational};
use proptest::prelude::*;

fn run(args: &[&str]) -> (String, String, i32) {
    let o = run_args(std::iter::once("fermat").chain(args.iter().copied()));
    (o.stdout, o.stderr, o.code)
}

fn ok(args: &[&str]) -> String {
    let (out, err, code) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

#[test]
fn documented_examples() {
    assert_eq!(ok(&["solve", "--f", "poly:[0,0,0,1]", "--at", "0", "--rhs", "t"]), "t^(1/3)\n");
    assert_eq!(ok(&["ivp-split", "--h", "y^3 + x*y^2", "--v", "t^(1/100)"]), "(-inf, 0), (0, inf)\n");
    assert_eq!(ok(&["compare", "t^(1/2)", "t"]), ">\n");
}

#[test]
fn verbs() {
    assert_eq!(ok(&["eval", "(1+t^(1/2))^(2)"]), "1 + 2*t^(1/2) + t^(1/1)\n");
    assert_eq!(ok(&["eval", "t^(3/2)"]), "0\n");
    assert_eq!(ok(&["decompose", "3/2 + 2*t^(1/2) - t"]), "standard: 3/2\nt^(1/2): 2\nt^(1/1): -1\n");
    assert_eq!(ok(&["omega", "t^(1/3) + t"]), "omega: 3\nnilpotency: 4\n");
    assert_eq!(ok(&["compare", "-t", "0"]), "<\n");
    assert_eq!(ok(&["member", "--f", "poly:[0,0,1]", "--at", "0", "--rhs", "-t"]), "false\n");
    assert_eq!(ok(&["ivp-solve", "--f", "u^3 - u", "--a", "-2", "--b", "2", "--y", "t"]), "-1 + 1/2*t^(1/1)\n");
    let fam = ok(&["family", "--f", "powint:3", "--at", "0", "--rhs", "t"]);
    assert!(fam.contains("t^(1/3)") && fam.contains("1/3"), "{fam}");
}

#[test]
fn json_output() {
    let out = ok(&["--json", "eval", "1 + t"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["text"], "1 + t^(1/1)");
    assert_eq!(v["value"]["standard"], "1");
    assert_eq!(v["value"]["terms"][0]["exponent"], "1/1");
}

#[test]
fn float_backend() {
    let out = ok(&["--backend", "float", "--precision", "30", "eval", "sin(t^(1/2))"]);
    assert_eq!(out, "t^(1/2)\n");
}

#[test]
fn exit_codes() {
    let (_, err, code) = run(&["eval", "1 +"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error[parse]: parse error at 3"), "{err}");
    let (_, err, code) = run(&["eval", "sin(1)"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error[transcendental-not-exact]"), "{err}");
    let (_, err, code) = run(&["solve", "--f", "poly:[0,0,1]", "--at", "0", "--rhs", "-t"]);
    assert_eq!(code, 1, "{err}");
    let (_, _, code) = run(&["bogus-verb"]);
    assert_eq!(code, 2);
    let (out, _, code) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
}

#[test]
fn config_file() {
    let dir = std::env::temp_dir().join(format!("fermat-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fermat.conf");
    std::fs::write(&path, "# test\njson = true\n").unwrap();
    let out = ok(&["--config", path.to_str().unwrap(), "eval", "t"]);
    assert!(out.starts_with('{'), "{out}");
    std::fs::write(&path, "colour = red\n").unwrap();
    let (_, _, code) = run(&["--config", path.to_str().unwrap(), "eval", "t"]);
    assert_eq!(code, 1);
    std::fs::remove_dir_all(&dir).ok();
}

fn canonical() -> impl Strategy<Value = FermatReal<Rational>> {
    let coef = (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Rational::new(n, d));
    let exp = (1i64..=12).prop_flat_map(|d| (1..=d).prop_map(move |p| Exponent::ratio(p, d).unwrap()));
    (coef.clone(), prop::collection::vec((exp, coef), 0..=4)).prop_map(|(s, ts)| FermatReal::from_parts(s, ts))
}

proptest! {
    #[test]
    fn print_then_parse(x in canonical()) {
        prop_assert_eq!(parse_value::<Rational>(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn arbitrary_text_never_panics(s in "[-+*^()/t0-9a-z ,.\\[\\]]{0,40}") {
        let o = run_args(["fermat", "eval", s.as_str()]);
        prop_assert!(o.code == 0 || o.code == 1 || o.code == 2);
    }
}
