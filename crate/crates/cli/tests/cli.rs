use std::collections::BTreeMap;

use derham_cli::parse::{parse_polynomial, parse_vars};
use derham_cli::run_with;
use derham_core::{Monomial, Polynomial};
use proptest::prelude::*;

fn run(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let env: BTreeMap<String, String> = env.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["derham"];
    argv.extend_from_slice(args);
    let code = run_with(argv, &env, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str], env: &[(&str, &str)]) -> (i32, serde_json::Value) {
    let mut full = args.to_vec();
    full.extend_from_slice(&["--json", "-"]);
    let (code, out, err) = run(&full, env);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}")))
}

#[test]
fn two_points_pass() {
    let (code, v) = json(&["verify", "theorem1", "--vars", "x,y", "--ideal", "x^2-1", "--ideal", "y"], &[]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["computed"]["path_b"]["cohomological"], serde_json::json!([0, 0, 2]));
    assert_eq!(v["expected"]["cohomology"]["points"], serde_json::json!([["-1", "0"], ["1", "0"]]));
}

#[test]
fn two_lines_pass() {
    let (code, v) = json(&["verify", "theorem2", "--vars", "x,y", "--ideal", "x*y"], &[]);
    assert_eq!(code, 0);
    assert_eq!(v["computed"]["path_b"]["cohomological"], serde_json::json!([0, 2, 1]));
}

#[test]
fn compute_injective_hull() {
    let (code, v) = json(&["compute", "--module", "E", "--n", "2"], &[]);
    assert_eq!(code, 0);
    assert_eq!(v["homological"], serde_json::json!([1, 0, 0]));
    let (code, v) = json(&["compute", "--module", "cech", "--vars", "x,y", "--ideal", "x", "--ideal", "y", "--c", "2"], &[]);
    assert_eq!(code, 0);
    assert_eq!(v["cohomological"], serde_json::json!([0, 0, 1]));
}

#[test]
fn report_keys_are_in_schema_order() {
    let (_, out, _) = run(&["verify", "theorem1", "--vars", "x,y", "--ideal", "x", "--ideal", "y", "--json", "-"], &[]);
    let keys = ["\"theorem\"", "\"input\"", "\"expected\"", "\"computed\"", "\"windows\"", "\"seed\"", "\"verdict\"", "\"wall_time_ms\""];
    let at: Vec<usize> = keys.iter().map(|k| out.find(k).unwrap()).collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]), "{out}");
    // no floats anywhere
    assert!(!out.contains('.'));
}

#[test]
fn timings_fill_wall_time() {
    let (_, v) = json(&["--timings", "verify", "theorem1", "--vars", "x", "--ideal", "x"], &[]);
    assert!(v["wall_time_ms"].is_u64());
    let (_, v) = json(&["verify", "theorem1", "--vars", "x", "--ideal", "x"], &[]);
    assert!(v["wall_time_ms"].is_null());
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(run(&["verify", "theorem1", "--vars", "x,y", "--ideal", "x y"], &[]).0, 3);
    assert_eq!(run(&["verify", "theorem1", "--vars", "x,y", "--ideal", "z"], &[]).0, 3);
    assert_eq!(run(&["verify", "theorem1", "--vars", "x,y", "--ideal", "x"], &[]).0, 3);
    assert_eq!(run(&["verify", "theorem2", "--vars", "x,y", "--ideal", "x+1"], &[]).0, 3);
    assert_eq!(run(&["compute", "--module", "Rf", "--n", "2"], &[]).0, 3);
    assert_eq!(run(&["frobnicate"], &[]).0, 3);
    assert_eq!(run(&["--seed", "abc", "compute", "--module", "R", "--n", "1"], &[]).0, 3);
    let (code, _, err) = run(&["verify", "theorem1", "--vars", "x,y", "--ideal", "x^2 + y +"], &[]);
    assert_eq!(code, 3);
    assert!(err.contains("position 9"), "{err}");
}

#[test]
fn help_is_not_an_error() {
    let (code, out, _) = run(&["--help"], &[]);
    assert_eq!(code, 0);
    assert!(out.contains("verify"));
}

#[test]
fn exhausted_caps_are_inconclusive() {
    let args = ["--k-cap", "1,2", "--widen-budget", "0", "verify", "theorem1", "--vars", "x,y", "--ideal", "x", "--ideal", "y"];
    let (code, v) = json(&args, &[]);
    assert_eq!(code, 2);
    assert_eq!(v["verdict"], "inconclusive-no-stabilization");
}

#[test]
fn configuration_layers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("derham.conf");
    std::fs::write(&path, "# test settings\nseed = 11\nretries = 30\n").unwrap();
    let p = path.to_str().unwrap();
    let args = ["verify", "theorem2", "--vars", "x,y", "--ideal", "x*y", "--config", p];
    let (_, v) = json(&args, &[]);
    assert_eq!(v["seed"], 11);
    let (_, v) = json(&args, &[("DERHAM_SEED", "12")]);
    assert_eq!(v["seed"], 12);
    let mut with_flag = args.to_vec();
    with_flag.extend_from_slice(&["--seed", "13"]);
    let (_, v) = json(&with_flag, &[("DERHAM_SEED", "12")]);
    assert_eq!(v["seed"], 13);
    // the config path may come from the environment too
    let (_, v) = json(&args[..6], &[("DERHAM_CONFIG", p)]);
    assert_eq!(v["seed"], 11);
    std::fs::write(&path, "seed: 11\n").unwrap();
    assert_eq!(run(&args, &[]).0, 3);
}

#[test]
fn json_file_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let args = ["--quiet", "verify", "theorem2", "--vars", "x,y", "--ideal", "x^2+y^2", "--seed", "5", "--json", path.to_str().unwrap()];
        let (code, out, _) = run(&args, &[]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

fn poly_strategy(n: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((-20i64..=20, 1i64..=5, prop::collection::vec(0u32..=4, n)), 0..6).prop_map(move |terms| {
        let mut p = Polynomial::zero(n);
        for (num, den, e) in terms {
            p.add_term(Monomial(e), derham_core::linalg::rat_frac(num, den));
        }
        p
    })
}

proptest! {
    #[test]
    fn printing_then_parsing_is_identity(p in poly_strategy(3)) {
        let vars = parse_vars("x,y,z").unwrap();
        let text = p.to_string_with(&vars);
        let back = parse_polynomial(&text, &vars).unwrap();
        prop_assert_eq!(back.to_string_with(&vars), text);
        prop_assert_eq!(back, p);
    }

    #[test]
    fn generated_expressions_round_trip(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let vars = parse_vars("a,b1").unwrap();
        let src = derham_cli::random_expression(&mut rng, &vars, 4);
        let p = parse_polynomial(&src, &vars).unwrap();
        let printed = p.to_string_with(&vars);
        prop_assert_eq!(parse_polynomial(&printed, &vars).unwrap(), p);
    }

    #[test]
    fn parser_never_panics(src in "[xy0-9+*^/() -]{0,20}") {
        let vars = parse_vars("x,y").unwrap();
        let _ = parse_polynomial(&src, &vars);
    }
}
