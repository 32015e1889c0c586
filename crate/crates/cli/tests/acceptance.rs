//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use derham_cli::parse::{parse_polynomial, parse_vars};
use derham_cli::run_with;
use derham_core::harness::default_block_polynomials;
use derham_core::{
    verify_building_blocks, verify_theorem1, verify_theorem2, HarnessConfig, Ideal, Polynomial, Rational, Verdict,
    VerificationReport,
};
use num_traits::Zero;

// ---- oracles -------------------------------------------------------------

/// Dense coefficients (low degree first) of a polynomial in one variable.
fn coeffs(p: &Polynomial, var: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    for (m, c) in p.terms() {
        let e = m.0[var] as usize;
        if out.len() <= e {
            out.resize(e + 1, Rational::zero());
        }
        out[e] += c;
    }
    trim(out)
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    while r.len() >= b.len() && !r.is_empty() {
        let f = r.last().unwrap() / b.last().unwrap();
        let shift = r.len() - b.len();
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &f * bi;
        }
        r = trim(r);
    }
    r
}

fn gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if b.is_empty() {
        a.to_vec()
    } else {
        gcd(b, &rem(a, b))
    }
}

/// Number of distinct roots over the algebraic closure: `deg p - deg gcd(p, p')`.
fn distinct_roots(p: &[Rational]) -> usize {
    let dp: Vec<Rational> = p.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer(i.into())).collect();
    let g = gcd(p, &trim(dp));
    (p.len() - 1) - (g.len() - 1)
}

/// Points of `V(p_1(x_1), .., p_n(x_n))` with each generator in its own variable.
fn separated_point_count(gens: &[Polynomial]) -> usize {
    gens.iter()
        .map(|g| {
            let v = g.support_vars();
            assert_eq!(v.len(), 1, "oracle needs one variable per generator");
            distinct_roots(&coeffs(g, v[0]))
        })
        .product()
}

/// Points of `V(f(x, y))` in the projective line: roots of `f(t, 1)` plus the
/// point at infinity when `y` divides `f`.
fn binary_form_points(f: &Polynomial) -> usize {
    let dehom = coeffs(f, 0);
    let total = f.terms().map(|(m, _)| m.0[0] + m.0[1]).max().unwrap() as usize;
    let finite = distinct_roots(&dehom);
    finite + usize::from(dehom.len() - 1 < total)
}

/// Koszul homology of a tensor product: convolution of the factors' dims.
fn kunneth(factors: &[[usize; 2]]) -> Vec<usize> {
    factors.iter().fold(vec![1], |acc, f| {
        let mut out = vec![0; acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            out[i] += a * f[0];
            out[i + 1] += a * f[1];
        }
        out
    })
}

// ---- helpers -------------------------------------------------------------

struct Outcome {
    ok: bool,
    detail: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { ok: true, detail: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: String) {
        if !ok {
            self.ok = false;
        }
        self.detail.push(format!("{} {what}", if ok { "  ok " } else { "  BAD" }));
    }
}

fn ideal(vars: &str, gens: &[&str]) -> (Vec<String>, Ideal) {
    let vars = parse_vars(vars).unwrap();
    let polys: Vec<Polynomial> = gens.iter().map(|g| parse_polynomial(g, &vars).unwrap()).collect();
    (vars.clone(), Ideal::new(vars.len(), polys).unwrap())
}

fn cohom(report: &VerificationReport, path: &str) -> Option<Vec<usize>> {
    report.computed.get(path).and_then(|c| c.cohomological.clone())
}

fn bounds_hold(report: &VerificationReport) -> bool {
    report.computed.values().all(|c| c.vanishing_bound != Some(false))
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["derham"];
    argv.extend_from_slice(args);
    let code = run_with(argv, &BTreeMap::new(), &mut out, &mut err);
    (code, out)
}

// ---- criteria ------------------------------------------------------------

const POINT_CORPUS: [(&str, &[&str]); 8] = [
    ("x,y", &["x", "y"]),
    ("x,y", &["x^2", "y"]),
    ("x,y", &["x^2 - 1", "y"]),
    ("x,y", &["x^2 + 1", "y"]),
    ("x,y", &["(x - 1)*(x - 2)*(x - 3)", "y"]),
    ("x,y", &["x^2 - 1", "y^2 - 1"]),
    ("x,y,z", &["x", "y", "z"]),
    ("x,y,z", &["x^2 - 1", "y", "z"]),
];

fn point_corpus(cfg: &HarnessConfig) -> (Outcome, Outcome) {
    let mut c1 = Outcome::new();
    let mut c4 = Outcome::new();
    let start = Instant::now();
    for (vars, gens) in POINT_CORPUS {
        let (names, i) = ideal(vars, gens);
        let n = names.len();
        let points = separated_point_count(i.generators());
        let mut want = vec![0; n + 1];
        want[n] = points;
        let label = format!("({})", gens.join(", "));
        match verify_theorem1(&i, Some(&names), cfg) {
            Ok(rep) => {
                let b = cohom(&rep, "path_b");
                let a = cohom(&rep, "path_a");
                let ok = rep.verdict == Verdict::Pass && b.as_ref() == Some(&want) && bounds_hold(&rep);
                c1.check(ok, format!("{label}: expected {want:?}, path_b {b:?}, {:?}", rep.verdict));
                if a.is_some() {
                    c4.check(a == b, format!("{label}: path_a {a:?} vs path_b {b:?}"));
                } else {
                    // no rational decomposition; path agreement does not apply
                    let rational = !gens.contains(&"x^2 + 1");
                    c4.check(!rational, format!("{label}: path_a not applicable"));
                }
            }
            Err(e) => c1.check(false, format!("{label}: error {e}")),
        }
    }
    let took = start.elapsed();
    c1.check(took < Duration::from_secs(600), format!("runtime {took:.1?} (limit 10 min)"));
    (c1, c4)
}

const CURVE_CORPUS: [(&str, &[&str]); 7] = [
    ("x,y", &["x"]),
    ("x,y", &["x*y"]),
    ("x,y", &["x^2 + y^2"]),
    ("x,y", &["x*y*(x - y)"]),
    ("x,y,z", &["x", "y"]),
    ("x,y,z", &["x*y", "z"]),
    ("x,y,z", &["x^2 + y^2", "z"]),
];

fn curve_corpus(cfg: &HarnessConfig) -> Outcome {
    let mut c = Outcome::new();
    let start = Instant::now();
    for (vars, gens) in CURVE_CORPUS {
        let (names, i) = ideal(vars, gens);
        let n = names.len();
        // the curve part lives in (x, y); a linear pair cuts out a single point
        let r = if gens.iter().all(|g| g.len() == 1) { 1 } else { binary_form_points(&i.generators()[0].restrict(2).unwrap()) };
        let mut want = vec![0; n + 1];
        want[n - 1] = r;
        want[n] = r - 1;
        let label = format!("({}) in {n} vars", gens.join(", "));
        match verify_theorem2(&i, Some(&names), cfg) {
            Ok(rep) => {
                let got = cohom(&rep, "path_b");
                let ok = rep.verdict == Verdict::Pass && got.as_ref() == Some(&want) && bounds_hold(&rep);
                c.check(ok, format!("{label}: r = {r}, expected {want:?}, got {got:?}"));
            }
            Err(e) => c.check(false, format!("{label}: error {e}")),
        }
    }
    let took = start.elapsed();
    c.check(took < Duration::from_secs(900), format!("runtime {took:.1?} (limit 15 min)"));
    c
}

fn blocks(cfg: &HarnessConfig) -> Outcome {
    let mut c = Outcome::new();
    for n in 1..=3usize {
        let fs = if n == 2 { default_block_polynomials(2) } else { vec![] };
        let rep = match verify_building_blocks(n, &fs, None, cfg) {
            Ok(r) => r,
            Err(e) => {
                c.check(false, format!("n = {n}: error {e}"));
                continue;
            }
        };
        let homological = |k: &str| rep.computed.get(k).and_then(|d| d.homological.clone());
        let mut e = vec![0; n + 1];
        e[0] = 1;
        let mut r = vec![0; n + 1];
        r[n] = 1;
        c.check(homological("E") == Some(e.clone()), format!("n = {n}: E {:?}, closed form {e:?}", homological("E")));
        c.check(homological("R") == Some(r.clone()), format!("n = {n}: R {:?}, closed form {r:?}", homological("R")));
        if n >= 2 {
            let mut hp = vec![0; n + 1];
            hp[1] = 1;
            c.check(homological("HP") == Some(hp.clone()), format!("n = {n}: HP {:?}, closed form {hp:?}", homological("HP")));
        }
        c.check(rep.verdict == Verdict::Pass && bounds_hold(&rep), format!("n = {n}: report verdict {:?}", rep.verdict));
        if n != 2 {
            continue;
        }
        // R_x = Q[x, 1/x] (x) Q[y]; R_xy and R_{x^2-y^2} are Q[u, 1/u] (x) Q[v, 1/v] after a linear change.
        let laurent = [1, 1];
        let poly = [0, 1];
        let oracle: [(&str, Vec<usize>); 3] = [
            ("x", kunneth(&[laurent, poly])),
            ("x*y", kunneth(&[laurent, laurent])),
            ("x^2 - y^2", kunneth(&[laurent, laurent])),
        ];
        for (f, want_rf) in oracle {
            let rf = homological(&format!("R_f[{f}]"));
            let h1 = homological(&format!("H1_f[{f}]"));
            let mut want_h1 = want_rf.clone();
            want_h1[n] = 0;
            c.check(
                rf.as_ref() == Some(&want_rf) && rf.as_ref().map(|v| v[n]) == Some(1),
                format!("R_({f}): {rf:?}, oracle {want_rf:?}, h_n = 1"),
            );
            c.check(
                h1.as_ref() == Some(&want_h1) && h1.as_ref().map(|v| v[n]) == Some(0),
                format!("H^1_({f}): {h1:?}, bookkeeping {want_h1:?}, h_n = 0"),
            );
        }
    }
    c
}

fn selftest() -> Outcome {
    let mut c = Outcome::new();
    let start = Instant::now();
    let (code, out) = cli(&["selftest", "--json", "-"]);
    let took = start.elapsed();
    let v: serde_json::Value = serde_json::from_slice(&out).expect("selftest JSON");
    c.check(code == 0 && v["verdict"] == "pass", format!("exit {code}, verdict {}", v["verdict"]));
    let minimum = [
        ("euler-characteristic", 1),
        ("change-of-variables", 3 * 7),
        ("commuting-actions", 1),
        ("leibniz", 100),
        ("normal-ordering", 100),
        ("parse-roundtrip", 50),
        ("vanishing-bound", 1),
        ("two-step-koszul", 1),
    ];
    for (name, min) in minimum {
        let check = v["checks"].as_array().unwrap().iter().find(|x| x["name"] == name);
        let samples = check.and_then(|x| x["samples"].as_u64()).unwrap_or(0) as usize;
        let failures = check.and_then(|x| x["failures"].as_u64()).unwrap_or(1);
        c.check(samples >= min && failures == 0, format!("{name}: {samples} samples (need {min}), {failures} failures"));
    }
    c.check(took < Duration::from_secs(300), format!("runtime {took:.1?} (limit 5 min)"));
    c
}

fn determinism() -> Outcome {
    let mut c = Outcome::new();
    let runs: [&[&str]; 4] = [
        &["verify", "theorem1", "--vars", "x,y", "--ideal", "x^2-1", "--ideal", "y^2-1"],
        &["verify", "theorem2", "--vars", "x,y", "--ideal", "x^2+y^2", "--seed", "7"],
        &["verify", "theorem2", "--vars", "x,y,z", "--ideal", "x*y", "--ideal", "z", "--seed", "3"],
        &["verify", "blocks", "--n", "2"],
    ];
    for args in runs {
        let mut full = args.to_vec();
        full.extend_from_slice(&["--json", "-"]);
        let (c1, first) = cli(&full);
        let (c2, second) = cli(&full);
        c.check(
            c1 == 0 && c2 == 0 && !first.is_empty() && first == second,
            format!("{}: {} bytes, identical = {}", args[1..].join(" "), first.len(), first == second),
        );
    }
    c
}

fn main() {
    let cfg = HarnessConfig::default();
    let (c1, c4) = point_corpus(&cfg);
    let results = [
        ("1 zero-dimensional corpus", c1),
        ("2 projective point corpus", curve_corpus(&cfg)),
        ("3 building blocks", blocks(&cfg)),
        ("4 path agreement", c4),
        ("5 property suite", selftest()),
        ("6 determinism", determinism()),
    ];
    let mut all = true;
    for (name, out) in &results {
        for d in &out.detail {
            println!("{d}");
        }
        println!("criterion {name}: {}", if out.ok { "PASS" } else { "FAIL" });
        all &= out.ok;
    }
    if !all {
        std::process::exit(1);
    }
}
