//! Verification jobs: both computation paths, the expected
//! formulas, and structured reports.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::derham::{
    assembled_complexes, cech_derham_total, closed_form, koszul_two_step_check, stabilized_derham,
    window_koszul_complex, ClosedFormClass, DeRhamResult, Source, StabilizationConfig, WindowTrace,
};
use crate::dmod::{build_slice, comaximal_points, translate_point, CechSpec, ModuleKind, TruncationWindow};
use crate::error::{Error, Result};
use crate::ideal::{
    affine_point_count, groebner, projective_point_count, zero_dim_radical, Ideal, PointSet, StaircaseDim,
};
use crate::linalg::{alternating_sum, homology_dims, rat, rat_frac, rat_to_string, Rational, RationalMatrix};
use crate::poly::{default_var_names, AffineChange, Monomial, MonomialOrder, Polynomial};
use crate::weyl::{standard_partials, transform_operators, WeylElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    #[serde(rename = "inconclusive-no-stabilization")]
    Inconclusive,
}

impl Verdict {
    /// Combines verdicts: any failure fails, otherwise any inconclusive part
    /// makes the whole inconclusive.
    pub fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

/// Parameters shared by all verification jobs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HarnessConfig {
    pub stabilization: StabilizationConfig,
    pub seed: u64,
    pub retries: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self { stabilization: StabilizationConfig::default(), seed: 0, retries: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportInput {
    pub variables: Vec<String>,
    pub generators: Vec<String>,
    /// Generators the Čech complex was built on.
    pub working_generators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpectedDims {
    pub formula: String,
    /// `H^0..H^n`; `null` where the formula says nothing.
    pub cohomological: Vec<Option<usize>>,
    pub point_count: Option<usize>,
    /// Rational points, as `p/q` strings.
    pub points: Option<Vec<Vec<String>>>,
    /// Matrix of the accepted random change of variables, as `p/q` strings.
    pub change: Option<Vec<Vec<String>>>,
    pub change_attempts: Option<usize>,
}

impl ExpectedDims {
    fn formula(formula: impl Into<String>, cohomological: Vec<Option<usize>>) -> Self {
        Self {
            formula: formula.into(),
            cohomological,
            point_count: None,
            points: None,
            change: None,
            change_attempts: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathStatus {
    Stabilized,
    NoStabilization,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComputedDims {
    pub status: PathStatus,
    pub cohomological: Option<Vec<usize>>,
    pub homological: Option<Vec<usize>>,
    pub support_dim: Option<usize>,
    /// `H^i = 0` for `i < n - support_dim`.
    pub vanishing_bound: Option<bool>,
    pub note: Option<String>,
}

impl ComputedDims {
    fn from_result(res: &DeRhamResult, support_dim: usize) -> Self {
        Self {
            status: PathStatus::Stabilized,
            cohomological: Some(res.cohomological_dims.clone()),
            homological: Some(res.homological_dims.clone()),
            support_dim: Some(support_dim),
            vanishing_bound: Some(check_theorem3_bound(res, support_dim)),
            note: None,
        }
    }

    fn unstable(note: String) -> Self {
        Self {
            status: PathStatus::NoStabilization,
            cohomological: None,
            homological: None,
            support_dim: None,
            vanishing_bound: None,
            note: Some(note),
        }
    }

    fn not_applicable(note: impl Into<String>) -> Self {
        Self {
            status: PathStatus::NotApplicable,
            cohomological: None,
            homological: None,
            support_dim: None,
            vanishing_bound: None,
            note: Some(note.into()),
        }
    }

    /// Pass, fail or inconclusive against an expected vector.
    fn judge(&self, expected: &[Option<usize>]) -> Verdict {
        match (&self.status, &self.cohomological) {
            (PathStatus::Stabilized, Some(got)) => {
                let matches = got.len() == expected.len()
                    && got.iter().zip(expected).all(|(g, e)| e.is_none_or(|e| e == *g));
                if matches && self.vanishing_bound != Some(false) {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                }
            }
            (PathStatus::NoStabilization, _) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowRecord {
    pub path: String,
    pub k_cap: u32,
    pub span: i64,
    pub settled: bool,
    pub total_dims: Vec<usize>,
}

fn records(path: &str, trace: &[WindowTrace]) -> Vec<WindowRecord> {
    trace
        .iter()
        .map(|t| WindowRecord {
            path: path.to_string(),
            k_cap: t.k_cap,
            span: t.span,
            settled: t.span_settled,
            total_dims: t.dims.clone(),
        })
        .collect()
}

/// A verification outcome. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub input: ReportInput,
    pub expected: BTreeMap<String, ExpectedDims>,
    pub computed: BTreeMap<String, ComputedDims>,
    pub windows: Vec<WindowRecord>,
    pub seed: u64,
    pub verdict: Verdict,
    /// Filled only on request; left out of reproducible reports.
    pub wall_time_ms: Option<u64>,
}

/// `true` iff `H^i = 0` for every `i < n - support_dim`.
pub fn check_theorem3_bound(result: &DeRhamResult, support_dim: usize) -> bool {
    let n = result.n();
    let limit = n.saturating_sub(support_dim);
    result.cohomological_dims.iter().take(limit).all(|&d| d == 0)
}

fn names_for(n: usize, names: Option<&[String]>) -> Vec<String> {
    names.map(<[String]>::to_vec).unwrap_or_else(|| default_var_names(n))
}

fn show(polys: &[Polynomial], names: &[String]) -> Vec<String> {
    polys.iter().map(|p| p.to_string_with(names)).collect()
}

fn run_path(
    path: &str,
    res: Result<DeRhamResult>,
    support_dim: usize,
    windows: &mut Vec<WindowRecord>,
) -> Result<ComputedDims> {
    match res {
        Ok(r) => {
            windows.extend(records(path, &r.window_trace));
            Ok(ComputedDims::from_result(&r, support_dim))
        }
        Err(Error::NoStabilization { trace }) => {
            windows.extend(records(path, &trace));
            Ok(ComputedDims::unstable("cap budget exhausted".into()))
        }
        Err(e) => Err(e),
    }
}

/// Top De Rham cohomology of `H^n_I(R)` for a zero-dimensional `I` against
/// the number of points of `V(I)` over the algebraic closure.
pub fn verify_theorem1(ideal: &Ideal, names: Option<&[String]>, config: &HarnessConfig) -> Result<VerificationReport> {
    let n = ideal.ambient();
    let names = names_for(n, names);
    let gb = groebner(ideal, &MonomialOrder::degrevlex(n));
    if gb.is_unit() {
        return Err(Error::UnitIdeal);
    }
    if !matches!(gb.staircase_dim(), StaircaseDim::Finite(d) if d > 0) {
        return Err(Error::NotZeroDimensional);
    }
    let points_total = affine_point_count(ideal)?;
    let radical = zero_dim_radical(ideal)?;
    let mut expected_vec = vec![Some(0); n + 1];
    expected_vec[n] = Some(points_total);
    let mut expected = ExpectedDims::formula("H^n = #V(I), H^i = 0 for i < n", expected_vec.clone());
    expected.point_count = Some(points_total);

    let ops = standard_partials(n);
    let mut windows = Vec::new();
    let spec = CechSpec::new(radical.generators().to_vec())?;
    let path_b = run_path("path_b", cech_derham_total(&spec, n, &ops, &config.stabilization), 0, &mut windows)?;

    let path_a = match comaximal_points(ideal)? {
        PointSet::Rational(points) => {
            expected.points = Some(points.iter().map(|p| p.iter().map(rat_to_string).collect()).collect());
            path_a_sum(n, &points, config, &mut windows)?
        }
        PointSet::NotRational => ComputedDims::not_applicable("V(I) has non-rational points"),
    };

    let mut verdict = path_b.judge(&expected_vec).combine(path_a.judge(&expected_vec));
    if let (Some(a), Some(b)) = (&path_a.cohomological, &path_b.cohomological) {
        if a != b {
            verdict = Verdict::Fail;
        }
    }
    Ok(VerificationReport {
        theorem: "theorem1".into(),
        input: ReportInput {
            variables: names.clone(),
            generators: show(ideal.generators(), &names),
            working_generators: show(radical.generators(), &names),
        },
        expected: BTreeMap::from([("cohomology".to_string(), expected)]),
        computed: BTreeMap::from([("path_a".to_string(), path_a), ("path_b".to_string(), path_b)]),
        windows,
        seed: config.seed,
        verdict,
        wall_time_ms: None,
    })
}

/// Sum over the points of the De Rham cohomology of `E` at each point, each
/// computed with the operators of the translated coordinates.
fn path_a_sum(
    n: usize,
    points: &[Vec<Rational>],
    config: &HarnessConfig,
    windows: &mut Vec<WindowRecord>,
) -> Result<ComputedDims> {
    let mut total = vec![0usize; n + 1];
    for (idx, p) in points.iter().enumerate() {
        let ops = transform_operators(&translate_point(p));
        let label = format!("path_a[{idx}]");
        match stabilized_derham(&ModuleKind::InjectiveHull, n, &ops, &config.stabilization) {
            Ok(r) => {
                windows.extend(records(&label, &r.window_trace));
                for (t, d) in total.iter_mut().zip(&r.cohomological_dims) {
                    *t += d;
                }
            }
            Err(Error::NoStabilization { trace }) => {
                windows.extend(records(&label, &trace));
                return Ok(ComputedDims::unstable(format!("point {idx} did not stabilize")));
            }
            Err(e) => return Err(e),
        }
    }
    let homological = total.iter().rev().copied().collect();
    let holds = total.iter().take(n).all(|&d| d == 0);
    Ok(ComputedDims {
        status: PathStatus::Stabilized,
        cohomological: Some(total),
        homological: Some(homological),
        support_dim: Some(0),
        vanishing_bound: Some(holds),
        note: None,
    })
}

/// De Rham cohomology of `H^{n-1}_I(R)` for a homogeneous ideal of height
/// `n - 1` against the projective point count `r`.
pub fn verify_theorem2(ideal: &Ideal, names: Option<&[String]>, config: &HarnessConfig) -> Result<VerificationReport> {
    let n = ideal.ambient();
    let names = names_for(n, names);
    if !ideal.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    if n < 2 {
        return Err(Error::WrongHeight { expected: 1, found: 0 });
    }
    let gb = groebner(ideal, &MonomialOrder::degrevlex(n));
    if gb.is_unit() {
        return Err(Error::UnitIdeal);
    }
    let dim = gb.krull_dim()?;
    if dim != 1 {
        return Err(Error::WrongHeight { expected: 1, found: dim });
    }
    let count = projective_point_count(ideal, config.seed, config.retries)?;
    let r = count.count;
    let mut expected_vec = vec![Some(0); n + 1];
    expected_vec[n - 1] = Some(r);
    expected_vec[n] = Some(r.saturating_sub(1));
    let mut expected =
        ExpectedDims::formula("H^{n-1} = r, H^n = r - 1, H^i = 0 for i <= n - 2", expected_vec.clone());
    expected.point_count = Some(r);
    expected.change = Some(count.change.matrix().to_dense().iter().map(|row| row.iter().map(rat_to_string).collect()).collect());
    expected.change_attempts = Some(count.attempts);

    let working = gb.basis().to_vec();
    let spec = CechSpec::new(working.clone())?;
    let mut windows = Vec::new();
    let path_b = run_path(
        "path_b",
        cech_derham_total(&spec, n - 1, &standard_partials(n), &config.stabilization),
        dim,
        &mut windows,
    )?;
    let path_a = ComputedDims::not_applicable("no point decomposition for this class");
    let verdict = path_b.judge(&expected_vec);
    Ok(VerificationReport {
        theorem: "theorem2".into(),
        input: ReportInput {
            variables: names.clone(),
            generators: show(ideal.generators(), &names),
            working_generators: show(&working, &names),
        },
        expected: BTreeMap::from([("cohomology".to_string(), expected)]),
        computed: BTreeMap::from([("path_a".to_string(), path_a), ("path_b".to_string(), path_b)]),
        windows,
        seed: config.seed,
        verdict,
        wall_time_ms: None,
    })
}

/// The default squarefree polynomials for the localization bookkeeping:
/// `x`, `x*y` and `x^2 - y^2` (only `x` when `n = 1`).
pub fn default_block_polynomials(n: usize) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::var(n, 0)];
    if n >= 2 {
        let x = Polynomial::var(n, 0);
        let y = Polynomial::var(n, 1);
        out.push(&x * &y);
        out.push(&x.pow(2) - &y.pow(2));
    }
    out
}

fn cohomological_of(homological: Vec<Option<usize>>) -> Vec<Option<usize>> {
    homological.into_iter().rev().collect()
}

/// Stabilized dims of the building blocks against their closed forms, and the
/// exact-sequence bookkeeping between `R_f` and `H^1_(f)(R)`.
pub fn verify_building_blocks(
    n: usize,
    fs: &[Polynomial],
    names: Option<&[String]>,
    config: &HarnessConfig,
) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::InvalidConfig("building blocks need n >= 1".into()));
    }
    let names = names_for(n, names);
    let ops = standard_partials(n);
    let mut expected = BTreeMap::new();
    let mut computed = BTreeMap::new();
    let mut windows = Vec::new();
    let mut verdict = Verdict::Pass;

    let mut classes = vec![
        (ClosedFormClass::InjectiveHull, ModuleKind::InjectiveHull, 0),
        (ClosedFormClass::Polynomial, ModuleKind::Polynomial, n),
    ];
    if n >= 2 {
        classes.push((ClosedFormClass::ExtendedHull, ModuleKind::ExtendedHull, 1));
    }
    for (class, kind, support) in classes {
        let want = cohomological_of(closed_form(class, n)?);
        let label = class.name().to_string();
        let got = run_path(&label, stabilized_derham(&kind, n, &ops, &config.stabilization), support, &mut windows)?;
        verdict = verdict.combine(got.judge(&want));
        expected.insert(label.clone(), ExpectedDims::formula(closed_form_text(class), want));
        computed.insert(label, got);
    }

    for f in fs {
        if f.ambient() != n {
            return Err(Error::AmbientMismatch { left: n, right: f.ambient() });
        }
        let text = f.to_string_with(&names);
        let rf_label = format!("R_f[{text}]");
        let h1_label = format!("H1_f[{text}]");
        let rf_want = cohomological_of(closed_form(ClosedFormClass::Localized, n)?);
        let rf = run_path(
            &rf_label,
            stabilized_derham(&ModuleKind::Localized(f.clone()), n, &ops, &config.stabilization),
            n,
            &mut windows,
        )?;
        let spec = CechSpec::new(vec![f.clone()])?;
        let h1 = run_path(&h1_label, cech_derham_total(&spec, 1, &ops, &config.stabilization), n - 1, &mut windows)?;
        // h_i(H^1_(f)) = h_i(R_f) for i < n and h_n(H^1_(f)) = 0; cohomologically H^0 = 0.
        let h1_want: Vec<Option<usize>> = match &rf.cohomological {
            Some(c) => (0..=n).map(|i| if i == 0 { Some(0) } else { Some(c[i]) }).collect(),
            None => (0..=n).map(|i| if i == 0 { Some(0) } else { None }).collect(),
        };
        verdict = verdict.combine(rf.judge(&rf_want)).combine(h1.judge(&h1_want));
        expected.insert(rf_label.clone(), ExpectedDims::formula("h_n(R_f) = 1", rf_want));
        expected.insert(
            h1_label.clone(),
            ExpectedDims::formula("h_i(H^1_(f)) = h_i(R_f) for i < n, h_n(H^1_(f)) = 0", h1_want),
        );
        computed.insert(rf_label, rf);
        computed.insert(h1_label, h1);
    }

    Ok(VerificationReport {
        theorem: "blocks".into(),
        input: ReportInput { variables: names.clone(), generators: show(fs, &names), working_generators: show(fs, &names) },
        expected,
        computed,
        windows,
        seed: config.seed,
        verdict,
        wall_time_ms: None,
    })
}

fn closed_form_text(class: ClosedFormClass) -> &'static str {
    match class {
        ClosedFormClass::InjectiveHull => "h_0(E) = 1, h_i(E) = 0 for i > 0",
        ClosedFormClass::Polynomial => "h_n(R) = 1, h_i(R) = 0 for i < n",
        ClosedFormClass::ExtendedHull => "h_1(H^{n-1}_P(R)) = 1, all other h_i = 0",
        ClosedFormClass::Localized => "h_n(R_f) = 1",
    }
}

/// One property family of the self-test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    pub detail: Vec<String>,
}

impl PropertyCheck {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), samples: 0, failures: 0, detail: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.failures += 1;
            if self.detail.len() < 5 {
                self.detail.push(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.samples > 0
    }
}

/// Random polynomial with at most `terms` terms of degree at most `deg` and
/// small rational coefficients.
pub fn random_polynomial(rng: &mut ChaCha8Rng, n: usize, deg: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(n);
    for _ in 0..terms {
        let mut e = vec![0u32; n];
        let mut budget = rng.gen_range(0..=deg);
        while budget > 0 {
            e[rng.gen_range(0..n)] += 1;
            budget -= 1;
        }
        let c = rat_frac(rng.gen_range(-6..=6), rng.gen_range(1..=3));
        p.add_term(Monomial(e), c);
    }
    p
}

fn random_weyl(rng: &mut ChaCha8Rng, n: usize) -> WeylElement {
    let mut w = WeylElement::zero(n);
    for _ in 0..3 {
        let a: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        let b: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        w.add_term(a, b, rat(rng.gen_range(-4..=4)));
    }
    w
}

/// A random invertible change of variables with small integer entries.
pub fn random_change(rng: &mut ChaCha8Rng, n: usize) -> AffineChange {
    loop {
        let rows: Vec<Vec<Rational>> = (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-3..=3))).collect()).collect();
        let shift: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-3..=3))).collect();
        let m = RationalMatrix::from_dense(&rows).expect("square");
        if let Ok(t) = AffineChange::new(m, shift) {
            if t.matrix() != &RationalMatrix::identity(n) {
                return t;
            }
        }
    }
}

/// Runs the algebraic property corpus. `samples` is the number of random
/// instances per identity; `changes` the number of random coordinate changes
/// per module class.
pub fn property_corpus(config: &HarnessConfig, samples: usize, changes: usize) -> Result<Vec<PropertyCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::new();

    let mut leibniz = PropertyCheck::new("leibniz");
    for _ in 0..samples {
        let n = rng.gen_range(1..=3);
        let f = random_polynomial(&mut rng, n, 4, 4);
        let g = random_polynomial(&mut rng, n, 4, 4);
        let i = rng.gen_range(0..n);
        let lhs = (&f * &g).partial_derivative(i)?;
        let rhs = &(&f.partial_derivative(i)? * &g) + &(&f * &g.partial_derivative(i)?);
        leibniz.record(lhs == rhs, || format!("f = {f}, g = {g}, i = {i}"));
    }
    out.push(leibniz);

    let mut ordering = PropertyCheck::new("normal-ordering");
    for _ in 0..samples {
        let n = rng.gen_range(1..=2);
        let a = random_weyl(&mut rng, n);
        let b = random_weyl(&mut rng, n);
        let p = random_polynomial(&mut rng, n, 5, 4);
        let lhs = a.mul(&b)?.apply(&p)?;
        let rhs = a.apply(&b.apply(&p)?)?;
        ordering.record(lhs == rhs, || format!("a = {a}, b = {b}, p = {p}"));
    }
    out.push(ordering);

    let mut commutation = PropertyCheck::new("commuting-actions");
    for n in 1..=3usize {
        let kinds = module_classes(n);
        for (label, kind) in &kinds {
            for ops in [standard_partials(n), transform_operators(&random_change(&mut rng, n))] {
                let coeffs: Vec<Vec<Rational>> =
                    ops.iter().map(WeylElement::as_constant_first_order).collect::<Result<_>>()?;
                for hi in [0i64, 2] {
                    let lo = if matches!(kind, ModuleKind::InjectiveHull | ModuleKind::ExtendedHull) { -4 - n as i64 } else { hi - 3 };
                    let w = TruncationWindow::new(lo, hi, 3)?;
                    let first = build_slice(kind, n, &coeffs, &w)?;
                    let second = build_slice(kind, n, &coeffs, &w.advanced())?;
                    for i in 0..n {
                        for j in 0..n {
                            let ij = second.actions[i].mul(&first.actions[j])?;
                            let ji = second.actions[j].mul(&first.actions[i])?;
                            commutation.record(ij == ji, || format!("{label} n={n} ops {i},{j} window {w:?}"));
                        }
                    }
                }
            }
        }
    }
    out.push(commutation);

    let mut euler = PropertyCheck::new("euler-characteristic");
    for n in 1..=2usize {
        for (label, kind) in module_classes(n) {
            let w = TruncationWindow::new(-4, 3, 3)?;
            let c = window_koszul_complex(&kind, n, &standard_partials(n), &w)?;
            let h = homology_dims(&c)?;
            euler.record(alternating_sum(&h) == c.euler_characteristic(), || format!("{label} window"));
            for c in assembled_complexes(Source::Module(&kind, n), &standard_partials(n), 4, 2)? {
                let h = homology_dims(&c)?;
                euler.record(alternating_sum(&h) == c.euler_characteristic(), || format!("{label} strand"));
            }
        }
    }
    for gens in [vec![Polynomial::var(2, 0), Polynomial::var(2, 1)], vec![&Polynomial::var(2, 0) * &Polynomial::var(2, 1)]] {
        let spec = CechSpec::new(gens)?;
        for c in assembled_complexes(Source::Cech(&spec), &standard_partials(2), 4, 2)? {
            let h = homology_dims(&c)?;
            euler.record(alternating_sum(&h) == c.euler_characteristic(), || "cech strand".into());
        }
    }
    out.push(euler);

    let mut invariance = PropertyCheck::new("change-of-variables");
    let mut bound = PropertyCheck::new("vanishing-bound");
    for n in 1..=2usize {
        for (label, kind) in module_classes(n) {
            let support = support_dim(&kind, n);
            let base = stabilized_derham(&kind, n, &standard_partials(n), &config.stabilization)?;
            bound.record(check_theorem3_bound(&base, support), || format!("{label} n={n}"));
            for _ in 0..changes {
                let t = random_change(&mut rng, n);
                let moved = stabilized_derham(&kind, n, &transform_operators(&t), &config.stabilization)?;
                bound.record(check_theorem3_bound(&moved, support), || format!("{label} n={n} moved"));
                invariance.record(moved.homological_dims == base.homological_dims, || {
                    format!("{label} n={n}: {:?} vs {:?} under {:?}", moved.homological_dims, base.homological_dims, t.matrix())
                });
            }
        }
    }
    out.push(invariance);

    let mut two_step = PropertyCheck::new("two-step-koszul");
    for n in 1..=2usize {
        for (label, kind) in module_classes(n) {
            let rep = koszul_two_step_check(&kind, n, &standard_partials(n), &config.stabilization)?;
            two_step.record(rep.agrees, || format!("{label} n={n}: {rep:?}"));
        }
    }
    out.push(two_step);
    out.push(bound);
    Ok(out)
}

fn module_classes(n: usize) -> Vec<(String, ModuleKind)> {
    let mut v = vec![
        ("E".to_string(), ModuleKind::InjectiveHull),
        ("R".to_string(), ModuleKind::Polynomial),
    ];
    if n >= 2 {
        v.push(("HP".to_string(), ModuleKind::ExtendedHull));
        let xy = &Polynomial::var(n, 0) * &Polynomial::var(n, 1);
        v.push(("Rf[xy]".to_string(), ModuleKind::Localized(xy)));
    } else {
        v.push(("Rf[x]".to_string(), ModuleKind::Localized(Polynomial::var(n, 0))));
    }
    v
}

/// Dimension of the support of a covered module.
pub fn support_dim(kind: &ModuleKind, n: usize) -> usize {
    match kind {
        ModuleKind::InjectiveHull => 0,
        ModuleKind::ExtendedHull => 1,
        ModuleKind::Polynomial | ModuleKind::Localized(_) => n,
    }
}
