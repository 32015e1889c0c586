//! Explicit D-module representations and their finite truncations.
//!
//! Every module handled here is a direct sum of pieces of three shapes:
//!
//! * a localization `R_g` (with `g = 1` giving `R`), whose elements in a
//!   truncation with denominator cap `k` are written `a / g^k`;
//! * the injective hull `E` of `R/(X_1..X_n)`, with basis the inverse
//!   monomials `1 / (X_1 .. X_n X^r)`;
//! * `E_{n-1}[X_n]`, with basis `X_n^j / (X_1 .. X_{n-1} X'^r)`.
//!
//! Grading conventions: `deg(a / g^k) = deg a - k deg g`, the inverse
//! monomial `r` has degree `-n - |r|`, and `X_n^j / (X_1..X_{n-1} X'^r)` has
//! degree `j - (n - 1) - |r|`. Every partial derivative is homogeneous of
//! degree `-1`.
//!
//! Čech differentials use the sign `(-1)^s`, where `s` counts the indices of
//! the source subset that are smaller than the index being added.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::{rational_points, Ideal, PointSet};
use crate::linalg::{rat, Rational, RationalMatrix};
use crate::poly::{AffineChange, Monomial, Polynomial};

/// `numerator / f^k` for an ambient `f`, kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionElement {
    numerator: Polynomial,
    k: u32,
}

impl FractionElement {
    pub fn new(numerator: Polynomial, k: u32, f: &Polynomial) -> Result<Self> {
        Self { numerator, k }.normalize(f)
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.k
    }

    /// Cancels common factors of `f` until the numerator is not divisible by `f`.
    pub fn normalize(mut self, f: &Polynomial) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if self.numerator.is_zero() {
            self.k = 0;
            return Ok(self);
        }
        while self.k > 0 {
            match self.numerator.divide_exact(f)? {
                Some(q) => {
                    self.numerator = q;
                    self.k -= 1;
                }
                None => break,
            }
        }
        Ok(self)
    }
}

/// Quotient rule `∂_i(a/f^k) = (∂_i(a) f - k a ∂_i(f)) / f^(k+1)`, renormalized.
pub fn localized_partial(i: usize, x: &FractionElement, f: &Polynomial) -> Result<FractionElement> {
    let a = &x.numerator;
    let num = &(&a.partial_derivative(i)? * f) - &(&f.partial_derivative(i)? * a).scale(&rat(x.k as i64));
    FractionElement::new(num, x.k + 1, f)
}

/// `1 / (X_1 .. X_n X_1^{r_1} .. X_n^{r_n})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InverseMonomial(pub Vec<u32>);

/// Actions of `X_i` and `∂_i` on an inverse monomial.
pub fn e_module_actions(
    i: usize,
    b: &InverseMonomial,
) -> (Vec<(InverseMonomial, Rational)>, Vec<(InverseMonomial, Rational)>) {
    let r = &b.0;
    let x_action = if r[i] >= 1 {
        let mut s = r.clone();
        s[i] -= 1;
        vec![(InverseMonomial(s), Rational::one())]
    } else {
        vec![]
    };
    let mut s = r.clone();
    s[i] += 1;
    let d_action = vec![(InverseMonomial(s), rat(-(r[i] as i64) - 1))];
    (x_action, d_action)
}

/// Basis element `X_n^j / (X_1 .. X_{n-1} X'^r)` of `E_{n-1}[X_n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtendedHullElement {
    pub r: Vec<u32>,
    pub j: u32,
}

/// `∂_i` on `E_{n-1}[X_n]`; `i = n - 1` differentiates the `X_n` power.
pub fn epoly_module_actions(i: usize, b: &ExtendedHullElement) -> Vec<(ExtendedHullElement, Rational)> {
    let last = b.r.len();
    if i == last {
        if b.j == 0 {
            vec![]
        } else {
            vec![(ExtendedHullElement { r: b.r.clone(), j: b.j - 1 }, rat(b.j as i64))]
        }
    } else {
        let mut r = b.r.clone();
        r[i] += 1;
        vec![(ExtendedHullElement { r, j: b.j }, rat(-(b.r[i] as i64) - 1))]
    }
}

/// The translation `U_i = X_i - a_i` carrying the point to the origin.
pub fn translate_point(point: &[Rational]) -> AffineChange {
    AffineChange::translation(point.iter().map(|a| -a.clone()).collect())
}

/// Points of `V(I)` when all of them are rational.
pub fn comaximal_points(ideal: &Ideal) -> Result<PointSet> {
    rational_points(ideal)
}

/// The modules with explicit action evaluators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleKind {
    /// `R = Q[X_1..X_n]`.
    Polynomial,
    /// `R_f`.
    Localized(Polynomial),
    /// `E`, the top local cohomology at the origin.
    InjectiveHull,
    /// `E_{n-1}[X_n] = H^{n-1}_{(X_1..X_{n-1})}(R)`.
    ExtendedHull,
}

impl ModuleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModuleKind::Polynomial => "R",
            ModuleKind::Localized(_) => "Rf",
            ModuleKind::InjectiveHull => "E",
            ModuleKind::ExtendedHull => "HP",
        }
    }
}

/// Generators of a Čech complex; position `p` is the sum over `p`-subsets `S`
/// of `R_{g_S}` with `g_S` the product of the chosen generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CechSpec {
    generators: Vec<Polynomial>,
}

impl CechSpec {
    pub fn new(generators: Vec<Polynomial>) -> Result<Self> {
        let n = generators.first().map(Polynomial::ambient).ok_or(Error::EmptyIdeal)?;
        for g in &generators {
            if g.is_zero() {
                return Err(Error::ZeroDivisor);
            }
            if g.ambient() != n {
                return Err(Error::AmbientMismatch { left: n, right: g.ambient() });
            }
        }
        Ok(Self { generators })
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn ambient(&self) -> usize {
        self.generators[0].ambient()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Subsets of size `p`, lexicographically ordered.
    pub fn subsets(&self, p: usize) -> Vec<Vec<usize>> {
        subsets(self.generators.len(), p)
    }

    pub fn product(&self, subset: &[usize]) -> Polynomial {
        subset
            .iter()
            .fold(Polynomial::one(self.ambient()), |acc, &i| &acc * &self.generators[i])
    }
}

pub(crate) fn subsets(s: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, s: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..s {
            cur.push(i);
            rec(i + 1, s, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, s, p, &mut Vec::new(), &mut out);
    out
}

/// Sign for inserting `idx` into the sorted `subset`.
pub(crate) fn insertion_sign(subset: &[usize], idx: usize) -> i64 {
    if subset.iter().filter(|&&s| s < idx).count() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Finite truncation parameters.
///
/// For graded data, `degree_lo..=degree_hi` bounds the internal degree. For
/// inhomogeneous localizations only the upper bound is used (it bounds the
/// filtration `deg a - k deg g`). `k_cap` bounds the denominator exponent of
/// localizations and `|r|` for `E_{n-1}[X_n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TruncationWindow {
    pub degree_lo: i64,
    pub degree_hi: i64,
    pub k_cap: u32,
}

impl TruncationWindow {
    pub fn new(degree_lo: i64, degree_hi: i64, k_cap: u32) -> Result<Self> {
        if degree_lo > degree_hi {
            return Err(Error::InvalidConfig(format!("empty degree range {degree_lo}..{degree_hi}")));
        }
        Ok(Self { degree_lo, degree_hi, k_cap })
    }

    /// Largest numerator degree admitted for `a / g^k_cap`.
    pub fn numerator_degree_cap(&self, g_degree: u32) -> i64 {
        self.degree_hi + self.k_cap as i64 * g_degree as i64
    }

    /// The window reached by one partial derivative.
    pub fn advanced(&self) -> Self {
        Self { degree_lo: self.degree_lo - 1, degree_hi: self.degree_hi - 1, k_cap: self.k_cap + 1 }
    }
}

/// Basis label; its meaning depends on the piece it belongs to:
/// a numerator monomial over `g^k`, an inverse-monomial exponent `r`, or
/// `(r, j)` for `E_{n-1}[X_n]` (with `j` in the last slot).
pub type Label = Vec<u32>;

/// Degree constraint for one piece of a truncated module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DegreeConstraint {
    /// `(variable, exact X_j-degree of the element)`.
    pub coords: Vec<(usize, i64)>,
    /// `(variable, upper bound on the X_j-filtration deg_j(a) - k deg_j(g))`.
    pub upper: Vec<(usize, i64)>,
    pub total: TotalBound,
    pub cap: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TotalBound {
    Exact(i64),
    Between(i64, i64),
    AtMost(i64),
    /// No total bound; every free variable must carry an upper bound.
    Any,
}

/// One summand of a truncated module, with its action evaluators.
#[derive(Debug, Clone)]
pub(crate) enum Piece {
    Loc { g: Polynomial, dg: Vec<Polynomial>, deg: u32 },
    Hull { n: usize },
    HullPoly { n: usize },
}

fn enumerate_monomials(n: usize, fixed: &[Option<u32>], lo: i64, hi: i64) -> Vec<Label> {
    enumerate_capped(n, fixed, &vec![None; n], lo, hi)
}

/// Exponent vectors with the given fixed entries, per-variable maxima and
/// total degree in `lo..=hi`.
fn enumerate_capped(n: usize, fixed: &[Option<u32>], maxes: &[Option<i64>], lo: i64, hi: i64) -> Vec<Label> {
    let fixed_sum: i64 = fixed.iter().flatten().map(|&v| v as i64).sum();
    let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    let lo = (lo - fixed_sum).max(0);
    let hi = hi - fixed_sum;
    let mut out = Vec::new();
    if hi < lo || free.iter().any(|&v| maxes[v].is_some_and(|m| m < 0)) {
        return out;
    }
    if free.is_empty() {
        if lo == 0 {
            out.push(fixed.iter().map(|v| v.unwrap_or(0)).collect());
        }
        return out;
    }
    let mut cur: Vec<u32> = fixed.iter().map(|v| v.unwrap_or(0)).collect();
    struct Ctx<'a> {
        free: &'a [usize],
        maxes: &'a [Option<i64>],
    }
    fn rec(cx: &Ctx, pos: usize, remaining_lo: i64, remaining_hi: i64, cur: &mut Vec<u32>, out: &mut Vec<Label>) {
        let var = cx.free[pos];
        let top = cx.maxes[var].map_or(remaining_hi, |m| m.min(remaining_hi));
        if pos + 1 == cx.free.len() {
            for e in remaining_lo.max(0)..=top {
                cur[var] = e as u32;
                out.push(cur.clone());
            }
            cur[var] = 0;
            return;
        }
        for e in 0..=top {
            cur[var] = e as u32;
            rec(cx, pos + 1, remaining_lo - e, remaining_hi - e, cur, out);
        }
        cur[var] = 0;
    }
    rec(&Ctx { free: &free, maxes }, 0, lo, hi, &mut cur, &mut out);
    out
}

fn enumerate_bounded(len: usize, fixed: &[Option<u32>], max_sum: i64) -> Vec<Label> {
    enumerate_monomials(len, fixed, 0, max_sum)
}

impl Piece {
    pub fn polynomial(n: usize) -> Self {
        Self::localized(Polynomial::one(n))
    }

    pub fn localized(g: Polynomial) -> Self {
        let dg = (0..g.ambient()).map(|i| g.partial_derivative(i).expect("in range")).collect();
        let deg = g.degree().finite().expect("nonzero denominator");
        Piece::Loc { g, dg, deg }
    }

    pub fn from_kind(kind: &ModuleKind, n: usize) -> Self {
        match kind {
            ModuleKind::Polynomial => Self::polynomial(n),
            ModuleKind::Localized(f) => Self::localized(f.clone()),
            ModuleKind::InjectiveHull => Piece::Hull { n },
            ModuleKind::ExtendedHull => Piece::HullPoly { n },
        }
    }

    /// Polynomial data that must be homogeneous for a grading to apply.
    pub fn data(&self) -> Option<&Polynomial> {
        match self {
            Piece::Loc { g, .. } => Some(g),
            _ => None,
        }
    }

    /// All labels satisfying the constraint, in a deterministic order.
    pub fn basis(&self, c: &DegreeConstraint) -> Vec<Label> {
        match self {
            Piece::Loc { g, deg, .. } => {
                let n = g.ambient();
                let k = c.cap as i64;
                let mut fixed = vec![None; n];
                for &(j, v) in &c.coords {
                    let gj = g.degree_in(j).finite().unwrap_or(0) as i64;
                    let e = v + k * gj;
                    if e < 0 {
                        return vec![];
                    }
                    fixed[j] = Some(e as u32);
                }
                let mut maxes = vec![None; n];
                for &(j, b) in &c.upper {
                    let gj = g.degree_in(j).finite().unwrap_or(0) as i64;
                    maxes[j] = Some(b + k * gj);
                }
                let shift = k * *deg as i64;
                let (lo, hi) = match c.total {
                    TotalBound::Exact(d) => (d + shift, d + shift),
                    TotalBound::Between(a, b) => (a + shift, b + shift),
                    TotalBound::AtMost(b) => (0, b + shift),
                    TotalBound::Any => {
                        let fixed_sum: i64 = fixed.iter().flatten().map(|&v| v as i64).sum();
                        let caps: Option<i64> =
                            (0..n).filter(|&j| fixed[j].is_none()).map(|j| maxes[j].map(|m| m.max(0))).sum();
                        (0, fixed_sum + caps.expect("every free variable bounded"))
                    }
                };
                enumerate_capped(n, &fixed, &maxes, lo, hi)
            }
            Piece::Hull { n } => {
                let n = *n;
                let mut fixed = vec![None; n];
                for &(j, v) in &c.coords {
                    let r = -v - 1;
                    if r < 0 {
                        return vec![];
                    }
                    fixed[j] = Some(r as u32);
                }
                let base = n as i64;
                let (lo, hi) = match c.total {
                    TotalBound::Exact(d) => (-d - base, -d - base),
                    TotalBound::Between(a, b) => (-b - base, -a - base),
                    TotalBound::AtMost(b) => (-b - base, c.cap as i64),
                    TotalBound::Any => (0, c.cap as i64),
                };
                enumerate_monomials(n, &fixed, lo, hi)
            }
            Piece::HullPoly { n } => {
                let n = *n;
                let m = n - 1;
                let mut fixed = vec![None; m];
                let mut j_fixed: Option<i64> = None;
                for &(var, v) in &c.coords {
                    if var == m {
                        if v < 0 {
                            return vec![];
                        }
                        j_fixed = Some(v);
                    } else {
                        let r = -v - 1;
                        if r < 0 {
                            return vec![];
                        }
                        fixed[var] = Some(r as u32);
                    }
                }
                let mut out = Vec::new();
                for r in enumerate_bounded(m, &fixed, c.cap as i64) {
                    let rs: i64 = r.iter().map(|&e| e as i64).sum();
                    // element degree = j - m - |r|
                    let (jlo, jhi) = match c.total {
                        TotalBound::Exact(d) => (d + m as i64 + rs, d + m as i64 + rs),
                        TotalBound::Between(a, b) => (a + m as i64 + rs, b + m as i64 + rs),
                        TotalBound::AtMost(b) => (0, b + m as i64 + rs),
                        TotalBound::Any => (0, c.cap as i64 + m as i64 + rs),
                    };
                    let (jlo, jhi) = match j_fixed {
                        Some(j) => (jlo.max(j), jhi.min(j)),
                        None => (jlo.max(0), jhi),
                    };
                    for j in jlo.max(0)..=jhi {
                        let mut label = r.clone();
                        label.push(j as u32);
                        out.push(label);
                    }
                }
                out
            }
        }
    }

    /// `sum_j coeffs[j] ∂_j` applied to the basis element `label` of the cap-`k` truncation.
    pub fn apply_operator(&self, coeffs: &[Rational], label: &Label, k: u32) -> Vec<(Label, Rational)> {
        match self {
            Piece::Loc { g, dg, .. } => {
                let n = g.ambient();
                let m = Polynomial::term(Monomial(label.clone()), Rational::one());
                let mut num = Polynomial::zero(n);
                let kk = rat(k as i64);
                for (j, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let dm = m.partial_derivative(j).expect("in range");
                    let t = &(&dm * g) - &(&m * &dg[j]).scale(&kk);
                    num = &num + &t.scale(c);
                }
                num.terms().map(|(mm, c)| (mm.0.clone(), c.clone())).collect()
            }
            Piece::Hull { .. } => {
                let mut out = Vec::new();
                for (j, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let (_, d) = e_module_actions(j, &InverseMonomial(label.clone()));
                    out.extend(d.into_iter().map(|(b, v)| (b.0, v * c)));
                }
                out
            }
            Piece::HullPoly { n } => {
                let m = n - 1;
                let elem = ExtendedHullElement { r: label[..m].to_vec(), j: label[m] };
                let mut out = Vec::new();
                for (j, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for (b, v) in epoly_module_actions(j, &elem) {
                        let mut l = b.r;
                        l.push(b.j);
                        out.push((l, v * c));
                    }
                }
                out
            }
        }
    }
}

/// Collects a list of `(label, coefficient)` pairs into a matrix column.
pub(crate) fn scatter(
    m: &mut RationalMatrix,
    col: usize,
    row_offset: usize,
    index: &HashMap<Label, usize>,
    image: Vec<(Label, Rational)>,
    sign: i64,
) -> Result<()> {
    let s = rat(sign);
    for (label, v) in image {
        let Some(&r) = index.get(&label) else {
            return Err(Error::WindowLeak(format!("{label:?}")));
        };
        m.add_to(row_offset + r, col, &(v * &s));
    }
    Ok(())
}

pub(crate) fn index_of(basis: &[Label]) -> HashMap<Label, usize> {
    basis.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect()
}

/// A finite truncation of a module: its basis, and the action matrices of
/// each operator into the truncation one step further along.
#[derive(Debug, Clone)]
pub struct ModuleSlice {
    pub window: TruncationWindow,
    pub basis: Vec<Label>,
    pub target_basis: Vec<Label>,
    /// One matrix per operator, `target_basis.len() x basis.len()`.
    pub actions: Vec<RationalMatrix>,
}

pub(crate) fn slice_constraint(piece: &Piece, w: &TruncationWindow) -> DegreeConstraint {
    let graded = piece.data().is_none_or(Polynomial::is_homogeneous);
    let total = if graded {
        TotalBound::Between(w.degree_lo, w.degree_hi)
    } else {
        TotalBound::AtMost(w.degree_hi)
    };
    DegreeConstraint { coords: vec![], upper: vec![], total, cap: w.k_cap }
}

/// Truncates `kind` to the window and records the action of each operator
/// (`operators[i]` lists the coefficients of `∂_1..∂_n`).
pub fn build_slice(
    kind: &ModuleKind,
    n: usize,
    operators: &[Vec<Rational>],
    window: &TruncationWindow,
) -> Result<ModuleSlice> {
    if let ModuleKind::Localized(f) = kind {
        if f.ambient() != n {
            return Err(Error::AmbientMismatch { left: n, right: f.ambient() });
        }
        if f.is_zero() {
            return Err(Error::ZeroDivisor);
        }
    }
    let piece = Piece::from_kind(kind, n);
    let basis = piece.basis(&slice_constraint(&piece, window));
    let target_window = window.advanced();
    let target_basis = piece.basis(&slice_constraint(&piece, &target_window));
    let index = index_of(&target_basis);
    let mut actions = Vec::with_capacity(operators.len());
    for op in operators {
        let mut m = RationalMatrix::zeros(target_basis.len(), basis.len());
        for (col, label) in basis.iter().enumerate() {
            scatter(&mut m, col, 0, &index, piece.apply_operator(op, label, window.k_cap), 1)?;
        }
        actions.push(m);
    }
    Ok(ModuleSlice { window: *window, basis, target_basis, actions })
}

/// Čech differentials `C^p -> C^{p+1}` restricted to the window; position `p`
/// is the ordered sum over `p`-subsets of the truncation of `R_{g_S}`.
pub fn cech_inclusion_matrices(spec: &CechSpec, window: &TruncationWindow) -> Result<Vec<RationalMatrix>> {
    let s = spec.len();
    let bases: Vec<Vec<(Vec<usize>, Piece, Vec<Label>)>> = (0..=s)
        .map(|p| {
            spec.subsets(p)
                .into_iter()
                .map(|sub| {
                    let piece = Piece::localized(spec.product(&sub));
                    let basis = piece.basis(&slice_constraint(&piece, window));
                    (sub, piece, basis)
                })
                .collect()
        })
        .collect();
    let k = window.k_cap;
    let powers: Vec<Polynomial> = spec.generators().iter().map(|g| g.pow(k)).collect();
    let mut out = Vec::with_capacity(s);
    for p in 0..s {
        let src = &bases[p];
        let tgt = &bases[p + 1];
        let rows: usize = tgt.iter().map(|t| t.2.len()).sum();
        let cols: usize = src.iter().map(|t| t.2.len()).sum();
        let mut m = RationalMatrix::zeros(rows, cols);
        let mut col_off = 0;
        for (sub, _, basis) in src {
            for l in (0..s).filter(|l| !sub.contains(l)) {
                let mut bigger = sub.clone();
                bigger.push(l);
                bigger.sort_unstable();
                let (row_off, tbasis) = offset_of(tgt, &bigger);
                let index = index_of(tbasis);
                let sign = insertion_sign(sub, l);
                for (c, label) in basis.iter().enumerate() {
                    let image = powers[l]
                        .mul_monomial(&Monomial(label.clone()))
                        .terms()
                        .map(|(mm, v)| (mm.0.clone(), v.clone()))
                        .collect();
                    scatter(&mut m, col_off + c, row_off, &index, image, sign)?;
                }
            }
            col_off += basis.len();
        }
        out.push(m);
    }
    Ok(out)
}

fn offset_of<'a>(parts: &'a [(Vec<usize>, Piece, Vec<Label>)], key: &[usize]) -> (usize, &'a [Label]) {
    let mut off = 0;
    for (sub, _, basis) in parts {
        if sub.as_slice() == key {
            return (off, basis);
        }
        off += basis.len();
    }
    unreachable!("subset present")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x2() -> Polynomial {
        Polynomial::var(2, 0)
    }
    fn y2() -> Polynomial {
        Polynomial::var(2, 1)
    }

    #[test]
    fn quotient_rule() {
        let x = Polynomial::var(1, 0);
        let one = FractionElement::new(Polynomial::one(1), 1, &x).unwrap();
        let d = localized_partial(0, &one, &x).unwrap();
        assert_eq!(d, FractionElement::new(Polynomial::constant(1, rat(-1)), 2, &x).unwrap());
        let f = x2();
        let v = FractionElement::new(Polynomial::one(2), 1, &f).unwrap();
        let dy = localized_partial(1, &v, &f).unwrap();
        assert!(dy.numerator().is_zero());
        assert_eq!(dy.exponent(), 0);
    }

    #[test]
    fn normalization_of_x_over_xy() {
        // x/(xy) does not reduce as a fraction over powers of xy; its derivative in x is
        // (1*xy - x*y)/(xy)^2 = 0.
        let f = &x2() * &y2();
        let v = FractionElement::new(x2(), 1, &f).unwrap();
        assert_eq!(v.exponent(), 1);
        assert_eq!(v.numerator(), &x2());
        let d = localized_partial(0, &v, &f).unwrap();
        assert!(d.numerator().is_zero());
        // Idempotent normalization.
        let w = FractionElement::new(&x2() * &f, 2, &f).unwrap();
        assert_eq!(w.clone().normalize(&f).unwrap(), w);
        assert_eq!(w, v);
    }

    #[test]
    fn injective_hull_actions() {
        let (x, d) = e_module_actions(0, &InverseMonomial(vec![0, 0]));
        assert!(x.is_empty());
        assert_eq!(d, vec![(InverseMonomial(vec![1, 0]), rat(-1))]);
        let (x, _) = e_module_actions(0, &InverseMonomial(vec![2, 0]));
        assert_eq!(x, vec![(InverseMonomial(vec![1, 0]), rat(1))]);
    }

    #[test]
    fn hull_module_axiom() {
        // X_i ∂_i - ∂_i X_i acts as -1.
        for r in [vec![0, 0], vec![1, 2], vec![3, 0]] {
            for i in 0..2 {
                let b = InverseMonomial(r.clone());
                let (_, d) = e_module_actions(i, &b);
                let mut lhs: HashMap<InverseMonomial, Rational> = HashMap::new();
                for (t, c) in d {
                    for (u, e) in e_module_actions(i, &t).0 {
                        *lhs.entry(u).or_insert_with(Rational::zero) += &c * e;
                    }
                }
                for (t, c) in e_module_actions(i, &b).0 {
                    for (u, e) in e_module_actions(i, &t).1 {
                        *lhs.entry(u).or_insert_with(Rational::zero) -= &c * e;
                    }
                }
                lhs.retain(|_, v| !v.is_zero());
                assert_eq!(lhs.len(), 1);
                assert_eq!(lhs[&b], rat(-1));
            }
        }
    }

    #[test]
    fn extended_hull_actions() {
        let e = |r: Vec<u32>, j| ExtendedHullElement { r, j };
        assert!(epoly_module_actions(1, &e(vec![0], 0)).is_empty());
        assert_eq!(epoly_module_actions(1, &e(vec![0], 3)), vec![(e(vec![0], 2), rat(3))]);
        assert_eq!(epoly_module_actions(0, &e(vec![0], 1)), vec![(e(vec![1], 1), rat(-1))]);
    }

    #[test]
    fn translations() {
        assert_eq!(translate_point(&[rat(0), rat(0)]), AffineChange::identity(2));
        let t = translate_point(&[rat(1), rat(2)]);
        assert_eq!(t.shift(), &[rat(-1), rat(-2)]);
        assert_eq!(t.matrix(), &RationalMatrix::identity(2));
        let back = t.inverse();
        let p = &x2().pow(2) + &y2();
        assert_eq!(p.substitute_affine(&t).unwrap().substitute_affine(&back).unwrap(), p);
    }

    #[test]
    fn polynomial_slice() {
        let w = TruncationWindow::new(0, 3, 0).unwrap();
        let s = build_slice(&ModuleKind::Polynomial, 1, &[vec![rat(1)]], &w).unwrap();
        assert_eq!(s.basis, vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(s.target_basis, vec![vec![0], vec![1], vec![2]]);
        let a = &s.actions[0];
        assert_eq!(a.get(0, 1), rat(1));
        assert_eq!(a.get(1, 2), rat(2));
        assert_eq!(a.get(2, 3), rat(3));
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn hull_slice_n1() {
        // r <= 2: degrees -1..-3.
        let w = TruncationWindow::new(-3, -1, 0).unwrap();
        let s = build_slice(&ModuleKind::InjectiveHull, 1, &[vec![rat(1)]], &w).unwrap();
        assert_eq!(s.basis, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(s.target_basis, vec![vec![1], vec![2], vec![3]]);
        let a = &s.actions[0];
        assert_eq!(a.get(0, 0), rat(-1));
        assert_eq!(a.get(1, 1), rat(-2));
        assert_eq!(a.get(2, 2), rat(-3));
    }

    #[test]
    fn localized_slice_strand() {
        // Degree -1 strand of R_x with cap 3: x^2/x^3 = 1/x only.
        let x = Polynomial::var(1, 0);
        let w = TruncationWindow::new(-1, -1, 3).unwrap();
        let s = build_slice(&ModuleKind::Localized(x.clone()), 1, &[vec![rat(1)]], &w).unwrap();
        assert_eq!(s.basis, vec![vec![2]]);
        let frac = FractionElement::new(Polynomial::var(1, 0).pow(2), 3, &x).unwrap();
        assert_eq!(frac.exponent(), 1);
        assert_eq!(frac.numerator(), &Polynomial::one(1));
    }

    #[test]
    fn cech_single_generator_is_localization() {
        let spec = CechSpec::new(vec![Polynomial::var(1, 0)]).unwrap();
        let w = TruncationWindow::new(0, 2, 2).unwrap();
        let mats = cech_inclusion_matrices(&spec, &w).unwrap();
        assert_eq!(mats.len(), 1);
        // a ↦ a x^2 / x^2; R piece has {1, x, x^2}, R_x piece has numerators of degree 2..4.
        let m = &mats[0];
        assert_eq!(m.cols(), 3);
        assert_eq!(m.rows(), 3);
        assert_eq!(m.nnz(), 3);
    }

    #[test]
    fn cech_two_generators_square_zero() {
        let spec = CechSpec::new(vec![x2(), y2()]).unwrap();
        let w = TruncationWindow::new(-3, 1, 2).unwrap();
        let mats = cech_inclusion_matrices(&spec, &w).unwrap();
        assert!(mats[1].mul(&mats[0]).unwrap().is_zero());
        // 1/x ↦ y/(xy): the element 1/x is x/x^2 over x^2, i.e. numerator x; image x*y^2 over (xy)^2.
        let spec_x = spec.product(&[0]);
        assert_eq!(spec_x, x2());
    }

    #[test]
    fn cech_inhomogeneous_square_zero() {
        let g1 = &x2().pow(2) - &Polynomial::one(2);
        let spec = CechSpec::new(vec![g1, y2()]).unwrap();
        let w = TruncationWindow::new(0, 1, 2).unwrap();
        let mats = cech_inclusion_matrices(&spec, &w).unwrap();
        assert!(mats[1].mul(&mats[0]).unwrap().is_zero());
    }

    #[test]
    fn commuting_actions_on_slices() {
        let ops = vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]];
        let f = &x2().pow(2) - &y2().pow(2);
        for kind in [ModuleKind::Polynomial, ModuleKind::InjectiveHull, ModuleKind::ExtendedHull, ModuleKind::Localized(f)] {
            let w = TruncationWindow::new(-4, 1, 2).unwrap();
            let s0 = build_slice(&kind, 2, &ops, &w).unwrap();
            let s1 = build_slice(&kind, 2, &ops, &w.advanced()).unwrap();
            assert_eq!(s0.target_basis, s1.basis);
            let a = s1.actions[0].mul(&s0.actions[1]).unwrap();
            let b = s1.actions[1].mul(&s0.actions[0]).unwrap();
            assert_eq!(a, b, "{}", kind.name());
        }
    }
}
