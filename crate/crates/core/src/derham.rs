//! Koszul (De Rham) complexes over truncated modules, Čech–De Rham
//! totalizations, and the stabilization driver.
//!
//! Everything is organised by strands. A strand fixes the value of every
//! available grading (the `X_j`-degree for each coordinate the data allows,
//! or the total degree), so each strand complex is finite and the strands are
//! independent. Without a total grading the remaining directions are cut by
//! a filtration bound instead.

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::dmod::{
    index_of, insertion_sign, scatter, slice_constraint, subsets, CechSpec, DegreeConstraint, Label, ModuleKind, Piece, TotalBound,
    TruncationWindow,
};
use crate::error::{Error, Result};
use crate::linalg::{columns_to_matrix, nullspace, rank, ChainComplex, Rational, RationalMatrix};
use crate::poly::{Monomial, Polynomial};
use crate::weyl::WeylElement;

/// One evaluated window: the cap, the strand half-width reached, and the
/// cohomology of the total complex `H^0..H^M` summed over strands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowTrace {
    pub k_cap: u32,
    pub span: i64,
    pub span_settled: bool,
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Graded,
    Filtered,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeRhamResult {
    /// `h_0..h_n`.
    pub homological_dims: Vec<usize>,
    /// `H^0..H^n`, with `H^i = h_{n-i}`.
    pub cohomological_dims: Vec<usize>,
    pub window_trace: Vec<WindowTrace>,
    pub stabilized: bool,
    pub strategy: Strategy,
}

impl DeRhamResult {
    fn from_cohomological(cohomological_dims: Vec<usize>, window_trace: Vec<WindowTrace>, strategy: Strategy) -> Self {
        let homological_dims = cohomological_dims.iter().rev().copied().collect();
        Self { homological_dims, cohomological_dims, window_trace, stabilized: true, strategy }
    }

    pub fn n(&self) -> usize {
        self.homological_dims.len() - 1
    }
}

/// Cap schedule and strand widening parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilizationConfig {
    /// Base denominator caps, tried in order. Koszul degree `i` uses cap `k + i`.
    pub schedule: Vec<u32>,
    /// Initial strand half-width (or filtration bound when no total grading exists).
    pub span: i64,
    /// Number of consecutive caps that must agree.
    pub window: usize,
    /// Maximum number of widenings by 2 per cap.
    pub widen_budget: usize,
}

impl Default for StabilizationConfig {
    fn default() -> Self {
        Self { schedule: vec![4, 6, 8, 10, 12], span: 2, window: 2, widen_budget: 4 }
    }
}

impl StabilizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() {
            return Err(Error::InvalidConfig("empty cap schedule".into()));
        }
        if self.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("cap schedule must be strictly increasing".into()));
        }
        if self.window == 0 || self.window > self.schedule.len() {
            return Err(Error::InvalidConfig(format!(
                "stabilization window {} must be between 1 and {}",
                self.window,
                self.schedule.len()
            )));
        }
        if self.span < 0 {
            return Err(Error::InvalidConfig("degree span must be non-negative".into()));
        }
        Ok(())
    }
}

/// The Koszul complex of `n` operators, in homological indexing
/// (`C_j` is the cohomological level `n - j`).
///
/// `spaces[i]` is the dimension of the module slice at cohomological level
/// `i`, and `actions[i][j]` maps level `i` to level `i + 1` under operator `j`.
pub fn koszul_complex(spaces: &[usize], actions: &[Vec<RationalMatrix>]) -> Result<ChainComplex> {
    let n = spaces.len().saturating_sub(1);
    if actions.len() != n {
        return Err(Error::ShapeMismatch(format!("{} levels need {} action lists", n + 1, n)));
    }
    for (i, level) in actions.iter().enumerate() {
        if level.len() != n {
            return Err(Error::ShapeMismatch(format!("level {i} has {} operators, expected {n}", level.len())));
        }
        for a in level {
            if a.rows() != spaces[i + 1] || a.cols() != spaces[i] {
                return Err(Error::ShapeMismatch(format!("action at level {i} has the wrong shape")));
            }
        }
    }
    let ts: Vec<Vec<Vec<usize>>> = (0..=n).map(|i| subsets(n, i)).collect();
    let dims: Vec<usize> = (0..=n).map(|i| spaces[i] * ts[i].len()).collect();
    let mut cohom = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = RationalMatrix::zeros(dims[i + 1], dims[i]);
        let pos: HashMap<&Vec<usize>, usize> = ts[i + 1].iter().enumerate().map(|(a, t)| (t, a)).collect();
        for (b, t) in ts[i].iter().enumerate() {
            for j in (0..n).filter(|j| !t.contains(j)) {
                let mut bigger = t.clone();
                bigger.push(j);
                bigger.sort_unstable();
                let row_off = pos[&bigger] * spaces[i + 1];
                let sign = Rational::from_integer(insertion_sign(t, j).into());
                for (r, c, v) in actions[i][j].entries() {
                    m.add_to(row_off + r, b * spaces[i] + c, &(v * &sign));
                }
            }
        }
        cohom.push(m);
    }
    let complex = homological(dims, cohom)?;
    complex.check_composites().map_err(|_| Error::NonCommuting)?;
    Ok(complex)
}

/// The Koszul complex of a module truncated to `window`; level `i` uses the
/// window advanced `i` times.
pub fn window_koszul_complex(
    kind: &ModuleKind,
    n: usize,
    operators: &[WeylElement],
    window: &TruncationWindow,
) -> Result<ChainComplex> {
    let ops = constant_operators(n, operators)?;
    let piece = Piece::from_kind(kind, n);
    let r = ops.len();
    let mut windows = vec![*window];
    for i in 0..r {
        windows.push(windows[i].advanced());
    }
    let bases: Vec<Vec<Label>> = windows.iter().map(|w| piece.basis(&slice_constraint(&piece, w))).collect();
    let mut actions = Vec::with_capacity(r);
    for i in 0..r {
        let index = index_of(&bases[i + 1]);
        let mut level = Vec::with_capacity(r);
        for op in &ops {
            let mut m = RationalMatrix::zeros(bases[i + 1].len(), bases[i].len());
            for (col, label) in bases[i].iter().enumerate() {
                scatter(&mut m, col, 0, &index, piece.apply_operator(op, label, windows[i].k_cap), 1)?;
            }
            level.push(m);
        }
        actions.push(level);
    }
    let spaces: Vec<usize> = bases.iter().map(Vec::len).collect();
    koszul_complex(&spaces, &actions)
}

/// Wraps cohomological differentials `D^m : T^m -> T^{m+1}` as a chain complex.
fn homological(dims: Vec<usize>, cohom: Vec<RationalMatrix>) -> Result<ChainComplex> {
    let top = dims.len() - 1;
    let spaces: Vec<usize> = dims.iter().rev().copied().collect();
    let differentials: Vec<RationalMatrix> = (1..=top).map(|j| cohom[top - j].clone()).collect();
    ChainComplex::new(spaces, differentials)
}

fn constant_operators(n: usize, operators: &[WeylElement]) -> Result<Vec<Vec<Rational>>> {
    for op in operators {
        if op.ambient() != n {
            return Err(Error::AmbientMismatch { left: n, right: op.ambient() });
        }
    }
    for (a, x) in operators.iter().enumerate() {
        for y in &operators[a + 1..] {
            if !x.commutator(y)?.is_zero() {
                return Err(Error::NonCommuting);
            }
        }
    }
    operators.iter().map(WeylElement::as_constant_first_order).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weight {
    Coord(usize),
    Total,
}

/// How a strand is cut down to finitely many basis elements once the
/// gradings are fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Cut {
    /// The gradings alone leave finitely many elements.
    None,
    /// Every remaining coordinate carries its own filtration bound.
    PerCoordinate(Vec<usize>),
    /// One bound on the total filtration of the remaining directions.
    Total,
}

/// The gradings available for a given module and operator set.
#[derive(Debug, Clone)]
struct Grading {
    weights: Vec<Weight>,
    /// `shifts[w][t]`: degree change of operator `t` under weight `w`.
    shifts: Vec<Vec<i64>>,
    /// `home[t] = Some(j)` when operator `t` is a multiple of `∂_j`.
    home: Vec<Option<usize>>,
    /// Operators that lower the total filtration bound.
    free: Vec<bool>,
    cut: Cut,
}

impl Grading {
    fn select(n: usize, data: &[Polynomial], ops: &[Vec<Rational>]) -> Self {
        let supports: Vec<Vec<usize>> =
            ops.iter().map(|op| (0..n).filter(|&j| !op[j].is_zero()).collect()).collect();
        let home: Vec<Option<usize>> =
            supports.iter().map(|s| if s.len() == 1 { Some(s[0]) } else { None }).collect();
        let compatible: Vec<bool> = (0..n)
            .map(|j| supports.iter().all(|s| s.as_slice() == [j] || !s.contains(&j)))
            .collect();
        let mut weights = Vec::new();
        let mut loose = Vec::new();
        for j in 0..n {
            if compatible[j] && data.iter().all(|p| p.is_homogeneous_in(j)) {
                weights.push(Weight::Coord(j));
            } else {
                loose.push(j);
            }
        }
        let cut = if loose.is_empty() {
            Cut::None
        } else if data.iter().all(Polynomial::is_homogeneous) {
            weights.push(Weight::Total);
            Cut::None
        } else if loose.iter().all(|&j| compatible[j]) {
            Cut::PerCoordinate(loose)
        } else {
            Cut::Total
        };
        let shifts: Vec<Vec<i64>> = weights
            .iter()
            .map(|w| match w {
                Weight::Coord(j) => home.iter().map(|h| if *h == Some(*j) { -1 } else { 0 }).collect(),
                Weight::Total => vec![-1; ops.len()],
            })
            .collect();
        let free = home
            .iter()
            .map(|h| match h {
                Some(j) => !weights.contains(&Weight::Coord(*j)),
                None => true,
            })
            .collect();
        Self { weights, shifts, home, free, cut }
    }

    fn strategy(&self) -> Strategy {
        if self.cut == Cut::None {
            Strategy::Graded
        } else {
            Strategy::Filtered
        }
    }

    /// The constraint on the module element sitting at Koszul subset `t` in strand `delta`.
    fn constraint(&self, delta: &[i64], t: &[usize], cap: u32, bound: i64) -> DegreeConstraint {
        let mut coords = Vec::new();
        let mut total = None;
        for (w, weight) in self.weights.iter().enumerate() {
            let nu = delta[w] + t.iter().map(|&x| self.shifts[w][x]).sum::<i64>();
            match weight {
                Weight::Coord(j) => coords.push((*j, nu)),
                Weight::Total => total = Some(nu),
            }
        }
        let fixed: i64 = coords.iter().map(|c| c.1).sum();
        let mut upper = Vec::new();
        let total = match (&self.cut, total) {
            (_, Some(d)) => TotalBound::Exact(d),
            (Cut::None, None) => TotalBound::Exact(fixed),
            (Cut::PerCoordinate(loose), None) => {
                for &j in loose {
                    let used = t.iter().filter(|&&x| self.home[x] == Some(j)).count() as i64;
                    upper.push((j, bound - used));
                }
                TotalBound::Any
            }
            (Cut::Total, None) => {
                let free = t.iter().filter(|&&x| self.free[x]).count() as i64;
                TotalBound::AtMost(bound - free + fixed)
            }
        };
        DegreeConstraint { coords, upper, total, cap }
    }
}

/// A Čech-indexed family of pieces with operators: position `p` holds the
/// localizations at the `p`-subsets of the generators. A plain module is the
/// one-position case.
struct Layout {
    ops: Vec<Vec<Rational>>,
    positions: Vec<Vec<(Vec<usize>, Piece)>>,
    /// `g_S^GAP` for localized pieces: rewrites `a / g_S^k` over `g_S^(k + GAP)`.
    rebase: Vec<Vec<Option<Polynomial>>>,
    gens: Vec<Polynomial>,
    grading: Grading,
}

impl Layout {
    fn single(kind: &ModuleKind, n: usize, ops: Vec<Vec<Rational>>) -> Self {
        let data: Vec<Polynomial> = match kind {
            ModuleKind::Localized(f) => vec![f.clone()],
            _ => vec![],
        };
        let grading = Grading::select(n, &data, &ops);
        let positions = vec![vec![(vec![], Piece::from_kind(kind, n))]];
        Self { rebase: rebase_factors(&positions), positions, gens: vec![], grading, ops }
    }

    fn cech(spec: &CechSpec, ops: Vec<Vec<Rational>>) -> Self {
        let s = spec.len();
        let positions: Vec<Vec<(Vec<usize>, Piece)>> = (0..=s)
            .map(|p| spec.subsets(p).into_iter().map(|sub| {
                let g = spec.product(&sub);
                (sub, Piece::localized(g))
            }).collect())
            .collect();
        let grading = Grading::select(spec.ambient(), spec.generators(), &ops);
        Self { rebase: rebase_factors(&positions), positions, gens: spec.generators().to_vec(), grading, ops }
    }

    fn top(&self) -> usize {
        self.gens.len() + self.ops.len()
    }

    fn strand_dims(&self) -> usize {
        self.grading.weights.len()
    }
}

/// Cap increase between a window and the larger window it is compared with.
const GAP: u32 = 2;

fn rebase_factors(positions: &[Vec<(Vec<usize>, Piece)>]) -> Vec<Vec<Option<Polynomial>>> {
    positions
        .iter()
        .map(|ps| {
            ps.iter()
                .map(|(_, piece)| match piece {
                    Piece::Loc { g, .. } => Some(g.pow(GAP)),
                    _ => None,
                })
                .collect()
        })
        .collect()
}

/// One block `C^p_S ⊗ e_T` of a strand's total complex.
struct Block {
    p: usize,
    s: usize,
    t: Vec<usize>,
    basis: Vec<Label>,
}

/// Per-cap data shared by all strands: `powers[l][i] = g_l^(k + i)`.
struct CapData {
    k: u32,
    powers: Vec<Vec<Polynomial>>,
}

impl CapData {
    fn new(layout: &Layout, k: u32) -> Self {
        let r = layout.ops.len() as u32;
        let powers = layout.gens.iter().map(|g| (0..=r).map(|i| g.pow(k + i)).collect()).collect();
        Self { k, powers }
    }
}

/// The total complex of one strand, as cohomological differentials.
struct StrandComplex {
    levels: Vec<Vec<Block>>,
    dims: Vec<usize>,
    differentials: Vec<RationalMatrix>,
}

fn ordered_ts(r: usize, i: usize) -> Vec<Vec<usize>> {
    // Subsets without the last operator first; the two-step check relies on it.
    let mut ts = subsets(r, i);
    if r > 0 {
        ts.sort_by_key(|t| t.contains(&(r - 1)));
    }
    ts
}

fn build_strand(layout: &Layout, cap: &CapData, delta: &[i64], bound: i64) -> Result<StrandComplex> {
    let r = layout.ops.len();
    let top = layout.top();
    let mut levels: Vec<Vec<Block>> = (0..=top).map(|_| Vec::new()).collect();
    for i in 0..=r {
        let ts = ordered_ts(r, i);
        let k = cap.k + i as u32;
        for (p, pieces) in layout.positions.iter().enumerate() {
            for (s, (_, piece)) in pieces.iter().enumerate() {
                for t in &ts {
                    let c = layout.grading.constraint(delta, t, k, bound);
                    let basis = piece.basis(&c);
                    levels[p + i].push(Block { p, s, t: t.clone(), basis });
                }
            }
        }
    }
    for level in &mut levels {
        level.sort_by_key(|b| b.p);
    }
    let dims: Vec<usize> = levels.iter().map(|l| l.iter().map(|b| b.basis.len()).sum()).collect();
    let mut differentials = Vec::with_capacity(top);
    for m in 0..top {
        differentials.push(strand_differential(layout, cap, &levels[m], &levels[m + 1], dims[m + 1], dims[m])?);
    }
    Ok(StrandComplex { levels, dims, differentials })
}

fn strand_differential(
    layout: &Layout,
    cap: &CapData,
    src: &[Block],
    tgt: &[Block],
    rows: usize,
    cols: usize,
) -> Result<RationalMatrix> {
    let mut m = RationalMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return Ok(m);
    }
    let mut targets: HashMap<(usize, usize, &[usize]), (usize, HashMap<Label, usize>)> = HashMap::new();
    let mut off = 0;
    for b in tgt {
        targets.insert((b.p, b.s, b.t.as_slice()), (off, index_of(&b.basis)));
        off += b.basis.len();
    }
    let s_pos: Vec<HashMap<&[usize], usize>> = layout
        .positions
        .iter()
        .map(|ps| ps.iter().enumerate().map(|(a, (sub, _))| (sub.as_slice(), a)).collect())
        .collect();
    let r = layout.ops.len();
    let ng = layout.gens.len();
    let mut col_off = 0;
    for b in src {
        if b.basis.is_empty() {
            continue;
        }
        let (sub, piece) = &layout.positions[b.p][b.s];
        let i = b.t.len();
        let k = cap.k + i as u32;
        for l in (0..ng).filter(|l| !sub.contains(l)) {
            let mut bigger = sub.clone();
            bigger.push(l);
            bigger.sort_unstable();
            let s2 = s_pos[b.p + 1][bigger.as_slice()];
            let Some((row_off, index)) = targets.get(&(b.p + 1, s2, b.t.as_slice())) else {
                continue;
            };
            let sign = insertion_sign(sub, l);
            for (c, label) in b.basis.iter().enumerate() {
                let image = cap.powers[l][i]
                    .mul_monomial(&Monomial(label.clone()))
                    .terms()
                    .map(|(mm, v)| (mm.0.clone(), v.clone()))
                    .collect();
                scatter(&mut m, col_off + c, *row_off, index, image, sign)?;
            }
        }
        let parity = if b.p % 2 == 0 { 1 } else { -1 };
        for j in (0..r).filter(|j| !b.t.contains(j)) {
            let mut bigger = b.t.clone();
            bigger.push(j);
            bigger.sort_unstable();
            let Some((row_off, index)) = targets.get(&(b.p, b.s, bigger.as_slice())) else {
                continue;
            };
            let sign = parity * insertion_sign(&b.t, j);
            for (c, label) in b.basis.iter().enumerate() {
                scatter(&mut m, col_off + c, *row_off, index, piece.apply_operator(&layout.ops[j], label, k), sign)?;
            }
        }
        col_off += b.basis.len();
    }
    Ok(m)
}

impl StrandComplex {
    fn check(&self) -> Result<()> {
        for m in 1..self.differentials.len() {
            let (lo, hi) = (&self.differentials[m - 1], &self.differentials[m]);
            if lo.is_zero() || hi.is_zero() {
                continue;
            }
            if !hi.mul(lo)?.is_zero() {
                return Err(Error::NonCommuting);
            }
        }
        Ok(())
    }
}

/// The inclusion of a strand at a smaller window into the same strand at the larger one.
fn inclusion(layout: &Layout, small: &[Block], big: &[Block], rows: usize, cols: usize) -> Result<RationalMatrix> {
    let mut m = RationalMatrix::zeros(rows, cols);
    let mut targets: HashMap<(usize, usize, &[usize]), (usize, HashMap<Label, usize>)> = HashMap::new();
    let mut off = 0;
    for b in big {
        targets.insert((b.p, b.s, b.t.as_slice()), (off, index_of(&b.basis)));
        off += b.basis.len();
    }
    let one = Rational::from_integer(1.into());
    let mut col_off = 0;
    for b in small {
        if b.basis.is_empty() {
            continue;
        }
        let Some((row_off, index)) = targets.get(&(b.p, b.s, b.t.as_slice())) else {
            return Err(Error::WindowLeak(format!("block {:?}", b.t)));
        };
        for (c, label) in b.basis.iter().enumerate() {
            let image = match &layout.rebase[b.p][b.s] {
                Some(f) => f.mul_monomial(&Monomial(label.clone())).terms().map(|(mm, v)| (mm.0.clone(), v.clone())).collect(),
                None => vec![(label.clone(), one.clone())],
            };
            scatter(&mut m, col_off + c, *row_off, index, image, 1)?;
        }
        col_off += b.basis.len();
    }
    Ok(m)
}

/// `dim im(H^m(small) -> H^m(big))` for every total degree `m`, via
/// `rank[ι | d_big^{m-1}] - rank d_small^m - rank d_big^{m-1}`.
fn strand_image(layout: &Layout, small: &CapData, big: &CapData, delta: &[i64], bound: i64) -> Result<Vec<usize>> {
    let a = build_strand(layout, small, delta, bound)?;
    let b = build_strand(layout, big, delta, bound + GAP as i64)?;
    a.check()?;
    b.check()?;
    let top = layout.top();
    let ra: Vec<usize> = a.differentials.iter().map(rank).collect();
    let rb: Vec<usize> = b.differentials.iter().map(rank).collect();
    let mut out = Vec::with_capacity(top + 1);
    for m in 0..=top {
        if a.dims[m] == 0 {
            out.push(0);
            continue;
        }
        let iota = inclusion(layout, &a.levels[m], &b.levels[m], b.dims[m], a.dims[m])?;
        let (aug, below) = if m > 0 && rb[m - 1] > 0 {
            (rank(&iota.hstack(&b.differentials[m - 1])?), rb[m - 1])
        } else {
            (a.dims[m], 0)
        };
        let above = if m < top { ra[m] } else { 0 };
        out.push(aug - above - below);
    }
    Ok(out)
}

fn box_points(dims: usize, outer: i64, inner: Option<i64>) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..dims {
        let mut next = Vec::with_capacity(out.len() * (2 * outer as usize + 1));
        for p in &out {
            for v in -outer..=outer {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        out = next;
    }
    match inner {
        Some(s) => out.into_iter().filter(|p| p.iter().any(|v| v.abs() > s)).collect(),
        None => out,
    }
}

fn add_into(acc: &mut [usize], v: &[usize]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn sum_strands(layout: &Layout, cap: &(CapData, CapData), points: &[Vec<i64>], bound: i64) -> Result<Vec<usize>> {
    let per: Vec<Vec<usize>> = points
        .par_iter()
        .map(|d| strand_image(layout, &cap.0, &cap.1, d, bound))
        .collect::<Result<_>>()?;
    let mut acc = vec![0; layout.top() + 1];
    for v in &per {
        add_into(&mut acc, v);
    }
    Ok(acc)
}

/// Evaluates one cap: the image of the window at cap `k` in the window at
/// cap `k + GAP`, widening the strand box (or the filtration bound) until two
/// consecutive widenings change nothing.
fn evaluate_cap(layout: &Layout, k: u32, config: &StabilizationConfig) -> Result<WindowTrace> {
    let cap = (CapData::new(layout, k), CapData::new(layout, k + GAP));
    let d = layout.strand_dims();
    let mut span = config.span;
    let filtered = layout.grading.strategy() == Strategy::Filtered;
    let mut dims = sum_strands(layout, &cap, &box_points(d, span, None), span)?;
    let mut quiet = 0;
    for _ in 0..config.widen_budget {
        let next = if filtered {
            sum_strands(layout, &cap, &box_points(d, span + 2, None), span + 2)?
        } else {
            let mut acc = dims.clone();
            add_into(&mut acc, &sum_strands(layout, &cap, &box_points(d, span + 2, Some(span)), span + 2)?);
            acc
        };
        span += 2;
        if next == dims {
            quiet += 1;
            if quiet == 2 {
                return Ok(WindowTrace { k_cap: k, span, span_settled: true, dims });
            }
        } else {
            quiet = 0;
            dims = next;
        }
    }
    Ok(WindowTrace { k_cap: k, span, span_settled: false, dims })
}

/// Runs the cap schedule and returns the total-complex cohomology once the
/// last `window` caps agree.
fn stabilize(layout: &Layout, config: &StabilizationConfig) -> Result<(Vec<usize>, Vec<WindowTrace>)> {
    config.validate()?;
    let mut trace: Vec<WindowTrace> = Vec::new();
    for &k in &config.schedule {
        trace.push(evaluate_cap(layout, k, config)?);
        if trace.len() >= config.window {
            let tail = &trace[trace.len() - config.window..];
            if tail.iter().all(|t| t.span_settled && t.dims == tail[0].dims) {
                return Ok((tail[0].dims.clone(), trace));
            }
        }
    }
    Err(Error::NoStabilization { trace })
}

/// Stabilized De Rham homology of one covered module with the given
/// constant-coefficient operators.
pub fn stabilized_derham(
    kind: &ModuleKind,
    n: usize,
    operators: &[WeylElement],
    config: &StabilizationConfig,
) -> Result<DeRhamResult> {
    if let ModuleKind::Localized(f) = kind {
        if f.ambient() != n {
            return Err(Error::AmbientMismatch { left: n, right: f.ambient() });
        }
        if f.is_zero() {
            return Err(Error::ZeroDivisor);
        }
    }
    if matches!(kind, ModuleKind::ExtendedHull) && n < 1 {
        return Err(Error::InvalidConfig("E_{n-1}[X_n] needs n >= 1".into()));
    }
    let layout = Layout::single(kind, n, constant_operators(n, operators)?);
    let (dims, trace) = stabilize(&layout, config)?;
    Ok(DeRhamResult::from_cohomological(dims, trace, layout.grading.strategy()))
}

/// De Rham cohomology of `H^c_I(R)` through the Čech–De Rham total complex
/// on the generators of `spec`. Requires the Čech cohomology to be
/// concentrated in degree `c`; a violation is reported, not corrected.
pub fn cech_derham_total(
    spec: &CechSpec,
    c: usize,
    operators: &[WeylElement],
    config: &StabilizationConfig,
) -> Result<DeRhamResult> {
    let n = spec.ambient();
    let layout = Layout::cech(spec, constant_operators(n, operators)?);
    let (total, trace) = stabilize(&layout, config)?;
    let r = layout.ops.len();
    let outside = total.iter().enumerate().any(|(m, &v)| v != 0 && (m < c || m > c + r));
    if outside || c + r >= total.len() {
        return Err(Error::SingleRowViolated { c, dims: total });
    }
    Ok(DeRhamResult::from_cohomological(total[c..=c + r].to_vec(), trace, layout.grading.strategy()))
}

/// Where an assembled complex comes from.
#[derive(Debug, Clone, Copy)]
pub enum Source<'a> {
    Module(&'a ModuleKind, usize),
    Cech(&'a CechSpec),
}

/// The strand complexes of one window (cap `k_cap`, strand half-width or
/// filtration bound `span`), in homological indexing. Exposed for checks.
pub fn assembled_complexes(
    source: Source<'_>,
    operators: &[WeylElement],
    k_cap: u32,
    span: i64,
) -> Result<Vec<ChainComplex>> {
    let layout = match source {
        Source::Module(kind, n) => Layout::single(kind, n, constant_operators(n, operators)?),
        Source::Cech(spec) => Layout::cech(spec, constant_operators(spec.ambient(), operators)?),
    };
    let cap = CapData::new(&layout, k_cap);
    box_points(layout.strand_dims(), span, None)
        .par_iter()
        .map(|d| {
            let sc = build_strand(&layout, &cap, d, span)?;
            sc.check()?;
            homological(sc.dims, sc.differentials)
        })
        .collect()
}

/// Module classes with a known closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ClosedFormClass {
    /// `E`, the injective hull of the residue field at the origin.
    InjectiveHull,
    /// `R` itself.
    Polynomial,
    /// `H^{n-1}_P(R) = E_{n-1}[X_n]` for `P = (X_1..X_{n-1})`.
    ExtendedHull,
    /// `R_f`: only the top homology is known in general.
    Localized,
}

impl ClosedFormClass {
    pub fn name(&self) -> &'static str {
        match self {
            Self::InjectiveHull => "E",
            Self::Polynomial => "R",
            Self::ExtendedHull => "HP",
            Self::Localized => "Rf",
        }
    }
}

/// Homological dims `h_0..h_n`; `None` where the class fixes no value.
pub fn closed_form(class: ClosedFormClass, n: usize) -> Result<Vec<Option<usize>>> {
    let mut out = vec![Some(0); n + 1];
    match class {
        ClosedFormClass::InjectiveHull => out[0] = Some(1),
        ClosedFormClass::Polynomial => out[n] = Some(1),
        ClosedFormClass::ExtendedHull => {
            if n < 2 {
                return Err(Error::UnknownClass(format!("HP needs n >= 2, got {n}")));
            }
            out[1] = Some(1);
        }
        ClosedFormClass::Localized => {
            if n < 1 {
                return Err(Error::UnknownClass("Rf needs n >= 1".into()));
            }
            out = vec![None; n + 1];
            out[n] = Some(1);
        }
    }
    Ok(out)
}

/// Outcome of splitting off the last operator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoStepReport {
    /// Cohomological dims of the full Koszul complex.
    pub direct: Vec<usize>,
    /// `dim coker H^{m-1}(∂_r) + dim ker H^m(∂_r)` on the `∂'` cohomology.
    pub iterated: Vec<usize>,
    pub agrees: bool,
}

/// Compares the direct Koszul cohomology with the two-step computation that
/// first takes cohomology in all operators but the last, then in the last.
pub fn koszul_two_step_check(
    kind: &ModuleKind,
    n: usize,
    operators: &[WeylElement],
    config: &StabilizationConfig,
) -> Result<TwoStepReport> {
    let direct = stabilized_derham(kind, n, operators, config)?;
    let layout = Layout::single(kind, n, constant_operators(n, operators)?);
    let r = layout.ops.len();
    if r == 0 {
        return Err(Error::InvalidConfig("two-step check needs at least one operator".into()));
    }
    let last = direct.window_trace.last().expect("nonempty trace");
    let cap = CapData::new(&layout, last.k_cap);
    let points = box_points(layout.strand_dims(), last.span, None);
    let per: Vec<Vec<usize>> = points
        .par_iter()
        .map(|d| two_step_strand(build_strand(&layout, &cap, d, last.span)?, r))
        .collect::<Result<_>>()?;
    let mut iterated = vec![0; r + 1];
    for v in &per {
        add_into(&mut iterated, v);
    }
    let agrees = iterated == direct.cohomological_dims;
    Ok(TwoStepReport { direct: direct.cohomological_dims, iterated, agrees })
}

fn submatrix(m: &RationalMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> RationalMatrix {
    let mut out = RationalMatrix::zeros(rows.len(), cols.len());
    for (r, c, v) in m.entries() {
        if rows.contains(&r) && cols.contains(&c) {
            out.set(r - rows.start, c - cols.start, v.clone());
        }
    }
    out
}

fn two_step_strand(sc: StrandComplex, r: usize) -> Result<Vec<usize>> {
    let last = r - 1;
    // At level i the blocks without the last operator come first.
    let split: Vec<usize> = sc
        .levels
        .iter()
        .map(|l| l.iter().filter(|b| !b.t.contains(&last)).map(|b| b.basis.len()).sum())
        .collect();
    let a_dim = |i: usize| split[i];
    let b_dim = |i: usize| sc.dims[i + 1] - split[i + 1];
    let a_rng = |i: usize| 0..split[i];
    let b_rng = |i: usize| split[i + 1]..sc.dims[i + 1];
    // Degrees of the ∂'-complex run over 0..r-1.
    let da: Vec<RationalMatrix> =
        (0..last).map(|i| submatrix(&sc.differentials[i], a_rng(i + 1), a_rng(i))).collect();
    let db: Vec<RationalMatrix> =
        (0..last).map(|i| submatrix(&sc.differentials[i + 1], b_rng(i + 1), b_rng(i))).collect();
    let f: Vec<RationalMatrix> = (0..r).map(|i| submatrix(&sc.differentials[i], b_rng(i), a_rng(i))).collect();
    let ra: Vec<usize> = da.iter().map(rank).collect();
    let rb: Vec<usize> = db.iter().map(rank).collect();
    let get = |v: &[usize], i: usize| -> usize { if i < v.len() { v[i] } else { 0 } };
    let ha: Vec<usize> =
        (0..r).map(|i| a_dim(i) - get(&ra, i) - if i > 0 { ra[i - 1] } else { 0 }).collect();
    let hb: Vec<usize> =
        (0..r).map(|i| b_dim(i) - get(&rb, i) - if i > 0 { rb[i - 1] } else { 0 }).collect();
    let mut induced = Vec::with_capacity(r);
    for i in 0..r {
        let z = if i < last {
            nullspace(&da[i])
        } else {
            (0..a_dim(i))
                .map(|c| {
                    let mut e = vec![Rational::zero(); a_dim(i)];
                    e[c] = Rational::from_integer(1.into());
                    e
                })
                .collect()
        };
        if z.is_empty() || b_dim(i) == 0 {
            induced.push(0);
            continue;
        }
        let fz = f[i].mul(&columns_to_matrix(a_dim(i), &z))?;
        let rho = if i > 0 {
            rank(&db[i - 1].hstack(&fz)?) - rb[i - 1]
        } else {
            rank(&fz)
        };
        induced.push(rho);
    }
    Ok((0..=r)
        .map(|m| {
            let coker = if m > 0 { hb[m - 1] - induced[m - 1] } else { 0 };
            let ker = if m < r { ha[m] - induced[m] } else { 0 };
            coker + ker
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::homology_dims;
    use crate::linalg::rat;
    use crate::weyl::standard_partials;

    fn quick() -> StabilizationConfig {
        StabilizationConfig::default()
    }

    #[test]
    fn zero_operators_on_a_line() {
        let z = RationalMatrix::zeros(1, 1);
        let actions = vec![vec![z.clone(), z.clone()], vec![z.clone(), z]];
        let c = koszul_complex(&[1, 1, 1], &actions).unwrap();
        assert_eq!(c.spaces(), &[1, 2, 1]);
        assert_eq!(homology_dims(&c).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn derivative_on_polynomials_of_degree_three() {
        let w = TruncationWindow::new(0, 3, 0).unwrap();
        let c = window_koszul_complex(&ModuleKind::Polynomial, 1, &standard_partials(1), &w).unwrap();
        assert_eq!(c.spaces(), &[3, 4]);
        assert_eq!(homology_dims(&c).unwrap(), vec![0, 1]);
    }

    #[test]
    fn building_blocks_in_two_variables() {
        let ops = standard_partials(2);
        let e = stabilized_derham(&ModuleKind::InjectiveHull, 2, &ops, &quick()).unwrap();
        assert_eq!(e.homological_dims, vec![1, 0, 0]);
        let r = stabilized_derham(&ModuleKind::Polynomial, 2, &ops, &quick()).unwrap();
        assert_eq!(r.homological_dims, vec![0, 0, 1]);
        let hp = stabilized_derham(&ModuleKind::ExtendedHull, 2, &ops, &quick()).unwrap();
        assert_eq!(hp.homological_dims, vec![0, 1, 0]);
    }

    #[test]
    fn localization_at_xy() {
        let xy = Polynomial::from_terms(2, &[(1, &[1, 1])]);
        let res = stabilized_derham(&ModuleKind::Localized(xy), 2, &standard_partials(2), &quick()).unwrap();
        assert_eq!(res.homological_dims, vec![1, 2, 1]);
    }

    #[test]
    fn cech_point_and_line() {
        let ops = standard_partials(2);
        let pt = CechSpec::new(vec![Polynomial::var(2, 0), Polynomial::var(2, 1)]).unwrap();
        let res = cech_derham_total(&pt, 2, &ops, &quick()).unwrap();
        assert_eq!(res.cohomological_dims, vec![0, 0, 1]);
        let line = CechSpec::new(vec![Polynomial::var(2, 0)]).unwrap();
        let res = cech_derham_total(&line, 1, &ops, &quick()).unwrap();
        assert_eq!(res.cohomological_dims, vec![0, 1, 0]);
        assert!(matches!(cech_derham_total(&line, 2, &ops, &quick()), Err(Error::SingleRowViolated { .. })));
    }

    #[test]
    fn sheared_operators_keep_the_answer() {
        let t = crate::poly::AffineChange::new(RationalMatrix::from_i64(&[&[1, 2], &[0, 1]]), vec![rat(0), rat(0)])
            .unwrap();
        let ops = crate::weyl::transform_operators(&t);
        let e = stabilized_derham(&ModuleKind::InjectiveHull, 2, &ops, &quick()).unwrap();
        assert_eq!(e.homological_dims, vec![1, 0, 0]);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(closed_form(ClosedFormClass::InjectiveHull, 3).unwrap(), vec![Some(1), Some(0), Some(0), Some(0)]);
        assert_eq!(closed_form(ClosedFormClass::Polynomial, 3).unwrap(), vec![Some(0), Some(0), Some(0), Some(1)]);
        assert_eq!(closed_form(ClosedFormClass::ExtendedHull, 3).unwrap(), vec![Some(0), Some(1), Some(0), Some(0)]);
        assert!(matches!(closed_form(ClosedFormClass::ExtendedHull, 1), Err(Error::UnknownClass(_))));
    }

    #[test]
    fn two_step_on_e() {
        let rep = koszul_two_step_check(&ModuleKind::InjectiveHull, 2, &standard_partials(2), &quick()).unwrap();
        assert!(rep.agrees, "{rep:?}");
    }
}
