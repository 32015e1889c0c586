//! Exact linear algebra over the rationals.
//!
//! Matrices are stored sparsely, one ordered map per row. Ranks are computed
//! without fractions: every row is scaled to a primitive integer vector and
//! eliminated by cross-multiplication, with content removal after each step.
//! Dense inputs go through Bareiss elimination instead.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `p` or `p/q`.
pub fn rat_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sparse matrix with exact rational entries. Zero entries are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Rational>>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMatrix({}x{}, nnz={})", self.rows, self.cols, self.nnz())
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::ShapeMismatch("ragged dense rows".into()));
            }
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect();
        let cols = dense.first().map_or(0, Vec::len);
        if dense.is_empty() {
            return Self::zeros(0, cols);
        }
        Self::from_dense(&dense).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.data[r].get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    /// Overwrites an entry; setting zero removes it.
    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }

    /// Adds `v` to an entry.
    pub fn add_to(&mut self, r: usize, c: usize, v: &Rational) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        if v.is_zero() {
            return;
        }
        let row = &mut self.data[r];
        match row.get_mut(&c) {
            Some(e) => {
                *e += v;
                if e.is_zero() {
                    row.remove(&c);
                }
            }
            None => {
                row.insert(c, v.clone());
            }
        }
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &Rational)> {
        self.data[r].iter().map(|(c, v)| (*c, v))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.data[c].insert(r, v.clone());
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (k, a) in row {
                for (c, b) in &other.data[*k] {
                    *acc.entry(*c).or_insert_with(Rational::zero) += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[r] = acc;
        }
        Ok(out)
    }

    pub fn scale_row(&mut self, r: usize, s: &Rational) {
        if s.is_zero() {
            self.data[r].clear();
        } else {
            for v in self.data[r].values_mut() {
                *v *= s;
            }
        }
    }

    /// Returns the matrix with rows reordered: row `i` of the result is row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for (i, &p) in perm.iter().enumerate() {
            out.data[i] = self.data[p].clone();
        }
        out
    }

    /// Column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_cols(&self, perm: &[usize]) -> Self {
        let mut inverse = vec![0; self.cols];
        for (j, &p) in perm.iter().enumerate() {
            inverse[p] = j;
        }
        let mut out = Self::zeros(self.rows, self.cols);
        for (r, c, v) in self.entries() {
            out.data[r].insert(inverse[c], v.clone());
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut d = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            d[r][c] = v.clone();
        }
        d
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch("hstack row counts differ".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for (r, c, v) in self.entries() {
            out.data[r].insert(c, v.clone());
        }
        for (r, c, v) in other.entries() {
            out.data[r].insert(self.cols + c, v.clone());
        }
        Ok(out)
    }
}

type IntRow = Vec<(usize, BigInt)>;

fn primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let negate = row.first().is_some_and(|(_, v)| v.is_negative());
    if g.is_zero() {
        return;
    }
    if !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
    if negate {
        for (_, v) in row.iter_mut() {
            *v = -&*v;
        }
    }
}

fn integer_row<'a>(entries: impl Iterator<Item = (usize, &'a Rational)>) -> IntRow {
    let entries: Vec<(usize, &Rational)> = entries.collect();
    let mut lcm = BigInt::one();
    for (_, v) in &entries {
        lcm = lcm.lcm(v.denom());
    }
    let mut row: IntRow = entries
        .into_iter()
        .map(|(c, v)| (c, v.numer() * (&lcm / v.denom())))
        .collect();
    primitive(&mut row);
    row
}

/// `b*row - a*pivot` where `a`, `b` are the leading entries, reduced by their gcd.
fn eliminate(row: &IntRow, pivot: &IntRow) -> IntRow {
    let a = &row[0].1;
    let b = &pivot[0].1;
    let g = a.gcd(b);
    let fa = a / &g;
    let fb = b / &g;
    let mut out = IntRow::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let cj = pivot.get(j).map_or(usize::MAX, |e| e.0);
        if ci < cj {
            out.push((ci, &fb * &row[i].1));
            i += 1;
        } else if cj < ci {
            out.push((cj, -(&fa * &pivot[j].1)));
            j += 1;
        } else {
            let v = &fb * &row[i].1 - &fa * &pivot[j].1;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    primitive(&mut out);
    out
}

fn sparse_rank(m: &RationalMatrix) -> usize {
    // Sparse columns first keeps fill-in low.
    let mut counts = vec![0usize; m.cols];
    for (_, c, _) in m.entries() {
        counts[c] += 1;
    }
    let mut order: Vec<usize> = (0..m.cols).collect();
    order.sort_by_key(|&c| (counts[c], c));
    let mut relabel = vec![0usize; m.cols];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    let mut rows: Vec<IntRow> = (0..m.rows)
        .filter(|&r| !m.data[r].is_empty())
        .map(|r| {
            let mut row = integer_row(m.row(r));
            for e in row.iter_mut() {
                e.0 = relabel[e.0];
            }
            row.sort_by_key(|e| e.0);
            primitive(&mut row);
            row
        })
        .collect();
    rows.sort_by_key(Vec::len);

    let mut pivots: HashMap<usize, IntRow> = HashMap::new();
    for mut row in rows {
        while let Some(&(lead, _)) = row.first() {
            match pivots.get(&lead) {
                Some(p) => {
                    // Keep the shorter row as the pivot.
                    if row.len() < p.len() {
                        let old = pivots.insert(lead, row).expect("pivot present");
                        row = eliminate(&old, &pivots[&lead]);
                    } else {
                        row = eliminate(&row, p);
                    }
                }
                None => {
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Bareiss fraction-free elimination on a dense integer copy; the pivot in each
/// column is the entry of smallest magnitude.
fn dense_rank(m: &RationalMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|r| {
            let ir = integer_row(m.row(r));
            let mut dense = vec![BigInt::zero(); m.cols];
            for (c, v) in ir {
                dense[c] = v;
            }
            dense
        })
        .collect();
    let (nr, nc) = (m.rows, m.cols);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..nc {
        if rank == nr {
            break;
        }
        let pivot = (rank..nr)
            .filter(|&r| !a[r][col].is_zero())
            .min_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()));
        let Some(p) = pivot else { continue };
        a.swap(rank, p);
        let (top, bottom) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in bottom.iter_mut() {
            for j in (col + 1)..nc {
                let v = &prow[col] * &row[j] - &row[col] * &prow[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = prow[col].clone();
        rank += 1;
    }
    rank
}

/// Exact rank over the rationals.
pub fn rank(m: &RationalMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let nnz = m.nnz();
    if nnz == 0 {
        return 0;
    }
    if nnz * 4 >= m.rows * m.cols && m.rows * m.cols <= 40_000 {
        dense_rank(m)
    } else {
        sparse_rank(m)
    }
}

/// Reduced row echelon form of a dense rational matrix; returns pivot columns.
pub fn rref(a: &mut [Vec<Rational>]) -> Vec<usize> {
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..nc {
        let Some(p) = (r..nr).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..nr {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..nc {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == nr {
            break;
        }
    }
    pivots
}

/// Basis of the right kernel `{v : m v = 0}` as dense column vectors.
pub fn nullspace(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    let mut a = m.to_dense();
    let pivots = rref(&mut a);
    let nc = m.cols;
    let is_pivot: Vec<bool> = (0..nc).map(|c| pivots.contains(&c)).collect();
    let mut basis = Vec::new();
    for free in (0..nc).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); nc];
        v[free] = Rational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Builds a matrix whose columns are the given dense vectors.
pub fn columns_to_matrix(rows: usize, columns: &[Vec<Rational>]) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(rows, columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            m.set(i, j, v.clone());
        }
    }
    m
}

/// A bounded chain complex `0 -> C_m -> ... -> C_1 -> C_0 -> 0` of finite
/// dimensional rational vector spaces.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    spaces: Vec<usize>,
    /// `differentials[i - 1]` is the map `C_i -> C_{i-1}`.
    differentials: Vec<RationalMatrix>,
}

impl ChainComplex {
    pub fn new(spaces: Vec<usize>, differentials: Vec<RationalMatrix>) -> Result<Self> {
        if spaces.is_empty() {
            return Err(Error::ShapeMismatch("complex needs at least one space".into()));
        }
        if differentials.len() != spaces.len() - 1 {
            return Err(Error::ShapeMismatch(format!(
                "{} spaces need {} differentials, got {}",
                spaces.len(),
                spaces.len() - 1,
                differentials.len()
            )));
        }
        for (k, d) in differentials.iter().enumerate() {
            let i = k + 1;
            if d.rows() != spaces[i - 1] || d.cols() != spaces[i] {
                return Err(Error::ShapeMismatch(format!(
                    "differential {i} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    spaces[i - 1],
                    spaces[i]
                )));
            }
        }
        Ok(Self { spaces, differentials })
    }

    pub fn spaces(&self) -> &[usize] {
        &self.spaces
    }

    /// The map `C_i -> C_{i-1}`, for `1 <= i <= m`.
    pub fn differential(&self, i: usize) -> Option<&RationalMatrix> {
        if i == 0 {
            None
        } else {
            self.differentials.get(i - 1)
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating_sum(&self.spaces)
    }

    /// Checks `d_i . d_{i+1} = 0` for every consecutive pair.
    pub fn check_composites(&self) -> Result<()> {
        for i in 1..self.differentials.len() {
            let lower = &self.differentials[i - 1];
            let upper = &self.differentials[i];
            if lower.rows() == 0 || upper.cols() == 0 || lower.is_zero() || upper.is_zero() {
                continue;
            }
            if !lower.mul(upper)?.is_zero() {
                return Err(Error::CompositeNotZero { upper: i + 1, lower: i });
            }
        }
        Ok(())
    }
}

pub fn alternating_sum(v: &[usize]) -> i64 {
    v.iter()
        .enumerate()
        .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
        .sum()
}

/// Homology dimensions `h_0, ..., h_m` of a chain complex.
pub fn homology_dims(c: &ChainComplex) -> Result<Vec<usize>> {
    c.check_composites()?;
    let ranks: Vec<usize> = c.differentials.iter().map(rank).collect();
    let m = c.spaces.len();
    let h: Vec<usize> = (0..m)
        .map(|i| {
            let out = if i >= 1 { ranks[i - 1] } else { 0 };
            let inc = if i + 1 < m { ranks[i] } else { 0 };
            c.spaces[i] - out - inc
        })
        .collect();
    debug_assert_eq!(alternating_sum(&h), c.euler_characteristic());
    Ok(h)
}
