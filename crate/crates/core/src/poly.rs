//! Sparse multivariate polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rat, rat_to_string, rref, Rational, RationalMatrix};

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// Total degree with an explicit marker for the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    DegRevLex,
}

/// A monomial order together with a variable priority: `priority[0]` is the
/// most significant variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub priority: Vec<usize>,
}

impl MonomialOrder {
    pub fn lex(n: usize) -> Self {
        Self { kind: OrderKind::Lex, priority: (0..n).collect() }
    }

    pub fn degrevlex(n: usize) -> Self {
        Self { kind: OrderKind::DegRevLex, priority: (0..n).collect() }
    }

    pub fn lex_with(priority: Vec<usize>) -> Self {
        Self { kind: OrderKind::Lex, priority }
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.kind {
            OrderKind::Lex => {
                for &v in &self.priority {
                    match a.0[v].cmp(&b.0[v]) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            OrderKind::DegRevLex => match a.degree().cmp(&b.degree()) {
                Ordering::Equal => {
                    for &v in self.priority.iter().rev() {
                        match a.0[v].cmp(&b.0[v]) {
                            Ordering::Equal => continue,
                            o => return o.reverse(),
                        }
                    }
                    Ordering::Equal
                }
                o => o,
            },
        }
    }
}

/// Element of `Q[X_1, ..., X_n]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&default_var_names(self.n)))
    }
}

/// `x, y, z, w` for up to four variables, `x1..xn` beyond.
pub fn default_var_names(n: usize) -> Vec<String> {
    if n <= 4 {
        ["x", "y", "z", "w"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::one(n), c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn var(n: usize, i: usize) -> Self {
        Self::term(Monomial::var(n, i), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(m.len());
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs.
    pub fn from_terms(n: usize, terms: &[(i64, &[u32])]) -> Self {
        let mut p = Self::zero(n);
        for (c, e) in terms {
            assert_eq!(e.len(), n, "exponent vector length");
            p.add_term(Monomial(e.to_vec()), rat(*c));
        }
        p
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        assert_eq!(m.len(), self.n, "monomial length must match ambient ring");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut out = Self::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self { n: self.n, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Self { n: self.n, terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.n);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    pub fn partial_derivative(&self, i: usize) -> Result<Self> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[i] -= 1;
            out.add_term(dm, c * rat(e as i64));
        }
        Ok(out)
    }

    pub fn degree(&self) -> Degree {
        self.terms.keys().map(Monomial::degree).max().map_or(Degree::NegInfinity, Degree::Finite)
    }

    pub fn degree_in(&self, i: usize) -> Degree {
        self.terms.keys().map(|m| m.0[i]).max().map_or(Degree::NegInfinity, Degree::Finite)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Every term has the same exponent in variable `i`.
    pub fn is_homogeneous_in(&self, i: usize) -> bool {
        let mut degs = self.terms.keys().map(|m| m.0[i]);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Weighted degree for a homogeneous polynomial under weight vector `w`.
    pub fn weighted_degree(&self, w: &[i64]) -> Option<i64> {
        let mut it = self
            .terms
            .keys()
            .map(|m| m.0.iter().zip(w).map(|(e, wi)| *e as i64 * wi).sum::<i64>());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_weighted_homogeneous(&self, w: &[i64]) -> bool {
        self.is_zero() || self.weighted_degree(w).is_some()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.compare(a.0, b.0))
    }

    pub fn leading_monomial(&self, order: &MonomialOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|t| t.0)
    }

    pub fn leading_coefficient(&self, order: &MonomialOrder) -> Option<&Rational> {
        self.leading_term(order).map(|t| t.1)
    }

    pub fn make_monic(&self, order: &MonomialOrder) -> Self {
        match self.leading_coefficient(order) {
            None => self.clone(),
            Some(c) => self.scale(&c.recip()),
        }
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (e, x) in m.0.iter().zip(point) {
                for _ in 0..*e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Variables that occur in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.terms.keys().any(|m| m.0[i] > 0)).collect()
    }

    /// Embeds into a ring with `extra` additional trailing variables.
    pub fn extend(&self, extra: usize) -> Self {
        Self {
            n: self.n + extra,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.extend(std::iter::repeat_n(0, extra));
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Sets variable `i` to 1 and removes it from the ring.
    pub fn dehomogenize(&self, i: usize) -> Result<Self> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        let mut out = Self::zero(self.n - 1);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.remove(i);
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Drops trailing variables that do not occur; errors if they do.
    pub fn restrict(&self, n: usize) -> Result<Self> {
        let mut out = Self::zero(n);
        for (m, c) in &self.terms {
            if m.0[n..].iter().any(|&e| e > 0) {
                return Err(Error::AmbientMismatch { left: self.n, right: n });
            }
            out.add_term(Monomial(m.0[..n].to_vec()), c.clone());
        }
        Ok(out)
    }

    /// Remainder and quotients of division by `divisors` under `order`.
    pub fn divide_by(&self, divisors: &[Polynomial], order: &MonomialOrder) -> (Vec<Polynomial>, Polynomial) {
        let leads: Vec<(Monomial, Rational)> = divisors
            .iter()
            .map(|d| {
                let (m, c) = d.leading_term(order).expect("nonzero divisor");
                (m.clone(), c.clone())
            })
            .collect();
        let mut quotients = vec![Polynomial::zero(self.n); divisors.len()];
        let mut remainder = Polynomial::zero(self.n);
        let mut p = self.clone();
        while let Some((lm, lc)) = p.leading_term(order).map(|(m, c)| (m.clone(), c.clone())) {
            let hit = leads.iter().position(|(m, _)| m.divides(&lm));
            match hit {
                Some(k) => {
                    let factor_m = leads[k].0.quotient_of(&lm);
                    let factor_c = &lc / &leads[k].1;
                    quotients[k].add_term(factor_m.clone(), factor_c.clone());
                    let sub = divisors[k].mul_monomial(&factor_m).scale(&factor_c);
                    p = &p - &sub;
                }
                None => {
                    remainder.add_term(lm.clone(), lc.clone());
                    p.terms.remove(&lm);
                }
            }
        }
        (quotients, remainder)
    }

    /// Exact quotient `self / f`, or `None` when `f` does not divide `self`.
    pub fn divide_exact(&self, f: &Polynomial) -> Result<Option<Polynomial>> {
        self.check_ambient(f)?;
        if f.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let order = MonomialOrder::degrevlex(self.n);
        let (mut q, r) = self.divide_by(std::slice::from_ref(f), &order);
        Ok(r.is_zero().then(|| q.pop().expect("one quotient")))
    }

    pub fn substitute_affine(&self, t: &AffineChange) -> Result<Polynomial> {
        if t.dim() != self.n {
            return Err(Error::AmbientMismatch { left: self.n, right: t.dim() });
        }
        let images = t.variable_images();
        let mut powers: Vec<Vec<Polynomial>> = images.iter().map(|u| vec![Polynomial::one(self.n), u.clone()]).collect();
        let mut out = Polynomial::zero(self.n);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(self.n, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                let e = e as usize;
                while powers[i].len() <= e {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    t = &t * &powers[i][e];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let order = MonomialOrder::degrevlex(self.n);
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| order.compare(b.0, a.0));
        let mut s = String::new();
        for (k, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.degree() == 0 {
                factors.push(rat_to_string(&abs));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            s.push_str(&factors.join("*"));
        }
        s
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("ambient mismatch in add")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("ambient mismatch in sub")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("ambient mismatch in mul")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&rat(-1))
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Affine change of variables `U_i = sum_j D_ij X_j + c_i` with `D` invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineChange {
    matrix: RationalMatrix,
    shift: Vec<Rational>,
}

impl AffineChange {
    pub fn new(matrix: RationalMatrix, shift: Vec<Rational>) -> Result<Self> {
        let n = matrix.rows();
        if matrix.cols() != n || shift.len() != n {
            return Err(Error::ShapeMismatch("affine change needs an n x n matrix and n shifts".into()));
        }
        if crate::linalg::rank(&matrix) != n {
            return Err(Error::SingularChange);
        }
        Ok(Self { matrix, shift })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: RationalMatrix::identity(n), shift: vec![Rational::zero(); n] }
    }

    pub fn translation(shift: Vec<Rational>) -> Self {
        Self { matrix: RationalMatrix::identity(shift.len()), shift }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn shift(&self) -> &[Rational] {
        &self.shift
    }

    pub fn is_homogeneous(&self) -> bool {
        self.shift.iter().all(Zero::is_zero)
    }

    /// `D^{-1}` as a dense matrix.
    pub fn inverse_matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.dim();
        let d = self.matrix.to_dense();
        let mut aug: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut row = d[i].clone();
                row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        rref(&mut aug);
        aug.into_iter().map(|row| row[n..].to_vec()).collect()
    }

    pub fn inverse(&self) -> Self {
        let inv = self.inverse_matrix();
        let n = self.dim();
        let shift = (0..n)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..n {
                    acc -= &inv[i][j] * &self.shift[j];
                }
                acc
            })
            .collect();
        Self { matrix: RationalMatrix::from_dense(&inv).expect("square"), shift }
    }

    /// The affine forms `U_i` as polynomials in the old variables.
    pub fn variable_images(&self) -> Vec<Polynomial> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut p = Polynomial::constant(n, self.shift[i].clone());
                for (j, v) in self.matrix.row(i) {
                    p.add_term(Monomial::var(n, j), v.clone());
                }
                p
            })
            .collect()
    }
}

/// Dense univariate polynomial, coefficients from low to high degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct UniPoly(pub Vec<Rational>);

impl UniPoly {
    pub fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn monic(&self) -> Self {
        match self.0.last() {
            None => self.clone(),
            Some(lc) => {
                let inv = lc.recip();
                UniPoly(self.0.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn derivative(&self) -> Self {
        UniPoly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * rat(i as i64)).collect()).trim()
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let mut r = self.0.clone();
        let dd = d.degree();
        let lc = d.0.last().expect("nonzero divisor").clone();
        if r.len() < d.0.len() {
            return (UniPoly(vec![]), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        (UniPoly(q).trim(), UniPoly(r).trim())
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone().trim(), other.clone().trim());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn to_polynomial(&self, n: usize, var: usize) -> Polynomial {
        let mut p = Polynomial::zero(n);
        for (i, c) in self.0.iter().enumerate() {
            let mut e = vec![0; n];
            e[var] = i as u32;
            p.add_term(Monomial(e), c.clone());
        }
        p
    }

    /// Rational roots of a squarefree polynomial, via the rational root test.
    pub fn rational_roots(&self) -> Vec<Rational> {
        let p = self.clone().trim();
        if p.degree() == 0 {
            return vec![];
        }
        let mut roots = Vec::new();
        let mut coeffs = p.0.clone();
        // Factor out x = 0.
        if coeffs[0].is_zero() {
            roots.push(Rational::zero());
            while coeffs.first().is_some_and(Zero::is_zero) {
                coeffs.remove(0);
            }
        }
        let mut lcm = BigInt::one();
        for c in &coeffs {
            lcm = num_integer::Integer::lcm(&lcm, c.denom());
        }
        let ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let a0 = ints[0].abs();
        let an = ints.last().expect("nonempty").abs();
        if a0.is_zero() {
            return roots;
        }
        let ps = divisors(&a0);
        let qs = divisors(&an);
        let int_poly = UniPoly(ints.iter().map(|c| Rational::from_integer(c.clone())).collect());
        let mut found: Vec<Rational> = Vec::new();
        for pdiv in &ps {
            for qdiv in &qs {
                for sign in [1i64, -1] {
                    let cand = Rational::new(pdiv * BigInt::from(sign), qdiv.clone());
                    if !found.contains(&cand) && int_poly.eval(&cand).is_zero() {
                        found.push(cand);
                    }
                }
            }
        }
        roots.extend(found);
        roots.sort();
        roots
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let other = n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out
}

impl Polynomial {
    /// The single variable this polynomial depends on, if any. Constants
    /// report `Ok(None)`.
    pub fn univariate_var(&self) -> Result<Option<usize>> {
        let vars = self.support_vars();
        match vars.len() {
            0 => Ok(None),
            1 => Ok(Some(vars[0])),
            _ => Err(Error::NotUnivariate),
        }
    }

    pub(crate) fn to_uni(&self, var: usize) -> UniPoly {
        let d = self.degree_in(var).finite().unwrap_or(0) as usize;
        let mut c = vec![Rational::zero(); d + 1];
        for (m, v) in &self.terms {
            c[m.0[var] as usize] += v;
        }
        UniPoly(c).trim()
    }

    /// Monic `u / gcd(u, u')` for a univariate `u`.
    pub fn squarefree_part(&self) -> Result<Polynomial> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let Some(var) = self.univariate_var()? else {
            return Ok(Polynomial::one(self.n));
        };
        let u = self.to_uni(var);
        let g = u.gcd(&u.derivative());
        let (q, _) = u.div_rem(&g);
        Ok(q.monic().to_polynomial(self.n, var))
    }
}
