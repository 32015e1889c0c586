//! The Weyl algebra `A_n(Q)` in normal order (`x` before `∂`).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rat, Rational};
use crate::poly::{default_var_names, AffineChange, Monomial, Polynomial};

/// `sum c * x^alpha * ∂^beta`.
#[derive(Clone, PartialEq, Eq)]
pub struct WeylElement {
    n: usize,
    terms: BTreeMap<(Vec<u32>, Vec<u32>), Rational>,
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let names = default_var_names(self.n);
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b), c)| {
                let mut s = crate::linalg::rat_to_string(c);
                for (i, e) in a.iter().enumerate() {
                    if *e > 0 {
                        s.push_str(&format!("*{}^{}", names[i], e));
                    }
                }
                for (i, e) in b.iter().enumerate() {
                    if *e > 0 {
                        s.push_str(&format!("*d{}^{}", names[i], e));
                    }
                }
                s
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * rat((n - i) as i64) / rat((i + 1) as i64);
    }
    acc
}

fn factorial(k: u32) -> Rational {
    (1..=k).fold(Rational::one(), |acc, i| acc * rat(i as i64))
}

impl WeylElement {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::term(n, vec![0; n], vec![0; n], Rational::one())
    }

    pub fn term(n: usize, alpha: Vec<u32>, beta: Vec<u32>, c: Rational) -> Self {
        let mut w = Self::zero(n);
        w.add_term(alpha, beta, c);
        w
    }

    /// Multiplication by `X_i`.
    pub fn x(n: usize, i: usize) -> Self {
        let mut a = vec![0; n];
        a[i] = 1;
        Self::term(n, a, vec![0; n], Rational::one())
    }

    /// The partial derivative `∂_i`.
    pub fn d(n: usize, i: usize) -> Self {
        let mut b = vec![0; n];
        b[i] = 1;
        Self::term(n, vec![0; n], b, Rational::one())
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        let n = p.ambient();
        let mut w = Self::zero(n);
        for (m, c) in p.terms() {
            w.add_term(m.0.clone(), vec![0; n], c.clone());
        }
        w
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Vec<u32>, &Rational)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn add_term(&mut self, alpha: Vec<u32>, beta: Vec<u32>, c: Rational) {
        assert!(alpha.len() == self.n && beta.len() == self.n, "exponent length");
        if c.is_zero() {
            return;
        }
        let key = (alpha, beta);
        match self.terms.get_mut(&key) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(a.clone(), b.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(self.n);
        for ((a, b), c) in &self.terms {
            out.add_term(a.clone(), b.clone(), c * s);
        }
        out
    }

    /// Normal-ordered product. Uses
    /// `∂^b x^g = sum_k prod_i C(b_i,k_i) C(g_i,k_i) k_i! x^(g-k) ∂^(b-k)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.n;
        let mut out = Self::zero(n);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                let limits: Vec<u32> = (0..n).map(|i| b1[i].min(a2[i])).collect();
                let mut k = vec![0u32; n];
                loop {
                    let mut coef = c1 * c2;
                    for i in 0..n {
                        coef *= binomial(b1[i], k[i]) * binomial(a2[i], k[i]) * factorial(k[i]);
                    }
                    let alpha: Vec<u32> = (0..n).map(|i| a1[i] + a2[i] - k[i]).collect();
                    let beta: Vec<u32> = (0..n).map(|i| b1[i] - k[i] + b2[i]).collect();
                    out.add_term(alpha, beta, coef);
                    let mut j = 0;
                    while j < n {
                        if k[j] < limits[j] {
                            k[j] += 1;
                            break;
                        }
                        k[j] = 0;
                        j += 1;
                    }
                    if j == n {
                        break;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Left action on `Q[X]`: `∂^beta` by differentiation, then `x^alpha` by multiplication.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial> {
        if p.ambient() != self.n {
            return Err(Error::AmbientMismatch { left: self.n, right: p.ambient() });
        }
        let mut out = Polynomial::zero(self.n);
        for ((a, b), c) in &self.terms {
            let mut q = p.clone();
            for (i, &e) in b.iter().enumerate() {
                for _ in 0..e {
                    q = q.partial_derivative(i)?;
                }
            }
            let q = q.mul_monomial(&Monomial(a.clone())).scale(c);
            out = &out + &q;
        }
        Ok(out)
    }

    /// Coefficients `f_j` when `self = sum_j f_j ∂_j` with constant `f_j`.
    pub fn as_constant_first_order(&self) -> Result<Vec<Rational>> {
        let mut coeffs = vec![Rational::zero(); self.n];
        for ((a, b), c) in &self.terms {
            if a.iter().any(|&e| e != 0) || b.iter().sum::<u32>() != 1 {
                return Err(Error::UnsupportedOperator);
            }
            let j = b.iter().position(|&e| e == 1).expect("degree one");
            coeffs[j] = c.clone();
        }
        Ok(coeffs)
    }
}

pub fn weyl_mul(a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
    a.mul(b)
}

pub fn apply_to_polynomial(d: &WeylElement, p: &Polynomial) -> Result<Polynomial> {
    d.apply(p)
}

/// The partials `∂/∂U_i = sum_j f_ij ∂/∂X_j` with `F = (D^{-1})^T`.
pub fn transform_operators(t: &AffineChange) -> Vec<WeylElement> {
    let n = t.dim();
    let inv = t.inverse_matrix();
    (0..n)
        .map(|i| {
            let mut w = WeylElement::zero(n);
            for j in 0..n {
                // F[i][j] = inv[j][i]
                let mut b = vec![0; n];
                b[j] = 1;
                w.add_term(vec![0; n], b, inv[j][i].clone());
            }
            w
        })
        .collect()
}

/// The plain partials `∂_1, ..., ∂_n`.
pub fn standard_partials(n: usize) -> Vec<WeylElement> {
    (0..n).map(|i| WeylElement::d(n, i)).collect()
}
