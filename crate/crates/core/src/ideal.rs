//! Gröbner bases and the zero-dimensional toolkit built on them.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{columns_to_matrix, nullspace, rat, Rational, RationalMatrix};
use crate::poly::{AffineChange, Monomial, MonomialOrder, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    n: usize,
    generators: Vec<Polynomial>,
}

impl Ideal {
    /// Zero generators are dropped; at least one nonzero generator must remain.
    pub fn new(n: usize, generators: Vec<Polynomial>) -> Result<Self> {
        for g in &generators {
            if g.ambient() != n {
                return Err(Error::AmbientMismatch { left: n, right: g.ambient() });
            }
        }
        let generators: Vec<Polynomial> = generators.into_iter().filter(|g| !g.is_zero()).collect();
        if generators.is_empty() {
            return Err(Error::EmptyIdeal);
        }
        Ok(Self { n, generators })
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn is_homogeneous(&self) -> bool {
        self.generators.iter().all(Polynomial::is_homogeneous)
    }

    pub fn with_generator(&self, g: Polynomial) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.push(g);
        Self::new(self.n, gens)
    }

    pub fn substitute_affine(&self, t: &AffineChange) -> Result<Self> {
        let gens = self.generators.iter().map(|g| g.substitute_affine(t)).collect::<Result<Vec<_>>>()?;
        Self::new(self.n, gens)
    }
}

/// Reduced Gröbner basis with respect to a fixed monomial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    n: usize,
    order: MonomialOrder,
    basis: Vec<Polynomial>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StaircaseDim {
    Finite(usize),
    Infinite,
}

impl StaircaseDim {
    pub fn finite(self) -> Option<usize> {
        match self {
            StaircaseDim::Finite(d) => Some(d),
            StaircaseDim::Infinite => None,
        }
    }
}

fn s_polynomial(f: &Polynomial, g: &Polynomial, order: &MonomialOrder) -> Polynomial {
    let (fm, fc) = f.leading_term(order).expect("nonzero");
    let (gm, gc) = g.leading_term(order).expect("nonzero");
    let l = fm.lcm(gm);
    let a = f.mul_monomial(&fm.quotient_of(&l)).scale(&fc.recip());
    let b = g.mul_monomial(&gm.quotient_of(&l)).scale(&gc.recip());
    &a - &b
}

/// Buchberger's algorithm with the coprime and chain criteria.
pub fn groebner(ideal: &Ideal, order: &MonomialOrder) -> GroebnerBasis {
    let n = ideal.n;
    let mut g: Vec<Polynomial> = Vec::new();
    for p in &ideal.generators {
        let (_, r) = p.divide_by(&g, order);
        if !r.is_zero() {
            g.push(r.make_monic(order));
        }
    }
    let lm = |p: &Polynomial| p.leading_monomial(order).expect("nonzero").clone();
    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..g.len() {
        for i in 0..j {
            pairs.insert((lm(&g[i]).lcm(&lm(&g[j])).degree(), i, j));
        }
    }
    while let Some(pair) = pairs.iter().next().cloned() {
        pairs.remove(&pair);
        let (_, i, j) = pair;
        done.insert((i, j));
        let (li, lj) = (lm(&g[i]), lm(&g[j]));
        if li.is_coprime(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let chain = (0..g.len()).any(|k| {
            k != i
                && k != j
                && lm(&g[k]).divides(&l)
                && done.contains(&key(i, k))
                && done.contains(&key(j, k))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&g[i], &g[j], order);
        let (_, r) = s.divide_by(&g, order);
        if r.is_zero() {
            continue;
        }
        let r = r.make_monic(order);
        if r.is_constant() {
            return GroebnerBasis { n, order: order.clone(), basis: vec![Polynomial::one(n)] };
        }
        let lr = lm(&r);
        let idx = g.len();
        g.push(r);
        for k in 0..idx {
            pairs.insert((lm(&g[k]).lcm(&lr).degree(), k, idx));
        }
    }
    reduce_basis(n, g, order)
}

fn reduce_basis(n: usize, g: Vec<Polynomial>, order: &MonomialOrder) -> GroebnerBasis {
    let lms: Vec<Monomial> = g.iter().map(|p| p.leading_monomial(order).expect("nonzero").clone()).collect();
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..g.len() {
        let redundant = (0..g.len()).any(|j| {
            j != i && lms[j].divides(&lms[i]) && (lms[j] != lms[i] || j < i)
        });
        if !redundant {
            keep.push(i);
        }
    }
    let minimal: Vec<Polynomial> = keep.iter().map(|&i| g[i].clone()).collect();
    let mut reduced = Vec::with_capacity(minimal.len());
    for (i, p) in minimal.iter().enumerate() {
        let others: Vec<Polynomial> =
            minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.clone()).collect();
        let (lmon, lc) = p.leading_term(order).expect("nonzero");
        let tail = {
            let mut t = p.clone();
            t.add_term(lmon.clone(), -lc.clone());
            t
        };
        let (_, r) = tail.divide_by(&others, order);
        let mut q = r;
        q.add_term(lmon.clone(), lc.clone());
        reduced.push(q.make_monic(order));
    }
    reduced.sort_by(|a, b| {
        order.compare(a.leading_monomial(order).expect("nonzero"), b.leading_monomial(order).expect("nonzero"))
    });
    GroebnerBasis { n, order: order.clone(), basis: reduced }
}

impl GroebnerBasis {
    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.basis.iter().map(|p| p.leading_monomial(&self.order).expect("nonzero").clone()).collect()
    }

    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        p.divide_by(&self.basis, &self.order).1
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.normal_form(p).is_zero()
    }

    pub fn to_ideal(&self) -> Ideal {
        Ideal::new(self.n, self.basis.clone()).expect("basis is nonempty")
    }

    /// Standard monomials when the staircase is bounded.
    pub fn standard_monomials(&self) -> Option<Vec<Monomial>> {
        let lms = self.leading_monomials();
        let mut bounds = vec![0u32; self.n];
        for (i, b) in bounds.iter_mut().enumerate() {
            let pure = lms
                .iter()
                .filter(|m| m.0.iter().enumerate().all(|(j, &e)| j == i || e == 0))
                .map(|m| m.0[i])
                .min()?;
            *b = pure;
        }
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.n];
        loop {
            let m = Monomial(cur.clone());
            if !lms.iter().any(|l| l.divides(&m)) {
                out.push(m);
            }
            // odometer
            let mut k = 0;
            loop {
                if k == self.n {
                    return Some(out);
                }
                cur[k] += 1;
                if cur[k] < bounds[k] {
                    break;
                }
                cur[k] = 0;
                k += 1;
            }
            if self.n == 0 {
                return Some(out);
            }
        }
    }

    pub fn staircase_dim(&self) -> StaircaseDim {
        if self.is_unit() {
            return StaircaseDim::Finite(0);
        }
        match self.standard_monomials() {
            Some(v) => StaircaseDim::Finite(v.len()),
            None => StaircaseDim::Infinite,
        }
    }

    /// Size of a largest subset of variables independent modulo the leading-term ideal.
    pub fn krull_dim(&self) -> Result<usize> {
        if self.is_unit() {
            return Err(Error::UnitIdeal);
        }
        let lms = self.leading_monomials();
        let mut best = 0;
        for mask in 0u32..(1 << self.n) {
            let size = mask.count_ones() as usize;
            if size <= best {
                continue;
            }
            let independent = lms
                .iter()
                .all(|m| m.0.iter().enumerate().any(|(j, &e)| e > 0 && mask & (1 << j) == 0));
            if independent {
                best = size;
            }
        }
        Ok(best)
    }
}

pub fn normal_form(p: &Polynomial, g: &GroebnerBasis) -> Polynomial {
    g.normal_form(p)
}

fn zero_dim_basis(ideal: &Ideal) -> Result<GroebnerBasis> {
    let g = groebner(ideal, &MonomialOrder::degrevlex(ideal.n));
    if g.is_unit() {
        return Err(Error::UnitIdeal);
    }
    if g.staircase_dim() == StaircaseDim::Infinite {
        return Err(Error::NotZeroDimensional);
    }
    Ok(g)
}

/// Monic generator of `I ∩ Q[X_i]`, found as the first linear dependency
/// among the normal forms of `1, X_i, X_i^2, ...`.
pub fn minimal_polynomial(ideal: &Ideal, i: usize) -> Result<Polynomial> {
    let n = ideal.n;
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let g = zero_dim_basis(ideal)?;
    let std = g.standard_monomials().expect("zero-dimensional");
    let xi = Polynomial::var(n, i);
    let mut power = Polynomial::one(n);
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    for d in 0..=std.len() {
        let nf = g.normal_form(&power);
        columns.push(std.iter().map(|m| nf.coefficient(m)).collect());
        let kernel = nullspace(&columns_to_matrix(std.len(), &columns));
        if let Some(v) = kernel.into_iter().find(|v| !v[d].is_zero()) {
            let lead = v[d].clone();
            let mut p = Polynomial::zero(n);
            for (k, c) in v.iter().enumerate() {
                let mut e = vec![0; n];
                e[i] = k as u32;
                p.add_term(Monomial(e), c / &lead);
            }
            return Ok(p);
        }
        power = &power * &xi;
    }
    unreachable!("the powers of a variable are dependent in a finite-dimensional quotient")
}

/// `I + (sqfree(m_1), ..., sqfree(m_n))`, returned as its reduced degrevlex basis.
pub fn zero_dim_radical(ideal: &Ideal) -> Result<Ideal> {
    zero_dim_basis(ideal)?;
    let mut gens = ideal.generators.clone();
    for i in 0..ideal.n {
        gens.push(minimal_polynomial(ideal, i)?.squarefree_part()?);
    }
    let rad = Ideal::new(ideal.n, gens)?;
    Ok(groebner(&rad, &MonomialOrder::degrevlex(ideal.n)).to_ideal())
}

/// Number of points of `V(I)` over the algebraic closure.
pub fn affine_point_count(ideal: &Ideal) -> Result<usize> {
    let rad = zero_dim_radical(ideal)?;
    let g = groebner(&rad, &MonomialOrder::degrevlex(ideal.n));
    Ok(g.staircase_dim().finite().expect("radical of a zero-dimensional ideal"))
}

/// `I : f^∞`, by eliminating `t` from `I + (t f - 1)`.
pub fn saturate(ideal: &Ideal, f: &Polynomial) -> Result<Ideal> {
    let n = ideal.n;
    if f.ambient() != n {
        return Err(Error::AmbientMismatch { left: n, right: f.ambient() });
    }
    if f.is_zero() {
        return Err(Error::ZeroDivisor);
    }
    let mut gens: Vec<Polynomial> = ideal.generators.iter().map(|g| g.extend(1)).collect();
    let t = Polynomial::var(n + 1, n);
    gens.push(&(&t * &f.extend(1)) - &Polynomial::one(n + 1));
    let mut priority = vec![n];
    priority.extend(0..n);
    let g = groebner(&Ideal::new(n + 1, gens)?, &MonomialOrder::lex_with(priority));
    let kept: Vec<Polynomial> = g
        .basis()
        .iter()
        .filter(|p| p.degree_in(n).finite() == Some(0))
        .map(|p| p.restrict(n))
        .collect::<Result<_>>()?;
    let sat = Ideal::new(n, kept)?;
    Ok(groebner(&sat, &MonomialOrder::degrevlex(n)).to_ideal())
}

/// Whether `p` lies in the radical of `I` (Rabinowitsch trick).
pub fn radical_membership(p: &Polynomial, ideal: &Ideal) -> Result<bool> {
    let n = ideal.n;
    if p.ambient() != n {
        return Err(Error::AmbientMismatch { left: n, right: p.ambient() });
    }
    if p.is_zero() {
        return Ok(true);
    }
    let mut gens: Vec<Polynomial> = ideal.generators.iter().map(|g| g.extend(1)).collect();
    let t = Polynomial::var(n + 1, n);
    gens.push(&(&t * &p.extend(1)) - &Polynomial::one(n + 1));
    let g = groebner(&Ideal::new(n + 1, gens)?, &MonomialOrder::degrevlex(n + 1));
    Ok(g.is_unit())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveCount {
    pub count: usize,
    /// Number of random changes drawn, including the accepted one.
    pub attempts: usize,
    pub change: AffineChange,
}

/// Number of points of the projective variety of a homogeneous ideal of
/// height `n - 1`, counted after a random homogeneous change of variables that
/// moves every point off the hyperplane `X_n = 0`.
pub fn projective_point_count(ideal: &Ideal, seed: u64, retries: usize) -> Result<ProjectiveCount> {
    let n = ideal.n;
    if !ideal.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    if n < 2 {
        return Err(Error::WrongHeight { expected: 1, found: 0 });
    }
    let g = groebner(ideal, &MonomialOrder::degrevlex(n));
    let dim = g.krull_dim()?;
    if dim != 1 {
        return Err(Error::WrongHeight { expected: 1, found: dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = n - 1;
    for attempt in 1..=retries {
        let entries: Vec<Vec<Rational>> =
            (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-5..=5))).collect()).collect();
        let matrix = RationalMatrix::from_dense(&entries)?;
        let change = match AffineChange::new(matrix, vec![Rational::zero(); n]) {
            Ok(c) => c,
            Err(Error::SingularChange) => continue,
            Err(e) => return Err(e),
        };
        let moved = ideal.substitute_affine(&change)?;
        let at_infinity = moved.with_generator(Polynomial::var(n, last))?;
        let mut clean = true;
        for j in 0..n {
            if !radical_membership(&Polynomial::var(n, j), &at_infinity)? {
                clean = false;
                break;
            }
        }
        if !clean {
            continue;
        }
        let affine_gens: Vec<Polynomial> =
            moved.generators().iter().map(|p| p.dehomogenize(last)).collect::<Result<_>>()?;
        let affine = Ideal::new(n - 1, affine_gens)?;
        let count = match affine_point_count(&affine) {
            Ok(c) => c,
            Err(Error::NotZeroDimensional) | Err(Error::UnitIdeal) => continue,
            Err(e) => return Err(e),
        };
        return Ok(ProjectiveCount { count, attempts: attempt, change });
    }
    Err(Error::NoGoodChangeFound { attempts: retries })
}

/// Outcome of splitting `V(I)` into rational points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointSet {
    Rational(Vec<Vec<Rational>>),
    NotRational,
}

/// All points of a zero-dimensional `V(I)`, when every one of them is rational.
pub fn rational_points(ideal: &Ideal) -> Result<PointSet> {
    let n = ideal.n;
    let rad = zero_dim_radical(ideal)?;
    let mut per_var: Vec<Vec<Rational>> = Vec::with_capacity(n);
    for i in 0..n {
        let m = minimal_polynomial(&rad, i)?;
        let u = m.to_uni(i);
        let roots = u.rational_roots();
        if roots.len() < u.degree() {
            return Ok(PointSet::NotRational);
        }
        per_var.push(roots);
    }
    let mut points: Vec<Vec<Rational>> = vec![vec![]];
    for roots in &per_var {
        points = points
            .into_iter()
            .flat_map(|p| {
                roots.iter().map(move |r| {
                    let mut q = p.clone();
                    q.push(r.clone());
                    q
                })
            })
            .collect();
    }
    points.retain(|p| rad.generators().iter().all(|g| g.evaluate(p).is_zero()));
    let expected = affine_point_count(&rad)?;
    if points.len() != expected {
        return Ok(PointSet::NotRational);
    }
    Ok(PointSet::Rational(points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var(2, 0)
    }
    fn y() -> Polynomial {
        Polynomial::var(2, 1)
    }
    fn one() -> Polynomial {
        Polynomial::one(2)
    }
    fn ideal(gens: Vec<Polynomial>) -> Ideal {
        Ideal::new(2, gens).unwrap()
    }

    #[test]
    fn groebner_examples() {
        let g = groebner(&ideal(vec![x(), y()]), &MonomialOrder::lex(2));
        assert_eq!(g.basis().len(), 2);
        let g = groebner(&ideal(vec![&x().pow(2) - &one(), y()]), &MonomialOrder::lex(2));
        assert_eq!(g.basis(), &[y(), &x().pow(2) - &one()]);
        let g = groebner(&ideal(vec![&(&x() * &y()) - &one(), x().pow(2)]), &MonomialOrder::lex(2));
        assert!(g.is_unit());
    }

    #[test]
    fn normal_forms() {
        let g = groebner(&ideal(vec![&x().pow(2) - &one(), y()]), &MonomialOrder::degrevlex(2));
        assert_eq!(g.normal_form(&x().pow(2)), one());
        assert!(g.normal_form(&(&y() * &x())).is_zero());
        assert_eq!(g.normal_form(&x().pow(3)), x());
    }

    #[test]
    fn staircase_and_krull() {
        let ord = MonomialOrder::degrevlex(2);
        assert_eq!(groebner(&ideal(vec![x(), y()]), &ord).staircase_dim(), StaircaseDim::Finite(1));
        assert_eq!(
            groebner(&ideal(vec![&x().pow(2) - &one(), y()]), &ord).staircase_dim(),
            StaircaseDim::Finite(2)
        );
        assert_eq!(groebner(&ideal(vec![x()]), &ord).staircase_dim(), StaircaseDim::Infinite);
        assert_eq!(groebner(&ideal(vec![x(), y()]), &ord).krull_dim(), Ok(0));
        assert_eq!(groebner(&ideal(vec![&x() * &y()]), &ord).krull_dim(), Ok(1));
        let x3 = Ideal::new(3, vec![Polynomial::var(3, 0)]).unwrap();
        assert_eq!(groebner(&x3, &MonomialOrder::degrevlex(3)).krull_dim(), Ok(2));
        assert_eq!(groebner(&ideal(vec![one()]), &ord).krull_dim(), Err(Error::UnitIdeal));
    }

    #[test]
    fn minimal_polynomials() {
        let i = ideal(vec![&x().pow(2) - &one(), y()]);
        assert_eq!(minimal_polynomial(&i, 0).unwrap(), &x().pow(2) - &one());
        assert_eq!(minimal_polynomial(&i, 1).unwrap(), y());
        let j = ideal(vec![&x() - &y(), &y().pow(2) - &one().scale(&rat(2))]);
        assert_eq!(minimal_polynomial(&j, 0).unwrap(), &x().pow(2) - &one().scale(&rat(2)));
        assert_eq!(minimal_polynomial(&ideal(vec![x()]), 0), Err(Error::NotZeroDimensional));
    }

    #[test]
    fn radicals_and_counts() {
        let r = zero_dim_radical(&ideal(vec![x().pow(2), y()])).unwrap();
        let g = groebner(&r, &MonomialOrder::degrevlex(2));
        assert_eq!(g.basis(), groebner(&ideal(vec![x(), y()]), &MonomialOrder::degrevlex(2)).basis());
        let i = ideal(vec![&x().pow(2) - &one(), y()]);
        assert_eq!(groebner(&zero_dim_radical(&i).unwrap(), &MonomialOrder::degrevlex(2)).basis(),
            groebner(&i, &MonomialOrder::degrevlex(2)).basis());
        let k = ideal(vec![&(&x() - &one()).pow(2) * &(&x() + &one()), y().pow(3)]);
        let rk = zero_dim_radical(&k).unwrap();
        assert_eq!(groebner(&rk, &MonomialOrder::degrevlex(2)).staircase_dim(), StaircaseDim::Finite(2));

        assert_eq!(affine_point_count(&ideal(vec![x().pow(2), y()])), Ok(1));
        assert_eq!(affine_point_count(&ideal(vec![&x().pow(2) - &one(), y()])), Ok(2));
        assert_eq!(affine_point_count(&ideal(vec![&x().pow(2) + &one(), y()])), Ok(2));
        assert_eq!(affine_point_count(&ideal(vec![one()])), Err(Error::UnitIdeal));
    }

    #[test]
    fn saturation() {
        let s = saturate(&ideal(vec![&x() * &y()]), &x()).unwrap();
        assert_eq!(s.generators(), &[y()]);
        let s = saturate(&ideal(vec![x()]), &y()).unwrap();
        assert_eq!(s.generators(), &[x()]);
        // (x^2, xy) = (x) ∩ (x^2, y); both components contain x.
        let s = saturate(&ideal(vec![x().pow(2), &x() * &y()]), &x()).unwrap();
        assert_eq!(s.generators(), &[one()]);
        assert_eq!(saturate(&ideal(vec![x()]), &Polynomial::zero(2)), Err(Error::ZeroDivisor));
    }

    #[test]
    fn radical_membership_examples() {
        assert_eq!(radical_membership(&x(), &ideal(vec![x().pow(2)])), Ok(true));
        assert_eq!(radical_membership(&y(), &ideal(vec![x().pow(2)])), Ok(false));
        let s = &x() + &y();
        assert_eq!(radical_membership(&s, &ideal(vec![s.pow(3), &x() - &y()])), Ok(true));
    }

    #[test]
    fn projective_counts() {
        for seed in [1, 2, 3] {
            assert_eq!(projective_point_count(&ideal(vec![x()]), seed, 32).unwrap().count, 1);
            assert_eq!(projective_point_count(&ideal(vec![&x() * &y()]), seed, 32).unwrap().count, 2);
            assert_eq!(
                projective_point_count(&ideal(vec![&x().pow(2) + &y().pow(2)]), seed, 32).unwrap().count,
                2
            );
        }
        assert_eq!(
            projective_point_count(&ideal(vec![&x().pow(2) + &y()]), 0, 32),
            Err(Error::NotHomogeneous)
        );
        assert_eq!(
            projective_point_count(&ideal(vec![x(), y()]), 0, 32),
            Err(Error::WrongHeight { expected: 1, found: 0 })
        );
    }

    #[test]
    fn rational_point_sets() {
        match rational_points(&ideal(vec![&x().pow(2) - &one(), y()])).unwrap() {
            PointSet::Rational(p) => assert_eq!(p, vec![vec![rat(-1), rat(0)], vec![rat(1), rat(0)]]),
            PointSet::NotRational => panic!("points are rational"),
        }
        assert_eq!(rational_points(&ideal(vec![&x().pow(2) + &one(), y()])).unwrap(), PointSet::NotRational);
        assert_eq!(
            rational_points(&ideal(vec![x(), y()])).unwrap(),
            PointSet::Rational(vec![vec![rat(0), rat(0)]])
        );
    }
}
