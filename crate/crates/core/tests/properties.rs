use derham_core::ideal::{normal_form, zero_dim_radical};
use derham_core::linalg::{alternating_sum, homology_dims, nullspace, rank, rat_frac};
use derham_core::weyl::{standard_partials, transform_operators};
use derham_core::{
    assembled_complexes, groebner, rat, window_koszul_complex, AffineChange, CechSpec, ChainComplex, Ideal, ModuleKind,
    Monomial, MonomialOrder, Polynomial, Rational, RationalMatrix, Source, TruncationWindow, WeylElement,
};
use num_traits::Zero;
use proptest::prelude::*;

/// Plain Gaussian elimination, kept apart from the library's rank code.
fn oracle_rank(rows: &[Vec<Rational>]) -> usize {
    let mut a = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

fn small_rat() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| rat_frac(n, d))
}

fn sparse_rat() -> impl Strategy<Value = Rational> {
    prop_oneof![3 => Just(rat(0)), 2 => small_rat()]
}

fn matrix(max: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(sparse_rat(), c), r))
}

fn poly(n: usize, deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((small_rat(), prop::collection::vec(0..=deg, n)), 0..5).prop_map(move |terms| {
        let mut p = Polynomial::zero(n);
        for (c, e) in terms {
            p.add_term(Monomial(e), c);
        }
        p
    })
}

fn weyl_elem(n: usize) -> impl Strategy<Value = WeylElement> {
    prop::collection::vec((-3i64..=3, prop::collection::vec(0u32..=2, n), prop::collection::vec(0u32..=2, n)), 0..4)
        .prop_map(move |terms| {
            let mut w = WeylElement::zero(n);
            for (c, a, b) in terms {
                w.add_term(a, b, rat(c));
            }
            w
        })
}

fn invertible_change(n: usize) -> impl Strategy<Value = AffineChange> {
    (prop::collection::vec(prop::collection::vec(-2i64..=2, n), n), prop::collection::vec(-2i64..=2, n))
        .prop_filter_map("singular", move |(m, s)| {
            let rows: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect();
            let shift = s.iter().map(|&v| rat(v)).collect();
            AffineChange::new(RationalMatrix::from_dense(&rows).ok()?, shift).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_matches_oracle(rows in matrix(7)) {
        let m = RationalMatrix::from_dense(&rows).unwrap();
        prop_assert_eq!(rank(&m), oracle_rank(&rows));
    }

    #[test]
    fn rank_invariant_under_transpose_and_permutation(rows in matrix(7), seed in any::<u64>()) {
        let m = RationalMatrix::from_dense(&rows).unwrap();
        let r = rank(&m);
        prop_assert_eq!(rank(&m.transpose()), r);
        let mut rp: Vec<usize> = (0..m.rows()).collect();
        let mut cp: Vec<usize> = (0..m.cols()).collect();
        rp.rotate_left(seed as usize % m.rows());
        cp.reverse();
        prop_assert_eq!(rank(&m.permute_rows(&rp).permute_cols(&cp)), r);
        prop_assert!(r <= m.rows().min(m.cols()));
    }

    #[test]
    fn nullspace_has_complementary_dimension(rows in matrix(6)) {
        let m = RationalMatrix::from_dense(&rows).unwrap();
        let ns = nullspace(&m);
        prop_assert_eq!(ns.len() + rank(&m), m.cols());
        for v in &ns {
            for row in &rows {
                let dot = row.iter().zip(v).fold(rat(0), |acc, (a, b)| acc + a * b);
                prop_assert!(dot.is_zero());
            }
        }
    }

    /// A three-term complex built from a matrix and a basis of its kernel.
    #[test]
    fn euler_characteristic_of_random_complexes(rows in matrix(6)) {
        let d1 = RationalMatrix::from_dense(&rows).unwrap();
        let ker = nullspace(&d1);
        let d2 = derham_core::linalg::columns_to_matrix(d1.cols(), &ker);
        let spaces = vec![d1.rows(), d1.cols(), ker.len()];
        let c = ChainComplex::new(spaces, vec![d1, d2]).unwrap();
        let h = homology_dims(&c).unwrap();
        prop_assert_eq!(alternating_sum(&h), c.euler_characteristic());
        // the kernel is exactly filled by the image
        prop_assert_eq!(h[1], 0);
        prop_assert_eq!(h[2], 0);
    }

    #[test]
    fn leibniz_rule(f in poly(3, 3), g in poly(3, 3), i in 0usize..3) {
        let lhs = (&f * &g).partial_derivative(i).unwrap();
        let rhs = &(&f.partial_derivative(i).unwrap() * &g) + &(&f * &g.partial_derivative(i).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_is_a_ring_map(f in poly(2, 3), g in poly(2, 3), t in invertible_change(2)) {
        let s = |p: &Polynomial| p.substitute_affine(&t).unwrap();
        prop_assert_eq!(s(&(&f * &g)), &s(&f) * &s(&g));
        prop_assert_eq!(s(&(&f + &g)), &s(&f) + &s(&g));
        prop_assert_eq!(s(&f).substitute_affine(&t.inverse()).unwrap(), f);
    }

    #[test]
    fn exact_division_recovers_factor(f in poly(2, 3), g in poly(2, 2)) {
        prop_assume!(!g.is_zero());
        prop_assert_eq!((&f * &g).divide_exact(&g).unwrap(), Some(f));
    }

    #[test]
    fn weyl_product_is_associative(a in weyl_elem(2), b in weyl_elem(2), c in weyl_elem(2)) {
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn weyl_product_acts_as_composition(a in weyl_elem(2), b in weyl_elem(2), p in poly(2, 4)) {
        let lhs = a.mul(&b).unwrap().apply(&p).unwrap();
        prop_assert_eq!(lhs, a.apply(&b.apply(&p).unwrap()).unwrap());
    }

    #[test]
    fn transformed_partials_commute(t in invertible_change(3)) {
        let ops = transform_operators(&t);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!(ops[i].commutator(&ops[j]).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn transformed_partials_differentiate_the_new_coordinates(t in invertible_change(2), p in poly(2, 3)) {
        // With U = t(X) and q = p o t^-1 (p written in U), d/dU_i p = (dq/dU_i) o t.
        let ops = transform_operators(&t);
        let q = p.substitute_affine(&t.inverse()).unwrap();
        for i in 0..2 {
            let via_u = q.partial_derivative(i).unwrap().substitute_affine(&t).unwrap();
            prop_assert_eq!(ops[i].apply(&p).unwrap(), via_u);
        }
    }

    #[test]
    fn groebner_basis_reduces_its_ideal(f in poly(2, 2), g in poly(2, 2), h in poly(2, 1)) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let ideal = Ideal::new(2, vec![f.clone(), g.clone()]).unwrap();
        let gb = groebner(&ideal, &MonomialOrder::degrevlex(2));
        prop_assert!(normal_form(&f, &gb).is_zero());
        prop_assert!(normal_form(&(&(&f * &h) + &g), &gb).is_zero());
        let swapped = groebner(&Ideal::new(2, vec![g, f]).unwrap(), &MonomialOrder::degrevlex(2));
        prop_assert_eq!(swapped.basis(), gb.basis());
    }
}

fn x() -> Polynomial {
    Polynomial::var(2, 0)
}

fn y() -> Polynomial {
    Polynomial::var(2, 1)
}

#[test]
fn radical_drops_multiplicity() {
    let i = Ideal::new(2, vec![x().pow(3), &y() - &Polynomial::one(2)]).unwrap();
    let rad = zero_dim_radical(&i).unwrap();
    let gb = groebner(&rad, &MonomialOrder::degrevlex(2));
    assert!(gb.contains(&x()));
    assert_eq!(gb.staircase_dim().finite(), Some(1));
}

#[test]
fn window_complexes_close_up() {
    for kind in [ModuleKind::Polynomial, ModuleKind::InjectiveHull, ModuleKind::Localized(&x() * &y())] {
        let w = TruncationWindow::new(-5, 3, 3).unwrap();
        let c = window_koszul_complex(&kind, 2, &standard_partials(2), &w).unwrap();
        c.check_composites().unwrap();
        assert_eq!(alternating_sum(&homology_dims(&c).unwrap()), c.euler_characteristic());
    }
}

#[test]
fn strand_complexes_satisfy_euler() {
    let spec = CechSpec::new(vec![&x().pow(2) - &Polynomial::one(2), y()]).unwrap();
    for c in assembled_complexes(Source::Cech(&spec), &standard_partials(2), 4, 2).unwrap() {
        c.check_composites().unwrap();
        assert_eq!(alternating_sum(&homology_dims(&c).unwrap()), c.euler_characteristic());
    }
}
