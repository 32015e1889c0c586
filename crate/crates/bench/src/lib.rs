//! Fixtures shared by the benchmarks in `benches/`.

use derham_core::linalg::rat;
use derham_core::{CechSpec, Ideal, Polynomial, RationalMatrix};

/// Deterministic sparse integer matrix, about one entry in three nonzero.
pub fn sparse_matrix(rows: usize, cols: usize) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(rows, cols);
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    for r in 0..rows {
        for c in 0..cols {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let v = (state >> 33) % 9;
            if v < 3 {
                m.set(r, c, rat(v as i64 + 1 - 2 * (r as i64 % 2)));
            }
        }
    }
    m
}

fn var(n: usize, i: usize) -> Polynomial {
    Polynomial::var(n, i)
}

/// `(x^2 - 1, y^2 - 1)`: four rational points.
pub fn four_points() -> Ideal {
    let one = Polynomial::one(2);
    Ideal::new(2, vec![&var(2, 0).pow(2) - &one, &var(2, 1).pow(2) - &one]).unwrap()
}

/// A cubic and a conic meeting in six points, for Gröbner timings.
pub fn cubic_conic() -> Ideal {
    let (x, y) = (var(2, 0), var(2, 1));
    let one = Polynomial::one(2);
    let cubic = &(&x.pow(3) - &(&x * &y)) + &y.pow(2);
    let conic = &(&x.pow(2) + &y.pow(2)) - &one;
    Ideal::new(2, vec![cubic, conic]).unwrap()
}

/// Čech generators of `(x^2 - 1, y)`.
pub fn two_point_cech() -> CechSpec {
    CechSpec::new(vec![&var(2, 0).pow(2) - &Polynomial::one(2), var(2, 1)]).unwrap()
}
