//! Exact computation of De Rham (Koszul) homology for local cohomology
//! modules over polynomial rings with rational coefficients.

pub mod derham;
pub mod dmod;
pub mod error;
pub mod harness;
pub mod ideal;
pub mod linalg;
pub mod poly;
pub mod weyl;

pub use derham::{
    assembled_complexes, cech_derham_total, closed_form, koszul_complex, koszul_two_step_check, stabilized_derham,
    window_koszul_complex, ClosedFormClass, DeRhamResult, Source, StabilizationConfig, Strategy, TwoStepReport,
    WindowTrace,
};
pub use dmod::{CechSpec, ModuleKind, TruncationWindow};
pub use error::{Error, Result};
pub use harness::{
    check_theorem3_bound, property_corpus, verify_building_blocks, verify_theorem1, verify_theorem2, HarnessConfig,
    PropertyCheck, VerificationReport, Verdict,
};
pub use ideal::{groebner, GroebnerBasis, Ideal, PointSet, ProjectiveCount};
pub use linalg::{rat, ChainComplex, Rational, RationalMatrix};
pub use poly::{AffineChange, Monomial, MonomialOrder, Polynomial};
pub use weyl::WeylElement;
