//! Integer polynomials and the algebraic-number machinery built on them.

mod irreducible;
mod mahler;
mod pm01;
mod poly;
mod roots;
mod schur_cohn;

pub use irreducible::{find_factor, is_irreducible, MAX_IRREDUCIBLE_DEGREE};
pub use mahler::{mahler_from_roots, mahler_measure, AlgebraicParameter, AlgebraicSummary, UNIT_CIRCLE_TOL};
pub use pm01::{min_pm01_value, Pm01Min, MAX_PM01_DEGREE};
pub use poly::{reciprocal_adjoint, schur_cohn_transform, IntPolynomial};
pub use roots::{
    find_roots, find_roots_with_precision, roots_f64, Root, RootRecord, RootSet, DEFAULT_ROOT_TOL,
};
pub use schur_cohn::{
    count_roots_in_disk, count_with_roots, schur_cohn_transform_f64, schur_cohn_unit_disk,
    DiskCount, BOUNDARY_TOL,
};
