//! Certification of absolute continuity for Bernoulli convolutions and
//! self-similar measures with uniform contraction and rotation.
//!
//! The crate is organised bottom-up:
//!
//! * [`polyalg`] – exact integer polynomials, root finding, Mahler measure,
//!   irreducibility and Schur-Cohn root counting.
//! * [`criterion`] – the Mahler-measure inequality, the threshold function
//!   `F(λ)` and the closed-form checks for the explicit families.
//! * [`ifs`] – iterated function systems, exact k-step supports, separation,
//!   Garsia entropy and the certification driver.
//! * [`smooth`] – Gaussian-scale analysis: detail around a scale, smoothed
//!   entropy and numerical checks of the convolution inequalities.
//! * [`search`] – exhaustive search for certified algebraic parameters.
//! * [`verify`] – randomized inequality suites shared by the CLI and tests.

pub mod criterion;
pub mod error;
pub mod hp;
pub mod ifs;
pub mod polyalg;
pub mod search;
pub mod smooth;
pub mod verify;

mod fmt;

pub use criterion::{CriterionInput, CriterionReport};
pub use error::{Error, Result};
pub use ifs::{CertificationReport, SupportLevel, UniformIFS};
pub use polyalg::{AlgebraicParameter, IntPolynomial, RootSet};
pub use smooth::{DiscreteMeasure, KernelConstants, ScaleProfile};
