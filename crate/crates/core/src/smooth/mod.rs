//! Gaussian-scale analysis of finitely supported measures.

mod checks;
mod detail;
mod entropy;
mod kernel;
mod measure;
pub mod quad;

pub use checks::{
    contraction_check, convolution_detail_check, entropy_to_detail_check, initial_gap_probe, ConvolutionCheck,
    ContractionCheck, EntropyDetailCheck, GapProbe, GapRow, ALPHA_GRID,
};
pub use detail::{
    detail, detail_profile, detail_with, DecayReport, DetailOptions, DetailValue, ScaleEntry, ScaleProfile,
    DETAIL_ATOM_LIMIT,
};
pub use entropy::{entropy_gauss, entropy_gauss_with_error, entropy_slope, fisher_slope, SlopeEstimate, FD_STEP};
pub use kernel::{gamma_half, heat_kernel_r2, kernel_dy, kernel_dy_r2, KernelConstants};
pub use measure::{DiscreteMeasure, CONVOLVE_BUDGET};
