//! The matrix spaces `ℓ_M^n(ℓ_r^n)` and their explicit image in a finite `L_1`.

mod distortion;
mod matrix;
mod psi;

pub use distortion::{
    summation_bounds, distortion_on, lower_bound_report, measure_distortion, SummationBounds, DistortionReport,
    DistortionSample, DISTORTION_LABEL,
};
pub use matrix::{matrix_norm, Matrix, MatrixSpaceNorm};
pub use psi::{build_psi, khintchine_ratio, l1_image_norm, EmbeddingMatrix, PsiEvaluator};
