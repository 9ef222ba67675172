//! Orlicz functions, their Legendre conjugates and Luxemburg norms.

mod exponents;
mod function;
mod norm;
mod regularity;
mod weights;

pub use exponents::{c_const, conjugate_exponent, Exponents};
pub use function::{OrliczFunction, PiecewiseAffine, Tail, YoungFunction};
pub use norm::{equivalence_constants, luxemburg_norm, LUXEMBURG_MAX_ITER, LUXEMBURG_REL_TOL};
pub use regularity::{check_regularity, regularity_grid, Direction, RegularityReport};
pub use weights::WeightVector;
