//! Finite measure spaces, set algebras and their atoms, outer and subspace measures,
//! extension of premeasures, and product measures with diagonals.

mod algebra;
mod extension;
mod pointset;
mod product;
mod space;

pub use algebra::{Measure, SetAlgebra, MAX_ENUMERATED_ATOMS};
pub use extension::{caratheodory_extend, cover_outer_measure, PremeasureTable, MAX_COVER_ATOMS};
pub use pointset::PointSet;
pub use product::{ProductMeasure, MAX_TUPLES};
pub use space::FiniteMeasureSpace;

/// Tolerance for equalities between computed measures.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasureError {
    #[error("point `{point}` has invalid weight {weight}")]
    NegativeWeight { point: String, weight: f64 },
    #[error("point `{0}` listed twice")]
    DuplicatePoint(String),
    #[error("{points} points but {weights} weights")]
    LengthMismatch { points: usize, weights: usize },
    #[error("set lies outside the ambient set")]
    OutsideUniverse,
    #[error("not an algebra: {0}")]
    NotAnAlgebra(&'static str),
    #[error("set is not a member of the algebra")]
    NotMeasurable,
    #[error("{0} atoms exceed the enumeration limit")]
    TooManyAtoms(usize),
    #[error("premeasure is not finitely additive: {0}")]
    NonAdditive(String),
    #[error("the family does not cover the ambient set")]
    Uncovered,
    #[error("product dimension must be at least 1")]
    ZeroDimension,
}
