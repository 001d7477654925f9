//! Functions on finite domains with their lattice operations: indicator-approximating
//! sequences, inessential values, cover refinement, and special pairs.

mod cover;
mod function;
mod functional;
mod indicator;
mod inessential;
mod special;

pub use cover::{cover_violations, refine_cover, RefinedCover, RefinedMember, Split};
pub use function::LatticeFn;
pub use functional::{
    spot_check, FunctionalError, HiddenWeights, PositiveFunctional, TableFunctional, ZeroFunctional,
};
pub use indicator::{
    stabilization_index, value_seq, Combine, IndicatorSeq, Interval, Mode, STABILIZATION_CAP,
};
pub use inessential::{
    find_inessential, is_inessential, InessentialCheck, InessentialChoice, MAX_DYADIC_DEPTH,
};
pub use special::{classify_pair, is_almost_special, is_special, star_combine, PairKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error(
        "interval does not match the sequence mode (open intervals increase, closed ones decrease)"
    )]
    MixedModes,
    #[error("bad interval: {0}")]
    BadInterval(String),
    #[error("functions live on different domains")]
    DomainMismatch,
    #[error(
        "sequence not exactly stable by index {cap}; an endpoint is too close to a function value"
    )]
    NoStabilization { cap: u64 },
    #[error("I(h_n) still changing after stabilization at n = {at}")]
    NonConvergent { at: u64 },
    #[error("no inessential value found within the scan budget")]
    ExhaustedBudget,
    #[error("the almost-special test needs a measure")]
    MissingMeasure,
    #[error("cover member {0} is not in the algebra generated by the positivity sets")]
    NotRepresentable(usize),
    #[error("the given sets do not cover the target")]
    NotACover,
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}
