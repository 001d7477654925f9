//! The finite constructions behind the representation theorems: axiom theories,
//! models over finite domains, and checks of the properties those models must have.

mod daniell;
mod pushdown;
mod report;
mod riesz;
mod stone;

pub use daniell::{
    daniell_model, daniell_theory, Combination, DaniellInstance, DaniellModel,
    DEFAULT_SEPARATION_CAP, MAX_ENDPOINTS, MAX_THEORY_FUNCTIONS,
};
pub use pushdown::{pushdown_check, PushdownInstance, PushdownReport, SubclaimCheck, Transfer};
pub use report::{
    id_list, real_list, Cell, ConstructionReport, DiniReport, FunctionResidual, KvWriter,
};
pub use riesz::{riesz_model, uniform_grid, RieszInstance, Sampler};
pub use stone::{
    stone_isomorphism_check, stone_model, stone_theory, FiniteProbabilityAlgebra, IsoCheck,
    StoneIsoReport, MAX_STONE_ATOMS,
};

use crate::eval::{EvalError, StructureError};
use crate::lattice::{FunctionalError, LatticeError};
use crate::measure::MeasureError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid probability algebra: {0}")]
    BadAlgebra(String),
    #[error("{count} atoms exceed the cap of {cap}")]
    TooManyAtoms { count: usize, cap: usize },
    #[error("the domain is empty")]
    EmptyDomain,
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("invalid weight {0}")]
    BadWeight(f64),
    #[error("`{0}` cannot be used as a name")]
    BadName(String),
    #[error("`{0}` is defined twice")]
    DuplicateName(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("function `{0}` is not finite everywhere")]
    Unbounded(String),
    #[error("function `{0}` is not constant on the atoms of the algebra")]
    NotMeasurable(String),
    #[error("functions, weights and domain disagree in size")]
    DomainMismatch,
    #[error("grid must have at least two strictly increasing finite points")]
    BadGrid,
    #[error("budget exceeded: {needed} needed, cap is {cap}")]
    Budget { needed: usize, cap: usize },
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
