//! Interpretation of languages in finite probability spaces and evaluation of
//! formulas, statements and theories.

mod ae;
mod check;
mod structure;

pub use ae::{encode_ae, AeClaim, AeError};
pub use check::{
    check_statement, check_statement_approx, check_theory, CheckConfig, CheckReport, ReportEntry,
    StatementCheck,
};
pub use structure::{EvalError, InterpretedStructure, RelationTable, StructureError};
