pub mod cli;
pub mod engines;
pub mod eval;
pub mod lattice;
pub mod logic;
pub mod measure;
