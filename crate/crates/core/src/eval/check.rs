use rayon::prelude::*;

use super::{EvalError, InterpretedStructure};
use crate::logic::{free_vars, Comparison, Statement, Theory};
use crate::measure::TOLERANCE;

/// Outcome of checking one closed statement.
#[derive(Debug, Clone, PartialEq)]
pub struct StatementCheck {
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    /// `value - threshold` for `>=`, `|value - threshold|` for `==`.
    pub residual: f64,
    pub passed: bool,
}

impl StatementCheck {
    /// How far the statement is from holding exactly: `|value - threshold|` for `==`,
    /// `max(0, threshold - value)` for `>=`.
    pub fn violation(&self) -> f64 {
        match self.comparison {
            Comparison::Equal => self.residual,
            Comparison::AtLeast => (-self.residual).max(0.0),
        }
    }
}

fn evaluate(
    m: &InterpretedStructure,
    s: &Statement,
    slack: f64,
) -> Result<StatementCheck, EvalError> {
    let free = free_vars(&s.formula);
    if !free.is_empty() {
        return Err(EvalError::OpenStatement(free));
    }
    let value = m.eval_closed(&s.formula)?;
    let (residual, passed) = match s.comparison {
        Comparison::Equal => {
            let r = (value - s.threshold).abs();
            (r, r <= slack)
        }
        Comparison::AtLeast => (value - s.threshold, value >= s.threshold - slack),
    };
    Ok(StatementCheck {
        value,
        threshold: s.threshold,
        comparison: s.comparison,
        residual,
        passed,
    })
}

/// `==` passes iff `|value - r| <= tol`; `>=` passes iff `value >= r - tol`.
pub fn check_statement(
    m: &InterpretedStructure,
    s: &Statement,
    tol: f64,
) -> Result<StatementCheck, EvalError> {
    evaluate(m, s, tol)
}

/// Satisfaction with error at most `epsilon`: `|value - r| <= ε` for `==`, `value >= r - ε` for `>=`.
pub fn check_statement_approx(
    m: &InterpretedStructure,
    s: &Statement,
    epsilon: f64,
) -> Result<StatementCheck, EvalError> {
    if epsilon < 0.0 || epsilon.is_nan() {
        return Err(EvalError::NegativeEpsilon(epsilon));
    }
    evaluate(m, s, epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    /// Semantic approximation parameter.
    pub epsilon: f64,
    /// Allowance for floating-point noise, added to `epsilon`.
    pub tol: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            epsilon: 0.0,
            tol: TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub label: Option<String>,
    pub outcome: Result<StatementCheck, EvalError>,
}

impl ReportEntry {
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, Ok(c) if c.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub entries: Vec<ReportEntry>,
}

impl CheckReport {
    pub fn pass_count(&self) -> usize {
        self.entries.iter().filter(|e| e.passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(ReportEntry::passed)
    }

    /// Largest [`StatementCheck::violation`] over the evaluated statements (0 if none).
    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .filter_map(|e| e.outcome.as_ref().ok())
            .map(StatementCheck::violation)
            .fold(0.0, f64::max)
    }
}

/// Checks every statement at slack `epsilon + tol`. Statements are evaluated in
/// parallel and reported in theory order; evaluation errors are recorded per entry.
pub fn check_theory(
    m: &InterpretedStructure,
    theory: &Theory,
    config: CheckConfig,
) -> Result<CheckReport, EvalError> {
    if config.epsilon < 0.0 || config.epsilon.is_nan() {
        return Err(EvalError::NegativeEpsilon(config.epsilon));
    }
    let slack = config.epsilon + config.tol;
    let entries = theory
        .entries()
        .par_iter()
        .map(|e| ReportEntry {
            label: e.label.clone(),
            outcome: evaluate(m, &e.statement, slack),
        })
        .collect();
    Ok(CheckReport { entries })
}
