use std::fmt;

use crate::logic::format_real;
use crate::measure::PointSet;

/// Line-oriented `key = value` text, optionally split into `[section]` blocks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvWriter {
    out: String,
}

impl KvWriter {
    pub fn new() -> Self {
        KvWriter::default()
    }

    pub fn kv(&mut self, key: impl fmt::Display, value: impl fmt::Display) -> &mut Self {
        self.out.push_str(&format!("{key} = {value}\n"));
        self
    }

    pub fn real(&mut self, key: impl fmt::Display, value: f64) -> &mut Self {
        self.kv(key, format_real(value))
    }

    pub fn section(&mut self, name: &str) -> &mut Self {
        self.out.push_str(&format!("[{name}]\n"));
        self
    }

    pub fn finish(&self) -> String {
        self.out.clone()
    }
}

/// Space-separated reals.
pub fn real_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format_real(*v))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Point ids of `set`, comma separated, in index order.
pub fn id_list(set: &PointSet, ids: &[String]) -> String {
    set.iter()
        .map(|i| ids[i].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

/// A cell `P_k` of the partition and its open core `P*_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub points: PointSet,
    pub open: PointSet,
    /// Stabilization index of the increasing sequence for `χ(P*_k)`.
    pub index: u64,
    /// `λ₀(P_k) = lim_n I(ξ^k_n)` for the normalized functional.
    pub lambda0: f64,
}

/// The terminal inequality for one function of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionResidual {
    pub name: String,
    /// `sup |f|`.
    pub sup: f64,
    /// Constant added to make the function positive before partitioning.
    pub shift: f64,
    /// Normalized `I(f)`.
    pub integral_i: f64,
    pub integral_lambda: f64,
    pub residual: f64,
    /// `|I(f') − ∫h dλ₀|` for the shifted `f'` and its cellwise infimum `h`.
    pub cell_residual: f64,
    /// `ε(1 + sup |f|)`.
    pub bound: f64,
    pub passed: bool,
}

/// Uniform-convergence check for the Riesz variant.
#[derive(Debug, Clone, PartialEq)]
pub struct DiniReport {
    /// First `n` with `g_n ≡ 1` on the grid.
    pub index: u64,
    /// `(n, sup(1 − g_n))` at `n = 1, 2, 4, …` and at the index.
    pub deviations: Vec<(u64, f64)>,
    pub monotone: bool,
    /// `I(g_index)` for the normalized functional; must equal `I(1) = 1`.
    pub limit: f64,
    /// Per generator, the largest jump between neighbours on the sub-grids of stride
    /// `1, 2, 4, 8` (finest first).
    pub oscillation: Vec<(String, Vec<f64>)>,
    /// Generators whose oscillation does not shrink under refinement.
    pub flagged: Vec<String>,
}

impl DiniReport {
    pub fn passed(&self) -> bool {
        self.monotone
            && self.flagged.is_empty()
            && (self.limit - 1.0).abs() <= crate::measure::TOLERANCE
    }
}

/// Everything the Daniell and Riesz constructions record.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionReport {
    pub kind: &'static str,
    pub epsilon: f64,
    pub epsilon_internal: f64,
    /// `I(1)` before normalization.
    pub scale: f64,
    /// Set when `I(1) = 0` and the zero measure was returned.
    pub zero_measure: bool,
    pub endpoints: Vec<f64>,
    pub cells: Vec<Cell>,
    pub lambda0_total: f64,
    pub lambda: Vec<f64>,
    pub functions: Vec<FunctionResidual>,
    /// `(label, violation)` for each axiom of the theory, checked on the model.
    pub axioms: Vec<(String, f64)>,
    pub dini: Option<DiniReport>,
    pub violations: Vec<String>,
}

impl ConstructionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn residual_max(&self) -> f64 {
        self.axioms.iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }

    pub fn render(&self, ids: &[String]) -> String {
        let mut w = KvWriter::new();
        w.kv("kind", self.kind)
            .real("epsilon", self.epsilon)
            .real("epsilon_internal", self.epsilon_internal)
            .real("scale", self.scale)
            .kv("zero_measure", self.zero_measure)
            .kv("endpoint_count", self.endpoints.len())
            .kv("endpoints", real_list(&self.endpoints))
            .kv("cell_count", self.cells.len());
        for (k, c) in self.cells.iter().enumerate() {
            w.kv(format!("cell.{k}.points"), id_list(&c.points, ids))
                .kv(format!("cell.{k}.open"), id_list(&c.open, ids))
                .kv(format!("cell.{k}.index"), c.index)
                .real(format!("cell.{k}.lambda0"), c.lambda0);
        }
        w.real("lambda0_total", self.lambda0_total);
        for (id, l) in ids.iter().zip(&self.lambda) {
            w.real(format!("lambda.{id}"), *l);
        }
        for f in &self.functions {
            let p = format!("function.{}", f.name);
            w.real(format!("{p}.sup"), f.sup)
                .real(format!("{p}.shift"), f.shift)
                .real(format!("{p}.integral_I"), f.integral_i)
                .real(format!("{p}.integral_lambda"), f.integral_lambda)
                .real(format!("{p}.residual"), f.residual)
                .real(format!("{p}.cell_residual"), f.cell_residual)
                .real(format!("{p}.bound"), f.bound)
                .kv(format!("{p}.passed"), f.passed);
        }
        if let Some(d) = &self.dini {
            w.kv("dini.index", d.index);
            for (n, dev) in &d.deviations {
                w.real(format!("dini.deviation.{n}"), *dev);
            }
            w.kv("dini.monotone", d.monotone)
                .real("dini.limit", d.limit);
            for (name, osc) in &d.oscillation {
                w.kv(format!("dini.oscillation.{name}"), real_list(osc));
            }
            w.kv("dini.flagged", d.flagged.join(","))
                .kv("dini.passed", d.passed());
        }
        for (i, v) in self.violations.iter().enumerate() {
            w.kv(format!("violation.{i}"), v);
        }
        w.kv("violations", self.violations.len())
            .kv("passed", self.passed())
            .section("residuals");
        for (label, v) in &self.axioms {
            w.real(label, *v);
        }
        w.real("residual_max", self.residual_max());
        w.finish()
    }
}
