use std::collections::BTreeMap;

use rayon::prelude::*;

use super::report::{Cell, ConstructionReport, FunctionResidual};
use super::EngineError;
use crate::eval::{
    check_theory, encode_ae, AeClaim, CheckConfig, InterpretedStructure, RelationTable,
};
use crate::lattice::{
    find_inessential, spot_check, stabilization_index, Combine, FunctionalError, IndicatorSeq,
    Interval, LatticeError, LatticeFn, Mode, PositiveFunctional,
};
use crate::logic::{
    derive_lattice, is_identifier, Formula, Language, LatticeKind, Statement, Symbol, Term, Theory,
    EQUALITY,
};
use crate::measure::{FiniteMeasureSpace, PointSet, SetAlgebra, TOLERANCE};

/// Default largest domain for which the separation axioms `e(c_a, c_b) = 0` are emitted.
pub const DEFAULT_SEPARATION_CAP: usize = 64;
/// Largest number of generators plus combinations in one instance.
pub const MAX_THEORY_FUNCTIONS: usize = 256;
/// Largest number of partition endpoints the construction will search for.
pub const MAX_ENDPOINTS: usize = 1 << 20;

/// A requested lattice-linear combination of earlier functions, by name.
#[derive(Debug, Clone, PartialEq)]
pub enum Combination {
    Sum(String, String),
    Scale(f64, String),
    Join(String, String),
}

impl Combination {
    fn operands(&self) -> Vec<&str> {
        match self {
            Combination::Sum(f, g) | Combination::Join(f, g) => vec![f, g],
            Combination::Scale(_, f) => vec![f],
        }
    }
}

/// A finite domain, bounded generators, requested combinations, a positive functional
/// and the target accuracy `ε`.
pub struct DaniellInstance<'a> {
    ids: Vec<String>,
    functions: Vec<(String, LatticeFn)>,
    generator_count: usize,
    combinations: Vec<(String, Combination)>,
    functional: &'a dyn PositiveFunctional,
    epsilon: f64,
    separation_cap: usize,
}

fn sup_abs(f: &LatticeFn) -> f64 {
    f.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn relation_name(f: &str) -> String {
    format!("R_{f}")
}

fn constant_name(id: &str) -> String {
    format!("c_{id}")
}

impl<'a> DaniellInstance<'a> {
    pub fn new(
        ids: Vec<String>,
        generators: Vec<(String, LatticeFn)>,
        combinations: Vec<(String, Combination)>,
        functional: &'a dyn PositiveFunctional,
        epsilon: f64,
    ) -> Result<Self, EngineError> {
        let len = ids.len();
        if len == 0 {
            return Err(EngineError::EmptyDomain);
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(EngineError::BadEpsilon(epsilon));
        }
        if functional.domain_len() != len {
            return Err(EngineError::DomainMismatch);
        }
        if let Some(id) = ids.iter().find(|id| !is_identifier(&constant_name(id))) {
            return Err(EngineError::BadName(id.clone()));
        }
        let needed = generators.len() + combinations.len();
        if needed > MAX_THEORY_FUNCTIONS {
            return Err(EngineError::Budget {
                needed,
                cap: MAX_THEORY_FUNCTIONS,
            });
        }
        let mut functions: Vec<(String, LatticeFn)> = Vec::new();
        let add = |name: &str, f: LatticeFn, functions: &mut Vec<(String, LatticeFn)>| {
            if !is_identifier(name) || !is_identifier(&relation_name(name)) {
                return Err(EngineError::BadName(name.to_string()));
            }
            if functions.iter().any(|(n, _)| n == name) {
                return Err(EngineError::DuplicateName(name.to_string()));
            }
            if f.len() != len {
                return Err(EngineError::DomainMismatch);
            }
            if f.values().iter().any(|v| !v.is_finite()) {
                return Err(EngineError::Unbounded(name.to_string()));
            }
            functions.push((name.to_string(), f));
            Ok(())
        };
        for (name, f) in generators {
            add(&name, f, &mut functions)?;
        }
        let generator_count = functions.len();
        for (name, combo) in &combinations {
            let lookup = |n: &str| {
                functions
                    .iter()
                    .find(|(m, _)| m == n)
                    .map(|(_, f)| f.clone())
                    .ok_or_else(|| EngineError::UnknownFunction(n.to_string()))
            };
            let ops: Vec<LatticeFn> = combo
                .operands()
                .into_iter()
                .map(lookup)
                .collect::<Result<_, _>>()?;
            let f = match combo {
                Combination::Sum(..) => ops[0].add(&ops[1]),
                Combination::Scale(r, _) => ops[0].scale(*r),
                Combination::Join(..) => ops[0].join(&ops[1]),
            };
            add(name, f, &mut functions)?;
        }
        Ok(DaniellInstance {
            ids,
            functions,
            generator_count,
            combinations,
            functional,
            epsilon,
            separation_cap: DEFAULT_SEPARATION_CAP,
        })
    }

    pub fn with_separation_cap(mut self, cap: usize) -> Self {
        self.separation_cap = cap;
        self
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Generators followed by the combinations, in the order given.
    pub fn functions(&self) -> &[(String, LatticeFn)] {
        &self.functions
    }

    pub fn generators(&self) -> &[(String, LatticeFn)] {
        &self.functions[..self.generator_count]
    }

    pub fn combinations(&self) -> &[(String, Combination)] {
        &self.combinations
    }

    pub fn functional(&self) -> &'a dyn PositiveFunctional {
        self.functional
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Randomized linearity and positivity check of `I` on the instance's functions.
    pub fn spot_check(&self, seed: u64) -> Result<(), EngineError> {
        let fns: Vec<LatticeFn> = self.functions.iter().map(|(_, f)| f.clone()).collect();
        Ok(spot_check(self.functional, &fns, seed, 64)?)
    }

    /// `R_f` for each function, bounded by `sup |f|`, and `c_a` for each point.
    pub fn language(&self) -> Language {
        let relations = self
            .functions
            .iter()
            .map(|(n, f)| Symbol::relation(relation_name(n), 1, sup_abs(f)));
        let constants = self
            .ids
            .iter()
            .map(|id| Symbol::constant(constant_name(id)));
        Language::with_symbols(relations.chain(constants)).expect("names validated")
    }
}

/// `I / I(1)`, or `I` itself when `I(1) = 0`.
struct Normalized<'a> {
    inner: &'a dyn PositiveFunctional,
    scale: f64,
}

impl PositiveFunctional for Normalized<'_> {
    fn domain_len(&self) -> usize {
        self.inner.domain_len()
    }

    fn eval(&self, f: &LatticeFn) -> Result<f64, FunctionalError> {
        let v = self.inner.eval(f)?;
        Ok(if self.scale > 0.0 { v / self.scale } else { v })
    }
}

fn normalized(functional: &dyn PositiveFunctional) -> Result<Normalized<'_>, EngineError> {
    let one = LatticeFn::constant(functional.domain_len(), 1.0);
    let scale = functional.eval(&one)?;
    if scale < -TOLERANCE {
        return Err(EngineError::Functional(FunctionalError::NotPositiveLinear(
            format!("I(1) = {scale} is negative"),
        )));
    }
    Ok(Normalized {
        inner: functional,
        scale: scale.max(0.0),
    })
}

fn push(theory: &mut Theory, label: String, statement: Statement) {
    theory
        .push_unique(Some(label), statement)
        .expect("axioms are closed statements");
}

/// Axioms 1 to 7 for the instance's functions:
///
/// 1. `e(c_a, c_b) == 0` for distinct points (only when `|X|` is within the cap)
/// 2. `R_f(c_a) == f(a)`
/// 3. `R_f = r` a.e. for each constant function `f ≡ r`
/// 4. to 6. `R_h = R_f + R_g`, `R_h = r R_f`, `R_h = max(R_f, R_g)` a.e. for combinations
/// 7. `∫R_f == I(f)` with `I` normalized so that `I(1) = 1`
pub fn daniell_theory(inst: &DaniellInstance) -> Result<Theory, EngineError> {
    let norm = normalized(inst.functional)?;
    let mut theory = Theory::new();
    let r = |name: &str| Formula::unary(relation_name(name), "x");
    if inst.ids.len() <= inst.separation_cap {
        for (i, a) in inst.ids.iter().enumerate() {
            for b in &inst.ids[i + 1..] {
                let e = Formula::rel(
                    EQUALITY,
                    vec![Term::Const(constant_name(a)), Term::Const(constant_name(b))],
                );
                push(
                    &mut theory,
                    format!("ax1[{a},{b}]"),
                    Statement::equal(e, 0.0),
                );
            }
        }
    }
    for (name, f) in &inst.functions {
        for (x, id) in inst.ids.iter().enumerate() {
            let at = Formula::rel(relation_name(name), vec![Term::Const(constant_name(id))]);
            push(
                &mut theory,
                format!("ax2[{name},{id}]"),
                Statement::equal(at, f.get(x)),
            );
        }
    }
    for (name, f) in &inst.functions {
        let c = f.get(0);
        if f.values().iter().all(|v| *v == c) {
            let s =
                encode_ae(&AeClaim::Equal(r(name), Formula::real(c))).expect("one free variable");
            push(&mut theory, format!("ax3[{name}]"), s);
        }
    }
    for (name, combo) in &inst.combinations {
        let (label, rhs) = match combo {
            Combination::Sum(f, g) => ("ax4", Formula::add(r(f), r(g))),
            Combination::Scale(c, f) => ("ax5", Formula::mul(Formula::real(*c), r(f))),
            Combination::Join(f, g) => ("ax6", derive_lattice(LatticeKind::Max, r(f), r(g))),
        };
        let s = encode_ae(&AeClaim::Equal(r(name), rhs)).expect("one free variable");
        push(&mut theory, format!("{label}[{name}]"), s);
    }
    for (name, f) in &inst.functions {
        let s = Statement::equal(Formula::integral("x", r(name)), norm.eval(f)?);
        push(&mut theory, format!("ax7[{name}]"), s);
    }
    Ok(theory)
}

/// Output of the construction shared by the Daniell and Riesz engines.
pub(crate) struct Pipeline {
    pub report: ConstructionReport,
    /// The functions of the construction after the positivity shift, `1_X` first if it
    /// had to be added.
    pub shifted: Vec<(String, LatticeFn)>,
}

/// Builds `λ` from `I` following the finite-satisfiability argument: normalize `I`,
/// add `1_X`, shift the functions positive, cut `[0, α)` at inessential values less
/// than `ε_internal` apart, take the atoms `P_k` of the generated algebra, and set
/// `λ₀(P_k)` to the stabilized value of `I` on the increasing sequence for `χ(P*_k)`.
pub(crate) fn construct(
    kind: &'static str,
    fns: &[(String, LatticeFn)],
    functional: &dyn PositiveFunctional,
    epsilon: f64,
) -> Result<Pipeline, EngineError> {
    let len = functional.domain_len();
    let norm = normalized(functional)?;
    let one = LatticeFn::constant(len, 1.0);
    let mut all: Vec<(String, LatticeFn)> = fns.to_vec();
    if !all.iter().any(|(_, f)| *f == one) {
        all.insert(0, ("1".into(), one));
    }
    let max_sup = all.iter().map(|(_, f)| sup_abs(f)).fold(0.0, f64::max);
    let eps_int = epsilon / (2.0 * (1.0 + max_sup));
    let mut report = ConstructionReport {
        kind,
        epsilon,
        epsilon_internal: eps_int,
        scale: norm.scale,
        zero_measure: false,
        endpoints: Vec::new(),
        cells: Vec::new(),
        lambda0_total: 0.0,
        lambda: vec![0.0; len],
        functions: Vec::new(),
        axioms: Vec::new(),
        dini: None,
        violations: Vec::new(),
    };

    if norm.scale <= TOLERANCE {
        // I(1) = 0 forces I = 0 on bounded functions; the zero measure represents it
        report.zero_measure = true;
        for (name, f) in &all {
            let i = functional.eval(f)?;
            let bound = TOLERANCE * (1.0 + sup_abs(f));
            if i.abs() > bound {
                report
                    .violations
                    .push(format!("I({name}) = {i} although I(1) = 0"));
            }
            report.functions.push(FunctionResidual {
                name: name.clone(),
                sup: sup_abs(f),
                shift: 0.0,
                integral_i: i,
                integral_lambda: 0.0,
                residual: i.abs(),
                cell_residual: 0.0,
                bound,
                passed: i.abs() <= bound,
            });
        }
        return Ok(Pipeline {
            report,
            shifted: all,
        });
    }

    let step = eps_int / 2.0;
    let shifts: Vec<f64> = all.iter().map(|(_, f)| (step - f.inf()).max(0.0)).collect();
    let shifted: Vec<(String, LatticeFn)> = all
        .iter()
        .zip(&shifts)
        .map(|((n, f), c)| (n.clone(), f.shift(*c)))
        .collect();
    let values: Vec<LatticeFn> = shifted.iter().map(|(_, f)| f.clone()).collect();
    let top = values.iter().map(LatticeFn::sup).fold(0.0, f64::max);
    let windows = (top / step).floor() as usize + 1;
    if windows > MAX_ENDPOINTS {
        return Err(EngineError::Budget {
            needed: windows,
            cap: MAX_ENDPOINTS,
        });
    }
    // u_j ∈ (j·step, (j + ½)·step): consecutive endpoints are less than 1.5·step apart
    let inner: Vec<f64> = (1..=windows)
        .into_par_iter()
        .map(|j| {
            let lo = j as f64 * step;
            find_inessential(&values, lo, lo + step / 2.0, &norm, TOLERANCE).map(|c| c.alpha)
        })
        .collect::<Result<_, LatticeError>>()?;
    let endpoints: Vec<f64> = std::iter::once(0.0).chain(inner).collect();
    let band = |v: f64| endpoints.partition_point(|u| *u <= v) - 1;

    let mut pieces = Vec::new();
    for f in &values {
        let mut by_band: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (x, v) in f.values().iter().enumerate() {
            by_band.entry(band(*v)).or_default().push(x);
        }
        pieces.extend(
            by_band
                .into_values()
                .map(|pts| PointSet::from_indices(len, pts)),
        );
    }
    let algebra = SetAlgebra::generated(&PointSet::full(len), &pieces)?;
    let cells: Vec<Cell> = algebra
        .atoms()
        .par_iter()
        .map(|atom| {
            let x = atom.first().expect("atoms are nonempty");
            let constraints = values
                .iter()
                .map(|f| {
                    let j = band(f.get(x));
                    debug_assert!(atom.iter().all(|p| band(f.get(p)) == j));
                    let u = Interval::open(Some(endpoints[j]), Some(endpoints[j + 1]))?;
                    Ok((f.clone(), u))
                })
                .collect::<Result<Vec<_>, LatticeError>>()?;
            let seq = IndicatorSeq::new(constraints, Mode::Open, Combine::Intersection)?;
            let index = stabilization_index(&seq)?;
            let lambda0 = norm.eval(&seq.term(index))?;
            let next = norm.eval(&seq.term(index + 1))?;
            if (lambda0 - next).abs() > TOLERANCE {
                return Err(LatticeError::NonConvergent { at: index });
            }
            Ok(Cell {
                points: atom.clone(),
                open: seq.target(),
                index,
                lambda0,
            })
        })
        .collect::<Result<_, LatticeError>>()?;
    let total: f64 = cells.iter().map(|c| c.lambda0).sum();
    report.endpoints = endpoints;
    report.lambda0_total = total;
    if !(1.0 - epsilon..=1.0 + epsilon).contains(&total) {
        report
            .violations
            .push(format!("λ₀(X) = {total} is outside [1 - ε, 1 + ε]"));
    }
    if total <= TOLERANCE {
        report
            .violations
            .push("λ₀(X) = 0; no probability measure to normalize".into());
        report.cells = cells;
        return Ok(Pipeline { report, shifted });
    }
    for c in &cells {
        let share = c.lambda0 / total / c.points.count() as f64;
        for x in c.points.iter() {
            report.lambda[x] = share;
        }
    }
    for (((name, f), (_, g)), shift) in all.iter().zip(&shifted).zip(&shifts) {
        let integral_i = norm.eval(f)?;
        let integral_lambda = f.integrate(&report.lambda);
        let residual = (integral_i - integral_lambda).abs();
        // h = cellwise infimum of the shifted function
        let simple: f64 = cells
            .iter()
            .map(|c| {
                c.points
                    .iter()
                    .map(|x| g.get(x))
                    .fold(f64::INFINITY, f64::min)
                    * c.lambda0
            })
            .sum();
        let cell_residual = (norm.eval(g)? - simple).abs();
        if cell_residual > eps_int + TOLERANCE {
            report.violations.push(format!(
                "|I({name}') - ∫h dλ₀| = {cell_residual} exceeds ε_internal"
            ));
        }
        let bound = epsilon * (1.0 + sup_abs(f));
        let passed = residual <= bound + TOLERANCE;
        if !passed {
            report.violations.push(format!(
                "|I({name}) - ∫{name} dλ| = {residual} exceeds {bound}"
            ));
        }
        report.functions.push(FunctionResidual {
            name: name.clone(),
            sup: sup_abs(f),
            shift: *shift,
            integral_i,
            integral_lambda,
            residual,
            cell_residual,
            bound,
            passed,
        });
    }
    report.cells = cells;
    Ok(Pipeline { report, shifted })
}

/// The constructed model: absent when the measure is zero.
#[derive(Debug, Clone)]
pub struct DaniellModel {
    pub structure: Option<InterpretedStructure>,
    pub theory: Theory,
    pub report: ConstructionReport,
}

/// `X` with the measure `λ`, `R_f` interpreted by `f` itself and `c_a` by `a`.
pub(crate) fn build_structure(
    inst: &DaniellInstance,
    lambda: &[f64],
) -> Result<InterpretedStructure, EngineError> {
    let space = FiniteMeasureSpace::new(inst.ids.clone(), lambda.to_vec())?;
    let tables = inst
        .functions
        .iter()
        .map(|(n, f)| (relation_name(n), RelationTable::unary(f.values().to_vec())))
        .collect();
    let constants = inst
        .ids
        .iter()
        .enumerate()
        .map(|(x, id)| (constant_name(id), x))
        .collect();
    Ok(InterpretedStructure::interpret(
        space,
        inst.language(),
        tables,
        constants,
    )?)
}

/// Checks the theory on the model at slack `ε + τ` and records per-axiom residuals.
pub(crate) fn verify_theory(
    structure: &InterpretedStructure,
    theory: &Theory,
    epsilon: f64,
    report: &mut ConstructionReport,
) -> Result<(), EngineError> {
    let check = check_theory(
        structure,
        theory,
        CheckConfig {
            epsilon,
            tol: TOLERANCE,
        },
    )?;
    for entry in &check.entries {
        let label = entry.label.clone().unwrap_or_default();
        match &entry.outcome {
            Ok(c) => {
                if !c.passed {
                    report
                        .violations
                        .push(format!("axiom {label} violated by {}", c.violation()));
                }
                report.axioms.push((label, c.violation()));
            }
            Err(e) => report.violations.push(format!("axiom {label}: {e}")),
        }
    }
    Ok(())
}

pub(crate) fn finish(
    inst: &DaniellInstance,
    mut report: ConstructionReport,
) -> Result<DaniellModel, EngineError> {
    let theory = daniell_theory(inst)?;
    let structure = if report.zero_measure || report.lambda0_total <= TOLERANCE {
        None
    } else {
        let m = build_structure(inst, &report.lambda)?;
        verify_theory(&m, &theory, inst.epsilon, &mut report)?;
        Some(m)
    };
    Ok(DaniellModel {
        structure,
        theory,
        report,
    })
}

/// Runs the construction and verifies the model against [`daniell_theory`].
pub fn daniell_model(inst: &DaniellInstance) -> Result<DaniellModel, EngineError> {
    let pipeline = construct("daniell", &inst.functions, inst.functional, inst.epsilon)?;
    finish(inst, pipeline.report)
}
