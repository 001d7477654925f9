use super::EngineError;
use crate::lattice::{
    classify_pair, refine_cover, stabilization_index, Combine, IndicatorSeq, Interval, LatticeFn,
    Mode, PairKind,
};
use crate::measure::{Measure, PointSet, SetAlgebra, TOLERANCE};

/// A finite `N` with an algebra and measure `ν`, a subset `X`, and functions on `N`
/// measurable for the algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct PushdownInstance {
    ids: Vec<String>,
    measure: Measure,
    weights: Vec<f64>,
    subset: PointSet,
    functions: Vec<(String, LatticeFn)>,
}

impl PushdownInstance {
    pub fn new(
        ids: Vec<String>,
        weights: Vec<f64>,
        algebra: SetAlgebra,
        subset: PointSet,
        functions: Vec<(String, LatticeFn)>,
    ) -> Result<Self, EngineError> {
        let len = ids.len();
        if weights.len() != len
            || algebra.universe() != &PointSet::full(len)
            || subset.universe_len() != len
        {
            return Err(EngineError::DomainMismatch);
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(EngineError::BadWeight(*w));
        }
        for (name, f) in &functions {
            if f.len() != len {
                return Err(EngineError::DomainMismatch);
            }
            let constant_on_atoms = algebra.atoms().iter().all(|a| {
                let v = f.get(a.first().expect("atoms are nonempty"));
                a.iter().all(|x| f.get(x) == v)
            });
            if !constant_on_atoms {
                return Err(EngineError::NotMeasurable(name.clone()));
            }
        }
        let masses = algebra
            .atoms()
            .iter()
            .map(|a| a.iter().map(|x| weights[x]).sum())
            .collect();
        Ok(PushdownInstance {
            ids,
            measure: Measure::new(algebra, masses)?,
            weights,
            subset,
            functions,
        })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn subset(&self) -> &PointSet {
        &self.subset
    }
}

/// `∫_X f|_X dμ_X` against `∫_N f dν` for one function.
#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    pub name: String,
    pub on_subset: f64,
    pub on_whole: f64,
    pub passed: bool,
}

/// The Subclaim for one refined cover member `U_i = θ_i⁻¹(0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubclaimCheck {
    pub member: PointSet,
    pub measure: f64,
    /// Stabilization index of the increasing sequence for `χ(U_i)`.
    pub index: u64,
    /// Largest `∫ f_{i,n} dν` over the checked `n`.
    pub max_integral: f64,
    pub pair: PairKind,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushdownReport {
    pub total: f64,
    pub outer: f64,
    pub full: bool,
    /// A member containing `X` with measure below the total, when `X` is not full.
    pub witness: Option<(PointSet, f64)>,
    pub transfers: Vec<Transfer>,
    pub subclaims: Vec<SubclaimCheck>,
    /// `Σ ν(U_i)` over the refined cover.
    pub cover_sum: f64,
    pub violations: Vec<String>,
}

impl PushdownReport {
    pub fn passed(&self) -> bool {
        self.full && self.violations.is_empty()
    }
}

/// Computes `ν*(X)`. When `X` has full outer measure, verifies that integrals transfer
/// to the subspace measure on `X`, and checks the Subclaim `∫ f_{i,n} dν ≤ ν(U_i)` on a
/// cover of `X` by sets `θ⁻¹(0, ∞)` with null zero sets, together with `Σ ν(U_i) ≥ ν(N)`.
pub fn pushdown_check(inst: &PushdownInstance) -> Result<PushdownReport, EngineError> {
    let len = inst.ids.len();
    let total = inst.measure.total();
    let outer = inst.measure.outer_measure(&inst.subset);
    let full = outer >= total - TOLERANCE;
    let mut report = PushdownReport {
        total,
        outer,
        full,
        witness: None,
        transfers: Vec::new(),
        subclaims: Vec::new(),
        cover_sum: 0.0,
        violations: Vec::new(),
    };
    if !full {
        let hull = inst.measure.algebra().hull(&inst.subset);
        let m = inst.measure.measure(&hull)?;
        report
            .violations
            .push(format!("X has outer measure {outer} < {total}"));
        report.witness = Some((hull, m));
        return Ok(report);
    }

    let sub = inst.measure.subspace(&inst.subset)?;
    for (name, f) in &inst.functions {
        let on_subset = sub.integrate(f.values())?;
        let on_whole = inst.measure.integrate(f.values())?;
        let passed = (on_subset - on_whole).abs() <= TOLERANCE;
        if !passed {
            report.violations.push(format!(
                "∫_X {name} = {on_subset} but ∫_N {name} = {on_whole}"
            ));
        }
        report.transfers.push(Transfer {
            name: name.clone(),
            on_subset,
            on_whole,
            passed,
        });
    }

    let fns: Vec<LatticeFn> = inst.functions.iter().map(|(_, f)| f.clone()).collect();
    let signs: Vec<PointSet> = fns
        .iter()
        .flat_map(|f| [f.positive_set(), f.neg().positive_set()])
        .collect();
    let cells = SetAlgebra::generated(&PointSet::full(len), &signs)?;
    let cover: Vec<PointSet> = cells
        .atoms()
        .iter()
        .filter(|a| a.intersects(&inst.subset))
        .cloned()
        .collect();
    let refined = refine_cover(&inst.weights, &fns, &inst.subset, &cover, TOLERANCE)?;
    for member in &refined.members {
        let measure: f64 = member.set.iter().map(|x| inst.weights[x]).sum();
        let seq = IndicatorSeq::new(
            vec![(member.function.clone(), Interval::open(Some(0.0), None)?)],
            Mode::Open,
            Combine::Intersection,
        )?;
        let index = stabilization_index(&seq)?;
        let mut max_integral: f64 = 0.0;
        let mut pair = PairKind::Exact;
        let mut n = 1;
        loop {
            let term = seq.term(n);
            max_integral = max_integral.max(term.integrate(&inst.weights));
            let kind = classify_pair(&term, &member.function, Some(&inst.weights))?;
            if kind != PairKind::Exact {
                pair = kind;
            }
            if n >= index {
                break;
            }
            n = (n * 2).min(index);
        }
        let passed = max_integral <= measure + TOLERANCE && pair != PairKind::Neither;
        if !passed {
            report.violations.push(format!(
                "Subclaim fails on {:?}: ∫f_n dν = {max_integral} > ν(U) = {measure}",
                member.set
            ));
        }
        report.subclaims.push(SubclaimCheck {
            member: member.set.clone(),
            measure,
            index,
            max_integral,
            pair,
            passed,
        });
    }
    report.cover_sum = refined.output_measure;
    if report.cover_sum < total - TOLERANCE {
        report.violations.push(format!(
            "cover of X has measure {} < {total}",
            report.cover_sum
        ));
    }
    Ok(report)
}
