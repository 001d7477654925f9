use std::collections::{BTreeMap, HashSet};

use super::EngineError;
use crate::eval::{encode_ae, AeClaim, InterpretedStructure, RelationTable};
use crate::logic::{derive_lattice, Formula, Language, LatticeKind, Statement, Symbol, Theory};
use crate::measure::{FiniteMeasureSpace, PointSet, SetAlgebra, TOLERANCE};

/// Largest atom count accepted; the join axioms are quadratic in `2^atoms`.
pub const MAX_STONE_ATOMS: usize = 8;

/// The Boolean algebra of all subsets of `atom_count` atoms, with a strictly positive
/// measure of total mass 1. Every finite Boolean algebra has this form. Elements are
/// bit masks; bit `i` stands for atom `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteProbabilityAlgebra {
    masses: Vec<f64>,
}

impl FiniteProbabilityAlgebra {
    pub fn new(masses: Vec<f64>) -> Result<Self, EngineError> {
        if masses.is_empty() {
            return Err(EngineError::BadAlgebra("no atoms".into()));
        }
        if masses.len() > MAX_STONE_ATOMS {
            return Err(EngineError::TooManyAtoms {
                count: masses.len(),
                cap: MAX_STONE_ATOMS,
            });
        }
        if let Some((i, m)) = masses
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m > 0.0))
        {
            return Err(EngineError::BadAlgebra(format!(
                "atom {i} has mass {m}; atoms must have positive measure"
            )));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > TOLERANCE {
            return Err(EngineError::BadAlgebra(format!(
                "atom masses sum to {total}, not 1"
            )));
        }
        Ok(FiniteProbabilityAlgebra { masses })
    }

    pub fn atom_count(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn top(&self) -> u64 {
        (1u64 << self.masses.len()) - 1
    }

    /// All elements in ascending mask order.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..=self.top()
    }

    pub fn complement(&self, a: u64) -> u64 {
        self.top() & !a
    }

    /// `μ(a)`, summed in ascending atom order.
    pub fn measure(&self, a: u64) -> f64 {
        (0..self.masses.len())
            .filter(|i| a >> i & 1 == 1)
            .map(|i| self.masses[i])
            .sum()
    }

    /// One character per atom, atom 0 first.
    pub fn bits(&self, a: u64) -> String {
        (0..self.masses.len())
            .map(|i| if a >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// The relation symbol `R_a`.
    pub fn relation_name(&self, a: u64) -> String {
        format!("R_{}", self.bits(a))
    }

    pub fn language(&self) -> Language {
        Language::with_symbols(
            self.elements()
                .map(|a| Symbol::relation(self.relation_name(a), 1, 1.0)),
        )
        .expect("generated names are distinct identifiers")
    }
}

fn r(b: &FiniteProbabilityAlgebra, a: u64) -> Formula {
    Formula::unary(b.relation_name(a), "x")
}

fn push(theory: &mut Theory, label: String, statement: Statement) {
    theory
        .push_unique(Some(label), statement)
        .expect("axioms are closed statements");
}

/// The axioms: `R_a ∈ {0, 1}` a.e., `∫R_a = μ(a)`, `R_{a'} = 1 - R_a` a.e. for each
/// element, then `R_{a∨b} = max(R_a, R_b)` a.e. for each unordered pair.
pub fn stone_theory(b: &FiniteProbabilityAlgebra) -> Theory {
    let mut theory = Theory::new();
    for a in b.elements() {
        let bits = b.bits(a);
        let range = encode_ae(&AeClaim::Range(r(b, a), vec![0.0, 1.0])).expect("one free variable");
        push(&mut theory, format!("range[{bits}]"), range);
        let integral = Statement::equal(Formula::integral("x", r(b, a)), b.measure(a));
        push(&mut theory, format!("integral[{bits}]"), integral);
        let complement = encode_ae(&AeClaim::Equal(
            r(b, b.complement(a)),
            Formula::sub(Formula::real(1.0), r(b, a)),
        ))
        .expect("one free variable");
        push(&mut theory, format!("complement[{bits}]"), complement);
    }
    for a in b.elements() {
        for c in b.elements().filter(|c| *c >= a) {
            let join = encode_ae(&AeClaim::Equal(
                r(b, a | c),
                derive_lattice(LatticeKind::Max, r(b, a), r(b, c)),
            ))
            .expect("one free variable");
            push(
                &mut theory,
                format!("join[{},{}]", b.bits(a), b.bits(c)),
                join,
            );
        }
    }
    theory
}

/// The model over the atoms: point `a<i>` carries the mass of atom `i`, and `R_a` is
/// the indicator of the atoms below `a`.
pub fn stone_model(b: &FiniteProbabilityAlgebra) -> InterpretedStructure {
    let k = b.atom_count();
    let space =
        FiniteMeasureSpace::indexed("a", b.masses().iter().copied()).expect("masses validated");
    let tables = b
        .elements()
        .map(|a| {
            let values = (0..k)
                .map(|i| if a >> i & 1 == 1 { 1.0 } else { 0.0 })
                .collect();
            (b.relation_name(a), RelationTable::unary(values))
        })
        .collect();
    InterpretedStructure::interpret(space, b.language(), tables, BTreeMap::new())
        .expect("indicator tables respect the bound 1 and the atoms sum to 1")
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsoCheck {
    pub name: &'static str,
    pub passed: bool,
    /// The first counterexample found.
    pub witness: Option<String>,
}

/// Result of [`stone_isomorphism_check`]; `image` lists `X_a` for each element in mask order.
#[derive(Debug, Clone, PartialEq)]
pub struct StoneIsoReport {
    pub image: Vec<PointSet>,
    /// Number of members of the algebra generated by the `X_a`.
    pub generated_size: usize,
    pub checks: Vec<IsoCheck>,
}

impl StoneIsoReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn verdict(name: &'static str, witness: Option<String>) -> IsoCheck {
    IsoCheck {
        name,
        passed: witness.is_none(),
        witness,
    }
}

/// Checks that `φ(a) = [X_a]`, `X_a = {x : R_a(x) = 1}`, is a measure-preserving Boolean
/// isomorphism from `B` onto the measure algebra generated by the `X_a` in `M`.
///
/// Every check is done directly on the sets, with the measure of `M`; the isomorphism
/// properties are never inferred from one another.
pub fn stone_isomorphism_check(
    b: &FiniteProbabilityAlgebra,
    m: &InterpretedStructure,
) -> Result<StoneIsoReport, EngineError> {
    let space = m.space();
    let len = space.len();
    let mut image = Vec::new();
    for a in b.elements() {
        let name = b.relation_name(a);
        let table = m
            .relation(&name)
            .filter(|t| t.arity() == 1)
            .ok_or_else(|| EngineError::UnknownFunction(name.clone()))?;
        image.push(PointSet::from_predicate(len, |x| table.get(&[x]) == 1.0));
    }
    let x = |a: u64| &image[a as usize];
    let mass = |s: &PointSet| space.mass(s);
    let pairs = || b.elements().flat_map(|a| b.elements().map(move |c| (a, c)));
    let mut checks = Vec::new();

    // R_a is a.e. an indicator, so X_a determines R_a up to a null set
    let indicator = b.elements().find_map(|a| {
        let table = m.relation(&b.relation_name(a)).expect("checked above");
        let off: PointSet =
            PointSet::from_predicate(len, |p| !matches!(table.get(&[p]), 0.0 | 1.0));
        (mass(&off) > TOLERANCE).then(|| format!("R_{} is not 0/1-valued on {:?}", b.bits(a), off))
    });
    checks.push(verdict("indicator", indicator));

    // μ(a △ b) = μ_M(X_{a△b}) > 0 for a ≠ b
    let injective = pairs().filter(|(a, c)| a < c).find_map(|(a, c)| {
        let diff = a ^ c;
        let via_element = mass(x(diff));
        let direct = mass(&x(a).symmetric_difference(x(c)));
        if (via_element - b.measure(diff)).abs() > TOLERANCE || direct <= TOLERANCE {
            Some(format!(
                "a = {}, b = {}: μ(a△b) = {}, μ_M(X_a△X_b) = {direct}",
                b.bits(a),
                b.bits(c),
                b.measure(diff)
            ))
        } else {
            None
        }
    });
    checks.push(verdict("injective", injective));

    let algebra =
        SetAlgebra::generated(&PointSet::full(len), &image).map_err(EngineError::Measure)?;
    let members = algebra.members().map_err(EngineError::Measure)?;
    let in_image: HashSet<&PointSet> = image.iter().collect();
    // classes modulo null sets: a member hits the image if it differs from some X_a by a null set
    let surjective = members.iter().find_map(|s| {
        let hit = in_image.contains(s)
            || image
                .iter()
                .any(|xa| mass(&xa.symmetric_difference(s)) <= TOLERANCE);
        (!hit).then(|| format!("{s:?} is not a.e. equal to any X_a"))
    });
    checks.push(verdict("surjective", surjective));

    let preserving = b.elements().find_map(|a| {
        let (want, got) = (b.measure(a), mass(x(a)));
        ((want - got).abs() > TOLERANCE)
            .then(|| format!("a = {}: μ(a) = {want}, μ_M(X_a) = {got}", b.bits(a)))
    });
    checks.push(verdict("measure", preserving));

    let ae_equal = |s: &PointSet, t: &PointSet| mass(&s.symmetric_difference(t)) <= TOLERANCE;
    let join = pairs().find_map(|(a, c)| {
        (!ae_equal(x(a | c), &x(a).union(x(c))))
            .then(|| format!("a = {}, b = {}: X_(a∨b) ≠ X_a ∪ X_b", b.bits(a), b.bits(c)))
    });
    checks.push(verdict("join", join));
    let meet = pairs().find_map(|(a, c)| {
        (!ae_equal(x(a & c), &x(a).intersection(x(c))))
            .then(|| format!("a = {}, b = {}: X_(a∧b) ≠ X_a ∩ X_b", b.bits(a), b.bits(c)))
    });
    checks.push(verdict("meet", meet));
    let complement = b.elements().find_map(|a| {
        (!ae_equal(x(b.complement(a)), &x(a).complement()))
            .then(|| format!("a = {}: X_a' ≠ complement of X_a", b.bits(a)))
    });
    checks.push(verdict("complement", complement));

    // finite chains: the partial joins c_i of the atoms below a increase, their images
    // increase, and the union of the images is X_a; dually for partial meets
    let chains = b.elements().find_map(|a| {
        let atoms: Vec<u64> = (0..b.atom_count())
            .map(|i| 1u64 << i)
            .filter(|t| a & t != 0)
            .collect();
        let mut c = 0u64;
        let mut union = PointSet::empty(len);
        let mut d = b.top();
        let mut meet = PointSet::full(len);
        for t in atoms {
            let before = x(c).clone();
            c |= t;
            if mass(&before.difference(x(c))) > TOLERANCE {
                return Some(format!("chain below {}: images not increasing", b.bits(a)));
            }
            union = union.union(x(c));
            d &= !t;
            meet = meet.intersection(x(d));
        }
        if !ae_equal(&union, x(a)) {
            return Some(format!(
                "sup of the chain below {} is not preserved",
                b.bits(a)
            ));
        }
        if !ae_equal(&meet, x(b.complement(a))) {
            return Some(format!(
                "inf of the chain above {} is not preserved",
                b.bits(b.complement(a))
            ));
        }
        None
    });
    checks.push(verdict("chains", chains));

    Ok(StoneIsoReport {
        image,
        generated_size: members.len(),
        checks,
    })
}
