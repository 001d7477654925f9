use super::{LatticeError, LatticeFn};
use crate::measure::{PointSet, SetAlgebra, TOLERANCE};

/// Number of threshold bands recorded for a split member.
const RECORDED_BANDS: usize = 3;

/// How a member with a zero level set of positive measure was replaced.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    /// `a_1`; the thresholds are `a_j = a_1 / 2^{j-1}`.
    pub a1: f64,
    /// The replacement is `(f - a_2)⁻¹(0, ∞)`.
    pub a2: f64,
    /// The first bands `f⁻¹(a_{j+2}, a_j)` with their point counts; all empty here,
    /// because `a_1` lies below every positive value of `f`.
    pub bands: Vec<((f64, f64), usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinedMember {
    /// `V = function⁻¹(0, ∞)`.
    pub function: LatticeFn,
    pub set: PointSet,
    /// Index of the input member this replaces.
    pub origin: usize,
    pub split: Option<Split>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinedCover {
    /// Shift used for non-strict sign conditions: half the least nonzero `|f_i(x)|`.
    pub delta: f64,
    pub members: Vec<RefinedMember>,
    pub input_measure: f64,
    pub output_measure: f64,
}

fn mass(weights: &[f64], set: &PointSet) -> f64 {
    set.iter().map(|i| weights[i]).sum()
}

/// For the algebra generated by the sets `f⁻¹(0, ∞)` with `f` in the lattice spanned
/// by `fns`, replaces each cover member `U` by sets `V = g⁻¹(0, ∞)` with `μ(g⁻¹{0}) = 0`.
///
/// Each `U` is written as a union of sign cells of the `f_i`; on a cell, `f_i > 0`
/// contributes the clause `f_i`, `f_i < 0` contributes `-f_i`, and `f_i = 0` (two
/// non-strict clauses `±f_i ≥ 0`) contributes `(f_i + δ) ∧ (-f_i + δ)`. The member
/// function is the join over cells of the meet of clauses. Because `δ` is below every
/// nonzero `|f_i|`, the shift does not enlarge `U`. A member whose function still
/// vanishes on a set of positive measure is lowered by `a_2`, a threshold below all of
/// its positive values, which removes the zero level set without changing `U`.
pub fn refine_cover(
    weights: &[f64],
    fns: &[LatticeFn],
    target: &PointSet,
    cover: &[PointSet],
    epsilon: f64,
) -> Result<RefinedCover, LatticeError> {
    let len = weights.len();
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(LatticeError::BadEpsilon(epsilon));
    }
    if fns.iter().any(|f| f.len() != len)
        || target.universe_len() != len
        || cover.iter().any(|u| u.universe_len() != len)
    {
        return Err(LatticeError::DomainMismatch);
    }
    let union = cover
        .iter()
        .fold(PointSet::empty(len), |acc, u| acc.union(u));
    if !target.is_subset(&union) {
        return Err(LatticeError::NotACover);
    }
    let type_one: Vec<PointSet> = fns
        .iter()
        .flat_map(|f| [f.positive_set(), f.neg().positive_set()])
        .collect();
    let algebra = SetAlgebra::generated(&PointSet::full(len), &type_one)
        .expect("sets built on the same domain");
    let delta = 0.5
        * fns
            .iter()
            .flat_map(|f| f.values().iter().map(|v| v.abs()))
            .filter(|v| *v > 0.0)
            .fold(2.0, f64::min);
    let one = LatticeFn::constant(len, 1.0);
    let clause = |f: &LatticeFn, x: usize| -> LatticeFn {
        let v = f.get(x);
        if v > 0.0 {
            f.clone()
        } else if v < 0.0 {
            f.neg()
        } else {
            f.shift(delta).meet(&f.neg().shift(delta))
        }
    };

    let mut members = Vec::new();
    for (origin, u) in cover.iter().enumerate() {
        if !algebra.contains(u) {
            return Err(LatticeError::NotRepresentable(origin));
        }
        let mut function = LatticeFn::constant(len, -1.0);
        for atom in algebra.atoms().iter().filter(|a| a.is_subset(u)) {
            let x = atom.first().expect("atoms are nonempty");
            let cell = fns
                .iter()
                .fold(one.clone(), |acc, f| acc.meet(&clause(f, x)));
            function = function.join(&cell);
        }
        debug_assert_eq!(&function.positive_set(), u);
        let zero_mass = mass(weights, &function.zero_set());
        if zero_mass <= TOLERANCE {
            members.push(RefinedMember {
                set: function.positive_set(),
                function,
                origin,
                split: None,
            });
            continue;
        }
        let least_positive = function
            .values()
            .iter()
            .copied()
            .filter(|v| *v > 0.0)
            .fold(f64::INFINITY, f64::min);
        let a1 = if least_positive.is_finite() {
            least_positive / 2.0
        } else {
            1.0
        };
        let a = |j: usize| a1 / f64::powi(2.0, j as i32 - 1);
        let bands = (1..=RECORDED_BANDS)
            .map(|j| {
                let (lo, hi) = (a(j + 2), a(j));
                let band = function
                    .shift(-lo)
                    .meet(&function.neg().shift(hi))
                    .positive_set();
                ((lo, hi), band.count())
            })
            .collect();
        let lowered = function.shift(-a(2));
        members.push(RefinedMember {
            set: lowered.positive_set(),
            function: lowered,
            origin,
            split: Some(Split {
                a1,
                a2: a(2),
                bands,
            }),
        });
    }
    let input_measure = cover.iter().map(|u| mass(weights, u)).sum();
    let output_measure = members.iter().map(|m| mass(weights, &m.set)).sum();
    Ok(RefinedCover {
        delta,
        members,
        input_measure,
        output_measure,
    })
}

/// Names of the violated conditions: `nice-form`, `null-zero-set`, `measure-sum`, `covers`.
pub fn cover_violations(
    result: &RefinedCover,
    weights: &[f64],
    target: &PointSet,
    epsilon: f64,
) -> Vec<&'static str> {
    let mut out = Vec::new();
    if result
        .members
        .iter()
        .any(|m| m.function.positive_set() != m.set)
    {
        out.push("nice-form");
    }
    if result
        .members
        .iter()
        .any(|m| mass(weights, &m.function.zero_set()) > TOLERANCE)
    {
        out.push("null-zero-set");
    }
    if (result.output_measure - result.input_measure).abs() > epsilon {
        out.push("measure-sum");
    }
    let union = result
        .members
        .iter()
        .fold(PointSet::empty(target.universe_len()), |acc, m| {
            acc.union(&m.set)
        });
    if !target.is_subset(&union) {
        out.push("covers");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(len: usize, idx: &[usize]) -> PointSet {
        PointSet::from_indices(len, idx.iter().copied())
    }

    #[test]
    fn nice_member_unchanged() {
        let w = [0.25; 4];
        let f = LatticeFn::new(vec![1.0, 2.0, -1.0, -3.0]);
        let u = f.positive_set();
        let out = refine_cover(&w, &[f], &set(4, &[0]), std::slice::from_ref(&u), 0.1).unwrap();
        assert_eq!(out.members.len(), 1);
        assert_eq!(out.members[0].set, u);
        assert!(out.members[0].split.is_none());
        assert!(cover_violations(&out, &w, &set(4, &[0]), 0.1).is_empty());
    }

    #[test]
    fn closed_sign_condition_is_shifted() {
        // U = g⁻¹[0, ∞) = {0, 1}
        let w = [0.1, 0.2, 0.3, 0.4];
        let g = LatticeFn::new(vec![0.0, 2.0, -1.0, -0.5]);
        let u = set(4, &[0, 1]);
        let out = refine_cover(&w, &[g], &set(4, &[0]), std::slice::from_ref(&u), 0.01).unwrap();
        assert_eq!(out.delta, 0.25);
        assert_eq!(out.members[0].set, u);
        assert_eq!(out.input_measure, out.output_measure);
        assert!(cover_violations(&out, &w, &set(4, &[0]), 0.01).is_empty());
    }

    #[test]
    fn zero_level_set_is_split_off() {
        // U = f⁻¹(0, ∞) = {1}; its function vanishes at point 0, which has weight
        let w = [0.5, 0.25, 0.25];
        let f = LatticeFn::new(vec![0.0, 1.0, -1.0]);
        let u = set(3, &[1]);
        let out = refine_cover(&w, &[f], &set(3, &[1]), std::slice::from_ref(&u), 0.1).unwrap();
        let m = &out.members[0];
        let split = m.split.as_ref().expect("zero set has positive measure");
        assert_eq!(m.set, u);
        assert!(split.bands.iter().all(|(_, count)| *count == 0));
        assert!(split.a2 < split.a1);
        assert!(cover_violations(&out, &w, &u, 0.1).is_empty());
    }

    #[test]
    fn errors() {
        let w = [0.5, 0.5];
        let f = LatticeFn::new(vec![1.0, 1.0]);
        let x = set(2, &[0]);
        assert_eq!(
            refine_cover(&w, &[f.clone()], &x, &[x.clone()], 0.1),
            Err(LatticeError::NotRepresentable(0))
        );
        assert_eq!(
            refine_cover(&w, &[f.clone()], &x, &[], 0.1),
            Err(LatticeError::NotACover)
        );
        assert!(refine_cover(&w, &[f], &x, &[PointSet::full(2)], 0.0).is_err());
    }
}
