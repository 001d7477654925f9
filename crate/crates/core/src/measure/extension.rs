use std::collections::HashMap;

use super::{Measure, MeasureError, PointSet, SetAlgebra, TOLERANCE};

/// Largest number of atoms handled by the exact cover search in [`cover_outer_measure`].
pub const MAX_COVER_ATOMS: usize = 20;

/// Values assigned to a family of subsets (an algebra, or a semiring such as rectangles).
#[derive(Debug, Clone, PartialEq)]
pub struct PremeasureTable {
    universe: PointSet,
    entries: Vec<(PointSet, f64)>,
}

impl PremeasureTable {
    /// Validates nonnegativity, `value(∅) = 0`, consistency of repeated sets, that the
    /// family covers `universe`, and finite additivity on every disjoint pair whose
    /// union is listed.
    pub fn new(universe: PointSet, entries: Vec<(PointSet, f64)>) -> Result<Self, MeasureError> {
        let mut covered = PointSet::empty(universe.universe_len());
        for (set, v) in &entries {
            if !set.is_subset(&universe) {
                return Err(MeasureError::OutsideUniverse);
            }
            if !(v.is_finite() && *v >= 0.0) {
                return Err(MeasureError::NegativeWeight {
                    point: format!("{set:?}"),
                    weight: *v,
                });
            }
            if set.is_empty() && *v != 0.0 {
                return Err(MeasureError::NonAdditive(format!(
                    "empty set has value {v}"
                )));
            }
            covered = covered.union(set);
        }
        if covered != universe {
            return Err(MeasureError::Uncovered);
        }
        let mut lookup: HashMap<&PointSet, f64> = HashMap::with_capacity(entries.len());
        for (a, va) in &entries {
            if let Some(prev) = lookup.insert(a, *va) {
                if (prev - va).abs() > TOLERANCE {
                    return Err(MeasureError::NonAdditive(format!(
                        "{a:?} listed with different values"
                    )));
                }
            }
        }
        for (a, va) in &entries {
            for (b, vb) in &entries {
                if a.intersects(b) {
                    continue;
                }
                if let Some(&vu) = lookup.get(&a.union(b)) {
                    if (vu - va - vb).abs() > TOLERANCE {
                        return Err(MeasureError::NonAdditive(format!(
                            "value({a:?} ∪ {b:?}) = {vu} but the parts sum to {}",
                            va + vb
                        )));
                    }
                }
            }
        }
        Ok(PremeasureTable { universe, entries })
    }

    pub fn universe(&self) -> &PointSet {
        &self.universe
    }

    pub fn entries(&self) -> &[(PointSet, f64)] {
        &self.entries
    }

    /// The algebra generated by the listed sets.
    pub fn generated_algebra(&self) -> SetAlgebra {
        let sets: Vec<PointSet> = self.entries.iter().map(|(s, _)| s.clone()).collect();
        SetAlgebra::generated(&self.universe, &sets).expect("entries lie in the universe")
    }
}

/// `inf { Σ value(A_k) : target ⊆ ∪ A_k }` over finite subfamilies of the table,
/// found by exact search over the atoms of the generated algebra.
pub fn cover_outer_measure(
    table: &PremeasureTable,
    target: &PointSet,
) -> Result<f64, MeasureError> {
    let algebra = table.generated_algebra();
    let needed: Vec<usize> = algebra
        .atoms()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.intersects(target))
        .map(|(k, _)| k)
        .collect();
    if needed.len() > MAX_COVER_ATOMS {
        return Err(MeasureError::TooManyAtoms(needed.len()));
    }
    // each family member, as a mask over the needed atoms
    let members: Vec<(u32, f64)> = table
        .entries
        .iter()
        .map(|(set, v)| {
            let mask = needed
                .iter()
                .enumerate()
                .filter(|(_, &k)| algebra.atoms()[k].is_subset(set))
                .fold(0u32, |m, (bit, _)| m | 1 << bit);
            (mask, *v)
        })
        .filter(|(mask, _)| *mask != 0)
        .collect();
    let full = if needed.is_empty() {
        0
    } else {
        (1u32 << needed.len()) - 1
    };
    // best[m] = cheapest cover of the atoms in m
    let mut best = vec![f64::INFINITY; full as usize + 1];
    best[0] = 0.0;
    for m in 1..=full {
        let low = m & m.wrapping_neg();
        for &(mask, v) in &members {
            if mask & low != 0 {
                let rest = m & !mask;
                let c = best[rest as usize] + v;
                if c < best[m as usize] {
                    best[m as usize] = c;
                }
            }
        }
    }
    Ok(best[full as usize])
}

/// Extends a premeasure to the algebra its family generates (on a finite set this is
/// also the generated σ-algebra). Each atom receives its outer measure, which on a
/// finite family is the cheapest single member containing it; the result must then
/// reproduce every table value, otherwise the table was not a premeasure.
pub fn caratheodory_extend(table: &PremeasureTable) -> Result<Measure, MeasureError> {
    let algebra = table.generated_algebra();
    let masses: Vec<f64> = algebra
        .atoms()
        .iter()
        .map(|atom| {
            table
                .entries
                .iter()
                .filter(|(s, _)| atom.is_subset(s))
                .map(|(_, v)| *v)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let measure = Measure::new(algebra, masses)?;
    for (set, v) in &table.entries {
        let got = measure.measure(set)?;
        if (got - v).abs() > TOLERANCE {
            return Err(MeasureError::NonAdditive(format!(
                "{set:?} has value {v} but its atoms carry {got}"
            )));
        }
    }
    Ok(measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::FiniteMeasureSpace;

    fn mask(len: usize, m: u64) -> PointSet {
        PointSet::from_mask(len, m)
    }

    #[test]
    fn two_set_algebra() {
        let full = PointSet::full(3);
        let a = mask(3, 0b001);
        let table = PremeasureTable::new(
            full.clone(),
            vec![
                (PointSet::empty(3), 0.0),
                (a.clone(), 0.4),
                (a.complement(), 0.6),
                (full.clone(), 1.0),
            ],
        )
        .unwrap();
        let m = caratheodory_extend(&table).unwrap();
        assert!((m.measure(&a).unwrap() - 0.4).abs() < 1e-15);
        assert!((m.measure(&a.complement()).unwrap() - 0.6).abs() < 1e-15);
        assert!((m.measure(&full).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn powerset_is_identity() {
        let space = FiniteMeasureSpace::indexed("p", [0.1, 0.2, 0.7]).unwrap();
        let alg = SetAlgebra::powerset(3);
        let entries = alg
            .members()
            .unwrap()
            .into_iter()
            .map(|s| {
                let v = space.mass(&s);
                (s, v)
            })
            .collect();
        let table = PremeasureTable::new(space.all(), entries).unwrap();
        let m = caratheodory_extend(&table).unwrap();
        assert_eq!(m.algebra(), &alg);
        for (k, w) in m.atom_masses().iter().enumerate() {
            assert!((w - space.weight(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn rectangles_extend_to_product() {
        // points of {0,1} x {0,1} indexed as 2*i + j
        let (u, v) = ([0.3, 0.7], [0.4, 0.6]);
        let side = |bits: u8, i: usize| bits >> i & 1 == 1;
        let mut entries = Vec::new();
        for a in 0u8..4 {
            for b in 0u8..4 {
                let set = PointSet::from_predicate(4, |p| side(a, p / 2) && side(b, p % 2));
                let ma: f64 = (0..2).filter(|&i| side(a, i)).map(|i| u[i]).sum();
                let mb: f64 = (0..2).filter(|&j| side(b, j)).map(|j| v[j]).sum();
                entries.push((set, ma * mb));
            }
        }
        let table = PremeasureTable::new(PointSet::full(4), entries).unwrap();
        let m = caratheodory_extend(&table).unwrap();
        for p in 0..4 {
            let direct = u[p / 2] * v[p % 2];
            let got = m.measure(&PointSet::singleton(4, p)).unwrap();
            assert!((got - direct).abs() < 1e-15);
        }
        let diag = PointSet::from_indices(4, [0, 3]);
        assert!((cover_outer_measure(&table, &diag).unwrap() - (0.12 + 0.42)).abs() < 1e-12);
    }

    #[test]
    fn non_additive_rejected() {
        let full = PointSet::full(2);
        let entries = vec![
            (mask(2, 0b01), 0.5),
            (mask(2, 0b10), 0.6),
            (full.clone(), 1.0),
        ];
        assert!(matches!(
            PremeasureTable::new(full.clone(), entries),
            Err(MeasureError::NonAdditive(_))
        ));
        // overlapping family whose atoms cannot carry the values
        let entries = vec![
            (mask(3, 0b011), 0.5),
            (mask(3, 0b110), 0.5),
            (PointSet::full(3), 0.6),
        ];
        let table = PremeasureTable::new(PointSet::full(3), entries).unwrap();
        assert!(caratheodory_extend(&table).is_err());
    }
}
