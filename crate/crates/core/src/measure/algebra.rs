use super::{FiniteMeasureSpace, MeasureError, PointSet};

/// Largest atom count for which [`SetAlgebra::members`] enumerates all members.
pub const MAX_ENUMERATED_ATOMS: usize = 20;

/// A Boolean algebra of subsets of `universe`, stored by its atoms.
///
/// On a finite set every algebra is atomic and each member is a union of atoms,
/// so the atom list determines the algebra completely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetAlgebra {
    universe: PointSet,
    atoms: Vec<PointSet>,
}

impl SetAlgebra {
    fn from_partition(universe: PointSet, mut atoms: Vec<PointSet>) -> Self {
        atoms.retain(|a| !a.is_empty());
        atoms.sort_by_key(|a| a.first());
        SetAlgebra { universe, atoms }
    }

    /// All subsets of `{0..len}`.
    pub fn powerset(len: usize) -> Self {
        Self::from_partition(
            PointSet::full(len),
            (0..len).map(|i| PointSet::singleton(len, i)).collect(),
        )
    }

    /// The smallest algebra on `universe` containing every generator.
    pub fn generated(universe: &PointSet, generators: &[PointSet]) -> Result<Self, MeasureError> {
        let mut cells = if universe.is_empty() {
            Vec::new()
        } else {
            vec![universe.clone()]
        };
        for g in generators {
            if !g.is_subset(universe) {
                return Err(MeasureError::OutsideUniverse);
            }
            let mut next = Vec::with_capacity(cells.len() * 2);
            for cell in cells {
                let inside = cell.intersection(g);
                let outside = cell.difference(g);
                if !inside.is_empty() {
                    next.push(inside);
                }
                if !outside.is_empty() {
                    next.push(outside);
                }
            }
            cells = next;
        }
        Ok(Self::from_partition(universe.clone(), cells))
    }

    /// Validates an explicit member list (must contain `∅` and `universe` and be
    /// closed under complement and pairwise union) and recovers its atoms.
    pub fn from_members(universe: &PointSet, members: &[PointSet]) -> Result<Self, MeasureError> {
        use std::collections::BTreeSet;
        let set: BTreeSet<&PointSet> = members.iter().collect();
        let empty = PointSet::empty(universe.universe_len());
        if !set.contains(&empty) || !set.contains(universe) {
            return Err(MeasureError::NotAnAlgebra(
                "missing the empty set or the universe",
            ));
        }
        for m in &set {
            if !m.is_subset(universe) {
                return Err(MeasureError::OutsideUniverse);
            }
            if !set.contains(&universe.difference(m)) {
                return Err(MeasureError::NotAnAlgebra("not closed under complement"));
            }
            for n in &set {
                if !set.contains(&m.union(n)) {
                    return Err(MeasureError::NotAnAlgebra("not closed under union"));
                }
            }
        }
        let mut atoms: Vec<PointSet> = Vec::new();
        for p in universe.iter() {
            if atoms.iter().any(|a| a.contains(p)) {
                continue;
            }
            let mut cell = universe.clone();
            for m in set.iter().filter(|m| m.contains(p)) {
                cell = cell.intersection(m);
            }
            atoms.push(cell);
        }
        Ok(Self::from_partition(universe.clone(), atoms))
    }

    pub fn universe(&self) -> &PointSet {
        &self.universe
    }

    /// Minimal nonempty members, ordered by their smallest point.
    pub fn atoms(&self) -> &[PointSet] {
        &self.atoms
    }

    pub fn atom_of(&self, point: usize) -> Option<usize> {
        self.atoms.iter().position(|a| a.contains(point))
    }

    pub fn contains(&self, set: &PointSet) -> bool {
        set.is_subset(&self.universe)
            && self
                .atoms
                .iter()
                .all(|a| a.is_subset(set) || !a.intersects(set))
    }

    /// The union of the atoms selected by `mask` (bit `k` selects atom `k`).
    pub fn union_of(&self, mask: u64) -> PointSet {
        let mut out = PointSet::empty(self.universe.universe_len());
        for (k, a) in self.atoms.iter().enumerate() {
            if k < 64 && mask >> k & 1 == 1 {
                out = out.union(a);
            }
        }
        out
    }

    /// Indices of the atoms contained in `set`, or `None` if `set` is not a member.
    pub fn decompose(&self, set: &PointSet) -> Option<Vec<usize>> {
        if !self.contains(set) {
            return None;
        }
        Some(
            self.atoms
                .iter()
                .enumerate()
                .filter(|(_, a)| a.is_subset(set))
                .map(|(k, _)| k)
                .collect(),
        )
    }

    /// Every member, in order of the atom bitmask.
    pub fn members(&self) -> Result<Vec<PointSet>, MeasureError> {
        if self.atoms.len() > MAX_ENUMERATED_ATOMS {
            return Err(MeasureError::TooManyAtoms(self.atoms.len()));
        }
        Ok((0..1u64 << self.atoms.len())
            .map(|mask| self.union_of(mask))
            .collect())
    }

    /// Smallest member containing `subset`: the union of the atoms it meets.
    pub fn hull(&self, subset: &PointSet) -> PointSet {
        let mut out = PointSet::empty(self.universe.universe_len());
        for a in self.atoms.iter().filter(|a| a.intersects(subset)) {
            out = out.union(a);
        }
        out
    }

    /// `{A ∩ n : A member}` as an algebra on `n`.
    pub fn trace(&self, n: &PointSet) -> Result<SetAlgebra, MeasureError> {
        if !n.is_subset(&self.universe) {
            return Err(MeasureError::OutsideUniverse);
        }
        Ok(Self::from_partition(
            n.clone(),
            self.atoms.iter().map(|a| a.intersection(n)).collect(),
        ))
    }
}

/// A finitely additive measure on a [`SetAlgebra`], given by its atom masses.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    algebra: SetAlgebra,
    atom_mass: Vec<f64>,
}

impl Measure {
    pub fn new(algebra: SetAlgebra, atom_mass: Vec<f64>) -> Result<Self, MeasureError> {
        if atom_mass.len() != algebra.atoms().len() {
            return Err(MeasureError::LengthMismatch {
                points: algebra.atoms().len(),
                weights: atom_mass.len(),
            });
        }
        if let Some(&w) = atom_mass.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(MeasureError::NegativeWeight {
                point: "atom".into(),
                weight: w,
            });
        }
        Ok(Measure { algebra, atom_mass })
    }

    /// The restriction of the point weights of `space` to `algebra`.
    pub fn from_space(space: &FiniteMeasureSpace, algebra: SetAlgebra) -> Self {
        let atom_mass = algebra.atoms().iter().map(|a| space.mass(a)).collect();
        Measure { algebra, atom_mass }
    }

    pub fn algebra(&self) -> &SetAlgebra {
        &self.algebra
    }

    pub fn atom_masses(&self) -> &[f64] {
        &self.atom_mass
    }

    pub fn total(&self) -> f64 {
        self.atom_mass.iter().sum()
    }

    pub fn measure(&self, set: &PointSet) -> Result<f64, MeasureError> {
        let parts = self
            .algebra
            .decompose(set)
            .ok_or(MeasureError::NotMeasurable)?;
        Ok(parts.iter().map(|&k| self.atom_mass[k]).sum())
    }

    /// `inf { μ(A) : subset ⊆ A }`, attained at the union of the atoms meeting `subset`.
    pub fn outer_measure(&self, subset: &PointSet) -> f64 {
        self.algebra
            .atoms()
            .iter()
            .zip(&self.atom_mass)
            .filter(|(a, _)| a.intersects(subset))
            .map(|(_, m)| m)
            .sum()
    }

    /// The subspace measure on `n`: the trace algebra with `A ∩ n ↦ μ*(A ∩ n)`.
    pub fn subspace(&self, n: &PointSet) -> Result<Measure, MeasureError> {
        let trace = self.algebra.trace(n)?;
        let atom_mass = trace
            .atoms()
            .iter()
            .map(|a| self.outer_measure(a))
            .collect();
        Ok(Measure {
            algebra: trace,
            atom_mass,
        })
    }

    /// `Σ_atoms m(atom) * f(atom)` for `f` constant on atoms (checked against the first point).
    pub fn integrate(&self, f: &[f64]) -> Result<f64, MeasureError> {
        let mut total = 0.0;
        for (a, m) in self.algebra.atoms().iter().zip(&self.atom_mass) {
            let mut pts = a.iter();
            let first = pts.next().expect("atoms are nonempty");
            let v = f[first];
            if pts.any(|p| f[p] != v) {
                return Err(MeasureError::NotMeasurable);
            }
            total += m * v;
        }
        Ok(total)
    }
}
