use crate::measure::PointSet;

/// A real function on the finite domain `{0, .., len-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFn {
    values: Vec<f64>,
}

impl LatticeFn {
    pub fn new(values: Vec<f64>) -> Self {
        LatticeFn { values }
    }

    pub fn constant(len: usize, c: f64) -> Self {
        LatticeFn {
            values: vec![c; len],
        }
    }

    pub fn indicator(set: &PointSet) -> Self {
        LatticeFn {
            values: (0..set.universe_len())
                .map(|i| if set.contains(i) { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        LatticeFn {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.len(), other.len(), "functions on different domains");
        LatticeFn {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn shift(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn join(&self, other: &Self) -> Self {
        self.zip(other, f64::max)
    }

    pub fn meet(&self, other: &Self) -> Self {
        self.zip(other, f64::min)
    }

    pub fn sup(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `{x : f(x) > 0}`.
    pub fn positive_set(&self) -> PointSet {
        PointSet::from_predicate(self.len(), |i| self.values[i] > 0.0)
    }

    /// `{x : f(x) = 0}`.
    pub fn zero_set(&self) -> PointSet {
        PointSet::from_predicate(self.len(), |i| self.values[i] == 0.0)
    }

    /// `{x : f(x) ∈ [lo, hi)}`.
    pub fn preimage_half_open(&self, lo: f64, hi: f64) -> PointSet {
        PointSet::from_predicate(self.len(), |i| lo <= self.values[i] && self.values[i] < hi)
    }

    pub fn attains(&self, v: f64) -> bool {
        self.values.contains(&v)
    }

    /// `Σ w_i f(i)` in index order.
    pub fn integrate(&self, weights: &[f64]) -> f64 {
        self.values.iter().zip(weights).map(|(f, w)| f * w).sum()
    }
}
