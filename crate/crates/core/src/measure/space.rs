use std::collections::HashMap;

use super::{MeasureError, PointSet};

/// Finitely many named points with nonnegative weights; every singleton is measurable.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasureSpace {
    ids: Vec<String>,
    weights: Vec<f64>,
    index: HashMap<String, usize>,
}

impl FiniteMeasureSpace {
    pub fn new<S: Into<String>>(
        points: impl IntoIterator<Item = S>,
        weights: impl IntoIterator<Item = f64>,
    ) -> Result<Self, MeasureError> {
        let ids: Vec<String> = points.into_iter().map(Into::into).collect();
        let weights: Vec<f64> = weights.into_iter().collect();
        if ids.len() != weights.len() {
            return Err(MeasureError::LengthMismatch {
                points: ids.len(),
                weights: weights.len(),
            });
        }
        let mut index = HashMap::with_capacity(ids.len());
        for (i, (id, w)) in ids.iter().zip(&weights).enumerate() {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(MeasureError::NegativeWeight {
                    point: id.clone(),
                    weight: *w,
                });
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(MeasureError::DuplicatePoint(id.clone()));
            }
        }
        Ok(FiniteMeasureSpace {
            ids,
            weights,
            index,
        })
    }

    /// Points named `prefix0, prefix1, ..`.
    pub fn indexed(
        prefix: &str,
        weights: impl IntoIterator<Item = f64>,
    ) -> Result<Self, MeasureError> {
        let weights: Vec<f64> = weights.into_iter().collect();
        let ids = (0..weights.len()).map(|i| format!("{prefix}{i}"));
        Self::new(ids, weights)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_probability(&self, tol: f64) -> bool {
        (self.total() - 1.0).abs() <= tol
    }

    pub fn all(&self) -> PointSet {
        PointSet::full(self.len())
    }

    /// Sum of the weights of `set`, accumulated in ascending index order.
    pub fn mass(&self, set: &PointSet) -> f64 {
        set.iter().map(|i| self.weights[i]).sum()
    }
}
