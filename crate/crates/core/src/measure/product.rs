use super::{FiniteMeasureSpace, MeasureError, PointSet};

/// Largest number of tuples enumerated by [`ProductMeasure::measure_where`].
pub const MAX_TUPLES: usize = 1 << 22;

/// The n-fold product of a finite measure space. Without diagonals the measure is
/// only queried on rectangles; with diagonals the sets `D_ij = {x̄ : x_i = x_j}` are
/// measurable as well.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMeasure {
    weights: Vec<f64>,
    n: usize,
    with_diagonals: bool,
}

impl ProductMeasure {
    pub fn new(
        space: &FiniteMeasureSpace,
        n: usize,
        with_diagonals: bool,
    ) -> Result<Self, MeasureError> {
        if n == 0 {
            return Err(MeasureError::ZeroDimension);
        }
        Ok(ProductMeasure {
            weights: space.weights().to_vec(),
            n,
            with_diagonals,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn tuple_weight(&self, tuple: &[usize]) -> f64 {
        tuple.iter().map(|&p| self.weights[p]).product()
    }

    /// `μ(A_1) ⋯ μ(A_n)`.
    pub fn rectangle(&self, sides: &[PointSet]) -> Result<f64, MeasureError> {
        if sides.len() != self.n {
            return Err(MeasureError::LengthMismatch {
                points: self.n,
                weights: sides.len(),
            });
        }
        Ok(sides
            .iter()
            .map(|s| s.iter().map(|p| self.weights[p]).sum::<f64>())
            .product())
    }

    /// `μ⁽ⁿ⁾(D_ij) = Σ_x μ({x})² · μ(M)^{n-2}` for `i ≠ j`; the whole space when `i = j`.
    pub fn diagonal(&self, i: usize, j: usize) -> Result<f64, MeasureError> {
        if !self.with_diagonals {
            return Err(MeasureError::NotMeasurable);
        }
        if i >= self.n || j >= self.n {
            return Err(MeasureError::OutsideUniverse);
        }
        let total: f64 = self.weights.iter().sum();
        if i == j {
            return Ok(total.powi(self.n as i32));
        }
        let squares: f64 = self.weights.iter().map(|w| w * w).sum();
        Ok(squares * total.powi(self.n as i32 - 2))
    }

    /// Total weight of the tuples satisfying `pred`, by enumeration.
    pub fn measure_where(&self, pred: impl Fn(&[usize]) -> bool) -> Result<f64, MeasureError> {
        let m = self.weights.len();
        let count = m
            .checked_pow(self.n as u32)
            .filter(|c| *c <= MAX_TUPLES)
            .ok_or(MeasureError::TooManyAtoms(usize::MAX))?;
        let mut tuple = vec![0usize; self.n];
        let mut total = 0.0;
        for _ in 0..count {
            if pred(&tuple) {
                total += self.tuple_weight(&tuple);
            }
            for slot in tuple.iter_mut().rev() {
                *slot += 1;
                if *slot < m {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_pair_diagonal() {
        let s = FiniteMeasureSpace::indexed("p", [0.5, 0.5]).unwrap();
        let m = ProductMeasure::new(&s, 2, true).unwrap();
        assert_eq!(m.diagonal(0, 1).unwrap(), 0.5);
        let enumerated = m.measure_where(|t| t[0] == t[1]).unwrap();
        assert_eq!(enumerated, 0.5);
        assert!(ProductMeasure::new(&s, 2, false)
            .unwrap()
            .diagonal(0, 1)
            .is_err());
        assert!(ProductMeasure::new(&s, 0, true).is_err());
    }

    #[test]
    fn one_fold_is_original() {
        let s = FiniteMeasureSpace::indexed("p", [0.2, 0.3, 0.5]).unwrap();
        let m = ProductMeasure::new(&s, 1, false).unwrap();
        for p in 0..3 {
            assert_eq!(
                m.rectangle(&[PointSet::singleton(3, p)]).unwrap(),
                s.weight(p)
            );
        }
    }

    #[test]
    fn three_fold_diagonal_matches_enumeration() {
        let s = FiniteMeasureSpace::indexed("p", [0.1, 0.6, 0.3]).unwrap();
        let m = ProductMeasure::new(&s, 3, true).unwrap();
        let e = m.measure_where(|t| t[0] == t[2]).unwrap();
        assert!((m.diagonal(0, 2).unwrap() - e).abs() < 1e-12);
    }
}
