use nalgebra::{DMatrix, DVector, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LatticeFn;
use crate::measure::TOLERANCE;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FunctionalError {
    #[error("function on {found} points given to a functional on {expected} points")]
    DomainMismatch { expected: usize, found: usize },
    #[error(
        "the table does not determine I on this function (not in the span of the listed functions)"
    )]
    NotDetermined,
    #[error("table values are inconsistent with linearity (residual {0:e})")]
    Inconsistent(f64),
    #[error("invalid weight {0}")]
    BadWeight(f64),
    #[error("spot check failed: {0}")]
    NotPositiveLinear(String),
}

/// A positive linear functional `I` on functions over a finite domain.
///
/// Implementations must be reentrant: engines may call `eval` from several threads.
pub trait PositiveFunctional: Sync {
    fn domain_len(&self) -> usize;
    fn eval(&self, f: &LatticeFn) -> Result<f64, FunctionalError>;
}

fn check_domain(expected: usize, f: &LatticeFn) -> Result<(), FunctionalError> {
    if f.len() != expected {
        return Err(FunctionalError::DomainMismatch {
            expected,
            found: f.len(),
        });
    }
    Ok(())
}

/// `I(f) = Σ w_x f(x)` for known nonnegative weights (testing mode).
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenWeights {
    weights: Vec<f64>,
}

impl HiddenWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self, FunctionalError> {
        if let Some(&w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(FunctionalError::BadWeight(w));
        }
        Ok(HiddenWeights { weights })
    }

    pub fn uniform(len: usize) -> Self {
        HiddenWeights {
            weights: vec![1.0 / len as f64; len],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl PositiveFunctional for HiddenWeights {
    fn domain_len(&self) -> usize {
        self.weights.len()
    }

    fn eval(&self, f: &LatticeFn) -> Result<f64, FunctionalError> {
        check_domain(self.weights.len(), f)?;
        Ok(f.integrate(&self.weights))
    }
}

/// The functional that vanishes identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroFunctional {
    pub len: usize,
}

impl PositiveFunctional for ZeroFunctional {
    fn domain_len(&self) -> usize {
        self.len
    }

    fn eval(&self, f: &LatticeFn) -> Result<f64, FunctionalError> {
        check_domain(self.len, f)?;
        Ok(0.0)
    }
}

/// A functional known only through its values on listed functions; it is evaluated
/// on their linear span and refuses anything outside it.
#[derive(Debug, Clone)]
pub struct TableFunctional {
    len: usize,
    /// Columns are the listed functions.
    basis: DMatrix<f64>,
    span: Option<SVD<f64, nalgebra::Dyn, nalgebra::Dyn>>,
    rank_tol: f64,
    /// A representing vector: `I(f) = w · f` on the span.
    representer: DVector<f64>,
}

impl TableFunctional {
    pub fn new(len: usize, entries: &[(LatticeFn, f64)]) -> Result<Self, FunctionalError> {
        for (f, _) in entries {
            check_domain(len, f)?;
        }
        let k = entries.len();
        let basis = DMatrix::from_fn(len, k, |i, j| entries[j].0.get(i));
        let values = DVector::from_iterator(k, entries.iter().map(|(_, v)| *v));
        let scale = 1.0 + basis.amax();
        let rank_tol = 1e-12 * scale * (len.max(k).max(1) as f64);
        if k == 0 || len == 0 {
            if values.amax() > 0.0 {
                return Err(FunctionalError::Inconsistent(values.amax()));
            }
            return Ok(TableFunctional {
                len,
                basis,
                span: None,
                rank_tol,
                representer: DVector::zeros(len),
            });
        }
        let representer = basis
            .transpose()
            .svd(true, true)
            .solve(&values, rank_tol)
            .map_err(|_| FunctionalError::Inconsistent(f64::NAN))?;
        let residual = (basis.transpose() * &representer - &values).amax();
        if residual > TOLERANCE * (1.0 + values.amax()) {
            return Err(FunctionalError::Inconsistent(residual));
        }
        Ok(TableFunctional {
            len,
            span: Some(basis.clone().svd(true, true)),
            basis,
            rank_tol,
            representer,
        })
    }
}

impl PositiveFunctional for TableFunctional {
    fn domain_len(&self) -> usize {
        self.len
    }

    fn eval(&self, f: &LatticeFn) -> Result<f64, FunctionalError> {
        check_domain(self.len, f)?;
        let target = DVector::from_column_slice(f.values());
        let rebuilt = match &self.span {
            Some(span) => {
                let coeffs = span
                    .solve(&target, self.rank_tol)
                    .map_err(|_| FunctionalError::NotDetermined)?;
                &self.basis * coeffs
            }
            None => DVector::zeros(self.len),
        };
        if (rebuilt - &target).amax() > TOLERANCE * (1.0 + target.amax()) {
            return Err(FunctionalError::NotDetermined);
        }
        Ok(self.representer.dot(&target))
    }
}

/// Randomized check of linearity and positivity on combinations of `fns`.
/// Combinations the functional cannot evaluate are skipped.
pub fn spot_check(
    functional: &dyn PositiveFunctional,
    fns: &[LatticeFn],
    seed: u64,
    samples: usize,
) -> Result<(), FunctionalError> {
    if fns.is_empty() {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let f = &fns[rng.gen_range(0..fns.len())];
        let g = &fns[rng.gen_range(0..fns.len())];
        let a: f64 = rng.gen_range(-2.0..2.0);
        let b: f64 = rng.gen_range(-2.0..2.0);
        let combo = f.scale(a).add(&g.scale(b));
        if let (Ok(i_f), Ok(i_g), Ok(i_c)) = (
            functional.eval(f),
            functional.eval(g),
            functional.eval(&combo),
        ) {
            let expected = a * i_f + b * i_g;
            let scale = 1.0 + i_f.abs() + i_g.abs();
            if (i_c - expected).abs() > TOLERANCE * scale * 4.0 {
                return Err(FunctionalError::NotPositiveLinear(format!(
                    "I(af+bg) = {i_c} but aI(f)+bI(g) = {expected}"
                )));
            }
        }
        for h in [f.abs(), f.join(&LatticeFn::constant(f.len(), 0.0))] {
            if let Ok(v) = functional.eval(&h) {
                if v < -TOLERANCE * (1.0 + h.sup()) {
                    return Err(FunctionalError::NotPositiveLinear(format!(
                        "I is negative ({v}) on a nonnegative function"
                    )));
                }
            }
        }
    }
    Ok(())
}
