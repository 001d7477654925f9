use super::{stabilization_index, IndicatorSeq, LatticeError, LatticeFn, PositiveFunctional};

/// Deepest dyadic level scanned by [`find_inessential`].
pub const MAX_DYADIC_DEPTH: u32 = 52;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InessentialCheck {
    pub inessential: bool,
    /// `lim_n I(h_n)`, read off at the stabilization index.
    pub limit: f64,
    pub index: u64,
}

/// Decides whether `α` is an inessential value of `f` for `I`: the decreasing
/// sequence corresponding to `α` stabilizes at some `n*`, after which `I(h_n)` is
/// constant, so its limit is `I(h_{n*})`.
pub fn is_inessential(
    f: &LatticeFn,
    alpha: f64,
    functional: &dyn PositiveFunctional,
    tol: f64,
) -> Result<InessentialCheck, LatticeError> {
    let seq = IndicatorSeq::point(f, alpha);
    let index = stabilization_index(&seq)?;
    let limit = functional.eval(&seq.term(index))?;
    let next = functional.eval(&seq.term(index + 1))?;
    if (limit - next).abs() > tol {
        return Err(LatticeError::NonConvergent { at: index });
    }
    Ok(InessentialCheck {
        inessential: limit.abs() <= tol,
        limit,
        index,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InessentialChoice {
    pub alpha: f64,
    /// Candidates skipped because some function attains them.
    pub rejected: Vec<f64>,
    /// Candidates whose limit was tested.
    pub tested: usize,
}

/// Candidates in `(r, s)`: the midpoint, then `r + k(s - r)/2^d` for odd `k`, by depth.
fn dyadic_candidates(r: f64, s: f64) -> impl Iterator<Item = f64> {
    (1..=MAX_DYADIC_DEPTH).flat_map(move |d| {
        let den = (1u64 << d) as f64;
        (1..(1u64 << d)).step_by(2).map(move |k| {
            let k = k as f64;
            (r * (den - k) + s * k) / den
        })
    })
}

/// Finds `α ∈ (r, s)` that is an inessential value of every function in `fs`.
///
/// Dyadic points of `(r, s)` are scanned in order; a candidate attained by some
/// function is skipped before its limit is computed. On a finite domain every
/// non-attained value has limit `I(0) = 0`, so at most one candidate per attained
/// value can fail and the scan budget of `Σ |range f_i| + 1` tests always suffices.
pub fn find_inessential(
    fs: &[LatticeFn],
    r: f64,
    s: f64,
    functional: &dyn PositiveFunctional,
    tol: f64,
) -> Result<InessentialChoice, LatticeError> {
    if !(r.is_finite() && s.is_finite() && r < s) {
        return Err(LatticeError::BadInterval(format!("({r},{s})")));
    }
    let mut attained: Vec<f64> = fs.iter().flat_map(|f| f.values().iter().copied()).collect();
    attained.sort_by(f64::total_cmp);
    attained.dedup();
    let budget = attained.len() + 1;
    let mut rejected = Vec::new();
    let mut tested = 0;
    for alpha in dyadic_candidates(r, s) {
        if !(r < alpha && alpha < s) || rejected.contains(&alpha) {
            continue;
        }
        if attained.binary_search_by(|v| v.total_cmp(&alpha)).is_ok() {
            rejected.push(alpha);
            continue;
        }
        tested += 1;
        let mut all = true;
        for f in fs {
            match is_inessential(f, alpha, functional, tol) {
                Ok(check) if check.inessential => {}
                // too close to an attained value to resolve within the index cap
                Ok(_) | Err(LatticeError::NoStabilization { .. }) => {
                    all = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if all {
            return Ok(InessentialChoice {
                alpha,
                rejected,
                tested,
            });
        }
        if tested >= budget {
            break;
        }
    }
    Err(LatticeError::ExhaustedBudget)
}
