use super::{LatticeError, LatticeFn};
use crate::measure::TOLERANCE;

/// `f*g = (f ∨ (−g ∨ 0)) − f − (−g ∨ 0)`.
///
/// Since `(a ∨ b) − a − b = −(a ∧ b)`, this is computed as `−(f ∧ (−g ∨ 0))`, which
/// is exact in floating point where the displayed form may round.
pub fn star_combine(f: &LatticeFn, g: &LatticeFn) -> LatticeFn {
    f.zip(g, |a, b| -(a.min((-b).max(0.0))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// `0 ≤ f ≤ 1` and `f*g ≡ 0` everywhere.
    Exact,
    /// The same up to a null set: `∫|f*g| = ∫(f ∧ 0) = ∫((f ∨ 1) − 1) = 0`.
    Almost,
    Neither,
}

pub fn is_special(f: &LatticeFn, g: &LatticeFn) -> bool {
    let star = star_combine(f, g);
    f.values().iter().all(|v| (0.0..=1.0).contains(v)) && star.values().iter().all(|v| *v == 0.0)
}

/// The three integral identities against the point weights `nu`, each within `TOLERANCE`.
pub fn is_almost_special(f: &LatticeFn, g: &LatticeFn, nu: &[f64]) -> bool {
    let zero = LatticeFn::constant(f.len(), 0.0);
    let one = LatticeFn::constant(f.len(), 1.0);
    let star = star_combine(f, g).abs().integrate(nu);
    let below = f.meet(&zero).integrate(nu);
    let above = f.join(&one).sub(&one).integrate(nu);
    star.abs() <= TOLERANCE && below.abs() <= TOLERANCE && above.abs() <= TOLERANCE
}

/// Classifies `(f, g)`. Deciding the almost-special case needs the measure `nu`.
pub fn classify_pair(
    f: &LatticeFn,
    g: &LatticeFn,
    nu: Option<&[f64]>,
) -> Result<PairKind, LatticeError> {
    if f.len() != g.len() || nu.is_some_and(|w| w.len() != f.len()) {
        return Err(LatticeError::DomainMismatch);
    }
    if is_special(f, g) {
        return Ok(PairKind::Exact);
    }
    let nu = nu.ok_or(LatticeError::MissingMeasure)?;
    Ok(if is_almost_special(f, g, nu) {
        PairKind::Almost
    } else {
        PairKind::Neither
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn literal_star(f: &LatticeFn, g: &LatticeFn) -> LatticeFn {
        f.zip(g, |a, b| {
            let neg_g = (-b).max(0.0);
            a.max(neg_g) - a - neg_g
        })
    }

    #[test]
    fn examples() {
        let g = LatticeFn::new(vec![-1.0, 0.0, 2.0, 0.5]);
        let f = g.positive_set();
        let f = LatticeFn::indicator(&f);
        assert_eq!(classify_pair(&f, &g, None).unwrap(), PairKind::Exact);
        let zero = LatticeFn::constant(4, 0.0);
        assert_eq!(classify_pair(&zero, &g, None).unwrap(), PairKind::Exact);
        let bad = LatticeFn::new(vec![1.0, 0.0, 1.0, 1.0]);
        let nu = [0.0, 0.2, 0.3, 0.5];
        assert_eq!(
            classify_pair(&bad, &g, Some(&nu)).unwrap(),
            PairKind::Almost
        );
        assert_eq!(
            classify_pair(&bad, &g, None),
            Err(LatticeError::MissingMeasure)
        );
        let heavy = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(
            classify_pair(&bad, &g, Some(&heavy)).unwrap(),
            PairKind::Neither
        );
    }

    proptest! {
        #[test]
        fn star_identity(
            fv in proptest::collection::vec(-4i8..=8, 1..8),
            gv in proptest::collection::vec(-4i8..=4, 8),
        ) {
            let n = fv.len();
            let f = LatticeFn::new(fv.iter().map(|v| f64::from(*v) / 4.0).collect());
            let g = LatticeFn::new(gv[..n].iter().map(|v| f64::from(*v) / 2.0).collect());
            let star = star_combine(&f, &g);
            let lit = literal_star(&f, &g);
            for x in 0..n {
                prop_assert!((star.get(x) - lit.get(x)).abs() <= 1e-12);
            }
            // special iff f is [0,1]-valued and vanishes where g < 0
            let direct = (0..n).all(|x| (0.0..=1.0).contains(&f.get(x)) && (g.get(x) >= 0.0 || f.get(x) == 0.0));
            prop_assert_eq!(classify_pair(&f, &g, None).is_ok_and(|k| k == PairKind::Exact), direct);
        }
    }
}
