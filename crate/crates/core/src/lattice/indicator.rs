use std::fmt;
use std::str::FromStr;

use super::{LatticeError, LatticeFn};
use crate::measure::PointSet;

/// Largest index examined when looking for exact stabilization.
pub const STABILIZATION_CAP: u64 = 1_000_000;

/// An interval of reals; `None` endpoints are infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interval {
    Open { lo: Option<f64>, hi: Option<f64> },
    Closed { lo: Option<f64>, hi: Option<f64> },
}

impl Interval {
    pub fn open(lo: Option<f64>, hi: Option<f64>) -> Result<Self, LatticeError> {
        Self::validated(Interval::Open { lo, hi })
    }

    pub fn closed(lo: Option<f64>, hi: Option<f64>) -> Result<Self, LatticeError> {
        Self::validated(Interval::Closed { lo, hi })
    }

    /// The degenerate closed interval `[α, α]`.
    pub fn point(alpha: f64) -> Self {
        Interval::Closed {
            lo: Some(alpha),
            hi: Some(alpha),
        }
    }

    fn validated(self) -> Result<Self, LatticeError> {
        let (lo, hi) = self.endpoints();
        for e in [lo, hi].into_iter().flatten() {
            if !e.is_finite() {
                return Err(LatticeError::BadInterval(format!(
                    "endpoint {e} must be finite; omit it for an unbounded side"
                )));
            }
        }
        if let (Some(a), Some(b)) = (lo, hi) {
            let ok = match self {
                Interval::Open { .. } => a < b,
                Interval::Closed { .. } => a <= b,
            };
            if !ok {
                return Err(LatticeError::BadInterval(format!("{self} is empty")));
            }
        }
        Ok(self)
    }

    pub fn endpoints(&self) -> (Option<f64>, Option<f64>) {
        match *self {
            Interval::Open { lo, hi } | Interval::Closed { lo, hi } => (lo, hi),
        }
    }

    pub fn is_open(&self) -> bool {
        matches!(self, Interval::Open { .. })
    }

    pub fn contains(&self, v: f64) -> bool {
        match *self {
            Interval::Open { lo, hi } => lo.is_none_or(|a| a < v) && hi.is_none_or(|b| v < b),
            Interval::Closed { lo, hi } => lo.is_none_or(|a| a <= v) && hi.is_none_or(|b| v <= b),
        }
    }

    /// The `n`-th approximant at a value `v`.
    ///
    /// Open sides use `clamp(n(v - a), 0, 1)` and `clamp(n(b - v), 0, 1)`, which equal
    /// `n(min(v, a + 1/n) - min(v, a))` and `n(max(v, b) - max(v, b - 1/n))`. Closed
    /// sides use `clamp(n(v - a) + 1, 0, 1)` and `clamp(n(b - v) + 1, 0, 1)`, equal to
    /// `n(min(v, a) - min(v, a - 1/n))` and `n(max(v, b + 1/n) - max(v, b))`. The clamped
    /// forms hit 0 and 1 exactly, so stabilization can be detected by equality.
    pub fn approximant(&self, v: f64, n: u64) -> f64 {
        let n = n as f64;
        let (lo, hi) = self.endpoints();
        let bump = if self.is_open() { 0.0 } else { 1.0 };
        let mut out = 1.0f64;
        if let Some(a) = lo {
            out = out.min((n * (v - a) + bump).clamp(0.0, 1.0));
        }
        if let Some(b) = hi {
            out = out.min((n * (b - v) + bump).clamp(0.0, 1.0));
        }
        out
    }
}

fn fmt_end(e: Option<f64>, neg: bool) -> String {
    match e {
        Some(v) => crate::logic::format_real(v),
        None if neg => "-inf".into(),
        None => "inf".into(),
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.endpoints();
        let (l, r) = if self.is_open() {
            ('(', ')')
        } else {
            ('[', ']')
        };
        if !self.is_open() && lo.is_some() && lo == hi {
            return write!(f, "[{}]", fmt_end(lo, true));
        }
        write!(f, "{l}{},{}{r}", fmt_end(lo, true), fmt_end(hi, false))
    }
}

impl FromStr for Interval {
    type Err = LatticeError;

    /// Accepts `(a,b)`, `[a,b]` and `[a]`, with `inf` / `-inf` for open ends.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || LatticeError::BadInterval(format!("cannot read interval `{s}`"));
        let (open, inner) = if let Some(rest) = s.strip_prefix('(') {
            (true, rest.strip_suffix(')').ok_or_else(bad)?)
        } else if let Some(rest) = s.strip_prefix('[') {
            (false, rest.strip_suffix(']').ok_or_else(bad)?)
        } else {
            return Err(bad());
        };
        let end = |t: &str, neg: bool| -> Result<Option<f64>, LatticeError> {
            match t.trim() {
                "inf" | "+inf" if !neg => Ok(None),
                "-inf" if neg => Ok(None),
                other => other.parse::<f64>().map(Some).map_err(|_| bad()),
            }
        };
        let parts: Vec<&str> = inner.split(',').collect();
        match (open, parts.as_slice()) {
            (false, [p]) => Ok(Interval::point(end(p, true)?.ok_or_else(bad)?)),
            (true, [a, b]) => Interval::open(end(a, true)?, end(b, false)?),
            (false, [a, b]) => Interval::closed(end(a, true)?, end(b, false)?),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Open intervals; the sequence increases.
    Open,
    /// Closed intervals or points; the sequence decreases.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    Intersection,
    Union,
}

/// The approximating sequence for the indicator of `⋂ f_i⁻¹(U_i)` or `⋃ f_i⁻¹(U_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeq {
    constraints: Vec<(LatticeFn, Interval)>,
    mode: Mode,
    combine: Combine,
    len: usize,
}

impl IndicatorSeq {
    pub fn new(
        constraints: Vec<(LatticeFn, Interval)>,
        mode: Mode,
        combine: Combine,
    ) -> Result<Self, LatticeError> {
        let len = constraints.first().map_or(0, |(f, _)| f.len());
        for (f, u) in &constraints {
            if f.len() != len {
                return Err(LatticeError::DomainMismatch);
            }
            if u.is_open() != (mode == Mode::Open) {
                return Err(LatticeError::MixedModes);
            }
        }
        Ok(IndicatorSeq {
            constraints,
            mode,
            combine,
            len,
        })
    }

    /// The decreasing sequence corresponding to `α` for `f`.
    pub fn point(f: &LatticeFn, alpha: f64) -> Self {
        IndicatorSeq {
            len: f.len(),
            constraints: vec![(f.clone(), Interval::point(alpha))],
            mode: Mode::Closed,
            combine: Combine::Intersection,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_increasing(&self) -> bool {
        self.mode == Mode::Open
    }

    pub fn domain_len(&self) -> usize {
        self.len
    }

    fn fold(&self, value: impl Fn(&LatticeFn, &Interval) -> f64) -> f64 {
        let vals = self.constraints.iter().map(|(f, u)| value(f, u));
        match self.combine {
            Combine::Intersection => vals.fold(1.0, f64::min),
            Combine::Union => vals.fold(0.0, f64::max),
        }
    }

    /// The `n`-th function of the sequence (`n ≥ 1`).
    pub fn term(&self, n: u64) -> LatticeFn {
        assert!(n >= 1, "sequences are indexed from 1");
        LatticeFn::new(
            (0..self.len)
                .map(|x| self.fold(|f, u| u.approximant(f.get(x), n)))
                .collect(),
        )
    }

    /// The set whose indicator is the pointwise limit.
    pub fn target(&self) -> PointSet {
        PointSet::from_predicate(self.len, |x| {
            self.fold(|f, u| if u.contains(f.get(x)) { 1.0 } else { 0.0 }) == 1.0
        })
    }

    fn is_stable_at(&self, n: u64, target: &LatticeFn) -> bool {
        self.term(n) == *target
    }
}

/// Least `n*` with `seq(n*)` equal to the indicator of the target. The sequence is
/// monotone and bounded by its limit, so once equal it stays equal; the index is
/// located by bisection on `[1, STABILIZATION_CAP]`.
pub fn stabilization_index(seq: &IndicatorSeq) -> Result<u64, LatticeError> {
    let target = LatticeFn::indicator(&seq.target());
    if seq.is_stable_at(1, &target) {
        return Ok(1);
    }
    if !seq.is_stable_at(STABILIZATION_CAP, &target) {
        return Err(LatticeError::NoStabilization {
            cap: STABILIZATION_CAP,
        });
    }
    let (mut bad, mut good) = (1u64, STABILIZATION_CAP);
    while good - bad > 1 {
        let mid = bad + (good - bad) / 2;
        if seq.is_stable_at(mid, &target) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

/// The `n`-th member of the decreasing sequence corresponding to `α` for `f`:
/// `clamp(1 - n|f - α|, 0, 1)`.
pub fn value_seq(f: &LatticeFn, alpha: f64, n: u64) -> LatticeFn {
    IndicatorSeq::point(f, alpha).term(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f0123() -> LatticeFn {
        LatticeFn::new(vec![0.0, 1.0, 2.0, 3.0])
    }

    #[test]
    fn open_ray_example() {
        let seq = IndicatorSeq::new(
            vec![(f0123(), Interval::open(Some(0.5), None).unwrap())],
            Mode::Open,
            Combine::Intersection,
        )
        .unwrap();
        assert_eq!(seq.term(2).values(), &[0.0, 1.0, 1.0, 1.0]);
        assert_eq!(stabilization_index(&seq).unwrap(), 2);
        assert_eq!(seq.term(1).values(), &[0.0, 0.5, 1.0, 1.0]);
    }

    #[test]
    fn boundary_value_excluded() {
        let f = LatticeFn::new(vec![0.5, 0.5]);
        let seq = IndicatorSeq::new(
            vec![(f, "(0.5,inf)".parse().unwrap())],
            Mode::Open,
            Combine::Intersection,
        )
        .unwrap();
        for n in [1, 10, 1000] {
            assert_eq!(seq.term(n).values(), &[0.0, 0.0]);
        }
    }

    #[test]
    fn point_sequence_support() {
        let f = LatticeFn::new(vec![0.0, 0.3, 0.5, 0.6, 1.0]);
        for n in 1..20u64 {
            let h = value_seq(&f, 0.5, n);
            for x in 0..f.len() {
                if h.get(x) > 0.0 {
                    assert!((f.get(x) - 0.5).abs() < 1.0 / n as f64);
                }
            }
            assert_eq!(h.get(2), 1.0);
        }
        assert_eq!(
            value_seq(&LatticeFn::new(vec![0.0, 1.0]), 0.5, 4).values(),
            &[0.0, 0.0]
        );
        assert_eq!(
            value_seq(&LatticeFn::new(vec![2.0, 3.0]), 0.5, 1).values(),
            &[0.0, 0.0]
        );
        assert_eq!(
            value_seq(&LatticeFn::constant(3, 0.7), 0.7, 9).values(),
            &[1.0; 3]
        );
    }

    #[test]
    fn constraint_excluding_range_stabilizes_at_once() {
        let seq = IndicatorSeq::new(
            vec![(f0123(), Interval::open(Some(10.0), None).unwrap())],
            Mode::Open,
            Combine::Intersection,
        )
        .unwrap();
        assert_eq!(stabilization_index(&seq).unwrap(), 1);
    }

    #[test]
    fn mixed_modes_and_bad_intervals() {
        let r = IndicatorSeq::new(
            vec![(f0123(), Interval::point(1.0))],
            Mode::Open,
            Combine::Union,
        );
        assert_eq!(r, Err(LatticeError::MixedModes));
        assert!(Interval::open(Some(1.0), Some(1.0)).is_err());
        assert!("(1,0)".parse::<Interval>().is_err());
        assert_eq!("[2]".parse::<Interval>().unwrap(), Interval::point(2.0));
        assert_eq!(
            "(-inf,3)".parse::<Interval>().unwrap(),
            Interval::Open {
                lo: None,
                hi: Some(3.0)
            }
        );
        assert_eq!(Interval::point(2.0).to_string(), "[2]");
        assert_eq!(
            "(0.5,inf)".parse::<Interval>().unwrap().to_string(),
            "(0.5,inf)"
        );
    }

    #[test]
    fn no_stabilization_reported() {
        let f = LatticeFn::new(vec![1.0 + 1e-9]);
        let seq = IndicatorSeq::new(
            vec![(f, Interval::open(Some(1.0), None).unwrap())],
            Mode::Open,
            Combine::Intersection,
        )
        .unwrap();
        assert!(matches!(
            stabilization_index(&seq),
            Err(LatticeError::NoStabilization { .. })
        ));
    }

    /// The defining formulas, evaluated literally.
    fn literal(u: &Interval, v: f64, n: u64) -> f64 {
        let n = n as f64;
        let (lo, hi) = u.endpoints();
        let mut out = 1.0f64;
        if u.is_open() {
            if let Some(a) = lo {
                out = out.min(n * ((v.min(a + 1.0 / n)) - v.min(a)));
            }
            if let Some(b) = hi {
                out = out.min(n * (v.max(b) - v.max(b - 1.0 / n)));
            }
        } else {
            if let Some(a) = lo {
                out = out.min(n * (v.min(a) - v.min(a - 1.0 / n)));
            }
            if let Some(b) = hi {
                out = out.min(n * (v.max(b + 1.0 / n) - v.max(b)));
            }
        }
        out
    }

    fn interval() -> impl Strategy<Value = Interval> {
        let end = prop_oneof![
            Just(None),
            (-8i32..8).prop_map(|k| Some(f64::from(k) / 4.0))
        ];
        (any::<bool>(), end.clone(), end).prop_filter_map("nonempty", |(open, a, b)| {
            if open {
                Interval::open(a, b).ok()
            } else {
                Interval::closed(a, b).ok()
            }
        })
    }

    proptest! {
        #[test]
        fn clamped_forms_agree_with_literal_formulas(
            u in interval(),
            v in -3.0f64..3.0,
            n in 1u64..500,
        ) {
            let ours = u.approximant(v, n);
            prop_assert!((ours - literal(&u, v, n)).abs() <= 1e-12, "{} at {} n={}", u, v, n);
        }
    }
}
