use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{fmt_rational, Rational};
use crate::scalar::{sum_rationals, Neumaier, Scalar};

/// Finite union of closed intervals with rational endpoints, kept sorted,
/// with overlapping or touching intervals merged.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntervalUnion {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        Self::from_intervals(vec![(lo, hi)])
    }

    pub fn unit() -> Self {
        Self {
            intervals: vec![(Rational::zero(), Rational::one())],
        }
    }

    /// Sorts and merges; every input needs `lo < hi`.
    pub fn from_intervals(mut intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        if let Some((lo, hi)) = intervals.iter().find(|(lo, hi)| lo >= hi) {
            return Err(Error::InvalidInterval {
                lo: fmt_rational(lo),
                hi: fmt_rational(hi),
            });
        }
        intervals.sort();
        Ok(Self {
            intervals: merge_sorted(intervals),
        })
    }

    /// Caller guarantees `intervals` is sorted by `lo` with `lo < hi`.
    pub(crate) fn from_sorted(intervals: Vec<(Rational, Rational)>) -> Self {
        Self {
            intervals: merge_sorted(intervals),
        }
    }

    pub fn components(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let idx = self.intervals.partition_point(|(lo, _)| lo <= x);
        idx > 0 && *x <= self.intervals[idx - 1].1
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Rational {
        sum_rationals(self.intervals.iter().map(|(lo, hi)| hi - lo).collect())
    }

    pub fn measure_f64(&self) -> f64 {
        self.intervals
            .iter()
            .map(|(lo, hi)| (hi - lo).to_f64())
            .sum::<Neumaier>()
            .value()
    }

    /// `λ(U ∩ [0, x])`.
    pub fn cdf(&self, x: &Rational) -> Rational {
        let idx = self.intervals.partition_point(|(lo, _)| lo < x);
        let mut parts: Vec<Rational> = self.intervals[..idx]
            .iter()
            .map(|(lo, hi)| if hi <= x { hi - lo } else { x - lo })
            .collect();
        if parts.is_empty() {
            return Rational::zero();
        }
        parts.shrink_to_fit();
        sum_rationals(parts)
    }

    /// `∫_U exp(t·x) dx`, in closed form (`t = 0` gives the measure).
    pub fn integrate_exp(&self, t: f64) -> f64 {
        let mut acc = Neumaier::new();
        for (lo, hi) in &self.intervals {
            let (a, b) = (lo.to_f64(), hi.to_f64());
            if t == 0.0 {
                acc.add(b - a);
            } else {
                // e^{ta}(e^{t(b−a)} − 1)/t, stable for short intervals
                acc.add((t * a).exp() * (t * (b - a)).exp_m1() / t);
            }
        }
        acc.value()
    }

    /// One line per component, `lo_num/lo_den,hi_num/hi_den`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (lo, hi) in &self.intervals {
            out.push_str(&fmt_rational(lo));
            out.push(',');
            out.push_str(&fmt_rational(hi));
            out.push('\n');
        }
        out
    }
}

fn merge_sorted(intervals: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(intervals.len());
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => merged.push((lo, hi)),
        }
    }
    merged
}
