//! The Farey map `T` as exact dynamics on rational points and on finite
//! unions of rational intervals.
//!
//! `T(x) = x/(1−x)` on `[0, 1/2]` and `(1−x)/x` on `(1/2, 1]`. Its inverse
//! branches are `u₀(x) = x/(1+x)` (onto `[0, 1/2]`, orientation preserving)
//! and `u₁(x) = 1/(1+x)` (onto `[1/2, 1]`, orientation reversing).

mod interval;

use num_traits::{One, Zero};

pub use interval::IntervalUnion;

use crate::error::{Error, Result};
use crate::exact::{
    ensure_unit_interval, fmt_rational, rat, ContinuedFraction, MobiusMap, Rational,
};
use crate::scalar::Scalar;
use crate::stern_brocot::check_depth;

/// Depth cap for interval-union pullbacks.
pub const PULLBACK_CAP: u32 = 22;

pub fn farey_map(x: &Rational) -> Result<Rational> {
    ensure_unit_interval("x", x, false)?;
    let one = Rational::one();
    if x.is_zero() {
        return Ok(Rational::zero());
    }
    let half = rat(1, 2);
    Ok(if *x <= half {
        x / (&one - x)
    } else {
        (&one - x) / x
    })
}

// For reduced p/q both images p/(p+q) and q/(p+q) are already reduced.
fn u0(x: &Rational) -> Rational {
    Rational::new_raw(x.numer().clone(), x.numer() + x.denom())
}

fn u1(x: &Rational) -> Rational {
    Rational::new_raw(x.denom().clone(), x.numer() + x.denom())
}

/// `T⁻¹(U) = u₀(U) ∪ u₁(U)`. The caller guarantees `U ⊆ [0, 1]`.
pub fn pullback(set: &IntervalUnion) -> IntervalUnion {
    let comps = set.components();
    let mut out = Vec::with_capacity(2 * comps.len());
    out.extend(comps.iter().map(|(lo, hi)| (u0(lo), u0(hi))));
    // u₁ reverses order, so walk the components backwards to stay sorted
    out.extend(comps.iter().rev().map(|(lo, hi)| (u1(hi), u1(lo))));
    IntervalUnion::from_sorted(out)
}

/// `T^{-n}(U)`.
pub fn pullback_n(set: &IntervalUnion, n: u32) -> Result<IntervalUnion> {
    check_depth(n, PULLBACK_CAP)?;
    check_subset(set)?;
    let mut cur = set.clone();
    for _ in 0..n {
        cur = pullback(&cur);
    }
    Ok(cur)
}

fn check_subset(set: &IntervalUnion) -> Result<()> {
    if let (Some(first), Some(last)) = (set.components().first(), set.components().last()) {
        if first.0 < Rational::zero() || last.1 > Rational::one() {
            return Err(Error::InvalidInterval {
                lo: fmt_rational(&first.0),
                hi: fmt_rational(&last.1),
            });
        }
    }
    Ok(())
}

/// Points whose continued-fraction digits have a partial sum equal to `n`:
/// `T^{-(n−1)}([1/2, 1])`.
pub fn sum_level_set(n: u32) -> Result<IntervalUnion> {
    if n == 0 {
        return Err(Error::OutOfDomain {
            what: "n",
            value: "0".into(),
            domain: "n >= 1",
        });
    }
    check_depth(n, PULLBACK_CAP)?;
    pullback_n(&IntervalUnion::interval(rat(1, 2), rat(1, 1))?, n - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumLevelRow {
    pub n: u32,
    pub lambda: Rational,
    pub lambda_log2_n: f64,
    pub components: usize,
}

/// Exact measures of the sum-level sets along an ascending schedule, reusing
/// each pullback for the next entry.
pub fn sum_level_report(schedule: &[u32]) -> Result<Vec<SumLevelRow>> {
    check_ascending(schedule)?;
    let mut rows = Vec::with_capacity(schedule.len());
    let mut level = 1;
    let mut set = IntervalUnion::interval(rat(1, 2), rat(1, 1))?;
    for &n in schedule {
        check_depth(n, PULLBACK_CAP)?;
        while level < n {
            set = pullback(&set);
            level += 1;
        }
        let lambda = set.measure();
        let lambda_log2_n = lambda.to_f64() * f64::from(n).log2();
        rows.push(SumLevelRow {
            n,
            lambda,
            lambda_log2_n,
            components: set.len(),
        });
    }
    Ok(rows)
}

pub(crate) fn check_ascending(schedule: &[u32]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidSchedule("empty".into()));
    }
    if schedule.contains(&0) {
        return Err(Error::InvalidSchedule("entries must be positive".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSchedule(format!("{schedule:?} is not strictly ascending")));
    }
    Ok(())
}

fn check_alpha_beta(alpha: &Rational, beta: &Rational) -> Result<()> {
    if !(*alpha > Rational::zero() && alpha < beta && *beta <= Rational::one()) {
        return Err(Error::InvalidInterval {
            lo: fmt_rational(alpha),
            hi: fmt_rational(beta),
        });
    }
    Ok(())
}

/// `T^{-n}([α, β])` for `0 < α < β ≤ 1`.
pub fn restricted_preimage(alpha: &Rational, beta: &Rational, n: u32) -> Result<IntervalUnion> {
    check_alpha_beta(alpha, beta)?;
    pullback_n(&IntervalUnion::interval(alpha.clone(), beta.clone())?, n)
}

/// `λ(T^{-n}([α, β]) ∩ [0, x])`.
pub fn restricted_measure_cdf(
    alpha: &Rational,
    beta: &Rational,
    n: u32,
    x: &Rational,
) -> Result<Rational> {
    ensure_unit_interval("x", x, false)?;
    Ok(restricted_preimage(alpha, beta, n)?.cdf(x))
}

/// The same CDF divided by `λ(T^{-n}([α, β]))`.
pub fn restricted_measure_cdf_normalized(
    alpha: &Rational,
    beta: &Rational,
    n: u32,
    x: &Rational,
) -> Result<Rational> {
    ensure_unit_interval("x", x, false)?;
    let set = restricted_preimage(alpha, beta, n)?;
    Ok(set.cdf(x) / set.measure())
}

/// The connected component `Cₙ(p/q)` of the sum-level set that contains
/// `p/q = [a₁, …, a_k]`: the union of the digit-prefix intervals of
/// `[a₁, …, a_k]` and `[a₁, …, a_k − 1, 1]`, i.e. the closed interval
/// between `[a₁, …, a_k + 1]` and `[a₁, …, a_k − 1, 2]`.
///
/// The word `[1]` is taken to give `[1/2, 1]`.
pub fn cylinder_interval(word: &ContinuedFraction) -> Result<(Rational, Rational)> {
    if !word.is_canonical() {
        return Err(Error::NonCanonical(word.to_string()));
    }
    let digits = word.digits();
    let last = *digits.last().unwrap();
    if digits.len() == 1 && last == 1 {
        return Ok((rat(1, 2), rat(1, 1)));
    }
    let a = word.with_tail(&[last + 1]).value();
    let b = word.with_tail(&[last - 1, 2]).value();
    Ok(if a < b { (a, b) } else { (b, a) })
}

/// Result of one bounded-distortion evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Distortion {
    pub lhs: Rational,
    pub rhs: Rational,
    /// `lhs / rhs`, the empirical `Δ(ε)`.
    pub ratio: f64,
}

/// Compares the diameter of `h(U_ε(g(1)))` with its linearisation
/// `ε·|h′(g(1))|`, where `U_ε(y) = [y − ε/2, y + ε/2]`.
///
/// `lhs = |diam h(U_ε(g(1))) − ε·|h′(g(1))||`, `rhs = ε·|(h∘g)′(1)|`.
pub fn distortion_check(g: &MobiusMap, h: &MobiusMap, eps: &Rational) -> Result<Distortion> {
    let one = Rational::one();
    let y = g.apply(&one)?;
    let half = eps / Rational::from_integer(2.into());
    if *eps <= Rational::zero() || &y - &half <= Rational::zero() || &y + &half >= one {
        return Err(Error::EpsilonTooLarge(fmt_rational(eps)));
    }
    let lo = h.apply(&(&y - &half))?;
    let hi = h.apply(&(&y + &half))?;
    let diam = if hi > lo { &hi - &lo } else { &lo - &hi };
    let linear = eps * h.derivative_mag(&y)?;
    let lhs = if diam > linear { &diam - &linear } else { &linear - &diam };
    let rhs = eps * h.compose(g).derivative_mag(&one)?;
    let ratio = lhs.to_f64() / rhs.to_f64();
    Ok(Distortion { lhs, rhs, ratio })
}
