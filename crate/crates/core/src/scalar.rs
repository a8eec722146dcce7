//! Scalar abstraction shared by every weighted sum in the crate.
//!
//! Points of the Stern-Brocot and Farey structures are always exact
//! [`Rational`]s. Weights and function values live in a [`Scalar`], which is
//! either exact ([`Rational`]) or floating point (`f64`, `f32`). Floating
//! sums go through Neumaier compensation.

use std::fmt::Debug;
use std::iter::Sum;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Num, NumAssign, One, Signed, ToPrimitive, Zero};

use crate::exact::Rational;

pub trait Scalar: Num + NumAssign + Clone + PartialOrd + Debug + Send + Sync + 'static {
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    /// Nearest value to a float; exact for `Rational` (every finite float is
    /// a dyadic rational).
    ///
    /// # Panics
    /// For `Rational` if `x` is not finite.
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Sums a sequence. Float types use compensated summation.
    fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |acc, x| acc + x)
    }

    /// `self / total`, for dividing many small weights by one large total.
    fn share_of(&self, total: &Self) -> Self {
        self.clone() / total.clone()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        sum_rationals(items.into_iter().collect())
    }

    fn share_of(&self, total: &Self) -> Self {
        // (a/b)/(c/d) = ad/(bc); with both inputs reduced only gcd(a, c) and
        // gcd(b, d) can cancel
        let (a, b) = (self.numer(), self.denom());
        let (c, d) = (total.numer(), total.denom());
        if c.is_zero() {
            panic!("division by zero");
        }
        let g1 = unbalanced_gcd(a, c);
        let g2 = unbalanced_gcd(b, d);
        let num = (a / &g1) * (d / &g2);
        let den = (b / &g2) * (c / &g1);
        if den.is_negative() {
            Rational::new_raw(-num, -den)
        } else {
            Rational::new_raw(num, den)
        }
    }
}

/// `gcd(x, y)` with one remainder step first, so a small operand keeps the
/// binary gcd small.
fn unbalanced_gcd(x: &BigInt, y: &BigInt) -> BigInt {
    let (x, y) = (x.abs(), y.abs());
    let (big, small) = if x >= y { (x, y) } else { (y, x) };
    if small.is_zero() {
        return big;
    }
    (big % &small).gcd(&small)
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().sum::<Neumaier>().value()
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r) as f32
    }

    fn from_f64(x: f64) -> Self {
        x as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().map(f64::from).sum::<Neumaier>().value() as f32
    }
}

/// Balanced pairwise summation, split at the midpoint. For exact rationals
/// this keeps the intermediate denominators close to those of the true
/// partial sums. The tree shape depends only on the length, so float results
/// do not depend on how rayon schedules the halves.
pub fn pairwise_sum<S: Scalar>(terms: Vec<S>) -> S {
    fn go<S: Scalar>(terms: &mut [S]) -> S {
        match terms.len() {
            0 => S::zero(),
            1 => std::mem::replace(&mut terms[0], S::zero()),
            len => {
                let (left, right) = terms.split_at_mut(len / 2);
                let (a, b) = if len >= PARALLEL_SUM_LEN {
                    rayon::join(|| go(left), || go(right))
                } else {
                    (go(left), go(right))
                };
                a + b
            }
        }
    }
    let mut terms = terms;
    go(&mut terms)
}

const PARALLEL_SUM_LEN: usize = 1 << 12;

/// Exact sum along a balanced tree. Partial sums are carried over the least
/// common denominator without cancelling common factors of the numerator;
/// only the final result is reduced. This halves the number of big gcds,
/// which dominate when the denominators run to thousands of digits.
pub fn sum_rationals(terms: Vec<Rational>) -> Rational {
    fn go(terms: &[Rational]) -> (BigInt, BigInt) {
        match terms.len() {
            0 => (BigInt::zero(), BigInt::one()),
            1 => (terms[0].numer().clone(), terms[0].denom().clone()),
            len => {
                let (left, right) = terms.split_at(len / 2);
                let ((n1, d1), (n2, d2)) = if len >= PARALLEL_SUM_LEN {
                    rayon::join(|| go(left), || go(right))
                } else {
                    (go(left), go(right))
                };
                let g = d1.gcd(&d2);
                if g.is_one() {
                    (n1 * &d2 + n2 * &d1, d1 * d2)
                } else {
                    let (c1, c2) = (&d1 / &g, &d2 / &g);
                    (n1 * &c2 + n2 * &c1, c1 * d2)
                }
            }
        }
    }
    let (n, d) = go(&terms);
    Rational::new(n, d)
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Sum<f64> for Neumaier {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Correctly scaled conversion that survives numerators and denominators far
/// beyond the `f64` range (sum-level measures reach thousands of digits).
pub fn rational_to_f64(r: &Rational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    if n.is_zero() {
        return 0.0;
    }
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    if nb <= 1000 && db <= 1000 {
        return n.to_f64().unwrap() / d.to_f64().unwrap();
    }
    // Keep 64 significant bits of each and track the binary exponent.
    let shift_n = (nb - 64).max(0);
    let shift_d = (db - 64).max(0);
    let nn: BigInt = n.abs() >> shift_n as usize;
    let dd: BigInt = d >> shift_d as usize;
    let mantissa = nn.to_f64().unwrap() / dd.to_f64().unwrap();
    let value = mantissa * 2f64.powi((shift_n - shift_d) as i32);
    if n.is_negative() {
        -value
    } else {
        value
    }
}
