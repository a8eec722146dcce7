use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::rational::{ensure_unit_interval, reduced, Rational};
use crate::error::{Error, Result};

/// Finite regular continued fraction `[x₁, …, x_k] = 1/(x₁ + 1/(x₂ + …))`
/// of a number in `(0, 1]`.
///
/// Words built with [`ContinuedFraction::new`] may be non-canonical;
/// [`ContinuedFraction::normalize`] folds a trailing `1` into the previous
/// digit. [`ContinuedFraction::encode`] always returns the canonical word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContinuedFraction {
    digits: Vec<u64>,
}

impl ContinuedFraction {
    pub fn new(digits: Vec<u64>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidWord("empty word".into()));
        }
        if digits.contains(&0) {
            return Err(Error::InvalidWord(format!("{digits:?} contains a zero digit")));
        }
        Ok(Self { digits })
    }

    /// Euclidean algorithm on `r = p/q ∈ (0, 1]`.
    pub fn encode(r: &Rational) -> Result<Self> {
        ensure_unit_interval("r", r, true)?;
        let mut digits = Vec::new();
        // r = p/q  ⇒  1/r = q/p = x₁ + rest
        let (mut a, mut b): (BigInt, BigInt) = (r.denom().clone(), r.numer().clone());
        while !b.is_zero() {
            let (quot, rem) = a.div_rem(&b);
            digits.push(quot.to_u64().ok_or(Error::DigitOverflow)?);
            a = b;
            b = rem;
        }
        Ok(Self { digits })
    }

    /// Exact value, evaluated bottom-up.
    pub fn value(&self) -> Rational {
        // Track h/k = [x_j, …, x_k] from the tail; numerator/denominator stay coprime.
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for &x in self.digits.iter().rev() {
            // 1/(x + num/den) = den / (x·den + num)
            let new_den = BigInt::from(x) * &den + &num;
            num = den;
            den = new_den;
        }
        reduced(num, den)
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digit_sum(&self) -> u64 {
        self.digits.iter().sum()
    }

    pub fn is_canonical(&self) -> bool {
        self.digits.len() == 1 || *self.digits.last().unwrap() >= 2
    }

    /// Folds `[…, a, 1]` into `[…, a + 1]`; the value is unchanged.
    pub fn normalize(mut self) -> Self {
        if self.digits.len() >= 2 && *self.digits.last().unwrap() == 1 {
            self.digits.pop();
            *self.digits.last_mut().unwrap() += 1;
        }
        self
    }

    /// Word with the last digit replaced (used for cylinder endpoints).
    pub(crate) fn with_tail(&self, tail: &[u64]) -> Self {
        let mut digits = self.digits[..self.digits.len() - 1].to_vec();
        digits.extend_from_slice(tail);
        Self { digits }
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    fn cf(d: &[u64]) -> ContinuedFraction {
        ContinuedFraction::new(d.to_vec()).unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(ContinuedFraction::encode(&rat(1, 1)).unwrap(), cf(&[1]));
        assert_eq!(ContinuedFraction::encode(&rat(1, 2)).unwrap(), cf(&[2]));
        assert_eq!(ContinuedFraction::encode(&rat(3, 10)).unwrap(), cf(&[3, 3]));
    }

    #[test]
    fn encode_rejects_out_of_range() {
        assert!(ContinuedFraction::encode(&rat(0, 1)).is_err());
        assert!(ContinuedFraction::encode(&rat(4, 3)).is_err());
    }

    #[test]
    fn decode_examples() {
        assert_eq!(cf(&[1]).value(), rat(1, 1));
        assert_eq!(cf(&[2, 2]).value(), rat(2, 5));
        assert_eq!(cf(&[1, 1, 2]).value(), rat(3, 5));
    }

    #[test]
    fn invalid_words() {
        assert!(ContinuedFraction::new(vec![]).is_err());
        assert!(ContinuedFraction::new(vec![2, 0]).is_err());
    }

    #[test]
    fn normalization_preserves_value() {
        let w = cf(&[2, 3, 1]);
        assert!(!w.is_canonical());
        let n = w.clone().normalize();
        assert_eq!(n, cf(&[2, 4]));
        assert_eq!(n.value(), w.value());
        assert_eq!(cf(&[1]).normalize(), cf(&[1]));
    }

    #[test]
    fn round_trip_all_denominators_up_to_500() {
        for q in 1..=500u64 {
            for p in 1..=q {
                if num_integer::gcd(p, q) != 1 {
                    continue;
                }
                let r = rat(p, q);
                let w = ContinuedFraction::encode(&r).unwrap();
                assert!(w.is_canonical());
                assert_eq!(w.value(), r);
            }
        }
    }

    proptest! {
        #[test]
        fn canonical_words_round_trip(mut digits in prop::collection::vec(1u64..40, 1..12)) {
            if digits.len() >= 2 && *digits.last().unwrap() == 1 {
                *digits.last_mut().unwrap() = 2;
            }
            let w = ContinuedFraction::new(digits).unwrap();
            prop_assert_eq!(ContinuedFraction::encode(&w.value()).unwrap(), w);
        }
    }
}
