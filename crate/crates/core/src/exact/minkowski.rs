use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::cf::ContinuedFraction;
use super::rational::{ensure_unit_interval, Rational};
use crate::error::Result;

/// Minkowski's question-mark function on `[0, 1]`.
///
/// For `r = [x₁, …, x_k]` this is the dyadic rational
/// `Σ_j (−1)^{j+1} 2^{1 − (x₁ + … + x_j)}`.
pub fn minkowski_q(r: &Rational) -> Result<Rational> {
    ensure_unit_interval("r", r, false)?;
    if r.is_zero() {
        return Ok(Rational::zero());
    }
    let word = ContinuedFraction::encode(r)?;
    let mut partial: u64 = 0;
    let mut acc = Rational::zero();
    for (j, &x) in word.digits().iter().enumerate() {
        partial += x;
        let term = Rational::new(BigInt::one(), BigInt::one() << (partial - 1) as usize);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Floating-point evaluation of the same series, for bulk CDF evaluation.
pub fn minkowski_q_f64(r: &Rational) -> Result<f64> {
    ensure_unit_interval("r", r, false)?;
    if r.is_zero() {
        return Ok(0.0);
    }
    let word = ContinuedFraction::encode(r)?;
    let mut partial: u64 = 0;
    let mut acc = 0.0;
    for (j, &x) in word.digits().iter().enumerate() {
        partial = partial.saturating_add(x);
        let term = 2f64.powi(1 - partial.min(2000) as i32);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn examples() {
        assert_eq!(minkowski_q(&rat(1, 1)).unwrap(), rat(1, 1));
        assert_eq!(minkowski_q(&rat(1, 2)).unwrap(), rat(1, 2));
        assert_eq!(minkowski_q(&rat(1, 3)).unwrap(), rat(1, 4));
        assert_eq!(minkowski_q(&rat(0, 1)).unwrap(), rat(0, 1));
        // ?(2/5) with 2/5 = [2,2]: 2^{-1} - 2^{-3}
        assert_eq!(minkowski_q(&rat(2, 5)).unwrap(), rat(3, 8));
        assert!(minkowski_q(&rat(3, 2)).is_err());
    }

    #[test]
    fn symmetry() {
        for (p, q) in [(1u64, 3u64), (2, 7), (5, 13), (3, 10)] {
            let lhs = minkowski_q(&rat(q - p, q)).unwrap();
            let rhs = Rational::one() - minkowski_q(&rat(p, q)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn strictly_increasing_on_sorted_sample() {
        let mut sample: Vec<Rational> = (1..=60u64)
            .flat_map(|q| (0..=q).map(move |p| rat(p, q)))
            .collect();
        sample.sort();
        sample.dedup();
        assert!(sample.len() >= 1000);
        let values: Vec<Rational> = sample.iter().map(|r| minkowski_q(r).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]));
        for (r, v) in sample.iter().zip(&values) {
            assert_eq!(minkowski_q_f64(r).unwrap(), crate::scalar::rational_to_f64(v));
        }
    }
}
