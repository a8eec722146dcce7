use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{fmt_rational, Rational};
use crate::error::{Error, Result};

/// Inverse branch of the Farey map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `u₀(x) = x/(1+x)`, onto `[0, 1/2]`.
    Left,
    /// `u₁(x) = 1/(1+x)`, onto `[1/2, 1]`, orientation reversing.
    Right,
}

impl Branch {
    pub fn map(self) -> MobiusMap {
        match self {
            Branch::Left => MobiusMap::u0(),
            Branch::Right => MobiusMap::u1(),
        }
    }
}

/// `x ↦ (a·x + b)/(c·x + d)` with `|a·d − b·c| = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MobiusMap {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl MobiusMap {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular {
                a: a.to_string(),
                b: b.to_string(),
                c: c.to_string(),
                d: d.to_string(),
            });
        }
        Ok(Self { a, b, c, d })
    }

    fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    pub fn u0() -> Self {
        Self::from_i64(1, 0, 1, 1)
    }

    pub fn u1() -> Self {
        Self::from_i64(0, 1, 1, 1)
    }

    /// `b₁ ∘ b₂ ∘ … ∘ b_k`, so the last letter acts first.
    pub fn word(letters: &[Branch]) -> Self {
        letters
            .iter()
            .fold(Self::identity(), |acc, b| acc.compose(&b.map()))
    }

    pub fn coefficients(&self) -> (&BigInt, &BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// `self ∘ other`, the matrix product `self · other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    fn denominator_at(&self, x: &Rational) -> Result<Rational> {
        let den = Rational::from(self.c.clone()) * x + Rational::from(self.d.clone());
        if den.is_zero() {
            return Err(Error::Pole(fmt_rational(x)));
        }
        Ok(den)
    }

    pub fn apply(&self, x: &Rational) -> Result<Rational> {
        let den = self.denominator_at(x)?;
        Ok((Rational::from(self.a.clone()) * x + Rational::from(self.b.clone())) / den)
    }

    /// `|m′(x)| = |det| / (c·x + d)²`.
    pub fn derivative_mag(&self, x: &Rational) -> Result<Rational> {
        let den = self.denominator_at(x)?;
        Ok(Rational::from(self.det().abs()) / (&den * &den))
    }
}

impl fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    #[test]
    fn branches_at_one() {
        assert_eq!(MobiusMap::u0().apply(&rat(1, 1)).unwrap(), rat(1, 2));
        assert_eq!(MobiusMap::u1().apply(&rat(1, 1)).unwrap(), rat(1, 2));
        assert_eq!(MobiusMap::identity().apply(&rat(2, 5)).unwrap(), rat(2, 5));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            MobiusMap::u0().derivative_mag(&rat(1, 1)).unwrap(),
            rat(1, 4)
        );
        assert_eq!(
            MobiusMap::identity().derivative_mag(&rat(3, 7)).unwrap(),
            rat(1, 1)
        );
        let m = MobiusMap::word(&[Branch::Right, Branch::Left]);
        assert_eq!(m.apply(&rat(1, 1)).unwrap(), rat(2, 3));
        assert_eq!(m.derivative_mag(&rat(1, 1)).unwrap(), rat(1, 9));
        // chain rule: |u₁′(u₀(1))|·|u₀′(1)|
        let chain = MobiusMap::u1().derivative_mag(&rat(1, 2)).unwrap()
            * MobiusMap::u0().derivative_mag(&rat(1, 1)).unwrap();
        assert_eq!(chain, rat(1, 9));
    }

    #[test]
    fn rejects_non_unimodular_and_poles() {
        let two = BigInt::from(2);
        assert!(MobiusMap::new(two.clone(), 0.into(), 0.into(), 1.into()).is_err());
        let m = MobiusMap::new(0.into(), 1.into(), 1.into(), 0.into()).unwrap();
        assert!(matches!(m.apply(&rat(0, 1)), Err(Error::Pole(_))));
    }

    fn letters() -> impl Strategy<Value = Vec<Branch>> {
        prop::collection::vec(prop_oneof![Just(Branch::Left), Just(Branch::Right)], 0..=12)
    }

    proptest! {
        #[test]
        fn derivative_at_one_is_inverse_square_denominator(w in letters()) {
            let m = MobiusMap::word(&w);
            let v = m.apply(&rat(1, 1)).unwrap();
            let q = Rational::from(v.denom().clone());
            prop_assert_eq!(m.derivative_mag(&rat(1, 1)).unwrap(), Rational::one() / (&q * &q));
        }

        #[test]
        fn composition_is_associative(a in letters(), b in letters(), c in letters()) {
            let (ma, mb, mc) = (MobiusMap::word(&a), MobiusMap::word(&b), MobiusMap::word(&c));
            prop_assert_eq!(ma.compose(&mb).compose(&mc), ma.compose(&mb.compose(&mc)));
            let x = rat(3, 7);
            prop_assert_eq!(ma.compose(&mb).apply(&x).unwrap(), ma.apply(&mb.apply(&x).unwrap()).unwrap());
        }
    }
}
