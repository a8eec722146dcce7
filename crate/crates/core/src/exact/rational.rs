use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Reduced fraction over arbitrary-precision integers.
///
/// Every constructor used by this crate yields a nonnegative value with a
/// positive denominator; `num-rational` keeps it reduced.
pub type Rational = num_rational::BigRational;

/// `p/q`, reduced.
///
/// # Panics
/// If `q == 0`.
pub fn rat(p: u64, q: u64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Formats as `p/q` even when the denominator is 1.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`. Negative values are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = |reason| Error::Parse {
        input: s.to_string(),
        reason,
    };
    let s_trim = s.trim();
    let (num, den) = match s_trim.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s_trim, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("numerator is not an integer"))?;
    let den: BigInt = den.parse().map_err(|_| err("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    let r = Rational::new(num, den);
    if r.is_negative() {
        return Err(err("negative values are not supported"));
    }
    Ok(r)
}

/// Mediant `(p+r)/(q+s)` of `p/q` and `r/s`, both taken in lowest terms.
pub fn mediant(x: &Rational, y: &Rational) -> Rational {
    Rational::new(x.numer() + y.numer(), x.denom() + y.denom())
}

/// `|p·s − r·q| = 1` for `x = p/q`, `y = r/s`.
pub fn is_unimodular_pair(x: &Rational, y: &Rational) -> bool {
    let det = x.numer() * y.denom() - y.numer() * x.denom();
    det.abs().is_one()
}

pub fn ensure_unit_interval(what: &'static str, x: &Rational, open_left: bool) -> Result<()> {
    let below = if open_left { !x.is_positive() } else { x.is_negative() };
    if below || *x > Rational::one() {
        return Err(Error::OutOfDomain {
            what,
            value: fmt_rational(x),
            domain: if open_left { "(0,1]" } else { "[0,1]" },
        });
    }
    Ok(())
}

/// Builds `p/q` from parts already known to be coprime with `q > 0`.
pub(crate) fn reduced(p: BigInt, q: BigInt) -> Rational {
    debug_assert!(q.is_positive() && p.gcd(&q).is_one());
    Rational::new_raw(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mediant_examples() {
        assert_eq!(mediant(&rat(0, 1), &rat(1, 1)), rat(1, 2));
        assert_eq!(mediant(&rat(1, 3), &rat(1, 2)), rat(2, 5));
        assert_eq!(mediant(&rat(1, 2), &rat(1, 2)), rat(1, 2));
    }

    #[test]
    fn mediant_of_neighbours_stays_unimodular() {
        let (x, y) = (rat(2, 5), rat(1, 2));
        assert!(is_unimodular_pair(&x, &y));
        let m = mediant(&x, &y);
        assert!(x < m && m < y);
        assert!(is_unimodular_pair(&x, &m));
        assert!(is_unimodular_pair(&m, &y));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 3 ").unwrap(), rat(3, 1));
        assert_eq!(fmt_rational(&rat(3, 1)), "3/1");
        assert_eq!(fmt_rational(&rat(0, 7)), "0/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("-1/2").is_err());
        assert!(parse_rational("a/2").is_err());
    }

    #[test]
    fn unit_interval_checks() {
        assert!(ensure_unit_interval("x", &rat(0, 1), false).is_ok());
        assert!(ensure_unit_interval("x", &rat(0, 1), true).is_err());
        assert!(ensure_unit_interval("x", &rat(3, 2), false).is_err());
    }
}
