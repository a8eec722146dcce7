//! Flag value parsers.

use anyhow::{bail, Context, Result};
use sternfarey::exact::{parse_rational, Branch, MobiusMap, Rational};

/// `4,8,16`, `1..22` (inclusive) or a mix of both; must be strictly
/// ascending.
pub fn schedule<T>(s: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr + Copy + PartialOrd + TryFrom<u64>,
    T::Err: std::error::Error + Send + Sync + 'static,
{
    let mut out: Vec<T> = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo.trim().parse().with_context(|| format!("bad range {part:?}"))?;
            let hi: u64 = hi.trim().parse().with_context(|| format!("bad range {part:?}"))?;
            for v in lo..=hi {
                out.push(T::try_from(v).map_err(|_| anyhow::anyhow!("{v} out of range"))?);
            }
        } else {
            out.push(part.parse().with_context(|| format!("bad schedule entry {part:?}"))?);
        }
    }
    if out.is_empty() {
        bail!("empty schedule {s:?}");
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        bail!("schedule {s:?} must be strictly ascending");
    }
    Ok(out)
}

/// Comma-separated floats, any order.
pub fn floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            if p.contains('/') {
                Ok(sternfarey::Scalar::to_f64(&parse_rational(p)?))
            } else {
                p.parse::<f64>().with_context(|| format!("bad number {p:?}"))
            }
        })
        .collect()
}

pub fn rationals(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| Ok(parse_rational(p)?))
        .collect()
}

pub fn rational(s: &str) -> Result<Rational> {
    Ok(parse_rational(s)?)
}

/// A word over `{u₀, u₁}` written with the digits `0` and `1`, composed left
/// to right as maps (`"01"` is `u₀∘u₁`); empty or `id` is the identity.
pub fn word(s: &str) -> Result<MobiusMap> {
    if s == "id" {
        return Ok(MobiusMap::identity());
    }
    let letters = s
        .chars()
        .map(|c| match c {
            '0' => Ok(Branch::Left),
            '1' => Ok(Branch::Right),
            other => bail!("word letters must be 0 or 1, got {other:?}"),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MobiusMap::word(&letters))
}
