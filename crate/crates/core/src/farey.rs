//! Farey sequences `𝓕ₙ`, Euler's totient, and the weighted-mass and
//! Toeplitz-averaging diagnostics built on them.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::gcd;

use crate::error::{Error, Result};
use crate::exact::{is_unimodular_pair, rat, Rational};
use crate::scalar::{Neumaier, Scalar};

/// `ζ(2) = π²/6`.
pub const ZETA2: f64 = PI * PI / 6.0;

fn require_positive(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfDomain {
            what: "n",
            value: "0".into(),
            domain: "n >= 1",
        });
    }
    Ok(())
}

/// `φ(1), …, φ(N)` from a linear sieve.
#[derive(Debug, Clone)]
pub struct TotientTable {
    phi: Vec<u64>,
}

impl TotientTable {
    pub fn new(limit: usize) -> Self {
        let mut phi = vec![0u64; limit + 1];
        let mut primes: Vec<usize> = Vec::new();
        if limit >= 1 {
            phi[1] = 1;
        }
        for i in 2..=limit {
            if phi[i] == 0 {
                phi[i] = i as u64 - 1;
                primes.push(i);
            }
            for &p in &primes {
                let ip = i * p;
                if ip > limit {
                    break;
                }
                if i % p == 0 {
                    phi[ip] = phi[i] * p as u64;
                    break;
                }
                phi[ip] = phi[i] * (p as u64 - 1);
            }
        }
        Self { phi }
    }

    pub fn limit(&self) -> usize {
        self.phi.len() - 1
    }

    /// # Panics
    /// If `q` is 0 or above the sieve limit.
    pub fn phi(&self, q: usize) -> u64 {
        assert!(q >= 1, "φ is defined from 1");
        self.phi[q]
    }

    /// `φ(1), …, φ(N)`.
    pub fn values(&self) -> &[u64] {
        &self.phi[1..]
    }

    /// `Σ_{q ≤ n} φ(q) = |𝓕ₙ|`.
    pub fn prefix_sum(&self, n: usize) -> u64 {
        self.phi[1..=n].iter().sum()
    }
}

/// Streams `𝓕ₙ` in ascending order as `(p, q)` with the neighbour recurrence,
/// starting after `0/1`.
pub fn farey_iter(n: u64) -> impl Iterator<Item = (u64, u64)> {
    let mut state = (0u64, 1u64, 1u64, n.max(1));
    let mut done = n == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let (a, b, c, d) = state;
        let out = (c, d);
        if c == 1 && d == 1 {
            done = true;
        } else {
            let k = (n + b) / d;
            state = (c, d, k * c - a, k * d - b);
        }
        Some(out)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareyLevel {
    n: u64,
    entries: Vec<Rational>,
}

impl FareyLevel {
    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn is_unimodular(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[0] < w[1] && is_unimodular_pair(&w[0], &w[1]))
    }
}

/// `𝓕ₙ = {p/q : 0 < p ≤ q ≤ n, gcd(p, q) = 1}`, ascending.
pub fn farey_enumerate(n: u64) -> Result<FareyLevel> {
    require_positive(n)?;
    let entries = farey_iter(n)
        .map(|(p, q)| Rational::new_raw(BigInt::from(p), BigInt::from(q)))
        .collect();
    Ok(FareyLevel { n, entries })
}

/// `𝓕ₙ* = {p/n : 0 < p ≤ n, gcd(p, n) = 1}`.
pub fn fstar_level(n: u64) -> Result<Vec<Rational>> {
    require_positive(n)?;
    Ok((1..=n)
        .filter(|&p| gcd(p, n) == 1)
        .map(|p| rat(p, n))
        .collect())
}

/// `Σ_{p/q ∈ 𝓕ₙ} q⁻² = Σ_{q ≤ n} φ(q)/q²`, exact.
pub fn farey_weighted_mass(n: u64) -> Result<Rational> {
    farey_weighted_mass_as(n)
}

pub fn farey_weighted_mass_as<S: Scalar>(n: u64) -> Result<S> {
    require_positive(n)?;
    let table = TotientTable::new(n as usize);
    Ok(S::sum_all((1..=n).map(|q| {
        let q2 = q * q;
        S::from_rational(&rat(table.phi(q as usize), q2))
    })))
}

/// `D(n) = ζ(2)·Σ_{q ≤ n} φ(q)/q² − ln n` for every `n` in the schedule,
/// computed from one sieve.
pub fn mass_deviation(schedule: &[u64]) -> Result<Vec<(u64, f64, f64)>> {
    let max = *schedule.iter().max().ok_or_else(|| Error::InvalidSchedule("empty".into()))?;
    require_positive(*schedule.iter().min().unwrap())?;
    let table = TotientTable::new(max as usize);
    let mut sorted = schedule.to_vec();
    sorted.sort_unstable();
    let mut acc = Neumaier::new();
    let mut out = Vec::with_capacity(sorted.len());
    let mut q = 1u64;
    for &n in &sorted {
        while q <= n {
            let qf = q as f64;
            acc.add(table.phi(q as usize) as f64 / (qf * qf));
            q += 1;
        }
        let mass = acc.value();
        out.push((n, mass, ZETA2 * mass - (n as f64).ln()));
    }
    Ok(out)
}

/// `χₙ` and its logarithmic Cesàro mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToeplitzPoint {
    pub n: u64,
    pub chi: f64,
    pub cesaro: f64,
}

/// `χₙ = (2ζ(2)/n²) Σ_{r ∈ 𝓕ₙ} f(r)` and
/// `(1/ln n) Σ_{k=1}^{n} χ_k/k`, both tending to `∫₀¹ f`.
pub fn toeplitz_chain(f: impl Fn(f64) -> f64, n: u64) -> Result<ToeplitzPoint> {
    if n < 2 {
        return Err(Error::OutOfDomain {
            what: "n",
            value: n.to_string(),
            domain: "n >= 2",
        });
    }
    let mut farey_sum = Neumaier::new();
    let mut cesaro = Neumaier::new();
    let mut chi = 0.0;
    for k in 1..=n {
        for p in 1..=k {
            if gcd(p, k) == 1 {
                farey_sum.add(f(p as f64 / k as f64));
            }
        }
        let kf = k as f64;
        chi = 2.0 * ZETA2 / (kf * kf) * farey_sum.value();
        cesaro.add(chi / kf);
    }
    Ok(ToeplitzPoint {
        n,
        chi,
        cesaro: cesaro.value() / (n as f64).ln(),
    })
}

/// `Σ_{q ≤ exp(n/2)} φ(q)/q²`: total mass of `Σ_{2 log q ≤ n} q⁻² δ_{p/q}`.
/// The boundary `2 ln q = n` is included.
pub fn height_ball_mass(n: u32) -> Result<f64> {
    require_positive(n.into())?;
    let bound = height_bound(n);
    let table = TotientTable::new(bound as usize);
    Ok((1..=bound)
        .map(|q| {
            let qf = q as f64;
            table.phi(q as usize) as f64 / (qf * qf)
        })
        .sum::<Neumaier>()
        .value())
}

/// Largest `q` with `2 ln q ≤ n`.
pub fn height_bound(n: u32) -> u64 {
    let mut q = (f64::from(n) / 2.0).exp().floor() as u64;
    // guard the float floor against rounding at the boundary
    while 2.0 * ((q + 1) as f64).ln() <= f64::from(n) {
        q += 1;
    }
    while q > 1 && 2.0 * (q as f64).ln() > f64::from(n) {
        q -= 1;
    }
    q.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totient_examples() {
        let t = TotientTable::new(40);
        assert_eq!(t.phi(1), 1);
        assert_eq!(t.phi(6), 2);
        assert_eq!(t.prefix_sum(5), 10);
        for q in 1..=30u64 {
            let direct = (1..=q).filter(|&m| gcd(m, q) == 1).count() as u64;
            assert_eq!(t.phi(q as usize), direct, "φ({q})");
        }
        for p in [2, 3, 5, 7, 11, 13, 29] {
            assert_eq!(t.phi(p), p as u64 - 1);
        }
        assert_eq!(t.phi(4 * 9), t.phi(4) * t.phi(9));
        assert_eq!(t.phi(5 * 6), t.phi(5) * t.phi(6));
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(farey_enumerate(1).unwrap().entries(), [rat(1, 1)]);
        assert_eq!(
            farey_enumerate(3).unwrap().entries(),
            [rat(1, 3), rat(1, 2), rat(2, 3), rat(1, 1)]
        );
        assert_eq!(farey_enumerate(5).unwrap().entries().len(), 10);
        assert!(farey_enumerate(0).is_err());
    }

    #[test]
    fn enumeration_counts_and_neighbours() {
        let t = TotientTable::new(300);
        for n in 1..=300u64 {
            let level = farey_enumerate(n).unwrap();
            assert_eq!(level.entries().len() as u64, t.prefix_sum(n as usize));
            if n % 50 == 0 {
                assert!(level.is_unimodular());
            }
        }
    }

    #[test]
    fn weighted_mass_examples() {
        assert_eq!(farey_weighted_mass(1).unwrap(), rat(1, 1));
        assert_eq!(farey_weighted_mass(2).unwrap(), rat(5, 4));
        assert_eq!(farey_weighted_mass(3).unwrap(), rat(53, 36));
    }

    #[test]
    fn weighted_mass_matches_enumeration() {
        for n in [7u64, 30, 64] {
            let by_enumeration: Rational = farey_enumerate(n)
                .unwrap()
                .entries()
                .iter()
                .map(|r| Rational::new(1.into(), r.denom() * r.denom()))
                .sum();
            assert_eq!(farey_weighted_mass(n).unwrap(), by_enumeration);
        }
    }

    #[test]
    fn fstar_examples() {
        assert_eq!(fstar_level(1).unwrap(), [rat(1, 1)]);
        assert_eq!(fstar_level(4).unwrap(), [rat(1, 4), rat(3, 4)]);
        assert_eq!(fstar_level(6).unwrap(), [rat(1, 6), rat(5, 6)]);
    }

    #[test]
    fn toeplitz_examples() {
        let zero = toeplitz_chain(|_| 0.0, 50).unwrap();
        assert_eq!((zero.chi, zero.cesaro), (0.0, 0.0));
        let one = toeplitz_chain(|_| 1.0, 2000).unwrap();
        assert!((one.chi - 1.0).abs() < 0.01);
        assert!(toeplitz_chain(|x| x, 1).is_err());
    }

    #[test]
    fn toeplitz_identity_matches_direct_sum() {
        // Direct oracle: sum f over the materialised Farey sequence.
        let n = 400;
        let direct: f64 = farey_enumerate(n)
            .unwrap()
            .entries()
            .iter()
            .map(|r| r.to_f64())
            .sum();
        let point = toeplitz_chain(|x| x, n).unwrap();
        let expected = 2.0 * ZETA2 / (n * n) as f64 * direct;
        assert!((point.chi - expected).abs() < 1e-12);
    }

    #[test]
    fn height_ball_examples() {
        assert_eq!(height_ball_mass(1).unwrap(), 1.0);
        assert_eq!(height_bound(4), 7);
        let expected: f64 = [1.0, 1.0 / 4.0, 2.0 / 9.0, 2.0 / 16.0, 4.0 / 25.0, 2.0 / 36.0, 6.0 / 49.0]
            .iter()
            .sum();
        assert!((height_ball_mass(4).unwrap() - expected).abs() < 1e-15);
        assert_eq!(height_bound(20), 22026);
    }
}
