//! Stern-Brocot levels, the even Stern-Brocot sequence `𝓢ₙ`, and Farey-map
//! preimage trees `T^{-n}(v/w)`.
//!
//! Level `n` holds the `2ⁿ + 1` fractions `s_{n,k}/t_{n,k}` produced by
//! repeated mediants starting from `0/1, 1/1`; `𝓢ₙ` is the set of entries
//! that are new at level `n`. Preimage trees use the two-child rule
//! `p/q ↦ {p/(p+q), q/(p+q)}`.
//!
//! Large trees are never materialised by the summing routines: they walk the
//! tree depth first and add leaf values along the tree shape, so exact sums
//! stay small whenever the subtree sums are, and float sums are bitwise
//! reproducible regardless of how subtrees are scheduled across threads.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{ensure_unit_interval, is_unimodular_pair, mediant, rat, Rational};
use crate::exact::ContinuedFraction;
use crate::scalar::Scalar;

/// Default depth cap for levels and preimage trees (`2²⁴` leaves).
pub const DEPTH_CAP: u32 = 24;

/// Subtrees at least this deep are split across the rayon pool.
const PARALLEL_DEPTH: u32 = 12;

pub(crate) fn check_depth(n: u32, cap: u32) -> Result<()> {
    if n > cap {
        return Err(Error::DepthCap {
            requested: n.into(),
            cap: cap.into(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SternBrocotLevel {
    level: u32,
    entries: Vec<Rational>,
}

impl SternBrocotLevel {
    pub fn build(n: u32) -> Result<Self> {
        Self::build_capped(n, DEPTH_CAP)
    }

    pub fn build_capped(n: u32, cap: u32) -> Result<Self> {
        check_depth(n, cap)?;
        let mut level = Self {
            level: 0,
            entries: vec![rat(0, 1), rat(1, 1)],
        };
        for _ in 0..n {
            level = level.next();
        }
        Ok(level)
    }

    /// One recursion step: keep every entry and insert the mediant of each
    /// adjacent pair.
    pub fn next(&self) -> Self {
        let mut entries = Vec::with_capacity(2 * self.entries.len() - 1);
        for pair in self.entries.windows(2) {
            entries.push(pair[0].clone());
            entries.push(mediant(&pair[0], &pair[1]));
        }
        entries.push(self.entries.last().unwrap().clone());
        Self {
            level: self.level + 1,
            entries,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// Entries with even 1-based index `s_{n,2k}/t_{n,2k}`, i.e. `𝓢ₙ`.
    pub fn even_entries(&self) -> impl Iterator<Item = &Rational> {
        self.entries.iter().skip(1).step_by(2)
    }

    pub fn is_unimodular(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[0] < w[1] && is_unimodular_pair(&w[0], &w[1]))
    }
}

/// `𝓢ₙ` in ascending order (`2^{n−1}` entries).
pub fn even_sequence(n: u32) -> Result<Vec<Rational>> {
    if n == 0 {
        return Err(Error::OutOfDomain {
            what: "n",
            value: "0".into(),
            domain: "n >= 1",
        });
    }
    check_depth(n, DEPTH_CAP)?;
    let mut out = Vec::with_capacity(1 << (n - 1));
    visit_even_sequence(n, |p, q| out.push(Rational::new_raw(p.clone(), q.clone())));
    Ok(out)
}

/// Streams `𝓢ₙ` in ascending order as `(p, q)` pairs, walking the
/// Stern-Brocot tree of intervals rather than materialising level `n`.
pub fn visit_even_sequence(n: u32, mut f: impl FnMut(&BigInt, &BigInt)) {
    fn walk(
        l: (&BigInt, &BigInt),
        r: (&BigInt, &BigInt),
        depth: u32,
        f: &mut impl FnMut(&BigInt, &BigInt),
    ) {
        let mp = l.0 + r.0;
        let mq = l.1 + r.1;
        if depth == 1 {
            f(&mp, &mq);
            return;
        }
        walk(l, (&mp, &mq), depth - 1, f);
        walk((&mp, &mq), r, depth - 1, f);
    }
    if n == 0 {
        return;
    }
    let (zero, one) = (BigInt::zero(), BigInt::one());
    walk((&zero, &one), (&one, &one), n, &mut f);
}

/// `Σ_{p/q ∈ 𝓢ₙ} leaf(p, q)` with the additions following the Stern-Brocot
/// tree.
pub fn even_sequence_sum<S, F>(n: u32, leaf: &F) -> Result<S>
where
    S: Scalar,
    F: Fn(&BigInt, &BigInt) -> S + Sync,
{
    fn walk<S: Scalar, F: Fn(&BigInt, &BigInt) -> S + Sync>(
        l: (BigInt, BigInt),
        r: (BigInt, BigInt),
        depth: u32,
        leaf: &F,
    ) -> S {
        let m = (&l.0 + &r.0, &l.1 + &r.1);
        if depth == 1 {
            return leaf(&m.0, &m.1);
        }
        if depth >= PARALLEL_DEPTH {
            let (a, b) = rayon::join(
                || walk(l, m.clone(), depth - 1, leaf),
                || walk(m.clone(), r, depth - 1, leaf),
            );
            a + b
        } else {
            walk(l, m.clone(), depth - 1, leaf) + walk(m, r, depth - 1, leaf)
        }
    }
    if n == 0 {
        return Err(Error::OutOfDomain {
            what: "n",
            value: "0".into(),
            domain: "n >= 1",
        });
    }
    check_depth(n, DEPTH_CAP)?;
    Ok(walk(
        (BigInt::zero(), BigInt::one()),
        (BigInt::one(), BigInt::one()),
        n,
        leaf,
    ))
}

/// `T^{-n}(v/w)` in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreimageSet {
    root: Rational,
    depth: u32,
    points: Vec<Rational>,
}

impl PreimageSet {
    pub fn root(&self) -> &Rational {
        &self.root
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Rational> {
        self.points
    }
}

fn check_target(target: &Rational) -> Result<()> {
    ensure_unit_interval("target", target, true)
}

pub fn preimage_points(target: &Rational, n: u32) -> Result<PreimageSet> {
    check_target(target)?;
    check_depth(n, DEPTH_CAP)?;
    let mut points = Vec::with_capacity(1 << n);
    visit_preimages(target, n, |p, q| {
        points.push(Rational::new_raw(p.clone(), q.clone()))
    })?;
    points.sort();
    Ok(PreimageSet {
        root: target.clone(),
        depth: n,
        points,
    })
}

/// Streams `T^{-n}(v/w)` depth first (not sorted) as `(p, q)` pairs.
pub fn visit_preimages(
    target: &Rational,
    n: u32,
    mut f: impl FnMut(&BigInt, &BigInt),
) -> Result<()> {
    fn walk(p: &BigInt, q: &BigInt, depth: u32, f: &mut impl FnMut(&BigInt, &BigInt)) {
        if depth == 0 {
            f(p, q);
            return;
        }
        let s = p + q;
        walk(p, &s, depth - 1, f);
        walk(q, &s, depth - 1, f);
    }
    check_target(target)?;
    check_depth(n, DEPTH_CAP)?;
    walk(target.numer(), target.denom(), n, &mut f);
    Ok(())
}

/// `Σ_{p/q ∈ T^{-n}(v/w)} leaf(p, q)` with additions following the preimage
/// tree.
pub fn preimage_sum<S, F>(target: &Rational, n: u32, leaf: &F) -> Result<S>
where
    S: Scalar,
    F: Fn(&BigInt, &BigInt) -> S + Sync,
{
    fn walk<S: Scalar, F: Fn(&BigInt, &BigInt) -> S + Sync>(
        p: &BigInt,
        q: &BigInt,
        depth: u32,
        leaf: &F,
    ) -> S {
        if depth == 0 {
            return leaf(p, q);
        }
        let s = p + q;
        if depth >= PARALLEL_DEPTH {
            let (a, b) = rayon::join(
                || walk(p, &s, depth - 1, leaf),
                || walk(q, &s, depth - 1, leaf),
            );
            a + b
        } else {
            walk(p, &s, depth - 1, leaf) + walk(q, &s, depth - 1, leaf)
        }
    }
    check_target(target)?;
    check_depth(n, DEPTH_CAP)?;
    Ok(walk(target.numer(), target.denom(), n, leaf))
}

/// `Σ_{p/q ∈ T^{-n}(v/w)} 1/(p·q)`; equals `1/(v·w)`.
pub fn kappa_sum(target: &Rational, n: u32) -> Result<Rational> {
    kappa_sum_as(target, n)
}

pub fn kappa_sum_as<S: Scalar>(target: &Rational, n: u32) -> Result<S> {
    if target.is_zero() {
        return Err(Error::OutOfDomain {
            what: "target",
            value: "0/1".into(),
            domain: "(0,1]",
        });
    }
    preimage_sum(target, n, &|p: &BigInt, q: &BigInt| {
        S::from_rational(&Rational::new_raw(BigInt::one(), p * q))
    })
}

/// `Σ_{p/q ∈ 𝓢ₙ} q⁻²`, exact.
pub fn weighted_mass(n: u32) -> Result<Rational> {
    weighted_mass_as(n)
}

pub fn weighted_mass_as<S: Scalar>(n: u32) -> Result<S> {
    even_sequence_sum(n, &|_p: &BigInt, q: &BigInt| {
        S::from_rational(&Rational::new_raw(BigInt::one(), q * q))
    })
}

/// `Σ_{p/q ∈ T^{-n}(v/w)} (w²/q²)(q/p) − w/v`; vanishes identically because
/// `h(x) = 1/x` is fixed by the Perron-Frobenius operator and
/// `|(Tⁿ)′(p/q)| = q²/w²`.
pub fn eigenfunction_residual(x: &Rational, n: u32) -> Result<Rational> {
    if x.is_zero() {
        return Err(Error::OutOfDomain {
            what: "x",
            value: "0/1".into(),
            domain: "(0,1]",
        });
    }
    let w = x.denom().clone();
    let w2 = &w * &w;
    let sum: Rational = preimage_sum(x, n, &|p: &BigInt, q: &BigInt| {
        Rational::new(w2.clone(), p * q)
    })?;
    Ok(sum - Rational::new(w, x.numer().clone()))
}

/// All rationals in `(0, 1]` whose canonical continued fraction has digit
/// sum at most `n`, ascending. Built as `{1} ∪ 𝓢₁ ∪ … ∪ 𝓢_{n−1}`.
pub fn digit_sum_ball(n: u32) -> Result<Vec<Rational>> {
    if n == 0 {
        return Err(Error::OutOfDomain {
            what: "n",
            value: "0".into(),
            domain: "n >= 1",
        });
    }
    check_depth(n - 1, DEPTH_CAP)?;
    let mut out = vec![rat(1, 1)];
    for m in 1..n {
        out.extend(even_sequence(m)?);
    }
    out.sort();
    Ok(out)
}

/// Canonical continued-fraction digit sum of `r ∈ (0, 1]`.
pub fn digit_sum(r: &Rational) -> Result<u64> {
    Ok(ContinuedFraction::encode(r)?.digit_sum())
}

/// One row of the `Σ_{𝓢ₙ} q⁻² ≍ 1/log n` table.
#[derive(Debug, Clone, PartialEq)]
pub struct MassRow {
    pub n: u32,
    pub mass: f64,
    pub exact: Option<Rational>,
    pub mass_log_n: f64,
}

/// Exact up to `exact_limit`, compensated float beyond.
pub fn mass_rows(schedule: &[u32], exact_limit: u32) -> Result<Vec<MassRow>> {
    schedule
        .iter()
        .map(|&n| {
            let (mass, exact) = if n <= exact_limit {
                let m = weighted_mass(n)?;
                (m.to_f64(), Some(m))
            } else {
                (weighted_mass_as::<f64>(n)?, None)
            };
            Ok(MassRow {
                n,
                mass,
                exact,
                mass_log_n: mass * f64::from(n).ln(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::MobiusMap;
    use crate::exact::Branch;

    fn rats(v: &[(u64, u64)]) -> Vec<Rational> {
        v.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    #[test]
    fn level_examples() {
        assert_eq!(SternBrocotLevel::build(0).unwrap().entries(), rats(&[(0, 1), (1, 1)]));
        assert_eq!(
            SternBrocotLevel::build(1).unwrap().entries(),
            rats(&[(0, 1), (1, 2), (1, 1)])
        );
        let l3 = SternBrocotLevel::build(3).unwrap();
        assert_eq!(l3.entries().len(), 9);
        let even: Vec<Rational> = l3.even_entries().cloned().collect();
        assert_eq!(even, rats(&[(1, 4), (2, 5), (3, 5), (3, 4)]));
    }

    #[test]
    fn level_cap() {
        assert!(matches!(
            SternBrocotLevel::build(25),
            Err(Error::DepthCap { requested: 25, cap: 24 })
        ));
        assert!(SternBrocotLevel::build_capped(5, 4).is_err());
    }

    #[test]
    fn levels_are_unimodular() {
        let mut level = SternBrocotLevel::build(0).unwrap();
        for n in 0..=16 {
            assert_eq!(level.level(), n);
            assert_eq!(level.entries().len(), (1 << n) + 1);
            assert!(level.is_unimodular(), "level {n}");
            level = level.next();
        }
    }

    #[test]
    fn even_sequence_examples() {
        assert_eq!(even_sequence(1).unwrap(), rats(&[(1, 2)]));
        assert_eq!(even_sequence(2).unwrap(), rats(&[(1, 3), (2, 3)]));
        assert_eq!(
            even_sequence(3).unwrap(),
            rats(&[(1, 4), (2, 5), (3, 5), (3, 4)])
        );
        assert!(even_sequence(0).is_err());
    }

    #[test]
    fn even_sequence_matches_level_recursion() {
        for n in 1..=10 {
            let level = SternBrocotLevel::build(n).unwrap();
            let even: Vec<Rational> = level.even_entries().cloned().collect();
            assert_eq!(even_sequence(n).unwrap(), even);
        }
    }

    #[test]
    fn preimage_examples() {
        let half = rat(1, 2);
        assert_eq!(preimage_points(&half, 1).unwrap().points(), rats(&[(1, 3), (2, 3)]));
        assert_eq!(preimage_points(&rat(2, 5), 0).unwrap().points(), rats(&[(2, 5)]));
        assert_eq!(
            preimage_points(&half, 2).unwrap().points(),
            rats(&[(1, 4), (2, 5), (3, 5), (3, 4)])
        );
        assert!(preimage_points(&rat(0, 1), 1).is_err());
        assert!(preimage_points(&half, 25).is_err());
    }

    #[test]
    fn preimages_match_mobius_words() {
        // Möbius-word oracle: T^{-n}(x) = { b₁∘…∘b_n (x) }.
        let x = rat(2, 5);
        for n in 0..=8u32 {
            let mut oracle: Vec<Rational> = (0..1u32 << n)
                .map(|bits| {
                    let word: Vec<Branch> = (0..n)
                        .map(|i| if bits >> i & 1 == 0 { Branch::Left } else { Branch::Right })
                        .collect();
                    MobiusMap::word(&word).apply(&x).unwrap()
                })
                .collect();
            oracle.sort();
            let set = preimage_points(&x, n).unwrap();
            assert_eq!(set.points(), oracle.as_slice());
            assert!(set.points().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_sum(&rat(1, 2), 1).unwrap(), rat(1, 2));
        for n in 0..=12 {
            assert_eq!(kappa_sum(&rat(1, 2), n).unwrap(), rat(1, 2));
        }
        assert_eq!(kappa_sum(&rat(3, 7), 0).unwrap(), rat(1, 21));
        assert!(kappa_sum(&rat(0, 1), 3).is_err());
        let f: f64 = kappa_sum_as(&rat(2, 5), 14).unwrap();
        assert!((f - 0.1).abs() < 1e-14);
    }

    #[test]
    fn weighted_mass_examples() {
        assert_eq!(weighted_mass(1).unwrap(), rat(1, 4));
        assert_eq!(weighted_mass(2).unwrap(), rat(2, 9));
        assert_eq!(weighted_mass(3).unwrap(), rat(41, 200));
    }

    #[test]
    fn float_mass_tracks_exact_mass() {
        for n in [4, 10, 16] {
            let exact = weighted_mass(n).unwrap().to_f64();
            let float: f64 = weighted_mass_as(n).unwrap();
            assert!((exact - float).abs() <= 1e-15 * exact, "n = {n}");
        }
    }

    #[test]
    fn eigenfunction_examples() {
        assert!(eigenfunction_residual(&rat(1, 2), 1).unwrap().is_zero());
        assert!(eigenfunction_residual(&rat(2, 5), 3).unwrap().is_zero());
        assert!(eigenfunction_residual(&rat(5, 7), 0).unwrap().is_zero());
    }

    #[test]
    fn digit_sum_ball_examples() {
        assert_eq!(digit_sum_ball(1).unwrap(), rats(&[(1, 1)]));
        assert_eq!(digit_sum_ball(2).unwrap(), rats(&[(1, 2), (1, 1)]));
        assert_eq!(
            digit_sum_ball(3).unwrap(),
            rats(&[(1, 3), (1, 2), (2, 3), (1, 1)])
        );
    }

    #[test]
    fn digit_sum_ball_matches_direct_filter() {
        // Digit sum ≤ n forces q ≤ F_{n+1}; filter every fraction below that.
        for n in 1..=10u32 {
            let (mut a, mut b) = (1u64, 1u64);
            for _ in 1..n {
                (a, b) = (b, a + b);
            }
            let bound = b;
            let mut direct = Vec::new();
            for q in 1..=bound {
                for p in 1..=q {
                    if num_integer::gcd(p, q) == 1 && digit_sum(&rat(p, q)).unwrap() <= u64::from(n) {
                        direct.push(rat(p, q));
                    }
                }
            }
            direct.sort();
            assert_eq!(digit_sum_ball(n).unwrap(), direct, "n = {n}");
        }
    }

    #[test]
    fn mass_rows_switch_to_float() {
        let rows = mass_rows(&[3, 6], 4).unwrap();
        assert_eq!(rows[0].exact, Some(rat(41, 200)));
        assert!(rows[1].exact.is_none());
        assert!((rows[0].mass_log_n - 0.205 * 3f64.ln()).abs() < 1e-15);
    }
}
