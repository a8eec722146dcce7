//! Weighted empirical measures on `[0, 1]` and their distance to the
//! Lebesgue and Minkowski targets.
//!
//! Shape and mass are tracked separately: [`ks_distance`] compares the
//! normalised measure with a target CDF, while [`AtomicMeasure::total_mass`]
//! follows the scaling constant.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::dynamics::restricted_preimage;
use crate::error::{Error, Result};
use crate::exact::{fmt_rational, minkowski_q_f64, Rational};
use crate::farey::{farey_iter, farey_weighted_mass_as, TotientTable, ZETA2};
use crate::scalar::{Neumaier, Scalar};
use crate::stern_brocot::{check_depth, preimage_points, visit_even_sequence, DEPTH_CAP};

/// Atoms `(point, weight)` with a global scale: the measure is
/// `scale · Σ weight · δ_point`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure<S> {
    atoms: Vec<(Rational, S)>,
    scale: f64,
}

impl<S: Scalar> AtomicMeasure<S> {
    /// Points must be strictly ascending in `[0, 1]`, weights nonnegative,
    /// `scale ≥ 0`.
    pub fn new(atoms: Vec<(Rational, S)>, scale: f64) -> Result<Self> {
        let sorted = atoms.windows(2).all(|w| w[0].0 < w[1].0);
        let in_range = atoms
            .iter()
            .all(|(x, _)| *x >= Rational::zero() && *x <= Rational::one());
        let nonneg = atoms.iter().all(|(_, w)| *w >= S::zero());
        if !(sorted && in_range && nonneg && scale >= 0.0 && scale.is_finite()) {
            return Err(Error::InvalidAtoms);
        }
        Ok(Self { atoms, scale })
    }

    pub fn atoms(&self) -> &[(Rational, S)] {
        &self.atoms
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `Σ weight`, without the scale.
    pub fn unscaled_mass(&self) -> S {
        S::sum_all(self.atoms.iter().map(|(_, w)| w.clone()))
    }

    /// `scale · Σ weight`.
    pub fn total_mass(&self) -> f64 {
        self.scale * self.unscaled_mass().to_f64()
    }

    /// `Σ_{point ≤ x} weight`, without the scale.
    pub fn unscaled_cdf(&self, x: &Rational) -> S {
        let idx = self.atoms.partition_point(|(p, _)| p <= x);
        S::sum_all(self.atoms[..idx].iter().map(|(_, w)| w.clone()))
    }

    /// `scale · Σ_{point ≤ x} weight` (right-continuous).
    pub fn cdf(&self, x: &Rational) -> f64 {
        self.scale * self.unscaled_cdf(x).to_f64()
    }

    /// Weights divided by the unscaled mass, scale 1.
    pub fn normalized(&self) -> Result<Self> {
        let mass = self.unscaled_mass();
        if mass <= S::zero() {
            return Err(Error::NotNormalized(0.0));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|(x, w)| (x.clone(), w.share_of(&mass)))
            .collect();
        Ok(Self { atoms, scale: 1.0 })
    }

    pub fn to_f64(&self) -> AtomicMeasure<f64> {
        AtomicMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|(x, w)| (x.clone(), w.to_f64()))
                .collect(),
            scale: self.scale,
        }
    }
}

/// Reference distribution on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetCdf {
    /// Lebesgue measure.
    Uniform,
    /// Measure of maximal entropy, CDF `?(x)`.
    MinkowskiQ,
}

impl TargetCdf {
    pub fn eval(self, x: &Rational) -> f64 {
        match self {
            TargetCdf::Uniform => x.to_f64(),
            TargetCdf::MinkowskiQ => minkowski_q_f64(x).expect("atoms lie in [0,1]"),
        }
    }

    /// Same value from a reduced pair `p/q` with `0 ≤ p ≤ q`.
    pub fn eval_pair(self, p: u64, q: u64) -> f64 {
        match self {
            TargetCdf::Uniform => p as f64 / q as f64,
            TargetCdf::MinkowskiQ => minkowski_pair(p, q),
        }
    }
}

fn minkowski_pair(p: u64, q: u64) -> f64 {
    let (mut a, mut b) = (q, p);
    let mut partial: i64 = 0;
    let mut acc = 0.0;
    let mut sign = 1.0;
    while b != 0 {
        partial += (a / b) as i64;
        acc += sign * 2f64.powi((1 - partial).max(-1100) as i32);
        sign = -sign;
        (a, b) = (b, a % b);
    }
    acc
}

const NORMALIZATION_TOL: f64 = 1e-9;

/// `sup |F_m − F_target|` over the atoms and their left limits. The measure
/// must already have total mass 1.
pub fn ks_distance<S: Scalar>(m: &AtomicMeasure<S>, target: TargetCdf) -> Result<f64> {
    let mass = m.total_mass();
    if (mass - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(mass));
    }
    let scale = m.scale;
    Ok(ks_sorted_stream(
        m.atoms
            .iter()
            .map(|(x, w)| (target.eval(x), scale * w.to_f64())),
        1.0,
    ))
}

/// KS sweep over a stream of `(target CDF at atom, weight)` in ascending
/// atom order; weights are divided by `total`.
pub fn ks_sorted_stream(atoms: impl Iterator<Item = (f64, f64)>, total: f64) -> f64 {
    let mut cum = Neumaier::new();
    let mut sup: f64 = 0.0;
    for (f, w) in atoms {
        let before = cum.value();
        cum.add(w / total);
        let after = cum.value();
        sup = sup.max((before - f).abs()).max((after - f).abs());
    }
    sup
}

/// `scale · Σ weight · exp(t·point)`.
pub fn mgf<S: Scalar>(m: &AtomicMeasure<S>, t: f64) -> f64 {
    let s: Neumaier = m
        .atoms
        .iter()
        .map(|(x, w)| w.to_f64() * (t * x.to_f64()).exp())
        .sum();
    m.scale * s.value()
}

/// `∫₀¹ e^{tx} dx = (e^t − 1)/t`, 1 at `t = 0`.
pub fn uniform_mgf(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.exp_m1() / t
    }
}

/// MGF of normalised Lebesgue measure on `T^{-n}([α, β])`, integrated in
/// closed form component by component.
pub fn restricted_mgf(alpha: &Rational, beta: &Rational, n: u32, t: f64) -> Result<f64> {
    let set = restricted_preimage(alpha, beta, n)?;
    Ok(set.integrate_exp(t) / set.measure_f64())
}

fn inv_square<S: Scalar>(q: &BigInt) -> S {
    S::from_rational(&Rational::new_raw(BigInt::one(), q * q))
}

fn require_at_least(n: u64, min: u64) -> Result<()> {
    if n < min {
        return Err(Error::OutOfDomain {
            what: "n",
            value: n.to_string(),
            domain: if min == 1 { "n >= 1" } else { "n >= 2" },
        });
    }
    Ok(())
}

/// `𝓢ₙ` with weights `q⁻²` and scale `2 ln n`.
pub fn stern_weighted<S: Scalar>(n: u32) -> Result<AtomicMeasure<S>> {
    require_at_least(n.into(), 2)?;
    check_depth(n, DEPTH_CAP)?;
    let mut atoms = Vec::with_capacity(1 << (n - 1));
    visit_even_sequence(n, |p, q| {
        atoms.push((Rational::new_raw(p.clone(), q.clone()), inv_square(q)))
    });
    Ok(AtomicMeasure {
        atoms,
        scale: 2.0 * f64::from(n).ln(),
    })
}

/// `𝓢ₙ` with equal weights `2^{−(n−1)}`.
pub fn stern_unweighted<S: Scalar>(n: u32) -> Result<AtomicMeasure<S>> {
    require_at_least(n.into(), 1)?;
    check_depth(n, DEPTH_CAP)?;
    let w = S::from_rational(&Rational::new(BigInt::one(), BigInt::one() << (n - 1)));
    let mut atoms = Vec::with_capacity(1 << (n - 1));
    visit_even_sequence(n, |p, q| {
        atoms.push((Rational::new_raw(p.clone(), q.clone()), w.clone()))
    });
    Ok(AtomicMeasure { atoms, scale: 1.0 })
}

/// `𝓕ₙ` with weights `q⁻²` and scale `ζ(2)/ln n`.
pub fn farey_weighted<S: Scalar>(n: u64) -> Result<AtomicMeasure<S>> {
    require_at_least(n, 2)?;
    let atoms = farey_iter(n)
        .map(|(p, q)| {
            let q = BigInt::from(q);
            (Rational::new_raw(BigInt::from(p), q.clone()), inv_square(&q))
        })
        .collect();
    Ok(AtomicMeasure {
        atoms,
        scale: ZETA2 / (n as f64).ln(),
    })
}

/// `𝓕ₙ` with equal weights `1/|𝓕ₙ|`.
pub fn farey_unweighted<S: Scalar>(n: u64) -> Result<AtomicMeasure<S>> {
    require_at_least(n, 1)?;
    let count = TotientTable::new(n as usize).prefix_sum(n as usize);
    let w = S::from_rational(&Rational::new(BigInt::one(), BigInt::from(count)));
    let atoms = farey_iter(n)
        .map(|(p, q)| (Rational::new_raw(BigInt::from(p), BigInt::from(q)), w.clone()))
        .collect();
    Ok(AtomicMeasure { atoms, scale: 1.0 })
}

/// `T^{-n}(v/w)` with weights `q⁻²` and scale `v·w·ln n` (0 at `n = 1`).
pub fn preimage_weighted<S: Scalar>(target: &Rational, n: u32) -> Result<AtomicMeasure<S>> {
    let set = preimage_points(target, n)?;
    let vw = num_traits::ToPrimitive::to_f64(&(target.numer() * target.denom()))
        .unwrap_or(f64::INFINITY);
    let scale = vw * f64::from(n.max(1)).ln();
    let atoms = set
        .into_points()
        .into_iter()
        .map(|x| {
            let w = inv_square(x.denom());
            (x, w)
        })
        .collect();
    Ok(AtomicMeasure { atoms, scale })
}

/// Which empirical measure a report row describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureKind {
    SternWeighted,
    SternUnweighted,
    FareyWeighted,
    FareyUnweighted,
    Preimage(Rational),
}

impl MeasureKind {
    pub fn name(&self) -> String {
        match self {
            MeasureKind::SternWeighted => "stern-weighted".into(),
            MeasureKind::SternUnweighted => "stern-unweighted".into(),
            MeasureKind::FareyWeighted => "farey-weighted".into(),
            MeasureKind::FareyUnweighted => "farey-unweighted".into(),
            MeasureKind::Preimage(r) => format!("preimage {}", fmt_rational(r)),
        }
    }

    /// Builds the measure in the given scalar type.
    pub fn build<S: Scalar>(&self, n: u64) -> Result<AtomicMeasure<S>> {
        let depth = || -> Result<u32> {
            u32::try_from(n).map_err(|_| Error::DepthCap {
                requested: n,
                cap: DEPTH_CAP.into(),
            })
        };
        match self {
            MeasureKind::SternWeighted => stern_weighted(depth()?),
            MeasureKind::SternUnweighted => stern_unweighted(depth()?),
            MeasureKind::FareyWeighted => farey_weighted(n),
            MeasureKind::FareyUnweighted => farey_unweighted(n),
            MeasureKind::Preimage(r) => preimage_weighted(r, depth()?),
        }
    }
}

/// Row of the `n, total_mass, ks_uniform, ks_minkowski` table.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRow {
    pub n: u64,
    pub total_mass: f64,
    pub ks_uniform: f64,
    pub ks_minkowski: f64,
}

/// Farey measures are swept straight from the neighbour recurrence, so large
/// orders never hold the atoms in memory.
pub fn measure_row(kind: &MeasureKind, n: u64) -> Result<MeasureRow> {
    match kind {
        MeasureKind::FareyWeighted | MeasureKind::FareyUnweighted => {
            let weighted = *kind == MeasureKind::FareyWeighted;
            require_at_least(n, if weighted { 2 } else { 1 })?;
            let weight = |q: u64| {
                if weighted {
                    (q as f64).powi(-2)
                } else {
                    1.0
                }
            };
            let (total, total_mass) = if weighted {
                let m: f64 = farey_weighted_mass_as(n)?;
                (m, m * ZETA2 / (n as f64).ln())
            } else {
                (TotientTable::new(n as usize).prefix_sum(n as usize) as f64, 1.0)
            };
            let ks = |target: TargetCdf| {
                ks_sorted_stream(
                    farey_iter(n).map(|(p, q)| (target.eval_pair(p, q), weight(q))),
                    total,
                )
            };
            Ok(MeasureRow {
                n,
                total_mass,
                ks_uniform: ks(TargetCdf::Uniform),
                ks_minkowski: ks(TargetCdf::MinkowskiQ),
            })
        }
        _ => {
            let m: AtomicMeasure<f64> = kind.build(n)?;
            let total_mass = m.total_mass();
            let norm = m.normalized()?;
            Ok(MeasureRow {
                n,
                total_mass,
                ks_uniform: ks_distance(&norm, TargetCdf::Uniform)?,
                ks_minkowski: ks_distance(&norm, TargetCdf::MinkowskiQ)?,
            })
        }
    }
}

pub fn measure_report(kind: &MeasureKind, schedule: &[u64]) -> Result<Vec<MeasureRow>> {
    schedule.iter().map(|&n| measure_row(kind, n)).collect()
}
