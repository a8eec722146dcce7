//! `PSL₂(ℤ)` acting on the upper half-plane: word-length balls over
//! `{z ↦ z+1, z ↦ z−1, z ↦ −1/z}`, displacement balls around `i`, and the
//! two partial Poincaré sums `Σ e^{−d(i, γi)}`.

use std::fmt;

use indexmap::{IndexMap, IndexSet};
use num_integer::Integer;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Neumaier;

/// Word-length cap for [`word_length_ball`].
pub const WORD_LENGTH_CAP: u32 = 20;
/// Radius cap for [`geometric_sum`].
pub const RADIUS_CAP: f64 = 12.0;

/// Element of `PSL₂(ℤ)`, stored with the first nonzero of `(a, c)` positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl GroupElement {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = i128::from(a) * i128::from(d) - i128::from(b) * i128::from(c);
        if det != 1 {
            return Err(Error::NotUnimodular {
                a: a.to_string(),
                b: b.to_string(),
                c: c.to_string(),
                d: d.to_string(),
            });
        }
        Ok(Self::canonical(a, b, c, d))
    }

    fn canonical(a: i64, b: i64, c: i64, d: i64) -> Self {
        if a < 0 || (a == 0 && c < 0) {
            Self {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            Self { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        Self { a: 1, b: 0, c: 0, d: 1 }
    }

    /// `z ↦ z + 1`.
    pub fn translation() -> Self {
        Self { a: 1, b: 1, c: 0, d: 1 }
    }

    /// `z ↦ z − 1`.
    pub fn translation_inverse() -> Self {
        Self { a: 1, b: -1, c: 0, d: 1 }
    }

    /// `z ↦ −1/z`.
    pub fn inversion() -> Self {
        Self { a: 0, b: -1, c: 1, d: 0 }
    }

    pub fn generators() -> [Self; 3] {
        [
            Self::translation(),
            Self::translation_inverse(),
            Self::inversion(),
        ]
    }

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let m = |x: i64, y: i64, z: i64, w: i64| {
            x.checked_mul(y)
                .zip(z.checked_mul(w))
                .and_then(|(p, q)| p.checked_add(q))
                .ok_or(Error::Overflow("group multiplication"))
        };
        Ok(Self::canonical(
            m(self.a, other.a, self.b, other.c)?,
            m(self.a, other.b, self.b, other.d)?,
            m(self.c, other.a, self.d, other.c)?,
            m(self.c, other.b, self.d, other.d)?,
        ))
    }

    /// `a² + b² + c² + d²`.
    pub fn frobenius_sq(&self) -> i128 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|&x| i128::from(x) * i128::from(x))
            .sum()
    }

    /// `g(i)` as `(Re, Im)`.
    pub fn image_of_i(&self) -> (f64, f64) {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        let den = c * c + d * d;
        ((a * c + b * d) / den, 1.0 / den)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}; {} {}]", self.a, self.b, self.c, self.d)
    }
}

/// `d(i, g·i)` from `cosh d = ‖g‖²/2`.
pub fn displacement(g: &GroupElement) -> f64 {
    (g.frobenius_sq() as f64 / 2.0).acosh()
}

/// `d(i, g·i)` from `cosh d = 1 + |z − i|²/(2 Im z)`, `z = g·i`.
pub fn displacement_via_image(g: &GroupElement) -> f64 {
    let (x, y) = g.image_of_i();
    (1.0 + (x * x + (y - 1.0) * (y - 1.0)) / (2.0 * y)).acosh()
}

/// Every element of word length at most `len`, with its word length, in
/// breadth-first order.
pub fn word_length_ball(len: u32) -> Result<IndexMap<GroupElement, u32>> {
    if len > WORD_LENGTH_CAP {
        return Err(Error::DepthCap {
            requested: len.into(),
            cap: WORD_LENGTH_CAP.into(),
        });
    }
    let mut ball = IndexMap::new();
    ball.insert(GroupElement::identity(), 0);
    let mut frontier = vec![GroupElement::identity()];
    for level in 1..=len {
        let mut next = Vec::new();
        for g in &frontier {
            for s in GroupElement::generators() {
                let h = g.mul(&s)?;
                if !ball.contains_key(&h) {
                    ball.insert(h, level);
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    Ok(ball)
}

/// Summary of one partial Poincaré sum.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSummary {
    /// Radius `R` or word length `L`.
    pub param: f64,
    pub count: u64,
    pub sum: f64,
    /// `sum/R` for displacement balls, `sum·ln L/L` for word-length balls;
    /// NaN where the normalisation is undefined.
    pub normalized: f64,
}

fn norm_bound(radius: f64) -> Result<i128> {
    if !(0.0..=RADIUS_CAP).contains(&radius) {
        return Err(Error::OutOfDomain {
            what: "R",
            value: radius.to_string(),
            domain: "[0, 12]",
        });
    }
    Ok((2.0 * radius.cosh()).floor() as i128)
}

/// `(x, y)` with `a·x − y·c = 1`, for coprime `(a, c)`.
fn solve_bd(a: i64, c: i64) -> (i64, i64) {
    let e = a.extended_gcd(&c);
    // a·e.x + c·e.y = g = ±1
    let (d0, b0) = (e.x, -e.y);
    if e.gcd == 1 {
        (d0, b0)
    } else {
        (-d0, -b0)
    }
}

/// Elements with `‖g‖² ≤ bound` sharing the first column `(a, c)`.
fn column_family(a: i64, c: i64, bound: i128, out: &mut impl FnMut(GroupElement)) {
    let rest = bound - i128::from(a) * i128::from(a) - i128::from(c) * i128::from(c);
    if rest < 0 {
        return;
    }
    let (d0, b0) = solve_bd(a, c);
    // (b, d) = (b0 + k·a, d0 + k·c); minimise b² + d² over k
    let denom = (a * a + c * c) as f64;
    let k_star = (-((a * b0 + c * d0) as f64) / denom).round() as i64;
    let fits = |k: i64| {
        let b = i128::from(b0) + i128::from(k) * i128::from(a);
        let d = i128::from(d0) + i128::from(k) * i128::from(c);
        b * b + d * d <= rest
    };
    let emit = |k: i64, out: &mut dyn FnMut(GroupElement)| {
        out(GroupElement {
            a,
            b: b0 + k * a,
            c,
            d: d0 + k * c,
        })
    };
    let mut lo = k_star;
    while fits(lo - 1) {
        lo -= 1;
    }
    let mut k = lo;
    while fits(k) {
        emit(k, out);
        k += 1;
    }
    // the rounded minimiser may sit just outside while neighbours fit
    if k == lo {
        for k in [k_star - 1, k_star + 1] {
            if fits(k) {
                emit(k, out);
            }
        }
    }
}

fn lattice_row(a: i64, bound: i128, visit: &mut impl FnMut(GroupElement)) {
    let c_max = ((bound - i128::from(a) * i128::from(a)).max(0) as f64).sqrt() as i64 + 1;
    let c_min = if a == 0 { 1 } else { -c_max };
    for c in c_min..=c_max {
        if a.gcd(&c) == 1 && i128::from(a) * i128::from(a) + i128::from(c) * i128::from(c) <= bound
        {
            column_family(a, c, bound, visit);
        }
    }
}

fn a_range(bound: i128) -> std::ops::RangeInclusive<i64> {
    0..=((bound as f64).sqrt() as i64 + 1)
}

/// All elements with `d(i, g·i) ≤ R`, by lattice search over the first
/// column. Sorted.
pub fn displacement_ball(radius: f64) -> Result<Vec<GroupElement>> {
    let bound = norm_bound(radius)?;
    let mut out = Vec::new();
    for a in a_range(bound) {
        lattice_row(a, bound, &mut |g| out.push(g));
    }
    out.sort();
    Ok(out)
}

/// The same set grown breadth first from the identity, expanding only
/// elements that stay inside the ball. Sorted.
pub fn displacement_ball_bfs(radius: f64) -> Result<Vec<GroupElement>> {
    let bound = norm_bound(radius)?;
    let mut seen = IndexSet::new();
    seen.insert(GroupElement::identity());
    let mut frontier = vec![GroupElement::identity()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for s in GroupElement::generators() {
                let h = g.mul(&s)?;
                if h.frobenius_sq() <= bound && seen.insert(h) {
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// `Σ_{d(i, γi) ≤ R} e^{−d(i, γi)}`, rows of the lattice search run in
/// parallel and merged in row order.
pub fn geometric_sum(radius: f64) -> Result<BallSummary> {
    let bound = norm_bound(radius)?;
    let rows: Vec<(u64, Neumaier)> = a_range(bound)
        .into_par_iter()
        .map(|a| {
            let mut count = 0u64;
            let mut acc = Neumaier::new();
            lattice_row(a, bound, &mut |g| {
                count += 1;
                acc.add((-displacement(&g)).exp());
            });
            (count, acc)
        })
        .collect();
    let mut count = 0;
    let mut acc = Neumaier::new();
    for (c, s) in &rows {
        count += c;
        acc.merge(s);
    }
    let sum = acc.value();
    Ok(BallSummary {
        param: radius,
        count,
        sum,
        normalized: if radius > 0.0 { sum / radius } else { f64::NAN },
    })
}

/// `Σ_{|γ| ≤ L} e^{−d(i, γi)}` over the word-length ball.
pub fn algebraic_sum(len: u32) -> Result<BallSummary> {
    let ball = word_length_ball(len)?;
    let sum = ball
        .keys()
        .map(|g| (-displacement(g)).exp())
        .sum::<Neumaier>()
        .value();
    let l = f64::from(len);
    Ok(BallSummary {
        param: l,
        count: ball.len() as u64,
        sum,
        normalized: if len > 0 { sum * l.ln() / l } else { f64::NAN },
    })
}
