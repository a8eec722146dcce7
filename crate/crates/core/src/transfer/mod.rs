//! Perron-Frobenius operator `ℒ` and transfer operator `T̂` of the Farey map,
//! evaluated pointwise over exact preimage trees.
//!
//! With `u₀(x) = x/(1+x)` and `u₁(x) = 1/(1+x)`, both of derivative
//! `1/(1+x)²`:
//!
//! ```text
//! ℒf(x) = (f(u₀x) + f(u₁x)) / (1+x)²
//! T̂f(x) = x · ℒ(f/φ₀)(x) = (f(u₀x) + x·f(u₁x)) / (1+x)
//! ```
//!
//! where `φ₀(x) = x`. `T̂` preserves constants, which is the invariance of
//! `dμ = dx/x`.

mod returning;

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

pub use returning::{uniformly_returning_report, ReturningRow, ReturningSolver, RETURNING_CAP};

use crate::error::{Error, Result};
use crate::exact::{ensure_unit_interval, Rational};
use crate::scalar::{Neumaier, Scalar};
use crate::stern_brocot::check_depth;

/// Depth cap for pointwise preimage-tree evaluation.
pub const TRANSFER_CAP: u32 = 22;

const PARALLEL_DEPTH: u32 = 12;

/// Functions on `[0, 1]` fed to the operators.
#[derive(Clone)]
pub enum TestFunction {
    Zero,
    One,
    /// `φ₀(x) = x`.
    Identity,
    /// `h(x) = 1/x`, the invariant density of `ℒ`.
    Reciprocal,
    /// `φ_t(x) = x·exp(t·x)`.
    PhiT(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Zero => write!(f, "Zero"),
            TestFunction::One => write!(f, "One"),
            TestFunction::Identity => write!(f, "Identity"),
            TestFunction::Reciprocal => write!(f, "Reciprocal"),
            TestFunction::PhiT(t) => write!(f, "PhiT({t})"),
            TestFunction::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl TestFunction {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        TestFunction::Custom(Arc::new(f))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            TestFunction::Zero => 0.0,
            TestFunction::One => 1.0,
            TestFunction::Identity => x,
            TestFunction::Reciprocal => 1.0 / x,
            TestFunction::PhiT(t) => x * (t * x).exp(),
            TestFunction::Custom(f) => f(x),
        }
    }

    /// Exact value where the function takes rational values at rational
    /// points.
    pub fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        match self {
            TestFunction::Zero => Ok(Rational::zero()),
            TestFunction::One => Ok(Rational::one()),
            TestFunction::Identity => Ok(x.clone()),
            TestFunction::PhiT(t) if *t == 0.0 => Ok(x.clone()),
            TestFunction::Reciprocal => {
                if x.is_zero() {
                    Err(Error::Pole("1/x at 0".into()))
                } else {
                    Ok(x.recip())
                }
            }
            other => Err(Error::NotExact(format!("{other:?}"))),
        }
    }

    /// Value in the scalar type: exact when `S` is, otherwise through `f64`.
    pub fn eval_as<S: Scalar>(&self, x: &Rational) -> Result<S> {
        match self.eval_exact(x) {
            Ok(v) => Ok(S::from_rational(&v)),
            Err(e) if S::EXACT => Err(e),
            Err(_) => Ok(S::from_f64(self.eval_f64(x.to_f64()))),
        }
    }
}

fn u0(x: &Rational) -> Rational {
    x / (Rational::one() + x)
}

fn u1(x: &Rational) -> Rational {
    (Rational::one() + x).recip()
}

/// `|u₀′(x)| = |u₁′(x)| = 1/(1+x)²`.
fn branch_derivative(x: &Rational) -> Rational {
    let s = Rational::one() + x;
    (&s * &s).recip()
}

/// `ℒf(x)`.
pub fn pf_apply<S: Scalar>(f: &TestFunction, x: &Rational) -> Result<S> {
    pf_apply_with(|y| f.eval_as::<S>(y), x)
}

/// `ℒg(x)` for an arbitrary evaluator `g`.
pub fn pf_apply_with<S: Scalar>(
    g: impl Fn(&Rational) -> Result<S>,
    x: &Rational,
) -> Result<S> {
    ensure_unit_interval("x", x, false)?;
    let d = S::from_rational(&branch_derivative(x));
    Ok(d * (g(&u0(x))? + g(&u1(x))?))
}

/// `T̂ⁿf(x) = x · Σ_{y ∈ T^{-n}x} |(Tⁿ)′(y)|⁻¹ f(y)/y`.
///
/// The inverse derivative is accumulated branch by branch along the
/// preimage tree (chain rule), and the leaves are summed following the tree.
pub fn transfer_apply_n<S: Scalar>(f: &TestFunction, n: u32, x: &Rational) -> Result<S> {
    fn walk<S: Scalar>(
        f: &TestFunction,
        y: Rational,
        dprod: Rational,
        depth: u32,
    ) -> Result<S> {
        if depth == 0 {
            let fy: S = f.eval_as(&y)?;
            return Ok(S::from_rational(&(dprod / &y)) * fy);
        }
        let d = &dprod * branch_derivative(&y);
        let (a, b) = (u0(&y), u1(&y));
        let (l, r) = if depth >= PARALLEL_DEPTH {
            rayon::join(
                || walk::<S>(f, a, d.clone(), depth - 1),
                || walk::<S>(f, b, d.clone(), depth - 1),
            )
        } else {
            (
                walk::<S>(f, a, d.clone(), depth - 1),
                walk::<S>(f, b, d, depth - 1),
            )
        };
        Ok(l? + r?)
    }
    check_depth(n, TRANSFER_CAP)?;
    ensure_unit_interval("x", x, true)?;
    if n == 0 {
        return f.eval_as(x);
    }
    let sum: S = walk(f, x.clone(), Rational::one(), n)?;
    Ok(S::from_rational(x) * sum)
}

/// Floating-point `T̂ⁿf(x)` at a float point, by the same preimage sum.
pub fn transfer_apply_n_f64(f: &TestFunction, n: u32, x: f64) -> Result<f64> {
    fn walk(f: &TestFunction, y: f64, weight: f64, depth: u32) -> Neumaier {
        if depth == 0 {
            let mut acc = Neumaier::new();
            acc.add(weight * f.eval_f64(y) / y);
            return acc;
        }
        let s = 1.0 + y;
        let w = weight / (s * s);
        let (mut l, r) = if depth >= PARALLEL_DEPTH {
            rayon::join(
                || walk(f, y / s, w, depth - 1),
                || walk(f, 1.0 / s, w, depth - 1),
            )
        } else {
            (walk(f, y / s, w, depth - 1), walk(f, 1.0 / s, w, depth - 1))
        };
        l.merge(&r);
        l
    }
    check_depth(n, TRANSFER_CAP)?;
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::OutOfDomain {
            what: "x",
            value: x.to_string(),
            domain: "(0,1]",
        });
    }
    if n == 0 {
        return Ok(f.eval_f64(x));
    }
    Ok(x * walk(f, x, 1.0, n).value())
}

/// `T̂f(x) − x·ℒ(f/φ₀)(x)`, zero in exact arithmetic.
pub fn conjugation_residual<S: Scalar>(f: &TestFunction, x: &Rational) -> Result<S> {
    let lhs: S = transfer_apply_n(f, 1, x)?;
    let rhs: S = pf_apply_with(
        |y| Ok(f.eval_as::<S>(y)? / S::from_rational(y)),
        x,
    )?;
    Ok(lhs - S::from_rational(x) * rhs)
}

/// `μ(φ_t) = ∫₀¹ e^{tx} dx`.
pub fn mu_phi_t(t: f64) -> f64 {
    crate::measures::uniform_mgf(t)
}

/// Closed forms of `(T̂φ_t)′(x)` and `(T̂φ_t)″(x)`.
pub fn phi_t_transfer_derivatives(t: f64, x: f64) -> (f64, f64) {
    let phi = |y: f64| y * (t * y).exp();
    let dphi = |y: f64| (1.0 + t * y) * (t * y).exp();
    let s = x + 1.0;
    let (a, b) = (x / s, 1.0 / s);
    let first = (dphi(a) - x * dphi(b)) / s.powi(3) + (phi(b) - phi(a)) / s.powi(2);
    let p1 = -2.0 * x * t - 6.0 * x + 2.0 * t + x * t * t + 2.0 * x.powi(3)
        - 4.0 * t * x * x
        - 4.0;
    let p2 = 2.0 * t * x - 6.0 * x - 2.0 * t + x * t * t + 2.0 * x.powi(3)
        + 4.0 * t * x * x
        - 4.0;
    let second = (p1 * (t * a).exp() + p2 * (t * b).exp()) / s.powi(6);
    (first, second)
}

/// Grid check that `T̂φ_t` is nondecreasing and concave, with the closed-form
/// first derivative compared against central differences of `T̂φ_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DClassRow {
    pub t: f64,
    pub min_first: f64,
    pub max_second: f64,
    pub fd_max_error: f64,
}

impl DClassRow {
    /// Allows rounding noise around the zero of `(T̂φ_t)′` at `x = 1`.
    pub fn holds(&self) -> bool {
        self.min_first >= -1e-12 && self.max_second <= 0.0
    }
}

/// `grid_points` equally spaced points on `[0, 1]` for the sign checks; the
/// finite-difference comparison uses 21 interior points with step `10⁻⁵`.
pub fn dclass_check(t: f64, grid_points: usize) -> Result<DClassRow> {
    if grid_points < 2 {
        return Err(Error::OutOfDomain {
            what: "grid_points",
            value: grid_points.to_string(),
            domain: ">= 2",
        });
    }
    let mut min_first = f64::INFINITY;
    let mut max_second = f64::NEG_INFINITY;
    for i in 0..grid_points {
        let x = i as f64 / (grid_points - 1) as f64;
        let (d1, d2) = phi_t_transfer_derivatives(t, x);
        min_first = min_first.min(d1);
        max_second = max_second.max(d2);
    }
    let f = TestFunction::PhiT(t);
    let h = 1e-5;
    let mut fd_max_error: f64 = 0.0;
    for i in 1..=21 {
        let x = i as f64 / 22.0;
        let fd = (transfer_apply_n_f64(&f, 1, x + h)? - transfer_apply_n_f64(&f, 1, x - h)?)
            / (2.0 * h);
        fd_max_error = fd_max_error.max((fd - phi_t_transfer_derivatives(t, x).0).abs());
    }
    Ok(DClassRow {
        t,
        min_first,
        max_second,
        fd_max_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{fmt_rational, rat};
    use crate::stern_brocot::kappa_sum;

    #[test]
    fn pf_examples() {
        for x in [rat(1, 3), rat(1, 2), rat(2, 3)] {
            let v: Rational = pf_apply(&TestFunction::Reciprocal, &x).unwrap();
            assert_eq!(v, x.recip());
        }
        let z: Rational = pf_apply(&TestFunction::Zero, &rat(1, 2)).unwrap();
        assert!(z.is_zero());
        let v: Rational = pf_apply(&TestFunction::Identity, &rat(1, 1)).unwrap();
        assert_eq!(v, rat(1, 4));
    }

    #[test]
    fn invariance_of_constants() {
        for x in [rat(1, 3), rat(1, 2), rat(3, 4)] {
            for n in 0..=8 {
                let v: Rational = transfer_apply_n(&TestFunction::One, n, &x).unwrap();
                assert_eq!(v, rat(1, 1));
            }
        }
    }

    #[test]
    fn invariance_matches_kappa() {
        // leaves contribute x·(w²/q²)·(q/p), so T̂ⁿ1(v/w) = v·w·Σ 1/(pq)
        for x in [rat(2, 5), rat(3, 7)] {
            for n in 1..=6 {
                let vw = Rational::from_integer(x.numer() * x.denom());
                let k = kappa_sum(&x, n).unwrap();
                let v: Rational = transfer_apply_n(&TestFunction::One, n, &x).unwrap();
                assert_eq!(v, vw * k);
            }
        }
    }

    #[test]
    fn zero_steps_is_identity() {
        let v: f64 = transfer_apply_n(&TestFunction::PhiT(1.0), 0, &rat(1, 2)).unwrap();
        assert_eq!(v, 0.5 * 0.5f64.exp());
    }

    #[test]
    fn exact_mode_rejects_transcendental() {
        let r: Result<Rational> = transfer_apply_n(&TestFunction::PhiT(1.0), 2, &rat(1, 2));
        assert!(matches!(r, Err(Error::NotExact(_))));
        let r: Rational = transfer_apply_n(&TestFunction::PhiT(0.0), 2, &rat(1, 2)).unwrap();
        let id: Rational = transfer_apply_n(&TestFunction::Identity, 2, &rat(1, 2)).unwrap();
        assert_eq!(r, id);
    }

    #[test]
    fn conjugation_identity() {
        for f in [TestFunction::One, TestFunction::Identity, TestFunction::Reciprocal] {
            for x in [rat(1, 3), rat(1, 2), rat(5, 7), rat(1, 1)] {
                let r: Rational = conjugation_residual(&f, &x).unwrap();
                assert!(r.is_zero(), "{f:?} at {}", fmt_rational(&x));
            }
        }
    }

    #[test]
    fn float_paths_agree() {
        let f = TestFunction::PhiT(0.5);
        for x in [rat(1, 3), rat(1, 2), rat(3, 4)] {
            let a: f64 = transfer_apply_n(&f, 10, &x).unwrap();
            let b = transfer_apply_n_f64(&f, 10, x.to_f64()).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn closed_form_first_derivative_vanishes_at_one() {
        for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            assert!(phi_t_transfer_derivatives(t, 1.0).0.abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_second_derivative_matches_differences() {
        let h = 1e-5;
        for t in [-1.0, 0.3, 1.0] {
            for i in 1..10 {
                let x = i as f64 / 10.0;
                let fd = (phi_t_transfer_derivatives(t, x + h).0
                    - phi_t_transfer_derivatives(t, x - h).0)
                    / (2.0 * h);
                let exact = phi_t_transfer_derivatives(t, x).1;
                assert!((fd - exact).abs() < 1e-7, "t={t} x={x}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn cap_enforced() {
        let r: Result<f64> = transfer_apply_n(&TestFunction::One, TRANSFER_CAP + 1, &rat(1, 2));
        assert!(matches!(r, Err(Error::DepthCap { .. })));
    }
}
