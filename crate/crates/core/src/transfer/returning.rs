//! Evaluation of `T̂ⁿf(x)` for `n` in the hundreds of thousands.
//!
//! The preimage tree has `2ⁿ` leaves, so it is not walked. Instead `T̂` is
//! read as the Markov operator of the chain that moves `x` to `u₀(x)` with
//! probability `1/(1+x)` and to `u₁(x)` with probability `x/(1+x)`. In the
//! coordinate `w = 1/x` the `u₀` step is `w ↦ w + 1` and the `u₁` step
//! restarts the chain at `x = (w + j)/(w + j + 1) ∈ [1/2, 1)`. Splitting on
//! the first restart gives the renewal equation
//!
//! ```text
//! Vₙ(w) = w/(w+n)·f(1/(w+n)) + Σ_{j<n} w/((w+j)(w+j+1))·V_{n−1−j}((w+j)/(w+j+1))
//! ```
//!
//! with `Vₘ = T̂ᵐf`. Each `Vₘ` is needed only on `[1/2, 1]`, where it is
//! smooth, so it is stored by its values at Chebyshev–Lobatto nodes. Lags
//! `j < NEAR` are applied directly. For larger lags the restart point is
//! within `1/(j+2)` of 1, `Vₘ` is replaced by its Taylor polynomial at 1,
//! and the kernels `1/((u−1)·u^{1+k})`, `u = w + j + 1`, are written as
//! sums of exponentials in `u`. The history sum then becomes a handful of
//! geometric recurrences, and the whole computation is `O(n)`.

use crate::error::{Error, Result};
use crate::measures::uniform_mgf;
use crate::scalar::Neumaier;
use crate::transfer::TestFunction;

/// Largest `n` the solver accepts.
pub const RETURNING_CAP: usize = 1 << 20;

/// Chebyshev nodes on `[1/2, 1]`.
const N: usize = 16;
/// Lags handled by direct interpolation.
const NEAR: usize = 8;
/// Taylor terms at `x = 1` for the far lags.
const TAYLOR: usize = 8;
/// Exponential-sum quadrature in `τ = ln s`.
const TAU_MIN: f64 = -30.0;
const TAU_MAX: f64 = 1.5;
const TAU_STEP: f64 = 0.25;

type Vector = [f64; N];

struct Basis {
    nodes: Vector,
    bary: Vector,
}

impl Basis {
    fn new() -> Self {
        let mut nodes = [0.0; N];
        let mut bary = [0.0; N];
        for k in 0..N {
            let theta = std::f64::consts::PI * k as f64 / (N - 1) as f64;
            nodes[k] = 0.75 + 0.25 * theta.cos();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            bary[k] = if k == 0 || k == N - 1 { 0.5 * sign } else { sign };
        }
        Self { nodes, bary }
    }

    /// Lagrange basis values at `y` (barycentric form).
    fn at(&self, y: f64) -> Vector {
        let mut out = [0.0; N];
        if let Some(k) = self.nodes.iter().position(|&node| node == y) {
            out[k] = 1.0;
            return out;
        }
        let mut total = 0.0;
        for ((o, b), node) in out.iter_mut().zip(&self.bary).zip(&self.nodes) {
            *o = b / (y - node);
            total += *o;
        }
        for o in &mut out {
            *o /= total;
        }
        out
    }

    fn interpolate(&self, y: f64, v: &Vector) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((node, b), vk) in self.nodes.iter().zip(&self.bary).zip(v) {
            let d = y - node;
            if d == 0.0 {
                return *vk;
            }
            let c = b / d;
            num += c * vk;
            den += c;
        }
        num / den
    }

    /// Rows `(−1)ᵏ/k! · e₀ᵀDᵏ`, so that `row_k · v` is the coefficient of
    /// `u^{−k}` when the interpolant is expanded around `x = 1` in powers of
    /// `1 − x = 1/u`.
    fn taylor_rows(&self) -> [Vector; TAYLOR] {
        let x = &self.nodes;
        let mut c = [1.0; N];
        c[0] = 2.0;
        c[N - 1] = 2.0;
        for (k, ck) in c.iter_mut().enumerate() {
            if k % 2 == 1 {
                *ck = -*ck;
            }
        }
        let mut d = [[0.0; N]; N];
        for i in 0..N {
            let mut row_sum = 0.0;
            for j in 0..N {
                if i != j {
                    d[i][j] = c[i] / c[j] / (x[i] - x[j]);
                    row_sum += d[i][j];
                }
            }
            d[i][i] = -row_sum;
        }
        let mut rows = [[0.0; N]; TAYLOR];
        let mut current = [0.0; N];
        current[0] = 1.0;
        let mut factorial = 1.0;
        for (k, row) in rows.iter_mut().enumerate() {
            if k > 0 {
                factorial *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            for l in 0..N {
                row[l] = sign * current[l] / factorial;
            }
            let mut next = [0.0; N];
            for (i, ci) in current.iter().enumerate() {
                if *ci != 0.0 {
                    for l in 0..N {
                        next[l] += ci * d[i][l];
                    }
                }
            }
            current = next;
        }
        rows
    }
}

/// `h_k(s) = eˢ − Σ_{m ≤ k} sᵐ/m! = Σ_{m > k} sᵐ/m!`, summed as a series
/// (positive terms, no cancellation for small `s`).
fn exp_tail(k: usize, s: f64) -> f64 {
    let mut term = (1..=k + 1).fold(1.0, |acc, i| acc * s / i as f64);
    let mut total = 0.0;
    let mut m = k + 1;
    while term > f64::EPSILON * 1e-3 * total {
        total += term;
        m += 1;
        term *= s / m as f64;
    }
    total
}

/// Values of `T̂ᵐf` on `[1/2, 1]` for `m ≤ n_max`, from which `T̂ⁿf(x)` is
/// read off at any `x ∈ (0, 1]`.
pub struct ReturningSolver {
    f: TestFunction,
    basis: Basis,
    values: Vec<Vector>,
}

impl ReturningSolver {
    pub fn new(f: TestFunction, n_max: usize) -> Result<Self> {
        if n_max > RETURNING_CAP {
            return Err(Error::DepthCap {
                requested: n_max as u64,
                cap: RETURNING_CAP as u64,
            });
        }
        let basis = Basis::new();
        let r: Vector = basis.nodes.map(|x| 1.0 / x);

        let mut near = vec![[[0.0; N]; N]; NEAR];
        for (j, kernel) in near.iter_mut().enumerate() {
            let j = j as f64;
            for i in 0..N {
                let lag = basis.at((r[i] + j) / (r[i] + j + 1.0));
                let p = r[i] / ((r[i] + j) * (r[i] + j + 1.0));
                kernel[i] = lag.map(|l| p * l);
            }
        }

        let taylor = basis.taylor_rows();
        let lambdas: Vec<f64> = (0..)
            .map(|q| TAU_MIN + q as f64 * TAU_STEP)
            .take_while(|&tau| tau < TAU_MAX)
            .map(f64::exp)
            .collect();
        // 1/((u−1)u^{1+k}) = ∫₀^∞ e^{−us} h_k(s) ds ≈ Σ_q weight[k][q]·e^{−u λ_q}
        let weight: Vec<[f64; TAYLOR]> = lambdas
            .iter()
            .map(|&l| std::array::from_fn(|k| TAU_STEP * l * exp_tail(k, l)))
            .collect();
        // the lag-independent part e^{−(w+1)λ} of e^{−uλ}, times the w prefactor
        let node_factor: Vec<Vector> = lambdas
            .iter()
            .map(|&l| std::array::from_fn(|i| r[i] * (-(r[i] + 1.0) * l).exp()))
            .collect();
        let decay: Vec<f64> = lambdas.iter().map(|&l| (-l).exp()).collect();
        let decay_near: Vec<f64> = lambdas
            .iter()
            .map(|&l| (-l * (NEAR - 1) as f64).exp())
            .collect();

        let q_len = lambdas.len();
        // history[q] = Σ_{j ≥ NEAR} e^{−λ_q j} Σ_k weight[k][q]·b_k(m−1−j)
        let mut history = vec![0.0; q_len];
        let mut values: Vec<Vector> = Vec::with_capacity(n_max + 1);
        for m in 0..=n_max {
            let mut v: Vector = std::array::from_fn(|i| {
                let w = r[i] + m as f64;
                r[i] / w * f.eval_f64(1.0 / w)
            });
            for j in 0..m.min(NEAR) {
                let prev = &values[m - 1 - j];
                for i in 0..N {
                    let row = &near[j][i];
                    let mut acc = 0.0;
                    for l in 0..N {
                        acc += row[l] * prev[l];
                    }
                    v[i] += acc;
                }
            }
            for q in 0..q_len {
                let h = history[q];
                if h != 0.0 {
                    for i in 0..N {
                        v[i] += node_factor[q][i] * h;
                    }
                }
            }
            values.push(v);

            if m >= NEAR {
                let old = &values[m - NEAR];
                let b: [f64; TAYLOR] = std::array::from_fn(|k| {
                    taylor[k].iter().zip(old).map(|(a, x)| a * x).sum()
                });
                for q in 0..q_len {
                    let inject: f64 = (0..TAYLOR).map(|k| weight[q][k] * b[k]).sum();
                    history[q] = decay[q] * (history[q] + decay_near[q] * inject);
                }
            }
        }
        Ok(Self { f, basis, values })
    }

    /// Solver for `φ_t(x) = x·e^{tx}`.
    pub fn phi_t(t: f64, n_max: usize) -> Result<Self> {
        Self::new(TestFunction::PhiT(t), n_max)
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `T̂ⁿf(x)`.
    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        if n > self.n_max() {
            return Err(Error::DepthCap {
                requested: n as u64,
                cap: self.n_max() as u64,
            });
        }
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::OutOfDomain {
                what: "x",
                value: x.to_string(),
                domain: "(0,1]",
            });
        }
        let w = 1.0 / x;
        let mut acc = Neumaier::new();
        let end = w + n as f64;
        acc.add(w / end * self.f.eval_f64(1.0 / end));
        for j in 0..n {
            let a = w + j as f64;
            let y = a / (a + 1.0);
            acc.add(w / (a * (a + 1.0)) * self.basis.interpolate(y, &self.values[n - 1 - j]));
        }
        Ok(acc.value())
    }
}

/// Row of the `t, n, x, scaled_value, target, abs_error` table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturningRow {
    pub t: f64,
    pub n: usize,
    pub x: f64,
    /// `ln(n)·T̂ⁿφ_t(x)`.
    pub scaled: f64,
    /// `μ(φ_t)`.
    pub target: f64,
    pub abs_error: f64,
}

/// `ln(n)·T̂ⁿφ_t(x)` against `μ(φ_t)` for each `n` in the schedule and each
/// grid point.
pub fn uniformly_returning_report(
    t: f64,
    xs: &[f64],
    schedule: &[usize],
) -> Result<Vec<ReturningRow>> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t.to_string(),
            domain: "[-1,1]",
        });
    }
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSchedule(format!(
            "{schedule:?} must be nonempty and strictly ascending"
        )));
    }
    let solver = ReturningSolver::phi_t(t, *schedule.last().unwrap())?;
    let target = uniform_mgf(t);
    let mut rows = Vec::with_capacity(schedule.len() * xs.len());
    for &n in schedule {
        for &x in xs {
            let scaled = (n as f64).ln() * solver.eval(n, x)?;
            rows.push(ReturningRow {
                t,
                n,
                x,
                scaled,
                target,
                abs_error: (scaled - target).abs(),
            });
        }
    }
    Ok(rows)
}
