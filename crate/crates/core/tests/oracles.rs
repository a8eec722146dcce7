use num_integer::Integer;
use sternfarey::dynamics::restricted_preimage;
use sternfarey::exact::{rat, Rational};
use sternfarey::farey::{farey_weighted_mass, mass_deviation};
use sternfarey::measures::{ks_distance, restricted_mgf, stern_weighted, TargetCdf};
use sternfarey::poincare::{displacement_ball, displacement_ball_bfs};
use sternfarey::transfer::{transfer_apply_n_f64, ReturningSolver, TestFunction};
use sternfarey::Scalar;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn renewal_solver_matches_tree_sum() {
    for t in [-1.0, -0.3, 0.0, 0.7, 1.0] {
        let solver = ReturningSolver::phi_t(t, 20).unwrap();
        for n in [1, 2, 5, 9, 13, 17, 20] {
            for x in [0.05, 1.0 / 3.0, 0.5, 0.81, 1.0] {
                let tree = transfer_apply_n_f64(&TestFunction::PhiT(t), n as u32, x).unwrap();
                let fast = solver.eval(n, x).unwrap();
                assert!(
                    (tree - fast).abs() < 1e-11 * tree.abs().max(1.0),
                    "t={t} n={n} x={x}: {tree} vs {fast}"
                );
            }
        }
    }
}

#[test]
fn restricted_mgf_matches_quadrature() {
    let (alpha, beta) = (rat(1, 3), rat(3, 4));
    for n in [0, 1, 3, 6] {
        let set = restricted_preimage(&alpha, &beta, n).unwrap();
        for t in [-2.0, 0.0, 0.5, 3.0] {
            let mut integral = 0.0;
            let mut length = 0.0;
            for (lo, hi) in set.components() {
                let (a, b) = (lo.to_f64(), hi.to_f64());
                integral += simpson(|x| (t * x).exp(), a, b, 1024);
                length += b - a;
            }
            let got = restricted_mgf(&alpha, &beta, n, t).unwrap();
            assert!((got - integral / length).abs() < 1e-10, "n={n} t={t}");
        }
    }
}

#[test]
fn farey_mass_matches_gcd_count() {
    for n in [1u64, 2, 7, 30, 97] {
        let mut naive = rat(0, 1);
        for q in 1..=n {
            let coprime = (1..=q).filter(|p| p.gcd(&q) == 1).count() as u64;
            naive += rat(coprime, q * q);
        }
        assert_eq!(farey_weighted_mass(n).unwrap(), naive, "n = {n}");
    }
}

#[test]
fn farey_deviation_is_cauchy() {
    let rows = mass_deviation(&[10_000, 100_000, 1_000_000]).unwrap();
    let gaps: Vec<f64> = rows.windows(2).map(|w| (w[1].2 - w[0].2).abs()).collect();
    assert!(gaps[1] < gaps[0], "{gaps:?}");
    assert!(gaps[1] < 1e-4, "{gaps:?}");
}

#[test]
fn lattice_ball_matches_bfs() {
    for r in [0.5, 1.0, 2.0, 3.5, 4.0, 5.0, 6.0] {
        let mut lattice: Vec<_> = displacement_ball(r).unwrap().iter().map(|g| g.entries()).collect();
        let mut bfs: Vec<_> = displacement_ball_bfs(r).unwrap().iter().map(|g| g.entries()).collect();
        lattice.sort_unstable();
        bfs.sort_unstable();
        assert_eq!(lattice, bfs, "R = {r}");
    }
}

#[test]
fn ks_matches_brute_force() {
    let m = stern_weighted::<Rational>(6).unwrap().normalized().unwrap();
    let mut cum = rat(0, 1);
    let mut sup: f64 = 0.0;
    for (x, w) in m.atoms() {
        let f = x.to_f64();
        sup = sup.max((cum.to_f64() - f).abs());
        cum += w;
        sup = sup.max((cum.to_f64() - f).abs());
    }
    let ks = ks_distance(&m, TargetCdf::Uniform).unwrap();
    assert!((ks - sup).abs() < 1e-14, "{ks} vs {sup}");
}

#[test]
fn exact_and_float_measures_agree_at_depth_16() {
    let exact = stern_weighted::<Rational>(16).unwrap();
    let float = stern_weighted::<f64>(16).unwrap();
    assert!((exact.total_mass() - float.total_mass()).abs() < 1e-13);
    for target in [TargetCdf::Uniform, TargetCdf::MinkowskiQ] {
        let e = ks_distance(&exact.normalized().unwrap(), target).unwrap();
        let f = ks_distance(&float.normalized().unwrap(), target).unwrap();
        assert!((e - f).abs() < 1e-12, "{e} vs {f}");
    }
}
