use sternfarey::measures::{ks_distance, MeasureKind, TargetCdf};
use sternfarey::stern_brocot::mass_rows;

fn ks_sequence(kind: MeasureKind, ns: &[u64]) -> Vec<f64> {
    ns.iter()
        .map(|&n| {
            let m = kind.build::<f64>(n).unwrap().normalized().unwrap();
            ks_distance(&m, TargetCdf::Uniform).unwrap()
        })
        .collect()
}

fn assert_decreasing(xs: &[f64]) {
    assert!(xs.windows(2).all(|w| w[1] < w[0]), "{xs:?}");
}

#[test]
fn unweighted_farey_ks_decreases() {
    let ks = ks_sequence(MeasureKind::FareyUnweighted, &[50, 200, 1000]);
    assert_decreasing(&ks);
    // the gap at 0 alone is 1/n
    assert!((ks[2] - 1e-3).abs() < 1e-12);
}

#[test]
fn weighted_farey_ks_decreases() {
    assert_decreasing(&ks_sequence(MeasureKind::FareyWeighted, &[100, 1_000, 10_000]));
}

#[test]
fn weighted_stern_ks_decreases() {
    let ks = ks_sequence(MeasureKind::SternWeighted, &[10, 14, 18, 22]);
    assert_decreasing(&ks);
    assert!(ks[3] < 0.05);
}

#[test]
fn stern_mass_log_band() {
    // frozen from runs up to n = 20: mass·ln n stays in [0.25, 0.5] and grows slowly
    let schedule: Vec<u32> = (4..=20).step_by(2).collect();
    let rows = mass_rows(&schedule, 0).unwrap();
    for r in &rows {
        assert!((0.25..=0.5).contains(&r.mass_log_n), "n={} {}", r.n, r.mass_log_n);
    }
    assert!(rows.windows(2).all(|w| w[1].mass_log_n > w[0].mass_log_n));
}
