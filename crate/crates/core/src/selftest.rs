//! Quick exact-invariant checks for each module, run by the CLI's
//! `--selftest` flag.

use crate::dynamics::{cylinder_interval, pullback, sum_level_set, IntervalUnion};
use crate::error::Result;
use crate::exact::{minkowski_q, rat, ContinuedFraction, MobiusMap, Branch, Rational};
use crate::farey::{farey_enumerate, farey_weighted_mass, TotientTable};
use crate::measures::{ks_distance, stern_unweighted, AtomicMeasure, TargetCdf};
use crate::poincare::{displacement, displacement_ball, displacement_ball_bfs, displacement_via_image, word_length_ball};
use crate::stern_brocot::{
    digit_sum, eigenfunction_residual, even_sequence, kappa_sum, preimage_points,
    SternBrocotLevel,
};
use crate::transfer::{conjugation_residual, transfer_apply_n, TestFunction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
}

fn check(name: &'static str, passed: bool) -> Check {
    Check { name, passed }
}

pub fn exact_core() -> Result<Vec<Check>> {
    let mut round_trip = true;
    for q in 1..=60u64 {
        for p in 1..=q {
            let r = rat(p, q);
            round_trip &= ContinuedFraction::encode(&r)?.value() == r;
        }
    }
    let w = MobiusMap::word(&[Branch::Right, Branch::Left]);
    Ok(vec![
        check("cf round trip q <= 60", round_trip),
        check(
            "derivative of u1∘u0 at 1 is 1/9",
            w.derivative_mag(&rat(1, 1))? == rat(1, 9),
        ),
        check("?(1/3) = 1/4", minkowski_q(&rat(1, 3))? == rat(1, 4)),
    ])
}

pub fn stern_brocot() -> Result<Vec<Check>> {
    let mut digit_sums = true;
    for n in 1..=10 {
        for x in even_sequence(n)? {
            digit_sums &= digit_sum(&x)? == u64::from(n) + 1;
        }
    }
    let mut kappa = true;
    let mut residual = true;
    for x in [rat(1, 2), rat(1, 3), rat(2, 5), rat(3, 7)] {
        for n in 0..=10 {
            kappa &= kappa_sum(&x, n)? * Rational::from_integer(x.numer() * x.denom())
                == rat(1, 1);
            residual &= eigenfunction_residual(&x, n)? == rat(0, 1);
        }
    }
    Ok(vec![
        check("levels <= 14 unimodular", (0..=14).all(|n| {
            SternBrocotLevel::build(n).map(|l| l.is_unimodular()).unwrap_or(false)
        })),
        check(
            "S_n = T^-(n-1)(1/2), n <= 10",
            (1..=10).all(|n| {
                even_sequence(n).ok() == preimage_points(&rat(1, 2), n - 1).ok().map(|p| p.into_points())
            }),
        ),
        check("digit sum n+1 on S_n, n <= 10", digit_sums),
        check("kappa identity, n <= 10", kappa),
        check("eigenfunction residual 0, n <= 10", residual),
    ])
}

pub fn farey() -> Result<Vec<Check>> {
    let table = TotientTable::new(300);
    let mut counts = true;
    for n in [1u64, 7, 50, 300] {
        counts &= farey_enumerate(n)?.entries().len() as u64 == table.prefix_sum(n as usize);
    }
    Ok(vec![
        check("F_300 unimodular", farey_enumerate(300)?.is_unimodular()),
        check("|F_n| = totient sum", counts),
        check("mass(3) = 53/36", farey_weighted_mass(3)? == rat(53, 36)),
    ])
}

pub fn dynamics() -> Result<Vec<Check>> {
    let mut cylinders = true;
    for n in 2..=8u32 {
        let set = sum_level_set(n)?;
        let mut words = Vec::new();
        for x in even_sequence(n - 1)? {
            words.push(cylinder_interval(&ContinuedFraction::encode(&x)?)?);
        }
        words.sort();
        cylinders &= words == set.components();
    }
    let third = IntervalUnion::interval(rat(1, 3), rat(2, 3))?;
    Ok(vec![
        check(
            "sum-level measures 1/2, 1/3, 3/10",
            sum_level_set(1)?.measure() == rat(1, 2)
                && sum_level_set(2)?.measure() == rat(1, 3)
                && sum_level_set(3)?.measure() == rat(3, 10),
        ),
        check(
            "pullback [1/3,2/3]",
            pullback(&third).components() == [(rat(1, 4), rat(2, 5)), (rat(3, 5), rat(3, 4))],
        ),
        check("sum-level components are cylinders, n <= 8", cylinders),
    ])
}

pub fn measures() -> Result<Vec<Check>> {
    let m: AtomicMeasure<Rational> = stern_unweighted(1)?;
    Ok(vec![
        check("KS(delta_1/2, uniform) = 1/2", ks_distance(&m, TargetCdf::Uniform)? == 0.5),
        check(
            "KS(delta_1/2, ?) = 1/2",
            ks_distance(&m, TargetCdf::MinkowskiQ)? == 0.5,
        ),
    ])
}

pub fn transfer() -> Result<Vec<Check>> {
    let mut invariance = true;
    let mut conjugation = true;
    for x in [rat(1, 3), rat(1, 2), rat(3, 4)] {
        for n in 0..=8 {
            invariance &= transfer_apply_n::<Rational>(&TestFunction::One, n, &x)? == rat(1, 1);
        }
        for f in [TestFunction::One, TestFunction::Identity, TestFunction::Reciprocal] {
            conjugation &= conjugation_residual::<Rational>(&f, &x)? == rat(0, 1);
        }
    }
    Ok(vec![
        check("T^n 1 = 1, n <= 8", invariance),
        check("conjugation identity", conjugation),
    ])
}

pub fn poincare() -> Result<Vec<Check>> {
    let ball = word_length_ball(8)?;
    let agree = ball
        .keys()
        .all(|g| (displacement(g) - displacement_via_image(g)).abs() <= 1e-12);
    Ok(vec![
        check("displacement formulas agree, L <= 8", agree),
        check(
            "lattice ball = BFS ball, R = 3",
            displacement_ball(3.0)? == displacement_ball_bfs(3.0)?,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_pass() {
        for group in [
            exact_core(),
            stern_brocot(),
            farey(),
            dynamics(),
            measures(),
            transfer(),
            poincare(),
        ] {
            for c in group.unwrap() {
                assert!(c.passed, "{}", c.name);
            }
        }
    }
}
