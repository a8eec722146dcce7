use proptest::prelude::*;
use sternfarey::dynamics::{
    cylinder_interval, farey_map, pullback, sum_level_set, IntervalUnion,
};
use sternfarey::exact::{minkowski_q, rat, ContinuedFraction, Rational};
use sternfarey::stern_brocot::{even_sequence, preimage_points, SternBrocotLevel};
use sternfarey::transfer::{transfer_apply_n, TestFunction};

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1u64..300).prop_flat_map(|q| (1..=q).prop_map(move |p| rat(p, q)))
}

fn interval_union() -> impl Strategy<Value = IntervalUnion> {
    prop::collection::vec((unit_rational(), unit_rational()), 1..4).prop_filter_map(
        "degenerate",
        |pairs| {
            let ivs: Vec<_> = pairs
                .into_iter()
                .filter(|(a, b)| a != b)
                .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
                .collect();
            if ivs.is_empty() {
                None
            } else {
                IntervalUnion::from_intervals(ivs).ok()
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn pullback_is_the_preimage(u in interval_union(), xs in prop::collection::vec(unit_rational(), 40)) {
        let pre = pullback(&u);
        // probe the component endpoints and midpoints as well as random points
        let mut probes = xs;
        for (lo, hi) in pre.components() {
            probes.push(lo.clone());
            probes.push(hi.clone());
            probes.push((lo + hi) / rat(2, 1));
        }
        for x in probes {
            let image = farey_map(&x).unwrap();
            prop_assert_eq!(pre.contains(&x), u.contains(&image), "x = {}", x);
        }
        // both inverse branches contract
        prop_assert!(pre.measure() <= u.measure() * rat(2, 1));
    }

    #[test]
    fn minkowski_is_symmetric_and_monotone(x in unit_rational(), y in unit_rational()) {
        let one = rat(1, 1);
        prop_assert_eq!(minkowski_q(&x).unwrap() + minkowski_q(&(&one - &x)).unwrap(), one);
        if x < y {
            prop_assert!(minkowski_q(&x).unwrap() < minkowski_q(&y).unwrap());
        }
    }

    #[test]
    fn transfer_fixes_constants(x in unit_rational(), n in 0u32..8) {
        let v: Rational = transfer_apply_n(&TestFunction::One, n, &x).unwrap();
        prop_assert_eq!(v, rat(1, 1));
    }

    #[test]
    fn preimages_map_back(x in unit_rational(), n in 0u32..7) {
        for p in preimage_points(&x, n).unwrap().points() {
            let mut y = p.clone();
            for _ in 0..n {
                y = farey_map(&y).unwrap();
            }
            prop_assert_eq!(&y, &x);
        }
    }
}

#[test]
fn sum_level_components_are_cylinders() {
    for n in 2..=12u32 {
        let set = sum_level_set(n).unwrap();
        let mut cylinders: Vec<_> = even_sequence(n - 1)
            .unwrap()
            .iter()
            .map(|r| cylinder_interval(&ContinuedFraction::encode(r).unwrap()).unwrap())
            .collect();
        cylinders.sort();
        assert_eq!(set.components(), &cylinders[..], "n = {n}");
        assert_eq!(set.len(), 1 << (n - 2));
    }
    assert_eq!(sum_level_set(1).unwrap().components(), [(rat(1, 2), rat(1, 1))]);
}

#[test]
fn even_sequence_is_preimage_tree() {
    // S_n is the set of depth-(n−1) preimages of 1/2
    for n in 1..=12u32 {
        let mut pre = preimage_points(&rat(1, 2), n - 1).unwrap().into_points();
        pre.sort();
        assert_eq!(even_sequence(n).unwrap(), pre, "n = {n}");
    }
}

#[test]
fn stern_levels_nest() {
    let mut level = SternBrocotLevel::build(0).unwrap();
    for n in 1..=10u32 {
        let next = level.next();
        assert_eq!(next.entries().len(), (1 << n) + 1);
        assert!(next.is_unimodular());
        assert!(level.entries().iter().all(|x| next.entries().binary_search(x).is_ok()));
        level = next;
    }
}
