mod common;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;

use common::rational;
use hullpeel::geometry::{extreme_points, flatten, is_general_position, shear, Point, PointSet};
use hullpeel::peeling::{count, count_bruteforce, count_layer_sequences, count_with_threads, PeelCount};

fn planar(max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec((-40i64..=40, -40i64..=40), 1..=max).prop_filter_map("general position", |c| {
        let pts = c.iter().map(|&(x, y)| Point::from_ints(&[x, y])).collect();
        PointSet::from_points(2, pts).ok().filter(is_general_position)
    })
}

fn spatial(max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec((-20i64..=20, -20i64..=20, -20i64..=20), 4..=max).prop_filter_map("general position", |c| {
        let pts = c.iter().map(|&(x, y, z)| Point::from_ints(&[x, y, z])).collect();
        PointSet::from_points(3, pts).ok().filter(is_general_position)
    })
}

/// An invertible rational affine map `p -> A p + b` with `det A != 0`.
fn affine() -> impl Strategy<Value = ([i64; 4], [i64; 2], i64)> {
    ([-5i64..=5, -5..=5, -5..=5, -5..=5], [-9i64..=9, -9..=9], 1i64..=7)
        .prop_filter("invertible", |(a, _, _)| a[0] * a[3] - a[1] * a[2] != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_agrees(s in planar(8)) {
        prop_assert_eq!(count(&s).unwrap(), count_bruteforce(&s).unwrap());
    }

    #[test]
    fn oracle_agrees_in_space(s in spatial(7)) {
        prop_assert_eq!(count(&s).unwrap(), count_bruteforce(&s).unwrap());
    }

    #[test]
    fn affine_maps_preserve_count((a, b, den) in affine(), s in planar(8)) {
        let t = s.map_points(|p| {
            let (x, y) = (p.coord(0), p.coord(1));
            Point::new(vec![
                (x * rational(a[0], den) + y * rational(a[1], den)) + rational(b[0], 1),
                (x * rational(a[2], den) + y * rational(a[3], den)) + rational(b[1], 1),
            ])
        }).unwrap();
        prop_assert_eq!(count(&s).unwrap(), count(&t).unwrap());
    }

    #[test]
    fn scaling_shear_flatten_preserve_count(s in planar(8), k in 1i64..=9, e in 1u32..=40) {
        let c = count(&s).unwrap();
        prop_assert_eq!(&c, &count(&s.scale(&rational(k, 7)).unwrap()).unwrap());
        prop_assert_eq!(&c, &count(&shear(&s, &rational(k, 3)).unwrap()).unwrap());
        let eps = rational(1, 1) / rational(1i64 << (e % 40), 1);
        prop_assert_eq!(&c, &count(&flatten(&s, &eps).unwrap()).unwrap());
    }

    #[test]
    fn recurrence_over_extreme_points(s in planar(8)) {
        let total: BigUint = extreme_points(&s)
            .unwrap()
            .into_iter()
            .map(|l| count(&s.without(l).unwrap()).unwrap().into_inner())
            .sum();
        let want = if s.len() == 1 { BigUint::from(1u32) } else { total };
        prop_assert_eq!(count(&s).unwrap().into_inner(), want);
    }

    #[test]
    fn removing_points_never_increases(s in planar(8), drop in any::<prop::sample::Index>()) {
        prop_assume!(s.len() >= 2);
        let l = s.labels()[drop.index(s.len())];
        prop_assert!(count(&s.without(l).unwrap()).unwrap() <= count(&s).unwrap());
    }

    #[test]
    fn layers_bound_count(s in planar(9)) {
        prop_assert!(count_layer_sequences(&s).unwrap() <= count(&s).unwrap());
    }

    #[test]
    fn divisibility(s in planar(9), t in spatial(8)) {
        if s.len() >= 3 {
            prop_assert!((count(&s).unwrap().into_inner() % 6u32).is_zero());
        }
        prop_assert!((count(&t).unwrap().into_inner() % 24u32).is_zero());
    }

    #[test]
    fn thread_count_is_irrelevant(s in planar(10), threads in 2usize..=8) {
        prop_assert_eq!(count_with_threads(&s, 1).unwrap(), count_with_threads(&s, threads).unwrap());
    }

    #[test]
    fn relabeling_is_irrelevant(s in planar(8), shift in 1u32..1000) {
        let entries = s.iter().map(|(l, p)| (l * 7 + shift, p.clone())).collect();
        let t = PointSet::new(2, entries).unwrap();
        prop_assert_eq!(count(&s).unwrap(), count(&t).unwrap());
        let keep: BTreeSet<u32> = t.labels().iter().copied().take(s.len() / 2 + 1).collect();
        prop_assert!(count(&t.subset(&keep).unwrap()).unwrap() <= count(&t).unwrap());
    }
}

#[test]
fn convex_position_is_factorial() {
    for n in 1..=9 {
        let s = common::convex_set(n, 7);
        let f: BigUint = (1..=n as u32).map(BigUint::from).product();
        assert_eq!(count(&s).unwrap(), PeelCount::new(f));
    }
}
