#![allow(dead_code)]

use hullpeel::geometry::{is_general_position, Point, PointSet, Rational};
use hullpeel::search::{random_point_set, SearchConfig};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seeded general-position set with coordinates `k / res`.
pub fn random_set(n: usize, d: usize, seed: u64) -> PointSet {
    let mut cfg = SearchConfig::new(n, seed);
    cfg.coordinate_resolution = 64;
    random_point_set(&cfg, d).unwrap()
}

/// `n` points on the parabola `y = x^2`: convex position, no three collinear.
pub fn convex_set(n: usize, seed: u64) -> PointSet {
    let mut r = rng(seed);
    let mut xs: Vec<i64> = (-40..=40).collect();
    xs.shuffle(&mut r);
    let pts = xs[..n]
        .iter()
        .map(|&x| {
            let x = x * 3 + r.gen_range(0..3);
            Point::from_ints(&[x, x * x])
        })
        .collect();
    PointSet::from_points(2, pts).unwrap()
}

/// `k` nested triangles, each rotated against the previous one.
pub fn nested_triangles(k: usize) -> PointSet {
    const LAYERS: [[[i64; 2]; 3]; 3] = [
        [[0, 100], [-90, -50], [95, -55]],
        [[3, 30], [-28, -12], [25, -17]],
        [[-1, 9], [-7, -4], [8, -3]],
    ];
    let pts = LAYERS[..k]
        .iter()
        .flatten()
        .map(|c| Point::from_ints(c))
        .collect();
    let s = PointSet::from_points(2, pts).unwrap();
    assert!(is_general_position(&s));
    s
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
