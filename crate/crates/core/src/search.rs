//! Reference configurations for small `n`, seeded random point sets and a
//! hill-descent search for planar sets with few peeling sequences.

use std::path::Path;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::lower_bound;
use crate::constructions::build_threeblock;
use crate::error::{Error, Result};
use crate::geometry::pts::{self, RecordError};
use crate::geometry::{int, is_general_position, require_general_position, Point, PointSet, Rational};
use crate::peeling::{count, PeelCount};

/// Exact-count search is limited to this many points.
pub const SEARCH_MAX: usize = 20;
/// Rejection sampling gives up after this many attempts.
pub const MAX_ATTEMPTS: usize = 1_000_000;
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub n: usize,
    pub seed: u64,
    /// Proposals per restart.
    pub iterations: usize,
    /// Initial denominator of coordinates and steps.
    pub coordinate_resolution: u64,
    pub threads: usize,
    pub restarts: usize,
}

impl SearchConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        SearchConfig {
            n,
            seed,
            iterations: 10_000,
            coordinate_resolution: 16,
            threads: 1,
            restarts: DEFAULT_RESTARTS,
        }
    }
}

const FIXED_3: [[i64; 2]; 3] = [[0, 0], [4, 0], [0, 4]];
const FIXED_4: [[i64; 2]; 4] = [[0, 0], [4, 0], [0, 4], [1, 1]];
// Smallest-coordinate minimizers among seeded random sets on the grid
// {-5..5}^2, checked against the brute-force counter. The tests pin the
// hull structure of the 5-point set.
const FIXED_5: [[i64; 2]; 5] = [[-1, 0], [-2, -1], [1, -1], [0, 0], [0, 3]];
const FIXED_6: [[i64; 2]; 6] = [[-1, 0], [1, -1], [1, -2], [3, 1], [5, 2], [0, 0]];

/// Minimum counts for 3 to 6 points.
pub const SMALL_MINIMA: [(usize, u64); 4] = [(3, 6), (4, 18), (5, 60), (6, 180)];

/// General-position sets attaining the minimum count for `3 <= n <= 6`.
pub fn embedded_small_configs(n: usize) -> Result<Vec<PointSet>> {
    let rows: Vec<&[i64]> = match n {
        3 => FIXED_3.iter().map(|p| p.as_slice()).collect(),
        4 => FIXED_4.iter().map(|p| p.as_slice()).collect(),
        5 => FIXED_5.iter().map(|p| p.as_slice()).collect(),
        6 => FIXED_6.iter().map(|p| p.as_slice()).collect(),
        _ => {
            return Err(Error::Precondition(format!(
                "embedded configurations cover 3 <= n <= 6, got {n}"
            )))
        }
    };
    Ok(vec![PointSet::from_int_coords(2, &rows)?])
}

fn grid_coord(rng: &mut ChaCha8Rng, den: u64) -> Rational {
    let k = rng.gen_range(-(den as i64)..=den as i64);
    Rational::new(k.into(), (den as i64).into())
}

/// `n` points in dimension `d` with coordinates `k / r`, `|k| <= r`,
/// resampled until they are distinct and in general position.
pub fn random_point_set(cfg: &SearchConfig, d: usize) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    random_set_from(&mut rng, cfg.n, d, cfg.coordinate_resolution.max(1))
}

fn random_set_from(rng: &mut ChaCha8Rng, n: usize, d: usize, den: u64) -> Result<PointSet> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    for _ in 0..MAX_ATTEMPTS {
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::new((0..d).map(|_| grid_coord(rng, den)).collect()))
            .collect();
        if let Ok(s) = PointSet::from_points(d, pts) {
            if is_general_position(&s) {
                return Ok(s);
            }
        }
    }
    Err(Error::Precondition(format!(
        "no general-position sample of {n} points after {MAX_ATTEMPTS} attempts; raise the resolution"
    )))
}

/// Scales each coordinate independently onto `[-1, 1]`; affine, so the
/// count is unchanged.
fn normalize(s: &PointSet) -> Result<PointSet> {
    let d = s.dim();
    let mut lo = vec![None::<Rational>; d];
    let mut hi = vec![None::<Rational>; d];
    for p in s.points() {
        for j in 0..d {
            let c = p.coord(j);
            if lo[j].as_ref().is_none_or(|v| c < v) {
                lo[j] = Some(c.clone());
            }
            if hi[j].as_ref().is_none_or(|v| c > v) {
                hi[j] = Some(c.clone());
            }
        }
    }
    s.map_points(|p| {
        Point::new(
            (0..d)
                .map(|j| {
                    let (l, h) = (lo[j].as_ref().unwrap(), hi[j].as_ref().unwrap());
                    let w = h - l;
                    if w.is_zero() {
                        int(0)
                    } else {
                        (p.coord(j) - l) * int(2) / w - int(1)
                    }
                })
                .collect(),
        )
    })
}

fn witness_key(s: &PointSet) -> Vec<Vec<Rational>> {
    s.points().iter().map(|p| p.coords().to_vec()).collect()
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub set: PointSet,
    pub count: PeelCount,
    /// The restart that produced the result.
    pub restart: usize,
}

fn sub_seed(seed: u64, restart: usize) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add((restart as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

type Progress<'a> = &'a (dyn Fn(usize, usize, &PeelCount) + Sync);

fn descend(cfg: &SearchConfig, restart: usize, progress: Option<Progress>) -> Result<SearchOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, restart));
    let n = cfg.n;
    let floor = lower_bound(n as u64, 2)?;
    let mut den = cfg.coordinate_resolution.max(1);
    let mut cur = if restart == 0 && n >= 3 {
        normalize(&build_threeblock(n)?.points)?
    } else {
        random_set_from(&mut rng, n, 2, den)?
    };
    let mut best = count(&cur)?;
    let stall_limit = (cfg.iterations / 20).max(50);
    let mut stall = 0;
    for it in 0..cfg.iterations {
        if best.value() <= floor.value() {
            break;
        }
        let i = rng.gen_range(0..n);
        let label = cur.labels()[i];
        let old = cur.points()[i].coords().to_vec();
        let moved: Vec<Rational> = if rng.gen_ratio(1, 10) {
            (0..2).map(|_| grid_coord(&mut rng, den)).collect()
        } else {
            old.iter()
                .map(|c| c + Rational::new(rng.gen_range(-3i64..=3).into(), (den as i64).into()))
                .collect()
        };
        let entries: Vec<(u32, Point)> = cur
            .iter()
            .map(|(l, p)| (l, if l == label { Point::new(moved.clone()) } else { p.clone() }))
            .collect();
        let cand = match PointSet::new(2, entries) {
            Ok(s) if is_general_position(&s) => s,
            _ => continue,
        };
        let c = count(&cand)?;
        if c.value() < best.value() {
            cur = cand;
            best = c;
            stall = 0;
            if let Some(f) = progress {
                f(restart, it, &best);
            }
        } else {
            stall += 1;
            if stall >= stall_limit {
                den = den.saturating_mul(2).min(1 << 40);
                stall = 0;
            }
        }
    }
    assert!(
        best.value() >= floor.value(),
        "search produced a count below the lower bound"
    );
    Ok(SearchOutcome {
        set: cur,
        count: best,
        restart,
    })
}

/// Hill descent on `count(S)` over planar `n`-point sets. Restart 0 starts
/// from the three-block construction, the others from random sets; only
/// strict improvements are accepted and steps are refined on stagnation.
/// The result is the smallest count, ties broken by the lexicographically
/// smallest coordinates, so it does not depend on the thread count.
pub fn perturb_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    perturb_search_with_progress(cfg, None)
}

pub fn perturb_search_with_progress(cfg: &SearchConfig, progress: Option<Progress>) -> Result<SearchOutcome> {
    if cfg.n == 0 || cfg.n > SEARCH_MAX {
        return Err(Error::Precondition(format!(
            "search needs 1 <= n <= {SEARCH_MAX}, got {}",
            cfg.n
        )));
    }
    let restarts = cfg.restarts.max(1);
    let run = || -> Result<Vec<SearchOutcome>> {
        (0..restarts)
            .into_par_iter()
            .map(|r| descend(cfg, r, progress))
            .collect()
    };
    let outcomes = if cfg.threads <= 1 {
        (0..restarts)
            .map(|r| descend(cfg, r, progress))
            .collect::<Result<Vec<_>>>()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Precondition(e.to_string()))?
            .install(run)?
    };
    Ok(outcomes
        .into_iter()
        .min_by(|a, b| {
            a.count
                .value()
                .cmp(b.count.value())
                .then_with(|| witness_key(&a.set).cmp(&witness_key(&b.set)))
        })
        .expect("at least one restart"))
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub sets: Vec<PointSet>,
    /// Records skipped in lenient mode.
    pub skipped: Vec<RecordError>,
}

/// Reads a multi-record `.pts` file. Every record must parse and be in
/// general position; with `lenient`, failing records are skipped and
/// reported instead of aborting.
pub fn ingest_configs(path: &Path, lenient: bool) -> Result<Ingested> {
    let text = std::fs::read_to_string(path)?;
    ingest_text(&text, lenient)
}

pub fn ingest_text(text: &str, lenient: bool) -> Result<Ingested> {
    let mut sets = Vec::new();
    let mut skipped = Vec::new();
    for (first_line, rec) in pts::parse_records_located(text) {
        let checked = rec.and_then(|s| {
            require_general_position(&s).map_err(|e| Error::Parse {
                line: first_line,
                msg: format!("record starting here: {e}"),
            })?;
            Ok(s)
        });
        match checked {
            Ok(s) => sets.push(s),
            Err(error) if lenient => skipped.push(RecordError { first_line, error }),
            Err(e) => return Err(e),
        }
    }
    Ok(Ingested { sets, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::extreme_points;
    use crate::peeling::count_bruteforce;

    #[test]
    fn random_sets_are_deterministic_and_generic() {
        let cfg = SearchConfig::new(8, 42);
        let a = random_point_set(&cfg, 2).unwrap();
        let b = random_point_set(&cfg, 2).unwrap();
        assert_eq!(a, b);
        assert!(is_general_position(&a));
        let c = random_point_set(&SearchConfig::new(8, 43), 2).unwrap();
        assert_ne!(a, c);
        let d3 = random_point_set(&SearchConfig::new(6, 1), 3).unwrap();
        assert_eq!(d3.dim(), 3);
        assert!(is_general_position(&d3));
    }

    #[test]
    fn impossible_sampling_hits_the_cap() {
        let mut cfg = SearchConfig::new(4, 1);
        cfg.coordinate_resolution = 1;
        // the line has only three grid points
        assert!(random_point_set(&cfg, 1).is_err());
    }

    #[test]
    fn embedded_minima() {
        for (n, g) in SMALL_MINIMA {
            for s in embedded_small_configs(n).unwrap() {
                assert!(is_general_position(&s));
                assert_eq!(count_bruteforce(&s).unwrap(), PeelCount::from(g), "n = {n}");
                assert_eq!(count(&s).unwrap(), PeelCount::from(g));
            }
        }
        assert!(embedded_small_configs(2).is_err());
        assert!(embedded_small_configs(7).is_err());
    }

    #[test]
    fn five_point_minimizer_structure() {
        // 60 = 24 + 18 + 18: a triangle with two interior points where one
        // hull vertex leaves a convex quadrilateral and the others leave a
        // triangle with an interior point
        let s = embedded_small_configs(5).unwrap().remove(0);
        let hull = extreme_points(&s).unwrap();
        assert_eq!(hull.len(), 3);
        let mut rest: Vec<usize> = hull
            .iter()
            .map(|&l| extreme_points(&s.without(l).unwrap()).unwrap().len())
            .collect();
        rest.sort_unstable();
        assert_eq!(rest, vec![3, 3, 4]);
        let mut parts: Vec<PeelCount> = hull.iter().map(|&l| count(&s.without(l).unwrap()).unwrap()).collect();
        parts.sort_by(|a, b| a.value().cmp(b.value()));
        assert_eq!(parts, vec![PeelCount::from(18), PeelCount::from(18), PeelCount::from(24)]);
    }

    #[test]
    fn search_small() {
        let out = perturb_search(&SearchConfig::new(4, 1)).unwrap();
        assert_eq!(out.count, PeelCount::from(18));
        assert_eq!(count_bruteforce(&out.set).unwrap(), out.count);
        assert!(perturb_search(&SearchConfig::new(21, 1)).is_err());
    }

    #[test]
    fn ingest_strict_and_lenient() {
        let text = "2 3\n0 0 0\n1 4 0\n2 0 4\n\n2 3\n0 0 0\n0 1 1\n2 2 2\n\n2 2\n0 0 0\n1 1\n";
        assert!(ingest_text(text, false).is_err());
        let got = ingest_text(text, true).unwrap();
        assert_eq!(got.sets.len(), 1);
        assert_eq!(got.skipped.len(), 2);
        let dup = ingest_text("2 2\n0 0 0\n0 1 1\n", false).unwrap_err();
        assert_eq!(dup, Error::Parse { line: 3, msg: "repeated label 0".into() });
    }
}
