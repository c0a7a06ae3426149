//! Exact rational geometry: points, general-position checks, hulls, extreme
//! points, convex layers, and the affine maps used by the constructions.

pub mod kernel;
pub mod lp;
pub mod pts;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use kernel::Kernel;

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    coords: Vec<Rational>,
}

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point::new(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Rational {
        &self.coords[i]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A labeled configuration of pairwise distinct points sharing one dimension.
///
/// General position is not enforced at construction; operations that need it
/// check it and report the offending tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    labels: Vec<u32>,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(dim: usize, entries: Vec<(u32, Point)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut seen_labels = HashMap::with_capacity(entries.len());
        let mut seen_points: HashMap<&Point, u32> = HashMap::with_capacity(entries.len());
        for (label, p) in &entries {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if seen_labels.insert(*label, ()).is_some() {
                return Err(Error::DuplicateLabel(*label));
            }
            if let Some(other) = seen_points.insert(p, *label) {
                return Err(Error::DuplicatePoint(other, *label));
            }
        }
        let (labels, points) = entries.into_iter().unzip();
        Ok(PointSet {
            dim,
            labels,
            points,
        })
    }

    /// Points labeled `0..n` in the given order.
    pub fn from_points(dim: usize, points: Vec<Point>) -> Result<Self> {
        PointSet::new(dim, (0u32..).zip(points).collect())
    }

    pub fn from_int_coords(dim: usize, coords: &[&[i64]]) -> Result<Self> {
        PointSet::from_points(dim, coords.iter().map(|c| Point::from_ints(c)).collect())
    }

    pub fn empty(dim: usize) -> Self {
        PointSet {
            dim,
            labels: Vec::new(),
            points: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Point)> {
        self.labels.iter().copied().zip(self.points.iter())
    }

    pub fn index_of(&self, label: u32) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn point(&self, label: u32) -> Option<&Point> {
        self.index_of(label).map(|i| &self.points[i])
    }

    pub fn label_set(&self) -> BTreeSet<u32> {
        self.labels.iter().copied().collect()
    }

    /// Sub-configuration on the given labels, in this set's order.
    pub fn subset(&self, keep: &BTreeSet<u32>) -> Result<PointSet> {
        for l in keep {
            if self.index_of(*l).is_none() {
                return Err(Error::UnknownLabel(*l));
            }
        }
        let entries = self
            .iter()
            .filter(|(l, _)| keep.contains(l))
            .map(|(l, p)| (l, p.clone()))
            .collect();
        PointSet::new(self.dim, entries)
    }

    pub fn without(&self, label: u32) -> Result<PointSet> {
        let mut keep = self.label_set();
        if !keep.remove(&label) {
            return Err(Error::UnknownLabel(label));
        }
        self.subset(&keep)
    }

    /// Applies `f` to every point, keeping labels.
    pub fn map_points(&self, f: impl Fn(&Point) -> Point) -> Result<PointSet> {
        let entries = self.iter().map(|(l, p)| (l, f(p))).collect();
        PointSet::new(self.dim, entries)
    }

    pub fn kernel(&self) -> Kernel {
        Kernel::new(self.dim, &self.points)
    }

    /// Multiplies every coordinate by a positive rational.
    pub fn scale(&self, factor: &Rational) -> Result<PointSet> {
        if !factor.is_positive() {
            return Err(Error::Precondition(format!("scale factor {factor} is not positive")));
        }
        self.map_points(|p| Point::new(p.coords().iter().map(|c| c * factor).collect()))
    }
}

/// Convex layers, outermost first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerDecomposition {
    pub layers: Vec<BTreeSet<u32>>,
}

impl LayerDecomposition {
    pub fn sizes(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.len()).collect()
    }
}

/// Sign of the orientation determinant of `(q - p, r - p)`: `+1` for a
/// counterclockwise turn, `-1` clockwise, `0` collinear.
pub fn orientation(p: &Point, q: &Point, r: &Point) -> Result<i8> {
    for x in [p, q, r] {
        if x.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: x.dim(),
            });
        }
    }
    let ax = q.coord(0) - p.coord(0);
    let ay = q.coord(1) - p.coord(1);
    let bx = r.coord(0) - p.coord(0);
    let by = r.coord(1) - p.coord(1);
    let det = ax * by - ay * bx;
    Ok(if det.is_zero() {
        0
    } else if det.is_positive() {
        1
    } else {
        -1
    })
}

/// First affinely dependent tuple found, as labels; `None` in general position.
pub fn general_position_violation(s: &PointSet) -> Option<Vec<u32>> {
    let n = s.len();
    let k = (s.dim() + 1).min(n);
    if k <= 1 {
        return None;
    }
    let kernel = s.kernel();
    let all: Vec<usize> = (0..n).collect();
    let mut found = None;
    let mut pick = Vec::with_capacity(k);
    kernel::any_subset(&all, k, &mut pick, &mut |tuple| {
        let degenerate = if k == s.dim() + 1 {
            kernel.orient(tuple) == 0
        } else {
            kernel.affine_rank(tuple) < k - 1
        };
        if degenerate {
            found = Some(tuple.iter().map(|&i| s.labels()[i]).collect());
        }
        degenerate
    });
    found
}

pub fn is_general_position(s: &PointSet) -> bool {
    general_position_violation(s).is_none()
}

pub fn require_general_position(s: &PointSet) -> Result<()> {
    match general_position_violation(s) {
        Some(labels) => Err(Error::Degenerate { labels }),
        None => Ok(()),
    }
}

fn require_dim(s: &PointSet, d: usize) -> Result<()> {
    if s.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: s.dim(),
        });
    }
    Ok(())
}

/// Hull vertex labels in counterclockwise order; sets of at most two points
/// come back in input order.
pub fn convex_hull_2d(s: &PointSet) -> Result<Vec<u32>> {
    require_dim(s, 2)?;
    if s.len() <= 2 {
        return Ok(s.labels().to_vec());
    }
    require_general_position(s)?;
    let k = s.kernel();
    Ok(k.hull_sorted(k.order())
        .into_iter()
        .map(|i| s.labels()[i])
        .collect())
}

pub fn is_extreme(label: u32, s: &PointSet) -> Result<bool> {
    let i = s.index_of(label).ok_or(Error::UnknownLabel(label))?;
    require_general_position(s)?;
    if s.dim() == 2 {
        return Ok(convex_hull_2d(s)?.contains(&label));
    }
    if s.len() <= s.dim() + 1 {
        return Ok(true);
    }
    let k = s.kernel();
    let all: Vec<usize> = (0..s.len()).collect();
    Ok(!k.in_hull_of(i, &all))
}

pub fn extreme_points(s: &PointSet) -> Result<BTreeSet<u32>> {
    require_general_position(s)?;
    let k = s.kernel();
    let all: Vec<usize> = (0..s.len()).collect();
    Ok(k.extreme_indices(&all)
        .into_iter()
        .map(|i| s.labels()[i])
        .collect())
}

/// Iterated removal of all extreme points.
pub fn convex_layers(s: &PointSet) -> Result<LayerDecomposition> {
    require_general_position(s)?;
    let k = s.kernel();
    let mut remaining: Vec<usize> = (0..s.len()).collect();
    let mut layers = Vec::new();
    while !remaining.is_empty() {
        let ext = k.extreme_indices(&remaining);
        layers.push(ext.iter().map(|&i| s.labels()[i]).collect());
        remaining.retain(|i| ext.binary_search(i).is_err());
    }
    Ok(LayerDecomposition { layers })
}

/// `(x_1, x_2, ..., x_d) -> (x_1, eps x_2, ..., eps x_d)`.
pub fn flatten(s: &PointSet, eps: &Rational) -> Result<PointSet> {
    if !eps.is_positive() {
        return Err(Error::NonPositiveEpsilon(eps.to_string()));
    }
    s.map_points(|p| {
        let mut c = p.coords().to_vec();
        for x in c.iter_mut().skip(1) {
            *x *= eps;
        }
        Point::new(c)
    })
}

/// `x_1 -> x_1 + lambda x_2 + lambda^2 x_3 + ...`, other coordinates fixed.
pub fn shear(s: &PointSet, lambda: &Rational) -> Result<PointSet> {
    s.map_points(|p| Point::new(shear_coords(p.coords(), lambda)))
}

fn shear_coords(c: &[Rational], lambda: &Rational) -> Vec<Rational> {
    let mut out = c.to_vec();
    let mut factor = lambda.clone();
    for x in &c[1..] {
        out[0] += &factor * x;
        factor *= lambda;
    }
    out
}

/// Smallest nonnegative integer shear parameter making all first coordinates
/// distinct. Only finitely many parameters collide two distinct points, so
/// the search terminates.
pub fn shear_parameter(s: &PointSet) -> Rational {
    let mut lambda = 0i64;
    loop {
        let l = int(lambda);
        let mut firsts: Vec<Rational> = s
            .points()
            .iter()
            .map(|p| shear_coords(p.coords(), &l).swap_remove(0))
            .collect();
        firsts.sort();
        if firsts.windows(2).all(|w| w[0] != w[1]) {
            return l;
        }
        lambda += 1;
    }
}

pub fn shear_to_distinct_first_coord(s: &PointSet) -> Result<PointSet> {
    shear(s, &shear_parameter(s))
}
