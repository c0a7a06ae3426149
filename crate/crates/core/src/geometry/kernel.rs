//! Integer predicate kernel.
//!
//! Coordinates are multiplied by the least common multiple of all
//! denominators. A positive rescaling changes no orientation sign, hull, or
//! convex-combination feasibility, so every predicate below runs on integers.
//! When magnitudes allow, determinants are evaluated in `i128` without
//! overflow; otherwise fraction-free elimination on big integers is used.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{lp, Point};

#[derive(Debug, Clone)]
pub struct Kernel {
    dim: usize,
    big: Vec<Vec<BigInt>>,
    small: Option<Vec<Vec<i128>>>,
    /// Point indices in lexicographic coordinate order.
    order: Vec<usize>,
}

impl Kernel {
    pub fn new(dim: usize, points: &[Point]) -> Self {
        let mut lcm = BigInt::one();
        for p in points {
            for c in p.coords() {
                lcm = lcm.lcm(c.denom());
            }
        }
        let big: Vec<Vec<BigInt>> = points
            .iter()
            .map(|p| {
                p.coords()
                    .iter()
                    .map(|c| c.numer() * (&lcm / c.denom()))
                    .collect()
            })
            .collect();
        let bits = big
            .iter()
            .flat_map(|row| row.iter().map(|c| c.bits()))
            .max()
            .unwrap_or(0);
        let small_ok = match dim {
            1 | 2 => bits <= 61,
            3 => bits <= 40,
            _ => false,
        };
        let small = small_ok.then(|| {
            big.iter()
                .map(|row| row.iter().map(|c| c.to_i128().unwrap()).collect())
                .collect()
        });
        let mut order: Vec<usize> = (0..big.len()).collect();
        order.sort_by(|&a, &b| big[a].cmp(&big[b]));
        Kernel {
            dim,
            big,
            small,
            order,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.big.len()
    }

    pub fn is_empty(&self) -> bool {
        self.big.is_empty()
    }

    pub fn coords(&self, i: usize) -> &[BigInt] {
        &self.big[i]
    }

    /// Indices sorted lexicographically by coordinates.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Sign of `det[p1 - p0, ..., pd - p0]` for exactly `dim + 1` indices.
    pub fn orient(&self, idx: &[usize]) -> i8 {
        debug_assert_eq!(idx.len(), self.dim + 1);
        if let Some(s) = &self.small {
            match self.dim {
                1 => return sign_i128(s[idx[1]][0] - s[idx[0]][0]),
                2 => return orient2_small(&s[idx[0]], &s[idx[1]], &s[idx[2]]),
                3 => return orient3_small(&s[idx[0]], &s[idx[1]], &s[idx[2]], &s[idx[3]]),
                _ => {}
            }
        }
        let base = &self.big[idx[0]];
        let rows: Vec<Vec<BigInt>> = idx[1..]
            .iter()
            .map(|&i| {
                self.big[i]
                    .iter()
                    .zip(base)
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        bareiss_sign(rows)
    }

    /// Like [`Kernel::orient`] with index `slot` replaced by the point `q`.
    fn orient_replaced(&self, idx: &[usize], slot: usize, q: usize) -> i8 {
        let mut v = idx.to_vec();
        v[slot] = q;
        self.orient(&v)
    }

    /// Counterclockwise hull vertices of the planar subset given by `sorted`,
    /// which must already be in [`Kernel::order`] order. General position is
    /// assumed; fewer than three points are returned unchanged.
    pub fn hull_sorted(&self, sorted: &[usize]) -> Vec<usize> {
        debug_assert_eq!(self.dim, 2);
        if sorted.len() <= 2 {
            return sorted.to_vec();
        }
        let mut hull: Vec<usize> = Vec::with_capacity(sorted.len() + 1);
        for &p in sorted {
            while hull.len() >= 2 && self.orient(&[hull[hull.len() - 2], hull[hull.len() - 1], p]) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        let lower = hull.len() + 1;
        for &p in sorted.iter().rev().skip(1) {
            while hull.len() >= lower && self.orient(&[hull[hull.len() - 2], hull[hull.len() - 1], p]) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        hull
    }

    /// Extreme points of the subset `mask` (bit `i` = point `i`, so at most 64
    /// points). Points in `hint` are known to be extreme already; this is
    /// valid whenever `hint` came from a superset of `mask`.
    pub fn extreme_mask(&self, mask: u64, hint: u64) -> u64 {
        let m = mask.count_ones() as usize;
        if m <= self.dim + 1 {
            return mask;
        }
        if self.dim == 2 {
            let sorted: Vec<usize> = self
                .order
                .iter()
                .copied()
                .filter(|&i| mask >> i & 1 == 1)
                .collect();
            return self
                .hull_sorted(&sorted)
                .into_iter()
                .fold(0u64, |acc, i| acc | 1 << i);
        }
        let members: Vec<usize> = (0..self.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let idx = self.extreme_among(&members, hint & mask);
        idx.into_iter().fold(0u64, |acc, i| acc | 1 << i)
    }

    /// Extreme points (ascending index) of an arbitrary index subset.
    pub fn extreme_indices(&self, members: &[usize]) -> Vec<usize> {
        if members.len() <= self.dim + 1 {
            let mut v = members.to_vec();
            v.sort_unstable();
            return v;
        }
        if self.dim == 2 {
            let mut inside = vec![false; self.len()];
            for &i in members {
                inside[i] = true;
            }
            let sorted: Vec<usize> = self.order.iter().copied().filter(|&i| inside[i]).collect();
            let mut h = self.hull_sorted(&sorted);
            h.sort_unstable();
            return h;
        }
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        self.extreme_among(&sorted, 0)
    }

    fn extreme_among(&self, members: &[usize], hint: u64) -> Vec<usize> {
        // The lexicographic minimum and maximum are always extreme.
        let lo = members
            .iter()
            .copied()
            .min_by(|&a, &b| self.big[a].cmp(&self.big[b]))
            .unwrap();
        let hi = members
            .iter()
            .copied()
            .max_by(|&a, &b| self.big[a].cmp(&self.big[b]))
            .unwrap();
        members
            .iter()
            .copied()
            .filter(|&i| {
                if i == lo || i == hi || (i < 64 && hint >> i & 1 == 1) {
                    return true;
                }
                !self.in_hull_of(i, members)
            })
            .collect()
    }

    /// Exact LP test: is point `i` a convex combination of the other members?
    pub fn in_hull_of(&self, i: usize, members: &[usize]) -> bool {
        let others: Vec<&[BigInt]> = members
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| self.big[j].as_slice())
            .collect();
        lp::in_convex_hull(&self.big[i], &others)
    }

    /// Strict interior test of point `q` in the simplex spanned by `simplex`
    /// (`dim + 1` affinely independent points).
    pub fn strictly_inside_simplex(&self, q: usize, simplex: &[usize]) -> bool {
        let s = self.orient(simplex);
        if s == 0 {
            return false;
        }
        (0..simplex.len()).all(|slot| self.orient_replaced(simplex, slot, q) == s)
    }

    /// Brute-force extremality without hulls or LP: in the plane a point is
    /// extreme iff some line through it and another member has every other
    /// member strictly on one side; in higher dimension iff it lies in no
    /// simplex spanned by other members (Carathéodory plus general position).
    pub fn naive_is_extreme(&self, i: usize, members: &[usize]) -> bool {
        let others: Vec<usize> = members.iter().copied().filter(|&j| j != i).collect();
        if others.len() <= self.dim {
            return true;
        }
        if self.dim == 2 {
            return others.iter().any(|&q| {
                let mut side = 0i8;
                others.iter().filter(|&&r| r != q).all(|&r| {
                    let s = self.orient(&[i, q, r]);
                    if side == 0 {
                        side = s;
                    }
                    s != 0 && s == side
                })
            });
        }
        let k = self.dim + 1;
        let mut pick = Vec::with_capacity(k);
        !any_subset(&others, k, &mut pick, &mut |simplex| {
            self.strictly_inside_simplex(i, simplex)
        })
    }

    /// Rank of the affine hull of the given points (number of independent
    /// difference vectors).
    pub fn affine_rank(&self, idx: &[usize]) -> usize {
        if idx.len() <= 1 {
            return 0;
        }
        let base = &self.big[idx[0]];
        let rows: Vec<Vec<BigInt>> = idx[1..]
            .iter()
            .map(|&i| self.big[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        rank(rows)
    }
}

/// Calls `f` on every `k`-subset of `items` until it returns true.
pub(crate) fn any_subset(
    items: &[usize],
    k: usize,
    pick: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if pick.len() == k {
        return f(pick);
    }
    let need = k - pick.len();
    let start = 0;
    for s in start..items.len() {
        if items.len() - s < need {
            break;
        }
        pick.push(items[s]);
        let hit = any_subset(&items[s + 1..], k, pick, f);
        pick.pop();
        if hit {
            return true;
        }
    }
    false
}

fn sign_i128(v: i128) -> i8 {
    v.signum() as i8
}

fn orient2_small(p: &[i128], q: &[i128], r: &[i128]) -> i8 {
    let (ax, ay) = (q[0] - p[0], q[1] - p[1]);
    let (bx, by) = (r[0] - p[0], r[1] - p[1]);
    sign_i128(ax * by - ay * bx)
}

fn orient3_small(p: &[i128], q: &[i128], r: &[i128], s: &[i128]) -> i8 {
    let a = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
    let b = [r[0] - p[0], r[1] - p[1], r[2] - p[2]];
    let c = [s[0] - p[0], s[1] - p[1], s[2] - p[2]];
    let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0]);
    sign_i128(det)
}

/// Sign of the determinant of a square integer matrix (Bareiss elimination).
pub(crate) fn bareiss_sign(mut m: Vec<Vec<BigInt>>) -> i8 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return 0;
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let last = &m[n - 1][n - 1];
    if last.is_zero() {
        0
    } else if last.is_negative() {
        -sign
    } else {
        sign
    }
}

/// Rank of an integer matrix by fraction-free elimination.
fn rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let (a, b) = (m[r][c].clone(), m[i][c].clone());
            for j in c..cols {
                let v = &m[i][j] * &a - &m[r][j] * &b;
                m[i][j] = v;
            }
        }
        r += 1;
    }
    r
}
