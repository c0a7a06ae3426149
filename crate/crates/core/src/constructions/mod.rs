//! Recursive point sets with few peeling sequences.
//!
//! Each construction places flattened copies of smaller constructions along
//! rays from a common origin, shears the result so first coordinates are
//! distinct, and flattens it. The flattening factor applied to the copies is
//! found by halving until the assembled set passes the block invariant.

mod blocks;
mod certify;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

pub use blocks::{BlockNode, BlockTree};
pub use certify::{verify_invariant, Mode};

use crate::error::{Error, Result};
use crate::geometry::{flatten, int, is_general_position, rat, shear_to_distinct_first_coord, Point, PointSet, Rational};
use crate::report::{ReportItem, VerificationReport};

/// Largest flattening exponent tried before giving up.
pub const MAX_EPS_EXPONENT: u32 = 128;
/// Sets up to this size are certified exhaustively.
pub const EXHAUSTIVE_MAX: usize = 12;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const MAX_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Ternary,
    Threeblock,
    Simplex,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Ternary => "ternary",
            Kind::Threeblock => "threeblock",
            Kind::Simplex => "simplex",
        })
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ternary" => Ok(Kind::Ternary),
            "threeblock" => Ok(Kind::Threeblock),
            "simplex" => Ok(Kind::Simplex),
            _ => Err(Error::Precondition(format!("unknown construction {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionSpec {
    pub kind: Kind,
    /// Recursion depth (ternary, simplex).
    pub k: Option<u32>,
    pub n: usize,
    pub d: usize,
    /// `eps_schedule[i]` flattens the copies placed at recursion depth `i`
    /// (depth 0 is the top assembly). Where copies at one depth differ, the
    /// smallest factor is listed.
    pub eps_schedule: Vec<Rational>,
    /// Flattening applied to the final set.
    pub output_eps: Rational,
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub spec: ConstructionSpec,
    pub points: PointSet,
    pub blocks: BlockTree,
    /// Per-node factor used to flatten that node's copies, `None` for nodes
    /// that are not assemblies. Indexed like `blocks`.
    pub node_eps: Vec<Option<Rational>>,
    pub certification: VerificationReport,
}

impl Construction {
    pub fn certified(&self) -> bool {
        self.certification.all_proved()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Random walks per assembly above the exhaustive size.
    pub samples: usize,
    pub seed: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

impl BuildOptions {
    fn mode(&self, n: usize) -> Mode {
        if n <= EXHAUSTIVE_MAX {
            Mode::Exhaustive
        } else {
            Mode::Sampled {
                samples: self.samples,
                seed: self.seed ^ n as u64,
            }
        }
    }
}

/// A sheared but unflattened construction with labels `0..n`.
#[derive(Debug, Clone)]
pub struct Built {
    pub raw: PointSet,
    pub tree: BlockTree,
    pub node_eps: Vec<Option<Rational>>,
    pub report: VerificationReport,
}

impl Built {
    fn point(dim: usize) -> Built {
        let raw = PointSet::new(dim, vec![(0, Point::new(vec![int(0); dim]))]).expect("one point");
        Built {
            raw,
            tree: BlockTree::leaf(0),
            node_eps: vec![None],
            report: VerificationReport::new("point"),
        }
    }

    fn pair(dim: usize) -> Built {
        let mut far = vec![int(0); dim];
        far[0] = int(1);
        let raw = PointSet::new(
            dim,
            vec![(0, Point::new(vec![int(0); dim])), (1, Point::new(far))],
        )
        .expect("two points");
        Built {
            raw,
            tree: BlockTree::join(vec![BlockTree::leaf(0), BlockTree::leaf(1)], vec![0, 1]).unwrap(),
            node_eps: vec![None; 3],
            report: VerificationReport::new("pair"),
        }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

/// A ray from the origin with its placement frame. A point `c` of a copy
/// lands at `(offset * gap + c_1) dir + sum_j c_j frame_j`.
#[derive(Debug, Clone)]
pub struct Ray {
    pub dir: Vec<Rational>,
    pub frame: Vec<Vec<Rational>>,
    pub offset: Rational,
}

impl Ray {
    /// The frame spans the orthogonal complement of `dir` with the rational
    /// vectors `dir_1 e_j - dir_j e_1`; in the plane this is the
    /// perpendicular. Frames differ between rays, which keeps copies on
    /// different rays from lining up.
    fn new(dir: Vec<Rational>, offset: Rational) -> Ray {
        assert!(!dir[0].is_zero(), "ray direction needs a nonzero first coordinate");
        let d = dir.len();
        let frame = (1..d)
            .map(|j| {
                let mut f = vec![int(0); d];
                f[0] = -dir[j].clone();
                f[j] = dir[0].clone();
                f
            })
            .collect();
        Ray { dir, frame, offset }
    }
}

/// Directions `(-1, 0)`, `(3/5, 4/5)`, `(3/5, -4/5)`: rational, pairwise
/// more than 90 degrees apart, origin inside their cone.
pub fn planar_rays(offsets: [i64; 3]) -> Vec<Ray> {
    vec![
        Ray::new(vec![int(-1), int(0)], int(offsets[0])),
        Ray::new(vec![rat(3, 5), rat(4, 5)], int(offsets[1])),
        Ray::new(vec![rat(3, 5), rat(-4, 5)], int(offsets[2])),
    ]
}

/// Rays to the vertices `(d+1) e_i - (1, ..., 1)`, `i < d`, and
/// `-(1, ..., 1)` of a simplex around the origin, each coordinate `j` of
/// vertex `i` moved by `(i+1)(j+1)^2 / (100 (d+1)^3)`. Unperturbed, the vertices share
/// coordinate symmetries that put copies on two rays into one hyperplane.
pub fn simplex_rays(d: usize) -> Vec<Ray> {
    (0..=d)
        .map(|i| {
            let dir = (0..d)
                .map(|j| {
                    let base = if j == i { int(d as i64) } else { int(-1) };
                    base + rat(((i + 1) * (j + 1) * (j + 1)) as i64, 100 * (d as i64 + 1).pow(3))
                })
                .collect();
            Ray::new(dir, int(1))
        })
        .collect()
}

/// Translates so the point with the smallest first coordinate is the origin.
fn anchor(s: &PointSet) -> Vec<Vec<Rational>> {
    let base = s
        .points()
        .iter()
        .min_by(|a, b| a.coord(0).cmp(b.coord(0)))
        .expect("non-empty")
        .coords()
        .to_vec();
    s.points()
        .iter()
        .map(|p| p.coords().iter().zip(&base).map(|(x, b)| x - b).collect())
        .collect()
}

fn extent(local: &[Vec<Rational>]) -> Rational {
    local
        .iter()
        .map(|c| c[0].clone())
        .max()
        .unwrap_or_else(|| int(0))
}

/// Places `children`, each flattened by `eps`, on `rays`. Returns `None`
/// when the assembled set is not in general position.
pub fn assemble(dim: usize, rays: &[Ray], children: &[&Built], eps: &Rational) -> Result<Option<(PointSet, BlockTree)>> {
    let locals: Vec<Vec<Vec<Rational>>> = children
        .iter()
        .map(|c| flatten(&c.raw, eps).map(|f| anchor(&f)))
        .collect::<Result<_>>()?;
    let widest = locals.iter().map(|l| extent(l)).max().unwrap_or_else(|| int(0));
    let gap = std::cmp::max(widest * int(3), int(1));
    let mut entries = Vec::new();
    let mut trees = Vec::new();
    let mut base = 0u32;
    for ((ray, local), child) in rays.iter().zip(&locals).zip(children) {
        let labels = child.raw.labels();
        for (c, &l) in local.iter().zip(labels) {
            let t = &ray.offset * &gap + &c[0];
            let mut p: Vec<Rational> = ray.dir.iter().map(|u| u * &t).collect();
            for (f, cj) in ray.frame.iter().zip(&c[1..]) {
                for (pi, fi) in p.iter_mut().zip(f) {
                    *pi += fi * cj;
                }
            }
            entries.push((l + base, Point::new(p)));
        }
        trees.push(child.tree.shifted(base));
        base += child.len() as u32;
    }
    let s = PointSet::new(dim, entries)?;
    if !is_general_position(&s) {
        return Ok(None);
    }
    let raw = shear_to_distinct_first_coord(&s)?;
    let mut order: Vec<(Rational, u32)> = raw.iter().map(|(l, p)| (p.coord(0).clone(), l)).collect();
    order.sort();
    let tree = BlockTree::join(trees, order.into_iter().map(|(_, l)| l).collect())?;
    Ok(Some((raw, tree)))
}

/// Finds the largest `eps = 2^-t`, `t <= 128`, such that the copies
/// flattened by `eps` and placed on `rays` pass the block invariant.
/// Flattening is linear and so cannot change the invariant of a finished
/// set; what it controls is how thin each copy is next to the others.
pub fn certify_epsilon(
    dim: usize,
    rays: &[Ray],
    children: &[&Built],
    opts: &BuildOptions,
) -> Result<(Rational, Built)> {
    let n: usize = children.iter().map(|c| c.len()).sum();
    let mode = opts.mode(n);
    let mut eps = Rational::one();
    let mut placed = false;
    for _ in 0..=MAX_EPS_EXPONENT {
        if let Some((raw, tree)) = assemble(dim, rays, children, &eps)? {
            placed = true;
            let report = verify_invariant(&raw, &tree, mode);
            if report.all_proved() {
                let mut node_eps = vec![Some(eps.clone())];
                for c in children {
                    node_eps.extend(c.node_eps.iter().cloned());
                }
                let mut merged = VerificationReport::new(format!("certification, n = {n}"));
                for c in children {
                    merged.extend(c.report.clone());
                }
                let mut item: ReportItem = report.items.into_iter().next().unwrap();
                item.id = format!("invariant.n{n}");
                item.note = format!("{}; eps = {eps}", item.note);
                merged.push(item);
                dedup(&mut merged);
                return Ok((eps, Built { raw, tree, node_eps, report: merged }));
            }
        }
        eps /= int(2);
    }
    Err(Error::Construction(if placed {
        format!("no flattening factor down to 2^-{MAX_EPS_EXPONENT} certifies the {n}-point assembly")
    } else {
        format!("the {n}-point assembly is never in general position")
    }))
}

/// Shared sub-constructions certify once; keep the first item per id.
fn dedup(r: &mut VerificationReport) {
    let mut seen = std::collections::HashSet::new();
    r.items.retain(|i| seen.insert(i.id.clone()));
}

/// Largest `2^-t` making the set flat: every transverse coordinate, measured
/// from the leftmost point, is at most an eighth of the smallest gap between
/// first coordinates.
pub fn flat_epsilon(raw: &PointSet) -> Rational {
    if raw.len() < 2 {
        return Rational::one();
    }
    let local = anchor(raw);
    let mut xs: Vec<&Rational> = local.iter().map(|c| &c[0]).collect();
    xs.sort();
    let gap = xs.windows(2).map(|w| w[1] - w[0]).min().unwrap();
    let spread = local
        .iter()
        .flat_map(|c| c[1..].iter().map(|x| x.abs()))
        .max()
        .unwrap_or_else(|| int(0));
    let mut eps = Rational::one();
    while !spread.is_zero() && &spread * &eps * int(8) > gap {
        eps /= int(2);
    }
    eps
}

fn finish(kind: Kind, k: Option<u32>, d: usize, built: Built) -> Result<Construction> {
    let output_eps = flat_epsilon(&built.raw);
    let points = flatten(&built.raw, &output_eps)?;
    let mut schedule: Vec<Option<Rational>> = Vec::new();
    for (id, e) in built.node_eps.iter().enumerate() {
        if let Some(e) = e {
            let depth = built.tree.depth(id);
            if schedule.len() <= depth {
                schedule.resize(depth + 1, None);
            }
            let slot = &mut schedule[depth];
            if slot.as_ref().is_none_or(|cur| e < cur) {
                *slot = Some(e.clone());
            }
        }
    }
    Ok(Construction {
        spec: ConstructionSpec {
            kind,
            k,
            n: points.len(),
            d,
            eps_schedule: schedule.into_iter().flatten().collect(),
            output_eps,
        },
        points,
        blocks: built.tree,
        node_eps: built.node_eps,
        certification: built.report,
    })
}

fn check_size(n: u128) -> Result<()> {
    if n > MAX_POINTS as u128 {
        return Err(Error::Capacity {
            what: "constructions",
            n: n.min(usize::MAX as u128) as usize,
            max: MAX_POINTS,
        });
    }
    Ok(())
}

/// `3^k` points: three copies of the `k-1` set on three rays.
pub fn build_ternary(k: u32) -> Result<Construction> {
    build_ternary_with(k, &BuildOptions::default())
}

pub fn build_ternary_with(k: u32, opts: &BuildOptions) -> Result<Construction> {
    check_size(3u128.checked_pow(k).unwrap_or(u128::MAX))?;
    let rays = planar_rays([1, 1, 1]);
    let mut cur = Built::point(2);
    for _ in 0..k {
        cur = certify_epsilon(2, &rays, &[&cur, &cur, &cur], opts)?.1;
    }
    finish(Kind::Ternary, Some(k), 2, cur)
}

/// Block sizes: `ceil(n/3)` to the first blocks, `floor(n/3)` to the rest.
pub fn threeblock_sizes(n: usize) -> [usize; 3] {
    let q = n / 3;
    let r = n % 3;
    [q + usize::from(r > 0), q + usize::from(r > 1), q]
}

/// `n` points: copies on a horizontal ray, on a second ray close to the
/// origin and on a third ray far from it.
pub fn build_threeblock(n: usize) -> Result<Construction> {
    build_threeblock_with(n, &BuildOptions::default())
}

pub fn build_threeblock_with(n: usize, opts: &BuildOptions) -> Result<Construction> {
    if n == 0 {
        return Err(Error::Precondition("threeblock needs n >= 1".into()));
    }
    check_size(n as u128)?;
    let mut memo = HashMap::new();
    let built = threeblock_rec(n, opts, &mut memo)?;
    finish(Kind::Threeblock, None, 2, built)
}

fn threeblock_rec(n: usize, opts: &BuildOptions, memo: &mut HashMap<usize, Built>) -> Result<Built> {
    if let Some(b) = memo.get(&n) {
        return Ok(b.clone());
    }
    let b = match n {
        1 => Built::point(2),
        2 => Built::pair(2),
        _ => {
            let sizes = threeblock_sizes(n);
            let kids = sizes
                .iter()
                .map(|&m| threeblock_rec(m, opts, memo))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&Built> = kids.iter().collect();
            certify_epsilon(2, &planar_rays([1, 1, 8]), &refs, opts)?.1
        }
    };
    memo.insert(n, b.clone());
    Ok(b)
}

/// `(d+1)^k` points in dimension `d`: copies on the rays to the vertices of
/// a simplex around the origin.
pub fn build_simplex(d: usize, k: u32) -> Result<Construction> {
    build_simplex_with(d, k, &BuildOptions::default())
}

pub fn build_simplex_with(d: usize, k: u32, opts: &BuildOptions) -> Result<Construction> {
    if d < 2 {
        return Err(Error::Precondition(format!("simplex needs d >= 2, got {d}")));
    }
    check_size((d as u128 + 1).checked_pow(k).unwrap_or(u128::MAX))?;
    let rays = simplex_rays(d);
    let mut cur = Built::point(d);
    for _ in 0..k {
        let copies: Vec<&Built> = vec![&cur; d + 1];
        cur = certify_epsilon(d, &rays, &copies, opts)?.1;
    }
    finish(Kind::Simplex, Some(k), d, cur)
}

/// The first `m` labels of a construction; by monotonicity its count is at
/// most the count of the whole set.
pub fn corollary_subset(c: &Construction, m: usize) -> Result<PointSet> {
    if m > c.points.len() {
        return Err(Error::Precondition(format!(
            "subset of size {m} from {} points",
            c.points.len()
        )));
    }
    let keep = c.points.labels().iter().copied().take(m).collect();
    c.points.subset(&keep)
}
