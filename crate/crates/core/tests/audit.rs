//! Independent audits of the exact machinery: the power-product comparator
//! against 128-bit interval evaluation, and flattening-factor safety.

mod common;

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;

use common::{rational, rng};
use hullpeel::bounds::{compare, compare_audit, PowerProduct};
use hullpeel::constructions::{
    assemble, certify_epsilon, planar_rays, simplex_rays, verify_invariant, BlockTree, BuildOptions, Built, Mode,
    Ray,
};
use hullpeel::geometry::{Point, PointSet, Rational};
use hullpeel::report::VerificationReport;

const PREC: u64 = 128;

/// `[lo, hi] / 2^scale` encloses a positive real.
#[derive(Clone)]
struct Interval {
    lo: BigUint,
    hi: BigUint,
    scale: u64,
}

impl Interval {
    fn of_rational(r: &Rational) -> Interval {
        let d = r.denom().to_biguint().unwrap();
        let scale = PREC + d.bits();
        let n = r.numer().to_biguint().unwrap() << scale;
        let lo = &n / &d;
        let hi = if (&lo * &d) == n { lo.clone() } else { &lo + 1u32 };
        Interval { lo, hi, scale }
    }

    /// `r^(p/q)` for `p, q > 0`, with about 128 significant bits.
    fn of_power(r: &Rational, p: u32, q: u32) -> Interval {
        let n = r.numer().to_biguint().unwrap().pow(p);
        let d = r.denom().to_biguint().unwrap().pow(p);
        let scale = PREC + d.bits().saturating_sub(n.bits()) / q as u64 + 1;
        let lo_arg = (n << (scale * q as u64)) / &d;
        let hi_arg = &lo_arg + 1u32;
        Interval {
            lo: lo_arg.nth_root(q),
            hi: hi_arg.nth_root(q) + 1u32,
            scale,
        }
    }

    fn mul(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo * &o.lo,
            hi: &self.hi * &o.hi,
            scale: self.scale + o.scale,
        }
    }

    /// `Some(ordering)` when the intervals are disjoint.
    fn decide(&self, o: &Interval) -> Option<Ordering> {
        let s = self.scale.max(o.scale);
        let up = |x: &BigUint, sc: u64| x << (s - sc);
        if up(&self.hi, self.scale) < up(&o.lo, o.scale) {
            Some(Ordering::Less)
        } else if up(&o.hi, o.scale) < up(&self.lo, self.scale) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

fn enclose(p: &PowerProduct) -> Interval {
    let mut acc = Interval::of_rational(p.coefficient());
    for (b, e) in p.factors() {
        let (base, e) = if e.is_negative() { (b.recip(), -e) } else { (b.clone(), e.clone()) };
        let num = e.numer().to_u32().unwrap();
        let den = e.denom().to_u32().unwrap();
        acc = acc.mul(&Interval::of_power(&base, num, den));
    }
    acc
}

fn random_product(r: &mut impl Rng) -> PowerProduct {
    let mut p = PowerProduct::rational(rational(r.gen_range(1..=500), r.gen_range(1..=500))).unwrap();
    for _ in 0..r.gen_range(1..=3) {
        let base = rational(r.gen_range(1..=60), r.gen_range(1..=60));
        let mut e = rational(r.gen_range(1..=40), r.gen_range(1..=9));
        if r.gen_bool(0.3) {
            e = -e;
        }
        p = p.times_pow(base, e).unwrap();
    }
    p
}

#[test]
fn compare_matches_interval_evaluation() {
    let mut r = rng(2024);
    let mut decided = 0;
    for i in 0..100 {
        let a = random_product(&mut r);
        // every third pair is a near tie: b = a * (1 + 2^-40) or a / (1 + 2^-40)
        let b = if i % 3 == 0 {
            let nudge = Rational::one() + rational(1, 1i64 << 40);
            if r.gen_bool(0.5) {
                a.clone().times(nudge).unwrap()
            } else {
                a.clone().times(nudge.recip()).unwrap()
            }
        } else {
            random_product(&mut r)
        };
        let exact = compare(&a, &b);
        assert_eq!(exact, compare_audit(&a, &b), "audit route disagrees on {a} vs {b}");
        if let Some(ord) = enclose(&a).decide(&enclose(&b)) {
            assert_eq!(exact, ord, "{a} vs {b}");
            decided += 1;
        }
    }
    assert!(decided >= 95, "only {decided} of 100 comparisons were decided by intervals");
}

#[test]
fn equal_values_in_different_forms() {
    let eight_third = PowerProduct::power(rational(8, 1), rational(1, 3)).unwrap();
    let two = PowerProduct::rational(rational(2, 1)).unwrap();
    assert_eq!(compare(&eight_third, &two), Ordering::Equal);
    let a = PowerProduct::power(rational(9, 4), rational(3, 2)).unwrap();
    let b = PowerProduct::rational(rational(27, 8)).unwrap();
    assert_eq!(compare(&a, &b), Ordering::Equal);
    assert_eq!(compare_audit(&a, &b), Ordering::Equal);
}

fn point(dim: usize) -> Built {
    Built {
        raw: PointSet::new(dim, vec![(0, Point::new(vec![rational(0, 1); dim]))]).unwrap(),
        tree: BlockTree::leaf(0),
        node_eps: vec![None],
        report: VerificationReport::new("point"),
    }
}

/// Certified assemblies from one-point children upward, `(rays, children)`.
fn instances() -> Vec<(usize, Vec<Ray>, Vec<Built>)> {
    let opts = BuildOptions::default();
    let mut out = Vec::new();
    let mut by_dim = Vec::new();
    for d in 2..=5 {
        let rays = simplex_rays(d);
        let one = certify_epsilon(d, &rays, &vec![&point(d); d + 1], &opts).unwrap().1;
        by_dim.push((d, one));
    }
    // planar: children are certified sets of sizes 1, 3 mixed over three rays
    let rays = planar_rays([1, 1, 1]);
    let p = point(2);
    let t3 = certify_epsilon(2, &rays, &[&p, &p, &p], &opts).unwrap().1;
    let sizes: [[usize; 3]; 8] = [
        [1, 1, 1],
        [3, 1, 1],
        [1, 3, 1],
        [1, 1, 3],
        [3, 3, 1],
        [3, 1, 3],
        [1, 3, 3],
        [3, 3, 3],
    ];
    for offsets in [[1, 1, 1], [1, 1, 8]] {
        for s in sizes {
            let kids: Vec<Built> = s.iter().map(|&m| if m == 1 { p.clone() } else { t3.clone() }).collect();
            out.push((2, planar_rays(offsets), kids));
        }
    }
    for (d, one) in by_dim {
        out.push((d, simplex_rays(d), vec![point(d); d + 1]));
        if d <= 3 {
            out.push((d, simplex_rays(d), vec![one.clone(); d + 1]));
        }
    }
    out
}

#[test]
fn halving_a_certified_epsilon_stays_certified() {
    let insts = instances();
    assert!(insts.len() >= 20);
    let opts = BuildOptions { samples: 2000, seed: 5 };
    for (dim, rays, kids) in &insts {
        let refs: Vec<&Built> = kids.iter().collect();
        let (eps, built) = certify_epsilon(*dim, rays, &refs, &opts).unwrap();
        let n = built.len();
        let mode = if n <= 12 { Mode::Exhaustive } else { Mode::Sampled { samples: 2000, seed: 5 } };
        let mut e = eps.clone();
        for _ in 0..4 {
            e /= rational(2, 1);
            let (s, tree) = assemble(*dim, rays, &refs, &e)
                .unwrap()
                .unwrap_or_else(|| panic!("n = {n}, d = {dim}: eps {e} leaves general position"));
            let rep = verify_invariant(&s, &tree, mode);
            assert!(rep.all_proved(), "n = {n}, d = {dim}: certified at {eps} but not at {e}\n{}", rep.render_table());
        }
    }
}
