//! Binomial, entropy and subadditivity lemmas, checked on exact integers.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{binomial, binomial_row};
use crate::error::{Error, Result};
use crate::geometry::{PointSet, Rational};
use crate::peeling::{count, BRUTEFORCE_MAX};
use crate::search::{random_point_set, SearchConfig};
use crate::report::{Comparison, ReportItem, VerificationReport, Verdict};

/// Smallest `n` for which `6 C(n,k) <= 2^n` is claimed for every `k`.
pub const COEF_LEMMA_MIN: u64 = 24;

/// At most this many failing instances are itemized in aggregated reports.
const MAX_LISTED: usize = 20;

fn int_item(id: String, statement: String, lhs: &BigUint, rhs: &BigUint, power: u64) -> ReportItem {
    ReportItem {
        id,
        statement,
        verdict: Verdict::from_bool(lhs <= rhs),
        comparison: Some(Comparison {
            power,
            lhs_bits: lhs.bits(),
            rhs_bits: rhs.bits(),
        }),
        note: String::new(),
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

/// Exact form of `C(n, pn/q) <= 2^{n H(p/q)}`: raised to the `q`-th power,
/// `C^q * p^{pn} * (q-p)^{(q-p)n} <= q^{qn}`.
fn entropy_instance(n: u64, p: u64, q: u64) -> ReportItem {
    let k = p * n / q;
    let c = binomial(n, k);
    let lhs = c.pow(q as u32) * big(p).pow((p * n) as u32) * big(q - p).pow(((q - p) * n) as u32);
    let rhs = big(q).pow((q * n) as u32);
    int_item(
        format!("entropy.n{n}.a{p}/{q}"),
        format!("C({n},{k}) <= 2^({n} H({p}/{q}))"),
        &lhs,
        &rhs,
        q,
    )
}

fn entropy_pre(n: u64, p: u64, q: u64) -> Result<()> {
    if q == 0 || 2 * p > q {
        return Err(Error::Precondition(format!("need 0 <= {p}/{q} <= 1/2")));
    }
    if !(p * n).is_multiple_of(q) {
        return Err(Error::Precondition(format!("{p}/{q} * {n} is not an integer")));
    }
    Ok(())
}

pub fn entropy_bound_check(n: u64, p: u64, q: u64) -> Result<VerificationReport> {
    entropy_pre(n, p, q)?;
    let mut r = VerificationReport::new("binomial entropy bound");
    r.push(entropy_instance(n, p, q));
    Ok(r)
}

/// Every `n <= n_max` with `alpha n` integral, for each `alpha = p/q`.
/// One aggregated item per `alpha`, plus one item per failing instance.
pub fn entropy_grid_check(n_max: u64, alphas: &[(u64, u64)]) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(format!("binomial entropy bound, n <= {n_max}"));
    for &(p, q) in alphas {
        entropy_pre(0, p, q)?;
        let mut checked = 0usize;
        let mut bad = Vec::new();
        let mut last = None;
        for n in 1..=n_max {
            if (p * n) % q != 0 {
                continue;
            }
            let it = entropy_instance(n, p, q);
            checked += 1;
            if it.verdict == Verdict::Refuted {
                bad.push(it.clone());
            }
            last = it.comparison;
        }
        r.push(aggregate(
            format!("entropy.a{p}/{q}"),
            format!("C(n, {p}n/{q}) <= 2^(n H({p}/{q})) for 1 <= n <= {n_max}"),
            checked,
            &bad,
            last,
        ));
        r.items.extend(bad.into_iter().take(MAX_LISTED));
    }
    Ok(r)
}

fn aggregate(
    id: String,
    statement: String,
    checked: usize,
    bad: &[ReportItem],
    comparison: Option<Comparison>,
) -> ReportItem {
    ReportItem {
        id,
        statement,
        verdict: Verdict::from_bool(bad.is_empty()),
        comparison,
        note: if bad.is_empty() {
            format!("{checked} exact comparisons")
        } else {
            format!("{} of {checked} comparisons fail", bad.len())
        },
    }
}

/// `C(n, ceil x) <= 2 C(n, floor x)` for one real `x` with `n/3 <= x <= n`.
pub fn floor_ceil_instance(n: u64, x: &Rational) -> Result<VerificationReport> {
    let n_r = Rational::from_integer(n.into());
    if x * Rational::from_integer(3.into()) < n_r || x > &n_r || x.is_negative() {
        return Err(Error::Precondition(format!("x = {x} is outside [{n}/3, {n}]")));
    }
    let lo = x.floor().to_integer().to_u64().expect("fits");
    let hi = x.ceil().to_integer().to_u64().expect("fits");
    let mut r = VerificationReport::new("binomial floor/ceiling step");
    r.push(int_item(
        format!("floorceil.n{n}.x{x}"),
        format!("C({n},{hi}) <= 2 C({n},{lo})"),
        &binomial(n, hi),
        &(big(2) * binomial(n, lo)),
        1,
    ));
    Ok(r)
}

/// All `1 <= n <= n_max` and integers `floor(n/3) <= m < n`:
/// `C(n, m+1) <= 2 C(n, m)`. Every real `x` in `[n/3, n]` has
/// `floor x` among these `m` (or is integral), so this covers the lemma.
pub fn floor_ceil_check(n_max: u64) -> Result<VerificationReport> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let mut checked = 0usize;
    let mut bad = Vec::new();
    let mut last = None;
    for n in 1..=n_max {
        let row = binomial_row(n);
        for m in n / 3..n {
            let (mu, m1) = (m as usize, m as usize + 1);
            let it = int_item(
                format!("floorceil.n{n}.m{m}"),
                format!("C({n},{}) <= 2 C({n},{m})", m + 1),
                &row[m1],
                &(&row[mu] << 1),
                1,
            );
            checked += 1;
            last = it.comparison.clone();
            if it.verdict == Verdict::Refuted {
                bad.push(it);
            }
        }
    }
    let mut r = VerificationReport::new(format!("binomial floor/ceiling step, n <= {n_max}"));
    r.push(aggregate(
        "floorceil".into(),
        format!("C(n, ceil x) <= 2 C(n, floor x) for n/3 <= x <= n, 1 <= n <= {n_max}"),
        checked,
        &bad,
        last,
    ));
    r.items.extend(bad.into_iter().take(MAX_LISTED));
    Ok(r)
}

/// `6 C(n,k) <= 2^n` for every `k`, one item per `n`, exact verdicts for
/// any `n` including those below the lemma's threshold. The witness is the
/// central coefficient, which is the largest.
pub fn coef_bound_report(n_lo: u64, n_hi: u64) -> Result<VerificationReport> {
    if n_lo > n_hi {
        return Err(Error::Precondition(format!("empty range {n_lo}..={n_hi}")));
    }
    let mut r = VerificationReport::new(format!("6 C(n,k) <= 2^n, {n_lo} <= n <= {n_hi}"));
    for n in n_lo..=n_hi {
        r.push(coef_instance(n));
    }
    Ok(r)
}

fn coef_instance(n: u64) -> ReportItem {
    let row = binomial_row(n);
    let pow = BigUint::one() << n;
    let all = row.iter().all(|c| big(6) * c <= pow);
    let mid = &row[n as usize / 2];
    let mut it = int_item(
        format!("coef.n{n}"),
        format!("6 C({n},k) <= 2^{n} for 0 <= k <= {n}"),
        &(big(6) * mid),
        &pow,
        1,
    );
    it.verdict = Verdict::from_bool(all);
    it.note = format!("6 C({n},{}) = {} vs 2^{n} = {}", n / 2, big(6) * mid, pow);
    it
}

/// The coefficient lemma on `[n_lo, n_hi]` with `n_lo >= 24`, plus its
/// anchor `6 C(24,12) <= 2^24`.
pub fn coef_lemma_check(n_lo: u64, n_hi: u64) -> Result<VerificationReport> {
    if n_lo < COEF_LEMMA_MIN {
        return Err(Error::Precondition(format!(
            "the coefficient lemma starts at n = {COEF_LEMMA_MIN}, got {n_lo}; use coef_bound_report for exact verdicts below"
        )));
    }
    let per_n = coef_bound_report(n_lo, n_hi)?;
    let mut r = VerificationReport::new(format!("coefficient lemma, {n_lo} <= n <= {n_hi}"));
    r.push(int_item(
        "coef.anchor".into(),
        "6 C(24,12) <= 2^24".into(),
        &(big(6) * binomial(24, 12)),
        &(BigUint::one() << 24u32),
        1,
    ));
    let bad: Vec<ReportItem> = per_n.refuted().cloned().collect();
    let last = per_n.items.last().and_then(|i| i.comparison.clone());
    r.push(aggregate(
        "coef".into(),
        format!("6 C(n,k) <= 2^n for 0 <= k <= n, {n_lo} <= n <= {n_hi}"),
        per_n.items.len(),
        &bad,
        last,
    ));
    r.items.extend(bad.into_iter().take(MAX_LISTED));
    Ok(r)
}

/// `g(Z) <= C(n, n_1) g(X) g(Y)` for `X` given by labels and `Y = Z \ X`.
pub fn divide_lemma_check(z: &PointSet, x_labels: &BTreeSet<u32>) -> Result<VerificationReport> {
    if z.len() > BRUTEFORCE_MAX {
        return Err(Error::Capacity {
            what: "divide_lemma_check",
            n: z.len(),
            max: BRUTEFORCE_MAX,
        });
    }
    for &l in x_labels {
        if z.index_of(l).is_none() {
            return Err(Error::UnknownLabel(l));
        }
    }
    let y_labels: BTreeSet<u32> = z.label_set().difference(x_labels).copied().collect();
    let x = z.subset(x_labels)?;
    let y = z.subset(&y_labels)?;
    let gz = count(z)?;
    let gx = count(&x)?;
    let gy = count(&y)?;
    let n = z.len() as u64;
    let n1 = x.len() as u64;
    let rhs = binomial(n, n1) * gx.value() * gy.value();
    let mut r = VerificationReport::new("subadditivity of peeling counts");
    let mut it = int_item(
        format!("divide.n{n}.n1_{n1}"),
        format!("g(Z) <= C({n},{n1}) g(X) g(Y)"),
        gz.value(),
        &rhs,
        1,
    );
    it.note = format!("{} <= {} * {} * {}", gz, binomial(n, n1), gx, gy);
    r.push(it);
    Ok(r)
}


/// The subadditivity check on `instances` seeded random planar sets with
/// `3 <= n <= n_max` and random proper non-empty subsets `X`.
pub fn divide_lemma_random(instances: usize, n_max: usize, seed: u64) -> Result<VerificationReport> {
    if !(3..=BRUTEFORCE_MAX).contains(&n_max) {
        return Err(Error::Precondition(format!(
            "n_max must lie in 3..={BRUTEFORCE_MAX}, got {n_max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = VerificationReport::new(format!("subadditivity on {instances} random sets"));
    for i in 0..instances {
        let n = rng.gen_range(3..=n_max);
        let mut cfg = SearchConfig::new(n, rng.gen());
        cfg.coordinate_resolution = 64;
        let z = random_point_set(&cfg, 2)?;
        let mut x = BTreeSet::new();
        while x.is_empty() || x.len() == n {
            x = z.labels().iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        }
        let mut item = divide_lemma_check(&z, &x)?.items.remove(0);
        item.id = format!("divide.{i}");
        r.push(item);
    }
    Ok(r)
}
