//! Exact phase-one simplex over the rationals.
//!
//! Only feasibility of `A x = b, x >= 0` is decided; Bland's rule keeps the
//! pivoting finite.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Returns true iff `A x = b` has a solution with `x >= 0`.
///
/// `a` is row-major with every row of equal length.
pub fn feasible(a: &[Vec<BigRational>], b: &[BigRational]) -> bool {
    let rows = a.len();
    assert_eq!(rows, b.len(), "row count mismatch");
    if rows == 0 {
        return true;
    }
    let vars = a[0].len();
    let cols = vars + rows;

    // Row-normalize so every right-hand side is nonnegative, then append one
    // artificial per row. The last column holds the right-hand side.
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(rows);
    for (r, (row, rhs)) in a.iter().zip(b).enumerate() {
        assert_eq!(row.len(), vars, "ragged constraint matrix");
        let flip = rhs.is_negative();
        let mut line = Vec::with_capacity(cols + 1);
        for v in row {
            line.push(if flip { -v.clone() } else { v.clone() });
        }
        for k in 0..rows {
            line.push(if k == r { one() } else { BigRational::zero() });
        }
        line.push(if flip { -rhs.clone() } else { rhs.clone() });
        t.push(line);
    }
    let mut basis: Vec<usize> = (vars..cols).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![BigRational::zero(); cols + 1];
    for line in &t {
        for j in 0..vars {
            cost[j] -= &line[j];
        }
        cost[cols] -= &line[cols];
    }

    while let Some(entering) = (0..cols).find(|&j| cost[j].is_negative()) {
        let mut leaving: Option<(usize, BigRational)> = None;
        for r in 0..rows {
            if !t[r][entering].is_positive() {
                continue;
            }
            let ratio = &t[r][cols] / &t[r][entering];
            let better = match &leaving {
                None => true,
                Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
            };
            if better {
                leaving = Some((r, ratio));
            }
        }
        // Phase one is bounded below by zero, so an entering column always
        // has a positive entry.
        let (pr, _) = leaving.expect("phase-one objective is bounded");
        pivot(&mut t, &mut cost, pr, entering);
        basis[pr] = entering;
    }

    // cost[cols] holds minus the objective value.
    cost[cols].is_zero()
}

fn pivot(t: &mut [Vec<BigRational>], cost: &mut [BigRational], pr: usize, pc: usize) {
    let width = t[pr].len();
    let p = t[pr][pc].clone();
    for v in t[pr].iter_mut() {
        *v /= &p;
    }
    let pivot_row = t[pr].clone();
    for (r, line) in t.iter_mut().enumerate() {
        if r == pr || line[pc].is_zero() {
            continue;
        }
        let f = line[pc].clone();
        for j in 0..width {
            if !pivot_row[j].is_zero() {
                line[j] -= &f * &pivot_row[j];
            }
        }
    }
    if !cost[pc].is_zero() {
        let f = cost[pc].clone();
        for j in 0..width {
            if !pivot_row[j].is_zero() {
                cost[j] -= &f * &pivot_row[j];
            }
        }
    }
}

fn one() -> BigRational {
    BigRational::from_integer(BigInt::from(1))
}

/// Exact membership of `p` in the convex hull of `others`.
pub fn in_convex_hull(p: &[BigInt], others: &[&[BigInt]]) -> bool {
    if others.is_empty() {
        return false;
    }
    let d = p.len();
    let mut a = Vec::with_capacity(d + 1);
    let mut b = Vec::with_capacity(d + 1);
    for j in 0..d {
        a.push(
            others
                .iter()
                .map(|q| BigRational::from_integer(q[j].clone()))
                .collect(),
        );
        b.push(BigRational::from_integer(p[j].clone()));
    }
    a.push(vec![one(); others.len()]);
    b.push(one());
    feasible(&a, &b)
}
