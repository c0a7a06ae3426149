//! Exact verification of the estimate toolkit and evaluation of the lower
//! and upper bound formulas.

mod constants;
mod lemmas;
mod power;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::geometry::{int, rat, Rational};
use crate::peeling::PeelCount;
use crate::report::{ReportItem, Verdict};

pub use constants::proof_constants_check;
pub use lemmas::{
    coef_bound_report, coef_lemma_check, divide_lemma_check, divide_lemma_random, entropy_bound_check, entropy_grid_check,
    floor_ceil_check, floor_ceil_instance, COEF_LEMMA_MIN,
};
pub use power::{compare, compare_audit, compare_with_witness, PowerProduct};

/// The base of the planar upper bound, 12.29.
pub fn a() -> Rational {
    rat(1229, 100)
}

/// `a^n / 100`.
pub fn thm2_bound(n: u64) -> PowerProduct {
    PowerProduct::power(a(), int(n as i64))
        .and_then(|p| p.times(rat(1, 100)))
        .expect("positive constants")
}

/// `floor(a^n / 100)`.
pub fn thm2_floor(n: u64) -> BigUint {
    thm2_bound(n)
        .floor()
        .and_then(|f| f.to_biguint())
        .expect("integral exponent")
}

/// Explicit lower bound on the minimum number of peeling sequences over all
/// `n`-point sets in general position in dimension `d`.
pub fn lower_bound(n: u64, d: u64) -> Result<PeelCount> {
    if n == 0 {
        return Err(Error::Precondition("lower_bound needs n >= 1".into()));
    }
    if d < 2 {
        return Err(Error::Precondition("lower_bound needs d >= 2".into()));
    }
    let v = if d == 2 {
        const SMALL: [u64; 7] = [1, 1, 2, 6, 18, 60, 180];
        if n <= 6 {
            BigUint::from(SMALL[n as usize])
        } else {
            BigUint::from(180u32) * BigUint::from(3u32).pow((n - 6) as u32)
        }
    } else if n > d {
        factorial(d + 1) * BigUint::from(d + 1).pow((n - d - 1) as u32)
    } else {
        factorial(n)
    };
    Ok(PeelCount::new(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpperBound {
    /// `27^n`, `n` a power of 3.
    Thm1,
    /// `19683^n`, any `n`.
    Cor1,
    /// `a^n / 100`, `n >= 3`.
    Thm2,
    /// `(d+1)^((d+1) n)`, `n` a power of `d+1`.
    Thm3,
    /// `(d+1)^((d+1)^2 n)`, any `n`.
    Cor2,
}

impl FromStr for UpperBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm1" => Ok(UpperBound::Thm1),
            "cor1" => Ok(UpperBound::Cor1),
            "thm2" => Ok(UpperBound::Thm2),
            "thm3" => Ok(UpperBound::Thm3),
            "cor2" => Ok(UpperBound::Cor2),
            _ => Err(Error::Precondition(format!("unknown bound {s:?}"))),
        }
    }
}

impl fmt::Display for UpperBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpperBound::Thm1 => "thm1",
            UpperBound::Cor1 => "cor1",
            UpperBound::Thm2 => "thm2",
            UpperBound::Thm3 => "thm3",
            UpperBound::Cor2 => "cor2",
        })
    }
}

fn is_power_of(mut n: u64, b: u64) -> bool {
    while n > 1 && n.is_multiple_of(b) {
        n /= b;
    }
    n == 1
}

pub fn upper_bound(n: u64, d: u64, which: UpperBound) -> Result<PowerProduct> {
    if n == 0 {
        return Err(Error::Precondition("upper_bound needs n >= 1".into()));
    }
    if d < 2 {
        return Err(Error::Precondition("upper_bound needs d >= 2".into()));
    }
    let planar = |name: &str| {
        if d == 2 {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{name} is a planar bound, got d = {d}")))
        }
    };
    let n_i = int(n as i64);
    let d1 = d + 1;
    match which {
        UpperBound::Thm1 => {
            planar("thm1")?;
            if !is_power_of(n, 3) {
                return Err(Error::Precondition(format!("thm1 needs n = 3^k, got {n}")));
            }
            PowerProduct::power(int(27), n_i)
        }
        UpperBound::Cor1 => {
            planar("cor1")?;
            PowerProduct::power(int(19683), n_i)
        }
        UpperBound::Thm2 => {
            planar("thm2")?;
            if n < 3 {
                return Err(Error::Precondition(format!("thm2 needs n >= 3, got {n}")));
            }
            Ok(thm2_bound(n))
        }
        UpperBound::Thm3 => {
            if !is_power_of(n, d1) {
                return Err(Error::Precondition(format!("thm3 needs n = {d1}^k, got {n}")));
            }
            PowerProduct::power(int(d1 as i64), int((d1 * n) as i64))
        }
        UpperBound::Cor2 => PowerProduct::power(int(d1 as i64), int((d1 * d1 * n) as i64)),
    }
}

/// `lower <= count <= upper`, all exact.
pub fn within_bounds(count: &PeelCount, lower: &PeelCount, upper: &PowerProduct) -> bool {
    if count.value() < lower.value() {
        return false;
    }
    if count.value() < &BigUint::one() {
        return true;
    }
    let c = PowerProduct::integer(count.value()).expect("positive count");
    compare(&c, upper) != std::cmp::Ordering::Greater
}

/// `lower_bound(n, d) <= count`, and `count <= upper` when a bound applies,
/// as one report item.
pub fn chain_item(id: &str, count: &PeelCount, n: u64, d: u64, upper: Option<UpperBound>) -> Result<ReportItem> {
    let lower = lower_bound(n, d)?;
    let low_ok = count.value() >= lower.value();
    let (up_ok, comparison, up_text) = match upper {
        Some(which) => {
            let bound = upper_bound(n, d, which)?;
            let c = PowerProduct::integer(count.value())?;
            let (ord, cmp) = compare_with_witness(&c, &bound);
            (ord != std::cmp::Ordering::Greater, Some(cmp), format!(" <= {bound} ({which})"))
        }
        None => (true, None, String::new()),
    };
    Ok(ReportItem {
        id: id.to_string(),
        statement: format!("{lower} <= g = {count}{up_text}"),
        verdict: Verdict::from_bool(low_ok && up_ok),
        comparison,
        note: format!("n = {n}, d = {d}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bounds() {
        assert_eq!(lower_bound(6, 2).unwrap(), PeelCount::from(180));
        assert_eq!(lower_bound(7, 2).unwrap(), PeelCount::from(540));
        assert_eq!(lower_bound(4, 3).unwrap(), PeelCount::from(24));
        assert_eq!(lower_bound(2, 3).unwrap(), PeelCount::from(2));
        assert_eq!(lower_bound(6, 3).unwrap(), PeelCount::from(24 * 16));
        // the two planar formulas agree with the small values where they overlap
        for n in 3..=12u64 {
            let six = BigUint::from(6u32) * BigUint::from(3u32).pow(n as u32 - 3);
            assert!(lower_bound(n, 2).unwrap().value() >= &six);
        }
        assert!(lower_bound(0, 2).is_err());
    }

    #[test]
    fn upper_bounds() {
        let t1 = upper_bound(9, 2, UpperBound::Thm1).unwrap();
        assert_eq!(t1.floor().unwrap(), 7_625_597_484_987u64.into());
        assert!(upper_bound(10, 2, UpperBound::Thm1).is_err());
        let t2 = upper_bound(3, 2, UpperBound::Thm2).unwrap();
        assert_eq!(t2.floor().unwrap(), 18.into());
        assert!(upper_bound(2, 2, UpperBound::Thm2).is_err());
        let t3 = upper_bound(4, 3, UpperBound::Thm3).unwrap();
        assert_eq!(t3, PowerProduct::power(int(4), int(16)).unwrap());
        assert!(upper_bound(8, 3, UpperBound::Thm3).is_err());
        assert!(upper_bound(5, 3, UpperBound::Cor1).is_err());
        assert_eq!(
            upper_bound(2, 3, UpperBound::Cor2).unwrap(),
            PowerProduct::power(int(4), int(32)).unwrap()
        );
    }

    #[test]
    fn thm2_floor_at_nine() {
        assert_eq!(thm2_floor(9), BigUint::from(63_968_614u64));
        assert_eq!(thm2_floor(4), BigUint::from(228u32));
    }

    #[test]
    fn bound_names_round_trip() {
        for w in [UpperBound::Thm1, UpperBound::Cor1, UpperBound::Thm2, UpperBound::Thm3, UpperBound::Cor2] {
            assert_eq!(w.to_string().parse::<UpperBound>().unwrap(), w);
        }
    }

    #[test]
    fn chain_items() {
        let it = chain_item("x", &PeelCount::from(6), 3, 2, Some(UpperBound::Thm2)).unwrap();
        assert_eq!(it.verdict, Verdict::Proved);
        assert_eq!(it.statement, "6 <= g = 6 <= (1229/100)^3*1/100 (thm2)".replace("(1229/100)^3*1/100", &thm2_bound(3).to_string()));
        let it = chain_item("y", &PeelCount::from(5), 3, 2, None).unwrap();
        assert_eq!(it.verdict, Verdict::Refuted);
    }

    #[test]
    fn bounds_window() {
        let up = upper_bound(3, 2, UpperBound::Thm2).unwrap();
        let lo = lower_bound(3, 2).unwrap();
        assert!(within_bounds(&PeelCount::from(6), &lo, &up));
        assert!(!within_bounds(&PeelCount::from(19), &lo, &up));
        assert!(!within_bounds(&PeelCount::from(5), &lo, &up));
    }
}
