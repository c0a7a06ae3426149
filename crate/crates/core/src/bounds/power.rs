//! Formal products of rational powers, compared exactly.
//!
//! `c * b_1^e_1 * ... * b_k^e_k` with `c > 0`, `b_i > 0` and rational `e_i`.
//! Two products are compared by raising their ratio to the least common
//! multiple `L` of all exponent denominators: every exponent becomes an
//! integer and the question reduces to comparing two big integers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::{int, Rational};
use crate::report::Comparison;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerProduct {
    coefficient: Rational,
    /// base -> exponent; bases are positive and distinct, never 1, and
    /// exponents are nonzero.
    factors: BTreeMap<Rational, Rational>,
}

impl PowerProduct {
    pub fn one() -> Self {
        PowerProduct {
            coefficient: int(1),
            factors: BTreeMap::new(),
        }
    }

    /// A plain positive rational.
    pub fn rational(c: Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::Precondition(format!("coefficient {c} is not positive")));
        }
        Ok(PowerProduct {
            coefficient: c,
            factors: BTreeMap::new(),
        })
    }

    pub fn integer(n: &BigUint) -> Result<Self> {
        Self::rational(Rational::from_integer(BigInt::from(n.clone())))
    }

    /// `base^exp`.
    pub fn power(base: Rational, exp: Rational) -> Result<Self> {
        Self::one().times_pow(base, exp)
    }

    pub fn times_pow(mut self, base: Rational, exp: Rational) -> Result<Self> {
        if !base.is_positive() {
            return Err(Error::Precondition(format!("base {base} is not positive")));
        }
        if base.is_one() || exp.is_zero() {
            return Ok(self);
        }
        let e = self.factors.entry(base.clone()).or_insert_with(|| int(0));
        *e += exp;
        if e.is_zero() {
            self.factors.remove(&base);
        }
        Ok(self)
    }

    pub fn times(mut self, c: Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::Precondition(format!("factor {c} is not positive")));
        }
        self.coefficient *= c;
        Ok(self)
    }

    pub fn mul(&self, other: &PowerProduct) -> PowerProduct {
        let mut out = self.clone();
        out.coefficient *= &other.coefficient;
        for (b, e) in &other.factors {
            out = out.times_pow(b.clone(), e.clone()).expect("bases stay positive");
        }
        out
    }

    pub fn recip(&self) -> PowerProduct {
        PowerProduct {
            coefficient: self.coefficient.recip(),
            factors: self.factors.iter().map(|(b, e)| (b.clone(), -e)).collect(),
        }
    }

    pub fn coefficient(&self) -> &Rational {
        &self.coefficient
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.factors.iter()
    }

    /// Exact value when every exponent is an integer.
    pub fn exact_value(&self) -> Option<Rational> {
        let mut v = self.coefficient.clone();
        for (b, e) in &self.factors {
            if !e.is_integer() {
                return None;
            }
            let k = e.to_integer().to_i32()?;
            v *= b.pow(k);
        }
        Some(v)
    }

    pub fn floor(&self) -> Option<BigInt> {
        self.exact_value().map(|v| v.floor().to_integer())
    }

    /// Approximate base-2 logarithm, for display only.
    pub fn log2_approx(&self) -> f64 {
        let lg = |r: &Rational| log2_big(r.numer()) - log2_big(r.denom());
        lg(&self.coefficient)
            + self
                .factors
                .iter()
                .map(|(b, e)| e.to_f64().unwrap_or(f64::NAN) * lg(b))
                .sum::<f64>()
    }
}

pub(crate) fn log2_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().abs().log2();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().log2() + shift as f64
}

impl fmt::Display for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.coefficient.is_one() || self.factors.is_empty() {
            parts.push(self.coefficient.to_string());
        }
        for (b, e) in &self.factors {
            let base = if b.is_integer() {
                b.to_string()
            } else {
                format!("({b})")
            };
            if e.is_one() {
                parts.push(base);
            } else if e.is_integer() && e.is_positive() {
                parts.push(format!("{base}^{e}"));
            } else {
                parts.push(format!("{base}^({e})"));
            }
        }
        f.write_str(&parts.join("*"))
    }
}

/// `lhs^L` and `rhs^L` as integers with a common denominator removed, plus `L`.
struct Cleared {
    power: u64,
    num: BigUint,
    den: BigUint,
}

fn exponent_lcm<'a>(exps: impl Iterator<Item = &'a Rational>) -> BigInt {
    exps.fold(BigInt::one(), |acc, e| acc.lcm(e.denom()))
}

fn to_biguint(n: &BigInt) -> BigUint {
    n.to_biguint().expect("nonnegative")
}

/// Multiplies `num`/`den` by `(p/q)^k` for integer `k`.
fn accumulate(num: &mut Vec<(BigUint, u64)>, den: &mut Vec<(BigUint, u64)>, base: &Rational, k: &BigInt) {
    let p = to_biguint(base.numer());
    let q = to_biguint(base.denom());
    let m = k.abs().to_u64().expect("exponent fits in u64");
    if k.is_positive() {
        num.push((p, m));
        den.push((q, m));
    } else if k.is_negative() {
        num.push((q, m));
        den.push((p, m));
    }
}

/// Lower and upper bounds on the bit length of `prod b_i^k_i`.
fn bit_bounds(parts: &[(BigUint, u64)]) -> (u64, u64) {
    let mut lo = 0u64;
    let mut hi = 0u64;
    for (b, k) in parts {
        if b.is_one() || *k == 0 {
            continue;
        }
        let bits = b.bits();
        lo += k * (bits - 1);
        hi += k * bits;
    }
    (lo + 1, hi.max(1))
}

fn evaluate(parts: &[(BigUint, u64)]) -> BigUint {
    parts.iter().fold(BigUint::one(), |acc, (b, k)| {
        acc * b.pow(u32::try_from(*k).expect("exponent fits in u32"))
    })
}

/// Exact comparison of two power products.
pub fn compare(lhs: &PowerProduct, rhs: &PowerProduct) -> Ordering {
    compare_with_witness(lhs, rhs).0
}

/// Exact comparison together with the sizes of the integers compared.
///
/// The ratio `lhs / rhs` is raised to the exponent-denominator LCM `L` and
/// split into numerator and denominator integers. Bit-length bounds settle
/// most comparisons before any large power is formed.
pub fn compare_with_witness(lhs: &PowerProduct, rhs: &PowerProduct) -> (Ordering, Comparison) {
    let ratio = lhs.mul(&rhs.recip());
    let l = exponent_lcm(ratio.factors.values());
    let power = l.to_u64().expect("exponent denominators fit in u64");
    let mut num = Vec::new();
    let mut den = Vec::new();
    accumulate(&mut num, &mut den, &ratio.coefficient, &l);
    for (b, e) in &ratio.factors {
        let k = (e * Rational::from_integer(l.clone())).to_integer();
        accumulate(&mut num, &mut den, b, &k);
    }
    let (nlo, nhi) = bit_bounds(&num);
    let (dlo, dhi) = bit_bounds(&den);
    if nhi < dlo {
        return (
            Ordering::Less,
            Comparison {
                power,
                lhs_bits: nhi,
                rhs_bits: dlo,
            },
        );
    }
    if dhi < nlo {
        return (
            Ordering::Greater,
            Comparison {
                power,
                lhs_bits: nlo,
                rhs_bits: dhi,
            },
        );
    }
    let c = Cleared {
        power,
        num: evaluate(&num),
        den: evaluate(&den),
    };
    (
        c.num.cmp(&c.den),
        Comparison {
            power: c.power,
            lhs_bits: c.num.bits(),
            rhs_bits: c.den.bits(),
        },
    )
}

/// Second route for auditing [`compare`]: each side is raised to the common
/// power separately and evaluated as an exact rational, then the two
/// rationals are compared by cross-multiplication.
pub fn compare_audit(lhs: &PowerProduct, rhs: &PowerProduct) -> Ordering {
    let l = exponent_lcm(lhs.factors.values().chain(rhs.factors.values()));
    let side = |p: &PowerProduct| -> (BigInt, BigInt) {
        let mut n = BigInt::one();
        let mut d = BigInt::one();
        let mut apply = |b: &Rational, k: BigInt| {
            let m = k.abs().to_u32().expect("exponent fits in u32");
            if k.is_positive() {
                n *= b.numer().pow(m);
                d *= b.denom().pow(m);
            } else {
                n *= b.denom().pow(m);
                d *= b.numer().pow(m);
            }
        };
        apply(&p.coefficient, l.clone());
        for (b, e) in &p.factors {
            apply(b, (e * Rational::from_integer(l.clone())).to_integer());
        }
        (n, d)
    };
    let (ln, ld) = side(lhs);
    let (rn, rd) = side(rhs);
    (ln * rd).cmp(&(rn * ld))
}
