//! Peeling sequences: validation, exact counting, enumeration, and the block
//! bookkeeping (simplified sequences, restrictions, extensions).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use dashmap::DashMap;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::geometry::{convex_layers, require_general_position, Kernel, PointSet};

/// Largest input for [`count_bruteforce`].
pub const BRUTEFORCE_MAX: usize = 12;
/// Largest input for the memoized engine (one bit per point).
pub const ENGINE_MAX: usize = 64;

/// Number of peeling sequences, arbitrary precision.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PeelCount(BigUint);

impl PeelCount {
    pub fn new(v: BigUint) -> Self {
        PeelCount(v)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }
}

impl From<u64> for PeelCount {
    fn from(v: u64) -> Self {
        PeelCount(BigUint::from(v))
    }
}

impl fmt::Display for PeelCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for PeelCount {
    type Err = num_bigint::ParseBigIntError;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.parse().map(PeelCount)
    }
}

impl Serialize for PeelCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for PeelCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Labels in removal order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PeelSequence(pub Vec<u32>);

impl PeelSequence {
    pub fn labels(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for PeelSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// A peeling sequence with every label replaced by the index of its block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimplifiedSequence(pub Vec<usize>);

impl SimplifiedSequence {
    pub fn multiplicities(&self, blocks: usize) -> Vec<usize> {
        let mut m = vec![0; blocks];
        for &b in &self.0 {
            m[b] += 1;
        }
        m
    }
}

/// Blocks render as `a`, `b`, `c`, ...; past `z` as `[k]`.
impl fmt::Display for SimplifiedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            if b < 26 {
                write!(f, "{}", (b'a' + b as u8) as char)?;
            } else {
                write!(f, "[{b}]")?;
            }
        }
        Ok(())
    }
}

/// Validated point set with its predicate kernel, ready for repeated
/// peeling queries.
#[derive(Debug, Clone)]
pub struct Peeler {
    labels: Vec<u32>,
    kernel: Kernel,
}

impl Peeler {
    pub fn new(s: &PointSet) -> Result<Self> {
        require_general_position(s)?;
        Ok(Self::new_unchecked(s))
    }

    /// Skips the general-position check; callers must have done it.
    pub fn new_unchecked(s: &PointSet) -> Self {
        Peeler {
            labels: s.labels().to_vec(),
            kernel: s.kernel(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn full_mask(&self) -> u64 {
        full_mask(self.len())
    }

    /// Extreme points of the remaining subset.
    pub fn extreme_mask(&self, mask: u64) -> u64 {
        self.kernel.extreme_mask(mask, 0)
    }

    fn index_map(&self) -> HashMap<u32, usize> {
        self.labels.iter().enumerate().map(|(i, &l)| (l, i)).collect()
    }

    fn check_capacity(&self, what: &'static str, max: usize) -> Result<()> {
        if self.len() > max {
            return Err(Error::Capacity {
                what,
                n: self.len(),
                max,
            });
        }
        Ok(())
    }

    pub fn count(&self, threads: usize) -> Result<PeelCount> {
        self.check_capacity("the counting engine", ENGINE_MAX)?;
        let engine = Engine {
            kernel: &self.kernel,
            factorials: (0..=self.len() as u64).map(factorial).collect(),
        };
        let full = self.full_mask();
        let total = if threads <= 1 {
            let mut memo = HashMap::new();
            engine.count_seq(full, 0, &mut memo)
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Precondition(e.to_string()))?;
            let memo = DashMap::new();
            pool.install(|| engine.count_par(full, 0, &memo))
        };
        Ok(PeelCount(total))
    }

    pub fn count_bruteforce(&self) -> Result<PeelCount> {
        self.check_capacity("the brute-force counter", BRUTEFORCE_MAX)?;
        let all: Vec<usize> = (0..self.len()).collect();
        Ok(PeelCount(self.brute(&all)))
    }

    fn brute(&self, remaining: &[usize]) -> BigUint {
        if remaining.is_empty() {
            return BigUint::one();
        }
        let mut total = BigUint::zero();
        for (pos, &v) in remaining.iter().enumerate() {
            if self.kernel.naive_is_extreme(v, remaining) {
                let mut rest = remaining.to_vec();
                rest.remove(pos);
                total += self.brute(&rest);
            }
        }
        total
    }

    /// Validity of a removal order given as point indices.
    fn is_valid_order(&self, order: &[usize]) -> bool {
        let mut remaining: Vec<usize> = (0..self.len()).collect();
        for &v in order {
            if !self.kernel.extreme_indices(&remaining).contains(&v) {
                return false;
            }
            remaining.retain(|&i| i != v);
        }
        true
    }

    pub fn is_peeling_sequence(&self, seq: &PeelSequence) -> Result<bool> {
        let order = self.permutation_indices(seq)?;
        Ok(self.is_valid_order(&order))
    }

    fn permutation_indices(&self, seq: &PeelSequence) -> Result<Vec<usize>> {
        if seq.len() != self.len() {
            return Err(Error::NotPermutation(format!(
                "length {} for {} points",
                seq.len(),
                self.len()
            )));
        }
        let map = self.index_map();
        let mut seen = vec![false; self.len()];
        seq.labels()
            .iter()
            .map(|l| {
                let &i = map
                    .get(l)
                    .ok_or_else(|| Error::NotPermutation(format!("unknown label {l}")))?;
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::NotPermutation(format!("label {l} repeated")));
                }
                Ok(i)
            })
            .collect()
    }

    pub fn enumerate(&self, limit: usize) -> Result<Enumerate<'_>> {
        self.check_capacity("enumeration", ENGINE_MAX)?;
        Ok(Enumerate {
            peeler: self,
            limit,
            emitted: 0,
            path: Vec::new(),
            stack: Vec::new(),
            started: false,
        })
    }

    /// Extreme indices of `mask` sorted by label.
    fn candidates_by_label(&self, mask: u64) -> Vec<usize> {
        let ext = self.extreme_mask(mask);
        let mut c: Vec<usize> = bits(ext).collect();
        c.sort_by_key(|&i| self.labels[i]);
        c
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

struct Engine<'k> {
    kernel: &'k Kernel,
    factorials: Vec<BigUint>,
}

/// Below this many remaining points the parallel engine recurses serially.
const PAR_CUTOFF: u32 = 10;

impl Engine<'_> {
    /// Returns the extreme mask, or `None` when the state is in convex
    /// position (then the count is `m!`).
    fn expand(&self, mask: u64, hint: u64) -> Option<u64> {
        let ext = self.kernel.extreme_mask(mask, hint);
        (ext != mask).then_some(ext)
    }

    fn count_seq(&self, mask: u64, hint: u64, memo: &mut HashMap<u64, BigUint>) -> BigUint {
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let total = match self.expand(mask, hint) {
            None => self.factorials[mask.count_ones() as usize].clone(),
            Some(ext) => bits(ext)
                .map(|v| {
                    let bit = 1u64 << v;
                    self.count_seq(mask & !bit, ext & !bit, memo)
                })
                .sum(),
        };
        memo.insert(mask, total.clone());
        total
    }

    fn count_par(&self, mask: u64, hint: u64, memo: &DashMap<u64, BigUint>) -> BigUint {
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let total = match self.expand(mask, hint) {
            None => self.factorials[mask.count_ones() as usize].clone(),
            Some(ext) => {
                let children: Vec<usize> = bits(ext).collect();
                let recurse = |v: &usize| {
                    let bit = 1u64 << *v;
                    self.count_par(mask & !bit, ext & !bit, memo)
                };
                if mask.count_ones() >= PAR_CUTOFF {
                    children.par_iter().map(recurse).sum()
                } else {
                    children.iter().map(recurse).sum()
                }
            }
        };
        // Concurrent inserts for one key always carry the same value.
        memo.insert(mask, total.clone());
        total
    }
}

/// Depth-first stream of peeling sequences, lexicographic by label.
pub struct Enumerate<'a> {
    peeler: &'a Peeler,
    limit: usize,
    emitted: usize,
    path: Vec<usize>,
    stack: Vec<Frame>,
    started: bool,
}

struct Frame {
    mask: u64,
    cands: Vec<usize>,
    pos: usize,
}

impl Enumerate<'_> {
    fn emit(&mut self) -> PeelSequence {
        self.emitted += 1;
        PeelSequence(self.path.iter().map(|&i| self.peeler.labels[i]).collect())
    }
}

impl Iterator for Enumerate<'_> {
    type Item = PeelSequence;

    fn next(&mut self) -> Option<PeelSequence> {
        if self.emitted >= self.limit {
            return None;
        }
        if !self.started {
            self.started = true;
            let full = self.peeler.full_mask();
            if full == 0 {
                return Some(self.emit());
            }
            self.stack.push(Frame {
                mask: full,
                cands: self.peeler.candidates_by_label(full),
                pos: 0,
            });
        }
        loop {
            let top = self.stack.last_mut()?;
            if top.pos == top.cands.len() {
                self.stack.pop();
                if !self.stack.is_empty() {
                    self.path.pop();
                }
                continue;
            }
            let v = top.cands[top.pos];
            top.pos += 1;
            let rest = top.mask & !(1u64 << v);
            self.path.push(v);
            if rest == 0 {
                let seq = self.emit();
                self.path.pop();
                return Some(seq);
            }
            let cands = self.peeler.candidates_by_label(rest);
            self.stack.push(Frame {
                mask: rest,
                cands,
                pos: 0,
            });
        }
    }
}

/// True iff every step of `seq` removes a point extreme in what remains.
pub fn is_peeling_sequence(s: &PointSet, seq: &PeelSequence) -> Result<bool> {
    Peeler::new(s)?.is_peeling_sequence(seq)
}

/// Direct recursion over extreme points without memoization or shortcuts,
/// using hull-free extremality tests. Kept as an independent oracle for
/// [`count`].
pub fn count_bruteforce(s: &PointSet) -> Result<PeelCount> {
    if s.len() > BRUTEFORCE_MAX {
        return Err(Error::Capacity {
            what: "the brute-force counter",
            n: s.len(),
            max: BRUTEFORCE_MAX,
        });
    }
    Peeler::new(s)?.count_bruteforce()
}

/// Memoized count over remaining-point bit sets, single-threaded.
pub fn count(s: &PointSet) -> Result<PeelCount> {
    count_with_threads(s, 1)
}

pub fn count_with_threads(s: &PointSet, threads: usize) -> Result<PeelCount> {
    if s.len() > ENGINE_MAX {
        return Err(Error::Capacity {
            what: "the counting engine",
            n: s.len(),
            max: ENGINE_MAX,
        });
    }
    Peeler::new(s)?.count(threads)
}

/// Collects up to `limit` peeling sequences in lexicographic label order.
pub fn enumerate(s: &PointSet, limit: usize) -> Result<Vec<PeelSequence>> {
    let p = Peeler::new(s)?;
    let out = p.enumerate(limit)?.collect();
    Ok(out)
}

/// Replaces each label of `seq` by the index of the block containing it.
pub fn simplify(
    s: &PointSet,
    blocks: &[BTreeSet<u32>],
    seq: &PeelSequence,
) -> Result<SimplifiedSequence> {
    let block_of = partition_index(&s.label_set(), blocks)?;
    let symbols = seq
        .labels()
        .iter()
        .map(|l| {
            block_of
                .get(l)
                .copied()
                .ok_or_else(|| Error::NotPermutation(format!("unknown label {l}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimplifiedSequence(symbols))
}

/// Maps each label to its block index, checking that `blocks` partition
/// `labels`.
pub fn partition_index(
    labels: &BTreeSet<u32>,
    blocks: &[BTreeSet<u32>],
) -> Result<HashMap<u32, usize>> {
    let mut block_of = HashMap::new();
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::NotPartition(format!("block {b} is empty")));
        }
        for &l in block {
            if !labels.contains(&l) {
                return Err(Error::NotPartition(format!("label {l} is not in the set")));
            }
            if block_of.insert(l, b).is_some() {
                return Err(Error::NotPartition(format!("label {l} is in two blocks")));
            }
        }
    }
    if let Some(l) = labels.iter().find(|l| !block_of.contains_key(l)) {
        return Err(Error::NotPartition(format!("label {l} is in no block")));
    }
    Ok(block_of)
}

/// Order-preserving restriction of `seq` to `subset`.
pub fn induced_subsequence(seq: &PeelSequence, subset: &BTreeSet<u32>) -> PeelSequence {
    PeelSequence(
        seq.labels()
            .iter()
            .copied()
            .filter(|l| subset.contains(l))
            .collect(),
    )
}

/// Extends a peeling sequence of the sub-configuration on `x` to one of `z`
/// whose restriction to `x` is `seq_x`.
///
/// Greedy rule: take the next point of `seq_x` when it is extreme in the
/// current remainder, otherwise the smallest-labeled extreme point outside
/// `x`. If every extreme point of the remainder lay in `x`, the remainder and
/// its `x`-part would share a hull, so the next `x`-point would be extreme;
/// hence an outside candidate always exists.
pub fn extend_peeling(z: &PointSet, x: &BTreeSet<u32>, seq_x: &PeelSequence) -> Result<PeelSequence> {
    let peeler = Peeler::new(z)?;
    if peeler.len() > ENGINE_MAX {
        return Err(Error::Capacity {
            what: "extension",
            n: peeler.len(),
            max: ENGINE_MAX,
        });
    }
    let map = peeler.index_map();
    for l in x {
        if !map.contains_key(l) {
            return Err(Error::UnknownLabel(*l));
        }
    }
    let sub = z.subset(x)?;
    if !Peeler::new_unchecked(&sub).is_peeling_sequence(seq_x)? {
        return Err(Error::Precondition("sequence is not a peeling sequence of the subset".into()));
    }
    let mut mask = peeler.full_mask();
    let mut next_x = seq_x.labels().iter().peekable();
    let mut out = Vec::with_capacity(z.len());
    while mask != 0 {
        let ext = peeler.extreme_mask(mask);
        let pick = match next_x.peek() {
            Some(&&l) if ext >> map[&l] & 1 == 1 => {
                next_x.next();
                map[&l]
            }
            _ => bits(ext)
                .filter(|&i| !x.contains(&peeler.labels[i]))
                .min_by_key(|&i| peeler.labels[i])
                .ok_or_else(|| Error::Construction("no extreme point outside the subset".into()))?,
        };
        out.push(peeler.labels[pick]);
        mask &= !(1u64 << pick);
    }
    Ok(PeelSequence(out))
}

/// Number of layer-by-layer peeling orders, the product of layer-size
/// factorials.
pub fn count_layer_sequences(s: &PointSet) -> Result<PeelCount> {
    let layers = convex_layers(s)?;
    Ok(PeelCount(
        layers
            .sizes()
            .into_iter()
            .map(|h| factorial(h as u64))
            .product(),
    ))
}
