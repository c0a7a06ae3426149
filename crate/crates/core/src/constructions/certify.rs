//! Checking that every reachable state with all top blocks non-empty has
//! exactly one extreme point per block, and that it is the block's
//! outermost remaining point.

use std::collections::{BTreeMap, HashSet, VecDeque};

use dashmap::DashMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::BlockTree;
use crate::geometry::{Kernel, PointSet};
use crate::peeling::{bits, full_mask};
use crate::report::{ReportItem, VerificationReport, Verdict};

/// Violating states listed in a report, at most.
const MAX_VIOLATIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum StateCheck {
    /// The extreme points, one per block, all outermost.
    Ok(u64),
    /// Wrong number of extreme points, or two from one block.
    Invariant(u64),
    /// One per block, but not the outermost remaining one somewhere.
    Determinacy(u64),
}

struct Checker<'a> {
    kernel: Kernel,
    /// Per top block: point indices, innermost first.
    blocks: Vec<Vec<usize>>,
    block_masks: Vec<u64>,
    labels: &'a [u32],
}

impl<'a> Checker<'a> {
    fn new(s: &'a PointSet, tree: &BlockTree) -> Option<Self> {
        let mut blocks = Vec::new();
        for b in tree.top_blocks() {
            blocks.push(b.iter().map(|&l| s.index_of(l)).collect::<Option<Vec<usize>>>()?);
        }
        let block_masks = blocks
            .iter()
            .map(|b| b.iter().fold(0u64, |m, &i| m | 1 << i))
            .collect();
        Some(Checker {
            kernel: s.kernel(),
            blocks,
            block_masks,
            labels: s.labels(),
        })
    }

    fn all_active(&self, mask: u64) -> bool {
        self.block_masks.iter().all(|&b| b & mask != 0)
    }

    fn outermost(&self, mask: u64) -> Vec<usize> {
        self.blocks
            .iter()
            .map(|b| *b.iter().rev().find(|&&i| mask >> i & 1 == 1).unwrap())
            .collect()
    }

    fn check(&self, mask: u64) -> StateCheck {
        let cand = self.outermost(mask);
        let cand_mask = cand.iter().fold(0u64, |m, &i| m | 1 << i);
        // fast path: every other point strictly inside the candidates' simplex
        if cand.len() == self.kernel.dim() + 1
            && bits(mask & !cand_mask).all(|q| self.kernel.strictly_inside_simplex(q, &cand))
        {
            return StateCheck::Ok(cand_mask);
        }
        let ext = self.kernel.extreme_mask(mask, 0);
        let one_each = ext.count_ones() as usize == self.blocks.len()
            && self.block_masks.iter().all(|&b| (b & ext).count_ones() == 1);
        if !one_each {
            StateCheck::Invariant(ext)
        } else if ext != cand_mask {
            StateCheck::Determinacy(ext)
        } else {
            StateCheck::Ok(ext)
        }
    }

    fn label_list(&self, mask: u64) -> String {
        let mut l: Vec<u32> = bits(mask).map(|i| self.labels[i]).collect();
        l.sort_unstable();
        l.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }

    fn violation_item(&self, mask: u64, c: &StateCheck) -> Option<ReportItem> {
        let (kind, ext) = match c {
            StateCheck::Ok(_) => return None,
            StateCheck::Invariant(e) => ("invariant", *e),
            StateCheck::Determinacy(e) => ("determinacy", *e),
        };
        Some(ReportItem {
            id: format!("{kind}.{mask:x}"),
            statement: format!(
                "remaining {{{}}} has extreme points {{{}}}",
                self.label_list(mask),
                self.label_list(ext)
            ),
            verdict: Verdict::Refuted,
            comparison: None,
            note: String::new(),
        })
    }
}

/// Checks the one-extreme-point-per-block invariant over the top-level
/// partition of `tree`. Violations are report content, never errors.
pub fn verify_invariant(s: &PointSet, tree: &BlockTree, mode: Mode) -> VerificationReport {
    let mut report = VerificationReport::new(format!("block invariant, n = {}", s.len()));
    let Some(checker) = Checker::new(s, tree) else {
        report.push(fail_item("blocks", "block labels are not points of the set"));
        return report;
    };
    if s.len() > 64 {
        report.push(fail_item("capacity", "more than 64 points"));
        return report;
    }
    if tree.labels().len() != s.len() {
        report.push(fail_item("blocks", "block tree does not cover the point set"));
        return report;
    }
    let arity = checker.blocks.len();
    let (states, violations) = match mode {
        Mode::Exhaustive => exhaustive(&checker),
        Mode::Sampled { samples, seed } => sampled(&checker, samples, seed),
    };
    let how = match mode {
        Mode::Exhaustive => format!("{states} reachable states, exhaustive"),
        Mode::Sampled { samples, seed } => {
            format!("{states} distinct states from {samples} walks, seed {seed}")
        }
    };
    report.push(ReportItem {
        id: "invariant".into(),
        statement: format!("exactly {arity} extreme points, one per block, each its block's outermost"),
        verdict: Verdict::from_bool(violations.is_empty()),
        comparison: None,
        note: how,
    });
    for (mask, c) in violations.iter().take(MAX_VIOLATIONS) {
        report.push(checker.violation_item(*mask, c).unwrap());
    }
    report
}

fn fail_item(id: &str, msg: &str) -> ReportItem {
    ReportItem {
        id: id.into(),
        statement: msg.into(),
        verdict: Verdict::Refuted,
        comparison: None,
        note: String::new(),
    }
}

fn extreme_of(c: &StateCheck) -> u64 {
    match c {
        StateCheck::Ok(e) | StateCheck::Invariant(e) | StateCheck::Determinacy(e) => *e,
    }
}

/// Breadth-first over the peeling graph restricted to all-active states.
fn exhaustive(ch: &Checker) -> (usize, BTreeMap<u64, StateCheck>) {
    let full = full_mask(ch.labels.len());
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    let mut bad = BTreeMap::new();
    if ch.all_active(full) {
        seen.insert(full);
        queue.push_back(full);
    }
    while let Some(mask) = queue.pop_front() {
        let c = ch.check(mask);
        let ext = extreme_of(&c);
        if !matches!(c, StateCheck::Ok(_)) {
            bad.insert(mask, c);
            if bad.len() >= MAX_VIOLATIONS {
                break;
            }
        }
        for i in bits(ext) {
            let next = mask & !(1 << i);
            if ch.all_active(next) && seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    (seen.len(), bad)
}

/// Random peeling prefixes; sample `i` draws from its own stream so the
/// outcome does not depend on the thread count.
fn sampled(ch: &Checker, samples: usize, seed: u64) -> (usize, BTreeMap<u64, StateCheck>) {
    let full = full_mask(ch.labels.len());
    let cache: DashMap<u64, StateCheck> = DashMap::new();
    (0..samples).into_par_iter().for_each(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut mask = full;
        while ch.all_active(mask) {
            let c = match cache.get(&mask) {
                Some(c) => c.clone(),
                None => {
                    let c = ch.check(mask);
                    cache.insert(mask, c.clone());
                    c
                }
            };
            let ext: Vec<usize> = bits(extreme_of(&c)).collect();
            if !matches!(c, StateCheck::Ok(_)) || ext.is_empty() {
                break;
            }
            mask &= !(1 << ext[rng.gen_range(0..ext.len())]);
        }
    });
    let states = cache.len();
    let bad = cache
        .into_iter()
        .filter(|(_, c)| !matches!(c, StateCheck::Ok(_)))
        .collect();
    (states, bad)
}
