//! Reference semantics by direct structural recursion.
//!
//! Nothing here is memoised or bit-packed. It is the ground truth the kernels and the
//! enumerator are tested against and must stay off the synthesis hot path.

use thiserror::Error;

use crate::formula::{Formula, Op, OpSet};
use crate::trace::{Specification, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("position {position} is outside a trace of length {length}")]
pub struct PositionOutOfRange {
    pub position: usize,
    pub length: usize,
}

/// `tr, i |= f` under finite-trace semantics.
pub fn sat(tr: &Trace, i: usize, f: &Formula) -> Result<bool, PositionOutOfRange> {
    if i >= tr.len() {
        return Err(PositionOutOfRange { position: i, length: tr.len() });
    }
    Ok(holds(tr, i, f))
}

/// Like [`sat`], but positions at or past the end of the trace satisfy nothing.
pub fn holds(tr: &Trace, i: usize, f: &Formula) -> bool {
    let n = tr.len();
    if i >= n {
        return false;
    }
    match f {
        Formula::Atom(p) => tr.holds(i, *p),
        Formula::Not(g) => !holds(tr, i, g),
        Formula::And(a, b) => holds(tr, i, a) && holds(tr, i, b),
        Formula::Or(a, b) => holds(tr, i, a) || holds(tr, i, b),
        Formula::Next(g) => holds(tr, i + 1, g),
        Formula::Future(g) => (i..n).any(|j| holds(tr, j, g)),
        Formula::Until(a, b) => {
            (i..n).any(|j| holds(tr, j, b) && (i..j).all(|k| holds(tr, k, a)))
        }
    }
}

/// Satisfaction at every position, bit `j` = position `j`.
pub fn characteristic_sequence(tr: &Trace, f: &Formula) -> u64 {
    (0..tr.len()).fold(0, |acc, j| acc | (u64::from(holds(tr, j, f)) << j))
}

/// Per-trace characteristic sequences in specification order.
pub fn characteristic_rows(spec: &Specification, f: &Formula) -> Vec<u64> {
    spec.traces().iter().map(|tr| characteristic_sequence(tr, f)).collect()
}

pub fn separates(spec: &Specification, f: &Formula) -> bool {
    spec.positives().iter().all(|tr| holds(tr, 0, f))
        && spec.negatives().iter().all(|tr| !holds(tr, 0, f))
}

/// Traces whose verdict at position 0 disagrees with their label.
pub fn violations(spec: &Specification, f: &Formula) -> Vec<usize> {
    spec.traces()
        .iter()
        .enumerate()
        .filter(|&(t, tr)| holds(tr, 0, f) != spec.is_positive(t))
        .map(|(t, _)| t)
        .collect()
}

/// Every formula of exactly `cost` nodes over `atoms` propositions using `ops`, for each
/// cost from 1 to `max_cost`.
///
/// Syntactically distinct formulas are all kept; no semantic merging happens.
pub fn all_formulas(atoms: usize, ops: OpSet, max_cost: usize) -> Vec<Vec<Formula>> {
    let mut by_cost: Vec<Vec<Formula>> = vec![Vec::new(); max_cost + 1];
    if max_cost == 0 {
        return by_cost;
    }
    by_cost[1] = (0..atoms).map(Formula::Atom).collect();
    for c in 2..=max_cost {
        let mut level = Vec::new();
        for op in ops.iter() {
            match op.arity() {
                1 => {
                    for g in &by_cost[c - 1] {
                        let g = g.clone();
                        level.push(match op {
                            Op::Not => Formula::not(g),
                            Op::Next => Formula::next(g),
                            _ => Formula::future(g),
                        });
                    }
                }
                _ => {
                    for lc in 1..c - 1 {
                        let rc = c - 1 - lc;
                        for l in &by_cost[lc] {
                            for r in &by_cost[rc] {
                                let (l, r) = (l.clone(), r.clone());
                                level.push(match op {
                                    Op::And => Formula::and(l, r),
                                    Op::Or => Formula::or(l, r),
                                    _ => Formula::until(l, r),
                                });
                            }
                        }
                    }
                }
            }
        }
        by_cost[c] = level;
    }
    by_cost
}

/// Smallest separating formula found by checking every formula in order of cost.
pub fn min_cost_bruteforce(
    spec: &Specification,
    ops: OpSet,
    max_cost: usize,
) -> Option<(usize, Formula)> {
    let formulas = all_formulas(spec.alphabet().len(), ops, max_cost);
    formulas
        .into_iter()
        .enumerate()
        .find_map(|(c, level)| level.into_iter().find(|f| separates(spec, f)).map(|f| (c, f)))
}
