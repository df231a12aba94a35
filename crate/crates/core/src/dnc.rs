//! Divide and conquer for specifications too large to enumerate directly.
//!
//! A specification above the threshold is split into halves `P1, P2` and `N1, N2`, each
//! quarter `(Pi, Nj)` is solved recursively, and the answers are recombined as
//! `(f11 & f12) | (f21 & f22)`. The result separates the full specification but is not
//! minimal in general.

use std::fmt;
use std::time::Instant;

use crate::enumerate::{synthesize, Outcome, SynthConfig, SynthStats, SynthesisResult};
use crate::formula::Formula;
use crate::oracle;
use crate::trace::Specification;

#[derive(Debug, Clone)]
pub struct DncConfig {
    /// Specifications with at most this many traces are solved directly.
    pub threshold: usize,
    /// Budget for each direct solve.
    pub leaf: SynthConfig,
}

impl Default for DncConfig {
    fn default() -> Self {
        Self { threshold: 8, leaf: SynthConfig::default() }
    }
}

/// Partition of a specification's positives and negatives, as indices into
/// [`Specification::positives`] and [`Specification::negatives`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    pub n1: Vec<usize>,
    pub n2: Vec<usize>,
}

impl SplitPlan {
    /// Non-empty positive parts, or a single empty part when there are no positives.
    fn positive_parts(&self) -> Vec<&[usize]> {
        parts(&self.p1, &self.p2)
    }

    fn negative_parts(&self) -> Vec<&[usize]> {
        parts(&self.n1, &self.n2)
    }
}

fn parts<'a>(a: &'a [usize], b: &'a [usize]) -> Vec<&'a [usize]> {
    let v: Vec<&[usize]> = [a, b].into_iter().filter(|p| !p.is_empty()).collect();
    if v.is_empty() {
        vec![a]
    } else {
        v
    }
}

/// Halves positives and negatives in canonical order; the first half gets the extra trace.
pub fn split(spec: &Specification) -> SplitPlan {
    let halve = |n: usize| {
        let k = n.div_ceil(2);
        ((0..k).collect(), (k..n).collect())
    };
    let (p1, p2) = halve(spec.positives().len());
    let (n1, n2) = halve(spec.negatives().len());
    SplitPlan { p1, p2, n1, n2 }
}

/// A leaf solve that ended without a separator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafFailure {
    /// Path of quarters from the root, e.g. `P1N2/P2N1`.
    pub leaf: String,
    pub outcome: Outcome,
    /// Totals over every leaf attempted.
    pub stats: SynthStats,
}

impl fmt::Display for LeafFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let leaf = if self.leaf.is_empty() { "root" } else { &self.leaf };
        write!(f, "leaf {leaf} stopped without a separator ({})", self.outcome.describe())
    }
}

impl std::error::Error for LeafFailure {}

#[derive(Default)]
struct Totals {
    constructed: u64,
    unique: usize,
    max_cost_reached: usize,
}

impl Totals {
    fn add(&mut self, s: &SynthStats) {
        self.constructed += s.constructed;
        self.unique += s.unique;
        self.max_cost_reached = self.max_cost_reached.max(s.max_cost_reached);
    }

    fn stats(&self, started: Instant, outcome: Outcome, minimal: bool) -> SynthStats {
        SynthStats {
            constructed: self.constructed,
            unique: self.unique,
            elapsed: started.elapsed(),
            max_cost_reached: self.max_cost_reached,
            outcome,
            minimal,
        }
    }
}

/// Solves `spec` by recursive splitting. `unique` in the returned stats is the sum over
/// leaves.
pub fn synthesize_dnc(
    spec: &Specification,
    config: &DncConfig,
) -> Result<SynthesisResult, LeafFailure> {
    let started = Instant::now();
    let mut totals = Totals::default();
    let threshold = config.threshold.max(2);
    if spec.len() <= threshold {
        let r = synthesize(spec, &config.leaf);
        return match r.formula {
            Some(_) => Ok(r),
            None => Err(LeafFailure { leaf: String::new(), outcome: r.stats.outcome, stats: r.stats }),
        };
    }
    match solve(spec, threshold, &config.leaf, String::new(), &mut totals) {
        Ok(formula) => {
            assert!(
                oracle::separates(spec, &formula),
                "recombined formula fails the reference separation check"
            );
            let cost = config.leaf.weights.cost(&formula);
            Ok(SynthesisResult {
                formula: Some(formula),
                cost: Some(cost),
                stats: totals.stats(started, Outcome::Found, false),
            })
        }
        Err((leaf, outcome)) => {
            Err(LeafFailure { leaf, outcome, stats: totals.stats(started, outcome, false) })
        }
    }
}

fn solve(
    spec: &Specification,
    threshold: usize,
    leaf: &SynthConfig,
    path: String,
    totals: &mut Totals,
) -> Result<Formula, (String, Outcome)> {
    if spec.len() <= threshold {
        let r = synthesize(spec, leaf);
        totals.add(&r.stats);
        return r.formula.ok_or((path, r.stats.outcome));
    }
    let plan = split(spec);
    let mut disjuncts = Vec::new();
    for (i, pos) in plan.positive_parts().into_iter().enumerate() {
        let mut conjuncts = Vec::new();
        for (j, neg) in plan.negative_parts().into_iter().enumerate() {
            let sub = spec.subset(pos, neg).expect("sub-specification of a valid specification");
            let name = format!("P{}N{}", i + 1, j + 1);
            let sub_path = if path.is_empty() { name } else { format!("{path}/{name}") };
            conjuncts.push(solve(&sub, threshold, leaf, sub_path, totals)?);
        }
        disjuncts.push(fold(conjuncts, Formula::and));
    }
    Ok(fold(disjuncts, Formula::or))
}

fn fold(items: Vec<Formula>, join: fn(Formula, Formula) -> Formula) -> Formula {
    items.into_iter().reduce(join).expect("at least one part")
}

/// `(f11 & f12) | (f21 & f22)` with empty parts left out.
pub fn recombine(quarters: Vec<Vec<Formula>>) -> Formula {
    fold(quarters.into_iter().map(|row| fold(row, Formula::and)).collect(), Formula::or)
}
