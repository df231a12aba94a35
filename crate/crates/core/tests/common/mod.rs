#![allow(dead_code)]

use std::path::PathBuf;

use ltlf_synth::{Alphabet, Formula, Op, OpSet, PropSet, Specification, Trace};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn load(name: &str) -> Specification {
    let text = std::fs::read_to_string(data(name)).expect("fixture exists");
    Specification::parse(&text).expect("fixture parses")
}

pub fn alphabet(n: usize) -> Alphabet {
    let names = ["a", "b", "c", "d", "e"];
    Alphabet::new(names[..n].iter().copied()).unwrap()
}

pub fn random_trace<R: Rng>(rng: &mut R, atoms: usize, len: usize) -> Trace {
    let steps = (0..len).map(|_| PropSet(rng.gen_range(0..1u32 << atoms))).collect();
    Trace::new(steps).unwrap()
}

/// Random formula with exactly `size` nodes.
pub fn random_formula<R: Rng>(rng: &mut R, atoms: usize, ops: OpSet, size: usize) -> Formula {
    assert!(size >= 1);
    if size == 1 {
        return Formula::Atom(rng.gen_range(0..atoms));
    }
    let choices: Vec<Op> = ops
        .iter()
        .filter(|op| op.arity() == 1 || size >= 3)
        .collect();
    let op = *choices.choose(rng).expect("an operator fits");
    if op.arity() == 1 {
        let c = random_formula(rng, atoms, ops, size - 1);
        return match op {
            Op::Not => Formula::not(c),
            Op::Next => Formula::next(c),
            _ => Formula::future(c),
        };
    }
    let left = rng.gen_range(1..size - 1);
    let l = random_formula(rng, atoms, ops, left);
    let r = random_formula(rng, atoms, ops, size - 1 - left);
    match op {
        Op::And => Formula::and(l, r),
        Op::Or => Formula::or(l, r),
        _ => Formula::until(l, r),
    }
}

/// Random specification with no trace in both sets. Traces within a set may repeat.
pub fn random_spec<R: Rng>(
    rng: &mut R,
    atoms: usize,
    traces: std::ops::RangeInclusive<usize>,
    lengths: std::ops::RangeInclusive<usize>,
) -> Specification {
    loop {
        let n = rng.gen_range(traces.clone());
        let p = rng.gen_range(0..=n);
        let mut all: Vec<Trace> = (0..n)
            .map(|_| {
                let len = rng.gen_range(lengths.clone());
                random_trace(rng, atoms, len)
            })
            .collect();
        let negatives = all.split_off(p);
        if let Ok(spec) = Specification::new(alphabet(atoms), all, negatives) {
            return spec;
        }
    }
}
