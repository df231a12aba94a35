use ltlf_synth::enumerate::{Enumerator, OpWeights};
use ltlf_synth::oracle;
use ltlf_synth::{synthesize, Formula, Op, OpSet, Outcome, Packing, Semantics, SynthConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

mod common;

fn config(ops: OpSet, max_cost: usize) -> SynthConfig {
    SynthConfig { ops, max_cost, threads: 1, time_budget: None, ..SynthConfig::default() }
}

#[test]
fn minimal_against_brute_force() {
    let mut rng = StdRng::seed_from_u64(11);
    for ops in [OpSet::standard(), OpSet::all()] {
        for _ in 0..60 {
            let spec = common::random_spec(&mut rng, 2, 1..=4, 1..=5);
            let brute = oracle::min_cost_bruteforce(&spec, ops, 6);
            let r = synthesize(&spec, &config(ops, 6));
            match brute {
                Some((cost, _)) => {
                    assert_eq!(r.cost, Some(cost), "{spec}");
                    assert!(oracle::separates(&spec, r.formula.as_ref().unwrap()));
                    assert_eq!(r.formula.as_ref().unwrap().cost(), cost);
                    assert!(r.stats.minimal);
                }
                None => {
                    assert_eq!(r.formula, None, "{spec}");
                    assert_eq!(r.stats.outcome, Outcome::CostExhausted);
                }
            }
        }
    }
}

#[test]
fn results_are_sound() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..40 {
        let spec = common::random_spec(&mut rng, 3, 2..=8, 1..=10);
        let r = synthesize(&spec, &config(OpSet::standard(), 8));
        if let Some(f) = &r.formula {
            assert!(oracle::separates(&spec, f), "{}", f.to_text(spec.alphabet()));
            assert_eq!(Some(f.cost()), r.cost);
        }
    }
}

#[test]
fn every_small_formula_is_represented() {
    let mut rng = StdRng::seed_from_u64(13);
    for ops in [OpSet::standard(), OpSet::all()] {
        let spec = common::random_spec(&mut rng, 2, 3..=5, 2..=6);
        let mut e = Enumerator::new(&spec, config(ops, 5));
        for c in 1..=5 {
            let report = e.expand_level(c, false);
            assert_eq!(report.aborted, None);
        }
        let sem = e.semantics();
        for (cost, level) in oracle::all_formulas(2, ops, 5).iter().enumerate() {
            for f in level {
                let cm = sem.evaluate(f);
                let id = e.store().find(cm.words()).unwrap_or_else(|| {
                    panic!("{} has no representative", f.to_text(spec.alphabet()))
                });
                assert!(e.store().cost_of(id) <= cost);
            }
        }
    }
}

/// Replaces every subterm of cost at most `limit` by the stored formula with the same matrix.
fn canonical(f: &Formula, e: &Enumerator, limit: usize) -> Formula {
    if f.cost() <= limit {
        let id = e.store().find(e.semantics().evaluate(f).words()).expect("represented");
        return e.reconstruct(id);
    }
    let c = |g: &Formula| canonical(g, e, limit);
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(c(g)),
        Formula::Next(g) => Formula::next(c(g)),
        Formula::Future(g) => Formula::future(c(g)),
        Formula::And(a, b) => Formula::and(c(a), c(b)),
        Formula::Or(a, b) => Formula::or(c(a), c(b)),
        Formula::Until(a, b) => Formula::until(c(a), c(b)),
    }
}

#[test]
fn substituting_representatives_preserves_meaning() {
    let mut rng = StdRng::seed_from_u64(14);
    for _ in 0..10 {
        let spec = common::random_spec(&mut rng, 2, 2..=6, 1..=8);
        let mut e = Enumerator::new(&spec, config(OpSet::all(), 4));
        for c in 1..=4 {
            e.expand_level(c, false);
        }
        for _ in 0..50 {
            let size = rng.gen_range(1..=9);
            let f = common::random_formula(&mut rng, 2, OpSet::all(), size);
            let g = canonical(&f, &e, 4);
            assert!(g.cost() <= f.cost());
            assert_eq!(
                oracle::characteristic_rows(&spec, &f),
                oracle::characteristic_rows(&spec, &g),
                "{} vs {}",
                f.to_text(spec.alphabet()),
                g.to_text(spec.alphabet())
            );
        }
    }
}

#[test]
fn reconstruction_matches_stored_matrices() {
    let spec = common::load("spec2.trc");
    let mut e = Enumerator::new(&spec, config(OpSet::standard(), 6));
    for c in 1..=6 {
        e.expand_level(c, false);
    }
    let n = e.store().len() as u32;
    assert!(n >= 100);
    let sem = Semantics::new(&spec);
    let step = n / 100;
    for id in (0..n).step_by(step as usize).take(100) {
        let f = e.store().reconstruct(id);
        assert_eq!(sem.evaluate(&f).words(), e.store().cm(id));
        assert_eq!(f.cost(), e.store().cost_of(id));
        let rows = oracle::characteristic_rows(&spec, &f);
        assert_eq!(sem.evaluate(&f).rows(sem.layout()), rows);
    }
}

#[test]
fn store_holds_distinct_matrices() {
    let spec = common::load("spec1.trc");
    let mut e = Enumerator::new(&spec, config(OpSet::standard(), 5));
    for c in 1..=5 {
        e.expand_level(c, false);
    }
    let mut seen = std::collections::HashSet::new();
    for id in 0..e.store().len() as u32 {
        assert!(seen.insert(e.store().cm(id).to_vec()));
    }
}

#[test]
fn thread_count_and_batching_do_not_change_results() {
    let mut rng = StdRng::seed_from_u64(15);
    let mut specs: Vec<_> = (0..8).map(|_| common::random_spec(&mut rng, 3, 4..=10, 2..=10)).collect();
    specs.push(common::load("spec1.trc"));
    for spec in &specs {
        let base = synthesize(spec, &config(OpSet::standard(), 9));
        for (threads, batch) in [(1, 7), (4, 1 << 16), (4, 3), (2, 1000)] {
            let cfg = SynthConfig { threads, batch_size: batch, ..config(OpSet::standard(), 9) };
            let r = synthesize(spec, &cfg);
            assert_eq!(r.formula, base.formula);
            assert_eq!(r.cost, base.cost);
            assert_eq!(r.stats.constructed, base.stats.constructed);
            assert_eq!(r.stats.unique, base.stats.unique);
        }
    }
}

#[test]
fn packings_give_the_same_search() {
    let spec = common::load("spec1.trc");
    let dense = synthesize(&spec, &config(OpSet::standard(), 6));
    let sparse = synthesize(
        &spec,
        &SynthConfig { packing: Packing::OnePerWord, ..config(OpSet::standard(), 6) },
    );
    assert_eq!(dense.formula, sparse.formula);
    assert_eq!(dense.stats.constructed, sparse.stats.constructed);
    assert_eq!(dense.stats.unique, sparse.stats.unique);
}

#[test]
fn weighted_costs_stay_minimal() {
    let mut rng = StdRng::seed_from_u64(16);
    let weights = OpWeights::uniform().set(Op::Until, 3).set(Op::Next, 2);
    for _ in 0..30 {
        let spec = common::random_spec(&mut rng, 2, 1..=4, 1..=4);
        let cfg = SynthConfig { weights, ..config(OpSet::standard(), 7) };
        let r = synthesize(&spec, &cfg);
        // brute force over node counts, minimising weighted cost
        let best = oracle::all_formulas(2, OpSet::standard(), 7)
            .into_iter()
            .flatten()
            .filter(|f| oracle::separates(&spec, f))
            .map(|f| weights.cost(&f))
            .filter(|&c| c <= 7)
            .min();
        assert_eq!(r.cost, best, "{spec}");
        if let Some(f) = &r.formula {
            assert_eq!(weights.cost(f), r.cost.unwrap());
        }
    }
}

#[test]
fn memory_budget_stops_search() {
    let spec = common::load("spec2.trc");
    let cfg = SynthConfig { memory_budget: 1 << 20, ..config(OpSet::standard(), 20) };
    let r = synthesize(&spec, &cfg);
    assert_eq!(r.stats.outcome, Outcome::MemoryExhausted);
    assert!(r.formula.is_none());
}

#[test]
fn time_budget_stops_search() {
    let spec = common::load("spec2.trc");
    let cfg = SynthConfig {
        time_budget: Some(std::time::Duration::from_millis(50)),
        ..config(OpSet::standard(), 20)
    };
    let r = synthesize(&spec, &cfg);
    assert_eq!(r.stats.outcome, Outcome::TimeExhausted);
}
