//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero if any fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ltlf_synth::bits::{op_future, op_next, op_not, separates};
use ltlf_synth::cli;
use ltlf_synth::dnc::{synthesize_dnc, DncConfig};
use ltlf_synth::enumerate::Enumerator;
use ltlf_synth::layout::{cs_from_str, cs_to_string};
use ltlf_synth::oracle;
use ltlf_synth::{
    synthesize, Alphabet, CharacteristicMatrix, Formula, Layout, OpSet, Packing,
    Semantics, Specification, SynthConfig, Trace,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

mod common;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn single_thread(max_cost: usize) -> SynthConfig {
    SynthConfig { threads: 1, max_cost, time_budget: None, ..SynthConfig::default() }
}

fn example_one() -> Result<String, String> {
    let spec = common::load("spec1.trc");
    let started = Instant::now();
    let r = synthesize(&spec, &single_thread(20));
    let elapsed = started.elapsed();
    let f = r.formula.ok_or("no formula")?;
    ensure(r.cost == Some(4), || format!("cost {:?}", r.cost))?;
    ensure(oracle::separates(&spec, &f), || "oracle rejects the result".into())?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("{} cost 4 in {elapsed:?}", f.to_text(spec.alphabet())))
}

fn example_two() -> Result<String, String> {
    let spec = common::load("spec2.trc");
    let started = Instant::now();
    let r = synthesize(&spec, &SynthConfig { time_budget: None, ..SynthConfig::default() });
    let elapsed = started.elapsed();
    let f = r.formula.ok_or_else(|| format!("no formula ({:?})", r.stats.outcome))?;
    ensure(r.cost == Some(16), || format!("cost {:?}", r.cost))?;
    ensure(oracle::separates(&spec, &f), || "oracle rejects the result".into())?;
    Ok(format!(
        "{} cost 16, constructed {}, unique {}, {elapsed:?}",
        f.to_text(spec.alphabet()),
        r.stats.constructed,
        r.stats.unique
    ))
}

fn fixtures() -> Result<String, String> {
    let a = Alphabet::new(["s", "q", "u", "e", "g"]).unwrap();
    let tr = Trace::from_word(&a, "squeegee").unwrap();
    let spec = Specification::new(a.clone(), vec![tr.clone()], vec![]).unwrap();
    let sem = Semantics::new(&spec);
    let parse = |s: &str| Formula::parse(s, &a).unwrap();
    let cases = [("F g", 0, true), ("e", 2, false), ("F e", 2, true), ("F g U !F g", 0, true)];
    for (text, pos, expected) in cases {
        let f = parse(text);
        let o = oracle::sat(&tr, pos, &f).map_err(|e| e.to_string())?;
        let k = sem.evaluate(&f).row(sem.layout(), 0) >> pos & 1 == 1;
        ensure(o == expected && k == expected, || {
            format!("{text} at {pos}: oracle {o}, kernel {k}, want {expected}")
        })?;
    }
    for packing in [Packing::Dense, Packing::OnePerWord] {
        let l = Layout::from_parts(vec![5, 4], vec![true, false], packing);
        let cm = CharacteristicMatrix::from_rows(&l, &[cs_from_str("10011"), cs_from_str("1111")]);
        let next = op_next(&cm, &l);
        let not = op_not(&cm, &l);
        let got = [
            cs_to_string(next.row(&l, 0), 5),
            cs_to_string(not.row(&l, 0), 5),
            cs_to_string(next.row(&l, 1), 4),
            cs_to_string(op_future(&cm, &l).row(&l, 0), 5),
        ];
        ensure(got == ["00110", "01100", "1110", "11111"], || format!("{packing:?}: {got:?}"))?;
    }
    Ok("squeegee, X and not fixtures agree".into())
}

fn differential() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(1);
    let started = Instant::now();
    let cases = 2000;
    for i in 0..cases {
        let atoms = rng.gen_range(1..=3);
        let spec = common::random_spec(&mut rng, atoms, 1..=6, 1..=20);
        let size = rng.gen_range(1..=8);
        let f = common::random_formula(&mut rng, atoms, OpSet::all(), size);
        let packing = if i % 2 == 0 { Packing::Dense } else { Packing::OnePerWord };
        let sem = Semantics::with_packing(&spec, packing);
        let cm = sem.evaluate(&f);
        let expect = oracle::characteristic_rows(&spec, &f);
        ensure(cm.rows(sem.layout()) == expect, || {
            format!("mismatch on {} over\n{spec}", f.to_text(spec.alphabet()))
        })?;
        ensure(separates(&cm, sem.layout()) == oracle::separates(&spec, &f), || {
            format!("separation mismatch on {}", f.to_text(spec.alphabet()))
        })?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{cases} cases, 0 mismatches, {elapsed:?}"))
}

fn brute_force_agreement() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(2);
    let started = Instant::now();
    let max = 9;
    let (mut solved, mut unsolved) = (0, 0);
    for _ in 0..120 {
        let atoms = rng.gen_range(1..=2);
        let spec = common::random_spec(&mut rng, atoms, 1..=4, 1..=5);
        let brute = oracle::min_cost_bruteforce(&spec, OpSet::standard(), max).map(|(c, _)| c);
        let r = synthesize(&spec, &single_thread(max));
        ensure(r.cost == brute, || format!("synth {:?} vs brute {brute:?} on\n{spec}", r.cost))?;
        if brute.is_some() {
            solved += 1;
        } else {
            unsolved += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!("120 specs ({solved} solved, {unsolved} beyond cost {max}), {elapsed:?}"))
}

fn completeness() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(3);
    let mut checked = 0usize;
    for ops in [OpSet::standard(), OpSet::all()] {
        for _ in 0..3 {
            let spec = common::random_spec(&mut rng, 2, 3..=6, 2..=8);
            let mut e = Enumerator::new(&spec, SynthConfig { ops, ..single_thread(5) });
            for c in 1..=5 {
                e.expand_level(c, false);
            }
            for (cost, level) in oracle::all_formulas(2, ops, 5).iter().enumerate() {
                for f in level {
                    let words = e.semantics().evaluate(f).into_words();
                    let id = e.store().find(&words).ok_or_else(|| {
                        format!("{} missing from the store", f.to_text(spec.alphabet()))
                    })?;
                    ensure(e.store().cost_of(id) <= cost, || "representative costs more".into())?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} formulas of cost <= 5 all represented"))
}

fn cli_json(input: &str, threads: usize, max_cost: usize) -> Result<serde_json::Value, String> {
    let path = common::data(input);
    let args = [
        "ltlf-synth".to_string(),
        "synth".into(),
        "--input".into(),
        path.to_string_lossy().into_owned(),
        "--format".into(),
        "json".into(),
        "--threads".into(),
        threads.to_string(),
        "--max-cost".into(),
        max_cost.to_string(),
        "--batch-size".into(),
        "4096".into(),
    ];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(args, &mut out, &mut err);
    ensure(code != 1, || String::from_utf8_lossy(&err).into_owned())?;
    let mut v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    v.as_object_mut().ok_or("report is not an object")?.remove("elapsed_ms");
    Ok(v)
}

fn determinism() -> Result<String, String> {
    let n = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).max(4);
    for (input, max_cost) in [("spec1.trc", 20), ("spec2.trc", 11)] {
        let one = cli_json(input, 1, max_cost)?;
        let many = cli_json(input, n, max_cost)?;
        ensure(one == many, || format!("{input}: {one} vs {many}"))?;
    }
    Ok(format!("threads 1 and {n} give identical reports"))
}

fn divide_and_conquer() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(4);
    let leaf = SynthConfig { max_cost: 12, ..single_thread(12) };
    for i in 0..50 {
        let atoms = rng.gen_range(1..=3);
        let spec = common::random_spec(&mut rng, atoms, 12..=20, 1..=8);
        let r = synthesize_dnc(&spec, &DncConfig { threshold: 8, leaf: leaf.clone() })
            .map_err(|e| format!("spec {i}: {e}"))?;
        let f = r.formula.ok_or("no formula")?;
        ensure(oracle::separates(&spec, &f), || format!("spec {i} not separated"))?;
    }
    let spec = common::load("spec2.trc");
    let r = synthesize_dnc(&spec, &DncConfig { threshold: 8, leaf: single_thread(20) })
        .map_err(|e| e.to_string())?;
    let f = r.formula.ok_or("no formula")?;
    ensure(oracle::separates(&spec, &f), || "example 2 not separated".into())?;
    let cost = r.cost.unwrap();
    ensure(cost >= 16, || format!("dnc cost {cost} below the optimum"))?;
    Ok(format!("50 random specs separated; example 2 dnc cost {cost}"))
}

fn throughput() -> Result<String, String> {
    let spec = common::load("spec1.trc");
    let mut e = Enumerator::new(&spec, single_thread(12));
    let started = Instant::now();
    for c in 1..=12 {
        let report = e.expand_level(c, false);
        ensure(report.aborted.is_none(), || format!("level {c} aborted"))?;
    }
    let secs = started.elapsed().as_secs_f64();
    let rate = e.constructed() as f64 / secs;
    ensure(rate >= 1e6, || format!("example 1: {rate:.0} candidates/s"))?;

    // A larger run where the level sizes dominate the timing.
    let spec2 = common::load("spec2.trc");
    let mut e2 = Enumerator::new(&spec2, single_thread(11));
    let started = Instant::now();
    for c in 1..=11 {
        e2.expand_level(c, false);
    }
    let secs2 = started.elapsed().as_secs_f64();
    let rate2 = e2.constructed() as f64 / secs2;
    ensure(rate2 >= 1e6, || format!("example 2: {rate2:.0} candidates/s"))?;
    Ok(format!(
        "example 1 to cost 12: {} candidates at {:.1}M/s; example 2 to cost 11: {} at {:.1}M/s",
        e.constructed(),
        rate / 1e6,
        e2.constructed(),
        rate2 / 1e6
    ))
}

fn main() {
    let checks: [(&str, Check); 9] = [
        ("example 1 minimal cost 4 under 1s", example_one),
        ("example 2 minimal cost 16", example_two),
        ("oracle and kernel fixtures", fixtures),
        ("kernel vs oracle differential", differential),
        ("synthesis matches brute force", brute_force_agreement),
        ("enumeration completeness up to cost 5", completeness),
        ("thread-count determinism", determinism),
        ("divide and conquer soundness", divide_and_conquer),
        ("single-thread throughput", throughput),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
