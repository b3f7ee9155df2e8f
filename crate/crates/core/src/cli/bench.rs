//! A small harness: random instances solved by several oracles, checked
//! against brute force and timed.

use std::collections::BTreeMap;
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::generate::{random_instance, RandomOptions, DEFAULT_SEED};
use super::{cmd_solve, OracleKind, SolveOptions};
use crate::error::Result;
use crate::ilp::{brute_force_solve, Instance};

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub count: usize,
    pub n: usize,
    pub m: usize,
    pub oracles: Vec<OracleKind>,
    pub workers: usize,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            count: 20,
            n: 4,
            m: 2,
            oracles: vec![OracleKind::Exact, OracleKind::PrimalDp, OracleKind::DualDp],
            workers: 1,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    agree: u64,
    disagree: u64,
    errors: u64,
    micros: u128,
}

fn run_one(inst: &Instance, oracles: &[OracleKind]) -> Result<Vec<Tally>> {
    let truth = brute_force_solve(inst, None)?;
    Ok(oracles
        .iter()
        .map(|&oracle| {
            let start = Instant::now();
            let got = cmd_solve(inst, &SolveOptions { oracle, ..Default::default() });
            let micros = start.elapsed().as_micros();
            let mut t = Tally { micros, ..Default::default() };
            match got {
                Ok(out) if out.report.status == truth.status && out.report.objective == truth.objective => t.agree = 1,
                Ok(_) => t.disagree = 1,
                Err(_) => t.errors = 1,
            }
            t
        })
        .collect())
}

/// Instances are drawn up front from one seeded stream, then split across
/// worker threads, so the report does not depend on `workers` except for
/// timings.
pub fn cmd_bench(opts: &BenchOptions) -> Result<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shape = RandomOptions { n: opts.n, m: opts.m, ..Default::default() };
    let instances: Vec<Instance> = (0..opts.count).map(|_| random_instance(&mut rng, &shape)).collect::<Result<_>>()?;
    let workers = opts.workers.max(1);
    let chunk = instances.len().div_ceil(workers).max(1);
    let results: Vec<Result<Vec<Vec<Tally>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = instances
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|inst| run_one(inst, &opts.oracles)).collect()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
    });
    let mut totals: BTreeMap<&'static str, Tally> = BTreeMap::new();
    for part in results {
        for row in part? {
            for (oracle, t) in opts.oracles.iter().zip(row) {
                let e = totals.entry(oracle.name()).or_default();
                e.agree += t.agree;
                e.disagree += t.disagree;
                e.errors += t.errors;
                e.micros += t.micros;
            }
        }
    }
    let per_oracle: serde_json::Map<String, Value> = totals
        .into_iter()
        .map(|(k, t)| {
            (k.to_string(), json!({ "agree": t.agree, "disagree": t.disagree, "errors": t.errors, "millis": (t.micros / 1000) as u64 }))
        })
        .collect();
    Ok(json!({
        "instances": opts.count,
        "n": opts.n,
        "m": opts.m,
        "seed": opts.seed,
        "oracles": per_oracle,
    }))
}
