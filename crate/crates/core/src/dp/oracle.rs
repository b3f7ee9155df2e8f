//! Step-length oracles answering with a DP over the step space
//! `{h : A h = 0, l <= x + lambda h <= u, |h| <= M}`.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::decomposition::TreeDecomposition;
use super::dual::solve_dual_dp_with;
use super::primal::solve_primal_dp_with;
use crate::augment::LambdaOracle;
use crate::error::{Error, Result};
use crate::ilp::{ExtInt, Instance, SolveReport, Status};
use crate::linalg::IntMatrix;
use crate::structure::{incidence_graph, primal_graph};

/// The program over steps `h` for a fixed point and step length.
fn step_instance(inst: &Instance, x: &[BigInt], lambda: &BigInt) -> Result<Instance> {
    if !lambda.is_positive() {
        return Err(Error::Invalid(format!("step length must be positive, got {lambda}")));
    }
    if x.len() != inst.n() {
        return Err(Error::Dimension(format!("point of length {} for {} variables", x.len(), inst.n())));
    }
    let lower = inst
        .l()
        .iter()
        .zip(x)
        .map(|(l, xi)| match l.finite() {
            Some(v) => ExtInt::Finite(-((xi - v).div_floor(lambda))),
            None => ExtInt::NegInf,
        })
        .collect();
    let upper = inst
        .u()
        .iter()
        .zip(x)
        .map(|(u, xi)| match u.finite() {
            Some(v) => ExtInt::Finite((v - xi).div_floor(lambda)),
            None => ExtInt::PosInf,
        })
        .collect();
    Instance::new(inst.a().clone(), vec![BigInt::zero(); inst.m()], inst.w().to_vec(), lower, upper)
}

fn improving_part(inst: &Instance, report: SolveReport) -> Vec<BigInt> {
    match (report.status, report.point) {
        (Status::Optimal, Some(h)) if inst.objective(&h).is_negative() => h,
        _ => vec![BigInt::zero(); inst.n()],
    }
}

#[derive(Debug, Default)]
struct Counters {
    queries: AtomicU64,
    entries: AtomicU64,
}

impl Counters {
    fn record(&self, report: &SolveReport) {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let entries = report.stats.get("dp_table_entries").copied().unwrap_or(0);
        self.entries.fetch_add(entries, Ordering::Relaxed);
    }

    fn snapshot(&self) -> BTreeMap<String, u64> {
        BTreeMap::from([
            ("dp_queries".to_string(), self.queries.load(Ordering::Relaxed)),
            ("dp_table_entries".to_string(), self.entries.load(Ordering::Relaxed)),
        ])
    }
}

fn check_matrix(own: &IntMatrix, inst: &Instance) -> Result<()> {
    if own != inst.a() {
        return Err(Error::Dimension("oracle was built for a different constraint matrix".into()));
    }
    Ok(())
}

/// Steps with `|h|_inf <= M`, via the primal DP.
#[derive(Debug)]
pub struct PrimalDpOracle {
    a: IntMatrix,
    td: TreeDecomposition,
    max_norm: BigInt,
    counters: Counters,
}

impl PrimalDpOracle {
    pub fn decomposition(&self) -> &TreeDecomposition {
        &self.td
    }

    pub fn max_norm(&self) -> &BigInt {
        &self.max_norm
    }
}

/// `td` must decompose the primal graph of `a`; `max_norm` should be at least
/// the largest max-norm of a Graver element of `a`.
pub fn lambda_oracle_primal(a: &IntMatrix, td: TreeDecomposition, max_norm: BigInt) -> Result<PrimalDpOracle> {
    td.validate(&primal_graph(a))?;
    if max_norm.is_negative() {
        return Err(Error::Invalid("norm bound must be nonnegative".into()));
    }
    Ok(PrimalDpOracle { a: a.clone(), td, max_norm, counters: Counters::default() })
}

impl LambdaOracle for PrimalDpOracle {
    fn lambda_step(&self, inst: &Instance, x: &[BigInt], lambda: &BigInt) -> Result<Vec<BigInt>> {
        check_matrix(&self.a, inst)?;
        let steps = step_instance(inst, x, lambda)?;
        let report = solve_primal_dp_with(&steps, &self.max_norm, &self.td)?;
        self.counters.record(&report);
        Ok(improving_part(&steps, report))
    }

    fn counters(&self) -> BTreeMap<String, u64> {
        self.counters.snapshot()
    }
}

/// Steps with `|h|_1 <= M`, via the dual DP.
#[derive(Debug)]
pub struct DualDpOracle {
    a: IntMatrix,
    td: TreeDecomposition,
    max_norm: BigInt,
    counters: Counters,
}

impl DualDpOracle {
    pub fn decomposition(&self) -> &TreeDecomposition {
        &self.td
    }

    pub fn max_norm(&self) -> &BigInt {
        &self.max_norm
    }
}

/// `td` must decompose the incidence graph of `a` (columns `0..n`, rows
/// `n..n+m`); `max_norm` should be at least the largest 1-norm of a Graver
/// element of `a`.
pub fn lambda_oracle_dual(a: &IntMatrix, td: TreeDecomposition, max_norm: BigInt) -> Result<DualDpOracle> {
    td.validate(&incidence_graph(a))?;
    if max_norm.is_negative() {
        return Err(Error::Invalid("norm bound must be nonnegative".into()));
    }
    Ok(DualDpOracle { a: a.clone(), td, max_norm, counters: Counters::default() })
}

impl LambdaOracle for DualDpOracle {
    fn lambda_step(&self, inst: &Instance, x: &[BigInt], lambda: &BigInt) -> Result<Vec<BigInt>> {
        check_matrix(&self.a, inst)?;
        let steps = step_instance(inst, x, lambda)?;
        let report = solve_dual_dp_with(&steps, &self.max_norm, &self.td)?;
        self.counters.record(&report);
        Ok(improving_part(&steps, report))
    }

    fn counters(&self) -> BTreeMap<String, u64> {
        self.counters.snapshot()
    }
}
