//! Augmentation: repeatedly apply Graver-best steps until none improves.
//!
//! A Graver-best step can be assembled from a weaker oracle that only
//! answers for one fixed step length `lambda` at a time, by asking it for
//! every length in a small candidate set derived from the bounds.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graver::{certified_graver_basis, graver_basis, GraverBasis};
use crate::ilp::{AugmentationRun, ExtInt, Instance, SolveReport, Status};
use crate::linalg::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    /// An improving step `h`, already scaled: `x + h` is the next point.
    Step(Vec<BigInt>),
    /// No improving step exists.
    Optimal,
    /// Some improving direction can be repeated forever.
    Unbounded,
}

/// Answers: given a feasible `x`, an improving step at least as good as every
/// `lambda * g` over Graver elements `g` and integers `lambda >= 1`.
pub trait GraverBestOracle: Send + Sync {
    fn best_step(&self, inst: &Instance, x: &[BigInt]) -> Result<StepOutcome>;

    fn counters(&self) -> BTreeMap<String, u64> {
        BTreeMap::new()
    }
}

/// Answers: given a feasible `x` and a step length `lambda`, a kernel vector
/// `h` with `x + lambda h` feasible and `w h <= w g` for every Graver element
/// `g` with `x + lambda g` feasible. The zero vector is a valid answer when no
/// such `g` improves.
pub trait LambdaOracle: Send + Sync {
    fn lambda_step(&self, inst: &Instance, x: &[BigInt], lambda: &BigInt) -> Result<Vec<BigInt>>;

    fn counters(&self) -> BTreeMap<String, u64> {
        BTreeMap::new()
    }
}

/// The candidate step lengths: for every coordinate and every nonzero
/// multiplier `mu` in `[-M, M]`, the largest `lambda >= 1` keeping
/// `l_i <= x_i + lambda mu <= u_i`, where that bound is finite.
pub fn build_lambda_set(x: &[BigInt], l: &[ExtInt], u: &[ExtInt], max_norm: &BigInt) -> Result<BTreeSet<BigInt>> {
    if l.len() != x.len() || u.len() != x.len() {
        return Err(Error::Dimension(format!(
            "point of length {} with bounds of length {} and {}",
            x.len(),
            l.len(),
            u.len()
        )));
    }
    let mut set = BTreeSet::new();
    for (i, xi) in x.iter().enumerate() {
        if !l[i].le_int(xi) || !u[i].ge_int(xi) {
            return Err(Error::Invalid(format!("coordinate {i} lies outside its bounds")));
        }
        let mut mu = BigInt::one();
        while &mu <= max_norm {
            if let ExtInt::Finite(hi) = &u[i] {
                let lambda = (hi - xi).div_floor(&mu);
                if lambda >= BigInt::one() {
                    set.insert(lambda);
                }
            }
            if let ExtInt::Finite(lo) = &l[i] {
                let lambda = (xi - lo).div_floor(&mu);
                if lambda >= BigInt::one() {
                    set.insert(lambda);
                }
            }
            mu += 1;
        }
    }
    Ok(set)
}

/// A Graver-best step found through a lambda oracle, unscaled, with its length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestStep {
    pub direction: Vec<BigInt>,
    pub lambda: BigInt,
    pub oracle_calls: u64,
}

/// Queries `oracle` once per candidate length and keeps the most improving
/// `lambda h`; ties go to the smaller length. `None` means no length improves.
pub fn graver_best_step(
    inst: &Instance,
    x: &[BigInt],
    oracle: &dyn LambdaOracle,
    max_norm: &BigInt,
) -> Result<Option<BestStep>> {
    let lambdas = build_lambda_set(x, inst.l(), inst.u(), max_norm)?;
    let mut best: Option<(BigInt, BestStep)> = None;
    let mut calls = 0u64;
    for lambda in lambdas {
        calls += 1;
        let h = oracle.lambda_step(inst, x, &lambda)?;
        check_step(inst, x, &h, &lambda)?;
        let value = &lambda * inst.objective(&h);
        if !value.is_negative() {
            continue;
        }
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, BestStep { direction: h, lambda, oracle_calls: 0 }));
        }
    }
    Ok(best.map(|(_, mut step)| {
        step.oracle_calls = calls;
        step
    }))
}

fn check_step(inst: &Instance, x: &[BigInt], h: &[BigInt], lambda: &BigInt) -> Result<()> {
    if h.len() != inst.n() {
        return Err(Error::ContractViolation(format!("step of length {} for {} variables", h.len(), inst.n())));
    }
    if inst.a().mul_vec(h)?.iter().any(|v| !v.is_zero()) {
        return Err(Error::ContractViolation("step is not in the kernel".into()));
    }
    let y: Vec<BigInt> = x.iter().zip(h).map(|(a, b)| a + lambda * b).collect();
    if !inst.within_bounds(&y) {
        return Err(Error::ContractViolation("step leaves the bounds".into()));
    }
    Ok(())
}

/// Turns a lambda oracle into a Graver-best oracle. `max_norm` must bound
/// `g_inf` of the matrix, and all bounds must be finite.
pub struct LambdaGraverBest<O> {
    inner: O,
    max_norm: BigInt,
    calls: AtomicU64,
}

impl<O: LambdaOracle> LambdaGraverBest<O> {
    pub fn new(inner: O, max_norm: BigInt) -> Self {
        LambdaGraverBest { inner, max_norm, calls: AtomicU64::new(0) }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: LambdaOracle> GraverBestOracle for LambdaGraverBest<O> {
    fn best_step(&self, inst: &Instance, x: &[BigInt]) -> Result<StepOutcome> {
        if !inst.has_finite_bounds() {
            return Err(Error::Invalid("step-length candidates need finite bounds".into()));
        }
        let found = graver_best_step(inst, x, &self.inner, &self.max_norm)?;
        Ok(match found {
            Some(step) => {
                self.calls.fetch_add(step.oracle_calls, Ordering::Relaxed);
                StepOutcome::Step(step.direction.iter().map(|v| v * &step.lambda).collect())
            }
            None => {
                let asked = build_lambda_set(x, inst.l(), inst.u(), &self.max_norm)?.len();
                self.calls.fetch_add(asked as u64, Ordering::Relaxed);
                StepOutcome::Optimal
            }
        })
    }

    fn counters(&self) -> BTreeMap<String, u64> {
        let mut out = self.inner.counters();
        out.insert("lambda_oracle_calls".into(), self.calls.load(Ordering::Relaxed));
        out
    }
}

/// The largest `lambda` with `x + lambda g` within bounds; `None` if unlimited.
fn max_step_length(inst: &Instance, x: &[BigInt], g: &[BigInt]) -> Option<BigInt> {
    let mut best: Option<BigInt> = None;
    for i in 0..x.len() {
        let limit = if g[i].is_positive() {
            inst.u()[i].finite().map(|hi| (hi - &x[i]).div_floor(&g[i]))
        } else if g[i].is_negative() {
            inst.l()[i].finite().map(|lo| (&x[i] - lo).div_floor(&-&g[i]))
        } else {
            continue;
        };
        if let Some(v) = limit {
            best = Some(best.map_or(v.clone(), |b| b.min(v)));
        }
    }
    best
}

fn check_dimension(basis: &GraverBasis, inst: &Instance) -> Result<()> {
    if basis.dimension() != inst.n() {
        return Err(Error::Dimension(format!(
            "basis for {} columns queried with {} variables",
            basis.dimension(),
            inst.n()
        )));
    }
    Ok(())
}

/// Graver-best oracle backed by a complete, explicitly enumerated basis.
#[derive(Clone, Debug)]
pub struct ExactGraverOracle {
    basis: GraverBasis,
}

impl ExactGraverOracle {
    pub fn new(basis: GraverBasis) -> Result<Self> {
        if !basis.certified() {
            return Err(Error::Uncertified { radius: basis.radius().to_string(), bound: "unknown".into() });
        }
        Ok(ExactGraverOracle { basis })
    }

    /// Computes the complete basis of `a` without a caller-chosen radius.
    pub fn for_matrix(a: &IntMatrix) -> Result<Self> {
        Self::new(certified_graver_basis(a)?)
    }

    pub fn basis(&self) -> &GraverBasis {
        &self.basis
    }
}

/// Builds the exact oracle from box enumeration; refuses uncertified radii.
pub fn exact_graver_oracle(a: &IntMatrix, radius: &BigInt) -> Result<ExactGraverOracle> {
    let basis = graver_basis(a, radius)?;
    if !basis.certified() {
        let bound = crate::graver::ginf_bound(a).map_or_else(|| "unknown".to_string(), |b| b.to_string());
        return Err(Error::Uncertified { radius: radius.to_string(), bound });
    }
    Ok(ExactGraverOracle { basis })
}

impl GraverBestOracle for ExactGraverOracle {
    fn best_step(&self, inst: &Instance, x: &[BigInt]) -> Result<StepOutcome> {
        check_dimension(&self.basis, inst)?;
        let mut best: Option<(BigInt, BigInt, &Vec<BigInt>)> = None;
        for g in self.basis.elements() {
            let wg = inst.objective(g);
            if !wg.is_negative() {
                continue;
            }
            let Some(lambda) = max_step_length(inst, x, g) else {
                return Ok(StepOutcome::Unbounded);
            };
            if lambda < BigInt::one() {
                continue;
            }
            let value = &lambda * &wg;
            let better = best.as_ref().is_none_or(|(v, l, _)| value < *v || (value == *v && lambda < *l));
            if better {
                best = Some((value, lambda, g));
            }
        }
        Ok(match best {
            Some((_, lambda, g)) => StepOutcome::Step(g.iter().map(|v| v * &lambda).collect()),
            None => StepOutcome::Optimal,
        })
    }
}

/// Lambda oracle backed by a complete basis: scans it for the best feasible element.
#[derive(Clone, Debug)]
pub struct ExactLambdaOracle {
    basis: GraverBasis,
}

impl ExactLambdaOracle {
    pub fn new(basis: GraverBasis) -> Result<Self> {
        if !basis.certified() {
            return Err(Error::Uncertified { radius: basis.radius().to_string(), bound: "unknown".into() });
        }
        Ok(ExactLambdaOracle { basis })
    }
}

impl LambdaOracle for ExactLambdaOracle {
    fn lambda_step(&self, inst: &Instance, x: &[BigInt], lambda: &BigInt) -> Result<Vec<BigInt>> {
        check_dimension(&self.basis, inst)?;
        let mut best: Option<(BigInt, &Vec<BigInt>)> = None;
        for g in self.basis.elements() {
            let y: Vec<BigInt> = x.iter().zip(g).map(|(a, b)| a + lambda * b).collect();
            if !inst.within_bounds(&y) {
                continue;
            }
            let wg = inst.objective(g);
            if best.as_ref().is_none_or(|(v, _)| wg < *v) {
                best = Some((wg, g));
            }
        }
        Ok(match best {
            Some((v, g)) if v.is_negative() => g.clone(),
            _ => vec![BigInt::zero(); inst.n()],
        })
    }
}

/// Runs the augmentation loop from the feasible point `x0`.
pub fn augment_to_optimum(inst: &Instance, x0: &[BigInt], oracle: &dyn GraverBestOracle) -> Result<SolveReport> {
    if !inst.is_feasible(x0)? {
        return Err(Error::Invalid("augmentation must start from a feasible point".into()));
    }
    let start = inst.objective(x0);
    let mut x = x0.to_vec();
    let mut steps = 0u64;
    loop {
        match oracle.best_step(inst, &x)? {
            StepOutcome::Step(h) => {
                check_step(inst, &x, &h, &BigInt::one())?;
                if !inst.objective(&h).is_negative() {
                    return Err(Error::ContractViolation("step does not improve the objective".into()));
                }
                for (xi, hi) in x.iter_mut().zip(&h) {
                    *xi += hi;
                }
                steps += 1;
            }
            StepOutcome::Optimal => {
                let gap = &start - inst.objective(&x);
                let mut report = SolveReport::optimal(inst, x);
                report.bump("augmentation_steps", steps);
                report.runs.push(AugmentationRun { steps, gap, dimension: inst.n() });
                return Ok(report);
            }
            StepOutcome::Unbounded => {
                let mut report = SolveReport::bare(Status::Unbounded, Some(x), None);
                report.bump("augmentation_steps", steps);
                return Ok(report);
            }
        }
    }
}
