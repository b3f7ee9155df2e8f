//! Solving an integer program with nothing but a Graver-best oracle for its
//! constraint matrix: an LP relaxation shrinks the bounds to a box around
//! the fractional optimum, an integer solution of the equalities seeds a
//! feasibility phase of auxiliary programs, and augmentation finishes.

mod simplex;

pub use simplex::{lp_feasible, solve_lp_relaxation, LpSolution, LpStatus};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::augment::{augment_to_optimum, GraverBestOracle};
use crate::error::Result;
use crate::graver::circuit_norm_inf;
use crate::ilp::{AugmentationRun, ExtInt, Instance, SolveReport, Status};
use crate::linalg::{integer_solve, norm_inf, IntMatrix};

/// Up to this many columns `c_inf` is read off the enumerated circuits.
pub const CIRCUIT_ENUMERATION_CAP: usize = 5;

/// A bounded instance together with the integer shift that maps its
/// solutions back: `x` solves the original iff `x - shift` solves this one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedInstance {
    pub instance: Instance,
    pub shift: Vec<BigInt>,
    /// The clamp `N` applied to every reduced bound.
    pub radius: BigInt,
}

impl ReducedInstance {
    pub fn lift(&self, x: &[BigInt]) -> Vec<BigInt> {
        x.iter().zip(&self.shift).map(|(a, b)| a + b).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    Reduced(ReducedInstance),
    Infeasible,
}

fn scale(a: &IntMatrix) -> BigInt {
    a.norm_inf().max(BigInt::from(2))
}

/// `ceil(sqrt(v))` for `v >= 0`.
fn ceil_sqrt(v: &BigInt) -> BigInt {
    let s = v.sqrt();
    if &(&s * &s) < v {
        s + 1
    } else {
        s
    }
}

/// `ceil(n^(n/2) a^n)` with `a = max(2, |A|_inf)`.
pub fn circuit_bound(a: &IntMatrix) -> BigInt {
    let n = a.cols() as u32;
    let sa = scale(a);
    ceil_sqrt(&(BigInt::from(n).pow(n) * sa.pow(2 * n)))
}

/// `ceil(n^(n/2+1) a^n) + 1`, the clamp applied to reduced bounds.
pub fn proximity_radius(a: &IntMatrix) -> BigInt {
    let n = a.cols() as u32;
    let sa = scale(a);
    ceil_sqrt(&(BigInt::from(n).pow(n + 2) * sa.pow(2 * n))) + 1
}

/// The largest max-norm of a circuit, enumerated exactly on narrow matrices
/// and otherwise replaced by `circuit_bound`.
pub fn proximity_cinf(a: &IntMatrix) -> Result<BigInt> {
    if a.cols() <= CIRCUIT_ENUMERATION_CAP {
        circuit_norm_inf(a)
    } else {
        Ok(circuit_bound(a))
    }
}

fn floor_rational(v: &BigRational) -> BigInt {
    v.floor().to_integer()
}

/// Shifts by `floor(y)` and clamps every bound into `[-N, N]`.
pub fn reduce_bounds(inst: &Instance, y: &[BigRational]) -> Result<Reduction> {
    let n = inst.n();
    if y.len() != n {
        return Err(crate::Error::Dimension(format!("relaxed point of length {} for {n} variables", y.len())));
    }
    let radius = proximity_radius(inst.a());
    let shift: Vec<BigInt> = y.iter().map(floor_rational).collect();
    let moved = inst.a().mul_vec(&shift)?;
    let b: Vec<BigInt> = inst.b().iter().zip(&moved).map(|(b, v)| b - v).collect();
    let rhs_cap = BigInt::from(n) * scale(inst.a()) * &radius;
    if norm_inf(&b) > rhs_cap {
        return Ok(Reduction::Infeasible);
    }
    let lower: Vec<BigInt> = inst.l().iter().zip(&shift).map(|(l, s)| l.sub(s).max_int(&-&radius)).collect();
    let upper: Vec<BigInt> = inst.u().iter().zip(&shift).map(|(u, s)| u.sub(s).min_int(&radius)).collect();
    if lower.iter().zip(&upper).any(|(l, u)| l > u) {
        return Ok(Reduction::Infeasible);
    }
    let instance = Instance::new(
        inst.a().clone(),
        b,
        inst.w().to_vec(),
        lower.into_iter().map(ExtInt::Finite).collect(),
        upper.into_iter().map(ExtInt::Finite).collect(),
    )?;
    Ok(Reduction::Reduced(ReducedInstance { instance, shift, radius }))
}

/// Any integer `z` with `A z = b`, bounds ignored.
pub fn hnf_solve(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    integer_solve(a, b)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeasibilityOutcome {
    pub point: Option<Vec<BigInt>>,
    pub auxiliary_solves: u64,
    /// Coordinates outside their bounds before each auxiliary solve, then
    /// after the last one.
    pub violations: Vec<usize>,
    pub runs: Vec<AugmentationRun>,
}

fn bound(v: &ExtInt) -> BigInt {
    v.finite().cloned().expect("reduced instances have finite bounds")
}

fn count_violations(x: &[BigInt], lo: &[BigInt], hi: &[BigInt]) -> usize {
    x.iter().zip(lo.iter().zip(hi)).filter(|(v, (l, h))| v < l || v > h).count()
}

/// Walks `z` into the bounds of `reduced` one coordinate at a time, in
/// ascending index order. Each auxiliary program pushes coordinate `i` as far
/// as it can towards its bound while the others keep their relaxed bounds.
pub fn feasibility_phase(
    reduced: &Instance,
    z: &[BigInt],
    oracle: &dyn GraverBestOracle,
) -> Result<FeasibilityOutcome> {
    let n = reduced.n();
    let target_lo: Vec<BigInt> = reduced.l().iter().map(bound).collect();
    let target_hi: Vec<BigInt> = reduced.u().iter().map(bound).collect();
    let mut lo: Vec<BigInt> = target_lo.iter().zip(z).map(|(l, v)| l.min(v).clone()).collect();
    let mut hi: Vec<BigInt> = target_hi.iter().zip(z).map(|(h, v)| h.max(v).clone()).collect();
    let mut x = z.to_vec();
    let mut out = FeasibilityOutcome::default();
    for i in 0..n {
        let below = x[i] < target_lo[i];
        let above = x[i] > target_hi[i];
        if !below && !above {
            lo[i] = target_lo[i].clone();
            hi[i] = target_hi[i].clone();
            continue;
        }
        out.violations.push(count_violations(&x, &target_lo, &target_hi));
        let mut w = vec![BigInt::zero(); n];
        w[i] = BigInt::from(if below { -1 } else { 1 });
        let aux = Instance::new(
            reduced.a().clone(),
            reduced.b().to_vec(),
            w,
            lo.iter().cloned().map(ExtInt::Finite).collect(),
            hi.iter().cloned().map(ExtInt::Finite).collect(),
        )?;
        let report = augment_to_optimum(&aux, &x, oracle)?;
        out.auxiliary_solves += 1;
        out.runs.extend(report.runs);
        x = report.point.expect("bounded augmentation returns a point");
        if x[i] < target_lo[i] || x[i] > target_hi[i] {
            out.violations.push(count_violations(&x, &target_lo, &target_hi));
            return Ok(out);
        }
        lo[i] = target_lo[i].clone();
        hi[i] = target_hi[i].clone();
    }
    out.violations.push(count_violations(&x, &target_lo, &target_hi));
    out.point = Some(x);
    Ok(out)
}

/// Solves `inst` with an oracle built once for its constraint matrix.
pub fn solve<F>(inst: &Instance, oracle_factory: F) -> Result<SolveReport>
where
    F: FnOnce(&IntMatrix) -> Result<Box<dyn GraverBestOracle>>,
{
    let oracle = oracle_factory(inst.a())?;
    solve_with(inst, oracle.as_ref())
}

pub fn solve_with(inst: &Instance, oracle: &dyn GraverBestOracle) -> Result<SolveReport> {
    let mut pivots = 0;
    let mut lp = solve_lp_relaxation(inst)?;
    pivots += lp.pivots;
    let unbounded = lp.status == LpStatus::Unbounded;
    let working = if unbounded {
        let flat = inst.with_objective(vec![BigInt::zero(); inst.n()])?;
        lp = solve_lp_relaxation(&flat)?;
        pivots += lp.pivots;
        flat
    } else {
        inst.clone()
    };
    let finish = |mut report: SolveReport, runs: Vec<AugmentationRun>, aux: u64| {
        report.bump("lp_pivots", pivots);
        report.bump("auxiliary_solves", aux);
        let steps: u64 = runs.iter().map(|r| r.steps).sum();
        report.stats.insert("augmentation_steps".into(), steps);
        report.runs = runs;
        for (k, v) in oracle.counters() {
            report.bump(&k, v);
        }
        report
    };
    let y = match (lp.status, lp.point) {
        (LpStatus::Optimal, Some(y)) => y,
        _ => return Ok(finish(SolveReport::infeasible(), Vec::new(), 0)),
    };
    let reduced = match reduce_bounds(&working, &y)? {
        Reduction::Reduced(r) => r,
        Reduction::Infeasible => return Ok(finish(SolveReport::infeasible(), Vec::new(), 0)),
    };
    let Some(z) = hnf_solve(reduced.instance.a(), reduced.instance.b())? else {
        return Ok(finish(SolveReport::infeasible(), Vec::new(), 0));
    };
    let phase = feasibility_phase(&reduced.instance, &z, oracle)?;
    let mut runs = phase.runs;
    let Some(start) = phase.point else {
        return Ok(finish(SolveReport::infeasible(), runs, phase.auxiliary_solves));
    };
    if unbounded {
        let report = SolveReport::bare(Status::Unbounded, Some(reduced.lift(&start)), None);
        return Ok(finish(report, runs, phase.auxiliary_solves));
    }
    let last = augment_to_optimum(&reduced.instance, &start, oracle)?;
    runs.extend(last.runs);
    let x = reduced.lift(last.point.as_deref().expect("bounded augmentation returns a point"));
    Ok(finish(SolveReport::optimal(inst, x), runs, phase.auxiliary_solves))
}

/// `|x - y|_inf` for an integer `x` and rational `y`.
pub fn distance_inf(x: &[BigInt], y: &[BigRational]) -> BigRational {
    x.iter()
        .zip(y)
        .map(|(a, b)| (BigRational::from_integer(a.clone()) - b).abs())
        .fold(BigRational::zero(), |m, d| if d > m { d } else { m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::ExactGraverOracle;
    use crate::ilp::brute_force_solve;
    use crate::linalg::to_bigints;

    fn fin(v: &[i64]) -> Vec<ExtInt> {
        v.iter().map(|&x| ExtInt::Finite(x.into())).collect()
    }

    fn exact(a: &IntMatrix) -> Result<Box<dyn GraverBestOracle>> {
        Ok(Box::new(ExactGraverOracle::for_matrix(a)?))
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn line() -> Instance {
        Instance::new(IntMatrix::from_i64(&[&[1, 1]]), to_bigints(&[2]), to_bigints(&[0, 1]), fin(&[0, 0]), fin(&[2, 2])).unwrap()
    }

    #[test]
    fn radii() {
        let a = IntMatrix::from_i64(&[&[1, 1]]);
        // 2^2 * 2^2 + 1
        assert_eq!(proximity_radius(&a), BigInt::from(17));
        assert_eq!(circuit_bound(&a), BigInt::from(8));
        // ceil(3^1.5 * 8) = ceil(41.56...)
        let b = IntMatrix::from_i64(&[&[1, 1, 1]]);
        assert_eq!(circuit_bound(&b), BigInt::from(42));
        assert_eq!(proximity_cinf(&b).unwrap(), BigInt::from(1));
    }

    #[test]
    fn reduction_shifts_by_the_floor() {
        let inst = line();
        let Reduction::Reduced(r) = reduce_bounds(&inst, &[rat(3, 2), rat(1, 2)]).unwrap() else { panic!() };
        assert_eq!(r.shift, to_bigints(&[1, 0]));
        assert_eq!(r.instance.b(), to_bigints(&[1]).as_slice());
        assert_eq!(r.instance.l(), fin(&[-1, 0]).as_slice());
        assert_eq!(r.instance.u(), fin(&[1, 2]).as_slice());
    }

    #[test]
    fn reduction_clamps_infinite_bounds() {
        let inst = line().with_bounds(vec![ExtInt::NegInf; 2], vec![ExtInt::PosInf; 2]).unwrap();
        let Reduction::Reduced(r) = reduce_bounds(&inst, &[rat(2, 1), rat(0, 1)]).unwrap() else { panic!() };
        assert_eq!(r.instance.l(), fin(&[-17, -17]).as_slice());
        assert_eq!(r.instance.u(), fin(&[17, 17]).as_slice());
    }

    #[test]
    fn hnf_cases() {
        let two = IntMatrix::from_i64(&[&[2]]);
        assert_eq!(hnf_solve(&two, &to_bigints(&[3])).unwrap(), None);
        assert_eq!(hnf_solve(&two, &to_bigints(&[4])).unwrap(), Some(to_bigints(&[2])));
        let a = IntMatrix::from_i64(&[&[1, 1]]);
        let z = hnf_solve(&a, &to_bigints(&[1])).unwrap().unwrap();
        assert_eq!(a.mul_vec(&z).unwrap(), to_bigints(&[1]));
    }

    #[test]
    fn feasibility_from_outside() {
        let inst = line();
        let oracle = ExactGraverOracle::for_matrix(inst.a()).unwrap();
        let out = feasibility_phase(&inst, &to_bigints(&[3, -1]), &oracle).unwrap();
        let p = out.point.unwrap();
        assert!(inst.is_feasible(&p).unwrap());
        assert!(out.violations.windows(2).all(|w| w[1] < w[0]));

        let inside = feasibility_phase(&inst, &to_bigints(&[1, 1]), &oracle).unwrap();
        assert_eq!(inside.auxiliary_solves, 0);
        assert_eq!(inside.point, Some(to_bigints(&[1, 1])));

        let empty = inst.with_rhs(to_bigints(&[5])).unwrap();
        assert_eq!(feasibility_phase(&empty, &to_bigints(&[5, 0]), &oracle).unwrap().point, None);
    }

    #[test]
    fn pipeline_statuses() {
        let rep = solve(&line(), exact).unwrap();
        assert_eq!(rep.status, Status::Optimal);
        assert_eq!(rep.objective, Some(BigInt::zero()));

        let parity = Instance::new(IntMatrix::from_i64(&[&[2]]), to_bigints(&[3]), to_bigints(&[1]), fin(&[0]), fin(&[5])).unwrap();
        let rep = solve(&parity, exact).unwrap();
        assert_eq!(rep.status, Status::Infeasible);
        assert_eq!(rep.stats["augmentation_steps"], 0);
        assert!(rep.runs.is_empty());

        let ray = Instance::new(
            IntMatrix::from_i64(&[&[1, -1]]),
            to_bigints(&[0]),
            to_bigints(&[-1, 0]),
            fin(&[0, 0]),
            vec![ExtInt::PosInf, ExtInt::PosInf],
        )
        .unwrap();
        let rep = solve(&ray, exact).unwrap();
        assert_eq!(rep.status, Status::Unbounded);
        assert!(ray.is_feasible(rep.point.as_ref().unwrap()).unwrap());

        let hole = ray.with_rhs(to_bigints(&[0])).unwrap().with_bounds(fin(&[0, 1]), vec![ExtInt::PosInf, ExtInt::Finite(0.into())]).unwrap();
        assert_eq!(solve(&hole, exact).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn pipeline_matches_brute_force_on_a_fixed_batch() {
        let rows: [&[&[i64]]; 3] = [&[&[1, 2, -1]], &[&[2, -1, 0], &[0, 1, 1]], &[&[1, 1, 1, 1], &[1, -1, 2, 0]]];
        for a in rows {
            let a = IntMatrix::from_i64(a);
            let n = a.cols();
            for rhs in -2..=2 {
                let b = vec![BigInt::from(rhs); a.rows()];
                let w: Vec<BigInt> = (0..n).map(|j| BigInt::from((j as i64 * 3) % 5 - 2)).collect();
                let inst = Instance::new(a.clone(), b, w, fin(&vec![-2; n]), fin(&vec![3; n])).unwrap();
                let got = solve(&inst, exact).unwrap();
                let want = brute_force_solve(&inst, None).unwrap();
                assert_eq!(got.status, want.status);
                assert_eq!(got.objective, want.objective);
                for run in &got.runs {
                    assert!(BigInt::from(run.steps) <= run.step_budget());
                }
            }
        }
    }
}
