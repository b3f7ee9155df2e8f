//! Integer programs in standard form `min w x : A x = b, l <= x <= u`, and
//! a brute-force solver over finite boxes used as ground truth.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{dot, IntMatrix};

/// An integer extended by the two infinities, used for variable bounds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtInt {
    NegInf,
    Finite(BigInt),
    PosInf,
}

impl ExtInt {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            ExtInt::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtInt::Finite(_))
    }

    pub fn add(&self, v: &BigInt) -> ExtInt {
        match self {
            ExtInt::Finite(x) => ExtInt::Finite(x + v),
            other => other.clone(),
        }
    }

    pub fn sub(&self, v: &BigInt) -> ExtInt {
        match self {
            ExtInt::Finite(x) => ExtInt::Finite(x - v),
            other => other.clone(),
        }
    }

    pub fn le_int(&self, v: &BigInt) -> bool {
        match self {
            ExtInt::NegInf => true,
            ExtInt::Finite(x) => x <= v,
            ExtInt::PosInf => false,
        }
    }

    pub fn ge_int(&self, v: &BigInt) -> bool {
        match self {
            ExtInt::NegInf => false,
            ExtInt::Finite(x) => x >= v,
            ExtInt::PosInf => true,
        }
    }

    pub fn max_int(&self, v: &BigInt) -> BigInt {
        match self {
            ExtInt::Finite(x) if x > v => x.clone(),
            ExtInt::PosInf => panic!("max with +inf is not an integer"),
            _ => v.clone(),
        }
    }

    pub fn min_int(&self, v: &BigInt) -> BigInt {
        match self {
            ExtInt::Finite(x) if x < v => x.clone(),
            ExtInt::NegInf => panic!("min with -inf is not an integer"),
            _ => v.clone(),
        }
    }
}

impl From<i64> for ExtInt {
    fn from(v: i64) -> Self {
        ExtInt::Finite(v.into())
    }
}

impl From<BigInt> for ExtInt {
    fn from(v: BigInt) -> Self {
        ExtInt::Finite(v)
    }
}

impl Ord for ExtInt {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtInt::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
        }
    }
}

impl PartialOrd for ExtInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => write!(f, "-inf"),
            ExtInt::Finite(v) => write!(f, "{v}"),
            ExtInt::PosInf => write!(f, "+inf"),
        }
    }
}

/// An integer program `min w x : A x = b, l <= x <= u`. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    a: IntMatrix,
    b: Vec<BigInt>,
    w: Vec<BigInt>,
    l: Vec<ExtInt>,
    u: Vec<ExtInt>,
}

impl Instance {
    pub fn new(
        a: IntMatrix,
        b: Vec<BigInt>,
        w: Vec<BigInt>,
        l: Vec<ExtInt>,
        u: Vec<ExtInt>,
    ) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if b.len() != m {
            return Err(Error::Dimension(format!("b has length {}, A has {m} rows", b.len())));
        }
        for (name, len) in [("w", w.len()), ("l", l.len()), ("u", u.len())] {
            if len != n {
                return Err(Error::Dimension(format!("{name} has length {len}, A has {n} columns")));
            }
        }
        if l.contains(&ExtInt::PosInf) || u.contains(&ExtInt::NegInf) {
            return Err(Error::Invalid("lower bounds may not be +inf nor upper bounds -inf".into()));
        }
        Ok(Instance { a, b, w, l, u })
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn b(&self) -> &[BigInt] {
        &self.b
    }

    pub fn w(&self) -> &[BigInt] {
        &self.w
    }

    pub fn l(&self) -> &[ExtInt] {
        &self.l
    }

    pub fn u(&self) -> &[ExtInt] {
        &self.u
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn with_objective(&self, w: Vec<BigInt>) -> Result<Self> {
        Instance::new(self.a.clone(), self.b.clone(), w, self.l.clone(), self.u.clone())
    }

    pub fn with_bounds(&self, l: Vec<ExtInt>, u: Vec<ExtInt>) -> Result<Self> {
        Instance::new(self.a.clone(), self.b.clone(), self.w.clone(), l, u)
    }

    pub fn with_rhs(&self, b: Vec<BigInt>) -> Result<Self> {
        Instance::new(self.a.clone(), b, self.w.clone(), self.l.clone(), self.u.clone())
    }

    pub fn has_finite_bounds(&self) -> bool {
        self.l.iter().chain(&self.u).all(ExtInt::is_finite)
    }

    pub fn within_bounds(&self, x: &[BigInt]) -> bool {
        x.iter().zip(self.l.iter().zip(&self.u)).all(|(v, (lo, hi))| lo.le_int(v) && hi.ge_int(v))
    }

    pub fn objective(&self, x: &[BigInt]) -> BigInt {
        dot(&self.w, x)
    }

    pub fn is_feasible(&self, x: &[BigInt]) -> Result<bool> {
        Ok(evaluate(self, x)?.feasible)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub feasible: bool,
    pub objective: BigInt,
}

pub fn evaluate(inst: &Instance, x: &[BigInt]) -> Result<Evaluation> {
    if x.len() != inst.n() {
        return Err(Error::Dimension(format!(
            "point of length {} for {} variables",
            x.len(),
            inst.n()
        )));
    }
    let feasible = inst.within_bounds(x) && inst.a.mul_vec(x)? == inst.b;
    Ok(Evaluation { feasible, objective: inst.objective(x) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Optimal => "Optimal",
            Status::Infeasible => "Infeasible",
            Status::Unbounded => "Unbounded",
        };
        f.write_str(s)
    }
}

/// One call of the augmentation loop: how many steps it took and how far the
/// objective travelled from start to finish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentationRun {
    pub steps: u64,
    pub gap: BigInt,
    pub dimension: usize,
}

impl AugmentationRun {
    /// `max(1, (2n-2) * ceil(log2(gap+1)))`.
    pub fn step_budget(&self) -> BigInt {
        let bits = BigInt::from(ceil_log2(&(&self.gap + 1u32)));
        let factor = BigInt::from(2 * self.dimension as u64) - BigInt::from(2);
        std::cmp::max(BigInt::from(1), factor.max(BigInt::zero()) * bits)
    }
}

/// `ceil(log2(v))` for `v >= 1`.
pub fn ceil_log2(v: &BigInt) -> u64 {
    assert!(v.is_positive(), "log of a non-positive number");
    let one = BigInt::from(1);
    if *v == one {
        return 0;
    }
    (v - &one).bits()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub status: Status,
    pub point: Option<Vec<BigInt>>,
    pub objective: Option<BigInt>,
    pub stats: BTreeMap<String, u64>,
    pub runs: Vec<AugmentationRun>,
}

impl SolveReport {
    pub fn infeasible() -> Self {
        SolveReport::bare(Status::Infeasible, None, None)
    }

    pub fn optimal(inst: &Instance, x: Vec<BigInt>) -> Self {
        let obj = inst.objective(&x);
        SolveReport::bare(Status::Optimal, Some(x), Some(obj))
    }

    pub fn bare(status: Status, point: Option<Vec<BigInt>>, objective: Option<BigInt>) -> Self {
        SolveReport { status, point, objective, stats: BTreeMap::new(), runs: Vec::new() }
    }

    pub fn bump(&mut self, key: &str, by: u64) {
        *self.stats.entry(key.to_string()).or_insert(0) += by;
    }
}

/// Per-variable finite ranges `[max(l, lo), min(u, hi)]` for enumeration.
pub fn effective_box(inst: &Instance, bbox: Option<&[(BigInt, BigInt)]>) -> Result<Vec<(BigInt, BigInt)>> {
    if let Some(b) = bbox {
        if b.len() != inst.n() {
            return Err(Error::Dimension(format!("box of length {} for {} variables", b.len(), inst.n())));
        }
    }
    (0..inst.n())
        .map(|i| {
            let lo = match (&inst.l[i], bbox) {
                (ExtInt::Finite(v), Some(b)) => v.max(&b[i].0).clone(),
                (ExtInt::Finite(v), None) => v.clone(),
                (_, Some(b)) => b[i].0.clone(),
                (_, None) => {
                    return Err(Error::Invalid(format!("variable {i} has no finite lower bound or box")))
                }
            };
            let hi = match (&inst.u[i], bbox) {
                (ExtInt::Finite(v), Some(b)) => v.min(&b[i].1).clone(),
                (ExtInt::Finite(v), None) => v.clone(),
                (_, Some(b)) => b[i].1.clone(),
                (_, None) => {
                    return Err(Error::Invalid(format!("variable {i} has no finite upper bound or box")))
                }
            };
            Ok((lo, hi))
        })
        .collect()
}

/// Visits every feasible point of `inst` inside `domains` in lexicographic order.
///
/// Rows are checked as soon as their last variable is fixed, and that
/// variable's value is solved for instead of scanned, so the enumeration only
/// branches on variables that close no row.
pub fn for_each_feasible<F>(inst: &Instance, domains: &[(BigInt, BigInt)], mut visit: F) -> Result<()>
where
    F: FnMut(&[BigInt]) -> ControlFlow<()>,
{
    let (m, n) = (inst.m(), inst.n());
    if domains.len() != n {
        return Err(Error::Dimension(format!("{} domains for {n} variables", domains.len())));
    }
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for r in 0..m {
        match inst.a.row_support(r).last() {
            Some(&j) => closing[j].push(r),
            None if !inst.b[r].is_zero() => return Ok(()),
            None => {}
        }
    }
    if domains.iter().any(|(lo, hi)| lo > hi) {
        return Ok(());
    }
    let mut search = Search { inst, domains, closing: &closing, x: Vec::with_capacity(n), partial: vec![BigInt::zero(); m] };
    let _ = search.descend(&mut visit);
    Ok(())
}

struct Search<'a> {
    inst: &'a Instance,
    domains: &'a [(BigInt, BigInt)],
    closing: &'a [Vec<usize>],
    x: Vec<BigInt>,
    partial: Vec<BigInt>,
}

impl Search<'_> {
    fn descend<F: FnMut(&[BigInt]) -> ControlFlow<()>>(&mut self, visit: &mut F) -> ControlFlow<()> {
        let k = self.x.len();
        if k == self.inst.n() {
            return visit(&self.x);
        }
        let (lo, hi) = &self.domains[k];
        if let Some(&r) = self.closing[k].first() {
            let coef = self.inst.a.get(r, k);
            let rest = &self.inst.b[r] - &self.partial[r];
            if !rest.is_multiple_of(coef) {
                return ControlFlow::Continue(());
            }
            let v = rest / coef;
            if &v < lo || &v > hi {
                return ControlFlow::Continue(());
            }
            return self.try_value(v, visit);
        }
        let mut v = lo.clone();
        while &v <= hi {
            self.try_value(v.clone(), visit)?;
            v += 1;
        }
        ControlFlow::Continue(())
    }

    fn try_value<F: FnMut(&[BigInt]) -> ControlFlow<()>>(&mut self, v: BigInt, visit: &mut F) -> ControlFlow<()> {
        let k = self.x.len();
        let a = &self.inst.a;
        let touched: Vec<usize> = (0..self.inst.m()).filter(|&r| !a.get(r, k).is_zero()).collect();
        for &r in &touched {
            self.partial[r] += a.get(r, k) * &v;
        }
        let ok = self.closing[k].iter().all(|&r| self.partial[r] == self.inst.b[r]);
        self.x.push(v.clone());
        let flow = if ok { self.descend(visit) } else { ControlFlow::Continue(()) };
        self.x.pop();
        for &r in &touched {
            self.partial[r] -= a.get(r, k) * &v;
        }
        flow
    }
}

/// Exhaustive minimisation over a finite box; ties go to the lexicographically
/// smallest point. Without a box every bound must be finite.
pub fn brute_force_solve(inst: &Instance, bbox: Option<&[(BigInt, BigInt)]>) -> Result<SolveReport> {
    brute_force_solve_filtered(inst, bbox, |_| true)
}

/// As [`brute_force_solve`] but only points accepted by `keep` count as feasible.
pub fn brute_force_solve_filtered<P>(inst: &Instance, bbox: Option<&[(BigInt, BigInt)]>, keep: P) -> Result<SolveReport>
where
    P: Fn(&[BigInt]) -> bool,
{
    let domains = effective_box(inst, bbox)?;
    let stop_at_first = inst.w.iter().all(Zero::is_zero);
    let mut best: Option<(BigInt, Vec<BigInt>)> = None;
    let mut visited = 0u64;
    for_each_feasible(inst, &domains, |x| {
        visited += 1;
        if !keep(x) {
            return ControlFlow::Continue(());
        }
        let obj = inst.objective(x);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, x.to_vec()));
        }
        if stop_at_first {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    let mut report = match best {
        Some((_, x)) => SolveReport::optimal(inst, x),
        None => SolveReport::infeasible(),
    };
    report.bump("feasible_points_visited", visited);
    Ok(report)
}

/// Every minimiser inside the box, in lexicographic order, with the optimum.
pub fn brute_force_optima(inst: &Instance, bbox: Option<&[(BigInt, BigInt)]>) -> Result<Option<(BigInt, Vec<Vec<BigInt>>)>> {
    let domains = effective_box(inst, bbox)?;
    let mut best: Option<(BigInt, Vec<Vec<BigInt>>)> = None;
    for_each_feasible(inst, &domains, |x| {
        let obj = inst.objective(x);
        match &mut best {
            Some((b, pts)) if obj == *b => pts.push(x.to_vec()),
            Some((b, _)) if obj > *b => {}
            _ => best = Some((obj, vec![x.to_vec()])),
        }
        ControlFlow::Continue(())
    })?;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_bigints;

    fn fin(v: &[i64]) -> Vec<ExtInt> {
        v.iter().map(|&x| ExtInt::from(x)).collect()
    }

    #[test]
    fn ext_int_order() {
        assert!(ExtInt::NegInf < ExtInt::from(-100));
        assert!(ExtInt::from(100) < ExtInt::PosInf);
        assert!(ExtInt::from(3) > ExtInt::from(2));
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let a = IntMatrix::from_i64(&[&[1, 1]]);
        let err = Instance::new(a, to_bigints(&[1, 2]), to_bigints(&[0, 0]), fin(&[0, 0]), fin(&[1, 1]));
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn brute_force_tiny_instance() {
        let a = IntMatrix::from_i64(&[&[1, 1]]);
        let inst = Instance::new(a, to_bigints(&[2]), to_bigints(&[0, 1]), fin(&[0, 0]), fin(&[2, 2])).unwrap();
        let rep = brute_force_solve(&inst, None).unwrap();
        assert_eq!(rep.status, Status::Optimal);
        assert_eq!(rep.point, Some(to_bigints(&[2, 0])));
        assert_eq!(rep.objective, Some(BigInt::zero()));
    }

    #[test]
    fn brute_force_parity_infeasible() {
        let a = IntMatrix::from_i64(&[&[2, 2]]);
        let inst = Instance::new(a, to_bigints(&[3]), to_bigints(&[0, 0]), fin(&[0, 0]), fin(&[3, 3])).unwrap();
        assert_eq!(brute_force_solve(&inst, None).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn brute_force_requires_a_box() {
        let a = IntMatrix::from_i64(&[&[1]]);
        let inst = Instance::new(a, to_bigints(&[0]), to_bigints(&[1]), vec![ExtInt::NegInf], fin(&[0])).unwrap();
        assert!(brute_force_solve(&inst, None).is_err());
        let bbox = [(BigInt::from(-2), BigInt::from(2))];
        assert_eq!(brute_force_solve(&inst, Some(&bbox)).unwrap().point, Some(to_bigints(&[0])));
    }

    #[test]
    fn lexicographic_tie_break() {
        let a = IntMatrix::from_i64(&[&[1, 1]]);
        let inst = Instance::new(a, to_bigints(&[1]), to_bigints(&[0, 0]), fin(&[-1, -1]), fin(&[2, 2])).unwrap();
        assert_eq!(brute_force_solve(&inst, None).unwrap().point, Some(to_bigints(&[-1, 2])));
        let (_, all) = brute_force_optima(&inst, None).unwrap().unwrap();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn step_budget_values() {
        let run = AugmentationRun { steps: 0, gap: BigInt::from(0), dimension: 3 };
        assert_eq!(run.step_budget(), BigInt::from(1));
        let run = AugmentationRun { steps: 0, gap: BigInt::from(7), dimension: 3 };
        assert_eq!(run.step_budget(), BigInt::from(12));
        let run = AugmentationRun { steps: 0, gap: BigInt::from(8), dimension: 1 };
        assert_eq!(run.step_budget(), BigInt::from(1));
        assert_eq!(ceil_log2(&BigInt::from(9)), 4);
        assert_eq!(ceil_log2(&BigInt::from(8)), 3);
    }
}
