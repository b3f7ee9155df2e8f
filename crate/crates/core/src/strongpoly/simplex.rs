//! Exact two-phase simplex with Bland's rule, for the relaxation
//! `min w y : A y = b, l <= y <= u` over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::ilp::{ExtInt, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// A vertex optimum when `status` is `Optimal`.
    pub point: Option<Vec<BigRational>>,
    pub objective: Option<BigRational>,
    pub pivots: u64,
}

fn q(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

/// How an original variable is written in nonnegative standard-form columns.
enum Column {
    /// `x = offset + y_k`.
    Shifted { k: usize, offset: BigInt },
    /// `x = offset - y_k`.
    Mirrored { k: usize, offset: BigInt },
    /// `x = y_p - y_m`.
    Split { p: usize, m: usize },
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    width: usize,
    pivots: u64,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &BigRational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..self.rows.len() {
            if i != r && !self.rows[i][c].is_zero() {
                let f = self.rows[i][c].clone();
                for k in 0..=self.width {
                    let delta = &f * &self.rows[r][k];
                    self.rows[i][k] -= delta;
                }
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Minimizes `cost` over columns `allowed`; false when unbounded.
    fn optimize(&mut self, cost: &[BigRational], allowed: usize) -> bool {
        loop {
            let reduced = |j: usize| -> BigRational {
                let mut v = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    v -= &cost[b] * &self.rows[i][j];
                }
                v
            };
            let Some(enter) = (0..allowed).find(|&j| !self.basis.contains(&j) && reduced(j).is_negative()) else {
                return true;
            };
            let mut leave: Option<(BigRational, usize, usize)> = None;
            for i in 0..self.rows.len() {
                let coeff = &self.rows[i][enter];
                if coeff.is_positive() {
                    let ratio = self.rhs(i) / coeff;
                    let better = match &leave {
                        None => true,
                        Some((best, _, var)) => ratio < *best || (ratio == *best && self.basis[i] < *var),
                    };
                    if better {
                        leave = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match leave {
                None => return false,
                Some((_, r, _)) => self.pivot(r, enter),
            }
        }
    }
}

/// Solves the linear relaxation of `inst` exactly.
pub fn solve_lp_relaxation(inst: &Instance) -> Result<LpSolution> {
    let (n, m) = (inst.n(), inst.m());
    let a = inst.a();
    let mut columns = Vec::with_capacity(n);
    let mut width = 0;
    let mut upper_rows: Vec<(usize, BigInt)> = Vec::new();
    for j in 0..n {
        match (inst.l()[j].finite(), inst.u()[j].finite()) {
            (Some(lo), hi) => {
                columns.push(Column::Shifted { k: width, offset: lo.clone() });
                if let Some(hi) = hi {
                    upper_rows.push((width, hi - lo));
                }
                width += 1;
            }
            (None, Some(hi)) => {
                columns.push(Column::Mirrored { k: width, offset: hi.clone() });
                width += 1;
            }
            (None, None) => {
                columns.push(Column::Split { p: width, m: width + 1 });
                width += 2;
            }
        }
    }
    let structural = width;
    let slack_start = width;
    width += upper_rows.len();
    let total_rows = m + upper_rows.len();

    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(total_rows);
    let mut cost = vec![BigRational::zero(); width];
    for i in 0..m {
        let mut row = vec![BigRational::zero(); width + 1];
        let mut rhs = q(&inst.b()[i]);
        for (j, col) in columns.iter().enumerate() {
            let v = q(a.get(i, j));
            match col {
                Column::Shifted { k, offset } => {
                    row[*k] += &v;
                    rhs -= &v * q(offset);
                }
                Column::Mirrored { k, offset } => {
                    row[*k] -= &v;
                    rhs -= &v * q(offset);
                }
                Column::Split { p, m } => {
                    row[*p] += &v;
                    row[*m] -= &v;
                }
            }
        }
        row[width] = rhs;
        rows.push(row);
    }
    for (s, (k, range)) in upper_rows.iter().enumerate() {
        let mut row = vec![BigRational::zero(); width + 1];
        row[*k] = BigRational::from_integer(1.into());
        row[slack_start + s] = BigRational::from_integer(1.into());
        row[width] = q(range);
        rows.push(row);
    }
    for (j, col) in columns.iter().enumerate() {
        let v = q(&inst.w()[j]);
        match col {
            Column::Shifted { k, .. } => cost[*k] += &v,
            Column::Mirrored { k, .. } => cost[*k] -= &v,
            Column::Split { p, m } => {
                cost[*p] += &v;
                cost[*m] -= &v;
            }
        }
    }
    let _ = structural;

    // Phase one: artificial columns width..width+rows.
    let art = rows.len();
    let full = width + art;
    let mut t = Tableau { rows: Vec::with_capacity(art), basis: Vec::with_capacity(art), width: full, pivots: 0 };
    for (i, row) in rows.into_iter().enumerate() {
        let negate = row[width].is_negative();
        let mut ext = vec![BigRational::zero(); full + 1];
        for k in 0..width {
            ext[k] = if negate { -&row[k] } else { row[k].clone() };
        }
        ext[width + i] = BigRational::from_integer(1.into());
        ext[full] = if negate { -&row[width] } else { row[width].clone() };
        t.rows.push(ext);
        t.basis.push(width + i);
    }
    let mut phase_one = vec![BigRational::zero(); full];
    for c in phase_one.iter_mut().skip(width) {
        *c = BigRational::from_integer(1.into());
    }
    t.optimize(&phase_one, full);
    let infeasibility: BigRational = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= width)
        .map(|(i, _)| t.rhs(i).clone())
        .sum();
    if infeasibility.is_positive() {
        return Ok(LpSolution { status: LpStatus::Infeasible, point: None, objective: None, pivots: t.pivots });
    }
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= width {
            if let Some(c) = (0..width).find(|&c| !t.rows[i][c].is_zero()) {
                t.pivot(i, c);
                i += 1;
            } else {
                t.rows.remove(i);
                t.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }
    for row in t.rows.iter_mut() {
        let rhs = row[full].clone();
        row.truncate(width);
        row.push(rhs);
    }
    t.width = width;
    if !t.optimize(&cost, width) {
        return Ok(LpSolution { status: LpStatus::Unbounded, point: None, objective: None, pivots: t.pivots });
    }
    let mut y = vec![BigRational::zero(); width];
    for (i, &b) in t.basis.iter().enumerate() {
        y[b] = t.rhs(i).clone();
    }
    let x: Vec<BigRational> = columns
        .iter()
        .map(|col| match col {
            Column::Shifted { k, offset } => q(offset) + &y[*k],
            Column::Mirrored { k, offset } => q(offset) - &y[*k],
            Column::Split { p, m } => &y[*p] - &y[*m],
        })
        .collect();
    let objective = x.iter().zip(inst.w()).map(|(v, c)| v * q(c)).sum();
    Ok(LpSolution { status: LpStatus::Optimal, point: Some(x), objective: Some(objective), pivots: t.pivots })
}

/// Whether `y` satisfies the relaxation's constraints exactly.
pub fn lp_feasible(inst: &Instance, y: &[BigRational]) -> bool {
    let a = inst.a();
    (0..inst.m()).all(|i| (0..inst.n()).map(|j| q(a.get(i, j)) * &y[j]).sum::<BigRational>() == q(&inst.b()[i]))
        && y.iter().zip(inst.l().iter().zip(inst.u())).all(|(v, (lo, hi))| {
            let above = match lo {
                ExtInt::Finite(b) => *v >= q(b),
                _ => true,
            };
            let below = match hi {
                ExtInt::Finite(b) => *v <= q(b),
                _ => true,
            };
            above && below
        })
}
