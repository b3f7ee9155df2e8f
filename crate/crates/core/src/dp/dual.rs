//! Dynamic program over an incidence decomposition for programs whose
//! solutions have `|x|_1 <= X`.
//!
//! Each variable is split into its positive and negative parts; the DP works
//! with the canonical split `x+ = max(x, 0)`, `x- = max(-x, 0)`, so a state
//! stores `x` itself and charges `|x|` to the budget. Vertices `0..n` are
//! columns and `n..n+m` are rows. A row vertex in a bag carries the partial
//! sum of its constraint over the variables already forgotten.

use std::collections::BTreeMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::decomposition::{incidence_decomposition, NiceKind, TreeDecomposition};
use super::{lex_weights, Trail};
use crate::error::{Error, Result};
use crate::ilp::{ExtInt, Instance, SolveReport};
use crate::linalg::IntMatrix;
use crate::structure::incidence_graph;

/// Key: one entry per bag vertex (value or partial sum), then the budget spent.
type Entry = (BigInt, Rc<Trail>);
type Table = BTreeMap<Vec<BigInt>, Entry>;

pub fn solve_dual_dp(inst: &Instance, bound: &BigInt) -> Result<SolveReport> {
    let td = incidence_decomposition(inst.a());
    solve_dual_dp_with(inst, bound, &td)
}

/// Minimizer of `w x` over `A x = b, l <= x <= u, |x|_1 <= X`, ties broken
/// toward the lexicographically smallest point.
pub fn solve_dual_dp_with(inst: &Instance, bound: &BigInt, td: &TreeDecomposition) -> Result<SolveReport> {
    if bound.is_negative() {
        return Err(Error::Invalid(format!("norm bound must be nonnegative, got {bound}")));
    }
    let a = inst.a();
    td.validate(&incidence_graph(a))?;
    let n = inst.n();
    let mut report = SolveReport::infeasible();
    report.bump("dp_width", td.width() as u64);

    let neg = -bound;
    let domains: Vec<(BigInt, BigInt)> = (0..n)
        .map(|j| (inst.l()[j].max_int(&neg), inst.u()[j].min_int(bound)))
        .collect();
    if domains.iter().any(|(lo, hi)| lo > hi) {
        return Ok(report);
    }
    let a_max = std::cmp::max(a.norm_inf(), BigInt::from(1));
    let gamma = &a_max * bound;
    let weights = lex_weights(inst.w(), bound);
    let coef = |i: usize, j: usize| a.get(i, j);
    let cell_cap: BigInt = BigInt::from(2) * &gamma + 1;

    let nice = td.nice();
    let mut tables: Vec<Option<Table>> = Vec::with_capacity(nice.nodes().len());
    let mut entries_total = 0u64;
    let mut largest = 0u64;
    for (idx, node) in nice.nodes().iter().enumerate() {
        let bag = &node.bag;
        let table: Table = match node.kind {
            NiceKind::Leaf => {
                let mut t = Table::new();
                t.insert(vec![BigInt::zero()], (BigInt::zero(), Rc::new(Trail::Nil)));
                t
            }
            NiceKind::Introduce { child, vertex } => {
                let source = tables[child].take().expect("child table consumed once");
                let pos = bag.binary_search(&vertex).expect("introduced vertex is in its bag");
                let mut t = Table::new();
                for (key, entry) in source {
                    if vertex >= n {
                        let mut k = key;
                        k.insert(pos, BigInt::zero());
                        t.insert(k, entry);
                        continue;
                    }
                    let (lo, hi) = &domains[vertex];
                    let mut val = lo.clone();
                    while &val <= hi {
                        let mut k = key.clone();
                        k.insert(pos, val.clone());
                        if within_budget(&k, bag, n, bound) {
                            t.insert(k, entry.clone());
                        }
                        val += 1;
                    }
                }
                t
            }
            NiceKind::Forget { child, vertex } => {
                let source = tables[child].take().expect("child table consumed once");
                let child_bag = &nice.nodes()[child].bag;
                let pos = child_bag.binary_search(&vertex).expect("forgotten vertex is in the child bag");
                let mut t = Table::new();
                for (mut key, (cost, trail)) in source {
                    let (cost, trail) = if vertex < n {
                        let val = key[pos].clone();
                        let mut overflow = false;
                        for (p, &r) in child_bag.iter().enumerate() {
                            if r >= n {
                                let coeff = coef(r - n, vertex);
                                if !coeff.is_zero() {
                                    key[p] += coeff * &val;
                                    overflow |= key[p].abs() > gamma;
                                }
                            }
                        }
                        let last = key.len() - 1;
                        key[last] += val.abs();
                        if overflow || &key[last] > bound {
                            continue;
                        }
                        let cost = cost + &weights[vertex] * &val;
                        (cost, Rc::new(Trail::Cons(vertex, val, trail)))
                    } else {
                        let row = vertex - n;
                        let mut total = key[pos].clone();
                        for (p, &j) in child_bag.iter().enumerate() {
                            if j < n {
                                total += coef(row, j) * &key[p];
                            }
                        }
                        if total != inst.b()[row] {
                            continue;
                        }
                        (cost, trail)
                    };
                    key.remove(pos);
                    if t.get(&key).is_none_or(|(c, _)| cost < *c) {
                        t.insert(key, (cost, trail));
                    }
                }
                t
            }
            NiceKind::Join(left, right) => {
                let lt = tables[left].take().expect("child table consumed once");
                let rt = tables[right].take().expect("child table consumed once");
                let values = |key: &[BigInt]| -> Vec<BigInt> {
                    bag.iter().zip(key).filter(|(&v, _)| v < n).map(|(_, x)| x.clone()).collect()
                };
                let mut grouped: BTreeMap<Vec<BigInt>, Vec<(&Vec<BigInt>, &Entry)>> = BTreeMap::new();
                for (key, e) in &rt {
                    grouped.entry(values(key)).or_default().push((key, e));
                }
                let mut t = Table::new();
                for (lkey, (lc, ltrail)) in &lt {
                    let Some(partners) = grouped.get(&values(lkey)) else { continue };
                    for (rkey, (rc, rtrail)) in partners {
                        let mut key = lkey.clone();
                        let mut overflow = false;
                        for (p, &v) in bag.iter().enumerate() {
                            if v >= n {
                                key[p] += &rkey[p];
                                overflow |= key[p].abs() > gamma;
                            }
                        }
                        let last = key.len() - 1;
                        key[last] += &rkey[last];
                        if overflow || !within_budget(&key, bag, n, bound) {
                            continue;
                        }
                        let cost = lc + rc;
                        if t.get(&key).is_none_or(|(c, _)| cost < *c) {
                            t.insert(key, (cost, Rc::new(Trail::Join(ltrail.clone(), rtrail.clone()))));
                        }
                    }
                }
                t
            }
        };
        let size = table.len() as u64;
        let cap = cell_cap.pow(bag.len() as u32) * (bound + 1);
        if BigInt::from(size) > cap {
            return Err(Error::ContractViolation(format!(
                "table of {size} entries exceeds (2aX+1)^{}(X+1) at node {idx}",
                bag.len()
            )));
        }
        entries_total += size;
        largest = largest.max(size);
        tables.push(Some(table));
    }
    report.bump("dp_nodes", nice.nodes().len() as u64);
    report.bump("dp_table_entries", entries_total);
    report.bump("dp_max_table", largest);

    let root = tables.pop().flatten().expect("root table");
    if let Some((_, trail)) = root.values().min_by(|x, y| x.0.cmp(&y.0)) {
        let point = trail.assignment(n);
        let mut optimal = SolveReport::optimal(inst, point);
        optimal.stats = report.stats;
        return Ok(optimal);
    }
    Ok(report)
}

fn within_budget(key: &[BigInt], bag: &[usize], n: usize, bound: &BigInt) -> bool {
    let spent: BigInt = bag.iter().zip(key).filter(|(&v, _)| v < n).map(|(_, x)| x.abs()).sum();
    &(spent + &key[key.len() - 1]) <= bound
}

/// The split program over `(x+, x-, t, s)`:
/// `A x+ - A x- = b`, `x+ - x- - t = 0`, `sum(x+) + sum(x-) + s = X`,
/// with `x+, x-, s` in `[0, X]` and `t` in `[l, u]`.
pub fn split_instance(inst: &Instance, bound: &BigInt) -> Result<Instance> {
    if bound.is_negative() {
        return Err(Error::Invalid(format!("norm bound must be nonnegative, got {bound}")));
    }
    let (n, m) = (inst.n(), inst.m());
    let cols = 3 * n + 1;
    let mut a = IntMatrix::zeros(m + n + 1, cols);
    for i in 0..m {
        for j in 0..n {
            let v = inst.a().get(i, j);
            a.set(i, j, v.clone());
            a.set(i, n + j, -v);
        }
    }
    for j in 0..n {
        a.set(m + j, j, BigInt::from(1));
        a.set(m + j, n + j, BigInt::from(-1));
        a.set(m + j, 2 * n + j, BigInt::from(-1));
    }
    for j in 0..2 * n {
        a.set(m + n, j, BigInt::from(1));
    }
    a.set(m + n, 3 * n, BigInt::from(1));
    let mut b = inst.b().to_vec();
    b.extend(std::iter::repeat_n(BigInt::zero(), n));
    b.push(bound.clone());
    let mut w: Vec<BigInt> = inst.w().to_vec();
    w.extend(inst.w().iter().map(|x| -x));
    w.extend(std::iter::repeat_n(BigInt::zero(), n + 1));
    let zero = ExtInt::Finite(BigInt::zero());
    let cap = ExtInt::Finite(bound.clone());
    let mut l = vec![zero.clone(); 2 * n];
    let mut u = vec![cap.clone(); 2 * n];
    l.extend(inst.l().iter().cloned());
    u.extend(inst.u().iter().cloned());
    l.push(zero);
    u.push(cap);
    Instance::new(a, b, w, l, u)
}

/// `x = x+ - x-` from a point of [`split_instance`].
pub fn unsplit_point(split: &[BigInt], n: usize) -> Vec<BigInt> {
    (0..n).map(|j| &split[j] - &split[n + j]).collect()
}
