//! Bag-table dynamic program over a decomposition of the primal graph, for
//! programs whose solutions are confined to `[-X, X]^n`.

use std::collections::BTreeMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::decomposition::{NiceKind, TreeDecomposition};
use super::{lex_weights, Trail};
use crate::error::{Error, Result};
use crate::ilp::{Instance, SolveReport};
use crate::structure::primal_graph;

type Table = BTreeMap<Vec<BigInt>, (BigInt, Rc<Trail>)>;

/// Minimizer of `w x` over `A x = b, l <= x <= u, |x|_inf <= X`, ties broken
/// toward the lexicographically smallest point.
pub fn solve_primal_dp(inst: &Instance, bound: &BigInt) -> Result<SolveReport> {
    let td = TreeDecomposition::for_graph(&primal_graph(inst.a()));
    solve_primal_dp_with(inst, bound, &td)
}

pub fn solve_primal_dp_with(inst: &Instance, bound: &BigInt, td: &TreeDecomposition) -> Result<SolveReport> {
    if bound.is_negative() {
        return Err(Error::Invalid(format!("norm bound must be nonnegative, got {bound}")));
    }
    td.validate(&primal_graph(inst.a()))?;
    let (n, m) = (inst.n(), inst.m());
    let a = inst.a();
    let mut report = SolveReport::infeasible();
    report.bump("dp_width", td.width() as u64);

    let neg = -bound;
    let domains: Vec<(BigInt, BigInt)> = (0..n)
        .map(|j| (inst.l()[j].max_int(&neg), inst.u()[j].min_int(bound)))
        .collect();
    if domains.iter().any(|(lo, hi)| lo > hi) {
        return Ok(report);
    }
    let supports: Vec<Vec<usize>> = (0..m).map(|i| a.row_support(i)).collect();
    if (0..m).any(|i| supports[i].is_empty() && !inst.b()[i].is_zero()) {
        return Ok(report);
    }

    let nice = td.nice();
    let forget_at = nice.forget_positions(n);
    let mut rows_at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, support) in supports.iter().enumerate() {
        if let Some(pos) = support.iter().filter_map(|&j| forget_at[j]).min() {
            rows_at.entry(pos).or_default().push(i);
        }
    }
    let weights = lex_weights(inst.w(), bound);
    let cell_cap: BigInt = BigInt::from(2) * bound + 1;

    let mut tables: Vec<Option<Table>> = Vec::with_capacity(nice.nodes().len());
    let mut entries_total = 0u64;
    let mut largest = 0u64;
    for (idx, node) in nice.nodes().iter().enumerate() {
        let table: Table = match node.kind {
            NiceKind::Leaf => {
                let mut t = Table::new();
                t.insert(Vec::new(), (BigInt::zero(), Rc::new(Trail::Nil)));
                t
            }
            NiceKind::Introduce { child, vertex } => {
                let source = tables[child].take().expect("child table consumed once");
                let pos = node.bag.binary_search(&vertex).expect("introduced vertex is in its bag");
                let (lo, hi) = &domains[vertex];
                let mut t = Table::new();
                for (key, entry) in source {
                    let mut val = lo.clone();
                    while &val <= hi {
                        let mut k = key.clone();
                        k.insert(pos, val.clone());
                        t.insert(k, entry.clone());
                        val += 1;
                    }
                }
                t
            }
            NiceKind::Forget { child, vertex } => {
                let source = tables[child].take().expect("child table consumed once");
                let child_bag = &nice.nodes()[child].bag;
                let pos = child_bag.binary_search(&vertex).expect("forgotten vertex is in the child bag");
                let checks = rows_at.get(&idx).map(Vec::as_slice).unwrap_or(&[]);
                let mut t = Table::new();
                for (key, (cost, trail)) in source {
                    let satisfied = checks.iter().all(|&i| {
                        let lhs: BigInt = supports[i]
                            .iter()
                            .map(|&j| a.get(i, j) * &key[child_bag.binary_search(&j).expect("row support is in the bag")])
                            .sum();
                        lhs == inst.b()[i]
                    });
                    if !satisfied {
                        continue;
                    }
                    let val = key[pos].clone();
                    let cost = cost + &weights[vertex] * &val;
                    let mut k = key;
                    k.remove(pos);
                    let better = t.get(&k).is_none_or(|(c, _)| cost < *c);
                    if better {
                        let trail = Rc::new(Trail::Cons(vertex, val, trail));
                        t.insert(k, (cost, trail));
                    }
                }
                t
            }
            NiceKind::Join(left, right) => {
                let lt = tables[left].take().expect("child table consumed once");
                let rt = tables[right].take().expect("child table consumed once");
                let mut t = Table::new();
                for (key, (lc, ltrail)) in lt {
                    if let Some((rc, rtrail)) = rt.get(&key) {
                        let trail = Rc::new(Trail::Join(ltrail, rtrail.clone()));
                        t.insert(key, (lc + rc, trail));
                    }
                }
                t
            }
        };
        let size = table.len() as u64;
        if BigInt::from(size) > cell_cap.pow(node.bag.len() as u32) {
            return Err(Error::ContractViolation(format!(
                "table of {size} entries exceeds (2X+1)^{} at node {idx}",
                node.bag.len()
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
    if let Some((_, trail)) = root.get(&Vec::new()) {
        let point = trail.assignment(n);
        let mut optimal = SolveReport::optimal(inst, point);
        optimal.stats = report.stats;
        return Ok(optimal);
    }
    Ok(report)
}
