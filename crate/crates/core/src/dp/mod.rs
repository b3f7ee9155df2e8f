//! Dynamic programs over tree decompositions, and the step oracles built on
//! them.

pub mod decomposition;
pub mod dual;
pub mod oracle;
pub mod primal;

use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::Zero;

pub use decomposition::{
    incidence_decomposition, incidence_from_dual, incidence_from_primal, NiceDecomposition, NiceKind, NiceNode, EXACT_TREEWIDTH_CAP,
    TreeDecomposition,
};
pub use dual::{solve_dual_dp, solve_dual_dp_with, split_instance, unsplit_point};
pub use oracle::{lambda_oracle_dual, lambda_oracle_primal, DualDpOracle, PrimalDpOracle};
pub use primal::{solve_primal_dp, solve_primal_dp_with};

/// Persistent record of the values fixed along a DP path.
#[derive(Debug)]
pub(crate) enum Trail {
    Nil,
    Cons(usize, BigInt, Rc<Trail>),
    Join(Rc<Trail>, Rc<Trail>),
}

impl Trail {
    pub(crate) fn assignment(&self, n: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); n];
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Trail::Nil => {}
                Trail::Cons(v, val, rest) => {
                    out[*v] = val.clone();
                    stack.push(rest);
                }
                Trail::Join(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        out
    }
}

/// Weights `P w_i + Q^(n-1-i)` with `Q = 2X+1`, `P = Q^n`. On `[-X, X]^n`
/// they order points by `w x` first and lexicographically second, with no
/// two points tied.
pub(crate) fn lex_weights(w: &[BigInt], bound: &BigInt) -> Vec<BigInt> {
    let n = w.len();
    let q: BigInt = BigInt::from(2) * bound + 1;
    let p = q.pow(n as u32);
    (0..n).map(|i| &p * &w[i] + q.pow((n - 1 - i) as u32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_bigints;

    #[test]
    fn lex_weights_separate_every_point() {
        let w = to_bigints(&[1, -1, 0]);
        let bound = BigInt::from(1);
        let weights = lex_weights(&w, &bound);
        let mut pts = Vec::new();
        for a in -1..=1 {
            for b in -1..=1 {
                for c in -1..=1 {
                    pts.push(to_bigints(&[a, b, c]));
                }
            }
        }
        let score = |x: &Vec<BigInt>| -> BigInt { x.iter().zip(&weights).map(|(a, b)| a * b).sum() };
        let key = |x: &Vec<BigInt>| -> (BigInt, Vec<BigInt>) { (x.iter().zip(&w).map(|(a, b)| a * b).sum(), x.clone()) };
        for x in &pts {
            for y in &pts {
                assert_eq!(score(x).cmp(&score(y)), key(x).cmp(&key(y)));
            }
        }
    }
}
