//! Completion procedure: start from a symmetric lattice generating set and
//! keep adding reduced pairwise sums until every sum reduces to zero. The
//! result contains the Graver basis, which is then extracted by minimality.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{is_conformal_leq, minimal_elements, norm_inf, GraverBasis};
use crate::linalg::{integer_kernel, IntMatrix};

pub fn complete_graver_basis(a: &IntMatrix) -> GraverBasis {
    let kernel = integer_kernel(a);
    let mut set: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..kernel.cols() {
        let v = kernel.column(j);
        set.push(v.iter().map(|x| -x).collect());
        set.push(v);
    }
    let mut pairs: VecDeque<(usize, usize)> = VecDeque::new();
    for j in 0..set.len() {
        for i in 0..j {
            pairs.push_back((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop_front() {
        if same_orthant(&set[i], &set[j]) {
            continue;
        }
        let sum: Vec<BigInt> = set[i].iter().zip(&set[j]).map(|(x, y)| x + y).collect();
        let reduced = normal_form(sum, &set);
        if reduced.iter().all(Zero::is_zero) {
            continue;
        }
        let negated: Vec<BigInt> = reduced.iter().map(|x| -x).collect();
        for v in [reduced, negated] {
            let idx = set.len();
            for t in 0..idx {
                pairs.push_back((t, idx));
            }
            set.push(v);
        }
    }
    let elements = minimal_elements(set);
    let radius = elements.iter().map(|g| norm_inf(g)).max().unwrap_or_else(BigInt::zero);
    GraverBasis::from_parts(elements, radius, true, a.cols())
}

fn same_orthant(x: &[BigInt], y: &[BigInt]) -> bool {
    x.iter().zip(y).all(|(a, b)| !(a * b).is_negative())
}

fn normal_form(mut s: Vec<BigInt>, set: &[Vec<BigInt>]) -> Vec<BigInt> {
    'outer: loop {
        if s.iter().all(Zero::is_zero) {
            return s;
        }
        for g in set {
            if is_conformal_leq(g, &s) {
                for (x, y) in s.iter_mut().zip(g) {
                    *x -= y;
                }
                continue 'outer;
            }
        }
        return s;
    }
}
