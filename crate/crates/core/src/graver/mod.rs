//! Graver bases: the conformally minimal nonzero integer kernel vectors of a
//! matrix, together with the norm bounds used to certify a computed basis.

mod circuits;
mod completion;

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ilp::{effective_box, for_each_feasible, Instance};
use crate::linalg::{integer_kernel, norm_1, norm_inf, IntMatrix};

pub use circuits::{circuit_norm_inf, circuits, CIRCUIT_COLUMN_CAP};
pub use completion::complete_graver_basis;

/// Largest number of lattice points the box enumeration is willing to visit.
pub const ENUMERATION_CAP: u64 = 20_000_000;

/// `x ⊑ y`: same orthant and `|x_i| <= |y_i|` everywhere.
pub fn conformal_leq(x: &[BigInt], y: &[BigInt]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!("vectors of length {} and {}", x.len(), y.len())));
    }
    Ok(is_conformal_leq(x, y))
}

pub(crate) fn is_conformal_leq(x: &[BigInt], y: &[BigInt]) -> bool {
    x.iter().zip(y).all(|(a, b)| {
        a.is_zero() || (a.signum() == b.signum() && a.magnitude() <= b.magnitude())
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraverBasis {
    elements: Vec<Vec<BigInt>>,
    radius: BigInt,
    certified: bool,
    dimension: usize,
}

impl GraverBasis {
    /// Elements in lexicographic order, closed under negation.
    pub fn elements(&self) -> &[Vec<BigInt>] {
        &self.elements
    }

    /// The box radius the basis is exact for.
    pub fn radius(&self) -> &BigInt {
        &self.radius
    }

    /// Whether the radius dominates a proven bound on every element's size,
    /// i.e. whether this is the complete basis.
    pub fn certified(&self) -> bool {
        self.certified
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &[BigInt]) -> bool {
        self.elements.binary_search_by(|e| e.as_slice().cmp(g)).is_ok()
    }

    pub(crate) fn from_parts(mut elements: Vec<Vec<BigInt>>, radius: BigInt, certified: bool, dimension: usize) -> Self {
        elements.sort();
        elements.dedup();
        GraverBasis { elements, radius, certified, dimension }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Norms {
    pub g1: BigInt,
    pub ginf: BigInt,
}

pub fn norms(basis: &GraverBasis) -> Norms {
    let g1 = basis.elements.iter().map(|g| norm_1(g)).max().unwrap_or_else(BigInt::zero);
    let ginf = basis.elements.iter().map(|g| norm_inf(g)).max().unwrap_or_else(BigInt::zero);
    Norms { g1, ginf }
}

/// The distinct-column bound on the 1-norm of Graver elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnBound {
    Bound(BigInt),
    /// Reported when the matrix has repeated columns and as many distinct
    /// columns as its rank, where the formula does not hold.
    Inapplicable,
}

impl ColumnBound {
    pub fn value(&self) -> Option<&BigInt> {
        match self {
            ColumnBound::Bound(v) => Some(v),
            ColumnBound::Inapplicable => None,
        }
    }
}

/// `(d - r)(r + 1)(ceil(sqrt m) * a)^m` with `d` distinct columns, rank `r`
/// and `a = max(2, ||A||_inf)`.
pub fn column_bound(a: &IntMatrix) -> ColumnBound {
    let d = a.distinct_columns();
    let r = a.rank();
    if d == r && a.cols() > d {
        return ColumnBound::Inapplicable;
    }
    let m = a.rows();
    let mut root = m.sqrt();
    if root * root < m {
        root += 1;
    }
    let amax = a.norm_inf().max(BigInt::from(2));
    let base = BigInt::from(root) * amax;
    let value = BigInt::from(d - r) * BigInt::from(r + 1) * num_traits::pow(base, m);
    ColumnBound::Bound(value)
}

/// The smallest proven upper bound on `g_inf(A)` this crate can derive.
///
/// Sources: an empty kernel gives zero; every Graver element is a circuit or
/// a conformal combination of at most `n - rank` circuits with coefficients
/// below one, so `(n - rank) * c_inf` bounds it; and the column bound.
pub fn ginf_bound(a: &IntMatrix) -> Option<BigInt> {
    let r = a.rank();
    let n = a.cols();
    if r == n {
        return Some(BigInt::zero());
    }
    let from_circuits = if n <= CIRCUIT_COLUMN_CAP {
        circuit_norm_inf(a).ok().map(|c| BigInt::from(n - r) * c)
    } else {
        None
    };
    let from_columns = column_bound(a).value().cloned();
    match (from_circuits, from_columns) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

/// All Graver elements with `||g||_inf <= radius`, certified when the radius
/// reaches [`ginf_bound`].
pub fn graver_basis(a: &IntMatrix, radius: &BigInt) -> Result<GraverBasis> {
    graver_basis_with_bound(a, radius, None)
}

/// As [`graver_basis`], additionally accepting a caller-supplied bound on `g_inf`.
pub fn graver_basis_with_bound(a: &IntMatrix, radius: &BigInt, known_bound: Option<&BigInt>) -> Result<GraverBasis> {
    if radius.is_negative() {
        return Err(Error::Invalid("negative radius".into()));
    }
    let derived = ginf_bound(a);
    let bound = match (derived, known_bound) {
        (Some(x), Some(y)) => Some(x.min(y.clone())),
        (x, y) => x.or_else(|| y.cloned()),
    };
    let certified = bound.as_ref().is_some_and(|b| radius >= b);
    let candidates = kernel_points_in_box(a, radius)?;
    let elements = minimal_elements(candidates);
    Ok(GraverBasis::from_parts(elements, radius.clone(), certified, a.cols()))
}

/// The complete basis, choosing box enumeration when the certified box is
/// small and the completion procedure otherwise.
pub fn certified_graver_basis(a: &IntMatrix) -> Result<GraverBasis> {
    if let Some(bound) = ginf_bound(a) {
        let k = (a.cols() - a.rank()) as u32;
        let side: BigInt = 2 * &bound + 1;
        if num_traits::pow(side, k as usize) <= BigInt::from(200_000u32) {
            return graver_basis(a, &bound);
        }
    }
    Ok(complete_graver_basis(a))
}

/// Keeps the conformally minimal nonzero vectors of a set that is closed
/// downward within its box.
pub(crate) fn minimal_elements(mut vs: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    vs.retain(|v| v.iter().any(|x| !x.is_zero()));
    vs.sort_by(|x, y| norm_1(x).cmp(&norm_1(y)).then_with(|| x.cmp(y)));
    vs.dedup();
    let mut kept: Vec<Vec<BigInt>> = Vec::new();
    for v in vs {
        if !kept.iter().any(|u| is_conformal_leq(u, &v)) {
            kept.push(v);
        }
    }
    kept
}

/// Every nonzero integer kernel vector with `||v||_inf <= radius`.
///
/// Works in the coordinates of an echelon lattice basis of the kernel, so the
/// search is over `(2 radius + 1)^k` points with `k` the kernel dimension.
fn kernel_points_in_box(a: &IntMatrix, radius: &BigInt) -> Result<Vec<Vec<BigInt>>> {
    let basis = integer_kernel(a);
    let k = basis.cols();
    if k == 0 {
        return Ok(Vec::new());
    }
    let side: BigInt = 2 * radius + 1;
    let size = num_traits::pow(side, k);
    if size.to_u64().is_none_or(|s| s > ENUMERATION_CAP) {
        return Err(Error::SizeCap(format!(
            "box enumeration over {size} lattice points exceeds {ENUMERATION_CAP}"
        )));
    }
    let n = a.cols();
    let pivots: Vec<usize> = (0..k)
        .map(|j| (0..n).find(|&i| !basis.get(i, j).is_zero()).expect("basis columns are nonzero"))
        .collect();
    let mut out = Vec::new();
    let mut v = vec![BigInt::zero(); n];
    enumerate_level(&basis, &pivots, radius, 0, &mut v, &mut out);
    Ok(out)
}

fn enumerate_level(
    basis: &IntMatrix,
    pivots: &[usize],
    radius: &BigInt,
    level: usize,
    v: &mut Vec<BigInt>,
    out: &mut Vec<Vec<BigInt>>,
) {
    let n = v.len();
    let k = pivots.len();
    if level == k {
        if v.iter().all(|x| x.magnitude() <= radius.magnitude()) && v.iter().any(|x| !x.is_zero()) {
            out.push(v.clone());
        }
        return;
    }
    let p = pivots[level];
    let piv = basis.get(p, level);
    let lo = (-radius - &v[p]).div_ceil(piv);
    let hi = (radius - &v[p]).div_floor(piv);
    let next_pivot = pivots.get(level + 1).copied().unwrap_or(n);
    let mut c = lo;
    while c <= hi {
        for (i, vi) in v.iter_mut().enumerate().skip(p) {
            *vi += &c * basis.get(i, level);
        }
        if (p..next_pivot).all(|i| v[i].magnitude() <= radius.magnitude()) {
            enumerate_level(basis, pivots, radius, level + 1, v, out);
        }
        for (i, vi) in v.iter_mut().enumerate().skip(p) {
            *vi -= &c * basis.get(i, level);
        }
        c += BigInt::one();
    }
}

/// Whether every feasible, non-optimal point of `inst` inside the box has an
/// improving step `g` in `set` with `x + g` feasible.
pub fn is_test_set(inst: &Instance, set: &[Vec<BigInt>], bbox: Option<&[(BigInt, BigInt)]>) -> Result<bool> {
    let domains = effective_box(inst, bbox)?;
    let mut points = Vec::new();
    for_each_feasible(inst, &domains, |x| {
        points.push(x.to_vec());
        ControlFlow::Continue(())
    })?;
    let Some(best) = points.iter().map(|x| inst.objective(x)).min() else {
        return Ok(true);
    };
    for x in &points {
        if inst.objective(x) == best {
            continue;
        }
        let improving = set.iter().any(|g| {
            let y: Vec<BigInt> = x.iter().zip(g).map(|(a, b)| a + b).collect();
            inst.objective(g).is_negative() && inst.within_bounds(&y)
        });
        if !improving {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_bigints;

    fn basis_of(rows: &[&[i64]]) -> GraverBasis {
        let a = IntMatrix::from_i64(rows);
        let bound = ginf_bound(&a).unwrap();
        graver_basis(&a, &bound).unwrap()
    }

    #[test]
    fn conformal_order_examples() {
        let x = to_bigints(&[1, 0, -2]);
        let y = to_bigints(&[2, 1, -2]);
        assert!(conformal_leq(&x, &y).unwrap());
        assert!(!conformal_leq(&y, &x).unwrap());
        assert!(!conformal_leq(&to_bigints(&[-1]), &to_bigints(&[2])).unwrap());
        assert!(conformal_leq(&x, &to_bigints(&[1])).is_err());
    }

    #[test]
    fn twisted_cubic_like_row() {
        let gb = basis_of(&[&[1, 2, 1]]);
        assert!(gb.certified());
        let expected = [
            [-2, 1, 0],
            [-1, 0, 1],
            [-1, 1, -1],
            [0, -1, 2],
            [0, 1, -2],
            [1, -1, 1],
            [1, 0, -1],
            [2, -1, 0],
        ];
        let expected: Vec<Vec<BigInt>> = expected.iter().map(|r| to_bigints(r)).collect();
        assert_eq!(gb.elements(), expected.as_slice());
    }

    #[test]
    fn trivial_kernel_has_empty_basis() {
        let gb = basis_of(&[&[1, 0], &[0, 1]]);
        assert!(gb.is_empty());
        assert!(gb.certified());
    }

    #[test]
    fn zero_matrix_basis_is_unit_vectors() {
        let gb = basis_of(&[&[0, 0, 0]]);
        assert_eq!(gb.len(), 6);
        assert_eq!(norms(&gb), Norms { g1: BigInt::one(), ginf: BigInt::one() });
    }

    #[test]
    fn small_radius_is_not_certified() {
        let a = IntMatrix::from_i64(&[&[1, 2, 1]]);
        let gb = graver_basis(&a, &BigInt::one()).unwrap();
        assert!(!gb.certified());
        assert!(gb.elements().iter().all(|g| norm_inf(g) <= BigInt::one()));
    }

    #[test]
    fn column_bound_cases() {
        let a = IntMatrix::from_i64(&[&[1, 1]]);
        assert_eq!(column_bound(&a), ColumnBound::Inapplicable);
        let a = IntMatrix::from_i64(&[&[1, 2, 3]]);
        // d = 3, r = 1, m = 1, a = 3: 2 * 2 * 3
        assert_eq!(column_bound(&a), ColumnBound::Bound(BigInt::from(12)));
        let a = IntMatrix::from_i64(&[&[1, 0], &[0, 1]]);
        assert_eq!(column_bound(&a), ColumnBound::Bound(BigInt::zero()));
    }

    #[test]
    fn lower_bound_family_three() {
        let gb = basis_of(&[&[2, -1, 0], &[0, 2, -1]]);
        assert!(gb.contains(&to_bigints(&[1, 2, 4])));
        assert_eq!(norms(&gb).ginf, BigInt::from(4));
    }

    #[test]
    fn graver_basis_is_a_test_set() {
        let a = IntMatrix::from_i64(&[&[1, 2, 1]]);
        let gb = basis_of(&[&[1, 2, 1]]);
        let fin = |v: &[i64]| v.iter().map(|&x| x.into()).collect::<Vec<_>>();
        let inst = Instance::new(a, to_bigints(&[3]), to_bigints(&[2, -1, 1]), fin(&[0, 0, 0]), fin(&[3, 3, 3])).unwrap();
        assert!(is_test_set(&inst, gb.elements(), None).unwrap());
        let partial: Vec<Vec<BigInt>> = gb.elements().iter().filter(|g| g[1].is_zero()).cloned().collect();
        assert!(!is_test_set(&inst, &partial, None).unwrap());
    }
}
