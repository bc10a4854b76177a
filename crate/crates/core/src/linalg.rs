//! Dense linear algebra over an ordered field: reduced row echelon form,
//! kernel bases, exact LP feasibility with Farkas certificates, and double
//! description ray enumeration for cones of the form `{ x >= 0 : a x = 0 }`.
//!
//! Everything is generic over the scalar so the routines instantiate both at
//! [`crate::Rat`] (where all decisions are exact) and at `f64` for quick
//! inexact experiments.

use crate::budget::Budget;
use num_traits::{Num, NumAssign, Signed};
use std::fmt;

/// Scalar bound for all routines in this module. Blanket-implemented, so any
/// ordered field type from `num` qualifies.
pub trait Scalar: Clone + Num + NumAssign + Signed + PartialOrd + fmt::Debug {}
impl<T: Clone + Num + NumAssign + Signed + PartialOrd + fmt::Debug> Scalar for T {}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    /// Build from row vectors; all rows must have equal length.
    pub fn from_rows(rows_in: Vec<Vec<T>>) -> Self {
        let rows = rows_in.len();
        let cols = rows_in.first().map_or(0, |r| r.len());
        assert!(rows_in.iter().all(|r| r.len() == cols), "ragged rows");
        Mat { rows, cols, data: rows_in.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for c in 0..self.cols {
                    if !self.at(r, c).is_zero() && !v[c].is_zero() {
                        acc += self.at(r, c).clone() * v[c].clone();
                    }
                }
                acc
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x.clone() * y.clone();
        }
    }
    acc
}

/// Reduced row echelon form in place, searching pivots only in the first
/// `pivot_cols` columns (the remaining columns are carried along, which is
/// how row-combination tracking is implemented). Returns `(row, col)` pivot
/// pairs in order.
pub fn rref_partial<T: Scalar>(m: &mut Mat<T>, pivot_cols: usize) -> Vec<(usize, usize)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols.min(m.cols()) {
        let Some(pr) = (r..m.rows()).find(|&i| !m.at(i, c).is_zero()) else {
            continue;
        };
        m.swap_rows(r, pr);
        let piv = m.at(r, c).clone();
        for j in 0..m.cols() {
            if !m.at(r, j).is_zero() {
                let v = m.at(r, j).clone() / piv.clone();
                m.set(r, j, v);
            }
        }
        for i in 0..m.rows() {
            if i == r || m.at(i, c).is_zero() {
                continue;
            }
            let f = m.at(i, c).clone();
            for j in 0..m.cols() {
                if m.at(r, j).is_zero() {
                    continue;
                }
                let v = m.at(i, j).clone() - f.clone() * m.at(r, j).clone();
                m.set(i, j, v);
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == m.rows() {
            break;
        }
    }
    pivots
}

/// Reduced row echelon form over all columns.
pub fn rref<T: Scalar>(m: &mut Mat<T>) -> Vec<(usize, usize)> {
    rref_partial(m, m.cols())
}

pub fn rank<T: Scalar>(m: &Mat<T>) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of the null space `{ x : m x = 0 }`, one vector per free column in
/// ascending column order; the vector for free column `f` has `x[f] = 1`.
pub fn kernel_basis<T: Scalar>(m: &Mat<T>) -> Vec<Vec<T>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for f in 0..m.cols() {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![T::zero(); m.cols()];
        v[f] = T::one();
        for &(pr, pc) in &pivots {
            v[pc] = -a.at(pr, f).clone();
        }
        basis.push(v);
    }
    basis
}

/// Outcome of an exact feasibility check for `{ x >= 0 : a x = b }`.
#[derive(Clone, Debug)]
pub enum Feasibility<T> {
    /// A witness `x` with `a x = b` and `x >= 0`.
    Feasible(Vec<T>),
    /// A separating functional `y` over the rows of `a` with `yᵀa <= 0`
    /// componentwise and `yᵀb > 0`, proving the set empty.
    Infeasible(Vec<T>),
}

/// Decide feasibility of `{ x >= 0 : a x = b }` exactly.
///
/// Dependent rows are eliminated first, then a phase-1 simplex with Bland's
/// rule runs on the reduced system. On the infeasible path the elimination is
/// redone with row tracking so the certificate is expressed over the original
/// rows; the certificate is checked before being returned.
pub fn lp_feasible<T: Scalar>(a: &Mat<T>, b: &[T]) -> Feasibility<T> {
    match lp_run(a, b, false) {
        LpRun::Feasible(x) => Feasibility::Feasible(x),
        LpRun::Infeasible(y) => Feasibility::Infeasible(y),
        LpRun::NeedCertificate => match lp_run(a, b, true) {
            LpRun::Infeasible(y) => {
                assert!(is_farkas_certificate(a, b, &y), "bad Farkas certificate");
                Feasibility::Infeasible(y)
            }
            _ => unreachable!("feasibility cannot depend on row tracking"),
        },
    }
}

enum LpRun<T> {
    Feasible(Vec<T>),
    Infeasible(Vec<T>),
    NeedCertificate,
}

fn lp_run<T: Scalar>(a: &Mat<T>, b: &[T], tracked: bool) -> LpRun<T> {
    assert_eq!(b.len(), a.rows());
    let m = a.rows();
    let n = a.cols();
    let width = if tracked { n + 1 + m } else { n + 1 };
    let mut aug = Mat::zeros(m, width);
    for r in 0..m {
        for c in 0..n {
            aug.set(r, c, a.at(r, c).clone());
        }
        aug.set(r, n, b[r].clone());
        if tracked {
            aug.set(r, n + 1 + r, T::one());
        }
    }
    let pivots = rref_partial(&mut aug, n + 1);
    if let Some(&(r, _)) = pivots.iter().find(|&&(_, c)| c == n) {
        // A row reduced to `0·x = 1`: inconsistent equalities.
        if !tracked {
            return LpRun::NeedCertificate;
        }
        let y: Vec<T> = (0..m).map(|j| aug.at(r, n + 1 + j).clone()).collect();
        return LpRun::Infeasible(y);
    }
    let k = pivots.len();
    if k == 0 {
        return LpRun::Feasible(vec![T::zero(); n]);
    }
    // Orient every reduced row so its right hand side is non-negative.
    let mut rows = Vec::with_capacity(k);
    let mut d = Vec::with_capacity(k);
    let mut signs = Vec::with_capacity(k);
    for r in 0..k {
        let s = if *aug.at(r, n) < T::zero() { -T::one() } else { T::one() };
        rows.push((0..n).map(|c| aug.at(r, c).clone() * s.clone()).collect::<Vec<_>>());
        d.push(aug.at(r, n).clone() * s.clone());
        signs.push(s);
    }
    match phase1(&Mat::from_rows(rows), &d) {
        Phase1::Feasible(x) => LpRun::Feasible(x),
        Phase1::Infeasible(y_red) => {
            if !tracked {
                return LpRun::NeedCertificate;
            }
            let mut y = vec![T::zero(); m];
            for (i, yi) in y_red.iter().enumerate() {
                if yi.is_zero() {
                    continue;
                }
                let f = yi.clone() * signs[i].clone();
                for (j, yj) in y.iter_mut().enumerate() {
                    let t = aug.at(i, n + 1 + j);
                    if !t.is_zero() {
                        *yj += f.clone() * t.clone();
                    }
                }
            }
            LpRun::Infeasible(y)
        }
    }
}

/// Check the Farkas emptiness certificate: `yᵀa <= 0` and `yᵀb > 0`.
pub fn is_farkas_certificate<T: Scalar>(a: &Mat<T>, b: &[T], y: &[T]) -> bool {
    if y.len() != a.rows() || b.len() != a.rows() {
        return false;
    }
    if dot(y, b) <= T::zero() {
        return false;
    }
    for c in 0..a.cols() {
        let mut v = T::zero();
        for r in 0..a.rows() {
            if !y[r].is_zero() && !a.at(r, c).is_zero() {
                v += y[r].clone() * a.at(r, c).clone();
            }
        }
        if v > T::zero() {
            return false;
        }
    }
    true
}

enum Phase1<T> {
    Feasible(Vec<T>),
    /// Dual certificate over the (reduced, sign-normalized) rows.
    Infeasible(Vec<T>),
}

/// Phase-1 simplex with Bland's rule for `{ x >= 0 : m x = d }` where `m`
/// has full row rank and `d >= 0`. Minimizes the sum of artificial
/// variables; optimum zero yields a feasible basic solution, a positive
/// optimum yields the dual row combination certifying emptiness.
fn phase1<T: Scalar>(m: &Mat<T>, d: &[T]) -> Phase1<T> {
    let r = m.rows();
    let n = m.cols();
    // Tableau: n structural columns, r artificial columns, 1 rhs column.
    let mut tab = Mat::zeros(r, n + r + 1);
    for i in 0..r {
        for j in 0..n {
            tab.set(i, j, m.at(i, j).clone());
        }
        tab.set(i, n + i, T::one());
        tab.set(i, n + r, d[i].clone());
    }
    let mut basis: Vec<usize> = (n..n + r).collect();
    // Reduced costs for min Σ artificials with the artificial basis.
    let mut rc = vec![T::zero(); n + r];
    for (j, rcj) in rc.iter_mut().enumerate().take(n) {
        let mut s = T::zero();
        for i in 0..r {
            s += tab.at(i, j).clone();
        }
        *rcj = -s;
    }
    loop {
        let enter = (0..n + r).find(|&j| rc[j] < T::zero());
        let Some(e) = enter else {
            // Optimal. Objective value = Σ rhs over artificial basic rows.
            let mut w = T::zero();
            for i in 0..r {
                if basis[i] >= n {
                    w += tab.at(i, n + r).clone();
                }
            }
            if w.is_zero() {
                let mut x = vec![T::zero(); n];
                for i in 0..r {
                    if basis[i] < n {
                        x[basis[i]] = tab.at(i, n + r).clone();
                    }
                }
                return Phase1::Feasible(x);
            }
            // y_i = 1 - rc(artificial_i); then yᵀm <= 0 and yᵀd = w > 0.
            let y: Vec<T> = (0..r).map(|i| T::one() - rc[n + i].clone()).collect();
            return Phase1::Infeasible(y);
        };
        // Leaving row: minimum ratio, ties by smallest basic variable.
        let mut leave: Option<usize> = None;
        for i in 0..r {
            if *tab.at(i, e) <= T::zero() {
                continue;
            }
            let better = match leave {
                None => true,
                Some(l) => {
                    let ratio_i = tab.at(i, n + r).clone() / tab.at(i, e).clone();
                    let ratio_l = tab.at(l, n + r).clone() / tab.at(l, e).clone();
                    ratio_i < ratio_l || (ratio_i == ratio_l && basis[i] < basis[l])
                }
            };
            if better {
                leave = Some(i);
            }
        }
        let l = leave.expect("phase-1 objective is bounded below");
        // Pivot on (l, e).
        let piv = tab.at(l, e).clone();
        for j in 0..n + r + 1 {
            if !tab.at(l, j).is_zero() {
                let v = tab.at(l, j).clone() / piv.clone();
                tab.set(l, j, v);
            }
        }
        for i in 0..r {
            if i == l || tab.at(i, e).is_zero() {
                continue;
            }
            let f = tab.at(i, e).clone();
            for j in 0..n + r + 1 {
                if tab.at(l, j).is_zero() {
                    continue;
                }
                let v = tab.at(i, j).clone() - f.clone() * tab.at(l, j).clone();
                tab.set(i, j, v);
            }
        }
        let f = rc[e].clone();
        for j in 0..n + r {
            if !tab.at(l, j).is_zero() {
                let v = rc[j].clone() - f.clone() * tab.at(l, j).clone();
                rc[j] = v;
            }
        }
        basis[l] = e;
    }
}

/// Result of extreme ray enumeration for `{ x >= 0 : a x = 0 }`.
#[derive(Clone, Debug)]
pub struct RayEnum<T> {
    /// Extreme rays, each normalized so its first nonzero coordinate is 1,
    /// lexicographically sorted.
    pub rays: Vec<Vec<T>>,
    /// `false` when the node budget ran out; `rays` then describes an
    /// intermediate cone and must not be used for emptiness claims.
    pub complete: bool,
}

/// Double description: start from the positive orthant and intersect with
/// the null space of `a` one row at a time, maintaining the extreme rays.
/// Adjacency of rays is tested combinatorially through zero-set inclusion.
pub fn cone_rays<T: Scalar>(a: &Mat<T>, budget: &mut Budget) -> RayEnum<T> {
    let n = a.cols();
    let mut rays: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut v = vec![T::zero(); n];
            v[i] = T::one();
            v
        })
        .collect();
    for ri in 0..a.rows() {
        let row = a.row(ri);
        let vals: Vec<T> = rays.iter().map(|r| dot(row, r)).collect();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next: Vec<Vec<T>> = Vec::new();
        for (i, v) in vals.iter().enumerate() {
            if v.is_zero() {
                next.push(rays[i].clone());
            } else if *v > T::zero() {
                pos.push(i);
            } else {
                neg.push(i);
            }
        }
        if pos.is_empty() && neg.is_empty() {
            continue;
        }
        let zero_sets: Vec<ZeroSet> = rays.iter().map(|r| ZeroSet::of(r)).collect();
        for &p in &pos {
            for &q in &neg {
                if !budget.tick() {
                    sort_rays(&mut rays);
                    return RayEnum { rays, complete: false };
                }
                if !adjacent(&zero_sets, p, q) {
                    continue;
                }
                // vals[p]·rays[q] - vals[q]·rays[p] is a positive combination
                // lying on the hyperplane.
                let mut comb: Vec<T> = Vec::with_capacity(n);
                for c in 0..n {
                    comb.push(
                        vals[p].clone() * rays[q][c].clone()
                            - vals[q].clone() * rays[p][c].clone(),
                    );
                }
                normalize_ray(&mut comb);
                if !next.contains(&comb) {
                    next.push(comb);
                }
            }
        }
        rays = next;
        sort_rays(&mut rays);
    }
    sort_rays(&mut rays);
    RayEnum { rays, complete: true }
}

/// Coordinate zero-set of a ray, as a bitset.
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn of<T: Scalar>(ray: &[T]) -> Self {
        let mut blocks = vec![0u64; ray.len().div_ceil(64)];
        for (i, v) in ray.iter().enumerate() {
            if v.is_zero() {
                blocks[i / 64] |= 1 << (i % 64);
            }
        }
        ZeroSet(blocks)
    }

    fn intersect(&self, other: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn contains(&self, other: &ZeroSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

fn adjacent(zero_sets: &[ZeroSet], p: usize, q: usize) -> bool {
    let both = zero_sets[p].intersect(&zero_sets[q]);
    !zero_sets
        .iter()
        .enumerate()
        .any(|(k, z)| k != p && k != q && z.contains(&both))
}

fn normalize_ray<T: Scalar>(ray: &mut [T]) {
    let Some(first) = ray.iter().find(|v| !v.is_zero()).cloned() else {
        return;
    };
    for v in ray.iter_mut() {
        if !v.is_zero() {
            *v = v.clone() / first.clone();
        }
    }
}

fn sort_rays<T: Scalar>(rays: &mut [Vec<T>]) {
    rays.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            match x.partial_cmp(y) {
                Some(std::cmp::Ordering::Equal) => continue,
                Some(o) => return o,
                None => panic!("incomparable scalars in ray sort"),
            }
        }
        std::cmp::Ordering::Equal
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, Rat};
    use num_traits::Zero;

    fn rmat(rows: Vec<Vec<i64>>) -> Mat<Rat> {
        Mat::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(rat).collect())
                .collect(),
        )
    }

    fn rvec(v: Vec<i64>) -> Vec<Rat> {
        v.into_iter().map(rat).collect()
    }

    #[test]
    fn kernel_of_row_matrix() {
        let m = rmat(vec![vec![1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k, vec![rvec(vec![-1, 1])]);
    }

    #[test]
    fn kernel_trivial_when_injective() {
        let m = rmat(vec![vec![-1], vec![1], vec![0]]);
        assert!(kernel_basis(&m).is_empty());
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn kernel_of_opposite_columns() {
        let m = rmat(vec![vec![-1, 1], vec![1, -1], vec![1, -1], vec![-1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k, vec![rvec(vec![1, 1])]);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn kernel_over_f64() {
        let m = Mat::from_rows(vec![vec![1.0f64, 1.0]]);
        let k = kernel_basis(&m);
        assert_eq!(k, vec![vec![-1.0, 1.0]]);
    }

    #[test]
    fn lp_simple_feasible() {
        let a = rmat(vec![vec![1, 1]]);
        let b = rvec(vec![1]);
        match lp_feasible(&a, &b) {
            Feasibility::Feasible(x) => {
                assert_eq!(a.mul_vec(&x), b);
                assert!(x.iter().all(|v| *v >= rat(0)));
            }
            Feasibility::Infeasible(_) => panic!("expected feasible"),
        }
    }

    #[test]
    fn lp_negative_rhs_infeasible() {
        let a = rmat(vec![vec![1]]);
        let b = rvec(vec![-1]);
        match lp_feasible(&a, &b) {
            Feasibility::Infeasible(y) => assert!(is_farkas_certificate(&a, &b, &y)),
            Feasibility::Feasible(_) => panic!("expected infeasible"),
        }
    }

    #[test]
    fn lp_inconsistent_rows_infeasible() {
        let a = rmat(vec![vec![1, 1], vec![1, 1]]);
        let b = rvec(vec![1, 2]);
        match lp_feasible(&a, &b) {
            Feasibility::Infeasible(y) => assert!(is_farkas_certificate(&a, &b, &y)),
            Feasibility::Feasible(_) => panic!("expected infeasible"),
        }
    }

    #[test]
    fn lp_requires_positive_combination() {
        // x - y = 0 and x + y = 1 is feasible at (1/2, 1/2).
        let a = rmat(vec![vec![1, -1], vec![1, 1]]);
        let b = rvec(vec![0, 1]);
        match lp_feasible(&a, &b) {
            Feasibility::Feasible(x) => assert_eq!(x, vec![crate::ratio(1, 2), crate::ratio(1, 2)]),
            Feasibility::Infeasible(_) => panic!("expected feasible"),
        }
    }

    #[test]
    fn cone_rays_of_orthant() {
        let a: Mat<Rat> = Mat::zeros(0, 2);
        let r = cone_rays(&a, &mut Budget::unlimited());
        assert!(r.complete);
        assert_eq!(r.rays, vec![rvec(vec![0, 1]), rvec(vec![1, 0])]);
    }

    #[test]
    fn cone_rays_of_diagonal() {
        let a = rmat(vec![vec![1, -1]]);
        let r = cone_rays(&a, &mut Budget::unlimited());
        assert!(r.complete);
        assert_eq!(r.rays, vec![rvec(vec![1, 1])]);
    }

    #[test]
    fn cone_rays_empty_cone() {
        // x + y = 0 with x, y >= 0 forces x = y = 0.
        let a = rmat(vec![vec![1, 1]]);
        let r = cone_rays(&a, &mut Budget::unlimited());
        assert!(r.complete);
        assert!(r.rays.is_empty());
    }

    #[test]
    fn cone_rays_budget_flags_incomplete() {
        let a = rmat(vec![vec![1, -1, 0], vec![0, 1, -1]]);
        let r = cone_rays(&a, &mut Budget::new(0));
        assert!(!r.complete);
    }

    #[test]
    fn cone_rays_square_pyramid() {
        // Kernel of [1, 1, -1, -1] in the orthant has four extreme rays.
        let a = rmat(vec![vec![1, 1, -1, -1]]);
        let r = cone_rays(&a, &mut Budget::unlimited());
        assert!(r.complete);
        assert_eq!(r.rays.len(), 4);
        for ray in &r.rays {
            assert!(a.mul_vec(ray).iter().all(|v| v.is_zero()));
            assert!(ray.iter().all(|v| *v >= rat(0)));
        }
    }
}
