//! Minimal dense matrices over the exact coefficient rings used in this
//! crate. Sizes stay tiny (at most 8x8), so determinants use fraction-free
//! Bareiss elimination and inverses go through the adjugate.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::quadfield::{AlgInt, AlgNum};

/// Ring operations on references; implemented by every entry type we store.
pub trait RingElem: Clone + PartialEq {
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_sub(&self, other: &Self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    fn is_ring_zero(&self) -> bool;
    /// Exact division; `None` when it does not exist in the ring.
    fn ring_div_exact(&self, other: &Self) -> Option<Self>;
}

impl RingElem for AlgInt {
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn is_ring_zero(&self) -> bool {
        self.is_zero()
    }
    fn ring_div_exact(&self, other: &Self) -> Option<Self> {
        self.div_exact(other)
    }
}

impl RingElem for AlgNum {
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn is_ring_zero(&self) -> bool {
        self.is_zero()
    }
    fn ring_div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            None
        } else {
            Some(self / other)
        }
    }
}

impl RingElem for BigInt {
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn is_ring_zero(&self) -> bool {
        self.is_zero()
    }
    fn ring_div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let (q, r) = num_integer::Integer::div_rem(self, other);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }
}

impl RingElem for BigRational {
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn is_ring_zero(&self) -> bool {
        self.is_zero()
    }
    fn ring_div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            None
        } else {
            Some(self / other)
        }
    }
}

impl RingElem for Complex64 {
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn is_ring_zero(&self) -> bool {
        self.norm_sqr() == 0.0
    }
    fn ring_div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_ring_zero() {
            None
        } else {
            Some(self / other)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: RingElem> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
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

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U: RingElem>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn add(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| self.at(r, c).ring_add(other.at(r, c)))
    }

    pub fn sub(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| self.at(r, c).ring_sub(other.at(r, c)))
    }

    pub fn neg(&self) -> Mat<T> {
        self.map(RingElem::ring_neg)
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        Mat::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = self.at(r, 0).ring_mul(other.at(0, c));
            for k in 1..self.cols {
                acc = acc.ring_add(&self.at(r, k).ring_mul(other.at(k, c)));
            }
            acc
        })
    }

    pub fn scale(&self, s: &T) -> Mat<T> {
        self.map(|x| x.ring_mul(s))
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat<T> {
        Mat::from_fn(rows, cols, |r, c| self.at(r0 + r, c0 + c).clone())
    }

    /// Assembles `[[a, b], [c, d]]` from equally sized square blocks.
    pub fn from_blocks(a: &Mat<T>, b: &Mat<T>, c: &Mat<T>, d: &Mat<T>) -> Mat<T> {
        let n = a.rows;
        assert!(
            [a, b, c, d].iter().all(|m| m.rows == n && m.cols == n),
            "blocks must be square and equal-sized"
        );
        Mat::from_fn(2 * n, 2 * n, |r, cc| {
            match (r < n, cc < n) {
                (true, true) => a.at(r, cc).clone(),
                (true, false) => b.at(r, cc - n).clone(),
                (false, true) => c.at(r - n, cc).clone(),
                (false, false) => d.at(r - n, cc - n).clone(),
            }
        })
    }

    pub fn submatrix(&self, keep_rows: &[usize], keep_cols: &[usize]) -> Mat<T> {
        Mat::from_fn(keep_rows.len(), keep_cols.len(), |r, c| {
            self.at(keep_rows[r], keep_cols[c]).clone()
        })
    }

    fn delete_rc(&self, row: usize, col: usize) -> Mat<T> {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != row).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != col).collect();
        self.submatrix(&rows, &cols)
    }

    /// Determinant by fraction-free Bareiss elimination; all interior
    /// divisions are exact over an integral domain.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut negate = false;
        let mut prev: Option<T> = None;
        for k in 0..n.saturating_sub(1) {
            if m.at(k, k).is_ring_zero() {
                match (k + 1..n).find(|&r| !m.at(r, k).is_ring_zero()) {
                    Some(r) => {
                        for c in 0..n {
                            let tmp = m.at(k, c).clone();
                            m.set(k, c, m.at(r, c).clone());
                            m.set(r, c, tmp);
                        }
                        negate = !negate;
                    }
                    None => return m.at(k, k).clone(), // a zero of T
                }
            }
            let pivot = m.at(k, k).clone();
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = m
                        .at(i, j)
                        .ring_mul(&pivot)
                        .ring_sub(&m.at(i, k).ring_mul(m.at(k, j)));
                    let v = match &prev {
                        None => t,
                        Some(p) => t.ring_div_exact(p).expect("Bareiss division is exact"),
                    };
                    m.set(i, j, v);
                }
            }
            prev = Some(pivot);
        }
        let d = m.at(n - 1, n - 1).clone();
        if negate {
            d.ring_neg()
        } else {
            d
        }
    }

    /// Adjugate: `adj(M) * M = det(M) * I`.
    pub fn adjugate(&self) -> Mat<T> {
        assert_eq!(self.rows, self.cols);
        Mat::from_fn(self.rows, self.cols, |r, c| {
            let minor = self.delete_rc(c, r).det();
            if (r + c) % 2 == 0 {
                minor
            } else {
                minor.ring_neg()
            }
        })
    }

    /// Inverse over a field-like entry type.
    pub fn inverse(&self) -> Option<Mat<T>> {
        let d = self.det();
        if d.is_ring_zero() {
            return None;
        }
        Some(self.adjugate().map(|x| x.ring_div_exact(&d).expect("division in a field")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn det_small_integer_matrices() {
        let m = Mat::from_rows(vec![vec![bi(1), bi(2)], vec![bi(3), bi(4)]]);
        assert_eq!(m.det(), bi(-2));
        let id4 = Mat::from_fn(4, 4, |r, c| if r == c { bi(1) } else { bi(0) });
        assert_eq!(id4.det(), bi(1));
        let m3 = Mat::from_rows(vec![
            vec![bi(2), bi(0), bi(1)],
            vec![bi(1), bi(3), bi(2)],
            vec![bi(0), bi(5), bi(4)],
        ]);
        // 2*(12-10) - 0 + 1*(5-0) = 9
        assert_eq!(m3.det(), bi(9));
        // singular with a zero pivot on the way
        let s = Mat::from_rows(vec![
            vec![bi(0), bi(1), bi(1)],
            vec![bi(0), bi(2), bi(2)],
            vec![bi(1), bi(0), bi(3)],
        ]);
        assert_eq!(s.det(), bi(0));
    }

    #[test]
    fn adjugate_identity() {
        let m = Mat::from_rows(vec![
            vec![bi(2), bi(1), bi(0)],
            vec![bi(0), bi(1), bi(4)],
            vec![bi(1), bi(1), bi(1)],
        ]);
        let adj = m.adjugate();
        let prod = adj.mul(&m);
        let d = m.det();
        for r in 0..3 {
            for c in 0..3 {
                let expect = if r == c { d.clone() } else { bi(0) };
                assert_eq!(prod.at(r, c), &expect);
            }
        }
    }

    #[test]
    fn rational_inverse() {
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let m = Mat::from_rows(vec![vec![q(1, 2), q(1, 3)], vec![q(0, 1), q(2, 1)]]);
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        assert_eq!(prod.at(0, 0), &BigRational::one());
        assert_eq!(prod.at(1, 1), &BigRational::one());
        assert!(prod.at(0, 1).is_zero());
    }
}
