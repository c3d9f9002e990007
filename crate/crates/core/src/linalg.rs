//! Dense exact linear algebra over `Q` and over cyclotomic fields.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::CycElem;

/// The handful of field operations Gaussian elimination needs.
pub trait FieldElem: Clone {
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
}

impl FieldElem for BigRational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl FieldElem for CycElem {
    fn is_zero(&self) -> bool {
        CycElem::is_zero(self)
    }
    fn inv(&self) -> Self {
        self.inverse().expect("pivot is nonzero")
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: FieldElem>(rows: &mut Vec<Vec<F>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv();
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = x.sub(&f.mul(p));
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of the right kernel of an `m x ncols` matrix, one vector per free column.
pub fn kernel<F: FieldElem>(mut rows: Vec<Vec<F>>, ncols: usize, zero: F, one: F) -> Vec<Vec<F>> {
    let pivots = rref(&mut rows, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero.clone(); ncols];
        v[free] = one.clone();
        for (row, &pc) in rows.iter().zip(&pivots) {
            if !row[free].is_zero() {
                v[pc] = zero.sub(&row[free]);
            }
        }
        basis.push(v);
    }
    basis
}

/// Unique solution of an augmented system `[A | b]` with `ncols` unknowns, or
/// `None` if it is inconsistent or underdetermined.
pub fn solve_rational(aug: &mut Vec<Vec<BigRational>>, ncols: usize) -> Option<Vec<BigRational>> {
    let pivots = rref(aug, ncols + 1);
    if pivots.contains(&ncols) || pivots.len() != ncols {
        return None;
    }
    Some(aug.iter().map(|row| row[ncols].clone()).collect())
}

/// Determinant over `Q` by elimination; used to cross-check norms.
pub fn det_rational(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !Zero::is_zero(&m[i][col])) else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let piv = m[col][col].clone();
        det *= &piv;
        for i in col + 1..n {
            if Zero::is_zero(&m[i][col]) {
                continue;
            }
            let f = &m[i][col] / &piv;
            for j in col..n {
                let t = &f * &m[col][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn kernel_of_rank_one() {
        let rows = vec![vec![r(1), r(2), r(3)], vec![r(2), r(4), r(6)]];
        let k = kernel(rows.clone(), 3, r(0), r(1));
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &rows {
                let s: BigRational = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(Zero::is_zero(&s));
            }
        }
    }

    #[test]
    fn solve_and_det() {
        let mut aug = vec![vec![r(2), r(1), r(5)], vec![r(1), r(-1), r(1)]];
        assert_eq!(solve_rational(&mut aug, 2), Some(vec![r(2), r(1)]));
        assert_eq!(det_rational(vec![vec![r(2), r(1)], vec![r(1), r(-1)]]), r(-3));
    }
}
