//! Exact determinants over rationals and over z-polynomials.

use num_traits::{One, Zero};

use crate::series::{Rational, ZPoly};

/// Commutative ring with exact division by known divisors, which is all the
/// Bareiss elimination needs.
pub trait ExactRing: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / divisor`, where the caller guarantees divisibility.
    fn exact_div(&self, divisor: &Self) -> Self;
}

impl ExactRing for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, divisor: &Self) -> Self {
        self / divisor
    }
}

impl ExactRing for ZPoly {
    fn zero() -> Self {
        ZPoly::zero()
    }
    fn one() -> Self {
        ZPoly::one()
    }
    fn is_zero(&self) -> bool {
        ZPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, divisor: &Self) -> Self {
        self.div_exact(divisor)
            .expect("Bareiss step must divide exactly")
    }
}

pub type Matrix<T> = Vec<Vec<T>>;

fn assert_square<T>(m: &Matrix<T>) {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "matrix must be square");
}

/// Fraction-free Gaussian elimination (Bareiss), with row swaps on a zero
/// pivot. Every intermediate entry is itself a minor of the input, so the
/// divisions are exact in any integral domain.
pub fn det_bareiss<T: ExactRing>(m: &Matrix<T>) -> T {
    assert_square(m);
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = num.exact_div(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

/// Cofactor expansion along the first row. Cost is `n!`; meant for small
/// matrices and as an independent check on [`det_bareiss`].
pub fn det_laplace<T: ExactRing>(m: &Matrix<T>) -> T {
    assert_square(m);
    fn go<T: ExactRing>(m: &Matrix<T>, rows: &[usize], cols: &mut Vec<usize>) -> T {
        let Some((&r, rest)) = rows.split_first() else {
            return T::one();
        };
        let mut acc = T::zero();
        for idx in 0..cols.len() {
            let c = cols[idx];
            if m[r][c].is_zero() {
                continue;
            }
            let removed = cols.remove(idx);
            let minor = go(m, rest, cols);
            cols.insert(idx, removed);
            let term = m[r][c].mul(&minor);
            acc = if idx % 2 == 0 {
                acc.add(&term)
            } else {
                acc.sub(&term)
            };
        }
        acc
    }
    let rows: Vec<usize> = (0..m.len()).collect();
    let mut cols = rows.clone();
    go(m, &rows, &mut cols)
}

/// Largest size for which [`determinant`] falls back to Laplace expansion.
pub const LAPLACE_MAX: usize = 5;

/// Bareiss elimination, or Laplace expansion for matrices up to
/// [`LAPLACE_MAX`] wide.
pub fn determinant<T: ExactRing>(m: &Matrix<T>) -> T {
    if m.len() <= LAPLACE_MAX {
        det_laplace(m)
    } else {
        det_bareiss(m)
    }
}

/// True when every entry below the first sub-diagonal is zero.
pub fn is_upper_hessenberg<T: ExactRing>(m: &Matrix<T>) -> bool {
    m.iter()
        .enumerate()
        .all(|(i, row)| row.iter().take(i.saturating_sub(1)).all(ExactRing::is_zero))
}
