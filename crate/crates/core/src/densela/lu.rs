use num_traits::{ToPrimitive, Zero};

use super::{tol, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};

/// LU factorization with partial pivoting, `P A = L U` packed in one matrix.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: T,
    singular: bool,
}

impl<T: Scalar> Lu<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        let n = a.ensure_square()?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].modulus();
            for i in k + 1..n {
                let v = lu[(i, k)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::Real::zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] = lu[(i, j)] - f * u;
                    }
                }
            }
        }
        Ok(Lu {
            lu,
            perm,
            sign,
            singular,
        })
    }

    pub fn det(&self) -> T {
        if self.singular {
            return T::zero();
        }
        (0..self.lu.rows()).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }

    /// Solves `A x = b` for one right-hand side.
    pub fn solve_vec(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.lu.rows();
        if self.singular {
            return Err(Error::SingularMatrix(f64::INFINITY));
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Ok(x)
    }

    /// Inverse without a conditioning check.
    pub fn inverse_unchecked(&self) -> Result<Matrix<T>> {
        let n = self.lu.rows();
        let mut out = Matrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            let col = self.solve_vec(&e)?;
            e[j] = T::zero();
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }
}

/// Determinant by partial-pivot LU.
pub fn det<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    Ok(Lu::new(a)?.det())
}

/// Inverse by partial-pivot LU; rejects condition estimates above `tol::MAX_CONDITION`.
pub fn inv<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let lu = Lu::new(a)?;
    if lu.singular {
        return Err(Error::SingularMatrix(f64::INFINITY));
    }
    let x = lu.inverse_unchecked()?;
    let cond = a.norm_one() * x.norm_one();
    let limit = <T::Real as RealScalar>::lit(tol::MAX_CONDITION);
    if !(cond <= limit) {
        return Err(Error::SingularMatrix(
            cond.to_f64().unwrap_or(f64::INFINITY),
        ));
    }
    Ok(x)
}
