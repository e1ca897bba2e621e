use num_traits::{Float, One, Zero};

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};

const TAYLOR_TERMS: usize = 24;

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// The argument is scaled so its 1-norm is at most 1/2, where 24 Taylor terms
/// are exact to double precision.
pub fn expm<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let n = m.ensure_square()?;
    if !m.all_finite() {
        return Err(Error::InvalidParameter("non-finite matrix in expm".into()));
    }
    let norm = m.norm_one();
    let half = <T::Real as RealScalar>::lit(0.5);
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > half {
        scaled_norm = scaled_norm * half;
        squarings += 1;
    }
    let factor = T::from_real(half.powi(squarings as i32));
    let a = m.scale(factor);

    let mut result = Matrix::identity(n);
    let mut term: Matrix<T> = Matrix::identity(n);
    for k in 1..=TAYLOR_TERMS {
        let inv_k = T::from_real(T::Real::one() / <T::Real as RealScalar>::lit(k as f64));
        term = (&term * &a).scale(inv_k);
        if term.max_norm() == T::Real::zero() {
            break;
        }
        result = &result + &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_gives_identity() {
        let z: Matrix<f64> = Matrix::zeros(3, 3);
        assert_eq!(expm(&z).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn nilpotent_is_exact() {
        let n = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let e = expm(&n).unwrap();
        assert_eq!(e, Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap());
    }

    #[test]
    fn diagonal_and_rotation() {
        let d = Matrix::from_diag(&[1.0, 2.0]);
        let e = expm(&d).unwrap();
        assert!((e[(0, 0)] - 1f64.exp()).abs() < 1e-14 * 1f64.exp());
        assert!((e[(1, 1)] - 2f64.exp()).abs() < 1e-14 * 2f64.exp());

        let t = 0.7;
        let g = Matrix::from_rows(&[
            [Complex64::new(0.0, 0.0), Complex64::new(-t, 0.0)],
            [Complex64::new(t, 0.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        let r = expm(&g).unwrap();
        assert!((r[(0, 0)].re - t.cos()).abs() < 1e-15);
        assert!((r[(1, 0)].re - t.sin()).abs() < 1e-15);
    }
}
