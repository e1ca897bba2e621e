//! Factorizations specific to real symmetric and orthogonal matrices.

use super::{tol, Matrix};
use crate::error::{Error, Result};
use crate::scalar::RealScalar;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a real symmetric matrix.
///
/// Eigenvalues are in descending order; column `j` of `vectors` belongs to
/// `values[j]` and has its first non-negligible component positive.
#[derive(Clone, Debug)]
pub struct SymEig<R> {
    pub values: Vec<R>,
    pub vectors: Matrix<R>,
}

/// Cyclic Jacobi eigen-solver for symmetric matrices.
pub fn sym_eig<R: RealScalar>(m: &Matrix<R>) -> Result<SymEig<R>> {
    let n = m.ensure_square()?;
    let scale = m.max_norm().max(R::one());
    let defect = m.symmetry_defect();
    if defect > R::lit(tol::STRUCTURE) * scale {
        return Err(Error::NotSymmetric(defect.to_f64().unwrap_or(f64::NAN)));
    }
    let mut a = Matrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)]) * R::lit(0.5));
    let mut v: Matrix<R> = Matrix::identity(n);
    let eps = R::epsilon();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = R::zero();
        let mut total = R::zero();
        for i in 0..n {
            for j in 0..n {
                let x = a[(i, j)] * a[(i, j)];
                total = total + x;
                if i != j {
                    off = off + x;
                }
            }
        }
        if off <= eps * eps * total || off == R::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == R::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (R::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + R::one()).sqrt());
                let c = R::one() / (t * t + R::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .partial_cmp(&a[(i, i)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<R> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    fix_column_signs(&mut vectors);
    Ok(SymEig { values, vectors })
}

/// Flips columns so that the first component above 1e-12 in modulus is positive.
fn fix_column_signs<R: RealScalar>(v: &mut Matrix<R>) {
    let thresh = R::lit(1e-12);
    for j in 0..v.cols() {
        let lead = (0..v.rows()).map(|i| v[(i, j)]).find(|x| x.abs() > thresh);
        if matches!(lead, Some(x) if x < R::zero()) {
            for i in 0..v.rows() {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
}

/// Spectral norm (largest singular value).
pub fn spectral_norm<R: RealScalar>(x: &Matrix<R>) -> Result<R> {
    let g = &x.transpose() * x;
    let e = sym_eig(&g)?;
    Ok(e.values
        .first()
        .copied()
        .unwrap_or(R::zero())
        .max(R::zero())
        .sqrt())
}

/// Upper-triangular `Z` with `Z^T Z = m` for symmetric positive semidefinite `m`.
///
/// Eigenvalues in `[-1e-8, 0)` are clamped to zero before factorizing; rank
/// deficiency yields zero rows in `Z`.
pub fn cholesky_psd<R: RealScalar>(m: &Matrix<R>) -> Result<Matrix<R>> {
    let n = m.ensure_square()?;
    let eig = sym_eig(m)?;
    let min = eig.values.last().copied().unwrap_or(R::zero());
    if min < -R::lit(tol::PSD_CLAMP) {
        return Err(Error::NotPsd(min.to_f64().unwrap_or(f64::NAN)));
    }
    let work = if min < R::zero() {
        let clamped: Vec<R> = eig.values.iter().map(|&x| x.max(R::zero())).collect();
        let vd = Matrix::from_fn(n, n, |i, j| eig.vectors[(i, j)] * clamped[j]);
        &vd * &eig.vectors.transpose()
    } else {
        Matrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)]) * R::lit(0.5))
    };

    let max_diag = work.diagonal().into_iter().fold(R::zero(), |a, b| a.max(b));
    let floor = R::lit(1e-13) * max_diag.max(R::one());
    let mut z: Matrix<R> = Matrix::zeros(n, n);
    for k in 0..n {
        let mut d = work[(k, k)];
        for i in 0..k {
            d = d - z[(i, k)] * z[(i, k)];
        }
        if d <= floor {
            continue;
        }
        let zkk = d.sqrt();
        z[(k, k)] = zkk;
        for j in k + 1..n {
            let mut s = work[(k, j)];
            for i in 0..k {
                s = s - z[(i, k)] * z[(i, j)];
            }
            z[(k, j)] = s / zkk;
        }
    }
    Ok(z)
}

/// Householder QR; returns the full orthogonal factor `Q` (rows x rows).
pub fn qr_orthogonal<R: RealScalar>(a: &Matrix<R>) -> Matrix<R> {
    let n = a.rows();
    let k = a.cols().min(n);
    let mut r = a.clone();
    let mut q: Matrix<R> = Matrix::identity(n);
    for j in 0..k {
        let mut norm = R::zero();
        for i in j..n {
            norm = norm + r[(i, j)] * r[(i, j)];
        }
        let norm = norm.sqrt();
        if norm == R::zero() {
            continue;
        }
        let alpha = if r[(j, j)] > R::zero() { -norm } else { norm };
        let mut v: Vec<R> = (j..n).map(|i| r[(i, j)]).collect();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(R::zero(), |s, &x| s + x * x);
        if vnorm2 == R::zero() {
            continue;
        }
        let two = R::lit(2.0);
        for c in 0..r.cols() {
            let dot = (j..n).fold(R::zero(), |s, i| s + v[i - j] * r[(i, c)]);
            let f = two * dot / vnorm2;
            for i in j..n {
                r[(i, c)] = r[(i, c)] - f * v[i - j];
            }
        }
        // Q <- Q H
        for row in 0..n {
            let dot = (j..n).fold(R::zero(), |s, i| s + q[(row, i)] * v[i - j]);
            let f = two * dot / vnorm2;
            for i in j..n {
                q[(row, i)] = q[(row, i)] - f * v[i - j];
            }
        }
    }
    q
}

/// Extends the orthonormal columns of `w` (n x k) to an n x n orthogonal matrix.
///
/// The first k columns are `w` itself; the complement comes from a Householder
/// QR of `w`, with each added column's first non-negligible entry positive.
pub fn complete_orthonormal<R: RealScalar>(w: &Matrix<R>, n: usize) -> Result<Matrix<R>> {
    if w.rows() != n || w.cols() > n {
        return Err(Error::DimensionMismatch(format!(
            "cannot complete {}x{} to order {n}",
            w.rows(),
            w.cols()
        )));
    }
    let k = w.cols();
    let gram = &w.transpose() * w;
    let dev = gram.max_abs_diff(&Matrix::identity(k));
    if dev > R::lit(tol::ORTHONORMAL_INPUT) {
        return Err(Error::NotOrthonormalInput(dev.to_f64().unwrap_or(f64::NAN)));
    }
    let q = qr_orthogonal(w);
    let mut complement = q.block(0, k, n, n - k);
    fix_column_signs(&mut complement);
    let mut out = Matrix::zeros(n, n);
    out.set_block(0, 0, w);
    out.set_block(0, k, &complement);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eig_sorted_descending_with_signs() {
        let m = Matrix::from_rows(&[[2.0f64, 1.0], [1.0, 2.0]]).unwrap();
        let e = sym_eig(&m).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let s = 0.5f64.sqrt();
        assert!((e.vectors[(0, 0)] - s).abs() < 1e-14 && (e.vectors[(1, 0)] - s).abs() < 1e-14);
        assert!((e.vectors[(0, 1)] - s).abs() < 1e-14 && (e.vectors[(1, 1)] + s).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_asymmetric() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eig(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn cholesky_examples() {
        let i: Matrix<f64> = Matrix::identity(3);
        assert!(cholesky_psd(&i).unwrap().max_abs_diff(&i) < 1e-15);
        let r1 = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let z = cholesky_psd(&r1).unwrap();
        assert!((&z.transpose() * &z).max_abs_diff(&r1) < 1e-14);
        let neg = Matrix::from_rows(&[[1.0, 0.0], [0.0, -1e-3]]).unwrap();
        assert!(matches!(cholesky_psd(&neg), Err(Error::NotPsd(_))));
        let tiny = Matrix::from_rows(&[[1.0, 0.0], [0.0, -1e-12]]).unwrap();
        assert!(cholesky_psd(&tiny).is_ok());
    }

    #[test]
    fn completion_of_unit_vector() {
        let w = Matrix::from_rows(&[[1.0f64], [0.0]]).unwrap();
        let o = complete_orthonormal(&w, 2).unwrap();
        assert_eq!(o.column(0), vec![1.0, 0.0]);
        assert!(o[(0, 1)].abs() < 1e-15 && (o[(1, 1)].abs() - 1.0).abs() < 1e-15);
        let bad = Matrix::from_rows(&[[2.0], [0.0]]).unwrap();
        assert!(matches!(
            complete_orthonormal(&bad, 2),
            Err(Error::NotOrthonormalInput(_))
        ));
    }

    #[test]
    fn spectral_norm_of_diag() {
        let d = Matrix::from_diag(&[0.5f64, -3.0]);
        assert!((spectral_norm(&d).unwrap() - 3.0).abs() < 1e-14);
    }
}
