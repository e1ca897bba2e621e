use serde::Serialize;

use crate::densela::{det, inv, tol, Matrix};
use crate::error::{Error, Result};
use crate::{Complex64, ComplexMatrix};

/// 2M x 2M complex symplectic matrix in the `(a, a^dagger)` basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexSymplectic(pub ComplexMatrix);

/// Covariance matrix in the `(a, a^dagger)` basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovarianceMatrix(pub ComplexMatrix);

/// `K = Omega0 J Omega0^dagger = diag(-i I, i I)`.
pub fn symplectic_form(modes: usize) -> ComplexMatrix {
    let d: Vec<Complex64> = (0..2 * modes)
        .map(|i| {
            if i < modes {
                Complex64::new(0.0, -1.0)
            } else {
                Complex64::new(0.0, 1.0)
            }
        })
        .collect();
    Matrix::from_diag(&d)
}

impl ComplexSymplectic {
    pub fn modes(&self) -> usize {
        self.0.rows() / 2
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// Max-norm of `S K S^dagger - K`.
    pub fn symplectic_defect(&self) -> f64 {
        let k = symplectic_form(self.modes());
        (&(&self.0 * &k) * &self.0.adjoint()).max_abs_diff(&k)
    }

    pub fn compose(&self, right: &ComplexSymplectic) -> ComplexSymplectic {
        ComplexSymplectic(&self.0 * &right.0)
    }
}

impl CovarianceMatrix {
    pub fn modes(&self) -> usize {
        self.0.rows() / 2
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// `sigma + I/2`, the Husimi covariance.
    pub fn husimi(&self) -> ComplexMatrix {
        let half = ComplexMatrix::identity(self.0.rows()).scale(Complex64::new(0.5, 0.0));
        &self.0 + &half
    }

    /// Real part of `det(sigma + I/2)`.
    pub fn husimi_det(&self) -> Result<f64> {
        Ok(det(&self.husimi())?.re)
    }
}

/// Uniform-per-mode squeeze `[[D_c, D_s], [D_s, D_c]]` with `cosh/sinh(ln xi_j)`.
pub fn squeeze_symplectic(xi: &[f64]) -> Result<ComplexSymplectic> {
    if let Some(&bad) = xi.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "squeezing {bad} must be positive"
        )));
    }
    let m = xi.len();
    let dc: Vec<Complex64> = xi
        .iter()
        .map(|x| Complex64::new(x.ln().cosh(), 0.0))
        .collect();
    let ds: Vec<Complex64> = xi
        .iter()
        .map(|x| Complex64::new(x.ln().sinh(), 0.0))
        .collect();
    let c = Matrix::from_diag(&dc);
    let s = Matrix::from_diag(&ds);
    let out = Matrix::from_blocks(&c, &s, &s, &c)?;
    debug_assert_eq!(out.rows(), 2 * m);
    Ok(ComplexSymplectic(out))
}

/// `[[U, 0], [0, U^*]]` for a unitary `U`.
pub fn passive_symplectic(u: &ComplexMatrix) -> Result<ComplexSymplectic> {
    let m = u.ensure_square()?;
    let defect = u.unitarity_defect();
    if defect > tol::STRUCTURE {
        return Err(Error::NonUnitary(defect));
    }
    let z = Matrix::zeros(m, m);
    Ok(ComplexSymplectic(Matrix::from_blocks(
        u,
        &z,
        &z,
        &u.conj(),
    )?))
}

/// `S = S_l S_T S_k` for uniform squeezings `k` (input) and `l` (output).
pub fn trcvs_symplectic(k: f64, l: f64, t: &ComplexMatrix) -> Result<ComplexSymplectic> {
    let m = t.ensure_square()?;
    let st = passive_symplectic(t)?;
    let sk = squeeze_symplectic(&vec![k; m])?;
    let sl = squeeze_symplectic(&vec![l; m])?;
    Ok(sl.compose(&st).compose(&sk))
}

/// Output covariance `S S^dagger / 2` for vacuum input.
pub fn sigma_out(s: &ComplexSymplectic) -> CovarianceMatrix {
    CovarianceMatrix((&s.0 * &s.0.adjoint()).scale(Complex64::new(0.5, 0.0)))
}

/// `A = [[0, I], [I, 0]] (I - (sigma + I/2)^{-1})`.
pub fn a_matrix(sigma: &CovarianceMatrix) -> Result<ComplexMatrix> {
    let n = sigma.0.rows();
    let m = n / 2;
    let qinv = inv(&sigma.husimi()).map_err(|_| Error::SingularSigma)?;
    let inner = &ComplexMatrix::identity(n) - &qinv;
    // swapping the row halves applies [[0, I], [I, 0]] from the left
    Ok(Matrix::from_fn(n, n, |i, j| inner[((i + m) % n, j)]))
}

/// `B = (c_l s_k T + s_l c_k T^*)(c_l c_k T^* + s_l s_k T)^{-1}`.
pub fn b_matrix(k: f64, l: f64, t: &ComplexMatrix) -> Result<ComplexMatrix> {
    t.ensure_square()?;
    let (ck, sk) = (k.ln().cosh(), k.ln().sinh());
    let (cl, sl) = (l.ln().cosh(), l.ln().sinh());
    let tc = t.conj();
    let r = |x: f64| Complex64::new(x, 0.0);
    let left = &t.scale(r(cl * sk)) + &tc.scale(r(sl * ck));
    let right = &tc.scale(r(cl * ck)) + &t.scale(r(sl * sk));
    let rinv = inv(&right).map_err(|_| Error::SingularFactor)?;
    Ok(&left * &rinv)
}
