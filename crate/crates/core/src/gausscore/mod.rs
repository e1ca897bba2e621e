//! Gaussian covariance formalism, closed forms and the headline probabilities.

mod closed_form;
mod probability;
mod spec;
mod symplectic;

pub use closed_form::{b_scalar, det_closed_form, f_prefactor, k_opt, kappa, kappa_explicit};
pub use probability::{
    born_constant, cvs_density_origin, pr_cvs_origin, pr_trcvs_pattern, trcvs_pattern_probability,
    OriginDensity, PATH_AGREEMENT,
};
pub use spec::{CircuitSpec, InterferometerSpec, PermanentSource, Variant};
pub use symplectic::{
    a_matrix, b_matrix, passive_symplectic, sigma_out, squeeze_symplectic, symplectic_form,
    trcvs_symplectic, ComplexSymplectic, CovarianceMatrix,
};

use crate::densela::Matrix;
use crate::{Complex64, ComplexMatrix};

/// `b_scalar I + i f Sigma`, the closed form of [`b_matrix`] for restricted interferometers.
pub fn b_matrix_closed_form(k: f64, l: f64, spec: &InterferometerSpec) -> ComplexMatrix {
    let phi = spec.phi();
    let (alpha, f) = (b_scalar(k, l, phi), f_prefactor(k, l, phi));
    let sigma = spec.sigma();
    Matrix::from_fn(sigma.rows(), sigma.cols(), |i, j| {
        let d = if i == j { alpha } else { 0.0 };
        Complex64::new(d, f * sigma[(i, j)])
    })
}

/// `i f (-Sigma (+) Sigma)`, the pattern-relevant part of `A`.
pub fn a_prime_closed_form(k: f64, l: f64, spec: &InterferometerSpec) -> ComplexMatrix {
    let f = f_prefactor(k, l, spec.phi());
    let s = spec.sigma().map(|x| Complex64::new(0.0, f * x));
    s.scale(Complex64::new(-1.0, 0.0)).direct_sum(&s)
}
