use crate::error::{Error, Result};
use crate::fockoracle::{
    displaced_squeezed_amplitudes, outcome_displacement, FockArray, FockBasis,
};
use crate::gausscore::born_constant;
use crate::{Complex64, ComplexMatrix};

/// `<v| rho |v>` for Hermitian `rho` stored row-major.
pub(crate) fn hermitian_form(rho: &[Complex64], v: &[Complex64]) -> f64 {
    let d = v.len();
    let mut diag = 0.0;
    let mut off = Complex64::new(0.0, 0.0);
    for a in 0..d {
        let row = &rho[a * d..(a + 1) * d];
        diag += row[a].re * v[a].norm_sqr();
        let mut acc = Complex64::new(0.0, 0.0);
        for b in a + 1..d {
            acc += row[b] * v[b];
        }
        off += v[a].conj() * acc;
    }
    diag + 2.0 * off.re
}

/// Eight-port density of a subset of modes, from the reduced density matrix.
#[derive(Clone, Debug)]
pub struct MarginalDensity {
    r: f64,
    basis: FockBasis,
    rho: ComplexMatrix,
}

impl MarginalDensity {
    pub fn new(state: &FockArray, r: f64, keep: &[usize]) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "projector squeezing {r} must be positive"
            )));
        }
        let (basis, rho) = state.reduced_density(keep)?;
        Ok(MarginalDensity { r, basis, rho })
    }

    pub fn modes(&self) -> usize {
        self.basis.modes()
    }

    pub fn value(&self, point: &[(f64, f64)]) -> f64 {
        let c = self.basis.cutoff();
        let vecs: Vec<Vec<Complex64>> = point
            .iter()
            .map(|&(q, p)| {
                displaced_squeezed_amplitudes(outcome_displacement(q, p, self.r), self.r, c)
            })
            .collect();
        let v: Vec<Complex64> = (0..self.basis.dim())
            .map(|a| {
                self.basis
                    .occupation(a)
                    .iter()
                    .zip(&vecs)
                    .map(|(&n, w)| w[n as usize])
                    .product()
            })
            .collect();
        born_constant(self.r, self.modes()) * hermitian_form(self.rho.as_slice(), &v).max(0.0)
    }
}
