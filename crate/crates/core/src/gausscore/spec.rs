use serde::{Deserialize, Serialize};

use crate::densela::{tol, Matrix};
use crate::error::{Error, Result};
use crate::hafperm::DetectionPattern;
use crate::{Complex64, ComplexMatrix, RealMatrix};

/// Restricted interferometer `Q = Theta exp(-i phi Sigma)` with `Theta`
/// orthogonal and `Sigma` symmetric orthogonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct InterferometerSpec {
    theta: RealMatrix,
    phi: f64,
    sigma: RealMatrix,
}

#[derive(Deserialize)]
struct RawSpec {
    theta: RealMatrix,
    phi: f64,
    sigma: RealMatrix,
}

impl TryFrom<RawSpec> for InterferometerSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        InterferometerSpec::new(r.theta, r.phi, r.sigma)
    }
}

impl InterferometerSpec {
    pub fn new(theta: RealMatrix, phi: f64, sigma: RealMatrix) -> Result<Self> {
        let m = theta
            .ensure_square()
            .map_err(|_| Error::InvalidSpec("Theta is not square".into()))?;
        if sigma.rows() != m || sigma.cols() != m {
            return Err(Error::InvalidSpec("Theta and Sigma sizes differ".into()));
        }
        if !phi.is_finite() || !theta.all_finite() || !sigma.all_finite() {
            return Err(Error::InvalidSpec("non-finite entries".into()));
        }
        let eye = Matrix::identity(m);
        let orth = (&theta.transpose() * &theta).max_abs_diff(&eye);
        if orth > tol::STRUCTURE {
            return Err(Error::InvalidSpec(format!(
                "Theta is not orthogonal ({orth:e})"
            )));
        }
        let sym = sigma.symmetry_defect();
        if sym > tol::STRUCTURE {
            return Err(Error::InvalidSpec(format!(
                "Sigma is not symmetric ({sym:e})"
            )));
        }
        let inv = (&sigma * &sigma).max_abs_diff(&eye);
        if inv > tol::STRUCTURE {
            return Err(Error::InvalidSpec(format!("Sigma^2 != I ({inv:e})")));
        }
        Ok(InterferometerSpec { theta, phi, sigma })
    }

    pub fn modes(&self) -> usize {
        self.theta.rows()
    }

    pub fn theta(&self) -> &RealMatrix {
        &self.theta
    }

    pub fn sigma(&self) -> &RealMatrix {
        &self.sigma
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `Q = Theta (cos phi I - i sin phi Sigma)`.
    pub fn build_q(&self) -> ComplexMatrix {
        let m = self.modes();
        let (s, c) = self.phi.sin_cos();
        let inner = Matrix::from_fn(m, m, |i, j| {
            let d = if i == j { c } else { 0.0 };
            Complex64::new(d, -s * self.sigma[(i, j)])
        });
        &self.theta.to_complex() * &inner
    }

    /// `T = Q^dagger`, the passive part of the time-reversed circuit.
    pub fn build_t(&self) -> ComplexMatrix {
        self.build_q().adjoint()
    }

    /// `T = cos phi Theta^T + i sin phi Sigma Theta^T`, evaluated directly.
    pub fn build_t_direct(&self) -> ComplexMatrix {
        let (s, c) = self.phi.sin_cos();
        let o = self.theta.transpose();
        let so = &self.sigma * &o;
        Matrix::from_fn(o.rows(), o.cols(), |i, j| {
            Complex64::new(c * o[(i, j)], s * so[(i, j)])
        })
    }
}

/// Whether the non-Gaussian resource is produced by photon subtraction or addition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Subtracted,
    Added,
}

/// Matrix `X` and scale `nu` that an interferometer was embedded from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermanentSource {
    pub x: RealMatrix,
    pub nu: f64,
}

/// Full sampling circuit: squeezed inputs, photon subtraction (or addition)
/// on the flagged modes, a restricted interferometer, and eight-port
/// homodyne detection with squeezed projectors binned at width `eta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub interferometer: InterferometerSpec,
    pub photons: usize,
    pub s: f64,
    pub r: f64,
    pub eta: f64,
    pub mode_flags: DetectionPattern,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<PermanentSource>,
}

impl CircuitSpec {
    /// Circuit with the first `photons` modes flagged.
    pub fn new(
        interferometer: InterferometerSpec,
        photons: usize,
        s: f64,
        r: f64,
        eta: f64,
        variant: Variant,
    ) -> Result<Self> {
        let modes = interferometer.modes();
        let c = CircuitSpec {
            mode_flags: DetectionPattern::leading(modes, photons.min(modes)),
            interferometer,
            photons,
            s,
            r,
            eta,
            variant,
            source: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_source(mut self, source: PermanentSource) -> Self {
        self.source = Some(source);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let modes = self.modes();
        if self.photons % 2 == 1 {
            return Err(Error::InvalidParameter(format!(
                "m = {} must be even",
                self.photons
            )));
        }
        if modes < 2 * self.photons {
            return Err(Error::MTooSmall {
                modes,
                required: 2 * self.photons,
            });
        }
        for (name, v) in [("s", self.s), ("r", self.r), ("eta", self.eta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be positive"
                )));
            }
        }
        if self.mode_flags.modes() != modes || self.mode_flags.weight() != self.photons {
            return Err(Error::InvalidParameter(
                "mode flags do not match M and m".into(),
            ));
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.interferometer.modes()
    }

    /// Input squeezing of the time-reversed circuit: the detector squeezing `r`.
    ///
    /// Reversing the circuit transposes every element; a real squeezer is
    /// symmetric in the Fock basis, so the projector squeezing carries over
    /// unchanged.
    pub fn k(&self) -> f64 {
        self.r
    }

    /// Output squeezing of the time-reversed circuit, `1/s`.
    pub fn l(&self) -> f64 {
        1.0 / self.s
    }
}
