use std::f64::consts::PI;

use serde::Serialize;

use super::closed_form::{det_closed_form, f_prefactor};
use super::spec::CircuitSpec;
use super::symplectic::{a_matrix, sigma_out, trcvs_symplectic};
use crate::error::{Error, Result};
use crate::hafperm::{haf_fast, perm_ryser, select_submatrix, DetectionPattern};
use crate::ComplexMatrix;

/// Relative agreement required between the hafnian and permanent routes.
pub const PATH_AGREEMENT: f64 = 1e-9;

fn clamp_probability(v: f64, what: &str) -> f64 {
    if v < 0.0 {
        log::warn!("{what}: clamped negative value {v:e} to zero");
        0.0
    } else {
        v
    }
}

/// Probability of a binary click pattern after `S_l T S_k` acting on vacuum:
/// `Haf(A_S) / sqrt(det(sigma_out + I/2))`.
pub fn trcvs_pattern_probability(
    k: f64,
    l: f64,
    t: &ComplexMatrix,
    pattern: &DetectionPattern,
) -> Result<f64> {
    if pattern.modes() != t.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode pattern for a {}-mode interferometer",
            pattern.modes(),
            t.rows()
        )));
    }
    let s = trcvs_symplectic(k, l, t)?;
    let sigma = sigma_out(&s);
    let a = a_matrix(&sigma)?;
    let a_s = select_submatrix(&a, pattern)?;
    let haf = haf_fast(&a_s)?;
    let det = sigma.husimi_det()?;
    Ok(clamp_probability(
        haf.re / det.sqrt(),
        "pattern probability",
    ))
}

/// Pattern probability of the time-reversed circuit with `k = r`, `l = 1/s`, `T = Q^dagger`.
pub fn pr_trcvs_pattern(circuit: &CircuitSpec, pattern: &DetectionPattern) -> Result<f64> {
    circuit.validate()?;
    trcvs_pattern_probability(
        circuit.k(),
        circuit.l(),
        &circuit.interferometer.build_t(),
        pattern,
    )
}

/// Closed-form value `f^m Haf(Sigma_m)^2 / sqrt(det)` and its ingredients.
#[derive(Clone, Debug, Serialize)]
pub struct OriginDensity {
    /// Value through the hafnian of the flagged block of Sigma.
    pub haf_path: f64,
    /// Value through `nu^m Perm(X)^2`, present when the circuit records its source.
    pub perm_path: Option<f64>,
    pub f: f64,
    pub det: f64,
}

impl OriginDensity {
    pub fn value(&self) -> f64 {
        self.haf_path
    }
}

/// `f(k,l,phi)^m Haf(Sigma_m)^2 / sqrt(det(sigma_out + I/2))`.
///
/// This equals the click-pattern probability of the time-reversed circuit;
/// multiplying by [`born_constant`] gives the eight-port density of the
/// forward circuit at the origin.
pub fn pr_cvs_origin(circuit: &CircuitSpec) -> Result<OriginDensity> {
    let m = circuit.mode_flags.weight();
    if m % 2 == 1 {
        return Err(Error::OddPatternWeight(m));
    }
    circuit.validate()?;
    let spec = &circuit.interferometer;
    let (k, l, phi) = (circuit.k(), circuit.l(), spec.phi());
    let f = f_prefactor(k, l, phi);
    let det = det_closed_form(k, l, phi, circuit.modes());
    let support = circuit.mode_flags.support();
    let sigma_m = spec.sigma().select(&support, &support);
    let haf = haf_fast(&sigma_m)?;
    let fm = f.powi(m as i32);
    let haf_path = clamp_probability(fm * haf * haf / det.sqrt(), "origin density");

    let perm_path = match &circuit.source {
        Some(src) => {
            let perm = perm_ryser(&src.x)?;
            let v = fm * src.nu.powi(m as i32) * perm * perm / det.sqrt();
            let scale = v.abs().max(haf_path.abs());
            if scale > 0.0 && (v - haf_path).abs() > PATH_AGREEMENT * scale {
                return Err(Error::PathMismatch {
                    first: haf_path,
                    second: v,
                });
            }
            Some(v)
        }
        None => None,
    };
    Ok(OriginDensity {
        haf_path,
        perm_path,
        f,
        det,
    })
}

/// Single-mode normalization of the squeezed coherent projectors,
/// `((1 + r^2) / (2 pi r))^M`.
pub fn born_constant(r: f64, modes: usize) -> f64 {
    ((1.0 + r * r) / (2.0 * PI * r)).powi(modes as i32)
}

/// Eight-port homodyne density of the forward circuit at the origin.
pub fn cvs_density_origin(circuit: &CircuitSpec) -> Result<f64> {
    Ok(born_constant(circuit.r, circuit.modes()) * pr_cvs_origin(circuit)?.value())
}
