use std::sync::Arc;

use serde::Serialize;

use super::density::MarginalDensity;
use super::quadrature::gauss_legendre;
use crate::error::{Error, Result};
use crate::fockoracle::{cvs_state, FockBasis, InputRoute};
use crate::gausscore::CircuitSpec;

/// Largest bin width for which the second-order expansion is evaluated.
pub const MAX_TAYLOR_ETA: f64 = 1.0;

/// Box integral of a density against its second-order expansion about the box centre.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TaylorReport {
    pub eta: f64,
    pub lhs: f64,
    pub leading: f64,
    pub second_order: f64,
    pub residual: f64,
}

impl TaylorReport {
    /// `residual / eta^dims`, which scales as `eta^4`.
    pub fn normalized_residual(&self, dims: usize) -> f64 {
        self.residual / self.eta.powi(dims as i32)
    }
}

/// Compares the box integral of `density` over the cube of side `eta` centred
/// at `center` with `eta^D f + eta^(D+2)/24 * laplacian f`, `D = 2M'`.
pub fn taylor_check(
    density: &MarginalDensity,
    center: &[(f64, f64)],
    eta: f64,
) -> Result<TaylorReport> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bin width {eta} must be positive"
        )));
    }
    if eta > MAX_TAYLOR_ETA {
        return Err(Error::StepTooLarge(eta));
    }
    let m = density.modes();
    if center.len() != m || m > 2 {
        return Err(Error::DimensionMismatch(format!(
            "{}-point centre for a {m}-mode density (at most 2)",
            center.len()
        )));
    }
    let dims = 2 * m;
    let flat: Vec<f64> = center.iter().flat_map(|&(q, p)| [q, p]).collect();
    let eval = |x: &[f64]| {
        let pts: Vec<(f64, f64)> = x.chunks(2).map(|c| (c[0], c[1])).collect();
        density.value(&pts)
    };

    let (nodes, weights) = gauss_legendre(8);
    let mut lhs = 0.0;
    let mut x = vec![0.0; dims];
    let total = nodes.len().pow(dims as u32);
    for idx in 0..total {
        let mut rem = idx;
        let mut w = 1.0;
        for d in 0..dims {
            let k = rem % nodes.len();
            rem /= nodes.len();
            x[d] = flat[d] + 0.5 * eta * nodes[k];
            w *= 0.5 * eta * weights[k];
        }
        lhs += w * eval(&x);
    }

    let f0 = eval(&flat);
    let second_diff = |d: usize, h: f64| {
        let mut xp = flat.clone();
        let mut xm = flat.clone();
        xp[d] += h;
        xm[d] -= h;
        (eval(&xp) - 2.0 * f0 + eval(&xm)) / (h * h)
    };
    let h = eta / 10.0;
    let laplacian: f64 = (0..dims)
        .map(|d| (4.0 * second_diff(d, h / 2.0) - second_diff(d, h)) / 3.0)
        .sum();

    let leading = eta.powi(dims as i32) * f0;
    let second_order = eta.powi(dims as i32 + 2) / 24.0 * laplacian;
    let residual = (lhs - leading - second_order).abs();
    Ok(TaylorReport {
        eta,
        lhs,
        leading,
        second_order,
        residual,
    })
}

/// Ratio of normalized residuals at `eta` and `eta / 2`; fourth-order remainders give 16.
pub fn taylor_halving_ratio(
    density: &MarginalDensity,
    center: &[(f64, f64)],
    eta: f64,
) -> Result<(TaylorReport, TaylorReport, f64)> {
    let a = taylor_check(density, center, eta)?;
    let b = taylor_check(density, center, eta / 2.0)?;
    let dims = 2 * density.modes();
    Ok((
        a,
        b,
        a.normalized_residual(dims) / b.normalized_residual(dims),
    ))
}

/// Taylor check at the origin on the marginal of `keep` for the forward circuit.
pub fn taylor_check_circuit(
    circuit: &CircuitSpec,
    keep: &[usize],
    eta: f64,
    cutoff: usize,
) -> Result<TaylorReport> {
    let basis = Arc::new(FockBasis::per_mode(circuit.modes(), cutoff)?);
    let state = cvs_state(circuit, basis, InputRoute::Direct)?;
    let density = MarginalDensity::new(&state, circuit.r, keep)?;
    taylor_check(&density, &vec![(0.0, 0.0); keep.len()], eta)
}
