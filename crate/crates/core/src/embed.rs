//! Embedding a real matrix into a symmetric orthogonal `Sigma`, and the KAK
//! factorization of restricted interferometers.

use serde::Serialize;

use crate::densela::{cholesky_psd, complete_orthonormal, spectral_norm, sym_eig, Matrix};
use crate::error::{Error, Result};
use crate::gausscore::{CircuitSpec, InterferometerSpec, PermanentSource, Variant};
use crate::{Complex64, ComplexMatrix, RealMatrix};

/// Slack allowed on `nu ||X||_2 <= 1`.
pub const NU_SLACK: f64 = 1e-10;
/// Largest distance of an eigenvalue from +-1 accepted by [`spectral_form`].
pub const INVOLUTION_TOL: f64 = 1e-6;

/// Symmetric orthogonal `Sigma` whose top-left `m x m` block is `nu [[0, X], [X^T, 0]]`.
///
/// With `V = [[Y, C], [B^T, D]]` the orthogonal completion of `[Y; Z]`, the
/// block rows of `Sigma` have sizes `p, p, r - p, r - p, M - 2r`.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingResult {
    pub sigma: RealMatrix,
    pub nu: f64,
    pub m: usize,
    pub r: usize,
    pub y: RealMatrix,
    pub z: RealMatrix,
    pub b: RealMatrix,
    pub c: RealMatrix,
    pub d: RealMatrix,
}

/// Embeds `X` (p x p) with scale `nu` into an M-mode `Sigma`, using `r = m = 2p`.
pub fn embed_sigma(x: &RealMatrix, nu: f64, modes: usize) -> Result<EmbeddingResult> {
    let p = x.ensure_square()?;
    if p == 0 {
        return Err(Error::InvalidParameter("X must be at least 1x1".into()));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "nu = {nu} must be positive"
        )));
    }
    let m = 2 * p;
    let r = m;
    if modes < 2 * r {
        return Err(Error::MTooSmall {
            modes,
            required: 2 * m,
        });
    }
    let scaled = nu * spectral_norm(x)?;
    if scaled > 1.0 + NU_SLACK {
        return Err(Error::NuTooLarge(scaled));
    }

    let y = x.scale(nu);
    let gram = &Matrix::identity(p) - &(&y.transpose() * &y);
    let z = cholesky_psd(&gram)?;
    let mut w = Matrix::zeros(m, p);
    w.set_block(0, 0, &y);
    w.set_block(p, 0, &z);
    let v = complete_orthonormal(&w, r)?;
    let c = v.block(0, p, p, r - p);
    let b = v.block(p, 0, r - p, p).transpose();
    let d = v.block(p, p, r - p, r - p);

    // block offsets: [p, p, r-p, r-p, M-2r]
    let (o1, o2, o3, o4) = (0, p, 2 * p, 2 * p + (r - p));
    let mut sigma = Matrix::zeros(modes, modes);
    sigma.set_block(o1, o2, &y);
    sigma.set_block(o1, o4, &c);
    sigma.set_block(o2, o1, &y.transpose());
    sigma.set_block(o2, o3, &b);
    sigma.set_block(o3, o2, &b.transpose());
    sigma.set_block(o3, o4, &d);
    sigma.set_block(o4, o1, &c.transpose());
    sigma.set_block(o4, o3, &d.transpose());
    for i in 2 * r..modes {
        sigma[(i, i)] = 1.0;
    }
    Ok(EmbeddingResult {
        sigma,
        nu,
        m,
        r,
        y,
        z,
        b,
        c,
        d,
    })
}

/// Circuit whose interferometer carries the embedding of `X`, with the
/// first `m` modes flagged and the permanent route recorded.
#[allow(clippy::too_many_arguments)]
pub fn embedded_circuit(
    x: &RealMatrix,
    nu: f64,
    modes: usize,
    theta: RealMatrix,
    phi: f64,
    s: f64,
    r: f64,
    eta: f64,
    variant: Variant,
) -> Result<CircuitSpec> {
    let e = embed_sigma(x, nu, modes)?;
    let spec = InterferometerSpec::new(theta, phi, e.sigma)?;
    Ok(CircuitSpec::new(spec, e.m, s, r, eta, variant)?
        .with_source(PermanentSource { x: x.clone(), nu }))
}

/// `Sigma = omega Delta omega^T` with `Delta` exactly +-1.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralForm {
    pub omega: RealMatrix,
    pub delta: Vec<f64>,
    /// `perm[j]` is the column of `omega` placed at position `j` so that the
    /// +1 eigenvalues come first.
    pub perm: Vec<usize>,
    pub p: usize,
}

impl SpectralForm {
    /// The permutation as a matrix `P` with `P^T Delta P = diag(1_p, -1_{M-p})`.
    pub fn perm_matrix(&self) -> RealMatrix {
        let n = self.perm.len();
        Matrix::from_fn(n, n, |i, j| if self.perm[j] == i { 1.0 } else { 0.0 })
    }

    pub fn recompose(&self) -> RealMatrix {
        let n = self.delta.len();
        let od = Matrix::from_fn(n, n, |i, j| self.omega[(i, j)] * self.delta[j]);
        &od * &self.omega.transpose()
    }
}

pub fn spectral_form(sigma: &RealMatrix) -> Result<SpectralForm> {
    let eig = sym_eig(sigma)?;
    let mut delta = Vec::with_capacity(eig.values.len());
    for &v in &eig.values {
        let rounded = if v >= 0.0 { 1.0 } else { -1.0 };
        if (v - rounded).abs() > INVOLUTION_TOL {
            return Err(Error::NotInvolution(v));
        }
        delta.push(rounded);
    }
    let mut perm: Vec<usize> = (0..delta.len()).collect();
    perm.sort_by(|&a, &b| delta[b].partial_cmp(&delta[a]).expect("finite"));
    let p = delta.iter().filter(|&&d| d > 0.0).count();
    Ok(SpectralForm {
        omega: eig.vectors,
        delta,
        perm,
        p,
    })
}

/// `T = O1 diag(e^{i phi} 1_p, e^{-i phi} 1_{M-p}) O2`.
#[derive(Clone, Debug, Serialize)]
pub struct KakResult {
    pub o1: RealMatrix,
    pub o2: RealMatrix,
    pub p: usize,
    pub phi: f64,
    /// Max-norm distance between the reconstruction and `build_t`.
    pub residual: f64,
}

impl KakResult {
    pub fn middle(&self) -> ComplexMatrix {
        let n = self.o1.rows();
        let d: Vec<Complex64> = (0..n)
            .map(|i| Complex64::from_polar(1.0, if i < self.p { self.phi } else { -self.phi }))
            .collect();
        Matrix::from_diag(&d)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        &(&self.o1.to_complex() * &self.middle()) * &self.o2.to_complex()
    }
}

/// KAK factors `O1 = omega P`, `O2 = P^T omega^T Theta^T`.
pub fn kak_decompose(spec: &InterferometerSpec) -> Result<KakResult> {
    let sf = spectral_form(spec.sigma())?;
    let pm = sf.perm_matrix();
    let o1 = &sf.omega * &pm;
    let o2 = &(&pm.transpose() * &sf.omega.transpose()) * &spec.theta().transpose();
    let mut kak = KakResult {
        o1,
        o2,
        p: sf.p,
        phi: spec.phi(),
        residual: 0.0,
    };
    kak.residual = kak.reconstruct().max_abs_diff(&spec.build_t());
    Ok(kak)
}

/// KAK factors labelled by their roles in an eight-port experiment:
/// `O1 diag(..)` as the post-processing network with local-oscillator phases,
/// `O2` as the change of basis after the squeezers.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentalForm {
    pub o_post: RealMatrix,
    pub lo_phases: Vec<f64>,
    pub o_change: RealMatrix,
    pub p: usize,
    pub m_minus_p: usize,
    pub residual: f64,
    /// Alternating-quadrature squeezer layouts are outside this form.
    pub alternating_squeezers_covered: bool,
}

pub fn exp_form_report(spec: &InterferometerSpec) -> Result<ExperimentalForm> {
    let kak = kak_decompose(spec)?;
    let n = spec.modes();
    let lo_phases = (0..n)
        .map(|i| if i < kak.p { kak.phi } else { -kak.phi })
        .collect();
    Ok(ExperimentalForm {
        o_post: kak.o1,
        lo_phases,
        o_change: kak.o2,
        p: kak.p,
        m_minus_p: n - kak.p,
        residual: kak.residual,
        alternating_squeezers_covered: false,
    })
}
