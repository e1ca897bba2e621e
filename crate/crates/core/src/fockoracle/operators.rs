//! Single-mode operators and states on a truncated Fock space.

use serde::Serialize;

use crate::densela::{expm, Matrix};
use crate::error::{Error, Result};
use crate::{Complex64, ComplexMatrix};

/// Extra levels used when exponentiating a generator before truncating back.
const BASE_PADDING: usize = 40;

/// `(cutoff+1) x (cutoff+1)` matrix of a single-mode operator.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeOperator {
    pub matrix: ComplexMatrix,
}

fn annihilation_matrix(dim: usize) -> ComplexMatrix {
    Matrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

impl ModeOperator {
    pub fn cutoff(&self) -> usize {
        self.matrix.rows() - 1
    }

    /// `a` with `sqrt(n)` on the superdiagonal (`a|n> = sqrt(n)|n-1>`).
    pub fn annihilation(cutoff: usize) -> Self {
        ModeOperator {
            matrix: annihilation_matrix(cutoff + 1),
        }
    }

    pub fn creation(cutoff: usize) -> Self {
        ModeOperator {
            matrix: annihilation_matrix(cutoff + 1).adjoint(),
        }
    }

    /// `q = (a + a^dagger) / sqrt(2)`.
    pub fn position(cutoff: usize) -> Self {
        let a = annihilation_matrix(cutoff + 1);
        let m = (&a + &a.adjoint()).scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        ModeOperator { matrix: m }
    }

    /// `p = -i (a - a^dagger) / sqrt(2)`.
    pub fn momentum(cutoff: usize) -> Self {
        let a = annihilation_matrix(cutoff + 1);
        let m = (&a - &a.adjoint()).scale(Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2));
        ModeOperator { matrix: m }
    }

    /// `S(xi) = exp((ln xi / 2)(a^dagger^2 - a^2))`, so `Var(q) = xi^2 / 2` on vacuum.
    pub fn squeeze(xi: f64, cutoff: usize) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "squeezing {xi} must be positive"
            )));
        }
        let pad = BASE_PADDING + (20.0 * xi.ln().abs()).ceil() as usize;
        let dim = cutoff + 1 + pad;
        let a = annihilation_matrix(dim);
        let a2 = &a * &a;
        let gen = (&a2.adjoint() - &a2).scale(Complex64::new(0.5 * xi.ln(), 0.0));
        Ok(ModeOperator {
            matrix: expm(&gen)?.block(0, 0, cutoff + 1, cutoff + 1),
        })
    }

    /// `D(alpha) = exp(alpha a^dagger - alpha^* a)`.
    pub fn displacement(alpha: Complex64, cutoff: usize) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite displacement".into()));
        }
        let pad = BASE_PADDING + (4.0 * alpha.norm_sqr()).ceil() as usize;
        let dim = cutoff + 1 + pad;
        let a = annihilation_matrix(dim);
        let gen = &a.adjoint().scale(alpha) - &a.scale(alpha.conj());
        Ok(ModeOperator {
            matrix: expm(&gen)?.block(0, 0, cutoff + 1, cutoff + 1),
        })
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.matrix.matvec(v)
    }
}

/// Number state `|n>` as a vector of length `cutoff + 1`.
pub fn number_vector(n: usize, cutoff: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    if n <= cutoff {
        v[n] = Complex64::new(1.0, 0.0);
    }
    v
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `<u|v>`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `|<u|v>|^2 / (<u|u><v|v>)`.
pub fn fidelity(u: &[Complex64], v: &[Complex64]) -> f64 {
    inner(u, v).norm_sqr() / (norm_sqr(u) * norm_sqr(v))
}

/// Amplitudes of `D(alpha) S(r)|0>` in the number basis up to `cutoff`.
///
/// Uses the three-term recurrence from `(c a - s a^dagger)|psi> = (c alpha - s alpha^*)|psi>`
/// with `c, s = cosh, sinh(ln r)`, started from the exact vacuum overlap.
pub fn displaced_squeezed_amplitudes(alpha: Complex64, r: f64, cutoff: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    displaced_squeezed_into(alpha, r, cutoff, &mut out);
    out
}

pub(crate) fn displaced_squeezed_into(
    alpha: Complex64,
    r: f64,
    cutoff: usize,
    out: &mut Vec<Complex64>,
) {
    let lr = r.ln();
    let (c, s) = (lr.cosh(), lr.sinh());
    let t = lr.tanh();
    let beta = alpha * c - alpha.conj() * s;
    let psi0 = (-0.5 * alpha.norm_sqr() + 0.5 * t * alpha.conj() * alpha.conj()).exp() / c.sqrt();
    out.clear();
    out.push(psi0);
    let mut prev = Complex64::new(0.0, 0.0);
    for n in 0..cutoff {
        let cur = out[n];
        let next = (beta * cur + prev * (s * (n as f64).sqrt())) / (c * ((n + 1) as f64).sqrt());
        prev = cur;
        out.push(next);
    }
}

/// Map from eight-port outcome `(q, p)` to the projector displacement
/// `alpha = sqrt((1 + r^2)/2) (q + i p / r)`.
pub fn outcome_displacement(q: f64, p: f64, r: f64) -> Complex64 {
    Complex64::new(q, p / r) * ((1.0 + r * r) / 2.0).sqrt()
}

/// Beam-splitter parameters of the eight-port detector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PovmParams {
    pub reflectivity: f64,
    pub transmittivity: f64,
    /// Projection squeezing `R / T`.
    pub r: f64,
}

impl PovmParams {
    /// Displacement `(q1 / T + i p2 / R) / sqrt(2)` for the two homodyne readings.
    pub fn displacement(&self, q1: f64, p2: f64) -> Complex64 {
        Complex64::new(q1 / self.transmittivity, p2 / self.reflectivity)
            * std::f64::consts::FRAC_1_SQRT_2
    }
}

pub fn povm_params(reflectivity: f64, transmittivity: f64) -> Result<PovmParams> {
    let ok = reflectivity > 0.0
        && transmittivity > 0.0
        && (reflectivity * reflectivity + transmittivity * transmittivity - 1.0).abs() <= 1e-9;
    if !ok {
        return Err(Error::InvalidBs {
            reflectivity,
            transmittivity,
        });
    }
    Ok(PovmParams {
        reflectivity,
        transmittivity,
        r: reflectivity / transmittivity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expect(op: &ComplexMatrix, v: &[Complex64]) -> f64 {
        inner(v, &op.matvec(v)).re
    }

    #[test]
    fn ladder_and_quadratures() {
        let a = ModeOperator::annihilation(5);
        assert_eq!(a.matrix[(2, 3)], Complex64::new(3f64.sqrt(), 0.0));
        let q = ModeOperator::position(5);
        let p = ModeOperator::momentum(5);
        assert_eq!(q.matrix.max_abs_diff(&q.matrix.adjoint()), 0.0);
        assert_eq!(p.matrix.max_abs_diff(&p.matrix.adjoint()), 0.0);
    }

    #[test]
    fn squeezed_variances() {
        let c = 20;
        let s = ModeOperator::squeeze(1.2, c).unwrap();
        let v = s.matrix.column(0);
        let q = ModeOperator::position(c).matrix;
        let p = ModeOperator::momentum(c).matrix;
        let vq = expect(&(&q * &q), &v);
        let vp = expect(&(&p * &p), &v);
        assert!((vq - 0.72).abs() < 1e-6, "{vq}");
        assert!((vp - 1.0 / 2.88).abs() < 1e-6, "{vp}");
        assert!(v.iter().skip(1).step_by(2).all(|z| z.norm() < 1e-12));
        assert_eq!(
            ModeOperator::squeeze(1.0, 4).unwrap().matrix,
            ComplexMatrix::identity(5)
        );
    }

    #[test]
    fn recurrence_matches_operators() {
        let c = 16;
        for &(alpha, r) in &[
            (Complex64::new(0.3, -0.7), 1.3),
            (Complex64::new(-1.1, 0.4), 0.7),
        ] {
            let s0 = ModeOperator::squeeze(r, c + 30).unwrap().matrix.column(0);
            let d = ModeOperator::displacement(alpha, c + 30).unwrap();
            let full = d.apply(&s0);
            let rec = displaced_squeezed_amplitudes(alpha, r, c);
            for n in 0..=c {
                assert!(
                    (full[n] - rec[n]).norm() < 1e-12,
                    "n={n}: {} vs {}",
                    full[n],
                    rec[n]
                );
            }
        }
    }

    #[test]
    fn coherent_limit_and_norm() {
        let v = displaced_squeezed_amplitudes(Complex64::new(0.0, 0.0), 1.0, 6);
        assert!((v[0].re - 1.0).abs() < 1e-15 && norm_sqr(&v[1..]) == 0.0);
        let a = outcome_displacement(0.4, -0.2, 1.0);
        assert_eq!(a, Complex64::new(0.4, -0.2));
        let w = displaced_squeezed_amplitudes(outcome_displacement(1.0, 0.5, 1.4), 1.4, 40);
        assert!((norm_sqr(&w) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn povm_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((povm_params(h, h).unwrap().r - 1.0).abs() < 1e-15);
        let p = povm_params(0.6, 0.8).unwrap();
        assert!((p.r - 0.75).abs() < 1e-15);
        let x = p.displacement(0.8, 0.6);
        assert!((x - Complex64::new(h, h)).norm() < 1e-15);
        assert!(povm_params(1e-3, (1.0 - 1e-6f64).sqrt()).unwrap().r < 2e-3);
        assert!(matches!(
            povm_params(0.5, 0.5),
            Err(Error::InvalidBs { .. })
        ));
    }
}
