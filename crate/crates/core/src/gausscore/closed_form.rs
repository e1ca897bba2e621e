//! Scalar closed forms for restricted interferometers.

use std::f64::consts::FRAC_PI_4;

/// Common denominator `(k^2 + l^2)^2 sin^2 phi + (k^2 l^2 + 1)^2 cos^2 phi`.
fn denominator(k: f64, l: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let a = k * k + l * l;
    let b = k * k * l * l + 1.0;
    a * a * s * s + b * b * c * c
}

/// Coefficient of `i Sigma` in `B`.
pub fn f_prefactor(k: f64, l: f64, phi: f64) -> f64 {
    (k.powi(4) - 1.0) * l * l * (2.0 * phi).sin() / denominator(k, l, phi)
}

/// Coefficient of the identity in `B`.
pub fn b_scalar(k: f64, l: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    ((l.powi(4) - k.powi(4)) * s * s + (k.powi(4) * l.powi(4) - 1.0) * c * c)
        / denominator(k, l, phi)
}

/// `det(sigma_out + I/2)` for uniform squeezings and a restricted interferometer.
pub fn det_closed_form(k: f64, l: f64, phi: f64, modes: usize) -> f64 {
    (denominator(k, l, phi) / (4.0 * k * k * l * l)).powi(modes as i32)
}

/// `f(k, l, pi/4)^m / sqrt(det)` for `m` photons on `modes` modes.
pub fn kappa(k: f64, l: f64, m: usize, modes: usize) -> f64 {
    f_prefactor(k, l, FRAC_PI_4).powi(m as i32) / det_closed_form(k, l, FRAC_PI_4, modes).sqrt()
}

/// Expanded form `2^(m + 3M/2) (k^4 - 1)^m l^(2m) (kl)^M / D^(m + M/2)`,
/// `D = k^4 l^4 + k^4 + l^4 + 4 k^2 l^2 + 1`.
pub fn kappa_explicit(k: f64, l: f64, m: usize, modes: usize) -> f64 {
    let (mf, mm) = (m as f64, modes as f64);
    let d = k.powi(4) * l.powi(4) + k.powi(4) + l.powi(4) + 4.0 * k * k * l * l + 1.0;
    2f64.powf(mf + 1.5 * mm)
        * (k.powi(4) - 1.0).powi(m as i32)
        * l.powi(2 * m as i32)
        * (k * l).powi(modes as i32)
        / d.powf(mf + 0.5 * mm)
}

/// Squeezing `k > 1` maximizing `kappa(k, 1)`:
/// `sqrt(1 + (2m + 2 sqrt(m (m + M))) / M)`.
pub fn k_opt(m: usize, modes: usize) -> f64 {
    let (mf, mm) = (m as f64, modes as f64);
    (1.0 + (2.0 * mf + 2.0 * (mf * (mf + mm)).sqrt()) / mm).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((f_prefactor(2f64.sqrt(), 1.0, FRAC_PI_4) - 1.0 / 3.0).abs() < 1e-15);
        assert!((det_closed_form(2f64.sqrt(), 1.0, FRAC_PI_4, 1) - 9.0 / 8.0).abs() < 1e-15);
        assert_eq!(f_prefactor(1.0, 0.7, 0.4), 0.0);
        assert_eq!(f_prefactor(1.3, 0.7, 0.0), 0.0);
        assert!((det_closed_form(1.0, 1.0, 0.3, 5) - 1.0).abs() < 1e-15);
        assert!((k_opt(4, 4) - (1.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn kappa_forms_agree() {
        for &k in &[0.3, 0.9, 1.5, 3.7] {
            for &l in &[0.25, 1.0, 2.2] {
                let a = kappa(k, l, 2, 4);
                let b = kappa_explicit(k, l, 2, 4);
                assert!(
                    (a - b).abs() <= 1e-12 * a.abs().max(1e-300),
                    "{k} {l}: {a} {b}"
                );
            }
        }
        assert_eq!(kappa(1.0, 0.8, 2, 4), 0.0);
    }

    #[test]
    fn f_is_odd_in_phi() {
        assert!((f_prefactor(1.4, 0.6, 0.3) + f_prefactor(1.4, 0.6, -0.3)).abs() < 1e-16);
    }
}
