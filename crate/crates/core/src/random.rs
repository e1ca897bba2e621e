//! Seeded random instances: matrices, interferometers and circuits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::densela::{qr_orthogonal, Matrix};
use crate::gausscore::InterferometerSpec;
use crate::{Complex64, ComplexMatrix, RealMatrix};

/// ChaCha8 generator for `seed`, on stream `stream`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> RealMatrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Complex symmetric matrix with independent standard normal parts.
pub fn complex_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            a[(i, j)] = z;
            a[(j, i)] = z;
        }
    }
    a
}

/// Haar-random orthogonal matrix (QR of a Gaussian matrix with sign fix).
pub fn orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealMatrix {
    let g = gaussian_matrix(n, n, rng);
    let q = qr_orthogonal(&g);
    let r = &q.transpose() * &g;
    let mut out = q;
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                out[(i, j)] = -out[(i, j)];
            }
        }
    }
    out
}

/// Haar-random unitary matrix.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g: ComplexMatrix = Matrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    // modified Gram-Schmidt on columns
    let mut q = g.clone();
    for j in 0..n {
        for k in 0..j {
            let dot: Complex64 = (0..n).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
            for i in 0..n {
                let v = q[(i, k)];
                q[(i, j)] -= dot * v;
            }
        }
        let norm = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            q[(i, j)] /= norm;
        }
    }
    q
}

/// Symmetric orthogonal matrix `O diag(1_p, -1_{n-p}) O^T`.
pub fn symmetric_orthogonal<R: Rng + ?Sized>(n: usize, p: usize, rng: &mut R) -> RealMatrix {
    let o = orthogonal(n, rng);
    let d: Vec<f64> = (0..n).map(|i| if i < p { 1.0 } else { -1.0 }).collect();
    let od = Matrix::from_fn(n, n, |i, j| o[(i, j)] * d[j]);
    let s = &od * &o.transpose();
    // exact symmetry
    Matrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]))
}

/// Random restricted interferometer on `modes` modes with phase in `(0, pi/2)`.
pub fn interferometer<R: Rng + ?Sized>(modes: usize, rng: &mut R) -> InterferometerSpec {
    let theta = orthogonal(modes, rng);
    let p = rng.random_range(0..=modes);
    let sigma = symmetric_orthogonal(modes, p, rng);
    let phi = rng.random_range(0.05..std::f64::consts::FRAC_PI_2 - 0.05);
    InterferometerSpec::new(theta, phi, sigma).expect("random spec satisfies invariants")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_have_structure() {
        let mut rng = seeded_rng(3, 0);
        let o = orthogonal(5, &mut rng);
        assert!(o.unitarity_defect() < 1e-13);
        let u = unitary(4, &mut rng);
        assert!(u.unitarity_defect() < 1e-13);
        let s = symmetric_orthogonal(6, 2, &mut rng);
        assert!((&s * &s).max_abs_diff(&Matrix::identity(6)) < 1e-13);
        assert_eq!(s.symmetry_defect(), 0.0);
    }

    #[test]
    fn streams_differ_and_repeat() {
        let a: f64 = seeded_rng(1, 0).random();
        let b: f64 = seeded_rng(1, 1).random();
        let c: f64 = seeded_rng(1, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
