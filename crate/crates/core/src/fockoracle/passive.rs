//! Two-mode beam-splitter decomposition of passive unitaries.

use crate::{Complex64, ComplexMatrix};

/// Two-mode unitary `g` acting on modes `(first, first + 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Givens {
    pub first: usize,
    pub g: [[Complex64; 2]; 2],
}

/// Factorization `U = G_1^dagger ... G_N^dagger D` with nearest-neighbour
/// rotations and a diagonal phase screen.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub phases: Vec<Complex64>,
    /// `G_1^dagger, ..., G_N^dagger` in the order they multiply from the left.
    pub rotations: Vec<Givens>,
}

impl Mesh {
    pub fn decompose(u: &ComplexMatrix) -> Mesh {
        let n = u.rows();
        let mut w = u.clone();
        let mut gs = Vec::new();
        for c in 0..n.saturating_sub(1) {
            for r in (c + 1..n).rev() {
                let (x, y) = (w[(r - 1, c)], w[(r, c)]);
                if y.norm() == 0.0 {
                    continue;
                }
                let rho = (x.norm_sqr() + y.norm_sqr()).sqrt();
                let g = [[x.conj() / rho, y.conj() / rho], [-y / rho, x / rho]];
                for k in 0..n {
                    let (a, b) = (w[(r - 1, k)], w[(r, k)]);
                    w[(r - 1, k)] = g[0][0] * a + g[0][1] * b;
                    w[(r, k)] = g[1][0] * a + g[1][1] * b;
                }
                gs.push(Givens { first: r - 1, g });
            }
        }
        let phases = (0..n).map(|j| w[(j, j)]).collect();
        let rotations = gs
            .into_iter()
            .map(|Givens { first, g }| Givens {
                first,
                g: [
                    [g[0][0].conj(), g[1][0].conj()],
                    [g[0][1].conj(), g[1][1].conj()],
                ],
            })
            .collect();
        Mesh { phases, rotations }
    }

    /// Rebuilds the dense unitary.
    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.phases.len();
        let mut m = ComplexMatrix::from_diag(&self.phases);
        for gv in self.rotations.iter().rev() {
            let r = gv.first;
            for k in 0..n {
                let (a, b) = (m[(r, k)], m[(r + 1, k)]);
                m[(r, k)] = gv.g[0][0] * a + gv.g[0][1] * b;
                m[(r + 1, k)] = gv.g[1][0] * a + gv.g[1][1] * b;
            }
        }
        m
    }
}

/// Log-factorials `ln 0! ..= ln n!`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

fn cpow(z: Complex64, k: usize) -> Complex64 {
    if k == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        z.powi(k as i32)
    }
}

/// Matrix of a two-mode passive unitary on the `N`-photon sector.
///
/// Basis `|a, N - a>`, `a = 0..=N`; entry `(a', a)` is `<a', N-a'| U_g |a, N-a>`
/// with `a_1^dagger -> g11 a_1^dagger + g21 a_2^dagger` and
/// `a_2^dagger -> g12 a_1^dagger + g22 a_2^dagger`.
pub(crate) fn sector_matrix(g: &[[Complex64; 2]; 2], n: usize, lf: &[f64]) -> Vec<Complex64> {
    let dim = n + 1;
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    let ln_binom = |a: usize, b: usize| lf[a] - lf[b] - lf[a - b];
    for a in 0..=n {
        let b = n - a;
        for ap in 0..=n {
            let bp = n - ap;
            let norm = 0.5 * (lf[ap] + lf[bp] - lf[a] - lf[b]);
            let mut acc = Complex64::new(0.0, 0.0);
            let lo = ap.saturating_sub(b);
            let hi = a.min(ap);
            for p in lo..=hi {
                let q = ap - p;
                let mag = (ln_binom(a, p) + ln_binom(b, q) + norm).exp();
                acc += cpow(g[0][0], p)
                    * cpow(g[1][0], a - p)
                    * cpow(g[0][1], q)
                    * cpow(g[1][1], b - q)
                    * mag;
            }
            out[ap * dim + a] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{seeded_rng, unitary};

    #[test]
    fn mesh_reconstructs() {
        let mut rng = seeded_rng(3, 0);
        for n in 1..7 {
            let u = unitary(n, &mut rng);
            let mesh = Mesh::decompose(&u);
            assert!(mesh.rotations.len() <= n * (n - 1) / 2);
            assert!(mesh.matrix().max_abs_diff(&u) < 1e-12);
            assert!(mesh.phases.iter().all(|d| (d.norm() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn one_photon_sector_is_g() {
        let mut rng = seeded_rng(4, 0);
        let u = unitary(2, &mut rng);
        let g = [[u[(0, 0)], u[(0, 1)]], [u[(1, 0)], u[(1, 1)]]];
        let lf = ln_factorials(8);
        // basis |0,1>, |1,0>
        let s = sector_matrix(&g, 1, &lf);
        assert!((s[3] - g[0][0]).norm() < 1e-14);
        assert!((s[0] - g[1][1]).norm() < 1e-14);
        assert!((s[2] - g[0][1]).norm() < 1e-14);
        for n in 0..6 {
            let s = sector_matrix(&g, n, &lf);
            let m = ComplexMatrix::from_vec(n + 1, n + 1, s).unwrap();
            assert!(m.unitarity_defect() < 1e-12, "sector {n}");
        }
    }

    #[test]
    fn hong_ou_mandel() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let g = [
            [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        ];
        let s = sector_matrix(&g, 2, &ln_factorials(4));
        // |1,1> -> (|2,0> - |0,2>)/sqrt(2)
        assert!(s[4].norm() < 1e-15);
        assert!((s[2 * 3 + 1].norm() - h).abs() < 1e-15);
    }
}
