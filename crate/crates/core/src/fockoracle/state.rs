use std::collections::HashMap;
use std::sync::Arc;

use super::basis::FockBasis;
use super::operators::ModeOperator;
use super::passive::{ln_factorials, sector_matrix, Mesh};
use crate::error::{Error, Result};
use crate::hafperm::DetectionPattern;
use crate::{Complex64, ComplexMatrix};

/// Norm below which a post-operation state counts as null.
pub const NULL_NORM: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Pure state on a truncated multimode Fock basis.
///
/// `leakage` estimates the squared norm lost to truncation so far.
#[derive(Clone, Debug)]
pub struct FockArray {
    basis: Arc<FockBasis>,
    amps: Vec<Complex64>,
    leakage: f64,
}

impl FockArray {
    pub fn from_amplitudes(
        basis: Arc<FockBasis>,
        amps: Vec<Complex64>,
        leakage: f64,
    ) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a basis of dimension {}",
                amps.len(),
                basis.dim()
            )));
        }
        if amps.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(FockArray {
            basis,
            amps,
            leakage,
        })
    }

    pub fn vacuum(basis: Arc<FockBasis>) -> Self {
        let mut amps = vec![ZERO; basis.dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        FockArray {
            basis,
            amps,
            leakage: 0.0,
        }
    }

    pub fn number_state(basis: Arc<FockBasis>, occ: &[u8]) -> Result<Self> {
        let i = basis.index_of(occ).ok_or_else(|| {
            Error::InvalidParameter(format!("occupation {occ:?} outside the basis"))
        })?;
        let mut amps = vec![ZERO; basis.dim()];
        amps[i] = Complex64::new(1.0, 0.0);
        Ok(FockArray {
            basis,
            amps,
            leakage: 0.0,
        })
    }

    /// Tensor product of single-mode states, each assumed normalized before truncation.
    pub fn product(basis: Arc<FockBasis>, factors: &[Vec<Complex64>]) -> Result<Self> {
        if factors.len() != basis.modes() {
            return Err(Error::DimensionMismatch(format!(
                "{} factors for {} modes",
                factors.len(),
                basis.modes()
            )));
        }
        let amps: Vec<Complex64> = (0..basis.dim())
            .map(|i| {
                basis
                    .occupation(i)
                    .iter()
                    .zip(factors)
                    .map(|(&n, f)| f.get(n as usize).copied().unwrap_or(ZERO))
                    .product()
            })
            .collect();
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        Ok(FockArray {
            basis,
            amps,
            leakage: (1.0 - norm).max(0.0),
        })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn modes(&self) -> usize {
        self.basis.modes()
    }

    pub fn cutoff(&self) -> usize {
        self.basis.cutoff()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if n <= NULL_NORM {
            return Err(Error::NullState);
        }
        self.amps.iter_mut().for_each(|z| *z /= n);
        Ok(())
    }

    pub fn amplitude(&self, occ: &[u8]) -> Complex64 {
        self.basis.index_of(occ).map_or(ZERO, |i| self.amps[i])
    }

    /// `|<n|psi>|^2` for an exact occupation pattern.
    pub fn number_prob(&self, occ: &[u8]) -> f64 {
        self.amplitude(occ).norm_sqr()
    }

    /// Probability of exactly one photon in each flagged mode and none elsewhere.
    pub fn pattern_prob(&self, pattern: &DetectionPattern) -> Result<f64> {
        if pattern.modes() != self.modes() {
            return Err(Error::DimensionMismatch(format!(
                "{}-mode pattern on a {}-mode state",
                pattern.modes(),
                self.modes()
            )));
        }
        Ok(self.number_prob(&pattern.bits()))
    }

    /// `|<self|other>|^2 / (||self||^2 ||other||^2)`.
    pub fn fidelity(&self, other: &FockArray) -> Result<f64> {
        self.same_basis(other)?;
        Ok(super::operators::fidelity(&self.amps, &other.amps))
    }

    fn same_basis(&self, other: &FockArray) -> Result<()> {
        let (a, b) = (&self.basis, &other.basis);
        if a.modes() != b.modes() || a.cutoff() != b.cutoff() || a.cap() != b.cap() {
            return Err(Error::DimensionMismatch(
                "states live on different bases".into(),
            ));
        }
        Ok(())
    }

    /// Probability of each total photon number.
    pub fn photon_number_distribution(&self) -> Vec<f64> {
        let max = self.basis.cap().unwrap_or(self.cutoff() * self.modes());
        let mut out = vec![0.0; max + 1];
        for (i, z) in self.amps.iter().enumerate() {
            let n: usize = self.basis.occupation(i).iter().map(|&k| k as usize).sum();
            out[n] += z.norm_sqr();
        }
        out
    }

    /// Indices of each fiber along `mode`, ordered by that mode's occupation.
    fn fibers(&self, mode: usize) -> Vec<Vec<usize>> {
        let b = &self.basis;
        (0..b.dim())
            .filter(|&i| b.occupation(i)[mode] == 0)
            .map(|i| {
                let mut f = vec![i];
                while let Some(k) = b.with_occupation(i, mode, f.len()) {
                    f.push(k);
                }
                f
            })
            .collect()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes() {
            return Err(Error::InvalidParameter(format!(
                "mode {mode} of a {}-mode state",
                self.modes()
            )));
        }
        Ok(())
    }

    /// Applies a `(cutoff+1)`-square matrix to one mode; components pushed
    /// outside the basis are dropped.
    pub fn apply_mode_matrix(&mut self, mode: usize, m: &ComplexMatrix) -> Result<()> {
        self.check_mode(mode)?;
        if m.rows() != self.cutoff() + 1 || m.cols() != self.cutoff() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} mode matrix at cutoff {}",
                m.rows(),
                m.cols(),
                self.cutoff()
            )));
        }
        let mut buf = Vec::new();
        for fiber in self.fibers(mode) {
            buf.clear();
            buf.extend(fiber.iter().map(|&i| self.amps[i]));
            for (r, &i) in fiber.iter().enumerate() {
                self.amps[i] = buf.iter().enumerate().map(|(c, v)| m[(r, c)] * v).sum();
            }
        }
        Ok(())
    }

    /// Applies a single-mode unitary, recording the norm lost to truncation.
    pub fn apply_mode_unitary(&mut self, mode: usize, op: &ModeOperator) -> Result<()> {
        let before = self.norm_sqr();
        self.apply_mode_matrix(mode, &op.matrix)?;
        self.leakage += (before - self.norm_sqr()).max(0.0);
        Ok(())
    }

    /// `S(xi)` on one mode.
    pub fn squeeze_mode(&mut self, mode: usize, xi: f64) -> Result<()> {
        let op = ModeOperator::squeeze(xi, self.cutoff())?;
        self.apply_mode_unitary(mode, &op)
    }

    /// Multiplies each basis state by `prod_j d_j^{n_j}`.
    pub fn apply_phases(&mut self, phases: &[Complex64]) -> Result<()> {
        if phases.len() != self.modes() {
            return Err(Error::DimensionMismatch(format!(
                "{} phases for {} modes",
                phases.len(),
                self.modes()
            )));
        }
        let powers: Vec<Vec<Complex64>> = phases
            .iter()
            .map(|&d| {
                let mut p = vec![Complex64::new(1.0, 0.0)];
                for k in 0..self.cutoff() {
                    p.push(p[k] * d);
                }
                p
            })
            .collect();
        for (i, z) in self.amps.iter_mut().enumerate() {
            let f: Complex64 = self
                .basis
                .occupation(i)
                .iter()
                .zip(&powers)
                .map(|(&n, p)| p[n as usize])
                .product();
            *z *= f;
        }
        Ok(())
    }

    /// Two-mode passive unitary on modes `(i, i + 1)`, sector by sector.
    fn apply_two_mode(&mut self, i: usize, g: &[[Complex64; 2]; 2], lf: &[f64]) {
        let j = i + 1;
        let b = Arc::clone(&self.basis);
        let mut cache: HashMap<usize, Vec<Complex64>> = HashMap::new();
        let mut idx = Vec::new();
        let mut buf = Vec::new();
        for s in 0..b.dim() {
            let occ = b.occupation(s);
            let (ni, nj) = (occ[i] as usize, occ[j] as usize);
            // sector start: no state with one photon moved from i to j
            if ni > 0
                && b.with_occupation(s, i, ni - 1)
                    .and_then(|t| b.with_occupation(t, j, nj + 1))
                    .is_some()
            {
                continue;
            }
            let n = ni + nj;
            idx.clear();
            idx.push((ni, s));
            let (mut a, mut cur) = (ni, s);
            while a < n {
                match b
                    .with_occupation(cur, j, n - a - 1)
                    .and_then(|t| b.with_occupation(t, i, a + 1))
                {
                    Some(t) => {
                        a += 1;
                        cur = t;
                        idx.push((a, t));
                    }
                    None => break,
                }
            }
            let m = cache.entry(n).or_insert_with(|| sector_matrix(g, n, lf));
            let dim = n + 1;
            buf.clear();
            buf.extend(idx.iter().map(|&(_, k)| self.amps[k]));
            for &(ap, k) in idx.iter() {
                self.amps[k] = idx
                    .iter()
                    .zip(&buf)
                    .map(|(&(a, _), v)| m[ap * dim + a] * v)
                    .sum();
            }
        }
    }

    /// Applies `U_U` with `U_U a_j^dagger U_U^dagger = sum_k U_kj a_k^dagger`.
    pub fn apply_passive(&mut self, u: &ComplexMatrix) -> Result<()> {
        if u.rows() != self.modes() || u.cols() != self.modes() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} unitary on {} modes",
                u.rows(),
                u.cols(),
                self.modes()
            )));
        }
        let defect = u.unitarity_defect();
        if defect > 1e-10 {
            return Err(Error::NonUnitary(defect));
        }
        let before = self.norm_sqr();
        let mesh = Mesh::decompose(u);
        self.apply_phases(&mesh.phases)?;
        let max_n = self.basis.cap().unwrap_or(2 * self.cutoff());
        let lf = ln_factorials(max_n + 1);
        for gv in mesh.rotations.iter().rev() {
            self.apply_two_mode(gv.first, &gv.g, &lf);
        }
        self.leakage += (before - self.norm_sqr()).max(0.0);
        Ok(())
    }

    fn ladder(&self, mode: usize, raise: bool) -> Result<FockArray> {
        self.check_mode(mode)?;
        let cutoff = self.cutoff();
        let op = if raise {
            ModeOperator::creation(cutoff)
        } else {
            ModeOperator::annihilation(cutoff)
        };
        let mut out = self.clone();
        out.apply_mode_matrix(mode, &op.matrix)?;
        let norm = out.norm_sqr();
        if norm.sqrt() <= NULL_NORM {
            return Err(Error::NullState);
        }
        if raise {
            // weight pushed past the top level, relative to the kept part
            let lost: f64 = (0..self.basis.dim())
                .filter(|&i| {
                    let n = self.basis.occupation(i)[mode] as usize;
                    self.basis.with_occupation(i, mode, n + 1).is_none()
                })
                .map(|i| (self.basis.occupation(i)[mode] as f64 + 1.0) * self.amps[i].norm_sqr())
                .sum();
            out.leakage += lost / norm;
        }
        out.normalize()?;
        Ok(out)
    }

    /// `a|psi>` renormalized.
    pub fn subtract_photon(&self, mode: usize) -> Result<FockArray> {
        self.ladder(mode, false)
    }

    /// `a^dagger|psi>` renormalized.
    pub fn add_photon(&self, mode: usize) -> Result<FockArray> {
        self.ladder(mode, true)
    }

    /// `<v_1 (x) ... (x) v_M | psi>` for single-mode vectors `v_j`.
    pub fn overlap_product(&self, vecs: &[Vec<Complex64>]) -> Result<Complex64> {
        if vecs.len() != self.modes() {
            return Err(Error::DimensionMismatch(format!(
                "{} vectors for {} modes",
                vecs.len(),
                self.modes()
            )));
        }
        let mut acc = ZERO;
        for (i, z) in self.amps.iter().enumerate() {
            let mut w = *z;
            for (&n, v) in self.basis.occupation(i).iter().zip(vecs) {
                match v.get(n as usize) {
                    Some(c) => w *= c.conj(),
                    None => {
                        w = ZERO;
                        break;
                    }
                }
            }
            acc += w;
        }
        Ok(acc)
    }

    /// Unnormalized `(<v| (x) I) |psi>` on the remaining modes.
    pub fn project_mode(&self, mode: usize, v: &[Complex64]) -> Result<FockArray> {
        self.check_mode(mode)?;
        let rest = Arc::new(self.basis.with_modes(self.modes() - 1)?);
        self.project_mode_onto(mode, v, rest)
    }

    /// As [`FockArray::project_mode`] with a caller-supplied basis for the remaining modes.
    pub fn project_mode_onto(
        &self,
        mode: usize,
        v: &[Complex64],
        rest: Arc<FockBasis>,
    ) -> Result<FockArray> {
        self.check_mode(mode)?;
        let b = &self.basis;
        if rest.modes() + 1 != b.modes() || rest.cutoff() != b.cutoff() || rest.cap() != b.cap() {
            return Err(Error::DimensionMismatch(
                "projection basis does not match".into(),
            ));
        }
        let mut out = vec![ZERO; rest.dim()];
        if b.is_dense() && mode == 0 {
            // leading mode: contiguous blocks of the remaining modes
            let block = rest.dim();
            for (n, c) in v.iter().take(b.cutoff() + 1).enumerate() {
                let c = c.conj();
                for (o, z) in out.iter_mut().zip(&self.amps[n * block..(n + 1) * block]) {
                    *o += c * z;
                }
            }
        } else {
            let mut occ = Vec::with_capacity(rest.modes());
            for (i, z) in self.amps.iter().enumerate() {
                let full = b.occupation(i);
                let Some(c) = v.get(full[mode] as usize) else {
                    continue;
                };
                occ.clear();
                occ.extend(
                    full.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != mode)
                        .map(|(_, &n)| n),
                );
                let k = rest
                    .index_of(&occ)
                    .expect("sub-occupation lies in the basis");
                out[k] += c.conj() * z;
            }
        }
        Ok(FockArray {
            basis: rest,
            amps: out,
            leakage: self.leakage,
        })
    }

    /// Reduced density matrix of `keep` (in the given order) on the matching sub-basis.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<(FockBasis, ComplexMatrix)> {
        for (a, &k) in keep.iter().enumerate() {
            self.check_mode(k)?;
            if keep[..a].contains(&k) {
                return Err(Error::InvalidParameter(format!("mode {k} listed twice")));
            }
        }
        let sub = self.basis.with_modes(keep.len())?;
        let traced: Vec<usize> = (0..self.modes()).filter(|k| !keep.contains(k)).collect();
        let base = self.cutoff() as u64 + 1;
        let mut groups: HashMap<u64, Vec<(usize, Complex64)>> = HashMap::new();
        let mut occ = Vec::with_capacity(keep.len());
        for (i, &z) in self.amps.iter().enumerate() {
            if z == ZERO {
                continue;
            }
            let full = self.basis.occupation(i);
            occ.clear();
            occ.extend(keep.iter().map(|&k| full[k]));
            let s = sub
                .index_of(&occ)
                .expect("sub-occupation lies in the basis");
            let key = traced
                .iter()
                .fold(0u64, |acc, &k| acc * base + full[k] as u64);
            groups.entry(key).or_default().push((s, z));
        }
        let d = sub.dim();
        let mut rho = ComplexMatrix::zeros(d, d);
        for entries in groups.values() {
            for &(a, za) in entries {
                for &(b, zb) in entries {
                    rho[(a, b)] += za * zb.conj();
                }
            }
        }
        Ok((sub, rho))
    }
}
