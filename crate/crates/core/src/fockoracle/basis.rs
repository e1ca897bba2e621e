use std::collections::HashMap;

use crate::error::{Error, Result};

/// Largest per-mode cutoff (occupations are stored as `u8`).
pub const MAX_CUTOFF: usize = 200;

/// Truncated multimode Fock basis.
///
/// States are ordered lexicographically with the last mode fastest. With a
/// per-mode cutoff only, the basis is the full `(cutoff+1)^M` tensor; an
/// optional cap on the total photon number keeps only states with
/// `sum n_j <= cap`.
#[derive(Clone, Debug)]
pub struct FockBasis {
    modes: usize,
    cutoff: usize,
    cap: Option<usize>,
    /// `dim * modes` occupations.
    occupations: Vec<u8>,
    /// Packed dense index -> position, present only for capped bases.
    index: Option<HashMap<u64, usize>>,
    strides: Vec<u64>,
}

impl FockBasis {
    /// Full tensor-product basis with `n_j <= cutoff`.
    pub fn per_mode(modes: usize, cutoff: usize) -> Result<Self> {
        Self::build(modes, cutoff, None)
    }

    /// Basis with `n_j <= cap` and `sum n_j <= cap`.
    pub fn total_photons(modes: usize, cap: usize) -> Result<Self> {
        Self::build(modes, cap, Some(cap))
    }

    fn build(modes: usize, cutoff: usize, cap: Option<usize>) -> Result<Self> {
        if cutoff > MAX_CUTOFF {
            return Err(Error::InvalidParameter(format!(
                "cutoff {cutoff} above {MAX_CUTOFF}"
            )));
        }
        let base = cutoff as u64 + 1;
        let mut strides = vec![1u64; modes];
        for j in (0..modes.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1]
                .checked_mul(base)
                .ok_or_else(|| Error::InvalidParameter("basis too large".into()))?;
        }
        let full = strides.first().map_or(Some(1), |s| s.checked_mul(base));
        if cap.is_none() && full.is_none_or(|f| f > 50_000_000) {
            return Err(Error::InvalidParameter("dense basis too large".into()));
        }
        let mut occupations = Vec::new();
        let mut occ = vec![0u8; modes];
        loop {
            let total: usize = occ.iter().map(|&n| n as usize).sum();
            if cap.is_none_or(|c| total <= c) {
                occupations.extend_from_slice(&occ);
            }
            // odometer increment, last mode fastest
            let mut j = modes;
            loop {
                if j == 0 {
                    break;
                }
                j -= 1;
                if (occ[j] as usize) < cutoff {
                    occ[j] += 1;
                    let running: usize = occ[..=j].iter().map(|&n| n as usize).sum();
                    if cap.is_some_and(|c| running > c) {
                        occ[j] = 0;
                        continue;
                    }
                    for o in occ.iter_mut().skip(j + 1) {
                        *o = 0;
                    }
                    break;
                }
                occ[j] = 0;
            }
            if occ.iter().all(|&n| n == 0) {
                break;
            }
        }
        let mut basis = FockBasis {
            modes,
            cutoff,
            cap,
            occupations,
            index: None,
            strides,
        };
        if cap.is_some() {
            let map = (0..basis.dim())
                .map(|i| (basis.packed(basis.occupation(i)), i))
                .collect();
            basis.index = Some(map);
        }
        Ok(basis)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    pub fn is_dense(&self) -> bool {
        self.cap.is_none()
    }

    pub fn dim(&self) -> usize {
        self.occupations.len().checked_div(self.modes).unwrap_or(1)
    }

    pub fn occupation(&self, i: usize) -> &[u8] {
        &self.occupations[i * self.modes..(i + 1) * self.modes]
    }

    fn packed(&self, occ: &[u8]) -> u64 {
        occ.iter()
            .zip(&self.strides)
            .map(|(&n, &s)| n as u64 * s)
            .sum()
    }

    /// Position of an occupation vector, if it lies in the basis.
    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        if occ.len() != self.modes || occ.iter().any(|&n| n as usize > self.cutoff) {
            return None;
        }
        let key = self.packed(occ);
        match &self.index {
            None => Some(key as usize),
            Some(map) => map.get(&key).copied(),
        }
    }

    /// Index of state `i` with mode `mode` set to `n`.
    #[inline]
    pub fn with_occupation(&self, i: usize, mode: usize, n: usize) -> Option<usize> {
        if n > self.cutoff {
            return None;
        }
        let cur = self.occupation(i)[mode] as i64;
        let stride = self.strides[mode] as i64;
        match &self.index {
            None => Some((i as i64 + (n as i64 - cur) * stride) as usize),
            Some(map) => {
                let occ = self.occupation(i);
                let key = (self.packed(occ) as i64 + (n as i64 - cur) * stride) as u64;
                map.get(&key).copied()
            }
        }
    }

    /// Same truncation on a different number of modes.
    pub fn with_modes(&self, modes: usize) -> Result<Self> {
        Self::build(modes, self.cutoff, self.cap)
    }
}
