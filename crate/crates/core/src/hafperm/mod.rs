//! Hafnians, permanents and detection-pattern submatrices.

mod hafnian;
mod permanent;
mod sum;

use std::ops::Neg;

use num_complex::Complex64;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::densela::Matrix;
use crate::error::{Error, Result};
use crate::RealMatrix;

pub use hafnian::{haf_enum, haf_fast, haf_fast_with, HAF_ENUM_LIMIT, HAF_FAST_LIMIT};
pub use permanent::{perm_ryser, perm_ryser_with, PERM_LIMIT};
pub use sum::{Compensated, Parallelism};

/// Commutative ring element usable by the hafnian and permanent routines.
pub trait Ring: Copy + Num + Neg<Output = Self> + Send + Sync {}

impl<T: Copy + Num + Neg<Output = T> + Send + Sync> Ring for T {}

/// Binary click pattern over M modes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct DetectionPattern(Vec<bool>);

impl DetectionPattern {
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(Error::InvalidParameter(format!(
                    "pattern entry {b} is not 0 or 1"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(DetectionPattern)
    }

    /// `m` ones followed by `modes - m` zeros.
    pub fn leading(modes: usize, m: usize) -> Self {
        DetectionPattern((0..modes).map(|j| j < m).collect())
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_set(&self, j: usize) -> bool {
        self.0[j]
    }

    /// Indices of modes with a click.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&j| self.0[j]).collect()
    }

    pub fn bits(&self) -> Vec<u8> {
        self.0.iter().map(|&b| b as u8).collect()
    }
}

impl TryFrom<Vec<u8>> for DetectionPattern {
    type Error = Error;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        DetectionPattern::from_bits(&v)
    }
}

impl From<DetectionPattern> for Vec<u8> {
    fn from(p: DetectionPattern) -> Vec<u8> {
        p.bits()
    }
}

/// Rows and columns `j` and `M + j` of a 2M x 2M matrix for every clicked mode
/// `j`, keeping the first-half indices before the second-half ones.
pub fn select_submatrix<T: Copy>(a: &Matrix<T>, pattern: &DetectionPattern) -> Result<Matrix<T>> {
    let modes = pattern.modes();
    if a.rows() != 2 * modes || a.cols() != 2 * modes {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for a {modes}-mode pattern",
            a.rows(),
            a.cols()
        )));
    }
    let support = pattern.support();
    let idx: Vec<usize> = support
        .iter()
        .copied()
        .chain(support.iter().map(|j| j + modes))
        .collect();
    Ok(a.select(&idx, &idx))
}

/// Result of comparing `Haf([[0, X], [X^T, 0]])` with `Perm(X)`.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub haf: Complex64,
    pub perm: Complex64,
    pub rel_err: f64,
    pub ok: bool,
}

/// Relative tolerance used by [`haf_perm_identity_check`].
pub const IDENTITY_TOL: f64 = 1e-9;

/// Evaluates both sides of the bipartite hafnian/permanent identity.
pub fn haf_perm_identity_check(x: &RealMatrix) -> Result<IdentityCheck> {
    let p = x.ensure_square()?;
    let xc = x.to_complex();
    let zero = Matrix::zeros(p, p);
    let bip = Matrix::from_blocks(&zero, &xc, &xc.transpose(), &zero)?;
    let haf = haf_fast(&bip)?;
    let perm = perm_ryser(&xc)?;
    let rel_err = relative_error(haf, perm);
    Ok(IdentityCheck {
        haf,
        perm,
        rel_err,
        ok: rel_err <= IDENTITY_TOL,
    })
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_error(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}
