use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::quadrature::composite_rule;
use crate::error::{Error, Result};
use crate::fockoracle::{
    cvs_state, displaced_squeezed_amplitudes, outcome_displacement, FockArray, FockBasis,
    InputRoute,
};
use crate::gausscore::{born_constant, CircuitSpec};
use crate::{Complex64, ComplexMatrix};

/// Gauss-Legendre points per panel used for box integrals.
pub const QUAD_ORDER: usize = 8;
/// Widest quadrature panel in quadrature units.
pub const MAX_PANEL: f64 = 0.5;

/// Integer box indices `(b_1^q..b_M^q, b_1^p..b_M^p)`; box `b` covers `[(b - 1/2) eta, (b + 1/2) eta]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinIndex {
    pub q: Vec<i64>,
    pub p: Vec<i64>,
}

pub type Interval = (f64, f64);

/// Box of one mode: `(q interval, p interval)`.
pub type ModeBox = (Interval, Interval);

pub fn bin_of(x: f64, eta: f64) -> i64 {
    (x / eta + 0.5).floor() as i64
}

pub fn bin_interval(b: i64, eta: f64) -> Interval {
    ((b as f64 - 0.5) * eta, (b as f64 + 0.5) * eta)
}

impl BinIndex {
    pub fn new(q: Vec<i64>, p: Vec<i64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} q bins and {} p bins",
                q.len(),
                p.len()
            )));
        }
        Ok(BinIndex { q, p })
    }

    pub fn origin(modes: usize) -> Self {
        BinIndex {
            q: vec![0; modes],
            p: vec![0; modes],
        }
    }

    pub fn from_point(point: &[(f64, f64)], eta: f64) -> Self {
        BinIndex {
            q: point.iter().map(|&(q, _)| bin_of(q, eta)).collect(),
            p: point.iter().map(|&(_, p)| bin_of(p, eta)).collect(),
        }
    }

    pub fn modes(&self) -> usize {
        self.q.len()
    }

    pub fn boxes(&self, eta: f64) -> Vec<ModeBox> {
        self.q
            .iter()
            .zip(&self.p)
            .map(|(&bq, &bp)| (bin_interval(bq, eta), bin_interval(bp, eta)))
            .collect()
    }

    /// `[-b, +b]` parity image.
    pub fn negated(&self) -> Self {
        BinIndex {
            q: self.q.iter().map(|b| -b).collect(),
            p: self.p.iter().map(|b| -b).collect(),
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bin width {eta} must be positive"
        )));
    }
    Ok(())
}

/// `K = int_box N(r) |alpha, r><alpha, r| dq dp` on the truncated single-mode space.
pub fn box_povm(r: f64, cutoff: usize, (q, p): ModeBox) -> Result<ComplexMatrix> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "projector squeezing {r} must be positive"
        )));
    }
    if !(q.1 > q.0 && p.1 > p.0) {
        return Err(Error::InvalidParameter("empty integration box".into()));
    }
    let nr = born_constant(r, 1);
    let d = cutoff + 1;
    let mut k = ComplexMatrix::zeros(d, d);
    let rq = composite_rule(q.0, q.1, QUAD_ORDER, MAX_PANEL);
    let rp = composite_rule(p.0, p.1, QUAD_ORDER, MAX_PANEL);
    for &(x, wx) in &rq {
        for &(y, wy) in &rp {
            let v = displaced_squeezed_amplitudes(outcome_displacement(x, y, r), r, cutoff);
            let w = wx * wy * nr;
            for a in 0..d {
                let va = v[a] * w;
                for b in 0..d {
                    k[(a, b)] += va * v[b].conj();
                }
            }
        }
    }
    Ok(k)
}

/// `<psi| K_1 (x) ... (x) K_M |psi>` with `None` marking a marginalized mode.
pub fn state_box_prob(state: &FockArray, r: f64, boxes: &[Option<ModeBox>]) -> Result<f64> {
    if boxes.len() != state.modes() {
        return Err(Error::DimensionMismatch(format!(
            "{} boxes for {} modes",
            boxes.len(),
            state.modes()
        )));
    }
    let mut phi = state.clone();
    for (j, bx) in boxes.iter().enumerate() {
        if let Some(bx) = bx {
            phi.apply_mode_matrix(j, &box_povm(r, state.cutoff(), *bx)?)?;
        }
    }
    let v: Complex64 = state
        .amplitudes()
        .iter()
        .zip(phi.amplitudes())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(v.re.max(0.0))
}

/// Probability of the bin `b` for the forward circuit, integrated from the oracle density.
pub fn bin_prob(circuit: &CircuitSpec, b: &BinIndex, eta: f64, cutoff: usize) -> Result<f64> {
    check_eta(eta)?;
    if b.modes() != circuit.modes() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode bin for {} modes",
            b.modes(),
            circuit.modes()
        )));
    }
    let basis = Arc::new(FockBasis::per_mode(circuit.modes(), cutoff)?);
    let state = cvs_state(circuit, basis, InputRoute::Direct)?;
    let boxes: Vec<Option<ModeBox>> = b.boxes(eta).into_iter().map(Some).collect();
    state_box_prob(&state, circuit.r, &boxes)
}

/// Bin probabilities of the modes `keep`, with `per_axis` (odd) bins centred on zero.
///
/// Entries are ordered `(q_{k1}, p_{k1}, q_{k2}, p_{k2}, ...)` with the last axis fastest,
/// bin `i` on an axis being index `i - (per_axis - 1)/2`.
pub fn marginal_bin_table(
    state: &FockArray,
    r: f64,
    keep: &[usize],
    eta: f64,
    per_axis: usize,
) -> Result<Vec<f64>> {
    check_eta(eta)?;
    if per_axis.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "{per_axis} bins per axis; expected an odd count"
        )));
    }
    let (sub, rho) = state.reduced_density(keep)?;
    let half = (per_axis / 2) as i64;
    let mut povms = Vec::with_capacity(per_axis * per_axis);
    for bq in -half..=half {
        for bp in -half..=half {
            povms.push(box_povm(
                r,
                state.cutoff(),
                (bin_interval(bq, eta), bin_interval(bp, eta)),
            )?);
        }
    }
    let m = keep.len();
    let cells = povms.len().pow(m as u32);
    let d = sub.dim();
    let mut out = Vec::with_capacity(cells);
    let mut choice = vec![0usize; m];
    for cell in 0..cells {
        let mut rem = cell;
        for j in (0..m).rev() {
            choice[j] = rem % povms.len();
            rem /= povms.len();
        }
        let mut tr = Complex64::new(0.0, 0.0);
        for a in 0..d {
            let oa = sub.occupation(a);
            for b in 0..d {
                let ob = sub.occupation(b);
                let mut k = Complex64::new(1.0, 0.0);
                for j in 0..m {
                    k *= povms[choice[j]][(ob[j] as usize, oa[j] as usize)];
                }
                tr += rho[(a, b)] * k;
            }
        }
        out.push(tr.re.max(0.0));
    }
    Ok(out)
}

/// Flat index into a [`marginal_bin_table`], or `None` outside the table.
pub fn table_index(point: &[(f64, f64)], eta: f64, per_axis: usize) -> Option<usize> {
    let half = (per_axis / 2) as i64;
    let mut idx = 0usize;
    for &(q, p) in point {
        for x in [q, p] {
            let b = bin_of(x, eta);
            if b.abs() > half {
                return None;
            }
            idx = idx * per_axis + (b + half) as usize;
        }
    }
    Some(idx)
}

/// `sum |p - q| / 2`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vacuum(modes: usize, cutoff: usize) -> FockArray {
        FockArray::vacuum(Arc::new(FockBasis::per_mode(modes, cutoff).unwrap()))
    }

    #[test]
    fn vacuum_mass_and_symmetry() {
        let v = vacuum(1, 12);
        let big = ((-10.0, 10.0), (-10.0, 10.0));
        assert!((state_box_prob(&v, 1.3, &[Some(big)]).unwrap() - 1.0).abs() < 1e-4);
        let v2 = vacuum(2, 10);
        let b = BinIndex::new(vec![1, -2], vec![0, 1]).unwrap();
        let eta = 0.7;
        let p1 = state_box_prob(
            &v2,
            0.8,
            &b.boxes(eta).into_iter().map(Some).collect::<Vec<_>>(),
        )
        .unwrap();
        let p2 = state_box_prob(
            &v2,
            0.8,
            &b.negated()
                .boxes(eta)
                .into_iter()
                .map(Some)
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!((p1 - p2).abs() < 1e-10);
        // vacuum density is exp(-q^2 - p^2)/pi for every r
        let erf_box = |a: f64, b: f64| {
            let rule = composite_rule(a, b, 16, 0.1);
            rule.iter().map(|(x, w)| w * (-x * x).exp()).sum::<f64>() / std::f64::consts::PI.sqrt()
        };
        let expected: f64 = b
            .boxes(eta)
            .iter()
            .map(|(q, p)| erf_box(q.0, q.1) * erf_box(p.0, p.1))
            .product();
        assert!((p1 - expected).abs() < 1e-12);
    }

    #[test]
    fn table_sums_to_one() {
        let v = vacuum(1, 12);
        let t = marginal_bin_table(&v, 1.2, &[0], 1.0, 11).unwrap();
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-3);
        assert_eq!(table_index(&[(0.0, 0.0)], 1.0, 11), Some(60));
        assert_eq!(table_index(&[(6.0, 0.0)], 1.0, 11), None);
        assert_eq!(bin_of(0.49, 1.0), 0);
        assert_eq!(bin_of(-0.51, 1.0), -1);
    }
}
