use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bins::BinIndex;
use super::density::hermitian_form;
use super::quadrature::gauss_legendre;
use crate::error::{Error, Result};
use crate::fockoracle::{
    cvs_state, displaced_squeezed_amplitudes, outcome_displacement, FockArray, FockBasis,
    InputRoute, NULL_NORM,
};
use crate::gausscore::{born_constant, CircuitSpec};
use crate::random::seeded_rng;
use crate::Complex64;

/// Smallest grid mass accepted for the first sampled mode.
pub const MIN_COVERAGE: f64 = 1.0 - 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Bin width used to report outcomes.
    pub eta: f64,
    /// Grid nodes per axis (cells = points - 1).
    pub points: usize,
    /// Cells per block side in the two-level inversion.
    pub block: usize,
    /// Half-width of the grid; `None` uses `4 + 2|ln s| + 2|ln r|`.
    pub bound: Option<f64>,
    /// Independent chains; samples are split evenly, chain-major.
    pub chains: usize,
    /// Redraws allowed per mode when the conditional state vanishes.
    pub max_retries: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            eta: 0.1,
            points: 201,
            block: 10,
            bound: None,
            chains: 1,
            max_retries: 16,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bin width {} must be positive",
                self.eta
            )));
        }
        if self.points < 3 || self.block == 0 || !(self.points - 1).is_multiple_of(self.block) {
            return Err(Error::InvalidParameter(format!(
                "{} grid points do not split into blocks of {} cells",
                self.points, self.block
            )));
        }
        if self.chains == 0 {
            return Err(Error::InvalidParameter(
                "at least one chain is required".into(),
            ));
        }
        if let Some(b) = self.bound {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "grid bound {b} must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Default grid half-width for squeezing `s` and projector squeezing `r`.
pub fn default_bound(s: f64, r: f64) -> f64 {
    4.0 + 2.0 * s.ln().abs() + 2.0 * r.ln().abs()
}

/// One sampled outcome of all modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub chain: u64,
    pub index: u64,
    pub bins: BinIndex,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

/// Square grid over one mode's `(q, p)` plane with projector vectors tabulated
/// at block quadrature nodes and cell midpoints.
#[derive(Clone, Debug)]
pub struct DensityGrid {
    bound: f64,
    cells: usize,
    block: usize,
    h: f64,
    dim: usize,
    /// Per block: 4 nodes of a 2x2 Gauss-Legendre rule, `dim` amplitudes each.
    block_psi: Vec<Complex64>,
    block_w: [f64; 4],
    /// Per cell (row-major in q, then p): amplitudes at the midpoint.
    cell_psi: Vec<Complex64>,
}

impl DensityGrid {
    pub fn new(bound: f64, points: usize, block: usize, r: f64, cutoff: usize) -> Self {
        let cells = points - 1;
        let h = 2.0 * bound / cells as f64;
        let dim = cutoff + 1;
        let nb = cells / block;
        let side = h * block as f64;
        let (x, w) = gauss_legendre(2);
        let psi = |q: f64, p: f64| {
            displaced_squeezed_amplitudes(outcome_displacement(q, p, r), r, cutoff)
        };
        let mut block_psi = Vec::with_capacity(nb * nb * 4 * dim);
        for bi in 0..nb {
            for bj in 0..nb {
                let (q0, p0) = (-bound + bi as f64 * side, -bound + bj as f64 * side);
                for xa in &x {
                    for xb in &x {
                        block_psi.extend(psi(
                            q0 + 0.5 * side * (1.0 + xa),
                            p0 + 0.5 * side * (1.0 + xb),
                        ));
                    }
                }
            }
        }
        let area = side * side / 4.0;
        let block_w = [
            w[0] * w[0] * area,
            w[0] * w[1] * area,
            w[1] * w[0] * area,
            w[1] * w[1] * area,
        ];
        let mut cell_psi = Vec::with_capacity(cells * cells * dim);
        for i in 0..cells {
            for j in 0..cells {
                cell_psi.extend(psi(
                    -bound + (i as f64 + 0.5) * h,
                    -bound + (j as f64 + 0.5) * h,
                ));
            }
        }
        DensityGrid {
            bound,
            cells,
            block,
            h,
            dim,
            block_psi,
            block_w,
            cell_psi,
        }
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    fn blocks_per_axis(&self) -> usize {
        self.cells / self.block
    }

    fn block_masses(&self, rho: &[Complex64]) -> Vec<f64> {
        self.block_psi
            .chunks(4 * self.dim)
            .map(|pts| {
                pts.chunks(self.dim)
                    .zip(&self.block_w)
                    .map(|(v, w)| w * hermitian_form(rho, v).max(0.0))
                    .sum()
            })
            .collect()
    }

    fn cell_masses(&self, rho: &[Complex64], block: usize) -> Vec<f64> {
        let nb = self.blocks_per_axis();
        let (bi, bj) = (block / nb, block % nb);
        let mut out = Vec::with_capacity(self.block * self.block);
        for i in 0..self.block {
            for j in 0..self.block {
                let cell = (bi * self.block + i) * self.cells + bj * self.block + j;
                let v = &self.cell_psi[cell * self.dim..(cell + 1) * self.dim];
                out.push(hermitian_form(rho, v).max(0.0));
            }
        }
        out
    }

    fn cell_corner(&self, block: usize, local: usize) -> (f64, f64) {
        let nb = self.blocks_per_axis();
        let i = (block / nb) * self.block + local / self.block;
        let j = (block % nb) * self.block + local % self.block;
        (
            -self.bound + i as f64 * self.h,
            -self.bound + j as f64 * self.h,
        )
    }
}

fn pick<R: Rng>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// Reduced density matrix of the leading mode of a dense state.
fn leading_density(state: &FockArray) -> Vec<Complex64> {
    let d = state.cutoff() + 1;
    let rest = state.amplitudes().len() / d;
    let a = state.amplitudes();
    let mut rho = vec![Complex64::new(0.0, 0.0); d * d];
    for n in 0..d {
        for m in n..d {
            let v: Complex64 = a[n * rest..(n + 1) * rest]
                .iter()
                .zip(&a[m * rest..(m + 1) * rest])
                .map(|(x, y)| x * y.conj())
                .sum();
            rho[n * d + m] = v;
            rho[m * d + n] = v.conj();
        }
    }
    rho
}

struct ModeTable {
    rho: Vec<Complex64>,
    blocks: Vec<f64>,
    total: f64,
}

impl ModeTable {
    fn new(grid: &DensityGrid, state: &FockArray) -> Self {
        let rho = leading_density(state);
        let blocks = grid.block_masses(&rho);
        let total = blocks.iter().sum();
        ModeTable { rho, blocks, total }
    }
}

/// Mode-by-mode chain-rule sampler of eight-port outcomes.
pub struct ChainSampler {
    config: SamplerConfig,
    r: f64,
    grid: DensityGrid,
    state: FockArray,
    /// `bases[k]` is the basis on `k` modes.
    bases: Vec<Arc<FockBasis>>,
    first: ModeTable,
    first_cells: Vec<Vec<f64>>,
}

impl ChainSampler {
    /// `state` must live on a dense per-mode basis; `bound` is the grid half-width.
    pub fn new(state: FockArray, r: f64, bound: f64, config: SamplerConfig) -> Result<Self> {
        config.validate()?;
        if !state.basis().is_dense() || state.modes() == 0 {
            return Err(Error::InvalidParameter(
                "sampling needs a dense basis with at least one mode".into(),
            ));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "projector squeezing {r} must be positive"
            )));
        }
        let mut state = state;
        state.normalize()?;
        let grid = DensityGrid::new(bound, config.points, config.block, r, state.cutoff());
        let first = ModeTable::new(&grid, &state);
        let mass = first.total * born_constant(r, 1);
        if mass < MIN_COVERAGE {
            return Err(Error::GridTooCoarse(format!(
                "grid of half-width {bound} holds mass {mass:.6}"
            )));
        }
        let first_cells = (0..first.blocks.len())
            .map(|b| grid.cell_masses(&first.rho, b))
            .collect();
        let bases = (0..state.modes())
            .map(|k| state.basis().with_modes(k).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChainSampler {
            config,
            r,
            grid,
            state,
            bases,
            first,
            first_cells,
        })
    }

    /// Sampler for the forward circuit at the given cutoff, with the default grid bound.
    pub fn for_circuit(
        circuit: &CircuitSpec,
        cutoff: usize,
        config: SamplerConfig,
    ) -> Result<Self> {
        let basis = Arc::new(FockBasis::per_mode(circuit.modes(), cutoff)?);
        let state = cvs_state(circuit, basis, InputRoute::Direct)?;
        let bound = config
            .bound
            .unwrap_or_else(|| default_bound(circuit.s, circuit.r));
        ChainSampler::new(state, circuit.r, bound, config)
    }

    pub fn grid(&self) -> &DensityGrid {
        &self.grid
    }

    pub fn leakage(&self) -> f64 {
        self.state.leakage()
    }

    fn draw_point<R: Rng>(
        &self,
        table: &ModeTable,
        cached: Option<&[Vec<f64>]>,
        rng: &mut R,
    ) -> (f64, f64) {
        let b = pick(&table.blocks, table.total, rng);
        let fresh;
        let cells: &[f64] = match cached {
            Some(all) => &all[b],
            None => {
                fresh = self.grid.cell_masses(&table.rho, b);
                &fresh
            }
        };
        let c = pick(cells, cells.iter().sum(), rng);
        let (q0, p0) = self.grid.cell_corner(b, c);
        let h = self.grid.spacing();
        (q0 + rng.random::<f64>() * h, p0 + rng.random::<f64>() * h)
    }

    fn one_sample<R: Rng>(&self, rng: &mut R) -> Result<Vec<(f64, f64)>> {
        let modes = self.state.modes();
        let cutoff = self.state.cutoff();
        let mut out = Vec::with_capacity(modes);
        let mut current: Option<FockArray> = None;
        for k in 0..modes {
            let remaining = modes - k;
            let (src, fresh) = match &current {
                None => (&self.state, None),
                Some(st) => (st, Some(ModeTable::new(&self.grid, st))),
            };
            let (table, cached) = match &fresh {
                None => (&self.first, Some(self.first_cells.as_slice())),
                Some(t) => (t, None),
            };
            if !(table.total > 0.0) {
                return Err(Error::NullConditional);
            }
            let mut accepted = None;
            for _ in 0..=self.config.max_retries {
                let pt = self.draw_point(table, cached, rng);
                if remaining == 1 {
                    accepted = Some((pt, None));
                    break;
                }
                let v = displaced_squeezed_amplitudes(
                    outcome_displacement(pt.0, pt.1, self.r),
                    self.r,
                    cutoff,
                );
                let mut next =
                    src.project_mode_onto(0, &v, Arc::clone(&self.bases[remaining - 1]))?;
                if next.norm_sqr().sqrt() <= NULL_NORM {
                    log::debug!("null conditional at ({}, {}); redrawing", pt.0, pt.1);
                    continue;
                }
                next.normalize()?;
                accepted = Some((pt, Some(next)));
                break;
            }
            let (pt, next) = accepted.ok_or(Error::NullConditional)?;
            out.push(pt);
            current = next;
        }
        Ok(out)
    }

    /// Samples of one chain; the stream depends only on `(seed, chain)`.
    pub fn sample_chain(&self, seed: u64, chain: u64, count: usize) -> Result<Vec<SampleRecord>> {
        let mut rng = seeded_rng(seed, chain);
        (0..count)
            .map(|i| {
                let pts = self.one_sample(&mut rng)?;
                Ok(SampleRecord {
                    chain,
                    index: i as u64,
                    bins: BinIndex::from_point(&pts, self.config.eta),
                    q: pts.iter().map(|x| x.0).collect(),
                    p: pts.iter().map(|x| x.1).collect(),
                })
            })
            .collect()
    }

    /// `count` samples split over the configured chains, chain-major.
    pub fn sample(&self, seed: u64, count: usize) -> Result<Vec<SampleRecord>> {
        let chains = self.config.chains;
        let per: Vec<usize> = (0..chains)
            .map(|c| count / chains + usize::from(c < count % chains))
            .collect();
        let parts = per
            .par_iter()
            .enumerate()
            .map(|(c, &n)| self.sample_chain(seed, c as u64, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(parts.into_iter().flatten().collect())
    }
}
