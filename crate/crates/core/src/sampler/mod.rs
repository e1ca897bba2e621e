//! Binned outcome probabilities, a chain-rule sampler and the Taylor-expansion check.

mod bins;
mod chain;
mod density;
mod quadrature;
mod taylor;

pub use bins::{
    bin_interval, bin_of, bin_prob, box_povm, marginal_bin_table, state_box_prob, table_index,
    total_variation, BinIndex, Interval, ModeBox, MAX_PANEL, QUAD_ORDER,
};
pub use chain::{
    default_bound, ChainSampler, DensityGrid, SampleRecord, SamplerConfig, MIN_COVERAGE,
};
pub use density::MarginalDensity;
pub use quadrature::{composite_rule, gauss_legendre};
pub use taylor::{
    taylor_check, taylor_check_circuit, taylor_halving_ratio, TaylorReport, MAX_TAYLOR_ETA,
};
