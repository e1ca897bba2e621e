use std::collections::BTreeMap;
use std::sync::Arc;

use cvs_core::embed::{embed_sigma, kak_decompose};
use cvs_core::fockoracle::{oracle_origin_density, trcvs_state, FockBasis};
use cvs_core::gausscore::{
    born_constant, k_opt, kappa, pr_cvs_origin, pr_trcvs_pattern, CircuitSpec, InterferometerSpec,
};
use cvs_core::io::{write_csv_row, write_samples_csv, MatrixFile};
use cvs_core::sampler::ChainSampler;
use cvs_core::RealMatrix;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{positive, Loaded};
use crate::error::CliError;
use crate::output::OutputDir;

/// Oracle Hilbert spaces above this dimension use a total-photon cap instead of a per-mode cutoff.
const MAX_DENSE_DIM: usize = 4_000_000;

fn oracle_basis(modes: usize, cutoff: usize) -> Result<Arc<FockBasis>, CliError> {
    let dense = (cutoff as f64).powi(modes as i32);
    let basis = if dense <= MAX_DENSE_DIM as f64 {
        FockBasis::per_mode(modes, cutoff)?
    } else {
        log::info!("{modes} modes at cutoff {cutoff}: using a total-photon cap");
        FockBasis::total_photons(modes, cutoff)?
    };
    Ok(Arc::new(basis))
}

#[derive(Serialize)]
struct EmbedBlocks {
    nu: f64,
    m: usize,
    r: usize,
    y: MatrixFile,
    z: MatrixFile,
    b: MatrixFile,
    c: MatrixFile,
    d: MatrixFile,
}

pub fn embed(run: &Loaded, out: &mut OutputDir) -> Result<(), CliError> {
    let cfg = run
        .config
        .embed
        .as_ref()
        .ok_or_else(|| CliError::Validation("missing embed section".into()))?;
    positive("nu", cfg.nu)?;
    let x = cfg.x.load_real(&run.base)?;
    let e = embed_sigma(&x, cfg.nu, cfg.modes)?;
    let path = out.write_json("sigma.json", &MatrixFile::from(&e.sigma))?;

    // reload what was written and re-check the invariants
    let text = std::fs::read_to_string(&path)?;
    let back: MatrixFile =
        serde_json::from_str(&text).map_err(|err| CliError::Io(err.to_string()))?;
    let sigma = back.to_real()?;
    if sigma != e.sigma {
        return Err(CliError::Numeric("sigma.json does not round-trip".into()));
    }
    InterferometerSpec::new(RealMatrix::identity(cfg.modes), 0.0, sigma)?;

    let blocks = EmbedBlocks {
        nu: e.nu,
        m: e.m,
        r: e.r,
        y: MatrixFile::from(&e.y),
        z: MatrixFile::from(&e.z),
        b: MatrixFile::from(&e.b),
        c: MatrixFile::from(&e.c),
        d: MatrixFile::from(&e.d),
    };
    out.write_json("blocks.json", &blocks)?;
    Ok(())
}

/// Closed-form quantities for one circuit.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ProbReport {
    pub modes: usize,
    pub photons: usize,
    pub k: f64,
    pub l: f64,
    pub phi: f64,
    pub pr_trcvs: f64,
    pub pr_cvs_origin: f64,
    pub f: f64,
    pub det: f64,
    pub kappa: f64,
    pub perm_path: Option<f64>,
    pub haf_path: f64,
    pub born_constant: f64,
}

pub fn prob_report(c: &CircuitSpec) -> Result<ProbReport, CliError> {
    let origin = pr_cvs_origin(c)?;
    let (m, modes) = (c.photons, c.modes());
    Ok(ProbReport {
        modes,
        photons: m,
        k: c.k(),
        l: c.l(),
        phi: c.interferometer.phi(),
        pr_trcvs: pr_trcvs_pattern(c, &c.mode_flags)?,
        pr_cvs_origin: origin.value(),
        f: origin.f,
        det: origin.det,
        kappa: kappa(c.k(), c.l(), m, modes),
        perm_path: origin.perm_path,
        haf_path: origin.haf_path,
        born_constant: born_constant(c.r, modes),
    })
}

pub fn prob(run: &Loaded, out: &mut OutputDir) -> Result<(), CliError> {
    let report = prob_report(&run.circuit(0)?)?;
    out.write_json("prob.json", &report)?;
    Ok(())
}

#[derive(Serialize)]
struct OracleEntry {
    draw: u64,
    formula: f64,
    oracle: f64,
    rel_err: f64,
    leakage: f64,
    /// Absent when subtraction from unsqueezed vacuum leaves no state.
    origin_density: Option<f64>,
    origin_leakage: Option<f64>,
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct ConstantEstimate {
    mean: f64,
    std: f64,
    cv: f64,
    born_constant: f64,
}

#[derive(Serialize)]
struct OracleReport {
    cutoff: usize,
    basis_dim: usize,
    tolerance: f64,
    max_rel_err: f64,
    within_tolerance: bool,
    constant: Option<ConstantEstimate>,
    circuits: Vec<OracleEntry>,
}

/// Formula against the Fock-space oracle; exits numerically if the tolerance is missed.
pub fn oracle(run: &Loaded, out: &mut OutputDir) -> Result<f64, CliError> {
    let cfg = run.config.oracle.clone().unwrap_or_default();
    positive("tolerance", cfg.tolerance)?;
    let draws = if run.is_random() {
        cfg.circuits.max(1) as u64
    } else {
        1
    };
    let cutoff = run.cutoff()?;
    let modes = run.circuit_config()?.modes;
    let basis = oracle_basis(modes, cutoff)?;

    let mut entries = Vec::new();
    for draw in 0..draws {
        let c = run.circuit(draw)?;
        let formula = pr_trcvs_pattern(&c, &c.mode_flags)?;
        let state = trcvs_state(
            c.k(),
            c.l(),
            &c.interferometer.build_t(),
            Arc::clone(&basis),
        )?;
        let oracle = state.pattern_prob(&c.mode_flags)?;
        let origin = match oracle_origin_density(&c, Arc::clone(&basis)) {
            Ok(v) => Some(v),
            Err(cvs_core::Error::NullState) => None,
            Err(e) => return Err(e.into()),
        };
        let rel_err = (oracle - formula).abs() / formula.abs().max(1e-12);
        log::info!("draw {draw}: formula {formula:e}, oracle {oracle:e}, rel err {rel_err:e}");
        entries.push(OracleEntry {
            draw,
            formula,
            oracle,
            rel_err,
            leakage: state.leakage(),
            origin_density: origin.as_ref().map(|o| o.value),
            origin_leakage: origin.as_ref().map(|o| o.leakage),
            ratio: origin
                .filter(|_| formula > 1e-300)
                .map(|o| o.value / formula),
        });
    }
    let ratios: Vec<f64> = entries.iter().filter_map(|e| e.ratio).collect();
    let constant = (!ratios.is_empty()).then(|| {
        let n = ratios.len() as f64;
        let mean = ratios.iter().sum::<f64>() / n;
        let var = if ratios.len() > 1 {
            ratios.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        ConstantEstimate {
            mean,
            std: var.sqrt(),
            cv: var.sqrt() / mean.abs(),
            born_constant: born_constant(run.circuit_config().map(|c| c.r).unwrap_or(1.0), modes),
        }
    });
    let max_rel_err = entries.iter().map(|e| e.rel_err).fold(0.0, f64::max);
    let report = OracleReport {
        cutoff,
        basis_dim: basis.dim(),
        tolerance: cfg.tolerance,
        max_rel_err,
        within_tolerance: max_rel_err <= cfg.tolerance,
        constant,
        circuits: entries,
    };
    out.write_json("oracle.json", &report)?;
    Ok(max_rel_err)
}

pub fn sample(run: &Loaded, out: &mut OutputDir) -> Result<(), CliError> {
    let c = run.circuit(0)?;
    let cfg = run.sampler_config()?;
    let count = run.config.samples.unwrap_or(1000);
    let sampler = ChainSampler::for_circuit(&c, run.cutoff()?, cfg)?;
    log::info!(
        "drawing {count} samples, oracle leakage {:e}",
        sampler.leakage()
    );
    let records = sampler.sample(run.seed(), count)?;
    let mut buf = Vec::new();
    write_samples_csv(&mut buf, c.modes(), &records)?;
    out.write_bytes("samples.csv", &buf)?;
    Ok(())
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 * (1.0 + a.abs()) {
        if fc > fd {
            (b, d, fd) = (d, c, fc);
            c = b - g * (b - a);
            fc = f(c);
        } else {
            (a, c, fc) = (c, d, fd);
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// `kappa.csv` over the (k, l) grid and `argmax.csv` with the refined maximizer per l.
pub fn scan(run: &Loaded, out: &mut OutputDir) -> Result<(), CliError> {
    let cfg = run
        .config
        .scan
        .as_ref()
        .ok_or_else(|| CliError::Validation("missing scan section".into()))?;
    positive("k_min", cfg.k_min)?;
    positive("k_max", cfg.k_max)?;
    if cfg.k_max <= cfg.k_min || cfg.k_steps < 3 {
        return Err(CliError::Validation(
            "scan needs k_min < k_max and k_steps >= 3".into(),
        ));
    }
    if cfg.photons == 0 || cfg.photons > cfg.modes {
        return Err(CliError::Validation(format!(
            "scan needs 0 < photons <= modes, got {} and {}",
            cfg.photons, cfg.modes
        )));
    }
    for &l in &cfg.l_values {
        positive("l", l)?;
    }
    let (m, modes) = (cfg.photons, cfg.modes);
    let step = (cfg.k_max - cfg.k_min) / (cfg.k_steps - 1) as f64;
    let ks: Vec<f64> = (0..cfg.k_steps)
        .map(|i| cfg.k_min + step * i as f64)
        .collect();

    let mut grid = b"l,k,kappa\n".to_vec();
    let mut best = b"l,k_argmax,kappa_max,k_opt\n".to_vec();
    for &l in &cfg.l_values {
        let f = |k: f64| kappa(k, l, m, modes);
        let mut arg = ks[0];
        for &k in &ks {
            write_csv_row(&mut grid, &[l, k, f(k)])?;
            if f(k) > f(arg) {
                arg = k;
            }
        }
        let k_star = golden_max(f, (arg - step).max(cfg.k_min), (arg + step).min(cfg.k_max));
        write_csv_row(&mut best, &[l, k_star, f(k_star), k_opt(m, modes)])?;
    }
    out.write_bytes("kappa.csv", &grid)?;
    out.write_bytes("argmax.csv", &best)?;
    Ok(())
}

#[derive(Serialize)]
struct KakReport {
    modes: usize,
    p: usize,
    phi: f64,
    residual: f64,
    o1: MatrixFile,
    o2: MatrixFile,
    middle: MatrixFile,
    t: MatrixFile,
}

pub fn kak(run: &Loaded, out: &mut OutputDir) -> Result<(), CliError> {
    let spec = run.interferometer(0)?;
    let k = kak_decompose(&spec)?;
    let report = KakReport {
        modes: spec.modes(),
        p: k.p,
        phi: k.phi,
        residual: k.residual,
        o1: MatrixFile::from(&k.o1),
        o2: MatrixFile::from(&k.o2),
        middle: MatrixFile::from(&k.middle()),
        t: MatrixFile::from(&spec.build_t()),
    };
    out.write_json("kak.json", &report)?;
    Ok(())
}

/// Tolerances recorded in each manifest.
pub fn tolerances(command: &str, run: &Loaded) -> serde_json::Value {
    let mut t = BTreeMap::new();
    t.insert("structure", json!(cvs_core::densela::tol::STRUCTURE));
    match command {
        "prob" => {
            t.insert("path_agreement", json!(1e-9));
        }
        "oracle" => {
            t.insert(
                "oracle_rel_err",
                json!(run.config.oracle.clone().unwrap_or_default().tolerance),
            );
            t.insert("max_leakage", json!(cvs_core::fockoracle::MAX_LEAKAGE));
        }
        "sample" => {
            t.insert("min_grid_coverage", json!(cvs_core::sampler::MIN_COVERAGE));
        }
        _ => {}
    }
    json!(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cvs_core::gausscore::{det_closed_form, f_prefactor};

    #[test]
    fn golden_section_finds_parabola_peak() {
        let k = golden_max(|x| -(x - 1.7) * (x - 1.7), 1.0, 3.0);
        assert!((k - 1.7).abs() < 1e-8);
    }

    #[test]
    fn k_one_has_zero_origin_density() {
        let spec =
            InterferometerSpec::new(RealMatrix::identity(4), 0.5, RealMatrix::identity(4)).unwrap();
        let c = CircuitSpec::new(spec, 2, 1.3, 1.0, 0.1, Default::default()).unwrap();
        let r = prob_report(&c).unwrap();
        assert_eq!(r.pr_cvs_origin, 0.0);
        assert!((r.det - det_closed_form(c.k(), c.l(), 0.5, 4)).abs() < 1e-12);
        assert_eq!(f_prefactor(1.0, c.l(), 0.5), 0.0);
    }
}
