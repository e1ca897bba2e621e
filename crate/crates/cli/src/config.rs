//! Run configuration: JSON file plus command-line overrides.

use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::{Path, PathBuf};

use cvs_core::densela::Matrix;
use cvs_core::embed::embedded_circuit;
use cvs_core::fockoracle::{DEFAULT_CUTOFF, MIN_CUTOFF};
use cvs_core::gausscore::{CircuitSpec, InterferometerSpec, Variant};
use cvs_core::io::MatrixFile;
use cvs_core::random::{orthogonal, seeded_rng, symmetric_orthogonal};
use cvs_core::sampler::SamplerConfig;
use cvs_core::RealMatrix;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interferometer: Option<InterferometerSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embed: Option<EmbedConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    pub modes: usize,
    pub photons: usize,
    pub s: f64,
    pub r: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub variant: Variant,
}

fn default_eta() -> f64 {
    0.1
}

fn default_phi() -> f64 {
    FRAC_PI_4
}

/// Path to a matrix JSON file, or the matrix inline.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Path(PathBuf),
    Inline(MatrixFile),
}

impl MatrixSource {
    pub fn load(&self, base: &Path) -> Result<MatrixFile, CliError> {
        match self {
            MatrixSource::Inline(m) => Ok(m.clone()),
            MatrixSource::Path(p) => {
                let path = if p.is_absolute() {
                    p.clone()
                } else {
                    base.join(p)
                };
                let text = fs::read_to_string(&path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
            }
        }
    }

    pub fn load_real(&self, base: &Path) -> Result<RealMatrix, CliError> {
        Ok(self.load(base)?.to_real()?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InterferometerSource {
    /// Haar-random `Theta` and a random symmetric orthogonal `Sigma` with `p` eigenvalues +1.
    Random {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modes: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default = "default_phi")]
        phi: f64,
    },
    Files {
        theta: MatrixSource,
        sigma: MatrixSource,
        #[serde(default = "default_phi")]
        phi: f64,
    },
    /// `Sigma` carrying `nu X` in its flagged block; `Theta` defaults to the identity.
    Embedded {
        x: MatrixSource,
        nu: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modes: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<MatrixSource>,
        #[serde(default = "default_phi")]
        phi: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedConfig {
    pub x: MatrixSource,
    pub nu: f64,
    pub modes: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub modes: usize,
    pub photons: usize,
    #[serde(default = "default_k_min")]
    pub k_min: f64,
    #[serde(default = "default_k_max")]
    pub k_max: f64,
    #[serde(default = "default_k_steps")]
    pub k_steps: usize,
    #[serde(default = "default_l_values")]
    pub l_values: Vec<f64>,
}

fn default_k_min() -> f64 {
    1.0
}
fn default_k_max() -> f64 {
    4.0
}
fn default_k_steps() -> usize {
    301
}
fn default_l_values() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Number of random circuits; ignored for fixed interferometers.
    #[serde(default = "default_oracle_circuits")]
    pub circuits: usize,
    #[serde(default = "default_oracle_tol")]
    pub tolerance: f64,
}

fn default_oracle_circuits() -> usize {
    5
}
fn default_oracle_tol() -> f64 {
    1e-3
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            circuits: default_oracle_circuits(),
            tolerance: default_oracle_tol(),
        }
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub cutoff: Option<usize>,
    pub eta: Option<f64>,
}

/// Loaded configuration and the directory relative paths resolve against.
pub struct Loaded {
    pub config: RunConfig,
    pub base: PathBuf,
}

impl Loaded {
    pub fn read(path: Option<&Path>, ov: &Overrides) -> Result<Loaded, CliError> {
        let (mut config, base) = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                let cfg: RunConfig = serde_json::from_str(&text)
                    .map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
                (cfg, p.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (RunConfig::default(), PathBuf::from(".")),
        };
        if ov.seed.is_some() {
            config.seed = ov.seed;
        }
        if ov.cutoff.is_some() {
            config.cutoff = ov.cutoff;
        }
        if let Some(eta) = ov.eta {
            let circuit = config.circuit.as_mut().ok_or_else(|| {
                CliError::Validation("--eta given without a circuit section".into())
            })?;
            circuit.eta = eta;
        }
        Ok(Loaded { config, base })
    }

    pub fn seed(&self) -> u64 {
        self.config.seed.unwrap_or(0)
    }

    pub fn cutoff(&self) -> Result<usize, CliError> {
        let c = self.config.cutoff.unwrap_or(DEFAULT_CUTOFF);
        if !(MIN_CUTOFF..=64).contains(&c) {
            return Err(CliError::Validation(format!(
                "cutoff {c} outside {MIN_CUTOFF}..=64"
            )));
        }
        Ok(c)
    }

    pub fn circuit_config(&self) -> Result<&CircuitConfig, CliError> {
        let c = self
            .config
            .circuit
            .as_ref()
            .ok_or_else(|| CliError::Validation("missing circuit section".into()))?;
        positive("s", c.s)?;
        positive("r", c.r)?;
        positive("eta", c.eta)?;
        if c.modes == 0 {
            return Err(CliError::Validation("modes must be positive".into()));
        }
        if c.photons % 2 == 1 {
            return Err(CliError::Validation(format!(
                "photons = {} must be even",
                c.photons
            )));
        }
        if c.modes < 2 * c.photons {
            return Err(CliError::Validation(format!(
                "modes = {} is smaller than 2 * photons = {}",
                c.modes,
                2 * c.photons
            )));
        }
        Ok(c)
    }

    fn source(&self) -> Result<&InterferometerSource, CliError> {
        self.config
            .interferometer
            .as_ref()
            .ok_or_else(|| CliError::Validation("missing interferometer section".into()))
    }

    /// Whether repeated draws of the interferometer give distinct circuits.
    pub fn is_random(&self) -> bool {
        matches!(
            self.config.interferometer,
            Some(InterferometerSource::Random { .. })
        )
    }

    fn source_modes(&self, given: Option<usize>) -> Result<usize, CliError> {
        given
            .or(self.config.circuit.as_ref().map(|c| c.modes))
            .ok_or_else(|| {
                CliError::Validation("interferometer needs modes (or a circuit section)".into())
            })
    }

    /// The interferometer; `draw` selects the RNG stream of a random source.
    pub fn interferometer(&self, draw: u64) -> Result<InterferometerSpec, CliError> {
        match self.source()? {
            InterferometerSource::Random {
                modes,
                p,
                seed,
                phi,
            } => {
                let modes = self.source_modes(*modes)?;
                if modes == 0 {
                    return Err(CliError::Validation("modes must be positive".into()));
                }
                let p = p.unwrap_or(modes / 2);
                if p > modes {
                    return Err(CliError::Validation(format!(
                        "p = {p} exceeds modes = {modes}"
                    )));
                }
                finite("phi", *phi)?;
                let mut rng = seeded_rng(seed.unwrap_or(self.seed()), draw);
                let theta = orthogonal(modes, &mut rng);
                let sigma = symmetric_orthogonal(modes, p, &mut rng);
                Ok(InterferometerSpec::new(theta, *phi, sigma)?)
            }
            InterferometerSource::Files { theta, sigma, phi } => {
                finite("phi", *phi)?;
                Ok(InterferometerSpec::new(
                    theta.load_real(&self.base)?,
                    *phi,
                    sigma.load_real(&self.base)?,
                )?)
            }
            InterferometerSource::Embedded { .. } => Ok(self.circuit(draw)?.interferometer),
        }
    }

    /// The full circuit from the circuit section and interferometer source.
    pub fn circuit(&self, draw: u64) -> Result<CircuitSpec, CliError> {
        let c = self.circuit_config()?;
        let check_modes = |m: usize| {
            if m != c.modes {
                Err(CliError::Validation(format!(
                    "interferometer has {m} modes, circuit has {}",
                    c.modes
                )))
            } else {
                Ok(())
            }
        };
        match self.source()? {
            InterferometerSource::Embedded {
                x,
                nu,
                modes,
                theta,
                phi,
            } => {
                check_modes(modes.unwrap_or(c.modes))?;
                finite("phi", *phi)?;
                positive("nu", *nu)?;
                let x = x.load_real(&self.base)?;
                if 2 * x.rows() != c.photons {
                    return Err(CliError::Validation(format!(
                        "embedded X of order {} flags {} modes, circuit has photons = {}",
                        x.rows(),
                        2 * x.rows(),
                        c.photons
                    )));
                }
                let theta = match theta {
                    Some(t) => t.load_real(&self.base)?,
                    None => Matrix::identity(c.modes),
                };
                Ok(embedded_circuit(
                    &x, *nu, c.modes, theta, *phi, c.s, c.r, c.eta, c.variant,
                )?)
            }
            _ => {
                let spec = self.interferometer(draw)?;
                check_modes(spec.modes())?;
                Ok(CircuitSpec::new(
                    spec, c.photons, c.s, c.r, c.eta, c.variant,
                )?)
            }
        }
    }

    /// Sampler settings with the bin width taken from the circuit.
    pub fn sampler_config(&self) -> Result<SamplerConfig, CliError> {
        let eta = self.circuit_config()?.eta;
        let mut cfg = self.config.sampler.clone().unwrap_or_default();
        cfg.eta = eta;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn finite(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{name} = {x} is not finite")))
    }
}

pub fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{name} = {x} must be positive"
        )))
    }
}
