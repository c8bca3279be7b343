//! JSON run configuration.
//!
//! A config names a preset (`"M1"`, `"M2"`) or spells out a clock and a system
//! Hamiltonian. When both are present, keys given under `clock` replace the
//! preset's keys one by one and `system` replaces the preset Hamiltonian.
//!
//! ```json
//! {
//!   "preset": "M2",
//!   "clock": { "energies": [-2, -1, 0, 1, 2] },
//!   "system": { "hamiltonian": [[0, 1], [1, 0]] },
//!   "tolerances": { "override": null, "tol_match": 1e-9, "tol_zero": 1e-9 },
//!   "taus": [0.0, 0.5],
//!   "observables": [[[1, 0], [0, -1]]],
//!   "seed": 42,
//!   "output_dir": "out",
//!   "scenario": { "propagator": { "q": 0, "q_prime": 1, "n_delays": 50 } }
//! }
//! ```
//!
//! Matrix entries are either a real number or a `[re, im]` pair.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use trinity_core::clock::{build_clock, ClockSpec};
use trinity_core::constraint::{build_model, ConstraintModel, SystemSpec, TOL_MATCH, TOL_ZERO};
use trinity_core::framechange::NonlocalityConfig;
use trinity_core::linalg::CMat;
use trinity_core::presets;
use trinity_core::reductions::default_tau_grid;

use crate::CliError;

/// Largest clock dimension accepted from a config.
pub const MAX_CLOCK_DIM: usize = 256;
/// Largest system dimension accepted from a config.
pub const MAX_SYSTEM_DIM: usize = 16;
/// Largest kinematical dimension `d_C · d_S` accepted from a config.
pub const MAX_KIN_DIM: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(&self) -> Complex64 {
        match *self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

pub type MatrixConfig = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub hamiltonian: MatrixConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Replaces the tolerance of every non-skipped report row.
    #[serde(default, rename = "override")]
    pub override_all: Option<f64>,
    #[serde(default)]
    pub tol_match: Option<f64>,
    #[serde(default)]
    pub tol_zero: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorScenario {
    #[serde(default)]
    pub q: usize,
    #[serde(default = "one")]
    pub q_prime: usize,
    #[serde(default)]
    pub tau: f64,
    /// Explicit delays `τ' - τ`; when absent, `n_delays` points uniform on `[0, π)`.
    #[serde(default)]
    pub delays: Option<Vec<f64>>,
    #[serde(default = "fifty")]
    pub n_delays: usize,
}

fn one() -> usize {
    1
}

fn fifty() -> usize {
    50
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameChangeScenario {
    /// Readings used for both clocks; defaults to 12 points spread over one period.
    #[serde(default)]
    pub taus: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub propagator: Option<PropagatorScenario>,
    #[serde(default)]
    pub frame_change: Option<FrameChangeScenario>,
    #[serde(default)]
    pub nonlocality: Option<NonlocalityConfig>,
    /// Extra wavepacket widths for the fidelity-versus-σ/Δ table.
    #[serde(default)]
    pub nonlocality_sigma_sweep: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub preset: Option<String>,
    /// A full clock spec, or a partial one when `preset` is set.
    #[serde(default)]
    pub clock: Option<Value>,
    #[serde(default)]
    pub system: Option<SystemConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub taus: Option<Vec<f64>>,
    #[serde(default)]
    pub observables: Option<Vec<MatrixConfig>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub scenario: ScenarioConfig,
}

fn default_seed() -> u64 {
    42
}

/// A validated config with its models built.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ModelConfig,
    pub config_hash: String,
    pub clock: ClockSpec,
    pub system: CMat,
    pub model: ConstraintModel,
    pub taus: Vec<f64>,
    pub observables: Vec<CMat>,
    pub output_dir: PathBuf,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))
    }

    /// SHA-256 of the compact re-serialization, so formatting does not matter.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn clock_spec(&self) -> Result<ClockSpec, CliError> {
        let preset = self.preset_parts()?;
        let value = match (preset, &self.clock) {
            (None, None) => return Err(CliError::Config("config needs `preset` or `clock`".into())),
            (None, Some(v)) => v.clone(),
            (Some((spec, _)), None) => return Ok(spec),
            (Some((spec, _)), Some(patch)) => {
                let Value::Object(patch) = patch else {
                    return Err(CliError::Config("`clock` must be an object".into()));
                };
                let mut base = serde_json::to_value(spec).expect("clock spec serializes");
                let obj = base.as_object_mut().expect("clock spec is an object");
                for (k, v) in patch {
                    obj.insert(k.clone(), v.clone());
                }
                base
            }
        };
        serde_json::from_value(value).map_err(|e| CliError::Config(format!("invalid clock: {e}")))
    }

    pub fn system_matrix(&self) -> Result<CMat, CliError> {
        match (&self.system, self.preset_parts()?) {
            (Some(s), _) => matrix(&s.hamiltonian, "system.hamiltonian"),
            (None, Some((_, h))) => Ok(h),
            (None, None) => Err(CliError::Config("config needs `preset` or `system`".into())),
        }
    }

    fn preset_parts(&self) -> Result<Option<(ClockSpec, CMat)>, CliError> {
        match &self.preset {
            None => Ok(None),
            Some(name) => presets::by_name(name).map(Some).ok_or_else(|| CliError::Config(format!("unknown preset `{name}`"))),
        }
    }

    pub fn tol_match(&self) -> f64 {
        self.tolerances.tol_match.unwrap_or(TOL_MATCH)
    }

    /// Validates the config and builds the single-clock model.
    pub fn resolve(self, config_path: &Path) -> Result<Resolved, CliError> {
        let clock = self.clock_spec()?;
        let system = self.system_matrix()?;
        let tol_match = self.tol_match();
        for (name, t) in [("tol_match", Some(tol_match)), ("tol_zero", self.tolerances.tol_zero), ("override", self.tolerances.override_all)] {
            if let Some(t) = t {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(CliError::Config(format!("tolerance `{name}` must be a finite non-negative number")));
                }
            }
        }
        let dc = clock.energies.len();
        let ds = system.nrows();
        if dc == 0 || dc > MAX_CLOCK_DIM {
            return Err(CliError::Config(format!("clock dimension {dc} outside 1..={MAX_CLOCK_DIM}")));
        }
        if ds > MAX_SYSTEM_DIM || dc * ds > MAX_KIN_DIM {
            return Err(CliError::Config(format!("model {dc}x{ds} exceeds the size caps ({MAX_SYSTEM_DIM}, {MAX_KIN_DIM})")));
        }
        let built = build_clock(clock.clone()).map_err(|e| CliError::Config(e.to_string()))?;
        let spec = SystemSpec::new(system.clone()).map_err(|e| CliError::Config(e.to_string()))?;
        let mut model = build_model(built, spec, tol_match).map_err(|e| CliError::Config(e.to_string()))?;
        model.tol_zero = self.tolerances.tol_zero.unwrap_or(TOL_ZERO);

        let taus = match &self.taus {
            Some(t) if t.iter().all(|x| x.is_finite()) => t.clone(),
            Some(_) => return Err(CliError::Config("`taus` must be finite".into())),
            None => default_tau_grid(&model),
        };
        let observables = match &self.observables {
            Some(list) => list
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let m = matrix(m, &format!("observables[{i}]"))?;
                    if m.nrows() != ds {
                        return Err(CliError::Config(format!("observables[{i}] is {}x{}, system is {ds}x{ds}", m.nrows(), m.ncols())));
                    }
                    Ok(m)
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => default_observables(&system),
        };
        let base = config_path.parent().unwrap_or(Path::new("."));
        let output_dir = match &self.output_dir {
            Some(p) if p.is_absolute() => p.clone(),
            Some(p) => base.join(p),
            None => base.join("trinity-out"),
        };
        let config_hash = self.hash();
        Ok(Resolved { config: self, config_hash, clock, system, model, taus, observables, output_dir })
    }
}

/// `Ĥ_S`, the projector onto the first basis state, and the nearest-neighbour hopping matrix.
pub fn default_observables(system: &CMat) -> Vec<CMat> {
    let d = system.nrows();
    let mut first = CMat::zeros(d, d);
    first[(0, 0)] = Complex64::new(1.0, 0.0);
    let hop = CMat::from_fn(d, d, |i, j| if i.abs_diff(j) == 1 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    let mut out = vec![system.clone(), first];
    if d > 1 {
        out.push(hop);
    }
    out
}

fn matrix(rows: &MatrixConfig, what: &str) -> Result<CMat, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!("`{what}` must be a non-empty square matrix")));
    }
    let m = CMat::from_fn(n, n, |i, j| rows[i][j].value());
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::Config(format!("`{what}` has non-finite entries")));
    }
    Ok(m)
}
