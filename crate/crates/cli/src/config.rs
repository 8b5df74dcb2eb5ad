//! Config files and the state and protocol descriptions they contain.

use std::fs;
use std::path::{Path, PathBuf};

use entwit::operator::MatrixJson;
use entwit::spin::{Interpolation, StepSampling};
use entwit::witness::{
    build_css, build_sigma_prime_7, build_w_state, css_thermal_params_3, sigma_prime_thermal_params_7,
    LOW_TEMPERATURE_LIMIT,
};
use entwit::work::{exact_evolution, schedule_commutator_norm, trotter_evolution, COMMUTATOR_TOLERANCE};
use entwit::{
    build_xxz, Boundary, DMParams, DensityMatrix, DrivingSchedule, QubitRegister, ThermalSpec, UnitaryOperator,
    WitnessState, XXZParams,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub fn default_j() -> f64 {
    1.0
}

pub fn default_temperature() -> f64 {
    0.01
}

/// Parses a JSON config. Errors carry `path:line:column`.
pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(anchored(path, &e)))
}

fn anchored(path: &Path, e: &serde_json::Error) -> String {
    let full = e.to_string();
    let msg = full.rsplit_once(" at line ").map_or(full.as_str(), |(m, _)| m);
    format!("{}:{}:{}: {msg}", path.display(), e.line(), e.column())
}

/// Directory that relative paths inside `config` are taken from.
pub fn base_dir(config: &Path) -> CliResult<PathBuf> {
    let parent = config.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    Ok(std::path::absolute(parent)?)
}

pub fn absolutize(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

fn load_matrix(path: &Path, n: usize) -> CliResult<(QubitRegister, entwit::operator::CMatrix)> {
    let j: MatrixJson = load(path)?;
    if j.n != n {
        return Err(CliError::config(format!(
            "{}: matrix is for n = {}, config has n = {n}",
            path.display(),
            j.n
        )));
    }
    Ok(j.to_matrix()?)
}

/// Thermal chain state at `(B, Jz, T)`; `n`, `J` and the boundary come from
/// the enclosing config.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalCfg {
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "Jz")]
    pub jz: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

/// Where a state comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSource {
    WState,
    Css,
    SigmaPrime,
    /// Gibbs state approximating `css` (three sites).
    CssThermal,
    /// Gibbs state approximating `sigma_prime` (seven sites).
    SigmaPrimeThermal,
    CompletelyMixed,
    Thermal(ThermalCfg),
    /// Density matrix in the JSON matrix format.
    File(PathBuf),
}

impl StateSource {
    pub fn w_state() -> Self {
        StateSource::WState
    }

    pub fn css() -> Self {
        StateSource::Css
    }

    fn is_thermal_stand_in(&self) -> bool {
        matches!(self, StateSource::CssThermal | StateSource::SigmaPrimeThermal)
    }

    pub fn absolutize(&mut self, base: &Path) {
        if let StateSource::File(p) = self {
            absolutize(base, p);
        }
    }
}

/// Chain shared by every state of a witness or sweep config.
#[derive(Clone, Copy, Debug)]
pub struct Chain {
    pub n: usize,
    pub j: f64,
    pub boundary: Boundary,
    /// Temperature of the `*_thermal` stand-ins.
    pub reference_temperature: f64,
}

impl Chain {
    pub fn params(&self, b: f64, jz: f64) -> CliResult<XXZParams> {
        Ok(XXZParams::new(self.n, self.j, jz, b, self.boundary)?)
    }

    pub fn thermal(&self, cfg: &ThermalCfg) -> CliResult<ThermalSpec> {
        let h = build_xxz(&self.params(cfg.b, cfg.jz)?)?;
        Ok(ThermalSpec::new(h, 1.0 / cfg.t)?)
    }

    fn need_n(&self, n: usize, what: &str) -> CliResult<()> {
        if self.n == n {
            Ok(())
        } else {
            Err(CliError::config(format!("{what} is defined for n = {n}, config has n = {}", self.n)))
        }
    }

    fn stand_in(&self, params: XXZParams, beta: f64) -> CliResult<WitnessState> {
        Ok(ThermalSpec::new(build_xxz(&params)?, beta)?.into())
    }

    pub fn resolve(&self, src: &StateSource) -> CliResult<WitnessState> {
        let beta = 1.0 / self.reference_temperature;
        Ok(match src {
            StateSource::WState => build_w_state(self.n)?.into(),
            StateSource::Css => build_css(self.n)?.into(),
            StateSource::SigmaPrime => {
                self.need_n(7, "sigma_prime")?;
                build_sigma_prime_7()?.into()
            }
            StateSource::CssThermal => {
                self.need_n(3, "css_thermal")?;
                return self.stand_in(css_thermal_params_3(beta, self.j)?, beta);
            }
            StateSource::SigmaPrimeThermal => {
                self.need_n(7, "sigma_prime_thermal")?;
                return self.stand_in(sigma_prime_thermal_params_7(beta, self.j)?, beta);
            }
            StateSource::CompletelyMixed => DensityMatrix::maximally_mixed(QubitRegister::new(self.n)?).into(),
            StateSource::Thermal(cfg) => self.thermal(cfg)?.into(),
            StateSource::File(path) => {
                let (register, m) = load_matrix(path, self.n)?;
                DensityMatrix::new(register, m)?.into()
            }
        })
    }

    pub fn warn_if_warm(&self, sources: &[&StateSource]) {
        if self.reference_temperature > LOW_TEMPERATURE_LIMIT && sources.iter().any(|s| s.is_thermal_stand_in()) {
            eprintln!(
                "warning: reference_temperature {} is above {LOW_TEMPERATURE_LIMIT}; thermal stand-ins drift away from the closest separable state",
                self.reference_temperature
            );
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `css_thermal_params_3` at the protocol temperature.
    CssThermal,
    /// `sigma_prime_thermal_params_7` at the protocol temperature.
    SigmaPrimeThermal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldCfg {
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "Jz")]
    pub jz: f64,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub dm: Option<DMParams>,
}

/// Protocol endpoint: a preset name or explicit `{"B", "Jz"}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Preset(Preset),
    Fields(FieldCfg),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evolution {
    /// Exact when the schedule commutes with itself at all times, Trotter
    /// otherwise.
    #[default]
    Auto,
    Exact,
    Trotter,
}

fn default_t_f() -> f64 {
    DrivingSchedule::DEFAULT_T_F
}

fn default_steps() -> usize {
    DrivingSchedule::DEFAULT_STEPS
}

/// Driven chain prepared at temperature `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub n: usize,
    #[serde(rename = "J", default = "default_j")]
    pub j: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(rename = "T", default = "default_temperature")]
    pub temperature: f64,
    pub initial: Endpoint,
    #[serde(rename = "final")]
    pub final_: Endpoint,
    #[serde(default = "default_t_f")]
    pub t_f: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub interpolation: Interpolation,
    #[serde(default)]
    pub sampling: StepSampling,
    #[serde(default)]
    pub evolution: Evolution,
    /// Replaces the computed evolution operator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary_file: Option<PathBuf>,
}

/// How the protocol's unitary was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitarySource {
    Exact,
    Trotter,
    File,
}

pub struct Protocol {
    pub schedule: DrivingSchedule,
    pub beta: f64,
    pub commutator_norm: f64,
    pub u: UnitaryOperator,
    pub source: UnitarySource,
}

impl ProtocolConfig {
    pub fn absolutize(&mut self, base: &Path) {
        if let Some(p) = &mut self.unitary_file {
            absolutize(base, p);
        }
    }

    pub fn beta(&self) -> CliResult<f64> {
        let beta = 1.0 / self.temperature;
        if self.temperature > 0.0 && beta.is_finite() {
            Ok(beta)
        } else {
            Err(CliError::config(format!("T must be finite and > 0, got {}", self.temperature)))
        }
    }

    fn endpoint(&self, e: &Endpoint, beta: f64) -> CliResult<XXZParams> {
        let need = |n: usize, name: &str| {
            if self.n == n {
                Ok(())
            } else {
                Err(CliError::config(format!("endpoint {name} is defined for n = {n}, config has n = {}", self.n)))
            }
        };
        let mut p = match e {
            Endpoint::Preset(Preset::CssThermal) => {
                need(3, "css_thermal")?;
                css_thermal_params_3(beta, self.j)?
            }
            Endpoint::Preset(Preset::SigmaPrimeThermal) => {
                need(7, "sigma_prime_thermal")?;
                sigma_prime_thermal_params_7(beta, self.j)?
            }
            Endpoint::Fields(f) => {
                let mut p = XXZParams::new(self.n, self.j, f.jz, f.b, self.boundary)?;
                p.dm = f.dm;
                p.validate()?;
                p
            }
        };
        p.boundary = self.boundary;
        Ok(p)
    }

    pub fn schedule(&self) -> CliResult<DrivingSchedule> {
        let beta = self.beta()?;
        let s = DrivingSchedule::new(
            self.endpoint(&self.initial, beta)?,
            self.endpoint(&self.final_, beta)?,
            self.t_f,
            self.steps,
            self.interpolation,
        )?;
        Ok(s.with_sampling(self.sampling))
    }

    /// Builds the schedule and its unitary. A unitary read from file is
    /// checked only when `strict`.
    pub fn build(&self, strict: bool) -> CliResult<Protocol> {
        let schedule = self.schedule()?;
        let commutator_norm = schedule_commutator_norm(&schedule)?;
        let (u, source) = match &self.unitary_file {
            Some(path) => {
                let (register, m) = load_matrix(path, self.n)?;
                let tol = if strict { UnitaryOperator::DEFAULT_TOLERANCE } else { f64::INFINITY };
                (UnitaryOperator::with_tolerance(register, m, tol)?, UnitarySource::File)
            }
            None => match self.evolution {
                Evolution::Exact => (exact_evolution(&schedule)?, UnitarySource::Exact),
                Evolution::Auto if commutator_norm <= COMMUTATOR_TOLERANCE => {
                    (exact_evolution(&schedule)?, UnitarySource::Exact)
                }
                _ => (trotter_evolution(&schedule)?, UnitarySource::Trotter),
            },
        };
        Ok(Protocol {
            schedule,
            beta: self.beta()?,
            commutator_norm,
            u,
            source,
        })
    }
}
