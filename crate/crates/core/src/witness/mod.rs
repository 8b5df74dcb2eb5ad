//! The relative-entropy entanglement witness.
//!
//! For a target `ρ` with closest separable state `σ_css`, any state `ρ*` with
//! `S(ρ‖ρ*) < S(ρ‖σ_css)` is entangled. Detection is reported only on a
//! strict deficit larger than [`STRICTNESS_EPSILON`], so a separable `ρ*`
//! can never be flagged.

mod states;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator::DensityMatrix;
use crate::spin::XXZParams;
use crate::thermo::{relative_entropy, relative_entropy_to_thermal, ThermalSpec};
use crate::work::{ramp_evolution, relative_entropy_via_work, Ramp};

pub use states::{
    build_css, build_sigma_prime_7, build_w_state, css_thermal_params_3, css_weight, phase_averaged_css,
    sigma_prime_thermal_params_7, LOW_TEMPERATURE_LIMIT,
};
pub use sweep::{sweep_detection, Axis, SweepGrid, SweepReference, SweepResult};

/// Default margin a detection must clear.
pub const STRICTNESS_EPSILON: f64 = 1e-9;

/// How relative entropies are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// From spectral decompositions.
    #[default]
    Direct,
    /// From work statistics of a linear ramp between the two Hamiltonians.
    #[serde(alias = "via_work")]
    ViaWork,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Direct => "direct",
            Route::ViaWork => "via-work",
        })
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Route::Direct),
            "via-work" | "via_work" => Ok(Route::ViaWork),
            other => Err(Error::param(format!("unknown route {other:?} (expected direct or via-work)"))),
        }
    }
}

/// A state entering the witness: an arbitrary density matrix, or a Gibbs
/// state with its Hamiltonian. Only Gibbs states can be reached by work
/// statistics.
#[derive(Clone, Debug)]
pub enum WitnessState {
    Density(DensityMatrix),
    Thermal(ThermalSpec),
}

impl WitnessState {
    pub fn density(&self) -> &DensityMatrix {
        match self {
            WitnessState::Density(d) => d,
            WitnessState::Thermal(t) => t.state(),
        }
    }

    pub fn thermal(&self) -> Option<&ThermalSpec> {
        match self {
            WitnessState::Density(_) => None,
            WitnessState::Thermal(t) => Some(t),
        }
    }

    /// `tr(ρ ln ρ)`.
    pub fn neg_entropy(&self) -> Result<f64> {
        match self {
            WitnessState::Density(d) => crate::thermo::neg_entropy(d),
            WitnessState::Thermal(t) => Ok(t.neg_entropy()),
        }
    }
}

impl From<DensityMatrix> for WitnessState {
    fn from(d: DensityMatrix) -> Self {
        WitnessState::Density(d)
    }
}

impl From<ThermalSpec> for WitnessState {
    fn from(t: ThermalSpec) -> Self {
        WitnessState::Thermal(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WitnessOptions {
    pub route: Route,
    /// Protocol used by [`Route::ViaWork`].
    pub ramp: Ramp,
    pub strictness: f64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            route: Route::Direct,
            ramp: Ramp::default(),
            strictness: STRICTNESS_EPSILON,
        }
    }
}

impl WitnessOptions {
    pub fn with_route(route: Route) -> Self {
        WitnessOptions { route, ..Self::default() }
    }
}

/// Parameters of a thermal `ρ*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalPoint {
    pub params: XXZParams,
    pub temperature: f64,
}

fn extended_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&x.to_string())
    }
}

/// Both sides of `S(ρ‖σ_ref) ≥ S(ρ‖ρ*)` and the verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    /// `S(ρ‖σ_ref)`, possibly `+∞`.
    #[serde(serialize_with = "extended_f64")]
    pub s_left: f64,
    /// `S(ρ‖ρ*)`, possibly `+∞`.
    #[serde(serialize_with = "extended_f64")]
    pub s_right: f64,
    #[serde(serialize_with = "extended_f64")]
    pub margin: f64,
    pub detected: bool,
    pub route: Route,
    pub strictness: f64,
    pub rho_star: Option<ThermalPoint>,
}

impl WitnessReport {
    /// `detected` holds when `s_right < s_left − strictness`. An infinite
    /// left side with a finite right side detects; an infinite right side
    /// never does.
    pub fn new(s_left: f64, s_right: f64, route: Route, strictness: f64) -> Self {
        WitnessReport {
            s_left,
            s_right,
            margin: s_left - s_right,
            detected: s_right.is_finite() && s_right < s_left - strictness,
            route,
            strictness,
            rho_star: None,
        }
    }

    pub fn with_rho_star(mut self, point: ThermalPoint) -> Self {
        self.rho_star = Some(point);
        self
    }
}

/// `S(a‖b)` from spectra.
pub(crate) fn direct_distance(a: &WitnessState, b: &WitnessState) -> Result<f64> {
    match b {
        WitnessState::Thermal(spec) => relative_entropy_to_thermal(a.density(), spec),
        WitnessState::Density(sigma) => relative_entropy(a.density(), sigma),
    }
}

fn require_thermal<'a>(s: &'a WitnessState, role: &str) -> Result<&'a ThermalSpec> {
    s.thermal()
        .ok_or_else(|| Error::param(format!("the via-work route needs {role} to be a Gibbs state")))
}

/// `S(a‖b)` from the work statistics of a ramp driving `H_b` into `H_a`.
pub(crate) fn work_distance(a: &ThermalSpec, b: &ThermalSpec, ramp: &Ramp) -> Result<f64> {
    let u = ramp_evolution(b.hamiltonian(), a.hamiltonian(), ramp)?;
    relative_entropy_via_work(b, a, &u)
}

/// Evaluates the witness for `ρ*` against target `rho` and reference
/// `sigma_ref` with default options.
pub fn witness_evaluate(rho: &WitnessState, sigma_ref: &WitnessState, rho_star: &WitnessState, route: Route) -> Result<WitnessReport> {
    witness_evaluate_with(rho, sigma_ref, rho_star, &WitnessOptions::with_route(route))
}

pub fn witness_evaluate_with(
    rho: &WitnessState,
    sigma_ref: &WitnessState,
    rho_star: &WitnessState,
    opts: &WitnessOptions,
) -> Result<WitnessReport> {
    let register = rho.density().register();
    register.ensure_same(&sigma_ref.density().register())?;
    register.ensure_same(&rho_star.density().register())?;
    let (s_left, s_right) = match opts.route {
        Route::Direct => (direct_distance(rho, sigma_ref)?, direct_distance(rho, rho_star)?),
        Route::ViaWork => {
            let target = require_thermal(rho, "the target state")?;
            let reference = require_thermal(sigma_ref, "the reference state")?;
            let star = require_thermal(rho_star, "the tested state")?;
            (work_distance(target, reference, &opts.ramp)?, work_distance(target, star, &opts.ramp)?)
        }
    };
    Ok(WitnessReport::new(s_left, s_right, opts.route, opts.strictness))
}
