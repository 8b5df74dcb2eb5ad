use entwit::witness::{witness_evaluate_with, ThermalPoint, WitnessOptions};
use entwit::work::Ramp;
use entwit::{Boundary, Route, WitnessReport};
use serde::{Deserialize, Serialize};

use super::{default_strictness, Globals};
use crate::config::{base_dir, default_j, default_temperature, load, Chain, StateSource};
use crate::error::CliResult;
use crate::output::{json_bytes, state_checksum, write};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    pub n: usize,
    #[serde(rename = "J", default = "default_j")]
    pub j: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default = "StateSource::w_state")]
    pub target: StateSource,
    #[serde(default = "StateSource::css")]
    pub reference: StateSource,
    pub rho_star: StateSource,
    #[serde(default = "default_temperature")]
    pub reference_temperature: f64,
    #[serde(default)]
    pub route: Route,
    #[serde(default)]
    pub ramp: Ramp,
    #[serde(default = "default_strictness")]
    pub strictness: f64,
}

impl WitnessConfig {
    pub fn chain(&self) -> Chain {
        Chain {
            n: self.n,
            j: self.j,
            boundary: self.boundary,
            reference_temperature: self.reference_temperature,
        }
    }

    pub fn options(&self) -> WitnessOptions {
        WitnessOptions {
            route: self.route,
            ramp: self.ramp,
            strictness: self.strictness,
        }
    }
}

#[derive(Serialize)]
struct Checksums {
    target: String,
    reference: String,
    rho_star: String,
}

#[derive(Serialize)]
struct WitnessFile<'a> {
    config: &'a WitnessConfig,
    report: &'a WitnessReport,
    sha256: Checksums,
}

pub fn run(g: &Globals) -> CliResult<u8> {
    let mut cfg: WitnessConfig = load(&g.config)?;
    let base = base_dir(&g.config)?;
    for s in [&mut cfg.target, &mut cfg.reference, &mut cfg.rho_star] {
        s.absolutize(&base);
    }
    if let Some(r) = g.route {
        cfg.route = r;
    }

    let chain = cfg.chain();
    chain.warn_if_warm(&[&cfg.target, &cfg.reference, &cfg.rho_star]);
    let rho = chain.resolve(&cfg.target)?;
    let sigma = chain.resolve(&cfg.reference)?;
    let star = chain.resolve(&cfg.rho_star)?;

    let mut report = witness_evaluate_with(&rho, &sigma, &star, &cfg.options())?;
    if let StateSource::Thermal(t) = &cfg.rho_star {
        report = report.with_rho_star(ThermalPoint {
            params: chain.params(t.b, t.jz)?,
            temperature: t.t,
        });
    }

    let file = WitnessFile {
        config: &cfg,
        report: &report,
        sha256: Checksums {
            target: state_checksum(&rho),
            reference: state_checksum(&sigma),
            rho_star: state_checksum(&star),
        },
    };
    let path = write(&g.out, "witness.json", &json_bytes(&file))?;
    println!(
        "detected={} s_left={} s_right={} margin={} route={} -> {}",
        report.detected,
        report.s_left,
        report.s_right,
        report.margin,
        report.route,
        path.display()
    );
    Ok(if report.detected { 0 } else { 3 })
}
