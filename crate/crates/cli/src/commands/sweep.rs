use entwit::witness::{sweep_detection, Axis, SweepGrid, SweepReference, WitnessOptions};
use entwit::work::Ramp;
use entwit::{Boundary, Route};
use serde::{Deserialize, Serialize};

use super::{default_strictness, Globals};
use crate::config::{base_dir, default_j, default_temperature, load, Chain, StateSource};
use crate::error::CliResult;
use crate::output::{csv_bytes, json_bytes, sha256_hex, state_checksum, write};

/// Axes left out take the size-dependent defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: usize,
    #[serde(rename = "J", default = "default_j")]
    pub j: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Axis>,
    #[serde(rename = "Jz", default, skip_serializing_if = "Option::is_none")]
    pub jz: Option<Axis>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Axis>,
    #[serde(default = "StateSource::w_state")]
    pub target: StateSource,
    #[serde(default = "StateSource::css")]
    pub reference: StateSource,
    #[serde(default = "default_temperature")]
    pub reference_temperature: f64,
    #[serde(default)]
    pub route: Route,
    #[serde(default)]
    pub ramp: Ramp,
    #[serde(default = "default_strictness")]
    pub strictness: f64,
}

impl SweepConfig {
    fn fill_axes(&mut self) {
        let d = SweepGrid::default_for(self.n);
        self.b.get_or_insert(d.b);
        self.jz.get_or_insert(d.jz);
        self.t.get_or_insert(d.t);
    }

    fn grid(&self) -> SweepGrid {
        let d = SweepGrid::default_for(self.n);
        SweepGrid {
            n: self.n,
            j: self.j,
            boundary: self.boundary,
            b: self.b.unwrap_or(d.b),
            jz: self.jz.unwrap_or(d.jz),
            t: self.t.unwrap_or(d.t),
        }
    }
}

#[derive(Serialize)]
struct GridMeta {
    #[serde(flatten)]
    grid: SweepGrid,
    points: usize,
    order: &'static str,
}

#[derive(Serialize)]
struct Checksums {
    target: String,
    reference: String,
    csv: String,
}

#[derive(Serialize)]
struct SweepHeader<'a> {
    config: &'a SweepConfig,
    grid: GridMeta,
    columns: [&'static str; 7],
    detected: usize,
    sha256: Checksums,
}

pub fn run(g: &Globals) -> CliResult<u8> {
    let mut cfg: SweepConfig = load(&g.config)?;
    let base = base_dir(&g.config)?;
    cfg.target.absolutize(&base);
    cfg.reference.absolutize(&base);
    if let Some(r) = g.route {
        cfg.route = r;
    }
    cfg.fill_axes();
    let grid = cfg.grid();
    grid.validate()?;

    let chain = Chain {
        n: cfg.n,
        j: cfg.j,
        boundary: cfg.boundary,
        reference_temperature: cfg.reference_temperature,
    };
    chain.warn_if_warm(&[&cfg.target, &cfg.reference]);
    let reference = SweepReference {
        rho: chain.resolve(&cfg.target)?,
        sigma_ref: chain.resolve(&cfg.reference)?,
    };
    let opts = WitnessOptions {
        route: cfg.route,
        ramp: cfg.ramp,
        strictness: cfg.strictness,
    };
    let result = sweep_detection(&grid, &reference, &opts)?;

    let csv = csv_bytes(&cfg, |out| result.write_csv(out));
    let header = SweepHeader {
        config: &cfg,
        grid: GridMeta {
            grid,
            points: grid.len(),
            order: "B outermost, then Jz, T fastest",
        },
        columns: ["B", "Jz", "T", "s_left", "s_right", "margin", "detected"],
        detected: result.detected_count(),
        sha256: Checksums {
            target: state_checksum(&reference.rho),
            reference: state_checksum(&reference.sigma_ref),
            csv: sha256_hex(&csv),
        },
    };
    let csv_path = write(&g.out, "sweep.csv", &csv)?;
    write(&g.out, "sweep.json", &json_bytes(&header))?;
    println!(
        "{} of {} grid points detected -> {}",
        result.detected_count(),
        grid.len(),
        csv_path.display()
    );
    Ok(0)
}
