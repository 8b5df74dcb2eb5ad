use entwit::work::{sample_tpm, EstimatorSummary};
use entwit::ThermalSpec;
use serde::{Deserialize, Serialize};

use super::Globals;
use crate::config::{base_dir, load, ProtocolConfig};
use crate::error::{CliError, CliResult};
use crate::output::{csv_bytes, json_bytes, sha256_hex, write};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub protocol: ProtocolConfig,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// Temperature of the final Gibbs state in `β_f E_f − β_i E_i`;
    /// defaults to the protocol temperature.
    #[serde(rename = "T_final", default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
}

#[derive(Serialize)]
struct SampleFile<'a> {
    config: &'a SampleConfig,
    summary: &'a EstimatorSummary,
    csv_sha256: String,
}

pub fn run(g: &Globals) -> CliResult<u8> {
    let mut cfg: SampleConfig = load(&g.config)?;
    cfg.protocol.absolutize(&base_dir(&g.config)?);
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if cfg.count == 0 {
        return Err(CliError::config("count must be at least 1"));
    }
    cfg.t_final.get_or_insert(cfg.protocol.temperature);

    let p = cfg.protocol.build(true)?;
    let initial = ThermalSpec::new(p.schedule.initial_hamiltonian()?, p.beta)?;
    let final_ = ThermalSpec::new(p.schedule.final_hamiltonian()?, 1.0 / cfg.t_final.unwrap_or_default())?;
    let samples = sample_tpm(&initial, &final_, &p.u, cfg.count, cfg.seed)?;

    let csv = csv_bytes(&cfg, |out| samples.write_csv(out));
    let s = &samples.summary;
    let file = SampleFile {
        config: &cfg,
        summary: s,
        csv_sha256: sha256_hex(&csv),
    };
    let path = write(&g.out, "sample.csv", &csv)?;
    write(&g.out, "sample.json", &json_bytes(&file))?;
    let z = s.z_score.map_or("n/a".to_string(), |z| format!("{z:.3}"));
    println!("count={} mean/exact={:.6} z={z} -> {}", s.count, s.ratio, path.display());
    Ok(0)
}
