use entwit::operator::operator_norm;
use entwit::random::random_unitary;
use entwit::thermo::relative_entropy_to_thermal;
use entwit::work::{
    exact_evolution, ln_tasaki_average, relative_entropy_via_work, trotter_evolution, TransitionMatrix,
    COMMUTATOR_TOLERANCE,
};
use entwit::ThermalSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{default_random_unitaries, Globals};
use crate::config::{base_dir, load, ProtocolConfig, UnitarySource};
use crate::error::{CliError, CliResult};
use crate::output::{json_bytes, write};

pub const UNITARITY_TOL: f64 = 1e-10;
pub const STOCHASTIC_TOL: f64 = 1e-10;
pub const AVERAGE_REL_TOL: f64 = 1e-8;
pub const ROUTES_EXACT_TOL: f64 = 1e-8;
pub const ROUTES_APPROX_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub protocol: ProtocolConfig,
    /// Final temperature of the cross-temperature check; defaults to twice
    /// the protocol temperature.
    #[serde(rename = "T_final", default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    /// Haar unitaries for the protocol-independence check.
    #[serde(default = "default_random_unitaries")]
    pub random_unitaries: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    status: Status,
    /// Absolute or relative, as `kind` says.
    deviation: Option<f64>,
    kind: &'static str,
    tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl Check {
    fn measured(name: &'static str, kind: &'static str, deviation: f64, tolerance: f64) -> Self {
        let ok = deviation <= tolerance;
        Check {
            name,
            status: if ok { Status::Pass } else { Status::Fail },
            deviation: deviation.is_finite().then_some(deviation),
            kind,
            tolerance,
            note: None,
        }
    }

    fn note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

#[derive(Serialize)]
struct VerifyFile<'a> {
    config: &'a VerifyConfig,
    unitary: UnitarySource,
    commutator_norm: f64,
    checks: &'a [Check],
    max_relative_deviation: Option<f64>,
    passed: bool,
}

fn rel_ln(ln_a: f64, ln_b: f64) -> f64 {
    (ln_a - ln_b).exp_m1().abs()
}

pub fn run(g: &Globals) -> CliResult<u8> {
    let mut cfg: VerifyConfig = load(&g.config)?;
    cfg.protocol.absolutize(&base_dir(&g.config)?);
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    cfg.t_final.get_or_insert(2.0 * cfg.protocol.temperature);

    let p = cfg.protocol.build(false)?;
    let beta = p.beta;
    let beta_f = 1.0 / cfg.t_final.unwrap_or_default();
    let initial = ThermalSpec::new(p.schedule.initial_hamiltonian()?, beta)?;
    let final_ = ThermalSpec::new(p.schedule.final_hamiltonian()?, beta)?;
    let final_cross = ThermalSpec::with_spectrum(final_.hamiltonian().clone(), final_.spectrum().clone(), beta_f)?;
    let ln_ratio = final_.ln_partition_function() - initial.ln_partition_function();

    let mut checks = Vec::new();
    checks.push(Check::measured("unitarity", "max |U^dag U - I|", p.u.unitarity_deviation(), UNITARITY_TOL));

    let q = TransitionMatrix::from_spectra(initial.spectrum(), final_.spectrum(), &p.u)?;
    checks.push(Check::measured(
        "doubly_stochastic",
        "max |row or column sum - 1|",
        q.stochasticity_deviation(),
        STOCHASTIC_TOL,
    ));

    let ln_avg = q.ln_generalized_average(beta, beta);
    checks.push(Check::measured("jarzynski", "relative", rel_ln(ln_avg, ln_ratio), AVERAGE_REL_TOL));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    for _ in 0..cfg.random_unitaries {
        let v = random_unitary(&mut rng, initial.hamiltonian().register());
        let qv = TransitionMatrix::from_spectra(initial.spectrum(), final_.spectrum(), &v)?;
        worst = worst.max(rel_ln(qv.ln_generalized_average(beta, beta), ln_ratio));
    }
    checks.push(
        Check::measured("jarzynski_random_unitaries", "relative", worst, AVERAGE_REL_TOL)
            .note(format!("worst of {} Haar unitaries", cfg.random_unitaries)),
    );

    let ln_cross = final_cross.ln_partition_function() - initial.ln_partition_function();
    let ln_tasaki = ln_tasaki_average(&initial, &final_cross, &p.u)?;
    checks.push(
        Check::measured("tasaki", "relative", rel_ln(ln_tasaki, ln_cross), AVERAGE_REL_TOL)
            .note(format!("beta_i = {beta}, beta_f = {beta_f}")),
    );

    let direct = relative_entropy_to_thermal(final_.state(), &initial)?;
    let via = relative_entropy_via_work(&initial, &final_, &p.u)?;
    let routes_tol = if p.source == UnitarySource::Exact { ROUTES_EXACT_TOL } else { ROUTES_APPROX_TOL };
    checks.push(
        Check::measured("relative_entropy_routes", "absolute", (direct - via).abs(), routes_tol)
            .note(format!("direct {direct}, via work {via}")),
    );

    if p.commutator_norm <= COMMUTATOR_TOLERANCE {
        let exact = exact_evolution(&p.schedule)?;
        let trotter = trotter_evolution(&p.schedule)?;
        let delta = final_.hamiltonian() - initial.hamiltonian();
        let bound = p.schedule.dt() * operator_norm(delta.matrix()) + UNITARITY_TOL;
        checks.push(
            Check::measured(
                "exact_vs_trotter",
                "operator norm",
                trotter.operator_norm_distance(&exact),
                bound,
            )
            .note("tolerance is the first-order bound dt ||H_f - H_i||".into()),
        );
    } else {
        checks.push(Check {
            name: "exact_vs_trotter",
            status: Status::Skipped,
            deviation: None,
            kind: "operator norm",
            tolerance: 0.0,
            note: Some(format!("schedule does not commute (max |[H(a),H(b)]| = {:e})", p.commutator_norm)),
        });
    }

    let failed: Vec<&str> = checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name).collect();
    let max_rel = checks
        .iter()
        .filter(|c| c.kind == "relative")
        .filter_map(|c| c.deviation)
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
    let file = VerifyFile {
        config: &cfg,
        unitary: p.source,
        commutator_norm: p.commutator_norm,
        checks: &checks,
        max_relative_deviation: max_rel,
        passed: failed.is_empty(),
    };
    let path = write(&g.out, "verify.json", &json_bytes(&file))?;
    for c in &checks {
        let dev = c.deviation.map_or("-".to_string(), |d| format!("{d:.3e}"));
        println!("{:<27} {:<7} {dev} (tol {:.1e})", c.name, format!("{:?}", c.status).to_lowercase(), c.tolerance);
    }
    println!("-> {}", path.display());
    if failed.is_empty() {
        Ok(0)
    } else {
        Err(CliError::Numerical(format!("identity check failed: {}", failed.join(", "))))
    }
}
