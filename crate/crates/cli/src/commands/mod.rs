pub mod sample;
pub mod sweep;
pub mod verify;
pub mod witness;

use std::path::PathBuf;

use entwit::Route;

/// Flags that apply to every verb.
#[derive(Clone, Debug)]
pub struct Globals {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub route: Option<Route>,
}

fn default_strictness() -> f64 {
    entwit::witness::STRICTNESS_EPSILON
}

fn default_random_unitaries() -> usize {
    20
}
