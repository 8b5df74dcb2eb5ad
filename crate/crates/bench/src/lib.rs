//! Fixtures shared by the benchmarks.

use entwit::witness::{css_thermal_params_3, sigma_prime_thermal_params_7};
use entwit::{DrivingSchedule, ThermalSpec, XXZParams};

pub const BETA: f64 = 100.0;

/// Three sites, from the closest-separable stand-in to `B = 0.5, Jz = 0`.
pub fn three_site_protocol() -> DrivingSchedule {
    DrivingSchedule::linear(
        css_thermal_params_3(BETA, 1.0).unwrap(),
        XXZParams::periodic(3, 1.0, 0.0, 0.5).unwrap(),
    )
    .unwrap()
}

/// Seven sites, `B` ramped from the `σ′` stand-in down to 0.92.
pub fn seven_site_protocol() -> DrivingSchedule {
    DrivingSchedule::linear(
        sigma_prime_thermal_params_7(BETA, 1.0).unwrap(),
        XXZParams::periodic(7, 1.0, 0.0, 0.92).unwrap(),
    )
    .unwrap()
}

/// Seven sites with `Jz` driven too, so the Trotter product cannot be
/// skipped.
pub fn seven_site_noncommuting() -> DrivingSchedule {
    DrivingSchedule::linear(
        XXZParams::periodic(7, 1.0, 0.3, 1.0).unwrap(),
        XXZParams::periodic(7, 1.0, 0.0, 0.92).unwrap(),
    )
    .unwrap()
}

pub fn endpoints(s: &DrivingSchedule) -> (ThermalSpec, ThermalSpec) {
    (
        ThermalSpec::new(s.initial_hamiltonian().unwrap(), BETA).unwrap(),
        ThermalSpec::new(s.final_hamiltonian().unwrap(), BETA).unwrap(),
    )
}
