use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    direct_distance, require_thermal, work_distance, Route, ThermalPoint, WitnessOptions, WitnessReport, WitnessState,
};
use crate::error::{Error, Result};
use crate::spin::{build_xxz, Boundary, XXZParams};
use crate::thermo::log_sum_exp;
use crate::work::{ramp_evolution, TransitionMatrix};

/// Evenly spaced values `min, min + step, …` up to `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let a = Axis { min, max, step };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.min, self.max, self.step].iter().all(|x| x.is_finite()) {
            return Err(Error::param("axis bounds and step must be finite"));
        }
        if self.step <= 0.0 {
            return Err(Error::param(format!("axis step must be > 0, got {}", self.step)));
        }
        if self.max < self.min {
            return Err(Error::param(format!("axis max {} is below min {}", self.max, self.min)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, k: usize) -> f64 {
        self.min + k as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.value(k)).collect()
    }
}

/// `(B, Jz, T)` grid of thermal chain states `ρ*` with `J`, `n` and the
/// boundary held fixed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub n: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(rename = "B")]
    pub b: Axis,
    #[serde(rename = "Jz")]
    pub jz: Axis,
    #[serde(rename = "T")]
    pub t: Axis,
}

impl SweepGrid {
    /// Fine grid for three sites, coarser for larger chains.
    pub fn default_for(n: usize) -> Self {
        let step = if n <= 3 { 0.02 } else { 0.05 };
        SweepGrid {
            n,
            j: 1.0,
            boundary: Boundary::Periodic,
            b: Axis { min: 0.0, max: 1.2, step },
            jz: Axis { min: 0.0, max: 1.0, step },
            t: Axis { min: 0.01, max: 2.0, step },
        }
    }

    pub fn validate(&self) -> Result<()> {
        for a in [&self.b, &self.jz, &self.t] {
            a.validate()?;
        }
        if self.t.min <= 0.0 {
            return Err(Error::param("temperatures must be > 0"));
        }
        XXZParams::new(self.n, self.j, 0.0, 0.0, self.boundary)?;
        Ok(())
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.b.len() * self.jz.len() * self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of `(B, Jz, T)`; `T` varies fastest.
    pub fn index(&self, ib: usize, ijz: usize, it: usize) -> usize {
        (ib * self.jz.len() + ijz) * self.t.len() + it
    }

    fn params(&self, b: f64, jz: f64) -> XXZParams {
        XXZParams {
            n: self.n,
            j: self.j,
            jz,
            b,
            boundary: self.boundary,
            dm: None,
        }
    }
}

/// Target state and closest separable reference shared by every point.
#[derive(Clone, Debug)]
pub struct SweepReference {
    pub rho: WitnessState,
    pub sigma_ref: WitnessState,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub options: WitnessOptions,
    /// Ordered as [`SweepGrid::index`].
    pub reports: Vec<WitnessReport>,
}

impl SweepResult {
    pub fn report(&self, ib: usize, ijz: usize, it: usize) -> &WitnessReport {
        &self.reports[self.grid.index(ib, ijz, it)]
    }

    pub fn detected_count(&self) -> usize {
        self.reports.iter().filter(|r| r.detected).count()
    }

    /// Detection flags along the temperature axis at fixed `(B, Jz)`.
    pub fn temperature_profile(&self, ib: usize, ijz: usize) -> Vec<bool> {
        (0..self.grid.t.len()).map(|it| self.report(ib, ijz, it).detected).collect()
    }

    /// Highest grid temperature detected at fixed `(B, Jz)`, if any.
    pub fn max_detected_temperature(&self, ib: usize, ijz: usize) -> Option<f64> {
        self.temperature_profile(ib, ijz)
            .iter()
            .rposition(|&d| d)
            .map(|it| self.grid.t.value(it))
    }

    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "B,Jz,T,s_left,s_right,margin,detected")?;
        for r in &self.reports {
            let p = r.rho_star.expect("sweep reports carry their grid point");
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                crate::fmt_f64(p.params.b),
                crate::fmt_f64(p.params.jz),
                crate::fmt_f64(p.temperature),
                crate::fmt_f64(r.s_left),
                crate::fmt_f64(r.s_right),
                crate::fmt_f64(r.margin),
                r.detected
            )?;
        }
        Ok(())
    }
}

/// Evaluates the witness at every grid point, with `ρ*` the Gibbs state of
/// the chain at `(B, Jz)` and temperature `T`. Each `(B, Jz)` column is
/// diagonalized once and reused along the temperature axis; columns run in
/// parallel and results come back in grid order.
pub fn sweep_detection(grid: &SweepGrid, reference: &SweepReference, opts: &WitnessOptions) -> Result<SweepResult> {
    grid.validate()?;
    let register = grid.params(0.0, 0.0).register()?;
    let rho = &reference.rho;
    register.ensure_same(&rho.density().register())?;
    register.ensure_same(&reference.sigma_ref.density().register())?;

    let s_left = match opts.route {
        Route::Direct => direct_distance(rho, &reference.sigma_ref)?,
        Route::ViaWork => work_distance(
            require_thermal(rho, "the target state")?,
            require_thermal(&reference.sigma_ref, "the reference state")?,
            &opts.ramp,
        )?,
    };
    let neg_entropy = rho.neg_entropy()?;
    let temps = grid.t.values();

    let columns: Vec<(usize, usize)> = (0..grid.b.len())
        .flat_map(|ib| (0..grid.jz.len()).map(move |ijz| (ib, ijz)))
        .collect();
    let per_column = columns
        .par_iter()
        .map(|&(ib, ijz)| {
            let params = grid.params(grid.b.value(ib), grid.jz.value(ijz));
            let h = build_xxz(&params)?;
            let spectrum = h.spectrum()?;
            let energy = rho.density().expectation(&h);
            let column_route = match opts.route {
                Route::Direct => None,
                Route::ViaWork => {
                    let target = require_thermal(rho, "the target state")?;
                    let u = ramp_evolution(&h, target.hamiltonian(), &opts.ramp)?;
                    let t = TransitionMatrix::from_spectra(&spectrum, target.spectrum(), &u)?;
                    Some((target, t))
                }
            };
            let reports = temps
                .iter()
                .map(|&temp| {
                    let beta = temp.recip();
                    let s_right = match &column_route {
                        None => {
                            let ln_z = log_sum_exp(spectrum.eigenvalues().iter().map(|&e| -beta * e));
                            (neg_entropy + beta * energy + ln_z).max(0.0)
                        }
                        Some((target, t)) => {
                            let delta_beta_h = target.beta() * target.mean_energy() - beta * energy;
                            -delta_beta_h - t.ln_generalized_average(beta, target.beta())
                        }
                    };
                    WitnessReport::new(s_left, s_right, opts.route, opts.strictness)
                        .with_rho_star(ThermalPoint { params, temperature: temp })
                })
                .collect::<Vec<_>>();
            Ok(reports)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult {
        grid: *grid,
        options: *opts,
        reports: per_column.into_iter().flatten().collect(),
    })
}
