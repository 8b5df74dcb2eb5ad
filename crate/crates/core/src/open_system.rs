//! A driven subsystem `S` coupled to a bath `B`, `H = H_S + H_SB + H_B`.
//!
//! The equilibrium state of `S` at inverse temperature β is the Gibbs state
//! of the effective Hamiltonian
//! `H^eff = −β⁻¹ ln[tr_B e^{−βH} / Z_B]`, whose partition function is
//! `Z_S = Y/Z_B` with `Y = tr e^{−βH}`. Work is measured on the whole system;
//! the full evolution is unitary and the bath is not rethermalized during
//! the drive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    decompose_matrix, embed_operator, partial_trace_matrix, HermitianOperator, QubitRegister, UnitaryOperator,
};
use crate::spin::DrivingSchedule;
use crate::thermo::{relative_entropy, relative_entropy_to_thermal, ThermalSpec};
use crate::witness::{Route, WitnessReport, WitnessOptions};
use crate::work::{jarzynski_average, ln_tasaki_average, ramp_evolution, relative_entropy_via_work};

/// Largest register handled here.
pub const MAX_COMPOSITE_QUBITS: usize = 10;

/// Largest entry-wise mismatch tolerated between the bath and coupling terms
/// of two composite systems that are meant to share them.
pub const SHARED_TERM_TOLERANCE: f64 = 1e-12;

/// Which sites belong to the subsystem and which to the bath.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partition {
    pub subsystem: Vec<usize>,
    pub bath: Vec<usize>,
}

impl Partition {
    /// Sorts both site lists and checks they are disjoint and cover `1..=n`.
    pub fn new(mut subsystem: Vec<usize>, mut bath: Vec<usize>) -> Result<Self> {
        subsystem.sort_unstable();
        bath.sort_unstable();
        if subsystem.is_empty() {
            return Err(Error::param("subsystem needs at least one site"));
        }
        let n = subsystem.len() + bath.len();
        if n > MAX_COMPOSITE_QUBITS {
            return Err(Error::param(format!(
                "composite systems are limited to {MAX_COMPOSITE_QUBITS} qubits, got {n}"
            )));
        }
        let mut all: Vec<usize> = subsystem.iter().chain(&bath).copied().collect();
        all.sort_unstable();
        if all != (1..=n).collect::<Vec<_>>() {
            return Err(Error::param(format!(
                "subsystem {subsystem:?} and bath {bath:?} must be disjoint and cover sites 1..={n}"
            )));
        }
        Ok(Partition { subsystem, bath })
    }

    pub fn register(&self) -> Result<QubitRegister> {
        QubitRegister::new(self.subsystem.len() + self.bath.len())
    }

    pub fn subsystem_register(&self) -> Result<QubitRegister> {
        QubitRegister::new(self.subsystem.len())
    }

    /// `None` for an empty bath.
    pub fn bath_register(&self) -> Result<Option<QubitRegister>> {
        if self.bath.is_empty() {
            Ok(None)
        } else {
            QubitRegister::new(self.bath.len()).map(Some)
        }
    }
}

/// Partition functions of a composite system at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SubsystemPartition {
    /// `ln tr e^{−βH}` over the full space.
    pub ln_y: f64,
    /// `ln tr e^{−βH_B}`; zero for an empty bath.
    pub ln_z_b: f64,
    /// `ln Z_S = ln Y − ln Z_B`.
    pub ln_z_s: f64,
}

impl SubsystemPartition {
    pub fn y(&self) -> f64 {
        self.ln_y.exp()
    }

    pub fn z_b(&self) -> f64 {
        self.ln_z_b.exp()
    }

    pub fn z_s(&self) -> f64 {
        self.ln_z_s.exp()
    }
}

/// Subsystem, coupling and bath Hamiltonians at one instant. `h_s` acts on
/// the subsystem sites in ascending order, `h_b` on the bath sites in
/// ascending order, `h_sb` on the full register.
#[derive(Clone, Debug)]
pub struct CompositeSystem {
    partition: Partition,
    h_s: HermitianOperator,
    h_sb: HermitianOperator,
    h_b: Option<HermitianOperator>,
    beta: f64,
}

impl CompositeSystem {
    pub fn new(
        partition: Partition,
        h_s: HermitianOperator,
        h_sb: HermitianOperator,
        h_b: Option<HermitianOperator>,
        beta: f64,
    ) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::param(format!("inverse temperature must be finite and > 0, got {beta}")));
        }
        partition.subsystem_register()?.ensure_same(&h_s.register())?;
        partition.register()?.ensure_same(&h_sb.register())?;
        match (partition.bath_register()?, &h_b) {
            (Some(r), Some(h)) => r.ensure_same(&h.register())?,
            (None, None) => {}
            (Some(_), None) => return Err(Error::param("bath sites given without a bath Hamiltonian")),
            (None, Some(_)) => return Err(Error::param("bath Hamiltonian given without bath sites")),
        }
        Ok(CompositeSystem {
            partition,
            h_s,
            h_sb,
            h_b,
            beta,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn h_s(&self) -> &HermitianOperator {
        &self.h_s
    }

    pub fn h_sb(&self) -> &HermitianOperator {
        &self.h_sb
    }

    pub fn h_b(&self) -> Option<&HermitianOperator> {
        self.h_b.as_ref()
    }

    /// Same bath and coupling, new subsystem Hamiltonian.
    pub fn with_subsystem_hamiltonian(&self, h_s: HermitianOperator) -> Result<Self> {
        Self::new(self.partition.clone(), h_s, self.h_sb.clone(), self.h_b.clone(), self.beta)
    }

    /// `H = H_S ⊗ I_B + H_SB + I_S ⊗ H_B` on the full register.
    pub fn total_hamiltonian(&self) -> Result<HermitianOperator> {
        let register = self.partition.register()?;
        let mut m = embed_operator(register, &self.partition.subsystem, self.h_s.matrix())?;
        m += self.h_sb.matrix();
        if let Some(h_b) = &self.h_b {
            m += embed_operator(register, &self.partition.bath, h_b.matrix())?;
        }
        HermitianOperator::new(register, m)
    }

    fn ln_z_b(&self) -> Result<f64> {
        match &self.h_b {
            Some(h) => Ok(ThermalSpec::new(h.clone(), self.beta)?.ln_partition_function()),
            None => Ok(0.0),
        }
    }

    /// `Y`, `Z_B` and `Z_S = Y/Z_B`.
    pub fn subsystem_partition(&self) -> Result<SubsystemPartition> {
        let ln_y = ThermalSpec::new(self.total_hamiltonian()?, self.beta)?.ln_partition_function();
        let ln_z_b = self.ln_z_b()?;
        Ok(SubsystemPartition {
            ln_y,
            ln_z_b,
            ln_z_s: ln_y - ln_z_b,
        })
    }

    /// `H^eff = −β⁻¹ ln[tr_B e^{−βH} / Z_B]` on the subsystem.
    pub fn effective_hamiltonian(&self) -> Result<HermitianOperator> {
        let h = self.total_hamiltonian()?;
        let spectrum = h.spectrum()?;
        let e_min = spectrum.min();
        let shifted: Vec<f64> = spectrum.eigenvalues().iter().map(|&e| (-self.beta * (e - e_min)).exp()).collect();
        let reduced = partial_trace_matrix(&spectrum.compose(&shifted), h.register(), &self.partition.subsystem)?;
        let reduced_spectrum = decompose_matrix(&reduced)?;
        if let Some(&low) = reduced_spectrum.eigenvalues().first() {
            if low <= 0.0 {
                return Err(Error::UndefinedFunction { eigenvalue: low });
            }
        }
        // ln tr_B e^{−βH} = ln(reduced) − β E_min
        let shift = -self.beta * e_min - self.ln_z_b()?;
        let beta = self.beta;
        let m = reduced_spectrum.map_real(|x| -(x.ln() + shift) / beta)?;
        HermitianOperator::new(self.partition.subsystem_register()?, crate::operator::symmetrize(m))
    }

    /// Gibbs state of `H^eff`, i.e. the reduced equilibrium state of `S`.
    pub fn subsystem_equilibrium(&self) -> Result<ThermalSpec> {
        ThermalSpec::new(self.effective_hamiltonian()?, self.beta)
    }

    fn ensure_shares_environment(&self, other: &CompositeSystem) -> Result<()> {
        if self.partition != other.partition {
            return Err(Error::param("composite systems use different partitions"));
        }
        if self.beta != other.beta {
            return Err(Error::param("composite systems are at different temperatures"));
        }
        let coupling = self.h_sb.max_abs_diff(&other.h_sb);
        let bath = match (&self.h_b, &other.h_b) {
            (Some(a), Some(b)) => a.max_abs_diff(b),
            _ => 0.0,
        };
        if coupling > SHARED_TERM_TOLERANCE || bath > SHARED_TERM_TOLERANCE {
            return Err(Error::param("only the subsystem Hamiltonian may differ between the two composite systems"));
        }
        Ok(())
    }
}

/// A composite system whose subsystem Hamiltonian follows a driving schedule.
#[derive(Clone, Debug)]
pub struct DrivenComposite {
    pub schedule: DrivingSchedule,
    pub environment: CompositeSystem,
}

impl DrivenComposite {
    /// The composite system at Trotter step `step` of the schedule.
    pub fn at(&self, step: usize) -> Result<CompositeSystem> {
        self.environment.with_subsystem_hamiltonian(self.schedule.hamiltonian_at(step)?)
    }

    pub fn initial(&self) -> Result<CompositeSystem> {
        self.environment.with_subsystem_hamiltonian(self.schedule.initial_hamiltonian()?)
    }

    pub fn final_(&self) -> Result<CompositeSystem> {
        self.environment.with_subsystem_hamiltonian(self.schedule.final_hamiltonian()?)
    }
}

/// Open-system witness with both sides computed on the subsystem.
///
/// The target `ρ_S` is the equilibrium state of `final_`, the reference
/// `σ_S` the equilibrium state of `initial`; `u` drives the full system from
/// one to the other. `rho_star` is a Gibbs state on the subsystem. On the
/// work route the left side is
/// `−β tr[ρ_S (H^eff_f − H^eff_i)] − ln⟨e^{−β𝒲}⟩` with the average taken over
/// the full system.
pub fn open_witness(
    initial: &CompositeSystem,
    final_: &CompositeSystem,
    u: &UnitaryOperator,
    rho_star: &ThermalSpec,
    opts: &WitnessOptions,
) -> Result<WitnessReport> {
    initial.ensure_shares_environment(final_)?;
    initial.partition.register()?.ensure_same(&u.register())?;
    initial
        .partition
        .subsystem_register()?
        .ensure_same(&rho_star.hamiltonian().register())?;

    let sigma_s = initial.subsystem_equilibrium()?;
    let rho_s = final_.subsystem_equilibrium()?;
    let (s_left, s_right) = match opts.route {
        Route::Direct => (
            relative_entropy(rho_s.state(), sigma_s.state())?,
            relative_entropy_to_thermal(rho_s.state(), rho_star)?,
        ),
        Route::ViaWork => {
            let beta = initial.beta;
            let full_i = ThermalSpec::new(initial.total_hamiltonian()?, beta)?;
            let full_f = ThermalSpec::new(final_.total_hamiltonian()?, beta)?;
            let ln_avg = ln_tasaki_average(&full_i, &full_f, u)?;
            let delta_h = rho_s.mean_energy() - rho_s.state().expectation(sigma_s.hamiltonian());
            let left = -beta * delta_h - ln_avg;
            let ramp_u = ramp_evolution(rho_star.hamiltonian(), rho_s.hamiltonian(), &opts.ramp)?;
            (left, relative_entropy_via_work(rho_star, &rho_s, &ramp_u)?)
        }
    };
    Ok(WitnessReport::new(s_left, s_right, opts.route, opts.strictness))
}

/// `⟨e^{−β𝒲}⟩` over the full system for a protocol between two composite
/// systems.
pub fn full_system_jarzynski(initial: &CompositeSystem, final_: &CompositeSystem, u: &UnitaryOperator) -> Result<f64> {
    initial.ensure_shares_environment(final_)?;
    jarzynski_average(initial.beta, &initial.total_hamiltonian()?, &final_.total_hamiltonian()?, u)
}
