//! Zeno and anti-Zeno control of Schrödinger-cat decoherence in a damped
//! harmonic oscillator coupled to an Ohmic reservoir.
//!
//! The crate is organised bottom-up:
//!
//! * [`reservoir`]: spectral density, thermal occupation, `κ^β(ω)`
//! * [`coefficients`]: non-Markovian coefficients and measurement-modified rates
//! * [`states`]: the even coherent state in QCF, number and Fock representations
//! * [`dynamics`]: closed-form evolution (QCF recursion, Wigner function, `P_n(t)`)
//! * [`oracle`]: brute-force Fock-space propagation used to certify the closed forms
//! * [`verify`]: the certification suite

pub mod coefficients;
pub mod dynamics;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod reservoir;
pub mod states;
pub mod verify;

pub use coefficients::{
    analytic_gamma_minus, delta_of_t, gamma_of_t, high_temperature_gamma_minus, measured_rates, rates_by_time_average,
    shutter_integrals, CoefficientCurve, RateSet, ShutterIntegrals,
};
pub use dynamics::{
    analytic_wigner, ln_peak_ratio, pn_closed_form, pn_evolution, recursive_qcf, wigner_peak, EvolutionKernels, PeakMode,
    PhaseGrid, ShutterSchedule, WignerField,
};
pub use error::{Error, Result};
pub use oracle::{
    apply_projection, integrate_rate_equation, propagate_markov, propagate_measured, propagate_nonmarkov, propagate_shuttered, PropagationConfig,
    Scenario,
};
pub use reservoir::{kappa_beta, ohmic_density, thermal_occupation, ReservoirSpec, SpectralKind, ThermalModel};
pub use states::{cat_density_matrix, cat_number_distribution, cat_qcf, CatState, FockDensityMatrix, NumberDistribution};
pub use verify::{run_verification, VerifyOptions, VerifyReport};
