//! Reservoir spectrum, thermal occupation and the thermal spectral density.
//!
//! Units: ħ = 1 and frequencies are measured in units of the oscillator
//! frequency unless `omega_0` is set otherwise.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralKind {
    /// `J(ω) = (2ω/π) ω_c² / (ω_c² + ω²)`
    OhmicLorentzian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ThermalModel {
    /// Bose–Einstein occupation at dimensionless temperature `k_B T / ħω₀`.
    BoseEinstein { theta: f64 },
    /// Frequency-independent occupation `N(ω) ≡ n0`.
    ConstantN { n0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub spectral_kind: SpectralKind,
    pub omega_c: f64,
    pub omega_0: f64,
    pub g: f64,
    pub thermal_model: ThermalModel,
}

impl ReservoirSpec {
    pub fn new(omega_c: f64, omega_0: f64, g: f64, thermal_model: ThermalModel) -> Result<Self> {
        let spec = ReservoirSpec {
            spectral_kind: SpectralKind::OhmicLorentzian,
            omega_c,
            omega_0,
            g,
            thermal_model,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Ohmic-Lorentzian reservoir with `ω₀ = 1` and cutoff `ω_c = r`.
    pub fn ohmic(r: f64, g: f64, thermal_model: ThermalModel) -> Result<Self> {
        Self::new(r, 1.0, g, thermal_model)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, value: f64| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and positive",
                })
            }
        };
        positive("omega_c", self.omega_c)?;
        positive("omega_0", self.omega_0)?;
        positive("g", self.g)?;
        match self.thermal_model {
            ThermalModel::BoseEinstein { theta } => positive("theta", theta),
            ThermalModel::ConstantN { n0 } if !(n0.is_finite() && n0 >= 0.0) => Err(Error::InvalidParameter {
                name: "n0",
                value: n0,
                reason: "must be finite and nonnegative",
            }),
            ThermalModel::ConstantN { .. } => Ok(()),
        }
    }

    /// `r = ω_c / ω₀`
    pub fn r(&self) -> f64 {
        self.omega_c / self.omega_0
    }

    /// Markovian decay constant `Γ = 2 g² r²/(r²+1) ω₀`.
    pub fn big_gamma(&self) -> f64 {
        let r2 = self.r() * self.r();
        2.0 * self.g * self.g * r2 / (r2 + 1.0) * self.omega_0
    }

    /// Thermal occupation at the oscillator frequency.
    pub fn n_at_omega_0(&self) -> f64 {
        // ω₀ > 0 is guaranteed by validation
        thermal_occupation(self.omega_0, self).unwrap_or(f64::NAN)
    }

    pub fn with_thermal_model(mut self, thermal_model: ThermalModel) -> Self {
        self.thermal_model = thermal_model;
        self
    }

    /// `J(ω)/ω`, finite at ω = 0.
    pub(crate) fn density_over_omega(&self, omega: f64) -> f64 {
        let wc2 = self.omega_c * self.omega_c;
        2.0 / PI * wc2 / (wc2 + omega * omega)
    }

    /// `ω N(ω)`, finite at ω = 0.
    pub(crate) fn omega_times_occupation(&self, omega: f64) -> f64 {
        match self.thermal_model {
            ThermalModel::ConstantN { n0 } => omega * n0,
            ThermalModel::BoseEinstein { theta } => {
                let scale = theta * self.omega_0;
                let x = omega / scale;
                if x == 0.0 {
                    scale
                } else if x > 700.0 {
                    0.0
                } else {
                    omega / x.exp_m1()
                }
            }
        }
    }

    /// `J(ω) N(ω)` for ω ≥ 0, evaluated without the 0·∞ at the origin.
    pub(crate) fn density_times_occupation(&self, omega: f64) -> f64 {
        self.density_over_omega(omega) * self.omega_times_occupation(omega)
    }
}

/// Ohmic spectral density with Lorentzian cutoff.
pub fn ohmic_density(omega: f64, spec: &ReservoirSpec) -> Result<f64> {
    if omega.is_nan() || omega < 0.0 {
        return Err(Error::Domain {
            what: "spectral density argument",
            value: omega,
        });
    }
    Ok(omega * spec.density_over_omega(omega))
}

pub fn thermal_occupation(omega: f64, spec: &ReservoirSpec) -> Result<f64> {
    match spec.thermal_model {
        ThermalModel::ConstantN { n0 } => Ok(n0),
        ThermalModel::BoseEinstein { theta } => {
            if omega == 0.0 {
                return Err(Error::Singularity {
                    what: "Bose-Einstein occupation",
                    value: omega,
                });
            }
            Ok(1.0 / (omega / (theta * spec.omega_0)).exp_m1())
        }
    }
}

/// Thermal spectral density `κ^β(ω)` on the whole real line, with the step
/// function taken as 0 at ω = 0.
pub fn kappa_beta(omega: f64, spec: &ReservoirSpec) -> f64 {
    if omega > 0.0 {
        omega * spec.density_over_omega(omega) + spec.density_times_occupation(omega)
    } else if omega < 0.0 {
        spec.density_times_occupation(-omega)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(r: f64, thermal: ThermalModel) -> ReservoirSpec {
        ReservoirSpec::ohmic(r, 0.1, thermal).unwrap()
    }

    #[test]
    fn density_examples() {
        let s = spec(1.0, ThermalModel::ConstantN { n0: 0.0 });
        assert_eq!(ohmic_density(0.0, &s).unwrap(), 0.0);
        assert_relative_eq!(ohmic_density(1.0, &s).unwrap(), 1.0 / PI, max_relative = 1e-15);
        assert_relative_eq!(ohmic_density(10.0, &s).unwrap(), 20.0 / (101.0 * PI), max_relative = 1e-15);
        let s = spec(3.0, ThermalModel::ConstantN { n0: 0.0 });
        assert_relative_eq!(ohmic_density(3.0, &s).unwrap(), 3.0 / PI, max_relative = 1e-15);
    }

    #[test]
    fn negative_frequency_is_a_domain_error() {
        let s = spec(1.0, ThermalModel::ConstantN { n0: 0.0 });
        assert!(matches!(ohmic_density(-0.5, &s), Err(Error::Domain { .. })));
        assert!(ohmic_density(f64::NAN, &s).is_err());
    }

    #[test]
    fn occupation_examples() {
        let cold = spec(1.0, ThermalModel::BoseEinstein { theta: 1e-6 });
        assert!(thermal_occupation(1.0, &cold).unwrap() < 1e-6);
        let s = spec(1.0, ThermalModel::BoseEinstein { theta: 1.0 / 2f64.ln() });
        assert_relative_eq!(thermal_occupation(1.0, &s).unwrap(), 1.0, max_relative = 1e-12);
        let flat = spec(1.0, ThermalModel::ConstantN { n0: 100.0 });
        assert_eq!(thermal_occupation(0.0, &flat).unwrap(), 100.0);
        assert_eq!(thermal_occupation(37.0, &flat).unwrap(), 100.0);
        assert!(matches!(thermal_occupation(0.0, &s), Err(Error::Singularity { .. })));
    }

    #[test]
    fn kappa_examples() {
        let cold = spec(2.0, ThermalModel::BoseEinstein { theta: 1e-6 });
        assert_relative_eq!(kappa_beta(1.3, &cold), ohmic_density(1.3, &cold).unwrap(), max_relative = 1e-12);
        assert!(kappa_beta(-1.3, &cold) < 1e-300);
        let flat = spec(2.0, ThermalModel::ConstantN { n0: 7.0 });
        assert_relative_eq!(kappa_beta(-1.0, &flat), ohmic_density(1.0, &flat).unwrap() * 7.0, max_relative = 1e-14);
        assert_eq!(kappa_beta(0.0, &flat), 0.0);
    }

    #[test]
    fn density_is_linear_at_origin() {
        let s = spec(5.0, ThermalModel::ConstantN { n0: 0.0 });
        let w = 1e-9;
        assert_relative_eq!(ohmic_density(w, &s).unwrap() / w, 2.0 / PI, max_relative = 1e-12);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(ReservoirSpec::ohmic(0.0, 0.1, ThermalModel::ConstantN { n0: 1.0 }).is_err());
        assert!(ReservoirSpec::ohmic(1.0, -0.1, ThermalModel::ConstantN { n0: 1.0 }).is_err());
        assert!(ReservoirSpec::ohmic(1.0, 0.1, ThermalModel::ConstantN { n0: -1.0 }).is_err());
        assert!(ReservoirSpec::ohmic(1.0, 0.1, ThermalModel::BoseEinstein { theta: 0.0 }).is_err());
    }

    proptest! {
        #[test]
        fn kappa_is_nonnegative(w in -50.0f64..50.0, r in 0.05f64..20.0, theta in 0.01f64..200.0, n0 in 0.0f64..500.0) {
            let be = spec(r, ThermalModel::BoseEinstein { theta });
            let flat = spec(r, ThermalModel::ConstantN { n0 });
            prop_assert!(kappa_beta(w, &be) >= 0.0);
            prop_assert!(kappa_beta(w, &flat) >= 0.0);
        }

        #[test]
        fn detailed_balance(w in 0.01f64..20.0, r in 0.1f64..10.0, theta in 0.2f64..50.0) {
            let be = spec(r, ThermalModel::BoseEinstein { theta });
            let ratio = kappa_beta(w, &be) / kappa_beta(-w, &be);
            let expected = (w / theta).exp();
            prop_assert!((ratio / expected - 1.0).abs() < 1e-10);
        }
    }
}
