//! Closed-form evolution of the cat under measurement-modified or shuttered
//! damping: recursive QCF, Wigner function, interference peak and `P_n(t)`.
//!
//! Both the QCF and the number distribution are those of a mixture of
//! displaced thermal states. With `s² = e^{−b_τ t}` and thermal width `a`,
//!
//! ```text
//! W^{±α}(β) = 2𝒩/(π(2a+1)) exp[−2|β ∓ αs|²/(2a+1)]
//! W_I(β)    = 4𝒩/(π(2a+1)) exp[−2|β|²/(2a+1)] exp[−2α² + 2α²s²/(2a+1)] cos[4αs β_i/(2a+1)]
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::coefficients::{shutter_integrals, RateSet, ShutterIntegrals};
use crate::error::{Error, Result};
use crate::reservoir::ReservoirSpec;
use crate::states::{cat_qcf, ln_factorials, CatState, NumberDistribution};

/// Interference amplitude, in units of `𝒩/π`, confirmed against the
/// Fourier transform of the QCF.
pub const INTERFERENCE_AMPLITUDE: f64 = 4.0;

/// Negative `P_n` beyond this magnitude is logged as a cancellation problem.
const NEGATIVITY_WARNING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShutterSchedule {
    pub tau: f64,
    pub m: usize,
}

impl ShutterSchedule {
    pub fn new(tau: f64, m: usize) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau,
                reason: "must be finite and positive",
            });
        }
        Ok(ShutterSchedule { tau, m })
    }

    pub fn time(&self) -> f64 {
        self.m as f64 * self.tau
    }
}

/// Where the thermal width `a_t` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WidthModel {
    /// `a_t = (γ₋₁/b_τ)(1 − e^{−b_τ t})`, the solution of the rate equations.
    RateEquation,
    /// `a_t = f_{t/τ}(τ) − (1 − e^{−b_τ t})/2`, read off the recursive QCF.
    ShutterRecursion(ShutterIntegrals),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionKernels {
    pub rates: RateSet,
    pub b_tau: f64,
    pub width: WidthModel,
}

impl EvolutionKernels {
    pub fn from_rates(rates: RateSet) -> Self {
        EvolutionKernels {
            rates,
            b_tau: rates.damping(),
            width: WidthModel::RateEquation,
        }
    }

    /// Kernels matching the recursive QCF; `b_τ = Γ(τ)/τ`.
    pub fn from_shutter(rates: RateSet) -> Result<Self> {
        let shutter = rates
            .shutter
            .ok_or_else(|| Error::Precondition("rate set carries no shutter integrals".into()))?;
        Ok(EvolutionKernels {
            rates,
            b_tau: shutter.big_gamma_tau / rates.tau,
            width: WidthModel::ShutterRecursion(shutter),
        })
    }

    /// `e^{−b_τ t}`
    pub fn decay(&self, t: f64) -> f64 {
        (-self.b_tau * t).exp()
    }

    /// `(1 − e^{−bt})/b`, continuous at `b = 0`.
    fn relaxed_time(&self, t: f64) -> f64 {
        let x = self.b_tau * t;
        if x.abs() < 1e-300 {
            t
        } else {
            -(-x).exp_m1() / self.b_tau
        }
    }

    pub fn a_t(&self, t: f64) -> f64 {
        match self.width {
            WidthModel::RateEquation => self.rates.gamma_minus * self.relaxed_time(t),
            WidthModel::ShutterRecursion(sh) => {
                let f = f_m(t / self.rates.tau, &sh);
                f + 0.5 * (-self.b_tau * t).exp_m1()
            }
        }
    }

    /// `lim_{t→∞} a_t = γ₋₁/b_τ`
    pub fn stationary_mean(&self) -> f64 {
        match self.width {
            WidthModel::RateEquation => self.rates.gamma_minus / self.b_tau,
            WidthModel::ShutterRecursion(sh) => sh.delta_gamma_tau / -(-sh.big_gamma_tau).exp_m1() - 0.5,
        }
    }
}

/// `f_m(τ) = Δ_Γ(τ)(1 − e^{−mΓ(τ)})/(1 − e^{−Γ(τ)})`, with `m` allowed to be
/// fractional and the `Γ(τ) → 0` limit `m Δ_Γ(τ)`.
pub fn f_m(m: f64, shutter: &ShutterIntegrals) -> f64 {
    let g = shutter.big_gamma_tau;
    if g == 0.0 {
        m * shutter.delta_gamma_tau
    } else {
        shutter.delta_gamma_tau * (-m * g).exp_m1() / (-g).exp_m1()
    }
}

/// `χ_m(ξ) = exp[−f_m|ξ|²] χ₀(e^{−mΓ(τ)/2} ξ)` for given shutter integrals.
pub fn qcf_after(xi: Complex64, m: f64, shutter: &ShutterIntegrals, cat: &CatState) -> Complex64 {
    let scale = (-0.5 * m * shutter.big_gamma_tau).exp();
    (-f_m(m, shutter) * xi.norm_sqr()).exp() * cat_qcf(xi * scale, cat)
}

pub fn recursive_qcf(xi: Complex64, schedule: ShutterSchedule, cat: &CatState, spec: &ReservoirSpec) -> Result<Complex64> {
    let shutter = shutter_integrals(schedule.tau, spec)?;
    Ok(qcf_after(xi, schedule.m as f64, &shutter, cat))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerComponents {
    pub lobe_plus: f64,
    pub lobe_minus: f64,
    pub interference: f64,
}

impl WignerComponents {
    pub fn total(&self) -> f64 {
        self.lobe_plus + self.lobe_minus + self.interference
    }
}

/// Wigner components with the interference amplitude given in units of `𝒩/π`.
pub fn wigner_components_with_amplitude(beta: Complex64, t: f64, kernels: &EvolutionKernels, cat: &CatState, amplitude: f64) -> WignerComponents {
    let a = kernels.a_t(t);
    let s2 = kernels.decay(t);
    let s = s2.sqrt();
    let w = 2.0 * a + 1.0;
    let alpha = cat.alpha;
    let lobe = |shift: f64| 2.0 * cat.norm / (PI * w) * (-2.0 * (beta - Complex64::new(shift, 0.0)).norm_sqr() / w).exp();
    let interference = amplitude * cat.norm / (PI * w)
        * (-2.0 * beta.norm_sqr() / w - 2.0 * alpha * alpha * (1.0 - s2 / w)).exp()
        * (4.0 * alpha * s * beta.im / w).cos();
    WignerComponents {
        lobe_plus: lobe(alpha * s),
        lobe_minus: lobe(-alpha * s),
        interference,
    }
}

pub fn wigner_components(beta: Complex64, t: f64, kernels: &EvolutionKernels, cat: &CatState) -> WignerComponents {
    wigner_components_with_amplitude(beta, t, kernels, cat, INTERFERENCE_AMPLITUDE)
}

pub fn analytic_wigner(beta: Complex64, t: f64, kernels: &EvolutionKernels, cat: &CatState) -> f64 {
    wigner_components(beta, t, kernels, cat).total()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeakMode {
    /// `W_I(0, t)`
    Exact,
    /// `(4𝒩/π) exp[−2γ₋₁(1+2α²)t]`
    ShortTime,
}

/// `ln[W_peak(t)/W_peak(0)]`; finite even when the peak itself underflows.
pub fn ln_peak_ratio(t: f64, kernels: &EvolutionKernels, cat: &CatState, mode: PeakMode) -> f64 {
    let a2 = cat.alpha * cat.alpha;
    match mode {
        PeakMode::Exact => {
            let w = 2.0 * kernels.a_t(t) + 1.0;
            -w.ln() - 2.0 * a2 * (1.0 - kernels.decay(t) / w)
        }
        PeakMode::ShortTime => -2.0 * kernels.rates.gamma_minus * (1.0 + 2.0 * a2) * t,
    }
}

pub fn wigner_peak(t: f64, kernels: &EvolutionKernels, cat: &CatState, mode: PeakMode) -> f64 {
    INTERFERENCE_AMPLITUDE * cat.norm / PI * ln_peak_ratio(t, kernels, cat, mode).exp()
}

/// Closed-form `P_n(t)` with precomputed `ln k!` for `k ≤ n`.
fn pn_with_table(n: usize, t: f64, kernels: &EvolutionKernels, cat: &CatState, lf: &[f64]) -> f64 {
    let a = kernels.a_t(t);
    let s2 = kernels.decay(t);
    let a2 = cat.alpha * cat.alpha;
    let big_a = a + 1.0;
    let ln_x = (a / big_a).ln();
    let ln_y = (a2 * s2).ln() - 2.0 * big_a.ln();
    let k = (1.0 - s2 / big_a) * a2;
    // only j = 0 survives at a = 0 and only j = n at α²s² = 0
    let term = |j: usize| -> f64 {
        let mut v = lf[n] - lf[j] - 2.0 * lf[n - j];
        if j > 0 {
            v += j as f64 * ln_x;
        }
        if n > j {
            v += (n - j) as f64 * ln_y;
        }
        v
    };
    let mut terms: Vec<(f64, bool)> = (0..=n).map(|j| (term(j), (n - j) % 2 == 1)).filter(|(v, _)| v.is_finite()).collect();
    if terms.is_empty() {
        return 0.0;
    }
    terms.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let top = terms.last().unwrap().0;
    let (mut plain, mut signed) = (0.0, 0.0);
    for (v, odd) in &terms {
        let x = (v - top).exp();
        plain += x;
        signed += if *odd { -x } else { x };
    }
    let ln_pref = (2.0 * cat.norm).ln() - a2 - big_a.ln() + top + k;
    let value = ln_pref.exp() * (plain + (-2.0 * k).exp() * signed);
    if value < -NEGATIVITY_WARNING {
        log::warn!("P_{n}({t}) = {value:e} is negative beyond rounding");
    }
    value
}

/// Closed-form number distribution element `P_n(t)`.
pub fn pn_closed_form(n: usize, t: f64, kernels: &EvolutionKernels, cat: &CatState) -> f64 {
    pn_with_table(n, t, kernels, cat, &ln_factorials(n))
}

/// Truncation level that keeps the displaced-thermal tail below ~1e-12 up to `t_max`.
pub fn suggested_n_max(kernels: &EvolutionKernels, cat: &CatState, t_max: f64) -> usize {
    let a = kernels.a_t(t_max).max(kernels.a_t(0.0)).max(0.0);
    let alpha = cat.alpha.abs();
    let n = alpha * alpha + 10.0 * alpha + 28.0 * (a + 1.0) + 10.0;
    cat.default_n_max().max(n.ceil() as usize)
}

/// `P_n(t)` for `n = 0..=n_max` at each time; fails if more than `1e-8` of
/// the probability lies above `n_max`.
pub fn pn_evolution(times: &[f64], kernels: &EvolutionKernels, cat: &CatState, n_max: usize) -> Result<Vec<NumberDistribution>> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || !times.windows(2).all(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("times must be nonnegative and ascending".into()));
    }
    let lf = ln_factorials(n_max);
    times
        .par_iter()
        .map(|&t| {
            let probs: Vec<f64> = (0..=n_max).map(|n| pn_with_table(n, t, kernels, cat, &lf)).collect();
            let leaked = 1.0 - probs.iter().sum::<f64>();
            if leaked > 1e-8 {
                return Err(Error::Truncation { n_max, leaked });
            }
            Ok(NumberDistribution { probs, n_max })
        })
        .collect()
}

/// `⟨n⟩(t) = a_t + ⟨n⟩₀ e^{−b_τ t}`
pub fn mean_number(t: f64, kernels: &EvolutionKernels, cat: &CatState) -> f64 {
    kernels.a_t(t) + cat.mean_number() * kernels.decay(t)
}

/// Square phase-space lattice `β_r, β_i ∈ [−half_width, half_width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub half_width: f64,
    pub points: usize,
}

impl PhaseGrid {
    /// `[−4−α, 4+α]²` with 257 points per axis.
    pub fn default_for(cat: &CatState) -> Self {
        PhaseGrid {
            half_width: 4.0 + cat.alpha.abs(),
            points: 257,
        }
    }

    pub fn spacing(&self) -> f64 {
        if self.points < 2 {
            0.0
        } else {
            2.0 * self.half_width / (self.points - 1) as f64
        }
    }

    pub fn axis(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|i| -self.half_width + i as f64 * h).collect()
    }
}

/// Wigner function sampled on a [`PhaseGrid`]; `values[(i, j)]` is at
/// `β = axis[j] + i·axis[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    pub grid: PhaseGrid,
    pub values: DMatrix<f64>,
}

impl WignerField {
    pub fn analytic(grid: PhaseGrid, t: f64, kernels: &EvolutionKernels, cat: &CatState) -> Self {
        let axis = grid.axis();
        let rows: Vec<Vec<f64>> = axis
            .par_iter()
            .map(|&y| axis.iter().map(|&x| analytic_wigner(Complex64::new(x, y), t, kernels, cat)).collect())
            .collect();
        WignerField {
            grid,
            values: DMatrix::from_fn(grid.points, grid.points, |i, j| rows[i][j]),
        }
    }

    /// `W(β) = π⁻² ∫d²ξ e^{βξ* − β*ξ} χ(ξ)` as a separable trapezoidal sum.
    ///
    /// `chi_reach` bounds the region where `|χ|` is non-negligible and
    /// `w_reach` the region where `W` is; they fix the ξ-lattice extent and
    /// the spacing needed to keep aliased images off the grid.
    pub fn from_qcf<F>(grid: PhaseGrid, chi: F, chi_reach: f64, w_reach: f64) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let h = PI / (grid.half_width + w_reach) / 1.5;
        let half = (chi_reach / h).ceil() as usize;
        let xi: Vec<f64> = (0..=2 * half).map(|k| (k as f64 - half as f64) * h).collect();
        let n = xi.len();
        let samples: Vec<Complex64> = (0..n * n).into_par_iter().map(|k| chi(Complex64::new(xi[k / n], xi[k % n]))).collect();
        // chi_mat[(iu, iv)] = χ(u + iv)
        let chi_mat = DMatrix::from_fn(n, n, |iu, iv| samples[iu * n + iv]);
        let axis = grid.axis();
        let e_y = DMatrix::from_fn(grid.points, n, |k, iu| Complex64::from_polar(1.0, 2.0 * axis[k] * xi[iu]));
        let e_x = DMatrix::from_fn(n, grid.points, |iv, j| Complex64::from_polar(1.0, -2.0 * axis[j] * xi[iv]));
        let w = e_y * chi_mat * e_x;
        let scale = h * h / (PI * PI);
        WignerField {
            grid,
            values: w.map(|z| z.re * scale),
        }
    }

    /// Fourier transform of the shutter-recursion QCF after `m` segments.
    pub fn from_recursive_qcf(grid: PhaseGrid, m: f64, shutter: &ShutterIntegrals, cat: &CatState) -> Self {
        let s2 = (-m * shutter.big_gamma_tau).exp();
        let c = f_m(m, shutter) + 0.5 * s2;
        let displacement = cat.alpha.abs() * s2.sqrt();
        let chi_reach = displacement / c + (40.0 / c).sqrt();
        let w_reach = displacement + (40.0 * c).sqrt();
        Self::from_qcf(grid, |xi| qcf_after(xi, m, shutter, cat), chi_reach, w_reach)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn riemann_sum(&self) -> f64 {
        let h = self.grid.spacing();
        self.values.sum() * h * h
    }

    pub fn max_abs_difference(&self, other: &WignerField) -> f64 {
        (&self.values - &other.values).amax()
    }
}
