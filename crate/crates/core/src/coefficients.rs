//! Non-Markovian master-equation coefficients and the rates they induce.
//!
//! Everything here is normalised so that, for times long compared with the
//! reservoir memory, `Δ(t) + γ(t) → Γ[N(ω₀)+1]` and `Δ(t) − γ(t) → Γ N(ω₀)`
//! with `Γ = 2g² r²/(r²+1) ω₀`. In that normalisation
//!
//! ```text
//! Δ(t) = g² ∫₀^∞ dω J(ω)[N(ω)+½] {s_t(ω−ω₀) + s_t(ω+ω₀)},   s_t(x) = sin(xt)/x
//! γ(t) = g²/2 ∫₀^∞ dω J(ω) {s_t(ω−ω₀) − s_t(ω+ω₀)}
//! γ±1(τ) = g²/2 · τ ∫_ℝ dω κ^β(ω) sinc²[(ω∓ω₀)τ/2]
//! ```
//!
//! Production paths evaluate these single-frequency integrals; the nested
//! time/frequency forms live in [`reference`] for cross-checks only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, ladder, oscillatory_tail, Estimate, Tolerance};
use crate::reservoir::ReservoirSpec;

const FREQ_REL_TOL: f64 = 1e-11;
const TIME_REL_TOL: f64 = 1e-9;
const MAX_INTERVALS: usize = 200_000;
const MAX_BREAKPOINTS: usize = 20_000;

/// Sampled coefficient curves `Δ(t)`, `γ(t)` on a time grid starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientCurve {
    pub times: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub spec: ReservoirSpec,
}

impl CoefficientCurve {
    pub fn sample(times: &[f64], spec: &ReservoirSpec) -> Result<Self> {
        if times.first() != Some(&0.0) {
            return Err(Error::Precondition("coefficient grid must start at t = 0".into()));
        }
        if !times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Precondition("coefficient grid must be strictly increasing".into()));
        }
        let pairs = times
            .par_iter()
            .map(|&t| Ok((delta_of_t(t, spec)?, gamma_of_t(t, spec)?)))
            .collect::<Result<Vec<_>>>()?;
        let (delta, gamma) = pairs.into_iter().unzip();
        Ok(CoefficientCurve {
            times: times.to_vec(),
            delta,
            gamma,
            spec: *spec,
        })
    }

    /// Constant Markovian coefficients on the same grid.
    pub fn markov(times: &[f64], spec: &ReservoirSpec) -> Self {
        let n = spec.n_at_omega_0();
        let big_gamma = spec.big_gamma();
        CoefficientCurve {
            times: times.to_vec(),
            delta: vec![big_gamma * (n + 0.5); times.len()],
            gamma: vec![0.5 * big_gamma; times.len()],
            spec: *spec,
        }
    }
}

/// Values of `Γ(τ)` and `Δ_Γ(τ)` that drive the shuttered-reservoir recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShutterIntegrals {
    pub big_gamma_tau: f64,
    pub delta_gamma_tau: f64,
}

/// Measurement- or shutter-modified rates for a given interval `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub tau: f64,
    /// γ₁(τ): downward (emission) rate
    pub gamma_plus: f64,
    /// γ₋₁(τ): upward (absorption) rate
    pub gamma_minus: f64,
    pub markov_plus: f64,
    pub markov_minus: f64,
    pub shutter: Option<ShutterIntegrals>,
}

impl RateSet {
    /// Rates without interruptions: the Markovian stationary values.
    pub fn markov(spec: &ReservoirSpec) -> Self {
        let (markov_plus, markov_minus) = markov_limits(spec);
        RateSet {
            tau: f64::INFINITY,
            gamma_plus: markov_plus,
            gamma_minus: markov_minus,
            markov_plus,
            markov_minus,
            shutter: None,
        }
    }

    pub fn with_shutter(mut self, shutter: ShutterIntegrals) -> Self {
        self.shutter = Some(shutter);
        self
    }

    /// Net damping rate `b_τ = γ₁(τ) − γ₋₁(τ)`.
    pub fn damping(&self) -> f64 {
        self.gamma_plus - self.gamma_minus
    }
}

/// `(Γ[N(ω₀)+1], Γ N(ω₀))`
pub fn markov_limits(spec: &ReservoirSpec) -> (f64, f64) {
    let big_gamma = spec.big_gamma();
    let n = spec.n_at_omega_0();
    (big_gamma * (n + 1.0), big_gamma * n)
}

#[inline]
fn sin_over(x: f64, t: f64) -> f64 {
    let y = x * t;
    if y.abs() < 1e-4 {
        t * (1.0 - y * y / 6.0)
    } else {
        y.sin() / x
    }
}

/// `τ sinc²(xτ/2) = 4 sin²(xτ/2) / (x² τ)`
#[inline]
fn sinc2_kernel(x: f64, tau: f64) -> f64 {
    let y = 0.5 * x * tau;
    if y.abs() < 1e-4 {
        tau * (1.0 - y * y / 3.0)
    } else {
        let s = y.sin();
        tau * s * s / (y * y)
    }
}

fn frequency_breakpoints(spec: &ReservoirSpec, omega_max: f64, period: f64) -> Vec<f64> {
    let start = spec.omega_0.min(spec.omega_c) / 16.0;
    let mut pts = ladder(0.0, omega_max, start, period, MAX_BREAKPOINTS);
    for feature in [spec.omega_0, spec.omega_c] {
        if feature < omega_max {
            pts.push(feature);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

fn cutoff(spec: &ReservoirSpec, t: f64) -> f64 {
    (50.0 * spec.omega_c).max(spec.omega_0 + 200.0 / t)
}

/// `∫₀^∞ dω [w₋(ω) s_t(ω−ω₀) + w₊(ω) s_t(ω+ω₀)]`
fn sinc_pair<A, B>(what: &str, t: f64, spec: &ReservoirSpec, w_minus: A, w_plus: B) -> Result<Estimate>
where
    A: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    let w0 = spec.omega_0;
    let f = |w: f64| w_minus(w) * sin_over(w - w0, t) + w_plus(w) * sin_over(w + w0, t);
    let omega_max = cutoff(spec, t);
    let pts = frequency_breakpoints(spec, omega_max, 2.0 * PI / t);
    let body = integrate(what, f, &pts, Tolerance::new(0.0, FREQ_REL_TOL), MAX_INTERVALS)?;
    let tail_tol = Tolerance::new(FREQ_REL_TOL * body.value.abs().max(f64::MIN_POSITIVE), 0.0);
    let tail = oscillatory_tail(what, f, omega_max, PI / t, tail_tol)?;
    Ok(body + tail)
}

/// `∫₀^∞ dω [w₋(ω) τ sinc²((ω−ω₀)τ/2) + w₊(ω) τ sinc²((ω+ω₀)τ/2)]`
fn sinc2_pair<A, B>(what: &str, tau: f64, spec: &ReservoirSpec, w_minus: A, w_plus: B) -> Result<Estimate>
where
    A: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    let w0 = spec.omega_0;
    let f = |w: f64| w_minus(w) * sinc2_kernel(w - w0, tau) + w_plus(w) * sinc2_kernel(w + w0, tau);
    let omega_max = cutoff(spec, tau);
    let pts = frequency_breakpoints(spec, omega_max, 2.0 * PI / tau);
    let body = integrate(what, f, &pts, Tolerance::new(0.0, FREQ_REL_TOL), MAX_INTERVALS)?;
    let tail_tol = Tolerance::new(FREQ_REL_TOL * body.value.abs().max(f64::MIN_POSITIVE), 0.0);
    // sin² = (1 − cos)/2 splits the tail into a smooth and an oscillating part
    let smooth = |w: f64| {
        let (xm, xp) = (w - w0, w + w0);
        2.0 * (w_minus(w) / (xm * xm) + w_plus(w) / (xp * xp)) / tau
    };
    let wavy = |w: f64| {
        let (xm, xp) = (w - w0, w + w0);
        -2.0 * (w_minus(w) * (xm * tau).cos() / (xm * xm) + w_plus(w) * (xp * tau).cos() / (xp * xp)) / tau
    };
    let smooth_tail = integrate_to_infinity(what, smooth, omega_max, tail_tol, MAX_INTERVALS)?;
    let wavy_tail = oscillatory_tail(what, wavy, omega_max, PI / tau, tail_tol)?;
    Ok(body + smooth_tail + wavy_tail)
}

fn check_time(t: f64, what: &'static str) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { what, value: t })
    }
}

fn check_interval(tau: f64) -> Result<()> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "interval tau",
            value: tau,
        })
    }
}

fn j(spec: &ReservoirSpec, w: f64) -> f64 {
    w * spec.density_over_omega(w)
}

fn j_n(spec: &ReservoirSpec, w: f64) -> f64 {
    spec.density_times_occupation(w)
}

/// Diffusion coefficient `Δ(t)`.
pub fn delta_of_t(t: f64, spec: &ReservoirSpec) -> Result<f64> {
    check_time(t, "time")?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let f = |w: f64| j_n(spec, w) + 0.5 * j(spec, w);
    let est = sinc_pair("delta(t)", t, spec, f, f)?;
    Ok(spec.g * spec.g * est.value)
}

/// Damping coefficient `γ(t)`; independent of the thermal model.
pub fn gamma_of_t(t: f64, spec: &ReservoirSpec) -> Result<f64> {
    check_time(t, "time")?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let half_j = |w: f64| 0.5 * j(spec, w);
    let est = sinc_pair("gamma(t)", t, spec, half_j, |w| -half_j(w))?;
    Ok(spec.g * spec.g * est.value)
}

/// `Δ(t) + γ(t)` (`sign = +1`) or `Δ(t) − γ(t)` (`sign = −1`), assembled
/// without cancellation between the two coefficients.
pub fn coefficient_sum(t: f64, sign: i32, spec: &ReservoirSpec) -> Result<f64> {
    check_time(t, "time")?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let emit = |w: f64| j_n(spec, w) + j(spec, w);
    let absorb = |w: f64| j_n(spec, w);
    let est = if sign >= 0 {
        sinc_pair("delta+gamma", t, spec, emit, absorb)?
    } else {
        sinc_pair("delta-gamma", t, spec, absorb, emit)?
    };
    Ok(spec.g * spec.g * est.value)
}

/// Closed form of `γ(t)` for the Ohmic-Lorentzian density:
/// `Γ/2 [1 − e^{−ω_c t}(cos ω₀t + r sin ω₀t)]`.
pub fn gamma_closed_form(t: f64, spec: &ReservoirSpec) -> Result<f64> {
    check_time(t, "time")?;
    let (x, y) = (spec.omega_c * t, spec.omega_0 * t);
    Ok(0.5 * spec.big_gamma() * (1.0 - (-x).exp() * (y.cos() + spec.r() * y.sin())))
}

/// Running `Γ(t) = 2∫₀^t γ(s) ds`, integrated in closed form.
pub fn integrated_damping(t: f64, spec: &ReservoirSpec) -> Result<f64> {
    check_time(t, "time")?;
    let (a, b) = (spec.omega_c, spec.omega_0);
    let (e, c, s) = ((-a * t).exp(), (b * t).cos(), (b * t).sin());
    let norm = a * a + b * b;
    let cos_part = (a - e * (a * c - b * s)) / norm;
    let sin_part = (b - e * (a * s + b * c)) / norm;
    Ok(spec.big_gamma() * (t - cos_part - spec.r() * sin_part))
}

/// γ±1(τ) from the thermal spectral density, with Markov limits filled in.
pub fn measured_rates(tau: f64, spec: &ReservoirSpec) -> Result<RateSet> {
    check_interval(tau)?;
    let emit = |w: f64| j_n(spec, w) + j(spec, w);
    let absorb = |w: f64| j_n(spec, w);
    let scale = 0.5 * spec.g * spec.g;
    let plus = sinc2_pair("gamma_plus(tau)", tau, spec, emit, absorb)?;
    let minus = sinc2_pair("gamma_minus(tau)", tau, spec, absorb, emit)?;
    let (markov_plus, markov_minus) = markov_limits(spec);
    Ok(RateSet {
        tau,
        gamma_plus: scale * plus.value,
        gamma_minus: scale * minus.value,
        markov_plus,
        markov_minus,
        shutter: None,
    })
}

fn time_breakpoints(tau: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut t = tau / 256.0;
    while t < tau {
        pts.push(t);
        t *= 2.0;
    }
    pts.push(tau);
    pts
}

/// γ±1(τ) as time averages `(1/τ)∫₀^τ [Δ(t) ± γ(t)] dt`.
pub fn rates_by_time_average(tau: f64, spec: &ReservoirSpec) -> Result<RateSet> {
    check_interval(tau)?;
    let pts = time_breakpoints(tau);
    let tol = Tolerance::new(0.0, TIME_REL_TOL);
    let average = |sign: i32| -> Result<f64> {
        let failure = std::sync::Mutex::new(None);
        let f = |t: f64| {
            coefficient_sum(t, sign, spec).unwrap_or_else(|e| {
                failure.lock().unwrap().get_or_insert(e);
                0.0
            })
        };
        let est = integrate("time average", f, &pts, tol, 5_000)?;
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        Ok(est.value / tau)
    };
    let (markov_plus, markov_minus) = markov_limits(spec);
    Ok(RateSet {
        tau,
        gamma_plus: average(1)?,
        gamma_minus: average(-1)?,
        markov_plus,
        markov_minus,
        shutter: None,
    })
}

/// Closed-form γ₋₁(τ) for the Ohmic-Lorentzian reservoir at high temperature.
///
/// Uses `N(ω₀)` of the spec's thermal model as the prefactor occupation.
pub fn analytic_gamma_minus(tau: f64, spec: &ReservoirSpec) -> Result<f64> {
    check_interval(tau)?;
    let r = spec.r();
    let r2 = r * r;
    let x = spec.omega_c * tau;
    let w0t = spec.omega_0 * tau;
    let decay = (-x).exp();
    let braces = x + (1.0 - r2) / (1.0 + r2) * (1.0 - decay * w0t.cos()) - 2.0 * r / (1.0 + r2) * decay * w0t.sin();
    Ok(spec.big_gamma() * spec.n_at_omega_0() / x * braces)
}

/// γ₋₁(τ) by quadrature with the thermal spectral density replaced by its
/// high-temperature form `κ(ω) ≈ J(|ω|) N(ω₀) ω₀/|ω|`.
///
/// This is the integral the closed form in [`analytic_gamma_minus`]
/// evaluates exactly.
pub fn high_temperature_gamma_minus(tau: f64, spec: &ReservoirSpec) -> Result<f64> {
    check_interval(tau)?;
    let n0 = spec.n_at_omega_0();
    let kappa = |w: f64| spec.density_over_omega(w) * n0 * spec.omega_0;
    let est = sinc2_pair("high-T gamma_minus", tau, spec, kappa, kappa)?;
    Ok(0.5 * spec.g * spec.g * est.value)
}

/// `Γ(τ) = 2∫₀^τ γ(t)dt` and `Δ_Γ(τ) = e^{−Γ(τ)}∫₀^τ e^{Γ(t)} Δ(t) dt`.
pub fn shutter_integrals(tau: f64, spec: &ReservoirSpec) -> Result<ShutterIntegrals> {
    check_interval(tau)?;
    let pts = time_breakpoints(tau);
    let tol = Tolerance::new(0.0, TIME_REL_TOL);
    let failure = std::sync::Mutex::new(None);
    let guard = |r: Result<f64>| {
        r.unwrap_or_else(|e| {
            failure.lock().unwrap().get_or_insert(e);
            0.0
        })
    };
    let big_gamma_tau = integrated_damping(tau, spec)?;
    let weighted = integrate(
        "Delta_Gamma(tau)",
        |t| guard(integrated_damping(t, spec).and_then(|g| Ok((g - big_gamma_tau).exp() * delta_of_t(t, spec)?))),
        &pts,
        tol,
        5_000,
    )?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(ShutterIntegrals {
        big_gamma_tau,
        delta_gamma_tau: weighted.value,
    })
}

/// Slow nested-quadrature forms of the coefficients, kept for cross-checks.
pub mod reference {
    use super::*;

    /// `Γ(t)` from the frequency integral `g²/2 · t ∫ J [t sinc²((ω−ω₀)t/2) − t sinc²((ω+ω₀)t/2)]`.
    pub fn integrated_damping_by_quadrature(t: f64, spec: &ReservoirSpec) -> Result<f64> {
        check_interval(t)?;
        let est = sinc2_pair("Gamma(t)", t, spec, |w| j(spec, w), |w| -j(spec, w))?;
        Ok(0.5 * spec.g * spec.g * t * est.value)
    }

    /// `∫₀^∞ dω J(ω)[2N(ω)+1] cos(ωs)`
    fn diffusion_kernel(s: f64, spec: &ReservoirSpec) -> Result<f64> {
        let f = |w: f64| (2.0 * j_n(spec, w) + j(spec, w)) * (w * s).cos();
        Fourier::new(spec, s).integrate("diffusion kernel", f)
    }

    /// `∫₀^∞ dω J(ω) sin(ωs)`
    fn damping_kernel(s: f64, spec: &ReservoirSpec) -> Result<f64> {
        let f = |w: f64| j(spec, w) * (w * s).sin();
        Fourier::new(spec, s).integrate("damping kernel", f)
    }

    struct Fourier {
        omega_max: f64,
        pts: Vec<f64>,
        half_period: f64,
    }

    impl Fourier {
        fn new(spec: &ReservoirSpec, s: f64) -> Self {
            let omega_max = cutoff(spec, s);
            Fourier {
                omega_max,
                pts: frequency_breakpoints(spec, omega_max, 2.0 * PI / s),
                half_period: PI / s,
            }
        }

        fn integrate<F: Fn(f64) -> f64>(&self, what: &str, f: F) -> Result<f64> {
            let body = integrate(what, &f, &self.pts, Tolerance::new(0.0, 1e-12), MAX_INTERVALS)?;
            let tol = Tolerance::new(1e-12 * body.value.abs().max(1e-300), 0.0);
            let tail = oscillatory_tail(what, &f, self.omega_max, self.half_period, tol)?;
            Ok(body.value + tail.value)
        }
    }

    fn nested<K>(what: &str, t: f64, kernel: K) -> Result<f64>
    where
        K: Fn(f64) -> Result<f64>,
    {
        if t == 0.0 {
            return Ok(0.0);
        }
        let failure = std::sync::Mutex::new(None);
        let f = |s: f64| {
            kernel(s).unwrap_or_else(|e| {
                failure.lock().unwrap().get_or_insert(e);
                0.0
            })
        };
        let est = integrate(what, f, &time_breakpoints(t), Tolerance::new(0.0, 1e-10), 5_000)?;
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        Ok(est.value)
    }

    /// `Δ(t) = g² ∫₀^t ds cos(ω₀s) ∫₀^∞ dω J(ω)[2N(ω)+1] cos(ωs)`
    pub fn delta_double_integral(t: f64, spec: &ReservoirSpec) -> Result<f64> {
        let w0 = spec.omega_0;
        let v = nested("delta reference", t, |s| Ok((w0 * s).cos() * diffusion_kernel(s, spec)?))?;
        Ok(spec.g * spec.g * v)
    }

    /// `γ(t) = g² ∫₀^t ds sin(ω₀s) ∫₀^∞ dω J(ω) sin(ωs)`
    pub fn gamma_double_integral(t: f64, spec: &ReservoirSpec) -> Result<f64> {
        let w0 = spec.omega_0;
        let v = nested("gamma reference", t, |s| Ok((w0 * s).sin() * damping_kernel(s, spec)?))?;
        Ok(spec.g * spec.g * v)
    }
}
