//! Brute-force reference solutions in a truncated Fock space.
//!
//! The time-local master equation in the interaction picture is
//!
//! ```text
//! dρ/dt = (Δ+γ)/2 [2aρa† − a†aρ − ρa†a] + (Δ−γ)/2 [2a†ρa − aa†ρ − ρaa†]
//! ```
//!
//! evaluated entrywise with the truncated ladder operators, so that the trace
//! is conserved exactly at any `n_max`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{coefficient_sum, markov_limits, RateSet};
use crate::error::{Error, Result};
use crate::reservoir::ReservoirSpec;
use crate::states::{FockDensityMatrix, NumberDistribution};

pub const TRACE_TOLERANCE: f64 = 1e-8;
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const POSITIVITY_MARGIN: f64 = 1e-8;
/// Largest population tolerated at the truncation edge.
pub const LEAKAGE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    FreeNonMarkov,
    Measured { tau: f64 },
    Shuttered { tau: f64 },
    MarkovReference,
}

impl Scenario {
    pub fn tau(&self) -> Option<f64> {
        match *self {
            Scenario::Measured { tau } | Scenario::Shuttered { tau } => Some(tau),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub n_max: usize,
    /// Largest step; the actual step divides each segment evenly.
    pub dt: f64,
    pub scenario: Scenario,
    /// Bound on the Richardson estimate of the local error, entrywise. The
    /// first step sees the `t ln t` onset of the coefficients and sets the
    /// scale (a few 1e-9 at the default step).
    pub step_tolerance: f64,
}

impl PropagationConfig {
    /// Step bounded by `τ/20` (when a schedule is active) and `0.01/max(ω_c, ω₀)`.
    pub fn new(n_max: usize, spec: &ReservoirSpec, scenario: Scenario) -> Result<Self> {
        let mut dt = 0.01 / spec.omega_c.max(spec.omega_0);
        if let Some(tau) = scenario.tau() {
            if !(tau.is_finite() && tau > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "tau",
                    value: tau,
                    reason: "must be finite and positive",
                });
            }
            dt = dt.min(tau / 20.0);
        }
        Ok(PropagationConfig {
            n_max,
            dt,
            scenario,
            step_tolerance: 1e-8,
        })
    }
}

/// Worst conservation figures seen over every accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub steps: usize,
    pub max_step_error: f64,
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    /// Smallest eigenvalue at segment ends.
    pub min_eigenvalue: f64,
    /// Every step passed the Cholesky test for `ρ + POSITIVITY_MARGIN·1`.
    pub positive_every_step: bool,
    pub max_edge_population: f64,
}

impl Default for ConservationReport {
    fn default() -> Self {
        ConservationReport {
            steps: 0,
            max_step_error: 0.0,
            max_trace_error: 0.0,
            max_hermiticity_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            positive_every_step: true,
            max_edge_population: 0.0,
        }
    }
}

impl ConservationReport {
    pub fn merge(&mut self, other: &ConservationReport) {
        self.steps += other.steps;
        self.max_step_error = self.max_step_error.max(other.max_step_error);
        self.max_trace_error = self.max_trace_error.max(other.max_trace_error);
        self.max_hermiticity_error = self.max_hermiticity_error.max(other.max_hermiticity_error);
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
        self.positive_every_step &= other.positive_every_step;
        self.max_edge_population = self.max_edge_population.max(other.max_edge_population);
    }

    pub fn check(&self) -> Result<()> {
        let fail = |check, value| Err(Error::Conservation { check, t: f64::NAN, value });
        if self.max_trace_error > TRACE_TOLERANCE {
            return fail("trace", self.max_trace_error);
        }
        if self.max_hermiticity_error > HERMITICITY_TOLERANCE {
            return fail("hermiticity", self.max_hermiticity_error);
        }
        if !self.positive_every_step || self.min_eigenvalue < -POSITIVITY_MARGIN {
            return fail("positivity", self.min_eigenvalue);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub state: FockDensityMatrix,
    pub report: ConservationReport,
}

/// `Δ ± γ` tabulated on a quarter-step grid.
struct CoefficientTable {
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl CoefficientTable {
    fn sample(spec: &ReservoirSpec, t0: f64, dt: f64, steps: usize) -> Result<Self> {
        let pairs = (0..=4 * steps)
            .into_par_iter()
            .map(|k| {
                let t = t0 + k as f64 * dt / 4.0;
                Ok((coefficient_sum(t, 1, spec)?, coefficient_sum(t, -1, spec)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let (plus, minus) = pairs.into_iter().unzip();
        Ok(CoefficientTable { plus, minus })
    }

    fn markov(spec: &ReservoirSpec, steps: usize) -> Self {
        let (p, m) = markov_limits(spec);
        CoefficientTable {
            plus: vec![p; 4 * steps + 1],
            minus: vec![m; 4 * steps + 1],
        }
    }
}

/// Entrywise generator with the truncated `a`, `a†`.
struct Generator {
    dim: usize,
    sqrt: Vec<f64>,
}

impl Generator {
    fn new(dim: usize) -> Self {
        Generator {
            dim,
            sqrt: (0..=dim).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    /// `(aa†)_nn`: `n+1` except at the edge.
    fn raised(&self, n: usize) -> f64 {
        if n + 1 < self.dim {
            (n + 1) as f64
        } else {
            0.0
        }
    }

    fn apply(&self, rho: &DMatrix<Complex64>, plus: f64, minus: f64, out: &mut DMatrix<Complex64>) {
        let d = self.dim;
        let (hp, hm) = (0.5 * plus, 0.5 * minus);
        for m in 0..d {
            for n in 0..d {
                let mut v = -(hp * (n + m) as f64 + hm * (self.raised(n) + self.raised(m))) * rho[(n, m)];
                if n + 1 < d && m + 1 < d {
                    v += plus * self.sqrt[n + 1] * self.sqrt[m + 1] * rho[(n + 1, m + 1)];
                }
                if n > 0 && m > 0 {
                    v += minus * self.sqrt[n] * self.sqrt[m] * rho[(n - 1, m - 1)];
                }
                out[(n, m)] = v;
            }
        }
    }

    /// One RK4 step of length `h` reading coefficients at table indices
    /// `k`, `k + stride`, `k + 2·stride`.
    fn rk4(&self, rho: &DMatrix<Complex64>, h: f64, table: &CoefficientTable, k: usize, stride: usize) -> DMatrix<Complex64> {
        let d = self.dim;
        let c = |i: usize| (table.plus[i], table.minus[i]);
        let (p0, m0) = c(k);
        let (p1, m1) = c(k + stride);
        let (p2, m2) = c(k + 2 * stride);
        let mut k1 = DMatrix::zeros(d, d);
        let mut k2 = DMatrix::zeros(d, d);
        let mut k3 = DMatrix::zeros(d, d);
        let mut k4 = DMatrix::zeros(d, d);
        let half = Complex64::new(0.5 * h, 0.0);
        let full = Complex64::new(h, 0.0);
        self.apply(rho, p0, m0, &mut k1);
        self.apply(&(rho + &k1 * half), p1, m1, &mut k2);
        self.apply(&(rho + &k2 * half), p1, m1, &mut k3);
        self.apply(&(rho + &k3 * full), p2, m2, &mut k4);
        rho + (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0)
    }
}

/// Advances `rho` through one segment of `steps` steps of length `dt`.
fn run_segment(rho: &mut FockDensityMatrix, dt: f64, steps: usize, table: &CoefficientTable, tol: f64, t0: f64, report: &mut ConservationReport) -> Result<()> {
    let gen = Generator::new(rho.dim());
    let trace0 = rho.trace();
    for i in 0..steps {
        let k = 4 * i;
        let coarse = gen.rk4(&rho.entries, dt, table, k, 2);
        let mid = gen.rk4(&rho.entries, 0.5 * dt, table, k, 1);
        let fine = gen.rk4(&mid, 0.5 * dt, table, k + 2, 1);
        let err = max_modulus(&(&fine - &coarse)) / 15.0;
        if err > tol {
            return Err(Error::StepError {
                t: t0 + (i + 1) as f64 * dt,
                estimate: err,
                tolerance: tol,
            });
        }
        rho.entries = fine;
        report.steps += 1;
        report.max_step_error = report.max_step_error.max(err);
        report.max_trace_error = report.max_trace_error.max((rho.trace() - trace0).abs());
        report.max_hermiticity_error = report.max_hermiticity_error.max(rho.hermiticity_error());
        report.positive_every_step &= rho.is_positive_within(POSITIVITY_MARGIN);
        let edge = rho.entries[(rho.n_max(), rho.n_max())].re;
        report.max_edge_population = report.max_edge_population.max(edge);
    }
    report.min_eigenvalue = report.min_eigenvalue.min(rho.min_eigenvalue());
    Ok(())
}

pub(crate) fn max_modulus(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn steps_for(length: f64, dt: f64) -> usize {
    ((length / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

fn check_input(rho0: &FockDensityMatrix, config: &PropagationConfig) -> Result<()> {
    if rho0.n_max() != config.n_max {
        return Err(Error::Precondition(format!(
            "state has n_max = {} but the configuration expects {}",
            rho0.n_max(),
            config.n_max
        )));
    }
    if !(config.dt.is_finite() && config.dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: config.dt,
            reason: "must be finite and positive",
        });
    }
    Ok(())
}

fn single_run(rho0: &FockDensityMatrix, t_end: f64, spec: &ReservoirSpec, config: &PropagationConfig, markov: bool) -> Result<Propagation> {
    check_input(rho0, config)?;
    let mut state = rho0.clone();
    let mut report = ConservationReport::default();
    if t_end > 0.0 {
        let steps = steps_for(t_end, config.dt);
        let dt = t_end / steps as f64;
        let table = if markov {
            CoefficientTable::markov(spec, steps)
        } else {
            CoefficientTable::sample(spec, 0.0, dt, steps)?
        };
        run_segment(&mut state, dt, steps, &table, config.step_tolerance, 0.0, &mut report)?;
    }
    Ok(Propagation { state, report })
}

/// Full non-Markovian evolution from `t = 0` with running coefficients.
pub fn propagate_nonmarkov(rho0: &FockDensityMatrix, t_end: f64, spec: &ReservoirSpec, config: &PropagationConfig) -> Result<Propagation> {
    single_run(rho0, t_end, spec, config, false)
}

/// Evolution with the constant stationary coefficients.
pub fn propagate_markov(rho0: &FockDensityMatrix, t_end: f64, spec: &ReservoirSpec, config: &PropagationConfig) -> Result<Propagation> {
    single_run(rho0, t_end, spec, config, true)
}

/// Nonselective energy measurement: keep only the Fock diagonal.
pub fn apply_projection(rho: &FockDensityMatrix) -> FockDensityMatrix {
    FockDensityMatrix {
        entries: DMatrix::from_diagonal(&rho.entries.diagonal()),
    }
}

/// Repeated `τ`-segments with the coefficient clock restarted in each; the
/// state is projected after every segment when `project` is set. Returns the
/// states after each requested number of segments.
pub fn propagate_segments(
    rho0: &FockDensityMatrix,
    checkpoints: &[usize],
    tau: f64,
    spec: &ReservoirSpec,
    config: &PropagationConfig,
    project: bool,
) -> Result<Vec<Propagation>> {
    check_input(rho0, config)?;
    if !checkpoints.windows(2).all(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("checkpoints must be ascending".into()));
    }
    let last = checkpoints.last().copied().unwrap_or(0);
    let steps = steps_for(tau, config.dt);
    let dt = tau / steps as f64;
    let table = if last > 0 { Some(CoefficientTable::sample(spec, 0.0, dt, steps)?) } else { None };
    let mut state = rho0.clone();
    let mut report = ConservationReport::default();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for segment in 0..=last {
        while next.peek() == Some(&&segment) {
            next.next();
            out.push(Propagation {
                state: state.clone(),
                report,
            });
        }
        if segment == last {
            break;
        }
        let table = table.as_ref().expect("sampled when segments are requested");
        run_segment(&mut state, dt, steps, table, config.step_tolerance, segment as f64 * tau, &mut report)?;
        if project {
            state = apply_projection(&state);
        }
    }
    Ok(out)
}

/// Evolve for `τ`, project, repeat `m` times.
pub fn propagate_measured(rho0: &FockDensityMatrix, m: usize, tau: f64, spec: &ReservoirSpec, config: &PropagationConfig) -> Result<Propagation> {
    Ok(propagate_segments(rho0, &[m], tau, spec, config, true)?.remove(0))
}

/// Evolve for `τ` with the coupling switched off and on again, `m` times.
pub fn propagate_shuttered(rho0: &FockDensityMatrix, m: usize, tau: f64, spec: &ReservoirSpec, config: &PropagationConfig) -> Result<Propagation> {
    Ok(propagate_segments(rho0, &[m], tau, spec, config, false)?.remove(0))
}

/// Dispatches on `config.scenario`; segmented scenarios need `t_end` to be a
/// whole number of intervals.
pub fn propagate(rho0: &FockDensityMatrix, t_end: f64, spec: &ReservoirSpec, config: &PropagationConfig) -> Result<Propagation> {
    let segments = |tau: f64| -> Result<usize> {
        let m = (t_end / tau).round();
        if ((m * tau) - t_end).abs() > 1e-9 * t_end.max(tau) {
            return Err(Error::Precondition(format!("t_end = {t_end} is not a multiple of tau = {tau}")));
        }
        Ok(m as usize)
    };
    match config.scenario {
        Scenario::FreeNonMarkov => propagate_nonmarkov(rho0, t_end, spec, config),
        Scenario::MarkovReference => propagate_markov(rho0, t_end, spec, config),
        Scenario::Measured { tau } => propagate_measured(rho0, segments(tau)?, tau, spec, config),
        Scenario::Shuttered { tau } => propagate_shuttered(rho0, segments(tau)?, tau, spec, config),
    }
}

/// Birth–death generator of the rate equations, reflecting at `n_max`.
fn rate_generator(n_max: usize, rates: &RateSet) -> DMatrix<f64> {
    let (up, down) = (rates.gamma_minus, rates.gamma_plus);
    let d = n_max + 1;
    let mut l = DMatrix::zeros(d, d);
    for n in 0..d {
        if n + 1 < d {
            // n → n+1 at rate γ₋₁(n+1)
            l[(n + 1, n)] += up * (n + 1) as f64;
            l[(n, n)] -= up * (n + 1) as f64;
        }
        if n > 0 {
            l[(n - 1, n)] += down * n as f64;
            l[(n, n)] -= down * n as f64;
        }
    }
    l
}

/// `dP_n/dt = γ₁[(n+1)P_{n+1} − nP_n] + γ₋₁[nP_{n−1} − (n+1)P_n]`, solved
/// by exponentiating the truncated generator.
pub fn integrate_rate_equation(p0: &NumberDistribution, t_end: f64, rates: &RateSet) -> Result<NumberDistribution> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::Domain {
            what: "t_end",
            value: t_end,
        });
    }
    if (p0.total() - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!("initial distribution sums to {}", p0.total())));
    }
    let l = rate_generator(p0.n_max, rates) * t_end;
    let p = l.exp() * DVector::from_column_slice(&p0.probs);
    let probs: Vec<f64> = p.iter().copied().collect();
    let edge = probs[p0.n_max];
    if edge > LEAKAGE_TOLERANCE {
        return Err(Error::Truncation {
            n_max: p0.n_max,
            leaked: edge,
        });
    }
    Ok(NumberDistribution { probs, n_max: p0.n_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{measured_rates, shutter_integrals};
    use crate::dynamics::{pn_closed_form, qcf_after, EvolutionKernels};
    use crate::reservoir::ThermalModel;
    use crate::states::{cat_density_matrix, cat_number_distribution, CatState};

    fn spec(r: f64, g: f64, n0: f64) -> ReservoirSpec {
        ReservoirSpec::ohmic(r, g, ThermalModel::ConstantN { n0 }).unwrap()
    }

    fn cold(r: f64) -> ReservoirSpec {
        // N(ω₀) = 1/2
        ReservoirSpec::ohmic(r, 0.2, ThermalModel::BoseEinstein { theta: 1.0 / 3f64.ln() }).unwrap()
    }

    fn cat_rho(n_max: usize) -> FockDensityMatrix {
        cat_density_matrix(&CatState::new(1.5).unwrap(), n_max).unwrap()
    }

    #[test]
    fn projection() {
        let rho = cat_rho(20);
        let p = apply_projection(&rho);
        assert_eq!(p.max_coherence(), 0.0);
        assert_eq!(apply_projection(&p), p);
        assert_eq!(p.diagonal(), rho.diagonal());
        let d = FockDensityMatrix::from_distribution(&rho.diagonal());
        assert_eq!(apply_projection(&d), d);
    }

    #[test]
    fn zero_time_is_identity() {
        let s = spec(1.0, 0.1, 0.5);
        let rho = cat_rho(20);
        let cfg = PropagationConfig::new(20, &s, Scenario::FreeNonMarkov).unwrap();
        assert_eq!(propagate_nonmarkov(&rho, 0.0, &s, &cfg).unwrap().state, rho);
        assert_eq!(propagate_measured(&rho, 0, 0.3, &s, &cfg).unwrap().state, rho);
    }

    #[test]
    fn vacuum_stays_put_at_zero_temperature() {
        let s = spec(2.0, 0.1, 0.0);
        let mut vac = DMatrix::zeros(11, 11);
        vac[(0, 0)] = Complex64::new(1.0, 0.0);
        let rho = FockDensityMatrix::from_matrix(vac).unwrap();
        let cfg = PropagationConfig::new(10, &s, Scenario::FreeNonMarkov).unwrap();
        let t = 3.0;
        let out = propagate_nonmarkov(&rho, t, &s, &cfg).unwrap();
        // only the counter-rotating part of Δ−γ excites; to first order in g²
        // the lost population is ∫₀^t(Δ−γ) = t γ₋₁(t)
        let excited = 1.0 - out.state.entries[(0, 0)].re;
        let first_order = t * measured_rates(t, &s).unwrap().gamma_minus;
        assert!(excited < 0.02);
        assert!((excited / first_order - 1.0).abs() < 0.05, "{excited} vs {first_order}");
        out.report.check().unwrap();
    }

    #[test]
    fn long_free_evolution_approaches_markov() {
        let s = ReservoirSpec::ohmic(10.0, 0.15, ThermalModel::BoseEinstein { theta: 1.0 / 3f64.ln() }).unwrap();
        let rho = cat_rho(30);
        let cfg = PropagationConfig::new(30, &s, Scenario::FreeNonMarkov).unwrap();
        let t = 3.0;
        let free = propagate_nonmarkov(&rho, t, &s, &cfg).unwrap();
        let markov = propagate_markov(&rho, t, &s, &cfg).unwrap();
        let diff = free.state.diagonal().max_abs_difference(&markov.state.diagonal());
        assert!(diff < 0.02, "{diff}");
        free.report.check().unwrap();
    }

    #[test]
    fn single_shuttered_segment_is_free_evolution() {
        let s = spec(1.0, 0.1, 0.5);
        let rho = cat_rho(20);
        let tau = 0.4;
        let cfg = PropagationConfig::new(20, &s, Scenario::Shuttered { tau }).unwrap();
        let a = propagate_shuttered(&rho, 1, tau, &s, &cfg).unwrap();
        let b = propagate_nonmarkov(&rho, tau, &s, &cfg).unwrap();
        assert!(max_modulus(&(&a.state.entries - &b.state.entries)) < 1e-14);
    }

    #[test]
    fn measured_and_shuttered_share_diagonals() {
        let s = spec(10.0, 0.05, 0.5);
        let rho = cat_rho(24);
        let tau = 0.02;
        let cfg = PropagationConfig::new(24, &s, Scenario::Measured { tau }).unwrap();
        let meas = propagate_segments(&rho, &[1, 4], tau, &s, &cfg, true).unwrap();
        let shut = propagate_segments(&rho, &[1, 4], tau, &s, &cfg, false).unwrap();
        for (a, b) in meas.iter().zip(&shut) {
            assert!(a.state.diagonal().max_abs_difference(&b.state.diagonal()) < 1e-12);
            assert_eq!(a.state.max_coherence(), 0.0);
            assert!(b.state.max_coherence() > 1e-3);
        }
    }

    #[test]
    fn shuttered_qcf_matches_recursion() {
        let s = spec(10.0, 0.1, 0.3);
        let cat = CatState::new(1.5).unwrap();
        let rho = cat_density_matrix(&cat, 26).unwrap();
        let tau = 0.05;
        let sh = shutter_integrals(tau, &s).unwrap();
        let cfg = PropagationConfig::new(26, &s, Scenario::Shuttered { tau }).unwrap();
        let runs = propagate_segments(&rho, &[1, 3], tau, &s, &cfg, false).unwrap();
        for (m, run) in [1.0, 3.0].iter().zip(&runs) {
            for xi in [Complex64::new(0.2, 0.1), Complex64::new(-0.6, 0.8), Complex64::new(1.4, -0.3)] {
                let fock = run.state.qcf(xi);
                let closed = qcf_after(xi, *m, &sh, &cat);
                assert!((fock - closed).norm() < 1e-6, "m={m} xi={xi}: {fock} vs {closed}");
            }
        }
    }

    #[test]
    fn rate_equation_basics() {
        let s = cold(1.0);
        let cat = CatState::new(2.0).unwrap();
        let p0 = cat_number_distribution(&cat, 60).unwrap();
        let zero = RateSet {
            gamma_plus: 0.0,
            gamma_minus: 0.0,
            ..RateSet::markov(&s)
        };
        assert_eq!(integrate_rate_equation(&p0, 5.0, &zero).unwrap().probs, p0.probs);
        let rates = measured_rates(5.0, &s).unwrap();
        let late = integrate_rate_equation(&p0, 200.0 / rates.damping(), &rates).unwrap();
        let n = rates.gamma_minus / rates.damping();
        for (k, p) in late.probs.iter().take(20).enumerate() {
            let thermal = (n / (n + 1.0)).powi(k as i32) / (n + 1.0);
            assert!((p - thermal).abs() < 1e-10);
        }
        assert!((late.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rate_equation_matches_closed_form() {
        let s = cold(0.1);
        let cat = CatState::new(2.0).unwrap();
        let p0 = cat_number_distribution(&cat, 40).unwrap();
        let rates = measured_rates(10.0, &s).unwrap();
        let k = EvolutionKernels::from_rates(rates);
        for t in [0.3, 1.0, 3.0].map(|x| x / k.b_tau) {
            let ode = integrate_rate_equation(&p0, t, &rates).unwrap();
            for n in 0..=40 {
                // the reflecting edge perturbs the far tail at the 1e-10 level
                assert!((ode.probs[n] - pn_closed_form(n, t, &k, &cat)).abs() < 1e-8, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn rate_equation_reports_truncation() {
        let s = spec(1.0, 0.2, 50.0);
        let cat = CatState::new(2.0).unwrap();
        let p0 = cat_number_distribution(&cat, 30).unwrap();
        let rates = measured_rates(1.0, &s).unwrap();
        assert!(matches!(integrate_rate_equation(&p0, 10.0 / rates.damping(), &rates), Err(Error::Truncation { .. })));
    }
}
