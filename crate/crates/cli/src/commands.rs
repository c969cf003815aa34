use std::path::PathBuf;

use catzeno::dynamics::{mean_number, suggested_n_max};
use catzeno::{
    analytic_gamma_minus, ln_peak_ratio, measured_rates, pn_evolution, rates_by_time_average, run_verification, wigner_peak, CatState,
    EvolutionKernels, PhaseGrid, RateSet, ReservoirSpec, VerifyOptions, WignerField,
};
use rayon::prelude::*;

use crate::config::{RunConfig, ScenarioKind};
use crate::error::CliError;
use crate::output::{num, svg, write_file, SweepResultRow, Table};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn cat(config: &RunConfig) -> Result<CatState, CliError> {
    CatState::new(config.cat.alpha).map_err(|e| CliError::Config(e.to_string()))
}

/// Markov short-time decay time of the interference peak, `1/[2γ₋₁(1+2α²)]`.
fn decay_time(spec: &ReservoirSpec, cat: &CatState) -> f64 {
    1.0 / (2.0 * RateSet::markov(spec).gamma_minus * (1.0 + 2.0 * cat.alpha * cat.alpha))
}

fn require_shuttered(config: &RunConfig, command: &str) -> Result<(), CliError> {
    match config.scenario.kind {
        ScenarioKind::Shuttered => Ok(()),
        ScenarioKind::Measured => Err(CliError::Config(format!(
            "{command} needs phase coherence; the measured scenario leaves the state diagonal in the number basis"
        ))),
    }
}

/// A labelled family of evolution kernels: the Markov reference (`ω_c τ = ∞`)
/// and one entry per interruption interval.
struct Curve {
    r: f64,
    omega_c_tau: f64,
    scenario: &'static str,
    kernels: EvolutionKernels,
}

fn curves(config: &RunConfig, markov_tag: &'static str) -> Result<Vec<Curve>, CliError> {
    let jobs: Vec<(f64, Option<f64>)> = config
        .reservoir
        .r
        .iter()
        .flat_map(|&r| std::iter::once((r, None)).chain(config.schedule.omega_c_tau.iter().map(move |&x| (r, Some(x)))))
        .collect();
    let tag = config.scenario.kind.tag();
    jobs.par_iter()
        .map(|&(r, x)| {
            let spec = config.spec(r)?;
            Ok(match x {
                None => Curve {
                    r,
                    omega_c_tau: f64::INFINITY,
                    scenario: markov_tag,
                    kernels: EvolutionKernels::from_rates(RateSet::markov(&spec)),
                },
                Some(x) => Curve {
                    r,
                    omega_c_tau: x,
                    scenario: tag,
                    kernels: EvolutionKernels::from_rates(measured_rates(x / spec.omega_c, &spec)?),
                },
            })
        })
        .collect()
}

fn curve_label(c: &Curve) -> String {
    if c.omega_c_tau.is_infinite() {
        "Markov".into()
    } else {
        format!("ω_c τ = {}", c.omega_c_tau)
    }
}

pub struct Artifacts {
    pub files: Vec<PathBuf>,
}

pub fn rates(config: &RunConfig, explicit_grid: bool) -> Result<Artifacts, CliError> {
    let grid = config.rates_grid(explicit_grid);
    let jobs: Vec<(f64, f64)> = config.reservoir.r.iter().flat_map(|&r| grid.iter().map(move |&x| (r, x))).collect();
    let mut rows: Vec<(f64, f64, Vec<String>)> = jobs
        .par_iter()
        .map(|&(r, x)| {
            let spec = config.spec(r)?;
            let tau = x / spec.omega_c;
            let m = measured_rates(tau, &spec)?;
            let avg = rates_by_time_average(tau, &spec)?;
            let identity = rel(avg.gamma_plus, m.gamma_plus).max(rel(avg.gamma_minus, m.gamma_minus));
            let analytic = analytic_gamma_minus(tau, &spec)?;
            let cells = [r, x, tau, m.gamma_plus, m.gamma_minus, m.markov_plus, m.markov_minus, analytic, identity];
            Ok((r, x, cells.iter().map(|v| num(*v)).collect()))
        })
        .collect::<Result<_, CliError>>()?;
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let table = Table {
        header: vec![
            "r",
            "omega_c_tau",
            "tau",
            "gamma_plus",
            "gamma_minus",
            "markov_plus",
            "markov_minus",
            "analytic_gamma_minus",
            "rel_err_identity",
        ],
        rows: rows.into_iter().map(|r| r.2).collect(),
    };
    let path = write_file(&config.output.dir, "rates.csv", &table.render("rates", config))?;
    Ok(Artifacts { files: vec![path] })
}

pub fn wigner_peak_curves(config: &RunConfig) -> Result<Artifacts, CliError> {
    require_shuttered(config, "wigner-peak")?;
    let cat = cat(config)?;
    let mode = config.scenario.peak_mode;
    let samples = config.schedule.samples;
    let curves = curves(config, "markov")?;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for &r in &config.reservoir.r {
        let t_end = config.schedule.t_end_decay_times * decay_time(&config.spec(r)?, &cat);
        let times: Vec<f64> = (0..samples).map(|i| t_end * i as f64 / (samples - 1) as f64).collect();
        let mut series = Vec::new();
        for c in curves.iter().filter(|c| c.r == r) {
            let mut points = Vec::with_capacity(samples);
            for &t in &times {
                let ln_ratio = ln_peak_ratio(t, &c.kernels, &cat, mode);
                let row = |quantity: &str, value| SweepResultRow {
                    r,
                    omega_c_tau: c.omega_c_tau,
                    t,
                    quantity: quantity.into(),
                    value,
                    scenario: c.scenario,
                };
                rows.push(row("ln_peak_ratio", ln_ratio));
                rows.push(row("peak_normalized", ln_ratio.exp()));
                rows.push(row("peak_raw", wigner_peak(t, &c.kernels, &cat, mode)));
                points.push((t / t_end * config.schedule.t_end_decay_times, ln_ratio.exp()));
            }
            series.push(svg::Series { label: curve_label(c), points });
        }
        if config.output.svg {
            let chart = svg::line_chart(&format!("Wigner peak, r = {r}"), "t / t_D (Markov)", "W_peak(t) / W_peak(0)", &series);
            files.push(write_file(&config.output.dir, &format!("wigner_peak_r{r}.svg"), &chart)?);
        }
    }
    let table = Table::sweep(rows);
    files.insert(0, write_file(&config.output.dir, "wigner_peak.csv", &table.render("wigner-peak", config))?);
    Ok(Artifacts { files })
}

pub fn pn_snapshots(config: &RunConfig) -> Result<Artifacts, CliError> {
    let cat = cat(config)?;
    let curves = curves(config, "none")?;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for c in &curves {
        let t_d = decay_time(&config.spec(c.r)?, &cat);
        let mut times: Vec<f64> = config.schedule.snapshot_decay_times.iter().map(|s| s * t_d).collect();
        times.sort_by(f64::total_cmp);
        let t_max = times.last().copied().unwrap_or(0.0);
        let n_max = match config.cat.n_max {
            0 => suggested_n_max(&c.kernels, &cat, t_max),
            n => n,
        };
        let dists = pn_evolution(&times, &c.kernels, &cat, n_max)?;
        for (k, (t, p)) in times.iter().zip(&dists).enumerate() {
            let row = |quantity: String, value| SweepResultRow {
                r: c.r,
                omega_c_tau: c.omega_c_tau,
                t: *t,
                quantity,
                value,
                scenario: c.scenario,
            };
            rows.extend(p.probs.iter().enumerate().map(|(n, v)| row(format!("p{n:04}"), *v)));
            rows.push(row("parity_contrast".into(), p.parity_contrast()));
            rows.push(row("mean_number".into(), mean_number(*t, &c.kernels, &cat)));
            if config.output.svg {
                let title = format!("P_n, r = {}, {}, t = {:.3} t_D", c.r, curve_label(c), t / t_d);
                let name = format!("pn_r{}_{}_t{k}.svg", c.r, if c.omega_c_tau.is_infinite() { "none".to_string() } else { format!("x{}", c.omega_c_tau) });
                files.push(write_file(&config.output.dir, &name, &svg::bar_chart(&title, "n", "P_n", &p.probs))?);
            }
        }
    }
    let table = Table::sweep(rows);
    files.insert(0, write_file(&config.output.dir, "pn_snapshots.csv", &table.render("pn-snapshots", config))?);
    Ok(Artifacts { files })
}

pub fn wigner_field(config: &RunConfig) -> Result<Artifacts, CliError> {
    require_shuttered(config, "wigner-field")?;
    let cat = cat(config)?;
    let grid = PhaseGrid {
        half_width: if config.grid.half_width > 0.0 { config.grid.half_width } else { PhaseGrid::default_for(&cat).half_width },
        points: config.grid.points,
    };
    let axis = grid.axis();
    let mut table = Table {
        header: vec!["r", "omega_c_tau", "t", "beta_re", "beta_im", "w"],
        rows: Vec::new(),
    };
    let mut files = Vec::new();
    let mut curves = curves(config, "markov")?;
    curves.sort_by(|a, b| a.r.total_cmp(&b.r).then(a.omega_c_tau.total_cmp(&b.omega_c_tau)));
    for c in &curves {
        let t_d = decay_time(&config.spec(c.r)?, &cat);
        let mut scaled: Vec<f64> = config.grid.field_decay_times.clone();
        scaled.sort_by(f64::total_cmp);
        for (k, s) in scaled.iter().enumerate() {
            let t = s * t_d;
            let field = WignerField::analytic(grid, t, &c.kernels, &cat);
            // values[(i, j)] sits at β = axis[j] + i·axis[i]
            for (j, re) in axis.iter().enumerate() {
                for (i, im) in axis.iter().enumerate() {
                    table.rows.push([c.r, c.omega_c_tau, t, *re, *im, field.at(i, j)].iter().map(|v| num(*v)).collect());
                }
            }
            if config.output.svg {
                let columns: Vec<Vec<f64>> = (0..grid.points).map(|j| (0..grid.points).map(|i| field.at(i, j)).collect()).collect();
                let title = format!("W(β), r = {}, {}, t = {s} t_D", c.r, curve_label(c));
                let name = format!(
                    "wigner_field_r{}_{}_t{k}.svg",
                    c.r,
                    if c.omega_c_tau.is_infinite() { "markov".to_string() } else { format!("x{}", c.omega_c_tau) }
                );
                files.push(write_file(&config.output.dir, &name, &svg::heatmap(&title, &columns, grid.half_width))?);
            }
        }
    }
    files.insert(0, write_file(&config.output.dir, "wigner_field.csv", &table.render("wigner-field", config))?);
    Ok(Artifacts { files })
}

pub fn verify(config: &RunConfig, gamma_minus_factor: f64) -> Result<String, CliError> {
    let report = run_verification(&VerifyOptions {
        alpha: config.cat.alpha,
        gamma_minus_factor,
    })?;
    let mut out = String::new();
    for c in &report.checks {
        out.push_str(&format!(
            "{:<5} {:<24} worst {:.3e} (tolerance {:.1e})  {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tolerance,
            c.detail
        ));
    }
    let a = report.amplitude;
    out.push_str(&format!(
        "interference amplitude: measured {:.9} 𝒩/π, alternative {} 𝒩/π, adopted {} 𝒩/π\n",
        a.measured, a.alternative, a.adopted
    ));
    if report.passed() {
        Ok(out)
    } else {
        print!("{out}");
        Err(CliError::Verification(report.failures().join(", ")))
    }
}
