//! Experiment orchestration: classify, build the stationary profile, march
//! the perturbed state, fit the decay and write a report.
//!
//! Artifacts in the output directory: `profile.csv`, `snapshots/*.csv`,
//! `decay.csv` and `report.txt`. The report carries machine-greppable lines
//! `RESULT <check> PASS|FAIL <value>`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::analysis::{
    energy_terms, fit_decay, relative_energy, sup_norm_perturbation, theoretical_exponent, weighted_perturbation_norm,
    DecayReport, WeightSpec,
};
use crate::config::{serialize_config, ExperimentConfig};
use crate::csv_io::{fit_footer, fmt_f64, read_decay, write_decay, write_profile, write_snapshot, DecaySeries};
use crate::error::{Error, Result};
use crate::model::derive_constants;
use crate::solver::{build_initial, OutflowBoundary, PerturbationSpec, Shape, Solver, State};
use crate::stationary::{
    build_profile, classify, ode_residual, validate_decay, verify_transonic_bounds, ProfileOptions, Regime,
    StationaryProfile, DEFAULT_ENVELOPE_CAP,
};

/// Largest admissible envelope constant.
pub const ENVELOPE_C_MAX: f64 = 10.0;
/// Grid used for the ODE-residual check, independent of the run grid.
pub const RESIDUAL_CHECK_CELLS: usize = 4096;
pub const ODE_RESIDUAL_TOL: f64 = 1e-8;
pub const TAIL_FIT_TOL: f64 = 1e-3;
/// Exponent slack below the theoretical rate.
pub const SUPERSONIC_RATE_SLACK: f64 = 0.3;
pub const TRANSONIC_RATE_SLACK: f64 = 0.2;
/// Required reduction of the sup-norm over a supersonic run.
pub const FINAL_RATIO_MAX: f64 = 0.1;
/// Largest admissible `max|R| / max(|dE/dt| + D)`.
pub const ENERGY_RESIDUAL_REL_MAX: f64 = 0.05;
pub const MASS_DRIFT_MAX: f64 = 1e-6;
/// Largest admissible stationarity floor relative to `delta~`.
pub const FLOOR_REL_MAX: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!("RESULT {} {} {}", self.name, if self.pass { "PASS" } else { "FAIL" }, fmt_f64(self.value))
    }
}

/// Report under construction: free-form `key: value` lines plus checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn info(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    pub fn check(&mut self, name: &str, pass: bool, value: f64) {
        let c = Check { name: name.to_string(), pass, value };
        self.lines.push(c.line());
        self.checks.push(c);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            let _ = writeln!(s, "{l}");
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub regime: Regime,
    pub report: Report,
    pub decay: Option<DecayReport>,
}

/// Samples taken during a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub series: DecaySeries,
    /// Energy-balance residuals at interior sample times.
    pub energy_residual: Vec<f64>,
    /// `|dE/dt| + D` at the same times, for scaling the residual.
    pub energy_scale: Vec<f64>,
    /// Largest `|u_0 - u_b| + |omega_0 - omega_b|` seen at a sample.
    pub pin_error: f64,
    pub mass_drift: f64,
    pub final_state: Option<State>,
}

/// What happens at an output time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Event {
    t: f64,
    sample: bool,
    snapshot: bool,
    /// `-1` / `+1`: energy probe at `sample -/+ eps` used for `dE/dt`.
    probe: i8,
}

/// Half-width of the centered difference for `dE/dt` around each sample.
pub fn energy_probe_eps(sample_interval: f64) -> f64 {
    0.05 * sample_interval
}

/// Output times: samples, snapshots and energy probes, merged and sorted.
fn schedule(t_end: f64, sample: f64, snapshot: f64) -> Vec<Event> {
    let grid_of = |dt: f64| {
        let m = (t_end / dt * (1.0 + 1e-12)).floor() as usize;
        let mut v: Vec<f64> = (0..=m).map(|i| (i as f64 * dt).min(t_end)).collect();
        if v.last().is_some_and(|&t| t < t_end * (1.0 - 1e-12)) {
            v.push(t_end);
        }
        v
    };
    let eps = energy_probe_eps(sample);
    let samples = grid_of(sample);
    let mut all: Vec<Event> = Vec::new();
    for &t in &samples {
        all.push(Event { t, sample: true, ..Event::default() });
        if t - eps > 0.0 && t + eps < t_end {
            all.push(Event { t: t - eps, probe: -1, ..Event::default() });
            all.push(Event { t: t + eps, probe: 1, ..Event::default() });
        }
    }
    all.extend(grid_of(snapshot).into_iter().map(|t| Event { t, snapshot: true, ..Event::default() }));
    all.sort_by(|a, b| a.t.total_cmp(&b.t));
    let tol = 1e-9 * t_end;
    let mut merged: Vec<Event> = Vec::with_capacity(all.len());
    for e in all {
        match merged.last_mut() {
            Some(last) if (e.t - last.t).abs() <= tol => {
                last.sample |= e.sample;
                last.snapshot |= e.snapshot;
                if e.probe != 0 {
                    last.probe = e.probe;
                }
            }
            _ => merged.push(e),
        }
    }
    merged
}

/// Marches `state0` to `t_end`, sampling norms and energies against `profile`.
/// Snapshots are written to `snapshot_dir` when given.
///
/// The energy-balance residual at each interior sample uses
/// `dE/dt ~ (E(t + eps) - E(t - eps)) / (2 eps)` from two extra output times.
pub fn simulate(
    cfg: &ExperimentConfig,
    profile: &StationaryProfile,
    state0: &State,
    weight: &WeightSpec,
    snapshot_dir: Option<&Path>,
) -> Result<Trajectory> {
    let p = cfg.params;
    let plan = schedule(cfg.run.t_end, cfg.run.sample_interval, cfg.run.snapshot_interval);
    let times: Vec<f64> = plan.iter().map(|e| e.t).collect();
    let mut solver = Solver::new(p, OutflowBoundary::new(profile, &p), cfg.run.cfl);
    let mut traj = Trajectory::default();
    let mut idx = 0;
    let mut snap_idx = 0;
    let mut before: Option<(f64, f64)> = None;
    let mut pending: Option<crate::analysis::EnergyTerms> = None;

    let summary = solver.run(state0, cfg.run.t_end, &times, |s| {
        let ev = plan[idx];
        idx += 1;
        if ev.snapshot {
            if let Some(dir) = snapshot_dir {
                write_snapshot(&dir.join(format!("snap_{snap_idx:05}.csv")), s)?;
            }
            snap_idx += 1;
        }
        match ev.probe {
            -1 => before = Some((s.t, relative_energy(s, profile, weight, &p)?)),
            1 => {
                if let (Some((t0, e0)), Some(terms)) = (before.take(), pending.take()) {
                    let de = (relative_energy(s, profile, weight, &p)? - e0) / (s.t - t0);
                    traj.energy_residual
                        .push(de + terms.dissipation + terms.boundary - terms.weight_term - terms.source);
                    traj.energy_scale.push(de.abs() + terms.dissipation);
                }
            }
            _ => {}
        }
        if !ev.sample {
            return Ok(());
        }
        let terms = energy_terms(s, profile, weight, &p)?;
        let ser = &mut traj.series;
        ser.t.push(s.t);
        ser.sup_norm.push(sup_norm_perturbation(s, profile)?);
        ser.weighted_norm.push(weighted_perturbation_norm(s, profile, weight)?);
        ser.energy.push(terms.energy);
        traj.pin_error = traj.pin_error.max((s.u[0] - p.u_b).abs() + (s.omega[0] - p.omega_b).abs());
        pending = Some(terms);
        Ok(())
    })?;
    traj.mass_drift = summary.mass_drift;
    traj.final_state = Some(summary.state);
    Ok(traj)
}

fn classification(cfg: &ExperimentConfig, rep: &mut Report) -> Result<Regime> {
    let p = &cfg.params;
    let prob = classify(p)?;
    let d = derive_constants(p)?;
    rep.info("regime", prob.regime);
    rep.info("mach_plus", fmt_f64(prob.mach));
    rep.info("chi0", fmt_f64(prob.chi0));
    rep.info("chi_c", prob.chi_c.map_or("none".into(), fmt_f64));
    rep.info("delta_tilde", fmt_f64(d.delta_tilde));
    rep.info("r1", fmt_f64(d.r1));
    rep.info("theta_star", fmt_f64(d.theta_star));
    if prob.regime == Regime::NonExistent {
        let why = if prob.mach < 1.0 {
            "M+ < 1: no stationary solution exists (existence requires M+ >= 1)".to_string()
        } else {
            format!(
                "chi_c u+ <= u_b: boundary velocity beyond the second root (chi_c = {})",
                prob.chi_c.map_or("none".into(), fmt_f64)
            )
        };
        rep.info("nonexistence", why);
    }
    if let Some(hint) = cfg.regime_hint {
        rep.check("regime_hint", hint == prob.regime, prob.mach);
    }
    Ok(prob.regime)
}

/// Stationary checks on `profile`; appends to `rep`.
fn stationary_checks(cfg: &ExperimentConfig, profile: &StationaryProfile, rep: &mut Report) -> Result<()> {
    let p = &cfg.params;
    rep.info("domain_length", fmt_f64(profile.grid.length));
    rep.info("cells", profile.grid.cells);
    rep.info("far_field_boundary", "dirichlet to the stationary profile at x = L (modeling choice)");

    let fine = build_profile(p, Some(profile.grid.length), RESIDUAL_CHECK_CELLS, &ProfileOptions::default())?;
    let res = ode_residual(&fine, p);
    rep.check("ode_residual", res <= ODE_RESIDUAL_TOL, res);

    match validate_decay(profile, p, DEFAULT_ENVELOPE_CAP) {
        Ok(env) => {
            rep.info("sigma", fmt_f64(env.sigma));
            rep.info("c_fluid", format!("{},{}", fmt_f64(env.c_fluid[0]), fmt_f64(env.c_fluid[1])));
            rep.info("c_omega", format!("{},{}", fmt_f64(env.c_omega[0]), fmt_f64(env.c_omega[1])));
            rep.check("envelope_constant", env.constant() <= ENVELOPE_C_MAX, env.constant());
            match profile.regime {
                Regime::Supersonic => {
                    let xi0 = env.xi0.unwrap_or(f64::NAN);
                    let rms = env.exp_fit_rms.unwrap_or(f64::NAN);
                    rep.info("xi0", fmt_f64(xi0));
                    rep.info("tail_fit_rms", fmt_f64(rms));
                    rep.check("tail_rate", xi0 > 0.0 && rms < TAIL_FIT_TOL, xi0);
                }
                Regime::Transonic => {
                    if let (Some(e), Some(a)) = (env.exp_fit_rms, env.algebraic_fit_rms) {
                        rep.info("exp_fit_rms", fmt_f64(e));
                        rep.info("algebraic_fit_rms", fmt_f64(a));
                        let ratio = e / a;
                        rep.check("algebraic_tail", ratio > 10.0, ratio);
                    }
                }
                Regime::NonExistent => {}
            }
        }
        Err(Error::EnvelopeViolated { constant, .. }) => rep.check("envelope_constant", false, constant),
        Err(e) => return Err(e),
    }

    if profile.regime == Regime::Transonic {
        match verify_transonic_bounds(profile, p, ENVELOPE_C_MAX) {
            Ok(b) => {
                rep.info("ux_bound_margin", format!("{} at x = {}", fmt_f64(b.worst_margin), fmt_f64(b.worst_x)));
                rep.info("mach_envelope", format!("{},{}", fmt_f64(b.c_mach_lower), fmt_f64(b.c_mach_upper)));
                rep.check("transonic_bounds", true, b.worst_margin);
            }
            Err(Error::BoundViolated { x, which }) => {
                rep.info("transonic_bound_violated", format!("{which} at x = {}", fmt_f64(x)));
                rep.check("transonic_bounds", false, x);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn header(cfg: &ExperimentConfig, rep: &mut Report) {
    rep.lines.push("# micropolar-lab experiment report".into());
    for l in serialize_config(cfg).lines() {
        rep.lines.push(format!("# config {l}"));
    }
}

/// Classification and stationary profile only (`stationary` subcommand).
pub fn run_stationary(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let dir = cfg.output_dir.as_path();
    prepare_dir(dir)?;
    let mut rep = Report::default();
    header(cfg, &mut rep);
    let regime = classification(cfg, &mut rep)?;
    if regime != Regime::NonExistent {
        let profile = build_profile(&cfg.params, cfg.grid.length, cfg.grid.cells, &ProfileOptions::default())?;
        write_profile(&dir.join("profile.csv"), &profile)?;
        stationary_checks(cfg, &profile, &mut rep)?;
    }
    rep.write(&dir.join("report.txt"))?;
    Ok(ExperimentOutcome { regime, report: rep, decay: None })
}

/// Full pipeline (`simulate` subcommand).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let dir = cfg.output_dir.as_path();
    prepare_dir(dir)?;
    let mut rep = Report::default();
    header(cfg, &mut rep);
    let regime = classification(cfg, &mut rep)?;
    if regime == Regime::NonExistent {
        rep.info("simulation", "skipped");
        rep.write(&dir.join("report.txt"))?;
        return Ok(ExperimentOutcome { regime, report: rep, decay: None });
    }
    let p = cfg.params;
    let profile = build_profile(&p, cfg.grid.length, cfg.grid.cells, &ProfileOptions::default())?;
    write_profile(&dir.join("profile.csv"), &profile)?;
    stationary_checks(cfg, &profile, &mut rep)?;

    let weight = cfg.weights[0].resolve(&p, regime)?;
    rep.info("weight", format!("alpha={} beta={} order={}", fmt_f64(weight.alpha), fmt_f64(weight.beta), weight.order));
    let (state0, norms) = build_initial(&profile, &cfg.perturbation, &weight)?;
    rep.info(
        "initial_weighted_norms",
        format!("{},{},{}", fmt_f64(norms.rho), fmt_f64(norms.u), fmt_f64(norms.omega)),
    );
    for (i, w) in cfg.weights.iter().enumerate().skip(1) {
        let w = w.resolve(&p, regime)?;
        let (_, n) = build_initial(&profile, &cfg.perturbation, &w)?;
        rep.info(
            &format!("initial_weighted_norms_{i}"),
            format!("{},{},{}", fmt_f64(n.rho), fmt_f64(n.u), fmt_f64(n.omega)),
        );
    }

    let snap_dir = dir.join("snapshots");
    prepare_dir(&snap_dir)?;
    let traj = simulate(cfg, &profile, &state0, &weight, Some(&snap_dir))?;
    let sup = &traj.series.sup_norm;
    let t = &traj.series.t;
    let burn_in = cfg.run.burn_in();

    let floor = if cfg.perturbation.shape == Shape::Zero {
        None
    } else {
        let quiet = ExperimentConfig { perturbation: PerturbationSpec::default(), ..cfg.clone() };
        let (s0, _) = build_initial(&profile, &quiet.perturbation, &weight)?;
        let ft = simulate(&quiet, &profile, &s0, &weight, None)?;
        Some(ft.series.sup_norm)
    };

    let mut series = traj.series.clone();
    let mut decay = None;
    match &floor {
        None => {
            let peak = sup.iter().copied().fold(0.0, f64::max);
            let d = derive_constants(&p)?.delta_tilde;
            rep.info("perturbation", "zero; sup-norm series is the stationarity floor");
            rep.check("stationarity_floor", peak <= FLOOR_REL_MAX * d, peak);
            series.footer.insert("perturbation".into(), "zero".into());
        }
        Some(floor) => {
            let mut fit = fit_decay(t, sup, burn_in)?;
            fit.theoretical_exponent = theoretical_exponent(regime, weight.alpha);
            series.footer = fit_footer(&fit);
            let theo = fit.theoretical_exponent.unwrap_or(f64::NAN);
            rep.info("fitted_exponent", fmt_f64(fit.fitted_exponent));
            rep.info("theoretical_exponent", fmt_f64(theo));
            rep.info("fit_window", format!("{},{}", fmt_f64(fit.fit_window.0), fmt_f64(fit.fit_window.1)));
            rep.info("fit_residual", fmt_f64(fit.fit_residual));
            let slack = if regime == Regime::Transonic { TRANSONIC_RATE_SLACK } else { SUPERSONIC_RATE_SLACK };
            rep.check("decay_exponent", fit.fitted_exponent >= theo - slack, fit.fitted_exponent);

            let last = sup.len() - 1;
            let final_floor = floor[last.min(floor.len() - 1)];
            rep.info("stationarity_floor_final", fmt_f64(final_floor));
            rep.check("above_floor", sup[last] > final_floor, sup[last] / final_floor);
            if regime == Regime::Supersonic {
                let ratio = sup[last] / sup[0];
                rep.check("final_ratio", ratio < FINAL_RATIO_MAX, ratio);
            } else {
                let worst = monotone_violation(t, sup, burn_in);
                rep.check("monotone_decrease", worst <= 0.0, worst);
            }
            decay = Some(fit);
        }
    }

    let r_max = traj.energy_residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let scale = traj.energy_scale.iter().copied().fold(0.0f64, f64::max);
    rep.info("energy_residual_max", fmt_f64(r_max));
    if scale > 0.0 {
        rep.check("energy_residual", r_max / scale <= ENERGY_RESIDUAL_REL_MAX, r_max / scale);
    }
    rep.check("mass_drift", traj.mass_drift.abs() <= MASS_DRIFT_MAX, traj.mass_drift);
    rep.check("boundary_pinned", traj.pin_error == 0.0, traj.pin_error);

    write_decay(&dir.join("decay.csv"), &series)?;
    rep.write(&dir.join("report.txt"))?;
    Ok(ExperimentOutcome { regime, report: rep, decay })
}

/// Largest relative increase `(n_{i+1} - n_i) / n_i` after `burn_in`; `<= 0` for a monotone series.
pub fn monotone_violation(t: &[f64], norms: &[f64], burn_in: f64) -> f64 {
    let idx: Vec<usize> = (0..t.len()).filter(|&i| t[i] >= burn_in).collect();
    idx.windows(2)
        .map(|w| (norms[w[1]] - norms[w[0]]) / norms[w[0]])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Re-fits the decay series stored in `dir/decay.csv` (`rates` subcommand)
/// and writes `dir/rates.txt`.
pub fn refit_rates(cfg: &ExperimentConfig, dir: &Path) -> Result<(DecayReport, Report)> {
    let series = read_decay(&dir.join("decay.csv"))?;
    let prob = classify(&cfg.params)?;
    let regime = prob.regime;
    let mut fit = fit_decay(&series.t, &series.sup_norm, cfg.run.burn_in())?;
    let weight = cfg.weights[0].resolve(&cfg.params, regime)?;
    fit.theoretical_exponent = theoretical_exponent(regime, weight.alpha);
    let mut rep = Report::default();
    rep.lines.push("# micropolar-lab decay re-fit".into());
    rep.info("regime", regime);
    rep.info("samples", series.t.len());
    rep.info("fitted_exponent", fmt_f64(fit.fitted_exponent));
    rep.info("theoretical_exponent", fit.theoretical_exponent.map_or("none".into(), fmt_f64));
    rep.info("fit_window", format!("{},{}", fmt_f64(fit.fit_window.0), fmt_f64(fit.fit_window.1)));
    rep.info("fit_residual", fmt_f64(fit.fit_residual));
    if let Some(theo) = fit.theoretical_exponent {
        let slack = if regime == Regime::Transonic { TRANSONIC_RATE_SLACK } else { SUPERSONIC_RATE_SLACK };
        rep.check("decay_exponent", fit.fitted_exponent >= theo - slack, fit.fitted_exponent);
    }
    rep.write(&dir.join("rates.txt"))?;
    Ok((fit, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn schedule_merges_coincident_times() {
        let s = schedule(10.0, 0.5, 5.0);
        let samples: Vec<&Event> = s.iter().filter(|e| e.sample).collect();
        assert_eq!(samples.len(), 21);
        assert!(samples[0].snapshot && samples[10].snapshot && samples[20].snapshot);
        assert_eq!(samples[10].t, 5.0);
        assert_eq!(s.iter().filter(|e| e.snapshot).count(), 3);
        // 19 interior samples, each with a probe on either side
        assert_eq!(s.iter().filter(|e| e.probe != 0).count(), 38);
        assert!(s.windows(2).all(|w| w[0].t < w[1].t));
        let odd = schedule(1.0, 0.3, 1.0);
        assert_eq!(odd.last().unwrap().t, 1.0);
    }

    #[test]
    fn monotone_detects_increase() {
        let t = [0.0, 1.0, 2.0, 3.0];
        assert!(monotone_violation(&t, &[4.0, 3.0, 2.0, 1.0], 0.0) < 0.0);
        assert!((monotone_violation(&t, &[4.0, 3.0, 3.3, 1.0], 0.0) - 0.1).abs() < 1e-12);
        assert!(monotone_violation(&t, &[4.0, 5.0, 2.0, 1.0], 1.5) < 0.0);
    }

    #[test]
    fn subsonic_config_reports_nonexistence() {
        let dir = tempfile::tempdir().unwrap();
        let doc = format!("params.mach = 0.5\noutput.dir = {}", dir.path().display());
        let cfg = parse_config(&doc).unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.regime, Regime::NonExistent);
        let text = fs::read_to_string(dir.path().join("report.txt")).unwrap();
        assert!(text.contains("M+ < 1"));
        assert!(!dir.path().join("decay.csv").exists());
    }

    #[test]
    fn small_supersonic_pipeline_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let doc = format!(
            "grid.cells = 128\nrun.t_end = 2\nrun.sample_interval = 0.1\nrun.snapshot_interval = 1\noutput.dir = {}",
            dir.path().display()
        );
        let cfg = parse_config(&doc).unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.regime, Regime::Supersonic);
        for f in ["profile.csv", "decay.csv", "report.txt", "snapshots/snap_00000.csv", "snapshots/snap_00002.csv"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let names: Vec<&str> = out.report.checks.iter().map(|c| c.name.as_str()).collect();
        for n in ["ode_residual", "envelope_constant", "tail_rate", "decay_exponent", "mass_drift", "boundary_pinned"] {
            assert!(names.contains(&n), "{n} missing from {names:?}");
        }
        let (fit, _) = refit_rates(&cfg, dir.path()).unwrap();
        assert_eq!(Some(fit.fitted_exponent), out.decay.map(|d| d.fitted_exponent));
    }
}
