//! Browser bindings: regime classification, stationary profiles and a short
//! perturbation-decay run.
//!
//! Inputs are nondimensional: `rho_plus = 1`, `u_plus = -1` and the pressure
//! constant chosen so the far-field Mach number equals `mach`. Viscosities
//! keep their library defaults.

use micropolar_lab::analysis::fit_decay;
use micropolar_lab::solver::{build_initial, OutflowBoundary, PerturbationSpec, Shape, Solver};
use micropolar_lab::stationary::{build_profile, classify as classify_params, ProfileOptions};
use micropolar_lab::{derive_constants, ModelParams, Regime, StationaryProfile};
use wasm_bindgen::prelude::*;

/// Largest grid the page may request; keeps a run interactive.
pub const MAX_CELLS: usize = 4096;

fn params(mach: f64, chi0: f64, gamma: f64, omega_b: f64) -> Result<ModelParams, String> {
    if !(mach > 0.0) || !(gamma >= 1.0) {
        return Err("Mach number must be positive and gamma at least 1".into());
    }
    let p = ModelParams {
        k: 1.0 / (gamma * mach * mach),
        gamma,
        rho_plus: 1.0,
        u_plus: -1.0,
        u_b: -chi0,
        omega_b,
        ..ModelParams::default()
    };
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

fn profile_for(p: &ModelParams, cells: usize) -> Result<StationaryProfile, String> {
    if !(16..=MAX_CELLS).contains(&cells) {
        return Err(format!("cells must lie in 16..={MAX_CELLS}"));
    }
    build_profile(p, None, cells, &ProfileOptions::default()).map_err(|e| e.to_string())
}

/// One-paragraph summary of the regime and derived constants.
#[wasm_bindgen]
pub fn classify(mach: f64, chi0: f64, gamma: f64, omega_b: f64) -> Result<String, String> {
    let p = params(mach, chi0, gamma, omega_b)?;
    let prob = classify_params(&p).map_err(|e| e.to_string())?;
    let d = derive_constants(&p).map_err(|e| e.to_string())?;
    let chi_c = prob.chi_c.map_or("none".to_string(), |c| format!("{c:.4}"));
    let mut out = format!(
        "regime: {}\nM+ = {:.4}, chi0 = {:.4}, chi_c = {chi_c}\ndelta = {:.4}, r1 = {:.4}, theta* = {:.4}",
        prob.regime, prob.mach, prob.chi0, d.delta_tilde, d.r1, d.theta_star
    );
    if prob.regime == Regime::NonExistent {
        out.push_str(if prob.mach < 1.0 {
            "\nno stationary solution: the far field is subsonic"
        } else {
            "\nno stationary solution: boundary velocity outside the admissible range"
        });
    }
    Ok(out)
}

/// Stationary profile samples.
#[wasm_bindgen]
pub struct Profile {
    x: Vec<f64>,
    rho: Vec<f64>,
    u: Vec<f64>,
    omega: Vec<f64>,
    regime: String,
}

#[wasm_bindgen]
impl Profile {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn rho(&self) -> Vec<f64> {
        self.rho.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn u(&self) -> Vec<f64> {
        self.u.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn omega(&self) -> Vec<f64> {
        self.omega.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn regime(&self) -> String {
        self.regime.clone()
    }
}

#[wasm_bindgen]
pub fn stationary_profile(mach: f64, chi0: f64, gamma: f64, omega_b: f64, cells: usize) -> Result<Profile, String> {
    let p = params(mach, chi0, gamma, omega_b)?;
    let prof = profile_for(&p, cells)?;
    Ok(Profile {
        x: prof.grid.nodes(),
        rho: prof.rho,
        u: prof.u,
        omega: prof.omega,
        regime: prof.regime.to_string(),
    })
}

/// Sup-norm history of a perturbation and its power-law fit.
#[wasm_bindgen]
pub struct DecayCurve {
    times: Vec<f64>,
    sup_norms: Vec<f64>,
    exponent: f64,
}

#[wasm_bindgen]
impl DecayCurve {
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn sup_norms(&self) -> Vec<f64> {
        self.sup_norms.clone()
    }
    /// Fitted `k` in `norm ~ (1 + t)^(-k)` after a 20% burn-in.
    #[wasm_bindgen(getter)]
    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

/// Adds a bump of height `amplitude` to all three fields and marches to `t_end`.
#[wasm_bindgen]
pub fn decay_run(
    mach: f64,
    chi0: f64,
    gamma: f64,
    omega_b: f64,
    amplitude: f64,
    t_end: f64,
    cells: usize,
) -> Result<DecayCurve, String> {
    if !(t_end > 0.0 && t_end <= 200.0) {
        return Err("t_end must lie in (0, 200]".into());
    }
    let p = params(mach, chi0, gamma, omega_b)?;
    let prof = profile_for(&p, cells)?;
    let width = (prof.grid.length / 5.0).min(3.5);
    let spec = PerturbationSpec {
        shape: Shape::Bump,
        a_rho: amplitude,
        a_u: amplitude,
        a_omega: amplitude,
        center: 1.2 * width,
        width,
    };
    let (s0, _) = build_initial(&prof, &spec, &micropolar_lab::analysis::WeightSpec::plain()).map_err(|e| e.to_string())?;

    let samples = 100;
    let times: Vec<f64> = (0..=samples).map(|i| t_end * i as f64 / samples as f64).collect();
    let mut norms = Vec::with_capacity(times.len());
    let mut solver = Solver::new(p, OutflowBoundary::new(&prof, &p), 0.8);
    solver
        .run(&s0, t_end, &times, |s| {
            let dev = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            norms.push(dev(&s.rho, &prof.rho).max(dev(&s.u, &prof.u)).max(dev(&s.omega, &prof.omega)));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    let exponent = fit_decay(&times, &norms, 0.2 * t_end).map(|f| f.fitted_exponent).unwrap_or(f64::NAN);
    Ok(DecayCurve { times, sup_norms: norms, exponent })
}
