//! Stationary outflow profiles.
//!
//! The stationary system splits in two. The microrotation solves a linear
//! constant-coefficient ODE with the closed-form decaying solution
//! `omega_b e^{r1 x}`. The fluid part reduces, through the normalized
//! velocity `chi = u / u_plus = rho_plus / rho`, to the autonomous scalar
//! problem
//!
//! ```text
//! lambda u_plus chi' = F(chi),   chi(0) = u_b / u_plus,   chi(inf) = 1,
//! F(chi) = K rho_plus^gamma (chi^-gamma - 1) + rho_plus u_plus^2 (chi - 1).
//! ```
//!
//! A solution exists iff `M+ >= 1` and `chi_c < chi(0)`, where `chi_c` is the
//! root of `F` other than 1. For `M+ > 1` the profile approaches 1
//! exponentially; for `M+ = 1` the fixed point is degenerate and the
//! approach is algebraic.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{derive_constants, ModelParams, TRANSONIC_TOL};
use crate::numerics::{bisect, derivative, derivative4, fit_line, second_derivative, LineFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Supersonic,
    Transonic,
    NonExistent,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Supersonic => "supersonic",
            Regime::Transonic => "transonic",
            Regime::NonExistent => "nonexistent",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn flux_raw(chi: f64, p: &ModelParams) -> f64 {
    p.k * p.rho_plus.powf(p.gamma) * (chi.powf(-p.gamma) - 1.0)
        + p.rho_plus * p.u_plus * p.u_plus * (chi - 1.0)
}

/// `F(chi)`; the right-hand side of `lambda u_plus chi' = F(chi)`.
pub fn flux_f(chi: f64, p: &ModelParams) -> Result<f64> {
    if !(chi > 0.0 && chi.is_finite()) {
        return Err(Error::InvalidParam {
            field: "chi",
            reason: format!("F is defined for chi > 0, got {chi}"),
        });
    }
    Ok(flux_raw(chi, p))
}

/// `F'(1) = rho_plus (u_plus^2 - c_plus^2)`.
fn flux_slope_at_one(p: &ModelParams) -> f64 {
    p.rho_plus * (p.u_plus * p.u_plus - p.pressure_slope(p.rho_plus))
}

/// `F(chi) / (chi - 1)` with the removable singularity at 1 filled in.
fn deflated_flux(chi: f64, p: &ModelParams) -> f64 {
    let d = chi - 1.0;
    if d.abs() < 1e-7 {
        // F(1+d)/d = F'(1) + F''(1) d / 2 + O(d^2), F''(1) = K rho^gamma gamma (gamma+1)
        let f2 = p.k * p.rho_plus.powf(p.gamma) * p.gamma * (p.gamma + 1.0);
        flux_slope_at_one(p) + 0.5 * f2 * d
    } else {
        flux_raw(chi, p) / d
    }
}

/// The root of `F` other than 1.
///
/// For `M+ > 1` the second root lies in `(0, 1)` and is found by bisection on
/// the deflated function `F(chi) / (chi - 1)`, so the known root at 1 cannot
/// capture the bracket. For `M+ = 1` the two roots coincide.
pub fn find_chi_c(p: &ModelParams) -> Result<f64> {
    p.validate()?;
    let mach = p.mach_plus();
    if (mach - 1.0).abs() <= TRANSONIC_TOL {
        return Ok(1.0);
    }
    if mach < 1.0 {
        return Err(Error::NoSecondRoot { mach });
    }
    // G(1) = F'(1) > 0 and G -> -inf as chi -> 0+
    let g = |chi: f64| deflated_flux(chi, p);
    let mut lo = 0.5;
    while g(lo) >= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::NoSecondRoot { mach });
        }
    }
    bisect(g, lo, 1.0).ok_or(Error::NoSecondRoot { mach })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiProblem {
    /// `u_b / u_plus`.
    pub chi0: f64,
    /// Second root of `F`; `None` when `M+ < 1`.
    pub chi_c: Option<f64>,
    pub mach: f64,
    pub regime: Regime,
}

/// Existence decision: a profile exists iff `M+ >= 1` and `chi_c u_plus > u_b`.
///
/// Boundary data with `u_b = u_plus` admit the constant profile whenever
/// `M+ >= 1`, so `chi0 = 1` is not rejected by the strict inequality.
pub fn classify(p: &ModelParams) -> Result<ChiProblem> {
    p.validate()?;
    let mach = p.mach_plus();
    let chi0 = p.chi0();
    let chi_c = if mach >= 1.0 - TRANSONIC_TOL {
        Some(find_chi_c(p)?)
    } else {
        None
    };
    let regime = match chi_c {
        None => Regime::NonExistent,
        Some(c) if c * p.u_plus <= p.u_b && chi0 != 1.0 => Regime::NonExistent,
        Some(_) if (mach - 1.0).abs() <= TRANSONIC_TOL => Regime::Transonic,
        Some(_) => Regime::Supersonic,
    };
    Ok(ChiProblem {
        chi0,
        chi_c,
        mach,
        regime,
    })
}

/// `omega_b e^{r1 x}`.
pub fn stationary_omega(x: f64, p: &ModelParams) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::InvalidParam {
            field: "x",
            reason: format!("profile lives on x >= 0, got {x}"),
        });
    }
    let (r1, _) = crate::model::char_roots(p)?;
    Ok(p.omega_b * (r1 * x).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    /// RK4 substeps per grid cell.
    pub substeps: usize,
    /// Largest admissible `|chi(L) - 1|` for a supersonic profile.
    pub far_field_tol: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            substeps: 16,
            far_field_tol: 1e-5,
        }
    }
}

/// Samples of the stationary solution on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryProfile {
    pub grid: Grid,
    pub chi: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub omega: Vec<f64>,
    pub regime: Regime,
    pub chi0: f64,
}

impl StationaryProfile {
    /// Builds `rho = rho_plus / chi`, `u = u_plus chi` and the closed-form
    /// microrotation from normalized-velocity samples.
    pub fn from_chi_samples(grid: Grid, chi: Vec<f64>, p: &ModelParams, regime: Regime) -> Result<Self> {
        if chi.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        let (r1, _) = crate::model::char_roots(p)?;
        let rho = chi.iter().map(|c| p.rho_plus / c).collect();
        let u = chi.iter().map(|c| p.u_plus * c).collect();
        let omega = grid.nodes().iter().map(|x| p.omega_b * (r1 * x).exp()).collect();
        Ok(StationaryProfile {
            grid,
            chi0: chi[0],
            chi,
            rho,
            u,
            omega,
            regime,
        })
    }

    pub fn rho_far(&self) -> f64 {
        self.rho[self.grid.cells]
    }
}

fn rk4_step(chi: f64, h: f64, rate: &impl Fn(f64) -> f64) -> f64 {
    let k1 = rate(chi);
    let k2 = rate(chi + 0.5 * h * k1);
    let k3 = rate(chi + 0.5 * h * k2);
    let k4 = rate(chi + h * k3);
    chi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates `chi' = F(chi) / (lambda u_plus)` from `chi(0) = chi0` with RK4,
/// using `opts.substeps` substeps per cell so the samples land on `grid`.
pub fn solve_chi_profile(
    prob: &ChiProblem,
    p: &ModelParams,
    grid: Grid,
    opts: &ProfileOptions,
) -> Result<StationaryProfile> {
    if prob.regime == Regime::NonExistent {
        return Err(Error::NonExistent);
    }
    let scale = 1.0 / (p.lambda * p.u_plus);
    let rate = |c: f64| flux_raw(c, p) * scale;
    let sub = opts.substeps.max(1);
    let dh = grid.h / sub as f64;
    let (lo, hi) = (prob.chi0.min(1.0), prob.chi0.max(1.0));
    let increasing = prob.chi0 < 1.0;

    let mut chi = Vec::with_capacity(grid.len());
    let mut c = prob.chi0;
    chi.push(c);
    for j in 1..grid.len() {
        for _ in 0..sub {
            c = rk4_step(c, dh, &rate);
        }
        let prev = chi[j - 1];
        let monotone = if increasing { c >= prev } else { c <= prev };
        if !c.is_finite() || !monotone || c < lo || c > hi {
            return Err(Error::StepTooCoarse { x: grid.x(j) });
        }
        chi.push(c);
    }

    let deviation = (c - 1.0).abs();
    let tolerance = match prob.regime {
        Regime::Transonic => transonic_tail_tolerance(p, grid.length),
        _ => opts.far_field_tol,
    };
    if deviation > tolerance {
        return Err(Error::DomainTooShort { deviation, tolerance });
    }
    StationaryProfile::from_chi_samples(grid, chi, p, prob.regime)
}

/// Far-end tolerance for algebraically decaying transonic profiles.
fn transonic_tail_tolerance(p: &ModelParams, length: f64) -> f64 {
    let delta = p.delta_tilde();
    let a = (p.gamma + 1.0) * p.rho_plus / (2.0 * p.lambda);
    let ratio = (p.u_plus / p.u_b).powf(p.gamma + 2.0);
    2.0 * delta / (1.0 + delta * length * a * ratio / p.u_plus.abs())
}

/// Domain length so that the stationary tail is negligible at `x = L`.
///
/// Supersonic: `12 / sigma`, with `sigma` estimated from the linearization of
/// the profile ODE at `chi = 1` (the measured rate is only known afterwards).
/// Transonic: `50 / delta_tilde`.
pub fn default_domain_length(p: &ModelParams, prob: &ChiProblem) -> Result<f64> {
    let d = derive_constants(p)?;
    match prob.regime {
        Regime::Transonic => Ok(50.0 / d.delta_tilde),
        _ => {
            let linear_rate = flux_slope_at_one(p) / (p.lambda * p.u_plus.abs());
            Ok(12.0 / d.r1.abs().min(linear_rate))
        }
    }
}

/// Max-norm residual of `lambda u_plus chi' - F(chi)` with a fourth-order
/// finite-difference derivative.
pub fn ode_residual(profile: &StationaryProfile, p: &ModelParams) -> f64 {
    let dchi = derivative4(&profile.chi, profile.grid.h);
    profile
        .chi
        .iter()
        .zip(&dchi)
        .map(|(&c, &d)| (p.lambda * p.u_plus * d - flux_raw(c, p)).abs())
        .fold(0.0, f64::max)
}

pub const DEFAULT_ENVELOPE_CAP: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub regime: Regime,
    /// Fitted exponential rate of `|chi - 1|` on the tail half (supersonic).
    pub xi0: Option<f64>,
    /// RMS residual of the log-linear tail fit.
    pub exp_fit_rms: Option<f64>,
    /// RMS residual of a power-law tail fit in `1 + delta_tilde x` (transonic).
    pub algebraic_fit_rms: Option<f64>,
    /// Decay rate used for the exponential envelopes.
    pub sigma: f64,
    /// Smallest constants for the fluid deviations, `k = 0, 1`.
    pub c_fluid: [f64; 2],
    /// Smallest constants for the microrotation, `k = 0, 1`.
    pub c_omega: [f64; 2],
}

impl EnvelopeReport {
    pub fn constant(&self) -> f64 {
        self.c_fluid
            .iter()
            .chain(&self.c_omega)
            .copied()
            .fold(0.0, f64::max)
    }
}

fn tail_samples(profile: &StationaryProfile) -> (Vec<f64>, Vec<f64>) {
    let x = profile.grid.nodes();
    let half = profile.grid.length / 2.0;
    x.iter()
        .zip(&profile.chi)
        .filter(|(&xj, &c)| xj >= half && (c - 1.0).abs() > 1e3 * f64::EPSILON)
        .map(|(&xj, &c)| (xj, (c - 1.0).abs().ln()))
        .unzip()
}

/// Fits `log |chi - 1|` against `x` on the tail half of the domain.
pub fn exponential_tail_fit(profile: &StationaryProfile) -> Option<LineFit> {
    let (x, y) = tail_samples(profile);
    if x.len() < 8 {
        return None;
    }
    fit_line(&x, &y)
}

/// Fits `log |chi - 1|` against `log(1 + delta x)` on the tail half.
pub fn algebraic_tail_fit(profile: &StationaryProfile, delta: f64) -> Option<LineFit> {
    let (x, y) = tail_samples(profile);
    if x.len() < 8 {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| (1.0 + delta * v).ln()).collect();
    fit_line(&lx, &y)
}

/// Smallest `C` with `|dev_j| <= C env_j` over all samples.
/// `max_j |dev_j| / env_j` with the envelope given by its logarithm, so
/// far-field nodes where `env` underflows stay finite.
fn envelope_constant(dev: &[f64], log_env: impl Fn(usize) -> f64) -> f64 {
    dev.iter()
        .enumerate()
        .filter(|(_, d)| **d != 0.0)
        .map(|(j, d)| (d.abs().ln() - log_env(j)).exp())
        .fold(0.0, f64::max)
}

/// Checks the stationary decay envelopes.
///
/// Supersonic: `|d^k (rho - rho_plus, u - u_plus, omega)| <= C delta e^{-sigma x}`
/// with `sigma = min(|r1|, xi0)` and `xi0` measured from the tail.
/// Transonic: `|d^k (chi - 1, rho - rho_plus, u - u_plus)| <= C delta^{k+1} / (1 + delta x)^{k+1}`
/// and the exponential microrotation envelope with `sigma = |r1|`.
pub fn validate_decay(profile: &StationaryProfile, p: &ModelParams, cap: f64) -> Result<EnvelopeReport> {
    let d = derive_constants(p)?;
    let delta = d.delta_tilde;
    let h = profile.grid.h;
    let x = profile.grid.nodes();

    let trivial = profile.chi.iter().all(|&c| c == 1.0);
    let exp_fit = if trivial { None } else { exponential_tail_fit(profile) };

    let chi_dev: Vec<f64> = profile.chi.iter().map(|c| c - 1.0).collect();
    let rho_dev: Vec<f64> = profile.rho.iter().map(|r| r - p.rho_plus).collect();
    let u_dev: Vec<f64> = profile.u.iter().map(|u| u - p.u_plus).collect();
    let fluid = [rho_dev, u_dev];

    let (xi0, algebraic, sigma, c_fluid) = match profile.regime {
        Regime::Transonic => {
            let alg = if trivial { None } else { algebraic_tail_fit(profile, delta) };
            let mut c = [0.0f64; 2];
            for (k, ck) in c.iter_mut().enumerate() {
                let env = |j: usize| (k as f64 + 1.0) * (delta.ln() - (1.0 + delta * x[j]).ln());
                for f in std::iter::once(&chi_dev).chain(fluid.iter()) {
                    let series = if k == 0 { f.clone() } else { derivative(f, h) };
                    *ck = ck.max(envelope_constant(&series, env));
                }
            }
            (None, alg.map(|f| f.rms), d.r1.abs(), c)
        }
        _ => {
            let xi0 = exp_fit.map(|f| -f.slope);
            let sigma = match xi0 {
                Some(xi) => d.r1.abs().min(xi),
                None => d.r1.abs(),
            };
            let env = |j: usize| delta.ln() - sigma * x[j];
            let mut c = [0.0f64; 2];
            for f in &fluid {
                c[0] = c[0].max(envelope_constant(f, env));
                c[1] = c[1].max(envelope_constant(&derivative(f, h), env));
            }
            (xi0, None, sigma, c)
        }
    };

    let omega_sigma = match profile.regime {
        Regime::Transonic => d.r1.abs(),
        _ => sigma,
    };
    let omega_env = |j: usize| delta.ln() - omega_sigma * x[j];
    let c_omega = [
        envelope_constant(&profile.omega, omega_env),
        envelope_constant(&derivative(&profile.omega, h), omega_env),
    ];

    let report = EnvelopeReport {
        regime: profile.regime,
        xi0,
        exp_fit_rms: exp_fit.map(|f| f.rms),
        algebraic_fit_rms: algebraic,
        sigma,
        c_fluid,
        c_omega,
    };
    let constant = report.constant();
    if !(constant <= cap) {
        return Err(Error::EnvelopeViolated { constant, cap });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransonicBoundReport {
    /// `min_j (u_x(x_j) - lower_bound(x_j))` over interior nodes.
    pub worst_margin: f64,
    pub worst_x: f64,
    /// Discretization slack `10 h^2 max |u_xx|` granted to the pointwise check.
    pub slack: f64,
    /// Smallest `C` in `M - 1 >= (gamma+1) delta / (2|u+| (1+Bx)) - C delta^2/(1+Bx)^2`.
    pub c_mach_lower: f64,
    /// Smallest `C` in `M - 1 <= C delta / (1+Bx)`.
    pub c_mach_upper: f64,
}

/// Local Mach number `|u| / sqrt(p'(rho))` of the stationary profile.
pub fn local_mach(profile: &StationaryProfile, p: &ModelParams) -> Vec<f64> {
    profile
        .rho
        .iter()
        .zip(&profile.u)
        .map(|(&r, &u)| u.abs() / p.sound_speed(r))
        .collect()
}

/// Checks the transonic lower bound on `u_x` and the two-sided envelope of
/// the local Mach number.
///
/// The bounds are stated with the velocity boundary strength
/// `|u_b - u_plus|`; the fluid profile does not depend on `omega_b`. A
/// transonic profile exists only for `chi0 >= 1`, which is the branch with
/// `u_x > 0`.
pub fn verify_transonic_bounds(profile: &StationaryProfile, p: &ModelParams, cap: f64) -> Result<TransonicBoundReport> {
    if profile.regime != Regime::Transonic || profile.chi0 < 1.0 {
        return Err(Error::NonExistent);
    }
    let grid = profile.grid;
    let delta = (p.u_b - p.u_plus).abs();
    if delta == 0.0 {
        return Ok(TransonicBoundReport {
            worst_margin: 0.0,
            worst_x: 0.0,
            slack: 0.0,
            c_mach_lower: 0.0,
            c_mach_upper: 0.0,
        });
    }
    let a = (p.gamma + 1.0) * p.rho_plus / (2.0 * p.lambda);
    let b = delta * a;
    let ratio = (p.u_plus / p.u_b).powf(p.gamma + 2.0);
    let ux = derivative(&profile.u, grid.h);
    let uxx = second_derivative(&profile.u, grid.h);
    let slack = 10.0 * grid.h * grid.h * uxx.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mach = local_mach(profile, p);

    let mut worst_margin = f64::INFINITY;
    let mut worst_x = 0.0;
    let mut c_lo = 0.0f64;
    let mut c_hi = 0.0f64;
    for j in 1..grid.cells {
        let x = grid.x(j);
        let s = 1.0 + b * x;
        let bound = a * ratio * delta * delta / (s * s);
        let margin = ux[j] - bound;
        if margin < worst_margin {
            worst_margin = margin;
            worst_x = x;
        }
        let excess = mach[j] - 1.0;
        let lead = (p.gamma + 1.0) * delta / (2.0 * p.u_plus.abs() * s);
        c_lo = c_lo.max((lead - excess) * s * s / (delta * delta));
        c_hi = c_hi.max(excess * s / delta);
    }
    if worst_margin < -slack {
        return Err(Error::BoundViolated {
            which: "u_x lower bound",
            x: worst_x,
        });
    }
    if c_lo > cap {
        return Err(Error::BoundViolated { which: "Mach lower envelope", x: worst_x });
    }
    if c_hi > cap {
        return Err(Error::BoundViolated { which: "Mach upper envelope", x: worst_x });
    }
    Ok(TransonicBoundReport {
        worst_margin,
        worst_x,
        slack,
        c_mach_lower: c_lo,
        c_mach_upper: c_hi,
    })
}

/// Classifies, sizes the domain when `length` is `None`, and solves.
pub fn build_profile(p: &ModelParams, length: Option<f64>, cells: usize, opts: &ProfileOptions) -> Result<StationaryProfile> {
    let prob = classify(p)?;
    if prob.regime == Regime::NonExistent {
        return Err(Error::NonExistent);
    }
    let l = match length {
        Some(l) => l,
        None => default_domain_length(p, &prob)?,
    };
    solve_chi_profile(&prob, p, Grid::new(l, cells)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn iso(u_plus: f64) -> ModelParams {
        ModelParams {
            k: 1.0,
            gamma: 1.0,
            rho_plus: 1.0,
            u_plus,
            u_b: 0.9 * u_plus,
            ..ModelParams::default()
        }
    }

    fn transonic_desk(chi0: f64) -> ModelParams {
        let base = ModelParams {
            k: 1.0 / 1.4,
            gamma: 1.4,
            omega_b: 0.02,
            ..ModelParams::default()
        };
        let u_plus = crate::model::transonic_u_plus(base.k, base.gamma, base.rho_plus);
        ModelParams {
            u_plus,
            u_b: chi0 * u_plus,
            ..base
        }
    }

    #[test]
    fn flux_vanishes_at_one() {
        for p in [iso(-2.0), ModelParams::default(), transonic_desk(1.1)] {
            assert_eq!(flux_f(1.0, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn flux_direct_substitution() {
        assert_relative_eq!(flux_f(2.0, &iso(-2.0)).unwrap(), 3.5, max_relative = 1e-15);
    }

    #[test]
    fn flux_isothermal_factorization() {
        // gamma = 1: F = rho_plus (chi - 1)(u_plus^2 - K / chi)
        let p = ModelParams { k: 2.5, ..iso(-3.0) };
        for chi in [0.2, 0.5, 1.7, 3.0] {
            let oracle = (chi - 1.0) * (9.0 - 2.5 / chi);
            assert_relative_eq!(flux_f(chi, &p).unwrap(), oracle, max_relative = 1e-13);
        }
        assert!(flux_f(2.5 / 9.0, &p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn flux_rejects_nonpositive() {
        assert!(flux_f(0.0, &iso(-2.0)).is_err());
        assert!(flux_f(-1.0, &iso(-2.0)).is_err());
    }

    #[test]
    fn chi_c_isothermal_closed_form() {
        assert_relative_eq!(find_chi_c(&iso(-2.0)).unwrap(), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn chi_c_gamma_two() {
        // deflate F by (chi - 1): u+^2 chi^2 - K rho+ (chi + 1) = 0
        let p = ModelParams { k: 1.0, gamma: 2.0, rho_plus: 1.0, u_plus: -2.0, u_b: -1.9, ..ModelParams::default() };
        let oracle = (1.0 + 17f64.sqrt()) / 8.0;
        assert_relative_eq!(find_chi_c(&p).unwrap(), oracle, max_relative = 1e-14);
        assert_relative_eq!(oracle, 0.640388203, max_relative = 1e-9);
    }

    #[test]
    fn chi_c_transonic_and_subsonic() {
        assert_eq!(find_chi_c(&transonic_desk(1.1)).unwrap(), 1.0);
        assert!(matches!(find_chi_c(&iso(-0.5)), Err(Error::NoSecondRoot { .. })));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&iso(-2.0)).unwrap().regime, Regime::Supersonic);
        assert_eq!(classify(&iso(-0.5)).unwrap().regime, Regime::NonExistent);
        let t = classify(&transonic_desk(1.1)).unwrap();
        assert_eq!(t.regime, Regime::Transonic);
        assert_relative_eq!(t.chi0, 1.1, max_relative = 1e-15);
        // chi0 below chi_c = 1: no transonic profile
        assert_eq!(classify(&transonic_desk(0.95)).unwrap().regime, Regime::NonExistent);
        // supersonic with chi0 below chi_c
        let p = ModelParams { u_b: -0.2, ..iso(-2.0) };
        assert_eq!(classify(&p).unwrap().regime, Regime::NonExistent);
    }

    #[test]
    fn constant_profile_for_matching_data() {
        let p = ModelParams { u_b: -2.0, ..iso(-2.0) };
        let prob = classify(&p).unwrap();
        let prof = solve_chi_profile(&prob, &p, Grid::new(10.0, 64).unwrap(), &ProfileOptions::default()).unwrap();
        assert!(prof.chi.iter().all(|&c| c == 1.0));
        assert!(prof.rho.iter().all(|&r| r == p.rho_plus));
        assert!(prof.u.iter().all(|&u| u == p.u_plus));
        let rep = validate_decay(&prof, &p, DEFAULT_ENVELOPE_CAP).unwrap();
        assert_eq!(rep.c_fluid, [0.0, 0.0]);
        assert!(rep.xi0.is_none());
    }

    #[test]
    fn supersonic_profile_increasing_to_one() {
        let p = ModelParams::default();
        let prof = build_profile(&p, None, 2048, &ProfileOptions::default()).unwrap();
        assert_eq!(prof.regime, Regime::Supersonic);
        assert!(prof.chi.windows(2).all(|w| w[1] >= w[0]));
        assert!(prof.chi.iter().all(|&c| (0.9..=1.0).contains(&c)));
        for (r, u) in prof.rho.iter().zip(&prof.u) {
            assert!((r * u - p.rho_plus * p.u_plus).abs() <= 1e-12);
        }
        let rep = validate_decay(&prof, &p, DEFAULT_ENVELOPE_CAP).unwrap();
        // linearization at chi = 1 gives rho+(u+^2 - c+^2)/(lambda |u+|)
        let linear = 1.0 - 1.0 / 2.25;
        assert_relative_eq!(rep.xi0.unwrap(), linear, max_relative = 1e-3);
    }

    #[test]
    fn transonic_profile_decreasing() {
        let p = transonic_desk(1.1);
        let prof = build_profile(&p, None, 4096, &ProfileOptions::default()).unwrap();
        assert!(prof.chi.windows(2).all(|w| w[1] <= w[0]));
        let rep = validate_decay(&prof, &p, DEFAULT_ENVELOPE_CAP).unwrap();
        assert!(rep.constant() < 10.0);
        assert!(rep.exp_fit_rms.unwrap() > 10.0 * rep.algebraic_fit_rms.unwrap());
    }

    #[test]
    fn omega_closed_form() {
        let p = ModelParams::default();
        let (r1, _) = crate::model::char_roots(&p).unwrap();
        assert_eq!(stationary_omega(0.0, &p).unwrap(), p.omega_b);
        assert_relative_eq!(stationary_omega(1.0 / r1.abs(), &p).unwrap(), p.omega_b / std::f64::consts::E, max_relative = 1e-14);
        assert!(stationary_omega(-1.0, &p).is_err());
    }

    #[test]
    fn synthetic_exponential_tail() {
        let p = ModelParams::default();
        let grid = Grid::new(10.0, 1000).unwrap();
        let chi: Vec<f64> = grid.nodes().iter().map(|x| 1.0 - 0.1 * (-2.0 * x).exp()).collect();
        let prof = StationaryProfile::from_chi_samples(grid, chi, &p, Regime::Supersonic).unwrap();
        let fit = exponential_tail_fit(&prof).unwrap();
        assert!((-fit.slope - 2.0).abs() < 1e-6, "{}", fit.slope);
    }

    #[test]
    fn ode_residual_fourth_order() {
        let p = ModelParams::default();
        let l = 20.0;
        let r1 = ode_residual(&build_profile(&p, Some(l), 256, &ProfileOptions::default()).unwrap(), &p);
        let r2 = ode_residual(&build_profile(&p, Some(l), 512, &ProfileOptions::default()).unwrap(), &p);
        let ratio = r1 / r2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn omega_discrete_ode_second_order() {
        let p = ModelParams::default();
        let mut prev = None;
        for n in [400usize, 800, 1600] {
            let g = Grid::new(25.0, n).unwrap();
            let prof = build_profile(&p, Some(25.0), n, &ProfileOptions::default()).unwrap();
            let w = &prof.omega;
            let h = g.h;
            let mut res = 0.0f64;
            for j in 1..n {
                let wx = (w[j + 1] - w[j - 1]) / (2.0 * h);
                let wxx = (w[j + 1] - 2.0 * w[j] + w[j - 1]) / (h * h);
                res = res.max((p.rho_plus * p.u_plus * wx + p.mu * w[j] - p.nu * wxx).abs());
            }
            if let Some(r) = prev {
                let ratio: f64 = r / res;
                assert!((3.7..4.3).contains(&ratio), "ratio {ratio}");
            }
            prev = Some(res);
        }
    }

    #[test]
    fn domain_too_short_detected() {
        let p = ModelParams::default();
        assert!(matches!(
            build_profile(&p, Some(3.0), 64, &ProfileOptions::default()),
            Err(Error::DomainTooShort { .. })
        ));
    }

    #[test]
    fn transonic_bounds_hold() {
        let p = transonic_desk(1.05);
        let prof = build_profile(&p, None, 4096, &ProfileOptions::default()).unwrap();
        let rep = verify_transonic_bounds(&prof, &p, 10.0).unwrap();
        assert!(rep.worst_margin > -rep.slack);
        assert!(rep.c_mach_upper <= 10.0 && rep.c_mach_lower <= 10.0);
    }

    #[test]
    fn transonic_bounds_degenerate_and_wrong_regime() {
        let p = transonic_desk(1.0);
        let prof = build_profile(&p, Some(100.0), 256, &ProfileOptions::default()).unwrap();
        assert_eq!(prof.regime, Regime::Transonic);
        assert_eq!(verify_transonic_bounds(&prof, &p, 10.0).unwrap().worst_margin, 0.0);
        let s = ModelParams::default();
        let prof = build_profile(&s, None, 256, &ProfileOptions::default()).unwrap();
        assert!(verify_transonic_bounds(&prof, &s, 10.0).is_err());
    }
}
