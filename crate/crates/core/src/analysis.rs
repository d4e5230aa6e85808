//! Measurement apparatus for perturbations of a stationary profile:
//! algebraically weighted norms, the relative energy and its balance law,
//! Poincare-type certificates and power-law decay fits.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::ModelParams;
use crate::numerics::{derivative, fit_line, trapezoid};
use crate::solver::State;
use crate::stationary::{Regime, StationaryProfile};

/// Weight `W(x) = (1 + beta x)^alpha` and derivative order of the norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub alpha: f64,
    pub beta: f64,
    /// 0: weighted L2; 1: also includes the first derivative.
    pub order: u8,
}

impl WeightSpec {
    pub fn new(alpha: f64, beta: f64, order: u8) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParam { field: "weight.alpha", reason: format!("must be >= 0, got {alpha}") });
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParam { field: "weight.beta", reason: format!("must be >= 0, got {beta}") });
        }
        if order > 1 {
            return Err(Error::InvalidParam { field: "weight.order", reason: format!("must be 0 or 1, got {order}") });
        }
        Ok(WeightSpec { alpha, beta, order })
    }

    /// Unit weight, order 0.
    pub fn plain() -> Self {
        WeightSpec { alpha: 0.0, beta: 0.0, order: 0 }
    }

    pub fn at(&self, x: f64) -> f64 {
        (1.0 + self.beta * x).powf(self.alpha)
    }

    /// `W'(x) = alpha beta (1 + beta x)^(alpha - 1)`.
    pub fn slope_at(&self, x: f64) -> f64 {
        if self.alpha == 0.0 || self.beta == 0.0 {
            0.0
        } else {
            self.alpha * self.beta * (1.0 + self.beta * x).powf(self.alpha - 1.0)
        }
    }

    fn samples(&self, grid: &Grid) -> Vec<f64> {
        grid.nodes().iter().map(|&x| self.at(x)).collect()
    }
}

/// `(int W (f^2 [+ f_x^2]) dx)^(1/2)` by the trapezoid rule.
pub fn weighted_norm(f: &[f64], w: &WeightSpec, grid: &Grid) -> f64 {
    let weight = w.samples(grid);
    let mut integrand: Vec<f64> = f.iter().zip(&weight).map(|(v, wt)| wt * v * v).collect();
    if w.order >= 1 {
        let df = derivative(f, grid.h);
        for ((s, d), wt) in integrand.iter_mut().zip(&df).zip(&weight) {
            *s += wt * d * d;
        }
    }
    trapezoid(&integrand, grid.h).sqrt()
}

/// Discrete L2 norm (trapezoid rule).
pub fn l2_norm(f: &[f64], grid: &Grid) -> f64 {
    weighted_norm(f, &WeightSpec::plain(), grid)
}

/// Generalized binomial coefficients `C(a, k)`, `k = 0..n`.
fn binomials(a: f64, n: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(n);
    let mut v = 1.0;
    for k in 0..n {
        c.push(v);
        v *= (a - k as f64) / (k as f64 + 1.0);
    }
    c
}

const PHI_SERIES_RADIUS: f64 = 0.25;
const PHI_SERIES_TERMS: usize = 48;

/// Pressure potential `Phi(rho, rho~) = int_{rho~}^{rho} (p(s) - p(rho~)) / s^2 ds`.
///
/// Nonnegative and zero only at `rho = rho~`. Close to the diagonal the
/// closed form loses all digits to cancellation, so a power series in
/// `rho / rho~ - 1` is summed there instead.
pub fn phi_potential(rho: f64, rho_t: f64, p: &ModelParams) -> Result<f64> {
    if !(rho > 0.0) || !(rho_t > 0.0) {
        return Err(Error::InvalidParam {
            field: "rho",
            reason: format!("densities must be > 0, got ({rho}, {rho_t})"),
        });
    }
    Ok(phi_raw(rho, rho_t, p))
}

fn phi_raw(rho: f64, rho_t: f64, p: &ModelParams) -> f64 {
    let g = p.gamma;
    let d = rho / rho_t - 1.0;
    let scale = p.k * rho_t.powf(g - 1.0);
    if d.abs() < PHI_SERIES_RADIUS {
        // integrand (1+e)^(g-2) - (1+e)^(-2) in e = s/rho~ - 1
        let a = binomials(g - 2.0, PHI_SERIES_TERMS);
        let b = binomials(-2.0, PHI_SERIES_TERMS);
        let mut total = 0.0;
        let mut dk = d; // d^(k+1)
        for k in 0..PHI_SERIES_TERMS {
            total += (a[k] - b[k]) * dk / (k as f64 + 1.0);
            dk *= d;
        }
        return scale * total;
    }
    let pt = p.pressure(rho_t);
    let log_part = if g == 1.0 {
        p.k * (rho / rho_t).ln()
    } else {
        p.k * (rho.powf(g - 1.0) - rho_t.powf(g - 1.0)) / (g - 1.0)
    };
    log_part + pt * (1.0 / rho - 1.0 / rho_t)
}

fn deviation(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn same_grid(state: &State, profile: &StationaryProfile) -> Result<()> {
    if state.grid == profile.grid && state.rho.len() == profile.rho.len() {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// `int W [rho Phi(rho, rho~) + rho psi^2 / 2 + rho zeta^2 / 2] dx`.
pub fn relative_energy(state: &State, profile: &StationaryProfile, w: &WeightSpec, p: &ModelParams) -> Result<f64> {
    same_grid(state, profile)?;
    let grid = state.grid;
    let integrand: Vec<f64> = (0..grid.len())
        .map(|j| {
            let rho = state.rho[j];
            let psi = state.u[j] - profile.u[j];
            let zeta = state.omega[j] - profile.omega[j];
            w.at(grid.x(j)) * rho * (phi_raw(rho, profile.rho[j], p) + 0.5 * psi * psi + 0.5 * zeta * zeta)
        })
        .collect();
    Ok(trapezoid(&integrand, grid.h))
}

/// `max_j max(|rho - rho~|, |u - u~|, |omega - omega~|)`.
pub fn sup_norm_perturbation(state: &State, profile: &StationaryProfile) -> Result<f64> {
    same_grid(state, profile)?;
    let m = (0..state.grid.len())
        .map(|j| {
            (state.rho[j] - profile.rho[j])
                .abs()
                .max((state.u[j] - profile.u[j]).abs())
                .max((state.omega[j] - profile.omega[j]).abs())
        })
        .fold(0.0, f64::max);
    Ok(m)
}

/// Weighted L2 norm of the stacked perturbation `[phi, psi, zeta]`.
pub fn weighted_perturbation_norm(state: &State, profile: &StationaryProfile, w: &WeightSpec) -> Result<f64> {
    same_grid(state, profile)?;
    let g = &state.grid;
    let a = weighted_norm(&deviation(&state.rho, &profile.rho), w, g);
    let b = weighted_norm(&deviation(&state.u, &profile.u), w, g);
    let c = weighted_norm(&deviation(&state.omega, &profile.omega), w, g);
    Ok((a * a + b * b + c * c).sqrt())
}

/// The terms of the weighted energy balance at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms {
    pub energy: f64,
    /// `int W (mu zeta^2 + lambda psi_x^2 + nu zeta_x^2)`.
    pub dissipation: f64,
    /// `W(L) Flux(L) - W(0) Flux(0)`.
    pub boundary: f64,
    /// `int W' Flux`.
    pub weight_term: f64,
    /// `int W S`, the stationary-gradient source terms.
    pub source: f64,
}

/// Evaluates every term of the integrated energy identity except the time derivative.
pub fn energy_terms(state: &State, profile: &StationaryProfile, w: &WeightSpec, p: &ModelParams) -> Result<EnergyTerms> {
    same_grid(state, profile)?;
    let grid = state.grid;
    let h = grid.h;
    let n = grid.len();
    let (r1, _) = crate::model::char_roots(p)?;
    let phi = deviation(&state.rho, &profile.rho);
    let psi = deviation(&state.u, &profile.u);
    let zeta = deviation(&state.omega, &profile.omega);
    let psi_x = derivative(&psi, h);
    let zeta_x = derivative(&zeta, h);

    let mut diss = vec![0.0; n];
    let mut flux = vec![0.0; n];
    let mut wflux = vec![0.0; n];
    let mut src = vec![0.0; n];
    for j in 0..n {
        let x = grid.x(j);
        let wt = w.at(x);
        let (rho, u) = (state.rho[j], state.u[j]);
        let (rt, ut, chi) = (profile.rho[j], profile.u[j], profile.chi[j]);
        let phi_pot = phi_raw(rho, rt, p);
        let dp = p.pressure(rho) - p.pressure(rt);

        // stationary gradients from the profile ODE: u~_x = F(chi)/lambda, omega~_x = r1 omega~
        let f = p.k * p.rho_plus.powf(p.gamma) * (chi.powf(-p.gamma) - 1.0) + p.rho_plus * p.u_plus * p.u_plus * (chi - 1.0);
        let ut_x = f / p.lambda;
        let chi_x = f / (p.lambda * p.u_plus);
        let rt_x = -p.rho_plus * chi_x / (chi * chi);
        let pt_x = p.pressure_slope(rt) * rt_x;
        let wt_x = r1 * profile.omega[j];

        diss[j] = wt * (p.mu * zeta[j] * zeta[j] + p.lambda * psi_x[j] * psi_x[j] + p.nu * zeta_x[j] * zeta_x[j]);
        flux[j] = rho * u * (phi_pot + 0.5 * psi[j] * psi[j] + 0.5 * zeta[j] * zeta[j]) + dp * psi[j]
            - p.lambda * psi[j] * psi_x[j]
            - p.nu * zeta[j] * zeta_x[j];
        wflux[j] = w.slope_at(x) * flux[j];
        let s = -ut_x * (ut * phi[j] * psi[j] + rho * psi[j] * psi[j] + dp - p.pressure_slope(rt) * phi[j])
            - wt_x * (ut * phi[j] * zeta[j] + rho * psi[j] * zeta[j])
            - pt_x / rt * phi[j] * psi[j];
        src[j] = wt * s;
    }
    Ok(EnergyTerms {
        energy: relative_energy(state, profile, w, p)?,
        dissipation: trapezoid(&diss, h),
        boundary: w.at(grid.length) * flux[n - 1] - w.at(0.0) * flux[0],
        weight_term: trapezoid(&wflux, h),
        source: trapezoid(&src, h),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyResidual {
    pub t: f64,
    pub residual: f64,
    pub terms: EnergyTerms,
}

/// Residual of the integrated weighted energy identity
/// `dE/dt + D + [W Flux]_0^L - int W' Flux - int W S` at each interior
/// snapshot, with `dE/dt` from a centered difference of neighbouring snapshots.
pub fn energy_balance_residual(
    snapshots: &[State],
    profile: &StationaryProfile,
    p: &ModelParams,
    w: &WeightSpec,
) -> Result<Vec<EnergyResidual>> {
    if snapshots.len() < 3 {
        return Err(Error::InsufficientSnapshots { needed: 3, got: snapshots.len() });
    }
    let energies = snapshots
        .iter()
        .map(|s| relative_energy(s, profile, w, p))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(snapshots.len() - 2);
    for i in 1..snapshots.len() - 1 {
        let de = (energies[i + 1] - energies[i - 1]) / (snapshots[i + 1].t - snapshots[i - 1].t);
        let terms = energy_terms(&snapshots[i], profile, w, p)?;
        out.push(EnergyResidual {
            t: snapshots[i].t,
            residual: de + terms.dissipation + terms.boundary - terms.weight_term - terms.source,
            terms,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareCertificate {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `int e^{-sigma x} h^2 <= C (h(0)^2 + ||h_x||^2)` with `C = 2 max(1/sigma, 1/sigma^2)`.
///
/// The constant follows from `h(x)^2 <= 2 h(0)^2 + 2 x ||h_x||^2` integrated
/// against `e^{-sigma x}`.
pub fn poincare_certificate(h_field: &[f64], sigma: f64, grid: &Grid) -> Result<PoincareCertificate> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParam { field: "sigma", reason: format!("must be > 0, got {sigma}") });
    }
    let weighted: Vec<f64> = h_field
        .iter()
        .enumerate()
        .map(|(j, v)| (-sigma * grid.x(j)).exp() * v * v)
        .collect();
    let lhs = trapezoid(&weighted, grid.h);
    let grad = l2_norm(&derivative(h_field, grid.h), grid);
    let c = 2.0 * (1.0 / sigma).max(1.0 / (sigma * sigma));
    let rhs = c * (h_field[0] * h_field[0] + grad * grad);
    Ok(PoincareCertificate { lhs, rhs, holds: lhs <= rhs })
}

/// `int delta^{k+1} / (1 + delta x)^{k+1} h^2 <= C (delta^k h(0)^2 + delta^{k-1} ||h_x||^2)`
/// for `k > 1`, with `C = 2 max(1/k, 1/(k(k-1)))`.
pub fn algebraic_poincare_certificate(h_field: &[f64], delta: f64, k: f64, grid: &Grid) -> Result<PoincareCertificate> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParam { field: "delta", reason: format!("must be > 0, got {delta}") });
    }
    if !(k > 1.0) {
        return Err(Error::InvalidParam { field: "k", reason: format!("must be > 1, got {k}") });
    }
    let weighted: Vec<f64> = h_field
        .iter()
        .enumerate()
        .map(|(j, v)| delta.powf(k + 1.0) / (1.0 + delta * grid.x(j)).powf(k + 1.0) * v * v)
        .collect();
    let lhs = trapezoid(&weighted, grid.h);
    let grad = l2_norm(&derivative(h_field, grid.h), grid);
    let c = 2.0 * (1.0 / k).max(1.0 / (k * (k - 1.0)));
    let rhs = c * (delta.powf(k) * h_field[0] * h_field[0] + delta.powf(k - 1.0) * grad * grad);
    Ok(PoincareCertificate { lhs, rhs, holds: lhs <= rhs })
}

/// Power-law fit `norm ~ (1 + t)^(-k)` over a window that skips the burn-in.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub fitted_exponent: f64,
    pub fit_window: (f64, f64),
    /// RMS residual of the log-log fit.
    pub fit_residual: f64,
    pub theoretical_exponent: Option<f64>,
}

pub const MIN_FIT_SAMPLES: usize = 8;

pub fn fit_decay(times: &[f64], norms: &[f64], burn_in: f64) -> Result<DecayReport> {
    let window: Vec<(f64, f64)> = times
        .iter()
        .zip(norms)
        .filter(|(&t, _)| t >= burn_in)
        .map(|(&t, &n)| (t, n))
        .collect();
    if window.len() < MIN_FIT_SAMPLES {
        return Err(Error::WindowTooSmall { needed: MIN_FIT_SAMPLES, got: window.len() });
    }
    if let Some(&(t, value)) = window.iter().find(|(_, n)| !(*n > 0.0)) {
        return Err(Error::NonpositiveNorm { t, value });
    }
    let lx: Vec<f64> = window.iter().map(|(t, _)| (1.0 + t).ln()).collect();
    let ly: Vec<f64> = window.iter().map(|(_, n)| n.ln()).collect();
    let fit = fit_line(&lx, &ly).ok_or(Error::WindowTooSmall { needed: MIN_FIT_SAMPLES, got: window.len() })?;
    Ok(DecayReport {
        times: times.to_vec(),
        norms: norms.to_vec(),
        fitted_exponent: -fit.slope,
        fit_window: (window[0].0, window[window.len() - 1].0),
        fit_residual: fit.rms,
        theoretical_exponent: None,
    })
}

/// `theta / 2` (supersonic) or `theta / 4` (transonic).
pub fn theoretical_exponent(regime: Regime, theta: f64) -> Option<f64> {
    match regime {
        Regime::Supersonic => Some(theta / 2.0),
        Regime::Transonic => Some(theta / 4.0),
        Regime::NonExistent => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weighted_norm_examples() {
        let g = Grid::new(2.0, 400).unwrap();
        let zero = vec![0.0; g.len()];
        let one = vec![1.0; g.len()];
        assert_eq!(weighted_norm(&zero, &WeightSpec::new(2.0, 0.3, 1).unwrap(), &g), 0.0);
        assert_relative_eq!(l2_norm(&one, &g), 2f64.sqrt(), max_relative = 1e-14);
        // int_0^2 (1 + x/2) dx = 3, linear integrand: trapezoid exact
        let w = WeightSpec::new(1.0, 0.5, 0).unwrap();
        assert_relative_eq!(weighted_norm(&one, &w, &g), 3f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn zero_exponent_is_plain_l2_bitwise() {
        let g = Grid::new(5.0, 100).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|x| (3.0 * x).sin() * (-x).exp()).collect();
        let w = WeightSpec::new(0.0, 0.7, 0).unwrap();
        assert_eq!(weighted_norm(&f, &w, &g).to_bits(), l2_norm(&f, &g).to_bits());
    }

    fn phi_quadrature(rho: f64, rt: f64, p: &ModelParams) -> f64 {
        // composite Simpson with many panels on the defining integral
        let n = 20_000;
        let h = (rho - rt) / n as f64;
        let f = |s: f64| (p.pressure(s) - p.pressure(rt)) / (s * s);
        let mut acc = f(rt) + f(rho);
        for i in 1..n {
            let s = rt + i as f64 * h;
            acc += if i % 2 == 1 { 4.0 * f(s) } else { 2.0 * f(s) };
        }
        acc * h / 3.0
    }

    #[test]
    fn phi_examples() {
        let p = ModelParams { k: 1.0, gamma: 1.0, ..ModelParams::default() };
        assert_eq!(phi_potential(1.3, 1.3, &p).unwrap(), 0.0);
        let expected = 2f64.ln() - 0.5;
        assert_relative_eq!(phi_quadrature(2.0, 1.0, &p), expected, max_relative = 1e-12);
        assert_relative_eq!(phi_potential(2.0, 1.0, &p).unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(phi_potential(2.0, 1.0, &p).unwrap(), 0.1931472, epsilon = 1e-7);
        assert!(phi_potential(0.0, 1.0, &p).is_err());
    }

    #[test]
    fn phi_matches_quadrature_grid() {
        for gamma in [1.0, 1.4, 2.0] {
            let p = ModelParams { k: 0.8, gamma, ..ModelParams::default() };
            for &rt in &[0.25, 0.7, 1.0, 2.3, 4.0] {
                for &rho in &[0.25, 0.5, 0.9, 1.05, 1.2, 2.0, 4.0] {
                    let q = if rho == rt { 0.0 } else { phi_quadrature(rho, rt, &p) };
                    let c = phi_potential(rho, rt, &p).unwrap();
                    assert!((q - c).abs() <= 1e-10, "gamma {gamma} rho {rho} rt {rt}: {q} vs {c}");
                }
            }
        }
    }

    #[test]
    fn phi_series_and_closed_form_agree_at_switch() {
        let p = ModelParams { k: 1.3, gamma: 1.4, ..ModelParams::default() };
        for d in [0.2499, 0.2501, -0.2499, -0.2501] {
            let rho = 1.0 + d;
            let s = phi_raw(rho, 1.0, &p);
            let q = phi_quadrature(rho, 1.0, &p);
            assert_relative_eq!(s, q, max_relative = 1e-10);
        }
        // tiny deviations keep relative accuracy: Phi ~ p'(rho~) d^2 / (2 rho~)
        let tiny = phi_raw(1.0 + 1e-9, 1.0, &p);
        assert_relative_eq!(tiny, 1.3 * 1.4 * 1e-18 / 2.0, max_relative = 1e-6);
    }

    #[test]
    fn fit_decay_examples() {
        let t: Vec<f64> = (0..100).map(|i| i as f64 * 0.5).collect();
        let pure: Vec<f64> = t.iter().map(|t| (1.0 + t).powf(-1.5)).collect();
        let r = fit_decay(&t, &pure, 5.0).unwrap();
        assert!((r.fitted_exponent - 1.5).abs() < 1e-9);
        assert!(r.fit_residual < 1e-9);
        assert_eq!(r.fit_window, (5.0, 49.5));

        let flat = vec![0.3; t.len()];
        assert!(fit_decay(&t, &flat, 5.0).unwrap().fitted_exponent.abs() < 1e-12);

        let noisy: Vec<f64> = t.iter().map(|t| (1.0 + t).powf(-1.0) * (1.0 + 0.01 * t.sin())).collect();
        assert!((fit_decay(&t, &noisy, 5.0).unwrap().fitted_exponent - 1.0).abs() < 0.02);
    }

    #[test]
    fn fit_decay_errors() {
        let t: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let n = vec![1.0; 10];
        assert!(matches!(fit_decay(&t, &n, 5.0), Err(Error::WindowTooSmall { .. })));
        let mut z = vec![1.0; 10];
        z[9] = 0.0;
        assert!(matches!(fit_decay(&t, &z, 0.0), Err(Error::NonpositiveNorm { .. })));
    }

    #[test]
    fn poincare_constant_field() {
        let g = Grid::new(30.0, 3000).unwrap();
        let sigma = 0.5;
        let h = vec![1.7; g.len()];
        let c = poincare_certificate(&h, sigma, &g).unwrap();
        let exact = 1.7 * 1.7 * (1.0 - (-sigma * 30.0f64).exp()) / sigma;
        assert_relative_eq!(c.lhs, exact, max_relative = 1e-4);
        assert!(c.holds && c.lhs <= 2.0 * 1.7 * 1.7 / sigma);
        let zero = poincare_certificate(&vec![0.0; g.len()], 1.0, &g).unwrap();
        assert_eq!((zero.lhs, zero.rhs, zero.holds), (0.0, 0.0, true));
    }

    #[test]
    fn sup_norm_max_semantics() {
        let p = ModelParams::default();
        let g = Grid::new(10.0, 100).unwrap();
        let chi = vec![1.0; g.len()];
        let prof = StationaryProfile::from_chi_samples(g, chi, &p, Regime::Supersonic).unwrap();
        let mut s = State::from_profile(&prof);
        assert_eq!(sup_norm_perturbation(&s, &prof).unwrap(), 0.0);
        s.rho[40] += 0.01;
        s.u[60] += 0.02;
        assert_relative_eq!(sup_norm_perturbation(&s, &prof).unwrap(), 0.02, max_relative = 1e-12);
    }

    #[test]
    fn relative_energy_psi_only_and_scaling() {
        let p = ModelParams::default();
        let g = Grid::new(10.0, 200).unwrap();
        let chi: Vec<f64> = g.nodes().iter().map(|x| 1.0 - 0.1 * (-x).exp()).collect();
        let prof = StationaryProfile::from_chi_samples(g, chi, &p, Regime::Supersonic).unwrap();
        let w = WeightSpec::new(2.0, 0.1, 0).unwrap();
        let bump: Vec<f64> = g.nodes().iter().map(|x| (-(x - 4.0) * (x - 4.0)).exp()).collect();

        let mut s = State::from_profile(&prof);
        assert_eq!(relative_energy(&s, &prof, &w, &p).unwrap(), 0.0);
        for j in 0..g.len() {
            s.u[j] += 0.01 * bump[j];
        }
        let e = relative_energy(&s, &prof, &w, &p).unwrap();
        let scaled: Vec<f64> = (0..g.len()).map(|j| prof.rho[j].sqrt() * 0.01 * bump[j]).collect();
        let n = weighted_norm(&scaled, &w, &g);
        assert_relative_eq!(e, 0.5 * n * n, max_relative = 1e-12);

        let energy_at = |a: f64| {
            let mut s = State::from_profile(&prof);
            for j in 0..g.len() {
                s.rho[j] += a * bump[j];
                s.u[j] += a * bump[j];
                s.omega[j] += a * bump[j];
            }
            relative_energy(&s, &prof, &w, &p).unwrap()
        };
        let ratio = energy_at(1e-3) / energy_at(2.5e-4);
        assert!((ratio - 16.0).abs() < 0.05, "ratio {ratio}");
    }
}
