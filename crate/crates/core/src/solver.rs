//! Explicit finite-difference solver for the full time-dependent system
//!
//! ```text
//! rho_t + (rho u)_x = 0
//! (rho u)_t + (rho u^2)_x + p(rho)_x = lambda u_xx
//! (rho omega)_t + (rho u omega)_x + mu omega = nu omega_xx
//! ```
//!
//! on a truncated half line. Conservative variables `(rho, m, w) = (rho,
//! rho u, rho omega)` are updated; convective fluxes are upwinded at cell
//! interfaces, the pressure gradient and viscous terms use central
//! differences. Time integration is Heun's method (two-stage, second order)
//! with the boundary re-imposed after each stage.

use crate::analysis::{weighted_norm, WeightSpec};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::ModelParams;
use crate::stationary::StationaryProfile;

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub omega: Vec<f64>,
}

impl State {
    /// The stationary profile itself as a state at `t = 0`.
    pub fn from_profile(profile: &StationaryProfile) -> State {
        State {
            t: 0.0,
            grid: profile.grid,
            rho: profile.rho.clone(),
            u: profile.u.clone(),
            omega: profile.omega.clone(),
        }
    }

    pub fn momentum(&self) -> Vec<f64> {
        self.rho.iter().zip(&self.u).map(|(r, u)| r * u).collect()
    }

    pub fn spin_density(&self) -> Vec<f64> {
        self.rho.iter().zip(&self.omega).map(|(r, w)| r * w).collect()
    }

    /// `h * sum(rho_j)` over interior nodes `1..n`.
    pub fn interior_mass(&self) -> f64 {
        let n = self.grid.cells;
        self.grid.h * self.rho[1..n].iter().sum::<f64>()
    }
}

/// Boundary data: `(u, omega)` at `x = 0` and `(rho, u, omega)` at `x = L`.
pub trait Boundary {
    fn left(&self, t: f64) -> (f64, f64);
    fn right(&self, t: f64) -> (f64, f64, f64);
}

/// `u = u_b`, `omega = omega_b` at the outflow boundary; Dirichlet to the
/// stationary profile at the truncation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutflowBoundary {
    pub u_b: f64,
    pub omega_b: f64,
    pub far: (f64, f64, f64),
}

impl OutflowBoundary {
    pub fn new(profile: &StationaryProfile, p: &ModelParams) -> Self {
        let n = profile.grid.cells;
        OutflowBoundary {
            u_b: p.u_b,
            omega_b: p.omega_b,
            far: (profile.rho[n], profile.u[n], profile.omega[n]),
        }
    }
}

impl Boundary for OutflowBoundary {
    fn left(&self, _t: f64) -> (f64, f64) {
        (self.u_b, self.omega_b)
    }

    fn right(&self, _t: f64) -> (f64, f64, f64) {
        self.far
    }
}

/// Pins `u` and `omega` at `x = 0`, extrapolates `rho_0` quadratically from
/// the three nearest interior nodes (the density characteristic leaves the
/// domain there), and imposes the far-end data.
pub fn apply_boundary(state: &mut State, bc: &dyn Boundary) -> Result<()> {
    let n = state.grid.cells;
    let (ul, wl) = bc.left(state.t);
    state.u[0] = ul;
    state.omega[0] = wl;
    let rho0 = 3.0 * state.rho[1] - 3.0 * state.rho[2] + state.rho[3];
    if !(rho0 > 0.0) {
        return Err(Error::PositivityLost { x: 0.0, t: state.t });
    }
    state.rho[0] = rho0;
    let (rr, ur, wr) = bc.right(state.t);
    state.rho[n] = rr;
    state.u[n] = ur;
    state.omega[n] = wr;
    Ok(())
}

/// Source terms `(f_rho, f_m, f_w)` added to the conservative equations at `(x, t)`.
pub type Forcing = dyn Fn(f64, f64) -> [f64; 3] + Send + Sync;

/// Semi-discrete time derivative of the conservative variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs {
    pub rho: Vec<f64>,
    pub m: Vec<f64>,
    pub w: Vec<f64>,
    /// Net mass flux leaving the interior nodes: `F_{n-1/2} - F_{1/2}`.
    pub mass_out: f64,
}

/// Convective fluxes `rho u (1, u, omega)` at the interface `j + 1/2`,
/// taken from the upwind node of the interface velocity.
#[inline]
fn upwind_flux(rho: &[f64], u: &[f64], om: &[f64], j: usize) -> [f64; 3] {
    let k = if 0.5 * (u[j] + u[j + 1]) < 0.0 { j + 1 } else { j };
    let m = rho[k] * u[k];
    [m, m * u[k], m * om[k]]
}

/// Right-hand side at interior nodes; boundary rows are zero.
pub fn rhs(state: &State, p: &ModelParams, forcing: Option<&Forcing>) -> Result<Rhs> {
    let n = state.grid.cells;
    let h = state.grid.h;
    let (rho, u, om) = (&state.rho, &state.u, &state.omega);
    let pres: Vec<f64> = rho.iter().map(|&r| p.pressure(r)).collect();

    let mut out = Rhs {
        rho: vec![0.0; n + 1],
        m: vec![0.0; n + 1],
        w: vec![0.0; n + 1],
        mass_out: 0.0,
    };
    let inv_h = 1.0 / h;
    let inv_h2 = inv_h * inv_h;
    let mut left = upwind_flux(rho, u, om, 0);
    let first_mass = left[0];
    for j in 1..n {
        let right = upwind_flux(rho, u, om, j);
        let src = match forcing {
            Some(f) => f(state.grid.x(j), state.t),
            None => [0.0; 3],
        };
        let dr = -(right[0] - left[0]) * inv_h + src[0];
        let dm = -(right[1] - left[1]) * inv_h - (pres[j + 1] - pres[j - 1]) * 0.5 * inv_h
            + p.lambda * (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_h2
            + src[1];
        let dw = -(right[2] - left[2]) * inv_h - p.mu * om[j]
            + p.nu * (om[j + 1] - 2.0 * om[j] + om[j - 1]) * inv_h2
            + src[2];
        if !(dr + dm + dw).is_finite() {
            let field = if !dr.is_finite() { "rho" } else if !dm.is_finite() { "m" } else { "w" };
            return Err(Error::NonFiniteField { field, x: state.grid.x(j), t: state.t });
        }
        out.rho[j] = dr;
        out.m[j] = dm;
        out.w[j] = dw;
        left = right;
    }
    out.mass_out = left[0] - first_mass;
    Ok(out)
}

/// `cfl * min(h / (max|u| + c(max rho)), h^2 min(rho) / (2 max(lambda, nu)))`.
///
/// `c` is nondecreasing in `rho` for `gamma >= 1`, so the advective bound is
/// a (slightly conservative) bound on `max(|u| + c)`.
pub fn stable_dt(state: &State, p: &ModelParams, cfl: f64) -> f64 {
    let h = state.grid.h;
    let (mut rho_min, mut rho_max, mut u_max) = (f64::INFINITY, 0.0f64, 0.0f64);
    for (&r, &u) in state.rho.iter().zip(&state.u) {
        rho_min = rho_min.min(r);
        rho_max = rho_max.max(r);
        u_max = u_max.max(u.abs());
    }
    let wave = u_max + p.sound_speed(rho_max);
    let advective = if wave > 0.0 { h / wave } else { f64::INFINITY };
    let diffusive = h * h * rho_min / (2.0 * p.lambda.max(p.nu));
    cfl * advective.min(diffusive)
}

/// Time stepper holding the physics, boundary data and optional forcing.
pub struct Solver<B: Boundary> {
    pub params: ModelParams,
    pub boundary: B,
    pub cfl: f64,
    forcing: Option<Box<Forcing>>,
    /// `int_0^t (F_{n-1/2} - F_{1/2}) dt`, accumulated with the stage weights.
    outflow_integral: f64,
}

/// Summary of a completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub state: State,
    /// Times at which the observer was invoked.
    pub observed: Vec<f64>,
    pub steps: usize,
    /// Cumulative discrete mass-balance drift at the end of the run.
    pub mass_drift: f64,
}

fn check_state(state: &State) -> Result<()> {
    for j in 0..state.grid.len() {
        let x = state.grid.x(j);
        if !(state.rho[j] > 0.0) {
            if !state.rho[j].is_finite() {
                return Err(Error::NonFiniteField { field: "rho", x, t: state.t });
            }
            return Err(Error::PositivityLost { x, t: state.t });
        }
        if !state.u[j].is_finite() {
            return Err(Error::NonFiniteField { field: "u", x, t: state.t });
        }
        if !state.omega[j].is_finite() {
            return Err(Error::NonFiniteField { field: "omega", x, t: state.t });
        }
    }
    Ok(())
}

impl<B: Boundary> Solver<B> {
    pub fn new(params: ModelParams, boundary: B, cfl: f64) -> Self {
        Solver {
            params,
            boundary,
            cfl,
            forcing: None,
            outflow_integral: 0.0,
        }
    }

    pub fn with_forcing(mut self, forcing: Box<Forcing>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn stable_dt(&self, state: &State) -> f64 {
        stable_dt(state, &self.params, self.cfl)
    }

    /// `M(t) - M(0) + int (F_out) dt`, given the interior mass at the start of the run.
    pub fn mass_drift(&self, state: &State, initial_mass: f64) -> f64 {
        state.interior_mass() - initial_mass + self.outflow_integral
    }

    fn stage(&self, base: &State, cons: &[Vec<f64>; 3], r: &Rhs, dt: f64, t: f64) -> Result<(State, [Vec<f64>; 3])> {
        let n = base.grid.cells;
        let mut next = [cons[0].clone(), cons[1].clone(), cons[2].clone()];
        for j in 1..n {
            next[0][j] += dt * r.rho[j];
            next[1][j] += dt * r.m[j];
            next[2][j] += dt * r.w[j];
        }
        let state = self.recover(base, &next, t)?;
        Ok((state, next))
    }

    fn recover(&self, base: &State, cons: &[Vec<f64>; 3], t: f64) -> Result<State> {
        let mut s = State {
            t,
            grid: base.grid,
            rho: cons[0].clone(),
            u: base.u.clone(),
            omega: base.omega.clone(),
        };
        for j in 1..base.grid.cells {
            let r = cons[0][j];
            if !(r > 0.0) {
                return Err(Error::PositivityLost { x: base.grid.x(j), t });
            }
            s.u[j] = cons[1][j] / r;
            s.omega[j] = cons[2][j] / r;
        }
        apply_boundary(&mut s, &self.boundary)?;
        check_state(&s)?;
        Ok(s)
    }

    /// Advances `state` by `dt` with Heun's method.
    pub fn step(&mut self, state: &State, dt: f64) -> Result<State> {
        let forcing = self.forcing.as_deref();
        let cons0 = [state.rho.clone(), state.momentum(), state.spin_density()];
        let r0 = rhs(state, &self.params, forcing)?;
        let (s1, cons1) = self.stage(state, &cons0, &r0, dt, state.t + dt)?;
        let r1 = rhs(&s1, &self.params, forcing)?;
        let n = state.grid.cells;
        let mut cons2 = cons0.clone();
        // U2 = (U0 + U1 + dt L(U1)) / 2
        for (k, c) in cons2.iter_mut().enumerate() {
            let d1 = match k {
                0 => &r1.rho,
                1 => &r1.m,
                _ => &r1.w,
            };
            for j in 1..n {
                c[j] = 0.5 * (cons0[k][j] + cons1[k][j] + dt * d1[j]);
            }
        }
        let next = self.recover(state, &cons2, state.t + dt)?;
        self.outflow_integral += 0.5 * dt * (r0.mass_out + r1.mass_out);
        Ok(next)
    }

    /// Marches to `t_end`, landing exactly on each requested output time and
    /// calling `observer` there. Output times outside `[t0, t_end]` are ignored.
    pub fn run<F>(&mut self, state0: &State, t_end: f64, output_times: &[f64], mut observer: F) -> Result<RunSummary>
    where
        F: FnMut(&State) -> Result<()>,
    {
        let initial_mass = state0.interior_mass();
        let mut outputs: Vec<f64> = output_times
            .iter()
            .copied()
            .filter(|&t| t >= state0.t && t <= t_end)
            .collect();
        outputs.sort_by(|a, b| a.total_cmp(b));
        outputs.dedup();

        let mut state = state0.clone();
        let mut observed = Vec::with_capacity(outputs.len());
        let mut next_out = 0;
        let mut steps = 0;
        loop {
            while next_out < outputs.len() && outputs[next_out] <= state.t {
                observer(&state)?;
                observed.push(state.t);
                next_out += 1;
            }
            if state.t >= t_end {
                break;
            }
            let mut dt = self.stable_dt(&state);
            let target = if next_out < outputs.len() { outputs[next_out].min(t_end) } else { t_end };
            let snap = target - state.t <= dt * (1.0 + 1e-9);
            if snap {
                dt = target - state.t;
            }
            let mut next = self.step(&state, dt)?;
            if snap {
                next.t = target;
            }
            state = next;
            steps += 1;
        }
        let mass_drift = self.mass_drift(&state, initial_mass);
        Ok(RunSummary {
            state,
            observed,
            steps,
            mass_drift,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Bump,
    Gaussian,
    Zero,
}

impl Shape {
    pub fn as_str(&self) -> &'static str {
        match self {
            Shape::Bump => "bump",
            Shape::Gaussian => "gaussian",
            Shape::Zero => "zero",
        }
    }
}

/// Initial perturbation `a_field * b(x)` added to the stationary profile,
/// where `b` has maximum 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub shape: Shape,
    pub a_rho: f64,
    pub a_u: f64,
    pub a_omega: f64,
    pub center: f64,
    pub width: f64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        PerturbationSpec {
            shape: Shape::Zero,
            a_rho: 0.0,
            a_u: 0.0,
            a_omega: 0.0,
            center: 0.0,
            width: 1.0,
        }
    }
}

/// Values of `b` below this count as zero at the domain ends.
pub const SHAPE_TOL: f64 = 1e-12;

impl PerturbationSpec {
    /// The shape function `b(x)`.
    pub fn shape_at(&self, x: f64) -> f64 {
        let r = (x - self.center) / self.width;
        match self.shape {
            Shape::Zero => 0.0,
            Shape::Gaussian => (-r * r).exp(),
            Shape::Bump => {
                if r.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - r * r)).exp()
                } else {
                    0.0
                }
            }
        }
    }
}

/// Weighted norms of the initial perturbation fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialNorms {
    pub rho: f64,
    pub u: f64,
    pub omega: f64,
}

/// Adds the perturbation to the profile and reports the weighted norms of
/// `(rho0 - rho~, u0 - u~, omega0 - omega~)`.
pub fn build_initial(
    profile: &StationaryProfile,
    spec: &PerturbationSpec,
    weight: &WeightSpec,
) -> Result<(State, InitialNorms)> {
    let grid = profile.grid;
    if spec.shape != Shape::Zero && !(spec.width > 0.0) {
        return Err(Error::InvalidParam {
            field: "perturbation.width",
            reason: format!("must be > 0, got {}", spec.width),
        });
    }
    let b0 = spec.shape_at(0.0);
    if b0.abs() > SHAPE_TOL {
        return Err(Error::CompatibilityViolated { value: b0 });
    }
    let bl = spec.shape_at(grid.length);
    if bl.abs() > SHAPE_TOL {
        return Err(Error::InvalidParam {
            field: "perturbation",
            reason: format!("shape does not vanish at x = L (b(L) = {bl:e})"),
        });
    }
    let b: Vec<f64> = grid.nodes().iter().map(|&x| spec.shape_at(x)).collect();
    let mut state = State::from_profile(profile);
    for j in 0..grid.len() {
        state.rho[j] += spec.a_rho * b[j];
        state.u[j] += spec.a_u * b[j];
        state.omega[j] += spec.a_omega * b[j];
        if !(state.rho[j] > 0.0) {
            return Err(Error::PositivityLost { x: grid.x(j), t: 0.0 });
        }
    }
    // compatibility at x = 0 holds exactly
    state.u[0] = profile.u[0];
    state.omega[0] = profile.omega[0];

    let dev = |f: &[f64], g: &[f64]| -> Vec<f64> { f.iter().zip(g).map(|(a, b)| a - b).collect() };
    let norms = InitialNorms {
        rho: weighted_norm(&dev(&state.rho, &profile.rho), weight, &grid),
        u: weighted_norm(&dev(&state.u, &profile.u), weight, &grid),
        omega: weighted_norm(&dev(&state.omega, &profile.omega), weight, &grid),
    };
    Ok((state, norms))
}
