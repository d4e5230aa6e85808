//! Physical parameters of the half-line outflow problem and the closed-form
//! scalars derived from them.
//!
//! The pressure law is `p(rho) = K rho^gamma`. Fluid leaves the domain
//! through `x = 0` (`u_b < 0`) and approaches `(rho_plus, u_plus, 0)` at
//! infinity.

use crate::error::{Error, Result};

/// Relative distance from `M+ = 1` below which the far field is treated as transonic.
pub const TRANSONIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Viscosity of the velocity equation.
    pub lambda: f64,
    /// Microrotation damping coefficient.
    pub mu: f64,
    /// Microrotation viscosity.
    pub nu: f64,
    /// Gas constant in `p = K rho^gamma`.
    pub k: f64,
    pub gamma: f64,
    pub rho_plus: f64,
    pub u_plus: f64,
    pub u_b: f64,
    pub omega_b: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            lambda: 1.0,
            mu: 1.0,
            nu: 1.0,
            k: 1.0 / (1.4 * 2.25),
            gamma: 1.4,
            rho_plus: 1.0,
            u_plus: -1.0,
            u_b: -0.9,
            omega_b: 0.05,
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            field,
            reason: format!("must be finite and > 0, got {v}"),
        })
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        positive("lambda", self.lambda)?;
        positive("mu", self.mu)?;
        positive("nu", self.nu)?;
        positive("K", self.k)?;
        positive("rho_plus", self.rho_plus)?;
        if !(self.gamma.is_finite() && self.gamma >= 1.0) {
            return Err(Error::InvalidParam {
                field: "gamma",
                reason: format!("must satisfy gamma >= 1, got {}", self.gamma),
            });
        }
        if !(self.u_plus.is_finite() && self.u_plus < 0.0) {
            return Err(Error::InvalidParam {
                field: "u_plus",
                reason: format!("far-field velocity must be < 0, got {}", self.u_plus),
            });
        }
        if !(self.u_b.is_finite() && self.u_b < 0.0) {
            return Err(Error::InvalidParam {
                field: "u_b",
                reason: format!("outflow requires u_b < 0, got {}", self.u_b),
            });
        }
        if !self.omega_b.is_finite() || self.omega_b == 0.0 {
            return Err(Error::InvalidParam {
                field: "omega_b",
                reason: format!("boundary microrotation must be nonzero, got {}", self.omega_b),
            });
        }
        Ok(())
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.k * rho.powf(self.gamma)
    }

    /// `p'(rho) = K gamma rho^(gamma - 1)`, the squared sound speed.
    pub fn pressure_slope(&self, rho: f64) -> f64 {
        self.k * self.gamma * rho.powf(self.gamma - 1.0)
    }

    pub fn sound_speed(&self, rho: f64) -> f64 {
        self.pressure_slope(rho).sqrt()
    }

    pub fn mach_plus(&self) -> f64 {
        self.u_plus.abs() / self.sound_speed(self.rho_plus)
    }

    /// Boundary value of the normalized velocity `u_b / u_plus`.
    pub fn chi0(&self) -> f64 {
        self.u_b / self.u_plus
    }

    /// `max(|omega_b|, |u_b - u_plus|)`.
    pub fn delta_tilde(&self) -> f64 {
        self.omega_b.abs().max((self.u_b - self.u_plus).abs())
    }

    /// Returns a copy whose far-field velocity makes `M+ = mach` exactly in
    /// floating point, keeping `u_b / u_plus` fixed.
    pub fn with_mach(&self, mach: f64) -> ModelParams {
        let chi0 = self.chi0();
        let u_plus = -mach * self.sound_speed(self.rho_plus);
        ModelParams {
            u_plus,
            u_b: chi0 * u_plus,
            ..*self
        }
    }
}

/// Far-field velocity `-c_plus` for which `M+ = 1`.
pub fn transonic_u_plus(k: f64, gamma: f64, rho_plus: f64) -> f64 {
    -(k * gamma * rho_plus.powf(gamma - 1.0)).sqrt()
}

/// Decay rate of the stationary profile, `min(|r1|, xi0)`.
///
/// `xi0` is only known after a supersonic profile has been computed; until
/// then the value is `|r1|` and `provisional` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigma {
    pub value: f64,
    pub provisional: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub c_plus: f64,
    pub mach_plus: f64,
    pub r1: f64,
    pub r2: f64,
    pub delta_tilde: f64,
    pub sigma: Sigma,
    /// `(gamma + 1) rho_plus / (2 lambda)`.
    pub a: f64,
    /// `delta_tilde * a`.
    pub b: f64,
    pub theta_star: f64,
}

impl DerivedConstants {
    /// Replaces the provisional decay rate once `xi0` has been measured.
    pub fn finalize_sigma(&mut self, xi0: f64) {
        self.sigma = Sigma {
            value: self.r1.abs().min(xi0),
            provisional: false,
        };
    }
}

/// Roots `(r1, r2)` of `nu r^2 - rho_plus u_plus r - mu = 0`, `r1 < 0 < r2`.
///
/// The root of larger magnitude comes from the quadratic formula with no
/// subtraction of nearly equal terms; the other one from `r1 r2 = -mu / nu`.
pub fn char_roots(p: &ModelParams) -> Result<(f64, f64)> {
    positive("nu", p.nu)?;
    positive("mu", p.mu)?;
    Ok(char_roots_raw(p.nu, p.rho_plus * p.u_plus, p.mu))
}

fn char_roots_raw(nu: f64, flux: f64, mu: f64) -> (f64, f64) {
    let disc = (flux * flux + 4.0 * nu * mu).sqrt();
    let q = if flux > 0.0 {
        0.5 * (flux + disc)
    } else {
        0.5 * (flux - disc)
    };
    let big = q / nu;
    let small = -mu / q;
    if big < small {
        (big, small)
    } else {
        (small, big)
    }
}

/// Positive root of `theta (theta - 2) = 4 / (gamma + 1)`.
pub fn theta_star(gamma: f64) -> f64 {
    1.0 + (1.0 + 4.0 / (gamma + 1.0)).sqrt()
}

pub fn derive_constants(p: &ModelParams) -> Result<DerivedConstants> {
    p.validate()?;
    let c_plus = p.sound_speed(p.rho_plus);
    let (r1, r2) = char_roots(p)?;
    let delta_tilde = p.delta_tilde();
    let a = (p.gamma + 1.0) * p.rho_plus / (2.0 * p.lambda);
    Ok(DerivedConstants {
        c_plus,
        mach_plus: p.u_plus.abs() / c_plus,
        r1,
        r2,
        delta_tilde,
        sigma: Sigma {
            value: r1.abs(),
            provisional: true,
        },
        a,
        b: delta_tilde * a,
        theta_star: theta_star(p.gamma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(k: f64, gamma: f64, rho_plus: f64, u_plus: f64) -> ModelParams {
        ModelParams {
            k,
            gamma,
            rho_plus,
            u_plus,
            u_b: u_plus * 1.1,
            ..ModelParams::default()
        }
    }

    #[test]
    fn sound_speed_and_mach_isothermal() {
        let d = derive_constants(&params(1.0, 1.0, 1.0, -2.0)).unwrap();
        assert_eq!(d.c_plus, 1.0);
        assert_eq!(d.mach_plus, 2.0);
    }

    #[test]
    fn roots_exact_factorization() {
        let p = ModelParams {
            nu: 1.0,
            mu: 2.0,
            rho_plus: 1.0,
            u_plus: -1.0,
            ..ModelParams::default()
        };
        let (r1, r2) = char_roots(&p).unwrap();
        assert_eq!((r1, r2), (-2.0, 1.0));
    }

    #[test]
    fn roots_symmetric_when_no_flux() {
        let (r1, r2) = char_roots_raw(3.0, 0.0, 3.0);
        assert_eq!((r1, r2), (-1.0, 1.0));
    }

    #[test]
    fn roots_degenerate_small_mu() {
        let (r1, r2) = char_roots_raw(1.0, -2.0, 1e-14);
        assert_relative_eq!(r1, -2.0, max_relative = 1e-12);
        // cancellation-safe: r2 ~ mu / |flux| keeps full precision
        assert_relative_eq!(r2, 5e-15, max_relative = 1e-12);
    }

    #[test]
    fn theta_star_isothermal() {
        // oracle: quadratic formula for theta^2 - 2 theta - 2 = 0
        let oracle = (2.0 + (4.0f64 + 8.0).sqrt()) / 2.0;
        assert_relative_eq!(theta_star(1.0), oracle, max_relative = 1e-15);
        assert_relative_eq!(theta_star(1.0), 2.7320508075688772, max_relative = 1e-15);
    }

    #[test]
    fn theta_star_range() {
        for g in [1.0, 1.4, 2.0, 5.0, 100.0] {
            let t = theta_star(g);
            assert!(t > 2.0 && t <= 1.0 + 3f64.sqrt() + 1e-15);
        }
    }

    #[test]
    fn transonic_constants() {
        let mut p = params(1.0, 1.4, 1.0, -1.0);
        p.u_b = -1.05;
        p.omega_b = 0.02;
        let d = derive_constants(&p).unwrap();
        assert_relative_eq!(d.delta_tilde, 0.05, max_relative = 1e-12);
        assert_relative_eq!(d.a, 1.2, max_relative = 1e-15);
        assert_relative_eq!(d.b, 0.06, max_relative = 1e-12);
        assert!(d.sigma.provisional);
    }

    #[test]
    fn finalize_sigma_takes_min() {
        let mut d = derive_constants(&ModelParams::default()).unwrap();
        let r1 = d.r1.abs();
        d.finalize_sigma(0.3);
        assert_eq!(d.sigma.value, 0.3f64.min(r1));
        assert!(!d.sigma.provisional);
        d.finalize_sigma(r1 + 1.0);
        assert_eq!(d.sigma.value, r1);
    }

    #[test]
    fn rejects_bad_params() {
        let cases: [(&str, ModelParams); 6] = [
            ("lambda", ModelParams { lambda: 0.0, ..Default::default() }),
            ("gamma", ModelParams { gamma: 0.5, ..Default::default() }),
            ("u_b", ModelParams { u_b: 0.1, ..Default::default() }),
            ("u_plus", ModelParams { u_plus: 0.0, ..Default::default() }),
            ("omega_b", ModelParams { omega_b: 0.0, ..Default::default() }),
            ("K", ModelParams { k: -1.0, ..Default::default() }),
        ];
        for (name, p) in cases {
            match derive_constants(&p) {
                Err(Error::InvalidParam { field, .. }) => assert_eq!(field, name),
                other => panic!("{name}: expected InvalidParam, got {other:?}"),
            }
        }
    }

    #[test]
    fn with_mach_hits_target() {
        let p = ModelParams::default().with_mach(1.0);
        assert!((p.mach_plus() - 1.0).abs() <= TRANSONIC_TOL);
        assert_relative_eq!(p.chi0(), ModelParams::default().chi0(), max_relative = 1e-15);
        assert_eq!(transonic_u_plus(p.k, p.gamma, p.rho_plus), p.u_plus);
    }
}
