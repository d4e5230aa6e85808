//! Randomized invariant suite behind the `check` subcommand.
//!
//! Every check draws its inputs from a ChaCha stream seeded by the caller,
//! so a seed reproduces a run exactly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    algebraic_poincare_certificate, fit_decay, l2_norm, phi_potential, poincare_certificate, weighted_norm, WeightSpec,
};
use crate::csv_io::{read_snapshot, write_snapshot};
use crate::error::Result;
use crate::experiment::Report;
use crate::grid::Grid;
use crate::model::{char_roots, theta_star, ModelParams};
use crate::solver::State;
use crate::stationary::{classify, Regime};

/// Number of random fields per Poincare check.
pub const POINCARE_TRIALS: usize = 1000;
pub const POINCARE_SIGMAS: [f64; 3] = [0.5, 1.0, 2.0];

/// A random `C^1` field `c0 + sum_m a_m sin(m pi x / L + phase_m)` with
/// amplitudes decaying like `1 / m`.
pub fn random_fourier_field<R: Rng>(rng: &mut R, grid: &Grid, modes: usize) -> Vec<f64> {
    let c0: f64 = rng.gen_range(-1.0..1.0);
    let terms: Vec<(f64, f64, f64)> = (1..=modes)
        .map(|m| {
            let a = rng.gen_range(-1.0..1.0) / m as f64;
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            (a, m as f64 * std::f64::consts::PI / grid.length, phase)
        })
        .collect();
    grid.nodes()
        .iter()
        .map(|&x| c0 + terms.iter().map(|(a, k, ph)| a * (k * x + ph).sin()).sum::<f64>())
        .collect()
}

/// Violations of the exponential-weight certificate over `trials` fields at `sigma`.
pub fn poincare_campaign<R: Rng>(rng: &mut R, sigma: f64, trials: usize) -> Result<usize> {
    let grid = Grid::new(40.0 / sigma.min(1.0), 2000)?;
    let mut bad = 0;
    for _ in 0..trials {
        let modes = rng.gen_range(1..=12);
        let h = random_fourier_field(rng, &grid, modes);
        if !poincare_certificate(&h, sigma, &grid)?.holds {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Violations of the algebraic-weight certificate with exponent `k` and a
/// random scale `delta` in `[0.05, 1]`.
pub fn algebraic_poincare_campaign<R: Rng>(rng: &mut R, k: f64, trials: usize) -> Result<usize> {
    let mut bad = 0;
    for _ in 0..trials {
        let delta = rng.gen_range(0.05..1.0);
        let grid = Grid::new(200.0 / delta, 2000)?;
        let modes = rng.gen_range(1..=12);
        let h = random_fourier_field(rng, &grid, modes);
        if !algebraic_poincare_certificate(&h, delta, k, &grid)?.holds {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// Largest relative error of the closed-form pressure potential against
/// quadrature of its defining integral.
pub fn phi_quadrature_error<R: Rng>(rng: &mut R, trials: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..trials {
        let gamma = [1.0, 1.4, 2.0][i % 3];
        let p = ModelParams { k: rng.gen_range(0.2..3.0), gamma, ..ModelParams::default() };
        let rho = rng.gen_range(0.25..4.0);
        let rt = rng.gen_range(0.25..4.0);
        let closed = phi_potential(rho, rt, &p)?;
        let pt = p.pressure(rt);
        let quad = adaptive_simpson(&|s: f64| (p.pressure(s) - pt) / (s * s), rt, rho, 1e-15);
        let err = (closed - quad).abs() / quad.abs().max(1e-300);
        if closed != 0.0 || quad != 0.0 {
            worst = worst.max(if quad.abs() < 1e-14 { (closed - quad).abs() } else { err });
        }
    }
    Ok(worst)
}

fn random_params<R: Rng>(rng: &mut R) -> ModelParams {
    let u_plus = -rng.gen_range(0.2..3.0);
    ModelParams {
        lambda: rng.gen_range(0.1..5.0),
        mu: rng.gen_range(0.1..5.0),
        nu: rng.gen_range(0.1..5.0),
        k: rng.gen_range(0.1..3.0),
        gamma: rng.gen_range(1.0..3.0),
        rho_plus: rng.gen_range(0.2..3.0),
        u_plus,
        u_b: u_plus * rng.gen_range(0.5..1.5),
        omega_b: rng.gen_range(0.01..0.2),
    }
}

/// Largest Vieta defect `|r1 + r2 - rho u / nu| + |r1 r2 + mu / nu|` (relative).
pub fn vieta_defect<R: Rng>(rng: &mut R, trials: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let p = random_params(rng);
        let (r1, r2) = char_roots(&p)?;
        let sum = p.rho_plus * p.u_plus / p.nu;
        let prod = -p.mu / p.nu;
        let scale = r1.abs().max(r2.abs());
        worst = worst.max((r1 + r2 - sum).abs() / scale + (r1 * r2 - prod).abs() / (scale * scale));
    }
    Ok(worst)
}

/// Fraction of random parameter sets where the classifier disagrees with the
/// existence rule `M+ >= 1` and `chi0 > chi_c` (or `chi0 = 1`).
pub fn classify_disagreements<R: Rng>(rng: &mut R, trials: usize) -> Result<usize> {
    let mut bad = 0;
    for _ in 0..trials {
        let p = random_params(rng);
        let prob = classify(&p)?;
        let exists = prob.mach >= 1.0 && prob.chi_c.is_some_and(|c| p.chi0() > c || p.chi0() == 1.0);
        if exists != (prob.regime != Regime::NonExistent) {
            bad += 1;
        }
        if p.chi0() > 1.0 && prob.mach >= 1.0 && prob.regime == Regime::NonExistent {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Runs the whole suite. CSV round trips go through a temporary directory.
pub fn run_check_suite(seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = Report::default();
    rep.lines.push("# micropolar-lab invariant suite".into());
    rep.info("seed", seed);

    for sigma in POINCARE_SIGMAS {
        let bad = poincare_campaign(&mut rng, sigma, POINCARE_TRIALS)?;
        rep.check(&format!("poincare_exponential_sigma_{sigma}"), bad == 0, bad as f64);
    }
    let bad = algebraic_poincare_campaign(&mut rng, 2.0, POINCARE_TRIALS)?;
    rep.check("poincare_algebraic_k2", bad == 0, bad as f64);

    let err = phi_quadrature_error(&mut rng, 300)?;
    rep.check("phi_closed_form", err <= 1e-10, err);

    let v = vieta_defect(&mut rng, 500)?;
    rep.check("char_roots_vieta", v <= 1e-12, v);

    let worst_theta = [1.0, 1.4, 5.0 / 3.0, 2.0, 3.0]
        .iter()
        .map(|&g| {
            let t = theta_star(g);
            (t * (t - 2.0) - 4.0 / (g + 1.0)).abs()
        })
        .fold(0.0f64, f64::max);
    rep.check("theta_star_root", worst_theta <= 1e-12, worst_theta);

    let bad = classify_disagreements(&mut rng, 500)?;
    rep.check("existence_rule", bad == 0, bad as f64);

    let mut worst_fit = 0.0f64;
    for _ in 0..50 {
        let k = rng.gen_range(0.1..3.0);
        let c = rng.gen_range(0.1..10.0);
        let t: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        let n: Vec<f64> = t.iter().map(|t| c * (1.0 + t).powf(-k)).collect();
        let fit = fit_decay(&t, &n, 2.0)?;
        worst_fit = worst_fit.max((fit.fitted_exponent - k).abs().max(fit.fit_residual));
    }
    rep.check("fit_decay_exact", worst_fit < 1e-9, worst_fit);

    let grid = Grid::new(rng.gen_range(1.0..50.0), 333)?;
    let f = random_fourier_field(&mut rng, &grid, 8);
    let plain = weighted_norm(&f, &WeightSpec::new(0.0, rng.gen_range(0.0..1.0), 0)?, &grid);
    rep.check("unit_weight_is_l2", plain.to_bits() == l2_norm(&f, &grid).to_bits(), plain);

    let dir = std::env::temp_dir().join(format!("micropolar-lab-check-{}-{seed}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let state = State {
        t: rng.gen_range(0.0..100.0),
        grid,
        rho: f.iter().map(|v| 2.0 + v).collect(),
        u: random_fourier_field(&mut rng, &grid, 5),
        omega: random_fourier_field(&mut rng, &grid, 5),
    };
    let path = dir.join("snapshot.csv");
    write_snapshot(&path, &state)?;
    let same = read_snapshot(&path)? == state;
    let _ = std::fs::remove_dir_all(&dir);
    rep.check("csv_round_trip", same, if same { 0.0 } else { 1.0 });
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_smooth_function() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-14);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-13);
        // reversed limits flip the sign
        let w = adaptive_simpson(&|x: f64| x * x, 2.0, 0.0, 1e-14);
        assert!((w + 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn fourier_field_is_seeded() {
        let g = Grid::new(10.0, 100).unwrap();
        let a = random_fourier_field(&mut ChaCha8Rng::seed_from_u64(3), &g, 6);
        let b = random_fourier_field(&mut ChaCha8Rng::seed_from_u64(3), &g, 6);
        assert_eq!(a, b);
    }

    #[test]
    fn suite_passes_for_a_seed() {
        let rep = run_check_suite(11).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{}", c.line());
        }
    }
}
