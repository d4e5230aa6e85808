use micropolar_lab::analysis::{l2_norm, phi_potential, poincare_certificate, weighted_norm, WeightSpec};
use micropolar_lab::config::{parse_config, serialize_config, ExperimentConfig, WeightConfig};
use micropolar_lab::model::{char_roots, theta_star};
use micropolar_lab::numerics::bisect;
use micropolar_lab::solver::{rhs, State};
use micropolar_lab::stationary::classify;
use micropolar_lab::{Grid, ModelParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (
        (0.1f64..5.0, 0.1f64..5.0, 0.1f64..5.0),
        (0.1f64..3.0, 1.0f64..3.0, 0.2f64..3.0),
        (0.2f64..3.0, 0.5f64..1.5, 0.01f64..0.3),
    )
        .prop_map(|((lambda, mu, nu), (k, gamma, rho_plus), (speed, chi0, omega_b))| ModelParams {
            lambda,
            mu,
            nu,
            k,
            gamma,
            rho_plus,
            u_plus: -speed,
            u_b: -speed * chi0,
            omega_b,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn roots_satisfy_vieta(p in params()) {
        let (r1, r2) = char_roots(&p).unwrap();
        prop_assert!(r1 < 0.0 && r2 > 0.0);
        let scale = r1.abs().max(r2.abs());
        prop_assert!((r1 + r2 - p.rho_plus * p.u_plus / p.nu).abs() <= 1e-13 * scale);
        prop_assert!((r1 * r2 + p.mu / p.nu).abs() <= 1e-13 * scale * scale);
    }

    #[test]
    fn theta_star_matches_bisection(gamma in 1.0f64..5.0) {
        let g = |t: f64| t * (t - 2.0) - 4.0 / (gamma + 1.0);
        let root = bisect(g, 2.0, 4.0).unwrap();
        prop_assert!((theta_star(gamma) - root).abs() < 1e-12);
        prop_assert!(theta_star(gamma) > 2.0);
    }

    /// The regime depends only on M+ and chi0: rescaling velocities by `s`
    /// and K by `s^2` (and the viscosities arbitrarily) changes neither.
    #[test]
    fn classification_is_scale_invariant(p in params(), s in 0.2f64..5.0, visc in 0.1f64..10.0) {
        let q = ModelParams {
            k: p.k * s * s,
            u_plus: p.u_plus * s,
            u_b: p.u_b * s,
            lambda: p.lambda * visc,
            nu: p.nu * visc,
            mu: p.mu / visc,
            ..p
        };
        let a = classify(&p).unwrap();
        let b = classify(&q).unwrap();
        prop_assume!((a.mach - 1.0).abs() > 1e-6);
        prop_assert_eq!(a.regime, b.regime);
    }

    /// Interior mass changes only through the two end fluxes.
    #[test]
    fn semi_discrete_mass_balance(p in params(), amp in 0.0f64..0.3, seed in 0u64..1000) {
        let grid = Grid::new(10.0, 64).unwrap();
        let x = grid.nodes();
        let phase = seed as f64;
        let state = State {
            t: 0.0,
            grid,
            rho: x.iter().map(|v| 1.0 + amp * (v + phase).sin()).collect(),
            u: x.iter().map(|v| p.u_plus * (1.0 + amp * (0.7 * v).cos())).collect(),
            omega: x.iter().map(|v| p.omega_b * (-v).exp()).collect(),
        };
        let r = rhs(&state, &p, None).unwrap();
        let total: f64 = r.rho[1..grid.cells].iter().sum::<f64>() * grid.h;
        prop_assert!((total + r.mass_out).abs() <= 1e-12 * (1.0 + r.mass_out.abs()));
    }

    #[test]
    fn phi_is_nonnegative_and_vanishes_on_the_diagonal(
        rho in 0.25f64..4.0, rt in 0.25f64..4.0, gamma in 1.0f64..3.0, k in 0.1f64..3.0
    ) {
        let p = ModelParams { k, gamma, ..ModelParams::default() };
        let v = phi_potential(rho, rt, &p).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert_eq!(phi_potential(rt, rt, &p).unwrap(), 0.0);
        if (rho - rt).abs() > 1e-3 {
            prop_assert!(v > 0.0);
        }
    }

    #[test]
    fn poincare_holds_for_smooth_fields(
        c0 in -1.0f64..1.0,
        amps in prop::collection::vec(-1.0f64..1.0, 1..8),
        sigma in prop::sample::select(vec![0.5, 1.0, 2.0]),
    ) {
        let grid = Grid::new(60.0, 1500).unwrap();
        let h: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| c0 + amps.iter().enumerate().map(|(m, a)| a / (m + 1) as f64 * ((m + 1) as f64 * 0.3 * x).sin()).sum::<f64>())
            .collect();
        let cert = poincare_certificate(&h, sigma, &grid).unwrap();
        prop_assert!(cert.holds, "lhs {} rhs {}", cert.lhs, cert.rhs);
    }

    #[test]
    fn unit_weight_norm_is_plain_l2(beta in 0.0f64..2.0, vals in prop::collection::vec(-5.0f64..5.0, 17..64)) {
        let grid = Grid::new(3.0, vals.len() - 1).unwrap();
        let w = WeightSpec::new(0.0, beta, 0).unwrap();
        prop_assert_eq!(weighted_norm(&vals, &w, &grid).to_bits(), l2_norm(&vals, &grid).to_bits());
    }

    #[test]
    fn config_round_trip(
        k in 0.05f64..2.0,
        omega_b in 0.001f64..0.5,
        cells in 16usize..5000,
        t_end in 5.0f64..100.0,
        alpha in 0.0f64..3.0,
        beta in prop::option::of(0.0f64..1.0),
    ) {
        let mut cfg = ExperimentConfig::default();
        cfg.params.k = k;
        cfg.params.omega_b = omega_b;
        cfg.grid.cells = cells;
        cfg.run.t_end = t_end;
        cfg.weights = vec![WeightConfig { alpha, beta, order: 1 }];
        let text = serialize_config(&cfg);
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}
