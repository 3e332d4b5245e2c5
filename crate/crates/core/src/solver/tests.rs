use super::*;
use crate::background::{BackgroundSpec, Sign};
use crate::spectral::airy_propagate;
use num_complex::Complex64;

fn gaussian(grid: Grid, a: f64, w: f64, c: f64) -> PhysicalField {
    PhysicalField::from_fn(grid, |x| a * (-((x - c) / w).powi(2)).exp())
}

fn soliton(grid: Grid, c: f64, x0: f64) -> PhysicalField {
    PhysicalField::from_fn(grid, |x| 1.5 * c / (0.5 * c.sqrt() * (x - x0)).cosh().powi(2))
}

fn mkdv_kink() -> (BackgroundField, AnalyticNonlinearity) {
    let nl = AnalyticNonlinearity::mkdv(-1.0);
    let bg = BackgroundField::new(
        BackgroundSpec::MkdvKink {
            c: 1.0,
            sign: Sign::Plus,
        },
        &nl,
    )
    .unwrap();
    (bg, nl)
}

fn gardner_kink() -> (BackgroundField, AnalyticNonlinearity) {
    let nl = AnalyticNonlinearity::gardner(0.5);
    let bg = BackgroundField::new(
        BackgroundSpec::GardnerKink {
            c: 1.0,
            beta: 0.5,
            sign: Sign::Plus,
        },
        &nl,
    )
    .unwrap();
    (bg, nl)
}

/// Spectral interpolation of `u` and its first two derivatives at `x`.
fn eval_derivs(u: &SpectralField, x: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, c) in u.coeffs().iter().enumerate() {
        let xi = u.grid().wavenumber(k);
        let e = c * Complex64::from_polar(1.0, xi * x);
        out[0] += e.re;
        out[1] += (e * Complex64::new(0.0, xi)).re;
        out[2] += (e * -(xi * xi)).re;
    }
    out
}

fn peak(u: &PhysicalField) -> f64 {
    let (j, _) = u
        .values()
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |b, (j, &v)| if v > b.1 { (j, v) } else { b });
    let spec = u.transform();
    let mut x = u.grid().x(j);
    for _ in 0..30 {
        let [_, d1, d2] = eval_derivs(&spec, x);
        x -= d1 / d2;
    }
    x
}

#[test]
fn config_validation_and_lattice() {
    assert!(SolverConfig::new(0.0, 1.0).validate().is_err());
    assert!(SolverConfig::new(0.1, -1.0).validate().is_err());
    assert!(SolverConfig::new(0.1, 1.0).with_mu(-0.1).validate().is_err());
    let mut c = SolverConfig::new(0.1, 1.0);
    c.buffer = 0.5;
    assert!(c.validate().is_err());
    let (steps, h) = SolverConfig::new(0.3, 1.0).lattice();
    assert_eq!(steps, 4);
    assert!((h - 0.25).abs() < 1e-15);
    let (steps, h) = SolverConfig::new(1e-3, 1.0).with_save_every(7).lattice();
    assert_eq!(steps % 7, 0);
    assert!(h <= 1e-3 && steps >= 1000);
    let (steps, _) = SolverConfig::new(0.01, 1.0).lattice();
    assert_eq!(steps, 100);
}

#[test]
fn config_toml_round_trip() {
    let text = "dt = 0.001\nt_final = 1.0\nscheme = \"ifrk4\"\nmu = 0.05\ndealias = \"two-thirds\"\n";
    let c: SolverConfig = toml::from_str(text).unwrap();
    assert_eq!(c.scheme, Scheme::Ifrk4);
    assert_eq!(c.dealias, DealiasRule::TwoThirds);
    assert_eq!(c.buffer, 0.1);
    let back: SolverConfig = toml::from_str(&toml::to_string(&c).unwrap()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn rhs_of_zero_is_minus_forcing() {
    let grid = Grid::new(40.0, 1024).unwrap();
    let nl = AnalyticNonlinearity::kdv();
    let bg = BackgroundField::new(BackgroundSpec::Synthetic, &nl).unwrap();
    let cfg = SolverConfig::new(1e-3, 1.0);
    let r = rhs(&PhysicalField::zeros(grid), &bg, &nl, 0.2, &cfg).unwrap();
    let s = bg.residual_S(&nl, 0.2, &grid).unwrap();
    let taper = grid.boundary_taper(cfg.buffer);
    let scale = s.max_abs();
    assert!(scale > 0.0);
    #[allow(clippy::needless_range_loop)]
    for j in 0..grid.n() {
        let expect = -s.values()[j] * taper[j];
        assert!((r.values()[j] - expect).abs() < 1e-12 * scale);
        if !grid.in_buffer(j, cfg.buffer) {
            assert!((r.values()[j] + s.values()[j]).abs() < 1e-12 * scale);
        }
    }
}

#[test]
fn rhs_kdv_without_background() {
    let grid = Grid::new(20.0, 256).unwrap();
    let u = gaussian(grid, 0.8, 1.5, 0.0);
    let r = rhs(
        &u,
        &BackgroundField::zero(),
        &AnalyticNonlinearity::kdv(),
        0.0,
        &SolverConfig::new(1e-3, 1.0),
    )
    .unwrap();
    let w = 1.5f64;
    for (j, v) in r.values().iter().enumerate() {
        let x = grid.x(j);
        let g = 0.8 * (-(x / w).powi(2)).exp();
        let y = x / w;
        let gx = g * (-2.0 * y / w);
        let gxxx = g * (12.0 * y - 8.0 * y.powi(3)) / w.powi(3);
        assert!((v - (-gxxx - 2.0 * g * gx)).abs() < 1e-11, "x = {x}");
    }
}

#[test]
fn rhs_with_viscosity() {
    let grid = Grid::new(20.0, 256).unwrap();
    let u = gaussian(grid, 1.0, 1.0, 0.0);
    let zero = AnalyticNonlinearity::zero();
    let cfg = SolverConfig::new(1e-3, 1.0).with_mu(0.3);
    let r = rhs(&u, &BackgroundField::zero(), &zero, 0.0, &cfg).unwrap();
    for (j, v) in r.values().iter().enumerate() {
        let x = grid.x(j);
        let g = (-x * x).exp();
        let gxx = g * (4.0 * x * x - 2.0);
        let gxxx = g * (12.0 * x - 8.0 * x.powi(3));
        assert!((v - (-gxxx + 0.3 * gxx)).abs() < 1e-11);
    }
}

#[test]
fn rhs_vanishes_on_exact_kinks() {
    let grid = Grid::new(40.0, 512).unwrap();
    for (bg, nl) in [mkdv_kink(), gardner_kink()] {
        let r = rhs(
            &PhysicalField::zeros(grid),
            &bg,
            &nl,
            0.37,
            &SolverConfig::new(1e-3, 1.0),
        )
        .unwrap();
        assert!(r.max_abs() <= 1e-10, "{}", r.max_abs());
    }
}

#[test]
fn rhs_rejects_unresolved_input() {
    let grid = Grid::new(20.0, 64).unwrap();
    let u = PhysicalField::from_fn(grid, |x| if x.abs() < 1.0 { 1.0 } else { 0.0 });
    let r = rhs(
        &u,
        &BackgroundField::zero(),
        &AnalyticNonlinearity::kdv(),
        0.0,
        &SolverConfig::new(1e-3, 1.0),
    );
    assert!(matches!(r, Err(Error::Unresolved { .. })));
}

#[test]
fn linear_step_is_exact_propagator() {
    let grid = Grid::new(20.0, 256).unwrap();
    let u0 = gaussian(grid, 1.0, 1.0, 2.0);
    for scheme in [Scheme::Etdrk4, Scheme::Ifrk4] {
        let cfg = SolverConfig::new(0.05, 1.0).with_scheme(scheme);
        let s = step(
            &SimulationState::new(&u0, 0.0),
            &cfg,
            &BackgroundField::zero(),
            &AnalyticNonlinearity::zero(),
        )
        .unwrap();
        let exact = airy_propagate(&u0.transform(), 0.05).inverse();
        assert!(s.u().sub(&exact).unwrap().max_abs() <= 1e-12);
        assert_eq!(s.step, 1);
        assert!((s.t - 0.05).abs() < 1e-16);
    }
}

#[test]
fn zero_perturbation_persists_on_kinks() {
    let grid = Grid::new(40.0, 512).unwrap();
    for (bg, nl) in [mkdv_kink(), gardner_kink()] {
        let cfg = SolverConfig::new(1e-3, 1.0);
        let traj = evolve(&PhysicalField::zeros(grid), &bg, &nl, &cfg).unwrap();
        assert_eq!(traj.len(), 1001);
        let sup = traj.sup_norm(|f| f.max_abs());
        assert!(sup <= 1e-10, "{sup}");
    }
}

#[test]
fn zero_data_zero_background() {
    let grid = Grid::new(10.0, 64).unwrap();
    let traj = evolve(
        &PhysicalField::zeros(grid),
        &BackgroundField::zero(),
        &AnalyticNonlinearity::kdv(),
        &SolverConfig::new(0.01, 0.5).with_save_every(5),
    )
    .unwrap();
    assert_eq!(traj.len(), 11);
    assert!((traj.dt() - 0.05).abs() < 1e-15);
    assert!(traj.frames().iter().all(|f| f.max_abs() == 0.0));
}

fn kdv_gaussian_final(dt: f64, scheme: Scheme) -> PhysicalField {
    let grid = Grid::new(20.0, 256).unwrap();
    let u0 = gaussian(grid, 1.0, 2.0, 0.0);
    let cfg = SolverConfig::new(dt, 0.5).with_scheme(scheme);
    evolve(&u0, &BackgroundField::zero(), &AnalyticNonlinearity::kdv(), &cfg)
        .unwrap()
        .last()
        .unwrap()
        .clone()
}

#[test]
fn fourth_order_in_time() {
    for scheme in [Scheme::Etdrk4, Scheme::Ifrk4] {
        let dt = 0.02;
        let reference = kdv_gaussian_final(dt / 8.0, scheme);
        let e1 = kdv_gaussian_final(dt, scheme).sub(&reference).unwrap().l2_norm();
        let e2 = kdv_gaussian_final(dt / 2.0, scheme).sub(&reference).unwrap().l2_norm();
        let ratio = e1 / e2;
        // the integrating-factor scheme is still pre-asymptotic at this dt
        let ok = match scheme {
            Scheme::Etdrk4 => (12.0..=20.0).contains(&ratio),
            Scheme::Ifrk4 => ratio >= 12.0,
        };
        assert!(ok, "{scheme:?}: {e1} {e2} {ratio}");
    }
}

#[test]
fn deterministic() {
    let a = kdv_gaussian_final(0.01, Scheme::Etdrk4);
    let b = kdv_gaussian_final(0.01, Scheme::Etdrk4);
    assert_eq!(a.values(), b.values());
}

#[test]
fn soliton_translates_at_its_speed() {
    let c = 1.0;
    let grid = Grid::new(30.0, 256).unwrap();
    let u0 = soliton(grid, c, -5.0);
    let traj = evolve(
        &u0,
        &BackgroundField::zero(),
        &AnalyticNonlinearity::kdv(),
        &SolverConfig::new(1e-3, 1.0),
    )
    .unwrap();
    let drift = (peak(traj.last().unwrap()) - (-5.0 + c)).abs();
    assert!(drift <= 1e-4, "{drift}");
    let exact = soliton(grid, c, -4.0);
    assert!(traj.last().unwrap().sub(&exact).unwrap().max_abs() < 1e-8);
}

#[test]
fn gaussian_on_gardner_kink_runs() {
    let grid = Grid::new(50.0, 1024).unwrap();
    let (bg, nl) = gardner_kink();
    let u0 = gaussian(grid, 0.3, 2.0, 5.0);
    let traj = evolve(&u0, &bg, &nl, &SolverConfig::new(2e-3, 1.0).with_save_every(50)).unwrap();
    assert_eq!(traj.len(), 11);
    assert!(traj.frames().iter().all(|f| f.values().iter().all(|v| v.is_finite())));
    let m = traj.sup_norm(|f| f.l2_norm());
    assert!(m > 0.1 && m < 10.0, "{m}");
}

#[test]
fn mean_is_conserved_without_background() {
    let grid = Grid::new(30.0, 256).unwrap();
    let u0 = gaussian(grid, 1.0, 2.0, 0.0);
    let traj = evolve(
        &u0,
        &BackgroundField::zero(),
        &AnalyticNonlinearity::kdv(),
        &SolverConfig::new(1e-3, 1.0),
    )
    .unwrap();
    let i0 = u0.integral();
    for f in traj.frames() {
        assert!((f.integral() - i0).abs() <= 1e-12);
    }
}

#[test]
fn spatial_convergence_is_spectral() {
    let run = |n: usize| {
        let grid = Grid::new(20.0, n).unwrap();
        let u0 = gaussian(grid, 1.0, 1.0, 0.0);
        let mut cfg = SolverConfig::new(1e-3, 0.1);
        cfg.tail_threshold = 1.0;
        evolve(&u0, &BackgroundField::zero(), &AnalyticNonlinearity::kdv(), &cfg)
            .unwrap()
            .last()
            .unwrap()
            .transform()
    };
    let reference = crate::spectral::fft::resample(run(512).coeffs(), 512);
    let err = |n: usize| {
        let c = crate::spectral::fft::resample(run(n).coeffs(), 512);
        let g = Grid::new(20.0, 512).unwrap();
        SpectralField::new(g, c)
            .unwrap()
            .sub(&SpectralField::new(g, reference.clone()).unwrap())
            .unwrap()
            .l2_norm_sq()
            .sqrt()
    };
    let (e64, e128) = (err(64), err(128));
    assert!(e64 / e128 >= 10.0 || e128 < 1e-12, "{e64} {e128}");
    assert!(err(256) < 1e-11);
}

#[test]
fn viscous_linear_flow_contracts_l2() {
    let grid = Grid::new(20.0, 256).unwrap();
    let u0 = gaussian(grid, 1.0, 2.0, 0.0);
    let traj = evolve(
        &u0,
        &BackgroundField::zero(),
        &AnalyticNonlinearity::zero(),
        &SolverConfig::new(0.01, 1.0).with_mu(0.2),
    )
    .unwrap();
    let norms: Vec<f64> = traj.frames().iter().map(|f| f.l2_norm()).collect();
    assert!(norms.windows(2).all(|w| w[1] <= w[0]));
    assert!(norms.last().unwrap() < &norms[0]);
}

#[test]
fn instability_aborts_with_partial_output() {
    let grid = Grid::new(10.0, 128).unwrap();
    let u0 = gaussian(grid, 30.0, 0.6, 0.0);
    let mut cfg = SolverConfig::new(0.05, 2.0);
    cfg.tail_threshold = 1e300;
    cfg.contamination_limit = 1.0;
    match evolve(&u0, &BackgroundField::zero(), &AnalyticNonlinearity::kdv(), &cfg) {
        Err(Error::Aborted { cause, partial }) => {
            assert!(matches!(*cause, Error::Instability { .. }), "{cause}");
            assert!(!partial.is_empty());
            assert_eq!(partial.frame(0), &u0);
        }
        other => panic!("expected abort, got {other:?}"),
    }
}

#[test]
fn boundary_contamination_is_detected() {
    let grid = Grid::new(10.0, 128).unwrap();
    let u0 = gaussian(grid, 1.0, 1.0, -3.0);
    let cfg = SolverConfig::new(0.01, 3.0).with_save_every(10);
    // dispersive radiation runs left into the buffer
    let err = evolve(&u0, &BackgroundField::zero(), &AnalyticNonlinearity::zero(), &cfg).unwrap_err();
    assert!(matches!(err.root(), Error::BoundaryContamination { .. }), "{err}");
    let bad = PhysicalField::from_fn(grid, |x| (-(10.0 - x.abs()).powi(2)).exp());
    assert!(matches!(
        evolve(&bad, &BackgroundField::zero(), &AnalyticNonlinearity::zero(), &cfg),
        Err(Error::BoundaryContamination { .. })
    ));
}

#[test]
fn reverse_stepping_returns_to_start() {
    let grid = Grid::new(20.0, 256).unwrap();
    let u0 = gaussian(grid, 1.0, 1.0, 0.0);
    let nl = AnalyticNonlinearity::kdv();
    let bg = BackgroundField::zero();
    let cfg = SolverConfig::new(1e-3, 1.0);
    let mut fwd = Stepper::new(grid, &bg, &nl, &cfg, 1e-3).unwrap();
    let mut back = Stepper::new(grid, &bg, &nl, &cfg, -1e-3).unwrap();
    let mut state = SimulationState::new(&u0, 0.0);
    for _ in 0..200 {
        fwd.advance(&mut state).unwrap();
    }
    for _ in 0..200 {
        back.advance(&mut state).unwrap();
    }
    assert!(state.t.abs() < 1e-12);
    assert!(state.u().sub(&u0).unwrap().max_abs() < 1e-9);
    assert!(Stepper::new(grid, &bg, &nl, &cfg.clone().with_mu(0.1), -1e-3).is_err());
}

#[test]
fn picard_zero_problem() {
    let grid = Grid::new(10.0, 64).unwrap();
    let (traj, report) = picard_solve(
        &PhysicalField::zeros(grid),
        &BackgroundField::zero(),
        &AnalyticNonlinearity::kdv(),
        &SolverConfig::new(0.01, 0.05).with_mu(0.1),
        1.0,
    )
    .unwrap();
    assert_eq!(report.iterations(), 1);
    assert!(traj.frames().iter().all(|f| f.max_abs() == 0.0));
}

#[test]
fn picard_first_iterate_structure() {
    // with the flux switched off the map is affine, so the first iterate is
    // already the fixed point: W_μ(t)u₀ minus the forcing quadrature
    let grid = Grid::new(40.0, 1024).unwrap();
    let nl = AnalyticNonlinearity::zero();
    let bg = BackgroundField::new(BackgroundSpec::Synthetic, &AnalyticNonlinearity::kdv()).unwrap();
    let u0 = gaussian(grid, 1.0, 1.0, 0.0);
    let cfg = SolverConfig::new(0.005, 0.05).with_mu(0.1);
    let (traj, report) = picard_solve(&u0, &bg, &nl, &cfg, 1.0).unwrap();
    assert_eq!(report.iterations(), 2);
    assert!(report.differences[1] <= PICARD_TOL);
    let free = crate::spectral::dissipative_propagate(&u0.transform(), 0.05, 0.1)
        .unwrap()
        .inverse();
    let forced = traj.last().unwrap().sub(&free).unwrap();
    // S does not depend on u; compare with the ODE solution of u_t = Lu - wS
    let ode = evolve(&u0, &bg, &nl, &SolverConfig::new(0.005, 0.05).with_mu(0.1)).unwrap();
    assert!(ode.last().unwrap().sub(traj.last().unwrap()).unwrap().l2_norm() < 1e-9);
    assert!(forced.l2_norm() > 1e-3);
}

#[test]
fn picard_matches_evolve() {
    let grid = Grid::new(20.0, 256).unwrap();
    let u0 = gaussian(grid, 1.0, 1.0, 0.0);
    let nl = AnalyticNonlinearity::kdv();
    let bg = BackgroundField::zero();
    let cfg = SolverConfig::new(1e-3, 0.05).with_mu(0.1);
    let (fixed, report) = picard_solve(&u0, &bg, &nl, &cfg, 1.0).unwrap();
    assert!(report.factors().iter().all(|&f| f < 1.0), "{:?}", report.factors());
    let traj = evolve(&u0, &bg, &nl, &cfg).unwrap();
    let diff = fixed
        .sub(&traj)
        .unwrap()
        .sup_norm(|f| crate::norms::sobolev_norm(f, 0.0));
    assert!(diff <= 1e-8, "{diff}");
}

#[test]
fn picard_needs_viscosity() {
    let grid = Grid::new(10.0, 64).unwrap();
    assert!(picard_solve(
        &PhysicalField::zeros(grid),
        &BackgroundField::zero(),
        &AnalyticNonlinearity::kdv(),
        &SolverConfig::new(0.01, 0.05),
        1.0
    )
    .is_err());
}

#[test]
fn viscosity_linear_problem_is_heat_factor() {
    let grid = Grid::new(20.0, 256).unwrap();
    let u0 = gaussian(grid, 1.0, 2.0, 0.0);
    let cfg = SolverConfig::new(0.01, 0.5).with_save_every(10);
    let mus = [0.1, 0.05, 0.0];
    let table = vanishing_viscosity(
        &u0,
        &BackgroundField::zero(),
        &AnalyticNonlinearity::zero(),
        &cfg,
        &mus,
        1.0,
    )
    .unwrap();
    let spec = u0.transform();
    for row in &table.rows {
        // ‖(e^{-μξ²t} - 1)û₀‖ is increasing in t, so the sup is at t = 0.5
        let expect = spec
            .weighted_norm_sq(|xi| ((-row.mu * xi * xi * 0.5).exp() - 1.0).powi(2))
            .sqrt();
        assert!((row.difference - expect).abs() <= 1e-12, "{} {expect}", row.difference);
    }
    assert!(table.rate.is_none());
}

#[test]
fn viscosity_list_validation() {
    let grid = Grid::new(10.0, 64).unwrap();
    let u0 = PhysicalField::zeros(grid);
    let cfg = SolverConfig::new(0.01, 0.1);
    let run = |m: &[f64]| {
        vanishing_viscosity(
            &u0,
            &BackgroundField::zero(),
            &AnalyticNonlinearity::kdv(),
            &cfg,
            m,
            1.0,
        )
    };
    assert!(run(&[0.1, 0.05]).is_err());
    assert!(run(&[0.05, 0.1, 0.0]).is_err());
    assert!(run(&[0.0]).is_err());
    assert!(run(&[0.1, 0.0]).is_ok());
}

#[test]
fn viscosity_kdv_first_order() {
    let grid = Grid::new(30.0, 256).unwrap();
    let u0 = gaussian(grid, 1.0, 2.0, 0.0);
    let cfg = SolverConfig::new(2e-3, 1.0).with_save_every(50);
    let table = vanishing_viscosity(
        &u0,
        &BackgroundField::zero(),
        &AnalyticNonlinearity::kdv(),
        &cfg,
        &[0.1, 0.05, 0.025, 0.0],
        1.0,
    )
    .unwrap();
    assert!(table.monotone(0.05));
    let p = table.rate.unwrap();
    assert!(p >= 0.9, "{p}");
}
