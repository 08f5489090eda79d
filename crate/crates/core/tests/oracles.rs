//! Checks against closed-form answers computed independently of the library.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use decaylab::field::{Domain, GridFn};
use decaylab::funcalg::{kruzhkov_pair, stieltjes_integral, BVFunction, PiecewisePoly, Poly};
use decaylab::model::ModelSpec;
use decaylab::solver::{evolve, SolverConfig};
use decaylab::stefan::{exp_fit, solve_fixed_domain, StefanConfig};

#[test]
fn stieltjes_against_jump_atom() {
    // ∫_0^2 s² d sign(s - 1): one atom of size 2 at s = 1
    let f = PiecewisePoly::from_poly(Poly::new(vec![0.0, 0.0, 1.0]), -1.0, 3.0).unwrap();
    let g = BVFunction::sign_shift(1.0, -1.0, 3.0).unwrap();
    assert_relative_eq!(
        stieltjes_integral(&f, &g, 2.0).unwrap(),
        2.0,
        epsilon = 1e-14
    );
    assert_relative_eq!(
        stieltjes_integral(&f, &g, 0.5).unwrap(),
        0.0,
        epsilon = 1e-14
    );
}

#[test]
fn stieltjes_against_partition_sums() {
    let fp = Poly::new(vec![0.3, -1.0, 0.5, 2.0]);
    let gp = Poly::new(vec![0.0, 1.0, 0.0, -0.7]);
    let f = PiecewisePoly::from_poly(fp.clone(), -1.0, 1.0).unwrap();
    let g = BVFunction::smooth(PiecewisePoly::from_poly(gp.clone(), -1.0, 1.0).unwrap()).unwrap();
    for u in [0.8, -0.6] {
        let n = 200_000;
        let h = u / n as f64;
        let sum: f64 = (0..n)
            .map(|i| {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                fp.eval(0.5 * (a + b)) * (gp.eval(b) - gp.eval(a))
            })
            .sum();
        assert_relative_eq!(stieltjes_integral(&f, &g, u).unwrap(), sum, epsilon = 1e-9);
    }
}

#[test]
fn kruzhkov_flux_of_burgers() {
    let phi = PiecewisePoly::from_poly(Poly::new(vec![0.0, 0.0, 0.5]), -2.0, 2.0).unwrap();
    let zero = PiecewisePoly::constant(0.0, -2.0, 2.0).unwrap();
    let pair = kruzhkov_pair(&phi, &zero, 1.0).unwrap();
    for u in [-2.0, -0.5, 0.0, 1.0, 1.5, 2.0] {
        let q = (u - 1.0f64).signum() * (0.5 * u * u - 0.5);
        assert_relative_eq!(pair.flux.eval(u).unwrap(), q, epsilon = 1e-14);
        assert_relative_eq!(
            pair.eta.eval(u).unwrap(),
            (u - 1.0f64).abs(),
            epsilon = 1e-14
        );
        assert_eq!(pair.diffusion.eval(u).unwrap(), 0.0);
    }
}

fn fourier_sine(u: &GridFn, k: f64) -> f64 {
    u.centers()
        .zip(u.values())
        .map(|(x, v)| v * (k * x).sin())
        .sum::<f64>()
        * u.dx()
}

#[test]
fn heat_mode_decays_like_exp_minus_k2_t() {
    // A(u) = u for u > 0, so positive data solve the heat equation
    let model = ModelSpec::preset("stefan", (-1.0, 1.0)).unwrap();
    let k = 2.0 * PI;
    let domain = Domain::periodic(0.0, 1.0);
    let u0 = GridFn::from_centers(domain, 200, |x| 0.5 + 0.2 * (k * x).sin()).unwrap();
    let t = 0.05;
    let tr = evolve(&u0, &model, &SolverConfig::new(200, t)).unwrap();
    let ratio = fourier_sine(tr.last(), k) / fourier_sine(&u0, k);
    assert_relative_eq!(ratio, (-k * k * t).exp(), max_relative = 1e-3);
}

#[test]
fn burgers_shock_moves_at_half_speed() {
    // u = 1 on [-1, 0), 0 elsewhere: the shock at 0 has speed (1 + 0)/2
    let model = ModelSpec::preset("burgers", (-1.0, 1.0)).unwrap();
    let domain = Domain::periodic(-2.0, 4.0);
    let n = 800;
    let u0 = GridFn::from_cell_average(
        domain,
        n,
        |x| if (-1.0..0.0).contains(&x) { 1.0 } else { 0.0 },
    )
    .unwrap();
    let t = 1.0;
    let tr = evolve(&u0, &model, &SolverConfig::new(n, t)).unwrap();
    let u = tr.last();
    let xs: Vec<f64> = u.centers().collect();
    let i = (0..n - 1)
        .find(|&i| xs[i] > 0.0 && u.values()[i] >= 0.5 && u.values()[i + 1] < 0.5)
        .unwrap();
    let dx = u.dx();
    assert!(
        (xs[i] + 0.5 * dx - 0.5 * t).abs() <= 2.0 * dx,
        "shock at {}",
        xs[i]
    );
}

#[test]
fn fixed_front_decays_at_dirichlet_rate() {
    // α = 0: r ≡ 1 and v solves v_t = v_yy on (-1, 1) with zero boundary values
    let cfg = StefanConfig {
        alpha: 0.0,
        n_y: 200,
        t_end: Some(4.0),
        ..Default::default()
    };
    let run = solve_fixed_domain(&cfg.default_profile(), &cfg).unwrap();
    let pts: Vec<(f64, f64)> = (0..run.times.len())
        .filter(|&k| run.times[k] >= 1.0)
        .map(|k| (run.times[k], run.sup(k)))
        .collect();
    let fit = exp_fit(&pts);
    assert_relative_eq!(fit.rate, PI * PI / 4.0, max_relative = 1e-3);
}

#[test]
fn default_windows_scale_with_alpha() {
    let a = StefanConfig::with_alpha(0.05);
    let b = StefanConfig::with_alpha(0.1);
    assert_relative_eq!(a.t_end().unwrap(), 2.0 * b.t_end().unwrap());
    assert_relative_eq!(a.t_burn(), 2.0 * b.t_burn());
}
