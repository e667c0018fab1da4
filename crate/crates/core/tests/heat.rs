use herzlab::functions::{unit_ball_volume, RadialField, RadialFunction};
use herzlab::heat::{duhamel, duhamel_on_grid, heat_apply, heat_value, log_grid, HeatEvolved, SpaceTimeFunction};
use herzlab::quadrature::{integrate_adaptive, QuadratureSpec};
use std::f64::consts::PI;

fn gaussian_evolved(t: f64, r: f64, n: u32) -> f64 {
    let w = 1.0 + 4.0 * t;
    w.powf(-0.5 * n as f64) * (-r * r / w).exp()
}

#[test]
fn gaussian_closed_form() {
    let quad = QuadratureSpec::default();
    let g = RadialFunction::gaussian(1.0, 1.0);
    for n in [1, 3] {
        for t in [0.01, 0.1, 1.0] {
            for i in 0..=32 {
                let r = 0.25 * i as f64;
                let got = heat_value(&g, t, r, n, &quad).value;
                let expect = gaussian_evolved(t, r, n);
                assert!((got / expect - 1.0).abs() < 1e-8, "n={n} t={t} r={r}: {got} vs {expect}");
            }
        }
    }
}

#[test]
fn two_dimensional_angular_quadrature_matches_gaussian_identity() {
    // n = 2 through the angular quadrature against the Gaussian identity
    let quad = QuadratureSpec::default();
    let g = RadialFunction::gaussian(1.0, 1.0);
    for t in [0.01, 0.3] {
        for r in [0.0, 0.7, 2.0, 5.0] {
            let got = heat_value(&g, t, r, 2, &quad).value;
            let expect = gaussian_evolved(t, r, 2);
            assert!((got / expect - 1.0).abs() < 1e-8, "t={t} r={r}");
        }
    }
}

#[test]
fn mass_is_conserved() {
    let quad = QuadratureSpec::default();
    let ball = RadialFunction::BallIndicator(1.0);
    for n in [1u32, 3] {
        let t = 0.1;
        let u = HeatEvolved::new(&ball, t, n, quad).unwrap();
        let area = if n == 1 { 2.0 } else { 4.0 * PI };
        let reach = 1.0 + (2800.0 * t).sqrt();
        let mass = integrate_adaptive(|r| u.eval(r) * r.powi(n as i32 - 1), &[0.0, 1.0, 2.0, reach], 0.0, 1e-12, 2000);
        let expect = unit_ball_volume(n);
        assert!((area * mass.value / expect - 1.0).abs() < 1e-8, "n={n}: {} vs {expect}", area * mass.value);
    }
}

#[test]
fn semigroup_law() {
    let quad = QuadratureSpec::default();
    let f = RadialFunction::AnnulusIndicator(0);
    let (s, t) = (0.02, 0.05);
    let inner = HeatEvolved::new(&f, s, 3, quad).unwrap();
    for r in [0.0, 0.3, 0.75, 1.2, 2.0] {
        let composed = heat_value(&inner, t, r, 3, &quad).value;
        let direct = heat_value(&f, s + t, r, 3, &quad).value;
        assert!((composed - direct).abs() < 1e-6, "r={r}: {composed} vs {direct}");
    }
}

#[test]
fn semigroup_law_through_sampled_outputs() {
    let quad = QuadratureSpec { radial_points_per_annulus: 64, ..Default::default() };
    let f = RadialFunction::AnnulusIndicator(0);
    let (s, t) = (0.02, 0.05);
    let once = heat_apply(&f, s, 3, &quad).unwrap();
    let twice = heat_apply(&once, t, 3, &quad).unwrap();
    let direct = heat_apply(&f, s + t, 3, &quad).unwrap();
    let mut worst = 0.0f64;
    for i in 0..=40 {
        let r = 0.05 * i as f64;
        worst = worst.max((twice.eval(r) - direct.eval(r)).abs());
    }
    assert!(worst < 1e-6, "worst {worst}");
}

#[test]
fn positivity_and_sup_contraction() {
    let quad = QuadratureSpec::default();
    for f in [
        RadialFunction::AnnulusIndicator(0),
        RadialFunction::BallIndicator(0.5),
        RadialFunction::smooth_annulus(0.3),
        RadialFunction::gaussian(0.2, 2.0),
    ] {
        let sup = (0..2000).map(|i| f.eval(1e-3 + i as f64 * 2e-3)).fold(0.0, f64::max);
        for t in [1e-3, 0.1] {
            let u = heat_apply(&f, t, 3, &quad).unwrap();
            let RadialFunction::Sampled(s) = &u else { panic!("sampled output expected") };
            assert!(s.values.iter().all(|v| *v >= 0.0));
            assert!(s.values.iter().all(|v| *v <= sup + 1e-10), "{f:?} t={t}");
        }
    }
}

#[test]
fn zero_stays_zero() {
    let quad = QuadratureSpec::default();
    let u = heat_apply(&RadialFunction::Zero, 0.5, 3, &quad).unwrap();
    assert_eq!(u.eval(0.3), 0.0);
    let f = SpaceTimeFunction::constant(RadialFunction::Zero);
    assert_eq!(duhamel(&f, 0.5, 3, &quad, 1.0).unwrap().function.eval(1.0), 0.0);
}

fn duhamel_gaussian_reference(t: f64, r: f64) -> f64 {
    let q = integrate_adaptive(|lag| gaussian_evolved(lag, r, 3), &[0.0, t], 0.0, 1e-14, 500);
    q.value
}

#[test]
fn duhamel_of_constant_gaussian() {
    let quad = QuadratureSpec { radial_points_per_annulus: 32, ..Default::default() };
    let f = SpaceTimeFunction::constant(RadialFunction::gaussian(1.0, 1.0));
    for t in [0.1, 1.0] {
        for kappa in [1.0, 0.5] {
            let out = duhamel(&f, t, 3, &quad, kappa).unwrap();
            for r in [0.0, 0.5, 1.0, 2.0, 3.0] {
                let expect = duhamel_gaussian_reference(t, r);
                let got = out.function.eval(r);
                assert!((got / expect - 1.0).abs() < 1e-6, "t={t} k={kappa} r={r}: {got} vs {expect}");
            }
            assert!(out.richardson < 1e-8);
        }
    }
}

#[test]
fn duhamel_vanishes_linearly() {
    let quad = QuadratureSpec::default();
    let f = SpaceTimeFunction::constant(RadialFunction::BallIndicator(1.0));
    let a = duhamel(&f, 1e-3, 3, &quad, 1.0).unwrap().function.eval(0.2);
    let b = duhamel(&f, 1e-4, 3, &quad, 1.0).unwrap().function.eval(0.2);
    assert!((a / b - 10.0).abs() < 1e-6, "{a} {b}");
}

#[test]
fn grid_duhamel_of_constant_gaussian() {
    let quad = QuadratureSpec::default();
    let f = SpaceTimeFunction::constant(RadialFunction::gaussian(1.0, 1.0));
    let radii = log_grid(-12, 6, 16);
    for t in [0.1, 1.0] {
        let out = duhamel_on_grid(&f, t, 3, 0.0, &quad, 1.0, 2, &radii);
        for (r, v) in radii.iter().zip(&out).step_by(7).filter(|(r, _)| **r < 4.0) {
            let expect = duhamel_gaussian_reference(t, *r);
            assert!((v - expect).abs() < 2e-6 * t, "t={t} r={r}: {v} vs {expect}");
        }
    }
}
