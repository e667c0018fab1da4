use herzlab::exponents::{int, ExtRat, HerzIndex, ProblemParams};
use herzlab::functions::RadialFunction;
use herzlab::quadrature::QuadratureSpec;
use herzlab::solver::{fixed_point_residual, picard_solve, uniqueness_probe, PicardOptions, ProbeVerdict};
use std::time::Instant;

fn small_data_params() -> ProblemParams {
    let idx = HerzIndex::new(int(0), ExtRat::integer(3), ExtRat::one()).unwrap();
    ProblemParams::new(3, int(2), int(0), idx).unwrap()
}

#[test]
fn small_data_contracts_and_solves_the_fixed_point() {
    let quad = QuadratureSpec::default();
    let u0 = RadialFunction::gaussian(1.0, 1e-3);
    let start = Instant::now();
    let run = picard_solve(&u0, &small_data_params(), 0.1, &quad, 12, 1e-12).unwrap();
    eprintln!("solve: {:?}, diffs {:?}", start.elapsed(), run.differences);
    assert!(run.converged);
    assert!(run.contraction_ratios.iter().all(|r| *r < 1.0), "{:?}", run.contraction_ratios);
    let res = fixed_point_residual(&run, &u0, &quad, &PicardOptions::default()).unwrap();
    assert!(res.iter().all(|r| *r <= 5.0 * run.tol), "{res:?}");
}

#[test]
fn odd_nonlinearity_gives_negated_solution() {
    let quad = QuadratureSpec::default();
    let p = small_data_params();
    let u0 = RadialFunction::gaussian(1.0, 1e-2);
    let a = picard_solve(&u0, &p, 0.1, &quad, 3, 1e-30).unwrap();
    let b = picard_solve(&u0.clone().scaled(-1.0), &p, 0.1, &quad, 3, 1e-30).unwrap();
    for (x, y) in a.last_values().iter().flatten().zip(b.last_values().iter().flatten()) {
        assert_eq!(*x, -*y);
    }
}

#[test]
fn first_correction_is_alpha_homogeneous() {
    // ‖u¹ − u⁰‖ over ε ∈ {1e−2, 1e−3, 1e−4}: log-log slope α = 2
    let quad = QuadratureSpec::default();
    let p = small_data_params();
    let mut logs = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        let run = picard_solve(&RadialFunction::gaussian(1.0, eps), &p, 0.1, &quad, 1, 1e-30).unwrap();
        logs.push((f64::ln(eps), run.differences[0].ln()));
    }
    for w in logs.windows(2) {
        let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        assert!((slope - 2.0).abs() < 1e-2 * 2.0, "slope {slope}");
    }
}

#[test]
fn uniqueness_probe_small_data() {
    let quad = QuadratureSpec::default();
    let p = small_data_params();
    let u0 = RadialFunction::gaussian(1.0, 1e-3);
    let pert = RadialFunction::AnnulusIndicator(0).scaled(1e-4);
    let opts = PicardOptions::default();
    let rep = uniqueness_probe(&u0, &p, 0.1, &pert, &quad, 12, 1e-12, &opts).unwrap();
    assert_eq!(rep.verdict, ProbeVerdict::Consistent, "{rep:?}");
    assert!(rep.diff_norms.iter().all(|d| d.value <= 10.0 * rep.tol));
    assert!(rep.early_exponent.unwrap() >= rep.delta - 0.1);
    let zero = uniqueness_probe(&u0, &p, 0.1, &RadialFunction::Zero, &quad, 12, 1e-12, &opts).unwrap();
    assert!(zero.diff_norms.iter().all(|d| d.value <= zero.tol));
}
