mod common;

use common::{bessel_j, cosine, ell2, random_with_norm, rng, two_cosine};
use dnls_core::blowup::{blowup_gauge, BLOWUP_TIME};
use dnls_core::cole_hopf::*;
use dnls_core::dynamics::{dnls_residual, integrate_rk4, Scheme};
use dnls_core::normal_form::{picard_solve, ContractionConstants};
use dnls_core::spectral::*;
use dnls_core::Error;
use num_complex::Complex64;
use rand::Rng;

#[test]
fn cosine_gauge_has_bessel_coefficients() {
    let eps = 0.1;
    let w = gauge0(&cosine(eps, 8)).unwrap();
    assert!((w.zero_mode().re - 0.997_502).abs() < 1e-6);
    for k in -6i64..=6 {
        // (-1)^k J_k(ε), and J_{-k} = (-1)^k J_k
        let odd = k > 0 && k % 2 != 0;
        let expect = if odd { -1.0 } else { 1.0 } * bessel_j(k.unsigned_abs() as u32, eps);
        assert!((w.get(k) - Complex64::new(expect, 0.0)).norm() < 1e-15, "k = {k}");
    }
}

#[test]
fn gauge_round_trip() {
    let phi = cosine(0.1, 32);
    let back = inverse_gauge(&gauge0(&phi).unwrap(), W_MIN).unwrap();
    assert!(ell2(&back.sub(&phi)) <= 1e-11);

    let mut rng = rng(4);
    for _ in 0..20 {
        let k_max = rng.random_range(1..=64);
        let norm = rng.random_range(0.01..0.2);
        let phi = random_with_norm(&mut rng, k_max, &FLParams::l2(), norm);
        let back = inverse_gauge(&gauge0(&phi).unwrap(), W_MIN).unwrap();
        assert!(back.sub(&phi).max_abs() <= 1e-10);
        assert_eq!(winding_number(&gauge0(&phi).unwrap()).unwrap().index, 0);
    }
}

#[test]
fn l1_bound_on_random_data() {
    let mut rng = rng(8);
    for &(s, p) in &[(0.0, 2.0), (0.5, 4.0), (0.3, 3.0)] {
        let params = FLParams::new(s, p).unwrap();
        let z = young_constant(&params).unwrap();
        for _ in 0..50 {
            let k_max = rng.random_range(1..=24);
            let norm = rng.random_range(0.0..0.5);
            let phi = random_with_norm(&mut rng, k_max, &params, norm);
            let w = gauge0(&phi).unwrap();
            assert!(w.l1_norm() <= (0.5 * z * fl_norm(&phi, &params)).exp() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn condition_implication_sweep() {
    let mut rng = rng(500);
    let params = FLParams::l2();
    let mut passes = 0;
    for _ in 0..500 {
        let k_max = rng.random_range(1..=16);
        let norm = rng.random_range(0.0..0.2);
        let phi = random_with_norm(&mut rng, k_max, &params, norm);
        let report = check_conditions(&phi, &params).unwrap();
        if report.verdicts.sgwp2 {
            passes += 1;
            assert!(report.noint_margin > 0.0);
        }
    }
    assert!(passes > 0);
}

#[test]
fn exact_solver_basics() {
    let zero = SpectralState::zeros(8, 0.0, Representation::Physical);
    assert!(exact_solve(&zero, 3.0).unwrap().is_zero());
    let phi = two_cosine(0.05, 32);
    assert!(exact_solve(&phi, 0.0).unwrap().sub(&phi).max_abs() <= 1e-10);
}

#[test]
fn exact_solution_obeys_a_priori_bound_at_long_times() {
    let phi = two_cosine(0.05, 32);
    let report = check_conditions(&phi, &FLParams::l2()).unwrap();
    let bound = report.l2_apriori.unwrap();
    let solver = ExactSolver::new(&phi).unwrap();
    for &t in &[1.0, 10.0, 123.4, 1e3, 1e4] {
        let u = solver.solve(t).unwrap();
        assert!(l2_norm(&u) <= bound);
    }
}

#[test]
fn exact_trajectory_satisfies_equation() {
    let phi = two_cosine(0.05, 16);
    let traj = ExactSolver::new(&phi).unwrap().trajectory(0.5, 501).unwrap();
    assert_eq!(traj.scheme(), Scheme::ExactGauge);
    assert!(dnls_residual(&traj).unwrap().max_residual < 1e-9);
}

#[test]
fn full_gauge_linearizes_and_naive_gauge_does_not() {
    let phi = two_cosine(0.05, 32);
    let traj = integrate_rk4(&phi.to_interaction(), 1.0, 1e-4).unwrap().to_physical();
    let full = linearization_defect(&gauge_full(&traj, false).unwrap(), &traj).unwrap();
    let naive = linearization_defect(&gauge_full(&traj, true).unwrap(), &traj).unwrap();
    assert!(full.sup_defect <= 1e-7);
    assert!(naive.sup_defect >= 100.0 * full.sup_defect);
    assert!(naive.naive_alignment > 0.999);
}

#[test]
fn zero_solution_gauge_is_constant() {
    let states = (0..5)
        .map(|i| SpectralState::zeros(4, 0.25 * i as f64, Representation::Physical))
        .collect();
    let traj = dnls_core::dynamics::Trajectory::new(states, 0.25, 0.25, Scheme::Rk4).unwrap();
    for w in gauge_full(&traj, false).unwrap() {
        assert_eq!(w.zero_mode(), Complex64::new(1.0, 0.0));
        assert_eq!(w.l1_norm(), 1.0);
    }
}

#[test]
fn blowup_gauge_diagnostics() {
    let w = blowup_gauge(0.0, 256).unwrap();
    assert_eq!(winding_number(&w).unwrap().index, 0);
    let singular = blowup_gauge(BLOWUP_TIME, 256).unwrap();
    assert!(matches!(
        inverse_gauge(&singular, W_MIN),
        Err(Error::GaugeSingular { .. })
    ));
}

#[test]
fn picard_agrees_with_exact_for_small_data() {
    let phi = two_cosine(0.02, 16);
    let constants = ContractionConstants::new(&FLParams::l2()).unwrap();
    assert!(0.02 < constants.smallness && constants.horizon(0.02) > 0.5);
    let (traj, report) = picard_solve(&phi, 0.5, 10, 501, 1e-13, 50).unwrap();
    assert!(report.contraction < 0.5);
    let exact = ExactSolver::new(&phi).unwrap().trajectory(0.5, traj.len()).unwrap();
    let gap = traj
        .to_physical()
        .states()
        .iter()
        .zip(exact.states())
        .map(|(a, b)| l2_norm(&a.sub(b)))
        .fold(0.0, f64::max);
    assert!(gap < 1e-10, "{gap:e}");
}
