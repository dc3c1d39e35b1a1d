use std::f64::consts::PI;

use dnls_core::blowup::*;
use dnls_core::cole_hopf::{check_conditions, gauge0, inverse_gauge, W_MIN};
use dnls_core::dynamics::integrate_rk4;
use dnls_core::quadrature::integrate_adaptive;
use dnls_core::spectral::{l2_norm, FLParams};
use dnls_core::Error;

#[test]
fn initial_l2_norm_by_quadrature() {
    let q = integrate_adaptive(
        |x| 4.0 * x.sin().powi(2) / (1.0 + x.cos().powi(2)),
        &[0.0, PI, 2.0 * PI],
        1e-14,
        1000,
    )
    .unwrap();
    let l2 = (q.value / (2.0 * PI)).sqrt();
    assert!((l2 - 2.0 * (2f64.sqrt() - 1.0).sqrt()).abs() < 1e-10);
    let curve = blowup_norm_curve(2.0, &[BLOWUP_TIME - 0.0]).unwrap_err();
    assert!(matches!(curve, Error::DomainError(_)));
}

#[test]
fn residual_is_small_and_tail_grows() {
    let early = blowup_residual(0.1, 1e-5, 64).unwrap();
    assert!(early.residual <= 1e-8, "{early:?}");
    let late = blowup_residual(1.4, 1e-5, 64).unwrap();
    assert!(late.residual <= 1e-6, "{late:?}");
    assert!(late.tail_indicator > early.tail_indicator);
}

#[test]
fn l1_norm_diverges_logarithmically() {
    let curve = blowup_norm_curve(1.0, &[1e-1, 1e-2, 1e-3, 1e-4]).unwrap();
    assert!(curve.windows(2).all(|w| w[1].value > w[0].value));
    let slope = log_fit_slope(&curve);
    assert!(slope > 0.0);
    let slope_late = log_fit_slope(&curve[1..]);
    assert!((slope_late - slope).abs() < 0.2 * slope);
}

#[test]
fn limit_modulus() {
    // at t = π/2 the closed modulus reduces to 2|sin x| / (1 - cos x)
    for &x in &[0.01, 0.3, 1.0, 2.5] {
        let limit = 2.0 * f64::sin(x) / (1.0 - f64::cos(x));
        assert!((field_modulus(BLOWUP_TIME, x) - limit).abs() < 1e-10 * limit);
    }
}

#[test]
fn conditions_fail_for_blowup_data() {
    let u0 = blowup_state(0.0, 64).unwrap();
    let report = check_conditions(&u0, &FLParams::l2()).unwrap();
    assert!(!report.verdicts.noint);
    assert!(!report.verdicts.sgwp2);
    assert!(report.noint_margin <= report.noint_uncertainty);
    // the gauge of u(0) is a multiple of 1 - i cos x
    let w = gauge0(&u0).unwrap();
    let ratio = w.get(1) / w.zero_mode();
    assert!((ratio - num_complex::Complex64::new(0.0, -0.5)).norm() < 1e-12);
    assert!(inverse_gauge(&blowup_gauge(BLOWUP_TIME, 512).unwrap(), W_MIN).is_err());
}

#[test]
fn rk4_tracks_closed_form_early() {
    let u0 = blowup_state(0.0, 64).unwrap();
    let traj = integrate_rk4(&u0.to_interaction(), 0.2, 1e-4).unwrap();
    let gap = l2_norm(&traj.last().to_physical().sub(&blowup_state(0.2, 64).unwrap()));
    assert!(gap < 1e-6, "{gap:e}");
}
