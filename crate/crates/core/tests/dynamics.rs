mod common;

use common::{random_with_norm, rng, two_cosine};
use dnls_core::cole_hopf::ExactSolver;
use dnls_core::dynamics::*;
use dnls_core::spectral::*;

fn physical_rk4(u0: &SpectralState, t_final: f64, dt: f64) -> SpectralState {
    let steps = (t_final / dt).round() as usize;
    let mut u = u0.clone();
    for _ in 0..steps {
        let k1 = rhs_physical(&u).unwrap();
        let k2 = rhs_physical(&u.axpy((0.5 * dt).into(), &k1)).unwrap();
        let k3 = rhs_physical(&u.axpy((0.5 * dt).into(), &k2)).unwrap();
        let k4 = rhs_physical(&u.axpy(dt.into(), &k3)).unwrap();
        let incr = k1.add(&k2.scaled(2.0.into())).add(&k3.scaled(2.0.into())).add(&k4);
        u = u.axpy((dt / 6.0).into(), &incr);
    }
    u
}

#[test]
fn interaction_and_physical_integrations_agree() {
    let mut rng = rng(17);
    let phi = random_with_norm(&mut rng, 8, &FLParams::l2(), 0.3);
    let traj = integrate_rk4(&phi.to_interaction(), 0.5, 1e-4).unwrap();
    let direct = physical_rk4(&phi, 0.5, 1e-4);
    let ours = traj.last().to_physical();
    let gap = l2_norm(&ours.sub(&direct));
    assert!(gap < 1e-9, "{gap:e}");
}

#[test]
fn rk4_converges_at_fourth_order() {
    let phi = two_cosine(0.05, 32);
    let exact = ExactSolver::new(&phi).unwrap().solve(1.0).unwrap();
    let errors: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            let traj = integrate_rk4(&phi.to_interaction(), 1.0, dt).unwrap();
            l2_norm(&traj.last().to_physical().sub(&exact))
        })
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 4.0).abs() <= 0.3, "{errors:?}");
    }
}

#[test]
fn galilean_boost_preserves_residual_scale() {
    let phi = two_cosine(0.05, 16);
    let traj = integrate_rk4(&phi.to_interaction(), 0.2, 1e-4).unwrap().to_physical();
    let base = dnls_residual(&traj).unwrap();
    let boosted = galilean_transform(&traj, 0.7).unwrap();
    let moved = dnls_residual(&boosted).unwrap();
    assert!(moved.max_residual <= 10.0 * base.max_residual.max(1e-15));
}
