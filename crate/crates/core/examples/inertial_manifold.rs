//! Approximate inertial manifold: reconstruct the slaved high shells from
//! the resolved modes after a short forced run and show the spectral
//! decay of the complement.
//!
//!     cargo run --release --example inertial_manifold

use sphereflow::diagnostics::{energy_spectrum, inertial_manifold};
use sphereflow::experiments::Example2;
use sphereflow::grid::ModeCoeffs;
use sphereflow::ndf::{integrate, ToleranceSpec};
use sphereflow::operators::{NseSystem, PhysicsParams};
use sphereflow::transform::SphereTransform;

fn main() {
    let (n, n1, nu, omega) = (20usize, 12usize, 1e-4, 1.0);
    let ex = Example2::new(1, nu, omega);
    let tf = SphereTransform::new(n);
    let params = PhysicsParams::new(nu, omega);
    let alpha0 = ex.initial(n);
    let tol = ToleranceSpec::new(1e-3, 1e-10);

    let t_end = 1.0;
    let mut system = NseSystem::new(&tf, params, &ex);
    let out = integrate(&mut system, alpha0.as_slice(), (0.0, t_end), &tol, &[], |_| {}).unwrap();
    let state = ModeCoeffs::from_values(n, out.y).unwrap();

    // slave the shell N1 < L <= 2 N1 to the resolved modes
    let tf_ext = SphereTransform::new(2 * n1);
    let resolved = state.truncate_above(n1).unwrap();
    let phi = inertial_manifold(
        &tf_ext,
        &resolved,
        n1,
        Some(&ex.forcing(t_end, 2 * n1)),
        &params,
    )
    .unwrap();

    println!(
        "N = {n}, N1 = {n1}: ||u_N(t={t_end})|| = {:.4}, ||Phi|| = {:.4e}",
        state.norm(),
        phi.norm()
    );
    println!("\nslaved-shell spectrum (L^4-scaled column shows the dissipation range):");
    println!("{:>4} {:>13} {:>13}", "L", "E(Phi, L)", "L^4 E(Phi, L)");
    let spec = energy_spectrum(&phi);
    for l in (n1 + 1)..=(2 * n1) {
        let e = spec.shell(l);
        println!("{l:>4} {e:>13.4e} {:>13.4e}", (l as f64).powi(4) * e);
    }
    println!("\n(the top two shells are exact zeros of the triad selection rules)");
}
