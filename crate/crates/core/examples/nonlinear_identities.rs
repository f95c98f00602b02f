//! Conservation structure of the pseudospectral nonlinear term: the
//! advection term exchanges no energy and no enstrophy, and a full
//! right-hand side dissipates energy at exactly the viscous rate.
//!
//!     cargo run --release --example nonlinear_identities

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphereflow::grid::ModeCoeffs;
use sphereflow::operators::{nonlinear_galerkin, rhs, stokes_apply, PhysicsParams};
use sphereflow::transform::SphereTransform;

fn main() {
    let n = 16;
    let tf = SphereTransform::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut alpha = ModeCoeffs::from_fn(n, |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    alpha.enforce_reality();

    let b = nonlinear_galerkin(&tf, &alpha).unwrap();
    let cube = alpha.norm().powi(3);
    println!("N = {n}, random real-condition state, ||u|| = {:.4}", alpha.norm());
    println!(
        "energy transfer    Re<u, B(u,u)>   = {:+.3e}  (|.| / ||u||^3 = {:.2e})",
        alpha.inner(&b).unwrap().re,
        alpha.inner(&b).unwrap().re.abs() / cube
    );
    println!(
        "enstrophy transfer Re<Au, B(u,u)>  = {:+.3e}  (|.| / ||u||^3 = {:.2e})",
        stokes_apply(&alpha).inner(&b).unwrap().re,
        stokes_apply(&alpha).inner(&b).unwrap().re.abs() / cube
    );

    let params = PhysicsParams::new(0.01, 1.0);
    let f = rhs(&tf, &alpha, &params, None).unwrap();
    let de_dt = 2.0 * alpha.inner(&f).unwrap().re;
    let viscous = -2.0 * params.nu * alpha.v_norm().powi(2);
    println!("\nunforced energy budget (nu = {}, Omega = {}):", params.nu, params.omega);
    println!("  d/dt ||u||^2 from 2 Re<u, F>   = {de_dt:.12}");
    println!("  -2 nu ||u||_V^2                = {viscous:.12}");
    println!("  relative deviation             = {:.2e}", (de_dt - viscous).abs() / viscous.abs());
}
