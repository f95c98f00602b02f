//! Gauss-Legendre rules and the spherical quadrature Q_M.
//!
//! Shows the exactness of the n-point rule up to degree 2n-1 and of the
//! Gauss x rectangle product rule on the sphere.
//!
//!     cargo run --release --example gauss_quadrature

use sphereflow::grid::{GridScalarField, QuadratureGrid};
use sphereflow::special::GaussRule;
use std::f64::consts::PI;

fn main() {
    println!("n-point Gauss-Legendre rule, worst monomial error over x^k, k <= 2n-1:");
    for n in [2usize, 4, 8, 16, 32] {
        let rule = GaussRule::new(n);
        let mut worst: f64 = 0.0;
        for k in 0..2 * n {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            worst = worst.max((rule.integrate(|x| x.powi(k as i32)) - exact).abs());
        }
        let wsum: f64 = rule.weights.iter().sum();
        println!("  n = {n:2}: max error {worst:.2e}, sum of weights - 2 = {:+.2e}", wsum - 2.0);
    }

    println!("\nspherical rule Q_M (Gauss colatitudes x equispaced longitudes):");
    for n in [4usize, 8, 16] {
        let grid = QuadratureGrid::for_truncation(n);
        let one = GridScalarField::from_fn(&grid, |_, _| 1.0.into());
        let area = grid.quad_scalar(&one).unwrap().re;
        println!(
            "  N = {n:2} -> M = {:3} ({} points): Q_M(1) - 4 pi = {:+.2e}",
            grid.n_lon(),
            grid.n_points(),
            area - 4.0 * PI
        );
    }
}
