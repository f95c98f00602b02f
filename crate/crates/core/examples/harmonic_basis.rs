//! The divergence-free vector basis Z_{L,m}: orthonormality under the
//! discrete inner product, tangency, and conjugation symmetry.
//!
//!     cargo run --release --example harmonic_basis

use num_complex::Complex64;
use sphereflow::basis::{grad_y_covariant, modes, unit_normal, z_basis, ModeIndex};
use sphereflow::grid::{GridVectorField, QuadratureGrid};

fn main() {
    let n = 6;
    let grid = QuadratureGrid::for_truncation(n);
    println!("truncation N = {n}: {} basis fields, grid M = {}", modes(n).count(), grid.n_lon());

    // discrete Gram matrix of the Z basis
    let fields: Vec<(ModeIndex, GridVectorField)> = modes(n)
        .map(|idx| (idx, GridVectorField::from_fn(&grid, |t, p| z_basis(idx, t, p))))
        .collect();
    let mut worst_gram: f64 = 0.0;
    let mut worst_div: f64 = 0.0;
    for (ia, fa) in &fields {
        let ga = GridVectorField::from_fn(&grid, |t, p| grad_y_covariant(*ia, t, p));
        for (ib, fb) in &fields {
            let ip = grid.inner_vector(fa, fb).unwrap();
            let expect = if ia == ib { 1.0 } else { 0.0 };
            worst_gram = worst_gram.max((ip - Complex64::new(expect, 0.0)).norm());
            // weak divergence: every surface gradient is discretely
            // orthogonal to every Z
            worst_div = worst_div.max(grid.inner_vector(&ga, fb).unwrap().norm());
        }
    }
    println!("max |(Z_a, Z_b)_M - delta| = {worst_gram:.2e}");
    println!("max |(Grad Y_a, Z_b)_M|   = {worst_div:.2e}");

    // pointwise structure at a sample point
    let (theta, phi) = (1.1, 0.4);
    let idx = ModeIndex::new(3, 2);
    let z = z_basis(idx, theta, phi);
    let cart = z.to_cartesian();
    let nrm = unit_normal(theta, phi);
    let radial = cart[0] * nrm[0] + cart[1] * nrm[1] + cart[2] * nrm[2];
    println!("\nZ_{{3,2}}({theta}, {phi}) radial component: {:.2e} (tangency)", radial.norm());

    let z_neg = z_basis(ModeIndex::new(3, -2), theta, phi);
    let conj = z.conj();
    let dev = (conj.plus - z_neg.plus).norm().max((conj.zero - z_neg.zero).norm());
    println!("conj(Z_{{3,2}}) - Z_{{3,-2}}: {dev:.2e} (conjugation symmetry, (-1)^m = +1)");
}
