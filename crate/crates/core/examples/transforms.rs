//! Analysis/synthesis round trips and the discrete Parseval identity,
//! with a timing comparison of the FFT path against direct summation.
//!
//!     cargo run --release --example transforms

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphereflow::basis::{z_basis, CovariantVector};
use sphereflow::grid::{GridVectorField, ModeCoeffs};
use sphereflow::transform::{SphereTransform, SynthKind};
use std::time::Instant;

fn main() {
    let n = 16;
    let tf = SphereTransform::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let alpha = ModeCoeffs::from_fn(n, |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });

    let t0 = Instant::now();
    let field = tf.synthesize_vector(&alpha, SynthKind::Velocity).unwrap();
    let dt_synth = t0.elapsed();
    let t0 = Instant::now();
    let back = tf.analyze(&field).unwrap();
    let dt_ana = t0.elapsed();

    let round_trip = back.sub(&alpha).unwrap().norm() / alpha.norm();
    println!("N = {n}, grid {} x {}", tf.grid().n_rings(), tf.grid().n_lon());
    println!("analyze(synthesize(alpha)) relative error: {round_trip:.2e}");

    let norm_grid = tf.grid().inner_vector(&field, &field).unwrap().re;
    let norm_spec: f64 = alpha.as_slice().iter().map(|v| v.norm_sqr()).sum();
    println!(
        "Parseval: ||u||_M^2 = {norm_grid:.12}, sum |alpha|^2 = {norm_spec:.12} (diff {:.2e})",
        (norm_grid - norm_spec).abs()
    );

    // direct O(N^4) synthesis for comparison
    let t0 = Instant::now();
    let direct = GridVectorField::from_fn(tf.grid(), |theta, phi| {
        let mut acc = CovariantVector::zeros();
        for (idx, a) in alpha.iter() {
            acc = acc.add(&z_basis(idx, theta, phi).scale(a));
        }
        acc
    });
    let dt_direct = t0.elapsed();
    let mut worst: f64 = 0.0;
    for p in 0..tf.grid().n_rings() {
        for q in 0..tf.grid().n_lon() {
            let (a, b) = (field.at(p, q), direct.at(p, q));
            worst = worst
                .max((a.plus - b.plus).norm())
                .max((a.zero - b.zero).norm())
                .max((a.minus - b.minus).norm());
        }
    }
    println!("\nFFT synthesis  : {dt_synth:?}");
    println!("FFT analysis   : {dt_ana:?}");
    println!("direct synthesis: {dt_direct:?} (max pointwise deviation {worst:.2e})");
}
