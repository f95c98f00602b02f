//! The variable-order NDF stepper: fixed-step convergence orders on
//! y' = -y and an adaptive solve of a stiff diagonal system.
//!
//!     cargo run --release --example stiff_integrator

use num_complex::Complex64;
use sphereflow::ndf::{
    integrate, integrate_fixed_order, ndf_coefficients, OdeSystem, ToleranceSpec,
};

struct Diagonal {
    lambda: Vec<Complex64>,
}

impl OdeSystem for Diagonal {
    fn dim(&self) -> usize {
        self.lambda.len()
    }
    fn rhs(&mut self, _t: f64, y: &[Complex64], out: &mut [Complex64]) {
        for i in 0..y.len() {
            out[i] = self.lambda[i] * y[i];
        }
    }
    fn linear_diag(&self, out: &mut [Complex64]) {
        out.copy_from_slice(&self.lambda);
    }
}

fn main() {
    println!("NDF coefficients:");
    for p in 1..=5 {
        let c = ndf_coefficients(p).unwrap();
        println!(
            "  p = {p}: kappa = {:+.4}, gamma = {:.4}, error const = {:.4}",
            c.kappa, c.gamma, c.error_const
        );
    }

    println!("\nfixed-step order check on y' = -y (error at t = 1):");
    for p in 1..=5usize {
        let mut errs = Vec::new();
        for &h in &[5e-2, 2.5e-2] {
            let mut sys = Diagonal {
                lambda: vec![Complex64::new(-1.0, 0.0)],
            };
            let seeds: Vec<Vec<Complex64>> = (0..=p)
                .map(|k| vec![Complex64::new((-(k as f64) * h).exp(), 0.0)])
                .collect();
            let t_start = p as f64 * h;
            let steps = ((1.0 - t_start) / h).round() as usize;
            let y = integrate_fixed_order(&mut sys, p, h, 0.0, &seeds, steps).unwrap();
            errs.push((y[0].re - (-(t_start + steps as f64 * h)).exp()).abs());
        }
        let slope = (errs[0] / errs[1]).ln() / 2.0f64.ln();
        println!("  NDF{p}: e(h)={:.3e}, e(h/2)={:.3e}, observed order {slope:.2}", errs[0], errs[1]);
    }

    println!("\nadaptive solve of y' = diag(-1, -10^4) y to t = 1, rtol = 1e-6:");
    let mut sys = Diagonal {
        lambda: vec![Complex64::new(-1.0, 0.0), Complex64::new(-1e4, 0.0)],
    };
    let y0 = vec![Complex64::new(1.0, 0.0); 2];
    let tol = ToleranceSpec::new(1e-6, 1e-10);
    let out = integrate(&mut sys, &y0, (0.0, 1.0), &tol, &[], |_| {}).unwrap();
    println!(
        "  {} accepted steps, {} rejections, {} rhs evaluations",
        out.stats.accepted,
        out.stats.rejected_error + out.stats.rejected_newton,
        out.stats.rhs_evaluations
    );
    println!(
        "  y1(1) = {:.9e} (exact {:.9e}), y2(1) = {:.3e}",
        out.y[0].re,
        (-1.0f64).exp(),
        out.y[1].re
    );
}
