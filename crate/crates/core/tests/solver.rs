//! Solver-level invariants: reality preservation, determinism, and
//! tolerance-limited decay through the full NSE right-hand side.

use num_complex::Complex64;
use sphereflow::basis::ModeIndex;
use sphereflow::experiments::Example2;
use sphereflow::grid::ModeCoeffs;
use sphereflow::ndf::{integrate, Event, ToleranceSpec};
use sphereflow::operators::{NoForcing, NseSystem, PhysicsParams};
use sphereflow::transform::SphereTransform;

#[test]
fn integration_preserves_reality_condition() {
    let n = 6;
    let ex = Example2::new(5, 1e-2, 1.0);
    let tf = SphereTransform::new(n);
    let params = PhysicsParams::new(1e-2, 1.0);
    let alpha0 = ex.initial(n);
    assert!(alpha0.reality_defect() < 1e-15);
    let tol = ToleranceSpec::new(1e-5, 1e-12);
    let mut worst: f64 = 0.0;
    let mut system = NseSystem::new(&tf, params, &ex);
    integrate(
        &mut system,
        alpha0.as_slice(),
        (0.0, 0.2),
        &tol,
        &[],
        |ev| {
            if let Event::Step { y, .. } = ev {
                let alpha = ModeCoeffs::from_values(n, y.to_vec()).unwrap();
                worst = worst.max(alpha.reality_defect());
            }
        },
    )
    .unwrap();
    assert!(worst <= 1e-12, "reality defect grew to {worst:.2e}");
}

#[test]
fn integration_is_deterministic() {
    let n = 5;
    let run = || {
        let ex = Example2::new(3, 1e-3, 1.0);
        let tf = SphereTransform::new(n);
        let params = PhysicsParams::new(1e-3, 1.0);
        let alpha0 = ex.initial(n);
        let tol = ToleranceSpec::new(1e-4, 1e-10);
        let mut trace: Vec<(u64, Vec<u64>)> = Vec::new();
        let mut system = NseSystem::new(&tf, params, &ex);
        let out = integrate(
            &mut system,
            alpha0.as_slice(),
            (0.0, 0.1),
            &tol,
            &[],
            |ev| {
                if let Event::Step { t, y } = ev {
                    // bit-exact trace of every accepted step
                    trace.push((
                        t.to_bits(),
                        y.iter().flat_map(|c| [c.re.to_bits(), c.im.to_bits()]).collect(),
                    ));
                }
            },
        )
        .unwrap();
        (trace, out.y)
    };
    let (trace_a, ya) = run();
    let (trace_b, yb) = run();
    assert_eq!(trace_a, trace_b, "step traces differ between identical runs");
    assert_eq!(ya, yb);
}

#[test]
fn pure_stokes_decay_matches_exponential() {
    // single zonal mode, no forcing, Omega irrelevant (m = 0):
    // d alpha/dt = -nu lambda_1 alpha, exact e^{-0.2 t} for nu = 0.1
    let n = 4;
    let tf = SphereTransform::new(n);
    let nu = 0.1;
    let params = PhysicsParams::new(nu, 0.0);
    let alpha0 = ModeCoeffs::delta(n, ModeIndex::new(1, 0));
    let rtol = 1e-6;
    let tol = ToleranceSpec::new(rtol, 1e-14);
    let t_end = 3.0;
    let mut system = NseSystem::new(&tf, params, NoForcing);
    let out = integrate(&mut system, alpha0.as_slice(), (0.0, t_end), &tol, &[], |_| {}).unwrap();
    let exact = (-nu * 2.0 * t_end).exp();
    let idx = ModeIndex::new(1, 0).flat_index();
    assert!(
        (out.y[idx].re - exact).abs() <= 10.0 * rtol * exact,
        "decay error {} vs allowance {}",
        (out.y[idx].re - exact).abs(),
        10.0 * rtol * exact
    );
    // nothing leaks into other modes
    let leak: f64 = out
        .y
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, v)| v.norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(leak < 1e-12, "energy leaked into other modes: {leak:.2e}");
    let _ = Complex64::default();
}
