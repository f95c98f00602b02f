//! Simulation driver: wires an experiment, the transform, and the NDF
//! integrator together and writes snapshots plus CSV diagnostics.
//!
//! Floats in CSV output carry 17 significant digits so every 64-bit value
//! round-trips exactly; identical configs produce byte-identical outputs.

use crate::basis::ModeIndex;
use crate::config::{Experiment, SimulationConfig};
use crate::diagnostics::{
    energy_spectrum, field_error, inertial_manifold, stream_function, vorticity_scalar,
};
use crate::error::{Error, Result};
use crate::experiments::{Example1, Example2};
use crate::grid::ModeCoeffs;
use crate::ndf::{integrate, Event, StepStats, ToleranceSpec};
use crate::operators::{ForcingTerm, NseSystem, PhysicsParams};
use crate::snapshot::{save_snapshot, SnapshotMeta};
use crate::transform::{SphereTransform, SynthKind};
use crate::Complex;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

enum Problem {
    One(Example1),
    Two(Example2),
    Custom,
}

impl Problem {
    fn forcing(&self, t: f64, n: usize) -> ModeCoeffs {
        match self {
            Problem::One(ex) => ex.forcing_at(t).resized(n),
            Problem::Two(ex) => ex.forcing(t, n),
            Problem::Custom => ModeCoeffs::zeros(n),
        }
    }

    /// Exact reference field, when the experiment has one.
    fn reference(&self, t: f64) -> Option<ModeCoeffs> {
        match self {
            Problem::One(ex) => Some(ex.exact(t)),
            _ => None,
        }
    }
}

struct ProblemForcing<'a>(&'a Problem);

impl ForcingTerm for ProblemForcing<'_> {
    fn coeffs(&mut self, t: f64, n: usize) -> ModeCoeffs {
        self.0.forcing(t, n)
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct RunArtifacts {
    pub final_t: f64,
    pub final_state: ModeCoeffs,
    pub stats: StepStats,
}

/// Execute a configured simulation, writing into `config.output_dir`:
/// `snapshot_XXX.bin` at every scheduled output time, `timeseries.csv`
/// (t, ||u||, ||u||_V, f̂_{3,0}), `energy_spectrum.csv` (t, L, E, L^4 E),
/// `manifold_spectrum.csv` (t, L, E of the slaved shell), `error.csv`
/// (t, ||u - u_N||, manufactured runs only), and optional field dumps.
pub fn run(config: &SimulationConfig, cfg_hash: u64) -> Result<RunArtifacts> {
    std::fs::create_dir_all(&config.output_dir)?;
    let tf = SphereTransform::new(config.n);
    let params = PhysicsParams::new(config.nu, config.omega);

    let problem = match config.experiment {
        Experiment::Example1 => Problem::One(Example1::new(config.n0, config.nu, config.omega)),
        Experiment::Example2 => Problem::Two(Example2::new(config.seed, config.nu, config.omega)),
        Experiment::Custom => Problem::Custom,
    };

    let (alpha0, t0) = match &config.restart {
        Some(path) => {
            let (alpha, meta) = crate::snapshot::load_snapshot(path)?;
            (alpha.resized(config.n), meta.t)
        }
        None => match &problem {
            Problem::One(ex) => (ex.exact(0.0).resized(config.n), 0.0),
            Problem::Two(ex) => (ex.initial(config.n), 0.0),
            Problem::Custom => unreachable!("custom requires restart"),
        },
    };
    if config.t_end <= t0 {
        return Err(Error::ConfigGeneral(format!(
            "t_end = {} not beyond start time {t0}",
            config.t_end
        )));
    }

    // the slaved-shell reconstruction runs on its own exact grid
    let tf_ext = SphereTransform::new(2 * config.n1);

    let mut timeseries = csv_writer(&config.output_dir.join("timeseries.csv"), "t,norm,v_norm,f_3_0")?;
    let mut spectrum = csv_writer(
        &config.output_dir.join("energy_spectrum.csv"),
        "t,L,E,L4_E",
    )?;
    let mut manifold = csv_writer(
        &config.output_dir.join("manifold_spectrum.csv"),
        "t,L,E_phi",
    )?;
    let mut error_csv = match problem {
        Problem::One(_) => Some(csv_writer(
            &config.output_dir.join("error.csv"),
            "t,error",
        )?),
        _ => None,
    };

    let mut out_index = 0usize;
    let mut observe = |t: f64, y: &[Complex]| -> Result<()> {
        let alpha = ModeCoeffs::from_values(config.n, y.to_vec())?;
        let meta = SnapshotMeta {
            n: config.n,
            m_grid: tf.grid().n_lon(),
            t,
            experiment_id: config.experiment.id(),
            config_hash: cfg_hash,
        };
        save_snapshot(
            &config.output_dir.join(format!("snapshot_{out_index:03}.bin")),
            &alpha,
            &meta,
        )?;

        let f30 = problem.forcing(t, config.n).get(ModeIndex::new(3, 0)).re;
        writeln!(
            timeseries,
            "{},{},{},{}",
            fmt(t),
            fmt(alpha.norm()),
            fmt(alpha.v_norm()),
            fmt(f30)
        )?;

        let spec = energy_spectrum(&alpha);
        for (l, e) in spec.iter() {
            let l4 = (l as f64).powi(4);
            writeln!(spectrum, "{},{},{},{}", fmt(t), l, fmt(e), fmt(l4 * e))?;
        }

        let resolved = alpha.truncate_above(config.n1)?;
        let f_ext = problem.forcing(t, 2 * config.n1);
        let phi = inertial_manifold(&tf_ext, &resolved, config.n1, Some(&f_ext), &params)?;
        let phi_spec = energy_spectrum(&phi);
        for l in (config.n1 + 1)..=(2 * config.n1) {
            writeln!(manifold, "{},{},{}", fmt(t), l, fmt(phi_spec.shell(l)))?;
        }

        if let (Some(w), Some(reference)) = (error_csv.as_mut(), problem.reference(t)) {
            writeln!(w, "{},{}", fmt(t), fmt(field_error(&alpha, &reference)))?;
        }

        if config.dump_fields {
            dump_fields(
                &config.output_dir.join(format!("fields_{out_index:03}.csv")),
                &tf,
                &alpha,
            )?;
        }
        out_index += 1;
        Ok(())
    };

    let tol = ToleranceSpec::new(config.rtol, config.atol);
    let mut system = NseSystem::new(&tf, params, ProblemForcing(&problem));
    let mut observer_error: Option<Error> = None;
    let outcome = integrate(
        &mut system,
        alpha0.as_slice(),
        (t0, config.t_end),
        &tol,
        &config.output_times,
        |ev| {
            if observer_error.is_some() {
                return;
            }
            if let Event::Output { t, y } = ev {
                if let Err(e) = observe(t, y) {
                    observer_error = Some(e);
                }
            }
        },
    )?;
    if let Some(e) = observer_error {
        return Err(e);
    }

    timeseries.flush()?;
    spectrum.flush()?;
    manifold.flush()?;
    if let Some(w) = error_csv.as_mut() {
        w.flush()?;
    }

    Ok(RunArtifacts {
        final_t: outcome.t,
        final_state: ModeCoeffs::from_values(config.n, outcome.y)?,
        stats: outcome.stats,
    })
}

fn csv_writer(path: &Path, header: &str) -> Result<BufWriter<File>> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    Ok(w)
}

fn dump_fields(path: &Path, tf: &SphereTransform, alpha: &ModeCoeffs) -> Result<()> {
    let mut w = csv_writer(path, "theta,phi,ux,uy,uz,psi,zeta")?;
    let u = tf.synthesize_vector(alpha, SynthKind::Velocity)?;
    let psi = stream_function(tf, alpha)?;
    let zeta = vorticity_scalar(tf, alpha)?;
    for (p, &theta) in tf.grid().colatitudes().iter().enumerate() {
        for (q, &phi) in tf.grid().longitudes().iter().enumerate() {
            let cart = u.at(p, q).to_cartesian();
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt(theta),
                fmt(phi),
                fmt(cart[0].re),
                fmt(cart[1].re),
                fmt(cart[2].re),
                fmt(psi.at(p, q).re),
                fmt(zeta.at(p, q).re)
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Energy-spectrum rows (t, L, E, L^4 E) for a stored snapshot.
pub fn spectra_csv(alpha: &ModeCoeffs, t: f64) -> String {
    let mut out = String::from("t,L,E,L4_E\n");
    for (l, e) in energy_spectrum(alpha).iter() {
        let l4 = (l as f64).powi(4);
        out.push_str(&format!("{},{},{},{}\n", fmt(t), l, fmt(e), fmt(l4 * e)));
    }
    out
}

/// Slaved-shell spectrum rows for a stored snapshot under a config's
/// parameters.
pub fn manifold_csv(alpha: &ModeCoeffs, t: f64, config: &SimulationConfig) -> Result<String> {
    let params = PhysicsParams::new(config.nu, config.omega);
    let problem = match config.experiment {
        Experiment::Example1 => Problem::One(Example1::new(config.n0, config.nu, config.omega)),
        Experiment::Example2 => Problem::Two(Example2::new(config.seed, config.nu, config.omega)),
        Experiment::Custom => Problem::Custom,
    };
    let tf_ext = SphereTransform::new(2 * config.n1);
    let resolved = alpha.resized(config.n1.max(alpha.truncation()));
    let resolved = resolved.truncate_above(config.n1)?;
    let f_ext = problem.forcing(t, 2 * config.n1);
    let phi = inertial_manifold(&tf_ext, &resolved, config.n1, Some(&f_ext), &params)?;
    let spec = energy_spectrum(&phi);
    let mut out = String::from("t,L,E_phi\n");
    for l in (config.n1 + 1)..=(2 * config.n1) {
        out.push_str(&format!("{},{},{}\n", fmt(t), l, fmt(spec.shell(l))));
    }
    Ok(out)
}

/// Quick invariant battery for the `validate` subcommand. Prints one
/// PASS/FAIL line per check and returns whether all passed.
pub fn validate() -> bool {
    use crate::basis::{modes, z_basis};
    use crate::grid::{GridVectorField, QuadratureGrid};
    use crate::special::GaussRule;
    use rand::{Rng, SeedableRng};

    let mut all_ok = true;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("{} {name} ({detail})", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    // Gauss rule exactness
    {
        let r = GaussRule::new(8);
        let mut worst = (r.weights.iter().sum::<f64>() - 2.0).abs();
        for k in 0..=15 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            worst = worst.max((r.integrate(|x| x.powi(k)) - exact).abs());
        }
        report("gauss-legendre exactness n=8", worst < 1e-12, format!("max dev {worst:.2e}"));
    }

    // quadrature of 1 and basis orthonormality
    {
        let n = 6;
        let tf = SphereTransform::new(n);
        let grid = QuadratureGrid::for_truncation(n);
        let one = crate::grid::GridScalarField::from_fn(&grid, |_, _| Complex::new(1.0, 0.0));
        let area_dev = (grid.quad_scalar(&one).unwrap().re - 4.0 * std::f64::consts::PI).abs();
        let mut worst: f64 = area_dev;
        for idx in modes(n) {
            let field = tf
                .synthesize_vector(&ModeCoeffs::delta(n, idx), SynthKind::Velocity)
                .unwrap();
            let back = tf.analyze(&field).unwrap();
            for (j, v) in back.iter() {
                let expect = if j == idx { 1.0 } else { 0.0 };
                worst = worst.max((v - Complex::new(expect, 0.0)).norm());
            }
        }
        report("Z-basis orthonormality N=6", worst < 1e-11, format!("max dev {worst:.2e}"));
    }

    // FFT path vs direct summation
    {
        let n = 6;
        let tf = SphereTransform::new(n);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
        let alpha = ModeCoeffs::from_fn(n, |_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let fast = tf.synthesize_vector(&alpha, SynthKind::Velocity).unwrap();
        let direct = GridVectorField::from_fn(tf.grid(), |theta, phi| {
            let mut acc = crate::basis::CovariantVector::zeros();
            for (idx, a) in alpha.iter() {
                acc = acc.add(&z_basis(idx, theta, phi).scale(a));
            }
            acc
        });
        let mut worst: f64 = 0.0;
        for s in 0..3 {
            for (a, b) in fast.comps[s].iter().zip(&direct.comps[s]) {
                worst = worst.max((a - b).norm());
            }
        }
        report("FFT synthesis vs direct N=6", worst < 1e-12, format!("max dev {worst:.2e}"));
    }

    // nonlinear identities and the energy law
    {
        let n = 10;
        let tf = SphereTransform::new(n);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let mut alpha = ModeCoeffs::from_fn(n, |_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        alpha.enforce_reality();
        let b = crate::operators::nonlinear_galerkin(&tf, &alpha).unwrap();
        let cube = alpha.norm().powi(3);
        let skew = alpha.inner(&b).unwrap().re.abs();
        let enst = crate::operators::stokes_apply(&alpha).inner(&b).unwrap().re.abs();
        report("nonlinear skew-symmetry N=10", skew <= 1e-11 * cube, format!("{skew:.2e}"));
        report("nonlinear enstrophy identity N=10", enst <= 1e-10 * cube, format!("{enst:.2e}"));
        let params = PhysicsParams::new(0.01, 1.0);
        let f = crate::operators::rhs(&tf, &alpha, &params, None).unwrap();
        let lhs = 2.0 * alpha.inner(&f).unwrap().re;
        let want = -2.0 * params.nu * alpha.v_norm().powi(2);
        let dev = (lhs - want).abs() / want.abs();
        report("energy law N=10", dev < 1e-10, format!("rel dev {dev:.2e}"));
    }

    // NDF coefficients
    {
        let kappas: Vec<f64> = (1..=5)
            .map(|p| crate::ndf::ndf_coefficients(p).unwrap().kappa)
            .collect();
        let ok = kappas == vec![-0.1850, -1.0 / 9.0, -0.0823, -0.0415, 0.0];
        report("NDF kappa table", ok, format!("{kappas:?}"));
    }

    all_ok
}
