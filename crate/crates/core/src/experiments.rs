//! Constructors for the two benchmark problems: the manufactured-solution
//! convergence study and the random-initial-state turbulence run.

use crate::basis::ModeIndex;
use crate::grid::ModeCoeffs;
use crate::operators::{coriolis_galerkin, nonlinear_galerkin, stokes_apply, ForcingTerm};
use crate::transform::SphereTransform;
use crate::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Manufactured-solution benchmark. The exact field
///   u(t) = t g(t) sum_{L<=N0} [Z_{L,0} + 2 sum_{m>0} Re Z_{L,m}]
///        + g(t) W1 + (t-1) g(t) W2,
/// g(t) = nu e^{-t} [sin(5t) + cos(10t)], W1 = Z_{1,0} + 2 Re Z_{1,1},
/// W2 = Z_{2,0} + 2 Re(Z_{2,1} + Z_{2,2}), is made to solve the equations
/// by the residual method: the forcing is assembled spectrally as
/// f̂ = d alpha/dt + nu A alpha + C alpha + B̂(alpha) at truncation N0.
pub struct Example1 {
    n0: usize,
    nu: f64,
    omega: f64,
    tf: SphereTransform,
}

impl Example1 {
    pub fn new(n0: usize, nu: f64, omega: f64) -> Self {
        assert!(n0 >= 2, "exact solution needs N0 >= 2");
        Example1 {
            n0,
            nu,
            omega,
            tf: SphereTransform::new(n0),
        }
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn g(&self, t: f64) -> f64 {
        self.nu * (-t).exp() * ((5.0 * t).sin() + (10.0 * t).cos())
    }

    pub fn g_prime(&self, t: f64) -> f64 {
        self.nu * (-t).exp() * (5.0 * (5.0 * t).cos() - 10.0 * (10.0 * t).sin()
            - (5.0 * t).sin()
            - (10.0 * t).cos())
    }

    /// 2 Re(Z_{L,m}) contributes 1 at (L, m) and (-1)^m at (L, -m).
    fn add_real_pair(alpha: &mut ModeCoeffs, l: usize, m: i64, c: f64) {
        let cur = alpha.get(ModeIndex::new(l, m));
        alpha.set(ModeIndex::new(l, m), cur + c);
        if m != 0 {
            let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
            let cur = alpha.get(ModeIndex::new(l, -m));
            alpha.set(ModeIndex::new(l, -m), cur + sgn * c);
        }
    }

    /// Coefficients with the three displayed time profiles (base, W1, W2).
    fn assemble(&self, base: f64, w1: f64, w2: f64) -> ModeCoeffs {
        let mut alpha = ModeCoeffs::zeros(self.n0);
        for l in 1..=self.n0 {
            for m in 0..=l as i64 {
                Self::add_real_pair(&mut alpha, l, m, base);
            }
        }
        Self::add_real_pair(&mut alpha, 1, 0, w1);
        Self::add_real_pair(&mut alpha, 1, 1, w1);
        Self::add_real_pair(&mut alpha, 2, 0, w2);
        Self::add_real_pair(&mut alpha, 2, 1, w2);
        Self::add_real_pair(&mut alpha, 2, 2, w2);
        alpha
    }

    /// Exact solution coefficients at time t (truncation N0).
    pub fn exact(&self, t: f64) -> ModeCoeffs {
        let g = self.g(t);
        self.assemble(t * g, g, (t - 1.0) * g)
    }

    /// Analytic d/dt of the exact coefficients.
    pub fn exact_derivative(&self, t: f64) -> ModeCoeffs {
        let (g, gp) = (self.g(t), self.g_prime(t));
        self.assemble(g + t * gp, gp, g + (t - 1.0) * gp)
    }

    /// Manufactured forcing at truncation N0:
    /// f̂ = alpha' + nu A alpha + C alpha + B̂(alpha).
    pub fn forcing_at(&self, t: f64) -> ModeCoeffs {
        let alpha = self.exact(t);
        let mut f = self.exact_derivative(t);
        let mut stokes = stokes_apply(&alpha);
        stokes.scale(Complex::new(self.nu, 0.0));
        f.add_scaled(&stokes, Complex::new(1.0, 0.0));
        f.add_scaled(&coriolis_galerkin(&alpha, self.omega), Complex::new(1.0, 0.0));
        let b = nonlinear_galerkin(&self.tf, &alpha).expect("exact quadrature at N0");
        f.add_scaled(&b, Complex::new(1.0, 0.0));
        f
    }
}

impl ForcingTerm for &Example1 {
    fn coeffs(&mut self, t: f64, n: usize) -> ModeCoeffs {
        self.forcing_at(t).resized(n)
    }
}

/// Random-initial-state turbulence benchmark. The initial spectrum is
/// a_L = b_L / ||b|| with b_L = 2/[L + (nu L)^{2.5}] on shells L <= 20,
/// one random phase phi_m per order (phi_0 = 0), and the forcing drives
/// the single mode (3,0).
pub struct Example2 {
    pub seed: u64,
    pub nu: f64,
    pub omega: f64,
}

impl Example2 {
    pub const MAX_SHELL: usize = 20;

    pub fn new(seed: u64, nu: f64, omega: f64) -> Self {
        Example2 { seed, nu, omega }
    }

    /// Normalized shell amplitudes a_L, L = 1..20.
    pub fn shell_amplitudes(&self) -> Vec<f64> {
        let b: Vec<f64> = (1..=Self::MAX_SHELL)
            .map(|l| {
                let lf = l as f64;
                2.0 / (lf + (self.nu * lf).powf(2.5))
            })
            .collect();
        let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        b.into_iter().map(|x| x / norm).collect()
    }

    /// Azimuthal phases phi_0..phi_20: phi_0 = 0 and phi_m in (0, 2 pi)
    /// drawn in increasing m from ChaCha8 seeded with `seed`, so runs are
    /// bit-reproducible.
    pub fn phases(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut phases = vec![0.0];
        for _ in 1..=Self::MAX_SHELL {
            let u: f64 = rng.sample(rand::distributions::Open01);
            phases.push(2.0 * PI * u);
        }
        phases
    }

    /// Initial coefficients at truncation n (shells above 20 are zero).
    pub fn initial(&self, n: usize) -> ModeCoeffs {
        let a = self.shell_amplitudes();
        let phases = self.phases();
        ModeCoeffs::from_fn(n, |idx| {
            if idx.l > Self::MAX_SHELL {
                return Complex::default();
            }
            let amp = a[idx.l - 1];
            let m_abs = idx.m.unsigned_abs() as usize;
            if idx.m >= 0 {
                Complex::from_polar(amp, phases[m_abs])
            } else {
                let sgn = if m_abs % 2 == 0 { 1.0 } else { -1.0 };
                Complex::from_polar(amp * sgn, -phases[m_abs])
            }
        })
    }

    /// The forcing coefficient f̂_{3,0}(t): 1 up to t = 10, then an
    /// oscillatory exponential decay (continuous at t = 10).
    pub fn forcing_value(t: f64) -> f64 {
        if t <= 10.0 {
            1.0
        } else {
            (PI * t / 5.0).cos() * (-(t - 10.0) / 5.0).exp()
        }
    }

    pub fn forcing(&self, t: f64, n: usize) -> ModeCoeffs {
        let mut f = ModeCoeffs::zeros(n);
        if n >= 3 {
            f.set(ModeIndex::new(3, 0), Complex::new(Self::forcing_value(t), 0.0));
        }
        f
    }
}

impl ForcingTerm for &Example2 {
    fn coeffs(&mut self, t: f64, n: usize) -> ModeCoeffs {
        self.forcing(t, n)
    }
}
