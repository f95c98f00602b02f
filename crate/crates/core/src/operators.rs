//! Spectral-space Galerkin operators: diagonal Stokes, diagonal Coriolis,
//! the pseudospectral nonlinear term, forcing projection, and the
//! assembled ODE right-hand side.

use crate::error::Result;
use crate::grid::{GridVectorField, ModeCoeffs};
use crate::transform::{SphereTransform, SynthKind};
use crate::Complex;

/// Physical parameters of the flow. Density is normalized to 1 (the
/// pressure gradient never appears: the weak form eliminates it).
#[derive(Debug, Clone, Copy)]
pub struct PhysicsParams {
    /// kinematic viscosity, > 0
    pub nu: f64,
    /// angular velocity of the rotating sphere
    pub omega: f64,
}

impl PhysicsParams {
    pub fn new(nu: f64, omega: f64) -> Self {
        assert!(nu > 0.0, "viscosity must be positive");
        PhysicsParams { nu, omega }
    }

    /// Diagonal Galerkin entry of nu A + C at mode (L, m):
    /// nu lambda_L - 2 Omega i m / lambda_L.
    pub fn linear_diag(&self, l: usize, m: i64) -> Complex {
        let lambda = (l * (l + 1)) as f64;
        Complex::new(self.nu * lambda, -2.0 * self.omega * m as f64 / lambda)
    }
}

/// (A alpha)_{L,m} = lambda_L alpha_{L,m}, lambda_L = L(L+1).
pub fn stokes_apply(alpha: &ModeCoeffs) -> ModeCoeffs {
    let mut out = alpha.clone();
    for (idx, v) in alpha.iter() {
        out.set(idx, v * idx.lambda());
    }
    out
}

/// Diagonal Coriolis application:
/// (C alpha)_{L,m} = -2 Omega i (m / lambda_L) alpha_{L,m}.
///
/// This is the exact Galerkin matrix; no quadrature is performed.
pub fn coriolis_galerkin(alpha: &ModeCoeffs, omega: f64) -> ModeCoeffs {
    let mut out = alpha.clone();
    for (idx, v) in alpha.iter() {
        let factor = Complex::new(0.0, -2.0 * omega * idx.m as f64 / idx.lambda());
        out.set(idx, v * factor);
    }
    out
}

/// Galerkin projection of the advection term,
/// B̂_{L,m} = (B(u,u), Z_{L,m})_M with u = sum alpha Z.
///
/// Transform method: synthesize the vorticity scalar
/// zeta = sum alpha lambda^{1/2} Y and the scaled gradient
/// G = sum alpha lambda^{-1/2} Grad Y = x̂ × u, form the pointwise product
/// zeta G, and project. With M = 3N+2 the quadrature in the projection is
/// exact (integrand degree <= 3N+1), so no aliasing control is needed.
pub fn nonlinear_galerkin(tf: &SphereTransform, alpha: &ModeCoeffs) -> Result<ModeCoeffs> {
    let zeta = tf.synthesize_scalar(alpha, SynthKind::VorticityScalar)?;
    let grad = tf.synthesize_vector(alpha, SynthKind::ScaledGradient)?;
    let product = grad.scaled_by(&zeta)?;
    tf.analyze(&product)
}

/// Projection of a pointwise tangential forcing field:
/// f̂_{L,m} = (f, Z_{L,m})_M.
pub fn forcing_coeffs(tf: &SphereTransform, field: &GridVectorField) -> Result<ModeCoeffs> {
    tf.analyze(field)
}

/// The assembled right-hand side of d alpha/dt = F(t, alpha):
/// F = f̂ - nu A alpha - C alpha - B̂(alpha).
pub fn rhs(
    tf: &SphereTransform,
    alpha: &ModeCoeffs,
    params: &PhysicsParams,
    forcing: Option<&ModeCoeffs>,
) -> Result<ModeCoeffs> {
    let mut out = nonlinear_galerkin(tf, alpha)?;
    out.scale(Complex::new(-1.0, 0.0));
    for (idx, v) in alpha.iter() {
        let lin = Complex::new(params.nu * idx.lambda(), 0.0) * v
            + Complex::new(0.0, -2.0 * params.omega * idx.m as f64 / idx.lambda()) * v;
        let cur = out.get(idx);
        out.set(idx, cur - lin);
    }
    if let Some(f) = forcing {
        out.add_scaled(f, Complex::new(1.0, 0.0));
    }
    Ok(out)
}

/// Time-dependent forcing supplied to the solver in spectral form.
pub trait ForcingTerm {
    /// f̂ at time t, truncated (or zero-padded) to truncation n.
    fn coeffs(&mut self, t: f64, n: usize) -> ModeCoeffs;
}

/// No forcing.
pub struct NoForcing;

impl ForcingTerm for NoForcing {
    fn coeffs(&mut self, _t: f64, n: usize) -> ModeCoeffs {
        ModeCoeffs::zeros(n)
    }
}

impl<F: FnMut(f64, usize) -> ModeCoeffs> ForcingTerm for F {
    fn coeffs(&mut self, t: f64, n: usize) -> ModeCoeffs {
        self(t, n)
    }
}

/// The spectral NSE as an ODE system for the NDF stepper: state is the
/// flat coefficient vector, F(t, alpha) the assembled right-hand side,
/// and the Newton iteration matrix the exact diagonal of the linear part
/// (-nu lambda_L + 2 Omega i m / lambda_L).
pub struct NseSystem<'a, F: ForcingTerm> {
    tf: &'a crate::transform::SphereTransform,
    params: PhysicsParams,
    forcing: F,
}

impl<'a, F: ForcingTerm> NseSystem<'a, F> {
    pub fn new(tf: &'a crate::transform::SphereTransform, params: PhysicsParams, forcing: F) -> Self {
        NseSystem { tf, params, forcing }
    }

    pub fn params(&self) -> PhysicsParams {
        self.params
    }

    pub fn forcing_mut(&mut self) -> &mut F {
        &mut self.forcing
    }
}

impl<F: ForcingTerm> crate::ndf::OdeSystem for NseSystem<'_, F> {
    fn dim(&self) -> usize {
        crate::basis::mode_count(self.tf.truncation())
    }

    fn rhs(&mut self, t: f64, y: &[Complex], out: &mut [Complex]) {
        let n = self.tf.truncation();
        let alpha = ModeCoeffs::from_values(n, y.to_vec()).expect("state dimension");
        let f = self.forcing.coeffs(t, n);
        let result = rhs(self.tf, &alpha, &self.params, Some(&f)).expect("rhs evaluation");
        out.copy_from_slice(result.as_slice());
    }

    fn linear_diag(&self, out: &mut [Complex]) {
        for idx in crate::basis::modes(self.tf.truncation()) {
            out[idx.flat_index()] = -self.params.linear_diag(idx.l, idx.m);
        }
    }
}
