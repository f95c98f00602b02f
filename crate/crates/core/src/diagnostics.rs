//! Energy spectra, vorticity stream function, approximate inertial
//! manifold, and error norms.

use crate::basis::{modes, CovariantVector};
use crate::error::{Error, Result};
use crate::grid::{GridScalarField, GridVectorField, ModeCoeffs};
use crate::operators::{nonlinear_galerkin, PhysicsParams};
use crate::transform::{SphereTransform, SynthKind};

/// Shell-summed energy spectrum E(L) = sum_{|m|<=L} |alpha_{L,m}|^2.
#[derive(Debug, Clone)]
pub struct EnergySpectrum {
    shells: Vec<f64>,
}

impl EnergySpectrum {
    /// E(L); shells are 1-indexed by degree.
    pub fn shell(&self, l: usize) -> f64 {
        self.shells[l - 1]
    }

    pub fn max_degree(&self) -> usize {
        self.shells.len()
    }

    pub fn total(&self) -> f64 {
        self.shells.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.shells.iter().enumerate().map(|(i, &e)| (i + 1, e))
    }
}

pub fn energy_spectrum(alpha: &ModeCoeffs) -> EnergySpectrum {
    let mut shells = vec![0.0; alpha.truncation()];
    for (idx, v) in alpha.iter() {
        shells[idx.l - 1] += v.norm_sqr();
    }
    EnergySpectrum { shells }
}

/// Vorticity stream function Psi = -sum lambda^{-1/2} alpha Y on the grid.
pub fn stream_function(tf: &SphereTransform, alpha: &ModeCoeffs) -> Result<GridScalarField> {
    tf.synthesize_scalar(alpha, SynthKind::StreamScalar)
}

/// The vorticity scalar Delta Psi = sum lambda^{1/2} alpha Y; the normal
/// vorticity field is x̂ times this.
pub fn vorticity_scalar(tf: &SphereTransform, alpha: &ModeCoeffs) -> Result<GridScalarField> {
    tf.synthesize_scalar(alpha, SynthKind::VorticityScalar)
}

/// Approximate inertial manifold: reconstruct the slaved shell
/// N1 < L <= 2 N1 from the resolved modes,
/// Phi = (nu A + C)^{-1} (Pi_{2N1} - Pi_{N1}) [f - B(u_{N1}, u_{N1})].
///
/// `tf_ext` must be a transform at truncation 2 N1 (its grid keeps the
/// quadrature in the nonlinear analysis stage exact). `forcing` is given
/// at the extended truncation; pass None for f = 0. The result lives at
/// truncation 2 N1 with the low shells zero.
pub fn inertial_manifold(
    tf_ext: &SphereTransform,
    resolved: &ModeCoeffs,
    n1: usize,
    forcing: Option<&ModeCoeffs>,
    params: &PhysicsParams,
) -> Result<ModeCoeffs> {
    let n_ext = 2 * n1;
    if tf_ext.truncation() != n_ext {
        return Err(Error::TruncationExceeded {
            requested: n_ext,
            capacity: tf_ext.truncation(),
        });
    }
    let low = resolved.resized(n_ext).truncate_above(n1)?;
    let b = nonlinear_galerkin(tf_ext, &low)?;
    let mut out = ModeCoeffs::zeros(n_ext);
    for idx in modes(n_ext) {
        if idx.l <= n1 {
            continue;
        }
        let mut r = -b.get(idx);
        if let Some(f) = forcing {
            r += f.get(idx);
        }
        out.set(idx, r / params.linear_diag(idx.l, idx.m));
    }
    Ok(out)
}

/// L^2(TS) error between two coefficient vectors (truncations may differ;
/// the shorter one is zero-padded).
pub fn field_error(a: &ModeCoeffs, b: &ModeCoeffs) -> f64 {
    let n = a.truncation().max(b.truncation());
    a.resized(n).sub(&b.resized(n)).expect("same size").norm()
}

/// Discrete L^2(TS) error against a pointwise reference sampler,
/// || u_N - ref ||_M via quadrature.
pub fn field_error_vs_sampler(
    tf: &SphereTransform,
    alpha: &ModeCoeffs,
    mut reference: impl FnMut(f64, f64) -> CovariantVector,
) -> Result<f64> {
    let u = tf.synthesize_vector(alpha, SynthKind::Velocity)?;
    let mut diff = GridVectorField::zeros(tf.grid());
    for (p, &theta) in tf.grid().colatitudes().iter().enumerate() {
        for (q, &phi) in tf.grid().longitudes().iter().enumerate() {
            let r = reference(theta, phi);
            let v = u.at(p, q);
            diff.set(
                p,
                q,
                CovariantVector::new(v.plus - r.plus, v.zero - r.zero, v.minus - r.minus),
            );
        }
    }
    Ok(tf.grid().inner_vector(&diff, &diff)?.re.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{scalar_harmonic, z_basis, ModeIndex};
    use crate::Complex;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spectrum_of_single_mode() {
        let c = Complex::new(0.3, -1.2);
        let mut alpha = ModeCoeffs::zeros(4);
        alpha.set(ModeIndex::new(1, 0), c);
        let e = energy_spectrum(&alpha);
        assert_relative_eq!(e.shell(1), c.norm_sqr());
        for l in 2..=4 {
            assert_eq!(e.shell(l), 0.0);
        }
        assert_eq!(energy_spectrum(&ModeCoeffs::zeros(4)).total(), 0.0);
    }

    #[test]
    fn spectrum_totals_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let alpha = ModeCoeffs::from_fn(8, |_| Complex::new(rng.gen(), rng.gen()));
        let e = energy_spectrum(&alpha);
        assert_relative_eq!(e.total(), alpha.norm().powi(2), max_relative = 1e-12);
    }

    #[test]
    fn stream_and_vorticity_of_single_mode() {
        let n = 4;
        let tf = SphereTransform::new(n);
        let alpha = ModeCoeffs::delta(n, ModeIndex::new(1, 0));
        let psi = stream_function(&tf, &alpha).unwrap();
        let zeta = vorticity_scalar(&tf, &alpha).unwrap();
        for (p, &theta) in tf.grid().colatitudes().iter().enumerate() {
            for (q, &phi) in tf.grid().longitudes().iter().enumerate() {
                let y = scalar_harmonic(1, 0, theta, phi);
                assert!((psi.at(p, q) - y * (-1.0 / 2.0f64.sqrt())).norm() < 1e-13);
                assert!((zeta.at(p, q) - y * 2.0f64.sqrt()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn laplacian_consistency() {
        let n = 6;
        let tf = SphereTransform::new(n);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let alpha = ModeCoeffs::from_fn(n, |_| Complex::new(rng.gen(), rng.gen()));
        let zeta_hat = tf.analyze_scalar(&vorticity_scalar(&tf, &alpha).unwrap()).unwrap();
        let psi_hat = tf.analyze_scalar(&stream_function(&tf, &alpha).unwrap()).unwrap();
        for idx in modes(n) {
            let want = -idx.lambda() * psi_hat.get(idx).re;
            assert_relative_eq!(zeta_hat.get(idx).re, want, epsilon = 1e-12, max_relative = 1e-11);
            let want_im = -idx.lambda() * psi_hat.get(idx).im;
            assert_relative_eq!(zeta_hat.get(idx).im, want_im, epsilon = 1e-12, max_relative = 1e-11);
        }
    }

    #[test]
    fn manifold_zero_inputs() {
        let n1 = 2;
        let tf = SphereTransform::new(2 * n1);
        let params = PhysicsParams::new(0.5, 1.0);
        let out =
            inertial_manifold(&tf, &ModeCoeffs::zeros(n1), n1, None, &params).unwrap();
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn manifold_diagonal_solve_of_forcing_mode() {
        let n1 = 2;
        let nu = 0.25;
        let tf = SphereTransform::new(2 * n1);
        let params = PhysicsParams::new(nu, 1.0);
        let f = ModeCoeffs::delta(2 * n1, ModeIndex::new(3, 0));
        let out =
            inertial_manifold(&tf, &ModeCoeffs::zeros(n1), n1, Some(&f), &params).unwrap();
        let got = out.get(ModeIndex::new(3, 0));
        assert_relative_eq!(got.re, 1.0 / (nu * 12.0), epsilon = 1e-13);
        assert_relative_eq!(got.im, 0.0, epsilon = 1e-15);
        let mut rest = out.clone();
        rest.set(ModeIndex::new(3, 0), Complex::default());
        assert_eq!(rest.norm(), 0.0);
    }

    #[test]
    fn manifold_zonal_self_interaction_vanishes() {
        let n1 = 2;
        let tf = SphereTransform::new(2 * n1);
        let params = PhysicsParams::new(0.1, 1.0);
        let alpha = ModeCoeffs::delta(n1, ModeIndex::new(1, 0));
        let out = inertial_manifold(&tf, &alpha, n1, None, &params).unwrap();
        assert!(out.norm() < 1e-12);
    }

    #[test]
    fn manifold_residual_identity() {
        // on the slaved shell, (nu lambda - 2 Omega i m / lambda) beta
        // must reproduce (f - B)_{L,m} exactly
        let n1 = 3;
        let tf = SphereTransform::new(2 * n1);
        let params = PhysicsParams::new(0.05, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut alpha = ModeCoeffs::from_fn(n1, |_| Complex::new(rng.gen(), rng.gen()));
        alpha.enforce_reality();
        let f = ModeCoeffs::delta(2 * n1, ModeIndex::new(4, 2));
        let beta = inertial_manifold(&tf, &alpha, n1, Some(&f), &params).unwrap();
        let low = alpha.resized(2 * n1);
        let b = nonlinear_galerkin(&tf, &low).unwrap();
        for idx in modes(2 * n1) {
            if idx.l <= n1 {
                assert_eq!(beta.get(idx), Complex::default());
                continue;
            }
            let lhs = params.linear_diag(idx.l, idx.m) * beta.get(idx);
            let rhs = f.get(idx) - b.get(idx);
            assert!((lhs - rhs).norm() < 1e-13 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn field_error_basics() {
        let a = ModeCoeffs::delta(3, ModeIndex::new(1, 0));
        assert_eq!(field_error(&a, &a), 0.0);
        assert_relative_eq!(field_error(&a, &ModeCoeffs::zeros(3)), 1.0);
        // mixed truncations
        assert_relative_eq!(field_error(&a, &ModeCoeffs::zeros(6)), 1.0);
    }

    #[test]
    fn field_error_sampler_agrees_with_spectral() {
        let n = 5;
        let tf = SphereTransform::new(n);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let alpha = ModeCoeffs::from_fn(n, |_| Complex::new(rng.gen(), rng.gen()));
        let beta = ModeCoeffs::from_fn(n, |_| Complex::new(rng.gen(), rng.gen()));
        let spectral = field_error(&alpha, &beta);
        let sampled = field_error_vs_sampler(&tf, &alpha, |theta, phi| {
            let mut acc = CovariantVector::zeros();
            for (idx, v) in beta.iter() {
                acc = acc.add(&z_basis(idx, theta, phi).scale(v));
            }
            acc
        })
        .unwrap();
        assert_relative_eq!(spectral, sampled, max_relative = 1e-11);
    }
}
