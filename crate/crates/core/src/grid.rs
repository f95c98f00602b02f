//! The quadrature grid, pointwise field containers, and the spectral
//! coefficient vector.
//!
//! The grid couples an M/2-point Gauss-Legendre rule in colatitude with M
//! equispaced longitudes; the resulting rule Q_M integrates spherical
//! polynomials of degree <= M-1 exactly. Colatitudes are stored
//! north-to-south (descending cos theta), a pure convention.

use crate::basis::{mode_count, modes, CovariantVector, ModeIndex};
use crate::error::{Error, Result};
use crate::special::GaussRule;
use crate::Complex;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    n_lon: usize,
    colat: Vec<f64>,
    cos_colat: Vec<f64>,
    weights: Vec<f64>,
    lon: Vec<f64>,
}

impl QuadratureGrid {
    /// Grid for truncation N: M = 3N+2, rounded up to the next even
    /// integer, so products of three V_N factors are integrated exactly.
    pub fn for_truncation(n: usize) -> Self {
        assert!(n >= 1);
        let mut m = 3 * n + 2;
        if m % 2 == 1 {
            m += 1;
        }
        Self::with_lon_count(m)
    }

    /// Grid with a prescribed (even) number of longitudes M.
    pub fn with_lon_count(m: usize) -> Self {
        assert!(m >= 2 && m % 2 == 0, "M must be an even integer >= 2");
        let rule = GaussRule::new(m / 2);
        // north-to-south: descending nodes
        let mut cos_colat: Vec<f64> = rule.nodes.clone();
        let mut weights = rule.weights.clone();
        cos_colat.reverse();
        weights.reverse();
        let colat: Vec<f64> = cos_colat.iter().map(|&x| x.acos()).collect();
        let lon: Vec<f64> = (0..m).map(|q| 2.0 * PI * q as f64 / m as f64).collect();
        QuadratureGrid {
            n_lon: m,
            colat,
            cos_colat,
            weights,
            lon,
        }
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn n_rings(&self) -> usize {
        self.n_lon / 2
    }

    pub fn n_points(&self) -> usize {
        self.n_lon * self.n_rings()
    }

    pub fn colatitudes(&self) -> &[f64] {
        &self.colat
    }

    pub fn cos_colatitudes(&self) -> &[f64] {
        &self.cos_colat
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn longitudes(&self) -> &[f64] {
        &self.lon
    }

    /// 2 pi / M
    pub fn prefactor(&self) -> f64 {
        2.0 * PI / self.n_lon as f64
    }

    fn check_dims(&self, n_rings: usize, n_lon: usize) -> Result<()> {
        if n_rings != self.n_rings() || n_lon != self.n_lon {
            return Err(Error::DimensionMismatch(format!(
                "field is {n_rings}x{n_lon}, grid is {}x{}",
                self.n_rings(),
                self.n_lon
            )));
        }
        Ok(())
    }

    /// Q_M(psi): the weighted double sum over the grid.
    pub fn quad_scalar(&self, psi: &GridScalarField) -> Result<Complex> {
        self.check_dims(psi.n_rings, psi.n_lon)?;
        let mut total = Complex::default();
        for p in 0..self.n_rings() {
            let mut ring = Complex::default();
            for q in 0..self.n_lon {
                ring += psi.at(p, q);
            }
            total += ring * self.weights[p];
        }
        Ok(total * self.prefactor())
    }

    /// Discrete scalar inner product (a, b)_M = Q_M(a conj(b)).
    pub fn inner_scalar(&self, a: &GridScalarField, b: &GridScalarField) -> Result<Complex> {
        self.check_dims(a.n_rings, a.n_lon)?;
        self.check_dims(b.n_rings, b.n_lon)?;
        let mut total = Complex::default();
        for p in 0..self.n_rings() {
            let mut ring = Complex::default();
            for q in 0..self.n_lon {
                ring += a.at(p, q) * b.at(p, q).conj();
            }
            total += ring * self.weights[p];
        }
        Ok(total * self.prefactor())
    }

    /// Discrete vector inner product (u, v)_M; with the covariant basis
    /// orthonormal under the Hermitian dot, this is the componentwise sum.
    pub fn inner_vector(&self, a: &GridVectorField, b: &GridVectorField) -> Result<Complex> {
        self.check_dims(a.n_rings, a.n_lon)?;
        self.check_dims(b.n_rings, b.n_lon)?;
        let mut total = Complex::default();
        for p in 0..self.n_rings() {
            let mut ring = Complex::default();
            for q in 0..self.n_lon {
                for s in 0..3 {
                    ring += a.comps[s][p * self.n_lon + q] * b.comps[s][p * self.n_lon + q].conj();
                }
            }
            total += ring * self.weights[p];
        }
        Ok(total * self.prefactor())
    }
}

/// Pointwise complex scalar samples on a quadrature grid, ring-major.
#[derive(Debug, Clone)]
pub struct GridScalarField {
    pub(crate) n_rings: usize,
    pub(crate) n_lon: usize,
    pub(crate) values: Vec<Complex>,
}

impl GridScalarField {
    pub fn zeros(grid: &QuadratureGrid) -> Self {
        GridScalarField {
            n_rings: grid.n_rings(),
            n_lon: grid.n_lon(),
            values: vec![Complex::default(); grid.n_points()],
        }
    }

    pub fn from_fn(grid: &QuadratureGrid, mut f: impl FnMut(f64, f64) -> Complex) -> Self {
        let mut field = Self::zeros(grid);
        for (p, &theta) in grid.colatitudes().iter().enumerate() {
            for (q, &phi) in grid.longitudes().iter().enumerate() {
                field.values[p * field.n_lon + q] = f(theta, phi);
            }
        }
        field
    }

    #[inline]
    pub fn at(&self, ring: usize, lon: usize) -> Complex {
        self.values[ring * self.n_lon + lon]
    }

    #[inline]
    pub fn at_mut(&mut self, ring: usize, lon: usize) -> &mut Complex {
        &mut self.values[ring * self.n_lon + lon]
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }
}

/// Pointwise complex tangential field on a quadrature grid, stored in
/// covariant components (+1, 0, -1), each plane ring-major.
#[derive(Debug, Clone)]
pub struct GridVectorField {
    pub(crate) n_rings: usize,
    pub(crate) n_lon: usize,
    pub(crate) comps: [Vec<Complex>; 3],
}

impl GridVectorField {
    pub fn zeros(grid: &QuadratureGrid) -> Self {
        let plane = vec![Complex::default(); grid.n_points()];
        GridVectorField {
            n_rings: grid.n_rings(),
            n_lon: grid.n_lon(),
            comps: [plane.clone(), plane.clone(), plane],
        }
    }

    pub fn from_fn(grid: &QuadratureGrid, mut f: impl FnMut(f64, f64) -> CovariantVector) -> Self {
        let mut field = Self::zeros(grid);
        for (p, &theta) in grid.colatitudes().iter().enumerate() {
            for (q, &phi) in grid.longitudes().iter().enumerate() {
                let v = f(theta, phi);
                let k = p * field.n_lon + q;
                field.comps[0][k] = v.plus;
                field.comps[1][k] = v.zero;
                field.comps[2][k] = v.minus;
            }
        }
        field
    }

    #[inline]
    pub fn at(&self, ring: usize, lon: usize) -> CovariantVector {
        let k = ring * self.n_lon + lon;
        CovariantVector::new(self.comps[0][k], self.comps[1][k], self.comps[2][k])
    }

    #[inline]
    pub fn set(&mut self, ring: usize, lon: usize, v: CovariantVector) {
        let k = ring * self.n_lon + lon;
        self.comps[0][k] = v.plus;
        self.comps[1][k] = v.zero;
        self.comps[2][k] = v.minus;
    }

    /// Multiply pointwise by a scalar field.
    pub fn scaled_by(&self, scalar: &GridScalarField) -> Result<GridVectorField> {
        if scalar.n_rings != self.n_rings || scalar.n_lon != self.n_lon {
            return Err(Error::DimensionMismatch(
                "scalar/vector field size mismatch".into(),
            ));
        }
        let mut out = self.clone();
        for s in 0..3 {
            for (v, z) in out.comps[s].iter_mut().zip(&scalar.values) {
                *v *= z;
            }
        }
        Ok(out)
    }
}

/// Complex spectral coefficients alpha_{L,m} of a tangential
/// divergence-free field in the Z_{L,m} basis: the solver state.
///
/// All m in -L..L are stored; a real-valued physical field satisfies the
/// reality condition alpha_{L,-m} = (-1)^m conj(alpha_{L,m}).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoeffs {
    truncation: usize,
    values: Vec<Complex>,
}

impl ModeCoeffs {
    pub fn zeros(n: usize) -> Self {
        ModeCoeffs {
            truncation: n,
            values: vec![Complex::default(); mode_count(n)],
        }
    }

    /// Unit coefficient at one mode, zero elsewhere.
    pub fn delta(n: usize, idx: ModeIndex) -> Self {
        let mut c = Self::zeros(n);
        c.set(idx, Complex::new(1.0, 0.0));
        c
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(ModeIndex) -> Complex) -> Self {
        let mut c = Self::zeros(n);
        for idx in modes(n) {
            c.values[idx.flat_index()] = f(idx);
        }
        c
    }

    pub fn from_values(n: usize, values: Vec<Complex>) -> Result<Self> {
        if values.len() != mode_count(n) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients for N = {n}, got {}",
                mode_count(n),
                values.len()
            )));
        }
        Ok(ModeCoeffs {
            truncation: n,
            values,
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, idx: ModeIndex) -> Complex {
        self.values[idx.flat_index()]
    }

    #[inline]
    pub fn set(&mut self, idx: ModeIndex, v: Complex) {
        self.values[idx.flat_index()] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeIndex, Complex)> + '_ {
        modes(self.truncation).map(move |idx| (idx, self.values[idx.flat_index()]))
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex] {
        &mut self.values
    }

    /// L^2(TS) norm via Parseval.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Energy norm ||.||_V = (A ., .)^(1/2): sqrt(sum lambda_L |alpha|^2).
    pub fn v_norm(&self) -> f64 {
        self.iter()
            .map(|(idx, v)| idx.lambda() * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// sum conj(alpha_{L,m}) beta_{L,m}.
    pub fn inner(&self, other: &ModeCoeffs) -> Result<Complex> {
        if self.truncation != other.truncation {
            return Err(Error::DimensionMismatch(
                "coefficient truncations differ".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Max deviation from the reality condition
    /// alpha_{L,-m} = (-1)^m conj(alpha_{L,m}).
    pub fn reality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for l in 1..=self.truncation {
            for m in 0..=l as i64 {
                let a = self.get(ModeIndex::new(l, m));
                let b = self.get(ModeIndex::new(l, -m));
                let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
                worst = worst.max((b - a.conj() * sgn).norm());
            }
        }
        worst
    }

    /// Project onto the reality-condition subspace (symmetrize m and -m).
    pub fn enforce_reality(&mut self) {
        for l in 1..=self.truncation {
            for m in 1..=l as i64 {
                let ip = ModeIndex::new(l, m).flat_index();
                let im = ModeIndex::new(l, -m).flat_index();
                let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
                let a = (self.values[ip] + self.values[im].conj() * sgn) * 0.5;
                self.values[ip] = a;
                self.values[im] = a.conj() * sgn;
            }
            let i0 = ModeIndex::new(l, 0).flat_index();
            self.values[i0] = Complex::new(self.values[i0].re, 0.0);
        }
    }

    /// Zero all coefficients with L > n1 (a projection; the truncation
    /// parameter of the container is unchanged).
    pub fn truncate_above(&self, n1: usize) -> Result<ModeCoeffs> {
        if n1 < 1 || n1 > self.truncation {
            return Err(Error::Domain(format!(
                "truncation cutoff {n1} outside 1..={}",
                self.truncation
            )));
        }
        let mut out = self.clone();
        for idx in modes(self.truncation) {
            if idx.l > n1 {
                out.values[idx.flat_index()] = Complex::default();
            }
        }
        Ok(out)
    }

    /// Re-home the coefficients in a space of different truncation,
    /// zero-padding or dropping high shells.
    pub fn resized(&self, n: usize) -> ModeCoeffs {
        let mut out = ModeCoeffs::zeros(n);
        for idx in modes(self.truncation.min(n)) {
            out.set(idx, self.get(idx));
        }
        out
    }

    pub fn scale(&mut self, c: Complex) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn add_scaled(&mut self, other: &ModeCoeffs, c: Complex) {
        debug_assert_eq!(self.truncation, other.truncation);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b * c;
        }
    }

    pub fn sub(&self, other: &ModeCoeffs) -> Result<ModeCoeffs> {
        if self.truncation != other.truncation {
            return Err(Error::DimensionMismatch(
                "coefficient truncations differ".into(),
            ));
        }
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a -= b;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::scalar_harmonic;
    use approx::assert_relative_eq;

    #[test]
    fn grid_sizes_follow_truncation() {
        assert_eq!(QuadratureGrid::for_truncation(10).n_lon(), 32);
        // 3*3+2 = 11 is odd, rounded up
        assert_eq!(QuadratureGrid::for_truncation(3).n_lon(), 12);
        let g = QuadratureGrid::for_truncation(100);
        assert_eq!(g.n_lon(), 302);
        assert_eq!(g.n_points(), 302 * 151);
    }

    #[test]
    fn quadrature_of_constant_is_sphere_area() {
        for n in [1, 4, 9] {
            let g = QuadratureGrid::for_truncation(n);
            let one = GridScalarField::from_fn(&g, |_, _| Complex::new(1.0, 0.0));
            let q = g.quad_scalar(&one).unwrap();
            assert_relative_eq!(q.re, 4.0 * PI, epsilon = 1e-12);
            assert!(q.im.abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_kills_single_harmonic() {
        let g = QuadratureGrid::for_truncation(4);
        let y10 = GridScalarField::from_fn(&g, |t, p| scalar_harmonic(1, 0, t, p));
        assert!(g.quad_scalar(&y10).unwrap().norm() < 1e-13);
    }

    #[test]
    fn quadrature_norm_of_harmonic_is_one() {
        let g = QuadratureGrid::for_truncation(4);
        let y21 = GridScalarField::from_fn(&g, |t, p| scalar_harmonic(2, 1, t, p));
        let sq = GridScalarField::from_fn(&g, |t, p| {
            let y = scalar_harmonic(2, 1, t, p);
            y * y.conj()
        });
        assert_relative_eq!(g.quad_scalar(&sq).unwrap().re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(g.inner_scalar(&y21, &y21).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g4 = QuadratureGrid::for_truncation(4);
        let g6 = QuadratureGrid::for_truncation(6);
        let f = GridScalarField::zeros(&g6);
        assert!(g4.quad_scalar(&f).is_err());
    }

    #[test]
    fn reality_condition_round_trip() {
        let mut c = ModeCoeffs::zeros(4);
        c.set(ModeIndex::new(2, 1), Complex::new(0.3, -0.7));
        c.set(ModeIndex::new(2, -1), Complex::new(99.0, 99.0));
        c.enforce_reality();
        assert!(c.reality_defect() < 1e-15);
        // delta on (L, m) with partner present
        let a = c.get(ModeIndex::new(2, 1));
        let b = c.get(ModeIndex::new(2, -1));
        assert_relative_eq!(b.re, -a.re);
        assert_relative_eq!(b.im, a.im);
    }

    #[test]
    fn truncate_is_projection() {
        let mut c = ModeCoeffs::zeros(6);
        for (k, idx) in modes(6).enumerate() {
            c.set(idx, Complex::new(k as f64, -1.0));
        }
        let t = c.truncate_above(3).unwrap();
        let tt = t.truncate_above(3).unwrap();
        assert_eq!(t, tt);
        assert!(t.norm() <= c.norm());
        assert_eq!(t.get(ModeIndex::new(4, 0)), Complex::default());
        assert_ne!(t.get(ModeIndex::new(3, -2)), Complex::default());
        assert!(c.truncate_above(0).is_err());
        assert!(c.truncate_above(7).is_err());
    }
}
