//! FFT-accelerated forward (analysis) and inverse (synthesis) transforms
//! between spectral coefficients and grid fields.
//!
//! The colatitude-dependent factors of the basis functions are precomputed
//! once per (N, grid) pair and stored per quadrature ring; the azimuthal
//! exponentials are never materialized pointwise — each ring's azimuthal
//! sum is an FFT over bins indexed by m - sigma (mod M). The latitudinal
//! contraction is a dense sum per mode and ring (no fast Legendre
//! transform), with a fixed summation order within a ring and compensated
//! summation across rings so parallel and serial execution agree.

use crate::basis::{modes, normalized_legendre_all, ModeIndex};
use crate::error::{Error, Result};
use crate::grid::{GridScalarField, GridVectorField, ModeCoeffs, QuadratureGrid};
use crate::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Covariant slot order used throughout: sigma = +1, 0, -1.
const SIGMAS: [i64; 3] = [1, 0, -1];

/// Per-ring real factors of Y, Grad Y and x̂ × Grad Y for every mode.
///
/// Layout is mode-major: entry (mode, ring) sits at
/// `mode.flat_index() * n_rings + ring`. The D factors are stored without
/// the leading i.
pub struct BasisTables {
    n_rings: usize,
    p: Vec<f64>,
    b: [Vec<f64>; 3],
    d: [Vec<f64>; 3],
}

impl BasisTables {
    pub fn build(n: usize, grid: &QuadratureGrid) -> Self {
        let n_rings = grid.n_rings();
        let n_modes = crate::basis::mode_count(n);
        let tri = |l: usize, m: usize| l * (l + 1) / 2 + m;
        // one row of 7 values per (mode, ring), computed ring-parallel
        let rows: Vec<Vec<[f64; 7]>> = grid
            .cos_colatitudes()
            .par_iter()
            .map(|&x| {
                let table = normalized_legendre_all(n + 1, x);
                let look = |l: usize, m: i64| -> f64 {
                    let ma = m.unsigned_abs() as usize;
                    if ma > l {
                        return 0.0;
                    }
                    let v = table[tri(l, ma)];
                    if m < 0 && ma % 2 == 1 {
                        -v
                    } else {
                        v
                    }
                };
                modes(n)
                    .map(|idx| {
                        let (l, m) = (idx.l, idx.m);
                        let li = l as i64;
                        let lf = l as f64;
                        let c_l = (lf + 1.0) * (lf / (2.0 * lf + 1.0)).sqrt();
                        let d_l = lf * ((lf + 1.0) / (2.0 * lf + 1.0)).sqrt();
                        let sqrt_lambda = idx.lambda().sqrt();
                        let mut row = [0.0; 7];
                        row[0] = look(l, m);
                        for (s, sigma) in SIGMAS.iter().enumerate() {
                            let mo = m - sigma;
                            let cg_lo = crate::basis::cg_with_one(li, m, li - 1, mo, *sigma);
                            let cg_hi = crate::basis::cg_with_one(li, m, li + 1, mo, *sigma);
                            let mut bval = 0.0;
                            if cg_lo != 0.0 {
                                bval += c_l * cg_lo * look(l - 1, mo);
                            }
                            if cg_hi != 0.0 {
                                bval += d_l * cg_hi * look(l + 1, mo);
                            }
                            row[1 + s] = bval;
                            let cg_d = crate::basis::cg_with_one(li, m, li, mo, *sigma);
                            row[4 + s] = if cg_d == 0.0 {
                                0.0
                            } else {
                                sqrt_lambda * cg_d * look(l, mo)
                            };
                        }
                        row
                    })
                    .collect()
            })
            .collect();
        let mut tables = BasisTables {
            n_rings,
            p: vec![0.0; n_modes * n_rings],
            b: [
                vec![0.0; n_modes * n_rings],
                vec![0.0; n_modes * n_rings],
                vec![0.0; n_modes * n_rings],
            ],
            d: [
                vec![0.0; n_modes * n_rings],
                vec![0.0; n_modes * n_rings],
                vec![0.0; n_modes * n_rings],
            ],
        };
        for (ring, row) in rows.iter().enumerate() {
            for (mode, vals) in row.iter().enumerate() {
                let at = mode * n_rings + ring;
                tables.p[at] = vals[0];
                for s in 0..3 {
                    tables.b[s][at] = vals[1 + s];
                    tables.d[s][at] = vals[4 + s];
                }
            }
        }
        tables
    }

    #[inline]
    fn at(&self, mode: usize, ring: usize) -> usize {
        mode * self.n_rings + ring
    }
}

/// Which linear combination `synthesize` evaluates on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// sum alpha Z_{L,m} (the velocity field)
    Velocity,
    /// sum alpha lambda^{-1/2} Grad Y (equals x̂ × velocity)
    ScaledGradient,
    /// sum alpha lambda^{1/2} Y (the vorticity scalar)
    VorticityScalar,
    /// -sum alpha lambda^{-1/2} Y (the vorticity stream function)
    StreamScalar,
}

/// Grid + tables + FFT plans for one truncation.
pub struct SphereTransform {
    grid: QuadratureGrid,
    tables: BasisTables,
    truncation: usize,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
    parallel: bool,
}

impl SphereTransform {
    /// Transform at truncation N on the standard grid (M = 3N+2 rounded
    /// even).
    pub fn new(n: usize) -> Self {
        Self::with_grid(n, QuadratureGrid::for_truncation(n))
    }

    /// Transform at truncation N on a caller-supplied grid. The grid must
    /// resolve the stored azimuthal bins (M/2 > N+1).
    pub fn with_grid(n: usize, grid: QuadratureGrid) -> Self {
        assert!(
            grid.n_lon() / 2 > n + 1,
            "grid with M = {} cannot hold truncation N = {n}",
            grid.n_lon()
        );
        let tables = BasisTables::build(n, &grid);
        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(grid.n_lon());
        let fft_inv = planner.plan_fft_inverse(grid.n_lon());
        SphereTransform {
            grid,
            tables,
            truncation: n,
            fft_fwd,
            fft_inv,
            parallel: true,
        }
    }

    /// Disable the ring/mode-parallel paths (results are identical either
    /// way; used to verify determinism).
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    fn check_coeffs(&self, alpha: &ModeCoeffs) -> Result<()> {
        if alpha.truncation() != self.truncation {
            return Err(Error::TruncationExceeded {
                requested: alpha.truncation(),
                capacity: self.truncation,
            });
        }
        Ok(())
    }

    fn check_field_dims(&self, n_rings: usize, n_lon: usize) -> Result<()> {
        if n_rings != self.grid.n_rings() || n_lon != self.grid.n_lon() {
            return Err(Error::DimensionMismatch(format!(
                "field is {n_rings}x{n_lon}, transform grid is {}x{}",
                self.grid.n_rings(),
                self.grid.n_lon()
            )));
        }
        Ok(())
    }

    #[inline]
    fn bin(&self, k: i64) -> usize {
        k.rem_euclid(self.grid.n_lon() as i64) as usize
    }

    /// Evaluate one of the four spectral sums on the grid.
    pub fn synthesize_scalar(&self, alpha: &ModeCoeffs, kind: SynthKind) -> Result<GridScalarField> {
        let scale: fn(f64) -> f64 = match kind {
            SynthKind::VorticityScalar => |lam| lam.sqrt(),
            SynthKind::StreamScalar => |lam| -1.0 / lam.sqrt(),
            _ => {
                return Err(Error::Domain(
                    "synthesize_scalar expects a scalar synthesis kind".into(),
                ))
            }
        };
        self.check_coeffs(alpha)?;
        let n = self.truncation;
        let n_lon = self.grid.n_lon();
        let n_rings = self.grid.n_rings();
        let rows: Vec<Vec<Complex>> = self.for_each_ring(n_rings, |p| {
            let mut bins = vec![Complex::default(); n_lon];
            for m in -(n as i64)..=n as i64 {
                let mut acc = Complex::default();
                for l in (m.unsigned_abs() as usize).max(1)..=n {
                    let idx = ModeIndex::new(l, m);
                    let t = self.tables.p[self.tables.at(idx.flat_index(), p)];
                    acc += alpha.get(idx) * (scale(idx.lambda()) * t);
                }
                bins[self.bin(m)] += acc;
            }
            self.fft_inv.process(&mut bins);
            bins
        });
        let mut field = GridScalarField::zeros(&self.grid);
        for (p, row) in rows.into_iter().enumerate() {
            field.values[p * n_lon..(p + 1) * n_lon].copy_from_slice(&row);
        }
        Ok(field)
    }

    /// Evaluate a vector spectral sum (velocity or scaled gradient) on the
    /// grid, in covariant components.
    pub fn synthesize_vector(&self, alpha: &ModeCoeffs, kind: SynthKind) -> Result<GridVectorField> {
        self.check_coeffs(alpha)?;
        // per-L complex coefficient scale and table selector
        let use_d = match kind {
            SynthKind::Velocity => true,
            SynthKind::ScaledGradient => false,
            _ => {
                return Err(Error::Domain(
                    "synthesize_vector expects a vector synthesis kind".into(),
                ))
            }
        };
        let n = self.truncation;
        let n_lon = self.grid.n_lon();
        let n_rings = self.grid.n_rings();
        let rows: Vec<[Vec<Complex>; 3]> = self.for_each_ring(n_rings, |p| {
            let mut out: [Vec<Complex>; 3] = std::array::from_fn(|_| vec![Complex::default(); n_lon]);
            for (s, sigma) in SIGMAS.iter().enumerate() {
                let table = if use_d { &self.tables.d[s] } else { &self.tables.b[s] };
                let mut bins = vec![Complex::default(); n_lon];
                for m in -(n as i64)..=n as i64 {
                    let mut acc = Complex::default();
                    for l in (m.unsigned_abs() as usize).max(1)..=n {
                        let idx = ModeIndex::new(l, m);
                        let t = table[self.tables.at(idx.flat_index(), p)];
                        let scale = if use_d {
                            // Z = -lambda^{-1/2} (i d)
                            Complex::new(0.0, -1.0 / idx.lambda().sqrt())
                        } else {
                            Complex::new(1.0 / idx.lambda().sqrt(), 0.0)
                        };
                        acc += alpha.get(idx) * scale * t;
                    }
                    bins[self.bin(m - sigma)] += acc;
                }
                self.fft_inv.process(&mut bins);
                out[s] = bins;
            }
            out
        });
        let mut field = GridVectorField::zeros(&self.grid);
        for (p, row) in rows.into_iter().enumerate() {
            for s in 0..3 {
                field.comps[s][p * n_lon..(p + 1) * n_lon].copy_from_slice(&row[s]);
            }
        }
        Ok(field)
    }

    /// Discrete orthogonal projection: alpha_{L,m} = (v, Z_{L,m})_M.
    ///
    /// One FFT per ring and covariant component, then a weighted Legendre
    /// contraction with the conjugated D tables scaled by -lambda^{-1/2}.
    pub fn analyze(&self, v: &GridVectorField) -> Result<ModeCoeffs> {
        self.check_field_dims(v.n_rings, v.n_lon)?;
        let n_lon = self.grid.n_lon();
        let n_rings = self.grid.n_rings();
        // azimuthal forward FFTs, ring by ring
        let spectra: Vec<[Vec<Complex>; 3]> = self.for_each_ring(n_rings, |p| {
            std::array::from_fn(|s| {
                let mut row = v.comps[s][p * n_lon..(p + 1) * n_lon].to_vec();
                self.fft_fwd.process(&mut row);
                row
            })
        });
        let prefactor = self.grid.prefactor();
        let weights = self.grid.weights();
        let mode_list: Vec<ModeIndex> = modes(self.truncation).collect();
        let contract = |idx: &ModeIndex| -> Complex {
            let mode = idx.flat_index();
            // conj(Zt) = conj(-i lambda^{-1/2} d) = i lambda^{-1/2} d
            let zt_scale = Complex::new(0.0, 1.0 / idx.lambda().sqrt());
            let mut sum = Complex::default();
            let mut comp = Complex::default();
            for (p, &w) in weights.iter().enumerate() {
                let mut ring = Complex::default();
                for (s, sigma) in SIGMAS.iter().enumerate() {
                    let d = self.tables.d[s][self.tables.at(mode, p)];
                    if d != 0.0 {
                        ring += spectra[p][s][self.bin(idx.m - sigma)] * d;
                    }
                }
                // Neumaier-compensated accumulation across rings
                let term = ring * w;
                let y = term - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            sum * zt_scale * prefactor
        };
        let values: Vec<Complex> = if self.parallel {
            mode_list.par_iter().map(contract).collect()
        } else {
            mode_list.iter().map(contract).collect()
        };
        ModeCoeffs::from_values(self.truncation, values)
    }

    /// Scalar analysis against Y_{L,m} for L = 1..N (the L = 0 mean is
    /// dropped; vorticity and stream fields of divergence-free flows have
    /// none).
    pub fn analyze_scalar(&self, psi: &GridScalarField) -> Result<ModeCoeffs> {
        self.check_field_dims(psi.n_rings, psi.n_lon)?;
        let n_lon = self.grid.n_lon();
        let n_rings = self.grid.n_rings();
        let spectra: Vec<Vec<Complex>> = self.for_each_ring(n_rings, |p| {
            let mut row = psi.values[p * n_lon..(p + 1) * n_lon].to_vec();
            self.fft_fwd.process(&mut row);
            row
        });
        let prefactor = self.grid.prefactor();
        let weights = self.grid.weights();
        let mode_list: Vec<ModeIndex> = modes(self.truncation).collect();
        let contract = |idx: &ModeIndex| -> Complex {
            let mode = idx.flat_index();
            let mut sum = Complex::default();
            let mut comp = Complex::default();
            for (p, &w) in weights.iter().enumerate() {
                let t = self.tables.p[self.tables.at(mode, p)];
                let term = spectra[p][self.bin(idx.m)] * (t * w);
                let y = term - comp;
                let s = sum + y;
                comp = (s - sum) - y;
                sum = s;
            }
            sum * prefactor
        };
        let values: Vec<Complex> = if self.parallel {
            mode_list.par_iter().map(contract).collect()
        } else {
            mode_list.iter().map(contract).collect()
        };
        ModeCoeffs::from_values(self.truncation, values)
    }

    fn for_each_ring<T: Send>(&self, n_rings: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
        if self.parallel {
            (0..n_rings).into_par_iter().map(f).collect()
        } else {
            (0..n_rings).map(f).collect()
        }
    }
}
