//! Scalar spherical harmonics, covariant-component expansions of Grad Y and
//! x̂ × Grad Y, and the divergence-free vector basis Z_{L,m}.
//!
//! Conventions: Y_{L,m} is fully normalized with the Condon-Shortley phase,
//! so that conj(Y_{L,m}) = (-1)^m Y_{L,-m}, and
//! Z_{L,m} = lambda_L^{-1/2} Curl Y_{L,m} with Curl v = -x̂ × Grad v and
//! lambda_L = L(L+1).

use num_complex::Complex64;
use std::f64::consts::PI;

/// Degree/order pair indexing a mode of the divergence-free basis.
///
/// Valid solver modes have 1 <= L <= N and |m| <= L; L = 0 is allowed in
/// scalar-harmonic contexts only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub l: usize,
    pub m: i64,
}

impl ModeIndex {
    pub fn new(l: usize, m: i64) -> Self {
        debug_assert!(m.unsigned_abs() as usize <= l);
        ModeIndex { l, m }
    }

    /// Stokes eigenvalue lambda_L = L(L+1).
    pub fn lambda(&self) -> f64 {
        (self.l * (self.l + 1)) as f64
    }

    /// Flat position within the N^2+2N dimensional space V_N,
    /// L-major, m running -L..L.
    pub fn flat_index(&self) -> usize {
        self.l * self.l - 1 + (self.m + self.l as i64) as usize
    }

    pub fn from_flat(idx: usize) -> Self {
        let l = ((idx + 1) as f64).sqrt() as usize;
        let l = if (l + 1) * (l + 1) <= idx + 1 { l + 1 } else { l };
        let m = (idx + 1 - l * l) as i64 - l as i64;
        ModeIndex { l, m }
    }
}

/// Number of modes in V_N: N^2 + 2N.
pub fn mode_count(n: usize) -> usize {
    n * n + 2 * n
}

/// Iterate all modes of V_N in flat-index order.
pub fn modes(n: usize) -> impl Iterator<Item = ModeIndex> {
    (1..=n).flat_map(|l| (-(l as i64)..=l as i64).map(move |m| ModeIndex { l, m }))
}

/// A tangential (or general) complex vector expressed in the covariant
/// spherical basis e_{+1}, e_0, e_{-1}.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CovariantVector {
    pub plus: Complex64,
    pub zero: Complex64,
    pub minus: Complex64,
}

impl CovariantVector {
    pub fn new(plus: Complex64, zero: Complex64, minus: Complex64) -> Self {
        CovariantVector { plus, zero, minus }
    }

    pub fn zeros() -> Self {
        Self::default()
    }

    /// Cartesian components from the covariant expansion:
    /// e_{+1} = -(x̂' + i ŷ')/sqrt(2), e_0 = ẑ', e_{-1} = (x̂' - i ŷ')/sqrt(2).
    pub fn to_cartesian(&self) -> [Complex64; 3] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [
            (self.minus - self.plus) * s,
            -(self.plus + self.minus) * Complex64::i() * s,
            self.zero,
        ]
    }

    /// Inverse of `to_cartesian`; the covariant basis is orthonormal under
    /// the Hermitian dot product, so components are v . conj(e_sigma).
    pub fn from_cartesian(v: [Complex64; 3]) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CovariantVector {
            plus: (-v[0] + Complex64::i() * v[1]) * s,
            zero: v[2],
            minus: (v[0] + Complex64::i() * v[1]) * s,
        }
    }

    /// Hermitian dot product sum_sigma v_sigma conj(w_sigma); equals the
    /// Cartesian v . conj(w).
    pub fn dot_conj(&self, other: &CovariantVector) -> Complex64 {
        self.plus * other.plus.conj()
            + self.zero * other.zero.conj()
            + self.minus * other.minus.conj()
    }

    /// Componentwise complex conjugate of the physical field. In covariant
    /// components conjugation swaps the +1 and -1 slots with a sign.
    pub fn conj(&self) -> CovariantVector {
        CovariantVector {
            plus: -self.minus.conj(),
            zero: self.zero.conj(),
            minus: -self.plus.conj(),
        }
    }

    pub fn scale(&self, c: Complex64) -> CovariantVector {
        CovariantVector {
            plus: self.plus * c,
            zero: self.zero * c,
            minus: self.minus * c,
        }
    }

    pub fn add(&self, other: &CovariantVector) -> CovariantVector {
        CovariantVector {
            plus: self.plus + other.plus,
            zero: self.zero + other.zero,
            minus: self.minus + other.minus,
        }
    }
}

/// Fully normalized associated Legendre function
/// P̄_L^m(x) = sqrt((2L+1)/(4 pi) (L-m)!/(L+m)!) P_L^m(x), so that
/// Y_{L,m}(theta, phi) = P̄_L^m(cos theta) e^{i m phi}.
///
/// Negative orders follow P̄_L^{-m} = (-1)^m P̄_L^m. Uses the stable
/// m-diagonal seed followed by upward recurrence in L.
pub fn normalized_legendre(l: usize, m: i64, x: f64) -> f64 {
    let m_abs = m.unsigned_abs() as usize;
    if m_abs > l {
        return 0.0;
    }
    let sign = if m < 0 && m_abs % 2 == 1 { -1.0 } else { 1.0 };
    let sin_theta = (1.0 - x * x).max(0.0).sqrt();
    // P̄_m^m
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for k in 1..=m_abs {
        pmm *= -((2 * k + 1) as f64 / (2 * k) as f64).sqrt() * sin_theta;
    }
    if l == m_abs {
        return sign * pmm;
    }
    let mut p_prev = pmm;
    let mut p = ((2 * m_abs + 3) as f64).sqrt() * x * pmm;
    if l == m_abs + 1 {
        return sign * p;
    }
    for ll in (m_abs + 2)..=l {
        let (lf, mf) = (ll as f64, m_abs as f64);
        let a = ((2.0 * lf - 1.0) * (2.0 * lf + 1.0) / ((lf - mf) * (lf + mf))).sqrt();
        let b = ((2.0 * lf + 1.0) * (lf - 1.0 - mf) * (lf - 1.0 + mf)
            / ((2.0 * lf - 3.0) * (lf - mf) * (lf + mf)))
            .sqrt();
        let p_next = a * x * p - b * p_prev;
        p_prev = p;
        p = p_next;
    }
    sign * p
}

/// All P̄_L^m(x) for 0 <= m <= L <= lmax in one pass, triangular layout
/// idx = L(L+1)/2 + m.
pub fn normalized_legendre_all(lmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; (lmax + 1) * (lmax + 2) / 2];
    let sin_theta = (1.0 - x * x).max(0.0).sqrt();
    let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            pmm *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * sin_theta;
        }
        out[idx(m, m)] = pmm;
        if m < lmax {
            out[idx(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * pmm;
        }
        for l in (m + 2)..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((2.0 * lf - 1.0) * (2.0 * lf + 1.0) / ((lf - mf) * (lf + mf))).sqrt();
            let b = ((2.0 * lf + 1.0) * (lf - 1.0 - mf) * (lf - 1.0 + mf)
                / ((2.0 * lf - 3.0) * (lf - mf) * (lf + mf)))
                .sqrt();
            out[idx(l, m)] = a * x * out[idx(l - 1, m)] - b * out[idx(l - 2, m)];
        }
    }
    out
}

/// Closed-form Clebsch-Gordan coefficient C^{j,m}_{j1,m1,1,m2} for the
/// couplings with j2 = 1 that appear in the covariant expansions. Only
/// j in {j1-1, j1, j1+1} is nonzero. Validated against the Racah-formula
/// route in tests.
pub fn cg_with_one(j: i64, m: i64, j1: i64, m1: i64, m2: i64) -> f64 {
    if m1 + m2 != m || m2.abs() > 1 || j < 0 || j1 < 0 {
        return 0.0;
    }
    if m1.abs() > j1 || m.abs() > j {
        return 0.0;
    }
    if j == j1 && j1 == 0 {
        // 0 x 1 -> 0 violates the triangle rule
        return 0.0;
    }
    let (jf, mf) = (j1 as f64, m as f64);
    match (j - j1, m2) {
        (1, 1) => (((jf + mf) * (jf + mf + 1.0)) / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0))).sqrt(),
        (1, 0) => (((jf - mf + 1.0) * (jf + mf + 1.0)) / ((2.0 * jf + 1.0) * (jf + 1.0))).sqrt(),
        (1, -1) => (((jf - mf) * (jf - mf + 1.0)) / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0))).sqrt(),
        (0, 1) => -(((jf + mf) * (jf - mf + 1.0)) / (2.0 * jf * (jf + 1.0))).sqrt(),
        (0, 0) => mf / (jf * (jf + 1.0)).sqrt(),
        (0, -1) => (((jf - mf) * (jf + mf + 1.0)) / (2.0 * jf * (jf + 1.0))).sqrt(),
        (-1, 1) => (((jf - mf) * (jf - mf + 1.0)) / (2.0 * jf * (2.0 * jf + 1.0))).sqrt(),
        (-1, 0) => -(((jf - mf) * (jf + mf)) / (jf * (2.0 * jf + 1.0))).sqrt(),
        (-1, -1) => (((jf + mf + 1.0) * (jf + mf)) / (2.0 * jf * (2.0 * jf + 1.0))).sqrt(),
        _ => 0.0,
    }
}

/// Scalar spherical harmonic Y_{L,m}(theta, phi), orthonormal on the
/// sphere. L = 0 is allowed here for test use.
pub fn scalar_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let p = normalized_legendre(l, m, theta.cos());
    Complex64::from_polar(1.0, m as f64 * phi) * p
}

/// The theta-independent real factors of the B table entry for one sigma:
/// c_L C^{L,m}_{L-1,m-sigma,1,sigma} P̄_{L-1}^{m-sigma}(x)
/// + d_L C^{L,m}_{L+1,m-sigma,1,sigma} P̄_{L+1}^{m-sigma}(x).
pub(crate) fn b_factor(l: usize, m: i64, sigma: i64, x: f64) -> f64 {
    let (li, lf) = (l as i64, l as f64);
    let c_l = (lf + 1.0) * (lf / (2.0 * lf + 1.0)).sqrt();
    let d_l = lf * ((lf + 1.0) / (2.0 * lf + 1.0)).sqrt();
    let mut v = 0.0;
    let cg_lo = cg_with_one(li, m, li - 1, m - sigma, sigma);
    if cg_lo != 0.0 {
        v += c_l * cg_lo * normalized_legendre(l - 1, m - sigma, x);
    }
    let cg_hi = cg_with_one(li, m, li + 1, m - sigma, sigma);
    if cg_hi != 0.0 {
        v += d_l * cg_hi * normalized_legendre(l + 1, m - sigma, x);
    }
    v
}

/// Real factor of the D table entry (the leading i is applied by callers):
/// sqrt(lambda_L) C^{L,m}_{L,m-sigma,1,sigma} P̄_L^{m-sigma}(x).
pub(crate) fn d_factor(l: usize, m: i64, sigma: i64, x: f64) -> f64 {
    let li = l as i64;
    let cg = cg_with_one(li, m, li, m - sigma, sigma);
    if cg == 0.0 {
        return 0.0;
    }
    ((l * (l + 1)) as f64).sqrt() * cg * normalized_legendre(l, m - sigma, x)
}

/// Surface gradient Grad Y_{L,m} at a point, in covariant components.
pub fn grad_y_covariant(idx: ModeIndex, theta: f64, phi: f64) -> CovariantVector {
    let x = theta.cos();
    let mut comp = [Complex64::default(); 3];
    for (slot, sigma) in [(0usize, 1i64), (1, 0), (2, -1)] {
        let f = b_factor(idx.l, idx.m, sigma, x);
        comp[slot] = Complex64::from_polar(1.0, (idx.m - sigma) as f64 * phi) * f;
    }
    CovariantVector::new(comp[0], comp[1], comp[2])
}

/// x̂ × Grad Y_{L,m} at a point, in covariant components.
pub fn curl_y_covariant(idx: ModeIndex, theta: f64, phi: f64) -> CovariantVector {
    let x = theta.cos();
    let mut comp = [Complex64::default(); 3];
    for (slot, sigma) in [(0usize, 1i64), (1, 0), (2, -1)] {
        let f = d_factor(idx.l, idx.m, sigma, x);
        comp[slot] = Complex64::i() * Complex64::from_polar(1.0, (idx.m - sigma) as f64 * phi) * f;
    }
    CovariantVector::new(comp[0], comp[1], comp[2])
}

/// Divergence-free basis field Z_{L,m} = lambda_L^{-1/2} Curl Y_{L,m}
/// = -lambda_L^{-1/2} (x̂ × Grad Y_{L,m}).
pub fn z_basis(idx: ModeIndex, theta: f64, phi: f64) -> CovariantVector {
    let scale = Complex64::new(-1.0 / idx.lambda().sqrt(), 0.0);
    curl_y_covariant(idx, theta, phi).scale(scale)
}

/// Outward unit normal in Cartesian components.
pub fn unit_normal(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

/// Cross product of two complex Cartesian 3-vectors (bilinear, no
/// conjugation).
pub fn cross(a: [Complex64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
