//! Associated Legendre functions, Gauss-Legendre rules, and Wigner 3j /
//! Clebsch-Gordan coefficients.
//!
//! All functions here are pure and convention-pure: `assoc_legendre` returns
//! the raw associated Legendre function with the Condon-Shortley phase
//! `(-1)^m` built in, and normalization is left to the harmonic layer.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Largest argument for which the log-factorial table is built.
///
/// Covers angular momenta up to j ~ 340 (the Racah sum needs (a+b+c+1)!).
/// Beyond roughly j = 100 the alternating Racah sum loses accuracy in
/// double precision and exact integer arithmetic would be required; all
/// uses in this crate stay far below that.
const LN_FACT_LEN: usize = 1024;

fn ln_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; LN_FACT_LEN];
        for n in 1..LN_FACT_LEN {
            t[n] = t[n - 1] + (n as f64).ln();
        }
        t
    })
}

/// ln(n!) from the precomputed table.
fn ln_fact(n: i64) -> f64 {
    debug_assert!(n >= 0 && (n as usize) < LN_FACT_LEN);
    ln_factorials()[n as usize]
}

/// Legendre polynomial P_n(x) by the three-term recurrence.
pub fn legendre_p(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let p_next = (((2 * k + 1) as f64) * x * p - (k as f64) * p_prev) / ((k + 1) as f64);
        p_prev = p;
        p = p_next;
    }
    p
}

/// P_n(x) together with its derivative P_n'(x).
pub fn legendre_p_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let p_next = (((2 * k + 1) as f64) * x * p - (k as f64) * p_prev) / ((k + 1) as f64);
        p_prev = p;
        p = p_next;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let dp = (n as f64) * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Associated Legendre function P_L^m(x) with the Condon-Shortley phase.
///
/// Seeded on the m-diagonal (P_m^m), then upward three-term recurrence in L.
pub fn assoc_legendre(l: usize, m: usize, x: f64) -> Result<f64> {
    if m > l {
        return Err(Error::Domain(format!("assoc_legendre: m = {m} > L = {l}")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("assoc_legendre: |x| > 1 (x = {x})")));
    }
    // P_m^m = (-1)^m (2m-1)!! (1-x^2)^(m/2)
    let sin_theta = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * sin_theta;
    }
    if l == m {
        return Ok(pmm);
    }
    // P_{m+1}^m = x (2m+1) P_m^m
    let mut p_prev = pmm;
    let mut p = x * ((2 * m + 1) as f64) * pmm;
    for ll in (m + 2)..=l {
        let (lf, mf) = (ll as f64, m as f64);
        let p_next = (x * (2.0 * lf - 1.0) * p - (lf + mf - 1.0) * p_prev) / (lf - mf);
        p_prev = p;
        p = p_next;
    }
    Ok(p)
}

/// A Gauss-Legendre quadrature rule on [-1, 1].
///
/// Nodes are strictly increasing and exactly symmetric about zero; weights
/// are positive and symmetric and sum to 2. The rule integrates polynomials
/// of degree <= 2n-1 exactly.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Build the n-point rule. Nodes are the roots of P_n found by Newton
    /// iteration from Chebyshev initial guesses (tolerance 1e-15, at most
    /// 100 iterations); weights are 2 / ((1-x^2) P_n'(x)^2).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "GaussRule order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Compute the upper half and mirror so symmetry is exact.
        for i in 0..n.div_ceil(2) {
            // i-th largest root; Chebyshev guess for the root of P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_p_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-15 {
                    let (_, d) = legendre_p_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            if n % 2 == 1 && i == n / 2 {
                x = 0.0;
                let (_, d) = legendre_p_with_derivative(n, x);
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        GaussRule {
            order: n,
            nodes,
            weights,
        }
    }

    /// Integrate a function over [-1, 1] with this rule.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn triangle_ok(j1: i64, j2: i64, j3: i64) -> bool {
    j3 >= (j1 - j2).abs() && j3 <= j1 + j2
}

/// Wigner 3j symbol by the Racah formula.
///
/// Returns 0 (not an error) when a selection rule is violated:
/// m1+m2+m3 must vanish, each |m_i| <= j_i, and (j1,j2,j3) must satisfy
/// the triangle inequality.
///
/// Factorials are accumulated as log-factorials with a compensated sum
/// over the alternating Racah series; see `LN_FACT_LEN` for the validity
/// range.
pub fn wigner_3j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    if j1 < 0 || j2 < 0 || j3 < 0 {
        return 0.0;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if m1 + m2 + m3 != 0 || !triangle_ok(j1, j2, j3) {
        return 0.0;
    }
    let (a, b, c) = (j1, j2, j3);
    let (alpha, beta, gamma) = (m1, m2, m3);

    // ln sqrt(T(abc)) + ln sqrt((a+alpha)! ... (c-gamma)!)
    let ln_triangle = ln_fact(a + b - c) + ln_fact(a - b + c) + ln_fact(-a + b + c)
        - ln_fact(a + b + c + 1);
    let ln_ms = ln_fact(a + alpha)
        + ln_fact(a - alpha)
        + ln_fact(b + beta)
        + ln_fact(b - beta)
        + ln_fact(c + gamma)
        + ln_fact(c - gamma);
    let ln_pref = 0.5 * (ln_triangle + ln_ms);

    let t_min = 0.max(b - c - alpha).max(a - c + beta);
    let t_max = (a + b - c).min(a - alpha).min(b + beta);

    // Kahan-compensated alternating sum.
    let mut sum = 0.0;
    let mut comp = 0.0;
    for t in t_min..=t_max {
        let ln_den = ln_fact(t)
            + ln_fact(c - b + t + alpha)
            + ln_fact(c - a + t - beta)
            + ln_fact(a + b - c - t)
            + ln_fact(a - t - alpha)
            + ln_fact(b - t + beta);
        let term = if t % 2 == 0 { 1.0 } else { -1.0 } * (ln_pref - ln_den).exp();
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    let phase = if (a - b - gamma).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    phase * sum
}

/// Clebsch-Gordan coefficient C^{j,m}_{j1,m1,j2,m2}, the phase-and-scale
/// transform of the 3j symbol:
/// C = (-1)^(m+j1-j2) sqrt(2j+1) (j1 j2 j; m1 m2 -m).
///
/// Returns 0 on a selection-rule violation (m1+m2 != m or a triangle
/// failure).
pub fn clebsch_gordan(j: i64, m: i64, j1: i64, m1: i64, j2: i64, m2: i64) -> f64 {
    if m1 + m2 != m || !triangle_ok(j1, j2, j) {
        return 0.0;
    }
    let phase = if (m + j1 - j2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    phase * ((2 * j + 1) as f64).sqrt() * wigner_3j(j1, j2, j, m1, m2, -m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // -- exact-rational Racah oracle (test-only) ------------------------
    //
    // Evaluates the Racah sum with i128 factorials and exact fractions,
    // returning (sign, p, q) such that the 3j value is sign * sqrt(p/q).

    fn fact_i128(n: i64) -> i128 {
        (1..=n as i128).product::<i128>().max(1)
    }

    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    fn racah_exact_square(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> (f64, i128, i128) {
        let (a, b, c) = (j1, j2, j3);
        let (al, be, ga) = (m1, m2, m3);
        let t_min = 0.max(b - c - al).max(a - c + be);
        let t_max = (a + b - c).min(a - al).min(b + be);
        // sum over t as an exact fraction
        let (mut num, mut den): (i128, i128) = (0, 1);
        for t in t_min..=t_max {
            let d = fact_i128(t)
                * fact_i128(c - b + t + al)
                * fact_i128(c - a + t - be)
                * fact_i128(a + b - c - t)
                * fact_i128(a - t - al)
                * fact_i128(b - t + be);
            let s: i128 = if t % 2 == 0 { 1 } else { -1 };
            num = num * d + s * den;
            den *= d;
            let g = gcd(num, den);
            if g > 1 {
                num /= g;
                den /= g;
            }
        }
        let tri_num = fact_i128(a + b - c) * fact_i128(a - b + c) * fact_i128(-a + b + c);
        let tri_den = fact_i128(a + b + c + 1);
        let ms = fact_i128(a + al)
            * fact_i128(a - al)
            * fact_i128(b + be)
            * fact_i128(b - be)
            * fact_i128(c + ga)
            * fact_i128(c - ga);
        // value^2 = T * ms * (num/den)^2 ; sign = phase * sign(num)
        let mut p = tri_num * ms * num * num;
        let mut q = tri_den * den * den;
        let g = gcd(p, q);
        p /= g;
        q /= g;
        let mut sign = if num >= 0 { 1.0 } else { -1.0 };
        if (a - b - ga).rem_euclid(2) == 1 {
            sign = -sign;
        }
        (sign, p, q)
    }

    #[test]
    fn assoc_legendre_base_cases() {
        assert_relative_eq!(assoc_legendre(0, 0, 0.3).unwrap(), 1.0);
        assert_relative_eq!(assoc_legendre(1, 0, 0.5).unwrap(), 0.5);
        // P_1^1(x) = -sqrt(1-x^2) by the m-diagonal seed
        assert_relative_eq!(assoc_legendre(1, 1, 0.0).unwrap(), -1.0);
    }

    #[test]
    fn assoc_legendre_domain_errors() {
        assert!(assoc_legendre(1, 2, 0.0).is_err());
        assert!(assoc_legendre(3, 0, 1.5).is_err());
    }

    #[test]
    fn assoc_legendre_against_closed_forms() {
        // P_2^1(x) = -3 x sqrt(1-x^2), P_3^2(x) = 15 x (1-x^2)
        for &x in &[-0.9f64, -0.3, 0.0, 0.4, 0.8] {
            let s = (1.0 - x * x).sqrt();
            assert_relative_eq!(
                assoc_legendre(2, 1, x).unwrap(),
                -3.0 * x * s,
                epsilon = 1e-14
            );
            assert_relative_eq!(
                assoc_legendre(3, 2, x).unwrap(),
                15.0 * x * (1.0 - x * x),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn gauss_rule_small_orders() {
        let r1 = GaussRule::new(1);
        assert_relative_eq!(r1.nodes[0], 0.0);
        assert_relative_eq!(r1.weights[0], 2.0);

        let r2 = GaussRule::new(2);
        let inv_sqrt3 = 1.0 / 3.0_f64.sqrt();
        assert_relative_eq!(r2.nodes[0], -inv_sqrt3, epsilon = 1e-15);
        assert_relative_eq!(r2.nodes[1], inv_sqrt3, epsilon = 1e-15);
        assert_relative_eq!(r2.weights[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(r2.weights[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gauss_rule_order_eight() {
        let r = GaussRule::new(8);
        let total: f64 = r.weights.iter().sum();
        assert_relative_eq!(total, 2.0, epsilon = 1e-14);
        assert_relative_eq!(r.integrate(|x| x.powi(4)), 0.4, epsilon = 1e-14);
    }

    #[test]
    fn gauss_rule_invariants_up_to_64() {
        for n in 1..=64usize {
            let r = GaussRule::new(n);
            // strictly increasing, symmetric nodes; symmetric positive weights
            for i in 0..n {
                assert!(r.weights[i] > 0.0);
                assert_relative_eq!(r.nodes[i], -r.nodes[n - 1 - i]);
                assert_relative_eq!(r.weights[i], r.weights[n - 1 - i]);
                if i > 0 {
                    assert!(r.nodes[i] > r.nodes[i - 1]);
                }
            }
            assert_relative_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            // exactness for every monomial x^k, k <= 2n-1
            for k in 0..2 * n {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(k as i32));
                if exact == 0.0 {
                    assert!(got.abs() < 1e-12);
                } else {
                    assert_relative_eq!(got, exact, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn legendre_quadrature_orthogonality() {
        // sum_p w_p P_L^m(x_p) P_{L'}^m(x_p) = 2 (L+m)! / ((2L+1)(L-m)!) delta
        let n = 12;
        let r = GaussRule::new(n);
        for m in 0..=3usize {
            for l in m..n {
                for lp in m..n {
                    let s: f64 = r
                        .nodes
                        .iter()
                        .zip(&r.weights)
                        .map(|(&x, &w)| {
                            w * assoc_legendre(l, m, x).unwrap() * assoc_legendre(lp, m, x).unwrap()
                        })
                        .sum();
                    let expect = if l == lp {
                        let mut ratio = 1.0;
                        for k in (l - m + 1)..=(l + m) {
                            ratio *= k as f64;
                        }
                        2.0 * ratio / (2.0 * l as f64 + 1.0)
                    } else {
                        0.0
                    };
                    if l == lp {
                        assert_relative_eq!(s, expect, max_relative = 1e-10);
                    } else {
                        assert!(s.abs() < 1e-10 * 10.0_f64.powi(2 * m as i32));
                    }
                }
            }
        }
    }

    #[test]
    fn wigner_3j_selection_rules() {
        assert_eq!(wigner_3j(1, 1, 3, 0, 0, 0), 0.0);
        assert_eq!(wigner_3j(1, 1, 2, 1, 0, 0), 0.0); // m-sum violated
        assert_relative_eq!(wigner_3j(0, 0, 0, 0, 0, 0), 1.0);
    }

    #[test]
    fn wigner_3j_against_exact_racah_oracle() {
        // Frozen from the exact-rational oracle: (1 1 2; 1 -1 0) = 1/sqrt(30)
        let v = wigner_3j(1, 1, 2, 1, -1, 0);
        assert_relative_eq!(v, 1.0 / 30.0_f64.sqrt(), epsilon = 1e-15);

        // and a sweep of small tuples against the oracle
        for j1 in 0..=4i64 {
            for j2 in 0..=4i64 {
                for j3 in (j1 - j2).abs()..=(j1 + j2).min(4) {
                    for m1 in -j1..=j1 {
                        for m2 in -j2..=j2 {
                            let m3 = -m1 - m2;
                            if m3.abs() > j3 {
                                continue;
                            }
                            let v = wigner_3j(j1, j2, j3, m1, m2, m3);
                            let (sign, p, q) = racah_exact_square(j1, j2, j3, m1, m2, m3);
                            let expect = sign * ((p as f64) / (q as f64)).sqrt();
                            assert_relative_eq!(v, expect, epsilon = 1e-13, max_relative = 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn racah_term_count() {
        // the sum runs over 1 + min{a +- alpha, b +- beta, c +- gamma,
        // a+b-c, b+c-a, c+a-b} integers
        for a in 0..=8i64 {
            for b in 0..=8i64 {
                for c in (a - b).abs()..=(a + b) {
                    for al in -a..=a {
                        for be in -b..=b {
                            let ga = -al - be;
                            if ga.abs() > c {
                                continue;
                            }
                            let t_min = 0.max(b - c - al).max(a - c + be);
                            let t_max = (a + b - c).min(a - al).min(b + be);
                            let count = t_max - t_min + 1;
                            let claim = 1 + (a + al)
                                .min(a - al)
                                .min(b + be)
                                .min(b - be)
                                .min(c + ga)
                                .min(c - ga)
                                .min(a + b - c)
                                .min(b + c - a)
                                .min(c + a - b);
                            assert_eq!(count, claim, "term count at ({a} {b} {c}; {al} {be} {ga})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn clebsch_gordan_values() {
        // selection rule: m1+m2 != m
        assert_eq!(clebsch_gordan(2, 1, 1, 1, 1, 1), 0.0);
        // scalar coupling identity
        assert_relative_eq!(clebsch_gordan(3, 2, 3, 2, 0, 0), 1.0, epsilon = 1e-14);
        // frozen from the exact oracle: C^{1,1}_{1,1,1,0} = 1/sqrt(2)
        assert_relative_eq!(
            clebsch_gordan(1, 1, 1, 1, 1, 0),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn clebsch_gordan_orthogonality() {
        // sum_{m1,m2} C^{j,m} C^{j',m'} = delta_{jj'} delta_{mm'} for all
        // j1, j2 <= 10. For fixed (m1, m2) only m = m1 + m2 contributes,
        // so the Gram sum is accumulated per (m1, m2) column over the
        // coupled j values.
        for j1 in 0..=10i64 {
            for j2 in 0..=10i64 {
                let j_lo = (j1 - j2).abs();
                let j_hi = j1 + j2;
                // m != m' vanishes termwise (each factor needs m1+m2 = m),
                // so the content is the m = m' Gram matrix over (j, j')
                for j in j_lo..=j_hi {
                    for jp in j_lo..=j_hi {
                        for m in -j..=j {
                            if m.abs() > jp {
                                continue;
                            }
                            let mut s = 0.0;
                            for m1 in (-j1).max(m - j2)..=j1.min(m + j2) {
                                let m2 = m - m1;
                                s += clebsch_gordan(j, m, j1, m1, j2, m2)
                                    * clebsch_gordan(jp, m, j1, m1, j2, m2);
                            }
                            let expect = if j == jp { 1.0 } else { 0.0 };
                            assert!(
                                (s - expect).abs() < 1e-10,
                                "CG orthogonality failed at j1={j1} j2={j2} j={j} jp={jp} m={m}: {s}"
                            );
                        }
                    }
                }
            }
        }
    }

    proptest! {
        // cyclic column permutation leaves the 3j value unchanged;
        // flipping all m signs multiplies it by (-1)^(j1+j2+j3)
        #[test]
        fn wigner_3j_symmetries(j1 in 0i64..=20, j2 in 0i64..=20, dj in 0i64..=40, s1 in 0i64..=40, s2 in 0i64..=40) {
            let j3 = (j1 - j2).abs() + (dj % (2 * j2.min(j1) + 1));
            let m1 = (s1 % (2 * j1 + 1)) - j1;
            let m2 = (s2 % (2 * j2 + 1)) - j2;
            let m3 = -m1 - m2;
            prop_assume!(m3.abs() <= j3);
            let v = wigner_3j(j1, j2, j3, m1, m2, m3);
            let cyc = wigner_3j(j2, j3, j1, m2, m3, m1);
            let cyc2 = wigner_3j(j3, j1, j2, m3, m1, m2);
            let flip = wigner_3j(j1, j2, j3, -m1, -m2, -m3);
            let sgn = if (j1 + j2 + j3) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((v - cyc).abs() < 1e-11, "cyclic: {v} vs {cyc}");
            prop_assert!((v - cyc2).abs() < 1e-11, "cyclic2: {v} vs {cyc2}");
            prop_assert!((v - sgn * flip).abs() < 1e-11, "m-flip: {v} vs {flip}");
        }
    }
}
