//! Adaptive variable-order (1-5), variable-step NDF integrator for the
//! stiff spectral ODE system, with modified-Newton solves that use the
//! diagonal linear part as the iteration matrix.
//!
//! The NDF formula of order p with parameter kappa_p reads
//!   sum_{m=1}^p (1/m) nabla^m y_{n+1}
//!     = h F(t_{n+1}, y_{n+1}) + kappa_p gamma_p nabla^{p+1} y_{n+1},
//! gamma_p = sum_{j=1}^p 1/j, and kappa_p = 0 recovers BDFp. The state is
//! kept as a backward-difference table; a step solves
//!   alpha_p d + sum_{j=1}^p gamma_j nabla^j y_n = h F,
//! alpha_p = (1 - kappa_p) gamma_p, d = y_{n+1} - y_predict, and the local
//! error estimate is (kappa_p gamma_p + 1/(p+1)) d.

use crate::error::{Error, Result};
use crate::Complex;

pub const MAX_ORDER: usize = 5;
const NEWTON_MAXITER: usize = 4;
const SAFETY: f64 = 0.8;
/// Per-step growth clamp for the accepted-step controller.
const MIN_GROWTH: f64 = 0.5;
const MAX_GROWTH: f64 = 2.0;

/// The NDF kappa parameters for orders 1..5; kappa_5 = 0 (NDF5 = BDF5).
pub const KAPPA: [f64; 5] = [-0.1850, -1.0 / 9.0, -0.0823, -0.0415, 0.0];

/// Tabulated constants of the order-p NDF formula.
#[derive(Debug, Clone, Copy)]
pub struct NdfCoefficients {
    pub order: usize,
    pub kappa: f64,
    /// gamma_p = sum_{j=1}^p 1/j
    pub gamma: f64,
    /// leading coefficient alpha_p = (1 - kappa_p) gamma_p
    pub leading: f64,
    /// local error constant kappa_p gamma_p + 1/(p+1)
    pub error_const: f64,
}

/// Coefficients for NDFp, 1 <= p <= 5.
pub fn ndf_coefficients(p: usize) -> Result<NdfCoefficients> {
    if !(1..=MAX_ORDER).contains(&p) {
        return Err(Error::Domain(format!("NDF order {p} outside 1..=5")));
    }
    let kappa = KAPPA[p - 1];
    let gamma = gamma_p(p);
    Ok(NdfCoefficients {
        order: p,
        kappa,
        gamma,
        leading: (1.0 - kappa) * gamma,
        error_const: kappa * gamma + 1.0 / (p as f64 + 1.0),
    })
}

fn gamma_p(p: usize) -> f64 {
    (1..=p).map(|j| 1.0 / j as f64).sum()
}

/// Relative/absolute tolerance pair for the weighted error norm.
#[derive(Debug, Clone, Copy)]
pub struct ToleranceSpec {
    pub rtol: f64,
    pub atol: f64,
}

impl ToleranceSpec {
    pub fn new(rtol: f64, atol: f64) -> Self {
        assert!(rtol > 0.0 && atol > 0.0, "tolerances must be positive");
        ToleranceSpec { rtol, atol }
    }
}

/// The ODE system driven by the stepper. State vectors are complex; real
/// problems embed with zero imaginary parts.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    /// F(t, y) into `out`.
    fn rhs(&mut self, t: f64, y: &[Complex], out: &mut [Complex]);
    /// Diagonal of the stiff linear part of the Jacobian, used as the
    /// modified-Newton iteration matrix (I - c J).
    fn linear_diag(&self, out: &mut [Complex]);
}

/// Counters reported with every integration.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected_error: usize,
    pub rejected_newton: usize,
    pub newton_iterations: usize,
    pub rhs_evaluations: usize,
}

/// Weighted RMS over real degrees of freedom with per-component weight
/// 1 / (atol + rtol |y|).
fn error_norm(v: &[Complex], scale: &[f64]) -> f64 {
    let n = v.len();
    let sum: f64 = v
        .iter()
        .zip(scale)
        .map(|(x, s)| (x.re * x.re + x.im * x.im) / (s * s))
        .sum();
    (sum / (2.0 * n as f64)).sqrt()
}

/// Step-size factor of the accepted-step controller:
/// (safety / err)^(1/(p+1)), unclamped.
pub(crate) fn step_factor(err: f64, order: usize) -> f64 {
    if err <= f64::MIN_POSITIVE {
        f64::INFINITY
    } else {
        (SAFETY / err).powf(1.0 / (order as f64 + 1.0))
    }
}

fn compute_r(order: usize, factor: f64) -> Vec<Vec<f64>> {
    let mut r = vec![vec![1.0; order + 1]; order + 1];
    for i in 1..=order {
        for j in 0..=order {
            r[i][j] = r[i - 1][j] * ((i as f64 - 1.0) - factor * j as f64) / i as f64;
        }
    }
    r
}

/// Rebase the difference table to a step scaled by `factor` (exact
/// polynomial rescaling).
fn rescale_history(d: &mut [Vec<Complex>], order: usize, factor: f64) {
    let r = compute_r(order, factor);
    let u = compute_r(order, 1.0);
    let k = order + 1;
    let mut ru = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            for t in 0..k {
                ru[i][j] += r[i][t] * u[t][j];
            }
        }
    }
    let old: Vec<Vec<Complex>> = d[..k].to_vec();
    for (i, row) in d.iter_mut().take(k).enumerate() {
        for x in row.iter_mut() {
            *x = Complex::default();
        }
        for (j, old_row) in old.iter().enumerate() {
            let w = ru[j][i];
            if w != 0.0 {
                for (dst, src) in row.iter_mut().zip(old_row) {
                    *dst += src * w;
                }
            }
        }
    }
}

/// NDF history: the backward-difference table, current order and step,
/// and step statistics.
pub struct StepperState {
    t: f64,
    h: f64,
    order: usize,
    /// rows 0..=MAX_ORDER+2: nabla^j y at the current point
    diff: Vec<Vec<Complex>>,
    /// steps since the last change of order or step
    n_equal: usize,
    /// diagonal of the linear Jacobian part (the Newton cache)
    lin_diag: Vec<Complex>,
    /// F at the current point (for Hermite dense output)
    f_cur: Vec<Complex>,
    pub stats: StepStats,
}

/// Outcome of one `take_step` call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    RejectedError,
    RejectedNewton,
}

impl StepperState {
    /// Fresh order-1 state at (t0, y0) with initial step h0.
    pub fn new<S: OdeSystem>(sys: &mut S, t0: f64, y0: &[Complex], h0: f64) -> Self {
        let n = sys.dim();
        assert_eq!(y0.len(), n);
        let mut f0 = vec![Complex::default(); n];
        sys.rhs(t0, y0, &mut f0);
        let mut diff = vec![vec![Complex::default(); n]; MAX_ORDER + 3];
        diff[0].copy_from_slice(y0);
        for (d, f) in diff[1].iter_mut().zip(&f0) {
            *d = f * h0;
        }
        let mut lin_diag = vec![Complex::default(); n];
        sys.linear_diag(&mut lin_diag);
        StepperState {
            t: t0,
            h: h0,
            order: 1,
            diff,
            n_equal: 0,
            lin_diag,
            f_cur: f0,
            stats: StepStats {
                rhs_evaluations: 1,
                ..Default::default()
            },
        }
    }

    /// Fixed-order state seeded from order+1 known solution values at
    /// uniform spacing h: y(t0), y(t0+h), ..., y(t0 + order*h). The state
    /// is positioned at the last seed.
    pub fn from_history<S: OdeSystem>(
        sys: &mut S,
        t0: f64,
        h: f64,
        order: usize,
        seeds: &[Vec<Complex>],
    ) -> Self {
        assert!((1..=MAX_ORDER).contains(&order));
        assert_eq!(seeds.len(), order + 1, "need order+1 seed values");
        let n = sys.dim();
        let mut diff = vec![vec![Complex::default(); n]; MAX_ORDER + 3];
        // iterated backward differences ending at the last seed
        let mut work: Vec<Vec<Complex>> = seeds.to_vec();
        diff[0].copy_from_slice(&work[order]);
        for j in 1..=order {
            for i in (j..=order).rev() {
                let (lo, hi) = work.split_at_mut(i);
                for (a, b) in hi[0].iter_mut().zip(&lo[i - 1]) {
                    *a -= b;
                }
            }
            diff[j].copy_from_slice(&work[order]);
        }
        let mut lin_diag = vec![Complex::default(); n];
        sys.linear_diag(&mut lin_diag);
        let t = t0 + order as f64 * h;
        let mut f_cur = vec![Complex::default(); n];
        sys.rhs(t, &work[order], &mut f_cur);
        StepperState {
            t,
            h,
            order,
            diff,
            n_equal: order,
            lin_diag,
            f_cur,
            stats: StepStats {
                rhs_evaluations: 1,
                ..Default::default()
            },
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn current(&self) -> &[Complex] {
        &self.diff[0]
    }

    pub fn current_rhs(&self) -> &[Complex] {
        &self.f_cur
    }

    fn scale_step(&mut self, factor: f64) {
        rescale_history(&mut self.diff, self.order, factor);
        self.h *= factor;
        self.n_equal = 0;
    }

    /// Force the next step size (used to land on the horizon exactly).
    pub fn clip_step(&mut self, h_new: f64) {
        if (h_new - self.h).abs() > 1e-15 * self.h {
            let factor = h_new / self.h;
            self.scale_step(factor);
        }
    }

    /// Attempt one NDF step. On acceptance the state advances and the
    /// order/step controller runs; on rejection the step size is reduced
    /// and the state stays at the current point.
    pub fn take_step<S: OdeSystem>(
        &mut self,
        sys: &mut S,
        tol: &ToleranceSpec,
        adaptive: bool,
    ) -> Result<StepOutcome> {
        let n = self.diff[0].len();
        let p = self.order;
        let coef = ndf_coefficients(p).expect("order in range");
        let t_new = self.t + self.h;
        let c = self.h / coef.leading;

        // predictor: sum of differences; psi = (1/alpha) sum gamma_j D[j]
        let mut y_predict = vec![Complex::default(); n];
        for row in self.diff.iter().take(p + 1) {
            for (yp, d) in y_predict.iter_mut().zip(row) {
                *yp += d;
            }
        }
        let mut psi = vec![Complex::default(); n];
        for j in 1..=p {
            let g = gamma_p(j) / coef.leading;
            for (ps, d) in psi.iter_mut().zip(&self.diff[j]) {
                *ps += d * g;
            }
        }
        let scale: Vec<f64> = y_predict
            .iter()
            .map(|y| tol.atol + tol.rtol * y.norm())
            .collect();

        // modified Newton with the cached diagonal iteration matrix
        let newton_tol = (10.0 * f64::EPSILON / tol.rtol).max((tol.rtol.sqrt()).min(0.03));
        let mut d = vec![Complex::default(); n];
        let mut y = y_predict.clone();
        let mut f = vec![Complex::default(); n];
        let mut dy = vec![Complex::default(); n];
        let mut converged = false;
        let mut dy_norm_old: Option<f64> = None;
        for k in 0..NEWTON_MAXITER {
            sys.rhs(t_new, &y, &mut f);
            self.stats.rhs_evaluations += 1;
            self.stats.newton_iterations += 1;
            let mut finite = true;
            for i in 0..n {
                let denom = Complex::new(1.0, 0.0) - self.lin_diag[i] * c;
                dy[i] = (f[i] * c - psi[i] - d[i]) / denom;
                if !dy[i].re.is_finite() || !dy[i].im.is_finite() {
                    finite = false;
                    break;
                }
            }
            if !finite {
                break;
            }
            let dy_norm = error_norm(&dy, &scale);
            let rate = dy_norm_old.map(|old| dy_norm / old);
            if let Some(r) = rate {
                if r >= 1.0
                    || r.powi((NEWTON_MAXITER - k) as i32) / (1.0 - r) * dy_norm > newton_tol
                {
                    break;
                }
            }
            for i in 0..n {
                d[i] += dy[i];
                y[i] = y_predict[i] + d[i];
            }
            if dy_norm == 0.0
                || rate.map(|r| r / (1.0 - r) * dy_norm < newton_tol).unwrap_or(false)
            {
                converged = true;
                break;
            }
            dy_norm_old = Some(dy_norm);
        }

        if !converged {
            self.stats.rejected_newton += 1;
            self.scale_step(0.5);
            return Ok(StepOutcome::RejectedNewton);
        }

        let scale_new: Vec<f64> = y.iter().map(|v| tol.atol + tol.rtol * v.norm()).collect();
        let err: Vec<Complex> = d.iter().map(|v| v * coef.error_const).collect();
        let err_norm = error_norm(&err, &scale_new);
        if adaptive && err_norm > 1.0 {
            self.stats.rejected_error += 1;
            let factor = step_factor(err_norm, p).clamp(0.1, 0.9);
            self.scale_step(factor);
            return Ok(StepOutcome::RejectedError);
        }

        // implied F at the accepted point: h F = alpha d + sum gamma_j D[j]
        for i in 0..n {
            self.f_cur[i] = (d[i] + psi[i]) * coef.leading / self.h;
        }

        // difference-table update
        for i in 0..n {
            let old_dp1 = self.diff[p + 1][i];
            self.diff[p + 2][i] = d[i] - old_dp1;
            self.diff[p + 1][i] = d[i];
        }
        for j in (0..=p).rev() {
            let (lo, hi) = self.diff.split_at_mut(j + 1);
            for (a, b) in lo[j].iter_mut().zip(&hi[0]) {
                *a += b;
            }
        }
        self.t = t_new;
        self.n_equal += 1;
        self.stats.accepted += 1;

        if adaptive {
            self.select_order_and_step(&scale_new, err_norm);
        }
        Ok(StepOutcome::Accepted)
    }

    /// Order/step controller. Candidate orders {p-1, p, p+1} are scored by
    /// the step factor their error estimates allow; the winner sets the
    /// order and h' = h (safety/err)^(1/(p'+1)) clamped to [h/2, 2h].
    /// Order changes are considered only once the history holds p+1 steps
    /// at the current (order, step).
    fn select_order_and_step(&mut self, scale: &[f64], err_current: f64) {
        let p = self.order;
        if self.n_equal < p + 1 {
            return;
        }
        let mut best_order = p;
        let mut best_factor = step_factor(err_current, p);
        if p > 1 {
            let coef = ndf_coefficients(p - 1).unwrap();
            let err: Vec<Complex> = self.diff[p]
                .iter()
                .map(|v| v * coef.error_const)
                .collect();
            let f = step_factor(error_norm(&err, scale), p - 1);
            if f > best_factor {
                best_factor = f;
                best_order = p - 1;
            }
        }
        if p < MAX_ORDER {
            let coef = ndf_coefficients(p + 1).unwrap();
            let err: Vec<Complex> = self.diff[p + 2]
                .iter()
                .map(|v| v * coef.error_const)
                .collect();
            let f = step_factor(error_norm(&err, scale), p + 1);
            if f > best_factor {
                best_factor = f;
                best_order = p + 1;
            }
        }
        self.order = best_order;
        let factor = best_factor.clamp(MIN_GROWTH, MAX_GROWTH);
        if best_order != p || (factor - 1.0).abs() > f64::EPSILON {
            rescale_history(&mut self.diff, self.order, factor);
            self.h *= factor;
            self.n_equal = 0;
        }
    }
}

/// Events delivered to the observer callback.
pub enum Event<'a> {
    /// an accepted step landed at t with state y
    Step { t: f64, y: &'a [Complex] },
    /// a scheduled output time, state by cubic Hermite dense output
    Output { t: f64, y: &'a [Complex] },
}

/// Result of an adaptive integration.
pub struct IntegrationOutcome {
    pub t: f64,
    pub y: Vec<Complex>,
    pub stats: StepStats,
}

/// Integrate from t_span.0 to t_span.1 starting at order 1 with
/// h0 = min(1e-3, horizon/100). The observer fires after every accepted
/// step and, via cubic Hermite dense output from (y, F) at the step
/// endpoints, at every requested output time.
pub fn integrate<S: OdeSystem>(
    sys: &mut S,
    y0: &[Complex],
    t_span: (f64, f64),
    tol: &ToleranceSpec,
    output_times: &[f64],
    mut observer: impl FnMut(Event),
) -> Result<IntegrationOutcome> {
    let (t0, t_end) = t_span;
    if t_end <= t0 {
        return Err(Error::Domain("t_end must exceed t_start".into()));
    }
    let horizon = t_end - t0;
    let h_min = 1e-12 * horizon;
    let h0 = (1e-3f64).min(horizon / 100.0);
    let mut schedule: Vec<f64> = output_times.to_vec();
    schedule.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut next_out = 0usize;
    while next_out < schedule.len() && schedule[next_out] <= t0 {
        observer(Event::Output { t: schedule[next_out], y: y0 });
        next_out += 1;
    }

    let mut state = StepperState::new(sys, t0, y0, h0);
    let mut t_prev = t0;
    let mut y_prev = y0.to_vec();
    let mut f_prev = state.current_rhs().to_vec();

    while state.t() < t_end - 1e-12 * horizon {
        if state.h() < h_min {
            return Err(Error::Integration(format!(
                "step size underflow at t = {:.6e} (h = {:.3e}; {} accepted, {} error rejections, {} Newton rejections)",
                state.t(),
                state.h(),
                state.stats.accepted,
                state.stats.rejected_error,
                state.stats.rejected_newton
            )));
        }
        if state.t() + state.h() > t_end {
            state.clip_step(t_end - state.t());
        }
        match state.take_step(sys, tol, true)? {
            StepOutcome::Accepted => {
                let t_new = state.t();
                let h = t_new - t_prev;
                // scheduled outputs inside (t_prev, t_new]
                while next_out < schedule.len() && schedule[next_out] <= t_new + 1e-14 * horizon {
                    let tau = schedule[next_out];
                    let s = ((tau - t_prev) / h).clamp(0.0, 1.0);
                    let (h00, h10, h01, h11) = hermite_basis(s);
                    let y_out: Vec<Complex> = (0..y_prev.len())
                        .map(|i| {
                            y_prev[i] * h00
                                + f_prev[i] * (h10 * h)
                                + state.current()[i] * h01
                                + state.current_rhs()[i] * (h11 * h)
                        })
                        .collect();
                    observer(Event::Output { t: tau, y: &y_out });
                    next_out += 1;
                }
                observer(Event::Step {
                    t: t_new,
                    y: state.current(),
                });
                t_prev = t_new;
                y_prev.copy_from_slice(state.current());
                f_prev.copy_from_slice(state.current_rhs());
            }
            StepOutcome::RejectedError | StepOutcome::RejectedNewton => {}
        }
    }
    // rounding in the final clipped step must not drop a scheduled output
    // sitting exactly on the horizon
    while next_out < schedule.len() && schedule[next_out] <= t_end + 1e-12 * horizon {
        observer(Event::Output {
            t: schedule[next_out],
            y: state.current(),
        });
        next_out += 1;
    }
    Ok(IntegrationOutcome {
        t: state.t(),
        y: state.current().to_vec(),
        stats: state.stats,
    })
}

fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}

/// Fixed-order, fixed-step NDF driver. `seeds` holds order+1 solution
/// values at t0, t0+h, ..., t0+order*h; the return value is the state
/// after `n_steps` further steps of size h.
pub fn integrate_fixed_order<S: OdeSystem>(
    sys: &mut S,
    order: usize,
    h: f64,
    t0: f64,
    seeds: &[Vec<Complex>],
    n_steps: usize,
) -> Result<Vec<Complex>> {
    let tight = ToleranceSpec::new(1e-12, 1e-14);
    let mut state = StepperState::from_history(sys, t0, h, order, seeds);
    for _ in 0..n_steps {
        match state.take_step(sys, &tight, false)? {
            StepOutcome::Accepted => {}
            _ => {
                return Err(Error::Integration(
                    "Newton failed to converge in fixed-step mode".into(),
                ))
            }
        }
    }
    Ok(state.current().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// y' = lambda y with diagonal (possibly complex) lambda.
    struct DiagonalSystem {
        lambda: Vec<Complex>,
    }

    impl OdeSystem for DiagonalSystem {
        fn dim(&self) -> usize {
            self.lambda.len()
        }
        fn rhs(&mut self, _t: f64, y: &[Complex], out: &mut [Complex]) {
            for i in 0..y.len() {
                out[i] = self.lambda[i] * y[i];
            }
        }
        fn linear_diag(&self, out: &mut [Complex]) {
            out.copy_from_slice(&self.lambda);
        }
    }

    struct ZeroSystem {
        n: usize,
    }

    impl OdeSystem for ZeroSystem {
        fn dim(&self) -> usize {
            self.n
        }
        fn rhs(&mut self, _t: f64, _y: &[Complex], out: &mut [Complex]) {
            out.fill(Complex::default());
        }
        fn linear_diag(&self, out: &mut [Complex]) {
            out.fill(Complex::default());
        }
    }

    #[test]
    fn kappa_table_is_pinned() {
        let expected = [-0.1850, -1.0 / 9.0, -0.0823, -0.0415, 0.0];
        for p in 1..=5 {
            let c = ndf_coefficients(p).unwrap();
            assert_eq!(c.kappa, expected[p - 1]);
        }
        assert!(ndf_coefficients(0).is_err());
        assert!(ndf_coefficients(6).is_err());
    }

    #[test]
    fn error_constants() {
        assert_relative_eq!(ndf_coefficients(1).unwrap().error_const, 0.315);
        assert_relative_eq!(
            ndf_coefficients(2).unwrap().error_const,
            1.0 / 6.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            ndf_coefficients(5).unwrap().error_const,
            1.0 / 6.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn step_factor_examples() {
        // err = 0 => unbounded growth, clamped to 2h by the controller
        assert!(step_factor(0.0, 3).is_infinite());
        // err = 1 at order p => 0.8^(1/(p+1))
        for p in 1..=5 {
            assert_relative_eq!(
                step_factor(1.0, p),
                0.8f64.powf(1.0 / (p as f64 + 1.0)),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn zero_rhs_leaves_state_unchanged() {
        let mut sys = ZeroSystem { n: 3 };
        let y0 = vec![Complex::new(1.0, -2.0); 3];
        let tol = ToleranceSpec::new(1e-6, 1e-9);
        let mut state = StepperState::new(&mut sys, 0.0, &y0, 0.125);
        for _ in 0..10 {
            assert_eq!(
                state.take_step(&mut sys, &tol, true).unwrap(),
                StepOutcome::Accepted
            );
            for (a, b) in state.current().iter().zip(&y0) {
                assert_eq!(a, b);
            }
        }
        // step doubles every accepted step once history allows
        assert!(state.h() > 0.125);
    }

    fn exact_decay_seeds(lambda: f64, t0: f64, h: f64, order: usize) -> Vec<Vec<Complex>> {
        (0..=order)
            .map(|k| vec![Complex::new((lambda * (t0 + k as f64 * h)).exp(), 0.0)])
            .collect()
    }

    #[test]
    fn fixed_step_orders_converge_at_rate_p() {
        // y' = -y, global error at t = 1 over h in {1e-1, 5e-2, 2.5e-2};
        // observed order from the finest consecutive pair
        for p in 1..=5usize {
            let mut errs = Vec::new();
            for &h in &[1e-1, 5e-2, 2.5e-2] {
                let mut sys = DiagonalSystem {
                    lambda: vec![Complex::new(-1.0, 0.0)],
                };
                let seeds = exact_decay_seeds(-1.0, 0.0, h, p);
                let t_start = p as f64 * h;
                let n_steps = ((1.0 - t_start) / h).round() as usize;
                let y = integrate_fixed_order(&mut sys, p, h, 0.0, &seeds, n_steps).unwrap();
                let t_final = t_start + n_steps as f64 * h;
                errs.push((y[0].re - (-t_final).exp()).abs());
            }
            assert!(errs[0] > errs[1] && errs[1] > errs[2], "NDF{p}: {errs:?}");
            let slope = (errs[1] / errs[2]).ln() / 2.0f64.ln();
            assert!(
                (slope - p as f64).abs() <= 0.2,
                "NDF{p}: errors {errs:?}, observed order {slope}"
            );
        }
    }

    #[test]
    fn a_stability_smoke_for_low_orders() {
        // h lambda = -1e6: NDF1 and NDF2 must not grow from any bounded
        // history
        for p in 1..=2usize {
            let mut sys = DiagonalSystem {
                lambda: vec![Complex::new(-1e6, 0.0)],
            };
            let seeds: Vec<Vec<Complex>> = (0..=p).map(|_| vec![Complex::new(1.0, 0.0)]).collect();
            let mut state = StepperState::from_history(&mut sys, 0.0, 1.0, p, &seeds);
            let tol = ToleranceSpec::new(1e-6, 1e-9);
            let mut prev = 1.0f64;
            for _ in 0..20 {
                assert_eq!(
                    state.take_step(&mut sys, &tol, false).unwrap(),
                    StepOutcome::Accepted
                );
                let mag = state.current()[0].norm();
                assert!(mag <= prev * (1.0 + 1e-12), "|y| grew: {prev} -> {mag}");
                prev = mag;
            }
        }
    }

    #[test]
    fn stiff_diagonal_adaptive_meets_tolerance() {
        let mut sys = DiagonalSystem {
            lambda: vec![Complex::new(-1.0, 0.0), Complex::new(-1e4, 0.0)],
        };
        let y0 = vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)];
        let tol = ToleranceSpec::new(1e-6, 1e-10);
        let out = integrate(&mut sys, &y0, (0.0, 1.0), &tol, &[], |_| {}).unwrap();
        let exact0 = (-1.0f64).exp();
        let exact1 = (-1e4f64).exp();
        assert!(
            (out.y[0].re - exact0).abs() <= 1e-5 * exact0.abs() + 1e-8,
            "slow component error {}",
            (out.y[0].re - exact0).abs()
        );
        assert!((out.y[1].re - exact1).abs() <= 1e-8);
        assert!(
            out.stats.accepted <= 500,
            "took {} steps",
            out.stats.accepted
        );
    }

    #[test]
    fn order_climbs_on_smooth_problem() {
        let mut sys = DiagonalSystem {
            lambda: vec![Complex::new(-1.0, 0.0)],
        };
        let y0 = vec![Complex::new(1.0, 0.0)];
        let tol = ToleranceSpec::new(1e-8, 1e-12);
        let mut state = StepperState::new(&mut sys, 0.0, &y0, 1e-3);
        let mut max_order = 1;
        let mut steps = 0;
        while steps < 20 {
            if state.take_step(&mut sys, &tol, true).unwrap() == StepOutcome::Accepted {
                steps += 1;
                max_order = max_order.max(state.order());
            }
        }
        assert!(max_order >= 3, "order only reached {max_order} in 20 steps");
    }

    #[test]
    fn dense_output_hits_scheduled_times() {
        let mut sys = DiagonalSystem {
            lambda: vec![Complex::new(-2.0, 0.0)],
        };
        let y0 = vec![Complex::new(1.0, 0.0)];
        let tol = ToleranceSpec::new(1e-8, 1e-12);
        let wanted = [0.25, 0.5, 0.75, 1.0];
        let mut seen = Vec::new();
        integrate(&mut sys, &y0, (0.0, 1.0), &tol, &wanted, |ev| {
            if let Event::Output { t, y } = ev {
                seen.push((t, y[0].re));
            }
        })
        .unwrap();
        assert_eq!(seen.len(), wanted.len());
        for (t, y) in seen {
            let exact = (-2.0 * t).exp();
            assert!(
                (y - exact).abs() < 1e-5,
                "dense output at {t}: {y} vs {exact}"
            );
        }
    }

    #[test]
    fn non_finite_rhs_reports_integration_failure() {
        struct NanSystem;
        impl OdeSystem for NanSystem {
            fn dim(&self) -> usize {
                1
            }
            fn rhs(&mut self, _t: f64, _y: &[Complex], out: &mut [Complex]) {
                out[0] = Complex::new(f64::NAN, 0.0);
            }
            fn linear_diag(&self, out: &mut [Complex]) {
                out[0] = Complex::default();
            }
        }
        let tol = ToleranceSpec::new(1e-6, 1e-9);
        let err = integrate(
            &mut NanSystem,
            &[Complex::new(1.0, 0.0)],
            (0.0, 1.0),
            &tol,
            &[],
            |_| {},
        );
        assert!(matches!(err, Err(Error::Integration(_))));
    }

    #[test]
    fn pure_decay_adaptive_accuracy() {
        // single mode with Stokes-like decay rate, exact solution e^{-0.2 t}
        let rate = -0.2;
        let mut sys = DiagonalSystem {
            lambda: vec![Complex::new(rate, 0.0)],
        };
        let y0 = vec![Complex::new(1.0, 0.0)];
        let rtol = 1e-6;
        let tol = ToleranceSpec::new(rtol, 1e-12);
        let out = integrate(&mut sys, &y0, (0.0, 3.0), &tol, &[], |_| {}).unwrap();
        let exact = (rate * 3.0f64).exp();
        assert!((out.y[0].re - exact).abs() <= 10.0 * rtol * exact);
    }
}
