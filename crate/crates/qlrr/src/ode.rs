//! Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) with PI step-size
//! control, fixed output sampling, and an optional state monitor used for
//! runaway truncation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    /// Set when the monitor requested truncation before reaching t_end.
    pub truncated: bool,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

/// What the state monitor decides after each accepted step.
pub enum Monitor {
    Continue,
    /// Stop integrating; the trajectory is recorded up to this point.
    Truncate,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// Integrate dy/dt = rhs(t, y) from t_span.0 to t_span.1, sampling the
/// solution exactly at the strictly increasing `output` times (which must
/// start at t_span.0 and end at t_span.1). The monitor runs after every
/// accepted step and may truncate the run.
pub fn integrate<const N: usize>(
    rhs: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    t_span: (f64, f64),
    y0: [f64; N],
    output: &[f64],
    opts: &OdeOptions,
    mut monitor: impl FnMut(f64, &[f64; N]) -> Monitor,
) -> Result<OdeSolution<N>> {
    let (t0, t_end) = t_span;
    if !(t_end > t0) {
        return Err(Error::domain("integrate requires t_end > t0"));
    }
    if output.first() != Some(&t0) || output.last() != Some(&t_end) {
        return Err(Error::domain(
            "output grid must start at t0 and end at t_end",
        ));
    }
    if output.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("output grid must be strictly increasing"));
    }

    let mut sol = OdeSolution {
        t: Vec::with_capacity(output.len()),
        y: Vec::with_capacity(output.len()),
        truncated: false,
        steps_accepted: 0,
        steps_rejected: 0,
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    sol.t.push(t);
    sol.y.push(y);
    let mut next_out = 1usize;

    // initial step guess from the RHS magnitude, floored well above the
    // machine-precision collapse threshold (rejections will shrink it if the
    // problem genuinely needs a smaller start)
    let mut h = {
        let scale = (0..N)
            .map(|i| (k1[i].abs()) / (opts.abs_tol + opts.rel_tol * y[i].abs()).max(1e-300))
            .fold(0.0f64, f64::max);
        let span = t_end - t0;
        if scale > 0.0 {
            (0.1 / scale).clamp(1e-9 * span, span / 100.0)
        } else {
            span / 100.0
        }
    };
    let mut err_prev: f64 = 1.0;

    if let Monitor::Truncate = monitor(t, &y) {
        sol.truncated = true;
        return Ok(sol);
    }

    let mut steps = 0usize;
    while t < t_end {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Numeric(format!(
                "integrator exceeded {} steps at t = {t:e} (step size {h:e}); \
                 last state recorded",
                opts.max_steps
            )));
        }
        let mut h_now = h.min(t_end - t);
        // land exactly on the next output time
        let mut hit_output = false;
        if next_out < output.len() && t + h_now >= output[next_out] - 1e-14 * (t_end - t0) {
            h_now = output[next_out] - t;
            hit_output = true;
        }
        if h_now <= f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::Numeric(format!(
                "step size collapsed at t = {t:e}; last good state recorded"
            )));
        }

        let k2 = rhs(t + C2 * h_now, &axpy(&y, h_now, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h_now, &axpy(&y, h_now, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(
            t + C4 * h_now,
            &axpy(&y, h_now, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = rhs(
            t + C5 * h_now,
            &axpy(&y, h_now, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + h_now,
            &axpy(
                &y,
                h_now,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            h_now,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = rhs(t + h_now, &y_new);

        let mut err_norm = 0.0f64;
        for i in 0..N {
            let e = h_now
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            err_norm += (e / sc) * (e / sc);
        }
        err_norm = (err_norm / N as f64).sqrt();

        if err_norm <= 1.0 {
            t += h_now;
            y = y_new;
            k1 = k7;
            sol.steps_accepted += 1;

            if hit_output {
                sol.t.push(t);
                sol.y.push(y);
                next_out += 1;
            }
            if let Monitor::Truncate = monitor(t, &y) {
                if !hit_output {
                    sol.t.push(t);
                    sol.y.push(y);
                }
                sol.truncated = true;
                return Ok(sol);
            }

            // PI controller
            let err = err_norm.max(1e-10);
            let fac = 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h = h_now * fac.clamp(0.2, 5.0);
            err_prev = err;
        } else {
            sol.steps_rejected += 1;
            h = h_now * (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9);
        }
    }

    Ok(sol)
}

/// Evenly spaced output grid including both endpoints (the endpoints are
/// exact, not rounded through the spacing arithmetic).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let mut v: Vec<f64> = (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect();
    v[0] = a;
    v[n - 1] = b;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay() {
        let rhs = |_t: f64, y: &[f64; 1]| [-y[0]];
        let out = linspace(0.0, 5.0, 11);
        let sol = integrate(&rhs, (0.0, 5.0), [1.0], &out, &OdeOptions::default(), |_, _| {
            Monitor::Continue
        })
        .unwrap();
        assert_eq!(sol.t.len(), 11);
        for (t, y) in sol.t.iter().zip(&sol.y) {
            assert_relative_eq!(y[0], (-t).exp(), max_relative = 1e-8);
        }
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let rhs = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let out = linspace(0.0, 50.0, 101);
        let sol = integrate(
            &rhs,
            (0.0, 50.0),
            [1.0, 0.0],
            &out,
            &OdeOptions {
                rel_tol: 1e-11,
                abs_tol: 1e-13,
                ..Default::default()
            },
            |_, _| Monitor::Continue,
        )
        .unwrap();
        for y in &sol.y {
            let e = y[0] * y[0] + y[1] * y[1];
            assert_relative_eq!(e, 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn monitor_truncates() {
        let rhs = |_t: f64, y: &[f64; 1]| [y[0]];
        let out = linspace(0.0, 30.0, 31);
        let sol = integrate(&rhs, (0.0, 30.0), [1.0], &out, &OdeOptions::default(), |_, y| {
            if y[0] > 1e6 {
                Monitor::Truncate
            } else {
                Monitor::Continue
            }
        })
        .unwrap();
        assert!(sol.truncated);
        let t_last = *sol.t.last().unwrap();
        assert!(t_last < 30.0 && t_last > 13.0, "t_last = {t_last}");
    }
}
