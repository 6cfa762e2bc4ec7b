//! Deterministic classical trajectory integrators for the radiation-reaction
//! equations of motion (Abraham-Lorentz, finite-cutoff, Ford-O'Connell), the
//! C¹ force-pulse catalog, and the radiated-energy functional.

use crate::error::{Error, Result};
use crate::ode::{self, Monitor, OdeOptions};
use crate::quad;

/// C¹ ramp 3u² − 2u³ on [0, 1].
fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * (3.0 - 2.0 * u)
    }
}

fn smoothstep_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        6.0 * u * (1.0 - u)
    }
}

/// Natural cubic spline with analytic derivative, for sampled force data.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n != y.len() || n < 3 {
            return Err(Error::Input(
                "spline needs at least 3 samples with matching lengths".into(),
            ));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("spline abscissae must be strictly increasing".into()));
        }
        // tridiagonal solve for second derivatives, natural boundary values 0
        let mut sub = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        // Thomas algorithm
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut second = vec![0.0; n];
        second[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            second[i] = (rhs[i] - sup[i] * second[i + 1]) / diag[i];
        }
        Ok(CubicSpline { x, y, second })
    }

    fn segment(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(0) => 0,
            Err(i) if i >= self.x.len() => self.x.len() - 2,
            Err(i) => i - 1,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t < self.x[0] || t > *self.x.last().unwrap() {
            return 0.0;
        }
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t < self.x[0] || t > *self.x.last().unwrap() {
            return 0.0;
        }
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.second[i + 1] - (3.0 * a * a - 1.0) * self.second[i])
                * h
                / 6.0
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }
}

/// Differentiable applied force f(t) with an analytic derivative. Ramps are
/// strictly positive in duration, so every member is C¹.
#[derive(Debug, Clone, PartialEq)]
pub enum ForceProfile {
    Zero,
    /// 0 → f0 over a smooth ramp starting at t_on.
    SmoothStep { f0: f64, t_on: f64, ramp: f64 },
    /// f0 · exp(−(t−t0)²/2σ²), clipped beyond |t−t0| > 8.5σ where the value
    /// is below double-precision resolution.
    GaussianPulse { f0: f64, t0: f64, sigma: f64 },
    /// f0 · cos(ω t), optionally windowed by smooth on/off ramps.
    Sinusoid {
        f0: f64,
        omega: f64,
        /// (t_on, t_off, ramp): unity between t_on+ramp and t_off−ramp.
        window: Option<(f64, f64, f64)>,
    },
    /// Ramp up to a plateau of duration `plateau`, then ramp back down.
    CapacitorGate {
        f0: f64,
        t_on: f64,
        ramp: f64,
        plateau: f64,
    },
    /// Spline through samples; zero outside the sampled range. The samples
    /// should themselves taper to zero for a C¹ profile.
    Sampled(CubicSpline),
}

const GAUSSIAN_CLIP: f64 = 8.5;

impl ForceProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ForceProfile::Zero => true,
            ForceProfile::SmoothStep { ramp, .. } => *ramp > 0.0,
            ForceProfile::GaussianPulse { sigma, .. } => *sigma > 0.0,
            ForceProfile::Sinusoid { omega, window, .. } => {
                *omega >= 0.0
                    && window.map_or(true, |(t_on, t_off, ramp)| {
                        ramp > 0.0 && t_off - t_on >= 2.0 * ramp
                    })
            }
            ForceProfile::CapacitorGate { ramp, plateau, .. } => *ramp > 0.0 && *plateau >= 0.0,
            ForceProfile::Sampled(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("force profile has a nonpositive ramp or window"))
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            ForceProfile::Zero => 0.0,
            ForceProfile::SmoothStep { f0, t_on, ramp } => f0 * smoothstep((t - t_on) / ramp),
            ForceProfile::GaussianPulse { f0, t0, sigma } => {
                let u = (t - t0) / sigma;
                if u.abs() > GAUSSIAN_CLIP {
                    0.0
                } else {
                    f0 * (-0.5 * u * u).exp()
                }
            }
            ForceProfile::Sinusoid { f0, omega, window } => {
                f0 * (omega * t).cos() * window_value(window, t)
            }
            ForceProfile::CapacitorGate {
                f0,
                t_on,
                ramp,
                plateau,
            } => {
                let up = smoothstep((t - t_on) / ramp);
                let down = smoothstep((t - (t_on + ramp + plateau)) / ramp);
                f0 * (up - down)
            }
            ForceProfile::Sampled(s) => s.value(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            ForceProfile::Zero => 0.0,
            ForceProfile::SmoothStep { f0, t_on, ramp } => {
                f0 / ramp * smoothstep_deriv((t - t_on) / ramp)
            }
            ForceProfile::GaussianPulse { f0, t0, sigma } => {
                let u = (t - t0) / sigma;
                if u.abs() > GAUSSIAN_CLIP {
                    0.0
                } else {
                    -f0 * u / sigma * (-0.5 * u * u).exp()
                }
            }
            ForceProfile::Sinusoid { f0, omega, window } => {
                let env = window_value(window, t);
                let denv = window_deriv(window, t);
                f0 * (-omega * (omega * t).sin() * env + (omega * t).cos() * denv)
            }
            ForceProfile::CapacitorGate {
                f0,
                t_on,
                ramp,
                plateau,
            } => {
                let up = smoothstep_deriv((t - t_on) / ramp);
                let down = smoothstep_deriv((t - (t_on + ramp + plateau)) / ramp);
                f0 / ramp * (up - down)
            }
            ForceProfile::Sampled(s) => s.derivative(t),
        }
    }

    /// Support [t_on, t_off]; infinite bounds for non-compact profiles.
    pub fn support(&self) -> (f64, f64) {
        match self {
            ForceProfile::Zero => (0.0, 0.0),
            ForceProfile::SmoothStep { t_on, .. } => (*t_on, f64::INFINITY),
            ForceProfile::GaussianPulse { t0, sigma, .. } => {
                (t0 - GAUSSIAN_CLIP * sigma, t0 + GAUSSIAN_CLIP * sigma)
            }
            ForceProfile::Sinusoid { window, .. } => {
                window.map_or((f64::NEG_INFINITY, f64::INFINITY), |(a, b, _)| (a, b))
            }
            ForceProfile::CapacitorGate {
                t_on,
                ramp,
                plateau,
                ..
            } => (*t_on, t_on + 2.0 * ramp + plateau),
            ForceProfile::Sampled(s) => s.range(),
        }
    }

    /// Magnitude scale of the force, for runaway thresholds.
    pub fn amplitude(&self) -> f64 {
        match self {
            ForceProfile::Zero => 0.0,
            ForceProfile::SmoothStep { f0, .. }
            | ForceProfile::GaussianPulse { f0, .. }
            | ForceProfile::Sinusoid { f0, .. }
            | ForceProfile::CapacitorGate { f0, .. } => f0.abs(),
            ForceProfile::Sampled(s) => s.y.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }
}

fn window_value(window: &Option<(f64, f64, f64)>, t: f64) -> f64 {
    match window {
        None => 1.0,
        Some((t_on, t_off, ramp)) => {
            smoothstep((t - t_on) / ramp) - smoothstep((t - (t_off - ramp)) / ramp)
        }
    }
}

fn window_deriv(window: &Option<(f64, f64, f64)>, t: f64) -> f64 {
    match window {
        None => 0.0,
        Some((t_on, t_off, ramp)) => {
            (smoothstep_deriv((t - t_on) / ramp) - smoothstep_deriv((t - (t_off - ramp)) / ramp))
                / ramp
        }
    }
}

/// Integrator configuration.
#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of output samples (uniform grid over the time span).
    pub n_out: usize,
    /// Runaway truncation threshold as a multiple of the initial
    /// acceleration scale.
    pub runaway_factor: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            n_out: 800,
            runaway_factor: 1e6,
        }
    }
}

/// Sampled deterministic trajectory with integrator metadata.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    pub f: Vec<f64>,
    /// Instantaneous power delivered to the bath,
    /// f·v − d/dt(kinetic + potential).
    pub radiated_power: Vec<f64>,
    pub meta: TrajectoryMeta,
}

#[derive(Debug, Clone)]
pub struct TrajectoryMeta {
    pub method: &'static str,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Runaway detected and trajectory truncated.
    pub runaway: bool,
    pub truncated_at: Option<f64>,
    pub runaway_threshold: f64,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl Trajectory {
    /// All values finite by construction; verify as a cheap invariant.
    pub fn assert_finite(&self) -> Result<()> {
        for series in [&self.t, &self.x, &self.v, &self.a] {
            if series.iter().any(|v| !v.is_finite()) {
                return Err(Error::numeric("trajectory contains non-finite samples"));
            }
        }
        Ok(())
    }
}

fn acceleration_scale(force: &ForceProfile, mass: f64, a0: f64) -> f64 {
    let s = (force.amplitude() / mass).max(a0.abs());
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

fn build_trajectory<const N: usize>(
    sol: ode::OdeSolution<N>,
    force: &ForceProfile,
    spring: f64,
    mass: f64,
    pick: impl Fn(&[f64; N]) -> (f64, f64, f64),
    method: &'static str,
    opts: &IntegrateOptions,
    threshold: f64,
) -> Trajectory {
    let n = sol.t.len();
    let mut t = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    let mut acc = Vec::with_capacity(n);
    let mut fs = Vec::with_capacity(n);
    let mut power = Vec::with_capacity(n);
    for (ti, y) in sol.t.iter().zip(&sol.y) {
        let (x, v, a) = pick(y);
        let f = force.value(*ti);
        t.push(*ti);
        xs.push(x);
        vs.push(v);
        acc.push(a);
        fs.push(f);
        power.push(f * v - mass * v * a - spring * x * v);
    }
    let truncated_at = if sol.truncated { t.last().copied() } else { None };
    Trajectory {
        t,
        x: xs,
        v: vs,
        a: acc,
        f: fs,
        radiated_power: power,
        meta: TrajectoryMeta {
            method,
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
            runaway: sol.truncated,
            truncated_at,
            runaway_threshold: threshold,
            steps_accepted: sol.steps_accepted,
            steps_rejected: sol.steps_rejected,
        },
    }
}

/// Abraham-Lorentz equation M ẍ − M τe x⃛ = f(t), integrated as a
/// first-order system in (x, v, a). The unstable homogeneous mode e^{t/τe}
/// is monitored, and the trajectory is truncated with a runaway flag once
/// |a| exceeds `runaway_factor` times its initial scale.
pub fn integrate_abraham_lorentz(
    force: &ForceProfile,
    mass: f64,
    tau_e: f64,
    x0: f64,
    v0: f64,
    a0: f64,
    t_span: (f64, f64),
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    force.validate()?;
    if !(mass > 0.0 && tau_e > 0.0) {
        return Err(Error::domain("integrate_abraham_lorentz requires M > 0, tau_e > 0"));
    }
    let rhs = |t: f64, y: &[f64; 3]| {
        let a = y[2];
        [y[1], a, (a - force.value(t) / mass) / tau_e]
    };
    let scale = acceleration_scale(force, mass, a0);
    let threshold = opts.runaway_factor * scale;
    let out = ode::linspace(t_span.0, t_span.1, opts.n_out);
    let sol = ode::integrate(
        &rhs,
        t_span,
        [x0, v0, a0],
        &out,
        &OdeOptions {
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
            ..Default::default()
        },
        |_t, y: &[f64; 3]| {
            if y[2].abs() > threshold {
                Monitor::Truncate
            } else {
                Monitor::Continue
            }
        },
    )?;
    Ok(build_trajectory(
        sol,
        force,
        0.0,
        mass,
        |y| (y[0], y[1], y[2]),
        "abraham-lorentz",
        opts,
        threshold,
    ))
}

/// Free-particle second-order equation M ẍ = f(t) + τe ḟ(t). Reduces
/// exactly to Newton when f ≡ 0; no runaway solutions exist.
pub fn integrate_fo_free(
    force: &ForceProfile,
    mass: f64,
    tau_e: f64,
    x0: f64,
    v0: f64,
    t_span: (f64, f64),
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    force.validate()?;
    if !(mass > 0.0 && tau_e >= 0.0) {
        return Err(Error::domain("integrate_fo_free requires M > 0, tau_e >= 0"));
    }
    let rhs = |t: f64, y: &[f64; 2]| {
        [y[1], (force.value(t) + tau_e * force.derivative(t)) / mass]
    };
    let out = ode::linspace(t_span.0, t_span.1, opts.n_out);
    let sol = ode::integrate(
        &rhs,
        t_span,
        [x0, v0],
        &out,
        &OdeOptions {
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
            ..Default::default()
        },
        |_, _| Monitor::Continue,
    )?;
    let accel = |t: f64| (force.value(t) + tau_e * force.derivative(t)) / mass;
    let mut traj = build_trajectory(
        sol,
        force,
        0.0,
        mass,
        |y| (y[0], y[1], 0.0),
        "ford-oconnell-free",
        opts,
        f64::INFINITY,
    );
    for (a, t) in traj.a.iter_mut().zip(&traj.t) {
        *a = accel(*t);
    }
    for i in 0..traj.t.len() {
        traj.radiated_power[i] = traj.f[i] * traj.v[i] - mass * traj.v[i] * traj.a[i];
    }
    Ok(traj)
}

/// Second-order oscillator equation M ẍ + τe K ẋ + K x = f + τe ḟ (mean
/// motion). The free decay rate of the envelope is γ/2 = Kτe/2M. A zero
/// spring constant delegates to the free integrator, bit for bit.
pub fn integrate_fo_oscillator(
    force: &ForceProfile,
    mass: f64,
    tau_e: f64,
    spring: f64,
    x0: f64,
    v0: f64,
    t_span: (f64, f64),
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if spring == 0.0 {
        return integrate_fo_free(force, mass, tau_e, x0, v0, t_span, opts);
    }
    force.validate()?;
    if !(mass > 0.0 && tau_e >= 0.0 && spring > 0.0) {
        return Err(Error::domain(
            "integrate_fo_oscillator requires M > 0, tau_e >= 0, K >= 0",
        ));
    }
    let accel = |t: f64, x: f64, v: f64| {
        (force.value(t) + tau_e * force.derivative(t) - tau_e * spring * v - spring * x) / mass
    };
    let rhs = |t: f64, y: &[f64; 2]| [y[1], accel(t, y[0], y[1])];
    let out = ode::linspace(t_span.0, t_span.1, opts.n_out);
    let sol = ode::integrate(
        &rhs,
        t_span,
        [x0, v0],
        &out,
        &OdeOptions {
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
            ..Default::default()
        },
        |_, _| Monitor::Continue,
    )?;
    let mut traj = build_trajectory(
        sol,
        force,
        spring,
        mass,
        |y| (y[0], y[1], 0.0),
        "ford-oconnell-oscillator",
        opts,
        f64::INFINITY,
    );
    for i in 0..traj.t.len() {
        traj.a[i] = accel(traj.t[i], traj.x[i], traj.v[i]);
        traj.radiated_power[i] = traj.f[i] * traj.v[i]
            - mass * traj.v[i] * traj.a[i]
            - spring * traj.x[i] * traj.v[i];
    }
    Ok(traj)
}

/// Finite-cutoff third-order equation
///
///   M(1/Ω − τe) x⃛ + M ẍ + (K/Ω) ẋ + K x = f + ḟ/Ω
///
/// (mean motion). At Ω = 1/τe the third-derivative coefficient vanishes and
/// the equation degenerates to the second-order oscillator form, to which
/// this integrator delegates. Ω > 1/τe requires the explicit
/// negative-bare-mass override and reintroduces the runaway mode.
#[allow(clippy::too_many_arguments)]
pub fn integrate_finite_cutoff(
    force: &ForceProfile,
    mass: f64,
    tau_e: f64,
    omega_cutoff: f64,
    spring: f64,
    x0: f64,
    v0: f64,
    a0: f64,
    t_span: (f64, f64),
    opts: &IntegrateOptions,
    allow_negative_bare_mass: bool,
) -> Result<Trajectory> {
    force.validate()?;
    if !(mass > 0.0 && tau_e > 0.0 && omega_cutoff > 0.0 && spring >= 0.0) {
        return Err(Error::domain(
            "integrate_finite_cutoff requires M, tau_e, Omega > 0 and K >= 0",
        ));
    }
    if omega_cutoff * tau_e > 1.0 && !allow_negative_bare_mass {
        return Err(Error::CutoffConstraint {
            omega: omega_cutoff,
            inv_tau_e: 1.0 / tau_e,
        });
    }
    let eps = 1.0 / omega_cutoff - tau_e;
    if eps == 0.0 {
        return integrate_fo_oscillator(force, mass, tau_e, spring, x0, v0, t_span, opts);
    }

    let rhs = |t: f64, y: &[f64; 3]| {
        let [x, v, a] = *y;
        let drive = force.value(t) + force.derivative(t) / omega_cutoff;
        [
            v,
            a,
            (drive - mass * a - spring * v / omega_cutoff - spring * x) / (mass * eps),
        ]
    };
    let scale = acceleration_scale(force, mass, a0);
    let threshold = opts.runaway_factor * scale;
    let out = ode::linspace(t_span.0, t_span.1, opts.n_out);
    let sol = ode::integrate(
        &rhs,
        t_span,
        [x0, v0, a0],
        &out,
        &OdeOptions {
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
            ..Default::default()
        },
        |_t, y: &[f64; 3]| {
            if y[2].abs() > threshold {
                Monitor::Truncate
            } else {
                Monitor::Continue
            }
        },
    )?;
    Ok(build_trajectory(
        sol,
        force,
        spring,
        mass,
        |y| (y[0], y[1], y[2]),
        "finite-cutoff",
        opts,
        threshold,
    ))
}

/// Radiated energy of a compact-support force profile.
#[derive(Debug, Clone)]
pub struct RadiatedEnergy {
    /// W_R = (2e²/3c³) ∫ (f/M)² dt with 2e²/3c³ = M·τe.
    pub total: f64,
    /// Emission-profile sample times.
    pub time: Vec<f64>,
    /// Instantaneous emitted power −τe·ḟ·v along the from-rest free
    /// trajectory; vanishes wherever the force is constant yet integrates to
    /// `total`.
    pub power: Vec<f64>,
    /// ∫ power dt, for cross-checking against `total`.
    pub total_from_profile: f64,
}

/// Total electromagnetic energy radiated by a compact-support applied force,
/// in terms of the force alone, plus the time-resolved emission profile.
pub fn radiated_energy(
    force: &ForceProfile,
    mass: f64,
    tau_e: f64,
    n_profile: usize,
) -> Result<RadiatedEnergy> {
    force.validate()?;
    if !(mass > 0.0 && tau_e >= 0.0) {
        return Err(Error::domain("radiated_energy requires M > 0, tau_e >= 0"));
    }
    let (t_on, t_off) = force.support();
    if matches!(force, ForceProfile::Zero) {
        return Ok(RadiatedEnergy {
            total: 0.0,
            time: vec![],
            power: vec![],
            total_from_profile: 0.0,
        });
    }
    if !t_on.is_finite() || !t_off.is_finite() || t_off <= t_on {
        return Err(Error::Domain(
            "radiated_energy requires a compact-support force (switched on and off)".into(),
        ));
    }
    let coupling = mass * tau_e; // 2e²/3c³
    let f2 = |t: f64| {
        let f = force.value(t);
        f * f
    };
    let q = quad::adaptive(&f2, t_on, t_off, 1e-11, 0.0, 4000)?;
    let total = coupling / (mass * mass) * q.value;

    // emission profile −τe·ḟ·v along the from-rest trajectory:
    // v(t) = (∫ f ds + τe f)/M, accumulated as an ODE together with the
    // profile integral
    let n = n_profile.max(2);
    let out = ode::linspace(t_on, t_off, n);
    let rhs = |t: f64, y: &[f64; 2]| {
        let f = force.value(t);
        let fd = force.derivative(t);
        let v = (y[0] + tau_e * f) / mass;
        [f, -tau_e * fd * v]
    };
    let sol = ode::integrate(
        &rhs,
        (t_on, t_off),
        [0.0, 0.0],
        &out,
        &OdeOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            ..Default::default()
        },
        |_, _| Monitor::Continue,
    )?;
    let power: Vec<f64> = sol
        .t
        .iter()
        .zip(&sol.y)
        .map(|(t, y)| {
            let v = (y[0] + tau_e * force.value(*t)) / mass;
            -tau_e * force.derivative(*t) * v
        })
        .collect();
    let total_from_profile = sol.y.last().unwrap()[1];

    Ok(RadiatedEnergy {
        total,
        time: sol.t,
        power,
        total_from_profile,
    })
}

/// Effective driving force amplitude of an electric field of angular
/// frequency ω: e·E/√(1 + ω²τe²).
pub fn field_to_force(e: f64, e_field: f64, omega: f64, tau_e: f64) -> f64 {
    e * e_field / (1.0 + omega * omega * tau_e * tau_e).sqrt()
}

/// Least-squares growth rate of ln|y| over the samples with |y| > floor.
/// Used to fit the runaway exponent.
pub fn fit_exponential_rate(t: &[f64], y: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(_, v)| v.abs() > floor)
        .map(|(t, v)| (*t, v.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Trapezoid rule over trajectory samples.
pub fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2)
        .zip(y.windows(2))
        .map(|(tw, yw)| 0.5 * (yw[0] + yw[1]) * (tw[1] - tw[0]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn catalog() -> Vec<ForceProfile> {
        vec![
            ForceProfile::GaussianPulse {
                f0: 1.0,
                t0: 30.0,
                sigma: 3.0,
            },
            ForceProfile::CapacitorGate {
                f0: 0.8,
                t_on: 5.0,
                ramp: 4.0,
                plateau: 30.0,
            },
            ForceProfile::Sinusoid {
                f0: 0.5,
                omega: 1.3,
                window: Some((2.0, 52.0, 6.0)),
            },
            ForceProfile::SmoothStep {
                f0: 1.0,
                t_on: 4.0,
                ramp: 10.0,
            },
        ]
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let spline_ts: Vec<f64> = (0..30).map(|i| i as f64 * 0.5).collect();
        let spline_fs: Vec<f64> = spline_ts
            .iter()
            .map(|t| (t - 7.0).tanh() - (t - 9.5).tanh())
            .collect();
        let mut profiles = catalog();
        profiles.push(ForceProfile::Sampled(
            CubicSpline::natural(spline_ts, spline_fs).unwrap(),
        ));
        let mut state = 0x12345678u64;
        let mut uniform = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for p in &profiles {
            p.validate().unwrap();
            let (lo, hi) = p.support();
            let (lo, hi) = (lo.max(0.0), hi.min(60.0));
            for _ in 0..100 {
                let t = lo + (hi - lo) * uniform();
                let h = 1e-6 * (hi - lo).max(1.0);
                let fd = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
                let scale = p.amplitude().max(1e-12);
                assert_abs_diff_eq!(p.derivative(t), fd, epsilon = 2e-6 * scale);
            }
        }
    }

    #[test]
    fn al_newtonian_branch() {
        // f ≡ 0, a0 = 0: x = x0 + v0 t exactly
        let traj = integrate_abraham_lorentz(
            &ForceProfile::Zero,
            1.0,
            1.0,
            2.0,
            0.5,
            0.0,
            (0.0, 10.0),
            &IntegrateOptions::default(),
        )
        .unwrap();
        assert!(!traj.meta.runaway);
        for (t, x) in traj.t.iter().zip(&traj.x) {
            assert_relative_eq!(*x, 2.0 + 0.5 * t, max_relative = 1e-9);
        }
    }

    #[test]
    fn al_homogeneous_runaway_rate() {
        // f ≡ 0, a0 ≠ 0: a(t) = a0 e^{t/τe}
        let tau_e = 0.5;
        let traj = integrate_abraham_lorentz(
            &ForceProfile::Zero,
            1.0,
            tau_e,
            0.0,
            0.0,
            1e-4,
            (0.0, 20.0),
            &IntegrateOptions {
                n_out: 4000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(traj.meta.runaway);
        for (t, a) in traj.t.iter().zip(&traj.a) {
            let expect = 1e-4 * (t / tau_e).exp();
            assert_relative_eq!(*a, expect, max_relative = 1e-6);
        }
        let rate = fit_exponential_rate(&traj.t, &traj.a, 1e-3).unwrap();
        assert_relative_eq!(rate, 1.0 / tau_e, max_relative = 1e-4);
    }

    #[test]
    fn al_pulse_triggers_runaway() {
        let pulse = ForceProfile::GaussianPulse {
            f0: 1.0,
            t0: 30.0,
            sigma: 3.0,
        };
        let traj = integrate_abraham_lorentz(
            &pulse,
            1.0,
            1.0,
            0.0,
            0.0,
            0.0,
            (0.0, 80.0),
            &IntegrateOptions {
                n_out: 4000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(traj.meta.runaway, "runaway flag must be set");
        traj.assert_finite().unwrap();
        // fitted growth exponent 1/τe in the exponential regime
        let rate = fit_exponential_rate(&traj.t, &traj.a, 1e2).unwrap();
        assert_relative_eq!(rate, 1.0, max_relative = 1e-2);
    }

    #[test]
    fn fo_free_uniform_motion() {
        let traj = integrate_fo_free(
            &ForceProfile::Zero,
            1.0,
            1.0,
            1.0,
            -0.3,
            (0.0, 50.0),
            &IntegrateOptions::default(),
        )
        .unwrap();
        assert!(!traj.meta.runaway);
        for (t, (x, v)) in traj.t.iter().zip(traj.x.iter().zip(&traj.v)) {
            assert_relative_eq!(*x, 1.0 - 0.3 * t, max_relative = 1e-9, epsilon = 1e-12);
            assert_abs_diff_eq!(*v, -0.3, epsilon = 1e-12);
        }
    }

    #[test]
    fn fo_smooth_step_velocity_gain() {
        // after the ramp: Δv = (∫f dt + τe f0·[ramp shape integral])/M; with
        // the step held at f0 the τe·ḟ part contributes τe·f0/M only during
        // the ramp: v(t) − v0 = (∫₀^t f + τe f(t))/M
        let (mass, tau_e, f0, t_on, ramp) = (2.0, 0.4, 1.5, 2.0, 5.0);
        let step = ForceProfile::SmoothStep { f0, t_on, ramp };
        let traj = integrate_fo_free(
            &step,
            mass,
            tau_e,
            0.0,
            0.0,
            (0.0, 20.0),
            &IntegrateOptions::default(),
        )
        .unwrap();
        // at the end (t = 20): ∫f = f0·(ramp/2 + (20 − t_on − ramp))
        let int_f = f0 * (ramp / 2.0 + (20.0 - t_on - ramp));
        let expect = (int_f + tau_e * f0) / mass;
        assert_relative_eq!(*traj.v.last().unwrap(), expect, max_relative = 1e-8);
    }

    #[test]
    fn fo_sinusoid_steady_amplitude() {
        // steady position amplitude f0·sqrt(1+ω²τe²)/(Mω²)
        let (mass, tau_e, f0, omega) = (1.0, 0.3, 0.7, 2.0);
        let force = ForceProfile::Sinusoid {
            f0,
            omega,
            window: None,
        };
        // start on the steady phasor: x = Re[X e^{−iωt}] with
        // X = −f0(1−iωτe)/(Mω²)
        let xr = -f0 / (mass * omega * omega);
        let xi = f0 * tau_e / (mass * omega);
        let x0 = xr;
        let v0 = omega * xi;
        let traj = integrate_fo_free(
            &force,
            mass,
            tau_e,
            x0,
            v0,
            (0.0, 40.0),
            &IntegrateOptions {
                rel_tol: 1e-11,
                ..Default::default()
            },
        )
        .unwrap();
        let amp_expect = f0 * (1.0 + omega * omega * tau_e * tau_e).sqrt() / (mass * omega * omega);
        let amp_got = traj.x.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert_relative_eq!(amp_got, amp_expect, max_relative = 1e-4);
    }

    #[test]
    fn fo_oscillator_free_decay() {
        // envelope decays at γ/2 = Kτe/2M within 0.5%
        let (mass, tau_e, spring) = (1.0, 0.05, 1.0);
        let traj = integrate_fo_oscillator(
            &ForceProfile::Zero,
            mass,
            tau_e,
            spring,
            1.0,
            0.0,
            (0.0, 200.0),
            &IntegrateOptions {
                n_out: 8000,
                ..Default::default()
            },
        )
        .unwrap();
        // fit the decay of |x| peaks
        let mut peaks_t = Vec::new();
        let mut peaks_x = Vec::new();
        for i in 1..traj.t.len() - 1 {
            if traj.x[i].abs() > traj.x[i - 1].abs() && traj.x[i].abs() > traj.x[i + 1].abs() {
                peaks_t.push(traj.t[i]);
                peaks_x.push(traj.x[i].abs());
            }
        }
        let rate = fit_exponential_rate(&peaks_t, &peaks_x, 0.0).unwrap();
        let gamma = spring * tau_e / mass;
        assert_relative_eq!(-rate, gamma / 2.0, max_relative = 5e-3);
    }

    #[test]
    fn fo_oscillator_zero_spring_is_bitwise_free() {
        let pulse = ForceProfile::GaussianPulse {
            f0: 1.0,
            t0: 10.0,
            sigma: 2.0,
        };
        let a = integrate_fo_oscillator(
            &pulse,
            1.0,
            0.2,
            0.0,
            0.1,
            -0.2,
            (0.0, 25.0),
            &IntegrateOptions::default(),
        )
        .unwrap();
        let b = integrate_fo_free(
            &pulse,
            1.0,
            0.2,
            0.1,
            -0.2,
            (0.0, 25.0),
            &IntegrateOptions::default(),
        )
        .unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.v, b.v);
    }

    #[test]
    fn fo_oscillator_step_settles_to_static() {
        let (mass, tau_e, spring, f0) = (1.0, 0.1, 2.0, 0.6);
        let step = ForceProfile::SmoothStep {
            f0,
            t_on: 1.0,
            ramp: 3.0,
        };
        let traj = integrate_fo_oscillator(
            &step,
            mass,
            tau_e,
            spring,
            0.0,
            0.0,
            (0.0, 300.0),
            &IntegrateOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(*traj.x.last().unwrap(), f0 / spring, max_relative = 1e-6);
    }

    #[test]
    fn cutoff_at_inverse_tau_matches_fo() {
        let (mass, tau_e, spring) = (1.0, 0.5, 1.0);
        let pulse = ForceProfile::GaussianPulse {
            f0: 1.0,
            t0: 8.0,
            sigma: 1.5,
        };
        let opts = IntegrateOptions::default();
        let cut = integrate_finite_cutoff(
            &pulse,
            mass,
            tau_e,
            1.0 / tau_e,
            spring,
            0.0,
            0.0,
            0.0,
            (0.0, 20.0),
            &opts,
            false,
        )
        .unwrap();
        let fo = integrate_fo_oscillator(&pulse, mass, tau_e, spring, 0.0, 0.0, (0.0, 20.0), &opts)
            .unwrap();
        assert_eq!(cut.x, fo.x);

        // slightly below the critical cutoff: trajectories agree to O(ε)
        let near = integrate_finite_cutoff(
            &pulse,
            mass,
            tau_e,
            1.0 / (1.002 * tau_e),
            spring,
            0.0,
            0.0,
            0.0,
            (0.0, 20.0),
            &opts,
            false,
        )
        .unwrap();
        assert!(!near.meta.runaway);
        let max_dev = near
            .x
            .iter()
            .zip(&fo.x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let max_x = fo.x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(
            max_dev < 0.02 * max_x,
            "deviation {max_dev} vs amplitude {max_x}"
        );
    }

    #[test]
    fn cutoff_stable_inertial_branch() {
        // Ω = 1/(2τe), f ≡ 0, a0 = 0, K = 0: inertial motion, no runaway
        let traj = integrate_finite_cutoff(
            &ForceProfile::Zero,
            1.0,
            1.0,
            0.5,
            0.0,
            0.0,
            0.7,
            0.0,
            (0.0, 30.0),
            &IntegrateOptions::default(),
            false,
        )
        .unwrap();
        assert!(!traj.meta.runaway);
        for (t, x) in traj.t.iter().zip(&traj.x) {
            assert_relative_eq!(*x, 0.7 * t, max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn cutoff_beyond_constraint_errors_then_runs_away() {
        let pulse = ForceProfile::GaussianPulse {
            f0: 1.0,
            t0: 10.0,
            sigma: 2.0,
        };
        let err = integrate_finite_cutoff(
            &pulse,
            1.0,
            1.0,
            3.0,
            0.0,
            0.0,
            0.0,
            0.0,
            (0.0, 40.0),
            &IntegrateOptions::default(),
            false,
        );
        assert!(matches!(err, Err(Error::CutoffConstraint { .. })));

        let traj = integrate_finite_cutoff(
            &pulse,
            1.0,
            1.0,
            3.0,
            0.0,
            0.0,
            0.0,
            0.0,
            (0.0, 40.0),
            &IntegrateOptions {
                n_out: 2000,
                ..Default::default()
            },
            true,
        )
        .unwrap();
        assert!(traj.meta.runaway, "negative bare mass must reintroduce the runaway");
    }

    #[test]
    fn newtonian_degeneration_without_tau() {
        // τe = 0 reproduces the bare oscillator
        let (mass, spring) = (1.0, 4.0);
        let traj = integrate_fo_oscillator(
            &ForceProfile::Zero,
            mass,
            0.0,
            spring,
            1.0,
            0.0,
            (0.0, 10.0),
            &IntegrateOptions {
                rel_tol: 1e-11,
                ..Default::default()
            },
        )
        .unwrap();
        let omega0 = (spring / mass as f64).sqrt();
        for (t, x) in traj.t.iter().zip(&traj.x) {
            assert_abs_diff_eq!(*x, (omega0 * t).cos(), epsilon = 1e-8);
        }
    }

    #[test]
    fn radiated_energy_gaussian_closed_form() {
        let (mass, tau_e, f0, sigma) = (1.0, 0.3, 1.2, 2.0);
        let pulse = ForceProfile::GaussianPulse {
            f0,
            t0: 30.0,
            sigma,
        };
        let r = radiated_energy(&pulse, mass, tau_e, 400).unwrap();
        let coupling = mass * tau_e;
        let expect = coupling * f0 * f0 / (mass * mass) * sigma * std::f64::consts::PI.sqrt();
        assert_relative_eq!(r.total, expect, max_relative = 1e-9);
        assert_relative_eq!(r.total_from_profile, expect, max_relative = 1e-6);
    }

    #[test]
    fn radiated_energy_zero_force() {
        let r = radiated_energy(&ForceProfile::Zero, 1.0, 0.3, 100).unwrap();
        assert_eq!(r.total, 0.0);
    }

    #[test]
    fn radiated_energy_rejects_noncompact() {
        let step = ForceProfile::SmoothStep {
            f0: 1.0,
            t_on: 0.0,
            ramp: 1.0,
        };
        assert!(radiated_energy(&step, 1.0, 0.1, 10).is_err());
    }

    #[test]
    fn capacitor_gate_profile_vanishes_on_plateau() {
        let gate = ForceProfile::CapacitorGate {
            f0: 1.0,
            t_on: 0.0,
            ramp: 5.0,
            plateau: 40.0,
        };
        let r = radiated_energy(&gate, 1.0, 0.2, 2000).unwrap();
        let peak = r.power.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        for (t, p) in r.time.iter().zip(&r.power) {
            if *t > 6.0 && *t < 44.0 {
                assert!(
                    p.abs() <= 1e-6 * peak,
                    "power {p:e} at t = {t} exceeds 1e-6 of peak {peak:e}"
                );
            }
        }
        assert_relative_eq!(r.total, r.total_from_profile, max_relative = 1e-6);
    }

    #[test]
    fn larmor_comparison_slow_sinusoid() {
        // ∫(Mẍ)² vs ∫f² differ at relative order (ωτe)²
        let (mass, tau_e, f0, omega) = (1.0, 1.0, 1.0, 1e-3);
        let period = 2.0 * std::f64::consts::PI / omega;
        let force = ForceProfile::Sinusoid {
            f0,
            omega,
            window: Some((0.0, 6.0 * period, period)),
        };
        let opts = IntegrateOptions {
            n_out: 6000,
            rel_tol: 1e-10,
            ..Default::default()
        };
        let traj = integrate_fo_free(
            &force,
            mass,
            tau_e,
            0.0,
            0.0,
            (0.0, 6.0 * period),
            &opts,
        )
        .unwrap();
        let coupling = mass * tau_e;
        let larmor: f64 = coupling
            * trapezoid(
                &traj.t,
                &traj.a.iter().map(|a| a * a).collect::<Vec<_>>(),
            );
        let generalized = radiated_energy(&force, mass, tau_e, 1000).unwrap().total;
        let rel = (larmor - generalized).abs() / generalized;
        assert!(rel <= 1e-4, "relative difference {rel:e}");
    }

    #[test]
    fn field_to_force_examples() {
        assert_relative_eq!(field_to_force(2.0, 3.0, 0.0, 0.5), 6.0);
        assert_relative_eq!(
            field_to_force(1.0, 1.0, 2.0, 0.5),
            1.0 / 2.0f64.sqrt(),
            max_relative = 1e-14
        );
        // ωτe ≪ 1: within ½(ωτe)² of eE
        let small = field_to_force(1.0, 1.0, 1e-3, 1.0);
        assert!((small - 1.0).abs() <= 0.51 * 1e-6);
    }

    #[test]
    fn energy_bookkeeping_slow_pulse() {
        // kinetic-energy change equals ∫f·v dt − W_R for a slow pulse
        let (mass, tau_e) = (1.0, 0.01);
        let pulse = ForceProfile::GaussianPulse {
            f0: 1.0,
            t0: 60.0,
            sigma: 6.0,
        };
        let traj = integrate_fo_free(
            &pulse,
            mass,
            tau_e,
            0.0,
            0.0,
            (0.0, 120.0),
            &IntegrateOptions {
                n_out: 6000,
                rel_tol: 1e-11,
                ..Default::default()
            },
        )
        .unwrap();
        let ke = 0.5 * mass * traj.v.last().unwrap().powi(2);
        let fv: Vec<f64> = traj.f.iter().zip(&traj.v).map(|(f, v)| f * v).collect();
        let work = trapezoid(&traj.t, &fv);
        let w_r = radiated_energy(&pulse, mass, tau_e, 100).unwrap().total;
        assert!(
            (ke - (work - w_r)).abs() <= 0.01 * ke.abs().max(w_r),
            "ΔKE = {ke}, work − W_R = {}",
            work - w_r
        );
    }

    #[test]
    fn no_runaway_over_pulse_catalog() {
        for force in catalog() {
            let (_, t_off) = force.support();
            if !t_off.is_finite() {
                continue;
            }
            let t_end = t_off + 20.0;
            // free: post-pulse velocity constant
            let free = integrate_fo_free(
                &force,
                1.0,
                0.3,
                0.0,
                0.0,
                (0.0, t_end),
                &IntegrateOptions::default(),
            )
            .unwrap();
            assert!(!free.meta.runaway);
            let post: Vec<(f64, f64)> = free
                .t
                .iter()
                .zip(&free.v)
                .filter(|(t, _)| **t > t_off)
                .map(|(t, v)| (*t, *v))
                .collect();
            let v_ref = post.last().unwrap().1;
            for (_, v) in &post {
                assert_abs_diff_eq!(*v, v_ref, epsilon = 1e-8 * v_ref.abs().max(1.0));
            }
            // bound: envelope decaying after the pulse
            let bound = integrate_fo_oscillator(
                &force,
                1.0,
                0.3,
                1.0,
                0.0,
                0.0,
                (0.0, t_end + 100.0),
                &IntegrateOptions::default(),
            )
            .unwrap();
            assert!(!bound.meta.runaway);
            let late_amp = bound
                .t
                .iter()
                .zip(&bound.x)
                .filter(|(t, _)| **t > t_off + 80.0)
                .map(|(_, x)| x.abs())
                .fold(0.0f64, f64::max);
            let early_amp = bound
                .t
                .iter()
                .zip(&bound.x)
                .filter(|(t, _)| **t <= t_off + 20.0)
                .map(|(_, x)| x.abs())
                .fold(0.0f64, f64::max);
            assert!(
                late_amp <= early_amp.max(1e-12),
                "late amplitude {late_amp} should not exceed {early_amp}"
            );
        }
    }

    #[test]
    fn al_fo_agreement_is_quadratic_in_tau() {
        // steady sinusoidal driving, phasor initial conditions for both
        // equations: the amplitude difference scales as (ωτe)²
        let (mass, f0, omega) = (1.0, 1.0, 1.0);
        let force = ForceProfile::Sinusoid {
            f0,
            omega,
            window: None,
        };
        let deviation = |tau_e: f64| -> f64 {
            // AL phasor: X = f0/(−Mω²(1+iωτe))
            let den = num_complex::Complex64::new(-mass * omega * omega, 0.0)
                * num_complex::Complex64::new(1.0, omega * tau_e);
            let x_al = num_complex::Complex64::new(f0, 0.0) / den;
            // FO phasor: X = −f0(1−iωτe)/(Mω²)
            let x_fo = -f0 * num_complex::Complex64::new(1.0, -omega * tau_e)
                / (mass * omega * omega);
            let span = 12.0 * tau_e;
            let opts = IntegrateOptions {
                rel_tol: 1e-12,
                abs_tol: 1e-14,
                n_out: 400,
                ..Default::default()
            };
            let al = integrate_abraham_lorentz(
                &force,
                mass,
                tau_e,
                x_al.re,
                omega * x_al.im,
                -omega * omega * x_al.re,
                (0.0, span),
                &opts,
            )
            .unwrap();
            let fo = integrate_fo_free(
                &force,
                mass,
                tau_e,
                x_fo.re,
                omega * x_fo.im,
                (0.0, span),
                &opts,
            )
            .unwrap();
            al.x
                .iter()
                .zip(&fo.x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        };
        let d1 = deviation(0.02);
        let d2 = deviation(0.01);
        let ratio = d1 / d2;
        assert!(
            (2.5..6.0).contains(&ratio),
            "expected ~4x shrink on halving τe, got {ratio} ({d1} vs {d2})"
        );
    }
}
