//! Subcommand implementations: thin plumbing from parsed flags to the
//! library calls, with unit scaling at the boundary.

use crate::descriptors::{parse_bath, parse_pulse};
use crate::manifest::Emitter;
use crate::{
    Command, Ctx, Dim, ACCEL, ENERGY, FORCE, FREQUENCY, FRICTION, LENGTH, MASS, POWER,
    SPRING, TIME, VELOCITY,
};
use clap::Args;
use qlrr::bath::{check_admissibility, memory_kernel_time, SpectralDistribution, TabulatedSpectrum};
use qlrr::correlations::{
    force_autocorrelation, force_commutator, position_autocorrelation, position_commutator,
    CorrelationValue, ThermalState,
};
use qlrr::dynamics::{
    integrate_abraham_lorentz, integrate_finite_cutoff, integrate_fo_oscillator, radiated_energy,
    ForceProfile, IntegrateOptions, Trajectory,
};
use qlrr::error::{Error, Result};
use qlrr::relativistic::{
    capacitor_scenario, integrate_relativistic, EmField, FourVelocity, RelativisticParams,
};
use qlrr::response::{pole_diagnostics, HalfPlane, Susceptibility};
use qlrr::stochastic::{
    estimate_diffusion, run_microbath, simulate_langevin_ohmic, LangevinConfig, MicrobathConfig,
    Potential,
};
use serde_json::json;

pub fn dispatch(command: &Command, ctx: &mut Ctx, emitter: &mut Emitter) -> Result<()> {
    match command {
        Command::Spectrum(a) => spectrum(a, ctx, emitter),
        Command::Response(a) => response(a, ctx, emitter),
        Command::Correlate(a) => correlate(a, ctx, emitter),
        Command::Trajectory(a) => trajectory(a, ctx, emitter),
        Command::Radiate(a) => radiate(a, ctx, emitter),
        Command::Relativistic(a) => relativistic(a, ctx, emitter),
        Command::Brownian(a) => brownian(a, ctx, emitter),
        Command::Microbath(a) => microbath(a, ctx, emitter),
        Command::Verify(a) => verify(a, ctx),
    }
}

/// Parse "a:b" or "a:b:n" range descriptors.
fn parse_range(desc: &str) -> Result<(f64, f64, Option<usize>)> {
    let parts: Vec<&str> = desc.split(':').collect();
    let bad = || Error::Input(format!("bad range {desc:?}; expected t0:t1 or t0:t1:n"));
    match parts.as_slice() {
        [a, b] => Ok((
            a.parse().map_err(|_| bad())?,
            b.parse().map_err(|_| bad())?,
            None,
        )),
        [a, b, n] => Ok((
            a.parse().map_err(|_| bad())?,
            b.parse().map_err(|_| bad())?,
            Some(n.parse().map_err(|_| bad())?),
        )),
        _ => Err(bad()),
    }
}

fn scale_bath(bath: SpectralDistribution, ctx: &Ctx) -> Result<SpectralDistribution> {
    Ok(match bath {
        SpectralDistribution::Ohmic { zeta } => SpectralDistribution::Ohmic {
            zeta: ctx.scale.input(zeta, FRICTION),
        },
        SpectralDistribution::Blackbody { coupling, cutoff } => SpectralDistribution::Blackbody {
            coupling: ctx.scale.input(coupling, Dim(1, 0, 1)),
            cutoff: ctx.scale.input(cutoff, FREQUENCY),
        },
        SpectralDistribution::Tabulated(tab) => {
            let grid: Vec<f64> = tab
                .grid()
                .iter()
                .map(|w| ctx.scale.input(*w, FREQUENCY))
                .collect();
            let values: Vec<f64> = tab
                .values()
                .iter()
                .map(|v| ctx.scale.input(*v, FRICTION))
                .collect();
            SpectralDistribution::Tabulated(TabulatedSpectrum::new(grid, values)?)
        }
    })
}

fn scale_pulse(pulse: ForceProfile, ctx: &Ctx) -> ForceProfile {
    let s = &ctx.scale;
    match pulse {
        ForceProfile::Zero => ForceProfile::Zero,
        ForceProfile::SmoothStep { f0, t_on, ramp } => ForceProfile::SmoothStep {
            f0: s.input(f0, FORCE),
            t_on: s.input(t_on, TIME),
            ramp: s.input(ramp, TIME),
        },
        ForceProfile::GaussianPulse { f0, t0, sigma } => ForceProfile::GaussianPulse {
            f0: s.input(f0, FORCE),
            t0: s.input(t0, TIME),
            sigma: s.input(sigma, TIME),
        },
        ForceProfile::Sinusoid { f0, omega, window } => ForceProfile::Sinusoid {
            f0: s.input(f0, FORCE),
            omega: s.input(omega, FREQUENCY),
            window: window.map(|(a, b, r)| {
                (s.input(a, TIME), s.input(b, TIME), s.input(r, TIME))
            }),
        },
        ForceProfile::CapacitorGate {
            f0,
            t_on,
            ramp,
            plateau,
        } => ForceProfile::CapacitorGate {
            f0: s.input(f0, FORCE),
            t_on: s.input(t_on, TIME),
            ramp: s.input(ramp, TIME),
            plateau: s.input(plateau, TIME),
        },
        ForceProfile::Sampled(_) => pulse, // sampled data is taken as internal units
    }
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Bath descriptor: ohmic:zeta=.. | blackbody:coupling=..,cutoff=.. |
    /// tabulated:path=..
    #[arg(long)]
    pub bath: Option<String>,
    /// Upper edge of the frequency grid.
    #[arg(long)]
    pub omega_max: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
}

fn spectrum(args: &SpectrumArgs, ctx: &mut Ctx, emitter: &mut Emitter) -> Result<()> {
    let bath_desc = ctx.resolve_required(&args.bath, "bath")?;
    let omega_max = ctx.resolve(&args.omega_max, "omega_max", 10.0)?;
    let n = ctx.resolve(&args.n, "n", 200)?;
    let bath = scale_bath(parse_bath(&bath_desc)?, ctx)?;
    let omega_max_int = ctx.scale.input(omega_max, FREQUENCY);

    let mut rows = Vec::with_capacity(n);
    let mut grid = Vec::with_capacity(n);
    for i in 0..n {
        let w = omega_max_int * i as f64 / (n - 1).max(1) as f64;
        grid.push(w);
        let mu = bath.mu_tilde_real_axis(w)?;
        rows.push(vec![
            ctx.scale.output(w, FREQUENCY),
            ctx.scale.output(mu.re, FRICTION),
            ctx.scale.output(mu.im, FRICTION),
        ]);
    }
    let path = emitter.emit_series(
        "spectrum.csv",
        &["omega", "Re_mu", "Im_mu_at_omega_plus_i0"],
        &rows,
    )?;

    let report = check_admissibility(&bath, &grid);
    ctx.check("spectrum admissible", report.passed);
    let kernel = memory_kernel_time(&bath).ok();
    emitter.emit_json(
        "spectrum_report.json",
        &json!({
            "min_value": report.min_value,
            "negative_points": report.negative_points,
            "gaps": report.gaps,
            "integrability": report.integrability,
            "passed": report.passed,
            "memory_delta_coefficient": kernel.map(|k| ctx.scale.output(k.delta_coefficient, FRICTION)),
        }),
    )?;
    ctx.say(&format!("wrote {}", path.display()));
    Ok(())
}

#[derive(Args, Debug)]
pub struct ResponseArgs {
    /// fo | al | general
    #[arg(long)]
    pub susceptibility: Option<String>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub spring: Option<f64>,
    #[arg(long)]
    pub tau_e: Option<f64>,
    /// Bare mass for the general kind.
    #[arg(long)]
    pub m_bare: Option<f64>,
    /// Bath descriptor for the general kind.
    #[arg(long)]
    pub bath: Option<String>,
    /// Frequency grid omega_min:omega_max:n.
    #[arg(long)]
    pub omega: Option<String>,
}

fn build_susceptibility(
    kind: &str,
    mass: f64,
    spring: f64,
    tau_e: f64,
    m_bare: f64,
    bath: Option<SpectralDistribution>,
) -> Result<Susceptibility> {
    match kind {
        "fo" => Ok(Susceptibility::FordOConnell {
            mass,
            spring,
            tau_e,
        }),
        "al" => Ok(Susceptibility::AbrahamLorentz { mass, tau_e }),
        "general" => Ok(Susceptibility::General {
            m_bare,
            spring,
            bath: bath.ok_or_else(|| {
                Error::Input("general susceptibility needs --bath".into())
            })?,
        }),
        other => Err(Error::Input(format!(
            "unknown susceptibility kind {other:?} (fo | al | general)"
        ))),
    }
}

fn response(args: &ResponseArgs, ctx: &mut Ctx, emitter: &mut Emitter) -> Result<()> {
    let kind = ctx.resolve(&args.susceptibility, "susceptibility", "fo".to_string())?;
    let mass = ctx.resolve_scaled(&args.mass, "mass", 1.0, MASS)?;
    let spring = ctx.resolve_scaled(&args.spring, "spring", 1.0, SPRING)?;
    let tau_e = ctx.resolve_scaled(&args.tau_e, "tau_e", 1.0, TIME)?;
    let m_bare = ctx.resolve_scaled(&args.m_bare, "m_bare", 0.0, MASS)?;
    let grid_desc = ctx.resolve(&args.omega, "omega", "-10:10:401".to_string())?;
    let bath = match &args.bath {
        Some(_) => {
            let desc = ctx.resolve_required(&args.bath, "bath")?;
            Some(scale_bath(parse_bath(&desc)?, ctx)?)
        }
        None => match ctx.config.get(ctx.section, "bath") {
            Some(desc) => Some(scale_bath(parse_bath(desc)?, ctx)?),
            None => None,
        },
    };
    let susc = build_susceptibility(&kind, mass, spring, tau_e, m_bare, bath)?;

    let (w0, w1, n) = parse_range(&grid_desc)?;
    let n = n.unwrap_or(401);
    // alpha carries units of length/force = T²/M
    let alpha_dim = Dim(2, 0, -1);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let w_ext = w0 + (w1 - w0) * i as f64 / (n - 1).max(1) as f64;
        let w = ctx.scale.input(w_ext, FREQUENCY);
        let a = susc.eval(num_complex::Complex64::new(w, 0.0))?;
        rows.push(vec![
            w_ext,
            ctx.scale.output(a.re, alpha_dim),
            ctx.scale.output(a.im, alpha_dim),
        ]);
    }
    emitter.emit_series("response.csv", &["omega", "Re_alpha", "Im_alpha"], &rows)?;

    let poles: Vec<serde_json::Value> = pole_diagnostics(&susc)?
        .into_iter()
        .map(|p| {
            json!({
                "re": ctx.scale.output(p.position.re, FREQUENCY),
                "im": ctx.scale.output(p.position.im, FREQUENCY),
                "half_plane": match p.half_plane {
                    HalfPlane::Upper => "upper",
                    HalfPlane::Lower => "lower",
                    HalfPlane::RealAxis => "real_axis",
                },
            })
        })
        .collect();
    let any_upper = poles.iter().any(|p| p["half_plane"] == "upper");
    ctx.check("no runaway poles", !any_upper);
    emitter.emit_json("poles.json", &json!({ "poles": poles }))?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct CorrelateArgs {
    /// force-sym | force-comm | position-sym | position-comm
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub bath: Option<String>,
    /// kT in reduced units, or Kelvin under --units cgs.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Evaluate the classical (hbar -> 0) limit.
    #[arg(long)]
    pub classical: bool,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Lag grid t0:t1:n.
    #[arg(long)]
    pub lags: Option<String>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub spring: Option<f64>,
    #[arg(long)]
    pub tau_e: Option<f64>,
}

fn correlate(args: &CorrelateArgs, ctx: &mut Ctx, emitter: &mut Emitter) -> Result<()> {
    let kind = ctx.resolve_required(&args.kind, "kind")?;
    let temperature = ctx.resolve(&args.temperature, "temperature", 0.0)?;
    let kt = ctx.scale.thermal_energy(temperature);
    let hbar_default = ctx.scale.hbar_internal().unwrap_or(1.0);
    let hbar = ctx.resolve(&args.hbar, "hbar", hbar_default)?;
    let classical = args.classical
        || ctx
            .config
            .get(ctx.section, "classical")
            .map(|v| v == "true")
            .unwrap_or(false);
    ctx.echo.insert("classical".into(), classical.to_string());
    let lags_desc = ctx.resolve(&args.lags, "lags", "0.1:10:100".to_string())?;
    let (l0, l1, n_lags) = parse_range(&lags_desc)?;
    let n_lags = n_lags.unwrap_or(100);
    let lags: Vec<f64> = (0..n_lags)
        .map(|i| {
            ctx.scale.input(
                l0 + (l1 - l0) * i as f64 / (n_lags - 1).max(1) as f64,
                TIME,
            )
        })
        .collect();
    let thermal = if classical {
        ThermalState::Classical { kt }
    } else {
        ThermalState::Quantum { hbar, kt }
    };

    let force_corr_dim = Dim(-4, 2, 2);
    let (rows, delta, delta_prime, value_dim): (Vec<(f64, CorrelationValue)>, f64, f64, Dim) =
        match kind.as_str() {
            "force-sym" | "force-comm" => {
                let desc = ctx.resolve_required(&args.bath, "bath")?;
                let bath = scale_bath(parse_bath(&desc)?, ctx)?;
                let eval = |t: f64| -> Result<CorrelationValue> {
                    if kind == "force-sym" {
                        force_autocorrelation(t, &bath, &thermal)
                    } else {
                        force_commutator(t, &bath, hbar)
                    }
                };
                let mut out = Vec::with_capacity(lags.len());
                for &t in &lags {
                    out.push((t, eval(t)?));
                }
                let d = out.first().map(|(_, v)| v.delta_weight).unwrap_or(0.0);
                let dp = out
                    .first()
                    .map(|(_, v)| v.delta_prime_weight)
                    .unwrap_or(0.0);
                (out, d, dp, force_corr_dim)
            }
            "position-sym" | "position-comm" => {
                let mass = ctx.resolve_scaled(&args.mass, "mass", 1.0, MASS)?;
                let spring = ctx.resolve_scaled(&args.spring, "spring", 1.0, SPRING)?;
                let tau_e = ctx.resolve_scaled(&args.tau_e, "tau_e", 1.0, TIME)?;
                let susc = Susceptibility::FordOConnell {
                    mass,
                    spring,
                    tau_e,
                };
                let mut out = Vec::with_capacity(lags.len());
                for &t in &lags {
                    let v = if kind == "position-sym" {
                        position_autocorrelation(t, &susc, &thermal, None)?
                    } else {
                        position_commutator(t, &susc, hbar)?
                    };
                    out.push((t, v));
                }
                (out, 0.0, 0.0, Dim(0, 2, 0))
            }
            other => {
                return Err(Error::Input(format!(
                    "unknown correlation kind {other:?} \
                     (force-sym | force-comm | position-sym | position-comm)"
                )))
            }
        };

    let csv_rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|(t, v)| {
            vec![
                ctx.scale.output(*t, TIME),
                ctx.scale.output(v.smooth, value_dim),
                ctx.scale.output(v.abs_error, value_dim),
            ]
        })
        .collect();
    emitter.emit_series(
        "correlation.csv",
        &["t", "value", "abs_error_estimate"],
        &csv_rows,
    )?;
    emitter.emit_json(
        "correlation_delta_parts.json",
        &json!({
            "kind": kind,
            "delta_weight": ctx.scale.output(delta, Dim(value_dim.0 + 1, value_dim.1, value_dim.2)),
            "delta_prime_weight": ctx.scale.output(delta_prime, Dim(value_dim.0 + 2, value_dim.1, value_dim.2)),
        }),
    )?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct TrajectoryArgs {
    /// al | fo | cutoff
    #[arg(long)]
    pub equation: Option<String>,
    /// Pulse descriptor, e.g. gaussian:f0=1,t0=30,sigma=3
    #[arg(long)]
    pub pulse: Option<String>,
    /// Spring constant K (0 = free particle).
    #[arg(long = "K")]
    pub spring: Option<f64>,
    #[arg(long)]
    pub omega_cutoff: Option<f64>,
    /// Integration span t0:t1.
    #[arg(long)]
    pub tspan: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub tau_e: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub v0: Option<f64>,
    #[arg(long)]
    pub a0: Option<f64>,
    #[arg(long)]
    pub n_out: Option<usize>,
    #[arg(long)]
    pub allow_negative_bare_mass: bool,
}

fn emit_trajectory(traj: &Trajectory, ctx: &Ctx, emitter: &mut Emitter) -> Result<()> {
    let rows: Vec<Vec<f64>> = (0..traj.t.len())
        .map(|i| {
            vec![
                ctx.scale.output(traj.t[i], TIME),
                ctx.scale.output(traj.x[i], LENGTH),
                ctx.scale.output(traj.v[i], VELOCITY),
                ctx.scale.output(traj.a[i], ACCEL),
                ctx.scale.output(traj.f[i], FORCE),
                ctx.scale.output(traj.radiated_power[i], POWER),
            ]
        })
        .collect();
    emitter.emit_series(
        "trajectory.csv",
        &["t", "x", "v", "a", "f", "radiated_power"],
        &rows,
    )?;
    Ok(())
}

fn trajectory(args: &TrajectoryArgs, ctx: &mut Ctx, emitter: &mut Emitter) -> Result<()> {
    let equation = ctx.resolve(&args.equation, "equation", "fo".to_string())?;
    let pulse_desc = ctx.resolve(&args.pulse, "pulse", "zero".to_string())?;
    let pulse = scale_pulse(parse_pulse(&pulse_desc)?, ctx);
    let spring = ctx.resolve_scaled(&args.spring, "K", 0.0, SPRING)?;
    let mass = ctx.resolve_scaled(&args.mass, "mass", 1.0, MASS)?;
    let tau_e = ctx.resolve_scaled(&args.tau_e, "tau_e", 1.0, TIME)?;
    let x0 = ctx.resolve_scaled(&args.x0, "x0", 0.0, LENGTH)?;
    let v0 = ctx.resolve_scaled(&args.v0, "v0", 0.0, VELOCITY)?;
    let a0 = ctx.resolve_scaled(&args.a0, "a0", 0.0, ACCEL)?;
    let tspan_desc = ctx.resolve(&args.tspan, "tspan", "0:100".to_string())?;
    let (t0, t1, _) = parse_range(&tspan_desc)?;
    let t_span = (ctx.scale.input(t0, TIME), ctx.scale.input(t1, TIME));
    let tol = ctx.resolve(&args.tol, "tol", 1e-9)?;
    let n_out = ctx.resolve(&args.n_out, "n_out", 2000)?;
    let allow = args.allow_negative_bare_mass
        || ctx
            .config
            .get(ctx.section, "allow_negative_bare_mass")
            .map(|v| v == "true")
            .unwrap_or(false);
    ctx.echo
        .insert("allow_negative_bare_mass".into(), allow.to_string());
    let opts = IntegrateOptions {
        rel_tol: tol,
        abs_tol: tol * 1e-3,
        n_out,
        ..Default::default()
    };

    let traj = match equation.as_str() {
        "al" => integrate_abraham_lorentz(&pulse, mass, tau_e, x0, v0, a0, t_span, &opts)?,
        "fo" => integrate_fo_oscillator(&pulse, mass, tau_e, spring, x0, v0, t_span, &opts)?,
        "cutoff" => {
            let omega_cutoff = ctx.resolve_required_scaled(&args.omega_cutoff, "omega_cutoff", FREQUENCY)?;
            integrate_finite_cutoff(
                &pulse, mass, tau_e, omega_cutoff, spring, x0, v0, a0, t_span, &opts, allow,
            )?
        }
        other => {
            return Err(Error::Input(format!(
                "unknown equation {other:?} (al | fo | cutoff)"
            )))
        }
    };
    emit_trajectory(&traj, ctx, emitter)?;
    ctx.check("no runaway", !traj.meta.runaway);
    if let Some(t) = traj.meta.truncated_at {
        ctx.say(&format!(
            "runaway detected; trajectory truncated at t = {}",
            ctx.scale.output(t, TIME)
        ));
    }
    emitter.emit_json(
        "trajectory_meta.json",
        &json!({
            "method": traj.meta.method,
            "runaway": traj.meta.runaway,
            "truncated_at": traj.meta.truncated_at.map(|t| ctx.scale.output(t, TIME)),
            "steps_accepted": traj.meta.steps_accepted,
            "steps_rejected": traj.meta.steps_rejected,
        }),
    )?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct RadiateArgs {
    #[arg(long)]
    pub pulse: Option<String>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub tau_e: Option<f64>,
    #[arg(long)]
    pub n_profile: Option<usize>,
}

fn radiate(args: &RadiateArgs, ctx: &mut Ctx, emitter: &mut Emitter) -> Result<()> {
    let pulse_desc = ctx.resolve_required(&args.pulse, "pulse")?;
    let pulse = scale_pulse(parse_pulse(&pulse_desc)?, ctx);
    let mass = ctx.resolve_scaled(&args.mass, "mass", 1.0, MASS)?;
    let tau_e = ctx.resolve_scaled(&args.tau_e, "tau_e", 1.0, TIME)?;
    let n_profile = ctx.resolve(&args.n_profile, "n_profile", 1000)?;

    let r = radiated_energy(&pulse, mass, tau_e, n_profile)?;
    let rows: Vec<Vec<f64>> = r
        .time
        .iter()
        .zip(&r.power)
        .map(|(t, p)| vec![ctx.scale.output(*t, TIME), ctx.scale.output(*p, POWER)])
        .collect();
    emitter.emit_series("radiated_power.csv", &["t", "power"], &rows)?;
    let consistent =
        (r.total_from_profile - r.total).abs() <= 1e-5 * r.total.abs().max(1e-300);
    ctx.check("profile total matches force-squared quadrature", consistent);
    emitter.emit_json(
        "radiated_energy.json",
        &json!({
            "total": ctx.scale.output(r.total, ENERGY),
            "total_from_profile": ctx.scale.output(r.total_from_profile, ENERGY),
        }),
    )?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct RelativisticArgs {
    /// Electric field along x (capacitor plateau value).
    #[arg(long = "E")]
    pub e_field: Option<f64>,
    /// Magnetic field along z (uniform-field mode only).
    #[arg(long = "B")]
    pub b_field: Option<f64>,
    #[arg(long)]
    pub entry_speed: Option<f64>,
    /// Gap length; when present the run is a capacitor scenario.
    #[arg(long)]
    pub gap: Option<f64>,
    /// Edge ramp duration.
    #[arg(long)]
    pub ramp: Option<f64>,
    #[arg(long)]
    pub tspan: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub charge: Option<f64>,
    #[arg(long)]
    pub tau_e: Option<f64>,
    /// Speed of light in the working units.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub n_out: Option<usize>,
}

fn relativistic(args: &RelativisticArgs, ctx: &mut Ctx, emitter: &mut Emitter) -> Result<()> {
    let charge_dim = Dim(-1, 1, 0); // charge enters only multiplied by field; treat q·E as force
    let mass = ctx.resolve_scaled(&args.mass, "mass", 1.0, MASS)?;
    let tau_e = ctx.resolve_scaled(&args.tau_e, "tau_e", 1.0, TIME)?;
    let c_default = match ctx.scale.hbar_internal() {
        Some(_) => ctx.scale.input(ctx.scale.constants.speed_of_light, VELOCITY),
        None => 1.0,
    };
    let c = ctx.resolve(&args.c, "c", c_default)?;
    let charge = ctx.resolve(&args.charge, "charge", 1.0)?;
    let _ = charge_dim;
    let params = RelativisticParams {
        mass,
        charge,
        tau_e,
        speed_of_light: c,
    };
    let tol = ctx.resolve(&args.tol, "tol", 1e-10)?;
    let n_out = ctx.resolve(&args.n_out, "n_out", 2000)?;
    // E is interpreted so that q·E is a force in the working units
    let e_amp = ctx.resolve_scaled(&args.e_field, "E", 0.0, FORCE)?;

    let (traj, report) = if args.gap.is_some() || ctx.config.get(ctx.section, "gap").is_some() {
        let gap = ctx.resolve_required_scaled(&args.gap, "gap", LENGTH)?;
        let entry = ctx.resolve_required_scaled(&args.entry_speed, "entry_speed", VELOCITY)?;
        let ramp = ctx.resolve_scaled(&args.ramp, "ramp", 0.05 * gap / entry, TIME)?;
        let (traj, report) = capacitor_scenario(e_amp, gap, entry, ramp, &params, tol, n_out)?;
        ctx.check("traversed the gap", report.traversed);
        ctx.check(
            "radiation only at entry and exit",
            report.plateau_power_fraction <= 1e-6,
        );
        (
            traj,
            json!({
                "traversed": report.traversed,
                "peak_power": ctx.scale.output(report.peak_power, POWER),
                "plateau_power_fraction": report.plateau_power_fraction,
                "entry_burst": ctx.scale.output(report.entry_burst, ENERGY),
                "exit_burst": ctx.scale.output(report.exit_burst, ENERGY),
                "total_radiated_proxy": ctx.scale.output(report.total_radiated_proxy, ENERGY),
                "radiated_energy_prediction":
                    ctx.scale.output(report.radiated_energy_prediction, ENERGY),
            }),
        )
    } else {
        let tspan_desc = ctx.resolve(&args.tspan, "tspan", "0:10".to_string())?;
        let (t0, t1, _) = parse_range(&tspan_desc)?;
        let b_amp = ctx.resolve_scaled(&args.b_field, "B", 0.0, FORCE)?; // q·(v/c)·B force scale
        let v0 = ctx.resolve_scaled(&args.entry_speed, "entry_speed", 0.0, VELOCITY)?;
        let field = EmField::Uniform {
            e: [e_amp / charge.abs().max(1e-300), 0.0, 0.0],
            b: [0.0, 0.0, b_amp / charge.abs().max(1e-300)],
        };
        let u = FourVelocity::from_velocity([v0, 0.0, 0.0], c)?;
        let traj = integrate_relativistic(
            &field,
            &params,
            u,
            [0.0; 3],
            (ctx.scale.input(t0, TIME), ctx.scale.input(t1, TIME)),
            tol,
            n_out,
        )?;
        (traj, json!({}))
    };

    let shell = traj.max_mass_shell_residual();
    ctx.check("mass shell preserved to 1e-9", shell <= 1e-9);
    let rows: Vec<Vec<f64>> = (0..traj.t.len())
        .map(|i| {
            vec![
                ctx.scale.output(traj.t[i], TIME),
                ctx.scale.output(traj.proper_time[i], TIME),
                ctx.scale.output(traj.position[i][0], LENGTH),
                ctx.scale.output(traj.velocity[i][0], VELOCITY),
                traj.gamma[i],
                traj.mass_shell_residual[i],
                ctx.scale.output(traj.radiated_power_proxy[i], POWER),
            ]
        })
        .collect();
    emitter.emit_series(
        "relativistic.csv",
        &[
            "t",
            "tau",
            "x",
            "v",
            "gamma",
            "mass_shell_residual",
            "radiated_power_proxy",
        ],
        &rows,
    )?;
    let mut report_json = report;
    report_json["max_mass_shell_residual"] = json!(shell);
    emitter.emit_json("relativistic_report.json", &report_json)?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct BrownianArgs {
    #[arg(long)]
    pub n_traj: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Ohmic bath descriptor (ohmic:zeta=..).
    #[arg(long)]
    pub bath: Option<String>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub tspan: Option<String>,
    /// free | harmonic:spring=..
    #[arg(long)]
    pub potential: Option<String>,
    /// Emit the first N member trajectories as CSV.
    #[arg(long)]
    pub emit_members: Option<usize>,
}

fn brownian(args: &BrownianArgs, ctx: &mut Ctx, emitter: &mut Emitter) -> Result<()> {
    let n_traj = ctx.resolve(&args.n_traj, "n_traj", 1000)?;
    let dt = ctx.resolve_scaled(&args.dt, "dt", 0.05, TIME)?;
    let bath_desc = ctx.resolve(&args.bath, "bath", "ohmic:zeta=1".to_string())?;
    let zeta = match scale_bath(parse_bath(&bath_desc)?, ctx)? {
        SpectralDistribution::Ohmic { zeta } => zeta,
        _ => {
            return Err(Error::Unsupported(
                "the classical stochastic branch covers Ohmic baths only".into(),
            ))
        }
    };
    let temperature = ctx.resolve(&args.temperature, "temperature", 1.0)?;
    let kt = ctx.scale.thermal_energy(temperature);
    let mass = ctx.resolve_scaled(&args.mass, "mass", 1.0, MASS)?;
    let tspan_desc = ctx.resolve(&args.tspan, "tspan", "0:50".to_string())?;
    let (t0, t1, _) = parse_range(&tspan_desc)?;
    let potential_desc = ctx.resolve(&args.potential, "potential", "free".to_string())?;
    let potential = match potential_desc.split_once(':') {
        None if potential_desc == "free" => Potential::Free,
        Some(("harmonic", rest)) => {
            let spring: f64 = rest
                .strip_prefix("spring=")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Input("harmonic potential needs spring=<K>".into()))?;
            Potential::Harmonic {
                spring: ctx.scale.input(spring, SPRING),
            }
        }
        _ => {
            return Err(Error::Input(format!(
                "unknown potential {potential_desc:?} (free | harmonic:spring=..)"
            )))
        }
    };
    let emit_members = ctx.resolve(&args.emit_members, "emit_members", 0)?;

    let config = LangevinConfig {
        zeta,
        kt,
        mass,
        potential,
        force: ForceProfile::Zero,
        n_traj,
        t_span: (ctx.scale.input(t0, TIME), ctx.scale.input(t1, TIME)),
        dt,
        seed: ctx.seed,
        store_members: emit_members,
        x0: None,
        v0: None,
    };
    let ensemble = simulate_langevin_ohmic(&config)?;

    let d_dim = Dim(-1, 2, 0);
    let summary = if matches!(potential, Potential::Free) {
        let est = estimate_diffusion(&ensemble)?;
        let expect = kt / zeta;
        ctx.check(
            "Einstein relation within confidence interval",
            (est.d - expect).abs() <= est.ci_half_width.max(0.05 * expect),
        );
        json!({
            "D": ctx.scale.output(est.d, d_dim),
            "ci": ctx.scale.output(est.ci_half_width, d_dim),
            "kT_over_zeta": ctx.scale.output(expect, d_dim),
            "curvature_warning": est.curvature_warning,
            "n_traj": n_traj,
            "seed": ctx.seed,
        })
    } else {
        json!({
            "stationary_v_sq": ctx.scale.output(*ensemble.stats.v_sq.last().unwrap(), Dim(-2, 2, 0)),
            "n_traj": n_traj,
            "seed": ctx.seed,
        })
    };
    emitter.emit_json("brownian_summary.json", &summary)?;

    for (i, member) in ensemble.members.iter().enumerate().take(emit_members) {
        let rows: Vec<Vec<f64>> = ensemble
            .stats
            .t
            .iter()
            .zip(member.x.iter().zip(&member.v))
            .map(|(t, (x, v))| {
                vec![
                    ctx.scale.output(*t, TIME),
                    ctx.scale.output(*x, LENGTH),
                    ctx.scale.output(*v, VELOCITY),
                ]
            })
            .collect();
        emitter.emit_series(&format!("member_{i:04}.csv"), &["t", "x", "v"], &rows)?;
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct MicrobathArgs {
    #[arg(long)]
    pub n_osc: Option<usize>,
    #[arg(long)]
    pub omega_max: Option<f64>,
    #[arg(long)]
    pub bath: Option<String>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub tspan: Option<String>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub v0: Option<f64>,
    /// free | harmonic:spring=..
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long)]
    pub pulse: Option<String>,
}

fn microbath(args: &MicrobathArgs, ctx: &mut Ctx, emitter: &mut Emitter) -> Result<()> {
    let n_osc = ctx.resolve(&args.n_osc, "n_osc", 1000)?;
    let omega_max = ctx.resolve_scaled(&args.omega_max, "omega_max", 50.0, FREQUENCY)?;
    let bath_desc = ctx.resolve(&args.bath, "bath", "ohmic:zeta=1".to_string())?;
    let bath = scale_bath(parse_bath(&bath_desc)?, ctx)?;
    let temperature = ctx.resolve(&args.temperature, "temperature", 1.0)?;
    let kt = ctx.scale.thermal_energy(temperature);
    let mass = ctx.resolve_scaled(&args.mass, "mass", 1.0, MASS)?;
    let tspan_desc = ctx.resolve(&args.tspan, "tspan", "0:20".to_string())?;
    let (t0, t1, _) = parse_range(&tspan_desc)?;
    if t0 != 0.0 {
        return Err(Error::Input("microbath runs start at t = 0".into()));
    }
    let dt = ctx.resolve_scaled(&args.dt, "dt", 1e-3, TIME)?;
    let x0 = ctx.resolve_scaled(&args.x0, "x0", 0.0, LENGTH)?;
    let v0 = ctx.resolve_scaled(&args.v0, "v0", 0.0, VELOCITY)?;
    let potential_desc = ctx.resolve(&args.potential, "potential", "free".to_string())?;
    let potential = match potential_desc.split_once(':') {
        None if potential_desc == "free" => Potential::Free,
        Some(("harmonic", rest)) => {
            let spring: f64 = rest
                .strip_prefix("spring=")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Input("harmonic potential needs spring=<K>".into()))?;
            Potential::Harmonic {
                spring: ctx.scale.input(spring, SPRING),
            }
        }
        _ => {
            return Err(Error::Input(format!(
                "unknown potential {potential_desc:?}"
            )))
        }
    };
    let pulse_desc = ctx.resolve(&args.pulse, "pulse", "zero".to_string())?;
    let pulse = scale_pulse(parse_pulse(&pulse_desc)?, ctx);

    let config = MicrobathConfig {
        n_osc,
        omega_max,
        bath,
        kt,
        particle_mass: mass,
    };
    let run = run_microbath(
        &config,
        potential,
        &pulse,
        x0,
        v0,
        ctx.scale.input(t1, TIME),
        dt,
        ctx.seed,
    )?;

    let rows: Vec<Vec<f64>> = (0..run.t.len())
        .map(|i| {
            vec![
                ctx.scale.output(run.t[i], TIME),
                ctx.scale.output(run.x[i], LENGTH),
                ctx.scale.output(run.v[i], VELOCITY),
                ctx.scale.output(run.energy[i], ENERGY),
            ]
        })
        .collect();
    emitter.emit_series("microbath.csv", &["t", "x", "v", "energy"], &rows)?;
    ctx.check("energy conserved to 1e-6", run.energy_drift <= 1e-6);
    ctx.check(
        "matches the reduced Langevin description to 1e-5",
        run.gle_max_deviation <= 1e-5,
    );
    emitter.emit_json(
        "microbath_report.json",
        &json!({
            "energy_drift": run.energy_drift,
            "gle_max_deviation": run.gle_max_deviation,
            "recurrence_horizon": ctx.scale.output(run.recurrence_horizon, TIME),
            "n_osc": n_osc,
            "seed": ctx.seed,
        }),
    )?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Reduced-scale ensembles (statistical tolerances widened accordingly).
    #[arg(long)]
    pub quick: bool,
}

fn verify(args: &VerifyArgs, ctx: &mut Ctx) -> Result<()> {
    let results = qlrr::verify::run_all(args.quick);
    let mut all_passed = true;
    for r in &results {
        println!("{}", r.summary_line());
        ctx.check(r.name, r.passed);
        all_passed &= r.passed;
    }
    if all_passed {
        println!("all {} criteria passed", results.len());
        Ok(())
    } else {
        Err(Error::Numeric(format!(
            "{} of {} criteria failed",
            results.iter().filter(|r| !r.passed).count(),
            results.len()
        )))
    }
}
