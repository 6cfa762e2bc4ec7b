//! Classical Langevin dynamics with an Ohmic bath: exact Ornstein-Uhlenbeck
//! propagation of the friction/noise part, splitting for the potential
//! force, ensemble statistics, and the Einstein-relation diffusion fit.

use super::derive_seed;
use crate::dynamics::ForceProfile;
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// External potential V(x) entering through V′(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Free,
    Harmonic { spring: f64 },
}

impl Potential {
    pub fn gradient(&self, x: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Harmonic { spring } => spring * x,
        }
    }

    fn frequency(&self, mass: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Harmonic { spring } => (spring / mass).sqrt(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LangevinConfig {
    pub zeta: f64,
    pub kt: f64,
    pub mass: f64,
    pub potential: Potential,
    pub force: ForceProfile,
    pub n_traj: usize,
    pub t_span: (f64, f64),
    pub dt: f64,
    pub seed: u64,
    /// How many member trajectories to retain in full (the statistics always
    /// cover every member).
    pub store_members: usize,
    /// Initial position: fixed value, or None for a thermal draw (harmonic
    /// potential only; free particles start at the origin).
    pub x0: Option<f64>,
    /// Initial velocity: fixed value, or None for a thermal draw.
    pub v0: Option<f64>,
}

impl Default for LangevinConfig {
    fn default() -> Self {
        LangevinConfig {
            zeta: 1.0,
            kt: 1.0,
            mass: 1.0,
            potential: Potential::Free,
            force: ForceProfile::Zero,
            n_traj: 1000,
            t_span: (0.0, 50.0),
            dt: 0.05,
            seed: 0,
            store_members: 16,
            x0: None,
            v0: None,
        }
    }
}

/// One stored member trajectory.
#[derive(Debug, Clone)]
pub struct MemberTrajectory {
    pub seed: u64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

/// Order-insensitive ensemble statistics (accumulated member-by-member in
/// index order with compensated summation).
#[derive(Debug, Clone)]
pub struct EnsembleStats {
    pub t: Vec<f64>,
    /// Lag grid of the mean squared displacement (first half of the run).
    pub msd_lag: Vec<f64>,
    /// ⟨[x(t0+Δ) − x(t0)]²⟩ averaged over members and time origins
    /// (stationary increments).
    pub msd: Vec<f64>,
    /// Per-member-batch MSD curves, for confidence intervals.
    pub msd_batches: Vec<Vec<f64>>,
    /// Mean velocity squared ⟨v(t)²⟩.
    pub v_sq: Vec<f64>,
    /// Velocity autocorrelation ⟨v(t0) v(t0+τ)⟩ time-averaged over the
    /// second half of the run, per lag index.
    pub vacf: Vec<f64>,
    /// Position autocorrelation ⟨x(t0) x(t0+τ)⟩ averaged over the whole
    /// ensemble and a few late time origins, per lag index.
    pub xacf: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub members: Vec<MemberTrajectory>,
    pub stats: EnsembleStats,
    pub n_traj: usize,
    pub seed: u64,
    pub dt: f64,
    pub zeta: f64,
    pub kt: f64,
    pub mass: f64,
}

struct MemberAccum {
    msd: Vec<f64>,
    v_sq: Vec<f64>,
    vacf: Vec<f64>,
    xacf: Vec<f64>,
    stored: Option<MemberTrajectory>,
}

const MSD_ORIGINS: usize = 16;
const MSD_BATCHES: usize = 10;

fn kahan_add(sum: &mut f64, comp: &mut f64, term: f64) {
    let y = term - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

/// Strong propagation of m·ẍ + ζ·ẋ + V′(x) = F(t) + f(t): exact
/// Ornstein-Uhlenbeck step for the (friction, noise) pair, symmetric
/// splitting for the potential and applied force. Stationary velocity
/// variance is kT/m exactly at any dt for the free particle.
pub fn simulate_langevin_ohmic(config: &LangevinConfig) -> Result<Ensemble> {
    let LangevinConfig {
        zeta,
        kt,
        mass,
        potential,
        ref force,
        n_traj,
        t_span,
        dt,
        seed,
        store_members,
        x0,
        v0,
    } = *config;
    if !(zeta > 0.0 && mass > 0.0 && kt >= 0.0) {
        return Err(Error::domain("simulate_langevin_ohmic requires zeta > 0, m > 0, kT >= 0"));
    }
    if !(dt > 0.0 && t_span.1 > t_span.0) {
        return Err(Error::domain("bad time span or step"));
    }
    let rate = (zeta / mass).max(potential.frequency(mass));
    if dt * rate > 0.5 {
        return Err(Error::Numeric(format!(
            "dt = {dt:e} too large against the fastest rate {rate:e} (need dt·rate <= 0.5)"
        )));
    }
    force.validate()?;

    let n_steps = ((t_span.1 - t_span.0) / dt).round() as usize;
    let n_samples = n_steps + 1;
    let c1 = (-zeta * dt / mass).exp();
    let c2 = (kt / mass * (1.0 - c1 * c1)).max(0.0).sqrt();

    let max_lag = (n_samples / 4).min(2500);

    let accums: Vec<MemberAccum> = (0..n_traj)
        .into_par_iter()
        .map(|idx| {
            let member_seed = derive_seed(seed, "langevin", idx as u64);
            let mut rng = ChaCha12Rng::seed_from_u64(member_seed);
            let mut x = match (x0, potential) {
                (Some(x), _) => x,
                (None, Potential::Harmonic { spring }) => {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    (kt / spring).sqrt() * g
                }
                (None, Potential::Free) => 0.0,
            };
            let mut v = match v0 {
                Some(v) => v,
                None => {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    (kt / mass).sqrt() * g
                }
            };
            let mut xs = Vec::with_capacity(n_samples);
            let mut vs = Vec::with_capacity(n_samples);
            xs.push(x);
            vs.push(v);
            let mut t = t_span.0;
            for _ in 0..n_steps {
                // B A O A B
                v += 0.5 * dt * (force.value(t) - potential.gradient(x)) / mass;
                x += 0.5 * dt * v;
                let g: f64 = StandardNormal.sample(&mut rng);
                v = c1 * v + c2 * g;
                x += 0.5 * dt * v;
                t += dt;
                v += 0.5 * dt * (force.value(t) - potential.gradient(x)) / mass;
                xs.push(x);
                vs.push(v);
            }
            // origin-averaged squared increments over the first-half lags
            let n_half = n_samples / 2;
            let stride = ((n_samples - n_half) / MSD_ORIGINS).max(1);
            let mut msd = vec![0.0; n_half];
            let mut origins = 0usize;
            let mut o = 0usize;
            while o + n_half <= n_samples && origins < MSD_ORIGINS {
                for (d, out) in msd.iter_mut().enumerate() {
                    let dx = xs[o + d] - xs[o];
                    *out += dx * dx;
                }
                origins += 1;
                o += stride;
            }
            for v in &mut msd {
                *v /= origins as f64;
            }
            let v_sq: Vec<f64> = vs.iter().map(|vi| vi * vi).collect();
            // time-averaged velocity ACF over the second half (stationary)
            let start = n_samples / 2;
            let mut vacf = vec![0.0; max_lag];
            for (lag, out) in vacf.iter_mut().enumerate() {
                let mut acc = 0.0;
                let mut count = 0usize;
                let mut i = start;
                while i + lag < n_samples {
                    acc += vs[i] * vs[i + lag];
                    count += 1;
                    i += 1;
                }
                *out = if count > 0 { acc / count as f64 } else { 0.0 };
            }
            // position ACF from four late time origins (ensemble statistics
            // carry the averaging; origins only reduce the variance)
            let mut xacf = vec![0.0; max_lag];
            let origins: Vec<usize> = (0..4)
                .map(|k| start + k * (n_samples - start - max_lag).max(1) / 4)
                .filter(|o| o + max_lag <= n_samples)
                .collect();
            if !origins.is_empty() {
                for (lag, out) in xacf.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for &o in &origins {
                        acc += xs[o] * xs[o + lag];
                    }
                    *out = acc / origins.len() as f64;
                }
            }
            MemberAccum {
                msd,
                v_sq,
                vacf,
                xacf,
                stored: (idx < store_members).then(|| MemberTrajectory {
                    seed: member_seed,
                    x: xs,
                    v: vs,
                }),
            }
        })
        .collect();

    // order-fixed compensated aggregation, with member batches for CIs
    let n_half = n_samples / 2;
    let mut msd = vec![0.0; n_half];
    let mut msd_c = vec![0.0; n_half];
    let mut batches = vec![vec![0.0; n_half]; MSD_BATCHES];
    let mut batch_counts = vec![0usize; MSD_BATCHES];
    let mut v_sq = vec![0.0; n_samples];
    let mut v_sq_c = vec![0.0; n_samples];
    let mut vacf = vec![0.0; max_lag];
    let mut vacf_c = vec![0.0; max_lag];
    let mut xacf = vec![0.0; max_lag];
    let mut xacf_c = vec![0.0; max_lag];
    let mut members = Vec::new();
    for (idx, acc) in accums.into_iter().enumerate() {
        let b = idx * MSD_BATCHES / n_traj.max(1);
        batch_counts[b] += 1;
        for i in 0..n_half {
            kahan_add(&mut msd[i], &mut msd_c[i], acc.msd[i]);
            batches[b][i] += acc.msd[i];
        }
        for i in 0..n_samples {
            kahan_add(&mut v_sq[i], &mut v_sq_c[i], acc.v_sq[i]);
        }
        for i in 0..max_lag {
            kahan_add(&mut vacf[i], &mut vacf_c[i], acc.vacf[i]);
            kahan_add(&mut xacf[i], &mut xacf_c[i], acc.xacf[i]);
        }
        if let Some(m) = acc.stored {
            members.push(m);
        }
    }
    let inv = 1.0 / n_traj as f64;
    for v in msd
        .iter_mut()
        .chain(v_sq.iter_mut())
        .chain(vacf.iter_mut())
        .chain(xacf.iter_mut())
    {
        *v *= inv;
    }
    for (b, batch) in batches.iter_mut().enumerate() {
        if batch_counts[b] > 0 {
            for v in batch.iter_mut() {
                *v /= batch_counts[b] as f64;
            }
        }
    }
    let t: Vec<f64> = (0..n_samples).map(|i| t_span.0 + i as f64 * dt).collect();
    let msd_lag: Vec<f64> = (0..n_half).map(|i| i as f64 * dt).collect();

    Ok(Ensemble {
        members,
        stats: EnsembleStats {
            t,
            msd_lag,
            msd,
            msd_batches: batches,
            v_sq,
            vacf,
            xacf,
        },
        n_traj,
        seed,
        dt,
        zeta,
        kt,
        mass,
    })
}

/// Diffusion constant from the late-time MSD slope, with a batch confidence
/// interval.
#[derive(Debug, Clone, Copy)]
pub struct DiffusionEstimate {
    pub d: f64,
    /// 95% confidence half-width from member batches.
    pub ci_half_width: f64,
    /// Set when the slope was still curving and the fit window was moved
    /// later.
    pub curvature_warning: bool,
    pub fit_window: (f64, f64),
}

fn slope(t: &[f64], y: &[f64], lo: usize, hi: usize) -> f64 {
    let n = (hi - lo) as f64;
    let sx: f64 = t[lo..hi].iter().sum();
    let sy: f64 = y[lo..hi].iter().sum();
    let sxx: f64 = t[lo..hi].iter().map(|a| a * a).sum();
    let sxy: f64 = t[lo..hi].iter().zip(&y[lo..hi]).map(|(a, b)| a * b).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Fit D = lim ṡ(t)/2 from a free-particle ensemble. Requires the run to
/// extend well past the momentum relaxation time m/ζ.
pub fn estimate_diffusion(ensemble: &Ensemble) -> Result<DiffusionEstimate> {
    let stats = &ensemble.stats;
    let n = stats.msd_lag.len();
    if n < 32 {
        return Err(Error::domain("ensemble too short for a diffusion fit"));
    }
    let t_relax = ensemble.mass / ensemble.zeta;
    let t_total = stats.t.last().unwrap() - stats.t[0];
    if t_total < 10.0 * t_relax {
        return Err(Error::Domain(format!(
            "run length {t_total:e} shorter than 10 relaxation times {:e}",
            10.0 * t_relax
        )));
    }

    // compare slope over [0.25, 0.5] of the lag range against [0.5, 1.0];
    // if they disagree beyond 10%, warn and fit the later window only
    let q2 = n / 4;
    let q3 = n / 2;
    let early = slope(&stats.msd_lag, &stats.msd, q2, q3);
    let late = slope(&stats.msd_lag, &stats.msd, q3, n);
    let curvature_warning = (early - late).abs() > 0.1 * late.abs().max(1e-300);

    let d = late / 2.0;

    // member batches are statistically independent
    let batch_d: Vec<f64> = stats
        .msd_batches
        .iter()
        .filter(|b| b.iter().any(|v| *v != 0.0))
        .map(|b| slope(&stats.msd_lag, b, q3, n) / 2.0)
        .collect();
    let nb = batch_d.len() as f64;
    let mean: f64 = batch_d.iter().sum::<f64>() / nb;
    let var: f64 =
        batch_d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nb - 1.0).max(1.0);
    let ci_half_width = 2.26 * (var / nb).sqrt(); // t-dist, ~9 dof, 95%

    Ok(DiffusionEstimate {
        d,
        ci_half_width,
        curvature_warning,
        fit_window: (stats.msd_lag[q3], stats.msd_lag[n - 1]),
    })
}
