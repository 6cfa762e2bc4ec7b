//! Fluctuation-dissipation correlation functions: the coth-kernel
//! oscillatory quadratures for force/position autocorrelations and
//! commutators, their closed forms, and the regularized equal-time
//! position-velocity commutator.
//!
//! Distributional content (delta and delta-prime terms produced by flat
//! spectral tails) is always reported in separate fields, never folded into
//! smooth values.

use crate::bath::SpectralDistribution;
use crate::error::{Error, Result};
use crate::quad::{self, Trig};
use crate::response::{pole_diagnostics, HalfPlane, Susceptibility};
use crate::units::oscillator_derived;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Thermal occupation model entering the fluctuation kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermalState {
    /// Full quantum kernel ħω coth(ħω/2kT); kt = 0 keeps the zero-point
    /// fluctuations (coth → 1).
    Quantum { hbar: f64, kt: f64 },
    /// Classical limit ħ → 0: coth is replaced by 2kT/ħω.
    Classical { kt: f64 },
}

impl ThermalState {
    pub fn kt(&self) -> f64 {
        match self {
            ThermalState::Quantum { kt, .. } | ThermalState::Classical { kt } => *kt,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            ThermalState::Quantum { hbar, kt } => *hbar > 0.0 && *kt >= 0.0,
            ThermalState::Classical { kt } => *kt >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("thermal state requires hbar > 0 and kT >= 0"))
        }
    }

    /// Spectral weight of the symmetric force correlation:
    /// ħω coth(ħω/2kT) (quantum) or 2kT (classical). The ω → 0 limit 2kT is
    /// built in analytically.
    fn force_weight(&self, omega: f64) -> f64 {
        match self {
            ThermalState::Quantum { hbar, kt } => {
                if *kt == 0.0 {
                    hbar * omega
                } else {
                    2.0 * kt * x_coth_x(hbar * omega / (2.0 * kt))
                }
            }
            ThermalState::Classical { kt } => 2.0 * kt,
        }
    }

    /// Weight of the symmetric position correlation: ħ coth(ħω/2kT)
    /// (quantum) or 2kT/ω (classical).
    fn position_weight(&self, omega: f64) -> f64 {
        match self {
            ThermalState::Quantum { hbar, kt } => {
                if *kt == 0.0 {
                    *hbar
                } else {
                    self.force_weight(omega) / omega
                }
            }
            ThermalState::Classical { kt } => 2.0 * kt / omega,
        }
    }

    /// Frequency scale beyond which the thermal weight has settled onto its
    /// high-frequency asymptote.
    fn settle_scale(&self) -> f64 {
        match self {
            ThermalState::Quantum { hbar, kt } => {
                if *kt == 0.0 {
                    0.0
                } else {
                    8.0 * kt / hbar
                }
            }
            ThermalState::Classical { .. } => 0.0,
        }
    }
}

/// x·coth(x), stable for all x ≥ 0 (→ 1 as x → 0, → x as x → ∞).
fn x_coth_x(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let e = (2.0 * x).exp_m1();
    if e.is_infinite() {
        x
    } else {
        x + 2.0 * x / e
    }
}

/// One correlation value: the smooth part at the requested lag plus the
/// distributional weights carried by flat spectral tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationValue {
    pub smooth: f64,
    /// Coefficient of δ(dt).
    pub delta_weight: f64,
    /// Coefficient of δ′(dt).
    pub delta_prime_weight: f64,
    pub abs_error: f64,
}

/// Symmetric force autocorrelation
/// (1/π)∫₀^∞ Re μ̃(ω) · w(ω) · cos(ω dt) dω with w the thermal force weight.
///
/// The flat spectral tail is split off analytically: its thermal-saturation
/// part regularizes to −Re μ̃(∞)·ħ/(π dt²) and its delta content is returned
/// in `delta_weight` = 2kT·Re μ̃(∞).
pub fn force_autocorrelation(
    dt: f64,
    spectral: &SpectralDistribution,
    thermal: &ThermalState,
) -> Result<CorrelationValue> {
    thermal.validate()?;
    let flat = spectral.flat_limit()?;
    let delta_weight = 2.0 * thermal.kt() * flat;
    let t = dt.abs();
    let settle = spectral.scale().max(thermal.settle_scale()).max(1e-12);

    let mut smooth = 0.0;
    let mut abs_error = 0.0;

    // (a) flat tail × thermal weight
    match *thermal {
        ThermalState::Quantum { hbar, kt } => {
            if flat != 0.0 {
                if t == 0.0 {
                    return Err(Error::domain(
                        "quantum force autocorrelation diverges at dt = 0 for a flat spectral \
                         tail; evaluate at dt != 0 (the delta part is reported separately)",
                    ));
                }
                // ħω part: Abel-regularized ∫₀^∞ ω cos(ωt) dω = −1/t²
                smooth += -flat * hbar / (t * t) / PI;
                // Bose part decays exponentially
                if kt > 0.0 {
                    let bose = move |w: f64| {
                        let e = (hbar * w / kt).exp_m1();
                        if e.is_infinite() {
                            0.0
                        } else {
                            flat * hbar * w * 2.0 / e
                        }
                    };
                    let r = quad::fourier_semi_infinite(&bose, Trig::Cos, t, settle, 1e-10)?;
                    smooth += r.value / PI;
                    abs_error += r.abs_error / PI;
                }
            }
        }
        ThermalState::Classical { .. } => {
            // flat × 2kT regularizes to pure delta; nothing smooth
        }
    }

    // (b) decaying remainder of the spectrum × full thermal weight
    let rem = |w: f64| (spectral.value(w) - flat) * thermal.force_weight(w);
    let needs_rem = match spectral {
        SpectralDistribution::Ohmic { .. } => false,
        _ => true,
    };
    if needs_rem {
        let r = if t == 0.0 {
            quad::adaptive_to_infinity(&rem, 0.0, 1e-10, 0.0)?
        } else {
            quad::fourier_semi_infinite(&rem, Trig::Cos, t, settle, 1e-10)?
        };
        smooth += r.value / PI;
        abs_error += r.abs_error / PI;
    }

    Ok(CorrelationValue {
        smooth,
        delta_weight,
        delta_prime_weight: 0.0,
        abs_error,
    })
}

/// Magnitude of the non-equal-time force commutator,
/// (2/π)∫₀^∞ Re μ̃(ω) ħω sin(ω dt) dω, odd in dt and independent of
/// temperature. The flat spectral tail carries a pure δ′(dt) term of weight
/// −2ħ·Re μ̃(∞), returned separately; the smooth value is the regularized
/// finite part.
pub fn force_commutator(
    dt: f64,
    spectral: &SpectralDistribution,
    hbar: f64,
) -> Result<CorrelationValue> {
    if !(hbar > 0.0) {
        return Err(Error::domain("force_commutator requires hbar > 0"));
    }
    let flat = spectral.flat_limit()?;
    let delta_prime_weight = -2.0 * hbar * flat;
    let t = dt.abs();
    if t == 0.0 {
        return Ok(CorrelationValue {
            smooth: 0.0,
            delta_weight: 0.0,
            delta_prime_weight,
            abs_error: 0.0,
        });
    }
    // the flat·ħω·sin part Abel-regularizes to zero; only the decaying
    // remainder contributes a smooth value
    let rem = |w: f64| (spectral.value(w) - flat) * hbar * w;
    let needs_rem = !matches!(spectral, SpectralDistribution::Ohmic { .. });
    let (mut smooth, abs_error) = if needs_rem {
        let r = quad::fourier_semi_infinite(&rem, Trig::Sin, t, spectral.scale(), 1e-10)?;
        (2.0 * r.value / PI, 2.0 * r.abs_error / PI)
    } else {
        (0.0, 0.0)
    };
    if dt < 0.0 {
        smooth = -smooth;
    }
    Ok(CorrelationValue {
        smooth,
        delta_weight: 0.0,
        delta_prime_weight,
        abs_error,
    })
}

fn spring_of(susceptibility: &Susceptibility) -> f64 {
    match susceptibility {
        Susceptibility::General { spring, .. }
        | Susceptibility::FordOConnell { spring, .. } => *spring,
        Susceptibility::AbrahamLorentz { .. } => 0.0,
    }
}

/// Segment boundaries that isolate the resonance peak of a bound response
/// so adaptive panels resolve it even when the quality factor is extreme.
fn resonance_segments(susceptibility: &Susceptibility, w_max: f64) -> Vec<f64> {
    let mut cuts = vec![0.0];
    if let Ok(poles) = pole_diagnostics(susceptibility) {
        for p in &poles {
            if p.position.re > 0.0 && p.half_plane == HalfPlane::Lower {
                let w1 = p.position.re;
                let width = (-p.position.im).max(1e-300);
                for c in [
                    w1 - 2000.0 * width,
                    w1 - 50.0 * width,
                    w1 + 50.0 * width,
                    w1 + 2000.0 * width,
                    8.0 * w1,
                ] {
                    if c > 0.0 && c < w_max {
                        cuts.push(c);
                    }
                }
            }
        }
    }
    cuts.push(w_max);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    cuts
}

/// ∫₀^{w_max} g(ω) dω with resonance-aware splitting and a log-mapped upper
/// range (handles cutoffs many decades above the resonance).
fn integrate_resonant<F: Fn(f64) -> f64>(
    g: &F,
    susceptibility: &Susceptibility,
    w_max: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let cuts = resonance_segments(susceptibility, w_max);
    let mut total = 0.0;
    let mut err = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let r = if a > 0.0 && b / a > 50.0 {
            // log substitution ω = e^u
            let h = |u: f64| {
                let w = u.exp();
                g(w) * w
            };
            quad::adaptive(&h, a.ln(), b.ln(), rel_tol, 0.0, 4000)?
        } else {
            quad::adaptive(g, a, b, rel_tol, 0.0, 4000)?
        };
        total += r.value;
        err += r.abs_error;
    }
    Ok((total, err))
}

/// Symmetric position autocorrelation
/// (ħ/π)∫₀^∞ Im α(ω) coth(ħω/2kT) cos(ω dt) dω (quantum) or its classical
/// limit. A bound particle (K > 0) is required; the quantum equal-time value
/// additionally needs a frequency `cutoff` because the integral is
/// logarithmically ultraviolet divergent.
pub fn position_autocorrelation(
    dt: f64,
    susceptibility: &Susceptibility,
    thermal: &ThermalState,
    cutoff: Option<f64>,
) -> Result<CorrelationValue> {
    thermal.validate()?;
    if spring_of(susceptibility) <= 0.0 {
        return Err(Error::Domain(
            "position autocorrelation of an unbound particle (K = 0) is infrared divergent; \
             use the mean-square-displacement / diffusion operations instead"
                .into(),
        ));
    }
    let t = dt.abs();
    let g = |w: f64| {
        susceptibility.im_real_axis(w).unwrap_or(0.0) * thermal.position_weight(w)
    };

    let (value, abs_error) = if t == 0.0 {
        match (thermal, cutoff) {
            (ThermalState::Quantum { .. }, None) => {
                return Err(Error::Domain(
                    "quantum position autocorrelation at dt = 0 is logarithmically divergent; \
                     supply a frequency cutoff"
                        .into(),
                ));
            }
            (_, Some(wc)) => integrate_resonant(&g, susceptibility, wc, 1e-9)?,
            (ThermalState::Classical { .. }, None) => {
                // absolutely convergent: split resonance, then mapped tail
                let scale = resonance_scale(susceptibility);
                let (head, e1) = integrate_resonant(&g, susceptibility, 50.0 * scale, 1e-9)?;
                let tail = quad::adaptive_to_infinity(&g, 50.0 * scale, 1e-9, 0.0)?;
                (head + tail.value, e1 + tail.abs_error)
            }
        }
    } else {
        let settle = resonance_scale(susceptibility).max(thermal.settle_scale());
        let r = quad::fourier_semi_infinite(&g, Trig::Cos, t, settle, 1e-9)?;
        (r.value, r.abs_error)
    };

    Ok(CorrelationValue {
        smooth: value / PI,
        delta_weight: 0.0,
        delta_prime_weight: 0.0,
        abs_error: abs_error / PI,
    })
}

fn resonance_scale(susceptibility: &Susceptibility) -> f64 {
    if let Ok(poles) = pole_diagnostics(susceptibility) {
        let m = poles
            .iter()
            .map(|p| p.position.norm())
            .fold(0.0f64, f64::max);
        if m > 0.0 {
            return m;
        }
    }
    1.0
}

/// Position commutator magnitude (2ħ/π)∫₀^∞ Im α(ω) sin(ω dt) dω, odd in dt.
pub fn position_commutator(
    dt: f64,
    susceptibility: &Susceptibility,
    hbar: f64,
) -> Result<CorrelationValue> {
    if !(hbar > 0.0) {
        return Err(Error::domain("position_commutator requires hbar > 0"));
    }
    if spring_of(susceptibility) <= 0.0 {
        return Err(Error::Domain(
            "position commutator of an unbound particle (K = 0) is infrared divergent".into(),
        ));
    }
    let t = dt.abs();
    if t == 0.0 {
        return Ok(CorrelationValue {
            smooth: 0.0,
            delta_weight: 0.0,
            delta_prime_weight: 0.0,
            abs_error: 0.0,
        });
    }
    let g = |w: f64| susceptibility.im_real_axis(w).unwrap_or(0.0);
    let settle = resonance_scale(susceptibility);
    let r = quad::fourier_semi_infinite(&g, Trig::Sin, t, settle, 1e-9)?;
    let mut smooth = 2.0 * hbar * r.value / PI;
    if dt < 0.0 {
        smooth = -smooth;
    }
    Ok(CorrelationValue {
        smooth,
        delta_weight: 0.0,
        delta_prime_weight: 0.0,
        abs_error: 2.0 * hbar * r.abs_error / PI,
    })
}

/// Magnitude of the equal-time position-velocity commutator, evaluated as the
/// one-sided limit of d/d(dt) of the position commutator:
///
///   (2ħ/π) ∫₀^∞ [ω Im α(ω) − c∞] e^{−ηω} dω,  extrapolated η → 0,
///
/// with c∞ = lim ω·Im α the tail coefficient whose sgn(dt)-jump content is
/// excluded from the one-sided derivative. For the second-order response the
/// result is (ħ/M)(1 − γτe).
pub fn equal_time_xv_commutator(
    susceptibility: &Susceptibility,
    hbar: f64,
) -> Result<f64> {
    if !(hbar > 0.0) {
        return Err(Error::domain("equal_time_xv_commutator requires hbar > 0"));
    }
    if spring_of(susceptibility) <= 0.0 {
        return Err(Error::domain(
            "equal_time_xv_commutator requires a bound particle (K > 0)",
        ));
    }
    let c_inf = susceptibility.tail_coefficient()?;
    let scale = resonance_scale(susceptibility);
    let g = |w: f64| w * susceptibility.im_real_axis(w).unwrap_or(0.0) - c_inf;

    let d_sub = |eta: f64| -> Result<f64> {
        let damped = |w: f64| g(w) * (-eta * w).exp();
        let (head, _) = integrate_resonant(&damped, susceptibility, 40.0 * scale, 1e-10)?;
        let tail = quad::adaptive_to_infinity(&damped, 40.0 * scale, 1e-10, 0.0)?;
        Ok(2.0 * hbar / PI * (head + tail.value))
    };

    // The subtracted integrand still has a 1/ω² tail reaching far above the
    // resonance, so the damping must start weak: the η error scales like
    // η·|ln η| times the tail coefficient.
    let etas: Vec<f64> = (0..7).map(|k| 0.002 / scale / 2f64.powi(k)).collect();
    let mut values = Vec::with_capacity(etas.len());
    for &eta in &etas {
        values.push(d_sub(eta)?);
    }
    let (value, err) = quad::extrapolate_to_zero(&etas, &values)?;
    if err > 5e-3 * value.abs().max(1e-300) {
        return Err(Error::Numeric(format!(
            "eta extrapolation of the equal-time commutator did not converge: \
             eta sequence {etas:?}, values {values:?}, residual {err:e}"
        )));
    }
    Ok(value.abs())
}

/// Classical-limit position autocorrelation of the damped oscillator:
/// (kT/K) e^{−γ|t|/2} [cos(ω₁ t) − (γ/2ω₁) sin(ω₁ |t|)].
pub fn classical_oscillator_autocorr(
    t: f64,
    spring: f64,
    mass: f64,
    tau_e: f64,
    kt: f64,
) -> Result<f64> {
    if !(spring > 0.0) {
        return Err(Error::domain("classical_oscillator_autocorr requires K > 0"));
    }
    if !(kt >= 0.0) {
        return Err(Error::domain("classical_oscillator_autocorr requires kT >= 0"));
    }
    let osc = oscillator_derived(spring, mass, tau_e)?;
    if osc.overdamped {
        return Err(Error::Unsupported(
            "closed-form oscillator autocorrelation covers the underdamped case only \
             (omega0 tau_e < 2)"
                .into(),
        ));
    }
    let at = t.abs();
    Ok(kt / spring
        * (-0.5 * osc.gamma * at).exp()
        * ((osc.omega1 * t).cos() - 0.5 * osc.gamma / osc.omega1 * (osc.omega1 * at).sin()))
}

/// Zero-temperature mean-square displacement of the bound charge.
#[derive(Debug, Clone, Copy)]
pub struct MsdZeroTemperature {
    /// Leading-log closed form (ħ/2Mω₀)(1 + (2ω₀τe/π) ln(Mc²/ħω₀)).
    pub closed_form: f64,
    /// Direct cutoff integral (ħ/π)∫₀^{ω_c} Im α(ω) dω.
    pub direct_integral: f64,
    /// Ground-state width ħ/(2Mω₀) without the radiative correction.
    pub leading: f64,
    /// Set when ω₀τe > 0.1, where the leading-log form degrades.
    pub leading_log_warning: bool,
}

/// Evaluate the zero-temperature MSD both ways. `cutoff_factor` scales the
/// O(1) ambiguity of the relativistic cutoff ω_c = factor·Mc²/ħ used by the
/// direct integral (default 1; the closed form is left untouched).
pub fn msd_zero_temperature(
    omega0: f64,
    tau_e: f64,
    mass: f64,
    c: f64,
    hbar: f64,
    cutoff_factor: f64,
) -> Result<MsdZeroTemperature> {
    if !(omega0 > 0.0 && tau_e >= 0.0 && mass > 0.0 && c > 0.0 && hbar > 0.0 && cutoff_factor > 0.0)
    {
        return Err(Error::domain(
            "msd_zero_temperature requires positive omega0, mass, c, hbar, cutoff_factor",
        ));
    }
    let leading = hbar / (2.0 * mass * omega0);
    let log_arg = mass * c * c / (hbar * omega0);
    if log_arg <= 1.0 {
        return Err(Error::domain(
            "msd_zero_temperature requires the cutoff Mc²/ħ to exceed omega0",
        ));
    }
    let closed_form = leading * (1.0 + 2.0 * omega0 * tau_e / PI * log_arg.ln());

    let spring = mass * omega0 * omega0;
    let w_c = cutoff_factor * mass * c * c / hbar;
    let direct_integral = if tau_e == 0.0 {
        // Im α degenerates to (π/2Mω₀)δ(ω−ω₀); take the residue value
        leading
    } else {
        let susc = Susceptibility::FordOConnell {
            mass,
            spring,
            tau_e,
        };
        let g = |w: f64| susc.im_real_axis(w).unwrap_or(0.0);
        let (integral, _) = integrate_resonant(&g, &susc, w_c, 1e-9)?;
        hbar / PI * integral
    };

    Ok(MsdZeroTemperature {
        closed_form,
        direct_integral,
        leading,
        leading_log_warning: omega0 * tau_e > 0.1,
    })
}

/// Which correlation a curve holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    ForceSymmetric,
    ForceCommutator,
    PositionSymmetric,
    PositionCommutator,
}

/// A correlation function sampled on a lag grid, with the distributional
/// weights shared by all lags.
#[derive(Debug, Clone)]
pub struct CorrelationFunction {
    pub kind: CorrelationKind,
    pub lags: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub delta_weight: f64,
    pub delta_prime_weight: f64,
}

/// Evaluate a correlation over a lag grid, lag-parallel. Results are
/// bitwise identical to a serial evaluation (each lag is independent and the
/// output order is fixed by the input order).
pub fn correlation_curve<F>(
    kind: CorrelationKind,
    lags: &[f64],
    eval: F,
) -> Result<CorrelationFunction>
where
    F: Fn(f64) -> Result<CorrelationValue> + Sync,
{
    let results: Result<Vec<CorrelationValue>> =
        lags.par_iter().map(|&t| eval(t)).collect();
    let results = results?;
    let delta_weight = results.first().map_or(0.0, |v| v.delta_weight);
    let delta_prime_weight = results.first().map_or(0.0, |v| v.delta_prime_weight);
    Ok(CorrelationFunction {
        kind,
        lags: lags.to_vec(),
        values: results.iter().map(|v| v.smooth).collect(),
        errors: results.iter().map(|v| v.abs_error).collect(),
        delta_weight,
        delta_prime_weight,
    })
}

/// Closed-form smooth part of the Ohmic quantum force autocorrelation,
/// −kTζ·Ω_T/sinh²(Ω_T dt) with Ω_T = πkT/ħ. Used as the oracle for the
/// quadrature path.
pub fn ohmic_force_autocorr_closed(dt: f64, zeta: f64, kt: f64, hbar: f64) -> f64 {
    let omega_t = PI * kt / hbar;
    let s = (omega_t * dt).sinh();
    -kt * zeta * omega_t / (s * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ohmic(zeta: f64) -> SpectralDistribution {
        SpectralDistribution::Ohmic { zeta }
    }

    #[test]
    fn ohmic_fdt_matches_closed_form() {
        // quadrature vs −kTζ Ω_T/sinh²(Ω_T dt) on Ω_T·dt ∈ [0.1, 5]
        let (zeta, kt, hbar) = (0.8, 1.3, 1.0);
        let omega_t = PI * kt / hbar;
        let thermal = ThermalState::Quantum { hbar, kt };
        let bath = ohmic(zeta);
        for i in 0..=20 {
            let x = 0.1 + (5.0 - 0.1) * i as f64 / 20.0;
            let dt = x / omega_t;
            let got = force_autocorrelation(dt, &bath, &thermal).unwrap();
            let expect = ohmic_force_autocorr_closed(dt, zeta, kt, hbar);
            assert_relative_eq!(got.smooth, expect, max_relative = 1e-5);
            assert_relative_eq!(got.delta_weight, 2.0 * kt * zeta);
        }
    }

    #[test]
    fn ohmic_zero_temperature_tail() {
        // T → 0: smooth part → −ζħ/(π dt²)
        let (zeta, hbar) = (0.5, 1.0);
        let thermal = ThermalState::Quantum { hbar, kt: 0.0 };
        let bath = ohmic(zeta);
        for &dt in &[0.3, 1.0, 4.0] {
            let got = force_autocorrelation(dt, &bath, &thermal).unwrap();
            assert_relative_eq!(
                got.smooth,
                -zeta * hbar / (PI * dt * dt),
                max_relative = 1e-10
            );
            assert_eq!(got.delta_weight, 0.0);
        }
    }

    #[test]
    fn ohmic_classical_is_pure_delta() {
        let (zeta, kt) = (0.7, 2.0);
        let thermal = ThermalState::Classical { kt };
        let bath = ohmic(zeta);
        for &dt in &[0.0, 0.5, 3.0] {
            let got = force_autocorrelation(dt, &bath, &thermal).unwrap();
            assert_eq!(got.smooth, 0.0);
            assert_relative_eq!(got.delta_weight, 2.0 * kt * zeta);
        }
    }

    #[test]
    fn blackbody_autocorr_even_in_dt() {
        let bath = SpectralDistribution::Blackbody {
            coupling: 1.0,
            cutoff: 1.0,
        };
        let thermal = ThermalState::Quantum { hbar: 1.0, kt: 0.5 };
        for &dt in &[0.4, 1.7] {
            let plus = force_autocorrelation(dt, &bath, &thermal).unwrap();
            let minus = force_autocorrelation(-dt, &bath, &thermal).unwrap();
            assert_eq!(plus.smooth, minus.smooth);
        }
    }

    #[test]
    fn commutator_is_odd_and_temperature_free() {
        let bath = SpectralDistribution::Blackbody {
            coupling: 1.0,
            cutoff: 2.0,
        };
        let hbar = 1.0;
        assert_eq!(force_commutator(0.0, &bath, hbar).unwrap().smooth, 0.0);
        let plus = force_commutator(0.8, &bath, hbar).unwrap();
        let minus = force_commutator(-0.8, &bath, hbar).unwrap();
        assert_relative_eq!(plus.smooth, -minus.smooth, max_relative = 1e-12);
        // no coth factor anywhere: nothing to vary with temperature
    }

    #[test]
    fn blackbody_commutator_closed_form() {
        // smooth part is −ħ·coupling·Ω⁴ e^{−Ωt}
        let (coupling, cutoff, hbar) = (1.0, 1.0, 1.0);
        let bath = SpectralDistribution::Blackbody { coupling, cutoff };
        for &dt in &[0.5, 1.0, 3.0] {
            let got = force_commutator(dt, &bath, hbar).unwrap();
            let expect = -hbar * coupling * cutoff.powi(4) * (-cutoff * dt).exp();
            assert_relative_eq!(got.smooth, expect, max_relative = 1e-7);
        }
        let c = force_commutator(1.0, &bath, hbar).unwrap();
        assert_relative_eq!(c.delta_prime_weight, -2.0 * hbar * coupling * cutoff * cutoff);
    }

    #[test]
    fn ohmic_commutator_regularized_part_vanishes() {
        let bath = ohmic(1.5);
        let got = force_commutator(0.7, &bath, 2.0).unwrap();
        assert_eq!(got.smooth, 0.0);
        assert_relative_eq!(got.delta_prime_weight, -2.0 * 2.0 * 1.5);
    }

    #[test]
    fn classical_position_matches_closed_form() {
        let (mass, spring, tau_e, kt) = (1.0, 1.0, 0.1, 0.7);
        let susc = Susceptibility::FordOConnell {
            mass,
            spring,
            tau_e,
        };
        let thermal = ThermalState::Classical { kt };
        let gamma = spring * tau_e / mass;
        for i in 0..10 {
            let t = 0.3 + i as f64 * (10.0 / gamma - 0.3) / 9.0;
            let got = position_autocorrelation(t, &susc, &thermal, None).unwrap();
            let expect = classical_oscillator_autocorr(t, spring, mass, tau_e, kt).unwrap();
            let envelope = kt / spring * (-0.5 * gamma * t).exp();
            assert!(
                (got.smooth - expect).abs() <= 1e-6 * expect.abs().max(envelope),
                "t = {t}: {} vs {expect}",
                got.smooth
            );
        }
    }

    #[test]
    fn equipartition_at_zero_lag() {
        let (mass, spring, tau_e, kt) = (1.0, 2.0, 0.05, 1.1);
        let susc = Susceptibility::FordOConnell {
            mass,
            spring,
            tau_e,
        };
        let thermal = ThermalState::Classical { kt };
        let got = position_autocorrelation(0.0, &susc, &thermal, None).unwrap();
        assert_relative_eq!(got.smooth, kt / spring, max_relative = 1e-8);
        assert!(got.smooth >= 0.0);
    }

    #[test]
    fn unbound_particle_rejected() {
        let susc = Susceptibility::FordOConnell {
            mass: 1.0,
            spring: 0.0,
            tau_e: 0.1,
        };
        let thermal = ThermalState::Classical { kt: 1.0 };
        assert!(position_autocorrelation(0.5, &susc, &thermal, None).is_err());
    }

    #[test]
    fn quantum_equal_time_needs_cutoff() {
        let susc = Susceptibility::FordOConnell {
            mass: 1.0,
            spring: 1.0,
            tau_e: 0.01,
        };
        let thermal = ThermalState::Quantum { hbar: 1.0, kt: 0.0 };
        assert!(position_autocorrelation(0.0, &susc, &thermal, None).is_err());
        assert!(position_autocorrelation(0.0, &susc, &thermal, Some(1e6)).is_ok());
    }

    #[test]
    fn position_commutator_small_dissipation_matches_residue_form() {
        // residue evaluation of (2ħ/π)∫ Im α sin(ωt) dω for the second-order
        // response: (ħ/Mω₁) e^{−γt/2}[(1−γτe/2) sin(ω₁ t) + ω₁τe cos(ω₁ t)]
        let (mass, spring, tau_e, hbar) = (1.0, 1.0, 0.05, 1.0);
        let susc = Susceptibility::FordOConnell {
            mass,
            spring,
            tau_e,
        };
        let osc = oscillator_derived(spring, mass, tau_e).unwrap();
        for &t in &[0.5, 1.5, 4.0] {
            let got = position_commutator(t, &susc, hbar).unwrap();
            let expect = hbar / (mass * osc.omega1)
                * (-0.5 * osc.gamma * t).exp()
                * ((1.0 - 0.5 * osc.gamma * tau_e) * (osc.omega1 * t).sin()
                    + osc.omega1 * tau_e * (osc.omega1 * t).cos());
            assert_relative_eq!(got.smooth, expect, max_relative = 1e-6);
        }
        // odd on a mirrored grid
        let plus = position_commutator(1.0, &susc, hbar).unwrap();
        let minus = position_commutator(-1.0, &susc, hbar).unwrap();
        assert_eq!(plus.smooth, -minus.smooth);
        assert_eq!(position_commutator(0.0, &susc, hbar).unwrap().smooth, 0.0);
    }

    #[test]
    fn undamped_position_commutator_free_oscillator_form() {
        // τe → 0⁺ limit approaches (ħ/Mω₀) sin(ω₀ t)
        let (mass, spring, tau_e, hbar) = (1.0, 4.0, 1e-4, 1.0);
        let susc = Susceptibility::FordOConnell {
            mass,
            spring,
            tau_e,
        };
        let omega0 = (spring / mass as f64).sqrt();
        let t = 0.9;
        let got = position_commutator(t, &susc, hbar).unwrap();
        let expect = hbar / (mass * omega0) * (omega0 * t).sin();
        assert_relative_eq!(got.smooth, expect, max_relative = 1e-3);
    }

    #[test]
    fn equal_time_commutator_examples() {
        let (mass, hbar) = (1.0, 1.0);
        for &gamma_tau in &[1e-3f64, 1e-2] {
            // reduced units: tau_e = 1 so K = gamma, gamma·tau_e = gamma
            let spring = gamma_tau;
            let susc = Susceptibility::FordOConnell {
                mass,
                spring,
                tau_e: 1.0,
            };
            let got = equal_time_xv_commutator(&susc, hbar).unwrap();
            let expect = hbar / mass * (1.0 - gamma_tau);
            assert_relative_eq!(got, expect, max_relative = 1e-2);
            // meaningful digits: must distinguish (1-γτe) from 1
            assert!(
                (got - expect).abs() < 0.3 * gamma_tau * hbar / mass,
                "gamma_tau = {gamma_tau}: got {got}, expect {expect}"
            );
        }
    }

    #[test]
    fn equal_time_commutator_independent_of_spring_at_fixed_gamma_tau() {
        // gamma·tau_e = K·tau_e²/M: hold it fixed while changing K
        let (mass, hbar, gamma_tau) = (1.0f64, 1.0f64, 4e-3f64);
        let mut results = Vec::new();
        for &spring in &[0.5f64, 2.0f64] {
            let tau_e = (gamma_tau * mass / spring).sqrt();
            let susc = Susceptibility::FordOConnell {
                mass,
                spring,
                tau_e,
            };
            results.push(equal_time_xv_commutator(&susc, hbar).unwrap());
        }
        assert_relative_eq!(results[0], results[1], max_relative = 1e-2);
    }

    #[test]
    fn classical_autocorr_examples() {
        let (spring, mass, tau_e, kt) = (1.0, 1.0, 0.1, 0.9);
        // equipartition at t = 0
        assert_relative_eq!(
            classical_oscillator_autocorr(0.0, spring, mass, tau_e, kt).unwrap(),
            kt / spring
        );
        // one period with small damping: ≈ (kT/K) e^{−πγ/ω₁}
        let osc = oscillator_derived(spring, mass, tau_e).unwrap();
        let t = 2.0 * PI / osc.omega1;
        let got = classical_oscillator_autocorr(t, spring, mass, tau_e, kt).unwrap();
        let expect = kt / spring * (-PI * osc.gamma / osc.omega1).exp();
        assert_relative_eq!(got, expect, max_relative = 1e-12);
        // overdamped input is not covered by the closed form
        assert!(matches!(
            classical_oscillator_autocorr(1.0, 16.0, 1.0, 1.0, kt),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn msd_examples() {
        let (mass, c, hbar) = (1.0, 1.0, 1e-10);
        // τe = 0: exactly the ground-state width
        let omega0 = 1.0;
        let r = msd_zero_temperature(omega0, 0.0, mass, c, hbar, 1.0).unwrap();
        assert_relative_eq!(r.closed_form, r.leading);
        assert_relative_eq!(r.direct_integral, r.leading, max_relative = 1e-6);

        // ω₀τe = 1e-6, cutoff ratio 1e10: direct vs closed within 5 percent,
        // correction strictly positive
        let tau_e = 1e-6;
        let r = msd_zero_temperature(omega0, tau_e, mass, c, hbar, 1.0).unwrap();
        assert!(
            (r.direct_integral - r.closed_form).abs() <= 0.05 * r.closed_form,
            "direct {} vs closed {}",
            r.direct_integral,
            r.closed_form
        );
        assert!(r.closed_form > r.leading);
        assert!(r.direct_integral > r.leading);
        assert!(!r.leading_log_warning);
        assert!(
            msd_zero_temperature(1.0, 0.2, mass, c, hbar, 1.0)
                .unwrap()
                .leading_log_warning
        );
    }

    #[test]
    fn curve_matches_serial_bitwise() {
        let bath = SpectralDistribution::Blackbody {
            coupling: 1.0,
            cutoff: 1.0,
        };
        let thermal = ThermalState::Quantum { hbar: 1.0, kt: 0.4 };
        let lags: Vec<f64> = (1..10).map(|i| i as f64 * 0.3).collect();
        let curve = correlation_curve(CorrelationKind::ForceSymmetric, &lags, |t| {
            force_autocorrelation(t, &bath, &thermal)
        })
        .unwrap();
        for (i, &t) in lags.iter().enumerate() {
            let serial = force_autocorrelation(t, &bath, &thermal).unwrap();
            assert_eq!(curve.values[i], serial.smooth);
        }
    }

    #[test]
    fn parity_on_mirrored_grids() {
        let bath = SpectralDistribution::Blackbody {
            coupling: 1.0,
            cutoff: 1.0,
        };
        let thermal = ThermalState::Quantum { hbar: 1.0, kt: 0.6 };
        for &t in &[0.25, 0.8, 2.0] {
            let sym_p = force_autocorrelation(t, &bath, &thermal).unwrap().smooth;
            let sym_m = force_autocorrelation(-t, &bath, &thermal).unwrap().smooth;
            assert!((sym_p - sym_m).abs() <= 1e-10 * sym_p.abs().max(1e-300));
            let com_p = force_commutator(t, &bath, 1.0).unwrap().smooth;
            let com_m = force_commutator(-t, &bath, 1.0).unwrap().smooth;
            assert!((com_p + com_m).abs() <= 1e-10 * com_p.abs().max(1e-300));
        }
    }
}
