//! Bath spectral distributions Re μ̃(ω+i0⁺), the Stieltjes inversion to the
//! full complex μ̃(z), time-domain memory kernels, and thermodynamic
//! admissibility checks.

use crate::error::{Error, Result};
use crate::quad::{self, QuadResult, Trig};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Square of the charge form factor, Ω²/(ω² + Ω²). Unity at low frequency,
/// rolling off beyond the cutoff Ω.
pub fn form_factor_sq(omega: f64, cutoff: f64) -> f64 {
    debug_assert!(cutoff > 0.0);
    cutoff * cutoff / (omega * omega + cutoff * cutoff)
}

/// Blackbody-bath spectral distribution, coupling·ω²·f²(ω) with
/// coupling = 2e²/(3c³). Grows as ω² below the cutoff and saturates at
/// coupling·Ω² above it.
pub fn spectral_blackbody(omega: f64, coupling: f64, cutoff: f64) -> f64 {
    coupling * omega * omega * form_factor_sq(omega, cutoff)
}

/// A tabulated one-sided spectrum, interpolated log-linearly (power-law
/// segments) and extrapolated beyond the grid by the last segment's
/// power-law slope.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSpectrum {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedSpectrum {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Input(format!(
                "grid/value length mismatch: {} vs {}",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::Input("tabulated spectrum needs >= 2 points".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("tabulated grid must be strictly increasing".into()));
        }
        if grid[0] < 0.0 {
            return Err(Error::Input("tabulated grid must start at omega >= 0".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("tabulated values must be finite".into()));
        }
        Ok(TabulatedSpectrum { grid, values })
    }

    /// Read a two-column CSV `omega,value` with one header line.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 {
                continue; // header
            }
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
                return Err(Error::Input(format!("line {}: expected two columns", i + 1)));
            };
            let omega: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("line {}: bad omega {a:?}", i + 1)))?;
            let value: f64 = b
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("line {}: bad value {b:?}", i + 1)))?;
            grid.push(omega);
            values.push(value);
        }
        TabulatedSpectrum::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Power-law slope of the last segment (d ln v / d ln ω), zero when
    /// either endpoint value is non-positive.
    fn tail_slope(&self) -> f64 {
        let n = self.grid.len();
        let (w0, w1) = (self.grid[n - 2], self.grid[n - 1]);
        let (v0, v1) = (self.values[n - 2], self.values[n - 1]);
        if v0 <= 0.0 || v1 <= 0.0 || w0 <= 0.0 {
            return 0.0;
        }
        (v1 / v0).ln() / (w1 / w0).ln()
    }

    fn eval(&self, omega: f64) -> f64 {
        let n = self.grid.len();
        if omega >= self.grid[n - 1] {
            let s = self.tail_slope();
            let vn = self.values[n - 1];
            if vn <= 0.0 {
                return vn;
            }
            return vn * (omega / self.grid[n - 1]).powf(s);
        }
        if omega <= self.grid[0] {
            let (w0, w1) = (self.grid[0], self.grid[1]);
            let (v0, v1) = (self.values[0], self.values[1]);
            if v0 > 0.0 && v1 > 0.0 && w0 > 0.0 && omega > 0.0 {
                let s = (v1 / v0).ln() / (w1 / w0).ln();
                return v0 * (omega / w0).powf(s);
            }
            // linear fallback through the first segment
            return v0 + (v1 - v0) * (omega - w0) / (w1 - w0);
        }
        let idx = match self
            .grid
            .binary_search_by(|g| g.partial_cmp(&omega).unwrap())
        {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let (w0, w1) = (self.grid[idx], self.grid[idx + 1]);
        let (v0, v1) = (self.values[idx], self.values[idx + 1]);
        if v0 > 0.0 && v1 > 0.0 && w0 > 0.0 {
            // log-log linear
            let s = (v1 / v0).ln() / (w1 / w0).ln();
            v0 * (omega / w0).powf(s)
        } else {
            v0 + (v1 - v0) * (omega - w0) / (w1 - w0)
        }
    }
}

/// One-sided spectral distribution ω ↦ Re μ̃(ω+i0⁺), ω ≥ 0. The even
/// extension to negative frequencies is structural (reality condition).
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralDistribution {
    /// Frequency-independent friction zeta (memoryless limit).
    Ohmic { zeta: f64 },
    /// Radiation bath: coupling·ω²·Ω²/(ω²+Ω²) with coupling = 2e²/(3c³).
    Blackbody { coupling: f64, cutoff: f64 },
    Tabulated(TabulatedSpectrum),
}

impl SpectralDistribution {
    /// Blackbody bath in terms of the charge and light speed.
    pub fn blackbody_from_charge(e: f64, c: f64, cutoff: f64) -> Result<Self> {
        if !(e > 0.0 && c > 0.0 && cutoff > 0.0) {
            return Err(Error::domain("blackbody bath requires e, c, Omega > 0"));
        }
        Ok(SpectralDistribution::Blackbody {
            coupling: 2.0 * e * e / (3.0 * c * c * c),
            cutoff,
        })
    }

    /// Blackbody bath in terms of the observed mass and tau_e
    /// (coupling = M·tau_e).
    pub fn blackbody_from_mass(mass: f64, tau_e: f64, cutoff: f64) -> Result<Self> {
        if !(mass > 0.0 && tau_e > 0.0 && cutoff > 0.0) {
            return Err(Error::domain("blackbody bath requires M, tau_e, Omega > 0"));
        }
        Ok(SpectralDistribution::Blackbody {
            coupling: mass * tau_e,
            cutoff,
        })
    }

    /// Re μ̃(ω+i0⁺) at ω ≥ 0.
    pub fn value(&self, omega: f64) -> f64 {
        match self {
            SpectralDistribution::Ohmic { zeta } => *zeta,
            SpectralDistribution::Blackbody { coupling, cutoff } => {
                spectral_blackbody(omega, *coupling, *cutoff)
            }
            SpectralDistribution::Tabulated(tab) => tab.eval(omega),
        }
    }

    /// High-frequency flat limit Re μ̃(∞). This is the delta-function content
    /// of the memory kernel; errors when the tail does not level off.
    pub fn flat_limit(&self) -> Result<f64> {
        match self {
            SpectralDistribution::Ohmic { zeta } => Ok(*zeta),
            SpectralDistribution::Blackbody { coupling, cutoff } => {
                Ok(coupling * cutoff * cutoff)
            }
            SpectralDistribution::Tabulated(tab) => {
                let s = tab.tail_slope();
                if s.abs() < 1e-3 {
                    Ok(*tab.values.last().unwrap())
                } else if s < 0.0 {
                    Ok(0.0)
                } else {
                    Err(Error::Numeric(format!(
                        "tabulated spectrum grows like omega^{s:.3} at high frequency; \
                         no finite flat limit"
                    )))
                }
            }
        }
    }

    /// Characteristic frequency scale used to pick quadrature break points.
    pub fn scale(&self) -> f64 {
        match self {
            SpectralDistribution::Ohmic { .. } => 1.0,
            SpectralDistribution::Blackbody { cutoff, .. } => *cutoff,
            SpectralDistribution::Tabulated(tab) => *tab.grid.last().unwrap(),
        }
    }

    /// μ̃(z) in the upper half plane (closed forms for the analytic kinds,
    /// Stieltjes quadrature for tabulated spectra).
    pub fn mu_tilde(&self, z: Complex64) -> Result<Complex64> {
        match self {
            SpectralDistribution::Ohmic { zeta } => {
                if z.im < 0.0 {
                    return Err(Error::domain("mu_tilde requires Im z >= 0"));
                }
                Ok(Complex64::new(*zeta, 0.0))
            }
            SpectralDistribution::Blackbody { coupling, cutoff } => {
                if z.im < 0.0 {
                    return Err(Error::domain("mu_tilde requires Im z >= 0"));
                }
                // coupling · z Ω² / (z + iΩ)
                Ok(Complex64::new(*coupling, 0.0) * z * cutoff * cutoff
                    / (z + Complex64::new(0.0, *cutoff)))
            }
            SpectralDistribution::Tabulated(_) => {
                if z.im > 0.0 {
                    stieltjes_mu(z, self)
                } else if z.im == 0.0 {
                    self.mu_tilde_real_axis(z.re)
                } else {
                    Err(Error::domain("mu_tilde requires Im z >= 0"))
                }
            }
        }
    }

    /// Boundary value μ̃(ω+i0⁺) on the real axis. The real part is the
    /// spectral distribution itself; the imaginary part comes from the
    /// closed form when available and from a principal-value Hilbert
    /// transform for tabulated spectra.
    pub fn mu_tilde_real_axis(&self, omega: f64) -> Result<Complex64> {
        let w = omega.abs();
        let re = self.value(w);
        let im_pos = match self {
            SpectralDistribution::Ohmic { .. } => 0.0,
            SpectralDistribution::Blackbody { coupling, cutoff } => {
                -coupling * w * cutoff.powi(3) / (w * w + cutoff * cutoff)
            }
            SpectralDistribution::Tabulated(_) => {
                if w == 0.0 {
                    0.0
                } else {
                    let flat = self.flat_limit()?;
                    let w_max = (self.scale() * 20.0).max(4.0 * w);
                    let pv = quad::principal_value_folded(
                        &|wp| self.value(wp),
                        w,
                        w_max,
                        flat,
                        1e-10,
                    )?;
                    -2.0 * w / PI * pv
                }
            }
        };
        // Im μ̃ is odd in ω (μ̃(-ω+i0⁺) = conj μ̃(ω+i0⁺))
        let im = if omega >= 0.0 { im_pos } else { -im_pos };
        Ok(Complex64::new(re, im))
    }
}

/// μ̃(z) for Im z > 0 by the Stieltjes inversion integral
///
///   μ̃(z) = (2iz/π) ∫₀^∞ Re μ̃(ω) / (z² − ω²) dω,
///
/// computed by adaptive quadrature on a finite window plus an analytic
/// treatment of the flat high-frequency tail.
pub fn stieltjes_mu(z: Complex64, spectral: &SpectralDistribution) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!(
            "stieltjes_mu requires Im z > 0, got z = {z}"
        )));
    }
    let flat = spectral.flat_limit()?;
    let scale = spectral.scale().max(z.norm());
    let w_split = 12.0 * scale;

    let z2 = z * z;
    let kernel = move |w: f64| -> Complex64 {
        Complex64::new(spectral.value(w), 0.0) / (z2 - w * w)
    };

    // Window [0, w_split]: pre-split around the near-singularity at Re z when
    // z sits close to the real axis, so the adaptive scheme sees the peak.
    let window = if z.re.abs() > 0.0 && z.im < 0.2 * z.re.abs() && z.re.abs() < w_split {
        let r = z.re.abs();
        let d = (50.0 * z.im).min(0.5 * r);
        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (a, b) in [(0.0, r - d), (r - d, r + d), (r + d, w_split)] {
            let part = quad::adaptive(&kernel, a, b, 1e-11, 0.0, 6000)?;
            total += part.value;
            err += part.abs_error;
        }
        QuadResult {
            value: total,
            abs_error: err,
        }
    } else {
        quad::adaptive(&kernel, 0.0, w_split, 1e-11, 0.0, 6000)?
    };

    // Flat tail: ∫_W^∞ dω/(z²−ω²) = (1/2z)(−iπ − Ln((z+W)/(z−W)))
    let tail_flat = if flat != 0.0 {
        let lnr = ((z + w_split) / (z - w_split)).ln();
        flat * (Complex64::new(0.0, -PI) - lnr) / (2.0 * z)
    } else {
        Complex64::new(0.0, 0.0)
    };

    // Remainder of the tail beyond the flat model decays at least like 1/ω²
    // on top of the 1/ω² kernel; integrate it on the mapped interval.
    let rem_kernel = move |w: f64| -> Complex64 {
        Complex64::new(spectral.value(w) - flat, 0.0) / (z2 - w * w)
    };
    let tail_rem = quad::adaptive_to_infinity(&rem_kernel, w_split, 1e-10, 1e-14 * window.value.norm())?;

    let integral = window.value + tail_flat + tail_rem.value;
    Ok(Complex64::new(0.0, 2.0 / PI) * z * integral)
}

/// Time-domain memory kernel: a delta part (weight `delta_coefficient`,
/// acting as delta_coefficient·ẋ(t) under the causal convolution) plus a
/// smooth decaying part for t ≥ 0.
#[derive(Debug, Clone)]
pub struct MemoryKernel {
    /// Re μ̃(∞); the flat spectral tail turns into the memoryless friction.
    pub delta_coefficient: f64,
    spectral: SpectralDistribution,
}

impl MemoryKernel {
    /// Effective coefficient of ẋ(t) contributed by the delta part under the
    /// one-sided convolution (the "half delta" endpoint convention).
    pub fn instantaneous_friction(&self) -> f64 {
        self.delta_coefficient
    }

    /// Smooth part of μ(t) for t ≥ 0:
    /// (2/π) ∫₀^∞ [Re μ̃(ω) − Re μ̃(∞)] cos(ωt) dω.
    pub fn smooth_part(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::domain(
                "memory kernels vanish for negative times; smooth_part requires t >= 0",
            ));
        }
        let flat = self.delta_coefficient;
        let g = |w: f64| self.spectral.value(w) - flat;
        let result = if t == 0.0 {
            quad::adaptive_to_infinity(&g, 0.0, 1e-10, 0.0)?
        } else {
            quad::fourier_semi_infinite(&g, Trig::Cos, t, self.spectral.scale(), 1e-9)?
        };
        Ok(result.value * 2.0 / PI)
    }
}

/// Split a spectral distribution into its delta coefficient and smooth
/// time-domain part. The flat high-frequency limit is removed analytically
/// before cosine transforming (the transform of a constant does not converge
/// numerically).
pub fn memory_kernel_time(spectral: &SpectralDistribution) -> Result<MemoryKernel> {
    let flat = spectral.flat_limit()?;
    Ok(MemoryKernel {
        delta_coefficient: flat,
        spectral: spectral.clone(),
    })
}

/// Outcome of the thermodynamic admissibility scan of a spectrum.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub min_value: f64,
    /// Grid points where the spectrum is negative (positivity violation).
    pub negative_points: Vec<(f64, f64)>,
    /// Maximal runs of consecutive grid zeros (gaps break the existence of
    /// an equilibrium state).
    pub gaps: Vec<(f64, f64)>,
    /// Estimate of ∫₀^∞ Re μ̃(ω)/(1+ω²) dω; `None` when the quadrature fails
    /// to converge (non-integrable tail).
    pub integrability: Option<f64>,
    pub passed: bool,
}

/// Scan positivity, gaps, and integrability of a spectrum on the given grid.
/// Report-only; never errors.
pub fn check_admissibility(spectral: &SpectralDistribution, grid: &[f64]) -> AdmissibilityReport {
    let mut min_value = f64::INFINITY;
    let mut negative_points = Vec::new();
    let mut gaps: Vec<(f64, f64)> = Vec::new();
    let mut gap_start: Option<f64> = None;
    let mut prev_omega = 0.0;

    for &w in grid {
        let v = spectral.value(w);
        if v < min_value {
            min_value = v;
        }
        if v < 0.0 {
            negative_points.push((w, v));
        }
        if v == 0.0 && w > 0.0 {
            if gap_start.is_none() {
                gap_start = Some(w);
            }
        } else if let Some(start) = gap_start.take() {
            if prev_omega > start {
                gaps.push((start, prev_omega));
            }
        }
        prev_omega = w;
    }
    if let Some(start) = gap_start {
        if prev_omega > start {
            gaps.push((start, prev_omega));
        }
    }

    let integrability = quad::adaptive_to_infinity(
        &|w: f64| spectral.value(w) / (1.0 + w * w),
        0.0,
        1e-9,
        0.0,
    )
    .ok()
    .map(|r| r.value)
    .filter(|v| v.is_finite());

    let passed = negative_points.is_empty() && gaps.is_empty() && integrability.is_some();
    AdmissibilityReport {
        min_value,
        negative_points,
        gaps,
        integrability,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reduced_blackbody() -> SpectralDistribution {
        // coupling = M tau_e = 1, cutoff = 1/tau_e = 1 in reduced units
        SpectralDistribution::Blackbody {
            coupling: 1.0,
            cutoff: 1.0,
        }
    }

    #[test]
    fn form_factor_examples() {
        assert_relative_eq!(form_factor_sq(0.0, 2.0), 1.0);
        assert_relative_eq!(form_factor_sq(2.0, 2.0), 0.5);
        assert_relative_eq!(form_factor_sq(6.0, 2.0), 0.1, max_relative = 1e-14);
    }

    #[test]
    fn spectral_blackbody_examples() {
        assert_eq!(spectral_blackbody(0.0, 1.0, 1.0), 0.0);
        // high-frequency saturation at coupling·Ω²
        let v = spectral_blackbody(1e8, 3.0, 2.0);
        assert_relative_eq!(v, 3.0 * 4.0, max_relative = 1e-6);
        // reduced units, ω = 1: 1·1/(1+1) = 1/2
        assert_relative_eq!(reduced_blackbody().value(1.0), 0.5);
    }

    #[test]
    fn stieltjes_ohmic_is_constant() {
        let bath = SpectralDistribution::Ohmic { zeta: 0.7 };
        for &z in &[
            Complex64::new(0.0, 1.0),
            Complex64::new(2.0, 0.5),
            Complex64::new(-3.0, 4.0),
        ] {
            let mu = stieltjes_mu(z, &bath).unwrap();
            assert_relative_eq!(mu.re, 0.7, max_relative = 1e-9);
            assert!(mu.im.abs() < 1e-9);
        }
    }

    #[test]
    fn stieltjes_blackbody_at_i_cutoff() {
        // z = iΩ: μ̃ = coupling·Ω²/2, real
        let bath = SpectralDistribution::Blackbody {
            coupling: 2.0,
            cutoff: 3.0,
        };
        let mu = stieltjes_mu(Complex64::new(0.0, 3.0), &bath).unwrap();
        assert_relative_eq!(mu.re, 2.0 * 9.0 / 2.0, max_relative = 1e-9);
        assert!(mu.im.abs() < 1e-8);
    }

    #[test]
    fn stieltjes_blackbody_matches_closed_form() {
        let bath = SpectralDistribution::Blackbody {
            coupling: 1.0,
            cutoff: 1.0,
        };
        for &z in &[
            Complex64::new(0.3, 0.2),
            Complex64::new(-1.0, 2.0),
            Complex64::new(5.0, 0.1),
            Complex64::new(0.0, 1e3),
        ] {
            let quadrature = stieltjes_mu(z, &bath).unwrap();
            let closed = bath.mu_tilde(z).unwrap();
            assert!(
                (quadrature - closed).norm() <= 1e-8 * closed.norm(),
                "z = {z}: quad {quadrature} vs closed {closed}"
            );
        }
    }

    #[test]
    fn stieltjes_large_imaginary_limit() {
        // z = iy, y → ∞: μ̃ → coupling·Ω²·y/(y+Ω) → coupling·Ω²
        let bath = SpectralDistribution::Blackbody {
            coupling: 1.5,
            cutoff: 2.0,
        };
        let y = 1e5;
        let mu = stieltjes_mu(Complex64::new(0.0, y), &bath).unwrap();
        let expect = 1.5 * 4.0 * y / (y + 2.0);
        assert_relative_eq!(mu.re, expect, max_relative = 1e-7);
    }

    #[test]
    fn stieltjes_rejects_lower_half_plane() {
        let bath = SpectralDistribution::Ohmic { zeta: 1.0 };
        assert!(stieltjes_mu(Complex64::new(1.0, 0.0), &bath).is_err());
        assert!(stieltjes_mu(Complex64::new(1.0, -0.1), &bath).is_err());
    }

    #[test]
    fn stieltjes_real_axis_round_trip() {
        // Re[μ̃(ω + iε)] → Re μ̃(ω) as ε → 0⁺
        let bath = reduced_blackbody();
        for &w in &[0.4, 1.0, 2.5] {
            let eps = 1e-4 * bath.scale();
            let mu = stieltjes_mu(Complex64::new(w, eps), &bath).unwrap();
            assert_relative_eq!(mu.re, bath.value(w), max_relative = 1e-3);
        }
    }

    #[test]
    fn mu_tilde_analytic_in_upper_half_plane() {
        // numeric Cauchy-Riemann residuals of the quadrature evaluation
        let bath = reduced_blackbody();
        let f = |z: Complex64| stieltjes_mu(z, &bath).unwrap();
        for &z in &[
            Complex64::new(0.5, 0.8),
            Complex64::new(-1.2, 1.5),
            Complex64::new(2.0, 2.0),
        ] {
            let h = 1e-4;
            let du_dx = (f(z + h) - f(z - h)) / (2.0 * h);
            let du_dy = (f(z + Complex64::new(0.0, h)) - f(z - Complex64::new(0.0, h)))
                / (2.0 * h);
            // analyticity: d/dy = i d/dx
            let resid = (du_dy - Complex64::i() * du_dx).norm() / du_dx.norm().max(1e-30);
            assert!(resid < 1e-6, "CR residual {resid:e} at z = {z}");
        }
    }

    #[test]
    fn memory_kernel_blackbody_closed_form() {
        // smooth part is -coupling·Ω³ e^{-Ωt}
        let coupling = 1.0;
        let cutoff = 1.0;
        let bath = SpectralDistribution::Blackbody { coupling, cutoff };
        let kernel = memory_kernel_time(&bath).unwrap();
        assert_relative_eq!(kernel.delta_coefficient, coupling * cutoff * cutoff);
        for &t in &[0.1, 0.5, 1.0, 3.0, 10.0] {
            let got = kernel.smooth_part(t).unwrap();
            let expect = -coupling * cutoff.powi(3) * (-cutoff * t).exp();
            assert_relative_eq!(got, expect, max_relative = 1e-6);
        }
    }

    #[test]
    fn memory_kernel_ohmic_is_pure_delta() {
        let bath = SpectralDistribution::Ohmic { zeta: 2.0 };
        let kernel = memory_kernel_time(&bath).unwrap();
        assert_eq!(kernel.delta_coefficient, 2.0);
        for &t in &[0.0, 0.5, 2.0] {
            assert!(kernel.smooth_part(t).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn memory_kernel_decays() {
        let bath = reduced_blackbody();
        let kernel = memory_kernel_time(&bath).unwrap();
        let v = kernel.smooth_part(30.0).unwrap();
        assert!(v.abs() < 1e-9, "got {v}");
    }

    #[test]
    fn admissibility_examples() {
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();

        let ohmic = SpectralDistribution::Ohmic { zeta: 0.3 };
        let rep = check_admissibility(&ohmic, &grid);
        assert!(rep.passed);
        assert_relative_eq!(rep.min_value, 0.3);

        let bad = SpectralDistribution::Tabulated(
            TabulatedSpectrum::new(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, -0.5, 1.0, 1.0]).unwrap(),
        );
        let rep = check_admissibility(&bad, &[0.0, 1.0, 2.0, 3.0]);
        assert!(!rep.passed);
        assert_eq!(rep.negative_points.len(), 1);
        assert_eq!(rep.negative_points[0].0, 1.0);

        let bb = reduced_blackbody();
        let rep = check_admissibility(&bb, &grid);
        assert!(rep.passed);
        // ∫₀^∞ ω²/((ω²+1)(1+ω²)) dω = π/4 for Ω = 1, coupling = 1
        assert_relative_eq!(
            rep.integrability.unwrap(),
            std::f64::consts::PI / 4.0,
            max_relative = 1e-7
        );
    }

    #[test]
    fn admissibility_detects_gap() {
        let tab = TabulatedSpectrum::new(
            vec![0.0, 1.0, 2.0, 3.0, 4.0],
            vec![1.0, 0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let rep = check_admissibility(
            &SpectralDistribution::Tabulated(tab),
            &[0.0, 1.0, 2.0, 3.0, 4.0],
        );
        assert_eq!(rep.gaps, vec![(1.0, 3.0)]);
        assert!(!rep.passed);
    }

    #[test]
    fn tabulated_csv_round_trip() {
        let csv = "omega,value\n0.1,1.0\n1.0,1.0\n10.0,1.0\n";
        let tab = TabulatedSpectrum::from_csv(csv).unwrap();
        assert_eq!(tab.grid().len(), 3);
        let bath = SpectralDistribution::Tabulated(tab);
        assert_relative_eq!(bath.value(0.5), 1.0);
        assert_relative_eq!(bath.value(50.0), 1.0); // flat extrapolation
        assert_relative_eq!(bath.flat_limit().unwrap(), 1.0);
    }

    #[test]
    fn tabulated_power_law_interpolation() {
        // samples of ω² interpolate exactly in log-log
        let grid = vec![0.5, 1.0, 2.0, 4.0];
        let values: Vec<f64> = grid.iter().map(|w| w * w).collect();
        let bath =
            SpectralDistribution::Tabulated(TabulatedSpectrum::new(grid, values).unwrap());
        assert_relative_eq!(bath.value(1.5), 2.25, max_relative = 1e-12);
        // extrapolation continues the last slope
        assert_relative_eq!(bath.value(8.0), 64.0, max_relative = 1e-12);
        assert!(bath.flat_limit().is_err());
    }

    #[test]
    fn tabulated_real_axis_hilbert_matches_blackbody() {
        // tabulate the blackbody spectrum finely and compare Im μ̃ against
        // the closed form
        let coupling = 1.0;
        let cutoff = 1.0;
        let bb = SpectralDistribution::Blackbody { coupling, cutoff };
        let grid: Vec<f64> = (0..4000).map(|i| 1e-3 + i as f64 * 0.05).collect();
        let values: Vec<f64> = grid.iter().map(|&w| bb.value(w)).collect();
        let tab = SpectralDistribution::Tabulated(TabulatedSpectrum::new(grid, values).unwrap());
        for &w in &[0.5, 1.0, 3.0] {
            let got = tab.mu_tilde_real_axis(w).unwrap();
            let expect = bb.mu_tilde_real_axis(w).unwrap();
            // accuracy is limited by the power-law interpolation of the table
            assert_relative_eq!(got.re, expect.re, max_relative = 1e-3);
            assert_relative_eq!(got.im, expect.im, max_relative = 2e-2);
        }
    }
}
