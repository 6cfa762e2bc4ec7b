//! Generalized susceptibility and the second-order (Ford-O'Connell)
//! polarizability, exact pole diagnostics on the rational denominators, and
//! a numerical Kramers-Kronig causality check.

use crate::bath::SpectralDistribution;
use crate::error::{Error, Result};
use crate::quad;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Linear response α(ω) of the particle coordinate to an applied force.
#[derive(Debug, Clone)]
pub enum Susceptibility {
    /// α = 1/(−m ω² − iω μ̃(ω) + K), the microscopic form in terms of the
    /// bare mass and an arbitrary bath.
    General {
        m_bare: f64,
        spring: f64,
        bath: SpectralDistribution,
    },
    /// α = (1−iωτe)/(−Mω² + (1−iωτe)K): second order, runaway-free.
    FordOConnell { mass: f64, spring: f64, tau_e: f64 },
    /// Comparison response of the point-electron equation with denominator
    /// −Mω² − iMτe ω³; carries the runaway pole in the upper half plane.
    AbrahamLorentz { mass: f64, tau_e: f64 },
}

/// Evaluate the general form at complex ω (real axis uses the boundary
/// values of μ̃).
pub fn alpha_general(
    omega: Complex64,
    m_bare: f64,
    spring: f64,
    bath: &SpectralDistribution,
) -> Result<Complex64> {
    let mu = if omega.im == 0.0 {
        bath.mu_tilde_real_axis(omega.re)?
    } else {
        bath.mu_tilde(omega)?
    };
    let den = -m_bare * omega * omega - Complex64::i() * omega * mu
        + Complex64::new(spring, 0.0);
    let scale = (m_bare * omega.norm_sqr())
        .max((omega * mu).norm())
        .max(spring)
        .max(f64::MIN_POSITIVE);
    if den.norm() < 1e-13 * scale {
        return Err(Error::Pole(format!(
            "susceptibility evaluated on a pole at omega = {omega}"
        )));
    }
    Ok(den.inv())
}

/// Evaluate the Ford-O'Connell polarizability at complex ω.
pub fn alpha_fo(omega: Complex64, mass: f64, spring: f64, tau_e: f64) -> Result<Complex64> {
    let num = Complex64::new(1.0, 0.0) - Complex64::i() * omega * tau_e;
    let den = -mass * omega * omega + num * spring;
    let scale = (mass * omega.norm_sqr()).max(spring).max(f64::MIN_POSITIVE);
    if den.norm() < 1e-13 * scale {
        return Err(Error::Pole(format!(
            "polarizability evaluated on a pole at omega = {omega}"
        )));
    }
    Ok(num / den)
}

fn alpha_al(omega: Complex64, mass: f64, tau_e: f64) -> Result<Complex64> {
    let den = -mass * omega * omega * (Complex64::new(1.0, 0.0) + Complex64::i() * tau_e * omega);
    if den.norm() < 1e-280 {
        return Err(Error::Pole(format!(
            "comparison response evaluated on its pole at omega = {omega}"
        )));
    }
    Ok(den.inv())
}

impl Susceptibility {
    pub fn eval(&self, omega: Complex64) -> Result<Complex64> {
        match self {
            Susceptibility::General {
                m_bare,
                spring,
                bath,
            } => alpha_general(omega, *m_bare, *spring, bath),
            Susceptibility::FordOConnell {
                mass,
                spring,
                tau_e,
            } => alpha_fo(omega, *mass, *spring, *tau_e),
            Susceptibility::AbrahamLorentz { mass, tau_e } => alpha_al(omega, *mass, *tau_e),
        }
    }

    /// Im α(ω + i0⁺) on the real axis.
    pub fn im_real_axis(&self, omega: f64) -> Result<f64> {
        Ok(self.eval(Complex64::new(omega, 0.0))?.im)
    }

    /// High-frequency tail coefficient c∞ = lim ω·Im α(ω). Controls the
    /// slowly decaying part of dispersion integrals.
    pub fn tail_coefficient(&self) -> Result<f64> {
        match self {
            Susceptibility::FordOConnell { mass, tau_e, .. } => Ok(tau_e / mass),
            Susceptibility::AbrahamLorentz { .. } => Ok(0.0),
            Susceptibility::General { m_bare, bath, .. } => {
                if *m_bare > 0.0 {
                    Ok(0.0)
                } else {
                    let flat = bath.flat_limit()?;
                    if flat > 0.0 {
                        Ok(1.0 / flat)
                    } else {
                        Ok(0.0)
                    }
                }
            }
        }
    }
}

/// Which half of the complex ω plane a pole lies in. Lower-half poles decay;
/// an upper-half pole is a runaway mode (causality violation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPlane {
    Upper,
    Lower,
    RealAxis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleInfo {
    pub position: Complex64,
    pub half_plane: HalfPlane,
}

fn classify(position: Complex64, scale: f64) -> PoleInfo {
    let tol = 1e-12 * scale.max(position.norm());
    let half_plane = if position.im > tol {
        HalfPlane::Upper
    } else if position.im < -tol {
        HalfPlane::Lower
    } else {
        HalfPlane::RealAxis
    };
    PoleInfo {
        position,
        half_plane,
    }
}

/// Roots of a z² + b z + c = 0 with complex coefficients (stable form).
fn roots_quadratic(a: Complex64, b: Complex64, c: Complex64) -> Vec<Complex64> {
    if a.norm() == 0.0 {
        if b.norm() == 0.0 {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = (b * b - 4.0 * a * c).sqrt();
    // pick the sign that avoids cancellation in b ± disc
    let q = if (b + disc).norm() >= (b - disc).norm() {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        return vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    }
    vec![q / a, c / q]
}

/// Roots of a z³ + b z² + c z + d = 0 with complex coefficients (Cardano
/// plus a Newton polish).
fn roots_cubic(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Vec<Complex64> {
    if a.norm() == 0.0 {
        return roots_quadratic(b, c, d);
    }
    let p = b / a;
    let q = c / a;
    let r = d / a;
    // depressed cubic w³ + pw·w + qw, z = w − p/3
    let pw = q - p * p / 3.0;
    let qw = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
    let shift = -p / 3.0;

    let half_q = qw * 0.5;
    let disc = (half_q * half_q + pw * pw * pw / 27.0).sqrt();
    let mut u3 = -half_q + disc;
    if u3.norm() < (-half_q - disc).norm() {
        u3 = -half_q - disc;
    }
    let roots = if u3.norm() == 0.0 {
        // triple root of the depressed cubic only when pw == 0 as well
        let w = (-qw).cbrt_all();
        w
    } else {
        let u = u3.cbrt_all();
        u.into_iter()
            .map(|ui| ui - pw / (3.0 * ui))
            .collect::<Vec<_>>()
    };

    let poly = |z: Complex64| ((a * z + b) * z + c) * z + d;
    let dpoly = |z: Complex64| (3.0 * a * z + 2.0 * b) * z + c;
    roots
        .into_iter()
        .map(|w| {
            let mut z = w + shift;
            for _ in 0..3 {
                let dp = dpoly(z);
                if dp.norm() > 0.0 {
                    z -= poly(z) / dp;
                }
            }
            z
        })
        .collect()
}

trait CbrtAll {
    fn cbrt_all(self) -> Vec<Complex64>;
}
impl CbrtAll for Complex64 {
    fn cbrt_all(self) -> Vec<Complex64> {
        let r = self.norm().cbrt();
        let theta = self.arg() / 3.0;
        (0..3)
            .map(|k| Complex64::from_polar(r, theta + 2.0 * PI * k as f64 / 3.0))
            .collect()
    }
}

/// All denominator roots of a rational susceptibility, classified by half
/// plane. The coefficients come from the exact quadratic/cubic denominators,
/// not from sampling.
pub fn pole_diagnostics(susceptibility: &Susceptibility) -> Result<Vec<PoleInfo>> {
    match susceptibility {
        Susceptibility::FordOConnell {
            mass,
            spring,
            tau_e,
        } => {
            // −Mω² + (1−iωτe)K = 0  ⇔  ω² + iγω − ω0² = 0
            let omega0_sq = spring / mass;
            let gamma = spring * tau_e / mass;
            let scale = omega0_sq.sqrt().max(gamma);
            if *spring == 0.0 {
                // double pole at the origin
                let p = classify(Complex64::new(0.0, 0.0), 1.0);
                return Ok(vec![p, p]);
            }
            let roots = roots_quadratic(
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, gamma),
                Complex64::new(-omega0_sq, 0.0),
            );
            Ok(roots.into_iter().map(|z| classify(z, scale)).collect())
        }
        Susceptibility::AbrahamLorentz { tau_e, .. } => {
            // −Mω²(1 + iτe ω): double root at 0, runaway root at i/τe
            let origin = classify(Complex64::new(0.0, 0.0), 1.0 / tau_e);
            let runaway = classify(Complex64::new(0.0, 1.0 / tau_e), 1.0 / tau_e);
            Ok(vec![origin, origin, runaway])
        }
        Susceptibility::General {
            m_bare,
            spring,
            bath,
        } => match bath {
            SpectralDistribution::Ohmic { zeta } => {
                // −mω² − iζω + K = 0
                let scale = (spring / m_bare.max(1e-300)).abs().sqrt().max(*zeta);
                let roots = roots_quadratic(
                    Complex64::new(-m_bare, 0.0),
                    Complex64::new(0.0, -zeta),
                    Complex64::new(*spring, 0.0),
                );
                Ok(roots.into_iter().map(|z| classify(z, scale)).collect())
            }
            SpectralDistribution::Blackbody { coupling, cutoff } => {
                // multiply the denominator by (ω + iΩ):
                // −mω³ − i(mΩ + couplingΩ²)ω² + Kω + iKΩ = 0
                let roots = roots_cubic(
                    Complex64::new(-m_bare, 0.0),
                    Complex64::new(0.0, -(m_bare * cutoff + coupling * cutoff * cutoff)),
                    Complex64::new(*spring, 0.0),
                    Complex64::new(0.0, spring * cutoff),
                );
                Ok(roots.into_iter().map(|z| classify(z, *cutoff)).collect())
            }
            SpectralDistribution::Tabulated(_) => Err(Error::Unsupported(
                "pole diagnostics needs a rational susceptibility; tabulated baths are not rational"
                    .into(),
            )),
        },
    }
}

/// Max-norm residual of the Kramers-Kronig relation
///
///   Re α(ω) = (1/π) P ∫ Im α(ω′)/(ω′−ω) dω′
///
/// over the positive half of a symmetric grid, normalized by max |α|.
/// Causal (upper-half-plane-analytic) responses give small residuals; the
/// runaway comparison response fails by order unity.
pub fn kramers_kronig_residual(susceptibility: &Susceptibility, grid: &[f64]) -> Result<f64> {
    // real poles make the dispersion integral itself singular
    if let Ok(poles) = pole_diagnostics(susceptibility) {
        for p in &poles {
            if p.half_plane == HalfPlane::RealAxis && p.position.norm() > 0.0 {
                return Err(Error::Pole(format!(
                    "susceptibility has a pole on the real axis at {}; \
                     the dispersion relation is not defined",
                    p.position
                )));
            }
        }
    }

    let mut positive: Vec<f64> = grid.iter().copied().filter(|w| *w > 0.0).collect();
    positive.sort_by(|a, b| a.partial_cmp(b).unwrap());
    positive.dedup();
    if positive.is_empty() {
        return Err(Error::domain("kramers_kronig_residual needs a nonempty grid"));
    }
    let w_top = *positive.last().unwrap();
    let w_max = 8.0 * w_top;
    let c_inf = susceptibility.tail_coefficient()?;

    let mut max_resid = 0.0f64;
    let mut max_alpha = 0.0f64;
    for &w in &positive {
        let alpha = susceptibility.eval(Complex64::new(w, 0.0))?;
        max_alpha = max_alpha.max(alpha.norm());
        let g = |wp: f64| 2.0 * wp * self_im(susceptibility, wp);
        let pv = quad::principal_value_folded(&g, w, w_max, 2.0 * c_inf, 1e-9)?;
        let resid = (alpha.re - pv / PI).abs();
        max_resid = max_resid.max(resid);
    }
    Ok(max_resid / max_alpha)
}

fn self_im(s: &Susceptibility, omega: f64) -> f64 {
    s.im_real_axis(omega).unwrap_or(0.0)
}
