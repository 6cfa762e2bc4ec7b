//! Physical constants, unit scaling, and derived scenario parameters.
//!
//! All physics kernels in this crate work in whatever consistent unit system
//! the caller supplies; CGS values appear only here, at the I/O boundary.
//! Internally, runs are normally set up in reduced units (tau_e = 1, M = 1)
//! because tau_e ~ 6e-24 s makes raw-CGS time stepping hopeless in doubles.

use crate::error::{Error, Result};

/// Fundamental constants in CGS-Gaussian units. These are configuration
/// defaults, not values baked into any physics kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Elementary charge magnitude e (esu).
    pub electron_charge: f64,
    /// Speed of light c (cm/s).
    pub speed_of_light: f64,
    /// Reduced Planck constant (erg s).
    pub hbar: f64,
    /// Boltzmann constant (erg/K).
    pub boltzmann: f64,
    /// Observed electron mass M (g).
    pub observed_mass: f64,
}

impl PhysicalConstants {
    /// CODATA-2018 values in CGS-Gaussian units.
    pub fn codata() -> Self {
        PhysicalConstants {
            electron_charge: 4.803_204_712_57e-10,
            speed_of_light: 2.997_924_58e10,
            hbar: 1.054_571_817e-27,
            boltzmann: 1.380_649e-16,
            observed_mass: 9.109_383_701_5e-28,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("electron_charge", self.electron_charge),
            ("speed_of_light", self.speed_of_light),
            ("hbar", self.hbar),
            ("boltzmann", self.boltzmann),
            ("observed_mass", self.observed_mass),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "constant {name} must be strictly positive and finite, got {v:e}"
                )));
            }
        }
        Ok(())
    }

    /// Radiation-reaction time of these constants.
    pub fn tau_e(&self) -> Result<f64> {
        derive_tau_e(self.electron_charge, self.observed_mass, self.speed_of_light)
    }

    /// Radiation coupling 2e²/(3c³), the prefactor of the blackbody spectral
    /// distribution. Equals M·tau_e.
    pub fn radiation_coupling(&self) -> f64 {
        2.0 * self.electron_charge * self.electron_charge
            / (3.0 * self.speed_of_light.powi(3))
    }
}

/// tau_e = 2e²/(3Mc³), the characteristic radiation-reaction time
/// (about 6.25e-24 s for the electron).
pub fn derive_tau_e(e: f64, mass: f64, c: f64) -> Result<f64> {
    if !(e > 0.0 && mass > 0.0 && c > 0.0) {
        return Err(Error::Domain(format!(
            "derive_tau_e requires positive inputs, got e={e:e}, M={mass:e}, c={c:e}"
        )));
    }
    Ok(2.0 * e * e / (3.0 * mass * c * c * c))
}

/// Bare mass m = M(1 - Omega·tau_e) of a charge with cutoff frequency Omega.
///
/// The bare mass goes negative for Omega > 1/tau_e; that regime reintroduces
/// runaway solutions and is rejected unless `allow_negative_bare_mass` is set.
pub fn bare_mass(
    observed_mass: f64,
    omega_cutoff: f64,
    tau_e: f64,
    allow_negative_bare_mass: bool,
) -> Result<f64> {
    if !(omega_cutoff >= 0.0) {
        return Err(Error::Domain(format!(
            "bare_mass requires Omega >= 0, got {omega_cutoff:e}"
        )));
    }
    if !(observed_mass > 0.0 && tau_e > 0.0) {
        return Err(Error::Domain(format!(
            "bare_mass requires M > 0 and tau_e > 0, got M={observed_mass:e}, tau_e={tau_e:e}"
        )));
    }
    if omega_cutoff * tau_e > 1.0 && !allow_negative_bare_mass {
        return Err(Error::CutoffConstraint {
            omega: omega_cutoff,
            inv_tau_e: 1.0 / tau_e,
        });
    }
    Ok(observed_mass * (1.0 - omega_cutoff * tau_e))
}

/// Derived oscillator frequencies: omega0 = sqrt(K/M), damping gamma =
/// K·tau_e/M, shifted frequency omega1 = sqrt(omega0² - gamma²/4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub omega0: f64,
    pub gamma: f64,
    /// sqrt(|omega0² - gamma²/4|); interpret as the magnitude of an
    /// imaginary frequency when `overdamped` is set.
    pub omega1: f64,
    pub overdamped: bool,
}

pub fn oscillator_derived(spring: f64, mass: f64, tau_e: f64) -> Result<OscillatorParams> {
    if !(spring >= 0.0) || !(mass > 0.0) || !(tau_e >= 0.0) {
        return Err(Error::Domain(format!(
            "oscillator_derived requires K >= 0, M > 0, tau_e >= 0; got K={spring:e}, M={mass:e}, tau_e={tau_e:e}"
        )));
    }
    let omega0 = (spring / mass).sqrt();
    let gamma = spring * tau_e / mass;
    let disc = omega0 * omega0 - 0.25 * gamma * gamma;
    Ok(OscillatorParams {
        omega0,
        gamma,
        omega1: disc.abs().sqrt(),
        overdamped: disc < 0.0,
    })
}

/// Linear scales mapping internal units to CGS. An internal quantity with
/// dimensions time^a length^b mass^c converts to CGS by multiplying with
/// time_scale^a length_scale^b mass_scale^c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// Seconds per internal time unit.
    pub time_scale: f64,
    /// Centimetres per internal length unit.
    pub length_scale: f64,
    /// Grams per internal mass unit.
    pub mass_scale: f64,
}

impl UnitSystem {
    /// CGS passthrough.
    pub fn cgs() -> Self {
        UnitSystem {
            time_scale: 1.0,
            length_scale: 1.0,
            mass_scale: 1.0,
        }
    }

    /// Reduced units: tau_e = 1, M = 1, and the remaining free scale chosen
    /// so that c = 1 (length unit = c·tau_e).
    pub fn reduced(constants: &PhysicalConstants) -> Result<Self> {
        constants.validate()?;
        let tau = constants.tau_e()?;
        Ok(UnitSystem {
            time_scale: tau,
            length_scale: constants.speed_of_light * tau,
            mass_scale: constants.observed_mass,
        })
    }

    pub fn time_to_cgs(&self, t: f64) -> f64 {
        t * self.time_scale
    }
    pub fn time_from_cgs(&self, t: f64) -> f64 {
        t / self.time_scale
    }
    pub fn length_to_cgs(&self, x: f64) -> f64 {
        x * self.length_scale
    }
    pub fn length_from_cgs(&self, x: f64) -> f64 {
        x / self.length_scale
    }
    pub fn mass_to_cgs(&self, m: f64) -> f64 {
        m * self.mass_scale
    }
    pub fn mass_from_cgs(&self, m: f64) -> f64 {
        m / self.mass_scale
    }

    /// Conversion factor for a quantity of dimensions
    /// time^a · length^b · mass^c, internal -> CGS.
    pub fn factor_to_cgs(&self, time_pow: i32, length_pow: i32, mass_pow: i32) -> f64 {
        self.time_scale.powi(time_pow)
            * self.length_scale.powi(length_pow)
            * self.mass_scale.powi(mass_pow)
    }
}

/// Which bath a scenario couples to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathKind {
    /// Constant friction zeta.
    Ohmic { zeta: f64 },
    /// Radiation bath with cutoff Omega; the coupling is M·tau_e.
    Blackbody { omega_cutoff: f64 },
}

/// Validated parameters for a scenario shared across modules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub mass: f64,
    pub spring: f64,
    pub temperature: f64,
    pub tau_e: f64,
    pub omega_cutoff: Option<f64>,
    pub zeta: Option<f64>,
    pub allow_negative_bare_mass: bool,
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<BathKind> {
        if !(self.mass > 0.0) {
            return Err(Error::Domain(format!("mass must be > 0, got {:e}", self.mass)));
        }
        if !(self.spring >= 0.0) {
            return Err(Error::Domain(format!(
                "spring constant must be >= 0, got {:e}",
                self.spring
            )));
        }
        if !(self.temperature >= 0.0) {
            return Err(Error::Domain(format!(
                "temperature must be >= 0, got {:e}",
                self.temperature
            )));
        }
        if !(self.tau_e > 0.0) {
            return Err(Error::Domain(format!(
                "tau_e must be > 0, got {:e}",
                self.tau_e
            )));
        }
        match (self.zeta, self.omega_cutoff) {
            (Some(_), Some(_)) => Err(Error::Config(
                "exactly one bath kind expected: both zeta and Omega were given".into(),
            )),
            (None, None) => Err(Error::Config(
                "exactly one bath kind expected: neither zeta nor Omega was given".into(),
            )),
            (Some(z), None) => {
                if !(z > 0.0) {
                    return Err(Error::Domain(format!("zeta must be > 0, got {z:e}")));
                }
                Ok(BathKind::Ohmic { zeta: z })
            }
            (None, Some(omega)) => {
                if !(omega > 0.0) {
                    return Err(Error::Domain(format!("Omega must be > 0, got {omega:e}")));
                }
                if omega * self.tau_e > 1.0 && !self.allow_negative_bare_mass {
                    return Err(Error::CutoffConstraint {
                        omega,
                        inv_tau_e: 1.0 / self.tau_e,
                    });
                }
                Ok(BathKind::Blackbody {
                    omega_cutoff: omega,
                })
            }
        }
    }

    pub fn oscillator(&self) -> Result<OscillatorParams> {
        oscillator_derived(self.spring, self.mass, self.tau_e)
    }
}

/// Parse a flat key = value text block (comments with '#', blank lines
/// ignored) into constants. Unknown keys are rejected. Keys:
/// electron_charge, speed_of_light, hbar, boltzmann, observed_mass.
pub fn constants_from_key_values(text: &str) -> Result<PhysicalConstants> {
    let mut c = PhysicalConstants::codata();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Input(format!(
                "line {}: expected key = value, got {raw:?}",
                lineno + 1
            )));
        };
        let v: f64 = value.trim().parse().map_err(|_| {
            Error::Input(format!("line {}: bad number {:?}", lineno + 1, value.trim()))
        })?;
        match key.trim() {
            "electron_charge" => c.electron_charge = v,
            "speed_of_light" => c.speed_of_light = v,
            "hbar" => c.hbar = v,
            "boltzmann" => c.boltzmann = v,
            "observed_mass" => c.observed_mass = v,
            other => {
                return Err(Error::Input(format!(
                    "line {}: unknown constant {other:?}",
                    lineno + 1
                )))
            }
        }
    }
    c.validate()?;
    Ok(c)
}
