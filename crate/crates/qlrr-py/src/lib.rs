//! Python bindings: the main types and operations of the toolkit.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use qlrr::bath;
use qlrr::correlations::{self, ThermalState};
use qlrr::dynamics::{self, IntegrateOptions};
use qlrr::error::Error;
use qlrr::relativistic;
use qlrr::response;
use qlrr::stochastic;
use qlrr::units;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Numeric(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy3<T> {
    fn py(self) -> PyResult<T>;
}
impl<T> IntoPy3<T> for Result<T, Error> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py_err)
    }
}

/// One-sided bath spectral distribution Re mu~(omega + i0+).
#[pyclass(name = "SpectralDistribution")]
#[derive(Clone)]
struct PySpectral {
    inner: bath::SpectralDistribution,
}

#[pymethods]
impl PySpectral {
    #[staticmethod]
    fn ohmic(zeta: f64) -> Self {
        PySpectral {
            inner: bath::SpectralDistribution::Ohmic { zeta },
        }
    }

    #[staticmethod]
    fn blackbody(coupling: f64, cutoff: f64) -> Self {
        PySpectral {
            inner: bath::SpectralDistribution::Blackbody { coupling, cutoff },
        }
    }

    #[staticmethod]
    fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> PyResult<Self> {
        Ok(PySpectral {
            inner: bath::SpectralDistribution::Tabulated(
                bath::TabulatedSpectrum::new(grid, values).py()?,
            ),
        })
    }

    fn value(&self, omega: f64) -> f64 {
        self.inner.value(omega)
    }

    /// mu~(z) for Im z >= 0 (closed form where available).
    fn mu_tilde(&self, z: Complex64) -> PyResult<Complex64> {
        self.inner.mu_tilde(z).py()
    }

    /// Stieltjes-inversion quadrature for Im z > 0 (independent of the
    /// closed form).
    fn stieltjes(&self, z: Complex64) -> PyResult<Complex64> {
        bath::stieltjes_mu(z, &self.inner).py()
    }

    fn flat_limit(&self) -> PyResult<f64> {
        self.inner.flat_limit().py()
    }

    /// (delta_coefficient, smooth_part(t)) of the time-domain memory kernel.
    fn memory_kernel(&self, t: f64) -> PyResult<(f64, f64)> {
        let k = bath::memory_kernel_time(&self.inner).py()?;
        let s = k.smooth_part(t).py()?;
        Ok((k.delta_coefficient, s))
    }
}

/// Linear response of the particle coordinate to an applied force.
#[pyclass(name = "Susceptibility")]
#[derive(Clone)]
struct PySusceptibility {
    inner: response::Susceptibility,
}

#[pymethods]
impl PySusceptibility {
    /// Second-order (runaway-free) polarizability.
    #[staticmethod]
    fn ford_oconnell(mass: f64, spring: f64, tau_e: f64) -> Self {
        PySusceptibility {
            inner: response::Susceptibility::FordOConnell {
                mass,
                spring,
                tau_e,
            },
        }
    }

    /// Point-electron comparison response (carries the runaway pole).
    #[staticmethod]
    fn abraham_lorentz(mass: f64, tau_e: f64) -> Self {
        PySusceptibility {
            inner: response::Susceptibility::AbrahamLorentz { mass, tau_e },
        }
    }

    #[staticmethod]
    fn general(m_bare: f64, spring: f64, bath: &PySpectral) -> Self {
        PySusceptibility {
            inner: response::Susceptibility::General {
                m_bare,
                spring,
                bath: bath.inner.clone(),
            },
        }
    }

    fn eval(&self, omega: Complex64) -> PyResult<Complex64> {
        self.inner.eval(omega).py()
    }

    /// [(pole, "upper"|"lower"|"real_axis"), ...]
    fn poles(&self) -> PyResult<Vec<(Complex64, String)>> {
        Ok(response::pole_diagnostics(&self.inner)
            .py()?
            .into_iter()
            .map(|p| {
                let hp = match p.half_plane {
                    response::HalfPlane::Upper => "upper",
                    response::HalfPlane::Lower => "lower",
                    response::HalfPlane::RealAxis => "real_axis",
                };
                (p.position, hp.to_string())
            })
            .collect())
    }

    fn kramers_kronig_residual(&self, grid: Vec<f64>) -> PyResult<f64> {
        response::kramers_kronig_residual(&self.inner, &grid).py()
    }
}

/// Differentiable applied force with analytic derivative.
#[pyclass(name = "ForceProfile")]
#[derive(Clone)]
struct PyForce {
    inner: dynamics::ForceProfile,
}

#[pymethods]
impl PyForce {
    #[staticmethod]
    fn zero() -> Self {
        PyForce {
            inner: dynamics::ForceProfile::Zero,
        }
    }

    #[staticmethod]
    fn gaussian(f0: f64, t0: f64, sigma: f64) -> Self {
        PyForce {
            inner: dynamics::ForceProfile::GaussianPulse { f0, t0, sigma },
        }
    }

    #[staticmethod]
    fn smooth_step(f0: f64, t_on: f64, ramp: f64) -> Self {
        PyForce {
            inner: dynamics::ForceProfile::SmoothStep { f0, t_on, ramp },
        }
    }

    #[staticmethod]
    fn capacitor_gate(f0: f64, t_on: f64, ramp: f64, plateau: f64) -> Self {
        PyForce {
            inner: dynamics::ForceProfile::CapacitorGate {
                f0,
                t_on,
                ramp,
                plateau,
            },
        }
    }

    #[staticmethod]
    #[pyo3(signature = (f0, omega, window=None))]
    fn sinusoid(f0: f64, omega: f64, window: Option<(f64, f64, f64)>) -> Self {
        PyForce {
            inner: dynamics::ForceProfile::Sinusoid { f0, omega, window },
        }
    }

    fn value(&self, t: f64) -> f64 {
        self.inner.value(t)
    }

    fn derivative(&self, t: f64) -> f64 {
        self.inner.derivative(t)
    }

    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }
}

/// Sampled deterministic trajectory.
#[pyclass(name = "Trajectory")]
struct PyTrajectory {
    #[pyo3(get)]
    t: Vec<f64>,
    #[pyo3(get)]
    x: Vec<f64>,
    #[pyo3(get)]
    v: Vec<f64>,
    #[pyo3(get)]
    a: Vec<f64>,
    #[pyo3(get)]
    f: Vec<f64>,
    #[pyo3(get)]
    radiated_power: Vec<f64>,
    #[pyo3(get)]
    runaway: bool,
    #[pyo3(get)]
    truncated_at: Option<f64>,
}

impl From<dynamics::Trajectory> for PyTrajectory {
    fn from(t: dynamics::Trajectory) -> Self {
        PyTrajectory {
            runaway: t.meta.runaway,
            truncated_at: t.meta.truncated_at,
            t: t.t,
            x: t.x,
            v: t.v,
            a: t.a,
            f: t.f,
            radiated_power: t.radiated_power,
        }
    }
}

#[pyfunction]
fn derive_tau_e(e: f64, mass: f64, c: f64) -> PyResult<f64> {
    units::derive_tau_e(e, mass, c).py()
}

#[pyfunction]
#[pyo3(signature = (observed_mass, omega_cutoff, tau_e, allow_negative_bare_mass=false))]
fn bare_mass(
    observed_mass: f64,
    omega_cutoff: f64,
    tau_e: f64,
    allow_negative_bare_mass: bool,
) -> PyResult<f64> {
    units::bare_mass(observed_mass, omega_cutoff, tau_e, allow_negative_bare_mass).py()
}

/// (omega0, gamma, omega1, overdamped)
#[pyfunction]
fn oscillator_derived(spring: f64, mass: f64, tau_e: f64) -> PyResult<(f64, f64, f64, bool)> {
    let p = units::oscillator_derived(spring, mass, tau_e).py()?;
    Ok((p.omega0, p.gamma, p.omega1, p.overdamped))
}

#[pyfunction]
fn codata_constants() -> std::collections::HashMap<String, f64> {
    let c = units::PhysicalConstants::codata();
    [
        ("electron_charge", c.electron_charge),
        ("speed_of_light", c.speed_of_light),
        ("hbar", c.hbar),
        ("boltzmann", c.boltzmann),
        ("observed_mass", c.observed_mass),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

#[pyfunction]
fn field_to_force(e: f64, e_field: f64, omega: f64, tau_e: f64) -> f64 {
    dynamics::field_to_force(e, e_field, omega, tau_e)
}

fn thermal(kt: f64, hbar: f64, classical: bool) -> ThermalState {
    if classical {
        ThermalState::Classical { kt }
    } else {
        ThermalState::Quantum { hbar, kt }
    }
}

/// (smooth, delta_weight, delta_prime_weight, abs_error)
#[pyfunction]
#[pyo3(signature = (dt, bath, kt, hbar=1.0, classical=false))]
fn force_autocorrelation(
    dt: f64,
    bath: &PySpectral,
    kt: f64,
    hbar: f64,
    classical: bool,
) -> PyResult<(f64, f64, f64, f64)> {
    let v = correlations::force_autocorrelation(dt, &bath.inner, &thermal(kt, hbar, classical))
        .py()?;
    Ok((v.smooth, v.delta_weight, v.delta_prime_weight, v.abs_error))
}

#[pyfunction]
#[pyo3(signature = (dt, bath, hbar=1.0))]
fn force_commutator(dt: f64, bath: &PySpectral, hbar: f64) -> PyResult<(f64, f64, f64, f64)> {
    let v = correlations::force_commutator(dt, &bath.inner, hbar).py()?;
    Ok((v.smooth, v.delta_weight, v.delta_prime_weight, v.abs_error))
}

#[pyfunction]
#[pyo3(signature = (dt, susceptibility, kt, hbar=1.0, classical=false, cutoff=None))]
fn position_autocorrelation(
    dt: f64,
    susceptibility: &PySusceptibility,
    kt: f64,
    hbar: f64,
    classical: bool,
    cutoff: Option<f64>,
) -> PyResult<(f64, f64)> {
    let v = correlations::position_autocorrelation(
        dt,
        &susceptibility.inner,
        &thermal(kt, hbar, classical),
        cutoff,
    )
    .py()?;
    Ok((v.smooth, v.abs_error))
}

#[pyfunction]
fn classical_oscillator_autocorr(
    t: f64,
    spring: f64,
    mass: f64,
    tau_e: f64,
    kt: f64,
) -> PyResult<f64> {
    correlations::classical_oscillator_autocorr(t, spring, mass, tau_e, kt).py()
}

#[pyfunction]
#[pyo3(signature = (susceptibility, hbar=1.0))]
fn equal_time_xv_commutator(susceptibility: &PySusceptibility, hbar: f64) -> PyResult<f64> {
    correlations::equal_time_xv_commutator(&susceptibility.inner, hbar).py()
}

/// dict with closed_form, direct_integral, leading, leading_log_warning
#[pyfunction]
#[pyo3(signature = (omega0, tau_e, mass, c, hbar, cutoff_factor=1.0))]
fn msd_zero_temperature(
    omega0: f64,
    tau_e: f64,
    mass: f64,
    c: f64,
    hbar: f64,
    cutoff_factor: f64,
) -> PyResult<std::collections::HashMap<String, f64>> {
    let r = correlations::msd_zero_temperature(omega0, tau_e, mass, c, hbar, cutoff_factor).py()?;
    Ok([
        ("closed_form".to_string(), r.closed_form),
        ("direct_integral".to_string(), r.direct_integral),
        ("leading".to_string(), r.leading),
        (
            "leading_log_warning".to_string(),
            r.leading_log_warning as i32 as f64,
        ),
    ]
    .into_iter()
    .collect())
}

#[pyfunction]
#[pyo3(signature = (force, mass, tau_e, x0, v0, a0, t0, t1, rel_tol=1e-9, n_out=800))]
#[allow(clippy::too_many_arguments)]
fn integrate_abraham_lorentz(
    force: &PyForce,
    mass: f64,
    tau_e: f64,
    x0: f64,
    v0: f64,
    a0: f64,
    t0: f64,
    t1: f64,
    rel_tol: f64,
    n_out: usize,
) -> PyResult<PyTrajectory> {
    let opts = IntegrateOptions {
        rel_tol,
        abs_tol: rel_tol * 1e-3,
        n_out,
        ..Default::default()
    };
    dynamics::integrate_abraham_lorentz(&force.inner, mass, tau_e, x0, v0, a0, (t0, t1), &opts)
        .map(Into::into)
        .py()
}

#[pyfunction]
#[pyo3(signature = (force, mass, tau_e, spring, x0, v0, t0, t1, rel_tol=1e-9, n_out=800))]
#[allow(clippy::too_many_arguments)]
fn integrate_fo_oscillator(
    force: &PyForce,
    mass: f64,
    tau_e: f64,
    spring: f64,
    x0: f64,
    v0: f64,
    t0: f64,
    t1: f64,
    rel_tol: f64,
    n_out: usize,
) -> PyResult<PyTrajectory> {
    let opts = IntegrateOptions {
        rel_tol,
        abs_tol: rel_tol * 1e-3,
        n_out,
        ..Default::default()
    };
    dynamics::integrate_fo_oscillator(
        &force.inner,
        mass,
        tau_e,
        spring,
        x0,
        v0,
        (t0, t1),
        &opts,
    )
    .map(Into::into)
    .py()
}

/// (total, total_from_profile)
#[pyfunction]
#[pyo3(signature = (force, mass, tau_e, n_profile=500))]
fn radiated_energy(
    force: &PyForce,
    mass: f64,
    tau_e: f64,
    n_profile: usize,
) -> PyResult<(f64, f64)> {
    let r = dynamics::radiated_energy(&force.inner, mass, tau_e, n_profile).py()?;
    Ok((r.total, r.total_from_profile))
}

#[pyfunction]
#[pyo3(signature = (bath, kt, dt, n, seed, hbar=None))]
fn synthesize_noise(
    bath: &PySpectral,
    kt: f64,
    dt: f64,
    n: usize,
    seed: u64,
    hbar: Option<f64>,
) -> PyResult<Vec<f64>> {
    let mode = match hbar {
        Some(h) => stochastic::NoiseMode::Quantum { hbar: h },
        None => stochastic::NoiseMode::Classical,
    };
    Ok(stochastic::synthesize_noise(&bath.inner, kt, mode, dt, n, seed)
        .py()?
        .samples)
}

/// Free-particle diffusion estimate: (D, ci_half_width).
#[pyfunction]
#[pyo3(signature = (zeta, kt, mass, n_traj, t_max, dt, seed))]
fn brownian_diffusion(
    zeta: f64,
    kt: f64,
    mass: f64,
    n_traj: usize,
    t_max: f64,
    dt: f64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let config = stochastic::LangevinConfig {
        zeta,
        kt,
        mass,
        n_traj,
        t_span: (0.0, t_max),
        dt,
        seed,
        store_members: 0,
        ..Default::default()
    };
    let ens = stochastic::simulate_langevin_ohmic(&config).py()?;
    let est = stochastic::estimate_diffusion(&ens).py()?;
    Ok((est.d, est.ci_half_width))
}

/// Capacitor run summary dict.
#[pyfunction]
#[pyo3(signature = (e0, gap, entry_speed, ramp_time, mass=1.0, charge=1.0, tau_e=0.05, c=1.0))]
#[allow(clippy::too_many_arguments)]
fn capacitor_scenario(
    e0: f64,
    gap: f64,
    entry_speed: f64,
    ramp_time: f64,
    mass: f64,
    charge: f64,
    tau_e: f64,
    c: f64,
) -> PyResult<std::collections::HashMap<String, f64>> {
    let params = relativistic::RelativisticParams {
        mass,
        charge,
        tau_e,
        speed_of_light: c,
    };
    let (traj, report) =
        relativistic::capacitor_scenario(e0, gap, entry_speed, ramp_time, &params, 1e-10, 2000)
            .py()?;
    Ok([
        ("traversed".to_string(), report.traversed as i32 as f64),
        (
            "max_mass_shell_residual".to_string(),
            traj.max_mass_shell_residual(),
        ),
        (
            "plateau_power_fraction".to_string(),
            report.plateau_power_fraction,
        ),
        ("total_radiated_proxy".to_string(), report.total_radiated_proxy),
        (
            "radiated_energy_prediction".to_string(),
            report.radiated_energy_prediction,
        ),
    ]
    .into_iter()
    .collect())
}

/// Quick verification pass: list of (id, name, passed, details).
#[pyfunction]
#[pyo3(signature = (quick=true))]
fn verify(quick: bool) -> Vec<(usize, String, bool, String)> {
    qlrr::verify::run_all(quick)
        .into_iter()
        .map(|r| (r.id, r.name.to_string(), r.passed, r.details))
        .collect()
}

#[pymodule]
fn qlrr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectral>()?;
    m.add_class::<PySusceptibility>()?;
    m.add_class::<PyForce>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(derive_tau_e, m)?)?;
    m.add_function(wrap_pyfunction!(bare_mass, m)?)?;
    m.add_function(wrap_pyfunction!(oscillator_derived, m)?)?;
    m.add_function(wrap_pyfunction!(codata_constants, m)?)?;
    m.add_function(wrap_pyfunction!(field_to_force, m)?)?;
    m.add_function(wrap_pyfunction!(force_autocorrelation, m)?)?;
    m.add_function(wrap_pyfunction!(force_commutator, m)?)?;
    m.add_function(wrap_pyfunction!(position_autocorrelation, m)?)?;
    m.add_function(wrap_pyfunction!(classical_oscillator_autocorr, m)?)?;
    m.add_function(wrap_pyfunction!(equal_time_xv_commutator, m)?)?;
    m.add_function(wrap_pyfunction!(msd_zero_temperature, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_abraham_lorentz, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_fo_oscillator, m)?)?;
    m.add_function(wrap_pyfunction!(radiated_energy, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_noise, m)?)?;
    m.add_function(wrap_pyfunction!(brownian_diffusion, m)?)?;
    m.add_function(wrap_pyfunction!(capacitor_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
