#!/usr/bin/env python3
"""Smoke test for the qlrr_py extension module.

Builds nothing itself: expects `cargo build -p qlrr-py --release` to have
produced the cdylib, which is copied next to a temp dir and imported.
"""

import math
import shutil
import sys
import sysconfig
import tempfile
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / "release" / "libqlrr_py.so",
        root / "target" / "release" / "qlrr_py.dll",
        root / "target" / "release" / "libqlrr_py.dylib",
        root / "target" / "debug" / "libqlrr_py.so",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("cdylib not found; run `cargo build -p qlrr-py --release` first")
    tmp = Path(tempfile.mkdtemp(prefix="qlrr_py_"))
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy2(built, tmp / f"qlrr_py{suffix}")
    sys.path.insert(0, str(tmp))
    import qlrr_py

    return qlrr_py


def approx(a, b, rel=1e-9, abs_tol=0.0):
    assert math.isfinite(a) and math.isfinite(b), (a, b)
    assert abs(a - b) <= max(rel * max(abs(a), abs(b)), abs_tol), (a, b)


def main():
    q = load_module()

    # constants and tau_e
    c = q.codata_constants()
    tau_e = q.derive_tau_e(c["electron_charge"], c["observed_mass"], c["speed_of_light"])
    assert abs(tau_e - 6.25e-24) / 6.25e-24 < 5e-3, tau_e
    approx(q.bare_mass(1.0, 0.5, 1.0), 0.5)
    omega0, gamma, omega1, overdamped = q.oscillator_derived(1.0, 1.0, 0.1)
    approx(omega0, 1.0)
    approx(gamma, 0.1)
    assert not overdamped

    # bath spectra: Stieltjes quadrature against the closed form
    bath = q.SpectralDistribution.blackbody(1.0, 1.0)
    approx(bath.value(1.0), 0.5)
    z = 0.7 + 1.3j
    approx(abs(bath.stieltjes(z) - bath.mu_tilde(z)), 0.0, abs_tol=1e-8)
    delta, smooth = bath.memory_kernel(1.0)
    approx(delta, 1.0)
    approx(smooth, -math.exp(-1.0), rel=1e-6)

    # susceptibility equivalence and poles
    fo = q.Susceptibility.ford_oconnell(1.0, 0.8, 0.3)
    gen = q.Susceptibility.general(0.0, 0.8, q.SpectralDistribution.blackbody(0.3, 1.0 / 0.3))
    for w in (0.3 + 0j, 2.0 + 0j, 1.0 + 2.0j):
        approx(abs(fo.eval(w) - gen.eval(w)), 0.0, abs_tol=1e-10 * abs(fo.eval(w)))
    al = q.Susceptibility.abraham_lorentz(1.0, 0.5)
    upper = [p for p, hp in al.poles() if hp == "upper"]
    assert len(upper) == 1 and abs(upper[0] - 2.0j) < 1e-12, upper

    # correlations: classical closed form and equipartition
    approx(q.classical_oscillator_autocorr(0.0, 2.0, 1.0, 0.05, 1.1), 1.1 / 2.0)
    smooth, err = q.position_autocorrelation(0.0, fo, kt=1.0, classical=True)
    approx(smooth, 1.0 / 0.8, rel=1e-7)
    xv = q.equal_time_xv_commutator(q.Susceptibility.ford_oconnell(1.0, 0.01, 1.0))
    approx(xv, 0.99, rel=1e-2)

    # dynamics: runaway vs runaway-free on the same pulse
    pulse = q.ForceProfile.gaussian(1.0, 30.0, 3.0)
    al_traj = q.integrate_abraham_lorentz(pulse, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 80.0, n_out=3000)
    assert al_traj.runaway and al_traj.truncated_at is not None
    fo_traj = q.integrate_fo_oscillator(pulse, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 80.0)
    assert not fo_traj.runaway
    v_final = fo_traj.v[-1]
    expect = 3.0 * math.sqrt(2.0 * math.pi)  # ∫f/M for the unit Gaussian pulse
    approx(v_final, expect, rel=1e-6)
    total, from_profile = q.radiated_energy(pulse, 1.0, 0.3)
    approx(total, 0.3 * 3.0 * math.sqrt(math.pi), rel=1e-8)
    approx(from_profile, total, rel=1e-5)

    # stochastic: seeded determinism and the Einstein relation
    samples_a = q.synthesize_noise(q.SpectralDistribution.ohmic(1.0), 1.0, 0.05, 512, seed=4)
    samples_b = q.synthesize_noise(q.SpectralDistribution.ohmic(1.0), 1.0, 0.05, 512, seed=4)
    assert samples_a == samples_b
    d, ci = q.brownian_diffusion(1.0, 1.0, 1.0, n_traj=2000, t_max=40.0, dt=0.05, seed=11)
    assert abs(d - 1.0) < 0.15, (d, ci)

    # relativistic capacitor: silent plateau, mass shell intact
    report = q.capacitor_scenario(5e-8, 60.0, 0.02, 500.0)
    assert report["traversed"] == 1.0
    assert report["max_mass_shell_residual"] <= 1e-9
    assert report["plateau_power_fraction"] <= 1e-6

    print("qlrr_py smoke test passed")


if __name__ == "__main__":
    main()
