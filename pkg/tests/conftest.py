"""Shared fixtures: reference parameter sets and independent oracles.

The oracles deliberately take different numerical routes from the package
(time integration instead of null-space extraction, adaptive quadrature
instead of Gauss-Hermite, dense matrix exponentials instead of the closed
form, split-step integration instead of per-mode exponentials) so that
agreement is evidence, not tautology.
"""

import warnings

import numpy as np
import pytest
from scipy.integrate import IntegrationWarning, quad, solve_ivp

from fwmprop import (DriveConfig, LevelScheme, OpticalTransitions,
                     ThermalParameters, build_liouvillian, steady_state)

GAMMA_D1 = 2 * np.pi * 5.75e6
GAMMA_D2 = 2 * np.pi * 6.07e6
UNIT = GAMMA_D1 / 4


@pytest.fixture(scope="session")
def scheme():
    return LevelScheme(
        gamma31=GAMMA_D1 / 4, gamma32=GAMMA_D1 / 6,
        gamma41=GAMMA_D2 / 4, gamma42=GAMMA_D2 / 6,
        gamma51=GAMMA_D1 / 12, gamma52=GAMMA_D2 / 2,
        gamma21=1e-3 * UNIT)


@pytest.fixture(scope="session")
def drive_ref():
    return DriveConfig(omega_c1=1.55 * GAMMA_D1 / 6,
                       omega_c2=1.43 * GAMMA_D2 / 6,
                       pump_p=0.7 * UNIT)


@pytest.fixture(scope="session")
def drive_nopump(drive_ref):
    return DriveConfig(omega_c1=drive_ref.omega_c1,
                       omega_c2=drive_ref.omega_c2, pump_p=0.0)


@pytest.fixture(scope="session")
def thermal_ref():
    return ThermalParameters(gamma_c=1600 * 22.8 * 240.0, n0=1.32e18,
                             v_th=240.0, delta_k=22.8)


@pytest.fixture(scope="session")
def thermal_nopump():
    return ThermalParameters(gamma_c=30000 * 22.8 * 240.0, n0=6.2e17,
                             v_th=240.0, delta_k=22.8)


@pytest.fixture(scope="session")
def transitions():
    return OpticalTransitions(lambda_p=795e-9, lambda_s=780e-9)


@pytest.fixture(scope="session")
def rho_ref(scheme, drive_ref):
    return steady_state(build_liouvillian(scheme, drive_ref)).rho


def integrate_to_steady(scheme, drive, rtol=1e-12, atol=1e-14):
    """Time-integration oracle: evolve from rho11 = 1 until stationary."""
    gen = build_liouvillian(scheme, drive).generator
    rho0 = np.zeros(25, dtype=complex)
    rho0[0] = 1.0

    rates = [scheme.gamma31, scheme.gamma41, drive.pump_p,
             abs(drive.omega_c1), abs(drive.omega_c2), scheme.gamma21]
    slowest = min(r for r in rates if r > 0)
    t_end = 50.0 / slowest

    def rhs(_, y):
        return gen @ y

    sol = solve_ivp(rhs, (0.0, t_end), rho0, method="BDF", rtol=rtol,
                    atol=atol, dense_output=False)
    y = sol.y[:, -1]
    assert np.linalg.norm(gen @ y) / np.linalg.norm(gen, ord=np.inf) < 1e-10
    rho = y.reshape(5, 5, order="F")
    rho = rho / np.trace(rho)
    return (rho + rho.conj().T) / 2


def kernel_quadrature(delta, wavenumber, width, v_th):
    """Adaptive-quadrature oracle for the velocity-average kernel."""
    kv = wavenumber * v_th
    z0 = (delta + 1j * width) / kv

    def integrand_re(t):
        return (np.exp(-t * t) / (z0 - t)).real

    def integrand_im(t):
        return (np.exp(-t * t) / (z0 - t)).imag

    points = sorted({max(-11.9, min(11.9, p)) for p in
                     (z0.real - 10 * z0.imag, z0.real,
                      z0.real + 10 * z0.imag)})
    with warnings.catch_warnings():
        # The 1e-10 agreement assertions validate the achieved accuracy;
        # quad's roundoff-detection warning at these tolerances is noise.
        warnings.simplefilter("ignore", IntegrationWarning)
        re, _ = quad(integrand_re, -12, 12, points=points, limit=400,
                     epsabs=1e-14, epsrel=1e-13)
        im, _ = quad(integrand_im, -12, 12, points=points, limit=400,
                     epsabs=1e-14, epsrel=1e-13)
    return (re + 1j * im) / (kv * np.sqrt(np.pi))


def split_step_rk4(grid, transitions, chi_fn, fields_k, z_total, n_steps):
    """Split-step oracle: exact diffraction halves around RK4 coupling.

    fields_k is an (omega_p, omega_s) tuple in momentum space; returns the
    propagated tuple, also in momentum space.
    """
    kperp = grid.kperp()
    kp, ks = transitions.k_p, transitions.k_s
    dz = z_total / n_steps
    half_p = np.exp(-1j * kperp ** 2 / (2 * kp) * dz / 2)
    half_s = np.exp(-1j * kperp ** 2 / (2 * ks) * dz / 2)

    chi = chi_fn(kperp)
    c11 = 1j * (kp / 2) * chi.chi_p
    c12 = 1j * (kp / 2) * chi.chi_sp
    c21 = 1j * (ks / 2) * chi.chi_ps
    c22 = 1j * (ks / 2) * chi.chi_s

    def coupling(op, os_):
        return c11 * op + c12 * os_, c21 * op + c22 * os_

    op, os_ = fields_k
    for _ in range(n_steps):
        op, os_ = half_p * op, half_s * os_
        k1p, k1s = coupling(op, os_)
        k2p, k2s = coupling(op + dz / 2 * k1p, os_ + dz / 2 * k1s)
        k3p, k3s = coupling(op + dz / 2 * k2p, os_ + dz / 2 * k2s)
        k4p, k4s = coupling(op + dz * k3p, os_ + dz * k3s)
        op = op + dz / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        os_ = os_ + dz / 6 * (k1s + 2 * k2s + 2 * k3s + k4s)
        op, os_ = half_p * op, half_s * os_
    return op, os_


def random_drive(rng, base: DriveConfig, spread=0.5):
    """Drive with each rate scaled by a random factor in [1-s, 1+s]."""
    fac = 1 - spread + 2 * spread * rng.random(3)
    return DriveConfig(omega_c1=base.omega_c1 * fac[0],
                       omega_c2=base.omega_c2 * fac[1],
                       delta_c1=base.delta_c1, delta_c2=base.delta_c2,
                       pump_p=base.pump_p * fac[2])


def random_scheme(rng, base: LevelScheme, spread=0.5):
    """Level scheme with each decay rate scaled randomly in [1-s, 1+s]."""
    fac = 1 - spread + 2 * spread * rng.random(7)
    return LevelScheme(
        gamma31=base.gamma31 * fac[0], gamma32=base.gamma32 * fac[1],
        gamma41=base.gamma41 * fac[2], gamma42=base.gamma42 * fac[3],
        gamma51=base.gamma51 * fac[4], gamma52=base.gamma52 * fac[5],
        gamma21=base.gamma21 * fac[6])
