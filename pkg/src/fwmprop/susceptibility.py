"""Motion-induced momentum-space susceptibilities of the five-level vapor.

Evaluates the Doppler-averaged single-photon kernels, the four coupled
susceptibilities (probe, signal, and the two four-wave-mixing channels) as
functions of the transverse wavevector magnitude, their small-k expansion,
the flat-absorption detuning, the transverse bandwidth scales, and the
density calibration that cancels paraxial diffraction.

Conventions: angular rates in rad/s, lengths in m, wavevectors in 1/m.
The thermal velocity is v_th = sqrt(2 kB T / m), so the per-Cartesian
component velocity variance is v_th^2/2.  The ground-state coherence
diffusion coefficient is accordingly D = (v_th^2/2)/(gamma_c1 - i*Delta)
by default ("maxwell"); the variant "as-printed" uses v_th^2 in the
numerator, which some treatments quote from the uncorrected second-moment
relation.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.constants import k as KB
from scipy.optimize import brentq
from scipy.special import wofz

from .atom import DriveConfig, LevelScheme
from .errors import NoRoot

_GH_NODES, _GH_WEIGHTS = hermgauss(64)
# Contour offset for the shifted Gauss-Hermite evaluation; poles closer to
# the real axis than _GH_SPLIT are handled on the shifted line plus residue.
_GH_SHIFT = 1.5
_GH_SPLIT = 0.75


@dataclass(frozen=True)
class ThermalParameters:
    """Thermal-motion and collision parameters of the vapor cell.

    v_th is the Maxwell width sqrt(2 kB T / m); it may be supplied directly
    or derived from temperature and atomic mass.  delta_k is the two-photon
    wavevector mismatch used only in the Dicke-limit diagnostic.  n0 is the
    atomic number density.
    """

    gamma_c: float
    n0: float
    v_th: float = None
    temperature: float = None
    mass: float = None
    delta_k: float = 0.0

    def __post_init__(self):
        if self.v_th is None:
            if self.temperature is None or self.mass is None:
                raise ValueError("supply v_th or both temperature and mass")
            object.__setattr__(
                self, "v_th", np.sqrt(2 * KB * self.temperature / self.mass))
        if self.v_th <= 0 or self.gamma_c < 0 or self.n0 <= 0:
            raise ValueError("v_th and n0 must be > 0, gamma_c >= 0")


@dataclass(frozen=True)
class OpticalTransitions:
    """Probe and signal wavelengths; wave numbers are derived."""

    lambda_p: float
    lambda_s: float

    def __post_init__(self):
        if self.lambda_p <= 0 or self.lambda_s <= 0:
            raise ValueError("wavelengths must be > 0")

    @property
    def k_p(self):
        return 2 * np.pi / self.lambda_p

    @property
    def k_s(self):
        return 2 * np.pi / self.lambda_s


@dataclass(frozen=True)
class KFactors:
    """Doppler kernels and single-photon spectral factors for both fields.

    g31/g41 are the raw velocity-averaged kernels; k31/k41 the collision-
    renormalized factors i*g/(1 - i*gamma_c*g).  im_ratio_31/41 record the
    discarded relative imaginary size when factors are realified.
    """

    g31: complex
    g41: complex
    k31: complex
    k41: complex
    im_ratio_31: float
    im_ratio_41: float


@dataclass(frozen=True)
class SusceptibilitySet:
    """The four susceptibilities at one (or an array of) |k_perp|."""

    chi_p: np.ndarray
    chi_s: np.ndarray
    chi_sp: np.ndarray
    chi_ps: np.ndarray

    def as_matrix_entries(self):
        return self.chi_p, self.chi_s, self.chi_sp, self.chi_ps


def doppler_kernel(delta, wavenumber, width, v_th, method="gh64"):
    """Velocity average G = Int F(v) / (delta - k v + i width) dv.

    F is the 1D Maxwell distribution of width v_th along the beam.  The
    closed form is -i sqrt(pi) w(z)/(k v_th) with z = (delta + i width)/
    (k v_th) and w the Faddeeva function; Im G < 0 for physical inputs.

    method "gh64" evaluates the integral by 64-node Gauss-Hermite
    quadrature on a contour shifted off the real axis (plus the pole
    residue) so that narrow Lorentzian cores converge; method "faddeeva"
    uses the closed form.  Both agree to ~1e-12 relative.
    """
    kv = wavenumber * v_th
    z0 = (delta + 1j * width) / kv
    if method == "faddeeva":
        return -1j * np.sqrt(np.pi) * wofz(z0) / kv
    if method != "gh64":
        raise ValueError(f"unknown method {method!r}")

    # G = 1/(k v_th sqrt(pi)) * Int e^{-t^2}/(z0 - t) dt,  Im z0 > 0.
    z0 = complex(z0)
    if z0.imag >= _GH_SPLIT:
        integral = np.sum(_GH_WEIGHTS / (z0 - _GH_NODES))
    else:
        c = _GH_SHIFT
        shifted = np.exp(c * c) * np.sum(
            _GH_WEIGHTS * np.exp(-2j * c * _GH_NODES)
            / (z0 - _GH_NODES - 1j * c))
        integral = shifted - 2j * np.pi * np.exp(-z0 * z0)
    return integral / (kv * np.sqrt(np.pi))


def k_factors(scheme: LevelScheme, drive: DriveConfig,
              thermal: ThermalParameters, transitions: OpticalTransitions,
              delta, real_kernels=True, method="faddeeva") -> KFactors:
    """Spectral factors K31, K41 entering widths and prefactors.

    The kernel widths combine the excited-state width, the pump
    contribution and the collision rate: W_i = Gamma_i/2 + p/2 + gamma_c.
    The single-photon detunings are the two-photon detuning shifted by the
    respective control detuning.  With real_kernels the small imaginary
    parts of K31/K41 are dropped (they are ~1e-3 relative near resonance);
    the discarded ratios are recorded either way.
    """
    w3 = scheme.total3 / 2 + drive.pump_p / 2 + thermal.gamma_c
    w4 = scheme.total4 / 2 + drive.pump_p / 2 + thermal.gamma_c
    g31 = doppler_kernel(delta + drive.delta_c1, transitions.k_p, w3,
                         thermal.v_th, method=method)
    g41 = doppler_kernel(delta + drive.delta_c2, transitions.k_s, w4,
                         thermal.v_th, method=method)
    k31 = 1j * g31 / (1 - 1j * thermal.gamma_c * g31)
    k41 = 1j * g41 / (1 - 1j * thermal.gamma_c * g41)
    ratio31 = abs(k31.imag) / abs(k31)
    ratio41 = abs(k41.imag) / abs(k41)
    if real_kernels:
        k31 = k31.real
        k41 = k41.real
    return KFactors(g31=g31, g41=g41, k31=k31, k41=k41,
                    im_ratio_31=ratio31, im_ratio_41=ratio41)


def linewidths(scheme: LevelScheme, drive: DriveConfig,
               thermal: ThermalParameters, kfac: KFactors):
    """Derived rates: power broadenings, cross terms, Gamma1, gamma_c1."""
    gamma_c1 = thermal.gamma_c + drive.pump_p / 2 + scheme.gamma21
    g_c1 = kfac.k31 * abs(drive.omega_c1) ** 2
    g_c2 = kfac.k41 * abs(drive.omega_c2) ** 2
    g_a = kfac.k31 * np.conj(drive.omega_c1) * drive.omega_c2
    g_b = kfac.k41 * drive.omega_c1 * np.conj(drive.omega_c2)
    gamma1 = drive.pump_p / 2 + scheme.gamma21 + g_c1 + g_c2
    return {"gamma1": gamma1, "gamma_c1": gamma_c1,
            "gamma_power1": g_c1, "gamma_power2": g_c2,
            "gamma_a": g_a, "gamma_b": g_b}


def diffusion_coefficient(thermal: ThermalParameters, drive: DriveConfig,
                          scheme: LevelScheme, delta,
                          diffusion_model="maxwell"):
    """Ground-state coherence diffusion coefficient D.

    "maxwell" uses the per-component velocity variance v_th^2/2 of the
    Maxwell distribution; "as-printed" uses v_th^2 (the uncorrected
    second-moment relation found in some treatments).
    """
    gamma_c1 = thermal.gamma_c + drive.pump_p / 2 + scheme.gamma21
    if diffusion_model == "maxwell":
        num = thermal.v_th ** 2 / 2
    elif diffusion_model == "as-printed":
        num = thermal.v_th ** 2
    else:
        raise ValueError(f"unknown diffusion_model {diffusion_model!r}")
    return num / (gamma_c1 - 1j * delta)


def chi_full(kperp, delta, rho0, scheme: LevelScheme, drive: DriveConfig,
             thermal: ThermalParameters, transitions: OpticalTransitions,
             diffusion_model="maxwell", real_kernels=True,
             kfac: KFactors = None) -> SusceptibilitySet:
    """Four susceptibilities at transverse wavevector magnitude(s) kperp.

    rho0 is the zeroth-order 5x5 density matrix.  The shared resonance
    denominator is Q = i*delta - Gamma1 - D*kperp^2; the four channels are

        chi_p  = i P_p [ (rho11-rho33) + N_p /Q ]
        chi_s  = i P_s [ (rho11-rho44) + N_s /Q ]
        chi_sp = i P_p [ -rho34        + N_sp/Q ]
        chi_ps = i P_s [ -rho43        + N_ps/Q ]

    with P_p = 3 lambda_p^3 K31 n0 gamma31 / 8 pi^2 and P_s the analogue
    with K41/gamma41 (the outer kernel follows the optical transition).
    """
    if kfac is None:
        kfac = k_factors(scheme, drive, thermal, transitions, delta,
                         real_kernels=real_kernels)
    lw = linewidths(scheme, drive, thermal, kfac)
    diff = diffusion_coefficient(thermal, drive, scheme, delta,
                                 diffusion_model)

    kperp = np.asarray(kperp, dtype=float)
    q = 1j * delta - lw["gamma1"] - diff * kperp ** 2

    r11 = rho0[0, 0].real
    r33 = rho0[2, 2].real
    r44 = rho0[3, 3].real
    r23 = rho0[1, 2]
    r24 = rho0[1, 3]
    r34 = rho0[2, 3]
    r43 = rho0[3, 2]

    oc1, oc2 = drive.omega_c1, drive.omega_c2
    g_c1, g_c2 = lw["gamma_power1"], lw["gamma_power2"]
    g_a, g_b = lw["gamma_a"], lw["gamma_b"]

    n_p = g_c1 * (r11 - r33) + 1j * oc1 * r23 - g_b * r43
    n_s = g_c2 * (r11 - r44) + 1j * oc2 * r24 - g_a * r34
    n_sp = g_b * (r11 - r44) + 1j * oc1 * r24 - g_c1 * r34
    n_ps = g_a * (r11 - r33) + 1j * oc2 * r23 - g_c2 * r43

    pref_p = (3 * transitions.lambda_p ** 3 * kfac.k31 * thermal.n0
              * scheme.gamma31 / (8 * np.pi ** 2))
    pref_s = (3 * transitions.lambda_s ** 3 * kfac.k41 * thermal.n0
              * scheme.gamma41 / (8 * np.pi ** 2))

    return SusceptibilitySet(
        chi_p=1j * pref_p * ((r11 - r33) + n_p / q),
        chi_s=1j * pref_s * ((r11 - r44) + n_s / q),
        chi_sp=1j * pref_p * (-r34 + n_sp / q),
        chi_ps=1j * pref_s * (-r43 + n_ps / q),
    )


def chi_nopump(kperp, delta, scheme, drive, thermal, transitions,
               diffusion_model="maxwell", real_kernels=True):
    """Susceptibilities for p = 0 where the atom rests in |1>.

    Direct evaluation of the reduced forms, used as the reduction oracle:
    chi_p = i P_p (1 + Gamma_c1/Q0), chi_s = i P_s (1 + Gamma_c2/Q0),
    chi_sp = i P_p Gamma_b/Q0, chi_ps = i P_s Gamma_a/Q0,
    with Q0 = i*delta - Gamma0 - D0*kperp^2, Gamma0 = gamma21 + Gamma_c1 +
    Gamma_c2 and D0 evaluated at p = 0.
    """
    if drive.pump_p != 0:
        raise ValueError("chi_nopump requires pump_p = 0")
    kfac = k_factors(scheme, drive, thermal, transitions, delta,
                     real_kernels=real_kernels)
    lw = linewidths(scheme, drive, thermal, kfac)
    diff = diffusion_coefficient(thermal, drive, scheme, delta,
                                 diffusion_model)
    kperp = np.asarray(kperp, dtype=float)
    q0 = 1j * delta - lw["gamma1"] - diff * kperp ** 2
    pref_p = (3 * transitions.lambda_p ** 3 * kfac.k31 * thermal.n0
              * scheme.gamma31 / (8 * np.pi ** 2))
    pref_s = (3 * transitions.lambda_s ** 3 * kfac.k41 * thermal.n0
              * scheme.gamma41 / (8 * np.pi ** 2))
    return SusceptibilitySet(
        chi_p=1j * pref_p * (1 + lw["gamma_power1"] / q0),
        chi_s=1j * pref_s * (1 + lw["gamma_power2"] / q0),
        chi_sp=1j * pref_p * (lw["gamma_b"] / q0),
        chi_ps=1j * pref_s * (lw["gamma_a"] / q0),
    )


def chi_three_level_probe(kperp, delta, scheme, drive, thermal, transitions,
                          diffusion_model="maxwell", real_kernels=True):
    """Probe susceptibility of the bare Lambda system (no second control).

    The classic thermal-EIT result: chi_p = i P_p (1 + Gamma_c1 / (i*delta
    - (gamma21 + Gamma_c1) - D0 kperp^2)).
    """
    kfac = k_factors(scheme, drive, thermal, transitions, delta,
                     real_kernels=real_kernels)
    g_c1 = kfac.k31 * abs(drive.omega_c1) ** 2
    diff = diffusion_coefficient(thermal, drive, scheme, delta,
                                 diffusion_model)
    kperp = np.asarray(kperp, dtype=float)
    q0 = 1j * delta - (scheme.gamma21 + g_c1) - diff * kperp ** 2
    pref_p = (3 * transitions.lambda_p ** 3 * kfac.k31 * thermal.n0
              * scheme.gamma31 / (8 * np.pi ** 2))
    return 1j * pref_p * (1 + g_c1 / q0)


def chi_dicke(delta, rho0, scheme, drive, thermal, transitions,
              diffusion_model="maxwell", real_kernels=True):
    """Small-k expansion chi_i(kperp) ~ chi0_i + chi1_i * (kperp/k1)^2.

    chi0 is the on-axis value; chi1 is the analytic derivative of the pole
    term times k1^2, i.e. chi1 = i P_i N_i D k1^2 / (i*delta - Gamma1)^2.
    Returns two SusceptibilitySet objects (chi0, chi1).
    """
    kfac = k_factors(scheme, drive, thermal, transitions, delta,
                     real_kernels=real_kernels)
    lw = linewidths(scheme, drive, thermal, kfac)
    diff = diffusion_coefficient(thermal, drive, scheme, delta,
                                 diffusion_model)
    k1 = bandwidth_scales(scheme, drive, thermal, kfac)["k1"]

    chi0 = chi_full(0.0, delta, rho0, scheme, drive, thermal, transitions,
                    diffusion_model, real_kernels, kfac=kfac)

    u2 = 1.0 / (1j * delta - lw["gamma1"]) ** 2
    factor = diff * k1 ** 2 * u2

    r11 = rho0[0, 0].real
    r33 = rho0[2, 2].real
    r44 = rho0[3, 3].real
    r23, r24 = rho0[1, 2], rho0[1, 3]
    r34, r43 = rho0[2, 3], rho0[3, 2]
    oc1, oc2 = drive.omega_c1, drive.omega_c2
    g_c1, g_c2 = lw["gamma_power1"], lw["gamma_power2"]
    g_a, g_b = lw["gamma_a"], lw["gamma_b"]

    n_p = g_c1 * (r11 - r33) + 1j * oc1 * r23 - g_b * r43
    n_s = g_c2 * (r11 - r44) + 1j * oc2 * r24 - g_a * r34
    n_sp = g_b * (r11 - r44) + 1j * oc1 * r24 - g_c1 * r34
    n_ps = g_a * (r11 - r33) + 1j * oc2 * r23 - g_c2 * r43

    pref_p = (3 * transitions.lambda_p ** 3 * kfac.k31 * thermal.n0
              * scheme.gamma31 / (8 * np.pi ** 2))
    pref_s = (3 * transitions.lambda_s ** 3 * kfac.k41 * thermal.n0
              * scheme.gamma41 / (8 * np.pi ** 2))

    chi1 = SusceptibilitySet(
        chi_p=1j * pref_p * n_p * factor,
        chi_s=1j * pref_s * n_s * factor,
        chi_sp=1j * pref_p * n_sp * factor,
        chi_ps=1j * pref_s * n_ps * factor,
    )
    return chi0, chi1


def optimal_detuning(scheme: LevelScheme, drive: DriveConfig,
                     thermal: ThermalParameters,
                     transitions: OpticalTransitions,
                     legacy_no_pump=False):
    """Two-photon detuning that flattens Im chi against kperp^2.

    Delta_opt = -alpha * Gamma1 with alpha = sqrt(gamma_c1/(2 Gamma1 +
    gamma_c1)); the kernels are iterated once at the returned detuning so
    the pinned point is self-consistent.  With legacy_no_pump (and p = 0)
    returns the flat-absorption prescription -Gamma0 instead.
    """
    delta = 0.0
    for _ in range(8):
        kfac = k_factors(scheme, drive, thermal, transitions, delta,
                         real_kernels=True)
        lw = linewidths(scheme, drive, thermal, kfac)
        gamma1 = lw["gamma1"].real
        if legacy_no_pump:
            if drive.pump_p != 0:
                raise ValueError("legacy_no_pump requires pump_p = 0")
            new = -gamma1  # Gamma1 reduces to Gamma0 at p = 0
        else:
            alpha = np.sqrt(lw["gamma_c1"] / (2 * gamma1 + lw["gamma_c1"]))
            new = -alpha * gamma1
        if abs(new - delta) <= 1e-9 * max(1.0, abs(new)):
            delta = new
            break
        delta = new
    return delta


def balanced_detuning(scheme: LevelScheme, drive: DriveConfig,
                      thermal: ThermalParameters,
                      transitions: OpticalTransitions):
    """Two-photon detuning Delta = -Gamma1 that balances dark-mode gain.

    At this detuning the on-axis loss/gain of the surviving propagation
    eigenmode nearly vanishes for the reference pumped parameters, which
    keeps the output amplitudes of the reference scenario on target.
    """
    delta = 0.0
    for _ in range(8):
        kfac = k_factors(scheme, drive, thermal, transitions, delta,
                         real_kernels=True)
        lw = linewidths(scheme, drive, thermal, kfac)
        new = -lw["gamma1"].real
        if abs(new - delta) <= 1e-9 * max(1.0, abs(new)):
            delta = new
            break
        delta = new
    return delta


def bandwidth_scales(scheme: LevelScheme, drive: DriveConfig,
                     thermal: ThermalParameters, kfac_or_transitions,
                     delta=None):
    """Transverse wavevector scales k1 (as configured) and k0 (at p = 0).

    k1 = sqrt(Gamma1 * gamma_c1)/v_th with the rates of the supplied drive;
    k0 = sqrt(Gamma0 * gamma_c)/v_th with the power broadenings evaluated
    at zero pump and gamma21 retained.  Accepts either a precomputed
    KFactors or an OpticalTransitions (kernels evaluated at delta, default
    on resonance).
    """
    if isinstance(kfac_or_transitions, KFactors):
        kfac = kfac_or_transitions
        trans = None
    else:
        trans = kfac_or_transitions
        kfac = k_factors(scheme, drive, thermal, trans,
                         0.0 if delta is None else delta, real_kernels=True)
    lw = linewidths(scheme, drive, thermal, kfac)
    k1 = np.sqrt(lw["gamma1"].real * lw["gamma_c1"]) / thermal.v_th

    drive0 = DriveConfig(omega_c1=drive.omega_c1, omega_c2=drive.omega_c2,
                         delta_c1=drive.delta_c1, delta_c2=drive.delta_c2,
                         pump_p=0.0)
    if trans is not None:
        kfac0 = k_factors(scheme, drive0, thermal, trans,
                          0.0 if delta is None else delta, real_kernels=True)
    else:
        kfac0 = kfac
    lw0 = linewidths(scheme, drive0, thermal, kfac0)
    gamma0 = lw0["gamma1"].real
    k0 = np.sqrt(gamma0 * thermal.gamma_c) / thermal.v_th
    return {"k0": k0, "k1": k1}


def mode_matrix(kperp, chi: SusceptibilitySet,
                transitions: OpticalTransitions):
    """Propagation matrix A(kperp) of the coupled momentum-space equations.

    d/dz (Omega_p, Omega_s) = i A (Omega_p, Omega_s) with
    A = [[-kperp^2/2kp + (kp/2) chi_p,  (kp/2) chi_sp],
         [ (ks/2) chi_ps,              -kperp^2/2ks + (ks/2) chi_s]].
    Returns the four entries (a11, a12, a21, a22), broadcast over kperp.
    """
    kperp = np.asarray(kperp, dtype=float)
    kp, ks = transitions.k_p, transitions.k_s
    a11 = -kperp ** 2 / (2 * kp) + (kp / 2) * chi.chi_p
    a22 = -kperp ** 2 / (2 * ks) + (ks / 2) * chi.chi_s
    a12 = (kp / 2) * chi.chi_sp + np.zeros_like(kperp)
    a21 = (ks / 2) * chi.chi_ps + np.zeros_like(kperp)
    return a11, a12, a21, a22


def dominant_eigenvalue(kperp, chi: SusceptibilitySet,
                        transitions: OpticalTransitions):
    """Least-absorbed eigenvalue of A(kperp) (smallest imaginary part)."""
    a11, a12, a21, a22 = mode_matrix(kperp, chi, transitions)
    mean = (a11 + a22) / 2
    split = np.sqrt(((a11 - a22) / 2) ** 2 + a12 * a21)
    lam_plus = mean + split
    lam_minus = mean - split
    return np.where(lam_plus.imag <= lam_minus.imag, lam_plus, lam_minus)


def dicke_ratio(thermal: ThermalParameters, drive: DriveConfig):
    """Two-photon Doppler width over its homogeneous counterpart.

    The Dicke limit requires delta_k * v_th << gamma_c + p/2.
    """
    return thermal.delta_k * thermal.v_th / (thermal.gamma_c
                                             + drive.pump_p / 2)


def calibrate_density(scheme: LevelScheme, drive: DriveConfig,
                      thermal: ThermalParameters,
                      transitions: OpticalTransitions,
                      rho0, delta=None, k_fraction=0.1,
                      bracket=(1e15, 1e20), diffusion_model="maxwell",
                      real_kernels=True):
    """Density at which the medium curvature cancels paraxial diffraction.

    Root-finds n0 such that the real part of the dominant eigenvalue of
    A(kperp) is flat between kperp = 0 and kperp = k_fraction*k1, i.e. the
    medium's quadratic phase response cancels -kperp^2/2k.  The residual
    flatness at the returned density is below 1e-3 of the vacuum phase at
    the probe wavevector.  delta defaults to the optimal detuning.  Raises
    NoRoot when the bracket shows no sign change.
    """
    if delta is None:
        delta = optimal_detuning(scheme, drive, thermal, transitions)
    kfac = k_factors(scheme, drive, thermal, transitions, delta,
                     real_kernels=real_kernels)
    k1 = bandwidth_scales(scheme, drive, thermal, kfac)["k1"]
    k_probe = k_fraction * k1
    kbar = (transitions.k_p + transitions.k_s) / 2
    vacuum_phase = k_probe ** 2 / (2 * kbar)

    def flatness(log_n0):
        th = ThermalParameters(gamma_c=thermal.gamma_c, n0=10.0 ** log_n0,
                               v_th=thermal.v_th, delta_k=thermal.delta_k)
        lam = [dominant_eigenvalue(
            k, chi_full(k, delta, rho0, scheme, drive, th, transitions,
                        diffusion_model, real_kernels, kfac=kfac),
            transitions) for k in (0.0, k_probe)]
        return float(np.real(lam[1] - lam[0]))

    lo, hi = np.log10(bracket[0]), np.log10(bracket[1])
    f_lo, f_hi = flatness(lo), flatness(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoRoot(
            f"no curvature sign change for n0 in [{bracket[0]:.3e}, "
            f"{bracket[1]:.3e}] at delta={delta:.6e}")
    log_root = brentq(flatness, lo, hi, xtol=1e-12, rtol=1e-14)
    residual = abs(flatness(log_root)) / vacuum_phase
    if residual >= 1e-3:
        raise NoRoot(f"flatness residual {residual:.3e} at root")
    return 10.0 ** log_root
