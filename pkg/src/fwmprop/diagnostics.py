"""Beam and image observables: powers, widths, conversion balance, fidelity.

Widths use the 1/sqrt(e) amplitude radius convention: a Gaussian envelope
A exp(-r^2 / 2 w^2) has width w both as the fitted radius and as the rms
radius of its intensity, so the two estimators agree for clean beams and
their disagreement flags distortion.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .beamprop import FieldPair, TransverseGrid
from .errors import DegenerateImage, FitFailed, NotReached

# A radial Gaussian fit whose relative residual exceeds this is rejected.
_FIT_RESIDUAL_MAX = 0.2
# The balance detector needs at least this many propagation samples.
_MIN_BALANCE_SAMPLES = 50
# Derivative threshold |d(Ps/Pp)/dz| in units of 1/z_r.
_BALANCE_SLOPE = 0.05
# Number of consecutive samples that must stay below the threshold.
_BALANCE_HOLD = 5


@dataclass(frozen=True)
class BeamMetrics:
    """Scalar observables of one field component."""

    power: float
    width_fit: float
    width_rms: float
    peak: float


def beam_metrics(grid: TransverseGrid, omega) -> BeamMetrics:
    """Power, fitted and rms widths, and peak amplitude of one component.

    The rms width is the intensity-weighted radial second moment about the
    centroid.  The fitted width comes from a least-squares radial Gaussian
    I0 exp(-r^2/w^2) on the intensity, seeded by the rms estimate; a
    relative residual above 20% raises FitFailed carrying the rms width.
    """
    intensity = np.abs(omega) ** 2
    total = float(np.sum(intensity))
    if total <= 0:
        raise DegenerateImage("zero-intensity field")
    x = grid.x
    cx = float(np.sum(intensity * x[None, :]) / total)
    cy = float(np.sum(intensity * x[:, None]) / total)
    r2 = (x[None, :] - cx) ** 2 + (x[:, None] - cy) ** 2
    width_rms = float(np.sqrt(np.sum(intensity * r2) / total))
    power = total * grid.dx ** 2
    peak = float(np.max(np.abs(omega)))

    def model(r2_flat, i0, w):
        return i0 * np.exp(-r2_flat / (w * w))

    try:
        popt, _ = curve_fit(model, r2.ravel(), intensity.ravel(),
                            p0=(float(np.max(intensity)), width_rms),
                            maxfev=2000)
    except RuntimeError as exc:
        raise FitFailed(f"radial Gaussian fit did not converge: {exc}",
                        width_rms=width_rms)
    residual = float(np.linalg.norm(intensity.ravel()
                                    - model(r2.ravel(), *popt))
                     / np.linalg.norm(intensity.ravel()))
    if residual > _FIT_RESIDUAL_MAX:
        raise FitFailed(
            f"fit residual {residual:.3f} exceeds {_FIT_RESIDUAL_MAX}",
            width_rms=width_rms)
    return BeamMetrics(power=power, width_fit=float(abs(popt[1])),
                       width_rms=width_rms, peak=peak)


def pair_metrics(fields: FieldPair):
    """(probe, signal) BeamMetrics for a position-space field pair."""
    return (beam_metrics(fields.grid, fields.omega_p),
            beam_metrics(fields.grid, fields.omega_s))


def balance_point(z, power_p, power_s, z_r):
    """Distance where the signal/probe power ratio stops evolving.

    Returns the smallest sampled z at which |d(Ps/Pp)/dz| < 0.05/z_r and
    the bound keeps holding for the next five samples.  Requires at least
    50 samples; raises NotReached when the ratio never settles or the
    signal carries no power.  The detector is invariant under rescaling
    both powers by a common constant.
    """
    z = np.asarray(z, dtype=float)
    power_p = np.asarray(power_p, dtype=float)
    power_s = np.asarray(power_s, dtype=float)
    if z.size < _MIN_BALANCE_SAMPLES:
        raise ValueError(
            f"balance detector needs >= {_MIN_BALANCE_SAMPLES} samples, "
            f"got {z.size}")
    if np.all(power_s == 0):
        raise NotReached("signal power is identically zero")
    if np.any(power_p <= 0):
        raise NotReached("probe power vanishes along the path")
    ratio = power_s / power_p
    slope = np.gradient(ratio, z)
    below = np.abs(slope) < _BALANCE_SLOPE / z_r
    limit = z.size - _BALANCE_HOLD
    for i in range(z.size):
        if below[i] and i <= limit and np.all(
                below[i:i + _BALANCE_HOLD + 1]):
            return float(z[i])
    raise NotReached("power ratio keeps evolving over the sampled range")


def image_fidelity(reference, candidate):
    """Correlation and gain-optimal nrmse between two intensity images.

    correlation is the Pearson coefficient of the flattened intensities;
    nrmse is ||ref - g*cand|| / ||ref|| minimized over the scalar gain g.
    Raises DegenerateImage when either image has zero variance.
    """
    a = np.asarray(reference, dtype=float).ravel()
    b = np.asarray(candidate, dtype=float).ravel()
    if a.shape != b.shape:
        raise DegenerateImage("image shapes differ")
    da = a - a.mean()
    db = b - b.mean()
    va = float(np.dot(da, da))
    vb = float(np.dot(db, db))
    if va == 0 or vb == 0:
        raise DegenerateImage("image with zero variance")
    correlation = float(np.dot(da, db) / np.sqrt(va * vb))
    denom = float(np.dot(b, b))
    gain = float(np.dot(a, b) / denom) if denom > 0 else 0.0
    nrmse = float(np.linalg.norm(a - gain * b) / np.linalg.norm(a))
    return {"correlation": correlation, "nrmse": nrmse, "gain": gain}


METRICS_COLUMNS = ("z", "P_p", "P_s", "w_p_fit", "w_s_fit",
                   "w_p_rms", "w_s_rms")


def metrics_row(z, fields: FieldPair):
    """One CSV row of propagation observables at distance z.

    Fit failures degrade gracefully: the fit column becomes nan while the
    rms column keeps the estimate the failure carried.
    """
    values = {"z": z}
    for tag, omega in (("p", fields.omega_p), ("s", fields.omega_s)):
        try:
            m = beam_metrics(fields.grid, omega)
            fit, rms = m.width_fit, m.width_rms
            power = m.power
        except FitFailed as exc:
            fit, rms = float("nan"), exc.width_rms
            power = float(np.sum(np.abs(omega) ** 2) * fields.grid.dx ** 2)
        except DegenerateImage:
            fit, rms = float("nan"), float("nan")
            power = 0.0
        values[f"P_{tag}"] = power
        values[f"w_{tag}_fit"] = fit
        values[f"w_{tag}_rms"] = rms
    return values


def write_metrics_csv(path, rows):
    """Write propagation metrics with 17 significant digits per value."""
    with open(path, "w") as fh:
        fh.write(",".join(METRICS_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(f"{row[c]:.17g}" for c in METRICS_COLUMNS)
                     + "\n")
