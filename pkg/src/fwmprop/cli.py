"""Configuration parsing and the command-line scenario runner.

Config files are JSON.  Rates (decay rates, Rabi frequencies, detunings,
pump and collision rates) are given in units of the probe-transition decay
rate, whose SI value in rad/s anchors the conversion; lengths are in
meters and densities in 1/m^3.  Parsing is strict: unknown keys are
rejected and every violation is reported at once.

Commands (each takes --config PATH --out DIR):
    steady-state     solve and write the zeroth-order density matrix
    susceptibility   write the k-resolved susceptibilities
    propagate        full beam propagation with metrics and snapshots
    sweep-pump       repeat propagation over a pump-rate grid
    calibrate        solve for the diffraction-cancelling density

Exit codes: 0 success, 2 configuration error, 3 numeric failure.  Errors
also emit a machine-readable JSON object on stderr and, when possible, to
OUT/error.json.  Outputs are deterministic: rerunning a command with the
same config produces byte-identical files, and run_meta.json embeds a
fully resolved config that reproduces the run.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .atom import DriveConfig, LevelScheme, build_liouvillian, steady_state
from .beamprop import (FieldPair, build_plan, gaussian_input, load_pgm,
                       make_grid, save_field_pair, transform)
from .diagnostics import metrics_row, write_metrics_csv
from .errors import (BadGrid, FormatError, FwmError, IoError, ParseError,
                     ValidationError)
from .susceptibility import (OpticalTransitions, ThermalParameters,
                             balanced_detuning, bandwidth_scales,
                             calibrate_density, chi_full, dicke_ratio,
                             k_factors, optimal_detuning)

_DETUNING_MODES = ("explicit", "optimal", "balanced")
_DENSITY_MODES = ("explicit", "calibrated")
_DIFFUSION_MODELS = ("maxwell", "as-printed")
_KERNEL_METHODS = ("faddeeva", "gh64")


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated configuration in input units plus the raw dict.

    base_dir anchors relative paths (beam images) to the config file's
    directory.
    """

    raw: dict
    base_dir: str = "."

    def __getitem__(self, key):
        return self.raw[key]

    def resolve_path(self, path):
        if os.path.isabs(path):
            return path
        return os.path.join(self.base_dir, path)


def _validate_block(data, block, fields, violations):
    """Check one config block against (key, required, default, check)."""
    present = data.get(block)
    if present is None:
        violations.append(f"{block}: missing required block")
        return {}
    if not isinstance(present, dict):
        violations.append(f"{block}: must be an object")
        return {}
    known = {name for name, _, _, _ in fields}
    for key in present:
        if key not in known:
            violations.append(f"{block}.{key}: unknown key")
    out = {}
    for name, required, default, check in fields:
        if name not in present:
            if required:
                violations.append(f"{block}.{name}: missing required key")
            else:
                out[name] = default
            continue
        value = present[name]
        msg = check(value)
        if msg:
            violations.append(f"{block}.{name}: {msg}")
        else:
            out[name] = value
    return out


def _positive(v):
    if not _is_num(v):
        return "must be a number"
    if v <= 0:
        return "must be > 0"
    return None


def _nonnegative(v):
    if not _is_num(v):
        return "must be a number"
    if v < 0:
        return "must be >= 0"
    return None


def _number(v):
    return None if _is_num(v) else "must be a number"


def _boolean(v):
    return None if isinstance(v, bool) else "must be a boolean"


def _string(v):
    return None if isinstance(v, str) else "must be a string"


def parse_config(path) -> ScenarioConfig:
    """Read, parse and strictly validate a JSON scenario config.

    A run_meta.json produced by a previous run is also accepted: its
    embedded resolved config is extracted, so runs are reproducible from
    their own metadata.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    if "resolved_config" in data:
        data = data["resolved_config"]
        if not isinstance(data, dict):
            raise ParseError(f"{path}: resolved_config must be an object")
    return validate_config(data, base_dir=os.path.dirname(
        os.path.abspath(path)))


def validate_config(data, base_dir=".") -> ScenarioConfig:
    """Validate a parsed config dict; collects every violation."""
    violations = []
    known_blocks = {"atom", "drive", "thermal", "transitions", "grid",
                    "beam", "run", "output"}
    for key in data:
        if key not in known_blocks:
            violations.append(f"{key}: unknown block")

    atom = _validate_block(data, "atom", [
        ("gamma31_rad_s", True, None, _positive),
        ("gamma32", True, None, _nonnegative),
        ("gamma41", True, None, _nonnegative),
        ("gamma42", True, None, _nonnegative),
        ("gamma51", True, None, _nonnegative),
        ("gamma52", True, None, _nonnegative),
        ("gamma21", False, 0.0, _nonnegative),
    ], violations)

    drive = _validate_block(data, "drive", [
        ("omega_c1", True, None, _number),
        ("omega_c2", True, None, _number),
        ("delta_c1", False, 0.0, _number),
        ("delta_c2", False, 0.0, _number),
        ("pump_p", False, 0.0, _nonnegative),
    ], violations)

    thermal = _validate_block(data, "thermal", [
        ("gamma_c", True, None, _nonnegative),
        ("v_th", True, None, _positive),
        ("n0", True, None, _positive),
        ("delta_k", False, 0.0, _nonnegative),
    ], violations)

    transitions = _validate_block(data, "transitions", [
        ("lambda_p", True, None, _positive),
        ("lambda_s", True, None, _positive),
    ], violations)

    grid = _validate_block(data, "grid", [
        ("n", True, None, lambda v: None if _is_int(v) and v >= 2
         and (v & (v - 1)) == 0 else "must be a power of two >= 2"),
        ("dx", True, None, _positive),
    ], violations)

    beam = data.get("beam")
    if not isinstance(beam, dict):
        violations.append("beam: missing required block")
        beam = {}
    else:
        btype = beam.get("type")
        if btype == "gaussian":
            beam = _validate_block(data, "beam", [
                ("type", True, None, _string),
                ("w_p0", True, None, _positive),
                ("amplitude", False, 1.0, _positive),
            ], violations)
        elif btype == "image":
            beam = _validate_block(data, "beam", [
                ("type", True, None, _string),
                ("path", True, None, _string),
                ("threshold", False, None, lambda v: None
                 if _is_num(v) and 0 <= v <= 1 else "must be in [0, 1]"),
                ("width_scale", False, 1.0, _positive),
            ], violations)
        else:
            violations.append(
                "beam.type: must be 'gaussian' or 'image'")
            beam = {}

    run = _validate_block(data, "run", [
        ("z_total_zr", True, None, _positive),
        ("samples", False, 96, lambda v: None if _is_int(v) and v >= 1
         else "must be an integer >= 1"),
        ("snapshots", False, 3, lambda v: None if _is_int(v) and v >= 0
         else "must be an integer >= 0"),
        ("vacuum", False, False, _boolean),
        ("diffusion_model", False, "maxwell", lambda v: None
         if v in _DIFFUSION_MODELS
         else f"must be one of {_DIFFUSION_MODELS}"),
        ("real_kernels", False, True, _boolean),
        ("kernel_method", False, "faddeeva", lambda v: None
         if v in _KERNEL_METHODS else f"must be one of {_KERNEL_METHODS}"),
        ("detuning", True, None, lambda v: None if isinstance(v, dict)
         else "must be an object"),
        ("density", False, {"mode": "explicit"},
         lambda v: None if isinstance(v, dict) else "must be an object"),
        ("sweep", False, None,
         lambda v: None if isinstance(v, dict) else "must be an object"),
    ], violations)

    detuning = run.get("detuning")
    if isinstance(detuning, dict):
        for key in detuning:
            if key not in ("mode", "delta"):
                violations.append(f"run.detuning.{key}: unknown key")
        mode = detuning.get("mode")
        if mode not in _DETUNING_MODES:
            violations.append(
                f"run.detuning.mode: must be one of {_DETUNING_MODES}")
        elif mode == "explicit":
            if not _is_num(detuning.get("delta")):
                violations.append(
                    "run.detuning.delta: required number for explicit mode")
        elif "delta" in detuning:
            violations.append(
                f"run.detuning.delta: not allowed in {mode} mode")

    density = run.get("density")
    if isinstance(density, dict):
        for key in density:
            if key != "mode":
                violations.append(f"run.density.{key}: unknown key")
        if density.get("mode") not in _DENSITY_MODES:
            violations.append(
                f"run.density.mode: must be one of {_DENSITY_MODES}")

    sweep = run.get("sweep")
    if isinstance(sweep, dict):
        for key in sweep:
            if key not in ("pump_min", "pump_max", "points"):
                violations.append(f"run.sweep.{key}: unknown key")
        if not (_is_num(sweep.get("pump_min"))
                and sweep["pump_min"] >= 0):
            violations.append("run.sweep.pump_min: must be a number >= 0")
        if not (_is_num(sweep.get("pump_max"))
                and _is_num(sweep.get("pump_min", 0))
                and sweep.get("pump_max", 0)
                > sweep.get("pump_min", 0)):
            violations.append(
                "run.sweep.pump_max: must be a number > pump_min")
        if not (_is_int(sweep.get("points")) and sweep["points"] >= 2):
            violations.append("run.sweep.points: must be an integer >= 2")

    output = _validate_block(data, "output", [
        ("dir", False, None, _string),
    ], violations) if "output" in data else {"dir": None}

    if violations:
        raise ValidationError(violations)
    return ScenarioConfig(raw={
        "atom": atom, "drive": drive, "thermal": thermal,
        "transitions": transitions, "grid": grid, "beam": beam,
        "run": run, "output": output,
    }, base_dir=base_dir)


def load_image(path, threshold=None):
    """Load a PGM or grayscale PNG as an amplitude map in [0, 1].

    Pixel values map linearly to amplitude; with a threshold the image is
    binarized (pixel >= threshold becomes 1).  Raises IoError for missing
    files and FormatError for unsupported content.
    """
    if not os.path.exists(path):
        raise IoError(f"image file not found: {path}")
    lower = path.lower()
    if lower.endswith(".pgm"):
        img = load_pgm(path)
    elif lower.endswith(".png"):
        try:
            from PIL import Image
        except ImportError:
            raise FormatError("PNG support requires Pillow")
        with Image.open(path) as handle:
            if handle.mode not in ("L", "I;16", "I", "1"):
                raise FormatError(
                    f"{path}: PNG must be grayscale, got mode "
                    f"{handle.mode}")
            arr = np.asarray(handle, dtype=float)
        peak = 1.0 if arr.max() <= 1 else (255.0 if arr.max() <= 255
                                           else 65535.0)
        img = arr / peak
    else:
        raise FormatError(f"{path}: unsupported image format")
    if threshold is not None:
        img = (img >= threshold).astype(float)
    return img


def place_image(grid, img, width_scale=1.0):
    """Nearest-neighbor placement of an amplitude map at the grid center."""
    height, width = img.shape
    out_h = int(round(height * width_scale))
    out_w = int(round(width * width_scale))
    if out_h > grid.n or out_w > grid.n:
        raise BadGrid(
            f"scaled image {out_h}x{out_w} exceeds grid {grid.n}")
    rows = np.clip((np.arange(out_h) / width_scale).astype(int),
                   0, height - 1)
    cols = np.clip((np.arange(out_w) / width_scale).astype(int),
                   0, width - 1)
    placed = np.zeros((grid.n, grid.n))
    r0 = (grid.n - out_h) // 2
    c0 = (grid.n - out_w) // 2
    placed[r0:r0 + out_h, c0:c0 + out_w] = img[rows][:, cols]
    return placed


@dataclass(frozen=True)
class ResolvedScenario:
    """Everything a run needs, in SI units."""

    config: ScenarioConfig
    scheme: LevelScheme
    drive: DriveConfig
    thermal: ThermalParameters
    transitions: OpticalTransitions
    grid: object
    rho: np.ndarray
    delta: float
    delta_optimal: float
    z_r: float
    k0: float
    k1: float
    run: dict


def _resolve_delta(mode, explicit_si, scheme, drive, thermal, transitions):
    if mode == "explicit":
        return explicit_si
    if mode == "optimal":
        return optimal_detuning(scheme, drive, thermal, transitions)
    return balanced_detuning(scheme, drive, thermal, transitions)


def resolve_scenario(cfg: ScenarioConfig) -> ResolvedScenario:
    """Convert a validated config to SI objects and derived quantities.

    Solves the steady state, resolves the detuning mode, calibrates the
    density when requested, and computes the reference diffraction length
    and bandwidth scales.
    """
    atom = cfg["atom"]
    unit = atom["gamma31_rad_s"]
    scheme = LevelScheme(
        gamma31=unit,
        gamma32=atom["gamma32"] * unit,
        gamma41=atom["gamma41"] * unit,
        gamma42=atom["gamma42"] * unit,
        gamma51=atom["gamma51"] * unit,
        gamma52=atom["gamma52"] * unit,
        gamma21=atom["gamma21"] * unit,
    )
    dr = cfg["drive"]
    drive = DriveConfig(
        omega_c1=dr["omega_c1"] * unit,
        omega_c2=dr["omega_c2"] * unit,
        delta_c1=dr["delta_c1"] * unit,
        delta_c2=dr["delta_c2"] * unit,
        pump_p=dr["pump_p"] * unit,
    )
    th = cfg["thermal"]
    thermal = ThermalParameters(
        gamma_c=th["gamma_c"] * unit,
        n0=th["n0"],
        v_th=th["v_th"],
        delta_k=th["delta_k"],
    )
    tr = cfg["transitions"]
    transitions = OpticalTransitions(lambda_p=tr["lambda_p"],
                                     lambda_s=tr["lambda_s"])
    grid = make_grid(cfg["grid"]["n"], cfg["grid"]["dx"])

    run = dict(cfg["run"])
    rho = steady_state(build_liouvillian(scheme, drive)).rho

    det = run["detuning"]
    explicit = det.get("delta")
    delta = _resolve_delta(det["mode"],
                           None if explicit is None else explicit * unit,
                           scheme, drive, thermal, transitions)
    delta_optimal = optimal_detuning(scheme, drive, thermal, transitions)

    if run["density"]["mode"] == "calibrated":
        n0 = calibrate_density(scheme, drive, thermal, transitions, rho,
                               delta=delta,
                               diffusion_model=run["diffusion_model"],
                               real_kernels=run["real_kernels"])
        thermal = ThermalParameters(gamma_c=thermal.gamma_c, n0=n0,
                                    v_th=thermal.v_th,
                                    delta_k=thermal.delta_k)

    beam = cfg["beam"]
    if beam["type"] == "gaussian":
        w_ref = beam["w_p0"]
    else:
        img = load_image(cfg.resolve_path(beam["path"]),
                         beam.get("threshold"))
        placed = place_image(grid, img, beam["width_scale"])
        inten = placed ** 2
        total = inten.sum()
        if total == 0:
            raise ValidationError(["beam.path: image has no intensity"])
        x = grid.x
        cx = (inten * x[None, :]).sum() / total
        cy = (inten * x[:, None]).sum() / total
        r2 = (x[None, :] - cx) ** 2 + (x[:, None] - cy) ** 2
        w_ref = float(np.sqrt((inten * r2).sum() / total))
    z_r = 2 * np.pi * w_ref ** 2 / transitions.lambda_p

    scales = bandwidth_scales(scheme, drive, thermal, transitions, delta)
    return ResolvedScenario(
        config=cfg, scheme=scheme, drive=drive, thermal=thermal,
        transitions=transitions, grid=grid, rho=rho, delta=delta,
        delta_optimal=delta_optimal, z_r=z_r, k0=scales["k0"],
        k1=scales["k1"], run=run)


def build_input(res: ResolvedScenario) -> FieldPair:
    """Construct the position-space input field pair of a scenario."""
    beam = res.config["beam"]
    if beam["type"] == "gaussian":
        return gaussian_input(res.grid, beam["w_p0"], beam["amplitude"])
    img = load_image(res.config.resolve_path(beam["path"]),
                     beam.get("threshold"))
    placed = place_image(res.grid, img, beam["width_scale"])
    return FieldPair(grid=res.grid, omega_p=placed.astype(complex),
                     omega_s=np.zeros((res.grid.n, res.grid.n), complex),
                     space="position")


def chi_function(res: ResolvedScenario, drive=None, delta=None,
                 thermal=None, rho=None):
    """Closure mapping |kperp| arrays to the scenario's SusceptibilitySet."""
    drive = res.drive if drive is None else drive
    delta = res.delta if delta is None else delta
    thermal = res.thermal if thermal is None else thermal
    rho = res.rho if rho is None else rho
    kfac = k_factors(res.scheme, drive, thermal, res.transitions, delta,
                     real_kernels=res.run["real_kernels"],
                     method=res.run["kernel_method"])

    def fn(kperp):
        return chi_full(kperp, delta, rho, res.scheme, drive, thermal,
                        res.transitions,
                        diffusion_model=res.run["diffusion_model"],
                        real_kernels=res.run["real_kernels"], kfac=kfac)

    return fn


def _resolved_config_echo(res: ResolvedScenario):
    """Config dict with detuning and density made explicit (input units)."""
    echo = {k: dict(v) for k, v in res.config.raw.items()}
    unit = echo["atom"]["gamma31_rad_s"]
    echo["run"]["detuning"] = {"mode": "explicit",
                              "delta": res.delta / unit}
    echo["run"]["density"] = {"mode": "explicit"}
    echo["thermal"]["n0"] = res.thermal.n0
    if echo["run"].get("sweep") is None:
        echo["run"].pop("sweep", None)
    if echo["output"].get("dir") is None:
        echo.pop("output")
    return echo


def write_run_meta(res: ResolvedScenario, outdir, command):
    """Write run_meta.json with resolved SI parameters and versions."""
    import scipy
    kfac = k_factors(res.scheme, res.drive, res.thermal, res.transitions,
                     res.delta, real_kernels=False,
                     method=res.run["kernel_method"])
    meta = {
        "command": command,
        "versions": {
            "fwmprop": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": ".".join(str(v) for v in sys.version_info[:3]),
        },
        "si": {
            "gamma31": res.scheme.gamma31,
            "gamma32": res.scheme.gamma32,
            "gamma41": res.scheme.gamma41,
            "gamma42": res.scheme.gamma42,
            "gamma51": res.scheme.gamma51,
            "gamma52": res.scheme.gamma52,
            "gamma21": res.scheme.gamma21,
            "omega_c1": abs(res.drive.omega_c1),
            "omega_c2": abs(res.drive.omega_c2),
            "pump_p": res.drive.pump_p,
            "gamma_c": res.thermal.gamma_c,
            "v_th": res.thermal.v_th,
            "delta_k": res.thermal.delta_k,
            "n0": res.thermal.n0,
            "delta": res.delta,
            "delta_optimal": res.delta_optimal,
            "k0": res.k0,
            "k1": res.k1,
            "z_r": res.z_r,
            "dicke_ratio": dicke_ratio(res.thermal, res.drive),
            "kernel_im_ratio_31": kfac.im_ratio_31,
            "kernel_im_ratio_41": kfac.im_ratio_41,
        },
        "resolved_config": _resolved_config_echo(res),
    }
    with open(os.path.join(outdir, "run_meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_steady_state(res: ResolvedScenario, outdir):
    """Write steady_state.json: populations and optical coherences."""
    rho = res.rho
    data = {
        "populations": [float(rho[i, i].real) for i in range(5)],
        "coherences": {
            name: {"re": float(rho[i, j].real), "im": float(rho[i, j].imag)}
            for name, (i, j) in {
                "rho12": (0, 1), "rho23": (1, 2), "rho24": (1, 3),
                "rho34": (2, 3), "rho13": (0, 2), "rho14": (0, 3),
            }.items()
        },
        "trace_error": abs(float(np.trace(rho).real) - 1.0),
        "hermiticity_error": float(np.max(np.abs(rho - rho.conj().T))),
    }
    with open(os.path.join(outdir, "steady_state.json"), "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_susceptibility(res: ResolvedScenario, outdir, points=201):
    """Write susceptibility.csv sampled on [0, 2 k1]."""
    fn = chi_function(res)
    k = np.linspace(0.0, 2 * res.k1, points)
    chi = fn(k)
    cols = ("kperp", "chi_p_re", "chi_p_im", "chi_s_re", "chi_s_im",
            "chi_sp_re", "chi_sp_im", "chi_ps_re", "chi_ps_im")
    with open(os.path.join(outdir, "susceptibility.csv"), "w") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(points):
            row = (k[i], chi.chi_p[i].real, chi.chi_p[i].imag,
                   chi.chi_s[i].real, chi.chi_s[i].imag,
                   chi.chi_sp[i].real, chi.chi_sp[i].imag,
                   chi.chi_ps[i].real, chi.chi_ps[i].imag)
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _propagation_rows(res: ResolvedScenario, outdir=None):
    """Step through the scenario, collecting metrics and saving snapshots."""
    run = res.run
    steps = run["samples"]
    z_total = run["z_total_zr"] * res.z_r
    dz = z_total / steps
    chi_fn = None if run["vacuum"] else chi_function(res)
    plan = build_plan(res.grid, res.transitions, dz, chi_fn=chi_fn)

    snap_steps = {}
    if run["snapshots"] > 0 and outdir is not None:
        count = min(run["snapshots"], steps + 1)
        for i, pos in enumerate(np.linspace(0, steps, count)):
            snap_steps[int(round(pos))] = i

    fields = build_input(res)
    work = transform(fields, "momentum")
    op, os_ = work.omega_p, work.omega_s

    rows = []
    for step in range(steps + 1):
        if step > 0:
            op, os_ = (plan.t11 * op + plan.t12 * os_,
                       plan.t21 * op + plan.t22 * os_)
        here = FieldPair(grid=res.grid, omega_p=op, omega_s=os_,
                         space="momentum")
        plane = transform(here, "position")
        rows.append(metrics_row(step * dz, plane))
        if step in snap_steps:
            stem = os.path.join(outdir, f"snapshot_{snap_steps[step]:03d}")
            save_field_pair(stem, plane, z=step * dz)
    return rows, transform(
        FieldPair(grid=res.grid, omega_p=op, omega_s=os_,
                  space="momentum"), "position")


def cmd_steady_state(res, outdir):
    write_steady_state(res, outdir)
    write_run_meta(res, outdir, "steady-state")


def cmd_susceptibility(res, outdir):
    write_susceptibility(res, outdir)
    write_steady_state(res, outdir)
    write_run_meta(res, outdir, "susceptibility")


def cmd_propagate(res, outdir):
    rows, _ = _propagation_rows(res, outdir)
    write_metrics_csv(os.path.join(outdir, "metrics.csv"), rows)
    write_susceptibility(res, outdir)
    write_steady_state(res, outdir)
    write_run_meta(res, outdir, "propagate")


def cmd_sweep_pump(res, outdir):
    """Propagate at each pump rate of the sweep grid; summarize endpoints."""
    sweep = res.run.get("sweep")
    if sweep is None:
        raise ValidationError(
            ["run.sweep: required for the sweep-pump command"])
    unit = res.config["atom"]["gamma31_rad_s"]
    pumps = np.linspace(sweep["pump_min"], sweep["pump_max"],
                        sweep["points"])
    det = res.run["detuning"]
    cols = ("pump_p", "delta", "P_p", "P_s", "w_p_fit", "w_s_fit",
            "w_p_rms", "w_s_rms")
    lines = [",".join(cols)]
    for pump in pumps:
        drive = DriveConfig(omega_c1=res.drive.omega_c1,
                            omega_c2=res.drive.omega_c2,
                            delta_c1=res.drive.delta_c1,
                            delta_c2=res.drive.delta_c2,
                            pump_p=float(pump) * unit)
        rho = steady_state(build_liouvillian(res.scheme, drive)).rho
        delta = _resolve_delta(
            det["mode"],
            None if det.get("delta") is None else det["delta"] * unit,
            res.scheme, drive, res.thermal, res.transitions)
        point = ResolvedScenario(
            config=res.config, scheme=res.scheme, drive=drive,
            thermal=res.thermal, transitions=res.transitions,
            grid=res.grid, rho=rho, delta=delta,
            delta_optimal=res.delta_optimal, z_r=res.z_r, k0=res.k0,
            k1=res.k1, run=res.run)
        rows, _ = _propagation_rows(point, outdir=None)
        last = rows[-1]
        values = (pump, delta, last["P_p"], last["P_s"], last["w_p_fit"],
                  last["w_s_fit"], last["w_p_rms"], last["w_s_rms"])
        lines.append(",".join(f"{v:.17g}" for v in values))
    with open(os.path.join(outdir, "sweep.csv"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    write_run_meta(res, outdir, "sweep-pump")


def cmd_calibrate(res, outdir):
    n0 = calibrate_density(res.scheme, res.drive, res.thermal,
                           res.transitions, res.rho, delta=res.delta,
                           diffusion_model=res.run["diffusion_model"],
                           real_kernels=res.run["real_kernels"])
    data = {"n0_calibrated": n0, "delta": res.delta, "k1": res.k1}
    with open(os.path.join(outdir, "calibration.json"), "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_run_meta(res, outdir, "calibrate")


_COMMANDS = {
    "steady-state": cmd_steady_state,
    "susceptibility": cmd_susceptibility,
    "propagate": cmd_propagate,
    "sweep-pump": cmd_sweep_pump,
    "calibrate": cmd_calibrate,
}


def _emit_error(exc, outdir):
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ValidationError):
        payload["violations"] = exc.violations
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    sys.stderr.write(text)
    if outdir:
        try:
            os.makedirs(outdir, exist_ok=True)
            with open(os.path.join(outdir, "error.json"), "w") as fh:
                fh.write(text)
        except OSError:
            pass


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="fwmprop",
        description="Five-level vapor four-wave-mixing beam propagation")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True,
                         help="path to a JSON scenario config")
        cmd.add_argument("--out", default=None,
                         help="output directory (default: config's "
                              "output.dir)")
    args = parser.parse_args(argv)

    outdir = args.out
    try:
        cfg = parse_config(args.config)
        if outdir is None:
            outdir = cfg["output"]["dir"]
        if outdir is None:
            raise ValidationError(
                ["output.dir: required when --out is not given"])
        os.makedirs(outdir, exist_ok=True)
        res = resolve_scenario(cfg)
        _COMMANDS[args.command](res, outdir)
    except (ParseError, ValidationError, IoError, FormatError) as exc:
        _emit_error(exc, outdir)
        return 2
    except FwmError as exc:
        _emit_error(exc, outdir)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
