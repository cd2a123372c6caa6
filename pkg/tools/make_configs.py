"""Regenerate the bundled scenario configs under configs/.

Run from the repository root:  python3 tools/make_configs.py

All rates are expressed in units of the probe-transition decay rate
gamma31 = 2*pi*5.75 MHz / 4.  The control Rabi frequencies are 1.55x and
1.43x the respective intermediate decay branches; the pump runs at 0.7 of
the rate unit in the reference scenario.
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

GAMMA_D1 = 2 * math.pi * 5.75e6
GAMMA_D2 = 2 * math.pi * 6.07e6
UNIT = GAMMA_D1 / 4

ATOM = {
    "gamma31_rad_s": UNIT,
    "gamma32": (GAMMA_D1 / 6) / UNIT,
    "gamma41": (GAMMA_D2 / 4) / UNIT,
    "gamma42": (GAMMA_D2 / 6) / UNIT,
    "gamma51": (GAMMA_D1 / 12) / UNIT,
    "gamma52": (GAMMA_D2 / 2) / UNIT,
    "gamma21": 1e-3,
}

DRIVE = {
    "omega_c1": 1.55 * (GAMMA_D1 / 6) / UNIT,
    "omega_c2": 1.43 * (GAMMA_D2 / 6) / UNIT,
    "delta_c1": 0.0,
    "delta_c2": 0.0,
    "pump_p": 0.7,
}

THERMAL = {
    "gamma_c": 1600 * 22.8 * 240.0 / UNIT,
    "v_th": 240.0,
    "n0": 1.32e18,
    "delta_k": 22.8,
}

TRANSITIONS = {"lambda_p": 795e-9, "lambda_s": 780e-9}


def write(name, config):
    out = os.path.join(os.path.dirname(__file__), "..", "configs", name)
    with open(out, "w") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out}")


def main():
    fig4 = {
        "atom": dict(ATOM),
        "drive": dict(DRIVE),
        "thermal": dict(THERMAL),
        "transitions": dict(TRANSITIONS),
        "grid": {"n": 512, "dx": 12.5e-6},
        "beam": {"type": "gaussian", "w_p0": 100e-6, "amplitude": 1.0},
        "run": {
            "z_total_zr": 1.0,
            "samples": 96,
            "snapshots": 3,
            "detuning": {"mode": "balanced"},
            "density": {"mode": "explicit"},
        },
    }
    write("fig4.cfg", fig4)

    vacuum = json.loads(json.dumps(fig4))
    vacuum["run"]["vacuum"] = True
    write("fig4_vacuum.cfg", vacuum)

    sweep = json.loads(json.dumps(fig4))
    sweep["grid"] = {"n": 256, "dx": 12.5e-6}
    sweep["run"]["samples"] = 64
    sweep["run"]["snapshots"] = 0
    sweep["run"]["sweep"] = {"pump_min": 0.0, "pump_max": 2.0,
                             "points": 20}
    write("sweep_pump.cfg", sweep)

    # The imaging scenario: the reference distance 0.30 m is expressed in
    # units of the diffraction length of the pattern's rms radius.
    from fwmprop.cli import load_image, place_image
    from fwmprop.beamprop import make_grid
    import numpy as np
    here = os.path.dirname(__file__)
    img = load_image(os.path.join(here, "..", "configs", "logo.pgm"),
                     threshold=0.5)
    grid = make_grid(512, 12.5e-6)
    placed = place_image(grid, img, 1.0)
    inten = placed ** 2
    x = grid.x
    cx = (inten * x[None, :]).sum() / inten.sum()
    cy = (inten * x[:, None]).sum() / inten.sum()
    r2 = (x[None, :] - cx) ** 2 + (x[:, None] - cy) ** 2
    w_ref = float(np.sqrt((inten * r2).sum() / inten.sum()))
    z_r = 2 * math.pi * w_ref ** 2 / TRANSITIONS["lambda_p"]

    image = json.loads(json.dumps(fig4))
    image["beam"] = {"type": "image", "path": "logo.pgm",
                     "threshold": 0.5, "width_scale": 1.0}
    image["run"]["z_total_zr"] = 0.30 / z_r
    image["run"]["density"] = {"mode": "calibrated"}
    write("image.cfg", image)

    image_vacuum = json.loads(json.dumps(image))
    image_vacuum["run"]["vacuum"] = True
    write("image_vacuum.cfg", image_vacuum)


if __name__ == "__main__":
    main()
