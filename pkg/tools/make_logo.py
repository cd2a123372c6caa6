"""Generate the bundled 200x200 binary test pattern (block letters FWM).

Run from the repository root:  python3 tools/make_logo.py
Writes configs/logo.pgm deterministically.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from fwmprop.beamprop import write_pgm  # noqa: E402

SIZE = 200
STROKE = 16
CELL_W = 56
CELL_H = 120
GAP = 8


def letter_f():
    cell = np.zeros((CELL_H, CELL_W))
    cell[:, :STROKE] = 1
    cell[:STROKE, :] = 1
    mid = CELL_H // 2 - STROKE // 2
    cell[mid:mid + STROKE, :CELL_W - STROKE] = 1
    return cell


def letter_w():
    cell = np.zeros((CELL_H, CELL_W))
    cell[:, :STROKE] = 1
    cell[:, -STROKE:] = 1
    cell[-STROKE:, :] = 1
    mid = CELL_W // 2 - STROKE // 2
    cell[CELL_H // 2:, mid:mid + STROKE] = 1
    return cell


def letter_m():
    cell = np.zeros((CELL_H, CELL_W))
    cell[:, :STROKE] = 1
    cell[:, -STROKE:] = 1
    cell[:STROKE, :] = 1
    mid = CELL_W // 2 - STROKE // 2
    cell[:3 * CELL_H // 5, mid:mid + STROKE] = 1
    return cell


def main():
    img = np.zeros((SIZE, SIZE))
    letters = [letter_f(), letter_w(), letter_m()]
    total_w = 3 * CELL_W + 2 * GAP
    c0 = (SIZE - total_w) // 2
    r0 = (SIZE - CELL_H) // 2
    for i, cell in enumerate(letters):
        c = c0 + i * (CELL_W + GAP)
        img[r0:r0 + CELL_H, c:c + CELL_W] = cell
    out = os.path.join(os.path.dirname(__file__), "..", "configs",
                       "logo.pgm")
    os.makedirs(os.path.dirname(out), exist_ok=True)
    write_pgm(out, img)
    print(f"wrote {out}: {img.sum():.0f} bright pixels")


if __name__ == "__main__":
    main()
