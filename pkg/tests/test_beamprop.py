"""Grid, transform, transfer-matrix and propagation checks."""

import numpy as np
import pytest
from scipy.linalg import expm

from fwmprop import (BadGrid, FieldPair, TableRange, ThermalParameters,
                     WrongSpace, balanced_detuning, bandwidth_scales,
                     build_plan, calibrate_density, chi_full,
                     dominant_eigenvalue, gaussian_input, load_field_pair,
                     make_grid, mode_matrix, propagate, save_field_pair,
                     transform)
from fwmprop.beamprop import _exp_2x2, load_pgm, write_pgm

from conftest import split_step_rk4

W_P0 = 100e-6
Z_R = 2 * np.pi * W_P0 ** 2 / 795e-9


@pytest.fixture(scope="module")
def grid():
    return make_grid(128, 25e-6)


@pytest.fixture(scope="module")
def chi_fn(scheme, drive_ref, thermal_ref, transitions, rho_ref):
    delta = balanced_detuning(scheme, drive_ref, thermal_ref, transitions)

    def fn(kperp):
        return chi_full(kperp, delta, rho_ref, scheme, drive_ref,
                        thermal_ref, transitions)

    return fn


def test_make_grid_validation():
    with pytest.raises(BadGrid):
        make_grid(100, 1e-5)
    with pytest.raises(BadGrid):
        make_grid(128, -1e-5)
    with pytest.raises(BadGrid):
        make_grid(1, 1e-5)
    g = make_grid(64, 2e-5)
    assert g.window == pytest.approx(64 * 2e-5)
    assert g.k_nyquist == pytest.approx(np.pi / 2e-5)


def test_grid_adequacy_report():
    g = make_grid(256, 12.5e-6)
    report = g.adequacy(W_P0, k1=26244.8)
    assert report["window_ok"] and report["pitch_ok"]
    assert report["nyquist_ok"] and report["ok"]
    tight = make_grid(16, 50e-6)
    assert not tight.adequacy(W_P0)["ok"]


def test_transform_round_trip_and_parseval(grid):
    rng = np.random.default_rng(7)
    shape = (grid.n, grid.n)
    fields = FieldPair(
        grid=grid,
        omega_p=rng.standard_normal(shape) + 1j * rng.standard_normal(shape),
        omega_s=rng.standard_normal(shape) + 1j * rng.standard_normal(shape),
        space="position")
    k = transform(fields, "momentum")
    assert k.space == "momentum"
    p_pos, s_pos = fields.powers()
    p_mom, s_mom = k.powers()
    assert p_mom == pytest.approx(p_pos, rel=1e-12)
    assert s_mom == pytest.approx(s_pos, rel=1e-12)
    back = transform(k, "position")
    assert np.max(np.abs(back.omega_p - fields.omega_p)) < 1e-13 * np.max(
        np.abs(fields.omega_p))
    with pytest.raises(WrongSpace):
        transform(fields, "position")
    with pytest.raises(WrongSpace):
        transform(k, "momentum")


def test_gaussian_input_power_and_dark_signal(grid):
    fields = gaussian_input(grid, W_P0, amplitude=2.0)
    p, s = fields.powers()
    assert p == pytest.approx(4.0 * np.pi * W_P0 ** 2, rel=1e-3)
    assert s == 0.0


def test_closed_form_exponential_against_expm():
    """1000 random 2x2 generators, including near-degenerate ones, match
    the dense matrix exponential to 1e-10."""
    rng = np.random.default_rng(42)
    dz = 1.0
    for i in range(1000):
        m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        if i % 5 == 0:
            # Force |s| tiny to exercise the series fallback.
            m[1, 0] = (((m[0, 0] - m[1, 1]) / 2) ** 2 / -m[0, 1]
                       + rng.standard_normal() * 1e-7)
        t11, t12, t21, t22 = _exp_2x2(
            np.array(m[0, 0]), np.array(m[0, 1]),
            np.array(m[1, 0]), np.array(m[1, 1]), dz)
        dense = expm(1j * dz * m)
        got = np.array([[complex(t11), complex(t12)],
                        [complex(t21), complex(t22)]])
        assert np.max(np.abs(got - dense)) < 1e-10 * max(
            1.0, np.max(np.abs(dense)))


def test_degenerate_exponential_matches_series_limit():
    """Exactly defective generators (s = 0) take the series branch and
    agree with the analytic degenerate exponential to 1e-12."""
    a, b = 0.3 + 0.1j, 0.9 - 0.4j
    m = np.array([[a, 1.0], [-((a - b) / 2) ** 2, b]])
    t11, t12, t21, t22 = _exp_2x2(
        np.array(m[0, 0]), np.array(m[0, 1]),
        np.array(m[1, 0]), np.array(m[1, 1]), 1.0)
    dense = expm(1j * m)
    got = np.array([[complex(t11), complex(t12)],
                    [complex(t21), complex(t22)]])
    assert np.max(np.abs(got - dense)) < 1e-12


def test_plan_table_interpolation_budget(grid, transitions, chi_fn):
    """The radial spline table reproduces directly evaluated transfer
    matrices to well under the 1e-8 budget."""
    dz = Z_R / 64
    plan = build_plan(grid, transitions, dz, chi_fn=chi_fn)
    kperp = grid.kperp()
    a11, a12, a21, a22 = mode_matrix(kperp, chi_fn(kperp), transitions)
    t11, t12, t21, t22 = _exp_2x2(a11, a12, a21, a22, dz)
    scale = np.max(np.abs(t11))
    for direct, tabled in ((t11, plan.t11), (t12, plan.t12),
                           (t21, plan.t21), (t22, plan.t22)):
        assert np.max(np.abs(direct - tabled)) < 1e-8 * scale


def test_plan_table_range_guard(grid, transitions, chi_fn):
    with pytest.raises(TableRange):
        build_plan(grid, transitions, Z_R / 64, chi_fn=chi_fn,
                   table_span=0.5)


def test_vacuum_power_conservation_and_width_law(grid, transitions):
    """Free-space checks at ten distances: power exact, width follows
    w0 sqrt(1 + (z/zR)^2) to 0.5%."""
    from fwmprop import beam_metrics
    inp = gaussian_input(grid, W_P0)
    p0 = inp.powers()[0]
    for frac in np.linspace(0.1, 1.9, 10):
        steps = 8
        plan = build_plan(grid, transitions, frac * Z_R / steps,
                          chi_fn=None)
        res = propagate(plan, inp, steps)
        assert res.final.powers()[0] == pytest.approx(p0, rel=1e-12)
        width = beam_metrics(grid, res.final.omega_p).width_fit
        expected = W_P0 * np.sqrt(1 + frac ** 2)
        assert width == pytest.approx(expected, rel=5e-3)


def test_propagation_is_step_size_independent(grid, transitions, chi_fn):
    """The same total distance through the same medium gives the same
    fields regardless of step partitioning."""
    inp = gaussian_input(grid, W_P0)
    plan_a = build_plan(grid, transitions, Z_R / 96, chi_fn=chi_fn)
    plan_b = build_plan(grid, transitions, Z_R / 7, chi_fn=chi_fn)
    fine = propagate(plan_a, inp, 96).final
    coarse = propagate(plan_b, inp, 7).final
    scale = np.max(np.abs(fine.omega_p))
    assert np.max(np.abs(fine.omega_p - coarse.omega_p)) < 1e-10 * scale
    assert np.max(np.abs(fine.omega_s - coarse.omega_s)) < 1e-10 * scale


def test_semigroup_composition(grid, transitions, chi_fn):
    """Propagating z1 then z2 equals propagating z1 + z2."""
    inp = gaussian_input(grid, W_P0)
    plan = build_plan(grid, transitions, Z_R / 32, chi_fn=chi_fn)
    once = propagate(plan, inp, 24).final
    first = propagate(plan, inp, 9).final
    rest = propagate(plan, first, 15).final
    scale = np.max(np.abs(once.omega_p))
    assert np.max(np.abs(once.omega_p - rest.omega_p)) < 1e-10 * scale
    assert np.max(np.abs(once.omega_s - rest.omega_s)) < 1e-10 * scale


def test_closed_form_matches_split_step_oracle(grid, transitions, chi_fn):
    """Independent split-step integration (exact diffraction halves
    around RK4 coupling) agrees to 1e-6 at one diffraction length."""
    inp = gaussian_input(grid, W_P0)
    plan = build_plan(grid, transitions, Z_R / 96, chi_fn=chi_fn)
    exact = propagate(plan, inp, 96).final
    mom = transform(inp, "momentum")
    op, os_ = split_step_rk4(grid, transitions, chi_fn,
                             (mom.omega_p, mom.omega_s), Z_R, 512)
    oracle = transform(FieldPair(grid=grid, omega_p=op, omega_s=os_,
                                 space="momentum"), "position")
    err_p = (np.linalg.norm(exact.omega_p - oracle.omega_p)
             / np.linalg.norm(oracle.omega_p))
    err_s = (np.linalg.norm(exact.omega_s - oracle.omega_s)
             / np.linalg.norm(oracle.omega_s))
    assert err_p < 1e-6
    assert err_s < 1e-6


def test_rotational_symmetry(grid, transitions, chi_fn):
    """Quarter-turn rotations commute with propagation because the medium
    response depends only on |kperp|."""
    envelope = np.exp(-grid.radius() ** 2 / (2 * W_P0 ** 2))
    blob = envelope * np.exp(
        -((grid.x[None, :] - 3e-4) ** 2
          + (grid.x[:, None] + 2e-4) ** 2) / (2 * (5e-5) ** 2))
    fields = FieldPair(grid=grid, omega_p=blob.astype(complex),
                       omega_s=np.zeros_like(blob, dtype=complex),
                       space="position")
    plan = build_plan(grid, transitions, Z_R / 16, chi_fn=chi_fn)
    rotated_first = propagate(plan, FieldPair(
        grid=grid, omega_p=np.rot90(fields.omega_p).copy(),
        omega_s=np.zeros_like(blob, dtype=complex),
        space="position"), 16).final
    rotated_last = propagate(plan, fields, 16).final
    scale = np.max(np.abs(rotated_last.omega_p))
    assert np.max(np.abs(np.rot90(rotated_last.omega_p)
                         - rotated_first.omega_p)) < 1e-10 * scale


def test_equilibrium_eigenmode_at_axis(grid, transitions, chi_fn):
    """Beyond the conversion balance distance, the on-axis mode content
    matches the least-absorbed eigenvector to better than 5%."""
    inp = gaussian_input(grid, W_P0)
    plan = build_plan(grid, transitions, Z_R / 64, chi_fn=chi_fn)
    res = propagate(plan, inp, 64)
    mom = transform(res.final, "momentum")
    vec = np.array([mom.omega_p[0, 0], mom.omega_s[0, 0]])
    chi0 = chi_fn(np.array(0.0))
    a11, a12, a21, a22 = mode_matrix(np.array(0.0), chi0, transitions)
    mat = np.array([[complex(a11), complex(a12)],
                    [complex(a21), complex(a22)]])
    vals, vecs = np.linalg.eig(mat)
    dark = vecs[:, np.argmin(vals.imag)]
    vec = vec / np.linalg.norm(vec)
    residual = np.linalg.norm(vec - (dark.conj() @ vec) * dark)
    assert residual < 0.05


def test_calibrated_flatness_at_probe_wavevector(
        scheme, drive_ref, thermal_ref, transitions, rho_ref):
    """At the calibrated density the dominant eigenvalue's real part is
    flat to 1e-3 of the corresponding vacuum phase at 0.1 k1."""
    delta = balanced_detuning(scheme, drive_ref, thermal_ref, transitions)
    n0 = calibrate_density(scheme, drive_ref, thermal_ref, transitions,
                           rho_ref, delta=delta)
    th = ThermalParameters(gamma_c=thermal_ref.gamma_c, n0=n0,
                           v_th=thermal_ref.v_th,
                           delta_k=thermal_ref.delta_k)
    k1 = bandwidth_scales(scheme, drive_ref, th, transitions)["k1"]
    kbar = (transitions.k_p + transitions.k_s) / 2
    k = 0.1 * k1
    lam0 = dominant_eigenvalue(0.0, chi_full(
        0.0, delta, rho_ref, scheme, drive_ref, th, transitions),
        transitions)
    lam = dominant_eigenvalue(k, chi_full(
        k, delta, rho_ref, scheme, drive_ref, th, transitions),
        transitions)
    assert abs((lam - lam0).real) < 1e-3 * k ** 2 / (2 * kbar)


@pytest.mark.xfail(
    reason="quartic terms in the medium's transverse response leave a "
           "few-1e-3 residual beyond 0.2 k1 after the quadratic "
           "cancellation; measured 7.4e-3 at 0.3 k1 (see the width "
           "discrepancy note in the README)",
    strict=True)
def test_calibrated_flatness_over_extended_range(
        scheme, drive_ref, thermal_ref, transitions, rho_ref):
    """The 1e-3 flatness budget does not hold out to 0.3 k1."""
    delta = balanced_detuning(scheme, drive_ref, thermal_ref, transitions)
    n0 = calibrate_density(scheme, drive_ref, thermal_ref, transitions,
                           rho_ref, delta=delta)
    th = ThermalParameters(gamma_c=thermal_ref.gamma_c, n0=n0,
                           v_th=thermal_ref.v_th,
                           delta_k=thermal_ref.delta_k)
    k1 = bandwidth_scales(scheme, drive_ref, th, transitions)["k1"]
    kbar = (transitions.k_p + transitions.k_s) / 2
    lam0 = dominant_eigenvalue(0.0, chi_full(
        0.0, delta, rho_ref, scheme, drive_ref, th, transitions),
        transitions)
    for k in (0.2 * k1, 0.3 * k1):
        lam = dominant_eigenvalue(k, chi_full(
            k, delta, rho_ref, scheme, drive_ref, th, transitions),
            transitions)
        assert abs((lam - lam0).real) < 1e-3 * k ** 2 / (2 * kbar)


def test_snapshots_are_position_space_with_stamps(grid, transitions):
    inp = gaussian_input(grid, W_P0)
    plan = build_plan(grid, transitions, Z_R / 8, chi_fn=None)
    res = propagate(plan, inp, 8, snapshot_count=4)
    assert len(res.snapshots) == 5  # input plane plus four interior
    zs = [z for z, _ in res.snapshots]
    assert zs[0] == 0.0
    assert zs[-1] == pytest.approx(Z_R)
    assert all(fp.space == "position" for _, fp in res.snapshots)
    assert res.z_total == pytest.approx(Z_R)


def test_field_pair_save_load_round_trip(tmp_path, grid):
    fields = gaussian_input(grid, W_P0, amplitude=1.5)
    stem = str(tmp_path / "snap")
    save_field_pair(stem, fields, z=0.25, extra={"note": "test"})
    back, sidecar = load_field_pair(stem)
    assert np.array_equal(back.omega_p, fields.omega_p)
    assert np.array_equal(back.omega_s, fields.omega_s)
    assert sidecar["z"] == 0.25
    assert sidecar["note"] == "test"
    assert sidecar["n"] == grid.n


def test_pgm_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    img = rng.random((17, 23))
    path = str(tmp_path / "img.pgm")
    write_pgm(path, img)
    back = load_pgm(path)
    assert back.shape == img.shape
    assert np.max(np.abs(back - img / img.max())) <= 1.0 / 255 + 1e-12
