import csv
import io
import math

import numpy as np
import pytest

from mixedcz.mixedmode import PotentialLaw, TensionLaw
from mixedcz.pathsim import (
    CASES,
    COLUMNS,
    LoadingPath,
    case_density,
    chord_residual,
    decreasing_runs,
    first_unloading,
    frozen_sweep,
    origin_line_residual,
    run_case,
    simulate_path,
    unloading_zone_runs,
)


def test_case_table():
    assert CASES[1] == (1.0, 1.0, 0.2, 0.2, 2.0, 2.0)
    assert CASES[3] == (1.0, 3.0, 0.2, 0.3, 6.0, 2.0)
    assert CASES[4] == (1.0, 0.5, 0.125, 0.4, 2.0, 2.0)


def test_path_horizon():
    p = LoadingPath.periods(1, 1, 0.2, 0.3, samples=11)
    assert p.t[-1] == pytest.approx(2.5 * math.pi / 0.2)
    with pytest.raises(ValueError):
        LoadingPath(1, 1, 1, 1, np.array([0.0, 0.0, 1.0]))


def test_history_is_running_max():
    pot, _ = run_case(2, samples=500)
    assert np.array_equal(pot.z, np.maximum.accumulate(pot.y, axis=1))
    assert np.all(np.diff(pot.z, axis=1) >= 0)
    assert np.array_equal(pot.z_prev[:, 1:], pot.z[:, :-1])


def test_at_least_two_unloading_events():
    for n in CASES:
        pot, _ = run_case(n)
        for i in range(2):
            assert len(decreasing_runs(pot, i)) >= 2 or n == 4 and i == 0


def test_trace_csv_shape():
    pot, non = run_case(1, samples=50)
    rows = list(csv.reader(io.StringIO(pot.to_csv())))
    assert tuple(rows[0]) == COLUMNS and len(rows) == 51
    assert all(r[-1] == "" for r in csv.reader(io.StringIO(non.to_csv())) if r[0] != "t")


def test_initial_history():
    psi = case_density(1)
    path = LoadingPath.periods(1, 1, 0.2, 0.2, samples=100)
    tr = simulate_path(TensionLaw.from_density(psi), path, z0=(2.0, 2.0))
    assert first_unloading(tr) == 0  # y(0) = 0 already lies below z0
    with pytest.raises(ValueError):
        simulate_path(PotentialLaw(psi), path, z0=(-1.0, 0.0))


def test_residual_helpers():
    y = np.linspace(0, 1, 5)
    assert origin_line_residual(y, 3 * y) == pytest.approx(0.0, abs=1e-15)
    assert chord_residual(y, y**2) == pytest.approx(0.25)


def test_unloading_runs_are_inside_zone():
    pot, _ = run_case(2)
    for s in unloading_zone_runs(pot):
        assert np.all(pot.y[:, s] < pot.z_prev[:, s])


def test_frozen_sweep_is_linear_for_uncoupled_potential():
    psi = case_density(4)
    law = PotentialLaw(psi)
    z = np.array([0.9, 0.4])
    y1 = np.linspace(0, 0.9, 10)
    T = frozen_sweep(law, 0, y1, 0.45, z)
    # y2 = 0.45 >= z2: only direction 1 unloads, and R2 is linear in y1
    assert origin_line_residual(y1, T[0]) <= 1e-12
