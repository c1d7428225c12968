"""The adaptive nested-rule quadrature engine."""

import math

import numpy as np
import pytest

from liftdep.quadrature import (
    QuadResult,
    adaptive_quad_1d,
    adaptive_quad_2d,
    core_tail_cells,
)


def test_polynomial_exactness():
    res = adaptive_quad_2d(
        lambda x, y: x * x * y + 3.0, core_tail_cells((0, 1, 0, 1)), tol=1e-12
    )
    assert res.value == pytest.approx(1 / 6 + 3, abs=1e-12)


def test_gaussian_integral():
    res = adaptive_quad_2d(
        lambda x, y: np.exp(-(x * x + y * y) / 2) / (2 * math.pi),
        core_tail_cells((-8, 8, -8, 8)),
        tol=1e-9,
    )
    assert res.value == pytest.approx(1.0, abs=1e-8)
    assert res.error <= 1e-9
    assert res.n_evals > 0


def test_heavy_tail_core_split():
    cells = core_tail_cells((-1e4, 1e4, -1e4, 1e4))
    # 4 core quarters + 4 tail bands
    assert len(cells) == 8
    res = adaptive_quad_2d(
        lambda x, y: 1.0 / (2 * math.pi * (1 + x * x + y * y) ** 1.5), cells, tol=1e-6
    )
    assert res.value == pytest.approx(1.0, abs=2e-4)  # mass beyond the box ~1e-4


def test_quadrant_clipped_cells():
    # a box entirely left of the core square still integrates correctly
    cells = core_tail_cells((-30, -10, -1, 1))
    res = adaptive_quad_2d(lambda x, y: np.ones_like(x), cells, tol=1e-10)
    assert res.value == pytest.approx(40.0, abs=1e-9)


def test_budget_stops_refinement():
    calls = {"n": 0}

    def f(x, y):
        calls["n"] += x.size
        return np.abs(np.sin(40 * x) * np.sin(40 * y))

    res = adaptive_quad_2d(f, core_tail_cells((-8, 8, -8, 8)), tol=1e-14, budget=5000)
    assert res.n_evals == calls["n"]
    assert res.n_evals <= 5000 + 4 * (36 + 196)  # may finish the last batch


def test_determinism():
    def f(x, y):
        return np.exp(-x * x - y * y) * (1 + np.sin(3 * x))

    a = adaptive_quad_2d(f, core_tail_cells((-6, 6, -6, 6)), tol=1e-9)
    b = adaptive_quad_2d(f, core_tail_cells((-6, 6, -6, 6)), tol=1e-9)
    assert a == b


def test_1d_known_integral():
    res = adaptive_quad_1d(lambda x: np.exp(-x * x / 2) / math.sqrt(2 * math.pi), -8, 8)
    assert res.value == pytest.approx(1.0, abs=1e-10)
    assert isinstance(res, QuadResult)


def test_1d_nonsmooth_subdivides():
    res = adaptive_quad_1d(lambda x: np.abs(x), -1, 2, tol=1e-12)
    assert res.value == pytest.approx(2.5, abs=1e-10)


def test_bad_box_rejected():
    with pytest.raises(ValueError):
        core_tail_cells((1, 1, 0, 1))
