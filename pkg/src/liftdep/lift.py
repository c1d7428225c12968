"""Pointwise and grid evaluation of the lift function, and region summaries.

The lift at a point compares the joint law with the product of the marginals:
values above one mean the coordinates mutually lift each other there, values
below one mean they inhibit, one means local independence. Each joint class
gets its own evaluation rule:

* discrete: pmf ratio ``p / (p_X p_Y)``;
* absolutely continuous: density ratio, with a closed form for the bivariate
  normal;
* curve-singular: zero off the branches and
  ``2 a_n / (pi rho_Y(phi_n(x)) sqrt(1 + phi_n'(x)^2))`` on branch n.

Grid cells where the value is undefined (a vanishing marginal, an off-support
discrete label) carry the ``Undefined`` label rather than a sentinel value so
downstream consumers can skip them without NaN contagion.

Sibuya's dependence ratio ``F(x, y) / (G(x) H(y))`` is also provided for all
classes as a CDF-level contrast to the pointwise lift.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from . import distributions as dm
from .errors import OutOfSupport, UndefinedAtPoint
from .quadrature import adaptive_quad_1d, adaptive_quad_2d, core_tail_cells

__all__ = [
    "RegionLabel",
    "LiftField",
    "RegionSummary",
    "ANALYTIC_TOL",
    "ESTIMATED_TOL",
    "ON_CURVE_TOL",
    "classify_values",
    "discrete_lift",
    "continuous_lift_at",
    "curve_lift_at",
    "lift_at",
    "sibuya_omega_at",
    "lift_grid",
    "region_summary",
]

ANALYTIC_TOL = 1e-9
ESTIMATED_TOL = 0.05
ON_CURVE_TOL = 1e-9
DENSITY_FLOOR = 1e-300

REGION_GRID_N = 1024


class RegionLabel(str, enum.Enum):
    LIFT = "Lift"
    INHIBIT = "Inhibit"
    NEUTRAL = "Neutral"
    ZERO = "Zero"
    UNDEFINED = "Undefined"


@dataclass(frozen=True, eq=False)
class LiftField:
    """Lift values and region labels on a rectangular grid.

    ``values[i, j]`` is the lift at ``(grid_x[i], grid_y[j])``; undefined
    cells hold NaN and the label matrix is authoritative for them.
    """

    grid_x: np.ndarray
    grid_y: np.ndarray
    values: np.ndarray
    labels: np.ndarray
    tol: float

    def to_csv(self, f: io.TextIOBase) -> None:
        """Row-major ``x,y,L,label`` rows with 17-significant-digit floats."""
        f.write("x,y,L,label\n")
        for i, x in enumerate(self.grid_x):
            for j, y in enumerate(self.grid_y):
                f.write(
                    f"{x:.17g},{y:.17g},{self.values[i, j]:.17g},"
                    f"{self.labels[i, j].value}\n"
                )


@dataclass(frozen=True)
class RegionSummary:
    """Product-measure masses of the lift, inhibition, and neutral regions."""

    mass_lift: float
    mass_inhibit: float
    mass_neutral: float

    def to_dict(self) -> dict:
        return {
            "mass_lift": self.mass_lift,
            "mass_inhibit": self.mass_inhibit,
            "mass_neutral": self.mass_neutral,
        }


def classify_values(values: np.ndarray, tol: float) -> np.ndarray:
    """Label an array of lift values; NaN entries become Undefined."""
    values = np.asarray(values, dtype=float)
    labels = np.empty(values.shape, dtype=object)
    labels.fill(RegionLabel.NEUTRAL)
    labels[values > 1.0 + tol] = RegionLabel.LIFT
    labels[(values > 0.0) & (values < 1.0 - tol)] = RegionLabel.INHIBIT
    labels[values == 0.0] = RegionLabel.ZERO
    labels[np.isnan(values)] = RegionLabel.UNDEFINED
    return labels


# ---------------------------------------------------------------------------
# Pointwise operations
# ---------------------------------------------------------------------------


def discrete_lift(dist: dm.DiscreteJoint, tol: float = ANALYTIC_TOL) -> LiftField:
    """Lift table ``p / (p_X p_Y)`` over the full discrete support.

    Cells whose product marginal vanishes (necessarily zero-probability
    cells) are labeled Undefined.
    """
    denom = np.outer(dist.p_x, dist.p_y)
    values = np.full(dist.pmf.shape, np.nan)
    defined = denom > 0
    values[defined] = dist.pmf[defined] / denom[defined]
    return LiftField(
        grid_x=dist.x_support.copy(),
        grid_y=dist.y_support.copy(),
        values=values,
        labels=classify_values(values, tol),
        tol=tol,
    )


def continuous_lift_at(dist, point) -> float:
    """Density-ratio lift for absolutely continuous joints.

    The bivariate normal uses its closed form
    ``(1 - r^2)^(-1/2) exp(-(x^2 + y^2 - 2 r x y)/(2 (1 - r^2)) + (x^2 + y^2)/2)``.
    """
    x, y = float(point[0]), float(point[1])
    if isinstance(dist, dm.BivariateNormal):
        r = dist.r
        one_minus = 1.0 - r * r
        expo = -(x * x + y * y - 2.0 * r * x * y) / (2.0 * one_minus) + (x * x + y * y) / 2.0
        return math.exp(expo) / math.sqrt(one_minus)
    cont = dm.as_continuous(dist)
    rho_x = float(cont.marginal_x(x))
    rho_y = float(cont.marginal_y(y))
    if rho_x < DENSITY_FLOOR or rho_y < DENSITY_FLOOR:
        raise UndefinedAtPoint(f"marginal density vanishes at ({x:.6g}, {y:.6g})")
    return float(cont.joint_density(x, y)) / (rho_x * rho_y)


def curve_lift_at(
    dist: dm.CurveSingularJoint,
    point,
    on_curve_tol: float = ON_CURVE_TOL,
) -> float:
    """Lift of a curve-singular joint: zero off-curve, branch formula on it.

    A point counts as on branch n when ``|y - phi_n(x)| <= on_curve_tol``;
    when several branches match, the smallest branch index wins.
    """
    x, y = float(point[0]), float(point[1])
    for branch in dist.branches:
        lo, hi = branch.domain
        if not lo <= x <= hi:
            continue
        if abs(y - float(branch.phi(x))) <= on_curve_tol:
            rho_y = float(dist.marginal_y_fn()(float(branch.phi(x))))
            if rho_y < DENSITY_FLOOR:
                raise UndefinedAtPoint(
                    f"Y-marginal vanishes at phi({x:.6g}) = {float(branch.phi(x)):.6g}"
                )
            slope = float(branch.dphi(x))
            return 2.0 * branch.weight / (math.pi * rho_y * math.sqrt(1.0 + slope * slope))
    return 0.0


def lift_at(dist, point) -> float:
    """Pointwise lift, dispatching on the distribution class."""
    if isinstance(dist, dm.DiscreteJoint):
        x, y = float(point[0]), float(point[1])
        ix = np.nonzero(dist.x_support == x)[0]
        iy = np.nonzero(dist.y_support == y)[0]
        if ix.size == 0 or iy.size == 0:
            raise OutOfSupport(f"label ({x}, {y}) not in the discrete support")
        denom = dist.p_x[ix[0]] * dist.p_y[iy[0]]
        if denom == 0.0:
            raise UndefinedAtPoint(f"product marginal vanishes at ({x}, {y})")
        return float(dist.pmf[ix[0], iy[0]] / denom)
    if isinstance(dist, dm.CurveSingularJoint):
        return curve_lift_at(dist, point)
    return continuous_lift_at(dist, point)


# ---------------------------------------------------------------------------
# Sibuya's dependence ratio F / (G * H)
# ---------------------------------------------------------------------------


def _interval_mass(pdf, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    return adaptive_quad_1d(pdf, lo, hi, tol=1e-10).value


def _sublevel_intervals(branch: dm.CurveBranch, y: float) -> list[tuple[float, float]]:
    """Sub-intervals of the branch domain where phi <= y, piece by piece."""
    out = []
    for a, b, sign in dm.monotone_pieces(branch):
        va, vb = float(branch.phi(a)), float(branch.phi(b))
        lo_val, hi_val = (va, vb) if va <= vb else (vb, va)
        if y < lo_val:
            continue
        if y >= hi_val:
            out.append((a, b))
            continue
        cut = dm._piece_preimage(branch, y, a, b)
        if cut is None:
            continue
        if sign >= 0:
            out.append((a, cut))
        else:
            out.append((cut, b))
    return out


def sibuya_omega_at(dist, point) -> float:
    """Sibuya's dependence ratio ``F(x, y) / (G(x) H(y))``.

    Joint and marginal CDFs are computed by partial sums (discrete), adaptive
    quadrature over the integration box (continuous), or the X-marginal mass
    of ``{x' <= x : phi(x') <= y}`` (curve-singular).
    """
    x, y = float(point[0]), float(point[1])
    if isinstance(dist, dm.DiscreteJoint):
        mx = dist.x_support <= x
        my = dist.y_support <= y
        g = float(dist.p_x[mx].sum())
        h = float(dist.p_y[my].sum())
        if g == 0.0 or h == 0.0:
            raise UndefinedAtPoint(f"a marginal CDF is zero at ({x}, {y})")
        f_joint = float(dist.pmf[np.ix_(mx, my)].sum())
        return f_joint / (g * h)
    if isinstance(dist, dm.CurveSingularJoint):
        lo, hi = dist.support_x
        g = _interval_mass(dist.marginal_x, lo, min(x, hi))
        h = 0.0
        f_joint = 0.0
        for branch in dist.branches:
            for a, b in _sublevel_intervals(branch, y):
                a = max(a, lo)
                b = min(b, hi)
                h += branch.weight * _interval_mass(dist.marginal_x, a, b)
                f_joint += branch.weight * _interval_mass(dist.marginal_x, a, min(b, x))
        if g == 0.0 or h == 0.0:
            raise UndefinedAtPoint(f"a marginal CDF is zero at ({x}, {y})")
        return f_joint / (g * h)
    cont = dm.as_continuous(dist)
    x_lo, x_hi, y_lo, y_hi = cont.integration_box
    g = _interval_mass(cont.marginal_x, x_lo, min(x, x_hi))
    h = _interval_mass(cont.marginal_y, y_lo, min(y, y_hi))
    if g < DENSITY_FLOOR or h < DENSITY_FLOOR:
        raise UndefinedAtPoint(f"a marginal CDF is zero at ({x:.6g}, {y:.6g})")
    if x <= x_lo or y <= y_lo:
        return 0.0
    quadrant = (x_lo, min(x, x_hi), y_lo, min(y, y_hi))
    f_joint = adaptive_quad_2d(cont.joint_density, core_tail_cells(quadrant), tol=1e-8).value
    return f_joint / (g * h)


# ---------------------------------------------------------------------------
# Grids and region masses
# ---------------------------------------------------------------------------


def lift_grid(dist, grid_x, grid_y, tol: float = ANALYTIC_TOL) -> LiftField:
    """Evaluate the lift on a rectangular grid with region labels.

    Pointwise failures (off-support labels, vanishing marginals) become
    Undefined cells instead of raising.
    """
    grid_x = np.asarray(grid_x, dtype=float)
    grid_y = np.asarray(grid_y, dtype=float)
    if grid_x.size < 1 or grid_y.size < 1:
        raise ValueError("grids must be nonempty")
    if np.any(np.diff(grid_x) <= 0) or np.any(np.diff(grid_y) <= 0):
        raise ValueError("grids must be strictly increasing")

    if isinstance(dist, dm.DiscreteJoint):
        values = np.full((grid_x.size, grid_y.size), np.nan)
        for i, x in enumerate(grid_x):
            for j, y in enumerate(grid_y):
                try:
                    values[i, j] = lift_at(dist, (x, y))
                except (OutOfSupport, UndefinedAtPoint):
                    pass
        return LiftField(grid_x, grid_y, values, classify_values(values, tol), tol)

    if isinstance(dist, dm.CurveSingularJoint):
        values = np.zeros((grid_x.size, grid_y.size))
        rho_y = dist.marginal_y_fn()
        for i, x in enumerate(grid_x):
            for branch in dist.branches:
                lo, hi = branch.domain
                if not lo <= x <= hi:
                    continue
                phi_x = float(branch.phi(x))
                on = np.abs(grid_y - phi_x) <= ON_CURVE_TOL
                if not np.any(on):
                    continue
                dens = float(rho_y(phi_x))
                slope = float(branch.dphi(x))
                if dens < DENSITY_FLOOR:
                    val = np.nan
                else:
                    val = 2.0 * branch.weight / (math.pi * dens * math.hypot(1.0, slope))
                row = values[i]
                row[on & (row == 0.0)] = val
        return LiftField(grid_x, grid_y, values, classify_values(values, tol), tol)

    if isinstance(dist, dm.BivariateNormal):
        r = dist.r
        xx, yy = np.meshgrid(grid_x, grid_y, indexing="ij")
        expo = -(xx * xx + yy * yy - 2.0 * r * xx * yy) / (2.0 * (1.0 - r * r)) + (
            xx * xx + yy * yy
        ) / 2.0
        values = np.exp(expo) / math.sqrt(1.0 - r * r)
        return LiftField(grid_x, grid_y, values, classify_values(values, tol), tol)

    cont = dm.as_continuous(dist)
    mx = np.asarray(cont.marginal_x(grid_x), dtype=float)
    my = np.asarray(cont.marginal_y(grid_y), dtype=float)
    xx, yy = np.meshgrid(grid_x, grid_y, indexing="ij")
    joint = np.asarray(cont.joint_density(xx.ravel(), yy.ravel()), dtype=float).reshape(xx.shape)
    denom = np.outer(mx, my)
    values = np.full(xx.shape, np.nan)
    defined = denom >= DENSITY_FLOOR
    values[defined] = joint[defined] / denom[defined]
    return LiftField(grid_x, grid_y, values, classify_values(values, tol), tol)


def _marginal_quantile_fn(family, pdf, axis_range):
    """Quantile function of one marginal, closed-form where available."""
    if isinstance(family, dm.BivariateNormal):
        from scipy.special import ndtri

        return lambda u: ndtri(u)
    if isinstance(family, dm.CircularCauchy):
        return lambda u: np.tan(math.pi * (np.asarray(u) - 0.5))
    inv = dm.tabulated_inverse_cdf(pdf, axis_range)
    return inv


def region_summary(dist, tol: float = ANALYTIC_TOL) -> RegionSummary:
    """Masses of ``{L > 1 + tol}``, ``{L < 1 - tol}``, and the remainder
    under the product of the marginals.

    Discrete joints are summed exactly. Continuous joints are evaluated on a
    quantile-spaced grid so every cell carries identical product mass; the
    only error is boundary-cell misclassification.
    """
    if isinstance(dist, dm.DiscreteJoint):
        weights = np.outer(dist.p_x, dist.p_y)
        field = discrete_lift(dist, tol)
        defined = ~np.isnan(field.values)
        lift_mass = float(weights[defined & (field.values > 1.0 + tol)].sum())
        inhibit_mass = float(weights[defined & (field.values < 1.0 - tol)].sum())
        return RegionSummary(lift_mass, inhibit_mass, 1.0 - lift_mass - inhibit_mass)
    if isinstance(dist, dm.CurveSingularJoint):
        raise TypeError("region_summary is not defined for curve-singular joints")

    cont = dm.as_continuous(dist)
    x_lo, x_hi, y_lo, y_hi = cont.integration_box
    qx = _marginal_quantile_fn(dist, cont.marginal_x, (x_lo, x_hi))
    qy = _marginal_quantile_fn(dist, cont.marginal_y, (y_lo, y_hi))
    u = (np.arange(REGION_GRID_N) + 0.5) / REGION_GRID_N
    gx = np.asarray(qx(u), dtype=float)
    gy = np.asarray(qy(u), dtype=float)
    mx = np.asarray(cont.marginal_x(gx), dtype=float)
    my = np.asarray(cont.marginal_y(gy), dtype=float)
    xx, yy = np.meshgrid(gx, gy, indexing="ij")
    joint = np.asarray(cont.joint_density(xx.ravel(), yy.ravel()), dtype=float).reshape(xx.shape)
    denom = np.outer(mx, my)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(denom >= DENSITY_FLOOR, joint / denom, np.nan)
    cell = 1.0 / (REGION_GRID_N * REGION_GRID_N)
    lift_mass = float(np.count_nonzero(values > 1.0 + tol)) * cell
    inhibit_mass = float(np.count_nonzero(values < 1.0 - tol)) * cell
    return RegionSummary(lift_mass, inhibit_mass, 1.0 - lift_mass - inhibit_mass)
