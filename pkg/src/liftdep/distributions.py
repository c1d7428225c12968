"""Joint-distribution classes and their densities, marginals, and samplers.

Three joint classes are supported, plus named parametric families:

* :class:`DiscreteJoint` -- a finite pmf table over labeled supports.
* :class:`ContinuousJoint` -- joint and marginal density evaluators with an
  explicit integration box.
* :class:`CurveSingularJoint` -- mass concentrated on the graphs of smooth
  branches ``y = phi_n(x)`` with absolutely continuous marginals. It has no
  density w.r.t. area measure; its Y-marginal can be derived by the
  pushforward formula (sum of ``a_n * rho_X / |phi_n'|`` over preimages).
* Named families: :class:`BivariateNormal`, :class:`CircularCauchy`,
  :class:`IndependentProduct`.

Density and marginal evaluators must be pure, vectorized functions: they take
scalars or ndarrays and return values of the same shape. All distribution
objects are immutable after construction and safe to share across threads.

Integration boxes are explicit, not inferred. Heavy-tailed families need a
deliberately wide truncation: the Circular Cauchy default box is
``[-1e5, 1e5]^2``, which keeps both the missing probability mass (~1e-5) and
the missing mutual-information contribution (~1e-4 nats) below the tolerances
used elsewhere in the package; a 50-wide box would silently drop ~2% of the
mass and ~0.05 nats.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Callable, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .errors import (
    CurveSingularHasNoDensity,
    DegenerateCorrelation,
    DerivativeVanishes,
    NonMonotonePiece,
    NotSampleable,
    OutOfSupport,
)

__all__ = [
    "DiscreteJoint",
    "ContinuousJoint",
    "BivariateNormal",
    "CircularCauchy",
    "IndependentProduct",
    "CurveBranch",
    "CurveSingularJoint",
    "JointDistribution",
    "NamedFamily",
    "bvn_density",
    "circular_cauchy_density",
    "density_at",
    "as_continuous",
    "derive_pushforward_density",
    "pushforward_density_fn",
    "monotone_pieces",
    "sample",
    "TabulatedInverseCdf",
    "tabulated_inverse_cdf",
    "standard_normal_pdf",
    "uniform_pdf",
    "read_pmf_csv",
    "write_pmf_csv",
    "read_samples_csv",
    "write_samples_csv",
]

Interval = tuple[float, float]
Box = tuple[float, float, float, float]
Evaluator = Callable[[np.ndarray], np.ndarray]

PMF_SUM_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12
ROOT_XTOL = 1e-10
DERIVATIVE_FLOOR = 1e-12
INVERSE_CDF_RESOLUTION = 4096
PROBE_GRID_SIZE = 1024

CAUCHY_BOX_HALF_WIDTH = 1e5


# ---------------------------------------------------------------------------
# Distribution classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiscreteJoint:
    """Finite joint pmf over sorted real labels.

    ``pmf[i, j]`` is P(X = x_support[i], Y = y_support[j]). Entries must be
    nonnegative and sum to one within 1e-12.
    """

    x_support: np.ndarray
    y_support: np.ndarray
    pmf: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x_support", np.asarray(self.x_support, dtype=float))
        object.__setattr__(self, "y_support", np.asarray(self.y_support, dtype=float))
        object.__setattr__(self, "pmf", np.asarray(self.pmf, dtype=float))
        if self.pmf.shape != (self.x_support.size, self.y_support.size):
            raise ValueError("pmf shape must be (len(x_support), len(y_support))")
        if np.any(np.diff(self.x_support) <= 0) or np.any(np.diff(self.y_support) <= 0):
            raise ValueError("supports must be strictly increasing")
        if np.any(self.pmf < 0):
            raise ValueError("pmf entries must be nonnegative")
        if abs(float(self.pmf.sum()) - 1.0) > PMF_SUM_TOL:
            raise ValueError("pmf entries must sum to 1 within 1e-12")

    @property
    def p_x(self) -> np.ndarray:
        return self.pmf.sum(axis=1)

    @property
    def p_y(self) -> np.ndarray:
        return self.pmf.sum(axis=0)


@dataclass(frozen=True, eq=False)
class ContinuousJoint:
    """Absolutely continuous joint law given by density evaluators.

    ``integration_box = (x_lo, x_hi, y_lo, y_hi)`` must capture essentially
    all of the mass; every quadrature in the package integrates over it.
    """

    joint_density: Callable[[np.ndarray, np.ndarray], np.ndarray]
    marginal_x: Evaluator
    marginal_y: Evaluator
    integration_box: Box


@dataclass(frozen=True)
class BivariateNormal:
    """Standard bivariate normal with unit variances and correlation r."""

    r: float

    def __post_init__(self):
        if not abs(self.r) < 1:
            raise DegenerateCorrelation(f"|r| must be < 1, got r={self.r}")


@dataclass(frozen=True)
class CircularCauchy:
    """Rotation-invariant bivariate Cauchy, density 1/(2*pi*(1+x^2+y^2)^(3/2))."""


@dataclass(frozen=True, eq=False)
class IndependentProduct:
    """Product law of two independent absolutely continuous marginals."""

    marginal_x: Evaluator
    marginal_y: Evaluator
    support_x: Interval = (-8.0, 8.0)
    support_y: Interval = (-8.0, 8.0)


@dataclass(frozen=True, eq=False)
class CurveBranch:
    """One smooth branch ``y = phi(x)`` on a domain interval.

    ``dphi`` must be the derivative of ``phi``. ``breakpoints``, when given,
    declare the boundaries of strictly monotone pieces of ``phi`` inside the
    domain; otherwise pieces are detected from sign changes of ``dphi`` on a
    1024-point probe grid.
    """

    phi: Evaluator
    dphi: Evaluator
    domain: Interval
    weight: float = 1.0
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError("branch domain must be a nonempty interval")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError("branch weight must lie in [0, 1]")
        if any(not lo <= b <= hi for b in self.breakpoints):
            raise ValueError("breakpoints must lie inside the branch domain")


@dataclass(frozen=True, eq=False)
class CurveSingularJoint:
    """Joint law with P(Y = phi_N(X)) = a_N over smooth branches.

    ``marginal_x`` is the density of X on ``support_x``; branch weights must
    sum to one. ``marginal_y`` may be supplied, otherwise it is derived on
    demand via the pushforward formula.
    """

    marginal_x: Evaluator
    support_x: Interval
    branches: tuple[CurveBranch, ...]
    marginal_y: Evaluator | None = None

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.branches:
            raise ValueError("at least one branch is required")
        total = sum(b.weight for b in self.branches)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError("branch weights must sum to 1 within 1e-12")

    def marginal_y_fn(self) -> Evaluator:
        """The supplied Y-marginal, or the derived pushforward density."""
        if self.marginal_y is not None:
            return self.marginal_y
        return pushforward_density_fn(self)


NamedFamily = Union[BivariateNormal, CircularCauchy, IndependentProduct]
JointDistribution = Union[DiscreteJoint, ContinuousJoint, NamedFamily, CurveSingularJoint]


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------


def standard_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def uniform_pdf(lo: float = 0.0, hi: float = 1.0) -> Evaluator:
    """Density of the uniform law on [lo, hi] as a vectorized evaluator."""
    height = 1.0 / (hi - lo)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= lo) & (x <= hi), height, 0.0)

    return pdf


def bvn_density(r: float, point) -> float | np.ndarray:
    """Standard bivariate normal density with correlation r at a point.

    Accepts scalar or ndarray coordinates; raises DegenerateCorrelation for
    |r| >= 1.
    """
    if not abs(r) < 1:
        raise DegenerateCorrelation(f"|r| must be < 1, got r={r}")
    x, y = point
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    one_minus = 1.0 - r * r
    q = (x * x + y * y - 2.0 * r * x * y) / (2.0 * one_minus)
    out = np.exp(-q) / (2.0 * math.pi * math.sqrt(one_minus))
    return float(out) if out.ndim == 0 else out


def circular_cauchy_density(point) -> float | np.ndarray:
    x, y = point
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = 1.0 / (2.0 * math.pi * (1.0 + x * x + y * y) ** 1.5)
    return float(out) if out.ndim == 0 else out


def _cauchy_pdf(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (math.pi * (1.0 + x * x))


def density_at(dist: JointDistribution, point: tuple[float, float]) -> float:
    """Joint density (or pmf entry) of ``dist`` at ``point``.

    Discrete lookups require exact support matches. Curve-singular joints
    have no joint density w.r.t. area measure and raise
    CurveSingularHasNoDensity.
    """
    x, y = float(point[0]), float(point[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError("point coordinates must be finite")
    if isinstance(dist, DiscreteJoint):
        ix = np.nonzero(dist.x_support == x)[0]
        iy = np.nonzero(dist.y_support == y)[0]
        if ix.size == 0 or iy.size == 0:
            raise OutOfSupport(f"label ({x}, {y}) not in the discrete support")
        return float(dist.pmf[ix[0], iy[0]])
    if isinstance(dist, ContinuousJoint):
        return float(dist.joint_density(x, y))
    if isinstance(dist, BivariateNormal):
        return float(bvn_density(dist.r, (x, y)))
    if isinstance(dist, CircularCauchy):
        return float(circular_cauchy_density((x, y)))
    if isinstance(dist, IndependentProduct):
        return float(dist.marginal_x(x)) * float(dist.marginal_y(y))
    if isinstance(dist, CurveSingularJoint):
        raise CurveSingularHasNoDensity(
            "curve-singular joints have no density w.r.t. area measure"
        )
    raise TypeError(f"unsupported distribution type {type(dist).__name__}")


def as_continuous(dist) -> ContinuousJoint:
    """View a named family (or pass through a ContinuousJoint) as evaluators."""
    if isinstance(dist, ContinuousJoint):
        return dist
    if isinstance(dist, BivariateNormal):
        r = dist.r
        return ContinuousJoint(
            joint_density=lambda x, y: bvn_density(r, (x, y)),
            marginal_x=standard_normal_pdf,
            marginal_y=standard_normal_pdf,
            integration_box=(-8.0, 8.0, -8.0, 8.0),
        )
    if isinstance(dist, CircularCauchy):
        w = CAUCHY_BOX_HALF_WIDTH
        return ContinuousJoint(
            joint_density=lambda x, y: circular_cauchy_density((x, y)),
            marginal_x=_cauchy_pdf,
            marginal_y=_cauchy_pdf,
            integration_box=(-w, w, -w, w),
        )
    if isinstance(dist, IndependentProduct):
        mx, my = dist.marginal_x, dist.marginal_y

        def joint(x, y):
            return np.asarray(mx(x), dtype=float) * np.asarray(my(y), dtype=float)

        (x_lo, x_hi), (y_lo, y_hi) = dist.support_x, dist.support_y
        return ContinuousJoint(joint, mx, my, (x_lo, x_hi, y_lo, y_hi))
    raise TypeError(f"{type(dist).__name__} has no continuous-joint view")


# ---------------------------------------------------------------------------
# Curve-singular machinery: monotone pieces and the pushforward marginal
# ---------------------------------------------------------------------------


def monotone_pieces(branch: CurveBranch) -> list[tuple[float, float, int]]:
    """Strictly monotone pieces ``(lo, hi, sign)`` of a branch.

    Uses declared breakpoints when present (validating that ``dphi`` keeps
    its sign inside every declared piece), otherwise detects sign changes
    of ``dphi`` on a probe grid and refines each boundary by bisection on
    ``dphi``.
    """
    lo, hi = branch.domain
    if branch.breakpoints:
        bounds = sorted({lo, hi, *branch.breakpoints})
        pieces = []
        for a, b in zip(bounds[:-1], bounds[1:]):
            probes = np.linspace(a, b, 257)[1:-1]
            signs = np.sign(branch.dphi(probes))
            nonzero = signs[signs != 0]
            if nonzero.size and np.any(nonzero != nonzero[0]):
                raise NonMonotonePiece(
                    f"dphi changes sign inside declared piece [{a}, {b}]"
                )
            pieces.append((a, b, int(nonzero[0]) if nonzero.size else 1))
        return pieces

    grid = np.linspace(lo, hi, PROBE_GRID_SIZE)
    signs = np.sign(branch.dphi(grid))
    # Carry the last nonzero sign across isolated zeros of dphi.
    carried = signs.copy()
    for i in range(1, carried.size):
        if carried[i] == 0:
            carried[i] = carried[i - 1]
    pieces = []
    start = lo
    current = carried[0] if carried[0] != 0 else 1
    for i in range(1, grid.size):
        if carried[i] != 0 and carried[i] != current and current != 0:
            # refine the turning point between grid[i-1] and grid[i]
            a, b = grid[i - 1], grid[i]
            try:
                cut = brentq(lambda t: float(branch.dphi(t)), a, b, xtol=ROOT_XTOL)
            except ValueError:
                cut = 0.5 * (a + b)
            pieces.append((start, cut, int(current)))
            start, current = cut, carried[i]
        elif current == 0:
            current = carried[i]
    pieces.append((start, hi, int(current) if current != 0 else 1))
    return pieces


def _piece_preimage(branch: CurveBranch, y: float, a: float, b: float) -> float | None:
    """The x in a monotone piece [a, b] with phi(x) = y, or None."""
    fa = float(branch.phi(a)) - y
    fb = float(branch.phi(b)) - y
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb < 0:
        return brentq(lambda t: float(branch.phi(t)) - y, a, b, xtol=ROOT_XTOL)
    return None


def _branch_preimages(branch: CurveBranch, y: float) -> list[float]:
    """All x in the branch domain with phi(x) = y, one per monotone piece."""
    roots: list[float] = []
    for a, b, _sign in monotone_pieces(branch):
        root = _piece_preimage(branch, y, a, b)
        if root is not None and not any(abs(root - r) <= 1e-9 for r in roots):
            roots.append(root)
    return roots


def derive_pushforward_density(dist: CurveSingularJoint, y: float) -> float:
    """Density of Y at ``y`` for a curve-singular joint.

    Sums ``a_n * rho_X(x*) / |phi_n'(x*)|`` over all preimages x* of y on
    every branch, located by bracketed root-finding on monotone pieces.
    """
    y = float(y)
    total = 0.0
    for branch in dist.branches:
        for root in _branch_preimages(branch, y):
            rho = float(dist.marginal_x(root))
            if rho == 0.0:
                continue
            slope = abs(float(branch.dphi(root)))
            if slope < DERIVATIVE_FLOOR:
                raise DerivativeVanishes(
                    f"|phi'({root:.6g})| < {DERIVATIVE_FLOOR:g} at a preimage of y={y:.6g}"
                )
            total += branch.weight * rho / slope
    return total


def pushforward_density_fn(dist: CurveSingularJoint) -> Evaluator:
    """Vectorized wrapper around :func:`derive_pushforward_density`."""
    scalar = np.vectorize(lambda yy: derive_pushforward_density(dist, yy), otypes=[float])

    def rho_y(y):
        out = scalar(np.asarray(y, dtype=float))
        return float(out) if out.ndim == 0 else out

    return rho_y


def curve_image_interval(dist: CurveSingularJoint) -> Interval:
    """Interval covering the image of all branches over the X support."""
    lo_x, hi_x = dist.support_x
    lows, highs = [], []
    for branch in dist.branches:
        a = max(lo_x, branch.domain[0])
        b = min(hi_x, branch.domain[1])
        if a >= b:
            continue
        vals = np.asarray(branch.phi(np.linspace(a, b, PROBE_GRID_SIZE)), dtype=float)
        lows.append(float(vals.min()))
        highs.append(float(vals.max()))
    if not lows:
        raise ValueError("no branch overlaps the X support")
    return min(lows), max(highs)


# ---------------------------------------------------------------------------
# Tabulated inverse CDFs and sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TabulatedInverseCdf:
    """Linear-interpolation quantile function built from a tabulated CDF."""

    grid: np.ndarray
    cdf: np.ndarray

    def __call__(self, u):
        return np.interp(u, self.cdf, self.grid)


def tabulated_inverse_cdf(
    pdf: Evaluator, support: Interval, n: int = INVERSE_CDF_RESOLUTION
) -> TabulatedInverseCdf:
    """Tabulate the CDF of ``pdf`` on ``support`` and return its inverse."""
    lo, hi = support
    grid = np.linspace(lo, hi, n)
    dens = np.asarray(pdf(grid), dtype=float)
    if np.any(dens < 0):
        raise ValueError("pdf evaluator returned negative values")
    step = (hi - lo) / (n - 1)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * step)])
    if cdf[-1] <= 0:
        raise ValueError("pdf has zero mass on the support")
    cdf /= cdf[-1]
    return TabulatedInverseCdf(grid=grid, cdf=cdf)


def sample(dist: JointDistribution, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` pairs from ``dist``, deterministic given ``seed``.

    Discrete joints use inverse-CDF on the flattened pmf; the bivariate
    normal uses the two-independent-normals transform; the Circular Cauchy
    uses exact marginal-then-conditional inversion; curve-singular joints
    sample X from a tabulated inverse CDF, pick a branch by weight, and emit
    on-curve points. Returns an array of shape (n, 2).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(dist, DiscreteJoint):
        cum = np.cumsum(dist.pmf.ravel())
        cum /= cum[-1]
        idx = np.searchsorted(cum, rng.random(n), side="right")
        idx = np.minimum(idx, cum.size - 1)
        ix, iy = np.unravel_index(idx, dist.pmf.shape)
        return np.column_stack([dist.x_support[ix], dist.y_support[iy]])
    if isinstance(dist, BivariateNormal):
        z = rng.standard_normal((n, 2))
        x = z[:, 0]
        y = dist.r * z[:, 0] + math.sqrt(1.0 - dist.r * dist.r) * z[:, 1]
        return np.column_stack([x, y])
    if isinstance(dist, CircularCauchy):
        u1 = rng.random(n)
        u2 = np.maximum(rng.random(n), 2.0**-53)  # u2 = 0 would map w to -1 exactly
        x = np.tan(math.pi * (u1 - 0.5))
        a = np.sqrt(1.0 + x * x)
        w = 2.0 * u2 - 1.0
        y = a * w / np.sqrt(1.0 - w * w)
        return np.column_stack([x, y])
    if isinstance(dist, IndependentProduct):
        inv_x = tabulated_inverse_cdf(dist.marginal_x, dist.support_x)
        inv_y = tabulated_inverse_cdf(dist.marginal_y, dist.support_y)
        x = inv_x(rng.random(n))
        y = inv_y(rng.random(n))
        return np.column_stack([x, y])
    if isinstance(dist, CurveSingularJoint):
        inv_x = tabulated_inverse_cdf(dist.marginal_x, dist.support_x)
        x = inv_x(rng.random(n))
        weights = np.array([b.weight for b in dist.branches])
        cum = np.cumsum(weights)
        cum /= cum[-1]
        branch_idx = np.searchsorted(cum, rng.random(n), side="right")
        branch_idx = np.minimum(branch_idx, len(dist.branches) - 1)
        y = np.empty(n)
        for k, branch in enumerate(dist.branches):
            mask = branch_idx == k
            if np.any(mask):
                y[mask] = np.asarray(branch.phi(x[mask]), dtype=float)
        return np.column_stack([x, y])
    if isinstance(dist, ContinuousJoint):
        raise NotSampleable(
            "generic ContinuousJoint has no sampler; use a named family or "
            "provide samples directly"
        )
    raise TypeError(f"unsupported distribution type {type(dist).__name__}")


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_pmf_csv(f: io.TextIOBase, dist: DiscreteJoint) -> None:
    """Write a pmf table: header ``x,y:<label>...``, one row per x label."""
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(["x"] + [f"y:{_fmt(y)}" for y in dist.y_support])
    for i, x in enumerate(dist.x_support):
        writer.writerow([_fmt(x)] + [_fmt(p) for p in dist.pmf[i]])


def read_pmf_csv(f: io.TextIOBase) -> DiscreteJoint:
    """Parse a pmf table written by :func:`write_pmf_csv`.

    Cells are read as exact decimals before conversion to float, so a file
    value like ``0.1`` maps to the nearest double of the written literal.
    """
    rows = list(csv.reader(f))
    if not rows or len(rows[0]) < 2:
        raise ValueError("pmf csv needs a header row with at least one y label")
    header = rows[0]
    y_labels = []
    for cell in header[1:]:
        if not cell.startswith("y:"):
            raise ValueError(f"pmf csv header cell {cell!r} must look like 'y:<label>'")
        y_labels.append(_decimal_float(cell[2:]))
    x_labels, table = [], []
    for row in rows[1:]:
        if not row:
            continue
        if len(row) != len(y_labels) + 1:
            raise ValueError("pmf csv row width does not match the header")
        x_labels.append(_decimal_float(row[0]))
        table.append([_decimal_float(c) for c in row[1:]])
    return DiscreteJoint(np.array(x_labels), np.array(y_labels), np.array(table))


def _decimal_float(text: str) -> float:
    try:
        return float(Decimal(text.strip()))
    except InvalidOperation as exc:
        raise ValueError(f"not a decimal number: {text!r}") from exc


def write_samples_csv(f: io.TextIOBase, samples: np.ndarray) -> None:
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(["x", "y"])
    for x, y in np.asarray(samples, dtype=float):
        writer.writerow([_fmt(x), _fmt(y)])


def read_samples_csv(f: io.TextIOBase) -> np.ndarray:
    rows = list(csv.reader(f))
    if not rows or [c.strip() for c in rows[0]] != ["x", "y"]:
        raise ValueError("sample csv must start with header 'x,y'")
    data = [(float(r[0]), float(r[1])) for r in rows[1:] if r]
    return np.array(data, dtype=float).reshape(-1, 2)
