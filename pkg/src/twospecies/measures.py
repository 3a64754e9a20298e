"""Finite measures on ``[0, M]`` and the distances used to compare them.

Three representations are supported:

* :class:`GridDensity` -- nodal values on a uniform grid, linearly
  interpolated, so the cumulative function is piecewise quadratic;
* :class:`BinMeasure` -- masses on contiguous half-open bins of width
  ``delta``, spread uniformly inside each bin;
* :class:`EmpiricalMeasure` -- atoms of equal weight.

All of them expose ``knots()``, ``cdf(x)`` (right-continuous) and
``cdf_left(x)``; between consecutive knots every cumulative function is a
polynomial of degree at most two, which is what makes :func:`ks_distance`
exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ConfigurationError, DomainError

__all__ = [
    "GridDensity",
    "BinMeasure",
    "EmpiricalMeasure",
    "cumulative_eval",
    "ks_distance",
    "pair_distance",
    "modulus_of_continuity",
    "bin_from_density",
    "quantile",
    "integer_ratio",
]


def integer_ratio(a: float, b: float, rtol: float = 1e-9) -> int | None:
    """Return ``k`` if ``a == k * b`` up to ``rtol``, else ``None``."""
    if b <= 0:
        return None
    k = int(round(a / b))
    if abs(k * b - a) <= rtol * max(abs(a), abs(b)):
        return k
    return None


def _readonly(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def _check_x(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("cumulative functions are only defined for x >= 0")
    return x


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Nonnegative density sampled at ``x_i = i * step``, ``i = 0..N``.

    The density is the linear interpolant of ``values`` on ``[0, M]`` with
    ``M = N * step`` and is zero beyond ``M``; a jump at ``M`` is allowed.
    """

    step: float
    values: np.ndarray
    _node_cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = _readonly(self.values)
        if self.step <= 0:
            raise ConfigurationError(f"grid step must be positive, got {self.step}")
        if values.ndim != 1 or values.size < 2:
            raise ConfigurationError("a grid density needs at least two nodes")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DomainError("density values must be finite and nonnegative")
        h = float(self.step)
        node_cdf = np.concatenate(([0.0], np.cumsum(0.5 * h * (values[1:] + values[:-1]))))
        object.__setattr__(self, "step", h)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_node_cdf", _readonly(node_cdf))

    @classmethod
    def from_function(cls, func: Callable, step: float, support_bound: float) -> "GridDensity":
        n = integer_ratio(support_bound, step)
        if n is None:
            raise ConfigurationError(
                f"support bound {support_bound} is not a multiple of the step {step}"
            )
        x = np.arange(n + 1) * step
        return cls(step, np.clip(np.asarray(func(x), dtype=float), 0.0, None))

    @property
    def n_intervals(self) -> int:
        return self.values.size - 1

    @property
    def support_bound(self) -> float:
        return self.n_intervals * self.step

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.values.size) * self.step

    @property
    def total_mass(self) -> float:
        return float(self._node_cdf[-1])

    @property
    def node_cdf(self) -> np.ndarray:
        """Trapezoid cumulative integral at the grid nodes."""
        return self._node_cdf

    def __call__(self, x) -> np.ndarray:
        return np.interp(x, self.nodes, self.values, left=0.0, right=0.0)

    def scaled(self, factor: float) -> "GridDensity":
        return GridDensity(self.step, self.values * factor)

    def knots(self) -> np.ndarray:
        return self.nodes

    def cdf(self, x) -> np.ndarray:
        x = _check_x(x)
        h, n = self.step, self.n_intervals
        i = np.minimum(np.floor(x / h).astype(np.int64), n)
        cell = np.minimum(i, n - 1)
        s = x - cell * h
        f0 = self.values[cell]
        f1 = self.values[cell + 1]
        out = self._node_cdf[cell] + f0 * s + (f1 - f0) * s * s / (2.0 * h)
        return np.where(i >= n, self._node_cdf[-1], out)

    cdf_left = cdf


@dataclass(frozen=True, eq=False)
class BinMeasure:
    """Masses on bins ``I_l = [(l-1) * bin_width, l * bin_width)``."""

    bin_width: float
    masses: np.ndarray

    def __post_init__(self):
        masses = _readonly(self.masses)
        if self.bin_width <= 0:
            raise ConfigurationError("bin width must be positive")
        if masses.ndim != 1:
            raise ConfigurationError("bin masses must be one-dimensional")
        if not np.all(np.isfinite(masses)) or np.any(masses < 0):
            raise DomainError("bin masses must be finite and nonnegative")
        object.__setattr__(self, "bin_width", float(self.bin_width))
        object.__setattr__(self, "masses", masses)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def edges(self) -> np.ndarray:
        return np.arange(self.masses.size + 1) * self.bin_width

    def knots(self) -> np.ndarray:
        return self.edges

    def cdf(self, x) -> np.ndarray:
        x = _check_x(x)
        nb = self.masses.size
        if nb == 0:
            return np.zeros_like(x)
        edge_cdf = np.concatenate(([0.0], np.cumsum(self.masses)))
        u = x / self.bin_width
        cell = np.clip(np.floor(u).astype(np.int64), 0, nb - 1)
        frac = np.clip(u - cell, 0.0, 1.0)
        out = edge_cdf[cell] + frac * self.masses[cell]
        return np.where(u >= nb, edge_cdf[-1], out)

    cdf_left = cdf


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Atoms of mass ``weight`` at sorted ``points``."""

    points: np.ndarray
    weight: float

    def __post_init__(self):
        pts = np.sort(np.asarray(self.points, dtype=float))
        if pts.ndim != 1:
            raise ConfigurationError("points must be one-dimensional")
        if np.any(pts < 0):
            raise DomainError("particle positions must be nonnegative")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weight", float(self.weight))

    @classmethod
    def from_points(cls, points, n: int) -> "EmpiricalMeasure":
        return cls(points, 1.0 / n)

    @property
    def total_mass(self) -> float:
        return self.points.size * self.weight

    def knots(self) -> np.ndarray:
        return self.points

    def cdf(self, x) -> np.ndarray:
        x = _check_x(x)
        return np.searchsorted(self.points, x, side="right") * self.weight

    def cdf_left(self, x) -> np.ndarray:
        x = _check_x(x)
        return np.searchsorted(self.points, x, side="left") * self.weight


Measure = Union[GridDensity, BinMeasure, EmpiricalMeasure]


def cumulative_eval(m: Measure, x):
    """``F(x) = m([0, x])``; scalar in, scalar out."""
    out = m.cdf(x)
    return float(out) if np.ndim(out) == 0 else out


def ks_distance(a: Measure, b: Measure) -> float:
    """Exact ``sup_x |F_a(x) - F_b(x)|``.

    Both one-sided limits are checked at every knot of either measure. On
    each open interval between knots the difference is at most quadratic, so
    its interior extremum is located from the values at the two ends and the
    midpoint.
    """
    knots = np.union1d(np.union1d(a.knots(), b.knots()), [0.0])
    right = a.cdf(knots) - b.cdf(knots)
    left = a.cdf_left(knots) - b.cdf_left(knots)
    best = max(np.max(np.abs(right)), np.max(np.abs(left)))
    if knots.size < 2:
        return float(best)

    lo, hi = knots[:-1], knots[1:]
    mid = 0.5 * (lo + hi)
    d0, dm, d1 = right[:-1], a.cdf(mid) - b.cdf(mid), left[1:]
    lin = -3.0 * d0 + 4.0 * dm - d1
    quad = 2.0 * d0 - 4.0 * dm + 2.0 * d1
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -lin / (2.0 * quad)
    inside = (quad != 0) & (s > 0) & (s < 1)
    if np.any(inside):
        s = s[inside]
        vert = d0[inside] + lin[inside] * s + quad[inside] * s * s
        best = max(best, np.max(np.abs(vert)))
    return float(best)


def pair_distance(a: Sequence[Measure], b: Sequence[Measure]) -> float:
    """Sum of the per-species KS distances."""
    return ks_distance(a[0], b[0]) + ks_distance(a[1], b[1])


def modulus_of_continuity(f1: GridDensity, f2: GridDensity, delta: float) -> float:
    """``sup_x sum_j |f_j(x + delta) - f_j(x)|`` for grid densities.

    ``delta`` must be a multiple of the common grid step. Both the value and
    the right limit at each node are considered, which covers the jump to
    zero allowed at the support bound.
    """
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if not np.isclose(f1.step, f2.step, rtol=1e-12, atol=0):
        raise ConfigurationError("both densities must share a grid step")
    shift = integer_ratio(delta, f1.step)
    if shift is None or shift == 0:
        raise ConfigurationError(f"delta={delta} is not a multiple of the step {f1.step}")

    size = max(f1.values.size, f2.values.size) + shift + 1
    at_node = np.zeros(size - shift)
    right_lim = np.zeros(size - shift)
    for f in (f1, f2):
        val = np.zeros(size)
        val[: f.values.size] = f.values
        rlim = val.copy()
        rlim[f.values.size - 1] = 0.0
        at_node += np.abs(val[shift:] - val[:-shift])
        right_lim += np.abs(rlim[shift:] - rlim[:-shift])
    return float(max(at_node.max(), right_lim.max()))


def bin_from_density(f: GridDensity, delta: float) -> BinMeasure:
    """Exact trapezoid mass of ``f`` on each bin of width ``delta``."""
    r = integer_ratio(delta, f.step)
    if r is None or r == 0:
        raise ConfigurationError(f"bin width {delta} is not a multiple of the grid step {f.step}")
    n = f.n_intervals
    nbins = -(-n // r)
    idx = np.minimum(np.arange(nbins + 1) * r, n)
    return BinMeasure(delta, np.clip(np.diff(f.node_cdf[idx]), 0.0, None))


def quantile(f: GridDensity, q):
    """``inf{x : F(x) >= q}`` for ``0 <= q <= total mass``.

    The cell holding the answer is found by bisection over the nodal
    cumulative values; inside it ``F`` is quadratic and is inverted in
    closed form.
    """
    scalar = np.ndim(q) == 0
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    Fn = f.node_cdf
    total = Fn[-1]
    if np.any(q_arr < 0) or np.any(q_arr > total * (1 + 1e-12) + 1e-300):
        raise DomainError(f"quantile level outside [0, {total}]")
    q_arr = np.minimum(q_arr, total)
    h, v = f.step, f.values

    i = np.searchsorted(Fn, q_arr, side="left")
    out = (i * h).astype(float)
    interior = (i > 0) & (Fn[np.minimum(i, Fn.size - 1)] != q_arr)
    if np.any(interior):
        k = i[interior] - 1
        f0, f1 = v[k], v[k + 1]
        need = q_arr[interior] - Fn[k]
        a = (f1 - f0) / (2.0 * h)
        disc = np.sqrt(np.maximum(f0 * f0 + 4.0 * a * need, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            s = 2.0 * need / (f0 + disc)
        s = np.clip(np.where(np.isfinite(s), s, h), 0.0, h)
        out[interior] = k * h + s
    return float(out[0]) if scalar else out
