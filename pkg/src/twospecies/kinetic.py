"""Explicit solution of the two-species kinetic equations.

The removal rate ``a(t) = f1(0, t)`` solves the renewal equation

    a(t) = f1bar(t) + int_0^t a(t - s) f2hat(s) ds,   f2hat = f2bar / N2(0),

and is computed as the partial sum of iterated self-convolutions. Everything
else (total loss ``L``, ``N2 = N2(0) - L``, and the densities ``f1``, ``f2``)
follows from ``a`` in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import (
    ConfigurationError,
    DegenerateInputError,
    DegenerateKernelError,
    DomainError,
    HorizonError,
)
from .measures import GridDensity, integer_ratio

__all__ = [
    "KineticSolution",
    "convolve",
    "renewal_density",
    "total_loss",
    "solve",
    "blowup_time",
    "f1_eval",
    "f2_eval",
    "renewal_residual",
    "DEFAULT_FLOOR_FRACTION",
]

DEFAULT_FLOOR_FRACTION = 1e-3


def _padded(values: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size)
    k = min(size, values.size)
    out[:k] = values[:k]
    return out


def _trap_conv(f: np.ndarray, g: np.ndarray, size: int, h: float, method: str = "direct") -> np.ndarray:
    """Trapezoid rule for ``int_0^t f(t - s) g(s) ds`` at ``t = m h``, ``m < size``."""
    f = _padded(f, size)
    g = _padded(g, size)
    if method == "direct":
        full = np.convolve(f, g)[:size]
    elif method == "fft":
        full = fftconvolve(f, g)[:size]
    else:
        raise ConfigurationError(f"unknown convolution method {method!r}")
    out = h * (full - 0.5 * f * g[0] - 0.5 * f[0] * g)
    out[0] = 0.0
    return out


def convolve(f: GridDensity, g: GridDensity, t_max: float | None = None, method: str = "direct") -> GridDensity:
    """Causal convolution ``(f * g)(t)`` on ``[0, t_max]`` by the trapezoid rule."""
    if not math.isclose(f.step, g.step, rel_tol=1e-12):
        raise ConfigurationError(f"mismatched grid steps {f.step} and {g.step}")
    if t_max is None:
        t_max = f.support_bound + g.support_bound
    n = integer_ratio(t_max, f.step)
    if n is None:
        n = int(math.floor(t_max / f.step))
    out = _trap_conv(f.values, g.values, n + 1, f.step, method)
    return GridDensity(f.step, np.clip(out, 0.0, None))


def _series_length(rho: float, t_max: float, sup_f1: float, tol: float) -> int:
    # tail after K terms: e^t_max * rho^(K+1) / (1 - rho) * sup f1bar
    if sup_f1 == 0.0:
        return 0
    if rho == 0.0:
        return 1
    need = math.log(tol * (1.0 - rho) / sup_f1) - t_max
    return max(0, math.ceil(need / math.log(rho)) - 1)


def renewal_density(
    f1bar: GridDensity,
    f2hat: GridDensity,
    t_max: float,
    tol: float = 1e-10,
    method: str = "direct",
) -> GridDensity:
    """Partial sum of ``sum_j f2hat^{*j} * f1bar`` on ``[0, t_max]``.

    The number of terms is fixed in advance from the bound
    ``e^t_max rho^(K+1) / (1 - rho) sup f1bar < tol`` with
    ``rho = int e^-x f2hat(x) dx``.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if not math.isclose(f1bar.step, f2hat.step, rel_tol=1e-12):
        raise ConfigurationError("f1bar and f2hat must share a grid step")
    if abs(f2hat.total_mass - 1.0) > 1e-8:
        raise DomainError(f"f2hat must be a probability density, mass={f2hat.total_mass!r}")
    h = f1bar.step
    n = int(math.floor(t_max / h + 1e-9))
    size = n + 1

    weight = np.exp(-f2hat.nodes) * f2hat.values
    rho = float(0.5 * h * np.sum(weight[1:] + weight[:-1]))
    if rho >= 1.0 - 1e-12:
        raise DegenerateKernelError(f"renewal kernel has E[exp(-X)] = {rho!r}")

    term = _padded(f1bar.values, size)
    total = term.copy()
    kernel = _padded(f2hat.values, size)
    for _ in range(_series_length(rho, n * h, float(f1bar.values.max()), tol)):
        term = _trap_conv(kernel, term, size, h, method)
        if not term.any():
            break
        total += term
    return GridDensity(h, np.clip(total, 0.0, None))


def total_loss(a: GridDensity) -> GridDensity:
    """Running trapezoid integral ``L(t) = int_0^t a``."""
    return GridDensity(a.step, a.node_cdf)


@dataclass(frozen=True, eq=False)
class KineticSolution:
    """Removal rate, loss and species-2 number on the time grid, plus initial data."""

    a: GridDensity
    loss: GridDensity
    n2: np.ndarray
    initial: tuple[GridDensity, GridDensity]
    n2_zero: float
    n2_floor: float
    horizon: float

    @property
    def step(self) -> float:
        return self.a.step

    @property
    def t_max(self) -> float:
        return self.a.support_bound

    @property
    def times(self) -> np.ndarray:
        return self.a.nodes

    def n2_at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.n2))

    def f1_eval(self, t: float) -> GridDensity:
        return f1_eval(self, t)

    def f2_eval(self, t: float) -> GridDensity:
        return f2_eval(self, t)

    def pair_at(self, t: float) -> tuple[GridDensity, GridDensity]:
        return f1_eval(self, t), f2_eval(self, t)


def blowup_time(sol: KineticSolution, n2_floor: float = 0.0) -> float:
    """First time ``N2`` reaches ``n2_floor``, interpolated; ``t_max`` if never."""
    n2 = sol.n2
    below = np.flatnonzero(n2 <= n2_floor)
    if below.size == 0:
        return sol.t_max
    m = int(below[0])
    if m == 0:
        return 0.0
    frac = (n2[m - 1] - n2_floor) / (n2[m - 1] - n2[m])
    return float((m - 1 + frac) * sol.step)


def solve(
    f1bar: GridDensity,
    f2bar: GridDensity,
    t_max: float | None = None,
    tol: float = 1e-10,
    n2_floor: float | None = None,
    method: str = "direct",
) -> KineticSolution:
    """Solve the kinetic equations for initial densities ``(f1bar, f2bar)``.

    If ``t_max`` is omitted it starts at the support bound and is doubled
    until ``N2`` drops to ``n2_floor`` (default ``1e-3 * N2(0)``).
    """
    if not math.isclose(f1bar.step, f2bar.step, rel_tol=1e-12):
        raise ConfigurationError("initial densities must share a grid step")
    n2_zero = f2bar.total_mass
    if n2_zero <= 0:
        raise DegenerateInputError("species 2 must have positive initial mass")
    if n2_floor is None:
        n2_floor = DEFAULT_FLOOR_FRACTION * n2_zero
    f2hat = f2bar.scaled(1.0 / n2_zero)

    grow = t_max is None
    horizon_t = t_max if t_max is not None else max(f1bar.support_bound, f2bar.support_bound)
    for _ in range(8):
        a = renewal_density(f1bar, f2hat, horizon_t, tol, method)
        loss = total_loss(a)
        n2 = n2_zero - loss.values
        n2.setflags(write=False)
        sol = KineticSolution(a, loss, n2, (f1bar, f2bar), n2_zero, n2_floor, a.support_bound)
        if not grow or np.any(n2 <= n2_floor) or not f1bar.values.any():
            break
        horizon_t *= 2
    horizon = blowup_time(sol, n2_floor)
    return KineticSolution(a, loss, n2, (f1bar, f2bar), n2_zero, n2_floor, horizon)


def _check_time(sol: KineticSolution, t: float) -> None:
    if t < 0:
        raise DomainError("time must be nonnegative")
    if t >= sol.horizon and t > 0:
        raise HorizonError(f"t={t} is not before the horizon {sol.horizon}")


def _time_bracket(sol: KineticSolution, t: float) -> list[tuple[int, float]]:
    u = t / sol.step
    m = int(round(u))
    if abs(u - m) <= 1e-9 * max(1.0, u):
        return [(m, 1.0)]
    lo = int(math.floor(u))
    w = u - lo
    return [(lo, 1.0 - w), (lo + 1, w)]


def _f1_on_grid(sol: KineticSolution, m: int) -> np.ndarray:
    f1bar, f2bar = sol.initial
    h = sol.step
    nx = f1bar.values.size
    shifted = _padded(f1bar.values[m:], nx)
    weights = sol.a.values[: m + 1].copy()
    weights[0] *= 0.5
    weights[-1] *= 0.5
    if m == 0:
        return shifted
    corr = np.convolve(f2bar.values, weights)[m : m + nx]
    return shifted + h * _padded(corr, nx) / sol.n2_zero


def f1_eval(sol: KineticSolution, t: float) -> GridDensity:
    """Species-1 density at time ``t``: drifted initial data plus mutated mass."""
    _check_time(sol, t)
    f1bar = sol.initial[0]
    values = sum(w * _f1_on_grid(sol, m) for m, w in _time_bracket(sol, t))
    return GridDensity(f1bar.step, np.clip(values, 0.0, None))


def f2_eval(sol: KineticSolution, t: float) -> GridDensity:
    """Species-2 density at time ``t``: ``f2bar`` scaled by ``N2(t) / N2(0)``."""
    _check_time(sol, t)
    return sol.initial[1].scaled(sol.n2_at(t) / sol.n2_zero)


def _simpson_causal(a: np.ndarray, k: np.ndarray, h: float) -> np.ndarray:
    """Composite Simpson values of ``int_0^t a(t - s) k(s) ds`` at every node.

    Odd interval counts close with the 3/8 rule on the last three intervals.
    """
    n = a.size
    out = np.zeros(n)
    if n < 2:
        return out
    k_odd = np.where(np.arange(n) % 2 == 1, k, 0.0)
    full = np.convolve(a, k)[:n]
    full_odd = np.convolve(a, k_odd)[:n]
    m = np.arange(n)

    def g(mm, j):
        return a[mm - j] * k[j]

    even = m[(m % 2 == 0) & (m >= 2)]
    out[even] = h / 3.0 * (2 * full[even] + 2 * full_odd[even] - g(even, 0) - g(even, even))

    out[1] = 0.5 * h * (g(1, 0) + g(1, 1))

    odd = m[(m % 2 == 1) & (m >= 3)]
    if odd.size:
        p = odd - 3
        head = np.convolve(a[3:], k)[: n - 3]
        head_odd = np.convolve(a[3:], k_odd)[: n - 3]
        simpson = h / 3.0 * (2 * head[p] + 2 * head_odd[p] - g(odd, 0) - g(odd, p))
        tail = 3.0 * h / 8.0 * (g(odd, p) + 3 * g(odd, p + 1) + 3 * g(odd, p + 2) + g(odd, odd))
        out[odd] = simpson + tail
    return out


def renewal_residual(sol: KineticSolution) -> float:
    """Max over grid ``t <= horizon`` of ``|a - f1bar - a * f2hat|`` (Simpson quadrature)."""
    h = sol.step
    last = int(math.floor(sol.horizon / h + 1e-9))
    a = sol.a.values[: last + 1]
    f1bar, f2bar = sol.initial
    f1 = _padded(f1bar.values, a.size)
    k = _padded(f2bar.values, a.size) / sol.n2_zero
    resid = a - f1 - _simpson_causal(a, k, h)
    return float(np.max(np.abs(resid)))
