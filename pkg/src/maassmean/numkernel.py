"""Precision policy, line quadrature, deterministic summation and tail estimates.

Every other module leans on the helpers here, so they are kept small and
free of hidden state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np


class MaassMeanError(Exception):
    """Base class for all errors raised by the package."""


class QuadratureError(MaassMeanError):
    """Adaptive refinement did not settle; carries the last two estimates."""

    def __init__(self, message: str, previous: complex, last: complex):
        super().__init__(f"{message} (previous={previous!r}, last={last!r})")
        self.previous = previous
        self.last = last


class DivergenceError(MaassMeanError):
    """Successive partial sums grow instead of settling."""


class PoleError(MaassMeanError, ZeroDivisionError):
    """Argument sits on (or numerically next to) a pole."""


class DomainError(MaassMeanError, ValueError):
    """Argument outside the region where a formula is valid."""


class BudgetExceeded(MaassMeanError):
    """A truncation budget ran out before the requested tolerance was met."""


@dataclass(frozen=True)
class PrecisionPolicy:
    working_digits: int = 15
    target_tol: float = 1e-10
    max_digits: int = 40

    def __post_init__(self):
        if self.working_digits < 15:
            raise ValueError("working_digits must be at least 15")
        if not self.target_tol > 0:
            raise ValueError("target_tol must be positive")
        if self.max_digits < self.working_digits:
            raise ValueError("max_digits must be >= working_digits")

    def escalated(self, extra: int = 15) -> "PrecisionPolicy":
        digits = min(self.max_digits, self.working_digits + extra)
        return PrecisionPolicy(digits, self.target_tol, self.max_digits)


class TailMode(str, Enum):
    WEIL_BOUND = "weil_bound"
    RICHARDSON = "richardson"
    FIXED = "fixed"


@dataclass(frozen=True)
class SeriesBudget:
    c_max: int = 10_000
    k_max: int = 12
    quad_nodes: int = 24              # Gauss-Legendre nodes per panel
    contour_offset: float = 0.375
    tail_mode: TailMode = TailMode.WEIL_BOUND

    def __post_init__(self):
        for name in ("c_max", "k_max", "quad_nodes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not -1.0 <= self.contour_offset <= 1.0:
            raise ValueError("contour_offset must lie in [-1, 1]")
        object.__setattr__(self, "tail_mode", TailMode(self.tail_mode))


# ---------------------------------------------------------------------------
# quadrature

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], cached by order."""
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def panel_nodes(breaks: Sequence[float], order: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule over consecutive intervals of `breaks`."""
    x, w = gauss_legendre(order)
    b = np.asarray(breaks, dtype=float)
    a, c = b[:-1, None], b[1:, None]
    half = 0.5 * (c - a)
    nodes = (half * x + 0.5 * (a + c)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def _panel_sum(f, offset, lo, hi, panels, order):
    u, w = panel_nodes(np.linspace(lo, hi, panels + 1), order)
    vals = np.asarray(f(u + 1j * offset), dtype=complex)
    return sum_compensated(vals * w)


def integrate_line(
    f: Callable[[np.ndarray], np.ndarray],
    offset: float = 0.0,
    half_width: float = 10.0,
    tol: float = 1e-12,
    center: float = 0.0,
    order: int = 24,
    max_panels: int = 4096,
    return_error: bool = False,
):
    """Integrate a vectorised analytic `f` along t = u + i*offset, |u - center| <= half_width.

    The panel count doubles until two successive composite rules agree to
    `tol`; the returned error is that difference.  Truncation of the line
    is the caller's choice of `half_width`; for Gaussian-type integrands
    `gaussian_half_width` gives the standard cut.
    """
    lo, hi = center - half_width, center + half_width
    panels = max(2, int(math.ceil(half_width)))
    prev = _panel_sum(f, offset, lo, hi, panels, order)
    while True:
        panels *= 2
        cur = _panel_sum(f, offset, lo, hi, panels, order)
        err = abs(cur - prev)
        if err <= tol * max(1.0, abs(cur)):
            return (cur, err) if return_error else cur
        if panels >= max_panels:
            raise QuadratureError("line quadrature did not converge", prev, cur)
        prev = cur


def gaussian_half_width(width: float, tol: float) -> float:
    """Cut for exp(-u^2/width^2) integrands: width * sqrt(ln(1/tol)) plus a margin."""
    return width * math.sqrt(math.log(1.0 / tol)) + 2.0 * width


# ---------------------------------------------------------------------------
# summation

def sum_compensated(terms: Iterable[complex]) -> complex:
    """Correctly rounded sum of complex terms.

    Real and imaginary parts go through math.fsum, which is exact up to the
    final rounding, so the result does not depend on ordering or blocking.
    """
    if not isinstance(terms, np.ndarray):
        terms = list(terms)
    arr = np.asarray(terms, dtype=complex).ravel()
    if arr.size == 0:
        return 0j
    return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))


def pairwise_sum(arr: np.ndarray, axis: int = -1) -> np.ndarray:
    """Fixed-tree pairwise reduction along one axis (bit-reproducible)."""
    a = np.moveaxis(np.asarray(arr), axis, -1)
    while a.shape[-1] > 1:
        if a.shape[-1] % 2:
            a = np.concatenate([a, np.zeros(a.shape[:-1] + (1,), dtype=a.dtype)], axis=-1)
        a = a[..., 0::2] + a[..., 1::2]
    return a[..., 0]


def tail_estimate(
    partial_at_B: complex,
    partial_at_2B: complex,
    decay_exponent_hint: float = 1.0,
    partial_at_half_B: complex | None = None,
) -> float:
    """Remaining tail of a series with terms summed up to 2B.

    For terms decaying like n^(-p-1) the tail beyond 2B is the last
    increment divided by 2^p - 1.  The estimate is never smaller than the
    last increment itself.  If a third, earlier partial is given and the
    increments grow, the series is flagged as divergent.
    """
    d = abs(complex(partial_at_2B) - complex(partial_at_B))
    if not math.isfinite(d):
        raise DivergenceError("non-finite partial sums")
    if partial_at_half_B is not None:
        d_prev = abs(complex(partial_at_B) - complex(partial_at_half_B))
        if d > d_prev and d > 0:
            raise DivergenceError(f"increments grow: {d_prev:.3e} -> {d:.3e}")
    p = decay_exponent_hint
    if p <= 0:
        raise DivergenceError("decay exponent must be positive")
    factor = 1.0 / (2.0 ** p - 1.0) if p < 60 else 0.0
    return max(d, d * factor)
