"""Maass-form spectral data: loading, validation, L-values at the special
point, spectral mean values and the Kuznetsov trace-formula harness.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from . import arith
from .bessel import bessel, bessel_orders
from .numkernel import DomainError, SeriesBudget, panel_nodes
from .specfun import log_gamma
from .zetal import riemann_zeta

# The bundled fixture was produced by a scan reaching t = 31; completeness
# is claimed one unit below that.
BUNDLED_T_MAX = 30.0
_MIN_COEFFS = 10


class DatasetError(DomainError):
    """Malformed spectral data; message names the line and field."""


class InsufficientCoefficients(DomainError):
    def __init__(self, needed: int, available: int):
        super().__init__(f"needs {needed} Hecke eigenvalues, only {available} available")
        self.needed = needed
        self.available = available


@dataclass(frozen=True)
class MaassForm:
    t: float
    parity: int
    omega: float
    coeffs: np.ndarray
    lvalues: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))

    def lam(self, n: int) -> float:
        """Hecke eigenvalue lambda(n), 1-based."""
        if not 1 <= n <= len(self.coeffs):
            raise InsufficientCoefficients(n, len(self.coeffs))
        return float(self.coeffs[n - 1])


@dataclass(frozen=True)
class TraceReport:
    cusp: complex
    eisen: complex
    diag: complex
    kb_plus: complex
    kb_minus: complex
    residual: complex
    tail_budget: float
    c_max: int = 0
    flagged: bool = False

    @property
    def passed(self) -> bool:
        return abs(self.residual) <= self.tail_budget


def bundled_dataset_path() -> Path:
    return Path(str(resources.files("maassmean") / "data" / "maass_level1.jsonl"))


# ---------------------------------------------------------------------------
# loading

def _require(rec: dict, name: str, lineno: int):
    if name not in rec:
        raise DatasetError(f"line {lineno}: missing field '{name}'")
    return rec[name]


def _parse_lvalues(raw, lineno: int) -> dict:
    out = {}
    if raw is None:
        return out
    if not isinstance(raw, list):
        raise DatasetError(f"line {lineno}: field 'lvalues' must be a list")
    for item in raw:
        try:
            s = complex(*item["s"])
            v = complex(*item["value"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetError(f"line {lineno}: field 'lvalues' entry malformed ({exc})") from None
        out[s] = v
    return out


def parse_record(rec: dict, lineno: int = 0) -> MaassForm:
    t = _require(rec, "t", lineno)
    parity = _require(rec, "parity", lineno)
    omega = _require(rec, "omega", lineno)
    coeffs = _require(rec, "coeffs", lineno)
    if not isinstance(t, (int, float)) or not t > 0:
        raise DatasetError(f"line {lineno}: field 't' must be a positive number")
    if parity not in (0, 1) or isinstance(parity, bool):
        raise DatasetError(f"line {lineno}: field 'parity' must be 0 or 1, got {parity!r}")
    if not isinstance(omega, (int, float)) or not omega > 0:
        raise DatasetError(f"line {lineno}: field 'omega' must be a positive number")
    if not isinstance(coeffs, list) or not all(isinstance(c, (int, float)) for c in coeffs):
        raise DatasetError(f"line {lineno}: field 'coeffs' must be an array of numbers")
    if len(coeffs) < _MIN_COEFFS:
        raise DatasetError(f"line {lineno}: field 'coeffs' has {len(coeffs)} entries, need >= {_MIN_COEFFS}")
    if abs(coeffs[0] - 1) > 1e-8:
        raise DatasetError(f"line {lineno}: field 'coeffs' must start with lambda(1) = 1")
    return MaassForm(float(t), int(parity), float(omega), np.array(coeffs, dtype=float),
                     _parse_lvalues(rec.get("lvalues"), lineno))


def load_dataset(path) -> list[MaassForm]:
    """Read one JSON object per line; blank lines are skipped.  Sorted by t."""
    forms: list[MaassForm] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {lineno}: parse error ({exc.msg})") from None
            if not isinstance(rec, dict):
                raise DatasetError(f"line {lineno}: record must be an object")
            forms.append(parse_record(rec, lineno))
    forms.sort(key=lambda f: f.t)
    for a, b in zip(forms, forms[1:]):
        if abs(a.t - b.t) < 1e-9:
            raise DatasetError(f"duplicate spectral parameter t = {b.t}")
    return forms


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Violation:
    check: str
    detail: str
    deviation: float


def hecke_deviation(f: MaassForm) -> tuple[float, tuple[int, int]]:
    """Largest |lambda(m)lambda(n) - sum_{d | (m,n)} lambda(mn/d^2)| over mn <= N."""
    lam = f.coeffs
    N = len(lam)
    worst, where = 0.0, (1, 1)
    for m in range(2, N + 1):
        for n in range(m, N // m + 1):
            rhs = sum(lam[m * n // (d * d) - 1] for d in arith.divisors(math.gcd(m, n)))
            dev = abs(lam[m - 1] * lam[n - 1] - rhs)
            if dev > worst:
                worst, where = dev, (m, n)
    return worst, where


def validate_form(f: MaassForm, tol: float = 1e-6) -> list[Violation]:
    out = []
    if not f.t > 0:
        out.append(Violation("t", "spectral parameter must be positive", abs(f.t)))
    if f.parity not in (0, 1):
        out.append(Violation("parity", f"parity {f.parity} not in {{0, 1}}", 1.0))
    if not f.omega > 0:
        out.append(Violation("omega", "harmonic weight must be positive", abs(f.omega)))
    if abs(f.coeffs[0] - 1) > tol:
        out.append(Violation("coeffs", "lambda(1) must be 1", abs(f.coeffs[0] - 1)))
    dev, (m, n) = hecke_deviation(f)
    if dev > tol:
        out.append(Violation("hecke", f"Hecke relation fails at (m, n) = ({m}, {n})", dev))
    return out


# ---------------------------------------------------------------------------
# L(s, f) by a smoothed approximate functional equation

def _log_gamma_factor(s, t: float, parity: int):
    """log of pi^{-s} Gamma((s + parity + it)/2) Gamma((s + parity - it)/2)."""
    s = np.asarray(s, dtype=complex)
    return (-s * math.log(math.pi) + log_gamma((s + parity + 1j * t) / 2)
            + log_gamma((s + parity - 1j * t) / 2))


def _cutoff_rule(s: complex, t: float, c: float = 1.5):
    """Nodes w = c + iv for the cutoff integrals, covering the Gamma decay window."""
    reach = abs(s.imag) + t + 40.0
    panels = int(math.ceil(2 * reach))
    v, wt = panel_nodes(np.linspace(-reach, reach, panels + 1), 16)
    return c + 1j * v, wt


def _cutoff_values(s: complex, f: MaassForm, y: np.ndarray, ref: complex) -> np.ndarray:
    """(1/2 pi i) int gamma(s+w) y^{-w} dw/w, divided by exp(ref)."""
    w, wt = _cutoff_rule(s, f.t)
    g = np.exp(_log_gamma_factor(s + w, f.t, f.parity) - ref) * wt / w / (2 * math.pi)
    return np.exp(-np.log(y)[:, None] * w[None, :]) @ g


def lvalue_special(f: MaassForm, s, split: float = 1.0, tol: float = 1e-12) -> complex:
    """L(s, f) from Lambda(s) = sum lam(n) n^{-s} V_s(n/X) + eps sum lam(n) n^{s-1} V_{1-s}(nX).

    Lambda(s) = gamma(s) L(s, f) with
    gamma(s) = pi^{-s} Gamma((s + delta + it)/2) Gamma((s + delta - it)/2),
    eps = (-1)^delta and X the split point.  The cutoff V is the inverse
    Mellin transform of gamma(s + w)/w, which decays exponentially.
    """
    s = complex(s)
    X = float(split)
    N = len(f.coeffs)
    eps = -1.0 if f.parity else 1.0
    ref = complex(_log_gamma_factor(s, f.t, f.parity))
    n = np.arange(1, N + 1, dtype=float)
    v1 = _cutoff_values(s, f, n / X, ref)
    v2 = _cutoff_values(1 - s, f, n * X, ref)
    t1 = f.coeffs * np.exp(-s * np.log(n)) * v1
    t2 = eps * f.coeffs * np.exp((s - 1) * np.log(n)) * v2
    total = complex(np.sum(t1) + np.sum(t2))
    # the final terms must already be negligible; otherwise report the need
    last = abs(t1[-1]) + abs(t2[-1])
    if last > tol * max(1.0, abs(total)):
        needed = N
        while True:
            needed = int(needed * 1.5) + 1
            y = np.array([needed / X, needed * X])
            mag = (abs(_cutoff_values(s, f, y[:1], ref)[0]) * needed ** (-s.real)
                   + abs(_cutoff_values(1 - s, f, y[1:], ref)[0]) * needed ** (s.real - 1))
            if mag * arith.num_divisors(needed) < tol * max(1.0, abs(total)):
                break
            if needed > 10 ** 6:
                # the cutoff integrals cancel exponentially when |Im s| is far from t_f
                raise DomainError(f"approximate functional equation is ill-conditioned at s = {s}")
        raise InsufficientCoefficients(needed, N)
    return total


def completed_lvalue(f: MaassForm, s, split: float = 1.0) -> complex:
    s = complex(s)
    return complex(np.exp(_log_gamma_factor(s, f.t, f.parity))) * lvalue_special(f, s, split)


# ---------------------------------------------------------------------------
# weights and the spectral mean value

class GaussianPair:
    """h(t) = exp(-((t - T)/P)^2) + exp(-((t + T)/P)^2), even and entire."""

    def __init__(self, center: float, width: float):
        if not width > 0:
            raise DomainError("width must be positive")
        self.center = float(center)
        self.width = float(width)

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        return np.exp(-((t - self.center) / self.width) ** 2) + np.exp(-((t + self.center) / self.width) ** 2)

    @property
    def reach(self) -> float:
        return self.center + 6.5 * self.width


def _weyl_tail(phi: Callable, t_max: float, lam_bound: float = 1.0) -> float:
    """Bound for the spectral terms beyond t_max.

    Uses the Plancherel density t/(2 pi^2) per parity for the harmonic
    weights, with a safety factor 3, times the size of |phi(t)| + |phi(-t)|.
    """
    f = lambda t: (abs(complex(phi(t))) + abs(complex(phi(-t)))) * t / (2 * math.pi ** 2)
    val, _ = integrate.quad(f, t_max, np.inf, limit=200)
    return 3.0 * lam_bound * val


def lhs_mean(delta: int, weight: Callable, forms: Sequence[MaassForm], m: int = 1,
             t_max: float | None = None, lvalue_scale: float = 3.0) -> tuple[complex, float]:
    """sum over forms of parity delta of omega lam(m) (L(1/2+it) phi(t) + L(1/2-it) phi(-t)).

    Returns (value, tail_budget).  The tail budget covers forms beyond
    t_max (default: the largest t present) via the Plancherel density,
    with |L| bounded by lvalue_scale.  A weight with more than 10% of its
    mass beyond t_max is refused.
    """
    if delta not in (0, 1):
        raise DomainError("delta must be 0 or 1")
    if t_max is None:
        t_max = max((f.t for f in forms), default=0.0)
    mass_total = _weyl_tail(weight, 0.0)
    mass_beyond = _weyl_tail(weight, t_max)
    if forms and mass_beyond > 0.1 * mass_total:
        raise DomainError(f"weight has {mass_beyond / mass_total:.1%} of its mass beyond t_max = {t_max}")
    total = 0j
    for f in forms:
        if f.parity != delta:
            continue
        lp = lvalue_special(f, 0.5 + 1j * f.t)
        lm = lvalue_special(f, 0.5 - 1j * f.t)
        total += f.omega * f.lam(m) * (lp * complex(weight(f.t)) + lm * complex(weight(-f.t)))
    tail = mass_beyond * lvalue_scale * arith.num_divisors(m)
    return total, float(tail)


# ---------------------------------------------------------------------------
# Kuznetsov trace formula

def _real_line_rule(reach: float, panel: float = 1.0, order: int = 24):
    panels = int(math.ceil(2 * reach / panel))
    return panel_nodes(np.linspace(-reach, reach, panels + 1), order)


def plancherel_integral(h: Callable, reach: float) -> complex:
    """(1/pi^2) int h(t) tanh(pi t) t dt."""
    t, w = _real_line_rule(reach)
    return complex(np.sum(w * h(t) * np.tanh(np.pi * t) * t)) / math.pi ** 2


def eisenstein_integral(h: Callable, reach: float, m: int, n: int) -> complex:
    """(1/pi) int h(t) tau_it(m) tau_it(n) / |zeta(1 + 2it)|^2 dt."""
    t, w = _real_line_rule(reach)
    z = riemann_zeta(1 + 2j * t)
    return complex(np.sum(w * h(t) * arith.divisor_tau(1j * t, m) * arith.divisor_tau(1j * t, n)
                          / np.abs(z) ** 2)) / math.pi


class BesselTransform:
    """H^+-(x) = (2i/pi) int h(t) {J, I}_{2it}(x) t / cosh(pi t) dt on Im t = -offset."""

    def __init__(self, h: Callable, reach: float, offset: float = 0.375, x_series: float = 8.0,
                 n_terms: int = 60, x_k_route: float = 4.0):
        t, w = _real_line_rule(reach)
        self.h = h
        self.real_t, self.real_w = t, w
        self.x_k_route = x_k_route
        self.t = t - 1j * offset
        self.offset = offset
        self.x_series = x_series
        self.nu = 2j * self.t
        # log of the per-node factor w h t / cosh(pi t)
        lc = np.log(np.cosh(np.pi * self.t))
        self.node = w * h(self.t) * self.t * np.exp(-lc) * (2j / math.pi)
        k = np.arange(n_terms)
        # a_{jk} = node_j / (k! Gamma(nu_j + k + 1))
        lg = np.array([log_gamma(self.nu + kk + 1) for kk in k]).T
        self.coef = self.node[:, None] * np.exp(-lg - np.array([math.lgamma(kk + 1) for kk in k])[None, :])
        self.k = k
        self.abs_node = np.abs(self.node)

    def series(self, sign: int, x: np.ndarray) -> np.ndarray:
        """Vectorised over x <= x_series through the ascending series."""
        x = np.asarray(x, dtype=float)
        lx = np.log(x / 2)
        E = np.exp(np.outer(lx, self.nu))               # (x/2)^{2it}
        inner = E @ self.coef                            # shape (len x, n_terms)
        q = (-1.0 if sign > 0 else 1.0)
        powk = np.exp(np.outer(2 * lx, self.k)) * q ** self.k
        return np.sum(inner * powk, axis=1)

    def direct(self, sign: int, x: float) -> complex:
        if sign < 0 and x > self.x_k_route:
            return self.k_route(x)
        b = bessel_orders("J" if sign > 0 else "I", self.nu, x)
        return complex(np.sum(self.node * b))

    def k_route(self, x: float) -> complex:
        """H^-(x) = (2/pi^2) int h(t) 2 cosh(pi t) K_{2it}(x) tanh(pi t) t dt on the real line.

        The I-Bessel contour form cancels down from e^x; this form does not.
        """
        t, w = self.real_t, self.real_w
        k = np.array([bessel("K", 2j * tt, x) for tt in t])
        vals = self.h(t) * 2 * np.sinh(np.pi * t) * k * t
        return complex(np.sum(w * vals)) * 2 / math.pi ** 2

    def __call__(self, sign: int, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty(x.shape, dtype=complex)
        small = x <= self.x_series
        if np.any(small):
            out[small] = self.series(sign, x[small])
        for i in np.flatnonzero(~small):
            out[i] = self.direct(sign, float(x[i]))
        if sign < 0:
            for i in np.flatnonzero(small & (x > self.x_k_route)):
                out[i] = self.k_route(float(x[i]))
        return out

    def envelope(self, x: float) -> float:
        """Bound for |H(x)| from |J_nu(x)|, |I_nu(x)| < |(x/2)^nu e^{x^2/4} / Gamma(nu + 1)|."""
        lg = log_gamma(self.nu + 1)
        return float(np.sum(self.abs_node * np.abs(np.exp(self.nu * math.log(x / 2) - lg)))
                     * math.exp(x * x / 4))


def _kloosterman_side(bt: BesselTransform, m: int, n: int, c_max: int, block: int = 512):
    """KB^+ and KB^- summed over c <= c_max, plus a tail estimate."""
    x0 = 4 * math.pi * math.sqrt(m * n)
    kb = {1: 0j, -1: 0j}
    for sign in (1, -1):
        terms = []
        for lo in range(1, c_max + 1, block):
            cs = np.arange(lo, min(c_max, lo + block - 1) + 1)
            S = np.array([arith.kloosterman(m, sign * n, int(c)) for c in cs])
            H = bt(sign, x0 / cs)
            terms.append(S / cs * H)
        kb[sign] = complex(np.sum(np.concatenate(terms)))
    # tail: Weil bound times the computed |H| on (C, 4C]; beyond 4C the
    # contour bound |H(x)| <~ x^p (p = 2 * offset) and sum tau(c) c^{-1/2-p}
    cs = np.unique(np.geomspace(c_max + 1, 4 * c_max, 48).astype(int))
    p = 2 * bt.offset
    g = math.sqrt(math.gcd(m, n))
    tail = 0.0
    for sign in (1, -1):
        H = np.abs(bt(sign, x0 / cs))
        weil = np.array([arith.weil_bound(m, n, int(c)) for c in cs]) / cs
        tail += float(np.trapezoid(weil * H, cs))
        A = float(cs[-1])
        h_scaled = float(np.max(H[-8:] * (cs[-8:] / A) ** p))
        if p > 0.5:
            e = p - 0.5
            tail += g * h_scaled * A ** p * A ** (-e) * (math.log(A) / e + 1 / e ** 2)
        else:
            tail = math.inf
    return kb[1], kb[-1], tail


def kuznetsov_sides(delta: int, m: int, n: int, h, forms: Sequence[MaassForm],
                    budget: SeriesBudget = SeriesBudget(), t_max: float | None = None,
                    reach: float | None = None) -> TraceReport:
    """Both sides of the trace formula for forms of parity delta.

    cusp side:        2 sum omega h(t) lam(m) lam(n) + 2 (1 - delta) Xi
    Kloosterman side: [m = n] H + KB^+ + (-1)^delta KB^-
    """
    if delta not in (0, 1):
        raise DomainError("delta must be 0 or 1")
    reach = reach if reach is not None else getattr(h, "reach", None)
    if reach is None:
        raise DomainError("kuznetsov_sides needs a reach (|t| beyond which h is negligible)")
    if t_max is None:
        t_max = max((f.t for f in forms), default=0.0)
    cusp = 0j
    for f in forms:
        if f.parity == delta:
            cusp += 2 * f.omega * complex(h(f.t)) * f.lam(m) * f.lam(n)
    eisen = 2 * (1 - delta) * eisenstein_integral(h, reach, m, n)
    diag = plancherel_integral(h, reach) if m == n else 0j
    bt = BesselTransform(h, reach, offset=budget.contour_offset)
    kbp, kbm, kb_tail = _kloosterman_side(bt, m, n, budget.c_max)
    kloost = diag + kbp + (-1) ** delta * kbm
    residual = cusp + eisen - kloost
    spectral_tail = _weyl_tail(h, t_max, arith.num_divisors(m) * arith.num_divisors(n))
    tail = kb_tail + spectral_tail
    return TraceReport(cusp, eisen, diag, kbp, kbm, residual, float(tail), budget.c_max, False)
