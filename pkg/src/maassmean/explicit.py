"""Explicit formula for the smoothed first moment of L(1/2 + i t_f, f).

The right-hand side is a sum of eight named terms built from a test
weight phi.  The double series A_breve enters two of them; it is
evaluated by expanding the regularised Kummer function in powers of its
argument and summing every residue class mod c in closed form with
Hurwitz zeta values.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Sequence

import mpmath as mp
import numpy as np

from . import arith
from .numkernel import DomainError, SeriesBudget, panel_nodes, tail_estimate
from .specfun import GammaKind, gamma_factor, log_gamma, theta_breve
from .zetal import L_delta, hurwitz_zeta, riemann_zeta

SQRT_PI = math.sqrt(math.pi)
TERM_NAMES = ("D", "E", "Eprime", "A0", "A1breve", "Anatural", "K1", "Knatural")
TERM_SIGNS = {"D": 1, "E": -1, "Eprime": -1, "A0": 1, "A1breve": 1, "Anatural": 1, "K1": 1, "Knatural": 1}
FORMAT_TAG = "maassmean.term-breakdown/1"


# ---------------------------------------------------------------------------
# test weights

class WeightVariant(str, Enum):
    PLAIN = "plain"
    MODIFIED = "modified"


@dataclass(frozen=True)
class TestWeight:
    """Gaussian phi(t) = exp(-(t - T)^2 / Pi^2), optionally times (t^2 + 1/4)/(t^2 + 4).

    The modified variant vanishes at t = +-i/2.  Both are evaluated as
    analytic functions on the strip |Im t| <= 1.
    """
    __test__ = False   # keep pytest from collecting this class

    center: float
    width: float
    variant: WeightVariant = WeightVariant.MODIFIED

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError("weight width must be positive")
        object.__setattr__(self, "variant", WeightVariant(self.variant))

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        if np.any(np.abs(t.imag) > 1 + 1e-12):
            raise DomainError("test weight evaluated outside |Im t| <= 1")
        out = np.exp(-((t - self.center) / self.width) ** 2)
        if self.variant == WeightVariant.MODIFIED:
            out = out * (t * t + 0.25) / (t * t + 4)
        return out if out.ndim else complex(out)

    def half_width(self, tol: float = 1e-16) -> float:
        return self.width * math.sqrt(math.log(1 / tol)) + 2 * self.width

    @property
    def reach(self) -> float:
        return abs(self.center) + self.half_width()

    def windows(self, tol: float = 1e-16) -> list[tuple[float, float]]:
        """Intervals outside of which phi(t) and phi(-t) are below tol (relative)."""
        r = self.half_width(tol)
        T = abs(self.center)
        if T - r <= 0:
            return [(-(T + r), T + r)]
        return [(-(T + r), -(T - r)), (T - r, T + r)]


def weight_eval(w: TestWeight, t):
    return w(t)


def _rule(w: TestWeight, offset: float = 0.0, panel: float = 0.5, order: int = 24):
    """Composite Gauss-Legendre nodes t = u + i*offset covering the weight windows."""
    us, ws = [], []
    for lo, hi in w.windows():
        n = max(2, int(math.ceil((hi - lo) / panel)))
        u, wt = panel_nodes(np.linspace(lo, hi, n + 1), order)
        us.append(u)
        ws.append(wt)
    return np.concatenate(us) + 1j * offset, np.concatenate(ws)


# ---------------------------------------------------------------------------
# gamma factors on the contours

def gamma_one(s):
    """(2pi)^{-s} Gamma(s) i sin(pi s/2), in the reflected form i pi (2pi)^{-s} / (2 Gamma(1-s) cos(pi s/2)).

    The reflected form is regular at s = 0, -2, -4, ... where the two
    factors of the plain form meet a pole and a zero.
    """
    s = np.asarray(s, dtype=complex)
    z = np.pi * s / 2
    # log(2 cos z) with the dominant exponential factored out, so large |Im s| cannot overflow
    sig = np.where(z.imag >= 0, 1.0, -1.0)
    with np.errstate(divide="ignore"):
        log_2cos = -1j * sig * z + np.log1p(np.exp(2j * sig * z))
    out = 1j * math.pi * np.exp(-s * math.log(2 * math.pi) - log_gamma(1 - s) - log_2cos)
    return out if out.ndim else complex(out)


def _gamma_natural(delta: int, s):
    return gamma_factor(delta, GammaKind.NATURAL, s)


def _gamma_plain(delta: int, s):
    return gamma_factor(delta, GammaKind.PLAIN, s)


# ---------------------------------------------------------------------------
# the double series A_breve

def theta_coefficients(s, depth: int) -> np.ndarray:
    """(1/2)_k / ((1 - s)_k k!) for k = 1..depth; rows follow s."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    out = np.empty((s.size, depth), dtype=complex)
    cur = np.ones(s.size, dtype=complex)
    for k in range(1, depth + 1):
        cur = cur * (k - 0.5) / ((k - s) * k)
        out[:, k - 1] = cur
    return out


def _depth(c: int, m: int, floor: int, eps: float = 1e-18, cap: int = 160) -> int:
    """Expansion depth at modulus c: the first omitted term is below eps times the k = 1 term."""
    x = 2 * math.pi * m / (c * c)
    lead = 0.5 * x
    term = lead
    k = 1
    while k < cap:
        k += 1
        term *= (k - 0.5) * x / (k * k)
        if k >= floor and term < eps * lead:
            return k
    return cap


def _zeta_taylor_table(a_values: np.ndarray, J: int) -> np.ndarray:
    """(a)_j / j! * zeta(a + j, 3/2), j = 0..J-1, per a."""
    out = np.empty((a_values.size, J))
    for i, a in enumerate(a_values):
        j = np.arange(J)
        z = hurwitz_zeta(a + j, 1.5).real
        poch = np.cumprod(np.concatenate([[1.0], (a + j[:-1]) / (j[1:])]))
        out[i] = poch * z
    return out


_DIRECT_BELOW = 64
_TAYLOR_J = 44


@lru_cache(maxsize=256)
def _a_breve_rows(delta: int, m: int, c_lo: int, c_hi: int, floor: int):
    """Coefficients W_k(c) for c_lo <= c < c_hi so that

        A_breve(s) = m^{-s/2} sum_k coef_k(s) sum_c c^s W_k(c).

    W_k(c) = sum_+- (+-)^delta (-+ 2 pi i m)^k c^{-1-2k} S_k^+-(c), with
    S_k^+-(c) = sum over r in [1, c] coprime to c of e(+- m rbar / c) zeta(k + 1/2, r / c).
    """
    depth = max(_depth(c_lo, m, floor), floor)
    cs = np.arange(c_lo, c_hi)
    W = np.zeros((cs.size, depth), dtype=complex)
    ks = np.arange(1, depth + 1)
    taylor = None
    for i, c in enumerate(cs):
        c = int(c)
        kc = _depth(c, m, floor)
        a_vals = ks[:kc] + 0.5
        if c == 1:
            r, rbar = np.array([1]), np.array([1])
        else:
            r, rbar = arith.inverse_table(c)
            r = r.copy()
        phase = np.exp(2j * np.pi * ((m * rbar) % c) / c)
        S = {}
        if c < _DIRECT_BELOW:
            x = np.where(r == 0, c, r) / c
            hz = hurwitz_zeta(a_vals[:, None], x[None, :])
            S[1] = hz @ phase
            S[-1] = hz @ np.conj(phase)
        else:
            if taylor is None or taylor.shape[0] < kc:
                taylor = _zeta_taylor_table(ks + 0.5, _TAYLOR_J)
            x = r / c
            y = 0.5 - x
            powers = np.cumprod(np.concatenate([np.ones((1, y.size)), np.repeat(y[None, :], _TAYLOR_J - 1, 0)]), axis=0)
            inv = (c / r)[None, :] ** a_vals[:, None]
            for sg, ph in ((1, phase), (-1, np.conj(phase))):
                moments = powers @ ph
                S[sg] = inv @ ph + taylor[:kc] @ moments
        for sg in (1, -1):
            fac = (sg ** delta) * (-sg * 2j * np.pi * m) ** ks[:kc] * float(c) ** (-1.0 - 2 * ks[:kc])
            W[i, :kc] += fac * S[sg]
    return cs, W


def _rows_upto(delta: int, m: int, c_max: int, floor: int, block: int = 256):
    """W_k(c) for c = 1..c_max, assembled from cached blocks."""
    parts = []
    lo = 1
    depth = 0
    while lo <= c_max:
        hi = min(c_max + 1, (lo // block + 1) * block if lo > 1 else 2)
        cs, W = _a_breve_rows(delta, m, lo, hi, floor)
        parts.append((cs, W))
        depth = max(depth, W.shape[1])
        lo = hi
    cs = np.concatenate([p[0] for p in parts])
    W = np.zeros((cs.size, depth), dtype=complex)
    row = 0
    for c_part, w_part in parts:
        W[row:row + c_part.size, :w_part.shape[1]] = w_part
        row += c_part.size
    return cs, W


def _check_imaginary(s: np.ndarray):
    if np.any(np.abs(s.real) > 1e-12):
        raise DomainError("A_breve is defined on Re s = 0")


def _a_breve_partial(delta: int, s: np.ndarray, m: int, c_max: int, floor: int, chunk: int = 256):
    cs, W = _rows_upto(delta, m, c_max, floor)
    logc = np.log(cs.astype(float))
    coef = theta_coefficients(s, W.shape[1])
    out = np.empty(s.size, dtype=complex)
    for i in range(0, s.size, chunk):
        ss = s[i:i + chunk]
        E = np.exp(np.outer(ss, logc))
        out[i:i + chunk] = np.sum(coef[i:i + chunk] * (E @ W), axis=1)
    return out * np.exp(-0.5 * s * math.log(m))


def a_breve(delta: int, s, m: int = 1, budget: SeriesBudget = SeriesBudget(), with_tail: bool = False):
    """The double series A_breve_delta(m; s) on Re s = 0.

    Moduli c <= budget.c_max are summed; the depth in the Kummer expansion
    is at least budget.k_max and grows at small c until the first omitted
    term is negligible.  With with_tail=True returns (value, tail) where
    the tail is extrapolated from the partial sums at c_max/2 and c_max,
    assuming the c^(-1/2) decay of the remainder.
    """
    if delta not in (0, 1):
        raise DomainError("delta must be 0 or 1")
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    _check_imaginary(s_arr)
    val = _a_breve_partial(delta, s_arr, m, budget.c_max, budget.k_max)
    if not with_tail:
        return val if np.ndim(s) else complex(val[0])
    half = _a_breve_partial(delta, s_arr, m, max(1, budget.c_max // 2), budget.k_max)
    tail = np.array([tail_estimate(h, v, 0.5) for h, v in zip(half, val)])
    if np.ndim(s):
        return val, tail
    return complex(val[0]), float(tail[0])


def a_breve_brute(delta: int, s: complex, m: int = 1, c_max: int = 200, n_max: int = 200):
    """Direct double sum over c <= c_max, n <= n_max with the Kummer function evaluated term by term.

    Returns (value, bound) where bound majorises the omitted n > n_max part
    for the included moduli, from |Theta_s(z)| <= |z| e^{|z|} / (sqrt 2 (|s| + 1)).
    """
    s = complex(s)
    total = 0j
    bound = 0.0
    n = np.arange(1, n_max + 1)
    for c in range(1, c_max + 1):
        nn = n[np.gcd(n, c) == 1]
        nbar = np.array([pow(int(k), -1, c) if c > 1 else 0 for k in nn])
        for sg in (1, -1):
            z = -sg * 2j * np.pi * m / (c * nn)
            th = np.asarray(theta_breve(s, z))
            terms = np.exp(sg * 2j * np.pi * m * nbar / c) / np.sqrt(c * nn) * th
            total += (sg ** delta) * (c / math.sqrt(m)) ** s * terms.sum()
        zmax = 2 * math.pi * m / (c * n_max)
        # sum_{n > N} (cn)^{-1/2} |z| e^{|z|}/(sqrt2 (|s|+1)) <= 2 c^{-3/2} 2 pi m e^{zmax} 2/sqrt(N) / (sqrt2 (|s|+1))
        bound += 2 * c ** -1.5 * 2 * math.pi * m * math.exp(zmax) * 2 / math.sqrt(n_max) / (math.sqrt(2) * (abs(s) + 1))
    return total, bound


def a_breve_oracle(delta: int, s: complex, m: int = 1, c_max: int = 4, n_direct: int = 20000,
                   dps: int = 20) -> complex:
    """Partial sum over c <= c_max with every n-series summed to infinity.

    Independent of the Hurwitz reorganisation: terms n <= n_direct are
    summed one by one, and each residue class beyond is closed with the
    Euler-Maclaurin formula, its integral computed by mpmath.quad with the
    Kummer function from mpmath.hyp1f1.
    """
    s = complex(s)
    total = 0j
    with mp.workdps(dps):
        s_mp = mp.mpc(s)
        for c in range(1, c_max + 1):
            n = np.arange(1, n_direct + 1)
            n = n[np.gcd(n, c) == 1]
            for sg in (1, -1):
                z0 = -sg * 2j * math.pi * m / c

                def f(x, z0=z0):
                    x = mp.mpf(x)
                    return (mp.hyp1f1(0.5, 1 - s_mp, z0 / x) - 1) / mp.sqrt(c * x)

                nbar = np.array([pow(int(k), -1, c) if c > 1 else 0 for k in n])
                direct = np.exp(sg * 2j * np.pi * m * nbar / c) / np.sqrt(c * n) * np.asarray(theta_breve(s, z0 / n))
                part = complex(direct.sum())
                for r in range(1, c + 1):
                    if math.gcd(r, c) != 1:
                        continue
                    rbar = pow(r, -1, c) if c > 1 else 0
                    x0 = r + c * ((n_direct - r) // c + 1)       # first n > n_direct in the class
                    h = mp.mpf(c) / 1000
                    integral = mp.quad(f, [x0, 4 * x0, mp.inf]) / c
                    deriv = (f(x0 + h) - f(x0 - h)) / (2 * h) * c
                    em = integral + f(x0) / 2 - deriv / 12
                    part += complex(mp.expjpi(2 * sg * m * rbar * mp.mpf(1) / c) * em)
                total += (sg ** delta) * complex((mp.mpf(c) / mp.sqrt(m)) ** s_mp) * part
    return total


def a_breve_decay_constant(delta: int, t_values: Sequence[float], m: int = 1,
                           budget: SeriesBudget = SeriesBudget()) -> float:
    """max over t of (|s| + 1) |A_breve(s)| at s = 2it."""
    s = 2j * np.asarray(t_values, dtype=float)
    vals = a_breve(delta, s, m, budget)
    return float(np.max((np.abs(s) + 1) * np.abs(vals)))


# ---------------------------------------------------------------------------
# term values

@dataclass
class TermValue:
    value: complex
    tail: float = 0.0
    c_used: int = 0
    nodes: int = 0
    flagged: bool = False

    def to_dict(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "tail": self.tail,
                "c_used": self.c_used, "nodes": self.nodes, "flagged": self.flagged}

    @classmethod
    def from_dict(cls, d: dict) -> "TermValue":
        return cls(complex(*d["value"]), float(d["tail"]), int(d["c_used"]), int(d["nodes"]), bool(d["flagged"]))


@dataclass
class TermBreakdown:
    delta: int
    m: int
    center: float
    width: float
    variant: str
    terms: dict = field(default_factory=dict)

    @property
    def total(self) -> complex:
        # canonical order so a JSON round trip reproduces the total bit for bit
        return sum((TERM_SIGNS[k] * self.terms[k].value for k in TERM_NAMES if k in self.terms), 0j)

    @property
    def tail(self) -> float:
        return float(sum(v.tail for v in self.terms.values()))

    @property
    def flagged(self) -> bool:
        return any(v.flagged for v in self.terms.values())

    def to_dict(self) -> dict:
        tot = self.total
        return {
            "format": FORMAT_TAG,
            "delta": self.delta, "m": self.m,
            "weight": {"center": float(self.center), "width": float(self.width), "variant": self.variant},
            "terms": {k: self.terms[k].to_dict() for k in TERM_NAMES if k in self.terms},
            "total": [tot.real, tot.imag],
            "tail": self.tail,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TermBreakdown":
        if d.get("format") != FORMAT_TAG:
            raise DomainError(f"unknown breakdown format {d.get('format')!r}")
        w = d["weight"]
        terms = {k: TermValue.from_dict(v) for k, v in d["terms"].items()}
        return cls(int(d["delta"]), int(d["m"]), float(w["center"]), float(w["width"]), w["variant"], terms)

    @classmethod
    def from_json(cls, text: str) -> "TermBreakdown":
        return cls.from_dict(json.loads(text))


def _term_D(delta, w, m, budget):
    t, wt = _rule(w, order=budget.quad_nodes)
    t = t.real
    f = w(t) * np.tanh(np.pi * t) * t * np.exp(-1j * t * math.log(m))
    return TermValue(complex(np.sum(wt * f)) / (math.pi ** 2 * math.sqrt(m)), nodes=t.size)


def _term_E(delta, w, m, budget):
    t, wt = _rule(w, order=budget.quad_nodes)
    t = t.real
    ok = np.abs(t) > 1e-12
    z1 = np.ones(t.size, dtype=complex)
    z1[ok] = riemann_zeta(1 + 2j * t[ok])
    zc = riemann_zeta(0.5 + 2j * t)
    f = np.where(ok, arith.divisor_tau(1j * t, m) * zc / np.abs(z1) ** 2, 0) * w(t)
    val = 2 / math.pi * riemann_zeta(0.5) * complex(np.sum(wt * f))
    return TermValue(val, nodes=t.size)


def _term_Eprime(delta, w, m, budget):
    val = 2 * arith.divisor_tau(0.25, m) * complex(w(-0.25j)) / riemann_zeta(1.5)
    return TermValue(complex(val))


def _term_A0(delta, w, m, budget):
    t, wt = _rule(w, order=budget.quad_nodes)
    t = t.real
    g = _gamma_plain(delta, 0.5 - 2j * t)
    f = np.exp(1j * t * math.log(m)) * w(t) * g * np.tanh(np.pi * t) * t
    val = 2 * (1j ** delta) / (math.pi ** 2 * math.sqrt(m)) * complex(np.sum(wt * f))
    return TermValue(val, nodes=t.size)


def _modulus_series(weights_nodes: np.ndarray, t: np.ndarray, coeff: Callable[[np.ndarray], np.ndarray],
                    c_max: int, scale: float, block: int = 64, tol: float = 1e-17,
                    bound: Callable[[np.ndarray], np.ndarray] | None = None):
    """sum_{c <= c_max} coeff(c) . int g(t) c^{2it} dt, with weights_nodes = quadrature weight * g(t).

    weights_nodes may have a trailing axis (one column per expansion
    order); coeff(c) then returns a matching matrix.  Moduli are taken in
    blocks until a whole block of bound(c) * |integral| lies below
    tol * scale.  Returns (value, tail, c_used, flagged).
    """
    two_it = 2j * t
    total = 0j
    c_lo = 1
    tail = 0.0
    flagged = False
    col = weights_nodes if weights_nodes.ndim == 2 else weights_nodes[:, None]
    while c_lo <= c_max:
        cs = np.arange(c_lo, min(c_max, c_lo + block - 1) + 1)
        E = np.exp(np.outer(np.log(cs.astype(float)), two_it))
        J = E @ col
        if weights_nodes.ndim == 1:
            J = J[:, 0]
        coef = coeff(cs)
        contrib = np.sum(coef * J, axis=-1) if J.ndim == 2 else coef * J
        total += complex(np.sum(contrib))
        mags = np.abs(J).max(axis=-1) if J.ndim == 2 else np.abs(J)
        b = bound(cs) if bound is not None else np.abs(contrib)
        block_size = float(np.sum(b * mags)) if bound is not None else float(np.sum(np.abs(contrib)))
        c_lo = cs[-1] + 1
        if block_size < tol * scale:
            tail = block_size
            return total, tail, int(cs[-1]), flagged
        tail = block_size
    # budget exhausted: remaining moduli bounded by the size of the last block per block
    flagged = tail > 1e-9 * scale
    return total, tail, c_max, flagged


def _term_K(name, delta, w, m, budget, offset: float = 1.0):
    t, wt = _rule(w, offset=offset, order=budget.quad_nodes)
    if name == "K1":
        g = w(-t) * gamma_one(2j * t) * t
        # -4 i^delta / pi^2: agrees with 4 / (pi^2 i^delta) only for delta = 1
        pre = -4 * 1j ** delta / math.pi ** 2
    else:
        g = w(t) * _gamma_natural(delta, 2j * t) * t
        pre = 2 * 1j ** delta / (math.pi * SQRT_PI * 1j)
    g = g * np.exp(-1j * t * math.log(m))          # (c / sqrt m)^{2it}
    scale = float(np.sum(np.abs(wt * g))) or 1.0

    def coeff(cs):
        return np.array([L_delta(delta, int(c), m, twist="gauss") for c in cs])

    def bound(cs):
        return 2.0 * cs.astype(float) ** 0.3

    total, tail, c_used, flagged = _modulus_series(wt * g, t, coeff, budget.c_max, scale, bound=bound)
    return TermValue(pre * total, abs(pre) * tail, c_used, t.size, flagged)


def _term_A_breve(name, delta, w, m, budget):
    t, wt = _rule(w, order=budget.quad_nodes)
    t = t.real
    s = 2j * t
    if name == "A1breve":
        g = w(-t) * gamma_one(s) * t
        pre = -2 * 1j ** delta / math.pi ** 2      # same delta = 0 sign as K1
    else:
        g = w(t) * _gamma_natural(delta, s) * t
        pre = 1j ** delta / (math.pi * SQRT_PI * 1j)
    g = g * np.exp(-0.5 * s * math.log(m))
    floor = budget.k_max
    depth = max(_depth(1, m, floor), floor)
    G = (wt * g)[:, None] * theta_coefficients(s, depth)
    scale = float(np.sum(np.abs(wt * g))) or 1.0
    rows_cache: dict = {}

    def coeff(cs):
        lo, hi = int(cs[0]), int(cs[-1]) + 1
        _, W = _a_breve_rows(delta, m, lo, hi, floor)
        out = np.zeros((cs.size, depth), dtype=complex)
        out[:, :W.shape[1]] = W[:, :depth]
        return out

    def bound(cs):
        _, W = _a_breve_rows(delta, m, int(cs[0]), int(cs[-1]) + 1, floor)
        return np.abs(W).sum(axis=1)

    total, tail, c_used, flagged = _modulus_series(G, t, coeff, budget.c_max, scale, bound=bound)
    return TermValue(pre * total, abs(pre) * tail, c_used, t.size, flagged)


def term_value(name: str, delta: int, w: TestWeight, m: int = 1,
               budget: SeriesBudget = SeriesBudget(), offset: float = 1.0) -> TermValue:
    """One named term with its tail estimate; offset applies to the K-term contours."""
    if name not in TERM_NAMES:
        raise DomainError(f"unknown term {name!r}")
    if delta not in (0, 1):
        raise DomainError("delta must be 0 or 1")
    if m < 1:
        raise DomainError("m must be positive")
    if name == "D":
        return _term_D(delta, w, m, budget)
    if name == "E":
        return _term_E(delta, w, m, budget)
    if name == "Eprime":
        return _term_Eprime(delta, w, m, budget)
    if name == "A0":
        return _term_A0(delta, w, m, budget)
    if name in ("A1breve", "Anatural"):
        return _term_A_breve(name, delta, w, m, budget)
    return _term_K(name, delta, w, m, budget, offset)


def term(name: str, delta: int, w: TestWeight, m: int = 1, budget: SeriesBudget = SeriesBudget()) -> complex:
    return term_value(name, delta, w, m, budget).value


def rhs_total(delta: int, w: TestWeight, m: int = 1, budget: SeriesBudget = SeriesBudget()) -> TermBreakdown:
    """All terms of the explicit formula for parity delta; E and E' only for delta = 0."""
    names = TERM_NAMES if delta == 0 else tuple(n for n in TERM_NAMES if n not in ("E", "Eprime"))
    terms = {n: term_value(n, delta, w, m, budget) for n in names}
    return TermBreakdown(delta, m, w.center, w.width, w.variant.value, terms)


# ---------------------------------------------------------------------------
# asymptotic predictions

def smooth_prediction(T: float, Pi: float, part: str = "total") -> float:
    """Pi T / (pi sqrt pi) + 2 Pi sqrt(T) / pi; part selects "main", "secondary" or "total"."""
    if not (T > 0 and Pi > 0):
        raise DomainError("T and Pi must be positive")
    main = Pi * T / (math.pi * SQRT_PI)
    secondary = 2 * Pi * math.sqrt(T) / math.pi
    return {"main": main, "secondary": secondary, "total": main + secondary}[part]


class SharpKind(str, Enum):
    FULL = "full"
    DELTA_RESTRICTED = "delta_restricted"
    WINDOW = "window"


def sharp_prediction(kind, T: float, H: float | None = None) -> float:
    kind = SharpKind(kind)
    if kind == SharpKind.FULL:
        return T ** 2 / math.pi ** 2 + 8 * T ** 1.5 / (3 * math.pi ** 1.5)
    if kind == SharpKind.DELTA_RESTRICTED:
        return T ** 2 / (2 * math.pi ** 2) + 4 * T ** 1.5 / (3 * math.pi ** 1.5)
    if H is None or H < 0 or H > T / 3 * (1 + 1e-12):
        raise DomainError("window prediction needs 0 <= H <= T/3")
    return 2 * H * T / math.pi ** 2 + 4 * ((T + H) ** 1.5 - (T - H) ** 1.5) / (3 * math.pi ** 1.5)


@dataclass
class AsymptoticRow:
    T: float
    Pi: float
    D: float
    E: float
    Knatural: float
    total: float
    value: float            # total + E for delta = 0, total for delta = 1
    prediction: float
    normalized_residual: float
    tail: float


@dataclass
class SecondaryFit:
    coefficient: float
    stderr: float
    exponent: float
    exponent_stderr: float
    candidates: dict


def _linear_fit(x: np.ndarray, y: np.ndarray, through_origin: bool):
    if through_origin:
        a = float(x @ y / (x @ x))
        res = y - a * x
        dof = max(1, x.size - 1)
        se = math.sqrt(float(res @ res) / dof / float(x @ x))
        return a, se, 0.0, 0.0
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    dof = max(1, x.size - 2)
    cov = (float(res @ res) / dof) * np.linalg.inv(A.T @ A) if x.size > 2 else np.zeros((2, 2))
    return float(coef[0]), math.sqrt(cov[0, 0]), float(coef[1]), math.sqrt(cov[1, 1])


def secondary_fit(rows: Sequence[AsymptoticRow]) -> SecondaryFit:
    """Fit value - Pi T/pi^{3/2} = a Pi sqrt(T), and its exponent in T."""
    T = np.array([r.T for r in rows])
    Pi = np.array([r.Pi for r in rows])
    excess = np.array([r.value for r in rows]) - Pi * T / math.pi ** 1.5
    a, se, _, _ = _linear_fit(Pi * np.sqrt(T), excess, through_origin=True)
    if len(rows) >= 2 and np.all(np.abs(excess) > 0):
        b, bse, _, _ = _linear_fit(np.log(T), np.log(np.abs(excess) / Pi), through_origin=False)
    else:
        b, bse = float("nan"), float("nan")
    cands = {"2/pi": 2 / math.pi, "2*zeta(1/2)/pi": 2 * riemann_zeta(0.5).real / math.pi, "0": 0.0}
    return SecondaryFit(a, se, b, bse, cands)


def pi_rule(rule: str) -> Callable[[float], float]:
    """Parse a width rule: "sqrt" (Pi = sqrt T), "pow:a" (Pi = T^a) or "const:x"."""
    rule = rule.strip()
    if rule == "sqrt":
        return lambda T: math.sqrt(T)
    kind, _, arg = rule.partition(":")
    try:
        val = float(arg)
    except ValueError:
        raise DomainError(f"bad width rule {rule!r}") from None
    if kind == "pow":
        return lambda T: T ** val
    if kind == "const":
        return lambda T: val
    raise DomainError(f"bad width rule {rule!r}")


def asymptotic_table(delta: int, T_list: Sequence[float], Pi_rule, budget: SeriesBudget = SeriesBudget(),
                     variant: WeightVariant = WeightVariant.PLAIN) -> tuple[list[AsymptoticRow], SecondaryFit]:
    """rhs_total along a family of weights, with the secondary-term fit.

    The plain Gaussian is the default here: its values at t = +-i/2 are of
    size exp(-T^2/Pi^2), far below double precision for the T in use, and
    it keeps D free of the O(1/T^2) distortion of the modified factor.
    """
    rule = pi_rule(Pi_rule) if isinstance(Pi_rule, str) else Pi_rule
    rows = []
    for T in T_list:
        Pi = float(rule(T))
        w = TestWeight(float(T), Pi, variant)
        bd = rhs_total(delta, w, 1, budget)
        E = bd.terms["E"].value.real if delta == 0 else 0.0
        total = bd.total.real
        value = total + E if delta == 0 else total
        pred = smooth_prediction(T, Pi)
        rows.append(AsymptoticRow(float(T), Pi, bd.terms["D"].value.real, E, bd.terms["Knatural"].value.real,
                                  total, value, pred, (value - pred) * math.sqrt(T) / Pi, bd.tail))
    return rows, secondary_fit(rows)
