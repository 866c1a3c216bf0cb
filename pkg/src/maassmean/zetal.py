"""Riemann, Hurwitz and Lerch zeta functions, Dirichlet L-values, and the
Kloosterman-zeta sums K_+-(s; c) with their character averages L_delta(c).
"""
from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache

import numpy as np

from . import arith
from .numkernel import DomainError, PoleError
from .specfun import _BERN, e, gamma, log_gamma

TWO_PI = 2 * math.pi
_B2K_OVER_FACT = [b / math.factorial(2 * k + 2) for k, b in enumerate(_BERN)]


def _em_terms(s: np.ndarray) -> int:
    return int(20 + math.ceil(2.0 * float(np.max(np.abs(s))) / math.pi)) if s.size else 20


def _euler_maclaurin(s: np.ndarray, w: np.ndarray, n_terms: int, chunk: int = 2_000_000) -> np.ndarray:
    """sum_{n>=0} (n + w)^{-s} by Euler-Maclaurin with n_terms direct terms."""
    s, w = np.broadcast_arrays(s, w)
    flat_s, flat_w = s.ravel(), w.ravel()
    out = np.empty(flat_s.shape, dtype=complex)
    step = max(1, chunk // max(n_terms, 1))
    n = np.arange(n_terms, dtype=float)
    for i in range(0, flat_s.size, step):
        ss = flat_s[i:i + step, None]
        ww = flat_w[i:i + step, None]
        direct = np.exp(-ss * np.log(n[None, :] + ww)).sum(axis=1)
        ss = ss[:, 0]
        W = ww[:, 0] + n_terms
        logW = np.log(W)
        WmS = np.exp(-ss * logW)
        tail = W * WmS / (ss - 1) + 0.5 * WmS
        # Bernoulli corrections: B_2k/(2k)! (s)_{2k-1} W^{-s-2k+1}
        poch = ss.copy()          # (s)_1
        wpow = WmS / W            # W^{-s-1}
        for k, coef in enumerate(_B2K_OVER_FACT):
            tail = tail + coef * poch * wpow
            poch = poch * (ss + 2 * k + 1) * (ss + 2 * k + 2)
            wpow = wpow / (W * W)
        out[i:i + step] = direct + tail
    return out.reshape(s.shape)


def hurwitz_zeta(s, w, n_terms: int | None = None):
    """zeta(s, w) = sum_{n>=0} (n + w)^{-s} for w > 0, continued to s != 1."""
    s = np.asarray(s, dtype=complex)
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise DomainError("hurwitz_zeta: w must be positive")
    if np.any(np.abs(s - 1) < 1e-15):
        raise PoleError("hurwitz_zeta: pole at s = 1")
    N = n_terms if n_terms is not None else _em_terms(s)
    out = _euler_maclaurin(s, w, N)
    return out if out.ndim else complex(out)


def riemann_zeta(s, n_terms: int | None = None):
    """zeta(s) via Euler-Maclaurin; accurate on the critical line to |Im s| ~ 5000."""
    return hurwitz_zeta(s, 1.0, n_terms)


def _lerch_tail_coefficients(q: complex, k_max: int) -> np.ndarray:
    """Taylor coefficients a_k of 1/(1 - q e^u) at u = 0."""
    a = np.zeros(k_max + 1, dtype=complex)
    a[0] = 1 / (1 - q)
    inv_fact = np.array([1 / math.factorial(j) for j in range(k_max + 1)])
    for k in range(1, k_max + 1):
        a[k] = q / (1 - q) * np.dot(a[:k], inv_fact[k:0:-1])
    return a


def lerch_zeta(s, w: float, x: float):
    """zeta(s, w, x) = sum_{n>=0} e(x n) (n + w)^{-s}, continued in s.

    Integer x reduces to Hurwitz.  Otherwise N terms are summed directly and
    the remainder sum_n q^n f(n), q = e(x), is expanded as
    sum_k a_k f^(k)(0) with sum_k a_k u^k = 1/(1 - q e^u), which is analytic
    in s and therefore supplies the continuation.
    """
    s = complex(s)
    if not 0 < w <= 1 + 1e-15:
        raise DomainError("lerch_zeta: w must lie in (0, 1]")
    xf = x - math.floor(x)
    if xf == 0.0:
        return hurwitz_zeta(s, w)
    q = complex(np.exp(1j * TWO_PI * xf))
    radius = TWO_PI * min(xf, 1 - xf)
    k_max = 60
    # keep |s + k| / (W * radius) below 2/3 for every k <= k_max
    N = int(max(20, math.ceil(1.5 * (k_max + abs(s)) / radius)))
    n = np.arange(N)
    direct = complex(np.sum(q ** n * np.exp(-s * np.log(n + w))))
    W = N + w
    a = _lerch_tail_coefficients(q, k_max)
    tail = 0j
    term_f = complex(np.exp(-s * math.log(W)))        # f(0) = W^{-s}
    quiet = 0
    for k in range(k_max + 1):
        t = a[k] * term_f
        tail += t
        # some a_k vanish identically (q = -1), so wait for three quiet terms
        quiet = quiet + 1 if abs(t) < 1e-18 * max(1.0, abs(tail)) else 0
        if quiet >= 3:
            break
        term_f *= -(s + k) / W                        # f^(k)(0) = (-1)^k (s)_k W^{-s-k}
    return direct + q ** N * tail


def lerch_fe_residual(s, w: float, x: float) -> float:
    """|lhs - rhs| / max(1, |lhs|) for the Lerch transformation formula, 0 < x < 1.

    zeta(1 - s, w, x) = Gamma(s) (2 pi)^{-s} [e(s/4 - xw) zeta(s, x, -w) + e(-s/4 + w(1 - x)) zeta(s, 1 - x, w)]
    """
    if not 0 < x < 1:
        raise DomainError("lerch_fe_residual: need 0 < x < 1")
    s = complex(s)
    lhs = lerch_zeta(1 - s, w, x)
    pre = np.exp(log_gamma(s) - s * math.log(TWO_PI))
    rhs = pre * (e(s / 4 - x * w) * lerch_zeta(s, x, -w) + e(-s / 4 + w * (1 - x)) * lerch_zeta(s, 1 - x, w))
    return float(abs(lhs - rhs) / max(1.0, abs(lhs)))


def riemann_fe_residual(s) -> float:
    """|zeta(1 - s) - 2 (2 pi)^{-s} Gamma(s) cos(pi s/2) zeta(s)|, relative to max(1, |zeta(1 - s)|)."""
    s = complex(s)
    lhs = riemann_zeta(1 - s)
    rhs = 2 * np.exp(log_gamma(s) - s * math.log(TWO_PI)) * np.cos(np.pi * s / 2) * riemann_zeta(s)
    return float(abs(lhs - rhs) / max(1.0, abs(lhs)))


def hurwitz_from_L(s, a: int, c: int) -> complex:
    """zeta(s, a/c) rebuilt from L-values: c^s / phi(c) sum_chi conj(chi)(a) L(s, chi)."""
    if math.gcd(a, c) != 1:
        raise DomainError("hurwitz_from_L: a must be coprime to c")
    tab = arith.characters(c)
    L = all_L_values(complex(s), c)
    return complex(c ** complex(s) / arith.euler_phi(c) * np.sum(np.conj(tab.characters[:, a % c]) * L))


def dirichlet_L(s, chi: np.ndarray):
    """L(s, chi) = c^{-s} sum_a chi(a) zeta(s, a/c), chi as a value array mod c."""
    chi = np.asarray(chi, dtype=complex)
    c = len(chi)
    s_arr = np.asarray(s, dtype=complex)
    if c == 1:
        return riemann_zeta(s)
    a = np.arange(1, c + 1)
    vals = chi[a % c]
    nz = np.abs(vals) > 0
    principal = np.allclose(vals[nz], 1.0)
    if principal and np.any(np.abs(s_arr - 1) < 1e-15):
        raise PoleError("dirichlet_L: principal character at s = 1")
    hz = hurwitz_zeta(s_arr[..., None], a[nz] / c)
    out = np.exp(-s_arr * math.log(c)) * (hz @ vals[nz])
    return out if np.ndim(out) else complex(out)


def all_L_values(s: complex, c: int) -> np.ndarray:
    """L(s, chi) for every character mod c (rows of arith.characters(c))."""
    tab = arith.characters(c)
    if c == 1:
        return np.array([riemann_zeta(s)])
    a = np.arange(1, c)
    hz = hurwitz_zeta(complex(s), a / c)
    return complex(np.exp(-s * math.log(c))) * (tab.characters[:, a] @ hz)


# ---------------------------------------------------------------------------
# epsilon factors

def epsilon_factor(sign: int, parity: int, s=None):
    """epsilon_+-(s, chi): 2cos(pi s/2) (even) or +-2i sin(pi s/2) (odd).

    With s=None the centred variant is returned: 1 (even) or +-i (odd).
    """
    sg = 1 if sign in (1, "+") else -1
    if s is None:
        return 1.0 + 0j if parity == 0 else sg * 1j
    s = np.asarray(s, dtype=complex)
    out = 2 * np.cos(np.pi * s / 2) if parity == 0 else sg * 2j * np.sin(np.pi * s / 2)
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------------------
# K_+-(s; c)

class KRepresentation(str, Enum):
    SERIES = "series"
    HURWITZ_FE = "hurwitz_fe"
    CHARACTER = "character"
    DUAL = "dual"


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise DomainError(f"bad sign {sign!r}")


def _kloosterman_row(sign: int, c: int, m: int = 1) -> np.ndarray:
    """S(m, +-r; c) for r = 1..c."""
    return np.array([arith.kloosterman(m, sign * r, c) for r in range(1, c + 1)])


def periodic_dirichlet_blocks(coeffs: np.ndarray, s: complex, periods: int = 400, k_max: int = 40) -> complex:
    """sum_{n>=1} a(n) n^{-s} for c-periodic a with zero mean, Re s > 1.

    Complete periods are summed directly; the remaining blocks are expanded
    binomially in r/(jc), which leaves integer-shift zeta tails.
    """
    c = len(coeffs)
    if abs(coeffs.sum()) > 1e-9 * max(1.0, np.abs(coeffs).sum()):
        raise DomainError("periodic_dirichlet_blocks needs zero-mean coefficients")
    n = np.arange(1, c * periods + 1)
    direct = complex(np.sum(np.tile(coeffs, periods) * np.exp(-s * np.log(n))))
    r = np.arange(1, c + 1, dtype=float)
    tail = 0j
    binom = 1.0 + 0j
    for k in range(1, k_max + 1):
        binom *= (-s - k + 1) / k
        moment = complex(np.dot(coeffs, r ** k))
        # sum_{j >= periods} (jc)^{-s-k}
        zt = c ** (-s - k) * hurwitz_zeta(s + k, float(periods))
        tail += binom * moment * zt
        # moments can vanish by symmetry, so stop on the size bound instead
        if abs(binom) * float(np.dot(np.abs(coeffs), r ** k)) * abs(zt) < 1e-18:
            break
    return direct + tail


def _k_hurwitz_fe(sign: int, s: complex, c: int, m: int = 1) -> complex:
    sp = 1 - s
    if c == 1:
        return complex(2 * gamma(sp) * (TWO_PI) ** (-sp) * np.cos(np.pi * sp / 2) * riemann_zeta(sp))
    a, ab = arith.inverse_table(c)
    ph = np.exp(sign * 1j * TWO_PI * ((m * ab) % c) / c)
    h1 = hurwitz_zeta(sp, a / c)
    h2 = hurwitz_zeta(sp, (c - a) / c)
    e4 = np.exp(1j * np.pi * sp / 2)
    pre = np.exp(log_gamma(sp) - sp * math.log(TWO_PI))
    return complex(pre * np.sum(ph * (e4 * h1 + h2 / e4)))


def _k_character(sign: int, s: complex, c: int, m: int = 1) -> complex:
    sp = 1 - s
    tab = arith.characters(c)
    L = all_L_values(sp, c)
    eps = np.where(tab.parity == 0, 2 * np.cos(np.pi * sp / 2), sign * 2j * np.sin(np.pi * sp / 2))
    twist = np.conj(tab.characters[:, m % c]) if c > 1 else np.ones(1)
    pre = np.exp(log_gamma(sp) + sp * math.log(c / TWO_PI))
    return complex(pre / arith.euler_phi(c) * np.sum(twist * tab.gauss * eps * L))


def _k_dual(sign: int, s: complex, c: int, m: int = 1) -> complex:
    sp = 1 - s
    if sp.real <= 1:
        raise DomainError("dual representation needs Re s < 0")
    if c == 1:
        z = riemann_zeta(sp)
        return complex(gamma(sp) * TWO_PI ** (-sp) * (np.exp(-1j * np.pi * sp / 2) + np.exp(1j * np.pi * sp / 2)) * z)
    a, ab = arith.inverse_table(c)
    hz = hurwitz_zeta(sp, a / c) * c ** (-sp)
    # n > 0 terms carry (in)^{-s'} = e(-s'/4) n^{-s'}; n < 0 terms e(+s'/4)
    e_minus = np.exp(-sign * 1j * TWO_PI * ((m * ab) % c) / c)
    pos = np.sum(e_minus * hz) * np.exp(-1j * np.pi * sp / 2)
    neg = np.sum(np.conj(e_minus) * hz) * np.exp(1j * np.pi * sp / 2)
    pre = np.exp(log_gamma(sp) + sp * math.log(c / TWO_PI))
    return complex(pre * (pos + neg))


def _k_series(sign: int, s: complex, c: int, m: int = 1) -> complex:
    if s.real <= 1:
        raise DomainError("series representation needs Re s > 1")
    if c == 1:
        return riemann_zeta(s)
    return periodic_dirichlet_blocks(_kloosterman_row(sign, c, m), s)


def kloosterman_zeta_lerch(sign, s, c: int, m: int = 1) -> complex:
    """K_+-(s; c) as sum over a of e((a +- m abar)/c) zeta(s, 1, a/c); any s for c > 1."""
    sign = _sign(sign)
    s = complex(s)
    if c == 1:
        return riemann_zeta(s)
    a, ab = arith.inverse_table(c)
    total = 0j
    for ai, bi in zip(a, ab):
        total += np.exp(1j * TWO_PI * ((ai + sign * m * bi) % c) / c) * (
            lerch_zeta(s, 1.0, ai / c))
    return complex(total)


_K_ROUTES = {
    KRepresentation.SERIES: _k_series,
    KRepresentation.HURWITZ_FE: _k_hurwitz_fe,
    KRepresentation.CHARACTER: _k_character,
    KRepresentation.DUAL: _k_dual,
}


def kloosterman_zeta(repr, sign, s, c: int, m: int = 1) -> complex:
    """K_+-(s; c) = sum_n S(m, +-n; c) n^{-s}, through one of its representations.

    series:     periodic Dirichlet series, Re s > 1
    hurwitz_fe: Hurwitz zeta values at 1 - s (functional-equation form)
    character:  Gauss sums times L(1 - s, chi) with parity epsilon factors
    dual:       absolutely convergent reflected n-sum, Re s < 0
    """
    rep = KRepresentation(repr)
    sg = _sign(sign)
    s = complex(s)
    if c < 1:
        raise DomainError("c must be positive")
    if c == 1 and abs(s - 1) < 1e-15:
        raise PoleError("K(s; 1) = zeta(s) has a pole at s = 1")
    if c > 1 and math.gcd(m, c) > 1 and rep in (KRepresentation.CHARACTER,):
        raise DomainError("character route needs gcd(m, c) = 1")
    return _K_ROUTES[rep](sg, s, c, m)


# ---------------------------------------------------------------------------
# L_delta(c)

def _L_delta_character(delta: int, c: int, m: int, twist: str) -> complex:
    tab = arith.characters(c)
    idx = tab.of_parity(delta)
    if idx.size == 0:
        return 0j
    L = all_L_values(0.5, c)[idx]
    if c == 1:
        coef = tab.gauss[idx]
    elif twist == "gauss":
        # sum_b chi(b) e(mb/c); equals conj(chi)(m) tau(chi) when gcd(m, c) = 1
        coef = tab.characters[idx] @ np.exp(1j * TWO_PI * m * np.arange(c) / c)
    else:
        coef = np.conj(tab.characters[idx, m % c]) * tab.gauss[idx]
    return complex(np.sum(coef * L) / (math.sqrt(c) * arith.euler_phi(c)))


def _L_delta_kloosterman(delta: int, c: int, m: int) -> complex:
    kp = _k_hurwitz_fe(1, 0.5 + 0j, c, m)
    km = _k_hurwitz_fe(-1, 0.5 + 0j, c, m)
    if delta == 0:
        return (kp + km) / (2 * c)
    return (kp - km) / (2j * c)


@lru_cache(maxsize=100_000)
def L_delta(delta: int, c: int, m: int = 1, route: str = "kloosterman", twist: str = "character") -> complex:
    """(1/(sqrt(c) phi(c))) sum over chi mod c of parity delta of conj(chi)(m) tau(chi) L(1/2, chi).

    route="character" sums over the character table; route="kloosterman"
    (default, O(c) Hurwitz values) uses parity combinations of K_+-(1/2; c).

    twist="character" applies conj(chi)(m), so moduli sharing a factor with m
    give 0.  twist="gauss" replaces conj(chi)(m) tau(chi) by the twisted
    Gauss sum sum_b chi(b) e(mb/c), which keeps imprimitive characters when
    gcd(m, c) > 1; this is what the character expansion of sum_n S(m, n; c) n^{-s}
    produces.  The two agree whenever gcd(m, c) = 1.
    """
    if delta not in (0, 1):
        raise DomainError("delta must be 0 or 1")
    if c < 1 or m < 1:
        raise DomainError("c and m must be positive")
    if twist not in ("character", "gauss"):
        raise DomainError(f"unknown twist {twist!r}")
    if route not in ("character", "kloosterman"):
        raise DomainError(f"unknown route {route!r}")
    if math.gcd(m, c) > 1 and twist == "character":
        return 0j
    if route == "character":
        return _L_delta_character(delta, c, m, twist)
    return _L_delta_kloosterman(delta, c, m)


def K_sw_n(sign, s, w, n: int) -> complex:
    """Gamma(w) / (n^{1-s} phi(n)) * sum_chi tau(chi) eps_+-(-w, chi) L(s, chi)."""
    sg = _sign(sign)
    s, w = complex(s), complex(w)
    if abs(w - round(w.real)) < 1e-12 and round(w.real) <= 0:
        raise PoleError("K_sw_n: Gamma(w) pole")
    tab = arith.characters(n)
    L = all_L_values(s, n)
    eps = np.where(tab.parity == 0, 2 * np.cos(-np.pi * w / 2), sg * 2j * np.sin(-np.pi * w / 2))
    pre = gamma(w) / (n ** (1 - s) * arith.euler_phi(n))
    return complex(pre * np.sum(tab.gauss * eps * L))
