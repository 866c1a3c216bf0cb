"""Complex gamma, Kummer confluent hypergeometric functions, and gamma factors.

Everything is vectorised over numpy arrays.  Gamma quotients are formed in
log space so that arguments with imaginary parts in the thousands neither
overflow nor underflow.
"""
from __future__ import annotations

import math
from enum import Enum

import mpmath as mp
import numpy as np

from .numkernel import DomainError, PoleError

LOG_2PI = math.log(2 * math.pi)
_HALF_LOG_2PI = 0.5 * LOG_2PI

# Bernoulli numbers B_2 .. B_24 for the Stirling series
_BERN = [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510,
         43867 / 798, -174611 / 330, 854513 / 138, -236364091 / 2730]
_STIRLING = [b / ((2 * j + 2) * (2 * j + 1)) for j, b in enumerate(_BERN)]
_SHIFT_TO = 16.0


def _as_complex(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _is_nonpositive_integer(z: np.ndarray, tol: float = 0.0) -> np.ndarray:
    r = np.round(z.real)
    return (r <= 0) & (np.abs(z.real - r) <= tol) & (np.abs(z.imag) <= tol)


def log_gamma(z):
    """Principal log-gamma (continuous off the negative real axis, real for z > 0).

    Upward recurrence until Re z >= 16, then the Stirling series with twelve
    Bernoulli terms.  Accurate to ~1e-14 absolute on the working domain.
    """
    z = _as_complex(z)
    if np.any(_is_nonpositive_integer(z)):
        raise PoleError("log_gamma: argument at a non-positive integer")
    shift = np.maximum(0, np.ceil(_SHIFT_TO - z.real)).astype(int)
    acc = np.zeros_like(z)
    w = z.copy()
    for k in range(int(shift.max()) if shift.size else 0):
        m = k < shift
        acc[m] += np.log(w[m])
        w[m] += 1
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(z)
    for c in reversed(_STIRLING):
        series = series * inv2 + c
    out = (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series * inv - acc
    return out if out.ndim else complex(out)


def gamma(z):
    return np.exp(log_gamma(z))


def rgamma(z):
    """1/Gamma(z), exactly zero at the poles of Gamma."""
    z = _as_complex(z)
    pole = _is_nonpositive_integer(z)
    out = np.zeros_like(z)
    if np.any(~pole):
        out[~pole] = np.exp(-log_gamma(z[~pole]))
    return out if out.ndim else complex(out)


def gamma_pair(alpha, beta):
    """Gamma(alpha) * Gamma(alpha - beta)."""
    a = _as_complex(alpha)
    b = _as_complex(beta)
    return np.exp(log_gamma(a) + log_gamma(a - b))


def power(z, s):
    """Principal power z^s = exp(s Log z).

    On the imaginary axis this is the convention (+-ix)^s = e(+-s/4) x^s for
    x > 0, since Log(+-ix) = log x +- i*pi/2 exactly.
    """
    z = _as_complex(z)
    s = _as_complex(s)
    return np.exp(s * np.log(z))


def e(x):
    """Additive character e(x) = exp(2 pi i x)."""
    return np.exp(2j * np.pi * np.asarray(x))


# ---------------------------------------------------------------------------
# log-stable trigonometry for large imaginary parts

def log_cos(z):
    """log cos z, stable for large |Im z| (branch irrelevant: used inside exp)."""
    z = _as_complex(z)
    sgn = np.where(z.imag >= 0, 1.0, -1.0)
    # cos z = e^{-i sgn z}/2 * (1 + e^{2 i sgn z})
    return -1j * sgn * z - math.log(2) + np.log1p(np.exp(2j * sgn * z))


def log_sin(z):
    z = _as_complex(z)
    sgn = np.where(z.imag >= 0, 1.0, -1.0)
    # sin z = sgn * i e^{-i sgn z}/2 * (1 - e^{2 i sgn z})
    return (np.log(1j * sgn) - 1j * sgn * z - math.log(2)
            + np.log(-np.expm1(2j * sgn * z) + 0j))


def tan_stable(z):
    z = _as_complex(z)
    sgn = np.where(z.imag >= 0, 1.0, -1.0)
    q = np.exp(2j * sgn * z)
    return -1j * sgn * (q - 1) / (q + 1)


# ---------------------------------------------------------------------------
# Kummer functions

def _check_gamma_param(g: np.ndarray, name: str = "gamma"):
    if np.any(_is_nonpositive_integer(g, 1e-12)):
        raise PoleError(f"{name} parameter at a non-positive integer")


def _kummer_mp(alpha, gam, z, start: int, dps: int) -> complex:
    with mp.workdps(dps):
        a, g, x = mp.mpc(alpha), mp.mpc(gam), mp.mpc(z)
        term = mp.mpc(1)
        total = mp.mpc(0) if start else mp.mpc(1)
        n = 0
        small = 0
        eps = mp.mpf(10) ** (-dps + 3)
        while small < 3:
            term *= (a + n) * x / ((g + n) * (n + 1))
            n += 1
            total += term
            if abs(term) <= eps * abs(total):
                small += 1
            else:
                small = 0
            if n > 20000:
                break
        return complex(total)


def _kummer_series(alpha, gam, z, start: int, tol: float = 1e-17, max_terms: int = 4000):
    a, g, x = np.broadcast_arrays(_as_complex(alpha), _as_complex(gam), _as_complex(z))
    a, g, x = a.ravel(), g.ravel(), x.ravel()
    _check_gamma_param(g)
    term = np.ones_like(x)
    total = np.zeros_like(x) if start else np.ones_like(x)
    peak = np.ones(x.shape)
    small = np.zeros(x.shape, dtype=int)
    n = 0
    active = np.ones(x.shape, dtype=bool)
    while np.any(active) and n < max_terms:
        term = np.where(active, term * (a + n) * x / ((g + n) * (n + 1)), 0)
        n += 1
        total = total + term
        at = np.abs(term)
        peak = np.maximum(peak, at)
        small = np.where(at <= tol * np.abs(total), small + 1, 0)
        active &= ~((small >= 3) | (term == 0))
    # escalate where cancellation ate more than three digits
    lost = peak > 1e3 * np.maximum(np.abs(total), 1e-300)
    for i in np.flatnonzero(lost | active):
        digits = 30 + int(max(0.0, math.log10(peak[i] + 1.0)))
        total[i] = _kummer_mp(a[i], g[i], x[i], start, digits)
    return total


def kummer_phi(alpha, gamma_, z):
    """Kummer's Phi(alpha, gamma; z) = sum (alpha)_n z^n / ((gamma)_n n!)."""
    shape = np.broadcast(np.asarray(alpha), np.asarray(gamma_), np.asarray(z)).shape
    out = _kummer_series(alpha, gamma_, z, start=0).reshape(shape)
    return out if out.ndim else complex(out)


def kummer_phi_breve(alpha, gamma_, z):
    """Phi - 1, summed from n = 1 so that small z keeps full relative accuracy."""
    shape = np.broadcast(np.asarray(alpha), np.asarray(gamma_), np.asarray(z)).shape
    out = _kummer_series(alpha, gamma_, z, start=1).reshape(shape)
    return out if out.ndim else complex(out)


def theta_breve(s, z):
    """Regularised Kummer function in the variable z with parameters (1/2, 1 - s)."""
    s = _as_complex(s)
    r = np.round(s.real)
    if np.any((r >= 1) & (np.abs(s - r) < 1e-12)):
        raise PoleError("theta_breve: s at a positive integer")
    return kummer_phi_breve(0.5, 1 - s, z)


class PsiKind(str, Enum):
    U = "U"
    PLUS = "plus"
    MINUS = "minus"
    ZERO = "zero"
    BREVE_PLUS = "breve_plus"
    BREVE_MINUS = "breve_minus"


def _ratio(num, den, label):
    num = _as_complex(num)
    den = _as_complex(den)
    if np.any(_is_nonpositive_integer(num, 1e-12)):
        raise PoleError(f"psi_variant: Gamma({label}) at a pole")
    return np.exp(log_gamma(num)) * rgamma(den)


def psi_variant(kind, alpha, gamma_, z):
    """Second-kind Kummer combinations.

    U: the standard Psi; plus/minus: both Phi's evaluated at -z / +z with the
    power z^(1-gamma) unchanged; zero: the two gamma-quotient prefactors with
    Phi replaced by 1; breve_*: plus/minus with Phi replaced by Phi - 1.
    """
    kind = PsiKind(kind)
    a, g, x = (_as_complex(v) for v in (alpha, gamma_, z))
    near = np.abs(g - np.round(g.real)) < 1e-3
    if np.any(near):
        # removable singularity in gamma: mean value over a small circle
        if g.ndim or a.ndim or x.ndim:
            raise DomainError("psi_variant: integer gamma supported for scalars only")
        ring = g + 0.1 * np.exp(2j * np.pi * (np.arange(32) + 0.5) / 32)
        return complex(np.mean([psi_variant(kind, a, gg, x) for gg in ring]))
    pre1 = _ratio(1 - g, 1 + a - g, "1-gamma")
    pre2 = _ratio(g - 1, a, "gamma-1")
    zp = power(x, 1 - g)
    if kind == PsiKind.ZERO:
        return pre1 + pre2 * zp
    if kind in (PsiKind.U, PsiKind.MINUS):
        arg, phi = x, kummer_phi
    elif kind == PsiKind.PLUS:
        arg, phi = -x, kummer_phi
    elif kind == PsiKind.BREVE_PLUS:
        arg, phi = -x, kummer_phi_breve
    else:
        arg, phi = x, kummer_phi_breve
    return pre1 * phi(a, g, arg) + pre2 * zp * phi(1 + a - g, 2 - g, arg)


# ---------------------------------------------------------------------------
# gamma factors

class GammaKind(str, Enum):
    PLAIN = "plain"
    NATURAL = "natural"


def log_gamma_factor_plain(delta: int, s):
    """log of (2pi)^{-s} Gamma(s) {cos, i sin}(pi s / 2)."""
    s = _as_complex(s)
    trig = log_cos(np.pi * s / 2) if delta == 0 else log_sin(np.pi * s / 2) + 0.5j * np.pi
    return -s * LOG_2PI + log_gamma(s) + trig


def gamma_factor(delta: int, kind, s, pole_tol: float = 1e-8):
    """gamma_delta(s) (plain) or its natural companion.

    plain:   (2pi)^{-s} Gamma(s) cos(pi s/2)   [delta = 0]
             (2pi)^{-s} Gamma(s) i sin(pi s/2) [delta = 1]
    natural: Gamma(1/2 - s)/Gamma(1 - s) * (tan(pi s/2) + 1 or - 1)
    """
    if delta not in (0, 1):
        raise DomainError("delta must be 0 or 1")
    kind = GammaKind(kind)
    s = _as_complex(s)
    if kind == GammaKind.PLAIN:
        if np.any(_is_nonpositive_integer(s, pole_tol)):
            raise PoleError("gamma_factor: Gamma(s) pole")
        out = np.exp(log_gamma_factor_plain(delta, s))
    else:
        half = 0.5 - s
        if np.any(_is_nonpositive_integer(half, pole_tol)):
            raise PoleError("gamma_factor: Gamma(1/2 - s) pole")
        odd = np.round((s.real - 1) / 2) * 2 + 1
        if np.any((np.abs(s.real - odd) < pole_tol) & (np.abs(s.imag) < pole_tol)):
            raise PoleError("gamma_factor: tan(pi s/2) pole")
        quot = np.zeros_like(s)
        ok = ~_is_nonpositive_integer(1 - s)
        quot[ok] = np.exp(log_gamma(half[ok]) - log_gamma(1 - s[ok]))
        out = quot * (tan_stable(np.pi * s / 2) + (1 if delta == 0 else -1))
    return out if out.ndim else complex(out)
