"""Bessel functions of complex order, the B_nu^+- kernels, their mollified
regularization, and Fourier transforms of both (closed forms and a direct
quadrature oracle).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import mpmath as mp
import numpy as np

from .numkernel import DomainError, PoleError, panel_nodes
from .specfun import PsiKind, log_gamma, power, psi_variant, rgamma

# double-precision series limits: J loses ~0.43 x digits, K ~0.87 x
_SERIES_X_LIMIT = {"J": 10.0, "I": 10.0, "K": 2.0}


def _near_integer(nu, tol=1e-6) -> bool:
    nu = complex(nu)
    return abs(nu.imag) < tol and abs(nu.real - round(nu.real)) < tol


# ---------------------------------------------------------------------------
# J, I, K

def _series_numpy(nu: complex, x: np.ndarray, sign: float) -> np.ndarray:
    """sum_n sign^n (x/2)^{nu+2n} / (n! Gamma(nu+n+1)), Kahan-compensated."""
    half = x / 2
    q = sign * half * half
    term = power(half, nu) * rgamma(nu + 1) + 0 * x
    total = term.copy()
    comp = np.zeros_like(total)
    n_max = int(40 + 2 * float(np.max(x, initial=0.0)))
    for n in range(n_max):
        term = term * q / ((n + 1) * (nu + n + 1))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _series_mp(nu: complex, x: float, sign: int, dps: int) -> mp.mpc:
    with mp.workdps(dps):
        v = mp.mpc(nu)
        half = mp.mpf(x) / 2
        q = sign * half * half
        term = mp.power(half, v) * mp.rgamma(v + 1)
        total = term
        eps = mp.mpf(10) ** (-dps)
        n = 0
        while True:
            term = term * q / ((n + 1) * (v + n + 1))
            total += term
            n += 1
            if n > 2 * x + 20 and abs(term) < eps * abs(total):
                return total


def _bessel_scalar_mp(kind: str, nu: complex, x: float) -> complex:
    if kind == "J":
        dps = 20 + int(0.45 * x)
        return complex(_series_mp(nu, x, -1, dps))
    dps = 20 + int(0.9 * x)
    if kind == "I":
        return complex(_series_mp(nu, x, 1, dps))
    with mp.workdps(dps):
        diff = _series_mp(-nu, x, 1, dps) - _series_mp(nu, x, 1, dps)
        return complex(mp.pi * diff / (2 * mp.sin(mp.pi * mp.mpc(nu))))


def bessel(kind: str, nu, x):
    """J_nu(x), I_nu(x) or K_nu(x) for x > 0 from the ascending series.

    Double precision for J, I with x <= 10 (K: x <= 2); beyond that the
    series is summed in extended precision to absorb the cancellation.
    K uses K = pi (I_{-nu} - I_nu) / (2 sin pi nu) and is refused at
    integer order.
    """
    if kind not in ("J", "I", "K"):
        raise DomainError(f"unknown Bessel kind {kind!r}")
    nu = complex(nu)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("bessel: x must be positive")
    if kind == "K" and _near_integer(nu):
        raise PoleError("bessel K: integer order needs the limit formula")
    flat = xa.ravel()
    out = np.empty(flat.shape, dtype=complex)
    small = flat <= _SERIES_X_LIMIT[kind]
    if np.any(small):
        xs = flat[small]
        if kind == "J":
            out[small] = _series_numpy(nu, xs, -1.0)
        elif kind == "I":
            out[small] = _series_numpy(nu, xs, 1.0)
        else:
            out[small] = np.pi * (_series_numpy(-nu, xs, 1.0) - _series_numpy(nu, xs, 1.0)) / (
                2 * np.sin(np.pi * nu))
    for i in np.flatnonzero(~small):
        out[i] = _bessel_scalar_mp(kind, nu, float(flat[i]))
    out = out.reshape(xa.shape)
    return out if out.ndim else complex(out)


def bessel_orders(kind: str, nus, x: float) -> np.ndarray:
    """J or I at one argument x > 0 for a whole vector of orders."""
    if kind not in ("J", "I"):
        raise DomainError("bessel_orders supports J and I")
    nus = np.asarray(nus, dtype=complex)
    x = float(x)
    if x <= 0:
        raise DomainError("bessel_orders: x must be positive")
    sign = -1.0 if kind == "J" else 1.0
    if x <= _SERIES_X_LIMIT[kind]:
        half = x / 2
        q = sign * half * half
        term = np.exp(nus * math.log(half)) * rgamma(nus + 1)
        total = term.copy()
        for n in range(int(40 + 2 * x)):
            term = term * q / ((n + 1) * (nus + n + 1))
            total = total + term
            if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
                break
        return total
    return np.array([_bessel_scalar_mp(kind, complex(v), x) for v in nus.ravel()]).reshape(nus.shape)


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise DomainError(f"bad sign {sign!r}")


def B_pm(sign, nu, x):
    """B^+ = pi (J_{-2nu} - J_{2nu}) / (2 sin pi nu);  B^- = 2 cos(pi nu) K_{2nu}."""
    sg = _sign(sign)
    nu = complex(nu)
    if abs(nu) < 1e-12:
        raise PoleError("B_pm: nu = 0")
    if sg > 0:
        return np.pi * (bessel("J", -2 * nu, x) - bessel("J", 2 * nu, x)) / (2 * np.sin(np.pi * nu))
    return 2 * np.cos(np.pi * nu) * bessel("K", 2 * nu, x)


def leading_power(nu, x):
    """(x/2)^nu / Gamma(nu + 1), the first term of the J and I series."""
    return power(np.asarray(x, dtype=float) / 2, nu) * rgamma(complex(nu) + 1)


def leading_kernel(nu, x):
    """pi (P_{-2nu}(x) - P_{2nu}(x)) / (2 sin pi nu), the part removed by regularization."""
    nu = complex(nu)
    if abs(nu) < 1e-12:
        raise PoleError("leading_kernel: nu = 0")
    return np.pi * (leading_power(-2 * nu, x) - leading_power(2 * nu, x)) / (2 * np.sin(np.pi * nu))


# ---------------------------------------------------------------------------
# mollifier

class StepProfile(str, Enum):
    EXP = "exp"          # glue exp(-1/u)
    EXP_SQUARED = "exp_squared"  # glue exp(-1/u^2)


def _glue(u: np.ndarray, profile: StepProfile) -> tuple[np.ndarray, np.ndarray]:
    """Glue function f(u) (zero for u <= 0) and its derivative."""
    pos = u > 0
    up = np.where(pos, u, 1.0)
    if profile == StepProfile.EXP:
        f = np.where(pos, np.exp(-1 / up), 0.0)
        df = np.where(pos, f / up ** 2, 0.0)
    else:
        f = np.where(pos, np.exp(-1 / up ** 2), 0.0)
        df = np.where(pos, 2 * f / up ** 3, 0.0)
    return f, df


@dataclass(frozen=True)
class Mollifier:
    """Smooth step equal to 1 on (0, inner_edge] and 0 on [outer_edge, oo)."""

    inner_edge: float = 1.0
    outer_edge: float = 2.0
    profile: StepProfile = StepProfile.EXP
    mellin_panels: int = 48
    mellin_order: int = 32

    def __post_init__(self):
        if not 0 < self.inner_edge < self.outer_edge:
            raise DomainError("need 0 < inner_edge < outer_edge")
        object.__setattr__(self, "profile", StepProfile(self.profile))

    def _u(self, x):
        return (np.asarray(x, dtype=float) - self.inner_edge) / (self.outer_edge - self.inner_edge)

    def __call__(self, x):
        u = self._u(x)
        a, _ = _glue(1 - u, self.profile)
        b, _ = _glue(u, self.profile)
        out = np.where(u <= 0, 1.0, np.where(u >= 1, 0.0, a / np.where(a + b > 0, a + b, 1.0)))
        return out if out.ndim else float(out)

    def derivative(self, x):
        u = self._u(x)
        a, da = _glue(1 - u, self.profile)
        b, db = _glue(u, self.profile)
        den = np.where(a + b > 0, a + b, 1.0)
        out = -(da * b + a * db) / den ** 2 / (self.outer_edge - self.inner_edge)
        out = np.where((u <= 0) | (u >= 1), 0.0, out)
        return out if out.ndim else float(out)

    @cached_property
    def _mellin_rule(self):
        x, w = panel_nodes(np.linspace(self.inner_edge, self.outer_edge, self.mellin_panels + 1),
                           self.mellin_order)
        return np.log(x), w * self.derivative(x)

    def mellin(self, s):
        """w~(s) = -(1/s) int w'(x) x^s dx: meromorphic, simple pole at 0 with residue 1."""
        s = np.asarray(s, dtype=complex)
        if np.any(np.abs(s) < 1e-8):
            raise PoleError("mellin transform of the mollifier: pole at s = 0")
        logx, wd = self._mellin_rule
        flat = s.ravel()
        vals = np.empty(flat.shape, dtype=complex)
        step = 2048
        for i in range(0, flat.size, step):
            blk = flat[i:i + step]
            vals[i:i + step] = -(np.exp(blk[:, None] * logx) @ wd) / blk
        vals = vals.reshape(s.shape)
        return vals if vals.ndim else complex(vals)

    @cached_property
    def contour_rule(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Nodes rho on Re rho = -1 with weights d(tau)/(2 pi) and w~(rho).

        The transform decays like exp(-c sqrt|tau|) only, so the line is cut
        where |w~| first drops below 1e-17 (its rounding floor is ~1e-18);
        the Gamma factors it multiplies grow at most polynomially.
        """
        taus = np.arange(0, 4001, 10.0)
        mags = np.abs(self.mellin(-1 + 1j * taus))
        below = np.flatnonzero(mags < 1e-17)
        L = float(taus[below[0]]) if below.size else float(taus[-1])
        panels = max(8, int(math.ceil(L)))
        tau, w = panel_nodes(np.linspace(-L, L, panels + 1), 24)
        rho = -1 + 1j * tau
        return rho, w / (2 * np.pi), self.mellin(rho)


DEFAULT_MOLLIFIER = Mollifier()
ALTERNATE_MOLLIFIER = Mollifier(profile=StepProfile.EXP_SQUARED)


def mollifier_w(x, mollifier: Mollifier = DEFAULT_MOLLIFIER):
    return mollifier(x)


def mellin_w(s, mollifier: Mollifier = DEFAULT_MOLLIFIER):
    return mollifier.mellin(s)


def regularized_M(sign, nu, x, mollifier: Mollifier = DEFAULT_MOLLIFIER):
    """B^+-_nu(x) minus w(x^2/4) times the leading kernel; O(x^2) at 0 for imaginary nu."""
    x = np.asarray(x, dtype=float)
    wv = mollifier(x * x / 4)
    b = B_pm(sign, nu, x)
    corr = np.where(wv > 0, wv * leading_kernel(nu, x), 0)
    out = b - corr
    return out if np.ndim(out) else complex(out)


# ---------------------------------------------------------------------------
# Fourier transforms: closed forms

class FourierKind(str, Enum):
    A_PLUS = "A_plus"
    A_MINUS = "A_minus"
    A_ZERO_ARG = "A_zero_arg"
    A0 = "A0"
    W = "W"
    W_ZERO_ARG = "W_zero_arg"
    N_PLUS = "N_plus"
    N_MINUS = "N_minus"
    A_BREVE_PM = "A_breve_pm"


def _check_nu(nu: complex):
    if abs(nu) < 1e-12:
        raise PoleError("order nu = 0")


def _strip(s: complex, lo: float, hi: float, what: str):
    if not lo < s.real < hi:
        raise DomainError(f"{what}: need {lo} < Re s < {hi}, got {s.real}")


def _log_gamma_pair(alpha, beta):
    return log_gamma(alpha) + log_gamma(np.asarray(alpha) - beta)


def _kummer_transform(kind: PsiKind, s: complex, nu: complex, y: float) -> complex:
    """cos(pi nu) Gamma(1-s, 2nu) (iy)^{s-1} Psi_kind(1-s, 1+2nu; -i/y)."""
    pre = np.cos(np.pi * nu) * np.exp(_log_gamma_pair(1 - s, 2 * nu)) * power(1j * y, s - 1)
    return complex(pre * psi_variant(kind, 1 - s, 1 + 2 * nu, -1j / y))


def a_zero_line(s, nu: complex, y: float):
    """The Psi_0 transform A0_{s,nu}(y), vectorised over s; evaluated in log space.

    With alpha = 1 - s it equals
    cos(pi nu) (iy)^{s-1} [Gamma(-2nu) Gamma(alpha) + Gamma(2nu) Gamma(alpha - 2nu) (-i/y)^{-2nu}].
    """
    s = np.asarray(s, dtype=complex)
    alpha = 1 - s
    lp = (s - 1) * np.log(1j * y + 0j)
    t1 = np.exp(log_gamma(-2 * nu) + log_gamma(alpha) + lp)
    t2 = np.exp(log_gamma(2 * nu) + log_gamma(alpha - 2 * nu) + lp - 2 * nu * np.log(-1j / y + 0j))
    return np.cos(np.pi * nu) * (t1 + t2)


def _mellin_correction(s: complex, nu: complex, y: float, mollifier: Mollifier) -> complex:
    """(1/2 pi i) int over Re rho = -1 of w~(rho) A0_{s+rho,nu}(y) d rho."""
    rho, wt, wtil = mollifier.contour_rule
    vals = a_zero_line(s + rho, nu, y)
    return complex(np.sum(wt * wtil * vals))


def fourier_closed(kind, s, nu, y: float = 0.0, sign=None,
                   mollifier: Mollifier = DEFAULT_MOLLIFIER) -> complex:
    """Closed-form Fourier transforms of the Bessel kernels against x^{-s-nu}.

    A_plus/A_minus   : transform of B^+-(2 sqrt x), y != 0, 3/4 < Re s < 1
    A_zero_arg       : the same at y = 0 (sign keyword), 1/4 < Re s < 1
    A0               : Psi_0 part, y != 0, 0 < Re s < 1
    W / W_zero_arg   : transform of w(x) times the leading kernel
    N_plus/N_minus   : transform of the regularized kernel, y != 0, 3/4 < Re s < 1
    A_breve_pm       : Psi-breve part (sign keyword), y != 0
    """
    kind = FourierKind(kind)
    s, nu = complex(s), complex(nu)
    _check_nu(nu)
    zero_arg = kind in (FourierKind.A_ZERO_ARG, FourierKind.W_ZERO_ARG)
    if not zero_arg and y == 0:
        raise DomainError(f"{kind.value} needs y != 0")
    if kind in (FourierKind.A_PLUS, FourierKind.A_MINUS):
        _strip(s, 0.75, 1.0, kind.value)
        k = PsiKind.PLUS if kind == FourierKind.A_PLUS else PsiKind.MINUS
        return _kummer_transform(k, s, nu, y)
    if kind == FourierKind.A_ZERO_ARG:
        _strip(s, 0.25, 1.0, kind.value)
        g = np.exp(_log_gamma_pair(1 - s, 2 * nu))
        if _sign(sign) > 0:
            return complex(-g * np.cos(np.pi * (s + nu)))
        return complex(g * np.cos(np.pi * nu))
    if kind == FourierKind.A0:
        _strip(s, 0.0, 1.0, kind.value)
        return complex(a_zero_line(s, nu, y))
    if kind == FourierKind.W:
        _strip(s, 0.0, 1.0, kind.value)
        return complex(a_zero_line(s, nu, y)) + _mellin_correction(s, nu, y, mollifier)
    if kind == FourierKind.W_ZERO_ARG:
        if not s.real < 1:
            raise DomainError("W_zero_arg: need Re s < 1")
        g = np.exp(log_gamma(2 * nu)) * mollifier.mellin(1 - s - 2 * nu)
        g2 = np.exp(log_gamma(-2 * nu)) * mollifier.mellin(1 - s)
        return complex(np.cos(np.pi * nu) * (g + g2))
    if kind in (FourierKind.N_PLUS, FourierKind.N_MINUS):
        _strip(s, 0.75, 1.0, kind.value)
        k = PsiKind.BREVE_PLUS if kind == FourierKind.N_PLUS else PsiKind.BREVE_MINUS
        return _kummer_transform(k, s, nu, y) - _mellin_correction(s, nu, y, mollifier)
    k = PsiKind.BREVE_PLUS if _sign(sign) > 0 else PsiKind.BREVE_MINUS
    if not s.real < 1:
        raise DomainError("A_breve_pm: need Re s < 1")
    return _kummer_transform(k, s, nu, y)


# ---------------------------------------------------------------------------
# Fourier transforms: quadrature oracle

class OracleKind(str, Enum):
    A = "A"
    N = "N"
    W = "W"


def _mp_kernel(sign: int, nu, z):
    """B^+-_nu(z) in mpmath for complex z."""
    if sign > 0:
        return mp.pi * (mp.besselj(-2 * nu, z) - mp.besselj(2 * nu, z)) / (2 * mp.sin(mp.pi * nu))
    return 2 * mp.cos(mp.pi * nu) * mp.besselk(2 * nu, z)


def _mp_leading(nu, z):
    p = lambda mu: mp.power(z / 2, mu) * mp.rgamma(mu + 1)
    return mp.pi * (p(-2 * nu) - p(2 * nu)) / (2 * mp.sin(mp.pi * nu))


def fourier_oracle(kind, sign, s, nu, y: float, mollifier: Mollifier = DEFAULT_MOLLIFIER,
                   dps: int = 15) -> tuple[complex, float]:
    """Direct quadrature of the defining integrals; returns (value, error estimate).

    The x-line is split at the mollifier edges; for y != 0 the remainder
    beyond X is rotated into the half plane where exp(-ixy) decays.  The
    J-type kernel at y = 0 is split into Hankel functions in z = 2 sqrt x,
    each rotated into its decaying half plane.  Kinds whose defining
    integral does not converge for the given (s, y) are refused.
    """
    kind = OracleKind(kind)
    sg = _sign(sign) if kind != OracleKind.W else 1
    s, nu, y = complex(s), complex(nu), float(y)
    _check_nu(nu)
    if not s.real < 1:
        raise DomainError("oracle: need Re s < 1 for integrability at 0")
    if kind != OracleKind.W and sg > 0 and not (s.real > 0.75 or (y == 0 and s.real > 0.25)):
        raise DomainError("oracle: J-type kernel not integrable for this strip")
    if kind == OracleKind.N and y == 0:
        raise DomainError("oracle: N is only defined here for y != 0")
    a, b = mollifier.inner_edge, mollifier.outer_edge
    err_total = [mp.mpf(0)]

    with mp.workdps(dps):
        mnu, ms, my = mp.mpc(nu), mp.mpc(s), mp.mpf(y)

        def moll(x):
            xr = float(mp.re(x))
            return mp.mpf(float(mollifier(xr))) if mp.im(x) == 0 else mp.mpf(0)

        def base(x):
            return mp.exp(-1j * x * my) * mp.power(x, -ms - mnu)

        def integrand(x):
            z = 2 * mp.sqrt(x)
            if kind == OracleKind.W:
                return moll(x) * _mp_leading(mnu, z) * base(x)
            val = _mp_kernel(sg, mnu, z)
            if kind == OracleKind.N:
                wv = moll(x)
                if wv != 0:
                    val = val - wv * _mp_leading(mnu, z)
            return val * base(x)

        def quad(f, pts):
            v, e = mp.quad(f, pts, error=True)
            err_total[0] += e
            return v

        # x = u^k flattens the x^{-Re s} endpoint singularity on (0, a]
        k = 1 / (1 - s.real)
        total = quad(lambda u: integrand(u ** k) * k * u ** (k - 1), [0, a ** (1 / k)])
        total += quad(integrand, [a, b])
        if kind != OracleKind.W:
            if y != 0:
                X = max(2.0 * b, 4.0 / y ** 2)
                total += quad(integrand, [b, X])
                d = -1j * (1 if y > 0 else -1)
                total += quad(lambda r: integrand(X + d * r) * d, [0, 4 / abs(y), mp.inf])
            elif sg < 0:
                total += quad(integrand, [b, mp.inf])
            else:
                total += _hankel_tail(mnu, ms, 2 * mp.sqrt(b), quad)
        return complex(total), float(err_total[0])


def _hankel_tail(nu, s, z0, quad):
    """int_{z0}^oo B^+(z) (z^2/4)^{-s-nu} (z/2) dz via rotated Hankel halves."""
    pref = mp.pi / (2 * mp.sin(mp.pi * nu))

    def weight(z):
        return mp.power(z * z / 4, -s - nu) * z / 2

    def part(hankel, direction):
        def f(r):
            z = z0 + direction * r
            return (hankel(-2 * nu, z) - hankel(2 * nu, z)) / 2 * weight(z) * direction
        return quad(f, [0, 5, mp.inf])

    return pref * (part(mp.hankel1, 1j) + part(mp.hankel2, -1j))
