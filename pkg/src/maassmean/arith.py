"""Kloosterman sums, Dirichlet characters, Gauss sums and divisor functions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .numkernel import DomainError

TWO_PI = 2 * math.pi


def factorize(n: int) -> dict[int, int]:
    if n < 1:
        raise DomainError("factorize: n must be positive")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(c: int) -> int:
    r = c
    for p in factorize(c):
        r -= r // p
    return r


def mod_inverse(n: int, c: int) -> int:
    """Inverse of n modulo c in [0, c); raises on gcd(n, c) > 1."""
    if c < 1:
        raise DomainError("modulus must be positive")
    if math.gcd(n, c) != 1:
        raise DomainError(f"{n} is not invertible modulo {c}")
    return pow(n, -1, c) if c > 1 else 0


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, k in factorize(n).items():
        ds = [d * p ** j for d in ds for j in range(k + 1)]
    return sorted(ds)


def num_divisors(n: int) -> int:
    return math.prod(k + 1 for k in factorize(n).values())


def divisor_tau(nu, n: int):
    """Sum over ab = n of (a/b)^nu; vectorised in nu."""
    nu = np.asarray(nu, dtype=complex)
    total = np.zeros_like(nu)
    for a in divisors(n):
        total = total + np.exp(nu * math.log(a / (n // a)))
    return total if total.ndim else complex(total)


def coprime_residues(c: int) -> np.ndarray:
    a = np.arange(c, dtype=np.int64)
    if c == 1:
        return np.zeros(1, dtype=np.int64)
    return a[np.gcd(a, c) == 1]


def inverse_table(c: int) -> tuple[np.ndarray, np.ndarray]:
    """Coprime residues a mod c and their inverses (vectorised power map)."""
    a = coprime_residues(c)
    if c == 1:
        return a, a.copy()
    return a, _powmod(a, euler_phi(c) - 1, c)


def _powmod(base: np.ndarray, exp: int, mod: int) -> np.ndarray:
    result = np.ones_like(base)
    b = base % mod
    while exp:
        if exp & 1:
            result = (result * b) % mod
        b = (b * b) % mod
        exp >>= 1
    return result


def _kloosterman_direct(m: int, n: int, c: int) -> complex:
    a, ab = inverse_table(c)
    phase = ((a * (m % c) + ab * (n % c)) % c) / c
    return complex(np.exp(1j * TWO_PI * phase).sum())


@lru_cache(maxsize=200_000)
def kloosterman(m: int, n: int, c: int) -> float:
    """S(m, n; c), assembled from prime-power factors by twisted multiplicativity.

    S(m, n; qr) = S(m r', n r'; q) S(m q', n q'; r) with r r' = 1 mod q and
    q q' = 1 mod r.  The value is real; it is returned as a float.
    """
    if c < 1:
        raise DomainError("kloosterman: c must be positive")
    if c == 1:
        return 1.0
    parts = [p ** k for p, k in factorize(c).items()]
    value = 1.0 + 0j
    for q in parts:
        r = c // q
        rinv = pow(r, -1, q) if q > 1 else 0
        value *= _kloosterman_direct(m * rinv, n * rinv, q)
    return float(value.real)


def kloosterman_direct(m: int, n: int, c: int) -> float:
    """Plain enumeration over a mod c (oracle for the factorised route)."""
    return _kloosterman_direct(m, n, c).real


def weil_bound(m: int, n: int, c: int) -> float:
    return num_divisors(c) * math.sqrt(math.gcd(math.gcd(m, n), c)) * math.sqrt(c)


# ---------------------------------------------------------------------------
# characters

def _primitive_root(p: int) -> int:
    phi = p - 1
    primes = list(factorize(phi))
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in primes):
            return g
    return 1


def _cyclic_components(c: int) -> list[tuple[int, int, np.ndarray]]:
    """Decompose (Z/c)^x into cyclic factors.

    Returns (order, modulus q, discrete-log table on 0..c-1 or -1) per factor;
    the table gives the exponent of the generator of each residue mod q.
    """
    comps = []
    for p, k in factorize(c).items():
        q = p ** k
        res = np.arange(c) % q
        if p == 2:
            if k == 1:
                continue
            # (Z/2^k)^x = <-1> x <5>
            sign_log = np.full(q, -1)
            five_log = np.full(q, -1)
            order5 = q // 4
            x = 1
            for j in range(order5):
                sign_log[x] = 0
                five_log[x] = j
                sign_log[(-x) % q] = 1
                five_log[(-x) % q] = j
                x = (x * 5) % q
            comps.append((2, q, sign_log[res]))
            if order5 > 1:
                comps.append((order5, q, five_log[res]))
        else:
            g = _primitive_root(p)
            if k > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            order = q - q // p
            log = np.full(q, -1)
            x = 1
            for j in range(order):
                log[x] = j
                x = (x * g) % q
            comps.append((order, q, log[res]))
    return comps


@dataclass(frozen=True)
class CharacterTable:
    modulus: int
    characters: np.ndarray          # shape (phi(c), c), complex values
    parity: np.ndarray              # 0 even, 1 odd
    gauss: np.ndarray               # Gauss sums
    principal_index: int = 0
    labels: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.parity)

    def of_parity(self, delta: int) -> np.ndarray:
        return np.flatnonzero(self.parity == delta)


@lru_cache(maxsize=4096)
def characters(c: int) -> CharacterTable:
    """All Dirichlet characters mod c as dense value arrays."""
    if c < 1:
        raise DomainError("characters: modulus must be positive")
    a = np.arange(c)
    unit = (np.gcd(a, c) == 1) if c > 1 else np.ones(1, dtype=bool)
    comps = _cyclic_components(c)
    orders = [o for o, _, _ in comps]
    labels = list(np.ndindex(*orders)) if orders else [()]
    values = np.zeros((len(labels), c), dtype=complex)
    for i, lab in enumerate(labels):
        phase = np.zeros(c)
        for (order, _, log), j in zip(comps, lab):
            phase = phase + j * np.where(log >= 0, log, 0) / order
        values[i] = np.where(unit, np.exp(1j * TWO_PI * phase), 0)
    minus_one = (c - 1) % c
    par = np.where(np.real(values[:, minus_one]) < 0, 1, 0) if c > 1 else np.zeros(1, dtype=int)
    tab = CharacterTable(c, values, par, np.array([gauss_sum(v) for v in values]), 0, labels)
    return tab


def gauss_sum(chi: np.ndarray) -> complex:
    """tau(chi) = sum_a chi(a) e(a/c), chi given as its value array."""
    chi = np.asarray(chi, dtype=complex)
    c = len(chi)
    return complex(np.sum(chi * np.exp(1j * TWO_PI * np.arange(c) / c)))


def is_primitive(chi: np.ndarray) -> bool:
    c = len(chi)
    for d in divisors(c)[:-1]:
        # induced from modulus d iff chi(a) = 1 whenever a = 1 mod d, gcd(a, c) = 1
        a = np.arange(1, c, d)
        a = a[np.gcd(a, c) == 1]
        if np.all(np.abs(chi[a] - 1) < 1e-9):
            return False
    return True


# ---------------------------------------------------------------------------
# reciprocity

def reciprocity_check(n: int, c: int, sign: int = 1) -> float:
    """|e(-+ nbar/c) - e(+- cbar/n) e(-+ 1/(cn))| for coprime n, c."""
    if math.gcd(n, c) != 1 or n < 1 or c < 1:
        raise DomainError("reciprocity_check needs coprime positive n, c")
    s = 1 if sign in (1, "+") else -1
    nbar = pow(n, -1, c) if c > 1 else 0
    cbar = pow(c, -1, n) if n > 1 else 0
    lhs = np.exp(-s * 1j * TWO_PI * nbar / c)
    rhs = np.exp(s * 1j * TWO_PI * cbar / n) * np.exp(-s * 1j * TWO_PI / (c * n))
    return float(abs(lhs - rhs))
