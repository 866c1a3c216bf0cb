"""Offline generator for the bundled level-1 Maass form fixtures.

Locates spectral parameters of even/odd Hecke-Maass cusp forms on
SL(2, Z) with Hejhal's collocation method, extends the Hecke eigenvalues
with small-height collocation, and computes harmonic weights from the
Petersson norm over the standard fundamental domain.

Run ``python tools/hejhal.py --tmax 31 --out src/maassmean/data/maass_level1.jsonl``.
Takes tens of minutes on one core.
"""
from __future__ import annotations

import argparse
import json
import logging
import math

import numpy as np
from scipy.optimize import brentq

log = logging.getLogger("hejhal")

SQRT3_2 = math.sqrt(3.0) / 2.0


def kbes_scaled(t: float, x: np.ndarray) -> np.ndarray:
    """exp(pi t/2) K_{it}(x) for real t > 0 and an array of x > 0.

    Trapezoid rule on the line Im u = beta of (1/2) int exp(-x cosh u + i t u) du,
    with beta chosen near the saddle so no catastrophic cancellation occurs.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty_like(flat)
    theta = min(math.pi / 2, 2.0 / max(t, 1e-3))
    order = np.argsort(flat)
    # group x values so each batch shares one grid
    for chunk in np.array_split(order, max(1, len(order) // 64)):
        xs = flat[chunk]
        beta = np.minimum(np.arcsin(np.minimum(1.0, t / xs)), math.pi / 2 - theta)
        cb, sb = np.cos(beta), np.sin(beta)
        a = xs * cb
        U = np.arccosh(1.0 + 45.0 / a)
        fmax = t + xs * sb * np.cosh(U)
        n = int(np.ceil(np.max(U * fmax) / math.pi * 1.2)) + 24
        s = np.linspace(0.0, 1.0, n + 1)
        u = U[:, None] * s[None, :]
        h = U / n
        ph = t * u - (xs * sb)[:, None] * np.sinh(u)
        amp = np.exp(-a[:, None] * np.cosh(u) + (t * (math.pi / 2 - beta))[:, None])
        f = amp * np.cos(ph)
        out[chunk] = h * (f.sum(axis=1) - 0.5 * f[:, 0] - 0.5 * f[:, -1])
    return out.reshape(x.shape)


def pullback(x: np.ndarray, y: np.ndarray):
    """Map points of the upper half plane into the standard fundamental domain."""
    z = x + 1j * y
    for _ in range(200):
        z = z - np.round(z.real)
        inside = np.abs(z) < 1.0 - 1e-15
        if not inside.any():
            break
        z = np.where(inside, -1.0 / z, z)
    return z.real, z.imag


def cs(parity: int, arg):
    return np.cos(arg) if parity == 0 else np.sin(arg)


def truncation(t: float, y: float, eps: float = 1e-16) -> int:
    # K~(2 pi n y) < eps once 2 pi n y > pi t/2 + log(1/eps) (roughly)
    return int(math.ceil((math.pi * t / 2 + math.log(1 / eps) + 8) / (2 * math.pi * y)))


def solve_coefficients(t: float, parity: int, Y: float, M: int | None = None, Q: int | None = None):
    """Collocation solve for lambda(1..M), normalized lambda(1) = 1."""
    if M is None:
        M = truncation(t, SQRT3_2 * 0.999)
    if Q is None:
        Q = M + 12
    m = np.arange(1, Q + 1)
    xm = (m - 0.5) / (2 * Q)
    xs, ys = pullback(xm, np.full(Q, Y))
    k = np.arange(1, M + 1)
    Kst = kbes_scaled(t, 2 * math.pi * np.outer(ys, k))  # Q x M
    Bst = np.sqrt(ys)[:, None] * Kst * cs(parity, 2 * math.pi * np.outer(xs, k))
    C = cs(parity, 2 * math.pi * np.outer(k, xm))  # M x Q
    V = (2.0 / Q) * C @ Bst  # M x M
    KY = kbes_scaled(t, 2 * math.pi * k * Y)
    V -= np.diag(math.sqrt(Y) * KY)
    # normalize rows to unit scale
    V /= np.maximum(np.abs(V).max(axis=1, keepdims=True), 1e-300)
    A = V[1:, 1:]
    b = -V[1:, 0]
    c = np.linalg.solve(A, b)
    return np.concatenate([[1.0], c])


def detector(t: float, parity: int, Y1: float, Y2: float):
    c1 = solve_coefficients(t, parity, Y1)
    c2 = solve_coefficients(t, parity, Y2)
    return c1[1] - c2[1], c1[2] - c2[2], c1


def scan(parity: int, t_lo: float, t_hi: float, dt: float,
         pairs=((0.8, 0.76), (0.84, 0.7), (0.82, 0.73))):
    """Union of verified roots over several collocation-height pairs."""
    found = []
    for Y1, Y2 in pairs:
        for r in _scan_pair(parity, t_lo, t_hi, dt, Y1, Y2):
            if all(abs(r - q) > 1e-6 for q in found):
                found.append(r)
    return sorted(found)


def _scan_pair(parity, t_lo, t_hi, dt, Y1, Y2):
    ts = np.arange(t_lo, t_hi + dt / 2, dt)
    F = np.empty(len(ts))
    G = np.empty(len(ts))
    for i, t in enumerate(ts):
        F[i], G[i], _ = detector(t, parity, Y1, Y2)
    roots = []
    for i in range(len(ts) - 1):
        if F[i] * F[i + 1] < 0 and G[i] * G[i + 1] < 0:
            try:
                r = brentq(lambda tt: detector(tt, parity, Y1, Y2)[0], ts[i], ts[i + 1], xtol=1e-14, rtol=1e-15)
            except ValueError:
                continue
            f, g, c = detector(r, parity, Y1, Y2)
            hecke = abs(c[1] * c[2] - c[5]) + abs(c[1] ** 2 - c[3] - 1)
            if abs(g) < 1e-6 and hecke < 1e-6:
                roots.append(r)
                log.info("parity %d: t = %.12f (g=%.1e, hecke=%.1e)", parity, r, g, hecke)
            else:
                log.debug("reject %.6f g=%.1e hecke=%.1e", r, g, hecke)
    return roots


def many_coefficients(t: float, parity: int, N: int, low: np.ndarray):
    """lambda(1..N) from the low coefficients, using several collocation heights."""
    M0 = len(low)
    ys_set = [t / (2 * math.pi * n) * 0.6 for n in (N, N // 2, N // 4, N // 8, N // 16)]
    ys_set = [y for y in ys_set if y < SQRT3_2 * 0.95]
    best = np.zeros(N)
    best_scale = np.zeros(N)
    n = np.arange(1, N + 1)
    k = np.arange(1, M0 + 1)
    for Y in ys_set:
        Q = max(N, truncation(t, Y)) + 20
        xm = (np.arange(1, Q + 1) - 0.5) / (2 * Q)
        xs, ys = pullback(xm, np.full(Q, Y))
        g = (np.sqrt(ys)[:, None] * kbes_scaled(t, 2 * math.pi * np.outer(ys, k))
             * cs(parity, 2 * math.pi * np.outer(xs, k))) @ low
        proj = (2.0 / Q) * cs(parity, 2 * math.pi * np.outer(n, xm)) @ g
        KY = math.sqrt(Y) * kbes_scaled(t, 2 * math.pi * n * Y)
        better = np.abs(KY) > best_scale
        best[better] = proj[better] / KY[better]
        best_scale[better] = np.abs(KY[better])
    return best, best_scale


def petersson_weight(t: float, parity: int, c: np.ndarray) -> float:
    """Harmonic weight |rho(1)|^2 / cosh(pi t) for the L^2-normalized form."""
    M = min(len(c), truncation(t, SQRT3_2 * 0.999))
    c = c[:M]
    k = np.arange(1, M + 1)
    # upper part y >= 1: 2 sum lambda(n)^2 int_1^inf K~^2 dy / y
    yq, wq = np.polynomial.legendre.leggauss(200)
    # y = exp(v), v in [0, V]
    V = math.log(truncation(t, 1.0) + 5.0)
    v = 0.5 * V * (yq + 1)
    wv = 0.5 * V * wq
    yv = np.exp(v)
    Kv = kbes_scaled(t, 2 * math.pi * np.outer(yv, k))
    upper = 2.0 * np.sum(wv[:, None] * Kv ** 2 * c[None, :] ** 2)
    # lower part: x in [0, 1/2], y in [sqrt(1-x^2), 1]; |f|^2 even in x so double
    xq, xw = np.polynomial.legendre.leggauss(80)
    xx = 0.25 * (xq + 1)
    xw = 0.25 * xw
    lower = 0.0
    for xi, wxi in zip(xx, xw):
        y0 = math.sqrt(1 - xi * xi)
        yy = y0 + 0.5 * (1 - y0) * (xq + 1)
        wy = 0.5 * (1 - y0) * xw * 4.0  # xw was scaled by 1/4 above
        F = 2.0 * np.sqrt(yy) * ((kbes_scaled(t, 2 * math.pi * np.outer(yy, k)) * cs(parity, 2 * math.pi * k * xi)[None, :]) @ c)
        lower += wxi * np.sum(wy * F ** 2 / yy ** 2)
    lower *= 2.0
    norm_scaled = upper + lower
    return 2.0 / ((1.0 + math.exp(-2 * math.pi * t)) * norm_scaled)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tmin", type=float, default=5.0)
    ap.add_argument("--tmax", type=float, default=31.0)
    ap.add_argument("--dt", type=float, default=0.004)
    ap.add_argument("--ncoeff", type=int, default=200)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    records = []
    for parity in (0, 1):
        for t in scan(parity, args.tmin, args.tmax, args.dt):
            low = solve_coefficients(t, parity, 0.8)
            lam, _ = many_coefficients(t, parity, args.ncoeff, low)
            omega = petersson_weight(t, parity, lam)
            records.append({"t": t, "parity": parity, "omega": omega, "coeffs": lam.tolist()})
            log.info("t=%.10f parity=%d omega=%.10f", t, parity, omega)
    records.sort(key=lambda r: r["t"])
    with open(args.out, "w") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")


if __name__ == "__main__":
    main()
