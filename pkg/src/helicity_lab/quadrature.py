"""Quadrature rules used throughout the package.

* ``half_line_rule``: Gauss rule for the weight ``p**(2n-1) * exp(-p**2)`` on
  [0, inf).  Recurrence coefficients come from the exact moments
  ``Gamma(n + k/2) / 2`` via the Chebyshev algorithm in extended precision;
  nodes are Newton-polished in the same precision before rounding to float.
* ``sphere_rule``: product Gauss-Legendre x uniform-azimuth rule on S^2.
* ``class_angle_rule``: midpoint rule on the SU(2) class angle.
"""
from __future__ import annotations

import math
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy.linalg import eigh_tridiagonal


def _recurrence(n: int, count: int) -> tuple[list, list]:
    # Chebyshev algorithm (ordinary moments); needs generous working precision
    mom = [mp.gamma(mp.mpf(n) + mp.mpf(k) / 2) / 2 for k in range(2 * count)]
    alpha = [mp.mpf(0)] * count
    beta = [mp.mpf(0)] * count
    sig_prev = [mp.mpf(0)] * (2 * count)
    sig = list(mom)
    alpha[0] = mom[1] / mom[0]
    beta[0] = mom[0]
    for k in range(1, count):
        new = [mp.mpf(0)] * (2 * count)
        for l in range(k, 2 * count - k):
            new[l] = sig[l + 1] - alpha[k - 1] * sig[l] - beta[k - 1] * sig_prev[l]
        alpha[k] = new[k + 1] / new[k] - sig[k] / sig[k - 1]
        beta[k] = new[k] / sig[k - 1]
        sig_prev, sig = sig, new
    return alpha, beta


def _orthonormal_values(x, alpha, sbeta, count):
    """Values p_0..p_{count-1} at x, and p_count (unnormalised tail) + derivative."""
    pm1, p = mp.mpf(0), 1 / sbeta[0]
    dpm1, dp = mp.mpf(0), mp.mpf(0)
    total = p * p
    for k in range(count):
        back = sbeta[k] if k > 0 else 0
        scale = sbeta[k + 1] if k + 1 < count else 1
        pn = ((x - alpha[k]) * p - back * pm1) / scale
        dpn = (p + (x - alpha[k]) * dp - back * dpm1) / scale
        if k + 1 < count:
            total += pn * pn
        pm1, p = p, pn
        dpm1, dp = dp, dpn
    return total, p, dp


@lru_cache(maxsize=None)
def half_line_rule(n: int, count: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights with sum(w * q(x)) = int_0^inf p^(2n-1) q(p) e^(-p^2) dp.

    Exact for polynomials q of degree <= 2*count - 1.
    """
    if n < 1 or count < 1:
        raise ValueError("need n >= 1 and count >= 1")
    with mp.workdps(40 + 2 * count):
        alpha, beta = _recurrence(n, count)
        sbeta = [mp.sqrt(b) for b in beta]
        guess = eigh_tridiagonal(
            np.array([float(a) for a in alpha]),
            np.array([float(s) for s in sbeta[1:]]),
            eigvals_only=True,
        )
        nodes, weights = [], []
        for x0 in guess:
            x = mp.mpf(float(x0))
            for _ in range(8):
                _, p, dp = _orthonormal_values(x, alpha, sbeta, count)
                step = p / dp
                x -= step
                if abs(step) < mp.mpf(10) ** (-(mp.mp.dps - 10)):
                    break
            total, _, _ = _orthonormal_values(x, alpha, sbeta, count)
            nodes.append(float(x))
            weights.append(float(1 / total))
    x = np.array(nodes)
    w = np.array(weights)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def half_line_moment(n: int, k: int) -> float:
    """Closed form int_0^inf p^(2n-1+k) e^(-p^2) dp."""
    return math.gamma(n + k / 2) / 2


def required_sphere_order(degree: int) -> int:
    """Smallest product-rule order exact for polynomials of this degree on S^2."""
    return degree // 2 + 1


@lru_cache(maxsize=None)
def sphere_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit directions (M, 3) and weights summing to 4 pi.

    ``order`` Gauss-Legendre nodes in cos(theta) and ``2*order`` azimuths;
    exact for polynomials of total degree <= 2*order - 1.
    """
    ct, wt = np.polynomial.legendre.leggauss(order)
    nphi = 2 * order
    phi = 2 * np.pi * np.arange(nphi) / nphi
    st = np.sqrt(1 - ct**2)
    dirs = np.stack(
        [
            np.outer(st, np.cos(phi)).ravel(),
            np.outer(st, np.sin(phi)).ravel(),
            np.repeat(ct, nphi),
        ],
        axis=1,
    )
    w = np.repeat(wt, nphi) * (2 * np.pi / nphi)
    dirs.setflags(write=False)
    w.setflags(write=False)
    return dirs, w


@lru_cache(maxsize=None)
def class_angle_rule(points: int = 2048) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint nodes psi on (-pi, pi) and Haar weights for SU(2) class functions.

    A class function of an element with eigenvalues exp(+-i psi) integrates as
    sum(w * f(psi)).  Exact for trigonometric polynomials in psi of degree
    < points - 2.
    """
    psi = -np.pi + (np.arange(points) + 0.5) * (2 * np.pi / points)
    w = np.sin(psi) ** 2 / points * 2
    psi.setflags(write=False)
    w.setflags(write=False)
    return psi, w
