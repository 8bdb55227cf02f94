"""Truncated lowest-weight representations of the Moebius group.

Basis vectors ``|m>``, ``m = 0 .. N-1``, are L0 eigenvectors with eigenvalue
``weight + m``.  ``ladder_minus`` is L_{-1} (raises m), ``ladder_plus`` is L_1.
Phases are chosen so that all ladder entries are real and nonnegative.

Generator conventions::

    P = L0 - (L1 + L-1)/2      K = L0 + (L1 + L-1)/2      D = (L-1 - L1)/(2i)
    I = exp(i pi L0)

so that L0 = (P + K)/2, I P I^-1 = K and I D I^-1 = -D.  The sign of D is a
convention; nothing downstream depends on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgument


@dataclass(frozen=True)
class LowestWeightRep:
    weight: float
    truncation: int
    l0: np.ndarray
    ladder_minus: np.ndarray
    ladder_plus: np.ndarray
    p_gen: np.ndarray
    k_gen: np.ndarray
    d_gen: np.ndarray
    inversion: np.ndarray


def _as_fraction(weight) -> Fraction | None:
    try:
        return Fraction(weight)
    except (TypeError, ValueError):
        return None


_QUARTER_TURNS = {Fraction(0): 1 + 0j, Fraction(1, 2): 1j, Fraction(1): -1 + 0j, Fraction(3, 2): -1j}


def _unit_phase(weight, m: int) -> complex:
    """exp(i pi (weight + m)), exact on quarter turns so I^2 = 1 holds bitwise."""
    w = _as_fraction(weight)
    if w is None:
        return complex(np.exp(1j * np.pi * (weight + m)))
    r = (w + m) % 2
    if r in _QUARTER_TURNS:
        return _QUARTER_TURNS[r]
    return complex(np.exp(1j * np.pi * float(r)))


def ladder_norms_squared(weight, truncation: int) -> list:
    """Squared norms ``||L_{-1}|m>||^2 = (m+1)(2n+m)`` for m = 0..N-2.

    Computed in exact rational arithmetic whenever ``weight`` converts to a
    Fraction (ints, Fractions, finite floats).
    """
    w = _as_fraction(weight)
    if w is None:
        w = weight
    return [(m + 1) * (2 * w + m) for m in range(truncation - 1)]


def build_rep(weight, truncation: int) -> LowestWeightRep:
    if not weight > 0:
        raise InvalidArgument(f"weight must be positive, got {weight}")
    if int(truncation) != truncation or truncation < 2:
        raise InvalidArgument(f"truncation must be an integer >= 2, got {truncation}")
    n = int(truncation)

    norms2 = ladder_norms_squared(weight, n)
    lower = np.zeros((n, n))
    for m, c2 in enumerate(norms2):
        lower[m + 1, m] = math.sqrt(c2)
    upper = lower.T.copy()

    modes = float(weight) + np.arange(n, dtype=float)
    l0 = np.diag(modes)
    half_sum = (upper + lower) / 2
    p_gen = (l0 - half_sum).astype(complex)
    k_gen = (l0 + half_sum).astype(complex)
    d_gen = (lower - upper) / 2j
    inversion = np.diag([_unit_phase(weight, m) for m in range(n)])
    for a in (l0, lower, upper, p_gen, k_gen, d_gen, inversion):
        a.setflags(write=False)
    return LowestWeightRep(float(weight), n, l0, lower, upper, p_gen, k_gen, d_gen, inversion)


def _interior(a: np.ndarray) -> np.ndarray:
    return a[:-1, :-1]


def _opnorm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2))


def commutator_residuals(rep: LowestWeightRep) -> dict[str, float]:
    """Operator norms of the sl(2) relations on modes 0..N-2."""
    l0, lm, lp = rep.l0, rep.ladder_minus, rep.ladder_plus
    return {
        "[L0,L-1]-L-1": _opnorm(_interior(l0 @ lm - lm @ l0 - lm)),
        "[L0,L1]+L1": _opnorm(_interior(l0 @ lp - lp @ l0 + lp)),
        "[L1,L-1]-2L0": _opnorm(_interior(lp @ lm - lm @ lp - 2 * l0)),
    }


def inversion_conjugation_residual(rep: LowestWeightRep) -> float:
    inv = rep.inversion
    inv_inverse = np.conj(inv)
    r_pk = _opnorm(_interior(inv @ rep.p_gen @ inv_inverse - rep.k_gen))
    r_d = _opnorm(_interior(inv @ rep.d_gen @ inv_inverse + rep.d_gen))
    return max(r_pk, r_d)


def character(weight, beta: float, cutoff: int) -> tuple[float, float]:
    """Partial sum and closed form of Tr exp(-beta L0) in the weight-n rep."""
    if not beta > 0:
        raise InvalidArgument(f"beta must be positive (series diverges), got {beta}")
    if cutoff < 1:
        raise InvalidArgument("cutoff must be a positive integer")
    weight = float(weight)
    m = np.arange(cutoff)
    partial = float(np.sum(np.exp(-beta * (weight + m))))
    closed = math.exp(-beta * weight) / -math.expm1(-beta)
    return partial, closed


def character_tail_bound(weight, beta: float, cutoff: int) -> float:
    return math.exp(-beta * (float(weight) + cutoff)) / -math.expm1(-beta)


def positivity_probe(rep: LowestWeightRep, samples: int, seed: int = 0) -> float:
    """Minimum of <v, P v> over random unit vectors on the lower half of the modes."""
    rng = np.random.default_rng(seed)
    half = max(rep.truncation // 2, 1)
    block = rep.p_gen[:half, :half]
    v = rng.normal(size=(samples, half)) + 1j * rng.normal(size=(samples, half))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    values = np.einsum("si,ij,sj->s", v.conj(), block, v).real
    return float(values.min())


def expectation(op: np.ndarray, vec: np.ndarray) -> complex:
    return complex(np.vdot(vec, op @ vec))
