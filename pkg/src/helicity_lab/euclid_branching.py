"""SO(2) weights inside SO(3) irreps and the induced-representation branching.

By Frobenius reciprocity the multiplicity of D^l in the representation
induced from the helicity-h character of the little group equals the
multiplicity of the weight h in D^l restricted to rotations about one axis.
Half-integer spins are handled on the 4 pi circle of the double cover.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgument
from .helicity_onep import decomposition_table
from .so3_tensor import as_spin


@dataclass(frozen=True)
class BranchingTable:
    h: Fraction
    rows: tuple[tuple[Fraction, int], ...]

    @property
    def spins(self) -> list[Fraction]:
        return [l for l, m in self.rows if m > 0]

    def as_csv_rows(self) -> list[dict]:
        return [{"l": str(l), "multiplicity": m} for l, m in self.rows]


def _check_pair(l, h) -> tuple[Fraction, Fraction]:
    l, h = as_spin(l), as_spin(h)
    if l < 0:
        raise InvalidArgument("spin must be nonnegative")
    if (l - h).denominator != 1:
        raise InvalidArgument(f"l - h = {l - h} is not an integer; the weights live on different covers")
    return l, h


def weight_count(l, h) -> int:
    """Number of weights m in {-l, ..., l} equal to h."""
    l, h = _check_pair(l, h)
    twice = int(2 * l)
    return sum(1 for j in range(twice + 1) if -l + j == h)


def character_integral(l, h) -> float:
    """(1/4 pi) int_0^{4 pi} chi_l(theta) exp(-i h theta) d theta by the trapezoid rule.

    The integrand is a trigonometric polynomial in theta/2, so an equispaced
    rule with more than 2(l + |h|) + 1 nodes is exact up to rounding.
    """
    l, h = _check_pair(l, h)
    n = 2 * int(2 * (l + abs(h))) + 8
    theta = 4 * math.pi * np.arange(n) / n
    ms = -float(l) + np.arange(int(2 * l) + 1)
    chi = np.exp(1j * np.outer(theta, ms)).sum(axis=1)
    val = np.mean(chi * np.exp(-1j * float(h) * theta))
    if abs(val.imag) > 1e-8:
        raise RuntimeError(f"character integral has imaginary part {val.imag:.2e}")
    return float(val.real)


def so2_weight_multiplicity(l, h, tol: float = 1e-8) -> int:
    """Multiplicity of weight h in D^l, cross-checked by the character integral."""
    count = weight_count(l, h)
    integral = character_integral(l, h)
    rounded = round(integral)
    if abs(integral - rounded) > tol or rounded != count:
        raise RuntimeError(f"weight count {count} and character integral {integral!r} disagree for l={l}, h={h}")
    return count


def branching_table(h, lmax) -> BranchingTable:
    """Rows (l, multiplicity) for l = |h|, |h| + 1, ..., lmax."""
    h, lmax = as_spin(h), as_spin(lmax)
    rows = []
    l = abs(h)
    while l <= lmax:
        rows.append((l, so2_weight_multiplicity(l, h)))
        l += 1
    return BranchingTable(h, tuple(rows))


def consistency_with_conformal(h: int, cutoff: int) -> dict:
    """Compare the time-axis decomposition with the Euclidean branching spins."""
    if h < 1 or cutoff < 0:
        raise InvalidArgument("need h >= 1 and cutoff >= 0")
    conformal = sorted(Fraction(s) for _, s, _ in decomposition_table(h, cutoff).rows)
    euclid = branching_table(h, h + cutoff).spins
    higher = set(branching_table(h + 1, h + cutoff).spins)
    spins_match = conformal == euclid
    subset = higher <= set(euclid)
    return {
        "h": h,
        "cutoff": cutoff,
        "conformal_spins": [str(s) for s in conformal],
        "branching_spins": [str(s) for s in euclid],
        "spins_match": spins_match,
        "higher_helicity_subset": subset,
        "passed": spins_match and subset,
    }


def weight_bookkeeping(lmax: int) -> tuple[int, int]:
    """(total weight count over l <= lmax, sum of 2l + 1) for integer spins."""
    counted = sum(weight_count(l, m) for l in range(lmax + 1) for m in range(-l, l + 1))
    return counted, sum(2 * l + 1 for l in range(lmax + 1))
