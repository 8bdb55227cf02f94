"""SO(3) tensors, SU(2) characters and higher Maxwell field strengths.

Spins are handled as ``fractions.Fraction`` so that half-integers are exact.
Characters use the class angle psi of an SU(2) element with eigenvalues
exp(+-i psi); then ``chi_l(psi) = sum_{m=-l..l} exp(2 i m psi)``.

Field strengths live on index pairs over {0,1,2,3} with metric
eta = diag(1, -1, -1, -1).  Electric and magnetic parts are

    E_{b1..bh} = F_{[0 b1]...[0 bh]}
    B_{b1..bh} = sum_{j<k} eps_{b1 j k} F_{[j k][0 b2]...[0 bh]}

i.e. each epsilon contraction with an antisymmetric pair runs over j < k.
"""
from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidArgument
from .quadrature import class_angle_rule

TAGS = ("raw", "symmetric", "symmetric-traceless")


@dataclass(frozen=True, eq=False)
class SymTensor:
    entries: np.ndarray
    symmetry_tag: str = "raw"

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if any(s != 3 for s in a.shape):
            raise InvalidArgument(f"tensor axes must all have length 3, got shape {a.shape}")
        if self.symmetry_tag not in TAGS:
            raise InvalidArgument(f"unknown symmetry tag {self.symmetry_tag!r}")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def rank(self) -> int:
        return self.entries.ndim


def levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for p in itertools.permutations(range(3)):
        eps[p] = np.linalg.det(np.eye(3)[list(p)])
    return eps


EPS = levi_civita()


@lru_cache(maxsize=None)
def _sorted_labels(rank: int) -> tuple[np.ndarray, int]:
    idx = np.indices((3,) * rank).reshape(rank, -1)
    srt = np.sort(idx, axis=0)
    code = np.zeros(srt.shape[1], dtype=np.int64)
    for row in srt:
        code = code * 3 + row
    uniq, inv = np.unique(code, return_inverse=True)
    return inv, uniq.size


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Average over all index permutations."""
    a = np.asarray(a, dtype=complex)
    r = a.ndim
    if r < 2:
        return a.copy()
    inv, m = _sorted_labels(r)
    flat = a.reshape(-1)
    count = np.bincount(inv, minlength=m)
    re = np.bincount(inv, weights=flat.real, minlength=m) / count
    im = np.bincount(inv, weights=flat.imag, minlength=m) / count
    return (re + 1j * im)[inv].reshape(a.shape)


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


@lru_cache(maxsize=None)
def stf_coefficients(rank: int) -> tuple[Fraction, ...]:
    """Rational weights of sym(delta^k x tr^k S) in the traceless projection."""
    r = rank
    out = []
    for k in range(r // 2 + 1):
        c = Fraction((-1) ** k * _double_factorial(2 * r - 2 * k - 1), _double_factorial(2 * r - 1))
        c *= Fraction(math.factorial(r), math.factorial(r - 2 * k) * _double_factorial(2 * k))
        out.append(c)
    return tuple(out)


def _delta_power(k: int) -> np.ndarray:
    out = np.ones(())
    for _ in range(k):
        out = np.multiply.outer(out, np.eye(3))
    return out


def sym_traceless_array(a: np.ndarray) -> np.ndarray:
    s = symmetrize(a)
    r = s.ndim
    if r < 2:
        return s
    out = np.zeros_like(s)
    tr = s
    for k, c in enumerate(stf_coefficients(r)):
        if k > 0:
            tr = np.trace(tr, axis1=0, axis2=1)
        out = out + float(c) * symmetrize(np.multiply.outer(_delta_power(k), tr))
    return out


def sym_traceless_project(t: SymTensor | np.ndarray) -> SymTensor:
    a = t.entries if isinstance(t, SymTensor) else np.asarray(t)
    return SymTensor(sym_traceless_array(a), "symmetric-traceless")


_PROJ_LOCK = threading.Lock()
_PROJ_CACHE: dict[int, np.ndarray] = {}


def projector_matrix(rank: int) -> np.ndarray:
    """Matrix of the traceless projection on the 3^rank tensor space (cached, read-only)."""
    cached = _PROJ_CACHE.get(rank)
    if cached is not None:
        return cached
    with _PROJ_LOCK:
        if rank not in _PROJ_CACHE:
            dim = 3**rank
            cols = np.eye(dim).reshape((dim,) + (3,) * rank)
            mat = np.stack([sym_traceless_array(c).reshape(-1) for c in cols], axis=1).real
            mat.setflags(write=False)
            _PROJ_CACHE[rank] = mat
    return _PROJ_CACHE[rank]


def numerical_rank(mat: np.ndarray, rel: float = 1e-8) -> int:
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel * s[0]))


def is_symmetric(a: np.ndarray, tol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return a.ndim < 2 or bool(np.max(np.abs(a - symmetrize(a))) <= tol)


def max_trace(a: np.ndarray) -> float:
    a = np.asarray(a)
    if a.ndim < 2:
        return 0.0
    worst = 0.0
    for i, j in itertools.combinations(range(a.ndim), 2):
        worst = max(worst, float(np.max(np.abs(np.trace(a, axis1=i, axis2=j)))))
    return worst


def is_symmetric_traceless(a: np.ndarray, tol: float = 1e-12) -> bool:
    return is_symmetric(a, tol) and max_trace(a) <= tol


# --------------------------------------------------------------------------
# spins and characters


def as_spin(l) -> Fraction:
    """Half-integer spin as an exact Fraction; rejects anything else."""
    try:
        f = Fraction(l).limit_denominator(1000) if isinstance(l, float) else Fraction(l)
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"not a half-integer: {l!r}") from exc
    if (2 * f).denominator != 1:
        raise InvalidArgument(f"2l must be an integer, got l = {l!r}")
    return f


def irrep_dimension(l) -> int:
    l = as_spin(l)
    if l < 0:
        raise InvalidArgument("spin must be nonnegative")
    return int(2 * l + 1)


def weights(l) -> list[Fraction]:
    l = as_spin(l)
    return [-l + i for i in range(int(2 * l) + 1)]


def character(l, psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    return sum(np.cos(2 * float(m) * psi) for m in weights(l))


def class_inner(chi_a: np.ndarray, chi_b: np.ndarray, points: int = 2048) -> float:
    """Haar inner product of two real class functions sampled on class_angle_rule."""
    _, w = class_angle_rule(points)
    return float(np.sum(w * chi_a * chi_b))


def _decompose_by_weights(s: Fraction, k: Fraction) -> list[Fraction]:
    counts: dict[Fraction, int] = {}
    for a in weights(s):
        for b in weights(k):
            counts[a + b] = counts.get(a + b, 0) + 1
    out = []
    while counts:
        top = max(counts)
        out.append(top)
        for m in weights(top):
            counts[m] -= 1
            if counts[m] == 0:
                del counts[m]
    return sorted(out)


def _decompose_by_characters(s: Fraction, k: Fraction, points: int = 2048) -> list[Fraction]:
    psi, _ = class_angle_rule(points)
    prod = character(s, psi) * character(k, psi)
    out = []
    for twice in range(int(2 * (s + k)) + 1):
        l = Fraction(twice, 2)
        if (s + k - l).denominator != 1:
            continue
        mult = class_inner(character(l, psi), prod, points)
        if abs(mult - round(mult)) > 1e-8:
            raise RuntimeError(f"non-integer character multiplicity {mult} for l={l}")
        out.extend([l] * int(round(mult)))
    return sorted(out)


def cg_decompose(s, k) -> list[Fraction]:
    """Spins in D^s (x) D^k, checked by weight counting and by characters."""
    s, k = as_spin(s), as_spin(k)
    if s < 0 or k < 0:
        raise InvalidArgument("spins must be nonnegative")
    a = _decompose_by_weights(s, k)
    b = _decompose_by_characters(s, k)
    if a != b:
        raise RuntimeError(f"decomposition routes disagree: {a} vs {b}")
    return a


def frobenius_schur(l, points: int = 2048) -> int:
    """Haar average of chi_l(g^2), rounded; +1 real, -1 pseudo-real."""
    psi, w = class_angle_rule(points)
    val = float(np.sum(w * character(l, 2 * psi)))
    r = int(round(val))
    if abs(val - r) > 1e-8:
        raise RuntimeError(f"indicator quadrature not integral: {val}")
    return r


def frobenius_schur_value(l, points: int = 2048) -> float:
    psi, w = class_angle_rule(points)
    return float(np.sum(w * character(l, 2 * psi)))


# --------------------------------------------------------------------------
# field strengths


@dataclass(frozen=True, eq=False)
class FieldStrength:
    h: int
    entries: np.ndarray


def _pair_tensors() -> tuple[np.ndarray, np.ndarray]:
    el = np.zeros((3, 4, 4))
    for b in range(3):
        el[b, 0, b + 1] = 1.0
        el[b, b + 1, 0] = -1.0
    mg = np.zeros((3, 4, 4))
    for c in range(3):
        mg[c, 1:, 1:] = EPS[:, :, c]
    return el, mg


_EL, _MG = _pair_tensors()
_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _assemble(h: int, value: np.ndarray, slots: tuple[np.ndarray, ...]) -> np.ndarray:
    vsub = _LETTERS[:h]
    pairs = [vsub[i] + _LETTERS[h + 2 * i] + _LETTERS[h + 2 * i + 1] for i in range(h)]
    out = "".join(_LETTERS[h + 2 * i] + _LETTERS[h + 2 * i + 1] for i in range(h))
    return np.einsum(vsub + "," + ",".join(pairs) + "->" + out, value, *slots)


def build_field_strength(E, B, tol: float = 1e-12) -> FieldStrength:
    E = np.asarray(E.entries if isinstance(E, SymTensor) else E, dtype=complex)
    B = np.asarray(B.entries if isinstance(B, SymTensor) else B, dtype=complex)
    if E.shape != B.shape or E.ndim < 1:
        raise InvalidArgument(f"E and B must have equal rank >= 1, got {E.shape} and {B.shape}")
    for name, t in (("E", E), ("B", B)):
        if any(s != 3 for s in t.shape):
            raise InvalidArgument(f"{name} must be a tensor over 3-space")
        if not is_symmetric_traceless(t, tol * max(1.0, float(np.max(np.abs(t))))):
            raise InvalidArgument(f"{name} is not symmetric traceless")
    h = E.ndim
    F = np.zeros((4,) * (2 * h), dtype=complex)
    for pattern in itertools.product((0, 1), repeat=h):
        m = sum(pattern)
        if m % 2 == 0:
            value = (-1) ** (m // 2) * E
        else:
            value = (-1) ** ((m - 1) // 2) * B
        F += _assemble(h, value, tuple(_MG if p else _EL for p in pattern))
    if not np.any(E.imag) and not np.any(B.imag):
        F = F.real.astype(complex)
    return FieldStrength(h, F)


def electric_part(F: FieldStrength) -> np.ndarray:
    idx = tuple(x for _ in range(F.h) for x in (0, slice(1, 4)))
    return F.entries[idx]


def magnetic_part(F: FieldStrength) -> np.ndarray:
    h = F.h
    rest = tuple(x for _ in range(h - 1) for x in (0, slice(1, 4)))
    block = F.entries[(slice(1, 4), slice(1, 4)) + rest]  # [j k] b2 .. bh
    return 0.5 * np.tensordot(EPS, block, axes=([1, 2], [0, 1]))


def double_epsilon_residual(F: FieldStrength) -> float:
    """max | sum_{j<k} eps eps F_{[j1k1][j2k2]...} + F_{[0b1][0b2]...} | over all other slots."""
    if F.h < 2:
        return 0.0
    a = F.entries
    lhs = 0.25 * np.tensordot(EPS, np.tensordot(EPS, a[1:, 1:, 1:, 1:], axes=([1, 2], [2, 3])),
                              axes=([1, 2], [1, 2]))
    rhs = -a[0, 1:, 0, 1:]
    return float(np.max(np.abs(lhs - rhs)))


def _swap_pair_axes(a: np.ndarray, i: int, j: int) -> np.ndarray:
    perm = list(range(a.ndim))
    perm[2 * i], perm[2 * j] = perm[2 * j], perm[2 * i]
    perm[2 * i + 1], perm[2 * j + 1] = perm[2 * j + 1], perm[2 * i + 1]
    return a.transpose(perm)


ETA = np.diag([1.0, -1.0, -1.0, -1.0])


def verify_hmt_symmetries(F: FieldStrength) -> dict[str, float]:
    a = F.entries
    h = F.h
    anti = max(float(np.max(np.abs(a + np.swapaxes(a, 2 * i, 2 * i + 1)))) for i in range(h))
    exch = 0.0
    trace = 0.0
    cyclic = 0.0
    for i, j in itertools.combinations(range(h), 2):
        exch = max(exch, float(np.max(np.abs(a - _swap_pair_axes(a, i, j)))))
        for u, v in itertools.product((0, 1), repeat=2):
            ax1, ax2 = 2 * i + u, 2 * j + v
            t = np.einsum(a, list(range(a.ndim)), ETA, [ax1, ax2],
                          [k for k in range(a.ndim) if k not in (ax1, ax2)])
            trace = max(trace, float(np.max(np.abs(t))))
        # F_[ab][c.] + F_[bc][a.] + F_[ca][b.] on slots (i, j)
        b = np.moveaxis(a, [2 * i, 2 * i + 1, 2 * j], [0, 1, 2])
        cyc = b + b.transpose((1, 2, 0) + tuple(range(3, a.ndim))) + b.transpose(
            (2, 0, 1) + tuple(range(3, a.ndim)))
        cyclic = max(cyclic, float(np.max(np.abs(cyc))))
    return {"pair_antisymmetry": anti, "pair_exchange": exch, "eta_trace": trace, "cyclic": cyclic}


def random_stf(rank: int, rng: np.random.Generator, complex_values: bool = False) -> np.ndarray:
    a = rng.normal(size=(3,) * rank)
    if complex_values:
        a = a + 1j * rng.normal(size=(3,) * rank)
    out = sym_traceless_array(a)
    return out if complex_values else out.real
