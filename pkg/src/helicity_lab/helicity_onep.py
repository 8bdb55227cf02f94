"""One-particle structure of helicity-h fields restricted to the time axis.

Coefficient spaces
------------------
A level-k test element carries two tensors f^X_{b1..bh; a1..ak} (X = E, B),
symmetric traceless in the b's and in the a's.  Internally these are flat
vectors in the full 3^(h+k) index space with axes ordered (b1..bh, a1..ak),
E block first.  ``coefficient_projector(h, k)`` is the orthogonal projector
onto the admissible coefficients.

Momentum space (h = 1)
----------------------
Fourier conventions: a spatial derivative becomes ``i p_a`` and the time
derivative becomes ``-i p0``.  The test element (e, b) enters the field
strength pairing through

    f^{0b} = e_b / 2,  f^{b0} = -e_b / 2,  f^{jk} = -eps_{cjk} b_c / 2,

which is the orientation B = (F_32, F_13, F_21).  With it all four null
relations below hold exactly for the form  p_mu p_tau eta_{nu sigma}
conj(f^{mu nu}) g^{sigma tau}, p_mu = (|p|, -p).

Null relations (level k, with g of lower rank)
----------------------------------------------
    (delta_{b1 a1} g, 0) = 0,    (0, delta_{b1 a1} g) = 0,
    (eps_{a1 b1 c} g_c.., 0) = (0, -d_t g)   (couples to level k-1),
    (0, eps_{a1 b1 c} g_c..) = (d_t g, 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import hermite as _herm
from scipy.linalg import null_space, subspace_angles

from .errors import InvalidArgument, PreconditionViolation
from .quadrature import required_sphere_order, sphere_rule
from .so3_tensor import EPS, is_symmetric_traceless, projector_matrix

ETA = np.diag([1.0, -1.0, -1.0, -1.0])


# --------------------------------------------------------------------------
# temporal profiles


def temporal_profile(m: int, t) -> np.ndarray:
    """Normalised Hermite function phi_m(t)."""
    t = np.asarray(t, dtype=float)
    c = np.zeros(m + 1)
    c[m] = 1.0
    norm = 1.0 / math.sqrt(2.0**m * math.factorial(m) * math.sqrt(math.pi))
    return norm * _herm.hermval(t, c) * np.exp(-t * t / 2)


def temporal_profile_hat(m: int, p0) -> np.ndarray:
    """Fourier image of phi_m in the convention where d/dt -> -i p0."""
    return (1j) ** m * temporal_profile(m, p0)


# --------------------------------------------------------------------------
# domain types


@dataclass(frozen=True, eq=False)
class RestrictedTestElement:
    h: int
    k: int
    fE: np.ndarray
    fB: np.ndarray
    temporal_mode: int = 0

    def __post_init__(self):
        if self.h < 1 or self.k < 0:
            raise InvalidArgument("need h >= 1 and k >= 0")
        shape = (3,) * (self.h + self.k)
        for name in ("fE", "fB"):
            a = np.asarray(getattr(self, name), dtype=complex)
            if a.shape != shape:
                raise InvalidArgument(f"{name} must have shape {shape}, got {a.shape}")
            if not _has_partial_symmetry(a, self.h, 1e-12 * max(1.0, float(np.max(np.abs(a))))):
                raise InvalidArgument(f"{name} is not symmetric traceless in its b and a groups")
            a = a.copy()
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.temporal_mode < 0:
            raise InvalidArgument("temporal_mode must be nonnegative")

    def vector(self) -> np.ndarray:
        return np.concatenate([self.fE.ravel(), self.fB.ravel()])

    @classmethod
    def from_vector(cls, h: int, k: int, vec, temporal_mode: int = 0) -> "RestrictedTestElement":
        n = 3 ** (h + k)
        vec = np.asarray(vec, dtype=complex)
        shape = (3,) * (h + k)
        return cls(h, k, vec[:n].reshape(shape), vec[n:].reshape(shape), temporal_mode)


@dataclass(frozen=True, eq=False)
class PolarizationState:
    h: int
    k: int
    cE: np.ndarray
    cB: np.ndarray

    def __post_init__(self):
        for name in ("cE", "cB"):
            a = np.asarray(getattr(self, name), dtype=complex)
            if a.shape != (3,) * (self.h + self.k):
                raise InvalidArgument(f"{name} has the wrong rank")
            if not is_symmetric_traceless(a, 1e-12 * max(1.0, float(np.max(np.abs(a))))):
                raise InvalidArgument(f"{name} is not symmetric traceless")
            a = a.copy()
            a.setflags(write=False)
            object.__setattr__(self, name, a)


@dataclass(frozen=True)
class DecompositionTable:
    rows: tuple[tuple[int, int, int], ...]

    def as_csv_rows(self) -> list[dict]:
        return [{"lowest_weight": a, "spin": b, "multiplicity": c} for a, b, c in self.rows]


# --------------------------------------------------------------------------
# coefficient projectors


def _block_projector(h: int, k: int) -> np.ndarray:
    return np.kron(projector_matrix(h), projector_matrix(k))


@lru_cache(maxsize=None)
def coefficient_projector(h: int, k: int) -> np.ndarray:
    """Projector on (STF_h x STF_k) + (STF_h x STF_k), E block first."""
    p = _block_projector(h, k)
    z = np.zeros_like(p)
    out = np.block([[p, z], [z, p]])
    out.setflags(write=False)
    return out


def _has_partial_symmetry(a: np.ndarray, h: int, tol: float) -> bool:
    k = a.ndim - h
    v = a.reshape(-1)
    return bool(np.max(np.abs(_block_projector(h, k) @ v - v), initial=0.0) <= tol)


def _range_basis(p: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((p + p.T.conj()) / 2)
    return v[:, w > 0.5]


@lru_cache(maxsize=None)
def coefficient_basis(h: int, k: int) -> np.ndarray:
    """Orthonormal basis (columns) of the level-k coefficient space."""
    out = _range_basis(coefficient_projector(h, k))
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def stf_target_basis(h: int, k: int) -> np.ndarray:
    """Orthonormal basis of STF_{h+k} + STF_{h+k} in the level-k coordinates."""
    p = projector_matrix(h + k)
    z = np.zeros_like(p)
    out = _range_basis(np.block([[p, z], [z, p]]))
    out.setflags(write=False)
    return out


# --------------------------------------------------------------------------
# null relations


@dataclass(frozen=True, eq=False)
class NullRelationMap:
    """Relation generators as columns of [level-k block; level-(k-1) block].

    The lower block of each epsilon-type generator is understood to carry one
    time derivative.  ``quotient_dim`` is the complex dimension of the level-k
    coefficient space modulo the level-k parts of all relations.
    """

    h: int
    k: int
    delta_relations: np.ndarray
    eps_relations: np.ndarray
    level_dim: int
    lower_dim: int
    ambient_rank: int
    relation_rank: int
    quotient_dim: int

    @property
    def matrix(self) -> np.ndarray:
        return np.concatenate([self.delta_relations, self.eps_relations], axis=1)

    def level_part(self) -> np.ndarray:
        return self.matrix[: self.level_dim]

    def in_span(self, level_vector, tol: float = 1e-10) -> bool:
        """Whether a level-k coefficient vector lies in the span of relation level parts."""
        a = self.level_part()
        v = np.asarray(level_vector, dtype=complex)
        x, *_ = np.linalg.lstsq(a, v, rcond=None)
        return bool(np.linalg.norm(a @ x - v) <= tol * max(1.0, np.linalg.norm(v)))


def _delta_generator(h: int, k: int, g: np.ndarray) -> np.ndarray:
    # delta_{b1 a1} g_{b2..bh; a2..ak}, axes (b1..bh, a1..ak)
    t = np.multiply.outer(np.eye(3), g)  # axes (b1, a1, b2..bh, a2..ak)
    order = [0] + list(range(2, h + 1)) + [1] + list(range(h + 1, h + k))
    return np.transpose(t, np.argsort(order))


def _eps_generator(h: int, k: int, g: np.ndarray) -> np.ndarray:
    # eps_{a1 b1 c} g_{c b2..bh; a2..ak}, axes (b1..bh, a1..ak)
    t = np.tensordot(EPS, g, axes=([2], [0]))  # axes (a1, b1, b2..bh, a2..ak)
    order = [h] + [0] + list(range(1, h)) + list(range(h + 1, h + k))
    # position i of t goes to axis order[i]
    return np.transpose(t, np.argsort(order))


def _rank(mat: np.ndarray, rel: float = 1e-9) -> int:
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > rel * max(s[0], 1e-300))) if s.size else 0


@lru_cache(maxsize=None)
def null_relation_map(h: int, k: int) -> NullRelationMap:
    if h < 1 or k < 0:
        raise InvalidArgument("need h >= 1 and k >= 0")
    n_hi = 3 ** (h + k)
    level_dim = 2 * n_hi
    pk = coefficient_projector(h, k)
    ambient = _rank(pk)
    if k == 0:
        empty = np.zeros((level_dim, 0), dtype=complex)
        return NullRelationMap(h, 0, empty, empty, level_dim, 0, ambient, 0, ambient)
    n_lo = 3 ** (h + k - 1)
    lower_dim = 2 * n_lo
    plo = coefficient_projector(h, k - 1)
    shape_d = (3,) * (h + k - 2)
    shape_e = (3,) * (h + k - 1)
    deltas, epss = [], []
    for idx in range(3 ** (h + k - 2)):
        g = np.zeros(3 ** (h + k - 2))
        g[idx] = 1.0
        gen = _delta_generator(h, k, g.reshape(shape_d)).ravel()
        for x in range(2):
            col = np.zeros(level_dim + lower_dim, dtype=complex)
            col[x * n_hi : (x + 1) * n_hi] = gen
            col[:level_dim] = pk @ col[:level_dim]
            deltas.append(col)
    for idx in range(3 ** (h + k - 1)):
        g = np.zeros(3 ** (h + k - 1))
        g[idx] = 1.0
        gen = _eps_generator(h, k, g.reshape(shape_e)).ravel()
        low = g  # same tensor, read as (b1..bh; a2..ak)
        # (eps g, 0) - (0, -dt g) and (0, eps g) - (dt g, 0)
        for x in range(2):
            col = np.zeros(level_dim + lower_dim, dtype=complex)
            col[x * n_hi : (x + 1) * n_hi] = gen
            if x == 0:
                col[level_dim + n_lo :] = low
            else:
                col[level_dim : level_dim + n_lo] = -low
            col[:level_dim] = pk @ col[:level_dim]
            col[level_dim:] = plo @ col[level_dim:]
            epss.append(col)
    dmat = np.array(deltas).T
    emat = np.array(epss).T
    rel_rank = _rank(np.concatenate([dmat, emat], axis=1)[:level_dim])
    for m in (dmat, emat):
        m.setflags(write=False)
    return NullRelationMap(h, k, dmat, emat, level_dim, lower_dim, ambient, rel_rank, ambient - rel_rank)


def expected_quotient_dim(h: int, k: int) -> int:
    return 2 * (2 * (h + k) + 1)


# --------------------------------------------------------------------------
# Maxwell momentum form (h = 1)


def _momentum_components(p: np.ndarray, f: RestrictedTestElement, direction_power: bool = False):
    """(e, b) at momentum p: coefficient contracted with (i p_a)^k times the profile."""
    p = np.asarray(p, dtype=float)
    p0 = float(np.linalg.norm(p))
    q = p / p0 if direction_power else p
    out = []
    for t in (f.fE, f.fB):
        for _ in range(f.k):
            t = np.tensordot(t, 1j * q, axes=([t.ndim - 1], [0]))
        out.append(t)
    prof = temporal_profile_hat(f.temporal_mode, p0)
    return out[0] * prof, out[1] * prof


def _pairing_vector(p: np.ndarray, e: np.ndarray, b: np.ndarray) -> np.ndarray:
    """v^nu = p_mu f^{mu nu} for the embedding in the module docstring."""
    p0 = float(np.linalg.norm(p))
    v0 = 0.5 * np.dot(p, e)
    vs = 0.5 * (p0 * e + np.cross(b, p))
    return np.concatenate([[v0], vs])


def maxwell_momentum_form(p, f: RestrictedTestElement, g: RestrictedTestElement) -> complex:
    """p_mu p_tau eta_{nu sigma} conj(fhat^{mu nu}) ghat^{sigma tau} at p on the light cone."""
    if f.h != 1 or g.h != 1:
        raise InvalidArgument("the explicit momentum form is implemented for h = 1 only")
    p = np.asarray(p, dtype=float)
    if p.shape != (3,) or not np.linalg.norm(p) > 0:
        raise InvalidArgument("p must be a nonzero 3-vector")
    vf = _pairing_vector(p, *_momentum_components(p, f))
    vg = _pairing_vector(p, *_momentum_components(p, g))
    # g^{sigma tau} p_tau = -v_g^sigma
    return complex(-np.conj(vf) @ ETA @ vg)


def _time_derivative_factor(p0: float) -> complex:
    return -1j * p0


def _contract(t: np.ndarray, q: np.ndarray, k: int) -> np.ndarray:
    for _ in range(k):
        t = np.tensordot(t, 1j * q, axes=([t.ndim - 1], [0]))
    return t


def raw_relation_momentum(p, h: int, k: int, kind: str, x: int, g) -> tuple[np.ndarray, np.ndarray]:
    """(e, b) at momentum p of one unprojected relation generator (h = 1).

    kind is "delta" or "eps"; x = 0 puts the generator in the E slot and
    x = 1 in the B slot.  Trace parts in the a's are kept, so no wave-equation
    bookkeeping is needed.
    """
    if h != 1:
        raise InvalidArgument("momentum images are available for h = 1 only")
    p = np.asarray(p, dtype=float)
    p0 = float(np.linalg.norm(p))
    g = np.asarray(g, dtype=complex)
    zero = np.zeros(3, dtype=complex)
    if kind == "delta":
        gen = _contract(_delta_generator(h, k, g), p, k)
        return (gen, zero) if x == 0 else (zero, gen)
    if kind != "eps":
        raise InvalidArgument(f"unknown relation kind {kind!r}")
    gen = _contract(_eps_generator(h, k, g), p, k)
    low = _time_derivative_factor(p0) * _contract(g, p, k - 1)
    # (eps g, 0) - (0, -dt g) and (0, eps g) - (dt g, 0)
    return (gen, low) if x == 0 else (-low, gen)


def pairing_residual(p, e: np.ndarray, b: np.ndarray) -> float:
    """Largest |form| between (e, b) and unit polarisations at momentum p."""
    p = np.asarray(p, dtype=float)
    v = _pairing_vector(p, e, b)
    worst = 0.0
    for j in range(6):
        u = np.zeros(6)
        u[j] = 1.0
        w = _pairing_vector(p, u[:3], u[3:])
        worst = max(worst, abs(np.conj(w) @ ETA @ v))
    return worst


# --------------------------------------------------------------------------
# Gram matrices


@dataclass(frozen=True, eq=False)
class GramReport:
    h: int
    kmax: int
    p0: float
    eigenvalues: np.ndarray
    rank: int
    expected_rank: int
    threshold: float
    gap: float
    conclusive: bool
    quadrature_order: int
    route: str

    @property
    def passed(self) -> bool:
        return self.conclusive and self.rank == self.expected_rank


def spanning_set(h: int, kmax: int) -> list[tuple[int, np.ndarray]]:
    """(level, coefficient vector) for orthonormal bases of every level <= kmax."""
    out = []
    for k in range(kmax + 1):
        basis = coefficient_basis(h, k)
        for j in range(basis.shape[1]):
            out.append((k, basis[:, j]))
    return out


def _maxwell_gram(kmax: int, p0: float, order: int, temporal_mode, degree_normalized: bool):
    dirs, wts = sphere_rule(order)
    elems = spanning_set(1, kmax)
    nel = len(elems)
    vecs = np.zeros((dirs.shape[0], nel, 4), dtype=complex)
    for q, n in enumerate(dirs):
        p = p0 * n
        for i, (k, c) in enumerate(elems):
            f = RestrictedTestElement.from_vector(1, k, c, 0 if temporal_mode is None else temporal_mode)
            e, b = _momentum_components(p, f, direction_power=degree_normalized)
            if temporal_mode is None:
                prof = temporal_profile_hat(0, p0)
                e, b = e / prof, b / prof
            vecs[q, i] = _pairing_vector(p, e, b)
    # G_ij = sum_q w_q * (-conj(v_i) eta v_j)
    weighted = vecs * wts[:, None, None]
    g = -np.einsum("qia,ab,qjb->ij", np.conj(weighted), ETA, vecs)
    return g


def _reduce_to_stf(h: int, k: int, vec: np.ndarray, dt: complex, out: dict) -> None:
    """Split a level-k coefficient into its STF part plus transferred lower parts."""
    target = stf_target_basis(h, k)
    rel = null_relation_map(h, k)
    cols = [target, rel.level_part()]
    a = np.concatenate(cols, axis=1)
    x, *_ = np.linalg.lstsq(a, vec, rcond=None)
    resid = np.linalg.norm(a @ x - vec)
    if resid > 1e-9 * max(1.0, np.linalg.norm(vec)):
        raise RuntimeError(f"level {k} coefficient not spanned by STF part and relations ({resid:.2e})")
    nt = target.shape[1]
    out[k] = out.get(k, 0) + x[:nt]
    if k > 0:
        ne = rel.delta_relations.shape[1]
        lower = rel.eps_relations[rel.level_dim :] @ x[nt + ne :]
        # relation says level part ~ lower part, so subtracting it moves the
        # epsilon component down one level with a time derivative
        if np.linalg.norm(lower) > 0:
            _reduce_to_stf(h, k - 1, -dt * lower, dt, out)


def quotient_coordinates(h: int, kmax: int, p0: float) -> np.ndarray:
    """Matrix Q: spanning-set element -> coordinates in sum_k (STF_{h+k})^2."""
    elems = spanning_set(h, kmax)
    sizes = [stf_target_basis(h, k).shape[1] for k in range(kmax + 1)]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    dt = _time_derivative_factor(p0)
    q = np.zeros((offsets[-1], len(elems)), dtype=complex)
    for i, (k, c) in enumerate(elems):
        parts: dict = {}
        _reduce_to_stf(h, k, c.astype(complex), dt, parts)
        for lev, coords in parts.items():
            q[offsets[lev] : offsets[lev + 1], i] += coords
    return q


def angular_gram(h: int, kmax: int, p0: float = 1.0, order: int | None = None,
                 temporal_mode: int | None = None, degree_normalized: bool = True,
                 rank_rel: float = 1e-8, min_gap: float = 1e3,
                 route: str | None = None) -> GramReport:
    """Gram matrix of the spanning set of levels 0..kmax on the sphere of radius p0.

    route "maxwell" (default for h = 1) integrates the momentum form over the
    sphere; route "quotient" (default and only option for h >= 2) uses the
    relation-quotient inner product on the STF coordinates.
    """
    if h < 1 or kmax < 0:
        raise InvalidArgument("need h >= 1 and kmax >= 0")
    if not p0 > 0:
        raise InvalidArgument("p0 must be positive")
    route = route or ("maxwell" if h == 1 else "quotient")
    need = required_sphere_order(2 * (h + kmax))
    if order is None:
        order = required_sphere_order(2 * (h + kmax) + 2)
    if route == "maxwell":
        if h != 1:
            raise InvalidArgument("the momentum-form route needs h = 1")
        if order < need:
            raise PreconditionViolation(
                f"sphere quadrature order {order} is too low for degree {2 * (h + kmax)} "
                f"integrands; need order >= {need}"
            )
        g = _maxwell_gram(kmax, p0, order, temporal_mode, degree_normalized)
    elif route == "quotient":
        q = quotient_coordinates(h, kmax, p0)
        g = q.conj().T @ q
    else:
        raise InvalidArgument(f"unknown route {route!r}")
    g = (g + g.conj().T) / 2
    ev = np.sort(np.linalg.eigvalsh(g))[::-1]
    top = float(ev[0]) if ev.size else 0.0
    thr = rank_rel * top
    rank = int(np.sum(ev > thr))
    if 0 < rank < ev.size:
        below = max(float(np.max(np.abs(ev[rank:]))), 1e-300)
        gap = float(ev[rank - 1]) / below
    else:
        gap = math.inf
    expected = sum(expected_quotient_dim(h, k) for k in range(kmax + 1))
    return GramReport(h, kmax, float(p0), ev, rank, expected, thr, gap, gap >= min_gap, order, route)


# --------------------------------------------------------------------------
# quasiprimary counting


@dataclass(frozen=True, eq=False)
class QuasiprimaryReport:
    k: int
    matrix: np.ndarray
    domain_basis: np.ndarray
    kernel_basis: np.ndarray
    kernel_dim: int
    stf_angle: float

    @property
    def complex_multiplets(self) -> int:
        return 1 if self.kernel_dim else 0

    @property
    def real_multiplets(self) -> int:
        # one complex multiplet of J = E + iB gives two real ones
        return 2 * self.complex_multiplets


def _pair_trace_matrix(rank: int, i: int, j: int) -> np.ndarray:
    n = 3**rank
    cols = np.eye(n).reshape((n,) + (3,) * rank)
    return np.stack([np.trace(c, axis1=i, axis2=j).ravel() for c in cols], axis=1)


def _sym_a_projector(k: int) -> np.ndarray:
    # symmetrise the first k axes of a rank-(k+1) tensor
    from .so3_tensor import symmetrize

    n = 3 ** (k + 1)
    cols = np.eye(n).reshape((n,) + (3,) * (k + 1))
    out = []
    for c in cols:
        moved = np.moveaxis(c, k, 0)  # (b, a1..ak)
        s = np.stack([symmetrize(moved[b]) for b in range(3)])
        out.append(np.moveaxis(s, 0, k).ravel())
    return np.array(out).T.real


def residual_map_matrix(k: int) -> np.ndarray:
    """c -> (2 tr_{a_i a_j} c for i<j, 2i eps_{a_i b c} c for each i) on rank-(k+1) tensors."""
    n = 3 ** (k + 1)
    blocks = []
    for i in range(k):
        for j in range(i + 1, k):
            blocks.append(2 * _pair_trace_matrix(k + 1, i, j))
    cols = np.eye(n).reshape((n,) + (3,) * (k + 1))
    for i in range(k):
        rows = []
        for c in cols:
            # contract a_i and b with eps_{a_i b c}; free index c goes last
            t = np.tensordot(c, EPS, axes=([i, k], [0, 1]))
            rows.append(t.ravel())
        blocks.append(2j * np.array(rows).T)
    if not blocks:
        return np.zeros((0, n), dtype=complex)
    return np.concatenate(blocks, axis=0).astype(complex)


def quasiprimary_residual_map(h: int, k: int, tol: float = 1e-10) -> QuasiprimaryReport:
    """Kernel of the special-conformal residual on J_{a1..ak, b} (Maxwell case).

    Domain: tensors symmetric in the a's with vanishing (a_i, b) traces, i.e.
    the coefficients left after the divergence-free relation.
    """
    if h != 1:
        raise InvalidArgument("the commutator residual is only available for h = 1 (Maxwell)")
    if k < 0:
        raise InvalidArgument("k must be nonnegative")
    n = 3 ** (k + 1)
    sym = _sym_a_projector(k)
    cons = [np.eye(n) - sym]
    if k >= 1:
        cons.append(_pair_trace_matrix(k + 1, k - 1, k))
    domain = null_space(np.concatenate(cons, axis=0), rcond=1e-12)
    m = residual_map_matrix(k)
    if m.shape[0] == 0:
        ker = domain.astype(complex)
    else:
        ker = domain @ null_space(m @ domain, rcond=1e-12)
    stf = _range_basis(projector_matrix(k + 1))
    if ker.shape[1] and ker.shape[1] == stf.shape[1]:
        angle = float(np.max(subspace_angles(ker, stf.astype(complex))))
    else:
        angle = math.inf
    return QuasiprimaryReport(k, m, domain, ker, int(ker.shape[1]), angle)


def quasiprimary_residual(k: int, tensor) -> float:
    """Norm of the residual map applied to one rank-(k+1) tensor."""
    t = np.asarray(tensor, dtype=complex).ravel()
    m = residual_map_matrix(k)
    return float(np.linalg.norm(m @ t)) if m.shape[0] else 0.0


# --------------------------------------------------------------------------
# decomposition and traces


def decomposition_table(h: int, kmax: int, with_both_signs: bool = True) -> DecompositionTable:
    if h < 1 or kmax < 0:
        raise InvalidArgument("need h >= 1 and kmax >= 0")
    mult = 2 if with_both_signs else 1
    return DecompositionTable(tuple((h + k + 1, h + k, mult) for k in range(kmax + 1)))


def l0_multiplicity(table: DecompositionTable, level: int) -> int:
    """Dimension of the L0 = level eigenspace implied by the table."""
    return sum(m * (2 * s + 1) for w, s, m in table.rows if level >= w)


def _z(beta: float) -> float:
    if not beta > 0:
        raise InvalidArgument(f"beta must be positive, got {beta}")
    return math.exp(-beta)


def helicity_trace_closed(h: int, beta: float, with_both_signs: bool = True) -> float:
    """sum_{n>=h} (2n+1) z^(n+1) / (1-z), summed in closed form (z = e^-beta)."""
    z = _z(beta)
    omz = -math.expm1(-beta)
    mult = 2 if with_both_signs else 1
    return mult * z ** (h + 1) * ((2 * h + 1) * omz + 2 * z) / omz**3


def helicity_trace(h: int, beta: float, with_both_signs: bool = True,
                   cutoff: int = 200) -> tuple[float, float]:
    """(mode enumeration over rows k <= cutoff and modes m <= cutoff, closed form)."""
    if cutoff < 1:
        raise InvalidArgument("cutoff must be positive")
    z = _z(beta)
    table = decomposition_table(h, cutoff, with_both_signs)
    modes = np.arange(cutoff + 1)
    total = 0.0
    for w, s, mult in table.rows:
        total += mult * (2 * s + 1) * float(np.sum(z ** (w + modes)))
    return total, helicity_trace_closed(h, beta, with_both_signs)


def helicity_trace_tail(h: int, beta: float, with_both_signs: bool, cutoff: int) -> float:
    """Upper bound on closed - enumerated: dropped rows plus dropped modes."""
    z = _z(beta)
    rows_beyond = helicity_trace_closed(h + cutoff + 1, beta, with_both_signs)
    return rows_beyond + z ** (cutoff + 1) * helicity_trace_closed(h, beta, with_both_signs)


def _series(term, start: int, rtol: float = 1e-17, max_terms: int = 100000) -> float:
    total = 0.0
    for j in range(start, start + max_terms):
        t = term(j)
        total += t
        if t <= rtol * abs(total) and j > start + 5:
            return total
    return total


def trace_series_conformal(h: int, beta: float, with_both_signs: bool = True) -> float:
    """Direct summation of sum_{n>=h} (2n+1) e^{-(n+1) beta} / (1 - e^-beta)."""
    z = _z(beta)
    omz = -math.expm1(-beta)
    mult = 2 if with_both_signs else 1
    return mult * _series(lambda n: (2 * n + 1) * z ** (n + 1) / omz, h)


def trace_series_maxwell(beta: float) -> float:
    """Direct summation of 2 sum_{k>=0} (2k+3) e^{-beta (2+k)} / (1 - e^-beta)."""
    z = _z(beta)
    omz = -math.expm1(-beta)
    return 2 * _series(lambda k: (2 * k + 3) * z ** (2 + k) / omz, 0)


def fock_trace(spectrum, occupation_cutoff: int) -> tuple[float, float]:
    """(sum over occupations with total <= cutoff, prod 1/(1 - a_i))."""
    a = np.asarray(list(spectrum), dtype=float)
    if a.size and (np.any(a < 0) or np.any(a >= 1)):
        raise InvalidArgument("eigenvalues must lie in [0, 1); the trace diverges otherwise")
    if occupation_cutoff < 0:
        raise InvalidArgument("occupation_cutoff must be nonnegative")
    n = int(occupation_cutoff)
    # complete homogeneous polynomials h_0..h_n by truncated series products
    series = np.zeros(n + 1)
    series[0] = 1.0
    for x in a:
        geo = x ** np.arange(n + 1)
        series = np.convolve(series, geo)[: n + 1]
    closed = float(np.prod(1.0 / (1.0 - a))) if a.size else 1.0
    return float(np.sum(series)), closed
