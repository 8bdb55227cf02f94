"""Finite-dimensional standard subspaces and their modular objects.

Vectors of C^d are handled through the realification v -> (Re v, Im v) in
R^(2d), where multiplication by i is the matrix ``complex_structure(d)``.
Real-linear (possibly antilinear) operators are plain real 2d x 2d matrices,
and the real part of the inner product is the Euclidean dot product there.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space, subspace_angles

from .errors import InvalidArgument, PreconditionViolation

RANK_TOL = 1e-9


def complex_structure(d: int) -> np.ndarray:
    eye = np.eye(d)
    zero = np.zeros((d, d))
    return np.block([[zero, -eye], [eye, zero]])


def realify(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.concatenate([v.real, v.imag], axis=0)


def complexify(r: np.ndarray) -> np.ndarray:
    d = r.shape[0] // 2
    return r[:d] + 1j * r[d:]


def realify_operator(a: np.ndarray) -> np.ndarray:
    """Real 2d x 2d matrix of a complex-linear operator."""
    a = np.asarray(a, dtype=complex)
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def complexify_operator(m: np.ndarray) -> np.ndarray:
    """Inverse of realify_operator; only meaningful when m commutes with i."""
    d = m.shape[0] // 2
    return m[:d, :d] + 1j * m[d:, :d]


def _rank(mat: np.ndarray, tol: float = RANK_TOL) -> int:
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def _orth(mat: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    if mat.size == 0:
        return mat.reshape(mat.shape[0], 0)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    return u[:, s > tol * max(1.0, s[0] if s.size else 0.0)]


@dataclass(frozen=True, eq=False)
class RealSubspace:
    """Real span of the columns of ``basis`` inside C^ambient_dim."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim == 1:
            b = b[:, None]
        if b.shape[0] != self.ambient_dim:
            raise InvalidArgument(f"basis vectors must have length {self.ambient_dim}")
        if _rank(realify(b)) != b.shape[1]:
            raise InvalidArgument("basis vectors are not real-linearly independent")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def real_basis(self) -> np.ndarray:
        return realify(self.basis)

    @classmethod
    def from_real(cls, r: np.ndarray) -> "RealSubspace":
        return cls(r.shape[0] // 2, complexify(_orth(r)))


def _span_pair(h: RealSubspace) -> np.ndarray:
    r = h.real_basis()
    return np.concatenate([r, complex_structure(h.ambient_dim) @ r], axis=1)


def is_cyclic(h: RealSubspace, tol: float = RANK_TOL) -> bool:
    return _rank(_span_pair(h), tol) == 2 * h.ambient_dim


def is_separating(h: RealSubspace, tol: float = RANK_TOL) -> bool:
    return _rank(_span_pair(h), tol) == 2 * h.dim


def is_standard(h: RealSubspace, tol: float = RANK_TOL) -> bool:
    return is_cyclic(h, tol) and is_separating(h, tol)


def symplectic_complement(h: RealSubspace) -> RealSubspace:
    """(iH)^perp with respect to Re <.,.>."""
    ih = complex_structure(h.ambient_dim) @ h.real_basis()
    if ih.shape[1] == 0:
        comp = np.eye(2 * h.ambient_dim)
    else:
        comp = null_space(ih.T)
    return RealSubspace(h.ambient_dim, complexify(comp))


def subspace_distance(a: RealSubspace, b: RealSubspace) -> float:
    """Largest principal angle between the realified subspaces (inf if dims differ)."""
    if a.dim != b.dim:
        return float("inf")
    if a.dim == 0:
        return 0.0
    return float(np.max(subspace_angles(a.real_basis(), b.real_basis())))


@dataclass(frozen=True, eq=False)
class TomitaData:
    """S = J Delta^(1/2) with S = U diag(sigma) V^T, J = U V^T, Delta = V diag(sigma^2) V^T."""

    S: np.ndarray
    J: np.ndarray
    Delta: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    @property
    def delta_complex(self) -> np.ndarray:
        return complexify_operator(self.Delta)

    @property
    def delta_eigs(self) -> np.ndarray:
        """Complex spectrum of Delta (each realified eigenvalue appears twice)."""
        return np.sort(self.sigma**2)[::2]

    def delta_power(self, z: complex) -> np.ndarray:
        """Realified Delta^z; i acts as the complex structure on each eigenspace."""
        z = complex(z)
        log_s = np.log(self.sigma)
        mag = np.exp(2 * z.real * log_s)
        ph = 2 * z.imag * log_s
        v = self.V
        jc = complex_structure(v.shape[0] // 2)
        return (v * (mag * np.cos(ph))) @ v.T + (v * (mag * np.sin(ph))) @ v.T @ jc


def tomita(h: RealSubspace) -> TomitaData:
    if not is_standard(h):
        raise PreconditionViolation("tomita needs a standard subspace (cyclic and separating)")
    jc = complex_structure(h.ambient_dim)
    r = h.real_basis()
    # S fixes H and negates iH
    s = np.concatenate([r, -jc @ r], axis=1) @ np.linalg.inv(np.concatenate([r, jc @ r], axis=1))
    u, sig, vt = np.linalg.svd(s)
    j = u @ vt
    delta = (vt.T * sig**2) @ vt
    for m in (s, j, delta):
        m.setflags(write=False)
    return TomitaData(s, j, delta, sig, vt.T)


def real_adjoint(m: np.ndarray) -> np.ndarray:
    """Adjoint with respect to Re <.,.>, i.e. the transpose on the realification."""
    return np.asarray(m).T


def tomita_residuals(h: RealSubspace, data: TomitaData | None = None) -> dict[str, float]:
    data = data or tomita(h)
    d = h.ambient_dim
    jc = complex_structure(d)
    eye = np.eye(2 * d)
    r = h.real_basis()
    dinv = data.delta_power(-1)
    scale = float(np.max(data.sigma) ** 2)
    fixed = null_space(data.S - eye)
    out = {
        "S^2-1": float(np.linalg.norm(data.S @ data.S - eye, 2)),
        "J^2-1": float(np.linalg.norm(data.J @ data.J - eye, 2)),
        "J antiunitary": max(float(np.linalg.norm(data.J.T @ data.J - eye, 2)),
                             float(np.linalg.norm(data.J @ jc + jc @ data.J, 2))),
        "S-J*Delta^1/2": float(np.linalg.norm(data.S - data.J @ data.delta_power(0.5), 2)) / scale,
        # relative to ||Delta||, which grows as H approaches a non-standard subspace
        "J Delta J-Delta^-1": float(np.linalg.norm(data.J @ data.Delta @ data.J - dinv, 2)) / scale,
        "Delta complex-linear": float(np.linalg.norm(data.Delta @ jc - jc @ data.Delta, 2)) / scale,
        "S|H-1": float(np.linalg.norm(data.S @ r - r, 2)),
        "fixed space angle": float(np.max(subspace_angles(fixed, r))) if fixed.shape[1] == r.shape[1] else float("inf"),
    }
    # spectrum symmetric under lambda <-> 1/lambda
    ev = np.sort(data.sigma**2)
    out["spectrum inversion"] = float(np.max(np.abs(ev - np.sort(1.0 / ev)))) / scale
    return out


def complement_residuals(h: RealSubspace) -> dict[str, float]:
    hp = symplectic_complement(h)
    hpp = symplectic_complement(hp)
    th, thp = tomita(h), tomita(hp)
    jh = RealSubspace.from_real(th.J @ h.real_basis())
    return {
        "H''=H": subspace_distance(hpp, h),
        "S_H'-S_H^*": float(np.linalg.norm(thp.S - real_adjoint(th.S), 2)) / float(np.max(th.sigma)),
        "JH=H'": subspace_distance(jh, hp),
    }


def modular_flow_check(h: RealSubspace, t_samples=(0.3, 1.0, -2.0), data: TomitaData | None = None) -> dict[str, float]:
    data = data or tomita(h)
    out = {}
    for t in t_samples:
        moved = RealSubspace.from_real(data.delta_power(1j * t) @ h.real_basis())
        out[f"Delta^it H=H (t={t:g})"] = subspace_distance(moved, h)
    jh = RealSubspace.from_real(data.J @ h.real_basis())
    out["JH=H'"] = subspace_distance(jh, symplectic_complement(h))
    return out


def commuting_unitary_check(h: RealSubspace, u: np.ndarray) -> dict[str, float]:
    """Residuals of [U, Delta] and [U, J] for a unitary U with UH = H."""
    u = np.asarray(u, dtype=complex)
    d = h.ambient_dim
    if u.shape != (d, d):
        raise InvalidArgument(f"U must be {d} x {d}")
    if np.linalg.norm(u.conj().T @ u - np.eye(d), 2) > 1e-10:
        raise InvalidArgument("U is not unitary")
    moved = RealSubspace.from_real(realify(u @ h.basis))
    if subspace_distance(moved, h) > 1e-8:
        raise PreconditionViolation("U does not map H onto itself")
    data = tomita(h)
    ur = realify_operator(u)
    return {
        "[U,Delta]": float(np.linalg.norm(ur @ data.Delta - data.Delta @ ur, 2)) / float(np.max(data.sigma) ** 2),
        "[U,J]": float(np.linalg.norm(ur @ data.J - data.J @ ur, 2)),
    }


def direct_sum(a: RealSubspace, b: RealSubspace) -> RealSubspace:
    da, db = a.ambient_dim, b.ambient_dim
    top = np.concatenate([a.basis, np.zeros((da, b.dim))], axis=1)
    bot = np.concatenate([np.zeros((db, a.dim)), b.basis], axis=1)
    return RealSubspace(da + db, np.concatenate([top, bot], axis=0))


def standardness_margin(h: RealSubspace) -> float:
    """Smallest singular value of [H, iH] relative to the largest."""
    s = np.linalg.svd(_span_pair(h), compute_uv=False)
    return float(s[-1] / s[0]) if s.size else 0.0


def random_standard_subspace(d: int, rng: np.random.Generator, margin: float = 1e-6,
                             max_tries: int = 100) -> RealSubspace:
    """Real span of d random complex vectors, rejecting near-degenerate draws."""
    if d < 1:
        raise InvalidArgument("d must be positive")
    for _ in range(max_tries):
        b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        if _rank(realify(b)) != d:
            continue
        h = RealSubspace(d, b)
        if standardness_margin(h) >= margin and is_standard(h):
            return h
    raise RuntimeError("no standard subspace found; the margin is too strict")


@dataclass(frozen=True)
class EnsembleResult:
    trials: int
    worst: dict
    elapsed_s: float


def ensemble_check(trials: int = 100, seed: int = 0, dmax: int = 6,
                   t_samples=(0.3, 1.0, -2.0)) -> EnsembleResult:
    """Worst residual of every modular identity over seeded random subspaces."""
    import time

    rng = np.random.default_rng(seed)
    worst: dict[str, float] = {}
    t0 = time.perf_counter()
    for _ in range(trials):
        d = int(rng.integers(1, dmax + 1))
        h = random_standard_subspace(d, rng)
        data = tomita(h)
        res = {**tomita_residuals(h, data), **complement_residuals(h), **modular_flow_check(h, t_samples, data)}
        for key, val in res.items():
            worst[key] = max(worst.get(key, 0.0), val)
    return EnsembleResult(trials, worst, time.perf_counter() - t0)
