"""Chiral current spaces H_n on the real line.

Test functions are Gaussian wave packets

    f(x) = exp(i kappa x) * sum_j c_j (x - c)^j * exp(-(x - c)^2 / (2 sigma^2))

which form a family closed under d/dx, multiplication by x, translations,
dilations and the Fourier transform.  The default packet (c=0, sigma=1,
kappa=0) is the plain polynomial x Gaussian family.

Conventions
-----------
* Fourier: ``fhat(p) = (2 pi)^(-1/2) int f(x) exp(-i p x) dx`` (unitary).
  With this sign the generator ``P = i d/dx`` acts as multiplication by ``-p``.
* Inner product: ``(f, g)_n = int_0^inf p^(2n-1) conj(fhat) ghat dp``.
* Symplectic form: ``Im (f, g)_n = ((-1)^n / 2) int f g^(2n-1) dx`` for real
  f, g (the sign follows from the two conventions above).
* Moebius action of ``g = [[a, b], [c, d]]``:
  ``(U(g) f)(x) = (c x + d)^(2(n-1)) f((a x + b)/(c x + d))``.  This is the
  cocycle that makes f -> f o g unitary; for the inversion ``x -> -1/x`` it
  reduces to ``x^(2(n-1)) f(-1/x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import hermite as _herm
from numpy.polynomial import polynomial as _poly

from .errors import InvalidArgument, PreconditionViolation
from .quadrature import half_line_rule


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


def _padded_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros(max(a.size, b.size), dtype=complex)
    out[: a.size] += a
    out[: b.size] += b
    return out


# --------------------------------------------------------------------------
# test-function families


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Polynomial x Gaussian wave packet (see module docstring)."""

    __test__ = False  # keep pytest from collecting this class

    coeffs: np.ndarray
    center: float = 0.0
    width: float = 1.0
    freq: float = 0.0

    def __post_init__(self):
        c = _trim(self.coeffs)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if not self.width > 0:
            raise InvalidArgument("width must be positive")
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "freq", float(self.freq))

    # -- constructors
    @classmethod
    def monomial(cls, j: int, scale: complex = 1.0, **packet) -> "TestFunction":
        c = np.zeros(j + 1, dtype=complex)
        c[j] = scale
        return cls(c, **packet)

    @classmethod
    def zero(cls, **packet) -> "TestFunction":
        return cls(np.zeros(1), **packet)

    # -- properties
    @property
    def degree(self) -> int:
        return int(self.coeffs.size - 1) if np.any(self.coeffs) else 0

    @property
    def is_real(self) -> bool:
        return self.freq == 0.0 and not np.any(self.coeffs.imag)

    def packet(self) -> tuple[float, float, float]:
        return (self.center, self.width, self.freq)

    def _same_packet(self, other: "TestFunction") -> None:
        if self.packet() != other.packet():
            raise InvalidArgument("packets with different center/width/frequency cannot be added")

    # -- evaluation
    def parts(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Return (polynomial part, complex exponent) so that f = poly * exp(expo)."""
        x = np.asarray(x, dtype=float)
        u = x - self.center
        poly = _poly.polyval(u, self.coeffs)
        expo = -(u * u) / (2 * self.width**2) + 1j * self.freq * x
        return poly, expo

    def __call__(self, x):
        poly, expo = self.parts(x)
        return poly * np.exp(expo)

    # -- linear structure
    def __add__(self, other: "TestFunction") -> "TestFunction":
        self._same_packet(other)
        return TestFunction(_padded_sum(self.coeffs, other.coeffs), *self.packet())

    def __sub__(self, other: "TestFunction") -> "TestFunction":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "TestFunction":
        return TestFunction(complex(scalar) * self.coeffs, *self.packet())

    def __neg__(self) -> "TestFunction":
        return (-1) * self

    # -- exact operations
    def deriv(self) -> "TestFunction":
        c = self.coeffs
        out = np.zeros(c.size + 1, dtype=complex)
        out[: c.size] += 1j * self.freq * c
        out[: c.size - 1] += _poly.polyder(c) if c.size > 1 else 0
        out[1:] -= c / self.width**2
        return TestFunction(out, *self.packet())

    def mul_x(self) -> "TestFunction":
        # x = (x - c) + c
        c = self.coeffs
        out = np.zeros(c.size + 1, dtype=complex)
        out[1:] += c
        out[: c.size] += self.center * c
        return TestFunction(out, *self.packet())

    def translate(self, s: float) -> "TestFunction":
        """x -> f(x + s)."""
        phase = np.exp(1j * self.freq * s)
        return TestFunction(phase * self.coeffs, self.center - s, self.width, self.freq)

    def dilate(self, lam: float) -> "TestFunction":
        """x -> f(lam x) for lam > 0."""
        if not lam > 0:
            raise InvalidArgument("dilation factor must be positive")
        powers = lam ** np.arange(self.coeffs.size)
        return TestFunction(self.coeffs * powers, self.center / lam, self.width / lam, self.freq * lam)

    def allclose(self, other: "TestFunction", atol: float = 0.0) -> bool:
        if self.packet() != other.packet():
            return False
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, complex)
        b = np.zeros(n, complex)
        a[: self.coeffs.size] = self.coeffs
        b[: other.coeffs.size] = other.coeffs
        return bool(np.all(np.abs(a - b) <= atol))


@lru_cache(maxsize=None)
def _fourier_polys(degree: int, sigma: float) -> tuple[np.ndarray, ...]:
    # FT of u^j exp(-u^2/(2 sigma^2)) equals r_j(q) exp(-sigma^2 q^2 / 2) with
    # r_0 = sigma and r_{j+1} = i (r_j' - sigma^2 q r_j).
    out = [np.array([sigma], dtype=complex)]
    for _ in range(degree):
        r = out[-1]
        nxt = np.zeros(r.size + 1, dtype=complex)
        if r.size > 1:
            nxt[: r.size - 1] += _poly.polyder(r)
        nxt[1:] -= sigma**2 * r
        out.append(1j * nxt)
    return tuple(out)


def fourier(f: TestFunction) -> TestFunction:
    """Exact unitary Fourier transform within the packet family.

    The image of a packet (c, sigma, kappa) is a packet centred at kappa, with
    width 1/sigma and frequency -c.
    """
    rs = _fourier_polys(f.coeffs.size - 1, f.width)
    acc = np.zeros(f.coeffs.size, dtype=complex)
    for cj, r in zip(f.coeffs, rs):
        if cj != 0:
            acc[: r.size] += cj * r
    phase = np.exp(1j * f.freq * f.center)
    return TestFunction(phase * acc, f.freq, 1.0 / f.width, -f.center)


@dataclass(frozen=True, eq=False)
class LaurentGaussian:
    """f(x) = sum_j c_j x^(j0 + j) exp(-alpha x^2 - beta / x^2).

    Closed under d/dx, multiplication by x and under the inversion
    x -> x^e f(-1/x) (which swaps alpha and beta).  Used as a diagnostic family
    for the inversion checks; beta > 0 makes every member flat at x = 0.
    """

    coeffs: np.ndarray
    start: int = 0
    alpha: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        nz = np.flatnonzero(c)
        start = int(self.start)
        if nz.size == 0:
            c = np.zeros(1, dtype=complex)
        else:
            c = c[nz[0] : nz[-1] + 1]
            start += int(nz[0])
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "start", start)
        if self.alpha < 0 or self.beta < 0:
            raise InvalidArgument("alpha and beta must be nonnegative")

    def _same(self, other: "LaurentGaussian") -> None:
        if (self.alpha, self.beta) != (other.alpha, other.beta):
            raise InvalidArgument("incompatible Gaussian exponents")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        ok = x != 0
        xs = x[ok]
        powers = self.start + np.arange(self.coeffs.size)
        vals = (self.coeffs[:, None] * xs[None, :] ** powers[:, None]).sum(axis=0)
        out[ok] = vals * np.exp(-self.alpha * xs**2 - self.beta / xs**2)
        if self.beta == 0 and np.any(~ok):
            out[~ok] = self.coeffs[-self.start] if 0 <= -self.start < self.coeffs.size else 0
        return out

    def _from_terms(self, terms: dict[int, complex], alpha=None, beta=None) -> "LaurentGaussian":
        if not terms:
            return LaurentGaussian(np.zeros(1), 0, self.alpha if alpha is None else alpha,
                                   self.beta if beta is None else beta)
        lo, hi = min(terms), max(terms)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for k, v in terms.items():
            c[k - lo] += v
        return LaurentGaussian(c, lo, self.alpha if alpha is None else alpha,
                               self.beta if beta is None else beta)

    def _terms(self) -> dict[int, complex]:
        return {self.start + i: v for i, v in enumerate(self.coeffs) if v != 0}

    def __add__(self, other: "LaurentGaussian") -> "LaurentGaussian":
        self._same(other)
        t = self._terms()
        for k, v in other._terms().items():
            t[k] = t.get(k, 0) + v
        return self._from_terms(t)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar) -> "LaurentGaussian":
        return LaurentGaussian(complex(scalar) * self.coeffs, self.start, self.alpha, self.beta)

    def __neg__(self):
        return (-1) * self

    def deriv(self) -> "LaurentGaussian":
        t: dict[int, complex] = {}
        for j, v in self._terms().items():
            for k, w in ((j - 1, j * v), (j + 1, -2 * self.alpha * v), (j - 3, 2 * self.beta * v)):
                if w != 0:
                    t[k] = t.get(k, 0) + w
        return self._from_terms(t)

    def mul_x(self) -> "LaurentGaussian":
        return LaurentGaussian(self.coeffs, self.start + 1, self.alpha, self.beta)

    def inverted(self, exponent: int) -> "LaurentGaussian":
        """x -> x^exponent * f(-1/x), exactly."""
        t = {exponent - j: v * (-1) ** (j % 2) for j, v in self._terms().items()}
        return self._from_terms(t, alpha=self.beta, beta=self.alpha)

    def allclose(self, other: "LaurentGaussian", atol: float = 0.0) -> bool:
        if (self.alpha, self.beta) != (other.alpha, other.beta):
            return False
        a, b = self._terms(), other._terms()
        return all(abs(a.get(k, 0) - b.get(k, 0)) <= atol for k in set(a) | set(b))


# --------------------------------------------------------------------------
# the weighted space


@dataclass(frozen=True, eq=False)
class WeightedSpace:
    """H_n together with its Gauss rule for p^(2n-1) exp(-p^2) on [0, inf)."""

    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def node_count(self) -> int:
        return int(self.nodes.size)


def make_space(n: int, nodes: int = 64) -> WeightedSpace:
    if int(n) != n or n < 1:
        raise InvalidArgument(f"conformal dimension must be a positive integer, got {n}")
    x, w = half_line_rule(int(n), int(nodes))
    return WeightedSpace(int(n), x, w)


def _quadrature_integrand(space: WeightedSpace, fh: TestFunction, gh: TestFunction):
    # rescale p = u / tau so the two Gaussians combine exactly into exp(-u^2)
    a_f = 1.0 / fh.width**2
    a_g = 1.0 / gh.width**2
    tau2 = (a_f + a_g) / 2
    tau = math.sqrt(tau2)
    p = space.nodes / tau
    poly = np.conj(_poly.polyval(p - fh.center, fh.coeffs)) * _poly.polyval(p - gh.center, gh.coeffs)
    lin = fh.center * a_f + gh.center * a_g
    const = (fh.center**2 * a_f + gh.center**2 * a_g) / 2
    expo = (p * lin - const) + 1j * ((gh.freq - fh.freq) * p)
    return poly * np.exp(expo), tau ** (-2 * space.n)


def _order_key(f: TestFunction) -> tuple:
    return (f.packet(), f.coeffs.size, f.coeffs.tobytes())


def inner_product(space: WeightedSpace, f: TestFunction, g: TestFunction) -> complex:
    """(f, g)_n evaluated with the stored Gauss rule.

    The pair is evaluated in a canonical order and conjugated if swapped, so
    (f, g) == conj((g, f)) holds bitwise.
    """
    kf, kg = _order_key(f), _order_key(g)
    if kg < kf:
        return inner_product(space, g, f).conjugate()
    vals, scale = _quadrature_integrand(space, fourier(f), fourier(g))
    out = complex(scale * np.sum(space.weights * vals))
    return complex(out.real, 0.0) if kf == kg else out


def norm(space: WeightedSpace, f: TestFunction) -> float:
    return math.sqrt(max(inner_product(space, f, f).real, 0.0))


def symplectic_form(space: WeightedSpace, f: TestFunction, g: TestFunction) -> float:
    """Im (f, g)_n for real test functions."""
    if not (f.is_real and g.is_real):
        raise InvalidArgument("the symplectic form is defined on real test functions")
    return inner_product(space, f, g).imag


def _gaussian_product_integral(f: TestFunction, g: TestFunction) -> complex:
    # int f(x) g(x) dx for real packets (freq = 0) by Gauss-Hermite, exact
    a_f = 1 / (2 * f.width**2)
    a_g = 1 / (2 * g.width**2)
    a = a_f + a_g
    m = (a_f * f.center + a_g * g.center) / a
    const = -a_f * a_g / a * (f.center - g.center) ** 2
    deg = f.coeffs.size + g.coeffs.size
    t, w = _herm.hermgauss(deg // 2 + 2)
    x = m + t / math.sqrt(a)
    vals = _poly.polyval(x - f.center, f.coeffs) * _poly.polyval(x - g.center, g.coeffs)
    return complex(math.exp(const) / math.sqrt(a) * np.sum(w * vals))


def symplectic_form_position(n: int, f: TestFunction, g: TestFunction) -> float:
    """Position-space value ((-1)^n / 2) int f g^(2n-1) dx (exact quadrature)."""
    if not (f.is_real and g.is_real):
        raise InvalidArgument("the symplectic form is defined on real test functions")
    dg = g
    for _ in range(2 * n - 1):
        dg = dg.deriv()
    return (-1) ** n / 2 * _gaussian_product_integral(f, dg).real


def apply_generator(space: WeightedSpace, which: str, f):
    """Exact action of P, D or K (works on both test-function families)."""
    m = space.n - 1
    df = f.deriv()
    if which == "P":
        return 1j * df
    if which == "D":
        return 1j * (df.mul_x() - m * f)
    if which == "K":
        return 1j * (df.mul_x().mul_x() - (2 * m) * f.mul_x())
    raise InvalidArgument(f"unknown generator {which!r}; expected P, D or K")


# --------------------------------------------------------------------------
# grids and the Moebius action


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """Sample points with integration weights for int (.) dx."""

    x: np.ndarray
    weights: np.ndarray


def uniform_grid(half_width: float = 12.0, step: float = 0.01) -> SampleGrid:
    k = int(round(half_width / step))
    x = step * np.arange(-k, k + 1)
    w = np.full(x.shape, step)
    return SampleGrid(x, w)


def geometric_grid(span: float = 40.0, step: float = 0.005) -> SampleGrid:
    """Points +-exp(t), |t| <= log(span), on a t-grid symmetric about 0.

    The point set is invariant under x -> -1/x.  Samples are ordered as the
    negative branch followed by the positive branch, both in increasing t.
    """
    if span <= 1 or step <= 0:
        raise InvalidArgument("need span > 1 and step > 0")
    half = int(math.ceil(math.log(span) / step))
    t = step * np.arange(-half, half + 1)
    xp = np.exp(t)
    x = np.concatenate([-xp, xp])
    w = np.concatenate([step * xp, step * xp])
    return SampleGrid(x, w)


@dataclass(frozen=True, eq=False)
class MobiusImage:
    x: np.ndarray
    values: np.ndarray
    excluded: np.ndarray
    exact: TestFunction | None


def _check_group_element(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.shape != (2, 2) or not np.all(np.isfinite(g)):
        raise InvalidArgument("group element must be a finite real 2x2 matrix")
    if abs(np.linalg.det(g) - 1) > 1e-12:
        raise InvalidArgument(f"group element must have determinant 1, got {np.linalg.det(g)}")
    return g


def apply_mobius(space: WeightedSpace, group_element, f: TestFunction,
                 grid: SampleGrid | None = None, singular_tol: float = 1e-9) -> MobiusImage:
    """Grid samples of (U(g) f)(x) = (cx+d)^(2(n-1)) f((ax+b)/(cx+d)).

    Points with |cx+d| <= singular_tol are dropped and returned in ``excluded``.
    For c == 0 (translations and dilations, possibly with a = -1) the exact
    packet representative is returned as well.
    """
    (a, b), (c, d) = _check_group_element(group_element)
    if grid is None:
        grid = uniform_grid()
    x = grid.x
    den = c * x + d
    bad = np.abs(den) <= singular_tol
    xs, den = x[~bad], den[~bad]
    m = space.n - 1
    values = den ** (2 * m) * f((a * xs + b) / den)
    exact = None
    if c == 0:
        # (a x + b) / d = lam x + s with lam = a^2, s = a b; U f = d^(2m) f(lam x + s)
        lam, s = a * a, a * b
        exact = (d ** (2 * m)) * f.dilate(lam).translate(s / lam)
    return MobiusImage(xs, values, x[bad], exact)


def _panel_rule(pmax: float, panel: float = 1.0, order: int = 16):
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.arange(0.0, pmax + 1e-12, panel)
    if edges[-1] < pmax:
        edges = np.append(edges, pmax)
    lo, hi = edges[:-1], edges[1:]
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    p = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    wp = (half[:, None] * w[None, :]).ravel()
    return p, wp


def grid_fourier(grid: SampleGrid, values, p) -> np.ndarray:
    kernel = np.exp(-1j * np.outer(p, grid.x))
    return kernel @ (grid.weights * np.asarray(values)) / math.sqrt(2 * math.pi)


def _grid_integrand(n, grid, fvals, gvals, pmax):
    p, wp = _panel_rule(pmax)
    fh = grid_fourier(grid, fvals, p)
    gh = grid_fourier(grid, gvals, p)
    return p, wp * p ** (2 * n - 1) * np.conj(fh) * gh


def grid_inner_product(n: int, grid: SampleGrid, fvals, gvals, pmax: float = 40.0) -> complex:
    """(f, g)_n from samples: quadrature Fourier transform then p-integration."""
    _, terms = _grid_integrand(n, grid, fvals, gvals, pmax)
    return complex(np.sum(terms))


def _grid_norm_sq(n, grid, vals, pmax) -> tuple[float, float]:
    # squared norm and the fraction of it carried by p > 0.75 pmax
    p, terms = _grid_integrand(n, grid, vals, vals, pmax)
    total = float(np.sum(terms).real)
    tail = float(np.sum(terms[p > 0.75 * pmax]).real)
    return total, abs(tail) / total if total > 0 else float("inf")


# --------------------------------------------------------------------------
# checks


def derivative_isometry_check(n: int, f: TestFunction, g: TestFunction, nodes: int = 64) -> float:
    """|(f, g)_n - (f', g')_{n-1}|."""
    if int(n) != n or n < 2:
        raise InvalidArgument("derivative isometry needs n >= 2")
    hi, lo = make_space(n, nodes), make_space(n - 1, nodes)
    return abs(inner_product(hi, f, g) - inner_product(lo, f.deriv(), g.deriv()))


@dataclass(frozen=True)
class InversionReport:
    n: int
    cocycle_exponent: int
    norm_residual: float
    k_residual: float
    involution_residual: float
    grid_points: int
    spectral_tail: float


_FD_STENCIL = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])


def _dt(values: np.ndarray, step: float) -> np.ndarray:
    # 8th-order central differences along the last axis; 4 edge points left as nan
    out = np.full(values.shape, np.nan, dtype=complex)
    half = len(_FD_STENCIL) // 2
    acc = np.zeros(values.shape[:-1] + (values.shape[-1] - 2 * half,), dtype=complex)
    for k, c in enumerate(_FD_STENCIL):
        if c:
            acc += c * values[..., k : values.shape[-1] - 2 * half + k]
    out[..., half:-half] = acc / step
    return out


def geometric_inversion_check(space: WeightedSpace, f, span: float = 40.0, step: float = 0.005,
                              cocycle_shift: int = 0, decay_tol: float = 1e-9,
                              pmax: float = 60.0) -> InversionReport:
    """Check the inversion (If)(x) = x^(2(n-1)) f(-1/x) on a geometric grid.

    Reports
    * ``norm_residual``: | ||If||_n - ||f||_n | / ||f||_n (grid quadrature),
    * ``k_residual``: max |Kf - I P I f| / max |Kf| with K exact and P by
      finite differences,
    * ``involution_residual``: max |I I f - f| / max |f|,
    * ``spectral_tail``: share of the squared norms found at p > 0.75 pmax;
      a value that is not small means pmax is too low for the norm check.

    ``cocycle_shift`` adds to the exponent 2(n-1), for negative controls.
    ``f`` must provide ``__call__`` and ``deriv``/``mul_x`` (either family).
    """
    e = 2 * (space.n - 1) + int(cocycle_shift)
    grid = geometric_grid(span, step)
    k = grid.x.size // 2
    x = grid.x.reshape(2, k)

    def invert(v):
        # the point -1/x of (branch, index) sits at (other branch, mirrored index)
        return x**e * v[::-1, ::-1]

    fv = np.asarray(f(x.ravel()), dtype=complex).reshape(2, k)
    iv = invert(fv)
    scale = np.max(np.abs(fv))
    if scale == 0:
        raise PreconditionViolation("test function vanishes on the grid")
    ends = np.concatenate([fv[:, :5].ravel(), fv[:, -5:].ravel(), iv[:, :5].ravel(), iv[:, -5:].ravel()])
    edge = float(np.max(np.abs(ends)) / scale)
    if edge > decay_tol:
        raise PreconditionViolation(
            f"insufficient decay: |f| or |If| reaches {edge:.3e} of its maximum at the grid ends "
            f"(|x| = {1 / span:g} or {span:g}); tolerance {decay_tol:g}. "
            "Use a function flat at 0 and decaying at infinity, or a wider span."
        )

    n = space.n
    nf, tail_f = _grid_norm_sq(n, grid, fv.ravel(), pmax)
    ni, tail_i = _grid_norm_sq(n, grid, iv.ravel(), pmax)
    norm_res = abs(math.sqrt(max(ni, 0)) - math.sqrt(max(nf, 0))) / math.sqrt(nf)

    piv = 1j * _dt(iv, step) / x
    ipiv = invert(piv)
    kv = np.asarray(apply_generator(space, "K", f)(x.ravel()), dtype=complex).reshape(2, k)
    inner = slice(4, k - 4)
    k_res = float(np.max(np.abs(ipiv[:, inner] - kv[:, inner])) / np.max(np.abs(kv[:, inner])))
    inv_res = float(np.max(np.abs(invert(iv) - fv)) / scale)
    return InversionReport(n, e, float(norm_res), k_res, inv_res, int(grid.x.size), max(tail_f, tail_i))


def null_pairing(space: WeightedSpace, degree: int, g: TestFunction, eps: float) -> complex:
    """(x^degree exp(-eps^2 x^2 / 2), g)_n: smooth cutoff of a monomial.

    For degree <= 2n-2 this tends to 0 like eps^(2n-1-degree) as eps -> 0,
    which is the finite stand-in for polynomials lying in the null space.
    """
    phi = TestFunction.monomial(degree, width=1.0 / eps)
    return inner_product(space, phi, g)
