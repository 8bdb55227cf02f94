import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helicity_lab.errors import InvalidArgument, PreconditionViolation
from helicity_lab.helicity_onep import (
    RestrictedTestElement,
    angular_gram,
    decomposition_table,
    expected_quotient_dim,
    fock_trace,
    helicity_trace,
    helicity_trace_closed,
    helicity_trace_tail,
    l0_multiplicity,
    maxwell_momentum_form,
    null_relation_map,
    pairing_residual,
    quasiprimary_residual,
    quasiprimary_residual_map,
    raw_relation_momentum,
    temporal_profile,
    trace_series_conformal,
    trace_series_maxwell,
)
from helicity_lab.so3_tensor import EPS, random_stf

LN2 = math.log(2)


def unit_element(k, slot, idx):
    shape = (3,) * (1 + k)
    e, b = np.zeros(shape), np.zeros(shape)
    (e if slot == 0 else b)[idx] = 1.0
    return RestrictedTestElement(1, k, e, b)


# -- null relations


@pytest.mark.parametrize("h,k", [(h, k) for h in (1, 2, 3) for k in range(4)])
def test_quotient_dims(h, k):
    assert null_relation_map(h, k).quotient_dim == expected_quotient_dim(h, k) == 2 * (2 * (h + k) + 1)


def test_level_zero_has_no_relations():
    rel = null_relation_map(2, 0)
    assert rel.matrix.shape[1] == 0
    assert rel.quotient_dim == 10


def test_pure_trace_is_a_relation():
    # coefficient delta_{ba} in the E slot is the divergence relation
    rel = null_relation_map(1, 1)
    v = np.concatenate([np.eye(3).ravel(), np.zeros(9)])
    assert rel.in_span(v)
    assert not rel.in_span(np.concatenate([np.zeros(9), (np.eye(3)[0][:, None] * np.eye(3)[1]).ravel()]))


def explicit_form(p, e1, b1, e2, b2):
    # oracle: build f^{mu nu} explicitly, contract with the Minkowski metric
    p0 = np.linalg.norm(p)
    pl = np.array([p0, *(-p)])

    def f(e, b):
        m = np.zeros((4, 4), complex)
        m[0, 1:], m[1:, 0] = e / 2, -e / 2
        m[1:, 1:] = -0.5 * np.einsum("cjk,c->jk", EPS, b)
        return m

    eta = np.diag([1.0, -1, -1, -1])
    F, G = f(e1, b1), f(e2, b2)
    return np.einsum("m,t,ns,mn,st->", pl, pl, eta, F.conj(), G)


def test_momentum_form_matches_explicit_contraction():
    rng = np.random.default_rng(3)
    for _ in range(5):
        p = rng.normal(size=3)
        e1, b1, e2, b2 = (rng.normal(size=3) + 1j * rng.normal(size=3) for _ in range(4))
        got = maxwell_momentum_form(p, RestrictedTestElement(1, 0, e1, b1), RestrictedTestElement(1, 0, e2, b2))
        want = explicit_form(p, e1, b1, e2, b2) * np.exp(-np.dot(p, p)) / math.sqrt(math.pi)
        assert abs(got - want) <= 1e-12 * max(1, abs(want))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_momentum_form_positive(seed):
    rng = np.random.default_rng(seed)
    p = rng.normal(size=3)
    f = RestrictedTestElement(1, 0, rng.normal(size=3) + 1j * rng.normal(size=3), rng.normal(size=3))
    val = maxwell_momentum_form(p, f, f)
    assert val.real >= -1e-12 and abs(val.imag) <= 1e-12


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("kind", ["delta", "eps"])
@pytest.mark.parametrize("slot", [0, 1])
def test_relations_are_null(k, kind, slot):
    rng = np.random.default_rng(100 * k + slot)
    shape = (3,) * (k - 1 if kind == "delta" else k)
    for _ in range(5):
        p = rng.normal(size=3)
        g = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        e, b = raw_relation_momentum(p, 1, k, kind, slot, g)
        assert pairing_residual(p, e, b) <= 1e-13 * (1 + np.linalg.norm(p)) ** (k + 2)


def test_eps_relation_k1_by_hand():
    # (eps grad g, 0) against (0, -d_t g) with grad -> i p and d_t -> -i p0
    rng = np.random.default_rng(7)
    p, g = rng.normal(size=3), rng.normal(size=3)
    p0 = np.linalg.norm(p)
    e = np.einsum("abc,a,c->b", EPS, 1j * p, g)
    lhs_vs_rhs = (e, -1j * p0 * g)  # (e, 0) - (0, -d_t g) = (e, d_t g)
    rng2 = np.random.default_rng(8)
    x = (rng2.normal(size=3), rng2.normal(size=3))
    assert abs(explicit_form(p, *x, *lhs_vs_rhs)) <= 1e-13
    # the opposite orientation of B breaks it
    assert abs(explicit_form(p, *x, e, -lhs_vs_rhs[1])) > 1e-3


def test_longitudinal_electric_is_null():
    rng = np.random.default_rng(12)
    p = rng.normal(size=3)
    f = RestrictedTestElement(1, 0, p / np.linalg.norm(p), np.zeros(3))
    g = RestrictedTestElement(1, 0, rng.normal(size=3), rng.normal(size=3))
    assert abs(maxwell_momentum_form(p, f, f)) <= 1e-15
    assert abs(maxwell_momentum_form(p, f, g)) <= 1e-15


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    return q if np.linalg.det(q) > 0 else -q


@pytest.mark.parametrize("k", [0, 1, 2])
def test_momentum_form_rotation_invariant(k):
    rng = np.random.default_rng(20 + k)
    rot = random_rotation(rng)
    p = rng.normal(size=3)
    # level-k coefficients: STF in b (rank 1) times STF in the a's (rank k)
    tens = [np.multiply.outer(random_stf(1, rng, True), random_stf(k, rng, True) if k else 1.0) for _ in range(4)]

    def rotate(t):
        for ax in range(t.ndim):
            t = np.moveaxis(np.tensordot(rot, t, axes=([1], [ax])), 0, ax)
        return t

    f = RestrictedTestElement(1, k, tens[0], tens[1])
    g = RestrictedTestElement(1, k, tens[2], tens[3])
    fr = RestrictedTestElement(1, k, rotate(tens[0]), rotate(tens[1]))
    gr = RestrictedTestElement(1, k, rotate(tens[2]), rotate(tens[3]))
    a = maxwell_momentum_form(p, f, g)
    b = maxwell_momentum_form(rot @ p, fr, gr)
    assert abs(a - b) <= 1e-12 * max(1, abs(a))


def test_delta_times_anything_in_span_h2():
    rng = np.random.default_rng(4)
    from helicity_lab.helicity_onep import _delta_generator, coefficient_projector

    g = rng.normal(size=(3, 3))
    gen = _delta_generator(2, 2, g).ravel()
    v = coefficient_projector(2, 2) @ np.concatenate([gen, np.zeros(81)])
    assert np.linalg.norm(v) > 1e-3
    assert null_relation_map(2, 2).in_span(v)


def test_wrong_relation_sign_is_not_null():
    rng = np.random.default_rng(9)
    p, g = rng.normal(size=3), rng.normal(size=3)
    e, b = raw_relation_momentum(p, 1, 1, "eps", 0, g)
    assert pairing_residual(p, e, -b) > 1e-3


# -- Gram matrices


def test_gram_level_zero_oracle():
    # int_S2 (e.e' - (n.e)(n.e'))/4 = (2 pi / 3) e.e', and E, B decouple
    rep = angular_gram(1, 0, 1.0)
    assert np.allclose(rep.eigenvalues, 2 * math.pi / 3, atol=1e-13)


@pytest.mark.parametrize("kmax,rank", [(0, 6), (1, 16), (2, 30), (3, 48)])
def test_gram_rank_h1(kmax, rank):
    rep = angular_gram(1, kmax, 1.0)
    assert rep.rank == rank == rep.expected_rank
    assert rep.conclusive and rep.gap >= 1e3
    assert rep.passed


def test_gram_rank_stable_in_p0_and_profile():
    for kw in ({"p0": 2.0}, {"p0": 0.5}, {"temporal_mode": 2}, {"degree_normalized": False}):
        rep = angular_gram(1, 3, **{"p0": 1.0, **kw})
        assert rep.rank == 48 and rep.gap >= 1e3


def test_gram_scales_as_p0_squared():
    a = angular_gram(1, 3, 1.0).eigenvalues[:48]
    b = angular_gram(1, 3, 1.7).eigenvalues[:48]
    assert np.max(np.abs(b / a - 1.7**2)) <= 1e-10


@pytest.mark.parametrize("h,kmax", [(1, 2), (2, 2), (3, 1)])
def test_gram_quotient_route(h, kmax):
    rep = angular_gram(h, kmax, 1.0, route="quotient")
    assert rep.rank == sum(expected_quotient_dim(h, k) for k in range(kmax + 1))
    assert rep.conclusive


def test_gram_refuses_low_order():
    with pytest.raises(PreconditionViolation, match="need order >= 5"):
        angular_gram(1, 3, 1.0, order=3)


def test_gram_bad_args():
    with pytest.raises(InvalidArgument):
        angular_gram(1, 1, -1.0)
    with pytest.raises(InvalidArgument):
        angular_gram(2, 1, route="maxwell")
    with pytest.raises(InvalidArgument):
        maxwell_momentum_form(np.ones(3), *(RestrictedTestElement(2, 0, np.zeros((3, 3)), np.zeros((3, 3))),) * 2)


# -- quasiprimaries


@pytest.mark.parametrize("k", [1, 2, 3])
def test_quasiprimary_kernel(k):
    rep = quasiprimary_residual_map(1, k)
    assert rep.kernel_dim == 2 * k + 3
    assert rep.stf_angle <= 1e-10
    assert rep.real_multiplets == 2


@pytest.mark.parametrize("k", [1, 2, 3])
def test_stf_tensors_have_zero_residual(k):
    rng = np.random.default_rng(k)
    t = random_stf(k + 1, rng, True)
    assert quasiprimary_residual(k, t) <= 1e-12


def test_antisymmetric_part_has_residual():
    # J_{a b} = eps_{abc} v_c survives the domain constraints at k = 1
    t = np.einsum("abc,c->ab", EPS, np.array([1.0, 2.0, -0.5]))
    assert quasiprimary_residual(1, t) > 1


def test_quasiprimary_domain_dims():
    # symmetric in a's (3 C(k+2,2)) minus one symmetric rank-(k-1) trace (C(k+1,2))
    for k in (1, 2, 3):
        rep = quasiprimary_residual_map(1, k)
        assert rep.domain_basis.shape[1] == 3 * math.comb(k + 2, 2) - math.comb(k + 1, 2)


def test_quasiprimary_rejects_h2():
    with pytest.raises(InvalidArgument):
        quasiprimary_residual_map(2, 1)


# -- decomposition and traces


def test_decomposition_table():
    t = decomposition_table(1, 3)
    assert t.rows == ((2, 1, 2), (3, 2, 2), (4, 3, 2), (5, 4, 2))
    assert l0_multiplicity(t, 1) == 0
    assert l0_multiplicity(t, 2) == 6
    assert l0_multiplicity(t, 3) == 6 + 10
    assert decomposition_table(2, 0, False).rows == ((3, 2, 1),)


@pytest.mark.parametrize("h", [1, 2, 3])
def test_lowest_l0_multiplicity_by_enumeration(h):
    # only the k = 0 row contributes at L0 = h + 1
    t = decomposition_table(h, 4)
    assert l0_multiplicity(t, h + 1) == 2 * (2 * h + 1)
    z = 1e-3
    enum, _ = helicity_trace(h, -math.log(z), True, cutoff=4)
    assert enum / z ** (h + 1) == pytest.approx(2 * (2 * h + 1), rel=1e-2)


def test_maxwell_trace_values():
    enum, closed = helicity_trace(1, LN2, True, cutoff=200)
    assert abs(closed - 10) <= 1e-6 and abs(enum - 10) <= 1e-6
    enum, closed = helicity_trace(1, LN2, False, cutoff=200)
    assert abs(closed - 5) <= 1e-6 and abs(enum - 5) <= 1e-6


@pytest.mark.parametrize("h", [1, 2, 3])
@pytest.mark.parametrize("beta", [0.4, LN2, 2.5])
def test_trace_tail_bound(h, beta):
    enum, closed = helicity_trace(h, beta, True, cutoff=60)
    assert -1e-12 * closed <= closed - enum <= helicity_trace_tail(h, beta, True, 60) + 1e-12 * closed


@pytest.mark.parametrize("beta", np.linspace(0.3, 3, 21))
def test_two_series_agree(beta):
    a = trace_series_conformal(1, beta)
    b = trace_series_maxwell(beta)
    assert abs(a - b) <= 1e-12 * a
    assert abs(a - helicity_trace_closed(1, beta)) <= 1e-12 * a


@given(st.integers(1, 5), st.floats(0.2, 4))
@settings(max_examples=40, deadline=None)
def test_closed_form_vs_direct_sum(h, beta):
    closed = helicity_trace_closed(h, beta, False)
    direct = trace_series_conformal(h, beta, False)
    assert abs(closed - direct) <= 1e-12 * closed


def test_trace_rejects_beta():
    with pytest.raises(InvalidArgument):
        helicity_trace(1, 0.0)


def brute_fock(spectrum, cutoff):
    total = 0.0
    for occ in itertools.product(range(cutoff + 1), repeat=len(spectrum)):
        if sum(occ) <= cutoff:
            total += math.prod(a**n for a, n in zip(spectrum, occ))
    return total


@pytest.mark.parametrize("spectrum", [[0.5], [0.5, 1 / 3], [0.2, 0.45, 0.6]])
def test_fock_enumeration_oracle(spectrum):
    got, closed = fock_trace(spectrum, 25)
    assert got == pytest.approx(brute_fock(spectrum, 25), rel=1e-13)
    assert closed == pytest.approx(math.prod(1 / (1 - a) for a in spectrum), rel=1e-15)


def test_fock_empty_and_monotone():
    assert fock_trace([], 5) == (1.0, 1.0)
    vals = [fock_trace([0.5, 0.3], c)[0] for c in range(0, 30, 3)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] <= fock_trace([0.5, 0.3], 1)[1]


def test_fock_converges():
    rng = np.random.default_rng(11)
    for _ in range(5):
        spectrum = rng.uniform(0, 0.6, size=rng.integers(1, 6))
        got, closed = fock_trace(spectrum, 40)
        assert abs(got - closed) <= 1e-6 * closed


@pytest.mark.parametrize("bad", [[1.0], [0.3, 1.2], [-0.1]])
def test_fock_rejects_divergent(bad):
    with pytest.raises(InvalidArgument):
        fock_trace(bad, 10)


# -- elements and profiles


def test_element_validation():
    # a trace among the a's is not admissible
    bad = np.einsum("b,ij->bij", np.array([1.0, 0, 0]), np.eye(3))
    with pytest.raises(InvalidArgument):
        RestrictedTestElement(1, 2, bad, np.zeros((3, 3, 3)))
    # a (b, a) trace is admissible; it is a null relation, not a constraint
    RestrictedTestElement(1, 1, np.eye(3), np.zeros((3, 3)))
    with pytest.raises(InvalidArgument):
        RestrictedTestElement(1, 0, np.zeros(4), np.zeros(3))
    e = unit_element(0, 1, 2)
    assert e.vector()[5] == 1


def test_temporal_profiles_orthonormal():
    t = np.linspace(-15, 15, 6001)
    prof = np.array([temporal_profile(m, t) for m in range(5)])
    gram = np.trapezoid(prof[:, None] * prof[None], t, axis=-1)
    assert np.allclose(gram, np.eye(5), atol=1e-10)
