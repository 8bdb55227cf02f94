import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helicity_lab.errors import InvalidArgument
from helicity_lab.mobius_rep import (
    build_rep,
    character,
    character_tail_bound,
    commutator_residuals,
    expectation,
    inversion_conjugation_residual,
    ladder_norms_squared,
    positivity_probe,
)

WEIGHTS = [1, 2, 3, 2.5]


def test_l0_diagonal_weight_one():
    rep = build_rep(1, 12)
    assert np.array_equal(np.diag(rep.l0), np.arange(1, 13, dtype=float))


@pytest.mark.parametrize("weight", [0.5, 1, 2.5, 7])
def test_lowest_mode_annihilated(weight):
    rep = build_rep(weight, 20)
    assert np.all(rep.ladder_plus[:, 0] == 0)
    assert np.all(rep.ladder_plus @ np.eye(20)[:, 0] == 0)


@pytest.mark.parametrize("weight", [1, 2, 3, 2.5, Fraction(1, 3)])
def test_first_ladder_norm_from_bracket(weight):
    rep = build_rep(weight, 10)
    lo, up = rep.ladder_minus, rep.ladder_plus
    # oracle: <0|[L1, L-1]|0> = ||L-1|0>||^2 since L1|0> = 0
    bracket = (up @ lo - lo @ up)[0, 0]
    assert math.isclose(bracket, 2 * float(weight), rel_tol=1e-14)
    assert math.isclose(np.linalg.norm(lo[:, 0]) ** 2, 2 * float(weight), rel_tol=1e-14)


def test_ladder_norms_exact_rationals():
    norms = ladder_norms_squared(Fraction(5, 2), 5)
    assert norms == [Fraction(5), Fraction(12), Fraction(21), Fraction(32)]


@pytest.mark.parametrize("weight", WEIGHTS)
def test_structural_identities(weight):
    rep = build_rep(weight, 40)
    assert np.array_equal(rep.ladder_plus, rep.ladder_minus.T)
    assert np.array_equal(rep.l0, (rep.p_gen + rep.k_gen).real / 2)
    assert np.all(rep.ladder_minus >= 0)
    phases = np.exp(1j * np.pi * np.diag(rep.l0))
    assert np.allclose(np.diag(rep.inversion), phases, atol=1e-14)


@pytest.mark.parametrize("weight", [1, 2.5])
def test_commutators_tight_at_50(weight):
    res = commutator_residuals(build_rep(weight, 50))
    assert set(res) == {"[L0,L-1]-L-1", "[L0,L1]+L1", "[L1,L-1]-2L0"}
    assert max(res.values()) <= 1e-12


@pytest.mark.parametrize("weight", WEIGHTS)
def test_commutators_at_200(weight):
    t0 = time.perf_counter()
    res = commutator_residuals(build_rep(weight, 200))
    assert time.perf_counter() - t0 < 1.0
    assert max(res.values()) <= 1e-10


def test_commutator_detects_perturbation():
    rep = build_rep(2, 30)
    bad = rep.ladder_minus.copy()
    bad[6, 5] += 1e-3
    from dataclasses import replace

    broken = replace(rep, ladder_minus=bad, ladder_plus=bad.T)
    assert max(commutator_residuals(broken).values()) >= 1e-4


@pytest.mark.parametrize("weight", [1, 3, 2.5])
def test_inversion_conjugation(weight):
    assert inversion_conjugation_residual(build_rep(weight, 100)) <= 1e-10


@pytest.mark.parametrize("weight", [1, 2, 3])
def test_inversion_squares_to_identity(weight):
    inv = build_rep(weight, 64).inversion
    assert np.array_equal(inv @ inv, np.eye(64))


def test_inversion_residual_ignores_sign_of_d():
    # flipping D leaves both conjugation relations intact
    from dataclasses import replace

    rep = build_rep(2, 30)
    flipped = replace(rep, d_gen=-rep.d_gen)
    assert inversion_conjugation_residual(flipped) <= 1e-12


def test_character_values():
    _, c1 = character(1, math.log(2), 10)
    _, c2 = character(2, math.log(2), 10)
    assert abs(c1 - 1) <= 1e-12
    assert abs(c2 - 0.5) <= 1e-12
    partial, _ = character(1.7, 0.9, 1)
    assert partial == pytest.approx(math.exp(-0.9 * 1.7), rel=1e-15)


@pytest.mark.parametrize("beta", [0.5, math.log(2), 2.0])
@pytest.mark.parametrize("weight", WEIGHTS)
def test_character_tail(beta, weight):
    partial, closed = character(weight, beta, 100)
    gap = closed - partial
    assert -1e-13 <= gap <= character_tail_bound(weight, beta, 100) * (1 + 1e-9) + 1e-15


@given(st.floats(0.1, 5), st.floats(0.05, 3), st.integers(1, 60))
@settings(max_examples=60, deadline=None)
def test_character_partial_monotone(weight, beta, cutoff):
    a, closed = character(weight, beta, cutoff)
    b, _ = character(weight, beta, cutoff + 1)
    assert b >= a
    assert b <= closed * (1 + 1e-12)


def test_character_accepts_fraction():
    assert character(Fraction(5, 2), 0.5, 30) == character(2.5, 0.5, 30)


@pytest.mark.parametrize("beta", [0.0, -1.0])
def test_character_rejects_nonpositive_beta(beta):
    with pytest.raises(InvalidArgument):
        character(1, beta, 10)


@pytest.mark.parametrize("bad", [(0, 10), (-1, 10), (1, 1), (1, 0)])
def test_build_rep_errors(bad):
    with pytest.raises(InvalidArgument):
        build_rep(*bad)


def test_positivity():
    assert positivity_probe(build_rep(1, 200), 100) >= -1e-10


@pytest.mark.parametrize("weight", [1, 2.5, 4])
def test_lowest_mode_expectations(weight):
    rep = build_rep(weight, 16)
    e0 = np.eye(16)[:, 0]
    assert expectation(rep.p_gen, e0) == pytest.approx(weight, abs=1e-15)
    assert expectation(rep.k_gen, e0) == pytest.approx(weight, abs=1e-15)


@given(st.floats(0.05, 6), st.integers(4, 80))
@settings(max_examples=40, deadline=None)
def test_relations_property(weight, n):
    rep = build_rep(weight, n)
    scale = weight + n
    assert max(commutator_residuals(rep).values()) <= 1e-13 * scale**2
    assert inversion_conjugation_residual(rep) <= 1e-13 * scale**2
