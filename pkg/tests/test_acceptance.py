"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import itertools
import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from helicity_lab import chiral_space as cs
from helicity_lab import euclid_branching as eb
from helicity_lab import helicity_onep as ho
from helicity_lab import mobius_rep as mr
from helicity_lab import modular_subspace as ms
from helicity_lab import so3_tensor as so3
from helicity_lab.config import DEFAULT_TOLERANCES as TOL

WEIGHTS = [Fraction(1), Fraction(2), Fraction(3), Fraction(5, 2)]
LN2 = math.log(2)


@pytest.fixture
def announce(capsys):
    def _announce(n, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
        assert ok, detail

    return _announce


def _packet(rng):
    return cs.TestFunction(rng.normal(size=5) + 1j * rng.normal(size=5), center=rng.normal(),
                           width=rng.uniform(0.6, 1.6), freq=rng.normal())


def test_criterion_01_sl2_relations(announce):
    worst, slowest = 0.0, 0.0
    for w in WEIGHTS:
        t0 = time.perf_counter()
        rep = mr.build_rep(w, 200)
        res = max(mr.commutator_residuals(rep).values())
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, res)
    ok = worst <= 1e-10 and slowest < 1.0
    announce(1, ok, f"worst commutator residual {worst:.2e}, slowest weight {slowest:.3f} s")


def test_criterion_02_inversion(announce):
    worst = max(mr.inversion_conjugation_residual(mr.build_rep(w, 200)) for w in WEIGHTS)
    announce(2, worst <= 1e-10, f"worst IPI-K / IDI+D residual {worst:.2e}")


def test_criterion_03_characters(announce):
    ok = True
    for w, beta in itertools.product(WEIGHTS, (0.5, LN2, 2.0)):
        partial, closed = mr.character(w, beta, 100)
        # oracle: plain geometric series summed term by term
        direct = sum(math.exp(-beta * (float(w) + m)) for m in range(100))
        gap = closed - partial
        ok &= abs(partial - direct) <= 1e-12 * direct
        ok &= -1e-13 <= gap <= mr.character_tail_bound(w, beta, 100) * (1 + 1e-9) + 1e-15
    _, unit = mr.character(1, LN2, 100)
    ok &= abs(unit - 1) <= 1e-12
    announce(3, ok, f"tail bounds respected; closed form at (1, ln 2) = {unit!r}")


def test_criterion_04_chiral_space(announce):
    gauss = cs.TestFunction([1.0])
    norm_err = abs(cs.inner_product(cs.make_space(1), gauss, gauss) - 0.5)
    rng = np.random.default_rng(0)
    iso = max(cs.derivative_isometry_check(n, _packet(rng), _packet(rng)) for n in (2, 3, 4) for _ in range(20))
    left = cs.TestFunction([1.0, 0.3], center=-10.0)
    right = cs.TestFunction([0.5, -1.0, 0.2], center=10.0)
    loc = max(abs(cs.symplectic_form(cs.make_space(n), left, right)) for n in (1, 2, 3))
    ok = norm_err <= 1e-10 and iso <= 1e-10 and loc <= 1e-12
    announce(4, ok, f"gauss norm error {norm_err:.1e}, isometry {iso:.1e}, locality {loc:.1e}")


def test_criterion_05_geometric_inversion(announce):
    sample = cs.LaurentGaussian([1.0], start=2, alpha=1.0, beta=0.5)
    good, bad = [], []
    for n in (1, 2):
        space = cs.make_space(n)
        good.append(cs.geometric_inversion_check(space, sample).k_residual)
        bad.append(cs.geometric_inversion_check(space, sample, cocycle_shift=2).k_residual)
    ok = max(good) <= 1e-5 and min(bad) >= 1e-2
    announce(5, ok, f"K = IPI residual {max(good):.1e}, wrong cocycle residual {min(bad):.1e}")


def test_criterion_06_so3_engine(announce):
    ranks = [so3.numerical_rank(so3.projector_matrix(r)) for r in range(7)]
    ok = ranks == [2 * r + 1 for r in range(7)]
    for a, b in itertools.product(range(9), repeat=2):
        s, k = Fraction(a, 2), Fraction(b, 2)
        # oracle: triangle rule |s-k| .. s+k
        lo = abs(s - k)
        tri = [lo + j for j in range(int(s + k - lo) + 1)]
        dec = so3.cg_decompose(s, k)
        ok &= sorted(dec) == tri and sum(2 * l + 1 for l in dec) == (2 * s + 1) * (2 * k + 1)
    fs = max(abs(so3.frobenius_schur_value(Fraction(t, 2)) - (-1) ** t) for t in range(13))
    ok &= fs <= 1e-10
    announce(6, ok, f"projector ranks {ranks}, Frobenius-Schur error {fs:.1e}")


def test_criterion_07_higher_maxwell(announce):
    rng = np.random.default_rng(7)
    worst = 0.0
    for h in (1, 2, 3):
        for _ in range(50):
            F = so3.build_field_strength(so3.random_stf(h, rng, True), so3.random_stf(h, rng, True))
            worst = max(worst, max(so3.verify_hmt_symmetries(F).values()), so3.double_epsilon_residual(F))
    announce(7, worst <= 1e-12, f"worst field-strength residual {worst:.1e}")


def test_criterion_08_decomposition(announce):
    g = ho.angular_gram(1, 3)
    dims = [ho.null_relation_map(1, k).quotient_dim for k in range(4)]
    # oracle: twice the numerical rank of the spin-(1+k) symmetric traceless projector
    want = [2 * so3.numerical_rank(so3.projector_matrix(1 + k)) for k in range(4)]
    ok = g.rank == 48 and g.gap >= 1e3 and dims == want == [2 * (2 * (1 + k) + 1) for k in range(4)]
    announce(8, ok, f"Gram rank {g.rank}, gap {g.gap:.1e}, quotient dims {dims}")


def test_criterion_09_quasiprimary(announce):
    dims, angles, stf = [], [], 0.0
    rng = np.random.default_rng(9)
    for k in (1, 2, 3):
        q = ho.quasiprimary_residual_map(1, k)
        dims.append(q.kernel_dim)
        angles.append(q.stf_angle)
        stf = max(stf, ho.quasiprimary_residual(k, so3.random_stf(k + 1, rng, True)))
    ok = dims == [2 * k + 3 for k in (1, 2, 3)] and max(angles) <= 1e-10 and stf <= 1e-10
    announce(9, ok, f"kernel dims {dims}, worst angle to STF image {max(angles):.1e}")


def _maxwell_modes(beta, cutoff):
    # oracle: sum over (k, m) of 2 (2(1+k)+1) e^{-beta (2+k+m)}
    return sum(2 * (2 * (1 + k) + 1) * math.exp(-beta * (2 + k + m))
               for k in range(cutoff + 1) for m in range(cutoff + 1))


def test_criterion_10_traces(announce):
    enum, closed = ho.helicity_trace(1, LN2, True, 200)
    single = ho.helicity_trace(1, LN2, False, 200)
    oracle = _maxwell_modes(LN2, 200)
    grid = np.linspace(0.3, 3.0, 21)
    series = max(abs(ho.trace_series_conformal(1, b) - ho.trace_series_maxwell(b)) for b in grid)
    ok = (abs(closed - 10) <= 1e-6 and abs(enum - 10) <= 1e-6 and abs(oracle - 10) <= 1e-6
          and all(abs(v - 5) <= 1e-6 for v in single) and series <= 1e-12)
    announce(10, ok, f"closed {closed:.12f}, enumerated {enum:.12f}, single {single[1]:.12f}, "
                     f"series gap {series:.1e}")


def test_criterion_11_fock(announce):
    rng = np.random.default_rng(11)
    spectra = [[0.5], [0.5, 1 / 3]] + [list(rng.uniform(0, 0.6, size=rng.integers(1, 5))) for _ in range(5)]
    worst = 0.0
    for spectrum in spectra:
        e, c = ho.fock_trace(spectrum, 40)
        worst = max(worst, abs(e - c) / c)
    # oracle for the two fixed spectra: brute force over occupation vectors
    brute = sum(0.5 ** a * (1 / 3) ** b for a in range(41) for b in range(41 - a))
    ok = worst <= 1e-6 and abs(brute - ho.fock_trace([0.5, 1 / 3], 40)[0]) <= 1e-12
    announce(11, ok, f"worst relative error {worst:.1e} over {len(spectra)} spectra")


def test_criterion_12_modular(announce):
    res = ms.ensemble_check(trials=100, seed=0, dmax=6)
    keys_mod = ["J Delta J-Delta^-1", "S_H'-S_H^*"]
    keys_sub = ["H''=H", "JH=H'"] + [k for k in res.worst if k.startswith("Delta^it")]
    ok = (all(res.worst[k] <= TOL.modular for k in keys_mod)
          and all(res.worst[k] <= TOL.subspace for k in keys_sub)
          and len(keys_sub) == 5 and res.elapsed_s < 30)
    worst = max(res.worst[k] for k in keys_mod + keys_sub)
    announce(12, ok, f"worst modular residual {worst:.1e} over 100 subspaces in {res.elapsed_s:.2f} s")


def test_criterion_13_branching(announce):
    ok = True
    for a in range(13):
        for b in range(-12, 13):
            if (a - b) % 2:
                continue
            l, h = Fraction(a, 2), Fraction(b, 2)
            ok &= eb.weight_count(l, h) == round(eb.character_integral(l, h)) == (1 if abs(h) <= l else 0)
    reps = [eb.consistency_with_conformal(h, 5) for h in (1, 2, 3)]
    ok &= all(r["spins_match"] and r["higher_helicity_subset"] for r in reps)
    announce(13, ok, "both multiplicity routes agree; conformal consistency and subset relation hold")


def test_criterion_14_all_quick(announce):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "helicity_lab", "all", "--quick"],
                          capture_output=True, text=True, timeout=300)
    elapsed = time.perf_counter() - t0
    announce(14, proc.returncode == 0 and elapsed < 60, f"exit {proc.returncode} in {elapsed:.1f} s")
