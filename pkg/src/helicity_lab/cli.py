"""Command-line driver: ``helicity-lab <subcommand> [flags]``.

Exit status: 0 when every check passes, 1 when a check fails (the report is
still written), 2 for usage errors.  The thread count for suites run by
``all`` comes from the HELICITY_LAB_THREADS environment variable.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import chiral_space as cs
from . import euclid_branching as eb
from . import helicity_onep as ho
from . import mobius_rep as mr
from . import modular_subspace as ms
from . import so3_tensor as so3
from .config import DEFAULT_TOLERANCES, Tolerances, thread_count
from .errors import InvalidArgument, PreconditionViolation
from .report import RunReport, Table


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return v


# --------------------------------------------------------------------------
# suites


def suite_mobius(weight, truncation: int, tol: Tolerances, beta: float = math.log(2),
                 cutoff: int = 100) -> RunReport:
    rep = RunReport("verify-mobius", {"weight": weight, "truncation": truncation, "beta": beta, "cutoff": cutoff})
    lw = mr.build_rep(weight, truncation)
    for name, val in mr.commutator_residuals(lw).items():
        rep.check("mobius", name, val, tol.commutator)
    rep.check("mobius", "inversion conjugation", mr.inversion_conjugation_residual(lw), tol.inversion)
    rep.check("mobius", "positivity (min expectation)", mr.positivity_probe(lw, 100), -tol.positivity, ">=")
    partial, closed = mr.character(weight, beta, cutoff)
    rep.value("mobius", "character partial sum", partial, "enumerated")
    rep.value("mobius", "character closed form", closed, "closed-form")
    bound = mr.character_tail_bound(weight, beta, cutoff)
    rep.check("mobius", "character closed - partial", closed - partial, bound * (1 + 1e-9) + 1e-15, "<=",
              "closed-form", note="threshold is the analytic tail bound")
    rep.check("mobius", "character closed - partial (lower)", closed - partial, -1e-13, ">=", "closed-form")
    return rep


def _random_packet(rng):
    return cs.TestFunction(
        rng.normal(size=5) + 1j * rng.normal(size=5),
        center=rng.normal(),
        width=rng.uniform(0.6, 1.6),
        freq=rng.normal(),
    )


def suite_chiral(n: int, tol: Tolerances, suites=("inner", "generators", "inversion"),
                 pairs: int = 20, seed: int = 0) -> RunReport:
    rep = RunReport("chiral", {"dimension": n, "suites": list(suites), "pairs": pairs, "seed": seed})
    space = cs.make_space(n)
    rng = np.random.default_rng(seed)
    gauss = cs.TestFunction([1.0])
    if "inner" in suites:
        val = cs.inner_product(space, gauss, gauss)
        want = math.gamma(n) / 2
        rep.value("chiral", "(gauss, gauss)_n", val.real, "quadrature")
        rep.value("chiral", "Gamma(n)/2", want, "closed-form")
        rep.check("chiral", "gauss norm vs closed form", abs(val - want), tol.inner_product, "<=", "quadrature")
        if n >= 2:
            worst = max(cs.derivative_isometry_check(n, _random_packet(rng), _random_packet(rng))
                        for _ in range(pairs))
            rep.check("chiral", "derivative isometry", worst, tol.isometry, "<=", "quadrature")
        left = cs.TestFunction([1.0, 0.3], center=-10.0)
        right = cs.TestFunction([0.5, -1.0, 0.2], center=10.0)
        rep.check("chiral", "symplectic locality (20 sigma)", abs(cs.symplectic_form(space, left, right)),
                  tol.locality, "<=", "quadrature")
    if "generators" in suites:
        worst = 0.0
        for which in ("P", "D", "K"):
            for _ in range(5):
                f = cs.TestFunction(rng.normal(size=5) + 1j * rng.normal(size=5))
                g = cs.TestFunction(rng.normal(size=5) + 1j * rng.normal(size=5))
                lhs = cs.inner_product(space, f, cs.apply_generator(space, which, g))
                rhs = cs.inner_product(space, cs.apply_generator(space, which, f), g)
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
        rep.check("chiral", "P, D, K symmetric (relative)", worst, tol.self_adjoint, "<=", "quadrature")
        f = cs.TestFunction(rng.integers(-5, 6, size=6).astype(float))

        def act(w, h):
            return cs.apply_generator(space, w, h)

        rels = [
            act("D", act("P", f)) - act("P", act("D", f)) - (-1j) * act("P", f),
            act("K", act("P", f)) - act("P", act("K", f)) - (-2j) * act("D", f),
            act("D", act("K", f)) - act("K", act("D", f)) - 1j * act("K", f),
        ]
        worst = max(float(np.max(np.abs(r.coeffs))) for r in rels)
        rep.check("chiral", "generator commutators (coefficients)", worst, 0.0, "<=", "closed-form")
    if "inversion" in suites:
        sample = cs.LaurentGaussian([1.0], start=2, alpha=1.0, beta=0.5)
        try:
            good = cs.geometric_inversion_check(space, sample)
            bad = cs.geometric_inversion_check(space, sample, cocycle_shift=2)
        except PreconditionViolation as exc:
            rep.check("chiral", "geometric inversion precondition", math.nan, 0.0, "<=", "quadrature", note=str(exc))
        else:
            rep.check("chiral", "K = IPI pointwise", good.k_residual, tol.geometric, "<=", "quadrature")
            rep.check("chiral", "inversion norm", good.norm_residual, tol.geometric, "<=", "quadrature")
            rep.check("chiral", "inversion involution", good.involution_residual, tol.geometric, "<=", "quadrature")
            rep.check("chiral", "wrong cocycle control", bad.k_residual, tol.wrong_cocycle_min, ">=", "quadrature",
                      note="negative control: must fail")
    return rep


def suite_tensors(rank_max: int, tol: Tolerances, spin_max: Fraction = Fraction(4),
                  samples: int = 50, seed: int = 0) -> RunReport:
    rep = RunReport("tensors", {"rank_max": rank_max, "spin_max": spin_max, "samples": samples, "seed": seed})
    for r in range(rank_max + 1):
        rep.check("tensors", f"projector rank r={r}", so3.numerical_rank(so3.projector_matrix(r)), 2 * r + 1, "==")
    twice = int(2 * spin_max)
    worst = 0
    for a in range(twice + 1):
        for b in range(twice + 1):
            s, k = Fraction(a, 2), Fraction(b, 2)
            total = sum(2 * l + 1 for l in so3.cg_decompose(s, k))
            worst = max(worst, abs(total - (2 * s + 1) * (2 * k + 1)))
    rep.check("tensors", "CG dimension sum rule", worst, 0, "==")
    for t in range(13):
        fs = so3.frobenius_schur_value(Fraction(t, 2))
        rep.check("tensors", f"Frobenius-Schur 2l={t}", abs(fs - (-1) ** t), tol.character, "<=", "quadrature")
    rng = np.random.default_rng(seed)
    for h in (1, 2, 3):
        worst = 0.0
        for _ in range(samples):
            F = so3.build_field_strength(so3.random_stf(h, rng, True), so3.random_stf(h, rng, True))
            worst = max(worst, max(so3.verify_hmt_symmetries(F).values()), so3.double_epsilon_residual(F))
        rep.check("tensors", f"HMT and double epsilon h={h}", worst, tol.tensor)
    return rep


def suite_decompose(h: int, kmax: int, both_signs: bool, tol: Tolerances) -> RunReport:
    rep = RunReport("decompose", {"helicity": h, "kmax": kmax, "both_signs": both_signs})
    table = ho.decomposition_table(h, kmax, both_signs)
    rep.tables["decomposition"] = Table(
        ["lowest_weight", "spin", "multiplicity", "provenance"],
        [[w, s, m, "closed-form"] for w, s, m in table.rows],
    )
    for k in range(kmax + 1):
        rep.check("decompose", f"quotient dim k={k}", ho.null_relation_map(h, k).quotient_dim,
                  ho.expected_quotient_dim(h, k), "==")
    gram = ho.angular_gram(h, kmax, 1.0, rank_rel=tol.rank_rel, min_gap=tol.spectral_gap)
    rep.check("decompose", "Gram rank", gram.rank, gram.expected_rank, "==", "quadrature")
    rep.check("decompose", "Gram spectral gap", gram.gap, tol.spectral_gap, ">=", "quadrature")
    if h == 1:
        for k in range(1, kmax + 1):
            q = ho.quasiprimary_residual_map(1, k)
            rep.check("decompose", f"quasiprimary kernel dim k={k}", q.kernel_dim, 2 * k + 3, "==")
            rep.check("decompose", f"kernel vs STF angle k={k}", q.stf_angle, tol.kernel)
        rep.notes.append("kernel dimensions are complex; one complex multiplet gives two real ones")
    cons = eb.consistency_with_conformal(h, kmax)
    rep.check("decompose", "spins match branching", int(cons["spins_match"]), 1, "==")
    return rep


def suite_partition(h: int, beta: float, cutoff: int, both_signs: bool, tol: Tolerances,
                    seed: int = 0) -> RunReport:
    rep = RunReport("partition", {"helicity": h, "beta": beta, "cutoff": cutoff, "both_signs": both_signs,
                                  "seed": seed})
    enum, closed = ho.helicity_trace(h, beta, both_signs, cutoff)
    rep.value("partition", "trace enumerated", enum, "enumerated")
    rep.value("partition", "trace closed form", closed, "closed-form")
    tail = ho.helicity_trace_tail(h, beta, both_signs, cutoff)
    rep.check("partition", "closed - enumerated", closed - enum, tail + 1e-12 * closed, "<=", "closed-form",
              note="threshold is the analytic tail bound")
    if h == 1 and both_signs:
        a, b = ho.trace_series_conformal(1, beta), ho.trace_series_maxwell(beta)
        rep.check("partition", "two series agree (relative)", abs(a - b) / a, tol.series, "<=", "enumerated")
    rng = np.random.default_rng(seed)
    spectra = [[0.5], [0.5, 1 / 3]] + [list(rng.uniform(0, 0.6, size=rng.integers(1, 5))) for _ in range(5)]
    rows = []
    for i, spectrum in enumerate(spectra):
        e, c = ho.fock_trace(spectrum, 40)
        rows.append([i, " ".join(f"{a:.6g}" for a in spectrum), e, "enumerated", c, "closed-form"])
        rep.check("partition", f"Fock trace spectrum {i}", abs(e - c) / c, tol.fock_rel, "<=", "enumerated")
    rep.tables["fock"] = Table(["index", "spectrum", "enumerated", "enumerated_provenance", "closed_form",
                                 "closed_form_provenance"], rows)
    return rep


def suite_gram(h: int, kmax: int, p0: float, tol: Tolerances, order: int | None = None) -> RunReport:
    rep = RunReport("gram", {"helicity": h, "kmax": kmax, "p0": p0, "order": order})
    try:
        g = ho.angular_gram(h, kmax, p0, order=order, rank_rel=tol.rank_rel, min_gap=tol.spectral_gap)
    except PreconditionViolation as exc:
        rep.check("gram", "quadrature order", math.nan, 0.0, "<=", "quadrature", note=str(exc))
        return rep
    rep.array("eigenvalues", g.eigenvalues, "quadrature")
    rep.value("gram", "rank", g.rank, "quadrature")
    rep.notes.append(f"route={g.route}; quadrature order {g.quadrature_order}")
    rep.check("gram", "rank", g.rank, g.expected_rank, "==", "quadrature")
    rep.check("gram", "spectral gap", g.gap, tol.spectral_gap, ">=", "quadrature",
              note="" if g.conclusive else "inconclusive")
    if g.route == "maxwell":
        other = ho.angular_gram(h, kmax, 2 * p0, order=order, rank_rel=tol.rank_rel)
        r = g.rank
        ratio = other.eigenvalues[:r] / g.eigenvalues[:r]
        rep.check("gram", "common p0^2 scaling", float(np.max(np.abs(ratio / 4 - 1))), 1e-8, "<=", "quadrature")
    return rep


def suite_modular(dim: int, seed: int, trials: int, tol: Tolerances) -> RunReport:
    rep = RunReport("modular", {"dim": dim, "seed": seed, "trials": trials})
    rng = np.random.default_rng(seed)
    worst: dict[str, float] = {}
    for _ in range(trials):
        h = ms.random_standard_subspace(dim, rng)
        data = ms.tomita(h)
        res = {**ms.tomita_residuals(h, data), **ms.complement_residuals(h), **ms.modular_flow_check(h, data=data)}
        for key, val in res.items():
            worst[key] = max(worst.get(key, 0.0), val)
    angle_keys = {"fixed space angle", "H''=H", "JH=H'"}
    for key, val in worst.items():
        thr = tol.subspace if key in angle_keys or key.startswith("Delta^it") else tol.modular
        rep.check("modular", key, val, thr)
    half = max(1, dim // 2)
    h1 = ms.random_standard_subspace(half, rng)
    swap = -np.block([[np.zeros((half, half)), np.eye(half)], [np.eye(half), np.zeros((half, half))]])
    res = ms.commuting_unitary_check(ms.direct_sum(h1, h1), swap)
    for key, val in res.items():
        rep.check("modular", f"direct-sum swap {key}", val, tol.commuting)
    return rep


def suite_branch(h: Fraction, lmax: Fraction, tol: Tolerances) -> RunReport:
    rep = RunReport("branch", {"helicity": h, "lmax": lmax})
    table = eb.branching_table(h, lmax)
    rows = []
    worst = 0.0
    for l, m in table.rows:
        integral = eb.character_integral(l, h)
        worst = max(worst, abs(integral - eb.weight_count(l, h)))
        rows.append([l, m, "enumerated"])
    rep.tables["branching"] = Table(["l", "multiplicity", "provenance"], rows)
    rep.check("branch", "character integral vs weight count", worst, tol.branching, "<=", "quadrature")
    rep.check("branch", "multiplicity free", max((m for _, m in table.rows), default=1), 1, "<=")
    if h.denominator == 1 and h >= 1 and lmax >= h:
        cons = eb.consistency_with_conformal(int(h), int(lmax - h))
        rep.check("branch", "spins match conformal decomposition", int(cons["spins_match"]), 1, "==")
        rep.check("branch", "h+1 spins contained in h spins", int(cons["higher_helicity_subset"]), 1, "==")
    return rep


def suite_branch_grid(limit: int, tol: Tolerances) -> RunReport:
    """Character integral vs weight count for all l, |h| <= limit."""
    rep = RunReport("branch-grid", {"limit": limit})
    worst = 0.0
    for a in range(2 * limit + 1):
        for b in range(-2 * limit, 2 * limit + 1):
            if (a - b) % 2:
                continue
            l, h = Fraction(a, 2), Fraction(b, 2)
            worst = max(worst, abs(eb.character_integral(l, h) - eb.weight_count(l, h)))
    rep.check("branch", f"two routes agree for l, |h| <= {limit}", worst, tol.branching, "<=", "quadrature")
    for h in (1, 2, 3):
        cons = eb.consistency_with_conformal(h, 5)
        rep.check("branch", f"consistency with conformal h={h}", int(cons["passed"]), 1, "==")
    return rep


# --------------------------------------------------------------------------
# driver


def _all_suites(tol: Tolerances, quick: bool):
    trials = 20 if quick else 100
    jobs = [
        lambda: [suite_mobius(w, 200, tol) for w in (1, 2, 3, Fraction(5, 2))],
        lambda: [suite_chiral(n, tol, ("inner", "generators")) for n in (1, 2, 3, 4)],
        lambda: [suite_chiral(n, tol, ("inversion",)) for n in (1, 2)],
        lambda: [suite_tensors(6, tol)],
        lambda: [suite_decompose(1, 3, True, tol)],
        lambda: [suite_partition(1, math.log(2), 200, True, tol)],
        lambda: [suite_gram(1, 3, 1.0, tol)],
        lambda: [suite_modular(d, d, trials // 5, tol) for d in (2, 3, 4, 5, 6)],
        lambda: [suite_branch(Fraction(1), Fraction(3), tol), suite_branch_grid(6, tol)],
    ]
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: job(), jobs))
    else:
        results = [job() for job in jobs]
    return [r for group in results for r in group]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of standard output")
    common.add_argument("--csv", metavar="DIR", help="also write checks.csv and one CSV per table into DIR")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="override a tolerance (repeatable)")

    p = argparse.ArgumentParser(prog="helicity-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-mobius", parents=[common], help="sl(2) lowest-weight representation checks")
    s.add_argument("--weight", type=_fraction, required=True)
    s.add_argument("--truncation", type=_positive_int, default=200)
    s.add_argument("--beta", type=float, default=math.log(2))
    s.add_argument("--cutoff", type=_positive_int, default=100)

    s = sub.add_parser("chiral", parents=[common], help="chiral current space checks")
    s.add_argument("--dimension", type=_positive_int, required=True)
    s.add_argument("--suite", choices=["inner", "generators", "inversion"], action="append")
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("tensors", parents=[common], help="SO(3) tensor engine checks")
    s.add_argument("--rank-max", type=_nonneg_int, default=6)
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("decompose", parents=[common], help="time-axis decomposition table and checks")
    s.add_argument("--helicity", type=_positive_int, required=True)
    s.add_argument("--kmax", type=_nonneg_int, required=True)
    s.add_argument("--both-signs", action="store_true")

    s = sub.add_parser("partition", parents=[common], help="trace of exp(-beta L0)")
    s.add_argument("--helicity", type=_positive_int, required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--cutoff", type=_positive_int, default=200)
    s.add_argument("--both-signs", action="store_true")
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("gram", parents=[common], help="angular Gram spectrum")
    s.add_argument("--helicity", type=_positive_int, default=1)
    s.add_argument("--kmax", type=_nonneg_int, required=True)
    s.add_argument("--p0", type=float, default=1.0)
    s.add_argument("--order", type=_positive_int)

    s = sub.add_parser("modular", parents=[common], help="standard subspace checks")
    s.add_argument("--dim", type=_positive_int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=_positive_int, default=100)

    s = sub.add_parser("branch", parents=[common], help="SO(3) branching table")
    s.add_argument("--helicity", type=_fraction, required=True)
    s.add_argument("--lmax", type=_fraction, required=True)

    s = sub.add_parser("all", parents=[common], help="run every suite")
    s.add_argument("--quick", action="store_true")
    return p


def _dispatch(args, tol: Tolerances) -> RunReport:
    cmd = args.command
    if cmd == "verify-mobius":
        return suite_mobius(args.weight, args.truncation, tol, args.beta, args.cutoff)
    if cmd == "chiral":
        suites = tuple(args.suite) if args.suite else ("inner", "generators", "inversion")
        return suite_chiral(args.dimension, tol, suites, seed=args.seed)
    if cmd == "tensors":
        return suite_tensors(args.rank_max, tol, seed=args.seed)
    if cmd == "decompose":
        return suite_decompose(args.helicity, args.kmax, args.both_signs, tol)
    if cmd == "partition":
        return suite_partition(args.helicity, args.beta, args.cutoff, args.both_signs, tol, args.seed)
    if cmd == "gram":
        return suite_gram(args.helicity, args.kmax, args.p0, tol, args.order)
    if cmd == "modular":
        return suite_modular(args.dim, args.seed, args.trials, tol)
    if cmd == "branch":
        return suite_branch(args.helicity, args.lmax, tol)
    if cmd == "all":
        out = RunReport("all", {"quick": args.quick})
        for r in _all_suites(tol, args.quick):
            out.merge(r)
        return out
    raise UsageError(f"unknown command {cmd!r}")


def _write_csv(report: RunReport, directory: str) -> None:
    os.makedirs(directory, exist_ok=True)
    tables = {"checks": report.checks_table(), **report.tables}
    for name, table in tables.items():
        with open(os.path.join(directory, f"{name}.csv"), "w", newline="") as fh:
            fh.write(table.to_csv())


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        tol = DEFAULT_TOLERANCES.with_overrides(args.tol)
    except (KeyError, ValueError) as exc:
        print(f"helicity-lab: error: {exc}", file=stderr)
        return 2
    t0 = time.perf_counter()
    try:
        report = _dispatch(args, tol)
    except (InvalidArgument, UsageError) as exc:
        print(f"helicity-lab: error: {exc}", file=stderr)
        return 2
    report.params = {"command": args.command, **report.params, "tolerance_overrides": ",".join(args.tol)}
    report.wall_time_ms = int(round((time.perf_counter() - t0) * 1000))
    text = report.to_text()
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if args.csv:
        _write_csv(report, args.csv)
    return 0 if report.overall_pass else 1


def main() -> None:
    sys.exit(run())
