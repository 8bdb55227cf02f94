"""Centralized numerical thresholds and run parameters."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Pass/fail thresholds used by the verification suites.

    Every field may be overridden from the command line with
    ``--tol NAME=VALUE``.
    """

    commutator: float = 1e-10
    inversion: float = 1e-10
    positivity: float = 1e-10
    inner_product: float = 1e-10
    isometry: float = 1e-10
    locality: float = 1e-12
    self_adjoint: float = 1e-9
    mobius_unitarity: float = 1e-6
    geometric: float = 1e-5
    wrong_cocycle_min: float = 1e-2
    tensor: float = 1e-12
    character: float = 1e-10
    rank_rel: float = 1e-8
    spectral_gap: float = 1e3
    kernel: float = 1e-10
    trace: float = 1e-6
    series: float = 1e-12
    fock_rel: float = 1e-6
    modular: float = 1e-10
    subspace: float = 1e-8
    commuting: float = 1e-9
    branching: float = 1e-8

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    def with_overrides(self, pairs: list[str] | None) -> "Tolerances":
        """Apply ``NAME=VALUE`` strings; unknown names raise KeyError."""
        if not pairs:
            return self
        known = {f.name for f in fields(self)}
        updates = {}
        for item in pairs:
            name, sep, value = item.partition("=")
            name = name.strip()
            if not sep or name not in known:
                raise KeyError(f"unknown tolerance override {item!r}; known: {sorted(known)}")
            updates[name] = float(value)
        return replace(self, **updates)


DEFAULT_TOLERANCES = Tolerances()

THREADS_ENV = "HELICITY_LAB_THREADS"


def thread_count() -> int:
    """Worker count from the environment (default 1; invalid values fall back to 1)."""
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1
