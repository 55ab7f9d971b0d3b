"""Effective barrier tunneling rates as a function of the joint qubit configuration.

Each qubit modulates the transparency of the barrier it is assigned to.  The
qubits on one barrier act like tunnel resistances in series, so the barrier
rate is the harmonic combination of the per-qubit branch rates
``gamma0_i + s_i * delta_gamma_i``.  Primed rates (electrode evaluated at the
energy shifted by the island charging energy) are the same combination scaled
by ``primed_scale``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams, QubitConfig


@dataclass(frozen=True)
class BarrierRates:
    """The four effective rates of one configuration: left/right, unprimed/primed."""

    gamma_L: float
    gamma_R: float
    gamma_L_primed: float
    gamma_R_primed: float

    def __post_init__(self) -> None:
        for name in ("gamma_L", "gamma_R", "gamma_L_primed", "gamma_R_primed"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


def qubit_branch_rate(i: int, s: int, p: ModelParams) -> float:
    """Branch rate of qubit i (1-based) for spin s in {-1, +1}."""
    if not 1 <= i <= p.n_qubits:
        raise ValueError(f"qubit index {i} out of range 1..{p.n_qubits}")
    if s not in (-1, 1):
        raise ValueError(f"spin must be -1 or +1, got {s}")
    rate = p.gamma0[i - 1] + s * p.delta_gamma[i - 1]
    if rate <= 0.0:
        raise ValueError(f"branch rate of qubit {i} non-positive: {rate}")
    return rate


def _series_rate(z_index: int, qubits: frozenset[int], p: ModelParams) -> float:
    if not qubits:
        raise ValueError("barrier has no qubits assigned")
    inv = 0.0
    for i in sorted(qubits):
        s = 1 if (z_index >> (i - 1)) & 1 else -1
        inv += 1.0 / qubit_branch_rate(i, s, p)
    return 1.0 / inv


def barrier_rates(z: QubitConfig | int, p: ModelParams) -> BarrierRates:
    """Effective (left, right, left-primed, right-primed) rates at configuration z."""
    idx = z.index if isinstance(z, QubitConfig) else int(z)
    gl = _series_rate(idx, p.left_barrier, p)
    gr = _series_rate(idx, p.right_barrier, p)
    return BarrierRates(gl, gr, p.primed_scale * gl, p.primed_scale * gr)


@dataclass(frozen=True)
class RateTable:
    """Barrier rates of every configuration, precomputed once and shared read-only.

    Arrays are indexed by the integer configuration index.
    """

    gamma_L: np.ndarray
    gamma_R: np.ndarray
    gamma_L_primed: np.ndarray
    gamma_R_primed: np.ndarray


def rate_table(p: ModelParams) -> RateTable:
    """Tabulate barrier rates over all 2^N configurations."""
    d = 2**p.n_qubits
    gl = np.empty(d)
    gr = np.empty(d)
    for z in range(d):
        gl[z] = _series_rate(z, p.left_barrier, p)
        gr[z] = _series_rate(z, p.right_barrier, p)
    return RateTable(gl, gr, p.primed_scale * gl, p.primed_scale * gr)
