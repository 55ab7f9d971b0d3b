"""Shared oracle helpers for the test suite.

Everything here is deliberately independent of the package internals it is
used to check: dense Hamiltonians are built by explicit Kronecker products,
and small linear systems are solved by eigen-decomposition.
"""

from __future__ import annotations

import numpy as np
import pytest

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SZ = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def kron_chain(ops: list[np.ndarray]) -> np.ndarray:
    """Tensor product with qubit 1 (ops[0]) innermost / fastest-varying."""
    acc = ops[0]
    for op in ops[1:]:
        acc = np.kron(op, acc)
    return acc


def single_site(op: np.ndarray, j: int, n: int) -> np.ndarray:
    """op acting on qubit j (1-based) of an n-qubit register."""
    ops = [I2] * n
    ops[j - 1] = op
    return kron_chain(ops)


def dense_hamiltonian(omega, epsilon, j_coupling) -> np.ndarray:
    """Brute-force qubit Hamiltonian sum_i (w_i X_i + e_i Z_i) + sum J_i Z_i Z_{i+1}."""
    n = len(omega)
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n):
        h += omega[i] * single_site(SX, i + 1, n)
        h += epsilon[i] * single_site(SZ, i + 1, n)
    for i in range(n - 1):
        h += j_coupling[i] * single_site(SZ, i + 1, n) @ single_site(SZ, i + 2, n)
    return h


def eig_propagate(m: np.ndarray, p0: np.ndarray, t: float) -> np.ndarray:
    """Solve dp/dt = M p by eigen-decomposition (general small dense M)."""
    vals, vecs = np.linalg.eig(m)
    coeff = np.linalg.solve(vecs, p0.astype(complex))
    return vecs @ (np.exp(vals * t) * coeff)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240831)
