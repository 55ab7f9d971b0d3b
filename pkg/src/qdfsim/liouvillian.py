"""Sector-resolved density-matrix generator for qubits measured through a
two-barrier detector with an internal island.

The detector island holds 0, 1 (spin up/down) or 2 electrons, so the joint
state is carried by four matrices over configuration pairs (z1, z2):

* ``rho_a``   -- empty island,
* ``rho_b_up`` / ``rho_b_dn`` -- singly occupied island,
* ``rho_c``   -- doubly occupied island.

For every pair (z1, z2) the coupled equations read (D = 2^N, rates from the
configuration rate table, ``g_j`` = flip of qubit j, ``E_z`` the diagonal
configuration energy)::

    d a[z1,z2]/dt  = (i(E_z2 - E_z1) - (GL[z1] + GL[z2])) a[z1,z2]
                     - i sum_j omega_j (a[g_j z1, z2] - a[z1, g_j z2])
                     + sqrt(GR[z1] GR[z2]) (b_up[z1,z2] + b_dn[z1,z2])

    d b_s[z1,z2]/dt = (i(E_z2 - E_z1)
                       - (GL'[z1] + GL'[z2] + GR[z1] + GR[z2]) / 2) b_s[z1,z2]
                     - i sum_j omega_j (b_s[g_j z1, z2] - b_s[z1, g_j z2])
                     + sqrt(GL[z1] GL[z2]) a[z1,z2]
                     + sqrt(GR'[z1] GR'[z2]) c[z1,z2]

    d c[z1,z2]/dt  = (i(E_z2 - E_z1) - (GR'[z1] + GR'[z2])) c[z1,z2]
                     - i sum_j omega_j (c[g_j z1, z2] - c[z1, g_j z2])
                     + sqrt(GL'[z1] GL'[z2]) (b_up[z1,z2] + b_dn[z1,z2])

The island is spin degenerate and the equations never distinguish the two
one-electron spin sectors, so for spin-symmetric initial data the evolution
closes on (a, b_up + b_dn, c); ``reduce_spin_symmetric`` builds that
three-sector generator (768 coupled equations for four qubits).

Flat layout (the contract shared with the integrator and the exact-exponential
oracle): sector-major, then z1-major, z2-minor::

    flat index = (sector_index * D + z1) * D + z2
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from .model import ModelParams, config_energy, flip_index
from .rates import RateTable, rate_table

SECTORS_FULL = ("a", "b_up", "b_dn", "c")
SECTORS_REDUCED = ("a", "b", "c")

_TRACE_TOL = 1e-12


def flat_index(sector: int, z1: int, z2: int, n_qubits: int) -> int:
    """Flat position of matrix element (z1, z2) of the given sector."""
    d = 2**n_qubits
    return (sector * d + z1) * d + z2


@dataclass
class SectorDM:
    """Density matrix resolved over the four island charge sectors.

    Physical states keep every matrix hermitian, the summed trace equal to
    one, and diagonal entries real and non-negative (up to integrator
    tolerance).
    """

    rho_a: np.ndarray
    rho_b_up: np.ndarray
    rho_b_dn: np.ndarray
    rho_c: np.ndarray

    def __post_init__(self) -> None:
        shape = self.rho_a.shape
        d = shape[0]
        if shape != (d, d) or d & (d - 1):
            raise ValueError(f"sector matrices must be square with power-of-two size, got {shape}")
        for m in (self.rho_b_up, self.rho_b_dn, self.rho_c):
            if m.shape != shape:
                raise ValueError("all sector matrices must share one shape")

    @property
    def n_qubits(self) -> int:
        return int(self.rho_a.shape[0]).bit_length() - 1

    def matrices(self) -> tuple[np.ndarray, ...]:
        return (self.rho_a, self.rho_b_up, self.rho_b_dn, self.rho_c)

    def total_trace(self) -> complex:
        return sum(np.trace(m) for m in self.matrices())

    def sector_populations(self) -> dict[str, float]:
        return {
            name: float(np.trace(m).real)
            for name, m in zip(SECTORS_FULL, self.matrices())
        }

    def qubit_dm(self) -> np.ndarray:
        """Reduced qubit density matrix: the sum over the island sectors."""
        return self.rho_a + self.rho_b_up + self.rho_b_dn + self.rho_c

    def hermiticity_defect(self) -> float:
        return max(float(np.abs(m - m.conj().T).max()) for m in self.matrices())

    def flatten(self, sectors: tuple[str, ...] = SECTORS_FULL) -> np.ndarray:
        """Flat vector in the documented layout, full or spin-reduced."""
        if sectors == SECTORS_FULL:
            mats = self.matrices()
        elif sectors == SECTORS_REDUCED:
            mats = (self.rho_a, self.rho_b_up + self.rho_b_dn, self.rho_c)
        else:
            raise ValueError(f"unknown sector layout {sectors}")
        return np.concatenate([m.reshape(-1) for m in mats])

    @classmethod
    def from_flat(
        cls, vec: np.ndarray, n_qubits: int, sectors: tuple[str, ...] = SECTORS_FULL
    ) -> "SectorDM":
        """Rebuild from a flat vector.

        A reduced vector carries b_up + b_dn only; the sum is split evenly,
        which is exact in the spin-symmetric regime the reduction assumes.
        """
        d = 2**n_qubits
        mats = vec.reshape(len(sectors), d, d)
        if sectors == SECTORS_FULL:
            return cls(*(m.copy() for m in mats))
        if sectors == SECTORS_REDUCED:
            half_b = 0.5 * mats[1]
            return cls(mats[0].copy(), half_b, half_b.copy(), mats[2].copy())
        raise ValueError(f"unknown sector layout {sectors}")


@dataclass(eq=False)
class Generator:
    """Sparse time-independent generator L with d(vec rho)/dt = L . vec rho.

    Entries are stored as parallel (row, col, value) arrays sorted by
    (row, col) with duplicates merged and exact zeros dropped, so assembly is
    deterministic.  The object is immutable by convention and safe to share;
    concurrent :meth:`apply` calls on distinct vectors are fine.
    """

    n_qubits: int
    sectors: tuple[str, ...]
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    _matrix: sp.csr_matrix | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.sectors) * 4**self.n_qubits

    @property
    def nnz(self) -> int:
        return len(self.vals)

    def matrix(self) -> sp.csr_matrix:
        """CSR form of the entry list (cached)."""
        if self._matrix is None:
            self._matrix = sp.csr_matrix(
                (self.vals, (self.rows, self.cols)), shape=(self.dim, self.dim)
            )
        return self._matrix

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Exact sparse product L @ v (row-wise, fixed summation order)."""
        if v.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: generator {self.dim}, vector {v.shape[0]}")
        return self.matrix() @ v

    def as_dense(self) -> np.ndarray:
        return self.matrix().toarray()

    def entries(self) -> Iterator[tuple[int, int, complex]]:
        yield from zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist())

    def trace_rows(self) -> np.ndarray:
        """Flat indices whose sum is the total trace (all (sector, z, z) rows)."""
        d = 2**self.n_qubits
        return np.array(
            [flat_index(s, z, z, self.n_qubits) for s in range(len(self.sectors)) for z in range(d)]
        )

    def dump(self) -> str:
        """Debug text form: one line per entry, sorted lexicographically.

        Line format: ``sector,z1,z2 <- sector,w1,w2 : re,im`` with
        zero-padded configuration indices.
        """
        d = 2**self.n_qubits
        lines = []
        for r, c, v in self.entries():
            s1, z1, z2 = r // (d * d), (r // d) % d, r % d
            s2, w1, w2 = c // (d * d), (c // d) % d, c % d
            lines.append(
                f"{self.sectors[s1]},{z1:03d},{z2:03d} <- "
                f"{self.sectors[s2]},{w1:03d},{w2:03d} : {v.real!r},{v.imag!r}"
            )
        return "\n".join(sorted(lines)) + "\n"


def _finalize_entries(
    n_qubits: int, sectors: tuple[str, ...], acc: dict[tuple[int, int], complex]
) -> Generator:
    items = sorted((rc, v) for rc, v in acc.items() if v != 0.0)
    rows = np.array([rc[0] for rc, _ in items], dtype=np.int64)
    cols = np.array([rc[1] for rc, _ in items], dtype=np.int64)
    vals = np.array([v for _, v in items], dtype=np.complex128)
    return Generator(n_qubits, sectors, rows, cols, vals)


def assemble(p: ModelParams, rates: RateTable | None = None) -> Generator:
    """Assemble the full four-sector generator from the model parameters."""
    n = p.n_qubits
    d = 2**n
    if rates is None:
        rates = rate_table(p)
    gl, gr = rates.gamma_L, rates.gamma_R
    glp, grp = rates.gamma_L_primed, rates.gamma_R_primed
    energy = np.array([config_energy(z, p) for z in range(d)])
    sqrt_gl = np.sqrt(gl)
    sqrt_gr = np.sqrt(gr)
    sqrt_glp = np.sqrt(glp)
    sqrt_grp = np.sqrt(grp)

    A, BU, BD, C = 0, 1, 2, 3
    acc: dict[tuple[int, int], complex] = {}

    def add(row: int, col: int, v: complex) -> None:
        acc[(row, col)] = acc.get((row, col), 0.0) + v

    def fi(s: int, z1: int, z2: int) -> int:
        return (s * d + z1) * d + z2

    for z1 in range(d):
        for z2 in range(d):
            phase = 1j * (energy[z2] - energy[z1])
            # empty island: loses through the left barrier, fed from either
            # one-electron sector through the right one
            r = fi(A, z1, z2)
            add(r, r, phase - (gl[z1] + gl[z2]))
            add(r, fi(BU, z1, z2), sqrt_gr[z1] * sqrt_gr[z2])
            add(r, fi(BD, z1, z2), sqrt_gr[z1] * sqrt_gr[z2])
            # one electron of either spin on the island
            for s in (BU, BD):
                r = fi(s, z1, z2)
                add(r, r, phase - 0.5 * (glp[z1] + glp[z2] + gr[z1] + gr[z2]))
                add(r, fi(A, z1, z2), sqrt_gl[z1] * sqrt_gl[z2])
                add(r, fi(C, z1, z2), sqrt_grp[z1] * sqrt_grp[z2])
            # doubly occupied island: primed rates throughout
            r = fi(C, z1, z2)
            add(r, r, phase - (grp[z1] + grp[z2]))
            add(r, fi(BU, z1, z2), sqrt_glp[z1] * sqrt_glp[z2])
            add(r, fi(BD, z1, z2), sqrt_glp[z1] * sqrt_glp[z2])
            # coherent flips act identically in every sector
            for s in (A, BU, BD, C):
                r = fi(s, z1, z2)
                for j in range(1, n + 1):
                    w = p.omega[j - 1]
                    if w == 0.0:
                        continue
                    add(r, fi(s, flip_index(z1, j, n), z2), -1j * w)
                    add(r, fi(s, z1, flip_index(z2, j, n)), +1j * w)

    g = _finalize_entries(n, SECTORS_FULL, acc)
    check_trace_preserving(g)
    return g


def reduce_spin_symmetric(g: Generator) -> Generator:
    """Project the four-sector generator onto (a, b_up + b_dn, c).

    Valid because the model never distinguishes the island spin: the full
    generator commutes with the b_up <-> b_dn swap, so the projection
    pi(v) = (a, b_up + b_dn, c) intertwines the two evolutions exactly for
    every vector, not just symmetric ones.
    """
    if g.sectors != SECTORS_FULL:
        raise ValueError("reduce_spin_symmetric expects the full four-sector generator")
    n = g.n_qubits
    d2 = 4**n
    # full sector -> (reduced sector, row weight, column weight); the row map
    # sums the two b sectors, the column map embeds b as an even split.
    sector_map = {0: 0, 1: 1, 2: 1, 3: 2}
    col_weight = {0: 1.0, 1: 0.5, 2: 0.5, 3: 1.0}
    acc: dict[tuple[int, int], complex] = {}
    for r, c, v in g.entries():
        sr, pr = divmod(r, d2)
        sc, pc = divmod(c, d2)
        rr = sector_map[sr] * d2 + pr
        cc = sector_map[sc] * d2 + pc
        acc[(rr, cc)] = acc.get((rr, cc), 0.0) + v * col_weight[sc]
    red = _finalize_entries(n, SECTORS_REDUCED, acc)
    check_trace_preserving(red)
    return red


def trace_violation(g: Generator) -> float:
    """Largest column sum of L over the trace-functional rows.

    Identically zero for a correctly assembled generator: the inter-sector
    gain/loss terms cancel exactly and the coherent flips are commutators.
    """
    m = g.matrix()
    col_sums = np.asarray(m[g.trace_rows(), :].sum(axis=0)).ravel()
    return float(np.abs(col_sums).max())


def check_trace_preserving(g: Generator, tol: float = _TRACE_TOL) -> None:
    v = trace_violation(g)
    if v > tol:
        raise ValueError(f"generator is not trace preserving: defect {v:.3e} > {tol:.1e}")
