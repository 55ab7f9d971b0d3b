"""Physical parameters, joint spin-configuration indexing, and non-uniformity scenarios.

Conventions used throughout the package:

* Qubit indices are 1-based (qubit ``1 .. N``).
* A joint configuration of N qubits is a tuple of sigma-z eigenvalues
  ``s_i`` in {-1, +1}; ``-1`` is "down", ``+1`` is "up".
* Configurations map bijectively onto integers ``0 .. 2^N - 1``: qubit ``i``
  occupies bit ``i - 1`` and a down spin maps to a 0 bit.  Qubit 1 therefore
  varies fastest, and all tensor products elsewhere in the package place
  qubit 1 innermost.
* All energies and rates are expressed in units of the common tunneling
  rate (one rate unit == 1.0).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

# Two-qubit pair labels in increasing configuration order of (lower, upper)
# qubit: A = down/down, B = down/up, C = up/down, D = up/up.
_PAIR_LETTERS = ("A", "C", "B", "D")  # indexed by bit pair (low bit = lower qubit)

GAMMA0_UNIT = 1.0

SCENARIO_NAMES = ("uniform", "case_i", "case_ii", "case_iii", "custom")

# Which qubits a named non-uniformity case perturbs (defined for N = 4).
CASE_AFFECTED = {
    "uniform": frozenset(),
    "case_i": frozenset({3}),
    "case_ii": frozenset({2, 3}),
    "case_iii": frozenset({4}),
}


@dataclass(frozen=True)
class QubitConfig:
    """Classical joint sigma-z configuration of N qubits.

    Immutable value type; safe to share between threads.
    """

    spins: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.spins:
            raise ValueError("configuration must contain at least one qubit")
        if any(s not in (-1, 1) for s in self.spins):
            raise ValueError(f"spins must be -1 or +1, got {self.spins}")

    @property
    def n_qubits(self) -> int:
        return len(self.spins)

    @property
    def index(self) -> int:
        """Integer index of this configuration (qubit i is bit i-1, down -> 0)."""
        idx = 0
        for i, s in enumerate(self.spins):
            if s == 1:
                idx |= 1 << i
        return idx

    @classmethod
    def from_index(cls, index: int, n_qubits: int) -> "QubitConfig":
        if not 0 <= index < 2**n_qubits:
            raise ValueError(f"index {index} out of range for {n_qubits} qubits")
        return cls(tuple(1 if (index >> i) & 1 else -1 for i in range(n_qubits)))

    def flip(self, j: int) -> "QubitConfig":
        """Return the configuration with the spin of qubit j (1-based) negated."""
        if not 1 <= j <= self.n_qubits:
            raise ValueError(f"qubit index {j} out of range 1..{self.n_qubits}")
        spins = list(self.spins)
        spins[j - 1] = -spins[j - 1]
        return QubitConfig(tuple(spins))

    @property
    def label(self) -> str:
        """Letter label: A..D per adjacent qubit pair ((1,2), (3,4), ...).

        Defined for even N; odd N falls back to a +/- string.
        """
        n = self.n_qubits
        if n % 2:
            return "".join("+" if s == 1 else "-" for s in self.spins)
        idx = self.index
        letters = []
        for p in range(n // 2):
            letters.append(_PAIR_LETTERS[(idx >> (2 * p)) & 0b11])
        return "".join(letters)

    def __str__(self) -> str:
        return self.label


def flip(z: QubitConfig, j: int) -> QubitConfig:
    """Single-qubit spin flip of qubit j; an involution on configurations."""
    return z.flip(j)


def flip_index(z: int, j: int, n_qubits: int) -> int:
    """Index-level flip of qubit j (1-based); fast path for table building."""
    if not 1 <= j <= n_qubits:
        raise ValueError(f"qubit index {j} out of range 1..{n_qubits}")
    return z ^ (1 << (j - 1))


@dataclass(frozen=True)
class ModelParams:
    """Full parameter set of the coupled qubits + two-barrier island detector.

    ``omega``/``epsilon`` are the intra-qubit tunnel coupling and gate bias,
    ``j_coupling`` the nearest-neighbour sigma-z couplings (length N-1).
    ``gamma0``/``delta_gamma`` give per-qubit branch rates
    ``gamma0_i + s * delta_gamma_i`` for spin ``s``; ``primed_scale`` maps
    each rate to its value at the shifted electrode energy (1.0 in all
    figure settings).  ``left_barrier``/``right_barrier`` partition
    ``{1..N}`` into the qubits electrostatically coupled to each barrier.

    Immutable after construction; share freely between threads.
    """

    n_qubits: int
    omega: tuple[float, ...]
    epsilon: tuple[float, ...]
    j_coupling: tuple[float, ...]
    gamma0: tuple[float, ...]
    delta_gamma: tuple[float, ...]
    primed_scale: float
    left_barrier: frozenset[int]
    right_barrier: frozenset[int]

    def __post_init__(self) -> None:
        n = self.n_qubits
        if n < 1:
            raise ValueError("n_qubits must be >= 1")
        for name in ("omega", "epsilon", "gamma0", "delta_gamma"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} must have length {n}")
        if len(self.j_coupling) != n - 1:
            raise ValueError(f"j_coupling must have length {n - 1}")
        if not self.left_barrier or not self.right_barrier:
            raise ValueError("both barriers need at least one qubit")
        if self.left_barrier & self.right_barrier:
            raise ValueError("barrier assignments must be disjoint")
        if self.left_barrier | self.right_barrier != frozenset(range(1, n + 1)):
            raise ValueError("barriers must partition {1..N}")
        for i in range(n):
            if self.gamma0[i] - abs(self.delta_gamma[i]) <= 0.0:
                raise ValueError(
                    f"branch rates of qubit {i + 1} must stay positive: "
                    f"gamma0={self.gamma0[i]}, delta_gamma={self.delta_gamma[i]}"
                )
        if self.primed_scale <= 0.0:
            raise ValueError("primed_scale must be positive")

    @classmethod
    def uniform(
        cls,
        n_qubits: int,
        omega: float = 2.0,
        zeta: float = 0.0,
        epsilon: float | Iterable[float] = 0.0,
        j_coupling: float | Iterable[float] = 0.0,
        primed_scale: float = 1.0,
        left_barrier: Iterable[int] | None = None,
        right_barrier: Iterable[int] | None = None,
    ) -> "ModelParams":
        """Uniform qubits with measurement strength zeta (branch rates 1 +- zeta).

        The default barrier split assigns the lower half of the qubits to the
        left barrier and the upper half to the right one, matching the serial
        detector geometry (for N=2: one qubit per barrier).
        """
        n = n_qubits
        eps = (
            tuple(float(e) for e in epsilon)
            if isinstance(epsilon, Iterable)
            else (float(epsilon),) * n
        )
        jc = (
            tuple(float(j) for j in j_coupling)
            if isinstance(j_coupling, Iterable)
            else (float(j_coupling),) * (n - 1)
        )
        if left_barrier is None or right_barrier is None:
            left_barrier = range(1, n // 2 + 1)
            right_barrier = range(n // 2 + 1, n + 1)
        return cls(
            n_qubits=n,
            omega=(float(omega),) * n,
            epsilon=eps,
            j_coupling=jc,
            gamma0=(GAMMA0_UNIT,) * n,
            delta_gamma=(float(zeta) * GAMMA0_UNIT,) * n,
            primed_scale=float(primed_scale),
            left_barrier=frozenset(left_barrier),
            right_barrier=frozenset(right_barrier),
        )


@dataclass(frozen=True)
class Scenario:
    """A named non-uniformity recipe: which qubits deviate, and by how much.

    Affected qubits get ``omega -> (1-eta) omega``, ``epsilon -> eta`` (in rate
    units, replacing the base value), and both branch-rate parameters scaled
    by ``(1-eta)`` so the relative modulation is preserved.
    """

    name: str
    affected: frozenset[int]
    eta: float

    def __post_init__(self) -> None:
        if self.name not in SCENARIO_NAMES:
            raise ValueError(f"unknown scenario {self.name!r}; expected one of {SCENARIO_NAMES}")
        if not 0.0 <= self.eta < 1.0:
            raise ValueError(f"eta must lie in [0, 1), got {self.eta}")
        if self.name != "custom" and self.affected != CASE_AFFECTED[self.name]:
            raise ValueError(
                f"scenario {self.name!r} must affect qubits {sorted(CASE_AFFECTED[self.name])}"
            )

    @classmethod
    def named(cls, name: str, eta: float, affected: Iterable[int] = ()) -> "Scenario":
        if name == "custom":
            return cls("custom", frozenset(affected), float(eta))
        if name not in CASE_AFFECTED:
            raise ValueError(f"unknown scenario {name!r}")
        return cls(name, CASE_AFFECTED[name], float(eta))

    @classmethod
    def uniform(cls) -> "Scenario":
        return cls("uniform", frozenset(), 0.0)

    @classmethod
    def case_i(cls, eta: float) -> "Scenario":
        return cls("case_i", CASE_AFFECTED["case_i"], float(eta))

    @classmethod
    def case_ii(cls, eta: float) -> "Scenario":
        return cls("case_ii", CASE_AFFECTED["case_ii"], float(eta))

    @classmethod
    def case_iii(cls, eta: float) -> "Scenario":
        return cls("case_iii", CASE_AFFECTED["case_iii"], float(eta))


def apply_scenario(base: ModelParams, scenario: Scenario) -> ModelParams:
    """Return a copy of ``base`` with the scenario's deviations applied.

    With ``eta == 0`` or an empty affected set the parameters are returned
    unchanged (identity), which takes precedence over the absolute epsilon
    replacement below.
    """
    if scenario.affected and max(scenario.affected) > base.n_qubits:
        raise ValueError(
            f"scenario affects qubit {max(scenario.affected)} but model has "
            f"{base.n_qubits} qubits"
        )
    if scenario.eta == 0.0 or not scenario.affected:
        return base
    eta = scenario.eta
    omega = list(base.omega)
    epsilon = list(base.epsilon)
    gamma0 = list(base.gamma0)
    delta_gamma = list(base.delta_gamma)
    for k in scenario.affected:
        i = k - 1
        omega[i] *= 1.0 - eta
        epsilon[i] = eta * GAMMA0_UNIT  # absolute replacement, not a scaling
        gamma0[i] *= 1.0 - eta
        delta_gamma[i] *= 1.0 - eta
        if gamma0[i] - abs(delta_gamma[i]) <= 0.0:
            raise ValueError(f"scenario drives rates of qubit {k} non-positive")
    return replace(
        base,
        omega=tuple(omega),
        epsilon=tuple(epsilon),
        gamma0=tuple(gamma0),
        delta_gamma=tuple(delta_gamma),
    )


def config_energy(z: QubitConfig | int, p: ModelParams) -> float:
    """Diagonal qubit energy of configuration z.

    Evaluates ``sum_i epsilon_i s_i + sum_i J_{i,i+1} s_i s_{i+1}``, i.e. the
    diagonal of the qubit Hamiltonian in the configuration basis.
    """
    n = p.n_qubits
    idx = z.index if isinstance(z, QubitConfig) else int(z)
    if not 0 <= idx < 2**n:
        raise ValueError(f"configuration index {idx} out of range for {n} qubits")
    s = [1.0 if (idx >> i) & 1 else -1.0 for i in range(n)]
    e = sum(p.epsilon[i] * s[i] for i in range(n))
    e += sum(p.j_coupling[i] * s[i] * s[i + 1] for i in range(n - 1))
    return e
