"""Dense statevector simulation for small qubit registers.

Conventions used by every module in this package:

- Qubits are numbered 1..n and qubit 1 is the most significant bit, so the
  basis ket |q1 q2 ... qn> sits at index sum_i qi * 2**(n - i).
- States are immutable values; every operation returns a new StateVector.
- Measuring "in basis U" means projecting onto the columns {U|0>, U|1>},
  implemented as rotate-by-U-inverse, read the computational bit.
- Randomness is always injected (numpy Generator or anything exposing the
  methods actually used), so identical seeds replay identical runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 20  # dense 2**n amplitudes; plenty for constructions up to ~10 qubits
AMPLITUDE_TOL = 1e-12
PROBABILITY_TOL = 1e-10

_SQRT1_2 = math.sqrt(0.5)


def bitstring(index: int, n_qubits: int) -> str:
    """Binary label of a basis index, qubit 1 first."""
    return format(index, f"0{n_qubits}b")


@dataclass(frozen=True)
class StateVector:
    """Normalized amplitude vector of an n-qubit pure state."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes for {self.n_qubits} qubits, "
                f"got shape {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > PROBABILITY_TOL:
            raise ValueError(f"squared norm is {norm_sq}, not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits


@dataclass(frozen=True)
class Unitary1Q:
    """Single-qubit basis rotation [[a1, a2* e^{i phase}], [a2, -a1* e^{i phase}]].

    (a1, a2) is a unit vector in C^2; every 2x2 unitary has this form up to
    a global phase. The basis states of the rotated measurement are the
    matrix columns U|0> and U|1>.
    """

    a1: complex
    a2: complex
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a1", complex(self.a1))
        object.__setattr__(self, "a2", complex(self.a2))
        object.__setattr__(self, "phase", float(self.phase))
        r = abs(self.a1) ** 2 + abs(self.a2) ** 2
        if abs(r - 1.0) > AMPLITUDE_TOL:
            raise ValueError(f"|a1|^2 + |a2|^2 = {r}, not 1")

    @classmethod
    def identity(cls) -> Unitary1Q:
        # phase pi turns the lower-right entry -a1* e^{i phase} into +1
        return cls(1.0, 0.0, math.pi)

    @classmethod
    def hadamard(cls) -> Unitary1Q:
        return cls(_SQRT1_2, _SQRT1_2, 0.0)

    @classmethod
    def pauli_x(cls) -> Unitary1Q:
        return cls(0.0, 1.0, 0.0)

    def _phase_factor(self) -> complex:
        return complex(math.cos(self.phase), math.sin(self.phase))

    def matrix(self) -> np.ndarray:
        ph = self._phase_factor()
        return np.array(
            [
                [self.a1, self.a2.conjugate() * ph],
                [self.a2, -self.a1.conjugate() * ph],
            ],
            dtype=np.complex128,
        )

    def inverse(self) -> Unitary1Q:
        """Conjugate transpose, expressed in the same parameterization."""
        return Unitary1Q(self.a1.conjugate(), self.a2 / self._phase_factor(), -self.phase)

    def is_computational(self) -> bool:
        """True when the basis columns are |0>, |1> up to phases."""
        return abs(self.a2) <= AMPLITUDE_TOL

    def to_json_dict(self) -> dict:
        return {
            "a1": [self.a1.real, self.a1.imag],
            "a2": [self.a2.real, self.a2.imag],
            "phase": self.phase,
        }


@dataclass(frozen=True)
class PermutationMap:
    """Relabeling of qubit positions: mapping[i-1] is the new position of qubit i."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.mapping)
        object.__setattr__(self, "mapping", m)
        if sorted(m) != list(range(1, len(m) + 1)):
            raise ValueError(f"mapping {m} is not a bijection on 1..{len(m)}")

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __call__(self, qubit: int) -> int:
        return self.mapping[qubit - 1]

    @classmethod
    def identity(cls, n: int) -> PermutationMap:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def swap(cls, n: int, i: int, j: int) -> PermutationMap:
        m = list(range(1, n + 1))
        m[i - 1], m[j - 1] = j, i
        return cls(tuple(m))

    def compose(self, other: PermutationMap) -> PermutationMap:
        """self after other: qubit i ends up at self(other(i))."""
        if self.n != other.n:
            raise ValueError("cannot compose permutations of different sizes")
        return PermutationMap(tuple(self(other(i)) for i in range(1, self.n + 1)))


@dataclass(frozen=True)
class MeasurementRecord:
    """One projective measurement: which qubit, in which basis, what came out."""

    qubit: int
    basis: Unitary1Q
    outcome: int
    probability: float


def new_basis_state(n_qubits: int, bits: str) -> StateVector:
    """Computational basis state |bits>, bits written with qubit 1 first."""
    if len(bits) != n_qubits:
        raise ValueError(f"bitstring {bits!r} does not have length {n_qubits}")
    if any(b not in "01" for b in bits):
        raise ValueError(f"bitstring {bits!r} contains characters other than 0/1")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return StateVector(n_qubits, amps)


def apply_matrix(amplitudes: np.ndarray, n_qubits: int, target: int, matrix: np.ndarray) -> np.ndarray:
    """Contract a 2x2 matrix against one qubit of a raw amplitude array.

    Low-level building block shared by the gate, measurement, and
    expectation-value code. No unitarity or normalization checks.
    """
    left = 1 << (target - 1)
    right = 1 << (n_qubits - target)
    cube = np.asarray(amplitudes).reshape(left, 2, right)
    mat = np.asarray(matrix, dtype=np.complex128)
    return np.einsum("ab,xby->xay", mat, cube).reshape(-1)


def _check_qubit(n_qubits: int, qubit: int, name: str = "target") -> None:
    if not 1 <= qubit <= n_qubits:
        raise ValueError(f"{name} {qubit} out of range 1..{n_qubits}")


def apply_1q(state: StateVector, gate: Unitary1Q, target: int) -> StateVector:
    """Apply a single-qubit unitary: I x ... x U x ... x I."""
    _check_qubit(state.n_qubits, target)
    out = apply_matrix(state.amplitudes, state.n_qubits, target, gate.matrix())
    return StateVector(state.n_qubits, out)


def apply_cx(state: StateVector, control: int, target: int) -> StateVector:
    """Controlled-X: flip the target bit wherever the control bit is 1."""
    n = state.n_qubits
    _check_qubit(n, control, "control")
    _check_qubit(n, target)
    if control == target:
        raise ValueError("control and target must differ")
    idx = np.arange(state.dim)
    control_set = (idx >> (n - control)) & 1 == 1
    src = np.where(control_set, idx ^ (1 << (n - target)), idx)
    return StateVector(n, state.amplitudes[src])


def apply_permutation(state: StateVector, perm: PermutationMap) -> StateVector:
    """Relabel qubits: the amplitude of |b1..bn> moves to the permuted label."""
    if perm.n != state.n_qubits:
        raise ValueError(f"permutation on {perm.n} qubits applied to {state.n_qubits}-qubit state")
    tensor = state.amplitudes.reshape((2,) * state.n_qubits)
    dest = [perm(i) - 1 for i in range(1, state.n_qubits + 1)]
    out = np.moveaxis(tensor, range(state.n_qubits), dest)
    return StateVector(state.n_qubits, out.reshape(-1))


def _bit_marginals(amplitudes: np.ndarray, n_qubits: int, qubit: int) -> tuple[float, float]:
    left = 1 << (qubit - 1)
    right = 1 << (n_qubits - qubit)
    cube = amplitudes.reshape(left, 2, right)
    p = np.sum(np.abs(cube) ** 2, axis=(0, 2))
    return float(p[0]), float(p[1])


def outcome_probability(state: StateVector, qubit: int, basis: Unitary1Q, outcome: int) -> float:
    """Born probability of seeing `outcome` when measuring one qubit in `basis`."""
    _check_qubit(state.n_qubits, qubit, "qubit")
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    rotated = apply_matrix(state.amplitudes, state.n_qubits, qubit, basis.inverse().matrix())
    return _bit_marginals(rotated, state.n_qubits, qubit)[outcome]


def measure_qubit(state: StateVector, qubit: int, basis: Unitary1Q, rng) -> tuple[MeasurementRecord, StateVector]:
    """Projective measurement of one qubit in an arbitrary basis.

    Samples by the Born rule (one rng.random() call), renormalizes the
    surviving branch, and leaves the measured qubit in the basis state that
    was observed. Deterministic for a fixed rng state.
    """
    _check_qubit(state.n_qubits, qubit, "qubit")
    n = state.n_qubits
    rotated = apply_matrix(state.amplitudes, n, qubit, basis.inverse().matrix())
    p0, p1 = _bit_marginals(rotated, n, qubit)
    outcome = 0 if rng.random() < p0 else 1
    p_outcome = (p0, p1)[outcome]
    if p_outcome <= 0.0:
        raise RuntimeError("sampled a zero-probability measurement branch")
    left = 1 << (qubit - 1)
    right = 1 << (n - qubit)
    cube = rotated.reshape(left, 2, right).copy()
    cube[:, 1 - outcome, :] = 0.0
    collapsed = cube.reshape(-1) / math.sqrt(p_outcome)
    collapsed = apply_matrix(collapsed, n, qubit, basis.matrix())
    record = MeasurementRecord(qubit=qubit, basis=basis, outcome=outcome, probability=p_outcome)
    return record, StateVector(n, collapsed)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2. Insensitive to global phase; 1 iff the states coincide."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def random_unitary_1q(rng) -> Unitary1Q:
    """Random basis rotation: (a1, a2) uniform on the complex unit 3-sphere,
    phase uniform in [0, 2*pi). Needs a numpy Generator."""
    while True:
        v = np.asarray(rng.normal(size=4))
        r = float(np.linalg.norm(v))
        if r > 1e-12:
            break
    v = v / r
    return Unitary1Q(complex(v[0], v[1]), complex(v[2], v[3]), float(rng.uniform(0.0, 2.0 * math.pi)))


def dump_amplitudes(state: StateVector, tol: float = AMPLITUDE_TOL) -> str:
    """Debug dump: one line per nonzero amplitude, "bitstring re im", by index."""
    lines = []
    for i, a in enumerate(state.amplitudes):
        if abs(a) > tol:
            lines.append(f"{bitstring(i, state.n_qubits)} {float(a.real)!r} {float(a.imag)!r}")
    return "\n".join(lines)
