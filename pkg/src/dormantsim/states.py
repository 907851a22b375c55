"""State families with dormant pair entanglement, and what controller
measurements do to them.

Three families, all built by explicit circuits and checked against their
closed forms:

- psi3: (1/2)[(|00> + |11>)|0> + (|01> + |10>)|1>] on (q1, q2, q3). The
  q1-q2 pair is separable on its own; measuring q3 in the computational
  basis collapses it to a Bell state, measuring q3 in the Hadamard basis
  collapses it to a product state.
- psiN: the n-qubit generalization, uniform amplitude 2**(-(n-1)/2) on the
  even-parity bitstrings. Invariant under any qubit permutation, so every
  pair is a dormant pair with the remaining qubits as controllers.
- psi3L: psi3 with a lock qubit CX-entangled to q2, register order
  (q1, q2, q3, qL). The lock removes all q1-q2 correlation in every basis
  until it is measured in the Hadamard basis.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    MAX_QUBITS,
    StateVector,
    Unitary1Q,
    apply_1q,
    apply_cx,
    apply_matrix,
    new_basis_state,
)

ENTANGLEMENT_TOL = 1e-10
AMP_CHECK_TOL = 1e-12
_ZERO_ROW_PROB = 1e-15


@dataclass(frozen=True)
class DormantFamily:
    """A constructed family state plus its bookkeeping."""

    kind: str  # "psi3" | "psiN" | "psi3L"
    n_qubits: int
    state: StateVector
    lock_index: int | None = None


def concurrence(state: StateVector) -> float:
    """2|ad - bc| for a 2-qubit pure state a|00> + b|01> + c|10> + d|11>.

    Zero exactly for product states, 1 for Bell states.
    """
    if state.n_qubits != 2:
        raise ValueError("concurrence closed form needs a 2-qubit pure state")
    a, b, c, d = state.amplitudes
    return float(2.0 * abs(a * d - b * c))


def _chain_state(n: int) -> StateVector:
    # Bell pair on (q1, q2), then for each new qubit k: H(k), CX(k -> k-1).
    # Each step sends psi -> (psi|0> + (X on the previous qubit)psi|1>)/sqrt(2).
    state = new_basis_state(n, "0" * n)
    h = Unitary1Q.hadamard()
    state = apply_1q(state, h, 1)
    state = apply_cx(state, 1, 2)
    for k in range(3, n + 1):
        state = apply_1q(state, h, k)
        state = apply_cx(state, k, k - 1)
    return state


def _index_parities(dim: int) -> np.ndarray:
    idx = np.arange(dim)
    for shift in (16, 8, 4, 2, 1):
        idx = idx ^ (idx >> shift)
    return idx & 1


def _check_even_parity_uniform(state: StateVector) -> None:
    # Construction sanity: support must be exactly the even-parity strings
    # with one shared amplitude.
    par = _index_parities(state.dim)
    amps = state.amplitudes
    value = 2.0 ** (-(state.n_qubits - 1) / 2.0)
    if not np.allclose(amps[par == 0], value, atol=AMP_CHECK_TOL) or not np.allclose(
        amps[par == 1], 0.0, atol=AMP_CHECK_TOL
    ):
        raise RuntimeError("chain circuit produced an unexpected state")


def build_psi_n(n: int) -> DormantFamily:
    """n-qubit dormant family (2 <= n <= 20). n=2 is the plain Bell pair."""
    if not 2 <= n <= MAX_QUBITS:
        raise ValueError(f"n must be in 2..{MAX_QUBITS}, got {n}")
    state = _chain_state(n)
    _check_even_parity_uniform(state)
    return DormantFamily("psiN", n, state)


def build_psi3() -> DormantFamily:
    """The 3-qubit family state, amplitude 1/2 on {000, 011, 101, 110}."""
    state = _chain_state(3)
    expected = np.zeros(8, dtype=np.complex128)
    expected[[0b000, 0b011, 0b101, 0b110]] = 0.5
    if not np.allclose(state.amplitudes, expected, atol=AMP_CHECK_TOL):
        raise RuntimeError("psi3 circuit does not match its closed form")
    return DormantFamily("psi3", 3, state)


def build_psi3_lock() -> DormantFamily:
    """psi3 with a lock qubit: CX from q2 onto a fresh qL, order (q1, q2, q3, qL).

    Amplitude 1/2 on {0000, 0111, 1010, 1101}.
    """
    base = _chain_state(3)
    amps = np.kron(base.amplitudes, np.array([1.0, 0.0]))
    state = apply_cx(StateVector(4, amps), 2, 4)
    expected = np.zeros(16, dtype=np.complex128)
    expected[[0b0000, 0b0111, 0b1010, 0b1101]] = 0.5
    if not np.allclose(state.amplitudes, expected, atol=AMP_CHECK_TOL):
        raise RuntimeError("psi3L circuit does not match its closed form")
    return DormantFamily("psi3L", 4, state, lock_index=4)


@dataclass(frozen=True)
class ActivationRow:
    """One controller outcome pattern and the endpoint pair it leaves behind.

    state is None only for patterns of probability ~0, where no collapsed
    state exists (never hit by the three families with computational or
    Hadamard controller bases).
    """

    pattern: str
    probability: float
    state: StateVector | None
    concurrence: float | None


@dataclass(frozen=True)
class ActivationTable:
    """Exhaustive what-if over controller outcomes for one endpoint pair."""

    endpoints: tuple[int, int]
    controllers: tuple[int, ...]
    bases: dict[int, Unitary1Q]
    rows: tuple[ActivationRow, ...]

    def to_json_dict(self) -> dict:
        return {
            "endpoints": list(self.endpoints),
            "controllers": [
                {"qubit": q, "basis": self.bases[q].to_json_dict()} for q in self.controllers
            ],
            "rows": [
                {
                    "pattern": row.pattern,
                    "probability": row.probability,
                    "state": _interleave(row.state),
                    "concurrence": row.concurrence,
                }
                for row in self.rows
            ],
        }


def _interleave(state: StateVector | None) -> list[float]:
    if state is None:
        return []
    out: list[float] = []
    for a in state.amplitudes:
        out.extend((a.real, a.imag))
    return out


def activation_table(
    family: DormantFamily,
    endpoints: tuple[int, int],
    controller_bases: dict[int, Unitary1Q],
) -> ActivationTable:
    """Enumerate every controller outcome pattern with its probability, the
    collapsed endpoint pair state, and that state's concurrence.

    Patterns are bitstrings over the controllers in ascending qubit order;
    rows are listed in binary order. The endpoint state orders its two
    qubits as the endpoints tuple does.
    """
    n = family.n_qubits
    e1, e2 = endpoints
    if e1 == e2:
        raise ValueError("endpoints must be distinct")
    for q in (e1, e2):
        if not 1 <= q <= n:
            raise ValueError(f"endpoint {q} out of range 1..{n}")
    controllers = tuple(q for q in range(1, n + 1) if q not in (e1, e2))
    if set(controller_bases) != set(controllers):
        raise ValueError(
            f"controller_bases must assign exactly the qubits {controllers}, "
            f"got {sorted(controller_bases)}"
        )
    amps = family.state.amplitudes
    for c in controllers:
        amps = apply_matrix(amps, n, c, controller_bases[c].inverse().matrix())
    tensor = amps.reshape((2,) * n)

    rows = []
    for bits in itertools.product((0, 1), repeat=len(controllers)):
        index: list = [slice(None)] * n
        for c, b in zip(controllers, bits):
            index[c - 1] = b
        sub = np.asarray(tensor[tuple(index)])
        if e1 > e2:
            sub = sub.T
        vec = sub.reshape(-1).copy()
        prob = float(np.sum(np.abs(vec) ** 2))
        pattern = "".join(map(str, bits))
        if prob <= _ZERO_ROW_PROB:
            rows.append(ActivationRow(pattern, 0.0, None, None))
        else:
            endpoint_state = StateVector(2, vec / math.sqrt(prob))
            rows.append(ActivationRow(pattern, prob, endpoint_state, concurrence(endpoint_state)))
    return ActivationTable((e1, e2), controllers, dict(controller_bases), tuple(rows))


def destruction_check(family: DormantFamily, endpoints: tuple[int, int], deviant_controller: int) -> bool:
    """True when one Hadamard deviant (all other controllers computational)
    leaves the endpoint pair unentangled in every outcome branch."""
    if deviant_controller in endpoints:
        raise ValueError("the deviant controller cannot be an endpoint")
    controllers = tuple(q for q in range(1, family.n_qubits + 1) if q not in endpoints)
    if deviant_controller not in controllers:
        raise ValueError(f"qubit {deviant_controller} is not a controller")
    bases = {c: Unitary1Q.identity() for c in controllers}
    bases[deviant_controller] = Unitary1Q.hadamard()
    table = activation_table(family, endpoints, bases)
    return all(
        row.concurrence < ENTANGLEMENT_TOL for row in table.rows if row.state is not None
    )
