"""Density matrices, partial trace, PPT separability, and the conditional
probability algebra that distinguishes the entanglement levels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import StateVector, Unitary1Q, apply_matrix
from .states import DormantFamily, activation_table

HERMITIAN_TOL = 1e-12
CORRELATION_TOL = 1e-10
_BRANCH_EPS = 1e-12  # below this, a conditioning branch is treated as absent


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace matrix of a (possibly mixed) qubit subsystem."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 1 << self.n_qubits
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got shape {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(mat) - 1.0) > HERMITIAN_TOL:
            raise ValueError(f"trace is {np.trace(mat)}, not 1")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def to_json_dict(self) -> dict:
        flat: list[float] = []
        for entry in self.matrix.reshape(-1):
            flat.extend((entry.real, entry.imag))
        return {"n_qubits": self.n_qubits, "matrix": flat}


def density_from_state(state: StateVector) -> DensityMatrix:
    """Rank-1 projector |psi><psi|."""
    return DensityMatrix(state.n_qubits, np.outer(state.amplitudes, state.amplitudes.conj()))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out everything but `keep`; kept qubits stay in register order."""
    keep_sorted = sorted(set(int(q) for q in keep))
    if not keep_sorted:
        raise ValueError("keep set must be nonempty")
    n = rho.n_qubits
    if keep_sorted[0] < 1 or keep_sorted[-1] > n:
        raise ValueError(f"keep set {keep_sorted} not within 1..{n}")
    traced = [q for q in range(1, n + 1) if q not in set(keep_sorted)]
    k = len(keep_sorted)
    arr = rho.matrix.reshape((2,) * (2 * n))
    order = (
        [q - 1 for q in keep_sorted]
        + [n + q - 1 for q in keep_sorted]
        + [q - 1 for q in traced]
        + [n + q - 1 for q in traced]
    )
    arr = arr.transpose(order).reshape(1 << k, 1 << k, 1 << (n - k), 1 << (n - k))
    return DensityMatrix(k, np.einsum("abcc->ab", arr))


def ppt_min_eigenvalue(rho: DensityMatrix) -> float:
    """Minimum eigenvalue of the partial transpose over the second qubit.

    For two qubits, >= 0 (up to numerical tolerance) iff the state is
    separable; for pure 2-qubit states the criterion is side-independent.
    """
    if rho.n_qubits != 2:
        raise ValueError("partial transpose test implemented for exactly 2 qubits")
    r = rho.matrix.reshape(2, 2, 2, 2)
    pt = r.transpose(0, 3, 2, 1).reshape(4, 4)
    return float(np.linalg.eigvalsh(pt).min())


@dataclass(frozen=True)
class CorrelationReport:
    """Marginal and conditional outcome-0 probabilities for one qubit pair.

    Conditionals on a branch of probability < 1e-12 are reported as None.
    correlated is True when any available conditional deviates from the
    marginal by more than 1e-10.
    """

    pair: tuple[int, int]  # (measured, target)
    bases: tuple[Unitary1Q, Unitary1Q]
    p_marginal: float
    p_conditional_given_0: float | None
    p_conditional_given_1: float | None
    correlated: bool

    def deviation(self) -> float:
        devs = [
            abs(c - self.p_marginal)
            for c in (self.p_conditional_given_0, self.p_conditional_given_1)
            if c is not None
        ]
        return max(devs, default=0.0)

    def to_json_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "bases": {
                "measured": self.bases[0].to_json_dict(),
                "target": self.bases[1].to_json_dict(),
            },
            "p_marginal": self.p_marginal,
            "p_conditional_given_0": self.p_conditional_given_0,
            "p_conditional_given_1": self.p_conditional_given_1,
            "correlated": self.correlated,
        }


def conditional_report(
    state: StateVector,
    measured: int,
    measured_basis: Unitary1Q,
    target: int,
    target_basis: Unitary1Q,
) -> CorrelationReport:
    """p(target = 0), p(target = 0 | measured = 0/1) in the given bases."""
    if measured == target:
        raise ValueError("measured and target qubits must differ")
    n = state.n_qubits
    for q, name in ((measured, "measured"), (target, "target")):
        if not 1 <= q <= n:
            raise ValueError(f"{name} qubit {q} out of range 1..{n}")
    amps = apply_matrix(state.amplitudes, n, measured, measured_basis.inverse().matrix())
    amps = apply_matrix(amps, n, target, target_basis.inverse().matrix())
    probs = (np.abs(amps) ** 2).reshape((2,) * n)
    other_axes = tuple(i for i in range(n) if i not in (measured - 1, target - 1))
    joint = probs.sum(axis=other_axes) if other_axes else probs
    if measured > target:  # remaining axes come out in register order
        joint = joint.T

    p_marginal = float(joint[0, 0] + joint[1, 0])
    conditionals: list[float | None] = []
    for m in (0, 1):
        p_branch = float(joint[m, 0] + joint[m, 1])
        conditionals.append(float(joint[m, 0] / p_branch) if p_branch > _BRANCH_EPS else None)
    devs = [abs(c - p_marginal) for c in conditionals if c is not None]
    return CorrelationReport(
        pair=(measured, target),
        bases=(measured_basis, target_basis),
        p_marginal=p_marginal,
        p_conditional_given_0=conditionals[0],
        p_conditional_given_1=conditionals[1],
        correlated=max(devs, default=0.0) > CORRELATION_TOL,
    )


def lockless_deviation(u1: Unitary1Q, u2: Unitary1Q) -> float:
    """Closed form for p(q2 = 0 | q1 = 0) - 1/2 after rotating the two
    endpoint qubits of the 3-qubit family by u1 and u2 and measuring in
    the computational basis.

    With u1 = (a1, a2, alpha) and u2 = (b1, b2, beta):
      Re(a1 b1 a2 b2 e^{-i(alpha+beta)}) + Re(a1 b1* a2 b2* e^{i(beta-alpha)})
    Vanishes whenever either rotation keeps the computational basis, and is
    identically zero once the lock qubit is attached.
    """
    a1, a2, alpha = u1.a1, u1.a2, u1.phase
    b1, b2, beta = u2.a1, u2.a2, u2.phase
    term1 = a1 * b1 * a2 * b2 * np.exp(-1j * (alpha + beta))
    term2 = a1 * b1.conjugate() * a2 * b2.conjugate() * np.exp(1j * (beta - alpha))
    return float(term1.real + term2.real)


def no_signalling_check(
    family: DormantFamily,
    endpoints: tuple[int, int],
    remote_basis: Unitary1Q,
    tol: float = CORRELATION_TOL,
) -> bool:
    """Measure every controller in remote_basis and forget the outcomes:
    the endpoint pair's density matrix must equal the plain partial trace."""
    e_sorted = tuple(sorted(endpoints))
    controllers = [q for q in range(1, family.n_qubits + 1) if q not in e_sorted]
    bases = {c: remote_basis for c in controllers}
    table = activation_table(family, e_sorted, bases)
    mixed = np.zeros((4, 4), dtype=np.complex128)
    for row in table.rows:
        if row.state is not None:
            v = row.state.amplitudes
            mixed += row.probability * np.outer(v, v.conj())
    plain = partial_trace(density_from_state(family.state), e_sorted)
    return bool(np.max(np.abs(mixed - plain.matrix)) <= tol)
