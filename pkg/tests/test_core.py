import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dormantsim.core import (
    MeasurementRecord,
    PermutationMap,
    StateVector,
    Unitary1Q,
    apply_1q,
    apply_cx,
    apply_permutation,
    dump_amplitudes,
    fidelity,
    measure_qubit,
    new_basis_state,
    outcome_probability,
    random_unitary_1q,
)
from dormantsim.states import build_psi3, build_psi3_lock

SQRT1_2 = math.sqrt(0.5)


# hypothesis strategies: states and rotations derived from integer seeds so
# shrinking stays cheap

@st.composite
def random_states(draw, min_qubits=1, max_qubits=5):
    n = draw(st.integers(min_qubits, max_qubits))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, v / np.linalg.norm(v))


@st.composite
def random_rotations(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_unitary_1q(np.random.default_rng(seed))


def test_basis_state_examples():
    assert np.array_equal(new_basis_state(1, "0").amplitudes, [1, 0])
    two = new_basis_state(2, "10")
    assert two.amplitudes[2] == 1 and np.sum(np.abs(two.amplitudes)) == 1
    three = new_basis_state(3, "011")
    assert three.amplitudes[3] == 1


def test_basis_state_rejects_bad_bits():
    with pytest.raises(ValueError):
        new_basis_state(3, "01")
    with pytest.raises(ValueError):
        new_basis_state(2, "0x")


def test_statevector_rejects_unnormalized():
    with pytest.raises(ValueError):
        StateVector(1, np.array([1.0, 1.0]))


def test_statevector_amplitudes_are_readonly():
    s = new_basis_state(2, "00")
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0.0


def test_hadamard_on_zero_gives_plus():
    s = apply_1q(new_basis_state(1, "0"), Unitary1Q.hadamard(), 1)
    assert np.allclose(s.amplitudes, [SQRT1_2, SQRT1_2], atol=1e-12)


def test_hadamard_on_q3_of_psi3():
    # (|++>|0> + |-->|1>)/sqrt(2): signs +,+,+,-,+,-,+,+ over indices 0..7
    s = apply_1q(build_psi3().state, Unitary1Q.hadamard(), 3)
    expected = np.array([1, 1, 1, -1, 1, -1, 1, 1], dtype=complex) / (2 * math.sqrt(2))
    assert np.allclose(s.amplitudes, expected, atol=1e-12)


def test_identity_gate_keeps_amplitudes():
    s = build_psi3().state
    out = apply_1q(s, Unitary1Q.identity(), 2)
    assert np.allclose(out.amplitudes, s.amplitudes, atol=1e-12)


def test_named_constructors_match_their_matrices():
    assert np.allclose(Unitary1Q.identity().matrix(), np.eye(2), atol=1e-12)
    assert np.allclose(
        Unitary1Q.hadamard().matrix(), np.array([[1, 1], [1, -1]]) * SQRT1_2, atol=1e-12
    )
    assert np.allclose(Unitary1Q.pauli_x().matrix(), np.array([[0, 1], [1, 0]]), atol=1e-12)


def test_unitary_rejects_non_unit_pair():
    with pytest.raises(ValueError):
        Unitary1Q(1.0, 1.0, 0.0)


def test_cx_truth_table():
    assert np.argmax(np.abs(apply_cx(new_basis_state(2, "10"), 1, 2).amplitudes)) == 0b11
    assert np.argmax(np.abs(apply_cx(new_basis_state(2, "00"), 1, 2).amplitudes)) == 0b00


def test_cx_rejects_equal_wires():
    with pytest.raises(ValueError):
        apply_cx(new_basis_state(2, "00"), 1, 1)


def test_cx_builds_locked_state_from_psi3():
    base = build_psi3().state
    padded = StateVector(4, np.kron(base.amplitudes, [1.0, 0.0]))
    locked = apply_cx(padded, 2, 4)
    assert np.allclose(locked.amplitudes, build_psi3_lock().state.amplitudes, atol=1e-12)


def test_permutation_identity_and_swap():
    s = build_psi3().state
    assert np.allclose(
        apply_permutation(s, PermutationMap.identity(3)).amplitudes, s.amplitudes
    )
    # the 3-qubit family state is symmetric under any relabeling
    assert np.allclose(
        apply_permutation(s, PermutationMap.swap(3, 1, 3)).amplitudes, s.amplitudes, atol=1e-14
    )
    flipped = apply_permutation(new_basis_state(2, "01"), PermutationMap.swap(2, 1, 2))
    assert np.argmax(np.abs(flipped.amplitudes)) == 0b10


def test_permutation_rejects_non_bijection():
    with pytest.raises(ValueError):
        PermutationMap((1, 1, 3))


def test_outcome_probability_examples():
    comp = Unitary1Q.identity()
    assert outcome_probability(build_psi3().state, 2, comp, 0) == pytest.approx(0.5, abs=1e-12)
    assert outcome_probability(new_basis_state(3, "000"), 1, comp, 1) == 0.0


def test_outcome_probability_rotated_lock_state():
    rng = np.random.default_rng(11)
    state = build_psi3_lock().state
    for _ in range(20):
        rotated = apply_1q(state, random_unitary_1q(rng), 1)
        rotated = apply_1q(rotated, random_unitary_1q(rng), 2)
        p = outcome_probability(rotated, 2, Unitary1Q.identity(), 0)
        assert p == pytest.approx(0.5, abs=1e-9)


def test_measure_collapse_computational():
    # outcome 0 -> (|00> + |11>)|0>/sqrt(2), outcome 1 -> (|01> + |10>)|1>/sqrt(2)
    expectations = {
        0: np.array([1, 0, 0, 0, 0, 0, 1, 0], dtype=complex) / math.sqrt(2),
        1: np.array([0, 0, 0, 1, 0, 1, 0, 0], dtype=complex) / math.sqrt(2),
    }
    record, collapsed = measure_qubit(build_psi3().state, 3, Unitary1Q.identity(), np.random.default_rng(0))
    assert record.probability == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(collapsed.amplitudes, expectations[record.outcome], atol=1e-12)


def test_measure_collapse_hadamard():
    # q3 in the Hadamard basis leaves (q1, q2) in |++> or |-->
    plus = np.array([1, 1], dtype=complex) * SQRT1_2
    minus = np.array([1, -1], dtype=complex) * SQRT1_2
    record, collapsed = measure_qubit(build_psi3().state, 3, Unitary1Q.hadamard(), np.random.default_rng(3))
    side = plus if record.outcome == 0 else minus
    expected = StateVector(3, np.kron(np.kron(side, side), side))
    assert fidelity(collapsed, expected) == pytest.approx(1.0, abs=1e-10)


def test_measure_basis_state_is_deterministic():
    record, collapsed = measure_qubit(new_basis_state(3, "010"), 2, Unitary1Q.identity(), np.random.default_rng(5))
    assert record.outcome == 1
    assert record.probability == pytest.approx(1.0, abs=1e-12)
    assert fidelity(collapsed, new_basis_state(3, "010")) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_examples():
    psi = build_psi3().state
    assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(new_basis_state(1, "0"), new_basis_state(1, "1")) == 0.0
    plus = apply_1q(new_basis_state(1, "0"), Unitary1Q.hadamard(), 1)
    assert fidelity(new_basis_state(1, "0"), plus) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError):
        fidelity(new_basis_state(1, "0"), new_basis_state(2, "00"))


def test_dump_amplitudes_format():
    dump = dump_amplitudes(build_psi3().state)
    lines = dump.splitlines()
    assert len(lines) == 4
    assert lines[0].split()[0] == "000"
    assert [ln.split()[0] for ln in lines] == sorted(ln.split()[0] for ln in lines)
    re_val = float(lines[0].split()[1])
    assert re_val == pytest.approx(0.5, abs=1e-12)


@given(random_states(), random_rotations(), st.integers(1, 5))
@settings(deadline=None)
def test_gates_preserve_norm(state, gate, qubit):
    if qubit > state.n_qubits:
        qubit = 1 + qubit % state.n_qubits
    out = apply_1q(state, gate, qubit)
    assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1.0) < 1e-12


@given(random_states(min_qubits=2), st.integers(0, 2**32 - 1))
@settings(deadline=None)
def test_cx_and_permutation_preserve_norm(state, seed):
    rng = np.random.default_rng(seed)
    control, target = rng.choice(state.n_qubits, size=2, replace=False) + 1
    out = apply_cx(state, int(control), int(target))
    assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1.0) < 1e-12
    perm = PermutationMap(tuple(int(x) + 1 for x in rng.permutation(state.n_qubits)))
    out = apply_permutation(state, perm)
    assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1.0) < 1e-12


@given(random_states(), random_rotations())
@settings(deadline=None)
def test_unitary_roundtrip_restores_state(state, gate):
    out = apply_1q(apply_1q(state, gate, 1), gate.inverse(), 1)
    assert np.max(np.abs(out.amplitudes - state.amplitudes)) < 1e-12


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
@settings(deadline=None)
def test_permutation_composition(n, seed):
    rng = np.random.default_rng(seed)
    p = PermutationMap(tuple(int(x) + 1 for x in rng.permutation(n)))
    q = PermutationMap(tuple(int(x) + 1 for x in rng.permutation(n)))
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    state = StateVector(n, v / np.linalg.norm(v))
    combined = apply_permutation(state, p.compose(q))
    stepwise = apply_permutation(apply_permutation(state, q), p)
    assert np.max(np.abs(combined.amplitudes - stepwise.amplitudes)) < 1e-14


@given(random_states(), random_rotations(), st.integers(1, 5))
@settings(deadline=None)
def test_outcome_probabilities_sum_to_one(state, basis, qubit):
    if qubit > state.n_qubits:
        qubit = 1 + qubit % state.n_qubits
    total = sum(outcome_probability(state, qubit, basis, b) for b in (0, 1))
    assert total == pytest.approx(1.0, abs=1e-12)


@given(st.integers(0, 2**32 - 1))
@settings(deadline=None)
def test_measurement_sequences_replay_from_seed(seed):
    def run():
        rng = np.random.default_rng(seed)
        state = build_psi3_lock().state
        records = []
        for qubit, basis in ((3, Unitary1Q.identity()), (4, Unitary1Q.hadamard())):
            record, state = measure_qubit(state, qubit, basis, rng)
            records.append(record)
        return records, state

    first_records, first_state = run()
    second_records, second_state = run()
    assert first_records == second_records
    assert np.array_equal(first_state.amplitudes, second_state.amplitudes)
    assert all(isinstance(r, MeasurementRecord) for r in first_records)
