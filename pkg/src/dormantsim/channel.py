"""n-party collective channel: one shared n-qubit dormant state, any two
parties as endpoints, everyone else as controllers.

Protocol, in order: each controller measures its own qubit and appends an
undelivered classical message; a delivery step then resolves the session.
Resolution needs a message from every controller (complete consensus). If
every declared basis was computational the session activates and the
endpoint pair is a Bell variant picked by the parity of the delivered
outcome bits; any other basis choice destroys the session. Both outcomes
are terminal.

A session owns its shared state; calls on one session are meant to be
serialized, while distinct sessions are fully independent.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import (
    StateVector,
    Unitary1Q,
    apply_1q,
    apply_cx,
    apply_matrix,
    fidelity,
    measure_qubit,
)
from .states import build_psi_n, concurrence

MAX_PARTIES = 12  # keeps exhaustive 2**(n-2) branch enumeration instant

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)

STATUS_DORMANT = "dormant"
STATUS_ACTIVATED = "activated"
STATUS_DESTROYED = "destroyed"

VARIANT_PHI1 = "phi1"  # (|00> + |11>)/sqrt(2), even outcome parity
VARIANT_PHI2 = "phi2"  # (|01> + |10>)/sqrt(2), odd outcome parity


class ProtocolError(Exception):
    """A step was attempted out of order or without consensus."""


@dataclass(frozen=True)
class Party:
    id: int
    qubit: int
    role: str  # "endpoint" | "controller"


@dataclass
class ClassicalMessage:
    """One controller's declared basis and outcome; activation logic only
    ever reads delivered messages."""

    sender: int
    basis: Unitary1Q
    outcome: int
    delivered: bool = False


@dataclass(frozen=True)
class ResourcePlan:
    """Qubit counts: point-to-point pairs for every two parties versus k
    shared copies of the collective state."""

    n: int
    k: int
    point_to_point_qubits: int
    collective_qubits: int

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "point_to_point_qubits": self.point_to_point_qubits,
            "collective_qubits": self.collective_qubits,
        }


def plan_resources(n: int, k: int) -> ResourcePlan:
    """n(n-1) qubits for the point-to-point mesh versus k*n collective."""
    if n < 3:
        raise ValueError(f"need at least 3 parties, got {n}")
    if k < 1:
        raise ValueError(f"need at least 1 pair, got {k}")
    return ResourcePlan(n=n, k=k, point_to_point_qubits=n * (n - 1), collective_qubits=k * n)


@dataclass
class ChannelSession:
    n: int
    parties: tuple[Party, ...]
    endpoints: tuple[int, int]
    shared_state: StateVector
    transcript: list[ClassicalMessage] = field(default_factory=list)
    status: str = STATUS_DORMANT
    bell_variant: str | None = None
    endpoint_state: StateVector | None = None
    endpoint_concurrence: float | None = None
    teleport_fidelities: list[float] = field(default_factory=list)

    @property
    def controllers(self) -> tuple[int, ...]:
        return tuple(p.id for p in self.parties if p.role == "controller")

    def _message_from(self, party_id: int) -> ClassicalMessage | None:
        for msg in self.transcript:
            if msg.sender == party_id:
                return msg
        return None

    def controller_measure(self, controller_id: int, basis: Unitary1Q, rng) -> ClassicalMessage:
        """Measure one controller's qubit in its declared basis and append
        the (not yet delivered) classical message."""
        if self.status != STATUS_DORMANT:
            raise ProtocolError(f"session is {self.status}; no further measurements")
        if controller_id not in self.controllers:
            raise ValueError(f"party {controller_id} is not a controller")
        if self._message_from(controller_id) is not None:
            raise ProtocolError(f"controller {controller_id} already measured")
        record, collapsed = measure_qubit(self.shared_state, controller_id, basis, rng)
        self.shared_state = collapsed
        msg = ClassicalMessage(sender=controller_id, basis=basis, outcome=record.outcome)
        self.transcript.append(msg)
        return msg

    def deliver_and_resolve(self) -> str:
        """Deliver every message and settle the session.

        All-computational declared bases activate the endpoint pair as
        phi1/phi2 by outcome parity; anything else destroys it. Needs a
        message from every controller first.
        """
        if self.status != STATUS_DORMANT:
            raise ProtocolError(f"session already resolved to {self.status}")
        missing = [c for c in self.controllers if self._message_from(c) is None]
        if missing:
            raise ProtocolError(f"consensus incomplete: controllers {missing} have not measured")
        for msg in self.transcript:
            msg.delivered = True
        self.endpoint_state = self._extract_endpoint_state()
        self.endpoint_concurrence = concurrence(self.endpoint_state)
        if all(msg.basis.is_computational() for msg in self.transcript):
            parity = 0
            for msg in self.transcript:
                parity ^= msg.outcome
            self.bell_variant = VARIANT_PHI1 if parity == 0 else VARIANT_PHI2
            self.status = STATUS_ACTIVATED
        else:
            self.status = STATUS_DESTROYED
        return self.status

    def _extract_endpoint_state(self) -> StateVector:
        # Rotate each measured controller back to the computational frame,
        # then slice its axis at the recorded outcome.
        amps = self.shared_state.amplitudes
        for msg in self.transcript:
            amps = apply_matrix(amps, self.n, msg.sender, msg.basis.inverse().matrix())
        tensor = amps.reshape((2,) * self.n)
        index: list = [slice(None)] * self.n
        for msg in self.transcript:
            index[msg.sender - 1] = msg.outcome
        sub = np.asarray(tensor[tuple(index)])
        e1, e2 = self.endpoints
        if e1 > e2:
            sub = sub.T
        vec = sub.reshape(-1).copy()
        return StateVector(2, vec / np.linalg.norm(vec))

    def teleport_over(self, payload: StateVector, rng) -> float:
        """Teleport a 1-qubit payload from the first endpoint to the second
        over the activated pair; returns the fidelity with the payload.

        Standard protocol: CX from payload onto the sender half, H on the
        payload, measure both, then conditional X/Z corrections on the
        receiver half. The phi2 variant prepends one extra bit flip, since
        phi2 is phi1 with the receiver half flipped.
        """
        if self.status != STATUS_ACTIVATED:
            raise ProtocolError(
                f"session is {self.status}; only an activated pair carries quantum traffic"
            )
        if payload.n_qubits != 1:
            raise ValueError("payload must be a single qubit")
        assert self.endpoint_state is not None
        three = StateVector(3, np.kron(payload.amplitudes, self.endpoint_state.amplitudes))
        three = apply_cx(three, 1, 2)
        three = apply_1q(three, Unitary1Q.hadamard(), 1)
        comp = Unitary1Q.identity()
        rec1, three = measure_qubit(three, 1, comp, rng)
        rec2, three = measure_qubit(three, 2, comp, rng)
        received = three.amplitudes.reshape(2, 2, 2)[rec1.outcome, rec2.outcome, :].copy()
        received = received / np.linalg.norm(received)
        if self.bell_variant == VARIANT_PHI2:
            received = _X @ received
        if rec2.outcome == 1:
            received = _X @ received
        if rec1.outcome == 1:
            received = _Z @ received
        result = fidelity(StateVector(1, received), payload)
        self.teleport_fidelities.append(result)
        return result

    def transcript_records(self) -> list[dict]:
        """Message records in delivery order, plus a final status record
        once the session has resolved."""
        records = [
            {
                "ordinal": i,
                "from": msg.sender,
                "basis": msg.basis.to_json_dict(),
                "outcome": msg.outcome,
                "delivered": msg.delivered,
            }
            for i, msg in enumerate(self.transcript)
        ]
        if self.status != STATUS_DORMANT:
            final: dict = {"status": self.status, "concurrence": self.endpoint_concurrence}
            if self.bell_variant is not None:
                final["bell_variant"] = self.bell_variant
            if self.teleport_fidelities:
                final["teleport_fidelity"] = self.teleport_fidelities[-1]
            records.append(final)
        return records

    def transcript_jsonl(self) -> str:
        return "\n".join(json.dumps(r, sort_keys=True) for r in self.transcript_records())


def setup_session(n: int, endpoints: tuple[int, int]) -> ChannelSession:
    """Fresh dormant session: the shared n-qubit family state with one qubit
    per party, the two named parties as endpoints."""
    if not 3 <= n <= MAX_PARTIES:
        raise ValueError(f"party count must be in 3..{MAX_PARTIES}, got {n}")
    e1, e2 = endpoints
    if e1 == e2:
        raise ValueError("endpoints must be two distinct parties")
    for e in endpoints:
        if not 1 <= e <= n:
            raise ValueError(f"endpoint {e} out of range 1..{n}")
    parties = tuple(
        Party(id=i, qubit=i, role="endpoint" if i in (e1, e2) else "controller")
        for i in range(1, n + 1)
    )
    return ChannelSession(
        n=n,
        parties=parties,
        endpoints=(e1, e2),
        shared_state=build_psi_n(n).state,
    )
