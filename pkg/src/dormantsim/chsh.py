"""CHSH correlation tests on a qubit pair inside a larger register.

Observable quadruple, for rotations U (side A) and V (side B):

    A0 = U sz U+          B0 = -(sx + sz)/sqrt(2), conjugated by V
    A1 = U sx U+          B1 =  (sx - sz)/sqrt(2), conjugated by V

The sum S = +-<A0 B0> +- <A0 B1> +- <A1 B0> +- <A1 B1> is only counted for
sign patterns whose single odd sign sits in the 3rd or 4th slot (the two
classic CHSH combinations and their negatives); the full 8-pattern family
is available for exploration via ALL_PATTERNS.

Expectations are computed exactly from the statevector, so tolerances are
floating point only. S_max is capped by 2*sqrt(2) for every quantum state;
product states stay at or below the classical value 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import StateVector, Unitary1Q, apply_matrix, random_unitary_1q
from .entanglement import conditional_report

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)

TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
CLASSIFY_TOL = 1e-9

LEVEL_TYPE1 = "Type1"  # Bell pair: perfect correlation in both bases, S_max = 2*sqrt(2)
LEVEL_TYPE2 = "Type2"  # dormant pair: no computational correlation, 0 < S_max < 2*sqrt(2)
LEVEL_TYPE3 = "Type3"  # locked pair: no correlation in any basis, S_max = 0
LEVEL_OTHER = "Other"


@dataclass(frozen=True)
class SignPattern:
    """Signs applied to (A0B0, A0B1, A1B0, A1B1); exactly one differs."""

    signs: tuple[int, int, int, int]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        object.__setattr__(self, "signs", signs)
        if len(signs) != 4 or any(s not in (-1, 1) for s in signs):
            raise ValueError(f"signs must be four values of +-1, got {signs}")
        if sum(signs) not in (-2, 2):
            raise ValueError(f"exactly one sign must differ from the other three: {signs}")

    @property
    def odd_position(self) -> int:
        """1-based slot of the sign that differs from the other three."""
        majority = 1 if sum(self.signs) > 0 else -1
        return self.signs.index(-majority) + 1

    @property
    def admissible(self) -> bool:
        """True for the default family: odd sign in the 3rd or 4th slot."""
        return self.odd_position in (3, 4)


def _patterns(odd_positions) -> tuple[SignPattern, ...]:
    out = []
    for pos in odd_positions:
        for majority in (1, -1):
            signs = [majority] * 4
            signs[pos - 1] = -majority
            out.append(SignPattern(tuple(signs)))
    return tuple(out)


ADMISSIBLE_PATTERNS = _patterns((3, 4))
ALL_PATTERNS = _patterns((1, 2, 3, 4))


@dataclass(frozen=True)
class CHSHSetting:
    """Observable quadruple determined by the two rotations."""

    u: Unitary1Q
    v: Unitary1Q

    def observables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        um = self.u.matrix()
        vm = self.v.matrix()
        a0 = um @ SIGMA_Z @ um.conj().T
        a1 = um @ SIGMA_X @ um.conj().T
        b0 = vm @ (-(SIGMA_X + SIGMA_Z) / math.sqrt(2.0)) @ vm.conj().T
        b1 = vm @ ((SIGMA_X - SIGMA_Z) / math.sqrt(2.0)) @ vm.conj().T
        return a0, a1, b0, b1

    def to_json_dict(self) -> dict:
        return {"u": self.u.to_json_dict(), "v": self.v.to_json_dict()}


def default_setting() -> CHSHSetting:
    """Unrotated observables: A0 = sz, A1 = sx, B0/B1 the diagonal pair."""
    return CHSHSetting(Unitary1Q.identity(), Unitary1Q.identity())


def rotated_setting(u: Unitary1Q, v: Unitary1Q) -> CHSHSetting:
    return CHSHSetting(u, v)


@dataclass(frozen=True)
class CHSHResult:
    correlators: tuple[float, float, float, float]  # (A0B0, A0B1, A1B0, A1B1)
    patterns: tuple[SignPattern, ...]
    s_per_pattern: tuple[float, ...]
    s_max: float
    best_pattern: SignPattern
    setting: CHSHSetting

    def to_json_dict(self) -> dict:
        return {
            "correlators": list(self.correlators),
            "s_per_pattern": list(self.s_per_pattern),
            "s_max": self.s_max,
            "best_pattern": list(self.best_pattern.signs),
            "setting": self.setting.to_json_dict(),
        }


def evaluate(
    state: StateVector,
    pair: tuple[int, int],
    setting: CHSHSetting,
    patterns: tuple[SignPattern, ...] = ADMISSIBLE_PATTERNS,
) -> CHSHResult:
    """All four correlators <A_i x B_j> on the pair (identity elsewhere),
    the signed sum for each pattern, and the maximum."""
    qa, qb = pair
    if qa == qb:
        raise ValueError("pair qubits must be distinct")
    n = state.n_qubits
    for q in pair:
        if not 1 <= q <= n:
            raise ValueError(f"qubit {q} out of range 1..{n}")
    a0, a1, b0, b1 = setting.observables()
    amps = state.amplitudes

    correlators = []
    for a_obs in (a0, a1):
        for b_obs in (b0, b1):
            v = apply_matrix(amps, n, qa, a_obs)
            v = apply_matrix(v, n, qb, b_obs)
            c = complex(np.vdot(amps, v))
            if abs(c.imag) > 1e-9:
                raise RuntimeError(f"correlator came out non-real: {c}")
            correlators.append(c.real)

    s_values = tuple(
        float(sum(s * c for s, c in zip(p.signs, correlators))) for p in patterns
    )
    best = int(np.argmax(s_values))
    return CHSHResult(
        correlators=tuple(correlators),
        patterns=tuple(patterns),
        s_per_pattern=s_values,
        s_max=s_values[best],
        best_pattern=patterns[best],
        setting=setting,
    )


@dataclass(frozen=True)
class SweepSummary:
    trials: int
    sup_s_max: float
    sup_abs_correlator: float

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "sup_s_max": self.sup_s_max,
            "sup_abs_correlator": self.sup_abs_correlator,
        }


def rotation_sweep(
    state: StateVector,
    pair: tuple[int, int],
    trials: int,
    rng,
    patterns: tuple[SignPattern, ...] = ADMISSIBLE_PATTERNS,
) -> SweepSummary:
    """Evaluate under `trials` random (U, V) rotations and keep running
    suprema. Each trial draws from its own spawned generator, so results
    do not depend on evaluation order."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sup_s = -math.inf
    sup_corr = 0.0
    for trial_rng in rng.spawn(trials):
        u = random_unitary_1q(trial_rng)
        v = random_unitary_1q(trial_rng)
        res = evaluate(state, pair, rotated_setting(u, v), patterns)
        sup_s = max(sup_s, res.s_max)
        sup_corr = max(sup_corr, max(abs(c) for c in res.correlators))
    return SweepSummary(trials=trials, sup_s_max=sup_s, sup_abs_correlator=sup_corr)


def _perfectly_correlated(report) -> bool:
    conds = [
        c
        for c in (report.p_conditional_given_0, report.p_conditional_given_1)
        if c is not None
    ]
    return bool(conds) and all(min(c, 1.0 - c) <= CLASSIFY_TOL for c in conds)


def classify(state: StateVector, pair: tuple[int, int]) -> str:
    """Sort a pair into the three entanglement levels (or Other).

    Type1: perfectly correlated in the computational and Hadamard bases,
           S_max = 2*sqrt(2).
    Type2: uncorrelated computationally, perfectly correlated in the
           Hadamard basis, 0 < S_max < 2*sqrt(2).
    Type3: uncorrelated in both bases, S_max = 0.
    """
    comp = Unitary1Q.identity()
    had = Unitary1Q.hadamard()
    rep_comp = conditional_report(state, pair[0], comp, pair[1], comp)
    rep_had = conditional_report(state, pair[0], had, pair[1], had)
    s_max = evaluate(state, pair, default_setting()).s_max

    if (
        _perfectly_correlated(rep_comp)
        and _perfectly_correlated(rep_had)
        and abs(s_max - TSIRELSON_BOUND) <= CLASSIFY_TOL
    ):
        return LEVEL_TYPE1
    if (
        not rep_comp.correlated
        and _perfectly_correlated(rep_had)
        and CLASSIFY_TOL < s_max < TSIRELSON_BOUND - CLASSIFY_TOL
    ):
        return LEVEL_TYPE2
    if not rep_comp.correlated and not rep_had.correlated and abs(s_max) <= CLASSIFY_TOL:
        return LEVEL_TYPE3
    return LEVEL_OTHER
