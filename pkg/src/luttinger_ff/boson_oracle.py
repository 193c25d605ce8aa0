"""Brute-force chiral Fock space and the exponential vertex operator.

One branch is represented fermionically: a basis vector is a set of occupied
integer modes, every mode below the window being filled.  The density mode
``rho(n) = sum_k a^+_{k+n} a_k`` is applied hop by hop with the fermionic
sign of creation operators ordered by descending momentum.  The vertex state
``exp(a sum_{n>0} rho(n)/n)|0>`` is then summed term by term; its amplitudes
on the particle-hole basis must reproduce the closed-form formfactor.

The particle-hole basis vector with particles ``p_1 > ... > p_n`` and holes
``q_1 > ... > q_n`` is ``a^+_{p_1} ... a^+_{p_n} a_{q_n} ... a_{q_1} |0>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceCapError
from .formfactor import formfactor
from .states import ChiralState, count_states, enumerate_level

__all__ = [
    "ORACLE_CAP",
    "FockBasis",
    "VertexVector",
    "F1Report",
    "CommutatorReport",
    "build_basis",
    "apply_density_mode",
    "vertex_state",
    "verify_f1",
    "verify_commutator",
    "commutator_expectation",
]

ORACLE_CAP = 10


@dataclass(frozen=True)
class FockBasis:
    """All chiral states of level ``<= cutoff_level`` with a stable index."""

    cutoff_level: int
    basis: tuple
    index: dict = field(repr=False, compare=False)

    def __len__(self):
        return len(self.basis)

    def __contains__(self, state):
        return state in self.index


@dataclass
class VertexVector:
    """Sparse vector on a :class:`FockBasis`, keyed by :class:`ChiralState`."""

    amplitudes: dict = field(default_factory=dict)

    def amplitude(self, state: ChiralState) -> float:
        return self.amplitudes.get(state, 0.0)

    def norm2(self) -> float:
        return math.fsum(v * v for v in self.amplitudes.values())

    def to_array(self, basis: FockBasis) -> np.ndarray:
        out = np.zeros(len(basis))
        for s, v in self.amplitudes.items():
            out[basis.index[s]] = v
        return out

    @classmethod
    def from_array(cls, basis: FockBasis, values) -> "VertexVector":
        return cls({s: float(v) for s, v in zip(basis.basis, values) if v != 0})

    @classmethod
    def vacuum(cls) -> "VertexVector":
        return cls({ChiralState.vacuum(): 1.0})


@dataclass(frozen=True)
class F1Report:
    max_level: int
    a: float
    max_abs_diff: float
    state_count: int
    worst_state: ChiralState | None


@dataclass(frozen=True)
class CommutatorReport:
    n: int
    cutoff_level: int
    max_violation: float
    checked_states: int


def build_basis(cutoff_level: int) -> FockBasis:
    """Basis of all states with level ``<= cutoff_level``."""
    if cutoff_level < 0:
        raise DomainError(f"cutoff level must be non-negative, got {cutoff_level}")
    if cutoff_level > ORACLE_CAP:
        raise ResourceCapError(f"oracle cutoff {cutoff_level} exceeds cap {ORACLE_CAP}")
    states = []
    for m in range(cutoff_level + 1):
        states.extend(enumerate_level(m))
    assert len(states) == sum(count_states(m) for m in range(cutoff_level + 1))
    return FockBasis(cutoff_level, tuple(states), {s: i for i, s in enumerate(states)})


# --- occupation representation -------------------------------------------------
#
# Inside the window [-W, W] a configuration is a descending tuple of occupied
# modes; modes below -W are always filled and never touched by the hops we
# generate, so they drop out of every sign count.

def _occupation(state: ChiralState, window: int) -> tuple:
    occ = set(range(-window, 1)) - set(state.holes)
    occ |= set(state.particles)
    return tuple(sorted(occ, reverse=True))


def _state_from_occupation(occ) -> ChiralState:
    occ_set = set(occ)
    particles = tuple(s for s in occ if s >= 1)
    lowest = min(occ)
    holes = tuple(s for s in range(0, lowest - 1, -1) if s not in occ_set)
    return ChiralState(particles, holes)


def _hop_sign(occ, src: int, dst: int) -> int:
    """Sign of ``a^+_dst a_src`` on a descending-ordered occupation."""
    lo, hi = min(src, dst), max(src, dst)
    between = sum(1 for s in occ if lo < s < hi)
    return -1 if between % 2 else 1


def _hop(occ, src: int, dst: int) -> tuple:
    out = [s for s in occ if s != src]
    out.append(dst)
    return tuple(sorted(out, reverse=True))


def _basis_sign(state: ChiralState, window: int) -> int:
    """Sign relating the particle-hole vector to the canonical occupation vector.

    Applies ``a_{q_1}``, ..., ``a_{q_n}`` and then ``a^+_{p_n}``, ...,
    ``a^+_{p_1}`` to the Dirac sea, tracking the fermionic sign.
    """
    occ = list(range(0, -window - 1, -1))
    sign = 1
    for q in state.holes:
        above = sum(1 for s in occ if s > q)
        sign *= -1 if above % 2 else 1
        occ.remove(q)
    for p in reversed(state.particles):
        above = sum(1 for s in occ if s > p)
        sign *= -1 if above % 2 else 1
        occ.append(p)
        occ.sort(reverse=True)
    return sign


class _Space:
    """Cached occupation data for one basis."""

    def __init__(self, basis: FockBasis):
        self.basis = basis
        self.window = max(basis.cutoff_level, 1)
        self.occ = {s: _occupation(s, self.window) for s in basis.basis}
        self.sign = {s: _basis_sign(s, self.window) for s in basis.basis}

    def apply(self, n: int, v: VertexVector) -> VertexVector:
        """Apply ``rho(n)`` for ``n != 0``, truncating at the cutoff level."""
        out: dict = {}
        cutoff = self.basis.cutoff_level
        w = self.window
        for state, amp in v.amplitudes.items():
            if amp == 0 or state.level + n > cutoff or state.level + n < 0:
                continue
            occ = self.occ[state]
            occ_set = set(occ)
            base = amp * self.sign[state]
            for src in occ:
                dst = src + n
                if dst in occ_set or dst > w or dst < -w:
                    continue
                new_occ = _hop(occ, src, dst)
                new_state = _state_from_occupation(new_occ)
                val = base * _hop_sign(occ, src, dst) * self.sign[new_state]
                out[new_state] = out.get(new_state, 0.0) + val
        return VertexVector({s: a for s, a in out.items() if a != 0})


_SPACES: dict = {}


def _space(basis: FockBasis) -> _Space:
    key = basis.cutoff_level
    sp = _SPACES.get(key)
    if sp is None:
        sp = _SPACES[key] = _Space(basis)
    return sp


def apply_density_mode(basis: FockBasis, n: int, v: VertexVector) -> VertexVector:
    """``rho(n) v`` on the truncated basis (``n`` may be negative).

    Components pushed above the cutoff level are dropped.
    """
    if n == 0:
        raise DomainError("rho(0) is the charge zero mode and is not represented")
    if abs(n) > basis.cutoff_level:
        raise DomainError(f"|n|={abs(n)} exceeds the cutoff level {basis.cutoff_level}")
    return _space(basis).apply(n, v)


def _axpy(alpha: float, x: VertexVector, y: dict) -> None:
    for s, v in x.amplitudes.items():
        y[s] = y.get(s, 0.0) + alpha * v


def vertex_state(basis: FockBasis, a: float) -> VertexVector:
    """``exp(a sum_{n>0} rho(n)/n) |0>`` truncated at the cutoff level.

    Every term of the generator raises the level by at least one, so the
    exponential series terminates after ``cutoff_level`` powers and the
    amplitudes on level ``m <= cutoff`` are exact.
    """
    a = float(a)
    total = {ChiralState.vacuum(): 1.0}
    term = VertexVector.vacuum()
    for power in range(1, basis.cutoff_level + 1):
        acc: dict = {}
        for n in range(1, basis.cutoff_level + 1):
            _axpy(a / n, apply_density_mode(basis, n, term), acc)
        term = VertexVector({s: v / power for s, v in acc.items() if v != 0})
        if not term.amplitudes:
            break
        _axpy(1.0, term, total)
    return VertexVector({s: v for s, v in total.items() if v != 0})


def verify_f1(max_level: int, a: float, basis: FockBasis | None = None) -> F1Report:
    """Largest deviation between oracle amplitudes and the closed form."""
    if basis is None:
        basis = build_basis(max_level)
    if max_level > basis.cutoff_level:
        raise DomainError(f"max_level {max_level} exceeds basis cutoff {basis.cutoff_level}")
    vec = vertex_state(basis, a)
    worst, worst_state, count = 0.0, None, 0
    for state in basis.basis:
        if state.level > max_level:
            continue
        count += 1
        diff = abs(vec.amplitude(state) - formfactor(state, a).value)
        if diff > worst:
            worst, worst_state = diff, state
    return F1Report(max_level, a, worst, count, worst_state)


def _commutator(basis: FockBasis, n: int, v: VertexVector) -> VertexVector:
    """``[rho(-n), rho(n)] v``."""
    up_down = apply_density_mode(basis, -n, apply_density_mode(basis, n, v))
    down_up = apply_density_mode(basis, n, apply_density_mode(basis, -n, v))
    acc: dict = {}
    _axpy(1.0, up_down, acc)
    _axpy(-1.0, down_up, acc)
    return VertexVector(acc)


def commutator_expectation(basis: FockBasis, n: int, v: VertexVector) -> float:
    """``<v| [rho(-n), rho(n)] |v>``; equals ``n <v|v>`` on the valid domain."""
    w = _commutator(basis, n, v)
    return math.fsum(v.amplitude(s) * amp for s, amp in w.amplitudes.items())


def verify_commutator(basis: FockBasis, n: int) -> CommutatorReport:
    """Check ``[rho(-n), rho(n)] = n`` on every basis vector of level ``<= cutoff - n``.

    The check is on the full operator (all matrix elements), which covers
    every vector in that subspace by linearity.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if 2 * n > basis.cutoff_level:
        raise DomainError(f"n={n} exceeds half the cutoff {basis.cutoff_level}")
    worst, checked = 0.0, 0
    for state in basis.basis:
        if state.level > basis.cutoff_level - n:
            continue
        checked += 1
        w = _commutator(basis, n, VertexVector({state: 1.0}))
        for s, amp in w.amplitudes.items():
            expected = n if s == state else 0.0
            worst = max(worst, abs(amp - expected))
        if state not in w.amplitudes:
            worst = max(worst, float(n))
    return CommutatorReport(n, basis.cutoff_level, worst, checked)
