"""Chiral particle-hole configurations.

A chiral state on one branch is given by integer particle momenta
``p_1 > ... > p_n >= 1`` and hole momenta ``0 >= q_1 > ... > q_n`` (in units
of ``2 pi / L``; ``q = 0`` is the topmost occupied mode).  Its level is
``sum(p) - sum(q)``.  States of level ``m`` are in bijection with the integer
partitions of ``m`` through the Maya diagram: row ``i`` of the Young diagram
places an occupied mode at ``lambda_i - i + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError, InvalidStateError, ResourceCapError

__all__ = [
    "ENUMERATION_CAP",
    "ChiralState",
    "ExcitedState",
    "level",
    "enumerate_level",
    "enumerate_up_to",
    "count_states",
    "partitions",
]

ENUMERATION_CAP = 24


@dataclass(frozen=True)
class ChiralState:
    """Particle and hole momenta on one branch, both strictly decreasing."""

    particles: tuple = ()
    holes: tuple = ()

    def __post_init__(self):
        p = tuple(int(v) for v in self.particles)
        q = tuple(int(v) for v in self.holes)
        object.__setattr__(self, "particles", p)
        object.__setattr__(self, "holes", q)
        if len(p) != len(q):
            raise InvalidStateError(f"unequal particle/hole counts: {p} vs {q}")
        if any(v < 1 for v in p):
            raise InvalidStateError(f"particle momenta must be >= 1: {p}")
        if any(v > 0 for v in q):
            raise InvalidStateError(f"hole momenta must be <= 0: {q}")
        if any(a <= b for a, b in zip(p, p[1:])) or any(a <= b for a, b in zip(q, q[1:])):
            raise InvalidStateError(
                f"momenta must be pairwise distinct and strictly decreasing: {p}; {q}"
            )

    @classmethod
    def vacuum(cls) -> "ChiralState":
        return cls((), ())

    @classmethod
    def from_unsorted(cls, particles, holes) -> "ChiralState":
        """Build a state after sorting into canonical (descending) order."""
        p = sorted(particles, reverse=True)
        q = sorted(holes, reverse=True)
        if len(set(p)) != len(p) or len(set(q)) != len(q):
            raise InvalidStateError(f"repeated momenta: {p}; {q}")
        return cls(tuple(p), tuple(q))

    @classmethod
    def from_partition(cls, parts) -> "ChiralState":
        """Map a partition (weakly decreasing positive parts) to its state."""
        parts = [int(v) for v in parts if v]
        occupied = {lam - i for i, lam in enumerate(parts)}
        particles = sorted((s for s in occupied if s >= 1), reverse=True)
        depth = len(parts)
        holes = [s for s in range(0, -depth, -1) if s not in occupied]
        return cls(tuple(particles), tuple(holes))

    def to_partition(self) -> tuple:
        """Inverse of :meth:`from_partition`."""
        if not self.particles:
            return ()
        lowest = min(self.holes)
        occupied = sorted(set(self.particles) | (set(range(lowest, 1)) - set(self.holes)),
                          reverse=True)
        parts = [s + i for i, s in enumerate(occupied)]
        return tuple(v for v in parts if v > 0)

    @property
    def n(self) -> int:
        return len(self.particles)

    @property
    def level(self) -> int:
        return sum(self.particles) - sum(self.holes)

    def is_vacuum(self) -> bool:
        return not self.particles

    def __str__(self):
        p = ",".join(map(str, self.particles))
        q = ",".join(map(str, self.holes))
        return f"{p};{q}"


@dataclass(frozen=True)
class ExcitedState:
    """Two-branch excitation on top of the sector with harmonic ``m``."""

    right: ChiralState = ChiralState()
    left: ChiralState = ChiralState()
    harmonic: int = 0
    delta_n: int = 0

    @property
    def level(self) -> int:
        return self.right.level + self.left.level


def level(state: ChiralState) -> int:
    """Momentum level ``sum(p) - sum(q)``."""
    return state.level


@lru_cache(maxsize=None)
def partitions(m: int) -> tuple:
    """Partitions of ``m`` as weakly decreasing tuples, reverse lexicographic."""
    if m < 0:
        raise DomainError(f"m must be non-negative, got {m}")

    def gen(rest, largest):
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, largest), 0, -1):
            for tail in gen(rest - first, first):
                yield (first,) + tail

    return tuple(gen(m, m))


def _order_key(state: ChiralState):
    return state.particles + state.holes


@lru_cache(maxsize=None)
def _enumerate(m: int) -> tuple:
    states = [ChiralState.from_partition(lam) for lam in partitions(m)]
    states.sort(key=_order_key, reverse=True)
    return tuple(states)


def enumerate_level(m: int, cap: int = ENUMERATION_CAP) -> list:
    """All chiral states of level exactly ``m`` in canonical order.

    The order is descending lexicographic on ``particles + holes``.

    Raises
    ------
    ResourceCapError
        If ``m`` exceeds ``cap``.
    """
    if m < 0:
        raise DomainError(f"level must be non-negative, got {m}")
    if m > cap:
        raise ResourceCapError(f"level {m} exceeds enumeration cap {cap}")
    return list(_enumerate(m))


def enumerate_up_to(max_level: int, cap: int = ENUMERATION_CAP) -> list:
    """States of every level ``0..max_level``, grouped by level."""
    out = []
    for m in range(max_level + 1):
        out.extend(enumerate_level(m, cap))
    return out


@lru_cache(maxsize=None)
def count_states(m: int) -> int:
    """Number of partitions of ``m`` via Euler's pentagonal-number recurrence."""
    if m < 0:
        return 0
    if m == 0:
        return 1
    total = 0
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 > m:
            break
        sign = 1 if k % 2 else -1
        total += sign * count_states(m - g1)
        g2 = k * (3 * k + 1) // 2
        if g2 <= m:
            total += sign * count_states(m - g2)
        k += 1
    return total
