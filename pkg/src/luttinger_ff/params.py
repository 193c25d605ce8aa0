"""Luttinger parameters and zero-mode (finite-size) energies.

The effective two-branch model is characterised by the dimensionless
stiffness ``xi`` and the sound velocity ``u``.  For the density-density
coupling ``lam`` one has ``u = sqrt(1 - lam**2)`` and
``xi = sqrt((1 + lam) / (1 - lam))``; for the XXZ chain with
``delta = cos(eta)`` the stiffness is ``xi = 2 (pi - eta) / pi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "LuttingerParams",
    "SectorCharge",
    "params_from_coupling",
    "coupling_from_xi",
    "xi_from_anisotropy",
    "finite_size_energy",
    "energy_tower",
]


@dataclass(frozen=True)
class LuttingerParams:
    """Universal inputs of every formula.

    Attributes
    ----------
    xi : float
        Stiffness, ``xi = 1`` for free fermions.
    u : float
        Sound velocity in lattice units.
    length : float
        System length ``L``.
    fermi_momentum : float
        ``p_F`` in ``[0, pi]``.
    """

    xi: float
    u: float = 1.0
    length: float = 1.0
    fermi_momentum: float = math.pi / 2

    def __post_init__(self):
        if not (self.xi > 0 and math.isfinite(self.xi)):
            raise DomainError(f"xi must be positive and finite, got {self.xi}")
        if not (self.u > 0 and math.isfinite(self.u)):
            raise DomainError(f"u must be positive and finite, got {self.u}")
        if not self.length > 0:
            raise DomainError(f"length must be positive, got {self.length}")
        if not 0 <= self.fermi_momentum <= math.pi:
            raise DomainError(f"fermi_momentum must lie in [0, pi], got {self.fermi_momentum}")


@dataclass(frozen=True)
class SectorCharge:
    """Zero-mode quantum numbers ``(dN, dQ)`` of a sector.

    ``dN`` is the change of total particle number, ``dQ`` the number
    difference between the right and left Fermi points.  Both branch
    occupations ``(dN +- dQ)/2`` must be integers.
    """

    delta_n: int
    delta_q: int

    def __post_init__(self):
        if (self.delta_n + self.delta_q) % 2:
            raise DomainError(
                f"delta_n + delta_q must be even, got ({self.delta_n}, {self.delta_q})"
            )

    @property
    def n_right(self) -> int:
        return (self.delta_n + self.delta_q) // 2

    @property
    def n_left(self) -> int:
        return (self.delta_n - self.delta_q) // 2


def params_from_coupling(lam: float, length: float = 1.0,
                         fermi_momentum: float = math.pi / 2) -> LuttingerParams:
    """Parameters of the two-branch model with density coupling ``lam``.

    Raises
    ------
    DomainError
        If ``|lam| >= 1`` (the model is unstable there).
    """
    if not abs(lam) < 1:
        raise DomainError(f"|lambda| must be < 1, got {lam}")
    u = math.sqrt(1.0 - lam * lam)
    xi = math.sqrt((1.0 + lam) / (1.0 - lam))
    return LuttingerParams(xi=xi, u=u, length=length, fermi_momentum=fermi_momentum)


def coupling_from_xi(xi: float) -> float:
    """Inverse of the ``xi(lam)`` map: ``lam = (xi**2 - 1) / (xi**2 + 1)``."""
    if not xi > 0:
        raise DomainError(f"xi must be positive, got {xi}")
    x2 = xi * xi
    return (x2 - 1.0) / (x2 + 1.0)


def xi_from_anisotropy(delta: float) -> float:
    """Stiffness of the XXZ chain, ``xi = 2 (pi - arccos(delta)) / pi``.

    The isotropic endpoint ``delta = 1`` is included (``xi = 2``).
    """
    if not -1 < delta <= 1:
        raise DomainError(f"anisotropy must lie in (-1, 1], got {delta}")
    eta = math.acos(delta)
    return 2.0 * (math.pi - eta) / math.pi


def finite_size_energy(params: LuttingerParams, charge: SectorCharge) -> float:
    """Zero-mode energy ``(pi / 2L) u [xi dN**2 + dQ**2 / xi]``."""
    dn, dq = charge.delta_n, charge.delta_q
    return (math.pi / (2.0 * params.length)) * params.u * (
        params.xi * dn * dn + dq * dq / params.xi
    )


def energy_tower(params: LuttingerParams, max_charge: int = 2):
    """All admissible sectors with ``|dN|, |dQ| <= max_charge``.

    Returns a list of ``(delta_n, delta_q, energy)`` sorted by energy,
    ties broken by the charges.
    """
    rows = []
    for dn in range(-max_charge, max_charge + 1):
        for dq in range(-max_charge, max_charge + 1):
            if (dn + dq) % 2:
                continue
            rows.append((dn, dq, finite_size_energy(params, SectorCharge(dn, dq))))
    rows.sort(key=lambda r: (r[2], r[0], r[1]))
    return rows
