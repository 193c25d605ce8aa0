"""Exact ground truth for the XX chain (``xi = 1``).

The periodic chain ``H = J sum_i (sx_i sx_{i+1} + sy_i sy_{i+1})`` maps under
Jordan-Wigner to free fermions with dispersion ``4 J cos k``.  The fermion
boundary condition depends on the particle number: antiperiodic momenta
``2 pi (n + 1/2) / L`` for an even number of up-spins, periodic ``2 pi n / L``
for an odd number.  ``J = +1`` (antiferromagnetic, the default) fills the
Fermi sea around ``k = pi`` and gives the staggered ``(-1)**x`` transverse
correlator; ``J = -1`` fills around ``k = 0``.

Two independent routes are provided: Slater-determinant/Wick formulas that
scale to a few hundred sites, and a brute-force diagonalisation of the spin
Hamiltonian on the full ``2**L`` space for ``L <= 12``.
"""
from __future__ import annotations

import math
from itertools import combinations
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import DegeneracyError, DomainError, InvalidStateError, ResourceCapError
from .states import ChiralState

__all__ = [
    "ED_CAP",
    "XxChainConfig",
    "SlaterState",
    "sector_is_antiperiodic",
    "ground_state",
    "excite",
    "fermi_edges",
    "propagator",
    "sigma_minus_element",
    "lowest_sigma_minus_formfactor",
    "particle_hole_sigma_minus_formfactor",
    "particle_hole_ratio",
    "harmonic_sigma_minus_formfactor",
    "transverse_correlator",
    "density_correlator",
    "density_lowest_formfactor",
    "umklapp_state",
    "richardson",
    "ExactDiagonalization",
    "ed_reference",
]

ED_CAP = 12
_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class XxChainConfig:
    """Ring of ``length`` sites with ``filling`` up-spins.

    ``boundary`` overrides the Jordan-Wigner sector rule (``"auto"``) with
    ``"periodic"`` or ``"antiperiodic"``; only useful as a negative control.
    """

    length: int
    filling: int | None = None
    antiferro: bool = True
    boundary: str = "auto"

    def __post_init__(self):
        if self.length < 2 or self.length % 2:
            raise DomainError(f"length must be an even integer >= 2, got {self.length}")
        if self.filling is None:
            object.__setattr__(self, "filling", self.length // 2)
        if not 0 < self.filling < self.length:
            raise DomainError(f"filling must satisfy 0 < M < L, got {self.filling}")
        if self.boundary not in ("auto", "periodic", "antiperiodic"):
            raise DomainError(f"unknown boundary {self.boundary!r}")

    @property
    def fermi_momentum(self) -> float:
        return math.pi * self.filling / self.length

    @property
    def hopping(self) -> float:
        return 1.0 if self.antiferro else -1.0


def sector_is_antiperiodic(n_particles: int, boundary: str = "auto") -> bool:
    if boundary == "auto":
        return n_particles % 2 == 0
    return boundary == "antiperiodic"


@dataclass(frozen=True)
class SlaterState:
    """Occupied momentum indices; ``k = 2 pi (j + shift) / L``, ``shift`` 0 or 1/2."""

    length: int
    modes: tuple
    antiperiodic: bool

    @property
    def shift(self) -> float:
        return 0.5 if self.antiperiodic else 0.0

    @property
    def momenta(self) -> np.ndarray:
        return 2 * np.pi * (np.asarray(self.modes, dtype=float) + self.shift) / self.length

    @property
    def n_particles(self) -> int:
        return len(self.modes)

    def energy(self, hopping: float = 1.0) -> float:
        return float(np.sum(4.0 * hopping * np.cos(self.momenta)))


def _sea_center(hopping: float, length: int) -> float:
    """Centre of the Fermi sea in units of ``2 pi / L``."""
    return length / 2 if hopping > 0 else 0.0


def ground_state(config: XxChainConfig, n_particles: int | None = None) -> SlaterState:
    """Lowest-energy momentum set with ``n_particles`` (default: the filling).

    Raises
    ------
    DegeneracyError
        If the Fermi shell is partially filled (non-unique minimiser).
    """
    n = config.filling if n_particles is None else n_particles
    L = config.length
    if not 0 <= n <= L:
        raise DomainError(f"particle number {n} outside [0, {L}]")
    anti = sector_is_antiperiodic(n, config.boundary)
    j = np.arange(L)
    eps = 4.0 * config.hopping * np.cos(2 * np.pi * (j + (0.5 if anti else 0.0)) / L)
    order = np.lexsort((j, eps))
    if 0 < n < L and abs(eps[order[n]] - eps[order[n - 1]]) < _DEGENERACY_TOL:
        level_e = eps[order[n - 1]]
        shell = [int(v) for v in j[np.abs(eps - level_e) < _DEGENERACY_TOL]]
        below = [int(v) for v in j[eps < level_e - _DEGENERACY_TOL]]
        need = n - len(below)
        minimizers = [tuple(sorted(below + list(c))) for c in combinations(shell, need)]
        raise DegeneracyError(
            f"degenerate Fermi shell for L={L}, N={n}: {len(minimizers)} minimisers",
            minimizers,
        )
    return SlaterState(L, tuple(sorted(int(v) for v in order[:n])), anti)


def _offsets(state: SlaterState, hopping: float):
    """Signed offsets of the occupied modes from the sea centre, in ``2 pi / L`` units."""
    L = state.length
    c = _sea_center(hopping, L)
    raw = np.asarray(state.modes, dtype=float) + state.shift - c
    return (raw + L / 2) % L - L / 2


def fermi_edges(state: SlaterState, hopping: float = 1.0):
    """``(top, bottom)`` occupied offsets from the sea centre.

    The top edge is the right Fermi point (positive group velocity).
    """
    off = _offsets(state, hopping)
    return float(off.max()), float(off.min())


def _mode_from_offset(offset: float, state: SlaterState, hopping: float) -> int:
    L = state.length
    j = offset + _sea_center(hopping, L) - state.shift
    ji = int(round(j))
    if abs(j - ji) > 1e-9:
        raise InvalidStateError("offset does not land on the momentum lattice")
    return ji % L


def excite(state: SlaterState, right: ChiralState, left: ChiralState,
           hopping: float = 1.0) -> SlaterState:
    """Particle-hole excitation of ``state`` near both Fermi points.

    Right branch: particle ``p`` sits ``p`` steps above the top occupied mode,
    hole ``q`` at ``q`` steps from it (``q = 0`` is the top mode).  The left
    branch is the mirror image at the bottom edge.
    """
    top, bottom = fermi_edges(state, hopping)
    occ = set(state.modes)
    remove, add = [], []
    for p in right.particles:
        add.append(_mode_from_offset(top + p, state, hopping))
    for q in right.holes:
        remove.append(_mode_from_offset(top + q, state, hopping))
    for p in left.particles:
        add.append(_mode_from_offset(bottom - p, state, hopping))
    for q in left.holes:
        remove.append(_mode_from_offset(bottom - q, state, hopping))
    if len(set(remove)) != len(remove) or len(set(add)) != len(add):
        raise InvalidStateError("branches overlap: momentum collision")
    for j in remove:
        if j not in occ:
            raise InvalidStateError(f"hole at unoccupied mode {j}")
        occ.discard(j)
    for j in add:
        if j in occ:
            raise InvalidStateError(f"particle at occupied mode {j}")
        occ.add(j)
    return SlaterState(state.length, tuple(sorted(occ)), state.antiperiodic)


def umklapp_state(state: SlaterState, hopping: float = 1.0) -> SlaterState:
    """Move the bottom-edge fermion to just above the top edge (momentum ``2 p_F``)."""
    top, bottom = fermi_edges(state, hopping)
    occ = set(state.modes)
    occ.discard(_mode_from_offset(bottom, state, hopping))
    new = _mode_from_offset(top + 1, state, hopping)
    if new in occ:
        raise InvalidStateError("filled band: no empty mode above the top edge")
    occ.add(new)
    return SlaterState(state.length, tuple(sorted(occ)), state.antiperiodic)


def propagator(state: SlaterState, r) -> np.ndarray:
    """``g(r) = (1/L) sum_{k occupied} exp(i k r) = <a^+_x a_{x+r}>``."""
    r = np.asarray(r, dtype=float)
    k = state.momenta
    return np.exp(1j * np.multiply.outer(r, k)).sum(axis=-1) / state.length


def _orbitals(state: SlaterState, sites) -> np.ndarray:
    """``phi_k(x) = exp(i k x) / sqrt(L)`` with rows indexed by site."""
    return np.exp(1j * np.outer(sites, state.momenta)) / math.sqrt(state.length)


def _overlaps(bra: SlaterState, ket: SlaterState) -> np.ndarray:
    """``<k'_i | k_j> = (1/L) sum_x exp(i (k_j - k'_i) x)``."""
    sites = np.arange(1, bra.length + 1)
    return _orbitals(bra, sites).conj().T @ _orbitals(ket, sites)


def sigma_minus_element(bra: SlaterState, ket: SlaterState, site: int = 1) -> complex:
    """``<bra| sigma^-_1 |ket>`` up to a global phase, with ``N(bra) = N(ket) - 1``.

    ``sigma^-_1`` equals the lattice fermion ``a_1`` (empty Jordan-Wigner string).
    """
    if site != 1:
        raise DomainError("only site 1 carries an empty Jordan-Wigner string")
    if bra.n_particles != ket.n_particles - 1:
        raise DomainError("bra must have one particle fewer than ket")
    m = np.empty((ket.n_particles, ket.n_particles), dtype=complex)
    m[:-1] = _overlaps(bra, ket)
    m[-1] = _orbitals(ket, [site])[0]
    return complex(np.linalg.det(m))


def _sigma_minus_pair(config: XxChainConfig):
    ket = ground_state(config)
    bra = ground_state(config, config.filling - 1)
    return bra, ket


def lowest_sigma_minus_formfactor(config: XxChainConfig) -> float:
    """``|<GS_{M-1}| sigma^-_1 |GS_M>|`` from the overlap determinant."""
    if config.filling < 2:
        raise DomainError("need at least two up-spins")
    bra, ket = _sigma_minus_pair(config)
    return abs(sigma_minus_element(bra, ket))


def particle_hole_sigma_minus_formfactor(config: XxChainConfig, right: ChiralState,
                                         left: ChiralState) -> float:
    """``|<lambda(p,q)| sigma^-_1 |GS_M>|`` for an excitation of ``GS_{M-1}``."""
    bra, ket = _sigma_minus_pair(config)
    bra = excite(bra, right, left, config.hopping)
    return abs(sigma_minus_element(bra, ket))


def particle_hole_ratio(config: XxChainConfig, right: ChiralState, left: ChiralState) -> float:
    """Finite-size estimate of ``|F_right F_left|``."""
    return (particle_hole_sigma_minus_formfactor(config, right, left)
            / lowest_sigma_minus_formfactor(config))


def harmonic_sigma_minus_formfactor(config: XxChainConfig, m: int) -> float:
    """``|<lambda(m)| sigma^-_1 |GS_M>|`` where ``lambda(m)`` is ``GS_{M-1}`` with
    ``m`` fermions moved from the right to the left Fermi point."""
    if m < 0:
        raise DomainError(f"harmonic must be non-negative, got {m}")
    bra, ket = _sigma_minus_pair(config)
    top, bottom = fermi_edges(bra, config.hopping)
    occ = set(bra.modes)
    for i in range(m):
        occ.discard(_mode_from_offset(top - i, bra, config.hopping))
        new = _mode_from_offset(bottom - 1 - i, bra, config.hopping)
        if new in occ:
            raise InvalidStateError(f"harmonic {m} wraps around the band")
        occ.add(new)
    moved = SlaterState(bra.length, tuple(sorted(occ)), bra.antiperiodic)
    return abs(sigma_minus_element(moved, ket))


def transverse_correlator(config: XxChainConfig, x: int) -> float:
    """Exact ``<sigma^+_{1+x} sigma^-_1>`` in the ground state.

    With ``A_l = a^+_l + a_l`` and ``B_l = a^+_l - a_l`` the string product
    ``sx_1 sx_{1+x} = B_1 A_2 B_2 ... B_x A_{x+1}`` has a Wick expansion that
    reduces to the ``x x x`` Toeplitz determinant of ``<B_i A_j>`` when there
    is no pairing; ``<sigma^+ sigma^-> = <sx sx> / 2`` for a real,
    ``U(1)``-symmetric ground state.
    """
    L = config.length
    if not 1 <= x < L:
        raise DomainError(f"separation must satisfy 1 <= x < L, got {x}")
    state = ground_state(config)
    # <B_i A_j> = g(j-i) + g(i-j) - delta_ij, rows i = 1..x, columns j = 2..x+1
    d = np.arange(-x, x + 2)
    g = propagator(state, d)
    gr = dict(zip(d.tolist(), (2 * g.real).tolist()))
    i = np.arange(1, x + 1)[:, None]
    j = np.arange(2, x + 2)[None, :]
    mat = np.vectorize(gr.get)(j - i) - (i == j)
    return 0.5 * float(np.linalg.det(mat))


def density_correlator(config: XxChainConfig, x) -> np.ndarray | float:
    """Connected ``<sz_{1+x} sz_1>`` from Wick's theorem: ``-4 |g(x)|**2``."""
    state = ground_state(config)
    g = propagator(state, x)
    val = -4.0 * np.abs(g) ** 2
    return float(val) if np.ndim(x) == 0 else val


def _one_body_element(bra: SlaterState, ket: SlaterState, site: int) -> complex:
    """``<bra| a^+_x a_x |ket>`` for equal particle numbers (bordered determinant)."""
    n = ket.n_particles
    m = np.zeros((n + 1, n + 1), dtype=complex)
    m[:n, :n] = _overlaps(bra, ket)
    m[:n, n] = _orbitals(bra, [site])[0].conj()
    m[n, :n] = _orbitals(ket, [site])[0]
    return -complex(np.linalg.det(m))


def density_lowest_formfactor(config: XxChainConfig, units: str = "sigma_z") -> float:
    """``|<t'| n_1 |t>|`` with ``t'`` the ``2 p_F`` umklapp state of the ground state.

    Equals ``1/L`` in number units and ``2/L`` in ``sigma^z`` units.
    """
    if units not in ("sigma_z", "number"):
        raise DomainError(f"units must be 'sigma_z' or 'number', got {units!r}")
    t = ground_state(config)
    tp = umklapp_state(t, config.hopping)
    val = abs(_one_body_element(tp, t, 1))
    return 2.0 * val if units == "sigma_z" else val


def richardson(values, lengths):
    """Extrapolate ``v(L) = v_inf + c L**-p`` from three lengths in doubling sequence.

    The order ``p`` is estimated from the successive differences.  Returns
    ``(v_inf, p)``; falls back to the last value when the differences vanish.
    """
    v = [float(x) for x in values]
    if len(v) != 3 or len(lengths) != 3:
        raise DomainError("richardson needs exactly three values")
    ratio_l = lengths[1] / lengths[0]
    d1, d2 = v[1] - v[0], v[2] - v[1]
    if d2 == 0 or d1 == 0 or d1 / d2 <= 0:
        return v[2], math.nan
    p = math.log(d1 / d2) / math.log(ratio_l)
    return v[2] + d2 / (ratio_l ** p - 1), p


# --- exact diagonalisation ------------------------------------------------------

def _popcount(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    v = a.copy()
    while np.any(v):
        out += v & 1
        v >>= 1
    return out


class ExactDiagonalization:
    """Spin-basis diagonalisation of the periodic XX ring, ``L <= 12``.

    Site ``s`` (1-based) is bit ``s - 1``; a set bit is an up-spin.  The
    Hamiltonian is built on the full ``2**L`` space and diagonalised block by
    block in the conserved magnetisation sectors.
    """

    def __init__(self, length: int, antiferro: bool = True):
        if length > ED_CAP:
            raise ResourceCapError(f"ED length {length} exceeds cap {ED_CAP}")
        if length < 2:
            raise DomainError("need at least two sites")
        self.length = length
        self.hopping = 1.0 if antiferro else -1.0
        self.dim = 1 << length
        self.states = np.arange(self.dim)
        self.counts = _popcount(self.states)
        self._gs: dict = {}

    @cached_property
    def hamiltonian(self) -> sp.csr_matrix:
        L = self.length
        rows, cols, vals = [], [], []
        for i in range(L):
            j = (i + 1) % L
            mask = (1 << i) | (1 << j)
            bi = (self.states >> i) & 1
            bj = (self.states >> j) & 1
            flip = self.states[bi != bj]
            # sx sx + sy sy = 2 (s+ s- + s- s+) flips an antiparallel pair
            rows.append(flip ^ mask)
            cols.append(flip)
            vals.append(np.full(flip.size, 2.0 * self.hopping))
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.concatenate(vals)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))

    def ground_state(self, n_up: int):
        """``(energy, vector)`` in sector ``n_up``; vector lives on the full space."""
        if n_up in self._gs:
            return self._gs[n_up]
        idx = np.flatnonzero(self.counts == n_up)
        block = self.hamiltonian[idx][:, idx].toarray()
        w, v = np.linalg.eigh(block)
        if w.size > 1 and w[1] - w[0] < _DEGENERACY_TOL:
            raise DegeneracyError(f"ED ground state degenerate in sector N={n_up}")
        vec = np.zeros(self.dim)
        vec[idx] = v[:, 0]
        self._gs[n_up] = (float(w[0]), vec)
        return self._gs[n_up]

    def _bit(self, site: int) -> int:
        return 1 << ((site - 1) % self.length)

    def transverse(self, x: int, n_up: int, base: int = 1) -> float:
        """``<sigma^+_{base+x} sigma^-_{base}>``."""
        _, psi = self.ground_state(n_up)
        b0, bx = self._bit(base), self._bit(base + x)
        src = self.states[((self.states & b0) != 0) & ((self.states & bx) == 0)]
        dst = src ^ b0 ^ bx
        return float(np.dot(psi[dst], psi[src]))

    def sz(self, site: int) -> np.ndarray:
        return np.where(self.states & self._bit(site), 1.0, -1.0)

    def density(self, x: int, n_up: int, base: int = 1) -> float:
        """Connected ``<sz_{base+x} sz_{base}>``."""
        _, psi = self.ground_state(n_up)
        p2 = psi * psi
        za, zb = self.sz(base + x), self.sz(base)
        return float(p2 @ (za * zb) - (p2 @ za) * (p2 @ zb))

    def sigma_minus(self, n_up: int, site: int = 1) -> float:
        """``|<GS_{n-1}| sigma^-_site |GS_n>|``."""
        _, ket = self.ground_state(n_up)
        _, bra = self.ground_state(n_up - 1)
        b = self._bit(site)
        src = self.states[(self.states & b) != 0]
        return abs(float(np.dot(bra[src ^ b], ket[src])))

    def fermion_create(self, site: int, vec: np.ndarray) -> np.ndarray:
        """Jordan-Wigner ``a^+_site = sigma^+_site prod_{l<site} (-sz_l)``."""
        b = self._bit(site)
        below = self.states & (b - 1)
        sign = np.where(_popcount(below) % 2, -1.0, 1.0)
        out = np.zeros_like(vec)
        src = self.states[(self.states & b) == 0]
        out[src | b] = sign[src] * vec[src]
        return out

    def slater_vector(self, state: SlaterState) -> np.ndarray:
        """``prod_k c^+_k |empty>`` with ``c^+_k = L^{-1/2} sum_x e^{ikx} a^+_x``."""
        vec = np.zeros(self.dim, dtype=complex)
        vec[0] = 1.0
        for k in state.momenta:
            new = np.zeros_like(vec)
            for s in range(1, self.length + 1):
                new += np.exp(1j * k * s) * self.fermion_create(s, vec)
            vec = new / math.sqrt(self.length)
        return vec

    def number_element(self, bra: np.ndarray, ket: np.ndarray, site: int = 1) -> complex:
        """``<bra| n_site |ket>``."""
        occ = (self.states & self._bit(site)) != 0
        return complex(np.vdot(bra[occ], ket[occ]))


def ed_reference(length: int, observable: str, antiferro: bool = True,
                 n_up: int | None = None, **kwargs):
    """Evaluate one observable by brute-force diagonalisation.

    observable : ``"ground_energy"``, ``"transverse"`` (needs ``x``),
    ``"density"`` (needs ``x``), ``"lowest_sigma_minus"`` or
    ``"density_lowest"`` (``sigma^z`` units).
    """
    ed = ExactDiagonalization(length, antiferro)
    n = length // 2 if n_up is None else n_up
    if observable == "ground_energy":
        return ed.ground_state(n)[0]
    if observable == "transverse":
        return ed.transverse(kwargs["x"], n, kwargs.get("base", 1))
    if observable == "density":
        return ed.density(kwargs["x"], n, kwargs.get("base", 1))
    if observable == "lowest_sigma_minus":
        return ed.sigma_minus(n, kwargs.get("site", 1))
    if observable == "density_lowest":
        cfg = XxChainConfig(length, n, antiferro)
        tp = umklapp_state(ground_state(cfg), cfg.hopping)
        _, psi = ed.ground_state(n)
        return 2.0 * abs(ed.number_element(ed.slater_vector(tp), psi, kwargs.get("site", 1)))
    raise DomainError(f"unknown observable {observable!r}")
