"""Harmonic correlator models and prefactor/formfactor scaling relations.

Equal-time correlators of a Luttinger liquid on a ring of length ``L`` are
sums of harmonics ``A_m trig(k_m x) / (L sin(pi x / L))**alpha_m``.  The
prefactor of each harmonic fixes the lowest formfactor of the matching
sector through the universal relation::

    |FF_m|**2 = s_m * prefactor_m * (2 / L)**alpha_m

with ``s_m = (-1)**m / (2 - delta_{m0})`` (boson), ``(-1)**m / 2`` (fermion)
and ``1/2`` (density).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, FitError, InconsistencyError
from .formfactor import OperatorKind

__all__ = [
    "Harmonic",
    "UniformTerm",
    "CorrelatorModel",
    "ScalingRelation",
    "FitReport",
    "exponent",
    "wavenumber",
    "relation_factor",
    "chord",
    "evaluate_correlator",
    "formfactor_from_prefactor",
    "prefactor_from_formfactor",
    "fit_prefactors",
    "boson_model",
    "density_model",
]


def exponent(kind, m: int, xi: float) -> float:
    """Power-law exponent of harmonic ``m``.

    boson ``xi/2 + 2 m**2 / xi``; fermion ``xi/2 + (2m+1)**2 / (2 xi)``;
    density ``2 m**2 / xi`` (``m >= 1``).
    """
    kind = OperatorKind.parse(kind)
    if not xi > 0:
        raise DomainError(f"xi must be positive, got {xi}")
    if m < 0:
        raise DomainError(f"harmonic must be non-negative, got {m}")
    if kind is OperatorKind.BOSON:
        return xi / 2 + m * m * (2.0 / xi)
    if kind is OperatorKind.FERMION:
        return xi / 2 + (2 * m + 1) ** 2 / (2.0 * xi)
    if m == 0:
        raise DomainError("density harmonic m=0 is the gradient term; use UniformTerm")
    return (2.0 / xi) * m * m


def wavenumber(kind, m: int, fermi_momentum: float) -> float:
    """Oscillation wavenumber: ``2 p_F m`` (boson, density), ``(2m+1) p_F`` (fermion)."""
    kind = OperatorKind.parse(kind)
    if kind is OperatorKind.FERMION:
        return (2 * m + 1) * fermi_momentum
    return 2 * m * fermi_momentum


def relation_factor(kind, m: int) -> float:
    """Sign/multiplicity factor ``s_m`` of the scaling relation."""
    kind = OperatorKind.parse(kind)
    if kind is OperatorKind.BOSON:
        return (-1) ** m / (2 - (m == 0))
    if kind is OperatorKind.FERMION:
        return (-1) ** m / 2
    if m == 0:
        raise DomainError("density relation needs m >= 1")
    return 0.5


def chord(x, length):
    """Chord distance ``L sin(pi x / L)``."""
    return length * np.sin(np.pi * np.asarray(x, dtype=float) / length)


@dataclass(frozen=True)
class Harmonic:
    m: int
    amplitude: float
    exponent: float
    wavenumber: float


@dataclass(frozen=True)
class UniformTerm:
    """Non-oscillating ``sign * coefficient / (L sin)**2`` density term.

    ``sign = -1`` is the free-fermion connected correlator; ``+1`` reproduces
    the positive sign written in the bosonization expansion.
    """

    coefficient: float
    sign_convention: int = -1


@dataclass(frozen=True)
class CorrelatorModel:
    """Harmonic expansion of an equal-time correlator.

    ``staggered`` multiplies every harmonic by ``cos(pi x)`` (``(-1)**x`` on
    integer sites), the convention of the antiferromagnetic XXZ chain.
    """

    kind: OperatorKind
    harmonics: tuple
    uniform_term: UniformTerm | None = None
    constant_offset: float = 0.0
    staggered: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", OperatorKind.parse(self.kind))
        object.__setattr__(self, "harmonics", tuple(self.harmonics))

    @property
    def amplitudes(self) -> tuple:
        return tuple(h.amplitude for h in self.harmonics)

    def harmonic(self, m: int) -> Harmonic:
        for h in self.harmonics:
            if h.m == m:
                return h
        raise KeyError(m)


def _trig(kind: OperatorKind):
    return np.sin if kind is OperatorKind.FERMION else np.cos


def _basis_columns(model: CorrelatorModel, x, length):
    """Per-harmonic shape functions (unit amplitude) and the uniform shape."""
    x = np.asarray(x, dtype=float)
    d = chord(x, length)
    trig = _trig(model.kind)
    stag = np.cos(np.pi * x) if model.staggered else 1.0
    cols = [stag * trig(h.wavenumber * x) / d ** h.exponent for h in model.harmonics]
    uniform = None
    if model.uniform_term is not None:
        uniform = model.uniform_term.sign_convention / d ** 2
    return cols, uniform


def evaluate_correlator(model: CorrelatorModel, x, length: float):
    """Evaluate the model at ``0 < x < L`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0) or np.any(xa >= length):
        raise DomainError(f"x must lie in (0, L={length})")
    cols, uniform = _basis_columns(model, xa, length)
    out = np.full(xa.shape, model.constant_offset, dtype=float)
    for h, c in zip(model.harmonics, cols):
        out = out + h.amplitude * c
    if uniform is not None:
        out = out + model.uniform_term.coefficient * uniform
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class ScalingRelation:
    """One prefactor <-> lowest formfactor pairing.

    Either ``prefactor`` or ``formfactor_sq`` may be left as ``None`` and is
    then computed from the other.
    """

    kind: OperatorKind
    m: int
    xi: float
    length: float
    prefactor: float | None = None
    formfactor_sq: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", OperatorKind.parse(self.kind))

    @property
    def exponent(self) -> float:
        return exponent(self.kind, self.m, self.xi)

    @property
    def factor(self) -> float:
        return relation_factor(self.kind, self.m)

    def log_scale(self) -> float:
        """``log |s_m (2/L)**alpha|``; stays finite where the power underflows."""
        return math.log(abs(self.factor)) + self.exponent * math.log(2.0 / self.length)

    def scale(self) -> float:
        return self.factor * (2.0 / self.length) ** self.exponent


def _signed_exp(sign: float, log_value: float, what: str) -> float:
    try:
        value = math.exp(log_value)
    except OverflowError:
        value = math.inf
    if value == 0 or math.isinf(value):
        raise DomainError(f"{what} is outside the floating-point range (log = {log_value:g})")
    return math.copysign(value, sign)


def formfactor_from_prefactor(rel: ScalingRelation) -> float:
    """Squared lowest formfactor implied by the prefactor.

    Raises
    ------
    InconsistencyError
        If the implied square is negative (the prefactor's sign does not
        match the ``(-1)**m`` convention).
    """
    if rel.prefactor is None:
        raise DomainError("relation has no prefactor")
    if rel.prefactor == 0:
        return 0.0
    sign = rel.factor * rel.prefactor
    if sign < 0:
        raise InconsistencyError(
            f"negative squared formfactor for {rel.kind.value} m={rel.m}"
        )
    log_value = math.log(abs(rel.prefactor)) + rel.log_scale()
    return _signed_exp(1.0, log_value, "squared formfactor")


def prefactor_from_formfactor(rel: ScalingRelation) -> float:
    """Prefactor implied by the squared lowest formfactor."""
    if rel.formfactor_sq is None:
        raise DomainError("relation has no formfactor_sq")
    if rel.formfactor_sq < 0:
        raise InconsistencyError("squared formfactor must be non-negative")
    if rel.formfactor_sq == 0:
        return 0.0
    log_value = math.log(rel.formfactor_sq) - rel.log_scale()
    return _signed_exp(rel.factor, log_value, "prefactor")


@dataclass(frozen=True)
class FitReport:
    window: tuple
    n_samples: int
    n_free: int
    rank: int
    max_rel_residual: float
    amplitudes: tuple
    uniform_coefficient: float | None = None


def fit_prefactors(samples, model: CorrelatorModel, window, length: float):
    """Least-squares amplitudes with exponents and wavenumbers held fixed.

    Parameters
    ----------
    samples : iterable of (x, value)
    model : CorrelatorModel
        Shape; harmonic amplitudes (and the uniform coefficient, if present)
        are free, ``constant_offset`` is held fixed.
    window : (x_min, x_max)
        Inclusive range of ``x`` used in the fit.
    length : float

    Returns
    -------
    fitted : CorrelatorModel
    report : FitReport
        ``max_rel_residual`` is ``max |resid_i| / |y_i|`` over samples with
        ``|y_i| > 1e-8 max|y|``.
    """
    data = np.asarray(list(samples), dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise FitError("samples must be (x, value) pairs")
    lo, hi = window
    sel = (data[:, 0] >= lo) & (data[:, 0] <= hi)
    x, y = data[sel, 0], data[sel, 1] - model.constant_offset
    cols, uniform = _basis_columns(model, x, length)
    if uniform is not None:
        cols = cols + [uniform]
    n_free = len(cols)
    if n_free == 0:
        raise FitError("model has no free amplitudes")
    if x.size < 3 * n_free:
        raise FitError(f"{x.size} samples in window for {n_free} amplitudes (need >= {3 * n_free})")
    design = np.column_stack(cols)
    # column scaling keeps the conditioning independent of the power-law magnitudes
    norms = np.linalg.norm(design, axis=0)
    if np.any(norms == 0):
        raise FitError("a shape function vanishes on every sample")
    coef, _, rank, sv = np.linalg.lstsq(design / norms, y, rcond=None)
    if rank < n_free or sv[-1] < 1e-10 * sv[0]:
        raise FitError("rank-deficient design: window too small or wavenumbers alias")
    coef = coef / norms
    resid = design @ coef - y
    scale = np.abs(y)
    keep = scale > 1e-8 * scale.max()
    max_rel = float(np.max(np.abs(resid[keep]) / scale[keep]))
    harmonics = tuple(replace(h, amplitude=float(c)) for h, c in zip(model.harmonics, coef))
    uniform_term = model.uniform_term
    ucoef = None
    if uniform_term is not None:
        ucoef = float(coef[-1])
        uniform_term = replace(uniform_term, coefficient=ucoef)
    fitted = replace(model, harmonics=harmonics, uniform_term=uniform_term)
    report = FitReport((lo, hi), int(x.size), n_free, int(rank), max_rel,
                       tuple(float(c) for c in coef[:len(harmonics)]), ucoef)
    return fitted, report


def boson_model(xi: float, harmonics=(0,), fermi_momentum: float = math.pi / 2,
                amplitudes=None, staggered: bool = False) -> CorrelatorModel:
    """Boson / ``sigma^-`` correlator shape with closed-form exponents."""
    amplitudes = amplitudes or [1.0] * len(harmonics)
    hs = tuple(Harmonic(m, float(A), exponent("boson", m, xi),
                        wavenumber("boson", m, fermi_momentum))
               for m, A in zip(harmonics, amplitudes))
    return CorrelatorModel(OperatorKind.BOSON, hs, staggered=staggered)


def density_model(xi: float, harmonics=(1,), fermi_momentum: float = math.pi / 2,
                  amplitudes=None, uniform: float | None = None, uniform_sign: int = -1,
                  constant_offset: float = 0.0) -> CorrelatorModel:
    """Density / ``sigma^z`` correlator shape.

    ``uniform`` defaults to ``1 / (2 xi)`` (number-density units); pass the
    appropriate value for other normalisations, e.g. ``2`` for ``sigma^z``
    at ``xi = 1``.
    """
    amplitudes = amplitudes or [1.0] * len(harmonics)
    hs = tuple(Harmonic(m, float(A), exponent("density", m, xi),
                        wavenumber("density", m, fermi_momentum))
               for m, A in zip(harmonics, amplitudes))
    coeff = 1.0 / (2.0 * xi) if uniform is None else uniform
    return CorrelatorModel(OperatorKind.DENSITY, hs, UniformTerm(coeff, uniform_sign),
                           constant_offset)
