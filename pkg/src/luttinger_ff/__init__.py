"""Particle-hole formfactors of Luttinger-liquid vertex operators.

Closed-form chiral formfactors, their sum rules and series reconstruction,
a brute-force Fock-space oracle, correlator scaling relations, and a
free-fermion / exact-diagonalization oracle for the XX chain.
"""
from .errors import (DegeneracyError, DomainError, FitError, InconsistencyError,
                     InvalidStateError, LuttingerError, ResourceCapError, SingularityError)
from .formfactor import (FormFactorValue, OperatorKind, VertexWeight, cauchy_det,
                         chiral_weights, f_minus, f_plus, formfactor, formfactor_exact,
                         total_formfactor)
from .params import (LuttingerParams, SectorCharge, energy_tower, finite_size_energy,
                     params_from_coupling, xi_from_anisotropy)
from .scaling import (CorrelatorModel, ScalingRelation, exponent, fit_prefactors,
                      formfactor_from_prefactor, prefactor_from_formfactor)
from .series import (chiral_correlator, level_sum_closed, level_sum_enumerated,
                     reconstruct_correlator, tail_bound)
from .states import ChiralState, ExcitedState, count_states, enumerate_level

__version__ = "0.1.0"

__all__ = [
    "ChiralState", "ExcitedState", "count_states", "enumerate_level",
    "LuttingerParams", "SectorCharge", "energy_tower", "finite_size_energy",
    "params_from_coupling", "xi_from_anisotropy",
    "FormFactorValue", "OperatorKind", "VertexWeight", "cauchy_det", "chiral_weights",
    "f_minus", "f_plus", "formfactor", "formfactor_exact", "total_formfactor",
    "chiral_correlator", "level_sum_closed", "level_sum_enumerated",
    "reconstruct_correlator", "tail_bound",
    "CorrelatorModel", "ScalingRelation", "exponent", "fit_prefactors",
    "formfactor_from_prefactor", "prefactor_from_formfactor",
    "DegeneracyError", "DomainError", "FitError", "InconsistencyError",
    "InvalidStateError", "LuttingerError", "ResourceCapError", "SingularityError",
]
