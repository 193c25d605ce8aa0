import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from luttinger_ff.errors import DomainError, FitError, InconsistencyError
from luttinger_ff.scaling import (CorrelatorModel, Harmonic, ScalingRelation, UniformTerm,
                                  boson_model, density_model, evaluate_correlator, exponent,
                                  fit_prefactors, formfactor_from_prefactor,
                                  prefactor_from_formfactor, relation_factor, wavenumber)
from luttinger_ff.xx_oracle import XxChainConfig, density_correlator, transverse_correlator

KINDS = ["boson", "fermion", "density"]


@given(st.floats(0.1, 5))
def test_exponent_examples(xi):
    assert exponent("boson", 0, xi) == pytest.approx(xi / 2)
    assert exponent("density", 1, xi) == pytest.approx(2 / xi)
    assert exponent("fermion", 0, 1.0) == 1.0


def test_exponent_domain():
    with pytest.raises(DomainError):
        exponent("density", 0, 1.0)
    with pytest.raises(DomainError):
        exponent("boson", 0, -1.0)


def test_wavenumbers():
    pf = 0.4
    assert wavenumber("boson", 2, pf) == pytest.approx(4 * pf)
    assert wavenumber("density", 1, pf) == pytest.approx(2 * pf)
    assert wavenumber("fermion", 1, pf) == pytest.approx(3 * pf)


def test_relation_factors():
    assert relation_factor("boson", 0) == 1.0
    assert relation_factor("boson", 1) == -0.5
    assert relation_factor("boson", 2) == 0.5
    assert relation_factor("fermion", 1) == -0.5
    assert relation_factor("density", 3) == 0.5


def test_evaluate_staggered_boson_midpoint():
    L, xi, c0 = 20, 1.3, 0.7
    model = boson_model(xi, amplitudes=[c0], staggered=True)
    assert evaluate_correlator(model, L / 2, L) == pytest.approx(
        c0 * (-1) ** (L // 2) / L ** (xi / 2), rel=1e-14)


def test_evaluate_density_harmonic_midpoint():
    L, c10, pf = 24, 2.0, 0.9
    model = density_model(1.0, fermi_momentum=pf, amplitudes=[c10], uniform=0.0)
    assert evaluate_correlator(model, L / 2, L) == pytest.approx(
        c10 * math.cos(pf * L) / L ** 2, rel=1e-13)


def test_evaluate_domain():
    model = boson_model(1.0)
    with pytest.raises(DomainError):
        evaluate_correlator(model, 0, 10)
    with pytest.raises(DomainError):
        evaluate_correlator(model, np.array([1.0, 10.0]), 10)


def test_full_xx_density_model_is_exact():
    cfg = XxChainConfig(64)
    model = density_model(1.0, amplitudes=[2.0], uniform=2.0, uniform_sign=-1)
    x = np.arange(1, 64)
    np.testing.assert_allclose(evaluate_correlator(model, x, 64), density_correlator(cfg, x),
                               rtol=1e-10, atol=1e-18)


def test_relation_examples():
    c0 = 0.61
    rel = ScalingRelation("boson", 0, 1.0, 2.0, prefactor=c0)
    assert formfactor_from_prefactor(rel) == pytest.approx(c0)
    L = 100
    rel = ScalingRelation("density", 1, 1.0, L, formfactor_sq=(2 / L) ** 2)
    assert prefactor_from_formfactor(rel) == pytest.approx(2.0, rel=1e-14)
    rel = ScalingRelation("boson", 0, 1.0, L, prefactor=c0)
    assert formfactor_from_prefactor(rel) == pytest.approx((2 / L) ** 0.5 * c0)


@given(st.sampled_from(KINDS), st.integers(0, 4), st.floats(0.3, 3), st.integers(2, 4096),
       st.floats(1e-6, 10))
def test_relations_are_inverse(kind, m, xi, L, ff2):
    if kind == "density" and m == 0:
        m = 1
    if relation_factor(kind, m) < 0:
        ff2 = -ff2
    try:
        pre = prefactor_from_formfactor(ScalingRelation(kind, m, xi, L, formfactor_sq=abs(ff2)))
    except DomainError:
        # prefactor beyond the float range; checked in test_extreme_exponents
        return
    back = formfactor_from_prefactor(ScalingRelation(kind, m, xi, L, prefactor=pre))
    assert back == pytest.approx(abs(ff2), rel=1e-14)


def test_extreme_exponents():
    # alpha ~ 102 at L ~ 2000: (2/L)**alpha underflows but the relation holds
    rel = ScalingRelation("boson", 4, 0.3125, 1969, formfactor_sq=1e-300)
    pre = prefactor_from_formfactor(rel)
    back = formfactor_from_prefactor(ScalingRelation("boson", 4, 0.3125, 1969, prefactor=pre))
    assert back == pytest.approx(1e-300, rel=1e-12)
    with pytest.raises(DomainError):
        prefactor_from_formfactor(ScalingRelation("boson", 4, 0.3125, 1969, formfactor_sq=10.0))


def test_sign_mismatch_flags_inconsistency():
    with pytest.raises(InconsistencyError):
        formfactor_from_prefactor(ScalingRelation("boson", 1, 1.0, 64, prefactor=0.5))
    with pytest.raises(InconsistencyError):
        prefactor_from_formfactor(ScalingRelation("boson", 0, 1.0, 64, formfactor_sq=-1.0))


def test_fit_recovers_single_term():
    L = 128
    model = boson_model(1.4, amplitudes=[0.83], staggered=True)
    xs = np.arange(1, L)
    data = list(zip(xs, evaluate_correlator(model, xs, L)))
    fitted, rep = fit_prefactors(data, boson_model(1.4, staggered=True), (16, 48), L)
    assert fitted.amplitudes[0] == pytest.approx(0.83, rel=1e-12)
    assert rep.max_rel_residual < 1e-12
    assert rep.n_samples == 33 and rep.rank == 1


def test_fit_recovers_all_amplitudes():
    # xi = 3 keeps every term resolvable in double precision over the window
    L, pf = 200, 0.37 * math.pi
    truth = density_model(3.0, harmonics=(1, 2), fermi_momentum=pf, amplitudes=[1.7, -0.4],
                          uniform=0.9)
    xs = np.arange(1, L)
    data = list(zip(xs, evaluate_correlator(truth, xs, L)))
    shape = density_model(3.0, harmonics=(1, 2), fermi_momentum=pf, uniform=1.0)
    fitted, rep = fit_prefactors(data, shape, (10, 150), L)
    assert fitted.amplitudes == pytest.approx((1.7, -0.4), rel=1e-10)
    assert rep.uniform_coefficient == pytest.approx(0.9, rel=1e-10)


def test_fit_holds_constant_offset_fixed():
    L = 100
    truth = density_model(1.0, amplitudes=[2.0], uniform=2.0, constant_offset=0.25)
    xs = np.arange(1, L)
    data = list(zip(xs, evaluate_correlator(truth, xs, L)))
    shape = density_model(1.0, uniform=1.0, constant_offset=0.25)
    fitted, rep = fit_prefactors(data, shape, (12, 37), L)
    assert fitted.constant_offset == 0.25
    assert rep.amplitudes[0] == pytest.approx(2.0, rel=1e-8)


def test_fit_errors():
    L = 64
    model = boson_model(1.0)
    data = [(x, 1.0 / x) for x in range(1, L)]
    with pytest.raises(FitError):
        fit_prefactors(data, model, (5, 6), L)
    twin = CorrelatorModel("boson", (Harmonic(0, 1, 0.5, 0.0), Harmonic(0, 1, 0.5, 0.0)))
    with pytest.raises(FitError):
        fit_prefactors(data, twin, (1, 63), L)
    with pytest.raises(FitError):
        fit_prefactors([(1, 2, 3)], model, (1, 2), L)


def test_xx_density_fit_gives_two():
    L = 256
    cfg = XxChainConfig(L)
    xs = np.arange(1, L)
    data = list(zip(xs, density_correlator(cfg, xs)))
    _, rep = fit_prefactors(data, density_model(1.0, uniform=1.0), (L // 8, 3 * L // 8), L)
    assert rep.amplitudes[0] == pytest.approx(2.0, abs=1e-6)
    assert rep.uniform_coefficient == pytest.approx(2.0, abs=1e-6)


def test_xx_transverse_fit_stable_across_windows():
    L = 256
    cfg = XxChainConfig(L)
    data = [(x, transverse_correlator(cfg, x)) for x in range(L // 8, 3 * L // 8 + 1)]
    shape = boson_model(1.0, staggered=True)
    _, full = fit_prefactors(data, shape, (L // 8, 3 * L // 8), L)
    _, near = fit_prefactors(data, shape, (L // 8, L // 4), L)
    _, far = fit_prefactors(data, shape, (L // 4, 3 * L // 8), L)
    assert full.max_rel_residual < 1e-2
    assert abs(near.amplitudes[0] / far.amplitudes[0] - 1) < 1e-2


def test_uniform_term_sign_option():
    model = CorrelatorModel("density", (), UniformTerm(2.0, +1))
    assert evaluate_correlator(model, 5, 10) == pytest.approx(2.0 / 100)
