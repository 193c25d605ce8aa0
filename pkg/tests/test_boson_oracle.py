import math

import numpy as np
import pytest

from luttinger_ff.boson_oracle import (VertexVector, apply_density_mode, build_basis,
                                       commutator_expectation, verify_commutator, verify_f1,
                                       vertex_state)
from luttinger_ff.errors import DomainError, ResourceCapError
from luttinger_ff.series import level_sum_closed
from luttinger_ff.states import ChiralState

A_GRID = [-0.5, 0.3, 0.8, 1.2]


@pytest.fixture(scope="module")
def basis6():
    return build_basis(6)


@pytest.mark.parametrize("cutoff, size", [(0, 1), (2, 4), (5, 19)])
def test_basis_sizes(cutoff, size):
    b = build_basis(cutoff)
    assert len(b) == size
    assert all(b.index[s] == i for i, s in enumerate(b.basis))


def test_basis_cap():
    with pytest.raises(ResourceCapError):
        build_basis(11)


def test_rho_one_on_vacuum(basis6):
    v = apply_density_mode(basis6, 1, VertexVector.vacuum())
    assert v.amplitudes == {ChiralState((1,), (0,)): 1.0}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_rho_n_on_vacuum(basis6, n):
    v = apply_density_mode(basis6, n, VertexVector.vacuum())
    expected = {ChiralState((k,), (k - n,)) for k in range(1, n + 1)}
    assert set(v.amplitudes) == expected
    assert all(abs(amp) == 1.0 for amp in v.amplitudes.values())


def test_rho_raises_level(basis6):
    rng = np.random.default_rng(3)
    low = [s for s in basis6.basis if s.level <= 3]
    v = VertexVector({s: float(rng.normal()) for s in low})
    for n in (1, 2, 3):
        out = apply_density_mode(basis6, n, v)
        for s in out.amplitudes:
            assert s.level - n in {t.level for t in low}
        down = apply_density_mode(basis6, -n, v)
        assert all(s.level <= 3 - n for s in down.amplitudes)


def test_rho_adjointness(basis6):
    # <t| rho(n) |s> = <s| rho(-n) |t>
    for n in (1, 2, 3):
        for s in basis6.basis:
            if s.level + n > 6:
                continue
            up = apply_density_mode(basis6, n, VertexVector({s: 1.0}))
            for t, amp in up.amplitudes.items():
                down = apply_density_mode(basis6, -n, VertexVector({t: 1.0}))
                assert down.amplitude(s) == amp


def test_rho_nilpotent_grading(basis6):
    v = VertexVector({s: 1.0 for s in basis6.basis})
    for n in (1, 2, 3):
        w = v
        for _ in range(6 // n + 1):
            w = apply_density_mode(basis6, n, w)
        assert not w.amplitudes


def test_rho_argument_checks(basis6):
    with pytest.raises(DomainError):
        apply_density_mode(basis6, 0, VertexVector.vacuum())
    with pytest.raises(DomainError):
        apply_density_mode(basis6, 7, VertexVector.vacuum())


def test_vertex_state_examples(basis6):
    assert vertex_state(basis6, 0.0).amplitudes == {ChiralState.vacuum(): 1.0}
    for a in A_GRID:
        v = vertex_state(basis6, a)
        assert v.amplitude(ChiralState.vacuum()) == 1.0
        assert v.amplitude(ChiralState((1,), (0,))) == pytest.approx(a, abs=1e-15)
    v = vertex_state(basis6, -0.5)
    assert v.amplitude(ChiralState((2, 1), (0, -1))) == pytest.approx(-1 / 64, abs=1e-15)


def test_verify_f1_examples():
    rep = verify_f1(1, 0.37)
    assert rep.max_abs_diff <= 1e-15 and rep.state_count == 2
    rep = verify_f1(4, -0.5)
    assert rep.max_abs_diff <= 1e-9 and rep.state_count == 12
    rep = verify_f1(5, 0.8)
    assert rep.max_abs_diff <= 1e-9 and rep.state_count == 19


@pytest.mark.parametrize("a", A_GRID)
def test_verify_f1_grid(a, basis6):
    assert verify_f1(5, a, basis6).max_abs_diff <= 1e-9


@pytest.mark.parametrize("a", A_GRID)
def test_vertex_norm_parseval(a, basis6):
    v = vertex_state(basis6, a)
    expected = math.fsum(level_sum_closed(m, a) for m in range(7))
    assert v.norm2() == pytest.approx(expected, rel=1e-10)


def test_commutator_on_vacuum(basis6):
    assert commutator_expectation(basis6, 1, VertexVector.vacuum()) == pytest.approx(1.0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_commutator_certificate(basis6, n):
    rep = verify_commutator(basis6, n)
    assert rep.max_violation <= 1e-12
    assert rep.checked_states == sum(1 for s in basis6.basis if s.level <= 6 - n)


def test_commutator_random_level_two_vector(basis6):
    rng = np.random.default_rng(11)
    v = VertexVector({s: float(rng.normal()) for s in basis6.basis if s.level == 2})
    assert commutator_expectation(basis6, 3, v) == pytest.approx(3 * v.norm2(), rel=1e-12)


def test_commutator_domain(basis6):
    with pytest.raises(DomainError):
        verify_commutator(basis6, 4)
    with pytest.raises(DomainError):
        verify_commutator(basis6, 0)


def test_vector_array_roundtrip(basis6):
    v = vertex_state(basis6, 0.8)
    arr = v.to_array(basis6)
    assert VertexVector.from_array(basis6, arr).amplitudes == v.amplitudes
