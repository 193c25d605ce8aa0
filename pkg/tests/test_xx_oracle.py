import math

import numpy as np
import pytest

from luttinger_ff.errors import (DegeneracyError, DomainError, InvalidStateError,
                                 ResourceCapError)
from luttinger_ff.formfactor import formfactor
from luttinger_ff.scaling import (ScalingRelation, boson_model, fit_prefactors,
                                  formfactor_from_prefactor)
from luttinger_ff.states import ChiralState, enumerate_level
from luttinger_ff.xx_oracle import (ExactDiagonalization, SlaterState, XxChainConfig,
                                    density_correlator, density_lowest_formfactor, ed_reference,
                                    ground_state, harmonic_sigma_minus_formfactor,
                                    lowest_sigma_minus_formfactor, particle_hole_ratio,
                                    richardson, sector_is_antiperiodic, sigma_minus_element,
                                    transverse_correlator)

VAC = ChiralState.vacuum()


@pytest.fixture(scope="module", params=[8, 10])
def chain(request):
    L = request.param
    return XxChainConfig(L), ExactDiagonalization(L)


def test_config_validation():
    assert XxChainConfig(8).filling == 4
    assert XxChainConfig(8).fermi_momentum == pytest.approx(math.pi / 2)
    for kwargs in (dict(length=7), dict(length=8, filling=0), dict(length=8, filling=8),
                   dict(length=8, boundary="twisted")):
        with pytest.raises(DomainError):
            XxChainConfig(**kwargs)


def test_sector_rule():
    assert sector_is_antiperiodic(4) and not sector_is_antiperiodic(3)
    assert sector_is_antiperiodic(3, "antiperiodic")
    assert not sector_is_antiperiodic(4, "periodic")


def test_single_particle_ground_state():
    ferro = ground_state(XxChainConfig(4, 1, antiferro=False))
    assert not ferro.antiperiodic
    np.testing.assert_allclose(ferro.momenta, [0.0])
    # the antiferromagnetic sign moves the band minimum to pi
    np.testing.assert_allclose(ground_state(XxChainConfig(4, 1)).momenta, [math.pi])


def test_half_filled_ground_states_are_symmetric_seas():
    gs = ground_state(XxChainConfig(8))
    assert gs.antiperiodic and gs.n_particles == 4
    np.testing.assert_allclose(np.sort(gs.momenta - math.pi), np.sort(math.pi - gs.momenta))
    ferro = ground_state(XxChainConfig(8, antiferro=False))
    np.testing.assert_allclose(np.sort(np.angle(np.exp(1j * ferro.momenta))),
                               np.array([-3, -1, 1, 3]) * math.pi / 8)
    big = ground_state(XxChainConfig(64))
    assert np.all(np.diff(big.modes) == 1)
    assert np.mean(big.momenta) == pytest.approx(math.pi)


def test_wrong_sector_is_degenerate():
    with pytest.raises(DegeneracyError) as info:
        ground_state(XxChainConfig(8, boundary="periodic"))
    assert len(info.value.minimizers) == 2


def test_wrong_sector_mismatches_ed():
    # negative control: a minimiser of the periodic sector is not the ED ground state
    cfg = XxChainConfig(8, boundary="periodic")
    with pytest.raises(DegeneracyError) as info:
        ground_state(cfg)
    wrong = SlaterState(8, info.value.minimizers[0], antiperiodic=False)
    ed = ExactDiagonalization(8)
    assert abs(wrong.energy(cfg.hopping) - ed.ground_state(4)[0]) > 1e-3
    _, psi = ed.ground_state(4)
    assert abs(np.vdot(ed.slater_vector(wrong), psi)) < 1 - 1e-3


def test_ground_energy_matches_ed(chain):
    cfg, ed = chain
    for n in (cfg.filling, cfg.filling - 1):
        assert ground_state(cfg, n).energy(cfg.hopping) == pytest.approx(
            ed.ground_state(n)[0], abs=1e-12)


def test_ferro_sign_matches_ed():
    cfg = XxChainConfig(8, antiferro=False)
    ed = ExactDiagonalization(8, antiferro=False)
    assert ground_state(cfg).energy(cfg.hopping) == pytest.approx(ed.ground_state(4)[0],
                                                                  abs=1e-12)
    assert lowest_sigma_minus_formfactor(cfg) == pytest.approx(ed.sigma_minus(4), abs=1e-12)


def test_slater_vector_is_ed_ground_state(chain):
    cfg, ed = chain
    _, psi = ed.ground_state(cfg.filling)
    assert abs(np.vdot(ed.slater_vector(ground_state(cfg)), psi)) == pytest.approx(1, abs=1e-12)


def test_transverse_matches_ed(chain):
    cfg, ed = chain
    for x in range(1, cfg.length):
        assert transverse_correlator(cfg, x) == pytest.approx(ed.transverse(x, cfg.filling),
                                                              abs=1e-12)


def test_transverse_staggered():
    cfg = XxChainConfig(16)
    signs = [np.sign(transverse_correlator(cfg, x)) for x in range(1, 16)]
    assert signs == [(-1) ** x for x in range(1, 16)]


def test_density_matches_ed_and_closed_form(chain):
    cfg, ed = chain
    L = cfg.length
    for x in range(1, L):
        value = density_correlator(cfg, x)
        assert value == pytest.approx(ed.density(x, cfg.filling), abs=1e-12)
        closed = -(2 / L ** 2) * (1 - math.cos(math.pi * x)) / math.sin(math.pi * x / L) ** 2
        assert value == pytest.approx(closed, abs=1e-14)


def test_translation_invariance_ed():
    ed = ExactDiagonalization(8)
    for x in range(1, 8):
        t = [ed.transverse(x, 4, base) for base in range(1, 9)]
        d = [ed.density(x, 4, base) for base in range(1, 9)]
        assert np.ptp(t) < 1e-12 and np.ptp(d) < 1e-12


def test_lowest_sigma_minus_matches_ed(chain):
    cfg, ed = chain
    assert lowest_sigma_minus_formfactor(cfg) == pytest.approx(ed.sigma_minus(cfg.filling),
                                                               abs=1e-12)


def test_sigma_minus_site_independent():
    ed = ExactDiagonalization(8)
    values = [ed.sigma_minus(4, site) for site in range(1, 9)]
    assert np.ptp(values) < 1e-12
    cfg = XxChainConfig(8)
    bra, ket = ground_state(cfg, 3), ground_state(cfg)
    assert abs(sigma_minus_element(bra, ket)) == pytest.approx(values[0], abs=1e-12)
    with pytest.raises(DomainError):
        sigma_minus_element(bra, ket, site=2)


def test_density_lowest_formfactor(chain):
    cfg, _ = chain
    L = cfg.length
    assert density_lowest_formfactor(cfg) == pytest.approx(2 / L, abs=1e-14)
    assert density_lowest_formfactor(cfg, units="number") == pytest.approx(1 / L, abs=1e-14)
    assert ed_reference(L, "density_lowest") == pytest.approx(2 / L, abs=1e-12)
    with pytest.raises(DomainError):
        density_lowest_formfactor(cfg, units="spin")


def test_ed_reference_dispatch():
    assert ed_reference(8, "ground_energy") == pytest.approx(
        ground_state(XxChainConfig(8)).energy(), abs=1e-12)
    assert ed_reference(8, "transverse", x=3) == pytest.approx(
        transverse_correlator(XxChainConfig(8), 3), abs=1e-12)
    with pytest.raises(DomainError):
        ed_reference(8, "entropy")
    with pytest.raises(ResourceCapError):
        ed_reference(14, "ground_energy")


def test_lowest_formfactor_scaling_monotone():
    values = [lowest_sigma_minus_formfactor(XxChainConfig(L)) ** 2 * math.sqrt(L / 2)
              for L in (32, 64, 128, 256)]
    assert all(b > a for a, b in zip(values, values[1:]))
    diffs = np.diff(values)
    assert all(d2 < d1 for d1, d2 in zip(diffs, diffs[1:]))


def test_vacuum_ratio_is_one():
    assert particle_hole_ratio(XxChainConfig(32), VAC, VAC) == pytest.approx(1, abs=1e-12)


def _level_two_states():
    out = []
    for total in (1, 2):
        for lm in range(total + 1):
            for r in enumerate_level(total - lm):
                for l in enumerate_level(lm):
                    out.append((r, l))
    return out


@pytest.mark.parametrize("right, left", _level_two_states(), ids=str)
def test_particle_hole_ratio_converges(right, left):
    target = abs(formfactor(right, -0.5).value * formfactor(left, -0.5).value)
    lengths = (64, 128, 256)
    ratios = [particle_hole_ratio(XxChainConfig(L), right, left) for L in lengths]
    errors = [abs(r - target) for r in ratios]
    assert errors[0] > errors[1] > errors[2]
    extrapolated, order = richardson(ratios, lengths)
    assert abs(extrapolated - target) / target < 1e-2
    assert order == pytest.approx(2, abs=0.2)


def test_two_pair_state_extrapolates_to_closed_form():
    s = ChiralState((2, 1), (0, -1))
    lengths = (64, 128, 256)
    ratios = [particle_hole_ratio(XxChainConfig(L), s, VAC) for L in lengths]
    extrapolated, _ = richardson(ratios, lengths)
    assert extrapolated == pytest.approx(1 / 64, rel=1e-3)


def test_excitation_collision():
    with pytest.raises(InvalidStateError):
        particle_hole_ratio(XxChainConfig(8), ChiralState((6,), (0,)), VAC)


def test_harmonic_formfactors():
    cfg = XxChainConfig(64)
    assert harmonic_sigma_minus_formfactor(cfg, 0) == pytest.approx(
        lowest_sigma_minus_formfactor(cfg), rel=1e-14)
    with pytest.raises(DomainError):
        harmonic_sigma_minus_formfactor(cfg, -1)


def test_first_harmonic_relation_carries_sign():
    # the m = 1 prefactor is negative; (-1)**m in the relation makes |FF_1|**2 positive
    L = 256
    cfg = XxChainConfig(L)
    window = (L // 8, 3 * L // 8)
    data = [(x, transverse_correlator(cfg, x)) for x in range(window[0], window[1] + 1)]
    shape = boson_model(1.0, harmonics=(0, 1), fermi_momentum=cfg.fermi_momentum,
                        staggered=True)
    _, rep = fit_prefactors(data, shape, window, L)
    assert rep.amplitudes[1] < 0
    implied = formfactor_from_prefactor(ScalingRelation("boson", 1, 1.0, L,
                                                        prefactor=rep.amplitudes[1]))
    measured = harmonic_sigma_minus_formfactor(cfg, 1) ** 2
    assert implied == pytest.approx(measured, rel=1e-2)


def test_richardson_synthetic():
    lengths = (16, 32, 64)
    v, p = richardson([1 + 3 / L ** 2 for L in lengths], lengths)
    assert v == pytest.approx(1, abs=1e-12) and p == pytest.approx(2)
    with pytest.raises(DomainError):
        richardson([1, 2], (1, 2))
