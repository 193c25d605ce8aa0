"""Scaling relations on the XX chain, where free fermions give exact answers.

1. The lowest sigma^- formfactor times (L/2)^(1/4), squared, converges to
   the prefactor of the transverse correlator.
2. The 2 p_F density prefactor and the umklapp matrix element satisfy their
   relation identically.
3. Formfactors of particle-hole excitations divided by the lowest one tend
   to the closed-form chiral formfactors at a = -1/2.
"""
import math

import numpy as np

from luttinger_ff.formfactor import formfactor
from luttinger_ff.scaling import (ScalingRelation, boson_model, density_model, fit_prefactors,
                                  formfactor_from_prefactor)
from luttinger_ff.states import ChiralState
from luttinger_ff.xx_oracle import (XxChainConfig, density_correlator, density_lowest_formfactor,
                                    lowest_sigma_minus_formfactor, particle_hole_ratio,
                                    richardson, transverse_correlator)

# %% Lowest formfactor under L-doubling.
for L in (32, 64, 128, 256):
    c = lowest_sigma_minus_formfactor(XxChainConfig(L))
    print(f"L = {L:3d}   C = {c:.8f}   C^2 (L/2)^(1/2) = {c * c * math.sqrt(L / 2):.8f}")

# %% Prefactor of the staggered transverse correlator from a fixed-exponent fit.
L = 256
cfg = XxChainConfig(L)
window = (L // 8, 3 * L // 8)
data = [(x, transverse_correlator(cfg, x)) for x in range(window[0], window[1] + 1)]
_, fit = fit_prefactors(data, boson_model(1.0, staggered=True), window, L)
print(f"C0 = {fit.amplitudes[0]:.8f}   max relative residual {fit.max_rel_residual:.1e}")

# %% Density: the fit is exact because the correlator is exactly two power laws.
xs = np.arange(1, L)
dens = list(zip(xs, density_correlator(cfg, xs)))
_, dfit = fit_prefactors(dens, density_model(1.0, uniform=1.0), window, L)
c1 = density_lowest_formfactor(cfg)
implied = formfactor_from_prefactor(ScalingRelation("density", 1, 1.0, L,
                                                    prefactor=dfit.amplitudes[0]))
print(f"C10 = {dfit.amplitudes[0]:.12f}   uniform = {dfit.uniform_coefficient:.12f}")
print(f"C1^2 = {c1 ** 2:.6e}   relation gives {implied:.6e}")

# %% Particle-hole ratios: the error falls by ~4 per doubling, so a
# three-point extrapolation lands very close to the chiral formfactor.
vac = ChiralState.vacuum()
for right in (ChiralState((1,), (0,)), ChiralState((1,), (-1,)), ChiralState((2, 1), (0, -1))):
    lengths = (64, 128, 256)
    ratios = [particle_hole_ratio(XxChainConfig(n), right, vac) for n in lengths]
    limit, order = richardson(ratios, lengths)
    target = abs(formfactor(right, -0.5).value)
    print(f"{str(right):>10}  ratios {', '.join(f'{r:.6f}' for r in ratios)}  "
          f"-> {limit:.8f} (order {order:.2f})   closed {target:.8f}")
