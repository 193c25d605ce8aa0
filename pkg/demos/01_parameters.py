"""Luttinger parameters along the XXZ line and the zero-mode energy tower.

Run with ``python3 demos/01_parameters.py``.
"""
import numpy as np

from luttinger_ff.params import (LuttingerParams, energy_tower, params_from_coupling,
                                 xi_from_anisotropy)

# %% Stiffness along the critical XXZ line.  Free fermions (delta = 0) sit at
# xi = 1 and the isotropic antiferromagnet at xi = 2.
for delta in np.linspace(-0.75, 1.0, 8):
    print(f"delta = {delta:+.2f}   xi = {xi_from_anisotropy(delta):.6f}")

# %% The same stiffness from a density coupling lambda, together with the
# renormalised velocity u.
for lam in (-0.6, 0.0, 0.6):
    p = params_from_coupling(lam)
    print(f"lambda = {lam:+.1f}   xi = {p.xi:.4f}   u = {p.u:.4f}")

# %% Lowest charge/current excitations on a ring of 100 sites.  Adding two
# particles costs more than transferring one across when xi > 1.
p = LuttingerParams(xi=2.0, u=0.8, length=100)
for dn, dq, e in energy_tower(p, max_charge=2)[:7]:
    print(f"dN = {dn:+d}  dQ = {dq:+d}   E = {e:.6f}")
