"""Level sums of squared formfactors and the damped correlator series.

The squared formfactors of one level add up to the Taylor coefficient of
``(1 - z)**(-a**2)``.  Summing the series at ``|z| < 1`` reproduces the
closed form within a provable tail bound; the undamped point is approached
only slowly.
"""
import math

from luttinger_ff.formfactor import formfactor
from luttinger_ff.series import damping_trend, level_sums_enumerated, reconstruct_correlator
from luttinger_ff.states import enumerate_level

a = -0.5

# %% Individual formfactors at level 4.
for s in enumerate_level(4):
    print(f"{str(s):>10}   F = {formfactor(s, a).value:+.6f}")

# %% Per-level sums against the closed form.
for rep in level_sums_enumerated(range(13), a):
    print(f"m = {rep.level:2d}  states = {rep.state_count:3d}  "
          f"sum = {rep.enumerated_sum:.12f}  closed = {rep.closed_form:.12f}  "
          f"rel_err = {rep.rel_err:.1e}")

# %% Reconstruction at z = 0.9 exp(i pi/2).
ev = reconstruct_correlator(0.9, math.pi / 2, a, truncation=24)
print(f"partial = {ev.partial_sum:.10f}")
print(f"closed  = {ev.closed_form:.10f}")
print(f"error {ev.error:.2e} <= bound {ev.tail_bound:.2e}: {ev.within_bound}")

# %% As r -> 1 the tail bound blows up while the actual error stays moderate:
# the series converges only conditionally on the unit circle.
for r, err, bound in damping_trend(math.pi / 2, a, truncation=24):
    print(f"r = {r:<6} error = {err:.3e}   bound = {bound:.3e}")
