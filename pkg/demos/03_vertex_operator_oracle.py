"""Brute-force check of the closed-form formfactor in an explicit Fock space.

The vertex state ``exp(a sum_n rho(n)/n)|0>`` is built by applying density
modes to fermionic occupation lists.  Its amplitudes on particle-hole states
must agree with the Cauchy-determinant formula, signs included.
"""
from luttinger_ff.boson_oracle import build_basis, verify_commutator, verify_f1, vertex_state
from luttinger_ff.formfactor import formfactor

basis = build_basis(5)
print(f"{len(basis)} states up to level 5")

# %% Side by side for a = 0.8.
vec = vertex_state(basis, 0.8)
for s in basis.basis[:12]:
    print(f"{str(s):>12}   oracle = {vec.amplitude(s):+.10f}   "
          f"closed = {formfactor(s, 0.8).value:+.10f}")

# %% Worst deviation over all states, for several weights.
for a in (-0.5, 0.3, 0.8, 1.2):
    rep = verify_f1(5, a, basis)
    print(f"a = {a:+.1f}   max |diff| = {rep.max_abs_diff:.1e}")

# %% The representation obeys [rho(-n), rho(n)] = n where it is not truncated.
big = build_basis(6)
for n in (1, 2, 3):
    print(f"n = {n}   commutator violation = {verify_commutator(big, n).max_violation:.1e}")
