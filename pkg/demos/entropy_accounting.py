"""Where the entropy goes when a qubit is purified.

The purifying operation is a unitary on the qubit plus a one-qubit
environment.  It moves the qubit's entropy into the environment without
entangling the two.  A later non-selective measurement of the environment
can only raise that entropy, and leaves it unchanged exactly when the
purification basis diagonalises the input.

Run with ``python demos/entropy_accounting.py``.
"""

import numpy as np

from qpurify import (
    PurificationBasis,
    entropy_audit,
    entropy_determinant_derivative,
    entropy_from_determinant,
    evolve_composite,
    make_density,
    partial_trace_env,
    partial_trace_sys,
    pure,
    von_neumann_entropy,
)
from qpurify.kraus import factorization_residual

rho0 = make_density([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
target = pure(1, 1)
print("input entropy", round(von_neumann_entropy(rho0), 6))

cs = evolve_composite(PurificationBasis.computational(target), rho0)
print("\nafter the unitary")
print("  system state\n", np.round(np.asarray(partial_trace_env(cs)), 6))
print("  environment entropy", round(von_neumann_entropy(partial_trace_sys(cs)), 6))
print("  distance from a product state", factorization_residual(cs))

print("\nafter measuring the environment")
for label, pb in [
    ("computational basis", PurificationBasis.computational(target)),
    ("eigenbasis of input", PurificationBasis.eigenbasis(rho0, target)),
]:
    a = entropy_audit(pb, rho0)
    print(f"  {label}: entropy {a.s_before:.6f} -> {a.s_env_final:.6f},"
          f" determinant {a.det_before:.6f} -> {a.det_after:.6f}")

# For a qubit the entropy is a function of the determinant alone, and an
# increasing one: that is why dephasing, which raises the determinant, raises
# the entropy.
print("\n det    S(det)    dS/d(det)")
for det in (0.01, 0.05, 0.09, 0.16, 0.24, 0.25):
    print(f"{det:5.2f}  {entropy_from_determinant(det):.6f}  {entropy_determinant_derivative(det):.6f}")
