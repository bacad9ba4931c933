"""Measuring all three spin components of a single qubit.

Take a pure state, record the exact outcome probabilities along z, y and x,
and forget the state.  What can be rebuilt from the record?

Run with ``python demos/complete_measurement.py``.
"""

import numpy as np

from qpurify import (
    decompose,
    maxent_state,
    overlap,
    probabilities_from_state,
    pure,
    purify_a,
    purify_b,
    spectral,
    unbiased_state,
)

psi = pure(0.6, 0.48 + 0.64j)
rho_ini = psi.density()
rec = probabilities_from_state(psi)
print("initial state     ", np.round(psi.amplitudes, 4))
print("record (z, y, x)  ", np.round(rec.probs, 4))

# Weighting the three post-measurement ensembles equally gives a mixed state.
# It is (I + rho_ini) / 3 whatever the initial state was.
unb = unbiased_state(rec)
print("\nunbiased mixture\n", np.round(np.asarray(unb), 4))
print("eigenvalues       ", np.round(spectral(unb).eigenvalues, 12))
print("overlap with psi  ", overlap(rho_ini, unb))

# Its top eigenvector is the initial state, so maximal-overlap purification
# recovers psi exactly.
b = purify_b(unb)
print("\nmaximal-overlap purification overlap:", overlap(rho_ini, b.density()))

# Probability-preserving purification keeps the 2/3 : 1/3 weights and picks a
# relative phase.  The overlap with psi stays at 2/3 for every phase.
mix = decompose(unb)
for phi in np.linspace(0, 2 * np.pi, 5)[:-1]:
    fid = overlap(rho_ini, purify_a(mix, phi).density())
    print(f"probability-preserving, phase {phi:4.2f}: overlap {fid:.12f}")

# The maximum-entropy fit to a complete record is already pure.
mx = maxent_state(rec)
print("\nmaxent state is pure:", mx.is_pure(), " overlap with psi:", overlap(rho_ini, mx))
