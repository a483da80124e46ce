"""
Heisenberg's relation fails for a controlled-NOT meter
======================================================

A system qubit controls a flip of a probe qubit prepared in ``|0>``; the
probe is read out in the ``sigma_z`` basis. The meter copies ``sigma_z``
without error, yet the relative phase is scrambled, so ``sigma_x`` is
disturbed. We compare the naive product ``eps * eta`` with the relations
that hold for every measuring process.
"""

import numpy as np

from edrlab.edr import full_report
from edrlab.linalg import SIGMA_X, SIGMA_Z, pure_state
from edrlab.models import KET_PLUS_I, cnot_model

mp = cnot_model()
rho = pure_state(KET_PLUS_I)  # +1 eigenstate of sigma_y, so |<[sigma_z, sigma_x]>| / 2 = 1

rep = full_report(mp, SIGMA_Z, SIGMA_X, rho, scenario="cnot")
print(f"eps(sigma_z)   = {rep.epsilon_A:.3g}")
print(f"eta(sigma_x)   = {rep.eta_B:.6f}  (sqrt 2 = {np.sqrt(2):.6f})")
print(f"bound          = {rep.commutator_bound:.3g}")

###############################################################################
# Each relation, its left-hand side and whether it holds

for r in rep.relations:
    print(f"{r.name:28s} lhs={r.lhs:.6f}  bound={r.bound:.3g}  {'holds' if r.satisfied else 'violated'}")

###############################################################################
# The disturbance does not depend on the state: sweep a few random mixed states

rng = np.random.default_rng(0)
for _ in range(3):
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    sigma = g @ g.conj().T
    sigma /= np.trace(sigma)
    r = full_report(mp, SIGMA_Z, SIGMA_X, sigma)
    print(f"<sigma_y>={np.trace(SIGMA_X @ SIGMA_Z @ sigma).imag:+.3f}  eta={r.eta_B:.6f}  "
          f"heisenberg={'ok' if r.satisfied('heisenberg') else 'violated'}")
