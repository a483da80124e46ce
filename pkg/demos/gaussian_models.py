"""
Two position measurements on a free mass
========================================

Both couplings are quadratic in the canonical variables, so their Heisenberg
evolution is a symplectic matrix acting on ``(Q, P, Qbar, Pbar)`` and every
rms quantity follows from first and second moments. The von Neumann
coupling obeys ``eps(Q) eta(P) >= hbar/2``; the error-free coupling does not.
"""

import numpy as np

from edrlab.gaussian import (
    OZAWA_1988,
    VON_NEUMANN,
    GaussianState4,
    edr_product_report,
    matrix_exponential_check,
    minimal_mode_cov,
    symplectic_defect,
    transfer,
)

np.set_printoptions(precision=4, suppress=True)

print("von Neumann transfer at K dt = 1\n", transfer(VON_NEUMANN))
print("error-free transfer at K dt = 1\n", transfer(OZAWA_1988))

###############################################################################
# The closed forms agree with exponentiating the generator along the way

for s in (0.25, 0.5, 0.75):
    S = transfer(OZAWA_1988, s)
    dev = np.abs(S - matrix_exponential_check(OZAWA_1988, s)).max()
    print(f"K tau = {s}: |S - expm| = {dev:.1e}, symplectic defect = {symplectic_defect(S):.1e}")

###############################################################################
# Probe width sweep for the von Neumann model: minimal packets saturate hbar/2

obj = minimal_mode_cov(0.5)
for w in (0.25, 0.5, 1.0, 2.0):
    rep = edr_product_report(VON_NEUMANN, GaussianState4.product(obj, minimal_mode_cov(w)))
    print(f"probe var {w:4}: eps={rep.epsilon_A:.4f} eta={rep.eta_B:.4f} product={rep.quantities['product']:.4f}")

###############################################################################
# Error-free model: eps(Q) is identically zero and eta(P) can be made small
# by preparing both parties close to momentum eigenstates

for k in (0, 5, 10, 20):
    v = 2.0**-k
    state = GaussianState4.product(np.diag([0.25 / v, v]), np.diag([0.25 / v, v]))
    rep = edr_product_report(OZAWA_1988, state)
    print(f"k={k:2d}: eps={rep.epsilon_A} eta={rep.eta_B:.3e} "
          f"three-term lhs={rep.lhs_ozawa:.4f} >= {rep.commutator_bound}")
