"""
When is a measurement precise in a given state?
===============================================

A process can reproduce an observable exactly on some states and not on
others. Four criteria decide this: a diagonal joint distribution, a diagonal
weak joint distribution, vanishing error on every vector of the cyclic
subspace, and vanishing error on a basis of it. The locally uniform error
is the worst error over that subspace.
"""

import numpy as np

from edrlab.linalg import pure_state
from edrlab.measurement import (
    cyclic_subspace,
    locally_uniform_error,
    rms_error,
    theorem1_conditions,
    weak_joint_distribution,
)
from edrlab.models import constant_meter_model
from edrlab.random_models import theorem1_instance

A = np.diag([1.0, -1.0])
mp = constant_meter_model(value=1.0)  # always reads +1

for label, ket in [("|0>", [1, 0]), ("|1>", [0, 1]), ("|+>", [1, 1])]:
    rho = pure_state(ket)
    c = theorem1_conditions(mp, A, rho)
    print(f"{label}: conditions {c.as_tuple()}  eps={rms_error(mp, A, rho):.3f} "
          f"eps_bar={locally_uniform_error(mp, A, rho):.3f}")

###############################################################################
# The weak joint distribution of the |+> case puts half the weight off the diagonal

print(weak_joint_distribution(mp, A, pure_state([1, 1])).values.real)

###############################################################################
# Cyclic subspaces: a superposition inside a degenerate block stays there

B = np.diag([1.0, 1.0, 2.0])
print("dim C(B, rho) =", cyclic_subspace(B, pure_state([1, 1, 1])).dim)

###############################################################################
# Random instances: the four criteria always agree

rng = np.random.default_rng(3)
tally = {}
for _ in range(200):
    kind, mp, A, rho = theorem1_instance(rng)
    c = theorem1_conditions(mp, A, rho, rng)
    assert c.agree
    tally[(kind, c.precise)] = tally.get((kind, c.precise), 0) + 1
for key in sorted(tally):
    print(key, tally[key])
