"""
Estimating error and disturbance from outcome statistics
========================================================

The rms error involves the meter and the measured observable at different
times, so it is not a single expectation value. It can still be assembled
from data: the three-state method runs the apparatus on three preparations,
and the weak-measurement method sums ``(x - y)^2`` against the weak joint
distribution. Both match the operator definition.
"""

import numpy as np

from edrlab.estimators import (
    output_moments,
    sample_three_state,
    three_state_error,
    three_state_from_samples,
    weak_method_error_of,
)
from edrlab.measurement import rms_error
from edrlab.random_models import random_density, random_hermitian, random_process

rng = np.random.default_rng(1)
mp = random_process(rng, 3, 2)
A = random_hermitian(rng, 3)
rho = random_density(rng, 3)

eps = rms_error(mp, A, rho)
print(f"operator definition : {eps:.12f}")
print(f"three-state (exact) : {three_state_error(output_moments(mp), A, rho):.12f}")
print(f"weak method (exact) : {weak_method_error_of(mp, A, rho):.12f}")

###############################################################################
# Finite statistics: 1e3 to 1e6 shots per preparation

mom = output_moments(mp)
for n in (10**3, 10**4, 10**5, 10**6):
    est = three_state_from_samples(sample_three_state(mom, A, rho, n, seed=0), A, rho)
    z = (est.square - eps**2) / est.square_stderr
    print(f"n={n:>7d}: eps^2 = {est.square:.5f} +- {est.square_stderr:.5f}  (z = {z:+.2f})")
