"""
The von Neumann meter distribution on a grid
============================================

The meter reading after the position coupling is the object position
convolved with the probe's position spread. A direct quadrature on a grid
reproduces the mean and variance predicted by the moment engine, and a
narrow probe recovers the Born rule.
"""

import math

import numpy as np

from edrlab.gaussian import (
    GaussianState4,
    centered_grid,
    gaussian_wavefunction,
    minimal_mode_cov,
    outcome_distribution,
    outcome_moments,
    von_neumann_transfer,
)

var_q, mean_q, var_probe = 0.7, 0.4, 0.3
state = GaussianState4.product(minimal_mode_cov(var_q), minimal_mode_cov(var_probe), object_mean=(mean_q, 0.0))
row = von_neumann_transfer()[2]
sd = math.sqrt(state.variance_of(row))

x = centered_grid(2048, 12 * sd)
psi = gaussian_wavefunction(x, mean_q, var_q)
total, mean, var = outcome_moments(psi, gaussian_wavefunction(x, 0.0, var_probe), x)
print(f"grid   : total={total:.8f} mean={mean:.8f} var={var:.8f}")
print(f"moments:                  mean={state.mean_of(row):.8f} var={state.variance_of(row):.8f}")

###############################################################################
# Pr{y <= 1} approaches the Born probability as the probe narrows

born = 0.5 * (1 + math.erf((1 - mean_q) / math.sqrt(2 * var_q)))
for v in (1.0, 0.1, 0.01, 0.001):
    p = outcome_distribution(psi, gaussian_wavefunction(x, 0.0, v), x, (-np.inf, 1.0))
    print(f"probe var {v:6}: {p:.6f}   (Born {born:.6f})")
