"""Numerical tolerances shared by every module."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermit_tol: float = 1e-10
    trace_tol: float = 1e-10
    psd_tol: float = 1e-10
    unitary_tol: float = 1e-10
    norm_tol: float = 1e-10
    degeneracy_tol: float = 1e-8
    projector_tol: float = 1e-9
    value_match_tol: float = 1e-8
    # commutator norm on the relevant subspace
    commute_tol: float = 1e-8
    # off-diagonal joint/weak mass, vanishing rms error
    zero_tol: float = 1e-9
    support_tol: float = 1e-12
    rank_tol: float = 1e-10
    theorem_tol: float = 1e-10
    heisenberg_tol: float = 1e-12
    robertson_tol: float = 1e-9
    symplectic_tol: float = 1e-10
    grid_norm_tol: float = 1e-8
    rescale_norm: float = 1e3


TOL = Tolerances()
