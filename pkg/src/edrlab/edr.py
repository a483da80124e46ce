"""
Evaluators for the error-disturbance relations of a finite-dimensional
measuring process, all reported through :class:`~edrlab.report.EdrReport`.

Relation names used in the reports:

``heisenberg``      eps(A) eta(B) >= |<[A,B]>| / 2          (not universally valid)
``universal``       eps eta + |<[n(A),B]> + <[A,d(B)]>| >= |<[A,B]>| / 2
``ozawa``           eps eta + eps sigma(B) + sigma(A) eta >= |<[A,B]>| / 2
``error-free``      sigma(A) eta(B) >= |<[A,B]>| / 2        (when eps(A) = 0)
``nondisturbing``   eps(A) sigma(B) >= |<[A,B]>| / 2        (when eta(B) = 0)
``locally-uniform`` the three-term relation with locally uniform eps, eta

The universal relations are theorems: a violation beyond ``TOL.theorem_tol``
raises :class:`~edrlab.report.EdrViolationError`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .linalg import check_density, check_hermitian, commutator, expectation, operator_norm, std_dev
from .measurement import (
    MeasuringProcess,
    error_observables,
    locally_uniform_disturbance,
    locally_uniform_error,
    rms_disturbance,
    rms_error,
)
from .report import EdrReport, EdrViolationError, Relation

THEOREMS = ("universal", "ozawa", "error-free", "nondisturbing", "locally-uniform")


@dataclass(frozen=True)
class _Sides:
    eps: float
    eta: float
    sigma_a: float
    sigma_b: float
    corr: float
    bound: float
    eps_bar: float | None = None
    eta_bar: float | None = None

    def scaled(self, a: float, b: float) -> "_Sides":
        # undo A -> a A (with the meter) and B -> b B
        return _Sides(
            self.eps / a,
            self.eta / b,
            self.sigma_a / a,
            self.sigma_b / b,
            self.corr / (a * b),
            self.bound / (a * b),
            None if self.eps_bar is None else self.eps_bar / a,
            None if self.eta_bar is None else self.eta_bar / b,
        )


def _scale_factors(mp: MeasuringProcess, A: np.ndarray, B: np.ndarray) -> tuple[float, float]:
    na = max(operator_norm(A), operator_norm(mp.meter))
    nb = operator_norm(B)
    a = 1.0 / na if na > TOL.rescale_norm else 1.0
    b = 1.0 / nb if nb > TOL.rescale_norm else 1.0
    return a, b


def _sides(mp: MeasuringProcess, A, B, rho, locally_uniform: bool = False) -> _Sides:
    obs = error_observables(mp, A, B)
    corr = abs(expectation(commutator(obs.n_A, B), rho) + expectation(commutator(A, obs.d_B), rho))
    bound = 0.5 * abs(expectation(commutator(A, B), rho))
    return _Sides(
        rms_error(mp, A, rho),
        rms_disturbance(mp, B, rho),
        std_dev(A, rho),
        std_dev(B, rho),
        float(corr),
        float(bound),
        locally_uniform_error(mp, A, rho) if locally_uniform else None,
        locally_uniform_disturbance(mp, B, rho) if locally_uniform else None,
    )


def _relations(s: _Sides, which: tuple[str, ...]) -> list[Relation]:
    out = []
    for name in which:
        if name == "heisenberg":
            out.append(Relation.evaluate(name, s.eps * s.eta, s.bound, TOL.heisenberg_tol))
        elif name == "universal":
            out.append(Relation.evaluate(name, s.eps * s.eta + s.corr, s.bound, TOL.theorem_tol))
        elif name == "ozawa":
            lhs = s.eps * s.eta + s.eps * s.sigma_b + s.sigma_a * s.eta
            out.append(Relation.evaluate(name, lhs, s.bound, TOL.theorem_tol))
        elif name == "error-free":
            if s.eps <= TOL.theorem_tol:
                out.append(Relation.evaluate(name, s.sigma_a * s.eta, s.bound, TOL.theorem_tol))
        elif name == "nondisturbing":
            if s.eta <= TOL.theorem_tol:
                out.append(Relation.evaluate(name, s.eps * s.sigma_b, s.bound, TOL.theorem_tol))
        elif name == "heisenberg-locally-uniform":
            out.append(Relation.evaluate(name, s.eps_bar * s.eta_bar, s.bound, TOL.heisenberg_tol))
        elif name == "locally-uniform":
            e, h = s.eps_bar, s.eta_bar
            lhs = e * h + e * s.sigma_b + s.sigma_a * h
            out.append(Relation.evaluate(name, lhs, s.bound, TOL.theorem_tol))
        else:
            raise ValueError(f"unknown relation {name!r}")
    return out


def _unscale(rel: Relation, a: float, b: float) -> Relation:
    return Relation(rel.name, rel.lhs / (a * b), rel.bound / (a * b), rel.satisfied)


def evaluate(mp: MeasuringProcess, A, B, rho, which: tuple[str, ...], scenario: str = "finite") -> EdrReport:
    """
    Evaluate the named relations for observables ``A``, ``B`` in ``rho``.

    Operands with norm above ``TOL.rescale_norm`` are rescaled (``A`` with the
    meter, ``B`` alone) before evaluation; every relation is homogeneous, so
    the flags are decided on the rescaled instance and the reported values are
    mapped back.
    """
    A = check_hermitian(A, "A")
    B = check_hermitian(B, "B")
    rho = check_density(rho)
    a, b = _scale_factors(mp, A, B)
    lu = "locally-uniform" in which or "heisenberg-locally-uniform" in which
    scaled_mp = mp if a == 1.0 else mp.scaled_meter(a)
    s = _sides(scaled_mp, a * A, b * B, rho, locally_uniform=lu)
    rels = _relations(s, which)
    for r in rels:
        if r.name in THEOREMS and not r.satisfied:
            raise EdrViolationError(f"{r.name} relation violated: lhs {r.lhs!r} < bound {r.bound!r}")
    s = s.scaled(a, b)
    quantities = {"scale_A": a, "scale_B": b}
    if lu:
        quantities["epsilon_bar"] = s.eps_bar
        quantities["eta_bar"] = s.eta_bar
    return EdrReport(
        scenario=scenario,
        epsilon_A=s.eps,
        eta_B=s.eta,
        sigma_A=s.sigma_a,
        sigma_B=s.sigma_b,
        correlation_term=s.corr,
        commutator_bound=s.bound,
        relations=tuple(_unscale(r, a, b) for r in rels),
        quantities=quantities,
    )


def heisenberg_edr(mp, A, B, rho, scenario="finite") -> EdrReport:
    return evaluate(mp, A, B, rho, ("heisenberg",), scenario)


def universal_edr(mp, A, B, rho, scenario="finite") -> EdrReport:
    return evaluate(mp, A, B, rho, ("heisenberg", "universal"), scenario)


def ozawa_edr(mp, A, B, rho, scenario="finite") -> EdrReport:
    return evaluate(mp, A, B, rho, ("heisenberg", "ozawa"), scenario)


def corollary_bounds(mp, A, B, rho, scenario="finite") -> EdrReport:
    """
    Bounds for error-free (``eps(A) = 0``) and non-disturbing (``eta(B) = 0``)
    processes. A relation is only present in the report when it applies;
    ``quantities`` records applicability as 0/1.
    """
    rep = evaluate(mp, A, B, rho, ("error-free", "nondisturbing"), scenario)
    names = {r.name for r in rep.relations}
    rep.quantities["error_free_applicable"] = float("error-free" in names)
    rep.quantities["nondisturbing_applicable"] = float("nondisturbing" in names)
    return rep


def locally_uniform_edr(mp, A, B, rho, scenario="finite") -> EdrReport:
    return evaluate(mp, A, B, rho, ("heisenberg-locally-uniform", "locally-uniform"), scenario)


def full_report(mp, A, B, rho, scenario="finite") -> EdrReport:
    """Every relation at once."""
    return evaluate(
        mp,
        A,
        B,
        rho,
        ("heisenberg", "universal", "ozawa", "error-free", "nondisturbing", "heisenberg-locally-uniform", "locally-uniform"),
        scenario,
    )
