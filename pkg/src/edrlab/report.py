"""Common result record for every error-disturbance evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class EdrViolationError(AssertionError):
    """A relation that holds as a theorem failed beyond tolerance."""


@dataclass(frozen=True)
class Relation:
    name: str
    lhs: float
    bound: float
    satisfied: bool

    @classmethod
    def evaluate(cls, name: str, lhs: float, bound: float, tol: float) -> "Relation":
        return cls(name, float(lhs), float(bound), bool(lhs >= bound - tol))

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "lhs": self.lhs, "bound": self.bound, "satisfied": self.satisfied}


@dataclass(frozen=True)
class EdrReport:
    """
    All sides of the inequalities evaluated for one scenario.

    ``relations`` holds one :class:`Relation` per inequality that was
    evaluated (``heisenberg``, ``universal``, ``ozawa``, ``kennard``, ...).
    Quantities that have no dedicated field go into ``quantities``.
    """

    scenario: str
    epsilon_A: float | None = None
    eta_B: float | None = None
    sigma_A: float | None = None
    sigma_B: float | None = None
    correlation_term: float | None = None
    commutator_bound: float | None = None
    relations: tuple[Relation, ...] = ()
    quantities: dict[str, float] = field(default_factory=dict)

    def relation(self, name: str) -> Relation:
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(f"relation {name!r} not evaluated in scenario {self.scenario!r}")

    def satisfied(self, name: str) -> bool:
        return self.relation(name).satisfied

    def _lhs(self, name: str) -> float | None:
        try:
            return self.relation(name).lhs
        except KeyError:
            return None

    @property
    def lhs_heisenberg(self) -> float | None:
        return self._lhs("heisenberg")

    @property
    def lhs_universal(self) -> float | None:
        return self._lhs("universal")

    @property
    def lhs_ozawa(self) -> float | None:
        return self._lhs("ozawa")

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "epsilon_A": self.epsilon_A,
            "eta_B": self.eta_B,
            "sigma_A": self.sigma_A,
            "sigma_B": self.sigma_B,
            "correlation_term": self.correlation_term,
            "commutator_bound": self.commutator_bound,
            "lhs_heisenberg": self.lhs_heisenberg,
            "lhs_universal": self.lhs_universal,
            "lhs_ozawa": self.lhs_ozawa,
            "relations": [r.to_dict() for r in self.relations],
            "quantities": dict(sorted(self.quantities.items())),
        }
