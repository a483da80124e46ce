"""
Gaussian-moment engine for the two continuous-variable position measurements.

Both measuring interactions are quadratic in the canonical operators, so the
Heisenberg-picture evolution over the coupling interval is a linear map
``R(t) = S(t) R(0)`` on ``R = (Q, P, Qbar, Pbar)``. Error and disturbance are
rms values of linear combinations of ``R(0)``, which only need the first and
second moments of the initial product state.

The free Hamiltonians are neglected (strong-coupling limit) and the coupling
time is fixed by ``K * dt = 1``; transfers are parametrized by the
dimensionless ``tau_fraction = K * tau``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.linalg import expm

from .config import TOL
from .linalg import ValidationError
from .report import EdrReport, EdrViolationError, Relation

ORDER = ("Q", "P", "Qbar", "Pbar")
IQ, IP, IQB, IPB = range(4)


def symplectic_form() -> np.ndarray:
    """``J`` with ``[R_i, R_j] = i hbar J_ij`` in the (Q, P, Qbar, Pbar) ordering."""
    j = np.zeros((4, 4))
    j[IQ, IP] = j[IQB, IPB] = 1.0
    j[IP, IQ] = j[IPB, IQB] = -1.0
    return j


J4 = symplectic_form()


@dataclass(frozen=True)
class CvModel:
    """A strong-coupling position measurement; ``duration = 1 / coupling``."""

    kind: str
    coupling: float = 1.0

    KINDS = ("von-neumann", "ozawa-1988")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {self.KINDS}")
        if not self.coupling > 0:
            raise ValueError("coupling must be positive")

    @property
    def duration(self) -> float:
        return 1.0 / self.coupling

    def tau_fraction(self, tau: float) -> float:
        return self.coupling * tau


VON_NEUMANN = CvModel("von-neumann")
OZAWA_1988 = CvModel("ozawa-1988")


def _as_model(model: CvModel | str) -> CvModel:
    return model if isinstance(model, CvModel) else CvModel(model)


@dataclass(frozen=True)
class GaussianState4:
    """
    First and symmetrized second central moments of (Q, P, Qbar, Pbar).

    Object and probe start uncorrelated (product state), and the covariance
    must satisfy the Robertson condition ``cov + (i hbar / 2) J >= 0``.
    """

    mean: np.ndarray
    cov: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(4)
        cov = np.asarray(self.cov, dtype=float).reshape(4, 4)
        if not self.hbar > 0:
            raise ValidationError("hbar must be positive")
        if np.max(np.abs(cov - cov.T)) > TOL.hermit_tol:
            raise ValidationError("covariance matrix is not symmetric")
        if np.max(np.abs(cov[:2, 2:])) > 0:
            raise ValidationError("object and probe must be uncorrelated at t=0")
        lo = float(np.linalg.eigvalsh(cov + 0.5j * self.hbar * J4).min())
        if lo < -TOL.robertson_tol:
            raise ValidationError(
                f"covariance violates the Robertson condition (min eigenvalue {lo:.3e}); "
                "no quantum state has these moments"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    @classmethod
    def product(cls, object_cov, probe_cov, object_mean=(0.0, 0.0), probe_mean=(0.0, 0.0), hbar=1.0):
        cov = np.zeros((4, 4))
        cov[:2, :2] = object_cov
        cov[2:, 2:] = probe_cov
        return cls(np.concatenate([object_mean, probe_mean]), cov, hbar)

    def second_moments(self) -> np.ndarray:
        """Symmetrized raw moments ``<(R_i R_j + R_j R_i)/2>``."""
        return self.cov + np.outer(self.mean, self.mean)

    def mean_of(self, row) -> float:
        return float(np.asarray(row) @ self.mean)

    def variance_of(self, row) -> float:
        r = np.asarray(row, dtype=float)
        return float(r @ self.cov @ r)

    def mean_square_of(self, row) -> float:
        """``<(row . R)^2>`` for a real linear combination of the canonical operators."""
        r = np.asarray(row, dtype=float)
        return float(r @ self.second_moments() @ r)


def minimal_mode_cov(var_q: float, hbar: float = 1.0) -> np.ndarray:
    """Uncorrelated minimum-uncertainty covariance with position variance ``var_q``."""
    return np.diag([var_q, hbar**2 / (4.0 * var_q)])


def _snap(s: np.ndarray) -> np.ndarray:
    r = np.round(s)
    return np.where(np.abs(s - r) < 1e-14, r, s)


def von_neumann_transfer(tau_fraction: float = 1.0) -> np.ndarray:
    """Transfer of ``H = Q (x) Pbar``; rows give Q, P, Qbar, Pbar at ``K tau``."""
    s = float(tau_fraction)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"tau_fraction must lie in [0, 1], got {s}")
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, -s],
            [s, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def ozawa_transfer(tau_fraction: float = 1.0) -> np.ndarray:
    """
    Transfer of the 1988 error-free position measurement.

    At ``tau_fraction = 1``: Q -> Q - Qbar, Qbar -> Q, P -> -Pbar,
    Pbar -> P + Pbar.
    """
    s = float(tau_fraction)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"tau_fraction must lie in [0, 1], got {s}")
    c = 2.0 / np.sqrt(3.0)
    up = c * np.sin((1.0 + s) * np.pi / 3.0)
    down = c * np.sin((1.0 - s) * np.pi / 3.0)
    mix = c * np.sin(s * np.pi / 3.0)
    S = np.array(
        [
            [up, 0.0, -mix, 0.0],
            [0.0, down, 0.0, -mix],
            [mix, 0.0, down, 0.0],
            [0.0, mix, 0.0, up],
        ]
    )
    return _snap(S)


def transfer(model: CvModel | str, tau_fraction: float = 1.0) -> np.ndarray:
    model = _as_model(model)
    if model.kind == "von-neumann":
        return von_neumann_transfer(tau_fraction)
    return ozawa_transfer(tau_fraction)


def hamiltonian_form(model: CvModel | str) -> np.ndarray:
    """
    Symmetric ``h`` with interaction ``H = (1/2) R^T h R`` (operator products
    symmetrized; the dropped constants do not affect the dynamics).
    """
    model = _as_model(model)
    h = np.zeros((4, 4))

    def put(i, j, v):
        h[i, j] += v
        h[j, i] += v

    if model.kind == "von-neumann":
        put(IQ, IPB, 1.0)
    else:
        g = np.pi / (3.0 * np.sqrt(3.0))
        put(IQ, IPB, 2.0 * g)
        put(IP, IQB, -2.0 * g)
        put(IQ, IP, g)
        put(IQB, IPB, -g)
    return h


def matrix_exponential_check(model: CvModel | str, tau_fraction: float = 1.0) -> np.ndarray:
    """
    Transfer obtained by exponentiating the Heisenberg generator numerically.

    For ``H = (1/2) R^T h R`` the equations of motion read ``dR/dt = K J h R``,
    so ``S(tau) = expm(K tau J h)``. Independent of the closed forms.
    """
    s = float(tau_fraction)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"tau_fraction must lie in [0, 1], got {s}")
    return expm(s * J4 @ hamiltonian_form(model))


def symplectic_defect(S: np.ndarray) -> float:
    """``max |S J S^T - J|``."""
    return float(np.max(np.abs(S @ J4 @ S.T - J4)))


def _error_row(model: CvModel | str) -> np.ndarray:
    # Qbar(dt) - Q(0)
    return transfer(model, 1.0)[IQB] - np.eye(4)[IQ]


def _disturbance_row(model: CvModel | str) -> np.ndarray:
    # P(dt) - P(0)
    return transfer(model, 1.0)[IP] - np.eye(4)[IP]


def rms_error_q(model: CvModel | str, state: GaussianState4) -> float:
    """``<(Qbar(dt) - Q(0))^2>^(1/2)``."""
    return float(np.sqrt(max(0.0, state.mean_square_of(_error_row(model)))))


def rms_disturbance_p(model: CvModel | str, state: GaussianState4) -> float:
    """``<(P(dt) - P(0))^2>^(1/2)``."""
    return float(np.sqrt(max(0.0, state.mean_square_of(_disturbance_row(model)))))


def correlation_term(model: CvModel | str, state: GaussianState4) -> float:
    """
    ``|<[n(Q), P]> + <[Q, d(P)]>|`` for the position/momentum pair.

    Averaging over the probe turns the linear error and disturbance operators
    into ``n(Q) = u_Q Q + u_P P + c`` and ``d(P) = v_Q Q + v_P P + c'``, so
    the term reduces to ``hbar |u_Q + v_P|``.
    """
    u = _error_row(model)
    v = _disturbance_row(model)
    return float(state.hbar * abs(u[IQ] + v[IP]))


def edr_product_report(model: CvModel | str, state: GaussianState4) -> EdrReport:
    """Heisenberg, universal and three-term relations for ``A = Q``, ``B = P``."""
    model = _as_model(model)
    hb = state.hbar
    eps = rms_error_q(model, state)
    eta = rms_disturbance_p(model, state)
    sq = float(np.sqrt(state.cov[IQ, IQ]))
    sp = float(np.sqrt(state.cov[IP, IP]))
    corr = correlation_term(model, state)
    bound = hb / 2.0
    product = eps * eta
    relations = (
        Relation.evaluate("heisenberg", product, bound, TOL.heisenberg_tol),
        Relation.evaluate("universal", product + corr, bound, TOL.theorem_tol),
        Relation.evaluate("ozawa", product + eps * sp + sq * eta, bound, TOL.theorem_tol),
    )
    for r in relations[1:]:
        if not r.satisfied:
            raise EdrViolationError(f"{r.name} relation violated in {model.kind}: {r.lhs} < {r.bound}")
    return EdrReport(
        scenario=model.kind,
        epsilon_A=eps,
        eta_B=eta,
        sigma_A=sq,
        sigma_B=sp,
        correlation_term=corr,
        commutator_bound=bound,
        relations=relations,
        quantities={"product": product, "hbar": hb},
    )


def kennard_check(var_q: float, var_p: float, hbar: float = 1.0) -> EdrReport:
    """
    Preparation spreads ``sigma(Q) sigma(P) >= hbar / 2`` for an uncorrelated mode.

    The moments are first turned into a :class:`GaussianState4` (with a
    minimal probe), so forbidden variances raise ``ValidationError`` there.
    """
    state = GaussianState4.product(np.diag([var_q, var_p]), minimal_mode_cov(1.0, hbar), hbar=hbar)
    sq = float(np.sqrt(state.cov[IQ, IQ]))
    sp = float(np.sqrt(state.cov[IP, IP]))
    rel = Relation.evaluate("kennard", sq * sp, hbar / 2.0, TOL.heisenberg_tol)
    return EdrReport(
        scenario="kennard",
        sigma_A=sq,
        sigma_B=sp,
        commutator_bound=hbar / 2.0,
        relations=(rel,),
        quantities={"product": sq * sp, "equality_gap": sq * sp - hbar / 2.0},
    )


def arthurs_kelly_check(state: GaussianState4) -> EdrReport:
    """
    Joint position-momentum reading of the von Neumann model.

    Meters are ``M_Q = Qbar(dt)`` and ``M_P = P(dt)``; they are unbiased only
    for zero probe means. Checks ``sigma(M_Q) sigma(M_P) >= hbar`` and the
    error trade-off ``eps(Q) eps(P) >= hbar / 2``.
    """
    if abs(state.mean[IQB]) > 0 or abs(state.mean[IPB]) > 0:
        raise ValueError(
            "joint measurement is biased: unbiasedness requires zero probe means "
            f"(<Qbar>={state.mean[IQB]}, <Pbar>={state.mean[IPB]})"
        )
    S = von_neumann_transfer(1.0)
    hb = state.hbar
    s_mq = float(np.sqrt(state.variance_of(S[IQB])))
    s_mp = float(np.sqrt(state.variance_of(S[IP])))
    eps_q = float(np.sqrt(state.mean_square_of(S[IQB] - np.eye(4)[IQ])))
    eps_p = float(np.sqrt(state.mean_square_of(S[IP] - np.eye(4)[IP])))
    relations = (
        Relation.evaluate("arthurs-kelly", s_mq * s_mp, hb, TOL.heisenberg_tol),
        Relation.evaluate("error-tradeoff", eps_q * eps_p, hb / 2.0, TOL.heisenberg_tol),
    )
    for r in relations:
        if not r.satisfied:
            raise EdrViolationError(f"{r.name} relation violated: {r.lhs} < {r.bound}")
    return EdrReport(
        scenario="arthurs-kelly",
        epsilon_A=eps_q,
        eta_B=eps_p,
        commutator_bound=hb / 2.0,
        relations=relations,
        quantities={"sigma_MQ": s_mq, "sigma_MP": s_mp, "epsilon_P": eps_p},
    )


def random_mode_cov(rng: np.random.Generator, hbar: float = 1.0, minimal: bool = False) -> np.ndarray:
    """Thermal-squeezed-rotated single-mode covariance; pure and unrotated if ``minimal``."""
    if minimal:
        return minimal_mode_cov(float(np.exp(rng.uniform(-2.0, 2.0))), hbar)
    n = rng.uniform(1.0, 3.0)
    r = rng.uniform(-1.0, 1.0)
    th = rng.uniform(0.0, np.pi)
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    return 0.5 * hbar * n * rot @ np.diag([np.exp(2 * r), np.exp(-2 * r)]) @ rot.T


def random_gaussian_state(
    rng: np.random.Generator,
    hbar: float = 1.0,
    zero_probe_mean: bool = False,
    minimal_probe: bool = False,
    zero_mean: bool = False,
) -> GaussianState4:
    obj_mean = np.zeros(2) if zero_mean else rng.normal(0.0, 2.0, 2)
    probe_mean = np.zeros(2) if (zero_mean or zero_probe_mean) else rng.normal(0.0, 2.0, 2)
    return GaussianState4.product(
        random_mode_cov(rng, hbar),
        random_mode_cov(rng, hbar, minimal=minimal_probe),
        obj_mean,
        probe_mean,
        hbar,
    )


# --- grid quadrature cross-check -------------------------------------------


def gaussian_wavefunction(x, mean: float = 0.0, var: float = 1.0, momentum: float = 0.0, hbar: float = 1.0):
    """Gaussian wave packet with ``|psi|^2`` of the given mean and variance."""
    x = np.asarray(x, dtype=float)
    amp = (2.0 * np.pi * var) ** -0.25 * np.exp(-((x - mean) ** 2) / (4.0 * var))
    return amp * np.exp(1j * momentum * x / hbar)


def centered_grid(n: int, half_width: float) -> np.ndarray:
    """Uniform grid ``(i - n // 2) h`` with a node at 0 and extent about ``+-half_width``."""
    h = 2.0 * half_width / n
    return (np.arange(n) - n // 2) * h


@dataclass(frozen=True)
class _Grid:
    x: np.ndarray
    h: float
    zero: int
    weights: np.ndarray = field(repr=False)


def _check_grid(x) -> _Grid:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise ValidationError("grid must be a 1-d array with at least 3 points")
    d = np.diff(x)
    h = float(d.mean())
    if h <= 0 or np.max(np.abs(d - h)) > 1e-9 * h:
        raise ValidationError("grid must be uniform and increasing")
    zero = int(np.argmin(np.abs(x)))
    if abs(x[zero]) > 1e-9 * h:
        raise ValidationError("grid must contain the origin as a node")
    w = np.full(x.size, h)
    w[0] = w[-1] = 0.5 * h
    return _Grid(x, h, zero, w)


def outcome_density(psi, xi, x) -> np.ndarray:
    """
    Meter density ``p(y) = int |psi(x)|^2 |xi(y - x)|^2 dx`` on the grid.

    The inner integral is a trapezoid sum, evaluated as a discrete convolution.
    """
    g = _check_grid(x)
    psi = np.asarray(psi, dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    if psi.shape != g.x.shape or xi.shape != g.x.shape:
        raise ValidationError("wave functions must be sampled on the shared grid")
    a = np.abs(psi) ** 2
    b = np.abs(xi) ** 2
    for name, f in (("psi", a), ("xi", b)):
        norm = trapezoid(f, g.x)
        if abs(norm - 1.0) > TOL.grid_norm_tol:
            raise ValidationError(f"{name} is not normalized on the grid (norm {norm:.10g})")
    full = np.convolve(g.weights * a, b)
    n = g.x.size
    return full[g.zero : g.zero + n]


def outcome_distribution(psi, xi, x, interval=(-np.inf, np.inf)) -> float:
    """``Pr{a < y <= b}`` for the von Neumann meter reading."""
    a, b = interval
    p = outcome_density(psi, xi, x)
    grid = np.asarray(x, dtype=float)
    F = cumulative_trapezoid(p, grid, initial=0.0)
    lo = np.interp(np.clip(a, grid[0], grid[-1]), grid, F)
    hi = np.interp(np.clip(b, grid[0], grid[-1]), grid, F)
    return float(max(0.0, hi - lo)) if b >= a else 0.0


def outcome_moments(psi, xi, x) -> tuple[float, float, float]:
    """Total probability, mean and variance of the meter reading."""
    p = outcome_density(psi, xi, x)
    grid = np.asarray(x, dtype=float)
    total = trapezoid(p, grid)
    mean = trapezoid(grid * p, grid) / total
    var = trapezoid((grid - mean) ** 2 * p, grid) / total
    return float(total), float(mean), float(var)
