"""Benchmark saddle problems with certified moduli and saddle points.

Three families, all in the minimax form min_x max_y f(x) + <Fx, y> - g*(y):

* ``lasso``      f = 1/2 ||Ax - b||^2, g = lam ||.||_1 composed with F = I,
                 so g* is the indicator of the l-infinity ball of radius lam.
* ``gen_lasso``  same with a user-supplied F (the first-difference matrix
                 gives 1-D total-variation denoising).
* ``quad_pair``  f = mu/2 ||x - a||^2, g* = gamma/2 ||y - b_hat||^2 — both
                 terms strongly convex, saddle available in closed form from
                 the KKT system.

Strong-convexity moduli are recorded on the problem: mu = lambda_min(A^T A)
for the least-squares families (zero when A is column-rank-deficient, in
which case only the fixed regime applies), and the prescribed (mu, gamma)
for quadratic pairs.  Saddle points come from the KKT oracle where closed
form exists and from a certified high-accuracy reference run otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .engine import TERMINATION_RESIDUAL, run
from .problems import PrimalDualPair, SaddleProblem, operator_norm
from .proximal import (
    QuadraticProxCache,
    linf_normal_cone_dist,
    project_linf_ball,
    prox_least_squares,
    prox_shifted_quadratic,
)
from .schedules import FIXED, make_schedule

LASSO = "lasso"
GEN_LASSO = "gen_lasso"
QUAD_PAIR = "quad_pair"
KINDS = (LASSO, GEN_LASSO, QUAD_PAIR)


@dataclass(frozen=True)
class InstanceSpec:
    """Seeded description of a benchmark instance; the seed fully determines
    every generated matrix and vector."""

    kind: str
    d1: int
    d2: Optional[int] = None
    seed: int = 0
    lam: Optional[float] = None
    mu: float = 1.0
    gamma: float = 1.0
    cond: float = 3.0
    m: Optional[int] = None
    identity_a: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}; expected one of {KINDS}")
        if self.d1 < 1:
            raise ValueError("d1 must be at least 1")
        if self.kind == GEN_LASSO and self.d1 < 2:
            raise ValueError("gen_lasso needs d1 >= 2 for the difference operator")
        if self.kind in (LASSO, GEN_LASSO):
            if self.lam is None or self.lam <= 0:
                raise ValueError("lam must be positive for l1-regularized kinds")
        if self.cond < 1:
            raise ValueError("cond must be at least 1")


@dataclass(frozen=True, eq=False)
class BuiltInstance:
    """Materialized instance: the problem, its data, and (when available in
    closed form) its saddle point."""

    spec: InstanceSpec
    problem: SaddleProblem
    F_norm: float
    saddle: Optional[PrimalDualPair] = None
    A: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None
    a: Optional[np.ndarray] = None
    b_hat: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SaddleCertificate:
    """Outcome of a saddle-condition check: PASS iff both inclusion
    residuals are within tolerance."""

    passed: bool
    r_x: float
    r_y: float
    tol: float


@dataclass(frozen=True, eq=False)
class QuadPair:
    """Quadratic-quadratic instance together with its exact saddle point."""

    problem: SaddleProblem
    a: np.ndarray
    b_hat: np.ndarray
    saddle: PrimalDualPair


def difference_matrix(d: int) -> np.ndarray:
    """(d-1) x d first-difference operator with rows (..., -1, +1, ...).

    Annihilates constant vectors; spectral norm below 2.
    """
    if d < 2:
        raise ValueError("difference_matrix needs d >= 2")
    F = np.zeros((d - 1, d))
    idx = np.arange(d - 1)
    F[idx, idx] = -1.0
    F[idx, idx + 1] = 1.0
    return F


def make_lasso(A: np.ndarray, b: np.ndarray, lam: float) -> SaddleProblem:
    """Lasso in saddle form: F is the identity, the dual ball has radius lam."""
    A = np.asarray(A, dtype=float)
    d1 = A.shape[1]
    return make_generalized_lasso(A, b, lam, np.eye(d1))


def make_generalized_lasso(
    A: np.ndarray, b: np.ndarray, lam: float, F: np.ndarray
) -> SaddleProblem:
    """min 1/2 ||Ax - b||^2 + lam ||Fx||_1 in saddle form.

    mu is recorded as lambda_min(A^T A); when A is column-rank-deficient the
    recorded mu is 0 and only the fixed regime applies.  gamma = 0 always
    (the dual term is an indicator).
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    F = np.asarray(F, dtype=float)
    if lam <= 0:
        raise ValueError("lam must be positive")
    if A.ndim != 2 or A.shape[0] != b.size:
        raise ValueError(f"A has {A.shape[0]} rows but b has {b.size} entries")
    if F.shape[1] != A.shape[1]:
        raise ValueError(
            f"F has {F.shape[1]} columns but the primal dimension is {A.shape[1]}"
        )
    cache = QuadraticProxCache(A, b)
    return SaddleProblem(
        d1=A.shape[1],
        d2=F.shape[0],
        F=F,
        prox_f=lambda v, t: prox_least_squares(cache, v, t),
        prox_gstar=lambda w, t: project_linf_ball(w, lam),
        mu=cache.mu,
        gamma=0.0,
        grad_f=lambda x: A.T @ (A @ x - b),
        subdiff_gstar=lambda y, w: linf_normal_cone_dist(y, w, lam),
    )


def make_quad_pair(
    a: np.ndarray, b_hat: np.ndarray, mu: float, gamma: float, F: np.ndarray
) -> QuadPair:
    """f = mu/2 ||x - a||^2 against g* = gamma/2 ||y - b_hat||^2, with the
    exact saddle point solved from the KKT system."""
    if mu <= 0 or gamma <= 0:
        raise ValueError("quad pairs need mu > 0 and gamma > 0")
    a = np.asarray(a, dtype=float).ravel()
    b_hat = np.asarray(b_hat, dtype=float).ravel()
    F = np.asarray(F, dtype=float)
    if F.shape != (b_hat.size, a.size):
        raise ValueError(f"F must be {b_hat.size} x {a.size}, got {F.shape}")
    problem = SaddleProblem(
        d1=a.size,
        d2=b_hat.size,
        F=F,
        prox_f=lambda v, t: prox_shifted_quadratic(a, mu, v, t),
        prox_gstar=lambda w, t: prox_shifted_quadratic(b_hat, gamma, w, t),
        mu=mu,
        gamma=gamma,
        grad_f=lambda x: mu * (x - a),
        grad_gstar=lambda y: gamma * (y - b_hat),
    )
    saddle = _solve_kkt(mu, gamma, F, a, b_hat)
    return QuadPair(problem=problem, a=a, b_hat=b_hat, saddle=saddle)


def _solve_kkt(
    mu: float, gamma: float, F: np.ndarray, a: np.ndarray, b_hat: np.ndarray
) -> PrimalDualPair:
    d2, d1 = F.shape
    K = np.zeros((d1 + d2, d1 + d2))
    K[:d1, :d1] = mu * np.eye(d1)
    K[:d1, d1:] = F.T
    K[d1:, :d1] = -F
    K[d1:, d1:] = gamma * np.eye(d2)
    rhs = np.concatenate([mu * a, gamma * b_hat])
    z = np.linalg.solve(K, rhs)
    residual = float(np.linalg.norm(K @ z - rhs))
    if residual > 1e-10 * (1.0 + float(np.linalg.norm(rhs))):
        raise RuntimeError(f"KKT solve residual {residual} exceeds tolerance")
    return PrimalDualPair(x=z[:d1], y=z[d1:])


def kkt_oracle(pair: QuadPair) -> PrimalDualPair:
    """Exact saddle of a quadratic pair: the unique solution of
    mu(x - a) + F^T y = 0, gamma(y - b_hat) - F x = 0 (always nonsingular
    for positive moduli — the system's symmetric part is positive definite).
    """
    return _solve_kkt(
        pair.problem.mu, pair.problem.gamma, pair.problem.F, pair.a, pair.b_hat
    )


def certify_saddle(
    problem: SaddleProblem, candidate: PrimalDualPair, tol: float
) -> SaddleCertificate:
    """Check the saddle conditions 0 in @f(x*) + F^T y* and
    0 in @g*(y*) - F x* via the problem's residual oracles."""
    F = problem.F
    w_x = F.T @ candidate.y
    if problem.subdiff_f is not None:
        r_x = float(problem.subdiff_f(candidate.x, w_x))
    elif problem.grad_f is not None:
        r_x = float(np.linalg.norm(problem.grad_f(candidate.x) + w_x))
    else:
        raise ValueError("certify_saddle needs subdiff_f or grad_f on the problem")
    w_y = -(F @ candidate.x)
    if problem.subdiff_gstar is not None:
        r_y = float(problem.subdiff_gstar(candidate.y, w_y))
    elif problem.grad_gstar is not None:
        r_y = float(np.linalg.norm(problem.grad_gstar(candidate.y) + w_y))
    else:
        raise ValueError("certify_saddle needs subdiff_gstar or grad_gstar on the problem")
    return SaddleCertificate(passed=r_x <= tol and r_y <= tol, r_x=r_x, r_y=r_y, tol=tol)


def reference_saddle(
    problem: SaddleProblem,
    budget: int = 500_000,
    tol: float = 1e-12,
    certify_tol: float = 1e-8,
    s: Optional[float] = None,
    F_norm: Optional[float] = None,
) -> PrimalDualPair:
    """High-accuracy saddle for instances without closed form: a long
    fixed-regime run to displacement residual ``tol``, then certification.

    Raises RuntimeError if the run does not reach the residual target or the
    certificate fails.
    """
    if F_norm is None:
        F_norm = operator_norm(problem.F)
    sched = make_schedule(FIXED, F_norm, s=s)
    init = PrimalDualPair(x=np.zeros(problem.d1), y=np.zeros(problem.d2))
    traj = run(problem, sched, init, budget=budget, tol=tol, record_every=budget)
    if traj.termination != TERMINATION_RESIDUAL:
        raise RuntimeError(
            f"reference run stopped with termination={traj.termination!r} "
            f"before reaching residual {tol}"
        )
    candidate = traj.final
    cert = certify_saddle(problem, candidate, certify_tol)
    if not cert.passed:
        raise RuntimeError(
            f"reference point failed certification: r_x={cert.r_x}, r_y={cert.r_y} "
            f"(tol {certify_tol})"
        )
    return candidate


def conditioned_matrix(
    rng: np.random.Generator, m: int, n: int, cond: float
) -> np.ndarray:
    """m x n matrix with singular values geomspaced in [1/cond, 1]."""
    r = min(m, n)
    U, _ = np.linalg.qr(rng.standard_normal((m, r)))
    V, _ = np.linalg.qr(rng.standard_normal((n, r)))
    sing = np.geomspace(1.0, 1.0 / cond, r) if r > 1 else np.ones(1)
    return U @ np.diag(sing) @ V.T


def piecewise_constant_signal(rng: np.random.Generator, d: int, segments: int = 5) -> np.ndarray:
    """Noisy piecewise-constant vector — the canonical TV-denoising target."""
    segments = min(segments, d)
    if segments <= 1:
        edges = np.array([], dtype=int)
    else:
        edges = np.sort(rng.choice(np.arange(1, d), size=segments - 1, replace=False))
    levels = rng.uniform(-2.0, 2.0, size=segments)
    signal = np.empty(d)
    start = 0
    for level, stop in zip(levels, np.append(edges, d)):
        signal[start:stop] = level
        start = stop
    return signal + 0.05 * rng.standard_normal(d)


def primal_objective(
    A: np.ndarray, b: np.ndarray, lam: float, F: np.ndarray, x: np.ndarray
) -> float:
    """Composite objective 1/2 ||Ax - b||^2 + lam ||Fx||_1."""
    r = A @ x - b
    return float(0.5 * (r @ r) + lam * np.abs(F @ x).sum())


def build_instance(spec: InstanceSpec) -> BuiltInstance:
    """Materialize a spec into a problem (bitwise-reproducible from the seed).

    Closed-form saddles are attached where they exist: quadratic pairs always
    (KKT oracle), lasso/gen_lasso when lam >= ||A^T b||_inf (then x* = 0 and
    y* = A^T b is feasible, satisfying both saddle inclusions).  Other
    instances leave ``saddle`` as None; see :func:`reference_saddle`.
    """
    rng = np.random.default_rng(spec.seed)

    if spec.kind == QUAD_PAIR:
        d1 = spec.d1
        d2 = spec.d2 if spec.d2 is not None else d1
        if spec.mu <= 0 or spec.gamma <= 0:
            raise ValueError("quad_pair instances need mu > 0 and gamma > 0")
        a = rng.standard_normal(d1)
        b_hat = rng.standard_normal(d2)
        G = rng.standard_normal((d2, d1))
        F = G / np.linalg.norm(G, 2)
        pair = make_quad_pair(a, b_hat, spec.mu, spec.gamma, F)
        return BuiltInstance(
            spec=spec,
            problem=pair.problem,
            F_norm=operator_norm(F),
            saddle=pair.saddle,
            a=a,
            b_hat=b_hat,
        )

    d1 = spec.d1
    if spec.identity_a:
        A = np.eye(d1)
        b = piecewise_constant_signal(rng, d1)
    else:
        m = spec.m if spec.m is not None else 2 * d1
        A = conditioned_matrix(rng, m, d1, spec.cond)
        b = rng.standard_normal(m)

    if spec.kind == LASSO:
        problem = make_lasso(A, b, spec.lam)
    else:
        problem = make_generalized_lasso(A, b, spec.lam, difference_matrix(d1))

    saddle = None
    if spec.kind == LASSO:
        y_star = A.T @ b
        if np.abs(y_star).max() <= spec.lam:
            saddle = PrimalDualPair(x=np.zeros(d1), y=y_star)
    return BuiltInstance(
        spec=spec,
        problem=problem,
        F_norm=operator_norm(problem.F),
        saddle=saddle,
        A=A,
        b=b,
    )
