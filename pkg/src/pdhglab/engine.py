"""The primal-dual hybrid gradient iteration.

One iteration at index k maps (x_k, y_k) to (x_{k+1}, y_{k+1}) through a
proximal descent step on f, an extrapolation, and a proximal ascent step
on g*:

    x_{k+1}    = prox_{tau_k f}(x_k - tau_k F^T y_k)
    xbar_{k+1} = x_{k+1} + theta_k (x_{k+1} - x_k)
    y_{k+1}    = prox_{sigma_k g*}(y_k + sigma_k F xbar_{k+1})

The prox-composed form is an exact rewrite of the defining argmin/argmax
subproblems; the equivalence is itself a tested property.

:func:`run` drives the iteration under a :class:`~pdhglab.schedules.Schedule`
and records :class:`StepRecord` snapshots.  Residuals attached to each record
are fixed-point displacement residuals

    primal: || (x_k - x_{k+1}) / tau_k  - F^T (y_k - y_{k+1}) ||
    dual:   || (y_k - y_{k+1}) / sigma_k - theta_k F (x_k - x_{k+1}) ||

which both vanish exactly at a saddle point and, for smooth terms, equal the
norms of the stationarity gaps || grad f(x_{k+1}) + F^T y_{k+1} || and
|| grad g*(y_{k+1}) - F x_{k+1} ||-like quantities up to the displacement
scaling.  :func:`optimality_residual` evaluates the exact per-step inclusion
residuals instead (zero for exact prox oracles, regardless of distance to the
saddle).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problems import PrimalDualPair, SaddleProblem
from .schedules import ACCELERATED, Schedule, schedule_at

TERMINATION_BUDGET = "budget"
TERMINATION_RESIDUAL = "residual_tol"
TERMINATION_DIVERGENCE = "divergence_guard"

#: Abort threshold on ||x_k|| + ||y_k||; inadmissible configurations must
#: fail loudly instead of hanging.
DIVERGENCE_GUARD = 1e12


@dataclass(frozen=True, eq=False)
class StepRecord:
    """One recorded transition k -> k+1 with pre- and post-states."""

    k: int
    tau: float
    sigma: float
    theta: float
    x: np.ndarray
    y: np.ndarray
    x_next: np.ndarray
    x_bar: np.ndarray
    y_next: np.ndarray
    primal_residual: float
    dual_residual: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded steps of one solver run.

    ``init`` is the user-supplied starting pair.  For the accelerated
    regime the engine performs a preparatory dual half-step before the
    recorded iterations begin (see :func:`run`), so ``init.y`` precedes
    the first record's pre-state dual variable.
    """

    records: tuple[StepRecord, ...]
    init: PrimalDualPair
    schedule: Schedule
    termination: str

    @property
    def final(self) -> PrimalDualPair:
        last = self.records[-1]
        return PrimalDualPair(x=last.x_next, y=last.y_next)


def pdhg_step(
    problem: SaddleProblem,
    x_k: np.ndarray,
    y_k: np.ndarray,
    x_prev: Optional[np.ndarray],
    tau_k: float,
    sigma_k: float,
    theta_k: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Advance one iteration; returns (x_{k+1}, xbar_{k+1}, y_{k+1}).

    ``x_prev`` is accepted for symmetry with diagnostic call sites; the
    update itself never reads it.
    """
    if tau_k <= 0 or sigma_k <= 0:
        raise ValueError("step sizes must be positive")
    if not 0.0 <= theta_k <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    x_next = problem.prox_f(x_k - tau_k * (problem.F.T @ y_k), tau_k)
    x_bar = x_next + theta_k * (x_next - x_k)
    y_next = problem.prox_gstar(y_k + sigma_k * (problem.F @ x_bar), sigma_k)
    return x_next, x_bar, y_next


def step_residuals(
    F: np.ndarray,
    x_k: np.ndarray,
    y_k: np.ndarray,
    x_next: np.ndarray,
    y_next: np.ndarray,
    tau_k: float,
    sigma_k: float,
    theta_k: float,
) -> tuple[float, float]:
    """Displacement (fixed-point) residuals of one transition."""
    dx = x_k - x_next
    dy = y_k - y_next
    rp = float(np.linalg.norm(dx / tau_k - F.T @ dy))
    rd = float(np.linalg.norm(dy / sigma_k - theta_k * (F @ dx)))
    return rp, rd


def run(
    problem: SaddleProblem,
    schedule: Schedule,
    init: PrimalDualPair,
    budget: int,
    tol: float = 1e-10,
    record_every: int = 1,
) -> Trajectory:
    """Iterate under ``schedule`` until the budget is exhausted, both
    displacement residuals fall below ``tol``, or the divergence guard
    trips.

    Every ``record_every``-th step is recorded, plus the final step.  The
    accelerated regime starts at k = 1 from the user pair (x_1, y_0): the
    engine first applies the k = 0 dual half-step
    y_1 = prox_{sigma_0 g*}(y_0 + sigma_0 F x_1) with sigma_0 = c s^2
    (no primal step, no extrapolation — 1/tau_0 := 0), after which every
    recorded transition is a full iteration.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if record_every < 1:
        raise ValueError("record_every must be at least 1")
    x = np.asarray(init.x, dtype=float)
    y = np.asarray(init.y, dtype=float)
    if x.shape != (problem.d1,) or y.shape != (problem.d2,):
        raise ValueError(
            f"init shapes {x.shape}, {y.shape} do not match problem dims "
            f"({problem.d1},), ({problem.d2},)"
        )

    if schedule.regime == ACCELERATED:
        sigma0 = schedule.c * schedule.s**2
        y = problem.prox_gstar(y + sigma0 * (problem.F @ x), sigma0)

    records = []
    termination = TERMINATION_BUDGET
    for i in range(budget):
        k = schedule.k_start + i
        tau_k, sigma_k, theta_k = schedule_at(schedule, k)
        x_next, x_bar, y_next = pdhg_step(problem, x, y, None, tau_k, sigma_k, theta_k)
        rp, rd = step_residuals(problem.F, x, y, x_next, y_next, tau_k, sigma_k, theta_k)

        state_norm = float(np.linalg.norm(x_next)) + float(np.linalg.norm(y_next))
        diverged = (not np.isfinite(state_norm)) or state_norm > DIVERGENCE_GUARD
        hit_tol = max(rp, rd) <= tol
        last = diverged or hit_tol or i == budget - 1

        if i % record_every == 0 or last:
            records.append(
                StepRecord(
                    k=k,
                    tau=tau_k,
                    sigma=sigma_k,
                    theta=theta_k,
                    x=x,
                    y=y,
                    x_next=x_next,
                    x_bar=x_bar,
                    y_next=y_next,
                    primal_residual=rp,
                    dual_residual=rd,
                )
            )
        x, y = x_next, y_next
        if diverged:
            termination = TERMINATION_DIVERGENCE
            break
        if hit_tol:
            termination = TERMINATION_RESIDUAL
            break

    return Trajectory(
        records=tuple(records),
        init=init,
        schedule=schedule,
        termination=termination,
    )


def optimality_residual(problem: SaddleProblem, record: StepRecord) -> tuple[float, float]:
    """Exact inclusion residuals of one recorded transition.

        r_x = dist(0, @f(x_{k+1}) + F^T y_k + (x_{k+1} - x_k)/tau_k)
        r_y = dist(0, @g*(y_{k+1}) - F xbar_{k+1} + (y_{k+1} - y_k)/sigma_k)

    Smooth terms use the gradient oracle; nonsmooth terms need an exact
    subdifferential-distance oracle on the problem.
    """
    F = problem.F
    w_x = F.T @ record.y + (record.x_next - record.x) / record.tau
    if problem.subdiff_f is not None:
        r_x = float(problem.subdiff_f(record.x_next, w_x))
    elif problem.grad_f is not None:
        r_x = float(np.linalg.norm(problem.grad_f(record.x_next) + w_x))
    else:
        raise ValueError(
            "problem has neither subdiff_f nor grad_f; supply a subdifferential "
            "oracle to evaluate the primal inclusion residual"
        )

    w_y = -(F @ record.x_bar) + (record.y_next - record.y) / record.sigma
    if problem.subdiff_gstar is not None:
        r_y = float(problem.subdiff_gstar(record.y_next, w_y))
    elif problem.grad_gstar is not None:
        r_y = float(np.linalg.norm(problem.grad_gstar(record.y_next) + w_y))
    else:
        raise ValueError(
            "problem has neither subdiff_gstar nor grad_gstar; supply a "
            "subdifferential oracle to evaluate the dual inclusion residual"
        )
    return r_x, r_y
