"""Config-driven experiment runner.

Subcommands:

* ``run <config>``     execute one experiment; write trajectory.csv and
                       summary.txt into the output directory.
* ``sweep <config>``   run a grid over schedule constants c and s; one
                       subdirectory per cell plus an aggregate sweep_summary.csv.
* ``verify <config>``  run the requested checks only; print the summary,
                       write no trajectory CSV.
* ``info <config>``    print resolved defaults, admissibility margin and the
                       rate constants (alpha, rho, K0) without running.

Exit status: 0 when every requested check passed or was skipped, 1 when any
check failed, 2 for configuration errors.

The trajectory CSV has one row per recorded step.  Row k holds the pre-step
state diagnostics (distances, Lyapunov value) at iterate k together with the
transition quantities of step k -> k+1 (numerical error, lemma slack,
residuals).  Values are written with 17 significant digits so downstream
tolerance checks read back losslessly; entries that are not defined for the
run (no saddle point, no matching lemma, gaps in accelerated records) are
``nan``.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .config import (
    CHECK_LEMMA,
    CHECK_ODE_COMPARE,
    CHECK_RATE_FIT,
    CHECK_THEOREM,
    ConfigError,
    ExperimentConfig,
    materialize,
    parse_config,
    serialize_config,
)
from .dynamics import OdeState, integrate
from .engine import Trajectory, run
from .lyapunov import (
    NoMatchingLemma,
    alpha_rate,
    check_lemma,
    lyapunov_accelerated,
    lyapunov_varying,
    numerical_error,
    rho_rate,
    slack_tolerance,
    theorem_bound,
)
from .problems import PrimalDualPair
from .rates import contraction_factors, default_window, fit_rate
from .schedules import ACCELERATED, FIXED, OPTIMAL_SS, VARYING_SC, Schedule, k0_threshold
from .zoo import QUAD_PAIR, BuiltInstance, reference_saddle

CSV_COLUMNS = [
    "k", "tau_k", "sigma_k", "theta_k", "dist_x_sq", "dist_y_sq", "lyapunov",
    "ne", "lemma_slack", "theorem_bound", "primal_residual", "dual_residual",
]

JOBS_ENV_VAR = "PDHGLAB_JOBS"

PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    detail: str = ""

    def line(self) -> str:
        text = f"check.{self.name} = {self.status}"
        if self.detail:
            text += f" ({self.detail})"
        return text


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _sq(u: np.ndarray, v: np.ndarray) -> float:
    d = u - v
    return float(d @ d)


def _resolve_saddle(built: BuiltInstance) -> tuple[Optional[PrimalDualPair], str]:
    if built.saddle is not None:
        source = "kkt_oracle" if built.spec.kind == QUAD_PAIR else "closed_form"
        return built.saddle, source
    try:
        return reference_saddle(built.problem, F_norm=built.F_norm), "reference_run"
    except RuntimeError:
        return None, "unavailable"


def _lyapunov_series(
    traj: Trajectory, problem, saddle: Optional[PrimalDualPair]
) -> list[tuple[float, float]]:
    """(E(k), NE of the associated transition) aligned with traj.records.

    The accelerated form needs the previous iterate; entries that are not
    computable (no saddle, record gaps) are nan.
    """
    nan = float("nan")
    if saddle is None:
        return [(nan, nan)] * len(traj.records)
    sched = traj.schedule
    F = problem.F
    out = []
    if sched.regime == ACCELERATED:
        prev = None
        for rec in traj.records:
            if prev is None and rec.k == sched.k_start:
                E = lyapunov_accelerated(
                    rec.x, rec.x, traj.init.y, saddle, rec.tau, None, sched.s, F
                )
                ne = numerical_error(
                    np.zeros_like(rec.x), rec.y - traj.init.y, None, sched.s, F,
                    accelerated=True,
                )
            elif prev is not None and prev.k == rec.k - 1:
                E = lyapunov_accelerated(
                    rec.x, prev.x, prev.y, saddle, rec.tau, prev.tau, sched.s, F
                )
                ne = numerical_error(
                    rec.x - prev.x, rec.y - prev.y, prev.tau, sched.s, F,
                    accelerated=True,
                )
            else:
                E, ne = nan, nan
            out.append((E, ne))
            prev = rec
    else:
        for rec in traj.records:
            E = lyapunov_varying(rec.x, rec.y, saddle, rec.tau, rec.sigma, F)
            ne = numerical_error(
                rec.x_next - rec.x, rec.y_next - rec.y, rec.tau, rec.sigma, F
            )
            out.append((E, ne))
    return out


def _bound_constants(built, schedule, traj, E_series):
    """Constants the regime's theorem bound needs, or None when unavailable."""
    mu, gamma = built.problem.mu, built.problem.gamma
    F_norm = built.F_norm
    if schedule.regime == VARYING_SC:
        if not traj.records or traj.records[0].k != 0 or math.isnan(E_series[0][0]):
            return None
        rec0 = traj.records[0]
        return dict(
            mu=mu, c=schedule.c, s=schedule.s, F_norm=F_norm,
            E0=E_series[0][0],
            dx0=_sq(rec0.x, built.saddle.x) if built.saddle is not None else None,
            dy0=_sq(rec0.y, built.saddle.y) if built.saddle is not None else None,
        )
    if schedule.regime == ACCELERATED:
        K0 = k0_threshold(mu, schedule.c)
        E_K0 = None
        for rec, (E, _) in zip(traj.records, E_series):
            if rec.k == K0 and not math.isnan(E):
                E_K0 = E
                break
        if E_K0 is None:
            return None
        return dict(mu=mu, c=schedule.c, E_K0=E_K0, K0=K0)
    if schedule.regime == OPTIMAL_SS:
        if not traj.records or traj.records[0].k != 0 or math.isnan(E_series[0][0]):
            return None
        return dict(
            mu=mu, gamma=gamma, s=schedule.s, F_norm=F_norm, E0=E_series[0][0]
        )
    return None


def _bound_at(regime, k, consts) -> float:
    if consts is None:
        return float("nan")
    if regime == VARYING_SC:
        return theorem_bound(
            regime, k, mu=consts["mu"], c=consts["c"], s=consts["s"],
            F_norm=consts["F_norm"], E0=consts["E0"],
        )
    if regime == ACCELERATED:
        return theorem_bound(
            regime, k, mu=consts["mu"], c=consts["c"], E_K0=consts["E_K0"]
        )
    if regime == OPTIMAL_SS:
        return theorem_bound(
            regime, k, mu=consts["mu"], gamma=consts["gamma"], s=consts["s"],
            F_norm=consts["F_norm"], E0=consts["E0"],
        )
    return float("nan")


def _check_lemma(config, built, traj, saddle) -> tuple[CheckResult, Optional[list]]:
    if saddle is None:
        return CheckResult(CHECK_LEMMA, SKIPPED, "no certified saddle available"), None
    try:
        records = check_lemma(config.regime, traj, built.problem, saddle, built.F_norm)
    except NoMatchingLemma as exc:
        return CheckResult(CHECK_LEMMA, SKIPPED, str(exc)), None
    except ValueError as exc:
        return CheckResult(CHECK_LEMMA, FAIL, str(exc)), None
    worst_k, worst_margin = None, math.inf
    for rec in records:
        margin = rec.lemma_slack + slack_tolerance(rec.E)
        if margin < worst_margin:
            worst_k, worst_margin = rec.k, margin
    if worst_margin < 0.0:
        return (
            CheckResult(
                CHECK_LEMMA, FAIL,
                f"slack violation at k={worst_k}, margin={worst_margin:.3e}",
            ),
            records,
        )
    detail = f"{len(records)} transitions"
    if worst_k is not None:
        detail += f", min margin {worst_margin:.3e} at k={worst_k}"
    return CheckResult(CHECK_LEMMA, PASS, detail), records


def _check_theorem(config, built, schedule, traj, saddle, E_series, consts) -> CheckResult:
    regime = config.regime
    if regime == FIXED:
        return CheckResult(
            CHECK_THEOREM, SKIPPED, "fixed regime has no closed-form rate guarantee"
        )
    if saddle is None:
        return CheckResult(CHECK_THEOREM, SKIPPED, "no certified saddle available")
    if consts is None:
        return CheckResult(
            CHECK_THEOREM, SKIPPED,
            "bound constants unavailable (run not recorded from its start)",
        )
    mu, gamma = built.problem.mu, built.problem.gamma

    if regime == VARYING_SC:
        worst = 0.0
        for rec, (E, _) in zip(traj.records, E_series):
            if math.isnan(E):
                continue
            bound = _bound_at(regime, rec.k, consts)
            if E > bound * (1.0 + 1e-6):
                worst = max(worst, E / bound if bound > 0 else math.inf)
        if worst > 0.0:
            return CheckResult(
                CHECK_THEOREM, FAIL, f"Lyapunov bound exceeded, worst ratio {worst:.6g}"
            )
        for rec in traj.records:
            dist = _sq(rec.x, saddle.x)
            tb = theorem_bound(
                regime, rec.k, mu=mu, c=consts["c"], s=consts["s"],
                F_norm=consts["F_norm"], dx0=consts["dx0"], dy0=consts["dy0"],
                form="trajectory",
            )
            if dist > tb * (1.0 + 1e-6):
                return CheckResult(
                    CHECK_THEOREM, FAIL,
                    f"trajectory bound exceeded at k={rec.k}: {dist:.6g} > {tb:.6g}",
                )
        return CheckResult(CHECK_THEOREM, PASS, "Lyapunov and trajectory bounds hold")

    if regime == ACCELERATED:
        K0 = consts["K0"]
        for rec in traj.records:
            if rec.k < K0:
                continue
            dist = _sq(rec.x, saddle.x)
            bound = _bound_at(regime, rec.k, consts)
            if dist > bound * (1.0 + 1e-6):
                return CheckResult(
                    CHECK_THEOREM, FAIL,
                    f"O(1/k^2) bound exceeded at k={rec.k}: {dist:.6g} > {bound:.6g}",
                )
        return CheckResult(CHECK_THEOREM, PASS, f"O(1/k^2) bound holds from K0={K0}")

    # OPTIMAL_SS: per-step contraction plus the terminal weighted sandwich.
    rho = rho_rate(mu, gamma, schedule.s, built.F_norm)
    series = [
        (rec.k, E) for rec, (E, _) in zip(traj.records, E_series) if not math.isnan(E)
    ]
    try:
        summary = contraction_factors(series)
        if summary.max_ratio > rho + 1e-8:
            return CheckResult(
                CHECK_THEOREM, FAIL,
                f"contraction ratio {summary.max_ratio:.12g} exceeds rho={rho:.12g}",
            )
        ratio_detail = f"max ratio {summary.max_ratio:.6g} <= rho {rho:.6g}"
    except ValueError:
        ratio_detail = "contraction ratios not measurable (series too short)"
    last = traj.records[-1]
    K = last.k + 1
    weighted = mu * _sq(last.x_next, saddle.x) + gamma * _sq(last.y_next, saddle.y)
    rec0 = traj.records[0]
    sandwich = theorem_bound(
        regime, K, mu=mu, gamma=gamma, s=schedule.s, F_norm=built.F_norm,
        dx0=_sq(rec0.x, saddle.x), dy0=_sq(rec0.y, saddle.y), form="trajectory",
    )
    if weighted > sandwich * (1.0 + 1e-9) + 1e-300:
        return CheckResult(
            CHECK_THEOREM, FAIL,
            f"terminal weighted distance {weighted:.6g} exceeds sandwich {sandwich:.6g}",
        )
    return CheckResult(CHECK_THEOREM, PASS, ratio_detail)


def _check_rate_fit(config, built, traj, saddle) -> tuple[CheckResult, Optional[float], Optional[float]]:
    if saddle is None:
        return CheckResult(CHECK_RATE_FIT, SKIPPED, "no certified saddle available"), None, None
    K0 = 1
    if config.regime == ACCELERATED:
        sched_c = traj.schedule.c
        K0 = k0_threshold(built.problem.mu, sched_c)
    lo, hi = default_window(K0)
    hi = min(hi, traj.records[-1].k)
    series = [
        (rec.k, _sq(rec.x, saddle.x))
        for rec in traj.records
        if _sq(rec.x, saddle.x) > 0.0
    ]
    try:
        fit = fit_rate(series, window=(lo, hi), name="dist_x_sq")
    except ValueError as exc:
        return CheckResult(CHECK_RATE_FIT, SKIPPED, str(exc)), None, None
    detail = (
        f"slope {fit.slope:.6g}, residual {fit.residual:.3g}, "
        f"window [{fit.window[0]}, {fit.window[1]}]"
    )
    return CheckResult(CHECK_RATE_FIT, PASS, detail), fit.slope, fit.residual


def _check_ode_compare(config, built, schedule, traj) -> CheckResult:
    problem = built.problem
    if schedule.regime != FIXED:
        return CheckResult(
            CHECK_ODE_COMPARE, SKIPPED, "ODE comparison applies to the fixed regime"
        )
    if problem.grad_f is None or problem.grad_gstar is None:
        return CheckResult(
            CHECK_ODE_COMPARE, SKIPPED, "problem lacks smooth gradient oracles"
        )
    T = 10.0
    x0 = np.zeros(problem.d1)
    y0 = np.zeros(problem.d2)
    sups = []
    for level in range(3):
        scale = 0.5**level
        s = schedule.s * scale
        tau = schedule.tau * scale
        sigma = schedule.sigma * scale
        n_iter = int(math.ceil(T / s))
        sub_sched = Schedule(regime=FIXED, s=s, tau=tau, sigma=sigma)
        sub_traj = run(
            problem, sub_sched, PrimalDualPair(x=x0, y=y0),
            budget=n_iter, tol=0.0, record_every=1,
        )
        ref = integrate(OdeState(X=x0, Y=y0, t=0.0), T, s / 100.0, s, tau, sigma, problem)
        sup = 0.0
        for rec in sub_traj.records:
            idx = (rec.k + 1) * 100
            if (rec.k + 1) * s > T + 1e-12 or idx >= len(ref):
                continue
            state = ref[idx]
            err = math.sqrt(_sq(rec.x_next, state.X) + _sq(rec.y_next, state.Y))
            sup = max(sup, err)
        sups.append(sup)
    ratios = [sups[i + 1] / sups[i] for i in range(2)] if min(sups) > 0 else []
    if ratios and max(ratios) <= 0.7:
        return CheckResult(
            CHECK_ODE_COMPARE, PASS,
            "halving ratios " + ", ".join(f"{r:.3f}" for r in ratios),
        )
    if not ratios:
        return CheckResult(CHECK_ODE_COMPARE, SKIPPED, "discretization error is zero")
    return CheckResult(
        CHECK_ODE_COMPARE, FAIL,
        "halving ratios " + ", ".join(f"{r:.3f}" for r in ratios) + " exceed 0.7",
    )


def _summary_header(config, built, schedule) -> list[str]:
    spec = built.spec
    problem = built.problem
    lines = [f"regime = {config.regime}", f"instance.kind = {spec.kind}"]
    lines.append(f"instance.d1 = {problem.d1}")
    lines.append(f"instance.d2 = {problem.d2}")
    lines.append(f"instance.seed = {spec.seed}")
    if spec.lam is not None:
        lines.append(f"instance.lam = {_fmt(spec.lam)}")
    lines.append(f"instance.mu = {_fmt(problem.mu)}")
    lines.append(f"instance.gamma = {_fmt(problem.gamma)}")
    lines.append(f"F_norm = {_fmt(built.F_norm)}")
    lines.append(f"admissibility.s_F_norm = {_fmt(schedule.s * built.F_norm)}")
    lines.append(f"admissibility.margin = {_fmt(1.0 - schedule.s * built.F_norm)}")
    lines.append(f"schedule.s = {_fmt(schedule.s)}")
    if schedule.c is not None:
        lines.append(f"schedule.c = {_fmt(schedule.c)}")
    if schedule.tau is not None:
        lines.append(f"schedule.tau = {_fmt(schedule.tau)}")
    if schedule.sigma is not None:
        lines.append(f"schedule.sigma = {_fmt(schedule.sigma)}")
    lines.append(f"schedule.k_start = {schedule.k_start}")
    if config.regime == VARYING_SC:
        alpha = alpha_rate(problem.mu, schedule.c, schedule.s, built.F_norm)
        lines.append(f"rate.alpha = {_fmt(alpha)}")
    elif config.regime == ACCELERATED:
        lines.append(f"rate.K0 = {k0_threshold(problem.mu, schedule.c)}")
    elif config.regime == OPTIMAL_SS:
        rho = rho_rate(problem.mu, problem.gamma, schedule.s, built.F_norm)
        lines.append(f"rate.rho = {_fmt(rho)}")
    return lines


def execute(
    config: ExperimentConfig,
    write_trajectory: bool = True,
    quiet: bool = False,
):
    """Run one experiment; returns (exit_code, summary_lines, metrics)."""
    built, schedule = materialize(config)
    problem = built.problem
    init = PrimalDualPair(x=np.zeros(problem.d1), y=np.zeros(problem.d2))
    traj = run(
        problem, schedule, init,
        budget=config.budget, tol=config.tol, record_every=config.record_every,
    )
    saddle, saddle_source = _resolve_saddle(built)
    E_series = _lyapunov_series(traj, problem, saddle)
    consts = _bound_constants(built, schedule, traj, E_series) if saddle else None

    lemma_by_k = {}
    results: list[CheckResult] = []
    metrics = {"slope": None, "slope_residual": None, "geomean_ratio": None}
    for name in config.checks:
        if name == CHECK_LEMMA:
            result, lem_records = _check_lemma(config, built, traj, saddle)
            if lem_records:
                lemma_by_k = {rec.k: rec.lemma_slack for rec in lem_records}
        elif name == CHECK_THEOREM:
            result = _check_theorem(config, built, schedule, traj, saddle, E_series, consts)
        elif name == CHECK_RATE_FIT:
            result, slope, resid = _check_rate_fit(config, built, traj, saddle)
            metrics["slope"], metrics["slope_residual"] = slope, resid
        else:
            result = _check_ode_compare(config, built, schedule, traj)
        results.append(result)

    if metrics["slope"] is None and traj.records and saddle is not None:
        # The sweep aggregate wants a slope even when rate_fit was not requested.
        _, slope, resid = _check_rate_fit(config, built, traj, saddle)
        metrics["slope"], metrics["slope_residual"] = slope, resid
    finite_E = [
        (rec.k, E) for rec, (E, _) in zip(traj.records, E_series) if not math.isnan(E)
    ]
    if len(finite_E) >= 2:
        try:
            metrics["geomean_ratio"] = contraction_factors(finite_E).geomean_ratio
        except ValueError:
            pass

    exit_code = 1 if any(r.status == FAIL for r in results) else 0

    lines = _summary_header(config, built, schedule)
    lines.append(f"run.budget = {config.budget}")
    lines.append(f"run.tol = {_fmt(config.tol)}")
    lines.append(f"run.record_every = {config.record_every}")
    lines.append(f"run.termination = {traj.termination}")
    last = traj.records[-1]
    lines.append(f"run.last_k = {last.k}")
    lines.append(f"run.final_primal_residual = {_fmt(last.primal_residual)}")
    lines.append(f"run.final_dual_residual = {_fmt(last.dual_residual)}")
    lines.append(f"saddle.source = {saddle_source}")
    if metrics["slope"] is not None:
        lines.append(f"rate_fit.slope = {_fmt(metrics['slope'])}")
        lines.append(f"rate_fit.residual = {_fmt(metrics['slope_residual'])}")
    if metrics["geomean_ratio"] is not None:
        lines.append(f"contraction.geomean_ratio = {_fmt(metrics['geomean_ratio'])}")
    for result in results:
        lines.append(result.line())
    lines.append(f"exit_status = {exit_code}")

    if write_trajectory:
        out_dir = config.output or "."
        os.makedirs(out_dir, exist_ok=True)
        _write_csv(
            os.path.join(out_dir, "trajectory.csv"),
            traj, saddle, E_series, lemma_by_k, config.regime, consts,
        )
        with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
            fh.write("\n".join(lines) + "\n")
    if not quiet:
        print("\n".join(lines))
    return exit_code, lines, metrics


def _write_csv(path, traj, saddle, E_series, lemma_by_k, regime, consts):
    nan = float("nan")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec, (E, ne) in zip(traj.records, E_series):
            if saddle is not None:
                dist_x = _sq(rec.x, saddle.x)
                dist_y = _sq(rec.y, saddle.y)
            else:
                dist_x = dist_y = nan
            if regime == FIXED or consts is None:
                bound = nan
            else:
                bound = _bound_at(regime, rec.k, consts)
            writer.writerow(
                [str(rec.k)]
                + [
                    _fmt(v)
                    for v in (
                        rec.tau, rec.sigma, rec.theta, dist_x, dist_y, E, ne,
                        lemma_by_k.get(rec.k, nan), bound,
                        rec.primal_residual, rec.dual_residual,
                    )
                ]
            )


def _sweep_cells(config: ExperimentConfig):
    cs = config.sweep_c if config.sweep_c is not None else (config.c,)
    ss = config.sweep_s if config.sweep_s is not None else (config.s,)
    cells = []
    for i, c in enumerate(cs):
        for j, s in enumerate(ss):
            cells.append((i, j, c, s))
    return cells


def _run_cell(payload):
    text, i, j, c, s, base_output = payload
    config = parse_config(text)
    cell = replace(
        config, c=c, s=s, sweep_c=None, sweep_s=None,
        output=os.path.join(base_output, f"cell_{i}_{j}"),
    )
    exit_code, _, metrics = execute(cell, write_trajectory=True, quiet=True)
    return (i, j, c, s, exit_code, metrics)


def sweep(config: ExperimentConfig) -> int:
    """Grid runner over the schedule constants; every cell is validated
    before any cell executes."""
    cells = _sweep_cells(config)
    base_output = config.output or "."
    for i, j, c, s in cells:
        try:
            materialize(replace(config, c=c, s=s, sweep_c=None, sweep_s=None))
        except ConfigError as exc:
            raise ConfigError(f"sweep cell ({i}, {j}) with c={c}, s={s}: {exc}") from exc

    text = serialize_config(replace(config, sweep_c=None, sweep_s=None))
    payloads = [(text, i, j, c, s, base_output) for i, j, c, s in cells]
    jobs = int(os.environ.get(JOBS_ENV_VAR, "1"))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_cell, payloads))
    else:
        outcomes = [_run_cell(p) for p in payloads]

    os.makedirs(base_output, exist_ok=True)
    agg_path = os.path.join(base_output, "sweep_summary.csv")
    overall = 0
    with open(agg_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["cell", "c", "s", "slope", "slope_residual", "geomean_ratio", "exit_status"]
        )
        for i, j, c, s, code, metrics in outcomes:
            overall = max(overall, code)
            writer.writerow(
                [
                    f"cell_{i}_{j}",
                    "" if c is None else _fmt(c),
                    "" if s is None else _fmt(s),
                    "" if metrics["slope"] is None else _fmt(metrics["slope"]),
                    "" if metrics["slope_residual"] is None else _fmt(metrics["slope_residual"]),
                    "" if metrics["geomean_ratio"] is None else _fmt(metrics["geomean_ratio"]),
                    str(code),
                ]
            )
    print(f"wrote {agg_path} ({len(outcomes)} cells)")
    return overall


def info(config: ExperimentConfig) -> int:
    built, schedule = materialize(config)
    lines = _summary_header(config, built, schedule)
    lines.append(f"run.budget = {config.budget}")
    lines.append(f"run.tol = {_fmt(config.tol)}")
    lines.append(f"run.record_every = {config.record_every}")
    lines.append(f"checks = {','.join(config.checks) if config.checks else '(none)'}")
    print("\n".join(lines))
    return 0


def _load(path: str) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pdhglab",
        description="Primal-dual hybrid gradient experiments with Lyapunov diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("run", "execute one experiment and write trajectory.csv + summary.txt"),
        ("sweep", "run a grid over schedule constants c and s"),
        ("verify", "run the requested checks only (no trajectory CSV)"),
        ("info", "print resolved schedule constants and rate quantities"),
    ]:
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="path to a JSON experiment config")

    args = parser.parse_args(argv)
    try:
        config = _load(args.config)
        if args.command == "run":
            code, _, _ = execute(config, write_trajectory=True)
            return code
        if args.command == "verify":
            code, _, _ = execute(config, write_trajectory=False)
            return code
        if args.command == "sweep":
            return sweep(config)
        return info(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
