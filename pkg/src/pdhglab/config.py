"""Experiment configuration: one canonical JSON document, strictly parsed.

Unknown keys are rejected by dotted path ("schedule.momentum"), missing
required fields and violated regime preconditions are rejected by name —
silent typos in schedule constants would corrupt experimental conclusions.

Document shape (see the README for the full grammar):

    {
      "instance": {"kind": "quad_pair", "d": 4, "seed": 1, ...},
      "regime": "optimal_ss",
      "schedule": {"s": 0.45, "c": null, "tau": null, "sigma": null},
      "budget": 2000,
      "tol": 1e-10,
      "record_every": 1,
      "checks": ["lemma", "theorem"],
      "output": "results",
      "sweep": {"c": [0.5, 0.05], "s": [0.4]}
    }

Only "instance" and "regime" are required; everything else defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .schedules import REGIMES, Schedule, make_schedule
from .zoo import KINDS, BuiltInstance, InstanceSpec, build_instance

CHECK_LEMMA = "lemma"
CHECK_THEOREM = "theorem"
CHECK_RATE_FIT = "rate_fit"
CHECK_ODE_COMPARE = "ode_compare"
CHECKS = (CHECK_LEMMA, CHECK_THEOREM, CHECK_RATE_FIT, CHECK_ODE_COMPARE)

DEFAULT_BUDGET = 10_000
DEFAULT_TOL = 1e-10
DEFAULT_RECORD_EVERY = 1


class ConfigError(ValueError):
    """A configuration document is malformed or violates a precondition."""


@dataclass(frozen=True)
class ExperimentConfig:
    instance: InstanceSpec
    regime: str
    s: Optional[float] = None
    c: Optional[float] = None
    tau: Optional[float] = None
    sigma: Optional[float] = None
    budget: int = DEFAULT_BUDGET
    tol: float = DEFAULT_TOL
    record_every: int = DEFAULT_RECORD_EVERY
    checks: tuple[str, ...] = ()
    output: Optional[str] = None
    sweep_c: Optional[tuple[float, ...]] = None
    sweep_s: Optional[tuple[float, ...]] = None


def _require_keys(obj: dict, allowed: dict, path: str) -> None:
    for key in obj:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f'unknown key "{where}"')
        expected = allowed[key]
        value = obj[key]
        if value is None:
            continue
        if expected is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(
                    f'key "{path + "." if path else ""}{key}" must be a number'
                )
        elif not isinstance(value, expected):
            kind = {int: "an integer", str: "a string", bool: "a boolean",
                    dict: "an object", list: "an array"}[expected]
            raise ConfigError(f'key "{path + "." if path else ""}{key}" must be {kind}')


def _parse_instance(obj) -> InstanceSpec:
    if not isinstance(obj, dict):
        raise ConfigError('key "instance" must be an object')
    allowed = {
        "kind": str, "d": int, "d1": int, "d2": int, "seed": int,
        "lam": float, "mu": float, "gamma": float, "cond": float,
        "m": int, "identity_a": bool,
    }
    _require_keys(obj, allowed, "instance")
    if "kind" not in obj:
        raise ConfigError('missing required key "instance.kind"')
    if obj["kind"] not in KINDS:
        raise ConfigError(
            f'key "instance.kind" must be one of {list(KINDS)}, got {obj["kind"]!r}'
        )
    if "d" in obj and "d1" in obj:
        raise ConfigError('keys "instance.d" and "instance.d1" are mutually exclusive')
    d1 = obj.get("d1", obj.get("d"))
    if d1 is None:
        raise ConfigError('missing required key "instance.d1" (or its alias "instance.d")')
    kwargs = dict(
        kind=obj["kind"],
        d1=d1,
        d2=obj.get("d2"),
        seed=obj.get("seed", 0),
        lam=obj.get("lam"),
        cond=obj.get("cond", 3.0),
        m=obj.get("m"),
        identity_a=obj.get("identity_a", False),
    )
    if "mu" in obj:
        kwargs["mu"] = obj["mu"]
    if "gamma" in obj:
        kwargs["gamma"] = obj["gamma"]
    try:
        return InstanceSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"instance: {exc}") from exc


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate a config document.

    Validation materializes the instance and builds the (non-sweep) schedule,
    so regime preconditions that depend on derived quantities — e.g. mu = 0
    for a rank-deficient design matrix — are caught here, before any run.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("config document must be a JSON object")

    allowed = {
        "instance": dict, "regime": str, "schedule": dict,
        "budget": int, "tol": float, "record_every": int,
        "checks": list, "output": str, "sweep": dict,
    }
    _require_keys(obj, allowed, "")
    for key in ("instance", "regime"):
        if key not in obj:
            raise ConfigError(f'missing required key "{key}"')

    instance = _parse_instance(obj["instance"])

    regime = obj["regime"]
    if regime not in REGIMES:
        raise ConfigError(f'key "regime" must be one of {list(REGIMES)}, got {regime!r}')

    sched_obj = obj.get("schedule") or {}
    _require_keys(sched_obj, {"s": float, "c": float, "tau": float, "sigma": float},
                  "schedule")

    sweep_obj = obj.get("sweep") or {}
    _require_keys(sweep_obj, {"c": list, "s": list}, "sweep")
    sweep_c = sweep_s = None
    for name in ("c", "s"):
        values = sweep_obj.get(name)
        if values is None:
            continue
        if not values:
            raise ConfigError(f'key "sweep.{name}" must be a nonempty array')
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f'key "sweep.{name}" must contain numbers only')
        if name == "c":
            sweep_c = tuple(float(v) for v in values)
        else:
            sweep_s = tuple(float(v) for v in values)

    checks = obj.get("checks", [])
    for check in checks:
        if check not in CHECKS:
            raise ConfigError(
                f'unknown check "{check}"; available checks are {list(CHECKS)}'
            )

    budget = obj.get("budget", DEFAULT_BUDGET)
    if budget < 1:
        raise ConfigError('key "budget" must be at least 1')
    tol = obj.get("tol", DEFAULT_TOL)
    if not tol > 0:
        raise ConfigError('key "tol" must be positive')
    record_every = obj.get("record_every", DEFAULT_RECORD_EVERY)
    if record_every < 1:
        raise ConfigError('key "record_every" must be at least 1')

    config = ExperimentConfig(
        instance=instance,
        regime=regime,
        s=None if sched_obj.get("s") is None else float(sched_obj["s"]),
        c=None if sched_obj.get("c") is None else float(sched_obj["c"]),
        tau=None if sched_obj.get("tau") is None else float(sched_obj["tau"]),
        sigma=None if sched_obj.get("sigma") is None else float(sched_obj["sigma"]),
        budget=budget,
        tol=float(tol),
        record_every=record_every,
        checks=tuple(checks),
        output=obj.get("output"),
        sweep_c=sweep_c,
        sweep_s=sweep_s,
    )
    materialize(config)  # validation only; rebuilt (deterministically) at run time
    return config


def materialize(config: ExperimentConfig) -> tuple[BuiltInstance, Schedule]:
    """Build the instance and schedule, translating any regime-precondition
    violation into a ConfigError naming the offending parameter."""
    try:
        built = build_instance(config.instance)
    except ValueError as exc:
        raise ConfigError(f"instance: {exc}") from exc
    try:
        schedule = make_schedule(
            config.regime,
            built.F_norm,
            s=config.s,
            c=config.c,
            tau=config.tau,
            sigma=config.sigma,
            mu=built.problem.mu,
            gamma=built.problem.gamma,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return built, schedule


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical JSON form; parse_config(serialize_config(c)) == c."""
    spec = config.instance
    instance = {"kind": spec.kind, "d1": spec.d1}
    if spec.d2 is not None:
        instance["d2"] = spec.d2
    instance["seed"] = spec.seed
    if spec.lam is not None:
        instance["lam"] = spec.lam
    if spec.kind == "quad_pair":
        instance["mu"] = spec.mu
        instance["gamma"] = spec.gamma
    instance["cond"] = spec.cond
    if spec.m is not None:
        instance["m"] = spec.m
    if spec.identity_a:
        instance["identity_a"] = True

    obj: dict = {"instance": instance, "regime": config.regime}
    schedule = {
        name: getattr(config, name)
        for name in ("s", "c", "tau", "sigma")
        if getattr(config, name) is not None
    }
    if schedule:
        obj["schedule"] = schedule
    obj["budget"] = config.budget
    obj["tol"] = config.tol
    obj["record_every"] = config.record_every
    obj["checks"] = list(config.checks)
    if config.output is not None:
        obj["output"] = config.output
    sweep = {}
    if config.sweep_c is not None:
        sweep["c"] = list(config.sweep_c)
    if config.sweep_s is not None:
        sweep["s"] = list(config.sweep_s)
    if sweep:
        obj["sweep"] = sweep
    return json.dumps(obj, indent=2)
