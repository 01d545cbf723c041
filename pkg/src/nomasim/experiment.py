"""Config-driven experiments: strict JSON parsing, sweep execution, emitters.

A config is a flat JSON object validated against :class:`ExperimentConfig`;
unknown keys are rejected so typos never silently fall back to defaults. The
same config always produces byte-identical output artifacts.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .channel import FadingConfig
from .montecarlo import OutageCurve, TrialPlan, outage_curve
from .scenarios import CompScenario, CoopScenario, MimoScenario, SisoScenario

CSV_HEADER = "power_db,c_eps_bpshz,ci_halfwidth,outage_at_ceps"

# transmit-side element count when `k` is omitted: MIMO antennas / CoMP base
# stations / cooperating transmitters
_DEFAULT_K = {"siso": 1, "mimo": 2, "comp": 2, "coop": 1}


class ConfigError(ValueError):
    """A config file failed to parse or validate."""


class SweepSpec(BaseModel):
    """Power-budget sweep in dB (converted to linear once, at parse time)."""

    model_config = ConfigDict(extra="forbid")

    start_db: float = 0.0
    stop_db: float = 30.0
    points: int = Field(default=7, ge=2)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.start_db < self.stop_db:
            raise ValueError("start_db must be strictly below stop_db")
        return self

    def powers(self) -> np.ndarray:
        db = np.linspace(self.start_db, self.stop_db, self.points)
        return 10.0 ** (db / 10.0)


class ExperimentConfig(BaseModel):
    """One sweep experiment: scenario, its parameters, trial plan, output."""

    model_config = ConfigDict(extra="forbid")

    scenario: Literal["siso", "mimo", "comp", "coop"]
    m: int = Field(ge=1, description="users per cluster (CoMP: centre users per BS)")
    k: int | None = Field(default=None, ge=1, description="antennas / BSs / cooperating TXs")
    ratio: float = Field(default=2.0, gt=1.0, description="geometric power-fraction ratio")
    delta: float = Field(default=0.0, ge=0.0, description="SIC sensitivity gap (linear)")
    leakage: float = Field(default=0.1, ge=0.0, le=1.0, description="ZF residual leakage")
    ini_mode: Literal["own_channel", "literal"] = "own_channel"
    combining: Literal["power_sum", "coherent"] = "power_sum"
    coop_budget: Literal["shared", "per_tx"] = "shared"
    metric: Literal["min_user_rate", "per_user", "sum_rate"] = "min_user_rate"
    per_user_index: int = Field(default=0, ge=0)
    epsilon: float = Field(default=0.1, gt=0.0, lt=1.0)
    mean_gain: float = Field(default=1.0, gt=0.0)
    cross_gain_scale: float = Field(default=1.0, ge=0.0)
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    trials: int = Field(default=10000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)
    output: str | None = None
    format: Literal["csv", "json"] = "csv"

    @model_validator(mode="after")
    def _finalize(self):
        if self.k is None:
            self.k = _DEFAULT_K[self.scenario]
        if self.metric == "per_user" and self.per_user_index >= self.n_users:
            raise ValueError(
                f"per_user_index {self.per_user_index} out of range for "
                f"{self.n_users} users"
            )
        return self

    @property
    def n_users(self) -> int:
        if self.scenario == "mimo":
            return self.k * self.m
        if self.scenario == "comp":
            return 1 + self.k * self.m
        return self.m


def _format_validation_error(err: ValidationError) -> str:
    lines = []
    for item in err.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<config>"
        lines.append(f"{path}: {item['msg']}")
    return "; ".join(lines)


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse and validate a JSON experiment config.

    ``overrides`` (e.g. CLI flags) are merged before validation so bad
    overrides are diagnosed like any other field.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if overrides:
        data = {**data, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_validation_error(exc)) from exc


def build_scenario(cfg: ExperimentConfig):
    """Instantiate the simulation scenario described by a config."""
    fading = FadingConfig(mean_gain=cfg.mean_gain, seed=cfg.seed)
    if cfg.scenario == "siso":
        return SisoScenario(
            fading, cfg.m, power_ratio=cfg.ratio, ini_mode=cfg.ini_mode, sic_delta=cfg.delta
        )
    if cfg.scenario == "mimo":
        return MimoScenario(
            fading,
            num_clusters=cfg.k,
            cluster_size=cfg.m,
            leakage=cfg.leakage,
            cross_gain_scale=cfg.cross_gain_scale,
            power_ratio=cfg.ratio,
            ini_mode=cfg.ini_mode,
            sic_delta=cfg.delta,
        )
    if cfg.scenario == "comp":
        return CompScenario(
            fading,
            num_bs=cfg.k,
            centre_per_bs=cfg.m,
            cross_gain_scale=cfg.cross_gain_scale,
            power_ratio=cfg.ratio,
        )
    return CoopScenario(
        fading,
        num_transmitters=cfg.k,
        cluster_size=cfg.m,
        combining=cfg.combining,
        budget_mode=cfg.coop_budget,
        power_ratio=cfg.ratio,
        ini_mode=cfg.ini_mode,
        sic_delta=cfg.delta,
    )


def build_plan(cfg: ExperimentConfig) -> TrialPlan:
    return TrialPlan(
        num_trials=cfg.trials,
        epsilon=cfg.epsilon,
        metric=cfg.metric,
        per_user_index=cfg.per_user_index,
        power_sweep=cfg.sweep.powers(),
        seed=cfg.seed,
        workers=cfg.workers,
    )


def run_experiment(cfg: ExperimentConfig) -> OutageCurve:
    """Run the configured sweep; write the output artifact when a path is set."""
    curve = outage_curve(build_scenario(cfg), build_plan(cfg))
    if cfg.output is not None:
        Path(cfg.output).write_bytes(emit_curve(curve, cfg.format))
    return curve


def _sig9(x: float) -> str:
    # 9 significant digits, trailing zeros kept; zero spelled with 9 decimals
    if x == 0:
        return "0.000000000"
    return format(float(x), "#.9g")


def emit_curve(curve: OutageCurve, fmt: str = "csv") -> bytes:
    """Serialize a curve; CSV is bit-exact with no trailing newline."""
    if len(curve) == 0:
        raise ValueError("cannot emit an empty curve")
    rows = [
        (float(db), float(c), float(w), float(o))
        for db, c, w, o in zip(
            curve.power_db, curve.c_eps, curve.ci_halfwidth, curve.outage_at_ceps
        )
    ]
    if fmt == "csv":
        lines = [CSV_HEADER]
        lines += [",".join(_sig9(v) for v in row) for row in rows]
        return "\n".join(lines).encode()
    if fmt == "json":
        keys = CSV_HEADER.split(",")
        payload = [dict(zip(keys, row)) for row in rows]
        return json.dumps(payload, indent=2).encode()
    raise ValueError(f"unknown output format: {fmt!r}")


def curve_from_rows(rows) -> OutageCurve:
    """Rebuild a curve from (power_db, c_eps, ci_halfwidth, outage) rows."""
    arr = np.asarray([[r[0], r[1], r[2], r[3]] for r in rows], dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot build an empty curve")
    return OutageCurve(
        power_db=arr[:, 0], c_eps=arr[:, 1], ci_halfwidth=arr[:, 2], outage_at_ceps=arr[:, 3]
    )
