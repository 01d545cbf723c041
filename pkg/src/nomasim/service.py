"""HTTP front end: run experiments and validate configs over REST.

The service is a thin wrapper around :mod:`nomasim.experiment`; request and
response bodies are the same pydantic models the CLI uses, so a config file
can be POSTed verbatim. Output paths are ignored server-side: clients render
and persist artifacts themselves.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .experiment import ExperimentConfig, run_experiment
from .montecarlo import EstimationError

app = FastAPI(
    title="nomasim",
    description="Power-domain NOMA outage-capacity simulation service",
    version="0.1.0",
)


class CurvePoint(BaseModel):
    power_db: float
    c_eps_bpshz: float
    ci_halfwidth: float
    outage_at_ceps: float


class ExperimentResult(BaseModel):
    scenario: str
    trials: int
    seed: int
    points: list[CurvePoint]


class ValidationResult(BaseModel):
    valid: bool
    scenario: str
    n_users: int
    sweep_points: int


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/validate", response_model=ValidationResult)
def validate(cfg: ExperimentConfig) -> ValidationResult:
    """Validate a config without running it (FastAPI rejects bad ones with 422)."""
    return ValidationResult(
        valid=True, scenario=cfg.scenario, n_users=cfg.n_users, sweep_points=cfg.sweep.points
    )


@app.post("/experiments", response_model=ExperimentResult)
def submit_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run a sweep synchronously and return the outage curve."""
    cfg = cfg.model_copy(update={"output": None})  # no server-side file writes
    try:
        curve = run_experiment(cfg)
    except EstimationError as exc:
        raise HTTPException(status_code=409, detail=f"estimation failure: {exc}") from exc
    points = [
        CurvePoint(
            power_db=float(db),
            c_eps_bpshz=float(c),
            ci_halfwidth=float(w),
            outage_at_ceps=float(o),
        )
        for db, c, w, o in zip(
            curve.power_db, curve.c_eps, curve.ci_halfwidth, curve.outage_at_ceps
        )
    ]
    return ExperimentResult(scenario=cfg.scenario, trials=cfg.trials, seed=cfg.seed, points=points)
