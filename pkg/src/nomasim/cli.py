"""Command-line client: run sweep experiments locally or against a server.

Exit codes: 0 success, 2 config error, 3 estimation failure, 4 I/O error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .experiment import ConfigError, curve_from_rows, emit_curve, parse_config, run_experiment
from .montecarlo import EstimationError

EXIT_CONFIG = 2
EXIT_ESTIMATION = 3
EXIT_IO = 4


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Power-domain NOMA outage-capacity simulator."""


@main.command()
@click.argument("config_file", type=click.Path())
@click.option("--output", type=click.Path(), default=None, help="Write the curve here instead of the config's path.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None, help="Override the output format.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--trials", type=int, default=None, help="Override the trial count.")
@click.option("--workers", type=int, default=None, help="Override the worker count.")
@click.option("--server", default=None, metavar="URL", help="Delegate the run to a nomasim service.")
def run(config_file, output, fmt, seed, trials, workers, server):
    """Run the sweep described by CONFIG_FILE and emit curve data.

    Without --output (and no output path in the config) the curve bytes go
    to stdout. With --server the computation happens remotely; the artifact
    is still rendered and written locally.
    """
    try:
        text = Path(config_file).read_text()
    except OSError as exc:
        _fail(EXIT_CONFIG, f"cannot read config: {exc}")

    overrides = {"seed": seed, "trials": trials, "workers": workers, "format": fmt, "output": output}
    try:
        cfg = parse_config(text, overrides)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))

    if server is None:
        try:
            curve = run_experiment(cfg)
        except EstimationError as exc:
            _fail(EXIT_ESTIMATION, f"estimation failure: {exc}")
        except OSError as exc:
            _fail(EXIT_IO, f"cannot write output: {exc}")
        if cfg.output is None:
            sys.stdout.buffer.write(emit_curve(curve, cfg.format))
            sys.stdout.buffer.write(b"\n")
        return

    curve = _run_remote(server, cfg)
    data = emit_curve(curve, cfg.format)
    if cfg.output is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.write(b"\n")
        return
    try:
        Path(cfg.output).write_bytes(data)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write output: {exc}")


def _run_remote(server: str, cfg):
    import httpx

    payload = cfg.model_dump()
    payload["output"] = None
    try:
        resp = httpx.post(f"{server.rstrip('/')}/experiments", json=payload, timeout=None)
    except httpx.HTTPError as exc:
        _fail(EXIT_IO, f"cannot reach server: {exc}")
    if resp.status_code == 422:
        _fail(EXIT_CONFIG, f"server rejected config: {resp.text}")
    if resp.status_code == 409:
        _fail(EXIT_ESTIMATION, resp.json().get("detail", resp.text))
    if resp.status_code != 200:
        _fail(EXIT_IO, f"server error {resp.status_code}: {resp.text}")
    body = resp.json()
    rows = [
        (p["power_db"], p["c_eps_bpshz"], p["ci_halfwidth"], p["outage_at_ceps"])
        for p in body["points"]
    ]
    return curve_from_rows(rows)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("nomasim.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
