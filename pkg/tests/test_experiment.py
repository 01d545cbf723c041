import json

import numpy as np
import pytest

from nomasim import ConfigError, emit_curve, parse_config, run_experiment
from nomasim.experiment import curve_from_rows
from nomasim.montecarlo import OutageCurve

ANALYTIC_CEPS_10DB = 1.038158823620704

MINIMAL = '{"scenario": "siso", "m": 4}'


def test_minimal_config_fills_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.k == 1 and cfg.trials == 10000 and cfg.epsilon == 0.1
    assert cfg.ratio == 2.0 and cfg.metric == "min_user_rate" and cfg.format == "csv"
    assert cfg.sweep.points == 7 and cfg.workers == 1


@pytest.mark.parametrize("scenario,extra,n_users", [
    ("siso", "", 4),
    ("mimo", "", 8),
    ("comp", "", 9),
    ("coop", ', "k": 3', 4),
])
def test_every_scenario_runs_with_defaults(scenario, extra, n_users):
    text = f'{{"scenario": "{scenario}", "m": 4{extra}, "trials": 200, "sweep": {{"start_db": 0, "stop_db": 10, "points": 2}}}}'
    cfg = parse_config(text)
    assert cfg.n_users == n_users
    curve = run_experiment(cfg)
    assert len(curve) == 2
    assert np.all(np.isfinite(curve.c_eps))


def test_invalid_epsilon_names_field():
    with pytest.raises(ConfigError, match="epsilon"):
        parse_config('{"scenario": "siso", "m": 4, "epsilon": 1.5}')


def test_unknown_field_names_field():
    with pytest.raises(ConfigError, match="trails"):
        parse_config('{"scenario": "siso", "m": 4, "trails": 100}')


def test_syntax_error_reported():
    with pytest.raises(ConfigError, match="syntax"):
        parse_config("{scenario: siso}")
    with pytest.raises(ConfigError, match="JSON object"):
        parse_config("[1, 2, 3]")


def test_sweep_invariant_named():
    with pytest.raises(ConfigError, match="sweep"):
        parse_config('{"scenario": "siso", "m": 2, "sweep": {"start_db": 10, "stop_db": 5}}')
    with pytest.raises(ConfigError, match="points"):
        parse_config('{"scenario": "siso", "m": 2, "sweep": {"points": 1}}')


def test_per_user_index_checked_against_topology():
    with pytest.raises(ConfigError, match="per_user_index"):
        parse_config('{"scenario": "siso", "m": 2, "metric": "per_user", "per_user_index": 5}')
    cfg = parse_config('{"scenario": "mimo", "m": 2, "k": 3, "metric": "per_user", "per_user_index": 5}')
    assert cfg.n_users == 6


def test_overrides_merge_before_validation():
    cfg = parse_config(MINIMAL, {"seed": 7, "trials": 123, "output": None})
    assert cfg.seed == 7 and cfg.trials == 123
    with pytest.raises(ConfigError, match="trials"):
        parse_config(MINIMAL, {"trials": 0})


def test_run_experiment_row_count_and_artifact(tmp_path):
    out = tmp_path / "curve.csv"
    cfg = parse_config(
        json.dumps(
            {
                "scenario": "siso",
                "m": 2,
                "trials": 500,
                "sweep": {"start_db": 0, "stop_db": 10, "points": 2},
                "output": str(out),
            }
        )
    )
    curve = run_experiment(cfg)
    assert len(curve) == 2
    data = out.read_bytes()
    assert data.startswith(b"power_db,c_eps_bpshz,ci_halfwidth,outage_at_ceps\n")
    assert data == emit_curve(curve, "csv")
    assert len(data.split(b"\n")) == 3


def test_rerun_byte_identical(tmp_path):
    text = json.dumps(
        {
            "scenario": "coop",
            "m": 3,
            "k": 2,
            "trials": 2000,
            "seed": 5,
            "sweep": {"start_db": 0, "stop_db": 20, "points": 3},
        }
    )
    a = emit_curve(run_experiment(parse_config(text)))
    b = emit_curve(run_experiment(parse_config(text)))
    assert a == b


def test_workers_do_not_change_bytes():
    base = json.dumps(
        {
            "scenario": "mimo",
            "m": 3,
            "trials": 70_000,
            "seed": 2,
            "sweep": {"start_db": 0, "stop_db": 12, "points": 3},
        }
    )
    one = emit_curve(run_experiment(parse_config(base, {"workers": 1})))
    many = emit_curve(run_experiment(parse_config(base, {"workers": 8})))
    assert one == many


def test_analytic_curve_within_confidence():
    cfg = parse_config(
        '{"scenario": "siso", "m": 1, "trials": 30000, "seed": 42,'
        ' "sweep": {"start_db": 10, "stop_db": 20, "points": 2}}'
    )
    curve = run_experiment(cfg)
    for db, c, w in zip(curve.power_db, curve.c_eps, curve.ci_halfwidth):
        p = 10 ** (db / 10)
        analytic = np.log2(1 + p * (-np.log(0.9)))
        assert abs(c - analytic) <= 3 * w
    assert abs(curve.c_eps[0] - ANALYTIC_CEPS_10DB) <= 3 * curve.ci_halfwidth[0]


def test_emit_csv_fixture_bytes():
    curve = curve_from_rows([(0.0, 1.0, 0.01, 0.1)])
    assert emit_curve(curve, "csv") == (
        b"power_db,c_eps_bpshz,ci_halfwidth,outage_at_ceps\n"
        b"0.000000000,1.00000000,0.0100000000,0.100000000"
    )


def test_emit_csv_no_trailing_newline_and_9_digits():
    curve = curve_from_rows([(-10.0, 0.123456789123, 0.5, 0.25), (20.0, 2.0, 0.1, 0.09)])
    text = emit_curve(curve, "csv").decode()
    assert not text.endswith("\n")
    assert text.splitlines()[1] == "-10.0000000,0.123456789,0.500000000,0.250000000"


def test_emit_json_round_trip():
    curve = curve_from_rows([(0.0, 1.25, 0.01, 0.1), (10.0, 2.5, 0.02, 0.05)])
    parsed = json.loads(emit_curve(curve, "json"))
    assert [p["c_eps_bpshz"] for p in parsed] == [1.25, 2.5]
    assert [p["power_db"] for p in parsed] == [0.0, 10.0]
    rebuilt = curve_from_rows(
        [(p["power_db"], p["c_eps_bpshz"], p["ci_halfwidth"], p["outage_at_ceps"]) for p in parsed]
    )
    assert emit_curve(rebuilt, "json") == emit_curve(curve, "json")


def test_emit_rejects_empty_and_unknown():
    empty = OutageCurve(np.array([]), np.array([]), np.array([]), np.array([]))
    with pytest.raises(ValueError):
        emit_curve(empty)
    curve = curve_from_rows([(0.0, 1.0, 0.01, 0.1)])
    with pytest.raises(ValueError):
        emit_curve(curve, "xml")
