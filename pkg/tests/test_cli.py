import json
import subprocess
import sys
from pathlib import Path

import numpy as np

from statarb.cli import main
from statarb.market_data import write_klines
from statarb.synthetic import (
    DEFAULT_START_MS,
    candles_from_prices,
    cointegrated_pair,
    random_walk,
)

MINUTE = 60_000
FORMATION_N = 1500
TEST_N = 900
TOTAL_N = FORMATION_N + TEST_N


def build_workspace(tmp_path, poison_test_span=False):
    """Three symbols: a planted cointegrated pair plus an unrelated walk."""
    pair = cointegrated_pair(TOTAL_N, seed=11, theta=0.05, noise_sigma=0.08,
                             walk_std=0.05)
    rng = np.random.default_rng(99)
    loner = random_walk(TOTAL_N, rng, start=70.0, step_std=0.05)

    data = tmp_path / "data"
    data.mkdir(parents=True)
    series_by_symbol = {
        "PAIRA": pair.prices_i.copy(),
        "PAIRB": pair.prices_j.copy(),
        "LONEC": loner.copy(),
    }
    for symbol, prices in series_by_symbol.items():
        if poison_test_span:
            prices = prices.copy()
            prices[FORMATION_N:] *= 1000.0  # absurd but valid candles
        write_klines(candles_from_prices(prices), data / f"{symbol.lower()}.csv")

    start = DEFAULT_START_MS
    formation_end = start + FORMATION_N * MINUTE
    test_end = start + TOTAL_N * MINUTE
    config = f"""
[data]
interval = "1m"

[data.files]
PAIRA = "{data / 'paira.csv'}"
PAIRB = "{data / 'pairb.csv'}"
LONEC = "{data / 'lonec.csv'}"

[spans]
formation = [{start}, {formation_end}]
test = [{formation_end}, {test_end}]

[formation]
window = 300
step = 300

[grid]
open_thresholds = [1.5, 2.0]
close_thresholds = [0.4]
windows = [120, 240]

[strategy]
open_threshold = 1.5
close_threshold = 0.4
window = 120

[env]
mode = "rl1"
reward_weights = [1.0, 5.0, 0.1]
gamma = 0.95

[train]
total_steps = 600
n_steps = 16
hidden = [16, 16]

[run]
seed = 7
out = "{tmp_path / 'out'}"
"""
    config_path = tmp_path / "run.toml"
    config_path.write_text(config)
    return config_path


def run(config_path, *args):
    return main(["--config", str(config_path), *args])


def artifacts(out_dir):
    return {p.name: p.read_bytes() for p in sorted(Path(out_dir).iterdir())}


# --- pipeline ---------------------------------------------------------------------


def test_full_pipeline(tmp_path, capsys):
    config = build_workspace(tmp_path)
    out = tmp_path / "out"

    assert run(config, "ingest") == 0
    assert run(config, "pairs") == 0
    selected = json.loads(next(out.glob("selected_pair-*.json")).read_text())
    assert {selected["symbol_i"], selected["symbol_j"]} == {"PAIRA", "PAIRB"}

    assert run(config, "gridsearch") == 0
    grid_best = json.loads(next(out.glob("grid_best-*.json")).read_text())
    assert grid_best["window"] in (120, 240)

    assert run(config, "backtest", "--policy", "gatev") == 0
    metrics = json.loads(next(out.glob("metrics-gatev-*.json")).read_text())
    assert metrics["label"] == "gatev"
    assert metrics["fee_rate"] == 0.0002
    assert metrics["metrics"]["total_actions"] >= 1

    assert run(config, "train") == 0
    checkpoint = next(out.glob("agent-rl1-*.bin"))
    assert checkpoint.read_bytes()[:5] == b"PTAC1"

    assert run(config, "eval") == 0
    eval_metrics = json.loads(next(out.glob("metrics-eval-rl1-*.json")).read_text())
    assert "cumulative_return" in eval_metrics["metrics"]

    report_inputs = sorted(str(p) for p in out.glob("metrics-*.json"))
    assert run(config, "report", *report_inputs) == 0
    report_csv = next(out.glob("report-*.csv")).read_text().splitlines()
    assert report_csv[0].startswith("label,fee_rate,cumulative_return")
    assert len(report_csv) == 1 + len(report_inputs)
    capsys.readouterr()


def test_flat_policy_zero_fee_backtest_is_exactly_flat(tmp_path, capsys):
    config = build_workspace(tmp_path)
    run(config, "pairs")
    assert run(config, "--fee", "0.0", "backtest", "--policy", "flat") == 0
    out = tmp_path / "out"
    metrics = [
        json.loads(p.read_text())
        for p in out.glob("metrics-flat-*.json")
    ]
    assert metrics[0]["metrics"]["cumulative_return"] == 0.0
    assert metrics[0]["metrics"]["total_actions"] == 0
    capsys.readouterr()


def test_rerun_is_byte_identical(tmp_path, capsys):
    config = build_workspace(tmp_path)
    steps = (
        ("pairs",), ("gridsearch",), ("backtest", "--policy", "gatev"),
        ("train",), ("eval",),
    )
    for step in steps:
        assert run(config, *step) == 0
    first = artifacts(tmp_path / "out")

    for step in steps:
        assert run(config, *step) == 0
    second = artifacts(tmp_path / "out")
    assert first == second
    capsys.readouterr()


def test_formation_outputs_immune_to_test_span_poison(tmp_path, capsys):
    clean = build_workspace(tmp_path / "clean")
    poisoned = build_workspace(tmp_path / "poisoned", poison_test_span=True)
    for config in (clean, poisoned):
        assert run(config, "pairs") == 0
        assert run(config, "gridsearch") == 0
    capsys.readouterr()

    def formation_artifacts(base):
        # hashes differ (the data paths differ), so key by artifact kind
        out = base / "out"
        return {
            p.name.rsplit("-", 1)[0] + p.suffix: p.read_bytes()
            for p in sorted(out.iterdir())
            if p.name.startswith(("pairs-", "selected_pair-", "grid-", "grid_best-"))
        }

    assert formation_artifacts(tmp_path / "clean") == formation_artifacts(
        tmp_path / "poisoned"
    )


def test_fee_tier_sweep_and_report(tmp_path, capsys):
    config = build_workspace(tmp_path)
    out = tmp_path / "out"
    tiers = ("0.0005", "0.0002", "0.0001", "0.0")
    for fee in tiers:
        assert run(config, "--fee", fee, "pairs") == 0
        assert run(config, "--fee", fee, "backtest", "--policy", "gatev") == 0
    # pairs are fee-independent: one artifact; backtests: one per tier
    assert len(list(out.glob("pairs-*.csv"))) == 1
    metrics_files = sorted(out.glob("metrics-gatev-*.json"))
    assert len(metrics_files) == 4
    fees = {json.loads(p.read_text())["fee_rate"] for p in metrics_files}
    assert fees == {0.0005, 0.0002, 0.0001, 0.0}

    assert run(config, "report", *(str(p) for p in metrics_files)) == 0
    rows = next(out.glob("report-*.csv")).read_text().strip().splitlines()
    assert len(rows) == 5
    fee_column = {row.split(",")[1] for row in rows[1:]}
    assert fee_column == {"0.0005", "0.0002", "0.0001", "0.0"}
    capsys.readouterr()


# --- failure modes ---------------------------------------------------------------------


def test_missing_config_is_config_error(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "nope.toml"), "pairs"]) == 2
    capsys.readouterr()


def test_single_symbol_is_usage_error(tmp_path, capsys):
    config = build_workspace(tmp_path)
    text = config.read_text()
    lines = [l for l in text.splitlines()
             if not l.startswith(("PAIRB", "LONEC"))]
    config.write_text("\n".join(lines))
    assert run(config, "pairs") == 2
    capsys.readouterr()


def test_inverted_strategy_thresholds_is_config_error(tmp_path, capsys):
    config = build_workspace(tmp_path)
    text = config.read_text().replace("open_threshold = 1.5", "open_threshold = 0.2")
    config.write_text(text)
    run(config, "pairs")
    assert run(config, "backtest", "--policy", "gatev") == 2
    capsys.readouterr()


def test_bad_reward_weights_is_config_error(tmp_path, capsys):
    config = build_workspace(tmp_path)
    text = config.read_text().replace(
        "reward_weights = [1.0, 5.0, 0.1]", "reward_weights = [1.0, 5.0]"
    )
    config.write_text(text)
    assert run(config, "train") == 2
    capsys.readouterr()


def test_missing_data_file_is_data_error(tmp_path, capsys):
    config = build_workspace(tmp_path)
    (tmp_path / "data" / "paira.csv").unlink()
    assert run(config, "pairs") == 3
    capsys.readouterr()


def test_missing_upstream_artifact_is_data_error(tmp_path, capsys):
    config = build_workspace(tmp_path)
    assert run(config, "gridsearch") == 3  # pairs never ran
    capsys.readouterr()


def test_degenerate_prices_is_numeric_error(tmp_path, capsys):
    config = build_workspace(tmp_path)
    data = tmp_path / "data"
    flat = np.full(TOTAL_N, 50.0)
    write_klines(candles_from_prices(flat), data / "paira.csv")
    write_klines(candles_from_prices(flat * 2), data / "pairb.csv")
    write_klines(candles_from_prices(flat * 3), data / "lonec.csv")
    assert run(config, "pairs") == 4
    capsys.readouterr()


def test_corrupt_data_is_data_error(tmp_path, capsys):
    config = build_workspace(tmp_path)
    path = tmp_path / "data" / "paira.csv"
    path.write_text("garbage,row\n" + path.read_text())
    assert run(config, "pairs") == 3
    capsys.readouterr()


def test_backtest_trade_count_matches_analytic_crossings(tmp_path, capsys):
    """Periodic-spread fixture through the whole CLI path."""
    from statarb.synthetic import sinusoid_pair

    period = 64
    series = sinusoid_pair(periods=12, period=period)
    data = tmp_path / "data"
    data.mkdir(parents=True)
    # a hair of noise keeps the formation-stage ADF regression away from the
    # exact-recurrence degeneracy of a pure sinusoid; it is ~1e5 times too
    # small to move any threshold crossing
    noisy = series.prices_i + np.random.default_rng(0).normal(0, 1e-6, len(series))
    write_klines(candles_from_prices(noisy), data / "sina.csv")
    write_klines(candles_from_prices(series.prices_j), data / "sinb.csv")
    start = DEFAULT_START_MS
    split = start + (len(series) - 256) * MINUTE
    end = start + len(series) * MINUTE
    config_path = tmp_path / "run.toml"
    config_path.write_text(f"""
[data]
interval = "1m"
[data.files]
SINA = "{data / 'sina.csv'}"
SINB = "{data / 'sinb.csv'}"
[spans]
formation = [{start}, {split}]
test = [{split}, {end}]
[formation]
window = 256
step = 256
[strategy]
open_threshold = 1.2
close_threshold = 0.3
window = {period}
[fees]
rate = 0.0
[run]
seed = 0
out = "{tmp_path / 'out'}"
""")
    # backtest needs the selected pair; with two symbols it is forced
    assert run(config_path, "pairs") == 0
    assert run(config_path, "backtest", "--policy", "gatev") == 0
    capsys.readouterr()

    blotter = next((tmp_path / "out").glob("blotter-gatev-*.csv"))
    n_trades = len(blotter.read_text().strip().splitlines()) - 1

    # analytic crossing count of z = sqrt(2) sin(2 pi t / period) on the
    # test span, starting flat after the window warm-up
    offset = len(series) - 256
    t_index = np.arange(offset + period - 1, len(series))
    z = np.sqrt(2.0) * np.sin(2.0 * np.pi * t_index / period)
    position = 0
    closes = 0
    for value in z:
        if position == 0 and abs(value) >= 1.2:
            position = 1
        elif position != 0 and abs(value) < 0.3:
            position = 0
            closes += 1
    assert n_trades == closes


# --- serve-env over a real pipe ----------------------------------------------------------


def test_serve_env_subprocess(tmp_path):
    config = build_workspace(tmp_path)
    assert run(config, "pairs") == 0
    script = (
        '{"cmd":"reset"}\n'
        '{"cmd":"step","action":0}\n'
        '{"cmd":"step","action":1}\n'
        '{"cmd":"close"}\n'
    )
    proc = subprocess.run(
        [sys.executable, "-m", "statarb.cli", "--config", str(config), "serve-env"],
        input=script,
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    replies = [json.loads(line) for line in proc.stdout.splitlines()]
    assert replies[0]["obs"][0] == 0.0
    assert {"obs", "reward", "done", "breakdown"} <= set(replies[1])
