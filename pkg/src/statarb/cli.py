"""Command-line pipeline: ingest, form pairs, tune, trade, train, report.

One TOML config drives every subcommand; individual flags override single
keys. Artifacts are CSV/JSON files named with a short hash of the resolved
config so steps can never silently mix parameters, and reruns with the same
config and seed are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import econometrics, metrics
from .actor_critic import (
    TrainConfig,
    evaluate,
    load_checkpoint,
    save_checkpoint,
    train,
)
from .backtest import run_policy_backtest
from .errors import (
    BadFactor,
    BankruptPortfolio,
    DegenerateResiduals,
    DegenerateSpan,
    DegenerateSpread,
    DivergedTraining,
    DuplicateTimestamp,
    EmptyGrid,
    EmptyIntersection,
    InsufficientData,
    InvariantViolation,
    LengthMismatch,
    MalformedRow,
    NonFiniteParams,
    NonPositiveStart,
    NoSuccessfulPoint,
    SeriesTooShort,
    SingularDesign,
    TargetOutOfRange,
    UnsortedInput,
    WindowTooShort,
    ZeroVariance,
    ZeroVolatility,
)
from .grid_tuner import GridSpec, grid_search, select_best, write_grid_csv
from .ledger import FeeModel, write_action_log, write_blotter
from .market_data import INTERVAL_MS, align_pair, parse_klines, resample, write_klines
from .metrics import EquityCurve, MetricsConfig, compute_report, intervals_per_year
from .policies import RandomPolicy, flat_policy, gatev_policy
from .rl_env import (
    EnvConfig,
    EnvMode,
    PairTradingEnv,
    RewardVariant,
    RewardWeights,
    serve_external,
)
from .spread_engine import Thresholds

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_DATA_ERRORS = (
    FileNotFoundError,
    IsADirectoryError,
    MalformedRow,
    InvariantViolation,
    DuplicateTimestamp,
    UnsortedInput,
    EmptyIntersection,
    SeriesTooShort,
    LengthMismatch,
    BadFactor,
)
_NUMERIC_ERRORS = (
    SingularDesign,
    ZeroVariance,
    InsufficientData,
    DegenerateResiduals,
    DegenerateSpread,
    WindowTooShort,
    BankruptPortfolio,
    TargetOutOfRange,
    DivergedTraining,
    NonFiniteParams,
    EmptyGrid,
    NoSuccessfulPoint,
    NonPositiveStart,
    DegenerateSpan,
    ZeroVolatility,
)


class ConfigError(Exception):
    pass


def _parse_span_point(value) -> int:
    if isinstance(value, int):
        return value
    if isinstance(value, datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=timezone.utc)
        return int(value.timestamp() * 1000)
    if isinstance(value, str):
        text = value.replace("Z", "+00:00")
        try:
            stamp = datetime.fromisoformat(text)
        except ValueError as exc:
            raise ConfigError(f"bad span timestamp {value!r}: {exc}") from None
        if stamp.tzinfo is None:
            stamp = stamp.replace(tzinfo=timezone.utc)
        return int(stamp.timestamp() * 1000)
    raise ConfigError(f"bad span timestamp {value!r}")


def resolve_config(path: str, overrides: argparse.Namespace) -> dict:
    """Load the TOML config, apply flag overrides and fill defaults."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from None

    data = raw.get("data", {})
    files = data.get("files", {})
    if not isinstance(files, dict) or not files:
        raise ConfigError("config needs a [data.files] table of symbol = path")
    spans = raw.get("spans", {})
    if "formation" not in spans or "test" not in spans:
        raise ConfigError("config needs [spans] formation and test")
    formation = [_parse_span_point(v) for v in spans["formation"]]
    test = [_parse_span_point(v) for v in spans["test"]]
    if len(formation) != 2 or len(test) != 2:
        raise ConfigError("spans must be [start, end) pairs")
    if not (formation[0] < formation[1] <= test[0] < test[1]):
        raise ConfigError("spans must be disjoint with formation earlier")

    formation_cfg = raw.get("formation", {})
    grid_cfg = raw.get("grid", {})
    env_cfg = raw.get("env", {})
    train_cfg = raw.get("train", {})
    strategy_cfg = raw.get("strategy", {})
    run_cfg = raw.get("run", {})

    interval = overrides.interval or data.get("interval", "1m")
    if interval not in INTERVAL_MS:
        raise ConfigError(f"interval must be one of {sorted(INTERVAL_MS)}")
    default_window = {"1m": 1440, "3m": 480, "5m": 288}[interval]

    config = {
        "data": {
            "interval": interval,
            "files": {str(k): str(v) for k, v in sorted(files.items())},
            "min_volume_quantile": float(data.get("min_volume_quantile", 0.0)),
        },
        "spans": {"formation": formation, "test": test},
        "formation": {
            "window": int(formation_cfg.get("window", default_window)),
            "step": int(formation_cfg.get("step", formation_cfg.get("window", default_window))),
            "significance": float(formation_cfg.get("significance", 0.05)),
        },
        "grid": {
            "open_thresholds": [float(v) for v in grid_cfg.get(
                "open_thresholds", [round(1.5 + 0.1 * k, 1) for k in range(26)])],
            "close_thresholds": [float(v) for v in grid_cfg.get(
                "close_thresholds", [0.2, 0.3, 0.4, 0.5, 1.0, 2.0])],
            "windows": [int(v) for v in grid_cfg.get(
                "windows", [500, 700, 800, 900, 1000, 2000])],
            "workers": int(grid_cfg.get("workers", 1)),
        },
        "fees": {
            "rate": float(overrides.fee if overrides.fee is not None
                          else raw.get("fees", {}).get("rate", 0.0002)),
        },
        "metrics": {
            "risk_free_rate": float(raw.get("metrics", {}).get("risk_free_rate", 0.055)),
        },
        "strategy": {
            "open_threshold": float(strategy_cfg.get("open_threshold", 1.8)),
            "close_threshold": float(strategy_cfg.get("close_threshold", 0.4)),
            "window": int(strategy_cfg.get("window", 900)),
        },
        "env": {
            "mode": (overrides.mode or env_cfg.get("mode", "rl1")).lower(),
            "reward_variant": (overrides.reward or env_cfg.get("reward_variant", "shaped")).lower(),
            "reward_weights": [float(v) for v in env_cfg.get("reward_weights", [1.0, 0.1, 0.1])],
            "gamma": float(env_cfg.get("gamma", 0.99)),
            "initial_cash": float(env_cfg.get("initial_cash", 10_000.0)),
        },
        "train": {
            "learning_rate": float(train_cfg.get("learning_rate", 0.05)),
            "n_steps": int(train_cfg.get("n_steps", 16)),
            "entropy_coef": float(train_cfg.get("entropy_coef", 0.01)),
            "value_coef": float(train_cfg.get("value_coef", 0.5)),
            "total_steps": int(train_cfg.get("total_steps", 50_000)),
            "hidden": [int(v) for v in train_cfg.get("hidden", [64, 64])],
        },
        "run": {
            "seed": int(overrides.seed if overrides.seed is not None
                        else run_cfg.get("seed", 0)),
            "out": str(overrides.out or run_cfg.get("out", "out")),
        },
    }
    if config["env"]["mode"] not in ("rl1", "rl2"):
        raise ConfigError("env mode must be rl1 or rl2")
    if config["env"]["reward_variant"] not in ("shaped", "plain"):
        raise ConfigError("reward variant must be shaped or plain")
    if len(config["env"]["reward_weights"]) != 3:
        raise ConfigError("reward_weights must be [portfolio, action, transaction]")
    if len(config["data"]["files"]) < 2 and overrides.command != "ingest":
        raise ConfigError("need at least two symbols in [data.files]")
    return config


# Each pipeline step's artifacts are content-addressed over exactly the
# config keys that influence them, so e.g. a fee-tier sweep reuses the same
# formation artifacts but can never pick up a grid tuned under other fees.
SCOPE_INGEST = ("data",)
SCOPE_FORMATION = ("data", "spans", "formation")
SCOPE_GRID = SCOPE_FORMATION + ("grid", "fees")
SCOPE_BACKTEST = SCOPE_GRID + ("strategy", "metrics", "env", "seed")
SCOPE_TRAIN = SCOPE_GRID + ("strategy", "env", "train", "seed")
SCOPE_EVAL = SCOPE_TRAIN + ("metrics",)
SCOPE_FULL = SCOPE_TRAIN + ("metrics",)


def config_hash(config: dict, scope: tuple = SCOPE_FULL) -> str:
    payload = {}
    for key in scope:
        if key == "seed":
            payload["seed"] = config["run"]["seed"]
        else:
            payload[key] = config[key]
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:8]


def _out_dir(config: dict) -> Path:
    out = Path(config["run"]["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _artifact(config: dict, name: str, ext: str, scope: tuple = SCOPE_FULL) -> Path:
    return _out_dir(config) / f"{name}-{config_hash(config, scope)}.{ext}"


def _load_candles(config: dict, symbol: str):
    path = config["data"]["files"][symbol]
    candles = parse_klines(path, "1m")
    interval = config["data"]["interval"]
    if interval != "1m":
        candles = resample(candles, INTERVAL_MS[interval] // INTERVAL_MS["1m"])
    return candles


def _slice_candles(candles, span):
    start, end = span
    return [c for c in candles if start <= c.open_time < end]


def _aligned(config: dict, sym_a: str, sym_b: str, span) -> "AlignedPairSeries":
    candles_a = _slice_candles(_load_candles(config, sym_a), span)
    candles_b = _slice_candles(_load_candles(config, sym_b), span)
    return align_pair(
        candles_a,
        candles_b,
        config["data"]["min_volume_quantile"],
        symbol_i=sym_a,
        symbol_j=sym_b,
    )


# -- subcommands -----------------------------------------------------------------


def cmd_ingest(config: dict) -> int:
    for symbol in config["data"]["files"]:
        candles = _load_candles(config, symbol)
        path = _artifact(config, f"candles-{symbol}-{config['data']['interval']}",
                         "csv", SCOPE_INGEST)
        write_klines(candles, path)
        print(f"wrote {path} ({len(candles)} candles)")
    return 0


def cmd_pairs(config: dict) -> int:
    symbols = sorted(config["data"]["files"])
    if len(symbols) < 2:
        raise ConfigError("pair formation needs at least two symbols")
    span = config["spans"]["formation"]
    scores = {}
    for sym_a, sym_b in itertools.combinations(symbols, 2):
        series = _aligned(config, sym_a, sym_b, span)
        scores[(sym_a, sym_b)] = econometrics.windowed_pair_scores(
            series,
            config["formation"]["window"],
            config["formation"]["step"],
            config["formation"]["significance"],
        )
    ranking = econometrics.rank_pairs(scores)
    csv_path = _artifact(config, "pairs", "csv", SCOPE_FORMATION)
    econometrics.write_pair_scores_csv(
        csv_path, scores, config["data"]["interval"], ranking
    )
    best = ranking[0]
    best_payload = {
        "symbol_i": best[0],
        "symbol_j": best[1],
        "coint_score": scores[best].coint_score,
        "corr_score": scores[best].corr_score,
        "windows_evaluated": scores[best].windows_evaluated,
    }
    json_path = _artifact(config, "selected_pair", "json", SCOPE_FORMATION)
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(best_payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"wrote {csv_path}")
    print(f"selected pair {best[0]}-{best[1]} -> {json_path}")
    return 0


def _selected_pair(config: dict) -> tuple[str, str]:
    path = _artifact(config, "selected_pair", "json", SCOPE_FORMATION)
    if not path.exists():
        raise FileNotFoundError(f"missing pairs artifact {path}; run `pairs` first")
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return payload["symbol_i"], payload["symbol_j"]


def cmd_gridsearch(config: dict) -> int:
    sym_a, sym_b = _selected_pair(config)
    series = _aligned(config, sym_a, sym_b, config["spans"]["formation"])
    spec = GridSpec(
        tuple(config["grid"]["open_thresholds"]),
        tuple(config["grid"]["close_thresholds"]),
        tuple(config["grid"]["windows"]),
    )
    points = grid_search(
        series,
        spec,
        FeeModel(config["fees"]["rate"]),
        initial_cash=config["env"]["initial_cash"],
        workers=config["grid"]["workers"],
    )
    csv_path = _artifact(config, "grid", "csv", SCOPE_GRID)
    write_grid_csv(csv_path, points)
    best = select_best(points)
    best_payload = {
        "open_threshold": best.open_threshold,
        "close_threshold": best.close_threshold,
        "window": best.window,
        "rtot": best.rtot,
        "trades": best.trades,
    }
    json_path = _artifact(config, "grid_best", "json", SCOPE_GRID)
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(best_payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"wrote {csv_path}")
    print(
        f"best point OT={best.open_threshold} CT={best.close_threshold} "
        f"W={best.window} rtot={best.rtot:.4f}% -> {json_path}"
    )
    return 0


def _strategy_params(config: dict) -> tuple[Thresholds, int]:
    path = _artifact(config, "grid_best", "json", SCOPE_GRID)
    if path.exists():
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        return (
            Thresholds(payload["open_threshold"], payload["close_threshold"]),
            int(payload["window"]),
        )
    s = config["strategy"]
    return Thresholds(s["open_threshold"], s["close_threshold"]), s["window"]


def _write_run_artifacts(config: dict, tag: str, curve: EquityCurve, blotter,
                         positions, portfolio=None,
                         scope: tuple = SCOPE_BACKTEST) -> None:
    report = compute_report(
        curve, blotter, positions, MetricsConfig(config["metrics"]["risk_free_rate"])
    )
    write_blotter(_artifact(config, f"blotter-{tag}", "csv", scope), blotter)
    metrics.write_equity_csv(_artifact(config, f"equity-{tag}", "csv", scope), curve)
    if portfolio is not None:
        write_action_log(_artifact(config, f"actions-{tag}", "csv", scope),
                         portfolio.action_log)
    envelope = {
        "label": tag,
        "fee_rate": config["fees"]["rate"],
        "interval": config["data"]["interval"],
        "metrics": json.loads(metrics.report_json(report)),
    }
    json_path = _artifact(config, f"metrics-{tag}", "json", scope)
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(envelope, fh, sort_keys=True, indent=2)
        fh.write("\n")
    with open(_artifact(config, f"metrics-{tag}", "txt", scope), "w",
              encoding="utf-8") as fh:
        fh.write(metrics.report_text(report))
    print(f"wrote {json_path}")
    print(metrics.report_text(report))


def cmd_backtest(config: dict, policy_name: str) -> int:
    sym_a, sym_b = _selected_pair(config)
    thresholds, window = _strategy_params(config)
    series = _aligned(config, sym_a, sym_b, config["spans"]["test"])
    policies = {
        "gatev": gatev_policy,
        "flat": flat_policy,
        "random": RandomPolicy(config["run"]["seed"]),
    }
    if policy_name not in policies:
        raise ConfigError(f"unknown policy {policy_name!r}")
    result = run_policy_backtest(
        series,
        window,
        thresholds,
        FeeModel(config["fees"]["rate"]),
        policies[policy_name],
        initial_cash=config["env"]["initial_cash"],
    )
    interval_ms = INTERVAL_MS[config["data"]["interval"]]
    curve = EquityCurve(
        np.concatenate(([result.timestamps[0] - interval_ms], result.timestamps)),
        np.concatenate(([config["env"]["initial_cash"]], result.equity)),
        intervals_per_year(config["data"]["interval"]),
    )
    _write_run_artifacts(
        config, policy_name, curve, result.trades, result.positions, result.portfolio
    )
    return 0


def _build_env(config: dict, span) -> PairTradingEnv:
    sym_a, sym_b = _selected_pair(config)
    thresholds, window = _strategy_params(config)
    series = _aligned(config, sym_a, sym_b, span)
    weights = config["env"]["reward_weights"]
    env_config = EnvConfig(
        mode=EnvMode(config["env"]["mode"]),
        thresholds=thresholds,
        window=window,
        fee=FeeModel(config["fees"]["rate"]),
        gamma=config["env"]["gamma"],
        reward_weights=RewardWeights(*weights),
        reward_variant=RewardVariant(config["env"]["reward_variant"]),
        initial_cash=config["env"]["initial_cash"],
        seed=config["run"]["seed"],
    )
    return PairTradingEnv(series, env_config)


def _train_config(config: dict) -> TrainConfig:
    t = config["train"]
    return TrainConfig(
        learning_rate=t["learning_rate"],
        n_steps=t["n_steps"],
        gamma=config["env"]["gamma"],
        entropy_coef=t["entropy_coef"],
        value_coef=t["value_coef"],
        total_steps=t["total_steps"],
        seed=config["run"]["seed"],
        hidden=tuple(t["hidden"]),
    )


def cmd_train(config: dict) -> int:
    cfg = _train_config(config)
    agent = train(lambda: _build_env(config, config["spans"]["formation"]), cfg)
    path = _artifact(config, f"agent-{config['env']['mode']}", "bin", SCOPE_TRAIN)
    save_checkpoint(
        path,
        agent,
        sidecar={
            "seed": config["run"]["seed"],
            "env": config["env"],
            "train": config["train"],
            "config_hash": config_hash(config),
        },
    )
    print(f"wrote {path}")
    return 0


def cmd_eval(config: dict, checkpoint: str | None, episodes: int) -> int:
    path = Path(checkpoint) if checkpoint else _artifact(
        config, f"agent-{config['env']['mode']}", "bin", SCOPE_TRAIN
    )
    if not path.exists():
        raise FileNotFoundError(f"missing checkpoint {path}; run `train` first")
    agent = load_checkpoint(path)
    env = _build_env(config, config["spans"]["test"])
    returns, _report = evaluate(
        agent,
        env,
        episodes=episodes,
        mode="deterministic",
        seed=config["run"]["seed"],
        metrics_config=MetricsConfig(config["metrics"]["risk_free_rate"]),
    )
    tag = f"eval-{config['env']['mode']}"
    values = [env.config.initial_cash] + [row.value for row in env.trace]
    stamps = list(env.decision_timestamps()[: len(env.trace)])
    stamps = [stamps[0] - INTERVAL_MS[config["data"]["interval"]]] + stamps
    curve = EquityCurve(
        np.asarray(stamps, dtype=np.int64),
        np.asarray(values),
        intervals_per_year(config["data"]["interval"]),
    )
    positions = [row.position for row in env.trace]
    env.write_trace(_artifact(config, f"trace-{tag}", "csv", SCOPE_EVAL))
    _write_run_artifacts(config, tag, curve, env.blotter, positions,
                         scope=SCOPE_EVAL)
    print(f"episode returns: {returns}")
    return 0


def cmd_report(config: dict, inputs: list[str]) -> int:
    rows = []
    for item in inputs:
        with open(item, "r", encoding="utf-8") as fh:
            rows.append(json.load(fh))
    if not rows:
        raise ConfigError("report needs at least one metrics JSON artifact")
    columns = [
        "cumulative_return", "cagr", "sharpe", "total_actions", "won_actions",
        "lost_actions", "win_loss_ratio", "max_win", "max_loss", "avg_win",
        "avg_loss", "time_in_market", "volatility_ann", "skew", "kurtosis",
    ]
    csv_path = _artifact(config, "report", "csv", SCOPE_FULL)
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("label,fee_rate," + ",".join(columns) + "\n")
        for row in rows:
            values = [row["metrics"].get(c) for c in columns]
            fh.write(
                f"{row['label']},{row['fee_rate']!r},"
                + ",".join(json.dumps(v) for v in values)
                + "\n"
            )
    width = max(len(c) for c in columns)
    lines = ["".ljust(width) + "  " + "  ".join(
        f"{row['label']}@{row['fee_rate']:g}".rjust(16) for row in rows)]
    for c in columns:
        cells = []
        for row in rows:
            v = row["metrics"].get(c)
            cells.append((f"{v:.6g}" if isinstance(v, (int, float)) else str(v)).rjust(16))
        lines.append(c.ljust(width) + "  " + "  ".join(cells))
    text = "\n".join(lines) + "\n"
    with open(_artifact(config, "report", "txt", SCOPE_FULL), "w",
              encoding="utf-8") as fh:
        fh.write(text)
    print(text)
    print(f"wrote {csv_path}")
    return 0


def cmd_serve_env(config: dict, span_name: str) -> int:
    env = _build_env(config, config["spans"][span_name])
    serve_external(env, sys.stdin, sys.stdout)
    return 0


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statarb",
        description="Pairs-trading research pipeline over exchange candle data.",
    )
    parser.add_argument("--config", required=True, help="TOML run configuration")
    parser.add_argument("--seed", type=int, default=None, help="override run seed")
    parser.add_argument("--fee", type=float, default=None, help="override fee rate")
    parser.add_argument("--out", default=None, help="override output directory")
    parser.add_argument("--interval", choices=sorted(INTERVAL_MS), default=None)
    parser.add_argument("--mode", choices=("rl1", "rl2"), default=None)
    parser.add_argument("--reward", choices=("shaped", "plain"), default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("ingest", help="validate, resample and rewrite candle data")
    sub.add_parser("pairs", help="score and rank candidate pairs")
    sub.add_parser("gridsearch", help="tune thresholds and window on formation data")
    p_backtest = sub.add_parser("backtest", help="run a rule policy on the test span")
    p_backtest.add_argument("--policy", default="gatev",
                            choices=("gatev", "flat", "random"))
    sub.add_parser("train", help="train the actor-critic agent on formation data")
    p_eval = sub.add_parser("eval", help="evaluate a checkpoint on the test span")
    p_eval.add_argument("--checkpoint", default=None)
    p_eval.add_argument("--episodes", type=int, default=1)
    p_report = sub.add_parser("report", help="merge metrics artifacts into one table")
    p_report.add_argument("inputs", nargs="+", help="metrics JSON artifacts")
    p_serve = sub.add_parser("serve-env", help="serve the wire protocol on stdio")
    p_serve.add_argument("--span", choices=("formation", "test"), default="test")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args.config, args)
        if args.command == "ingest":
            return cmd_ingest(config)
        if args.command == "pairs":
            return cmd_pairs(config)
        if args.command == "gridsearch":
            return cmd_gridsearch(config)
        if args.command == "backtest":
            return cmd_backtest(config, args.policy)
        if args.command == "train":
            return cmd_train(config)
        if args.command == "eval":
            return cmd_eval(config, args.checkpoint, args.episodes)
        if args.command == "report":
            return cmd_report(config, args.inputs)
        if args.command == "serve-env":
            return cmd_serve_env(config, args.span)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except _NUMERIC_ERRORS as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # plain ValueError from config-driven constructors (threshold order,
        # weight signs, enum values); domain errors all derive StatArbError
        # and were mapped above
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
