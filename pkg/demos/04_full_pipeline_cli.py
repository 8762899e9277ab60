"""The whole pipeline through the CLI, plus the environment wire protocol.

Writes synthetic exchange CSVs and a TOML config into a scratch directory,
then drives: pairs -> gridsearch -> backtest -> train -> eval -> report.
Every artifact is content-addressed by a hash of the config keys that
produced it, so reruns are byte-identical and steps cannot mix parameters.
"""

import json
import subprocess
import sys
import tempfile
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
FORMATION_N, TEST_N = 1500, 900
TOTAL = FORMATION_N + TEST_N

scratch = Path(tempfile.mkdtemp(prefix="statarb-demo-"))
data = scratch / "data"
data.mkdir()

pair = cointegrated_pair(TOTAL, seed=11, theta=0.05, noise_sigma=0.08, walk_std=0.05)
third = random_walk(TOTAL, np.random.default_rng(99), start=70.0)
write_klines(candles_from_prices(pair.prices_i), data / "coina.csv")
write_klines(candles_from_prices(pair.prices_j), data / "coinb.csv")
write_klines(candles_from_prices(third), data / "drift.csv")

start = DEFAULT_START_MS
split = start + FORMATION_N * MINUTE
end = start + TOTAL * MINUTE
config = scratch / "run.toml"
config.write_text(f"""
[data]
interval = "1m"
[data.files]
COINA = "{data / 'coina.csv'}"
COINB = "{data / 'coinb.csv'}"
DRIFT = "{data / 'drift.csv'}"
[spans]
formation = [{start}, {split}]
test = [{split}, {end}]
[formation]
window = 300
step = 300
[grid]
open_thresholds = [1.5, 1.8, 2.1]
close_thresholds = [0.4]
windows = [120, 240]
[env]
mode = "rl1"
reward_weights = [1.0, 5.0, 0.1]
gamma = 0.95
[train]
total_steps = 5000
hidden = [32, 32]
[run]
seed = 7
out = "{scratch / 'out'}"
""")

print(f"workspace: {scratch}\n")
for step in (["ingest"], ["pairs"], ["gridsearch"], ["backtest", "--policy", "gatev"],
             ["train"], ["eval"]):
    print(f"$ statarb --config run.toml {' '.join(step)}")
    code = main(["--config", str(config), *step])
    assert code == 0, f"step {step} exited {code}"
    print()

out = scratch / "out"
metrics_files = sorted(str(p) for p in out.glob("metrics-*.json"))
main(["--config", str(config), "report", *metrics_files])

print("artifacts:")
for path in sorted(out.iterdir()):
    print(f"  {path.name}  ({path.stat().st_size} bytes)")

# --- the wire protocol: drive the environment from another process ---------------------

print("\nwire protocol session (serve-env):")
script = "\n".join(
    ['{"cmd":"reset"}', '{"cmd":"step","action":2}', '{"cmd":"step","action":1}',
     '{"cmd":"close"}', ""]
)
proc = subprocess.run(
    [sys.executable, "-m", "statarb.cli", "--config", str(config), "serve-env"],
    input=script, capture_output=True, text=True, timeout=300,
)
for line in proc.stdout.splitlines():
    reply = json.loads(line)
    print(f"  <- {reply}")
