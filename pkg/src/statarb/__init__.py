"""Statistical-arbitrage research engine.

Pair formation (correlation + cointegration), rolling-spread z-score
signals, rule-based pair trading with threshold grid search, two
reinforcement-learning trading environments with a from-scratch
advantage actor-critic agent, and the full evaluation-metric suite.
"""

from .backtest import BacktestResult, run_policy_backtest
from .econometrics import (
    AdfResult,
    EngleGrangerResult,
    OlsFit,
    PairScore,
    adf_test,
    engle_granger,
    ols,
    pearson,
    rank_pairs,
    ssd,
    windowed_pair_scores,
)
from .grid_tuner import GridPoint, GridSpec, grid_search, rtot, select_best
from .ledger import FeeModel, Portfolio, TradeRecord
from .market_data import (
    AlignedPairSeries,
    Candle,
    align_pair,
    parse_klines,
    resample,
    write_klines,
)
from .metrics import EquityCurve, MetricsConfig, MetricsReport, compute_report
from .policies import Observation, PolicyDecision, RandomPolicy, flat_policy, gatev_policy
from .rl_env import (
    EnvConfig,
    EnvMode,
    PairTradingEnv,
    RewardVariant,
    RewardWeights,
    Rl1Action,
    StepResult,
    discounted_return,
    serve_external,
)
from .actor_critic import ActorCritic, TrainConfig, evaluate, grad_check, train
from .spread_engine import (
    SpreadEngine,
    SpreadModel,
    Thresholds,
    Zone,
    classify_zone,
    fit_spread,
    zscore,
)
from .synthetic import cointegrated_pair, independent_walks, pulse_pair, sinusoid_pair

__version__ = "0.1.0"
