"""Correlation, regression, unit-root and cointegration statistics.

Everything here is a pure function of float64 arrays. Unit-root decisions
are made against embedded finite-sample critical-value surfaces (MacKinnon
2010 response-surface coefficients), so inference needs no external
statistics dependency at runtime.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateResiduals,
    InsufficientData,
    LengthMismatch,
    SeriesTooShort,
    SingularDesign,
    ZeroVariance,
)
from .market_data import AlignedPairSeries

SIGNIFICANCE_LEVELS = (0.01, 0.05, 0.10)

# Response-surface coefficients b0 + b1/n + b2/n^2 + b3/n^3 for finite-sample
# critical values of the t-ratio on the lagged level. "nc" is the
# no-deterministic-terms Dickey-Fuller variant, "c" includes a constant.
_TAU_NC = {
    0.01: (-2.56574, -2.2358, -3.627, 0.0),
    0.05: (-1.94100, -0.2686, -3.365, 31.223),
    0.10: (-1.61682, 0.2656, -2.714, 25.364),
}
_TAU_C = {
    0.01: (-3.43035, -6.5393, -16.786, -79.433),
    0.05: (-2.86154, -2.8903, -4.234, -40.040),
    0.10: (-2.56677, -1.5384, -2.809, 0.0),
}
# Residual-based cointegration test on two variables with a constant in the
# first-stage regression. Using plain DF values here would over-reject badly
# (fitted residuals look too stationary under the no-cointegration null).
_TAU_COINT_2 = {
    0.01: (-3.89644, -10.9519, -33.527, 0.0),
    0.05: (-3.33613, -6.1101, -6.823, 0.0),
    0.10: (-3.04445, -4.2412, -2.720, 0.0),
}


@dataclass(frozen=True)
class MomentSummary:
    """Population first/second moments of a paired sample."""

    mean_x: float
    mean_y: float
    std_x: float
    std_y: float
    cov_xy: float
    n: int


@dataclass(frozen=True)
class OlsFit:
    """Least-squares line fit y = alpha + beta * x."""

    alpha: float
    beta: float
    residuals: np.ndarray
    rss: float


@dataclass(frozen=True)
class AdfResult:
    """Outcome of the augmented Dickey-Fuller regression on a series."""

    gamma_hat: float
    t_stat: float
    lags_used: int
    regression_residuals: np.ndarray
    stationary: bool
    significance: float


@dataclass(frozen=True)
class EngleGrangerResult:
    cointegrated: bool
    adf: AdfResult
    fit: OlsFit


@dataclass(frozen=True)
class PairScore:
    """Windowed formation score: cointegration pass-rate and mean correlation."""

    coint_score: float
    corr_score: float
    windows_evaluated: int


def _as_float_array(seq, name: str) -> np.ndarray:
    arr = np.asarray(seq, dtype=np.float64)
    if arr.ndim != 1:
        raise LengthMismatch(f"{name} must be one-dimensional")
    return arr


def moment_summary(x, y) -> MomentSummary:
    """Population moments shared by correlation and regression."""
    x = _as_float_array(x, "x")
    y = _as_float_array(y, "y")
    if len(x) != len(y):
        raise LengthMismatch(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise InsufficientData("need at least 3 observations")
    mx, my = float(np.mean(x)), float(np.mean(y))
    xc, yc = x - mx, y - my
    cov = float(np.mean(xc * yc))
    sx = float(np.sqrt(np.mean(xc * xc)))
    sy = float(np.sqrt(np.mean(yc * yc)))
    return MomentSummary(mx, my, sx, sy, cov, n)


def pearson(x, y) -> float:
    """Pearson correlation coefficient from population moments.

    Raises
    ------
    ZeroVariance
        If either input is constant.
    LengthMismatch
        If the inputs differ in length.
    """
    m = moment_summary(x, y)
    if m.std_x <= 0 or m.std_y <= 0:
        raise ZeroVariance("correlation undefined for a constant input")
    return m.cov_xy / (m.std_x * m.std_y)


def ssd(p_i, p_j) -> float:
    """Sum of squared price differences over the formation period."""
    a = _as_float_array(p_i, "p_i")
    b = _as_float_array(p_j, "p_j")
    if len(a) != len(b):
        raise LengthMismatch(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) < 1:
        raise InsufficientData("need at least one observation")
    d = a - b
    return float(np.dot(d, d))


def ols(y, x) -> OlsFit:
    """Simple least-squares regression of y on x via the normal equations.

    Parameters
    ----------
    y, x : array_like
        Equal-length samples, ``x`` non-constant.

    Returns
    -------
    OlsFit
        Intercept, slope, residual vector and residual sum of squares.
    """
    m = moment_summary(x, y)
    if m.std_x <= 0:
        raise SingularDesign("regressor is constant")
    beta = m.cov_xy / (m.std_x * m.std_x)
    alpha = m.mean_y - beta * m.mean_x
    xa = _as_float_array(x, "x")
    ya = _as_float_array(y, "y")
    resid = ya - alpha - beta * xa
    return OlsFit(alpha, beta, resid, float(np.dot(resid, resid)))


def default_adf_lags(n: int) -> int:
    """Schwert-rule lag order floor(12 * (n/100)^0.25)."""
    return int(np.floor(12.0 * (n / 100.0) ** 0.25))


def _response_surface(table, significance: float, nobs: int) -> float:
    b0, b1, b2, b3 = table[significance]
    return b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3


def dickey_fuller_critical_value(
    significance: float, nobs: int, regression: str = "n"
) -> float:
    """Finite-sample critical value for the ADF t-ratio, interpolated in n."""
    if significance not in SIGNIFICANCE_LEVELS:
        raise ValueError(f"significance must be one of {SIGNIFICANCE_LEVELS}")
    table = _TAU_NC if regression == "n" else _TAU_C
    return _response_surface(table, significance, nobs)


def cointegration_critical_value(significance: float, nobs: int) -> float:
    """Critical value for the two-variable residual-based cointegration test."""
    if significance not in SIGNIFICANCE_LEVELS:
        raise ValueError(f"significance must be one of {SIGNIFICANCE_LEVELS}")
    return _response_surface(_TAU_COINT_2, significance, nobs)


def adf_test(
    series,
    lags: int | None = None,
    significance: float = 0.05,
    regression: str = "n",
) -> AdfResult:
    """Augmented Dickey-Fuller test for a unit root.

    Regresses the first difference on the lagged level and ``lags`` lagged
    differences. The default form carries no deterministic terms; pass
    ``regression="c"`` to include a constant.

    Parameters
    ----------
    series : array_like
        Series to test.
    lags : int, optional
        Number of lagged difference terms; defaults to the Schwert rule.
    significance : float
        One of 0.01, 0.05, 0.10.

    Returns
    -------
    AdfResult
        With ``stationary = (t_stat < critical value)``.
    """
    if significance not in SIGNIFICANCE_LEVELS:
        raise ValueError(f"significance must be one of {SIGNIFICANCE_LEVELS}")
    if regression not in ("n", "c"):
        raise ValueError("regression must be 'n' or 'c'")
    x = _as_float_array(series, "series")
    n = len(x)
    if n >= 1 and np.ptp(x) == 0:
        raise ZeroVariance("series is constant")
    if lags is None:
        lags = default_adf_lags(n)
    if lags < 0:
        raise ValueError("lags must be nonnegative")
    effective = n - 1 - lags
    if effective < 10:
        raise InsufficientData(
            f"need n - 1 - lags >= 10 effective observations, got {effective}"
        )

    dx = np.diff(x)
    # rows t = lags .. n-2 of dx; level regressor is x_{t-1} for those rows
    y = dx[lags:]
    cols = [x[lags:-1]]
    for i in range(1, lags + 1):
        cols.append(dx[lags - i : len(dx) - i])
    if regression == "c":
        cols.append(np.ones_like(y))
    X = np.column_stack(cols)

    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise SingularDesign("collinear ADF design matrix")
    resid = y - X @ beta
    dof = len(y) - X.shape[1]
    if dof <= 0:
        raise InsufficientData("no degrees of freedom left in ADF regression")
    sigma2 = float(np.dot(resid, resid)) / dof
    xtx_inv = np.linalg.inv(X.T @ X)
    variance = sigma2 * xtx_inv[0, 0]
    if not np.isfinite(variance) or variance <= 0:
        # deterministic series satisfy an exact lag recurrence; the design
        # is then singular in all but name
        raise SingularDesign("ill-conditioned ADF regression")
    se_gamma = float(np.sqrt(variance))
    gamma_hat = float(beta[0])
    t_stat = gamma_hat / se_gamma
    cv = dickey_fuller_critical_value(significance, len(y), regression)
    return AdfResult(gamma_hat, t_stat, lags, resid, bool(t_stat < cv), significance)


def engle_granger(
    y, x, significance: float = 0.05, lags: int | None = None
) -> EngleGrangerResult:
    """Two-step residual-based cointegration test.

    Step one regresses ``y`` on ``x`` (with intercept); step two runs the
    ADF regression on the fitted residuals. The cointegration decision uses
    the two-variable residual-test critical values, which hold the nominal
    size; the plain Dickey-Fuller table would not.
    """
    fit = ols(y, x)
    resid_var = float(np.mean((fit.residuals - np.mean(fit.residuals)) ** 2))
    if resid_var < 1e-12:
        raise DegenerateResiduals("exact linear relation leaves no residual variance")
    adf = adf_test(fit.residuals, lags=lags, significance=significance)
    nobs = len(fit.residuals) - 1 - adf.lags_used
    cv = cointegration_critical_value(significance, nobs)
    return EngleGrangerResult(bool(adf.t_stat < cv), adf, fit)


def windowed_pair_scores(
    pair: AlignedPairSeries,
    window: int,
    step: int,
    significance: float = 0.05,
) -> PairScore:
    """Slide a window over the pair and aggregate correlation/cointegration.

    Windows where a statistic is undefined (constant prices, exact linear
    relation) are skipped and excluded from both aggregates.
    """
    n = len(pair)
    if n < window:
        raise SeriesTooShort(f"series of {n} samples is shorter than window {window}")
    if step < 1:
        raise ValueError("step must be >= 1")
    corrs: list[float] = []
    passes = 0
    for start in range(0, n - window + 1, step):
        wi = pair.prices_i[start : start + window]
        wj = pair.prices_j[start : start + window]
        try:
            rho = pearson(wi, wj)
            eg = engle_granger(wi, wj, significance=significance)
        except (ZeroVariance, SingularDesign, DegenerateResiduals):
            continue
        corrs.append(rho)
        passes += int(eg.cointegrated)
    if not corrs:
        raise ZeroVariance("every window was degenerate")
    return PairScore(passes / len(corrs), float(np.mean(corrs)), len(corrs))


def _pair_name(key) -> str:
    if isinstance(key, tuple):
        return "-".join(str(part) for part in key)
    return str(key)


def rank_pairs(scores: dict) -> list:
    """Order pairs by cointegration score, then correlation, then name."""
    if not scores:
        raise ValueError("no pairs to rank")
    return sorted(
        scores,
        key=lambda k: (-scores[k].coint_score, -scores[k].corr_score, _pair_name(k)),
    )


def write_pair_scores_csv(
    path: str | Path, scores: dict, interval: str, ranking: list | None = None
) -> None:
    """Emit the formation score report (one row per pair, best first)."""
    order = ranking if ranking is not None else rank_pairs(scores)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("pair,interval,coint_score,corr_score,windows_evaluated\n")
        for key in order:
            s = scores[key]
            fh.write(
                f"{_pair_name(key)},{interval},{s.coint_score!r},"
                f"{s.corr_score!r},{s.windows_evaluated}\n"
            )
