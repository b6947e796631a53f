"""Closed-form and semi-analytic performance quantities.

Everything here is an independent route to numbers that the Monte Carlo
engine also produces: the memoryless decode-count pmf and its Gaussian
approximation, the Rayleigh single-block success probability, the
prefix-sum identity for the joint-encoding average rate, and the exact
joint-encoding pmf by nested quadrature for up to three blocks.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .channel import (
    CONSTANT,
    LN2,
    RAYLEIGH_UNIT_MEAN,
    FadingModel,
    PowerBudget,
    QuadratureError,
    capacities,
    trial_stream,
)

# ---------------------------------------------------------------------------
# decode-count pmf container
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecodeCountPmf:
    """Probability of decoding exactly m messages, for m = 0..M."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or len(probs) < 1:
            raise ValueError("probs must be a non-empty vector")
        if np.any(probs < -1e-12) or abs(probs.sum() - 1.0) > 1e-3:
            raise ValueError("probs must be non-negative and sum to one")
        object.__setattr__(self, "probs", probs)

    @property
    def m_total(self) -> int:
        return len(self.probs) - 1

    def mean(self) -> float:
        return float(np.arange(len(self.probs)) @ self.probs)


# ---------------------------------------------------------------------------
# memoryless transmission
# ---------------------------------------------------------------------------


def mt_success_prob(model: FadingModel, power: PowerBudget, rate_r: float) -> float:
    """Per-block decode probability Pr{log2(1 + phi P) >= R}.

    For the Rayleigh gain this is the exponential tail exp(-(2^R - 1) / P).
    """
    if rate_r <= 0.0:
        raise ValueError("rate_r must be positive")
    if model.kind == CONSTANT:
        return 1.0 if np.log1p(model.gain * power.p_linear) / LN2 >= rate_r else 0.0
    return float(np.exp(-(2.0**rate_r - 1.0) / power.p_linear))


def mt_pmf_exact(m_total: int, p: float) -> DecodeCountPmf:
    """Binomial decode-count pmf, accumulated in log space for large M."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be a probability")
    m = np.arange(m_total + 1)
    if p == 0.0 or p == 1.0:
        probs = np.zeros(m_total + 1)
        probs[m_total if p == 1.0 else 0] = 1.0
        return DecodeCountPmf(probs=probs)
    log_comb = gammaln(m_total + 1) - gammaln(m + 1) - gammaln(m_total - m + 1)
    log_probs = log_comb + m * np.log(p) + (m_total - m) * np.log1p(-p)
    return DecodeCountPmf(probs=np.exp(log_probs))


def mt_pmf_gaussian(m_total: int, p: float, m: float) -> float:
    """Large-M Gaussian approximation of the binomial pmf at count m."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly inside (0, 1)")
    var = m_total * p * (1.0 - p)
    return float(np.exp(-((m - m_total * p) ** 2) / (2.0 * var)) / np.sqrt(2.0 * np.pi * var))


# ---------------------------------------------------------------------------
# joint encoding: prefix-sum identity for the average rate
# ---------------------------------------------------------------------------


def prefix_sum_rate(prefix_probs, rate_r: float) -> float:
    """Average joint-encoding rate from the prefix-sum probabilities.

    The expected decoded count equals the sum over m of
    Pr{cap[1] + ... + cap[m] >= m R}, so the average rate is R/M times that
    sum.
    """
    prefix_probs = np.asarray(prefix_probs, dtype=float)
    if np.any(prefix_probs < 0.0) or np.any(prefix_probs > 1.0):
        raise ValueError("prefix probabilities must lie in [0, 1]")
    return rate_r / len(prefix_probs) * float(prefix_probs.sum())


def _prefix_success_stats(model, power, m_total, rate_r, trials, master_seed, chunk=8192):
    """Per-m success totals plus first two moments of the per-trial count."""
    totals = np.zeros(m_total, dtype=np.int64)
    count_sum = 0.0
    count_sq = 0.0
    thresholds = rate_r * np.arange(1, m_total + 1)
    for lo in range(0, trials, chunk):
        n = min(chunk, trials - lo)
        phis = np.empty((n, m_total))
        for k in range(n):
            phis[k] = model.sample_gains(trial_stream(master_seed, lo + k), m_total)
        hits = np.cumsum(capacities(phis, power), axis=1) >= thresholds
        totals += hits.sum(axis=0)
        per_trial = hits.sum(axis=1)
        count_sum += per_trial.sum()
        count_sq += (per_trial.astype(float) ** 2).sum()
    return totals, count_sum, count_sq


def estimate_prefix_probs(
    model: FadingModel,
    power: PowerBudget,
    m_total: int,
    rate_r: float,
    trials: int,
    master_seed: int,
) -> np.ndarray:
    """Monte Carlo estimates of Pr{cap[1]+...+cap[m] >= m R} for m = 1..M.

    One pass per trial evaluates all m simultaneously on the partial sums;
    trial streams follow the engine's (master_seed, trial) derivation.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    totals, _, _ = _prefix_success_stats(model, power, m_total, rate_r, trials, master_seed)
    return totals / trials


def prefix_sum_rate_mc(
    model: FadingModel,
    power: PowerBudget,
    m_total: int,
    rate_r: float,
    trials: int,
    master_seed: int,
) -> tuple[float, float]:
    """Monte Carlo prefix-sum rate estimate and its standard error."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _, s1, s2 = _prefix_success_stats(model, power, m_total, rate_r, trials, master_seed)
    mean = s1 / trials
    var = max(s2 / trials - mean**2, 0.0) * trials / max(trials - 1, 1)
    scale = rate_r / m_total
    return scale * mean, scale * np.sqrt(var / trials)


# ---------------------------------------------------------------------------
# joint encoding: exact decode-count pmf for up to three blocks
# ---------------------------------------------------------------------------


def _capacity_pdf(c, p_linear):
    # change of variables from the exponential gain density
    g = (2.0**c - 1.0) / p_linear
    return LN2 * 2.0**c / p_linear * np.exp(-g)


def _capacity_cdf(c, p_linear):
    if c <= 0.0:
        return 0.0
    return 1.0 - float(np.exp(-(2.0**c - 1.0) / p_linear))


def _capacity_tail(c, p_linear):
    if c <= 0.0:
        return 1.0
    return float(np.exp(-(2.0**c - 1.0) / p_linear))


def _quad(f, lo, hi, tol, points=()):
    inner = [x for x in points if lo < x < hi]
    value, abserr = quad(f, lo, hi, epsabs=tol, limit=200, points=inner or None)
    if abserr > 10.0 * tol + 1e-12:
        raise QuadratureError(f"nested quadrature error {abserr:.2e} at tolerance {tol:.2e}")
    return value


def _decode_block_prob(m, p_linear, r, tol, c_max):
    """Pr{suffix sums over the last i of m blocks all reach i R, i = 1..m}."""
    if m == 0:
        return 1.0
    if m == 1:
        return _capacity_tail(r, p_linear)
    if m == 2:
        return _quad(
            lambda x2: _capacity_pdf(x2, p_linear)
            * _capacity_tail(max(2.0 * r - x2, 0.0), p_linear),
            r,
            c_max,
            tol,
            points=(2.0 * r,),
        )

    def inner(x3):
        lo = max(2.0 * r - x3, 0.0)
        return _quad(
            lambda x2: _capacity_pdf(x2, p_linear)
            * _capacity_tail(max(3.0 * r - x3 - x2, 0.0), p_linear),
            lo,
            c_max,
            tol / 10.0,
            points=(3.0 * r - x3,),
        )

    return _quad(lambda x3: _capacity_pdf(x3, p_linear) * inner(x3), r, c_max, tol)


def _fail_block_prob(j, p_linear, r, tol):
    """Pr{prefix sums over the first i of j blocks all fall short of i R}."""
    if j == 0:
        return 1.0
    if j == 1:
        return _capacity_cdf(r, p_linear)
    if j == 2:
        return _quad(
            lambda y1: _capacity_pdf(y1, p_linear) * _capacity_cdf(2.0 * r - y1, p_linear),
            0.0,
            r,
            tol,
        )

    def inner(y1):
        return _quad(
            lambda y2: _capacity_pdf(y2, p_linear) * _capacity_cdf(3.0 * r - y1 - y2, p_linear),
            0.0,
            2.0 * r - y1,
            tol / 10.0,
        )

    return _quad(lambda y1: _capacity_pdf(y1, p_linear) * inner(y1), 0.0, r, tol)


def je_pmf_exact_smallM(
    m_total: int,
    model: FadingModel,
    power: PowerBudget,
    rate_r: float,
    tol: float = 1e-5,
) -> DecodeCountPmf:
    """Exact joint-encoding decode-count pmf by nested quadrature, M <= 3.

    The probability of decoding exactly m messages factorizes (the blocks
    are independent) into a decodable part over blocks 1..m and a
    non-decodable part over blocks m+1..M; each factor is integrated against
    the capacity density.  The nesting depth grows with M, so larger
    deadlines are out of scope.
    """
    if m_total not in (1, 2, 3):
        raise ValueError("exact pmf quadrature supports m_total in {1, 2, 3} only")
    if model.kind != RAYLEIGH_UNIT_MEAN:
        raise ValueError("exact pmf quadrature is defined for the Rayleigh model")
    if rate_r <= 0.0:
        raise ValueError("rate_r must be positive")
    p = power.p_linear
    # capacity tail mass beyond c_max is < 1e-13
    c_max = float(np.log2(1.0 + p * np.log(1e13)))
    inner_tol = tol / 20.0
    probs = np.array(
        [
            _decode_block_prob(m, p, rate_r, inner_tol, c_max)
            * _fail_block_prob(m_total - m, p, rate_r, inner_tol)
            for m in range(m_total + 1)
        ]
    )
    return DecodeCountPmf(probs=probs)


# ---------------------------------------------------------------------------
# time sharing: direct estimator of the average-rate sum
# ---------------------------------------------------------------------------


def ts_rate_analytic_estimate(
    model: FadingModel,
    power: PowerBudget,
    m_total: int,
    rate_r: float,
    trials: int,
    master_seed: int,
) -> tuple[float, float]:
    """Monte Carlo estimate of the time-sharing average-rate sum, with SE.

    Estimates (R/M) * sum over m of Pr{cap[m]/m + ... + cap[M]/M >= R}.
    This is the same estimand as the engine's mean decoded rate for the
    time-sharing decoder, so paired runs must agree within sampling error.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    s1 = 0.0
    s2 = 0.0
    weights = 1.0 / np.arange(1, m_total + 1)
    chunk = 8192
    for lo in range(0, trials, chunk):
        n = min(chunk, trials - lo)
        phis = np.empty((n, m_total))
        for k in range(n):
            phis[k] = model.sample_gains(trial_stream(master_seed, lo + k), m_total)
        info = np.cumsum((capacities(phis, power) * weights)[:, ::-1], axis=1)[:, ::-1]
        per_trial = (info >= rate_r).sum(axis=1)
        s1 += per_trial.sum()
        s2 += (per_trial.astype(float) ** 2).sum()
    mean = s1 / trials
    var = max(s2 / trials - mean**2, 0.0) * trials / max(trials - 1, 1)
    scale = rate_r / m_total
    return scale * mean, scale * np.sqrt(var / trials)


# ---------------------------------------------------------------------------
# standard-error arithmetic for the acceptance gates
# ---------------------------------------------------------------------------


def binomial_se(p_hat: float, trials: int) -> float:
    """Standard error of a probability estimated from `trials` indicators."""
    return float(np.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / trials))


def combined_se(*ses: float) -> float:
    """Standard error of a difference of independent estimates."""
    return float(np.sqrt(sum(se**2 for se in ses)))
