"""Upper bounds on the streaming decoder's performance.

The informed-transmitter bound assumes the transmitter knows all M channel
realizations up front and allocates blocks optimally; the ergodic bound is
the no-deadline limit min(R, c_bar).
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .schemes import DecodeOutcome, _check_rate, _outcome


@dataclass(frozen=True)
class InformedBound:
    """Selector for running the informed-transmitter bound as if a scheme."""


def _informed_feasible(cap: np.ndarray, rate_r: float, m: int) -> bool:
    # decoding m messages needs (m - i + 1) R <= cap[i] + ... + cap[M] for i = 1..m
    suffix = np.cumsum(cap[::-1])[::-1]
    need = rate_r * (m - np.arange(m))
    return bool(np.all(need <= suffix[:m]))


def informed_upper_bound(real: ChannelRealization, rate_r: float) -> DecodeOutcome:
    """Largest decodable message count with full channel knowledge.

    Feasibility is monotone non-increasing in m, so the scan walks down from
    M and stops at the first feasible count.  The decoded messages can always
    be taken to be the first m by reordering, so the outcome is a prefix.
    """
    _check_rate(rate_r)
    for m in range(real.m_blocks, 0, -1):
        if _informed_feasible(real.cap, rate_r, m):
            return _outcome(range(1, m + 1), real.m_blocks, rate_r)
    return _outcome((), real.m_blocks, rate_r)


def informed_counts(caps: np.ndarray, rate_r: float) -> np.ndarray:
    """Batched informed bound over (trials x blocks) capacity matrices.

    Rearranged feasibility: m works iff min over i <= m of
    (suffix_sum_i + i * R) >= (m + 1) * R.
    """
    trials, m_total = caps.shape
    suffix = np.cumsum(caps[:, ::-1], axis=1)[:, ::-1]
    margin = np.minimum.accumulate(suffix + rate_r * np.arange(1, m_total + 1), axis=1)
    feasible = margin >= rate_r * np.arange(2, m_total + 2)
    any_feasible = feasible.any(axis=1)
    last = m_total - 1 - np.argmax(feasible[:, ::-1], axis=1)
    return np.where(any_feasible, last + 1, 0)


def ergodic_upper_bound(rate_r: float, c_bar: float) -> float:
    """No-deadline ceiling on the average decoded rate: min(R, c_bar)."""
    if rate_r <= 0.0 or c_bar <= 0.0:
        raise ValueError("rate_r and c_bar must be positive")
    return min(rate_r, c_bar)
