"""Deterministic Monte Carlo experiment runner.

Every trial gets its own counter-based random stream derived from
(master_seed, trial index), so results are independent of execution order,
chunking, and the number of workers.  Per-trial decoded counts are reduced
into an integer histogram, from which the mean rate, its standard error, and
the decode-count cmf all follow exactly.
"""

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import schemes
from .bounds import InformedBound, informed_counts
from .channel import (
    FadingModel,
    PowerBudget,
    capacities,
    effective_power,
    ergodic_capacity,
    trial_stream,
)
from .schemes import AJE, GTS, JE, MT, ST, TS, SchemeConfig

SWEEP_AXES = ("power_db", "rate_r", "m_total", "window", "distance")

_SCHEME_TYPES = (MT, JE, AJE, TS, GTS, ST, InformedBound)


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one Monte Carlo experiment."""

    model: FadingModel
    power_db: float
    m_total: int
    rate_r: float
    scheme: SchemeConfig | InformedBound
    trials: int
    master_seed: int
    distance: tuple[float, float] | None = None  # (distance, path_loss_exponent)

    def __post_init__(self):
        if not isinstance(self.scheme, _SCHEME_TYPES):
            raise ValueError(f"unknown scheme configuration: {self.scheme!r}")
        if self.m_total < 1:
            raise ValueError("m_total must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not (np.isfinite(self.rate_r) and self.rate_r > 0.0):
            raise ValueError("rate_r must be finite and positive")
        if not np.isfinite(self.power_db):
            raise ValueError("power_db must be finite")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.distance is not None:
            d, alpha = self.distance
            if d <= 0.0 or alpha <= 0.0:
                raise ValueError("distance and path_loss_exponent must be positive")
        if isinstance(self.scheme, GTS) and self.scheme.window > self.m_total:
            raise ValueError("gts window cannot exceed m_total")
        if isinstance(self.scheme, AJE) and self.scheme.m_prime is not None:
            if self.scheme.m_prime > self.m_total:
                raise ValueError("aje m_prime cannot exceed m_total")


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    """Aggregated statistics of one experiment."""

    mean_rate: float
    rate_se: float
    cmf: np.ndarray  # cmf[m] = Pr{decoded count <= m}, m = 0..M
    mean_decoded: float
    approx_flag: bool
    trials_run: int


def received_power(spec: ExperimentSpec) -> PowerBudget:
    """Power budget after the optional distance path loss."""
    power = PowerBudget.from_db(spec.power_db)
    if spec.distance is not None:
        power = effective_power(power, *spec.distance)
    return power


def resolve_scheme(spec: ExperimentSpec) -> SchemeConfig | InformedBound:
    """Fill in derived scheme parameters (the adaptive message count)."""
    scheme = spec.scheme
    if isinstance(scheme, AJE) and scheme.m_prime is None:
        c_bar = ergodic_capacity(spec.model, received_power(spec))
        m_prime = schemes.choose_m_prime(c_bar, spec.rate_r, spec.m_total, scheme.safety)
        return AJE(m_prime=m_prime, safety=scheme.safety)
    return scheme


def _sample_gain_block(spec: ExperimentSpec, start: int, count: int) -> np.ndarray:
    phis = np.empty((count, spec.m_total))
    for k in range(count):
        phis[k] = spec.model.sample_gains(trial_stream(spec.master_seed, start + k), spec.m_total)
    return phis


def _decode_chunk(spec: ExperimentSpec, start: int, count: int) -> tuple[np.ndarray, bool]:
    """Decoded counts for trials [start, start + count); picklable for pools."""
    power = received_power(spec)
    phis = _sample_gain_block(spec, start, count)
    scheme = resolve_scheme(spec)
    if isinstance(scheme, ST):
        return schemes.st_counts(
            phis,
            power.p_linear,
            spec.rate_r,
            scheme.exact_subset_limit,
            scheme.heuristic_subset_cap,
        )
    caps = capacities(phis, power)
    if isinstance(scheme, MT):
        counts = schemes.mt_counts(caps, spec.rate_r)
    elif isinstance(scheme, JE):
        counts = schemes.je_counts(caps, spec.rate_r)
    elif isinstance(scheme, AJE):
        counts = schemes.aje_counts(caps, spec.rate_r, scheme.m_prime)
    elif isinstance(scheme, TS):
        counts = schemes.ts_counts(caps, spec.rate_r)
    elif isinstance(scheme, GTS):
        counts = schemes.gts_counts(caps, spec.rate_r, scheme.window)
    elif isinstance(scheme, InformedBound):
        counts = informed_counts(caps, spec.rate_r)
    else:  # unreachable, spec validation rejects unknown schemes
        raise AssertionError(f"unhandled scheme {scheme!r}")
    return counts, False


def _chunk_ranges(trials: int, m_total: int):
    chunk = max(1, min(4096, int(8e6) // m_total))
    return [(start, min(chunk, trials - start)) for start in range(0, trials, chunk)]


def _chunk_histogram(args) -> tuple[np.ndarray, bool]:
    spec, start, count = args
    counts, approx = _decode_chunk(spec, start, count)
    return np.bincount(counts, minlength=spec.m_total + 1), approx


def decode_counts(spec: ExperimentSpec) -> tuple[np.ndarray, bool]:
    """Per-trial decoded counts in trial order, plus the approximate flag.

    Mainly for paired per-trial comparisons (e.g. checking that no scheme
    ever beats the informed bound on the same realization).
    """
    parts = [_decode_chunk(spec, start, count) for start, count in _chunk_ranges(spec.trials, spec.m_total)]
    approx = any(a for _, a in parts)
    return np.concatenate([c for c, _ in parts]), approx


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Run all trials and aggregate the decode-count statistics.

    The reduction is an integer histogram sum, so the result is bit-identical
    for any chunking and any number of workers.
    """
    jobs = [(spec, start, count) for start, count in _chunk_ranges(spec.trials, spec.m_total)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_histogram, jobs, chunksize=1))
    else:
        parts = [_chunk_histogram(job) for job in jobs]
    hist = np.sum([h for h, _ in parts], axis=0, dtype=np.int64)
    approx = any(a for _, a in parts)
    return _result_from_histogram(hist, spec, approx)


def _result_from_histogram(hist: np.ndarray, spec: ExperimentSpec, approx: bool) -> ExperimentResult:
    n = int(hist.sum())
    m = np.arange(spec.m_total + 1, dtype=float)
    mean_decoded = float(m @ hist) / n
    second = float((m**2) @ hist) / n
    var = max(second - mean_decoded**2, 0.0) * (n / (n - 1) if n > 1 else 0.0)
    return ExperimentResult(
        mean_rate=spec.rate_r * mean_decoded / spec.m_total,
        rate_se=spec.rate_r * float(np.sqrt(var / n)) / spec.m_total,
        cmf=np.cumsum(hist) / n,
        mean_decoded=mean_decoded,
        approx_flag=approx,
        trials_run=n,
    )


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def derive_seed(master_seed: int, index: int) -> int:
    """Independent 64-bit child seed for sweep point `index`."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def _spec_for_value(base: ExperimentSpec, axis: str, value, seed: int) -> ExperimentSpec:
    if axis == "window":
        if not isinstance(base.scheme, GTS):
            raise ValueError("window sweep applies to the gts scheme only")
        return dataclasses.replace(base, scheme=GTS(window=int(value)), master_seed=seed)
    if axis == "distance":
        if base.distance is None:
            raise ValueError("distance sweep needs a base (distance, path_loss) pair")
        return dataclasses.replace(
            base, distance=(float(value), base.distance[1]), master_seed=seed
        )
    if axis == "m_total":
        return dataclasses.replace(base, m_total=int(value), master_seed=seed)
    if axis in ("power_db", "rate_r"):
        return dataclasses.replace(base, **{axis: float(value)}, master_seed=seed)
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")


def sweep(
    base: ExperimentSpec, axis: str, values, workers: int = 1
) -> list[tuple[float, ExperimentResult]]:
    """One experiment per axis value, with independent derived seeds."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    out = []
    for index, value in enumerate(values):
        spec = _spec_for_value(base, axis, value, derive_seed(base.master_seed, index))
        out.append((value, run_experiment(spec, workers=workers)))
    return out


def optimal_window(
    base: ExperimentSpec, candidates, workers: int = 1
) -> tuple[int, ExperimentResult]:
    """gts window from `candidates` that maximizes the mean decoded rate.

    Ties break toward the smaller window.
    """
    candidates = sorted({int(w) for w in candidates})
    if not candidates:
        raise ValueError("candidates must be non-empty")
    if candidates[0] < 1 or candidates[-1] > base.m_total:
        raise ValueError("candidates must lie in [1, m_total]")
    best = None
    for window, result in sweep(base, "window", candidates, workers=workers):
        if best is None or result.mean_rate > best[1].mean_rate:
            best = (int(window), result)
    return best
