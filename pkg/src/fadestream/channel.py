"""Block fading channel: gain sampling and capacity-level statistics.

The channel is modelled at the mutual-information level.  Each block t has a
random power gain phi[t]; a transmission at linear SNR P sees an instantaneous
capacity of log2(1 + phi[t] * P) bits per channel use (bpcu).  Everything
downstream (decoders, bounds, experiment runner) works on these per-block
capacities, never on channel symbols.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import exp1

LN2 = float(np.log(2.0))

RAYLEIGH_UNIT_MEAN = "rayleigh-unit-mean"
CONSTANT = "constant"

# Gain integration cutoff: the exp(-g) tail beyond this point contributes
# less than 1e-9 to any expectation taken in this package.
_GAIN_CUTOFF = 40.0


class QuadratureError(RuntimeError):
    """Numerical integration did not reach the requested tolerance."""


@dataclass(frozen=True)
class FadingModel:
    """Distribution of the per-block channel power gain.

    ``rayleigh()`` gives the unit-mean Rayleigh-fading power gain with
    density exp(-g) for g > 0.  ``constant(g)`` is a degenerate point mass,
    useful as a test stub for zero-variance channels.
    """

    kind: str = RAYLEIGH_UNIT_MEAN
    gain: float = 1.0  # point-mass location, used by the constant kind only

    def __post_init__(self):
        if self.kind not in (RAYLEIGH_UNIT_MEAN, CONSTANT):
            raise ValueError(f"unknown fading model kind: {self.kind!r}")
        if self.kind == CONSTANT and not (np.isfinite(self.gain) and self.gain >= 0.0):
            raise ValueError("constant gain must be finite and non-negative")

    @classmethod
    def rayleigh(cls) -> "FadingModel":
        return cls(kind=RAYLEIGH_UNIT_MEAN)

    @classmethod
    def constant(cls, gain: float) -> "FadingModel":
        return cls(kind=CONSTANT, gain=float(gain))

    def sample_gains(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw n i.i.d. gains from the model."""
        if self.kind == RAYLEIGH_UNIT_MEAN:
            # inverse transform g = -ln(u), u uniform on (0, 1]
            return -np.log1p(-rng.random(n))
        return np.full(n, self.gain)


@dataclass(frozen=True)
class PowerBudget:
    """Average transmit power as a linear SNR against unit-variance noise."""

    p_linear: float

    def __post_init__(self):
        if not (np.isfinite(self.p_linear) and self.p_linear > 0.0):
            raise ValueError("p_linear must be finite and positive")

    @classmethod
    def from_db(cls, snr_db: float) -> "PowerBudget":
        return cls(p_linear=10.0 ** (snr_db / 10.0))

    @property
    def db(self) -> float:
        return 10.0 * float(np.log10(self.p_linear))


def capacities(phi, power: PowerBudget) -> np.ndarray:
    """Instantaneous capacities log2(1 + phi * P) in bpcu, elementwise."""
    return np.log1p(np.asarray(phi, dtype=float) * power.p_linear) / LN2


@dataclass(frozen=True)
class ChannelRealization:
    """One trial's block gains and the matching capacities (bpcu)."""

    phi: np.ndarray
    cap: np.ndarray

    def __post_init__(self):
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float))
        cap = np.atleast_1d(np.asarray(self.cap, dtype=float))
        if phi.ndim != 1 or cap.ndim != 1 or len(phi) != len(cap) or len(phi) < 1:
            raise ValueError("phi and cap must be 1-d vectors of equal length >= 1")
        if np.any(phi < 0.0) or np.any(cap < 0.0):
            raise ValueError("gains and capacities must be non-negative")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "cap", cap)

    @property
    def m_blocks(self) -> int:
        return len(self.phi)

    @classmethod
    def from_gains(cls, phi, power: PowerBudget) -> "ChannelRealization":
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        return cls(phi=phi, cap=capacities(phi, power))


def sample_realization(
    model: FadingModel,
    power: PowerBudget,
    m_blocks: int,
    rng: np.random.Generator,
) -> ChannelRealization:
    """Draw one realization of m_blocks i.i.d. gains and their capacities."""
    if m_blocks < 1:
        raise ValueError("m_blocks must be >= 1")
    return ChannelRealization.from_gains(model.sample_gains(rng, m_blocks), power)


def trial_stream(master_seed: int, trial: int) -> np.random.Generator:
    """Independent random stream for one Monte Carlo trial.

    Streams are counter-based (Philox keyed by the pair (master_seed, trial)),
    so trial k's draws are derivable directly from the pair without generating
    any other trial.  This is what makes experiments order-independent and
    safely parallelizable.
    """
    if not 0 <= master_seed < 2**64:
        raise ValueError("master_seed must fit in 64 bits")
    if not 0 <= trial < 2**64:
        raise ValueError("trial index must fit in 64 bits")
    key = np.array([master_seed, trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _rayleigh_expectation(f, tol: float) -> float:
    """Integral of f(g) * exp(-g) over g > 0 by adaptive quadrature."""
    value, abserr = quad(
        lambda g: f(g) * np.exp(-g), 0.0, _GAIN_CUTOFF, epsabs=tol / 10.0, limit=200
    )
    if abserr > tol:
        raise QuadratureError(
            f"quadrature error {abserr:.2e} exceeds tolerance {tol:.2e}"
        )
    return value


def ergodic_capacity(model: FadingModel, power: PowerBudget, tol: float = 1e-6) -> float:
    """Mean instantaneous capacity E[log2(1 + phi * P)] in bpcu."""
    if model.kind == CONSTANT:
        return float(np.log1p(model.gain * power.p_linear) / LN2)
    p = power.p_linear
    return _rayleigh_expectation(lambda g: np.log1p(g * p) / LN2, tol)


def rayleigh_ergodic_closed_form(power: PowerBudget) -> float:
    """Closed form for the Rayleigh ergodic capacity: e^(1/P) E1(1/P) / ln 2.

    Follows from integrating log2(1 + gP) exp(-g) by parts; kept as an
    independent cross-check for the quadrature route.
    """
    x = 1.0 / power.p_linear
    return float(np.exp(x) * exp1(x) / LN2)


def capacity_variance(model: FadingModel, power: PowerBudget, tol: float = 1e-6) -> float:
    """Variance of the instantaneous capacity, in bpcu^2."""
    if model.kind == CONSTANT:
        return 0.0
    p = power.p_linear
    mean = _rayleigh_expectation(lambda g: np.log1p(g * p) / LN2, tol)
    second = _rayleigh_expectation(lambda g: (np.log1p(g * p) / LN2) ** 2, tol)
    return max(second - mean**2, 0.0)


def effective_power(
    power: PowerBudget, distance: float, path_loss_exponent: float
) -> PowerBudget:
    """Received power budget at the given distance: P * d^(-alpha)."""
    if not (np.isfinite(distance) and distance > 0.0):
        raise ValueError("distance must be positive")
    if not (np.isfinite(path_loss_exponent) and path_loss_exponent > 0.0):
        raise ValueError("path_loss_exponent must be positive")
    return PowerBudget(p_linear=power.p_linear * distance**-path_loss_exponent)
