"""Monte Carlo study of streaming transmission over block fading channels.

A transmitter receives one fixed-rate message per channel block and must
deliver as many as possible by a common deadline M blocks later.  This
package samples block fading channels, decodes them under six transmission
schemes (memoryless, joint encoding, adaptive joint encoding, time sharing,
windowed time sharing, superposition), and compares the average decoded rate
and decode-count distribution against the informed-transmitter and ergodic
upper bounds.
"""

__version__ = "0.1.0"

from .analytic import (
    DecodeCountPmf,
    binomial_se,
    combined_se,
    estimate_prefix_probs,
    je_pmf_exact_smallM,
    mt_pmf_exact,
    mt_pmf_gaussian,
    mt_success_prob,
    prefix_sum_rate,
    prefix_sum_rate_mc,
    ts_rate_analytic_estimate,
)
from .bounds import InformedBound, ergodic_upper_bound, informed_upper_bound
from .channel import (
    ChannelRealization,
    FadingModel,
    PowerBudget,
    QuadratureError,
    capacity_variance,
    effective_power,
    ergodic_capacity,
    rayleigh_ergodic_closed_form,
    sample_realization,
    trial_stream,
)
from .engine import (
    ExperimentResult,
    ExperimentSpec,
    optimal_window,
    run_experiment,
    sweep,
)
from .schemes import (
    AJE,
    GTS,
    JE,
    MT,
    ST,
    TS,
    DecodeOutcome,
    choose_m_prime,
    decode_aje,
    decode_gts,
    decode_je,
    decode_mt,
    decode_st,
    decode_ts,
    je_prefix_feasible,
    st_power_allocation,
    st_subset_capacity,
)

__all__ = [
    "AJE",
    "ChannelRealization",
    "DecodeCountPmf",
    "DecodeOutcome",
    "ExperimentResult",
    "ExperimentSpec",
    "FadingModel",
    "GTS",
    "InformedBound",
    "JE",
    "MT",
    "PowerBudget",
    "QuadratureError",
    "ST",
    "TS",
    "binomial_se",
    "capacity_variance",
    "choose_m_prime",
    "combined_se",
    "decode_aje",
    "decode_gts",
    "decode_je",
    "decode_mt",
    "decode_st",
    "decode_ts",
    "effective_power",
    "ergodic_capacity",
    "ergodic_upper_bound",
    "estimate_prefix_probs",
    "informed_upper_bound",
    "je_pmf_exact_smallM",
    "je_prefix_feasible",
    "mt_pmf_exact",
    "mt_pmf_gaussian",
    "mt_success_prob",
    "optimal_window",
    "rayleigh_ergodic_closed_form",
    "run_experiment",
    "sample_realization",
    "st_power_allocation",
    "st_subset_capacity",
    "sweep",
    "prefix_sum_rate",
    "prefix_sum_rate_mc",
    "trial_stream",
    "ts_rate_analytic_estimate",
]
