"""How the deadline length and the time-sharing window shape the rate.

Two experiments at desk scale:
 1. mean decoded rate vs number of blocks M, above and below mean capacity,
    showing the joint-encoding all-or-nothing behavior;
 2. the windowed time-sharing tradeoff: short windows forgo pooling, long
    windows average the channel but starve late messages.
"""

from fadestream import (
    JE,
    MT,
    TS,
    ExperimentSpec,
    FadingModel,
    GTS,
    optimal_window,
    run_experiment,
    sweep,
)

MODEL = FadingModel.rayleigh()
TRIALS = 4000


def base_spec(scheme, power_db, m_total=10):
    return ExperimentSpec(
        model=MODEL,
        power_db=power_db,
        m_total=m_total,
        rate_r=1.0,
        scheme=scheme,
        trials=TRIALS,
        master_seed=7,
    )


print("== mean decoded rate vs deadline length ==")
deadlines = [1, 2, 5, 10, 20, 50, 100]
for power_db in (2.0, -3.0):
    print(f"\nSNR {power_db:+.0f} dB (mean capacity {'above' if power_db > 0 else 'below'} R=1):")
    print(f"{'M':>5} {'mt':>8} {'je':>8} {'ts':>8}")
    results = {}
    for tag, scheme in (("mt", MT()), ("je", JE()), ("ts", TS())):
        results[tag] = dict(sweep(base_spec(scheme, power_db), "m_total", deadlines))
    for m in deadlines:
        print(
            f"{m:5d} {results['mt'][m].mean_rate:8.3f} "
            f"{results['je'][m].mean_rate:8.3f} {results['ts'][m].mean_rate:8.3f}"
        )
print("""
Joint encoding tends to 1 with growing M when the mean capacity exceeds the
rate, and to 0 when it does not; the memoryless and time-sharing curves stay
flat in between.  That is the all-or-nothing behavior the window scheme
interpolates.
""".rstrip())

print("\n== picking the time-sharing window ==")
candidates = [1, 2, 3, 5, 8, 12, 20, 40, 80]
for power_db, m_total in ((5.0, 80), (-3.0, 80)):
    base = base_spec(GTS(window=1), power_db, m_total)
    rates = dict(sweep(base, "window", candidates))
    best, best_run = optimal_window(base, candidates)
    shown = {w: round(rates[w].mean_rate, 3) for w in candidates}
    print(f"SNR {power_db:+.0f} dB: rate by window {shown}")
    print(f"  best window {best} with mean rate {best_run.mean_rate:.3f}")
print("""
Above mean capacity an interior window wins: wide enough to average fading,
narrow enough that late messages still get channel time.  Well below mean
capacity the full-deadline window (plain time sharing) is best: only the
early messages ever decode, so giving them everything pays off.
""".rstrip())
