"""Command-line front end: single runs, sweeps, and figure-style presets.

Emits one output record per operating point as CSV (scalar statistics) or
JSON (adds the decode-count cmf).  Identical invocations produce byte
identical output; headers record the run parameters, never timestamps.

Exit codes: 0 success, 2 usage/configuration error, 3 runtime error.
"""

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from functools import lru_cache

from . import __version__
from .bounds import InformedBound, ergodic_upper_bound
from .channel import FadingModel, PowerBudget, ergodic_capacity
from .engine import (
    SWEEP_AXES,
    ExperimentSpec,
    derive_seed,
    received_power,
    resolve_scheme,
    run_experiment,
    sweep,
)
from .schemes import AJE, GTS, JE, MT, ST, TS

SCHEME_TAGS = ("mt", "je", "aje", "ts", "gts", "st", "informed-bound")

CSV_COLUMNS = (
    "scheme",
    "blocks",
    "rate",
    "power_db",
    "distance",
    "path_loss",
    "window",
    "m_prime",
    "mean_rate",
    "rate_se",
    "mean_decoded",
    "ergodic_bound",
    "approx_flag",
    "seed",
    "trials",
)

SCHEMA_VERSION = 1

_INT_AXES = ("m_total", "window")


class UsageError(ValueError):
    """Inconsistent or invalid flag combination."""


def _scheme_from_args(tag, args, m_total):
    if tag == "mt":
        return MT()
    if tag == "je":
        return JE()
    if tag == "aje":
        return AJE(safety=args.alpha_safety if args.alpha_safety is not None else 0.95)
    if tag == "ts":
        return TS()
    if tag == "gts":
        if args.window is None:
            raise UsageError("gts requires --window")
        if not 1 <= args.window <= m_total:
            raise UsageError(f"--window must lie in [1, {m_total}]")
        return GTS(window=args.window)
    if tag == "st":
        return ST(
            exact_subset_limit=args.st_exact_limit if args.st_exact_limit is not None else 20,
            heuristic_subset_cap=args.st_heuristic_cap if args.st_heuristic_cap is not None else 4,
        )
    if tag == "informed-bound":
        return InformedBound()
    raise UsageError(f"unknown scheme {tag!r}")


def _scheme_tag(scheme):
    if isinstance(scheme, MT):
        return "mt"
    if isinstance(scheme, JE):
        return "je"
    if isinstance(scheme, AJE):
        return "aje"
    if isinstance(scheme, TS):
        return "ts"
    if isinstance(scheme, GTS):
        return "gts"
    if isinstance(scheme, ST):
        return "st"
    return "informed-bound"


@lru_cache(maxsize=None)
def _cached_cbar(p_linear: float) -> float:
    return ergodic_capacity(FadingModel.rayleigh(), PowerBudget(p_linear))


def _row(spec: ExperimentSpec, result) -> dict:
    scheme = resolve_scheme(spec)
    c_bar = _cached_cbar(received_power(spec).p_linear)
    return {
        "scheme": _scheme_tag(scheme),
        "blocks": spec.m_total,
        "rate": spec.rate_r,
        "power_db": spec.power_db,
        "distance": None if spec.distance is None else spec.distance[0],
        "path_loss": None if spec.distance is None else spec.distance[1],
        "window": scheme.window if isinstance(scheme, GTS) else None,
        "m_prime": scheme.m_prime if isinstance(scheme, AJE) else None,
        "mean_rate": result.mean_rate,
        "rate_se": result.rate_se,
        "mean_decoded": result.mean_decoded,
        "ergodic_bound": ergodic_upper_bound(spec.rate_r, c_bar),
        "approx_flag": result.approx_flag,
        "seed": spec.master_seed,
        "trials": result.trials_run,
        "cmf": [float(x) for x in result.cmf],
    }


# ---------------------------------------------------------------------------
# figure-style presets, at desk scale
# ---------------------------------------------------------------------------

_CMF_SCHEMES = (MT(), JE(), AJE(), TS(), None, ST(), InformedBound())  # None: gts slot
_SWEEP_SCHEMES = (MT(), JE(), AJE(), TS(), ST(), InformedBound())


def _preset_cmf(power_db, gts_window, trials, seed, workers):
    rows = []
    for idx, scheme in enumerate(_CMF_SCHEMES):
        if scheme is None:
            scheme = GTS(window=gts_window)
        spec = ExperimentSpec(
            model=FadingModel.rayleigh(),
            power_db=power_db,
            m_total=50,
            rate_r=1.0,
            scheme=scheme,
            trials=trials,
            master_seed=derive_seed(seed, idx),
        )
        rows.append(_row(spec, run_experiment(spec, workers=workers)))
    return rows


def _preset_sweep(axis, values, power_db, m_total, rate_r, distance, trials, seed, workers):
    rows = []
    for idx, scheme in enumerate(_SWEEP_SCHEMES):
        base = ExperimentSpec(
            model=FadingModel.rayleigh(),
            power_db=power_db,
            m_total=m_total,
            rate_r=rate_r,
            scheme=scheme,
            trials=trials,
            master_seed=derive_seed(seed, idx),
            distance=distance,
        )
        for index, (value, result) in enumerate(sweep(base, axis, values, workers=workers)):
            spec = dataclasses.replace(base, master_seed=derive_seed(base.master_seed, index))
            if axis == "m_total":
                spec = dataclasses.replace(spec, m_total=int(value))
            elif axis == "rate_r":
                spec = dataclasses.replace(spec, rate_r=float(value))
            elif axis == "distance":
                spec = dataclasses.replace(spec, distance=(float(value), distance[1]))
            rows.append(_row(spec, result))
    return rows


def _preset_fig4(trials, seed, workers):
    rows = []
    windows = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000]
    for idx, power_db in enumerate((0.0, 2.0)):
        base = ExperimentSpec(
            model=FadingModel.rayleigh(),
            power_db=power_db,
            m_total=2000,
            rate_r=1.0,
            scheme=GTS(window=1),
            trials=trials,
            master_seed=derive_seed(seed, idx),
        )
        for index, (value, result) in enumerate(sweep(base, "window", windows, workers=workers)):
            spec = dataclasses.replace(
                base,
                scheme=GTS(window=int(value)),
                master_seed=derive_seed(base.master_seed, index),
            )
            rows.append(_row(spec, result))
    return rows


PRESETS = {
    "fig4": {
        "trials": 10000,
        "format": "csv",
        "note": "windowed time sharing vs window size; desk scale blocks=2000 instead of 10000",
        "build": _preset_fig4,
    },
    "fig5a": {
        "trials": 100000,
        "format": "json",
        "note": "decode-count cmf, blocks=50 rate=1 snr=1.44dB, all schemes (gts window=10)",
        "build": lambda t, s, w: _preset_cmf(1.44, 10, t, s, w),
    },
    "fig5b": {
        "trials": 100000,
        "format": "json",
        "note": "decode-count cmf, blocks=50 rate=1 snr=0dB, all schemes (gts window=50)",
        "build": lambda t, s, w: _preset_cmf(0.0, 50, t, s, w),
    },
    "fig6a": {
        "trials": 10000,
        "format": "csv",
        "note": "mean decoded count vs deadline length, rate=1 snr=-3dB",
        "build": lambda t, s, w: _preset_sweep(
            "m_total", list(range(1, 101)), -3.0, 100, 1.0, None, t, s, w
        ),
    },
    "fig6b": {
        "trials": 10000,
        "format": "csv",
        "note": "mean decoded count vs deadline length, rate=1 snr=2dB",
        "build": lambda t, s, w: _preset_sweep(
            "m_total", list(range(1, 101)), 2.0, 100, 1.0, None, t, s, w
        ),
    },
    "fig7": {
        "trials": 10000,
        "format": "csv",
        "note": "mean decoded rate vs message rate, blocks=100 snr=20dB, with bounds",
        "build": lambda t, s, w: _preset_sweep(
            "rate_r", [x / 2.0 for x in range(1, 21)], 20.0, 100, 1.0, None, t, s, w
        ),
    },
    "fig8": {
        "trials": 10000,
        "format": "csv",
        "note": "mean decoded rate vs distance, blocks=100 rate=1 snr=20dB path-loss=3",
        "build": lambda t, s, w: _preset_sweep(
            "distance", list(range(1, 11)), 20.0, 100, 1.0, (1.0, 3.0), t, s, w
        ),
    },
}


# ---------------------------------------------------------------------------
# argument parsing and validation
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fadestream",
        description="Monte Carlo comparison of streaming transmission schemes "
        "over block fading channels.",
    )
    parser.add_argument("--scheme", choices=SCHEME_TAGS)
    parser.add_argument("--blocks", type=int, help="number of messages / channel blocks M")
    parser.add_argument("--rate", type=float, help="per-message rate R in bpcu")
    parser.add_argument("--snr-db", type=float, help="average SNR in dB")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per operating point")
    parser.add_argument("--seed", type=int, help="64-bit master seed (default 1)")
    parser.add_argument("--window", type=int, help="gts window size W")
    parser.add_argument("--alpha-safety", type=float, help="aje back-off factor (default 0.95)")
    parser.add_argument("--distance", type=float, help="transmitter-receiver distance")
    parser.add_argument("--path-loss", type=float, help="path loss exponent alpha")
    parser.add_argument("--st-exact-limit", type=int, help="st: exact search up to this M (default 20)")
    parser.add_argument("--st-heuristic-cap", type=int, help="st: run length cap above the limit (default 4)")
    parser.add_argument("--sweep", metavar="AXIS=V1,V2,...", help=f"sweep one axis of {SWEEP_AXES}")
    parser.add_argument("--preset", choices=sorted(PRESETS))
    parser.add_argument("--out", default="-", help="output path ('-' for stdout)")
    parser.add_argument("--format", choices=("csv", "json"), dest="out_format")
    parser.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    return parser


def _parse_sweep(text: str):
    if "=" not in text:
        raise UsageError("sweep must look like axis=v1,v2,...")
    axis, _, rest = text.partition("=")
    axis = axis.strip()
    if axis not in SWEEP_AXES:
        raise UsageError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    if not rest.strip():
        return axis, []
    cast = int if axis in _INT_AXES else float
    try:
        values = [cast(v) for v in rest.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad sweep value list for {axis}: {exc}") from None
    return axis, values


def _validate_run_args(args):
    if args.preset is not None:
        disallowed = {
            "--scheme": args.scheme,
            "--blocks": args.blocks,
            "--rate": args.rate,
            "--snr-db": args.snr_db,
            "--window": args.window,
            "--alpha-safety": args.alpha_safety,
            "--distance": args.distance,
            "--path-loss": args.path_loss,
            "--st-exact-limit": args.st_exact_limit,
            "--st-heuristic-cap": args.st_heuristic_cap,
            "--sweep": args.sweep,
        }
        extra = [flag for flag, value in disallowed.items() if value is not None]
        if extra:
            raise UsageError(f"--preset does not combine with {', '.join(extra)}")
        return
    for flag, value in (("--scheme", args.scheme), ("--blocks", args.blocks),
                        ("--rate", args.rate), ("--snr-db", args.snr_db)):
        if value is None:
            raise UsageError(f"{flag} is required without --preset")
    if args.blocks < 1:
        raise UsageError("--blocks must be >= 1")
    if args.rate <= 0.0:
        raise UsageError("--rate must be positive")
    if args.window is not None and args.scheme != "gts":
        raise UsageError("--window applies to the gts scheme only")
    if args.alpha_safety is not None and args.scheme != "aje":
        raise UsageError("--alpha-safety applies to the aje scheme only")
    if (args.st_exact_limit is not None or args.st_heuristic_cap is not None) and args.scheme != "st":
        raise UsageError("--st-exact-limit/--st-heuristic-cap apply to the st scheme only")
    if (args.distance is None) != (args.path_loss is None):
        raise UsageError("--distance and --path-loss must be given together")


def _run_single_or_sweep(args):
    trials = args.trials if args.trials is not None else 10000
    seed = args.seed if args.seed is not None else 1
    scheme = _scheme_from_args(args.scheme, args, args.blocks)
    distance = None if args.distance is None else (args.distance, args.path_loss)
    base = ExperimentSpec(
        model=FadingModel.rayleigh(),
        power_db=args.snr_db,
        m_total=args.blocks,
        rate_r=args.rate,
        scheme=scheme,
        trials=trials,
        master_seed=seed,
        distance=distance,
    )
    meta = {
        "scheme": args.scheme,
        "blocks": args.blocks,
        "rate": args.rate,
        "snr_db": args.snr_db,
        "trials": trials,
        "seed": seed,
    }
    if args.sweep is None:
        return meta, [_row(base, run_experiment(base, workers=args.workers))]
    axis, values = _parse_sweep(args.sweep)
    meta["sweep"] = f"{axis}={','.join(str(v) for v in values)}"
    rows = []
    for index, (value, result) in enumerate(sweep(base, axis, values, workers=args.workers)):
        spec = dataclasses.replace(base, master_seed=derive_seed(base.master_seed, index))
        if axis == "window":
            spec = dataclasses.replace(spec, scheme=GTS(window=int(value)))
        elif axis == "distance":
            spec = dataclasses.replace(spec, distance=(float(value), base.distance[1]))
        else:
            spec = dataclasses.replace(spec, **{axis: value})
        rows.append(_row(spec, result))
    return meta, rows


def _run_preset(args):
    preset = PRESETS[args.preset]
    trials = args.trials if args.trials is not None else preset["trials"]
    seed = args.seed if args.seed is not None else 1
    rows = preset["build"](trials, seed, args.workers)
    meta = {
        "preset": args.preset,
        "trials": trials,
        "seed": seed,
        "note": preset["note"],
    }
    return meta, rows


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render_csv(meta, rows) -> str:
    lines = [f"# fadestream csv schema={SCHEMA_VERSION} version={__version__}"]
    run_info = " ".join(f"{k}={v}" for k, v in meta.items() if k != "note")
    lines.append(f"# run: {run_info}")
    if "note" in meta:
        lines.append(f"# note: {meta['note']}")
    lines.append(",".join(CSV_COLUMNS))
    for row in rows:
        lines.append(",".join(_csv_cell(row[col]) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def _render_json(meta, rows) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "tool": "fadestream",
        "version": __version__,
        "run": meta,
        "rows": rows,
    }
    return json.dumps(doc, indent=2) + "\n"


def _write_output(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp_path = tempfile.mkstemp(prefix=".fadestream-", dir=directory)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_path, out)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate_run_args(args)
        if args.sweep is not None and args.preset is None:
            _parse_sweep(args.sweep)  # fail fast on malformed sweeps
        if args.preset is not None:
            out_format = args.out_format or PRESETS[args.preset]["format"]
            meta, rows = _run_preset(args)
        else:
            out_format = args.out_format or "csv"
            meta, rows = _run_single_or_sweep(args)
    except (UsageError, ValueError) as exc:
        print(f"fadestream: error: {exc}", file=sys.stderr)
        return 2
    meta["format"] = out_format
    if out_format == "csv":
        rows = [{k: v for k, v in row.items() if k != "cmf"} for row in rows]
        text = _render_csv(meta, rows)
    else:
        text = _render_json(meta, rows)
    try:
        _write_output(text, args.out)
    except OSError as exc:
        print(f"fadestream: error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 3
    return 0


def app():
    raise SystemExit(main())


if __name__ == "__main__":
    app()
