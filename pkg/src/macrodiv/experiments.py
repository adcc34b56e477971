"""Sweep orchestration and figure-data emission.

A sweep enumerates (axis value, scheme, metric) rows in a fixed order, gives
every row its own random substream indexed by that order, and evaluates rows
independently.  Re-running with the same seed therefore yields byte-identical
output at any worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .channel import BlockageParams, ChannelConfig, RngStream, alpha_ccdf
from .closed_forms import (
    ergodic_capacity,
    outage_capacity,
    ts_ergodic_rate,
    two_tx_alamouti_rate,
)
from .schemes import (
    SCHEME_KINDS,
    SchemeSpec,
    ccdf_points,
    ergodic_estimate,
    outage_from_samples,
    rate_samples,
)

__all__ = [
    "AXES",
    "METRICS",
    "DEFAULT_TRIALS",
    "SweepConfig",
    "ResultRow",
    "CcdfRow",
    "run_sweep",
    "run_ccdf",
    "emit",
    "emit_text",
    "parse_rows",
]

AXES = ("p_B", "snr_db", "L", "K")
METRICS = ("ergodic", "outage")

# outage estimation needs many more samples than mean estimation to pin the
# tail of the rate distribution
DEFAULT_TRIALS = {"ergodic": 100_000, "outage": 1_000_000}

SWEEP_HEADER = "axis,axis_value,scheme,metric,rate_bits,std_error,n_trials,argmax_i"
CCDF_HEADER = "series,rate_bits,ccdf"

# schemes whose rate is a closed form; no sampling, no outage metric for the
# selection schemes since the network observes the blockage it selects on
_CLOSED_ERGODIC = ("capacity", "transmitter_selection", "two_tx_selection")
_NO_OUTAGE = ("transmitter_selection", "two_tx_selection")


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: an axis with its values, the fixed operating point for the
    remaining parameters, and which schemes/metrics to evaluate.

    SNR is configured in dB and converted to linear power internally.
    ``n_frames`` is the per-block frame count of the phase-rotation schemes
    (the swept quantity when axis is "K"); ``cp_len`` is carried along for
    interface completeness with the asynchronous analysis.
    """

    axis: str
    axis_values: tuple
    schemes: tuple
    n_tx: int = 4
    blockage_prob: float = 0.2
    snr_db: float = 6.0
    n_frames: int = 64
    cp_len: int = 8
    metrics: tuple = ("ergodic", "outage")
    n_trials: int | None = None
    seed: int = 0
    cdd_delays: tuple | None = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        values = tuple(self.axis_values)
        if not values:
            raise ValueError("axis_values must be non-empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("axis_values must be strictly increasing")
        if self.axis in ("L", "K"):
            if any(int(v) != v or v < 1 for v in values):
                raise ValueError(f"{self.axis} values must be positive integers")
            values = tuple(int(v) for v in values)
        else:
            values = tuple(float(v) for v in values)
        object.__setattr__(self, "axis_values", values)
        schemes = tuple(self.schemes)
        unknown = [s for s in schemes if s not in SCHEME_KINDS]
        if unknown:
            raise ValueError(f"unknown schemes {unknown}; choose from {SCHEME_KINDS}")
        if not schemes:
            raise ValueError("schemes must be non-empty")
        object.__setattr__(self, "schemes", schemes)
        metrics = tuple(self.metrics)
        bad = [m for m in metrics if m not in METRICS]
        if bad:
            raise ValueError(f"unknown metrics {bad}; choose from {METRICS}")
        object.__setattr__(self, "metrics", metrics)
        if not 0.0 < self.blockage_prob < 1.0:
            raise ValueError(
                f"blockage_prob must be in (0, 1), got {self.blockage_prob}"
            )
        if self.n_tx < 1:
            raise ValueError(f"n_tx must be >= 1, got {self.n_tx}")
        if self.n_frames < 1:
            raise ValueError(f"n_frames must be >= 1, got {self.n_frames}")
        if self.n_trials is not None and self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.cdd_delays is not None:
            object.__setattr__(self, "cdd_delays", tuple(int(d) for d in self.cdd_delays))


@dataclass(frozen=True)
class ResultRow:
    """One emitted sweep result."""

    axis: str
    axis_value: float
    scheme: str
    metric: str
    rate_bits: float
    std_error: float
    n_trials: int
    argmax_i: int | None = None


@dataclass(frozen=True)
class CcdfRow:
    """One point of an empirical or analytic complementary CDF curve."""

    series: str
    rate_bits: float
    ccdf: float


def _point_params(config: SweepConfig, axis_value):
    """Resolve (n_tx, blockage_prob, snr, n_frames) at one axis value."""
    n_tx = config.n_tx
    p_b = config.blockage_prob
    snr_db = config.snr_db
    n_frames = config.n_frames
    if config.axis == "p_B":
        p_b = float(axis_value)
    elif config.axis == "snr_db":
        snr_db = float(axis_value)
    elif config.axis == "L":
        n_tx = int(axis_value)
    else:
        n_frames = int(axis_value)
    return n_tx, p_b, 10.0 ** (snr_db / 10.0), n_frames


def _task_error(config: SweepConfig, axis_value, scheme: str, metric: str):
    """Reason a (point, scheme, metric) combination cannot run, or None."""
    n_tx, p_b, _, n_frames = _point_params(config, axis_value)
    if metric == "outage" and scheme in _NO_OUTAGE:
        return f"outage is not defined for {scheme} (the network observes blockage)"
    if scheme == "ncja" and n_tx % 2 != 0:
        return f"ncja needs an even transmitter count, got {n_tx}"
    if scheme == "two_tx_selection" and n_tx < 2:
        return f"two_tx_selection needs at least 2 transmitters, got {n_tx}"
    if scheme == "cyclic_delay_diversity":
        delays = config.cdd_delays or tuple(l % n_frames for l in range(n_tx))
        if len(delays) != n_tx or any(not 0 <= d < n_frames for d in delays):
            return f"cyclic delays {delays} invalid for {n_tx} transmitters, {n_frames} frames"
    return None


def _build_spec(config: SweepConfig, n_tx, p_b, snr, n_frames, scheme) -> SchemeSpec:
    cfg = ChannelConfig(n_tx, snr, BlockageParams.from_blockage_prob(p_b))
    delays = None
    if scheme == "cyclic_delay_diversity":
        delays = config.cdd_delays or tuple(l % n_frames for l in range(n_tx))
    frames = n_frames if scheme in ("phase_diversity", "cyclic_delay_diversity", "ncja") else 1
    return SchemeSpec(scheme, cfg, n_frames=frames, delays=delays)


def _compute_row(config: SweepConfig, task) -> ResultRow:
    index, axis_value, scheme, metric = task
    n_tx, p_b, snr, n_frames = _point_params(config, axis_value)
    if metric == "ergodic" and scheme in _CLOSED_ERGODIC:
        if scheme == "capacity":
            rate = ergodic_capacity(n_tx, p_b, snr)
        elif scheme == "transmitter_selection":
            rate = ts_ergodic_rate(n_tx, p_b, snr)
        else:
            rate = two_tx_alamouti_rate(n_tx, p_b, snr)
        return ResultRow(config.axis, axis_value, scheme, metric, rate, 0.0, 0)
    if metric == "outage" and scheme == "capacity":
        sol = outage_capacity(n_tx, p_b, snr)
        return ResultRow(
            config.axis, axis_value, scheme, metric, sol.rate, 0.0, 0, sol.argmax_index
        )
    n = config.n_trials or DEFAULT_TRIALS[metric]
    spec = _build_spec(config, n_tx, p_b, snr, n_frames, scheme)
    stream = RngStream(config.seed, index)
    if metric == "ergodic":
        est = ergodic_estimate(spec, n, stream)
        return ResultRow(
            config.axis, axis_value, scheme, metric, est.mean, est.std_error, n
        )
    samples = rate_samples(spec, n, stream)
    rate = outage_from_samples(samples)
    se = _outage_std_error(samples)
    return ResultRow(config.axis, axis_value, scheme, metric, rate, se, n)


def _outage_std_error(samples: np.ndarray, n_folds: int = 10) -> float:
    """Spread of the plug-in outage estimate across disjoint sample folds."""
    m = samples.size // n_folds
    if m < 1:
        return 0.0
    folds = samples[: m * n_folds].reshape(n_folds, m)
    vals = [outage_from_samples(f) for f in folds]
    return float(np.std(vals, ddof=1) / math.sqrt(n_folds))


def run_sweep(config: SweepConfig, workers: int = 1) -> list:
    """Evaluate every (axis value, scheme, metric) row of the sweep.

    Invalid combinations (for example the pairing scheme at an odd
    transmitter count) are reported as warnings and skipped; the run
    continues.  Row substreams are indexed by position in the full task
    enumeration, so skipping never shifts another row's draws.
    """
    tasks = []
    index = 0
    for axis_value in config.axis_values:
        for scheme in config.schemes:
            for metric in config.metrics:
                reason = _task_error(config, axis_value, scheme, metric)
                if reason is not None:
                    warnings.warn(
                        f"skipping {scheme}/{metric} at {config.axis}={axis_value}: {reason}",
                        stacklevel=2,
                    )
                else:
                    tasks.append((index, axis_value, scheme, metric))
                index += 1
    if workers <= 1:
        return [_compute_row(config, t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_compute_row, [config] * len(tasks), tasks))


def run_ccdf(
    config: SweepConfig, scheme: str, n: int | None = None, max_points: int = 1000
) -> list:
    """Empirical CCDF of a scheme's instantaneous rate at the sweep's fixed
    point, with the analytic capacity step curve as a second series.

    The empirical step curve is thinned to at most ``max_points`` points;
    the analytic series carries the step locations log2(1 + i*snr) with
    heights P(alpha >= i).
    """
    if scheme not in SCHEME_KINDS:
        raise ValueError(f"unknown scheme {scheme!r}")
    n_tx, p_b, snr, n_frames = (
        config.n_tx,
        config.blockage_prob,
        10.0 ** (config.snr_db / 10.0),
        config.n_frames,
    )
    spec = _build_spec(config, n_tx, p_b, snr, n_frames, scheme)
    n = n or DEFAULT_TRIALS["outage"]
    samples = rate_samples(spec, n, RngStream(config.seed, 0))
    points = ccdf_points(samples)
    if points.shape[0] > max_points:
        keep = np.unique(
            np.linspace(0, points.shape[0] - 1, max_points).astype(int)
        )
        points = points[keep]
    rows = [CcdfRow("empirical", float(r), float(c)) for r, c in points]
    ccdf = alpha_ccdf(n_tx, p_b)
    rows.extend(
        CcdfRow("analytic", math.log2(1.0 + i * snr), float(ccdf[i]))
        for i in range(1, n_tx + 1)
    )
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):#.9g}"


def emit_text(rows, format: str) -> str:
    """Serialize rows to CSV (9 significant digits, LF endings) or JSON."""
    if format not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {format!r}")
    is_ccdf = bool(rows) and isinstance(rows[0], CcdfRow)
    if format == "json":
        payload = [
            {f.name: getattr(row, f.name) for f in fields(row)} for row in rows
        ]
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    if is_ccdf:
        buf.write(CCDF_HEADER + "\n")
        for row in rows:
            buf.write(f"{row.series},{_fmt(row.rate_bits)},{_fmt(row.ccdf)}\n")
    else:
        buf.write(SWEEP_HEADER + "\n")
        for row in rows:
            buf.write(
                ",".join(
                    (
                        row.axis,
                        _fmt(row.axis_value),
                        row.scheme,
                        row.metric,
                        _fmt(row.rate_bits),
                        _fmt(row.std_error),
                        str(row.n_trials),
                        "" if row.argmax_i is None else str(row.argmax_i),
                    )
                )
                + "\n"
            )
    return buf.getvalue()


def emit(rows, format: str, path) -> None:
    """Write rows to ``path``; empty row lists produce a header-only CSV."""
    text = emit_text(rows, format)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def parse_rows(path) -> list:
    """Read a sweep CSV produced by ``emit`` back into ResultRow objects."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SWEEP_HEADER.split(","):
            raise ValueError(f"unexpected header {reader.fieldnames}")
        rows = []
        for rec in reader:
            axis = rec["axis"]
            value = rec["axis_value"]
            axis_value = int(value) if axis in ("L", "K") else float(value)
            rows.append(
                ResultRow(
                    axis=axis,
                    axis_value=axis_value,
                    scheme=rec["scheme"],
                    metric=rec["metric"],
                    rate_bits=float(rec["rate_bits"]),
                    std_error=float(rec["std_error"]),
                    n_trials=int(rec["n_trials"]),
                    argmax_i=int(rec["argmax_i"]) if rec["argmax_i"] else None,
                )
            )
        return rows
