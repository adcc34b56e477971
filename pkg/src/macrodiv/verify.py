"""Self-checks behind the ``verify`` CLI subcommand.

Each check cross-validates an implementation path against an independent
one: Monte Carlo against closed forms, finite grids against limits, and
empirical concentration against the analytic tail bound.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .channel import RngStream
from .closed_forms import (
    async_capacity_limit,
    async_effective_snr,
    outage_capacity,
    rbar_closed,
)
from .ofdm import OfdmConfig, hoeffding_check, verify_worst_case_delta, worst_case_capacity
from .schemes import outage_from_samples, rbar_mc

__all__ = ["CheckResult", "run_checks", "CHECK_NAMES"]


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _closed_form_checks(seed: int, n: int) -> list:
    results = []
    for k, snr in enumerate((0.1, 1.0, 10.0)):
        est = rbar_mc(2, snr, n, RngStream(seed, 100 + k))
        target = rbar_closed(2, snr)
        gap = abs(est.mean - target)
        ok = gap <= 4.0 * est.std_error
        results.append(
            CheckResult(
                f"two-phase mean rate vs closed form (snr={snr})",
                ok,
                f"mc={est.mean:.6f} closed={target:.6f} gap={gap:.2e} "
                f"(4se={4 * est.std_error:.2e})",
            )
        )
    n_tx, p_b, snr = 4, 0.3, 4.0
    gen = RngStream(seed, 200).generator()
    alpha = gen.binomial(n_tx, 1.0 - p_b, size=n)
    plug = outage_from_samples(np.log2(1.0 + alpha * snr))
    exact = outage_capacity(n_tx, p_b, snr)
    rel = abs(plug - exact.rate) / exact.rate
    results.append(
        CheckResult(
            "plug-in outage vs exact outage capacity",
            rel <= 0.01,
            f"plug-in={plug:.6f} exact={exact.rate:.6f} rel={rel:.2e}",
        )
    )
    counts = np.arange(17)
    snr_grid = np.logspace(-1, 2, 7)
    ok = all(
        np.all(async_effective_snr(counts, s) >= counts * s / 4.0 - 1e-12)
        for s in snr_grid
    )
    results.append(
        CheckResult("off-grid SNR within 6 dB of ideal", ok, "i <= 16, snr in [0.1, 100]")
    )
    return results


def _riemann_check() -> list:
    n_tx, p_b, snr, cp = 2, 0.4, 2.0, 16
    limit = async_capacity_limit(n_tx, p_b, snr)
    gaps = []
    for n_sub in (64, 256, 1024):
        grid = OfdmConfig(n_sub, cp)
        gaps.append(abs(worst_case_capacity(n_tx, p_b, snr, grid) - limit))
    ok = gaps[0] > gaps[1] > gaps[2]
    return [
        CheckResult(
            "finite-grid worst case converges to its limit",
            ok,
            "gaps " + " > ".join(f"{g:.2e}" for g in gaps),
        )
    ]


def _delta_grid_check() -> list:
    results = []
    ofdm = OfdmConfig(32, 4, tau_max=1.0)
    for n_tx in (1, 2):
        report = verify_worst_case_delta(n_tx, 0.3, 4.0, ofdm, grid_resolution=8)
        zero_gap = abs(report.on_grid_rate - report.sync_scaled_rate)
        ok = report.min_at_half and report.min_matches_worst_case and zero_gap < 1e-9
        results.append(
            CheckResult(
                f"worst-case fractional delay sits at 1/2 (n_tx={n_tx})",
                ok,
                f"argmin={report.argmin_tau} min={report.min_rate:.6f} "
                f"worst={report.worst_case_rate:.6f} zero_gap={zero_gap:.1e}",
            )
        )
    return results


def _hoeffding_quick_check(seed: int) -> list:
    ofdm = OfdmConfig(16, 4, tau_max=1.0)
    report = hoeffding_check(
        4,
        0.2,
        1.0,
        ofdm,
        n_blocks=4,
        rng=RngStream(seed, 300),
        n_phase_draws=2000,
        subcarrier_counts=(16, 64),
        n_ref=20_000,
    )
    worst = float(np.max(report.deviation_freq - report.bound))
    return [
        CheckResult(
            "rate concentration within the tail bound",
            report.within_bound,
            f"max(freq - bound) = {worst:.2e}",
        )
    ]


CHECK_NAMES = ("closed-forms", "riemann", "worst-case-delta", "hoeffding")


def run_checks(seed: int = 0, names=CHECK_NAMES, n: int = 200_000) -> list:
    """Run the named verification suites and return their results."""
    runners = {
        "closed-forms": lambda: _closed_form_checks(seed, n),
        "riemann": _riemann_check,
        "worst-case-delta": _delta_grid_check,
        "hoeffding": lambda: _hoeffding_quick_check(seed),
    }
    unknown = [name for name in names if name not in runners]
    if unknown:
        raise ValueError(f"unknown checks {unknown}; choose from {CHECK_NAMES}")
    results = []
    for name in names:
        results.extend(runners[name]())
    return results
