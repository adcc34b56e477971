"""Closed-form ergodic and outage rates, in bits per channel use.

Everything here is exact arithmetic on the blockage-count distribution plus
one analytic building block: the uniform-phase ring average of
log2(1 + |x + e^{j*theta} y|^2), which evaluates a whole family of
two-component interference expectations in closed form.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .channel import alpha_ccdf, alpha_pmf

__all__ = [
    "OutageSolution",
    "ring_expectation",
    "ergodic_capacity",
    "outage_capacity",
    "ts_ergodic_rate",
    "two_tx_alamouti_rate",
    "rbar_closed",
    "async_effective_snr",
    "async_capacity_limit",
    "async_outage_limit",
]


class OutageSolution(NamedTuple):
    """A fixed-rate operating point: the outage rate in bits/channel use and
    the smallest transmitter-count index attaining the maximum."""

    rate: float
    argmax_index: int


def ring_expectation(x_mag, y_mag):
    """Uniform-phase average of log2(1 + |x + e^{j*theta} y|^2).

    Equals log2((1 + a + sqrt((1+a)^2 - b^2)) / 2) with a = x^2 + y^2 and
    b = 2xy, computed through the cancellation-free factorization
    (1+a)^2 - b^2 = (1 + (x-y)^2)(1 + (x+y)^2).  Symmetric in its arguments,
    strictly increasing in each, and bounded between log2(1 + (x-y)^2) and
    log2(1 + (x+y)^2).  Accepts scalars or broadcasting arrays.
    """
    x = np.asarray(x_mag, dtype=float)
    y = np.asarray(y_mag, dtype=float)
    if np.any(x < 0.0) or np.any(y < 0.0):
        raise ValueError("magnitudes must be non-negative")
    a = x * x + y * y
    root = np.sqrt((1.0 + (x - y) ** 2) * (1.0 + (x + y) ** 2))
    val = np.log2(0.5 * (1.0 + a + root))
    if np.isscalar(x_mag) and np.isscalar(y_mag):
        return float(val)
    return val


def ergodic_capacity(n_tx: int, blockage_prob: float, snr: float) -> float:
    """Mean of log2(1 + alpha * snr) over the binomial blockage count.

    Achievable with per-block rate adaptation on the count of non-blocked
    transmitters; transmitter-side blockage knowledge adds nothing beyond it.
    """
    pmf = alpha_pmf(n_tx, blockage_prob)
    counts = np.arange(n_tx + 1)
    return float(pmf @ np.log2(1.0 + counts * snr))


def outage_capacity(n_tx: int, blockage_prob: float, snr: float) -> OutageSolution:
    """Best fixed rate times its success probability.

    The success probability of rate r is a step function with steps at
    log2(1 + i*snr) of height P(alpha >= i), so the supremum is a maximum
    over i = 1..n_tx; ties break toward the smaller index.
    """
    ccdf = alpha_ccdf(n_tx, blockage_prob)
    counts = np.arange(1, n_tx + 1)
    candidates = ccdf[1:] * np.log2(1.0 + counts * snr)
    best = int(np.argmax(candidates))
    return OutageSolution(float(candidates[best]), best + 1)


def ts_ergodic_rate(n_tx: int, blockage_prob: float, snr: float) -> float:
    """Ergodic rate of single-transmitter selection:
    (1 - blockage_prob**n_tx) * log2(1 + snr).

    Saturates at log2(1 + snr) for many transmitters: selection buys outage
    protection but no SNR gain.
    """
    if n_tx < 1:
        raise ValueError(f"n_tx must be >= 1, got {n_tx}")
    if not 0.0 <= blockage_prob <= 1.0:
        raise ValueError(f"blockage_prob must be in [0, 1], got {blockage_prob}")
    return (1.0 - blockage_prob**n_tx) * math.log2(1.0 + snr)


def two_tx_alamouti_rate(n_tx: int, blockage_prob: float, snr: float) -> float:
    """Ergodic rate of selecting a pair of transmitters and running the
    orthogonal space-time code over them:
    P(alpha >= 2) log2(1 + 2 snr) + P(alpha = 1) log2(1 + snr).

    For n_tx == 2 this coincides exactly with the ergodic capacity.
    """
    if n_tx < 2:
        raise ValueError(f"pair selection needs n_tx >= 2, got {n_tx}")
    pmf = alpha_pmf(n_tx, blockage_prob)
    ccdf = alpha_ccdf(n_tx, blockage_prob)
    return float(
        ccdf[2] * math.log2(1.0 + 2.0 * snr) + pmf[1] * math.log2(1.0 + snr)
    )


def rbar_closed(i: int, snr: float) -> float:
    """Mean rate delivered by ``i`` unit-gain transmitters with i.i.d.
    uniform phases, for the counts that admit a closed form.

    i=0 gives 0, i=1 gives log2(1 + snr) exactly, and i=2 reduces by rotation
    invariance to the ring average at equal magnitudes sqrt(snr):
    log2((1 + 2 snr + sqrt(1 + 4 snr)) / 2).  Larger counts have no closed
    form; use the Monte Carlo estimator and own the accuracy/runtime
    tradeoff explicitly.
    """
    if i < 0:
        raise ValueError(f"count must be >= 0, got {i}")
    if i == 0:
        return 0.0
    if i == 1:
        return math.log2(1.0 + snr)
    if i == 2:
        return math.log2(0.5 * (1.0 + 2.0 * snr + math.sqrt(1.0 + 4.0 * snr)))
    raise ValueError(
        f"no closed form for {i} superposed phases; use schemes.rbar_mc"
    )


def async_effective_snr(i, snr: float):
    """Large-grid limit of the per-symbol SNR seen by ``i`` non-blocked
    transmitters under maximally off-grid sampling:
    i*snr/4 + (sqrt(1 + i*snr) - 1)/2.

    Always at least i*snr/4, i.e. the off-grid loss is bounded by 6.02 dB.
    Accepts scalar or array counts.
    """
    if not snr > 0.0:
        raise ValueError(f"snr must be positive, got {snr}")
    counts = np.asarray(i, dtype=float)
    if np.any(counts < 0):
        raise ValueError("counts must be non-negative")
    val = counts * snr / 4.0 + 0.5 * (np.sqrt(1.0 + counts * snr) - 1.0)
    return float(val) if np.isscalar(i) else val


def async_capacity_limit(n_tx: int, blockage_prob: float, snr: float) -> float:
    """Large-grid limit of the worst-case ergodic rate: the synchronous
    capacity formula with the off-grid effective SNR in place of alpha*snr."""
    pmf = alpha_pmf(n_tx, blockage_prob)
    counts = np.arange(n_tx + 1)
    return float(pmf @ np.log2(1.0 + async_effective_snr(counts, snr)))


def async_outage_limit(n_tx: int, blockage_prob: float, snr: float) -> OutageSolution:
    """Large-grid limit of the worst-case outage rate; mirrors the
    synchronous outage maximization with the off-grid effective SNR."""
    ccdf = alpha_ccdf(n_tx, blockage_prob)
    counts = np.arange(1, n_tx + 1)
    candidates = ccdf[1:] * np.log2(1.0 + async_effective_snr(counts, snr))
    best = int(np.argmax(candidates))
    return OutageSolution(float(candidates[best]), best + 1)
