"""Worst-case rate analysis under coarse time synchronization.

Residual per-transmitter delays split into integer sample offsets, absorbed
by the cyclic prefix, and fractional offsets that tilt each subcarrier's
gain through the triangular pulse autocorrelation.  The fractional gain
|G(delta, k)|^2 is an upward parabola in delta with its minimum at 1/2, so
the worst case over all delays is completely off-grid sampling: every
subcarrier SNR scaled by (1 + cos(2*pi*k/K))/2.  This module evaluates the
resulting finite-grid rates, their large-grid limits, arbitrary-delay rates
for numerical minimizer checks, and the concentration behaviour of the
frequency-domain phase-rotation scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import alpha_ccdf, alpha_pmf, as_stream
from .closed_forms import (
    OutageSolution,
    async_effective_snr,
    ergodic_capacity,
    ring_expectation,
)
from .schemes import RateEstimate, _chunk_size, _reduce_mean

__all__ = [
    "OfdmConfig",
    "DelayProfile",
    "WorstCaseDeltaReport",
    "HoeffdingReport",
    "pulse_autocorr",
    "subcarrier_gain",
    "worst_case_capacity",
    "worst_case_outage",
    "ncjt_async_ergodic",
    "rate_at_delays",
    "verify_worst_case_delta",
    "async_phase_div_outage",
    "hoeffding_check",
]

# exact blockage-pattern enumeration is used up to this many transmitters
_EXACT_MAX_TX = 12


@dataclass(frozen=True)
class OfdmConfig:
    """OFDM grid of ``n_subcarriers`` data tones and a cyclic prefix of
    ``cp_len`` samples, sized to absorb residual delays up to ``tau_max``
    symbols (cp_len >= ceil(tau_max) + 1)."""

    n_subcarriers: int
    cp_len: int
    tau_max: float = 0.0

    def __post_init__(self):
        if self.n_subcarriers < 2:
            raise ValueError(f"need at least 2 subcarriers, got {self.n_subcarriers}")
        if self.tau_max < 0.0:
            raise ValueError(f"tau_max must be >= 0, got {self.tau_max}")
        if self.cp_len < math.ceil(self.tau_max) + 1:
            raise ValueError(
                f"cyclic prefix of {self.cp_len} cannot absorb delays up to "
                f"{self.tau_max} (need ceil(tau_max) + 1)"
            )

    @property
    def overhead(self) -> float:
        """Useful fraction of each OFDM symbol, K/(K+D)."""
        return self.n_subcarriers / (self.n_subcarriers + self.cp_len)


@dataclass(frozen=True)
class DelayProfile:
    """Per-transmitter residual delays tau_l = d_l + delta_l with integer
    sample offsets d_l and fractional parts delta_l in [0, 1)."""

    tau: np.ndarray

    def __post_init__(self):
        tau = np.atleast_1d(np.asarray(self.tau, dtype=float))
        if tau.ndim != 1:
            raise ValueError("tau must be a 1-d array")
        if np.any(tau < 0.0):
            raise ValueError("delays must be non-negative")
        object.__setattr__(self, "tau", tau)

    @property
    def n_tx(self) -> int:
        return self.tau.size

    @property
    def integer_parts(self) -> np.ndarray:
        return np.floor(self.tau).astype(int)

    @property
    def fractional_parts(self) -> np.ndarray:
        return self.tau - np.floor(self.tau)


def pulse_autocorr(x):
    """Triangular autocorrelation of the square pulse through its matched
    filter: 1 - |x| on (-1, 1), zero outside."""
    return np.maximum(0.0, 1.0 - np.abs(np.asarray(x, dtype=float)))


def subcarrier_gain(delta: float, k, n_subcarriers: int):
    """Frequency response of a pure fractional delay ``delta`` on subcarrier
    ``k``: (1 - delta) + delta * exp(-2j*pi*k/K).

    Subcarrier 0 always has unit gain; for delta = 1/2 the gain magnitude
    squared is (1 + cos(2*pi*k/K))/2, vanishing at the band edge.
    """
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    k = np.asarray(k)
    if np.any(k < 0) or np.any(k >= n_subcarriers):
        raise ValueError("subcarrier index out of range")
    val = (1.0 - delta) + delta * np.exp(-2j * np.pi * k / n_subcarriers)
    return complex(val) if val.ndim == 0 else val


def _offgrid_snrs(ofdm: OfdmConfig, snr: float) -> np.ndarray:
    """Per-subcarrier effective SNR under completely off-grid sampling."""
    k = np.arange(ofdm.n_subcarriers)
    return snr * 0.5 * (1.0 + np.cos(2.0 * np.pi * k / ofdm.n_subcarriers))


def worst_case_capacity(
    n_tx: int, blockage_prob: float, snr: float, ofdm: OfdmConfig
) -> float:
    """Worst-case (over residual delays) ergodic rate of per-subcarrier
    capacity-achieving signaling, attained at all-half fractional delays.

    Converges to the large-grid limit ``async_capacity_limit`` as the
    subcarrier count grows with the prefix length fixed.
    """
    pmf = alpha_pmf(n_tx, blockage_prob)
    counts = np.arange(n_tx + 1)
    per_k = np.log2(1.0 + np.outer(counts, _offgrid_snrs(ofdm, snr)))
    total = ofdm.n_subcarriers + ofdm.cp_len
    return float(pmf @ per_k.sum(axis=1)) / total


def worst_case_outage(
    n_tx: int, blockage_prob: float, snr: float, ofdm: OfdmConfig
) -> OutageSolution:
    """Worst-case outage rate of the fixed-rate per-subcarrier scheme;
    mirrors the synchronous outage maximization with off-grid subcarrier
    SNRs, ties toward the smaller count."""
    ccdf = alpha_ccdf(n_tx, blockage_prob)
    counts = np.arange(1, n_tx + 1)
    per_k = np.log2(1.0 + np.outer(counts, _offgrid_snrs(ofdm, snr)))
    total = ofdm.n_subcarriers + ofdm.cp_len
    candidates = ccdf[1:] * per_k.sum(axis=1) / total
    best = int(np.argmax(candidates))
    return OutageSolution(float(candidates[best]), best + 1)


def _sample_blocks(gen, n: int, n_tx: int, blockage_prob: float):
    beta = (gen.random((n, n_tx)) < 1.0 - blockage_prob).astype(np.int8)
    theta = gen.uniform(0.0, 2.0 * np.pi, size=(n, n_tx))
    return beta, theta


def ncjt_async_ergodic(
    n_tx: int,
    blockage_prob: float,
    snr: float,
    ofdm: OfdmConfig,
    n: int,
    rng,
    limit: bool = False,
) -> RateEstimate:
    """Worst-case ergodic rate of non-coherent joint transmission, by Monte
    Carlo over the superposed channel and an exact sum over subcarriers.

    ``limit=True`` evaluates the large-grid expression instead, with the
    squared channel magnitude taking the place of the blockage count in the
    off-grid effective SNR.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    stream = as_stream(rng)
    snrs = _offgrid_snrs(ofdm, snr)
    total = ofdm.n_subcarriers + ofdm.cp_len
    chunk = _chunk_size(1 if limit else ofdm.n_subcarriers)
    sums, sqs = [], []
    for block, start in enumerate(range(0, n, chunk)):
        gen = stream.generator(block=block)
        m = min(chunk, n - start)
        beta, theta = _sample_blocks(gen, m, n_tx, blockage_prob)
        h = (beta * np.exp(1j * theta)).sum(axis=1)
        gain = h.real**2 + h.imag**2
        if limit:
            # the limit formula holds with the squared channel magnitude in
            # place of the blockage count
            vals = np.log2(1.0 + async_effective_snr(gain, snr))
        else:
            vals = np.log2(1.0 + gain[:, None] * snrs[None, :]).sum(axis=1) / total
        sums.append(vals.sum())
        sqs.append((vals * vals).sum())
    return _reduce_mean(sums, sqs, n)


def _gain_table(delays: DelayProfile, ofdm: OfdmConfig) -> np.ndarray:
    """|G_l[k]|^2 for every transmitter and subcarrier, shape (L, K)."""
    k = np.arange(ofdm.n_subcarriers)
    rows = [
        np.abs(subcarrier_gain(float(d), k, ofdm.n_subcarriers)) ** 2
        for d in delays.fractional_parts
    ]
    return np.stack(rows)


def rate_at_delays(
    scheme: str,
    delays,
    n_tx: int,
    blockage_prob: float,
    snr: float,
    ofdm: OfdmConfig,
    n: int = 0,
    rng=None,
) -> RateEstimate:
    """Ergodic rate at one specific residual-delay vector, for numerical
    minimizer searches.

    ``scheme`` is one of "capacity" (per-subcarrier capacity-achieving),
    "ncjt", or "ncjt_pd" (joint transmission without/with frequency-domain
    phase rotations).  The capacity scheme depends on the delays only
    through their fractional parts and is evaluated exactly for up to
    {max_tx} transmitters by enumerating blockage patterns; the joint
    schemes are sampled with ``n`` Monte Carlo trials from ``rng``.
    """
    if scheme not in ("capacity", "ncjt", "ncjt_pd"):
        raise ValueError(f"unknown scheme {scheme!r}")
    profile = delays if isinstance(delays, DelayProfile) else DelayProfile(np.asarray(delays))
    if profile.n_tx != n_tx:
        raise ValueError(f"need one delay per transmitter, got {profile.n_tx}")
    if np.any(profile.tau > ofdm.tau_max):
        raise ValueError(f"delays exceed tau_max = {ofdm.tau_max}")
    total = ofdm.n_subcarriers + ofdm.cp_len
    gains = _gain_table(profile, ofdm)

    if scheme == "capacity":
        if n_tx <= _EXACT_MAX_TX:
            masks = (np.arange(1 << n_tx)[:, None] >> np.arange(n_tx)) & 1
            weights = np.prod(
                np.where(masks == 1, 1.0 - blockage_prob, blockage_prob), axis=1
            )
            acc = 0.0
            step = max(1, (1 << 22) // ofdm.n_subcarriers)
            for start in range(0, masks.shape[0], step):
                blk = slice(start, start + step)
                sub_gain = masks[blk].astype(float) @ gains
                acc += float(
                    weights[blk] @ np.log2(1.0 + sub_gain * snr).sum(axis=1)
                )
            return RateEstimate(acc / total, 0.0, 0)
        if n < 1:
            raise ValueError(f"Monte Carlo fallback for n_tx > {_EXACT_MAX_TX} needs n >= 1")
        stream = as_stream(rng)
        chunk = _chunk_size(ofdm.n_subcarriers)
        sums, sqs = [], []
        for block, start in enumerate(range(0, n, chunk)):
            gen = stream.generator(block=block)
            m = min(chunk, n - start)
            beta, _ = _sample_blocks(gen, m, n_tx, blockage_prob)
            sub_gain = beta.astype(float) @ gains
            vals = np.log2(1.0 + sub_gain * snr).sum(axis=1) / total
            sums.append(vals.sum())
            sqs.append((vals * vals).sum())
        return _reduce_mean(sums, sqs, n)

    if n < 1:
        raise ValueError("joint-transmission schemes need n >= 1 Monte Carlo trials")
    stream = as_stream(rng)
    k = np.arange(ofdm.n_subcarriers)
    base = np.exp(
        -2j
        * np.pi
        * np.outer(profile.integer_parts, k)
        / ofdm.n_subcarriers
    ) * np.stack(
        [
            subcarrier_gain(float(d), k, ofdm.n_subcarriers)
            for d in profile.fractional_parts
        ]
    )
    chunk = _chunk_size(n_tx * ofdm.n_subcarriers)
    sums, sqs = [], []
    for block, start in enumerate(range(0, n, chunk)):
        gen = stream.generator(block=block)
        m = min(chunk, n - start)
        beta, theta = _sample_blocks(gen, m, n_tx, blockage_prob)
        amp = beta * np.exp(1j * theta)
        if scheme == "ncjt_pd":
            phi = gen.uniform(
                0.0, 2.0 * np.pi, size=(m, n_tx, ofdm.n_subcarriers)
            )
            h = (amp[:, :, None] * base[None, :, :] * np.exp(1j * phi)).sum(axis=1)
        else:
            h = amp @ base
        vals = np.log2(1.0 + (h.real**2 + h.imag**2) * snr).sum(axis=1) / total
        sums.append(vals.sum())
        sqs.append((vals * vals).sum())
    return _reduce_mean(sums, sqs, n)


rate_at_delays.__doc__ = rate_at_delays.__doc__.format(max_tx=_EXACT_MAX_TX)


@dataclass(frozen=True)
class WorstCaseDeltaReport:
    """Grid search of the capacity-scheme rate over fractional delays."""

    grid: np.ndarray
    rates: np.ndarray
    argmin_tau: tuple
    min_rate: float
    worst_case_rate: float
    on_grid_rate: float
    sync_scaled_rate: float
    min_at_half: bool
    min_matches_worst_case: bool


def verify_worst_case_delta(
    n_tx: int,
    blockage_prob: float,
    snr: float,
    ofdm: OfdmConfig,
    grid_resolution: int,
) -> WorstCaseDeltaReport:
    """Confirm numerically that all-half fractional delays minimize the
    capacity-scheme rate.

    Evaluates the exact rate on the product grid {0, 1/R, ..., (R-1)/R} per
    transmitter and reports whether the minimizer sits within half a grid
    step of 1/2 in every coordinate and whether the grid minimum matches the
    closed-form worst case up to the parabola's resolution-limited gap.
    Also reports the zero-delay rate, which must equal the synchronous
    capacity scaled by the prefix overhead.
    """
    if grid_resolution < 3:
        raise ValueError(f"grid_resolution must be >= 3, got {grid_resolution}")
    if ofdm.tau_max < (grid_resolution - 1) / grid_resolution:
        raise ValueError("ofdm.tau_max must cover the delay grid [0, 1)")
    grid = np.arange(grid_resolution) / grid_resolution
    shape = (grid_resolution,) * n_tx
    rates = np.empty(shape)
    for idx in np.ndindex(shape):
        tau = grid[list(idx)]
        rates[idx] = rate_at_delays(
            "capacity", tau, n_tx, blockage_prob, snr, ofdm
        ).mean
    flat_argmin = int(np.argmin(rates))
    idx_min = np.unravel_index(flat_argmin, shape)
    argmin_tau = tuple(float(grid[j]) for j in idx_min)
    min_rate = float(rates[idx_min])
    worst = worst_case_capacity(n_tx, blockage_prob, snr, ofdm)
    on_grid = float(rates[(0,) * n_tx])
    sync_scaled = ofdm.overhead * ergodic_capacity(n_tx, blockage_prob, snr)
    half_step = 0.5 / grid_resolution
    min_at_half = all(abs(t - 0.5) <= half_step + 1e-12 for t in argmin_tau)
    # |G|^2 is a parabola in delta with curvature at most 8, so a grid that
    # misses 1/2 by eps can overshoot the true minimum rate by at most
    # n_tx * snr * 4 * eps^2 / ln 2 bits
    value_tol = n_tx * snr * 4.0 * half_step**2 / math.log(2.0) + 1e-9
    min_matches = 0.0 <= min_rate - worst <= value_tol
    return WorstCaseDeltaReport(
        grid=grid,
        rates=rates,
        argmin_tau=argmin_tau,
        min_rate=min_rate,
        worst_case_rate=worst,
        on_grid_rate=on_grid,
        sync_scaled_rate=sync_scaled,
        min_at_half=min_at_half,
        min_matches_worst_case=bool(min_matches),
    )


def async_phase_div_outage(
    n_tx: int,
    blockage_prob: float,
    snr: float,
    ofdm: OfdmConfig,
    n: int,
    rng,
    limit: bool = False,
    rao_blackwell: bool = True,
) -> OutageSolution:
    """Worst-case asymptotic outage rate of joint transmission with
    frequency-domain phase rotations.

    For each possible count of non-blocked transmitters the subcarrier-
    averaged mean rate under off-grid sampling is estimated by Monte Carlo
    (with the last phase integrated in closed form unless ``rao_blackwell``
    is disabled), then weighted by the count's exceedance probability and
    maximized.  ``limit=True`` evaluates the large-grid expression with the
    off-grid effective SNR applied to the squared phase-sum magnitude.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    stream = as_stream(rng)
    snrs = _offgrid_snrs(ofdm, snr)
    root_snrs = np.sqrt(snrs)
    total = ofdm.n_subcarriers + ofdm.cp_len
    ccdf = alpha_ccdf(n_tx, blockage_prob)
    chunk = _chunk_size(1 if limit else ofdm.n_subcarriers)
    candidates = np.empty(n_tx)
    for i in range(1, n_tx + 1):
        sums = []
        for block, start in enumerate(range(0, n, chunk)):
            gen = stream.generator(block=i << 32 | block)
            m = min(chunk, n - start)
            if limit:
                theta = gen.uniform(0.0, 2.0 * np.pi, size=(m, i))
                s = np.exp(1j * theta).sum(axis=1)
                gain = s.real**2 + s.imag**2
                vals = np.log2(1.0 + async_effective_snr(gain, snr))
            elif rao_blackwell:
                if i == 1:
                    partial = np.zeros(m)
                else:
                    theta = gen.uniform(0.0, 2.0 * np.pi, size=(m, i - 1))
                    partial = np.abs(np.exp(1j * theta).sum(axis=1))
                per_k = ring_expectation(
                    partial[:, None] * root_snrs[None, :], root_snrs[None, :]
                )
                vals = per_k.sum(axis=1) / total
            else:
                theta = gen.uniform(0.0, 2.0 * np.pi, size=(m, i))
                s = np.exp(1j * theta).sum(axis=1)
                gain = s.real**2 + s.imag**2
                vals = np.log2(1.0 + gain[:, None] * snrs[None, :]).sum(axis=1) / total
            sums.append(vals.sum())
        candidates[i - 1] = ccdf[i] * (math.fsum(sums) / n)
    best = int(np.argmax(candidates))
    return OutageSolution(float(candidates[best]), best + 1)


@dataclass(frozen=True)
class HoeffdingReport:
    """Empirical concentration of the subcarrier-averaged instantaneous rate
    against the bounded-differences tail bound."""

    subcarrier_counts: tuple
    thresholds: tuple
    deviation_freq: np.ndarray
    bound: np.ndarray
    n_blocks: int
    n_phase_draws: int

    @property
    def within_bound(self) -> bool:
        return bool(np.all(self.deviation_freq <= self.bound))


def hoeffding_check(
    n_tx: int,
    blockage_prob: float,
    snr: float,
    ofdm: OfdmConfig,
    n_blocks: int,
    rng,
    n_phase_draws: int = 10_000,
    thresholds=(0.1, 0.2, 0.5),
    subcarrier_counts=(16, 64, 256),
    n_ref: int = 50_000,
) -> HoeffdingReport:
    """Measure how often the subcarrier-averaged rate of the phase-rotation
    scheme deviates from its conditional mean, and compare against
    2*exp(-2*K*eps^2 / log2(1+n_tx^2*snr)^2).

    For each block a blockage pattern is drawn and held fixed while the
    shared per-subcarrier rotations are redrawn ``n_phase_draws`` times at
    completely off-grid fractional delays.  The conditional means are
    precomputed per blockage count with the closed-form last-phase average.
    """
    if n_blocks < 1:
        raise ValueError(f"n_blocks must be >= 1, got {n_blocks}")
    stream = as_stream(rng)
    eps = np.asarray(thresholds, dtype=float)
    log_span = math.log2(1.0 + n_tx**2 * snr)
    freq = np.zeros((len(subcarrier_counts), eps.size))
    bound = np.empty_like(freq)
    for ki, n_sub in enumerate(subcarrier_counts):
        grid = OfdmConfig(n_sub, ofdm.cp_len, ofdm.tau_max)
        snrs = _offgrid_snrs(grid, snr)
        root_snrs = np.sqrt(snrs)
        total = n_sub + grid.cp_len
        bound[ki] = np.minimum(1.0, 2.0 * np.exp(-2.0 * n_sub * eps**2 / log_span**2))
        ref = np.zeros(n_tx + 1)
        for i in range(1, n_tx + 1):
            gen = stream.generator(block=(ki + 1) << 32 | i)
            if i == 1:
                ref[i] = float(np.log2(1.0 + snrs).sum()) / total
                continue
            acc = []
            step = _chunk_size(n_sub)
            for start in range(0, n_ref, step):
                m = min(step, n_ref - start)
                theta = gen.uniform(0.0, 2.0 * np.pi, size=(m, i - 1))
                partial = np.abs(np.exp(1j * theta).sum(axis=1))
                per_k = ring_expectation(
                    partial[:, None] * root_snrs[None, :], root_snrs[None, :]
                )
                acc.append(per_k.sum() / total)
            ref[i] = math.fsum(acc) / n_ref
        counts = np.zeros(eps.size)
        for b in range(n_blocks):
            gen = stream.generator(block=(ki + 1) << 48 | b)
            alpha = int((gen.random(n_tx) < 1.0 - blockage_prob).sum())
            if alpha == 0:
                continue  # zero rate, zero deviation
            step = max(1, _chunk_size(alpha * n_sub))
            for start in range(0, n_phase_draws, step):
                m = min(step, n_phase_draws - start)
                # block phases plus shared rotations are jointly uniform
                psi = gen.uniform(0.0, 2.0 * np.pi, size=(m, alpha, n_sub))
                s = np.exp(1j * psi).sum(axis=1)
                rates = np.log2(1.0 + (s.real**2 + s.imag**2) * snrs[None, :])
                avg = rates.sum(axis=1) / total
                dev = np.abs(avg - ref[alpha])
                counts += (dev[:, None] >= eps[None, :]).sum(axis=0)
        freq[ki] = counts / (n_blocks * n_phase_draws)
    return HoeffdingReport(
        subcarrier_counts=tuple(subcarrier_counts),
        thresholds=tuple(thresholds),
        deviation_freq=freq,
        bound=bound,
        n_blocks=n_blocks,
        n_phase_draws=n_phase_draws,
    )
