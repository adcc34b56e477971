"""Per-scheme instantaneous rates and seeded Monte Carlo rate estimators.

Estimators draw trials in fixed-size chunks, each chunk from its own counter
block of the caller's stream, and reduce the chunk sums with compensated
summation.  Results are therefore bit-identical no matter how the chunks
would be scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import (
    ChannelConfig,
    ChannelState,
    alpha_ccdf,
    alpha_pmf,
    as_generator,
    as_stream,
    sample_states,
)
from .closed_forms import OutageSolution, ring_expectation

__all__ = [
    "SCHEME_KINDS",
    "SchemeSpec",
    "RateEstimate",
    "InstantRateSample",
    "AlamoutiCheck",
    "inst_rate",
    "rate_samples",
    "conditional_rate_samples",
    "ergodic_estimate",
    "rbar_mc",
    "rbar2_mc",
    "outage_from_samples",
    "rbar_out",
    "alamouti_symbol_check",
    "ccdf_points",
]

SCHEME_KINDS = (
    "capacity",
    "transmitter_selection",
    "ncjt",
    "phase_diversity",
    "cyclic_delay_diversity",
    "two_tx_selection",
    "ncja",
)

# schemes whose per-block rate averages over n_frames per-frame channels
_FRAME_SCHEMES = ("phase_diversity", "cyclic_delay_diversity", "ncja")

# chunking bounds peak memory and pins the substream layout
_TARGET_CHUNK_ELEMS = 1 << 21


def _chunk_size(per_trial_elems: int) -> int:
    return max(256, _TARGET_CHUNK_ELEMS // max(1, per_trial_elems))


@dataclass(frozen=True)
class SchemeSpec:
    """Transmission scheme selector over a given channel.

    ``n_frames`` is the number of per-block frames (subcarriers) that the
    phase-rotation schemes average over; single-frame schemes ignore it.
    ``delays`` holds the per-transmitter cyclic shifts of the deterministic
    diversity variant and must lie in {0, ..., n_frames - 1}.
    """

    kind: str
    cfg: ChannelConfig
    n_frames: int = 1
    delays: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.n_frames < 1:
            raise ValueError(f"n_frames must be >= 1, got {self.n_frames}")
        n_tx = self.cfg.n_tx
        if self.kind == "ncja" and n_tx % 2 != 0:
            raise ValueError("ncja pairs the transmitters and needs an even count")
        if self.kind == "two_tx_selection" and n_tx < 2:
            raise ValueError("two_tx_selection needs at least two transmitters")
        if self.kind == "cyclic_delay_diversity":
            if self.delays is None:
                raise ValueError("cyclic_delay_diversity requires per-transmitter delays")
            delays = tuple(int(d) for d in self.delays)
            if len(delays) != n_tx:
                raise ValueError(f"need one delay per transmitter, got {len(delays)}")
            if any(not 0 <= d < self.n_frames for d in delays):
                raise ValueError("delays must lie in {0, ..., n_frames - 1}")
            object.__setattr__(self, "delays", delays)
        elif self.delays is not None:
            raise ValueError("delays are only meaningful for cyclic_delay_diversity")


@dataclass(frozen=True)
class RateEstimate:
    """Monte Carlo point estimate in bits/channel use.

    ``std_error`` is the sample standard deviation across trials divided by
    sqrt(n_trials).  ``n_trials == 0`` marks an exactly evaluated quantity.
    """

    mean: float
    std_error: float
    n_trials: int


class InstantRateSample(NamedTuple):
    """Instantaneous rate of one block together with its blockage count."""

    alpha: int
    rate: float


def _batch_rates(spec: SchemeSpec, beta, theta, gen) -> np.ndarray:
    """Instantaneous rates for a batch of block states, shape (n,)."""
    snr = spec.cfg.snr
    kind = spec.kind
    if kind == "capacity":
        return np.log2(1.0 + beta.sum(axis=1) * snr)
    if kind == "transmitter_selection":
        return np.where(beta.any(axis=1), math.log2(1.0 + snr), 0.0)
    if kind == "two_tx_selection":
        return np.log2(1.0 + np.minimum(beta.sum(axis=1), 2) * snr)
    if kind == "ncjt":
        h = (beta * np.exp(1j * theta)).sum(axis=1)
        return np.log2(1.0 + (h.real**2 + h.imag**2) * snr)

    n, n_tx = beta.shape
    n_frames = spec.n_frames
    if kind == "cyclic_delay_diversity":
        shifts = np.asarray(spec.delays, dtype=float)
        frame_phase = (
            2.0 * np.pi * np.outer(shifts, np.arange(n_frames)) / n_frames
        )
        phases = theta[:, :, None] + frame_phase[None, :, :]
    else:
        # shared pseudo-random per-frame rotations, one draw per (trial, tx, frame)
        phi = gen.uniform(0.0, 2.0 * np.pi, size=(n, n_tx, n_frames))
        phases = theta[:, :, None] + phi
    w = beta[:, :, None] * np.exp(1j * phases)
    if kind == "ncja":
        half = n_tx // 2
        c1 = w[:, :half, :].sum(axis=1)
        c2 = w[:, half:, :].sum(axis=1)
        gains = c1.real**2 + c1.imag**2 + c2.real**2 + c2.imag**2
    else:
        h = w.sum(axis=1)
        gains = h.real**2 + h.imag**2
    return np.log2(1.0 + gains * snr).mean(axis=1)


def inst_rate(spec: SchemeSpec, state: ChannelState, rng) -> InstantRateSample:
    """Instantaneous rate of the scheme for one block realization.

    The phase-rotation schemes draw their shared per-frame rotations from
    ``rng``; the deterministic schemes never touch it.
    """
    if state.n_tx != spec.cfg.n_tx:
        raise ValueError(
            f"state has {state.n_tx} transmitters, scheme expects {spec.cfg.n_tx}"
        )
    gen = as_generator(rng)
    rate = _batch_rates(spec, state.beta[None, :], state.theta[None, :], gen)[0]
    return InstantRateSample(state.alpha, float(rate))


def rate_samples(spec: SchemeSpec, n: int, rng) -> np.ndarray:
    """``n`` instantaneous rates over independent block realizations."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    stream = as_stream(rng)
    per_trial = spec.cfg.n_tx * (
        spec.n_frames if spec.kind in _FRAME_SCHEMES else 1
    )
    chunk = _chunk_size(per_trial)
    out = np.empty(n)
    for block, start in enumerate(range(0, n, chunk)):
        gen = stream.generator(block=block)
        m = min(chunk, n - start)
        beta, theta = sample_states(gen, spec.cfg, m)
        out[start : start + m] = _batch_rates(spec, beta, theta, gen)
    return out


def conditional_rate_samples(
    spec: SchemeSpec, state: ChannelState, n: int, rng
) -> np.ndarray:
    """``n`` instantaneous-rate draws with the block state held fixed.

    Only the shared per-frame rotations are redrawn, so this samples the
    conditional rate distribution given (beta, theta); schemes without
    frame randomness yield a constant vector.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if state.n_tx != spec.cfg.n_tx:
        raise ValueError(
            f"state has {state.n_tx} transmitters, scheme expects {spec.cfg.n_tx}"
        )
    stream = as_stream(rng)
    per_trial = spec.cfg.n_tx * (
        spec.n_frames if spec.kind in _FRAME_SCHEMES else 1
    )
    chunk = _chunk_size(per_trial)
    out = np.empty(n)
    for block, start in enumerate(range(0, n, chunk)):
        gen = stream.generator(block=block)
        m = min(chunk, n - start)
        beta = np.broadcast_to(state.beta, (m, state.n_tx))
        theta = np.broadcast_to(state.theta, (m, state.n_tx))
        out[start : start + m] = _batch_rates(spec, beta, theta, gen)
    return out


def _reduce_mean(chunks_sum, chunks_sq, n: int) -> RateEstimate:
    total = math.fsum(chunks_sum)
    total_sq = math.fsum(chunks_sq)
    mean = total / n
    if n > 1:
        var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    else:
        var = 0.0
    return RateEstimate(mean, math.sqrt(var / n), n)


def ergodic_estimate(
    spec: SchemeSpec, n: int, rng, stratified: bool = False
) -> RateEstimate:
    """Mean instantaneous rate over ``n`` independent blocks.

    ``stratified=True`` (ncjt only) allocates the trials across the blockage
    counts proportionally to their exact probabilities and draws only phases
    within each stratum, which removes the blockage-count variance entirely;
    useful when blockage is frequent and the zero-rate stratum dominates.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if stratified:
        return _ergodic_stratified(spec, n, rng)
    stream = as_stream(rng)
    per_trial = spec.cfg.n_tx * (
        spec.n_frames if spec.kind in _FRAME_SCHEMES else 1
    )
    chunk = _chunk_size(per_trial)
    sums, sqs = [], []
    for block, start in enumerate(range(0, n, chunk)):
        gen = stream.generator(block=block)
        m = min(chunk, n - start)
        beta, theta = sample_states(gen, spec.cfg, m)
        vals = _batch_rates(spec, beta, theta, gen)
        sums.append(vals.sum())
        sqs.append((vals * vals).sum())
    return _reduce_mean(sums, sqs, n)


def _ergodic_stratified(spec: SchemeSpec, n: int, rng) -> RateEstimate:
    if spec.kind != "ncjt":
        raise ValueError("stratified sampling is implemented for ncjt only")
    n_tx = spec.cfg.n_tx
    if n < n_tx:
        raise ValueError(f"stratified sampling needs n >= n_tx, got {n} < {n_tx}")
    pmf = alpha_pmf(n_tx, spec.cfg.blockage_prob)
    # deterministic proportional allocation; every positive-count stratum
    # keeps at least one trial so the estimate stays unbiased
    raw = pmf * n
    counts = np.floor(raw).astype(int)
    counts[1:] = np.maximum(counts[1:], 1)
    while counts.sum() > n:
        counts[int(np.argmax(counts))] -= 1
    order = np.argsort(-(raw - counts), kind="stable")
    for idx in order[: n - counts.sum()]:
        counts[idx] += 1
    stream = as_stream(rng)
    mean = 0.0
    var = 0.0
    for i in range(1, n_tx + 1):
        m = int(counts[i])
        if m == 0:
            continue
        gen = stream.generator(block=i)
        theta = gen.uniform(0.0, 2.0 * np.pi, size=(m, i))
        s = np.exp(1j * theta).sum(axis=1)
        vals = np.log2(1.0 + (s.real**2 + s.imag**2) * spec.cfg.snr)
        mean += pmf[i] * vals.mean()
        if m > 1:
            var += pmf[i] ** 2 * vals.var(ddof=1) / m
    return RateEstimate(float(mean), math.sqrt(var), n)


def rbar_mc(
    i: int, snr: float, n: int, rng, rao_blackwell: bool = False
) -> RateEstimate:
    """Monte Carlo estimate of the mean rate delivered by ``i`` unit-gain
    transmitters with i.i.d. uniform phases.

    The Rao-Blackwell variant conditions on the first i-1 phases and
    integrates the last one with the closed-form ring average, which keeps
    the estimate unbiased while never increasing the variance.
    """
    if i < 0:
        raise ValueError(f"count must be >= 0, got {i}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if i == 0:
        return RateEstimate(0.0, 0.0, n)
    if i == 1:
        # a single unit phasor has magnitude one identically
        return RateEstimate(math.log2(1.0 + snr), 0.0, n)
    stream = as_stream(rng)
    chunk = _chunk_size(i)
    root_snr = math.sqrt(snr)
    sums, sqs = [], []
    for block, start in enumerate(range(0, n, chunk)):
        gen = stream.generator(block=block)
        m = min(chunk, n - start)
        if rao_blackwell:
            theta = gen.uniform(0.0, 2.0 * np.pi, size=(m, i - 1))
            partial = np.abs(np.exp(1j * theta).sum(axis=1))
            vals = ring_expectation(partial * root_snr, root_snr)
        else:
            theta = gen.uniform(0.0, 2.0 * np.pi, size=(m, i))
            s = np.exp(1j * theta).sum(axis=1)
            vals = np.log2(1.0 + (s.real**2 + s.imag**2) * snr)
        vals = np.atleast_1d(vals)
        sums.append(vals.sum())
        sqs.append((vals * vals).sum())
    return _reduce_mean(sums, sqs, n)


def rbar2_mc(i1: int, i2: int, snr: float, n: int, rng) -> RateEstimate:
    """Monte Carlo estimate of the mean rate of two independently phased
    transmitter clusters of sizes ``i1`` and ``i2`` whose powers add."""
    if i1 < 0 or i2 < 0:
        raise ValueError("cluster sizes must be >= 0")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if i1 <= 1 and i2 <= 1:
        # single phasors have unit magnitude identically
        return RateEstimate(math.log2(1.0 + (i1 + i2) * snr), 0.0, n)
    stream = as_stream(rng)
    chunk = _chunk_size(i1 + i2)
    sums, sqs = [], []
    for block, start in enumerate(range(0, n, chunk)):
        gen = stream.generator(block=block)
        m = min(chunk, n - start)
        gain = np.zeros(m)
        for size in (i1, i2):
            if size == 0:
                continue
            theta = gen.uniform(0.0, 2.0 * np.pi, size=(m, size))
            s = np.exp(1j * theta).sum(axis=1)
            gain += s.real**2 + s.imag**2
        vals = np.log2(1.0 + gain * snr)
        sums.append(vals.sum())
        sqs.append((vals * vals).sum())
    return _reduce_mean(sums, sqs, n)


def outage_from_samples(rates) -> float:
    """Plug-in estimate of sup_r r * P(rate >= r) from i.i.d. rate samples.

    Over the empirical distribution the supremum is attained at a sample
    point, so it equals max_j r_(j) * j/n with the samples sorted in
    descending order.
    """
    r = np.asarray(rates, dtype=float)
    if r.size == 0:
        raise ValueError("need at least one rate sample")
    if np.any(r < 0.0):
        raise ValueError("rates must be non-negative")
    r = np.sort(r)[::-1]
    ranks = np.arange(1, r.size + 1)
    return float(np.max(r * (ranks / r.size)))


def rbar_out(n_tx: int, blockage_prob: float, rbar_values) -> OutageSolution:
    """Asymptotic outage rate of the phase-rotation scheme: the best
    P(alpha >= i) * rbar(i) product over i = 1..n_tx.

    ``rbar_values`` supplies the mean rate for each count i = 1..n_tx
    (closed form or Monte Carlo); ties break toward the smaller index.
    """
    vals = np.asarray(rbar_values, dtype=float)
    if vals.shape != (n_tx,):
        raise ValueError(
            f"need one mean-rate value per count 1..{n_tx}, got shape {vals.shape}"
        )
    ccdf = alpha_ccdf(n_tx, blockage_prob)
    candidates = ccdf[1:] * vals
    best = int(np.argmax(candidates))
    return OutageSolution(float(candidates[best]), best + 1)


class AlamoutiCheck(NamedTuple):
    """Measured effective channel of the symbol-level space-time simulation."""

    effective_gain: float
    residual_noise_var: float
    gain_se: float
    noise_var_se: float
    effective_snr: float
    snr_se: float
    n_symbols: int


def alamouti_symbol_check(
    state: ChannelState, snr: float, n_symbols: int, rng, pair=(0, 1), n_batches=50
) -> AlamoutiCheck:
    """Run information symbols through the two-transmitter orthogonal
    space-time code and measure the effective channel.

    Symbol pairs are encoded over two slots, passed through the blocked/
    phased channels of the chosen transmitter ``pair`` with unit-variance
    noise, linearly combined, and normalized.  Least squares over batches
    yields the effective amplitude gain (target sqrt(alpha)), the residual
    noise variance (target 1), and the effective SNR (target alpha * snr)
    with standard errors.  The SNR uses the signed square of the gain so it
    stays unbiased around zero when both links are blocked.
    """
    if state.n_tx < 2:
        raise ValueError("need at least two transmitters")
    n_pairs = n_symbols // 2
    if n_pairs < n_batches:
        raise ValueError(f"need at least {2 * n_batches} symbols")
    n_pairs -= n_pairs % n_batches
    gen = as_generator(rng)
    h1 = state.beta[pair[0]] * np.exp(1j * state.theta[pair[0]])
    h2 = state.beta[pair[1]] * np.exp(1j * state.theta[pair[1]])
    s = (
        gen.standard_normal((n_pairs, 2)) + 1j * gen.standard_normal((n_pairs, 2))
    ) * math.sqrt(snr / 2.0)
    z = (
        gen.standard_normal((n_pairs, 2)) + 1j * gen.standard_normal((n_pairs, 2))
    ) / math.sqrt(2.0)
    # slot 1 sends (s1, s2), slot 2 sends (-conj(s2), conj(s1))
    r1 = h1 * s[:, 0] + h2 * s[:, 1] + z[:, 0]
    r2 = -h1 * np.conj(s[:, 1]) + h2 * np.conj(s[:, 0]) + z[:, 1]
    combined_gain = abs(h1) ** 2 + abs(h2) ** 2
    if combined_gain > 0.0:
        scale = 1.0 / math.sqrt(combined_gain)
        y1 = (np.conj(h1) * r1 + h2 * np.conj(r2)) * scale
        y2 = (np.conj(h2) * r1 - h1 * np.conj(r2)) * scale
    else:
        # nothing transmitted reaches the receiver; the observation is raw noise
        y1, y2 = r1, r2
    y = np.column_stack([y1, y2]).reshape(n_batches, -1)
    sym = s.reshape(n_batches, -1)
    power = (sym.real**2 + sym.imag**2).sum(axis=1)
    gain_b = ((y * np.conj(sym)).sum(axis=1) / power).real
    resid = y - gain_b[:, None] * sym
    noise_b = (resid.real**2 + resid.imag**2).mean(axis=1)
    snr_b = gain_b * np.abs(gain_b) * snr / noise_b
    root_b = math.sqrt(n_batches)
    return AlamoutiCheck(
        effective_gain=float(gain_b.mean()),
        residual_noise_var=float(noise_b.mean()),
        gain_se=float(gain_b.std(ddof=1) / root_b),
        noise_var_se=float(noise_b.std(ddof=1) / root_b),
        effective_snr=float(snr_b.mean()),
        snr_se=float(snr_b.std(ddof=1) / root_b),
        n_symbols=2 * n_pairs,
    )


def ccdf_points(samples) -> np.ndarray:
    """Empirical complementary CDF at the sorted unique sample values.

    Returns an (m, 2) array of (value, P(X >= value)) pairs; the first
    probability is 1 and the sequence is non-increasing.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("need at least one sample")
    xs = np.sort(x)
    values = np.unique(xs)
    ccdf = 1.0 - np.searchsorted(xs, values, side="left") / x.size
    return np.column_stack([values, ccdf])
