"""Intermittent block fading channel: sampling and exact distributional facts.

Each of the L transmitter links is an independent two-state Markov chain
(connected/blocked) with a uniformly distributed phase redrawn every fading
block.  All rate analysis downstream needs only one state per block, so the
samplers here hand out i.i.d. stationary block states; the chain stepper is
provided for simulating the block-to-block dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BlockageParams",
    "ChannelConfig",
    "ChannelState",
    "RngStream",
    "as_generator",
    "as_stream",
    "stationary_blockage_prob",
    "alpha_pmf",
    "alpha_ccdf",
    "sample_stationary_state",
    "sample_states",
    "step_blockage",
    "effective_scalar_channel",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by (seed, stream_id).

    Identical (seed, stream_id) pairs reproduce identical draws, and distinct
    stream_ids give statistically independent Philox streams.  ``generator``
    can additionally be positioned at disjoint counter blocks, which is how
    the Monte Carlo estimators hand out per-chunk substreams: the substream
    layout depends only on the estimator inputs, never on how many workers
    consume the chunks.
    """

    seed: int
    stream_id: int = 0

    def generator(self, block: int = 0) -> np.random.Generator:
        """A fresh generator for this stream, jumped ahead ``block`` counter
        blocks (each block is 2**128 draws, so blocks never overlap)."""
        key = np.array(
            [self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
        )
        bitgen = np.random.Philox(key=key)
        if block:
            bitgen = bitgen.jumped(block)
        return np.random.Generator(bitgen)


def as_stream(rng) -> RngStream:
    """Coerce an RngStream or a bare integer seed to an RngStream."""
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    raise TypeError(f"expected RngStream or int seed, got {type(rng).__name__}")


def as_generator(rng) -> np.random.Generator:
    """Coerce an np.random.Generator, RngStream, or int seed to a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return as_stream(rng).generator()


@dataclass(frozen=True)
class BlockageParams:
    """Two-state Markov blockage chain for one transmitter link.

    ``p`` is the connected-to-blocked transition probability and ``q`` the
    blocked-to-connected one.  Both must lie strictly inside (0, 1): a zero
    transition probability creates an absorbing state and breaks the
    stationary distribution the rate formulas rely on.
    """

    p: float
    q: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must be in (0, 1), got {self.p}")
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must be in (0, 1), got {self.q}")

    @property
    def blockage_prob(self) -> float:
        """Stationary probability of the blocked state, p/(p+q)."""
        return self.p / (self.p + self.q)

    @classmethod
    def from_blockage_prob(cls, blockage_prob: float, churn: float = 1.0) -> "BlockageParams":
        """Chain with the given stationary blockage probability.

        ``churn`` in (0, 1] scales both transition probabilities without
        changing the stationary law; churn=1 gives the memoryless chain.
        """
        if not 0.0 < blockage_prob < 1.0:
            raise ValueError(f"blockage_prob must be in (0, 1), got {blockage_prob}")
        if not 0.0 < churn <= 1.0:
            raise ValueError(f"churn must be in (0, 1], got {churn}")
        return cls(churn * blockage_prob, churn * (1.0 - blockage_prob))


@dataclass(frozen=True)
class ChannelConfig:
    """Downlink from ``n_tx`` transmitters, each at linear SNR ``snr`` against
    unit-variance noise, with one fading state per block of ``block_len``
    symbols."""

    n_tx: int
    snr: float
    blockage: BlockageParams
    block_len: int = 1

    def __post_init__(self):
        if self.n_tx < 1:
            raise ValueError(f"n_tx must be >= 1, got {self.n_tx}")
        if not self.snr > 0.0:
            raise ValueError(f"snr must be positive, got {self.snr}")
        if self.block_len < 1:
            raise ValueError(f"block_len must be >= 1, got {self.block_len}")

    @property
    def blockage_prob(self) -> float:
        return self.blockage.blockage_prob


@dataclass(frozen=True)
class ChannelState:
    """One block-fading realization: per-transmitter blockage indicators
    ``beta`` in {0, 1} and phases ``theta`` in [0, 2*pi)."""

    beta: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.int8)
        theta = np.asarray(self.theta, dtype=float)
        if beta.ndim != 1 or beta.shape != theta.shape:
            raise ValueError("beta and theta must be 1-d arrays of equal length")
        if not np.all((beta == 0) | (beta == 1)):
            raise ValueError("beta entries must be 0 or 1")
        if np.any(theta < 0.0) or np.any(theta >= 2.0 * np.pi):
            raise ValueError("theta entries must lie in [0, 2*pi)")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "theta", theta)

    @property
    def n_tx(self) -> int:
        return self.beta.size

    @property
    def alpha(self) -> int:
        """Number of non-blocked transmitters."""
        return int(self.beta.sum())


def stationary_blockage_prob(params: BlockageParams) -> float:
    """Stationary probability p/(p+q) that a link is blocked."""
    return params.blockage_prob


def alpha_pmf(n_tx: int, blockage_prob: float) -> np.ndarray:
    """PMF of the number of non-blocked transmitters.

    With links blocked independently with probability ``blockage_prob``, the
    count is Binomial(n_tx, 1 - blockage_prob).  Returns the n_tx + 1 entries
    for counts 0..n_tx.  The boundary values 0 and 1 are accepted (degenerate
    but well-defined distributions).
    """
    if n_tx < 1:
        raise ValueError(f"n_tx must be >= 1, got {n_tx}")
    if not 0.0 <= blockage_prob <= 1.0:
        raise ValueError(f"blockage_prob must be in [0, 1], got {blockage_prob}")
    p_on = 1.0 - blockage_prob
    return np.array(
        [
            math.comb(n_tx, i) * p_on**i * blockage_prob ** (n_tx - i)
            for i in range(n_tx + 1)
        ]
    )


def alpha_ccdf(n_tx: int, blockage_prob: float) -> np.ndarray:
    """P(alpha >= i) for i = 0..n_tx; entry 0 is 1 and entry 1 is
    1 - blockage_prob**n_tx, the probability of escaping total blockage."""
    pmf = alpha_pmf(n_tx, blockage_prob)
    ccdf = np.minimum(np.cumsum(pmf[::-1])[::-1], 1.0)
    ccdf[0] = 1.0
    return ccdf


def sample_states(
    rng: np.random.Generator, cfg: ChannelConfig, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """``n`` i.i.d. stationary block states as arrays.

    Returns (beta, theta) of shapes (n, n_tx): independent Bernoulli blockage
    indicators and uniform phases.  Draw order (beta first) is part of the
    reproducibility contract.
    """
    p_on = 1.0 - cfg.blockage_prob
    beta = (rng.random((n, cfg.n_tx)) < p_on).astype(np.int8)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(n, cfg.n_tx))
    return beta, theta


def sample_stationary_state(rng, cfg: ChannelConfig) -> ChannelState:
    """Draw one stationary block state."""
    gen = as_generator(rng)
    beta, theta = sample_states(gen, cfg, 1)
    return ChannelState(beta[0], theta[0])


def step_blockage(rng, beta, params: BlockageParams) -> np.ndarray:
    """Advance a vector of blockage indicators by one Markov step.

    Each entry transitions independently: connected (1) becomes blocked with
    probability p, blocked (0) recovers with probability q.
    """
    gen = as_generator(rng)
    beta = np.asarray(beta)
    if not np.all((beta == 0) | (beta == 1)):
        raise ValueError("beta entries must be 0 or 1")
    u = gen.random(beta.shape)
    return np.where(beta == 1, u >= params.p, u < params.q).astype(np.int8)


def effective_scalar_channel(state: ChannelState) -> complex:
    """Superposed scalar channel sum(beta_l * exp(j*theta_l)); its magnitude
    never exceeds the number of non-blocked transmitters."""
    return complex(np.sum(state.beta * np.exp(1j * state.theta)))
