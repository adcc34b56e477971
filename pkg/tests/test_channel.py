"""Channel sampling against the exact blockage-count distribution."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from macrodiv.channel import (
    BlockageParams,
    ChannelConfig,
    ChannelState,
    RngStream,
    alpha_ccdf,
    alpha_pmf,
    effective_scalar_channel,
    sample_states,
    sample_stationary_state,
    stationary_blockage_prob,
    step_blockage,
)


def enum_alpha_pmf(n_tx, p_b):
    """Brute-force oracle: enumerate every blockage pattern."""
    pmf = np.zeros(n_tx + 1)
    for pattern in itertools.product((0, 1), repeat=n_tx):
        prob = math.prod((1.0 - p_b) if b else p_b for b in pattern)
        pmf[sum(pattern)] += prob
    return pmf


class TestBlockageParams:
    @pytest.mark.parametrize(
        "p,q,expected", [(0.2, 0.2, 0.5), (0.1, 0.9, 0.1), (0.3, 0.1, 0.75)]
    )
    def test_stationary_prob(self, p, q, expected):
        assert stationary_blockage_prob(BlockageParams(p, q)) == pytest.approx(
            expected, abs=1e-15
        )

    @pytest.mark.parametrize("p,q", [(0.0, 0.5), (0.5, 0.0), (1.0, 0.5), (0.5, 1.0), (-0.1, 0.5)])
    def test_rejects_degenerate_chains(self, p, q):
        with pytest.raises(ValueError):
            BlockageParams(p, q)

    def test_from_blockage_prob(self):
        params = BlockageParams.from_blockage_prob(0.3)
        assert params.blockage_prob == pytest.approx(0.3, abs=1e-15)
        slow = BlockageParams.from_blockage_prob(0.3, churn=0.05)
        assert slow.blockage_prob == pytest.approx(0.3, abs=1e-15)
        assert slow.p == pytest.approx(0.015)


class TestAlphaDistribution:
    def test_pmf_examples(self):
        assert alpha_pmf(2, 0.5) == pytest.approx([0.25, 0.5, 0.25], abs=1e-15)
        assert alpha_pmf(1, 0.3) == pytest.approx([0.3, 0.7], abs=1e-15)
        assert alpha_pmf(3, 0.2) == pytest.approx(
            [0.008, 0.096, 0.384, 0.512], abs=1e-15
        )

    def test_pmf_matches_enumeration(self):
        for n_tx, p_b in [(1, 0.3), (3, 0.2), (5, 0.77), (8, 0.01)]:
            assert alpha_pmf(n_tx, p_b) == pytest.approx(
                enum_alpha_pmf(n_tx, p_b), abs=1e-14
            )

    @given(
        st.integers(min_value=1, max_value=30),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_pmf_normalized(self, n_tx, p_b):
        assert abs(alpha_pmf(n_tx, p_b).sum() - 1.0) < 1e-12

    def test_ccdf_examples(self):
        assert alpha_ccdf(2, 0.5) == pytest.approx([1.0, 0.75, 0.25], abs=1e-15)
        assert alpha_ccdf(1, 0.3) == pytest.approx([1.0, 0.7], abs=1e-15)
        assert alpha_ccdf(3, 0.2) == pytest.approx(
            [1.0, 0.992, 0.896, 0.512], abs=1e-14
        )

    @given(
        st.integers(min_value=1, max_value=30),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_ccdf_structure(self, n_tx, p_b):
        ccdf = alpha_ccdf(n_tx, p_b)
        assert ccdf[0] == 1.0
        assert ccdf[1] == pytest.approx(1.0 - p_b**n_tx, abs=1e-12)
        assert np.all(np.diff(ccdf) <= 1e-15)


class TestSampling:
    def test_stationary_alpha_histogram(self):
        # chi-square of the sampled blockage-count histogram at 1e-3
        cfg = ChannelConfig(4, 1.0, BlockageParams(0.3, 0.45))
        beta, theta = sample_states(RngStream(11).generator(), cfg, 1_000_000)
        counts = np.bincount(beta.sum(axis=1), minlength=5)
        expected = alpha_pmf(4, cfg.blockage_prob) * counts.sum()
        result = stats.chisquare(counts, expected)
        assert result.pvalue > 1e-3
        assert np.all(theta >= 0.0) and np.all(theta < 2.0 * np.pi)

    def test_phase_uniformity(self):
        cfg = ChannelConfig(2, 1.0, BlockageParams(0.5, 0.5))
        _, theta = sample_states(RngStream(12).generator(), cfg, 200_000)
        result = stats.kstest(theta.ravel() / (2.0 * np.pi), "uniform")
        assert result.pvalue > 1e-3

    def test_state_shape_and_invariants(self):
        cfg = ChannelConfig(6, 2.0, BlockageParams(0.4, 0.2))
        state = sample_stationary_state(RngStream(5), cfg)
        assert state.n_tx == 6
        assert 0 <= state.alpha <= 6
        assert np.all((state.beta == 0) | (state.beta == 1))

    def test_determinism(self):
        cfg = ChannelConfig(3, 1.0, BlockageParams(0.2, 0.3))
        a = sample_states(RngStream(9, 4).generator(), cfg, 1000)
        b = sample_states(RngStream(9, 4).generator(), cfg, 1000)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        c = sample_states(RngStream(9, 5).generator(), cfg, 1000)
        assert not np.array_equal(a[1], c[1])

    def test_counter_blocks_disjoint(self):
        stream = RngStream(3)
        x = stream.generator(block=0).random(100)
        y = stream.generator(block=1).random(100)
        assert not np.array_equal(x, y)
        assert np.array_equal(y, stream.generator(block=1).random(100))


class TestMarkovStepping:
    def test_frozen_chain_limit(self):
        params = BlockageParams(1e-12, 1e-12)
        beta = np.array([1, 0, 1, 1, 0, 0, 1, 0])
        gen = RngStream(21).generator()
        for _ in range(10):
            beta_next = step_blockage(gen, beta, params)
            assert np.array_equal(beta_next, beta)
            beta = beta_next

    def test_long_run_blockage_fraction_iid(self):
        # p + q = 1 makes the chain memoryless, so the binomial CI is exact
        params = BlockageParams(0.3, 0.7)
        gen = RngStream(22).generator()
        width, n_steps = 100, 10_000
        beta = (gen.random(width) < 0.7).astype(np.int8)
        blocked = 0
        for _ in range(n_steps):
            beta = step_blockage(gen, beta, params)
            blocked += int((beta == 0).sum())
        n = width * n_steps
        frac = blocked / n
        se = math.sqrt(0.3 * 0.7 / n)
        assert abs(frac - 0.3) < 4.0 * se

    def test_long_run_blockage_fraction_correlated(self):
        # autocorrelated chain: occupancy variance inflated by (1+rho)/(1-rho)
        params = BlockageParams(0.1, 0.15)
        p_b = params.blockage_prob
        rho = 1.0 - params.p - params.q
        gen = RngStream(23).generator()
        width, n_steps = 200, 10_000
        beta = (gen.random(width) < 1.0 - p_b).astype(np.int8)
        blocked = 0
        for _ in range(n_steps):
            beta = step_blockage(gen, beta, params)
            blocked += int((beta == 0).sum())
        n = width * n_steps
        frac = blocked / n
        se = math.sqrt(p_b * (1.0 - p_b) * (1.0 + rho) / (1.0 - rho) / n)
        assert abs(frac - p_b) < 4.0 * se

    def test_transition_frequencies(self):
        params = BlockageParams(0.25, 0.4)
        gen = RngStream(24).generator()
        width, n_steps = 100, 10_000
        beta = (gen.random(width) < 0.5).astype(np.int8)
        on_total = off_total = on_to_off = off_to_on = 0
        for _ in range(n_steps):
            nxt = step_blockage(gen, beta, params)
            on = beta == 1
            on_total += int(on.sum())
            off_total += int((~on).sum())
            on_to_off += int((on & (nxt == 0)).sum())
            off_to_on += int((~on & (nxt == 1)).sum())
            beta = nxt
        p_hat = on_to_off / on_total
        q_hat = off_to_on / off_total
        assert abs(p_hat - 0.25) < 4.0 * math.sqrt(0.25 * 0.75 / on_total)
        assert abs(q_hat - 0.4) < 4.0 * math.sqrt(0.4 * 0.6 / off_total)


class TestEffectiveChannel:
    def test_examples(self):
        zero = effective_scalar_channel(ChannelState([0, 0], [0.1, 0.2]))
        assert zero == 0
        unit_imag = effective_scalar_channel(
            ChannelState([1, 0], [np.pi / 2, 1.0])
        )
        assert unit_imag == pytest.approx(1j, abs=1e-12)
        destructive = effective_scalar_channel(ChannelState([1, 1], [0.0, np.pi]))
        assert abs(destructive) < 1e-12

    @given(
        st.integers(min_value=1, max_value=8),
        st.randoms(use_true_random=False),
    )
    @settings(max_examples=200)
    def test_magnitude_bounded_by_alpha(self, n_tx, rnd):
        beta = np.array([rnd.randint(0, 1) for _ in range(n_tx)])
        theta = np.array([rnd.uniform(0.0, 2.0 * np.pi) for _ in range(n_tx)])
        # keep theta strictly inside [0, 2*pi)
        theta = np.minimum(theta, np.nextafter(2.0 * np.pi, 0.0))
        state = ChannelState(beta, theta)
        assert abs(effective_scalar_channel(state)) <= state.alpha + 1e-12

    def test_equality_iff_aligned(self):
        aligned = ChannelState([1, 1, 1], [0.7, 0.7, 0.7])
        assert abs(effective_scalar_channel(aligned)) == pytest.approx(3.0, abs=1e-12)
        skewed = ChannelState([1, 1, 1], [0.7, 0.7, 0.9])
        assert abs(effective_scalar_channel(skewed)) < 3.0 - 1e-6


class TestValidation:
    def test_channel_config(self):
        blockage = BlockageParams(0.5, 0.5)
        with pytest.raises(ValueError):
            ChannelConfig(0, 1.0, blockage)
        with pytest.raises(ValueError):
            ChannelConfig(2, 0.0, blockage)
        with pytest.raises(ValueError):
            ChannelConfig(2, 1.0, blockage, block_len=0)

    def test_channel_state(self):
        with pytest.raises(ValueError):
            ChannelState([0, 2], [0.0, 0.0])
        with pytest.raises(ValueError):
            ChannelState([0, 1], [0.0, 7.0])
        with pytest.raises(ValueError):
            ChannelState([0, 1], [0.0])
