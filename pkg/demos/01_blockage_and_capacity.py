"""Blockage statistics and the fundamental rate limits.

Each transmitter link is an on/off Markov chain; what the receiver cares
about is the count of currently non-blocked transmitters, which is binomial
under the stationary law.  This script samples the chain to confirm the
stationary blockage probability, then tabulates the ergodic and outage
capacity across blockage probabilities: the ergodic capacity is the area
under the instantaneous-capacity CCDF, while the outage capacity is the
largest rectangle beneath it, so the two separate as blockage grows.
"""

import numpy as np

from macrodiv import (
    BlockageParams,
    ChannelConfig,
    RngStream,
    alpha_pmf,
    ergodic_capacity,
    outage_capacity,
    sample_states,
    stationary_blockage_prob,
    step_blockage,
    ts_ergodic_rate,
)


def main():
    params = BlockageParams(p=0.12, q=0.28)
    p_b = stationary_blockage_prob(params)
    print(f"chain: p={params.p} q={params.q} -> stationary blockage {p_b:.3f}")

    gen = RngStream(2026).generator()
    beta = (gen.random(200) < 1.0 - p_b).astype(np.int8)
    blocked = 0
    n_steps = 5000
    for _ in range(n_steps):
        beta = step_blockage(gen, beta, params)
        blocked += (beta == 0).sum()
    print(f"empirical blockage over {200 * n_steps} steps: {blocked / (200 * n_steps):.4f}")

    cfg = ChannelConfig(4, snr=4.0, blockage=params)
    sampled, _ = sample_states(gen, cfg, 100_000)
    hist = np.bincount(sampled.sum(axis=1), minlength=5) / 100_000
    print("\ncount of non-blocked transmitters (L=4):")
    print("  exact    ", np.array2string(alpha_pmf(4, p_b), precision=4))
    print("  sampled  ", np.array2string(hist, precision=4))

    print("\ncapacity vs blockage probability (L=4, snr 6 dB):")
    print(f"{'p_B':>6} {'ergodic':>9} {'outage':>9} {'i*':>3} {'selection':>10}")
    snr = 10.0 ** 0.6
    for p in (0.05, 0.1, 0.2, 0.3, 0.4, 0.5):
        erg = ergodic_capacity(4, p, snr)
        out = outage_capacity(4, p, snr)
        ts = ts_ergodic_rate(4, p, snr)
        print(f"{p:>6.2f} {erg:>9.4f} {out.rate:>9.4f} {out.argmax_index:>3d} {ts:>10.4f}")


if __name__ == "__main__":
    main()
