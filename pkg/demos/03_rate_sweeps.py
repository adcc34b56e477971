"""Ergodic and outage rate sweeps across the operating space.

Reproduces the figure-style comparisons: ergodic rates for every scheme
(selection schemes included) and outage rates for the fixed-rate schemes,
against blockage probability, SNR, and transmitter count.  Closed-form
schemes are exact; the joint-transmission schemes are seeded Monte Carlo.
Trial counts are kept small for a quick run; raise them (or use the CLI)
for publication-quality data.
"""

from pathlib import Path

from macrodiv import SweepConfig, emit, run_sweep

ERGODIC_SCHEMES = (
    "capacity",
    "transmitter_selection",
    "ncjt",
    "phase_diversity",
    "two_tx_selection",
    "ncja",
)
OUTAGE_SCHEMES = ("capacity", "ncjt", "phase_diversity", "ncja")

AXES = {
    "p_B": dict(axis_values=(0.05, 0.1, 0.2, 0.3, 0.4, 0.5)),
    "snr_db": dict(axis_values=(-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0)),
    "L": dict(axis_values=(2, 4, 8, 16)),
}


def show(rows, axis, metric):
    values = sorted({r.axis_value for r in rows})
    schemes = sorted({r.scheme for r in rows})
    table = {(r.axis_value, r.scheme): r.rate_bits for r in rows}
    print(f"\n{metric} rate vs {axis}:")
    print(f"{axis:>8} " + " ".join(f"{s[:14]:>15}" for s in schemes))
    for v in values:
        cells = [f"{table[(v, s)]:>15.4f}" for s in schemes]
        print(f"{v:>8} " + " ".join(cells))


def main():
    out_dir = Path("out")
    out_dir.mkdir(exist_ok=True)
    for axis, spec in AXES.items():
        for metric, schemes in (("ergodic", ERGODIC_SCHEMES), ("outage", OUTAGE_SCHEMES)):
            config = SweepConfig(
                axis=axis,
                axis_values=spec["axis_values"],
                schemes=schemes,
                n_tx=4,
                blockage_prob=0.2,
                snr_db=6.0,
                n_frames=64,
                metrics=(metric,),
                n_trials=20_000,
                seed=2026,
            )
            rows = run_sweep(config)
            path = out_dir / f"sweep_{axis}_{metric}.csv"
            emit(rows, "csv", path)
            print(f"wrote {path} ({len(rows)} rows)")
            show(rows, axis, metric)


if __name__ == "__main__":
    main()
