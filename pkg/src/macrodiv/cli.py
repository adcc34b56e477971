"""Command-line interface: capacity, sweep, ccdf, and verify subcommands.

Options can come from a flat TOML config file (``--config``), with explicit
flags taking precedence.  The default seed is taken from the MACRODIV_SEED
environment variable when set.  Exit codes: 0 success, 1 validation failure,
2 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .closed_forms import (
    async_capacity_limit,
    async_outage_limit,
    ergodic_capacity,
    outage_capacity,
    ts_ergodic_rate,
    two_tx_alamouti_rate,
)
from .experiments import (
    AXES,
    METRICS,
    ResultRow,
    SweepConfig,
    emit,
    emit_text,
    run_ccdf,
    run_sweep,
)
from .ofdm import OfdmConfig, worst_case_capacity, worst_case_outage
from .schemes import SCHEME_KINDS
from .verify import CHECK_NAMES, run_checks

__all__ = ["main", "build_parser"]


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage mistakes are validation failures: exit 1, not argparse's 2
    def error(self, message):
        raise _CliError(message)


def _add_point_args(parser):
    parser.add_argument("--l", type=int, default=None, help="number of transmitters")
    parser.add_argument("--pb", type=float, default=None, help="blockage probability")
    parser.add_argument("--snr-db", type=float, default=None, help="per-transmitter SNR in dB")
    parser.add_argument("--k", type=int, default=None, help="frames per block / subcarriers")
    parser.add_argument("--d", type=int, default=None, help="cyclic prefix length")
    parser.add_argument("--trials", type=int, default=None, help="Monte Carlo trials per row")
    parser.add_argument("--seed", type=int, default=None, help="base seed (default MACRODIV_SEED or 0)")
    parser.add_argument("--config", default=None, help="flat TOML config file")
    parser.add_argument("--out", default=None, help="output path")
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--workers", type=int, default=None, help="parallel row workers")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="macrodiv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_cap = sub.add_parser("capacity", help="closed-form rates at one operating point")
    _add_point_args(p_cap)

    p_sweep = sub.add_parser("sweep", help="rate sweep over one axis")
    _add_point_args(p_sweep)
    p_sweep.add_argument("--axis", choices=AXES, default=None)
    p_sweep.add_argument("--values", default=None, help="comma-separated axis values")
    p_sweep.add_argument("--schemes", default=None, help="comma-separated scheme names")
    p_sweep.add_argument(
        "--metric", choices=METRICS + ("both",), default=None, help="ergodic, outage, or both"
    )

    p_ccdf = sub.add_parser("ccdf", help="empirical CCDF of a scheme's instantaneous rate")
    _add_point_args(p_ccdf)
    p_ccdf.add_argument("--scheme", choices=SCHEME_KINDS, default=None)

    p_verify = sub.add_parser("verify", help="run the cross-validation suites")
    p_verify.add_argument("--checks", default=None, help=f"comma list from {CHECK_NAMES}")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--trials", type=int, default=None)
    return parser


def _load_config_file(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _setting(args, file_cfg: dict, key: str, default):
    cli_val = getattr(args, key, None)
    if cli_val is not None:
        return cli_val
    if key in file_cfg:
        return file_cfg[key]
    return default


def _default_seed() -> int:
    return int(os.environ.get("MACRODIV_SEED", "0"))


def _parse_values(raw):
    if isinstance(raw, (list, tuple)):
        return tuple(raw)
    return tuple(float(tok) for tok in str(raw).split(",") if tok.strip())


def _parse_names(raw):
    if isinstance(raw, (list, tuple)):
        return tuple(raw)
    return tuple(tok.strip() for tok in str(raw).split(",") if tok.strip())


def _point(args, file_cfg):
    return {
        "n_tx": int(_setting(args, file_cfg, "l", 4)),
        "blockage_prob": float(_setting(args, file_cfg, "pb", 0.2)),
        "snr_db": float(_setting(args, file_cfg, "snr_db", 6.0)),
        "n_frames": int(_setting(args, file_cfg, "k", 64)),
        "cp_len": int(_setting(args, file_cfg, "d", 8)),
        "seed": int(_setting(args, file_cfg, "seed", _default_seed())),
    }


def _cmd_capacity(args, file_cfg) -> int:
    point = _point(args, file_cfg)
    n_tx, p_b = point["n_tx"], point["blockage_prob"]
    snr = 10.0 ** (point["snr_db"] / 10.0)
    erg = ergodic_capacity(n_tx, p_b, snr)
    out = outage_capacity(n_tx, p_b, snr)
    ts = ts_ergodic_rate(n_tx, p_b, snr)
    a_erg = async_capacity_limit(n_tx, p_b, snr)
    a_out = async_outage_limit(n_tx, p_b, snr)
    print(f"point: L={n_tx} p_B={p_b} snr={point['snr_db']} dB")
    print(f"ergodic capacity        {erg:.6f} bits")
    print(f"outage capacity         {out.rate:.6f} bits (i*={out.argmax_index})")
    print(f"transmitter selection   {ts:.6f} bits")
    if n_tx >= 2:
        print(f"two-tx selection        {two_tx_alamouti_rate(n_tx, p_b, snr):.6f} bits")
    print(f"async ergodic limit     {a_erg:.6f} bits")
    print(f"async outage limit      {a_out.rate:.6f} bits (i*={a_out.argmax_index})")
    rows = [
        ResultRow("point", point["snr_db"], "capacity", "ergodic", erg, 0.0, 0),
        ResultRow("point", point["snr_db"], "capacity", "outage", out.rate, 0.0, 0, out.argmax_index),
        ResultRow("point", point["snr_db"], "transmitter_selection", "ergodic", ts, 0.0, 0),
    ]
    ofdm = OfdmConfig(point["n_frames"], point["cp_len"])
    wc = worst_case_capacity(n_tx, p_b, snr, ofdm)
    wco = worst_case_outage(n_tx, p_b, snr, ofdm)
    print(f"worst-case ergodic (K={ofdm.n_subcarriers}, D={ofdm.cp_len}) {wc:.6f} bits")
    print(f"worst-case outage  (K={ofdm.n_subcarriers}, D={ofdm.cp_len}) {wco.rate:.6f} bits (i*={wco.argmax_index})")
    if args.out:
        emit(rows, _setting(args, file_cfg, "format", None) or "csv", args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_sweep(args, file_cfg) -> int:
    point = _point(args, file_cfg)
    axis = _setting(args, file_cfg, "axis", None)
    if axis is None:
        raise _CliError("sweep needs --axis")
    raw_values = _setting(args, file_cfg, "values", None)
    if raw_values is None:
        raise _CliError("sweep needs --values")
    schemes = _setting(args, file_cfg, "schemes", None)
    if schemes is None:
        raise _CliError("sweep needs --schemes")
    metric = _setting(args, file_cfg, "metric", "both")
    metrics = METRICS if metric == "both" else (metric,)
    config = SweepConfig(
        axis=axis,
        axis_values=_parse_values(raw_values),
        schemes=_parse_names(schemes),
        n_tx=point["n_tx"],
        blockage_prob=point["blockage_prob"],
        snr_db=point["snr_db"],
        n_frames=point["n_frames"],
        cp_len=point["cp_len"],
        metrics=metrics,
        n_trials=_setting(args, file_cfg, "trials", None),
        seed=point["seed"],
    )
    workers = int(_setting(args, file_cfg, "workers", 1))
    rows = run_sweep(config, workers=workers)
    fmt = _setting(args, file_cfg, "format", None) or "csv"
    out = _setting(args, file_cfg, "out", None)
    if out:
        emit(rows, fmt, out)
        print(f"wrote {len(rows)} rows to {out}")
    else:
        sys.stdout.write(emit_text(rows, fmt))
    return 0


def _cmd_ccdf(args, file_cfg) -> int:
    point = _point(args, file_cfg)
    scheme = _setting(args, file_cfg, "scheme", None)
    if scheme is None:
        raise _CliError("ccdf needs --scheme")
    config = SweepConfig(
        axis="snr_db",
        axis_values=(point["snr_db"],),
        schemes=(scheme,),
        n_tx=point["n_tx"],
        blockage_prob=point["blockage_prob"],
        snr_db=point["snr_db"],
        n_frames=point["n_frames"],
        cp_len=point["cp_len"],
        seed=point["seed"],
    )
    rows = run_ccdf(config, scheme, n=_setting(args, file_cfg, "trials", None))
    fmt = _setting(args, file_cfg, "format", None) or "csv"
    out = _setting(args, file_cfg, "out", None)
    if out:
        emit(rows, fmt, out)
        print(f"wrote {len(rows)} rows to {out}")
    else:
        sys.stdout.write(emit_text(rows, fmt))
    return 0


def _cmd_verify(args, file_cfg) -> int:
    names = CHECK_NAMES if args.checks is None else _parse_names(args.checks)
    seed = args.seed if args.seed is not None else _default_seed()
    kwargs = {}
    if args.trials is not None:
        kwargs["n"] = args.trials
    results = run_checks(seed=seed, names=names, **kwargs)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: {res.detail}")
        failed += not res.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        file_cfg = _load_config_file(args.config) if getattr(args, "config", None) else {}
        handler = {
            "capacity": _cmd_capacity,
            "sweep": _cmd_sweep,
            "ccdf": _cmd_ccdf,
            "verify": _cmd_verify,
        }[args.command]
        return handler(args, file_cfg)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
