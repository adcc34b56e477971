"""Sweep orchestration, emission round-trips, and the CLI surface."""

import json
import math
import pytest

from macrodiv.closed_forms import ergodic_capacity, outage_capacity, ts_ergodic_rate
from macrodiv.experiments import (
    CcdfRow,
    ResultRow,
    SweepConfig,
    emit,
    emit_text,
    parse_rows,
    run_ccdf,
    run_sweep,
)
from macrodiv import cli


def small_config(**overrides):
    base = dict(
        axis="p_B",
        axis_values=(0.2, 0.5),
        schemes=("capacity", "ncjt"),
        n_tx=2,
        snr_db=3.0,
        n_frames=8,
        metrics=("ergodic",),
        n_trials=5000,
        seed=7,
    )
    base.update(overrides)
    return SweepConfig(**base)


class TestSweepConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            small_config(axis="power")
        with pytest.raises(ValueError):
            small_config(axis_values=())
        with pytest.raises(ValueError):
            small_config(axis_values=(0.5, 0.2))
        with pytest.raises(ValueError):
            small_config(schemes=("beamforming",))
        with pytest.raises(ValueError):
            small_config(metrics=("latency",))
        with pytest.raises(ValueError):
            small_config(blockage_prob=0.0)
        with pytest.raises(ValueError):
            small_config(axis="L", axis_values=(1.5, 2.0))

    def test_integer_axes_coerced(self):
        config = small_config(axis="L", axis_values=(2.0, 4.0))
        assert config.axis_values == (2, 4)


class TestRunSweep:
    def test_closed_form_rows(self):
        config = small_config(
            schemes=("capacity", "transmitter_selection"),
            metrics=("ergodic", "outage"),
        )
        with pytest.warns(UserWarning, match="outage"):
            rows = run_sweep(config)
        snr = 10.0 ** (3.0 / 10.0)
        by_key = {(r.axis_value, r.scheme, r.metric): r for r in rows}
        for p_b in (0.2, 0.5):
            row = by_key[(p_b, "capacity", "ergodic")]
            assert row.rate_bits == pytest.approx(ergodic_capacity(2, p_b, snr))
            assert row.std_error == 0.0 and row.n_trials == 0
            row = by_key[(p_b, "capacity", "outage")]
            sol = outage_capacity(2, p_b, snr)
            assert row.rate_bits == pytest.approx(sol.rate)
            assert row.argmax_i == sol.argmax_index
            row = by_key[(p_b, "transmitter_selection", "ergodic")]
            assert row.rate_bits == pytest.approx(ts_ergodic_rate(2, p_b, snr))

    def test_mc_rows_near_truth(self):
        config = small_config(schemes=("ncjt",), n_trials=50_000)
        rows = run_sweep(config)
        for row in rows:
            assert row.n_trials == 50_000
            assert row.std_error > 0.0
            assert row.rate_bits >= 0.0

    def test_invalid_combinations_skipped_with_warning(self):
        config = small_config(
            axis="L",
            axis_values=(2, 3),
            schemes=("capacity", "ncja"),
            metrics=("ergodic",),
            n_trials=2000,
        )
        with pytest.warns(UserWarning, match="ncja"):
            rows = run_sweep(config)
        keys = {(r.axis_value, r.scheme) for r in rows}
        assert (3, "ncja") not in keys
        assert (2, "ncja") in keys and (3, "capacity") in keys

    def test_selection_outage_skipped(self):
        config = small_config(
            schemes=("transmitter_selection",), metrics=("outage",)
        )
        with pytest.warns(UserWarning, match="outage"):
            rows = run_sweep(config)
        assert rows == []

    def test_deterministic(self):
        config = small_config()
        assert run_sweep(config) == run_sweep(config)

    def test_worker_counts_agree(self):
        config = small_config(n_trials=2000)
        serial = run_sweep(config, workers=1)
        parallel = run_sweep(config, workers=2)
        assert serial == parallel

    def test_skipping_does_not_shift_streams(self):
        # the ncja rows are invalid at L=3 but their task indices stay
        # reserved, so the ncjt rows keep identical draws either way
        with_bad = small_config(
            axis="L", axis_values=(3,), schemes=("ncja", "ncjt"), n_trials=2000
        )
        without = small_config(
            axis="L", axis_values=(3,), schemes=("capacity", "ncjt"), n_trials=2000
        )
        with pytest.warns(UserWarning):
            rows_bad = [r for r in run_sweep(with_bad) if r.scheme == "ncjt"]
        rows_ok = [r for r in run_sweep(without) if r.scheme == "ncjt"]
        assert rows_bad == rows_ok


class TestRunCcdf:
    def test_structure(self):
        config = small_config(schemes=("phase_diversity",))
        rows = run_ccdf(config, "phase_diversity", n=20_000, max_points=200)
        emp = [r for r in rows if r.series == "empirical"]
        ana = [r for r in rows if r.series == "analytic"]
        assert 0 < len(emp) <= 200
        assert len(ana) == config.n_tx
        assert emp[0].ccdf == 1.0
        assert all(b.ccdf <= a.ccdf for a, b in zip(emp, emp[1:]))
        assert all(b.rate_bits > a.rate_bits for a, b in zip(emp, emp[1:]))
        snr = 10.0 ** (config.snr_db / 10.0)
        assert ana[0].rate_bits == pytest.approx(math.log2(1.0 + snr))


class TestEmit:
    def test_empty_rows_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit([], "csv", path)
        assert path.read_bytes() == (
            b"axis,axis_value,scheme,metric,rate_bits,std_error,n_trials,argmax_i\n"
        )

    def test_known_rate_formatting(self, tmp_path):
        row = ResultRow("p_B", 0.5, "capacity", "ergodic", ergodic_capacity(1, 0.5, 1.0), 0.0, 0)
        path = tmp_path / "one.csv"
        emit([row], "csv", path)
        text = path.read_text()
        assert "0.500000000" in text
        assert text.endswith("\n") and "\r" not in text

    def test_round_trip_fixed_point(self, tmp_path):
        config = small_config(metrics=("ergodic", "outage"), n_trials=2000)
        rows = run_sweep(config)
        path_a = tmp_path / "a.csv"
        emit(rows, "csv", path_a)
        parsed = parse_rows(path_a)
        path_b = tmp_path / "b.csv"
        emit(parsed, "csv", path_b)
        assert path_a.read_bytes() == path_b.read_bytes()

    def test_json_round_trip(self, tmp_path):
        rows = run_sweep(small_config(n_trials=2000))
        path = tmp_path / "rows.json"
        emit(rows, "json", path)
        payload = json.loads(path.read_text())
        rebuilt = [ResultRow(**rec) for rec in payload]
        assert rebuilt == rows

    def test_ccdf_emission(self, tmp_path):
        rows = [CcdfRow("empirical", 1.0, 1.0), CcdfRow("analytic", 2.0, 0.5)]
        path = tmp_path / "ccdf.csv"
        emit(rows, "csv", path)
        lines = path.read_text().splitlines()
        assert lines[0] == "series,rate_bits,ccdf"
        assert lines[1] == "empirical,1.00000000,1.00000000"

    def test_bad_format(self):
        with pytest.raises(ValueError):
            emit_text([], "parquet")

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            emit([], "csv", tmp_path / "missing_dir" / "x.csv")


class TestOrderingInvariant:
    def test_scheme_chain(self):
        # capacity >= ncja >= max(two-tx, ncjt) and ncjt >= ts, at 4 sigma
        config = SweepConfig(
            axis="p_B",
            axis_values=(0.2, 0.5),
            schemes=("capacity", "ncja", "two_tx_selection", "ncjt", "transmitter_selection"),
            n_tx=4,
            snr_db=6.0,
            n_frames=8,
            metrics=("ergodic",),
            n_trials=30_000,
            seed=3,
        )
        rows = run_sweep(config)
        by_key = {(r.axis_value, r.scheme): r for r in rows}
        for p_b in config.axis_values:
            cap = by_key[(p_b, "capacity")]
            ncja = by_key[(p_b, "ncja")]
            two = by_key[(p_b, "two_tx_selection")]
            ncjt = by_key[(p_b, "ncjt")]
            ts = by_key[(p_b, "transmitter_selection")]
            assert cap.rate_bits >= ncja.rate_bits - 4.0 * ncja.std_error
            floor = max(two.rate_bits, ncjt.rate_bits - 4.0 * ncjt.std_error)
            assert ncja.rate_bits >= floor - 4.0 * ncja.std_error
            assert ncjt.rate_bits >= ts.rate_bits - 4.0 * ncjt.std_error


class TestCli:
    def test_capacity_command(self, capsys):
        code = cli.main(["capacity", "--l", "2", "--pb", "0.5", "--snr-db", "0"])
        out = capsys.readouterr().out
        assert code == 0
        assert "ergodic capacity" in out and "0.896241" in out

    def test_sweep_to_csv(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        argv = [
            "sweep", "--axis", "p_B", "--values", "0.2,0.4",
            "--schemes", "capacity,ncjt", "--metric", "ergodic",
            "--l", "2", "--snr-db", "3", "--trials", "2000", "--seed", "5",
            "--out", str(out),
        ]
        assert cli.main(argv) == 0
        capsys.readouterr()
        first = out.read_bytes()
        assert cli.main(argv) == 0
        capsys.readouterr()
        assert out.read_bytes() == first
        rows = parse_rows(out)
        assert len(rows) == 4

    def test_sweep_stdout(self, capsys):
        code = cli.main(
            [
                "sweep", "--axis", "L", "--values", "1,2",
                "--schemes", "capacity", "--metric", "ergodic",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("axis,axis_value,scheme")

    def test_ccdf_command(self, tmp_path):
        out = tmp_path / "ccdf.csv"
        code = cli.main(
            [
                "ccdf", "--scheme", "capacity", "--l", "2", "--pb", "0.3",
                "--snr-db", "3", "--trials", "5000", "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "series,rate_bits,ccdf"
        assert any(line.startswith("analytic") for line in lines)

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "sweep.toml"
        cfg.write_text(
            'axis = "p_B"\nvalues = [0.2, 0.4]\nschemes = ["capacity"]\n'
            'metric = "ergodic"\nl = 2\nsnr_db = 3.0\ntrials = 1000\nseed = 9\n'
        )
        out = tmp_path / "from_config.csv"
        code = cli.main(
            ["sweep", "--config", str(cfg), "--l", "3", "--out", str(out)]
        )
        assert code == 0
        rows = parse_rows(out)
        snr = 10.0 ** 0.3
        # --l 3 must override l = 2 from the file
        assert rows[0].rate_bits == pytest.approx(ergodic_capacity(3, 0.2, snr))

    def test_seed_from_environment(self, tmp_path, monkeypatch, capsys):
        argv = [
            "sweep", "--axis", "p_B", "--values", "0.3", "--schemes", "ncjt",
            "--metric", "ergodic", "--trials", "2000",
        ]
        monkeypatch.setenv("MACRODIV_SEED", "11")
        assert cli.main(argv) == 0
        out_env = capsys.readouterr().out
        monkeypatch.delenv("MACRODIV_SEED")
        assert cli.main(argv + ["--seed", "11"]) == 0
        out_flag = capsys.readouterr().out
        assert out_env == out_flag

    def test_validation_failure_exit_code(self, capsys):
        assert cli.main(["sweep", "--axis", "bogus", "--values", "1"]) == 1
        assert cli.main(["sweep"]) == 1  # missing required options
        capsys.readouterr()

    def test_io_failure_exit_code(self, tmp_path, capsys):
        code = cli.main(
            [
                "sweep", "--axis", "L", "--values", "1", "--schemes", "capacity",
                "--metric", "ergodic",
                "--out", str(tmp_path / "no_dir" / "x.csv"),
            ]
        )
        assert code == 2
        capsys.readouterr()

    def test_verify_quick(self, capsys):
        code = cli.main(
            ["verify", "--checks", "closed-forms,riemann", "--trials", "20000"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "[PASS]" in out and "[FAIL]" not in out
