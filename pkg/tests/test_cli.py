"""
Tests for the command-line entry point.
"""

import io

import pytest
from rich.console import Console

from gfdm_toolkit.__main__ import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main, parse_args
from gfdm_toolkit.core.errors import LowComplexityUnavailableError
from gfdm_toolkit.ui.console_report import ConsoleReport
from gfdm_toolkit.utils.csv_io import read_csv


@pytest.fixture
def report():
    return ConsoleReport(Console(file=io.StringIO(), width=120))


def _write_config(tmp_path, text):
    path = tmp_path / "scenario.yaml"
    path.write_text(text)
    return str(path)


class TestArguments:

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            parse_args([])

    def test_filter_choices(self):
        with pytest.raises(SystemExit):
            parse_args(["filter-export", "--filter", "gaussian", "--output", "x.csv"])

    def test_defaults(self):
        args = parse_args(["complexity"])
        assert args.K == 64
        assert args.lt == 2 and args.lr == 16


class TestCommands:

    def test_complexity(self, report, tmp_path):
        out = tmp_path / "cms.csv"
        assert main(["complexity", "--M-values", "15,16", "--output", str(out)], report) == EXIT_OK
        table, metadata = read_csv(str(out))
        assert set(table["M"]) == {15, 16}
        assert metadata["K"] == "64"
        assert "Complex Multiplications" in report.console.file.getvalue()

    def test_simulate(self, report, tmp_path):
        config = _write_config(tmp_path, "scenario: zf_awgn\nK: 4\nM: 3\nphases: random\nblocks: 50\n")
        out = tmp_path / "zf.csv"
        per_symbol = tmp_path / "zf_per_symbol.csv"
        code = main(["simulate", config, "--set", "snr_db=0;10,seed=3", "--output", str(out),
                     "--per-symbol-output", str(per_symbol), "--workers", "2"], report)
        assert code == EXIT_OK
        table, metadata = read_csv(str(out))
        assert table["snr_db"].tolist() == [0.0, 10.0]
        assert metadata["scenario"] == "zf_awgn"
        assert metadata["seed"] == "3"
        assert len(read_csv(str(per_symbol))[0]) == 2 * 12

    def test_missing_config(self, report, tmp_path):
        assert main(["simulate", str(tmp_path / "absent.yaml")], report) == EXIT_CONFIG

    def test_bad_override(self, report, tmp_path):
        config = _write_config(tmp_path, "scenario: zf_awgn\nK: 4\nM: 3\n")
        assert main(["simulate", config, "--set", "blocks=0"], report) == EXIT_CONFIG

    def test_singular_filter_with_ammse(self, report, tmp_path):
        config = _write_config(tmp_path, "scenario: ammse_rf\nK: 8\nM: 4\nfilter: rc\nrolloff: 0.5\nblocks: 2\n")
        assert main(["simulate", config, "--set", "snr_db=10"], report) == EXIT_NUMERICAL

    def test_filter_export(self, report, tmp_path):
        out = tmp_path / "rc.csv"
        code = main(["filter-export", "--K", "8", "--M", "5", "--filter", "rc", "--rolloff", "0.3",
                     "--output", str(out)], report)
        assert code == EXIT_OK
        table, metadata = read_csv(str(out))
        assert len(table) == 40
        assert list(table.columns) == ["index", "re", "im"]
        assert metadata["filter"] == "rc"

    def test_filter_export_missing_rolloff(self, report, tmp_path):
        code = main(["filter-export", "--filter", "rrc", "--output", str(tmp_path / "rrc.csv")], report)
        assert code == EXIT_CONFIG

    def test_channel_export(self, report, tmp_path):
        out = tmp_path / "channel.csv"
        assert main(["channel-export", "--kind", "static", "--K", "8", "--M", "4", "--output", str(out)],
                    report) == EXIT_OK
        table, _ = read_csv(str(out))
        assert len(table) == 4

    def test_psd_missing_rolloff(self, report, tmp_path):
        code = main(["psd", "--filter", "rc", "--output", str(tmp_path / "psd.csv")], report)
        assert code == EXIT_CONFIG

    def test_psd(self, report, tmp_path):
        out = tmp_path / "psd.csv"
        code = main(["psd", "--K", "4", "--M", "3", "--filter", "dirichlet", "--oversample", "4",
                     "--output", str(out)], report)
        assert code == EXIT_OK
        table, _ = read_csv(str(out))
        assert list(table.columns) == ["frequency_hz", "psd"]
        assert (table["psd"] >= 0).all()

    def test_papr(self, report, tmp_path):
        out = tmp_path / "papr.csv"
        code = main(["papr", "--K", "4", "--M", "3", "--blocks", "50", "--thresholds", "0:1:4",
                     "--output", str(out)], report)
        assert code == EXIT_OK
        table, _ = read_csv(str(out))
        assert table["papr_db"].tolist() == [0.0, 1.0, 2.0, 3.0, 4.0]
        assert table["ccdf"].is_monotonic_decreasing

    def test_low_complexity_unavailable(self, report, tmp_path, monkeypatch):
        def unavailable(cfg):
            raise LowComplexityUnavailableError("no rank-1 structure on subsymbol 2", [2])

        monkeypatch.setattr("gfdm_toolkit.__main__.run_scenario", unavailable)
        config = _write_config(tmp_path, "scenario: mmse_rf\nK: 4\nM: 3\nphases: random\nblocks: 2\n")
        assert main(["simulate", config, "--set", "snr_db=10"], report) == EXIT_NUMERICAL
