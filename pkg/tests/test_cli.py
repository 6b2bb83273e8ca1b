import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from fockladder.cli import (
    ENTROPY_PHI_MIN,
    RunConfig,
    load_sidecar_config,
    main,
    parse_args,
    run,
)
from fockladder.experiments import THREADS_ENV_VAR


def usage_exit(argv):
    with pytest.raises(SystemExit) as excinfo:
        parse_args(argv)
    return excinfo.value.code


class TestParseArgs:
    def test_defaults(self):
        config = parse_args(["current-scan"])
        assert config.command == "current-scan"
        assert config.n == 100
        assert config.mu == 0.0
        assert config.xi == 0.5
        assert config.tau == 0.01
        assert config.format == "csv"
        assert config.phi_points == 121
        assert config.phi_min == 0.0
        assert config.phi_max == pytest.approx(math.pi / 2)

    def test_mu_scan_grid_defaults(self):
        config = parse_args(["mu-scan"])
        assert (config.mu_min, config.mu_max, config.mu_points) == (-0.6, 0.1, 71)

    def test_entropy_scan_starts_inside_zone(self):
        config = parse_args(["entropy-scan"])
        assert config.phi_min == ENTROPY_PHI_MIN > 0.0
        assert config.phi_points == 120

    def test_fss_size_list(self):
        config = parse_args(["fss", "--xi", "0.5", "--ns", "20,40,60,80,100"])
        assert config.ns == (20, 40, 60, 80, 100)

    def test_flux_list_auto_and_explicit(self):
        assert parse_args(["bands", "--fluxes", "auto"]).fluxes is None
        assert parse_args(["bands"]).fluxes is None
        assert parse_args(["bands", "--fluxes", "0.3,0.7"]).fluxes == (0.3, 0.7)

    @pytest.mark.parametrize(
        "argv",
        [
            ["ground", "--n", "101"],
            ["ground", "--n", "0"],
            ["ground", "--tau", "0"],
            ["ground", "--bogus"],
            ["bogus-command"],
            ["fss", "--ns", "20,40"],
            ["fss", "--ns", "20,21,40"],
            ["fss", "--ns", "20,20,40"],
            ["bands", "--fluxes", ""],
            ["current-scan", "--phi-min", "0.8", "--phi-max", "0.2"],
            ["current-scan", "--phi-max", "3.2"],
            ["entropy-scan", "--phi-min", "0"],
            ["mu-scan", "--mu-min", "0.2", "--mu-max", "0.1"],
            ["mu-scan", "--mu-points", "2"],
        ],
    )
    def test_usage_errors_exit_2(self, argv):
        assert usage_exit(argv) == 2

    def test_odd_n_message_names_flag(self, capsys):
        usage_exit(["ground", "--n", "101"])
        err = capsys.readouterr().err
        assert "--n" in err and "101" in err


class TestRunConfig:
    def test_dict_roundtrip(self):
        config = parse_args(["mu-scan", "--n", "20", "--mu-points", "11"])
        assert RunConfig.from_dict(config.to_dict()) == config

    def test_rejects_unknown_command(self):
        with pytest.raises(ValueError, match="command"):
            RunConfig(command="explode")

    def test_default_output_name(self):
        assert parse_args(["ground"]).out_path() == "ground.csv"
        assert parse_args(["bands", "--format", "json"]).out_path() == "bands.json"


class TestRunGround:
    def test_writes_csv_and_sidecar(self, tmp_path, capsys):
        out = tmp_path / "g.csv"
        config = parse_args(["ground", "--n", "8", "--phi", "0.5", "--out", str(out)])
        assert run(config) == 0
        lines = out.read_bytes().split(b"\r\n")
        assert lines[0] == b"leg [m],rung [n],density [prob],phase [rad]"
        rows = list(csv.reader(out.read_text().splitlines()))
        assert len(rows) == 1 + 2 * 9
        densities = [float(r[2]) for r in rows[1:]]
        assert sum(densities) == pytest.approx(1.0, abs=1e-12)
        meta = json.loads((tmp_path / "g.csv.meta.json").read_text())
        assert meta["result"]["jc_numeric"] == pytest.approx(
            meta["result"]["jc_analytic"], rel=0.35
        )
        assert "quasienergy" in meta["result"]
        assert capsys.readouterr().out.startswith("ground:")

    def test_full_precision_cells(self, tmp_path):
        out = tmp_path / "g.csv"
        config = parse_args(["ground", "--n", "8", "--phi", "0.5", "--out", str(out)])
        run(config)
        meta = json.loads((tmp_path / "g.csv.meta.json").read_text())
        rows = list(csv.reader(out.read_text().splitlines()))[1:]
        total = sum(float(r[2]) for r in rows)
        # 17 significant digits reproduce the binary doubles exactly.
        recomputed = sum(
            float(format(float(r[2]), ".17g")) == float(r[2]) for r in rows
        )
        assert recomputed == len(rows)
        assert meta["config"]["n"] == 8
        assert total == pytest.approx(1.0, abs=5e-16)

    def test_out_of_domain_flux_leaves_analytic_null(self, tmp_path):
        out = tmp_path / "g.csv"
        config = parse_args(["ground", "--n", "8", "--phi", "2.5", "--out", str(out)])
        assert run(config) == 0
        meta = json.loads((tmp_path / "g.csv.meta.json").read_text())
        assert meta["result"]["jc_analytic"] is None
        assert meta["result"]["entropy_analytic"] is None


class TestRunScans:
    def test_rerun_is_byte_identical(self, tmp_path):
        argv = ["current-scan", "--n", "8", "--phi-points", "11"]
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        assert run(parse_args(argv + ["--out", str(first)])) == 0
        assert run(parse_args(argv + ["--out", str(second)])) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_json_format(self, tmp_path):
        out = tmp_path / "scan.json"
        config = parse_args(
            ["current-scan", "--n", "8", "--phi-points", "5",
             "--format", "json", "--out", str(out)]
        )
        assert run(config) == 0
        payload = json.loads(out.read_text())
        assert payload["columns"][0] == "phi [rad]"
        assert len(payload["rows"]) == 5
        assert payload["rows"][0][0] == 0.0

    def test_sidecar_roundtrip(self, tmp_path):
        out = tmp_path / "scan.csv"
        config = parse_args(
            ["current-scan", "--n", "8", "--phi-points", "7", "--out", str(out)]
        )
        assert run(config) == 0
        assert load_sidecar_config(tmp_path / "scan.csv.meta.json") == config

    def test_bands_json_nested_panels(self, tmp_path):
        out = tmp_path / "bands.json"
        config = parse_args(
            ["bands", "--n", "8", "--fluxes", "0.4,0.9",
             "--format", "json", "--out", str(out)]
        )
        assert run(config) == 0
        payload = json.loads(out.read_text())
        assert [p["flux"] for p in payload["panels"]] == [0.4, 0.9]
        panel = payload["panels"][0]
        assert len(panel["thetas"]) == 9
        assert len(panel["density"]) == 2
        assert len(panel["density"][0]) == 18
        assert len(panel["quasienergies"]) == 18

    def test_mu_scan_sidecar_holds_refined_maximum(self, tmp_path):
        out = tmp_path / "m.csv"
        config = parse_args(
            ["mu-scan", "--n", "8", "--mu-min", "-0.6", "--mu-max", "-0.2",
             "--mu-points", "5", "--phi-points", "9", "--out", str(out)]
        )
        assert run(config) == 0
        meta = json.loads((tmp_path / "m.csv.meta.json").read_text())
        assert -0.6 < meta["result"]["mu_max"] < -0.2
        assert meta["result"]["max_jc"] > 0.0
        rows = list(csv.reader(out.read_text().splitlines()))
        assert rows[0] == ["mu [dimensionless]", "peak_phi [rad]", "peak_jc [2J_C/(N J)]"]
        assert len(rows) == 6

    def test_fss_writes_fit_and_per_size_rows(self, tmp_path):
        out = tmp_path / "f.csv"
        config = parse_args(
            ["fss", "--ns", "8,12,16", "--mu-min", "-0.7", "--mu-max", "-0.2",
             "--mu-points", "6", "--phi-points", "9", "--out", str(out)]
        )
        assert run(config) == 0
        meta = json.loads((tmp_path / "f.csv.meta.json").read_text())
        assert set(meta["result"]) == {"slope", "intercept", "r_squared", "mu_c"}
        rows = list(csv.reader(out.read_text().splitlines()))
        assert len(rows) == 4
        assert [int(r[0]) for r in rows[1:]] == [8, 12, 16]


class TestRunErrors:
    def test_invalid_thread_env_is_usage_error(self, tmp_path, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "zero")
        config = parse_args(["ground", "--n", "8", "--out", str(tmp_path / "g.csv")])
        assert run(config) == 2

    def test_unwritable_output_directory(self, tmp_path, capsys):
        config = parse_args(
            ["ground", "--n", "8", "--out", str(tmp_path / "missing" / "g.csv")]
        )
        assert run(config) == 1
        assert "not writable" in capsys.readouterr().err

    def test_compute_error_names_parameter(self, tmp_path, capsys):
        config = parse_args(
            ["mu-scan", "--n", "8", "--mu-min", "-0.2", "--mu-max", "0.1",
             "--mu-points", "4", "--phi-points", "9",
             "--out", str(tmp_path / "m.csv")]
        )
        assert run(config) == 1
        assert "widen the mu bracket" in capsys.readouterr().err


class TestValidateCommand:
    def test_all_checks_pass(self, tmp_path, capsys):
        config = parse_args(["validate", "--out", str(tmp_path / "v.csv")])
        assert run(config) == 0
        out = capsys.readouterr().out
        check_lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
        assert check_lines and all(l.startswith("PASS") for l in check_lines)
        rows = list(csv.reader((tmp_path / "v.csv").read_text().splitlines()))
        assert rows[0] == ["check [name]", "passed [bool]", "detail [text]"]
        assert all(r[1] == "true" for r in rows[1:])


class TestEntryPoints:
    def test_version_flag(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0

    def test_module_invocation(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "fockladder", "ground", "--n", "8",
             "--out", str(tmp_path / "g.csv")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert (tmp_path / "g.csv").exists()
