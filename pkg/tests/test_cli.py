import json

import pytest

from blochball import cli
from blochball.errors import SpecValidationError


def small_config(**extra):
    doc = {
        "dimension": 4,
        "seed": 7,
        "property_samples": 400,
        "budgets": {
            "search": {"samples": 40, "depth": 5, "polish_iters": 2},
            "sweep": {"samples": 256, "depth": 10, "ray_grid": 128, "refine": 1},
        },
    }
    doc.update(extra)
    return cli.parse_config(json.dumps(doc))


class TestParseConfig:
    def test_empty_gives_defaults(self):
        cfg = cli.parse_config("{}")
        assert cfg.dimension == 16
        assert cfg.seed == 42
        assert cfg.suites == cli.SUITE_NAMES
        assert cfg.quadrature.nodes == 64

    def test_explicit_fields(self):
        cfg = cli.parse_config('{"dimension": 4, "suites": ["schwarz_pick"]}')
        assert cfg.dimension == 4
        assert cfg.suites == ("schwarz_pick",)

    def test_unknown_suite_rejected(self):
        with pytest.raises(SpecValidationError, match="nonexistent"):
            cli.parse_config('{"suites": ["nonexistent"]}')

    def test_unknown_field_rejected(self):
        with pytest.raises(SpecValidationError, match="bogus"):
            cli.parse_config('{"bogus": 1}')

    def test_bad_json_named(self):
        with pytest.raises(SpecValidationError, match="JSON"):
            cli.parse_config(b"{not json")

    def test_symbols_parsed(self):
        cfg = cli.parse_config('{"symbols": [{"family": "power"}]}')
        assert cfg.symbols[0].family == "power"


class TestRunSuite:
    def test_mobius_all_pass(self):
        cfg = small_config()
        rec = cli.run_suite(cfg, "mobius")
        assert rec.suite == "mobius"
        assert all(c.status == "pass" for c in rec.checks)
        assert rec.wall_time > 0

    def test_unknown_suite(self):
        with pytest.raises(SpecValidationError):
            cli.run_suite(small_config(), "bogus")

    def test_injected_tolerance_forces_failure(self):
        cfg = small_config(tolerances={"mobius.involution": -1.0})
        rec = cli.run_suite(cfg, "mobius")
        statuses = {c.id: c.status for c in rec.checks}
        assert statuses["mobius.involution"] == "fail"
        assert cli.exit_code([rec]) == 1

    def test_checks_capture_crashes(self, monkeypatch):
        cfg = small_config()

        def boom(ctx):
            raise RuntimeError("synthetic crash")

        monkeypatch.setitem(cli._SUITES, "metrics", boom)
        rec = cli.run_suite(cfg, "metrics")
        assert rec.checks[0].status == "fail"
        assert "synthetic crash" in rec.checks[0].detail


class TestEmitReport:
    def test_empty_records_valid_documents(self):
        for fmt in ("json", "csv", "text"):
            data = cli.emit_report([], fmt)
            assert isinstance(data, bytes) and data
        doc = json.loads(cli.emit_report([], "json"))
        assert doc["suites"] == []

    def test_json_round_trip_and_order(self):
        cfg = small_config()
        recs = [cli.run_suite(cfg, s) for s in ("schwarz_pick", "mobius")]
        doc = json.loads(cli.emit_report(recs, "json"))
        assert [s["suite"] for s in doc["suites"]] == ["mobius", "schwarz_pick"]
        assert "wall_time" not in json.dumps(doc)

    def test_csv_one_row_per_check(self):
        cfg = small_config()
        rec = cli.run_suite(cfg, "mobius")
        lines = cli.emit_report([rec], "csv").decode().strip().splitlines()
        assert len(lines) == 1 + len(rec.checks)
        assert lines[0].startswith("suite,check,status")

    def test_text_summary_line(self):
        cfg = small_config()
        rec = cli.run_suite(cfg, "mobius")
        text = cli.emit_report([rec], "text").decode()
        assert "summary:" in text

    def test_determinism_byte_identical(self):
        cfg = small_config()
        a = cli.emit_report([cli.run_suite(cfg, "metrics")], "json")
        b = cli.emit_report([cli.run_suite(cfg, "metrics")], "json")
        assert a == b


class TestExitCode:
    def test_zero_when_all_pass(self):
        cfg = small_config()
        assert cli.exit_code([cli.run_suite(cfg, "mobius")]) == 0

    def test_vacuous_does_not_fail(self):
        rec = cli.ReportRecord(
            suite="s",
            checks=[cli.CheckResult(id="a", anchor="", status="vacuous")],
            wall_time=0.0,
        )
        assert cli.exit_code([rec]) == 0


class TestMain:
    def test_verify_with_config(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "dimension": 4,
            "seed": 7,
            "suites": ["mobius"],
            "property_samples": 400,
            "output": {"format": "json"},
        }))
        out = tmp_path / "report.json"
        code = cli.main(["verify", "--config", str(cfg_path), "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["suites"][0]["suite"] == "mobius"

    def test_verify_determinism_on_disk(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "dimension": 4, "seed": 9, "suites": ["metrics"],
            "property_samples": 300, "output": {"format": "json"},
        }))
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert cli.main(["verify", "--config", str(cfg_path), "--out", str(out1)]) == 0
        assert cli.main(["verify", "--config", str(cfg_path), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_verify_exit_code_on_injected_failure(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "dimension": 4, "seed": 7, "suites": ["mobius"],
            "property_samples": 300,
            "tolerances": {"mobius.involution": -1.0},
            "output": {"format": "json"},
        }))
        out = tmp_path / "r.json"
        assert cli.main(["verify", "--config", str(cfg_path), "--out", str(out)]) == 1

    def test_unknown_suite_flag(self, capsys):
        assert cli.main(["verify", "--suite", "bogus"]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_diagnose_command(self, tmp_path, capsys):
        spec = tmp_path / "sym.json"
        spec.write_text(json.dumps({"family": "power"}))
        code = cli.main(["diagnose", "--symbol", str(spec), "--dim", "4", "--budget", "256"])
        assert code == 0
        captured = capsys.readouterr().out
        assert "noncompact_necessary_violated" in captured

    def test_sweep_command_writes_csv(self, tmp_path, capsys):
        spec = tmp_path / "sym.json"
        spec.write_text(json.dumps({"family": "identity"}))
        out = tmp_path / "sweep.csv"
        code = cli.main([
            "sweep", "--symbol", str(spec), "--quantity", "q2", "--mode", "phi",
            "--out", str(out), "--dim", "4", "--budget", "256",
        ])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "bin_low,bin_high,sup,witness_norm,witness_phi_norm"
        assert len(lines) > 3

    def test_sweep_companion_naming_in_csv_report(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "dimension": 4, "seed": 7, "suites": ["necessity"],
            "property_samples": 300,
            "budgets": {"sweep": {"samples": 256, "ray_grid": 128, "refine": 1}},
            "output": {"format": "csv"},
        }))
        out = tmp_path / "report.csv"
        code = cli.main(["verify", "--config", str(cfg_path), "--out", str(out)])
        assert code == 0
        companions = {p.name for p in tmp_path.glob("necessity_*.csv")}
        assert "necessity_identity_q2.csv" in companions


class TestAnchorContract:
    def test_every_check_id_has_one_anchor(self):
        cfg = small_config()
        seen = {}
        for suite in ("mobius", "metrics", "schwarz_pick"):
            rec = cli.run_suite(cfg, suite)
            for c in rec.checks:
                assert c.anchor, c.id
                assert c.id not in seen or seen[c.id] == c.anchor
                seen[c.id] = c.anchor
        assert len(seen) >= 14


class TestDimensionOne:
    def test_metrics_suite_scalar_case(self):
        cfg = cli.parse_config(json.dumps({
            "dimension": 1, "seed": 5, "suites": ["metrics"], "property_samples": 2000,
        }))
        rec = cli.run_suite(cfg, "metrics")
        statuses = {c.id: c.status for c in rec.checks}
        assert statuses["metrics.scalar_disk_oracle"] == "pass"
        assert all(s == "pass" for s in statuses.values())
