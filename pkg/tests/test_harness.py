import json
import math
import os

import pytest

from laguerre_ops.errors import ConfigError
from laguerre_ops.harness import SCENARIOS, ScenarioConfig, main, run_scenario
from laguerre_ops.report import (
    BoundReport,
    CSV_HEADER,
    ReportRow,
    emit_report,
    parse_report,
    report_to_csv,
    report_to_json,
)


def make_report():
    rows = (
        ReportRow("t=0.5", 0.123456789012345678, 1.0),
        ReportRow("t=1", float("inf"), math.inf),
    )
    return BoundReport(
        scenario="demo",
        claim="example claim",
        config={"beta": 0.5, "alpha": [0.5]},
        rows=rows,
        max_ratio=0.25,
        passed=True,
        wall_time=1.5,
    )


class TestReportSerialization:
    def test_json_roundtrip(self):
        r = make_report()
        back = parse_report(report_to_json(r))
        assert back.same_results(r)
        # floats survive exactly through the 17-digit decimal strings
        assert back.rows[0].measured == r.rows[0].measured

    def test_csv_header_and_rows(self):
        text = report_to_csv(make_report())
        lines = text.strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 3
        assert lines[1].startswith("demo,t=0.5,")

    def test_empty_rows_still_valid(self):
        r = BoundReport("demo", "c", {}, (), 0.0, True)
        doc = json.loads(report_to_json(r))
        assert doc["rows"] == []
        assert doc["summary"]["pass"] is True

    def test_emit_file(self, tmp_path):
        path = tmp_path / "r.json"
        emit_report(make_report(), path, "json")
        assert parse_report(path.read_text()).scenario == "demo"
        with pytest.raises(ConfigError):
            emit_report(make_report(), path, "yaml")


class TestScenarioConfig:
    def test_unknown_scenario(self):
        with pytest.raises(ConfigError):
            ScenarioConfig(scenario="nope")

    def test_constraint_thm42(self):
        with pytest.raises(ConfigError):
            ScenarioConfig(scenario="thm42", beta=0.5, lam=0.8)

    def test_constraint_thm44(self):
        with pytest.raises(ConfigError):
            ScenarioConfig(scenario="thm44", beta=1.2, lam=0.5)

    def test_from_json_rejects_unknown_keys(self):
        with pytest.raises(ConfigError):
            ScenarioConfig.from_json('{"scenario": "subordination", "bogus": 1}')

    def test_from_json_roundtrip(self):
        cfg = ScenarioConfig.from_json(
            '{"scenario": "prop31", "alpha": [0.5], "seed": 3, "beta": 0.6}'
        )
        assert cfg.seed == 3 and cfg.beta == 0.6


class TestScenarios:
    def test_subordination_passes(self):
        r = run_scenario(ScenarioConfig(scenario="subordination"))
        assert r.passed
        assert all(row.measured <= 1e-8 for row in r.rows)

    def test_fdiff_passes(self):
        assert run_scenario(ScenarioConfig(scenario="fdiff-identities")).passed

    def test_prop31_passes(self):
        assert run_scenario(ScenarioConfig(scenario="prop31")).passed

    def test_determinism(self):
        a = run_scenario(ScenarioConfig(scenario="subordination"))
        b = run_scenario(ScenarioConfig(scenario="subordination"))
        assert a.same_results(b)

    def test_theorem_ratio_regression(self):
        with open(os.path.join(os.path.dirname(__file__), "fixtures",
                               "theorem_ratios.json")) as fh:
            fixture = json.load(fh)
        r = run_scenario(ScenarioConfig(scenario="thm42"))
        got = next(row.measured for row in r.rows if row.point == "derivative,ratio")
        assert got == pytest.approx(float(fixture["thm42:derivative"]), rel=1e-12)


class TestCli:
    def test_list_scenarios(self, capsys):
        assert main(["list-scenarios"]) == 0
        out = capsys.readouterr().out.split()
        assert list(SCENARIOS) == out

    def test_run_writes_report(self, tmp_path, capsys):
        out = tmp_path / "sub.json"
        code = main(
            ["run", "--scenario", "subordination", "--out", str(out)]
        )
        assert code == 0
        report = parse_report(out.read_text())
        assert report.scenario == "subordination" and report.passed

    def test_run_csv(self, tmp_path):
        out = tmp_path / "sub.csv"
        code = main(
            ["run", "--scenario", "fdiff-identities", "--out", str(out),
             "--format", "csv"]
        )
        assert code == 0
        assert out.read_text().startswith(CSV_HEADER)

    def test_config_file(self, tmp_path):
        cfgfile = tmp_path / "cfg.json"
        cfgfile.write_text('{"scenario": "prop31", "seed": 5}')
        assert main(["run", "--scenario", "prop31", "--config", str(cfgfile)]) == 0

    def test_scenario_mismatch_is_config_error(self, tmp_path, capsys):
        cfgfile = tmp_path / "cfg.json"
        cfgfile.write_text('{"scenario": "prop31"}')
        code = main(
            ["run", "--scenario", "subordination", "--config", str(cfgfile)]
        )
        assert code == 2

    def test_thread_env_is_tolerated(self, monkeypatch):
        monkeypatch.setenv("LAGUERRE_OPS_THREADS", "2")
        assert main(["run", "--scenario", "subordination"]) == 0
