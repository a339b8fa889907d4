import csv
import datetime as dt
import json

import numpy as np
import pytest

from bjarima import cli, pipeline
from bjarima.errors import (
    DomainError,
    EmptyRange,
    ImputationImpossible,
    ReportIOError,
    SchemaError,
    UnknownCountry,
)
from bjarima.forecasting import ForecastResult
from bjarima.pipeline import (
    BUNDLED_FIXTURE,
    PipelineConfig,
    emit_reports,
    ingest_owid_csv,
    load_reports,
    policy_recommendation,
    run_pipeline,
)
from bjarima.series import impute_monthly_mean


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def flat_forecast(values):
    v = np.asarray(values, float)
    return ForecastResult(np.arange(1, len(v) + 1), v, v - 1, v + 1, 0.8, None)


@pytest.fixture
def blanked_fixture(tmp_path):
    """Bundled data with every June 2020 value for Spain removed."""
    out = tmp_path / "gappy.csv"
    with open(BUNDLED_FIXTURE, newline="") as fh:
        rows = list(csv.reader(fh))
    for r in rows[1:]:
        if r[2] == "Spain" and r[3].startswith("2020-06"):
            r[5] = ""
    return write_csv(out, rows[0], rows[1:])


class TestIngest:
    def test_fixture_in_percent(self):
        raw = ingest_owid_csv(BUNDLED_FIXTURE, "Mexico", "2020-04-01", "2020-09-12")
        assert raw.dates[0] == dt.date(2020, 4, 1)
        assert raw.dates[-1] == dt.date(2020, 9, 12)
        assert len(raw.values) == 165
        assert raw.values[-1] == pytest.approx(50.0)

    def test_missing_cells_become_nan(self):
        raw = ingest_owid_csv(BUNDLED_FIXTURE, "United States", "2020-05-01", "2020-05-31")
        assert raw.missing.sum() == 2
        assert not np.isnan(impute_monthly_mean(raw).values).any()

    def test_unknown_country(self):
        with pytest.raises(UnknownCountry):
            ingest_owid_csv(BUNDLED_FIXTURE, "Atlantis")

    def test_empty_range(self):
        with pytest.raises(EmptyRange):
            ingest_owid_csv(BUNDLED_FIXTURE, "Spain", "2021-01-01", "2021-02-01")

    def test_missing_column(self, tmp_path):
        path = write_csv(tmp_path / "bad.csv", ["date", "location"], [["2020-04-01", "Spain"]])
        with pytest.raises(SchemaError):
            ingest_owid_csv(path, "Spain")

    def test_percent_passthrough_and_sorting(self, tmp_path):
        rows = [["2020-04-02", "X", "7.5"], ["2020-04-01", "X", "2.5"], ["2020-04-01", "Y", "0.1"]]
        path = write_csv(tmp_path / "p.csv", ["date", "location", "positive_rate"], rows)
        raw = ingest_owid_csv(path, "X")
        np.testing.assert_array_equal(raw.values, [2.5, 7.5])
        assert ingest_owid_csv(path, "Y").values[0] == pytest.approx(10.0)


class TestPolicy:
    def test_low_flat_relaxes(self):
        adv = policy_recommendation(flat_forecast([4.8] * 30))
        assert (adv.verdict, adv.days_below_threshold, adv.required_test_multiplier) == ("relax", 14, 1.0)
        assert adv.trend == "flat"

    def test_threshold_counts_as_passing(self):
        assert policy_recommendation(flat_forecast([5.0] * 30)).verdict == "relax"

    def test_rising_tightens(self):
        adv = policy_recommendation(flat_forecast(np.linspace(6, 50, 30)))
        assert adv.verdict == "tighten" and adv.trend == "rising"
        assert adv.required_test_multiplier == pytest.approx(10.0)

    def test_flat_above_threshold_tightens(self):
        adv = policy_recommendation(flat_forecast([50.0] * 30))
        assert adv.verdict == "tighten"
        assert adv.required_test_multiplier == pytest.approx(10.0)

    def test_falling_maintains(self):
        adv = policy_recommendation(flat_forecast(np.linspace(9, 6, 30)))
        assert adv.verdict == "maintain" and adv.days_below_threshold == 0

    def test_partial_run(self):
        vals = [6.0] * 10 + [4.0] * 20
        adv = policy_recommendation(flat_forecast(vals))
        assert adv.verdict == "maintain" and adv.days_below_threshold == 4

    def test_horizon_shorter_than_window(self):
        with pytest.raises(DomainError):
            policy_recommendation(flat_forecast([1.0] * 10), window=14)


class TestConfig:
    def test_strings_are_parsed(self):
        cfg = PipelineConfig(countries="Spain, Mexico", date_start="2020-05-01", order_mode="1,1,0")
        assert cfg.countries == ("Spain", "Mexico")
        assert cfg.date_start == dt.date(2020, 5, 1)
        assert cfg.order_mode == (1, 1, 0)

    @pytest.mark.parametrize("kw", [
        {"level": 1.0}, {"threshold": 0}, {"horizon": 0}, {"bic_variant": "x"},
        {"date_start": "2020-10-01"},
    ])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            PipelineConfig(**kw)

    def test_from_file(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"countries": ["Spain"], "horizon": 20}))
        cfg = PipelineConfig.from_file(path, horizon=25)
        assert cfg.countries == ("Spain",) and cfg.horizon == 25
        path.write_text(json.dumps({"colour": "red"}))
        with pytest.raises(DomainError):
            PipelineConfig.from_file(path)


class TestRun:
    def test_single_country_outputs(self, tmp_path):
        cfg = PipelineConfig(countries=["Russia"], output_dir=str(tmp_path / "out"))
        (rep,) = run_pipeline(cfg)
        assert rep.ok and rep.order.d >= 1
        names = sorted(p.name for p in (tmp_path / "out").iterdir())
        assert names == sorted([
            "table1.csv", "table2.csv", "policy.csv", "report.json",
            "forecast_Russia.csv", "residuals_Russia.csv", "histogram_Russia.csv", "acf_Russia.csv",
        ])
        first = (tmp_path / "out" / "table1.csv").read_text().splitlines()[0]
        assert first == "Country,P_ADF,p,d,q,AIC,BIC,BoxLjung_p"
        first = (tmp_path / "out" / "forecast_Russia.csv").read_text().splitlines()
        assert first[0] == "date,point,lower,upper" and len(first) == 31

    def test_report_round_trip(self, tmp_path):
        cfg = PipelineConfig(countries=["Mexico"], output_dir=str(tmp_path))
        (rep,) = run_pipeline(cfg)
        (back,) = load_reports(tmp_path / "report.json")
        assert back.order == rep.order
        assert back.policy == rep.policy
        assert back.model.phi == rep.model.phi
        assert back.forecast == rep.forecast

    def test_imputation_failure_is_isolated(self, tmp_path, blanked_fixture):
        out = tmp_path / "out"
        code = cli.main(["run", "--input", str(blanked_fixture), "--countries", "Spain,Russia",
                         "--output-dir", str(out)])
        assert code == cli.EXIT_PARTIAL
        payload = json.loads((out / "report.json").read_text())
        assert [f["country"] for f in payload["failures"]] == ["Spain"]
        assert ImputationImpossible.__name__ in payload["failures"][0]["error"]
        assert "2020-06" in payload["failures"][0]["error"]
        table = (out / "table1.csv").read_text().splitlines()
        assert len(table) == 2 and table[1].startswith("Russia,")

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(ReportIOError):
            emit_reports([], blocker / "sub")

    def test_missing_input_is_config_error(self, tmp_path):
        assert cli.main(["run", "--input", str(tmp_path / "none.csv")]) == cli.EXIT_CONFIG


class TestCli:
    def test_fit_json(self, capsys):
        assert cli.main(["fit", "--country", "Russia", "--order", "0,1,1"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["order"] == [0, 1, 1] and len(out["theta"]) == 1

    def test_adf(self, capsys):
        assert cli.main(["adf", "--country", "India", "--diff", "1"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["regression_kind"] == "constant" and 0 <= out["p_value"] <= 1

    def test_forecast_csv(self, tmp_path):
        path = tmp_path / "f.csv"
        assert cli.main(["forecast", "--country", "Mexico", "--horizon", "5", "--output", str(path)]) == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "date,point,lower,upper" and len(lines) == 6
        assert lines[1].startswith("2020-09-13,50.0000,")

    def test_simulate_feeds_fit(self, tmp_path, capsys):
        path = tmp_path / "sim.csv"
        assert cli.main(["simulate", "--order", "1,0,0", "--phi", "0.6", "--n", "300",
                         "--seed", "3", "--name", "Sim", "--output", str(path)]) == 0
        assert cli.main(["fit", "--input", str(path), "--country", "Sim", "--order", "1,0,0",
                         "--start", "2020-04-01", "--end", "2021-12-31"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert abs(out["phi"][0] - 0.6) < 0.15

    def test_bad_order_rejected(self):
        with pytest.raises(SystemExit):
            cli.main(["fit", "--country", "Spain", "--order", "1,2"])

    def test_unknown_country_exit(self, capsys):
        assert cli.main(["fit", "--country", "Atlantis"]) == cli.EXIT_CONFIG
        assert "Atlantis" in capsys.readouterr().err

    def test_selftest_subset(self, capsys):
        assert cli.main(["selftest", "--only", "7,8,10"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3 and all(line.startswith("[PASS]") for line in lines)


def test_fixture_countries_present():
    with open(BUNDLED_FIXTURE, newline="") as fh:
        names = {r["location"] for r in csv.DictReader(fh)}
    assert set(pipeline.STUDY_COUNTRIES) <= names
