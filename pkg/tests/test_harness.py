import json
import logging
import math

import numpy as np
import pandas as pd
import pytest
import yaml

from harness import sweep
from harness.effort import effort_report, fundamental_speed
from harness.fitting import fit_loglog, fit_plane, fit_table, slope_within
from harness.main import build_parser, main
from harness.reports import read_summary, write_summary, write_table
from harness.sweep import SweepPlan, build_sweep_plan, run_sweep


def test_effort_numbers():
    report = effort_report(0.1, 1.0, 1.0, 1.0, 2.0)
    assert report.E == pytest.approx(0.1)
    assert report.F == pytest.approx(0.2)
    assert report.B == pytest.approx(0.02)
    assert report.e_num == pytest.approx(2500.0)
    assert report.to_dict()["lambda"] == pytest.approx(0.01)
    assert not report.degenerate


def test_effort_scales_quadratically():
    coarse = effort_report(0.1, 1.0, 1.0, 1.0, 2.0)
    fine = effort_report(0.05, 1.0, 1.0, 1.0, 2.0)
    assert fine.B == pytest.approx(coarse.B / 4.0)
    assert fine.e_num == pytest.approx(16.0 * coarse.e_num)


def test_effort_degenerate_branch():
    coarse = effort_report(0.1, 1.0, 0.0, 1.0, 2.0)
    fine = effort_report(0.025, 1.0, 0.0, 1.0, 2.0)
    assert coarse.degenerate
    assert coarse.F == pytest.approx(math.sqrt(0.1))
    # B ∝ ℰ^{3/2}
    assert coarse.B / fine.B == pytest.approx(4.0 ** 1.5)


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0, 1.0, 2.0), (0.1, -1.0, 1.0, 1.0, 2.0),
                                  (0.1, 1.0, -0.5, 1.0, 2.0), (0.1, 1.0, 1.0, 1.0, 0.0)])
def test_effort_rejects_bad_inputs(args):
    with pytest.raises(ValueError):
        effort_report(*args)


def test_fundamental_speed():
    assert fundamental_speed(-0.03, 0.5, 0.2, 0.01, 1.0, 0.3) == pytest.approx(-0.1 + 0.1 + 0.01)


def test_fit_loglog_slope():
    x = np.array([1e-3, 2e-3, 4e-3, 8e-3])
    fit = fit_loglog(x, 3.0 * x ** 1.5, "demo")
    assert fit.slope == pytest.approx(1.5)
    assert fit.intercept == pytest.approx(math.log(3.0))
    assert fit.residual < 1e-12
    assert fit.to_dict()["count"] == 4


def test_fit_needs_four_points():
    with pytest.raises(ValueError):
        fit_loglog([1.0, 2.0, 4.0], [1.0, 2.0, 4.0], "short")
    # нули и NaN не считаются
    with pytest.raises(ValueError):
        fit_loglog([1.0, 2.0, 4.0, 8.0], [1.0, 0.0, np.nan, 2.0], "holes")


def test_fit_plane():
    mu, lam = np.meshgrid([1e-3, 2e-3, 4e-3], [0.01, 0.04])
    y = 2.0 * mu ** 0.5 * lam
    fit = fit_plane(mu.ravel(), lam.ravel(), y.ravel(), "plane")
    assert fit.slope == pytest.approx(0.5)
    assert fit.slope_lambda == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fit_plane([1e-3, 2e-3, 4e-3, 8e-3], [0.04] * 4, [1.0, 2.0, 3.0, 4.0], "flat")


def test_fit_table_collects_errors():
    table = pd.DataFrame({
        "mu": [1e-3, 2e-3, 4e-3, 8e-3, 1e-3],
        "lambda": [0.04, 0.04, 0.04, 0.04, 0.01],
        "value": [1e-3, 2e-3, 4e-3, 8e-3, 5.0],
    })
    result = fit_table(table, "value")
    names = [fit["name"] for fit in result["fits"]]
    assert "value ~ mu @ lambda=0.04" in names
    assert result["fits"][names.index("value ~ mu @ lambda=0.04")]["slope"] == pytest.approx(1.0)
    assert result["errors"]
    assert fit_table(table, "missing")["fits"] == []


def test_slope_within():
    assert slope_within(0.5, (0.45, 0.55))
    assert not slope_within(float("nan"), (0.45, 0.55))
    assert slope_within(3.0, (0.85, math.inf))


def test_summary_roundtrip_nulls_nan(tmp_path):
    path = write_summary({"a": float("nan"), "b": np.float64(1.5), "c": [np.int64(2), np.inf],
                          "d": np.array([1.0, 2.0]), "ok": np.bool_(True)}, str(tmp_path / "s" / "summary.json"))
    data = read_summary(path)
    assert data == {"a": None, "b": 1.5, "c": [2, None], "d": [1.0, 2.0], "ok": True}
    with pytest.raises(FileNotFoundError):
        read_summary(str(tmp_path / "absent.json"))


def test_write_table_sorts_and_checks_columns(tmp_path):
    table = pd.DataFrame({"mu": [2e-3, 1e-3], "lambda": [0.04, 0.04], "v": [2.0, 1.0]})
    path = write_table(table, str(tmp_path / "t.csv"), columns=["mu", "lambda", "v"])
    assert list(pd.read_csv(path)["v"]) == [1.0, 2.0]
    with pytest.raises(ValueError):
        write_table(table, str(tmp_path / "bad.csv"), columns=["mu", "absent"])


def test_sweep_plan_validation(settings):
    with pytest.raises(ValueError):
        SweepPlan(kind="bogus", mus=(1e-3,), lams=(0.04,), settings=settings)
    with pytest.raises(ValueError):
        SweepPlan(kind="width", mus=(), lams=(0.04,), settings=settings)
    with pytest.raises(ValueError):
        SweepPlan(kind="radial", mus=(1e-3,), lams=(0.04,), settings=settings)
    with pytest.raises(ValueError):
        SweepPlan(kind="width", mus=(0.5,), lams=(0.04,), settings=settings)
    # зона сращивания шире окрестности границы
    with pytest.raises(ValueError):
        SweepPlan(kind="width", mus=(0.1,), lams=(1.0,), settings=settings)


def test_sweep_plan_from_settings(settings):
    plan = build_sweep_plan(settings)
    assert plan.kind == "speed"
    assert plan.points()[0] == (5e-4, 0.04)
    assert plan.neighbourhood() == 0.5


def test_run_sweep_with_failing_point(settings, monkeypatch, tmp_path):
    def fake_width(settings, mu, lam, measure_time, refine_check):
        if mu == 8e-3 and lam == 0.04:
            raise RuntimeError("не сошлось")
        return {"mu": mu, "lambda": lam, "width": 3.0 * math.sqrt(mu * lam), "width_ratio": 3.0}

    monkeypatch.setitem(sweep.POINT_RUNNERS, "width", fake_width)
    plan = SweepPlan(kind="width", mus=(1e-3, 2e-3, 4e-3, 8e-3, 1e-2), lams=(0.01, 0.04),
                     settings=settings, out_dir=str(tmp_path))
    result = run_sweep(plan)

    assert result.summary["failed"] == 1
    assert result.summary["errors"][0]["error"].startswith("RuntimeError")
    assert result.summary["width_ratio_mean"] == pytest.approx(3.0)
    fits = result.fits["width"]["fits"]
    assert fits and all(fit["within_band"] for fit in fits)
    plane = [fit for fit in fits if "slope_lambda" in fit]
    assert plane and plane[0]["slope_lambda"] == pytest.approx(0.5)

    table = pd.read_csv(tmp_path / "sweep.csv")
    assert len(table) == 10
    assert list(table["mu"]) == sorted(table["mu"])
    assert read_summary(str(tmp_path / "summary.json"))["failed"] == 1


@pytest.mark.slow
def test_speed_sweep_slopes_and_certificates(settings):
    result = run_sweep(build_sweep_plan(settings))
    summary = result.summary
    assert summary["failed"] == 0
    assert summary["all_certificates_ok"] is True
    for column in ("model_error", "remainder_s10"):
        # подгонка против μ|ln μ|³ справочная и в полосы не входит
        fits = [fit for fit in result.fits[column]["fits"] if "within_band" in fit]
        assert fits and all(fit["within_band"] for fit in fits), fits


@pytest.mark.slow
def test_width_sweep_on_grid(settings):
    plan = SweepPlan(kind="width", mus=(1e-3, 2e-3, 4e-3), lams=(0.01, 0.02, 0.04), settings=settings,
                     measure_time=settings["sweep"]["measure_time"])
    result = run_sweep(plan)
    summary = result.summary
    assert summary["failed"] == 0
    assert summary["width_ratio_spread"] <= 0.05
    assert summary["width_ratio_mean"] == pytest.approx(math.sqrt(2.0) * math.log(9.0), rel=0.03)
    # по три точки на прямую мало: остаётся совместная подгонка по (μ, λ)
    plane = [fit for fit in result.fits["width"]["fits"] if "slope_lambda" in fit]
    assert len(plane) == 1
    assert plane[0]["within_band"], plane[0]



def test_run_sweep_flags_energy_growth(settings, monkeypatch):
    def fake_width(settings, mu, lam, measure_time, refine_check):
        return {"mu": mu, "lambda": lam, "width": 3.0 * math.sqrt(mu * lam), "width_ratio": 3.0,
                "energy_increase": 1e-6 if mu == 2e-3 else 0.0, "energy_ok": mu != 2e-3}

    monkeypatch.setitem(sweep.POINT_RUNNERS, "width", fake_width)
    plan = SweepPlan(kind="width", mus=(1e-3, 2e-3, 4e-3, 8e-3), lams=(0.04,), settings=settings)
    summary = run_sweep(plan).summary
    assert summary["energy_violations"] == [{"mu": 2e-3, "lambda": 0.04}]
    assert summary["failed"] == 0


def test_run_sweep_rejects_jobs(settings):
    plan = SweepPlan(kind="width", mus=(1e-3,), lams=(0.04,), settings=settings)
    with pytest.raises(ValueError):
        run_sweep(plan, jobs=0)


def test_parser_rejects_unknown_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["plot"])
    args = build_parser().parse_args(["sweep", "--jobs", "4"])
    assert args.jobs == 4 and args.out == "output"


def test_main_effort(tmp_path):
    config = tmp_path / "settings.yaml"
    config.write_text(yaml.safe_dump({"effort": {"target_error": 0.1, "power": 2.0},
                                      "logging": {"level": "WARNING"}}), encoding="utf-8")
    out = tmp_path / "out"
    summary = main(["effort", "--config", str(config), "--out", str(out)])
    assert summary["B"] == pytest.approx(0.02)
    with open(out / "summary.json", encoding="utf-8") as f:
        assert json.load(f)["e_num"] == pytest.approx(2500.0)


def test_main_kinetics(tmp_path):
    config = tmp_path / "settings.yaml"
    config.write_text("", encoding="utf-8")
    summary = main(["kinetics", "--config", str(config), "--out", str(tmp_path / "out")])
    assert summary["bar"]["coefficients"]["s00"] == pytest.approx(-0.1272792, abs=1e-7)
    synthetic = summary["synthetic"]
    assert synthetic["sharp_speed"] == pytest.approx(synthetic["s0"], rel=1e-8)


def test_main_reraises_failures(tmp_path):
    config = tmp_path / "settings.yaml"
    config.write_text(yaml.safe_dump({"effort": {"target_error": -1.0}}), encoding="utf-8")
    with pytest.raises(ValueError):
        main(["effort", "--config", str(config), "--out", str(tmp_path / "out")])


def test_main_logs_missing_config(tmp_path, caplog):
    missing = tmp_path / "absent.yaml"
    with caplog.at_level(logging.ERROR, logger="harness.main"):
        with pytest.raises(FileNotFoundError):
            main(["effort", "--config", str(missing), "--out", str(tmp_path / "out")])
    assert "Критическая ошибка" in caplog.text
