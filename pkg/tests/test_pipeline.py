import json
import math
import xml.etree.ElementTree as ET
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from photontriplets.coincidence import invert_coincidence_fraction
from photontriplets.config import SCHEMA, TOP_LEVEL, default_config_dict, load_config
from photontriplets.errors import ConfigError, DegenerateRangeError, OutputError
from photontriplets.pipeline import (
    CSV_COLUMNS,
    DataPoint,
    absolute_curve,
    builtin_table1,
    emit_csv,
    emit_svg_plot,
    fit_scale_factor,
    fit_tf_to_data,
    load_dataset_csv,
    model_curve_absolute,
    model_curve_normalized,
    normalize,
    normalized_error_bars,
    normalized_plot_series,
    read_csv,
    report,
    rows_to_csv,
    run_set,
)
from photontriplets.svgplot import AxesSpec, PlotSeries, render_svg

SVG = "{http://www.w3.org/2000/svg}"
# -ln(1 - sqrt(14.3e-3)) / -ln(1 - sqrt(0.567e-3)), mpmath
SET_A_MEASURED_RATIO = 5.28465


@pytest.fixture(scope="module")
def set_a(default_cfg):
    return run_set("A", default_cfg)


@pytest.fixture(scope="module")
def set_b(default_cfg):
    return run_set("B", default_cfg)


class TestTable:
    def test_counts(self):
        rows = builtin_table1()
        assert len(rows) == 8
        assert sum(r.set_label == "A" for r in rows) == 5
        assert sum(r.set_label == "B" for r in rows) == 3

    def test_values(self):
        rows = builtin_table1()
        assert rows[0].eta_hat == pytest.approx(0.567e-3)
        assert rows[4].stimulation_energy == 11.2 and rows[4].eta_err == pytest.approx(3.42e-3)
        assert all(r.pump_energy == 19.3 and r.pump_err == 4.7 for r in rows[:5])
        assert all(r.stimulation_energy == 19.0 and r.stimulation_err == 3.8 for r in rows[5:])
        assert all(min(r.pump_err, r.stimulation_err, r.eta_err) > 0 for r in rows)

    def test_datapoint_validation(self):
        with pytest.raises(ConfigError):
            DataPoint("C", 1, 0, 1, 0, 0, 0)
        with pytest.raises(ConfigError):
            DataPoint("A", 0, 0, 1, 0, 0, 0)
        with pytest.raises(ConfigError):
            DataPoint("A", 1, 0, 1, 0, -1e-3, 0)


class TestConfig:
    def test_default_inputs(self, default_cfg):
        assert default_cfg.pump_energy == pytest.approx(19.3e-6)
        assert default_cfg.stimulation_energy == pytest.approx(11.2e-6)
        assert default_cfg.transfer_function == 0.11
        assert default_cfg.interaction().gamma == 0.537
        assert default_cfg.crystal.length == pytest.approx(0.01)

    def test_every_symbol_is_settable(self, default_cfg):
        cfg = load_config(overrides={"crystal": {"length_mm": 20}, "model": {"gamma_override": None},
                                     "pump": {"waist_um": 50}})
        assert cfg.crystal.length == pytest.approx(0.02)
        assert cfg.interaction().gamma == pytest.approx(1 - math.exp(-2 * (50 / 72.5) ** 2))

    def test_schema_covers_default_file(self):
        d = default_config_dict()
        assert set(d) == set(SCHEMA) | set(TOP_LEVEL)
        for section, keys in SCHEMA.items():
            assert set(d[section]) == set(keys)

    def test_missing_keys_are_listed(self):
        d = default_config_dict()
        del d["crystal"]["length_mm"]
        del d["pump"]["waist_um"]
        from photontriplets.config import ExperimentConfig

        with pytest.raises(ConfigError) as info:
            ExperimentConfig.from_dict(d)
        assert "crystal.length_mm" in str(info.value) and "pump.waist_um" in str(info.value)

    def test_unknown_key(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"pump": {"energy_mJ": 1}}))
        with pytest.raises(ConfigError, match="pump.energy_mJ"):
            load_config(p)

    def test_bad_values(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(overrides={"detection": {"transfer_function": 1.5}})
        with pytest.raises(ConfigError):
            load_config(overrides={"crystal": {"length_mm": -1}})
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(bad)

    def test_fit_directive(self):
        cfg = load_config(overrides={"detection": {"transfer_function": "fit"}})
        assert cfg.transfer_function == "fit"
        with pytest.raises(ConfigError):
            cfg.detection()


class TestRunSet:
    def test_normalisation_anchor(self, set_a, set_b):
        for rows in (set_a, set_b):
            assert rows[0].norm_measured == 1.0 and rows[0].norm_model == 1.0 and rows[0].residual == 0.0

    def test_sorted_by_scanned_energy(self, set_a, set_b):
        assert [r.xi_sti_uJ for r in set_a] == [3.04, 5.01, 7.4, 9.0, 11.2]
        assert [r.xi_p_uJ for r in set_b] == [8.1, 8.8, 9.5]

    def test_measured_ratio(self, set_a):
        assert set_a[-1].n_measured / set_a[0].n_measured == pytest.approx(SET_A_MEASURED_RATIO, rel=1e-5)

    def test_measured_monotone_in_eta(self, set_a, set_b):
        rows = sorted(set_a + set_b, key=lambda r: r.eta_hat)
        n = [r.n_measured for r in rows]
        assert all(a < b for a, b in zip(n, n[1:]))

    def test_intervals(self, set_a, set_b):
        for r in set_a + set_b:
            assert r.n_meas_lo < r.n_measured < r.n_meas_hi
            assert r.n_meas_hi == pytest.approx(invert_coincidence_fraction(r.eta_hat + r.eta_err, 0.11))

    def test_model_ratio_in_measured_band(self, set_a):
        lo, hi = normalized_error_bars(set_a)
        assert lo[-1] <= set_a[-1].norm_model <= hi[-1]

    def test_missing_set(self, default_cfg):
        with pytest.raises(ConfigError):
            run_set("B", default_cfg, data=builtin_table1()[:5])

    @given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=10))
    def test_normalize_idempotent(self, values):
        once = normalize(values)
        assert np.allclose(normalize(once), once, rtol=1e-15, atol=0)

    def test_error_bars_contain_points(self, set_a, set_b):
        for rows in (set_a, set_b):
            lo, hi = normalized_error_bars(rows)
            norm = np.array([r.norm_measured for r in rows])
            assert np.all(lo <= norm) and np.all(norm <= hi)


class TestAbsolute:
    def test_endpoints(self, default_cfg):
        pts = absolute_curve(default_cfg)
        a = [p for p in pts if p.set_label == "A"]
        assert a[0].measured_per_s == pytest.approx(2.2, rel=0.02)
        assert a[-1].measured_per_s == pytest.approx(11.6, rel=0.02)
        prods = [p.energy_product_uJ2 for p in pts]
        assert prods == sorted(prods)

    def test_model_curve_monotone(self, default_cfg):
        pts = absolute_curve(default_cfg)
        xs, ys = model_curve_absolute(default_cfg, pts)
        assert len(xs) == 100 and np.all(np.diff(ys) > 0)

    def test_scale_factor(self, default_cfg):
        s = fit_scale_factor(absolute_curve(default_cfg))
        assert 0.1 <= s <= 10

    def test_scale_factor_exact(self, default_cfg):
        pts = [replace(p, measured_per_s=3 * p.model_per_s, measured_lo=2 * p.model_per_s,
                       measured_hi=4 * p.model_per_s) for p in absolute_curve(default_cfg)]
        assert fit_scale_factor(pts) == pytest.approx(3.0, rel=1e-12)


class TestFit:
    def test_fit_runs_on_table(self, default_cfg):
        fit = fit_tf_to_data(default_cfg)
        assert 0.02 <= fit.low <= fit.value <= fit.high <= 0.2


class TestCsv:
    def test_layout(self, set_a, set_b):
        text = rows_to_csv(set_a + set_b)
        lines = text.split("\n")
        assert lines[-1] == "" and len(lines) == 10
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert '"' not in text and "\r" not in text
        assert rows_to_csv([]) == ",".join(CSV_COLUMNS) + "\n"

    def test_roundtrip(self, tmp_path, set_a, set_b):
        rows = set_a + set_b
        p = emit_csv(rows, tmp_path / "sub" / "rows.csv")
        back = read_csv(p)
        assert len(back) == len(rows)
        for a, b in zip(rows, back):
            assert a.set_label == b.set_label
            for f in CSV_COLUMNS[1:]:
                assert getattr(b, f) == pytest.approx(getattr(a, f), rel=1e-9)

    def test_pure_function(self, default_cfg):
        assert rows_to_csv(run_set("A", default_cfg)) == rows_to_csv(run_set("A", default_cfg))

    def test_report_csv_as_dataset(self, tmp_path, set_a, set_b):
        p = emit_csv(set_a + set_b, tmp_path / "d.csv")
        data = load_dataset_csv(p)
        assert [(d.pump_energy, d.stimulation_energy, d.eta_hat) for d in data] == \
               [(r.xi_p_uJ, r.xi_sti_uJ, r.eta_hat) for r in set_a + set_b]

    def test_dataset_missing_column(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("set,xi_p_uJ\nA,1\n")
        with pytest.raises(ConfigError, match="xi_sti_uJ"):
            load_dataset_csv(p)

    def test_unwritable(self, tmp_path, set_a):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(OutputError) as info:
            emit_csv(set_a, blocker / "rows.csv")
        assert str(blocker) in str(info.value)


class TestSvg:
    def test_set_a_structure(self, default_cfg, set_a, tmp_path):
        series = normalized_plot_series(set_a, model_curve_normalized(default_cfg, set_a))
        p = emit_svg_plot(series, AxesSpec("t", "x", "y"), tmp_path / "a.svg")
        root = ET.parse(p).getroot()
        assert root.tag == SVG + "svg"
        points = root.findall(f".//{SVG}g[@class='point']")
        assert len(points) == 5
        for g in points:
            assert g.find(f"{SVG}line[@class='errorbar']") is not None
            assert g.find(f"{SVG}circle[@class='marker']") is not None
        lines = root.findall(f".//{SVG}polyline[@class='model']")
        assert len(lines) == 1 and len(lines[0].get("points").split()) == 100
        legend = root.find(f".//{SVG}g[@class='legend']")
        texts = [t.text for t in legend.iter(f"{SVG}text")]
        assert len(texts) == 2 and texts[0] != texts[1]

    def test_log_zero_names_row(self):
        s = PlotSeries(["A:1", "A:2", "A:3"], [1, 2, 3], [1.0, 0.0, 2.0], [0.5, 0, 1], [1.5, 1, 3])
        with pytest.raises(DegenerateRangeError, match="A:2"):
            render_svg(s, AxesSpec("t", "x", "y", log=True))

    def test_degenerate_range(self):
        s = PlotSeries(["a", "b"], [1, 1], [1, 1], [1, 1], [1, 1])
        with pytest.raises(DegenerateRangeError):
            render_svg(s, AxesSpec("t", "x", "y"))
        with pytest.raises(DegenerateRangeError):
            render_svg(PlotSeries([], [], [], [], []), AxesSpec("t", "x", "y"))

    def test_escaping(self):
        s = PlotSeries(["<a&b>"], [1], [1], [0.5], [2], [0.5, 2], [0.5, 2], "m<", "o&")
        ET.fromstring(render_svg(s, AxesSpec("a<b & c", "x", "y")))


class TestReport:
    def test_files_and_determinism(self, default_cfg, tmp_path):
        a = report(default_cfg, tmp_path / "a")
        b = report(default_cfg, tmp_path / "b")
        assert sorted(p.name for p in a.values()) == sorted(
            ["set_A.csv", "set_B.csv", "absolute.csv", "fig3_set_A_normalized.svg",
             "fig4_set_B_normalized.svg", "fig5_absolute.svg"])
        for k in a:
            assert a[k].read_bytes() == b[k].read_bytes()
        ET.parse(a["fig5_svg"])
        assert not list((tmp_path / "a").glob(".*tmp"))
