import io
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wqed import Axis, ConfigError, ScanSpec, run_scan
from wqed.scan import PRESETS, format_number, preset, thread_count, write_csv, write_json


def _csv(result):
    stream = io.StringIO()
    write_csv(result, stream)
    return stream.getvalue()


@pytest.mark.parametrize(
    "axis",
    [
        Axis("gamma", 1.0, 2.0, 1),
        Axis("gamma", 2.0, 1.0, 5),
        Axis("u", 0.0, 1.0, 5, "log"),
        Axis("u", 0.1, 1.0, 5, "cubic"),
        Axis("volume", 0.1, 1.0, 5),
    ],
)
def test_invalid_axes(axis):
    with pytest.raises(ConfigError):
        run_scan(ScanSpec(("eta_t",), (axis,)))


def test_invalid_specs():
    with pytest.raises(ConfigError):
        run_scan(ScanSpec(("g2",), (Axis("gamma", 1, 2, 3),)))
    with pytest.raises(ConfigError):
        run_scan(ScanSpec(("eta_t",), (Axis("u", 1, 2, 3), Axis("u", 1, 2, 3))))
    with pytest.raises(ConfigError):
        run_scan(ScanSpec(("eta_t",), (Axis("kappa", 1, 2, 3),)))
    with pytest.raises(ConfigError):
        run_scan(ScanSpec(("eta_t",), ()))


def test_row_major_order_and_header():
    spec = ScanSpec(("eta_t", "t_bar"), (Axis("gamma", 1.0, 2.0, 2), Axis("u", 1.0, 3.0, 3)))
    lines = _csv(run_scan(spec)).splitlines()
    assert lines[0] == "gamma,u,eta_t,t_bar_re,t_bar_im"
    cells = [line.split(",")[:2] for line in lines[1:]]
    assert cells == [["1", "1"], ["1", "2"], ["1", "3"], ["2", "1"], ["2", "2"], ["2", "3"]]


def test_output_ends_with_newline_and_uses_nine_digits():
    text = _csv(run_scan(ScanSpec(("eta_t",), (Axis("gamma", 1.0, 1.5, 2),), {"u": 10.0})))
    assert text.endswith("\n")
    assert text.splitlines()[1] == "1,0.0099009901"
    assert format_number(np.pi) == "3.14159265"
    assert format_number(-0.0) == "0"
    assert format_number(np.nan) == "NA"


def test_undefined_cells_are_na():
    spec = ScanSpec(("eta_r", "q"), (Axis("delta_a", -1.0, 1.0, 5),), {"gamma": 0.0, "u": 1.0})
    rows = [line.split(",") for line in _csv(run_scan(spec)).splitlines()[1:]]
    assert all(row[1] == "NA" for row in rows)
    assert rows[2][2] == "NA"
    assert rows[0][2] != "NA"


def test_pole_only_blanks_its_cell():
    spec = ScanSpec(("t_bar",), (Axis("delta1", -1.0, 1.0, 3),), {"gamma": 0.0, "kappa": 0.0}, kappa_units=False)
    rows = _csv(run_scan(spec)).splitlines()[1:]
    assert rows[1] == "0,NA,NA"
    assert rows[0] == "-1,1,0"


def test_deterministic_across_thread_counts():
    spec = PRESETS["fig5a"]
    assert _csv(run_scan(spec, threads=1)) == _csv(run_scan(spec, threads=4))


def test_thread_count_from_environment(monkeypatch):
    monkeypatch.setenv("WQED_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("WQED_THREADS", "zero")
    with pytest.raises(ConfigError):
        thread_count()


def test_kappa_units_scale_frequencies_and_lengths():
    relative = ScanSpec(("eta_t",), (Axis("gamma", 1.0, 2.0, 2),), {"kappa": 2.0, "u": 10.0, "x": 0.5})
    absolute = ScanSpec(
        ("eta_t",), (Axis("gamma", 2.0, 4.0, 2),), {"kappa": 2.0, "u": 20.0, "x": 0.25}, kappa_units=False
    )
    a, b = run_scan(relative).column("eta_t"), run_scan(absolute).column("eta_t")
    assert np.allclose(a, b, rtol=1e-13)


def test_json_output():
    stream = io.StringIO()
    write_json(run_scan(ScanSpec(("eta_r",), (Axis("gamma", 0.0, 1.0, 2),), {"u": 1.0})), stream)
    data = json.loads(stream.getvalue())
    assert data["columns"] == ["gamma", "eta_r"]
    assert data["rows"][0]["eta_r"] == "NA"
    assert isinstance(data["rows"][1]["eta_r"], float)


@given(st.sampled_from(sorted(PRESETS)))
def test_presets_are_valid(name):
    preset(name).validate()


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("fig9")


def test_fig2c_values():
    result = run_scan(preset("fig2c"))
    gamma, eta = result.column("gamma"), result.column("eta_t")
    at_one = np.argmin(np.abs(gamma - 1.0))
    assert abs(eta[at_one] - 1 / 101) < 1e-9
    assert 0.8 <= gamma[np.argmin(eta)] <= 1.2
    assert np.all(eta[gamma >= 1.5] > 1.0)


def test_fig4a_values():
    result = run_scan(preset("fig4a"))
    eta_t = result.column("eta_t")
    best = np.argmin(eta_t)
    assert result.column("delta_a")[best] == pytest.approx(0.5, abs=1e-12)
    assert eta_t[best] < 5e-4
    assert 0.9 <= result.column("eta_r")[best] <= 1.1


def test_fig5b_optimal_curve():
    result = run_scan(preset("fig5b"))
    for gamma in (10.0, 100.0, 1000.0):
        rows = np.isclose(result.column("gamma"), gamma)
        u = result.column("u")[rows][np.argmin(result.column("eta_t")[rows])]
        assert abs(u * gamma - 1.0) < 0.15
