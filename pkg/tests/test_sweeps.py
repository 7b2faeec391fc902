import json
import math

import numpy as np
import pytest

from qsteer.channels import almeida_after_pd
from qsteer.errors import ConfigError
from qsteer.quantifiers import concurrence, f3_steering
from qsteer.states import make_almeida
from qsteer.swapping import swap
from qsteer.sweeps import (
    Axis,
    SweepConfig,
    detect_revival,
    detect_sudden_death,
    evaluate_point,
    figure_config,
    figure_data,
    load_config,
    run_sweep,
)


def small_cfg(**kw):
    base = dict(
        pipeline=("almeida", "channel:pd"),
        quantities=("concurrence",),
        axes=(Axis.linspace("k", 0, 1, 2), Axis.linspace("theta", 0, math.pi / 4, 2)),
        fixed={"p": 0.0},
    )
    base.update(kw)
    return SweepConfig(**base)


def test_grid_is_lexicographic():
    res = run_sweep(small_cfg())
    assert res.points == [(0.0, 0.0), (0.0, math.pi / 4), (1.0, 0.0), (1.0, math.pi / 4)]
    lines = res.to_csv().splitlines()
    assert lines[0] == "k,theta,concurrence"
    assert len(lines) == 5
    assert res.grid("concurrence")[1, 1] == pytest.approx(1, abs=1e-12)


def test_csv_precision():
    res = run_sweep(small_cfg(axes=(Axis("k", (0.8,  0.9)), Axis("theta", (0.3, 0.4)))))
    row = res.to_csv().splitlines()[1].split(",")
    assert row[:2] == ["0.8", "0.3"]
    expected = (3 * 0.8 - 1) * math.sin(0.6) / 2
    assert row[2] == format(expected, ".12g")


@pytest.mark.parametrize(
    "kw",
    [
        dict(pipeline=("channel:pd",)),
        dict(pipeline=("almeida", "channel:xyz")),
        dict(quantities=("fidelity",)),
        dict(quantities=()),
        dict(axes=(Axis("k", (0.5,)),)),
        dict(axes=(Axis("k", (0.5, 0.2)),)),
        dict(axes=(Axis("k", (0.5, 1.2)),)),
        dict(axes=(Axis("k", (0.1, 0.2)), Axis("theta", (0, 0.1)), Axis("p", (0, 1)))),
        dict(fixed={}),
        dict(fixed={"p": 0.1, "k": 0.5}),
        dict(fixed={"p": 0.1, "lambda": 0.5}),
        dict(format="xlsx"),
        dict(boundary_axis="gamma"),
        dict(workers=0),
    ],
)
def test_config_errors(kw):
    with pytest.raises(ConfigError):
        small_cfg(**kw)


def test_from_dict_and_load(tmp_path):
    data = {
        "pipeline": ["almeida", "channel:gad"],
        "quantities": ["steering", "concurrence"],
        "axes": [{"name": "p", "min": 0, "max": 1, "steps": 5}],
        "fixed": {"k": 0.9, "theta": 0.7, "gamma": 0.3},
        "output": {"path": "out.json", "format": "json"},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    cfg = load_config(path)
    assert cfg.format == "json" and cfg.output == "out.json"
    assert cfg.axes[0].values == tuple(np.linspace(0, 1, 5))
    again = SweepConfig.from_dict(cfg.to_dict())
    assert again.axes == cfg.axes and again.fixed == cfg.fixed
    with pytest.raises(ConfigError):
        SweepConfig.from_dict({"axes": []})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_json_output_roundtrip():
    res = run_sweep(small_cfg(format="json"))
    doc = json.loads(res.dumps("json"))
    assert doc["columns"] == ["k", "theta", "concurrence"]
    assert len(doc["rows"]) == 4
    assert doc["rows"][3]["concurrence"] == pytest.approx(1, abs=1e-12)


def test_workers_do_not_change_output():
    cfg = figure_config(5, grid=15)
    assert run_sweep(cfg, workers=1).to_csv() == run_sweep(cfg, workers=2).to_csv()


def test_evaluate_point_matches_direct():
    v = evaluate_point(("almeida", "channel:pd"), ("concurrence", "input_concurrence"), {"k": 0.8, "theta": 0.5, "p": 0.4})
    assert v.values["concurrence"] == pytest.approx(concurrence(almeida_after_pd(0.8, 0.5, 0.4)), abs=1e-12)
    assert v.values["input_concurrence"] == pytest.approx(concurrence(make_almeida(0.8, 0.5)), abs=1e-12)
    assert v.probability is None


def test_zero_probability_swap_points():
    cfg = SweepConfig(("almeida", "swap:3"), ("steering",), (Axis("theta", (0.0, 0.5)),), {"k": 1.0})
    res = run_sweep(cfg)
    assert res.zero_probability.tolist() == [True, False]
    assert math.isnan(res.values["steering"][0])
    row = res.to_csv().splitlines()[1].split(",")
    assert row == ["0", "", "0", "1"]


# detection helpers


def test_detect_sudden_death_examples():
    ps = np.linspace(0, 1, 11)
    assert detect_sudden_death(zip(ps, [max(0, 0.5 - p) for p in ps])) == pytest.approx(0.5)
    refined = detect_sudden_death(zip(ps, [max(0, 0.55 - p) for p in ps]), refine=lambda p: max(0, 0.55 - p))
    assert refined == pytest.approx(0.55, abs=1e-6)
    assert detect_sudden_death(zip(ps, 1 - ps / 2)) is None
    assert detect_sudden_death(zip(ps, np.zeros(11))) is None
    # smooth decay that reaches zero only at the end is not a sudden death
    assert detect_sudden_death(zip(ps, 1 - ps), refine=lambda p: 1 - p) is None


def test_detect_revival_examples():
    ps = np.linspace(0, 1, 21)
    f = lambda p: max(0.0, abs(p - 0.5) - 0.2)  # noqa: E731
    death, revival = detect_revival(zip(ps, map(f, ps)), refine=f)
    assert death == pytest.approx(0.3, abs=1e-6)
    assert revival == pytest.approx(0.7, abs=1e-6)
    assert detect_revival(zip(ps, 1 - ps)) is None
    assert detect_revival(zip(ps, [max(0, 0.5 - p) for p in ps])) is None


def test_boundaries_reported_for_pd():
    res = figure_data(3, grid=11)
    events = [e for e in res.boundaries if e.quantity == "concurrence" and e.kind == "sudden_death"]
    at = {round(e.at["k"], 6): e.death for e in events}
    # theta = pi/4 closed form: C = max(0, k(1 - p) - (1 - k)/2)
    assert at[0.8] == pytest.approx(1 - 0.1 / 0.8, abs=1e-6)
    assert 1.0 not in at


# figure presets


def test_figure1_peak_and_lhs():
    res = figure_data(1, grid=21)
    f3 = res.grid("steering")
    assert f3.max() == pytest.approx(1, abs=1e-12)
    assert f3[-1, -1] == pytest.approx(1, abs=1e-12)
    lhs = res.grid("lhs_admissible").astype(bool)
    assert np.all(f3[lhs] == 0)
    assert "lhs_admissible" not in res.to_csv().splitlines()[0]


def test_figure2_below_figure1():
    f1 = figure_data(1, grid=21)
    f2 = figure_data(2, grid=21)
    for q in ("steering", "concurrence", "discord"):
        assert f2.grid(q).max() < f1.grid(q).max()
        assert np.all(f2.grid(q) <= f1.grid(q) + 1e-12)


def test_figure5_dies_before_figure3():
    f3 = {(round(e.at["k"], 6)): e.death for e in figure_data(3, grid=21).boundaries
          if e.quantity == "concurrence" and e.kind == "sudden_death"}
    f5 = {(round(e.at["k"], 6)): e.death for e in figure_data(5, grid=21).boundaries
          if e.quantity == "concurrence" and e.kind == "sudden_death"}
    common = set(f3) & set(f5)
    assert common
    for k in common:
        assert f5[k] < f3[k]


def test_figure4_steering_revival():
    res = figure_data(4, grid=41)
    revs = [e for e in res.boundaries if e.kind == "revival" and e.quantity == "steering"]
    assert revs
    assert any(abs(e.at["theta"] - math.pi / 4) < 0.1 for e in revs)


def test_figure6_swap_phi1_degrades():
    res = figure_data(6, grid=11)
    for q in ("concurrence", "steering"):
        out, inp = res.column(q), res.column(f"input_{q}")
        ok = ~np.isnan(out)
        assert np.all(out[ok] <= inp[ok] + 1e-10)
    row = res.grid("concurrence")[-1]
    assert np.all(row[1:-1] > 0) and np.all(row[1:-1] < res.grid("input_concurrence")[-1][1:-1])


def test_figure7_k1_row_is_maximal():
    res = figure_data(7, grid=11)
    for q in ("steering", "concurrence", "discord"):
        row = res.grid(q)[-1]
        assert math.isnan(row[0])
        assert np.allclose(row[1:], 1, atol=1e-10)


def test_figure8_enhancement_with_vanishing_probability():
    res = figure_data(8, grid=41)
    assert res.metadata["theta_points"] == 41
    f3 = res.grid("steering")
    inp = res.grid("input_steering")
    phi3 = f3[1, 1:]
    assert np.allclose(phi3, 1, atol=1e-10)
    assert np.all(inp[1, 1:-1] < 1)
    prob = res.probability.reshape(res.shape)[1]
    assert prob[1] < 1e-3


def test_figure9_tradeoff():
    res = figure_data(9, grid=81)
    thetas = res.grid("theta")[1]
    f3, inp = res.grid("steering")[1], res.grid("input_steering")[1]
    prob = res.probability.reshape(res.shape)[1]
    window = (f3 > inp + 1e-12) & (prob >= 0.08) & (prob <= 0.18)
    assert window.any()
    assert thetas[window].min() > 0.2 and thetas[window].max() < 0.55


def test_enhancement_near_unit_k():
    for k in (0.95, 0.97, 0.99):
        theta = 0.4
        rho = make_almeida(k, theta)
        assert f3_steering(swap(rho, rho, 3).state) > f3_steering(rho)


@pytest.mark.parametrize("fid", ["B1", "B2", "B3", 10, 11, 12])
def test_appendix_presets_run(fid):
    res = figure_data(fid, grid=6)
    assert res.shape == (6, 6)
    assert "p" in res.axis_names


def test_unknown_figure():
    with pytest.raises(ConfigError):
        figure_config(13)
    with pytest.raises(ConfigError):
        figure_config("Z")
