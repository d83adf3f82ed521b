import csv
import json
import math

import numpy as np
import pytest

from haulcycle import study
from haulcycle.errors import ConfigError
from oracles import read_golden

LABEL_KEYS = {v: k for k, v in study.LABELS.items()}


def analytic_only(cfg):
    import dataclasses
    return dataclasses.replace(cfg, algorithms=tuple(a for a in cfg.algorithms if a != "sim"))


def small_config(**over):
    raw = study.bundled_config("paper_base").to_dict()
    raw.update({"simulation": {"horizon": 20000, "warmup": 0, "seed": 3}})
    raw.pop("reference")
    raw.update(over)
    return study.parse_config(raw)


def test_bundled_configs():
    base = study.bundled_config("paper_base")
    assert [n["mean"] for n in base.nodes] == [1.5, 6.0, 1.0, 4.0]
    assert [n["cv"] for n in base.nodes] == [0.25, 0.2, 0.1, 0.2]
    np.testing.assert_allclose(base.network().variances, [0.140625, 1.44, 0.01, 0.64])
    assert base.disturbance is None and base.ks == list(range(1, 11))
    dist = study.bundled_config("paper_disturbed")
    assert dist.disturbance == {"mean_uptime": 300, "mean_repair": 30}
    assert dist.disturbance_spec().alpha == pytest.approx(1 / 300)


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d.pop("nodes"), "nodes"),
    (lambda d: d.update(nodes=[]), "nodes"),
    (lambda d: d["nodes"][1].update(kind="multi"), "nodes[1].kind"),
    (lambda d: d["nodes"][2].update(mean=-1), "nodes[2].mean"),
    (lambda d: d["nodes"][0].pop("cv"), "nodes[0].cv"),
    (lambda d: d.update(k_range=[3, 2]), "k_range"),
    (lambda d: d.update(k_range=[0, 2]), "k_range"),
    (lambda d: d.update(algorithms=["mva", "magic"]), "algorithms"),
    (lambda d: d.update(algorithms=["stst-m"]), "disturbance"),
    (lambda d: (d.pop("reference"), d.update(algorithms=["gn-exact"], k_range=[1, 200])), "algorithms"),
    (lambda d: d.update(simulation={"horizon": 10, "warmup": 20}), "simulation.horizon"),
    (lambda d: d.update(simulation={"seed": -1}), "simulation.seed"),
    (lambda d: d.update(output={"format": "xlsx"}), "output.format"),
    (lambda d: d.update(eps=0), "eps"),
    (lambda d: d.update(reference={"idle": [0.5]}), "reference.idle"),
    (lambda d: d.update(disturbance={"mean_uptime": 300}), "disturbance.mean_repair"),
])
def test_validation_names_field(mutate, field):
    raw = study.bundled_config("paper_base").to_dict()
    mutate(raw)
    with pytest.raises(ConfigError) as exc:
        study.parse_config(raw)
    assert exc.value.field == field


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nodes: ")
    with pytest.raises(ConfigError):
        study.load_config(p)


@pytest.mark.parametrize("name", ["paper_base", "paper_disturbed"])
def test_config_roundtrip(tmp_path, name):
    cfg = study.bundled_config(name)
    p = tmp_path / "cfg.json"
    study.dump_config(cfg, p)
    assert study.load_config(p) == cfg
    assert study.parse_config(json.loads(p.read_text())) == cfg


def _check_rows(table, golden):
    for label, cells in golden.items():
        if label == "simulation":
            continue
        got = table.rows[LABEL_KEYS[label]]
        assert [f"{v:.3f}" for v in got] == [c for c, _ in cells], label


def test_base_study_reproduces_published_rows():
    table = study.run_study(analytic_only(study.bundled_config("paper_base")))
    _check_rows(table, read_golden("table4.csv"))
    assert table.notes  # bottleneck tie at K = 4 recorded


def test_disturbed_study_reproduces_published_rows():
    table = study.run_study(analytic_only(study.bundled_config("paper_disturbed")))
    _check_rows(table, read_golden("table6.csv"))
    assert table.modified_moments.mean == pytest.approx(1.649603, abs=1e-6)
    for K in range(3, 10):
        assert table.best[K] == ["stst-m"]


def test_errors_require_reference_or_sim():
    cfg = small_config(algorithms=["mva", "stst"])
    t = study.run_study(cfg)
    assert not t.abs_errors and t.reference is None
    t2 = study.run_study(small_config(algorithms=["sim", "mva", "stst"]))
    assert set(t2.abs_errors) == {"mva", "stst"}
    np.testing.assert_allclose(t2.abs_errors["mva"], np.abs(np.array(t2.rows["mva"]) - t2.rows["sim"]))


def test_best_marks_ties():
    t = study.run_study(analytic_only(study.bundled_config("paper_base")))
    assert set(t.best[1]) == {"flow", "mva", "stst", "esum", "ebott"}


def test_failed_cells_render_err(tmp_path):
    raw = study.bundled_config("paper_base").to_dict()
    raw["nodes"][0]["mean"] = 0.5  # loading faster than unloading: flow model refuses
    raw["algorithms"] = ["flow", "mva"]
    raw.pop("reference")
    t = study.run_study(study.parse_config(raw))
    assert all(math.isnan(v) for v in t.rows["flow"])
    assert len(t.diagnostics) == 10 and "AssumptionViolated" in t.diagnostics[0]
    md = study.render_markdown(t)
    assert "ERR" in md and "Diagnostics" in md
    (p,) = study.emit(t, "csv", tmp_path / "err")
    assert "ERR" in p.read_text()


def test_emit_csv_layout(tmp_path):
    cfg = study.bundled_config("paper_base")
    t = study.run_study(analytic_only(cfg))
    files = study.emit(t, "csv", tmp_path / "base")
    names = [f.name for f in files]
    assert names == ["base.csv", "base_abserr.csv", "base_signederr.csv"]
    lines = files[0].read_text().splitlines()
    assert lines[0] == "algorithm," + ",".join(f"K={k}" for k in range(1, 11))
    assert len(lines) == 1 + 6
    t7 = study.run_study(small_config(algorithms=["sim", "flow", "mva", "stst", "gmva", "esum", "ebott"]))
    (vals, abserr, _) = study.emit(t7, "csv", tmp_path / "seven")
    assert len(vals.read_text().splitlines()) == 8
    assert len(abserr.read_text().splitlines()) == 7


def test_markdown_is_rounded_csv(tmp_path):
    t = study.run_study(analytic_only(study.bundled_config("paper_disturbed")))
    (csv_path,) = study.emit(t, "csv", tmp_path / "d")[:1]
    (md_path,) = study.emit(t, "markdown", tmp_path / "d")
    full = {row[0]: row[1:] for row in csv.reader(open(csv_path))}
    md = md_path.read_text()
    for label in ("MVA", "ST&ST-m", "FLOW"):
        line = next(l for l in md.splitlines() if l.startswith(f"| {label} |"))
        cells = [c.strip().strip("*") for c in line.strip("|").split("|")[1:]]
        assert cells == [f"{float(v):.3f}" for v in full[label]]
        assert all(len(v.split(".")[1]) >= 10 for v in full[label] if float(v) not in (0.0, 1.0))
    assert "**0.004**" in md


def test_study_is_deterministic(tmp_path):
    cfg = small_config(algorithms=["sim", "mva", "stst"])
    a = study.emit(study.run_study(cfg), "csv", tmp_path / "a")
    b = study.emit(study.run_study(cfg), "csv", tmp_path / "b")
    for fa, fb in zip(a, b):
        assert fa.read_bytes() == fb.read_bytes()


def test_disturbed_sim_uses_mechanistic_breakdowns():
    raw = study.bundled_config("paper_disturbed").to_dict()
    raw.update(algorithms=["sim"], k_range=[1, 2], simulation={"horizon": 50000, "seed": 1})
    raw.pop("reference")
    t = study.run_study(study.parse_config(raw))
    assert all(e.breakdowns > 0 for e in t.sim)
    # base loading moments drive the simulator, never the modified normal
    assert all(e.mean_service1 < 1.5 + 0.01 + 0.2 for e in t.sim)


def test_default_seed_env(monkeypatch):
    monkeypatch.delenv("HAULCYCLE_SEED", raising=False)
    assert study.default_seed(5) == 5
    monkeypatch.setenv("HAULCYCLE_SEED", "77")
    assert study.default_seed(5) == 77
