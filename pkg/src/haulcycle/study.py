"""Study configuration, orchestration across algorithms and K, and table output.

A study config is a JSON document::

    {
      "name": "paper_base",
      "nodes": [{"label": "loading", "kind": "single", "mean": 1.5, "cv": 0.25}, ...],
      "disturbance": {"mean_uptime": 300, "mean_repair": 30},      # optional
      "k_range": [1, 10],
      "algorithms": ["sim", "flow", "mva", "stst", "gmva", "esum", "ebott"],
      "simulation": {"horizon": 1000000, "warmup": 0, "seed": 1},
      "output": {"format": "csv", "path": "out/paper_base"},
      "eps": 1e-9,
      "reference": {"label": "published simulation", "idle": [0.880, ...]}   # optional
    }

Error tables compare every row with ``reference`` when given, otherwise with
the ``sim`` row.  In a disturbance study the analytic algorithms receive the
breakdown-modified loading moments, ``stst-m`` receives the undisturbed ones
plus the breakdown rates, and the simulator models breakdowns directly.
"""

from __future__ import annotations

import csv
import json
import math
import os
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import flow as flow_mod
from . import pfa, stst as stst_mod
from .errors import ConfigError, HaulCycleError
from .moments import DisturbanceSpec, modified_service_moments
from .netmodel import MomentPair, NetworkSpec, NodeKind, NodeSpec
from .simcycle import SimConfig, SimEstimate, sweep

__all__ = [
    "ALGORITHMS",
    "LABELS",
    "StudyConfig",
    "SimSettings",
    "OutputSettings",
    "ComparisonTable",
    "load_config",
    "parse_config",
    "dump_config",
    "run_study",
    "emit",
    "bundled_config",
]

ALGORITHMS = ("sim", "flow", "mva", "stst", "gmva", "sum", "esum", "bott", "ebott",
              "gn-exact", "stst-m")
LABELS = {
    "sim": "simulation",
    "flow": "FLOW",
    "mva": "MVA",
    "stst": "ST&ST",
    "gmva": "GMVA",
    "sum": "SUM",
    "esum": "ESUM",
    "bott": "BOTT",
    "ebott": "EBOTT",
    "gn-exact": "GN-exact",
    "stst-m": "ST&ST-m",
}
GN_STATE_LIMIT = 10**6
DATA_DIR = Path(__file__).parent / "data"


@dataclass(frozen=True)
class SimSettings:
    horizon: float = 1_000_000.0
    warmup: float = 0.0
    seed: int = 1


@dataclass(frozen=True)
class OutputSettings:
    format: str = "csv"
    path: str | None = None


@dataclass(frozen=True)
class StudyConfig:
    name: str
    nodes: tuple[dict, ...]
    k_range: tuple[int, int]
    algorithms: tuple[str, ...]
    disturbance: dict | None = None
    simulation: SimSettings = SimSettings()
    output: OutputSettings = OutputSettings()
    eps: float = pfa.DEFAULT_EPS
    reference: dict | None = None

    @property
    def ks(self) -> list[int]:
        return list(range(self.k_range[0], self.k_range[1] + 1))

    def network(self, K: int = 1) -> NetworkSpec:
        nodes = tuple(
            NodeSpec(NodeKind(n["kind"]), MomentPair.from_cv(n["mean"], n["cv"]), n.get("label", ""))
            for n in self.nodes
        )
        return NetworkSpec(nodes, population=K)

    def disturbance_spec(self) -> DisturbanceSpec | None:
        if self.disturbance is None:
            return None
        return DisturbanceSpec.from_means(self.disturbance["mean_uptime"],
                                          self.disturbance["mean_repair"])

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "nodes": [dict(n) for n in self.nodes],
            "k_range": list(self.k_range),
            "algorithms": list(self.algorithms),
            "simulation": asdict(self.simulation),
            "output": asdict(self.output),
            "eps": self.eps,
        }
        if self.disturbance is not None:
            d["disturbance"] = dict(self.disturbance)
        if self.reference is not None:
            d["reference"] = {"label": self.reference["label"], "idle": list(self.reference["idle"])}
        return d


def _req(d: dict, key: str, path: str):
    if not isinstance(d, dict) or key not in d:
        raise ConfigError("missing required field", field=f"{path}{key}")
    return d[key]


def _num(v, path, positive=False, nonneg=False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"expected a finite number, got {v!r}", field=path)
    if positive and not v > 0:
        raise ConfigError(f"must be > 0, got {v}", field=path)
    if nonneg and v < 0:
        raise ConfigError(f"must be >= 0, got {v}", field=path)
    return v


def parse_config(raw: dict) -> StudyConfig:
    """Validate a decoded JSON document and build a :class:`StudyConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object")
    nodes_raw = _req(raw, "nodes", "")
    if not isinstance(nodes_raw, list) or not nodes_raw:
        raise ConfigError("must be a non-empty list", field="nodes")
    nodes = []
    for i, n in enumerate(nodes_raw):
        p = f"nodes[{i}]."
        kind = _req(n, "kind", p)
        if kind not in ("single", "infinite"):
            raise ConfigError(f"must be 'single' or 'infinite', got {kind!r}", field=p + "kind")
        node = {
            "label": str(n.get("label", f"node {i + 1}")),
            "kind": kind,
            "mean": _num(_req(n, "mean", p), p + "mean", positive=True),
            "cv": _num(_req(n, "cv", p), p + "cv", nonneg=True),
        }
        nodes.append(node)

    kr = _req(raw, "k_range", "")
    if (not isinstance(kr, list) or len(kr) != 2 or not all(isinstance(k, int) and not isinstance(k, bool) for k in kr)
            or kr[0] < 1 or kr[1] < kr[0]):
        raise ConfigError(f"expected [Kmin, Kmax] with 1 <= Kmin <= Kmax, got {kr!r}", field="k_range")

    algs = _req(raw, "algorithms", "")
    if not isinstance(algs, list) or not algs:
        raise ConfigError("must be a non-empty list", field="algorithms")
    for a in algs:
        if a not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}",
                              field="algorithms")

    dist = raw.get("disturbance")
    if dist is not None:
        dist = {
            "mean_uptime": _num(_req(dist, "mean_uptime", "disturbance."), "disturbance.mean_uptime", positive=True),
            "mean_repair": _num(_req(dist, "mean_repair", "disturbance."), "disturbance.mean_repair", positive=True),
        }
    if "stst-m" in algs and dist is None:
        raise ConfigError("stst-m requires a disturbance block", field="disturbance")

    sim_raw = raw.get("simulation", {}) or {}
    sim = SimSettings(
        horizon=_num(sim_raw.get("horizon", SimSettings.horizon), "simulation.horizon", positive=True),
        warmup=_num(sim_raw.get("warmup", SimSettings.warmup), "simulation.warmup", nonneg=True),
        seed=sim_raw.get("seed", SimSettings.seed),
    )
    if not isinstance(sim.seed, int) or isinstance(sim.seed, bool) or sim.seed < 0:
        raise ConfigError(f"must be a non-negative integer, got {sim.seed!r}", field="simulation.seed")
    if not sim.horizon > sim.warmup:
        raise ConfigError("horizon must exceed warmup", field="simulation.horizon")

    out_raw = raw.get("output", {}) or {}
    out = OutputSettings(format=out_raw.get("format", "csv"), path=out_raw.get("path"))
    if out.format not in ("csv", "markdown"):
        raise ConfigError(f"must be 'csv' or 'markdown', got {out.format!r}", field="output.format")

    eps = _num(raw.get("eps", pfa.DEFAULT_EPS), "eps", positive=True)

    ref = raw.get("reference")
    if ref is not None:
        idle = _req(ref, "idle", "reference.")
        n_k = kr[1] - kr[0] + 1
        if not isinstance(idle, list) or len(idle) != n_k:
            raise ConfigError(f"expected {n_k} values", field="reference.idle")
        ref = {"label": str(ref.get("label", "reference")),
               "idle": [_num(v, f"reference.idle[{i}]") for i, v in enumerate(idle)]}

    cfg = StudyConfig(
        name=str(raw.get("name", "study")),
        nodes=tuple(nodes),
        k_range=(kr[0], kr[1]),
        algorithms=tuple(algs),
        disturbance=dist,
        simulation=sim,
        output=out,
        eps=eps,
        reference=ref,
    )
    if "gn-exact" in algs:
        J, K = len(nodes), kr[1]
        if math.comb(K + J - 1, J - 1) > GN_STATE_LIMIT:
            raise ConfigError(f"state space too large for gn-exact at K={K}", field="algorithms")
    return cfg


def load_config(path) -> StudyConfig:
    try:
        text = Path(path).read_text()
    except OSError:
        raise
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return parse_config(raw)


def dump_config(cfg: StudyConfig, path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")


def bundled_config(name: str) -> StudyConfig:
    """Load one of the configs shipped with the package (``paper_base``, ``paper_disturbed``)."""
    return load_config(DATA_DIR / f"{name}.json")


# -- orchestration ----------------------------------------------------------

@dataclass
class ComparisonTable:
    name: str
    ks: list[int]
    rows: dict[str, list[float]]  # nan marks a failed cell
    reference_label: str | None = None
    reference: list[float] | None = None
    abs_errors: dict[str, list[float]] = field(default_factory=dict)
    signed_errors: dict[str, list[float]] = field(default_factory=dict)
    best: dict[int, list[str]] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    sim: list[SimEstimate] | None = None
    modified_moments: MomentPair | None = None

    def row(self, algorithm: str) -> list[float]:
        return self.rows[algorithm]


def _cells(ks, fn: Callable[[int], float], alg: str, diagnostics: list[str]) -> list[float]:
    out = []
    for K in ks:
        try:
            out.append(float(fn(K)))
        except HaulCycleError as exc:
            diagnostics.append(f"{alg} K={K}: {type(exc).__name__}: {exc}")
            out.append(float("nan"))
    return out


def _algorithm_row(alg: str, cfg: StudyConfig, analytic: NetworkSpec, base: NetworkSpec,
                   dist: DisturbanceSpec | None, diagnostics: list[str]) -> list[float]:
    ks, eps = cfg.ks, cfg.eps
    if alg in ("mva", "gmva"):
        fn = pfa.mva if alg == "mva" else pfa.gmva
        rep = fn(analytic.with_population(ks[-1])).report()
        return [rep.idle(K) for K in ks]
    if alg in ("sum", "esum", "bott", "ebott"):
        fn = {"sum": pfa.sum_method, "esum": pfa.esum, "bott": pfa.bott, "ebott": pfa.ebott}[alg]
        return _cells(ks, lambda K: fn(analytic.with_population(K), eps).idle(K), alg, diagnostics)
    if alg == "gn-exact":
        return _cells(ks, lambda K: pfa.gn_exact(analytic.with_population(K)).idle(K), alg, diagnostics)
    if alg == "stst":
        return _cells(ks, lambda K: stst_mod.stst(analytic.with_population(K)).idle1, alg, diagnostics)
    if alg == "stst-m":
        return _cells(ks, lambda K: stst_mod.stst_m(base.with_population(K), dist), alg, diagnostics)
    if alg == "flow":
        return _cells(ks, lambda K: flow_mod.flow_closed_form(analytic.means, K).idle1, alg, diagnostics)
    raise ValueError(alg)


def run_study(cfg: StudyConfig) -> ComparisonTable:
    ks = cfg.ks
    base = cfg.network()
    dist = cfg.disturbance_spec()
    analytic = base
    modified = None
    if dist is not None:
        modified = modified_service_moments(base.nodes[0].service, dist).modified
        analytic = base.with_service(0, modified)

    table = ComparisonTable(cfg.name, ks, {}, modified_moments=modified)
    for alg in cfg.algorithms:
        if alg == "sim":
            sc = SimConfig(base, dist, cfg.simulation.horizon, cfg.simulation.warmup, cfg.simulation.seed)
            table.sim = sweep(sc, ks[0], ks[-1])
            table.rows["sim"] = [e.idle1 for e in table.sim]
        else:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                table.rows[alg] = _algorithm_row(alg, cfg, analytic, base, dist, table.diagnostics)
            for w in caught:
                msg = str(w.message)
                if msg not in table.notes:
                    table.notes.append(msg)

    if cfg.reference is not None:
        table.reference_label = cfg.reference["label"]
        table.reference = list(cfg.reference["idle"])
    elif "sim" in table.rows:
        table.reference_label = LABELS["sim"]
        table.reference = list(table.rows["sim"])

    if table.reference is not None:
        ref = np.array(table.reference)
        for alg, vals in table.rows.items():
            if alg == "sim" and cfg.reference is None:
                continue
            signed = np.array(vals) - ref
            table.signed_errors[alg] = signed.tolist()
            table.abs_errors[alg] = np.abs(signed).tolist()
        table.best = best_per_k(table)
    return table


def best_per_k(table: ComparisonTable) -> dict[int, list[str]]:
    """Algorithms with the smallest displayed (3-decimal) error in each column; ties all marked."""
    best = {}
    for i, K in enumerate(table.ks):
        errs = {a: round(v[i], 3) for a, v in table.abs_errors.items()
                if a != "sim" and not math.isnan(v[i])}
        if not errs:
            best[K] = []
            continue
        lo = min(errs.values())
        best[K] = [a for a, e in errs.items() if e == lo]
    return best


# -- output -----------------------------------------------------------------

def _fmt_full(v: float) -> str:
    return "ERR" if math.isnan(v) else f"{v:.17g}"


def _fmt3(v: float) -> str:
    return "ERR" if math.isnan(v) else f"{v:.3f}"


def _write_csv(path: Path, ks, rows: dict[str, list[float]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm"] + [f"K={K}" for K in ks])
        for alg, vals in rows.items():
            w.writerow([LABELS.get(alg, alg)] + [_fmt_full(v) for v in vals])


def _md_table(ks, rows: dict[str, list[float]], bold: dict[int, list[str]] | None = None) -> str:
    head = "| | " + " | ".join(f"K={K}" for K in ks) + " |"
    sep = "|---|" + "---:|" * len(ks)
    lines = [head, sep]
    for alg, vals in rows.items():
        cells = []
        for i, v in enumerate(vals):
            c = _fmt3(v)
            if bold and alg in bold.get(ks[i], []):
                c = f"**{c}**"
            cells.append(c)
        lines.append(f"| {LABELS.get(alg, alg)} | " + " | ".join(cells) + " |")
    return "\n".join(lines)


def render_markdown(table: ComparisonTable) -> str:
    parts = [f"## {table.name}: idle probability of node 1", ""]
    rows = {}
    if table.reference is not None and table.reference_label != LABELS["sim"]:
        rows[table.reference_label] = table.reference
    rows.update(table.rows)
    parts.append(_md_table(table.ks, rows))
    if table.abs_errors:
        parts += ["", f"## {table.name}: absolute error vs {table.reference_label}", ""]
        parts.append(_md_table(table.ks, table.abs_errors, table.best))
    if table.diagnostics:
        parts += ["", "### Diagnostics", ""] + [f"- {d}" for d in table.diagnostics]
    if table.notes:
        parts += ["", "### Notes", ""] + [f"- {n}" for n in table.notes]
    return "\n".join(parts) + "\n"


def emit(table: ComparisonTable, fmt: str, path) -> list[Path]:
    """Write the table; returns the files written.

    ``csv`` writes ``<path>.csv`` (idle values, full precision) plus
    ``<path>_abserr.csv`` and ``<path>_signederr.csv`` when errors exist.
    ``markdown`` writes ``<path>.md`` with values rounded to 3 decimals.
    """
    base = Path(path)
    if base.suffix in (".csv", ".md"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "csv":
        p = base.with_name(base.name + ".csv")
        _write_csv(p, table.ks, table.rows)
        written.append(p)
        if table.abs_errors:
            for suffix, rows in (("_abserr", table.abs_errors), ("_signederr", table.signed_errors)):
                p = base.with_name(base.name + suffix + ".csv")
                _write_csv(p, table.ks, rows)
                written.append(p)
    elif fmt == "markdown":
        p = base.with_name(base.name + ".md")
        p.write_text(render_markdown(table))
        written.append(p)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return written


def default_seed(fallback: int) -> int:
    """Seed from ``HAULCYCLE_SEED`` if set, else ``fallback``."""
    v = os.environ.get("HAULCYCLE_SEED")
    return int(v) if v not in (None, "") else fallback
