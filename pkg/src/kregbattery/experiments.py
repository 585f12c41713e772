"""Sweeps behind the work, average-work, power, fraction and collective-charger figures."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np
import scipy

from . import __version__
from .closed_form import (
    PERIOD,
    closed_form_average_work,
    closed_form_power_per_site,
    closed_form_work,
    integrated_average_work,
)
from .config import Config
from .engine import DENSE_CAP
from .errors import FormulaNotApplicable, ResourceError, ValidationError
from .metrics import (
    average_work,
    fraction_extractable,
    max_average_power,
    scaling_exponent,
    work_function,
    work_series,
)
from .models import (
    AXES,
    CollectiveCharger,
    LocalBattery,
    ModelSpec,
    RegularCharger,
    k_max,
    validate_nk,
)

EXPERIMENTS = ("work_sweep", "k_sweep", "avg_power", "fraction", "collective_scaling", "verify")

DEFAULTS: dict[str, dict[str, Any]] = {
    "work_sweep": {"n_sites": [6], "battery_axis": ["X"], "charger_k": "all",
                   "t_min": 0.0, "t_max": math.pi, "t_points": 101},
    "k_sweep": {"n_sites": [4, 6, 8, 10], "battery_axis": ["X"], "charger_k": "all", "t_points": 401},
    "avg_power": {"sweep": "N", "n_sites": [4, 5, 6, 7, 8, 9, 10, 11, 12], "battery_axis": ["X", "Y", "Z"],
                  "charger_k": [2], "t_max": math.pi},
    "fraction": {"n_sites": [6, 8, 10, 12], "battery_axis": ["X", "Y", "Z"], "charger_k": 2, "m": "all",
                 "t_max": math.pi, "t_points": 201},
    "collective_scaling": {"n_sites": [4, 6, 8, 10, 12], "charger_alpha": [0, 1, 2, 4, 6, 8],
                           "battery_axis": "X", "t_max": math.pi, "unnormalized_weights": False},
    "verify": {"max_n": 10},
}


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValidationError(f"row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(tuple(_plain(v) for v in values))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def where(self, **match) -> list[dict]:
        out = []
        for r in self.rows:
            d = dict(zip(self.columns, r))
            if all(d.get(k) == v for k, v in match.items()):
                out.append(d)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in r])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [dict(zip(self.columns, r)) for r in self.rows]
        return json.dumps({"columns": self.columns, "rows": rows, "metadata": self.metadata},
                          indent=2, default=str, allow_nan=True)

    def write(self, path, fmt: str = "csv") -> None:
        text = self.to_json() if fmt == "json" else self.to_csv()
        with open(path, "w", newline="") as fh:
            fh.write(text)
        if fmt == "csv":
            with open(str(path) + ".meta.json", "w") as fh:
                json.dump(self.metadata, fh, indent=2, default=str)


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


@dataclass
class ExperimentConfig:
    experiment: str
    params: Config
    output_path: str | None = None
    fmt: str = "csv"
    seed: int = 0
    workers: int = 1

    @classmethod
    def build(cls, experiment: str, cfg: Config | dict | None = None, output_path=None,
              fmt: str = "csv", workers: int | None = None) -> "ExperimentConfig":
        cfg = cfg if isinstance(cfg, Config) else Config(cfg or {})
        experiment = str(cfg.get("experiment", experiment)).replace("-", "_")
        if experiment == "collective":
            experiment = "collective_scaling"
        if experiment not in EXPERIMENTS:
            raise ValidationError(f"unknown experiment {experiment!r}")
        params = cfg.merged(DEFAULTS[experiment])
        if workers is None:
            workers = int(params.get("workers", os.cpu_count() or 1))
        if fmt not in ("csv", "json"):
            raise ValidationError(f"unknown output format {fmt!r}")
        out = cls(experiment, params, output_path, fmt, int(params.get("seed", 0)), max(1, workers))
        out.validate()
        return out

    def validate(self) -> None:
        p = self.params
        for key in ("n_sites", "charger_k", "charger_alpha", "t_points", "max_n", "m"):
            if key in p:
                vals = p[key] if isinstance(p[key], list) else [p[key]]
                for v in vals:
                    if key in ("charger_k", "m") and v == "all":
                        continue
                    if key == "charger_alpha":
                        if not isinstance(v, (int, float)) or isinstance(v, bool) or v < 0:
                            raise p.error(key, f"expected a number >= 0, got {v!r}")
                    elif not isinstance(v, int) or isinstance(v, bool):
                        raise p.error(key, f"expected integer(s), got {v!r}")
        if "battery_axis" in p:
            for a in p.as_list("battery_axis"):
                if str(a).upper() not in AXES:
                    raise p.error("battery_axis", f"axis must be X, Y or Z, got {a!r}")
        if self.experiment == "avg_power" and str(p["sweep"]).upper() not in ("N", "K"):
            raise p.error("sweep", "must be N or K")
        if self.experiment in ("work_sweep", "k_sweep", "fraction") or (
                self.experiment == "avg_power" and str(p["sweep"]).upper() == "N"):
            for n in p.as_list("n_sites"):
                ks = _k_list(p, n)
                for k in ks:
                    try:
                        validate_nk(n, k)
                    except ValidationError as exc:
                        raise p.error("charger_k", str(exc)) from None
        if self.experiment == "collective_scaling":
            for n in p.as_list("n_sites"):
                if n > DENSE_CAP:
                    raise ResourceError(f"{p.where('n_sites')}: N={n} exceeds the dense cap {DENSE_CAP}")
        if self.experiment == "fraction":
            if not isinstance(p["charger_k"], int):
                raise p.error("charger_k", "fraction needs a single K")

    def echo(self) -> dict:
        return {"experiment": self.experiment, **{k: v for k, v in self.params.items()}}


def _k_list(p: Config, n: int) -> list[int]:
    ks = p.get("charger_k", "all")
    if ks == "all":
        return list(range(2, k_max(n) + 1, 2))
    return ks if isinstance(ks, list) else [ks]


def _m_list(p: Config, n: int) -> list[int]:
    ms = p.get("m", "all")
    if ms == "all":
        return list(range(1, n + 1))
    ms = ms if isinstance(ms, list) else [ms]
    return [m for m in ms if m <= n]


def _fan_out(fn: Callable, cells: Sequence, workers: int) -> list:
    """Evaluate cells in a thread pool; results come back in cell order."""
    if workers <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cells))


def _metadata(cfg: ExperimentConfig, started: float) -> dict:
    return {
        "config": cfg.echo(),
        "versions": {"kregbattery": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "wall_time_s": round(time.time() - started, 3),
    }


def _per_site_max_close(a: np.ndarray, b: np.ndarray, n: int) -> float:
    return float(np.max(np.abs(a - b)) / n)


# --- experiments ----------------------------------------------------------------

def run_work_sweep(cfg: ExperimentConfig) -> ResultTable:
    """Stored-work curves with the closed-form law alongside where it applies."""
    started = time.time()
    p = cfg.params
    cells = [(n, k, str(a).upper()) for n in p.as_list("n_sites") for k in _k_list(p, n)
             for a in p.as_list("battery_axis")]

    def cell(c):
        n, k, axis = c
        spec = ModelSpec(n, LocalBattery(axis), RegularCharger(k),
                         float(p["t_min"]), float(p["t_max"]), int(p["t_points"]))
        series = work_series(spec)
        try:
            cf = closed_form_work(axis, n, k, series.ts)
        except FormulaNotApplicable:
            cf = None
        return series, cf

    table = ResultTable(["N", "K", "axis", "t", "W", "W_per_site", "closed_form", "abs_err"])
    for (n, k, axis), (series, cf) in sorted(zip(cells, _fan_out(cell, cells, cfg.workers))):
        for j, (t, w) in enumerate(zip(series.ts, series.values)):
            c = None if cf is None else float(cf[j])
            table.add(n, k, axis, float(t), float(w), float(w) / n, c, None if c is None else abs(float(w) - c))
    table.metadata = _metadata(cfg, started)
    return table


def run_k_sweep(cfg: ExperimentConfig) -> ResultTable:
    """Per-site period-averaged work versus K, plus the maximal-K period check."""
    started = time.time()
    p = cfg.params
    n_pts = int(p["t_points"])
    if n_pts % 2 == 0 or n_pts < 201:
        raise p.error("t_points", "k_sweep needs an odd t_points >= 201")
    cells = [(n, k, str(a).upper()) for n in p.as_list("n_sites") for k in _k_list(p, n)
             for a in p.as_list("battery_axis")]

    def cell(c):
        n, k, axis = c
        period = PERIOD[axis]
        spec = ModelSpec(n, LocalBattery(axis), RegularCharger(k), 0.0, period, n_pts)
        wbar = average_work(work_series(spec), period, n)
        half = period / 2
        ts = np.linspace(0, half, 101)
        w = work_function(spec)
        halving = _per_site_max_close(w(ts), w(ts + half), n)
        peak = float(np.max(w(np.linspace(0, math.pi, 2001)))) / n
        return wbar, halving, peak

    table = ResultTable(["axis", "N", "K", "W_bar", "W_bar_printed", "W_bar_law", "max_W_per_site",
                         "half_period_dev"])
    for (n, k, axis), (wbar, halving, peak) in sorted(zip(cells, _fan_out(cell, cells, cfg.workers)),
                                                      key=lambda r: (r[0][2], r[0][0], r[0][1])):
        table.add(axis, n, k, wbar, closed_form_average_work(axis, k), integrated_average_work(axis, k),
                  peak, halving)
    table.metadata = _metadata(cfg, started)
    return table


def run_avg_power(cfg: ExperimentConfig) -> ResultTable:
    """Maximum average power swept over N (simulation) or K (closed-form law)."""
    started = time.time()
    p = cfg.params
    t_max = float(p["t_max"])
    table = ResultTable(["row_type", "axis", "N", "K", "P_bar", "t_star", "beta", "residual"])
    axes = [str(a).upper() for a in p.as_list("battery_axis")]
    if str(p["sweep"]).upper() == "N":
        ks = p.as_list("charger_k")
        cells = [(a, n, k) for a in axes for k in ks for n in p.as_list("n_sites")]

        def cell(c):
            axis, n, k = c
            return max_average_power(work_function(ModelSpec(n, LocalBattery(axis), RegularCharger(k))), t_max)

        results = dict(zip(cells, _fan_out(cell, cells, cfg.workers)))
        for axis in axes:
            for k in ks:
                ns = [n for (a, n, kk) in cells if a == axis and kk == k]
                for n in ns:
                    pb, ts = results[(axis, n, k)]
                    table.add("point", axis, n, k, pb, ts, None, None)
                if len(ns) >= 3:
                    fit = scaling_exponent(ns, [results[(axis, n, k)][0] for n in ns])
                    table.add("fit_N", axis, None, k, None, None, fit.beta, fit.residual)
    else:
        ks = p.as_list("charger_k")
        cells = [(a, k) for a in axes for k in ks]
        results = dict(zip(cells, _fan_out(lambda c: closed_form_power_per_site(c[0], c[1], t_max),
                                           cells, cfg.workers)))
        for axis in axes:
            for k in ks:
                pb, ts = results[(axis, k)]
                table.add("point_per_site", axis, None, k, pb, ts, None, None)
            if len(ks) >= 3:
                fit = scaling_exponent(ks, [results[(axis, k)][0] for k in ks])
                table.add("fit_K", axis, None, None, None, None, fit.beta, fit.residual)
    table.metadata = _metadata(cfg, started)
    return table


def run_fraction(cfg: ExperimentConfig) -> ResultTable:
    """Time-averaged fraction of block ergotropy to block work, T = pi by default."""
    started = time.time()
    p = cfg.params
    k = int(p["charger_k"])
    cells = [(str(a).upper(), n, m) for a in p.as_list("battery_axis") for n in p.as_list("n_sites")
             for m in _m_list(p, n)]
    vals = _fan_out(lambda c: fraction_extractable(c[1], k, c[0], c[2], float(p["t_max"]), int(p["t_points"])),
                    cells, cfg.workers)
    table = ResultTable(["axis", "N", "K", "m", "m_over_N", "R_bar"])
    for (axis, n, m), r in sorted(zip(cells, vals)):
        table.add(axis, n, k, m, m / n, r)
    table.metadata = _metadata(cfg, started)
    return table


def run_collective_scaling(cfg: ExperimentConfig) -> ResultTable:
    """Power of the collective power-law charger versus N, and the fitted exponent per alpha."""
    started = time.time()
    p = cfg.params
    axis = str(p["battery_axis"]).upper()
    normalized = not bool(p["unnormalized_weights"])
    ns = p.as_list("n_sites")
    alphas = [float(a) for a in p.as_list("charger_alpha")]
    cells = [(a, n) for a in alphas for n in ns]

    def cell(c):
        alpha, n = c
        spec = ModelSpec(n, LocalBattery(axis), CollectiveCharger(alpha, normalized))
        return max_average_power(work_function(spec), float(p["t_max"]))

    results = dict(zip(cells, _fan_out(cell, cells, cfg.workers)))
    table = ResultTable(["row_type", "alpha", "N", "P_bar", "t_star", "beta", "residual"])
    for alpha in alphas:
        for n in ns:
            pb, ts = results[(alpha, n)]
            table.add("point", alpha, n, pb, ts, None, None)
        if len(ns) >= 3:
            fit = scaling_exponent(ns, [results[(alpha, n)][0] for n in ns])
            table.add("fit", alpha, None, None, None, fit.beta, fit.residual)
    table.metadata = _metadata(cfg, started)
    return table


def run_verify(cfg: ExperimentConfig) -> ResultTable:
    from .verify import run_checks

    started = time.time()
    p = cfg.params
    groups = p.as_list("checks") if "checks" in p else None
    table = run_checks(groups=groups, max_n=int(p["max_n"]), seed=cfg.seed,
                       fault=p.get("inject_fault"))
    table.metadata = _metadata(cfg, started)
    return table


RUNNERS = {
    "work_sweep": run_work_sweep,
    "k_sweep": run_k_sweep,
    "avg_power": run_avg_power,
    "fraction": run_fraction,
    "collective_scaling": run_collective_scaling,
    "verify": run_verify,
}


def run(cfg: ExperimentConfig) -> ResultTable:
    return RUNNERS[cfg.experiment](cfg)
