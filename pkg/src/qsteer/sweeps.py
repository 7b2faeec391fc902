"""Parameter sweeps over Almeida states pushed through channels and swapping.

A sweep is described by a :class:`SweepConfig`: a pipeline of stages, the
quantities to record, up to two swept axes and fixed values for every other
parameter. :func:`run_sweep` evaluates the pipeline on the grid, in
lexicographic parameter order, and scans 1-D slices along the noise axis for
sudden death and death-and-revival events.

Pipeline stages
    ``almeida``            build ``rho(k, theta)`` (must come first)
    ``channel:pd``         phase damping on both qubits, strength ``p``
    ``channel:gad``        generalized amplitude damping on both qubits (``p``, ``gamma``)
    ``channel:sdc``        stochastic dephasing channel, strength ``p``
    ``swap:<i>``           swap two copies of the current state, Bell outcome ``i``
    ``swap``               same, with ``i`` taken from the ``bell`` parameter

Quantities are ``steering``, ``concurrence`` and ``discord`` evaluated on the
pipeline output, and ``input_steering``, ``input_concurrence``,
``input_discord`` evaluated on the freshly built Almeida state.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .channels import two_qubit_channel, apply_channel
from .errors import ConfigError, ZeroProbabilityOutcome
from .quantifiers import QUANTIFIERS
from .states import THETA_SLACK, lhs_admissible, make_almeida
from .swapping import swap

TOL_ZERO = 1e-9
TOL_REFINE = 1e-6
EDGE_MARGIN = 1e-3
DEFAULT_STEPS = 101
DEFAULT_THETA_STEPS_2D = 201

PARAMS = ("k", "theta", "p", "gamma", "bell")
DOMAINS = {
    "k": (0.0, 1.0),
    "theta": (0.0, math.pi / 4),
    "p": (0.0, 1.0),
    "gamma": (0.0, 1.0),
    "bell": (1, 4),
}
BASE_QUANTITIES = tuple(QUANTIFIERS)
ALL_QUANTITIES = BASE_QUANTITIES + tuple(f"input_{q}" for q in BASE_QUANTITIES)
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Axis:
    """A swept parameter and its ascending grid values."""

    name: str
    values: tuple

    @classmethod
    def linspace(cls, name: str, lo: float, hi: float, steps: int) -> "Axis":
        if steps < 2:
            raise ConfigError(f"axis {name!r} needs at least 2 steps")
        if not lo < hi:
            raise ConfigError(f"axis {name!r} needs min < max")
        return cls(name, tuple(float(x) for x in np.linspace(lo, hi, int(steps))))

    def to_dict(self) -> dict:
        return {"name": self.name, "values": list(self.values)}


def _parse_stage(stage: str) -> tuple[str, str | None]:
    kind, _, arg = stage.strip().lower().partition(":")
    if kind in ("almeida", "construct-almeida"):
        return "almeida", None
    if kind == "channel" and arg in ("pd", "gad", "sdc"):
        return "channel", arg
    if kind == "swap" and arg in ("", "1", "2", "3", "4"):
        return "swap", arg or None
    raise ConfigError(f"unknown pipeline stage {stage!r}")


@dataclass(frozen=True)
class SweepConfig:
    pipeline: tuple
    quantities: tuple
    axes: tuple
    fixed: Mapping[str, float] = field(default_factory=dict)
    output: str | None = None
    format: str = "csv"
    boundary_axis: str | None = "auto"
    overlay_lhs: bool = False
    workers: int = 1
    metadata: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "pipeline", tuple(self.pipeline))
        object.__setattr__(self, "quantities", tuple(self.quantities))
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "fixed", dict(self.fixed))
        object.__setattr__(self, "metadata", dict(self.metadata))
        self._validate()

    @property
    def stages(self) -> list[tuple[str, str | None]]:
        return [_parse_stage(s) for s in self.pipeline]

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    @property
    def has_swap(self) -> bool:
        return any(kind == "swap" for kind, _ in self.stages)

    def _validate(self):
        if not self.pipeline:
            raise ConfigError("empty pipeline")
        stages = self.stages
        if stages[0][0] != "almeida" or any(kind == "almeida" for kind, _ in stages[1:]):
            raise ConfigError("pipeline must start with a single 'almeida' stage")
        if not self.quantities:
            raise ConfigError("no quantities requested")
        for q in self.quantities:
            if q not in ALL_QUANTITIES:
                raise ConfigError(f"unknown quantity {q!r}")
        if len(set(self.quantities)) != len(self.quantities):
            raise ConfigError("duplicate quantity")
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("between one and two swept axes are supported")
        names = self.axis_names
        if len(set(names)) != len(names):
            raise ConfigError("duplicate axis")
        for name in list(names) + list(self.fixed):
            if name not in PARAMS:
                raise ConfigError(f"unknown parameter {name!r}")
        clash = set(names) & set(self.fixed)
        if clash:
            raise ConfigError(f"parameters both swept and fixed: {sorted(clash)}")
        for ax in self.axes:
            if len(ax.values) < 2:
                raise ConfigError(f"axis {ax.name!r} needs at least 2 steps")
            if any(b <= a for a, b in zip(ax.values, ax.values[1:])):
                raise ConfigError(f"axis {ax.name!r} must be strictly ascending")
            for v in ax.values:
                _check_param(ax.name, v)
        for name, v in self.fixed.items():
            _check_param(name, v)
        for name in self.required_params():
            if name not in names and name not in self.fixed:
                raise ConfigError(f"parameter {name!r} is neither swept nor fixed")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown output format {self.format!r}")
        if self.boundary_axis not in (None, "auto") and self.boundary_axis not in names:
            raise ConfigError(f"boundary axis {self.boundary_axis!r} is not swept")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def required_params(self) -> list[str]:
        req = ["k", "theta"]
        for kind, arg in self.stages:
            if kind == "channel":
                req.append("p")
                if arg == "gad":
                    req.append("gamma")
            elif kind == "swap" and arg is None:
                req.append("bell")
        return req

    def resolved_boundary_axis(self) -> str | None:
        if self.boundary_axis == "auto":
            return "p" if "p" in self.axis_names else None
        if self.boundary_axis == "bell":
            return None
        return self.boundary_axis

    @classmethod
    def from_dict(cls, data: Mapping) -> "SweepConfig":
        try:
            axes = []
            for a in data["axes"]:
                if "values" in a:
                    axes.append(Axis(a["name"], tuple(a["values"])))
                else:
                    axes.append(Axis.linspace(a["name"], a["min"], a["max"], a.get("steps", DEFAULT_STEPS)))
            out = data.get("output")
            fmt = data.get("format", "csv")
            if isinstance(out, Mapping):
                fmt = out.get("format", fmt)
                out = out.get("path")
            return cls(
                pipeline=tuple(data["pipeline"]),
                quantities=tuple(data.get("quantities", BASE_QUANTITIES)),
                axes=tuple(axes),
                fixed=data.get("fixed", {}),
                output=out,
                format=fmt,
                boundary_axis=data.get("boundary_axis", "auto"),
                overlay_lhs=bool(data.get("overlay_lhs", False)),
                workers=int(data.get("workers", 1)),
                metadata=data.get("metadata", {}),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed sweep config: {exc!r}") from exc

    def to_dict(self) -> dict:
        return {
            "pipeline": list(self.pipeline),
            "quantities": list(self.quantities),
            "axes": [a.to_dict() for a in self.axes],
            "fixed": dict(self.fixed),
            "output": {"path": self.output, "format": self.format},
            "boundary_axis": self.boundary_axis,
            "overlay_lhs": self.overlay_lhs,
            "metadata": dict(self.metadata),
        }


def load_config(path) -> SweepConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return SweepConfig.from_dict(data)


def _check_param(name: str, value) -> None:
    lo, hi = DOMAINS[name]
    if name == "bell":
        if value not in (1, 2, 3, 4):
            raise ConfigError(f"bell must be one of 1..4, got {value!r}")
        return
    if name == "theta":
        hi = hi + THETA_SLACK
    if not lo <= float(value) <= hi:
        raise ConfigError(f"{name}={value} outside [{lo}, {hi}]")


# evaluation


@dataclass(frozen=True, eq=False)
class PointValues:
    values: dict
    probability: float | None = None
    zero_probability: bool = False


def evaluate_point(pipeline: Sequence[str], quantities: Sequence[str], params: Mapping) -> PointValues:
    """Run the pipeline at one parameter point and compute the requested quantities.

    A zero-probability swap outcome yields ``None`` for every post-pipeline
    quantity and sets ``zero_probability``.
    """
    stages = [_parse_stage(s) for s in pipeline]
    source = make_almeida(params["k"], params["theta"])
    rho = source
    prob = None
    zero = False
    for kind, arg in stages[1:]:
        if kind == "channel":
            rho = apply_channel(rho, two_qubit_channel(arg, params["p"], params.get("gamma")))
        else:
            bell = int(arg) if arg is not None else int(params["bell"])
            try:
                out = swap(rho, rho, bell)
            except ZeroProbabilityOutcome:
                prob, zero, rho = 0.0, True, None
                break
            prob = (prob if prob is not None else 1.0) * out.probability
            rho = out.state
    values = {}
    for q in quantities:
        if q.startswith("input_"):
            values[q] = QUANTIFIERS[q[len("input_"):]](source)
        else:
            values[q] = None if rho is None else QUANTIFIERS[q](rho)
    return PointValues(values, prob, zero)


def _eval_task(args):
    pipeline, quantities, params = args
    return evaluate_point(pipeline, quantities, params)


def _point_params(cfg: SweepConfig, point: tuple) -> dict:
    params = dict(cfg.fixed)
    params.update(zip(cfg.axis_names, point))
    return params


# boundary detection


def _as_series(series) -> tuple[np.ndarray, np.ndarray]:
    pts = list(series)
    if not pts:
        return np.empty(0), np.empty(0)
    xs, ys = zip(*pts)
    return np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)


def _bisect(f, lo: float, hi: float, lo_is_zero: bool, tol: float, zero_tol: float) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) <= zero_tol) == lo_is_zero:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def detect_sudden_death(
    series: Iterable[tuple[float, float]],
    refine: Callable[[float], float] | None = None,
    tol: float = TOL_REFINE,
    zero_tol: float = TOL_ZERO,
    edge_margin: float = EDGE_MARGIN,
) -> float | None:
    """First parameter value after which the series stays at zero.

    ``series`` is a sequence of ``(p, value)`` pairs sorted by ``p``. Returns
    None when the last value is positive or when the series is zero from the
    start. With ``refine`` (the underlying quantity as a function of ``p``) the
    crossing is bisected to within ``tol``; otherwise the first zero grid
    point is returned.

    A series whose only zero sample is the last one is ambiguous: a quantity
    that decays smoothly to zero at the end of the range also falls below
    ``zero_tol`` there. Without ``refine`` such a series reports no death;
    with ``refine`` the crossing must lie at least ``edge_margin`` before the
    last sample.
    """
    xs, ys = _as_series(series)
    if len(xs) == 0:
        return None
    zero = ys <= zero_tol
    if not zero[-1]:
        return None
    positive = np.flatnonzero(~zero)
    if len(positive) == 0:
        return None
    j = positive[-1]
    endpoint_only = j == len(xs) - 2
    if refine is None:
        return None if endpoint_only else float(xs[j + 1])
    death = _bisect(refine, float(xs[j]), float(xs[j + 1]), False, tol, zero_tol)
    # smooth decay that only vanishes at the last sample dips under zero_tol just before it
    if endpoint_only and xs[-1] - death < edge_margin:
        return None
    return death


def detect_revival(
    series: Iterable[tuple[float, float]],
    refine: Callable[[float], float] | None = None,
    tol: float = TOL_REFINE,
    zero_tol: float = TOL_ZERO,
) -> tuple[float, float] | None:
    """First zero interval that is followed by a positive value.

    Returns ``(death, revival)`` where ``death`` is where the quantity first
    reaches zero (the first sample if it starts at zero) and ``revival`` is
    where it becomes positive again, or None if no such interval exists.
    Both ends are bisected to ``tol`` when ``refine`` is given.
    """
    xs, ys = _as_series(series)
    zero = ys <= zero_tol
    n = len(xs)
    i = 0
    while i < n:
        if zero[i]:
            j = i
            while j + 1 < n and zero[j + 1]:
                j += 1
            if j + 1 < n:
                if refine is None:
                    return float(xs[i]), float(xs[j + 1])
                death = float(xs[0]) if i == 0 else _bisect(refine, float(xs[i - 1]), float(xs[i]), False, tol, zero_tol)
                revival = _bisect(refine, float(xs[j]), float(xs[j + 1]), True, tol, zero_tol)
                return death, revival
            return None
        i += 1
    return None


@dataclass(frozen=True)
class BoundaryEvent:
    """A sudden-death point or a death-and-revival interval along one slice."""

    kind: str  # "sudden_death" or "revival"
    quantity: str
    axis: str
    at: Mapping[str, float]
    death: float
    revival: float | None = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "quantity": self.quantity, "axis": self.axis, "at": dict(self.at), "death": self.death}
        if self.revival is not None:
            d["revival"] = self.revival
        return d


# results


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


@dataclass(eq=False)
class SweepResult:
    """Quantity values on every grid point, in lexicographic parameter order.

    ``values[q][n]`` belongs to ``points[n]``; NaN marks zero-probability swap
    outcomes, which are also flagged in ``zero_probability``.
    """

    config: SweepConfig
    points: list
    values: dict
    probability: np.ndarray | None = None
    zero_probability: np.ndarray | None = None
    boundaries: list = field(default_factory=list)
    overlays: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def axis_names(self) -> tuple[str, ...]:
        return self.config.axis_names

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a.values) for a in self.config.axes)

    def grid(self, name: str) -> np.ndarray:
        """Column ``name`` reshaped to the axis grid (first axis varies slowest)."""
        return np.asarray(self.column(name), dtype=float).reshape(self.shape)

    def column(self, name: str) -> np.ndarray:
        if name in self.axis_names:
            i = self.axis_names.index(name)
            return np.array([p[i] for p in self.points], dtype=float)
        if name in self.values:
            return self.values[name]
        if name == "probability" and self.probability is not None:
            return self.probability
        if name in self.overlays:
            return self.overlays[name]
        raise KeyError(name)

    def records(self) -> list[tuple[tuple, str, float]]:
        """Long-format ``(parameter tuple, quantity, value)`` triples."""
        return [(pt, q, float(self.values[q][n])) for n, pt in enumerate(self.points) for q in self.config.quantities]

    def columns(self) -> list[str]:
        cols = list(self.axis_names) + list(self.config.quantities)
        if self.probability is not None:
            cols += ["probability", "zero_probability"]
        return cols

    def rows(self) -> list[dict]:
        cols = self.columns()
        out = []
        for n, pt in enumerate(self.points):
            row = dict(zip(self.axis_names, pt))
            for q in self.config.quantities:
                v = self.values[q][n]
                row[q] = None if math.isnan(v) else float(v)
            if self.probability is not None:
                row["probability"] = float(self.probability[n])
                row["zero_probability"] = bool(self.zero_probability[n])
            out.append({c: row[c] for c in cols})
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns())
        for row in self.rows():
            w.writerow([_fmt(v) for v in row.values()])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = []
        for row in self.rows():
            rows.append({k: (int(v) if k == "bell" else v) for k, v in row.items()})
        doc = {
            "metadata": self.metadata,
            "config": self.config.to_dict(),
            "columns": self.columns(),
            "rows": rows,
            "boundaries": [b.to_dict() for b in self.boundaries],
            "overlays": {k: [bool(x) for x in v] for k, v in self.overlays.items()},
        }
        return json.dumps(doc, indent=1)

    def dumps(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ConfigError(f"unknown output format {fmt!r}")

    def write(self, path, fmt: str | None = None) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.dumps(fmt or self.config.format))


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> SweepResult:
    """Evaluate ``cfg`` on its full grid.

    Grid points are independent; with ``workers > 1`` they are evaluated in a
    process pool and gathered back in grid order, so output does not depend
    on the worker count.
    """
    workers = cfg.workers if workers is None else workers
    points = list(itertools.product(*(a.values for a in cfg.axes)))
    tasks = [(cfg.pipeline, cfg.quantities, _point_params(cfg, pt)) for pt in points]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_eval_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        results = [_eval_task(t) for t in tasks]

    values = {
        q: np.array([np.nan if r.values[q] is None else r.values[q] for r in results], dtype=float)
        for q in cfg.quantities
    }
    prob = flags = None
    if cfg.has_swap:
        prob = np.array([r.probability for r in results], dtype=float)
        flags = np.array([r.zero_probability for r in results], dtype=bool)
    overlays = {}
    if cfg.overlay_lhs:
        overlays["lhs_admissible"] = np.array(
            [lhs_admissible(p["k"], p["theta"]) for _, _, p in tasks], dtype=bool
        )
    result = SweepResult(
        config=cfg,
        points=points,
        values=values,
        probability=prob,
        zero_probability=flags,
        overlays=overlays,
        metadata={"axes": {a.name: len(a.values) for a in cfg.axes}, **cfg.metadata},
    )
    axis = cfg.resolved_boundary_axis()
    if axis is not None:
        result.boundaries = _find_boundaries(cfg, result, axis)
    return result


def _find_boundaries(cfg: SweepConfig, result: SweepResult, axis: str) -> list[BoundaryEvent]:
    events = []
    ax_i = cfg.axis_names.index(axis)
    shape = result.shape
    other = [i for i in range(len(shape)) if i != ax_i]
    xs = np.asarray(cfg.axes[ax_i].values, dtype=float)
    quantities = [q for q in cfg.quantities if not q.startswith("input_")]
    for other_idx in itertools.product(*(range(shape[i]) for i in other)):
        at = {cfg.axis_names[i]: cfg.axes[i].values[j] for i, j in zip(other, other_idx)}
        for q in quantities:
            grid = result.grid(q)
            index = [slice(None)] * len(shape)
            for i, j in zip(other, other_idx):
                index[i] = j
            ys = grid[tuple(index)]
            if np.any(np.isnan(ys)):
                continue
            params = {**cfg.fixed, **at}

            def f(x, q=q, params=params):
                v = evaluate_point(cfg.pipeline, (q,), {**params, axis: x}).values[q]
                return math.inf if v is None else v

            series = list(zip(xs, ys))
            death = detect_sudden_death(series, refine=f)
            if death is not None:
                events.append(BoundaryEvent("sudden_death", q, axis, at, death))
            rev = detect_revival(series, refine=f)
            if rev is not None:
                events.append(BoundaryEvent("revival", q, axis, at, rev[0], rev[1]))
    return events


# figure presets

_QUARTER_PI = math.pi / 4
FIGURE_ALIASES = {"B1": 10, "B2": 11, "B3": 12}


def figure_config(figure_id, grid: int | None = None) -> SweepConfig:
    """Preset sweep reproducing the data behind a published figure.

    ``1`` to ``9`` are the main-text figures; ``10``, ``11``, ``12`` (aliases
    ``B1``, ``B2``, ``B3``) are the appendix PD, GAD and SDC maps.
    """
    fid = _figure_number(figure_id)
    n = grid or DEFAULT_STEPS
    k_ax = Axis.linspace("k", 0.0, 1.0, n)
    th_ax = Axis.linspace("theta", 0.0, _QUARTER_PI, n)
    p_ax = Axis.linspace("p", 0.0, 1.0, n)
    both = BASE_QUANTITIES
    with_input = BASE_QUANTITIES + tuple(f"input_{q}" for q in BASE_QUANTITIES)
    meta = {"figure": fid}
    if fid == 1:
        return SweepConfig(("almeida",), both, (k_ax, th_ax), overlay_lhs=True, metadata=meta)
    if fid == 2:
        return SweepConfig(("almeida", "channel:pd"), both, (k_ax, th_ax), {"p": 0.4}, metadata=meta)
    if fid == 3:
        return SweepConfig(("almeida", "channel:pd"), both, (k_ax, p_ax), {"theta": _QUARTER_PI}, metadata=meta)
    if fid == 4:
        return SweepConfig(
            ("almeida", "channel:gad"), ("steering", "concurrence"), (th_ax, p_ax),
            {"k": 0.9, "gamma": 0.3}, metadata=meta,
        )
    if fid == 5:
        return SweepConfig(("almeida", "channel:sdc"), both, (k_ax, p_ax), {"theta": _QUARTER_PI}, metadata=meta)
    if fid == 6:
        return SweepConfig(("almeida", "swap:1"), with_input, (k_ax, th_ax), metadata=meta)
    if fid == 7:
        return SweepConfig(("almeida", "swap:3"), with_input, (k_ax, th_ax), metadata=meta)
    if fid in (8, 9):
        m = grid or DEFAULT_THETA_STEPS_2D
        meta["theta_points"] = m
        return SweepConfig(
            ("almeida", "swap"), ("steering", "input_steering"),
            (Axis("bell", (1, 3)), Axis.linspace("theta", 0.0, _QUARTER_PI, m)),
            {"k": 1.0 if fid == 8 else 0.93}, metadata=meta,
        )
    if fid == 10:
        return SweepConfig(("almeida", "channel:pd"), both, (th_ax, p_ax), {"k": 0.8}, metadata=meta)
    if fid == 11:
        return SweepConfig(
            ("almeida", "channel:gad"), ("steering", "concurrence"), (th_ax, p_ax),
            {"k": 0.9, "gamma": 0.6}, metadata=meta,
        )
    return SweepConfig(("almeida", "channel:sdc"), both, (th_ax, p_ax), {"k": 0.8}, metadata=meta)


def _figure_number(figure_id) -> int:
    key = str(figure_id).strip().upper()
    if key in FIGURE_ALIASES:
        return FIGURE_ALIASES[key]
    try:
        fid = int(key)
    except ValueError:
        raise ConfigError(f"unknown figure {figure_id!r}") from None
    if not 1 <= fid <= 12:
        raise ConfigError(f"unknown figure {figure_id!r}")
    return fid


def figure_data(figure_id, grid: int | None = None, workers: int = 1) -> SweepResult:
    return run_sweep(figure_config(figure_id, grid), workers=workers)
