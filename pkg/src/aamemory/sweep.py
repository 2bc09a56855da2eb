"""Parameter sweeps over the lattice model with deterministic CSV output."""

from __future__ import annotations

import configparser
import csv
import io
import itertools
import logging
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    DEFAULT_HORIZON,
    DEFAULT_SAMPLES,
    DecoherenceSeries,
    TimeGrid,
    decoherence_series,
    default_grid,
)
from .lattice import GOLDEN_RATIO, LatticeConfig
from .memory import backflow_report

log = logging.getLogger(__name__)

PHASE_RNG = "numpy.random.PCG64"

PARAM_COLUMNS = [
    "length", "hopping", "delta_over_j", "beta", "phase", "epsilon_over_j",
    "impurity_site", "boundary", "t_max", "n_samples",
]
RESULT_COLUMNS = ["backflow", "outflow", "ratio", "abs_chi_final", "status", "message"]
COLUMNS = PARAM_COLUMNS + RESULT_COLUMNS


def fmt(x) -> str:
    """Fixed 17-significant-digit rendering used for every float written."""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def draw_phases(count: int, seed: int) -> list[float]:
    """``count`` uniform phases on ``[0, 2 pi)`` from PCG64 seeded with ``seed``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    phases = 2.0 * math.pi * rng.random(count)
    # random() is in [0, 1) but the product can round up to 2 pi
    return [float(p) if p < 2.0 * math.pi else 0.0 for p in phases]


@dataclass(frozen=True)
class GridSpec:
    """Time grid rule for a sweep.

    With ``t_max`` set every point uses that horizon. Otherwise the horizon is
    ``horizon / epsilon`` (see :func:`aamemory.dynamics.default_grid`).
    """

    n_samples: int = DEFAULT_SAMPLES
    t_max: float | None = None
    horizon: float = DEFAULT_HORIZON

    def for_config(self, config: LatticeConfig) -> TimeGrid:
        if self.t_max is not None:
            return TimeGrid(self.t_max, self.n_samples)
        return default_grid(config, self.n_samples, self.horizon)


@dataclass(frozen=True)
class SweepSpec:
    delta_over_j: tuple[float, ...]
    epsilon_over_j: tuple[float, ...]
    lengths: tuple[int, ...]
    phases: tuple[float, ...] = (0.0,)
    phase_count: int | None = None
    seed: int | None = None
    grid: GridSpec = field(default_factory=GridSpec)
    output_path: str | None = None
    hopping: float = 1.0
    incommensuration: float = GOLDEN_RATIO
    impurity_site: int = 1
    boundary: str = "periodic"

    def __post_init__(self):
        for name in ("delta_over_j", "epsilon_over_j", "lengths"):
            vals = tuple(getattr(self, name))
            if not vals:
                raise ValueError(f"sweep axis {name!r} is empty")
            object.__setattr__(self, name, vals)
        if self.phase_count is not None:
            if self.seed is None:
                raise ValueError("random phases need a seed")
            object.__setattr__(self, "phases", tuple(draw_phases(self.phase_count, self.seed)))
        if not self.phases:
            raise ValueError("sweep axis 'phases' is empty")
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))

    def configs(self) -> list[LatticeConfig]:
        """Every lattice configuration of the Cartesian product, in canonical order."""
        out = []
        for length, eps, phi, delta in itertools.product(
                sorted(self.lengths), sorted(self.epsilon_over_j), self.phases,
                sorted(self.delta_over_j)):
            out.append(LatticeConfig(
                length=length,
                hopping=self.hopping,
                potential_strength=delta * self.hopping,
                incommensuration=self.incommensuration,
                phase=phi,
                impurity_coupling=eps * self.hopping,
                impurity_site=self.impurity_site,
                boundary=self.boundary,
            ))
        return out

    def __len__(self):
        return (len(self.lengths) * len(self.epsilon_over_j) * len(self.phases)
                * len(self.delta_over_j))


@dataclass(frozen=True)
class RunRecord:
    """One evaluated parameter tuple; ``params`` alone re-creates the run."""

    params: dict
    backflow: float = math.nan
    outflow: float = math.nan
    ratio: float = math.nan
    abs_chi_final: float = math.nan
    runtime: float = 0.0
    status: str = "ok"
    message: str = ""
    version: str = __version__

    @property
    def key(self) -> tuple[str, ...]:
        return record_key(self.params)

    def config(self) -> LatticeConfig:
        return config_from_params(self.params)

    def grid(self) -> TimeGrid:
        return TimeGrid(float(self.params["t_max"]), int(self.params["n_samples"]))

    def row(self) -> dict[str, str]:
        out = {k: fmt(self.params[k]) for k in PARAM_COLUMNS}
        out.update(
            backflow=fmt(self.backflow), outflow=fmt(self.outflow), ratio=fmt(self.ratio),
            abs_chi_final=fmt(self.abs_chi_final), status=self.status,
            message=self.message.replace("\n", " "),
        )
        return out

    @classmethod
    def from_row(cls, row: dict[str, str]) -> RunRecord:
        params = {
            "length": int(row["length"]),
            "hopping": float(row["hopping"]),
            "delta_over_j": float(row["delta_over_j"]),
            "beta": float(row["beta"]),
            "phase": float(row["phase"]),
            "epsilon_over_j": float(row["epsilon_over_j"]),
            "impurity_site": int(row["impurity_site"]),
            "boundary": row["boundary"],
            "t_max": float(row["t_max"]),
            "n_samples": int(row["n_samples"]),
        }
        return cls(
            params, float(row["backflow"]), float(row["outflow"]), float(row["ratio"]),
            float(row["abs_chi_final"]), status=row["status"], message=row.get("message", ""),
        )


def params_of(config: LatticeConfig, grid: TimeGrid) -> dict:
    j = config.hopping
    return {
        "length": config.length,
        "hopping": j,
        "delta_over_j": config.potential_strength / j,
        "beta": config.incommensuration,
        "phase": config.phase,
        "epsilon_over_j": config.impurity_coupling / j,
        "impurity_site": config.impurity_site,
        "boundary": config.boundary,
        "t_max": grid.t_max,
        "n_samples": grid.n_samples,
    }


def config_from_params(p: dict) -> LatticeConfig:
    j = float(p["hopping"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return LatticeConfig(
            length=int(p["length"]), hopping=j,
            potential_strength=float(p["delta_over_j"]) * j,
            incommensuration=float(p["beta"]), phase=float(p["phase"]),
            impurity_coupling=float(p["epsilon_over_j"]) * j,
            impurity_site=int(p["impurity_site"]), boundary=p["boundary"],
        )


def record_key(params: dict) -> tuple[str, ...]:
    return tuple(fmt(params[k]) for k in PARAM_COLUMNS)


def _sort_key(rec: RunRecord):
    p = rec.params
    return (p["length"], p["epsilon_over_j"], p["phase"], p["delta_over_j"], p["beta"],
            p["hopping"], p["impurity_site"], p["boundary"], p["t_max"], p["n_samples"])


def evaluate_point(params: dict) -> RunRecord:
    """Evaluate one parameter tuple; failures become error records."""
    start = time.perf_counter()
    try:
        series = decoherence_series(config_from_params(params),
                                    TimeGrid(params["t_max"], params["n_samples"]))
        rep = backflow_report(series)
    except Exception as exc:  # recorded, the sweep continues
        log.warning("point %s failed: %s", record_key(params), exc)
        return RunRecord(params, runtime=time.perf_counter() - start,
                         status="error", message=f"{type(exc).__name__}: {exc}")
    return RunRecord(params, rep.backflow, rep.outflow, rep.ratio, rep.final_magnitude,
                     runtime=time.perf_counter() - start)


def _metadata(spec: SweepSpec | None, extra: dict | None = None) -> list[str]:
    lines = [f"# aamemory {__version__}"]
    if spec is not None:
        lines.append(f"# seed = {spec.seed if spec.seed is not None else 'none'}")
        lines.append(f"# phase_rng = {PHASE_RNG}")
        g = spec.grid
        if g.t_max is None:
            lines.append(f"# grid = n_samples {g.n_samples}, t_max horizon/epsilon "
                         f"with horizon {fmt(float(g.horizon))}")
        else:
            lines.append(f"# grid = n_samples {g.n_samples}, t_max {fmt(float(g.t_max))}")
        lines.append("# flows accumulated from t = 0")
    for k, v in (extra or {}).items():
        lines.append(f"# {k} = {v}")
    return lines


def format_records(records, spec: SweepSpec | None = None, extra: dict | None = None) -> str:
    buf = io.StringIO()
    for line in _metadata(spec, extra):
        buf.write(line + "\n")
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in sorted(records, key=_sort_key):
        writer.writerow(rec.row())
    return buf.getvalue()


def read_records(path) -> list[RunRecord]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read sweep results {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return [RunRecord.from_row(r) for r in csv.DictReader(lines)]


def _write_text(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _append_partial(path: Path, rec: RunRecord):
    new = not path.exists()
    try:
        with path.open("a", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
            if new:
                w.writeheader()
            w.writerow(rec.row())
            fh.flush()
    except OSError as exc:
        raise OSError(f"cannot append to {path}: {exc}") from exc


def partial_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".partial")


def timing_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".timing")


def run_sweep(spec: SweepSpec, output_path=None, *, workers: int | None = 1,
              resume: bool = False) -> list[RunRecord]:
    """Evaluate every point of ``spec`` and persist the sorted results.

    Completed points are appended to ``<output>.partial`` as they finish; the
    final CSV is written sorted by parameter tuple, so its bytes do not depend
    on ``workers`` or completion order. Wall-clock runtimes go to
    ``<output>.timing``. With ``resume`` the points already present in the
    output or partial file are not recomputed.
    """
    output_path = output_path or spec.output_path
    out = Path(output_path) if output_path else None
    points = [params_of(c, spec.grid.for_config(c)) for c in spec.configs()]

    done: dict[tuple, RunRecord] = {}
    if resume and out is not None:
        for source in (out, partial_path(out)):
            if source.exists():
                for rec in read_records(source):
                    done[rec.key] = rec
    wanted = {record_key(p) for p in points}
    done = {k: v for k, v in done.items() if k in wanted and v.status == "ok"}
    todo = [p for p in points if record_key(p) not in done]
    log.info("sweep: %d points, %d already done", len(points), len(done))

    if out is not None and not resume:
        partial_path(out).unlink(missing_ok=True)

    def sink(rec: RunRecord):
        done[rec.key] = rec
        if out is not None:
            _append_partial(partial_path(out), rec)

    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(evaluate_point, p) for p in todo]
            for fut in as_completed(futures):
                sink(fut.result())
    else:
        for p in todo:
            sink(evaluate_point(p))

    records = sorted(done.values(), key=_sort_key)
    if out is not None:
        _write_text(out, format_records(records, spec))
        timing = ["key,runtime_s"] + [
            f"\"{'|'.join(r.key)}\",{r.runtime:.3f}" for r in records
        ]
        _write_text(timing_path(out), "\n".join(timing) + "\n")
        partial_path(out).unlink(missing_ok=True)
    return records


# ---------------------------------------------------------------- config files

def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def _axis(section, name: str) -> list[float]:
    if "values" in section:
        vals = _floats(section["values"])
    elif {"start", "stop", "step"} <= set(section):
        start, stop, step = (float(section[k]) for k in ("start", "stop", "step"))
        if step <= 0:
            raise ValueError(f"[{name}] step must be positive")
        if stop < start:
            raise ValueError(f"[{name}] stop < start: empty range")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        vals = [round(start + k * step, 12) for k in range(n)]
    else:
        raise ValueError(f"[{name}] needs 'values' or 'start/stop/step'")
    if not vals:
        raise ValueError(f"[{name}] is empty")
    return vals


def parse_sweep_config(text: str, *, seed: int | None = None) -> SweepSpec:
    """Build a :class:`SweepSpec` from ``key = value`` text with one section per axis.

    Sections: ``[delta]``, ``[epsilon]``, ``[length]``, ``[phase]`` (``values``
    or ``count`` + ``seed``), optional ``[grid]`` (``n_samples``, ``t_max``,
    ``horizon``), ``[lattice]`` (``hopping``, ``beta``, ``impurity_site``,
    ``boundary``) and ``[output]`` (``path``). ``seed`` overrides the file.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_string(text)
    for required in ("delta", "epsilon", "length"):
        if required not in cp:
            raise ValueError(f"missing section [{required}]")
    deltas = _axis(cp["delta"], "delta")
    epsilons = _axis(cp["epsilon"], "epsilon")
    lengths = [int(v) for v in _axis(cp["length"], "length")]

    phases, count = (0.0,), None
    if "phase" in cp:
        sec = cp["phase"]
        if "count" in sec:
            count = int(sec["count"])
            if seed is None and "seed" in sec:
                seed = int(sec["seed"])
            if seed is None:
                raise ValueError("[phase] count needs a seed")
        else:
            phases = tuple(_axis(sec, "phase"))

    grid = GridSpec()
    if "grid" in cp:
        g = cp["grid"]
        grid = GridSpec(
            n_samples=g.getint("n_samples", DEFAULT_SAMPLES),
            t_max=g.getfloat("t_max") if "t_max" in g else None,
            horizon=g.getfloat("horizon", DEFAULT_HORIZON),
        )
    lat = cp["lattice"] if "lattice" in cp else {}
    out = cp["output"].get("path") if "output" in cp else None
    return SweepSpec(
        delta_over_j=tuple(deltas), epsilon_over_j=tuple(epsilons), lengths=tuple(lengths),
        phases=phases, phase_count=count, seed=seed, grid=grid, output_path=out,
        hopping=float(lat.get("hopping", 1.0)),
        incommensuration=float(lat.get("beta", GOLDEN_RATIO)),
        impurity_site=int(lat.get("impurity_site", 1)),
        boundary=lat.get("boundary", "periodic"),
    )


def load_sweep_config(path, *, seed: int | None = None) -> SweepSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read sweep config {path}: {exc}") from exc
    return parse_sweep_config(text, seed=seed)


# ---------------------------------------------------------------- figure data

def config_tag(config: LatticeConfig) -> str:
    d = config.as_dict()
    return " ".join(f"{k}={fmt(v)}" for k, v in d.items())


def format_echo_series(series: DecoherenceSeries) -> str:
    buf = io.StringIO()
    buf.write(f"# aamemory {__version__}\n")
    if series.config is not None:
        buf.write(f"# config {config_tag(series.config)}\n")
    buf.write(f"# grid t_max={fmt(series.grid.t_max)} n_samples={series.grid.n_samples}\n")
    buf.write("t,re_chi,im_chi,abs_chi,log10_abs_chi\n")
    log10 = series.log_magnitude / math.log(10.0)
    for t, c, a, lg in zip(series.times, series.chi, series.magnitude, log10):
        buf.write(f"{fmt(t)},{fmt(c.real)},{fmt(c.imag)},{fmt(a)},{fmt(lg)}\n")
    return buf.getvalue()


def read_echo_series(path) -> dict[str, np.ndarray]:
    """Columns of an echo file as arrays, keyed by header name."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read echo series {path}: {exc}") from exc
    rows = list(csv.reader(ln for ln in text.splitlines() if ln and not ln.startswith("#")))
    header, body = rows[0], np.array(rows[1:], dtype=float).reshape(-1, len(rows[0]))
    return {name: body[:, k] for k, name in enumerate(header)}


def emit_echo_series(config: LatticeConfig, grid: TimeGrid | None, path) -> DecoherenceSeries:
    series = decoherence_series(config, grid)
    _write_text(Path(path), format_echo_series(series))
    return series


def _compact(records, path, spec, columns, extra=None):
    lines = _metadata(spec, extra)
    lines.append(",".join(columns))
    for rec in sorted(records, key=_sort_key):
        row = rec.row()
        lines.append(",".join(row[c] for c in columns))
    _write_text(Path(path), "\n".join(lines) + "\n")


R_CURVE_COLUMNS = ["length", "epsilon_over_j", "phase", "delta_over_j", "ratio",
                   "backflow", "outflow", "t_max", "n_samples", "status"]


def emit_r_curve(spec: SweepSpec, path, *, workers: int | None = 1) -> list[RunRecord]:
    """Memory ratio against ``delta_over_j``; one curve per (L, epsilon, phase)."""
    records = run_sweep(spec, None, workers=workers)
    _compact(records, path, spec, R_CURVE_COLUMNS)
    return records


def emit_phase_scan(spec: SweepSpec, path, *, workers: int | None = 1) -> list[RunRecord]:
    """Memory ratio curves for a set of potential phases; one curve per phase."""
    if len(spec.phases) < 2 and spec.phase_count is None:
        log.warning("phase scan with a single phase")
    records = run_sweep(spec, None, workers=workers)
    _compact(records, path, spec, R_CURVE_COLUMNS)
    return records
