"""Model-versus-measurement comparison on the coincidence dataset.

Two data sets: set A keeps the pump energy fixed and scans the
stimulation energy, set B does the opposite. Each row is compared to the
model both normalised to the set's lowest-energy point and in absolute
triplets per second.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .coincidence import fit_transfer_function, invert_coincidence_fraction
from .config import ExperimentConfig
from .errors import ConfigError, DomainError, OutputError
from .model import integrated_flux, triplet_flux_full
from .optics import UJ
from .svgplot import AxesSpec, PlotSeries, render_svg

# which energy is scanned in each set
TUNABLE = {"A": "stimulation", "B": "pump"}


@dataclass(frozen=True)
class DataPoint:
    """One measured row. Energies in uJ; eta_hat is the raw coincidence fraction per pulse."""

    set_label: str
    pump_energy: float
    pump_err: float
    stimulation_energy: float
    stimulation_err: float
    eta_hat: float
    eta_err: float

    def __post_init__(self):
        if self.set_label not in TUNABLE:
            raise ConfigError(f"set label must be one of {sorted(TUNABLE)}, got {self.set_label!r}")
        if not (self.pump_energy > 0 and self.stimulation_energy > 0):
            raise ConfigError("data point energies must be > 0")
        if self.eta_hat < 0 or min(self.pump_err, self.stimulation_err, self.eta_err) < 0:
            raise ConfigError("coincidence fraction and uncertainties must be >= 0")

    @property
    def tunable_energy(self) -> float:
        return self.stimulation_energy if TUNABLE[self.set_label] == "stimulation" else self.pump_energy


def builtin_table1() -> list[DataPoint]:
    """Averaged coincidence fractions (no statistical correction) for both sets."""
    set_a = [(3.04, 0.6, 0.567, 0.125), (5.01, 0.8, 1.77, 0.125), (7.4, 1.3, 5.67, 0.118),
             (9.0, 1.9, 8.78, 1.40), (11.2, 1.6, 14.3, 3.42)]
    set_b = [(8.1, 2.5, 1.33, 0.656), (8.8, 2.2, 3.03, 1.24), (9.5, 3.1, 4.33, 1.65)]
    rows = [DataPoint("A", 19.3, 4.7, xi, dxi, eta * 1e-3, deta * 1e-3) for xi, dxi, eta, deta in set_a]
    rows += [DataPoint("B", xi, dxi, 19.0, 3.8, eta * 1e-3, deta * 1e-3) for xi, dxi, eta, deta in set_b]
    return rows


@dataclass(frozen=True)
class ReportRow:
    set_label: str
    xi_p_uJ: float
    xi_p_err: float
    xi_sti_uJ: float
    xi_sti_err: float
    eta_hat: float
    eta_err: float
    n_measured: float
    n_meas_lo: float
    n_meas_hi: float
    n_model: float
    norm_measured: float
    norm_model: float
    residual: float

    @property
    def tunable_energy(self) -> float:
        return self.xi_sti_uJ if TUNABLE[self.set_label] == "stimulation" else self.xi_p_uJ


CSV_COLUMNS = ("set", "xi_p_uJ", "xi_p_err", "xi_sti_uJ", "xi_sti_err", "eta_hat", "eta_err",
               "n_measured", "n_meas_lo", "n_meas_hi", "n_model", "norm_measured", "norm_model", "residual")


@dataclass(frozen=True)
class AbsolutePoint:
    set_label: str
    energy_product_uJ2: float
    model_per_s: float
    measured_per_s: float
    measured_lo: float
    measured_hi: float


def load_dataset(cfg: ExperimentConfig) -> list[DataPoint]:
    if cfg.dataset_csv:
        return load_dataset_csv(cfg.dataset_csv)
    return builtin_table1()


def model_per_pulse(cfg: ExperimentConfig, xi_p_uJ: float, xi_sti_uJ: float) -> float:
    """Model triplets per pulse; falls back to the integrator when delta_k != 0."""
    icfg = cfg.interaction(xi_p_uJ * UJ, xi_sti_uJ * UJ)
    if icfg.delta_k != 0:
        return integrated_flux(icfg).triplets_per_pulse
    return triplet_flux_full(icfg).triplets_per_pulse


def measured_interval(eta: float, sigma: float, transfer_function: float) -> tuple[float, float, float]:
    """Triplets per pulse and its interval from pushing eta -/+ sigma through the inversion."""
    n = invert_coincidence_fraction(eta, transfer_function)
    lo = invert_coincidence_fraction(max(eta - sigma, 0.0), transfer_function)
    hi = invert_coincidence_fraction(eta + sigma, transfer_function)
    return n, lo, hi


def normalize(values: Sequence[float], ref_index: int = 0) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return v / v[ref_index]


def resolve_transfer_function(cfg: ExperimentConfig, data: Sequence[DataPoint] | None = None,
                              transfer_function: float | None = None) -> float:
    if transfer_function is not None:
        return transfer_function
    if cfg.transfer_function != "fit":
        return cfg.transfer_function
    return fit_tf_to_data(cfg, data).value


def fit_tf_to_data(cfg: ExperimentConfig, data: Sequence[DataPoint] | None = None):
    data = load_dataset(cfg) if data is None else data
    pred = [model_per_pulse(cfg, p.pump_energy, p.stimulation_energy) for p in data]
    return fit_transfer_function(pred, [p.eta_hat for p in data], [p.eta_err for p in data], cfg.tf_bounds)


def run_set(set_label: str, cfg: ExperimentConfig, data: Sequence[DataPoint] | None = None,
            transfer_function: float | None = None) -> list[ReportRow]:
    """Rows of one set, sorted by the scanned energy; normalised to the first row."""
    data = load_dataset(cfg) if data is None else list(data)
    tf = resolve_transfer_function(cfg, data, transfer_function)
    pts = sorted((p for p in data if p.set_label == set_label), key=lambda p: p.tunable_energy)
    if not pts:
        raise ConfigError(f"dataset has no rows for set {set_label!r}")
    meas = [measured_interval(p.eta_hat, p.eta_err, tf) for p in pts]
    model = [model_per_pulse(cfg, p.pump_energy, p.stimulation_energy) for p in pts]
    norm_meas = normalize([m[0] for m in meas])
    norm_model = normalize(model)
    return [
        ReportRow(p.set_label, p.pump_energy, p.pump_err, p.stimulation_energy, p.stimulation_err,
                  p.eta_hat, p.eta_err, n, lo, hi, mod, float(nm), float(nmod), float(nm - nmod))
        for p, (n, lo, hi), mod, nm, nmod in zip(pts, meas, model, norm_meas, norm_model)
    ]


def normalized_error_bars(rows: Sequence[ReportRow]) -> tuple[np.ndarray, np.ndarray]:
    """Vertical bars of the normalised measured column.

    N_i / N_ref is increasing in eta_i and decreasing in eta_ref, so the
    image of both eta +/- sigma intervals is [lo_i / hi_ref, hi_i / lo_ref].
    The reference row shows its own interval over N_ref.
    """
    ref = min(range(len(rows)), key=lambda i: rows[i].tunable_energy)
    r = rows[ref]
    lo = np.array([row.n_meas_lo for row in rows]) / r.n_meas_hi
    hi = np.array([row.n_meas_hi for row in rows]) / r.n_meas_lo if r.n_meas_lo > 0 else np.full(len(rows), np.inf)
    lo[ref] = r.n_meas_lo / r.n_measured
    hi[ref] = r.n_meas_hi / r.n_measured
    return lo, hi


def absolute_curve(cfg: ExperimentConfig, data: Sequence[DataPoint] | None = None,
                   transfer_function: float | None = None) -> list[AbsolutePoint]:
    """Model and measured triplets per second for every row, sorted by xi_p * xi_sti."""
    data = load_dataset(cfg) if data is None else list(data)
    tf = resolve_transfer_function(cfg, data, transfer_function)
    rate = cfg.pump_geometry.repetition_rate
    out = []
    for p in data:
        n, lo, hi = measured_interval(p.eta_hat, p.eta_err, tf)
        out.append(AbsolutePoint(p.set_label, p.pump_energy * p.stimulation_energy,
                                 model_per_pulse(cfg, p.pump_energy, p.stimulation_energy) * rate,
                                 n * rate, lo * rate, hi * rate))
    return sorted(out, key=lambda a: a.energy_product_uJ2)


def fit_scale_factor(points: Sequence[AbsolutePoint]) -> float:
    """Weighted least-squares factor s minimising sum(((meas - s * model) / sigma)**2)."""
    m = np.array([p.model_per_s for p in points])
    y = np.array([p.measured_per_s for p in points])
    sig = np.array([(p.measured_hi - p.measured_lo) / 2 for p in points])
    if np.any(sig <= 0):
        raise DomainError("scale fit needs positive measured intervals")
    w = 1 / sig**2
    return float(np.sum(w * m * y) / np.sum(w * m * m))


def model_curve_normalized(cfg: ExperimentConfig, rows: Sequence[ReportRow], samples: int = 100):
    """Model normalised to the reference row, sampled across the scanned energy range."""
    ref = min(rows, key=lambda r: r.tunable_energy)
    tun = [r.tunable_energy for r in rows]
    xs = np.linspace(min(tun), max(tun), samples)
    ref_val = model_per_pulse(cfg, ref.xi_p_uJ, ref.xi_sti_uJ)
    if TUNABLE[ref.set_label] == "stimulation":
        ys = [model_per_pulse(cfg, ref.xi_p_uJ, x) for x in xs]
    else:
        ys = [model_per_pulse(cfg, x, ref.xi_sti_uJ) for x in xs]
    return xs, np.asarray(ys) / ref_val


def model_curve_absolute(cfg: ExperimentConfig, points: Sequence[AbsolutePoint], samples: int = 100):
    """Model triplets/s against the energy product (gain depends on the product only)."""
    prod = [p.energy_product_uJ2 for p in points]
    xs = np.geomspace(min(prod), max(prod), samples)
    rate = cfg.pump_geometry.repetition_rate
    ys = [model_per_pulse(cfg, np.sqrt(x), np.sqrt(x)) * rate for x in xs]
    return xs, np.asarray(ys)


# --- output ------------------------------------------------------------------

def _atomic_write(path: str | Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _num(v: float) -> str:
    return repr(float(v))


def rows_to_csv(rows: Iterable[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, quoting=csv.QUOTE_NONE, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        t = astuple(r)
        w.writerow([t[0], *map(_num, t[1:])])
    return buf.getvalue()


def emit_csv(rows: Iterable[ReportRow], path: str | Path) -> Path:
    return _atomic_write(path, rows_to_csv(rows))


def _read_csv_dicts(path):
    try:
        with open(path, newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def read_csv(path: str | Path) -> list[ReportRow]:
    out = []
    names = [f.name for f in fields(ReportRow)]
    for rec in _read_csv_dicts(path):
        vals = [rec["set"], *(float(rec[c]) for c in CSV_COLUMNS[1:])]
        out.append(ReportRow(**dict(zip(names, vals))))
    return out


def load_dataset_csv(path: str | Path) -> list[DataPoint]:
    """Dataset in the report CSV schema; only the input columns are required."""
    need = CSV_COLUMNS[:7]
    recs = _read_csv_dicts(path)
    out = []
    for i, rec in enumerate(recs, start=2):
        absent = [c for c in need if not rec.get(c)]
        if absent:
            raise ConfigError(f"{path}: line {i} lacks columns", absent)
        try:
            out.append(DataPoint(rec["set"], *(float(rec[c]) for c in need[1:])))
        except ValueError as exc:
            raise ConfigError(f"{path}: line {i}: {exc}") from exc
    return out


def absolute_to_csv(points: Iterable[AbsolutePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, quoting=csv.QUOTE_NONE, lineterminator="\n")
    w.writerow(("set", "xi_product_uJ2", "model_per_s", "measured_per_s", "measured_lo", "measured_hi"))
    for p in points:
        t = astuple(p)
        w.writerow([t[0], *map(_num, t[1:])])
    return buf.getvalue()


def normalized_plot_series(rows: Sequence[ReportRow], curve=None) -> PlotSeries:
    lo, hi = normalized_error_bars(rows)
    cx, cy = curve if curve is not None else ([], [])
    return PlotSeries(
        labels=[f"{r.set_label}:{r.tunable_energy:g}uJ" for r in rows],
        x=[r.tunable_energy for r in rows],
        y=[r.norm_measured for r in rows],
        y_lo=lo, y_hi=hi, curve_x=cx, curve_y=cy,
        measured_label="measured (coincidences)", model_label="semiclassical model",
    )


def absolute_plot_series(points: Sequence[AbsolutePoint], curve=None) -> PlotSeries:
    cx, cy = curve if curve is not None else ([], [])
    return PlotSeries(
        labels=[f"{p.set_label}:{p.energy_product_uJ2:g}uJ2" for p in points],
        x=[p.energy_product_uJ2 for p in points],
        y=[p.measured_per_s for p in points],
        y_lo=[p.measured_lo for p in points], y_hi=[p.measured_hi for p in points],
        curve_x=cx, curve_y=cy,
        measured_label="measured (coincidences)", model_label="semiclassical model",
    )


def emit_svg_plot(series: PlotSeries, axes: AxesSpec, path: str | Path) -> Path:
    return _atomic_write(path, render_svg(series, axes))


def report(cfg: ExperimentConfig, out_dir: str | Path | None = None,
           transfer_function: float | None = None) -> dict[str, Path]:
    """Write set_A.csv, set_B.csv, absolute.csv and the three comparison SVGs."""
    out = Path(cfg.output_dir if out_dir is None else out_dir)
    data = load_dataset(cfg)
    tf = resolve_transfer_function(cfg, data, transfer_function)
    written = {}
    titles = {"A": ("Set A: normalised flux vs stimulation energy", "stimulation energy (uJ)"),
              "B": ("Set B: normalised flux vs pump energy", "pump energy (uJ)")}
    for label, fig in (("A", "fig3"), ("B", "fig4")):
        rows = run_set(label, cfg, data, tf)
        written[f"set_{label}_csv"] = emit_csv(rows, out / f"set_{label}.csv")
        title, xlabel = titles[label]
        series = normalized_plot_series(rows, model_curve_normalized(cfg, rows))
        written[f"{fig}_svg"] = emit_svg_plot(series, AxesSpec(title, xlabel, "normalised triplet flux"),
                                              out / f"{fig}_set_{label}_normalized.svg")
    pts = absolute_curve(cfg, data, tf)
    written["absolute_csv"] = _atomic_write(out / "absolute.csv", absolute_to_csv(pts))
    axes = AxesSpec(f"Absolute triplet flux, T_F = {tf:g}", "pump x stimulation energy (uJ^2)",
                    "triplets per second", log=True)
    written["fig5_svg"] = emit_svg_plot(absolute_plot_series(pts, model_curve_absolute(cfg, pts)), axes,
                                        out / "fig5_absolute.svg")
    return written
