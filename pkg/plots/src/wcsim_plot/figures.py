"""CSV parsing, series aggregation, slope fits, and the two figures.

The input is the simulator's sweep CSV. Series are aggregated per N with
the configured statistic (non-converged rows are excluded and counted),
plotted on log-log axes, and each series' fitted slope goes to a sidecar
``<out>.slopes.txt`` report. Reference scaling-law overlays use the stated
dominant terms with a least-squares fitted constant.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

EXPECTED_COLUMNS = ("algorithm,phase_mode,N,alpha,gamma_db,epsilon,kappa,K,u,"
                    "seed,trial,T_slots,B_tbp,E_energy,mse,converged,"
                    "resamples").split(",")

FIGURES = ("resources", "quantized")
AGGREGATIONS = ("median", "mean")


class PlotDataError(Exception):
    """Unusable input: missing columns, empty series, unknown figure."""


@dataclass(frozen=True)
class FigureSpec:
    csv_paths: tuple
    figure: str
    out: str
    agg: str = "median"

    def __post_init__(self) -> None:
        if self.figure not in FIGURES:
            raise PlotDataError(f"unknown figure {self.figure!r}")
        if self.agg not in AGGREGATIONS:
            raise PlotDataError(f"unknown aggregation {self.agg!r}")
        if not self.csv_paths:
            raise PlotDataError("at least one CSV path is required")


def read_rows(paths) -> list:
    """Parse one or more sweep CSVs into typed row dicts."""
    rows = []
    for path in paths:
        try:
            fh = open(path, newline="")
        except OSError as exc:
            raise PlotDataError(f"cannot read {path}: {exc}") from None
        with fh:
            reader = csv.DictReader(fh)
            missing = [c for c in EXPECTED_COLUMNS
                       if c not in (reader.fieldnames or [])]
            if missing:
                raise PlotDataError(f"{path}: missing columns {missing}")
            for raw in reader:
                rows.append({
                    "algorithm": raw["algorithm"],
                    "phase_mode": raw["phase_mode"],
                    "N": int(raw["N"]),
                    "alpha": float(raw["alpha"]),
                    "gamma_db": float(raw["gamma_db"]),
                    "epsilon": float(raw["epsilon"]),
                    "kappa": float(raw["kappa"]),
                    "K": int(raw["K"]),
                    "u": float(raw["u"]),
                    "T_slots": int(raw["T_slots"]),
                    "B_tbp": float(raw["B_tbp"]) if raw["B_tbp"] else None,
                    "E_energy": float(raw["E_energy"]),
                    "mse": float(raw["mse"]) if raw["mse"] else None,
                    "converged": raw["converged"] == "True",
                })
    if not rows:
        raise PlotDataError("no data rows in input")
    return rows


def fit_loglog_slope(n_values, y_values):
    """(slope, standard error) of the log-log least-squares line.

    The standard error is 0 for a two-point fit; a single point has no
    slope and raises.
    """
    x = np.log(np.asarray(n_values, dtype=float))
    y = np.log(np.asarray(y_values, dtype=float))
    if x.size < 2:
        raise PlotDataError("slope fit needs at least 2 distinct N values")
    slope, intercept = np.polyfit(x, y, 1)
    if x.size == 2:
        return float(slope), 0.0
    residuals = y - (slope * x + intercept)
    s2 = float((residuals ** 2).sum()) / (x.size - 2)
    stderr = math.sqrt(s2 / float(((x - x.mean()) ** 2).sum()))
    return float(slope), stderr


# ---------------------------------------------------------------------------
# reference scaling laws (dominant terms; constants fitted per series)


def _reference_law(algorithm: str, metric: str, params: dict):
    """Dominant-term growth law for a (series, metric), or None if unstated."""
    alpha = params["alpha"]
    kappa = params["kappa"]
    k_uses = params["K"]
    u = params["u"]
    eps = params["epsilon"]
    fixed = params["phase_mode"] == "fixed"
    log_eps = math.log(1.0 / eps)
    laws = {
        ("randomized", "T_slots"): lambda n: n * log_eps / math.log(n),
        ("randomized", "B_tbp"): lambda n: n * log_eps,
        ("randomized", "E_energy"): lambda n: (
            n ** (2.0 - alpha / 2.0) * math.log(n) ** (alpha / 2.0 - 1.0)
            * log_eps),
        ("path", "T_slots"): lambda n: math.sqrt(n / math.log(n)),
        ("path", "B_tbp"): lambda n: math.sqrt(n / math.log(n)),
        ("path", "E_energy"): lambda n: (
            n ** (1.0 - alpha / 2.0) * math.log(n) ** (alpha / 2.0) * log_eps),
        ("hierarchical", "T_slots"): lambda n: n ** kappa,
        ("hierarchical", "B_tbp"): lambda n: n ** kappa,
        ("hierarchical", "E_energy"): lambda n: (
            n ** (1.0 - alpha / 2.0 + kappa * alpha / 2.0) if fixed
            else n ** (kappa * alpha / 2.0)),
        ("qconsensus", "E_energy"): lambda n: (
            k_uses * n ** (2.0 - alpha / 2.0 + u)
            * math.log(n) ** (alpha / 2.0)),
        ("qconsensus", "mse"): lambda n: float(n) ** (-2.0 * k_uses * u - 1.0),
        ("qhierarchical", "E_energy"): lambda n: (
            k_uses * n ** (1.0 - alpha / 2.0 + kappa * alpha / 2.0 + u)
            if fixed else k_uses * n ** (kappa * alpha / 2.0 + u)),
        ("qhierarchical", "mse"): lambda n: float(n) ** (-2.0 * k_uses * u),
    }
    return laws.get((algorithm, metric))


# ---------------------------------------------------------------------------
# aggregation


def _series_key(row: dict, figure: str) -> tuple:
    if figure == "quantized":
        return (row["algorithm"], row["phase_mode"], row["K"], row["u"])
    return (row["algorithm"], row["phase_mode"])


def _series_label(key: tuple, figure: str) -> str:
    if figure == "quantized":
        algorithm, phase, k_uses, u = key
        return f"{algorithm}/{phase}/K={k_uses}/u={u:g}"
    return "/".join(key)


def aggregate_series(rows: list, figure: str, metric: str, agg: str) -> dict:
    """{series key: (sorted N array, aggregated values, excluded count)}."""
    fold = np.median if agg == "median" else np.mean
    groups = {}
    excluded = {}
    for row in rows:
        key = _series_key(row, figure)
        if not row["converged"]:
            excluded[key] = excluded.get(key, 0) + 1
            continue
        if row[metric] is None:
            continue
        groups.setdefault(key, {}).setdefault(row["N"], []).append(row[metric])
    out = {}
    for key, by_n in groups.items():
        n_values = np.array(sorted(by_n))
        values = np.array([float(fold(by_n[n])) for n in n_values])
        out[key] = (n_values, values, excluded.get(key, 0))
    return out


# ---------------------------------------------------------------------------
# rendering

_FIGURE_METRICS = {
    "resources": (("B_tbp", "time-bandwidth product"),
                  ("E_energy", "transmit energy")),
    "quantized": (("mse", "mean squared error"),
                  ("E_energy", "transmit energy")),
}


def render_figure(spec: FigureSpec) -> dict:
    """Render the figure and slope sidecar; returns the report structure."""
    rows = read_rows(spec.csv_paths)
    metrics = _FIGURE_METRICS[spec.figure]
    fig, axes = plt.subplots(1, len(metrics), figsize=(6 * len(metrics), 4.5))
    report = {"figure": spec.figure, "agg": spec.agg, "series": []}

    params_by_key = {}
    for row in rows:
        params_by_key.setdefault(_series_key(row, spec.figure), row)

    drew_any = False
    for ax, (metric, title) in zip(np.atleast_1d(axes), metrics):
        series = aggregate_series(rows, spec.figure, metric, spec.agg)
        for key in sorted(series):
            n_values, values, excluded = series[key]
            if np.any(values <= 0):
                continue  # log axes cannot show zero-error runs
            label = _series_label(key, spec.figure)
            ax.loglog(n_values, values, marker="o", label=label)
            drew_any = True
            entry = {"metric": metric, "series": label,
                     "points": int(n_values.size), "excluded": excluded}
            if n_values.size >= 2:
                slope, stderr = fit_loglog_slope(n_values, values)
                entry["slope"] = slope
                entry["stderr"] = stderr
                law = _reference_law(key[0], metric, params_by_key[key])
                if law is not None:
                    curve = np.array([law(int(n)) for n in n_values])
                    scale = float(np.exp(np.mean(np.log(values)
                                                 - np.log(curve))))
                    ax.loglog(n_values, scale * curve, linestyle="--",
                              alpha=0.6, label=f"{label} (reference)")
            report["series"].append(entry)
        ax.set_xlabel("N")
        ax.set_ylabel(title)
        ax.set_title(f"{title} vs N ({spec.agg})")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=7)
    if not drew_any:
        plt.close(fig)
        raise PlotDataError("no plottable series in input")

    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    _write_slope_report(spec, report)
    return report


def _write_slope_report(spec: FigureSpec, report: dict) -> None:
    lines = [f"figure={report['figure']} agg={report['agg']}"]
    for entry in report["series"]:
        parts = [f"metric={entry['metric']}", f"series={entry['series']}",
                 f"points={entry['points']}", f"excluded={entry['excluded']}"]
        if "slope" in entry:
            parts.append(f"slope={entry['slope']:.4f}")
            parts.append(f"stderr={entry['stderr']:.4f}")
        else:
            parts.append("slope=n/a (single N)")
        lines.append(" ".join(parts))
    with open(f"{spec.out}.slopes.txt", "w") as fh:
        fh.write("\n".join(lines) + "\n")
