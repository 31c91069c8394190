"""Sweep execution: (algorithm x N x trial) grids, workers, and CSV output.

CSV content is a pure function of the sweep spec: rows are computed from
per-run RNG substreams and sorted by (algorithm, N, trial) before writing,
so worker count and execution order never change the file.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

from wcsim.consensus import RunConfig, run_trial
from wcsim.ledger import RunResult
from wcsim.streams import ALGORITHMS

CSV_HEADER = ("algorithm,phase_mode,N,alpha,gamma_db,epsilon,kappa,K,u,"
              "seed,trial,T_slots,B_tbp,E_energy,mse,converged,resamples")

_IDEAL_ALGORITHMS = ("randomized", "path", "hierarchical")


@dataclass(frozen=True)
class SweepSpec:
    """One experiment grid; defaults follow the usual desk-scale setup."""

    algorithms: tuple = ("randomized", "path", "hierarchical")
    n_values: tuple = (16, 64, 256, 1024)
    trials: int = 50
    alpha: float = 4.0
    gamma_db: float = 10.0
    epsilon: float = 1e-4
    kappa: float = 1e-4
    k_uses: int = 10
    u: float = 0.0
    phase_mode: str = "fixed"
    radius_c: float = 4.0
    max_slots: int = None
    master_seed: int = 0
    track_bandwidth: bool = True
    workers: int = 1
    out: str = "results.csv"

    def __post_init__(self) -> None:
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        for algorithm in self.algorithms:
            if algorithm not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algorithm!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(n < 4 for n in self.n_values):
            raise ValueError("sweep N values must be >= 4")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @classmethod
    def from_file(cls, path) -> "SweepSpec":
        with open(path) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def with_overrides(self, **overrides) -> "SweepSpec":
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **overrides)

    def configs(self) -> list:
        out = []
        for algorithm in self.algorithms:
            for n in self.n_values:
                for trial in range(self.trials):
                    out.append(RunConfig(
                        algorithm=algorithm, n_nodes=n, alpha=self.alpha,
                        gamma_db=self.gamma_db, epsilon=self.epsilon,
                        kappa=self.kappa, k_uses=self.k_uses,
                        phase_mode=self.phase_mode, u=self.u,
                        seed=self.master_seed, trial=trial,
                        radius_c=self.radius_c, max_slots=self.max_slots,
                        track_bandwidth=self.track_bandwidth))
        return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def result_row(result: RunResult) -> dict:
    cfg = result.config
    mse = None if cfg.algorithm in _IDEAL_ALGORITHMS else result.mse
    return {
        "algorithm": cfg.algorithm,
        "phase_mode": cfg.phase_mode,
        "N": cfg.n_nodes,
        "alpha": float(cfg.alpha),
        "gamma_db": float(cfg.gamma_db),
        "epsilon": float(cfg.epsilon),
        "kappa": float(cfg.kappa),
        "K": cfg.k_uses,
        "u": float(cfg.u),
        "seed": cfg.seed,
        "trial": cfg.trial,
        "T_slots": result.t_slots,
        "B_tbp": None if result.b_tbp is None else float(result.b_tbp),
        "E_energy": float(result.e_energy),
        "mse": None if mse is None else float(mse),
        "converged": result.converged,
        "resamples": result.resamples,
    }


def run_sweep(spec: SweepSpec, progress=None) -> list:
    """Run the grid and write the CSV; returns the sorted row dicts."""
    configs = spec.configs()
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(run_trial, configs, chunksize=1))
    else:
        results = []
        for cfg in configs:
            results.append(run_trial(cfg))
            if progress is not None:
                progress(cfg)
    rows = [result_row(r) for r in results]
    rows.sort(key=lambda r: (r["algorithm"], r["N"], r["trial"]))
    write_csv(rows, spec.out)
    return rows


def write_csv(rows: list, path) -> None:
    columns = CSV_HEADER.split(",")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def read_csv(path) -> list:
    """Read a sweep CSV back into typed row dicts."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
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
                "seed": int(raw["seed"]),
                "trial": int(raw["trial"]),
                "T_slots": int(raw["T_slots"]),
                "B_tbp": float(raw["B_tbp"]) if raw["B_tbp"] else None,
                "E_energy": float(raw["E_energy"]),
                "mse": float(raw["mse"]) if raw["mse"] else None,
                "converged": raw["converged"] == "True",
                "resamples": int(raw["resamples"]),
            })
    return rows
