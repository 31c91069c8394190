"""Per-slot resource accounting, stopping criterion, and theory overlays.

Folds slot records into the run metrics: elapsed slots T, transmit energy
E = K * sum_t sum_n P_n(t), time-bandwidth product B = K * sum_t B(t), and
the mean-squared error of quantized runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SlotRecord:
    """One time slot's resource usage."""

    t: int
    power_sum: float
    bandwidth: object  # int, or None when bandwidth tracking is off
    n_transmitters: int

    def __post_init__(self) -> None:
        if self.power_sum < 0 or self.n_transmitters < 0:
            raise ValueError("slot record fields must be nonnegative")
        if self.bandwidth is not None:
            if self.bandwidth < 0:
                raise ValueError("bandwidth must be nonnegative")
            if self.n_transmitters >= 1 and self.bandwidth < 1:
                raise ValueError("bandwidth must be >= 1 when anyone transmits")


class ResourceLedger:
    """Accumulates slot records for a single run."""

    def __init__(self, k_uses: int, keep_history: bool = True):
        self.k_uses = k_uses
        self.keep_history = keep_history
        self.history: list[SlotRecord] = []
        self._last_t = 0
        self._power_total = 0.0
        self._bandwidth_total = 0
        self._bandwidth_known = True

    def record_slot(self, record: SlotRecord) -> None:
        if record.t <= self._last_t:
            raise ValueError(f"slot {record.t} out of order (last was {self._last_t})")
        self._last_t = record.t
        self._power_total += record.power_sum
        if record.bandwidth is None:
            self._bandwidth_known = False
        else:
            self._bandwidth_total += record.bandwidth
        if self.keep_history:
            self.history.append(record)

    def record_uniform_slots(self, count: int, power_sum: float,
                             bandwidth, n_transmitters: int) -> None:
        """Record ``count`` consecutive identical slots (path-averaging hops)."""
        for _ in range(count):
            self.record_slot(SlotRecord(self._last_t + 1, power_sum,
                                        bandwidth, n_transmitters))

    @property
    def t_slots(self) -> int:
        return self._last_t

    @property
    def e_energy(self) -> float:
        return self.k_uses * self._power_total

    @property
    def b_tbp(self):
        if not self._bandwidth_known:
            return None
        return self.k_uses * self._bandwidth_total


@dataclass
class RunResult:
    """Measured metrics of one simulated trial."""

    config: object
    t_slots: int
    e_energy: float
    b_tbp: object  # float or None when bandwidth tracking is off
    mse: object  # float for quantized runs, else None
    converged: bool
    resamples: int = 0
    wall_time: float = 0.0
    extras: dict = field(default_factory=dict)


def epsilon_stop(z, z0_norm: float, eps: float, z_ave: float = None) -> bool:
    """True iff ||z - z_ave 1|| / ||z(0)|| < eps.

    ``z`` may be an EstimateVector (carrying its own z_ave) or an array with
    ``z_ave`` given explicitly.
    """
    if z0_norm <= 0:
        raise ValueError("||z(0)|| must be positive")
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if z_ave is None:
        z_ave = z.z_ave
        z = z.z
    dev = np.asarray(z, dtype=float) - z_ave
    return float(np.linalg.norm(dev)) / z0_norm < eps


def mse(final_estimates, z_ave: float) -> float:
    """Mean squared deviation of the final estimates from the true average."""
    dev = np.asarray(final_estimates, dtype=float) - z_ave
    return float(np.mean(dev * dev))


def theory_curve(algorithm: str, metric: str, n: int, *, alpha: float = 2.0,
                 epsilon: float = 1e-4, kappa: float = 1e-4, k_uses: int = 1,
                 u: float = 0.0, phase_mode: str = "fixed") -> float:
    """Dominant term of the stated scaling law, up to a fitted constant.

    Raises ValueError for (algorithm, metric) pairs without a stated law.
    """
    log_n = math.log(n)
    log_eps = math.log(1.0 / epsilon)
    laws = {
        ("bound", "T"): lambda: 1.0,
        ("bound", "B"): lambda: 1.0,
        ("bound", "E"): lambda: n ** (1.0 - alpha / 2.0),
        ("randomized", "T"): lambda: n * log_eps / log_n,
        ("randomized", "B"): lambda: n * log_eps,
        ("randomized", "E"): lambda: (n ** (2.0 - alpha / 2.0)
                                      * log_n ** (alpha / 2.0 - 1.0) * log_eps),
        ("path", "T"): lambda: math.sqrt(n / log_n),
        ("path", "B"): lambda: math.sqrt(n / log_n),
        ("path", "E"): lambda: (n ** (1.0 - alpha / 2.0)
                                * log_n ** (alpha / 2.0) * log_eps),
        ("hierarchical", "T"): lambda: n ** kappa,
        ("hierarchical", "B"): lambda: n ** kappa,
        ("hierarchical", "E"): lambda: (
            n ** (1.0 - alpha / 2.0 + kappa * alpha / 2.0)
            if phase_mode == "fixed" else n ** (kappa * alpha / 2.0)),
        ("qconsensus", "T"): lambda: k_uses * n,
        ("qconsensus", "B"): lambda: k_uses * n * log_n,
        ("qconsensus", "E"): lambda: (k_uses * n ** (2.0 - alpha / 2.0 + u)
                                      * log_n ** (alpha / 2.0)),
        ("qconsensus", "mse"): lambda: float(n) ** (-2.0 * k_uses * u - 1.0),
        ("qhierarchical", "T"): lambda: k_uses * n ** kappa,
        ("qhierarchical", "B"): lambda: k_uses * n ** kappa,
        ("qhierarchical", "E"): lambda: (
            k_uses * n ** (1.0 - alpha / 2.0 + kappa * alpha / 2.0 + u)
            if phase_mode == "fixed"
            else k_uses * n ** (kappa * alpha / 2.0 + u)),
        ("qhierarchical", "mse"): lambda: float(n) ** (-2.0 * k_uses * u),
    }
    try:
        law = laws[(algorithm, metric)]
    except KeyError:
        raise ValueError(f"no stated law for ({algorithm}, {metric})") from None
    return float(law())
