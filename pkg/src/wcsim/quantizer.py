"""Dithered uniform quantization onto the link-rate alphabet.

The alphabet Z holds the midpoints of L = floor((1+gamma)^K) equal bins on
[0, 1). Quantization is non-subtractive: the output is the alphabet point
nearest to z + u with dither u ~ U[-delta/2, delta/2); ties round up. When
L would exceed 2^60 the quantizer saturates to an "effectively exact" mode
(identity map, zero error) since the bin width falls below what double
precision experiments can resolve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_EXACT_BITS = 60.0
_ONE_BELOW = np.nextafter(1.0, 0.0)


def alphabet_size(k_uses: int, gamma: float):
    """L = floor((1+gamma)^K), or None in effectively-exact saturation."""
    if k_uses < 1:
        raise ValueError(f"K must be >= 1, got {k_uses}")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if k_uses * math.log2(1.0 + gamma) > _EXACT_BITS:
        return None
    raw = (1.0 + gamma) ** k_uses
    # snap near-integer float powers before flooring
    if abs(raw - round(raw)) < 1e-9 * raw:
        return int(round(raw))
    return int(math.floor(raw))


@dataclass(frozen=True)
class QuantizerSpec:
    """Alphabet geometry for K channel uses at linear SNR gamma."""

    k_uses: int
    gamma: float
    L: object  # int, or None in effectively-exact mode
    delta: float  # bin width; 0.0 in effectively-exact mode

    @classmethod
    def from_link(cls, k_uses: int, gamma: float) -> "QuantizerSpec":
        L = alphabet_size(k_uses, gamma)
        delta = 0.0 if L is None else 1.0 / L
        return cls(k_uses=k_uses, gamma=gamma, L=L, delta=delta)

    @property
    def exact(self) -> bool:
        return self.L is None

    @property
    def alphabet(self) -> np.ndarray:
        if self.exact:
            raise ValueError("effectively-exact quantizer has no finite alphabet")
        return (np.arange(self.L) + 0.5) * self.delta

    def value_of_index(self, index):
        return (np.asarray(index) + 0.5) * self.delta


def _clamp(z: float) -> float:
    return min(max(z, 0.0), _ONE_BELOW)


def quantize_index(spec: QuantizerSpec, z: float, rng: np.random.Generator) -> int:
    """Alphabet index of the dithered quantization of ``z``."""
    if spec.exact:
        raise ValueError("effectively-exact quantizer has no indices")
    u = rng.random() * spec.delta - spec.delta / 2.0
    y = _clamp(z) + u
    i = math.floor(y / spec.delta)  # half-open bins: midpoint ties round up
    return min(max(i, 0), spec.L - 1)


def dithered_quantize(spec: QuantizerSpec, z: float, rng: np.random.Generator):
    """Quantize ``z``; returns (output point, realized rounding error).

    The reported error is q - (z + u), the rounding error of the dithered
    input. It is the quantity the statistical error model describes: uniform
    on (-delta/2, delta/2] with second moment delta^2/12 at any fixed z.
    The total deviation q - z additionally carries the dither u and is a
    two-point distribution at fixed z, so its moments are z-dependent.
    """
    if spec.exact:
        return float(z), 0.0
    u = rng.random() * spec.delta - spec.delta / 2.0
    y = _clamp(z) + u
    i = math.floor(y / spec.delta)
    i = min(max(i, 0), spec.L - 1)
    q = float(spec.value_of_index(i))
    return q, q - y


def dithered_quantize_lattice(spec: QuantizerSpec, z: float,
                              rng: np.random.Generator):
    """Dithered quantization onto the unbounded midpoint lattice.

    Intermediate aggregates (partial cell averages) can drift outside [0, 1)
    when cell occupancy fluctuates; clamping them would bias every such value
    downward by far more than the bin width. This variant keeps the bin
    geometry but extends the alphabet to {(i + 1/2) * delta : i integer}.
    """
    if spec.exact:
        return float(z), 0.0
    u = rng.random() * spec.delta - spec.delta / 2.0
    y = float(z) + u
    q = (math.floor(y / spec.delta) + 0.5) * spec.delta
    return q, q - y


def _span_check(spec: QuantizerSpec, x: float) -> float:
    y = x / spec.delta - 0.5
    if y < -1e-9 or y > spec.L - 1 + 1e-9:
        raise ValueError(f"{x} outside the alphabet span")
    return y


def round_up_in_Z(spec: QuantizerSpec, x: float) -> float:
    """Smallest alphabet point >= x (x itself if it lies in Z)."""
    y = _span_check(spec, x)
    i = round(y) if abs(y - round(y)) < 1e-9 else math.ceil(y)
    return float(spec.value_of_index(min(i, spec.L - 1)))


def round_down_in_Z(spec: QuantizerSpec, x: float) -> float:
    """Largest alphabet point <= x (x itself if it lies in Z)."""
    y = _span_check(spec, x)
    i = round(y) if abs(y - round(y)) < 1e-9 else math.floor(y)
    return float(spec.value_of_index(max(i, 0)))
