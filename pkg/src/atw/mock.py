"""Analytic mock motion fields: neural-free stand-ins for a generator's field.

Spec strings: "zero", "translate:DX,DY", "radial:CX,CY,GAIN",
"shear:BAND,GAIN". All are sampled at the base resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadSpec
from .motion import MotionField

__all__ = ["MockFieldSpec", "parse_mock_spec", "generate_mock_field"]

_KIND_ARITY = {"zero": 0, "translate": 2, "radial": 3, "shear": 2}


@dataclass(frozen=True)
class MockFieldSpec:
    kind: str
    params: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in _KIND_ARITY:
            raise BadSpec(f"unknown mock field kind {self.kind!r}")
        if len(self.params) != _KIND_ARITY[self.kind]:
            raise BadSpec(
                f"{self.kind} takes {_KIND_ARITY[self.kind]} parameters, got {len(self.params)}"
            )
        if not all(math.isfinite(p) for p in self.params):
            raise BadSpec(f"non-finite parameter in {self.params}")

    def __str__(self) -> str:
        if not self.params:
            return self.kind
        return self.kind + ":" + ",".join(f"{p:g}" for p in self.params)


def parse_mock_spec(text: str) -> MockFieldSpec:
    """Parse "kind" or "kind:p1,p2,..." into a MockFieldSpec."""
    kind, _, rest = text.strip().partition(":")
    kind = kind.strip().lower()
    params: tuple[float, ...] = ()
    if rest:
        try:
            params = tuple(float(tok) for tok in rest.split(","))
        except ValueError as exc:
            raise BadSpec(f"cannot parse parameters in {text!r}: {exc}") from exc
    return MockFieldSpec(kind, params)


def generate_mock_field(spec: MockFieldSpec, size: int) -> MotionField:
    """Sample an analytic field on a size x size grid (pixel units)."""
    data = np.zeros((size, size, 2), dtype=np.float32)
    if spec.kind == "zero":
        pass
    elif spec.kind == "translate":
        data[:, :, 0] = spec.params[0]
        data[:, :, 1] = spec.params[1]
    elif spec.kind == "radial":
        cx, cy, gain = spec.params
        xs = np.arange(size, dtype=np.float32)
        data[:, :, 0] = gain * (xs[np.newaxis, :] - cx)
        data[:, :, 1] = gain * (xs[:, np.newaxis] - cy)
    elif spec.kind == "shear":
        band, gain = spec.params
        if band <= 0:
            raise BadSpec(f"shear band must be positive, got {band}")
        center = (size - 1) / 2.0
        offs = np.arange(size, dtype=np.float32) - center
        data[:, :, 0] = gain * np.clip(offs, -band / 2.0, band / 2.0)[:, np.newaxis]
    return MotionField(data)


def max_displacement(spec: MockFieldSpec, size: int) -> float:
    """Declared bound on |displacement| for a size x size sampling."""
    if spec.kind == "zero":
        return 0.0
    if spec.kind == "translate":
        return float(np.hypot(spec.params[0], spec.params[1]))
    if spec.kind == "radial":
        cx, cy, gain = spec.params
        corner_x = max(abs(0 - cx), abs(size - 1 - cx))
        corner_y = max(abs(0 - cy), abs(size - 1 - cy))
        return float(abs(gain) * np.hypot(corner_x, corner_y))
    band, gain = spec.params
    return float(abs(gain) * band / 2.0)
