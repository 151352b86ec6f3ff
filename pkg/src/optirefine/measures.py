"""Partition measures expressed as per-edge quadratic forms in +/-1 variables.

Every measure has the form ``sum_{i<j} w(i,j) (c0 + c1 x_i + c2 x_j + c3 x_i x_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .graph import Graph, as_mask


class MeasureKind(str, Enum):
    KDENSIFY = "KDensify"
    MAXCUT_KR = "MaxCutKR"
    MAXUNCUT_KC = "MaxUncutKC"
    VC_KC = "VcKC"


_COEFFS = {
    MeasureKind.KDENSIFY: (Fraction(1, 4), Fraction(1, 4), Fraction(1, 4), Fraction(1, 4)),
    MeasureKind.MAXCUT_KR: (Fraction(1, 2), Fraction(0), Fraction(0), Fraction(-1, 2)),
    MeasureKind.MAXUNCUT_KC: (Fraction(1, 2), Fraction(0), Fraction(0), Fraction(1, 2)),
    MeasureKind.VC_KC: (Fraction(3, 4), Fraction(1, 4), Fraction(1, 4), Fraction(-1, 4)),
}


@dataclass(frozen=True)
class PartitionMeasure:
    kind: MeasureKind
    c0: Fraction
    c1: Fraction
    c2: Fraction
    c3: Fraction

    @classmethod
    def of(cls, kind) -> "PartitionMeasure":
        kind = MeasureKind(kind)
        return cls(kind, *_COEFFS[kind])

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return float(self.c0), float(self.c1), float(self.c2), float(self.c3)

    def value(self, g: Graph, s) -> float:
        """Measure of the set ``s`` (vertices with x_i = +1)."""
        x = np.where(as_mask(s, g.n), 1.0, -1.0)
        return self.value_x(g, x)

    def value_x(self, g: Graph, x: np.ndarray) -> float:
        c0, c1, c2, c3 = self.coefficients
        xi, xj = x[g.src], x[g.dst]
        return float(np.dot(g.weight, c0 + c1 * xi + c2 * xj + c3 * xi * xj))


KDENSIFY = PartitionMeasure.of(MeasureKind.KDENSIFY)
MAXCUT_KR = PartitionMeasure.of(MeasureKind.MAXCUT_KR)
MAXUNCUT_KC = PartitionMeasure.of(MeasureKind.MAXUNCUT_KC)
VC_KC = PartitionMeasure.of(MeasureKind.VC_KC)
