"""CSV/JSON emitters for sweeps."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, TextIO


@dataclass(frozen=True)
class CurvePoint:
    x: float
    y: float
    series: str

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite curve point ({self.x}, {self.y}) in {self.series!r}")


def fmt(x) -> str:
    """Real with 17 significant digits (lossless round trip)."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


def write_curve_csv(points: Iterable[CurvePoint], stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["x", "y", "series"])
    for pt in points:
        w.writerow([fmt(pt.x), fmt(pt.y), pt.series])


def write_feasibility_csv(reports, stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["eta", "f1", "f2", "f3", "f4", "sys29", "sys30"])
    for r in reports:
        w.writerow([fmt(r.eta), fmt(r.f1), fmt(r.f2), fmt(r.f3), fmt(r.f4),
                    fmt(r.system29_satisfied), fmt(r.system30_satisfied)])


def feasibility_points(reports) -> list:
    """Indicator curves of both systems over eta, for plotting."""
    pts = []
    for r in reports:
        pts.append(CurvePoint(r.eta, float(r.system29_satisfied), "sys29"))
        pts.append(CurvePoint(r.eta, float(r.system30_satisfied), "sys30"))
    return pts
