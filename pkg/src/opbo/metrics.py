"""Order diagnostics and cross-problem ranking.

* Spearman's rank correlation.
* Ordered performance curves (OPC) and their five-way shape classification.
* Mean-rank tables over problems, with average runtime per algorithm.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import rankdata

from .errors import LengthMismatch, MissingCell, TooFewPoints, TooShort, ZeroVariance

OPC_TYPES = ("Flat", "UShaped", "Neutral", "Bell", "Steep", "Degenerate")
AREA_BAND = 0.05
HALF_AREA_BAND = 0.02
MIN_CLASSIFY_POINTS = 10


def _tie_free(a: np.ndarray) -> bool:
    return np.unique(a).size == a.size


def spearman_rho(u, v) -> float:
    """Spearman's rho.

    Tie-free inputs use ``1 - 6 sum d^2 / (n (n^2 - 1))`` on integer ranks,
    evaluated exactly and rounded once; with ties, the Pearson correlation
    of average ranks.
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.size != v.size:
        raise LengthMismatch(f"lengths {u.size} and {v.size} differ")
    n = u.size
    if n < 2:
        raise TooShort("need at least two observations")
    if np.all(u == u[0]) or np.all(v == v[0]):
        raise ZeroVariance("one input is constant")
    if _tie_free(u) and _tie_free(v):
        ru = np.empty(n, dtype=np.int64)
        rv = np.empty(n, dtype=np.int64)
        ru[np.argsort(u)] = np.arange(n)
        rv[np.argsort(v)] = np.arange(n)
        d2 = int(np.sum((ru - rv) ** 2))
        return float(1 - Fraction(6 * d2, n * (n * n - 1)))
    ru = rankdata(u)
    rv = rankdata(v)
    ru -= ru.mean()
    rv -= rv.mean()
    return float(np.clip(ru @ rv / np.sqrt((ru @ ru) * (rv @ rv)), -1.0, 1.0))


@dataclass(frozen=True)
class OpcCurve:
    x: np.ndarray
    y: np.ndarray
    opc_type: str | None = None
    signed_area: float = 0.0
    half_value: float = 0.0


def build_opc(values) -> OpcCurve:
    """Normalized ordered performance curve, best (lowest) value first.

    ``x_i = (i-1)/(n-1)`` and ``y_i = (J_(i) - J_(1)) / (J_(n) - J_(1))``, a
    non-decreasing curve from (0, 0) to (1, 1). Curves with at least ten
    points are classified on construction.
    """
    J = np.sort(np.asarray(values, dtype=np.float64).ravel())
    n = J.size
    if n < 2:
        raise TooShort("an OPC needs at least two values")
    x = np.arange(n) / (n - 1.0)
    span = J[-1] - J[0]
    if not span > 0:
        return OpcCurve(x, np.zeros(n), "Degenerate", 0.0, 0.0)
    y = (J - J[0]) / span
    area, half = _area_and_half(x, y)
    curve = OpcCurve(x, y, None, area, half)
    if n >= MIN_CLASSIFY_POINTS:
        curve = OpcCurve(x, y, classify_opc(curve), area, half)
    return curve


def _area_and_half(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    return float(trapezoid(y - x, x)), float(np.interp(0.5, x, y))


def _half_areas(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    h = np.interp(0.5, x, y)
    left = x < 0.5
    xl = np.append(x[left], 0.5)
    yl = np.append(y[left], h)
    xr = np.insert(x[~left], 0, 0.5)
    yr = np.insert(y[~left], 0, h)
    return float(trapezoid(yl - xl, xl)), float(trapezoid(yr - xr, xr))


def classify_opc(curve: OpcCurve) -> str:
    """Shape class of a normalized OPC.

    Signed area ``A = integral of (y - x)``. S-shaped curves (half areas of
    opposite sign, each beyond 0.02, total within the 0.05 band) are
    UShaped when flat-steep-flat (below, then above the diagonal) and Bell
    when steep-flat-steep, judged by the slopes over the four quarters.
    Otherwise ``|A| <= 0.05`` is Neutral, negative area is Flat (good
    values clustered) and positive area is Steep.
    """
    if curve.opc_type == "Degenerate" or not np.ptp(curve.y) > 0:
        return "Degenerate"
    x, y = curve.x, curve.y
    if x.size < MIN_CLASSIFY_POINTS:
        raise TooFewPoints(f"need at least {MIN_CLASSIFY_POINTS} points, got {x.size}")
    area, _ = _area_and_half(x, y)
    left, right = _half_areas(x, y)
    q = np.interp([0.0, 0.25, 0.5, 0.75, 1.0], x, y)
    s1, s2, s3, s4 = np.diff(q)
    if abs(area) <= AREA_BAND:
        if left <= -HALF_AREA_BAND and right >= HALF_AREA_BAND and s1 < s2 and s4 < s3:
            return "UShaped"
        if left >= HALF_AREA_BAND and right <= -HALF_AREA_BAND and s1 > s2 and s4 > s3:
            return "Bell"
        return "Neutral"
    return "Flat" if area < 0 else "Steep"


@dataclass
class RankTable:
    problems: list[str]
    algorithms: list[str]
    medians: dict[str, dict[str, float]]
    ranks: dict[str, dict[str, float]]
    mean_rank: dict[str, float]
    tavg: dict[str, float] = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["problem", *self.algorithms])
        for p in self.problems:
            w.writerow([p, *(repr(self.medians[p][a]) for a in self.algorithms)])
        w.writerow(["mean_rank", *(repr(self.mean_rank[a]) for a in self.algorithms)])
        w.writerow(["tavg", *(repr(self.tavg[a]) if a in self.tavg else "" for a in self.algorithms)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "problems": self.problems,
            "algorithms": self.algorithms,
            "medians": self.medians,
            "ranks": self.ranks,
            "mean_rank": self.mean_rank,
            "tavg": self.tavg,
        }


def mean_rank_table(results: dict[str, dict[str, float]], tavg: dict[str, float] | None = None,
                    algorithms: list[str] | None = None) -> RankTable:
    """Rank algorithms within each problem (1 = lowest median, ties averaged)
    and average the ranks across problems."""
    problems = list(results)
    if algorithms is None:
        algorithms = sorted({a for row in results.values() for a in row})
    ranks: dict[str, dict[str, float]] = {}
    for p in problems:
        for a in algorithms:
            if a not in results[p]:
                raise MissingCell(p, a)
        r = rankdata([results[p][a] for a in algorithms], method="average")
        ranks[p] = {a: float(ri) for a, ri in zip(algorithms, r)}
    mean_rank = {a: float(np.mean([ranks[p][a] for p in problems])) for a in algorithms}
    medians = {p: {a: float(results[p][a]) for a in algorithms} for p in problems}
    return RankTable(problems, list(algorithms), medians, ranks, mean_rank, dict(tavg or {}))
