# src/orbit/histogram.py
"""(f_1, f_2) の実チャートでの占有格子。境界との比較は全て Fraction で行う。"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from src.arith.exact import format_rat, to_rat
from src.geometry.surface import Surface, has_real_points
from src.orbit.engine import OrbitError


class NoRealPoints(OrbitError):
    pass


Chart = Tuple[Fraction, Fraction, Fraction, Fraction]  # x0, x1, y0, y1


@dataclass
class Histogram:
    chart: Chart
    bins: int
    grid: List[List[int]]  # grid[row=f2][col=f1]
    outside: int = 0  # チャート外、または無限遠 (t = 0)

    @property
    def occupied(self) -> int:
        return sum(1 for row in self.grid for v in row if v)

    def to_json(self) -> dict:
        return {
            "chart": [format_rat(c) for c in self.chart],
            "bins": self.bins,
            "occupied": self.occupied,
            "outside": self.outside,
            "grid": self.grid,
        }


def _edges(lo: Fraction, hi: Fraction, n: int) -> List[Fraction]:
    return [lo + (hi - lo) * k / n for k in range(n + 1)]


def _bin(v: Fraction, edges: Sequence[Fraction]) -> Optional[int]:
    if v < edges[0] or v > edges[-1]:
        return None
    return min(bisect_right(edges, v) - 1, len(edges) - 2)


def bounding_chart(values: Sequence[Tuple[Fraction, Fraction]]) -> Chart:
    """値の範囲そのもの。幅 0 の方向は ±1 広げる。"""
    xs = [x for x, _ in values]
    ys = [y for _, y in values]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    if x0 == x1:
        x0, x1 = x0 - 1, x1 + 1
    if y0 == y1:
        y0, y1 = y0 - 1, y1 + 1
    return x0, x1, y0, y1


def density_histogram(S: Surface, nodes, chart: Optional[Sequence] = None, bins: int = 10) -> Histogram:
    """
    例: 1 点だけ -> 占有 1 マス
        1 点の σ-軌道 -> やはり占有 1 マス（f_i は符号で変わらない）
    """
    if not has_real_points(S):
        raise NoRealPoints(f"V_{{{S}}} は実点を持ちません（係数の符号が 2 正 2 負ではない）")
    if bins < 1:
        raise ValueError(f"bins は 1 以上にしてください: {bins}")

    values, outside = [], 0
    for n in nodes:
        f1, f2 = n.f1.as_fraction(), n.f2.as_fraction()
        if f1 is None or f2 is None:
            outside += 1
            continue
        values.append((f1, f2))

    if chart is None:
        chart = bounding_chart(values) if values else (Fraction(0), Fraction(1), Fraction(0), Fraction(1))
    x0, x1, y0, y1 = (to_rat(c) for c in chart)
    if x0 >= x1 or y0 >= y1:
        raise ValueError(f"チャートの範囲が不正です: {chart}")

    xe, ye = _edges(x0, x1, bins), _edges(y0, y1, bins)
    grid = [[0] * bins for _ in range(bins)]
    for fx, fy in values:
        col, row = _bin(fx, xe), _bin(fy, ye)
        if col is None or row is None:
            outside += 1
            continue
        grid[row][col] += 1
    return Histogram((x0, x1, y0, y1), bins, grid, outside)
