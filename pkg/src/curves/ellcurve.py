# src/curves/ellcurve.py
"""
非特異ファイバー C_i を、P を原点とする楕円曲線として扱う。

C_i = {K1 = 0, K2 = 0}（対角 2 次形式 2 つ）を P から射影すると平面 3 次曲線
    Γ(Y) = B1(P,Y) K2(Y) - B2(P,Y) K1(Y) = 0
になり、P の像は P での接線方向 O。Γ を O 原点で Weierstrass 化する。
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import sympy
from loguru import logger

from src.arith.exact import ProjPoint, format_rat, normalize_point, to_rat
from src.curves.plane_cubic import (
    Y_SYMS,
    CubicReduction,
    CubicReductionError,
    cross,
    proportional,
)
from src.geometry.fibration import (
    RulingPair,
    fibre_quadrics,
    fibre_value,
    is_singular_fibre,
)
from src.geometry.surface import Surface, require_on_surface


# ===== 例外 =====
class CurveError(ValueError):
    """ellcurve モジュールの基底例外"""


class SingularFibre(CurveError):
    pass


class PointNotOnCurve(CurveError):
    pass


class ExceptionalPoint(CurveError):
    pass


# ===== 曲線と点 =====
@dataclass(frozen=True)
class EllPoint:
    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def to_json(self):
        if self.is_infinity:
            return "O"
        return [format_rat(self.x), format_rat(self.y)]


INFINITY = EllPoint()


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6"""
    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction

    @property
    def b_invariants(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def discriminant(self) -> Fraction:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def contains(self, Q: EllPoint) -> bool:
        if Q.is_infinity:
            return True
        x, y = Q.x, Q.y
        return y * y + self.a1 * x * y + self.a3 * y == x ** 3 + self.a2 * x * x + self.a4 * x + self.a6

    def to_json(self) -> List[str]:
        return [format_rat(c) for c in (self.a1, self.a2, self.a3, self.a4, self.a6)]


# ===== 群演算 =====
def _require(E: WeierstrassCurve, *points: EllPoint) -> None:
    for Q in points:
        if not E.contains(Q):
            raise PointNotOnCurve(f"{Q.to_json()} は曲線上にありません")


def negate(E: WeierstrassCurve, Q: EllPoint) -> EllPoint:
    if Q.is_infinity:
        return Q
    return EllPoint(Q.x, -Q.y - E.a1 * Q.x - E.a3)


def add(E: WeierstrassCurve, P1: EllPoint, P2: EllPoint) -> EllPoint:
    if P1.is_infinity:
        return P2
    if P2.is_infinity:
        return P1
    x1, y1, x2, y2 = P1.x, P1.y, P2.x, P2.y
    if x1 == x2:
        if y1 + y2 + E.a1 * x2 + E.a3 == 0:
            return INFINITY
        den = 2 * y1 + E.a1 * x1 + E.a3
        lam = (3 * x1 * x1 + 2 * E.a2 * x1 + E.a4 - E.a1 * y1) / den
        nu = (-x1 ** 3 + E.a4 * x1 + 2 * E.a6 - E.a3 * y1) / den
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = lam * lam + E.a1 * lam - E.a2 - x1 - x2
    y3 = -(lam + E.a1) * x3 - nu - E.a3
    return EllPoint(x3, y3)


def multiply(E: WeierstrassCurve, k: int, Q: EllPoint) -> EllPoint:
    if k < 0:
        return multiply(E, -k, negate(E, Q))
    result, addend = INFINITY, Q
    while k:
        if k & 1:
            result = add(E, result, addend)
        addend = add(E, addend, addend)
        k >>= 1
    return result


def group_op(E: WeierstrassCurve, op: str, *args) -> EllPoint:
    """
    op: "add" (P1, P2) | "neg" (Q) | "mul" (k, Q)
    """
    if op == "add":
        _require(E, *args)
        return add(E, *args)
    if op == "neg":
        _require(E, *args)
        return negate(E, *args)
    if op == "mul":
        k, Q = args
        _require(E, Q)
        return multiply(E, int(k), Q)
    raise ValueError(f"未知の演算です: {op}")


MAZUR_BOUND = 12


def bounded_torsion_order(E: WeierstrassCurve, Q: EllPoint) -> Optional[int]:
    """kQ = O となる最小の k ≤ 12。なければ None（無限位数）。"""
    _require(E, Q)
    R = Q
    for k in range(1, MAZUR_BOUND + 1):
        if R.is_infinity:
            return k
        R = add(E, R, Q)
    return None


def iterate_coefficients(n: int) -> List[int]:
    """a_1 = 1, a_{k+1} = -3 a_k + 1（e_i^k(P) の像 = a_k ψ(e_i(P))）"""
    out = [1]
    while len(out) < n:
        out.append(-3 * out[-1] + 1)
    return out[:n]


# ===== ファイバー ⇄ 曲線 =====
@dataclass
class CurveMap:
    surface: Surface
    origin: ProjPoint
    quadrics: Tuple[Tuple[int, ...], Tuple[int, ...]]
    chart: int  # 射影先の平面 X_chart = 0
    reduction: CubicReduction

    @property
    def exceptions(self) -> Tuple[ProjPoint, ...]:
        """T が消える点（E'）の逆像。値は分岐の極限で与える。"""
        if self.reduction.flex:
            return ()
        return (self._unproject(self.reduction.third),)

    def on_curve(self, X: ProjPoint) -> bool:
        return all(sum(k * c * c for k, c in zip(K, X.coords)) == 0 for K in self.quadrics)

    def _project(self, X: ProjPoint) -> List[Fraction]:
        pm, xm = self.origin[self.chart], X[self.chart]
        full = [pm * x - xm * p for x, p in zip(X.coords, self.origin.coords)]
        return [Fraction(c) for k, c in enumerate(full) if k != self.chart]

    def _unproject(self, Z: Sequence) -> ProjPoint:
        Y = [to_rat(c) for c in Z]
        Y.insert(self.chart, Fraction(0))
        K1, K2 = self.quadrics
        for lam, mu in ((1, 0), (0, 1), (1, 1), (1, -1)):
            K = [lam * a + mu * b for a, b in zip(K1, K2)]
            kv = sum(k * y * y for k, y in zip(K, Y))
            bv = sum(k * p * y for k, p, y in zip(K, self.origin.coords, Y))
            X = [-kv * p + 2 * bv * y for p, y in zip(self.origin.coords, Y)]
            if any(X):
                return normalize_point(X)
        raise ExceptionalPoint(f"平面の点 {Z} をファイバーに戻せません")

    def forward(self, X: ProjPoint) -> EllPoint:
        if not self.on_curve(X):
            raise PointNotOnCurve(f"({X}) はファイバー上にありません")
        if X == self.origin:
            return INFINITY
        Z = self._project(X)
        if proportional(Z, self.reduction.origin):
            raise ExceptionalPoint(f"({X}) は接線方向に写りました")
        out = self.reduction.forward(Z)
        return INFINITY if out is None else EllPoint(*out)

    def inverse(self, Q: EllPoint) -> ProjPoint:
        if Q.is_infinity:
            return self.origin
        try:
            Z = self.reduction.inverse(Q.x, Q.y)
        except CubicReductionError as e:
            raise ExceptionalPoint(str(e)) from e
        return self._unproject(Z)


def transport_point(cmap: CurveMap, point, direction: str = "forward"):
    """direction: "forward"（ファイバー → 曲線） | "inverse"（曲線 → ファイバー）"""
    if direction == "forward":
        return cmap.forward(point)
    if direction == "inverse":
        return cmap.inverse(point)
    raise ValueError(f"未知の方向です: {direction}")


def fibre_to_weierstrass(S: Surface, R: RulingPair, i: int, P: ProjPoint) -> Tuple[WeierstrassCurve, CurveMap]:
    """
    P を通る f_i のファイバーの Weierstrass モデル（P ↦ O）。
    """
    require_on_surface(S, P)
    fid = fibre_value(S, R, i, P)
    if is_singular_fibre(S, R, i, fid):
        raise SingularFibre(f"f_{i} のファイバー ({fid}) は特異です")

    # 1) ファイバーを切る 2 次形式と射影の座標
    K1, K2 = fibre_quadrics(R, i, fid)
    m = max(range(4), key=lambda k: (abs(P[k]), -k))
    plane = list(Y_SYMS)
    Y = plane[:m] + [sympy.Integer(0)] + plane[m:]

    # 2) Γ = B1(P,Y) K2(Y) - B2(P,Y) K1(Y)
    def quad(K):
        return sum(int(k) * y * y for k, y in zip(K, Y))

    def bil(K):
        return sum(int(k) * int(p) * y for k, p, y in zip(K, P.coords, Y))

    gamma = sympy.Poly(sympy.expand(bil(K1) * quad(K2) - bil(K2) * quad(K1)), *Y_SYMS, domain="QQ")

    # 3) P の像 = 接線方向
    r1 = [k * p for j, (k, p) in enumerate(zip(K1, P.coords)) if j != m]
    r2 = [k * p for j, (k, p) in enumerate(zip(K2, P.coords)) if j != m]
    origin = cross(r1, r2)
    try:
        reduction = CubicReduction(gamma, origin)
    except CubicReductionError as e:
        raise CurveError(f"f_{i} のファイバー ({fid}) の Weierstrass 化に失敗: {e}") from e

    E = WeierstrassCurve(*(to_rat(a) for a in (
        reduction.a_invariants[0], reduction.a_invariants[1], reduction.a_invariants[2],
        reduction.a_invariants[3], reduction.a_invariants[4],
    )))
    if E.discriminant == 0:
        raise CurveError(f"判別式が 0 です: f_{i} ({fid})")
    logger.debug(f"Weierstrass モデル: f_{i} ({fid}), a={E.to_json()}")
    return E, CurveMap(S, P, (K1, K2), m, reduction)
