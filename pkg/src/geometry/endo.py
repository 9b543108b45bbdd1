# src/geometry/endo.py
"""
自己準同型 e_1, e_2 の幾何的構成。

P の接平面で V を切ると P に結節点を持つ平面 4 次曲線ができる。
結節点の 2 本の接線 M を取り、M と V の 4 つ目の交点が e_i(P)。
M がファイバー C_j に P で接するとき、4 つ目の点は他方のファイバー C_i 上にあり e_i(P) になる。
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Optional, Sequence, Tuple

from loguru import logger

from src.arith.exact import (
    BinaryQuartic,
    ProjPoint,
    deflate_triple_root,
    normalize_point,
    rank,
)
from src.geometry.fibration import (
    RulingPair,
    fibre_quadrics,
    fibre_value,
)
from src.geometry.surface import (
    Surface,
    quartic_value,
    require_not_omega,
    split_tangent_cone,
)

if TYPE_CHECKING:
    from src.geometry.forms import EndoForms


# ===== 例外 =====
class EndoError(ValueError):
    """endo モジュールの基底例外（内部整合性の破綻もここ）"""


class TangentInCurve(EndoError):
    pass


@dataclass(frozen=True)
class EndoPair:
    e1: ProjPoint
    e2: ProjPoint

    def get(self, i: int) -> ProjPoint:
        if i not in (1, 2):
            raise ValueError(f"自己準同型の番号は 1 か 2 です: {i}")
        return self.e1 if i == 1 else self.e2


# ===== 構成の部品 =====
def node_directions(S: Surface, P: ProjPoint) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """接平面内の結節 2 次形式 Σ a_k p_k^2 D_k^2 の零方向（結節の接線方向）"""
    weights = [c * Fraction(p) ** 2 for c, p in zip(S.coeffs, P.coords)]
    return split_tangent_cone(weights, P.coords)


def restricted_quartic(S: Surface, P: ProjPoint, D: Sequence) -> BinaryQuartic:
    """F(tP + uD) の係数（t^4, t^3u, ..., u^4）"""
    a, p = S.coeffs, P.coords
    return BinaryQuartic.of(
        quartic_value(S, p),
        4 * sum(c * x ** 3 * y for c, x, y in zip(a, p, D)),
        6 * sum(c * x ** 2 * y ** 2 for c, x, y in zip(a, p, D)),
        4 * sum(c * x * y ** 3 for c, x, y in zip(a, p, D)),
        quartic_value(S, D),
    )


def _tangency(S: Surface, R: RulingPair, j: int, P: ProjPoint, D: Sequence) -> Fraction:
    """df_j(P)[D]（0 なら D は C_j に P で接する）"""
    squares = [c * c for c in P.coords]
    for rep in R.representations(j):
        g, h = rep.values(squares)
        if g != 0 or h != 0:
            return sum(
                ((h * gk - g * hk) * pk * dk for gk, hk, pk, dk in zip(rep.num, rep.den, P.coords, D)),
                Fraction(0),
            )
    raise EndoError(f"f_{j} の表現が ({P}) で全て消えています")


def _second_on_fibre(R: RulingPair, i: int, fid, P: ProjPoint, D: Sequence) -> ProjPoint:
    """直線 P + λD（V に含まれる）と C_i の、P 以外の交点"""
    found = []
    for K in fibre_quadrics(R, i, fid):
        kd = sum(Fraction(k) * d * d for k, d in zip(K, D))
        b = sum(Fraction(k) * p * d for k, p, d in zip(K, P.coords, D))
        if kd == 0 and b == 0:
            continue
        found.append(normalize_point([-kd * p + 2 * b * d for p, d in zip(P.coords, D)]))
    if not found:
        raise TangentInCurve(f"接線がファイバー C_{i} に含まれています: P=({P})")
    if any(x != found[0] for x in found[1:]):
        raise EndoError(f"C_{i} との交点が 2 次形式ごとに食い違います: P=({P})")
    return found[0]


def _fourth_point(S: Surface, R: RulingPair, i: int, P: ProjPoint, D: Sequence) -> ProjPoint:
    q = restricted_quartic(S, P, D)
    if q.is_zero:
        # 接線が V 上の直線: C_i との 2 つ目の交点を取る
        return _second_on_fibre(R, i, fibre_value(S, R, i, P), P, D)
    t, u = deflate_triple_root(q, (1, 0))
    return normalize_point([t * p + u * d for p, d in zip(P.coords, D)])


# ===== 公開操作 =====
def richmond_pair(S: Surface, R: RulingPair, P: ProjPoint) -> EndoPair:
    """
    (e_1(P), e_2(P)) を幾何的構成で求める。
    例: V_{1,1,-1,-1}, (1:1:1:1) -> {(1:-1:-1:1), (1:-1:1:-1)}
        V_{-2,1,1,-2}, (0:1:1:1) -> (P, P)
    """
    require_not_omega(S, P)

    # 1) 0 座標を持つ点では 2 本の接線が一致し、e_1 = e_2 = 恒等
    if P.zero_count == 1:
        return EndoPair(P, P)

    # 2) 結節の接線
    da, db = node_directions(S, P)
    if rank([P.coords, da, db]) < 3:
        raise EndoError(f"結節の接線が一致しました: P=({P})")

    # 3) どちらが C_1 に接するか
    t1 = [_tangency(S, R, 1, P, d) == 0 for d in (da, db)]
    t2 = [_tangency(S, R, 2, P, d) == 0 for d in (da, db)]
    if t1 == [True, False] or t2 == [False, True]:
        m1, m2 = da, db
    elif t1 == [False, True] or t2 == [True, False]:
        m1, m2 = db, da
    else:
        raise EndoError(f"接線とファイバーの対応が決まりません: P=({P})")

    # 4) M_1 上の 4 つ目の点は C_2 上（= e_2(P)）、M_2 上は e_1(P)
    e2 = _fourth_point(S, R, 2, P, m1)
    e1 = _fourth_point(S, R, 1, P, m2)

    # 5) ファイバー保存の確認
    for i, e in ((1, e1), (2, e2)):
        if fibre_value(S, R, i, e) != fibre_value(S, R, i, P):
            raise EndoError(f"e_{i}({P}) が f_{i} のファイバーを保存していません")
    return EndoPair(e1, e2)


def apply_endo(S: Surface, R: RulingPair, i: int, P: ProjPoint, forms: Optional["EndoForms"] = None) -> ProjPoint:
    """
    公開版 e_i。検証済みの多項式表示 forms があればそれを先に試し、
    曲面・ファイバーの検査に通らなければ幾何的構成に戻る。
    """
    require_not_omega(S, P)
    if forms is not None:
        image = forms.evaluate(i, P)
        if image is not None and quartic_value(S, image.coords) == 0 \
                and fibre_value(S, R, i, image) == fibre_value(S, R, i, P):
            return image
        logger.debug(f"多項式表示が使えないため幾何的構成へ: P=({P})")
    return richmond_pair(S, R, P).get(i)
