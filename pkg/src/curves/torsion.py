# src/curves/torsion.py
"""
ファイバー C_i 上の因子類 (e_i(P)) - (P) の位数判定。

判定は点の比較だけで行う:
- e_i(P) が σ_uv(P) のどれか        → 2
- e_i(e_i(P)) = e_i(P)              → 3
- e_i(e_i(P)) が σ_uv(P) のどれか   → 4（-2Q が 2 等分点）
- それ以外（全座標が非ゼロ）        → 無限
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Dict, List, Optional

from loguru import logger

from src.arith.exact import ProjPoint, normalize_point
from src.curves.ellcurve import (
    MAZUR_BOUND,
    INFINITY,
    add,
    fibre_to_weierstrass,
)
from src.geometry.endo import apply_endo
from src.geometry.fibration import RulingPair, fibre_value, is_singular_fibre
from src.geometry.surface import (
    PAIR_FLIPS,
    Surface,
    apply_sign_aut,
    contains,
    require_not_omega,
)

if TYPE_CHECKING:
    from src.geometry.forms import EndoForms


# ===== 例外 =====
class TorsionError(ValueError):
    """torsion モジュールの基底例外"""


class CertificateRefused(TorsionError):
    """判定が無限位数でない点には証明書を出さない"""


class Contradiction(TorsionError):
    """判定と Weierstrass モデル上の計算が食い違った"""


class OrderKind(str, Enum):
    ONE = "One"
    TWO = "Two"
    THREE = "Three"
    FOUR = "Four"
    INFINITE = "Infinite"
    UNDEFINED_SINGULAR_FIBRE = "UndefinedSingularFibre"


ORDER_OF: Dict[OrderKind, Optional[int]] = {
    OrderKind.ONE: 1,
    OrderKind.TWO: 2,
    OrderKind.THREE: 3,
    OrderKind.FOUR: 4,
    OrderKind.INFINITE: None,
}


@dataclass(frozen=True)
class OrderClass:
    kind: OrderKind
    fibration: int
    point: ProjPoint
    witness: Dict[str, str] = field(default_factory=dict, hash=False)

    @property
    def order(self) -> Optional[int]:
        if self.kind is OrderKind.UNDEFINED_SINGULAR_FIBRE:
            raise TorsionError("特異ファイバー上では位数は定義されません")
        return ORDER_OF[self.kind]

    def to_json(self) -> dict:
        return {"fibration": self.fibration, "point": str(self.point),
                "order": self.kind.value, "witness": dict(self.witness)}


def _matching_pair_flip(Q: ProjPoint, P: ProjPoint) -> Optional[str]:
    for sigma in PAIR_FLIPS:
        if apply_sign_aut(sigma, P) == Q:
            return str(sigma)
    return None


# ===== 公開操作 =====
def order_class(S: Surface, R: RulingPair, i: int, P: ProjPoint,
                forms: Optional["EndoForms"] = None) -> OrderClass:
    """
    例: V_{-2,1,1,-2}, (0:1:1:1) -> One
        V_{1,1,-1,-1}, (1:2:1:2), 非特異な方のファイブレーション -> Two
    """
    require_not_omega(S, P)

    # 1) 0 座標: e_i(P) = P なので因子類は 0
    if P.zero_count:
        return OrderClass(OrderKind.ONE, i, P, {"e_i(P)": str(P)})

    # 2) 特異ファイバー
    fid = fibre_value(S, R, i, P)
    if is_singular_fibre(S, R, i, fid):
        return OrderClass(OrderKind.UNDEFINED_SINGULAR_FIBRE, i, P, {"fibre": str(fid)})

    # 3) e_i(P) と e_i^2(P)
    e1 = apply_endo(S, R, i, P, forms)
    witness = {"fibre": str(fid), "e_i(P)": str(e1)}
    flip = _matching_pair_flip(e1, P)
    if flip:
        witness["matched"] = flip
        return OrderClass(OrderKind.TWO, i, P, witness)

    e2 = apply_endo(S, R, i, e1, forms)
    witness["e_i^2(P)"] = str(e2)
    if e2 == e1:
        return OrderClass(OrderKind.THREE, i, P, witness)
    flip = _matching_pair_flip(e2, P)
    if flip:
        witness["matched"] = flip
        return OrderClass(OrderKind.FOUR, i, P, witness)
    return OrderClass(OrderKind.INFINITE, i, P, witness)


def certify_infinite_order(S: Surface, R: RulingPair, i: int, P: ProjPoint,
                           forms: Optional["EndoForms"] = None) -> dict:
    """
    判定が Infinite の点について、Weierstrass モデル上で k·ψ(e_i(P)) ≠ O (k = 1..12) を確かめる。
    """
    oc = order_class(S, R, i, P, forms)
    if oc.kind is not OrderKind.INFINITE:
        raise CertificateRefused(f"f_{i}, ({P}) の判定は {oc.kind.value} です")

    E, cmap = fibre_to_weierstrass(S, R, i, P)
    Q = cmap.forward(apply_endo(S, R, i, P, forms))
    multiples: List[list] = []
    acc = INFINITY
    for k in range(1, MAZUR_BOUND + 1):
        acc = add(E, acc, Q)
        if acc.is_infinity:
            raise Contradiction(f"f_{i}, ({P}): {k}·ψ(e_i(P)) = O なのに判定は Infinite です")
        multiples.append(acc.to_json())
    logger.debug(f"無限位数を確認: f_{i}, ({P})")
    return {
        "fibration": i,
        "point": str(P),
        "curve": E.to_json(),
        "image": Q.to_json(),
        "multiples": multiples,
    }


def fourtorsion_candidates(S: Surface, R: RulingPair, i: int, P: ProjPoint) -> List[ProjPoint]:
    """
    P の座標を二重互換で入れ替え、符号を 1 つだけ反転した点のうち、
    V 上にあり P と同じ f_i のファイバーに乗るもの。
    V_{1,1,-1,-1} ではこれが有理 4 等分点になる。
    """
    require_not_omega(S, P)
    fid = fibre_value(S, R, i, P)
    shuffles = ((2, 3, 0, 1), (3, 2, 1, 0), (1, 0, 3, 2))
    out: List[ProjPoint] = []
    for perm in shuffles:
        base = [P[perm[k]] for k in range(4)]
        for neg in range(4):
            Q = normalize_point([-c if k == neg else c for k, c in enumerate(base)])
            if Q in out or Q == P or not contains(S, Q):
                continue
            if fibre_value(S, R, i, Q) == fid:
                out.append(Q)
    return out
