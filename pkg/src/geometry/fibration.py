# src/geometry/fibration.py
"""
2 次曲面 Q = τ(V): a X^2 + b Y^2 + c Z^2 + d W^2 = 0 の 2 つの ruling と、
そこから誘導される楕円ファイブレーション f_i = π_i ∘ τ。

表現（Representation）は Q 上の 1 次形式の組 (num, den)。
V 側で見ると x^2, y^2, z^2, w^2 の 1 次結合（対角 2 次形式）の組になる。
同じ ruling の表現どうしは Q 上で一致し（交差乗算が Q の倍数）、
底直線が互いに交わらないので、どの有理点でもどれかは定義される。
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import List, Optional, Sequence, Tuple, Union

import sympy
from loguru import logger

from src.arith.exact import (
    ProjPoint,
    normalize_pair,
    normalize_point,
    nullspace,
    primitive,
    rank,
)
from src.geometry.surface import (
    Surface,
    diagonal_bilinear,
    diagonal_value,
    require_on_surface,
    split_tangent_cone,
)

Form4 = Tuple[int, int, int, int]


# ===== 例外 =====
class FibrationError(ValueError):
    """fibration モジュールの基底例外"""


class NotOnQuadric(FibrationError):
    pass


class DegenerateTangent(FibrationError):
    pass


class AllRepresentationsVanish(FibrationError):
    pass


class InconsistentRepresentations(FibrationError):
    pass


# ===== 型 =====
@dataclass(frozen=True)
class FibreId:
    s: int
    t: int

    @classmethod
    def of(cls, s, t) -> "FibreId":
        return cls(*normalize_pair(s, t))

    @classmethod
    def parse(cls, text: str) -> "FibreId":
        s, t = text.split(":")
        return cls.of(int(s), int(t))

    def as_fraction(self) -> Optional[Fraction]:
        """実チャートでの値 s/t（t = 0 は無限遠なので None）"""
        return None if self.t == 0 else Fraction(self.s, self.t)

    def __str__(self) -> str:
        return f"{self.s}:{self.t}"


@dataclass(frozen=True)
class Representation:
    num: Form4
    den: Form4

    def values(self, squares: Sequence) -> Tuple[Fraction, Fraction]:
        g = sum((Fraction(c) * y for c, y in zip(self.num, squares)), Fraction(0))
        h = sum((Fraction(c) * y for c, y in zip(self.den, squares)), Fraction(0))
        return g, h


@dataclass(frozen=True)
class RulingPair:
    surface: Surface
    seed: Optional[ProjPoint]  # Q 上の基点 R0（from_forms では None）
    reps: Tuple[Tuple[Representation, ...], Tuple[Representation, ...]]

    def representations(self, i: int) -> Tuple[Representation, ...]:
        if i not in (1, 2):
            raise ValueError(f"ファイブレーション番号は 1 か 2 です: {i}")
        return self.reps[i - 1]

    @classmethod
    def from_forms(cls, S: Surface, forms1: Sequence, forms2: Sequence) -> "RulingPair":
        """
        既知の表現から作る（例: V_{1,1,-1,-1} の (x^2+z^2 : w^2+y^2) など）。
        各表現は ((x^2,y^2,z^2,w^2 の係数), (同)) の組。
        """
        reps = []
        for forms in (forms1, forms2):
            rs = tuple(Representation(tuple(n), tuple(d)) for n, d in forms)
            if len(rs) < 2:
                raise FibrationError("表現は各 ruling に 2 つ以上必要です")
            for r1, r2 in combinations(rs, 2):
                if not _consistent(r1, r2, S.coeffs):
                    raise InconsistentRepresentations(f"{r1} と {r2} は同じ写像を定めません")
            reps.append(rs)
        return cls(S, None, (reps[0], reps[1]))


# ===== τ と Q =====
def tau_square(P: ProjPoint) -> ProjPoint:
    """座標ごとの 2 乗。例: (1:-1:1:-1) -> (1:1:1:1)"""
    return normalize_point([c * c for c in P.coords])


def on_quadric(S: Surface, R: ProjPoint) -> bool:
    return diagonal_value(S.coeffs, R.coords) == 0


def _consistent(r1: Representation, r2: Representation, weights: Sequence) -> bool:
    """num1*den2 - den1*num2 が Q の定数倍か（対称行列で比較）"""
    m = [[Fraction(0)] * 4 for _ in range(4)]
    for k in range(4):
        for l in range(4):
            m[k][l] = Fraction(
                r1.num[k] * r2.den[l] + r1.num[l] * r2.den[k]
                - r1.den[k] * r2.num[l] - r1.den[l] * r2.num[k],
                2,
            )
    for k, l in combinations(range(4), 2):
        if m[k][l] != 0:
            return False
        if m[k][k] * weights[l] != m[l][l] * weights[k]:
            return False
    return True


def _line_forms(point: Sequence, direction: Sequence) -> Representation:
    """直線 span(point, direction) を定める 1 次形式 2 つ"""
    ns = nullspace([list(point), list(direction)])
    if len(ns) != 2:
        raise DegenerateTangent("直線の方程式が 2 本になりません")
    return Representation(ns[0], ns[1])


def _trial_points(S: Surface, R0: ProjPoint):
    """R0 を通る直線と Q の第 2 交点として Q 上の有理点を列挙する"""
    for W in product((0, 1, -1, 2), repeat=4):
        if not any(W):
            continue
        b = diagonal_bilinear(S.coeffs, R0.coords, W)
        q = diagonal_value(S.coeffs, W)
        Y = [-q * r + 2 * b * w for r, w in zip(R0.coords, W)]
        if any(Y):
            yield Y


def _align(S: Surface, R0: ProjPoint, base: Representation, alt: Representation) -> Representation:
    """alt に P^1 の自己同型を掛けて base と同じ写像にそろえる（3 点で決める）"""
    rows, seen = [], set()
    for Y in _trial_points(S, R0):
        gb, hb = base.values(Y)
        ga, ha = alt.values(Y)
        if (gb, hb) == (0, 0) or (ga, ha) == (0, 0):
            continue
        key = normalize_pair(gb, hb)
        if key in seen:
            continue
        seen.add(key)
        rows.append([-hb * ga, -hb * ha, gb * ga, gb * ha])
        if len(rows) == 3:
            break
    ns = nullspace(rows)
    if len(ns) != 1:
        raise FibrationError("表現のそろえ込みに失敗しました")
    m11, m12, m21, m22 = ns[0]
    merged = primitive(
        [m11 * n + m12 * d for n, d in zip(alt.num, alt.den)]
        + [m21 * n + m22 * d for n, d in zip(alt.num, alt.den)]
    )
    out = Representation(tuple(merged[:4]), tuple(merged[4:]))
    if not _consistent(base, out, S.coeffs):
        raise InconsistentRepresentations("そろえた表現が基準表現と一致しません")
    return out


def _ruling(S: Surface, R0: ProjPoint, base_dir, trans_dir, extra: int = 2) -> Tuple[Representation, ...]:
    """
    底直線 span(R0, base_dir) の表現に、同じ族の別の直線からの表現を足す。
    別の直線は横断直線 span(R0, trans_dir) 上の点 X での接平面切断から取る。
    """
    base = _line_forms(R0.coords, base_dir)
    reps = [base]
    for s in range(1, extra + 1):
        X = primitive([r + s * t for r, t in zip(R0.coords, trans_dir)])
        d1, d2 = split_tangent_cone(S.coeffs, X)
        # 横断直線に沿わない方が、同じ族の新しい直線
        other = d1 if rank([X, trans_dir, d1]) == 3 else d2
        reps.append(_align(S, R0, base, _line_forms(X, other)))
    return tuple(reps)


def build_rulings(S: Surface, R0: ProjPoint) -> RulingPair:
    """
    Q 上の有理点 R0 の接平面切断を 2 直線 l_1, l_2 に分解し、両 ruling の表現を作る。
    f_1 のファイバーは l_1 と同じ族（表現は l_2 側の直線から）。
    """
    if not on_quadric(S, R0):
        raise NotOnQuadric(f"({R0}) は Q 上にありません")

    # 1) 接平面切断の分解（abcd が平方なので有理的に割れる）
    d1, d2 = split_tangent_cone(S.coeffs, R0.coords)
    if rank([R0.coords, d1, d2]) < 3:
        raise DegenerateTangent(f"({R0}) で接平面切断が 2 重直線です")

    # 2) 各 ruling の表現（≥ 3 本、底直線は互いに素）
    reps1 = _ruling(S, R0, base_dir=d2, trans_dir=d1)
    reps2 = _ruling(S, R0, base_dir=d1, trans_dir=d2)
    logger.debug(f"ruling 構築: V_{{{S}}}, R0=({R0}), 表現数 {len(reps1)}/{len(reps2)}")
    return RulingPair(S, R0, (reps1, reps2))


# ===== ファイバー =====
def fibre_value(S: Surface, R: RulingPair, i: int, P: ProjPoint) -> FibreId:
    """
    f_i(P)。最初に定義される表現の値を使う（どれを使っても同じ）。
    例: V_{1,1,-1,-1}, f = (x^2+z^2 : w^2+y^2), (133:134:158:59) -> (193:97)
    """
    require_on_surface(S, P)
    squares = [c * c for c in P.coords]
    for rep in R.representations(i):
        g, h = rep.values(squares)
        if g != 0 or h != 0:
            return FibreId.of(g, h)
    raise AllRepresentationsVanish(f"f_{i} のどの表現も ({P}) で定義されません")


def fibre_quadrics(R: RulingPair, i: int, fid: FibreId) -> Tuple[Form4, Form4]:
    """
    ファイバー C_i = f_i^{-1}(s:t) を切り出す対角 2 次形式 2 つ。
    2 つの表現の底直線が異なるので、2 平面の交線がファイバー直線になる。
    """
    r1, r2 = R.representations(i)[:2]
    k1 = primitive([fid.t * n - fid.s * d for n, d in zip(r1.num, r1.den)], canonical_sign=False)
    k2 = primitive([fid.t * n - fid.s * d for n, d in zip(r2.num, r2.den)], canonical_sign=False)
    return k1, k2  # type: ignore[return-value]


def is_singular_fibre(S: Surface, R: RulingPair, i: int, where: Union[ProjPoint, FibreId]) -> bool:
    """2 つの対角 2 次形式の交わりが特異 ⇔ ある 2x2 小行列式が 0"""
    fid = fibre_value(S, R, i, where) if isinstance(where, ProjPoint) else where
    alpha, beta = fibre_quadrics(R, i, fid)
    return any(alpha[k] * beta[l] - alpha[l] * beta[k] == 0 for k, l in combinations(range(4), 2))


@lru_cache(maxsize=None)
def degeneracy_form(R: RulingPair, i: int) -> sympy.Poly:
    """ファイバー族の退化条件（6 つの小行列式の積）。s, t の 12 次形式。"""
    s, t = sympy.symbols("s t")
    r1, r2 = R.representations(i)[:2]
    alpha = [t * n - s * d for n, d in zip(r1.num, r1.den)]
    beta = [t * n - s * d for n, d in zip(r2.num, r2.den)]
    expr = sympy.Integer(1)
    for k, l in combinations(range(4), 2):
        expr *= alpha[k] * beta[l] - alpha[l] * beta[k]
    return sympy.Poly(sympy.expand(expr), s, t, domain="QQ")


@lru_cache(maxsize=None)
def singular_fibres(R: RulingPair, i: int) -> Tuple[sympy.Poly, Tuple[FibreId, ...]]:
    """
    特異ファイバーの位置。退化形式の無平方部分（6 次）と、その有理根。
    """
    form = degeneracy_form(R, i)
    sextic = sympy.Poly(sympy.sqf_part(form.as_expr()), *form.gens, domain="QQ")
    roots: List[FibreId] = []
    _, factors = sympy.factor_list(sextic.as_expr(), *form.gens)
    for fac, _mult in factors:
        lin = sympy.Poly(fac, *form.gens)
        if lin.total_degree() != 1:
            continue
        p = lin.coeff_monomial(form.gens[0])
        q = lin.coeff_monomial(form.gens[1])
        roots.append(FibreId.of(sympy.Rational(q), -sympy.Rational(p)))
    return sextic, tuple(sorted(set(roots), key=lambda f: (f.s, f.t)))


# ===== 既定の ruling =====
# V_{1,1,-1,-1} の標準的な表現（x^4 - z^4 = w^4 - y^4 の 2 通りの因数分解）
#   f_1 = (x^2+z^2 : w^2+y^2) = (w^2-y^2 : x^2-z^2)
#   f_2 = (x^2-z^2 : w^2+y^2) = (w^2-y^2 : x^2+z^2)
STANDARD_COEFFS = (1, 1, -1, -1)
STANDARD_FORMS = (
    (((1, 0, 1, 0), (0, 1, 0, 1)), ((0, -1, 0, 1), (1, 0, -1, 0))),
    (((1, 0, -1, 0), (0, 1, 0, 1)), ((0, -1, 0, 1), (1, 0, 1, 0))),
)


def default_rulings(S: Surface, P: ProjPoint) -> RulingPair:
    """
    V_{1,1,-1,-1} では標準形、それ以外は τ(P) を基点に build_rulings。
    例: V_{1,1,-1,-1}, (133:134:158:59) -> f_1 = (193:97)
    """
    if tuple(S.coeffs) == STANDARD_COEFFS:
        return RulingPair.from_forms(S, *STANDARD_FORMS)
    require_on_surface(S, P)
    return build_rulings(S, tau_square(P))
