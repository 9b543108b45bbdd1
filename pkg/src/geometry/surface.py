# src/geometry/surface.py
"""
対角 4 次曲面 V_{a,b,c,d}: a x^4 + b y^4 + c z^4 + d w^4 = 0（abcd は平方）。

点の所属判定、Ω / 座標平面 / 直線 の分類、符号自己同型、
和ゼロ正規化（P を (1:1:1:1) に送る座標スケーリング）をまとめる。
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import permutations
from typing import Dict, Iterable, List, Sequence, Tuple

from src.arith.exact import (
    BinaryQuadratic,
    ProjPoint,
    format_rat,
    linear_root,
    normalize_point,
    primitive,
    rational_sqrt,
    split_square_disc_quadratic,
    to_rat,
)

COORD_NAMES = "xyzw"

# 相補的な座標ペア（直線判定に使う）
PAIRINGS: Dict[str, Tuple[Tuple[int, int], Tuple[int, int]]] = {
    "xy|zw": ((0, 1), (2, 3)),
    "xz|yw": ((0, 2), (1, 3)),
    "xw|yz": ((0, 3), (1, 2)),
}


# ===== 例外 =====
class SurfaceError(ValueError):
    """surface モジュールの基底例外"""


class ZeroCoefficient(SurfaceError):
    pass


class ProductNotSquare(SurfaceError):
    pass


class NotOnSurface(SurfaceError):
    pass


class ZeroCoordinate(SurfaceError):
    pass


class OmegaPoint(SurfaceError):
    """2 座標が 0 の点（Ω）。自己準同型はここへ延長できない。"""


class NotSumZero(SurfaceError):
    pass


# ===== 曲面 =====
@dataclass(frozen=True)
class Surface:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    N: Fraction  # abcd の正の平方根

    @property
    def coeffs(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def __str__(self) -> str:
        return ",".join(format_rat(c) for c in self.coeffs)


def make_surface(a, b, c, d) -> Surface:
    """
    係数を検証して Surface を作る。
    例: (1,1,-1,-1) -> N = 1,  (1,1,1,-1) -> ProductNotSquare
    """
    coeffs = tuple(to_rat(v) for v in (a, b, c, d))
    if any(v == 0 for v in coeffs):
        raise ZeroCoefficient(f"係数に 0 があります: {coeffs}")
    prod = coeffs[0] * coeffs[1] * coeffs[2] * coeffs[3]
    n = rational_sqrt(prod)
    if n is None:
        raise ProductNotSquare(f"abcd = {format_rat(prod)} は有理数の平方ではありません")
    return Surface(*coeffs, N=n)


def quartic_value(S: Surface, X: Sequence) -> Fraction:
    return sum((c * to_rat(x) ** 4 for c, x in zip(S.coeffs, X)), Fraction(0))


def contains(S: Surface, P: ProjPoint) -> bool:
    return quartic_value(S, P.coords) == 0


def require_on_surface(S: Surface, P: ProjPoint) -> None:
    if not contains(S, P):
        raise NotOnSurface(f"({P}) は V_{{{S}}} 上にありません")


def has_real_points(S: Surface) -> bool:
    """係数の符号が 2 正 2 負のとき（実点が存在する）"""
    return sum(1 for c in S.coeffs if c > 0) == 2


# ===== 点の分類 =====
class PointKind(str, Enum):
    OMEGA = "OmegaPoint"
    COORDINATE_PLANE = "CoordinatePlane"
    ON_LINE = "OnLine"
    GENERIC = "Generic"


@dataclass(frozen=True)
class PointClass:
    kind: PointKind
    pairings: Tuple[str, ...] = ()  # OnLine のとき消える座標ペア（複数あり得る）

    @property
    def pairing(self) -> str | None:
        return self.pairings[0] if self.pairings else None

    def __str__(self) -> str:
        if self.kind is PointKind.ON_LINE:
            return f"OnLine({self.pairing})"
        return self.kind.value


def vanishing_pairings(S: Surface, P: ProjPoint) -> Tuple[str, ...]:
    out = []
    for name, ((i, j), _) in PAIRINGS.items():
        if S.coeffs[i] * P[i] ** 4 + S.coeffs[j] * P[j] ** 4 == 0:
            out.append(name)
    return tuple(out)


def classify_point(S: Surface, P: ProjPoint) -> PointClass:
    """
    優先順位: Omega > CoordinatePlane > OnLine > Generic
    V 上の有理点が 48 本の直線のどれかに乗る ⇔ 相補ペアのどれかが消える
    """
    require_on_surface(S, P)
    zeros = P.zero_count
    if zeros >= 2:
        return PointClass(PointKind.OMEGA)
    if zeros == 1:
        return PointClass(PointKind.COORDINATE_PLANE)
    pairs = vanishing_pairings(S, P)
    if pairs:
        return PointClass(PointKind.ON_LINE, pairs)
    return PointClass(PointKind.GENERIC)


def require_not_omega(S: Surface, P: ProjPoint) -> PointClass:
    cls = classify_point(S, P)
    if cls.kind is PointKind.OMEGA:
        raise OmegaPoint(f"({P}) は Ω の点です")
    return cls


# ===== 符号自己同型 =====
@dataclass(frozen=True)
class SignAut:
    """負にする座標の集合。全座標反転は恒等なので w を含まない代表で持つ。"""
    subset: frozenset

    @classmethod
    def of(cls, names: Iterable) -> "SignAut":
        idx = set()
        for n in names:
            idx.add(COORD_NAMES.index(n) if isinstance(n, str) else int(n))
        if 3 in idx:
            idx = set(range(4)) - idx
        return cls(frozenset(idx))

    @property
    def label(self) -> str:
        return "".join(COORD_NAMES[k] for k in sorted(self.subset)) or "id"

    def compose(self, other: "SignAut") -> "SignAut":
        return SignAut.of(self.subset ^ other.subset)

    def __str__(self) -> str:
        return f"sigma_{self.label}"


ALL_SIGN_AUTS: Tuple[SignAut, ...] = tuple(
    sorted(
        {SignAut.of(s) for s in ("", "x", "y", "z", "w", "xy", "xz", "xw")},
        key=lambda s: (len(s.subset), s.label),
    )
)
PAIR_FLIPS: Tuple[SignAut, ...] = tuple(SignAut.of(p) for p in ("xy", "xz", "xw"))
SINGLE_FLIPS: Tuple[SignAut, ...] = tuple(SignAut.of(p) for p in ("x", "y", "z", "w"))


def apply_sign_aut(sigma: SignAut, P: ProjPoint) -> ProjPoint:
    return normalize_point([-c if k in sigma.subset else c for k, c in enumerate(P.coords)])


def sign_orbit(P: ProjPoint) -> List[Tuple[SignAut, ProjPoint]]:
    """恒等以外の 7 つの像（重複はそのまま返す）"""
    return [(s, apply_sign_aut(s, P)) for s in ALL_SIGN_AUTS if s.subset]


# ===== 座標スケーリングと和ゼロ正規化 =====
@dataclass(frozen=True)
class CoordinateScaling:
    factors: Tuple[Fraction, Fraction, Fraction, Fraction]

    def __call__(self, P: ProjPoint) -> ProjPoint:
        return normalize_point([f * c for f, c in zip(self.factors, P.coords)])


def transport_sum_zero(S: Surface, P: ProjPoint):
    """
    全座標が非ゼロの P について、P を (1:1:1:1) に送る曲面 V' とその写像を返す。
    戻り値: (S', V→V', V'→V)
    """
    require_on_surface(S, P)
    if P.zero_count:
        raise ZeroCoordinate(f"({P}) に 0 座標があります")
    new = make_surface(*(c * Fraction(p) ** 4 for c, p in zip(S.coeffs, P.coords)))
    forward = CoordinateScaling(tuple(Fraction(1, p) for p in P.coords))  # type: ignore[arg-type]
    backward = CoordinateScaling(tuple(Fraction(p) for p in P.coords))  # type: ignore[arg-type]
    return new, forward, backward


def sum_zero_companion(S: Surface, sign: int = 1) -> ProjPoint:
    """
    a+b+c+d = 0 の曲面上で (1:1:1:1) の自己準同型像を閉じた式で返す。
    sign は N の符号。
    """
    a, b, c, d = S.coeffs
    if a + b + c + d != 0:
        raise NotSumZero(f"V_{{{S}}} は係数和が 0 ではありません")
    n = S.N * (1 if sign >= 0 else -1)
    return normalize_point([
        (3 * b * c + a * d) * (a + d) + 4 * n * (b - c),
        (3 * a * c + b * d) * (b + d) + 4 * n * (c - a),
        (3 * a * b + c * d) * (c + d) + 4 * n * (a - b),
        -d * (a * b + a * c + b * c) - 9 * a * b * c,
    ])


# ===== 座標置換 =====
def permutation_parity(perm: Sequence[int]) -> int:
    """偶置換なら +1、奇置換なら -1"""
    seen, parity = set(), 1
    for start in range(len(perm)):
        if start in seen:
            continue
        k, length = start, 0
        while k not in seen:
            seen.add(k)
            k = perm[k]
            length += 1
        if length % 2 == 0:
            parity = -parity
    return parity


ALL_PERMUTATIONS: Tuple[Tuple[int, ...], ...] = tuple(permutations(range(4)))


def permute_surface(S: Surface, perm: Sequence[int]) -> Surface:
    """新しい第 k 係数 = 元の第 perm[k] 係数"""
    return make_surface(*(S.coeffs[perm[k]] for k in range(4)))


def permute_point(P: ProjPoint, perm: Sequence[int]) -> ProjPoint:
    return normalize_point([P[perm[k]] for k in range(4)])


# ===== 接平面と対角 2 次形式の接錐 =====
def tangent_plane(S: Surface, P: ProjPoint) -> Tuple[int, ...]:
    """
    P での接平面の係数 (a x0^3, b y0^3, c z0^3, d w0^3)（内容 1 に正規化）。
    例: V_{1,1,-1,-1}, (1:1:1:1) -> (1, 1, -1, -1)
    """
    require_on_surface(S, P)
    return primitive(c * Fraction(p) ** 3 for c, p in zip(S.coeffs, P.coords))


def diagonal_value(weights: Sequence, X: Sequence) -> Fraction:
    return sum((to_rat(w) * to_rat(x) ** 2 for w, x in zip(weights, X)), Fraction(0))


def diagonal_bilinear(weights: Sequence, X: Sequence, Y: Sequence) -> Fraction:
    return sum((to_rat(w) * to_rat(x) * to_rat(y) for w, x, y in zip(weights, X, Y)), Fraction(0))


def plane_basis(normal: Sequence, point: Sequence) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    平面 Σ normal_k X_k = 0 の中で、point を法として独立な 2 ベクトルを返す。
    point は平面上にあること。
    """
    normal = [to_rat(v) for v in normal]
    m = max(range(4), key=lambda k: (abs(normal[k]), -k))
    if normal[m] == 0:
        raise ValueError("法線ベクトルが 0 です")
    others = [k for k in range(4) if k != m]
    # point = Σ_{k≠m} (point_k / normal_m) w_k なので、point_n ≠ 0 の w_n を外す
    drop = next(k for k in others if to_rat(point[k]) != 0)
    vecs = []
    for k in others:
        if k == drop:
            continue
        v = [Fraction(0)] * 4
        v[k] = normal[m]
        v[m] = -normal[k]
        vecs.append(primitive(v))
    return vecs[0], vecs[1]


def split_tangent_cone(weights: Sequence, point: Sequence) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    対角 2 次形式 Σ w_k X_k^2 の、point での接平面内の零方向 2 つ（point を法として）。
    重根のときは同じ方向を 2 回返す。順序は分解因子の辞書式順に従う。
    """
    normal = [to_rat(w) * to_rat(p) for w, p in zip(weights, point)]
    u, v = plane_basis(normal, point)
    q = BinaryQuadratic.of(
        diagonal_value(weights, u),
        2 * diagonal_bilinear(weights, u, v),
        diagonal_value(weights, v),
    )
    dirs = []
    for form in split_square_disc_quadratic(q):
        alpha, beta = linear_root(form)
        dirs.append(primitive(alpha * ui + beta * vi for ui, vi in zip(u, v)))
    return dirs[0], dirs[1]
