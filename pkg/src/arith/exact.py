# src/arith/exact.py
"""
厳密演算の土台。

- 有理数は fractions.Fraction（丸めは一切しない）
- 射影点は互いに素な整数 4 つ、最初の非ゼロ成分が正（正準形）
- 2 変数の斉次形式（2 次・4 次）と、幾何側が必要とする 2 つの分解カーネル
    * split_square_disc_quadratic : 判別式が平方の 2 次形式を 1 次形式 2 つに分解
    * deflate_triple_root          : 3 重根を既知とする 4 次形式から残りの根を取り出す
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Sequence, Tuple

import sympy

# 座標は任意長の 10 進表記で読み書きする（3.10.7 以降の桁数上限を外す）
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

Rat = Fraction
LinearForm = Tuple[int, int]  # (l1, l2) は l1*α + l2*β を表す


# ===== 例外 =====
class ArithmeticDomainError(ValueError):
    """exact モジュールの基底例外"""


class AllZero(ArithmeticDomainError):
    pass


class NonSquareDiscriminant(ArithmeticDomainError):
    pass


class ZeroForm(ArithmeticDomainError):
    pass


class NotTripleRoot(ArithmeticDomainError):
    pass


class IdenticallyZero(ArithmeticDomainError):
    pass


# ===== スカラー =====
def to_rat(value) -> Fraction:
    """int / Fraction / "p/q" 文字列 / sympy.Rational を Fraction へ"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, (int, Rational, str)):
        return Fraction(value)
    raise TypeError(f"有理数に変換できません: {value!r}")


def format_rat(r) -> str:
    """外部出力用。整数は "p"、それ以外は "p/q"。"""
    r = to_rat(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def digits(n: int) -> int:
    """10 進の桁数（str() を使わない）"""
    n = abs(int(n))
    if n == 0:
        return 1
    # log10(2) の下からの近似で見積もり、10 の冪で補正する
    d = (n.bit_length() - 1) * 30102 // 100000 + 1
    while 10 ** d <= n:
        d += 1
    while d > 1 and 10 ** (d - 1) > n:
        d -= 1
    return d


def rational_sqrt(r) -> Optional[Fraction]:
    """
    有理数の平方根（非負）を厳密に返す。平方でなければ None。
    例: 36 -> 6, 4/9 -> 2/3, 2 -> None
    """
    r = to_rat(r)
    if r < 0:
        return None
    num, den = r.numerator, r.denominator
    sn, sd = math.isqrt(num), math.isqrt(den)
    if sn * sn != num or sd * sd != den:
        return None
    return Fraction(sn, sd)


def primitive(values: Iterable, canonical_sign: bool = True) -> Tuple[int, ...]:
    """
    分母を払い、内容（gcd）を 1 にした整数ベクトルを返す。
    canonical_sign=True なら最初の非ゼロ成分を正にそろえる。
    全成分 0 ならそのまま 0 ベクトル。
    """
    fr = [to_rat(v) for v in values]
    lcm = 1
    for v in fr:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in fr]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g == 0:
        return tuple(ints)
    ints = [v // g for v in ints]
    if canonical_sign:
        lead = next(v for v in ints if v != 0)
        if lead < 0:
            ints = [-v for v in ints]
    return tuple(ints)


def normalize_pair(s, t) -> Tuple[int, int]:
    """P^1 の点 (s:t) の正準形。両方 0 は AllZero。"""
    pair = primitive((s, t))
    if pair == (0, 0):
        raise AllZero("(0:0) は P^1 の点ではありません")
    return pair  # type: ignore[return-value]


# ===== 射影点 =====
@dataclass(frozen=True)
class ProjPoint:
    coords: Tuple[int, int, int, int]

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, k: int) -> int:
        return self.coords[k]

    def __str__(self) -> str:
        return ":".join(str(c) for c in self.coords)

    @property
    def zero_count(self) -> int:
        return sum(1 for c in self.coords if c == 0)

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        """出力順序（高さ → 辞書式）"""
        return height(self), self.coords


def normalize_point(raw: Sequence) -> ProjPoint:
    """
    4 つの有理数から正準形の射影点を作る。
    例: (84, -60, 324, -348) -> (7 : -5 : 27 : -29)
        (-3, 3, 3, 3)        -> (1 : -1 : -1 : -1)
    """
    if len(raw) != 4:
        raise ValueError(f"座標は 4 つ必要です: {raw!r}")
    coords = primitive(raw)
    if all(c == 0 for c in coords):
        raise AllZero("全座標が 0 です")
    return ProjPoint(coords)  # type: ignore[arg-type]


def height(p: ProjPoint) -> int:
    """素朴な高さ（座標の絶対値の最大）"""
    return max(abs(c) for c in p.coords)


# ===== 2 変数斉次形式 =====
@dataclass(frozen=True)
class BinaryQuadratic:
    """A*α^2 + B*α*β + C*β^2"""
    coeffs: Tuple[Fraction, Fraction, Fraction]

    @classmethod
    def of(cls, a, b, c) -> "BinaryQuadratic":
        return cls((to_rat(a), to_rat(b), to_rat(c)))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def discriminant(self) -> Fraction:
        a, b, c = self.coeffs
        return b * b - 4 * a * c

    def __call__(self, alpha, beta) -> Fraction:
        a, b, c = self.coeffs
        return a * alpha * alpha + b * alpha * beta + c * beta * beta


@dataclass(frozen=True)
class BinaryQuartic:
    """Σ q_k t^(4-k) u^k （k = 0..4）"""
    coeffs: Tuple[Fraction, Fraction, Fraction, Fraction, Fraction]

    @classmethod
    def of(cls, *cs) -> "BinaryQuartic":
        if len(cs) != 5:
            raise ValueError("4 次形式の係数は 5 つです")
        return cls(tuple(to_rat(c) for c in cs))  # type: ignore[arg-type]

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __call__(self, t, u) -> Fraction:
        return sum(
            (c * t ** (4 - k) * u ** k for k, c in enumerate(self.coeffs)),
            Fraction(0),
        )


def _linear_factor(c1, c2) -> LinearForm:
    form = primitive((c1, c2))
    if form == (0, 0):
        raise ZeroForm("1 次因子が 0 になりました")
    return form  # type: ignore[return-value]


def split_square_disc_quadratic(q: BinaryQuadratic) -> Tuple[LinearForm, LinearForm]:
    """
    判別式が有理数の平方である 2 次形式を 1 次形式 2 つに分解する。
    戻り値は正準化済みで辞書式順。積は q の非ゼロ定数倍。
    例: u^2 - v^2 -> ((1, -1), (1, 1)),  u^2 -> ((1, 0), (1, 0))
    """
    if q.is_zero:
        raise ZeroForm("恒等的に 0 の 2 次形式は分解できません")
    a, b, c = q.coeffs
    s = rational_sqrt(q.discriminant)
    if s is None:
        raise NonSquareDiscriminant(f"判別式 {format_rat(q.discriminant)} は平方ではありません")

    if a != 0:
        # 4A*q = (2Aα + (B-s)β)(2Aα + (B+s)β)
        f1 = _linear_factor(2 * a, b - s)
        f2 = _linear_factor(2 * a, b + s)
    else:
        # q = β(Bα + Cβ)
        f1 = (0, 1)
        f2 = _linear_factor(b, c) if (b, c) != (0, 0) else (0, 1)
    return (f1, f2) if f1 <= f2 else (f2, f1)


def linear_root(form: LinearForm) -> Tuple[int, int]:
    """l1*α + l2*β = 0 の根 (α:β) = (-l2 : l1)"""
    l1, l2 = form
    return normalize_pair(-l2, l1)


def _divide_linear(coeffs: Sequence[Fraction], r: Fraction) -> Tuple[list, Fraction]:
    """t を変数とする多項式（降冪）を (t - r) で組立除法"""
    out = [coeffs[0]]
    for c in coeffs[1:]:
        out.append(c + r * out[-1])
    return out[:-1], out[-1]


def deflate_triple_root(q: BinaryQuartic, root: Tuple) -> Tuple[int, int]:
    """
    3 重以上の根 root = (t0:u0) を持つ 4 次形式から 4 つ目の根を返す。
    例: (t-u)^3 (t-5u), root (1:1) -> (5:1)
    """
    if q.is_zero:
        raise IdenticallyZero("4 次形式が恒等的に 0 です")
    t0, u0 = (to_rat(v) for v in root)
    if t0 == 0 and u0 == 0:
        raise AllZero("根 (0:0) は不正です")

    coeffs = list(q.coeffs)
    swapped = u0 == 0
    if swapped:
        # (1:0) は t と u を入れ替えて (0:1) として扱う
        coeffs.reverse()
        t0, u0 = u0, t0
    r = t0 / u0

    # 1) (t - r u) で 3 回割る。余りが出たら 3 重根ではない
    for step in range(3):
        coeffs, rem = _divide_linear(coeffs, r)
        if rem != 0:
            raise NotTripleRoot(f"根の重複度が {step} です（3 以上が必要）")

    # 2) 残った 1 次式 c0*t + c1*u の根
    c0, c1 = coeffs
    s, t = -c1, c0
    if swapped:
        s, t = t, s
    return normalize_pair(s, t)


# ===== 小さな線形代数（sympy の厳密行列） =====
def _matrix(rows: Sequence[Sequence]) -> sympy.Matrix:
    return sympy.Matrix(
        [[sympy.Rational(to_rat(v).numerator, to_rat(v).denominator) for v in row] for row in rows]
    )


def nullspace(rows: Sequence[Sequence]) -> list:
    """行列の右零空間の基底（各ベクトルは整数化・正準化済み tuple）"""
    return [primitive(list(v)) for v in _matrix(rows).nullspace()]


def rank(rows: Sequence[Sequence]) -> int:
    return _matrix(rows).rank()
