# src/geometry/forms.py
"""
e_1, e_2 の多項式表示。

- printed : 既知の閉じた式（N の符号ごと）。V4 共役で補完して評価する。
- derived : 結節の接線方向を閉じた式で書き、4 つ目の交点を多項式として展開したもの。
            座標ペア {ij|kl} ごとに 1 組、N の符号ごとに 1 組（計 6 組）。
            どの組が e_1 / e_2 かは標本点で幾何的構成と照合して決める。

printed は診断用。幾何的構成との一致は測るもので、前提にはしない。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from loguru import logger

from src.arith.exact import ProjPoint, format_rat, normalize_point, to_rat
from src.geometry.endo import EndoError, richmond_pair
from src.geometry.fibration import RulingPair
from src.geometry.surface import (
    PAIRINGS,
    PointKind,
    Surface,
    classify_point,
    contains,
    require_not_omega,
)

X_SYMS = sympy.symbols("x y z w")

# 二重互換からなる V4（恒等を含む）
V4: Tuple[Tuple[int, int, int, int], ...] = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))


# ===== 例外 =====
class AllVariantsVanish(EndoError):
    pass


class InterpolationFailure(EndoError):
    pass


# ===== 既知の閉じた式 =====
def _printed_at(coeffs: Sequence[Fraction], n: Fraction, X: Sequence) -> List[Fraction]:
    a, b, c, d = coeffs
    x, y, z, w = (Fraction(v) for v in X)
    x4, y4, z4, w4 = x ** 4, y ** 4, z ** 4, w ** 4
    m = 4 * n * x * x * y * y * z * z * w * w
    return [
        x * ((3 * b * c * y4 * z4 + a * d * x4 * w4) * (a * x4 + d * w4) + m * (b * y4 - c * z4)),
        y * ((3 * a * c * x4 * z4 + b * d * y4 * w4) * (b * y4 + d * w4) + m * (c * z4 - a * x4)),
        z * ((3 * a * b * x4 * y4 + c * d * z4 * w4) * (c * z4 + d * w4) + m * (a * x4 - b * y4)),
        w * (c * d * z4 * w4 * (c * z4 + d * w4) - a * b * x4 * y4 * (9 * c * z4 + d * w4)),
    ]


def eval_printed_forms(S: Surface, sign: int, P: ProjPoint) -> ProjPoint:
    """
    既知の閉じた式を N の符号 sign で評価する。4 成分とも消えたら V4 で共役した式を試す。
    例: V_{1,1,-1,-1}, N=+1, (1:1:1:1) -> (8:-8:-8:8) = (1:-1:-1:1)
    """
    require_not_omega(S, P)
    n = S.N if sign >= 0 else -S.N
    for perm in V4:
        coeffs = [S.coeffs[perm[k]] for k in range(4)]
        vals = _printed_at(coeffs, n, [P[perm[k]] for k in range(4)])
        if any(vals):
            out = [Fraction(0)] * 4
            for k in range(4):
                out[perm[k]] = vals[k]
            return normalize_point(out)
    raise AllVariantsVanish(f"既知の閉じた式は ({P}) で全ての共役が消えます")


# ===== 導出した式 =====
@dataclass(frozen=True)
class FormVariant:
    label: str  # 例 "xy|zw,+"
    components: Tuple[sympy.Poly, sympy.Poly, sympy.Poly, sympy.Poly]

    @property
    def degree(self) -> int:
        return max(c.total_degree() for c in self.components)

    def evaluate(self, P: ProjPoint) -> Optional[ProjPoint]:
        vals = [to_rat(c.eval(dict(zip(X_SYMS, P.coords)))) if not c.is_zero else Fraction(0)
                for c in self.components]
        if not any(vals):
            return None
        return normalize_point(vals)

    def to_table(self) -> List[List[List[str]]]:
        """成分ごとに [[指数...], "係数"] の表（係数は 10 進文字列）"""
        return [
            [[*map(str, monom), format_rat(to_rat(coef))] for monom, coef in comp.terms()]
            for comp in self.components
        ]


@dataclass(frozen=True)
class EndoForms:
    surface: Surface
    provenance: str  # "printed" | "derived"
    variants: Dict[int, Tuple[FormVariant, ...]] = field(hash=False)
    validated_on: int = 0

    def evaluate(self, i: int, P: ProjPoint) -> Optional[ProjPoint]:
        """最初に消えない組で評価。全部消えたら None。"""
        for var in self.variants.get(i, ()):
            out = var.evaluate(P)
            if out is not None:
                return out
        return None

    def to_json(self) -> dict:
        return {
            "surface": str(self.surface),
            "provenance": self.provenance,
            "validated_on": self.validated_on,
            "forms": {
                f"e{i}": [{"variant": v.label, "degree": v.degree, "coefficients": v.to_table()}
                          for v in vs]
                for i, vs in sorted(self.variants.items())
            },
        }


def closed_form_direction(coeffs: Sequence, n, pairing: str, X: Sequence) -> List:
    """
    ペア {ij|kl} に対する結節の接線方向（N の符号は n に込める）。
    D_i = n a_j p_j^3 p_k p_l,  D_j = -n a_i p_i^3 p_k p_l,
    D_k = a_i a_j a_l p_i p_j p_l^3,  D_l = -a_i a_j a_k p_i p_j p_k^3
    """
    (i, j), (k, l) = PAIRINGS[pairing]
    a, p = coeffs, X
    D = [0, 0, 0, 0]
    D[i] = n * a[j] * p[j] ** 3 * p[k] * p[l]
    D[j] = -n * a[i] * p[i] ** 3 * p[k] * p[l]
    D[k] = a[i] * a[j] * a[l] * p[i] * p[j] * p[l] ** 3
    D[l] = -a[i] * a[j] * a[k] * p[i] * p[j] * p[k] ** 3
    return D


def _symbolic_variant(S: Surface, pairing: str, sign: int) -> FormVariant:
    a = [sympy.Rational(c.numerator, c.denominator) for c in S.coeffs]
    n = sympy.Rational(S.N.numerator, S.N.denominator) * sign
    p = list(X_SYMS)
    D = closed_form_direction(a, n, pairing, p)
    quartic = sum(c * v ** 4 for c, v in zip(a, D))
    cubic = sum(c * v * u ** 3 for c, v, u in zip(a, p, D))
    comps = [sympy.Poly(sympy.expand(-quartic * v + 4 * cubic * u), *X_SYMS, domain="QQ")
             for v, u in zip(p, D)]
    # 共通因子を外して次数を下げる
    g = comps[0]
    for c in comps[1:]:
        g = sympy.gcd(g, c)
    if not g.is_ground:
        comps = [sympy.div(c, g)[0] for c in comps]
    label = f"{pairing},{'+' if sign > 0 else '-'}"
    return FormVariant(label, tuple(comps))  # type: ignore[arg-type]


def _usable(S: Surface, P: ProjPoint) -> bool:
    return contains(S, P) and classify_point(S, P).kind is not PointKind.OMEGA


def derive_validated_forms(S: Surface, R: RulingPair, samples: Sequence[ProjPoint]) -> EndoForms:
    """
    6 組の導出式を作り、標本点で幾何的構成と照合して e_1 / e_2 に振り分ける。
    振り分け後、全標本点で一致を確認する。
    """
    points = [P for P in dict.fromkeys(samples) if _usable(S, P)]
    reference = {P: richmond_pair(S, R, P) for P in points}
    generic = [P for P in points if P.zero_count == 0]
    if not generic:
        raise InterpolationFailure("0 座標を持たない標本点がありません")

    # 1) 各組がどちらの自己準同型か
    bound: Dict[int, List[FormVariant]] = {1: [], 2: []}
    for pairing in PAIRINGS:
        for sign in (1, -1):
            var = _symbolic_variant(S, pairing, sign)
            target = None
            for P in generic:
                img = var.evaluate(P)
                if img is None:
                    continue
                pair = reference[P]
                if img == pair.e1 and img != pair.e2:
                    target = 1
                elif img == pair.e2 and img != pair.e1:
                    target = 2
                else:
                    raise EndoError(f"導出式 {var.label} が ({P}) で幾何的構成と一致しません")
                break
            if target is None:
                raise InterpolationFailure(f"導出式 {var.label} を振り分ける標本点がありません")
            bound[target].append(var)

    forms = EndoForms(S, "derived", {i: tuple(vs) for i, vs in bound.items()}, len(points))

    # 2) 全標本点での一致（直線上の点では式が消えることがある。そこは幾何的構成に任せる）
    uncovered = 0
    for P in points:
        for i in (1, 2):
            got = forms.evaluate(i, P)
            if got is None:
                uncovered += 1
                continue
            if got != reference[P].get(i):
                raise EndoError(f"導出式の e_{i} が ({P}) で幾何的構成と一致しません: {got}")
    logger.info(f"導出式を検証しました: V_{{{S}}}, 標本 {len(points)} 点, 式が消えた評価 {uncovered} 件")
    return forms


def reconcile_report(S: Surface, R: RulingPair, samples: Sequence[ProjPoint]) -> dict:
    """既知の閉じた式と導出式（= 幾何的構成）の突き合わせ結果"""
    forms = derive_validated_forms(S, R, samples)
    points = [P for P in dict.fromkeys(samples) if _usable(S, P)]
    reference = {P: richmond_pair(S, R, P) for P in points}
    signs = []
    for sign in (1, -1):
        matches = {"e1": 0, "e2": 0, "both": 0, "none": 0, "vanish": 0}
        off_surface = 0
        bound_to = None
        counterexample = None
        for P in points:
            try:
                printed = eval_printed_forms(S, sign, P)
            except AllVariantsVanish:
                matches["vanish"] += 1
                continue
            if not contains(S, printed):
                off_surface += 1
            pair = reference[P]
            hit = [f"e{i}" for i in (1, 2) if pair.get(i) == printed]
            matches["both" if len(hit) == 2 else (hit[0] if hit else "none")] += 1
            if len(hit) == 1 and bound_to is None:
                bound_to = hit[0]
            # 一致なし、または先に一致した側と逆の自己準同型に一致
            if (not hit or (bound_to is not None and bound_to not in hit)) and counterexample is None:
                counterexample = {"point": [str(c) for c in P.coords],
                                  "printed": [str(c) for c in printed.coords],
                                  "matched": hit}
        signs.append({
            "sign": "+" if sign > 0 else "-",
            "evaluated": len(points),
            "off_surface": off_surface,
            "matches": matches,
            "agrees": counterexample is None,
            "counterexample": counterexample,
        })
    return {
        "surface": str(S),
        "printed_matches_derived": all(s["agrees"] for s in signs),
        "printed": signs,
        "derived": forms.to_json(),
    }
