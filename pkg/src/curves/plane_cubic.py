# src/curves/plane_cubic.py
"""
有理点 O を持つ滑らかな平面 3 次曲線 Γ の Weierstrass 化。

    T : O での接線（T·Γ = 2O + E'、O が変曲点なら E' = O）
    L : E' を通り T と異なる直線          → x = L/T   は L(2O) に入る
    q : O で 1 位以上・E' で 2 位以上消える 2 次曲線（変曲点なら O で 3 位以上）
                                         → y = q/T^2 は L(3O) に入る
1, x, y, x^2, xy, y^2, x^3 の 1 次関係を Γ を法として求め、長い Weierstrass 形にそろえる。
T が消える点（E'）での値は局所分岐の冪級数で極限を取る。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from loguru import logger

from src.arith.exact import (
    BinaryQuadratic,
    NonSquareDiscriminant,
    linear_root,
    nullspace,
    primitive,
    rank,
    split_square_disc_quadratic,
    to_rat,
)

Y_SYMS = sympy.symbols("y0 y1 y2")
EPS = sympy.Symbol("eps")
Vec3 = Tuple[Fraction, Fraction, Fraction]

CONIC_MONOMIALS: Tuple[Tuple[int, int, int], ...] = (
    (2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2),
)


class CubicReductionError(ValueError):
    pass


# ===== 小道具 =====
def cross(u: Sequence, v: Sequence) -> Vec3:
    u = [to_rat(c) for c in u]
    v = [to_rat(c) for c in v]
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((to_rat(a) * to_rat(b) for a, b in zip(u, v)), Fraction(0))


def proportional(u: Sequence, v: Sequence) -> bool:
    return not any(cross(u, v))


def poly_eval(poly: sympy.Poly, pt: Sequence) -> Fraction:
    """sympy.Poly を Fraction の点で評価（巨大整数でも sympy を通さない）"""
    pt = [to_rat(c) for c in pt]
    total = Fraction(0)
    for monom, coef in poly.terms():
        term = to_rat(coef)
        for c, e in zip(pt, monom):
            if e:
                term *= c ** e
        total += term
    return total


def _q(value) -> sympy.Rational:
    r = to_rat(value)
    return sympy.Rational(r.numerator, r.denominator)


def _linear(vec: Sequence) -> sympy.Poly:
    return sympy.Poly(sum(_q(c) * s for c, s in zip(vec, Y_SYMS)), *Y_SYMS, domain="QQ")


def _conic(coeffs: Sequence) -> sympy.Poly:
    expr = 0
    for c, (i, j, k) in zip(coeffs, CONIC_MONOMIALS):
        expr += _q(c) * Y_SYMS[0] ** i * Y_SYMS[1] ** j * Y_SYMS[2] ** k
    return sympy.Poly(expr, *Y_SYMS, domain="QQ")


def _conic_vector(poly: sympy.Poly) -> List[Fraction]:
    return [to_rat(poly.coeff_monomial(m)) for m in CONIC_MONOMIALS]


# ===== 局所分岐 =====
def local_branch(F: sympy.Poly, point: Sequence, order: int) -> Tuple[sympy.Expr, sympy.Expr, sympy.Expr]:
    """
    滑らかな点 point での Γ の局所パラメータ表示 Z(ε) = point + εW + φ(ε)N（ε^order まで）。
    W は接線上の点、N は接線外の点。φ の係数は次数ごとに 1 次方程式を解いて決める。
    """
    grad = [poly_eval(F.diff(s), point) for s in Y_SYMS]
    if not any(grad):
        raise CubicReductionError(f"特異点で分岐は取れません: {point}")
    W = cross(grad, point)
    N = grad
    base = [_q(c) for c in point]
    w = [_q(c) for c in W]
    n = [_q(c) for c in N]

    phi = sympy.Integer(0)
    for k in range(2, order + 1):
        ck = sympy.Symbol("c")
        trial = phi + ck * EPS ** k
        Z = [b + EPS * wi + trial * ni for b, wi, ni in zip(base, w, n)]
        expr = sympy.expand(F.as_expr().subs(dict(zip(Y_SYMS, Z)), simultaneous=True))
        coeff = sympy.Poly(expr, EPS).coeff_monomial(EPS ** k)
        sol = sympy.solve(coeff, ck)
        if len(sol) != 1:
            raise CubicReductionError("局所分岐の係数が決まりません")
        phi = phi + sol[0] * EPS ** k
    return tuple(b + EPS * wi + phi * ni for b, wi, ni in zip(base, w, n))  # type: ignore[return-value]


def series_coeffs(form: sympy.Poly, branch: Sequence, order: int) -> List[sympy.Expr]:
    """form(Z(ε)) の ε^0..ε^order の係数"""
    expr = sympy.expand(form.as_expr().subs(dict(zip(Y_SYMS, branch)), simultaneous=True))
    poly = sympy.Poly(expr, EPS)
    return [poly.coeff_monomial(EPS ** k) for k in range(order + 1)]


def _limit(num: Sequence, den: Sequence) -> Fraction:
    v = next((k for k, c in enumerate(den) if c != 0), None)
    if v is None or any(c != 0 for c in num[:v]):
        raise CubicReductionError("級数の極限が有限になりません")
    return to_rat(num[v]) / to_rat(den[v])


# ===== Weierstrass 化 =====
@dataclass
class CubicReduction:
    gamma: sympy.Poly
    origin: Vec3
    tangent: Vec3 = field(init=False)
    third: Vec3 = field(init=False)  # E'
    flex: bool = field(init=False)
    line: Vec3 = field(init=False)  # L
    conic: sympy.Poly = field(init=False)  # q
    relation: Tuple[Fraction, ...] = field(init=False)  # c0..c6
    a_invariants: Tuple[Fraction, ...] = field(init=False)  # a1, a2, a3, a4, a6
    _scale: Tuple[Fraction, Fraction] = field(init=False, default=(Fraction(1), Fraction(1)))
    _third_value: Optional[Tuple[Fraction, Fraction]] = field(init=False, default=None)

    def __post_init__(self) -> None:
        O = self.origin
        if poly_eval(self.gamma, O) != 0:
            raise CubicReductionError("原点が曲線上にありません")

        # 1) 接線 T と 3 つ目の交点 E'
        self.tangent = tuple(primitive([poly_eval(self.gamma.diff(s), O) for s in Y_SYMS]))
        if not any(self.tangent):
            raise CubicReductionError("原点が特異点です")
        self.third = self._third_point()
        self.flex = proportional(self.third, O)

        # 2) E' を通る別の直線 L
        for r in range(3):
            e = [0, 0, 0]
            e[r] = 1
            cand = cross(self.third, e)
            if any(cand) and not proportional(cand, self.tangent):
                self.line = tuple(primitive(cand))
                break
        else:
            raise CubicReductionError("補助直線が取れません")

        # 3) 2 次曲線 q と関係式
        self.conic = self._find_conic()
        self.relation = self._find_relation()
        c0, c1, c2, c3, c4, c5, c6 = self.relation
        A, B, C, D, E, F, G = c5, c4, c2, -c6, -c3, -c1, -c0
        if A == 0 or D == 0:
            raise CubicReductionError("関係式が Weierstrass 形になりません")
        self._scale = (A * D, A * A * D)
        self.a_invariants = (B, E * A, C * A * D, F * A * A * D, G * A ** 3 * D * D)
        logger.debug(f"3 次曲線の Weierstrass 化: flex={self.flex}, a={self.a_invariants}")

    # --- 構成 ---
    def _third_point(self) -> Vec3:
        O = self.origin
        W = cross(self.tangent, O)
        s, u = sympy.symbols("s u")
        Z = [s * _q(o) + u * _q(w) for o, w in zip(O, W)]
        poly = sympy.Poly(sympy.expand(self.gamma.as_expr().subs(dict(zip(Y_SYMS, Z)), simultaneous=True)), s, u)
        k2 = to_rat(poly.coeff_monomial(s * u ** 2))
        k3 = to_rat(poly.coeff_monomial(u ** 3))
        if k2 == 0 and k3 == 0:
            raise CubicReductionError("接線が曲線に含まれています")
        return tuple(primitive([-k3 * to_rat(o) + k2 * w for o, w in zip(O, W)]))  # type: ignore[return-value]

    def _find_conic(self) -> sympy.Poly:
        cs = sympy.symbols("q0:6")
        generic = sum(c * Y_SYMS[0] ** i * Y_SYMS[1] ** j * Y_SYMS[2] ** k
                      for c, (i, j, k) in zip(cs, CONIC_MONOMIALS))
        eqs = []
        if self.flex:
            branch = local_branch(self.gamma, self.origin, 2)
            eqs += series_coeffs(sympy.Poly(generic, *Y_SYMS), branch, 2)
        else:
            eqs.append(generic.subs(dict(zip(Y_SYMS, map(_q, self.origin)))))
            branch = local_branch(self.gamma, self.third, 1)
            eqs += series_coeffs(sympy.Poly(generic, *Y_SYMS), branch, 1)
        matrix, _ = sympy.linear_eq_to_matrix([sympy.expand(e) for e in eqs], cs)
        basis = nullspace(matrix.tolist())

        T, L = _linear(self.tangent), _linear(self.line)
        known = [_conic_vector(T * L), _conic_vector(T * T)]
        for vec in basis:
            if rank(known + [list(vec)]) == 3:
                return _conic(vec)
        raise CubicReductionError("L(3O) の元が見つかりません")

    def _find_relation(self) -> Tuple[Fraction, ...]:
        T, L, q = _linear(self.tangent), _linear(self.line), self.conic
        products = [T ** 6, L * T ** 5, q * T ** 4, L ** 2 * T ** 4, L * q * T ** 3, q ** 2 * T ** 2, L ** 3 * T ** 3]
        gamma = self.gamma.as_expr()
        remainders = []
        for prod in products:
            _, rem = sympy.reduced(prod.as_expr(), [gamma], *Y_SYMS, domain="QQ")
            remainders.append(sympy.Poly(rem, *Y_SYMS, domain="QQ"))
        monomials = sorted({m for r in remainders for m in r.monoms()})
        rows = [[to_rat(r.coeff_monomial(m)) for r in remainders] for m in monomials]
        basis = nullspace(rows) if rows else [tuple([0] * 6 + [1])]
        if len(basis) != 1:
            raise CubicReductionError(f"関係式の次元が {len(basis)} です")
        return tuple(Fraction(c) for c in basis[0])

    # --- 写像 ---
    def _raw_at(self, Z: Sequence) -> Tuple[Fraction, Fraction]:
        tz = dot(self.tangent, Z)
        if tz != 0:
            return dot(self.line, Z) / tz, poly_eval(self.conic, Z) / (tz * tz)
        # T が消える O 以外の点は E'。分岐に沿った極限を取る
        if self._third_value is None:
            branch = local_branch(self.gamma, self.third, 3)
            tser = series_coeffs(_linear(self.tangent), branch, 3)
            lser = series_coeffs(_linear(self.line), branch, 3)
            qser = series_coeffs(self.conic, branch, 3)
            t2 = [sum(tser[i] * tser[k - i] for i in range(k + 1)) for k in range(4)]
            self._third_value = (_limit(lser, tser), _limit(qser, t2))
        return self._third_value

    def forward(self, Z: Sequence) -> Optional[Tuple[Fraction, Fraction]]:
        """Γ 上の点 → (X, Y)。原点 O は None（無限遠点）。"""
        if proportional(Z, self.origin):
            return None
        x, y = self._raw_at(Z)
        sx, sy = self._scale
        return sx * x, sy * y

    def inverse(self, X, Y) -> Vec3:
        """(X, Y) → Γ 上の点。E' を通る直線 L - xT と 2 次曲線 q - yT^2 の交点から候補を作る。"""
        sx, sy = self._scale
        x, y = to_rat(X) / sx, to_rat(Y) / sy
        lam = [l - x * t for l, t in zip(self.line, self.tangent)]
        E = self.third

        W = cross(lam, E)
        r = 0
        while not any(W) and r < 3:
            e = [0, 0, 0]
            e[r] = 1
            W = cross(lam, e)
            r += 1

        def K(U: Sequence) -> Fraction:
            t = dot(self.tangent, U)
            return poly_eval(self.conic, U) - y * t * t

        kb = (K([e + w for e, w in zip(E, W)]) - K(E) - K(W)) / 2
        candidates: List[Sequence] = [[-K(W) * e + 2 * kb * w for e, w in zip(E, W)], E]
        candidates += self._line_roots(E, W)

        for Z in candidates:
            if not any(Z) or poly_eval(self.gamma, Z) != 0:
                continue
            if self.forward(Z) == (to_rat(X), to_rat(Y)):
                return tuple(primitive(Z))  # type: ignore[return-value]
        raise CubicReductionError(f"逆写像の候補が見つかりません: ({X}, {Y})")

    def _line_roots(self, E: Sequence, W: Sequence) -> List[List[Fraction]]:
        """直線 sE + uW と Γ の、E 以外の有理交点"""
        s, u = sympy.symbols("s u")
        Z = [s * _q(e) + u * _q(w) for e, w in zip(E, W)]
        cubic = sympy.Poly(sympy.expand(self.gamma.as_expr().subs(dict(zip(Y_SYMS, Z)), simultaneous=True)), s, u)
        # u = 0（点 E）で割った残りの 2 次式
        q = BinaryQuadratic.of(
            cubic.coeff_monomial(s ** 2 * u),
            cubic.coeff_monomial(s * u ** 2),
            cubic.coeff_monomial(u ** 3),
        )
        if q.is_zero:
            return []
        try:
            factors = split_square_disc_quadratic(q)
        except NonSquareDiscriminant:
            return []
        out = []
        for form in factors:
            a, b = linear_root(form)
            out.append([a * to_rat(e) + b * to_rat(w) for e, w in zip(E, W)])
        return out
