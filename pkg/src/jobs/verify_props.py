# src/jobs/verify_props.py
"""
命題ごとの性質検査（`verify-props` サブコマンドの本体）。

標本点は種からの小さな軌道で作る。楕円曲線を使う検査は
Weierstrass 化が重いので、高さの小さい順に elliptic_samples 点だけ見る。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from loguru import logger

from src.arith.exact import ProjPoint, deflate_triple_root, digits, height, NotTripleRoot
from src.curves.ellcurve import (
    CurveError,
    EllPoint,
    bounded_torsion_order,
    fibre_to_weierstrass,
    iterate_coefficients,
    multiply,
)
from src.curves.torsion import ORDER_OF, OrderKind, fourtorsion_candidates, order_class
from src.geometry.endo import EndoError, EndoPair, node_directions, restricted_quartic, richmond_pair
from src.geometry.fibration import (
    STANDARD_COEFFS,
    RulingPair,
    build_rulings,
    fibre_value,
    is_singular_fibre,
    tau_square,
)
from src.geometry.forms import AllVariantsVanish, eval_printed_forms
from src.geometry.surface import (
    ALL_PERMUTATIONS,
    ALL_SIGN_AUTS,
    PAIR_FLIPS,
    SINGLE_FLIPS,
    PointKind,
    Surface,
    apply_sign_aut,
    classify_point,
    contains,
    permutation_parity,
    permute_point,
    permute_surface,
)
from src.orbit.engine import Strategy, generate_orbit


@dataclass
class PropResult:
    name: str
    passed: bool = True
    checked: int = 0
    skipped: int = 0
    failures: List[str] = field(default_factory=list)

    def fail(self, msg: str) -> None:
        self.passed = False
        if len(self.failures) < 5:
            self.failures.append(msg)

    def to_json(self) -> dict:
        return {"prop": self.name, "status": "PASS" if self.passed else "FAIL",
                "checked": self.checked, "skipped": self.skipped, "failures": self.failures}


@dataclass
class PropContext:
    surface: Surface
    rulings: RulingPair
    samples: List[ProjPoint]
    elliptic_samples: int = 4
    deep_iterate_digits: int = 6
    _pairs: Dict[ProjPoint, EndoPair] = field(default_factory=dict)
    _models: Dict[Tuple[int, ProjPoint], object] = field(default_factory=dict)

    def pair(self, P: ProjPoint) -> EndoPair:
        if P not in self._pairs:
            self._pairs[P] = richmond_pair(self.surface, self.rulings, P)
        return self._pairs[P]

    def model(self, i: int, P: ProjPoint):
        """(E, CurveMap)。失敗したら None（検査側で skipped に数える）"""
        key = (i, P)
        if key not in self._models:
            try:
                self._models[key] = fibre_to_weierstrass(self.surface, self.rulings, i, P)
            except CurveError as e:
                logger.debug(f"Weierstrass 化を飛ばします: f_{i}, ({P}) {e}")
                self._models[key] = None
        return self._models[key]

    def elliptic_points(self, i: int) -> List[ProjPoint]:
        """全座標が非ゼロで C_i が非特異な標本。ファイバーの異なる点を先に取る（各々高さ順）"""
        fresh, repeated, fibres = [], [], set()
        for P in self.samples:
            if P.zero_count:
                continue
            fid = fibre_value(self.surface, self.rulings, i, P)
            if is_singular_fibre(self.surface, self.rulings, i, fid):
                continue
            (repeated if fid in fibres else fresh).append(P)
            fibres.add(fid)
        return (fresh + repeated)[: self.elliptic_samples]


def _psi(ctx: PropContext, i: int, P: ProjPoint, X: ProjPoint) -> Optional[Tuple[object, EllPoint]]:
    m = ctx.model(i, P)
    if m is None:
        return None
    E, cmap = m
    try:
        return E, cmap.forward(X)
    except CurveError:
        return None


# ===== 各命題 =====
def check_zerofix(ctx: PropContext) -> PropResult:
    res = PropResult("zerofix")
    for P in ctx.samples:
        pair = ctx.pair(P)
        fixed = pair.e1 == P or pair.e2 == P
        both = pair.e1 == P and pair.e2 == P
        res.checked += 1
        if (P.zero_count == 1) != fixed or fixed != both:
            res.fail(f"({P}): e1={pair.e1}, e2={pair.e2}")
    return res


def check_onlines(ctx: PropContext) -> PropResult:
    res = PropResult("onlines")
    S = ctx.surface
    for P in ctx.samples:
        if classify_point(S, P).kind is not PointKind.ON_LINE:
            continue
        res.checked += 1
        pair = ctx.pair(P)
        flips = {apply_sign_aut(s, P) for s in PAIR_FLIPS}
        hit = [k for k in (1, 2) if pair.get(k) in flips]
        if not hit:
            res.fail(f"({P}): どちらの像も σ_uv(P) ではありません")
            continue
        for k in (1, 2):
            if k not in hit and classify_point(S, pair.get(k)).kind is not PointKind.ON_LINE:
                res.fail(f"({P}): e{k}(P)={pair.get(k)} が直線上にありません")
    return res


def check_sigmacomm(ctx: PropContext) -> PropResult:
    res = PropResult("sigmacomm")
    for P in ctx.samples:
        pair = ctx.pair(P)
        for sigma in ALL_SIGN_AUTS:
            Q = apply_sign_aut(sigma, P)
            img = ctx.pair(Q)
            res.checked += 1
            if img.e1 != apply_sign_aut(sigma, pair.e1) or img.e2 != apply_sign_aut(sigma, pair.e2):
                res.fail(f"({P}), {sigma}")
    return res


def check_permute(ctx: PropContext) -> PropResult:
    """
    π e^ε = e^{±ε} π（奇置換で N の符号が入れ替わる）を既知の閉じた式で、
    像の組 {e_1, e_2} の一致を幾何的構成で確かめる。
    """
    res = PropResult("permute")
    S = ctx.surface
    points = [P for P in ctx.samples if P.zero_count == 0][:2]
    for perm in ALL_PERMUTATIONS:
        S2 = permute_surface(S, perm)
        parity = permutation_parity(perm)
        for P in points:
            P2 = permute_point(P, perm)
            res.checked += 1
            pair = ctx.pair(P)
            R2 = build_rulings(S2, tau_square(P2))
            pair2 = richmond_pair(S2, R2, P2)
            if {pair2.e1, pair2.e2} != {permute_point(pair.e1, perm), permute_point(pair.e2, perm)}:
                res.fail(f"({P}), π={perm}: 像の組が一致しません")
            for sign in (1, -1):
                try:
                    lhs = eval_printed_forms(S2, sign * parity, P2)
                    rhs = permute_point(eval_printed_forms(S, sign, P), perm)
                except AllVariantsVanish:
                    res.skipped += 1
                    continue
                if lhs != rhs:
                    res.fail(f"({P}), π={perm}, N の符号 {sign:+d}: {lhs} != {rhs}")
    return res


def check_essence(ctx: PropContext) -> PropResult:
    """
    結節の接線が A = {Σ a p^2 x^2 = 0} に含まれ、制限 4 次式が P で 3 重根を持つこと。
    あわせて e_i のファイバー保存と e_i(U) ⊂ U も見る。
    """
    res = PropResult("essence-tangent-in-A")
    S, R = ctx.surface, ctx.rulings
    for P in ctx.samples:
        if P.zero_count:
            continue
        res.checked += 1
        weights = [c * p * p for c, p in zip(S.coeffs, P.coords)]
        for D in node_directions(S, P):
            terms = (
                sum(w * p * p for w, p in zip(weights, P.coords)),
                sum(w * p * d for w, p, d in zip(weights, P.coords, D)),
                sum(w * d * d for w, d in zip(weights, D)),
            )
            if any(terms):
                res.fail(f"({P}): 接線 {D} が A に含まれません")
            q = restricted_quartic(S, P, D)
            if not q.is_zero:
                try:
                    deflate_triple_root(q, (1, 0))
                except NotTripleRoot:
                    res.fail(f"({P}): 接線 {D} で 3 重根になりません")
        pair = ctx.pair(P)
        for i in (1, 2):
            e = pair.get(i)
            if not contains(S, e) or classify_point(S, e).kind is PointKind.OMEGA:
                res.fail(f"({P}): e{i}(P)={e} が U の外です")
            elif fibre_value(S, R, i, e) != fibre_value(S, R, i, P):
                res.fail(f"({P}): e{i} がファイバーを保存しません")
    return res


def check_esquared(ctx: PropContext) -> PropResult:
    """ψ(e_i^n(P)) = a_n ψ(e_i(P))（n = 2, 3）"""
    res = PropResult("esquared")
    coeffs = iterate_coefficients(3)
    for i in (1, 2):
        for P in ctx.elliptic_points(i):
            # 3 回目の反復は高さの小さい標本だけ
            depth = 3 if digits(height(P)) <= ctx.deep_iterate_digits else 2
            chain = [ctx.pair(P).get(i)]
            while len(chain) < depth:
                chain.append(ctx.pair(chain[-1]).get(i))
            base = _psi(ctx, i, P, chain[0])
            if base is None:
                res.skipped += 1
                continue
            E, Q = base
            for n, X in enumerate(chain[1:], start=2):
                b = _psi(ctx, i, P, X)
                if b is None:
                    res.skipped += 1
                    continue
                res.checked += 1
                if b[1] != multiply(E, coeffs[n - 1], Q):
                    res.fail(f"f_{i}, ({P}): ψ(e^{n} P) != {coeffs[n - 1]}ψ(e P)")
    return res


def check_phipistwo(ctx: PropContext) -> PropResult:
    res = PropResult("phipistwo")
    for i in (1, 2):
        for P in ctx.elliptic_points(i):
            a = _psi(ctx, i, P, ctx.pair(P).get(i))
            if a is None:
                res.skipped += 1
                continue
            E, Q = a
            for sigma in SINGLE_FLIPS:
                b = _psi(ctx, i, P, apply_sign_aut(sigma, P))
                if b is None:
                    res.skipped += 1
                    continue
                res.checked += 1
                if multiply(E, 2, b[1]) != Q:
                    res.fail(f"f_{i}, ({P}), {sigma}: ψ(e P) != 2ψ(σ_u P)")
    return res


def check_twotorsion(ctx: PropContext) -> PropResult:
    res = PropResult("twotorsion")
    for i in (1, 2):
        for P in ctx.elliptic_points(i):
            images = []
            for sigma in PAIR_FLIPS:
                b = _psi(ctx, i, P, apply_sign_aut(sigma, P))
                if b is None:
                    break
                images.append(b)
            if len(images) < 3:
                res.skipped += 1
                continue
            res.checked += 1
            orders = [bounded_torsion_order(E, T) for E, T in images]
            if orders != [2, 2, 2] or len({T for _, T in images}) != 3:
                res.fail(f"f_{i}, ({P}): 位数 {orders}")
    return res


def check_fourtorsion(ctx: PropContext) -> PropResult:
    res = PropResult("fourtorsion-rational")
    S, R = ctx.surface, ctx.rulings
    if tuple(S.coeffs) != STANDARD_COEFFS:
        return res
    for i in (1, 2):
        for P in ctx.elliptic_points(i):
            for T in fourtorsion_candidates(S, R, i, P):
                b = _psi(ctx, i, P, T)
                if b is None:
                    res.skipped += 1
                    continue
                res.checked += 1
                order = bounded_torsion_order(*b)
                if order != 4:
                    res.fail(f"f_{i}, ({P}), ({T}): 位数 {order}")
    return res


def check_ordtwo(ctx: PropContext) -> PropResult:
    res = PropResult("ordtwo")
    S, R = ctx.surface, ctx.rulings
    for i in (1, 2):
        for P in ctx.samples:
            oc = order_class(S, R, i, P)
            if oc.kind in (OrderKind.UNDEFINED_SINGULAR_FIBRE, OrderKind.ONE):
                continue
            res.checked += 1
            on_line = classify_point(S, P).kind is PointKind.ON_LINE
            if (oc.kind is OrderKind.TWO) != on_line:
                res.fail(f"f_{i}, ({P}): 判定 {oc.kind.value}, 直線上 {on_line}")
    return res


def check_orderthree(ctx: PropContext) -> PropResult:
    res = PropResult("orderthree")
    for i in (1, 2):
        for P in ctx.elliptic_points(i):
            e1 = ctx.pair(P).get(i)
            a = _psi(ctx, i, P, e1)
            if a is None:
                res.skipped += 1
                continue
            res.checked += 1
            divides_three = bounded_torsion_order(*a) in (1, 3)
            if divides_three != (ctx.pair(e1).get(i) == e1):
                res.fail(f"f_{i}, ({P})")
    return res


def check_atmostfour(ctx: PropContext) -> PropResult:
    res = PropResult("atmostfour-agreement")
    S, R = ctx.surface, ctx.rulings
    for i in (1, 2):
        for P in ctx.elliptic_points(i):
            oc = order_class(S, R, i, P)
            a = _psi(ctx, i, P, ctx.pair(P).get(i))
            if a is None:
                res.skipped += 1
                continue
            res.checked += 1
            order = bounded_torsion_order(*a)
            if order is not None and order > 4:
                res.fail(f"f_{i}, ({P}): 位数 {order}")
            elif ORDER_OF[oc.kind] != order:
                res.fail(f"f_{i}, ({P}): 判定 {oc.kind.value}, 曲線上 {order}")
    return res


PROPS: Dict[str, Callable[[PropContext], PropResult]] = {
    "zerofix": check_zerofix,
    "onlines": check_onlines,
    "sigmacomm": check_sigmacomm,
    "permute": check_permute,
    "essence-tangent-in-A": check_essence,
    "esquared": check_esquared,
    "phipistwo": check_phipistwo,
    "twotorsion": check_twotorsion,
    "fourtorsion-rational": check_fourtorsion,
    "ordtwo": check_ordtwo,
    "orderthree": check_orderthree,
    "atmostfour-agreement": check_atmostfour,
}


def sample_points(S: Surface, R: RulingPair, seed: ProjPoint, count: int = 16, max_digits: int = 60) -> List[ProjPoint]:
    """種からの小さな軌道（高さ順）"""
    strat = Strategy(max_nodes=count, max_height_digits=max_digits)
    return [n.point for n in generate_orbit(S, R, seed, strat)]


def run_suite(S: Surface, R: RulingPair, seed: ProjPoint, names: Optional[List[str]] = None,
              count: int = 16, max_digits: int = 60, elliptic_samples: int = 4) -> List[PropResult]:
    ctx = PropContext(S, R, sample_points(S, R, seed, count, max_digits), elliptic_samples)
    out = []
    for name in names or list(PROPS):
        try:
            res = PROPS[name](ctx)
        except EndoError as e:
            res = PropResult(name)
            res.fail(f"{type(e).__name__}: {e}")
        logger.info(f"{name}: {'PASS' if res.passed else 'FAIL'} ({res.checked} 件)")
        out.append(res)
    return out
