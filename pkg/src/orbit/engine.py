# src/orbit/engine.py
"""
種の有理点から {e_1, e_2, 符号自己同型} で閉じた点列を作る。

- 候補は (高さ, 座標) の小さい順に受け入れる
- σ-閉包は受け入れ時にまとめて入れる（高さは変わらない）
- e_1, e_2 の展開は固定サイズのバッチ単位でスレッドに配る
  （バッチの中身はスレッド数によらないので出力は実行順序に依存しない）
"""
from __future__ import annotations

import heapq
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

from loguru import logger

from src.arith.exact import ProjPoint, digits, height
from src.filters.point_filter import admit_point
from src.geometry.endo import EndoError, apply_endo
from src.geometry.fibration import FibreId, RulingPair, fibre_value
from src.geometry.surface import (
    PointKind,
    Surface,
    apply_sign_aut,
    classify_point,
    require_on_surface,
    ALL_SIGN_AUTS,
)

if TYPE_CHECKING:
    from src.geometry.forms import EndoForms

Coords = Tuple[int, int, int, int]

DEFAULT_BATCH = 8
POLICIES = ("lowest-height-first",)


# ===== 例外 =====
class OrbitError(ValueError):
    """orbit モジュールの基底例外"""


class SeedInOmega(OrbitError):
    pass


class EmptyBudget(OrbitError):
    pass


class UnknownPolicy(OrbitError):
    pass


# ===== 型 =====
@dataclass(frozen=True)
class OrbitNode:
    id: int
    point: ProjPoint
    op: str  # "seed" | "e1" | "e2" | "sigma_<subset>"
    parent: Optional[int]
    height_digits: int
    f1: FibreId
    f2: FibreId

    def to_row(self) -> dict:
        return {
            "id": self.id,
            "coords": [str(c) for c in self.point.coords],
            "op": self.op,
            "parent": self.parent,
            "height_digits": self.height_digits,
            "f1": str(self.f1),
            "f2": str(self.f2),
        }


@dataclass(frozen=True)
class Strategy:
    max_nodes: int = 200
    max_height_digits: int = 2000
    sign_closure: bool = True
    use_endomorphisms: bool = True  # False なら σ-閉包だけ
    policy: str = "lowest-height-first"
    batch_size: int = DEFAULT_BATCH

    @classmethod
    def from_config(cls, config: Dict, **overrides) -> "Strategy":
        """config/orbit.yml の strategy 節を読み、None でない引数で上書きする"""
        base = dict((config.get("strategy", {}) or {}))
        base.update({k: v for k, v in overrides.items() if v is not None})
        known = {k: base[k] for k in cls.__dataclass_fields__ if k in base}
        return cls(**known)


@dataclass
class OrbitRun:
    nodes: List[OrbitNode]
    pruned: List[dict] = field(default_factory=list)
    singular: Dict[int, int] = field(default_factory=lambda: {1: 0, 2: 0})
    rejected: Dict[str, int] = field(default_factory=dict)
    expanded: int = 0

    def report(self) -> dict:
        return {
            "nodes": len(self.nodes),
            "expanded": self.expanded,
            "pruned": len(self.pruned),
            "singular_fibre_nodes": {f"f{i}": n for i, n in sorted(self.singular.items())},
            "rejected": dict(sorted(self.rejected.items())),
            "fibre_spread": {"f1": fibre_spread(self.nodes, 1), "f2": fibre_spread(self.nodes, 2)},
        }


@dataclass
class _Accepted:
    point: ProjPoint
    op: str
    parent: Optional[Coords]


# ===== 展開 =====
def _expand(S: Surface, R: RulingPair, P: ProjPoint, forms) -> List[Tuple[str, Optional[ProjPoint], str]]:
    out = []
    for i in (1, 2):
        try:
            out.append((f"e{i}", apply_endo(S, R, i, P, forms), ""))
        except EndoError as e:
            out.append((f"e{i}", None, type(e).__name__))
    return out


def _check_budget(seed: ProjPoint, strat: Strategy) -> None:
    if strat.policy not in POLICIES:
        raise UnknownPolicy(f"展開方針 {strat.policy!r} は未対応です（対応: {', '.join(POLICIES)}）")
    if strat.max_nodes < 1:
        raise EmptyBudget(f"max_nodes は 1 以上にしてください: {strat.max_nodes}")
    if strat.batch_size < 1:
        raise EmptyBudget(f"batch_size は 1 以上にしてください: {strat.batch_size}")
    need = digits(height(seed))
    if strat.max_height_digits < need:
        raise EmptyBudget(f"max_height_digits={strat.max_height_digits} が種の桁数 {need} 未満です")


# ===== 公開操作 =====
def run_orbit(S: Surface, R: RulingPair, seed: ProjPoint, strat: Strategy,
              forms: Optional["EndoForms"] = None, threads: int = 1,
              config: Optional[Dict] = None) -> OrbitRun:
    """generate_orbit の本体。除外・特異ファイバーの記録も返す。"""
    require_on_surface(S, seed)
    if classify_point(S, seed).kind is PointKind.OMEGA:
        raise SeedInOmega(f"種 ({seed}) は Ω の点です")
    _check_budget(seed, strat)
    config = config or {}
    run = OrbitRun(nodes=[])

    accepted: Dict[Coords, _Accepted] = {}
    seen: set = set()
    # (高さ, 座標, op, 親の座標)
    candidates: List[tuple] = [(height(seed), seed.coords, "seed", ())]
    pending: List[tuple] = []  # (高さ, 座標)

    def accept_one() -> None:
        h, coords, op, parent = heapq.heappop(candidates)
        if coords in seen:
            return
        seen.add(coords)
        P = ProjPoint(coords)
        verdict = admit_point(S, R, P, strat.max_height_digits, config)
        if not verdict.pass_through:
            if verdict.reason == "height":
                run.pruned.append({"coords": [str(c) for c in coords], "op": op,
                                   "parent": ":".join(map(str, parent)) if parent else None,
                                   "height_digits": digits(h)})
            else:
                run.rejected[verdict.reason] = run.rejected.get(verdict.reason, 0) + 1
            return
        for i in verdict.singular:
            run.singular[i] += 1
        accepted[coords] = _Accepted(P, op, parent or None)
        is_sigma = op.startswith("sigma_")
        if strat.use_endomorphisms and not (strat.sign_closure and is_sigma):
            heapq.heappush(pending, (h, coords))
        if strat.sign_closure and not is_sigma:
            for sigma in ALL_SIGN_AUTS:
                if sigma.subset:
                    Q = apply_sign_aut(sigma, P)
                    if Q.coords not in seen:
                        heapq.heappush(candidates, (h, Q.coords, str(sigma), coords))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        while len(accepted) < strat.max_nodes and (candidates or pending):
            if pending and (not candidates or pending[0][0] <= candidates[0][0]):
                batch = [heapq.heappop(pending) for _ in range(min(strat.batch_size, len(pending)))]
                results = pool.map(lambda item: _expand(S, R, ProjPoint(item[1]), forms), batch)
                for (_h, coords), children in zip(batch, results):
                    run.expanded += 1
                    for op, Q, err in children:
                        if Q is None:
                            run.rejected[err] = run.rejected.get(err, 0) + 1
                            logger.warning(f"{op} を計算できません: ({ProjPoint(coords)}) {err}")
                            continue
                        if Q.coords not in seen:
                            heapq.heappush(candidates, (height(Q), Q.coords, op, coords))
            else:
                accept_one()

    # 出力順は (高さ, 座標) で固定し、id を振り直す
    order = sorted(accepted, key=lambda c: accepted[c].point.sort_key())
    ids = {c: k for k, c in enumerate(order)}
    for c in order:
        rec = accepted[c]
        run.nodes.append(OrbitNode(
            id=ids[c],
            point=rec.point,
            op=rec.op,
            parent=None if rec.parent is None else ids.get(rec.parent),
            height_digits=digits(height(rec.point)),
            f1=fibre_value(S, R, 1, rec.point),
            f2=fibre_value(S, R, 2, rec.point),
        ))
    logger.info(f"軌道生成: V_{{{S}}}, 種 ({seed}), {strat.policy}, {len(run.nodes)} 点, 枝刈り {len(run.pruned)} 件")
    return run


def generate_orbit(S: Surface, R: RulingPair, seed: ProjPoint, strat: Strategy,
                   forms: Optional["EndoForms"] = None, threads: int = 1) -> List[OrbitNode]:
    """
    例: V_{1,1,-1,-1}, 種 (1:1:1:1), σ-閉包のみ -> (1:±1:±1:±1) の 8 点
    """
    return run_orbit(S, R, seed, strat, forms, threads).nodes


def fibre_spread(nodes, i: int) -> int:
    """{f_i(P)} の個数"""
    if i not in (1, 2):
        raise ValueError(f"ファイブレーション番号は 1 か 2 です: {i}")
    return len({n.f1 if i == 1 else n.f2 for n in nodes})
