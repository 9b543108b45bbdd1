# -*- coding: utf-8 -*-
"""
対角 4 次曲面の計算を CLI から呼ぶ入口。
- データ（JSON / JSON-lines / CSV）は stdout、ログと実行メタ情報は stderr とログファイル
- 例外は JSON {"error", "detail"} を stdout に出し、終了コードで区別する
    0 正常 / 2 入力不正（曲面・点・予算） / 3 点が曲面上にない / 4 点が Ω / 5 内部の不整合
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime
from typing import IO, List, Optional, Sequence, Tuple

from loguru import logger

from src.arith.exact import ArithmeticDomainError, ProjPoint, format_rat, to_rat
from src.common.logging_setup import setup_logger
from src.common.spec_parser import (
    InvocationError,
    UnknownSubcommand,
    normalize_spec,
    parse_point,
    parse_surface,
)
from src.curves.ellcurve import CurveError, fibre_to_weierstrass
from src.curves.torsion import OrderKind, TorsionError, certify_infinite_order, order_class
from src.filters.point_filter import load_orbit_config
from src.geometry.endo import EndoError, apply_endo
from src.geometry.fibration import (
    FibrationError,
    default_rulings,
    fibre_value,
    is_singular_fibre,
)
from src.geometry.forms import derive_validated_forms, reconcile_report
from src.geometry.surface import (
    NotOnSurface,
    OmegaPoint,
    Surface,
    SurfaceError,
    classify_point,
    contains,
    require_not_omega,
)
from src.orbit.engine import EmptyBudget, OrbitError, SeedInOmega, Strategy, UnknownPolicy, run_orbit
from src.orbit.histogram import NoRealPoints, density_histogram
from src.review.exporters import append_pruned, write_csv, write_jsonl

SUBCOMMANDS = (
    "check", "apply-e", "fibre", "torsion", "weierstrass",
    "orbit", "verify-props", "reconcile-forms",
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_ON_SURFACE = 3
EXIT_OMEGA = 4
EXIT_INTERNAL = 5


# ===== 入力 =====
@dataclass
class Invocation:
    subcommand: str
    surface: Surface
    point: ProjPoint
    fibration: Optional[int] = None
    max_nodes: Optional[int] = None
    max_digits: Optional[int] = None
    fmt: str = "jsonl"
    bins: Optional[int] = None
    chart: Optional[Tuple] = None
    use_forms: bool = False
    props: List[str] = field(default_factory=list)


class _Parser(argparse.ArgumentParser):
    """argparse の usage エラーを SystemExit ではなく例外で返す"""

    def error(self, message: str):
        raise InvocationError(message)


def _build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="quartic", description="対角 4 次曲面の自己準同型・ファイブレーション・有理点生成")
    ap.add_argument("subcommand", help=" | ".join(SUBCOMMANDS))
    ap.add_argument("--surface", required=True, help="係数 a,b,c,d（例: 1,1,-1,-1）")
    ap.add_argument("--point", required=True, help="点 x:y:z:w（例: 133:134:158:59）")
    ap.add_argument("--fibration", type=int, choices=(1, 2), help="ファイブレーション番号")
    ap.add_argument("--max-nodes", type=int, help="軌道の最大点数")
    ap.add_argument("--max-digits", type=int, help="高さの最大桁数")
    ap.add_argument("--format", dest="fmt", choices=("jsonl", "csv"), default="jsonl")
    ap.add_argument("--bins", type=int, help="ヒストグラムの分割数 n（n×n）")
    ap.add_argument("--chart", help="ヒストグラムの範囲 x0,x1,y0,y1")
    ap.add_argument("--use-forms", action="store_true", help="検証済みの多項式表示で e_i を評価する")
    ap.add_argument("--prop", action="append", default=[], help="verify-props で実行する命題（複数可）")
    return ap


def _parse_chart(text: Optional[str]):
    if text is None:
        return None
    parts = normalize_spec(text).split(",")
    try:
        chart = tuple(to_rat(p) for p in parts)
    except (ValueError, ZeroDivisionError) as e:
        raise InvocationError(f"--chart が不正です: {text!r}") from e
    if len(chart) != 4:
        raise InvocationError(f"--chart は 4 つの数です: {text!r}")
    return chart


_VALUE_OPTIONS = ("--surface", "--point", "--chart")


def _join_values(argv: List[str]) -> List[str]:
    """
    値が "-" で始まる指定（例: --surface -2,1,1,-2）を "--surface=-2,1,1,-2" にまとめる。
    argparse はそのままだとオプションと取り違える。
    """
    joined: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv):
            joined.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        joined.append(tok)
        i += 1
    return joined


def parse_invocation(argv: Sequence[str]) -> Invocation:
    """
    例: ["check", "--surface", "1,1,-1,-1", "--point", "133:134:158:59"] -> Invocation("check", ...)
    """
    argv = list(argv)
    if not argv or argv[0].startswith("-"):
        raise UnknownSubcommand("サブコマンドがありません")
    if argv[0] not in SUBCOMMANDS:
        raise UnknownSubcommand(f"未知のサブコマンドです: {argv[0]}")
    args = _build_parser().parse_args(_join_values(argv))

    # 1) 曲面 → 点の順に検証（不正な入力は計算に入れない）
    surface = parse_surface(args.surface)
    point = parse_point(args.point)

    # 2) 数値の範囲
    for name in ("max_nodes", "max_digits", "bins"):
        v = getattr(args, name)
        if v is not None and v < 1:
            raise InvocationError(f"--{name.replace('_', '-')} は 1 以上にしてください: {v}")
    from src.jobs.verify_props import PROPS
    unknown = [p for p in args.prop if p not in PROPS]
    if unknown:
        raise InvocationError(f"未知の命題です: {', '.join(unknown)}")

    return Invocation(
        subcommand=args.subcommand,
        surface=surface,
        point=point,
        fibration=args.fibration,
        max_nodes=args.max_nodes,
        max_digits=args.max_digits,
        fmt=args.fmt,
        bins=args.bins,
        chart=_parse_chart(args.chart),
        use_forms=args.use_forms,
        props=list(args.prop),
    )


# ===== 出力 =====
def _emit(obj, out: IO[str]) -> None:
    out.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n")


def _exit_code(e: Exception) -> int:
    if isinstance(e, (OmegaPoint, SeedInOmega)):
        return EXIT_OMEGA
    if isinstance(e, NotOnSurface):
        return EXIT_NOT_ON_SURFACE
    if isinstance(e, (InvocationError, SurfaceError, EmptyBudget, UnknownPolicy, NoRealPoints)):
        return EXIT_INVALID
    return EXIT_INTERNAL


# ===== サブコマンド =====
def _forms_for(inv: Invocation, R):
    if not inv.use_forms:
        return None
    from src.jobs.verify_props import sample_points
    return derive_validated_forms(inv.surface, R, sample_points(inv.surface, R, inv.point))


def _cmd_check(inv: Invocation, out: IO[str]) -> int:
    S, P = inv.surface, inv.point
    on = contains(S, P)
    row = {"surface": str(S), "point": str(P), "on_surface": on}
    if on:
        cls = classify_point(S, P)
        row.update({"class": cls.kind.value, "pairings": list(cls.pairings)})
    _emit(row, out)
    return EXIT_OK if on else EXIT_NOT_ON_SURFACE


def _cmd_apply_e(inv: Invocation, out: IO[str]) -> int:
    S, P = inv.surface, inv.point
    require_not_omega(S, P)
    R = default_rulings(S, P)
    forms = _forms_for(inv, R)
    _emit({"surface": str(S), "point": str(P),
           "e1": str(apply_endo(S, R, 1, P, forms)),
           "e2": str(apply_endo(S, R, 2, P, forms))}, out)
    return EXIT_OK


def _cmd_fibre(inv: Invocation, out: IO[str]) -> int:
    S, P = inv.surface, inv.point
    require_not_omega(S, P)
    R = default_rulings(S, P)
    row = {"surface": str(S), "point": str(P)}
    for i in (1, 2):
        fid = fibre_value(S, R, i, P)
        row[f"f{i}"] = str(fid)
        row[f"f{i}_singular"] = is_singular_fibre(S, R, i, fid)
    _emit(row, out)
    return EXIT_OK


def _cmd_torsion(inv: Invocation, out: IO[str]) -> int:
    S, P = inv.surface, inv.point
    require_not_omega(S, P)
    R = default_rulings(S, P)
    forms = _forms_for(inv, R)
    row = {"surface": str(S), "point": str(P)}
    for i in (inv.fibration,) if inv.fibration else (1, 2):
        oc = order_class(S, R, i, P, forms)
        entry = oc.to_json()
        if oc.kind is OrderKind.INFINITE:
            entry["certificate"] = certify_infinite_order(S, R, i, P, forms)
        row[f"f{i}"] = entry
    _emit(row, out)
    return EXIT_OK


def _cmd_weierstrass(inv: Invocation, out: IO[str]) -> int:
    S, P = inv.surface, inv.point
    require_not_omega(S, P)
    R = default_rulings(S, P)
    i = inv.fibration or 1
    E, cmap = fibre_to_weierstrass(S, R, i, P)
    _emit({"surface": str(S), "point": str(P), "fibration": i,
           "fibre": str(fibre_value(S, R, i, P)),
           "curve": E.to_json(),
           "discriminant": format_rat(E.discriminant),
           "exceptions": [str(X) for X in cmap.exceptions]}, out)
    return EXIT_OK


def _cmd_orbit(inv: Invocation, out: IO[str]) -> int:
    from src.config import ORBIT_CONFIG_PATH, ORBIT_THREADS, path_for_pruned, require_ready

    require_ready()
    S, P = inv.surface, inv.point
    config = load_orbit_config(ORBIT_CONFIG_PATH)
    strat = Strategy.from_config(config, max_nodes=inv.max_nodes, max_height_digits=inv.max_digits)
    R = default_rulings(S, P)
    forms = _forms_for(inv, R)
    run = run_orbit(S, R, P, strat, forms, threads=ORBIT_THREADS, config=config)

    # 1) データ本体（stdout）
    if inv.fmt == "csv":
        write_csv(run.nodes, out)
    else:
        write_jsonl(run.nodes, out)

    # 2) 実行メタ情報（stderr / ログ）
    report = run.report()
    bins = inv.bins or (config.get("histogram", {}) or {}).get("bins")
    if inv.bins or inv.chart:
        report["histogram"] = density_histogram(S, run.nodes, inv.chart, int(bins or 10)).to_json()
    if run.pruned:
        path = append_pruned(run.pruned, path_for_pruned(str(S), datetime.now().strftime("%Y%m%d")))
        report["pruned_ledger"] = str(path)
    logger.info(f"軌道レポート: {json.dumps(report, ensure_ascii=False)}")
    _emit(report, sys.stderr)
    return EXIT_OK


def _cmd_verify_props(inv: Invocation, out: IO[str]) -> int:
    from src.jobs.verify_props import run_suite

    S, P = inv.surface, inv.point
    require_not_omega(S, P)
    R = default_rulings(S, P)
    results = run_suite(S, R, P, inv.props or None)
    for res in results:
        _emit(res.to_json(), out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_INTERNAL


def _cmd_reconcile_forms(inv: Invocation, out: IO[str]) -> int:
    from src.jobs.verify_props import sample_points

    S, P = inv.surface, inv.point
    require_not_omega(S, P)
    R = default_rulings(S, P)
    _emit(reconcile_report(S, R, sample_points(S, R, P)), out)
    return EXIT_OK


COMMANDS = {
    "check": _cmd_check,
    "apply-e": _cmd_apply_e,
    "fibre": _cmd_fibre,
    "torsion": _cmd_torsion,
    "weierstrass": _cmd_weierstrass,
    "orbit": _cmd_orbit,
    "verify-props": _cmd_verify_props,
    "reconcile-forms": _cmd_reconcile_forms,
}


def dispatch(inv: Invocation, out: Optional[IO[str]] = None) -> int:
    out = out or sys.stdout
    try:
        return COMMANDS[inv.subcommand](inv, out)
    except (SurfaceError, OrbitError, EndoError, FibrationError, CurveError,
            TorsionError, ArithmeticDomainError, InvocationError,
            ValueError, ArithmeticError) as e:
        code = _exit_code(e)
        log = logger.warning if code != EXIT_INTERNAL else logger.error
        log(f"{inv.subcommand} 失敗: {type(e).__name__}: {e}")
        _emit({"error": type(e).__name__, "detail": str(e)}, out)
        return code


def run(argv: Optional[Sequence[str]] = None, out: Optional[IO[str]] = None) -> int:
    from src.config import LOG_DIR

    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    sub = argv[0] if argv and argv[0] in SUBCOMMANDS else "cli"
    setup_logger(LOG_DIR / f"{sub}_{datetime.now().strftime('%Y%m%d')}.log")
    try:
        inv = parse_invocation(argv)
    except InvocationError as e:
        _emit({"error": type(e).__name__, "detail": str(e)}, out)
        return EXIT_INVALID
    return dispatch(inv, out)


if __name__ == "__main__":
    raise SystemExit(run())
