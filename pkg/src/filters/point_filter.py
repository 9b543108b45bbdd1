# src/filters/point_filter.py
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

import yaml
from loguru import logger

from src.arith.exact import ProjPoint, digits, height
from src.geometry.fibration import RulingPair, is_singular_fibre
from src.geometry.surface import PointKind, Surface, classify_point, contains


BASE_DIR = Path(__file__).resolve().parents[2]


# ===== 設定読み込み =====
def load_orbit_config(path: Optional[Path] = None) -> Dict:
    if path is None:
        path = BASE_DIR / "config" / "orbit.yml"
    with path.open("r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


# ===== 判定結果 =====
@dataclass
class AdmissionResult:
    pass_through: bool  # 軌道に加えるなら True
    reason: Optional[str] = None  # "off_surface" | "omega" | "height" | "singular_fibre" | None
    detail: Optional[str] = None
    singular: tuple = ()  # 特異ファイバーに乗っているファイブレーション番号


# ===== メイン判定 =====
def admit_point(S: Surface, R: RulingPair, P: ProjPoint, max_digits: int, config: Dict) -> AdmissionResult:
    """
    処理順序:
      1) 曲面上か（外れたら内部エラー扱いで除外）
      2) Ω の点（自己準同型が定義されない）
      3) 高さの桁数予算
      4) 特異ファイバーの記録（除外はしない。設定で除外も可）
    """
    admission = (config.get("admission", {}) or {})
    skip_singular = bool(admission.get("skip_singular_fibres", False))

    # 1) 曲面の式
    if not contains(S, P):
        logger.warning(f"除外: off_surface ({P})")
        return AdmissionResult(False, reason="off_surface", detail=str(P))

    # 2) Ω
    if classify_point(S, P).kind is PointKind.OMEGA:
        logger.debug(f"除外: omega ({P})")
        return AdmissionResult(False, reason="omega", detail=str(P))

    # 3) 桁数
    n = digits(height(P))
    if n > max_digits:
        logger.debug(f"除外: height ({n} 桁 > {max_digits})")
        return AdmissionResult(False, reason="height", detail=str(n))

    # 4) 特異ファイバー
    singular = tuple(i for i in (1, 2) if is_singular_fibre(S, R, i, P))
    if singular and skip_singular:
        return AdmissionResult(False, reason="singular_fibre", detail=",".join(map(str, singular)),
                               singular=singular)
    return AdmissionResult(True, singular=singular)
