from __future__ import annotations

import os
from pathlib import Path
from typing import Optional
from dotenv import load_dotenv

# 1) .env を読み込む（プロジェクト直下を優先）
load_dotenv()

BASE_DIR: Path = Path(__file__).resolve().parents[1]

def _env(key: str, default: Optional[str] = None) -> str:
    """環境変数を取得。既定値もなく未設定なら即エラーで止める。"""
    v = os.getenv(key, default)
    if v is None or str(v).strip() == "":
        raise RuntimeError(f"Missing env: {key}")
    return v.strip()

# 2) パス設定（データ格納場所）
DATA_ROOT: Path = Path(_env("DATA_ROOT", "./data")).resolve()
LOG_DIR: Path = DATA_ROOT / "logs"
EXPORT_DIR: Path = DATA_ROOT / "exports"
ORBIT_CONFIG_PATH: Path = Path(_env("ORBIT_CONFIG_PATH", str(BASE_DIR / "config" / "orbit.yml"))).resolve()

# 3) 並列度（軌道生成の展開スレッド数）
ORBIT_THREADS: int = int(_env("QUARTIC_ORBIT_THREADS", "1"))

# 4) 保存先ディレクトリの自動作成（初回でも落ちないように）
for d in (DATA_ROOT, LOG_DIR, EXPORT_DIR):
    d.mkdir(parents=True, exist_ok=True)

# 5) 便利ヘルパ
def path_for_pruned(surface_label: str, stamp: str) -> Path:
    """
    例: path_for_pruned("1,1,-1,-1", "20261017") -> data/exports/pruned_1_1_-1_-1_20261017.csv
    """
    safe = "".join(c if c.isalnum() or c in ("-", "_") else "_" for c in surface_label)
    return EXPORT_DIR / f"pruned_{safe}_{stamp}.csv"

def require_ready() -> None:
    """
    実行前の恒久チェック（ジョブ冒頭で呼ぶ想定）。
    - ディレクトリ存在確認
    - 設定ファイルの存在
    - スレッド数の範囲
    """
    if not LOG_DIR.exists():
        raise RuntimeError(f"{LOG_DIR} がありません")
    if not EXPORT_DIR.exists():
        raise RuntimeError(f"{EXPORT_DIR} がありません")
    if not ORBIT_CONFIG_PATH.exists():
        raise RuntimeError(f"{ORBIT_CONFIG_PATH} がありません")
    if ORBIT_THREADS < 1:
        raise RuntimeError(f"QUARTIC_ORBIT_THREADS は 1 以上にしてください: {ORBIT_THREADS}")
