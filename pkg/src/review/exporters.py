# src/review/exporters.py
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import IO, Iterable, List

from src.orbit.engine import OrbitNode

COLUMNS = ["id", "coords", "op", "parent", "height_digits", "f1", "f2"]
PRUNED_COLUMNS = ["coords", "op", "parent", "height_digits"]


def _csv_value(key: str, value) -> str:
    if key == "coords":
        return ":".join(value)
    return "" if value is None else str(value)


def write_jsonl(nodes: Iterable[OrbitNode], stream: IO[str]) -> int:
    """1 行 1 点。数値は全て 10 進文字列（id / parent / height_digits は整数）"""
    n = 0
    for node in nodes:
        stream.write(json.dumps(node.to_row(), ensure_ascii=False, separators=(",", ":")) + "\n")
        n += 1
    return n


def write_csv(nodes: Iterable[OrbitNode], stream: IO[str]) -> int:
    writer = csv.DictWriter(stream, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    n = 0
    for node in nodes:
        row = node.to_row()
        writer.writerow({k: _csv_value(k, row[k]) for k in COLUMNS})
        n += 1
    return n


def append_pruned(pruned: List[dict], csv_path: Path) -> Path:
    """
    高さ予算で落とした点の台帳（追記）。初回だけヘッダを書く。
    """
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    is_new = not csv_path.exists()
    with csv_path.open("a", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=PRUNED_COLUMNS)
        if is_new:
            writer.writeheader()
        for row in pruned:
            writer.writerow({k: _csv_value(k, row.get(k)) for k in PRUNED_COLUMNS})
    return csv_path
