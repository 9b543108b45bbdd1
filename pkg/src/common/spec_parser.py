# src/common/spec_parser.py
from __future__ import annotations

import re
import unicodedata
from fractions import Fraction
from typing import List, Optional

from src.arith.exact import ArithmeticDomainError, ProjPoint, normalize_point
from src.geometry.surface import Surface, SurfaceError, make_surface


# ===== 例外 =====
class InvocationError(ValueError):
    """CLI 入力の基底例外"""


class BadSurfaceSpec(InvocationError):
    pass


class BadPointSpec(InvocationError):
    pass


class UnknownSubcommand(InvocationError):
    pass


_NUMBER = re.compile(r"^[+-]?\d+(/\d+)?$")


def normalize_spec(text: Optional[str]) -> str:
    """
    入力の揺れを吸収する:
      - 全角→半角（NFKC）。"１，１，－１，－１" も読める
      - 空白の除去
      - 数学記号のマイナス（U+2212）を '-' に
    """
    if not text:
        return ""
    s = unicodedata.normalize("NFKC", text)
    s = s.replace("−", "-")
    return re.sub(r"\s+", "", s)


def _numbers(text: str, sep: str) -> List[Fraction]:
    parts = text.split(sep)
    if len(parts) != 4 or not all(_NUMBER.match(p) for p in parts):
        raise ValueError(f"4 つの数が必要です: {text!r}")
    return [Fraction(p) for p in parts]


def parse_surface(text: Optional[str]) -> Surface:
    """例: "1,1,-1,-1" -> V_{1,1,-1,-1}"""
    s = normalize_spec(text)
    try:
        return make_surface(*_numbers(s, ","))
    except ZeroDivisionError as e:
        raise BadSurfaceSpec(f"曲面の指定が不正です: {text!r}") from e
    except (ValueError, SurfaceError) as e:
        raise BadSurfaceSpec(str(e)) from e


def parse_point(text: Optional[str]) -> ProjPoint:
    """例: "133:134:158:59"。有理数も可（正準形に直す）"""
    s = normalize_spec(text)
    try:
        return normalize_point(_numbers(s, ":"))
    except ZeroDivisionError as e:
        raise BadPointSpec(f"点の指定が不正です: {text!r}") from e
    except (ValueError, ArithmeticDomainError) as e:
        raise BadPointSpec(str(e)) from e
