"""ASCII box diagrams of Tate shapes.

Columns are twists from 0 up to the largest twist, left to right; row ``r``
shows a box in column ``t`` when the multiplicity of ``t`` is at least
``r + 1``.  In a partition each box carries the letter of its part.
"""

from __future__ import annotations

from string import ascii_uppercase
from typing import Sequence

from .motive import TateShape

BLANK = "   "


def _letter(i: int) -> str:
    if i < len(ascii_uppercase):
        return ascii_uppercase[i]
    return ascii_uppercase[i // 26 - 1] + ascii_uppercase[i % 26]


def render_columns(columns: dict[int, list[str]]) -> str:
    if not columns:
        return ""
    width = max(columns) + 1
    height = max(len(v) for v in columns.values())
    lines = []
    for r in range(height):
        cells = []
        for t in range(width):
            stack = columns.get(t, [])
            cells.append(f"[{stack[r]}]" if r < len(stack) else BLANK)
        lines.append("".join(cells).rstrip())
    return "\n".join(lines)


def render_shape(shape: TateShape, mark: str = "X") -> str:
    return render_columns({t: [mark] * c for t, c in shape.counts})


def render_parts(parts: Sequence[TateShape]) -> str:
    """Boxes of several parts stacked per column, lettered A, B, ... in order."""
    columns: dict[int, list[str]] = {}
    for i, part in enumerate(parts):
        for t, c in part.counts:
            columns.setdefault(t, []).extend([_letter(i)] * c)
    return render_columns(columns)


def twist_ruler(shape: TateShape) -> str:
    """Twist numbers under the columns (last digit only)."""
    if not shape:
        return ""
    return "".join(f" {t % 10} " for t in range(shape.max_twist + 1)).rstrip()
