"""RGBA colors, hex parsing, and the default 10-set palette."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError


@dataclass(frozen=True)
class Color:
    r: int
    g: int
    b: int
    a: int = 255

    def __post_init__(self):
        for name in ("r", "g", "b", "a"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 0 <= v <= 255:
                raise InputError(f"color channel {name}={v!r} outside 0..255")

    @property
    def hex(self) -> str:
        return f"#{self.r:02x}{self.g:02x}{self.b:02x}"

    @property
    def alpha(self) -> float:
        return self.a / 255.0


def parse_color(text: str) -> Color:
    """Parse '#RRGGBB' or '#RRGGBBAA' (case-insensitive)."""
    s = text.strip()
    if s.startswith("#"):
        s = s[1:]
    if len(s) not in (6, 8) or any(c not in "0123456789abcdefABCDEF" for c in s):
        raise InputError(f"malformed color {text!r}, expected #RRGGBB or #RRGGBBAA")
    r, g, b = int(s[0:2], 16), int(s[2:4], 16), int(s[4:6], 16)
    a = int(s[6:8], 16) if len(s) == 8 else 255
    return Color(r, g, b, a)


WHITE = Color(255, 255, 255)
BLACK = Color(0, 0, 0)

# Ten distinguishable hues; blended pairwise at 50% fill they stay tellable apart.
DEFAULT_PALETTE = (
    parse_color("#1f77b4"),
    parse_color("#ff7f0e"),
    parse_color("#2ca02c"),
    parse_color("#d62728"),
    parse_color("#9467bd"),
    parse_color("#8c564b"),
    parse_color("#e377c2"),
    parse_color("#7f7f7f"),
    parse_color("#bcbd22"),
    parse_color("#17becf"),
)
