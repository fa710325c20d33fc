"""Identifier-list parsing, case-sensitive dedup, and the region partition table.

Regions are keyed by membership bitmask: bit i is set iff the element belongs
to input set i, so masks range over 1..2^n-1 for n sets.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .colors import Color
from .errors import InputError

MIN_SETS = 2
MAX_SETS = 10

_TOKEN_SPLIT = re.compile(r"[\n,]")


def parse_id_list(text: str) -> list[str]:
    """Split raw text on newlines and commas into trimmed, non-empty tokens.

    Duplicates are kept; order of appearance is preserved.
    """
    return [tok for tok in (t.strip() for t in _TOKEN_SPLIT.split(text)) if tok]


def dedupe(ids: Sequence[str]) -> list[str]:
    """Keep the first occurrence of each identifier, byte-exact comparison."""
    seen: set[str] = set()
    out: list[str] = []
    for ident in ids:
        if ident not in seen:
            seen.add(ident)
            out.append(ident)
    return out


@dataclass(frozen=True)
class IdSet:
    """A named, colored list of unique identifiers (first-occurrence order)."""

    name: str
    ids: tuple[str, ...]
    color: Optional[Color] = None

    def __post_init__(self):
        if not self.name.strip():
            raise InputError("set name must be non-empty")
        if not self.ids:
            raise InputError(f"set {self.name!r} is empty")
        if len(set(self.ids)) != len(self.ids):
            raise InputError(f"set {self.name!r} contains duplicate ids; dedupe first")
        object.__setattr__(self, "ids", tuple(self.ids))

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class RegionTable:
    """Partition of the union into exclusive regions plus inclusive intersections.

    exclusive maps a membership bitmask to the ids belonging to exactly that
    combination of sets; inclusive maps a combination bitmask to the ids common
    to all its sets.  Both keep only non-empty entries, keys ordered by
    (popcount, mask).  display is the pruned list shown to users.
    """

    n: int
    names: tuple[str, ...]
    exclusive: dict[int, tuple[str, ...]]
    union_size: int
    inclusive: dict[int, tuple[str, ...]]
    display: tuple[tuple[int, tuple[str, ...]], ...] = field(default=())

    def set_size(self, i: int) -> int:
        """Deduped size of input set i."""
        return len(self.inclusive.get(1 << i, ()))

    def set_sizes(self) -> tuple[int, ...]:
        return tuple(self.set_size(i) for i in range(self.n))

    def mask_names(self, mask: int) -> tuple[str, ...]:
        return tuple(self.names[i] for i in range(self.n) if mask & (1 << i))


def _mask_key(mask: int) -> tuple[int, int]:
    return (mask.bit_count(), mask)


def build_region_table(sets: Sequence[IdSet]) -> RegionTable:
    """Assign every distinct id to its exclusive region and derive all intersections."""
    if not MIN_SETS <= len(sets) <= MAX_SETS:
        raise InputError(
            f"need between {MIN_SETS} and {MAX_SETS} sets, got {len(sets)}"
        )
    names = tuple(s.name for s in sets)
    if len(set(names)) != len(names):
        raise InputError("set names must be pairwise distinct")
    for s in sets:
        if not s.ids:
            raise InputError(f"set {s.name!r} is empty")

    n = len(sets)
    membership: dict[str, int] = {}
    for i, s in enumerate(sets):
        bit = 1 << i
        for ident in s.ids:
            membership[ident] = membership.get(ident, 0) | bit

    grouped: dict[int, list[str]] = {}
    for ident, mask in membership.items():
        grouped.setdefault(mask, []).append(ident)
    exclusive = {m: tuple(grouped[m]) for m in sorted(grouped, key=_mask_key)}

    inclusive: dict[int, tuple[str, ...]] = {}
    for combo in sorted(range(1, 1 << n), key=_mask_key):
        ids = tuple(i for i, m in membership.items() if m & combo == combo)
        if ids:
            inclusive[combo] = ids

    table = RegionTable(
        n=n,
        names=names,
        exclusive=exclusive,
        union_size=len(membership),
        inclusive=inclusive,
    )
    object.__setattr__(table, "display", tuple(prune_redundant(table)))
    return table


def prune_redundant(table: RegionTable) -> list[tuple[int, tuple[str, ...]]]:
    """Drop entries whose id list is identical to a strictly larger combination's.

    A deeper intersection is always a subset of a shallower one, so only
    content-identical strict supersets make an entry redundant.
    """
    inclusive = table.inclusive
    masks = list(inclusive)
    out: list[tuple[int, tuple[str, ...]]] = []
    for c in masks:
        ids = inclusive[c]
        shadowed = any(
            c2 != c and (c2 & c) == c and inclusive[c2] == ids for c2 in masks
        )
        if not shadowed:
            out.append((c, ids))
    return out
