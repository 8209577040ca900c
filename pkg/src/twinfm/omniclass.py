"""Omniclass classification code parsing and canonical rendering.

Codes look like ``13-55 11 00 Office Spaces``: a table prefix (13 for space
functions, 23 for products/equipment), one to four two-digit level groups,
then a free-text title.  The canonical rendering round-trips: for any valid
input, ``parse_omniclass(text).render() == normalize(text)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MalformedCode

VALID_TABLES = (13, 23)
MAX_LEVELS = 4

_HEAD_RE = re.compile(r"^(\d{2})-(\d{2})$")
_GROUP_RE = re.compile(r"^\d{2}$")


def normalize(text: str) -> str:
    """Collapse whitespace runs to single spaces and trim."""
    return " ".join(text.split())


@dataclass(frozen=True)
class OmniclassCode:
    table: int
    levels: tuple[int, ...]
    title: str

    def render(self) -> str:
        groups = " ".join(f"{g:02d}" for g in self.levels)
        head = f"{self.table}-{groups}"
        return f"{head} {self.title}" if self.title else head

    @property
    def canonical(self) -> str:
        return self.render()

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.render()


def parse_omniclass(text: str) -> OmniclassCode:
    """Parse an Omniclass code, raising MalformedCode on any violation.

    Level groups are consumed greedily: after the ``TT-gg`` head, up to three
    further two-digit tokens extend the levels; everything after is the title.
    """
    if not isinstance(text, str):
        raise MalformedCode(f"expected string, got {type(text).__name__}")
    norm = normalize(text)
    if not norm:
        raise MalformedCode("empty code")
    tokens = norm.split(" ")
    head = _HEAD_RE.match(tokens[0])
    if head is None:
        raise MalformedCode(f"bad table/level prefix: {tokens[0]!r}")
    table = int(head.group(1))
    if table not in VALID_TABLES:
        raise MalformedCode(f"table must be one of {VALID_TABLES}, got {table}")
    levels = [int(head.group(2))]
    rest = tokens[1:]
    while rest and len(levels) < MAX_LEVELS and _GROUP_RE.match(rest[0]):
        levels.append(int(rest.pop(0)))
    title = " ".join(rest)
    return OmniclassCode(table=table, levels=tuple(levels), title=title)


def canonical(text: str) -> str:
    """Parse then re-render; the canonical spelling of a code."""
    return parse_omniclass(text).render()


def require_table(text: str, table: int) -> OmniclassCode:
    """Parse a code and require a specific table number."""
    code = parse_omniclass(text)
    if code.table != table:
        raise MalformedCode(f"expected table {table}, got {code.table}: {text!r}")
    return code
