"""Per-site directionality patterns and the R/O/L pattern language.

A pattern assigns each emitter a directionality value: +1 couples the site
to the right-propagating mode only, -1 to the left-propagating mode only,
and 0 makes the site reciprocal.  Patterns can be written in a tiny text
language::

    pattern := item+
    item    := atom | atom '*' INT | '(' item+ ')' '*' INT
    atom    := 'R' | 'O' | 'L'

with ``R`` = +1, ``O`` = 0, ``L`` = -1 and INT a positive repetition count.
Whitespace between tokens is optional.  ``(R L)*27`` expands to 54 values
alternating +1, -1.

Four named structures are provided as builders: a mirror funnel with a
reciprocal center block (S1), a mirror pattern with one reciprocal site in
each chiral half (S2), a two-site alternation (S3), and a repeating
three-site unit cell (S4).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

ATOM_VALUES = {"R": 1.0, "O": 0.0, "L": -1.0}
VALUE_ATOMS = {1.0: "R", 0.0: "O", -1.0: "L"}


class PatternError(ValueError):
    """Invalid pattern text or incompatible structure parameters.

    For parse failures ``offset`` is the byte offset of the offending
    character in the source text.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class DirectionalityPattern:
    """Ordered per-site directionality values, each in [-1, 1]."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise PatternError("pattern must have at least one site")
        for i, v in enumerate(self.values):
            if not -1.0 <= v <= 1.0:
                raise PatternError(f"directionality value {v} at site {i + 1} outside [-1, 1]")

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class Leaf:
    """Single atom token: 'R', 'O' or 'L'."""

    symbol: str

    def expand(self) -> list[float]:
        return [ATOM_VALUES[self.symbol]]


@dataclass(frozen=True)
class Repeat:
    """Bounded repetition of a sequence of items; count >= 1."""

    body: tuple["Node", ...]
    count: int

    def expand(self) -> list[float]:
        unit: list[float] = []
        for item in self.body:
            unit.extend(item.expand())
        return unit * self.count


Node = Union[Leaf, Repeat]


@dataclass(frozen=True)
class PatternExpr:
    """Parse tree of a pattern text; expansion is left-to-right."""

    items: tuple[Node, ...]


class _Parser:
    """Recursive-descent parser for the pattern grammar."""

    def __init__(self, source: str):
        self.source = source
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.source) and self.source[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str | None:
        self._skip_ws()
        if self.pos >= len(self.source):
            return None
        return self.source[self.pos]

    def _read_count(self) -> int:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.source) and self.source[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise PatternError("expected repetition count after '*'", start)
        count = int(self.source[start:self.pos])
        if count < 1:
            raise PatternError("repetition count must be >= 1", start)
        return count

    def parse(self) -> PatternExpr:
        items = self._parse_items()
        self._skip_ws()
        if self.pos < len(self.source):
            raise PatternError(f"unexpected {self.source[self.pos]!r}", self.pos)
        if not items:
            raise PatternError("empty pattern", 0)
        return PatternExpr(tuple(items))

    def _parse_items(self) -> list[Node]:
        items: list[Node] = []
        while True:
            ch = self._peek()
            if ch is None or ch == ")":
                return items
            items.append(self._parse_item())

    def _parse_item(self) -> Node:
        ch = self._peek()
        start = self.pos
        if ch == "(":
            self.pos += 1
            body = self._parse_items()
            if not body:
                raise PatternError("empty group", start)
            if self._peek() != ")":
                raise PatternError("unbalanced parenthesis", start)
            self.pos += 1
            if self._peek() != "*":
                raise PatternError("group must be followed by '*' and a count", self.pos)
            self.pos += 1
            return Repeat(tuple(body), self._read_count())
        if ch in ATOM_VALUES:
            self.pos += 1
            leaf = Leaf(ch)
            if self._peek() == "*":
                self.pos += 1
                return Repeat((leaf,), self._read_count())
            return leaf
        raise PatternError(f"unknown token {ch!r}", self.pos)


def parse_pattern(source: str) -> PatternExpr:
    """Parse pattern text into a tree; raises PatternError with offset."""
    return _Parser(source).parse()


def expand(expr: PatternExpr) -> DirectionalityPattern:
    """Flatten a parse tree into the site-value sequence."""
    values: list[float] = []
    for item in expr.items:
        values.extend(item.expand())
    return DirectionalityPattern(tuple(values))


def _smallest_period(symbols: Sequence[str]) -> int:
    n = len(symbols)
    for p in range(1, n):
        if n % p == 0 and all(symbols[i] == symbols[i % p] for i in range(n)):
            return p
    return n


def _canonical(symbols: Sequence[str]) -> str:
    p = _smallest_period(symbols)
    n = len(symbols)
    if p < n:
        count = n // p
        if p == 1:
            return f"{symbols[0]}*{count}"
        return f"({_canonical(symbols[:p])})*{count}"
    # aperiodic: run-length encode maximal runs of one atom
    parts: list[str] = []
    i = 0
    while i < n:
        j = i
        while j < n and symbols[j] == symbols[i]:
            j += 1
        run = j - i
        parts.append(symbols[i] if run == 1 else f"{symbols[i]}*{run}")
        i = j
    return " ".join(parts)


def serialize(pattern: DirectionalityPattern) -> str:
    """Canonical text for a discrete pattern (maximal repetition grouping).

    Only defined for values in {+1, 0, -1}; parse/expand of the result
    reproduces the value sequence exactly.
    """
    symbols = []
    for i, v in enumerate(pattern.values):
        if v not in VALUE_ATOMS:
            raise PatternError(f"value {v} at site {i + 1} has no atom; only +1/0/-1 serialize")
        symbols.append(VALUE_ATOMS[v])
    return _canonical(symbols)


def structure_s1(n_sites: int, center_width: int = 10) -> DirectionalityPattern:
    """Mirror funnel: +1 block, reciprocal center of given width, -1 block."""
    if center_width < 0 or center_width > n_sites:
        raise PatternError(f"S1 center width {center_width} must be in [0, {n_sites}]")
    if (n_sites - center_width) % 2 != 0:
        raise PatternError(
            f"S1 requires center width with the same parity as N (got N={n_sites}, width={center_width})")
    half = (n_sites - center_width) // 2
    return DirectionalityPattern(tuple([1.0] * half + [0.0] * center_width + [-1.0] * half))


def structure_s2(n_sites: int, o_left: int = 11) -> DirectionalityPattern:
    """Mirror chiral halves with one reciprocal site in each.

    The left half is +1 with a single 0 at 1-based site ``o_left``; the
    right half is the mirror image (-1 with a 0 at site N+1-o_left).
    """
    if n_sites % 2 != 0:
        raise PatternError(f"S2 requires even N (got N={n_sites})")
    half = n_sites // 2
    if not 1 <= o_left <= half:
        raise PatternError(f"S2 reciprocal site {o_left} must be in the left half (1..{half})")
    values = [1.0] * half + [-1.0] * half
    values[o_left - 1] = 0.0
    values[n_sites - o_left] = 0.0
    return DirectionalityPattern(tuple(values))


def structure_s3(n_sites: int) -> DirectionalityPattern:
    """Alternating +1, -1 starting with +1; N must be even."""
    if n_sites % 2 != 0:
        raise PatternError(f"S3 requires even N (got N={n_sites})")
    return DirectionalityPattern(tuple(1.0 if i % 2 == 0 else -1.0 for i in range(n_sites)))


def structure_s4(n_sites: int) -> DirectionalityPattern:
    """Repeating three-site unit cell (+1, 0, -1); N must be divisible by 3."""
    if n_sites % 3 != 0:
        raise PatternError(f"S4 requires N divisible by 3 (got N={n_sites})")
    cell = (1.0, 0.0, -1.0)
    return DirectionalityPattern(tuple(cell[i % 3] for i in range(n_sites)))


_BUILTINS = {
    "S1": structure_s1,
    "S2": structure_s2,
    "S3": structure_s3,
    "S4": structure_s4,
}


def builtin_structure(name: str, n_sites: int, **params) -> DirectionalityPattern:
    """Build one of the named structures S1-S4 by name."""
    try:
        builder = _BUILTINS[name.upper()]
    except KeyError:
        raise PatternError(f"unknown structure {name!r}; expected one of {sorted(_BUILTINS)}")
    return builder(n_sites, **params)
