"""Partitions of subsystem labels {1..N}.

Text form: blocks separated by ``|``, indices within a block by ``,``,
e.g. ``"1,2|3"``. Whitespace is ignored.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError, PartitionError


@dataclass(frozen=True)
class Partition:
    """Canonical k-partition of ``{1..n_subsystems}``.

    Blocks are stored as sorted tuples, ordered by their smallest element,
    so two partitions describing the same split compare equal.
    """

    blocks: tuple
    n_subsystems: int

    def __init__(self, blocks: Iterable[Iterable[int]], n_subsystems: int | None = None):
        blocks = [tuple(sorted(int(i) for i in b)) for b in blocks]
        if not blocks:
            raise PartitionError("a partition needs at least one block")
        if any(len(b) == 0 for b in blocks):
            raise PartitionError("partition blocks must be nonempty")
        flat = [i for b in blocks for i in b]
        n = max(flat) if n_subsystems is None else int(n_subsystems)
        if len(set(flat)) != len(flat):
            raise PartitionError(f"partition blocks overlap: {blocks}")
        if set(flat) != set(range(1, n + 1)):
            raise PartitionError(f"blocks {blocks} do not cover exactly 1..{n}")
        blocks.sort(key=lambda b: b[0])
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(self, "n_subsystems", n)

    @property
    def k(self) -> int:
        return len(self.blocks)

    def __str__(self):
        return format_partition(self)

    def __repr__(self):
        return f"Partition({format_partition(self)!r})"

    def relabel(self, labels: Sequence[int]) -> list:
        """Map local indices 1..N onto ``labels``; returns a list of blocks."""
        return [tuple(sorted(labels[i - 1] for i in b)) for b in self.blocks]


def _require_n(n: int) -> None:
    if n < 2:
        raise PartitionError(f"need at least 2 subsystems, got N={n}")


def enumerate_bipartitions(n: int) -> list:
    """All ``2**(n-1) - 1`` two-block splits of ``{1..n}``.

    The first block always contains 1. Ordered by size of the first block,
    then lexicographically.
    """
    _require_n(n)
    rest = range(2, n + 1)
    out = []
    for size in range(0, n - 1):
        for extra in itertools.combinations(rest, size):
            first = (1,) + extra
            second = tuple(i for i in rest if i not in extra)
            out.append(Partition([first, second], n))
    return out


def one_vs_rest_partitions(n: int) -> list:
    """The splits ``i | rest`` for i = 1..n, in that order.

    For n = 2 the two splits coincide and a single partition is returned.
    """
    _require_n(n)
    out = []
    for i in range(1, n + 1):
        p = Partition([[i], [j for j in range(1, n + 1) if j != i]], n)
        if p not in out:
            out.append(p)
    return out


def coarse_grain_dims(dims: Sequence[int], partition: Partition) -> list:
    """Composite dimension of each block, in block order."""
    if len(dims) != partition.n_subsystems:
        raise PartitionError(f"partition over {partition.n_subsystems} subsystems does not match dims {list(dims)}")
    return [math.prod(dims[i - 1] for i in b) for b in partition.blocks]


_TOKEN = re.compile(r"\d+|[|,]")


def parse_blocks(text: str, n: int | None = None) -> list:
    """Parse partition text into blocks, keeping the order as written.

    Validates syntax, range (when ``n`` is given), duplicates and coverage.
    Positions in :class:`ParseError` refer to the text with whitespace
    removed.
    """
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ParseError("empty partition", 0)
    blocks: list = [[]]
    pos = 0
    expect_index = True
    seen: dict = {}
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m is None:
            raise ParseError(f"unexpected character {s[pos]!r}", pos)
        tok = m.group()
        if expect_index:
            if not tok.isdigit():
                raise ParseError(f"expected an index, found {tok!r}", pos)
            idx = int(tok)
            if idx < 1 or (n is not None and idx > n):
                raise ParseError(f"index {idx} out of range 1..{n if n is not None else '∞'}", pos)
            if idx in seen:
                raise ParseError(f"duplicate index {idx}", pos)
            seen[idx] = pos
            blocks[-1].append(idx)
            expect_index = False
        else:
            if tok == "|":
                blocks.append([])
            elif tok != ",":
                raise ParseError(f"expected ',' or '|', found {tok!r}", pos)
            expect_index = True
        pos = m.end()
    if expect_index:
        raise ParseError("partition text ends with a separator", len(s))
    total = n if n is not None else max(seen)
    missing = sorted(set(range(1, total + 1)) - set(seen))
    if missing:
        raise ParseError(f"indices {missing} are missing", len(s))
    return [tuple(b) for b in blocks]


def parse_partition(text: str, n: int | None = None) -> Partition:
    """Parse ``text`` into a canonical :class:`Partition`.

    >>> parse_partition("3|1,2", 3).blocks
    ((1, 2), (3,))
    """
    blocks = parse_blocks(text, n)
    return Partition(blocks, n if n is not None else sum(len(b) for b in blocks))


def format_partition(partition) -> str:
    """Text form of a partition (or of an ordered list of blocks)."""
    blocks = partition.blocks if isinstance(partition, Partition) else partition
    return "|".join(",".join(str(i) for i in b) for b in blocks)
