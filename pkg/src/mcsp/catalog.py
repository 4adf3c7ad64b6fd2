"""Common substrings and common blocks of an instance.

All positions are 1-based.  Catalog entries and blocks are kept in the
canonical order (length descending, then string, then positions), which
fixes variable order in the models and therefore the solver's behaviour.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple

from .instance import Instance


class CatalogEntry(NamedTuple):
    t: str
    q1: tuple[int, ...]
    q2: tuple[int, ...]


class CommonBlock(NamedTuple):
    t: str
    k1: int
    k2: int

    @property
    def length(self) -> int:
        return len(self.t)


def canonical_key(t: str):
    return (-len(t), t)


@dataclass(frozen=True)
class SubstringCatalog:
    entries: tuple[CatalogEntry, ...]
    n: int

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def strings(self) -> list[str]:
        return [e.t for e in self.entries]

    def index(self) -> dict[str, CatalogEntry]:
        return {e.t: e for e in self.entries}

    @property
    def longest(self) -> int:
        return len(self.entries[0].t) if self.entries else 0


@dataclass(frozen=True)
class BlockSet:
    blocks: tuple[CommonBlock, ...]
    n: int

    @property
    def m(self) -> int:
        return len(self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, i):
        return self.blocks[i]


def _occurrences(s: str, starts, length: int) -> dict[str, list[int]]:
    groups = defaultdict(list)
    for k in starts:
        groups[s[k:k + length]].append(k)
    return groups


def build_catalog(inst: Instance) -> SubstringCatalog:
    """Every string occurring in both ``s1`` and ``s2``, with all start positions.

    Works length by length.  A length-L common string has a common prefix of
    length L-1, so only the starts that survived the previous round are
    extended; the loop stops at the first length with no common string.
    """
    s1, s2, n = inst.s1, inst.s2, inst.n
    starts1, starts2 = range(n), range(n)
    entries = []
    for length in range(1, n + 1):
        g1 = _occurrences(s1, (k for k in starts1 if k + length <= n), length)
        g2 = _occurrences(s2, (k for k in starts2 if k + length <= n), length)
        common = [t for t in g1 if t in g2]
        if not common:
            break
        for t in common:
            entries.append(CatalogEntry(t, tuple(k + 1 for k in g1[t]),
                                        tuple(k + 1 for k in g2[t])))
        starts1 = sorted(k for t in common for k in g1[t])
        starts2 = sorted(k for t in common for k in g2[t])
    entries.sort(key=lambda e: canonical_key(e.t))
    return SubstringCatalog(tuple(entries), n)


def build_blocks(catalog: SubstringCatalog) -> BlockSet:
    blocks = [CommonBlock(e.t, k1, k2) for e in catalog for k1 in e.q1 for k2 in e.q2]
    return BlockSet(tuple(blocks), catalog.n)


def count_variables(catalog: SubstringCatalog) -> tuple[int, int]:
    """``(vars_cb, vars_cs)``: the block count and the occurrence count."""
    vars_cb = sum(len(e.q1) * len(e.q2) for e in catalog)
    vars_cs = sum(len(e.q1) + len(e.q2) for e in catalog)
    return vars_cb, vars_cs


def positioned_substring_count(n: int) -> int:
    """Number of nonempty (start, length) substrings of a length-n string."""
    return n * (n + 1) // 2


def catalog_stats(inst: Instance) -> dict:
    cat = build_catalog(inst)
    vars_cb, vars_cs = count_variables(cat)
    return {"n": inst.n, "sigma": len(inst.sigma), "T": len(cat), "m": vars_cb,
            "vars_cb": vars_cb, "vars_cs": vars_cs}
