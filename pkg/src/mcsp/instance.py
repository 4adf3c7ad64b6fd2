"""Related string-pair instances: parsing, validation and seeded generation.

Random instances use numpy's PCG64 bit generator seeded with the user's
64-bit seed.  ``s1`` is drawn i.i.d. uniformly over the first ``k``
uppercase letters and ``s2`` is a Fisher-Yates shuffle of ``s1`` driven by
the same generator, so every generated pair is related by construction.
"""

from __future__ import annotations

import string
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class InstanceError(ValueError):
    """Base class for malformed instances."""


class EmptyInput(InstanceError):
    pass


class LengthMismatch(InstanceError):
    pass


class NotRelated(InstanceError):
    def __init__(self, letter: str, count1: int, count2: int):
        self.letter = letter
        super().__init__(
            f"strings are not related: letter {letter!r} occurs {count1} time(s) "
            f"in s1 but {count2} time(s) in s2"
        )


class InvalidParameter(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    s1: str
    s2: str
    sigma: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        if not self.s1 and not self.s2:
            raise EmptyInput("both strings are empty")
        if len(self.s1) != len(self.s2):
            raise LengthMismatch(f"|s1| = {len(self.s1)} but |s2| = {len(self.s2)}")
        for s in (self.s1, self.s2):
            bad = [c for c in s if not c.isprintable() or c.isspace()]
            if bad:
                raise InstanceError(f"illegal character {bad[0]!r}")
        c1, c2 = Counter(self.s1), Counter(self.s2)
        if c1 != c2:
            # first offending letter in order of appearance in s1, then s2
            for c in self.s1 + self.s2:
                if c1[c] != c2[c]:
                    raise NotRelated(c, c1[c], c2[c])
        object.__setattr__(self, "sigma", tuple(sorted(c1)))

    @property
    def n(self) -> int:
        return len(self.s1)

    def to_text(self) -> str:
        return f"{self.s1}\n{self.s2}\n"


def parse_instance(text: str) -> Instance:
    """Parse the two-line instance format (LF or CRLF, optional trailing newline)."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise EmptyInput("no non-empty lines")
    if len(lines) != 2:
        raise InstanceError(f"expected exactly 2 non-empty lines, got {len(lines)}")
    return Instance(lines[0], lines[1])


def read_instance(path) -> Instance:
    return parse_instance(Path(path).read_text(encoding="ascii"))


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(inst.to_text(), encoding="ascii", newline="\n")


def generate_instance(n: int, alphabet_size: int, seed: int) -> Instance:
    """Draw a random related pair; deterministic in ``(n, alphabet_size, seed)``."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParameter(f"n must be a positive integer, got {n!r}")
    if not isinstance(alphabet_size, (int, np.integer)) or not 1 <= alphabet_size <= 26:
        raise InvalidParameter(f"alphabet_size must be in [1, 26], got {alphabet_size!r}")
    if not 0 <= seed < 2**64:
        raise InvalidParameter(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    letters = string.ascii_uppercase[:alphabet_size]
    codes = rng.integers(0, alphabet_size, size=n)
    s1 = [letters[c] for c in codes]
    s2 = list(s1)
    # Fisher-Yates, high index downwards
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        s2[i], s2[j] = s2[j], s2[i]
    return Instance("".join(s1), "".join(s2))
