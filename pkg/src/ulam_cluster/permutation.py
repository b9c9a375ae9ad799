"""Permutations over ``1..d`` and the Ulam metric.

The public contract is 1-based; kernels work on 0-based ``int64`` arrays,
exposed through :attr:`Permutation.array`.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

from . import _kernels
from .exceptions import DimensionMismatch, DimensionZero, NotBijection, ParseError


@dataclass(frozen=True)
class Permutation:
    """An immutable ordering of the symbols ``1..d``."""

    symbols: tuple[int, ...]

    def __post_init__(self):
        _check_bijection(self.symbols)

    @classmethod
    def _trusted(cls, symbols: tuple[int, ...]) -> "Permutation":
        obj = object.__new__(cls)
        object.__setattr__(obj, "symbols", symbols)
        return obj

    @classmethod
    def from_array0(cls, arr) -> "Permutation":
        """Build from a 0-based array without re-validating."""
        return cls._trusted(tuple(int(v) + 1 for v in arr))

    @property
    def d(self) -> int:
        return len(self.symbols)

    @cached_property
    def array(self) -> np.ndarray:
        """0-based read-only ``int64`` view used by the kernels."""
        a = np.asarray(self.symbols, dtype=np.int64) - 1
        a.flags.writeable = False
        return a

    @cached_property
    def key(self) -> bytes:
        return self.array.tobytes()

    def __len__(self):
        return len(self.symbols)

    def __iter__(self) -> Iterator[int]:
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __str__(self):
        return " ".join(map(str, self.symbols))

    def __repr__(self):
        return f"Permutation({self.symbols})"

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return validate(range(1, d + 1))


def _check_bijection(symbols):
    d = len(symbols)
    if d == 0:
        raise DimensionZero()
    seen = bytearray(d + 1)
    for s in symbols:
        if not isinstance(s, int) or isinstance(s, bool):
            raise NotBijection(s, d)
        if s < 1 or s > d or seen[s]:
            raise NotBijection(s, d)
        seen[s] = 1


def validate(symbols: Iterable[int]) -> Permutation:
    """Return a :class:`Permutation` iff ``symbols`` is a bijection on ``1..d``.

    >>> validate([3, 1, 2]).d
    3
    """
    if isinstance(symbols, Permutation):
        return symbols
    items = []
    for s in symbols:
        try:
            items.append(operator.index(s))
        except TypeError:
            raise NotBijection(s) from None
    return Permutation(tuple(items))


def as_permutation(x) -> Permutation:
    return x if isinstance(x, Permutation) else validate(x)


def _same_dim(x: Permutation, y: Permutation):
    if x.d != y.d:
        raise DimensionMismatch(x.d, y.d)


def lcs_length(x, y) -> int:
    """Length of a longest common subsequence of two permutations.

    Relabels ``y`` by positions in ``x`` and takes the longest increasing
    subsequence, O(d log d).
    """
    x, y = as_permutation(x), as_permutation(y)
    _same_dim(x, y)
    return int(_kernels.lcs_length0(x.array, y.array))


def lcs_length_oracle(x, y) -> int:
    """Quadratic dynamic-programming LCS; reference for :func:`lcs_length`."""
    x, y = as_permutation(x), as_permutation(y)
    _same_dim(x, y)
    a, b = x.symbols, y.symbols
    prev = [0] * (len(b) + 1)
    for ai in a:
        cur = [0]
        for j, bj in enumerate(b):
            if ai == bj:
                cur.append(prev[j] + 1)
            else:
                up, left = prev[j + 1], cur[j]
                cur.append(up if up > left else left)
        prev = cur
    return prev[-1]


def ulam_distance(x, y) -> int:
    """Minimum number of character moves turning ``x`` into ``y``."""
    x, y = as_permutation(x), as_permutation(y)
    _same_dim(x, y)
    return x.d - int(_kernels.lcs_length0(x.array, y.array))


def stack(perms: Sequence[Permutation]) -> np.ndarray:
    """Stack permutations into an ``(n, d)`` 0-based ``int64`` array."""
    if len(perms) == 0:
        return np.empty((0, 0), dtype=np.int64)
    d = perms[0].d
    out = np.empty((len(perms), d), dtype=np.int64)
    for i, p in enumerate(perms):
        if p.d != d:
            raise DimensionMismatch(d, p.d)
        out[i] = p.array
    return out


def pairwise_distances(A: Sequence[Permutation] | np.ndarray,
                       B: Sequence[Permutation] | np.ndarray) -> np.ndarray:
    """Ulam distance matrix ``D[i, j] = Δ(A[i], B[j])``.

    Arrays are taken to be 0-based already.
    """
    A = A if isinstance(A, np.ndarray) else stack(A)
    B = B if isinstance(B, np.ndarray) else stack(B)
    if len(A) == 0 or len(B) == 0:
        return np.zeros((len(A), len(B)), dtype=np.int64)
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(A.shape[1], B.shape[1])
    return _kernels.cdist0(np.ascontiguousarray(A, dtype=np.int64),
                           np.ascontiguousarray(B, dtype=np.int64))


# -- text format ------------------------------------------------------------

def parse_permutation(line: str, lineno: int | None = None) -> Permutation:
    tokens = line.split()
    if not tokens:
        raise ParseError("empty permutation line", lineno)
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(f"non-integer token ({exc})", lineno) from None
    try:
        return validate(values)
    except (NotBijection, DimensionZero) as exc:
        raise ParseError(str(exc), lineno) from None


def read_permutation(path: str | Path) -> Permutation:
    """Read a single permutation: one line of space-separated symbols."""
    lines = [(i, ln) for i, ln in enumerate(Path(path).read_text().splitlines(), 1)
             if ln.strip()]
    if len(lines) != 1:
        raise ParseError(f"expected one permutation line, found {len(lines)}")
    lineno, line = lines[0]
    return parse_permutation(line, lineno)


def iter_dataset(stream: TextIO) -> Iterator[Permutation]:
    """Yield permutations from a dataset stream (header ``d n`` then n lines).

    Items are parsed lazily so the stream can feed a sketch in one pass.
    """
    header = None
    lineno = 0
    for lineno, line in enumerate(stream, 1):
        if line.strip():
            header = line
            break
    if header is None:
        raise ParseError("missing header line 'd n'", lineno or 1)
    parts = header.split()
    try:
        if len(parts) != 2:
            raise ValueError
        d, n = int(parts[0]), int(parts[1])
        if d < 1 or n < 0:
            raise ValueError
    except ValueError:
        raise ParseError(f"bad header {header.strip()!r}, expected 'd n'", lineno) from None
    count = 0
    for lineno, line in enumerate(stream, lineno + 1):
        if not line.strip():
            continue
        if count == n:
            raise ParseError(f"more than the declared {n} permutations", lineno)
        p = parse_permutation(line, lineno)
        if p.d != d:
            raise ParseError(f"permutation has {p.d} symbols, header says d={d}", lineno)
        count += 1
        yield p
    if count != n:
        raise ParseError(f"header declares {n} permutations, found {count}")


def read_dataset(path: str | Path) -> list[Permutation]:
    with open(path) as fh:
        return list(iter_dataset(fh))


def format_dataset(perms: Sequence[Permutation]) -> str:
    d = perms[0].d if perms else 0
    lines = [f"{d} {len(perms)}"]
    lines.extend(str(p) for p in perms)
    return "\n".join(lines) + "\n"


def write_dataset(path: str | Path, perms: Sequence[Permutation]):
    Path(path).write_text(format_dataset(perms))
