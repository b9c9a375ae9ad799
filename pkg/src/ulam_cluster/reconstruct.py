"""Median reconstruction from five permutations.

A majority tournament is built over the symbols, every directed triangle met
while scanning the vertices in ascending order is deleted, and the surviving
acyclic tournament is read off in topological order with the deleted symbols
appended.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .exceptions import CyclicGraph, DimensionMismatch, VertexRemoved, WrongArity
from .permutation import Permutation, as_permutation

ARITY = 5
MAJORITY = 3


@dataclass(frozen=True)
class TournamentGraph:
    """Majority tournament on symbols ``1..d``.

    ``adj[a, b]`` (0-based) is True iff the edge points ``a+1 -> b+1``.
    ``removed_cycles`` lists the deleted triangles as 1-based triples.
    """

    d: int
    adj: np.ndarray
    alive: np.ndarray
    removed_cycles: tuple[tuple[int, int, int], ...] = ()

    @property
    def alive_symbols(self) -> list[int]:
        return [int(v) + 1 for v in np.flatnonzero(self.alive)]

    @property
    def removed_symbols(self) -> frozenset[int]:
        return frozenset(int(v) + 1 for v in np.flatnonzero(~self.alive))

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.adj[a - 1, b - 1])

    def out_degrees(self) -> np.ndarray:
        """Out-degree of every vertex inside the alive subgraph (0 for dead ones)."""
        live = self.adj & self.alive[None, :] & self.alive[:, None]
        return live.sum(axis=1)


@dataclass(frozen=True)
class ReconstructionReport:
    output: Permutation
    removed_symbols: frozenset[int] = field(default_factory=frozenset)
    removed_cycle_count: int = 0


def _check_five(T) -> list[Permutation]:
    T = [as_permutation(t) for t in T]
    if len(T) != ARITY:
        raise WrongArity(len(T), ARITY)
    d = T[0].d
    for t in T[1:]:
        if t.d != d:
            raise DimensionMismatch(d, t.d)
    return T


def build_tournament(T: Sequence) -> TournamentGraph:
    """Edge ``a -> b`` iff ``a`` precedes ``b`` in at least three of the five inputs."""
    T = _check_five(T)
    d = T[0].d
    pos = np.empty((ARITY, d), dtype=np.int64)
    for i, t in enumerate(T):
        pos[i, t.array] = np.arange(d)
    votes = (pos[:, :, None] < pos[:, None, :]).sum(axis=0)
    adj = votes >= MAJORITY
    return TournamentGraph(d=d, adj=adj, alive=np.ones(d, dtype=bool))


def _first_triangle(adj: np.ndarray, alive: np.ndarray, v: int):
    """0-based lexicographically first (a, b) with v->a->b->v, or None."""
    out_v = np.flatnonzero(adj[v] & alive)
    in_v = np.flatnonzero(adj[:, v] & alive)
    if out_v.size == 0 or in_v.size == 0:
        return None
    sub = adj[np.ix_(out_v, in_v)]
    flat = sub.ravel()
    hit = int(flat.argmax())
    if not flat[hit]:
        return None
    i, j = divmod(hit, in_v.size)
    return int(out_v[i]), int(in_v[j])


def shortest_cycle_through(g: TournamentGraph, v: int):
    """Return a directed triangle ``(v, a, b)`` among alive vertices, or None.

    In a tournament any vertex on a cycle lies on a directed triangle, so a
    triangle is a shortest cycle through ``v``. Pairs ``(a, b)`` are scanned
    in lexicographic order.
    """
    if not 1 <= v <= g.d or not g.alive[v - 1]:
        raise VertexRemoved(v)
    hit = _first_triangle(g.adj, g.alive, v - 1)
    if hit is None:
        return None
    return v, hit[0] + 1, hit[1] + 1


def remove_cycles(g: TournamentGraph) -> TournamentGraph:
    """Single ascending pass deleting a triangle through each alive vertex.

    Deleting vertices never creates new triangles, so once ``v`` has been
    examined no triangle through it remains; the result is acyclic.
    """
    alive = g.alive.copy()
    removed = list(g.removed_cycles)
    for v in range(g.d):
        if not alive[v]:
            continue
        hit = _first_triangle(g.adj, alive, v)
        if hit is None:
            continue
        a, b = hit
        tri = (v, a, b)
        assert len(set(tri)) == 3
        alive[list(tri)] = False
        removed.append((v + 1, a + 1, b + 1))
    return replace(g, alive=alive, removed_cycles=tuple(removed))


def find_triangle(g: TournamentGraph):
    """Any directed triangle among alive vertices (1-based), or None."""
    for v in np.flatnonzero(g.alive):
        hit = _first_triangle(g.adj, g.alive, int(v))
        if hit is not None:
            return int(v) + 1, hit[0] + 1, hit[1] + 1
    return None


def topological_permutation(g: TournamentGraph) -> list[int]:
    """Alive symbols ordered so that every edge points forward.

    An acyclic tournament is transitive, so its unique topological order is
    the order of decreasing out-degree.
    """
    idx = np.flatnonzero(g.alive)
    if idx.size == 0:
        return []
    sub = g.adj[np.ix_(idx, idx)]
    outdeg = sub.sum(axis=1)
    # transitive tournament <=> out-degrees are exactly 0..m-1
    if not np.array_equal(np.sort(outdeg), np.arange(idx.size)):
        tri = find_triangle(g)
        raise CyclicGraph(f"alive subgraph is not acyclic (triangle {tri})")
    order = idx[np.argsort(-outdeg, kind="stable")]
    return [int(v) + 1 for v in order]


def median_reconstruct(T: Sequence) -> ReconstructionReport:
    """Candidate median of five permutations via the majority tournament."""
    g = remove_cycles(build_tournament(T))
    prefix = topological_permutation(g)
    removed = sorted(g.removed_symbols)
    out = Permutation._trusted(tuple(prefix + removed))
    return ReconstructionReport(output=out,
                                removed_symbols=frozenset(removed),
                                removed_cycle_count=len(g.removed_cycles))


def reconstruct(T: Sequence) -> Permutation:
    """Shorthand for ``median_reconstruct(T).output``."""
    return median_reconstruct(T).output
