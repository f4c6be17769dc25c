"""Symmetric edge-valued networks with an explicit per-edge observation mask.

Vertices are dense integers 1..n. Missingness is carried only by the mask:
a stored value of exactly 0 is a legitimate observation, never a sentinel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    DuplicateEdge,
    NonFiniteInput,
    SelfLoop,
    VertexOutOfRange,
)

AGGREGATE_STATS = ("mean", "p95", "max")


@dataclass(frozen=True)
class EdgeRecord:
    i: int
    j: int
    value: float


def _as_ij_value(record) -> tuple[int, int, float]:
    if isinstance(record, EdgeRecord):
        return record.i, record.j, record.value
    i, j, v = record
    return int(i), int(j), float(v)


def pair_index(n: int, i, j):
    """Canonical 0-based index of unordered pair (i, j), 1 <= i < j <= n.

    Pairs are ordered row-major: (1,2), (1,3), ..., (1,n), (2,3), ...
    Accepts scalars or arrays.
    """
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    return (i - 1) * n - i * (i - 1) // 2 + (j - i) - 1


def all_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All unordered pairs in canonical order, as 1-based index arrays."""
    iu, ju = np.triu_indices(n, k=1)
    return (iu + 1).astype(np.int32), (ju + 1).astype(np.int32)


class DyadicSample:
    """n vertices plus values for the observed unordered pairs.

    Lookup is symmetric: (i, j) and (j, i) address the same edge.
    Instances are immutable after construction and safe to share.
    """

    __slots__ = ("n", "edge_i", "edge_j", "edge_values", "_lookup")

    def __init__(self, n: int, edge_i, edge_j, edge_values, *, _trusted=False):
        n = int(n)
        if n < 2:
            raise VertexOutOfRange(f"need at least 2 vertices, got n={n}")
        ei = np.ascontiguousarray(edge_i, dtype=np.int32)
        ej = np.ascontiguousarray(edge_j, dtype=np.int32)
        vals = np.ascontiguousarray(edge_values, dtype=np.float64)
        if not (ei.shape == ej.shape == vals.shape) or ei.ndim != 1:
            raise ValueError("edge arrays must be 1-d and of equal length")
        if not _trusted:
            ei, ej, vals = _validate_edges(n, ei, ej, vals)
        self.n = n
        self.edge_i = ei
        self.edge_j = ej
        self.edge_values = vals
        self._lookup = None
        for arr in (self.edge_i, self.edge_j, self.edge_values):
            arr.setflags(write=False)

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_arrays(cls, n, edge_i, edge_j, edge_values) -> "DyadicSample":
        return cls(n, edge_i, edge_j, edge_values)

    # -- size and mask -------------------------------------------------------

    @property
    def observed_count(self) -> int:
        return int(self.edge_values.size)

    @property
    def total_pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    def observed_fraction(self) -> float:
        return self.observed_count / self.total_pairs

    def complete(self) -> bool:
        return self.observed_count == self.total_pairs

    # -- symmetric lookup ----------------------------------------------------

    def _index_of(self, i: int, j: int) -> int | None:
        if i == j:
            raise SelfLoop(f"no self-pairs: ({i},{j})")
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise VertexOutOfRange(f"vertex ids must lie in 1..{self.n}")
        if i > j:
            i, j = j, i
        if self._lookup is None:
            self._lookup = {
                (int(a), int(b)): k
                for k, (a, b) in enumerate(zip(self.edge_i, self.edge_j))
            }
        return self._lookup.get((i, j))

    def is_observed(self, i: int, j: int) -> bool:
        return self._index_of(i, j) is not None

    def value(self, i: int, j: int) -> float:
        k = self._index_of(i, j)
        if k is None:
            raise KeyError(f"pair ({i},{j}) is unobserved")
        return float(self.edge_values[k])

    def edges(self) -> Iterator[EdgeRecord]:
        for a, b, v in zip(self.edge_i, self.edge_j, self.edge_values):
            yield EdgeRecord(int(a), int(b), float(v))

    def __repr__(self) -> str:
        return (
            f"DyadicSample(n={self.n}, observed={self.observed_count}"
            f"/{self.total_pairs})"
        )


def _validate_edges(n, ei, ej, vals):
    if vals.size and not np.all(np.isfinite(vals)):
        raise NonFiniteInput("edge values must be finite")
    if np.any(ei == ej):
        k = int(np.argmax(ei == ej))
        raise SelfLoop(f"self-pair ({ei[k]},{ej[k]}) not allowed")
    if vals.size and (ei.min() < 1 or ej.min() < 1 or max(ei.max(), ej.max()) > n):
        raise VertexOutOfRange(f"vertex ids must lie in 1..{n}")
    lo = np.minimum(ei, ej)
    hi = np.maximum(ei, ej)
    order = np.lexsort((hi, lo))
    lo, hi, vals = lo[order], hi[order], vals[order]
    dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
    if np.any(dup):
        k = int(np.argmax(dup))
        raise DuplicateEdge(f"pair ({lo[k]},{hi[k]}) listed more than once")
    return lo, hi, vals


def from_edge_list(records: Iterable, n: int) -> DyadicSample:
    """Build a sample from one record per observed unordered pair.

    Pairs not listed are marked unobserved. Records may be EdgeRecord
    instances or plain (i, j, value) triples.
    """
    triples = [_as_ij_value(r) for r in records]
    ei = np.fromiter((t[0] for t in triples), dtype=np.int32, count=len(triples))
    ej = np.fromiter((t[1] for t in triples), dtype=np.int32, count=len(triples))
    vals = np.fromiter((t[2] for t in triples), dtype=np.float64, count=len(triples))
    return DyadicSample(n, ei, ej, vals)


def _quantile(sorted_values: np.ndarray, q: float) -> float:
    # linear interpolation between closest ranks: position 1+(m-1)q
    return float(np.percentile(sorted_values, 100.0 * q))


def aggregate_multi_records(records: Iterable, stat: str, n: int) -> DyadicSample:
    """Collapse repeated per-pair records into one summary value per pair.

    Both orientations of a pair are pooled. ``stat`` is one of
    "mean", "p95" (linear-interpolation percentile) or "max".
    """
    if stat not in AGGREGATE_STATS:
        raise ValueError(f"stat must be one of {AGGREGATE_STATS}, got {stat!r}")
    groups: dict[tuple[int, int], list[float]] = {}
    for r in records:
        i, j, v = _as_ij_value(r)
        if i == j:
            raise SelfLoop(f"self-pair ({i},{j}) not allowed")
        if not (1 <= i <= n and 1 <= j <= n):
            raise VertexOutOfRange(f"vertex ids must lie in 1..{n}")
        if not np.isfinite(v):
            raise NonFiniteInput(f"non-finite value for pair ({i},{j})")
        key = (i, j) if i < j else (j, i)
        groups.setdefault(key, []).append(v)

    ei = np.empty(len(groups), dtype=np.int32)
    ej = np.empty(len(groups), dtype=np.int32)
    vals = np.empty(len(groups), dtype=np.float64)
    for k, (key, vs) in enumerate(sorted(groups.items())):
        arr = np.asarray(vs, dtype=np.float64)
        if stat == "mean":
            agg = float(arr.mean())
        elif stat == "max":
            agg = float(arr.max())
        else:
            agg = _quantile(arr, 0.95)
        ei[k], ej[k], vals[k] = key[0], key[1], agg
    return DyadicSample(n, ei, ej, vals, _trusted=True)


def observed_fraction(sample: DyadicSample) -> float:
    """Share of the C(n,2) unordered pairs that carry an observation."""
    return sample.observed_fraction()
