"""Interval arithmetic for 1-D domains and query sets.

Query sets handed to the possibility/necessity operations are unions of
closed intervals (endpoints may be infinite) or finite point sets.  Domains
are single intervals or finite label sets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ArgumentError, DomainError

#: Distance beyond the last finite feature at which tail limits are probed
#: when classifying region endpoints as infinite.
TAIL_HORIZON = 1e6


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ArgumentError("interval endpoints must not be NaN")
        if self.lo > self.hi:
            raise ArgumentError(f"empty interval: [{self.lo}, {self.hi}]")

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def issubset(self, other: "Interval", tol: float = 1e-12) -> bool:
        return other.lo - tol <= self.lo and self.hi <= other.hi + tol

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None


REAL_LINE = Interval(-math.inf, math.inf)
UNIT_INTERVAL = Interval(0.0, 1.0)


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted union of disjoint closed intervals."""

    parts: tuple[Interval, ...]

    @classmethod
    def of(cls, *intervals: Interval | tuple[float, float]) -> "IntervalUnion":
        items = [iv if isinstance(iv, Interval) else Interval(*iv) for iv in intervals]
        items.sort(key=lambda iv: iv.lo)
        merged: list[Interval] = []
        for iv in items:
            if merged and iv.lo <= merged[-1].hi:
                merged[-1] = Interval(merged[-1].lo, max(merged[-1].hi, iv.hi))
            else:
                merged.append(iv)
        return cls(tuple(merged))

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return any(p.contains(x, tol) for p in self.parts)

    def issubset(self, domain: Interval, tol: float = 1e-12) -> bool:
        return all(p.issubset(domain, tol) for p in self.parts)

    def complement(self, within: Interval) -> "IntervalUnion":
        """Closure of ``within`` minus this union (gaps plus flanks)."""
        gaps: list[Interval] = []
        cursor = within.lo
        for p in self.parts:
            clipped = p.intersect(within)
            if clipped is None:
                continue
            if clipped.lo > cursor:
                gaps.append(Interval(cursor, clipped.lo))
            cursor = max(cursor, clipped.hi)
        if cursor < within.hi:
            gaps.append(Interval(cursor, within.hi))
        return IntervalUnion(tuple(gaps))


@dataclass(frozen=True)
class Points:
    """A finite query set of points."""

    values: tuple[float, ...]

    @classmethod
    def of(cls, values: Iterable[float]) -> "Points":
        return cls(tuple(float(v) for v in values))


@dataclass(frozen=True)
class FiniteSet:
    """A finite label domain."""

    labels: tuple[str, ...]


SetDescriptor = IntervalUnion | Interval | Points


def as_interval_union(K: SetDescriptor | Sequence[tuple[float, float]]) -> IntervalUnion | Points:
    """Normalize a query-set argument."""
    if isinstance(K, IntervalUnion):
        return K
    if isinstance(K, Interval):
        return IntervalUnion((K,))
    if isinstance(K, Points):
        return K
    if isinstance(K, Sequence):
        return IntervalUnion.of(*[Interval(float(a), float(b)) for a, b in K])
    raise ArgumentError(f"cannot interpret {K!r} as a query set")


def require_within(K: IntervalUnion | Points, domain: Interval, tol: float = 1e-9) -> None:
    if isinstance(K, Points):
        for x in K.values:
            if not domain.contains(x, tol):
                raise DomainError(f"point {x} outside domain [{domain.lo}, {domain.hi}]")
        return
    if not K.issubset(domain, tol):
        raise DomainError(f"query set {K} not contained in domain [{domain.lo}, {domain.hi}]")


def horizon_point(domain: Interval, side: int, anchor: float, scale: float = 1.0) -> float:
    """Probe point used to stand in for an infinite domain endpoint.

    ``side`` is -1 for the lower end, +1 for the upper end; ``anchor`` is the
    last finite feature of interest (mode, data location).
    """
    end = domain.lo if side < 0 else domain.hi
    if math.isfinite(end):
        return end
    return anchor + side * (TAIL_HORIZON + abs(scale))
