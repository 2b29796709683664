"""Online smoothed conformal transducer.

Maintains the multiset of past conformity scores and emits one smoothed
p-value per incoming example:

    p = (#{scores < alpha_n} + tau * #{scores == alpha_n}) / n

where the bag already includes the new example's score and tau is a fresh
uniform tie-breaking draw. Under exchangeable data the emitted p-values
are IID uniform on (0, 1], for any conformity measure.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass
from typing import Iterable

from .conformity import ConformityMeasure
from .gaussian import Example
from .rng import RandomStream


class ScoreStore:
    """Sorted multiset of scores with rank queries.

    Backed by a sorted buffer: O(log n) rank queries, O(n) memmove on
    insert, which is ample for the stream lengths this package targets.
    """

    def __init__(self):
        self._scores: list[float] = []

    @property
    def size(self) -> int:
        return len(self._scores)

    def insert(self, alpha: float) -> None:
        insort(self._scores, alpha)

    def count_less(self, alpha: float) -> int:
        return bisect_left(self._scores, alpha)

    def count_equal(self, alpha: float) -> int:
        return bisect_right(self._scores, alpha) - bisect_left(self._scores, alpha)

    def kth_smallest(self, k: int) -> float:
        """1-based order statistic."""
        if not 1 <= k <= len(self._scores):
            raise IndexError(f"rank {k} out of range for store of size {len(self._scores)}")
        return self._scores[k - 1]


@dataclass(frozen=True)
class PValue:
    value: float
    step_index: int


def observe(store: ScoreStore, alpha_n: float, tau: float) -> PValue:
    """Smoothed p-value of alpha_n against the store.

    alpha_n must already have been inserted (the bag includes the new
    example), so count_equal >= 1 and the result lies in [tau/n, 1].
    """
    if store.size == 0:
        raise ValueError("score store is empty")
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    p = (store.count_less(alpha_n) + tau * store.count_equal(alpha_n)) / store.size
    return PValue(p, store.size)


def run_transducer(measure: ConformityMeasure,
                   stream: Iterable[Example],
                   rng: RandomStream) -> list[PValue]:
    """Feed a stream through the transducer, one p-value per example.

    One tie-breaking uniform is consumed per example. Stateful measures
    (the convex ensemble) are reset at the start of the run.
    """
    measure.reset()
    store = ScoreStore()
    out: list[PValue] = []
    for z in stream:
        alpha = measure.score(z)
        store.insert(alpha)
        out.append(observe(store, alpha, rng.uniform()))
    return out
