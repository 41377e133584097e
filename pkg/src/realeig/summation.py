"""Compensated (Neumaier) summation.

Every alternating accumulation in the package runs through one of these
helpers: the series terms span many orders of magnitude and plain += loses
the cancellation structure.
"""
from __future__ import annotations

import math


class NeumaierSum:
    """Running Neumaier-compensated sum with cancellation bookkeeping.

    Tracks the largest intermediate partial-sum magnitude so callers can
    bound the roundoff floor of the final result: the floor is roughly
    max_partial * 2**-52.
    """

    __slots__ = ("_sum", "_comp", "max_partial", "count")

    def __init__(self):
        self._sum = 0.0
        self._comp = 0.0
        self.max_partial = 0.0
        self.count = 0

    def add(self, value: float) -> None:
        t = self._sum + value
        if abs(self._sum) >= abs(value):
            self._comp += (self._sum - t) + value
        else:
            self._comp += (value - t) + self._sum
        self._sum = t
        self.count += 1
        a = abs(t)
        if a > self.max_partial:
            self.max_partial = a

    @property
    def total(self) -> float:
        return self._sum + self._comp

    def cancellation_floor(self) -> float:
        """Estimated roundoff noise of total given the partial-sum history."""
        return self.max_partial * 2.0 ** -52 * max(1.0, math.sqrt(self.count))


def neumaier_total(values) -> float:
    acc = NeumaierSum()
    for v in values:
        acc.add(v)
    return acc.total
