"""Block frequency counts and exact discrepancy over digit prefixes.

Counting walks every length-k window of a prefix (overlapping, n-k+1 of
them) with a vectorized rolling index, so the full count table for a
block length k is one bincount over an integer array.  The table covers
all base**k blocks, which is why requests are refused once base**k
exceeds _MAX_TABLE: the table itself would no longer fit desk-scale
memory.  Discrepancies are exact rationals, never floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceededError, SpecError
from .numstream import DigitPrefix, RealSpec, digits, spec_to_str

_MAX_TABLE = 10**7


@dataclass
class BlockCounts:
    """Occurrence counts for every base-b block of one length over a prefix."""

    base: int
    k: int
    n: int
    counts: np.ndarray  # shape (base**k,), dtype int64

    @property
    def windows(self) -> int:
        return self.n - self.k + 1

    def count(self, block) -> int:
        """Count of one block, given as a digit sequence of length k."""
        block = tuple(block)
        if len(block) != self.k:
            raise SpecError(f"block length {len(block)} != k={self.k}")
        idx = 0
        for d in block:
            if not 0 <= d < self.base:
                raise SpecError(f"digit {d} out of range for base {self.base}")
            idx = idx * self.base + d
        return int(self.counts[idx])


def _count_array(arr: np.ndarray, base: int, k: int) -> BlockCounts:
    n = int(arr.shape[0])
    if k < 1:
        raise SpecError("block length must be >= 1")
    if k > n:
        raise SpecError(f"block length {k} exceeds prefix length {n}")
    table = base**k
    if table > _MAX_TABLE:
        raise BudgetExceededError(
            f"count table base**k = {table} exceeds the {_MAX_TABLE} bound"
        )
    t = n - k + 1
    idx = np.zeros(t, dtype=np.int64)
    for j in range(k):
        idx *= base
        idx += arr[j : j + t]
    counts = np.bincount(idx, minlength=table)
    return BlockCounts(base, k, n, counts.astype(np.int64))


def count_blocks(prefix: DigitPrefix, k: int) -> BlockCounts:
    """Counts of every length-k block among the prefix's overlapping windows."""
    return _count_array(np.asarray(prefix.digits, dtype=np.int64), prefix.base, k)


def discrepancy(counts: BlockCounts) -> Fraction:
    """max over blocks w of |occurrences(w)/windows - base**-k|, exactly.

    The maximum deviation is attained at a block with extremal count, so
    two integer comparisons replace the sweep over base**k blocks.
    """
    t = counts.windows
    table = counts.base**counts.k
    hi = int(counts.counts.max())
    lo = int(counts.counts.min())
    dev = max(hi * table - t, t - lo * table)
    return Fraction(dev, t * table)


@dataclass
class NormalityReport:
    """Discrepancy profile of one spec: every (k, n) pair on the grid."""

    spec_string: str
    base: int
    k_max: int
    n_grid: list[int]
    rows: list[tuple[int, int, Fraction]]  # (k, n, discrepancy)

    CSV_HEADER = ("spec", "base", "k", "n", "discrepancy_num", "discrepancy_den")

    def csv_rows(self):
        for k, n, d in self.rows:
            yield (self.spec_string, self.base, k, n, d.numerator, d.denominator)

    def decreasing(self, k: int) -> bool:
        """Whether discrepancy strictly decreases along the grid at this k."""
        series = [d for kk, _, d in self.rows if kk == k]
        return all(a > b for a, b in zip(series, series[1:]))

    def to_text(self) -> str:
        lines = [f"normality profile for {self.spec_string} (base {self.base})"]
        for k, n, d in self.rows:
            lines.append(f"  k={k} n={n} discrepancy={d.numerator}/{d.denominator} ~ {float(d):.6g}")
        for k in range(1, self.k_max + 1):
            word = "strictly decreasing" if self.decreasing(k) else "not strictly decreasing"
            lines.append(f"  k={k}: {word} along the grid")
        return "\n".join(lines)


def normality_profile(
    spec: RealSpec, base: int, k_max: int, n_grid: list[int]
) -> NormalityReport:
    """Discrepancy of spec's base-b prefix for k = 1..k_max at each grid n."""
    if k_max < 1:
        raise SpecError("k_max must be >= 1")
    n_grid = sorted(set(int(n) for n in n_grid))
    if not n_grid or n_grid[0] < k_max:
        raise SpecError("grid lengths must be >= k_max and nonempty")
    arr = np.asarray(digits(spec, base, n_grid[-1]).digits, dtype=np.int64)
    rows = []
    for k in range(1, k_max + 1):
        for n in n_grid:
            rows.append((k, n, discrepancy(_count_array(arr[:n], base, k))))
    return NormalityReport(spec_to_str(spec), base, k_max, n_grid, rows)
