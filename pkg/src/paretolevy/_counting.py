"""Static 2-D dominance counting for joint exceedance queries.

Answers #{i : a_i >= x, b_i >= y} in O(log^2 n) per query after an
O(n log n) build.  Layout: points sorted by ``a``; for every power-of-two
block size the companion ``b`` values are kept block-sorted, so a suffix in
``a``-order decomposes into O(log n) aligned blocks, each answered by one
binary search.  Memory is O(n log n), against O(n^2) for a full grid.
"""

from __future__ import annotations

import numpy as np


class JointExceedanceCounter:
    def __init__(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.ndim != 1 or a.shape != b.shape:
            raise ValueError("a and b must be 1-D arrays of equal length")
        order = np.argsort(a, kind="stable")
        self._a = a[order]
        self._n = int(a.size)
        levels = [b[order]]
        width = 1
        while width < self._n:
            width *= 2
            padded = np.full(-(-self._n // width) * width, -np.inf)
            padded[: self._n] = levels[0]
            levels.append(np.sort(padded.reshape(-1, width), axis=1).ravel())
        self._levels = levels
        self._max_level = len(levels) - 1

    @property
    def size(self) -> int:
        return self._n

    def count(self, x: float, y: float) -> int:
        """#{i : a_i >= x and b_i >= y}."""
        n = self._n
        pos = int(np.searchsorted(self._a, x, side="left"))
        if pos >= n:
            return 0
        if y == -np.inf:
            return n - pos
        total = 0
        while pos < n:
            if pos == 0:
                lvl = self._max_level
            else:
                lvl = min(self._max_level, (pos & -pos).bit_length() - 1)
            while (1 << lvl) > n - pos:
                lvl -= 1
            width = 1 << lvl
            seg = self._levels[lvl][pos: pos + width]
            total += width - int(np.searchsorted(seg, y, side="left"))
            pos += width
        return total
