"""Mapping between dense Cholesky grids and sphere-product blocks.

Row i (1-based, i >= 2) of a w-banded factor has free columns
max(1, i - w + 1) .. i, so it lives on S^{min(i, w) - 1} with the diagonal
entry as its last coordinate. Rows of equal free dimension are stacked into
one block of shape (N * rows, d), ordered time-major, so every sampler
operation on them is a single vectorized call. Row 1 is the constant +1.
"""

from dataclasses import dataclass

import numpy as np

from src.utils.errors import InvalidConfigError
from src.utils.types import Blocks, FloatArray, IntArray


@dataclass(frozen=True)
class RowGroup:
    """Rows sharing a free dimension."""

    dim: int
    rows: IntArray
    cols: IntArray

    @property
    def size(self) -> int:
        return int(self.rows.size)


class RowLayout:
    """Free-coordinate layout of a D x D (optionally w-banded) Cholesky factor."""

    def __init__(self, dim: int, band: int | None = None) -> None:
        band = dim if band is None else band
        if dim < 1 or not 1 <= band <= dim:
            raise InvalidConfigError("Band width must lie in [1, D]", {"dim": dim, "band": band})
        self.dim = dim
        self.band = band

        by_dim: dict[int, list[int]] = {}
        for row in range(1, dim):
            by_dim.setdefault(min(row + 1, band), []).append(row)

        groups = []
        for free_dim in sorted(by_dim):
            rows = np.asarray(by_dim[free_dim], dtype=np.int64)
            cols = rows[:, None] - free_dim + 1 + np.arange(free_dim, dtype=np.int64)[None, :]
            groups.append(RowGroup(free_dim, rows, cols))
        self.groups: tuple[RowGroup, ...] = tuple(groups)

    @property
    def is_full(self) -> bool:
        return self.band == self.dim

    @property
    def free_dims_per_time(self) -> int:
        """Number of free GP components per time point (sum of row lengths, row 1 excluded)."""
        return sum(group.dim * group.size for group in self.groups)

    def band_mask(self) -> FloatArray:
        rows, cols = np.indices((self.dim, self.dim))
        return ((rows >= cols) & (rows - cols < self.band)).astype(np.float64)

    def entry_indices(self) -> tuple[IntArray, IntArray]:
        """Row-major (i, j) indices of all in-band lower entries, diagonal included."""
        rows, cols = np.tril_indices(self.dim)
        keep = rows - cols < self.band
        return rows[keep].astype(np.int64), cols[keep].astype(np.int64)

    def pair_indices(self) -> tuple[IntArray, IntArray]:
        """Row-major (i, j), i > j, indices of correlations that can be nonzero."""
        rows, cols = np.tril_indices(self.dim, -1)
        keep = rows - cols < self.band
        return rows[keep].astype(np.int64), cols[keep].astype(np.int64)

    def gather(self, dense: FloatArray) -> list[FloatArray]:
        """(N, D, D) factors -> blocks of free row coordinates."""
        n_times = dense.shape[0]
        return [
            np.ascontiguousarray(dense[:, group.rows[:, None], group.cols]).reshape(n_times * group.size, group.dim)
            for group in self.groups
        ]

    def scatter(self, blocks: Blocks, n_times: int) -> FloatArray:
        """Blocks of free row coordinates -> (N, D, D) factors with l_11 = 1."""
        dense = np.zeros((n_times, self.dim, self.dim))
        dense[:, 0, 0] = 1.0
        for group, block in zip(self.groups, blocks):
            dense[:, group.rows[:, None], group.cols] = block.reshape(n_times, group.size, group.dim)
        return dense

    def pole_blocks(self, n_times: int) -> list[FloatArray]:
        """Every row at its pole n_i = (0, ..., 0, 1)."""
        blocks = []
        for group in self.groups:
            block = np.zeros((n_times * group.size, group.dim))
            block[:, -1] = 1.0
            blocks.append(block)
        return blocks

    # Banded storage: band[n, i, k] = L_n[i, i - w + 1 + k]; column w - 1 is the diagonal.

    def blocks_to_band(self, blocks: Blocks, n_times: int) -> FloatArray:
        band = np.zeros((n_times, self.dim, self.band))
        band[:, 0, -1] = 1.0
        for group, block in zip(self.groups, blocks):
            band[:, group.rows, self.band - group.dim :] = block.reshape(n_times, group.size, group.dim)
        return band

    def band_to_blocks(self, band: FloatArray) -> list[FloatArray]:
        n_times = band.shape[0]
        return [
            np.ascontiguousarray(band[:, group.rows, self.band - group.dim :]).reshape(n_times * group.size, group.dim)
            for group in self.groups
        ]

    def band_to_dense(self, band: FloatArray) -> FloatArray:
        rows, cols = self.entry_indices()
        dense = np.zeros((band.shape[0], self.dim, self.dim))
        dense[:, rows, cols] = band[:, rows, cols - rows + self.band - 1]
        return dense

    def dense_to_band(self, dense: FloatArray) -> FloatArray:
        rows, cols = self.entry_indices()
        band = np.zeros((dense.shape[0], self.dim, self.band))
        band[:, rows, cols - rows + self.band - 1] = dense[:, rows, cols]
        return band

    def band_entries(self, band: FloatArray) -> FloatArray:
        """(N, entries) in the row-major order of `entry_indices`."""
        rows, cols = self.entry_indices()
        return np.asarray(band[:, rows, cols - rows + self.band - 1])

    def stack_centered(self, blocks: Blocks, n_times: int) -> FloatArray:
        """(N, free) matrix of row coordinates minus their poles, one column per GP component."""
        parts = []
        for group, block in zip(self.groups, blocks):
            centered = block.copy()
            centered[:, -1] -= 1.0
            parts.append(centered.reshape(n_times, group.size * group.dim))
        return np.hstack(parts) if parts else np.zeros((n_times, 0))

    def split_stacked(self, stacked: FloatArray, n_times: int) -> list[FloatArray]:
        """Inverse of `stack_centered` for gradients (no pole shift)."""
        blocks = []
        start = 0
        for group in self.groups:
            width = group.size * group.dim
            blocks.append(stacked[:, start : start + width].reshape(n_times * group.size, group.dim))
            start += width
        return blocks
