"""
Flat-array cover state.

Links are replaced by epochs: ``row_epoch[r] == 0`` means row ``r`` is live,
otherwise it holds the search depth that removed it. Covering and
uncovering become masked element-wise updates over index arrays, so every
step is a handful of vectorized numpy kernels instead of pointer chasing.
"""
import logging
from typing import Optional

import numpy as np

from app.mpld.cover_matrix import CoverMatrix
from app.mpld.errors import UsageError

logger = logging.getLogger(__name__)


class FlatCoverState:
    def __init__(self, cover: CoverMatrix):
        self.cover = cover
        n_rows = len(cover.rows)
        n_cols = cover.num_columns

        self.row_col = np.fromiter((r.feature_column for r in cover.rows), dtype=np.int32, count=n_rows)
        bounds = np.array(cover.column_rows, dtype=np.int64).reshape(n_cols, 2)
        self.col_start = bounds[:, 0]
        self.col_end = bounds[:, 1]

        lengths = np.fromiter((len(r.conflict_row_ids) for r in cover.rows), dtype=np.int64, count=n_rows)
        self.conf_ptr = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(lengths, out=self.conf_ptr[1:])
        self.conf_idx = np.fromiter(
            (t for r in cover.rows for t in r.conflict_row_ids), dtype=np.int32, count=int(self.conf_ptr[-1])
        )

        self.order = np.array(cover.column_order, dtype=np.int32)
        self.row_epoch = np.zeros(n_rows, dtype=np.int32)
        self.col_epoch = np.zeros(n_cols, dtype=np.int32)
        self.live_count = (self.col_end - self.col_start).astype(np.int32)
        self._cover_stack: list[int] = []

    # -- kernels -----------------------------------------------------------
    def select_column(self) -> Optional[int]:
        live = self.col_epoch[self.order] == 0
        single = live & (self.live_count[self.order] == 1)
        if single.any():
            return int(self.order[np.argmax(single)])
        if live.any():
            return int(self.order[np.argmax(live)])
        return None

    def cover_column(self, col: int, depth: int) -> None:
        if self.col_epoch[col] != 0:
            raise UsageError(f"column {col} is already covered")
        self.col_epoch[col] = depth
        if __debug__:
            self._cover_stack.append(col)

    def uncover_column(self, col: int, depth: int) -> None:
        if __debug__:
            if not self._cover_stack or self._cover_stack[-1] != col:
                top = self._cover_stack[-1] if self._cover_stack else None
                raise UsageError(f"uncover({col}) out of order; last covered column is {top}")
            self._cover_stack.pop()
        self.col_epoch[col] = 0

    def assign_row(self, row: int, depth: int) -> None:
        targets = self.conf_idx[self.conf_ptr[row]:self.conf_ptr[row + 1]]
        if targets.size == 0:
            return
        mask = (self.row_epoch[targets] == 0) & (self.col_epoch[self.row_col[targets]] == 0)
        hit = targets[mask]
        self.row_epoch[hit] = depth
        np.subtract.at(self.live_count, self.row_col[hit], 1)

    def undo_rows(self, depth: int) -> None:
        hit = np.flatnonzero(self.row_epoch == depth)
        if hit.size == 0:
            return
        self.row_epoch[hit] = 0
        np.add.at(self.live_count, self.row_col[hit], 1)

    # -- queries -----------------------------------------------------------
    def live_rows(self, col: int) -> list[int]:
        start, end = int(self.col_start[col]), int(self.col_end[col])
        return (np.flatnonzero(self.row_epoch[start:end] == 0) + start).tolist()

    def dead_rows(self, col: int) -> list[int]:
        start, end = int(self.col_start[col]), int(self.col_end[col])
        return (np.flatnonzero(self.row_epoch[start:end] != 0) + start).tolist()

    def empty_columns(self) -> int:
        return int(np.count_nonzero((self.col_epoch == 0) & (self.live_count == 0)))

    def remover_depth(self, row: int) -> int:
        return int(self.row_epoch[row])
