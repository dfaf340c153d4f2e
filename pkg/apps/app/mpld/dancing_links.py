"""
Array-backed dancing links.

Node 0 is the root, nodes 1..C are column headers, the remaining nodes hold
the ones of the matrix. ``left/right/up/down`` are index links and
``size[c]`` counts the live nodes of column ``c``.
"""
import logging
from typing import Optional, Sequence

from app.mpld.cover_matrix import CoverMatrix
from app.mpld.errors import UsageError

logger = logging.getLogger(__name__)


class LinkedMatrix:
    def __init__(self, num_columns: int, rows: Sequence[Sequence[int]]):
        total = 1 + num_columns + sum(len(r) for r in rows)
        self.num_columns = num_columns
        self.left = [0] * total
        self.right = [0] * total
        self.up = list(range(total))
        self.down = list(range(total))
        self.column = [0] * total
        self.row_of = [-1] * total
        self.size = [0] * (num_columns + 1)
        self.row_head: list[int] = []
        self.covered = [False] * (num_columns + 1)
        self.hidden: list[bool] = [False] * len(rows)
        self._cover_stack: list[int] = []

        # header ring: root <-> 1 <-> ... <-> C <-> root
        for h in range(num_columns + 1):
            self.left[h] = h - 1 if h > 0 else num_columns
            self.right[h] = h + 1 if h < num_columns else 0
            self.column[h] = h

        node = num_columns + 1
        for r, cols in enumerate(rows):
            first = node
            for c in cols:
                header = c + 1
                self.column[node] = header
                self.row_of[node] = r
                self.down[node] = header
                self.up[node] = self.up[header]
                self.down[self.up[header]] = node
                self.up[header] = node
                self.size[header] += 1
                self.left[node] = node - 1 if node > first else first + len(cols) - 1
                self.right[node] = node + 1 if node < first + len(cols) - 1 else first
                node += 1
            self.row_head.append(first if cols else -1)

    # -- column operations -------------------------------------------------
    def cover(self, col: int) -> None:
        """Remove column ``col`` and every row that has a one in it"""
        c = col + 1
        if self.covered[c]:
            raise UsageError(f"column {col} is already covered")
        L, R, U, D = self.left, self.right, self.up, self.down
        R[L[c]] = R[c]
        L[R[c]] = L[c]
        i = D[c]
        while i != c:
            j = R[i]
            while j != i:
                U[D[j]] = U[j]
                D[U[j]] = D[j]
                self.size[self.column[j]] -= 1
                j = R[j]
            i = D[i]
        self.covered[c] = True
        if __debug__:
            self._cover_stack.append(col)

    def uncover(self, col: int) -> None:
        if __debug__:
            if not self._cover_stack or self._cover_stack[-1] != col:
                top = self._cover_stack[-1] if self._cover_stack else None
                raise UsageError(f"uncover({col}) out of order; last covered column is {top}")
            self._cover_stack.pop()
        c = col + 1
        L, R, U, D = self.left, self.right, self.up, self.down
        i = U[c]
        while i != c:
            j = L[i]
            while j != i:
                self.size[self.column[j]] += 1
                U[D[j]] = j
                D[U[j]] = j
                j = L[j]
            i = U[i]
        R[L[c]] = c
        L[R[c]] = c
        self.covered[c] = False

    # -- row operations ----------------------------------------------------
    def hide_row(self, row: int) -> None:
        head = self.row_head[row]
        if head < 0 or self.hidden[row]:
            return
        U, D = self.up, self.down
        j = head
        while True:
            U[D[j]] = U[j]
            D[U[j]] = D[j]
            self.size[self.column[j]] -= 1
            j = self.right[j]
            if j == head:
                break
        self.hidden[row] = True

    def unhide_row(self, row: int) -> None:
        head = self.row_head[row]
        if head < 0 or not self.hidden[row]:
            return
        U, D = self.up, self.down
        j = self.left[head]
        while True:
            self.size[self.column[j]] += 1
            U[D[j]] = j
            D[U[j]] = j
            if j == head:
                break
            j = self.left[j]
        self.hidden[row] = False

    # -- queries -----------------------------------------------------------
    def is_live(self, col: int) -> bool:
        return not self.covered[col + 1]

    def live_size(self, col: int) -> int:
        return self.size[col + 1]

    def live_rows(self, col: int) -> list[int]:
        c = col + 1
        rows = []
        i = self.down[c]
        while i != c:
            rows.append(self.row_of[i])
            i = self.down[i]
        return rows

    def live_columns(self) -> list[int]:
        cols = []
        c = self.right[0]
        while c != 0:
            cols.append(c - 1)
            c = self.right[c]
        return cols

    def snapshot(self) -> tuple:
        return (
            tuple(self.left),
            tuple(self.right),
            tuple(self.up),
            tuple(self.down),
            tuple(self.size),
            tuple(self.covered),
            tuple(self.hidden),
        )


def select_column(matrix: LinkedMatrix, order: Sequence[int]) -> Optional[int]:
    """First live column with exactly one live row in ``order``, else the first
    live column, else None."""
    fallback = None
    for col in order:
        if matrix.covered[col + 1]:
            continue
        if matrix.size[col + 1] == 1:
            return col
        if fallback is None:
            fallback = col
    return fallback


class DancingLinksState:
    """Search state over a :class:`CoverMatrix` kept in a :class:`LinkedMatrix`"""

    def __init__(self, cover: CoverMatrix):
        self.cover = cover
        self.links = LinkedMatrix(cover.num_columns, [(r.feature_column,) for r in cover.rows])
        self.removed_at = [0] * len(cover.rows)
        self._removed: dict[int, list[int]] = {}
        self._row_column = [r.feature_column for r in cover.rows]

    def select_column(self) -> Optional[int]:
        return select_column(self.links, self.cover.column_order)

    def live_rows(self, col: int) -> list[int]:
        return sorted(self.links.live_rows(col))

    def dead_rows(self, col: int) -> list[int]:
        return [r for r in self.cover.rows_of(col) if self.links.hidden[r]]

    def empty_columns(self) -> int:
        return sum(1 for c in self.links.live_columns() if self.links.live_size(c) == 0)

    def remover_depth(self, row: int) -> int:
        return self.removed_at[row]

    def cover_column(self, col: int, depth: int) -> None:
        self.links.cover(col)

    def uncover_column(self, col: int, depth: int) -> None:
        self.links.uncover(col)

    def assign_row(self, row: int, depth: int) -> None:
        removed = []
        for t in self.cover.rows[row].conflict_row_ids:
            if self.links.hidden[t] or self.links.covered[self._row_column[t] + 1]:
                continue
            self.links.hide_row(t)
            self.removed_at[t] = depth
            removed.append(t)
        self._removed[depth] = removed

    def undo_rows(self, depth: int) -> None:
        for t in reversed(self._removed.pop(depth, [])):
            self.links.unhide_row(t)
            self.removed_at[t] = 0
