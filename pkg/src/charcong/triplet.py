"""The invariant-carrying reduction engine.

A Triplet holds a frozen source matrix B together with (L, E, R) such that
B*R = L*E at all times.  Elementary row and column operations transform E
and are compensated on L or R, so every intermediate E certifies how its
columns combine columns of B.  A zero column of E at position j therefore
hands over R's column j as an exact kernel vector of B.

Public operation indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .cyclo_ring import CycloElement, RingDescriptor
from .dirichlet import character_matrix


class TripletError(Exception):
    """Base class for triplet operation failures."""


class InvalidOperationError(TripletError):
    """Malformed elementary operation (bad indices or non-unit dilation)."""


class NothingToUndoError(TripletError):
    """undo() on an empty operation log."""


@dataclass(frozen=True)
class ReductionReport:
    """Shape summary of a reduced E.

    pseudo_rank is the size of the leading identity block, guaranteed_kernel
    the number of zero columns, and q_rows x q_cols the bounding size of the
    block of nonzero leftovers outside the identity.  q_has_unit flags any
    invertible entry outside the identity block; normalize() leaves none.
    """

    pseudo_rank: int
    guaranteed_kernel: int
    q_rows: int
    q_cols: int
    q_has_unit: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "pseudo_rank": self.pseudo_rank,
            "guaranteed_kernel": self.guaranteed_kernel,
            "q_rows": self.q_rows,
            "q_cols": self.q_cols,
            "q_has_unit": self.q_has_unit,
        }


ELEMENTARY_KINDS = (
    "row_add",
    "col_add",
    "swap_rows",
    "swap_cols",
    "dilate_row",
    "dilate_col",
)

COMPOSITE_KINDS = ("pivot", "migrate", "normalize")


class Triplet:
    """Mutable (L, E, R) with the frozen source B and an operation log.

    The log records elementary operations only; composite ops (pivot,
    migrate_zeros, normalize) append the elementary steps they take, which
    keeps undo() a strict single-step inverse and makes any session state
    reproducible by replaying the log against a fresh triplet.
    """

    def __init__(self, entries: Sequence[Sequence[CycloElement]]):
        rows = [list(r) for r in entries]
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        ring = rows[0][0].ring
        if ring.M < 2:
            raise ValueError("triplet reduction needs a finite quotient (M >= 2)")
        for r in rows:
            if len(r) != len(rows[0]):
                raise ValueError("ragged matrix")
            for a in r:
                if a.ring != ring:
                    raise ValueError("all entries must share one ring")
        self.ring = ring
        self.m = len(rows)
        self.n = len(rows[0])
        self.B: tuple[tuple[CycloElement, ...], ...] = tuple(tuple(r) for r in rows)
        self.L = _identity(ring, self.m)
        self.E = [list(r) for r in rows]
        self.R = _identity(ring, self.n)
        self.op_log: list[dict[str, Any]] = []

    @classmethod
    def from_character_matrix(cls, N: int, M: int) -> "Triplet":
        return cls(character_matrix(N).mod(M).entries)

    # -- elementary operations ------------------------------------------

    def row_addition(self, i: int, j: int, a: Any) -> None:
        """E row i += a * row j, compensated on L (column j -= a * column i)."""
        self._apply({"kind": "row_add", "args": [i, j, self._coerce(a)]}, log=True)

    def column_addition(self, i: int, j: int, a: Any) -> None:
        """E column j += a * column i, mirrored on R."""
        self._apply({"kind": "col_add", "args": [i, j, self._coerce(a)]}, log=True)

    def swap_rows(self, i: int, j: int) -> None:
        self._apply({"kind": "swap_rows", "args": [i, j]}, log=True)

    def swap_columns(self, i: int, j: int) -> None:
        self._apply({"kind": "swap_cols", "args": [i, j]}, log=True)

    def dilate_row(self, i: int, a: Any) -> None:
        """E row i *= a for a unit a, compensated on L by the inverse."""
        self._apply({"kind": "dilate_row", "args": [i, self._coerce(a)]}, log=True)

    def dilate_column(self, i: int, a: Any) -> None:
        self._apply({"kind": "dilate_col", "args": [i, self._coerce(a)]}, log=True)

    def _coerce(self, a: Any) -> CycloElement:
        try:
            return self.ring.coerce(a)
        except ValueError as exc:
            raise InvalidOperationError(str(exc)) from None

    def _check_row(self, i: int) -> None:
        if not 1 <= i <= self.m:
            raise InvalidOperationError(f"row index {i} out of range 1..{self.m}")

    def _check_col(self, j: int) -> None:
        if not 1 <= j <= self.n:
            raise InvalidOperationError(f"column index {j} out of range 1..{self.n}")

    def _apply(self, op: dict[str, Any], log: bool) -> None:
        kind = op["kind"]
        args = op["args"]
        ring = self.ring
        if kind == "row_add":
            i, j, a = args
            self._check_row(i)
            self._check_row(j)
            if i == j:
                raise InvalidOperationError("row_add needs distinct rows")
            ii, jj = i - 1, j - 1
            self.E[ii] = [x + a * y for x, y in zip(self.E[ii], self.E[jj])]
            for row in self.L:
                row[jj] = row[jj] - a * row[ii]
        elif kind == "col_add":
            i, j, a = args
            self._check_col(i)
            self._check_col(j)
            if i == j:
                raise InvalidOperationError("col_add needs distinct columns")
            ii, jj = i - 1, j - 1
            for row in self.E:
                row[jj] = row[jj] + a * row[ii]
            for row in self.R:
                row[jj] = row[jj] + a * row[ii]
        elif kind == "swap_rows":
            i, j = args
            self._check_row(i)
            self._check_row(j)
            ii, jj = i - 1, j - 1
            self.E[ii], self.E[jj] = self.E[jj], self.E[ii]
            for row in self.L:
                row[ii], row[jj] = row[jj], row[ii]
        elif kind == "swap_cols":
            i, j = args
            self._check_col(i)
            self._check_col(j)
            ii, jj = i - 1, j - 1
            for row in self.E:
                row[ii], row[jj] = row[jj], row[ii]
            for row in self.R:
                row[ii], row[jj] = row[jj], row[ii]
        elif kind == "dilate_row":
            i, a = args
            self._check_row(i)
            if not ring.is_unit(a):
                raise InvalidOperationError("dilation coefficient must be a unit")
            inv = ring.invert(a)
            ii = i - 1
            self.E[ii] = [a * x for x in self.E[ii]]
            for row in self.L:
                row[ii] = row[ii] * inv
        elif kind == "dilate_col":
            i, a = args
            self._check_col(i)
            if not ring.is_unit(a):
                raise InvalidOperationError("dilation coefficient must be a unit")
            ii = i - 1
            for row in self.E:
                row[ii] = row[ii] * a
            for row in self.R:
                row[ii] = row[ii] * a
        else:
            raise InvalidOperationError(f"unknown elementary operation {kind!r}")
        if log:
            self.op_log.append(op)

    # -- composite operations --------------------------------------------

    def pivot(self) -> int:
        """Sweep unit pivots onto the diagonal.

        For k = 1, 2, ...: scan rows then columns from (k, k) for a unit
        entry, move it to (k, k), scale it to 1, clear its column and row.
        Stops when the remaining block holds no unit.  Returns the number
        of pivots placed (the pseudo-rank).
        """
        ring = self.ring
        k = 0
        limit = min(self.m, self.n)
        while k < limit:
            found = None
            for i in range(k, self.m):
                for j in range(k, self.n):
                    a = self.E[i][j]
                    if any(a.coeffs) and ring.is_unit(a):
                        found = (i, j)
                        break
                if found:
                    break
            if not found:
                break
            i, j = found
            if i != k:
                self.swap_rows(k + 1, i + 1)
            if j != k:
                self.swap_columns(k + 1, j + 1)
            pivot_val = self.E[k][k]
            if pivot_val != ring.one:
                self.dilate_row(k + 1, ring.invert(pivot_val))
            for r in range(self.m):
                if r != k and any(self.E[r][k].coeffs):
                    self.row_addition(r + 1, k + 1, -self.E[r][k])
            for c in range(self.n):
                if c != k and any(self.E[k][c].coeffs):
                    self.column_addition(k + 1, c + 1, -self.E[k][c])
            k += 1
        return k

    def migrate_zeros(self) -> None:
        """Move zero rows to the bottom and zero columns to the right,
        keeping the relative order of the nonzero ones (stable)."""

        def realize(order: list[int], swap) -> None:
            cur = list(range(len(order)))
            for target, want in enumerate(order):
                pos = cur.index(want)
                if pos != target:
                    swap(target + 1, pos + 1)
                    cur[target], cur[pos] = cur[pos], cur[target]

        row_zero = [not any(any(a.coeffs) for a in row) for row in self.E]
        row_order = [i for i, z in enumerate(row_zero) if not z] + [
            i for i, z in enumerate(row_zero) if z
        ]
        realize(row_order, self.swap_rows)
        col_zero = [
            not any(any(self.E[i][j].coeffs) for i in range(self.m))
            for j in range(self.n)
        ]
        col_order = [j for j, z in enumerate(col_zero) if not z] + [
            j for j, z in enumerate(col_zero) if z
        ]
        realize(col_order, self.swap_columns)

    def normalize(self) -> ReductionReport:
        """pivot() then migrate_zeros(); returns the reduction report."""
        self.pivot()
        self.migrate_zeros()
        return self.report()

    def report(self) -> ReductionReport:
        """Structural report on the current E (exact, no cached state)."""
        ring = self.ring
        r = 0
        limit = min(self.m, self.n)
        while r < limit:
            if self.E[r][r] != ring.one:
                break
            if any(any(self.E[r][c].coeffs) for c in range(self.n) if c != r):
                break
            if any(any(self.E[i][r].coeffs) for i in range(self.m) if i != r):
                break
            r += 1
        zero_cols = sum(
            1
            for j in range(self.n)
            if not any(any(self.E[i][j].coeffs) for i in range(self.m))
        )
        q_rows = sum(
            1
            for i in range(r, self.m)
            if any(any(a.coeffs) for a in self.E[i])
        )
        q_cols = self.n - r - zero_cols
        q_has_unit = False
        for i in range(self.m):
            for j in range(self.n):
                if i < r and j < r:
                    continue
                a = self.E[i][j]
                if any(a.coeffs) and ring.is_unit(a):
                    q_has_unit = True
                    break
            if q_has_unit:
                break
        return ReductionReport(
            pseudo_rank=r,
            guaranteed_kernel=zero_cols,
            q_rows=q_rows,
            q_cols=q_cols,
            q_has_unit=q_has_unit,
        )

    # -- checks and undo ---------------------------------------------------

    def assert_invariant(self) -> bool:
        """Recompute B*R and L*E and compare entrywise."""
        br = _mat_mul(self.B, self.R)
        le = _mat_mul(self.L, self.E)
        return br == le

    def check_kernel_vector(
        self, coeffs: Sequence[Any]
    ) -> tuple[bool, list[CycloElement]]:
        """(True, R*v) when E*v = 0, else (False, E*v).

        On success R*v is an exact kernel vector of B, hence a congruence
        vector when B is a character matrix.
        """
        if len(coeffs) != self.n:
            raise ValueError(f"need {self.n} coefficients, got {len(coeffs)}")
        v = [self.ring.coerce(c) for c in coeffs]
        residual = _mat_vec(self.E, v)
        if all(not any(a.coeffs) for a in residual):
            return True, _mat_vec(self.R, v)
        return False, residual

    def undo(self) -> None:
        """Revert the most recent elementary operation."""
        if not self.op_log:
            raise NothingToUndoError("operation log is empty")
        op = self.op_log.pop()
        kind, args = op["kind"], op["args"]
        if kind in ("row_add", "col_add"):
            i, j, a = args
            inverse = {"kind": kind, "args": [i, j, -a]}
        elif kind in ("swap_rows", "swap_cols"):
            inverse = op
        elif kind in ("dilate_row", "dilate_col"):
            i, a = args
            inverse = {"kind": kind, "args": [i, self.ring.invert(a)]}
        else:  # pragma: no cover - log only ever holds elementary kinds
            raise InvalidOperationError(f"cannot undo {kind!r}")
        self._apply(inverse, log=False)

    # -- scripted application and serialization ----------------------------

    def apply_op(self, kind: str, args: Sequence[Any] = ()) -> None:
        """Apply one operation by its serialized kind.

        Composite kinds expand into logged elementary steps; "undo" pops one.
        """
        if kind == "row_add":
            self.row_addition(int(args[0]), int(args[1]), args[2])
        elif kind == "col_add":
            self.column_addition(int(args[0]), int(args[1]), args[2])
        elif kind == "swap_rows":
            self.swap_rows(int(args[0]), int(args[1]))
        elif kind == "swap_cols":
            self.swap_columns(int(args[0]), int(args[1]))
        elif kind == "dilate_row":
            self.dilate_row(int(args[0]), args[1])
        elif kind == "dilate_col":
            self.dilate_column(int(args[0]), args[1])
        elif kind == "pivot":
            self.pivot()
        elif kind == "migrate":
            self.migrate_zeros()
        elif kind == "normalize":
            self.normalize()
        elif kind == "undo":
            self.undo()
        else:
            raise InvalidOperationError(f"unknown operation kind {kind!r}")

    def snapshot(self) -> dict[str, Any]:
        ring = self.ring
        return {
            "m": self.m,
            "n": self.n,
            "ring": {
                "e": ring.e,
                "d": ring.d,
                "M": ring.M,
                "min_poly": list(ring.min_poly),
            },
            "L": _grid_json(self.L),
            "E": _grid_json(self.E),
            "R": _grid_json(self.R),
            "report": self.report().to_json(),
            "log": [
                {
                    "kind": op["kind"],
                    "args": [
                        a.to_json() if isinstance(a, CycloElement) else a
                        for a in op["args"]
                    ],
                }
                for op in self.op_log
            ],
            "unit_flags": [
                [bool(any(a.coeffs)) and ring.is_unit(a) for a in row]
                for row in self.E
            ],
        }


def new_triplet(entries: Sequence[Sequence[CycloElement]]) -> Triplet:
    """Fresh triplet (I, B, I) around a frozen matrix B."""
    return Triplet(entries)


def _identity(ring: RingDescriptor, k: int) -> list[list[CycloElement]]:
    return [
        [ring.one if i == j else ring.zero for j in range(k)] for i in range(k)
    ]


def _mat_mul(
    a: Sequence[Sequence[CycloElement]], b: Sequence[Sequence[CycloElement]]
) -> list[list[CycloElement]]:
    ring = a[0][0].ring
    rows = len(a)
    inner = len(b)
    cols = len(b[0])
    out = []
    for i in range(rows):
        arow = a[i]
        orow = []
        for j in range(cols):
            acc = ring.zero
            for k in range(inner):
                x = arow[k]
                if any(x.coeffs):
                    y = b[k][j]
                    if any(y.coeffs):
                        acc = acc + x * y
            orow.append(acc)
        out.append(orow)
    return out


def _mat_vec(
    a: Sequence[Sequence[CycloElement]], v: Sequence[CycloElement]
) -> list[CycloElement]:
    ring = v[0].ring
    out = []
    for row in a:
        acc = ring.zero
        for x, y in zip(row, v):
            if any(x.coeffs) and any(y.coeffs):
                acc = acc + x * y
        out.append(acc)
    return out


def _grid_json(grid: Iterable[Iterable[CycloElement]]) -> list[list[dict]]:
    return [[a.to_json() for a in row] for row in grid]
