"""Young diagrams, their normal-form matrices and related checks.

A diagram is stored as its row lengths, sorted non-increasing.  Boxes are
indexed ``(a, i)`` with ``a = 1..k`` the row and ``i = 1..n_a`` the column;
the global (0-based) index of a box is fixed lexicographically by
``(row, column)``.  All matrices produced here use that one ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidDiagramError

__all__ = [
    "Level",
    "Superbox",
    "YoungDiagram",
    "NormalFormMatrices",
    "NormalityReport",
    "diagram_from_rows",
    "normal_form_matrices",
    "kalman_rank",
    "kalman_flag_dimensions",
    "vanishing_order",
    "zelenko_li_table",
    "zelenko_li_allowed",
    "is_zelenko_li_normal",
    "geodesic_dimension",
]


@dataclass(frozen=True)
class Level:
    """Maximal group of rows with equal length."""

    length: int
    size: int
    rows: tuple[int, ...]  # 1-based row indices


@dataclass(frozen=True)
class Superbox:
    """Boxes of one level sharing the same column."""

    level: int  # index into YoungDiagram.levels
    column: int  # 1-based column within the level
    boxes: tuple[int, ...]  # global 0-based box indices

    @property
    def size(self) -> int:
        return len(self.boxes)


@dataclass(frozen=True)
class YoungDiagram:
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) == 0:
            raise InvalidDiagramError("diagram needs at least one row")
        if any(int(r) != r or r < 1 for r in self.rows):
            raise InvalidDiagramError(f"row lengths must be positive integers, got {self.rows}")
        if any(self.rows[a] < self.rows[a + 1] for a in range(len(self.rows) - 1)):
            raise InvalidDiagramError("rows must be sorted non-increasing")

    @property
    def n(self) -> int:
        """Total box count (ambient dimension)."""
        return sum(self.rows)

    @property
    def k(self) -> int:
        """Number of rows (rank of the distribution)."""
        return len(self.rows)

    @cached_property
    def column_heights(self) -> tuple[int, ...]:
        m = self.rows[0]
        return tuple(sum(1 for r in self.rows if r >= i) for i in range(1, m + 1))

    @cached_property
    def levels(self) -> tuple[Level, ...]:
        out = []
        a = 0
        while a < self.k:
            b = a
            while b < self.k and self.rows[b] == self.rows[a]:
                b += 1
            out.append(Level(length=self.rows[a], size=b - a, rows=tuple(range(a + 1, b + 1))))
            a = b
        return tuple(out)

    @cached_property
    def row_offsets(self) -> tuple[int, ...]:
        off = [0]
        for r in self.rows:
            off.append(off[-1] + r)
        return tuple(off)

    def box_index(self, a: int, i: int) -> int:
        """Global 0-based index of box (a, i), both arguments 1-based."""
        if not (1 <= a <= self.k and 1 <= i <= self.rows[a - 1]):
            raise IndexError(f"box ({a},{i}) outside diagram {self.rows}")
        return self.row_offsets[a - 1] + (i - 1)

    @cached_property
    def boxes(self) -> tuple[tuple[int, int], ...]:
        """All boxes (a, i), 1-based, in global-index order."""
        return tuple((a, i) for a in range(1, self.k + 1) for i in range(1, self.rows[a - 1] + 1))

    @cached_property
    def superboxes(self) -> tuple[Superbox, ...]:
        out = []
        for li, lev in enumerate(self.levels):
            for i in range(1, lev.length + 1):
                out.append(Superbox(level=li, column=i, boxes=tuple(self.box_index(a, i) for a in lev.rows)))
        return tuple(out)

    def to_json(self) -> dict:
        return {"rows": list(self.rows)}

    @staticmethod
    def from_json(data: dict) -> "YoungDiagram":
        return diagram_from_rows(data["rows"])


def diagram_from_rows(row_lengths) -> YoungDiagram:
    """Build a diagram from row lengths (any order; stored sorted non-increasing)."""
    rows = list(row_lengths)
    if not rows:
        raise InvalidDiagramError("diagram needs at least one row")
    for r in rows:
        if int(r) != r or r < 1:
            raise InvalidDiagramError(f"row lengths must be positive integers, got {rows}")
    return YoungDiagram(tuple(sorted((int(r) for r in rows), reverse=True)))


@dataclass(frozen=True)
class NormalFormMatrices:
    gamma1: np.ndarray
    gamma2: np.ndarray

    @property
    def A(self) -> np.ndarray:
        """Drift of the associated model, A = gamma1^T."""
        return self.gamma1.T.copy()

    @property
    def B(self) -> np.ndarray:
        return self.gamma2.copy()


def normal_form_matrices(diagram: YoungDiagram) -> NormalFormMatrices:
    """Block-diagonal shift/projector pair of a diagram.

    Per row of length m the first factor is the m x m upper shift (ones on
    the superdiagonal) and the second is the rank-one projector onto the
    first basis vector; blocks are assembled along the diagonal in row order.
    """
    n = diagram.n
    g1 = np.zeros((n, n))
    g2 = np.zeros((n, n))
    for a in range(1, diagram.k + 1):
        for i in range(1, diagram.rows[a - 1]):
            g1[diagram.box_index(a, i), diagram.box_index(a, i + 1)] = 1.0
        g2[diagram.box_index(a, 1), diagram.box_index(a, 1)] = 1.0
    g1.setflags(write=False)
    g2.setflags(write=False)
    return NormalFormMatrices(gamma1=g1, gamma2=g2)


def kalman_flag_dimensions(A: np.ndarray, B: np.ndarray) -> list[int]:
    """Ranks of [B], [B, AB], ..., [B, ..., A^{n-1}B]."""
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A and B must be square of equal size, got {A.shape} and {B.shape}")
    n = A.shape[0]
    blocks = [B]
    dims = []
    for _ in range(n):
        stacked = np.hstack(blocks)
        dims.append(int(np.linalg.matrix_rank(stacked)))
        blocks.append(A @ blocks[-1])
    return dims


def kalman_rank(A: np.ndarray, B: np.ndarray) -> int:
    """Rank of the stacked controllability matrix [B, AB, ..., A^{n-1}B]."""
    return kalman_flag_dimensions(A, B)[-1]


def vanishing_order(A: np.ndarray, B: np.ndarray) -> int:
    """Order of vanishing of det N(t) at t = 0 for the (A, B) lift.

    Equals sum_i (2i - 1) * d_i where d_i are the rank increments of the
    Kalman flag; for the diagram pair (gamma1^T, gamma2) this is the
    geodesic dimension of the diagram.
    """
    dims = kalman_flag_dimensions(A, B)
    if dims[-1] != A.shape[0]:
        raise ValueError("(A, B) is not controllable; det N vanishes identically")
    increments = [dims[0]] + [dims[i] - dims[i - 1] for i in range(1, len(dims))]
    return sum((2 * i - 1) * d for i, d in enumerate(increments, start=1))


def geodesic_dimension(diagram: YoungDiagram) -> int:
    """Small-time volume-contraction exponent, sum_i (2i-1) d_i over columns."""
    return sum((2 * i - 1) * d for i, d in enumerate(diagram.column_heights, start=1))


def zelenko_li_table(n_a: int, n_b: int) -> list[tuple[int, int]]:
    """Zig-zag index sequence for a cross block with row lengths n_a > n_b.

    Starts at (1, 1); every even step raises j, every odd step raises i,
    until (n_b, n_b); after that only i grows, up to (n_a, n_b).  The
    sequence has n_a + n_b - 1 entries.
    """
    if not n_a > n_b >= 1:
        raise ValueError(f"table requires n_a > n_b >= 1, got ({n_a}, {n_b})")
    seq = [(1, 1)]
    i = j = 1
    step = 2
    while (i, j) != (n_b, n_b):
        if step % 2 == 0:
            j += 1
        else:
            i += 1
        seq.append((i, j))
        step += 1
    while i < n_a:
        i += 1
        seq.append((i, j))
    return seq


def zelenko_li_allowed(n_a: int, n_b: int) -> set[tuple[int, int]]:
    """Allowed (i, j) pairs of a cross block: last 2*n_b entries of the table."""
    return set(zelenko_li_table(n_a, n_b)[-2 * n_b:])


@dataclass(frozen=True)
class NormalityReport:
    normal: bool
    condition: str | None = None  # 'symmetry' | 'skew' | 'vanishing'
    first_box: tuple[int, int] | None = None  # (a, i), 1-based
    second_box: tuple[int, int] | None = None  # (b, j), 1-based
    value: float = 0.0

    def __bool__(self) -> bool:
        return self.normal

    def to_json(self) -> dict:
        return {
            "normal": self.normal,
            "condition": self.condition,
            "first_box": list(self.first_box) if self.first_box else None,
            "second_box": list(self.second_box) if self.second_box else None,
            "value": self.value,
        }


def is_zelenko_li_normal(R: np.ndarray, diagram: YoungDiagram, tol: float = 1e-12) -> NormalityReport:
    """Check normality of a curvature matrix indexed by the diagram's boxes.

    Conditions, each to tolerance ``tol``: (i) global symmetry,
    (ii) partial skew-symmetry R_{ai,b(i+1)} = -R_{bi,a(i+1)} for rows of
    equal length, (iii) vanishing outside the allowed pattern (|i-j| <= 1
    within equal-length rows; the zig-zag tail for unequal ones).  The
    report carries the first violated condition and its box indices.
    """
    R = np.asarray(R, float)
    n = diagram.n
    if R.shape != (n, n):
        raise ValueError(f"matrix shape {R.shape} does not match diagram with n={n}")
    rows = diagram.rows
    idx = diagram.box_index

    # (i) global symmetry
    for p, (a, i) in enumerate(diagram.boxes):
        for q, (b, j) in enumerate(diagram.boxes):
            if q <= p:
                continue
            if abs(R[p, q] - R[q, p]) > tol:
                return NormalityReport(False, "symmetry", (a, i), (b, j), float(R[p, q] - R[q, p]))

    # (ii) partial skew-symmetry on equal-length rows
    for a in range(1, diagram.k + 1):
        for b in range(a, diagram.k + 1):
            if rows[a - 1] != rows[b - 1]:
                continue
            for i in range(1, rows[a - 1]):
                v = R[idx(a, i), idx(b, i + 1)] + R[idx(b, i), idx(a, i + 1)]
                if abs(v) > tol:
                    return NormalityReport(False, "skew", (a, i), (b, i + 1), float(v))

    # (iii) vanishing pattern
    allowed_cache: dict[tuple[int, int], set] = {}
    for a in range(1, diagram.k + 1):
        for b in range(1, diagram.k + 1):
            na, nb = rows[a - 1], rows[b - 1]
            for i in range(1, na + 1):
                for j in range(1, nb + 1):
                    if na == nb:
                        ok = abs(i - j) <= 1
                    elif na > nb:
                        key = (na, nb)
                        if key not in allowed_cache:
                            allowed_cache[key] = zelenko_li_allowed(na, nb)
                        ok = (i, j) in allowed_cache[key]
                    else:
                        # handled from the transposed block
                        continue
                    if not ok and abs(R[idx(a, i), idx(b, j)]) > tol:
                        return NormalityReport(False, "vanishing", (a, i), (b, j), float(R[idx(a, i), idx(b, j)]))

    return NormalityReport(True)
