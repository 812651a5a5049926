"""Smith-Waterman local alignment over event sequences.

Two flavours live here. :func:`classic_sw` is the textbook recurrence with
match/mismatch/gap scores. :func:`build_matrix` is the variant used for
strategy extraction: gaps are free, diagonal terms are scaled by a
per-cell weight, and the traceback emits elements of the shorter input
without gap tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Mapping, Sequence

from .core import Event, Strategy

NONE, DIAG, LEFT, UP = 0, 1, 2, 3
ARROWS = {NONE: " ", DIAG: "↖", LEFT: "←", UP: "↑"}

# weight(i, j) for 0-based positions into A and B
WeightFunction = Callable[[int, int], float]


@dataclass(frozen=True)
class AlignParams:
    match: float = 1.0
    mismatch: float = -1.0
    gap: float = 0.0

    def __post_init__(self) -> None:
        if not self.match > 0:
            raise ValueError(f"match score must be positive, got {self.match}")
        if self.mismatch > 0:
            raise ValueError(f"mismatch score must be <= 0, got {self.mismatch}")


@dataclass
class ScoreMatrix:
    """(m+1) x (n+1) scores with the predecessor used for each cell."""

    values: list[list[float]]
    preds: list[list[int]]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.values), len(self.values[0])

    def max_cell(self) -> tuple[int, int]:
        """Highest-scoring cell; ties go to the greatest i+j, then the smallest i."""
        best, best_key = (0, 0), (self.values[0][0], 0, 0)
        for i, row in enumerate(self.values):
            for j, v in enumerate(row):
                key = (v, i + j, -i)
                if key > best_key:
                    best, best_key = (i, j), key
        return best

    @property
    def max_value(self) -> float:
        return max(max(row) for row in self.values)


def _fill(A: Sequence, B: Sequence, match: float, mismatch: float, gap: float,
          weight: WeightFunction | None) -> ScoreMatrix:
    m, n = len(A), len(B)
    H = [[0.0] * (n + 1) for _ in range(m + 1)]
    P = [[NONE] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        a = A[i - 1]
        row, prev = H[i], H[i - 1]
        prow = P[i]
        for j in range(1, n + 1):
            w = 1.0 if weight is None else weight(i - 1, j - 1)
            diag = prev[j - 1] + (match if a == B[j - 1] else mismatch) * w
            left = row[j - 1] - gap
            up = prev[j] - gap
            # tie order: diagonal > left > up
            if diag >= left and diag >= up:
                best, p = diag, DIAG
            elif left >= up:
                best, p = left, LEFT
            else:
                best, p = up, UP
            if best > 0:
                row[j] = best
                prow[j] = p
    return ScoreMatrix(H, P)


def build_matrix(A: Sequence[Hashable], B: Sequence[Hashable], params: AlignParams | None = None,
                 weight: WeightFunction | None = None) -> ScoreMatrix:
    """Weighted, gap-free scoring matrix.

    ``H(i,j) = max(0, H(i-1,j-1) + s*W or d*W, H(i,j-1), H(i-1,j))``. The
    gap score in ``params`` is ignored. ``weight=None`` means ``W == 1``.
    """
    params = params or AlignParams()
    return _fill(A, B, params.match, params.mismatch, 0.0, weight)


def traceback(matrix: ScoreMatrix, A: Sequence, B: Sequence, start: tuple[int, int] | None = None) -> list:
    """Walk predecessors from the best cell until a zero cell.

    Every cell entered on a diagonal step contributes the element of the
    shorter sequence (A when the lengths are equal). Horizontal and
    vertical steps contribute nothing.
    """
    use_a = len(A) <= len(B)
    i, j = start if start is not None else matrix.max_cell()
    out = []
    H, P = matrix.values, matrix.preds
    while H[i][j] > 0:
        p = P[i][j]
        if p == DIAG:
            out.append(A[i - 1] if use_a else B[j - 1])
            i, j = i - 1, j - 1
        elif p == LEFT:
            j -= 1
        else:
            i -= 1
    out.reverse()
    return out


def traceback_path(matrix: ScoreMatrix) -> list[tuple[int, int]]:
    """Cells visited by :func:`traceback`, from the best cell back to the stopping cell."""
    i, j = matrix.max_cell()
    path = [(i, j)]
    while matrix.values[i][j] > 0:
        p = matrix.preds[i][j]
        i, j = (i - 1, j - 1) if p == DIAG else (i, j - 1) if p == LEFT else (i - 1, j)
        path.append((i, j))
    return path


def classic_sw(A: Sequence[Hashable], B: Sequence[Hashable],
               params: AlignParams | None = None) -> tuple[list, float, ScoreMatrix]:
    """Textbook Smith-Waterman. Returns (aligned elements, best score, matrix).

    Gap steps consume ``params.gap`` and emit no element.
    """
    params = params or AlignParams(gap=1.0)
    if not A or not B:
        return [], 0.0, _fill(A, B, params.match, params.mismatch, params.gap, None)
    mat = _fill(A, B, params.match, params.mismatch, params.gap, None)
    return traceback(mat, A, B), mat.max_value, mat


def likelihood_weight(A: Sequence[Event], B: Sequence[Event], likelihoods: Mapping[Event, float],
                      default: float = 1.0) -> WeightFunction:
    la = [likelihoods.get(e, default) for e in A]
    lb = [likelihoods.get(e, default) for e in B]
    return lambda i, j: la[i] if la[i] > lb[j] else lb[j]


def reward_weight(rewards_a: Sequence[float], rewards_b: Sequence[float]) -> WeightFunction:
    """``W = max(1, reward(A_i), reward(B_j))``."""
    return lambda i, j: max(1.0, rewards_a[i], rewards_b[j])


def align_weighted(A: Sequence[Event], B: Sequence[Event], likelihoods: Mapping[Event, float],
                   params: AlignParams | None = None) -> Strategy:
    """Align two event sequences with ``W = max(l(A_i), l(B_j))`` and trace back a strategy.

    Events missing from ``likelihoods`` get likelihood 1.
    """
    mat = build_matrix(A, B, params, likelihood_weight(A, B, likelihoods))
    return Strategy(tuple(traceback(mat, A, B)))


def format_matrix(matrix: ScoreMatrix, A: Sequence, B: Sequence, precision: int = 1) -> str:
    """Tab-separated dump with predecessor arrows; cells on the traceback path are starred."""
    on_path = set(traceback_path(matrix))
    header = ["", "-"] + [str(b) for b in B]
    lines = ["\t".join(header)]
    for i, row in enumerate(matrix.values):
        cells = ["-" if i == 0 else str(A[i - 1])]
        for j, v in enumerate(row):
            mark = "*" if (i, j) in on_path and v > 0 else ""
            cells.append(f"{ARROWS[matrix.preds[i][j]]}{v:.{precision}f}{mark}")
        lines.append("\t".join(cells))
    return "\n".join(lines)
