"""Dense two-phase tableau simplex for small box-constrained programs.

Solves ``minimize c . x  subject to  A x >= b,  lo <= x <= hi`` exactly in
the shape needed by the probabilistic Decide heuristics: a handful of
variables, nonnegative costs, box bounds.  Bland's rule guarantees
termination; all comparisons use an absolute tolerance of 1e-9.
"""

from __future__ import annotations

import numpy as np

TOL = 1e-9


class SimplexError(Exception):
    pass


class Infeasible(SimplexError):
    """The constraint system has no point inside the box."""


class Unbounded(SimplexError):
    """The objective decreases without bound (impossible with finite boxes)."""


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and abs(T[r, col]) > 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _run(T: np.ndarray, basis: list[int], ncols: int) -> None:
    """Minimize the objective in the last row over columns [0, ncols)."""
    while True:
        obj = T[-1, :ncols]
        entering = -1
        for j in range(ncols):
            if obj[j] < -TOL:
                entering = j  # Bland: smallest eligible index
                break
        if entering < 0:
            return
        best_ratio = None
        leaving = -1
        for i in range(T.shape[0] - 1):
            a = T[i, entering]
            if a > TOL:
                ratio = T[i, -1] / a
                if (best_ratio is None or ratio < best_ratio - TOL
                        or (abs(ratio - best_ratio) <= TOL
                            and basis[i] < basis[leaving])):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            raise Unbounded("no blocking constraint for the entering column")
        _pivot(T, basis, leaving, entering)


def simplex_min(costs, constraints, bounds):
    """Return the optimal assignment (list of floats, one per variable).

    ``constraints`` is a sequence of ``(coeffs, rhs)`` pairs read as
    ``coeffs . x >= rhs``; ``bounds`` is a sequence of ``(lo, hi)`` boxes.
    """
    n = len(costs)
    if any(len(coeffs) != n for coeffs, _ in constraints):
        raise ValueError("constraint arity does not match variable count")
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    if np.any(hi - lo < -TOL):
        raise Infeasible("empty box")
    u = np.maximum(hi - lo, 0.0)
    boxed = [j for j in range(n) if np.isfinite(u[j])]
    m = len(constraints)
    if m == 0 and n == 0:
        return []
    A = np.array([list(coeffs) for coeffs, _ in constraints], dtype=float)
    A = A.reshape(m, n)
    b = np.array([rhs for _, rhs in constraints], dtype=float)
    b_shift = b - A @ lo if m else b

    # Equality system over x' = x - lo >= 0 with surplus s and slack t
    # (one slack per finite upper bound):
    #   A x' - s = b_shift          (m rows)
    #   x'_j + t_j = u_j            (one row per boxed j)
    nb = len(boxed)
    M = m + nb
    ncore = n + m + nb
    rows = np.zeros((M, ncore))
    rhs_col = np.zeros(M)
    rows[:m, :n] = A
    for i in range(m):
        rows[i, n + i] = -1.0
    rhs_col[:m] = b_shift
    for k, j in enumerate(boxed):
        rows[m + k, j] = 1.0
        rows[m + k, n + m + k] = 1.0
        rhs_col[m + k] = u[j]

    flipped = rhs_col < 0
    rows[flipped] *= -1.0
    rhs_col[flipped] = -rhs_col[flipped]

    basis: list[int] = [-1] * M
    art_cols: list[int] = []
    extra = []
    for i in range(M):
        if i >= m:
            basis[i] = n + m + (i - m)  # slack t_k (box rows are never flipped)
        elif flipped[i]:
            basis[i] = n + i  # surplus entered with coefficient +1
        else:
            col = ncore + len(art_cols)
            art_cols.append(col)
            unit = np.zeros(M)
            unit[i] = 1.0
            extra.append(unit)
            basis[i] = col

    total = ncore + len(art_cols)
    T = np.zeros((M + 1, total + 1))
    T[:M, :ncore] = rows
    for k, unit in enumerate(extra):
        T[:M, ncore + k] = unit
    T[:M, -1] = rhs_col

    if art_cols:
        # Phase 1: minimize the sum of artificials.
        for col in art_cols:
            T[-1, col] = 1.0
        for i in range(M):
            if basis[i] in art_cols:
                T[-1] -= T[i]
        _run(T, basis, total)
        if T[-1, -1] < -TOL:
            raise Infeasible("phase-1 optimum is positive")
        for i in range(M):
            if basis[i] in art_cols:
                for j in range(ncore):
                    if abs(T[i, j]) > TOL:
                        _pivot(T, basis, i, j)
                        break
        for col in art_cols:
            T[:, col] = 0.0

    # Phase 2: the real objective over x' (s and t cost nothing).
    T[-1, :] = 0.0
    for j in range(n):
        T[-1, j] = costs[j]
    for i in range(M):
        if basis[i] < n:
            T[-1] -= T[-1, basis[i]] * T[i]
    _run(T, basis, ncore)

    x = np.array(lo, dtype=float)
    for i in range(M):
        if basis[i] < n:
            x[basis[i]] = lo[basis[i]] + T[i, -1]
    return [float(v) for v in x]
