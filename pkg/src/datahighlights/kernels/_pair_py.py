"""Pure-Python fallback for the hot pair-loop kernels.

Semantics must match `_pair_cy` exactly: all three functions return plain
integers / integer matrices derived from exact comparisons, so results are
bit-identical across backends.
"""

from __future__ import annotations


def kendall_pair_counts(x, y):
    """Count pair classes over all i<j: (concordant, discordant,
    ties in x only, ties in y only, ties in both)."""
    n = len(x)
    concordant = discordant = ties_x = ties_y = ties_xy = 0
    for i in range(n - 1):
        xi = x[i]
        yi = y[i]
        for j in range(i + 1, n):
            dx = x[j] - xi
            dy = y[j] - yi
            if dx == 0.0 and dy == 0.0:
                ties_xy += 1
            elif dx == 0.0:
                ties_x += 1
            elif dy == 0.0:
                ties_y += 1
            elif (dx > 0.0) == (dy > 0.0):
                concordant += 1
            else:
                discordant += 1
    return concordant, discordant, ties_x, ties_y, ties_xy


def mann_kendall_s(x):
    """S = sum over i<j of sign(x[j] - x[i])."""
    n = len(x)
    s = 0
    for i in range(n - 1):
        xi = x[i]
        for j in range(i + 1, n):
            d = x[j] - xi
            if d > 0.0:
                s += 1
            elif d < 0.0:
                s -= 1
    return s


def dominance_matrix(values, present):
    """Strict-domination matrix over the rows of a candidate x slice grid.

    values[i][b] is row i's value in slice b, present[i][b] whether the
    cell exists. Row i dominates row k iff they share at least one slice
    where both cells are present and i's value is strictly greater in
    every such slice. Returns an n x n list-of-lists of 0/1 ints with a
    zero diagonal.
    """
    n = len(values)
    width = len(values[0]) if n else 0
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            comparable = False
            dominates = True
            for b in range(width):
                if present[i][b] and present[k][b]:
                    comparable = True
                    if not values[i][b] > values[k][b]:
                        dominates = False
                        break
            if comparable and dominates:
                out[i][k] = 1
    return out
