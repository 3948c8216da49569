"""Independent validators for the lattice code and known Kronecker values.

Nothing here imports :mod:`quiverflow.exactlin`: ranks use Fraction
elimination, determinants use Bareiss, and quotient groups are enumerated
class by class.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from math import comb
from typing import Sequence

from .errors import Overflow

BRUTE_BOUND = 10**4


def _rows(m) -> list[list[int]]:
    rows = getattr(m, "rows", m)
    return [list(r) for r in rows]


def _independent_columns(cols: list[list[int]], n: int) -> list[int]:
    """Indices of a greedy maximal linearly independent set of columns."""
    basis: list[tuple[int, list[Fraction]]] = []  # (pivot index, reduced vector)
    chosen = []
    for idx, c in enumerate(cols):
        v = [Fraction(a) for a in c]
        for p, b in basis:
            if v[p]:
                f = v[p] / b[p]
                v = [x - f * y for x, y in zip(v, b)]
        piv = next((i for i in range(n) if v[i]), None)
        if piv is not None:
            basis.append((piv, v))
            chosen.append(idx)
    return chosen


def bareiss_det(square: Sequence[Sequence[int]]) -> int:
    a = [list(r) for r in square]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _triangular_mod(gens: list[list[int]], n: int, D: int) -> list[list[int]]:
    """Upper-triangular basis of span(gens) + D Z^n with positive diagonal.

    D Z^n lies in the lattice, so entries may be reduced mod D freely.
    """
    rows = [[a % D for a in g] for g in gens]
    rows += [[D if i == j else 0 for j in range(n)] for i in range(n)]
    out = []
    for col in range(n):
        pivot = None
        rest = []
        for r in rows:
            if not r[col]:
                rest.append(r)
            elif pivot is None:
                pivot = r
            else:
                g, x, y = _xgcd(pivot[col], r[col])
                a, b = pivot[col] // g, r[col] // g
                killed = [b * p - a * q for p, q in zip(pivot, r)]
                pivot = [x * p + y * q for p, q in zip(pivot, r)]
                pivot = pivot[: col + 1] + [v % D for v in pivot[col + 1 :]]
                killed = [v % D for v in killed]
                if any(killed):
                    rest.append(killed)
        if pivot[col] < 0:
            pivot = [-v for v in pivot]
        out.append(pivot)
        rows = rest
    return out


def brute_cokernel(m, relations: Sequence[Sequence[int]] = (), bound: int = BRUTE_BOUND):
    """``|Z^b / (im m + span relations)|`` by enumerating residue classes.

    Returns an ``int``, or the string ``"infinite"`` when the subgroup has
    rank below b. Raises Overflow when more than ``bound`` classes would
    have to be visited.
    """
    rows = _rows(m)
    n = len(rows)
    if n == 0:
        return 1
    cols = [[r[j] for r in rows] for j in range(len(rows[0]))] + [list(v) for v in relations]
    cols = [c for c in cols if any(c)]
    chosen = _independent_columns(cols, n)
    if len(chosen) < n:
        return "infinite"
    D = abs(bareiss_det([[cols[j][i] for j in chosen] for i in range(n)]))
    tri = _triangular_mod(cols, n, D)
    predicted = 1
    for i in range(n):
        predicted *= tri[i][i]
    if predicted > bound:
        raise Overflow(f"quotient has {predicted} classes, above the bound {bound}")

    def reduce(v):
        v = list(v)
        for i in range(n):
            q = v[i] // tri[i][i]
            if q:
                v = [a - q * b for a, b in zip(v, tri[i])]
        return tuple(v)

    start = reduce([0] * n)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for i in range(n):
            w = list(v)
            w[i] += 1
            w = reduce(w)
            if w not in seen:
                seen.add(w)
                if len(seen) > bound:
                    raise Overflow(f"more than {bound} classes")
                queue.append(w)
    return len(seen)


def kronecker_known(m: int, k: int) -> int:
    """Classical DT invariant of the m-Kronecker quiver at (1, k) in its nonempty chamber."""
    if not (0 <= k <= m <= 6):
        raise ValueError(f"kronecker_known covers 0 <= k <= m <= 6, got m={m}, k={k}")
    return comb(m, k)
