"""Exact integer linear algebra over Z.

Smith and Hermite normal forms, integral kernels, saturations and the
lattice indices built from them. Everything is plain Python ``int``
arithmetic; there is no floating point anywhere in this module.

Orders of abelian groups are returned as a positive ``int`` or the
sentinel :data:`INFINITE`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from .errors import DimensionMismatch, ZeroLattice, ZeroVector

__all__ = [
    "INFINITE",
    "IntMatrix",
    "SmithForm",
    "Sublattice",
    "smith_normal_form",
    "cokernel_order",
    "kernel_basis",
    "hermite_rows",
    "saturate",
    "index_in_saturation",
    "lattice_sum_index",
    "intersect",
    "divisibility",
    "quotient_cokernel_order",
    "matrix_rank",
]


class _Infinite:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Infinite"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


class IntMatrix:
    """Immutable dense integer matrix, row-major.

    Zero-sized shapes are allowed; ``IntMatrix([], ncols=3)`` is a 0x3 matrix
    and ``IntMatrix.from_columns([], nrows=2)`` is 2x0.
    """

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, rows: Iterable[Sequence[int]], ncols: int | None = None):
        rows = tuple(tuple(int(a) for a in row) for row in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(rows[0])
        for row in rows:
            if len(row) != ncols:
                raise DimensionMismatch(f"row of length {len(row)}, expected {ncols}")
        self.nrows = len(rows)
        self.ncols = ncols
        self.rows = rows

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], nrows: int) -> "IntMatrix":
        columns = [tuple(c) for c in columns]
        for c in columns:
            if len(c) != nrows:
                raise DimensionMismatch(f"column of length {len(c)}, expected {nrows}")
        return cls([[c[i] for c in columns] for i in range(nrows)], ncols=len(columns))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], ncols=n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_columns(self.rows, self.ncols)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if other.nrows != self.nrows:
            raise DimensionMismatch("hstack needs equal row counts")
        return IntMatrix(
            [a + b for a, b in zip(self.rows, other.rows)], ncols=self.ncols + other.ncols
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, c)) for c in cols] for row in self.rows],
            ncols=other.ncols,
        )

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.rows]!r}, ncols={self.ncols})"


@dataclass(frozen=True)
class SmithForm:
    """``left @ m @ right == diag(diagonal)`` padded to the shape of ``m``."""

    diagonal: tuple[int, ...]
    left: IntMatrix | None
    right: IntMatrix | None

    @property
    def rank(self) -> int:
        return sum(1 for a in self.diagonal if a)


def _as_matrix(m) -> IntMatrix:
    if isinstance(m, IntMatrix):
        return m
    return IntMatrix(m)


def _sparse_add(dst: dict, src: dict, q: int) -> None:
    """dst += q * src for sparse vectors stored as {index: value}."""
    if not q:
        return
    for k, v in src.items():
        w = dst.get(k, 0) + q * v
        if w:
            dst[k] = w
        else:
            del dst[k]


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _snf(m: IntMatrix, transforms: bool):
    """Sparse elimination to a generalized diagonal, then gcd/lcm fix-up.

    Pivots are entries of least absolute value, ties broken by the Markowitz
    count, which keeps fill-in and entry growth small on sparse input.
    """
    nr, nc = m.shape
    rows = [{j: a for j, a in enumerate(r) if a} for r in m.rows]
    cols: list[set] = [set() for _ in range(nc)]
    for i, r in enumerate(rows):
        for j in r:
            cols[j].add(i)
    U = [{i: 1} for i in range(nr)] if transforms else None  # rows of the left transform
    V = [{j: 1} for j in range(nc)] if transforms else None  # columns of the right transform

    def row_op(dst, src, q):
        # row[dst] += q * row[src]
        if not q:
            return
        rd = rows[dst]
        for j, v in rows[src].items():
            w = rd.get(j, 0) + q * v
            if w:
                if j not in rd:
                    cols[j].add(dst)
                rd[j] = w
            else:
                del rd[j]
                cols[j].discard(dst)
        if U is not None:
            _sparse_add(U[dst], U[src], q)

    def col_op(dst, src, q):
        # col[dst] += q * col[src]
        for i in list(cols[src]):
            r = rows[i]
            w = r.get(dst, 0) + q * r[src]
            if w:
                r[dst] = w
                cols[dst].add(i)
            elif dst in r:
                del r[dst]
                cols[dst].discard(i)
        if V is not None:
            _sparse_add(V[dst], V[src], q)

    done_rows: set = set()
    pivots = []
    while True:
        best = None
        for i, r in enumerate(rows):
            if i in done_rows or not r:
                continue
            ri = len(r) - 1
            for j, a in r.items():
                key = (abs(a), ri * (len(cols[j]) - 1), i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, _, i, j = best
        while True:
            p = rows[i][j]
            for k in sorted(cols[j] - {i}):
                row_op(k, i, -(rows[k][j] // p))
            if V is None and abs(p) == 1 and len(cols[j]) == 1:
                # column ops would only touch row i; without transforms just drop it
                for l in rows[i]:
                    if l != j:
                        cols[l].discard(i)
                rows[i] = {j: p}
                break
            for l in sorted(set(rows[i]) - {j}):
                col_op(l, j, -(rows[i][l] // p))
            rest = [(abs(rows[k][j]), k, "r") for k in cols[j] if k != i]
            rest += [(abs(a), l, "c") for l, a in rows[i].items() if l != j]
            if not rest:
                break
            _, idx, kind = min(rest)
            if kind == "r":
                i = idx
            else:
                j = idx
        done_rows.add(i)
        pivots.append((i, j))

    # move pivots onto the diagonal
    prow = [i for i, _ in pivots]
    pcol = [j for _, j in pivots]
    row_order = prow + [i for i in range(nr) if i not in done_rows]
    used_cols = set(pcol)
    col_order = pcol + [j for j in range(nc) if j not in used_cols]
    diag = [rows[i][j] for i, j in pivots]
    if transforms:
        U = [U[i] for i in row_order]
        V = [V[j] for j in col_order]

    # divisibility chain: (a, b) -> (gcd, lcm) by a unimodular 2x2 move
    k = len(diag)
    for a_idx in range(k):
        for b_idx in range(a_idx + 1, k):
            a, b = diag[a_idx], diag[b_idx]
            if b % a == 0:
                continue
            g, s_, t_ = _xgcd(a, b)
            diag[a_idx], diag[b_idx] = g, a // g * b
            if transforms:
                ua, ub = U[a_idx], U[b_idx]
                new_a: dict = {}
                _sparse_add(new_a, ua, s_)
                _sparse_add(new_a, ub, t_)
                new_b: dict = {}
                _sparse_add(new_b, ua, -(b // g))
                _sparse_add(new_b, ub, a // g)
                U[a_idx], U[b_idx] = new_a, new_b
                va, vb = V[a_idx], V[b_idx]
                new_va: dict = {}
                _sparse_add(new_va, va, 1)
                _sparse_add(new_va, vb, 1)
                new_vb: dict = {}
                _sparse_add(new_vb, va, -(t_ * b // g))
                _sparse_add(new_vb, vb, s_ * a // g)
                V[a_idx], V[b_idx] = new_va, new_vb
    for t in range(k):
        if diag[t] < 0:
            diag[t] = -diag[t]
            if transforms:
                U[t] = {c: -v for c, v in U[t].items()}

    limit = min(nr, nc)
    diagonal = tuple(diag) + (0,) * (limit - k)
    left = right = None
    if transforms:
        left = IntMatrix([[u.get(c, 0) for c in range(nr)] for u in U], ncols=nr)
        right = IntMatrix.from_columns([[v.get(r, 0) for r in range(nc)] for v in V], nc)
    return SmithForm(diagonal, left, right)


def smith_normal_form(m, transforms: bool = True) -> SmithForm:
    """Smith normal form of an integer matrix.

    Returns ``SmithForm(diagonal, left, right)`` with ``left @ m @ right`` equal
    to the diagonal matrix of ``diagonal`` (length ``min(rows, cols)``), each
    entry dividing the next and zeros last. ``left`` and ``right`` are
    unimodular. Pass ``transforms=False`` when only the diagonal is needed.

    >>> smith_normal_form([[2, 0], [0, 3]]).diagonal
    (1, 6)
    """
    return _snf(_as_matrix(m), transforms)


def matrix_rank(m) -> int:
    m = _as_matrix(m)
    if m.nrows == 0 or m.ncols == 0:
        return 0
    return _snf(m, False).rank


def cokernel_order(m):
    """``|Z^b / im(m)|`` for ``m: Z^a -> Z^b``, or INFINITE if ``m`` is not full rank b."""
    m = _as_matrix(m)
    if m.nrows == 0:
        return 1
    if m.ncols == 0:
        return INFINITE
    snf = _snf(m, False)
    if snf.rank < m.nrows:
        return INFINITE
    out = 1
    for a in snf.diagonal:
        out *= a
    return out


def quotient_cokernel_order(m, relations: Sequence[Sequence[int]] = ()):
    """Order of ``Z^b / (im(m) + span(relations))``."""
    m = _as_matrix(m)
    if relations:
        m = m.hstack(IntMatrix.from_columns(relations, m.nrows))
    return cokernel_order(m)


def hermite_rows(vectors: Iterable[Sequence[int]], n: int) -> tuple[tuple[int, ...], ...]:
    """Row Hermite normal form of the lattice spanned by ``vectors`` in Z^n.

    The result is the unique echelon basis: pivots positive, strictly moving
    right, entries above each pivot reduced into ``[0, pivot)``.
    """
    rows = [list(v) for v in vectors if any(v)]
    for v in rows:
        if len(v) != n:
            raise DimensionMismatch(f"vector of length {len(v)} in Z^{n}")
    r = 0
    for col in range(n):
        if r >= len(rows):
            break
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r], rows[piv] = rows[piv], rows[r]
            p = rows[r][col]
            others = [i for i in range(r + 1, len(rows)) if rows[i][col]]
            if not others:
                break
            for i in others:
                q = rows[i][col] // p
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
        if r < len(rows) and rows[r][col]:
            if rows[r][col] < 0:
                rows[r] = [-a for a in rows[r]]
            p = rows[r][col]
            for k in range(r):
                q = rows[k][col] // p
                if q:
                    rows[k] = [a - q * b for a, b in zip(rows[k], rows[r])]
            r += 1
            rows = rows[:r] + [row for row in rows[r:] if any(row)]
    return tuple(tuple(row) for row in rows[:r])


@dataclass(frozen=True, eq=False)
class Sublattice:
    """A sublattice of Z^n given by (possibly dependent) generators.

    Two sublattices compare equal iff their Hermite bases agree.
    """

    ambient_rank: int
    generators: tuple[tuple[int, ...], ...] = ()
    _hnf: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        gens = tuple(tuple(int(a) for a in g) for g in self.generators)
        for g in gens:
            if len(g) != self.ambient_rank:
                raise DimensionMismatch(
                    f"generator of length {len(g)} in Z^{self.ambient_rank}"
                )
        object.__setattr__(self, "generators", gens)

    @classmethod
    def span(cls, vectors: Iterable[Sequence[int]], ambient_rank: int) -> "Sublattice":
        return cls(ambient_rank, tuple(tuple(v) for v in vectors))

    def basis(self) -> tuple[tuple[int, ...], ...]:
        if not self._hnf:
            self._hnf.append(hermite_rows(self.generators, self.ambient_rank))
        return self._hnf[0]

    @property
    def rank(self) -> int:
        return len(self.basis())

    def generator_matrix(self) -> IntMatrix:
        """Generators as the columns of an ``ambient_rank x k`` matrix."""
        return IntMatrix.from_columns(self.generators, self.ambient_rank)

    def __add__(self, other: "Sublattice") -> "Sublattice":
        _check_ambient(self, other)
        return Sublattice(self.ambient_rank, self.generators + other.generators)

    def contains(self, v: Sequence[int]) -> bool:
        return (self + Sublattice(self.ambient_rank, (tuple(v),))) == self

    def __eq__(self, other):
        if not isinstance(other, Sublattice):
            return NotImplemented
        return self.ambient_rank == other.ambient_rank and self.basis() == other.basis()

    def __hash__(self):
        return hash((self.ambient_rank, self.basis()))


def _check_ambient(a: Sublattice, b: Sublattice):
    if a.ambient_rank != b.ambient_rank:
        raise DimensionMismatch(
            f"sublattices of Z^{a.ambient_rank} and Z^{b.ambient_rank}"
        )


def kernel_basis(m) -> Sublattice:
    """Basis of the (automatically saturated) integer kernel ``{x : m x = 0}``."""
    m = _as_matrix(m)
    if m.nrows == 0:
        return Sublattice(m.ncols, IntMatrix.identity(m.ncols).rows)
    snf = _snf(m, True)
    cols = snf.right.columns()[snf.rank :]
    return Sublattice(m.ncols, hermite_rows(cols, m.ncols))


def saturate(s: Sublattice) -> Sublattice:
    """``(s tensor Q) intersect Z^n``, the saturation of ``s``."""
    n = s.ambient_rank
    annihilator = kernel_basis(IntMatrix(s.generators, ncols=n))
    return kernel_basis(IntMatrix(annihilator.generators, ncols=n))


def index_in_saturation(s: Sublattice) -> int:
    """``|s^sat / s|``: product of the nonzero invariant factors of the generators."""
    gens = [g for g in s.generators if any(g)]
    if not gens:
        raise ZeroLattice("index_in_saturation of the zero lattice")
    out = 1
    for a in _snf(IntMatrix.from_columns(gens, s.ambient_rank), False).diagonal:
        if a:
            out *= a
    return out


def lattice_sum_index(a: Sublattice, b: Sublattice):
    """``|Z^n / (a + b)|``, INFINITE when ``a + b`` has rank below n."""
    _check_ambient(a, b)
    return cokernel_order(IntMatrix.from_columns(a.generators + b.generators, a.ambient_rank))


def intersect(a: Sublattice, b: Sublattice) -> Sublattice:
    """Intersection of two sublattices of the same Z^n."""
    _check_ambient(a, b)
    n = a.ambient_rank
    ga = [g for g in a.generators if any(g)]
    gb = [g for g in b.generators if any(g)]
    if not ga or not gb:
        return Sublattice(n)
    stacked = IntMatrix.from_columns(ga + [tuple(-x for x in g) for g in gb], n)
    out = []
    for sol in kernel_basis(stacked).generators:
        out.append(tuple(sum(c * g[i] for c, g in zip(sol, ga)) for i in range(n)))
    return Sublattice(n, hermite_rows(out, n))


def divisibility(v: Sequence[int]) -> int:
    """gcd of the entries of a nonzero integer vector."""
    g = 0
    for a in v:
        g = gcd(g, int(a))
    if g == 0:
        raise ZeroVector("divisibility of the zero vector")
    return g
