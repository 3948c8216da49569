"""Quivers, the skew-symmetric form on N = Z^d and covectors in M_Q."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, ZeroContraction

DimVec = tuple[int, ...]
Covector = tuple[Fraction, ...]


@dataclass(frozen=True)
class Quiver:
    labels: tuple[str, ...]
    arrows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        d = len(self.labels)
        arrows = tuple(tuple(int(a) for a in row) for row in self.arrows)
        if len(arrows) != d or any(len(row) != d for row in arrows):
            raise DimensionMismatch(f"arrow matrix must be {d}x{d}")
        if any(a < 0 for row in arrows for a in row):
            raise ValueError("arrow counts must be nonnegative")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "arrows", arrows)

    @classmethod
    def kronecker(cls, m: int) -> "Quiver":
        """The m-Kronecker quiver: two vertices, m arrows 1 -> 2."""
        return cls(("1", "2"), ((0, m), (0, 0)))

    @property
    def vertex_count(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class SkewForm:
    """Integer antisymmetric form omega(a, b) = sum_ij w_ij a_i b_j."""

    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        mat = tuple(tuple(int(a) for a in row) for row in self.matrix)
        d = len(mat)
        if any(len(row) != d for row in mat):
            raise DimensionMismatch("skew form must be square")
        for i in range(d):
            for j in range(d):
                if mat[i][j] != -mat[j][i]:
                    raise ValueError(f"skew form is not antisymmetric at ({i}, {j})")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def __call__(self, a: Sequence[int], b: Sequence[int]):
        _check_len(a, self.dim)
        _check_len(b, self.dim)
        return sum(
            self.matrix[i][j] * a[i] * b[j]
            for i in range(self.dim)
            if a[i]
            for j in range(self.dim)
        )

    def contract(self, gamma: Sequence[int]) -> DimVec:
        return contract(self, gamma)

    def scaled(self, num: int, den: int = 1) -> "SkewForm":
        """``(num/den) * omega``; raises if the result is not integral."""
        out = []
        for row in self.matrix:
            new = []
            for a in row:
                if (a * num) % den:
                    raise ValueError("rescaled skew form is not integral")
                new.append(a * num // den)
            out.append(tuple(new))
        return SkewForm(tuple(out))


def _check_len(v, d):
    if len(v) != d:
        raise DimensionMismatch(f"vector of length {len(v)}, expected {d}")


def skew_form_from_quiver(q: Quiver) -> SkewForm:
    a = q.arrows
    d = q.vertex_count
    return SkewForm(tuple(tuple(a[i][j] - a[j][i] for j in range(d)) for i in range(d)))


def contract(omega: SkewForm, gamma: Sequence[int]) -> DimVec:
    """iota_gamma omega = omega(gamma, -), as an integer vector in M."""
    _check_len(gamma, omega.dim)
    d = omega.dim
    return tuple(sum(omega.matrix[i][j] * gamma[i] for i in range(d)) for j in range(d))


def pair(theta: Sequence, gamma: Sequence[int]):
    """Exact pairing <theta, gamma>."""
    if len(theta) != len(gamma):
        raise DimensionMismatch(f"pairing a {len(theta)}-covector with a {len(gamma)}-vector")
    return sum((t * g for t, g in zip(theta, gamma) if g), Fraction(0))


def as_covector(values: Sequence) -> Covector:
    return tuple(Fraction(v) for v in values)


def vsum(vectors: Sequence[Sequence[int]], d: int) -> DimVec:
    out = [0] * d
    for v in vectors:
        for i, a in enumerate(v):
            out[i] += a
    return tuple(out)


def require_contractions(omega: SkewForm, parts: Sequence[Sequence[int]]) -> None:
    """Raise ZeroContraction unless every part and their total contract to nonzero covectors."""
    for i, g in enumerate(parts):
        if not any(contract(omega, g)):
            raise ZeroContraction(f"iota omega vanishes on part {i + 1}: {tuple(g)}")
    total = vsum(parts, omega.dim)
    if not any(contract(omega, total)):
        raise ZeroContraction(f"iota omega vanishes on the total class {total}")
