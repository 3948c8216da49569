"""DT invariants from attractor invariants via flow-tree coefficients.

The rational invariant of gamma at stability theta is

    sum over multisets {gamma_i} with sum gamma:
        F_r(gamma_1, ..., gamma_r) / |Aut| * prod Omega*_bar(gamma_i)

where F_r counts valid perturbed binary flow trees with their weights,
``Omega*_bar`` is the rational transform of the attractor invariants, and
the integer invariant is recovered by inverting the rational transform.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd
from typing import Mapping, Sequence

from .errors import DimensionMismatch, NonIntegerResult, ZeroVector
from .flowtree import AttractorTree, PerturbationSpec, enumerate_attractor_trees
from .quiver import DimVec, SkewForm, as_covector, contract, pair, vsum
from .tropical import FaceType, log_gw


def _content(gamma: Sequence[int]) -> int:
    g = 0
    for a in gamma:
        g = gcd(g, a)
    if g == 0:
        raise ZeroVector("the zero class has no DT invariant")
    return g


def _divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def _div(gamma, k) -> DimVec:
    return tuple(a // k for a in gamma)


def _sign_weight(k: int) -> Fraction:
    return Fraction((-1) ** (k - 1), k * k)


def rational_from_integer(omega_int: Mapping, gamma: Sequence[int]) -> Fraction:
    """``sum_{k | gamma} (-1)^(k-1)/k^2 * Omega(gamma/k)``; missing classes count as 0."""
    gamma = tuple(gamma)
    return sum(
        (_sign_weight(k) * omega_int.get(_div(gamma, k), 0) for k in _divisors(_content(gamma))),
        Fraction(0),
    )


def integer_from_rational(omega_bar: Mapping, gamma: Sequence[int]) -> int:
    """Invert :func:`rational_from_integer`; ``omega_bar`` must cover every gamma/k.

    Raises NonIntegerResult when the family is not the transform of integers.
    """
    cache: dict = {}

    def solve(g: DimVec) -> int:
        if g in cache:
            return cache[g]
        value = Fraction(omega_bar.get(g, 0))
        for k in _divisors(_content(g))[1:]:
            value -= _sign_weight(k) * solve(_div(g, k))
        if value.denominator != 1:
            raise NonIntegerResult(f"rational invariant of {g} inverts to {value}")
        cache[g] = value.numerator
        return cache[g]

    return solve(tuple(gamma))


# ---------------------------------------------------------------- coefficients


def _zero_part_contraction(omega: SkewForm, parts) -> bool:
    return any(not any(contract(omega, p)) for p in parts)


def F_per_tree(omega: SkewForm, parts: Sequence[DimVec], theta: Sequence, spec: PerturbationSpec = PerturbationSpec()) -> dict:
    """Weighted count of valid perturbed flows, grouped by limit attractor tree."""
    parts = tuple(tuple(p) for p in parts)
    if len(parts) < 2:
        raise ValueError("per-tree coefficients need at least two parts")
    if _zero_part_contraction(omega, parts):
        return {}
    enum = enumerate_attractor_trees(theta, parts, omega, spec)
    return {h: sum(e.weight for e in embs) for h, embs in enum.fibers.items()}


def F_total(omega: SkewForm, parts: Sequence[DimVec], theta: Sequence, spec: PerturbationSpec = PerturbationSpec()) -> int:
    parts = tuple(tuple(p) for p in parts)
    if not parts:
        raise ValueError("at least one part is required")
    if len(parts) == 1:
        theta = as_covector(theta)
        if pair(theta, parts[0]) != 0:
            raise ValueError("theta is not orthogonal to gamma")
        return 1
    return sum(F_per_tree(omega, parts, theta, spec).values())


# ---------------------------------------------------------------- reconstruction


@dataclass(frozen=True)
class AttractorData:
    """Unsigned attractor invariants; classes not listed are 0."""

    invariants: Mapping

    def __post_init__(self):
        clean = {}
        for g, v in dict(self.invariants).items():
            g = tuple(int(a) for a in g)
            if not any(g) or any(a < 0 for a in g):
                raise ValueError(f"attractor class {g} is not a nonzero dimension vector")
            if clean and len(g) != len(next(iter(clean))):
                raise DimensionMismatch("attractor classes of different lengths")
            if v:
                clean[g] = int(v)
        object.__setattr__(self, "invariants", dict(sorted(clean.items())))

    @classmethod
    def simples(cls, d: int, value: int = 1) -> "AttractorData":
        return cls({tuple(int(i == j) for j in range(d)): value for i in range(d)})

    @classmethod
    def from_json(cls, obj) -> "AttractorData":
        return cls({tuple(e["gamma"]): int(e["omega_star"]) for e in obj["invariants"]})

    def to_json(self) -> dict:
        return {
            "invariants": [{"gamma": list(g), "omega_star": v} for g, v in self.invariants.items()]
        }

    def rational(self, gamma) -> Fraction:
        return rational_from_integer(self.invariants, gamma)


@dataclass(frozen=True)
class Decomposition:
    parts: tuple  # lexicographically sorted
    F: int
    aut: int
    attractor_product: Fraction

    @property
    def contribution(self) -> Fraction:
        return self.F * self.attractor_product / self.aut


@dataclass(frozen=True)
class DTResult:
    gamma: DimVec
    theta: tuple
    omega_bar: Fraction
    omega: int
    decompositions: tuple


def _box(gamma: DimVec) -> list[DimVec]:
    out = [()]
    for a in gamma:
        out = [v + (x,) for v in out for x in range(a + 1)]
    return [v for v in out if any(v)]


def multisets(support: Sequence[DimVec], gamma: DimVec) -> list[tuple]:
    """Multisets of vectors from ``support`` summing to gamma, each sorted lexicographically."""
    support = sorted(set(support))
    out = []

    def rec(start, remaining, acc):
        if not any(remaining):
            out.append(tuple(acc))
            return
        for k in range(start, len(support)):
            v = support[k]
            rest = tuple(a - b for a, b in zip(remaining, v))
            if all(a >= 0 for a in rest):
                rec(k, rest, acc + [v])

    rec(0, tuple(gamma), [])
    return out


def _aut(parts) -> int:
    out = 1
    for v in set(parts):
        out *= factorial(parts.count(v))
    return out


def rational_dt(omega: SkewForm, gamma, theta, att: AttractorData, spec: PerturbationSpec = PerturbationSpec()):
    """``(Omega_bar, decompositions)`` for a single class."""
    gamma = tuple(int(a) for a in gamma)
    theta = as_covector(theta)
    if len(gamma) != omega.dim or len(theta) != omega.dim:
        raise DimensionMismatch("gamma and theta must match the quiver")
    if not any(gamma) or any(a < 0 for a in gamma):
        raise ValueError(f"gamma = {gamma} is not a nonzero dimension vector")
    if pair(theta, gamma) != 0:
        raise ValueError(f"theta is not orthogonal to gamma = {gamma}")
    if any(len(g) != omega.dim for g in att.invariants):
        raise DimensionMismatch("attractor classes do not match the quiver")
    bars = {v: att.rational(v) for v in _box(gamma)}
    if not any(contract(omega, gamma)):
        # no wall-crossing for this class
        a = bars[gamma]
        terms = (Decomposition((gamma,), 1, 1, a),) if a else ()
        return a, terms
    support = [v for v, a in bars.items() if a]
    terms = []
    for parts in multisets(support, gamma):
        F = 1 if len(parts) == 1 else F_total(omega, parts, theta, spec)
        if not F:
            continue
        prod = Fraction(1)
        for p in parts:
            prod *= bars[p]
        terms.append(Decomposition(parts, F, _aut(parts), prod))
    return sum((t.contribution for t in terms), Fraction(0)), tuple(terms)


def reconstruct_dt(omega: SkewForm, gamma, theta, att: AttractorData, spec: PerturbationSpec = PerturbationSpec()) -> DTResult:
    """DT invariants of gamma at theta from attractor invariants."""
    gamma = tuple(int(a) for a in gamma)
    theta = as_covector(theta)
    omega_bar, terms = rational_dt(omega, gamma, theta, att, spec)
    family = {gamma: omega_bar}
    c = _content(gamma)
    for k in _divisors(c)[1:]:
        sub = _div(gamma, k)
        family[sub] = rational_dt(omega, sub, theta, att, spec)[0]
    return DTResult(gamma, theta, omega_bar, integer_from_rational(family, gamma), terms)


@dataclass(frozen=True)
class TreeCoefficient:
    """Per-attractor-tree coefficient with its toric counterpart."""

    tree: AttractorTree
    F: int
    k_rho: int
    N_toric: Fraction
    flows: tuple  # FlowEmbedding per valid perturbed topology


def tree_coefficients(omega: SkewForm, parts: Sequence[DimVec], theta: Sequence, spec: PerturbationSpec = PerturbationSpec()) -> list[TreeCoefficient]:
    """Every attractor tree with F from flow weights and (k_rho, N_toric) from lattice indices."""
    parts = tuple(tuple(p) for p in parts)
    if len(parts) < 2 or _zero_part_contraction(omega, parts):
        return []
    enum = enumerate_attractor_trees(theta, parts, omega, spec)
    out = []
    for h, embs in enum.fibers.items():
        faces = [FaceType(e.topology.shape, parts, omega) for e in embs]
        n_toric, k_rho = log_gw(h, faces, parts, omega)
        out.append(TreeCoefficient(h, sum(e.weight for e in embs), k_rho, n_toric, embs))
    return out


def correspondence_factor(parts: Sequence[DimVec]) -> Fraction:
    """``prod |gamma_i| / |gamma|``."""
    num = 1
    for p in parts:
        num *= _content(p)
    return Fraction(num, _content(vsum(parts, len(parts[0]))))
