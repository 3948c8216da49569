"""Leaf-labeled rooted trees and the discrete attractor flow.

A tree *shape* is a nested tuple whose leaves are the integer labels
``1..r``; internal nodes list their children sorted by smallest leaf label,
so two shapes are equal exactly when the labeled trees are isomorphic.
An internal node is identified by the sorted tuple of its leaf labels.

The flow starts at a root point in M_Q and follows the direction
``iota_{gamma_E} omega`` of each edge until it meets the codimension-two
affine plane cut out by the constraints of the two children. Perturbed runs
use small generic constraints; limit runs set every constraint to zero and
contract the edges that shrink to length 0, producing attractor flow trees.
"""
from __future__ import annotations

import enum
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterator, Sequence, Union

from .errors import NonGenericStability, NotSmallEnough, RetriesExhausted
from .quiver import (
    Covector,
    DimVec,
    SkewForm,
    as_covector,
    contract,
    pair,
    require_contractions,
    vsum,
)

Shape = Union[int, tuple]

MASK64 = (1 << 64) - 1


class SplitMix64:
    """The splitmix64 generator (Steele, Lea & Flood), bit-exact on every platform."""

    GOLDEN = 0x9E3779B97F4A7C15
    MIX1 = 0xBF58476D1CE4E5B9
    MIX2 = 0x94D049BB133111EB

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + self.GOLDEN) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * self.MIX1) & MASK64
        z = ((z ^ (z >> 27)) * self.MIX2) & MASK64
        return z ^ (z >> 31)


# ---------------------------------------------------------------- tree shapes


def leaves_of(shape: Shape) -> tuple[int, ...]:
    if isinstance(shape, int):
        return (shape,)
    return tuple(sorted(x for child in shape for x in leaves_of(child)))


def canonical_shape(shape: Shape) -> Shape:
    if isinstance(shape, int):
        return shape
    children = [canonical_shape(c) for c in shape]
    children.sort(key=lambda c: min(leaves_of(c)))
    return tuple(children)


def shape_encoding(shape: Shape) -> str:
    if isinstance(shape, int):
        return str(shape)
    return "(" + ",".join(shape_encoding(c) for c in shape) + ")"


def internal_nodes(shape: Shape) -> list[tuple]:
    """Internal nodes in pre-order (root first)."""
    if isinstance(shape, int):
        return []
    out = [shape]
    for c in shape:
        out.extend(internal_nodes(c))
    return out


def shape_from_json(obj) -> Shape:
    if isinstance(obj, bool):
        raise ValueError("tree leaves must be integer labels")
    if isinstance(obj, int):
        return obj
    if isinstance(obj, list) and len(obj) >= 2:
        return tuple(shape_from_json(c) for c in obj)
    raise ValueError(f"malformed tree node: {obj!r}")


def shape_to_json(shape: Shape):
    if isinstance(shape, int):
        return shape
    return [shape_to_json(c) for c in shape]


@dataclass(frozen=True)
class LabeledTree:
    """Rooted tree with leaves labeled 1..r, stored in canonical form."""

    shape: Shape

    def __post_init__(self):
        shape = canonical_shape(self.shape)
        labels = leaves_of(shape)
        if labels != tuple(range(1, len(labels) + 1)):
            raise ValueError(f"leaves must be labeled 1..r, got {labels}")
        object.__setattr__(self, "shape", shape)

    @property
    def leaf_count(self) -> int:
        return len(leaves_of(self.shape))

    @property
    def encoding(self) -> str:
        return shape_encoding(self.shape)

    def is_binary(self) -> bool:
        return _is_binary(self.shape)

    def edge_class(self, node: Shape, parts: Sequence[DimVec]) -> DimVec:
        """Class of the edge above ``node``: the sum of the parts at its leaves."""
        return vsum([parts[i - 1] for i in leaves_of(node)], len(parts[0]))

    def __str__(self):
        return self.encoding


@lru_cache(maxsize=65536)
def _is_binary(shape: Shape) -> bool:
    return all(len(n) == 2 for n in internal_nodes(shape))


def _insertions(shape: Shape, leaf: int) -> Iterator[Shape]:
    yield (shape, leaf)
    if isinstance(shape, tuple):
        for k, child in enumerate(shape):
            for new in _insertions(child, leaf):
                yield shape[:k] + (new,) + shape[k + 1 :]


def enumerate_binary_trees(r: int) -> list[LabeledTree]:
    """All leaf-labeled rooted binary trees on r leaves; (2r-3)!! of them for r >= 2."""
    if r < 1:
        raise ValueError("need at least one leaf")
    shapes: list[Shape] = [1]
    for leaf in range(2, r + 1):
        shapes = [s for old in shapes for s in _insertions(old, leaf)]
    return [LabeledTree(s) for s in shapes]


# ---------------------------------------------------------------- constraints


@dataclass(frozen=True)
class GammaConstraint:
    """Affine hyperplanes <x, gamma_i> = eps_i."""

    eps: tuple[Fraction, ...]
    parts: tuple[DimVec, ...]
    _sums: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(Fraction(e) for e in self.eps))
        object.__setattr__(self, "parts", tuple(tuple(p) for p in self.parts))
        if len(self.eps) != len(self.parts):
            raise ValueError("one constant per part is required")

    @classmethod
    def linear(cls, parts: Sequence[DimVec]) -> "GammaConstraint":
        return cls((Fraction(0),) * len(parts), tuple(parts))

    def constant(self, labels: Sequence[int]) -> Fraction:
        labels = tuple(labels)
        c = self._sums.get(labels)
        if c is None:
            c = self._sums[labels] = sum((self.eps[i - 1] for i in labels), Fraction(0))
        return c

    def distinct_hyperplanes(self) -> bool:
        """True when no two parallel constraints define the same hyperplane."""
        seen = {}
        for e, g in zip(self.eps, self.parts):
            c = 0
            for a in g:
                c = gcd(c, a)
            # normalise by the primitive vector with a positive leading entry
            lead = next(a for a in g if a)
            s = c if lead > 0 else -c
            key = (tuple(a // s for a in g), e / s)
            if key in seen:
                return False
            seen[key] = True
        return True


@dataclass(frozen=True)
class PerturbationSpec:
    seed: int = 0
    scale: Fraction = Fraction(1, 2**64)
    max_retries: int = 16

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.scale <= 0:
            raise ValueError("perturbation scale must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be nonnegative")


@dataclass(frozen=True)
class _Draw:
    eta: tuple[int, ...]
    jitter: tuple[int, ...]


def _draw(gen: SplitMix64, r: int, d: int) -> _Draw:
    eta: list[int] = []
    while len(eta) < r:
        e = 2 * (gen.next() >> 34) + 1
        if e not in eta:
            eta.append(e)
    jitter = tuple((gen.next() >> 32) - (1 << 31) for _ in range(d))
    return _Draw(tuple(eta), jitter)


def _apply_draw(theta: Covector, parts, draw: _Draw, scale: Fraction):
    d = len(theta)
    gamma = vsum(parts, d)
    k = next(i for i, a in enumerate(gamma) if a)
    eps = tuple(scale * e for e in draw.eta)
    # jitter projected into gamma-perp
    w = draw.jitter
    wg = sum(a * b for a, b in zip(w, gamma))
    tangent = [gamma[k] * a for a in w]
    tangent[k] -= wg
    theta_j = [t + scale * scale * a for t, a in zip(theta, tangent)]
    shift = (sum(eps, Fraction(0)) - pair(theta_j, gamma)) / gamma[k]
    theta_j[k] += shift
    return tuple(theta_j), GammaConstraint(eps, tuple(parts))


def _check_theta(theta: Covector, parts, omega: SkewForm):
    gamma = vsum(parts, omega.dim)
    if len(theta) != omega.dim:
        raise ValueError(f"theta has {len(theta)} entries, expected {omega.dim}")
    if pair(theta, gamma) != 0:
        raise ValueError(f"theta is not orthogonal to gamma = {gamma}")
    require_contractions(omega, parts)


def check_generic_theta(theta: Covector, parts, omega: SkewForm) -> None:
    """Raise NonGenericStability if theta lies on a wall of gamma.

    A wall is ``<theta, gamma_S> = 0`` for a proper nonempty sub-sum gamma_S
    of the parts with ``omega(gamma_S, gamma) != 0``: exactly the condition
    for the root edge of some limit flow to have length zero.
    """
    r = len(parts)
    gamma = vsum(parts, omega.dim)
    for mask in range(1, (1 << r) - 1):
        sub = vsum([parts[i] for i in range(r) if mask >> i & 1], omega.dim)
        if omega(sub, gamma) != 0 and pair(theta, sub) == 0:
            raise NonGenericStability(f"theta = {tuple(str(t) for t in theta)} lies on the wall of {sub}")


def perturb(theta: Sequence, parts: Sequence[DimVec], omega: SkewForm, spec: PerturbationSpec):
    """Seeded perturbation: a root point near theta and generic small constraints.

    Returns ``(theta_tilde, constraint)`` with ``<theta_tilde, gamma> == sum(eps)``.
    """
    theta = as_covector(theta)
    parts = tuple(tuple(p) for p in parts)
    _check_theta(theta, parts, omega)
    draw = _draw(SplitMix64(spec.seed), len(parts), omega.dim)
    return _apply_draw(theta, parts, draw, spec.scale)


# ---------------------------------------------------------------- the flow


class FlowMode(enum.Enum):
    PERTURBED = "perturbed"
    LIMIT = "limit"


class FlowStatus(enum.Enum):
    INVALID = "invalid"  # some edge would need negative length
    DEGENERATE = "degenerate"  # omega vanishes on the children at some vertex
    GENERICITY_FAILURE = "genericity_failure"  # zero-length edge in a perturbed run


@dataclass(frozen=True)
class FlowEmbedding:
    """A tree embedded by the flow.

    ``positions`` and ``lengths`` are keyed by node (sorted leaf labels);
    ``lengths[node]`` is the flow time on the edge above that node.
    """

    topology: LabeledTree
    root: Covector
    positions: dict = field(hash=False, compare=False)
    lengths: dict = field(hash=False, compare=False)
    weight: int = 1


@dataclass(frozen=True)
class _Step:
    key: tuple  # leaves below the edge
    parent: tuple | None  # key of the vertex the edge starts from
    g_edge: DimVec
    direction: DimVec
    first: tuple  # leaves of the first child
    g_first: DimVec
    denom: int  # omega(g_edge, g_first)
    children: tuple  # (leaves, class) per child


@lru_cache(maxsize=65536)
def _flow_plan(tree: LabeledTree, parts: tuple, omega: SkewForm) -> tuple[int, tuple]:
    """``(weight, steps)`` with steps in pre-order; depends only on the combinatorics."""
    d = omega.dim
    weight = 1
    steps = []
    stack = [(tree.shape, None)] if isinstance(tree.shape, tuple) else []
    while stack:
        node, parent = stack.pop()
        key = leaves_of(node)
        g_edge = vsum([parts[i - 1] for i in key], d)
        children = tuple(
            (leaves_of(c), vsum([parts[i - 1] for i in leaves_of(c)], d)) for c in node
        )
        (first, g1), (_, g2) = children
        weight *= abs(omega(g1, g2))
        steps.append(
            _Step(key, parent, g_edge, contract(omega, g_edge), first, g1, omega(g_edge, g1), children)
        )
        for c in node:
            if isinstance(c, tuple):
                stack.append((c, key))
    return weight, tuple(steps)


def tree_weight(tree: LabeledTree, parts: Sequence[DimVec], omega: SkewForm) -> int:
    """Product over internal vertices of |omega(child_1, child_2)|; 0 if degenerate."""
    if not tree.is_binary():
        raise ValueError("weights are defined on binary trees only")
    return _flow_plan(tree, tuple(tuple(p) for p in parts), omega)[0]


def _common(x: Covector) -> tuple[list[int], int]:
    den = 1
    for a in x:
        den = den * a.denominator // gcd(den, a.denominator)
    return [a.numerator * (den // a.denominator) for a in x], den


def _ipair(nums, g) -> int:
    return sum(a * b for a, b in zip(nums, g) if b)


def run_flow(
    tree: LabeledTree,
    root: Sequence,
    constraint: GammaConstraint,
    omega: SkewForm,
    mode: FlowMode = FlowMode.PERTURBED,
):
    """Embed a binary tree by the discrete attractor flow.

    Returns a :class:`FlowEmbedding`, or a :class:`FlowStatus` when the tree
    is degenerate, needs a negative edge, or (perturbed mode) a zero edge.
    """
    parts = constraint.parts
    root = as_covector(root)
    gamma = vsum(parts, omega.dim)
    if pair(root, gamma) != constraint.constant(range(1, len(parts) + 1)):
        raise ValueError("root point does not lie on the outgoing constraint")
    if not tree.is_binary():
        raise ValueError("the flow is defined on binary trees only")
    weight, steps = _flow_plan(tree, parts, omega)
    if weight == 0:
        return FlowStatus.DEGENERATE

    # positions are kept as (integer numerators, common denominator)
    exact: dict = {None: _common(root)}
    lengths: dict = {}
    for st in steps:
        nums, den = exact[st.parent]
        # t = (c_1 - <x, g_1>) / omega(g_edge, g_1)
        t = (constraint.constant(st.first) - Fraction(_ipair(nums, st.g_first), den)) / st.denom
        if t < 0:
            return FlowStatus.INVALID
        if t == 0 and mode is FlowMode.PERTURBED:
            return FlowStatus.GENERICITY_FAILURE
        tn, td = t.numerator, t.denominator
        new = [a * td + tn * u * den for a, u in zip(nums, st.direction)]
        new_den = den * td
        g = new_den
        for a in new:
            g = gcd(g, a)
        if g > 1:
            new = [a // g for a in new]
            new_den //= g
        assert _ipair(new, st.g_edge) * den == _ipair(nums, st.g_edge) * new_den, (
            "pairing with the edge class must be constant"
        )
        for leaves, g_child in st.children:
            assert Fraction(_ipair(new, g_child), new_den) == constraint.constant(leaves)
        exact[st.key] = (new, new_den)
        lengths[st.key] = t
    positions = {
        k: tuple(Fraction(a, den) for a in nums) for k, (nums, den) in exact.items() if k is not None
    }
    return FlowEmbedding(tree, root, positions, lengths, weight)


# ---------------------------------------------------------------- attractor trees


@dataclass(frozen=True)
class AttractorVertex:
    position: Covector
    children: tuple  # of int leaf labels or AttractorVertex

    def leaves(self) -> tuple[int, ...]:
        out = []
        for c in self.children:
            out.extend([c] if isinstance(c, int) else c.leaves())
        return tuple(sorted(out))

    @property
    def encoding(self) -> str:
        inner = ",".join(str(c) if isinstance(c, int) else c.encoding for c in self.children)
        pos = ",".join(str(a) for a in self.position)
        return f"({inner})@[{pos}]"

    def shape(self) -> tuple:
        return tuple(c if isinstance(c, int) else c.shape() for c in self.children)

    def vertices(self) -> list["AttractorVertex"]:
        out = [self]
        for c in self.children:
            if not isinstance(c, int):
                out.extend(c.vertices())
        return out


@dataclass(frozen=True)
class AttractorTree:
    """An attractor flow tree with root theta; vertices may have any valence >= 3."""

    root: Covector
    top: AttractorVertex

    @property
    def encoding(self) -> str:
        return "[" + ",".join(str(a) for a in self.root) + "]->" + self.top.encoding

    def shape(self) -> tuple:
        return self.top.shape()

    def __str__(self):
        return self.encoding


def _contract_zero_edges(node: tuple, emb: FlowEmbedding) -> AttractorVertex:
    children: list = []
    for c in node:
        if isinstance(c, int):
            children.append(c)
        elif emb.lengths[leaves_of(c)] == 0:
            children.extend(_contract_zero_edges(c, emb).children)
        else:
            children.append(_contract_zero_edges(c, emb))
    children.sort(key=lambda c: c if isinstance(c, int) else min(c.leaves()))
    return AttractorVertex(emb.positions[leaves_of(node)], tuple(children))


def limit_tree(tree: LabeledTree, theta: Sequence, parts: Sequence[DimVec], omega: SkewForm) -> AttractorTree:
    """Run the flow at zero constraints from theta and contract zero-length edges.

    Raises NotSmallEnough if the limit flow needs a negative edge, and
    NonGenericStability if theta itself sits on a vertex of the limit tree.
    """
    theta = as_covector(theta)
    emb = run_flow(tree, theta, GammaConstraint.linear(parts), omega, FlowMode.LIMIT)
    if emb is FlowStatus.INVALID:
        raise NotSmallEnough(f"topology {tree} has no valid limit flow")
    if not isinstance(emb, FlowEmbedding):
        raise ValueError(f"topology {tree} is {emb.value}")
    if emb.lengths[leaves_of(tree.shape)] == 0:
        raise NonGenericStability(f"theta = {theta} lies on a wall for topology {tree}")
    top = _contract_zero_edges(tree.shape, emb)
    result = AttractorTree(theta, top)
    _validate_attractor_tree(result, parts, omega)
    return result


def _validate_attractor_tree(h: AttractorTree, parts, omega: SkewForm) -> None:
    d = omega.dim
    for v in h.top.vertices():
        classes = [
            parts[c - 1] if isinstance(c, int) else vsum([parts[i - 1] for i in c.leaves()], d)
            for c in v.children
        ]
        classes.append(vsum(classes, d))
        assert any(
            omega(a, b) != 0 for i, a in enumerate(classes) for b in classes[i + 1 :]
        ), "attractor tree vertex with all adjacent classes omega-orthogonal"


@dataclass(frozen=True)
class AttractorEnumeration:
    """Attractor flow trees with the perturbed binary flows that limit onto each."""

    fibers: dict  # AttractorTree -> tuple[FlowEmbedding, ...]
    theta_tilde: Covector
    constraint: GammaConstraint
    scale: Fraction
    attempts: int

    def signature(self):
        return _signature(self.fibers)


def _signature(fibers: dict):
    return frozenset(
        (h.encoding, tuple(sorted((e.topology.encoding, e.weight) for e in embs)))
        for h, embs in fibers.items()
    )


class _GenericityFailure(Exception):
    pass


def _attempt(trees, theta, parts, omega, draw, scale, limit_cache):
    theta_tilde, constraint = _apply_draw(theta, parts, draw, scale)
    if not constraint.distinct_hyperplanes():
        raise _GenericityFailure
    fibers: dict = {}
    for tree in trees:
        emb = run_flow(tree, theta_tilde, constraint, omega, FlowMode.PERTURBED)
        if emb is FlowStatus.GENERICITY_FAILURE:
            raise _GenericityFailure
        if not isinstance(emb, FlowEmbedding):
            continue
        if tree not in limit_cache:
            limit_cache[tree] = limit_tree(tree, theta, parts, omega)
        fibers.setdefault(limit_cache[tree], []).append(emb)
    fibers = {
        h: tuple(sorted(embs, key=lambda e: e.topology.encoding))
        for h, embs in sorted(fibers.items(), key=lambda kv: kv[0].encoding)
    }
    return AttractorEnumeration(fibers, theta_tilde, constraint, scale, 0)


def enumerate_attractor_trees(
    theta: Sequence, parts: Sequence[DimVec], omega: SkewForm, spec: PerturbationSpec = PerturbationSpec()
) -> AttractorEnumeration:
    """Group the valid perturbed binary flows by their limit attractor tree.

    A perturbation is accepted once it is generic (no zero-length edge,
    distinct parallel constraints), every valid flow has a valid limit, and
    the result is unchanged when the perturbation scale is halved. Failing
    genericity draws fresh values from the seeded stream; failing the other
    checks halves the scale. After ``spec.max_retries`` failures,
    RetriesExhausted is raised.
    """
    theta = as_covector(theta)
    parts = tuple(tuple(p) for p in parts)
    if len(parts) < 2:
        raise ValueError("attractor trees need at least two parts")
    _check_theta(theta, parts, omega)
    check_generic_theta(theta, parts, omega)
    trees = [t for t in enumerate_binary_trees(len(parts)) if tree_weight(t, parts, omega)]
    gen = SplitMix64(spec.seed)
    draw = _draw(gen, len(parts), omega.dim)
    scale = spec.scale
    limit_cache: dict = {}
    for attempt in range(spec.max_retries + 1):
        try:
            result = _attempt(trees, theta, parts, omega, draw, scale, limit_cache)
            check = _attempt(trees, theta, parts, omega, draw, scale / 2, limit_cache)
        except _GenericityFailure:
            draw = _draw(gen, len(parts), omega.dim)
            continue
        except NotSmallEnough:
            scale /= 2
            continue
        if result.signature() != check.signature():
            scale /= 2
            continue
        return AttractorEnumeration(
            result.fibers, result.theta_tilde, result.constraint, scale, attempt + 1
        )
    raise RetriesExhausted(
        f"no acceptable perturbation after {spec.max_retries + 1} attempts"
    )
