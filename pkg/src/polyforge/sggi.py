"""Rank-three string groups generated by involutions.

A triple ``(r0, r1, r2)`` of involutions with ``r0 r2 = r2 r0`` is checked
for the intersection property, its Schläfli type is read off, and
quotients are produced by factoring out the central involution of the
``<r1, r2>`` rotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    NotAHomomorphismError,
    NotNormalError,
    PreconditionError,
    SggiError,
)
from .fp import Presentation, Word, element_order, fp_group_order, verify_images
from .perm import (
    DEFAULT_ELEMENT_CAP,
    PermGroup,
    Permutation,
    _normal_closure,
    is_normal,
    quotient_action,
    subgroup_elements,
)


@dataclass(frozen=True)
class SchlafliType:
    p1: int
    p2: int

    def __str__(self):
        return f"{{{self.p1},{self.p2}}}"

    def as_list(self):
        return [self.p1, self.p2]


@dataclass(eq=False)
class SggiTriple:
    group: PermGroup
    cached_type: SchlafliType | None = field(default=None, repr=False)

    @property
    def generators(self):
        return self.group.generators

    @property
    def degree(self):
        return self.group.degree

    def order(self):
        return self.group.order()

    def relabel(self, perm):
        """Same triple with points renamed by ``perm`` (conjugation)."""
        return SggiTriple(PermGroup([g.conjugate(perm) for g in self.generators]), self.cached_type)


def make_sggi(triple) -> SggiTriple:
    triple = list(triple)
    if len(triple) != 3:
        raise SggiError(f"expected 3 generators, got {len(triple)}")
    degree = triple[0].degree
    for i, g in enumerate(triple):
        if g.degree != degree:
            raise SggiError(f"generator r{i} has degree {g.degree}, expected {degree}")
        if g.is_identity():
            raise SggiError(f"generator r{i} is the identity")
        if not (g * g).is_identity():
            raise SggiError(f"generator r{i} is not an involution")
    r0, _, r2 = triple
    if not (r0 * r2 * r0 * r2).is_identity():
        raise SggiError("string property fails: r0 r2 has order > 2")
    return SggiTriple(PermGroup(triple))


def schlafli_type(s: SggiTriple) -> SchlafliType:
    if s.cached_type is None:
        r0, r1, r2 = s.generators
        s.cached_type = SchlafliType((r0 * r1).order(), (r1 * r2).order())
    return s.cached_type


def is_degenerate(s: SggiTriple) -> bool:
    t = schlafli_type(s)
    return t.p1 <= 2 or t.p2 <= 2


def _log2_exact(n, what):
    if n <= 0 or n & (n - 1):
        raise PreconditionError(f"{what} {n} is not a power of 2")
    return n.bit_length() - 1


def frattini_subgroup(g: PermGroup) -> PermGroup:
    """Normal closure of generator squares and commutators; equals Phi(G) for 2-groups."""
    gens = g.generators
    seeds = [x * x for x in gens]
    seeds += [gens[i].commutator(gens[j]) for i in range(len(gens)) for j in range(i + 1, len(gens))]
    return _normal_closure(g, seeds)


def generating_rank_mod2(g: PermGroup) -> int:
    """Size of every minimal generating set of a finite 2-group."""
    order = g.order()
    _log2_exact(order, "group order")
    phi = frattini_subgroup(g)
    return _log2_exact(order // phi.order(), "index of the Frattini subgroup")


def is_minimal_generating_set(g: PermGroup) -> bool:
    """No generator can be dropped; exact via Burnside rank for 2-groups."""
    order = g.order()
    gens = g.generators
    if order & (order - 1) == 0:
        return generating_rank_mod2(g) == len(gens)
    for i in range(len(gens)):
        rest = gens[:i] + gens[i + 1 :]
        if PermGroup(rest, degree=g.degree).order() == order:
            return False
    return True


def check_intersection_property(s: SggiTriple, cap=DEFAULT_ELEMENT_CAP) -> bool:
    r0, r1, r2 = s.generators
    if not is_minimal_generating_set(s.group):
        return False
    left = subgroup_elements([r0, r1], cap)
    right = subgroup_elements([r1, r2], cap)
    return left & right == {Permutation.identity(s.degree), r1}


def _rotation_orders(source):
    if isinstance(source, SggiTriple):
        t = schlafli_type(source)
        return t.p1, t.p2
    order = fp_group_order(source)
    return (
        element_order(source, Word.gens(0, 1), order),
        element_order(source, Word.gens(1, 2), order),
    )


def _check_homomorphism(source, target: SggiTriple):
    images = list(target.generators)
    if isinstance(source, Presentation):
        if source.ngens != 3:
            raise NotAHomomorphismError("source presentation must have 3 generators")
        ok = verify_images(source, images)
    else:
        # the diagonal subgroup projects isomorphically onto the source iff
        # the generator map extends to a homomorphism
        src = list(source.generators)
        diagonal = PermGroup(
            [Permutation(a.images + tuple(x + a.degree for x in b.images)) for a, b in zip(src, images)]
        )
        ok = diagonal.order() == source.order()
    if not ok:
        raise NotAHomomorphismError("generator map does not extend to a homomorphism")


def quotient_criterion(source, target: SggiTriple) -> bool:
    """True if ``r_i -> target_i`` is injective on ``<r0,r1>`` or on ``<r1,r2>``.

    ``target`` must have the intersection property; the source then does too.
    """
    if not check_intersection_property(target):
        raise PreconditionError("target triple lacks the intersection property")
    _check_homomorphism(source, target)
    q1, q2 = _rotation_orders(source)
    t = schlafli_type(target)
    imgs = target.generators
    # make_sggi guarantees non-identity images, so a dihedral subgroup maps
    # injectively exactly when its rotation keeps its order
    assert not any(g.is_identity() for g in imgs)
    return t.p1 == q1 or t.p2 == q2


def quotient_by_polar_center(s: SggiTriple) -> SggiTriple:
    """Factor out ``<(r1 r2)^(2^(t-1))>`` from a group of type {2^s, 2^t}, s <= t, 2t >= n-1."""
    order = s.order()
    n = _log2_exact(order, "group order")
    typ = schlafli_type(s)
    try:
        sexp = _log2_exact(typ.p1, "rotation order")
        texp = _log2_exact(typ.p2, "rotation order")
    except PreconditionError as exc:
        raise PreconditionError(f"type {typ} is not of the form {{2^s,2^t}}") from exc
    if not (2 <= sexp <= texp):
        raise PreconditionError(f"type {typ} needs 4 <= p1 <= p2")
    if 2 * texp < n - 1:
        raise PreconditionError(f"2t >= n-1 fails for t={texp}, n={n}")
    r0, r1, r2 = s.generators
    z = (r1 * r2) ** (2 ** (texp - 1))
    central = PermGroup([z])
    if not is_normal(s.group, central):
        raise NotNormalError("the polar central involution does not generate a normal subgroup")
    quotient = quotient_action(s.group, central)
    result = make_sggi(quotient.generators)
    if result.order() != order // 2:
        raise AssertionError(f"quotient order {result.order()} != {order // 2}")
    expected = SchlafliType(typ.p1, typ.p2 // 2)
    if schlafli_type(result) != expected:
        raise AssertionError(f"quotient type {schlafli_type(result)} != {expected}")
    return result
