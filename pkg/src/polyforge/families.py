"""Presentations of the rank-three 2-group families and their expected invariants.

Family ids use the CLI syntax ``TAG[:k=v,...]``, e.g. ``G1:n=10``,
``H:n=12,s=3,t=4``, ``M2:b=3`` or ``S9b``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ConstraintViolation, UnsupportedFamilyError
from .fp import Presentation, Word, fp_group_order, todd_coxeter, coset_perm_rep
from .perm import PermGroup
from .sggi import SchlafliType, SggiTriple, make_sggi

PARAMS = {
    "H": ("n", "s", "t"),
    **{f"G{i}": ("n",) for i in range(1, 9)},
    "L1": (),
    "L2": ("t",),
    "L3": ("t",),
    "M1": ("b",),
    "M2": ("b",),
    "S8a": (),
    "S8b": (),
    "S9a": (),
    "S9b": (),
}
TAGS = tuple(PARAMS)

# smallest n for which every 2^(n-c) exponent of G_i has n-c >= 1
G_MIN_N = {1: 5, 2: 5, 3: 6, 4: 6, 5: 7, 6: 7, 7: 7, 8: 7}
H_MIN_N = 10


@dataclass(frozen=True)
class FamilyId:
    tag: str
    params: tuple = ()

    def __post_init__(self):
        if self.tag not in PARAMS:
            raise UnsupportedFamilyError(f"unknown family {self.tag!r}; expected one of {', '.join(TAGS)}")
        if len(self.params) != len(PARAMS[self.tag]):
            names = ",".join(PARAMS[self.tag]) or "no parameters"
            raise ValueError(f"{self.tag} takes {names}, got {self.params}")

    @classmethod
    def parse(cls, text):
        text = text.strip()
        tag, _, rest = text.partition(":")
        tag = tag.strip()
        if tag not in PARAMS:
            raise UnsupportedFamilyError(f"unknown family {tag!r}; expected one of {', '.join(TAGS)}")
        given = {}
        for part in filter(None, (p.strip() for p in rest.split(","))):
            m = re.fullmatch(r"([a-z]+)\s*=\s*(-?\d+)", part)
            if not m:
                raise ValueError(f"bad parameter {part!r} in {text!r}")
            given[m.group(1)] = int(m.group(2))
        names = PARAMS[tag]
        if set(given) != set(names):
            want = ",".join(f"{k}=.." for k in names) or "no parameters"
            raise ValueError(f"{tag} expects {want}, got {text!r}")
        return cls(tag, tuple(given[k] for k in names))

    def __str__(self):
        if not self.params:
            return self.tag
        return self.tag + ":" + ",".join(f"{k}={v}" for k, v in zip(PARAMS[self.tag], self.params))

    @property
    def kwargs(self):
        return dict(zip(PARAMS[self.tag], self.params))


@dataclass(frozen=True)
class Expectation:
    """What a family member is claimed to be, with a short label for the claim."""

    order: int
    schlafli: SchlafliType
    string_c_group: bool
    source: str
    # (word text, order) pairs whose orders are part of the claim
    element_orders: tuple = ()


# ---------------------------------------------------------------------------
# builders

_BASE = ["r0^2", "r1^2", "r2^2"]


def _present(name, texts):
    return Presentation.from_relators(3, texts, "all", name)


def build_H(n, s, t, allow_small=False):
    if s < 2:
        raise ConstraintViolation("H", "s >= 2", {"n": n, "s": s, "t": t})
    if t < 2:
        raise ConstraintViolation("H", "t >= 2", {"n": n, "s": s, "t": t})
    if n - s - t < 1:
        raise ConstraintViolation("H", "n - s - t >= 1", {"n": n, "s": s, "t": t})
    if n < H_MIN_N and not allow_small:
        raise ConstraintViolation("H", f"n >= {H_MIN_N}", {"n": n, "s": s, "t": t})
    k = n - s - t
    if k % 2:
        last = f"[(r0*r1)^2,r2]^{2 ** ((k - 1) // 2)}"
    else:
        last = f"[(r0*r1)^2,(r1*r2)^2]^{2 ** ((k - 2) // 2)}"
    texts = _BASE + [
        f"(r0*r1)^{2**s}",
        f"(r1*r2)^{2**t}",
        "(r0*r2)^2",
        "[(r0*r1)^4,r2]",
        "[r0,(r1*r2)^4]",
        last,
    ]
    return _present(f"H:n={n},s={s},t={t}", texts)


def build_G(i, n):
    if i not in G_MIN_N:
        raise UnsupportedFamilyError(f"no family G{i}")
    if n < G_MIN_N[i]:
        raise ConstraintViolation(f"G{i}", f"n >= {G_MIN_N[i]}", {"n": n})
    e = lambda c: 2 ** (n - c)  # noqa: E731
    head = _BASE + ["(r0*r1)^4"]
    if i in (1, 2):
        rot = f"(r1*r2)^{e(3)}"
        last = "[(r0*r1)^2,r2]" + (f"*(r1*r2)^{e(4)}" if i == 2 else "")
        texts = head + [rot, "(r0*r2)^2", last]
    elif i in (3, 4):
        rot = f"(r1*r2)^{e(4)}"
        last = "[(r0*r1)^2,(r1*r2)^2]" + (f"*(r1*r2)^{e(5)}" if i == 4 else "")
        texts = head + [rot, "(r0*r2)^2", last]
    else:
        tail = f"*(r1*r2)^{e(6)}"
        first = "[r0,(r1*r2)^2]^2" + (tail if i in (6, 8) else "")
        second = "[r0,(r1*r2)^4]" + (tail if i in (7, 8) else "")
        texts = head + [f"(r1*r2)^{e(5)}", "(r0*r2)^2", first, second]
    return _present(f"G{i}:n={n}", texts)


def build_L(i, t=None):
    if i == 1:
        return _present("L1", _BASE + ["(r0*r1)^4", "(r1*r2)^2", "(r0*r2)^2"])
    if i not in (2, 3):
        raise UnsupportedFamilyError(f"no family L{i}")
    if t is None or t < 1:
        raise ConstraintViolation(f"L{i}", "t >= 1", {"t": t})
    if i == 2:
        texts = _BASE + ["(r0*r1)^2", f"(r1*r2)^{2**t}", "(r0*r2)^2"]
    else:
        texts = _BASE + [f"(r0*r1)^{2**t}", "(r1*r2)^2", "(r0*r2)^2"]
    return _present(f"L{i}:t={t}", texts)


def build_M(i, b):
    if i not in (1, 2):
        raise UnsupportedFamilyError(f"no family M{i}")
    if b < 1:
        raise ConstraintViolation(f"M{i}", "b >= 1", {"b": b})
    last = f"(r2*r1*r0)^{2 * b}" if i == 1 else f"(r1*r2*r1*r0)^{b}"
    return _present(f"M{i}:b={b}", _BASE + ["(r0*r1)^4", "(r1*r2)^4", "(r0*r2)^2", last])


# the long bracket of S9b; entries are generator indices
S9B_BRACKET = (1, 0, 2, 1, 0, 1, 0)
# Rotation exponent of S8a.  Taken literally as 2^8 the presentation
# collapses onto S9a (order 512, type {4,16}); 2^3 gives the intended
# order-256 group of type {4,8}.  Pass s8a_rotation=256 for the literal form.
S8A_ROTATION_EXPONENT = 2**3
S8A_LITERAL_ROTATION_EXPONENT = 2**8


def _bracket_text(entries, convention):
    names = [f"r{g}" for g in entries]
    if convention == "left":
        return "[" + ",".join(names) + "]"
    if convention == "right":
        text = names[-1]
        for nm in reversed(names[:-1]):
            text = f"[{nm},{text}]"
        return text
    raise ValueError(f"bracket convention must be 'left' or 'right', not {convention!r}")


def build_sporadic(which, bracket="left", s8a_rotation=S8A_ROTATION_EXPONENT):
    """The four extra groups of orders 2^8 and 2^9.

    ``bracket`` selects how the seven-entry bracket of S9b nests.
    """
    head = _BASE + ["(r0*r1)^4"]
    if which == "S8a":
        texts = head + [f"(r1*r2)^{s8a_rotation}", "(r0*r2)^2", "[(r0*r1)^2,(r1*r2)^2]*(r1*r2)^4"]
    elif which == "S8b":
        texts = head + ["(r1*r2)^8", "(r0*r2)^2", "[((r1*r2)^2)^r0,r1*r2]*(r1*r2)^4"]
    elif which == "S9a":
        texts = head + ["(r1*r2)^16", "(r0*r2)^2", "[(r0*r1)^2,(r1*r2)^2]*(r1*r2)^4"]
    elif which == "S9b":
        texts = head + [
            "(r1*r2)^16",
            "(r0*r2)^2",
            "[(r0*r1)^2,(r1*r2)^2]*(r2*r1)^4",
            _bracket_text(S9B_BRACKET, bracket),
        ]
    else:
        raise UnsupportedFamilyError(f"no sporadic group {which!r}")
    return _present(which, texts)


def build(fid: FamilyId | str, allow_small=False, **options) -> Presentation:
    if isinstance(fid, str):
        fid = FamilyId.parse(fid)
    tag, kw = fid.tag, fid.kwargs
    if tag == "H":
        return build_H(kw["n"], kw["s"], kw["t"], allow_small=allow_small)
    if tag[0] == "G":
        return build_G(int(tag[1:]), kw["n"])
    if tag[0] == "L":
        return build_L(int(tag[1:]), kw.get("t"))
    if tag[0] == "M":
        return build_M(int(tag[1:]), kw["b"])
    return build_sporadic(tag, **options)


def expectation(fid: FamilyId | str) -> Expectation:
    if isinstance(fid, str):
        fid = FamilyId.parse(fid)
    tag, kw = fid.tag, fid.kwargs
    if tag == "H":
        n, s, t = kw["n"], kw["s"], kw["t"]
        return Expectation(2**n, SchlafliType(2**s, 2**t), True, "existence-theorem")
    if tag[0] == "G":
        i, n = int(tag[1:]), kw["n"]
        c = 3 if i <= 2 else 4 if i <= 4 else 5
        return Expectation(2**n, SchlafliType(4, 2 ** (n - c)), True, f"classification-type-4-2^(n-{c})")
    if tag == "L1":
        return Expectation(16, SchlafliType(4, 2), True, "degenerate-family-order",
                           (("r0*r1", 4), ("r1*r2", 2), ("r0*r2", 2)))
    if tag == "L2":
        t = kw["t"]
        return Expectation(2 ** (t + 2), SchlafliType(2, 2**t), True, "degenerate-family-order",
                           (("r0*r1", 2), ("r1*r2", 2**t), ("r0*r2", 2)))
    if tag == "L3":
        t = kw["t"]
        return Expectation(2 ** (t + 2), SchlafliType(2**t, 2), True, "degenerate-family-order",
                           (("r0*r1", 2**t), ("r1*r2", 2), ("r0*r2", 2)))
    # at b = 1 the two dihedral subgroups overlap too much (M1) or r0 lies
    # in <r1,r2> (M2), so only the order claims survive there
    if tag == "M1":
        b = kw["b"]
        return Expectation(16 * b * b, SchlafliType(4, 4), b >= 2, "type44-family-order",
                           (("r0*r1", 4), ("r1*r2", 4), ("r0*r2", 2), ("r2*r1*r0", 2 * b)))
    if tag == "M2":
        b = kw["b"]
        return Expectation(8 * b * b, SchlafliType(4, 4), b >= 2, "type44-family-order",
                           (("r0*r1", 4), ("r1*r2", 4), ("r0*r2", 2), ("r1*r2*r1*r0", b)))
    if tag.startswith("S8"):
        return Expectation(256, SchlafliType(4, 8), True, "sporadic-n8")
    return Expectation(512, SchlafliType(4, 16), True, "sporadic-n9")


# ---------------------------------------------------------------------------
# permutation triples from presentations

# subgroups tried, in order, for a small faithful coset action
_FAITHFUL_CANDIDATES = ((0, 2), (0,), (2,), ())


def faithful_perm_triple(presentation: Presentation, order=None, max_cosets=None) -> SggiTriple:
    """A triple acting faithfully on the cosets of a small subgroup.

    Falls back to the regular representation (trivial subgroup), which is
    always faithful.
    """
    if order is None:
        order = fp_group_order(presentation, max_cosets)
    for gens in _FAITHFUL_CANDIDATES:
        sub = [Word.gens(g) for g in gens]
        table = todd_coxeter(presentation, sub, max_cosets)
        if not table.complete:
            if not gens:
                fp_group_order(presentation, max_cosets)  # raises with diagnostics
            continue
        images = coset_perm_rep(table)
        if gens and PermGroup(images).order() != order:
            continue
        return make_sggi(images)
    raise AssertionError("the regular representation is always faithful")


def regular_perm_triple(presentation: Presentation, max_cosets=None) -> SggiTriple:
    table = todd_coxeter(presentation, (), max_cosets)
    if not table.complete:
        fp_group_order(presentation, max_cosets)  # raises with diagnostics
    return make_sggi(coset_perm_rep(table))
