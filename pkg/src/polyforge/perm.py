"""Permutations and permutation groups.

Points are ``0 .. degree-1``.  Permutations act on the right, so for a
product ``p * q`` the permutation ``p`` is applied first; conjugation
``x ** g``-style reads as ``g^-1 x g``.  Images live in read-only numpy
arrays, which keeps composition of degree-4096 regular representations
cheap.

Group orders and membership come from a deterministic Schreier-Sims
stabilizer chain (explicit Schreier generators, base points chosen as the
first point moved by the generator that needs one).
"""

from __future__ import annotations

import math
import threading
from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapExceededError,
    DegreeMismatchError,
    MembershipError,
    NotNormalError,
    PolyforgeError,
)

#: default cap for :func:`subgroup_elements`
DEFAULT_ELEMENT_CAP = 2**16
#: default cap on stored transversal entries (points x degree) per chain
DEFAULT_CHAIN_CAP = 2**27

_ARANGE_CACHE: dict[int, np.ndarray] = {}


def _dtype(degree):
    return np.int16 if degree <= 2**15 - 1 else np.int32


def _arange(degree):
    a = _ARANGE_CACHE.get(degree)
    if a is None:
        a = np.arange(degree, dtype=_dtype(degree))
        a.setflags(write=False)
        _ARANGE_CACHE[degree] = a
    return a


def _frozen(a):
    a.setflags(write=False)
    return a


def _inverse_array(a):
    inv = np.empty_like(a)
    inv[a] = _arange(len(a))
    return inv


class Permutation:
    """A bijection of ``{0, ..., degree-1}`` stored as an image table."""

    __slots__ = ("_a", "_key")

    def __init__(self, images, *, check=True):
        if isinstance(images, np.ndarray) and not check:
            a = images
        else:
            seq = list(images)
            if not seq:
                raise ValueError("a permutation needs degree >= 1")
            a = np.asarray(seq, dtype=_dtype(len(seq)))
            if check and not np.array_equal(np.sort(a), _arange(len(a))):
                raise ValueError(f"not a bijection of 0..{len(a) - 1}: {seq[:16]}...")
        if a.flags.writeable:
            a = a.copy()
            a.setflags(write=False)
        self._a = a
        self._key = None

    # construction ---------------------------------------------------------

    @classmethod
    def _wrap(cls, a):
        p = cls.__new__(cls)
        if a.flags.writeable:
            a.setflags(write=False)
        p._a = a
        p._key = None
        return p

    @classmethod
    def identity(cls, degree):
        return cls._wrap(_arange(degree))

    @classmethod
    def from_cycles(cls, degree, cycles):
        """Build from disjoint cycles; 1-cycles are accepted and ignored."""
        a = np.arange(degree, dtype=_dtype(degree))
        seen = set()
        for cyc in cycles:
            cyc = [int(x) for x in cyc]
            for x in cyc:
                if not 0 <= x < degree:
                    raise ValueError(f"point {x} outside 0..{degree - 1}")
                if x in seen:
                    raise ValueError(f"point {x} appears in two cycles")
                seen.add(x)
            for x, y in zip(cyc, cyc[1:] + cyc[:1]):
                a[x] = y
        return cls._wrap(a)

    @classmethod
    def from_json(cls, obj):
        perm = cls(obj["images"])
        if perm.degree != obj["degree"]:
            raise ValueError("degree field does not match image table")
        return perm

    # basic protocol -------------------------------------------------------

    @property
    def degree(self):
        return len(self._a)

    @property
    def images(self):
        return tuple(int(x) for x in self._a)

    @property
    def array(self):
        """Read-only numpy view of the image table."""
        return self._a

    def key(self):
        if self._key is None:
            self._key = self._a.tobytes()
        return self._key

    def __call__(self, point):
        return int(self._a[point])

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.degree == other.degree and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.degree <= 32:
            return f"Permutation({self.cycle_string()}, degree={self.degree})"
        return f"<Permutation degree={self.degree} order={self.order()}>"

    def __mul__(self, other):
        return compose(self, other)

    def __invert__(self):
        return self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = _arange(self.degree)
        base = self._a
        while k:
            if k & 1:
                result = base[result]
            base = base[base]
            k >>= 1
        return Permutation._wrap(result.copy() if not result.flags.owndata else result)

    # algebra --------------------------------------------------------------

    def inverse(self):
        return Permutation._wrap(_inverse_array(self._a))

    def is_identity(self):
        return bool(np.array_equal(self._a, _arange(self.degree)))

    def conjugate(self, g):
        """``g^-1 * self * g``."""
        return compose(compose(g.inverse(), self), g)

    def commutator(self, other):
        """``[self, other] = self^-1 other^-1 self other``."""
        return self.inverse() * other.inverse() * self * other

    def cycles(self, include_fixed=False):
        a = self._a
        seen = np.zeros(self.degree, dtype=bool)
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            x = int(a[start])
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = int(a[x])
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def cycle_string(self):
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cycs)

    def order(self):
        return perm_order(self)

    def moved_points(self):
        return [int(x) for x in np.flatnonzero(self._a != _arange(self.degree))]

    def to_json(self):
        return {"degree": self.degree, "images": list(self.images)}


def compose(p, q):
    """Apply ``p`` first, then ``q``."""
    if p.degree != q.degree:
        raise DegreeMismatchError(p.degree, q.degree)
    return Permutation._wrap(q._a[p._a])


def perm_order(p):
    lengths = {len(c) for c in p.cycles()}
    return math.lcm(*lengths) if lengths else 1


def commutator(x, y):
    return x.commutator(y)


def conjugate(x, g):
    return x.conjugate(g)


# ---------------------------------------------------------------------------
# stabilizer chain


class _Level:
    __slots__ = ("point", "gens", "gens_inv", "orbit", "uinv", "cursor")

    def __init__(self, point, degree):
        self.point = point
        self.gens = []
        self.gens_inv = []
        self.orbit = [point]
        self.uinv = {point: _arange(degree)}
        self.cursor = []

    def copy(self):
        new = _Level.__new__(_Level)
        new.point = self.point
        new.gens = list(self.gens)
        new.gens_inv = list(self.gens_inv)
        new.orbit = list(self.orbit)
        new.uinv = dict(self.uinv)
        new.cursor = list(self.cursor)
        return new


class _StabChain:
    """Incremental deterministic Schreier-Sims.

    Each level stores its strong generators, the fundamental orbit in
    discovery order and, per orbit point, the inverse transversal element.
    Transversal entries are never replaced once assigned, so a Schreier
    generator that sifted to the identity stays verified as the chain grows;
    per-generator cursors record how far each level has been checked.
    """

    def __init__(self, degree, cap=DEFAULT_CHAIN_CAP):
        self.degree = degree
        self.cap = cap
        self.levels: list[_Level] = []
        self._stored = 0

    def copy(self):
        new = _StabChain(self.degree, self.cap)
        new.levels = [lvl.copy() for lvl in self.levels]
        new._stored = self._stored
        return new

    @property
    def base(self):
        return [lvl.point for lvl in self.levels]

    def order(self):
        return math.prod(len(lvl.orbit) for lvl in self.levels)

    def _is_id(self, a):
        return np.array_equal(a, _arange(self.degree))

    def _first_moved(self, a):
        return int(np.flatnonzero(a != _arange(self.degree))[0])

    def sift(self, a, start=0):
        for idx in range(start, len(self.levels)):
            lvl = self.levels[idx]
            u = lvl.uinv.get(int(a[lvl.point]))
            if u is None:
                return a, idx
            a = u[a]
        return a, len(self.levels)

    def contains(self, a):
        h, j = self.sift(a)
        return j == len(self.levels) and self._is_id(h)

    def _new_level(self, point):
        self.levels.append(_Level(point, self.degree))
        self._charge(1)

    def _charge(self, npoints):
        self._stored += npoints * self.degree
        if self._stored > self.cap:
            raise CapExceededError(
                f"stabilizer chain storage exceeds cap of {self.cap} entries",
                cap=self.cap,
                stored=self._stored,
            )

    def _add_gen(self, idx, g):
        lvl = self.levels[idx]
        ginv = _inverse_array(g)
        lvl.gens.append(g)
        lvl.gens_inv.append(ginv)
        lvl.cursor.append(0)
        uinv = lvl.uinv
        queue = deque()
        for beta in list(lvl.orbit):
            gamma = int(g[beta])
            if gamma not in uinv:
                self._charge(1)
                uinv[gamma] = uinv[beta][ginv]
                lvl.orbit.append(gamma)
                queue.append(gamma)
        while queue:
            beta = queue.popleft()
            for s, sinv in zip(lvl.gens, lvl.gens_inv):
                gamma = int(s[beta])
                if gamma not in uinv:
                    self._charge(1)
                    uinv[gamma] = uinv[beta][sinv]
                    lvl.orbit.append(gamma)
                    queue.append(gamma)

    def _insert(self, g, start):
        """Place ``g`` (fixing the base points before ``start``) into the chain."""
        idx = start
        while idx < len(self.levels) and int(g[self.levels[idx].point]) == self.levels[idx].point:
            idx += 1
        if idx == len(self.levels):
            self._new_level(self._first_moved(g))
        for lvl in range(start, idx + 1):
            self._add_gen(lvl, g)

    def extend(self, gens):
        for g in gens:
            if self._is_id(g) or self.contains(g):
                continue
            self._insert(g, 0)
        self._complete()

    def _complete(self):
        i = len(self.levels) - 1
        while i >= 0:
            j = self._process_level(i)
            i = i - 1 if j is None else j

    def _process_level(self, i):
        lvl = self.levels[i]
        identity = _arange(self.degree)
        for s_idx in range(len(lvl.gens)):
            s = lvl.gens[s_idx]
            k = lvl.cursor[s_idx]
            while k < len(lvl.orbit):
                beta = lvl.orbit[k]
                gamma = int(s[beta])
                u_beta = _inverse_array(lvl.uinv[beta])
                h = lvl.uinv[gamma][s[u_beta]]
                if not np.array_equal(h, identity):
                    y, j = self.sift(h, i + 1)
                    if j < len(self.levels) or not np.array_equal(y, identity):
                        y = np.array(y)
                        y.setflags(write=False)
                        self._insert(y, i + 1)
                        lvl.cursor[s_idx] = k
                        return len(self.levels) - 1
                k += 1
                lvl.cursor[s_idx] = k
        return None


class PermGroup:
    """A permutation group given by generators, with a lazy stabilizer chain."""

    def __init__(self, generators: Iterable[Permutation], degree=None, chain_cap=DEFAULT_CHAIN_CAP):
        gens = tuple(generators)
        if not gens:
            if degree is None:
                raise ValueError("an empty generator list needs an explicit degree")
            gens = (Permutation.identity(degree),)
        if degree is None:
            degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise DegreeMismatchError(degree, g.degree)
        self.degree = degree
        self.generators = gens
        self.chain_cap = chain_cap
        self._chain = None
        self._lock = threading.Lock()

    def __repr__(self):
        return f"<PermGroup degree={self.degree} ngens={len(self.generators)}>"

    @classmethod
    def _from_chain(cls, gens, chain):
        g = cls(gens, chain.degree, chain.cap)
        g._chain = chain
        return g

    def chain(self):
        if self._chain is None:
            with self._lock:
                if self._chain is None:
                    chain = _StabChain(self.degree, self.chain_cap)
                    chain.extend([g.array for g in self.generators])
                    self._chain = chain
        return self._chain

    def order(self):
        return self.chain().order()

    @property
    def base(self):
        return self.chain().base

    def contains(self, p):
        if p.degree != self.degree:
            return False
        return self.chain().contains(p.array)

    __contains__ = contains

    def orbit(self, point):
        if not 0 <= point < self.degree:
            raise ValueError(f"point {point} outside 0..{self.degree - 1}")
        arrays = [g.array for g in self.generators]
        seen = {point}
        queue = [point]
        for x in queue:
            for a in arrays:
                y = int(a[x])
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return queue

    def with_generators(self, extra):
        """Group generated by ours plus ``extra``; reuses the existing chain."""
        extra = list(extra)
        chain = self.chain().copy()
        chain.extend([g.array for g in extra])
        return PermGroup._from_chain(self.generators + tuple(extra), chain)

    def is_trivial(self):
        return all(g.is_identity() for g in self.generators)


def group_order(g):
    return g.order()


def is_transitive(g):
    return len(g.orbit(0)) == g.degree


def stabilizer_order(g, point):
    if not 0 <= point < g.degree:
        raise ValueError(f"point {point} outside 0..{g.degree - 1}")
    return g.order() // len(g.orbit(point))


def subgroup_elements(gens: Sequence[Permutation], cap=DEFAULT_ELEMENT_CAP):
    """All elements of ``<gens>`` by breadth-first closure."""
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    degree = gens[0].degree
    for g in gens:
        if g.degree != degree:
            raise DegreeMismatchError(degree, g.degree)
    ident = Permutation.identity(degree)
    found = {ident.key(): ident}
    queue = deque([ident])
    while queue:
        e = queue.popleft()
        for g in gens:
            h = e * g
            k = h.key()
            if k not in found:
                if len(found) >= cap:
                    raise CapExceededError(
                        f"subgroup has more than {cap} elements", cap=cap
                    )
                found[k] = h
                queue.append(h)
    return set(found.values())


def _normal_closure(g, seeds):
    gens = []
    seen = set()
    for s in seeds:
        if not s.is_identity() and s.key() not in seen:
            seen.add(s.key())
            gens.append(s)
    if not gens:
        return PermGroup([], degree=g.degree)
    closure = PermGroup(gens, chain_cap=g.chain_cap)
    frontier = list(gens)
    while frontier:
        new = []
        for n in frontier:
            for s in g.generators:
                c = n.conjugate(s)
                if c.key() in seen or closure.contains(c):
                    continue
                seen.add(c.key())
                new.append(c)
        if new:
            closure = closure.with_generators(new)
        frontier = new
    return closure


def normal_closure(g, seed):
    for s in seed:
        if not g.contains(s):
            raise MembershipError("seed element is not in the group")
    return _normal_closure(g, seed)


def derived_subgroup(g):
    gens = g.generators
    comms = [gens[i].commutator(gens[j]) for i in range(len(gens)) for j in range(i + 1, len(gens))]
    return _normal_closure(g, comms)


def is_normal(g, n):
    return all(n.contains(x.conjugate(s)) for x in n.generators for s in g.generators)


def core_of_cyclic(g, x):
    """``Core_g(<x>)``: shrink ``<x>`` by intersecting with its conjugates."""
    if not g.contains(x):
        raise MembershipError("element is not in the group")
    powers = [Permutation.identity(x.degree)]
    p = x
    while not p.is_identity():
        powers.append(p)
        p = p * x
    core = {q.key(): q for q in powers}
    while True:
        shrunk = dict(core)
        for s in g.generators:
            conj = {q.conjugate(s).key() for q in core.values()}
            shrunk = {k: q for k, q in shrunk.items() if k in conj}
        if len(shrunk) == len(core):
            break
        core = shrunk
    # a subgroup of a cyclic group is cyclic: pick the element of largest order
    gen = max(core.values(), key=lambda q: (q.order(), q.key()))
    return PermGroup([gen])


def quotient_action(g, n, cap=DEFAULT_ELEMENT_CAP):
    """Action of ``g`` on the right cosets of the normal subgroup ``n``.

    Cosets are keyed by the images of ``g``'s base points, minimised over
    the elements of ``n``; base images determine an element of ``g``.
    """
    if n.degree != g.degree:
        raise DegreeMismatchError(g.degree, n.degree)
    for x in n.generators:
        if not g.contains(x):
            raise MembershipError("normal subgroup generator is not in the group")
    if not is_normal(g, n):
        raise NotNormalError("subgroup is not normal")
    base = np.asarray(g.base or [0], dtype=np.int64)
    seeds = n.generators or [Permutation.identity(g.degree)]
    nelems = np.stack([e.array for e in subgroup_elements(seeds, cap)])
    nbase = nelems[:, base]

    def coset_key(rep):
        rows = rep.array[nbase]
        return min(r.tobytes() for r in rows)

    ident = Permutation.identity(g.degree)
    index = {coset_key(ident): 0}
    queue = deque([(0, ident)])
    table = []
    while queue:
        idx, rep = queue.popleft()
        row = []
        for s in g.generators:
            nxt = rep * s
            k = coset_key(nxt)
            j = index.get(k)
            if j is None:
                j = len(index)
                index[k] = j
                queue.append((j, nxt))
            row.append(j)
        table.append(row)
    # BFS discovers cosets in index order, so table rows line up with ids
    m = len(index)
    images = []
    for col in range(len(g.generators)):
        images.append(Permutation([table[r][col] for r in range(m)]))
    return PermGroup(images, degree=m, chain_cap=g.chain_cap)


__all__ = [
    "Permutation",
    "PermGroup",
    "PolyforgeError",
    "compose",
    "perm_order",
    "commutator",
    "conjugate",
    "group_order",
    "is_transitive",
    "stabilizer_order",
    "subgroup_elements",
    "derived_subgroup",
    "normal_closure",
    "is_normal",
    "core_of_cyclic",
    "quotient_action",
]
