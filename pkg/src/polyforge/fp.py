"""Finitely presented groups: words, relator parsing and coset enumeration.

Words are tuples of ``(generator, exponent)`` letters with exponent +1 or
-1.  Free reduction happens first and inverse letters of involutions are
then rewritten as positive letters; ``g g`` is left alone, so ``r0^2`` is a
word of length two.

Coset enumeration is HLT-style (scan each relator from each live coset,
defining cosets as needed) with immediate union-find coincidence
processing.  The lowest-numbered coset survives a coincidence and the
final table is renumbered densely, so tables are canonical for fixed
input.  Involution generators get a single self-inverse column.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .errors import (
    CosetLimitError,
    DegreeMismatchError,
    IncompleteTableError,
    PresentationSyntaxError,
    UnknownGeneratorError,
)
from .perm import Permutation

DEFAULT_MAX_COSETS = 2**20
MAX_COSETS_ENV = "POLYFORGE_MAX_COSETS"


def default_max_cosets():
    raw = os.environ.get(MAX_COSETS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{MAX_COSETS_ENV} must be a positive integer, got {raw!r}") from None
        if value <= 0:
            raise ValueError(f"{MAX_COSETS_ENV} must be positive")
        return value
    return DEFAULT_MAX_COSETS


# ---------------------------------------------------------------------------
# words


def _free_reduce(letters):
    out = []
    for g, e in letters:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return out


def normalize(letters, involutions=None):
    """Free-reduce, then rewrite ``g^-1`` as ``g`` for involution generators.

    ``involutions=None`` treats every generator as an involution.
    """
    reduced = _free_reduce(letters)
    if involutions is None:
        return tuple((g, 1) for g, _ in reduced)
    return tuple((g, 1) if e == -1 and g < len(involutions) and involutions[g] else (g, e) for g, e in reduced)


@dataclass(frozen=True)
class Word:
    letters: tuple = ()

    @classmethod
    def of(cls, letters, involutions=None):
        return cls(normalize(letters, involutions))

    @classmethod
    def gens(cls, *indices):
        return cls(tuple((g, 1) for g in indices))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other):
        return Word(tuple(_free_reduce(self.letters + other.letters)))

    def inverse(self, involutions=None):
        return Word.of([(g, -e) for g, e in reversed(self.letters)], involutions)

    def power(self, k, involutions=None):
        if k < 0:
            return self.inverse(involutions).power(-k, involutions)
        return Word.of(self.letters * k, involutions)

    def max_generator(self):
        return max((g for g, _ in self.letters), default=-1)

    def evaluate(self, images: Sequence[Permutation]) -> Permutation:
        degree = images[0].degree
        inverses = {}
        acc = np.arange(degree, dtype=images[0].array.dtype)
        for g, e in self.letters:
            if e == 1:
                a = images[g].array
            else:
                a = inverses.get(g)
                if a is None:
                    a = inverses[g] = images[g].inverse().array
            acc = a[acc]
        return Permutation._wrap(acc)

    def to_text(self):
        if not self.letters:
            return "1"
        return "*".join(f"r{g}" if e == 1 else f"r{g}^-1" for g, e in self.letters)

    def __str__(self):
        return self.to_text()


# ---------------------------------------------------------------------------
# relator grammar

_TOKEN = re.compile(r"\s*(?:(r\d+)|(\d+)|([-*^()\[\],]))")


class _Parser:
    def __init__(self, text, ngens):
        self.text = text
        self.ngens = ngens
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m:
                bad = pos + len(stripped[pos:]) - len(stripped[pos:].lstrip())
                raise PresentationSyntaxError(f"unexpected character {stripped[bad]!r}", text, bad)
            start = m.start(m.lastindex)
            self.tokens.append((m.group(m.lastindex), start, m.lastindex))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, len(self.text), 0)

    def take(self, expected=None):
        tok = self.peek()
        if tok[0] is None:
            raise PresentationSyntaxError("unexpected end of input", self.text, tok[1])
        if expected is not None and tok[0] != expected:
            raise PresentationSyntaxError(f"expected {expected!r}, found {tok[0]!r}", self.text, tok[1])
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise PresentationSyntaxError("empty relator", self.text, 0)
        letters = self.expr()
        tok = self.peek()
        if tok[0] is not None:
            raise PresentationSyntaxError(f"unexpected token {tok[0]!r}", self.text, tok[1])
        return letters

    def _starts_atom(self):
        tok = self.peek()
        return tok[0] is not None and (tok[2] == 1 or tok[0] in ("(", "[") or tok[0] == "1")

    def expr(self):
        letters = self.term()
        while True:
            if self.peek()[0] == "*":
                self.take()
                letters = letters + self.term()
            elif self._starts_atom():
                letters = letters + self.term()
            else:
                return letters

    def term(self):
        letters = self.atom()
        while self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] == "-":
                self.take()
                k = self._integer()
                letters = _inv(letters) * k
            elif tok[2] == 2:
                letters = letters * self._integer()
            elif tok[2] == 1:
                g = self._generator()
                letters = [(g, -1)] + letters + [(g, 1)]
            elif tok[0] == "(":
                self.take()
                conj = self.expr()
                self.take(")")
                letters = _inv(conj) + letters + conj
            else:
                raise PresentationSyntaxError("expected exponent or conjugator after '^'", self.text, tok[1])
        return letters

    def atom(self):
        tok = self.peek()
        if tok[2] == 1:
            return [(self._generator(), 1)]
        if tok[0] == "1":
            self.take()
            return []
        if tok[0] == "(":
            self.take()
            letters = self.expr()
            self.take(")")
            return letters
        if tok[0] == "[":
            self.take()
            parts = [self.expr()]
            while self.peek()[0] == ",":
                self.take()
                parts.append(self.expr())
            self.take("]")
            if len(parts) < 2:
                raise PresentationSyntaxError("commutator needs two or more entries", self.text, tok[1])
            letters = parts[0]
            for y in parts[1:]:
                letters = _comm(letters, y)
            return letters
        if tok[0] is None:
            raise PresentationSyntaxError("unexpected end of input", self.text, tok[1])
        raise PresentationSyntaxError(f"unexpected token {tok[0]!r}", self.text, tok[1])

    def _integer(self):
        tok = self.take()
        if tok[2] != 2:
            raise PresentationSyntaxError(f"expected integer, found {tok[0]!r}", self.text, tok[1])
        return int(tok[0])

    def _generator(self):
        tok = self.take()
        g = int(tok[0][1:])
        if self.ngens is not None and g >= self.ngens:
            raise UnknownGeneratorError(f"unknown generator {tok[0]}", self.text, tok[1])
        return g


def _inv(letters):
    return [(g, -e) for g, e in reversed(letters)]


def _comm(x, y):
    return _inv(x) + _inv(y) + x + y


def parse_relator(text, ngens=None, involutions=None) -> Word:
    """Parse one relator.  Multi-entry brackets are left-normed."""
    letters = _Parser(text, ngens).parse()
    return Word.of(letters, involutions)


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Presentation:
    ngens: int
    involutions: tuple
    relators: tuple
    relator_texts: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.ngens <= 0:
            raise ValueError("a presentation needs at least one generator")
        if len(self.involutions) != self.ngens:
            raise ValueError("one involution flag per generator is required")
        for w in self.relators:
            if w.max_generator() >= self.ngens:
                raise UnknownGeneratorError(f"relator {w} uses an unknown generator", str(w), 0)
        present = {w.letters for w in self.relators}
        for g, flag in enumerate(self.involutions):
            if flag and ((g, 1), (g, 1)) not in present:
                raise ValueError(f"involution r{g} lacks the relator r{g}^2")
        if self.relator_texts and len(self.relator_texts) != len(self.relators):
            raise ValueError("relator_texts must match relators one-to-one")

    @classmethod
    def from_relators(cls, ngens, texts, involutions="all", name=""):
        """Build from relator strings, adding ``rX^2`` for involutions that lack it."""
        flags = _flags(ngens, involutions)
        texts = list(texts)
        words = [parse_relator(t, ngens, flags) for t in texts]
        have = {w.letters for w in words}
        squares = []
        for g, flag in enumerate(flags):
            if flag and ((g, 1), (g, 1)) not in have:
                squares.append(f"r{g}^2")
        texts = squares + texts
        words = [parse_relator(t, ngens, flags) for t in squares] + words
        return cls(ngens, flags, tuple(words), tuple(texts), name)

    @property
    def texts(self):
        if self.relator_texts:
            return self.relator_texts
        return tuple(w.to_text() for w in self.relators)

    def to_text(self):
        if all(self.involutions):
            inv = "all"
        elif not any(self.involutions):
            inv = "none"
        else:
            inv = ",".join(f"r{g}" for g, f in enumerate(self.involutions) if f)
        lines = []
        if self.name:
            lines.append(f"name: {self.name}")
        lines.append(f"gens: {self.ngens}")
        lines.append(f"involutions: {inv}")
        lines.extend(self.texts)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        ngens = None
        inv = "all"
        name = ""
        rels = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition(":")
            key = key.strip().lower()
            if sep and key in ("gens", "involutions", "name"):
                value = value.strip()
                if key == "gens":
                    try:
                        ngens = int(value)
                    except ValueError:
                        raise PresentationSyntaxError("gens header needs an integer", line, 0) from None
                elif key == "involutions":
                    inv = value
                else:
                    name = value
            else:
                rels.append(line)
        if ngens is None:
            raise PresentationSyntaxError("missing 'gens:' header", text, 0)
        return cls.from_relators(ngens, rels, inv, name)

    def word(self, text):
        return parse_relator(text, self.ngens, self.involutions)


def _flags(ngens, involutions):
    if isinstance(involutions, str):
        spec = involutions.strip().lower()
        if spec == "all":
            return (True,) * ngens
        if spec in ("none", ""):
            return (False,) * ngens
        chosen = set()
        for part in spec.split(","):
            part = part.strip().lstrip("r")
            if not part.isdigit() or int(part) >= ngens:
                raise PresentationSyntaxError("bad involution list", involutions, 0)
            chosen.add(int(part))
        return tuple(g in chosen for g in range(ngens))
    flags = tuple(bool(f) for f in involutions)
    if len(flags) != ngens:
        raise ValueError("one involution flag per generator is required")
    return flags


# ---------------------------------------------------------------------------
# coset enumeration kernel

_COMPLETE = 0
_ABORTED = 1

# st layout: 0 next free id, 1 live cosets, 2 total definitions,
# 3 coincidence queue length, 4 peak live cosets
@njit(cache=True)
def _rep(p, c):
    r = c
    while p[r] != r:
        r = p[r]
    while p[c] != r:
        nxt = p[c]
        p[c] = r
        c = nxt
    return r


@njit(cache=True)
def _define(table, p, st, c, x, ix):
    d = st[0]
    st[0] = d + 1
    st[1] += 1
    st[2] += 1
    if st[1] > st[4]:
        st[4] = st[1]
    p[d] = d
    table[d, :] = -1
    table[c, x] = d
    table[d, ix] = c
    return d


@njit(cache=True)
def _merge(p, q, st, a, b):
    a = _rep(p, a)
    b = _rep(p, b)
    if a == b:
        return
    if a > b:
        a, b = b, a
    p[b] = a
    q[st[3]] = b
    st[3] += 1
    st[1] -= 1


@njit(cache=True)
def _coincidence(table, p, q, st, inv, a, b):
    ncols = table.shape[1]
    st[3] = 0
    _merge(p, q, st, a, b)
    i = 0
    while i < st[3]:
        e = q[i]
        i += 1
        for x in range(ncols):
            f = table[e, x]
            if f >= 0:
                ix = inv[x]
                if table[f, ix] == e:
                    table[f, ix] = -1
                e1 = _rep(p, e)
                f1 = _rep(p, f)
                if table[e1, x] >= 0:
                    _merge(p, q, st, f1, table[e1, x])
                elif table[f1, ix] >= 0:
                    _merge(p, q, st, e1, table[f1, ix])
                else:
                    table[e1, x] = f1
                    table[f1, ix] = e1


@njit(cache=True)
def _scan_and_fill(table, p, q, st, inv, c, w, lo, hi):
    f = c
    b = c
    i = lo
    j = hi - 1
    while True:
        while i <= j and table[f, w[i]] >= 0:
            f = table[f, w[i]]
            i += 1
        if i > j:
            if f != b:
                _coincidence(table, p, q, st, inv, f, b)
            return
        while j >= i and table[b, inv[w[j]]] >= 0:
            b = table[b, inv[w[j]]]
            j -= 1
        if j < i:
            _coincidence(table, p, q, st, inv, f, b)
            return
        if i == j:
            table[f, w[i]] = b
            table[b, inv[w[i]]] = f
            return
        _define(table, p, st, f, w[i], inv[w[i]])


@njit(cache=True)
def _compact(table, p, st, c):
    n = st[0]
    newid = np.full(n, -1, dtype=np.int64)
    k = 0
    for i in range(n):
        if p[i] == i:
            newid[i] = k
            k += 1
    ncols = table.shape[1]
    for i in range(n):
        if p[i] == i:
            ni = newid[i]
            for x in range(ncols):
                v = table[i, x]
                if v >= 0:
                    v = newid[_rep(p, v)]
                table[ni, x] = v
    for i in range(k):
        p[i] = i
    st[0] = k
    if c >= 0:
        return newid[c]
    return -1


@njit(cache=True)
def _room(table, p, st, c, need, limit):
    """Ensure ``need`` free rows; compacts or reports failure (-2)."""
    cap = table.shape[0]
    if st[0] + need <= cap:
        return c
    if st[1] == st[0]:
        return -2
    c = _compact(table, p, st, c)
    if st[0] + need > cap or st[1] > limit:
        return -2
    return c


@njit(cache=True)
def _enumerate(table, p, q, st, inv, rels, rel_off, subs, sub_off, limit):
    ncols = table.shape[1]
    st[0] = 1
    st[1] = 1
    st[2] = 0
    st[4] = 1
    p[0] = 0
    table[0, :] = -1
    nsubs = sub_off.shape[0] - 1
    nrels = rel_off.shape[0] - 1
    for k in range(nsubs):
        lo = sub_off[k]
        hi = sub_off[k + 1]
        if _room(table, p, st, 0, hi - lo, limit) == -2:
            return _ABORTED
        _scan_and_fill(table, p, q, st, inv, 0, subs, lo, hi)
    c = 0
    while c < st[0]:
        if p[c] == c:
            for k in range(nrels):
                if p[c] != c:
                    break
                lo = rel_off[k]
                hi = rel_off[k + 1]
                c = _room(table, p, st, c, hi - lo, limit)
                if c == -2:
                    return _ABORTED
                _scan_and_fill(table, p, q, st, inv, c, rels, lo, hi)
            if p[c] == c:
                for x in range(ncols):
                    if table[c, x] < 0:
                        c = _room(table, p, st, c, 1, limit)
                        if c == -2:
                            return _ABORTED
                        _define(table, p, st, c, x, inv[x])
            if st[1] > limit:
                return _ABORTED
        c += 1
    _compact(table, p, st, -1)
    return _COMPLETE


# ---------------------------------------------------------------------------
# coset tables


@dataclass(frozen=True)
class CosetTable:
    """Result of an enumeration.

    ``columns[g]`` is the column holding the action of generator ``g``;
    ``inverse_columns[g]`` holds ``g^-1`` (the same column for involutions).
    """

    presentation: Presentation
    subgroup: tuple
    status: str
    table: np.ndarray | None
    columns: tuple
    inverse_columns: tuple
    diagnostics: dict = field(default_factory=dict)

    @property
    def nrows(self):
        return 0 if self.table is None else int(self.table.shape[0])

    @property
    def index(self):
        return self.nrows

    @property
    def complete(self):
        return self.status == "complete"

    def action(self, coset, gen, exponent=1):
        col = self.columns[gen] if exponent == 1 else self.inverse_columns[gen]
        return int(self.table[coset, col])


def _columns(presentation):
    cols, icols = [], []
    k = 0
    for flag in presentation.involutions:
        if flag:
            cols.append(k)
            icols.append(k)
            k += 1
        else:
            cols.append(k)
            icols.append(k + 1)
            k += 2
    inv = np.empty(k, dtype=np.int64)
    for a, b in zip(cols, icols):
        inv[a] = b
        inv[b] = a
    return tuple(cols), tuple(icols), inv


def _encode(words, cols, icols):
    flat = []
    offsets = [0]
    for w in words:
        flat.extend(cols[g] if e == 1 else icols[g] for g, e in w.letters)
        offsets.append(len(flat))
    return np.asarray(flat, dtype=np.int64), np.asarray(offsets, dtype=np.int64)


def _is_implied(w, presentation):
    """Squares of involutions hold automatically in a self-inverse column."""
    return len(w) == 2 and w.letters[0] == w.letters[1] and presentation.involutions[w.letters[0][0]]


def todd_coxeter(presentation: Presentation, subgroup=(), max_cosets=None) -> CosetTable:
    """Enumerate the cosets of ``<subgroup>``; returns an aborted table past the cap."""
    if max_cosets is None:
        max_cosets = default_max_cosets()
    if max_cosets <= 0:
        raise ValueError("max_cosets must be positive")
    subgroup = tuple(subgroup)
    for w in subgroup:
        if w.max_generator() >= presentation.ngens:
            raise UnknownGeneratorError(f"subgroup word {w} uses an unknown generator", str(w), 0)
    cols, icols, inv = _columns(presentation)
    relators = [w for w in presentation.relators if len(w) and not _is_implied(w, presentation)]
    rels, rel_off = _encode(relators, cols, icols)
    subs, sub_off = _encode([w for w in subgroup if len(w)], cols, icols)
    longest = int(max(np.diff(rel_off).max(initial=0), np.diff(sub_off).max(initial=0)))
    capacity = max_cosets + longest + len(inv) + 1
    table = np.empty((capacity, len(inv)), dtype=np.int32)
    p = np.empty(capacity, dtype=np.int64)
    q = np.empty(capacity, dtype=np.int64)
    st = np.zeros(5, dtype=np.int64)
    status = _enumerate(table, p, q, st, inv, rels, rel_off, subs, sub_off, max_cosets)
    diagnostics = {
        "live_cosets": int(st[1]),
        "definitions": int(st[2]),
        "peak_live": int(st[4]),
        "max_cosets": int(max_cosets),
    }
    if status == _ABORTED:
        return CosetTable(presentation, subgroup, "aborted", None, cols, icols, diagnostics)
    final = table[: st[0]].copy()
    del table
    final.setflags(write=False)
    return CosetTable(presentation, subgroup, "complete", final, cols, icols, diagnostics)


def _require_complete(t):
    if t.status == "aborted":
        raise CosetLimitError(
            f"coset enumeration exceeded {t.diagnostics['max_cosets']} cosets",
            cap=t.diagnostics["max_cosets"],
            **t.diagnostics,
        )
    if t.status != "complete":
        raise IncompleteTableError(f"coset table status is {t.status}")


def fp_group_order(presentation, max_cosets=None):
    t = todd_coxeter(presentation, (), max_cosets)
    _require_complete(t)
    return t.nrows


def subgroup_index(presentation, subgroup, max_cosets=None):
    t = todd_coxeter(presentation, subgroup, max_cosets)
    _require_complete(t)
    return t.nrows


def element_order(presentation, w, known_group_order=None, max_cosets=None):
    """Order of ``w`` as ``|G| / [G : <w>]``."""
    if not len(w):
        return 1
    if known_group_order is None:
        known_group_order = fp_group_order(presentation, max_cosets)
    return known_group_order // subgroup_index(presentation, [w], max_cosets)


def coset_perm_rep(t: CosetTable):
    """Permutations of the cosets induced by each generator."""
    if t.status != "complete":
        raise IncompleteTableError(f"coset table status is {t.status}")
    images = [Permutation(t.table[:, col].astype(np.int64)) for col in t.columns]
    if not verify_images(t.presentation, images):
        raise IncompleteTableError("coset table does not satisfy the relators")
    return images


def verify_images(presentation, images):
    """True iff every relator evaluates to the identity on ``images``."""
    images = list(images)
    if len(images) != presentation.ngens:
        raise ValueError(f"expected {presentation.ngens} images, got {len(images)}")
    degree = images[0].degree
    for im in images:
        if im.degree != degree:
            raise DegreeMismatchError(degree, im.degree)
    return all(w.evaluate(images).is_identity() for w in presentation.relators)
