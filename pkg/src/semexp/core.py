"""Finite inverse semigroups as dense Cayley tables.

Elements are dense 0-based ids; ``names`` are cosmetic labels used by
parsers, serializers and reports.  Validation is exhaustive and happens
once at construction: associativity, existence and uniqueness of
generalized inverses, and commuting idempotents.  Instances are frozen
after construction and safe to share.

Subsets of elements are plain ``int`` bitmasks throughout the package
(bit ``i`` set means element ``i`` is a member).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    IdempotentsDontCommute,
    InternalInconsistency,
    NotAssociative,
    NotIdempotent,
    NotInverse,
    ParseError,
    TooLarge,
)

DEFAULT_VALIDATION_CAP = 64

# characters that would break the document formats or the word syntax
_BANNED_NAME_CHARS = set("[]*#")


def bit_ids(mask: int) -> list[int]:
    """Element ids in an elem-set bitmask, ascending."""
    ids = []
    while mask:
        low = mask & -mask
        ids.append(low.bit_length() - 1)
        mask ^= low
    return ids


def mask_of(ids) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class InverseSemigroup:
    """Validated finite inverse semigroup.

    table[a][b] is the id of a*b; inv[s] is the unique generalized
    inverse of s.  Construct through :func:`from_table` or
    :func:`load_cayley`, never directly.
    """

    table: tuple[tuple[int, ...], ...]
    inv: tuple[int, ...]
    names: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def star(self, a: int) -> int:
        return self.inv[a]

    def name(self, a: int) -> str:
        return self.names[a]

    @cached_property
    def np_table(self) -> np.ndarray:
        arr = np.array(self.table, dtype=np.int32)
        arr.setflags(write=False)
        return arr

    @cached_property
    def idempotent_mask(self) -> int:
        return mask_of(e for e in range(self.n) if self.table[e][e] == e)

    @cached_property
    def name_to_id(self) -> dict[str, int]:
        return {nm: i for i, nm in enumerate(self.names)}

    def is_idempotent(self, a: int) -> bool:
        return self.table[a][a] == a

    def format_set(self, mask: int) -> str:
        return "{" + ",".join(self.names[i] for i in bit_ids(mask)) + "}"

    @cached_property
    def upsets(self) -> tuple[int, ...]:
        """upsets[s] = bitmask of every t with s <= t in the natural order."""
        return tuple(
            mask_of(t for t in range(self.n) if natural_leq(self, s, t))
            for s in range(self.n)
        )


def _assoc_full(t: np.ndarray, names) -> None:
    """Exhaustive associativity check, row by row to bound memory."""
    n = t.shape[0]
    for a in range(n):
        left = t[t[a], :]      # (a*b)*c
        right = t[a][t]        # a*(b*c)
        if not np.array_equal(left, right):
            b, c = map(int, np.argwhere(left != right)[0])
            raise NotAssociative(
                f"({names[a]}*{names[b]})*{names[c]} != "
                f"{names[a]}*({names[b]}*{names[c]})"
            )


def _assoc_light(t: np.ndarray, gens, names) -> None:
    """Light's associativity test over a verified generating set.

    Valid whenever every element is a product of generators under the
    table being tested, which is checked first; middle-position
    associativity over generators then implies the general law.
    """
    n = t.shape[0]
    known = np.zeros(n, dtype=bool)
    known[list(gens)] = True
    while True:
        idx = np.nonzero(known)[0]
        new = np.unique(t[np.ix_(idx, idx)])
        grown = known.copy()
        grown[new] = True
        if np.array_equal(grown, known):
            break
        known = grown
    if not known.all():
        missing = int(np.nonzero(~known)[0][0])
        raise NotAssociative(
            f"element {names[missing]} is not generated; cannot certify associativity"
        )
    tt = np.ascontiguousarray(t.T)
    for g in gens:
        lhs = t[t[:, g], :]        # (x*g)*y
        rhs = tt[t[g], :]          # rhs[y, x] = x*(g*y)
        if not np.array_equal(lhs, rhs.T):
            x, y = map(int, np.argwhere(lhs != rhs.T)[0])
            raise NotAssociative(
                f"({names[x]}*{names[g]})*{names[y]} != "
                f"{names[x]}*({names[g]}*{names[y]})"
            )


def _validate_table(rows, names: tuple[str, ...], generators=None) -> tuple[int, ...]:
    """Check the three inverse-semigroup invariants; return the inverse table."""
    n = len(rows)
    t = np.array(rows, dtype=np.int32)

    if generators is None:
        _assoc_full(t, names)
    else:
        _assoc_light(t, generators, names)

    # unique generalized inverse: sxs = s and xsx = x
    ar = np.arange(n)
    sxs = t[t, ar[:, None]]            # sxs[s, x] = (s*x)*s
    xsx = t[t.T, ar[None, :]]          # xsx[s, x] = (x*s)*x
    cand = (sxs == ar[:, None]) & (xsx == ar[None, :])
    counts = cand.sum(axis=1)
    bad = np.nonzero(counts != 1)[0]
    if bad.size:
        s = int(bad[0])
        xs = [names[int(x)] for x in np.nonzero(cand[s])[0]]
        raise NotInverse(
            f"element {names[s]} has {int(counts[s])} generalized inverses: "
            f"[{', '.join(xs)}]"
        )
    inv = tuple(int(x) for x in cand.argmax(axis=1))

    # commuting idempotents (implied by uniqueness above; kept as a self-check)
    idem = [e for e in range(n) if rows[e][e] == e]
    for e, f in itertools.combinations(idem, 2):
        if rows[e][f] != rows[f][e]:
            raise IdempotentsDontCommute(f"{names[e]}*{names[f]} != {names[f]}*{names[e]}")

    return inv


def from_table(
    rows, names=None, *, cap: int = DEFAULT_VALIDATION_CAP, generators=None
) -> InverseSemigroup:
    """Validate a raw Cayley table and freeze it.

    ``cap`` bounds the O(n^3) exhaustive validation; callers that build
    large tables on purpose (expansions) pass a suitable cap and may
    supply a generating set to validate associativity by Light's test.
    """
    rows = [list(map(int, row)) for row in rows]
    n = len(rows)
    if n == 0:
        raise ParseError("empty table")
    if cap is not None and n > cap:
        raise TooLarge(f"table has {n} elements, validation cap is {cap}")
    for a, row in enumerate(rows):
        if len(row) != n:
            raise ParseError(f"row {a} has {len(row)} entries, expected {n}")
        for b, v in enumerate(row):
            if not 0 <= v < n:
                raise ParseError(f"entry ({a},{b}) = {v} out of range")
    if names is None:
        names = tuple(str(i) for i in range(n))
    else:
        names = tuple(names)
        if len(names) != n:
            raise ParseError(f"{len(names)} names for {n} elements")
        if len(set(names)) != n:
            raise ParseError("duplicate element names")
        for nm in names:
            if not nm or any(ch.isspace() or ch in _BANNED_NAME_CHARS for ch in nm):
                raise ParseError(f"bad element name {nm!r}")
    # canonicalize int objects so large tables share them
    pool = tuple(range(n))
    table = tuple(tuple(pool[v] for v in row) for row in rows)
    inv = _validate_table(rows, names, generators)
    return InverseSemigroup(table=table, inv=inv, names=names)


# -- Cayley-table documents ------------------------------------------------
#
# line 1: n
# lines 2..n+1: n space-separated 0-based ids (row a, column b gives a*b)
# optional final line: "names: x0 x1 ..."
# '#' starts a comment; blank lines ignored.


def load_cayley(text: str, *, cap: int = DEFAULT_VALIDATION_CAP) -> InverseSemigroup:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ParseError("empty document")
    try:
        n = int(lines[0])
    except ValueError:
        raise ParseError(f"first line must be the element count, got {lines[0]!r}")
    if n <= 0:
        raise ParseError(f"element count must be positive, got {n}")
    if len(lines) < n + 1:
        raise ParseError(f"expected {n} table rows, found {len(lines) - 1}")
    rows = []
    for a in range(1, n + 1):
        parts = lines[a].split()
        try:
            rows.append([int(p) for p in parts])
        except ValueError:
            raise ParseError(f"non-integer entry in row {a - 1}: {lines[a]!r}")
    names = None
    rest = lines[n + 1:]
    if rest:
        if len(rest) > 1 or not rest[0].startswith("names:"):
            raise ParseError(f"unexpected trailing content: {rest[0]!r}")
        names = rest[0][len("names:"):].split()
    return from_table(rows, names, cap=cap)


def dump_cayley(s: InverseSemigroup) -> str:
    """Serialize; exact inverse of load_cayley for canonical documents."""
    out = [str(s.n)]
    out.extend(" ".join(str(v) for v in row) for row in s.table)
    if s.names != tuple(str(i) for i in range(s.n)):
        out.append("names: " + " ".join(s.names))
    return "\n".join(out) + "\n"


# -- basic operations ------------------------------------------------------


def product(s: InverseSemigroup, a: int, b: int) -> int:
    return s.table[a][b]


def idempotents(s: InverseSemigroup) -> int:
    """Bitmask of E(S)."""
    return s.idempotent_mask


def natural_leq(s: InverseSemigroup, a: int, b: int) -> bool:
    """a <= b in the natural partial order.

    Both characterizations a = b*(a* a) and a = (a a*)*b are computed;
    disagreement means the table was never a valid inverse semigroup.
    """
    t, inv = s.table, s.inv
    first = a == t[b][t[inv[a]][a]]
    second = a == t[t[a][inv[a]]][b]
    if first != second:
        raise InternalInconsistency(
            f"order characterizations disagree for ({s.names[a]}, {s.names[b]})"
        )
    return first


def is_e_unitary(s: InverseSemigroup) -> bool:
    """True iff e*x idempotent (e idempotent) forces x idempotent."""
    emask = s.idempotent_mask
    for e in bit_ids(emask):
        row = s.table[e]
        for x in range(s.n):
            if (emask >> row[x]) & 1 and not (emask >> x) & 1:
                return False
    return True


def is_semilattice(s: InverseSemigroup) -> bool:
    return s.idempotent_mask == (1 << s.n) - 1


def is_e_set(s: InverseSemigroup, members: int, e: int) -> bool:
    """True iff ``members`` contains e and x x* = e for every member."""
    if not s.is_idempotent(e):
        raise NotIdempotent(f"{s.names[e]} is not idempotent")
    if not (members >> e) & 1:
        return False
    return all(s.table[x][s.inv[x]] == e for x in bit_ids(members))


# -- stock examples --------------------------------------------------------


def five_element_example() -> InverseSemigroup:
    """The five-element inverse semigroup {0, e, f, s, t}.

    One generator s != 0 with s^2 = 0; e = s s*, f = s* s, t = s*.
    """
    z, e, f, s, t = range(5)
    rows = [
        [z, z, z, z, z],
        [z, e, z, s, z],
        [z, z, f, z, t],
        [z, z, s, z, e],
        [z, t, z, f, z],
    ]
    return from_table(rows, names=("0", "e", "f", "s", "t"))


def symmetric_inverse_monoid(k: int) -> InverseSemigroup:
    """All partial bijections of {1..k} under composition (apply right first)."""
    if not 1 <= k <= 4:
        raise TooLarge(f"symmetric inverse monoid supported for k <= 4, got {k}")
    elems = []
    points = range(k)
    for dom_mask in range(1 << k):
        dom = [x for x in points if (dom_mask >> x) & 1]
        for image in itertools.permutations(points, len(dom)):
            m = [-1] * k
            for x, y in zip(dom, image):
                m[x] = y
            elems.append(tuple(m))
    elems.sort()
    index = {m: i for i, m in enumerate(elems)}

    def compose(a, b):  # a after b
        return tuple(a[b[x]] if b[x] >= 0 else -1 for x in points)

    rows = [[index[compose(a, b)] for b in elems] for a in elems]
    names = tuple(
        "m" + "".join(f"{x + 1}{m[x] + 1}" for x in points if m[x] >= 0)
        for m in elems
    )
    return from_table(rows, names, cap=len(elems))


def cyclic_group(m: int) -> InverseSemigroup:
    rows = [[(a + b) % m for b in range(m)] for a in range(m)]
    names = tuple(f"c{i}" for i in range(m))
    return from_table(rows, names, cap=max(DEFAULT_VALIDATION_CAP, m))


def klein_four_group() -> InverseSemigroup:
    rows = [[a ^ b for b in range(4)] for a in range(4)]
    return from_table(rows, names=("1", "a", "b", "ab"))


def restrict_to_idempotents(s: InverseSemigroup) -> InverseSemigroup:
    """E(S) as an inverse semigroup in its own right (a semilattice)."""
    idem = bit_ids(s.idempotent_mask)
    pos = {e: i for i, e in enumerate(idem)}
    rows = [[pos[s.table[a][b]] for b in idem] for a in idem]
    return from_table(rows, names=tuple(s.names[e] for e in idem), cap=len(idem))
