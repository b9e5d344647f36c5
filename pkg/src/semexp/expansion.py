"""The prefix expansion of a finite inverse semigroup.

An element is a pair (support, anchor): ``anchor`` is a semigroup
element t, ``support`` is a bitmask of elements that all share the
source idempotent t t* and that contains both t and t t*.  Pairs in
this shape are the unique normal forms, so structural equality is
semantic equality.

Two independent product routes are provided: the closed pair formula
and a merge-then-renormalize route; they must always agree and the
test suite holds them against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import core
from .core import InverseSemigroup, bit_ids, mask_of
from .errors import (
    LiftNotHomomorphism,
    NotNormalForm,
    NotPartialHom,
    PropertyViolation,
    TooLarge,
)
from .report import Report

DEFAULT_EXPANSION_CAP = 10**6


@dataclass(frozen=True)
class ExpElem:
    """Normal-form pair: ``support`` bitmask and ``anchor`` element id."""

    support: int
    anchor: int

    def render(self, s: InverseSemigroup) -> str:
        members = ",".join(s.names[i] for i in bit_ids(self.support))
        return f"eps{{{members}}}[{s.names[self.anchor]}]"


def is_normal_form(s: InverseSemigroup, x: ExpElem) -> bool:
    t = x.anchor
    if not 0 <= t < s.n or not (x.support >> t) & 1:
        return False
    e = s.table[t][s.inv[t]]
    if not (x.support >> e) & 1:
        return False
    return all(s.table[a][s.inv[a]] == e for a in bit_ids(x.support))


def _require_normal(s: InverseSemigroup, x: ExpElem) -> None:
    if not is_normal_form(s, x):
        raise NotNormalForm(f"{x.render(s)} is not in normal form")


def canonical_gen(s: InverseSemigroup, g: int) -> ExpElem:
    """Image of g under the canonical map: ({g g*, g}, g)."""
    e = s.table[g][s.inv[g]]
    return ExpElem((1 << e) | (1 << g), g)


def degree(x: ExpElem) -> int:
    """The underlying semigroup element of a normal-form pair."""
    return x.anchor


def exp_product(s: InverseSemigroup, x: ExpElem, y: ExpElem) -> ExpElem:
    """Closed-form product (t u u* t* A | t B, t u) of (A,t)(B,u)."""
    _require_normal(s, x)
    _require_normal(s, y)
    return _product_raw(s.table, s.inv, x, y)


def _product_raw(table, inv, x: ExpElem, y: ExpElem) -> ExpElem:
    t, u = x.anchor, y.anchor
    q = table[table[table[t][u]][inv[u]]][inv[t]]
    row_q, row_t = table[q], table[t]
    m = 0
    a = x.support
    while a:
        low = a & -a
        m |= 1 << row_q[low.bit_length() - 1]
        a ^= low
    b = y.support
    while b:
        low = b & -b
        m |= 1 << row_t[low.bit_length() - 1]
        b ^= low
    return ExpElem(m, row_t[u])


def normalize_pair(s: InverseSemigroup, members: int, anchor: int) -> ExpElem:
    """Normal form of an arbitrary product eps_{members}[anchor].

    Multiplies everything by the joint source idempotent
    p = (prod of a a* over members) * (anchor anchor*), then adjoins the
    rescaled anchor and its source idempotent.
    """
    table, inv = s.table, s.inv
    p = table[anchor][inv[anchor]]
    for a in bit_ids(members):
        p = table[p][table[a][inv[a]]]
    row = table[p]
    m = (1 << p) | (1 << row[anchor])
    for a in bit_ids(members):
        m |= 1 << row[a]
    return ExpElem(m, row[anchor])


def exp_product_renormalized(s: InverseSemigroup, x: ExpElem, y: ExpElem) -> ExpElem:
    """Independent product route: merge supports as eps_{A | tB}[tu], renormalize."""
    _require_normal(s, x)
    _require_normal(s, y)
    table = s.table
    t, u = x.anchor, y.anchor
    merged = x.support
    row_t = table[t]
    b = y.support
    while b:
        low = b & -b
        merged |= 1 << row_t[low.bit_length() - 1]
        b ^= low
    return normalize_pair(s, merged, row_t[u])


def exp_inverse(s: InverseSemigroup, x: ExpElem) -> ExpElem:
    """(A, t) -> (t* A, t*); satisfies x x' x = x and x' x x' = x'."""
    _require_normal(s, x)
    ti = s.inv[x.anchor]
    row = s.table[ti]
    m = 0
    a = x.support
    while a:
        low = a & -a
        m |= 1 << row[low.bit_length() - 1]
        a ^= low
    return ExpElem(m, ti)


def predicted_count(s: InverseSemigroup) -> tuple[int, int]:
    """(total, idempotent) element counts of the expansion, combinatorially.

    Regrouped integer form 2^(p-1) + (p-1) 2^(p-2): the class size p = 1
    occurs (a zero element) and must contribute exactly 1.
    """
    table, inv = s.table, s.inv
    total = 0
    idem = 0
    for e in bit_ids(s.idempotent_mask):
        p = sum(1 for x in range(s.n) if table[x][inv[x]] == e)
        idem += 1 << (p - 1)
        total += (1 << (p - 1)) + ((p - 1) * (1 << (p - 2)) if p >= 2 else 0)
    return total, idem


@dataclass(frozen=True)
class ExpansionTable:
    """The expansion realized as a Cayley table with decoded elements.

    ``elems[i]`` is the normal-form pair with id i; ``iota[g]`` is the id
    of the canonical generator of g.
    """

    source: InverseSemigroup
    base: InverseSemigroup
    elems: tuple[ExpElem, ...]
    iota: tuple[int, ...]

    @cached_property
    def index(self) -> dict[ExpElem, int]:
        return {x: i for i, x in enumerate(self.elems)}


def _element_name(s: InverseSemigroup, x: ExpElem) -> str:
    members = ",".join(s.names[i] for i in bit_ids(x.support))
    t = x.anchor
    if s.is_idempotent(t):
        return f"eps{{{members}}}"
    e = s.table[t][s.inv[t]]
    if x.support == (1 << t) | (1 << e):
        return f"br{{{s.names[t]}}}"
    return f"eps{{{members}}}br{{{s.names[t]}}}"


@lru_cache(maxsize=8)
def _build(s: InverseSemigroup) -> ExpansionTable:
    table, inv = s.table, s.inv
    n = s.n

    elems: list[ExpElem] = []
    for e in bit_ids(s.idempotent_mask):
        cls = [x for x in range(n) if table[x][inv[x]] == e]
        others = [x for x in cls if x != e]
        for pick in range(1 << len(others)):
            m = 1 << e
            for i, x in enumerate(others):
                if (pick >> i) & 1:
                    m |= 1 << x
            for t in cls:
                if (m >> t) & 1:
                    elems.append(ExpElem(m, t))

    total, _ = predicted_count(s)
    if len(elems) != len(set(elems)) or len(elems) != total:
        raise PropertyViolation(
            f"enumerated {len(elems)} elements, predicted {total}"
        )

    index = {(x.support, x.anchor): i for i, x in enumerate(elems)}
    shl = [1 << i for i in range(n)]
    members = [bit_ids(x.support) for x in elems]
    anchors = [x.anchor for x in elems]
    rows = []
    for i in range(len(elems)):
        t, mem_x = anchors[i], members[i]
        row_t = table[t]
        ti = inv[t]
        out = []
        for j in range(len(elems)):
            u = anchors[j]
            q = table[table[row_t[u]][inv[u]]][ti]
            row_q = table[q]
            m = 0
            for a in mem_x:
                m |= shl[row_q[a]]
            for b in members[j]:
                m |= shl[row_t[b]]
            out.append(index[(m, row_t[u])])
        rows.append(out)

    names = tuple(_element_name(s, x) for x in elems)
    iota = tuple(index[(canonical_gen(s, g).support, g)] for g in range(n))
    base = core.from_table(rows, names, cap=len(elems), generators=iota)
    return ExpansionTable(source=s, base=base, elems=tuple(elems), iota=iota)


def build_expansion(s: InverseSemigroup, cap: int = DEFAULT_EXPANSION_CAP) -> ExpansionTable:
    """Enumerate all normal-form pairs and realize the expansion as a table.

    Enumeration order is deterministic: source idempotents ascending,
    support sets in binary counter order, anchors ascending.  The result
    is validated as an inverse semigroup.
    """
    total, _ = predicted_count(s)
    if total > cap:
        raise TooLarge(f"expansion has {total} elements, cap is {cap}")
    return _build(s)


def sidecar_doc(t: ExpansionTable) -> str:
    """id -> (support, anchor) listing accompanying a serialized expansion."""
    s = t.source
    lines = []
    for i, x in enumerate(t.elems):
        members = ",".join(s.names[j] for j in bit_ids(x.support))
        lines.append(f"{i}: ({{{members}}}, {s.names[x.anchor]})")
    return "\n".join(lines) + "\n"


def lift_partial_hom(
    s: InverseSemigroup,
    h: InverseSemigroup,
    pi,
    cap: int = DEFAULT_EXPANSION_CAP,
) -> tuple[dict[ExpElem, int], Report]:
    """Unique homomorphism of the expansion into h extending the partial hom pi.

    Value on (A, t) is prod over a in A of pi(a) pi(a*), times pi(t).
    Verified to be multiplicative and to restrict to pi on generators.
    """
    from .actions import is_partial_homomorphism

    pi = tuple(pi)
    pre = is_partial_homomorphism(s, h, pi)
    if not pre.ok:
        raise NotPartialHom("\n".join(pre.failures))

    exp = build_expansion(s, cap)
    ht, hinv = h.table, h.inv
    values = []
    for x in exp.elems:
        acc = None
        for a in bit_ids(x.support):
            v = ht[pi[a]][pi[s.inv[a]]]
            acc = v if acc is None else ht[acc][v]
        val = ht[acc][pi[x.anchor]]
        values.append(val)

    report = Report("lift-partial-hom")
    hom = np.array(values, dtype=np.int64)
    prod_in_h = h.np_table[hom[:, None], hom[None, :]]
    hom_of_prod = hom[exp.base.np_table]
    ok = np.array_equal(prod_in_h, hom_of_prod)
    if not ok:
        i, j = map(int, np.argwhere(prod_in_h != hom_of_prod)[0])
        raise LiftNotHomomorphism(
            f"lift({exp.elems[i].render(s)} * {exp.elems[j].render(s)}) "
            "differs from the product of lifts"
        )
    report.check(True, "lift-multiplicative")
    extends = all(values[exp.iota[g]] == pi[g] for g in range(s.n))
    if not extends:
        raise LiftNotHomomorphism("lift does not extend the given map on generators")
    report.check(True, "lift-extends-generators")
    return {x: values[i] for i, x in enumerate(exp.elems)}, report


def check_unit_counit(s: InverseSemigroup, cap: int = DEFAULT_EXPANSION_CAP) -> Report:
    """Elementwise unit-counit equations of the expansion adjunction.

    (a) degree after the expanded canonical map is the identity on the
    expansion; (b) degree after the canonical map is the identity on s.
    """
    exp = build_expansion(s, cap)
    exp2 = build_expansion(exp.base, cap)
    report = Report("unit-counit")

    # (b) first: cheap
    ok_b = all(exp.elems[exp.iota[g]].anchor == g for g in range(s.n))
    report.check(ok_b, "counit-on-generators")

    # (a): lift of g -> [[g]] evaluated on every expansion element
    pi = tuple(exp2.iota[exp.iota[g]] for g in range(s.n))
    hom, _ = lift_partial_hom(s, exp2.base, pi, cap)
    ok_a = all(
        exp2.elems[hom[x]].anchor == i
        for i, x in enumerate(exp.elems)
    )
    report.check(ok_a, "unit-degree-identity")
    if not (ok_a and ok_b):
        raise PropertyViolation("unit-counit equations failed:\n" + str(report))
    return report


def check_e_unitary_transfer(s: InverseSemigroup, cap: int = DEFAULT_EXPANSION_CAP) -> bool:
    """E-unitarity holds for s iff it holds for the expansion; returns the verdict."""
    before = core.is_e_unitary(s)
    after = core.is_e_unitary(build_expansion(s, cap).base)
    if before != after:
        raise PropertyViolation(
            f"e-unitary transfer failed: source={before} expansion={after}"
        )
    return before


def check_semilattice_fixedpoint(s: InverseSemigroup, cap: int = DEFAULT_EXPANSION_CAP) -> Report:
    """Semilattices are fixed points of the expansion; nothing else is.

    For a semilattice the canonical map must be a bijective homomorphism.
    Otherwise the expansion is strictly larger and the canonical map
    fails multiplicativity on a witnessed pair.
    """
    exp = build_expansion(s, cap)
    report = Report("semilattice-fixedpoint")
    witness = None
    for a in range(s.n):
        for b in range(s.n):
            lhs = exp.base.table[exp.iota[a]][exp.iota[b]]
            rhs = exp.iota[s.table[a][b]]
            if lhs != rhs:
                witness = (a, b)
                break
        if witness:
            break

    if core.is_semilattice(s):
        ok = witness is None and len(exp.elems) == s.n
        report.check(
            ok,
            "canonical-map-isomorphism",
            "" if ok else f"|expansion|={len(exp.elems)} |source|={s.n}",
        )
        if not ok:
            raise PropertyViolation("semilattice expansion is not an isomorphism")
    else:
        grew = len(exp.elems) > s.n
        report.check(grew, "expansion-strictly-larger", f"|expansion|={len(exp.elems)}")
        report.check(
            witness is not None,
            "canonical-map-not-multiplicative",
            "no witness" if witness is None else
            f"[{s.names[witness[0]]}][{s.names[witness[1]]}] != "
            f"[{s.names[s.table[witness[0]][witness[1]]]}]",
        )
        if not (grew and witness is not None):
            raise PropertyViolation("non-semilattice behaved like a fixed point")
    return report
