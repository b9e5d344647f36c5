"""Partial homomorphisms, partial actions, filters, and globalization.

Partial maps on a finite set are target-or-bottom arrays (-1 encodes
bottom).  Filters are element bitmasks.  The canonical partial action
lives on the filter space and is the separating object behind
normal-form uniqueness; lifting it along the expansion upgrades it to
a genuine (everywhere multiplicative) action.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import InverseSemigroup, bit_ids, natural_leq
from .errors import (
    CriteriaDisagree,
    EquivalenceViolation,
    NotFilterBase,
    NotPartialAction,
    ParseError,
    PropertyViolation,
    TooLarge,
    UnknownElement,
)
from .expansion import build_expansion, DEFAULT_EXPANSION_CAP
from .report import Report

DEFAULT_FILTER_CAP = 24


@dataclass(frozen=True)
class PartialBijection:
    """Injective partial self-map of {0..size-1}; targets[x] = -1 means undefined."""

    size: int
    targets: tuple[int, ...]

    def __post_init__(self):
        hit = set()
        for y in self.targets:
            if y >= self.size:
                raise ParseError(f"target {y} out of range")
            if y >= 0:
                if y in hit:
                    raise ParseError(f"not injective: target {y} repeated")
                hit.add(y)

    @classmethod
    def from_pairs(cls, size: int, pairs) -> "PartialBijection":
        t = [-1] * size
        for x, y in pairs:
            if t[x] != -1:
                raise ParseError(f"point {x} mapped twice")
            t[x] = y
        return cls(size, tuple(t))

    @classmethod
    def identity_on(cls, size: int, mask: int) -> "PartialBijection":
        return cls(size, tuple(x if (mask >> x) & 1 else -1 for x in range(size)))

    @classmethod
    def empty(cls, size: int) -> "PartialBijection":
        return cls(size, (-1,) * size)

    def __call__(self, x: int) -> int:
        return self.targets[x]

    def compose(self, other: "PartialBijection") -> "PartialBijection":
        """self after other."""
        return PartialBijection(
            self.size,
            tuple(
                self.targets[y] if y >= 0 else -1
                for y in other.targets
            ),
        )

    def inverse(self) -> "PartialBijection":
        t = [-1] * self.size
        for x, y in enumerate(self.targets):
            if y >= 0:
                t[y] = x
        return PartialBijection(self.size, tuple(t))

    @property
    def domain_mask(self) -> int:
        m = 0
        for x, y in enumerate(self.targets):
            if y >= 0:
                m |= 1 << x
        return m

    @property
    def range_mask(self) -> int:
        m = 0
        for y in self.targets:
            if y >= 0:
                m |= 1 << y
        return m

    def restrict_range(self, mask: int) -> "PartialBijection":
        return PartialBijection(
            self.size,
            tuple(y if y >= 0 and (mask >> y) & 1 else -1 for y in self.targets),
        )

    def restrict_domain(self, mask: int) -> "PartialBijection":
        return PartialBijection(
            self.size,
            tuple(
                y if (mask >> x) & 1 else -1
                for x, y in enumerate(self.targets)
            ),
        )

    def is_partial_identity(self) -> bool:
        return all(y < 0 or y == x for x, y in enumerate(self.targets))


@dataclass(frozen=True)
class PartialActionOnSet:
    """A semigroup-indexed family of partial bijections of a finite set."""

    semigroup: InverseSemigroup
    x_size: int
    maps: tuple[PartialBijection, ...]


# -- partial homomorphisms -------------------------------------------------


def is_partial_homomorphism(s: InverseSemigroup, h: InverseSemigroup, pi) -> Report:
    """Check the three defining axioms of a partial homomorphism into h."""
    pi = tuple(pi)
    rep = Report("partial-homomorphism")
    st, hin, hit = s.table, s.inv, h.table
    ax1 = ax2 = ax3 = True
    w1 = w2 = w3 = ""
    for a in range(s.n):
        pa, pas = pi[a], pi[s.inv[a]]
        if hit[hit[pa][pas]][pa] != pa:
            ax3 = False
            w3 = w3 or s.names[a]
        for b in range(s.n):
            pb, pbs = pi[b], pi[s.inv[b]]
            if hit[hit[pa][pb]][pbs] != hit[pi[st[a][b]]][pbs]:
                ax1 = False
                w1 = w1 or f"({s.names[a]},{s.names[b]})"
            if hit[hit[pas][pa]][pb] != hit[pas][pi[st[a][b]]]:
                ax2 = False
                w2 = w2 or f"({s.names[a]},{s.names[b]})"
    rep.check(ax1, "pi(a)pi(b)pi(b*)=pi(ab)pi(b*)", w1)
    rep.check(ax2, "pi(a*)pi(a)pi(b)=pi(a*)pi(ab)", w2)
    rep.check(ax3, "pi(a)pi(a*)pi(a)=pi(a)", w3)
    return rep


def is_dual_prehomomorphism(s: InverseSemigroup, h: InverseSemigroup, pi) -> Report:
    """Equivalent criterion: star-compatible, submultiplicative, monotone.

    Cross-checked against :func:`is_partial_homomorphism`; a verdict
    mismatch is a bug in this module, never a property of the input.
    """
    pi = tuple(pi)
    rep = Report("dual-prehomomorphism")
    stars = all(pi[s.inv[a]] == h.inv[pi[a]] for a in range(s.n))
    rep.check(
        stars,
        "pi(a*)=pi(a)*",
        next((s.names[a] for a in range(s.n) if pi[s.inv[a]] != h.inv[pi[a]]), ""),
    )
    sub = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            if not natural_leq(h, h.table[pi[a]][pi[b]], pi[s.table[a][b]]):
                sub = False
                w = w or f"({s.names[a]},{s.names[b]})"
    rep.check(sub, "pi(a)pi(b)<=pi(ab)", w)
    mono = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            if natural_leq(s, a, b) and not natural_leq(h, pi[a], pi[b]):
                mono = False
                w = w or f"({s.names[a]},{s.names[b]})"
    rep.check(mono, "a<=b implies pi(a)<=pi(b)", w)

    if rep.ok != is_partial_homomorphism(s, h, pi).ok:
        raise EquivalenceViolation(
            "partial-homomorphism and dual-prehomomorphism verdicts disagree"
        )
    return rep


# -- partial actions -------------------------------------------------------


def _composition_condition(act: PartialActionOnSet, rep: Report, tag: str) -> bool:
    """Shared axiom: pi_a(pi_b(x)) = pi_ab(x) on ran pi_b* intersect ran pi_(b*a*)."""
    s, maps = act.semigroup, act.maps
    ok = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            dom = maps[s.inv[b]].range_mask & maps[s.table[s.inv[b]][s.inv[a]]].range_mask
            ab = maps[s.table[a][b]]
            for x in bit_ids(dom):
                y = maps[b](x)
                z = maps[a](y) if y >= 0 else -1
                if z < 0 or z != ab(x):
                    ok = False
                    w = w or f"({s.names[a]},{s.names[b]},x={x})"
    return rep.check(ok, tag, w)


def _criterion_ranges(act: PartialActionOnSet) -> Report:
    """Range criterion: inverses match, exact range identity, compositions."""
    s, maps = act.semigroup, act.maps
    rep = Report("partial-action-range-criterion")
    ok = all(maps[a].inverse() == maps[s.inv[a]] for a in range(s.n))
    rep.check(
        ok,
        "pi_a^-1 = pi_(a*)",
        next((s.names[a] for a in range(s.n) if maps[a].inverse() != maps[s.inv[a]]), ""),
    )
    if not ok:
        # the remaining conditions presuppose well-formed inverses
        return rep
    eq = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            lhs_dom = maps[s.inv[a]].range_mask & maps[b].range_mask
            image = 0
            for x in bit_ids(lhs_dom):
                y = maps[a](x)
                if y < 0:
                    image = -1
                    break
                image |= 1 << y
            rhs = maps[a].range_mask & maps[s.table[a][b]].range_mask
            if image != rhs:
                eq = False
                w = w or f"({s.names[a]},{s.names[b]})"
    rep.check(eq, "pi_a(X_a* & X_b) = X_a & X_ab", w)
    _composition_condition(act, rep, "pi_a pi_b = pi_ab on its domain")
    return rep


def _criterion_minimal(act: PartialActionOnSet) -> Report:
    """Minimal-effort criterion: inclusion instead of equality, plus monotone ranges."""
    s, maps = act.semigroup, act.maps
    rep = Report("partial-action-minimal-criterion")
    ok = all(maps[a].inverse() == maps[s.inv[a]] for a in range(s.n))
    rep.check(
        ok,
        "pi_a^-1 = pi_(a*)",
        next((s.names[a] for a in range(s.n) if maps[a].inverse() != maps[s.inv[a]]), ""),
    )
    if not ok:
        return rep
    inc = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            dom = maps[s.inv[a]].range_mask & maps[b].range_mask
            target = maps[s.table[a][b]].range_mask
            for x in bit_ids(dom):
                y = maps[a](x)
                if y < 0 or not (target >> y) & 1:
                    inc = False
                    w = w or f"({s.names[a]},{s.names[b]},x={x})"
    rep.check(inc, "pi_a(X_a* & X_b) <= X_ab", w)
    mono = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            if natural_leq(s, a, b):
                if maps[a].range_mask & ~maps[b].range_mask:
                    mono = False
                    w = w or f"({s.names[a]},{s.names[b]})"
    rep.check(mono, "a<=b implies X_a <= X_b", w)
    _composition_condition(act, rep, "pi_a pi_b = pi_ab on its domain")
    return rep


def is_partial_action(act: PartialActionOnSet) -> Report:
    """Run both equivalent partial-action criteria; verdicts must agree."""
    r1 = _criterion_ranges(act)
    r2 = _criterion_minimal(act)
    if r1.ok != r2.ok:
        raise CriteriaDisagree(
            f"range criterion says {r1.ok}, minimal criterion says {r2.ok}"
        )
    combined = Report("partial-action")
    combined.lines = r1.lines + r2.lines
    return combined


# -- filters ---------------------------------------------------------------


def is_filter(s: InverseSemigroup, mask: int) -> bool:
    """Direct definition: ea in the set iff both e and a are, e idempotent."""
    if mask == 0:
        return False
    for e in bit_ids(s.idempotent_mask):
        row = s.table[e]
        e_in = (mask >> e) & 1
        for a in range(s.n):
            lhs = (mask >> row[a]) & 1
            rhs = e_in and (mask >> a) & 1
            if bool(lhs) != bool(rhs):
                return False
    return True


def is_filter_by_conditions(s: InverseSemigroup, mask: int) -> bool:
    """Equivalent three-condition characterization (sources, joint products, up-closed)."""
    if mask == 0:
        return False
    members = bit_ids(mask)
    for a in members:
        if not (mask >> s.table[a][s.inv[a]]) & 1:
            return False
    for a in members:
        e = s.table[a][s.inv[a]]
        row = s.table[e]
        for b in members:
            if not (mask >> row[b]) & 1:
                return False
    for a in members:
        if s.upsets[a] & ~mask:
            return False
    return True


def is_filter_base(s: InverseSemigroup, mask: int) -> tuple[bool, str]:
    """Contains every member's source idempotent and is closed under
    (a, b) -> a a* b; returns (ok, witness)."""
    if mask == 0:
        return False, "empty"
    members = bit_ids(mask)
    for a in members:
        e = s.table[a][s.inv[a]]
        if not (mask >> e) & 1:
            return False, f"{s.names[a]}{s.names[a]}*={s.names[e]} missing"
        row = s.table[e]
        for b in members:
            if not (mask >> row[b]) & 1:
                return False, f"({s.names[a]},{s.names[b]}) -> {s.names[row[b]]} missing"
    return True, ""


def upward_closure(s: InverseSemigroup, mask: int) -> int:
    out = 0
    for a in bit_ids(mask):
        out |= s.upsets[a]
    return out


def filter_closure(s: InverseSemigroup, base: int) -> int:
    """Filter generated by a filter base (its upward closure)."""
    ok, witness = is_filter_base(s, base)
    if not ok:
        raise NotFilterBase(f"not closed under (a,b) -> a a* b at {witness}")
    return upward_closure(s, base)


def _filter_completion(s: InverseSemigroup, mask: int) -> int:
    """Smallest filter containing ``mask``.

    Closes under source idempotents, joint products (a, b) -> a a* b,
    and upward closure; the fixed points of this operator are exactly
    the filters.
    """
    table, inv = s.table, s.inv
    cur = upward_closure(s, mask)
    while True:
        add = 0
        members = bit_ids(cur)
        for a in members:
            e = table[a][inv[a]]
            if not (cur >> e) & 1:
                add |= 1 << e
            row = table[e]
            for b in members:
                v = row[b]
                if not (cur >> v) & 1:
                    add |= 1 << v
        if not add:
            return cur
        cur = upward_closure(s, cur | add)


@lru_cache(maxsize=32)
def _enumerate_filters(s: InverseSemigroup) -> tuple[int, ...]:
    found = set()
    queue = []
    for g in range(s.n):
        f = _filter_completion(s, 1 << g)
        if f not in found:
            found.add(f)
            queue.append(f)
    while queue:
        f = queue.pop()
        absent = ((1 << s.n) - 1) & ~f
        for g in bit_ids(absent):
            nf = _filter_completion(s, f | (1 << g))
            if nf not in found:
                found.add(nf)
                queue.append(nf)
    return tuple(sorted(found))


def enumerate_filters(s: InverseSemigroup, cap: int = DEFAULT_FILTER_CAP) -> tuple[int, ...]:
    """All filters, as bitmasks in ascending order.

    Enumerated as the closure system generated by singletons: every
    filter is reached by repeatedly adjoining one element and closing
    upward under the joint-product rule.
    """
    if s.n > cap:
        raise TooLarge(f"filter enumeration over {s.n} elements, cap is {cap}")
    return _enumerate_filters(s)


# -- the canonical partial action ------------------------------------------


def canonical_partial_action(
    s: InverseSemigroup, cap: int = DEFAULT_FILTER_CAP
) -> PartialActionOnSet:
    """Translation action on the filter space.

    Point x is filters[x] (same order as :func:`enumerate_filters`);
    the map for t is defined on filters containing t* and sends a
    filter to the filter generated by its left translate.
    """
    filters = enumerate_filters(s, cap)
    pos = {f: i for i, f in enumerate(filters)}
    size = len(filters)
    maps = []
    for t in range(s.n):
        row = s.table[t]
        ti = s.inv[t]
        targets = [-1] * size
        for i, f in enumerate(filters):
            if not (f >> ti) & 1:
                continue
            translated = 0
            for a in bit_ids(f):
                translated |= 1 << row[a]
            image = filter_closure(s, translated)
            j = pos.get(image)
            if j is None:
                raise PropertyViolation(
                    f"translate of a filter by {s.names[t]} is not a filter"
                )
            targets[i] = j
        maps.append(PartialBijection(size, tuple(targets)))
    act = PartialActionOnSet(s, size, tuple(maps))
    rep = is_partial_action(act)
    if not rep.ok:
        raise PropertyViolation(
            "canonical action failed the partial-action axioms:\n" + str(rep)
        )
    return act


# -- lifting along the expansion -------------------------------------------


def lift_action(
    s: InverseSemigroup,
    act: PartialActionOnSet,
    cap: int = DEFAULT_EXPANSION_CAP,
) -> tuple[tuple[PartialBijection, ...], Report]:
    """Globalize: one partial bijection per expansion element.

    The pair (A, t) acts by the map for t with range restricted to the
    intersection of the ranges over A.  The family is verified to be
    exactly multiplicative (not merely submultiplicative).
    """
    pre = is_partial_action(act)
    if not pre.ok:
        raise NotPartialAction("\n".join(pre.failures))
    exp = build_expansion(s, cap)
    maps = act.maps
    lifted = []
    for x in exp.elems:
        common = (1 << act.x_size) - 1
        for a in bit_ids(x.support):
            common &= maps[a].range_mask
        lifted.append(maps[x.anchor].restrict_range(common))
    lifted = tuple(lifted)

    rep = Report("lift-action")
    # exact multiplicativity, vectorized over all pairs
    size = act.x_size
    arr = np.array([m.targets for m in lifted], dtype=np.int32)
    padded = np.concatenate([arr, np.full((len(lifted), 1), -1, np.int32)], axis=1)
    tab = exp.base.np_table
    ok = True
    witness = ""
    for i in range(len(lifted)):
        fi = padded[i]
        comp = fi[np.where(arr >= 0, arr, size)]       # lifted[i] after lifted[j], all j
        expected = arr[tab[i]]
        if not np.array_equal(comp, expected):
            ok = False
            j = int(np.nonzero((comp != expected).any(axis=1))[0][0])
            witness = f"({exp.elems[i].render(s)})({exp.elems[j].render(s)})"
            break
    rep.check(ok, "lift-exactly-multiplicative", witness)

    idem_ok = all(
        lifted[i].is_partial_identity()
        for i, x in enumerate(exp.elems)
        if s.is_idempotent(x.anchor)
    )
    rep.check(idem_ok, "idempotents-act-as-partial-identities")
    return lifted, rep


def separation_check(
    s: InverseSemigroup,
    cap: int = DEFAULT_EXPANSION_CAP,
    filter_cap: int = DEFAULT_FILTER_CAP,
) -> bool:
    """Normal forms are separated by the lifted canonical action plus degree.

    Returns True; a genuine False would contradict the uniqueness
    theorem, so it raises instead.
    """
    exp = build_expansion(s, cap)
    act = canonical_partial_action(s, filter_cap)
    lifted, rep = lift_action(s, act, cap)
    if not rep.ok:
        raise PropertyViolation(str(rep))

    idem = {}
    for i, x in enumerate(exp.elems):
        if s.is_idempotent(x.anchor):
            key = lifted[i].targets
            if key in idem:
                raise PropertyViolation(
                    f"lift identifies idempotents {x.render(s)} and "
                    f"{exp.elems[idem[key]].render(s)}"
                )
            idem[key] = i

    by_anchor: dict[int, dict] = {}
    for i, x in enumerate(exp.elems):
        seen = by_anchor.setdefault(x.anchor, {})
        key = lifted[i].targets
        if key in seen:
            raise PropertyViolation(
                f"(map, degree) fails to separate {x.render(s)} and "
                f"{exp.elems[seen[key]].render(s)}"
            )
        seen[key] = i
    return True


# -- partial-action documents ----------------------------------------------
#
# line 1: |X|
# then one line per semigroup element, in id order:
#   name: i->j, k->l, ...
# undefined points are omitted.


def format_action_doc(act: PartialActionOnSet) -> str:
    s = act.semigroup
    lines = [str(act.x_size)]
    for g in range(s.n):
        pairs = ", ".join(
            f"{x}->{y}" for x, y in enumerate(act.maps[g].targets) if y >= 0
        )
        lines.append(f"{s.names[g]}: {pairs}".rstrip())
    return "\n".join(lines) + "\n"


def parse_action_doc(text: str, s: InverseSemigroup) -> PartialActionOnSet:
    lines = [ln for ln in (raw.split("#", 1)[0].strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ParseError("empty action document")
    try:
        size = int(lines[0])
    except ValueError:
        raise ParseError(f"first line must be |X|, got {lines[0]!r}")
    if len(lines) != s.n + 1:
        raise ParseError(f"expected one line per element ({s.n}), found {len(lines) - 1}")
    maps = [None] * s.n
    for ln in lines[1:]:
        if ":" not in ln:
            raise ParseError(f"missing ':' in {ln!r}")
        name, body = ln.split(":", 1)
        name = name.strip()
        if name not in s.name_to_id:
            raise UnknownElement(f"unknown element {name!r}")
        g = s.name_to_id[name]
        if maps[g] is not None:
            raise ParseError(f"element {name!r} listed twice")
        pairs = []
        body = body.strip()
        if body:
            for chunk in body.split(","):
                try:
                    xs, ys = chunk.split("->")
                    x, y = int(xs), int(ys)
                except ValueError:
                    raise ParseError(f"bad pair {chunk.strip()!r}")
                if not (0 <= x < size and 0 <= y < size):
                    raise ParseError(f"point out of range in {chunk.strip()!r}")
                pairs.append((x, y))
        maps[g] = PartialBijection.from_pairs(size, pairs)
    return PartialActionOnSet(s, size, tuple(maps))
