"""Finite-dimensional operator-subspace calculus.

Subspaces of n-by-n complex matrices carry an orthonormal basis under
the Frobenius inner product; rank decisions are made by Gram-Schmidt
with one re-orthogonalization pass and a tolerance cut, never by
singular values.  On top of that sit concrete Fell bundles over a
finite inverse semigroup, their expansion to saturated bundles, partial
isometry regularity data, and twisted partial actions with their five
defining axioms.

Multiplier algebras collapse at finite dimension: the unit of an ideal
is an honest projection inside it, and "dense span" hypotheses become
exact span equalities.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import core
from .core import InverseSemigroup, bit_ids
from .errors import (
    GlobalityFailure,
    NoUnit,
    NotAnAlgebra,
    ParseError,
    PropertyViolation,
    RegularityFailure,
    SaturationFailure,
    TooLarge,
    UnknownElement,
)
from .expansion import DEFAULT_EXPANSION_CAP, ExpansionTable, build_expansion
from .report import Report

DEFAULT_TOL = 1e-9
MAX_AMBIENT = 16


def _norm(m) -> float:
    return float(np.linalg.norm(m))


def _close(x, y, tol: float) -> bool:
    return _norm(x - y) <= tol * (1.0 + max(_norm(x), _norm(y)))


@dataclass(frozen=True)
class MatrixSubspace:
    """Subspace of n-by-n complex matrices via an orthonormal basis."""

    n: int
    basis: tuple
    tol: float

    @property
    def dim(self) -> int:
        return len(self.basis)

    def project(self, m):
        out = np.zeros((self.n, self.n), dtype=complex)
        for b in self.basis:
            out += np.vdot(b, m) * b
        return out

    def contains(self, m) -> bool:
        return _norm(m - self.project(m)) <= self.tol * (1.0 + _norm(m))

    def projector(self):
        """Projection onto the subspace as an n^2 x n^2 matrix (for distances)."""
        p = np.zeros((self.n * self.n,) * 2, dtype=complex)
        for b in self.basis:
            v = b.ravel()
            p += np.outer(v, v.conj())
        return p


def subspace_from_matrices(mats, tol: float = DEFAULT_TOL, n: int | None = None) -> MatrixSubspace:
    """Orthonormal span; residuals of norm <= tol*(1 + input norm) are discarded."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if n is None:
        if not mats:
            raise ParseError("ambient size required for an empty span")
        n = mats[0].shape[0]
    if n > MAX_AMBIENT:
        raise TooLarge(f"ambient size {n} exceeds {MAX_AMBIENT}")
    basis: list = []
    for m in mats:
        if m.shape != (n, n):
            raise ParseError(f"matrix shape {m.shape}, expected ({n}, {n})")
        r = m.copy()
        for _ in range(2):
            for b in basis:
                r = r - np.vdot(b, r) * b
        nr = _norm(r)
        if nr > tol * (1.0 + _norm(m)):
            b = r / nr
            b.setflags(write=False)
            basis.append(b)
    return MatrixSubspace(n=n, basis=tuple(basis), tol=tol)


def subspace_product(u: MatrixSubspace, v: MatrixSubspace) -> MatrixSubspace:
    """Span of all pairwise products of basis elements."""
    if u.n != v.n:
        raise ParseError("ambient sizes differ")
    return subspace_from_matrices(
        [a @ b for a in u.basis for b in v.basis], tol=u.tol, n=u.n
    )


def subspace_adjoint(u: MatrixSubspace) -> MatrixSubspace:
    return subspace_from_matrices(
        [b.conj().T for b in u.basis], tol=u.tol, n=u.n
    )


def subspace_leq(u: MatrixSubspace, v: MatrixSubspace) -> bool:
    """Every basis matrix of u lies within tol of its projection onto v."""
    return all(_norm(b - v.project(b)) <= u.tol * 2.0 for b in u.basis)


def subspace_equal(u: MatrixSubspace, v: MatrixSubspace) -> bool:
    return subspace_leq(u, v) and subspace_leq(v, u)


def _complement(u: MatrixSubspace) -> MatrixSubspace:
    """Orthocomplement inside the full matrix space."""
    basis = list(u.basis)
    added = []
    for i in range(u.n):
        for j in range(u.n):
            m = np.zeros((u.n, u.n), dtype=complex)
            m[i, j] = 1.0
            r = m
            for _ in range(2):
                for b in basis:
                    r = r - np.vdot(b, r) * b
            nr = _norm(r)
            if nr > u.tol * 2.0:
                b = r / nr
                basis.append(b)
                added.append(b)
    return MatrixSubspace(n=u.n, basis=tuple(added), tol=u.tol)


def subspace_intersection(u: MatrixSubspace, v: MatrixSubspace) -> MatrixSubspace:
    cu, cv = _complement(u), _complement(v)
    joined = subspace_from_matrices(list(cu.basis) + list(cv.basis), tol=u.tol, n=u.n)
    return _complement(joined)


def generated_star_algebra(subspaces, tol: float | None = None) -> MatrixSubspace:
    """Smallest *-closed, product-closed subspace containing the inputs."""
    subspaces = list(subspaces)
    if not subspaces:
        raise ParseError("need at least one subspace")
    tol = subspaces[0].tol if tol is None else tol
    n = subspaces[0].n
    mats = [b for u in subspaces for b in u.basis]
    cur = subspace_from_matrices(mats, tol=tol, n=n)
    while True:
        extended = list(cur.basis)
        extended += [b.conj().T for b in cur.basis]
        extended += [a @ b for a in cur.basis for b in cur.basis]
        nxt = subspace_from_matrices(extended, tol=tol, n=n)
        if nxt.dim == cur.dim:
            return nxt
        cur = nxt


def ideal_unit(d: MatrixSubspace):
    """The unit of a finite-dimensional *-algebra of matrices.

    Solves the linear system p b = b p = b over the basis; the zero
    algebra returns the zero matrix by convention.
    """
    n = d.n
    if d.dim == 0:
        return np.zeros((n, n), dtype=complex)
    if not subspace_equal(subspace_adjoint(d), d):
        raise NotAnAlgebra("subspace is not closed under adjoints")
    if not subspace_leq(subspace_product(d, d), d):
        raise NotAnAlgebra("subspace is not closed under products")
    cols = []
    for bi in d.basis:
        stacked = [(bi @ bj).ravel() for bj in d.basis]
        stacked += [(bj @ bi).ravel() for bj in d.basis]
        cols.append(np.concatenate(stacked))
    a = np.stack(cols, axis=1)
    rhs = np.concatenate([bj.ravel() for bj in d.basis] * 2)
    coef, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    p = sum(c * b for c, b in zip(coef, d.basis))
    for bj in d.basis:
        if not (_close(p @ bj, bj, d.tol) and _close(bj @ p, bj, d.tol)):
            raise NoUnit("no two-sided unit solves the system")
    if not (_close(p @ p, p, d.tol) and _close(p.conj().T, p, d.tol)):
        raise NoUnit("computed unit is not a projection")
    return p


# -- concrete Fell bundles ---------------------------------------------------


@dataclass(frozen=True)
class ConcreteFellBundle:
    """One matrix subspace per semigroup element, common ambient size."""

    semigroup: InverseSemigroup
    fibers: tuple
    tol: float

    @property
    def n(self) -> int:
        return self.fibers[0].n


def check_concrete_fell_bundle(bundle: ConcreteFellBundle) -> Report:
    s, fib = bundle.semigroup, bundle.fibers
    rep = Report("concrete-fell-bundle")
    ok = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            if not subspace_leq(subspace_product(fib[a], fib[b]), fib[s.table[a][b]]):
                ok = False
                w = w or f"({s.names[a]},{s.names[b]})"
    rep.check(ok, "A_a A_b <= A_ab", w)
    ok = True
    w = ""
    for a in range(s.n):
        if not subspace_leq(subspace_adjoint(fib[a]), fib[s.inv[a]]):
            ok = False
            w = w or s.names[a]
    rep.check(ok, "A_a* <= A_(a*)", w)
    ok = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            if core.natural_leq(s, a, b) and not subspace_leq(fib[a], fib[b]):
                ok = False
                w = w or f"({s.names[a]},{s.names[b]})"
    rep.check(ok, "a<=b implies A_a <= A_b", w)
    rep.note("positivity of a*a holds automatically for concrete fibers")
    return rep


def expand_bundle(
    bundle: ConcreteFellBundle, cap: int = DEFAULT_EXPANSION_CAP
) -> tuple[ExpansionTable, ConcreteFellBundle]:
    """Fibers over the expansion; always saturated, by construction of the formula.

    The fiber over (A, t) is the product of A_a A_(a*) over a in A,
    times A_t.  Saturation and the bundle conditions are verified and a
    failure raises, since it can only indicate a bug.
    """
    pre = check_concrete_fell_bundle(bundle)
    if not pre.ok:
        raise SaturationFailure(
            "input is not a concrete Fell bundle:\n" + "\n".join(pre.failures)
        )
    s, fib = bundle.semigroup, bundle.fibers
    exp = build_expansion(s, cap)
    source_ideal = [
        subspace_product(fib[a], fib[s.inv[a]]) for a in range(s.n)
    ]
    fibers = []
    for x in exp.elems:
        acc = None
        for a in bit_ids(x.support):
            acc = source_ideal[a] if acc is None else subspace_product(acc, source_ideal[a])
        fibers.append(subspace_product(acc, fib[x.anchor]))
    out = ConcreteFellBundle(semigroup=exp.base, fibers=tuple(fibers), tol=bundle.tol)

    post = check_concrete_fell_bundle(out)
    if not post.ok:
        raise SaturationFailure(
            "expanded bundle failed the bundle conditions:\n" + "\n".join(post.failures)
        )
    m = len(exp.elems)
    for i in range(m):
        for j in range(m):
            prod = subspace_product(fibers[i], fibers[j])
            if not subspace_equal(prod, fibers[exp.base.table[i][j]]):
                raise SaturationFailure(
                    f"saturation fails at ({exp.elems[i].render(s)}, "
                    f"{exp.elems[j].render(s)})"
                )
    return exp, out


def check_span_refinement(
    bundle: ConcreteFellBundle, exp: ExpansionTable, expanded: ConcreteFellBundle
) -> bool:
    """Each source fiber equals the span of the expansion fibers over it."""
    s, fib = bundle.semigroup, bundle.fibers
    for g in range(s.n):
        mats = [
            b
            for i, x in enumerate(exp.elems)
            if x.anchor == g
            for b in expanded.fibers[i].basis
        ]
        span = subspace_from_matrices(mats, tol=bundle.tol, n=bundle.n)
        if not subspace_equal(span, fib[g]):
            return False
    total_src = subspace_from_matrices(
        [b for u in fib for b in u.basis], tol=bundle.tol, n=bundle.n
    )
    total_exp = subspace_from_matrices(
        [b for u in expanded.fibers for b in u.basis], tol=bundle.tol, n=bundle.n
    )
    return subspace_equal(total_src, total_exp)


# -- regularity data ---------------------------------------------------------


@dataclass(frozen=True)
class RegularityData:
    """One partial isometry per semigroup element."""

    matrices: tuple


def check_regularity(bundle: ConcreteFellBundle, u: RegularityData) -> Report:
    s, fib = bundle.semigroup, bundle.fibers
    tol = bundle.tol
    rep = Report("regularity")
    ideals = [
        subspace_product(fib[a], subspace_adjoint(fib[a])) for a in range(s.n)
    ]
    units = [ideal_unit(d) for d in ideals]
    for a in range(s.n):
        ua = np.asarray(u.matrices[a], dtype=complex)
        adj = subspace_adjoint(fib[a])
        lhs = subspace_from_matrices([ua @ b for b in adj.basis], tol=tol, n=bundle.n)
        rep.check(
            subspace_equal(lhs, ideals[a]),
            f"u_{s.names[a]} A* = A A*",
        )
        rhs_space = subspace_product(adj, fib[a])
        lhs2 = subspace_from_matrices([b @ ua for b in adj.basis], tol=tol, n=bundle.n)
        rep.check(
            subspace_equal(lhs2, rhs_space),
            f"A* u_{s.names[a]} = A* A",
        )
        rep.check(
            _close(ua @ ua.conj().T, units[a], tol),
            f"u_{s.names[a]} u* = 1_{s.names[a]}",
        )
        rep.check(
            _close(ua.conj().T @ ua, units[s.inv[a]], tol),
            f"u* u_{s.names[a]} = 1_{s.names[s.inv[a]]}",
        )
        if s.is_idempotent(a):
            rep.check(_close(ua, units[a], tol), f"u_{s.names[a]} = 1_{s.names[a]}")
    return rep


# -- twisted partial actions -------------------------------------------------


@dataclass
class TwistedPartialActionFD:
    """Domains, conjugation data, and a unitary cocycle over a semigroup.

    ``conjugators[a]`` implements the partial automorphism for a by
    x -> v x v*; ``omegas[(a, b)]`` is the cocycle value, a unitary of
    the ideal domains[a] * domains[ab].
    """

    semigroup: InverseSemigroup
    algebra: MatrixSubspace
    domains: tuple
    conjugators: tuple
    omegas: dict
    tol: float

    @property
    def n(self) -> int:
        return self.algebra.n

    def beta(self, a: int, x):
        v = self.conjugators[a]
        return v @ x @ v.conj().T


def twisted_from_regular(
    bundle: ConcreteFellBundle, u: RegularityData
) -> TwistedPartialActionFD:
    """Conjugation by the partial isometries, with cocycle u_a u_b u_(ab)*."""
    reg = check_regularity(bundle, u)
    if not reg.ok:
        raise RegularityFailure("\n".join(reg.failures))
    s, fib = bundle.semigroup, bundle.fibers
    tol = bundle.tol
    domains = tuple(
        subspace_product(fib[a], subspace_adjoint(fib[a])) for a in range(s.n)
    )
    algebra = subspace_from_matrices(
        [b for d in domains for b in d.basis], tol=tol, n=bundle.n
    )
    mats = tuple(np.asarray(m, dtype=complex) for m in u.matrices)
    omegas = {
        (a, b): mats[a] @ mats[b] @ mats[s.table[a][b]].conj().T
        for a in range(s.n)
        for b in range(s.n)
    }
    tpa = TwistedPartialActionFD(
        semigroup=s,
        algebra=algebra,
        domains=domains,
        conjugators=mats,
        omegas=omegas,
        tol=tol,
    )
    rep = check_twisted_partial_action(tpa)
    if not rep.ok:
        raise PropertyViolation(
            "twisted action from regular data failed its axioms:\n"
            + "\n".join(rep.failures)
        )
    return tpa


def perturb_omega(tpa: TwistedPartialActionFD, a: int, b: int, theta: float) -> TwistedPartialActionFD:
    """Multiply one cocycle value by a phase; used for sensitivity tests."""
    omegas = dict(tpa.omegas)
    omegas[(a, b)] = np.exp(1j * theta) * omegas[(a, b)]
    return replace(tpa, omegas=omegas)


def check_twisted_partial_action(tpa: TwistedPartialActionFD) -> Report:
    """All five defining axioms, each on a spanning set of its ideal."""
    s = tpa.semigroup
    d = tpa.domains
    om = tpa.omegas
    tol = tpa.tol
    rep = Report("twisted-partial-action")

    algebra_ok = subspace_equal(subspace_adjoint(tpa.algebra), tpa.algebra) and subspace_leq(
        subspace_product(tpa.algebra, tpa.algebra), tpa.algebra
    )
    rep.check(algebra_ok, "ambient algebra is a *-algebra")
    span = subspace_from_matrices(
        [b for u in d for b in u.basis], tol=tol, n=tpa.n
    )
    rep.check(subspace_equal(span, tpa.algebra), "domains span the algebra")
    ok = True
    w = ""
    for a in range(s.n):
        ideal = subspace_leq(subspace_product(tpa.algebra, d[a]), d[a]) and subspace_leq(
            subspace_product(d[a], tpa.algebra), d[a]
        )
        if not ideal:
            ok = False
            w = w or s.names[a]
    rep.check(ok, "domains are ideals", w)

    # product of ideals agrees with geometric intersection (finite dimension)
    ok = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            prod = subspace_product(d[a], d[b])
            if not (
                subspace_equal(prod, subspace_product(d[b], d[a]))
                and subspace_equal(prod, subspace_intersection(d[a], d[b]))
            ):
                ok = False
                w = w or f"({s.names[a]},{s.names[b]})"
    rep.check(ok, "ideal products commute and equal intersections", w)

    def inter(*ids):
        acc = d[ids[0]]
        for i in ids[1:]:
            acc = subspace_product(acc, d[i])
        return acc

    ok = True
    w = ""
    for a in range(s.n):
        img = subspace_from_matrices(
            [tpa.beta(a, b) for b in d[s.inv[a]].basis], tol=tol, n=tpa.n
        )
        if not subspace_equal(img, d[a]):
            ok = False
            w = w or s.names[a]
    rep.check(ok, "beta_a maps D_(a*) onto D_a", w)

    ok = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            img = subspace_from_matrices(
                [tpa.beta(a, x) for x in inter(s.inv[a], b).basis], tol=tol, n=tpa.n
            )
            if not subspace_equal(img, inter(a, s.table[a][b])):
                ok = False
                w = w or f"({s.names[a]},{s.names[b]})"
    rep.check(ok, "(i) beta_a(D_a* & D_b) = D_a & D_ab", w)

    ok = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            ab = s.table[a][b]
            o = om[(a, b)]
            for x in inter(s.inv[b], s.table[s.inv[b]][s.inv[a]]).basis:
                lhs = tpa.beta(a, tpa.beta(b, x))
                rhs = o @ tpa.beta(ab, x) @ o.conj().T
                if not _close(lhs, rhs, tol):
                    ok = False
                    w = w or f"({s.names[a]},{s.names[b]})"
    rep.check(ok, "(ii) beta_a beta_b = Ad(omega) beta_ab", w)

    ok = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            for c in range(s.n):
                bc = s.table[b][c]
                for x in inter(s.inv[a], b, bc).basis:
                    lhs = tpa.beta(a, x @ om[(b, c)]) @ om[(a, bc)]
                    rhs = tpa.beta(a, x) @ om[(a, b)] @ om[(s.table[a][b], c)]
                    if not _close(lhs, rhs, tol):
                        ok = False
                        w = w or f"({s.names[a]},{s.names[b]},{s.names[c]})"
    rep.check(ok, "(iii) cocycle identity", w)

    units = [ideal_unit(d[a]) for a in range(s.n)]
    ok = True
    w = ""
    for e in bit_ids(s.idempotent_mask):
        for f in bit_ids(s.idempotent_mask):
            if not _close(om[(e, f)], units[s.table[e][f]], tol):
                ok = False
                w = w or f"omega({s.names[e]},{s.names[f]})"
    for a in range(s.n):
        if not _close(om[(a, s.table[s.inv[a]][a])], units[a], tol):
            ok = False
            w = w or f"omega({s.names[a]},{s.names[s.table[s.inv[a]][a]]})"
        if not _close(om[(s.table[a][s.inv[a]], a)], units[a], tol):
            ok = False
            w = w or f"omega({s.names[s.table[a][s.inv[a]]]},{s.names[a]})"
    rep.check(ok, "(iv) omega trivial on idempotent pairs and units", w)

    ok = True
    w = ""
    for a in range(s.n):
        ai = s.inv[a]
        for e in bit_ids(s.idempotent_mask):
            aie = s.table[ai][e]
            for x in d[aie].basis:
                lhs = om[(ai, e)] @ om[(aie, a)] @ x
                rhs = om[(ai, a)] @ x
                if not _close(lhs, rhs, tol):
                    ok = False
                    w = w or f"({s.names[a]},{s.names[e]})"
    rep.check(ok, "(v) omega(a*,e) omega(a*e,a) x = omega(a*,a) x", w)

    ok = True
    w = ""
    for a in range(s.n):
        for b in range(s.n):
            ideal = subspace_product(d[a], d[s.table[a][b]])
            o = om[(a, b)]
            unit = ideal_unit(ideal)
            good = (
                ideal.contains(o)
                and _close(o @ o.conj().T, unit, tol)
                and _close(o.conj().T @ o, unit, tol)
            )
            if not good:
                ok = False
                w = w or f"({s.names[a]},{s.names[b]})"
    rep.check(ok, "omega(a,b) unitary in D_a D_ab", w)
    return rep


def twisted_global_from_partial(
    tpa: TwistedPartialActionFD, cap: int = DEFAULT_EXPANSION_CAP
) -> tuple[TwistedPartialActionFD, ExpansionTable, Report]:
    """Upgrade to a twisted action of the expansion.

    Domain over (A, t) is the product of the domains over A times the
    domain of t; the conjugator is compressed by the corresponding
    ideal units; the cocycle is the restriction of the source cocycle.
    Globality (domain of x equals domain of x x*) is verified and the
    result is checked against all five axioms.
    """
    s = tpa.semigroup
    exp = build_expansion(s, cap)
    units = [ideal_unit(dm) for dm in tpa.domains]
    domains = []
    conjugators = []
    for x in exp.elems:
        acc = None
        conj = np.eye(tpa.n, dtype=complex)
        for a in bit_ids(x.support):
            acc = tpa.domains[a] if acc is None else subspace_product(acc, tpa.domains[a])
            conj = conj @ units[a]
        domains.append(subspace_product(acc, tpa.domains[x.anchor]))
        conjugators.append(conj @ tpa.conjugators[x.anchor])

    table = exp.base.table
    inv = exp.base.inv
    for i, x in enumerate(exp.elems):
        j = table[i][inv[i]]
        if not subspace_equal(domains[i], domains[j]):
            raise GlobalityFailure(
                f"domain over {x.render(s)} differs from domain over its range idempotent"
            )

    omegas = {}
    for i, x in enumerate(exp.elems):
        for j, y in enumerate(exp.elems):
            p = ideal_unit(domains[table[i][j]])
            omegas[(i, j)] = p @ tpa.omegas[(x.anchor, y.anchor)] @ p

    algebra = subspace_from_matrices(
        [b for dm in domains for b in dm.basis], tol=tpa.tol, n=tpa.n
    )
    out = TwistedPartialActionFD(
        semigroup=exp.base,
        algebra=algebra,
        domains=tuple(domains),
        conjugators=tuple(conjugators),
        omegas=omegas,
        tol=tpa.tol,
    )
    rep = check_twisted_partial_action(out)
    return out, exp, rep


def restrict_global_to_source(
    glob: TwistedPartialActionFD, exp: ExpansionTable
) -> TwistedPartialActionFD:
    """Pull a twisted action of the expansion back along the canonical map."""
    s = exp.source
    domains = tuple(glob.domains[exp.iota[g]] for g in range(s.n))
    conjugators = tuple(glob.conjugators[exp.iota[g]] for g in range(s.n))
    omegas = {
        (a, b): glob.omegas[(exp.iota[a], exp.iota[b])]
        for a in range(s.n)
        for b in range(s.n)
    }
    algebra = subspace_from_matrices(
        [m for dm in domains for m in dm.basis], tol=glob.tol, n=glob.n
    )
    return TwistedPartialActionFD(
        semigroup=s,
        algebra=algebra,
        domains=domains,
        conjugators=conjugators,
        omegas=omegas,
        tol=glob.tol,
    )


def regular_bundle_from_twisted(
    tpa: TwistedPartialActionFD,
) -> tuple[ConcreteFellBundle, RegularityData]:
    """The bundle with fibers D_a u_a carried by the conjugation data."""
    s = tpa.semigroup
    fibers = tuple(
        subspace_from_matrices(
            [b @ tpa.conjugators[a] for b in tpa.domains[a].basis],
            tol=tpa.tol,
            n=tpa.n,
        )
        for a in range(s.n)
    )
    return (
        ConcreteFellBundle(semigroup=s, fibers=fibers, tol=tpa.tol),
        RegularityData(tpa.conjugators),
    )


# -- stock models ------------------------------------------------------------


def _unit_matrix(n, i, j):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


def five_element_matrix_model(tol: float = DEFAULT_TOL):
    """The five-element semigroup acting on 2x2 matrix units."""
    s = core.five_element_example()
    e11, e12, e21, e22 = (
        _unit_matrix(2, 0, 0),
        _unit_matrix(2, 0, 1),
        _unit_matrix(2, 1, 0),
        _unit_matrix(2, 1, 1),
    )
    fibers = (
        subspace_from_matrices([], tol=tol, n=2),
        subspace_from_matrices([e11], tol=tol),
        subspace_from_matrices([e22], tol=tol),
        subspace_from_matrices([e12], tol=tol),
        subspace_from_matrices([e21], tol=tol),
    )
    u = RegularityData((np.zeros((2, 2), dtype=complex), e11, e22, e12, e21))
    return s, ConcreteFellBundle(semigroup=s, fibers=fibers, tol=tol), u


def z2_matrix_model(tol: float = DEFAULT_TOL):
    """Order-two group grading of the 2x2 matrices: diagonal and antidiagonal."""
    s = core.cyclic_group(2)
    e11, e12, e21, e22 = (
        _unit_matrix(2, 0, 0),
        _unit_matrix(2, 0, 1),
        _unit_matrix(2, 1, 0),
        _unit_matrix(2, 1, 1),
    )
    fibers = (
        subspace_from_matrices([e11, e22], tol=tol),
        subspace_from_matrices([e12, e21], tol=tol),
    )
    u = RegularityData((np.eye(2, dtype=complex), e12 + e21))
    return s, ConcreteFellBundle(semigroup=s, fibers=fibers, tol=tol), u


# -- documents ---------------------------------------------------------------
#
# bundle document:
#   ambient: n
#   element <name>         (fiber section; zero or more matrix blocks)
#   <n rows of n entries>  (entries are a+bi tokens; blocks blank-line separated)
#
# matrix family document: same, exactly one block per element.

def parse_complex(tok: str) -> complex:
    t = tok.strip()
    if not t:
        raise ParseError("empty complex entry")
    try:
        if not t.endswith("i"):
            return complex(float(t), 0.0)
        body = t[:-1]
        # split real from imaginary at the last sign not part of an exponent
        split = -1
        for k in range(1, len(body)):
            if body[k] in "+-" and body[k - 1] not in "eE":
                split = k
        re_s, im_s = ("", body) if split < 0 else (body[:split], body[split:])
        re_part = float(re_s) if re_s else 0.0
        if im_s in ("", "+"):
            im_part = 1.0
        elif im_s == "-":
            im_part = -1.0
        else:
            im_part = float(im_s)
        return complex(re_part, im_part)
    except ValueError:
        raise ParseError(f"bad complex entry {tok!r}")


def format_complex(z: complex) -> str:
    re_part, im_part = float(z.real), float(z.imag)
    sign = "+" if im_part >= 0 else "-"
    return f"{re_part!r}{sign}{abs(im_part)!r}i"


def _format_matrix(m) -> list[str]:
    return [" ".join(format_complex(v) for v in row) for row in np.asarray(m)]


def _parse_sections(text: str):
    """Split a document into (header lines, per-element block lists)."""
    sections = []
    current = None
    block: list[str] = []
    header = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if line.startswith("element "):
            if current is not None and block:
                current[1].append(block)
                block = []
            current = (line[len("element "):].strip(), [])
            sections.append(current)
        elif not line.strip():
            if current is not None and block:
                current[1].append(block)
                block = []
        else:
            if current is None:
                header.append(line.strip())
            else:
                block.append(line.strip())
    if current is not None and block:
        current[1].append(block)
    return header, sections


def _parse_block(rows: list[str], n: int):
    if len(rows) != n:
        raise ParseError(f"matrix block has {len(rows)} rows, expected {n}")
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        toks = row.split()
        if len(toks) != n:
            raise ParseError(f"matrix row has {len(toks)} entries, expected {n}")
        for j, tok in enumerate(toks):
            out[i, j] = parse_complex(tok)
    return out


def _ambient_from_header(header: list[str]) -> int:
    for line in header:
        if line.startswith("ambient:"):
            try:
                return int(line[len("ambient:"):])
            except ValueError:
                raise ParseError(f"bad ambient size {line!r}")
    raise ParseError("missing 'ambient: n' line")


def parse_bundle_doc(text: str, s: InverseSemigroup, tol: float = DEFAULT_TOL) -> ConcreteFellBundle:
    header, sections = _parse_sections(text)
    n = _ambient_from_header(header)
    by_name = {}
    for name, blocks in sections:
        if name not in s.name_to_id:
            raise UnknownElement(f"unknown element {name!r}")
        if name in by_name:
            raise ParseError(f"element {name!r} listed twice")
        by_name[name] = [_parse_block(b, n) for b in blocks]
    missing = [nm for nm in s.names if nm not in by_name]
    if missing:
        raise ParseError(f"missing fibers for: {', '.join(missing)}")
    fibers = tuple(
        subspace_from_matrices(by_name[nm], tol=tol, n=n) for nm in s.names
    )
    return ConcreteFellBundle(semigroup=s, fibers=fibers, tol=tol)


def format_bundle_doc(bundle: ConcreteFellBundle) -> str:
    lines = [f"ambient: {bundle.n}"]
    for g, fiber in enumerate(bundle.fibers):
        lines.append(f"element {bundle.semigroup.names[g]}")
        for b in fiber.basis:
            lines.extend(_format_matrix(b))
            lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def parse_matrix_family_doc(text: str, s: InverseSemigroup) -> RegularityData:
    header, sections = _parse_sections(text)
    n = _ambient_from_header(header)
    by_name = {}
    for name, blocks in sections:
        if name not in s.name_to_id:
            raise UnknownElement(f"unknown element {name!r}")
        if len(blocks) != 1:
            raise ParseError(f"element {name!r} must carry exactly one matrix")
        by_name[name] = _parse_block(blocks[0], n)
    missing = [nm for nm in s.names if nm not in by_name]
    if missing:
        raise ParseError(f"missing matrices for: {', '.join(missing)}")
    return RegularityData(tuple(by_name[nm] for nm in s.names))


def format_matrix_family_doc(s: InverseSemigroup, u: RegularityData, n: int) -> str:
    lines = [f"ambient: {n}"]
    for g in range(s.n):
        lines.append(f"element {s.names[g]}")
        lines.extend(_format_matrix(u.matrices[g]))
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"
