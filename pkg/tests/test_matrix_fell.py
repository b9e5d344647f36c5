import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from semexp import core
from semexp import matrix_fell as mf
from semexp.core import mask_of
from semexp.errors import NotAnAlgebra, ParseError, RegularityFailure

Z, E, F, S, T = range(5)

E11 = mf._unit_matrix(2, 0, 0)
E12 = mf._unit_matrix(2, 0, 1)
E21 = mf._unit_matrix(2, 1, 0)
E22 = mf._unit_matrix(2, 1, 1)
DIAG = [E11, E22]


def span(*mats, tol=mf.DEFAULT_TOL, n=2):
    return mf.subspace_from_matrices(list(mats), tol=tol, n=n)


# -- subspace primitives -----------------------------------------------------


def test_subspace_from_matrices():
    assert span(E11, 2 * E11).dim == 1
    assert span(E12).dim == 1
    assert span(E11, E11 + 1e-15 * E22).dim == 1
    assert span().dim == 0


def test_subspace_product():
    assert mf.subspace_equal(mf.subspace_product(span(E12), span(E21)), span(E11))
    assert mf.subspace_product(span(E12), span()).dim == 0
    assert mf.subspace_product(span(E12), span(E12)).dim == 0


def test_subspace_adjoint_and_leq():
    assert mf.subspace_equal(mf.subspace_adjoint(span(E12)), span(E21))
    assert mf.subspace_leq(span(E11), span(*DIAG))
    assert not mf.subspace_leq(span(E12), span(*DIAG))


def test_subspace_intersection():
    assert mf.subspace_equal(
        mf.subspace_intersection(span(*DIAG), span(E11, E12)), span(E11)
    )
    assert mf.subspace_intersection(span(E12), span(E21)).dim == 0


@given(
    arrays(
        np.complex128,
        (3, 2, 2),
        elements=st.complex_numbers(
            min_magnitude=0, max_magnitude=2, allow_nan=False, allow_infinity=False
        ),
    )
)
@settings(max_examples=100, deadline=None)
def test_orthonormalize_properties(mats):
    u = mf.subspace_from_matrices(list(mats), n=2)
    # basis is orthonormal and respans the same space
    for i, a in enumerate(u.basis):
        for j, b in enumerate(u.basis):
            expected = 1.0 if i == j else 0.0
            assert abs(np.vdot(a, b) - expected) < 1e-8
    again = mf.subspace_from_matrices(list(u.basis), n=2)
    assert mf.subspace_equal(u, again)
    for m in mats:
        assert u.contains(m)
    assert mf.subspace_equal(mf.subspace_adjoint(mf.subspace_adjoint(u)), u)


def test_generated_star_algebra():
    assert mf.generated_star_algebra([span(E12)]).dim == 4
    assert mf.subspace_equal(mf.generated_star_algebra([span(*DIAG)]), span(*DIAG))
    s, bundle, _ = mf.five_element_matrix_model()
    alg = mf.generated_star_algebra([bundle.fibers[Z], bundle.fibers[E], bundle.fibers[F]])
    assert mf.subspace_equal(alg, span(*DIAG))


def test_ideal_unit():
    assert np.allclose(mf.ideal_unit(span(E11)), E11)
    assert np.allclose(mf.ideal_unit(span(*DIAG)), np.eye(2))
    assert np.allclose(mf.ideal_unit(span()), np.zeros((2, 2)))
    with pytest.raises(NotAnAlgebra):
        mf.ideal_unit(span(E12))


# -- concrete Fell bundles ---------------------------------------------------


def test_five_element_model_passes(five):
    s, bundle, _ = mf.five_element_matrix_model()
    rep = mf.check_concrete_fell_bundle(bundle)
    assert rep.ok


def test_z2_model_passes_and_is_saturated():
    s, bundle, _ = mf.z2_matrix_model()
    assert mf.check_concrete_fell_bundle(bundle).ok
    for a in range(2):
        for b in range(2):
            prod = mf.subspace_product(bundle.fibers[a], bundle.fibers[b])
            assert mf.subspace_equal(prod, bundle.fibers[s.table[a][b]])


def test_corrupted_bundle_fails():
    s, bundle, _ = mf.five_element_matrix_model()
    fibers = list(bundle.fibers)
    fibers[S] = span(E11)
    rep = mf.check_concrete_fell_bundle(
        mf.ConcreteFellBundle(semigroup=s, fibers=tuple(fibers), tol=bundle.tol)
    )
    assert not rep.ok
    assert any("A_a A_b <= A_ab" in line for line in rep.failures)


def test_fibers_are_ternary_rings():
    for s, bundle, _ in (mf.five_element_matrix_model(), mf.z2_matrix_model()):
        for fib in bundle.fibers:
            prod = mf.subspace_product(
                mf.subspace_product(fib, mf.subspace_adjoint(fib)), fib
            )
            assert mf.subspace_equal(prod, fib)


def test_expand_bundle_five(five):
    s, bundle, _ = mf.five_element_matrix_model()
    exp, expanded = mf.expand_bundle(bundle)
    by_pair = {
        (x.support, x.anchor): expanded.fibers[i] for i, x in enumerate(exp.elems)
    }
    eps_s = by_pair[(mask_of([E, S]), E)]
    assert mf.subspace_equal(eps_s, span(E11))
    br_s = by_pair[(mask_of([E, S]), S)]
    assert mf.subspace_equal(br_s, bundle.fibers[S])
    assert mf.check_span_refinement(bundle, exp, expanded)


def test_expand_bundle_trivial():
    s = core.cyclic_group(1)
    bundle = mf.ConcreteFellBundle(semigroup=s, fibers=(span(*DIAG),), tol=1e-9)
    exp, expanded = mf.expand_bundle(bundle)
    assert len(expanded.fibers) == 1
    assert mf.subspace_equal(expanded.fibers[0], bundle.fibers[0])
    assert mf.check_span_refinement(bundle, exp, expanded)


def test_expand_bundle_z2():
    s, bundle, _ = mf.z2_matrix_model()
    exp, expanded = mf.expand_bundle(bundle)
    by_pair = {
        (x.support, x.anchor): expanded.fibers[i] for i, x in enumerate(exp.elems)
    }
    assert mf.subspace_equal(by_pair[(mask_of([0]), 0)], span(*DIAG))
    assert mf.subspace_equal(by_pair[(mask_of([0, 1]), 0)], span(*DIAG))
    assert mf.subspace_equal(by_pair[(mask_of([0, 1]), 1)], bundle.fibers[1])
    assert mf.check_span_refinement(bundle, exp, expanded)


# -- regularity --------------------------------------------------------------


def test_regularity_five():
    s, bundle, u = mf.five_element_matrix_model()
    assert mf.check_regularity(bundle, u).ok


def test_regularity_group_representation():
    s, bundle, u = mf.z2_matrix_model()
    rep = mf.check_regularity(bundle, u)
    assert rep.ok


def test_regularity_zero_isometry_fails():
    s, bundle, u = mf.five_element_matrix_model()
    mats = list(u.matrices)
    mats[S] = np.zeros((2, 2), dtype=complex)
    rep = mf.check_regularity(bundle, mf.RegularityData(tuple(mats)))
    assert not rep.ok
    assert any("u_s u* = 1_s" in line for line in rep.failures)
    with pytest.raises(RegularityFailure):
        mf.twisted_from_regular(bundle, mf.RegularityData(tuple(mats)))


# -- twisted partial actions -------------------------------------------------


def test_twisted_from_regular_five():
    s, bundle, u = mf.five_element_matrix_model()
    tpa = mf.twisted_from_regular(bundle, u)
    assert np.allclose(tpa.omegas[(S, T)], E11)  # untwisted cocycle value
    assert mf.check_twisted_partial_action(tpa).ok


def test_twisted_phase_variant():
    s, bundle, _ = mf.five_element_matrix_model()
    u = mf.RegularityData(
        (np.zeros((2, 2), dtype=complex), E11, E22, 1j * E12, E21)
    )
    tpa = mf.twisted_from_regular(bundle, u)
    assert np.allclose(tpa.omegas[(T, S)], 1j * E22)
    assert mf.check_twisted_partial_action(tpa).ok


def test_twisted_group_trivial():
    s, bundle, u = mf.z2_matrix_model()
    tpa = mf.twisted_from_regular(bundle, u)
    for a in range(2):
        # global: every domain is the whole algebra
        assert mf.subspace_equal(tpa.domains[a], tpa.algebra)
        for b in range(2):
            assert np.allclose(tpa.omegas[(a, b)], np.eye(2))


def test_beta_identity_on_idempotent_domains():
    s, bundle, u = mf.five_element_matrix_model()
    tpa = mf.twisted_from_regular(bundle, u)
    for e in core.bit_ids(s.idempotent_mask):
        for x in tpa.domains[e].basis:
            assert np.allclose(tpa.beta(e, x), x)


def test_domain_identities():
    # D_a & D_b = D_a & D_(aa*b) and D_e & D_a = D_(ea)
    s, bundle, u = mf.five_element_matrix_model()
    tpa = mf.twisted_from_regular(bundle, u)
    d = tpa.domains
    for a in range(s.n):
        for b in range(s.n):
            lhs = mf.subspace_product(d[a], d[b])
            rhs = mf.subspace_product(d[a], d[s.table[s.table[a][s.inv[a]]][b]])
            assert mf.subspace_equal(lhs, rhs)
    for e in core.bit_ids(s.idempotent_mask):
        for a in range(s.n):
            assert mf.subspace_equal(
                mf.subspace_product(d[e], d[a]), d[s.table[e][a]]
            )


def test_perturbed_omega_flagged():
    s, bundle, u = mf.five_element_matrix_model()
    tpa = mf.twisted_from_regular(bundle, u)
    assert mf.check_twisted_partial_action(tpa).ok
    bad = mf.perturb_omega(tpa, S, F, 0.1)  # omega(s, s*s) loses its unit value
    rep = mf.check_twisted_partial_action(bad)
    assert not rep.ok
    assert any("(iv)" in line for line in rep.failures)
    # perturbing the (s, t) value is caught as well, by the cocycle identity
    bad2 = mf.perturb_omega(tpa, S, T, 0.1)
    rep2 = mf.check_twisted_partial_action(bad2)
    assert not rep2.ok


def test_globalization_five():
    s, bundle, u = mf.five_element_matrix_model()
    tpa = mf.twisted_from_regular(bundle, u)
    glob, exp, rep = mf.twisted_global_from_partial(tpa)
    assert rep.ok
    by_pair = {(x.support, x.anchor): i for i, x in enumerate(exp.elems)}
    d_eps_s = glob.domains[by_pair[(mask_of([E, S]), E)]]
    assert mf.subspace_equal(d_eps_s, span(E11))
    d_br_s = glob.domains[by_pair[(mask_of([E, S]), S)]]
    assert mf.subspace_equal(d_br_s, span(E11))
    # globality: domain of x equals domain of x x*
    for i in range(len(exp.elems)):
        j = glob.semigroup.table[i][glob.semigroup.inv[i]]
        assert mf.subspace_equal(glob.domains[i], glob.domains[j])


def test_globalization_trivial_group():
    s = core.cyclic_group(1)
    bundle = mf.ConcreteFellBundle(semigroup=s, fibers=(span(*DIAG),), tol=1e-9)
    u = mf.RegularityData((np.eye(2, dtype=complex),))
    tpa = mf.twisted_from_regular(bundle, u)
    glob, exp, rep = mf.twisted_global_from_partial(tpa)
    assert rep.ok
    assert mf.subspace_equal(glob.domains[0], tpa.domains[0])
    assert np.allclose(glob.omegas[(0, 0)], tpa.omegas[(0, 0)])


def test_restriction_recovers_source():
    for s, bundle, u in (mf.five_element_matrix_model(), mf.z2_matrix_model()):
        tpa = mf.twisted_from_regular(bundle, u)
        glob, exp, _ = mf.twisted_global_from_partial(tpa)
        back = mf.restrict_global_to_source(glob, exp)
        for a in range(s.n):
            assert (
                np.linalg.norm(
                    back.domains[a].projector() - tpa.domains[a].projector()
                )
                < 1e-8
            )
            for x in tpa.domains[s.inv[a]].basis:
                assert np.allclose(back.beta(a, x), tpa.beta(a, x))
            for b in range(s.n):
                assert np.linalg.norm(back.omegas[(a, b)] - tpa.omegas[(a, b)]) < 1e-8


def test_regular_bundle_roundtrip():
    for s, bundle, u in (mf.five_element_matrix_model(), mf.z2_matrix_model()):
        tpa = mf.twisted_from_regular(bundle, u)
        bundle2, u2 = mf.regular_bundle_from_twisted(tpa)
        for a in range(s.n):
            assert mf.subspace_equal(bundle2.fibers[a], bundle.fibers[a])
        assert mf.check_regularity(bundle2, u2).ok
        tpa2 = mf.twisted_from_regular(bundle2, u2)
        dev = 0.0
        for a in range(s.n):
            dev = max(
                dev,
                np.linalg.norm(
                    tpa2.domains[a].projector() - tpa.domains[a].projector()
                ),
            )
            for b in range(s.n):
                dev = max(
                    dev, np.linalg.norm(tpa2.omegas[(a, b)] - tpa.omegas[(a, b)])
                )
        assert dev < 1e-8


# -- documents ---------------------------------------------------------------


def test_bundle_doc_roundtrip():
    s, bundle, u = mf.five_element_matrix_model()
    doc = mf.format_bundle_doc(bundle)
    again = mf.parse_bundle_doc(doc, s)
    assert mf.format_bundle_doc(again) == doc
    udoc = mf.format_matrix_family_doc(s, u, 2)
    u2 = mf.parse_matrix_family_doc(udoc, s)
    assert mf.format_matrix_family_doc(s, u2, 2) == udoc


def test_bundle_doc_errors(five):
    with pytest.raises(ParseError):
        mf.parse_bundle_doc("element e\n", five)  # no ambient line
    with pytest.raises(ParseError):
        mf.parse_bundle_doc("ambient: 2\nelement e\n1.0\n", five)  # short row


def test_parse_complex_values():
    assert mf.parse_complex("1.5") == 1.5
    assert mf.parse_complex("-2i") == -2j
    assert mf.parse_complex("i") == 1j
    assert mf.parse_complex("1e-3+2.5i") == complex(1e-3, 2.5)
    with pytest.raises(ParseError):
        mf.parse_complex("zz")
    with pytest.raises(ParseError):
        mf.parse_complex("")
