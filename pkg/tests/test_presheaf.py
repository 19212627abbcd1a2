import pytest
from hypothesis import given, settings, strategies as st

from idemcore import presheaf as ps
from idemcore.errors import BudgetExceeded, PresheafError
from idemcore.fixtures import SITE_BASES, chain3, parallel_pair, poset2, terminal

UNIVERSES = {nm: ps.enumerate_presheaves(build(), 2) for nm, build in SITE_BASES.items()}


def test_presheaf_counts_on_terminal():
    # presheaves on the terminal category are finite sets up to iso
    assert [X.sizes for X in ps.enumerate_presheaves(terminal(), 3)] == [(0,), (1,), (2,), (3,)]


def test_presheaf_counts_on_poset2():
    # pairs (n0, n1) with a function n1 -> n0 up to relabelling
    counts = {}
    for X in ps.enumerate_presheaves(poset2(), 2):
        counts[X.sizes] = counts.get(X.sizes, 0) + 1
    assert counts[(0, 0)] == 1 and counts[(2, 0)] == 1 and counts[(1, 2)] == 1
    assert counts[(2, 1)] == 1 and counts[(2, 2)] == 2


def test_enumeration_is_iso_free():
    for U in UNIVERSES.values():
        for i, X in enumerate(U):
            for Y in U[i + 1:]:
                assert not ps.isomorphic(X, Y)


def test_not_functorial_rejected():
    C = poset2()
    with pytest.raises(PresheafError):
        ps.Presheaf(C, (1, 1), [(0,), (0,), (1,)])


def test_budget():
    with pytest.raises(BudgetExceeded):
        ps.enumerate_presheaves(poset2(), 99)


def test_representable_yoneda():
    # hom(y(c), X) has |X(c)| elements
    C = chain3()
    for X in ps.enumerate_presheaves(C, 2)[:25]:
        for c in C.objects:
            assert ps.count_homs(ps.representable(C, c), X) == X.sizes[c]


@pytest.mark.parametrize("nm", sorted(UNIVERSES))
def test_omega_classifies_subobjects(nm):
    C = SITE_BASES[nm]()
    Om, true = ps.omega(C)
    for X in UNIVERSES[nm]:
        subs = ps.enumerate_subpresheaves(X)
        assert len(subs) == ps.count_homs(X, Om)
        for m in subs:
            assert ps.subobject_of(ps.characteristic_map(m)) == m


@pytest.mark.parametrize("nm", sorted(UNIVERSES))
def test_exponential_adjunction(nm):
    # hom(Z x X, Y) ≅ hom(Z, Y^X) and curry/uncurry are inverse
    U = UNIVERSES[nm][:6]
    for X in U:
        for Y in U:
            E = ps.exponential(X, Y)
            for Z in U[:4]:
                P, _, _ = ps.product(Z, X)
                hs = ps.hom_set(P, Y)
                assert len(hs) == ps.count_homs(Z, E.presheaf)
                for h in hs:
                    assert E.uncurry(E.curry(h, Z), Z) == h


@pytest.mark.parametrize("nm", sorted(UNIVERSES))
def test_product_and_pullback_universal_sizes(nm):
    U = UNIVERSES[nm]
    T = ps.terminal(SITE_BASES[nm]())
    for X in U[:6]:
        for Y in U[:6]:
            P, p1, p2 = ps.product(X, Y)
            Q, q1, q2 = ps.pullback(ps.bang(X), ps.bang(Y))
            assert ps.isomorphic(P, Q)
            assert ps.compose(ps.bang(X), q1) == ps.compose(ps.bang(Y), q2)
    assert ps.count_homs(U[-1], T) == 1


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_epi_mono_factorization(data):
    U = UNIVERSES["parallel_pair"]
    X = data.draw(st.sampled_from(U))
    Y = data.draw(st.sampled_from(U))
    hs = ps.hom_set(X, Y, limit=200)
    if not hs:
        return
    f = data.draw(st.sampled_from(hs))
    e, m = ps.epi_mono_factorize(f)
    _, incl = m.as_presheaf()
    assert ps.is_epi(e) and ps.is_mono(incl)
    assert ps.compose(incl, e) == f


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_meet_join_lattice(data):
    X = data.draw(st.sampled_from(UNIVERSES["chain3"]))
    subs = ps.enumerate_subpresheaves(X)
    a, b = data.draw(st.sampled_from(subs)), data.draw(st.sampled_from(subs))
    assert ps.meet(a, b) <= a and ps.meet(a, b) <= b
    assert a <= ps.join(a, b) and b <= ps.join(a, b)
    assert ps.meet(a, ps.join(a, b)) == a
