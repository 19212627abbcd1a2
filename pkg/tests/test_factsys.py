import pytest
from hypothesis import given, settings, strategies as st

from idemcore import factsys as fs
from idemcore import fincat as fc
from idemcore import presheaf as ps
from idemcore.errors import HypothesisError
from idemcore.fixtures import CATEGORY_PRESETS, declared_systems, finset, parallel_pair, poset2, split_idempotent, z2

SMALL = ["terminal", "poset2", "chain3", "parallel_pair", "split_idempotent", "z2", "vee", "wedge"]


def test_epi_orthogonal_to_mono_in_finset():
    C = finset((0, 1, 2))
    for e in fs.epis(C):
        for m in fs.monos(C):
            assert fs.ordinary_orthogonal(C, e, m)
            assert fs.orth_witness(C, e, m) is None


def test_non_orthogonal_has_witness():
    C = finset((1, 2))
    one, two = C.objects
    (t,) = C.hom(two, one)
    # 2 -> 1 is not orthogonal to itself: the identity square has no diagonal
    assert not fs.ordinary_orthogonal(C, t, t)
    assert fs.orth_witness(C, t, t) is not None


@pytest.mark.parametrize("nm", SMALL)
def test_trivial_systems(nm):
    C = CATEGORY_PRESETS[nm]()
    assert fs.iso_all_system(C).E == fs.isos(C)
    assert fs.all_iso_system(C).M == fs.isos(C)


@pytest.mark.parametrize("nm", SMALL)
def test_prefactorization_systems_are_galois_closed(nm):
    C = CATEGORY_PRESETS[nm]()
    systems = fs.enumerate_prefactorization_systems(C)
    assert (fs.isos(C), fs.all_morphisms(C)) in systems
    for E, M in systems:
        assert fs.orth_right(C, E) == M and fs.orth_left(C, M) == E
        assert fs.isos(C) <= E & M


def test_non_system_is_rejected():
    C = poset2()
    f = C.mor("0<1")
    with pytest.raises(HypothesisError):
        fs.check_factorization_system(C, {f}, {f})


@pytest.mark.parametrize("nm", ["parallel_pair", "split_idempotent", "finset12", "z2"])
def test_declared_systems_are_proper_closures(nm):
    C = CATEGORY_PRESETS[nm]()
    for E, M in declared_systems(C):
        fs.check_factorization_system(C, E, M)
        cl = fs.FiniteClosure(C, E, M, E, M)
        assert fs.check_closure_axioms(cl)[0]
        assert fs.check_weakly_hereditary(cl)[0]
        assert fs.clemb_densemb_identity(cl)[0]


def test_reflective_hull_of_top_in_poset2():
    C = poset2()
    top = C.obj("1")
    hull, info = fs.reflective_hull_check(C, {top})
    assert hull == frozenset({top})
    assert info.every_reflective_contains_double_perp
    assert info.smallest_enumerated == hull


@pytest.mark.parametrize("nm", ["poset2", "chain3", "split_idempotent", "z2"])
def test_reflective_subcategories_are_sigma_perp(nm):
    # a reflective subcategory is the class of objects orthogonal to its reflection arrows
    C = CATEGORY_PRESETS[nm]()
    for refl in fc.enumerate_reflective_subcategories(C):
        sigma = frozenset(refl.rho)
        assert fs.sigma_perp_objects(C, sigma) == refl.objects


UNIV = ps.enumerate_presheaves(poset2(), 2)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_presheaf_epi_mono_orthogonal(data):
    X, Y = data.draw(st.sampled_from(UNIV)), data.draw(st.sampled_from(UNIV))
    Z, W = data.draw(st.sampled_from(UNIV)), data.draw(st.sampled_from(UNIV))
    es = [f for f in ps.hom_set(X, Y, limit=50) if ps.is_epi(f)]
    ms = [f for f in ps.hom_set(Z, W, limit=50) if ps.is_mono(f)]
    if es and ms:
        e, m = data.draw(st.sampled_from(es)), data.draw(st.sampled_from(ms))
        assert fs.presheaf_orthogonal(e, m)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_enriched_orthogonality(data):
    # enriched orthogonality is orthogonality of every y(c) x e, and implies the ordinary one
    U = UNIV[:8]
    X, Y, Z, W = (data.draw(st.sampled_from(U)) for _ in range(4))
    es, ms = ps.hom_set(X, Y, limit=20), ps.hom_set(Z, W, limit=20)
    if es and ms:
        e, m = data.draw(st.sampled_from(es)), data.draw(st.sampled_from(ms))
        enr = fs.enriched_orthogonal(e, m)
        assert enr == fs.enriched_orthogonal_tensor(e, m)
        assert not enr or fs.presheaf_orthogonal(e, m)
        f = data.draw(st.sampled_from(es))
        assert fs.enriched_object_orthogonal(f, Z) == fs.enriched_object_orthogonal_tensor(f, Z)


def test_enriched_orthogonality_is_stronger():
    # 0 -> 1 and 0 -> y(0): no map 1 -> y(0), so ordinarily orthogonal;
    # at stage 0 the square y(0) -> y(0) has no lift into 0
    C = poset2()
    zero, one, y0 = ps.empty(C), ps.terminal(C), ps.representable(C, C.obj("0"))
    e, m = ps.from_empty(one), ps.from_empty(y0)
    assert fs.presheaf_orthogonal(e, m)
    assert not fs.enriched_orthogonal(e, m)
    assert not fs.enriched_orthogonal_tensor(e, m)


def test_epi_mono_presheaf_system_factorizes():
    S = fs.epi_mono_system()
    for X in UNIV[:8]:
        for Y in UNIV[:8]:
            for f in ps.hom_set(X, Y, limit=30):
                d, c = S.factorize(f)
                assert S.is_left(d) and S.is_right(c) and ps.compose(c, d) == f
