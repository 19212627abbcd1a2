import pytest
from hypothesis import given, settings, strategies as st

from idemcore import fincat as fc
from idemcore.errors import BadIdentity, EndpointMismatch, MissingComposite, NonAssociative, UnknownReference
from idemcore.fixtures import CATEGORY_PRESETS, BROKEN_DOCUMENTS, finset, poset2, split_idempotent, terminal, z2


def test_poset2_shape():
    C = poset2()
    assert len(C.objects) == 2 and len(C.morphisms) == 3
    f = C.mor("0<1")
    assert C.src[f] == C.obj("0") and C.dst[f] == C.obj("1")
    assert C.compose(f, C.identity[C.obj("0")]) == f


@pytest.mark.parametrize("name", sorted(CATEGORY_PRESETS))
def test_presets_validate(name):
    C = CATEGORY_PRESETS[name]()
    for f in C.morphisms:
        assert C.compose(C.identity[C.dst[f]], f) == f
        assert C.compose(f, C.identity[C.src[f]]) == f


@pytest.mark.parametrize(
    "raw, exc",
    [
        ({"objects": ["a", "b"], "morphisms": [["f", "a", "b"], ["g", "b", "a"]]}, MissingComposite),
        ({"objects": ["a"], "morphisms": [["f", "a", "z"]]}, UnknownReference),
    ],
)
def test_rejects(raw, exc):
    with pytest.raises(exc):
        fc.validate_category(raw)


@pytest.mark.parametrize("nm", ["missing_composite", "non_associative", "wrong_endpoints", "identity_not_neutral"])
def test_broken_fixture_kinds(nm):
    doc, kind, _ = BROKEN_DOCUMENTS[nm]
    exc = {"MissingComposite": MissingComposite, "NonAssociative": NonAssociative,
           "EndpointMismatch": EndpointMismatch, "BadIdentity": BadIdentity}[kind]
    raw = next(iter(doc["categories"].values()))
    with pytest.raises(exc):
        fc.validate_category(raw)


def test_mono_epi_in_finset():
    C = finset((1, 2))
    one, two = C.objects
    # the two points 1 -> 2 are mono, the map 2 -> 1 is epi, and neither is iso
    for f in C.hom(one, two):
        assert fc.is_mono(C, f) and not fc.is_epi(C, f)
    (g,) = C.hom(two, one)
    assert fc.is_epi(C, g) and not fc.is_mono(C, g)
    z = z2()
    assert all(fc.is_iso(z, f) for f in z.morphisms)


def test_identity_monad_is_idempotent():
    for build in (terminal, poset2, z2):
        assert fc.is_idempotent_monad(fc.identity_monad(build()))


@pytest.mark.parametrize("build", [terminal, poset2, split_idempotent, z2, lambda: finset((1, 2))])
def test_every_enumerated_monad_is_idempotent(build):
    # in a finite category every monad is idempotent (T^k stabilises, finite monoids are Dedekind-finite)
    C = build()
    monads = fc.enumerate_monads(C)
    assert monads
    assert all(fc.is_idempotent_monad(M) for M in monads)


def test_monad_from_reflection_roundtrip():
    C = poset2()
    for refl in fc.enumerate_reflective_subcategories(C):
        M = fc.reflection_monad(C, refl)
        assert fc.is_idempotent_monad(M)
        back = fc.reflection_of_idempotent_monad(M)
        assert back.objects == refl.objects
        assert fc.monads_equal(fc.reflection_monad(C, back), M)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=4))
def test_random_preorders_are_categories(xs):
    # chains with repeated elements give preorders; composition must be total and associative
    C = fc.category_from_preorder(range(len(xs)), lambda a, b: xs[a] <= xs[b])
    for f in C.morphisms:
        for g in C.out_of(C.dst[f]):
            for h in C.out_of(C.dst[g]):
                assert C.compose(h, C.compose(g, f)) == C.compose(C.compose(h, g), f)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["terminal", "poset2", "z2", "split_idempotent"]))
def test_kleisli_adjunction_induces_the_monad(nm):
    C = CATEGORY_PRESETS[nm]()
    for M in fc.enumerate_monads(C)[:5]:
        _, A = fc.build_kleisli(M)
        assert fc.monads_equal(fc.induced_monad(A), M)
