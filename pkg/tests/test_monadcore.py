import pytest
from hypothesis import given, settings, strategies as st

from idemcore import factsys as fs
from idemcore import fincat as fc
from idemcore import monadcore as mc
from idemcore.errors import HypothesisError
from idemcore.fixtures import core_instances, poset2, terminal

INSTANCES = [(label, C, E, M, T) for label, C, E, M in core_instances() for T in fc.enumerate_monads(C)]


def _ids(xs):
    return [f"{x[0]}/{i}" for i, x in enumerate(xs)]


def test_identity_monad_core_is_everything():
    C = poset2()
    T = fc.identity_monad(C)
    res = mc.idempotent_core(C, T, fs.isos(C), fs.all_morphisms(C))
    assert res.ok
    assert res.subcategory == frozenset(C.objects)
    assert mc.sigma_T(T) == fs.isos(C)


def test_reflection_monad_core_on_poset2():
    C = poset2()
    top = C.obj("1")
    refl = next(r for r in fc.enumerate_reflective_subcategories(C) if r.objects == {top})
    T = fc.reflection_monad(C, refl)
    res = mc.idempotent_core(C, T, fs.isos(C), fs.all_morphisms(C))
    assert res.ok
    assert res.subcategory == frozenset({top})
    assert mc.sigma_T(T) == fs.all_morphisms(C)
    assert mc.core_is_isomorphic_to(res, T) is not None


def test_non_proper_system_rejected():
    C = poset2()
    f = C.mor("0<1")
    with pytest.raises(HypothesisError):
        mc.make_core_input(C, fc.identity_monad(C), {f}, {f})


@pytest.mark.parametrize("inst", INSTANCES, ids=_ids(INSTANCES))
def test_core_certificates(inst):
    label, C, E, M, T = inst
    res = mc.idempotent_core(C, T, E, M)
    checks = res.checks + mc.verify_core_characterizations(res) + mc.stability_checks(res) + mc.closure_checks(res)
    bad = [(c.name, c.witness) for c in checks if not c.ok]
    assert not bad
    # idempotent input: the core is the monad itself
    assert fc.is_idempotent_monad(T)
    assert mc.core_is_isomorphic_to(res, T) is not None
    # the core is idempotent and has the same inverted morphisms
    assert fc.is_idempotent_monad(res.Ttilde)
    assert mc.sigma_T(res.Ttilde) == mc.sigma_T(T)


@pytest.mark.parametrize("inst", INSTANCES, ids=_ids(INSTANCES))
def test_separated_reflection(inst):
    label, C, E, M, T = inst
    res = mc.separated_reflection(C, T, E, M)
    assert res.ok
    inp = res.inp
    # reflective objects are T-separated, and reflections are idempotent
    assert all(mc.is_T_separated(inp, b) for b in res.subcategory)
    for b in C.objects:
        assert C.dst[res.rho[b]] in res.subcategory


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(INSTANCES))
def test_completion_factorization_property(inst):
    # rho_B is dense, iota is closed, and eta = iota . rho
    label, C, E, M, T = inst
    res = mc.idempotent_core(C, T, E, M)
    for b in C.objects:
        assert res.rho[b] in res.dense
        assert res.iota_components[b] in res.closed
        assert C.compose(res.iota_components[b], res.rho[b]) == T.eta[b]


def test_terminal_category():
    C = terminal()
    (T,) = fc.enumerate_monads(C)
    res = mc.idempotent_core(C, T, fs.isos(C), fs.all_morphisms(C))
    assert res.ok and res.subcategory == frozenset(C.objects)
