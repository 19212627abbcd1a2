"""Completion, closure and density relative to a monad on a finite category.

Given a monad ``T`` on ``B``, a proper prefactorization system ``(E, M)`` and a
class ``Σ ⊆ Σ_T``, this module computes the Σ-closed embeddings, the Σ-dense
morphisms, the completion factorization ``η_B = ι_B . ρ_B`` and the reflection
onto Σ-complete T-separated objects.  With ``Σ = Σ_T`` the result is the
idempotent core of ``T``; with ``Σ = ∅`` it is the separated reflection.
"""

from dataclasses import dataclass, field

from . import factsys as fs
from .config import DEFAULT_BUDGETS
from .errors import AssumptionUnavailable, HypothesisError, NonUniqueExtension
from .fincat import (
    FinFunctor,
    FinNatTrans,
    build_kleisli,
    check_monad,
    check_monad_morphism,
    compose_functors,
    enumerate_monad_morphisms,
    enumerate_reflective_subcategories,
    full_subcategory,
    identity_functor,
    inverse,
    is_conservative,
    is_idempotent_monad,
    is_iso,
    make_adjunction,
    monad_isomorphism,
    reflection_monad,
    unique_morphism_from_idempotent,
)
from .report import Check


def sigma_of_functor(F):
    """``Σ_F``: morphisms sent to isomorphisms."""
    return frozenset(f for f in F.source.morphisms if is_iso(F.target, F(f)))


def sigma_T(M, verify_kleisli=True):
    """``Σ_T``; optionally cross-checked against ``Σ_{F_T}`` for the Kleisli left adjoint."""
    out = sigma_of_functor(M.T)
    if verify_kleisli:
        _, adj = build_kleisli(M)
        if sigma_of_functor(adj.F) != out:
            raise AssertionError("Σ_T differs from Σ of the Kleisli left adjoint")
    return out


@dataclass(frozen=True, eq=False)
class CoreInput:
    B: object
    M: object
    E: frozenset
    Mcl: frozenset
    sigma: frozenset
    proper: bool = True


def make_core_input(B, M, E, Mcl, sigma=None, require_proper=True):
    """Validate the standing hypotheses; ``sigma=None`` means ``Σ_T``."""
    E, Mcl = frozenset(E), frozenset(Mcl)
    ok, witness = fs.check_prefactorization(B, E, Mcl)
    if not ok:
        raise HypothesisError("(E, M) is not a prefactorization system", **witness)
    proper = fs.check_proper(B, E, Mcl)
    if require_proper and not proper:
        raise HypothesisError("(E, M) is not proper")
    sT = sigma_T(M)
    sigma = sT if sigma is None else frozenset(sigma)
    extra = sigma - sT
    if extra:
        raise HypothesisError("Σ is not contained in Σ_T", morphism=B.mor_names[min(extra)])
    return CoreInput(B, M, E, Mcl, sigma, proper)


def closed_embeddings(inp):
    """``ClEmb_Σ = Σ^↓ ∩ M``; cross-checked against ``(Σ ∪ E)^↓``."""
    B = inp.B
    out = fs.orth_right(B, inp.sigma) & inp.Mcl
    if out != fs.orth_right(B, inp.sigma | inp.E):
        raise AssertionError("ClEmb_Σ differs from (Σ ∪ E)^↓")
    return out


def dense_morphisms(inp, clemb=None):
    """``Dense_Σ = ClEmb_Σ^↑``."""
    return fs.orth_left(inp.B, closed_embeddings(inp) if clemb is None else clemb)


def check_factorization_assumption(inp):
    """``(True, factorizer)`` or ``(False, witness morphism name)``."""
    B = inp.B
    clemb = closed_embeddings(inp)
    dense = dense_morphisms(inp, clemb)
    table = {}
    for f in B.morphisms:
        found = fs.factor(B, f, dense, clemb)
        if found is None:
            return False, {"morphism": B.mor_names[f]}
        table[f] = found
    return True, table


def is_T_separated(inp, b):
    return inp.M.eta[b] in inp.Mcl


def is_sigma_complete(inp, b):
    return all(fs.object_orthogonal(inp.B, f, b) for f in inp.sigma)


def sep_complete_objects(inp):
    """Objects of ``B_(T,Σ)``."""
    return frozenset(b for b in inp.B.objects if is_sigma_complete(inp, b) and is_T_separated(inp, b))


def completion_factorization(inp, b, classes=None):
    """``(ρ_B, KB, ι_B)`` with ``η_B = ι_B . ρ_B``, least witness first."""
    B = inp.B
    clemb, dense = classes or (closed_embeddings(inp), None)
    if dense is None:
        dense = dense_morphisms(inp, clemb)
    found = fs.factor(B, inp.M.eta[b], dense, clemb)
    if found is None:
        raise AssumptionUnavailable(
            "η has no (Σ-dense, Σ-closed) factorization", object=B.obj_names[b], morphism=B.mor_names[inp.M.eta[b]]
        )
    rho, iota = found
    return rho, B.dst[rho], iota


@dataclass(eq=False)
class CoreResult:
    inp: CoreInput
    dense: frozenset
    closed: frozenset
    K_obj: tuple
    rho: tuple
    iota_components: tuple
    Ttilde: object
    iota: object
    subcategory: frozenset
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def reflective_objects(self):
        return frozenset(self.K_obj)


def _chk(name, ok, witness=None, **detail):
    return Check(name, "PASS" if ok else "FAIL", None if ok else witness, detail)


def build_reflection(inp):
    """Reflection of ``B`` onto ``B_(T,Σ)`` with the completion monad and ``ι``."""
    B, M = inp.B, inp.M
    ok, fac = check_factorization_assumption(inp)
    if not ok:
        raise AssumptionUnavailable("Σ-dense / Σ-closed factorizations do not exist", **fac)
    clemb = closed_embeddings(inp)
    dense = dense_morphisms(inp, clemb)
    rho, K_obj, iota = [], [], []
    for b in B.objects:
        r, kb, i = completion_factorization(inp, b, (clemb, dense))
        rho.append(r)
        K_obj.append(kb)
        iota.append(i)
    K_mor = []
    for f in B.morphisms:
        a, b = B.src[f], B.dst[f]
        target = B.comp[(rho[b], f)]
        ext = [k for k in B.hom(K_obj[a], K_obj[b]) if B.comp[(k, rho[a])] == target]
        if len(ext) != 1:
            raise NonUniqueExtension(
                "K does not extend uniquely along ρ", morphism=B.mor_names[f], candidates=len(ext)
            )
        K_mor.append(ext[0])
    Tt = FinFunctor(B, B, tuple(K_obj), tuple(K_mor))
    mu = []
    for b in B.objects:
        inv = inverse(B, rho[K_obj[b]])
        if inv is None:
            raise NonUniqueExtension("ρ at a completed object is not invertible", object=B.obj_names[b])
        mu.append(inv)
    Ttilde = check_monad(
        Tt,
        FinNatTrans(identity_functor(B), Tt, tuple(rho)),
        FinNatTrans(compose_functors(Tt, Tt), Tt, tuple(mu)),
    )
    iota_nat = FinNatTrans(Tt, M.T, tuple(iota))
    sub = sep_complete_objects(inp)
    res = CoreResult(inp, dense, clemb, tuple(K_obj), tuple(rho), tuple(iota), Ttilde, iota_nat, sub)
    res.checks.extend(_reflection_checks(res))
    return res


def _reflection_checks(res):
    inp, B = res.inp, res.inp.B
    out = []
    out.append(_chk("Ttilde idempotent", is_idempotent_monad(res.Ttilde)))
    bad = [B.obj_names[b] for b in B.objects if res.K_obj[b] not in res.subcategory]
    out.append(_chk("KB is Σ-complete and T-separated", not bad, {"objects": bad}))
    image = frozenset(res.K_obj)
    out.append(
        _chk(
            "image of K is B_(T,Σ) (replete)",
            image <= res.subcategory and all(any(is_iso(B, f) for k in image for f in B.hom(s, k)) for s in res.subcategory),
        )
    )
    # unique factorization of every ρ_B against every object of B_(T,Σ)
    bad = []
    for b in B.objects:
        for t in sorted(res.subcategory):
            if not fs.object_orthogonal(B, res.rho[b], t):
                bad.append((B.obj_names[b], B.obj_names[t]))
    out.append(_chk("ρ_B ⊥ every object of B_(T,Σ)", not bad, {"pairs": bad[:5]}))
    out.append(_chk("ι is a monad morphism", check_monad_morphism(res.Ttilde, inp.M, res.iota)))
    bad = [B.obj_names[b] for b in B.objects if res.iota_components[b] not in res.closed]
    out.append(_chk("ι components Σ-closed", not bad, {"objects": bad}))
    bad = [B.obj_names[b] for b in B.objects if res.rho[b] not in res.dense]
    out.append(_chk("ρ components Σ-dense", not bad, {"objects": bad}))
    uniq = unique_morphism_from_idempotent(res.Ttilde, inp.M)
    out.append(_chk("ι is the unique monad morphism", uniq is not None and uniq == res.iota))
    return out


def separated_reflection(B, M, E, Mcl):
    return build_reflection(make_core_input(B, M, E, Mcl, sigma=frozenset()))


def idempotent_core(B, M, E, Mcl, budgets=DEFAULT_BUDGETS):
    """``build_reflection`` with ``Σ = Σ_T`` plus the core certificates."""
    inp = make_core_input(B, M, E, Mcl)
    res = build_reflection(inp)
    sT = inp.sigma
    checks = res.checks
    checks.append(_chk("Σ_Ttilde = Σ_T", sigma_T(res.Ttilde) == sT))
    b_sigma = fs.sigma_perp_objects(B, sT)
    checks.append(
        _chk(
            "reflective subcategory = B_{Σ_T}",
            res.subcategory == b_sigma,
            {"core": sorted(res.subcategory), "sigma_perp": sorted(b_sigma)},
        )
    )
    bad = [B.obj_names[b] for b in b_sigma if not is_T_separated(inp, b)]
    checks.append(_chk("T-complete ⇒ T-separated", not bad, {"objects": bad}))
    ok, witness = kleisli_factorization(res)
    checks.append(_chk("Kleisli adjunction factors with conservative F'", ok, witness))
    return res


def kleisli_factorization(res):
    """Factor ``F_T -| G_T`` through ``B' ⊂ B`` and test that ``F' = F_T J`` is conservative."""
    B, M = res.inp.B, res.inp.M
    sub_objs = sorted(res.subcategory)
    if not sub_objs and B.objects:
        return False, {"reason": "empty subcategory"}
    Kl, adj = build_kleisli(M)
    bad = [B.obj_names[b] for b in B.objects if adj.G.ob(b) not in res.subcategory]
    if bad:
        return False, {"reason": "G_T leaves B'", "objects": bad}
    Bp, J, ids = full_subcategory(B, sub_objs, name="B'")
    opos = {b: i for i, b in enumerate(sub_objs)}
    mpos = {f: i for i, f in enumerate(ids)}
    Fp = compose_functors(adj.F, J)
    Gp = FinFunctor(
        Kl, Bp, tuple(opos[adj.G.ob(x)] for x in Kl.objects), tuple(mpos[adj.G(k)] for k in Kl.morphisms)
    )
    eta_p = tuple(mpos[M.eta[b]] for b in sub_objs)
    try:
        make_adjunction(Fp, Gp, eta_p, adj.eps.components)
    except Exception as exc:  # the factorization lemma guarantees this
        return False, {"reason": f"F' -| G' fails: {exc}"}
    if not is_conservative(Fp):
        bad = [Bp.mor_names[f] for f in Bp.morphisms if not is_iso(Bp, f) and is_iso(Kl, Fp(f))]
        return False, {"reason": "F' not conservative", "morphisms": bad}
    # F'K ≅ F_T via F_T(ρ)
    bad = [B.obj_names[b] for b in B.objects if not is_iso(Kl, adj.F(res.rho[b]))]
    if bad:
        return False, {"reason": "F_T does not invert ρ", "objects": bad}
    return True, None


def verify_core_characterizations(res, budgets=DEFAULT_BUDGETS, exhaustive_morphisms=True):
    """The equivalences characterizing the idempotent core, as a list of checks."""
    inp, B, M = res.inp, res.inp.B, res.inp.M
    out = []
    sT = sigma_T(M)
    sub = res.subcategory
    refls = enumerate_reflective_subcategories(B, budgets)
    over_T, over_core = [], []
    for r in refls:
        S = reflection_monad(B, r)
        a = unique_morphism_from_idempotent(S, M)
        b = unique_morphism_from_idempotent(S, res.Ttilde)
        if exhaustive_morphisms:
            if (a is None) != (not enumerate_monad_morphisms(S, M)):
                out.append(_chk("monad morphism search agrees with brute force", False, {"subcategory": sorted(r.objects)}))
        over_T.append(a is not None)
        over_core.append(b is not None)
    ok = all(x == y for x, y in zip(over_T, over_core))
    out.append(_chk("Ttilde terminal among idempotent monads over T", ok))
    out.append(_chk("B' = B_{Σ_T}", sub == fs.sigma_perp_objects(B, sT)))
    fok, witness = kleisli_factorization(res)
    out.append(_chk("conservative factorization of the Kleisli adjunction", fok, witness))
    t_obs = frozenset(M.T.ob(b) for b in B.objects)
    hull, info = fs.reflective_hull_check(B, t_obs, budgets)
    out.append(_chk("reflective hull of T(Ob B) = B'", hull == sub and info.smallest_enumerated == sub,
                    {"hull": sorted(hull) if hull is not None else None, "core": sorted(sub)}))
    Kl, adj = build_kleisli(M)
    g_obs = frozenset(adj.G.ob(x) for x in Kl.objects)
    hull_g, _ = fs.reflective_hull_check(B, g_obs, budgets)
    out.append(_chk("reflective hull of G(Ob Kl) = B'", hull_g == sub))
    two = fs.sigma_perp_objects(B, sigma_of_functor(adj.F))
    out.append(_chk("Σ_T^⊥ agrees when computed from Σ_{F_T}", two == fs.sigma_perp_objects(B, sT)))
    return out


def stability_checks(res, clemb_composition=True):
    """Per-instance checks of the Σ-dense / Σ-closed stability properties."""
    inp, B = res.inp, res.inp.B
    dense, closed = res.dense, res.closed
    out = []
    out.append(_chk("E ⊆ Dense_Σ", inp.E <= dense))
    out.append(_chk("Σ ⊆ Dense_Σ", inp.sigma <= dense))
    bad_second, bad_first, bad_comp = [], [], []
    for f in B.morphisms:
        for g in B.out_of(B.dst[f]):
            gf = B.comp[(g, f)]
            if gf in dense and g not in dense:
                bad_second.append((B.mor_names[f], B.mor_names[g]))
            if gf in closed and g in closed and f not in closed:
                bad_first.append((B.mor_names[f], B.mor_names[g]))
            if f in closed and g in closed and gf not in closed:
                bad_comp.append((B.mor_names[f], B.mor_names[g]))
    out.append(_chk("second factor of a dense composite is dense", not bad_second, {"pairs": bad_second[:5]}))
    out.append(_chk("first factor of closed composites is closed", not bad_first, {"pairs": bad_first[:5]}))
    out.append(_chk("ClEmb_Σ closed under composition", not bad_comp, {"pairs": bad_comp[:5]}))
    bad = [B.mor_names[f] for f in dense & closed if not is_iso(B, f)]
    out.append(_chk("dense and closed ⇒ iso", not bad, {"morphisms": bad}))
    bad = []
    for f in B.morphisms:
        for n in closed:
            if B.dst[n] != B.dst[f]:
                continue
            pb = fs.find_pullback(B, f, n)
            if pb is not None and pb[0] not in closed:
                bad.append((B.mor_names[f], B.mor_names[n]))
    out.append(_chk("ClEmb_Σ stable under existing pullbacks", not bad, {"pairs": bad[:5]}))
    # Kleisli-side statements
    Kl, adj = build_kleisli(inp.M)
    bad = []
    for f in dense:
        Ff = adj.F(f)
        if _is_section(Kl, Ff) and not is_iso(Kl, Ff):
            bad.append(B.mor_names[f])
    out.append(_chk("dense f with F_T f a section ⇒ F_T f iso", not bad, {"morphisms": bad}))
    sF = sigma_of_functor(adj.F)
    bad = [B.obj_names[b] for b in B.objects if res.rho[b] not in sF]
    out.append(_chk("ρ_B ∈ Σ_{F_T}", not bad, {"objects": bad}))
    # separated (resp. complete+separated) iff an M (resp. closed M) embedding into some TC exists
    t_obs = {inp.M.T.ob(c) for c in B.objects}
    bad = []
    for b in B.objects:
        has_m = any(m in inp.Mcl for t in t_obs for m in B.hom(b, t))
        has_c = any(m in closed for t in t_obs for m in B.hom(b, t))
        if has_m != is_T_separated(inp, b):
            bad.append((B.obj_names[b], "separated"))
        if has_c != (is_T_separated(inp, b) and is_sigma_complete(inp, b)):
            bad.append((B.obj_names[b], "complete+separated"))
    out.append(_chk("separated ⇔ M-embedding into some TC", not bad, {"objects": bad}))
    # B' ↣ B with B complete: B' complete ⇔ m Σ-closed
    bad = []
    for m in inp.Mcl:
        b = B.dst[m]
        if is_sigma_complete(inp, b):
            if is_sigma_complete(inp, B.src[m]) != (m in closed):
                bad.append(B.mor_names[m])
    out.append(_chk("embedded subobject of a complete object: complete ⇔ closed", not bad, {"morphisms": bad}))
    bad = [B.obj_names[c] for c in t_obs if not (is_sigma_complete(inp, c) and is_T_separated(inp, c))]
    out.append(_chk("TB is Σ-complete and T-separated", not bad, {"objects": bad}))
    return out


def _is_section(C, f):
    return any(C.comp[(g, f)] == C.identity[C.src[f]] for g in C.hom(C.dst[f], C.src[f]))


def closure_checks(res):
    """The closure-operator suite for ``(Dense_Σ, ClEmb_Σ)``."""
    inp = res.inp
    cl = fs.FiniteClosure(inp.B, inp.E, inp.Mcl, res.dense, res.closed)
    out = []
    ok, w = fs.check_closure_axioms(cl)
    out.append(_chk("closure conditions 1 and 2", ok, w))
    ok, w = fs.check_weakly_hereditary(cl)
    out.append(_chk("closure weakly hereditary", ok, w))
    ok, w = fs.clemb_densemb_identity(cl)
    out.append(_chk("ClEmb = DenseEmb^↓ ∩ M", ok, w))
    # T-closure via the factorization system matches the completion data on every embedding
    bad = []
    for m in inp.Mcl:
        c1 = fs.closure_from_factsys(cl, m)
        d, c = fs.factor(inp.B, m, res.dense, res.closed)
        if not cl.equiv(c1, c):
            bad.append(inp.B.mor_names[m])
    out.append(_chk("Σ-closure agrees with closure_from_factsys", not bad, {"morphisms": bad}))
    return out


def core_is_isomorphic_to(res, M):
    """For idempotent ``M``: an explicit monad iso ``Ttilde ≅ M`` or ``None``."""
    return monad_isomorphism(res.Ttilde, M)
