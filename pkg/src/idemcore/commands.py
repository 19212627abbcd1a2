"""Command implementations returning :class:`~idemcore.report.Report` objects.

Shared by the command-line interface, campaigns inside problem files and the
acceptance suite.
"""

from . import factsys as fs
from . import fincat as fc
from . import lttop as lt
from . import monadcore as mc
from . import presheaf as ps
from .errors import BudgetExceeded, DanglingRef, IdemcoreError
from .report import Check, Report


def _pick(problem, section, ident, what):
    ids = problem.ids(section)
    if ident is not None:
        if ident not in ids:
            raise DanglingRef(f"undefined {what} {ident!r}", ref=ident, section=section)
        return ident
    if len(ids) != 1:
        raise DanglingRef(f"specify which {what} to use ({len(ids)} defined)", section=section, count=len(ids))
    return ids[0]


# -- validate -------------------------------------------------------------------------


def validate(problem, report=None):
    report = report or Report("validate", problem.budgets.as_dict())
    for kind, ident, build in problem.entities():
        name = f"{kind}/{ident}"
        try:
            build()
        except BudgetExceeded:
            raise
        except IdemcoreError as exc:
            report.add(name, False, exc.as_record())
        else:
            report.add(name, True)
    return report


# -- orth / factsys-check ----------------------------------------------------------------


def orth(problem, pair, category=None, enriched=False):
    cat = _pick(problem, "categories", category, "category")
    C = problem.category(cat)
    e, m = C.mor(pair[0]), C.mor(pair[1])
    report = Report(["orth", cat, pair[0], pair[1]] + (["--enriched"] if enriched else []), problem.budgets.as_dict())
    # for finite (Set-enriched) categories enriched and ordinary orthogonality coincide
    w = fs.orth_witness(C, e, m)
    report.add(f"{pair[0]} ⊥ {pair[1]}", w is None, w, enriched=enriched)
    return report


def factsys_check(problem, ident=None):
    report = Report(["factsys-check"] + ([ident] if ident else []), problem.budgets.as_dict())
    ids = [ident] if ident else problem.ids("factsys")
    for fid in ids:
        C, E, M = problem.factsys(fid)
        try:
            fs.check_factorization_system(C, E, M, name=fid)
        except IdemcoreError as exc:
            report.add(f"{fid}: factorization system", False, exc.as_record())
            continue
        report.add(f"{fid}: factorization system", True)
        proper = fs.check_proper(C, E, M)
        report.add(f"{fid}: proper", proper, {"non_epi_E": sorted(C.mor_names[e] for e in E if not fc.is_epi(C, e)),
                                               "non_mono_M": sorted(C.mor_names[m] for m in M if not fc.is_mono(C, m))})
        if not proper:
            continue
        cl = fs.FiniteClosure(C, E, M, E, M)
        ok, w = fs.check_closure_axioms(cl)
        report.add(f"{fid}: closure conditions 1 and 2", ok, w)
        ok, w = fs.check_weakly_hereditary(cl)
        report.add(f"{fid}: closure weakly hereditary", ok, w)
        ok, w = fs.clemb_densemb_identity(cl)
        report.add(f"{fid}: ClEmb = DenseEmb^↓ ∩ M", ok, w)
    return report


# -- core ------------------------------------------------------------------------------------


def core_checks(B, M, E, Mcl, sigma=None, budgets=None, characterize=True):
    """Checks for one monad; ``sigma=None`` runs the idempotent core."""
    out = []
    if sigma is None:
        res = mc.idempotent_core(B, M, E, Mcl, budgets) if budgets else mc.idempotent_core(B, M, E, Mcl)
        out.extend(res.checks)
        if characterize:
            out.extend(mc.verify_core_characterizations(res, budgets) if budgets else mc.verify_core_characterizations(res))
    else:
        res = mc.build_reflection(mc.make_core_input(B, M, E, Mcl, sigma=sigma))
        out.extend(res.checks)
    out.extend(mc.stability_checks(res))
    out.extend(mc.closure_checks(res))
    return res, out


def core(problem, monad=None, sigma=None):
    mid = _pick(problem, "monads", monad, "monad")
    report = Report(["core", mid] + (["--sigma", sigma] if sigma else []), problem.budgets.as_dict())
    M = problem.monad(mid)
    B = M.category
    E, Mcl = problem.monad_factsys(mid)
    sig = problem.sigma(sigma) if sigma else None
    res, checks = core_checks(B, M, E, Mcl, sig, problem.budgets)
    report.extend(checks)
    report.add(
        "reflective subcategory",
        True,
        objects=sorted(B.obj_names[b] for b in res.subcategory),
        reflection={B.obj_names[b]: B.mor_names[res.rho[b]] for b in B.objects},
    )
    return report


# -- topologies --------------------------------------------------------------------------------


def lt_enum_checks(C, budgets):
    tops = lt.enumerate_lt_topologies(C, budgets)
    gts = lt.enumerate_grothendieck_topologies(C, budgets)
    out = [Check("LT and Grothendieck counts agree", "PASS" if len(tops) == len(gts) else "FAIL",
                 None if len(tops) == len(gts) else {"lt": len(tops), "grothendieck": len(gts)},
                 {"lt": len(tops), "grothendieck": len(gts)})]
    bad = []
    for t in tops:
        G = lt.covering_sieves(t)
        if G not in gts or lt.lt_from_grothendieck(G) != t:
            bad.append(t.name)
    for G in gts:
        if lt.covering_sieves(lt.lt_from_grothendieck(G)) != G:
            bad.append(G.describe())
    out.append(Check("round trips j -> J -> j and J -> j -> J are identities", "FAIL" if bad else "PASS", {"topologies": bad} if bad else None))
    return tops, out


def lt_enum(problem, site=None):
    report = Report(["lt-enum"] + ([site] if site else []), problem.budgets.as_dict())
    sites = [site] if site else problem.ids("sites")
    for s in sites:
        C = problem.site_category(s)
        tops, checks = lt_enum_checks(C, problem.budgets)
        report.extend(checks, prefix=f"{s}: ")
        report.add(f"{s}: topologies", True, count=len(tops), topologies={t.name: t.describe() for t in tops})
    return report


def sheafify(problem, presheaf, topology, method="both"):
    report = Report(["sheafify", presheaf, topology, method], problem.budgets.as_dict())
    X = problem.presheaf(presheaf)
    site = problem.doc["presheaves"][presheaf]["site"]
    top = problem.find_topology(topology, site)
    budgets = problem.budgets
    if method == "both":
        core, oracle, iso, checks = lt.sheafify_both(top, X, budgets)
        report.extend(checks)
        report.add("result", True, sizes=list(core.presheaf.sizes), unit=[list(c) for c in core.unit.components])
    elif method == "core":
        core = lt.sheafify_via_core(top, X, budgets)
        report.extend(core.checks)
        report.add("result", True, sizes=list(core.presheaf.sizes), unit=[list(c) for c in core.unit.components])
    else:
        res = lt.sheafify_oracle(top, X, budgets)
        report.add("X++ is a j-sheaf", lt.is_sheaf(top, res.presheaf), lt.sheaf_failure(top, res.presheaf))
        report.add("X -> X++ is j-dense", lt.is_j_dense(top, res.unit))
        report.add("result", True, sizes=list(res.presheaf.sizes), unit=[list(c) for c in res.unit.components])
    return report


def verify_lt(problem, topology, bound=None, site=None):
    top = problem.find_topology(topology, site)
    bound = problem.budgets.sweep_bound if bound is None else bound
    report = Report(["verify-lt", topology, "--bound", bound], problem.budgets.as_dict())
    report.extend(lt.verify_lt_theorem(top, bound, problem.budgets))
    return report


def quasitopos(problem, bisite=None):
    ids = [bisite] if bisite else problem.ids("bisites")
    report = Report(["quasitopos"] + ([bisite] if bisite else []), problem.budgets.as_dict())
    for b in ids:
        C, J, K, bound = problem.bisite(b)
        report.extend(lt.quasitopos_check(C, J, K, bound, problem.budgets), prefix=f"{b}: ")
    return report


# -- campaigns ---------------------------------------------------------------------------------


def run_campaigns(problem):
    report = Report("run", problem.budgets.as_dict())
    for ident in problem.ids("campaigns"):
        c = problem.doc["campaigns"][ident]
        cmd = c["command"]
        if cmd == "validate":
            sub = validate(problem)
        elif cmd == "orth":
            sub = orth(problem, c["pair"], c.get("category"), c.get("enriched", False))
        elif cmd == "factsys-check":
            sub = factsys_check(problem, c.get("factsys"))
        elif cmd == "core":
            sub = core(problem, c["monad"], c.get("sigma"))
        elif cmd == "lt-enum":
            sub = lt_enum(problem, c.get("site"))
        elif cmd == "sheafify":
            sub = sheafify(problem, c["presheaf"], c["topology"], c.get("method", "both"))
        elif cmd == "verify-lt":
            sub = verify_lt(problem, c["topology"], c.get("bound"), c.get("site"))
        else:
            sub = quasitopos(problem, c.get("bisite"))
        report.extend(sub.checks, prefix=f"{ident}: ")
        report.errors.extend(sub.errors)
    return report
