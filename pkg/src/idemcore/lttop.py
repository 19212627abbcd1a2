"""Lawvere–Tierney topologies on finite presheaf toposes and sheafification.

Sheafification is computed two independent ways:

* the plus construction applied twice (the oracle);
* the j-closure of the image of the unit of the double-dualization monad
  ``T X = Ω_j^(Ω_j^X)``.  ``T X`` is far too large to enumerate, so its
  elements are handled as tables of values ``t_d(k, φ)`` and the closure is
  built by amalgamating matching families of image elements (``T X`` is a
  sheaf, so amalgamations exist and are unique).
"""

from dataclasses import dataclass, field
from functools import lru_cache
import random

from . import factsys as fs
from . import presheaf as ps
from .config import DEFAULT_BUDGETS
from .errors import BudgetExceeded, NonUniqueExtension, TopologyError
from .report import Check


def _chk(name, ok, witness=None, **detail):
    return Check(name, "PASS" if ok else "FAIL", None if ok else witness, detail)


# -- topologies ---------------------------------------------------------------------


class LTTopology:
    """``j: Ω -> Ω`` with its covering sieves ``J(c) = {S : j_c(S) = max}``."""

    def __init__(self, base, j, name=None):
        self.base = base
        self.j = j
        self.name = name
        self.O = ps.omega_data(base)
        self.jidx = j.components
        O = self.O
        self.J = tuple(
            frozenset(O.sieves[c][i] for i in range(len(O.sieves[c])) if self.jidx[c][i] == O.top[c])
            for c in base.objects
        )

    def covers(self, c, S):
        return frozenset(S) in self.J[c]

    def apply(self, c, S):
        O = self.O
        return O.sieves[c][self.jidx[c][O.pos[c][frozenset(S)]]]

    def key(self):
        return self.jidx

    def __eq__(self, other):
        return isinstance(other, LTTopology) and self.base == other.base and self.jidx == other.jidx

    def __hash__(self):
        return hash(self.jidx)

    def __repr__(self):
        return f"<LTTopology {self.name or self.jidx}>"

    def describe(self):
        C = self.base
        return {
            C.obj_names[c]: sorted(sorted(C.mor_names[f] for f in S) for S in self.J[c]) for c in C.objects
        }


def _sieve_names(C, S):
    return sorted(C.mor_names[f] for f in S)


def lt_axiom_failure(base, j):
    """Witness of the first failing axiom, or ``None``."""
    O = ps.omega_data(base)
    C = base
    jc = j.components
    for c in C.objects:
        if jc[c][O.top[c]] != O.top[c]:
            return {"axiom": "j.true = true", "object": C.obj_names[c]}
    for c in C.objects:
        for i in range(len(O.sieves[c])):
            if jc[c][jc[c][i]] != jc[c][i]:
                return {"axiom": "j.j = j", "object": C.obj_names[c], "sieve": _sieve_names(C, O.sieves[c][i])}
    for c in C.objects:
        n = len(O.sieves[c])
        for i in range(n):
            for k in range(i + 1, n):
                lhs = jc[c][O.meet_index(c, i, k)]
                rhs = O.meet_index(c, jc[c][i], jc[c][k])
                if lhs != rhs:
                    return {
                        "axiom": "j preserves meets",
                        "object": C.obj_names[c],
                        "sieves": [_sieve_names(C, O.sieves[c][i]), _sieve_names(C, O.sieves[c][k])],
                    }
    return None


def check_lt_axioms(base, j, name=None):
    """``LTTopology`` or ``None``; use :func:`lt_axiom_failure` for the witness."""
    Om, _ = ps.omega(base)
    if j.src != Om or j.dst != Om:
        raise TopologyError("j must be an endomorphism of Omega")
    if lt_axiom_failure(base, j) is not None:
        return None
    return LTTopology(base, j, name)


def _check_base(base, budgets):
    if len(base.objects) > budgets.base_max_objects or len(base.morphisms) > budgets.base_max_morphisms:
        raise BudgetExceeded(
            "base category exceeds the topology budget", objects=len(base.objects), morphisms=len(base.morphisms)
        )


def _topology_order(t):
    return (sum(len(s) for s in t.J), t.jidx)


def enumerate_lt_topologies(base, budgets=DEFAULT_BUDGETS):
    """Every LT topology, from the smallest (identity) to the largest."""
    _check_base(base, budgets)
    O = ps.omega_data(base)
    fixed = {(c, O.top[c]): O.top[c] for c in base.objects}
    out = []
    for j in ps.iter_homs(O.presheaf, O.presheaf, fixed=fixed):
        if lt_axiom_failure(base, j) is None:
            out.append(LTTopology(base, j))
    out.sort(key=_topology_order)
    for i, t in enumerate(out):
        t.name = f"j{i}"
    return out


def identity_topology(base):
    O = ps.omega_data(base)
    return LTTopology(base, ps.identity_map(O.presheaf), "id")


def top_topology(base):
    """Everything covers: ``j = true . !``."""
    O = ps.omega_data(base)
    comps = tuple((O.top[c],) * len(O.sieves[c]) for c in base.objects)
    return LTTopology(base, ps.PresheafMap.trusted(O.presheaf, O.presheaf, comps), "all")


@dataclass(frozen=True)
class GrothendieckTopology:
    base: object
    covers: tuple

    def describe(self):
        C = self.base
        return {C.obj_names[c]: sorted(_sieve_names(C, S) for S in self.covers[c]) for c in C.objects}


def grothendieck_failure(base, covers):
    C = base
    O = ps.omega_data(C)
    for c in C.objects:
        if O.maximal(c) not in covers[c]:
            return {"axiom": "maximal sieve covers", "object": C.obj_names[c]}
    for c in C.objects:
        for S in covers[c]:
            for f in C.into(c):
                if O.pullback_sieve(f, S) not in covers[C.src[f]]:
                    return {"axiom": "stability", "object": C.obj_names[c], "sieve": _sieve_names(C, S), "morphism": C.mor_names[f]}
    for c in C.objects:
        for S in covers[c]:
            for R in O.sieves[c]:
                if R in covers[c]:
                    continue
                if all(O.pullback_sieve(f, R) in covers[C.src[f]] for f in S):
                    return {"axiom": "transitivity", "object": C.obj_names[c], "sieve": _sieve_names(C, S), "local": _sieve_names(C, R)}
    return None


def enumerate_grothendieck_topologies(base, budgets=DEFAULT_BUDGETS):
    """Direct enumeration over per-object families of sieves."""
    _check_base(base, budgets)
    C = base
    O = ps.omega_data(C)
    options = []
    for c in C.objects:
        others = [S for S in O.sieves[c] if S != O.maximal(c)]
        opts = []
        for mask in range(1 << len(others)):
            opts.append(frozenset([O.maximal(c)] + [others[i] for i in range(len(others)) if mask >> i & 1]))
        options.append(opts)
    out = []

    def rec(i, chosen):
        if i == len(C.objects):
            covers = tuple(chosen)
            if grothendieck_failure(C, covers) is None:
                out.append(GrothendieckTopology(C, covers))
            return
        for opt in options[i]:
            chosen.append(opt)
            rec(i + 1, chosen)
            chosen.pop()

    rec(0, [])
    return out


def covering_sieves(top):
    return GrothendieckTopology(top.base, top.J)


def lt_from_grothendieck(G, name=None):
    """``j_c(S) = {f : f*S ∈ J(dom f)}``."""
    C = G.base
    O = ps.omega_data(C)
    comps = []
    for c in C.objects:
        row = []
        for S in O.sieves[c]:
            jS = frozenset(f for f in C.into(c) if O.pullback_sieve(f, S) in G.covers[C.src[f]])
            row.append(O.pos[c][jS])
        comps.append(tuple(row))
    return LTTopology(C, ps.PresheafMap(O.presheaf, O.presheaf, comps), name)


# -- Ω_j and closure ------------------------------------------------------------------


@dataclass(eq=False)
class OmegaJ:
    presheaf: object
    s: object
    r: object
    sub: object


def omega_j(top):
    """Fixed points of ``j`` with section ``s`` and retraction ``r``."""
    O = top.O
    C = top.base
    sub = ps.Subpresheaf(
        O.presheaf, [frozenset(i for i in range(len(O.sieves[c])) if top.jidx[c][i] == i) for c in C.objects]
    )
    P, s = sub.as_presheaf()
    pos = [{y: i for i, y in enumerate(sc)} for sc in s.components]
    r = ps.PresheafMap(O.presheaf, P, [tuple(pos[c][top.jidx[c][i]] for i in range(len(O.sieves[c]))) for c in C.objects])
    return OmegaJ(P, s, r, sub)


_OJ_CACHE = {}


def omega_j_cached(top):
    key = (top.base.signature(), top.jidx)
    if key not in _OJ_CACHE:
        _OJ_CACHE[key] = omega_j(top)
    return _OJ_CACHE[key]


def j_closure(top, m):
    """``x ∈ cl(m)(c)`` iff ``j_c(χ_m(x))`` is maximal."""
    X = m.ambient
    C = X.base
    out = []
    for c in C.objects:
        keep = set()
        into = C.into(c)
        for x in range(X.sizes[c]):
            if x in m.subset[c]:
                keep.add(x)
                continue
            chi = frozenset(f for f in into if X.restrict[f][x] in m.subset[C.src[f]])
            if chi in top.J[c]:
                keep.add(x)
        out.append(frozenset(keep))
    return ps.Subpresheaf(X, out, check=False)


def j_closure_via_classifier(top, m):
    """``subobject_of(j . χ_m)``: the literal definition (used as a cross-check)."""
    return ps.subobject_of(ps.compose(top.j, ps.characteristic_map(m)))


def is_j_dense(top, f):
    return j_closure(top, ps.image(f)).is_full()


def is_j_closed(top, m):
    if isinstance(m, ps.PresheafMap):
        if not ps.is_mono(m):
            return False
        m = ps.image(m)
    return j_closure(top, m) == m


def closure_operator(top):
    return lambda m: j_closure(top, m)


def j_factorization_system(top):
    return fs.closure_system(closure_operator(top), f"(Dense_{top.name}, ClEmb_{top.name})")


# -- matching families ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _sieve_presheaf(base, c, S):
    y = ps.representable(base, c)
    sub = ps.Subpresheaf(
        y, [frozenset(i for i, g in enumerate(y.labels[d]) if g in S) for d in base.objects], check=False
    )
    P, _ = sub.as_presheaf()
    return P


def sieve_presheaf(base, c, S):
    """The sieve ``S`` on ``c`` as a sub-presheaf of ``y(c)``; labels are morphism ids."""
    return _sieve_presheaf(base, c, frozenset(S))


def matching_families(base, c, S, X):
    """Matching families for ``S`` in ``X``, as maps ``S -> X``."""
    return ps.hom_set(sieve_presheaf(base, c, S), X)


def family_of(base, c, S, X, x):
    Sp = sieve_presheaf(base, c, S)
    return tuple(tuple(X.restrict[g][x] for g in Sp.labels[d]) for d in base.objects)


def sheaf_failure(top, X, separated_only=False):
    """First covering sieve where ``X(c) -> Match(S, X)`` is not injective (resp. bijective)."""
    C = top.base
    for c in C.objects:
        for S in sorted(top.J[c], key=lambda s: (len(s), sorted(s))):
            fams = {family_of(C, c, S, X, x) for x in range(X.sizes[c])}
            if len(fams) != X.sizes[c]:
                return {"object": C.obj_names[c], "sieve": _sieve_names(C, S), "reason": "not separated"}
            if not separated_only:
                n = len(matching_families(C, c, S, X))
                if n != X.sizes[c]:
                    return {"object": C.obj_names[c], "sieve": _sieve_names(C, S), "reason": "matching family without amalgamation"}
    return None


def is_separated(top, X):
    return sheaf_failure(top, X, separated_only=True) is None


def is_sheaf(top, X):
    return sheaf_failure(top, X) is None


# -- plus construction ---------------------------------------------------------------------


@dataclass(eq=False)
class PlusData:
    source: object
    presheaf: object
    unit: object
    class_of: list
    reps: list


def _sieve_key(S):
    return (len(S), sorted(S))


def plus_construction(top, X, budgets=DEFAULT_BUDGETS):
    """``X⁺`` with its unit; two families are identified iff they agree on a covering sieve."""
    C = top.base
    pairs, class_of, reps = [], [], []
    for c in C.objects:
        cls, rp = {}, []
        for S in sorted(top.J[c], key=_sieve_key):
            Sp = sieve_presheaf(C, c, S)
            for h in ps.iter_homs(Sp, X):
                fam = tuple(sorted((Sp.labels[d][i], h.components[d][i]) for d in C.objects for i in range(Sp.sizes[d])))
                p = (S, fam)
                if p in cls:
                    continue
                da = dict(fam)
                for ci, (T, fb) in enumerate(rp):
                    db = dict(fb)
                    agree = frozenset(f for f in S & T if da[f] == db[f])
                    if agree in top.J[c]:
                        cls[p] = ci
                        break
                else:
                    cls[p] = len(rp)
                    rp.append(p)
                if len(rp) > budgets.exponential_max_elements:
                    raise BudgetExceeded("plus construction too large", limit=budgets.exponential_max_elements)
        class_of.append(cls)
        reps.append(rp)
    O = top.O
    restrict = []
    for f in C.morphisms:
        d, c = C.src[f], C.dst[f]
        row = []
        for S, fam in reps[c]:
            da = dict(fam)
            S2 = O.pullback_sieve(f, S)
            fam2 = tuple(sorted((g, da[C.comp[(f, g)]]) for g in S2))
            row.append(class_of[d][(S2, fam2)])
        restrict.append(tuple(row))
    Xp = ps.Presheaf(C, [len(r) for r in reps], restrict, labels=reps, name=f"{X.name or 'X'}+")
    unit = []
    for c in C.objects:
        full = O.maximal(c)
        row = []
        for x in range(X.sizes[c]):
            fam = tuple(sorted((g, X.restrict[g][x]) for g in full))
            row.append(class_of[c][(full, fam)])
        unit.append(tuple(row))
    return PlusData(X, Xp, ps.PresheafMap(X, Xp, unit), class_of, reps)


def plus_map(top, h, PX, PY):
    """``h⁺: X⁺ -> Y⁺``."""
    C = top.base
    comps = []
    for c in C.objects:
        row = []
        for S, fam in PX.reps[c]:
            fam2 = tuple((g, h.components[C.src[g]][v]) for g, v in fam)
            row.append(PY.class_of[c][(S, fam2)])
        comps.append(tuple(row))
    return ps.PresheafMap(PX.presheaf, PY.presheaf, comps)


@dataclass(eq=False)
class SheafResult:
    presheaf: object
    unit: object
    stages: tuple = ()


def sheafify_oracle(top, X, budgets=DEFAULT_BUDGETS):
    P1 = plus_construction(top, X, budgets)
    P2 = plus_construction(top, P1.presheaf, budgets)
    return SheafResult(P2.presheaf, ps.compose(P2.unit, P1.unit), (P1, P2))


def oracle_map(top, h, RX, RY):
    """Functorial action of the oracle on ``h: X -> Y``."""
    (P1x, P2x), (P1y, P2y) = RX.stages, RY.stages
    return plus_map(top, plus_map(top, h, P1x, P1y), P2x, P2y)


# -- double dualization ----------------------------------------------------------------------


class DoubleDual:
    """``T X = Ω_k^(Ω_k^X)`` for the topology ``top`` with lazily tabulated elements.

    An element of ``T X(c)`` is stored in the component format of
    :class:`~idemcore.presheaf.Exponential`: per object ``d`` a tuple indexed by
    ``(k: d -> c, φ ∈ Ω_k^X(d))``.
    """

    def __init__(self, top, X, budgets=DEFAULT_BUDGETS):
        if max(X.sizes, default=0) > budgets.dd_eta_carrier_max:
            raise BudgetExceeded("presheaf too large for double dualization", sizes=list(X.sizes), limit=budgets.dd_eta_carrier_max)
        self.top, self.X, self.base = top, X, top.base
        self.OJ = omega_j_cached(top)
        self.Oj = self.OJ.presheaf
        self.E1 = ps.exponential(X, self.Oj, budgets)
        self.P = self.E1.presheaf
        C = self.base
        self._hom_pos = {(d, c): {g: i for i, g in enumerate(C.hom(d, c))} for d in C.objects for c in C.objects}

    def eta(self, c, x):
        C, X, P, E1 = self.base, self.X, self.P, self.E1
        out = []
        for d in C.objects:
            row = []
            for g in C.hom(d, c):
                xg = X.restrict[g][x]
                for phi in range(P.sizes[d]):
                    row.append(E1.ev(d, phi, xg))
            out.append(tuple(row))
        return tuple(out)

    def value(self, c, t, d, g, phi):
        return t[d][self._hom_pos[(d, c)][g] * self.P.sizes[d] + phi]

    def restrict(self, f, t):
        """``T X(f) t`` for ``f: c' -> c``."""
        C, P = self.base, self.P
        c = C.dst[f]
        cp = C.src[f]
        out = []
        for d in C.objects:
            n = P.sizes[d]
            pos = self._hom_pos[(d, c)]
            row = []
            for g in C.hom(d, cp):
                base_i = pos[C.comp[(f, g)]] * n
                row.extend(t[d][base_i:base_i + n])
            out.append(tuple(row))
        return tuple(out)

    def naturality_failure(self, c, t):
        C, P, Oj = self.base, self.P, self.Oj
        for f in C.morphisms:
            e, d = C.src[f], C.dst[f]
            for g in C.hom(d, c):
                gf = C.comp[(g, f)]
                for phi in range(P.sizes[d]):
                    lhs = Oj.restrict[f][self.value(c, t, d, g, phi)]
                    rhs = self.value(c, t, e, gf, P.restrict[f][phi])
                    if lhs != rhs:
                        return {"object": C.obj_names[c], "morphism": C.mor_names[f]}
        return None

    def amalgamate(self, c, S, family):
        """The unique element of ``T X(c)`` restricting to ``family[k]`` along every ``k ∈ S``."""
        C, P, Oj = self.base, self.P, self.Oj
        O = self.top.O
        out = []
        for d in C.objects:
            n = P.sizes[d]
            row = []
            idd = C.identity[d]
            for g in C.hom(d, c):
                if g in S:
                    u = family[g]
                    row.extend(self.value(d, u, d, idd, phi) for phi in range(n))
                    continue
                pulled = O.pullback_sieve(g, S)
                for phi in range(n):
                    wanted = []
                    for h in pulled:
                        e = C.src[h]
                        gh = C.comp[(g, h)]
                        wanted.append((h, self.value(e, family[gh], e, C.identity[e], P.restrict[h][phi])))
                    found = [s for s in range(Oj.sizes[d]) if all(Oj.restrict[h][s] == v for h, v in wanted)]
                    if len(found) != 1:
                        raise NonUniqueExtension(
                            "matching family in T X without a unique amalgamation",
                            object=C.obj_names[c], candidates=len(found),
                        )
                    row.append(found[0])
            out.append(tuple(row))
        return tuple(out)

    def eta_is_mono(self):
        return all(len({self.eta(c, x) for x in range(self.X.sizes[c])}) == self.X.sizes[c] for c in self.base.objects)


def double_dualization_monad(top, X, budgets=DEFAULT_BUDGETS):
    return DoubleDual(top, X, budgets)


@dataclass(eq=False)
class CoreSheafResult:
    presheaf: object
    unit: object
    tables: list
    dd: object
    checks: list = field(default_factory=list)


def closure_of_eta_image(cover_top, dd, name=None):
    """The ``cover_top``-closure of the image of ``η`` inside ``T X``.

    ``cover_top`` must be contained in the topology used for dualization.
    """
    C, X = dd.base, dd.X
    img = [[] for _ in C.objects]
    img_pos = [{} for _ in C.objects]
    unit_tables = []
    for c in C.objects:
        row = []
        for x in range(X.sizes[c]):
            t = dd.eta(c, x)
            if t not in img_pos[c]:
                img_pos[c][t] = len(img[c])
                img[c].append(t)
            row.append(t)
        unit_tables.append(row)
    restrict = []
    for f in C.morphisms:
        restrict.append(tuple(img_pos[C.src[f]][dd.restrict(f, t)] for t in img[C.dst[f]]))
    I = ps.Presheaf(C, [len(r) for r in img], restrict, check=False)
    tables = [[] for _ in C.objects]
    pos = [{} for _ in C.objects]
    for c in C.objects:
        for t in img[c]:
            pos[c][t] = len(tables[c])
            tables[c].append(t)
    for c in C.objects:
        for S in sorted(cover_top.J[c], key=_sieve_key):
            Sp = sieve_presheaf(C, c, S)
            for h in ps.iter_homs(Sp, I):
                family = {}
                for d in C.objects:
                    for i, k in enumerate(Sp.labels[d]):
                        family[k] = img[d][h.components[d][i]]
                t = dd.amalgamate(c, S, family)
                if t not in pos[c]:
                    pos[c][t] = len(tables[c])
                    tables[c].append(t)
    restrict = []
    for f in C.morphisms:
        d, c = C.src[f], C.dst[f]
        row = []
        for t in tables[c]:
            rt = dd.restrict(f, t)
            if rt not in pos[d]:
                raise NonUniqueExtension("closure of the image is not closed under restriction", morphism=C.mor_names[f])
            row.append(pos[d][rt])
        restrict.append(tuple(row))
    aX = ps.Presheaf(C, [len(t) for t in tables], restrict, name=name or f"a({X.name or 'X'})")
    unit = ps.PresheafMap(X, aX, [tuple(pos[c][t] for t in unit_tables[c]) for c in C.objects])
    return aX, unit, tables


def sheafify_via_core(top, X, budgets=DEFAULT_BUDGETS):
    """``aX`` as the j-closure of ``im η_X`` in the double dual, with certificates."""
    dd = DoubleDual(top, X, budgets)
    aX, unit, tables = closure_of_eta_image(top, dd)
    res = CoreSheafResult(aX, unit, tables, dd)
    bad = None
    for c in top.base.objects:
        for t in tables[c]:
            bad = dd.naturality_failure(c, t)
            if bad:
                break
        if bad:
            break
    res.checks.append(_chk("closure elements are natural (lie in T X)", bad is None, bad, claim="instance"))
    res.checks.append(_chk("aX is a j-sheaf", is_sheaf(top, aX), sheaf_failure(top, aX), claim="instance"))
    res.checks.append(_chk("unit is j-dense", is_j_dense(top, unit), claim="instance"))
    return res


def find_unit_iso(A, uA, B, uB):
    """An iso ``φ: A -> B`` with ``φ . uA = uB``, or ``None``."""
    if A.sizes != B.sizes:
        return None
    fixed = {}
    for c in A.base.objects:
        for x, a in enumerate(uA.components[c]):
            b = uB.components[c][x]
            if fixed.get((c, a), b) != b:
                return None
            fixed[(c, a)] = b
    return ps.find_map(A, B, fixed=fixed, injective=True)


def sheafify_both(top, X, budgets=DEFAULT_BUDGETS):
    """Run both constructions and exhibit the iso between them."""
    core = sheafify_via_core(top, X, budgets)
    oracle = sheafify_oracle(top, X, budgets)
    checks = list(core.checks)
    checks.append(_chk("X++ is a j-sheaf", is_sheaf(top, oracle.presheaf), sheaf_failure(top, oracle.presheaf)))
    checks.append(_chk("X -> X++ is j-dense", is_j_dense(top, oracle.unit)))
    iso = find_unit_iso(core.presheaf, core.unit, oracle.presheaf, oracle.unit)
    checks.append(
        _chk(
            "aX ≅ X++ compatibly with units",
            iso is not None,
            {"core_sizes": list(core.presheaf.sizes), "oracle_sizes": list(oracle.presheaf.sizes)},
            iso=[list(c) for c in iso.components] if iso is not None else None,
        )
    )
    return core, oracle, iso, checks


# -- monad laws of the double dualization ------------------------------------------------------


def dd_unit_law_check(dd, budgets=DEFAULT_BUDGETS, elements=None):
    """``μ . η_T = id`` and ``μ . T η = id`` evaluated through the lazy formulas.

    Elements of ``T X`` are taken from the full exponential when it fits the
    budget, otherwise from ``elements`` (a list of ``(c, table)`` pairs).
    Returns ``(ok, witness, n_checked, exhaustive)``.
    """
    C, X, P, Oj, E1 = dd.base, dd.X, dd.P, dd.Oj, dd.E1
    exhaustive = False
    if elements is None:
        try:
            E2 = ps.exponential(P, Oj, budgets)
            elements = [(c, t) for c in C.objects for t in E2.elems[c]]
            exhaustive = True
        except BudgetExceeded:
            elements = [(c, dd.eta(c, x)) for c in C.objects for x in range(X.sizes[c])]

    def eta_P(d, phi):
        # η_P(φ) ∈ D(T X)(d): (e, g, u) ↦ u_e(id_e, P(g) φ), u an element of T X(e)
        return lambda e, g, u: dd.value(e, u, e, C.identity[e], P.restrict[g][phi])

    def D_eta_X(psi, d):
        # D(η_X)(ψ) ∈ P(d): (e, g, x) ↦ ψ(e, g, η_X(x)); tabulated to an index of P(d)
        comps = []
        for e in C.objects:
            row = []
            for g in C.hom(e, d):
                for x in range(X.sizes[e]):
                    row.append(psi(e, g, dd.eta(e, x)))
            comps.append(tuple(row))
        return E1.pos[d].get(tuple(comps))

    n = 0
    for c, t in elements:
        for d in C.objects:
            for g in C.hom(d, c):
                tg = dd.restrict(g, t)
                for phi in range(P.sizes[d]):
                    n += 1
                    val = dd.value(c, t, d, g, phi)
                    # μ(η_T(t))(d, g, φ) = η_T(t)(d, g, η_P(φ)) = η_P(φ)(d, id, T X(g) t)
                    lhs1 = eta_P(d, phi)(d, C.identity[d], tg)
                    if lhs1 != val:
                        return False, {"law": "mu . eta T", "object": C.obj_names[c]}, n, exhaustive
                    # μ(Tη(t))(d, g, φ) = t(d, g, D(η_X)(η_P(φ)))
                    idx = D_eta_X(eta_P(d, phi), d)
                    if idx is None or dd.value(c, t, d, g, idx) != val:
                        return False, {"law": "mu . T eta", "object": C.obj_names[c]}, n, exhaustive
    return True, None, n, exhaustive


def dd_associativity_spot_check(top, X, samples=4, seed=0):
    """Spot-check ``μ . Tμ = μ . μT`` on pseudo-random elements of ``T³X``.

    Only for one-object bases with trivial monoid, where ``Ω_j^Z`` is the set of
    all functions ``Z -> Ω_j(*)`` and every level can be tabulated.
    """
    C = top.base
    if len(C.objects) != 1 or len(C.morphisms) != 1:
        raise BudgetExceeded("associativity spot-check needs the terminal base")
    Oj = omega_j_cached(top).presheaf
    two = Oj.sizes[0]

    def dual(elems):
        from itertools import product

        return [tuple(v) for v in product(range(two), repeat=len(elems))]

    L0 = list(range(X.sizes[0]))
    D1 = dual(L0)               # Ω^X
    T1 = dual(D1)               # T X: functions on D1
    if two ** len(T1) > 1 << 16 or two ** (two ** len(T1)) > 1 << 16:
        raise BudgetExceeded("T T X too large for the associativity spot-check", size=len(T1))
    D2 = dual(T1)               # Ω^{TX}
    T2 = dual(D2)               # T T X: functions on D2
    pos_T1 = {t: i for i, t in enumerate(T1)}
    pos_D2 = {t: i for i, t in enumerate(D2)}

    def mu_X(tau2):
        # μ_X(τ)(φ) = τ(η_{D1}(φ)), η_{D1}(φ) = (u ↦ u(φ)) ∈ D2
        return tuple(tau2[pos_D2[tuple(u[i] for u in T1)]] for i in range(len(D1)))

    rng = random.Random(seed)
    salt = [rng.getrandbits(64) for _ in range(samples)]
    for s in salt:
        def tau3(arg, s=s):
            # a pseudo-random element of T T T X evaluated at arg ∈ Ω^{TTX}
            return hash((s, arg)) % two

        # μ_X . T(μ_X): T(μ)(τ)(ψ) = τ(ψ . μ)
        tm = tuple(tau3(tuple(psi[pos_T1[mu_X(t2)]] for t2 in T2)) for psi in D2)
        # μ_X . μ_{TX}: μ_{TX}(τ)(ψ) = τ(η_{D2}(ψ)), η_{D2}(ψ) = (σ ↦ σ(ψ))
        mt = tuple(tau3(tuple(t2[j] for t2 in T2)) for j in range(len(D2)))
        if mu_X(tm) != mu_X(mt):
            return False, {"seed": seed, "salt": s}
    return True, None


# -- the sweep of the LT theorem --------------------------------------------------------------


class SigmaTester:
    """Decides ``Ω_j^h`` iso with per-presheaf caches."""

    def __init__(self, top, budgets=DEFAULT_BUDGETS):
        self.top, self.budgets = top, budgets
        self.Oj = omega_j_cached(top).presheaf
        self._duals = {}

    def dual(self, X):
        key = X.key()
        hit = self._duals.get(key)
        if hit is None:
            C = self.top.base
            hit = []
            for c in C.objects:
                P = ps.product(ps.representable(C, c), X)[0]
                hit.append((P, tuple(m.components for m in ps.iter_homs(P, self.Oj))))
            self._duals[key] = hit
        return hit

    def signature(self, X):
        return tuple(len(m) for _, m in self.dual(X))

    def inverted(self, h):
        X, Y = h.src, h.dst
        if self.signature(X) != self.signature(Y):
            return False
        C = self.top.base
        dX, dY = self.dual(X), self.dual(Y)
        for c in C.objects:
            PX, _ = dX[c]
            PY, maps = dY[c]
            y = ps.representable(C, c)
            th = ps.product_map(ps.identity_map(y), h, PX, PY)
            seen = set()
            for phi in maps:
                seen.add(tuple(tuple(pc[v] for v in tc) for pc, tc in zip(phi, th.components)))
            if len(seen) != len(maps):
                return False
        return True


def universe_maps(U, sig=None):
    """All maps between members of ``U``; with ``sig`` only between equal signatures."""
    for X in U:
        for Y in U:
            if sig is not None and sig(X) != sig(Y):
                continue
            yield from ps.iter_homs(X, Y)


def verify_lt_theorem(top, bound=None, budgets=DEFAULT_BUDGETS, pair_bound=None):
    """Items (a)-(f) of the LT theorem on bounded universes; returns checks."""
    C = top.base
    bound = budgets.sweep_bound if bound is None else bound
    pair_bound = min(bound, budgets.pair_bound if pair_bound is None else pair_bound)
    U = ps.enumerate_presheaves(C, bound, budgets)
    Up = ps.enumerate_presheaves(C, pair_bound, budgets)
    sig = SigmaTester(top, budgets)
    checks = []
    scope = {"claim": "bounded universe", "bound": bound, "pair_bound": pair_bound, "universe": len(U), "pair_universe": len(Up)}

    def subs_with_incl(V):
        for X in V:
            for m in ps.enumerate_subpresheaves(X):
                yield X, m, m.as_presheaf()[1]

    # (a) j-dense monos are inverted by Ω_j^(-)
    n, bad = 0, None
    for X, m, incl in subs_with_incl(U):
        if j_closure(top, m).is_full():
            n += 1
            if not sig.inverted(incl):
                bad = {"presheaf": X.name, "sub": [sorted(s) for s in m.subset]}
                break
    checks.append(_chk("(a) j-dense monos lie in Σ_T", bad is None, bad, checked=n, **scope))

    # (b) Σ_T ⊆ Dense_j
    n, bad = 0, None
    sigma_members = []
    for h in universe_maps(U, sig.signature):
        if sig.inverted(h):
            n += 1
            if not is_j_dense(top, h):
                bad = {"src": h.src.name, "dst": h.dst.name, "map": [list(c) for c in h.components]}
                break
    checks.append(_chk("(b) Σ_T members are j-dense", bad is None, bad, checked=n, **scope))

    sigma_members = [h for h in universe_maps(Up, sig.signature) if sig.inverted(h)]
    # enriched orthogonality against h is ordinary orthogonality against every y(c) x h
    sigma_tensors = [[fs.tensor_rep(h, c) for c in top.base.objects] for h in sigma_members]

    # (c) closed monos are orthogonal to Σ_T; dense monos are in Σ_T
    n, bad = 0, None
    for X, m, incl in subs_with_incl(Up):
        closed = j_closure(top, m) == m
        if closed:
            for h, hs in zip(sigma_members, sigma_tensors):
                n += 1
                if not all(fs.presheaf_orthogonal(t, incl) for t in hs):
                    bad = {"presheaf": X.name, "sub": [sorted(s) for s in m.subset], "sigma": [list(c) for c in h.components]}
                    break
        elif j_closure(top, m).is_full() and not sig.inverted(incl):
            bad = {"presheaf": X.name, "sub": [sorted(s) for s in m.subset], "reason": "dense mono not in Σ_T"}
        if bad:
            break
    checks.append(_chk("(c) j-closed monos ⊥_X Σ_T and dense monos ∈ Σ_T", bad is None, bad, checked=n, sigma=len(sigma_members), **scope))

    # (d) sheaf ⇔ orthogonal to Σ_T members
    n, bad = 0, None
    for Z in Up:
        n += 1
        sh = is_sheaf(top, Z)
        orth = all(fs.presheaf_object_orthogonal(t, Z) for hs in sigma_tensors for t in hs)
        if sh != orth:
            bad = {"presheaf": Z.name, "sheaf": sh, "orthogonal": orth}
            break
    checks.append(_chk("(d) sheaf ⇔ ⊥_X-orthogonal to Σ_T", bad is None, bad, checked=n, **scope))

    # (e) separated ⇔ η_X mono
    n, bad = 0, None
    for X in U:
        if max(X.sizes, default=0) > budgets.dd_eta_carrier_max:
            continue
        n += 1
        sep = is_separated(top, X)
        mono = DoubleDual(top, X, budgets).eta_is_mono()
        if sep != mono:
            bad = {"presheaf": X.name, "separated": sep, "eta_mono": mono}
            break
    checks.append(_chk("(e) separated ⇔ η_X mono", bad is None, bad, checked=n, **scope))

    # (f) dense monos are stable under products with universe objects
    n, bad = 0, None
    dense_monos = [(X, m, incl) for X, m, incl in subs_with_incl(Up) if j_closure(top, m).is_full()]
    for X, m, incl in dense_monos:
        for Z in Up:
            n += 1
            PZ = ps.product(Z, incl.src)[0]
            PX = ps.product(Z, X)[0]
            zm = ps.product_map(ps.identity_map(Z), incl, PZ, PX)
            if not (ps.is_mono(zm) and is_j_dense(top, zm)):
                bad = {"presheaf": X.name, "sub": [sorted(s) for s in m.subset], "factor": Z.name}
                break
        if bad:
            break
    checks.append(_chk("(f) dense monos stable under products", bad is None, bad, checked=n, **scope))
    return checks


# -- quasitopos bisites ------------------------------------------------------------------------


def topology_le(J, K):
    return all(a <= b for a, b in zip(J.J, K.J))


def separated_sheaf_reflection_oracle(J, K, X, budgets=DEFAULT_BUDGETS):
    """J-closure of the image of ``X -> a_K X``."""
    aK = sheafify_oracle(K, X, budgets)
    img = ps.image(aK.unit)
    cl = j_closure(J, img)
    R, incl = cl.as_presheaf()
    pos = [{y: i for i, y in enumerate(ic)} for ic in incl.components]
    unit = ps.PresheafMap(X, R, [tuple(pos[c][y] for y in comp) for c, comp in enumerate(aK.unit.components)])
    return R, unit


def separated_sheaf_reflection_core(J, K, X, budgets=DEFAULT_BUDGETS):
    """J-closure of the image of ``η^K_X`` inside ``T_K X``."""
    dd = DoubleDual(K, X, budgets)
    R, unit, _ = closure_of_eta_image(J, dd)
    return R, unit


def quasitopos_check(base, J, K, bound=2, budgets=DEFAULT_BUDGETS):
    """Classification and reflection onto K-separated J-sheaves on a bounded universe."""
    checks = []
    checks.append(_chk("J ⊆ K", topology_le(J, K)))
    U = ps.enumerate_presheaves(base, bound, budgets)
    sj, sk = SigmaTester(J, budgets), SigmaTester(K, budgets)
    n, bad = 0, None
    sigma_j = []
    for h in universe_maps(U, sj.signature):
        if sj.inverted(h):
            n += 1
            sigma_j.append(h)
            if not sk.inverted(h):
                bad = {"src": h.src.name, "dst": h.dst.name, "map": [list(c) for c in h.components]}
                break
    checks.append(_chk("Σ_j ⊆ Σ_k on the universe", bad is None, bad, checked=n))
    members, bad = [], None
    for X in U:
        direct = is_separated(K, X) and is_sheaf(J, X)
        complete = all(fs.presheaf_object_orthogonal(h, X) for h in sigma_j)
        separated = DoubleDual(K, X, budgets).eta_is_mono()
        if direct != (complete and separated):
            bad = {"presheaf": X.name, "direct": direct, "complete": complete, "t_separated": separated}
            break
        if direct:
            members.append(X)
    checks.append(_chk("classification agrees with Σ-complete + T-separated", bad is None, bad, members=len(members), universe=len(U)))
    bad_iso, bad_up, n_up = None, None, 0
    for X in U:
        Rc, uc = separated_sheaf_reflection_core(J, K, X, budgets)
        Ro, uo = separated_sheaf_reflection_oracle(J, K, X, budgets)
        if not (is_separated(K, Rc) and is_sheaf(J, Rc)):
            bad_iso = {"presheaf": X.name, "reason": "reflection not in the subcategory"}
            break
        if find_unit_iso(Rc, uc, Ro, uo) is None:
            bad_iso = {"presheaf": X.name, "core_sizes": list(Rc.sizes), "oracle_sizes": list(Ro.sizes)}
            break
        for Z in members:
            n_up += 1
            if not fs.presheaf_object_orthogonal(uc, Z):
                bad_up = {"presheaf": X.name, "target": Z.name}
                break
        if bad_up:
            break
    checks.append(_chk("core reflection ≅ oracle reflection", bad_iso is None, bad_iso, universe=len(U)))
    checks.append(_chk("reflection arrows are universal", bad_up is None, bad_up, checked=n_up))
    return checks
