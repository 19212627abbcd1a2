"""Finite categories, functors, natural transformations, monads and adjunctions.

Objects and morphisms are integer ids (``0..n-1``); names are kept only for
reporting and for the JSON format.  Every structure is validated eagerly and
exhaustively at construction, so downstream code may assume the laws.
"""

from dataclasses import dataclass
from itertools import product

from .config import DEFAULT_BUDGETS
from .errors import (
    AssocFail,
    BadIdentity,
    BudgetExceeded,
    CategoryError,
    EndpointMismatch,
    FunctorError,
    MissingComposite,
    NonAssociative,
    NotNatural,
    TriangleFail,
    UnitLawFail,
    UnknownReference,
)


class FinCategory:
    """A finite category given by a total composition table.

    Use :func:`validate_category` for untrusted data; the constructor itself
    runs the same exhaustive checks.
    """

    def __init__(self, obj_names, mor_names, src, dst, identity, comp, name=None):
        self.name = name
        self.obj_names = tuple(obj_names)
        self.mor_names = tuple(mor_names)
        self.src = tuple(src)
        self.dst = tuple(dst)
        self.identity = tuple(identity)
        self.comp = dict(comp)
        n, m = len(self.obj_names), len(self.mor_names)
        self.objects = tuple(range(n))
        self.morphisms = tuple(range(m))
        homs = {(a, b): [] for a in self.objects for b in self.objects}
        for f in self.morphisms:
            homs[(self.src[f], self.dst[f])].append(f)
        self._hom = {k: tuple(v) for k, v in homs.items()}
        self._into = tuple(tuple(f for f in self.morphisms if self.dst[f] == c) for c in self.objects)
        self._out = tuple(tuple(f for f in self.morphisms if self.src[f] == c) for c in self.objects)
        self._is_identity = frozenset(self.identity)
        self._obj_index = {nm: i for i, nm in enumerate(self.obj_names)}
        self._mor_index = {nm: i for i, nm in enumerate(self.mor_names)}
        self._signature = None
        _check_category(self)

    # -- structure -----------------------------------------------------------

    def compose(self, g, f):
        """``g . f`` (apply ``f`` first)."""
        return self.comp[(g, f)]

    def compose_path(self, *fs):
        """Compose right-to-left: ``compose_path(h, g, f) = h . g . f``."""
        out = fs[-1]
        for g in reversed(fs[:-1]):
            out = self.comp[(g, out)]
        return out

    def hom(self, a, b):
        return self._hom[(a, b)]

    def into(self, c):
        return self._into[c]

    def out_of(self, c):
        return self._out[c]

    def is_identity(self, f):
        return f in self._is_identity

    def obj(self, name):
        try:
            return self._obj_index[name]
        except KeyError:
            raise UnknownReference(f"unknown object {name!r}", object=name) from None

    def mor(self, name):
        try:
            return self._mor_index[name]
        except KeyError:
            raise UnknownReference(f"unknown morphism {name!r}", morphism=name) from None

    def __len__(self):
        return len(self.morphisms)

    def __repr__(self):
        label = self.name or "FinCategory"
        return f"<{label}: {len(self.objects)} objects, {len(self.morphisms)} morphisms>"

    def signature(self):
        """Hashable table used for equality of categories."""
        if self._signature is None:
            self._signature = (self.src, self.dst, self.identity, tuple(sorted(self.comp.items())))
        return self._signature

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, FinCategory) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def as_raw(self):
        """Inverse of :func:`validate_category` (identities listed explicitly)."""
        ids = set(self.identity)
        return {
            "objects": list(self.obj_names),
            "identities": {self.obj_names[c]: self.mor_names[self.identity[c]] for c in self.objects},
            "morphisms": [
                [self.mor_names[f], self.obj_names[self.src[f]], self.obj_names[self.dst[f]]]
                for f in self.morphisms
                if f not in ids
            ],
            "compose": [
                [self.mor_names[g], self.mor_names[f], self.mor_names[h]]
                for (g, f), h in sorted(self.comp.items())
                if g not in ids and f not in ids
            ],
        }


def _check_category(C):
    n = len(C.objects)
    if len(C.identity) != n:
        raise CategoryError("identity map must cover every object")
    for c in C.objects:
        i = C.identity[c]
        if C.src[i] != c or C.dst[i] != c:
            raise BadIdentity(f"identity of {C.obj_names[c]} is not an endomorphism of it", object=C.obj_names[c])
    for (g, f), h in C.comp.items():
        if C.dst[f] != C.src[g]:
            raise EndpointMismatch(
                f"composite {C.mor_names[g]} . {C.mor_names[f]} of non-composable pair",
                g=C.mor_names[g], f=C.mor_names[f],
            )
        if C.src[h] != C.src[f] or C.dst[h] != C.dst[g]:
            raise EndpointMismatch(
                f"composite {C.mor_names[g]} . {C.mor_names[f]} = {C.mor_names[h]} has wrong endpoints",
                g=C.mor_names[g], f=C.mor_names[f], h=C.mor_names[h],
            )
    for f in C.morphisms:
        for g in C.out_of(C.dst[f]):
            if (g, f) not in C.comp:
                raise MissingComposite(
                    f"missing composite {C.mor_names[g]} . {C.mor_names[f]}",
                    g=C.mor_names[g], f=C.mor_names[f],
                )
    for c in C.objects:
        i = C.identity[c]
        for f in C.into(c):
            if C.comp[(i, f)] != f:
                raise BadIdentity(f"identity of {C.obj_names[c]} is not left neutral", object=C.obj_names[c], morphism=C.mor_names[f])
        for f in C.out_of(c):
            if C.comp[(f, i)] != f:
                raise BadIdentity(f"identity of {C.obj_names[c]} is not right neutral", object=C.obj_names[c], morphism=C.mor_names[f])
    for f in C.morphisms:
        for g in C.out_of(C.dst[f]):
            gf = C.comp[(g, f)]
            for h in C.out_of(C.dst[g]):
                if C.comp[(h, gf)] != C.comp[(C.comp[(h, g)], f)]:
                    raise NonAssociative(
                        f"({C.mor_names[h]} . {C.mor_names[g]}) . {C.mor_names[f]} differs from "
                        f"{C.mor_names[h]} . ({C.mor_names[g]} . {C.mor_names[f]})",
                        f=C.mor_names[f], g=C.mor_names[g], h=C.mor_names[h],
                    )


def validate_category(raw, name=None):
    """Build a :class:`FinCategory` from a raw description.

    ``raw`` holds ``objects`` (names), ``morphisms`` (``[name, src, dst]``
    triples, identities optional), optional ``identities`` (object -> name,
    default ``id_<obj>``) and ``compose`` (``[g, f, g.f]`` triples).
    Composites involving identities are filled in automatically; explicit
    entries are checked against neutrality.
    """
    objects = list(raw.get("objects", []))
    if len(set(objects)) != len(objects):
        raise CategoryError("duplicate object names")
    obj_index = {o: i for i, o in enumerate(objects)}
    id_names = dict(raw.get("identities") or {})
    for o in id_names:
        if o not in obj_index:
            raise UnknownReference(f"identity given for unknown object {o!r}", object=o)
    mor_names, src, dst = [], [], []
    identity = []
    for o in objects:
        identity.append(len(mor_names))
        mor_names.append(id_names.get(o, f"id_{o}"))
        src.append(obj_index[o])
        dst.append(obj_index[o])
    mor_index = {nm: i for i, nm in enumerate(mor_names)}
    if len(mor_index) != len(mor_names):
        raise CategoryError("duplicate identity names")
    for entry in raw.get("morphisms", []):
        if isinstance(entry, dict):
            nm, s, d = entry["name"], entry["src"], entry["dst"]
        else:
            nm, s, d = entry
        for o in (s, d):
            if o not in obj_index:
                raise UnknownReference(f"morphism {nm!r} refers to unknown object {o!r}", morphism=nm, object=o)
        if nm in mor_index:
            i = mor_index[nm]
            if i in identity and src[i] == obj_index[s] and dst[i] == obj_index[d]:
                continue
            raise CategoryError(f"duplicate morphism name {nm!r}", morphism=nm)
        mor_index[nm] = len(mor_names)
        mor_names.append(nm)
        src.append(obj_index[s])
        dst.append(obj_index[d])
    id_set = set(identity)
    comp = {}
    for entry in raw.get("compose", []):
        g_nm, f_nm, h_nm = entry
        for nm in (g_nm, f_nm, h_nm):
            if nm not in mor_index:
                raise UnknownReference(f"composition entry refers to unknown morphism {nm!r}", morphism=nm)
        g, f, h = mor_index[g_nm], mor_index[f_nm], mor_index[h_nm]
        if dst[f] != src[g]:
            raise EndpointMismatch(f"{g_nm} . {f_nm} is not composable", g=g_nm, f=f_nm)
        if src[h] != src[f] or dst[h] != dst[g]:
            raise EndpointMismatch(f"{g_nm} . {f_nm} = {h_nm} has wrong endpoints", g=g_nm, f=f_nm, h=h_nm)
        if g in id_set and h != f:
            raise BadIdentity(f"{g_nm} . {f_nm} should be {f_nm}", object=objects[src[g]], morphism=f_nm)
        if f in id_set and h != g:
            raise BadIdentity(f"{g_nm} . {f_nm} should be {g_nm}", object=objects[src[f]], morphism=g_nm)
        if (g, f) in comp and comp[(g, f)] != h:
            raise CategoryError(f"conflicting composites for {g_nm} . {f_nm}", g=g_nm, f=f_nm)
        comp[(g, f)] = h
    for f in range(len(mor_names)):
        comp.setdefault((identity[dst[f]], f), f)
        comp.setdefault((f, identity[src[f]]), f)
    return FinCategory(objects, mor_names, src, dst, identity, comp, name=name or raw.get("name"))


# -- builders -----------------------------------------------------------------


def category_from_preorder(elements, leq, name=None):
    """The thin category of a finite preorder; ``leq(a, b)`` gives a -> b."""
    elements = list(elements)
    morphisms, comp_entries = [], []
    arrow = {}
    for a in elements:
        for b in elements:
            if a != b and leq(a, b):
                nm = f"{a}<{b}"
                arrow[(a, b)] = nm
                morphisms.append([nm, str(a), str(b)])
    for (a, b), f in arrow.items():
        for (b2, c), g in arrow.items():
            if b2 == b and a != c:
                comp_entries.append([g, f, arrow[(a, c)]])
            elif b2 == b and a == c:
                comp_entries.append([g, f, f"id_{a}"])
    raw = {"objects": [str(e) for e in elements], "morphisms": morphisms, "compose": comp_entries}
    return validate_category(raw, name=name)


def category_from_monoid(table, names=None, name=None, obj="*"):
    """One-object category of a finite monoid; ``table[a][b]`` is ``a.b`` and 0 is the unit."""
    k = len(table)
    names = names or [f"m{i}" for i in range(k)]
    raw = {
        "objects": [obj],
        "identities": {obj: names[0]},
        "morphisms": [[names[i], obj, obj] for i in range(1, k)],
        "compose": [[names[a], names[b], names[table[a][b]]] for a in range(1, k) for b in range(1, k)],
    }
    return validate_category(raw, name=name)


def category_of_functions(sizes, name=None):
    """Full subcategory of finite sets on sets ``{0..n-1}`` for the given sizes.

    Morphisms are all functions; a function ``A -> B`` is named by its value
    tuple, e.g. ``2>2:(1,0)``.
    """
    sizes = list(sizes)
    objects = [str(n) for n in sizes]
    fn = {}
    morphisms = []
    identities = {}
    for a in sizes:
        for b in sizes:
            for values in product(range(b), repeat=a):
                nm = f"{a}>{b}:{values}"
                fn[nm] = (a, b, values)
                if a == b and values == tuple(range(a)):
                    identities[str(a)] = nm
                else:
                    morphisms.append([nm, str(a), str(b)])
    by_key = {v: k for k, v in fn.items()}
    compose = []
    for g_nm, (b, c, gv) in fn.items():
        for f_nm, (a, b2, fv) in fn.items():
            if b2 == b:
                h = (a, c, tuple(gv[x] for x in fv))
                compose.append([g_nm, f_nm, by_key[h]])
    raw = {"objects": objects, "identities": identities, "morphisms": morphisms, "compose": compose}
    return validate_category(raw, name=name)


# -- morphism predicates ------------------------------------------------------


def is_mono(C, f):
    for x in C.objects:
        seen = set()
        for g in C.hom(x, C.src[f]):
            fg = C.comp[(f, g)]
            if fg in seen:
                return False
            seen.add(fg)
    return True


def is_epi(C, f):
    for y in C.objects:
        seen = set()
        for g in C.hom(C.dst[f], y):
            gf = C.comp[(g, f)]
            if gf in seen:
                return False
            seen.add(gf)
    return True


def inverse(C, f):
    """The two-sided inverse of ``f`` or ``None``."""
    a, b = C.src[f], C.dst[f]
    for g in C.hom(b, a):
        if C.comp[(g, f)] == C.identity[a] and C.comp[(f, g)] == C.identity[b]:
            return g
    return None


def is_iso(C, f):
    return inverse(C, f) is not None


def isomorphic(C, a, b):
    return any(is_iso(C, f) for f in C.hom(a, b))


def iso_classes(C):
    classes, seen = [], set()
    for a in C.objects:
        if a in seen:
            continue
        cls = tuple(b for b in C.objects if b not in seen and isomorphic(C, a, b))
        seen.update(cls)
        classes.append(cls)
    return classes


# -- functors and natural transformations --------------------------------------


@dataclass(frozen=True, eq=False)
class FinFunctor:
    source: FinCategory
    target: FinCategory
    obj_map: tuple
    mor_map: tuple

    def __post_init__(self):
        object.__setattr__(self, "obj_map", tuple(self.obj_map))
        object.__setattr__(self, "mor_map", tuple(self.mor_map))
        _check_functor(self)

    def ob(self, x):
        return self.obj_map[x]

    def __call__(self, f):
        return self.mor_map[f]

    def key(self):
        return (self.obj_map, self.mor_map)

    def __eq__(self, other):
        return (
            isinstance(other, FinFunctor)
            and self.source == other.source
            and self.target == other.target
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash(self.key())


def _check_functor(F):
    C, D = F.source, F.target
    if len(F.obj_map) != len(C.objects) or len(F.mor_map) != len(C.morphisms):
        raise FunctorError("functor tables have the wrong length")
    for f in C.morphisms:
        Ff = F.mor_map[f]
        if D.src[Ff] != F.obj_map[C.src[f]] or D.dst[Ff] != F.obj_map[C.dst[f]]:
            raise FunctorError(f"functor does not respect endpoints of {C.mor_names[f]}", morphism=C.mor_names[f])
    for c in C.objects:
        if F.mor_map[C.identity[c]] != D.identity[F.obj_map[c]]:
            raise FunctorError(f"functor does not preserve the identity of {C.obj_names[c]}", object=C.obj_names[c])
    for (g, f), h in C.comp.items():
        if D.comp[(F.mor_map[g], F.mor_map[f])] != F.mor_map[h]:
            raise FunctorError(
                f"functor does not preserve {C.mor_names[g]} . {C.mor_names[f]}",
                g=C.mor_names[g], f=C.mor_names[f],
            )


def identity_functor(C):
    return FinFunctor(C, C, C.objects, C.morphisms)


def compose_functors(G, F):
    """``G . F``."""
    if F.target != G.source:
        raise FunctorError("functors are not composable")
    return FinFunctor(
        F.source,
        G.target,
        tuple(G.obj_map[F.obj_map[x]] for x in F.source.objects),
        tuple(G.mor_map[F.mor_map[f]] for f in F.source.morphisms),
    )


@dataclass(frozen=True, eq=False)
class FinNatTrans:
    source: FinFunctor
    target: FinFunctor
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        _check_nat(self)

    def __getitem__(self, x):
        return self.components[x]

    def __eq__(self, other):
        return (
            isinstance(other, FinNatTrans)
            and self.source == other.source
            and self.target == other.target
            and self.components == other.components
        )

    def __hash__(self):
        return hash(self.components)


def _check_nat(alpha):
    F, G = alpha.source, alpha.target
    C, D = F.source, F.target
    if G.source != C or G.target != D:
        raise NotNatural("transformation between non-parallel functors")
    if len(alpha.components) != len(C.objects):
        raise NotNatural("component table has the wrong length")
    for x in C.objects:
        a = alpha.components[x]
        if D.src[a] != F.ob(x) or D.dst[a] != G.ob(x):
            raise NotNatural(f"component at {C.obj_names[x]} has wrong endpoints", object=C.obj_names[x])
    for f in C.morphisms:
        a, b = C.src[f], C.dst[f]
        if D.comp[(G(f), alpha.components[a])] != D.comp[(alpha.components[b], F(f))]:
            raise NotNatural(f"naturality square for {C.mor_names[f]} does not commute", morphism=C.mor_names[f])


def identity_nat(F):
    D = F.target
    return FinNatTrans(F, F, tuple(D.identity[F.ob(x)] for x in F.source.objects))


def vertical(beta, alpha):
    """``beta . alpha`` for ``alpha: F -> G`` and ``beta: G -> H``."""
    D = alpha.source.target
    return FinNatTrans(
        alpha.source,
        beta.target,
        tuple(D.comp[(beta[x], alpha[x])] for x in alpha.source.source.objects),
    )


def whisker_left(H, alpha):
    """``H alpha``: apply the functor ``H`` to every component."""
    return FinNatTrans(
        compose_functors(H, alpha.source),
        compose_functors(H, alpha.target),
        tuple(H(alpha[x]) for x in alpha.source.source.objects),
    )


def whisker_right(alpha, K):
    """``alpha K``: components ``alpha_{K x}``."""
    return FinNatTrans(
        compose_functors(alpha.source, K),
        compose_functors(alpha.target, K),
        tuple(alpha[K.ob(x)] for x in K.source.objects),
    )


def horizontal(beta, alpha):
    """``beta o alpha`` for ``alpha: F -> F'`` (C -> D), ``beta: G -> G'`` (D -> E)."""
    E = beta.source.target
    G = beta.source
    return FinNatTrans(
        compose_functors(beta.source, alpha.source),
        compose_functors(beta.target, alpha.target),
        tuple(E.comp[(beta[alpha.target.ob(x)], G(alpha[x]))] for x in alpha.source.source.objects),
    )


def enumerate_nat_trans(F, G, limit=None):
    """All natural transformations ``F -> G`` in lexicographic component order."""
    C, D = F.source, F.target
    order = list(C.objects)
    choices = [D.hom(F.ob(x), G.ob(x)) for x in order]
    checks = {x: [] for x in order}
    pos = {x: i for i, x in enumerate(order)}
    for f in C.morphisms:
        a, b = C.src[f], C.dst[f]
        checks[order[max(pos[a], pos[b])]].append((f, a, b))
    comps = [None] * len(order)
    out = []

    def rec(i):
        if i == len(order):
            out.append(FinNatTrans(F, G, tuple(comps)))
            if limit is not None and len(out) > limit:
                raise BudgetExceeded("too many natural transformations", limit=limit)
            return
        x = order[i]
        for a in choices[i]:
            comps[x] = a
            if all(
                D.comp[(G(f), comps[s])] == D.comp[(comps[t], F(f))]
                for f, s, t in checks[x]
            ):
                rec(i + 1)
        comps[x] = None

    rec(0)
    return out


def enumerate_functors(C, D, require=None, limit=None):
    """All functors ``C -> D``; ``require(x, Fx)`` prunes object assignments."""
    out = []
    obj_map = [None] * len(C.objects)
    non_id = [f for f in C.morphisms if not C.is_identity(f)]
    pos = {f: i for i, f in enumerate(non_id)}
    for c in C.objects:
        pos[C.identity[c]] = -1
    checks = [[] for _ in non_id]
    for (g, f), h in C.comp.items():
        last = max(pos[g], pos[f], pos[h])
        if last >= 0:
            checks[last].append((g, f, h))

    def assign_morphisms(i, mor_map):
        if i == len(non_id):
            out.append(FinFunctor(C, D, tuple(obj_map), tuple(mor_map)))
            if limit is not None and len(out) > limit:
                raise BudgetExceeded("too many functors", limit=limit)
            return
        f = non_id[i]
        for cand in D.hom(obj_map[C.src[f]], obj_map[C.dst[f]]):
            mor_map[f] = cand
            if all(D.comp[(mor_map[g], mor_map[ff])] == mor_map[h] for g, ff, h in checks[i]):
                assign_morphisms(i + 1, mor_map)
        mor_map[f] = None

    def assign_objects(i):
        if i == len(C.objects):
            mor_map = [None] * len(C.morphisms)
            for c in C.objects:
                mor_map[C.identity[c]] = D.identity[obj_map[c]]
            assign_morphisms(0, mor_map)
            return
        for d in D.objects:
            if require is not None and not require(i, d):
                continue
            obj_map[i] = d
            if all(
                D.hom(obj_map[C.src[f]], obj_map[C.dst[f]])
                for f in C.morphisms
                if C.src[f] <= i and C.dst[f] <= i
            ):
                assign_objects(i + 1)
            obj_map[i] = None

    assign_objects(0)
    return out


# -- monads ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MonadData:
    T: FinFunctor
    eta: FinNatTrans
    mu: FinNatTrans

    @property
    def category(self):
        return self.T.source

    def key(self):
        return (self.T.key(), self.eta.components, self.mu.components)

    def __eq__(self, other):
        return isinstance(other, MonadData) and self.category == other.category and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def check_monad(T, eta, mu):
    """Validate the monad laws and return :class:`MonadData`."""
    C = T.source
    if T.target != C:
        raise UnitLawFail("T is not an endofunctor")
    TT = compose_functors(T, T)
    if eta.source != identity_functor(C) or eta.target != T:
        raise NotNatural("eta must be a transformation Id -> T")
    if mu.source != TT or mu.target != T:
        raise NotNatural("mu must be a transformation TT -> T")
    for x in C.objects:
        idT = C.identity[T.ob(x)]
        if C.comp[(mu[x], eta[T.ob(x)])] != idT:
            raise UnitLawFail(f"mu . eta T differs from id at {C.obj_names[x]}", object=C.obj_names[x], side="eta T")
        if C.comp[(mu[x], T(eta[x]))] != idT:
            raise UnitLawFail(f"mu . T eta differs from id at {C.obj_names[x]}", object=C.obj_names[x], side="T eta")
    for x in C.objects:
        if C.comp[(mu[x], T(mu[x]))] != C.comp[(mu[x], mu[T.ob(x)])]:
            raise AssocFail(f"associativity fails at {C.obj_names[x]}", object=C.obj_names[x])
    return MonadData(T, eta, mu)


def monad_from_tables(C, obj_map, mor_map, eta, mu):
    T = FinFunctor(C, C, obj_map, mor_map)
    return check_monad(
        T,
        FinNatTrans(identity_functor(C), T, eta),
        FinNatTrans(compose_functors(T, T), T, mu),
    )


def identity_monad(C):
    I = identity_functor(C)
    return MonadData(I, identity_nat(I), identity_nat(I))


def is_idempotent_monad(M):
    """True iff every multiplication component is invertible.

    When it is, the inverse of ``mu`` is checked to equal both ``T eta`` and
    ``eta T`` componentwise.
    """
    C = M.category
    inverses = [inverse(C, M.mu[x]) for x in C.objects]
    if any(i is None for i in inverses):
        return False
    for x in C.objects:
        if inverses[x] != M.T(M.eta[x]) or inverses[x] != M.eta[M.T.ob(x)]:
            raise AssertionError(f"idempotent monad with mu^-1 != T eta or eta T at {C.obj_names[x]}")
    return True


def check_monad_morphism(S, T, theta):
    """``theta . eta_S = eta_T`` and ``mu_T . (theta o theta) = theta . mu_S``."""
    C = S.category
    if theta.source != S.T or theta.target != T.T:
        return False
    for x in C.objects:
        if C.comp[(theta[x], S.eta[x])] != T.eta[x]:
            return False
        lhs = C.compose_path(T.mu[x], theta[T.T.ob(x)], S.T(theta[x]))
        if lhs != C.comp[(theta[x], S.mu[x])]:
            return False
    return True


def enumerate_monad_morphisms(S, T):
    """Brute force over every natural transformation ``S -> T``."""
    return [th for th in enumerate_nat_trans(S.T, T.T) if check_monad_morphism(S, T, th)]


def unique_morphism_from_idempotent(S, T):
    """The monad morphism ``S -> T`` for idempotent ``S``, or ``None``.

    Candidate components are ``(rho_{TB})^{-1} . S(eta_B)``; they exist exactly
    when every ``TB`` lies in the reflective subcategory of ``S``.
    """
    C = S.category
    comps = []
    for x in C.objects:
        inv = inverse(C, S.eta[T.T.ob(x)])
        if inv is None:
            return None
        comps.append(C.comp[(inv, S.T(T.eta[x]))])
    try:
        theta = FinNatTrans(S.T, T.T, tuple(comps))
    except NotNatural:
        return None
    return theta if check_monad_morphism(S, T, theta) else None


def enumerate_monads(C, budgets=DEFAULT_BUDGETS):
    """Every monad on ``C``, in deterministic order."""
    if len(C.morphisms) > budgets.monad_enum_max_morphisms:
        raise BudgetExceeded(
            "monad enumeration budget exceeded",
            morphisms=len(C.morphisms), limit=budgets.monad_enum_max_morphisms,
        )
    out = []
    I = identity_functor(C)
    for T in enumerate_functors(C, C, require=lambda x, d: bool(C.hom(x, d))):
        TT = compose_functors(T, T)
        for eta in enumerate_nat_trans(I, T):
            for mu in enumerate_nat_trans(TT, T):
                try:
                    out.append(check_monad(T, eta, mu))
                except (UnitLawFail, AssocFail):
                    continue
    return out


# -- adjunctions ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AdjunctionData:
    """``F -| G`` with ``F: B -> C``, ``G: C -> B``, ``eta: 1_B -> GF``, ``eps: FG -> 1_C``."""

    F: FinFunctor
    G: FinFunctor
    eta: FinNatTrans
    eps: FinNatTrans


def check_adjunction(A):
    B, C = A.F.source, A.F.target
    if A.G.source != C or A.G.target != B:
        raise TriangleFail("F and G are not opposed", side="shape")
    for b in B.objects:
        Fb = A.F.ob(b)
        if C.comp[(A.eps[Fb], A.F(A.eta[b]))] != C.identity[Fb]:
            raise TriangleFail(f"eps F . F eta is not the identity at {B.obj_names[b]}", side="F", object=B.obj_names[b])
    for c in C.objects:
        Gc = A.G.ob(c)
        if B.comp[(A.G(A.eps[c]), A.eta[Gc])] != B.identity[Gc]:
            raise TriangleFail(f"G eps . eta G is not the identity at {C.obj_names[c]}", side="G", object=C.obj_names[c])
    return True


def make_adjunction(F, G, eta_components, eps_components):
    B, C = F.source, F.target
    A = AdjunctionData(
        F,
        G,
        FinNatTrans(identity_functor(B), compose_functors(G, F), eta_components),
        FinNatTrans(compose_functors(F, G), identity_functor(C), eps_components),
    )
    check_adjunction(A)
    return A


def identity_adjunction(C):
    I = identity_functor(C)
    return make_adjunction(I, I, identity_nat(I).components, identity_nat(I).components)


def compose_adjunctions(A1, A2):
    """``F2 F1 -| G1 G2`` for ``A1: F1 -| G1`` (B -> C) and ``A2: F2 -| G2`` (C -> D)."""
    B, D = A1.F.source, A2.F.target
    F = compose_functors(A2.F, A1.F)
    G = compose_functors(A1.G, A2.G)
    eta = tuple(B.comp[(A1.G(A2.eta[A1.F.ob(b)]), A1.eta[b])] for b in B.objects)
    eps = tuple(D.comp[(A2.eps[d], A2.F(A1.eps[A2.G.ob(d)]))] for d in D.objects)
    return make_adjunction(F, G, eta, eps)


def induced_monad(A):
    """``(GF, eta, G eps F)``, law-checked."""
    B = A.F.source
    T = compose_functors(A.G, A.F)
    mu = tuple(A.G(A.eps[A.F.ob(b)]) for b in B.objects)
    return check_monad(
        T,
        FinNatTrans(identity_functor(B), T, A.eta.components),
        FinNatTrans(compose_functors(T, T), T, mu),
    )


def build_kleisli(M):
    """Kleisli category of ``M`` and its free/forgetful adjunction."""
    B, T = M.category, M.T
    names, src, dst, key = [], [], [], {}
    for a in B.objects:
        for b in B.objects:
            for k in B.hom(a, T.ob(b)):
                key[(a, b, k)] = len(names)
                names.append(f"kl[{B.mor_names[k]}]:{B.obj_names[a]}>{B.obj_names[b]}")
                src.append(a)
                dst.append(b)
    identity = [key[(a, a, M.eta[a])] for a in B.objects]
    comp = {}
    for (a, b, k), i in key.items():
        for (b2, c, l), j in key.items():
            if b2 != b:
                continue
            h = B.compose_path(M.mu[c], T(l), k)
            comp[(j, i)] = key[(a, c, h)]
    K = FinCategory(B.obj_names, names, src, dst, identity, comp, name=f"Kl({B.name or 'B'})")
    F = FinFunctor(
        B, K, B.objects,
        tuple(key[(B.src[f], B.dst[f], B.comp[(M.eta[B.dst[f]], f)])] for f in B.morphisms),
    )
    g_mor = [None] * len(names)
    for (a, b, k), i in key.items():
        g_mor[i] = B.comp[(M.mu[b], T(k))]
    G = FinFunctor(K, B, tuple(T.ob(a) for a in B.objects), tuple(g_mor))
    eps = tuple(key[(T.ob(a), a, B.identity[T.ob(a)])] for a in B.objects)
    return K, make_adjunction(F, G, M.eta.components, eps)


def monads_equal(M1, M2):
    return M1.category == M2.category and M1.key() == M2.key()


def monad_isomorphism(M1, M2):
    """Natural iso ``T1 -> T2`` commuting with units (and hence multiplications), or ``None``."""
    C = M1.category
    for theta in enumerate_nat_trans(M1.T, M2.T):
        if all(is_iso(C, theta[x]) for x in C.objects) and check_monad_morphism(M1, M2, theta):
            return theta
    return None


# -- reflective subcategories -------------------------------------------------


@dataclass(frozen=True)
class Reflection:
    """A replete reflective subcategory with chosen unit arrows ``rho[B]: B -> KB``."""

    objects: frozenset
    rho: tuple

    def target(self, C, b):
        return C.dst[self.rho[b]]


def find_reflection_arrow(C, b, subset):
    """Least ``(KB, rho)`` with the unique-factorization property, or ``None``."""
    for r in sorted(subset):
        for rho in C.hom(b, r):
            if all(_precompose_bijective(C, rho, r2) for r2 in subset):
                return rho
    return None


def _precompose_bijective(C, f, target):
    src_hom = C.hom(C.dst[f], target)
    dst_hom = C.hom(C.src[f], target)
    if len(src_hom) != len(dst_hom):
        return False
    return len({C.comp[(g, f)] for g in src_hom}) == len(dst_hom)


def is_reflective(C, subset):
    """Reflection data for ``subset`` (after replete closure) or ``None``."""
    subset = replete_closure(C, subset)
    if not subset and C.objects:
        return None
    rho = []
    for b in C.objects:
        arrow = find_reflection_arrow(C, b, subset)
        if arrow is None:
            return None
        rho.append(arrow)
    return Reflection(frozenset(subset), tuple(rho))


def replete_closure(C, subset):
    subset = set(subset)
    return frozenset(b for b in C.objects if any(isomorphic(C, a, b) for a in subset))


def enumerate_reflective_subcategories(C, budgets=DEFAULT_BUDGETS):
    """Every replete reflective subcategory, ordered by sorted object tuple."""
    if len(C.objects) > budgets.reflective_max_objects or len(C.morphisms) > budgets.reflective_max_morphisms:
        raise BudgetExceeded(
            "reflective-subcategory enumeration budget exceeded",
            objects=len(C.objects), morphisms=len(C.morphisms),
        )
    classes = iso_classes(C)
    out = []
    for mask in range(1 << len(classes)):
        subset = frozenset(b for i, cls in enumerate(classes) if mask >> i & 1 for b in cls)
        refl = is_reflective(C, subset)
        if refl is not None:
            out.append(refl)
    out.sort(key=lambda r: (len(r.objects), tuple(sorted(r.objects))))
    return out


def reflection_monad(C, refl):
    """Idempotent monad ``JK`` of a reflection."""
    K_obj = tuple(C.dst[refl.rho[b]] for b in C.objects)
    K_mor = []
    for f in C.morphisms:
        a, b = C.src[f], C.dst[f]
        target = C.comp[(refl.rho[b], f)]
        ext = [k for k in C.hom(K_obj[a], K_obj[b]) if C.comp[(k, refl.rho[a])] == target]
        assert len(ext) == 1
        K_mor.append(ext[0])
    T = FinFunctor(C, C, K_obj, tuple(K_mor))
    mu = []
    for b in C.objects:
        kb = K_obj[b]
        ext = [k for k in C.hom(K_obj[kb], kb) if C.comp[(k, refl.rho[kb])] == C.identity[kb]]
        assert len(ext) == 1
        mu.append(ext[0])
    return check_monad(
        T,
        FinNatTrans(identity_functor(C), T, refl.rho),
        FinNatTrans(compose_functors(T, T), T, tuple(mu)),
    )


def reflection_of_idempotent_monad(M):
    C = M.category
    subset = frozenset(b for b in C.objects if is_iso(C, M.eta[b]))
    return Reflection(replete_closure(C, subset), M.eta.components)


def full_subcategory(C, objs, name=None):
    """``(B', J, ids)``: the full subcategory on ``objs``, its inclusion, and the
    map from morphism ids of ``B'`` to ids of ``C``."""
    objs = sorted(objs)
    opos = {b: i for i, b in enumerate(objs)}
    mors = [f for f in C.morphisms if C.src[f] in opos and C.dst[f] in opos]
    mpos = {f: i for i, f in enumerate(mors)}
    comp = {(mpos[g], mpos[f]): mpos[h] for (g, f), h in C.comp.items() if f in mpos and g in mpos}
    sub = FinCategory(
        [C.obj_names[b] for b in objs],
        [C.mor_names[f] for f in mors],
        [opos[C.src[f]] for f in mors],
        [opos[C.dst[f]] for f in mors],
        [mpos[C.identity[b]] for b in objs],
        comp,
        name=name,
    )
    J = FinFunctor(sub, C, tuple(objs), tuple(mors))
    return sub, J, tuple(mors)


def is_conservative(F):
    """``F`` reflects isomorphisms."""
    C, D = F.source, F.target
    return all(is_iso(C, f) or not is_iso(D, F(f)) for f in C.morphisms)
