"""The finite presheaf topos over a :class:`~idemcore.fincat.FinCategory`.

A presheaf stores, for every object ``c``, a carrier ``{0, .., n_c - 1}`` and,
for every morphism ``f: a -> b``, the restriction table ``X(f): X(b) -> X(a)``
as a tuple.  Elements may carry labels (sieves for Omega, pairs for products,
component tables for exponentials); labels never take part in equality.
"""

from itertools import permutations, product as cartesian

from .config import DEFAULT_BUDGETS
from .errors import BudgetExceeded, PresheafError


class Presheaf:
    def __init__(self, base, sizes, restrict, labels=None, name=None, check=True):
        self.base = base
        self.sizes = tuple(sizes)
        self.restrict = tuple(tuple(r) for r in restrict)
        self.labels = None if labels is None else tuple(tuple(ls) for ls in labels)
        self.name = name
        self._label_index = None
        if check:
            _check_presheaf(self)

    # -- access ------------------------------------------------------------------

    def elements(self, c):
        return range(self.sizes[c])

    def act(self, f, x):
        """``X(f)(x)`` for ``x`` in ``X(dst f)``."""
        return self.restrict[f][x]

    def label(self, c, x):
        return x if self.labels is None else self.labels[c][x]

    def index(self, c, label):
        if self.labels is None:
            return label
        if self._label_index is None:
            self._label_index = [{lab: i for i, lab in enumerate(ls)} for ls in self.labels]
        return self._label_index[c][label]

    def total_size(self):
        return sum(self.sizes)

    def is_empty(self):
        return not any(self.sizes)

    def key(self):
        return (self.sizes, self.restrict)

    def __eq__(self, other):
        return isinstance(other, Presheaf) and self.base == other.base and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        label = self.name or "Presheaf"
        return f"<{label} sizes={self.sizes}>"

    def as_raw(self):
        C = self.base
        return {
            "sizes": {C.obj_names[c]: self.sizes[c] for c in C.objects},
            "restrict": {
                C.mor_names[f]: list(self.restrict[f]) for f in C.morphisms if not C.is_identity(f)
            },
        }


def _check_presheaf(X):
    C = X.base
    if len(X.sizes) != len(C.objects) or len(X.restrict) != len(C.morphisms):
        raise PresheafError("presheaf tables have the wrong length")
    for f in C.morphisms:
        a, b = C.src[f], C.dst[f]
        r = X.restrict[f]
        if len(r) != X.sizes[b] or any(not 0 <= v < X.sizes[a] for v in r):
            raise PresheafError(
                f"restriction along {C.mor_names[f]} is not a function X({C.obj_names[b]}) -> X({C.obj_names[a]})",
                morphism=C.mor_names[f],
            )
    for c in C.objects:
        if X.restrict[C.identity[c]] != tuple(range(X.sizes[c])):
            raise PresheafError(f"restriction along the identity of {C.obj_names[c]} is not the identity", object=C.obj_names[c])
    for (g, f), h in C.comp.items():
        rg, rf, rh = X.restrict[g], X.restrict[f], X.restrict[h]
        for x in range(X.sizes[C.dst[g]]):
            if rh[x] != rf[rg[x]]:
                raise PresheafError(
                    f"X({C.mor_names[g]} . {C.mor_names[f]}) differs from X({C.mor_names[f]}) X({C.mor_names[g]})",
                    g=C.mor_names[g], f=C.mor_names[f], element=x,
                )


class PresheafMap:
    """A natural transformation ``src -> dst`` stored as per-object tuples."""

    __slots__ = ("src", "dst", "components")

    def __init__(self, src, dst, components, check=True):
        self.src = src
        self.dst = dst
        self.components = tuple(tuple(c) for c in components)
        if check:
            _check_map(self)

    @classmethod
    def trusted(cls, src, dst, components):
        obj = cls.__new__(cls)
        obj.src, obj.dst, obj.components = src, dst, components
        return obj

    def __call__(self, c, x):
        return self.components[c][x]

    def __eq__(self, other):
        return (
            isinstance(other, PresheafMap)
            and self.src == other.src
            and self.dst == other.dst
            and self.components == other.components
        )

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"<PresheafMap {self.components}>"


def _check_map(m):
    X, Y = m.src, m.dst
    C = X.base
    if Y.base != C:
        raise PresheafError("map between presheaves on different bases")
    if len(m.components) != len(C.objects):
        raise PresheafError("map has the wrong number of components")
    for c in C.objects:
        comp = m.components[c]
        if len(comp) != X.sizes[c] or any(not 0 <= v < Y.sizes[c] for v in comp):
            raise PresheafError(f"component at {C.obj_names[c]} is not a function", object=C.obj_names[c])
    for f in C.morphisms:
        a, b = C.src[f], C.dst[f]
        ca, cb = m.components[a], m.components[b]
        rX, rY = X.restrict[f], Y.restrict[f]
        for x in range(X.sizes[b]):
            if ca[rX[x]] != rY[cb[x]]:
                raise PresheafError(
                    f"naturality fails along {C.mor_names[f]}", morphism=C.mor_names[f], element=x
                )


class Subpresheaf:
    """A sub-presheaf given canonically by literal subsets of the carriers."""

    __slots__ = ("ambient", "subset")

    def __init__(self, ambient, subset, check=True):
        self.ambient = ambient
        self.subset = tuple(frozenset(s) for s in subset)
        if check:
            C = ambient.base
            for f in C.morphisms:
                a, b = C.src[f], C.dst[f]
                for x in self.subset[b]:
                    if ambient.restrict[f][x] not in self.subset[a]:
                        raise PresheafError(
                            f"subset not closed under restriction along {C.mor_names[f]}",
                            morphism=C.mor_names[f], element=x,
                        )

    def __contains__(self, item):
        c, x = item
        return x in self.subset[c]

    def __le__(self, other):
        return all(a <= b for a, b in zip(self.subset, other.subset))

    def __eq__(self, other):
        return isinstance(other, Subpresheaf) and self.ambient == other.ambient and self.subset == other.subset

    def __hash__(self):
        return hash(self.subset)

    def __repr__(self):
        return f"<Subpresheaf {[sorted(s) for s in self.subset]}>"

    def is_full(self):
        return all(len(s) == n for s, n in zip(self.subset, self.ambient.sizes))

    def as_presheaf(self):
        """``(S, inclusion)`` with elements of ``S(c)`` in increasing ambient order."""
        X = self.ambient
        C = X.base
        elems = [sorted(s) for s in self.subset]
        pos = [{x: i for i, x in enumerate(e)} for e in elems]
        restrict = []
        for f in C.morphisms:
            a, b = C.src[f], C.dst[f]
            restrict.append(tuple(pos[a][X.restrict[f][x]] for x in elems[b]))
        labels = [tuple(X.label(c, x) for x in elems[c]) for c in C.objects]
        S = Presheaf(C, [len(e) for e in elems], restrict, labels=labels, check=False)
        incl = PresheafMap.trusted(S, X, tuple(tuple(e) for e in elems))
        return S, incl


# -- basic constructions ----------------------------------------------------------


def terminal(base):
    return Presheaf(base, [1] * len(base.objects), [(0,)] * len(base.morphisms), name="1", check=False)


def empty(base):
    return Presheaf(base, [0] * len(base.objects), [()] * len(base.morphisms), name="0", check=False)


def representable(base, c):
    """``y(c)``: elements of ``y(c)(a)`` are the morphisms ``a -> c``, labelled by id."""
    C = base
    elems = [C.hom(a, c) for a in C.objects]
    pos = [{g: i for i, g in enumerate(e)} for e in elems]
    restrict = []
    for f in C.morphisms:
        a, b = C.src[f], C.dst[f]
        restrict.append(tuple(pos[a][C.comp[(g, f)]] for g in elems[b]))
    return Presheaf(C, [len(e) for e in elems], restrict, labels=elems, name=f"y({C.obj_names[c]})", check=False)


def constant(base, n):
    """The constant presheaf on ``{0..n-1}`` (every restriction the identity)."""
    return Presheaf(base, [n] * len(base.objects), [tuple(range(n))] * len(base.morphisms), name=f"Δ{n}", check=False)


def identity_map(X):
    return PresheafMap.trusted(X, X, tuple(tuple(range(n)) for n in X.sizes))


def compose(g, f):
    """``g . f``."""
    return PresheafMap.trusted(
        f.src, g.dst, tuple(tuple(gc[v] for v in fc) for gc, fc in zip(g.components, f.components))
    )


def bang(X):
    """The unique map to the terminal presheaf."""
    return PresheafMap.trusted(X, terminal(X.base), tuple((0,) * n for n in X.sizes))


def from_empty(Y):
    return PresheafMap.trusted(empty(Y.base), Y, tuple(() for _ in Y.sizes))


def is_mono(f):
    return all(len(set(c)) == len(c) for c in f.components)


def is_epi(f):
    return all(len(set(c)) == n for c, n in zip(f.components, f.dst.sizes))


def is_iso(f):
    return is_mono(f) and is_epi(f)


def inverse(f):
    if not is_iso(f):
        return None
    comps = []
    for c, comp in enumerate(f.components):
        inv = [0] * len(comp)
        for x, y in enumerate(comp):
            inv[y] = x
        comps.append(tuple(inv))
    return PresheafMap.trusted(f.dst, f.src, tuple(comps))


def product(X, Y):
    """``(X x Y, p1, p2)``; the pair ``(x, y)`` has index ``x * |Y(c)| + y``."""
    C = X.base
    sizes = [X.sizes[c] * Y.sizes[c] for c in C.objects]
    restrict = []
    for f in C.morphisms:
        a, b = C.src[f], C.dst[f]
        rX, rY, ny = X.restrict[f], Y.restrict[f], Y.sizes[a]
        restrict.append(tuple(rX[x] * ny + rY[y] for x in range(X.sizes[b]) for y in range(Y.sizes[b])))
    labels = [
        tuple((X.label(c, x), Y.label(c, y)) for x in range(X.sizes[c]) for y in range(Y.sizes[c]))
        for c in C.objects
    ]
    P = Presheaf(C, sizes, restrict, labels=labels, check=False)
    p1 = PresheafMap.trusted(P, X, tuple(tuple(i // Y.sizes[c] for i in range(sizes[c])) if Y.sizes[c] else () for c in C.objects))
    p2 = PresheafMap.trusted(P, Y, tuple(tuple(i % Y.sizes[c] for i in range(sizes[c])) if Y.sizes[c] else () for c in C.objects))
    return P, p1, p2


def pair_map(f, g, P):
    """``<f, g>: Z -> X x Y`` into a product built by :func:`product`."""
    ny = g.dst.sizes
    return PresheafMap.trusted(
        f.src, P, tuple(tuple(fx * ny[c] + gx for fx, gx in zip(fc, gc)) for c, (fc, gc) in enumerate(zip(f.components, g.components)))
    )


def product_map(f, g, P_src, P_dst):
    """``f x g: A x B -> X x Y`` between products built by :func:`product`."""
    C = f.src.base
    comps = []
    for c in C.objects:
        nb, ny = g.src.sizes[c], g.dst.sizes[c]
        fc, gc = f.components[c], g.components[c]
        comps.append(tuple(fc[i // nb] * ny + gc[i % nb] for i in range(P_src.sizes[c])) if nb else ())
    return PresheafMap.trusted(P_src, P_dst, tuple(comps))


def pullback(f, g):
    """Pullback of ``f: X -> Z`` and ``g: Y -> Z`` as ``(P, p1, p2)``; pairs in lexicographic order."""
    X, Y = f.src, g.src
    C = X.base
    elems = [
        [(x, y) for x in range(X.sizes[c]) for y in range(Y.sizes[c]) if f.components[c][x] == g.components[c][y]]
        for c in C.objects
    ]
    pos = [{p: i for i, p in enumerate(e)} for e in elems]
    restrict = []
    for h in C.morphisms:
        a, b = C.src[h], C.dst[h]
        restrict.append(tuple(pos[a][(X.restrict[h][x], Y.restrict[h][y])] for x, y in elems[b]))
    P = Presheaf(C, [len(e) for e in elems], restrict, labels=elems, check=False)
    p1 = PresheafMap.trusted(P, X, tuple(tuple(x for x, _ in e) for e in elems))
    p2 = PresheafMap.trusted(P, Y, tuple(tuple(y for _, y in e) for e in elems))
    return P, p1, p2


def equalizer(f, g):
    X = f.src
    return Subpresheaf(
        X,
        [frozenset(x for x in range(X.sizes[c]) if f.components[c][x] == g.components[c][x]) for c in X.base.objects],
        check=False,
    )


def image(f):
    Y = f.dst
    return Subpresheaf(Y, [frozenset(comp) for comp in f.components], check=False)


def epi_mono_factorize(f):
    """``(e, m)`` with ``f = incl(m) . e``, ``e`` pointwise surjective, ``m`` the literal image."""
    m = image(f)
    S, incl = m.as_presheaf()
    pos = [{y: i for i, y in enumerate(ic)} for ic in incl.components]
    e = PresheafMap.trusted(f.src, S, tuple(tuple(pos[c][y] for y in comp) for c, comp in enumerate(f.components)))
    return e, m


def preimage(f, n):
    """``f^{-1}(n)`` for a sub-presheaf ``n`` of ``f.dst``."""
    X = f.src
    return Subpresheaf(
        X, [frozenset(x for x, y in enumerate(comp) if y in n.subset[c]) for c, comp in enumerate(f.components)], check=False
    )


def image_of_sub(f, m):
    """``f(m)``: image of a sub-presheaf of ``f.src``."""
    return Subpresheaf(f.dst, [frozenset(f.components[c][x] for x in s) for c, s in enumerate(m.subset)], check=False)


def meet(m, n):
    return Subpresheaf(m.ambient, [a & b for a, b in zip(m.subset, n.subset)], check=False)


def join(m, n):
    return Subpresheaf(m.ambient, [a | b for a, b in zip(m.subset, n.subset)], check=False)


def full_sub(X):
    return Subpresheaf(X, [frozenset(range(n)) for n in X.sizes], check=False)


def empty_sub(X):
    return Subpresheaf(X, [frozenset()] * len(X.sizes), check=False)


def sub_from_mono(m):
    """The canonical representative of the subobject given by a mono."""
    if not is_mono(m):
        raise PresheafError("not a monomorphism")
    return image(m)


def enumerate_subpresheaves(X):
    """All sub-presheaves of ``X``, ordered by per-object sorted subsets."""
    C = X.base
    order = list(C.objects)
    out = []
    chosen = [None] * len(order)

    def subsets(n):
        items = list(range(n))
        res = []
        for mask in range(1 << n):
            res.append(frozenset(i for i in items if mask >> i & 1))
        return res

    options = [subsets(X.sizes[c]) for c in order]

    def ok_upto(i):
        c = order[i]
        for f in C.morphisms:
            a, b = C.src[f], C.dst[f]
            if chosen[a] is None or chosen[b] is None or (a != c and b != c):
                continue
            r = X.restrict[f]
            if any(r[x] not in chosen[a] for x in chosen[b]):
                return False
        return True

    def rec(i):
        if i == len(order):
            out.append(Subpresheaf(X, list(chosen), check=False))
            return
        c = order[i]
        for s in options[i]:
            chosen[c] = s
            if ok_upto(i):
                rec(i + 1)
        chosen[c] = None

    rec(0)
    return out


# -- hom enumeration ----------------------------------------------------------------


def _object_order(C):
    return sorted(C.objects, key=lambda c: (-len(C.into(c)), c))


def iter_homs(X, Y, fixed=None, injective=False, surjective=False):
    """Generate every natural transformation ``X -> Y`` (deterministic order).

    ``fixed`` maps ``(c, x)`` to a forced value.  Values are propagated along
    all morphisms into an object as soon as they are chosen, so a conflict
    is detected at the earliest possible point.
    """
    C = X.base
    order = _object_order(C)
    variables = [(c, x) for c in order for x in range(X.sizes[c])]
    assign = [[None] * n for n in X.sizes]
    used = [set() for _ in C.objects] if injective else None
    into = [tuple(f for f in C.into(c) if not C.is_identity(f)) for c in C.objects]
    trail = []

    def put(c, x, y):
        """Assign and propagate; returns False on conflict (trail records changes)."""
        stack = [(c, x, y)]
        while stack:
            c, x, y = stack.pop()
            cur = assign[c][x]
            if cur is not None:
                if cur != y:
                    return False
                continue
            if injective:
                if y in used[c]:
                    return False
                used[c].add(y)
            assign[c][x] = y
            trail.append((c, x))
            for f in into[c]:
                a = C.src[f]
                stack.append((a, X.restrict[f][x], Y.restrict[f][y]))
        return True

    def undo(mark):
        while len(trail) > mark:
            c, x = trail.pop()
            if injective:
                used[c].discard(assign[c][x])
            assign[c][x] = None

    if fixed:
        for (c, x), y in sorted(fixed.items()):
            if not put(c, x, y):
                return

    if injective and any(X.sizes[c] > Y.sizes[c] for c in C.objects):
        undo(0)
        return

    def rec(i):
        while i < len(variables) and assign[variables[i][0]][variables[i][1]] is not None:
            i += 1
        if i == len(variables):
            comps = tuple(tuple(a) for a in assign)
            if surjective and any(len(set(comps[c])) != Y.sizes[c] for c in C.objects):
                return
            yield PresheafMap.trusted(X, Y, comps)
            return
        c, x = variables[i]
        for y in range(Y.sizes[c]):
            mark = len(trail)
            if put(c, x, y):
                yield from rec(i + 1)
            undo(mark)

    yield from rec(0)


def hom_set(X, Y, limit=None, **kwargs):
    """All maps ``X -> Y``; raises :class:`BudgetExceeded` past ``limit`` maps."""
    limit = DEFAULT_BUDGETS.hom_max_maps if limit is None else limit
    out = []
    for h in iter_homs(X, Y, **kwargs):
        out.append(h)
        if len(out) > limit:
            raise BudgetExceeded("hom-set enumeration budget exceeded", limit=limit)
    return out


def count_homs(X, Y, limit=None):
    limit = DEFAULT_BUDGETS.hom_max_maps if limit is None else limit
    n = 0
    for _ in iter_homs(X, Y):
        n += 1
        if n > limit:
            raise BudgetExceeded("hom-set enumeration budget exceeded", limit=limit)
    return n


def find_iso(X, Y):
    if X.sizes != Y.sizes:
        return None
    for h in iter_homs(X, Y, injective=True):
        return h
    return None


def find_map(X, Y, **kwargs):
    for h in iter_homs(X, Y, **kwargs):
        return h
    return None


def isomorphic(X, Y):
    return find_iso(X, Y) is not None


# -- exponentials ------------------------------------------------------------------


class Exponential:
    """``Y^X`` together with evaluation and (un)currying.

    An element of ``Y^X(c)`` is a map ``y(c) x X -> Y``; it is stored as its
    component tuple and used as the element label.
    """

    def __init__(self, X, Y, budgets=DEFAULT_BUDGETS):
        C = X.base
        self.X, self.Y, self.base = X, Y, C
        self.reps = [representable(C, c) for c in C.objects]
        self.prods = [product(self.reps[c], X) for c in C.objects]
        elems = []
        for c in C.objects:
            P = self.prods[c][0]
            bound = 1
            for d in C.objects:
                bound *= Y.sizes[d] ** P.sizes[d]
            maps = hom_set(P, Y, limit=budgets.exponential_max_elements) if bound else []
            elems.append(tuple(m.components for m in maps))
        self.elems = elems
        self.pos = [{e: i for i, e in enumerate(es)} for es in elems]
        restrict = []
        for f in C.morphisms:
            a, b = C.src[f], C.dst[f]
            restrict.append(tuple(self.pos[a][self._precompose(f, phi)] for phi in elems[b]))
        self.presheaf = Presheaf(C, [len(e) for e in elems], restrict, labels=elems, name="exp", check=False)

    def _pair_index(self, c, d, g, x):
        """Index of ``(g, x)`` in ``(y(c) x X)(d)``."""
        rep = self.reps[c]
        gi = rep.index(d, g)
        return gi * self.X.sizes[d] + x

    def _precompose(self, f, phi):
        """Restriction of ``phi in Y^X(b)`` along ``f: a -> b``."""
        C, X = self.base, self.X
        a, b = C.src[f], C.dst[f]
        out = []
        for d in C.objects:
            row = []
            for g in C.hom(d, a):
                fg = C.comp[(f, g)]
                base_idx = self._pair_index(b, d, fg, 0)
                for x in range(X.sizes[d]):
                    row.append(phi[d][base_idx + x])
            out.append(tuple(row))
        return tuple(out)

    def apply(self, c, i, d, g, x):
        """``phi_d(g, x)`` for the element ``i`` of ``Y^X(c)`` and ``g: d -> c``."""
        return self.elems[c][i][d][self._pair_index(c, d, g, x)]

    def ev(self, c, i, x):
        return self.apply(c, i, c, self.base.identity[c], x)

    def evaluation(self):
        """``ev: Y^X x X -> Y`` with the product from :func:`product`."""
        E, X = self.presheaf, self.X
        P, _, _ = product(E, X)
        comps = []
        for c in self.base.objects:
            comps.append(tuple(self.ev(c, i, x) for i in range(E.sizes[c]) for x in range(X.sizes[c])))
        return P, PresheafMap.trusted(P, self.Y, tuple(comps))

    def curry(self, h, Z):
        """``h: Z x X -> Y`` (product as in :func:`product`) to ``Z -> Y^X``."""
        C, X = self.base, self.X
        comps = []
        for c in C.objects:
            row = []
            for z in range(Z.sizes[c]):
                phi = []
                for d in C.objects:
                    entries = []
                    for g in C.hom(d, c):
                        zg = Z.restrict[g][z]
                        for x in range(X.sizes[d]):
                            entries.append(h.components[d][zg * X.sizes[d] + x])
                    phi.append(tuple(entries))
                row.append(self.pos[c][tuple(phi)])
            comps.append(tuple(row))
        return PresheafMap.trusted(Z, self.presheaf, tuple(comps))

    def uncurry(self, k, Z):
        C, X = self.base, self.X
        P, _, _ = product(Z, X)
        comps = []
        for c in C.objects:
            comps.append(tuple(self.ev(c, k.components[c][z], x) for z in range(Z.sizes[c]) for x in range(X.sizes[c])))
        return PresheafMap.trusted(P, self.Y, tuple(comps))


def exponential(X, Y, budgets=DEFAULT_BUDGETS):
    return Exponential(X, Y, budgets)


# -- subobject classifier -----------------------------------------------------------


class Omega:
    """Sieves on each object with restriction ``f*S = {g : f.g in S}``."""

    def __init__(self, base):
        C = base
        self.base = C
        sieves = []
        for c in C.objects:
            into = C.into(c)
            found = []
            for mask in range(1 << len(into)):
                S = frozenset(into[i] for i in range(len(into)) if mask >> i & 1)
                if all(C.comp[(f, g)] in S for f in S for g in C.into(C.src[f])):
                    found.append(S)
            found.sort(key=lambda s: (len(s), sorted(s)))
            sieves.append(tuple(found))
        self.sieves = tuple(sieves)
        self.pos = [{S: i for i, S in enumerate(ss)} for ss in sieves]
        restrict = []
        for f in C.morphisms:
            a, b = C.src[f], C.dst[f]
            restrict.append(tuple(self.pos[a][self.pullback_sieve(f, S)] for S in sieves[b]))
        self.presheaf = Presheaf(C, [len(s) for s in sieves], restrict, labels=sieves, name="Omega", check=False)
        self.top = tuple(self.pos[c][frozenset(C.into(c))] for c in C.objects)
        self.bottom = tuple(self.pos[c][frozenset()] for c in C.objects)
        self.true = PresheafMap.trusted(terminal(C), self.presheaf, tuple((t,) for t in self.top))

    def pullback_sieve(self, f, S):
        C = self.base
        return frozenset(g for g in C.into(C.src[f]) if C.comp[(f, g)] in S)

    def sieve(self, c, i):
        return self.sieves[c][i]

    def index(self, c, S):
        return self.pos[c][frozenset(S)]

    def maximal(self, c):
        return frozenset(self.base.into(c))

    def meet_index(self, c, i, k):
        return self.pos[c][self.sieves[c][i] & self.sieves[c][k]]


_OMEGA_CACHE = {}


def omega(base):
    """``(Omega, true)``; the :class:`Omega` helper is available via :func:`omega_data`."""
    data = omega_data(base)
    return data.presheaf, data.true


def omega_data(base):
    key = base.signature()
    data = _OMEGA_CACHE.get(key)
    if data is None or data.base != base:
        data = Omega(base)
        _OMEGA_CACHE[key] = data
    return data


def characteristic_map(m):
    """``chi_m(x) = {f : X(f) x in m}``."""
    X = m.ambient
    C = X.base
    O = omega_data(C)
    comps = []
    for c in C.objects:
        row = []
        for x in range(X.sizes[c]):
            S = frozenset(f for f in C.into(c) if X.restrict[f][x] in m.subset[C.src[f]])
            row.append(O.pos[c][S])
        comps.append(tuple(row))
    return PresheafMap.trusted(X, O.presheaf, tuple(comps))


def subobject_of(chi):
    """Preimage of ``true`` under ``chi: X -> Omega``."""
    X = chi.src
    O = omega_data(X.base)
    return Subpresheaf(
        X, [frozenset(x for x, s in enumerate(comp) if s == O.top[c]) for c, comp in enumerate(chi.components)], check=False
    )


# -- bounded universes ---------------------------------------------------------------


def _functoriality_plan(C):
    non_id = [f for f in C.morphisms if not C.is_identity(f)]
    pos = {f: i for i, f in enumerate(non_id)}
    for c in C.objects:
        pos[C.identity[c]] = -1
    checks = [[] for _ in non_id]
    for (g, f), h in C.comp.items():
        last = max(pos[g], pos[f], pos[h])
        if last >= 0:
            checks[last].append((g, f, h))
    return non_id, checks


def enumerate_presheaf_tables(base, sizes):
    """Every presheaf with the given carrier sizes (no iso reduction)."""
    C = base
    non_id, checks = _functoriality_plan(C)
    restrict = [None] * len(C.morphisms)
    for c in C.objects:
        restrict[C.identity[c]] = tuple(range(sizes[c]))
    out = []

    def rec(i):
        if i == len(non_id):
            out.append(Presheaf(C, sizes, restrict, check=False))
            return
        f = non_id[i]
        a, b = C.src[f], C.dst[f]
        for table in cartesian(range(sizes[a]), repeat=sizes[b]):
            restrict[f] = table
            if all(
                all(restrict[h][x] == restrict[ff][restrict[g][x]] for x in range(sizes[C.dst[g]]))
                for g, ff, h in checks[i]
            ):
                rec(i + 1)
        restrict[f] = None

    rec(0)
    return out


def relabel(X, perms):
    """Apply per-object bijections ``perms[c]: old -> new``."""
    C = X.base
    restrict = []
    for f in C.morphisms:
        a, b = C.src[f], C.dst[f]
        new = [0] * X.sizes[b]
        for x in range(X.sizes[b]):
            new[perms[b][x]] = perms[a][X.restrict[f][x]]
        restrict.append(tuple(new))
    return Presheaf(C, X.sizes, restrict, check=False)


def canonical_form(X):
    """Lexicographically least restriction table over all relabelings."""
    best = None
    for perms in cartesian(*[list(permutations(range(n))) for n in X.sizes]):
        cand = relabel(X, perms).restrict
        if best is None or cand < best:
            best = cand
    return best


_UNIVERSE_CACHE = {}


def enumerate_presheaves(base, bound, budgets=DEFAULT_BUDGETS):
    """One representative per iso class with all carriers ``<= bound``.

    Representatives are in canonical form, ordered by (total size, sizes,
    table).
    """
    if bound > budgets.carrier_max:
        raise BudgetExceeded("carrier bound exceeds budget", bound=bound, limit=budgets.carrier_max)
    if len(base.objects) > budgets.base_max_objects or len(base.morphisms) > budgets.base_max_morphisms:
        raise BudgetExceeded(
            "base category exceeds presheaf budget", objects=len(base.objects), morphisms=len(base.morphisms)
        )
    key = (base.signature(), bound)
    if key in _UNIVERSE_CACHE:
        return list(_UNIVERSE_CACHE[key])
    reps = []
    for sizes in cartesian(range(bound + 1), repeat=len(base.objects)):
        seen = set()
        for X in enumerate_presheaf_tables(base, sizes):
            cf = canonical_form(X)
            if cf not in seen:
                seen.add(cf)
                reps.append(Presheaf(base, sizes, cf, check=False))
    reps.sort(key=lambda X: (X.total_size(), X.sizes, X.restrict))
    for i, X in enumerate(reps):
        X.name = f"U{bound}[{i}]"
    _UNIVERSE_CACHE[key] = tuple(reps)
    return reps


def parse_presheaf(base, raw):
    """Presheaf from ``{"sizes": {obj: n}, "restrict": {mor: [..]}}`` (identities implicit)."""
    sizes = [0] * len(base.objects)
    for nm, n in raw.get("sizes", {}).items():
        sizes[base.obj(nm)] = int(n)
    restrict = [None] * len(base.morphisms)
    for c in base.objects:
        restrict[base.identity[c]] = tuple(range(sizes[c]))
    for nm, table in raw.get("restrict", {}).items():
        restrict[base.mor(nm)] = tuple(table)
    for f in base.morphisms:
        if restrict[f] is None:
            raise PresheafError(f"missing restriction along {base.mor_names[f]}", morphism=base.mor_names[f])
    return Presheaf(base, sizes, restrict, name=raw.get("name"))
