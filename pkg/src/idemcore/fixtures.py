"""Fixture categories, sites and problem documents used by the suite and tests."""

from . import factsys as fs
from . import fincat as fc

# -- categories ---------------------------------------------------------------------


def terminal():
    return fc.validate_category({"objects": ["*"]}, name="terminal")


def chain(n):
    return fc.category_from_preorder(range(n), lambda a, b: a <= b, name=f"chain{n}")


def poset2():
    return chain(2)


def chain3():
    return chain(3)


def parallel_pair():
    return fc.validate_category(
        {"objects": ["a", "b"], "morphisms": [["f", "a", "b"], ["g", "a", "b"]]}, name="parallel_pair"
    )


def diamond():
    order = {("b", "l"), ("b", "r"), ("b", "t"), ("l", "t"), ("r", "t")}
    return fc.category_from_preorder(["b", "l", "r", "t"], lambda x, y: x == y or (x, y) in order, name="diamond")


def vee():
    return fc.category_from_preorder(["l", "r", "t"], lambda x, y: x == y or y == "t", name="vee")


def wedge():
    return fc.category_from_preorder(["b", "l", "r"], lambda x, y: x == y or x == "b", name="wedge")


def split_idempotent():
    return fc.validate_category(
        {
            "objects": ["A", "B"],
            "morphisms": [["r", "A", "B"], ["s", "B", "A"], ["e", "A", "A"]],
            "compose": [["s", "r", "e"], ["r", "s", "id_B"], ["e", "e", "e"], ["r", "e", "r"], ["e", "s", "s"]],
        },
        name="split_idempotent",
    )


def finset(sizes=(0, 1, 2)):
    return fc.category_of_functions(sizes, name="finset" + "".join(map(str, sizes)))


def z2():
    return fc.category_from_monoid([[0, 1], [1, 0]], names=["id", "t"], name="Z2")


SITE_BASES = {
    "terminal": terminal,
    "poset2": poset2,
    "chain3": chain3,
    "parallel_pair": parallel_pair,
}

CATEGORY_PRESETS = {
    **SITE_BASES,
    "chain4": lambda: chain(4),
    "chain5": lambda: chain(5),
    "chain6": lambda: chain(6),
    "diamond": diamond,
    "vee": vee,
    "wedge": wedge,
    "split_idempotent": split_idempotent,
    "finset012": finset,
    "finset12": lambda: finset((1, 2)),
    "z2": z2,
}

POSET_CORE_FIXTURES = ("terminal", "poset2", "chain3", "chain4", "chain5", "chain6", "diamond", "vee", "wedge")
DECLARED_CORE_FIXTURES = ("parallel_pair", "split_idempotent", "finset12", "finset012", "z2")


def declared_systems(C):
    """Proper factorization systems (every morphism factors) on a category with ≤ 12 morphisms."""
    out = []
    for E, M in fs.enumerate_prefactorization_systems(C):
        if fs.check_proper(C, E, M) and all(fs.factor(C, f, E, M) is not None for f in C.morphisms):
            out.append((E, M))
    return out


def core_instances():
    """``(label, C, E, M)`` for every category/system pair of the core campaign."""
    out = []
    for nm in POSET_CORE_FIXTURES:
        C = CATEGORY_PRESETS[nm]()
        out.append((f"{nm}/(Iso,All)", C, fs.isos(C), fs.all_morphisms(C)))
    for nm in DECLARED_CORE_FIXTURES:
        C = CATEGORY_PRESETS[nm]()
        for i, (E, M) in enumerate(declared_systems(C)):
            out.append((f"{nm}/system{i}", C, E, M))
    return out


# -- problem documents -----------------------------------------------------------------

_POSET2 = {"preset": "poset2"}
_PP = {"preset": "parallel_pair"}
_TERM = {"preset": "terminal"}


def _doc(**sections):
    return {"version": 1, **sections}


def _reflect_poset2_monad():
    # reflection of 0 -> 1 onto {1}
    return {
        "category": "P",
        "functor": "R",
        "eta": {"0": "0<1", "1": "id_1"},
        "mu": {"0": "id_1", "1": "id_1"},
    }


_R_FUNCTOR = {"source": "P", "target": "P", "objects": {"0": "1", "1": "1"}, "morphisms": {"0<1": "id_1"}}


VALID_DOCUMENTS = {
    "terminal_category": _doc(categories={"T": {"objects": ["*"]}}),
    "poset2_category": _doc(categories={"P": {"objects": ["0", "1"], "morphisms": [["f", "0", "1"]]}}),
    "chain3_category": _doc(
        categories={
            "C": {
                "objects": ["0", "1", "2"],
                "morphisms": [["a", "0", "1"], ["b", "1", "2"], ["c", "0", "2"]],
                "compose": [["b", "a", "c"]],
            }
        }
    ),
    "parallel_pair_category": _doc(categories={"PP": _PP}),
    "split_idempotent_category": _doc(categories={"S": {"preset": "split_idempotent"}}),
    "z2_category": _doc(
        categories={
            "G": {"objects": ["*"], "identities": {"*": "e"}, "morphisms": [["t", "*", "*"]], "compose": [["t", "t", "e"]]}
        }
    ),
    "finset_category": _doc(categories={"F": {"preset": "finset12"}}),
    "identity_functor": _doc(
        categories={"P": _POSET2},
        functors={"I": {"source": "P", "target": "P", "objects": {"0": "0", "1": "1"}, "morphisms": {"0<1": "0<1"}}},
    ),
    "identity_monad": _doc(categories={"P": _POSET2}, monads={"T": {"category": "P", "identity": True}}),
    "reflection_monad": _doc(categories={"P": _POSET2}, functors={"R": _R_FUNCTOR}, monads={"T": _reflect_poset2_monad()}),
    "enumerated_monad": _doc(categories={"C": {"preset": "chain3"}}, monads={"T": {"category": "C", "enumerated": 3}}),
    "reflection_adjunction": _doc(
        categories={"P": _POSET2, "One": {"objects": ["1"]}},
        functors={
            "L": {"source": "P", "target": "One", "objects": {"0": "1", "1": "1"}, "morphisms": {"0<1": "id_1"}},
            "Inc": {"source": "One", "target": "P", "objects": {"1": "1"}, "morphisms": {}},
        },
        adjunctions={"A": {"left": "L", "right": "Inc", "unit": {"0": "0<1", "1": "id_1"}, "counit": {"1": "id_1"}}},
    ),
    "epi_mono_factsys": _doc(categories={"F": {"preset": "finset012"}}, factsys={"EM": {"category": "F", "E": "epi", "M": "mono"}}),
    "terminal_presheaf": _doc(
        categories={"P": _POSET2},
        sites={"S": {"category": "P", "topologies": {"id": "identity"}}},
        presheaves={"one": {"site": "S", "sizes": {"0": 1, "1": 1}, "restrict": {"0<1": [0]}}},
    ),
    "dense_site": _doc(
        categories={"P": _POSET2},
        sites={"S": {"category": "P", "topologies": {"dense": {"covers": {"0": [["id_0"]], "1": [["0<1"], ["0<1", "id_1"]]}}}}},
        presheaves={"two": {"site": "S", "sizes": {"0": 2, "1": 2}, "restrict": {"0<1": [0, 1]}}},
        campaigns={"c": {"command": "sheafify", "presheaf": "two", "topology": "dense", "method": "both"}},
    ),
    "bisite": _doc(
        categories={"P": _POSET2},
        sites={"S": {"category": "P", "topologies": {"id": "identity", "all": "everything"}}},
        bisites={"Q": {"site": "S", "J": "id", "K": "all", "bound": 2}},
    ),
}


BROKEN_DOCUMENTS = {
    # name: (document, expected error kind, expected witness subset)
    "missing_composite": (
        _doc(categories={"C": {"objects": ["0", "1", "2"], "morphisms": [["a", "0", "1"], ["b", "1", "2"]]}}),
        "MissingComposite",
        {"g": "b", "f": "a"},
    ),
    "non_associative": (
        _doc(
            categories={
                "M": {
                    "objects": ["*"],
                    "identities": {"*": "1"},
                    "morphisms": [["x", "*", "*"], ["y", "*", "*"]],
                    # a magma that is not associative: x.x = y, everything else x
                    "compose": [["x", "x", "y"], ["x", "y", "x"], ["y", "x", "x"], ["y", "y", "x"]],
                }
            }
        ),
        "NonAssociative",
        {},
    ),
    "wrong_endpoints": (
        _doc(categories={"C": {"objects": ["0", "1"], "morphisms": [["f", "0", "1"]], "compose": [["id_1", "f", "id_1"]]}}),
        "EndpointMismatch",
        {"g": "id_1", "f": "f", "h": "id_1"},
    ),
    "identity_not_neutral": (
        _doc(
            categories={
                "C": {
                    "objects": ["*"],
                    "morphisms": [["x", "*", "*"]],
                    "compose": [["id_*", "x", "id_*"], ["x", "x", "x"]],
                }
            }
        ),
        "BadIdentity",
        {"morphism": "x"},
    ),
    "unknown_object": (
        _doc(categories={"C": {"objects": ["0"], "morphisms": [["f", "0", "9"]]}}),
        "UnknownReference",
        {"object": "9"},
    ),
    "functor_breaks_endpoints": (
        _doc(
            categories={"P": _POSET2},
            functors={"F": {"source": "P", "target": "P", "objects": {"0": "1", "1": "0"}, "morphisms": {"0<1": "0<1"}}},
        ),
        "FunctorError",
        {"morphism": "0<1"},
    ),
    "functor_breaks_composition": (
        _doc(
            categories={"C": {"preset": "split_idempotent"}},
            functors={
                "F": {
                    "source": "C",
                    "target": "C",
                    "objects": {"A": "A", "B": "B"},
                    "morphisms": {"r": "r", "s": "s", "e": "id_A"},
                }
            },
        ),
        "FunctorError",
        {"g": "s", "f": "r"},
    ),
    "unnatural_transformation": (
        _doc(
            categories={"P": _POSET2, "PP": _PP},
            functors={
                "F": {"source": "P", "target": "PP", "objects": {"0": "a", "1": "b"}, "morphisms": {"0<1": "f"}},
                "G": {"source": "P", "target": "PP", "objects": {"0": "a", "1": "b"}, "morphisms": {"0<1": "g"}},
            },
            transformations={"t": {"source": "F", "target": "G", "components": {"0": "id_a", "1": "id_b"}}},
        ),
        "NotNatural",
        {"morphism": "0<1"},
    ),
    "monad_dangling_functor": (
        _doc(
            categories={"P": _POSET2},
            functors={"R": {"source": "P", "target": "P", "objects": {"0": "1", "1": "1"}, "morphisms": {"0<1": "id_1"}}},
            monads={
                "T": {
                    "category": "P",
                    "functor": "R",
                    "eta": {"0": "0<1", "1": "id_1"},
                    "mu": {"0": "id_1", "1": "id_1"},
                },
                "Bad": {"category": "P", "functor": "Z", "eta": {"0": "id_0", "1": "id_1"}, "mu": {"0": "id_0", "1": "id_1"}},
            },
            campaigns={},
        ),
        "DanglingRef",
        {"ref": "Z"},
    ),
    "monad_unit_law_eta_t": (
        _doc(
            categories={"G": {"preset": "z2"}},
            functors={"I": {"source": "G", "target": "G", "objects": {"*": "*"}, "morphisms": {"t": "t"}}},
            monads={"T": {"category": "G", "functor": "I", "eta": {"*": "t"}, "mu": {"*": "id"}}},
        ),
        "UnitLawFail",
        {"object": "*"},
    ),
    "monad_eta_wrong_endpoints": (
        _doc(
            categories={"P": _POSET2},
            functors={"R": _R_FUNCTOR},
            monads={"T": {"category": "P", "functor": "R", "eta": {"0": "id_0", "1": "id_1"}, "mu": {"0": "id_1", "1": "id_1"}}},
        ),
        "NotNatural",
        {"object": "0"},
    ),
    "adjunction_triangle": (
        _doc(
            categories={"G": {"preset": "z2"}},
            functors={"I": {"source": "G", "target": "G", "objects": {"*": "*"}, "morphisms": {"t": "t"}}},
            adjunctions={"A": {"left": "I", "right": "I", "unit": {"*": "t"}, "counit": {"*": "id"}}},
        ),
        "TriangleFail",
        {"side": "F", "object": "*"},
    ),
    "presheaf_not_functorial": (
        _doc(
            categories={"C": {"preset": "chain3"}},
            sites={"S": {"category": "C", "topologies": {"id": "identity"}}},
            presheaves={"X": {"site": "S", "sizes": {"0": 2, "1": 2, "2": 2}, "restrict": {"0<1": [0, 1], "1<2": [0, 1], "0<2": [1, 0]}}},
        ),
        "PresheafError",
        {},
    ),
    "topology_not_stable": (
        _doc(
            categories={"P": _POSET2},
            sites={"S": {"category": "P", "topologies": {"bad": {"covers": {"0": [["id_0"]], "1": [["0<1", "id_1"], []]}}}}},
        ),
        "TopologyError",
        {"axiom": "stability"},
    ),
    "lt_not_meet_preserving": (
        _doc(
            categories={"P": _POSET2},
            sites={
                "S": {
                    "category": "P",
                    "topologies": {
                        "bad": {
                            "j": {
                                "0": [[[], ["id_0"]], [["id_0"], ["id_0"]]],
                                "1": [[[], ["0<1", "id_1"]], [["0<1"], ["0<1"]], [["0<1", "id_1"], ["0<1", "id_1"]]],
                            }
                        }
                    },
                }
            },
        ),
        "TopologyError",
        {"axiom": "j preserves meets", "object": "1", "sieves": [[], ["0<1"]]},
    ),
    "unknown_field": (
        _doc(categories={"T": {"objects": ["*"], "colour": "red"}}),
        "SchemaError",
        {"field": "colour"},
    ),
    "campaign_dangling_monad": (
        _doc(categories={"P": _POSET2}, campaigns={"c": {"command": "core", "monad": "T"}}),
        "DanglingRef",
        {"ref": "T"},
    ),
    "unknown_version": (
        {"version": 7, "categories": {"T": {"objects": ["*"]}}},
        "SchemaError",
        {"field": "version"},
    ),
}
