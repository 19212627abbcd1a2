"""Problem files: JSON schema, reference resolution and object construction.

A problem file is a JSON object with a ``version`` tag and named entities in
sections (``categories``, ``functors``, ``monads``, ...).  Parsing checks the
schema and that every reference resolves; the mathematical objects are
built (and validated) lazily by :class:`Problem`.
"""

import json
import re

import jsonschema

from . import factsys as fs
from . import fincat as fc
from . import lttop as lt
from . import presheaf as ps
from .config import DEFAULT_BUDGETS
from .errors import DanglingRef, FunctorError, NotNatural, SchemaError, TopologyError
from .fixtures import CATEGORY_PRESETS

VERSION = 1

_NAME_MAP = {"type": "object", "additionalProperties": {"type": "string"}}
_CLASS = {
    "oneOf": [
        {"enum": ["iso", "all", "mono", "epi"]},
        {"type": "array", "items": {"type": "string"}},
    ]
}
_SIEVE = {"type": "array", "items": {"type": "string"}}

_CATEGORY = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "name": {"type": "string"},
                "objects": {"type": "array", "items": {"type": "string"}},
                "identities": _NAME_MAP,
                "morphisms": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "string"}, "minItems": 3, "maxItems": 3},
                },
                "compose": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "string"}, "minItems": 3, "maxItems": 3},
                },
            },
            "required": ["objects"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"preset": {"enum": sorted(CATEGORY_PRESETS)}},
            "required": ["preset"],
            "additionalProperties": False,
        },
    ]
}

_TOPOLOGY = {
    "oneOf": [
        {"enum": ["identity", "everything"]},
        {"type": "object", "properties": {"index": {"type": "integer", "minimum": 0}}, "required": ["index"], "additionalProperties": False},
        {
            "type": "object",
            "properties": {"covers": {"type": "object", "additionalProperties": {"type": "array", "items": _SIEVE}}},
            "required": ["covers"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "j": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "array",
                        "items": {"type": "array", "items": _SIEVE, "minItems": 2, "maxItems": 2},
                    },
                }
            },
            "required": ["j"],
            "additionalProperties": False,
        },
    ]
}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_CAMPAIGN = _obj(
    {
        "command": {"enum": ["validate", "orth", "factsys-check", "core", "lt-enum", "sheafify", "verify-lt", "quasitopos"]},
        "category": {"type": "string"},
        "monad": {"type": "string"},
        "sigma": {"type": "string"},
        "factsys": {"type": "string"},
        "site": {"type": "string"},
        "presheaf": {"type": "string"},
        "topology": {"type": "string"},
        "bisite": {"type": "string"},
        "method": {"enum": ["core", "plus", "both"]},
        "bound": {"type": "integer", "minimum": 0},
        "pair": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
        "enriched": {"type": "boolean"},
    },
    ["command"],
)

SCHEMA = _obj(
    {
        "version": {"const": VERSION},
        "description": {"type": "string"},
        "budgets": _obj({k: {"type": "integer", "minimum": 0} for k in DEFAULT_BUDGETS.as_dict()}),
        "categories": {"type": "object", "additionalProperties": _CATEGORY},
        "functors": {
            "type": "object",
            "additionalProperties": _obj(
                {"source": {"type": "string"}, "target": {"type": "string"}, "objects": _NAME_MAP, "morphisms": _NAME_MAP},
                ["source", "target", "objects"],
            ),
        },
        "transformations": {
            "type": "object",
            "additionalProperties": _obj(
                {"source": {"type": "string"}, "target": {"type": "string"}, "components": _NAME_MAP},
                ["source", "target", "components"],
            ),
        },
        "monads": {
            "type": "object",
            "additionalProperties": _obj(
                {
                    "category": {"type": "string"},
                    "functor": {"type": "string"},
                    "eta": _NAME_MAP,
                    "mu": _NAME_MAP,
                    "identity": {"const": True},
                    "enumerated": {"type": "integer", "minimum": 0},
                    "factsys": {"type": "string"},
                },
                ["category"],
            ),
        },
        "adjunctions": {
            "type": "object",
            "additionalProperties": _obj(
                {"left": {"type": "string"}, "right": {"type": "string"}, "unit": _NAME_MAP, "counit": _NAME_MAP},
                ["left", "right", "unit", "counit"],
            ),
        },
        "factsys": {
            "type": "object",
            "additionalProperties": _obj({"category": {"type": "string"}, "E": _CLASS, "M": _CLASS}, ["category", "E", "M"]),
        },
        "classes": {
            "type": "object",
            "additionalProperties": _obj({"category": {"type": "string"}, "morphisms": _CLASS}, ["category", "morphisms"]),
        },
        "sites": {
            "type": "object",
            "additionalProperties": _obj(
                {"category": {"type": "string"}, "topologies": {"type": "object", "additionalProperties": _TOPOLOGY}},
                ["category"],
            ),
        },
        "presheaves": {
            "type": "object",
            "additionalProperties": _obj(
                {
                    "site": {"type": "string"},
                    "sizes": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
                    "restrict": {
                        "type": "object",
                        "additionalProperties": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    },
                },
                ["site", "sizes"],
            ),
        },
        "bisites": {
            "type": "object",
            "additionalProperties": _obj(
                {"site": {"type": "string"}, "J": {"type": "string"}, "K": {"type": "string"}, "bound": {"type": "integer", "minimum": 0}},
                ["site", "J", "K"],
            ),
        },
        "campaigns": {"type": "object", "additionalProperties": _CAMPAIGN},
    },
    ["version"],
)

# section -> {field: referenced section}
_REFS = {
    "functors": {"source": "categories", "target": "categories"},
    "transformations": {"source": "functors", "target": "functors"},
    "monads": {"category": "categories", "functor": "functors", "factsys": "factsys"},
    "adjunctions": {"left": "functors", "right": "functors"},
    "factsys": {"category": "categories"},
    "classes": {"category": "categories"},
    "sites": {"category": "categories"},
    "presheaves": {"site": "sites"},
    "bisites": {"site": "sites"},
    "campaigns": {
        "category": "categories",
        "monad": "monads",
        "sigma": "classes",
        "factsys": "factsys",
        "site": "sites",
        "presheaf": "presheaves",
        "bisite": "bisites",
    },
}


def _locate(text, token):
    """1-based (line, column) of the first ``"token"`` used as a key, else (0, 0)."""
    if text is None:
        return 0, 0
    m = re.search(r'"' + re.escape(token) + r'"\s*:', text)
    if not m:
        return 0, 0
    line = text.count("\n", 0, m.start()) + 1
    col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
    return line, col


def _schema_error(err, text):
    path = [str(p) for p in err.absolute_path]
    field = None
    if err.validator == "additionalProperties":
        allowed = set(err.schema.get("properties", {}))
        extra = sorted(set(err.instance) - allowed)
        field = extra[0] if extra else None
    elif err.validator == "required":
        m = re.match(r"'([^']*)'", err.message)
        field = m.group(1) if m else None
    elif err.validator == "oneOf":
        # report the most specific sub-error (an unknown field if there is one)
        for sub in sorted(err.context, key=lambda e: -len(e.absolute_path)):
            if sub.validator == "additionalProperties":
                return _schema_error(sub, text)
        field = path[-1] if path else None
    else:
        field = path[-1] if path else None
    line, col = _locate(text, field) if field else (0, 0)
    if field == "version" and err.validator == "const":
        msg = f"unsupported version {err.instance!r}; expected {VERSION}"
    elif err.validator == "additionalProperties":
        msg = f"unknown field {field!r} at /{'/'.join(path)}"
    else:
        msg = f"{err.message} at /{'/'.join(path)}"
    return SchemaError(msg, field=field, path="/" + "/".join(path), line=line, column=col)


def check_references(doc):
    for section, fields in _REFS.items():
        for ident, entry in sorted(doc.get(section, {}).items()):
            for fld, target in fields.items():
                ref = entry.get(fld)
                if ref is None:
                    continue
                if ref not in doc.get(target, {}):
                    raise DanglingRef(
                        f"{section}/{ident}: {fld} refers to undefined {target[:-1] if target.endswith('s') else target} {ref!r}",
                        section=section, entity=ident, field=fld, ref=ref,
                    )
    for ident, entry in doc.get("bisites", {}).items():
        tops = doc["sites"][entry["site"]].get("topologies", {})
        for fld in ("J", "K"):
            if entry[fld] not in tops:
                raise DanglingRef(f"bisites/{ident}: unknown topology {entry[fld]!r}", section="bisites", entity=ident, field=fld, ref=entry[fld])
    for ident, entry in doc.get("campaigns", {}).items():
        top = entry.get("topology")
        if top is not None:
            site = entry.get("site") or (doc["presheaves"][entry["presheaf"]]["site"] if "presheaf" in entry else None)
            sites = [site] if site else list(doc.get("sites", {}))
            if not any(top in doc["sites"][s].get("topologies", {}) for s in sites):
                raise DanglingRef(f"campaigns/{ident}: unknown topology {top!r}", section="campaigns", entity=ident, field="topology", ref=top)


def parse_document(doc, text=None):
    """Validate an already decoded document.

    Without the original ``text``, error positions refer to the document
    serialized with ``json.dumps(doc, indent=2)``.
    """
    if text is None:
        text = json.dumps(doc, indent=2)
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.validator))
    if errors:
        # prefer version problems, then unknown fields
        errors.sort(key=lambda e: (e.validator != "const", e.validator != "additionalProperties"))
        raise _schema_error(errors[0], text)
    check_references(doc)
    return Problem(doc)


def parse(data):
    """Parse problem file bytes (or text) into a :class:`Problem`."""
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise SchemaError("problem file must be a JSON object", line=1, column=1)
    return parse_document(doc, text)


def load(path):
    with open(path, "rb") as fh:
        return parse(fh.read())


class Problem:
    """Parsed problem with cached, validated objects."""

    def __init__(self, doc):
        self.doc = doc
        self.budgets = DEFAULT_BUDGETS.with_overrides(doc.get("budgets", {}))
        self._cache = {}

    def _memo(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def ids(self, section):
        return sorted(self.doc.get(section, {}))

    # -- fincat ------------------------------------------------------------------

    def category(self, ident):
        def build():
            raw = self.doc["categories"][ident]
            if "preset" in raw:
                return CATEGORY_PRESETS[raw["preset"]]()
            return fc.validate_category(raw, name=raw.get("name", ident))

        return self._memo(("category", ident), build)

    def functor(self, ident):
        def build():
            raw = self.doc["functors"][ident]
            C, D = self.category(raw["source"]), self.category(raw["target"])
            obj_map = [D.obj(raw["objects"][C.obj_names[c]]) if C.obj_names[c] in raw["objects"] else None for c in C.objects]
            missing = [C.obj_names[c] for c in C.objects if obj_map[c] is None]
            if missing:
                raise FunctorError(f"object {missing[0]!r} is not mapped", object=missing[0])
            mors = raw.get("morphisms", {})
            mor_map = []
            for f in C.morphisms:
                nm = C.mor_names[f]
                if nm in mors:
                    mor_map.append(D.mor(mors[nm]))
                elif C.is_identity(f):
                    mor_map.append(D.identity[obj_map[C.src[f]]])
                else:
                    raise FunctorError(f"morphism {nm!r} is not mapped", morphism=nm)
            return fc.FinFunctor(C, D, obj_map, mor_map)

        return self._memo(("functor", ident), build)

    def _components(self, F, G, table):
        C, D = F.source, F.target
        out = []
        for c in C.objects:
            nm = C.obj_names[c]
            if nm not in table:
                raise NotNatural(f"no component at {nm!r}", object=nm)
            out.append(D.mor(table[nm]))
        return out

    def transformation(self, ident):
        def build():
            raw = self.doc["transformations"][ident]
            F, G = self.functor(raw["source"]), self.functor(raw["target"])
            return fc.FinNatTrans(F, G, self._components(F, G, raw["components"]))

        return self._memo(("transformation", ident), build)

    def monad(self, ident):
        def build():
            raw = self.doc["monads"][ident]
            C = self.category(raw["category"])
            if raw.get("identity"):
                return fc.identity_monad(C)
            if "enumerated" in raw:
                monads = fc.enumerate_monads(C, self.budgets)
                k = raw["enumerated"]
                if k >= len(monads):
                    raise DanglingRef(f"monad index {k} out of range ({len(monads)} monads)", ref=k, count=len(monads))
                return monads[k]
            if "functor" not in raw:
                raise SchemaError("monad needs 'functor', 'identity' or 'enumerated'", field="functor", path=f"/monads/{ident}")
            T = self.functor(raw["functor"])
            I = fc.identity_functor(C)
            TT = fc.compose_functors(T, T)
            eta = fc.FinNatTrans(I, T, self._components(I, T, raw.get("eta", {})))
            mu = fc.FinNatTrans(TT, T, self._components(TT, T, raw.get("mu", {})))
            return fc.check_monad(T, eta, mu)

        return self._memo(("monad", ident), build)

    def adjunction(self, ident):
        def build():
            raw = self.doc["adjunctions"][ident]
            F, G = self.functor(raw["left"]), self.functor(raw["right"])
            GF, FG = fc.compose_functors(G, F), fc.compose_functors(F, G)
            I_B, I_C = fc.identity_functor(F.source), fc.identity_functor(F.target)
            return fc.make_adjunction(F, G, self._components(I_B, GF, raw["unit"]), self._components(FG, I_C, raw["counit"]))

        return self._memo(("adjunction", ident), build)

    def morphism_class(self, C, spec):
        if spec == "iso":
            return fs.isos(C)
        if spec == "all":
            return fs.all_morphisms(C)
        if spec == "mono":
            return fs.monos(C)
        if spec == "epi":
            return fs.epis(C)
        return frozenset(C.mor(nm) for nm in spec)

    def factsys(self, ident):
        def build():
            raw = self.doc["factsys"][ident]
            C = self.category(raw["category"])
            return C, self.morphism_class(C, raw["E"]), self.morphism_class(C, raw["M"])

        return self._memo(("factsys", ident), build)

    def sigma(self, ident):
        raw = self.doc["classes"][ident]
        C = self.category(raw["category"])
        return self.morphism_class(C, raw["morphisms"])

    def monad_factsys(self, ident):
        """``(E, M)`` for the monad: declared, else ``(Iso, All)``."""
        raw = self.doc["monads"][ident]
        if "factsys" in raw:
            C, E, M = self.factsys(raw["factsys"])
            return E, M
        C = self.category(raw["category"])
        return fs.isos(C), fs.all_morphisms(C)

    # -- presheaves and sites ----------------------------------------------------------

    def site_category(self, ident):
        return self.category(self.doc["sites"][ident]["category"])

    def topology(self, site, name):
        def build():
            C = self.site_category(site)
            raw = self.doc["sites"][site].get("topologies", {})[name]
            if raw == "identity":
                t = lt.identity_topology(C)
            elif raw == "everything":
                t = lt.top_topology(C)
            elif "index" in raw:
                tops = lt.enumerate_lt_topologies(C, self.budgets)
                if raw["index"] >= len(tops):
                    raise DanglingRef(f"topology index {raw['index']} out of range", ref=raw["index"], count=len(tops))
                t = tops[raw["index"]]
            elif "covers" in raw:
                covers = [set() for _ in C.objects]
                for obj, sieves in raw["covers"].items():
                    for S in sieves:
                        covers[C.obj(obj)].add(frozenset(C.mor(m) for m in S))
                O = ps.omega_data(C)
                for c in C.objects:
                    for S in covers[c]:
                        if S not in O.pos[c]:
                            raise TopologyError("covering family is not a sieve", object=C.obj_names[c], sieve=sorted(C.mor_names[f] for f in S))
                covers = tuple(frozenset(s) for s in covers)
                bad = lt.grothendieck_failure(C, covers)
                if bad is not None:
                    raise TopologyError(f"not a Grothendieck topology: {bad['axiom']}", **bad)
                t = lt.lt_from_grothendieck(lt.GrothendieckTopology(C, covers))
            else:
                O = ps.omega_data(C)
                comps = [list(range(len(O.sieves[c]))) for c in C.objects]
                seen = [set() for _ in C.objects]
                for obj, pairs in raw["j"].items():
                    c = C.obj(obj)
                    for src, dst in pairs:
                        S = frozenset(C.mor(m) for m in src)
                        R = frozenset(C.mor(m) for m in dst)
                        for X in (S, R):
                            if X not in O.pos[c]:
                                raise TopologyError("j entry is not a sieve", object=obj, sieve=sorted(C.mor_names[f] for f in X))
                        comps[c][O.pos[c][S]] = O.pos[c][R]
                        seen[c].add(O.pos[c][S])
                for c in C.objects:
                    if len(seen[c]) != len(O.sieves[c]):
                        raise TopologyError("j must be given on every sieve", object=C.obj_names[c])
                try:
                    j = ps.PresheafMap(O.presheaf, O.presheaf, [tuple(r) for r in comps])
                except Exception as exc:
                    raise TopologyError(f"j is not natural: {exc}") from None
                bad = lt.lt_axiom_failure(C, j)
                if bad is not None:
                    raise TopologyError(f"not a Lawvere–Tierney topology: {bad['axiom']}", **bad)
                t = lt.LTTopology(C, j)
            t.name = name
            return t

        return self._memo(("topology", site, name), build)

    def find_topology(self, name, site=None):
        sites = [site] if site else self.ids("sites")
        for s in sites:
            if name in self.doc["sites"][s].get("topologies", {}):
                return self.topology(s, name)
        raise DanglingRef(f"unknown topology {name!r}", ref=name)

    def presheaf(self, ident):
        def build():
            raw = self.doc["presheaves"][ident]
            C = self.site_category(raw["site"])
            return ps.parse_presheaf(C, {"sizes": raw["sizes"], "restrict": raw.get("restrict", {}), "name": ident})

        return self._memo(("presheaf", ident), build)

    def bisite(self, ident):
        raw = self.doc["bisites"][ident]
        C = self.site_category(raw["site"])
        return C, self.topology(raw["site"], raw["J"]), self.topology(raw["site"], raw["K"]), raw.get("bound", 2)

    # -- everything ---------------------------------------------------------------------

    def entities(self):
        """``(kind, id, builder)`` in dependency order."""
        kinds = [
            ("categories", self.category),
            ("functors", self.functor),
            ("transformations", self.transformation),
            ("monads", self.monad),
            ("adjunctions", self.adjunction),
            ("factsys", self.factsys),
            ("classes", self.sigma),
            ("presheaves", self.presheaf),
        ]
        for section, build in kinds:
            for ident in self.ids(section):
                yield section, ident, (lambda b=build, i=ident: b(i))
        for site in self.ids("sites"):
            yield "sites", site, (lambda s=site: self.site_category(s))
            for name in sorted(self.doc["sites"][site].get("topologies", {})):
                yield "topologies", f"{site}/{name}", (lambda s=site, n=name: self.topology(s, n))
        for ident in self.ids("bisites"):
            yield "bisites", ident, (lambda i=ident: self.bisite(i))


def schema_document():
    """The JSON schema as shipped in ``docs/schema.json``."""
    return json.dumps(SCHEMA, indent=2, sort_keys=True) + "\n"
