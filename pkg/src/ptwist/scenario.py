"""Scenario files: JSON documents naming algebras, modules, morphisms and
tasks. Parsing normalizes the document, checks it and builds every object
before any task runs.

Errors carry a code and a location; :attr:`ScenarioError.category` maps the
code onto the CLI exit-code contract (``parse`` or ``validation``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Any

import numpy as np

from . import dgmod, galg, twistops
from .exactlin import FieldError, FieldSpec

SCHEMA_VERSION = 1

TASKS = (
    "classify",
    "ext_dims",
    "cohomology_dims",
    "spherical_twist",
    "p_twist",
    "double_twist",
    "minimal_model",
    "find_quasi_iso",
    "euler_pairing",
    "ambient_profile",
    "spherical_after_pushforward",
)
# name kept free for an ambient-category extension
RESERVED_TASKS = ("intertwining",)

PARSE_CODES = {"E_JSON", "E_IO", "E_SCHEMA"}


class ScenarioError(Exception):
    def __init__(self, code: str, message: str, location: str = ""):
        super().__init__(f"{code} at {location or '<root>'}: {message}")
        self.code = code
        self.message = message
        self.location = location

    @property
    def category(self) -> str:
        return "parse" if self.code in PARSE_CODES else "validation"

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message, "location": self.location, "category": self.category}


# -- normalization ----------------------------------------------------------


def _expect_type(value, typ, loc, what):
    if not isinstance(value, typ) or (typ is int and isinstance(value, bool)):
        name = typ.__name__ if isinstance(typ, type) else "/".join(t.__name__ for t in typ)
        raise ScenarioError("E_SCHEMA", f"{what} must be {name}", loc)
    return value


def _require(d: dict, key: str, loc: str):
    if key not in d:
        raise ScenarioError("E_SCHEMA", f"missing key {key!r}", loc)
    return d[key]


def _terms(raw, loc) -> list[dict]:
    _expect_type(raw, list, loc, "terms")
    out = []
    for k, t in enumerate(raw):
        tl = f"{loc}[{k}]"
        _expect_type(t, dict, tl, "term")
        coeff = t.get("coeff", "1")
        if isinstance(coeff, bool) or not isinstance(coeff, (int, str)):
            raise ScenarioError("E_SCHEMA", "coeff must be an integer or a 'p/q' string", tl)
        out.append({"coeff": str(coeff), "basis_name": str(_require(t, "basis_name", tl))})
    return out


ALGEBRA_KINDS = ("truncated_polynomial", "spherical", "product", "square_zero", "structure_constants")
MODULE_KINDS = (
    "free", "explicit", "shift", "cone", "direct_sum", "random",
    "p_twist", "spherical_twist", "double_twist",
)
MORPHISM_KINDS = ("mult_by_element", "matrix", "identity", "witness")


def _norm_algebra(name, raw, loc):
    _expect_type(raw, dict, loc, "algebra")
    kind = _require(raw, "kind", loc)
    if kind not in ALGEBRA_KINDS:
        raise ScenarioError("E_SCHEMA", f"unknown algebra kind {kind!r}", loc)
    if kind == "truncated_polynomial":
        return {"kind": kind, "n": _expect_type(_require(raw, "n", loc), int, loc, "n"),
                "degree": _expect_type(raw.get("degree", 2), int, loc, "degree")}
    if kind == "spherical":
        return {"kind": kind, "d": _expect_type(_require(raw, "d", loc), int, loc, "d")}
    if kind == "product":
        fs = _expect_type(_require(raw, "factors", loc), list, loc, "factors")
        return {"kind": kind, "factors": [str(x) for x in fs]}
    if kind == "square_zero":
        degs = _expect_type(_require(raw, "degrees", loc), list, loc, "degrees")
        out = {"kind": kind, "degrees": [_expect_type(x, int, loc, "degree") for x in degs]}
        if "names" in raw:
            out["names"] = [str(x) for x in _expect_type(raw["names"], list, loc, "names")]
        return out
    basis = [str(x) for x in _expect_type(_require(raw, "basis", loc), list, loc, "basis")]
    degs = [_expect_type(x, int, loc, "degree") for x in _expect_type(_require(raw, "degrees", loc), list, loc, "degrees")]
    prods = _expect_type(raw.get("products", {}), dict, loc, "products")
    return {
        "kind": kind,
        "basis": basis,
        "degrees": degs,
        "products": {str(k): _terms(v, f"{loc}.products.{k}") for k, v in sorted(prods.items())},
        "unit": str(_require(raw, "unit", loc)),
        "graded_commutative": bool(raw.get("graded_commutative", False)),
    }


def _norm_module(name, raw, loc):
    _expect_type(raw, dict, loc, "module")
    kind = _require(raw, "kind", loc)
    if kind not in MODULE_KINDS:
        raise ScenarioError("E_SCHEMA", f"unknown module kind {kind!r}", loc)
    if kind == "free":
        degs = _expect_type(_require(raw, "degrees", loc), list, loc, "degrees")
        sup = raw.get("support")
        if sup is not None:
            _expect_type(sup, int, loc, "support")
        return {"kind": kind, "algebra": str(_require(raw, "algebra", loc)),
                "degrees": [_expect_type(x, int, loc, "degree") for x in degs], "support": sup}
    if kind == "explicit":
        gens = []
        for k, g in enumerate(_expect_type(_require(raw, "generators", loc), list, loc, "generators")):
            gl = f"{loc}.generators[{k}]"
            _expect_type(g, dict, gl, "generator")
            sup = g.get("support")
            if sup is not None:
                _expect_type(sup, int, gl, "support")
            gens.append({"name": str(_require(g, "name", gl)),
                         "degree": _expect_type(_require(g, "degree", gl), int, gl, "degree"),
                         "support": sup})
        diff = []
        for k, e in enumerate(_expect_type(raw.get("differential", []), list, loc, "differential")):
            el = f"{loc}.differential[{k}]"
            _expect_type(e, dict, el, "differential entry")
            diff.append({"source": str(_require(e, "source", el)), "target": str(_require(e, "target", el)),
                         "terms": _terms(_require(e, "terms", el), f"{el}.terms")})
        return {"kind": kind, "algebra": str(_require(raw, "algebra", loc)), "generators": gens, "differential": diff}
    if kind == "shift":
        return {"kind": kind, "of": str(_require(raw, "of", loc)), "by": _expect_type(_require(raw, "by", loc), int, loc, "by")}
    if kind == "cone":
        return {"kind": kind, "morphism": str(_require(raw, "morphism", loc))}
    if kind == "direct_sum":
        return {"kind": kind, "of": [str(x) for x in _expect_type(_require(raw, "of", loc), list, loc, "of")]}
    if kind == "random":
        dr = raw.get("degree_range", [-2, 2])
        _expect_type(dr, list, loc, "degree_range")
        if len(dr) != 2:
            raise ScenarioError("E_SCHEMA", "degree_range needs two integers", loc)
        sups = raw.get("supports")
        return {"kind": kind, "algebra": str(_require(raw, "algebra", loc)),
                "generators": _expect_type(_require(raw, "generators", loc), int, loc, "generators"),
                "seed": _expect_type(raw.get("seed", 0), int, loc, "seed"),
                "degree_range": [int(dr[0]), int(dr[1])],
                "supports": None if sups is None else list(sups)}
    return {"kind": kind, "e": str(_require(raw, "e", loc)), "f": str(_require(raw, "f", loc))}


def _norm_morphism(name, raw, loc):
    _expect_type(raw, dict, loc, "morphism")
    kind = _require(raw, "kind", loc)
    if kind not in MORPHISM_KINDS:
        raise ScenarioError("E_SCHEMA", f"unknown morphism kind {kind!r}", loc)
    if kind == "mult_by_element":
        return {"kind": kind, "module": str(_require(raw, "module", loc)),
                "element": _terms(_require(raw, "element", loc), f"{loc}.element")}
    if kind in ("identity", "witness"):
        return {"kind": kind, "module": str(_require(raw, "module", loc))}
    entries = []
    for k, e in enumerate(_expect_type(raw.get("entries", []), list, loc, "entries")):
        el = f"{loc}.entries[{k}]"
        _expect_type(e, dict, el, "entry")
        entries.append({"source": str(_require(e, "source", el)), "target": str(_require(e, "target", el)),
                        "terms": _terms(_require(e, "terms", el), f"{el}.terms")})
    return {"kind": kind, "source": str(_require(raw, "source", loc)), "target": str(_require(raw, "target", loc)),
            "degree": _expect_type(raw.get("degree", 0), int, loc, "degree"), "entries": entries}


def _norm_task(raw, loc):
    _expect_type(raw, dict, loc, "task")
    name = _expect_type(_require(raw, "task", loc), str, loc, "task")
    if name in RESERVED_TASKS:
        raise ScenarioError("E_RESERVED_TASK", f"task {name!r} is reserved and not implemented", loc)
    if name not in TASKS:
        raise ScenarioError("E_UNKNOWN_TASK", f"unknown task {name!r}", loc)
    out = {"task": name, "args": dict(sorted(_expect_type(raw.get("args", {}), dict, loc, "args").items()))}
    if "as" in raw:
        out["as"] = str(raw["as"])
    if "expect" in raw:
        out["expect"] = dict(sorted(_expect_type(raw["expect"], dict, loc, "expect").items()))
    if "citation" in raw:
        out["citation"] = str(raw["citation"])
    return out


def normalize(doc: Any) -> dict:
    """Canonical form of a scenario document (defaults filled in, sorted
    where order carries no meaning)."""
    _expect_type(doc, dict, "", "scenario")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError("E_SCHEMA", f"unsupported schema_version {version!r}", "schema_version")
    fld = doc.get("field", "fp:32003")
    _expect_type(fld, str, "field", "field")
    sections = {}
    for key, fn in (("algebras", _norm_algebra), ("modules", _norm_module), ("morphisms", _norm_morphism)):
        raw = _expect_type(doc.get(key, {}), dict, key, key)
        sections[key] = {str(k): fn(k, v, f"{key}.{k}") for k, v in raw.items()}
    tasks = [_norm_task(t, f"tasks[{k}]") for k, t in enumerate(_expect_type(doc.get("tasks", []), list, "tasks", "tasks"))]
    return {
        "schema_version": SCHEMA_VERSION,
        "name": str(doc.get("name", "scenario")),
        "citation": str(doc.get("citation", "")),
        "field": fld,
        "seed": _expect_type(doc.get("seed", 0), int, "seed", "seed"),
        **sections,
        "tasks": tasks,
    }


# -- building ------------------------------------------------------------------


@dataclass
class Scenario:
    spec: dict
    field: FieldSpec
    seed: int
    algebras: dict[str, galg.GradedAlgebra] = dc_field(default_factory=dict)
    modules: dict[str, dgmod.SemifreeModule] = dc_field(default_factory=dict)
    morphisms: dict[str, dgmod.Morphism] = dc_field(default_factory=dict)
    plans: dict[int, twistops.TwistPlan] = dc_field(default_factory=dict, repr=False)

    @property
    def name(self) -> str:
        return self.spec["name"]

    @property
    def tasks(self) -> list[dict]:
        return self.spec["tasks"]

    def to_json(self) -> dict:
        return self.spec

    def plan_for(self, e: dgmod.SemifreeModule) -> twistops.TwistPlan:
        plan = self.plans.get(id(e))
        if plan is None or plan.e is not e:
            plan = twistops.make_plan(e)
            self.plans[id(e)] = plan
        return plan


def parse_field(text: str) -> FieldSpec:
    try:
        return FieldSpec.parse(text)
    except FieldError as exc:
        code = "E_NOT_PRIME" if "prime" in str(exc) else "E_FIELD"
        raise ScenarioError(code, str(exc), "field") from None


class _Builder:
    def __init__(self, sc: Scenario):
        self.sc = sc
        self.active: set[tuple[str, str]] = set()

    def _guard(self, kind, name, loc):
        if (kind, name) in self.active:
            raise ScenarioError("E_CYCLE", f"cyclic definition of {kind} {name!r}", loc)

    def _lookup(self, section: str, name: str, loc: str):
        if name not in self.sc.spec[section]:
            raise ScenarioError("E_UNRESOLVED", f"unknown {section[:-1]} {name!r}", loc)

    def element(self, alg: galg.GradedAlgebra, terms: list[dict], loc: str) -> np.ndarray:
        f = alg.field
        vec = f.zeros(alg.dim)
        for k, t in enumerate(terms):
            if t["basis_name"] not in alg.basis_names:
                raise ScenarioError("E_UNRESOLVED", f"unknown basis element {t['basis_name']!r}", f"{loc}[{k}]")
            try:
                c = f.scalar(t["coeff"])
            except (ValueError, ZeroDivisionError, FieldError) as exc:
                raise ScenarioError("E_VALUE", f"bad coefficient {t['coeff']!r}: {exc}", f"{loc}[{k}]") from None
            i = alg.index(t["basis_name"])
            vec[i] = f.reduce(f.array([vec[i] + c]))[0]
        return vec

    def algebra(self, name: str, loc: str) -> galg.GradedAlgebra:
        if name in self.sc.algebras:
            return self.sc.algebras[name]
        self._lookup("algebras", name, loc)
        self._guard("algebra", name, loc)
        self.active.add(("algebra", name))
        spec = self.sc.spec["algebras"][name]
        here = f"algebras.{name}"
        f = self.sc.field
        try:
            kind = spec["kind"]
            if kind == "truncated_polynomial":
                a = galg.make_truncated_polynomial(spec["n"], spec["degree"], f)
            elif kind == "spherical":
                a = galg.make_spherical_algebra(spec["d"], f)
            elif kind == "product":
                parts = [self.algebra(x, f"{here}.factors") for x in spec["factors"]]
                if len(parts) < 2:
                    raise ScenarioError("E_ALGEBRA", "a product needs at least two factors", here)
                a = parts[0]
                for p in parts[1:]:
                    a = galg.make_product(a, p)
            elif kind == "square_zero":
                a = galg.make_square_zero(spec["degrees"], f, spec.get("names"))
            else:
                products = {}
                for key, terms in spec["products"].items():
                    if "*" not in key:
                        raise ScenarioError("E_SCHEMA", "product keys look like 'x*y'", f"{here}.products.{key}")
                    x, y = key.split("*", 1)
                    products[(x.strip(), y.strip())] = {t["basis_name"]: t["coeff"] for t in terms}
                a = galg.make_from_table(f, list(zip(spec["basis"], spec["degrees"])), products, unit=spec["unit"],
                                         graded_commutative=spec["graded_commutative"], name=name)
        except (galg.AlgebraError, FieldError, ValueError) as exc:
            raise ScenarioError("E_ALGEBRA", str(exc), here) from None
        self.active.discard(("algebra", name))
        self.sc.algebras[name] = a
        return a

    def module(self, name: str, loc: str) -> dgmod.SemifreeModule:
        if name in self.sc.modules:
            return self.sc.modules[name]
        self._lookup("modules", name, loc)
        self._guard("module", name, loc)
        self.active.add(("module", name))
        spec = self.sc.spec["modules"][name]
        here = f"modules.{name}"
        kind = spec["kind"]
        try:
            if kind == "free":
                m = dgmod.free_module(self.algebra(spec["algebra"], here), spec["degrees"], support=spec["support"], prefix="g")
            elif kind == "explicit":
                m = self._explicit(spec, here)
            elif kind == "shift":
                m = dgmod.shift(self.module(spec["of"], here), spec["by"])
            elif kind == "cone":
                m = dgmod.cone(self.morphism(spec["morphism"], here))
            elif kind == "direct_sum":
                m = dgmod.direct_sum([self.module(x, here) for x in spec["of"]])
            elif kind == "random":
                alg = self.algebra(spec["algebra"], here)
                rng = np.random.default_rng([self.sc.seed, spec["seed"]])
                m = dgmod.random_module(alg, spec["generators"], rng, degree_range=tuple(spec["degree_range"]),
                                        supports=spec["supports"])
            else:
                e = self.module(spec["e"], here)
                f = self.module(spec["f"], here)
                if kind == "p_twist":
                    m = twistops.p_twist(self.sc.plan_for(e), f)
                elif kind == "spherical_twist":
                    m = twistops.spherical_twist(e, f)
                else:
                    m = twistops.double_twist(e, f)
        except (dgmod.ModuleError, galg.AlgebraError) as exc:
            raise ScenarioError("E_MODULE", str(exc), here) from None
        self.active.discard(("module", name))
        self.sc.modules[name] = m
        return m

    def _explicit(self, spec, here) -> dgmod.SemifreeModule:
        alg = self.algebra(spec["algebra"], here)
        gens = [(g["name"], g["degree"]) for g in spec["generators"]]
        names = [g[0] for g in gens]
        if len(set(names)) != len(names):
            raise ScenarioError("E_MODULE", "duplicate generator names", f"{here}.generators")
        pos = {nm: k for k, nm in enumerate(names)}
        deg = dict(gens)
        f = alg.field
        d = f.zeros((len(gens), len(gens), alg.dim))
        for k, e in enumerate(spec["differential"]):
            el = f"{here}.differential[{k}]"
            for end in ("source", "target"):
                if e[end] not in pos:
                    raise ScenarioError("E_UNRESOLVED", f"unknown generator {e[end]!r}", el)
            vec = self.element(alg, e["terms"], f"{el}.terms")
            want = deg[e["source"]] + 1 - deg[e["target"]]
            for c in np.flatnonzero(vec != 0):
                if alg.degrees[c] != want:
                    raise ScenarioError(
                        "E_DIFF_DEGREE",
                        f"term {alg.basis_names[c]!r} in d({e['source']}) -> {e['target']} has degree "
                        f"{alg.degrees[c]}, expected {want}",
                        el,
                    )
            i, j = pos[e["target"]], pos[e["source"]]
            d[i, j] = f.reduce(d[i, j] + vec)
        try:
            return dgmod.SemifreeModule(alg, gens, d, [g["support"] for g in spec["generators"]])
        except dgmod.ModuleError as exc:
            code = "E_SQUARE_ZERO" if "square" in str(exc) else "E_MODULE"
            raise ScenarioError(code, str(exc), here) from None

    def morphism(self, name: str, loc: str) -> dgmod.Morphism:
        if name in self.sc.morphisms:
            return self.sc.morphisms[name]
        self._lookup("morphisms", name, loc)
        self._guard("morphism", name, loc)
        self.active.add(("morphism", name))
        spec = self.sc.spec["morphisms"][name]
        here = f"morphisms.{name}"
        kind = spec["kind"]
        try:
            if kind == "mult_by_element":
                m = self.module(spec["module"], here)
                vec = self.element(m.algebra, spec["element"], f"{here}.element")
                phi = dgmod.mult_by_element(m, galg.AlgebraElement(m.algebra, vec))
            elif kind == "identity":
                phi = dgmod.identity(self.module(spec["module"], here))
            elif kind == "witness":
                phi = twistops.witness_for(self.module(spec["module"], here))
            else:
                phi = self._matrix(spec, here)
        except (dgmod.ModuleError, galg.AlgebraError) as exc:
            raise ScenarioError("E_MORPHISM", str(exc), here) from None
        self.active.discard(("morphism", name))
        self.sc.morphisms[name] = phi
        return phi

    def _matrix(self, spec, here) -> dgmod.Morphism:
        src = self.module(spec["source"], here)
        tgt = self.module(spec["target"], here)
        alg = src.algebra
        f = alg.field
        mat = f.zeros((tgt.rank, src.rank, alg.dim))
        for k, e in enumerate(spec["entries"]):
            el = f"{here}.entries[{k}]"
            if e["source"] not in src.names or e["target"] not in tgt.names:
                raise ScenarioError("E_UNRESOLVED", "unknown generator in entry", el)
            vec = self.element(alg, e["terms"], f"{el}.terms")
            i, j = tgt.names.index(e["target"]), src.names.index(e["source"])
            mat[i, j] = f.reduce(mat[i, j] + vec)
        try:
            return dgmod.Morphism(src, tgt, spec["degree"], mat)
        except dgmod.ModuleError as exc:
            raise ScenarioError("E_DIFF_DEGREE", str(exc), here) from None


def build(spec: dict, *, field: FieldSpec | str | None = None, seed: int | None = None) -> Scenario:
    """Construct every named object of a normalized scenario."""
    if field is None:
        fld = parse_field(spec["field"])
    elif isinstance(field, str):
        fld = parse_field(field)
    else:
        fld = field
    sc = Scenario(spec, fld, spec["seed"] if seed is None else int(seed))
    b = _Builder(sc)
    for name in spec["algebras"]:
        b.algebra(name, f"algebras.{name}")
    for name in spec["modules"]:
        b.module(name, f"modules.{name}")
    for name in spec["morphisms"]:
        b.morphism(name, f"morphisms.{name}")
    known_modules = set(spec["modules"])
    for k, task in enumerate(spec["tasks"]):
        _check_task_refs(task, known_modules | {t["as"] for t in spec["tasks"][:k] if "as" in t},
                         set(spec["morphisms"]), f"tasks[{k}]")
    return sc


TASK_MODULE_ARGS = {
    "classify": ("module",),
    "ext_dims": ("source", "target"),
    "cohomology_dims": ("module",),
    "spherical_twist": ("e", "f"),
    "p_twist": ("e", "f"),
    "double_twist": ("e", "f"),
    "minimal_model": ("module",),
    "find_quasi_iso": ("source", "target"),
    "euler_pairing": ("source", "target"),
    "ambient_profile": ("module",),
    "spherical_after_pushforward": ("module",),
}


def _check_task_refs(task: dict, modules: set[str], morphisms: set[str], loc: str):
    args = task["args"]
    for key in TASK_MODULE_ARGS[task["task"]]:
        if key not in args:
            raise ScenarioError("E_SCHEMA", f"task {task['task']!r} needs argument {key!r}", f"{loc}.args")
        if args[key] not in modules:
            raise ScenarioError("E_UNRESOLVED", f"unknown module {args[key]!r}", f"{loc}.args.{key}")
    if "h" in args and args["h"] not in morphisms:
        raise ScenarioError("E_UNRESOLVED", f"unknown morphism {args['h']!r}", f"{loc}.args.h")


def parse_scenario(text: bytes | str, *, field: FieldSpec | str | None = None, seed: int | None = None) -> Scenario:
    """Parse, normalize, validate and build a scenario document."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioError("E_JSON", f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("E_JSON", exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return build(normalize(doc), field=field, seed=seed)


def load_scenario(path, **kw) -> Scenario:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ScenarioError("E_IO", str(exc), str(path)) from None
    return parse_scenario(data, **kw)
