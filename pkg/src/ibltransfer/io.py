"""Canonical JSON for the domain objects.

Every document is ``{"formatVersion": ..., "kind": ..., "payload": ...}``.
Rationals are "p/q" strings in lowest terms, sparse entries are sorted by
(input index, output index), corollas are [k, l, g].  Loading validates the
document against the shipped schema, then rebuilds the objects through their
constructors so every invariant is checked before any computation.
"""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema
from referencing import Registry, Resource

from .complexes import ChainComplex, Contraction, validate_contraction
from .corolla import IDENTITY, Corolla
from .graphs import LeveledGraph
from .ibl import IBLStructure, RelationReport, make_ibl_structure
from .linalg import GradedMap, GradedSpace, q_str, to_q
from .morphisms import InfinityMorphism

FORMAT_VERSION = "1.0"

KINDS = ("GradedSpace", "GradedMap", "ChainComplex", "Contraction", "IBLStructure",
         "InfinityMorphism", "LeveledGraph", "GraphList", "RelationReport")


class ParseError(ValueError):
    """Malformed document (bad JSON or wrong shape)."""


class ValidationError(ValueError):
    """Well-formed document whose content violates an invariant."""


def _corolla_key(c):
    return (c.weight, c.k, c.l, c.g)


# encoding

def _space(sp: GradedSpace) -> list:
    return list(sp.degrees)


def _map(f: GradedMap) -> dict:
    entries = sorted((list(a), list(b), v) for a, col in f.cols.items() for b, v in col.items())
    return {"nIn": f.n_in, "nOut": f.n_out, "degree": f.degree,
            "entries": [[a, b, q_str(v)] for a, b, v in entries]}


def _complex(c: ChainComplex) -> dict:
    return {"degrees": _space(c.space), "d": _map(c.d)}


def _labeled(maps: dict) -> list:
    return [{"corolla": list(c), "map": _map(maps[c])}
            for c in sorted(maps, key=_corolla_key) if not maps[c].is_zero()]


def _structure(s: IBLStructure) -> dict:
    return {"complex": _complex(s.complex), "maxWeight": s.max_weight, "ops": _labeled(s.ops)}


def _graph(g) -> dict:
    def port(p):
        return p if isinstance(p, int) else list(p)
    return {"vertices": [list(v) for v in g.vertices],
            "ins": [[port(p) for p in x] for x in g.ins],
            "outs": [[port(p) for p in x] for x in g.outs]}


def to_payload(obj):
    """(kind, payload) for a domain object."""
    if isinstance(obj, GradedSpace):
        return "GradedSpace", {"degrees": _space(obj)}
    if isinstance(obj, GradedMap):
        return "GradedMap", {"source": _space(obj.source), "target": _space(obj.target),
                             **_map(obj)}
    if isinstance(obj, ChainComplex):
        return "ChainComplex", _complex(obj)
    if isinstance(obj, Contraction):
        return "Contraction", {"big": _complex(obj.big), "small": _complex(obj.small),
                               "i": _map(obj.i), "p": _map(obj.p), "h": _map(obj.h)}
    if isinstance(obj, IBLStructure):
        return "IBLStructure", _structure(obj)
    if isinstance(obj, InfinityMorphism):
        comps = {c: f for c, f in obj.comps.items() if c != IDENTITY}
        return "InfinityMorphism", {"source": _structure(obj.source),
                                    "target": _structure(obj.target),
                                    "maxWeight": obj.max_weight, "f0": _map(obj.f0),
                                    "components": _labeled(comps)}
    if isinstance(obj, LeveledGraph):
        return "LeveledGraph", _graph(obj)
    if isinstance(obj, RelationReport):
        res = obj.residuals
        some = next(iter(res.values()), None)
        return "RelationReport", {
            "ok": obj.ok,
            "source": _space(some.source) if some is not None else [],
            "target": _space(some.target) if some is not None else [],
            "residuals": [{"corolla": list(c), "map": _map(res[c])}
                          for c in sorted(res, key=_corolla_key)]}
    if isinstance(obj, (list, tuple)) and all(isinstance(g, LeveledGraph) for g in obj):
        return "GraphList", {"count": len(obj), "graphs": [_graph(g) for g in obj]}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump(x, indent: int, level: int) -> str:
    # dicts are broken over lines, lists of plain data stay on one line
    if isinstance(x, dict) and x:
        pad = " " * (indent * (level + 1))
        items = [f"{pad}{json.dumps(k)}: {_dump(x[k], indent, level + 1)}" for k in sorted(x)]
        return "{\n" + ",\n".join(items) + "\n" + " " * (indent * level) + "}"
    if isinstance(x, list) and any(isinstance(y, dict) for y in x):
        pad = " " * (indent * (level + 1))
        items = [pad + _dump(y, indent, level + 1) for y in x]
        return "[\n" + ",\n".join(items) + "\n" + " " * (indent * level) + "]"
    return json.dumps(x, separators=(",", ":"), sort_keys=True)


def dumps(obj) -> str:
    kind, payload = to_payload(obj)
    doc = {"formatVersion": FORMAT_VERSION, "kind": kind, "payload": payload}
    return _dump(doc, 2, 0) + "\n"


def save(obj, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps(obj))


# decoding

@lru_cache(maxsize=None)
def _schemas():
    base = resources.files("ibltransfer") / "schemas"
    docs = {p.name: json.loads(p.read_text(encoding="utf-8"))
            for p in base.iterdir() if p.name.endswith(".json")}
    registry = Registry().with_resources(
        (d["$id"], Resource.from_contents(d)) for d in docs.values())
    return docs, registry


@lru_cache(maxsize=None)
def _validator():
    docs, registry = _schemas()
    return jsonschema.Draft202012Validator(docs["document.json"], registry=registry)


def _check_shape(doc):
    best = jsonschema.exceptions.best_match(_validator().iter_errors(doc))
    if best is not None:
        raise ParseError(f"{best.json_path}: {best.message}")


def _space_from(degrees) -> GradedSpace:
    if list(degrees) != sorted(degrees):
        raise ValidationError("basis degrees must be sorted")
    return GradedSpace.from_degrees(degrees)


def _map_from(d, src: GradedSpace, tgt: GradedSpace, where: str) -> GradedMap:
    cols: dict = {}
    for a, b, v in d["entries"]:
        q = to_q(v)
        if q_str(q) != v:
            raise ValidationError(f"{where}: rational {v!r} is not in lowest terms")
        if not q:
            raise ValidationError(f"{where}: zero entries are not stored")
        col = cols.setdefault(tuple(a), {})
        if tuple(b) in col:
            raise ValidationError(f"{where}: duplicate entry {a} -> {b}")
        col[tuple(b)] = q
    try:
        return GradedMap(src, tgt, d["nIn"], d["nOut"], d["degree"], cols)
    except ValueError as e:
        raise ValidationError(f"{where}: {e}") from None


def _complex_from(d, where="complex") -> ChainComplex:
    sp = _space_from(d["degrees"])
    f = _map_from(d["d"], sp, sp, where + ".d")
    try:
        return ChainComplex(sp, f)
    except ValueError as e:
        raise ValidationError(f"{where}: {e}") from None


def _labeled_from(items, src, tgt, where) -> dict:
    out = {}
    for it in items:
        try:
            c = Corolla(*it["corolla"]).check()
        except ValueError as e:
            raise ValidationError(f"{where}: {e}") from None
        if c in out:
            raise ValidationError(f"{where}: corolla {c} listed twice")
        out[c] = _map_from(it["map"], src, tgt, f"{where}[{c}]")
    return out


def _structure_from(d, where="structure") -> IBLStructure:
    A = _complex_from(d["complex"], where + ".complex")
    ops = _labeled_from(d["ops"], A.space, A.space, where + ".ops")
    try:
        return make_ibl_structure(A, ops, d["maxWeight"])
    except ValueError as e:
        raise ValidationError(f"{where}: {e}") from None


def _graph_from(d) -> LeveledGraph:
    def port(p):
        return p if isinstance(p, int) else tuple(p)
    try:
        return LeveledGraph(d["vertices"], [[port(p) for p in x] for x in d["ins"]],
                            [[port(p) for p in x] for x in d["outs"]])
    except (ValueError, IndexError, TypeError) as e:
        raise ValidationError(f"graph: {e}") from None


def from_payload(kind: str, p):
    if kind == "GradedSpace":
        return _space_from(p["degrees"])
    if kind == "GradedMap":
        return _map_from(p, _space_from(p["source"]), _space_from(p["target"]), "map")
    if kind == "ChainComplex":
        return _complex_from(p)
    if kind == "Contraction":
        big, small = _complex_from(p["big"], "big"), _complex_from(p["small"], "small")
        A, H = big.space, small.space
        i = _map_from(p["i"], H, A, "i")
        pp = _map_from(p["p"], A, H, "p")
        h = _map_from(p["h"], A, A, "h")
        c = Contraction(big, small, i, pp, h, check=False)
        try:
            bad = validate_contraction(c)
        except ValueError as e:
            raise ValidationError(f"contraction: {e}") from None
        if bad:
            raise ValidationError("invalid contraction: " + "; ".join(bad))
        return c
    if kind == "IBLStructure":
        return _structure_from(p)
    if kind == "InfinityMorphism":
        src, tgt = _structure_from(p["source"], "source"), _structure_from(p["target"], "target")
        comps = _labeled_from(p["components"], src.space, tgt.space, "components")
        if IDENTITY in comps:
            raise ValidationError("components: the weight-0 part belongs in f0")
        comps[IDENTITY] = _map_from(p["f0"], src.space, tgt.space, "f0")
        try:
            return InfinityMorphism(src, tgt, comps, p["maxWeight"])
        except ValueError as e:
            raise ValidationError(f"morphism: {e}") from None
    if kind == "LeveledGraph":
        return _graph_from(p)
    if kind == "GraphList":
        graphs = [_graph_from(g) for g in p["graphs"]]
        if len(graphs) != p["count"]:
            raise ValidationError("graph count does not match the list")
        return graphs
    if kind == "RelationReport":
        src, tgt = _space_from(p["source"]), _space_from(p["target"])
        res = _labeled_from(p["residuals"], src, tgt, "residuals")
        rep = RelationReport(res)
        if rep.ok != p["ok"]:
            raise ValidationError("ok flag disagrees with the residuals")
        return rep
    raise ParseError(f"unknown kind {kind!r}")


def loads(text: str, kind: str | None = None):
    """Parse and validate a document; ``kind`` restricts what is accepted."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    _check_shape(doc)
    if doc["formatVersion"] != FORMAT_VERSION:
        raise ParseError(f"unsupported formatVersion {doc['formatVersion']!r}")
    if kind is not None and doc["kind"] != kind:
        raise ParseError(f"expected kind {kind}, got {doc['kind']}")
    return from_payload(doc["kind"], doc["payload"])


def load(path, kind: str | None = None):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return loads(text, kind)
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None


__all__ = ["FORMAT_VERSION", "KINDS", "ParseError", "ValidationError", "to_payload",
           "from_payload", "dumps", "loads", "save", "load"]
