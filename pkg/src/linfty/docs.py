"""The exchange format: single-document JSON with string-encoded rationals,
schema validation with path-carrying errors, and a canonical serialization
(sorted keys, degrees ascending, words canonical, exponents lexicographic)
so that parse-then-serialize is byte-identical on canonical documents.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .charts import BundleChart, BundleMorphism
from .errors import SchemaError
from .linalg import GradedMap, GradedSpace
from .poly import Poly, PolyRing, RAT, format_rational, parse_rational
from .structures import CurvedStructure, Morphism
from .transfer import Contraction, FiltrationSpec

VERSION = "1"
KINDS = ("structure", "bundle", "morphism", "contraction", "job")


def canonical_dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _require(cond, path, message):
    if not cond:
        raise SchemaError(path, message)


def _check_fields(obj, path, required, optional=()):
    _require(isinstance(obj, dict), path, "expected an object")
    for key in required:
        _require(key in obj, path, f"missing field {key!r}")
    allowed = set(required) | set(optional)
    for key in obj:
        _require(key in allowed, f"{path}.{key}", "unknown field")


# ---------------------------------------------------------------------------
# scalars

def encode_scalar(x):
    if isinstance(x, Poly):
        return [{"coef": format_rational(c), "exp": list(e)}
                for e, c in x.sorted_terms()]
    return format_rational(x)


def decode_scalar(obj, path, ring):
    if isinstance(ring, PolyRing):
        _require(isinstance(obj, list), path, "expected a polynomial term array")
        terms = {}
        for i, term in enumerate(obj):
            _check_fields(term, f"{path}[{i}]", ("coef", "exp"))
            exp = term["exp"]
            _require(isinstance(exp, list) and all(isinstance(e, int) and e >= 0
                                                   for e in exp),
                     f"{path}[{i}].exp", "expected nonnegative integer exponents")
            _require(len(exp) == len(ring.vars), f"{path}[{i}].exp",
                     f"expected {len(ring.vars)} exponents")
            terms[tuple(exp)] = parse_rational(term["coef"])
        return Poly(ring.vars, terms)
    _require(isinstance(obj, str), path, "expected a rational string")
    try:
        return Fraction(obj)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(path, f"bad rational literal {obj!r}")


# ---------------------------------------------------------------------------
# spaces, words, tables

def encode_space(sp):
    return {
        "dims": {str(d): n for d, n in sp.dims},
        "labels": {str(d): list(names) for d, names in sp.labels},
    }


def decode_space(obj, path):
    _check_fields(obj, path, ("dims",), ("labels",))
    dims = {}
    for key, val in obj["dims"].items():
        try:
            d = int(key)
        except ValueError:
            raise SchemaError(f"{path}.dims.{key}", "degree keys must be integers")
        _require(isinstance(val, int) and val >= 0, f"{path}.dims.{key}",
                 "dimensions must be nonnegative integers")
        dims[d] = val
    labels = {}
    for key, val in obj.get("labels", {}).items():
        try:
            d = int(key)
        except ValueError:
            raise SchemaError(f"{path}.labels.{key}", "degree keys must be integers")
        _require(isinstance(val, list) and all(isinstance(s, str) for s in val),
                 f"{path}.labels.{key}", "labels must be strings")
        labels[d] = tuple(val)
    try:
        return GradedSpace.make(dims, labels)
    except ValueError as exc:
        raise SchemaError(path, str(exc))


def encode_word(word):
    return [[d, i] for d, i in word]


def decode_word(obj, path):
    _require(isinstance(obj, list), path, "expected a word array")
    out = []
    for i, pair in enumerate(obj):
        _require(isinstance(pair, list) and len(pair) == 2
                 and all(isinstance(v, int) for v in pair),
                 f"{path}[{i}]", "letters are [degree, index] pairs")
        out.append((pair[0], pair[1]))
    return tuple(out)


def encode_ops(table):
    entries = []
    for word, vec in sorted(table.items(), key=lambda kv: (len(kv[0]), kv[0])):
        entries.append({"word": encode_word(word),
                        "out": [encode_scalar(x) for x in vec]})
    return entries


def decode_ops(obj, path, ring):
    _require(isinstance(obj, list), path, "expected an operation array")
    table = {}
    for i, entry in enumerate(obj):
        _check_fields(entry, f"{path}[{i}]", ("word", "out"))
        word = decode_word(entry["word"], f"{path}[{i}].word")
        vec = tuple(decode_scalar(x, f"{path}[{i}].out[{j}]", ring)
                    for j, x in enumerate(entry["out"]))
        _require(word not in table, f"{path}[{i}].word", "duplicate word")
        table[word] = vec
    return table


def encode_graded_map(gm):
    return {
        "degree": gm.degree,
        "blocks": {str(k): [[encode_scalar(x) for x in row] for row in mat]
                   for k, mat in gm.blocks},
    }


def decode_graded_map(obj, path, space, ring=RAT):
    _check_fields(obj, path, ("degree", "blocks"))
    _require(isinstance(obj["degree"], int), f"{path}.degree", "expected an integer")
    blocks = {}
    for key, mat in obj["blocks"].items():
        try:
            k = int(key)
        except ValueError:
            raise SchemaError(f"{path}.blocks.{key}", "degree keys must be integers")
        _require(isinstance(mat, list), f"{path}.blocks.{key}", "expected a matrix")
        rows = []
        for r, row in enumerate(mat):
            _require(isinstance(row, list), f"{path}.blocks.{key}[{r}]",
                     "expected a row array")
            rows.append(tuple(decode_scalar(x, f"{path}.blocks.{key}[{r}][{j}]", ring)
                              for j, x in enumerate(row)))
        blocks[k] = tuple(rows)
    from .errors import SpaceMismatch
    try:
        return GradedMap.make(space, space, obj["degree"], blocks, ring)
    except SpaceMismatch as exc:
        raise SchemaError(f"{path}.blocks", str(exc))


# ---------------------------------------------------------------------------
# payloads

def encode_structure(s):
    return {"space": encode_space(s.space), "ops": encode_ops(s.table)}


def decode_structure(obj, path):
    _check_fields(obj, path, ("space", "ops"))
    space = decode_space(obj["space"], f"{path}.space")
    table = decode_ops(obj["ops"], f"{path}.ops", RAT)
    return CurvedStructure.make(space, table, RAT)


def encode_bundle(b):
    return {
        "base": list(b.base),
        "space": encode_space(b.space),
        "ops": encode_ops(b.fiber.table),
    }


def decode_bundle(obj, path):
    _check_fields(obj, path, ("base", "space", "ops"))
    base = obj["base"]
    _require(isinstance(base, list) and all(isinstance(v, str) for v in base),
             f"{path}.base", "base coordinates must be strings")
    space = decode_space(obj["space"], f"{path}.space")
    ring = PolyRing(tuple(base))
    table = decode_ops(obj["ops"], f"{path}.ops", ring)
    return BundleChart.make(tuple(base), space, table)


def encode_morphism(m):
    if isinstance(m, BundleMorphism):
        return {
            "source": encode_bundle(m.source),
            "target": encode_bundle(m.target),
            "base_map": [encode_scalar(p) for p in m.base_map],
            "components": encode_ops(m.table),
        }
    return {
        "source": encode_structure(m.source),
        "target": encode_structure(m.target),
        "components": encode_ops(m.table),
    }


def decode_morphism(obj, path):
    _require(isinstance(obj, dict), path, "expected an object")
    bundle_like = isinstance(obj.get("source"), dict) and "base" in obj.get("source", {})
    if bundle_like:
        _check_fields(obj, path, ("source", "target", "base_map", "components"))
        source = decode_bundle(obj["source"], f"{path}.source")
        target = decode_bundle(obj["target"], f"{path}.target")
        ring = PolyRing(source.base)
        base_map = tuple(decode_scalar(p, f"{path}.base_map[{i}]", ring)
                         for i, p in enumerate(obj["base_map"]))
        comps = decode_ops(obj["components"], f"{path}.components", ring)
        return BundleMorphism.make(source, target, base_map, comps)
    _check_fields(obj, path, ("source", "target", "components"))
    source = decode_structure(obj["source"], f"{path}.source")
    target = decode_structure(obj["target"], f"{path}.target")
    comps = decode_ops(obj["components"], f"{path}.components", RAT)
    return Morphism.make(source, target, comps)


def encode_filtration(f):
    if f.kind == "natural":
        return {"kind": "natural"}
    if f.kind == "variation":
        return {"kind": "variation", "level": f.level}
    return {"kind": "custom", "weights": {str(d): w for d, w in f.weights}}


def decode_filtration(obj, path):
    _require(isinstance(obj, dict), path, "expected an object")
    kind = obj.get("kind")
    if kind == "natural":
        _check_fields(obj, path, ("kind",))
        return FiltrationSpec.natural()
    if kind == "variation":
        _check_fields(obj, path, ("kind", "level"))
        _require(isinstance(obj["level"], int), f"{path}.level", "expected an integer")
        return FiltrationSpec.variation(obj["level"])
    if kind == "custom":
        _check_fields(obj, path, ("kind", "weights"))
        weights = {}
        for key, val in obj["weights"].items():
            try:
                d = int(key)
            except ValueError:
                raise SchemaError(f"{path}.weights.{key}", "degree keys must be integers")
            _require(isinstance(val, int), f"{path}.weights.{key}", "expected an integer")
            weights[d] = val
        return FiltrationSpec.custom(weights)
    raise SchemaError(f"{path}.kind", f"unknown filtration kind {kind!r}")


def encode_contraction(c):
    return {
        "space": encode_space(c.space),
        "differential": encode_graded_map(c.differential),
        "homotopy": encode_graded_map(c.homotopy),
        "filtration": encode_filtration(c.filtration),
    }


def decode_contraction(obj, path):
    _check_fields(obj, path, ("space", "differential", "homotopy", "filtration"))
    space = decode_space(obj["space"], f"{path}.space")
    differential = decode_graded_map(obj["differential"], f"{path}.differential", space)
    homotopy = decode_graded_map(obj["homotopy"], f"{path}.homotopy", space)
    _require(differential.degree == 1, f"{path}.differential.degree",
             "differential must have degree 1")
    _require(homotopy.degree == -1, f"{path}.homotopy.degree",
             "homotopy must have degree -1")
    filtration = decode_filtration(obj["filtration"], f"{path}.filtration")
    return Contraction(space, differential, homotopy, filtration)


JOB_COMMANDS = (
    "check-relations", "check-morphism", "transfer", "reduce", "split",
    "pipeline", "etale", "ce", "cohomology", "quasi-iso", "koszul-verify",
    "heq", "bigrading",
)


def decode_job(obj, path):
    _check_fields(obj, path, ("cmd", "input"),
                  ("contraction", "points", "degrees", "weights"))
    from .errors import UnknownCommand
    if obj["cmd"] not in JOB_COMMANDS:
        raise UnknownCommand(f"unknown command {obj['cmd']!r}")
    _require(isinstance(obj["input"], str), f"{path}.input", "expected a path string")
    if "contraction" in obj:
        _require(isinstance(obj["contraction"], str), f"{path}.contraction",
                 "expected a path string")
    if "points" in obj:
        decode_points(obj["points"], f"{path}.points")
    for key in ("degrees", "weights"):
        if key in obj:
            _require(isinstance(obj[key], int) and obj[key] >= 0,
                     f"{path}.{key}", "expected a nonnegative integer")
    return dict(obj)


def decode_points(obj, path):
    _require(isinstance(obj, list), path, "expected a point array")
    points = []
    for i, pt in enumerate(obj):
        _require(isinstance(pt, dict), f"{path}[{i}]", "expected an object")
        point = {}
        for key, val in pt.items():
            _require(isinstance(val, str), f"{path}[{i}].{key}",
                     "expected a rational string")
            try:
                point[key] = Fraction(val)
            except (ValueError, ZeroDivisionError):
                raise SchemaError(f"{path}[{i}].{key}", f"bad rational literal {val!r}")
        points.append(point)
    return points


def encode_points(points):
    return [{k: format_rational(v) for k, v in sorted(pt.items())} for pt in points]


# ---------------------------------------------------------------------------
# documents

def make_document(kind, payload):
    return {"version": VERSION, "kind": kind, "payload": payload}


def parse_document(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}")
    _check_fields(obj, "$", ("version", "kind", "payload"))
    _require(obj["version"] == VERSION, "$.version",
             f"unsupported version {obj['version']!r}")
    kind = obj["kind"]
    _require(kind in KINDS, "$.kind", f"unknown kind {kind!r}")
    payload = obj["payload"]
    if kind == "structure":
        value = decode_structure(payload, "$.payload")
    elif kind == "bundle":
        value = decode_bundle(payload, "$.payload")
    elif kind == "morphism":
        value = decode_morphism(payload, "$.payload")
    elif kind == "contraction":
        value = decode_contraction(payload, "$.payload")
    else:
        value = decode_job(payload, "$.payload")
    return kind, value


def serialize_value(kind, value):
    if kind == "structure":
        payload = encode_structure(value)
    elif kind == "bundle":
        payload = encode_bundle(value)
    elif kind == "morphism":
        payload = encode_morphism(value)
    elif kind == "contraction":
        payload = encode_contraction(value)
    elif kind == "job":
        payload = value
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return canonical_dumps(make_document(kind, payload))


def load_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read())
