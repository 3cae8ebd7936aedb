"""JSON documents and Graphviz export.

Every document written carries ``"format": 1``.  Readers accept the field's
absence but reject any other version.  Schema problems raise
:class:`SchemaError` with a JSON pointer to the offending value.
"""

from __future__ import annotations

import json
from typing import Any, Mapping, Optional

from . import bits
from .algebra import FiniteMMAlgebra, algebra_from_json, algebra_to_json
from .bundles import KripkeBundle, KripkeFrame
from .errors import InputError, SchemaError
from .frames import MKFrame
from .semantics import BundleModel, Model
from .syntax import LETTER_RE

FORMAT_VERSION = 1


def dumps(doc: Any) -> str:
    """Indented JSON with short arrays (pairs, world sets, blocks) kept on one line."""
    return _dump(doc, 0) + "\n"


def _flat(v: Any) -> bool:
    if isinstance(v, dict):
        return not v
    if not isinstance(v, list):
        return True
    scalar = all(
        not isinstance(e, (dict, list)) or (isinstance(e, list) and all(
            not isinstance(x, (dict, list)) for x in e))
        for e in v
    )
    # long lists of strings (log lines) read better one per line
    return scalar and (len(json.dumps(v)) <= 80 or not any(isinstance(e, str) for e in v))


def _dump(v: Any, level: int) -> str:
    if _flat(v):
        return json.dumps(v, ensure_ascii=False)
    pad, inner = "  " * level, "  " * (level + 1)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {_dump(x, level + 1)}"
                 for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    items = [inner + _dump(x, level + 1) for x in v]
    return "[\n" + ",\n".join(items) + "\n" + pad + "]"


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def versioned(doc: dict) -> dict:
    return {"format": FORMAT_VERSION, **doc}


def _check_version(doc: Mapping, ptr: str) -> None:
    if "format" in doc and doc["format"] != FORMAT_VERSION:
        raise SchemaError(f"{ptr}/format", f"unsupported format version {doc['format']!r}")


# --------------------------------------------------------------------------
# small validators


def _obj(doc: Any, ptr: str) -> Mapping:
    if not isinstance(doc, dict):
        raise SchemaError(ptr, "expected an object")
    return doc


def _list(doc: Any, ptr: str) -> list:
    if not isinstance(doc, list):
        raise SchemaError(ptr, "expected an array")
    return doc


def _int(doc: Any, ptr: str, lo: int = 0, hi: Optional[int] = None) -> int:
    if isinstance(doc, bool) or not isinstance(doc, int):
        raise SchemaError(ptr, "expected an integer")
    if doc < lo or (hi is not None and doc >= hi):
        bound = f"[{lo}, {hi})" if hi is not None else f">= {lo}"
        raise SchemaError(ptr, f"value {doc} out of range {bound}")
    return doc


def _field(doc: Mapping, key: str, ptr: str) -> Any:
    if key not in doc:
        raise SchemaError(ptr, f"missing field {key!r}")
    return doc[key]


def _world_set(doc: Any, ptr: str, n: int) -> int:
    mask = 0
    for i, x in enumerate(_list(doc, ptr)):
        mask |= 1 << _int(x, f"{ptr}/{i}", 0, n)
    return mask


def _pairs(doc: Any, ptr: str, n: int) -> tuple[int, ...]:
    rows = [0] * n
    for i, pair in enumerate(_list(doc, ptr)):
        p = f"{ptr}/{i}"
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError(p, "expected a pair [i, j]")
        a = _int(pair[0], f"{p}/0", 0, n)
        b = _int(pair[1], f"{p}/1", 0, n)
        rows[a] |= 1 << b
    return tuple(rows)


def _pairs_json(rows) -> list[list[int]]:
    return [[a, b] for a, b in bits.pairs_of(rows)]


# --------------------------------------------------------------------------
# frames, valuations, models


def frame_to_json(F: MKFrame) -> dict:
    doc: dict = {"worlds": F.n}
    if F.names is not None:
        doc["names"] = list(F.names)
    doc["R"] = _pairs_json(F.R)
    doc["E"] = F.partition()
    return doc


def frame_from_json(doc: Any, ptr: str = "") -> MKFrame:
    doc = _obj(doc, ptr)
    _check_version(doc, ptr)
    n = _int(_field(doc, "worlds", ptr), f"{ptr}/worlds", 1)
    names = None
    if "names" in doc:
        raw = _list(doc["names"], f"{ptr}/names")
        if len(raw) != n:
            raise SchemaError(f"{ptr}/names", f"expected {n} names, got {len(raw)}")
        for i, s in enumerate(raw):
            if not isinstance(s, str):
                raise SchemaError(f"{ptr}/names/{i}", "expected a string")
        if len(set(raw)) != n:
            raise SchemaError(f"{ptr}/names", "names must be distinct")
        names = tuple(raw)
    R = _pairs(_field(doc, "R", ptr), f"{ptr}/R", n)
    blocks = [-1] * n
    for b, block in enumerate(_list(_field(doc, "E", ptr), f"{ptr}/E")):
        bp = f"{ptr}/E/{b}"
        if not _list(block, bp):
            raise SchemaError(bp, "blocks must be non-empty")
        for i, x in enumerate(block):
            x = _int(x, f"{bp}/{i}", 0, n)
            if blocks[x] != -1:
                raise SchemaError(f"{bp}/{i}", f"world {x} appears in two blocks")
            blocks[x] = b
    missing = [x for x in range(n) if blocks[x] == -1]
    if missing:
        raise SchemaError(f"{ptr}/E", f"blocks do not cover world {missing[0]}")
    return MKFrame(n, R, tuple(blocks), names)


def valuation_to_json(valuation: Mapping[str, int]) -> dict:
    return {p: bits.to_list(valuation[p]) for p in sorted(valuation)}


def valuation_from_json(doc: Any, n: int, ptr: str = "") -> dict[str, int]:
    out = {}
    for p, ws in _obj(doc, ptr).items():
        if not LETTER_RE.fullmatch(p):
            raise SchemaError(f"{ptr}/{p}", f"{p!r} is not a propositional letter")
        out[p] = _world_set(ws, f"{ptr}/{p}", n)
    return out


def model_to_json(M: Model) -> dict:
    return {"frame": frame_to_json(M.frame), "valuation": valuation_to_json(M.valuation)}


def model_from_json(doc: Any, ptr: str = "") -> Model:
    """A ``{"frame", "valuation"}`` document, or a bare frame (empty valuation)."""
    doc = _obj(doc, ptr)
    _check_version(doc, ptr)
    if "frame" in doc:
        F = frame_from_json(doc["frame"], f"{ptr}/frame")
        val = valuation_from_json(doc.get("valuation", {}), F.n, f"{ptr}/valuation")
    else:
        F = frame_from_json(doc, ptr)
        val = {}
    return Model(F, val)


# --------------------------------------------------------------------------
# bundles and interpretations


def kripke_frame_to_json(K: KripkeFrame) -> dict:
    return {"worlds": K.n, "R": _pairs_json(K.R)}


def _kripke_frame_from_json(doc: Any, ptr: str) -> KripkeFrame:
    doc = _obj(doc, ptr)
    n = _int(_field(doc, "worlds", ptr), f"{ptr}/worlds", 1)
    return KripkeFrame(n, _pairs(_field(doc, "R", ptr), f"{ptr}/R", n))


def bundle_to_json(B: KripkeBundle) -> dict:
    return {
        "total": kripke_frame_to_json(B.total),
        "base": kripke_frame_to_json(B.base),
        "pi": list(B.pi),
    }


def bundle_from_json(doc: Any, ptr: str = "") -> KripkeBundle:
    doc = _obj(doc, ptr)
    _check_version(doc, ptr)
    total = _kripke_frame_from_json(_field(doc, "total", ptr), f"{ptr}/total")
    base = _kripke_frame_from_json(_field(doc, "base", ptr), f"{ptr}/base")
    raw = _list(_field(doc, "pi", ptr), f"{ptr}/pi")
    if len(raw) != total.n:
        raise SchemaError(f"{ptr}/pi", f"expected {total.n} entries, got {len(raw)}")
    pi = tuple(_int(w, f"{ptr}/pi/{i}", 0, base.n) for i, w in enumerate(raw))
    return KripkeBundle(total, base, pi)


def interp_to_json(BM: BundleModel) -> dict:
    return {
        f"w{w}": {P: bits.to_list(BM.interp[w][P]) for P in sorted(BM.interp[w])}
        for w in sorted(BM.interp)
    }


def interp_from_json(doc: Any, B: KripkeBundle, ptr: str = "") -> dict[int, dict[str, int]]:
    out: dict[int, dict[str, int]] = {}
    for key, table in _obj(doc, ptr).items():
        kp = f"{ptr}/{key}"
        digits = key[1:] if key.startswith("w") else key
        if not digits.isdigit():
            raise SchemaError(kp, "keys are base worlds written w0, w1, ...")
        w = int(digits)
        if w >= B.base.n:
            raise SchemaError(kp, f"base world {w} outside the bundle")
        entry = out.setdefault(w, {})
        for P, xs in _obj(table, kp).items():
            if not (P.endswith("*") and LETTER_RE.fullmatch(P[:-1])):
                raise SchemaError(f"{kp}/{P}", f"{P!r} is not a predicate name like p*")
            mask = _world_set(xs, f"{kp}/{P}", B.total.n)
            if mask & ~B.fibers[w]:
                raise SchemaError(f"{kp}/{P}", f"individuals outside the fiber over w{w}")
            entry[P] = mask
    return out


def bundle_model_from_json(doc: Any, ptr: str = "") -> BundleModel:
    """A ``{"bundle", "interpretation"}`` document, or a bare bundle."""
    doc = _obj(doc, ptr)
    _check_version(doc, ptr)
    if "bundle" in doc:
        B = bundle_from_json(doc["bundle"], f"{ptr}/bundle")
        interp = interp_from_json(doc.get("interpretation", {}), B, f"{ptr}/interpretation")
    else:
        B = bundle_from_json(doc, ptr)
        interp = {}
    return BundleModel(B, interp)


# --------------------------------------------------------------------------
# algebras


def algebra_doc(A: FiniteMMAlgebra) -> dict:
    return algebra_to_json(A)


def algebra_from_doc(doc: Any, ptr: str = "") -> FiniteMMAlgebra:
    doc = _obj(doc, ptr)
    _check_version(doc, ptr)
    m = _int(_field(doc, "atoms", ptr), f"{ptr}/atoms", 1)
    tables = []
    for key in ("dia", "ex"):
        raw = _list(_field(doc, key, ptr), f"{ptr}/{key}")
        if len(raw) != m:
            raise SchemaError(f"{ptr}/{key}", f"expected one atom set per atom ({m}), got {len(raw)}")
        for i, s in enumerate(raw):
            _world_set(s, f"{ptr}/{key}/{i}", m)
        tables.append(raw)
    return algebra_from_json(m, tables[0], tables[1])


# --------------------------------------------------------------------------
# Graphviz


def _quote(s: str) -> str:
    escaped = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + escaped + '"'


def frame_to_dot(
    F: MKFrame,
    loops: bool = True,
    valuation: Optional[Mapping[str, int]] = None,
    labels: Optional[Mapping[int, str]] = None,
    name: str = "frame",
) -> str:
    """R as solid edges, E-blocks as ``cluster_*`` subgraphs."""
    lines = [f"digraph {_quote(name)} {{", "  compound=true;", "  node [shape=circle];"]
    for b, block in enumerate(F.partition()):
        lines.append(f"  subgraph cluster_{b} {{")
        lines.append("    style=dashed;")
        lines.append(f"    label={_quote(f'E{b}')};")
        for x in block:
            text = F.name(x)
            if valuation:
                true = [p for p in sorted(valuation) if valuation[p] >> x & 1]
                if true:
                    text += "\n" + ",".join(true)
            if labels and x in labels:
                text += "\n" + labels[x]
            lines.append(f"    {x} [label={_quote(text)}];")
        lines.append("  }")
    for a, b in bits.pairs_of(F.R):
        if a == b and not loops:
            continue
        lines.append(f"  {a} -> {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
