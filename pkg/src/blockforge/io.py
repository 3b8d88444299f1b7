"""JSON (de)serialization of complexes, languages and manifolds.

Complex schema::

    {"name": "...",
     "atoms": [{"x": 0.0, "y": 0.0, "detuning": "3/2"}, ...],   # x, y omitted when abstract
     "ports": [{"label": "A", "index": 0}, ...],
     "blockade_radius": 1.0,
     "blockade_edges": [[0, 1], ...]}

``blockade_edges`` is optional for geometric complexes (derived from the
positions); when present it is the prescribed graph and is kept as is.
Detunings are exact rationals written as strings; plain numbers are accepted.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .core import BlockadeGraph, Complex, Language, Port, format_word, to_fraction
from .errors import ValidationError


def _fail(path: str, message: str):
    raise ValidationError(f"{path}: {message}")


def _fraction_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def complex_to_dict(cplx: Complex) -> dict:
    atoms = []
    for k, d in enumerate(cplx.detunings):
        atom = {}
        if cplx.positions is not None:
            atom["x"], atom["y"] = float(cplx.positions[k][0]), float(cplx.positions[k][1])
        atom["detuning"] = _fraction_text(d)
        atoms.append(atom)
    out = {
        "name": cplx.name,
        "atoms": atoms,
        "ports": [{"label": p.label, "index": p.index} for p in cplx.ports],
        "blockade_radius": cplx.blockade_radius,
        "blockade_edges": [list(e) for e in cplx.graph.sorted_edges()],
    }
    if cplx.metadata:
        out["metadata"] = cplx.metadata
    return out


def complex_from_dict(data) -> Complex:
    if not isinstance(data, dict):
        _fail("$", "a complex must be a JSON object")
    atoms = data.get("atoms")
    if not isinstance(atoms, list) or not atoms:
        _fail("$.atoms", "expected a non-empty list of atoms")
    detunings, positions = [], []
    for k, atom in enumerate(atoms):
        where = f"$.atoms[{k}]"
        if not isinstance(atom, dict):
            _fail(where, "expected an object")
        if "detuning" not in atom:
            _fail(where, "missing 'detuning'")
        try:
            detunings.append(to_fraction(atom["detuning"]))
        except (ValueError, TypeError, ZeroDivisionError, ValidationError) as exc:
            _fail(f"{where}.detuning", f"not a rational number ({exc})")
        has_xy = "x" in atom or "y" in atom
        if has_xy:
            try:
                positions.append((float(atom["x"]), float(atom["y"])))
            except (KeyError, TypeError, ValueError):
                _fail(where, "needs both numeric 'x' and 'y'")
    if positions and len(positions) != len(atoms):
        _fail("$.atoms", "either every atom has coordinates or none has")
    ports = []
    for k, p in enumerate(data.get("ports", [])):
        where = f"$.ports[{k}]"
        if not isinstance(p, dict) or "label" not in p or "index" not in p:
            _fail(where, "expected {'label': ..., 'index': ...}")
        if not isinstance(p["index"], int) or not 0 <= p["index"] < len(atoms):
            _fail(f"{where}.index", f"must be an atom index in [0, {len(atoms)})")
        ports.append(Port(str(p["label"]), p["index"]))
    radius = data.get("blockade_radius", 1.0)
    if not isinstance(radius, (int, float)) or radius <= 0:
        _fail("$.blockade_radius", "must be a positive number")
    graph = None
    if "blockade_edges" in data:
        edges = data["blockade_edges"]
        if not isinstance(edges, list):
            _fail("$.blockade_edges", "expected a list of index pairs")
        for k, e in enumerate(edges):
            if (not isinstance(e, (list, tuple)) or len(e) != 2
                    or not all(isinstance(v, int) and 0 <= v < len(atoms) for v in e) or e[0] == e[1]):
                _fail(f"$.blockade_edges[{k}]", "expected two distinct atom indices")
        graph = BlockadeGraph.from_edges(len(atoms), [tuple(e) for e in edges])
    elif not positions:
        _fail("$", "an abstract complex (no coordinates) needs 'blockade_edges'")
    return Complex(
        tuple(detunings), graph, tuple(ports), tuple(positions) if positions else None, float(radius),
        str(data.get("name", "")), dict(data.get("metadata", {})),
    )


def language_to_dict(language: Language) -> dict:
    return {"word_length": language.word_length, "words": language.strings()}


def language_from_dict(data) -> Language:
    if isinstance(data, list):
        data = {"words": data}
    if not isinstance(data, dict) or "words" not in data:
        _fail("$", "a language is {'word_length': n, 'words': ['0101', ...]}")
    words = data["words"]
    if not isinstance(words, list):
        _fail("$.words", "expected a list of bit strings")
    for k, w in enumerate(words):
        if not isinstance(w, str) or set(w) - {"0", "1"}:
            _fail(f"$.words[{k}]", f"{w!r} is not a bit string")
    return Language.from_strings(words, data.get("word_length"))


def manifold_to_dict(cplx: Complex, gsm) -> dict:
    return {
        "n_atoms": cplx.n_atoms,
        "ground_energy": _fraction_text(gsm.ground_energy),
        "gap": "inf" if not isinstance(gsm.gap, Fraction) else _fraction_text(gsm.gap),
        "strategy": gsm.strategy,
        "ground_states": [
            {"occupied": [i for i in range(cplx.n_atoms) if m >> i & 1],
             "ports": format_word(cplx.project(m))}
            for m in gsm.masks
        ],
    }


def read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def load_complex(path) -> Complex:
    data = read_json(path)
    if isinstance(data, dict) and "complex" in data and "atoms" not in data:
        data = data["complex"]
    try:
        return complex_from_dict(data)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def load_language(path) -> Language:
    return language_from_dict(read_json(path))


def save_complex(path, cplx: Complex) -> None:
    write_json(path, complex_to_dict(cplx))
