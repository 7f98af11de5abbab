"""Workspace documents: one JSON file holding spaces, projectors, structures and catalogs.

Layout (every section optional)::

    {
      "space": {"codims": [...], "dim": 15, "labels": [...]},
      "projectors": {
        "P": {"modulus": 0, "rows": [[...], ...]},
        "Q": {"modulus": 0, "cells": ["r1_0", "r1_3"]}     # 0/1 diagonal
      },
      "structure": {"transfer_degree": 6, "group": [[[...]]], "spans": {"4": ["P", ...]}},
      "decompositions": {"L1": {"ambient": "P", "primes": {"2": [["Q", "R"], "rest"], ...}}},
      "catalogs": {"blocks": {"R2": [0, 3]}, "primes": {"2": [["R2", 0], ...]}},
      "partitions": {"name": [[0, 3], [1, 4]]},
      "instances": [{"degree": 8, "index": 8, "k": 2}]
    }

A decomposition part is a list of projector names (summed and reduced
modulo the prime) or the string ``"rest"`` for the complement in the
ambient projector.  Matrices are integer rows; the modulus of each object
is explicit and ``0`` means the integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import DocumentError
from .intmat import Matrix
from .lifting import DecompositionSpec
from .motive import RationalStructure, SplitMotiveSpace, TateShape
from .severi_brauer import SBInstance
from .shapes import Block, PrimeCatalog, ShapePartition

TOP_KEYS = {"space", "projectors", "structure", "decompositions", "catalogs", "partitions", "instances"}
REST = "rest"


@dataclass
class Workspace:
    space: dict | None = None
    projectors: dict[str, dict] = field(default_factory=dict)
    structure: dict | None = None
    decompositions: dict[str, dict] = field(default_factory=dict)
    catalogs: dict | None = None
    partitions: dict[str, list] = field(default_factory=dict)
    instances: list[dict] = field(default_factory=list)

    # typed views --------------------------------------------------------

    def motive_space(self) -> SplitMotiveSpace:
        if self.space is None:
            raise DocumentError("document has no 'space' section")
        s = self.space
        return SplitMotiveSpace(tuple(s["codims"]), s["dim"], tuple(s.get("labels", ())))

    def matrix(self, name: str) -> Matrix:
        if name not in self.projectors:
            raise DocumentError(f"unknown projector {name!r}")
        entry = self.projectors[name]
        modulus = entry.get("modulus", 0)
        if "rows" in entry:
            return Matrix(entry["rows"], modulus)
        space = self.motive_space()
        chosen = {space.index(lbl) for lbl in entry["cells"]}
        return space.cell_projector(chosen, modulus)

    def rational_structure(self) -> RationalStructure:
        if self.structure is None:
            raise DocumentError("document has no 'structure' section")
        s = self.structure
        group = tuple(Matrix(g) for g in s.get("group", ()))
        spans = {int(q): tuple(self.matrix(n).lift() for n in names) for q, names in s.get("spans", {}).items()}
        return RationalStructure(s["transfer_degree"], group, spans)

    def decomposition(self, name: str) -> tuple[Matrix, dict[int, DecompositionSpec]]:
        """Integral ambient projector and the per-prime decompositions of a grouping."""
        if name not in self.decompositions:
            raise DocumentError(f"unknown decomposition {name!r}")
        entry = self.decompositions[name]
        ambient = self.matrix(entry["ambient"]).lift() if "ambient" in entry else None
        if ambient is None:
            ambient = self.motive_space().identity()
        out = {}
        for p_text, parts in entry["primes"].items():
            p = int(p_text)
            amb = ambient.reduce(p)
            mats = []
            for part in parts:
                if part == REST:
                    mats.append(None)
                    continue
                acc = Matrix.zeros(*amb.shape, p)
                for n in part:
                    acc = acc + self.matrix(n).lift().reduce(p)
                mats.append(acc)
            if mats.count(None) > 1:
                raise DocumentError(f"decomposition {name!r} mod {p}: at most one 'rest' part")
            if None in mats:
                others = [M for M in mats if M is not None]
                rest = amb - sum(others, Matrix.zeros(*amb.shape, p))
                mats = [rest if M is None else M for M in mats]
            out[p] = DecompositionSpec(amb, tuple(mats))
        return ambient, out

    def prime_catalogs(self) -> list[PrimeCatalog]:
        if self.catalogs is None:
            raise DocumentError("document has no 'catalogs' section")
        blocks = {name: Block(name, TateShape.of(cells)) for name, cells in self.catalogs["blocks"].items()}
        cats = []
        for p_text in sorted(self.catalogs["primes"], key=int):
            items = []
            for bname, shift in self.catalogs["primes"][p_text]:
                if bname not in blocks:
                    raise DocumentError(f"catalog mod {p_text} uses unknown block {bname!r}")
                items.append((blocks[bname], shift))
            cats.append(PrimeCatalog.build(int(p_text), items))
        return cats

    def partition(self, name: str) -> ShapePartition:
        if name not in self.partitions:
            raise DocumentError(f"unknown partition {name!r}")
        return ShapePartition.of(self.partitions[name])

    def sb_instances(self) -> list[SBInstance]:
        return [SBInstance.of(i["degree"], i["index"], i["k"]) for i in self.instances]


# ---------------------------------------------------------------------------
# parsing


def _position(text: str, needle: str) -> tuple[int | None, int | None]:
    at = text.find(needle)
    if at < 0:
        return None, None
    line = text.count("\n", 0, at) + 1
    col = at - (text.rfind("\n", 0, at) + 1) + 1
    return line, col


class _Checker:
    def __init__(self, text: str):
        self.text = text

    def fail(self, message: str, near: str | None = None) -> DocumentError:
        line, col = _position(self.text, f'"{near}"') if near is not None else (None, None)
        return DocumentError(message, line, col)

    def keys(self, obj: Any, allowed: set[str], where: str, required: set[str] = frozenset()) -> dict:
        if not isinstance(obj, dict):
            raise self.fail(f"{where} must be an object")
        for k in obj:
            if k not in allowed:
                raise self.fail(f"unknown key {k!r} in {where}", k)
        for k in required:
            if k not in obj:
                raise self.fail(f"{where} is missing {k!r}")
        return obj

    def int_list(self, obj: Any, where: str) -> list[int]:
        if not isinstance(obj, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in obj):
            raise self.fail(f"{where} must be a list of integers")
        return obj

    def rows(self, obj: Any, where: str) -> list[list[int]]:
        if not isinstance(obj, list) or not obj:
            raise self.fail(f"{where} must be a nonempty list of rows")
        width = None
        for r in obj:
            self.int_list(r, where)
            if width is None:
                width = len(r)
            elif len(r) != width:
                raise self.fail(f"{where} has rows of different lengths")
        return obj


def parse_document(text: str) -> Workspace:
    """Parse and validate a workspace document; every reference must resolve."""
    if not text.strip():
        raise DocumentError("empty document", 1, 1)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, exc.lineno, exc.colno) from None
    ck = _Checker(text)
    ck.keys(raw, TOP_KEYS, "document")
    if not raw:
        raise DocumentError("document has no sections", 1, 1)
    ws = Workspace()

    if "space" in raw:
        s = ck.keys(raw["space"], {"codims", "dim", "labels"}, "space", {"codims", "dim"})
        ck.int_list(s["codims"], "space.codims")
        if "labels" in s and len(s["labels"]) != len(s["codims"]):
            raise ck.fail("space.labels must match space.codims in length", "labels")
        ws.space = s
        try:
            ws.motive_space()
        except ValueError as exc:
            raise ck.fail(f"invalid space: {exc}", "space") from None

    for name, entry in raw.get("projectors", {}).items():
        ck.keys(entry, {"modulus", "rows", "cells"}, f"projector {name!r}")
        if ("rows" in entry) == ("cells" in entry):
            raise ck.fail(f"projector {name!r} needs exactly one of 'rows' or 'cells'", name)
        if "rows" in entry:
            ck.rows(entry["rows"], f"projector {name!r}")
        else:
            if ws.space is None:
                raise ck.fail(f"projector {name!r} lists cells but there is no space", name)
            labels = ws.motive_space().labels
            for lbl in entry["cells"]:
                if lbl not in labels:
                    raise ck.fail(f"projector {name!r} refers to unknown cell {lbl!r}", lbl)
        ws.projectors[name] = entry

    if "structure" in raw:
        s = ck.keys(raw["structure"], {"transfer_degree", "group", "spans"}, "structure", {"transfer_degree"})
        for g in s.get("group", []):
            ck.rows(g, "structure.group")
        for q, names in s.get("spans", {}).items():
            if not q.isdigit():
                raise ck.fail(f"span modulus {q!r} is not a positive integer", q)
            for n in names:
                if n not in ws.projectors:
                    raise ck.fail(f"span mod {q} refers to unknown projector {n!r}", n)
        ws.structure = s

    for name, entry in raw.get("decompositions", {}).items():
        ck.keys(entry, {"ambient", "primes"}, f"decomposition {name!r}", {"primes"})
        if "ambient" in entry and entry["ambient"] not in ws.projectors:
            raise ck.fail(f"decomposition {name!r} has unknown ambient {entry['ambient']!r}", entry["ambient"])
        for p, parts in entry["primes"].items():
            if not p.isdigit():
                raise ck.fail(f"prime key {p!r} is not an integer", p)
            for part in parts:
                if part == REST:
                    continue
                if not isinstance(part, list):
                    raise ck.fail(f"decomposition {name!r}: a part is a list of projector names or 'rest'")
                for n in part:
                    if n not in ws.projectors:
                        raise ck.fail(f"decomposition {name!r} refers to unknown projector {n!r}", n)
        ws.decompositions[name] = entry

    if "catalogs" in raw:
        c = ck.keys(raw["catalogs"], {"blocks", "primes"}, "catalogs", {"blocks", "primes"})
        for bname, cells in c["blocks"].items():
            ck.int_list(cells, f"block {bname!r}")
        for p, items in c["primes"].items():
            if not p.isdigit():
                raise ck.fail(f"prime key {p!r} is not an integer", p)
            for item in items:
                if not (isinstance(item, list) and len(item) == 2 and isinstance(item[1], int)):
                    raise ck.fail(f"catalog mod {p}: entries are [block, shift] pairs", p)
                if item[0] not in c["blocks"]:
                    raise ck.fail(f"catalog mod {p} uses unknown block {item[0]!r}", item[0])
        ws.catalogs = c

    for name, parts in raw.get("partitions", {}).items():
        if not isinstance(parts, list):
            raise ck.fail(f"partition {name!r} must be a list of parts", name)
        for part in parts:
            ck.int_list(part, f"partition {name!r}")
        ws.partitions[name] = parts

    for i, inst in enumerate(raw.get("instances", [])):
        ck.keys(inst, {"degree", "index", "k"}, f"instance {i}", {"degree", "index", "k"})
        ws.instances.append(inst)

    try:
        if ws.structure is not None:
            ws.rational_structure()
        if ws.catalogs is not None:
            ws.prime_catalogs()
    except (ValueError, KeyError) as exc:
        raise DocumentError(f"invalid document: {exc}") from None
    return ws


def load_document(path: str) -> Workspace:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    return parse_document(text)


def serialize_document(ws: Workspace) -> str:
    raw: dict[str, Any] = {}
    if ws.space is not None:
        raw["space"] = ws.space
    if ws.projectors:
        raw["projectors"] = ws.projectors
    if ws.structure is not None:
        raw["structure"] = ws.structure
    if ws.decompositions:
        raw["decompositions"] = ws.decompositions
    if ws.catalogs is not None:
        raw["catalogs"] = ws.catalogs
    if ws.partitions:
        raw["partitions"] = ws.partitions
    if ws.instances:
        raw["instances"] = ws.instances
    return json.dumps(raw, indent=1, sort_keys=True) + "\n"
