"""Positional names for classes in the Ext of the sphere.

The data file assigns a named basis to every nonzero bidegree ``(s, stem)``
through stem 30.  Vectors are expressed in the generator basis of the
deterministic minimal resolution of ``S^0``; the file is regenerated by
``tools/gen_catalog.py`` and must be regenerated if generator ordering changes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .f2core import Echelon


@dataclass(frozen=True)
class Catalog:
    s_max: int
    stem_max: int
    basis: dict  # (s, stem) -> tuple of (name, vector)

    def covers(self, s: int, stem: int) -> bool:
        return (s <= self.s_max and 0 <= stem <= self.stem_max) or stem == 0

    def named_basis(self, s: int, stem: int) -> tuple:
        if stem == 0 and s > self.s_max:
            return ((f"h0^{s}", 1),)
        return self.basis.get((s, stem), ())

    def name(self, s: int, stem: int, vector: int) -> str:
        """Name of ``vector`` (generator coordinates) as a sum of named basis classes."""
        if vector == 0:
            return "0"
        if not self.covers(s, stem):
            return _generic(s, stem, vector)
        basis = self.named_basis(s, stem)
        ech = Echelon()
        for j, (_, v) in enumerate(basis):
            ech.add(v, 1 << j)
        rem, tag = ech.reduce(vector)
        if rem:
            raise ValueError(f"vector {vector:b} outside the catalog span at ({s}, {stem})")
        return "+".join(basis[j][0] for j in range(len(basis)) if (tag >> j) & 1)

    def vector(self, name: str) -> tuple[int, int, int]:
        """``(s, stem, vector)`` for a basis name such as ``h0^3h3``."""
        got = self._by_name().get(name)
        if got is None:
            if name.startswith("h0^") and name[3:].isdigit():
                return int(name[3:]), 0, 1
            raise KeyError(name)
        return got

    @lru_cache(maxsize=1)
    def _by_name(self) -> dict:
        out = {}
        for (s, stem), entries in self.basis.items():
            for nm, v in entries:
                out[nm] = (s, stem, v)
        return out

    def __hash__(self):
        return id(self)


def _generic(s: int, stem: int, vector: int) -> str:
    idx = [j for j in range(vector.bit_length()) if (vector >> j) & 1]
    return "+".join(f"x{s}_{stem}_{j}" for j in idx)


@lru_cache(maxsize=None)
def sphere_catalog() -> Catalog:
    raw = json.loads(resources.files("borelext").joinpath("data/sphere_names.json").read_text())
    if raw.get("format") != "sphere-names/1":
        raise ValueError("unsupported catalog format")
    basis = {}
    for e in raw["entries"]:
        basis[(e["s"], e["stem"])] = tuple((b["name"], b["vector"]) for b in e["basis"])
    return Catalog(raw["s_max"], raw["stem_max"], basis)


def with_cell(name: str, cell: int) -> str:
    return f"{name}[{cell}]"


def split_cell(label: str) -> tuple[str, int]:
    """Inverse of :func:`with_cell`."""
    base, _, rest = label.rpartition("[")
    if not base or not rest.endswith("]"):
        raise ValueError(f"not a cell label: {label!r}")
    return base, int(rest[:-1])


_SUP = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def pretty(label: str) -> str:
    """Typeset exponents as superscripts, e.g. ``h0^3h3[-4]`` -> ``h0³h3[−4]``."""
    out = []
    i = 0
    while i < len(label):
        ch = label[i]
        if ch == "^":
            j = i + 1
            while j < len(label) and label[j].isdigit():
                j += 1
            out.append(label[i + 1:j].translate(_SUP))
            i = j
            continue
        out.append("−" if ch == "-" else ch)
        i += 1
    return "".join(out)
