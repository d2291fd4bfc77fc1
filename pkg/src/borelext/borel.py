"""Trigraded Borel Ext assembled from column models, with rho, dictionaries and Mahowald invariants.

A Borel tridegree ``(s, t, w)`` has stem ``t - s`` and coweight ``t - s - w``.
Its group is computed classically in internal degree ``t - w - 1``:

* ``w > 0``: ``Ext^{s-1}`` of the deleted-cell model ``M_w``;
* ``w <= 0``: ``Ext^{s-1}`` of ``P_{-w}`` plus ``Ext^{s}`` of ``S^-1``.

The ``S^-1`` summand is embedded by pulling back along the projection of the
truncations onto their cell ``-1``; this choice of splitting is recorded in
every result as :data:`SPLITTING`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .catalog import Catalog, sphere_catalog
from .f2core import BitMatrix, BitVector, Echelon
from .limits import LimitEngine, truncation
from .modules import (GradedModule, column_model, deleted_cell_model, dictionary_model, sphere,
                      stunted_module)
from .resolution import ResolutionStore, default_store
from .sseq import Ahss, CellContext, Detector, NamedClass

SPLITTING = "S^-1 summand embedded by pullback along the projection of P_{-K}^{-w-1} onto cell -1"
DICTIONARY_DEPTH = 16
DEPTH_STEP = 8


class WindowError(ValueError):
    """A query outside the configured window; the message says how to enlarge it."""


@dataclass(frozen=True)
class BorelClass:
    named: NamedClass
    vector: int
    summand: str          # "M" for w > 0, "P" or "S" for w <= 0

    @property
    def label(self) -> str:
        return self.named.label


@dataclass
class BorelGroup:
    s: int
    t: int
    w: int
    basis: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def stem(self) -> int:
        return self.t - self.s

    @property
    def coweight(self) -> int:
        return self.t - self.s - self.w

    @property
    def classical_t(self) -> int:
        return self.t - self.w - 1

    def names(self) -> list[str]:
        return [c.label for c in self.basis]

    def coordinates(self, parts: tuple[int, int]) -> int:
        """Coordinates in :attr:`basis` of a class given as ``(first, second)`` summand vectors."""
        ech = Echelon()
        for i, c in enumerate(self.basis):
            ech.add(_pack(c, self), 1 << i)
        rem, tag = ech.reduce(_pack_parts(parts, self))
        if rem:
            raise ValueError("vector outside the group")
        return tag


_S_OFFSET = 1 << 12   # bit offset separating the S^-1 summand when packing


def _pack(c: BorelClass, g: BorelGroup) -> int:
    return (c.vector << _S_OFFSET) if c.summand == "S" else c.vector


def _pack_parts(parts: tuple[int, int], g: BorelGroup) -> int:
    return parts[0] | (parts[1] << _S_OFFSET)


@dataclass(frozen=True)
class RhoLine:
    source: tuple[int, int, int]
    target: tuple[int, int, int]
    source_label: str
    target_label: str


@dataclass
class RhoMap:
    source: BorelGroup
    target: BorelGroup
    matrix: BitMatrix        # columns: source basis, rows: target basis

    def apply(self, coords: int) -> int:
        return self.matrix.apply(BitVector(self.matrix.cols, coords)).payload

    def lines(self) -> list[RhoLine]:
        out = []
        for j, col in enumerate(self.matrix.columns()):
            for i in range(self.target.dim):
                if (col >> i) & 1:
                    out.append(RhoLine((self.source.s, self.source.t, self.source.w),
                                       (self.target.s, self.target.t, self.target.w),
                                       self.source.basis[j].label, self.target.basis[i].label))
        return out


@dataclass(frozen=True)
class DictionaryPair:
    source: str
    target: str
    r: int
    s: int
    t: int

    @property
    def stem(self) -> int:
        return self.t - self.s


@dataclass
class Dictionary:
    variant: str
    depths: tuple[int, int]
    pairs: list
    unstable: list

    def contains(self, source: str, target: str) -> bool:
        return any(p.source == source and p.target == target for p in self.pairs)

    def source_of(self, target: str) -> Optional[str]:
        hits = [p.source for p in self.pairs if p.target == target]
        return hits[0] if len(hits) == 1 else None


@dataclass(frozen=True)
class MahowaldResult:
    sphere_class: str
    name: Optional[NamedClass]
    depths: tuple[int, int]
    stable: bool


class BorelEngine:
    """Borel groups in a window of filtration and coweight.

    ``s_max`` bounds the Borel filtration; coweights run over
    ``[coweight_min, coweight_max]`` and stems over ``[0, stem_max]``.
    """

    def __init__(self, s_max: int = 12, coweight_min: int = -2, coweight_max: int = 13,
                 stem_max: int = 30, store: Optional[ResolutionStore] = None,
                 catalog: Optional[Catalog] = None, depth: Optional[int] = None):
        self.s_max = s_max
        self.coweight_min = coweight_min
        self.coweight_max = coweight_max
        self.stem_max = stem_max
        self.top = coweight_max + 1
        self.store = store or default_store()
        self.catalog = catalog or sphere_catalog()
        self._detectors: dict = {}
        self._groups: dict = {}
        self._ctx: dict = {}
        self._limits = LimitEngine(s_max, coweight_min, coweight_max,
                                   **({"depth": depth} if depth else {}), store=self.store)

    # -- window ---------------------------------------------------------------------------

    @property
    def weights(self) -> range:
        return range(-self.coweight_max, self.stem_max - self.coweight_min + 1)

    def check_window(self, s: int, t: int, w: int) -> None:
        c = t - s - w
        problems = []
        if not 0 <= s <= self.s_max:
            problems.append(f"s={s} needs --smax {max(s, 0)}")
        if not self.coweight_min <= c <= self.coweight_max:
            problems.append(f"coweight {c} lies outside [{self.coweight_min}, {self.coweight_max}]")
        if problems:
            raise WindowError(f"({s},{t},{w}) outside the window: " + "; ".join(problems))

    def _detector(self, m: GradedModule) -> Detector:
        d = self._detectors.get(m.cells)
        if d is None:
            d = Detector(m, self.s_max, self.coweight_max, self.store, self.catalog)
            self._detectors[m.cells] = d
        return d

    def _context(self, m: GradedModule) -> CellContext:
        c = self._ctx.get(m.cells)
        if c is None:
            c = CellContext(m, self.s_max, self.coweight_max, self.store)
            self._ctx[m.cells] = c
        return c

    def models(self, w: int) -> list[tuple[GradedModule, int]]:
        return column_model(w, self.top)

    # -- groups ---------------------------------------------------------------------------

    def group(self, s: int, t: int, w: int) -> BorelGroup:
        self.check_window(s, t, w)
        key = (s, t, w)
        got = self._groups.get(key)
        if got is not None:
            return got
        tc = t - w - 1
        g = BorelGroup(s, t, w)
        for m, shift in self.models(w):
            ss = s - shift
            if ss < 0 or tc < m.bottom:
                continue
            tag = "M" if w > 0 else ("S" if m.cells == (-1,) else "P")
            for named, vec in self._detector(m).named_basis(ss, tc):
                g.basis.append(BorelClass(NamedClass(named.name, named.cell, s, t, tag), vec, tag))
        self._groups[key] = g
        return g

    def page(self, coweight: int) -> list[BorelGroup]:
        """Every nonzero group of one coweight, ordered by stem then filtration."""
        out = []
        for stem in range(0, self.stem_max + 1):
            w = stem - coweight
            for s in range(self.s_max + 1):
                g = self.group(s, stem + s, w)
                if g.dim:
                    out.append(g)
        return out

    # -- rho ------------------------------------------------------------------------------

    def rho_parts(self, w: int, s: int, tc: int, parts: tuple[int, int]) -> tuple[int, int]:
        """``rho`` on summand vectors ``(main, S^-1)`` of column ``w`` at classical degree ``tc``."""
        x, y = parts
        if w >= 2:
            src, tgt = deleted_cell_model(w, self.top), deleted_cell_model(w - 1, self.top)
            return self._restrict(tgt, src, s - 1, tc, x), 0
        if w == 1:
            return x, self._boundary_s_part(s, tc, x)
        src, tgt = stunted_module(-w, self.top), stunted_module(-w + 1, self.top)
        return self._restrict(tgt, src, s - 1, tc, x), y

    def _restrict(self, sub: GradedModule, m: GradedModule, s: int, t: int, x: int) -> int:
        if s < 0 or x == 0:
            return 0
        ctx = self._context(m)
        mat = ctx.matrix(ctx.induced(sub, m), s, t)
        return mat.apply(BitVector(mat.cols, x)).payload

    def _boundary_s_part(self, s: int, tc: int, x: int) -> int:
        """``Ext^{s-1}(P_0) -> Ext^{s}(S^-1)``: the connecting map of ``P_0 -> P_{-1} -> S^-1``."""
        if s < 1 or x == 0:
            return 0
        ctx = self._context(stunted_module(-1, self.top))
        sub = stunted_module(0, self.top)
        mat = ctx.matrix(ctx.connecting(sub, sphere(-1)), s - 1, tc)
        if mat.rows == 0:
            return 0
        return mat.apply(BitVector(mat.cols, x)).payload

    def rho_map(self, s: int, t: int, w: int) -> RhoMap:
        """``rho: (s, t, w) -> (s, t-1, w-1)`` in the named bases of both groups."""
        src = self.group(s, t, w)
        tgt = self.group(s, t - 1, w - 1)
        tc = t - w - 1
        cols = []
        for c in src.basis:
            parts = (0, c.vector) if c.summand == "S" else (c.vector, 0)
            img = self.rho_parts(w, s, tc, parts)
            cols.append(tgt.coordinates(img) if tgt.dim else 0)
        return RhoMap(src, tgt, BitMatrix.from_columns(tgt.dim, cols))

    def rho_lines(self, coweight: int) -> list[RhoLine]:
        out = []
        for stem in range(1, self.stem_max + 1):
            w = stem - coweight
            for s in range(self.s_max + 1):
                if self.group(s, stem + s, w).dim and self.group(s, stem + s - 1, w - 1).dim:
                    out.extend(self.rho_map(s, stem + s, w).lines())
        return out

    def verify_rho(self, s: int, t: int, w: int, K: int) -> bool:
        """Check ``rho`` against the kill-top-cell map on truncations at depth ``K``.

        With transports ``T_w`` from column models into ``Ext(P_{-K}^{-w-1})``, the
        square ``q* T_w = T_{w-1} rho`` must commute.
        """
        tc = t - w - 1
        lim = self._limits
        t_src = lim.transport_at(w, K, s, tc)
        t_tgt = lim.transport_at(w - 1, K, s, tc)
        upper, lower = truncation(w - 1, K), truncation(w, K)
        ctx = lim.context(upper)
        q = ctx.matrix(ctx.induced(upper, lower), s, tc)
        n_main = self._main_dim(w, s, tc)
        n_main_tgt = self._main_dim(w - 1, s, tc)
        for j in range(t_src.cols):
            parts = (1 << j, 0) if j < n_main else (0, 1 << (j - n_main))
            lhs = _mul(q, _col(t_src, j))
            x, y = self.rho_parts(w, s, tc, parts)
            rhs = _mul(t_tgt, x | (y << n_main_tgt))
            if lhs != rhs:
                return False
        return True

    def _main_dim(self, w: int, s: int, tc: int) -> int:
        m, shift = self.models(w)[0]
        return self._context(m).dim(m, s - shift, tc) if s - shift >= 0 else 0

    # -- names through the limit ------------------------------------------------------------

    def limit_class(self, s: int, t: int, w: int, coords: int, K: int) -> tuple[int, GradedModule]:
        """Image of a basis combination in ``Ext^{s, t-w-1}(P_{-K}^{-w-1})``."""
        g = self.group(s, t, w)
        tc = t - w - 1
        n_main = self._main_dim(w, s, tc)
        x = y = 0
        for i, c in enumerate(g.basis):
            if (coords >> i) & 1:
                if c.summand == "S":
                    y ^= c.vector
                else:
                    x ^= c.vector
        tr = self._limits.transport_at(w, K, s, tc)
        return _mul(tr, x | (y << n_main)), truncation(w, K)

    def limit_name(self, s: int, t: int, w: int, coords: int, K: int = DICTIONARY_DEPTH,
                   dictionary: Optional[Dictionary] = None) -> Optional[str]:
        """Name through the limit: detect in the truncation, then read the dictionary source.

        The class is pushed into ``Ext(P_{-K}^{-w-1})`` and detected there; the
        dictionary of variant A (``w > 0``) or B (``w <= 0``) names the source of
        the differential hitting that detection name.  Classes on cell ``-1``
        have no partner and keep their own name.
        """
        v, trunc = self.limit_class(s, t, w, coords, K)
        if v == 0:
            return None
        det = Detector(trunc, self.s_max, self.coweight_max, self.store, self.catalog)
        target = det.detect(s, t - w - 1, v)
        if target.cell == -1:
            return target.label
        dic = dictionary or self.dictionary("A" if w > 0 else "B")
        return dic.source_of(target.label)

    # -- dictionaries and Mahowald invariants ---------------------------------------------------

    def dictionary(self, variant: str, K: int = DICTIONARY_DEPTH, s_max: int = 6,
                   stem_min: int = -3, stem_max: Optional[int] = None) -> Dictionary:
        """AHSS differential pairs of a dictionary model, kept when depths ``K`` and ``K+8`` agree."""
        key = ("dict", variant, K, s_max, stem_min, stem_max)
        got = self._groups.get(key)
        if got is not None:
            return got
        stem_max = self.coweight_max - 1 if stem_max is None else stem_max
        found = []
        for depth in (K, K + DEPTH_STEP):
            m = dictionary_model(variant, depth, self.top)
            a = Ahss(m, s_max, stem_max + 1, self.store, self.catalog)
            pairs = {}
            for d in a.differentials(stem_min, stem_max, range(s_max + 1)):
                pairs[(d.source_name, d.target_name, d.r)] = d
            found.append(pairs)
        stable, unstable = [], []
        for k, d in found[0].items():
            n, s, t = d.source
            pair = DictionaryPair(k[0], k[1], k[2], s, t)
            (stable if k in found[1] else unstable).append(pair)
        stable.sort(key=lambda p: (p.stem, p.s, p.source, p.target))
        unstable.sort(key=lambda p: (p.stem, p.s, p.source, p.target))
        out = Dictionary(variant, (K, K + DEPTH_STEP), stable, unstable)
        self._groups[key] = out
        return out

    def mahowald(self, name: str, K: int = 8) -> MahowaldResult:
        """Push a sphere class through ``DB ->> S^-1`` and detect its image."""
        if name == "1":
            s, stem, vec = 0, 0, 1
        else:
            s, stem, vec = self.catalog.vector(name)
        t = s + stem - 1
        names = []
        for depth in (K, K + DEPTH_STEP):
            m = dictionary_model("B", depth, max(self.top, stem + 1))
            ctx = CellContext(m, s, stem, self.store)
            mat = ctx.matrix(ctx.induced(m, sphere(-1)), s, t)
            img = mat.apply(BitVector(mat.cols, vec)).payload
            det = Detector(m, s, stem, self.store, self.catalog)
            names.append(det.detect(s, t, img) if img else None)
        a, b = names
        stable = (a is None and b is None) or (a is not None and b is not None and a.label == b.label)
        return MahowaldResult(name, a, (K, K + DEPTH_STEP), stable)


def _col(m: BitMatrix, j: int) -> int:
    out = 0
    for i, r in enumerate(m.data):
        if (r >> j) & 1:
            out |= 1 << i
    return out


def _mul(m: BitMatrix, v: int) -> int:
    return m.apply(BitVector(m.cols, v)).payload if m.cols else 0
