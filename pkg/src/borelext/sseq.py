"""Algebraic Atiyah-Hirzebruch spectral sequence of a cell-filtered module.

Pages are computed from Ext of cell-interval subquotients:

* ``Z_r(n)`` is the image of ``Ext(W(n-r+1, n)) -> Ext(S^n)`` (restriction to the top cell),
* ``B_r(n)`` is the kernel of ``Ext(S^n) -> Ext(W(n, n+r-1))`` (pull back along the bottom-cell quotient),
* ``E_r(n) = Z_r(n) / B_r(n)``,

and ``d_r`` lifts a class of ``Z_r(n)`` to ``Ext(W(n-r+1, n))`` and applies the
connecting map of ``W(n-r+1, n) -> W(n-r, n) -> S^(n-r)``.  Classes are vectors
in the generator basis of the sphere resolution, so catalog names apply directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .catalog import Catalog, sphere_catalog, with_cell
from .f2core import BitMatrix, BitVector, Echelon, image_basis, kernel_basis, solve
from .modules import GradedModule, ModuleMap, ShortExactSeq, cell_map, sphere
from .resolution import (ChainMap, ResolutionError, ResolutionStore, connecting_chain_map,
                         default_store, induced_chain_map)


class CellContext:
    """Resolutions and cellular Ext maps for subquotients of one ambient module."""

    def __init__(self, ambient: GradedModule, s_max: int, n_max: int,
                 store: Optional[ResolutionStore] = None):
        self.ambient = ambient
        self.s_max = s_max
        self.n_max = n_max
        self.store = store or default_store()
        self._maps: dict = {}

    def piece(self, lo: int, hi: int) -> Optional[GradedModule]:
        cells = [n for n in self.ambient.cells if lo <= n <= hi]
        if not cells:
            return None
        if len(cells) == 1:
            return sphere(cells[0])
        return self.ambient.restrict(cells, f"{self.ambient.key}|{cells[0]}:{cells[-1]}")

    def res(self, m: GradedModule):
        return self.store.get(m, self.s_max, self.n_max)

    def dim(self, m: GradedModule, s: int, t: int) -> int:
        if t < m.bottom:
            return 0
        return self.res(m).dim(s, t)

    def induced(self, src: GradedModule, tgt: GradedModule) -> ChainMap:
        """Chain map over the cell-identity map ``src -> tgt`` (Ext goes ``tgt -> src``)."""
        key = ("i", src.cells, tgt.cells)
        got = self._maps.get(key)
        if got is None:
            got = induced_chain_map(cell_map(src, tgt), self.res(src), self.res(tgt))
            self._maps[key] = got
        return got

    def connecting(self, sub: GradedModule, quo: GradedModule) -> ChainMap:
        """``delta: Ext^s(sub) -> Ext^{s+1}(quo)`` for ``sub -> piece(sub u quo) -> quo``."""
        key = ("d", sub.cells, quo.cells)
        got = self._maps.get(key)
        if got is None:
            mid = self.ambient.restrict(sorted(set(sub.cells) | set(quo.cells)))
            ses = ShortExactSeq(ModuleMap(sub, mid, frozenset(sub.cells)),
                                ModuleMap(mid, quo, frozenset(quo.cells)))
            ses.check()
            got = connecting_chain_map(ses, self.res(quo), self.res(sub))
            self._maps[key] = got
        return got

    def matrix(self, chain: ChainMap, s: int, t: int) -> BitMatrix:
        src, tgt = chain.source.module, chain.target.module
        rows = self.dim(src, s + chain.shift, t)
        cols = self.dim(tgt, s, t)
        if rows == 0 or cols == 0:
            return BitMatrix.zeros(rows, cols)
        return chain.ext_matrix(s, t)


def _apply(m: BitMatrix, v: int) -> int:
    return m.apply(BitVector(m.cols, v)).payload


def _span_echelon(vectors: Iterable[int]) -> Echelon:
    e = Echelon()
    for v in vectors:
        e.add(v, 0)
    return e


@dataclass
class Entry:
    """``E_r`` at one ``(n, s, t)``: cycles, boundaries and chosen representatives."""

    r: int
    n: int
    s: int
    t: int
    cycles: list[int]
    boundaries: list[int]
    reps: list[int] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.reps)


@dataclass(frozen=True)
class Differential:
    r: int
    source: tuple[int, int, int]       # (n, s, t)
    target: tuple[int, int, int]
    source_vector: int
    target_vector: int
    source_name: str
    target_name: str


@dataclass(frozen=True)
class NamedClass:
    name: str
    cell: int
    s: int
    t: int
    summand: str = ""

    @property
    def label(self) -> str:
        return with_cell(self.name, self.cell)

    def __str__(self) -> str:
        return self.label


class Ahss:
    """The spectral sequence of the cell filtration of ``module``.

    ``s_max`` bounds the filtration of source classes and ``n_max`` the classical
    stem ``t - s``; both bound every resolution computed along the way.
    """

    def __init__(self, module: GradedModule, s_max: int, n_max: int,
                 store: Optional[ResolutionStore] = None, catalog: Optional[Catalog] = None):
        self.module = module
        self.cells = list(module.cells)
        self.cellset = set(self.cells)
        self.s_max = s_max
        self.n_max = n_max
        self.ctx = CellContext(module, s_max + 1, n_max, store)
        self.catalog = catalog or sphere_catalog()
        self._z: dict = {}
        self._b: dict = {}
        self._entries: dict = {}
        self._d: dict = {}

    @property
    def span(self) -> int:
        return self.cells[-1] - self.cells[0]

    # -- E_1 ---------------------------------------------------------------------------

    def e1_dim(self, n: int, s: int, t: int) -> int:
        return self.ctx.dim(sphere(n), s, t) if n in self.cellset else 0

    def sphere_name(self, n: int, s: int, t: int, v: int) -> str:
        return self.catalog.name(s, t - s - n, v)

    # -- image formula -------------------------------------------------------------------

    def cycles(self, r: int, n: int, s: int, t: int) -> list[int]:
        lo = max(n - r + 1, self.cells[0])
        key = (lo, n, s, t)
        got = self._z.get(key)
        if got is None:
            dim = self.e1_dim(n, s, t)
            w = self.ctx.piece(lo, n)
            if dim == 0:
                got = []
            elif len(w.cells) == 1:
                got = [1 << i for i in range(dim)]
            else:
                m = self.ctx.matrix(self.ctx.induced(sphere(n), w), s, t)
                got = [v.payload for v in image_basis(m)]
            self._z[key] = got
        return got

    def boundaries(self, r: int, n: int, s: int, t: int) -> list[int]:
        hi = min(n + r - 1, self.cells[-1])
        key = (n, hi, s, t)
        got = self._b.get(key)
        if got is None:
            dim = self.e1_dim(n, s, t)
            w = self.ctx.piece(n, hi)
            if dim == 0 or len(w.cells) == 1:
                got = []
            else:
                m = self.ctx.matrix(self.ctx.induced(w, sphere(n)), s, t)
                got = [v.payload for v in kernel_basis(m)]
            self._b[key] = got
        return got

    def entry(self, r: int, n: int, s: int, t: int) -> Entry:
        key = (r, n, s, t)
        got = self._entries.get(key)
        if got is not None:
            return got
        z = self.cycles(r, n, s, t)
        b = self.boundaries(r, n, s, t)
        ech = _span_echelon(b)
        if len(ech) != len(b):
            raise AssertionError("boundary basis is dependent")
        for v in b:
            if not _in_span(z, v):
                raise AssertionError(f"boundary outside cycles at r={r} n={n} ({s},{t})")
        reps = []
        # prefer catalog basis vectors as representatives, so names stay readable
        candidates = [v for _, v in self.catalog.named_basis(s, t - s - n)] if z else []
        for v in candidates + z:
            if not _in_span(z, v):
                continue
            rem = ech.add(v, 0)
            if rem:
                reps.append(v)
            if len(reps) == len(z) - len(b):
                break
        got = Entry(r, n, s, t, z, b, reps)
        self._entries[key] = got
        return got

    def dim(self, r: int, n: int, s: int, t: int) -> int:
        return self.entry(r, n, s, t).dim

    # -- differentials -------------------------------------------------------------------

    def d_vector(self, r: int, n: int, s: int, t: int, z: int) -> int:
        """``d_r`` of a cycle ``z`` on cell ``n``, as a vector on cell ``n - r`` at ``(s+1, t)``."""
        m = n - r
        if m not in self.cellset or z == 0:
            return 0
        sub = self.ctx.piece(m + 1, n)
        restrict = self.ctx.matrix(self.ctx.induced(sphere(n), sub), s, t) if len(sub.cells) > 1 else None
        if restrict is None:
            y = z
        else:
            lifted = solve(restrict, BitVector(restrict.rows, z))
            if lifted is None:
                raise AssertionError(f"class on cell {n} does not survive to E_{r}")
            y = lifted.payload
        delta = self.ctx.matrix(self.ctx.connecting(sub, sphere(m)), s, t)
        if delta.rows == 0:
            return 0
        return _apply(delta, y)

    def coordinates(self, e: Entry, v: int) -> int:
        """Coordinates of ``v`` (a cycle) in ``e.reps`` modulo boundaries."""
        ech = Echelon()
        for b in e.boundaries:
            ech.add(b, 0)
        for i, rep in enumerate(e.reps):
            ech.add(rep, 1 << i)
        rem, tag = ech.reduce(v)
        if rem:
            raise AssertionError(f"d_{e.r} lands outside the cycles at n={e.n} ({e.s},{e.t})")
        return tag

    def d_matrix(self, r: int, n: int, s: int, t: int) -> BitMatrix:
        """``d_r: E_r(n, s, t) -> E_r(n - r, s + 1, t)`` in representative coordinates."""
        key = (r, n, s, t)
        got = self._d.get(key)
        if got is not None:
            return got
        src = self.entry(r, n, s, t)
        m = n - r
        if m not in self.cellset:
            tgt_dim = 0
            cols = [0] * src.dim
        else:
            tgt = self.entry(r, m, s + 1, t)
            tgt_dim = tgt.dim
            cols = [self.coordinates(tgt, self.d_vector(r, n, s, t, z)) if tgt_dim else 0
                    for z in src.reps]
        got = BitMatrix.from_columns(tgt_dim, cols)
        self._d[key] = got
        return got

    # -- whole pages ----------------------------------------------------------------------

    def positions(self, s_range: Iterable[int], stem_lo: int, stem_hi: int):
        for s in s_range:
            for stem in range(stem_lo, stem_hi + 1):
                t = stem + s
                for n in self.cells:
                    if t - s - n >= 0 and self.e1_dim(n, s, t):
                        yield n, s, t

    def e_infinity(self, n: int, s: int, t: int) -> Entry:
        return self.entry(self.span + 1, n, s, t)

    def differentials(self, stem_lo: int, stem_hi: int, s_range: Optional[Iterable[int]] = None,
                      r_max: Optional[int] = None) -> list[Differential]:
        """Every nonzero ``d_r`` out of the window, one per source representative."""
        s_range = list(range(self.s_max + 1) if s_range is None else s_range)
        r_top = self.span if r_max is None else r_max
        out = []
        for n, s, t in self.positions(s_range, stem_lo, stem_hi):
            for r in range(1, min(r_top, n - self.cells[0]) + 1):
                if n - r not in self.cellset:
                    continue
                src = self.entry(r, n, s, t)
                if not src.dim:
                    break
                tgt = self.entry(r, n - r, s + 1, t)
                for rep in _adapted_sources(self, r, n, s, t):
                    img = self.d_vector(r, n, s, t, rep)
                    target_rep = _nice_representative(self, tgt, img)
                    out.append(Differential(
                        r, (n, s, t), (n - r, s + 1, t), rep, target_rep,
                        with_cell(self.sphere_name(n, s, t, rep), n),
                        with_cell(self.sphere_name(n - r, s + 1, t, target_rep), n - r)))
        return out


def _in_span(basis: list[int], v: int) -> bool:
    ech = _span_echelon(basis)
    return ech.reduce(v)[0] == 0


def _adapted_sources(ahss: Ahss, r: int, n: int, s: int, t: int) -> list[int]:
    """Representatives spanning a complement of ``ker d_r`` (named basis first)."""
    e = ahss.entry(r, n, s, t)
    dm = ahss.d_matrix(r, n, s, t)
    if dm.rows == 0:
        return []
    cols = dm.columns()
    out = []
    ech = Echelon()
    for i, c in enumerate(cols):
        if c and ech.add(c, 0):
            out.append(e.reps[i])
    if len(out) < dm.rank():
        raise AssertionError("rank bookkeeping")
    return out


def _nice_representative(ahss: Ahss, e: Entry, v: int) -> int:
    """A representative of ``v`` modulo boundaries, preferring a single catalog class."""
    bound = _span_echelon(e.boundaries)
    basis = ahss.catalog.named_basis(e.s, e.t - e.s - e.n)
    for _, b in basis:
        if bound.reduce(v ^ b)[0] == 0:
            return b
    rem = v
    # canonical: fully reduce against the boundary echelon
    for bit in sorted(bound.pivots, reverse=True):
        row = bound.pivots[bit][0]
        if (rem >> bit) & 1:
            rem ^= row
    return rem if rem else v


# --- detection names ------------------------------------------------------------------------

class Detector:
    """Minimal-cell detection names for Ext classes of a cell-filtered module.

    A class ``x`` has cell ``n`` when ``n`` is the least cell with ``x`` vanishing
    on the submodule of cells ``> n``; its name is a sphere class on cell ``n``
    whose image under the bottom-cell quotient is ``x`` restricted to cells ``>= n``.
    """

    def __init__(self, module: GradedModule, s_max: int, n_max: int,
                 store: Optional[ResolutionStore] = None, catalog: Optional[Catalog] = None):
        self.module = module
        self.ctx = CellContext(module, s_max, n_max, store)
        self.catalog = catalog or sphere_catalog()

    def top_sub(self, n: int) -> Optional[GradedModule]:
        cells = [c for c in self.module.cells if c >= n]
        if not cells:
            return None
        if cells == list(self.module.cells):
            return self.module
        return self.ctx.piece(cells[0], cells[-1])

    def detect(self, s: int, t: int, x: int) -> Optional[NamedClass]:
        """Name of the class with generator coordinates ``x`` in ``Ext^{s,t}(module)``."""
        if x == 0:
            return None
        cells = list(self.module.cells)
        cur = self.module
        for i, n in enumerate(cells):
            nxt = self.top_sub(cells[i + 1]) if i + 1 < len(cells) else None
            if nxt is None:
                y = 0
            else:
                y = _apply(self.ctx.matrix(self.ctx.induced(nxt, cur), s, t), x)
            if y == 0:
                if len(cur.cells) == 1:
                    z = x
                else:
                    p = self.ctx.matrix(self.ctx.induced(cur, sphere(n)), s, t)
                    sol = solve(p, BitVector(p.rows, x))
                    if sol is None:
                        raise AssertionError("detection: class not in the bottom-cell image")
                    ker = [v.payload for v in kernel_basis(p)]
                    z = _best_preimage(self.catalog, s, t - s - n, sol.payload, ker)
                return NamedClass(self.catalog.name(s, t - s - n, z), n, s, t)
            cur, x = nxt, y
        raise AssertionError("unreachable")


    def named_basis(self, s: int, t: int) -> list[tuple[NamedClass, int]]:
        """A basis of ``Ext^{s,t}`` adapted to the cell filtration, with names.

        Classes are added from the lowest detecting cell upwards; each is a lift
        of a catalog class on its cell, so names are single terms where possible.
        """
        total = self.ctx.dim(self.module, s, t)
        if total == 0:
            return []
        cells = list(self.module.cells)
        out: list[tuple[NamedClass, int]] = []
        found = Echelon()
        for i, n in enumerate(cells):
            if len(out) == total:
                break
            top = self.top_sub(n)
            sphere_dim = self.ctx.dim(sphere(n), s, t)
            if not sphere_dim:
                continue
            if top is self.module:
                restrict = None
            else:
                restrict = self.ctx.matrix(self.ctx.induced(top, self.module), s, t)
            if len(top.cells) == 1:
                p = None
            else:
                p = self.ctx.matrix(self.ctx.induced(top, sphere(n)), s, t)
            liftable = self._liftable(p, restrict, sphere_dim)
            if not liftable:
                continue
            space = _span_echelon(liftable)
            named = [v for _, v in self.catalog.named_basis(s, t - s - n)]
            for z in named + liftable:
                if not space.contains(z):
                    continue
                y = z if p is None else _apply(p, z)
                if restrict is None:
                    x = y
                else:
                    x = solve(restrict, BitVector(restrict.rows, y)).payload
                if found.add(x, 0):
                    name = self.catalog.name(s, t - s - n, z)
                    out.append((NamedClass(name, n, s, t), x))
        if len(out) != total:
            raise AssertionError(f"adapted basis incomplete at ({s},{t})")
        return out


    @staticmethod
    def _liftable(p: Optional[BitMatrix], restrict: Optional[BitMatrix], dim: int) -> list[int]:
        """Sphere classes whose bottom-cell image extends over the whole module."""
        if restrict is None:
            return [1 << j for j in range(dim)]
        pm = p if p is not None else BitMatrix.identity(dim)
        # kernel of [pm | restrict]: pairs (z, x) with pm z = restrict x
        block = BitMatrix(pm.rows, dim + restrict.cols,
                          tuple(a | (b << dim) for a, b in zip(pm.data, restrict.data)))
        mask = (1 << dim) - 1
        zs = [v.payload & mask for v in kernel_basis(block)]
        return [v.payload for v in image_basis(BitMatrix.from_columns(dim, zs))] if zs else []

def _best_preimage(catalog: Catalog, s: int, stem: int, z: int, ker: list[int]) -> int:
    if not ker:
        return z
    bound = _span_echelon(ker)
    for _, b in catalog.named_basis(s, stem):
        if bound.reduce(z ^ b)[0] == 0:
            return b
    return z


# --- audits ---------------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    ok: bool
    mismatches: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def convergence_check(ahss: Ahss, stem_lo: int, stem_hi: int,
                      s_range: Optional[Iterable[int]] = None) -> ConvergenceReport:
    """``sum_n dim E_inf(n, s, t) == dim Ext^{s,t}(module)`` across the window."""
    s_range = list(range(ahss.s_max + 1) if s_range is None else s_range)
    bad = []
    for s in s_range:
        for stem in range(stem_lo, stem_hi + 1):
            t = s + stem
            total = sum(ahss.e_infinity(n, s, t).dim for n in ahss.cells if t - s - n >= 0)
            ext = ahss.ctx.dim(ahss.module, s, t)
            if total != ext:
                bad.append({"s": s, "t": t, "e_infinity": total, "ext": ext})
    return ConvergenceReport(not bad, bad)


def structure_audit(ahss: Ahss, stem_lo: int, stem_hi: int,
                    s_range: Optional[Iterable[int]] = None) -> list[str]:
    """Check ``d o d = 0`` and ``E_{r+1} = H(E_r)`` on every page; returns failures."""
    s_range = list(range(ahss.s_max + 1) if s_range is None else s_range)
    problems = []
    for r in range(1, ahss.span + 2):
        for n, s, t in ahss.positions(s_range, stem_lo, stem_hi):
            e = ahss.entry(r, n, s, t)
            out = ahss.d_matrix(r, n, s, t)
            rank_out = out.rank()
            if s >= 1 and n + r in ahss.cellset:
                into = ahss.d_matrix(r, n + r, s - 1, t)
                rank_in = into.rank()
                if s + 1 <= ahss.s_max + 1 and out.rows and into.rows:
                    if not (out @ into).is_zero():
                        problems.append(f"d_{r} d_{r} != 0 into n={n - r} at ({s + 1},{t})")
            else:
                rank_in = 0
            nxt = ahss.entry(r + 1, n, s, t).dim
            if nxt != e.dim - rank_out - rank_in:
                problems.append(f"E_{r + 1} != H(E_{r}) at n={n} ({s},{t}): "
                                f"{nxt} vs {e.dim} - {rank_out} - {rank_in}")
    return problems
