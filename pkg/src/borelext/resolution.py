"""Minimal free resolutions over the Steenrod algebra and the maps they carry.

A resolution is computed over the region ``s <= s_max``, ``t - s <= n_max``
(absolute internal degree ``t``).  Elements of the free module ``F_s`` in degree
``t`` are packed integers over the basis ``(generator g, Milnor element of
degree t - t_g)``, generators in discovery order.  For ``s = 0`` the target of the
differential is the module itself, whose degree-``t`` basis is the single cell.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from . import cache
from .f2core import BitMatrix, Echelon, left_kernel
from .modules import GradedModule, ModuleMap, ShortExactSeq
from .steenrod import AlgebraTable

log = logging.getLogger(__name__)

_TABLES: dict[int, AlgebraTable] = {}


def algebra_table(max_degree: int) -> AlgebraTable:
    """Shared product table; grows by replacement when a larger cap is requested."""
    best = max(_TABLES) if _TABLES else -1
    if best >= max_degree:
        return _TABLES[best]
    table = AlgebraTable(max(max_degree, 2 * best, 32))
    if best >= 0:
        table._products.update(_TABLES[best]._products)
    _TABLES.clear()
    _TABLES[table.max_degree] = table
    return table


class ResolutionError(RuntimeError):
    pass


class Resolution:
    def __init__(self, module: GradedModule, s_max: int, n_max: int):
        self.module = module
        self.s_max = -1
        self.n_max = None
        self.gens: list[list[int]] = []          # gens[s] = degrees, discovery order
        self.diffs: list[list] = []              # diffs[s][g]: dict g' -> mask (s>0), int (s=0)
        self._solvers: dict[tuple[int, int], Echelon] = {}
        self._layouts: dict[tuple[int, int], tuple] = {}
        self._pending: dict[tuple[int, int], list[int]] = {}
        self.alg = algebra_table(8)
        self.extend(s_max, n_max)

    @classmethod
    def from_data(cls, module: GradedModule, s_max: int, n_max: int,
                  gens: list, diffs: list) -> "Resolution":
        """Rebuild a resolution from stored generators and differentials."""
        self = cls.__new__(cls)
        self.module = module
        self.s_max = s_max
        self.n_max = n_max
        self.gens = gens
        self.diffs = diffs
        self._solvers = {}
        self._layouts = {}
        self._pending = {}
        self.alg = algebra_table(n_max + s_max - module.bottom + 1)
        return self

    # -- bookkeeping -------------------------------------------------------------------

    @property
    def bottom(self) -> int:
        return self.module.bottom

    def t_max(self) -> int:
        return self.n_max + self.s_max

    def computed(self, s: int, t: int) -> bool:
        return 0 <= s <= self.s_max and t - s <= self.n_max

    def require(self, s: int, t: int) -> None:
        if s < 0:
            raise ValueError("negative filtration")
        if t < self.bottom:
            raise ValueError(f"degree {t} lies below the module bottom {self.bottom}")
        if not self.computed(s, t):
            raise ResolutionError(
                f"(s, t) = ({s}, {t}) outside the computed region s <= {self.s_max}, "
                f"t - s <= {self.n_max}; enlarge s_max/n_max")

    def gens_at(self, s: int, t: int) -> list[int]:
        """Indices of generators of ``F_s`` in degree exactly ``t``."""
        self.require(s, t)
        if s >= len(self.gens):
            return []
        return [g for g, tg in enumerate(self.gens[s]) if tg == t]

    def dim(self, s: int, t: int) -> int:
        return len(self.gens_at(s, t))

    def chart(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for s, degs in enumerate(self.gens):
            for t in degs:
                out[(s, t)] = out.get((s, t), 0) + 1
        return out

    def layout(self, s: int, t: int) -> tuple:
        """``(offsets, total)`` for ``F_s`` in degree ``t``; offsets[g] or -1."""
        key = (s, t)
        got = self._layouts.get(key)
        if got is not None and got[2] == len(self.gens[s]):
            return got
        offsets = []
        off = 0
        alg = self.alg
        for tg in self.gens[s] if s < len(self.gens) else ():
            if tg <= t:
                offsets.append(off)
                off += alg.dim(t - tg)
            else:
                offsets.append(-1)
        got = (offsets, off, len(self.gens[s]) if s < len(self.gens) else 0)
        self._layouts[key] = got
        return got

    def gen_name(self, s: int, g: int) -> str:
        return f"g{s}_{self.gens[s][g]}_{self.gens_at(s, self.gens[s][g]).index(g)}"

    # -- algebra action on free-module elements ----------------------------------------

    def act(self, e: int, i: int, s: int, t: int, x: int) -> int:
        """Milnor element ``i`` of degree ``e`` times ``x`` in ``F_s`` degree ``t``."""
        if e == 0:
            return self._reembed(s, t, t, x)
        offs, _, _ = self.layout(s, t)
        new_offs, _, _ = self.layout(s, t + e)
        alg = self.alg
        out = 0
        for g, tg in enumerate(self.gens[s]):
            o = offs[g]
            if o < 0:
                continue
            d = t - tg
            mask = (x >> o) & ((1 << alg.dim(d)) - 1)
            if mask:
                out ^= alg.act(e, i, d, mask) << new_offs[g]
        return out

    def _reembed(self, s: int, t_from: int, t_to: int, x: int) -> int:
        if t_from != t_to:
            raise AssertionError
        return x

    def module_act(self, e: int, i: int, t: int, x: int) -> int:
        if e == 0:
            return x
        if x and self.module.act_milnor(e, i, t):
            return 1
        return 0

    def d_row(self, s: int, g: int, e: int, i: int) -> int:
        """``d(a g)`` for ``a`` = Milnor element ``i`` of degree ``e``, packed in ``F_{s-1}``."""
        tg = self.gens[s][g]
        dg = self.diffs[s][g]
        t = tg + e
        if s == 0:
            return self.module_act(e, i, tg, dg)
        offs, _, _ = self.layout(s - 1, t)
        alg = self.alg
        out = 0
        gens_prev = self.gens[s - 1]
        for gp, mask in dg.items():
            out ^= alg.act(e, i, tg - gens_prev[gp], mask) << offs[gp]
        return out

    def d_of(self, s: int, t: int, x: int) -> int:
        """Differential of an element of ``F_s`` in degree ``t``."""
        offs, _, _ = self.layout(s, t)
        alg = self.alg
        out = 0
        for g, tg in enumerate(self.gens[s]):
            o = offs[g]
            if o < 0:
                continue
            d = t - tg
            mask = (x >> o) & ((1 << alg.dim(d)) - 1)
            i = 0
            while mask:
                if mask & 1:
                    out ^= self.d_row(s, g, d, i)
                mask >>= 1
                i += 1
        return out

    def unit_vector(self, s: int, g: int, t: Optional[int] = None) -> int:
        """The generator ``g`` itself as an element of ``F_s`` in degree ``t_g``."""
        tg = self.gens[s][g]
        offs, _, _ = self.layout(s, tg if t is None else t)
        if t is not None and t != tg:
            raise ValueError("unit vectors live in the generator's own degree")
        return 1 << offs[g]

    def split(self, s: int, t: int, x: int) -> dict[int, int]:
        """Decompose ``x`` into per-generator Milnor masks."""
        offs, _, _ = self.layout(s, t)
        alg = self.alg
        out = {}
        for g, tg in enumerate(self.gens[s]):
            o = offs[g]
            if o < 0:
                continue
            mask = (x >> o) & ((1 << alg.dim(t - tg)) - 1)
            if mask:
                out[g] = mask
        return out

    # -- construction ------------------------------------------------------------------

    def extend(self, s_max: int, n_max: int) -> "Resolution":
        old_s = self.s_max
        old_n = self.n_max
        s_max = max(s_max, self.s_max)
        n_max = n_max if old_n is None else max(n_max, old_n)
        if s_max == old_s and n_max == old_n:
            return self
        if self.module.top < n_max + s_max:
            log.debug("module %s truncated at %d below t_max %d", self.module.key,
                      self.module.top, n_max + s_max)
        self.alg = algebra_table(n_max + s_max - self.bottom + 1)
        while len(self.gens) <= s_max:
            self.gens.append([])
            self.diffs.append([])
        self.s_max = s_max
        self.n_max = n_max
        for t in range(self.bottom, n_max + s_max + 1):
            for s in range(0, s_max + 1):
                if t - s > n_max or t - s < self.bottom:
                    continue
                if old_n is not None and s <= old_s and t - s <= old_n:
                    continue
                self._step(s, t)
        self._pending.clear()
        return self

    def _rows(self, s: int, t: int) -> list[int]:
        """Rows of the differential on ``F_s`` in degree ``t`` (existing generators)."""
        rows = []
        alg = self.alg
        for g, tg in enumerate(self.gens[s]):
            if tg > t:
                continue
            e = t - tg
            for i in range(alg.dim(e)):
                rows.append(self.d_row(s, g, e, i))
        return rows

    def _step(self, s: int, t: int) -> None:
        # kernel of d_{s-1} in degree t
        if s == 0:
            kernel = [1] if self.module.dim(t) else []
        else:
            prev = self._pending.pop((s - 1, t), None)
            if prev is None:
                prev = self._rows(s - 1, t)
            kernel = left_kernel(prev)
        rows = self._rows(s, t)
        ech = Echelon()
        for i, r in enumerate(rows):
            ech.add(r, 1 << i)
        n_old = len(rows)
        new = 0
        offs_prev = self.layout(s - 1, t)[0] if s > 0 else None
        for k in kernel:
            rem, _ = ech.reduce(k)
            if not rem:
                continue
            # fresh generator: its unit vector is the next basis element of F_s(t)
            g = len(self.gens[s])
            self.gens[s].append(t)
            ech.pivots[rem.bit_length() - 1] = (rem, 1 << (n_old + new))
            if s == 0:
                self.diffs[s].append(rem)
            else:
                self.diffs[s].append(self._to_dict(s - 1, t, rem, offs_prev))
            rows.append(rem)
            new += 1
        self._solvers[(s, t)] = ech
        if s + 1 <= self.s_max:
            self._pending[(s, t)] = rows

    def _to_dict(self, s: int, t: int, x: int, offs) -> dict[int, int]:
        alg = self.alg
        out = {}
        for g, tg in enumerate(self.gens[s]):
            o = offs[g] if g < len(offs) else -1
            if o < 0:
                continue
            mask = (x >> o) & ((1 << alg.dim(t - tg)) - 1)
            if mask:
                if t - tg == 0:
                    raise ResolutionError("non-minimal differential entry")
                out[g] = mask
        return out

    def solver(self, s: int, t: int) -> Echelon:
        self.require(s, t)
        ech = self._solvers.get((s, t))
        if ech is None:
            # rebuilt after loading from disk; rows are tagged by their basis position
            ech = Echelon()
            for i, r in enumerate(self._rows(s, t)):
                ech.add(r, 1 << i)
            self._solvers[(s, t)] = ech
        return ech

    def lift(self, s: int, t: int, y: int) -> int:
        """``x`` in ``F_s`` degree ``t`` with ``d x = y`` (``y`` in ``F_{s-1}`` or the module)."""
        pre = self.solver(s, t).preimage(y)
        if pre is None:
            raise ResolutionError(f"element not in the image of d_{s} in degree {t}")
        return pre


# --- chain maps ------------------------------------------------------------------------

class ChainMap:
    """A chain map ``F_{s + shift}(X) -> F_s(Y)`` lifted from a map on the bottom level.

    ``base(g, t)`` returns, for a generator of ``F_shift(X)`` in degree ``t``, the
    element of ``Y``'s module (degree ``t``) that ``epsilon_Y`` of its image must hit.
    """

    def __init__(self, source: Resolution, target: Resolution, shift: int,
                 base: Callable[[int, int], int]):
        self.source = source
        self.target = target
        self.shift = shift
        self.base = base
        self._images: dict[tuple[int, int], int] = {}

    def image(self, s: int, g: int) -> int:
        """Image of generator ``g`` of ``F_{s + shift}(X)`` in ``F_s(Y)``."""
        key = (s, g)
        got = self._images.get(key)
        if got is not None:
            return got
        src, tgt = self.source, self.target
        t = src.gens[s + self.shift][g]
        if t - s > tgt.n_max or s > tgt.s_max:
            raise ResolutionError(
                f"target resolution of {tgt.module.key} too small for ({s}, {t})")
        if s == 0:
            y = self.base(g, t)
        else:
            y = self._image_of_element(s - 1, t, src.diffs[s + self.shift][g])
        x = tgt.lift(s, t, y) if y else 0
        self._images[key] = x
        return x

    def _image_of_element(self, s: int, t: int, dx) -> int:
        """Image in ``F_s(Y)`` degree ``t`` of ``sum mask_g' * g'`` from ``F_{s+shift}(X)``."""
        src, tgt = self.source, self.target
        alg = tgt.alg
        out = 0
        gens_src = src.gens[s + self.shift]
        for gp, mask in dx.items():
            tgp = gens_src[gp]
            e = t - tgp
            img = self.image(s, gp)
            if not img:
                continue
            i = 0
            while mask:
                if mask & 1:
                    out ^= tgt.act(e, i, s, tgp, img)
                mask >>= 1
                i += 1
        return out

    def ext_matrix(self, s: int, t: int) -> BitMatrix:
        """``Ext^{s,t}(Y) -> Ext^{s+shift,t}(X)`` in generator-dual bases."""
        tgt = self.target
        ys = tgt.gens_at(s, t)
        xs = self.source.gens_at(s + self.shift, t)
        offs, _, _ = tgt.layout(s, t)
        rows = []
        for g in xs:
            img = self.image(s, g)
            r = 0
            for j, gy in enumerate(ys):
                if (img >> offs[gy]) & 1:
                    r |= 1 << j
            rows.append(r)
        return BitMatrix(len(xs), len(ys), tuple(rows))


def induced_chain_map(f: ModuleMap, r_src: Resolution, r_tgt: Resolution) -> ChainMap:
    """Chain map over ``f: M -> N`` from the resolution of ``M`` to that of ``N``.

    On Ext it gives ``Ext(N) -> Ext(M)``.
    """
    if r_src.module.cells != f.source.cells or r_tgt.module.cells != f.target.cells:
        raise ValueError("resolutions do not match the map's source and target")

    def base(g: int, t: int) -> int:
        eps = r_src.diffs[0][g]
        return eps if f.image(t) else 0

    return ChainMap(r_src, r_tgt, 0, base)


def connecting_chain_map(ses: ShortExactSeq, r_quot: Resolution, r_sub: Resolution) -> ChainMap:
    """Chain map ``F_{s+1}(C) -> F_s(A)`` realising ``delta: Ext^s(A) -> Ext^{s+1}(C)``.

    Here ``A`` is the sub and ``C`` the quotient of ``0 -> A -> B -> C -> 0``.
    """
    B = ses.middle
    if r_quot.module.cells != ses.quotient.cells or r_sub.module.cells != ses.sub.cells:
        raise ValueError("resolutions do not match the sequence")
    sub_cells = frozenset(ses.sub.cells)

    def chi0(g0: int) -> int:
        # lift of epsilon_C(g0) to B: the same cell
        return 1 if r_quot.diffs[0][g0] else 0

    def base(g: int, t: int) -> int:
        # chi0(d g) in B, which lies in the sub A
        acc = 0
        for g0, mask in r_quot.diffs[1][g].items():
            t0 = r_quot.gens[0][g0]
            if not chi0(g0):
                continue
            e = t - t0
            i = 0
            while mask:
                if mask & 1:
                    acc ^= B.act_milnor(e, i, t0)
                mask >>= 1
                i += 1
        if acc and t not in sub_cells:
            raise ResolutionError("zig-zag left the submodule: sequence not exact")
        return acc

    return ChainMap(r_quot, r_sub, 1, base)


@dataclass
class ExtMap:
    """Per-bidegree matrices ``Ext^{s,t}(target side) -> Ext^{s+shift,t}(source side)``."""

    chain: ChainMap

    @property
    def shift(self) -> int:
        return self.chain.shift

    def matrix(self, s: int, t: int) -> BitMatrix:
        return self.chain.ext_matrix(s, t)

    def apply(self, s: int, t: int, v: int) -> int:
        m = self.matrix(s, t)
        out = 0
        for i, r in enumerate(m.data):
            if bin(r & v).count("1") & 1:
                out |= 1 << i
        return out


# --- cache of resolutions --------------------------------------------------------------

class ResolutionStore:
    """Resolutions keyed by module, grown on demand, optionally backed by a directory."""

    def __init__(self, cache_dir: Optional[Path] = None):
        self._res: dict[tuple, Resolution] = {}
        self.cache_dir = Path(cache_dir) if cache_dir else None

    def get(self, module: GradedModule, s_max: int, n_max: int) -> Resolution:
        key = (module.cells, module.action)
        r = self._res.get(key)
        if r is None and self.cache_dir is not None:
            data = cache.load(self.cache_dir, module)
            if data is not None:
                r = Resolution.from_data(module, *data)
                self._res[key] = r
        if r is None:
            r = Resolution(module, s_max, n_max)
            self._res[key] = r
            self._save(r)
        elif s_max > r.s_max or n_max > r.n_max:
            r.extend(s_max, n_max)
            self._save(r)
        return r

    def _save(self, r: Resolution) -> None:
        if self.cache_dir is not None:
            try:
                cache.save(self.cache_dir, r)
            except OSError as exc:
                log.warning("could not write resolution cache: %s", exc)

    def __len__(self) -> int:
        return len(self._res)


def minimal_resolution(m: GradedModule, s_max: int, t_max: int, n_max: Optional[int] = None) -> Resolution:
    """Resolve ``m`` through ``s <= s_max`` and ``t <= t_max`` (optionally ``t - s <= n_max``)."""
    if n_max is None:
        n_max = t_max
    return Resolution(m, s_max, min(n_max, t_max))


_DEFAULT_STORE: Optional[ResolutionStore] = None


def default_store() -> ResolutionStore:
    """Process-wide store; backed by the directory named in ``BORELEXT_CACHE_DIR`` if set."""
    global _DEFAULT_STORE
    if _DEFAULT_STORE is None:
        _DEFAULT_STORE = ResolutionStore(cache.directory_from_env())
    return _DEFAULT_STORE
