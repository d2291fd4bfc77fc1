"""Ext of the inverse limit of stunted projective modules, via eventual images.

For a column ``w`` the limit object is ``lim_K P_{-K}^{-w-1}``.  The image of
``Ext(P_{-L}^{-w-1}) -> Ext(P_{-K}^{-w-1})`` is the kernel of the connecting map
into ``Ext(P_{-L}^{-K-1})``.  That bottom piece does not depend on ``w``, so with a
fixed observation rung ``K`` every column shares two deep resolutions, at ``L``
and ``L + 8``; agreement of the two kernels certifies the eventual image.
Transport maps compare the result with the bounded-below column models: a
connecting map for ``w > 0``, and for ``w <= 0`` a connecting map on the
``P_{-w}`` summand plus pullback along the projection onto ``S^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .f2core import BitMatrix, image_basis, kernel_basis
from .modules import (GradedModule, binomial_module, column_model, dictionary_model, sphere,
                      stunted_module)
from .resolution import ResolutionStore, default_store
from .sseq import CellContext

LADDER_STEP = 8
DEFAULT_DEPTH = 16
OBSERVATION_DEPTH = 32


def truncation(w: int, K: int) -> GradedModule:
    """``P_{-K}^{-w-1}``; ``K`` counts cells below zero, so it must exceed ``w``."""
    if K <= w:
        raise ValueError(f"depth {K} does not reach below cell {-w - 1}")
    return stunted_module(-K, -w - 1)


def default_depth(w: int, depth: int = DEFAULT_DEPTH,
                  observation: int = OBSERVATION_DEPTH) -> int:
    """Observation rung: the shared default, unless ``w`` needs ``depth`` more cells."""
    return max(observation, w + 1 + depth)


def ladder_for(K: int) -> tuple[int, ...]:
    """Observation rung ``K``, a rung twice as deep, and one more step for the certificate.

    Classes on cells near the bottom of a truncation can survive restriction from
    any moderately deeper truncation and only die a little more than twice as deep, so the
    observation rung must sit well above the deep rungs.
    """
    deep = 2 * K + 1 + LADDER_STEP
    return (K, deep, deep + LADDER_STEP)


@dataclass
class LimitChart:
    """Eventual images in ``Ext^{s,t}(P_{-K}^{-w-1})`` for the shallowest rung ``K``."""

    w: int
    ladder: tuple[int, ...]
    images: dict = field(default_factory=dict)        # (s, t) -> list of vectors
    unstable: list = field(default_factory=list)      # (s, t) whose image still shrank
    widened: bool = False

    @property
    def depth(self) -> int:
        return self.ladder[0]

    def dim(self, s: int, t: int) -> int:
        return len(self.images.get((s, t), ()))

    def dims(self) -> dict:
        return {k: len(v) for k, v in self.images.items() if v}

    @property
    def stable(self) -> bool:
        return not self.unstable


class LimitEngine:
    """Computes limit charts and transport maps for columns in a coweight window.

    ``s_max`` bounds the (Borel) filtration and ``coweight_max`` the coweight;
    the classical stem of the truncations is ``coweight - 1``.
    """

    def __init__(self, s_max: int, coweight_min: int, coweight_max: int,
                 depth: int = DEFAULT_DEPTH, store: Optional[ResolutionStore] = None):
        self.s_max = s_max
        self.coweight_min = coweight_min
        self.coweight_max = coweight_max
        self.depth = depth
        self.top = coweight_max + 1
        self.store = store or default_store()
        self._charts: dict = {}
        self._contexts: dict = {}

    # classical stem of a truncation is coweight - 1; column models carry coweight
    @property
    def n_max(self) -> int:
        return self.coweight_max

    def context(self, ambient: GradedModule) -> CellContext:
        return CellContext(ambient, self.s_max, self.n_max, self.store)

    def bidegrees(self, w: int):
        """Classical ``(s, t)`` of the truncations covering the window in column ``w``."""
        for s in range(self.s_max + 1):
            for c in range(self.coweight_min, self.coweight_max + 1):
                yield s, s + c - 1

    def ext_of_limit(self, w: int, widen: bool = True) -> LimitChart:
        got = self._charts.get(w)
        if got is not None:
            return got
        K = default_depth(w, self.depth)
        chart = self._ladder_chart(w, K)
        if chart.unstable and widen:
            deep = chart.ladder[-1]
            wider = self._ladder_chart(w, K, (K, deep, deep + LADDER_STEP))
            wider.widened = True
            chart = wider
        self._charts[w] = chart
        return chart

    def bottom_piece(self, K: int, L: int) -> GradedModule:
        """Cells ``-L .. -K-1``; the same module for every column observed at rung ``K``."""
        return stunted_module(-L, -K - 1)

    def _ladder_chart(self, w: int, K: int, ladder: Optional[tuple] = None) -> LimitChart:
        ladder = ladder or ladder_for(K)
        chart = LimitChart(w, ladder)
        self._kernel_chart(truncation(w, K), ladder, self.bidegrees(w), chart)
        return chart

    def _kernel_chart(self, obs: GradedModule, ladder: tuple, bidegrees, chart: LimitChart) -> None:
        """Fill ``chart`` with ``ker(delta)`` into each deep bottom piece below ``obs``."""
        K = ladder[0]
        ambient = binomial_module(set(range(-ladder[-1], -K)) | set(obs.cells))
        ctx = CellContext(ambient, self.s_max + 1, self.n_max, self.store)
        deltas = [ctx.connecting(obs, self.bottom_piece(K, L)) for L in ladder[1:]]
        for s, t in bidegrees:
            n = ctx.dim(obs, s, t) if t >= obs.bottom else 0
            if n == 0:
                continue
            kernels = []
            for d in deltas:
                ker = kernel_basis(ctx.matrix(d, s, t))
                kernels.append(sorted(v.payload for v in image_basis(
                    BitMatrix.from_columns(n, [v.payload for v in ker]))) if ker else [])
            if kernels[-1]:
                chart.images[(s, t)] = kernels[-1]
            if any(k != kernels[-1] for k in kernels):
                chart.unstable.append((s, t))

    def lin_chart(self, variant: str, stem_lo: int, stem_hi: int,
                  K: int = OBSERVATION_DEPTH) -> LimitChart:
        """Eventual images for the dictionary model of ``variant`` over the whole stem window.

        The top cell sits high enough that no queried degree sees the top truncation.
        """
        top = self.s_max + stem_hi + 1
        obs = dictionary_model(variant, K, top)
        chart = LimitChart(0, ladder_for(K))
        bidegrees = [(s, s + n) for s in range(self.s_max + 1) for n in range(stem_lo, stem_hi + 1)]
        self._kernel_chart(obs, chart.ladder, bidegrees, chart)
        return chart

    # -- transport ----------------------------------------------------------------------------

    def transport(self, w: int, s: int, t: int) -> BitMatrix:
        """Matrix from the column-model group into ``Ext^{s,t}(P_{-K}^{-w-1})``.

        Columns are the column-model generator basis: ``Ext^{s-1,t}(M_w)`` for
        ``w > 0``; ``Ext^{s-1,t}(P_{-w})`` followed by ``Ext^{s,t}(S^-1)`` otherwise.
        Rows are generators of the shallowest truncation in the ladder.
        """
        K = self.ext_of_limit(w).depth
        return self.transport_at(w, K, s, t)

    def transport_at(self, w: int, K: int, s: int, t: int) -> BitMatrix:
        quo = truncation(w, K)
        models = column_model(w, self.top)
        if w > 0:
            ambient = binomial_module(n for n in range(-K, self.top + 1) if n != -1)
        else:
            ambient = stunted_module(-K, self.top)
        ctx = self._contexts.get((w, K))
        if ctx is None:
            ctx = self._contexts[(w, K)] = self.context(ambient)
        sub = models[0][0]
        rows = ctx.dim(quo, s, t)
        blocks = []
        if s >= 1:
            blocks.append(ctx.matrix(ctx.connecting(sub, quo), s - 1, t))
        else:
            blocks.append(BitMatrix.zeros(rows, 0))
        if w <= 0:
            blocks.append(ctx.matrix(ctx.induced(quo, sphere(-1)), s, t))
        cols = []
        for b in blocks:
            cols.extend(b.columns() if b.cols else [])
        return BitMatrix.from_columns(rows, cols)

    def column_dims(self, w: int, s: int, t: int) -> list[int]:
        """Dimensions of the column-model summands contributing to ``(s, t)``."""
        out = []
        for m, shift in column_model(w, self.top):
            ctx = self.context(m)
            ss = s - shift
            out.append(ctx.dim(m, ss, t) if ss >= 0 else 0)
        return out

    def check_transport(self, w: int) -> list[str]:
        """The transport must be injective with image equal to the eventual image."""
        chart = self.ext_of_limit(w)
        problems = []
        for s, t in self.bidegrees(w):
            if (s, t) in chart.unstable:
                continue
            expected = sum(self.column_dims(w, s, t))
            img = chart.images.get((s, t), [])
            if expected != len(img):
                problems.append(f"w={w} ({s},{t}): limit {len(img)} vs column {expected}")
                continue
            if not expected:
                continue
            m = self.transport(w, s, t)
            span = [v.payload for v in image_basis(m)]
            if len(span) != expected:
                problems.append(f"w={w} ({s},{t}): transport not injective")
            elif sorted(span) != sorted(img):
                problems.append(f"w={w} ({s},{t}): transport image differs from the eventual image")
        return problems
