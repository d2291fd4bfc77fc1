"""Steenrod modules with one cell per degree: spheres, stunted projective spaces,
their cell-interval subquotients and the deleted-cell column models.

Modules are in cohomological form: ``Sq^c x^n = binom2(n, c) x^(n+c)``, extended
to negative ``n`` by the usual rule for binomial coefficients.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

from .steenrod import admissible_basis, adem_product, basis_bridge, milnor_basis


def binom2(n: int, k: int) -> int:
    """``C(n, k) mod 2`` for any integer ``n`` and ``k >= 0``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if n < 0:
        n = k - n - 1
    if k > n:
        return 0
    return 1 if (k & (n - k)) == 0 else 0


@dataclass(frozen=True)
class GradedModule:
    """A module with basis ``x^n`` for ``n`` in ``cells``.

    ``action`` lists the pairs ``(n, c)`` with ``Sq^c x^n = x^(n+c)`` (c >= 1);
    every other single-Sq coefficient is zero.
    """

    cells: tuple[int, ...]
    action: frozenset = field(repr=False)
    label: str = ""

    def __post_init__(self):
        if list(self.cells) != sorted(set(self.cells)):
            raise ValueError("cells must be strictly increasing")
        cs = set(self.cells)
        for n, c in self.action:
            if n not in cs or n + c not in cs or c < 1:
                raise ValueError(f"action entry Sq^{c} x^{n} leaves the cell set")

    @property
    def bottom(self) -> int:
        return self.cells[0]

    @property
    def top(self) -> int:
        return self.cells[-1]

    def __contains__(self, n: int) -> bool:
        return n in self._cellset

    @property
    def _cellset(self) -> frozenset:
        return _cellset(self.cells)

    def dim(self, t: int) -> int:
        return 1 if t in self._cellset else 0

    def name(self, n: int) -> str:
        return f"[{n}]"

    def sq(self, c: int, n: int) -> int:
        if c == 0:
            return 1 if n in self._cellset else 0
        return 1 if (n, c) in self.action else 0

    def act_word(self, word: Iterable[int], n: int) -> int:
        """Coefficient of the target cell when ``Sq^{a1}...Sq^{ak}`` acts on ``x^n``."""
        cur = n
        for a in reversed(tuple(word)):
            if not self.sq(a, cur):
                return 0
            cur += a
        return 1

    def act_milnor(self, d: int, i: int, n: int) -> int:
        """Coefficient of ``x^(n+d)`` in ``Sq(R) x^n`` for ``R = milnor_basis(d)[i]``."""
        return _act_milnor(self, d, i, n)

    @property
    def key(self) -> str:
        return self.label or f"cells{self.cells}"

    def restrict(self, cells: Iterable[int], label: str = "") -> "GradedModule":
        """The subquotient spanned by ``cells`` (caller guarantees it is one)."""
        cs = tuple(sorted(set(cells)))
        s = set(cs)
        act = frozenset((n, c) for n, c in self.action if n in s and n + c in s)
        return GradedModule(cs, act, label)


@lru_cache(maxsize=None)
def _cellset(cells: tuple[int, ...]) -> frozenset:
    return frozenset(cells)


_MILNOR_ACTION_CACHE: dict = {}


def _act_milnor(m: GradedModule, d: int, i: int, n: int) -> int:
    key = (m.cells, m.action, d, i, n)
    got = _MILNOR_ACTION_CACHE.get(key)
    if got is not None:
        return got
    if d == 0:
        out = m.dim(n)
    elif n not in m or (n + d) not in m:
        out = 0
    else:
        r = milnor_basis(d)[i]
        out = 0
        for word in basis_bridge(d).milnor_as_admissible(r):
            out ^= m.act_word(word, n)
    _MILNOR_ACTION_CACHE[key] = out
    return out


def binomial_module(cells: Iterable[int], label: str = "") -> GradedModule:
    cs = tuple(sorted(set(cells)))
    s = set(cs)
    act = frozenset((n, c) for n in cs for c in range(1, cs[-1] - n + 1)
                    if n + c in s and binom2(n, c))
    return GradedModule(cs, act, label)


def sphere(n: int) -> GradedModule:
    return GradedModule((n,), frozenset(), f"S:{n}")


def stunted_module(a: int, b: int) -> GradedModule:
    if b < a:
        raise ValueError("empty cell range")
    return binomial_module(range(a, b + 1), f"P:{a}:{b}")


def deleted_cell_model(w: int, top: int) -> GradedModule:
    """Cells ``{-w, ..., top}`` without ``-1``; for ``w > 0`` the column model."""
    return binomial_module((n for n in range(-w, top + 1) if n != -1), f"M:{w}:{top}")


def column_model(w: int, t_max: int) -> list[tuple[GradedModule, int]]:
    """Bounded-below modules whose Ext assembles the coweight column ``w``.

    Returns ``(module, s_shift)`` pairs: a single deleted-cell model for
    ``w > 0``; for ``w <= 0`` the model of ``P_{-w}^inf`` and the sphere ``S^-1``.
    """
    if w > 0:
        return [(deleted_cell_model(w, t_max), 1)]
    return [(stunted_module(-w, max(t_max, -w)), 1), (sphere(-1), 0)]


def dictionary_model(variant: str, K: int, T: int) -> GradedModule:
    if K < 1 or T < 1:
        raise ValueError("depth and top must be positive")
    if variant == "A":
        return binomial_module((n for n in range(-K, T + 1) if n != -1), f"DA:{K}:{T}")
    if variant == "B":
        return binomial_module(range(-K, T + 1), f"DB:{K}:{T}")
    raise ValueError(f"unknown dictionary variant {variant!r}")


# --- maps and short exact sequences --------------------------------------------------------

@dataclass(frozen=True)
class ModuleMap:
    """A map sending ``x^n`` to ``x^n`` for ``n`` in ``cells`` and everything else to zero.

    Every map the engine needs (inclusions of top-cell submodules, projections
    onto bottom-cell quotients, collapsing cells) has this form.
    """

    source: GradedModule
    target: GradedModule
    cells: frozenset

    def image(self, n: int) -> int:
        return 1 if n in self.cells else 0

    def check(self) -> None:
        """Assert that the map commutes with every single ``Sq^c`` in range."""
        cells = self.source.cells + self.target.cells
        if not self.source.cells:
            return
        span = max(cells) - min(cells)
        for n in self.source.cells:
            for c in range(1, span + 1):
                lhs = self.source.sq(c, n) and self.image(n + c)
                rhs = self.image(n) and self.target.sq(c, n)
                if bool(lhs) != bool(rhs):
                    raise AssertionError(f"map does not commute with Sq^{c} on x^{n}")

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """``self`` after ``other``."""
        if other.target.cells != self.source.cells:
            raise ValueError("maps do not compose")
        return ModuleMap(other.source, self.target, other.cells & self.cells)


def cell_map(source: GradedModule, target: GradedModule) -> ModuleMap:
    f = ModuleMap(source, target, frozenset(source.cells) & frozenset(target.cells))
    f.check()
    return f


@dataclass(frozen=True)
class ShortExactSeq:
    """``0 -> sub -> middle -> quotient -> 0`` with cell inclusion and projection."""

    inclusion: ModuleMap
    projection: ModuleMap

    @property
    def sub(self) -> GradedModule:
        return self.inclusion.source

    @property
    def middle(self) -> GradedModule:
        return self.inclusion.target

    @property
    def quotient(self) -> GradedModule:
        return self.projection.target

    def check(self) -> None:
        self.inclusion.check()
        self.projection.check()
        mid = set(self.middle.cells)
        sub = set(self.sub.cells)
        quo = set(self.quotient.cells)
        if sub & quo or sub | quo != mid:
            raise AssertionError("cells of sub and quotient do not partition the middle")
        if self.inclusion.cells != frozenset(sub) or self.projection.cells != frozenset(quo):
            raise AssertionError("degreewise exactness fails")


def split_by_cells(m: GradedModule, sub_cells: Iterable[int]) -> ShortExactSeq:
    sub_cells = set(sub_cells)
    sub = m.restrict(sub_cells)
    quo = m.restrict(set(m.cells) - sub_cells)
    for n in sub.cells:
        for c in range(1, m.top - n + 1):
            if m.sq(c, n) and (n + c) not in sub_cells:
                raise AssertionError(f"cells {sorted(sub_cells)} are not closed under Sq^{c} x^{n}")
    ses = ShortExactSeq(ModuleMap(sub, m, frozenset(sub.cells)), ModuleMap(m, quo, frozenset(quo.cells)))
    ses.check()
    return ses


def cell_sub(m: GradedModule, cutoff: int) -> ShortExactSeq:
    """Split ``m`` into the cells ``>= cutoff`` (sub) and ``< cutoff`` (quotient)."""
    if not m.bottom <= cutoff <= m.top + 1:
        raise ValueError(f"cutoff {cutoff} outside the window [{m.bottom}, {m.top}]")
    return split_by_cells(m, [n for n in m.cells if n >= cutoff])


def interval(m: GradedModule, lo: int, hi: int) -> GradedModule:
    """Subquotient of ``m`` on cells ``lo..hi``."""
    return m.restrict(n for n in m.cells if lo <= n <= hi)


# --- module-spec grammar --------------------------------------------------------------------

class SpecError(ValueError):
    def __init__(self, text: str, position: int, message: str):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position} in {text!r}")


_INT = r"-?\d+"


def parse_module_spec(text: str, t_max: Optional[int] = None) -> GradedModule:
    """Parse ``S:n``, ``P:a:b``, ``M:w``, ``DA:K:T`` or ``DB:K:T``."""
    text = text.strip()
    m = re.fullmatch(r"([A-Z]+)((?::[^:]*)*)", text)
    if not m:
        raise SpecError(text, 0, "malformed module spec")
    kind = m.group(1)
    parts = text.split(":")[1:]
    nums = []
    pos = len(kind) + 1
    for p in parts:
        if not re.fullmatch(_INT, p):
            raise SpecError(text, pos, f"expected an integer, got {p!r}")
        nums.append(int(p))
        pos += len(p) + 1
    arity = {"S": 1, "P": 2, "M": (1, 2), "DA": 2, "DB": 2}
    if kind not in arity:
        raise SpecError(text, 0, f"unknown module kind {kind!r}")
    want = arity[kind]
    ok = len(nums) in want if isinstance(want, tuple) else len(nums) == want
    if not ok:
        raise SpecError(text, len(text), f"{kind} takes {want} integer argument(s)")
    if kind == "S":
        return sphere(nums[0])
    if kind == "P":
        if nums[1] < nums[0]:
            raise SpecError(text, len(kind) + 1, "empty cell range")
        return stunted_module(nums[0], nums[1])
    if kind == "M":
        w = nums[0]
        top = nums[1] if len(nums) == 2 else t_max
        if top is None:
            raise SpecError(text, len(text), "M:w needs a top cell or --tmax")
        if w <= 0:
            raise SpecError(text, 2, "deleted-cell model needs w > 0")
        return deleted_cell_model(w, top)
    if nums[0] < 1 or nums[1] < 1:
        raise SpecError(text, len(kind) + 1, "depth and top must be positive")
    return dictionary_model(kind[1], nums[0], nums[1])


def check_module_axioms(m: GradedModule, max_total: Optional[int] = None) -> None:
    """Check ``Sq^a Sq^b = adem_product(Sq^a, Sq^b)`` on every cell."""
    span = m.top - m.bottom
    if max_total is not None:
        span = min(span, max_total)
    for n in m.cells:
        for a in range(1, span + 1):
            for b in range(1, span - a + 1):
                if n + a + b > m.top:
                    continue
                lhs = m.act_word((a, b), n)
                rhs = 0
                for word in adem_product((a,), (b,)):
                    rhs ^= m.act_word(word, n)
                if lhs != rhs:
                    raise AssertionError(f"Adem relation fails for Sq^{a}Sq^{b} on x^{n}")


def admissible_count(d: int) -> int:
    return len(admissible_basis(d))
