"""Brute-force Ext through the reduced cobar complex of the dual Steenrod algebra.

This is a validation oracle only.  It never touches the resolution engine: the
dual algebra ``F2[xi_1, xi_2, ...]`` and its coproduct are implemented from
scratch, and the comodule is read off the module's single-``Sq`` action through
the Milnor/admissible change of basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as iproduct

from .f2core import Echelon
from .modules import GradedModule
from .steenrod import milnor_basis

S_CAP = 3
T_CAP = 14

DualMonomial = tuple[int, ...]   # exponents of xi_1, xi_2, ... (trailing zeros stripped)


def dual_degree(e: DualMonomial) -> int:
    return sum(ei * ((1 << (i + 1)) - 1) for i, ei in enumerate(e))


def _strip(seq) -> DualMonomial:
    seq = list(seq)
    while seq and seq[-1] == 0:
        seq.pop()
    return tuple(seq)


@lru_cache(maxsize=None)
def monomials(d: int) -> tuple[DualMonomial, ...]:
    # same exponent sequences as the Milnor basis, by duality
    return milnor_basis(d)


def _mul(a: DualMonomial, b: DualMonomial) -> DualMonomial:
    n = max(len(a), len(b))
    return _strip((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _poly_mul(x: dict, y: dict) -> dict:
    """Product of polynomials in ``A_* (x) A_*`` keyed by (left, right) monomials."""
    out: dict = {}
    for (l1, r1), c1 in x.items():
        for (l2, r2), c2 in y.items():
            k = (_mul(l1, l2), _mul(r1, r2))
            out[k] = out.get(k, 0) ^ (c1 & c2)
    return {k: 1 for k, v in out.items() if v}


def _power(e: int, n: int) -> DualMonomial:
    """``xi_n^e`` as a monomial (``n >= 1``)."""
    return _strip([0] * (n - 1) + [e])


@lru_cache(maxsize=None)
def _coproduct_xi(n: int) -> tuple:
    """``Delta(xi_n) = sum_i xi_{n-i}^{2^i} (x) xi_i`` with ``xi_0 = 1``."""
    terms = []
    for i in range(n + 1):
        left = () if n - i == 0 else _power(1 << i, n - i)
        right = () if i == 0 else _power(1, i)
        terms.append((left, right))
    return tuple(terms)


@lru_cache(maxsize=None)
def coproduct(m: DualMonomial) -> frozenset:
    """``Delta`` of a monomial, as the set of (left, right) monomial pairs."""
    acc = {((), ()): 1}
    for i, e in enumerate(m):
        base = {t: 1 for t in _coproduct_xi(i + 1)}
        for _ in range(e):
            acc = _poly_mul(acc, base)
    return frozenset(acc)


def reduced_coproduct(m: DualMonomial) -> frozenset:
    return frozenset((l, r) for l, r in coproduct(m) if l and r)


@dataclass
class Comodule:
    """Left comodule over the dual Steenrod algebra with one basis element per cell."""

    cells: tuple[int, ...]
    coaction: dict = field(repr=False)   # cell n -> frozenset of (monomial, cell k), k < n

    def check(self) -> None:
        """Coassociativity: (Delta (x) 1) psi = (1 (x) psi) psi on every cell."""
        for n in self.cells:
            lhs: dict = {}
            for mono, k in self._full(n):
                for l, r in coproduct(mono):
                    key = (l, r, k)
                    lhs[key] = lhs.get(key, 0) ^ 1
            rhs: dict = {}
            for mono, k in self._full(n):
                for mono2, j in self._full(k):
                    key = (mono, mono2, j)
                    rhs[key] = rhs.get(key, 0) ^ 1
            if {k for k, v in lhs.items() if v} != {k for k, v in rhs.items() if v}:
                raise AssertionError(f"coassociativity fails on x_{n}")

    def _full(self, n: int):
        yield (), n
        yield from self.coaction[n]


def dualize(m: GradedModule) -> Comodule:
    """Homology comodule: ``psi(x_n) = sum_R xi^R (x) x_{n-|R|}`` over ``Sq(R) x^{n-|R|} = x^n``."""
    coaction = {}
    cells = set(m.cells)
    for n in m.cells:
        terms = []
        for k in m.cells:
            d = n - k
            if d <= 0:
                continue
            for i, r in enumerate(milnor_basis(d)):
                if m.act_milnor(d, i, k):
                    terms.append((r, k))
        coaction[n] = frozenset(terms)
    c = Comodule(tuple(sorted(cells)), coaction)
    c.check()
    return c


@dataclass
class CobarChart:
    dims: dict[tuple[int, int], int]
    cocycles: dict[tuple[int, int], list] = field(default_factory=dict)


class CapExceeded(ValueError):
    pass


def _cochains(c: Comodule, s: int, t: int) -> list[tuple]:
    """Basis ``(a_1 | ... | a_s | x_n)`` of total degree ``t``, each ``a_i`` of positive degree."""
    out = []
    for n in c.cells:
        rest = t - n
        if rest < s or (s == 0 and rest != 0):
            continue
        if s == 0:
            out.append(((), n))
            continue
        for degs in _compositions(rest, s):
            for monos in iproduct(*(monomials(d) for d in degs)):
                out.append((monos, n))
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for tail in _compositions(total - first, parts - 1):
            yield (first,) + tail


def _differential(c: Comodule, chain: tuple) -> list[tuple]:
    monos, n = chain
    out: dict = {}
    for i, a in enumerate(monos):
        for l, r in reduced_coproduct(a):
            key = (monos[:i] + (l, r) + monos[i + 1:], n)
            out[key] = out.get(key, 0) ^ 1
    for mono, k in c.coaction[n]:
        key = (monos + (mono,), k)
        out[key] = out.get(key, 0) ^ 1
    return [k for k, v in out.items() if v]


def cobar_ext(c: Comodule, s_max: int = S_CAP, t_max: int = T_CAP,
              check_d2: bool = True) -> CobarChart:
    if s_max > S_CAP or t_max > T_CAP:
        raise CapExceeded(f"cobar oracle is capped at s <= {S_CAP}, t <= {T_CAP}")
    dims: dict[tuple[int, int], int] = {}
    cocycles: dict[tuple[int, int], list] = {}
    for t in range(c.cells[0], t_max + 1):
        bases = [_cochains(c, s, t) for s in range(s_max + 2)]
        index = [{b: i for i, b in enumerate(basis)} for basis in bases]
        mats = []
        for s in range(s_max + 1):
            rows = []
            for chain in bases[s]:
                v = 0
                for term in _differential(c, chain):
                    v |= 1 << index[s + 1][term]
                rows.append(v)
            mats.append(rows)
        if check_d2:
            for s in range(s_max):
                for i, r in enumerate(mats[s]):
                    acc = 0
                    j = 0
                    while r:
                        if r & 1:
                            acc ^= mats[s + 1][j]
                        r >>= 1
                        j += 1
                    if acc:
                        raise AssertionError(f"d^2 != 0 on {bases[s][i]}")
        for s in range(s_max + 1):
            # cocycles: left kernel of mats[s]; coboundaries: span of images of mats[s-1]
            ech = Echelon()
            kernel = []
            for i, r in enumerate(mats[s]):
                rem, tag = ech.reduce(r)
                if rem:
                    ech.pivots[rem.bit_length() - 1] = (rem, tag ^ (1 << i))
                else:
                    kernel.append(tag ^ (1 << i))
            bound = Echelon()
            if s > 0:
                for r in mats[s - 1]:
                    bound.add(r, 0)
            reps = []
            for k in kernel:
                rem = bound.add(k, 0)
                if rem:
                    reps.append([bases[s][j] for j in range(len(bases[s])) if (k >> j) & 1])
            if reps:
                dims[(s, t)] = len(reps)
                cocycles[(s, t)] = reps
    return CobarChart(dims, cocycles)
