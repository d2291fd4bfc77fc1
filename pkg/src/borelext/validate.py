"""Check suites behind ``borelext validate``; each returns a :class:`Report`."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .resolution import Resolution, ResolutionStore, default_store

COBAR_MODULES = ("S:0", "P:1:8", "P:-5:-1", "DB:4:4")
LIMIT_S_MAX = 10
LIN_STEMS = (-3, 12)
PARITY_MODULE = "P:-6:7"


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, ok: bool, detail: str = "") -> Check:
        c = Check(name, bool(ok), detail)
        self.checks.append(c)
        return c

    def to_dict(self) -> dict:
        return {"schema": "borelext-validate/1", "suite": self.suite, "ok": self.ok,
                "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.checks]}


# -- cobar -----------------------------------------------------------------------------------

def cobar_suite(store: ResolutionStore, s_max: Optional[int] = None) -> Report:
    from .cobar import cobar_ext, dualize
    from .modules import parse_module_spec
    rep = Report("cobar")
    for spec in COBAR_MODULES:
        m = parse_module_spec(spec)
        oracle = cobar_ext(dualize(m), 3, 14).dims
        res = Resolution(m, 3, 14)
        engine = {k: d for k, d in res.chart().items() if k[1] <= 14}
        diff = sorted(set(oracle.items()) ^ set(engine.items()))
        rep.add(spec, not diff, f"{len(engine)} nonzero bidegrees" if not diff else f"differ at {diff}")
    return rep


# -- limits ----------------------------------------------------------------------------------

def lin_suite(store: ResolutionStore, s_max: Optional[int] = None) -> Report:
    from .limits import LimitEngine
    from .modules import sphere
    s_max = LIMIT_S_MAX if s_max is None else s_max
    lo, hi = LIN_STEMS
    eng = LimitEngine(s_max, -2, 13, store=store)
    rep = Report("lin")
    a = eng.lin_chart("A", lo, hi)
    rep.add("variant A stabilized", a.stable, f"unstable {a.unstable}" if a.unstable else "")
    rep.add("variant A limit vanishes", not a.dims(), f"nonzero at {sorted(a.dims())}" if a.dims() else "")
    b = eng.lin_chart("B", lo, hi)
    rep.add("variant B stabilized", b.stable, f"unstable {b.unstable}" if b.unstable else "")
    s1 = store.get(sphere(-1), s_max, hi)
    want = {(s, t): d for (s, t), d in s1.chart().items() if s <= s_max and lo <= t - s <= hi}
    got = b.dims()
    rep.add("variant B limit equals Ext(S^-1)", got == want,
            f"{len(want)} bidegrees" if got == want else f"limit {got} vs sphere {want}")
    return rep


def posw_negw_suite(store: ResolutionStore, s_max: Optional[int] = None,
                    weights: range = range(-2, 14)) -> Report:
    from .limits import LimitEngine
    s_max = LIMIT_S_MAX if s_max is None else s_max
    eng = LimitEngine(s_max, -2, 13, store=store)
    rep = Report("posw-negw")
    for w in weights:
        chart = eng.ext_of_limit(w)
        problems = eng.check_transport(w)
        if chart.unstable:
            problems = [f"unstable at {chart.unstable}"] + problems
        nonzero = sum(1 for v in chart.images.values() if v)
        rep.add(f"w={w}", not problems,
                "; ".join(problems) if problems else
                f"{nonzero} nonzero bidegrees, ladder {list(chart.ladder)}")
    return rep


# -- AHSS ------------------------------------------------------------------------------------

def h0_product(store: ResolutionStore, s_max: int, n_max: int) -> Callable[[int, int, int], int]:
    """``x -> h0 x`` on ``Ext^{s,t}(S^0)``, by lifting the cocycle ``h0`` to a chain map."""
    from .resolution import ChainMap
    from .modules import sphere
    base = store.get(sphere(0), s_max + 1, n_max)
    shifted = store.get(sphere(1), s_max, n_max + 1)
    (g,) = base.gens_at(1, 1)
    chain = ChainMap(base, shifted, 1, lambda gg, t: 1 if gg == g else 0)

    def times(s: int, t: int, x: int) -> int:
        if t + 1 < 1 or not x:
            return 0
        m = chain.ext_matrix(s, t + 1)
        return sum(1 << i for i, row in enumerate(m.data) if bin(row & x).count("1") & 1)

    return times


def parity_suite(store: ResolutionStore, s_max: Optional[int] = None) -> Report:
    """``d_1`` out of cell ``n`` is multiplication by ``h0`` for even ``n`` and zero for odd ``n``."""
    from .modules import parse_module_spec
    from .sseq import Ahss
    s_max = 4 if s_max is None else min(s_max, 6)
    n_max = 10
    m = parse_module_spec(PARITY_MODULE)
    a = Ahss(m, s_max, n_max, store)
    h0 = h0_product(store, s_max, n_max - m.bottom)
    rep = Report("parity")
    bad, seen = [], 0
    for n in m.cells[1:]:
        for s in range(s_max):
            for t in range(n + s, n_max + s + 1):
                for i in range(a.e1_dim(n, s, t)):
                    z = 1 << i
                    d1 = a.d_vector(1, n, s, t, z)
                    want = h0(s, t - n, z) if n % 2 == 0 else 0
                    seen += 1
                    if d1 != want:
                        bad.append((n, s, t, i))
    rep.add(f"d1 parity on {PARITY_MODULE}", not bad,
            f"{seen} sphere classes checked" if not bad else f"mismatches at {bad[:10]}")
    return rep


# -- quoted values ---------------------------------------------------------------------------

def quoted_values_suite(store: ResolutionStore, s_max: Optional[int] = None) -> Report:
    from .borel import BorelEngine
    s_max = max(9, 10 if s_max is None else s_max)
    eng = BorelEngine(s_max=s_max, store=store)
    rep = Report("paper-remarks")
    g = eng.group(9, 23, 11)
    rep.add("Ext(9,23,11) = 0", g.dim == 0, f"dimension {g.dim}")
    for (s, t, w), name in (((5, 16, 8), "h0^3h3[-4]"), ((3, 7, 1), "h0h2[0]"), ((3, 6, 0), "h1^2[1]")):
        names = eng.group(s, t, w).names()
        rep.add(f"{name} in Ext({s},{t},{w})", name in names, f"basis {names}")
    rep.add(*rho_check(eng))
    return rep


def rho_check(eng) -> tuple[str, bool, str]:
    """rho sends h0h2[0] in (3,7,1) to the class named h1^2[1] in (3,6,0) through the limit."""
    rho = eng.rho_map(3, 7, 1)
    src = rho.source.names()
    if "h0h2[0]" not in src:
        return "rho(h0h2[0]) = h1^2[1]", False, f"source basis {src}"
    image = rho.apply(1 << src.index("h0h2[0]"))
    column = "+".join(rho.target.names()[i] for i in range(rho.target.dim) if (image >> i) & 1)
    name = eng.limit_name(3, 6, 0, image)
    return ("rho(h0h2[0]) = h1^2[1]", name == "h1^2[1]",
            f"limit name {name}; column-model coordinates {column or '0'}")


SUITES = {"cobar": cobar_suite, "lin": lin_suite, "posw-negw": posw_negw_suite,
          "parity": parity_suite, "paper-remarks": quoted_values_suite}


def run_suite(name: str, store: Optional[ResolutionStore] = None,
              s_max: Optional[int] = None) -> Report:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](store or default_store(), s_max)
