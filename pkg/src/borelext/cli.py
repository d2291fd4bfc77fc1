"""Command-line front end: ``borelext <verb> [options]``.

Exit codes: 0 success, 1 a validation check failed, 2 usage error.
Flags override values from ``--config`` (``key = value`` lines, ``#`` comments).
"""

from __future__ import annotations

import argparse
import configparser
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .charts import ChartDocument, dumps, page_document, render_svg, write_atomic

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

CONFIG_KEYS = {"smax": int, "tmax": int, "stem_max": int, "coweight_min": int,
               "coweight_max": int, "depth": int, "jobs": int, "cache_dir": str}

BOREL_S_MAX = 12

DEFAULTS = {"smax": None, "tmax": 14, "stem_max": 30, "coweight_min": -2, "coweight_max": 13,
            "depth": None, "jobs": 1, "cache_dir": None}

SUITES = ("cobar", "lin", "posw-negw", "parity", "paper-remarks")

log = logging.getLogger("borelext")


class UsageError(Exception):
    pass


def read_config(path: Path) -> dict:
    """Parse a ``key = value`` file; unknown keys and bad values are usage errors."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        parser.read_string("[borelext]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise UsageError(f"malformed config {path}: {exc}") from exc
    out = {}
    for key, raw in parser["borelext"].items():
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"unknown config key {key!r} in {path}")
        try:
            out[key] = CONFIG_KEYS[key](raw)
        except ValueError as exc:
            raise UsageError(f"config key {key!r} in {path}: {raw!r} is not valid") from exc
    return out


def _settings(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(Path(args.config)))
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if (cfg["smax"] is not None and cfg["smax"] < 0) or cfg["jobs"] < 1:
        raise UsageError("--smax must be >= 0 and --jobs >= 1")
    return cfg


def _store(cfg):
    from .resolution import ResolutionStore, default_store
    if cfg["cache_dir"]:
        return ResolutionStore(Path(cfg["cache_dir"]))
    return default_store()


def _engine(cfg):
    from .borel import BorelEngine
    return BorelEngine(s_max=_smax(cfg), coweight_min=cfg["coweight_min"],
                       coweight_max=cfg["coweight_max"], stem_max=cfg["stem_max"],
                       store=_store(cfg), depth=cfg["depth"])


def _smax(cfg) -> int:
    return BOREL_S_MAX if cfg["smax"] is None else cfg["smax"]


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


# -- verbs ----------------------------------------------------------------------------------

def cmd_ext(args, cfg) -> int:
    from .modules import SpecError, parse_module_spec
    from .resolution import minimal_resolution
    try:
        m = parse_module_spec(args.module, cfg["tmax"])
    except SpecError as exc:
        raise UsageError(str(exc)) from exc
    if cfg["tmax"] < m.bottom:
        raise UsageError(f"--tmax {cfg['tmax']} lies below the module bottom {m.bottom}")
    res = minimal_resolution(m, _smax(cfg), cfg["tmax"])
    dims = [{"s": s, "t": t, "stem": t - s, "dimension": d,
             "generators": [f"g{s}_{t}_{i}" for i in range(d)]}
            for (s, t), d in sorted(res.chart().items()) if t <= cfg["tmax"]]
    doc = {"schema": "borelext-ext/1", "module": args.module, "cells": list(m.cells),
           "s_max": _smax(cfg), "t_max": cfg["tmax"], "code_version": __version__, "dims": dims}
    _emit(dumps(doc), args.json)
    return EXIT_OK


def _page_worker(job):
    cfg, coweight = job
    return page_document(_engine(cfg), coweight).to_json()


def cmd_borel(args, cfg) -> int:
    lo, hi = cfg["coweight_min"], cfg["coweight_max"]
    if args.coweight is not None:
        if not lo <= args.coweight <= hi:
            raise UsageError(f"--coweight {args.coweight} outside [{lo}, {hi}]")
        coweights = [args.coweight]
    else:
        coweights = list(range(lo, hi + 1))
    jobs = [(cfg, c) for c in coweights]
    if cfg["jobs"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            texts = list(pool.map(_page_worker, jobs))
    else:
        texts = [_page_worker(j) for j in jobs]
    for c, text in zip(coweights, texts):
        if args.json:
            target = Path(args.json)
            _emit(text, str(target / f"coweight_{c}.json") if len(coweights) > 1 or target.is_dir()
                  else str(target))
        elif not args.svg:
            sys.stdout.write(text)
        if args.svg:
            svg = render_svg(ChartDocument.from_json(text))
            target = Path(args.svg)
            write_atomic(target / f"coweight_{c}.svg" if len(coweights) > 1 or target.is_dir()
                         else target, svg)
    return EXIT_OK


def cmd_render(args, cfg) -> int:
    try:
        doc = ChartDocument.from_json(Path(args.chart).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read chart {args.chart}: {exc}") from exc
    _emit(render_svg(doc), args.svg)
    return EXIT_OK


def cmd_dict(args, cfg) -> int:
    engine = _engine(cfg)
    depth = cfg["depth"] or 16
    d = engine.dictionary(args.variant, K=depth, s_max=min(_smax(cfg), args.dict_smax))
    doc = {"schema": "borelext-dict/1", "variant": d.variant, "depths": list(d.depths),
           "pairs": [{"source": p.source, "target": p.target, "r": p.r, "s": p.s, "t": p.t,
                      "stem": p.stem} for p in d.pairs],
           "unstable": [{"source": p.source, "target": p.target, "r": p.r} for p in d.unstable]}
    _emit(dumps(doc), args.json)
    return EXIT_OK


def cmd_mahowald(args, cfg) -> int:
    engine = _engine(cfg)
    try:
        res = engine.mahowald(args.name, K=cfg["depth"] or 8)
    except KeyError as exc:
        raise UsageError(f"unknown sphere class {args.name!r}") from exc
    doc = {"schema": "borelext-mahowald/1", "class": res.sphere_class,
           "name": res.name.label if res.name else None,
           "depths": list(res.depths), "stable": res.stable}
    _emit(dumps(doc), args.json)
    return EXIT_OK if res.stable else EXIT_FAILED


def cmd_validate(args, cfg) -> int:
    from .validate import run_suite
    report = run_suite(args.suite, store=_store(cfg), s_max=cfg["smax"])
    _emit(dumps(report.to_dict()), args.json)
    return EXIT_OK if report.ok else EXIT_FAILED


# -- parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--smax", type=int, help="largest Adams filtration")
    common.add_argument("--cache-dir", dest="cache_dir", help="resolution cache directory")
    common.add_argument("--jobs", type=int, help="worker processes")
    common.add_argument("--json", help="write JSON here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="borelext", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    e = sub.add_parser("ext", parents=[common], help="Ext chart of a module")
    e.add_argument("module", help="S:n, P:a:b, M:w[:top], DA:K:T or DB:K:T")
    e.add_argument("--tmax", type=int, help="largest internal degree")
    e.set_defaults(func=cmd_ext)

    b = sub.add_parser("borel", parents=[common], help="Borel Ext chart pages")
    b.add_argument("--coweight", type=int, help="one page only (default: all)")
    b.add_argument("--stem-max", dest="stem_max", type=int)
    b.add_argument("--coweight-min", dest="coweight_min", type=int)
    b.add_argument("--coweight-max", dest="coweight_max", type=int)
    b.add_argument("--depth", type=int, help="truncation depth for limit checks")
    b.add_argument("--svg", help="also write SVG (file, or directory for several pages)")
    b.set_defaults(func=cmd_borel)

    d = sub.add_parser("dict", parents=[common], help="AHSS dictionary of a variant")
    d.add_argument("variant", choices=("A", "B"))
    d.add_argument("--depth", type=int, help="model depth K (certified against K+8)")
    d.add_argument("--dict-smax", dest="dict_smax", type=int, default=6)
    d.set_defaults(func=cmd_dict)

    m = sub.add_parser("mahowald", parents=[common], help="Mahowald invariant of a sphere class")
    m.add_argument("name", help="catalog name such as h1 or h0^3h3, or 1")
    m.add_argument("--depth", type=int)
    m.set_defaults(func=cmd_mahowald)

    v = sub.add_parser("validate", parents=[common], help="run a check suite")
    v.add_argument("suite", choices=SUITES)
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("render", parents=[common], help="chart JSON to SVG")
    r.add_argument("chart")
    r.add_argument("--svg", help="output file (default: stdout)")
    r.set_defaults(func=cmd_render)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _settings(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"borelext: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        from .borel import WindowError
        if isinstance(exc, WindowError):
            print(f"borelext: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        raise


if __name__ == "__main__":
    sys.exit(main())
