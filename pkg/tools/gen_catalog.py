"""Regenerate src/borelext/data/sphere_names.json.

Names each basis vector of the sphere chart (s <= S_MAX, stem <= STEM_MAX) by
multiplying already-named classes with a few low classes (Yoneda products via
chain maps) and falling back to a short table of indecomposables.
"""

import json
import sys
from pathlib import Path

from borelext.modules import sphere
from borelext.resolution import ChainMap, Resolution

S_MAX = 20
STEM_MAX = 30

# (s, stem) -> names of algebra indecomposables, in the order the complement is filled
INDECOMPOSABLES = {
    (1, 0): ["h0"], (1, 1): ["h1"], (1, 3): ["h2"], (1, 7): ["h3"], (1, 15): ["h4"],
    (3, 8): ["c0"], (5, 9): ["Ph1"], (5, 11): ["Ph2"], (4, 14): ["d0"], (7, 16): ["Pc0"],
    (4, 17): ["e0"], (9, 17): ["P2h1"], (4, 18): ["f0"], (3, 19): ["c1"], (9, 19): ["P2h2"],
    (4, 20): ["g"], (8, 22): ["Pd0"], (7, 23): ["i"], (11, 24): ["P2c0"], (8, 25): ["Pe0"],
    (13, 25): ["P3h1"], (7, 26): ["j"], (13, 27): ["P3h2"], (7, 29): ["k"], (6, 30): ["r"],
    (12, 30): ["P2d0"], (8, 28): ["d0^2"],
}
MULTIPLIERS = ["h0", "h1", "h2", "h3", "h4", "c0", "Ph1", "Ph2", "d0", "e0", "f0", "g"]
ORDER = ["h0", "h1", "h2", "h3", "h4", "c0", "c1", "Ph1", "Ph2", "d0", "e0", "f0", "g",
         "Pc0", "P2h1", "P2h2", "Pd0", "Pe0", "P2c0", "P3h1", "P3h2", "P2d0", "i", "j", "k", "r"]


def parse(name):
    out = {}
    i = 0
    while i < len(name):
        best = max((g for g in ORDER if name.startswith(g, i)), key=len)
        i += len(best)
        e = 1
        if i < len(name) and name[i] == "^":
            j = i + 1
            while j < len(name) and name[j].isdigit():
                j += 1
            e = int(name[i + 1:j])
            i = j
        out[best] = out.get(best, 0) + e
    return out


def fmt(mono):
    parts = []
    for g in ORDER:
        e = mono.get(g, 0)
        if e:
            parts.append(g if e == 1 else f"{g}^{e}")
    return "".join(parts)


def main(out_path):
    n_max = STEM_MAX
    base = Resolution(sphere(0), S_MAX, n_max)
    named = {}          # (s, stem) -> list of (name, vector)
    gen_of = {}         # multiplier name -> (s, t, generator)
    chains = {}

    def mult_matrix(x, s, stem):
        sx, tx, g = gen_of[x]
        if x not in chains:
            tgt = Resolution(sphere(tx), S_MAX - sx, n_max + tx)
            chains[x] = ChainMap(base, tgt, sx, lambda gg, t, g=g: 1 if gg == g else 0)
        if s + sx > S_MAX or stem + tx - sx > n_max:
            return None
        return chains[x].ext_matrix(s, s + stem + tx)

    for s in range(0, S_MAX + 1):
        for stem in range(0, n_max + 1):
            t = s + stem
            dim = base.dim(s, t)
            if not dim:
                continue
            if s == 0:
                named[(s, stem)] = [("1", 1)]
                continue
            span = {}
            chosen = []

            def offer(name, v):
                r = v
                while r:
                    hb = r.bit_length() - 1
                    if hb not in span:
                        break
                    r ^= span[hb]
                if r:
                    span[r.bit_length() - 1] = r
                    chosen.append((name, v))

            for x in MULTIPLIERS:
                if x not in gen_of:
                    continue
                sx, tx, _ = gen_of[x]
                key = (s - sx, stem - (tx - sx))
                if key not in named:
                    continue
                m = mult_matrix(x, *key)
                if m is None:
                    continue
                for yname, yv in named[key]:
                    if "+" in yname:
                        continue
                    out = 0
                    for i, row in enumerate(m.data):
                        if bin(row & yv).count("1") & 1:
                            out |= 1 << i
                    if out:
                        mono = parse(yname) if yname != "1" else {}
                        mono[x] = mono.get(x, 0) + 1
                        offer(fmt(mono), out)
            for name in INDECOMPOSABLES.get((s, stem), []):
                for j in range(dim):
                    before = len(chosen)
                    offer(name, 1 << j)
                    if len(chosen) > before:
                        break
            if len(chosen) != dim:
                print(f"unnamed classes at s={s} stem={stem}: {len(chosen)}/{dim}", file=sys.stderr)
                sys.exit(1)
            named[(s, stem)] = chosen
            for name, v in chosen:
                if name in MULTIPLIERS and name not in gen_of and dim == 1:
                    gen_of[name] = (s, t, base.gens_at(s, t)[0])
    doc = {
        "format": "sphere-names/1",
        "s_max": S_MAX,
        "stem_max": n_max,
        "entries": [
            {"s": s, "stem": stem, "basis": [{"name": nm, "vector": v} for nm, v in lst]}
            for (s, stem), lst in sorted(named.items())
        ],
    }
    Path(out_path).write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/borelext/data/sphere_names.json")
