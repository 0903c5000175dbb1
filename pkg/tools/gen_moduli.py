"""Regenerate the table of lexicographically smallest irreducible moduli.

The table only caches what ``smallest_irreducible`` computes; delete an
entry and the library falls back to the search.
"""
import json
import sys
import time
from pathlib import Path

from dgw.fields import _search_smallest_irreducible

OUT = Path(__file__).resolve().parents[1] / "src" / "dgw" / "data" / "moduli.json"


def wanted_degrees(p: int, limit: int) -> list[int]:
    degs = set(range(1, 61))
    for m in range(1, 61):
        k = m
        while k <= limit:
            degs.add(k)
            k *= p
    return sorted(d for d in degs if d <= limit)


DEFAULT_PLAN = {2: 512, 3: 486, 5: 750, 7: 420}


def main(argv=None):
    """Arguments ``p:limit`` override the default plan, e.g. ``7:420``."""
    args = sys.argv[1:] if argv is None else argv
    plan = dict(tuple(map(int, a.split(":"))) for a in args) if args else DEFAULT_PLAN
    table = json.loads(OUT.read_text()) if OUT.exists() else {}
    for p, limit in plan.items():
        for k in wanted_degrees(p, limit):
            key = f"{p}:{k}"
            if key in table:
                continue
            t = time.time()
            f = _search_smallest_irreducible(p, k)
            table[key] = "".join(str(c) for c in f[:-1]) if p <= 10 else list(f)
            print(key, round(time.time() - t, 2), file=sys.stderr, flush=True)
            OUT.write_text(json.dumps(table, sort_keys=True, separators=(",", ":")))


if __name__ == "__main__":
    main()
